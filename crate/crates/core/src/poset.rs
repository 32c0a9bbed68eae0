//! Finite partially ordered sets.
//!
//! Elements are the indices `0..n`. The order is stored as its full
//! reflexive-transitive closure in a flat `n * n` matrix, so every order
//! query is a single lookup. The cover pairs the poset was built from are
//! kept for serialization; the closure is always recomputed on load.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, Rational};

pub type ElementSet = BTreeSet<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("cover pair ({0}, {1}) is out of range for a poset of {2} elements")]
    IndexOutOfRange(usize, usize, usize),
    #[error("covers contain a cycle: {}", fmt_cycle(.cycle))]
    Cycle { cycle: Vec<usize> },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("edge density must lie in [0, 1], got {0}")]
    BadDensity(String),
    #[error("a poset needs at least one element")]
    Empty,
}

fn fmt_cycle(cycle: &[usize]) -> String {
    cycle
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    labels: Option<Vec<String>>,
    covers: Vec<(usize, usize)>,
    leq: Vec<bool>,
}

/// On-disk form: covers only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosetDoc {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub covers: Vec<(usize, usize)>,
}

impl Poset {
    /// Builds the reflexive-transitive closure of `covers` and checks
    /// antisymmetry. A cycle is reported with an explicit witness.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<Poset, PosetError> {
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(PosetError::IndexOutOfRange(a, b, n));
            }
            succ[a].push(b);
        }
        for s in succ.iter_mut() {
            s.sort_unstable();
            s.dedup();
        }

        let mut leq = vec![false; n * n];
        for start in 0..n {
            let row = &mut leq[start * n..(start + 1) * n];
            row[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &succ[v] {
                    if !row[w] {
                        row[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }

        for a in 0..n {
            for b in (a + 1)..n {
                if leq[a * n + b] && leq[b * n + a] {
                    let mut cycle = shortest_path(&succ, a, b);
                    let back = shortest_path(&succ, b, a);
                    cycle.extend_from_slice(&back[1..]);
                    return Err(PosetError::Cycle { cycle });
                }
            }
        }

        let mut covers = covers.to_vec();
        covers.sort_unstable();
        covers.dedup();
        Ok(Poset {
            n,
            labels: None,
            covers,
            leq,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Poset, PosetError> {
        if labels.len() != self.n {
            return Err(PosetError::LabelCount {
                expected: self.n,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn chain(n: usize) -> Poset {
        let covers: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Poset::from_covers(n, &covers).expect("a chain is acyclic")
    }

    pub fn antichain(n: usize) -> Poset {
        Poset::from_covers(n, &[]).expect("no covers")
    }

    /// Random poset, reproducible per `(n, edge_density, seed)`.
    ///
    /// Elements are placed in a random total order; every pair `i < j` in
    /// that order becomes a cover with probability `edge_density`. Edges only
    /// go forward in the hidden total order, so the closure is antisymmetric.
    pub fn random(n: usize, edge_density: &Rational, seed: u64) -> Result<Poset, PosetError> {
        if n == 0 {
            return Err(PosetError::Empty);
        }
        let (num, den) = rational::unit_fraction_parts(edge_density)
            .ok_or_else(|| PosetError::BadDensity(rational::format(edge_density)))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut covers = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_range(0..den) < num {
                    covers.push((order[i], order[j]));
                }
            }
        }
        Poset::from_covers(n, &covers)
    }

    pub fn from_doc(doc: &PosetDoc) -> Result<Poset, PosetError> {
        let p = Poset::from_covers(doc.n, &doc.covers)?;
        match &doc.labels {
            Some(labels) => p.with_labels(labels.clone()),
            None => Ok(p),
        }
    }

    pub fn to_doc(&self) -> PosetDoc {
        PosetDoc {
            n: self.n,
            labels: self.labels.clone(),
            covers: self.covers.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Display name for element `i`: its label if present, else the index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    /// `a ⪯ b`.
    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.n + b]
    }

    /// Number of related pairs in the closure, reflexive pairs included.
    pub fn relation_size(&self) -> usize {
        self.leq.iter().filter(|&&b| b).count()
    }

    /// All pairs `(a, b)` with `a ⋠ b`, in lexicographic order.
    pub fn not_leq_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| !self.leq(a, b))
            .collect()
    }

    /// `{ x : a ⪯ x }`.
    pub fn upset(&self, a: usize) -> ElementSet {
        (0..self.n).filter(|&x| self.leq(a, x)).collect()
    }

    pub fn downset(&self, a: usize) -> ElementSet {
        (0..self.n).filter(|&x| self.leq(x, a)).collect()
    }

    /// Verifies the three partial-order axioms on the stored closure.
    pub fn check_axioms(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            if !self.leq(a, a) {
                return false;
            }
            for b in 0..n {
                if a != b && self.leq(a, b) && self.leq(b, a) {
                    return false;
                }
                if !self.leq(a, b) {
                    continue;
                }
                for c in 0..n {
                    if self.leq(b, c) && !self.leq(a, c) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_total(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.leq(a, b) || self.leq(b, a)))
    }
}

fn shortest_path(succ: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; succ.len()];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in &succ[v] {
            if parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    path
}
