//! Real functions on a finite poset, the isotone cone, and the preorder a
//! family of functions induces.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{ElementSet, Poset};
use crate::rational::{self, one, zero, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FuncError {
    #[error("the family has no members")]
    EmptyFamily,
    #[error("member {member} is not isotone: {a} ⪯ {b} but f({a}) > f({b})")]
    NotIsotone { member: usize, a: usize, b: usize },
    #[error("carrier mismatch: expected {expected} values, got {got}")]
    CarrierMismatch { expected: usize, got: usize },
    #[error("expected {expected} member names, got {got}")]
    NameCount { expected: usize, got: usize },
}

/// A function `M → ℝ` stored as one exact value per element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroundFunction {
    #[serde(with = "rational::serde_str::vec")]
    values: Vec<Rational>,
}

impl GroundFunction {
    pub fn new(values: Vec<Rational>) -> GroundFunction {
        GroundFunction { values }
    }

    pub fn constant(len: usize, c: Rational) -> GroundFunction {
        GroundFunction {
            values: vec![c; len],
        }
    }

    /// Indicator of `set`, with values exactly 0 and 1.
    pub fn indicator(len: usize, set: &ElementSet) -> GroundFunction {
        GroundFunction {
            values: (0..len)
                .map(|i| if set.contains(&i) { one() } else { zero() })
                .collect(),
        }
    }

    pub fn from_ints(values: &[i64]) -> GroundFunction {
        GroundFunction {
            values: values.iter().map(|&v| rational::int(v)).collect(),
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.values[i]
    }

    pub fn min(&self) -> Option<&Rational> {
        self.values.iter().min()
    }

    pub fn max(&self) -> Option<&Rational> {
        self.values.iter().max()
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> GroundFunction {
        GroundFunction {
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Pointwise sum. Panics on length mismatch.
    pub fn add(&self, other: &GroundFunction) -> GroundFunction {
        assert_eq!(self.len(), other.len(), "carrier mismatch in sum");
        GroundFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn check_len(&self, expected: usize) -> Result<(), FuncError> {
        if self.len() != expected {
            return Err(FuncError::CarrierMismatch {
                expected,
                got: self.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for GroundFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// First related pair `a ⪯ b` with `f(a) > f(b)`, if any.
pub fn isotone_violation(p: &Poset, f: &GroundFunction) -> Option<(usize, usize)> {
    let n = p.len();
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .find(|&(a, b)| p.leq(a, b) && f.get(a) > f.get(b))
}

/// `a ⪯ b ⟹ f(a) ≤ f(b)`. False on a length mismatch.
pub fn is_isotone(p: &Poset, f: &GroundFunction) -> bool {
    f.len() == p.len() && isotone_violation(p, f).is_none()
}

/// A family `S` of isotone functions on a fixed carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    carrier: usize,
    members: Vec<GroundFunction>,
    names: Option<Vec<String>>,
}

impl Family {
    /// Checks lengths and isotonicity of every member. An empty family is
    /// allowed here; the predicates that need a member reject it.
    pub fn new(p: &Poset, members: Vec<GroundFunction>) -> Result<Family, FuncError> {
        for (idx, m) in members.iter().enumerate() {
            m.check_len(p.len())?;
            if let Some((a, b)) = isotone_violation(p, m) {
                return Err(FuncError::NotIsotone { member: idx, a, b });
            }
        }
        Ok(Family {
            carrier: p.len(),
            members,
            names: None,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Family, FuncError> {
        if names.len() != self.members.len() {
            return Err(FuncError::NameCount {
                expected: self.members.len(),
                got: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn members(&self) -> &[GroundFunction] {
        &self.members
    }

    pub fn member(&self, i: usize) -> Option<&GroundFunction> {
        self.members.get(i)
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Appends further isotone members, keeping names aligned if present.
    pub fn extend(&mut self, p: &Poset, extra: Vec<GroundFunction>) -> Result<(), FuncError> {
        let start = self.members.len();
        let checked = Family::new(p, extra).map_err(|e| match e {
            FuncError::NotIsotone { member, a, b } => FuncError::NotIsotone {
                member: member + start,
                a,
                b,
            },
            other => other,
        })?;
        if let Some(names) = &mut self.names {
            names.extend((start..start + checked.len()).map(|i| format!("s{i}")));
        }
        self.members.extend(checked.members);
        Ok(())
    }

    fn require_members(&self) -> Result<(), FuncError> {
        if self.members.is_empty() {
            return Err(FuncError::EmptyFamily);
        }
        Ok(())
    }

    fn check_carrier(&self, p: &Poset) -> Result<(), FuncError> {
        if self.carrier != p.len() {
            return Err(FuncError::CarrierMismatch {
                expected: p.len(),
                got: self.carrier,
            });
        }
        Ok(())
    }
}

/// Square boolean relation on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    cells: Vec<bool>,
}

impl Relation {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Relation {
        let mut cells = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                cells.push(f(a, b));
            }
        }
        Relation { n, cells }
    }

    pub fn of_poset(p: &Poset) -> Relation {
        Relation::from_fn(p.len(), |a, b| p.leq(a, b))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, a: usize, b: usize) -> bool {
        self.cells[a * self.n + b]
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|a| self.get(a, a))
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.n;
        (0..n).all(|a| {
            (0..n).all(|b| !self.get(a, b) || (0..n).all(|c| !self.get(b, c) || self.get(a, c)))
        })
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.n;
        (0..n).all(|a| (0..n).all(|b| a == b || !(self.get(a, b) && self.get(b, a))))
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Relation) -> bool {
        self.n == other.n && self.cells.iter().zip(&other.cells).all(|(x, y)| !x || *y)
    }
}

/// `x ⪯_S y ⟺ f(x) ≤ f(y)` for every member `f`.
///
/// Computed member-by-member: start from the total relation and clear every
/// cell some member refutes.
pub fn generated_preorder(p: &Poset, s: &Family) -> Result<Relation, FuncError> {
    s.require_members()?;
    s.check_carrier(p)?;
    let n = p.len();
    let mut cells = vec![true; n * n];
    for f in s.members() {
        let v = f.values();
        for x in 0..n {
            for y in 0..n {
                if v[x] > v[y] {
                    cells[x * n + y] = false;
                }
            }
        }
    }
    Ok(Relation { n, cells })
}

/// A pair `a ⋠ b` that no member separates: `f(a) ≤ f(b)` for every `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationWitness {
    pub a: usize,
    pub b: usize,
}

impl fmt::Display for GenerationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ⋠ {} but every member has f({}) ≤ f({})",
            self.a, self.b, self.a, self.b
        )
    }
}

/// Whether `S` generates the order, with a counterexample when it does not.
pub fn generates(p: &Poset, s: &Family) -> Result<Option<GenerationWitness>, FuncError> {
    let r = generated_preorder(p, s)?;
    for a in 0..p.len() {
        for b in 0..p.len() {
            // Members are isotone, so ⪯ ⊆ ⪯_S always holds.
            debug_assert!(!p.leq(a, b) || r.get(a, b));
            if r.get(a, b) && !p.leq(a, b) {
                return Ok(Some(GenerationWitness { a, b }));
            }
        }
    }
    Ok(None)
}

/// For all `x ≠ y` some member takes different values at `x` and `y`.
pub fn separates_points(p: &Poset, s: &Family) -> Result<bool, FuncError> {
    s.require_members()?;
    s.check_carrier(p)?;
    let n = p.len();
    Ok((0..n).all(|x| ((x + 1)..n).all(|y| s.members().iter().any(|f| f.get(x) != f.get(y)))))
}

/// `max_m |f(m) − g(m)|`, zero on an empty carrier.
pub fn sup_dist(f: &GroundFunction, g: &GroundFunction) -> Result<Rational, FuncError> {
    g.check_len(f.len())?;
    Ok(f.values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| rational::abs_diff(a, b))
        .max()
        .unwrap_or_else(Rational::zero))
}

/// The indicators of all principal upsets, in element order. Always
/// generates the order: for `a ⋠ b` the indicator of `upset(a)` is 1 at `a`
/// and 0 at `b`.
pub fn upset_generators(p: &Poset) -> Family {
    let members = (0..p.len())
        .map(|a| GroundFunction::indicator(p.len(), &p.upset(a)))
        .collect();
    let names = (0..p.len())
        .map(|a| format!("up({})", p.label(a)))
        .collect();
    Family::new(p, members)
        .and_then(|f| f.with_names(names))
        .expect("upset indicators are isotone")
}
