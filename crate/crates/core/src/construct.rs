//! Constructive approximation of isotone functions from a generating family.
//!
//! Three layers, each producing a [`ConeExpr`] certificate together with the
//! values it evaluates to:
//!
//! * [`Constructor::separate_points`]: for `y ⋠ x`, a function in `[0, 1]`
//!   that is 0 at `x` and 1 at `y`, obtained by pushing a separating member
//!   through a ramp.
//! * [`Constructor::separate_sets`]: for sets `K`, `L` with no element of `L`
//!   below an element of `K`, a function in `[0, 1]` that is 0 on `K` and 1
//!   on `L`. Point separators are averaged over a cover of `K`, pushed
//!   through the ramp `[1 − 3/(4k), 1]`, averaged again over a cover of `L`
//!   and pushed through `[0, 3/(4l)]`.
//! * [`Constructor::approximate_normalized`]: for `f` with range in `[0, 1]`,
//!   the mean of the set separators of the level sets
//!   `Kᵢ = {f ≤ i/n}` and `Lᵢ = {f ≥ (i+1)/n}`, which is within `1/n` of `f`.
//!
//! On a finite poset with the discrete topology the open covers used by the
//! compactness arguments are finite selections: `V_x = {z : f_{x,y}(z) < 1/4}`
//! contains `x`, `W_y = {z : f_{K,y}(z) ≥ 3/4}` contains `y`, and a greedy
//! set cover picks the sub-cover.

use std::sync::OnceLock;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{self, ConeError, ConeExpr};
use crate::funcspace::{self, Family, FuncError, GenerationWitness, GroundFunction};
use crate::pl::{PlError, RampProvider};
use crate::poset::{ElementSet, Poset};
use crate::rational::{self, one, rat, zero, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("precondition violated: {y} ⪯ {x} for x = {x} in K and y = {y} in L")]
    PreconditionViolated { x: usize, y: usize },
    #[error(
        "no member of the family satisfies f({x}) < f({y}); the family does not generate the order"
    )]
    NoSeparator { x: usize, y: usize },
    #[error("regions do not cover elements {missing:?}")]
    UncoverableSet { missing: Vec<usize> },
    #[error("element {0} is out of range")]
    ElementOutOfRange(usize),
    #[error("target is not isotone: {a} ⪯ {b} but f({a}) > f({b})")]
    NotIsotone { a: usize, b: usize },
    #[error("target is not normalized: min = {min}, max = {max} (expected 0 and 1)")]
    NotNormalized { min: String, max: String },
    #[error("family does not generate the order: {0}")]
    DoesNotGenerate(GenerationWitness),
    #[error("the number of levels must be at least 1")]
    ZeroLevels,
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(String),
    #[error("level count {0} is too large")]
    TooManyLevels(String),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Pl(#[from] PlError),
}

pub type Result<T, E = ConstructError> = std::result::Result<T, E>;

/// An expression paired with its values on the carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Built {
    pub expr: ConeExpr,
    pub values: GroundFunction,
}

/// `1 − 3/(4k)`: every `g_y` stays at or below this on `K`.
pub fn inner_threshold(k: usize) -> Rational {
    one() - rat(3, 4 * k as i64)
}

/// `3/(4l)`: the outer average `g` stays at or above this on `L`.
pub fn outer_threshold(l: usize) -> Rational {
    rat(3, 4 * l as i64)
}

/// Greedy set cover of `target` by `regions`.
///
/// Repeatedly picks the region covering the most still-uncovered elements,
/// lowest index first on ties. The chosen indices are returned in ascending
/// order.
pub fn select_cover(target: &ElementSet, regions: &[ElementSet]) -> Result<Vec<usize>> {
    let mut uncovered = target.clone();
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let mut best: Option<(usize, usize)> = None;
        for (idx, r) in regions.iter().enumerate() {
            let gain = r.intersection(&uncovered).count();
            if gain > 0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((idx, gain));
            }
        }
        let Some((idx, _)) = best else {
            return Err(ConstructError::UncoverableSet {
                missing: uncovered.into_iter().collect(),
            });
        };
        for z in &regions[idx] {
            uncovered.remove(z);
        }
        chosen.push(idx);
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Per-`y` record of the first half of the set separation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointStage {
    pub y: usize,
    /// Elements `x` of `K` whose point separators were averaged.
    pub cover: Vec<usize>,
    /// `g_y`, the average of the selected point separators.
    pub average: GroundFunction,
    /// `f_{K,y}`, the ramp `[1 − 3/(4k), 1]` applied to `g_y`.
    pub lifted: Built,
}

impl PointStage {
    pub fn k(&self) -> usize {
        self.cover.len()
    }
}

/// Result of separating `K` from `L`, with the intermediate averages kept so
/// that their margins can be checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSeparation {
    pub k_set: ElementSet,
    pub l_set: ElementSet,
    pub result: Built,
    /// One stage per element of `L`, in ascending order. Empty when `K` or
    /// `L` is empty.
    pub stages: Vec<PointStage>,
    /// Elements `y` of `L` whose lifted functions were averaged into `g`.
    pub outer_cover: Vec<usize>,
    /// `g`, the average over the outer cover.
    pub outer_average: Option<GroundFunction>,
}

impl SetSeparation {
    pub fn l(&self) -> usize {
        self.outer_cover.len()
    }

    /// Checks the exact margins the construction relies on:
    /// `g_y ≤ 1 − 3/(4k)` on `K`, `g_y(y) = 1`, `g = 0` on `K` and
    /// `g ≥ 3/(4l)` on `L`. Returns a description of the first failure.
    pub fn check_margins(&self) -> std::result::Result<(), String> {
        for st in &self.stages {
            let bound = inner_threshold(st.k());
            for &x in &self.k_set {
                if st.average.get(x) > &bound {
                    return Err(format!(
                        "g_{}({x}) = {} exceeds 1 - 3/(4k) = {bound}",
                        st.y,
                        st.average.get(x)
                    ));
                }
            }
            if st.average.get(st.y) != &one() {
                return Err(format!(
                    "g_{y}({y}) = {} is not 1",
                    st.average.get(st.y),
                    y = st.y
                ));
            }
        }
        if let Some(g) = &self.outer_average {
            for &x in &self.k_set {
                if !g.get(x).is_zero() {
                    return Err(format!("g({x}) = {} is not 0 on K", g.get(x)));
                }
            }
            let bound = outer_threshold(self.l());
            for &z in &self.l_set {
                if g.get(z) < &bound || g.get(z) > &one() {
                    return Err(format!(
                        "g({z}) = {} is outside [3/(4l), 1] = [{bound}, 1]",
                        g.get(z)
                    ));
                }
            }
        }
        Ok(())
    }
}

/// One level of the main approximation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub i: usize,
    #[serde(rename = "K")]
    pub k_set: ElementSet,
    #[serde(rename = "L")]
    pub l_set: ElementSet,
    pub f_i: ConeExpr,
    #[serde(skip)]
    pub separation: Option<SetSeparation>,
}

/// Output of the approximation: the certificate for `F`, its values, and the
/// achieved and guaranteed errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub provider: RampProvider,
    pub target: GroundFunction,
    pub n: usize,
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    #[serde(with = "rational::serde_str")]
    pub error: Rational,
    #[serde(rename = "F")]
    pub f_expr: ConeExpr,
    #[serde(rename = "F_values")]
    pub f_values: GroundFunction,
    pub levels: Vec<Level>,
}

/// Construction context for one `(poset, family, provider)` triple.
///
/// Point separators depend only on the pair `(x, y)`, so they are built once
/// and shared by every set separation and level. The cache is thread-safe.
pub struct Constructor<'a> {
    poset: &'a Poset,
    family: &'a Family,
    provider: RampProvider,
    pairs: Vec<OnceLock<Option<Built>>>,
}

impl<'a> Constructor<'a> {
    pub fn new(poset: &'a Poset, family: &'a Family, provider: RampProvider) -> Result<Self> {
        if family.carrier() != poset.len() {
            return Err(FuncError::CarrierMismatch {
                expected: poset.len(),
                got: family.carrier(),
            }
            .into());
        }
        let n = poset.len();
        Ok(Constructor {
            poset,
            family,
            provider,
            pairs: (0..n * n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn poset(&self) -> &Poset {
        self.poset
    }

    pub fn family(&self) -> &Family {
        self.family
    }

    pub fn provider(&self) -> RampProvider {
        self.provider
    }

    fn check_element(&self, x: usize) -> Result<()> {
        if x >= self.poset.len() {
            return Err(ConstructError::ElementOutOfRange(x));
        }
        Ok(())
    }

    /// Errors unless the family generates the order.
    pub fn require_generation(&self) -> Result<()> {
        match funcspace::generates(self.poset, self.family)? {
            None => Ok(()),
            Some(w) => Err(ConstructError::DoesNotGenerate(w)),
        }
    }

    /// The constant `c`.
    pub fn constant(&self, c: &Rational) -> Result<Built> {
        Ok(Built {
            expr: cone::constant(self.family, c)?,
            values: GroundFunction::constant(self.poset.len(), c.clone()),
        })
    }

    /// `f_{x,y}`: 0 at `x`, 1 at `y`, values in `[0, 1]`. Requires `y ⋠ x`.
    ///
    /// Uses the lowest-index member with `f(x) < f(y)` and composes it with
    /// the ramp from `f(x)` to `f(y)`.
    pub fn separate_points(&self, x: usize, y: usize) -> Result<Built> {
        self.check_element(x)?;
        self.check_element(y)?;
        if self.poset.leq(y, x) {
            return Err(ConstructError::PreconditionViolated { x, y });
        }
        let slot = &self.pairs[x * self.poset.len() + y];
        if slot.get().is_none() {
            let built = self.build_point_separator(x, y)?;
            let _ = slot.set(built);
        }
        slot.get()
            .and_then(|b| b.clone())
            .ok_or(ConstructError::NoSeparator { x, y })
    }

    fn build_point_separator(&self, x: usize, y: usize) -> Result<Option<Built>> {
        let Some((idx, f)) = self
            .family
            .members()
            .iter()
            .enumerate()
            .find(|(_, f)| f.get(x) < f.get(y))
        else {
            return Ok(None);
        };
        let h = self.provider.ramp(f.get(x).clone(), f.get(y).clone())?;
        let values = f.map(|t| h.eval(t));
        Ok(Some(Built {
            expr: ConeExpr::comp(h, ConeExpr::gen(idx)),
            values,
        }))
    }

    /// `f_{K,L}`: 0 on `K`, 1 on `L`, values in `[0, 1]`. Requires that no
    /// element of `L` lies below an element of `K`.
    pub fn separate_sets(&self, k_set: &ElementSet, l_set: &ElementSet) -> Result<SetSeparation> {
        for &z in k_set.iter().chain(l_set) {
            self.check_element(z)?;
        }
        for &x in k_set {
            for &y in l_set {
                if self.poset.leq(y, x) {
                    return Err(ConstructError::PreconditionViolated { x, y });
                }
            }
        }

        let trivial = |result: Built| SetSeparation {
            k_set: k_set.clone(),
            l_set: l_set.clone(),
            result,
            stages: Vec::new(),
            outer_cover: Vec::new(),
            outer_average: None,
        };
        if k_set.is_empty() {
            return Ok(trivial(self.constant(&one())?));
        }
        if l_set.is_empty() {
            return Ok(trivial(self.constant(&zero())?));
        }

        let quarter = rat(1, 4);
        let three_quarters = rat(3, 4);
        let ks: Vec<usize> = k_set.iter().copied().collect();

        let mut stages = Vec::with_capacity(l_set.len());
        for &y in l_set {
            let separators = ks
                .iter()
                .map(|&x| self.separate_points(x, y))
                .collect::<Result<Vec<_>>>()?;
            // V_x ∩ K
            let regions: Vec<ElementSet> = separators
                .iter()
                .map(|b| {
                    ks.iter()
                        .copied()
                        .filter(|&z| b.values.get(z) < &quarter)
                        .collect()
                })
                .collect();
            let chosen = select_cover(k_set, &regions)?;
            let picked: Vec<&Built> = chosen.iter().map(|&j| &separators[j]).collect();
            let average = average_built(&picked)?;

            let k = chosen.len();
            let h = self.provider.ramp(inner_threshold(k), one())?;
            let lifted = Built {
                values: average.values.map(|t| h.eval(t)),
                expr: ConeExpr::comp(h, average.expr),
            };
            stages.push(PointStage {
                y,
                cover: chosen.iter().map(|&j| ks[j]).collect(),
                average: average.values,
                lifted,
            });
        }

        // W_y ∩ L
        let regions: Vec<ElementSet> = stages
            .iter()
            .map(|st| {
                l_set
                    .iter()
                    .copied()
                    .filter(|&z| st.lifted.values.get(z) >= &three_quarters)
                    .collect()
            })
            .collect();
        let chosen = select_cover(l_set, &regions)?;
        let picked: Vec<&Built> = chosen.iter().map(|&j| &stages[j].lifted).collect();
        let g = average_built(&picked)?;

        let l = chosen.len();
        let big_g = self.provider.ramp(zero(), outer_threshold(l))?;
        let result = Built {
            values: g.values.map(|t| big_g.eval(t)),
            expr: ConeExpr::comp(big_g, g.expr),
        };
        let sep = SetSeparation {
            k_set: k_set.clone(),
            l_set: l_set.clone(),
            result,
            outer_cover: chosen.iter().map(|&j| stages[j].y).collect(),
            stages,
            outer_average: Some(g.values),
        };
        debug_assert_eq!(sep.check_margins(), Ok(()));
        Ok(sep)
    }

    /// Approximates `f` with `min f = 0`, `max f = 1` (or `f` constant) to
    /// within `1/n` in sup norm.
    pub fn approximate_normalized(&self, f: &GroundFunction, n: usize) -> Result<ApproxReport> {
        self.check_target(f)?;
        if n == 0 {
            return Err(ConstructError::ZeroLevels);
        }
        self.require_generation()?;
        let bound = rat(1, n as i64);

        if f.is_constant() {
            let c = f.values().first().cloned().unwrap_or_else(zero);
            let built = self.constant(&c)?;
            return Ok(ApproxReport {
                provider: self.provider,
                target: f.clone(),
                n,
                bound,
                error: zero(),
                f_expr: built.expr,
                f_values: built.values,
                levels: Vec::new(),
            });
        }
        if f.min() != Some(&zero()) || f.max() != Some(&one()) {
            return Err(ConstructError::NotNormalized {
                min: rational::format(f.min().expect("non-empty")),
                max: rational::format(f.max().expect("non-empty")),
            });
        }

        let levels = (0..n)
            .into_par_iter()
            .map(|i| {
                let lo = rat(i as i64, n as i64);
                let hi = rat(i as i64 + 1, n as i64);
                let k_set: ElementSet = (0..f.len()).filter(|&m| f.get(m) <= &lo).collect();
                let l_set: ElementSet = (0..f.len()).filter(|&m| f.get(m) >= &hi).collect();
                let sep = self.separate_sets(&k_set, &l_set)?;
                Ok(sep)
            })
            .collect::<Result<Vec<_>>>()?;

        let parts: Vec<&Built> = levels.iter().map(|s| &s.result).collect();
        let total = average_built(&parts)?;
        let error = funcspace::sup_dist(f, &total.values)?;
        debug_assert!(error <= bound);

        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(i, sep)| Level {
                i,
                k_set: sep.k_set.clone(),
                l_set: sep.l_set.clone(),
                f_i: sep.result.expr.clone(),
                separation: Some(sep),
            })
            .collect();
        Ok(ApproxReport {
            provider: self.provider,
            target: f.clone(),
            n,
            bound,
            error,
            f_expr: total.expr,
            f_values: total.values,
            levels,
        })
    }

    /// Approximates any isotone `f` to within `eps`.
    ///
    /// `f` is rescaled to `f̃ = (f − m)/(M − m)`, approximated with
    /// `n = ⌈(M − m)/eps⌉` levels, and the result mapped back with
    /// `t ↦ (M − m)t + m`. The guaranteed bound is `(M − m)/n ≤ eps`.
    pub fn approximate(&self, f: &GroundFunction, eps: &Rational) -> Result<ApproxReport> {
        self.check_target(f)?;
        if eps <= &zero() {
            return Err(ConstructError::NonPositiveEpsilon(rational::format(eps)));
        }
        if f.is_constant() {
            let mut report = self.approximate_normalized(f, 1)?;
            report.bound = zero();
            return Ok(report);
        }
        let lo = f.min().expect("non-empty").clone();
        let hi = f.max().expect("non-empty").clone();
        let span = &hi - &lo;
        let n_rat = (&span / eps).ceil();
        let n = rational::ceil_to_u64(&n_rat)
            .and_then(|n| usize::try_from(n).ok())
            .filter(|&n| n <= u32::MAX as usize)
            .ok_or_else(|| ConstructError::TooManyLevels(rational::format(&n_rat)))?;

        let normalized = f.map(|v| (v - &lo) / &span);
        let inner = self.approximate_normalized(&normalized, n)?;
        let f_expr = cone::scale_shift(inner.f_expr, &span, &lo)?;
        let f_values = inner.f_values.map(|v| v * &span + &lo);
        let error = funcspace::sup_dist(f, &f_values)?;
        Ok(ApproxReport {
            provider: self.provider,
            target: f.clone(),
            n,
            bound: &span / rat(n as i64, 1),
            error,
            f_expr,
            f_values,
            levels: inner.levels,
        })
    }

    fn check_target(&self, f: &GroundFunction) -> Result<()> {
        if f.len() != self.poset.len() {
            return Err(FuncError::CarrierMismatch {
                expected: self.poset.len(),
                got: f.len(),
            }
            .into());
        }
        if let Some((a, b)) = funcspace::isotone_violation(self.poset, f) {
            return Err(ConstructError::NotIsotone { a, b });
        }
        if self.family.is_empty() {
            return Err(FuncError::EmptyFamily.into());
        }
        Ok(())
    }
}

fn average_built(parts: &[&Built]) -> Result<Built> {
    let k = parts.len();
    let expr = cone::average(parts.iter().map(|b| b.expr.clone()).collect())?;
    let mut sum = parts[0].values.clone();
    for b in &parts[1..] {
        sum = sum.add(&b.values);
    }
    let values = if k == 1 {
        sum
    } else {
        let scale = rat(1, k as i64);
        sum.map(|v| v * &scale)
    };
    Ok(Built { expr, values })
}

pub fn separate_points(
    p: &Poset,
    s: &Family,
    x: usize,
    y: usize,
    provider: RampProvider,
) -> Result<Built> {
    Constructor::new(p, s, provider)?.separate_points(x, y)
}

pub fn separate_sets(
    p: &Poset,
    s: &Family,
    k_set: &ElementSet,
    l_set: &ElementSet,
    provider: RampProvider,
) -> Result<SetSeparation> {
    Constructor::new(p, s, provider)?.separate_sets(k_set, l_set)
}

pub fn approximate_normalized(
    p: &Poset,
    s: &Family,
    f: &GroundFunction,
    n: usize,
    provider: RampProvider,
) -> Result<ApproxReport> {
    Constructor::new(p, s, provider)?.approximate_normalized(f, n)
}

pub fn approximate(
    p: &Poset,
    s: &Family,
    f: &GroundFunction,
    eps: &Rational,
    provider: RampProvider,
) -> Result<ApproxReport> {
    Constructor::new(p, s, provider)?.approximate(f, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{certify, eval_expr};
    use crate::funcspace::upset_generators;
    use crate::pl::PlFunction;
    use crate::rational::int;

    fn set(v: &[usize]) -> ElementSet {
        v.iter().copied().collect()
    }

    fn chain_with(values: &[i64]) -> (Poset, Family) {
        let p = Poset::chain(values.len());
        let s = Family::new(&p, vec![GroundFunction::from_ints(values)]).unwrap();
        (p, s)
    }

    #[test]
    fn lemma_one_on_two_chain() {
        let (p, s) = chain_with(&[2, 5]);
        let b = separate_points(&p, &s, 0, 1, RampProvider::Pl).unwrap();
        let expect = ConeExpr::comp(PlFunction::ramp(int(2), int(5)).unwrap(), ConeExpr::gen(0));
        assert_eq!(b.expr, expect);
        assert_eq!(b.values, GroundFunction::from_ints(&[0, 1]));
    }

    #[test]
    fn lemma_one_on_antichain_uses_second_upset() {
        let p = Poset::antichain(2);
        let s = upset_generators(&p);
        let b = separate_points(&p, &s, 0, 1, RampProvider::Pl).unwrap();
        let expect = ConeExpr::comp(PlFunction::ramp(zero(), one()).unwrap(), ConeExpr::gen(1));
        assert_eq!(b.expr, expect);
        assert_eq!(b.values, GroundFunction::from_ints(&[0, 1]));
    }

    #[test]
    fn lemma_one_errors() {
        let (p, s) = chain_with(&[3, 3]);
        assert_eq!(
            separate_points(&p, &s, 0, 1, RampProvider::Pl),
            Err(ConstructError::NoSeparator { x: 0, y: 1 })
        );
        assert_eq!(
            separate_points(&p, &s, 1, 0, RampProvider::Pl),
            Err(ConstructError::PreconditionViolated { x: 1, y: 0 })
        );
        assert_eq!(
            separate_points(&p, &s, 0, 7, RampProvider::Pl),
            Err(ConstructError::ElementOutOfRange(7))
        );
    }

    #[test]
    fn cover_examples() {
        assert_eq!(
            select_cover(&set(&[0, 1]), &[set(&[0]), set(&[1])]).unwrap(),
            vec![0, 1]
        );
        assert_eq!(
            select_cover(&set(&[0, 1]), &[set(&[0, 1]), set(&[1])]).unwrap(),
            vec![0]
        );
        assert!(select_cover(&set(&[]), &[set(&[0])]).unwrap().is_empty());
        assert_eq!(
            select_cover(&set(&[0, 1, 2]), &[set(&[0]), set(&[1])]),
            Err(ConstructError::UncoverableSet { missing: vec![2] })
        );
    }

    #[test]
    fn cover_ties_go_to_lowest_index() {
        let regions = [set(&[1, 2]), set(&[0, 1]), set(&[0, 2]), set(&[0])];
        // all three pairs gain 2; index 0 wins, then {0} is left and region 1 is first to cover it
        assert_eq!(
            select_cover(&set(&[0, 1, 2]), &regions).unwrap(),
            vec![0, 1]
        );
    }

    #[test]
    fn lemma_two_on_two_chain() {
        let (p, s) = chain_with(&[0, 1]);
        let sep = separate_sets(&p, &s, &set(&[0]), &set(&[1]), RampProvider::Pl).unwrap();
        assert_eq!(sep.result.values, GroundFunction::from_ints(&[0, 1]));
        assert_eq!(sep.stages.len(), 1);
        assert_eq!(sep.stages[0].k(), 1);
        assert_eq!(sep.l(), 1);
        assert_eq!(inner_threshold(1), rat(1, 4));
        assert_eq!(outer_threshold(1), rat(3, 4));
        assert_eq!(sep.check_margins(), Ok(()));
        assert_eq!(
            eval_expr(&p, &s, &sep.result.expr).unwrap(),
            sep.result.values
        );
    }

    #[test]
    fn lemma_two_degenerate_sets() {
        let (p, s) = chain_with(&[0, 1]);
        let one_fn = separate_sets(&p, &s, &set(&[]), &set(&[1]), RampProvider::Pl).unwrap();
        assert_eq!(one_fn.result.values, GroundFunction::from_ints(&[1, 1]));
        let zero_fn = separate_sets(&p, &s, &set(&[0]), &set(&[]), RampProvider::Pl).unwrap();
        assert_eq!(zero_fn.result.values, GroundFunction::from_ints(&[0, 0]));
    }

    #[test]
    fn lemma_two_precondition() {
        let (p, s) = chain_with(&[0, 1]);
        assert_eq!(
            separate_sets(&p, &s, &set(&[1]), &set(&[0]), RampProvider::Pl),
            Err(ConstructError::PreconditionViolated { x: 1, y: 0 })
        );
    }

    #[test]
    fn lemma_two_needs_multi_element_covers() {
        // Antichain of 4 with upset indicators: every point separator is an
        // indicator of a single point, so covers of K and L use every element.
        let p = Poset::antichain(4);
        let s = upset_generators(&p);
        let sep = separate_sets(&p, &s, &set(&[0, 1]), &set(&[2, 3]), RampProvider::Pl).unwrap();
        assert_eq!(sep.result.values, GroundFunction::from_ints(&[0, 0, 1, 1]));
        // f_{x,y} = 1_{y}, so V_x = M \ {y} covers all of K at once: k = 1.
        assert!(sep.stages.iter().all(|st| st.k() == 1));
        // f_{K,y} = 1_{y}, so each W_y ∩ L = {y}: l = 2.
        assert_eq!(sep.l(), 2);
        assert_eq!(sep.outer_average.as_ref().unwrap().get(2), &rat(1, 2));
        assert_eq!(sep.check_margins(), Ok(()));
    }

    #[test]
    fn lemma_two_with_k_above_one() {
        // Antichain 0,1 plus top 2 above both. Each member separates the top
        // from only one of the two bottom points.
        let p = Poset::from_covers(3, &[(0, 2), (1, 2)]).unwrap();
        let s = Family::new(
            &p,
            vec![
                GroundFunction::from_ints(&[0, 1, 1]),
                GroundFunction::from_ints(&[1, 0, 1]),
            ],
        )
        .unwrap();
        let sep = separate_sets(&p, &s, &set(&[0, 1]), &set(&[2]), RampProvider::Pl).unwrap();
        // f_{0,2} = (0, 1, 1) and f_{1,2} = (1, 0, 1), so V_0 ∩ K = {0} and
        // V_1 ∩ K = {1}: k = 2 and the threshold is 1 - 3/8 = 5/8.
        assert_eq!(sep.stages[0].k(), 2);
        assert_eq!(
            sep.stages[0].average,
            GroundFunction::new(vec![rat(1, 2), rat(1, 2), one()])
        );
        assert_eq!(sep.result.values, GroundFunction::from_ints(&[0, 0, 1]));
        assert_eq!(sep.check_margins(), Ok(()));
    }

    #[test]
    fn three_chain_worked_instance() {
        let p = Poset::chain(3);
        let s = upset_generators(&p);
        let f = GroundFunction::new(vec![zero(), rat(1, 2), one()]);
        let r = approximate_normalized(&p, &s, &f, 2, RampProvider::Pl).unwrap();
        assert_eq!(r.levels[0].k_set, set(&[0]));
        assert_eq!(r.levels[0].l_set, set(&[1, 2]));
        assert_eq!(r.levels[1].k_set, set(&[0, 1]));
        assert_eq!(r.levels[1].l_set, set(&[2]));
        let f0 = &r.levels[0].separation.as_ref().unwrap().result.values;
        let f1 = &r.levels[1].separation.as_ref().unwrap().result.values;
        assert_eq!(f0, &GroundFunction::from_ints(&[0, 1, 1]));
        assert_eq!(f1, &GroundFunction::from_ints(&[0, 0, 1]));
        assert_eq!(r.f_values, f);
        assert_eq!(r.error, zero());
        assert_eq!(r.bound, rat(1, 2));
        assert_eq!(certify(&p, &s, &r.f_expr, &r.f_values), Ok(()));
    }

    #[test]
    fn constant_target() {
        let p = Poset::from_covers(3, &[(0, 1)]).unwrap();
        let s = upset_generators(&p);
        let f = GroundFunction::from_ints(&[1, 1, 1]);
        for n in [1, 4] {
            let r = approximate_normalized(&p, &s, &f, n, RampProvider::Pl).unwrap();
            assert_eq!(r.f_values, f);
            assert_eq!(r.error, zero());
        }
    }

    #[test]
    fn two_chain_single_level() {
        let (p, s) = chain_with(&[0, 1]);
        let f = GroundFunction::from_ints(&[0, 1]);
        let r = approximate_normalized(&p, &s, &f, 1, RampProvider::Pl).unwrap();
        assert_eq!(r.levels[0].k_set, set(&[0]));
        assert_eq!(r.levels[0].l_set, set(&[1]));
        assert_eq!(r.f_values, f);
        assert_eq!(r.error, zero());
        assert!(r.error <= r.bound);
    }

    #[test]
    fn normalization_errors() {
        let (p, s) = chain_with(&[0, 1]);
        let f = GroundFunction::from_ints(&[0, 2]);
        assert!(matches!(
            approximate_normalized(&p, &s, &f, 2, RampProvider::Pl),
            Err(ConstructError::NotNormalized { .. })
        ));
        let f = GroundFunction::from_ints(&[1, 0]);
        assert_eq!(
            approximate_normalized(&p, &s, &f, 2, RampProvider::Pl),
            Err(ConstructError::NotIsotone { a: 0, b: 1 })
        );
        let f = GroundFunction::from_ints(&[0, 1]);
        assert_eq!(
            approximate_normalized(&p, &s, &f, 0, RampProvider::Pl),
            Err(ConstructError::ZeroLevels)
        );
    }

    #[test]
    fn non_generating_family_is_rejected() {
        let p = Poset::antichain(2);
        let s = Family::new(&p, vec![GroundFunction::from_ints(&[0, 1])]).unwrap();
        let f = GroundFunction::from_ints(&[1, 0]);
        assert_eq!(
            approximate_normalized(&p, &s, &f, 1, RampProvider::Pl),
            Err(ConstructError::DoesNotGenerate(GenerationWitness {
                a: 0,
                b: 1
            }))
        );
    }

    #[test]
    fn approximate_rescales() {
        let (p, s) = chain_with(&[0, 1]);
        let f = GroundFunction::from_ints(&[3, 7]);
        let r = approximate(&p, &s, &f, &int(2), RampProvider::Pl).unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(r.f_values, f);
        assert_eq!(r.error, zero());
        assert_eq!(certify(&p, &s, &r.f_expr, &r.f_values), Ok(()));

        let c = GroundFunction::from_ints(&[5, 5]);
        let r = approximate(&p, &s, &c, &rat(1, 100), RampProvider::Pl).unwrap();
        assert_eq!(r.f_values, c);
        assert_eq!(r.error, zero());

        let f = GroundFunction::from_ints(&[0, 1]);
        let r = approximate(&p, &s, &f, &rat(1, 3), RampProvider::Smoothstep).unwrap();
        assert_eq!(r.n, 3);
        assert!(r.error <= rat(1, 3));
        assert_eq!(certify(&p, &s, &r.f_expr, &r.f_values), Ok(()));

        assert!(matches!(
            approximate(&p, &s, &f, &zero(), RampProvider::Pl),
            Err(ConstructError::NonPositiveEpsilon(_))
        ));
    }

    #[test]
    fn interior_values_land_in_their_band() {
        // f(1) = 1/3 sits strictly inside band [0, 1/2] for n = 2.
        let p = Poset::chain(3);
        let s = upset_generators(&p);
        let f = GroundFunction::new(vec![zero(), rat(1, 3), one()]);
        let r = approximate_normalized(&p, &s, &f, 2, RampProvider::Pl).unwrap();
        let v = r.f_values.get(1);
        assert!(v >= &zero() && v <= &rat(1, 2));
        assert!(r.error <= rat(1, 2));
    }
}
