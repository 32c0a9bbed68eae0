//! Randomized verification of the construction.
//!
//! Each trial draws a poset, a generating family and an isotone target from a
//! seeded stream, runs the point separator, set separator and level
//! approximation, and checks every contract they promise with exact
//! arithmetic. Trials are independent; the outcome depends only on the
//! configuration.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{self, ConeExpr};
use crate::construct::{ApproxReport, Constructor, SetSeparation};
use crate::funcspace::{self, Family, GroundFunction, Relation};
use crate::pl::RampProvider;
use crate::poset::{ElementSet, Poset};
use crate::rational::{self, one, rat, zero, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_poset_size: usize,
    pub n_values: Vec<usize>,
    #[serde(with = "rational::serde_str::vec")]
    pub density_range: Vec<Rational>,
    pub provider: RampProvider,
    /// Mix random isotone members into the upset generators.
    pub augment: bool,
    /// Random `(K, L)` instances checked per trial.
    pub set_pairs_per_trial: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            trials: 200,
            max_poset_size: 30,
            n_values: (1..=10).collect(),
            density_range: vec![rat(1, 20), rat(1, 2)],
            provider: RampProvider::Pl,
            augment: true,
            set_pairs_per_trial: 1,
        }
    }
}

impl SuiteConfig {
    pub fn check(&self) -> Result<(), String> {
        if self.trials == 0 {
            return Err("trials must be at least 1".into());
        }
        if self.max_poset_size == 0 {
            return Err("max poset size must be at least 1".into());
        }
        if self.n_values.contains(&0) {
            return Err("every n must be positive".into());
        }
        match self.density_range.as_slice() {
            [lo, hi] if &zero() <= lo && lo <= hi && hi <= &one() => Ok(()),
            _ => Err("density range must be [lo, hi] with 0 <= lo <= hi <= 1".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    pub property: String,
    pub counterexample: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tally {
    pub point_separations: usize,
    /// Set separations with both `K` and `L` non-empty.
    pub set_separations: usize,
    pub approximations: usize,
    pub boundary_elements: usize,
    pub preorder_comparisons: usize,
}

impl Tally {
    fn merge(&mut self, other: &Tally) {
        self.point_separations += other.point_separations;
        self.set_separations += other.set_separations;
        self.approximations += other.approximations;
        self.boundary_elements += other.boundary_elements;
        self.preorder_comparisons += other.preorder_comparisons;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub config: SuiteConfig,
    pub trials_run: usize,
    pub passed: bool,
    pub failures: Vec<Failure>,
    /// Largest `error · n` over all approximations.
    #[serde(with = "rational::serde_str")]
    pub max_observed_error_ratio: Rational,
    pub tally: Tally,
}

/// Makes `raw` isotone by raising each value to the maximum over its
/// down-set: `f(b) = max { raw(a) : a ⪯ b }`.
pub fn monotone_repair(p: &Poset, raw: &[Rational]) -> GroundFunction {
    GroundFunction::new(
        (0..p.len())
            .map(|b| {
                p.downset(b)
                    .into_iter()
                    .map(|a| &raw[a])
                    .max()
                    .expect("b is in its own downset")
                    .clone()
            })
            .collect(),
    )
}

/// Random isotone function with values in `{0, 1/levels, …, 1}`.
pub fn random_isotone(p: &Poset, levels: usize, seed: u64) -> GroundFunction {
    let levels = levels.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<Rational> = (0..p.len())
        .map(|_| rat(rng.gen_range(0..=levels as i64), levels as i64))
        .collect();
    monotone_repair(p, &raw)
}

/// `(f − min)/(max − min)`, or `f` itself when constant.
pub fn normalize(f: &GroundFunction) -> GroundFunction {
    if f.is_constant() {
        return f.clone();
    }
    let lo = f.min().expect("non-empty").clone();
    let span = f.max().expect("non-empty") - &lo;
    f.map(|v| (v - &lo) / &span)
}

/// `x ⪯_S y` straight from the definition, one pair at a time.
pub fn naive_preorder(p: &Poset, s: &Family) -> Relation {
    Relation::from_fn(p.len(), |x, y| {
        let mut ok = true;
        for f in s.members() {
            if !(f.values()[x] <= f.values()[y]) {
                ok = false;
            }
        }
        ok
    })
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteOutcome {
    let results: Vec<TrialResult> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect();

    let mut failures = Vec::new();
    let mut tally = Tally::default();
    let mut max_ratio = zero();
    for r in results {
        failures.extend(r.failures);
        tally.merge(&r.tally);
        if r.max_ratio > max_ratio {
            max_ratio = r.max_ratio;
        }
    }
    failures.sort_by_key(|f| f.trial);
    SuiteOutcome {
        config: cfg.clone(),
        trials_run: cfg.trials,
        passed: failures.is_empty(),
        failures,
        max_observed_error_ratio: max_ratio,
        tally,
    }
}

struct TrialResult {
    failures: Vec<Failure>,
    tally: Tally,
    max_ratio: Rational,
}

struct Trial<'a> {
    id: usize,
    poset: &'a Poset,
    family: &'a Family,
    failures: Vec<Failure>,
    tally: Tally,
    max_ratio: Rational,
}

impl Trial<'_> {
    fn fail(&mut self, property: &str, detail: String) {
        let context = serde_json::json!({
            "poset": self.poset.to_doc(),
            "members": self.family.members(),
            "detail": detail,
        });
        self.failures.push(Failure {
            trial: self.id,
            property: property.to_string(),
            counterexample: context.to_string(),
        });
    }

    fn expect(&mut self, ok: bool, property: &str, detail: impl FnOnce() -> String) {
        if !ok {
            self.fail(property, detail());
        }
    }
}

/// Draws the trial instance. Exposed so tests can reproduce a failing trial.
pub fn trial_instance(cfg: &SuiteConfig, trial: usize) -> (Poset, Family, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);

    let size = rng.gen_range(1..=cfg.max_poset_size);
    let (lo, hi) = (&cfg.density_range[0], &cfg.density_range[1]);
    let density = lo + (hi - lo) * rat(rng.gen_range(0..=100), 100);
    let poset = Poset::random(size, &density, rng.gen()).expect("density validated");

    let upsets = funcspace::upset_generators(&poset).members().to_vec();
    let mut members = upsets;
    if cfg.augment && rng.gen_bool(0.5) {
        let extra: Vec<GroundFunction> = (0..rng.gen_range(1..=3))
            .map(|_| random_isotone(&poset, rng.gen_range(1..=6), rng.gen()))
            .collect();
        if rng.gen_bool(0.5) {
            members.extend(extra);
        } else {
            members = extra.into_iter().chain(members).collect();
        }
    }
    let family = Family::new(&poset, members).expect("members are isotone");
    (poset, family, rng)
}

fn run_trial(cfg: &SuiteConfig, id: usize) -> TrialResult {
    let (poset, family, mut rng) = trial_instance(cfg, id);
    let mut trial = Trial {
        id,
        poset: &poset,
        family: &family,
        failures: Vec::new(),
        tally: Tally::default(),
        max_ratio: zero(),
    };

    check_generation(&mut trial, &mut rng);

    let ctor = Constructor::new(&poset, &family, cfg.provider).expect("carrier matches");
    check_point_separation(&mut trial, &ctor);
    for _ in 0..cfg.set_pairs_per_trial {
        let (k_set, l_set) = random_separable_pair(&poset, &mut rng);
        check_set_separation(&mut trial, &ctor, &k_set, &l_set);
    }

    let levels = rng.gen_range(1..=12);
    let target = normalize(&random_isotone(&poset, levels, rng.gen()));
    for (idx, &n) in cfg.n_values.iter().enumerate() {
        match ctor.approximate_normalized(&target, n) {
            Ok(report) => {
                check_report(&mut trial, &target, &report);
                if idx == 0 {
                    let fresh = Constructor::new(&poset, &family, cfg.provider)
                        .and_then(|c| c.approximate_normalized(&target, n));
                    trial.expect(fresh.as_ref() == Ok(&report), "determinism", || {
                        format!("n = {n}: rebuilding gave a different report")
                    });
                }
            }
            Err(e) => trial.fail("approximation", format!("n = {n}: {e}")),
        }
    }

    TrialResult {
        failures: trial.failures,
        tally: trial.tally,
        max_ratio: trial.max_ratio,
    }
}

fn check_generation(trial: &mut Trial<'_>, rng: &mut ChaCha8Rng) {
    let p = trial.poset;
    let upsets = funcspace::upset_generators(p);
    let gen_upsets = funcspace::generates(p, &upsets);
    trial.expect(gen_upsets == Ok(None), "upsets_generate", || {
        format!("{gen_upsets:?}")
    });

    // The full family, and a random sub-family that may fail to generate.
    let mut members = trial.family.members().to_vec();
    members.shuffle(rng);
    members.truncate(rng.gen_range(1..=members.len()));
    let sub = Family::new(p, members).expect("subset of isotone members");

    for (name, s) in [("family", trial.family), ("subfamily", &sub)] {
        let fast = funcspace::generated_preorder(p, s).expect("non-empty");
        let naive = naive_preorder(p, s);
        trial.tally.preorder_comparisons += 1;
        trial.expect(fast == naive, "preorder_matches_naive", || name.to_string());
        trial.expect(
            fast.is_reflexive() && fast.is_transitive(),
            "preorder_is_preorder",
            || name.to_string(),
        );
        trial.expect(
            Relation::of_poset(p).is_subset_of(&fast),
            "order_within_preorder",
            || name.to_string(),
        );
        let separates = funcspace::separates_points(p, s).expect("non-empty");
        trial.expect(
            fast.is_antisymmetric() == separates,
            "antisymmetric_iff_separates",
            || name.to_string(),
        );
        let generates = funcspace::generates(p, s).expect("non-empty").is_none();
        trial.expect(
            !generates || separates,
            "generates_implies_separates",
            || name.to_string(),
        );
    }
}

fn check_point_separation(trial: &mut Trial<'_>, ctor: &Constructor<'_>) {
    let p = trial.poset;
    for (y, x) in p.not_leq_pairs() {
        trial.tally.point_separations += 1;
        let built = match ctor.separate_points(x, y) {
            Ok(b) => b,
            Err(e) => {
                trial.fail("lemma1_contract", format!("x = {x}, y = {y}: {e}"));
                continue;
            }
        };
        let v = &built.values;
        let ok = v.get(x) == &zero()
            && v.get(y) == &one()
            && v.values().iter().all(|t| &zero() <= t && t <= &one());
        trial.expect(ok, "lemma1_contract", || {
            format!("x = {x}, y = {y}: values {v}")
        });
        check_certificate(trial, &built.expr, v, "lemma1_certificate");
    }
}

/// Random `K`, then random `L` among the elements not below any element of `K`.
pub fn random_separable_pair(p: &Poset, rng: &mut impl Rng) -> (ElementSet, ElementSet) {
    let n = p.len();
    let k_set: ElementSet = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    let allowed: Vec<usize> = (0..n)
        .filter(|&y| k_set.iter().all(|&x| !p.leq(y, x)))
        .collect();
    let l_set: ElementSet = allowed.into_iter().filter(|_| rng.gen_bool(0.6)).collect();
    (k_set, l_set)
}

fn check_set_separation(
    trial: &mut Trial<'_>,
    ctor: &Constructor<'_>,
    k_set: &ElementSet,
    l_set: &ElementSet,
) {
    let sep: SetSeparation = match ctor.separate_sets(k_set, l_set) {
        Ok(s) => s,
        Err(e) => {
            trial.fail(
                "lemma2_contract",
                format!("K = {k_set:?}, L = {l_set:?}: {e}"),
            );
            return;
        }
    };
    if !k_set.is_empty() && !l_set.is_empty() {
        trial.tally.set_separations += 1;
    }
    let v = &sep.result.values;
    let ok = k_set.iter().all(|&x| v.get(x) == &zero())
        && l_set.iter().all(|&y| v.get(y) == &one())
        && v.values().iter().all(|t| &zero() <= t && t <= &one());
    trial.expect(ok, "lemma2_contract", || {
        format!("K = {k_set:?}, L = {l_set:?}: values {v}")
    });
    let margins = sep.check_margins();
    trial.expect(margins.is_ok(), "lemma2_margins", || {
        format!("K = {k_set:?}, L = {l_set:?}: {}", margins.unwrap_err())
    });
    check_certificate(trial, &sep.result.expr, v, "lemma2_certificate");
}

fn check_certificate(
    trial: &mut Trial<'_>,
    expr: &ConeExpr,
    claimed: &GroundFunction,
    property: &str,
) {
    let (p, s) = (trial.poset, trial.family);
    let replay = cone::certify(p, s, expr, claimed);
    trial.expect(replay.is_ok(), property, || format!("replay: {replay:?}"));
    trial.expect(funcspace::is_isotone(p, claimed), property, || {
        format!("not isotone: {claimed}")
    });
    let structure = expr.validate(s);
    trial.expect(structure.is_ok(), property, || {
        format!("structure: {structure:?}")
    });
}

fn check_report(trial: &mut Trial<'_>, f: &GroundFunction, r: &ApproxReport) {
    trial.tally.approximations += 1;
    let n = r.n;
    let inv_n = rat(1, n as i64);
    let big_f = &r.f_values;

    // Recomputed here rather than trusting r.error.
    let err = f
        .values()
        .iter()
        .zip(big_f.values())
        .map(|(a, b)| rational::abs_diff(a, b))
        .max()
        .unwrap_or_else(zero);
    trial.expect(err == r.error && err <= inv_n, "theorem_bound", || {
        format!("n = {n}: error {err}, reported {}", r.error)
    });
    let ratio = &err * rat(n as i64, 1);
    if ratio > trial.max_ratio {
        trial.max_ratio = ratio;
    }

    let n_big = rat(n as i64, 1);
    for m in 0..f.len() {
        let scaled = f.get(m) * &n_big;
        if scaled.is_integer() {
            trial.tally.boundary_elements += 1;
            trial.expect(big_f.get(m) == f.get(m), "boundary_exact", || {
                format!("n = {n}, m = {m}: f = {}, F = {}", f.get(m), big_f.get(m))
            });
        } else if !r.levels.is_empty() {
            let j = scaled.floor().to_integer();
            let j: usize = j.try_into().expect("0 <= f <= 1");
            let lo = rat(j as i64, n as i64);
            let hi = rat(j as i64 + 1, n as i64);
            let membership = r.levels.iter().all(|lvl| {
                (lvl.i <= j || lvl.k_set.contains(&m)) && (lvl.i >= j || lvl.l_set.contains(&m))
            });
            let in_band = &lo <= big_f.get(m) && big_f.get(m) <= &hi;
            trial.expect(membership && in_band, "level_cases", || {
                format!("n = {n}, m = {m}, j = {j}: F = {}", big_f.get(m))
            });
        }
    }

    for lvl in &r.levels {
        if let Some(sep) = &lvl.separation {
            let margins = sep.check_margins();
            trial.expect(margins.is_ok(), "lemma2_margins", || {
                format!("n = {n}, level {}: {}", lvl.i, margins.unwrap_err())
            });
        }
    }

    check_certificate(trial, &r.f_expr, big_f, "certificate");
    let json = serde_json::to_string(&r.f_expr).expect("serializable");
    let reloaded: Option<ConeExpr> = serde_json::from_str(&json).ok();
    trial.expect(
        reloaded.as_ref() == Some(&r.f_expr),
        "certificate_round_trip",
        || format!("n = {n}"),
    );
}
