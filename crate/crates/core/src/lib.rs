//! Certified approximation of isotone functions on finite posets.
//!
//! Given a finite poset `M` and a family `S` of isotone functions that
//! generates its order, any isotone `f: M → ℝ` is approximated to within
//! `1/n` in sup norm by a function built from `S` using only sums and
//! composition with non-decreasing ramps. Every constructed function comes
//! with a [`ConeExpr`] certificate that replays to its values exactly.
//!
//! ```
//! use ordapprox::prelude::*;
//!
//! let p = Poset::chain(3);
//! let s = upset_generators(&p);
//! let f = GroundFunction::new(vec![rat(0, 1), rat(1, 3), rat(1, 1)]);
//! let report = approximate_normalized(&p, &s, &f, 4, RampProvider::Pl).unwrap();
//! assert!(report.error <= rat(1, 4));
//! assert!(is_certified(&p, &s, &report.f_expr, &report.f_values));
//! ```

pub mod cone;
pub mod construct;
pub mod funcspace;
pub mod io;
pub mod pl;
pub mod poset;
pub mod rational;
pub mod verify;

pub use cone::{certify, eval_expr, is_certified, ConeError, ConeExpr};
pub use construct::{
    approximate, approximate_normalized, select_cover, separate_points, separate_sets,
    ApproxReport, ConstructError, Constructor, Level, SetSeparation,
};
pub use funcspace::{
    generated_preorder, generates, is_isotone, separates_points, sup_dist, upset_generators,
    Family, FuncError, GenerationWitness, GroundFunction, Relation,
};
pub use pl::{OperatingFn, PlError, PlFunction, RampProvider, Smoothstep};
pub use poset::{ElementSet, Poset, PosetError};
pub use rational::Rational;
pub use verify::{run_suite, SuiteConfig, SuiteOutcome};

pub mod prelude {
    pub use crate::cone::{average, scale_shift, ConeExpr};
    pub use crate::construct::{approximate, approximate_normalized, ApproxReport, Constructor};
    pub use crate::funcspace::{upset_generators, Family, GroundFunction};
    pub use crate::pl::{OperatingFn, PlFunction, RampProvider};
    pub use crate::poset::{ElementSet, Poset};
    pub use crate::rational::{rat, Rational};
    pub use crate::{certify, is_certified};
}
