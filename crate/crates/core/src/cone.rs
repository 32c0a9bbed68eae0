//! Membership certificates for the closure of a family under sums and
//! composition with operating functions.
//!
//! A [`ConeExpr`] records how a function was built from the generators, so a
//! verifier can replay the construction and compare the result against the
//! claimed values.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funcspace::{Family, GroundFunction};
use crate::pl::{OperatingFn, PlFunction};
use crate::poset::Poset;
use crate::rational::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("generator index {index} is out of range for a family of {len} members")]
    BadGeneratorIndex { index: usize, len: usize },
    #[error("cannot average an empty list of expressions")]
    EmptyList,
    #[error("scale factor {0} is negative")]
    NegativeScale(String),
    #[error("constants need at least one generator to compose with")]
    EmptyFamily,
    #[error("operating function at node {node} is not non-decreasing")]
    NotNondecreasing { node: usize },
    #[error("expression is over {expr} elements but the poset has {poset}")]
    CarrierMismatch { expr: usize, poset: usize },
}

/// Expression tree over generators, closed under sum and composition with a
/// non-decreasing operating function.
///
/// JSON: `{"gen":i}`, `{"sum":[e1,e2]}`, `{"comp":{"op":..,"arg":e}}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeExpr {
    Gen(usize),
    Sum(Box<ConeExpr>, Box<ConeExpr>),
    Comp { op: OperatingFn, arg: Box<ConeExpr> },
}

impl ConeExpr {
    pub fn gen(i: usize) -> ConeExpr {
        ConeExpr::Gen(i)
    }

    pub fn sum(a: ConeExpr, b: ConeExpr) -> ConeExpr {
        ConeExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn comp(op: impl Into<OperatingFn>, arg: ConeExpr) -> ConeExpr {
        ConeExpr::Comp {
            op: op.into(),
            arg: Box::new(arg),
        }
    }

    /// Sum of a non-empty list, nested as a balanced binary tree so that the
    /// depth grows logarithmically.
    pub fn sum_all(mut exprs: Vec<ConeExpr>) -> Result<ConeExpr, ConeError> {
        if exprs.is_empty() {
            return Err(ConeError::EmptyList);
        }
        while exprs.len() > 1 {
            let mut next = Vec::with_capacity(exprs.len().div_ceil(2));
            let mut it = exprs.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(ConeExpr::sum(a, b)),
                    None => next.push(a),
                }
            }
            exprs = next;
        }
        Ok(exprs.pop().expect("non-empty"))
    }

    /// Evaluates against `s`, pointwise.
    pub fn eval(&self, s: &Family) -> Result<GroundFunction, ConeError> {
        match self {
            ConeExpr::Gen(i) => s.member(*i).cloned().ok_or(ConeError::BadGeneratorIndex {
                index: *i,
                len: s.len(),
            }),
            ConeExpr::Sum(a, b) => Ok(a.eval(s)?.add(&b.eval(s)?)),
            ConeExpr::Comp { op, arg } => Ok(arg.eval(s)?.map(|t| op.eval(t))),
        }
    }

    /// Structural check used when loading a certificate: every generator
    /// index is in range and every operating function is non-decreasing.
    /// Nodes are numbered in pre-order.
    pub fn validate(&self, s: &Family) -> Result<(), ConeError> {
        let mut counter = 0;
        self.validate_at(s, &mut counter)
    }

    fn validate_at(&self, s: &Family, counter: &mut usize) -> Result<(), ConeError> {
        let node = *counter;
        *counter += 1;
        match self {
            ConeExpr::Gen(i) => {
                if *i >= s.len() {
                    return Err(ConeError::BadGeneratorIndex {
                        index: *i,
                        len: s.len(),
                    });
                }
                Ok(())
            }
            ConeExpr::Sum(a, b) => {
                a.validate_at(s, counter)?;
                b.validate_at(s, counter)
            }
            ConeExpr::Comp { op, arg } => {
                if !op.is_nondecreasing() {
                    return Err(ConeError::NotNondecreasing { node });
                }
                arg.validate_at(s, counter)
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            ConeExpr::Gen(_) => 1,
            ConeExpr::Sum(a, b) => 1 + a.node_count() + b.node_count(),
            ConeExpr::Comp { arg, .. } => 1 + arg.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ConeExpr::Gen(_) => 1,
            ConeExpr::Sum(a, b) => 1 + a.depth().max(b.depth()),
            ConeExpr::Comp { arg, .. } => 1 + arg.depth(),
        }
    }

    /// Collapses directly nested piecewise-linear compositions into a single
    /// node with [`PlFunction::compose`]. Evaluation is unchanged.
    pub fn flatten_pl(&self) -> ConeExpr {
        match self {
            ConeExpr::Gen(i) => ConeExpr::Gen(*i),
            ConeExpr::Sum(a, b) => ConeExpr::sum(a.flatten_pl(), b.flatten_pl()),
            ConeExpr::Comp { op, arg } => {
                let inner = arg.flatten_pl();
                match (op, inner) {
                    (
                        OperatingFn::Pl(outer),
                        ConeExpr::Comp {
                            op: OperatingFn::Pl(h),
                            arg,
                        },
                    ) => ConeExpr::Comp {
                        op: OperatingFn::Pl(outer.compose(&h)),
                        arg,
                    },
                    (op, inner) => ConeExpr::comp(op.clone(), inner),
                }
            }
        }
    }
}

/// Evaluation on a poset, checking the family is carried by it.
pub fn eval_expr(p: &Poset, s: &Family, e: &ConeExpr) -> Result<GroundFunction, ConeError> {
    if s.carrier() != p.len() {
        return Err(ConeError::CarrierMismatch {
            expr: s.carrier(),
            poset: p.len(),
        });
    }
    e.eval(s)
}

/// `λ·e + c`, realized as composition with the affine map `t ↦ λt + c`.
pub fn scale_shift(e: ConeExpr, scale: &Rational, shift: &Rational) -> Result<ConeExpr, ConeError> {
    if scale.is_negative() {
        return Err(ConeError::NegativeScale(rational::format(scale)));
    }
    let h = PlFunction::affine(scale.clone(), shift.clone()).expect("scale is non-negative");
    Ok(ConeExpr::comp(h, e))
}

/// Arithmetic mean: a balanced sum scaled by `1/k`. A single expression is
/// returned as is.
pub fn average(exprs: Vec<ConeExpr>) -> Result<ConeExpr, ConeError> {
    let k = exprs.len();
    let total = ConeExpr::sum_all(exprs)?;
    if k == 1 {
        return Ok(total);
    }
    scale_shift(total, &rational::rat(1, k as i64), &Rational::zero())
}

/// The constant `c`, as `0·s₀ + c`.
pub fn constant(s: &Family, c: &Rational) -> Result<ConeExpr, ConeError> {
    if s.is_empty() {
        return Err(ConeError::EmptyFamily);
    }
    scale_shift(ConeExpr::Gen(0), &Rational::zero(), c)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Eval(#[from] ConeError),
    #[error("certificate evaluates to {got} values but {claimed} were claimed")]
    Length { got: usize, claimed: usize },
    #[error("element {element}: certificate gives {got}, claimed {claimed}")]
    Mismatch {
        element: usize,
        got: String,
        claimed: String,
    },
}

/// Replays `e` and compares with `claimed` exactly. The error names the
/// first differing element.
pub fn certify(
    p: &Poset,
    s: &Family,
    e: &ConeExpr,
    claimed: &GroundFunction,
) -> Result<(), CertifyError> {
    let got = eval_expr(p, s, e)?;
    if got.len() != claimed.len() {
        return Err(CertifyError::Length {
            got: got.len(),
            claimed: claimed.len(),
        });
    }
    match got
        .values()
        .iter()
        .zip(claimed.values())
        .position(|(a, b)| a != b)
    {
        None => Ok(()),
        Some(element) => Err(CertifyError::Mismatch {
            element,
            got: rational::format(got.get(element)),
            claimed: rational::format(claimed.get(element)),
        }),
    }
}

pub fn is_certified(p: &Poset, s: &Family, e: &ConeExpr, claimed: &GroundFunction) -> bool {
    certify(p, s, e, claimed).is_ok()
}

impl fmt::Display for ConeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeExpr::Gen(i) => write!(f, "s{i}"),
            ConeExpr::Sum(a, b) => write!(f, "({a} + {b})"),
            ConeExpr::Comp { op, arg } => match op {
                OperatingFn::Pl(h) if h.is_affine() => {
                    let (_, c) = &h.points()[0];
                    write!(f, "[{}·{arg} + {c}]", h.left_slope())
                }
                OperatingFn::Pl(h) => {
                    let (a, _) = &h.points()[0];
                    let (b, _) = &h.points()[h.points().len() - 1];
                    write!(f, "pl[{a}..{b}]({arg})")
                }
                OperatingFn::Smoothstep(st) => write!(f, "smooth[{}..{}]({arg})", st.a(), st.b()),
            },
        }
    }
}
