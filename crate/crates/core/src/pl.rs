//! Continuous non-decreasing functions `ℝ → ℝ` used as operating functions.
//!
//! [`PlFunction`] is a piecewise-linear map given by breakpoints and two
//! boundary slopes. [`Smoothstep`] is the cubic `3u² − 2u³` ramp, a non-PL
//! family with the same plateau behaviour. Both evaluate rationals to
//! rationals exactly.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, int, one, zero, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlError {
    #[error("ramp endpoints must satisfy a < b, got a = {a}, b = {b}")]
    DegenerateRamp { a: String, b: String },
    #[error("breakpoint x-coordinates must be strictly increasing (at index {0})")]
    UnsortedBreakpoints(usize),
    #[error("segment ending at breakpoint {0} has negative slope")]
    NegativeSlope(usize),
    #[error("boundary slope is negative")]
    NegativeBoundarySlope,
    #[error("an affine map needs equal left and right slopes and an intercept")]
    MalformedAffine,
    #[error("unknown ramp provider {0:?} (expected \"pl\" or \"smoothstep\")")]
    UnknownProvider(String),
}

/// A continuous non-decreasing piecewise-linear map.
///
/// Stored in canonical form: there is at least one breakpoint, no breakpoint
/// joins two segments of equal slope, and an affine map is represented by a
/// single breakpoint at `x = 0`. Two functions are therefore equal iff they
/// agree everywhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlFunction {
    points: Vec<(Rational, Rational)>,
    left_slope: Rational,
    right_slope: Rational,
}

impl PlFunction {
    /// Validates and canonicalizes.
    pub fn new(
        points: Vec<(Rational, Rational)>,
        left_slope: Rational,
        right_slope: Rational,
    ) -> Result<PlFunction, PlError> {
        if left_slope.is_negative() || right_slope.is_negative() {
            return Err(PlError::NegativeBoundarySlope);
        }
        for i in 1..points.len() {
            if points[i].0 <= points[i - 1].0 {
                return Err(PlError::UnsortedBreakpoints(i));
            }
            if points[i].1 < points[i - 1].1 {
                return Err(PlError::NegativeSlope(i));
            }
        }
        if points.is_empty() {
            return Err(PlError::MalformedAffine);
        }
        Ok(PlFunction::canonical(points, left_slope, right_slope))
    }

    /// `t ↦ slope·t + intercept`.
    pub fn affine(slope: Rational, intercept: Rational) -> Result<PlFunction, PlError> {
        if slope.is_negative() {
            return Err(PlError::NegativeBoundarySlope);
        }
        Ok(PlFunction {
            points: vec![(zero(), intercept)],
            left_slope: slope.clone(),
            right_slope: slope,
        })
    }

    pub fn identity() -> PlFunction {
        PlFunction::affine(one(), zero()).expect("slope 1")
    }

    pub fn constant(c: Rational) -> PlFunction {
        PlFunction::affine(zero(), c).expect("slope 0")
    }

    /// 0 on `(−∞, a]`, 1 on `[b, +∞)`, affine in between.
    pub fn ramp(a: Rational, b: Rational) -> Result<PlFunction, PlError> {
        if a >= b {
            return Err(PlError::DegenerateRamp {
                a: rational::format(&a),
                b: rational::format(&b),
            });
        }
        Ok(PlFunction {
            points: vec![(a, zero()), (b, one())],
            left_slope: zero(),
            right_slope: zero(),
        })
    }

    fn canonical(
        points: Vec<(Rational, Rational)>,
        left_slope: Rational,
        right_slope: Rational,
    ) -> PlFunction {
        let m = points.len();
        // slopes[i] is the slope entering breakpoint i; slopes[m] leaves the last.
        let mut slopes = Vec::with_capacity(m + 1);
        slopes.push(left_slope.clone());
        for w in points.windows(2) {
            slopes.push((&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0));
        }
        slopes.push(right_slope.clone());

        let kept: Vec<(Rational, Rational)> = points
            .iter()
            .enumerate()
            .filter(|(i, _)| slopes[*i] != slopes[*i + 1])
            .map(|(_, p)| p.clone())
            .collect();

        if kept.is_empty() {
            let (x0, y0) = &points[0];
            let intercept = y0 - &left_slope * x0;
            return PlFunction {
                points: vec![(zero(), intercept)],
                left_slope,
                right_slope,
            };
        }
        PlFunction {
            points: kept,
            left_slope,
            right_slope,
        }
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn left_slope(&self) -> &Rational {
        &self.left_slope
    }

    pub fn right_slope(&self) -> &Rational {
        &self.right_slope
    }

    /// True when the map is affine on all of `ℝ`.
    pub fn is_affine(&self) -> bool {
        self.points.len() == 1 && self.left_slope == self.right_slope
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let pts = &self.points;
        let first = &pts[0];
        if t <= &first.0 {
            return &first.1 + &self.left_slope * (t - &first.0);
        }
        let last = &pts[pts.len() - 1];
        if t >= &last.0 {
            return &last.1 + &self.right_slope * (t - &last.0);
        }
        // first.0 < t < last.0, so at least two points and 1 <= idx < len.
        let idx = pts.partition_point(|(x, _)| x <= t);
        let (x0, y0) = &pts[idx - 1];
        let (x1, y1) = &pts[idx];
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }

    /// Checks all segment and boundary slopes are non-negative.
    pub fn is_nondecreasing(&self) -> bool {
        is_nondecreasing_parts(&self.points, &self.left_slope, &self.right_slope)
    }

    /// Exact composition `self ∘ inner`.
    ///
    /// The result has a breakpoint at each breakpoint of `inner` and at each
    /// preimage under `inner` of a breakpoint of `self`; between consecutive
    /// candidates the composition is affine.
    pub fn compose(&self, inner: &PlFunction) -> PlFunction {
        let mut xs: Vec<Rational> = inner.points.iter().map(|(x, _)| x.clone()).collect();
        for (v, _) in &self.points {
            inner.preimages(v, &mut xs);
        }
        xs.sort();
        xs.dedup();

        let at = |t: &Rational| self.eval(&inner.eval(t));
        let points: Vec<(Rational, Rational)> = xs.iter().map(|x| (x.clone(), at(x))).collect();
        let lo = &xs[0];
        let hi = &xs[xs.len() - 1];
        // The composition is affine on (−∞, lo] and [hi, +∞).
        let left_slope = &points[0].1 - at(&(lo - one()));
        let right_slope = at(&(hi + one())) - &points[points.len() - 1].1;
        PlFunction::canonical(points, left_slope, right_slope)
    }

    /// Pushes every `t` at which some strictly increasing piece of `self`
    /// takes the value `v`.
    fn preimages(&self, v: &Rational, out: &mut Vec<Rational>) {
        let pts = &self.points;
        let (x0, y0) = &pts[0];
        if self.left_slope.is_positive() && v < y0 {
            out.push(x0 + (v - y0) / &self.left_slope);
        }
        for w in pts.windows(2) {
            let ((xa, ya), (xb, yb)) = (&w[0], &w[1]);
            if ya < yb && ya < v && v < yb {
                out.push(xa + (v - ya) * (xb - xa) / (yb - ya));
            }
        }
        let (xl, yl) = &pts[pts.len() - 1];
        if self.right_slope.is_positive() && v > yl {
            out.push(xl + (v - yl) / &self.right_slope);
        }
    }
}

/// Structural monotonicity check on a raw breakpoint list, without
/// canonicalization.
pub fn is_nondecreasing_parts(
    points: &[(Rational, Rational)],
    left_slope: &Rational,
    right_slope: &Rational,
) -> bool {
    !left_slope.is_negative()
        && !right_slope.is_negative()
        && points
            .windows(2)
            .all(|w| w[1].0 > w[0].0 && w[1].1 >= w[0].1)
}

/// The `C¹` ramp `0` on `(−∞, a]`, `1` on `[b, +∞)`, `3u² − 2u³` between,
/// with `u = (t − a)/(b − a)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Smoothstep {
    a: Rational,
    b: Rational,
}

impl Smoothstep {
    pub fn new(a: Rational, b: Rational) -> Result<Smoothstep, PlError> {
        if a >= b {
            return Err(PlError::DegenerateRamp {
                a: rational::format(&a),
                b: rational::format(&b),
            });
        }
        Ok(Smoothstep { a, b })
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        if t <= &self.a {
            return zero();
        }
        if t >= &self.b {
            return one();
        }
        let u = (t - &self.a) / (&self.b - &self.a);
        let u2 = &u * &u;
        &u2 * int(3) - &u2 * &u * int(2)
    }
}

/// An element of the operating family.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OperatingFn {
    Pl(PlFunction),
    Smoothstep(Smoothstep),
}

impl OperatingFn {
    pub fn eval(&self, t: &Rational) -> Rational {
        match self {
            OperatingFn::Pl(h) => h.eval(t),
            OperatingFn::Smoothstep(s) => s.eval(t),
        }
    }

    /// Both variants are non-decreasing by construction; this re-checks the
    /// stored data.
    pub fn is_nondecreasing(&self) -> bool {
        match self {
            OperatingFn::Pl(h) => h.is_nondecreasing(),
            OperatingFn::Smoothstep(s) => s.a < s.b,
        }
    }

    pub fn as_pl(&self) -> Option<&PlFunction> {
        match self {
            OperatingFn::Pl(h) => Some(h),
            OperatingFn::Smoothstep(_) => None,
        }
    }
}

impl From<PlFunction> for OperatingFn {
    fn from(h: PlFunction) -> Self {
        OperatingFn::Pl(h)
    }
}

impl From<Smoothstep> for OperatingFn {
    fn from(s: Smoothstep) -> Self {
        OperatingFn::Smoothstep(s)
    }
}

/// Which family supplies the ramps used by the constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RampProvider {
    #[default]
    Pl,
    Smoothstep,
}

impl RampProvider {
    /// A non-decreasing `H` with `H = 0` on `(−∞, a]` and `H = 1` on `[b, +∞)`.
    pub fn ramp(self, a: Rational, b: Rational) -> Result<OperatingFn, PlError> {
        match self {
            RampProvider::Pl => PlFunction::ramp(a, b).map(OperatingFn::Pl),
            RampProvider::Smoothstep => Smoothstep::new(a, b).map(OperatingFn::Smoothstep),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RampProvider::Pl => "pl",
            RampProvider::Smoothstep => "smoothstep",
        }
    }
}

impl fmt::Display for RampProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RampProvider {
    type Err = PlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pl" => Ok(RampProvider::Pl),
            "smoothstep" => Ok(RampProvider::Smoothstep),
            other => Err(PlError::UnknownProvider(other.to_string())),
        }
    }
}

// JSON encoding: {"kind":"pl","breakpoints":[["x","y"],...],"left_slope":..,"right_slope":..}
// or {"kind":"smoothstep","a":..,"b":..}. An empty breakpoint list denotes an
// affine map and then carries an "intercept".

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum OperatingFnDoc {
    Pl {
        #[serde(with = "rational::serde_str::pairs")]
        breakpoints: Vec<(Rational, Rational)>,
        #[serde(with = "rational::serde_str")]
        left_slope: Rational,
        #[serde(with = "rational::serde_str")]
        right_slope: Rational,
        #[serde(
            default,
            skip_serializing_if = "Option::is_none",
            with = "opt_rational"
        )]
        intercept: Option<Rational>,
    },
    Smoothstep {
        #[serde(with = "rational::serde_str")]
        a: Rational,
        #[serde(with = "rational::serde_str")]
        b: Rational,
    },
}

mod opt_rational {
    use super::*;
    use serde::{de, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&rational::format(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| rational::parse(&s).map_err(de::Error::custom))
            .transpose()
    }
}

impl Serialize for OperatingFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let doc = match self {
            OperatingFn::Pl(h) => OperatingFnDoc::Pl {
                breakpoints: h.points.clone(),
                left_slope: h.left_slope.clone(),
                right_slope: h.right_slope.clone(),
                intercept: None,
            },
            OperatingFn::Smoothstep(st) => OperatingFnDoc::Smoothstep {
                a: st.a.clone(),
                b: st.b.clone(),
            },
        };
        doc.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatingFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match OperatingFnDoc::deserialize(d)? {
            OperatingFnDoc::Pl {
                breakpoints,
                left_slope,
                right_slope,
                intercept,
            } => {
                let h = if breakpoints.is_empty() {
                    match intercept {
                        Some(c) if left_slope == right_slope => PlFunction::affine(left_slope, c),
                        _ => Err(PlError::MalformedAffine),
                    }
                } else {
                    PlFunction::new(breakpoints, left_slope, right_slope)
                };
                h.map(OperatingFn::Pl).map_err(D::Error::custom)
            }
            OperatingFnDoc::Smoothstep { a, b } => Smoothstep::new(a, b)
                .map(OperatingFn::Smoothstep)
                .map_err(D::Error::custom),
        }
    }
}
