//! The `p`-parametrized family of Gromov–Hausdorff type distances.
//!
//! For finite integer `p` values are carried exactly as `r^(1/p)` with a
//! rational radicand `r`; `p = ∞` values are plain rationals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::dgh::{dgh_exact, DghOptions, Method};
use crate::error::{Error, Result};
use crate::scalar::{cmp_roots, Scalar};
use crate::space::{FiniteSpace, UltrametricSpace};
use crate::ugh::ugh;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PExponent {
    Finite(Scalar),
    Infinity,
}

impl PExponent {
    pub fn finite(p: u32) -> Self {
        PExponent::Finite(Scalar::from_integer(p as i64))
    }

    /// The exponent as a positive integer; `None` for infinity.
    pub fn integer(&self) -> Result<Option<u32>> {
        match self {
            PExponent::Infinity => Ok(None),
            PExponent::Finite(p) => match p.to_u32() {
                Some(k) if k >= 1 => Ok(Some(k)),
                _ => Err(Error::NonIntegerExponent(p.to_string())),
            },
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(PExponent::Infinity);
        }
        let p: Scalar = t.parse().map_err(|_| Error::NonIntegerExponent(t.to_string()))?;
        if p < Scalar::one() {
            return Err(Error::NonIntegerExponent(t.to_string()));
        }
        Ok(PExponent::Finite(p))
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{p}"),
            PExponent::Infinity => write!(f, "inf"),
        }
    }
}

/// The non-negative real `radicand^(1/degree)`.
#[derive(Clone, Debug)]
pub struct RootValue {
    pub radicand: Scalar,
    pub degree: u32,
}

impl RootValue {
    pub fn exact(v: Scalar) -> Self {
        RootValue { radicand: v, degree: 1 }
    }

    pub fn new(radicand: Scalar, degree: u32) -> Self {
        RootValue { radicand, degree }
    }

    /// The value as a rational when it is one.
    pub fn as_rational(&self) -> Option<Scalar> {
        if self.degree == 1 {
            return Some(self.radicand.clone());
        }
        let r = self.radicand.as_rational();
        let (n, d) = (r.numer().nth_root(self.degree), r.denom().nth_root(self.degree));
        let candidate = Scalar::from_rational(num_rational::BigRational::new(n, d));
        (candidate.pow(self.degree) == self.radicand).then_some(candidate)
    }

    /// Decimal rendering with `digits` fractional digits, rounded half up.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.degree == 1 {
            return self.radicand.to_decimal(digits);
        }
        // Largest m with (m / 10^digits)^p <= r, then round.
        let p = self.degree;
        let scale = num_traits::pow(BigInt::from(10), digits);
        let r = self.radicand.as_rational();
        let target_num = r.numer() * num_traits::pow(scale.clone(), p as usize);
        let target_den = r.denom().clone();
        let floor_root = (&target_num / &target_den).nth_root(p);
        let mut m = floor_root;
        while num_traits::pow(&m + BigInt::one(), p as usize) * &target_den <= target_num {
            m += 1;
        }
        // Round: compare (2m + 1)^p with 2^p * target.
        let two_m1 = &m * 2 + BigInt::one();
        if num_traits::pow(two_m1, p as usize) * &target_den <= num_traits::pow(BigInt::from(2), p as usize) * &target_num
        {
            m += 1;
        }
        if digits == 0 {
            return m.to_string();
        }
        let (int_part, frac) = (&m / &scale, &m % &scale);
        format!("{int_part}.{:0>width$}", frac.to_string(), width = digits)
    }

    pub fn to_f64(&self) -> f64 {
        self.radicand.to_f64().powf(1.0 / self.degree as f64)
    }

    pub fn is_zero(&self) -> bool {
        self.radicand.is_zero()
    }
}

impl PartialEq for RootValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for RootValue {}

impl PartialOrd for RootValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RootValue {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_roots(&self.radicand, self.degree, &other.radicand, other.degree)
    }
}

impl fmt::Display for RootValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "({})^(1/{})", self.radicand, self.degree),
        }
    }
}

/// `|a^p - b^p|^(1/p)`; for `p = ∞`, `max(a, b)` when `a != b` and 0 otherwise.
pub fn lambda_p(a: &Scalar, b: &Scalar, p: &PExponent) -> Result<RootValue> {
    Ok(match p.integer()? {
        None => RootValue::exact(if a == b { Scalar::zero() } else { Scalar::max_of(a, b).clone() }),
        Some(k) => RootValue::new(a.pow(k).abs_diff(&b.pow(k)), k),
    })
}

/// `p`-distortion of a relation given by index pairs.
pub fn dis_p<X, Y>(pairs: &[(usize, usize)], x: &X, y: &Y, p: &PExponent) -> Result<RootValue>
where
    X: FiniteSpace + ?Sized,
    Y: FiniteSpace + ?Sized,
{
    let k = p.integer()?;
    let mut best = RootValue::new(Scalar::zero(), k.unwrap_or(1));
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for &(c, d) in &pairs[i..] {
            let v = lambda_p(x.dist(a, c), y.dist(b, d), p)?;
            if v > best {
                best = v;
            }
        }
    }
    Ok(best)
}

/// `2^(-1/p) inf_R dis_p(R)`, computed through the power transform for finite
/// `p` and through `u_GH` for `p = ∞`.
pub fn dghp(x: &UltrametricSpace, y: &UltrametricSpace, p: &PExponent, opts: &DghOptions) -> Result<RootValue> {
    match p.integer()? {
        None => Ok(RootValue::exact(ugh(x, y))),
        Some(k) => {
            let (xp, yp) = (x.map_distances(|d| d.pow(k)), y.map_distances(|d| d.pow(k)));
            let r = dgh_exact(&xp, &yp, Method::Dp, opts)?;
            Ok(RootValue::new(r.distance, k))
        }
    }
}

/// Floating point `d_GH^(p)` for any real `p >= 1`, through the power
/// transform with distances rounded to the nearest representable rational of
/// their `f64` power. Intended for non-integer `p` only.
pub fn dghp_approx(x: &UltrametricSpace, y: &UltrametricSpace, p: f64, opts: &DghOptions) -> Result<f64> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::NonIntegerExponent(p.to_string()));
    }
    let pow = |d: &Scalar| Scalar::from_f64(d.to_f64().powf(p)).unwrap_or_else(Scalar::zero);
    let (xp, yp) = (x.map_distances(pow), y.map_distances(pow));
    let r = dgh_exact(&xp, &yp, Method::Dp, opts)?;
    Ok(r.distance.to_f64().powf(1.0 / p))
}
