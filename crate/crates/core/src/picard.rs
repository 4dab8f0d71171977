//! The Picard lattice of the blow-up X_m of P² at m collinear points.
//!
//! A class is stored as `(a; b_1, ..., b_m)` and stands for `aH - Σ b_i E_i`.
//! The intersection form has `H² = 1`, `E_i² = -1` and all other products of
//! basis elements zero. `L = H - ΣE_i` is the proper transform of the line
//! through the points.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, is_integer, parse_q, q, to_i64, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DivisorClass {
    #[serde(with = "crate::rational::serde_q")]
    a: Q,
    #[serde(with = "crate::rational::serde_q_vec")]
    b: Vec<Q>,
}

impl DivisorClass {
    pub fn new(a: Q, b: Vec<Q>) -> Self {
        Self { a, b }
    }

    pub fn from_ints(a: i64, b: &[i64]) -> Self {
        Self::new(q(a), b.iter().map(|&x| q(x)).collect())
    }

    pub fn zero(m: usize) -> Self {
        Self::new(Q::zero(), vec![Q::zero(); m])
    }

    /// The pullback of a line, `H`.
    pub fn h(m: usize) -> Self {
        Self::new(q(1), vec![Q::zero(); m])
    }

    /// The exceptional curve `E_i` (zero-based index), i.e. `b_i = -1`.
    pub fn e(m: usize, i: usize) -> Self {
        let mut b = vec![Q::zero(); m];
        b[i] = q(-1);
        Self::new(Q::zero(), b)
    }

    /// `L = H - ΣE_i`.
    pub fn line(m: usize) -> Self {
        Self::new(q(1), vec![q(1); m])
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &Q {
        &self.a
    }

    pub fn b(&self) -> &[Q] {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        is_integer(&self.a) && self.b.iter().all(is_integer)
    }

    /// Integer coefficients `(a, [b_i])`, if the class is integral.
    pub fn to_ints(&self) -> Option<(i64, Vec<i64>)> {
        let a = to_i64(&self.a)?;
        let b = self.b.iter().map(to_i64).collect::<Option<Vec<_>>>()?;
        Some((a, b))
    }

    pub fn require_ints(&self) -> Result<(i64, Vec<i64>)> {
        self.to_ints()
            .ok_or_else(|| Error::NotIntegral(self.to_string()))
    }

    fn check_m(&self, other: &Self) -> Result<()> {
        if self.m() != other.m() {
            return Err(Error::DimensionMismatch {
                left: self.m(),
                right: other.m(),
            });
        }
        Ok(())
    }

    /// `a₁a₂ - Σ b₁ᵢ b₂ᵢ`.
    pub fn intersect(&self, other: &Self) -> Result<Q> {
        self.check_m(other)?;
        Ok(self.dot(other))
    }

    /// Intersection without the dimension check; callers guarantee equal `m`.
    pub(crate) fn dot(&self, other: &Self) -> Q {
        debug_assert_eq!(self.m(), other.m());
        self.b
            .iter()
            .zip(&other.b)
            .fold(&self.a * &other.a, |acc, (x, y)| acc - x * y)
    }

    pub fn square(&self) -> Q {
        self.dot(self)
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::new(&self.a * k, self.b.iter().map(|x| x * k).collect())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_m(other)?;
        Ok(self + other)
    }

    /// Nef iff `a ≥ Σ b_i` and every `b_i ≥ 0`.
    pub fn is_nef(&self) -> bool {
        let sum: Q = self.b.iter().sum();
        self.a >= sum && self.b.iter().all(|x| !x.is_negative())
    }

    /// Membership in the cone cut out by `a ≥ 0` and `a ≥ b_i`.
    pub fn is_effective_class(&self) -> bool {
        !self.a.is_negative() && self.b.iter().all(|x| &self.a >= x)
    }

    /// Restriction degree `D.E_i = b_i`.
    pub fn dot_e(&self, i: usize) -> &Q {
        &self.b[i]
    }

    /// `D.L = a - Σ b_i`.
    pub fn dot_line(&self) -> Q {
        self.b.iter().fold(self.a.clone(), |acc, x| acc - x)
    }
}

/// The canonical class `K = -3H + ΣE_i`, stored as `(-3; -1, ..., -1)`.
pub fn canonical(m: usize) -> DivisorClass {
    DivisorClass::new(q(-3), vec![q(-1); m])
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.b.iter().map(fmt_q).collect();
        write!(f, "{};{}", fmt_q(&self.a), b.join(","))
    }
}

impl FromStr for DivisorClass {
    type Err = Error;

    /// Parses `a;b1,...,bm`; `a;` (or a bare `a`) is a class on P².
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (a, rest) = s.split_once(';').unwrap_or((s, ""));
        let a = parse_q(a)?;
        let b = if rest.trim().is_empty() {
            Vec::new()
        } else {
            rest.split(',').map(parse_q).collect::<Result<Vec<_>>>()?
        };
        Ok(Self::new(a, b))
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;

    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        assert_eq!(self.m(), rhs.m(), "adding classes on different surfaces");
        DivisorClass::new(
            &self.a + &rhs.a,
            self.b.iter().zip(&rhs.b).map(|(x, y)| x + y).collect(),
        )
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;

    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self + &(-rhs)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;

    fn neg(self) -> DivisorClass {
        DivisorClass::new(-&self.a, self.b.iter().map(|x| -x).collect())
    }
}

impl Add for DivisorClass {
    type Output = DivisorClass;

    fn add(self, rhs: DivisorClass) -> DivisorClass {
        &self + &rhs
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;

    fn sub(self, rhs: DivisorClass) -> DivisorClass {
        &self - &rhs
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;

    fn neg(self) -> DivisorClass {
        -&self
    }
}

impl Mul<&Q> for &DivisorClass {
    type Output = DivisorClass;

    fn mul(self, k: &Q) -> DivisorClass {
        self.scale(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn d(a: i64, b: &[i64]) -> DivisorClass {
        DivisorClass::from_ints(a, b)
    }

    #[test]
    fn basic_intersections() {
        assert_eq!(DivisorClass::h(3).intersect(&DivisorClass::h(3)).unwrap(), q(1));
        assert_eq!(DivisorClass::e(3, 1).square(), q(-1));
        let l = DivisorClass::line(5);
        assert_eq!(l.square(), q(-4));
        // 2H + E1 - E2 - ... - E5
        let dd = d(2, &[-1, 1, 1, 1, 1]);
        assert_eq!(dd.intersect(&l).unwrap(), q(-1));
        assert_eq!(l.intersect(&DivisorClass::e(5, 2)).unwrap(), q(1));
        assert_eq!(l.intersect(&DivisorClass::h(5)).unwrap(), q(1));
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let err = DivisorClass::h(2).intersect(&DivisorClass::h(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 2, right: 3 });
    }

    #[test]
    fn canonical_class() {
        assert_eq!(canonical(0), d(-3, &[]));
        assert_eq!(canonical(2), d(-3, &[-1, -1]));
        assert_eq!(canonical(5).square(), q(4));
    }

    #[test]
    fn nef_and_effective() {
        assert!(d(1, &[1]).is_nef());
        assert!(!DivisorClass::e(1, 0).is_nef());
        assert!(!DivisorClass::line(2).is_nef());
        assert!(DivisorClass::line(5).is_effective_class());
        assert!(!d(-1, &[0, 0]).is_effective_class());
        assert!(!d(2, &[3]).is_effective_class());
        assert!(DivisorClass::e(3, 0).is_effective_class());
        // rational classes use the same cone conditions
        let nu = DivisorClass::new(frac(3, 2), vec![frac(1, 2), frac(1, 2)]);
        assert!(nu.is_nef());
    }

    #[test]
    fn text_roundtrip() {
        let c: DivisorClass = "2;-1,1,1,1,1".parse().unwrap();
        assert_eq!(c, d(2, &[-1, 1, 1, 1, 1]));
        assert_eq!(c.to_string(), "2;-1,1,1,1,1");
        let p2: DivisorClass = "3;".parse().unwrap();
        assert_eq!(p2.m(), 0);
        assert_eq!(p2.to_string(), "3;");
        let r: DivisorClass = "3/2;1/2".parse().unwrap();
        assert!(!r.is_integral());
        assert_eq!(r.to_string(), "3/2;1/2");
    }

    #[test]
    fn nef_generators_meet_effective_generators_nonnegatively() {
        for m in 0..=12 {
            let mut nef = vec![DivisorClass::h(m)];
            nef.extend((0..m).map(|i| &DivisorClass::h(m) - &DivisorClass::e(m, i)));
            let mut eff: Vec<_> = (0..m).map(|i| DivisorClass::e(m, i)).collect();
            eff.push(DivisorClass::line(m));
            for n in &nef {
                for e in &eff {
                    assert!(n.intersect(e).unwrap() >= q(0), "m={m} {n} . {e}");
                }
            }
        }
    }
}
