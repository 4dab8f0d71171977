//! Chern characters, slopes, discriminants and Riemann–Roch.
//!
//! A character is stored as `(r, c1, ch2)`. For `r > 0` the total slope is
//! `ν = c1/r` and the discriminant `Δ = ν²/2 - ch2/r`.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::picard::{canonical, DivisorClass};
use crate::rational::{
    fmt_q, frac, is_integer, lcm_of_denominators, parse_q, q, q_to_value, Q,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChernCharacter {
    pub r: Q,
    pub c1: DivisorClass,
    pub ch2: Q,
}

impl ChernCharacter {
    pub fn new(r: Q, c1: DivisorClass, ch2: Q) -> Self {
        Self { r, c1, ch2 }
    }

    pub fn zero(m: usize) -> Self {
        Self::new(Q::zero(), DivisorClass::zero(m), Q::zero())
    }

    pub fn structure_sheaf(m: usize) -> Self {
        Self::line_bundle(&DivisorClass::zero(m))
    }

    /// `ch(O(D)) = (1, D, D²/2)`.
    pub fn line_bundle(d: &DivisorClass) -> Self {
        Self::new(q(1), d.clone(), d.square() / q(2))
    }

    pub fn m(&self) -> usize {
        self.c1.m()
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.c1.is_zero() && self.ch2.is_zero()
    }

    /// Rank and `c1` integral, and `ch2 - c1²/2` an integer.
    pub fn is_integral(&self) -> bool {
        is_integer(&self.r)
            && self.c1.is_integral()
            && is_integer(&(&self.ch2 - self.c1.square() / q(2)))
    }

    fn require_rank(&self) -> Result<()> {
        if self.r.is_positive() {
            Ok(())
        } else {
            Err(Error::UndefinedSlope)
        }
    }

    pub fn nu(&self) -> Result<DivisorClass> {
        self.require_rank()?;
        Ok(self.c1.scale(&self.r.recip()))
    }

    pub fn delta(&self) -> Result<Q> {
        let nu = self.nu()?;
        Ok(nu.square() / q(2) - &self.ch2 / &self.r)
    }

    pub fn slope_disc(&self) -> Result<SlopeDisc> {
        Ok(SlopeDisc {
            r: self.r.clone(),
            nu: self.nu()?,
            delta: self.delta()?,
        })
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::new(&self.r * k, self.c1.scale(k), &self.ch2 * k)
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

    /// Multiplication by `ch(O(D))`.
    pub fn twist(&self, d: &DivisorClass) -> Result<Self> {
        if self.m() != d.m() {
            return Err(Error::DimensionMismatch {
                left: self.m(),
                right: d.m(),
            });
        }
        Ok(Self::new(
            self.r.clone(),
            &self.c1 + &d.scale(&self.r),
            &self.ch2 + self.c1.dot(d) + &self.r * d.square() / q(2),
        ))
    }

    /// Twist by `O(-K)`.
    pub fn twist_anticanonical(&self, times: i64) -> Self {
        let k = canonical(self.m()).scale(&q(-times));
        self.twist(&k).expect("same surface")
    }

    pub fn elementary_modification(&self) -> Self {
        Self::new(self.r.clone(), self.c1.clone(), &self.ch2 - q(1))
    }

    pub fn is_exceptional(&self) -> bool {
        self.r.is_positive() && euler_pairing_unchecked(self, self).is_one()
    }
}

impl Add for &ChernCharacter {
    type Output = ChernCharacter;

    fn add(self, rhs: &ChernCharacter) -> ChernCharacter {
        ChernCharacter::new(&self.r + &rhs.r, &self.c1 + &rhs.c1, &self.ch2 + &rhs.ch2)
    }
}

impl Sub for &ChernCharacter {
    type Output = ChernCharacter;

    fn sub(self, rhs: &ChernCharacter) -> ChernCharacter {
        ChernCharacter::new(&self.r - &rhs.r, &self.c1 - &rhs.c1, &self.ch2 - &rhs.ch2)
    }
}

impl Neg for &ChernCharacter {
    type Output = ChernCharacter;

    fn neg(self) -> ChernCharacter {
        ChernCharacter::new(-&self.r, -&self.c1, -&self.ch2)
    }
}

impl Add for ChernCharacter {
    type Output = ChernCharacter;

    fn add(self, rhs: ChernCharacter) -> ChernCharacter {
        &self + &rhs
    }
}

impl Sub for ChernCharacter {
    type Output = ChernCharacter;

    fn sub(self, rhs: ChernCharacter) -> ChernCharacter {
        &self - &rhs
    }
}

impl fmt::Display for ChernCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|{}", fmt_q(&self.r), self.c1, fmt_q(&self.ch2))
    }
}

impl FromStr for ChernCharacter {
    type Err = Error;

    /// Parses `r|a;b1,...,bm|ch2`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split('|').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected `r|a;b1,...,bm|ch2`, got `{s}`"
            )));
        }
        Ok(Self::new(
            parse_q(parts[0])?,
            parts[1].parse()?,
            parse_q(parts[2])?,
        ))
    }
}

impl ChernCharacter {
    pub fn to_json(&self) -> serde_json::Value {
        let mut c1 = vec![q_to_value(self.c1.a())];
        c1.extend(self.c1.b().iter().map(q_to_value));
        serde_json::json!({
            "r": q_to_value(&self.r),
            "c1": c1,
            "ch2": fmt_q(&self.ch2),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        use crate::rational::serde_q::value_to_q;
        let bad = |what: &str| Error::Parse(format!("character JSON: {what}"));
        let get = |k: &str| v.get(k).ok_or_else(|| bad(&format!("missing `{k}`")));
        let r = value_to_q(get("r")?).map_err(|e| bad(&e))?;
        let ch2 = value_to_q(get("ch2")?).map_err(|e| bad(&e))?;
        let c1 = get("c1")?
            .as_array()
            .ok_or_else(|| bad("`c1` is not an array"))?
            .iter()
            .map(|x| value_to_q(x).map_err(|e| bad(&e)))
            .collect::<Result<Vec<_>>>()?;
        let (a, b) = c1.split_first().ok_or_else(|| bad("empty `c1`"))?;
        Ok(Self::new(r, DivisorClass::new(a.clone(), b.to_vec()), ch2))
    }
}

impl Serialize for ChernCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChernCharacter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Self::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// The `(r, ν, Δ)` view of a positive-rank character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeDisc {
    pub r: Q,
    pub nu: DivisorClass,
    pub delta: Q,
}

impl SlopeDisc {
    pub fn to_character(&self) -> ChernCharacter {
        let ch2 = &self.r * (self.nu.square() / q(2) - &self.delta);
        ChernCharacter::new(self.r.clone(), self.nu.scale(&self.r), ch2)
    }
}

/// `P(ν) = 1 + ν.(ν - K)/2`.
pub fn hilbert_poly_p(nu: &DivisorClass) -> Q {
    let k = canonical(nu.m());
    q(1) + nu.dot(&(nu - &k)) / q(2)
}

/// `χ(v) = r + c1.(-K)/2 + ch2`, valid for every rank.
pub fn euler_char(v: &ChernCharacter) -> Q {
    let k = canonical(v.m());
    &v.r - v.c1.dot(&k) / q(2) + &v.ch2
}

/// `χ(u, v)`, extended bilinearly from the positive-rank formula
/// `r_u r_v (P(ν_v - ν_u) - Δ_u - Δ_v)`.
pub fn euler_pairing(u: &ChernCharacter, v: &ChernCharacter) -> Result<Q> {
    u.check_m(v)?;
    Ok(euler_pairing_unchecked(u, v))
}

pub(crate) fn euler_pairing_unchecked(u: &ChernCharacter, v: &ChernCharacter) -> Q {
    let minus_k = -canonical(u.m());
    let cross = &v.c1.scale(&u.r) - &u.c1.scale(&v.r);
    &u.r * &v.r + cross.dot(&minus_k) / q(2) + &u.r * &v.ch2 + &v.r * &u.ch2
        - u.c1.dot(&v.c1)
}

/// The ample class `A = H - Σ εᵢEᵢ` with `εᵢ > 0` and `Σεᵢ < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polarization {
    #[serde(with = "crate::rational::serde_q_vec")]
    eps: Vec<Q>,
}

impl Polarization {
    pub fn new(eps: Vec<Q>) -> Result<Self> {
        if let Some(e) = eps.iter().find(|e| !e.is_positive()) {
            return Err(Error::InvalidPolarization(format!(
                "coefficient {} is not positive",
                fmt_q(e)
            )));
        }
        let sum: Q = eps.iter().sum();
        if sum >= q(1) {
            return Err(Error::InvalidPolarization(format!(
                "coefficients sum to {} ≥ 1",
                fmt_q(&sum)
            )));
        }
        Ok(Self { eps })
    }

    /// A fixed small polarization with pairwise distinct prime-based
    /// denominators, so that no accidental slope coincidences occur among
    /// small characters.
    pub fn generic_small(m: usize) -> Self {
        const PRIMES: [i64; 16] = [
            11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
        ];
        let eps = (0..m)
            .map(|i| {
                let p = PRIMES.get(i).copied().unwrap_or(73 + 2 * i as i64);
                frac(1, p * (m as i64 + 1))
            })
            .collect();
        Self::new(eps).expect("small coefficients are valid")
    }

    pub fn uniform(m: usize, eps: Q) -> Result<Self> {
        Self::new(vec![eps; m])
    }

    pub fn m(&self) -> usize {
        self.eps.len()
    }

    pub fn eps(&self) -> &[Q] {
        &self.eps
    }

    pub fn divisor(&self) -> DivisorClass {
        DivisorClass::new(q(1), self.eps.clone())
    }

    /// `A.K = -3 + Σεᵢ`.
    pub fn dot_canonical(&self) -> Q {
        q(-3) + self.eps.iter().sum::<Q>()
    }

    /// Smallest positive integer `s` with `sA` integral.
    pub fn integral_scale(&self) -> Q {
        Q::from_integer(lcm_of_denominators(&self.eps))
    }

    /// `μ_A` of a total slope `ν = αH - Σβᵢ Eᵢ`, i.e. `α - Σ εᵢβᵢ`.
    pub fn slope_of(&self, nu: &DivisorClass) -> Result<Q> {
        nu.intersect(&self.divisor())
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.eps.iter().map(fmt_q).collect();
        write!(f, "{}", e.join(","))
    }
}

impl FromStr for Polarization {
    type Err = Error;

    /// Comma-separated `εᵢ`; the empty string is the polarization on P².
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Self::new(Vec::new());
        }
        Self::new(s.split(',').map(parse_q).collect::<Result<Vec<_>>>()?)
    }
}

pub fn slope_a(v: &ChernCharacter, a: &Polarization) -> Result<Q> {
    a.slope_of(&v.nu()?)
}

/// Balanced pushforward to P²: `c1 = aH + Σ dᵢEᵢ` with `0 ≤ dᵢ < r` maps to
/// `(r, aH, ch2 + Σdᵢ/2)`, removing `dᵢ` copies of `ch(O_{Eᵢ}(-1)) = (0, Eᵢ, -1/2)`.
pub fn pushforward_character(v: &ChernCharacter) -> Result<ChernCharacter> {
    if !v.r.is_positive() {
        return Err(Error::RankTooSmall {
            required: 1,
            found: fmt_q(&v.r),
        });
    }
    let mut total_d = Q::zero();
    for (i, b) in v.c1.b().iter().enumerate() {
        if b.is_positive() || *b <= -&v.r || !is_integer(b) {
            return Err(Error::NotBalanced {
                index: i + 1,
                coefficient: fmt_q(b),
            });
        }
        total_d -= b;
    }
    Ok(ChernCharacter::new(
        v.r.clone(),
        DivisorClass::new(v.c1.a().clone(), Vec::new()),
        &v.ch2 + total_d / q(2),
    ))
}

/// Coefficients of `t ↦ χ(v(t·s·A))/r` for the integral scale `s`.
/// The derived ordering is lexicographic, i.e. the order for `t ≫ 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReducedHilbertPoly {
    pub c2: Q,
    pub c1: Q,
    pub c0: Q,
}

pub fn reduced_hilbert_polynomial(
    v: &ChernCharacter,
    a: &Polarization,
    scale: &Q,
) -> Result<ReducedHilbertPoly> {
    let nu = v.nu()?;
    if !scale.is_positive() || !is_integer(scale) {
        return Err(Error::InvalidParameters(format!(
            "scale {} is not a positive integer",
            fmt_q(scale)
        )));
    }
    let d = a.divisor().scale(scale);
    if !d.is_integral() {
        return Err(Error::InvalidParameters(format!(
            "scale {} does not clear the denominators of A",
            fmt_q(scale)
        )));
    }
    if nu.m() != d.m() {
        return Err(Error::DimensionMismatch {
            left: nu.m(),
            right: d.m(),
        });
    }
    let k = canonical(nu.m());
    Ok(ReducedHilbertPoly {
        c2: d.square() / q(2),
        c1: d.dot(&nu) - d.dot(&k) / q(2),
        c0: hilbert_poly_p(&nu) - v.delta()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(s: &str) -> ChernCharacter {
        s.parse().unwrap()
    }

    fn d(a: i64, b: &[i64]) -> DivisorClass {
        DivisorClass::from_ints(a, b)
    }

    #[test]
    fn hilbert_polynomial_values() {
        assert_eq!(hilbert_poly_p(&DivisorClass::zero(3)), q(1));
        for m in 0..6 {
            assert_eq!(hilbert_poly_p(&-DivisorClass::h(m)), q(0));
        }
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(euler_char(&ChernCharacter::structure_sheaf(4)), q(1));
        let v = ChernCharacter::line_bundle(&d(2, &[-1, 1, 1, 1, 1]));
        assert_eq!(euler_char(&v), q(2));
        let v = ch("2|0;0|-1");
        assert_eq!(v.delta().unwrap(), frac(1, 2));
        assert_eq!(euler_char(&v), q(1));
    }

    #[test]
    fn pairings() {
        let o = ChernCharacter::structure_sheaf(2);
        assert_eq!(euler_pairing(&o, &o).unwrap(), q(1));
        let oe = ChernCharacter::line_bundle(&DivisorClass::e(2, 0));
        assert_eq!(euler_pairing(&o, &oe).unwrap(), q(1));
        let t = ch("2|3;|3/2");
        assert_eq!(euler_pairing(&t, &t).unwrap(), q(1));
        assert!(euler_pairing(&o, &ChernCharacter::structure_sheaf(1)).is_err());
    }

    #[test]
    fn pairing_matches_slope_formula_for_positive_ranks() {
        let u = ch("2|1;1,0|-1/2");
        let v = ch("3|-2;1,2|5");
        let (su, sv) = (u.slope_disc().unwrap(), v.slope_disc().unwrap());
        let expect = &su.r
            * &sv.r
            * (hilbert_poly_p(&(&sv.nu - &su.nu)) - &su.delta - &sv.delta);
        assert_eq!(euler_pairing(&u, &v).unwrap(), expect);
    }

    #[test]
    fn twisting() {
        let dd = d(1, &[2, -1]);
        let t = ChernCharacter::structure_sheaf(2).twist(&dd).unwrap();
        assert_eq!(t, ChernCharacter::line_bundle(&dd));
        let v = ch("2|0;|-1");
        let w = v.twist(&d(-1, &[])).unwrap();
        assert_eq!(w, ch("2|-2;|0"));
        assert_eq!(w.delta().unwrap(), v.delta().unwrap());
        assert_eq!(euler_char(&w), q(2) * hilbert_poly_p(&d(-1, &[])) - q(2) * frac(1, 2));
    }

    #[test]
    fn slopes() {
        let a = Polarization::uniform(3, frac(1, 10)).unwrap();
        assert_eq!(slope_a(&ch("2|3;0,0,0|3/2"), &a).unwrap(), frac(3, 2));
        let oe = ChernCharacter::line_bundle(&DivisorClass::e(3, 1));
        assert_eq!(slope_a(&oe, &a).unwrap(), frac(1, 10));
        let all = ChernCharacter::line_bundle(&d(0, &[-1, -1, -1]));
        assert_eq!(slope_a(&all, &a).unwrap(), frac(3, 10));
        assert_eq!(slope_a(&ChernCharacter::zero(3), &a), Err(Error::UndefinedSlope));
    }

    #[test]
    fn polarization_constraints() {
        assert!(Polarization::new(vec![q(0)]).is_err());
        assert!(Polarization::new(vec![frac(1, 2), frac(1, 2)]).is_err());
        let g = Polarization::generic_small(5);
        assert!(g.eps().iter().sum::<Q>() < q(1));
        assert_eq!(g.dot_canonical(), q(-3) + g.eps().iter().sum::<Q>());
    }

    #[test]
    fn pushforward() {
        let v = ch("3|1;0,0|2");
        assert_eq!(pushforward_character(&v).unwrap(), ch("3|1;|2"));
        let t = ch("2|3;0,0,0|3/2");
        assert_eq!(pushforward_character(&t).unwrap(), ch("2|3;|3/2"));
        let w = ch("2|2;-1|5/2");
        let p = pushforward_character(&w).unwrap();
        assert_eq!(p, ch("2|2;|3"));
        // χ(O_{E}(-1)) = 0, so χ is preserved
        assert_eq!(euler_char(&w), euler_char(&p));
        let skyline = ch("0|0;-1|-1/2");
        assert_eq!(euler_char(&skyline), q(0));
        assert!(matches!(
            pushforward_character(&ch("2|2;1|0")),
            Err(Error::NotBalanced { index: 1, .. })
        ));
        assert!(pushforward_character(&ch("2|2;-2|0")).is_err());
    }

    #[test]
    fn reduced_polynomials_order_by_slope_then_discriminant() {
        let a = Polarization::generic_small(1);
        let s = a.integral_scale();
        let p = |v: &ChernCharacter| reduced_hilbert_polynomial(v, &a, &s).unwrap();
        let o = ChernCharacter::structure_sheaf(1);
        assert!(p(&o).c2.is_positive());
        let oh = ChernCharacter::line_bundle(&DivisorClass::h(1));
        assert!(p(&oh) > p(&o));
        let v = ch("2|0;0|0");
        assert!(p(&v) > p(&v.elementary_modification()));
        assert!(reduced_hilbert_polynomial(&o, &a, &q(1)).is_err());
    }

    #[test]
    fn text_and_json_roundtrip() {
        let v = ch("2|3;|3/2");
        assert_eq!(v.to_string(), "2|3;|3/2");
        let j = serde_json::to_string(&v).unwrap();
        assert_eq!(j, r#"{"c1":[3],"ch2":"3/2","r":2}"#);
        let back: ChernCharacter = serde_json::from_str(&j).unwrap();
        assert_eq!(back, v);
        let sd = ch("3|1;-2|1/2").slope_disc().unwrap();
        assert_eq!(sd.to_character(), ch("3|1;-2|1/2"));
    }

    #[test]
    fn integrality() {
        assert!(ch("2|3;|3/2").is_integral());
        assert!(!ch("2|3;|1").is_integral());
        assert!(ChernCharacter::line_bundle(&d(1, &[1, 1])).is_integral());
    }
}
