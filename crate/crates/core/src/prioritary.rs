//! Good bundles, resolutions of general prioritary sheaves and the weak
//! Brill–Noether classifier.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::characters::{euler_char, ChernCharacter};
use crate::error::{Error, Result};
use crate::picard::DivisorClass;
use crate::rational::{floor_div, fmt_q, q, to_i64, Q};

/// Euclidean division of `c1` by the rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Normalization {
    pub r: i64,
    pub a_quot: i64,
    pub a_rem: i64,
    pub b_quot: Vec<i64>,
    pub b_rem: Vec<i64>,
    /// `(a'+2)H - Σ(bᵢ'+1)Eᵢ`
    pub shift: DivisorClass,
}

fn integral_rank(v: &ChernCharacter, required: i64) -> Result<i64> {
    match to_i64(&v.r) {
        Some(r) if r >= required => Ok(r),
        _ => Err(Error::RankTooSmall {
            required,
            found: fmt_q(&v.r),
        }),
    }
}

pub fn normalize(r: i64, c1: &DivisorClass) -> Result<Normalization> {
    if r < 2 {
        return Err(Error::RankTooSmall {
            required: 2,
            found: r.to_string(),
        });
    }
    let (a, b) = c1.require_ints()?;
    let a_quot = floor_div(a, r);
    let b_quot: Vec<i64> = b.iter().map(|&x| floor_div(x, r)).collect();
    let shift = DivisorClass::from_ints(
        a_quot + 2,
        &b_quot.iter().map(|&x| x + 1).collect::<Vec<_>>(),
    );
    Ok(Normalization {
        r,
        a_quot,
        a_rem: a - a_quot * r,
        b_rem: b.iter().zip(&b_quot).map(|(&x, &d)| x - d * r).collect(),
        b_quot,
        shift,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodBundle {
    /// Line-bundle summands of the normalized bundle, in construction order.
    pub summands: Vec<DivisorClass>,
    /// The twist taking the normalized bundle back to the requested `c1`.
    pub shift: DivisorClass,
    /// Character of the normalized bundle.
    pub target: ChernCharacter,
}

impl GoodBundle {
    pub fn character(&self) -> ChernCharacter {
        let m = self.shift.m();
        self.summands
            .iter()
            .map(ChernCharacter::line_bundle)
            .fold(ChernCharacter::zero(m), |acc, x| &acc + &x)
    }

    /// Character after twisting back by the shift, i.e. with the input `c1`.
    pub fn twisted_character(&self) -> ChernCharacter {
        self.character().twist(&self.shift).expect("same surface")
    }

    pub fn discriminant(&self) -> Q {
        self.target.delta().expect("rank at least two")
    }
}

/// `D₁` precedes `D₂`: larger `L`-degree first, then smaller `H`-degree,
/// then lexicographically larger `Eⱼ`-degrees.
fn good_order(d1: &(i64, Vec<i64>), d2: &(i64, Vec<i64>)) -> Ordering {
    let l = |d: &(i64, Vec<i64>)| d.0 - d.1.iter().sum::<i64>();
    l(d2)
        .cmp(&l(d1))
        .then(d1.0.cmp(&d2.0))
        .then_with(|| d2.1.cmp(&d1.1))
}

pub fn good_bundle(r: i64, c1: &DivisorClass) -> Result<GoodBundle> {
    let n = normalize(r, c1)?;
    let m = c1.m();
    let ru = r as usize;
    let a_rem = n.a_rem as usize;
    let mut s: Vec<(i64, Vec<i64>)> = (0..ru)
        .map(|k| (if k < ru - a_rem { -2 } else { -1 }, vec![0; m]))
        .collect();
    for i in 0..m {
        let count = (r - n.b_rem[i]) as usize;
        for d in s.iter_mut().take(count) {
            d.1[i] -= 1;
        }
        s.sort_by(good_order);
    }
    let summands: Vec<DivisorClass> = s
        .iter()
        .map(|(a, b)| DivisorClass::from_ints(*a, b))
        .collect();
    let target = summands
        .iter()
        .map(ChernCharacter::line_bundle)
        .fold(ChernCharacter::zero(m), |acc, x| &acc + &x);
    Ok(GoodBundle {
        summands,
        shift: n.shift,
        target,
    })
}

/// Smallest discriminant of an `H`-prioritary sheaf with the given rank and
/// first Chern class: the discriminant of the good bundle.
pub fn minimal_discriminant(r: i64, c1: &DivisorClass) -> Result<Q> {
    Ok(good_bundle(r, c1)?.discriminant())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolutionShape {
    /// `O(-2H+D)^α ⊕ O(-H+D)^β → ⊕O(-Eᵢ+D)^γᵢ ⊕ O(D)^δ`
    TwoTermLeft,
    /// `O(-2H+D)^α → O(-H+D)^β ⊕ ⊕O(-Eᵢ+D)^γᵢ ⊕ O(D)^δ`
    SingleLeft,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolutionData {
    pub shape: ResolutionShape,
    #[serde(serialize_with = "crate::rational::serialize_display")]
    pub d: DivisorClass,
    pub alpha: i64,
    pub beta: i64,
    pub gamma: Vec<i64>,
    pub delta: i64,
}

impl ResolutionData {
    /// `(sign, class, multiplicity)` for every term; `+1` on the right.
    pub fn terms(&self) -> Vec<(i64, DivisorClass, i64)> {
        let m = self.d.m();
        let h = DivisorClass::h(m);
        let mut out = vec![(-1, &self.d - &h.scale(&q(2)), self.alpha)];
        let beta_sign = match self.shape {
            ResolutionShape::TwoTermLeft => -1,
            ResolutionShape::SingleLeft => 1,
        };
        out.push((beta_sign, &self.d - &h, self.beta));
        for (i, &g) in self.gamma.iter().enumerate() {
            out.push((1, &self.d - &DivisorClass::e(m, i), g));
        }
        out.push((1, self.d.clone(), self.delta));
        out
    }

    pub fn alternating_sum(&self) -> ChernCharacter {
        self.terms()
            .iter()
            .fold(ChernCharacter::zero(self.d.m()), |acc, (sign, d, k)| {
                &acc + &ChernCharacter::line_bundle(d).scale(&q(sign * k))
            })
    }
}

fn chi_int(v: &ChernCharacter) -> Result<i64> {
    let x = euler_char(v);
    to_i64(&x).ok_or_else(|| Error::NotIntegral(v.to_string()))
}

/// How many extra multiples of the rank the residues `γᵢ` may absorb when
/// the reduced residues give negative exponents.
pub const RESOLUTION_SEARCH_DEPTH: i64 = 3;

/// Nonnegative vectors of length `m` with sum at most `total`, by sum and
/// then lexicographically.
fn residue_shifts(m: usize, total: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for s in 0..=total {
        let mut level = vec![Vec::new()];
        for i in 0..m {
            let mut next = Vec::new();
            for prefix in level {
                let used: i64 = prefix.iter().sum();
                let range = if i + 1 == m { (s - used)..=(s - used) } else { 0..=(s - used) };
                for x in range {
                    let mut p: Vec<i64> = prefix.clone();
                    p.push(x);
                    next.push(p);
                }
            }
            level = next;
        }
        if m == 0 && s > 0 {
            break;
        }
        out.extend(level);
    }
    out
}

/// Resolution of the general prioritary sheaf with character `v`.
///
/// The `Eᵢ`-coefficients of `D` first make the residual coefficients `γᵢ`
/// lie in `[0, r)`; the `H`-coefficient `c` is the largest with
/// `χ(v(-D)) ≥ 0` below the first negative value of `χ(v(-D-H))`. When that
/// gives `α < 0`, larger residues are tried, up to
/// [`RESOLUTION_SEARCH_DEPTH`] extra multiples of `r` in total.
pub fn resolution(v: &ChernCharacter) -> Result<ResolutionData> {
    let r = integral_rank(v, 2)?;
    let delta_v = v.delta()?;
    if delta_v.is_negative() {
        return Err(Error::NegativeDiscriminant(fmt_q(&delta_v)));
    }
    if !v.is_integral() {
        return Err(Error::NotIntegral(v.to_string()));
    }
    let n = normalize(r, &v.c1)?;
    let mut first_alpha = None;
    for shift in residue_shifts(v.m(), RESOLUTION_SEARCH_DEPTH) {
        let d_quot: Vec<i64> = n.b_quot.iter().zip(&shift).map(|(b, e)| b - e).collect();
        let gamma: Vec<i64> = n.b_rem.iter().zip(&shift).map(|(b, e)| b + r * e).collect();
        match resolution_at(v, r, n.a_quot, &d_quot, gamma)? {
            Ok(data) => return Ok(data),
            Err(alpha) => {
                first_alpha.get_or_insert(alpha);
            }
        }
    }
    Err(Error::NoResolution(format!(
        "{v} (α = {} at the reduced residues)",
        first_alpha.unwrap_or_default()
    )))
}

/// The resolution for fixed `Eᵢ`-coefficients of `D`, or the negative `α`.
fn resolution_at(
    v: &ChernCharacter,
    r: i64,
    a_quot: i64,
    d_quot: &[i64],
    gamma: Vec<i64>,
) -> Result<std::result::Result<ResolutionData, i64>> {
    let sum_gamma: i64 = gamma.iter().sum();
    let shift_at = |c: i64| DivisorClass::from_ints(c, d_quot);
    let chi_at = |c: i64| -> Result<i64> { chi_int(&v.twist(&-shift_at(c))?) };

    // χ(v(-cH - ...)) is a convex quadratic in c: start at its vertex and
    // walk down the decreasing branch to the last nonnegative value.
    let c0 = a_quot + 1;
    let (v0, v1, v2) = (chi_at(c0)?, chi_at(c0 + 1)?, chi_at(c0 + 2)?);
    let second = v2 - 2 * v1 + v0;
    if second <= 0 {
        return Err(Error::AlgorithmBug("Euler characteristic is not convex in the twist".into()));
    }
    // vertex at c0 + 1/2 - (v1 - v0)/second
    let mut c = c0 + floor_div(second - 2 * (v1 - v0), 2 * second);
    let mut guard = 0;
    while chi_at(c)? < 0 {
        c -= 1;
        guard += 1;
        if guard > 10_000 {
            return Err(Error::AlgorithmBug("resolution scan did not terminate".into()));
        }
    }
    let delta = chi_at(c)?;
    // χ(O(-3H)) = 1, χ(O(-H-Eᵢ)) = -1 and χ(O(-H)) = χ(O(-2H)) = 0
    let alpha = -chi_at(c + 1)? - sum_gamma;
    if alpha < 0 {
        return Ok(Err(alpha));
    }
    let signed_beta = r + alpha - delta - sum_gamma;
    let shape = if signed_beta <= 0 {
        ResolutionShape::TwoTermLeft
    } else {
        ResolutionShape::SingleLeft
    };
    Ok(Ok(ResolutionData {
        shape,
        d: shift_at(c),
        alpha,
        beta: signed_beta.abs(),
        gamma,
        delta,
    }))
}

pub fn elementary_modification(v: &ChernCharacter) -> ChernCharacter {
    v.elementary_modification()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WeakBnVerdict {
    Nonspecial { h0: i64, h1: i64, h2: i64, chi: i64 },
    CriterionNotSatisfied { failed: Vec<String> },
}

pub fn weak_bn_classify(v: &ChernCharacter) -> Result<WeakBnVerdict> {
    integral_rank(v, 2)?;
    let delta = v.delta()?;
    if delta.is_negative() {
        return Err(Error::NegativeDiscriminant(fmt_q(&delta)));
    }
    let nu = v.nu()?;
    let mut failed = Vec::new();
    for (i, b) in nu.b().iter().enumerate() {
        if *b < q(-1) {
            failed.push(format!("nu.E{} = {} < -1", i + 1, fmt_q(b)));
        }
    }
    let positive: Q = nu.b().iter().filter(|b| b.is_positive()).sum();
    let l_deg = nu.a() - &positive;
    if l_deg < q(-1) {
        failed.push(format!("nu'.L = {} < -1", fmt_q(&l_deg)));
    }
    if !failed.is_empty() {
        return Ok(WeakBnVerdict::CriterionNotSatisfied { failed });
    }
    let chi = chi_int(v)?;
    Ok(WeakBnVerdict::Nonspecial {
        h0: chi.max(0),
        h1: (-chi).max(0),
        h2: 0,
        chi,
    })
}

impl Normalization {
    pub fn is_trivial(&self) -> bool {
        self.a_rem.is_zero() && self.b_rem.iter().all(Zero::is_zero)
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
    fn shift_enumeration_order() {
        assert_eq!(residue_shifts(0, 3), vec![Vec::<i64>::new()]);
        assert_eq!(
            residue_shifts(2, 1),
            vec![vec![0, 0], vec![0, 1], vec![1, 0]]
        );
        assert_eq!(residue_shifts(3, 2).len(), 10);
    }

    #[test]
    fn euclidean_normalization() {
        let n = normalize(2, &d(-3, &[-1])).unwrap();
        assert_eq!((n.a_quot, n.a_rem, n.b_quot[0], n.b_rem[0]), (-2, 1, -1, 1));
        let n = normalize(2, &d(0, &[0, 0])).unwrap();
        assert!(n.is_trivial());
        let n = normalize(3, &d(4, &[5])).unwrap();
        assert_eq!((n.a_quot, n.a_rem, n.b_quot[0], n.b_rem[0]), (1, 1, 1, 2));
        // c1 = 4H - 5E₁ has b₁ = 5 in the (a; b) convention
        let n = normalize(3, &d(4, &[-5])).unwrap();
        assert_eq!((n.b_quot[0], n.b_rem[0]), (-2, 1));
        assert!(normalize(1, &d(0, &[])).is_err());
    }

    #[test]
    fn good_bundle_examples() {
        // residues a'' = 1, b₁'' = 1
        let g = good_bundle(2, &d(1, &[1])).unwrap();
        assert_eq!(g.summands, vec![d(-2, &[-1]), d(-1, &[0])]);
        let g = good_bundle(2, &d(0, &[0, 0, 0])).unwrap();
        assert_eq!(g.summands, vec![d(-2, &[-1, -1, -1]); 2]);
        let g = good_bundle(2, &d(2, &[2, 2])).unwrap();
        assert_eq!(g.summands, vec![d(-2, &[-1, -1]); 2]);
        let g = good_bundle(3, &d(0, &[1])).unwrap();
        assert_eq!(g.summands, vec![d(-2, &[-1]), d(-2, &[-1]), d(-2, &[0])]);
        assert_eq!(g.twisted_character().c1, d(0, &[1]));
    }

    #[test]
    fn resolution_example() {
        let v: ChernCharacter = "2|0;0|-1".parse().unwrap();
        let res = resolution(&v).unwrap();
        assert_eq!(res.d, d(0, &[0]));
        assert_eq!((res.alpha, res.beta, res.delta), (1, 2, 1));
        assert_eq!(res.gamma, vec![0]);
        assert_eq!(res.shape, ResolutionShape::SingleLeft);
        assert_eq!(res.alternating_sum(), v);
    }

    #[test]
    fn resolution_with_exceptional_residues() {
        // O ⊕ O(-E₁)
        let v = &ChernCharacter::structure_sheaf(1)
            + &ChernCharacter::line_bundle(&DivisorClass::e(1, 0).scale(&q(-1)));
        let res = resolution(&v).unwrap();
        assert_eq!((res.alpha, res.beta, res.delta), (0, 0, 1));
        assert_eq!(res.gamma, vec![1]);
        assert_eq!(res.alternating_sum(), v);
    }

    #[test]
    fn resolution_rejects_bad_input() {
        assert!(resolution(&"1|0;|0".parse().unwrap()).is_err());
        let neg: ChernCharacter = "2|0;|1".parse().unwrap();
        assert!(matches!(resolution(&neg), Err(Error::NegativeDiscriminant(_))));
    }

    #[test]
    fn modification_shifts_discriminant() {
        let v: ChernCharacter = "2|0;|0".parse().unwrap();
        let w = elementary_modification(&v);
        assert_eq!(w, "2|0;|-1".parse().unwrap());
        assert_eq!(euler_char(&w), q(1));
        assert_eq!(w.delta().unwrap(), frac(1, 2));
    }

    #[test]
    fn weak_bn_examples() {
        let v = ChernCharacter::line_bundle(&d(2, &[-1, 1, 1, 1, 1])).scale(&q(2));
        assert!(matches!(
            weak_bn_classify(&v).unwrap(),
            WeakBnVerdict::CriterionNotSatisfied { .. }
        ));
        let v: ChernCharacter = "2|-2;0,0|1".parse().unwrap();
        assert_eq!(
            weak_bn_classify(&v).unwrap(),
            WeakBnVerdict::Nonspecial { h0: 0, h1: 0, h2: 0, chi: 0 }
        );
        let nef: ChernCharacter = "3|3;1,1|1/2".parse().unwrap();
        assert!(matches!(
            weak_bn_classify(&nef).unwrap(),
            WeakBnVerdict::Nonspecial { .. }
        ));
    }
}
