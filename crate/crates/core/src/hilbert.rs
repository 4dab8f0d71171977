//! Divisors on the Hilbert scheme of `n` points of the blow-up, the nef
//! cone, k-very-ampleness and the log Fano boundary.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::picard::DivisorClass;
use crate::rational::{fmt_q, parse_q, q, Q};

/// `αH[n] - ΣβᵢEᵢ[n] + γ·B/2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HilbDivisor {
    pub n: u32,
    #[serde(with = "crate::rational::serde_q")]
    pub alpha: Q,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub beta: Vec<Q>,
    #[serde(with = "crate::rational::serde_q")]
    pub gamma: Q,
}

impl HilbDivisor {
    pub fn new(n: u32, alpha: Q, beta: Vec<Q>, gamma: Q) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameters(format!("need n ≥ 2 points, got {n}")));
        }
        Ok(Self { n, alpha, beta, gamma })
    }

    /// `L[n]` for a line bundle class `L` on the surface.
    pub fn induced(n: u32, l: &DivisorClass) -> Result<Self> {
        Self::new(n, l.a().clone(), l.b().to_vec(), Q::zero())
    }

    pub fn m(&self) -> usize {
        self.beta.len()
    }

    fn n_minus_one(&self) -> Q {
        q(self.n as i64 - 1)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            n: self.n,
            alpha: &self.alpha * c,
            beta: self.beta.iter().map(|b| b * c).collect(),
            gamma: &self.gamma * c,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.m() != other.m() {
            return Err(Error::DimensionMismatch {
                left: self.m(),
                right: other.m(),
            });
        }
        Ok(Self {
            n: self.n,
            alpha: &self.alpha + &other.alpha,
            beta: self.beta.iter().zip(&other.beta).map(|(x, y)| x + y).collect(),
            gamma: &self.gamma + &other.gamma,
        })
    }

    pub fn zero(n: u32, m: usize) -> Result<Self> {
        Self::new(n, Q::zero(), vec![Q::zero(); m], Q::zero())
    }

    /// `H[n]`.
    pub fn h(n: u32, m: usize) -> Result<Self> {
        Self::new(n, q(1), vec![Q::zero(); m], Q::zero())
    }

    /// `(H - Eᵢ)[n]`.
    pub fn h_minus_e(n: u32, m: usize, i: usize) -> Result<Self> {
        let mut beta = vec![Q::zero(); m];
        beta[i] = q(1);
        Self::new(n, q(1), beta, Q::zero())
    }

    /// `D_L(n) = L[n] - B/2` with `L = (n-1)(H + Σ(H - Eᵢ))`.
    pub fn boundary_generator(n: u32, m: usize) -> Result<Self> {
        let k = q(n as i64 - 1);
        Self::new(n, &k * q(1 + m as i64), vec![k; m], q(-1))
    }
}

impl fmt::Display for HilbDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.beta.iter().map(fmt_q).collect();
        write!(
            f,
            "{};{};{}@{}",
            fmt_q(&self.alpha),
            b.join(","),
            fmt_q(&self.gamma),
            self.n
        )
    }
}

impl FromStr for HilbDivisor {
    type Err = Error;

    /// Parses `alpha;beta1,...,betam;gamma@n`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected alpha;betas;gamma@n, got `{s}`"));
        let (class, n) = s.trim().rsplit_once('@').ok_or_else(bad)?;
        let n: u32 = n.trim().parse().map_err(|_| bad())?;
        let parts: Vec<&str> = class.split(';').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let beta = if parts[1].trim().is_empty() {
            Vec::new()
        } else {
            parts[1].split(',').map(parse_q).collect::<Result<Vec<_>>>()?
        };
        Self::new(n, parse_q(parts[0])?, beta, parse_q(parts[2])?)
    }
}

/// A curve class on the Hilbert scheme, known only through its pairings
/// with `H[n]`, `Eᵢ[n]` and `B/2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveFunctional {
    pub name: String,
    #[serde(with = "crate::rational::serde_q")]
    pub h: Q,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub e: Vec<Q>,
    #[serde(with = "crate::rational::serde_q")]
    pub half_b: Q,
}

impl CurveFunctional {
    pub fn pair(&self, d: &HilbDivisor) -> Result<Q> {
        if self.e.len() != d.m() {
            return Err(Error::DimensionMismatch {
                left: self.e.len(),
                right: d.m(),
            });
        }
        let e: Q = self.e.iter().zip(&d.beta).map(|(x, b)| x * b).sum();
        Ok(&self.h * &d.alpha - e + &self.half_b * &d.gamma)
    }
}

/// The curves `R`, `L(n)` and `Eᵢ(n)` whose dual cone is the nef cone.
pub fn extremal_curves(n: u32, m: usize) -> Vec<CurveFunctional> {
    let k = q(n as i64 - 1);
    let mut out = vec![
        CurveFunctional {
            name: "R".into(),
            h: Q::zero(),
            e: vec![Q::zero(); m],
            half_b: q(-1),
        },
        CurveFunctional {
            name: "L(n)".into(),
            h: q(1),
            e: vec![q(1); m],
            half_b: k.clone(),
        },
    ];
    for i in 0..m {
        let mut e = vec![Q::zero(); m];
        e[i] = q(-1);
        out.push(CurveFunctional {
            name: format!("E{}(n)", i + 1),
            h: Q::zero(),
            e,
            half_b: k.clone(),
        });
    }
    out
}

/// The three inequality families, as margins that must be nonnegative:
/// `-γ`, `α + (n-1)γ - Σβ`, then `βᵢ + (n-1)γ`.
pub fn nef_margins(d: &HilbDivisor) -> Vec<Q> {
    let k = d.n_minus_one();
    let mut out = vec![-&d.gamma, &d.alpha + &k * &d.gamma - d.beta.iter().sum::<Q>()];
    out.extend(d.beta.iter().map(|b| b + &k * &d.gamma));
    out
}

pub fn is_nef_hilb(d: &HilbDivisor) -> bool {
    nef_margins(d).iter().all(|x| !x.is_negative())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NefDecomposition {
    /// Coefficient of `H[n]`.
    #[serde(with = "crate::rational::serde_q")]
    pub h: Q,
    /// Coefficients of `(H - Eᵢ)[n]`.
    #[serde(with = "crate::rational::serde_q_vec")]
    pub h_minus_e: Vec<Q>,
    /// Coefficient of `(n-1)(H + Σ(H - Eᵢ))[n] - B/2`.
    #[serde(with = "crate::rational::serde_q")]
    pub boundary: Q,
}

impl NefDecomposition {
    pub fn recompose(&self, n: u32) -> Result<HilbDivisor> {
        let m = self.h_minus_e.len();
        let mut out = HilbDivisor::h(n, m)?.scale(&self.h);
        out = out.checked_add(&HilbDivisor::boundary_generator(n, m)?.scale(&self.boundary))?;
        for (i, c) in self.h_minus_e.iter().enumerate() {
            out = out.checked_add(&HilbDivisor::h_minus_e(n, m, i)?.scale(c))?;
        }
        Ok(out)
    }
}

pub fn nef_decomposition(d: &HilbDivisor) -> Result<NefDecomposition> {
    if !is_nef_hilb(d) {
        return Err(Error::NotNef);
    }
    let k = d.n_minus_one();
    Ok(NefDecomposition {
        h: &d.alpha - d.beta.iter().sum::<Q>() + &k * &d.gamma,
        h_minus_e: d.beta.iter().map(|b| b + &k * &d.gamma).collect(),
        boundary: -&d.gamma,
    })
}

/// `aH + Σbᵢ(H - Eᵢ)` with `a, bᵢ ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VeryAmpleSummand {
    pub a: i64,
    pub b: Vec<i64>,
}

impl VeryAmpleSummand {
    pub fn class(&self) -> DivisorClass {
        let total = self.a + self.b.iter().sum::<i64>();
        DivisorClass::from_ints(total, &self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum KVeryAmple {
    Certified { k: u32, summands: Vec<VeryAmpleSummand> },
    /// Not of the certified shape. This is not a refutation.
    Unknown { k: u32 },
}

/// Writes `L` as a sum of `k + 1` very ample classes `aH + Σbᵢ(H - Eᵢ)`.
pub fn k_very_ample_certificate(l: &DivisorClass, k: u32) -> Result<KVeryAmple> {
    let (total, b) = l.require_ints()?;
    let parts = k as i64 + 1;
    let a = total - b.iter().sum::<i64>();
    if a < parts || b.iter().any(|&x| x < parts) {
        return Ok(KVeryAmple::Unknown { k });
    }
    let mut summands = vec![
        VeryAmpleSummand {
            a: 1,
            b: vec![1; b.len()],
        };
        k as usize
    ];
    summands.push(VeryAmpleSummand {
        a: a - k as i64,
        b: b.iter().map(|x| x - k as i64).collect(),
    });
    Ok(KVeryAmple::Certified { k, summands })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogFanoWitness {
    /// `-K - Δ = (2+δ)H[n] - Σ δEᵢ[n] - ε·B/2`.
    pub class: HilbDivisor,
    /// The strict nef inequalities, in the order of [`nef_margins`].
    #[serde(with = "crate::rational::serde_q_vec")]
    pub margins: Vec<Q>,
}

/// Checks that `-K - Δ` is ample for `Δ = (1-δ)L[n] + ε·B/2`.
pub fn log_fano_witness(n: u32, m: usize, delta: &Q, eps: &Q) -> Result<LogFanoWitness> {
    if !delta.is_positive() || *delta >= q(1) {
        return Err(Error::InvalidParameters(format!(
            "need 0 < δ < 1, got {}",
            fmt_q(delta)
        )));
    }
    let k = q(n as i64 - 1);
    if !eps.is_positive() || &k * eps >= *delta {
        return Err(Error::InvalidParameters(format!(
            "need 0 < (n-1)ε < δ, got ε = {}",
            fmt_q(eps)
        )));
    }
    let class = HilbDivisor::new(n, q(2) + delta, vec![delta.clone(); m], -eps)?;
    let margins = nef_margins(&class);
    if let Some(x) = margins.iter().find(|x| !x.is_positive()) {
        return Err(Error::InvalidParameters(format!(
            "δ too large for m = {m}: margin {} is not positive",
            fmt_q(x)
        )));
    }
    Ok(LogFanoWitness { class, margins })
}
