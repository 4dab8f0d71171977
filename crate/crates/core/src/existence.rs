//! Discriminant bounds from exceptional characters, Drézet–Le Potier type
//! conditions, existence verdicts for stable sheaves and Harder–Narasimhan
//! decompositions.
//!
//! Every supremum over exceptional bundles is taken over the records of an
//! [`Atlas`] and their `-K` twists, so results are lower bounds relative to
//! the atlas parameters, which are echoed in the output.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::characters::{
    euler_pairing, hilbert_poly_p, reduced_hilbert_polynomial, slope_a, ChernCharacter,
    Polarization,
};
use crate::error::{Error, Result};
use crate::exceptional::Atlas;
use crate::lp::{maximize, Constraint, LpOutcome, Relation};
use crate::par::{self, Execution};
use crate::picard::DivisorClass;
use crate::rational::{fmt_q, frac, is_integer, q, to_i64, Q};

fn half_width(a: &Polarization) -> Q {
    -a.dot_canonical() / q(2)
}

/// The three-branch function `DLP_{A,E}(ν)`.
pub fn dlp_ae(a: &Polarization, e: &ChernCharacter, nu: &DivisorClass) -> Result<Q> {
    let nu_e = e.nu()?;
    let diff = nu - &nu_e;
    let d = a.slope_of(&diff)?;
    let half = half_width(a);
    if d.abs() > half {
        return Err(Error::OutOfWindow {
            difference: fmt_q(&d),
            half_width: fmt_q(&half),
        });
    }
    let delta_e = e.delta()?;
    let value = match d.cmp(&Q::zero()) {
        std::cmp::Ordering::Less => hilbert_poly_p(&diff),
        std::cmp::Ordering::Greater => hilbert_poly_p(&-&diff),
        std::cmp::Ordering::Equal => hilbert_poly_p(&diff).max(hilbert_poly_p(&-&diff)),
    };
    Ok(value - delta_e)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlpQuery {
    pub nu: DivisorClass,
    pub polarization: Polarization,
    /// Only exceptional characters of rank strictly below this are used.
    pub rank_ceiling: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DlpBound {
    /// `None` when no atlas character lies in the window (the supremum of
    /// the empty set).
    #[serde(serialize_with = "serialize_opt_q")]
    pub value: Option<Q>,
    pub witness: Option<ChernCharacter>,
    pub candidates: usize,
}

fn serialize_opt_q<S: serde::Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&fmt_q(v)),
        None => s.serialize_str("-inf"),
    }
}

/// Integer `t` with `|μ_A(ν) - μ_A(E) - t·w| ≤ w/2`, where `w = -K.A`.
fn twists_in_window(mu_nu: &Q, mu_e: &Q, w: &Q) -> std::ops::RangeInclusive<i64> {
    let x = (mu_nu - mu_e) / w;
    let half = frac(1, 2);
    let lo = (&x - &half).ceil();
    let hi = (&x + &half).floor();
    let to = |y: Q| y.to_integer().to_i64().expect("twist fits");
    to(lo)..=to(hi)
}

/// Atlas characters (with their `-K` twists) whose `A`-slope is within
/// `-K.A/2` of `μ_A(ν)`.
fn window_characters(
    nu: &DivisorClass,
    a: &Polarization,
    atlas: &Atlas,
    rank_ceiling: Option<i64>,
) -> Result<Vec<ChernCharacter>> {
    if nu.m() != atlas.m || a.m() != atlas.m {
        return Err(Error::DimensionMismatch {
            left: nu.m(),
            right: atlas.m,
        });
    }
    let w = -a.dot_canonical();
    let mu_nu = a.slope_of(nu)?;
    let mut out = Vec::new();
    for rec in &atlas.records {
        if rank_ceiling.is_some_and(|c| rec.rank() >= c) {
            continue;
        }
        let mu_e = slope_a(&rec.ch, a)?;
        for t in twists_in_window(&mu_nu, &mu_e, &w) {
            out.push(rec.ch.twist_anticanonical(t));
        }
    }
    Ok(out)
}

/// Largest `DLP_{A,E}(ν)` over atlas characters in the window.
pub fn dlp_sup(query: &DlpQuery, atlas: &Atlas, exec: Execution) -> Result<DlpBound> {
    let cands = window_characters(&query.nu, &query.polarization, atlas, query.rank_ceiling)?;
    let values = par::map(exec, &cands, |e| dlp_ae(&query.polarization, e, &query.nu));
    let mut best: Option<(Q, usize)> = None;
    for (i, v) in values.into_iter().enumerate() {
        let v = v?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, i));
        }
    }
    Ok(DlpBound {
        value: best.as_ref().map(|(v, _)| v.clone()),
        witness: best.map(|(_, i)| cands[i].clone()),
        candidates: cands.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaLabel {
    /// `Δ` is below an atlas bound: no non-semiexceptional semistable sheaf.
    BelowLowerBound,
    /// `Δ` is at or above every atlas bound; the atlas cannot decide.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaBounds {
    #[serde(serialize_with = "crate::rational::serde_q::serialize")]
    pub lower: Q,
    pub dlp: DlpBound,
    pub atlas_relative: bool,
    pub sharp: bool,
    /// An atlas character with total slope exactly `ν`, if any.
    pub exceptional_at_slope: Option<ChernCharacter>,
}

impl DeltaBounds {
    pub fn classify(&self, delta: &Q) -> DeltaLabel {
        if *delta < self.lower {
            DeltaLabel::BelowLowerBound
        } else {
            DeltaLabel::Undetermined
        }
    }
}

pub fn delta_bounds(
    nu: &DivisorClass,
    a: &Polarization,
    atlas: &Atlas,
    exec: Execution,
) -> Result<DeltaBounds> {
    let query = DlpQuery {
        nu: nu.clone(),
        polarization: a.clone(),
        rank_ceiling: None,
    };
    let dlp = dlp_sup(&query, atlas, exec)?;
    let half = frac(1, 2);
    let lower = match &dlp.value {
        Some(v) if *v > half => v.clone(),
        _ => half,
    };
    let exceptional_at_slope = window_characters(nu, a, atlas, None)?
        .into_iter()
        .find(|e| e.nu().map(|x| &x == nu).unwrap_or(false));
    Ok(DeltaBounds {
        lower,
        dlp,
        atlas_relative: true,
        sharp: false,
        exceptional_at_slope,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Clause {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongViolation {
    pub index: usize,
    pub candidate: ChernCharacter,
    pub clause: Clause,
    #[serde(serialize_with = "crate::rational::serde_q::serialize")]
    pub chi: Q,
}

/// Checks both clauses of the strong condition against `candidates`, which
/// stand in for the stable sheaves of smaller rank.
pub fn strong_dl_check(
    v: &ChernCharacter,
    candidates: &[ChernCharacter],
    a: &Polarization,
) -> Result<Vec<StrongViolation>> {
    let mu_v = slope_a(v, a)?;
    let w = -a.dot_canonical();
    let mut out = Vec::new();
    for (index, f) in candidates.iter().enumerate() {
        if f.r >= v.r {
            continue;
        }
        let d = slope_a(f, a)? - &mu_v;
        if !d.is_negative() && d <= w {
            let chi = euler_pairing(f, v)?;
            if chi.is_positive() {
                out.push(StrongViolation { index, candidate: f.clone(), clause: Clause::A, chi });
            }
        }
        if !d.is_positive() && d >= -&w {
            let chi = euler_pairing(v, f)?;
            if chi.is_positive() {
                out.push(StrongViolation { index, candidate: f.clone(), clause: Clause::B, chi });
            }
        }
    }
    Ok(out)
}

/// Window used for clause (b) of the weak condition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClauseBWindow {
    /// `μ_A(v) + A.K ≤ μ_A(F) ≤ μ_A(v)`, as in the strong condition.
    #[default]
    Mirrored,
    /// The same window as clause (a).
    Literal,
}

impl std::str::FromStr for ClauseBWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mirrored" => Ok(Self::Mirrored),
            "literal" => Ok(Self::Literal),
            _ => Err(Error::Parse(format!("unknown clause-b window `{s}`"))),
        }
    }
}

/// Window `lo ≤ μ_A(F) - μ_A(v) ≤ hi` with `lo, hi ∈ {-w, 0, w}`, `w = -A.K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SlopeWindow {
    Above,
    Below,
}

/// Polarization `ε` with `εᵢ > 0`, `Σεᵢ < 1` placing `μ_A(F) - μ_A(v)` in the
/// window, or `None`. `diff = ν(F) - ν(v)`.
fn feasible_polarization(diff: &DivisorClass, window: SlopeWindow) -> Option<Vec<Q>> {
    let m = diff.m();
    let alpha = diff.a();
    let beta = diff.b();
    // variables ε₁..εₘ, s; maximize s
    let var = |coeffs: Vec<Q>, s: Q| {
        let mut c = coeffs;
        c.push(s);
        c
    };
    let unit = |i: usize, x: Q| {
        let mut c = vec![Q::zero(); m];
        c[i] = x;
        c
    };
    let mut cons = Vec::new();
    for i in 0..m {
        cons.push(Constraint::new(var(unit(i, q(1)), q(-1)), Relation::Ge, Q::zero()));
    }
    cons.push(Constraint::new(var(vec![q(1); m], q(1)), Relation::Le, q(1)));
    // μ-difference is α - Σ εᵢβᵢ and w = 3 - Σ εᵢ
    match window {
        SlopeWindow::Above => {
            // α - Σεβ ≥ 0 and α - Σεβ ≤ 3 - Σε
            cons.push(Constraint::new(var(beta.to_vec(), Q::zero()), Relation::Le, alpha.clone()));
            cons.push(Constraint::new(
                var(beta.iter().map(|b| q(1) - b).collect(), Q::zero()),
                Relation::Le,
                q(3) - alpha,
            ));
        }
        SlopeWindow::Below => {
            // α - Σεβ ≤ 0 and α - Σεβ ≥ -3 + Σε
            cons.push(Constraint::new(
                var(beta.iter().map(|b| -b).collect(), Q::zero()),
                Relation::Le,
                -alpha,
            ));
            cons.push(Constraint::new(
                var(beta.iter().map(|b| q(1) + b).collect(), Q::zero()),
                Relation::Le,
                alpha + q(3),
            ));
        }
    }
    let mut objective = vec![Q::zero(); m];
    objective.push(q(1));
    match maximize(&objective, &cons) {
        LpOutcome::Optimal { value, x } if value.is_positive() => Some(x[..m].to_vec()),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeakViolation {
    pub exceptional: ChernCharacter,
    pub clause: Clause,
    #[serde(serialize_with = "crate::rational::serde_q::serialize")]
    pub chi: Q,
    /// A polarization realizing the slope window.
    #[serde(serialize_with = "crate::rational::serde_q_vec::serialize")]
    pub eps: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeakDlReport {
    pub holds: bool,
    pub violations: Vec<WeakViolation>,
    pub checked: usize,
    pub clause_b_window: ClauseBWindow,
}

/// Twists `t` for which `ν(F) + t(-K) - ν(v)` can land in a window of width
/// at most 3 around zero for some admissible polarization.
fn candidate_twists(diff: &DivisorClass) -> std::ops::RangeInclusive<i64> {
    let big = diff.b().iter().map(|b| b.abs()).max().unwrap_or_else(Q::zero);
    let reach = (diff.a().abs() + big) / q(2) + q(2);
    let r = reach.ceil().to_integer().to_i64().expect("small twist range");
    -r..=r
}

pub fn weak_dl_check(
    v: &ChernCharacter,
    atlas: &Atlas,
    clause_b: ClauseBWindow,
    exec: Execution,
) -> Result<WeakDlReport> {
    if v.m() != atlas.m {
        return Err(Error::DimensionMismatch {
            left: v.m(),
            right: atlas.m,
        });
    }
    let nu_v = v.nu()?;
    let records: Vec<&ChernCharacter> = atlas
        .records
        .iter()
        .map(|r| &r.ch)
        .filter(|f| f.r < v.r)
        .collect();
    let per_record = par::map(exec, &records, |f| -> Result<(usize, Vec<WeakViolation>)> {
        let base = &f.nu()? - &nu_v;
        let mut found = Vec::new();
        let mut checked = 0;
        for t in candidate_twists(&base) {
            let ft = f.twist_anticanonical(t);
            let diff = &ft.nu()? - &nu_v;
            checked += 1;
            let chi_a = euler_pairing(&ft, v)?;
            if chi_a.is_positive() {
                if let Some(eps) = feasible_polarization(&diff, SlopeWindow::Above) {
                    found.push(WeakViolation { exceptional: ft.clone(), clause: Clause::A, chi: chi_a, eps });
                }
            }
            let chi_b = euler_pairing(v, &ft)?;
            if chi_b.is_positive() {
                let window = match clause_b {
                    ClauseBWindow::Mirrored => SlopeWindow::Below,
                    ClauseBWindow::Literal => SlopeWindow::Above,
                };
                if let Some(eps) = feasible_polarization(&diff, window) {
                    found.push(WeakViolation { exceptional: ft, clause: Clause::B, chi: chi_b, eps });
                }
            }
        }
        Ok((checked, found))
    });
    let mut violations = Vec::new();
    let mut checked = 0;
    for r in per_record {
        let (c, found) = r?;
        checked += c;
        violations.extend(found);
    }
    Ok(WeakDlReport {
        holds: violations.is_empty(),
        violations,
        checked,
        clause_b_window: clause_b,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SlopeMembership {
    Member { witness: ChernCharacter },
    /// Excluded by integrality: an exceptional bundle of slope `p/q` on P²
    /// would have rank `q` and a non-integral Euler characteristic.
    NonMember,
    NonMemberUpToBound { rank_bound: i64 },
}

/// Whether `α` is the slope of an exceptional bundle on P², using an atlas
/// for `m = 0`. Line-bundle twists act on the set of slopes by integers.
pub fn exceptional_slope_membership(alpha: &Q, p2_atlas: &Atlas) -> Result<SlopeMembership> {
    if p2_atlas.m != 0 {
        return Err(Error::InvalidParameters("membership needs an atlas on P²".into()));
    }
    for rec in &p2_atlas.records {
        let slope = &rec.ch.c1.a().clone() / &rec.ch.r;
        let shift = alpha - &slope;
        if is_integer(&shift) {
            let d = DivisorClass::new(shift, Vec::new());
            return Ok(SlopeMembership::Member {
                witness: rec.ch.twist(&d)?,
            });
        }
    }
    let (p, qd) = (alpha.numer().clone(), alpha.denom().clone());
    let pq = Q::from_integer(p.clone());
    let qq = Q::from_integer(qd.clone());
    let ch2 = (&pq * &pq - &qq * &qq + q(1)) / (q(2) * &qq);
    if !is_integer(&(ch2 - &pq * &pq / q(2))) {
        return Ok(SlopeMembership::NonMember);
    }
    Ok(SlopeMembership::NonMemberUpToBound {
        rank_bound: p2_atlas.rank_bound(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ExistenceVerdict {
    Exists {
        reason: String,
        transfers_to_general_points: bool,
        provenance: Value,
    },
    HypothesisViolated {
        reasons: Vec<String>,
    },
    WeakDlViolated {
        witness: WeakViolation,
        provenance: Value,
    },
    Undecided {
        reason: String,
        witness: Option<ChernCharacter>,
        provenance: Value,
    },
}

impl ExistenceVerdict {
    pub fn code(&self) -> &'static str {
        match self {
            ExistenceVerdict::Exists { .. } => "exists",
            ExistenceVerdict::HypothesisViolated { .. } => "hypothesis-violated",
            ExistenceVerdict::WeakDlViolated { .. } => "weak-dl-violated",
            ExistenceVerdict::Undecided { .. } => "undecided",
        }
    }
}

/// Decides existence of `μ_A`-stable sheaves for small generic `A` via the
/// weak condition, for `ν = αH - Σβᵢ Eᵢ` with `-1 ≤ βᵢ ≤ 0`, `Δ ≥ 0` and `α`
/// not an exceptional slope on P².
pub fn exists_stable(
    v: &ChernCharacter,
    atlas: &Atlas,
    p2_atlas: &Atlas,
    clause_b: ClauseBWindow,
    exec: Execution,
) -> Result<ExistenceVerdict> {
    let provenance = json!({
        "atlas": atlas.provenance(),
        "p2_atlas": p2_atlas.provenance(),
        "clause_b_window": clause_b,
    });
    let mut reasons = Vec::new();
    if !v.is_integral() {
        reasons.push("character-not-integral".to_string());
    }
    let Some(r) = to_i64(&v.r).filter(|&r| r >= 1) else {
        reasons.push("rank-not-positive".to_string());
        return Ok(ExistenceVerdict::HypothesisViolated { reasons });
    };
    let nu = v.nu()?;
    for (i, b) in nu.b().iter().enumerate() {
        if *b < q(-1) || b.is_positive() {
            reasons.push(format!("beta-range: beta_{} = {} not in [-1, 0]", i + 1, fmt_q(b)));
        }
    }
    let delta = v.delta()?;
    if delta.is_negative() {
        reasons.push(format!("negative-discriminant: {}", fmt_q(&delta)));
    }
    if !reasons.is_empty() {
        return Ok(ExistenceVerdict::HypothesisViolated { reasons });
    }
    if r == 1 {
        return Ok(ExistenceVerdict::Exists {
            reason: "rank-one torsion-free sheaves I_Z(D) are stable".into(),
            transfers_to_general_points: true,
            provenance,
        });
    }
    match exceptional_slope_membership(nu.a(), p2_atlas)? {
        SlopeMembership::Member { witness } => {
            return Ok(ExistenceVerdict::Undecided {
                reason: "alpha-is-exceptional-slope".into(),
                witness: Some(witness),
                provenance,
            })
        }
        SlopeMembership::NonMemberUpToBound { .. } => {
            return Ok(ExistenceVerdict::Undecided {
                reason: "alpha-membership-beyond-bound".into(),
                witness: None,
                provenance,
            })
        }
        SlopeMembership::NonMember => {}
    }
    let report = weak_dl_check(v, atlas, clause_b, exec)?;
    if let Some(witness) = report.violations.into_iter().next() {
        return Ok(ExistenceVerdict::WeakDlViolated { witness, provenance });
    }
    Ok(ExistenceVerdict::Exists {
        reason: "weak-dl-condition-holds".into(),
        transfers_to_general_points: true,
        provenance,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionCandidate {
    pub parts: Vec<ChernCharacter>,
    pub polarization: Polarization,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionStatus {
    Pass,
    Fail,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HnReport {
    /// Statuses of conditions (1)–(5) in order.
    pub conditions: Vec<ConditionStatus>,
    pub failed: Vec<usize>,
    pub accepted: bool,
}

/// Checks a proposed Harder–Narasimhan type. `evidence[i]` is the caller's
/// knowledge of whether the moduli space of `wᵢ` is nonempty.
pub fn verify_hn_decomposition(
    v: &ChernCharacter,
    cand: &DecompositionCandidate,
    evidence: &[Option<bool>],
) -> Result<HnReport> {
    let scale = cand.polarization.integral_scale();
    verify_hn_decomposition_scaled(v, cand, evidence, &scale)
}

/// As [`verify_hn_decomposition`] with an explicit multiple of the
/// integral scale of `A`.
pub fn verify_hn_decomposition_scaled(
    v: &ChernCharacter,
    cand: &DecompositionCandidate,
    evidence: &[Option<bool>],
    scale: &Q,
) -> Result<HnReport> {
    let parts = &cand.parts;
    if parts.len() < 2 {
        return Err(Error::InvalidParameters("a decomposition needs at least two parts".into()));
    }
    if parts.iter().any(|w| !w.r.is_positive()) {
        return Err(Error::InvalidParameters("every part needs positive rank".into()));
    }
    let a = &cand.polarization;
    let status = |ok: bool| if ok { ConditionStatus::Pass } else { ConditionStatus::Fail };
    let sum = parts
        .iter()
        .fold(ChernCharacter::zero(v.m()), |acc, w| &acc + w);
    let c1 = status(&sum == v);
    let polys = parts
        .iter()
        .map(|w| reduced_hilbert_polynomial(w, a, scale))
        .collect::<Result<Vec<_>>>()?;
    let c2 = status(polys.windows(2).all(|p| p[0] > p[1]));
    let first = slope_a(&parts[0], a)?;
    let last = slope_a(parts.last().expect("nonempty"), a)?;
    let c3 = status(first - last <= q(1));
    let mut orth = true;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if !euler_pairing(&parts[i], &parts[j])?.is_zero() {
                orth = false;
            }
        }
    }
    let c4 = status(orth);
    let c5 = if evidence.len() == parts.len() && evidence.iter().all(|e| *e == Some(true)) {
        ConditionStatus::Pass
    } else if evidence.contains(&Some(false)) {
        ConditionStatus::Fail
    } else {
        ConditionStatus::Unknown
    };
    let conditions = vec![c1, c2, c3, c4, c5];
    let failed: Vec<usize> = conditions
        .iter()
        .enumerate()
        .filter(|(_, s)| **s == ConditionStatus::Fail)
        .map(|(i, _)| i + 1)
        .collect();
    let accepted = conditions.iter().all(|s| *s == ConditionStatus::Pass);
    Ok(HnReport {
        conditions,
        failed,
        accepted,
    })
}

/// Reading of the identity tested by [`special_case_search`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityMode {
    /// `1/r₀² = Σᵢ [xᵢʲ - (xᵢᵏ - xᵢʲ)²]` with `xᵢʲ = dᵢʲ/(Nⱼ r₀)`.
    #[default]
    Grouped,
    /// `1/r₀² = Σᵢ' xᵢ'ʲ - (xᵢᵏ - xᵢʲ)²` for every index `i`.
    Split,
    /// `χ(vₖ, vⱼ) = 0` evaluated directly on the characters.
    Pairing,
}

impl std::str::FromStr for IdentityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grouped" => Ok(Self::Grouped),
            "split" => Ok(Self::Split),
            "pairing" => Ok(Self::Pairing),
            _ => Err(Error::Parse(format!("unknown identity mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub max_parts: usize,
    pub max_nodes: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            max_parts: 6,
            max_nodes: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialPart {
    pub n: i64,
    pub d: Vec<i64>,
    pub character: ChernCharacter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SpecialCaseOutcome {
    StableWithinBounds { examined: usize },
    DecompositionFound { parts: Vec<SpecialPart>, examined: usize },
    Undecided { examined: usize, reason: String },
}

/// `ch(π*V^N) + Σ dᵢ·ch(O_{Eᵢ}(-1))`.
fn extension_character(pullback: &ChernCharacter, n: i64, d: &[i64]) -> ChernCharacter {
    let m = d.len();
    let mut out = pullback.scale(&q(n));
    for (i, &k) in d.iter().enumerate() {
        let torsion = ChernCharacter::new(Q::zero(), DivisorClass::e(m, i), frac(-1, 2));
        out = &out + &torsion.scale(&q(k));
    }
    out
}

fn compositions(n: i64, k: usize) -> Vec<Vec<i64>> {
    if k == 1 {
        return if n >= 1 { vec![vec![n]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n - (k as i64 - 1) {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Nonincreasing sequences of `k` nonnegative integers summing to `d`.
fn nonincreasing(d: i64, k: usize, cap: i64) -> Vec<Vec<i64>> {
    if k == 1 {
        return if d <= cap { vec![vec![d]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d.min(cap)).rev() {
        if first * k as i64 >= d {
            for mut rest in nonincreasing(d - first, k - 1, first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
    }
    out
}

fn identity_holds(
    mode: IdentityMode,
    r0: &Q,
    ns: &[i64],
    ds: &[Vec<i64>],
    chars: &[ChernCharacter],
) -> Result<bool> {
    let k_parts = ns.len();
    let m = ds.first().map_or(0, Vec::len);
    let x = |i: usize, j: usize| Q::from_integer(ds[j][i].into()) / (q(ns[j]) * r0);
    let target = (r0 * r0).recip();
    for k in 0..k_parts {
        for j in k + 1..k_parts {
            let ok = match mode {
                IdentityMode::Grouped => {
                    let s: Q = (0..m)
                        .map(|i| {
                            let diff = x(i, k) - x(i, j);
                            x(i, j) - &diff * &diff
                        })
                        .sum();
                    s == target
                }
                IdentityMode::Split => {
                    let first: Q = (0..m).map(|i| x(i, j)).sum();
                    m > 0
                        && (0..m).all(|i| {
                            let diff = x(i, k) - x(i, j);
                            &first - &diff * &diff == target
                        })
                }
                IdentityMode::Pairing => euler_pairing(&chars[k], &chars[j])?.is_zero(),
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Searches the decompositions of `0 → π*V^N → E → ⊕O_{Eᵢ}(-1)^{dᵢ} → 0`
/// into `k ≥ 2` extensions of the same shape whose parameters satisfy the
/// orthogonality identity.
pub fn special_case_search(
    v_p2: &ChernCharacter,
    m: usize,
    n: i64,
    d: &[i64],
    mode: IdentityMode,
    bounds: &SearchBounds,
) -> Result<SpecialCaseOutcome> {
    if v_p2.m() != 0 || !v_p2.is_exceptional() {
        return Err(Error::InvalidParameters("V must be an exceptional character on P²".into()));
    }
    if d.len() != m || n < 1 || d.iter().any(|&x| x < 0) {
        return Err(Error::InvalidParameters("need N ≥ 1 and m nonnegative multiplicities".into()));
    }
    let r0 = v_p2.r.clone();
    let pullback = ChernCharacter::new(
        r0.clone(),
        DivisorClass::new(v_p2.c1.a().clone(), vec![Q::zero(); m]),
        v_p2.ch2.clone(),
    );
    let mut examined = 0usize;
    let max_k = (n as usize).min(bounds.max_parts);
    for k in 2..=max_k {
        let per_index: Vec<Vec<Vec<i64>>> = d.iter().map(|&di| nonincreasing(di, k, di)).collect();
        for ns in compositions(n, k) {
            // odometer over the per-index distributions
            let mut idx = vec![0usize; m];
            if per_index.iter().any(Vec::is_empty) {
                continue;
            }
            loop {
                examined += 1;
                if examined > bounds.max_nodes {
                    return Ok(SpecialCaseOutcome::Undecided {
                        examined,
                        reason: "node-limit".into(),
                    });
                }
                // ds[j][i] = dᵢʲ
                let ds: Vec<Vec<i64>> = (0..k)
                    .map(|j| (0..m).map(|i| per_index[i][idx[i]][j]).collect())
                    .collect();
                let strict = (0..k - 1).all(|j| (0..m).any(|i| ds[j][i] > ds[j + 1][i]));
                if strict {
                    let chars: Vec<ChernCharacter> = (0..k)
                        .map(|j| extension_character(&pullback, ns[j], &ds[j]))
                        .collect();
                    if identity_holds(mode, &r0, &ns, &ds, &chars)? {
                        let parts = (0..k)
                            .map(|j| SpecialPart {
                                n: ns[j],
                                d: ds[j].clone(),
                                character: chars[j].clone(),
                            })
                            .collect();
                        return Ok(SpecialCaseOutcome::DecompositionFound { parts, examined });
                    }
                }
                let mut pos = 0;
                loop {
                    if pos == m {
                        break;
                    }
                    idx[pos] += 1;
                    if idx[pos] < per_index[pos].len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == m {
                    break;
                }
            }
        }
    }
    if (n as usize) > bounds.max_parts {
        return Ok(SpecialCaseOutcome::Undecided {
            examined,
            reason: "part-limit".into(),
        });
    }
    Ok(SpecialCaseOutcome::StableWithinBounds { examined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exceptional::{enumerate_constructible, EnumerationConfig};

    fn ch(s: &str) -> ChernCharacter {
        s.parse().unwrap()
    }

    fn atlas(m: usize, r: i64, depth: usize) -> Atlas {
        enumerate_constructible(m, &EnumerationConfig::new(r, depth), Execution::Sequential).unwrap()
    }

    #[test]
    fn dlp_at_own_slope() {
        let a = Polarization::generic_small(0);
        let t = ch("2|3;|3/2");
        assert_eq!(dlp_ae(&a, &t, &t.nu().unwrap()).unwrap(), frac(5, 8));
        let a1 = Polarization::generic_small(2);
        let o = ChernCharacter::structure_sheaf(2);
        let minus_h = DivisorClass::h(2).scale(&q(-1));
        assert_eq!(dlp_ae(&a1, &o, &minus_h).unwrap(), q(0));
        let far = DivisorClass::h(2).scale(&q(5));
        assert!(matches!(dlp_ae(&a1, &o, &far), Err(Error::OutOfWindow { .. })));
    }

    #[test]
    fn dlp_branch_symmetry() {
        let a = Polarization::generic_small(1);
        let e = ChernCharacter::line_bundle(&DivisorClass::from_ints(1, &[1]));
        let nu = DivisorClass::new(frac(3, 2), vec![frac(1, 2)]);
        let d = a.slope_of(&(&nu - &e.nu().unwrap())).unwrap();
        assert!(d.is_positive());
        let expect = hilbert_poly_p(&(&e.nu().unwrap() - &nu)) - e.delta().unwrap();
        assert_eq!(dlp_ae(&a, &e, &nu).unwrap(), expect);
    }

    #[test]
    fn sup_and_delta_bounds() {
        let at = atlas(1, 10, 3);
        let a = Polarization::generic_small(1);
        let t = at.records.iter().find(|r| r.rank() == 2).unwrap().ch.clone();
        let q0 = DlpQuery { nu: t.nu().unwrap(), polarization: a.clone(), rank_ceiling: None };
        let b = dlp_sup(&q0, &at, Execution::Sequential).unwrap();
        assert!(b.value.unwrap() >= frac(5, 8));
        let db = delta_bounds(&t.nu().unwrap(), &a, &at, Execution::Sequential).unwrap();
        assert!(db.lower >= frac(5, 8));
        assert!(db.exceptional_at_slope.is_some());
        assert_eq!(db.classify(&frac(1, 2)), DeltaLabel::BelowLowerBound);
    }

    #[test]
    fn strong_condition_examples() {
        let a = Polarization::generic_small(1);
        let v = ch("3|0;0|-3");
        assert!(strong_dl_check(&v, &[], &a).unwrap().is_empty());
        // w = O, v = 2w modified upwards so that χ(w, v) > 0
        let w = ChernCharacter::structure_sheaf(1);
        let v = ChernCharacter::new(q(3), DivisorClass::zero(1), q(1));
        let viol = strong_dl_check(&v, std::slice::from_ref(&w), &a).unwrap();
        assert!(viol.iter().any(|x| x.clause == Clause::A));
        // far away candidates are ignored
        let far = ChernCharacter::line_bundle(&DivisorClass::from_ints(20, &[0]));
        assert!(strong_dl_check(&v, &[far], &a).unwrap().is_empty());
    }

    #[test]
    fn window_feasibility_is_closed() {
        // μ-difference exactly 3 - Σε is attainable only in the limit of
        // ε → 0 together with α = 3: the boundary point itself is allowed.
        let diff = DivisorClass::new(q(3), vec![q(1)]);
        // α - εβ = 3 - ε equals w = 3 - ε for every ε
        assert!(feasible_polarization(&diff, SlopeWindow::Above).is_some());
        let diff = DivisorClass::new(q(4), vec![q(0)]);
        assert!(feasible_polarization(&diff, SlopeWindow::Above).is_none());
        assert!(feasible_polarization(&DivisorClass::zero(2), SlopeWindow::Below).is_some());
    }

    #[test]
    fn membership() {
        let p2 = atlas(0, 50, 8);
        for alpha in [q(0), q(7), q(-3)] {
            assert!(matches!(
                exceptional_slope_membership(&alpha, &p2).unwrap(),
                SlopeMembership::Member { .. }
            ));
        }
        match exceptional_slope_membership(&frac(3, 2), &p2).unwrap() {
            SlopeMembership::Member { witness } => assert_eq!(witness, ch("2|3;|3/2")),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            exceptional_slope_membership(&frac(1, 3), &p2).unwrap(),
            SlopeMembership::NonMember
        );
        assert!(matches!(
            exceptional_slope_membership(&frac(2, 5), &p2).unwrap(),
            SlopeMembership::Member { .. }
        ));
    }

    #[test]
    fn existence_pipeline() {
        let at = atlas(2, 10, 4);
        let p2 = atlas(0, 50, 8);
        let e = Execution::Sequential;
        let v = ChernCharacter::new(q(2), DivisorClass::from_ints(3, &[0, 0]), frac(-3, 2));
        assert_eq!(v.delta().unwrap(), frac(15, 8));
        assert_eq!(
            exists_stable(&v, &at, &p2, ClauseBWindow::Mirrored, e).unwrap().code(),
            "undecided"
        );
        let bad = ChernCharacter::new(q(2), DivisorClass::from_ints(0, &[-4, 0]), q(-10));
        assert_eq!(
            exists_stable(&bad, &at, &p2, ClauseBWindow::Mirrored, e).unwrap().code(),
            "hypothesis-violated"
        );
        let good = ChernCharacter::new(q(3), DivisorClass::from_ints(1, &[0, 0]), frac(-19, 2));
        assert_eq!(
            exists_stable(&good, &at, &p2, ClauseBWindow::Mirrored, e).unwrap().code(),
            "exists"
        );
    }

    #[test]
    fn hn_examples() {
        let a = Polarization::generic_small(1);
        let w = ch("1|0;0|0");
        let v = w.scale(&q(2));
        let cand = DecompositionCandidate { parts: vec![w.clone(), w.clone()], polarization: a.clone() };
        let rep = verify_hn_decomposition(&v, &cand, &[]).unwrap();
        assert!(rep.failed.contains(&2));
        let hi = ChernCharacter::line_bundle(&DivisorClass::from_ints(2, &[0]));
        let cand = DecompositionCandidate { parts: vec![hi.clone(), w.clone()], polarization: a.clone() };
        let rep = verify_hn_decomposition(&(&hi + &w), &cand, &[]).unwrap();
        assert!(rep.failed.contains(&3));
        // O(E₁) then O: χ(O(E₁), O) = χ(O(-E₁)) = 0
        let w1 = ChernCharacter::line_bundle(&DivisorClass::e(1, 0));
        let cand = DecompositionCandidate { parts: vec![w1.clone(), w.clone()], polarization: a };
        let rep = verify_hn_decomposition(&(&w1 + &w), &cand, &[Some(true), Some(true)]).unwrap();
        assert_eq!(rep.conditions[3], ConditionStatus::Pass);
        assert!(rep.accepted);
    }

    #[test]
    fn special_case_examples() {
        let o = ChernCharacter::structure_sheaf(0);
        let b = SearchBounds::default();
        let mode = IdentityMode::Grouped;
        assert!(matches!(
            special_case_search(&o, 1, 1, &[3], mode, &b).unwrap(),
            SpecialCaseOutcome::StableWithinBounds { .. }
        ));
        assert!(matches!(
            special_case_search(&o, 2, 3, &[0, 0], mode, &b).unwrap(),
            SpecialCaseOutcome::StableWithinBounds { .. }
        ));
        assert!(matches!(
            special_case_search(&o, 1, 2, &[1], mode, &b).unwrap(),
            SpecialCaseOutcome::StableWithinBounds { examined: 1 }
        ));
        // the direct pairing finds O(E₁) ⊕ O
        assert!(matches!(
            special_case_search(&o, 1, 2, &[1], IdentityMode::Pairing, &b).unwrap(),
            SpecialCaseOutcome::DecompositionFound { .. }
        ));
    }

    #[test]
    fn composition_helpers() {
        assert_eq!(compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(nonincreasing(2, 2, 2), vec![vec![2, 0], vec![1, 1]]);
        assert_eq!(nonincreasing(0, 3, 0), vec![vec![0, 0, 0]]);
    }
}
