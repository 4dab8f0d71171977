//! Exceptional characters obtained by mutating the standard helix.
//!
//! The search runs over helix windows: `m + 3` consecutive members
//! `(E₀, …, Eₙ)` of a helix with `E_{j+n+1} = E_j(-K)`. Mutating the pair at
//! position `i < n` replaces `(Eᵢ, Eᵢ₊₁)`; position `n` is the pair
//! `(Eₙ, E₀(-K))` across the period. Windows are stored up to shifting the
//! helix, and every exceptional character up to twisting by `-K`.
//!
//! The hot loop works on integer data `[r, a, b₁..bₘ, 2·ch2]`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::characters::{euler_pairing, pushforward_character, ChernCharacter};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::picard::DivisorClass;
use crate::rational::{fmt_q, frac, q, to_i64, Q};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_RANK_BOUND: i64 = 50;
pub const DEFAULT_DEPTH_BOUND: usize = 8;
pub const DEFAULT_MAX_WINDOWS: usize = 4_000_000;

/// `L_u w = χ(u,w)·u - w`.
pub fn mutate_left(u: &ChernCharacter, w: &ChernCharacter) -> Result<ChernCharacter> {
    let c = euler_pairing(u, w)?;
    Ok(&u.scale(&c) - w)
}

/// `R_w u = χ(u,w)·w - u`.
pub fn mutate_right(u: &ChernCharacter, w: &ChernCharacter) -> Result<ChernCharacter> {
    let c = euler_pairing(u, w)?;
    Ok(&w.scale(&c) - u)
}

/// `χ(v, v) = 1` with positive rank.
pub fn is_exceptional_char(v: &ChernCharacter) -> bool {
    v.is_exceptional()
}

/// `gcd(r, a, b₁, …, bₘ) = 1`.
pub fn is_primitive(v: &ChernCharacter) -> bool {
    let Some(r) = to_i64(&v.r) else { return false };
    let Some((a, b)) = v.c1.to_ints() else { return false };
    b.iter().fold(r.gcd(&a), |g, x| g.gcd(x)) == 1
}

/// `Δ = 1/2 - 1/(2r²)`.
pub fn has_exceptional_discriminant(v: &ChernCharacter) -> bool {
    match v.delta() {
        Ok(d) => d == frac(1, 2) - (q(2) * &v.r * &v.r).recip(),
        Err(_) => false,
    }
}

/// Integer character `[r, a, b₁..bₘ, s]` with `s = 2·ch2`.
pub type IntChar = Vec<i64>;

pub fn to_int_char(v: &ChernCharacter) -> Option<IntChar> {
    let mut out = vec![to_i64(&v.r)?];
    let (a, b) = v.c1.to_ints()?;
    out.push(a);
    out.extend(b);
    out.push(to_i64(&(&v.ch2 * q(2)))?);
    Some(out)
}

pub fn from_int_char(x: &[i64]) -> ChernCharacter {
    let m = x.len() - 3;
    ChernCharacter::new(
        q(x[0]),
        DivisorClass::from_ints(x[1], &x[2..2 + m]),
        frac(x[m + 2], 2),
    )
}

/// `χ(u, v)` for integer characters, or `None` on overflow or a half-integer.
fn chi_int(u: &[i64], v: &[i64]) -> Option<i64> {
    let m = u.len() - 3;
    let (ru, rv) = (u[0] as i128, v[0] as i128);
    let (au, av) = (u[1] as i128, v[1] as i128);
    let (su, sv) = (u[m + 2] as i128, v[m + 2] as i128);
    let mut cross_k = 3 * (ru * av - rv * au);
    let mut dot = au * av;
    for i in 0..m {
        let (bu, bv) = (u[2 + i] as i128, v[2 + i] as i128);
        cross_k -= ru * bv - rv * bu;
        dot -= bu * bv;
    }
    let twice = 2 * ru * rv + cross_k + ru * sv + rv * su - 2 * dot;
    if twice % 2 != 0 {
        return None;
    }
    i64::try_from(twice / 2).ok()
}

/// `c·u - w`, checked.
fn combine(c: i64, u: &[i64], w: &[i64]) -> Option<IntChar> {
    u.iter()
        .zip(w)
        .map(|(&x, &y)| c.checked_mul(x)?.checked_sub(y))
        .collect()
}

/// Twist by `t·(-K)`; `-K = 3H - ΣEᵢ` is `(3; 1, …, 1)`.
fn twist_anticanonical(x: &[i64], t: i64) -> Option<IntChar> {
    let m = x.len() - 3;
    let (r, a) = (x[0], x[1]);
    let sum_b: i64 = x[2..2 + m].iter().sum();
    let mut out = x.to_vec();
    out[1] = a.checked_add(3 * r * t)?;
    for i in 0..m {
        out[2 + i] = x[2 + i].checked_add(r * t)?;
    }
    // s' = s + 2t(3a - Σb) + r t² (9 - m)
    let ds = 2 * t as i128 * (3 * a as i128 - sum_b as i128)
        + r as i128 * (t as i128) * (t as i128) * (9 - m as i128);
    out[m + 2] = i64::try_from(x[m + 2] as i128 + ds).ok()?;
    Some(out)
}

/// Number of `-K` twists taking the `H`-slope into `(-3, 0]`.
fn orbit_shift(x: &[i64]) -> i64 {
    Integer::div_floor(&-x[1], &(3 * x[0]))
}

/// The representative of `x` modulo `-K` twists with `H`-slope in `(-3, 0]`.
pub fn orbit_representative(x: &[i64]) -> IntChar {
    twist_anticanonical(x, orbit_shift(x)).expect("representative fits")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum HistoryStep {
    Left { pair: usize },
    Right { pair: usize },
    /// Exchange of a completely orthogonal pair.
    Swap { pair: usize },
    /// Relabel the window as `(E_k, …, E_{k+n})`.
    HelixTwist { shift: i64 },
}

impl HistoryStep {
    fn is_mutation(&self) -> bool {
        !matches!(self, HistoryStep::HelixTwist { .. })
    }
}

/// A helix window of `n + 1 = m + 3` integer characters, stored flat.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Window {
    m: usize,
    data: Vec<i64>,
}

impl Window {
    pub fn standard(m: usize) -> Self {
        let mut members: Vec<DivisorClass> =
            vec![DivisorClass::h(m).scale(&q(-2)), DivisorClass::h(m).scale(&q(-1))];
        members.extend((0..m).map(|i| DivisorClass::e(m, i).scale(&q(-1))));
        members.push(DivisorClass::zero(m));
        let mut data = Vec::new();
        for d in &members {
            data.extend(to_int_char(&ChernCharacter::line_bundle(d)).expect("integral"));
        }
        Self { m, data }
    }

    fn stride(&self) -> usize {
        self.m + 3
    }

    pub fn len(&self) -> usize {
        self.m + 3
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn member(&self, j: usize) -> &[i64] {
        let s = self.stride();
        &self.data[j * s..(j + 1) * s]
    }

    fn set_member(&mut self, j: usize, x: &[i64]) {
        let s = self.stride();
        self.data[j * s..(j + 1) * s].copy_from_slice(x);
    }

    pub fn characters(&self) -> Vec<ChernCharacter> {
        (0..self.len()).map(|j| from_int_char(self.member(j))).collect()
    }

    /// `E_j` for any integer `j`.
    fn helix_member(&self, j: i64) -> Option<IntChar> {
        let len = self.len() as i64;
        let (t, idx) = j.div_mod_floor(&len);
        twist_anticanonical(self.member(idx as usize), t)
    }

    pub fn shifted(&self, k: i64) -> Option<Self> {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.len() as i64 {
            data.extend(self.helix_member(j + k)?);
        }
        Some(Self { m: self.m, data })
    }

    /// The lexicographically least shift whose first member has `H`-slope in
    /// `(-3, 0]`, together with the shift used.
    pub fn canonical(&self) -> Option<(Self, i64)> {
        let len = self.len() as i64;
        let mut best: Option<(Self, i64)> = None;
        for rho in 0..len {
            let first = self.helix_member(rho)?;
            let k = rho + orbit_shift(&first) * len;
            let cand = self.shifted(k)?;
            if best.as_ref().is_none_or(|(b, _)| cand.data < b.data) {
                best = Some((cand, k));
            }
        }
        best
    }

    /// Applies one mutation step; `None` if it is not admissible.
    pub fn mutate(&self, step: HistoryStep, rank_bound: i64) -> Option<(Self, IntChar)> {
        let n = self.len() - 1;
        let (i, kind) = match step {
            HistoryStep::Left { pair } => (pair, 0),
            HistoryStep::Right { pair } => (pair, 1),
            HistoryStep::Swap { pair } => (pair, 2),
            HistoryStep::HelixTwist { shift } => {
                let w = self.shifted(shift)?;
                let x = w.member(0).to_vec();
                return Some((w, x));
            }
        };
        if i > n {
            return None;
        }
        let u = self.member(i).to_vec();
        let w = if i < n {
            self.member(i + 1).to_vec()
        } else {
            twist_anticanonical(self.member(0), 1)?
        };
        let c = chi_int(&u, &w)?;
        // new pair (first, second) replacing (u, w)
        let (first, second, fresh) = match kind {
            0 if c > 0 => {
                let x = combine(c, &u, &w)?;
                (x.clone(), u, x)
            }
            1 if c > 0 => {
                let x = combine(c, &w, &u)?;
                (w, x.clone(), x)
            }
            2 if c == 0 && chi_int(&w, &u)? == 0 => (w.clone(), u, w),
            _ => return None,
        };
        if fresh[0] < 1 || fresh[0] > rank_bound || chi_int(&fresh, &fresh)? != 1 {
            return None;
        }
        let mut out = self.clone();
        out.set_member(i, &first);
        if i < n {
            out.set_member(i + 1, &second);
        } else {
            out.set_member(0, &twist_anticanonical(&second, -1)?);
        }
        Some((out, fresh))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalRecord {
    /// The `-K`-orbit representative, with `H`-slope in `(-3, 0]`.
    pub ch: ChernCharacter,
    pub depth: usize,
    /// Steps from the standard window; the character (up to a `-K` twist)
    /// sits at `slot` of the resulting window.
    pub history: Vec<HistoryStep>,
    pub slot: usize,
}

impl ExceptionalRecord {
    pub fn rank(&self) -> i64 {
        to_i64(&self.ch.r).expect("integral rank")
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.ch.to_json();
        let obj = v.as_object_mut().expect("object");
        obj.insert("depth".into(), json!(self.depth));
        obj.insert("slot".into(), json!(self.slot));
        obj.insert("history".into(), serde_json::to_value(&self.history).expect("history"));
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |w: &str| Error::Parse(format!("atlas record: {w}"));
        let ch = ChernCharacter::from_json(v)?;
        let depth = v
            .get("depth")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing depth"))? as usize;
        let slot = v
            .get("slot")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing slot"))? as usize;
        let history = serde_json::from_value(v.get("history").cloned().unwrap_or(Value::Null))
            .map_err(|e| bad(&e.to_string()))?;
        Ok(Self {
            ch,
            depth,
            history,
            slot,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationConfig {
    pub rank_bound: i64,
    pub depth_bound: usize,
    pub max_windows: usize,
    /// Also exchange adjacent pairs with `χ(u,w) = χ(w,u) = 0`.
    pub orthogonal_swaps: bool,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self {
            rank_bound: DEFAULT_RANK_BOUND,
            depth_bound: DEFAULT_DEPTH_BOUND,
            max_windows: DEFAULT_MAX_WINDOWS,
            orthogonal_swaps: false,
        }
    }
}

impl EnumerationConfig {
    pub fn new(rank_bound: i64, depth_bound: usize) -> Self {
        Self {
            rank_bound,
            depth_bound,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atlas {
    pub m: usize,
    pub config: EnumerationConfig,
    pub truncated: bool,
    pub windows: usize,
    pub records: Vec<ExceptionalRecord>,
    index: HashMap<ChernCharacter, usize>,
}

struct Node {
    window: Window,
    history: Vec<HistoryStep>,
}

fn steps_for(n: usize, swaps: bool) -> Vec<HistoryStep> {
    let mut out = Vec::new();
    for pair in 0..=n {
        out.push(HistoryStep::Left { pair });
        out.push(HistoryStep::Right { pair });
        if swaps {
            out.push(HistoryStep::Swap { pair });
        }
    }
    out
}

/// Breadth-first closure of the standard helix under mutations.
pub fn enumerate_constructible(m: usize, config: &EnumerationConfig, exec: Execution) -> Result<Atlas> {
    if config.rank_bound < 1 {
        return Err(Error::InvalidParameters("rank bound must be at least 1".into()));
    }
    let start = Window::standard(m);
    let (canon, k) = start.canonical().expect("standard window fits");
    let mut atlas = Atlas::empty(m, config.clone());
    let first_history = if k == 0 {
        Vec::new()
    } else {
        vec![HistoryStep::HelixTwist { shift: k }]
    };
    for slot in 0..canon.len() {
        atlas.insert_member(&canon, slot, &first_history);
    }
    let mut seen: HashSet<Window> = HashSet::new();
    seen.insert(canon.clone());
    let mut frontier = vec![Node {
        window: canon,
        history: first_history,
    }];
    let steps = steps_for(m + 2, config.orthogonal_swaps);
    let rank_bound = config.rank_bound;

    'depth: for _ in 0..config.depth_bound {
        let children: Vec<(usize, HistoryStep, Window, i64, IntChar)> =
            par::flat_map(exec, &(0..frontier.len()).collect::<Vec<_>>(), |&p| {
                let w = &frontier[p].window;
                steps
                    .iter()
                    .filter_map(|&step| {
                        let (next, fresh) = w.mutate(step, rank_bound)?;
                        let (canon, k) = next.canonical()?;
                        Some((p, step, canon, k, fresh))
                    })
                    .collect()
            });
        let mut next = Vec::new();
        for (p, step, window, k, fresh) in children {
            if seen.contains(&window) {
                continue;
            }
            if seen.len() >= config.max_windows {
                atlas.truncated = true;
                break 'depth;
            }
            seen.insert(window.clone());
            let mut history = frontier[p].history.clone();
            history.push(step);
            if k != 0 {
                history.push(HistoryStep::HelixTwist { shift: k });
            }
            let rep = orbit_representative(&fresh);
            let slot = (0..window.len())
                .find(|&j| orbit_representative(window.member(j)) == rep)
                .expect("mutated member present");
            atlas.insert_member(&window, slot, &history);
            next.push(Node { window, history });
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    atlas.windows = seen.len();
    Ok(atlas)
}

/// Replays a history from the standard window.
pub fn replay(m: usize, history: &[HistoryStep], rank_bound: i64) -> Option<Window> {
    history.iter().try_fold(Window::standard(m), |w, &step| {
        w.mutate(step, rank_bound).map(|(next, _)| next)
    })
}

impl Atlas {
    fn empty(m: usize, config: EnumerationConfig) -> Self {
        Self {
            m,
            config,
            truncated: false,
            windows: 0,
            records: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn from_parts(
        m: usize,
        config: EnumerationConfig,
        truncated: bool,
        windows: usize,
        records: Vec<ExceptionalRecord>,
    ) -> Self {
        let index = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.ch.clone(), i))
            .collect();
        Self {
            m,
            config,
            truncated,
            windows,
            records,
            index,
        }
    }

    fn insert_member(&mut self, window: &Window, slot: usize, history: &[HistoryStep]) {
        let ch = from_int_char(&orbit_representative(window.member(slot)));
        if self.index.contains_key(&ch) {
            return;
        }
        self.index.insert(ch.clone(), self.records.len());
        self.records.push(ExceptionalRecord {
            ch,
            depth: history.iter().filter(|s| s.is_mutation()).count(),
            history: history.to_vec(),
            slot,
        });
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn rank_bound(&self) -> i64 {
        self.config.rank_bound
    }

    pub fn depth_bound(&self) -> usize {
        self.config.depth_bound
    }

    /// Looks up a character up to `-K` twists.
    pub fn find(&self, v: &ChernCharacter) -> Option<&ExceptionalRecord> {
        let x = to_int_char(v)?;
        if x[0] < 1 {
            return None;
        }
        let rep = from_int_char(&orbit_representative(&x));
        self.index.get(&rep).map(|&i| &self.records[i])
    }

    pub fn contains(&self, v: &ChernCharacter) -> bool {
        self.find(v).is_some()
    }

    /// Provenance fields describing the enumeration.
    pub fn provenance(&self) -> Value {
        json!({
            "m": self.m,
            "rank_bound": self.config.rank_bound,
            "depth_bound": self.config.depth_bound,
            "truncated": self.truncated,
            "records": self.records.len(),
        })
    }

    pub fn header_json(&self) -> Value {
        json!({
            "format_version": FORMAT_VERSION,
            "m": self.m,
            "rank_bound": self.config.rank_bound,
            "depth_bound": self.config.depth_bound,
            "max_windows": self.config.max_windows,
            "orthogonal_swaps": self.config.orthogonal_swaps,
            "truncated": self.truncated,
            "windows": self.windows,
        })
    }

    /// JSON-lines: a header line followed by one record per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = self.header_json().to_string();
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.to_json().to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let bad = |w: String| Error::Cache(w);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Value = serde_json::from_str(lines.next().ok_or_else(|| bad("empty file".into()))?)
            .map_err(|e| bad(format!("header: {e}")))?;
        let field = |k: &str| {
            header
                .get(k)
                .cloned()
                .ok_or_else(|| bad(format!("header lacks `{k}`")))
        };
        let version = field("format_version")?.as_u64().unwrap_or(0);
        if version != FORMAT_VERSION as u64 {
            return Err(bad(format!("format version {version} is not {FORMAT_VERSION}")));
        }
        let num = |k: &str| -> Result<i64> {
            field(k)?
                .as_i64()
                .ok_or_else(|| bad(format!("`{k}` is not an integer")))
        };
        let flag = |k: &str| -> Result<bool> {
            field(k)?
                .as_bool()
                .ok_or_else(|| bad(format!("`{k}` is not a boolean")))
        };
        let m = num("m")? as usize;
        let config = EnumerationConfig {
            rank_bound: num("rank_bound")?,
            depth_bound: num("depth_bound")? as usize,
            max_windows: num("max_windows")? as usize,
            orthogonal_swaps: flag("orthogonal_swaps")?,
        };
        let truncated = flag("truncated")?;
        let windows = num("windows")? as usize;
        let mut records = Vec::new();
        for (i, line) in lines.enumerate() {
            let v: Value =
                serde_json::from_str(line).map_err(|e| bad(format!("record {}: {e}", i + 1)))?;
            let rec = ExceptionalRecord::from_json(&v).map_err(|e| bad(format!("record {}: {e}", i + 1)))?;
            if rec.ch.m() != m || !rec.ch.is_exceptional() {
                return Err(bad(format!("record {} is not an exceptional character on X_{m}", i + 1)));
            }
            records.push(rec);
        }
        Ok(Self::from_parts(m, config, truncated, windows, records))
    }

    /// All `-K` twists `v(t·(-K))` of records with `t` in the given range.
    pub fn twists(&self, t_range: std::ops::RangeInclusive<i64>) -> Vec<(usize, i64, ChernCharacter)> {
        let mut out = Vec::new();
        for (i, rec) in self.records.iter().enumerate() {
            for t in t_range.clone() {
                out.push((i, t, rec.ch.twist_anticanonical(t)));
            }
        }
        out
    }
}

/// Outcome of the stability check for a constructible exceptional record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub stable_for_generic_small_polarization: bool,
    pub reason: String,
    /// `Eᵢ` twist making the restriction balanced, as `(0; -k₁, …, -kₘ)`.
    #[serde(serialize_with = "crate::rational::serialize_display")]
    pub balancing_twist: DivisorClass,
    pub pushforward: Option<ChernCharacter>,
    /// Number of copies when the pushforward is `k` copies of an exceptional
    /// character on P².
    pub pushforward_multiplicity: Option<i64>,
}

pub fn is_stable_constructible(rec: &ExceptionalRecord) -> Result<StabilityVerdict> {
    let v = &rec.ch;
    let x = to_int_char(v).ok_or_else(|| Error::NotIntegral(v.to_string()))?;
    let m = v.m();
    let r = x[0];
    if r < 1 {
        return Err(Error::RankTooSmall {
            required: 1,
            found: r.to_string(),
        });
    }
    // twisting by kEᵢ lowers bᵢ by k·r
    let ks: Vec<i64> = x[2..2 + m].iter().map(|&b| Integer::div_ceil(&b, &r)).collect();
    let twist = DivisorClass::from_ints(0, &ks.iter().map(|&k| -k).collect::<Vec<_>>());
    let balanced = v.twist(&twist)?;
    let push = pushforward_character(&balanced)?;
    let multiplicity = semi_exceptional_multiplicity(&push);
    Ok(StabilityVerdict {
        stable_for_generic_small_polarization: true,
        reason: "constructible exceptional bundles are slope-stable for every polarization \
                 H - Σ εᵢEᵢ with small generic εᵢ > 0"
            .into(),
        balancing_twist: twist,
        pushforward: Some(push),
        pushforward_multiplicity: multiplicity,
    })
}

/// `k` if `v = k·e` for an exceptional `e`.
pub fn semi_exceptional_multiplicity(v: &ChernCharacter) -> Option<i64> {
    let x = to_int_char(v)?;
    let g = x[..x.len() - 1].iter().fold(0i64, |g, y| g.gcd(y));
    (1..=g).filter(|k| g % k == 0).find(|&k| {
        let e = v.scale(&Q::new(1.into(), k.into()));
        e.is_integral() && e.is_exceptional()
    })
}

impl fmt::Display for HistoryStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistoryStep::Left { pair } => write!(f, "L{pair}"),
            HistoryStep::Right { pair } => write!(f, "R{pair}"),
            HistoryStep::Swap { pair } => write!(f, "S{pair}"),
            HistoryStep::HelixTwist { shift } => write!(f, "T{shift}"),
        }
    }
}

impl FromStr for HistoryStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid history step `{s}`"));
        let (op, rest) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        match op {
            "L" => Ok(HistoryStep::Left { pair: rest.parse().map_err(|_| bad())? }),
            "R" => Ok(HistoryStep::Right { pair: rest.parse().map_err(|_| bad())? }),
            "S" => Ok(HistoryStep::Swap { pair: rest.parse().map_err(|_| bad())? }),
            "T" => Ok(HistoryStep::HelixTwist { shift: rest.parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }
}

/// `Δ` and `χ(v,v)` laws for an atlas record.
pub fn record_violations(rec: &ExceptionalRecord) -> Vec<&'static str> {
    let mut out = Vec::new();
    let v = &rec.ch;
    if !euler_pairing(v, v).map(|c| c.is_one()).unwrap_or(false) {
        out.push("chi(v,v) != 1");
    }
    if !has_exceptional_discriminant(v) {
        out.push("discriminant");
    }
    if !is_primitive(v) {
        out.push("primitivity");
    }
    if v.r < q(1) {
        out.push("rank");
    }
    out
}

pub fn describe(v: &ChernCharacter) -> String {
    format!(
        "r={} c1={} ch2={}",
        fmt_q(&v.r),
        v.c1,
        fmt_q(&v.ch2)
    )
}

#[allow(dead_code)]
fn is_zero_char(x: &[i64]) -> bool {
    x.iter().all(Zero::is_zero)
}
