mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use blowup_core::cache::{self, CachedAtlas, CACHE_ENV};
use blowup_core::characters::{euler_char, euler_pairing};
use blowup_core::cohomology::cohomology_vector;
use blowup_core::exceptional::{EnumerationConfig, DEFAULT_DEPTH_BOUND, DEFAULT_RANK_BOUND};
use blowup_core::existence::{
    self, ClauseBWindow, DecompositionCandidate, DlpQuery, ExistenceVerdict, IdentityMode,
    SearchBounds, SpecialCaseOutcome,
};
use blowup_core::hilbert::{self, HilbDivisor, KVeryAmple};
use blowup_core::prioritary::{good_bundle, resolution, weak_bn_classify};
use blowup_core::rational::{fmt_q, parse_q, q_to_value, Q};
use blowup_core::{par, ChernCharacter, DivisorClass, Error, Execution, Polarization};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_UNDECIDED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "blowup", version, about = "Chern-character computations on blow-ups of P² at collinear points")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Global {
    /// Number of blown-up points; inputs on another surface are rejected.
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true)]
    rank_bound: Option<i64>,
    #[arg(long, global = true)]
    depth_bound: Option<usize>,
    /// Cache directory, or a `.jsonl` file. Defaults to $BLOWUP_ATLAS_CACHE.
    #[arg(long, global = true)]
    atlas_cache: Option<PathBuf>,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Reading of the orthogonality identity: grouped, split or pairing.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Window for clause (b) of the weak condition: mirrored or literal.
    #[arg(long, global = true)]
    clause_b: Option<String>,
    /// Also use orthogonal swaps when enumerating exceptional characters.
    #[arg(long, global = true)]
    swaps: bool,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// sequential or parallel.
    #[arg(long, global = true)]
    exec: Option<String>,
    /// File of key=value lines; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Euler characteristic χ(v), or χ(v, w) with --pair-with.
    Chi {
        #[arg(long = "char")]
        ch: String,
        #[arg(long)]
        pair_with: Option<String>,
    },
    /// Both Euler pairings χ(u, w) and χ(w, u).
    Pair {
        #[arg(long = "char")]
        ch: String,
        #[arg(long)]
        with: String,
    },
    /// Cohomology of a line bundle.
    Cohomology {
        #[arg(long = "div")]
        div: String,
    },
    /// Direct sum of line bundles of minimal discriminant.
    GoodBundle {
        #[arg(long)]
        rank: i64,
        #[arg(long)]
        c1: String,
    },
    /// Resolution of the general prioritary sheaf.
    Resolution {
        #[arg(long = "char")]
        ch: String,
    },
    /// Weak Brill–Noether classification.
    WeakBn {
        #[arg(long = "char")]
        ch: String,
    },
    /// Enumerate constructible exceptional characters.
    Atlas,
    /// Supremum of the DLP functions over the atlas.
    Dlp {
        #[arg(long)]
        nu: String,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        rank_ceiling: Option<i64>,
    },
    /// Atlas lower bound on the discriminant at a total slope.
    Delta {
        #[arg(long)]
        nu: String,
        #[arg(long)]
        eps: Option<String>,
        /// Classify this discriminant against the bound.
        #[arg(long = "delta")]
        value: Option<String>,
    },
    /// Weak Drézet–Le Potier condition.
    WeakDl {
        #[arg(long = "char")]
        ch: String,
    },
    /// Existence of stable sheaves for small generic polarizations.
    Exists {
        #[arg(long = "char")]
        ch: String,
    },
    /// Check a proposed Harder–Narasimhan type.
    VerifyHn {
        #[arg(long = "char")]
        ch: String,
        /// One factor, repeated in order of decreasing slope.
        #[arg(long = "part", required = true)]
        parts: Vec<String>,
        #[arg(long)]
        eps: Option<String>,
        /// Comma-separated true/false/unknown per factor.
        #[arg(long)]
        evidence: Option<String>,
        /// Multiple of the integral scale of the polarization.
        #[arg(long)]
        scale: Option<String>,
    },
    /// Decompositions of extensions of a pulled-back exceptional bundle.
    SpecialCase {
        /// Exceptional character on P².
        #[arg(long = "char")]
        ch: String,
        #[arg(long)]
        n: i64,
        /// Comma-separated multiplicities d₁,...,dₘ.
        #[arg(long)]
        d: String,
        #[arg(long)]
        max_parts: Option<usize>,
        #[arg(long)]
        max_nodes: Option<usize>,
    },
    /// Nef test on the Hilbert scheme of points.
    HilbNef {
        #[arg(long)]
        class: String,
    },
    /// Decomposition of a nef class into the nef generators.
    HilbDecompose {
        #[arg(long)]
        class: String,
    },
    /// Certificate of k-very-ampleness.
    Kva {
        #[arg(long = "div")]
        div: String,
        #[arg(long)]
        k: u32,
    },
    /// Ampleness check of -K - Δ for the log Fano boundary.
    LogFano {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        eps: String,
    },
    /// (μ_A, Δ) points of the atlas lower bound, for plotting.
    MuDeltaPlot {
        #[arg(long)]
        eps: Option<String>,
        /// Fixed exceptional coefficients β of ν = αH - ΣβᵢEᵢ.
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, default_value = "-3")]
        from: String,
        #[arg(long, default_value = "3")]
        to: String,
        #[arg(long, default_value_t = 24)]
        samples: usize,
        /// Sample α at random (seeded by --seed) instead of on a grid.
        #[arg(long)]
        random: bool,
    },
}

enum Format {
    Json,
    Csv,
}

struct Settings {
    m: Option<usize>,
    rank_bound: i64,
    depth_bound: usize,
    cache: Option<PathBuf>,
    format: Format,
    seed: u64,
    mode: IdentityMode,
    clause_b: ClauseBWindow,
    swaps: bool,
    threads: Option<usize>,
    exec: Execution,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(msg) => Failure::Usage(msg),
            other => Failure::Domain(other),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn pick<T: FromStr>(
    flag: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Outcome<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.get(key) {
        Some(s) => s
            .parse()
            .map_err(|_| usage(format!("config: bad value `{s}` for {key}"))),
        None => Ok(default),
    }
}

fn flag_bool(flag: bool, file: &BTreeMap<String, String>, key: &str) -> Outcome<bool> {
    if flag {
        return Ok(true);
    }
    pick(None, file, key, false)
}

fn settings(g: &Global) -> Outcome<Settings> {
    let file = match &g.config {
        Some(p) => config::load(p).map_err(usage)?,
        None => BTreeMap::new(),
    };
    let m = match g.m {
        Some(m) => Some(m),
        None => file
            .get("m")
            .map(|s| s.parse().map_err(|_| usage(format!("config: bad m `{s}`"))))
            .transpose()?,
    };
    let format = if g.csv {
        Format::Csv
    } else if g.json {
        Format::Json
    } else {
        match file.get("format").map(String::as_str) {
            None | Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some(other) => return Err(usage(format!("config: unknown format `{other}`"))),
        }
    };
    let cache = g
        .atlas_cache
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .or_else(|| file.get("atlas-cache").map(PathBuf::from));
    let mode: String = pick(g.mode.clone(), &file, "mode", "grouped".into())?;
    let clause_b: String = pick(g.clause_b.clone(), &file, "clause-b", "mirrored".into())?;
    let exec: String = pick(g.exec.clone(), &file, "exec", "parallel".into())?;
    let threads = match g.threads {
        Some(t) => Some(t),
        None => file
            .get("threads")
            .map(|s| s.parse().map_err(|_| usage(format!("config: bad threads `{s}`"))))
            .transpose()?,
    };
    Ok(Settings {
        m,
        rank_bound: pick(g.rank_bound, &file, "rank-bound", DEFAULT_RANK_BOUND)?,
        depth_bound: pick(g.depth_bound, &file, "depth-bound", DEFAULT_DEPTH_BOUND)?,
        cache,
        format,
        seed: pick(g.seed, &file, "seed", 0)?,
        mode: mode.parse().map_err(|e: Error| usage(e.to_string()))?,
        clause_b: clause_b.parse().map_err(|e: Error| usage(e.to_string()))?,
        swaps: flag_bool(g.swaps, &file, "swaps")?,
        threads,
        exec: exec.parse().map_err(|e: Error| usage(e.to_string()))?,
    })
}

impl Settings {
    fn check_m(&self, found: usize) -> Outcome<()> {
        match self.m {
            Some(m) if m != found => Err(Failure::Domain(Error::DimensionMismatch {
                left: m,
                right: found,
            })),
            _ => Ok(()),
        }
    }

    fn surface(&self, found: Option<usize>) -> usize {
        found.or(self.m).unwrap_or(0)
    }

    fn character(&self, s: &str) -> Outcome<ChernCharacter> {
        let v: ChernCharacter = s.parse()?;
        self.check_m(v.m())?;
        Ok(v)
    }

    fn divisor(&self, s: &str) -> Outcome<DivisorClass> {
        let d: DivisorClass = s.parse()?;
        self.check_m(d.m())?;
        Ok(d)
    }

    fn polarization(&self, eps: Option<&str>, m: usize) -> Outcome<Polarization> {
        let a = match eps {
            Some(s) if !s.trim().is_empty() => s.parse::<Polarization>()?,
            _ => Polarization::generic_small(m),
        };
        if a.m() != m {
            return Err(Failure::Domain(Error::DimensionMismatch {
                left: a.m(),
                right: m,
            }));
        }
        Ok(a)
    }

    fn enumeration(&self) -> EnumerationConfig {
        let mut c = EnumerationConfig::new(self.rank_bound, self.depth_bound);
        c.orthogonal_swaps = self.swaps;
        c
    }

    fn atlas(&self, m: usize) -> Outcome<CachedAtlas> {
        let cached = cache::load_or_build(self.cache.as_deref(), m, &self.enumeration(), self.exec)?;
        if let Some(w) = cached.warning() {
            eprintln!("warning: {w}");
        }
        Ok(cached)
    }
}

fn provenance(c: &CachedAtlas) -> Value {
    let mut p = c.atlas.provenance();
    p["sha256"] = json!(c.sha256);
    p["orthogonal_swaps"] = json!(c.atlas.config.orthogonal_swaps);
    p
}

struct Report {
    json: Value,
    /// Header and rows, for commands with a natural table form.
    table: Option<(Vec<String>, Vec<Vec<String>>)>,
    /// Raw text printed instead of `json` in JSON mode.
    raw: Option<String>,
    code: u8,
}

impl Report {
    fn new(json: Value) -> Self {
        Self {
            json,
            table: None,
            raw: None,
            code: 0,
        }
    }
}

fn csv_cell(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn render(report: &Report, format: &Format) -> String {
    match format {
        Format::Json => match &report.raw {
            Some(raw) => raw.clone(),
            None => format!("{}\n", report.json),
        },
        Format::Csv => {
            let (header, rows) = match &report.table {
                Some(t) => t.clone(),
                None => match &report.json {
                    Value::Object(map) => (
                        map.keys().cloned().collect(),
                        vec![map.values().map(csv_cell).collect()],
                    ),
                    other => (vec!["value".into()], vec![vec![csv_cell(other)]]),
                },
            };
            let mut out = header.join(",");
            out.push('\n');
            for row in rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn q_list(s: &str) -> Outcome<Vec<Q>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(s.split(',').map(parse_q).collect::<Result<Vec<_>, _>>()?)
}

fn run(cmd: &Command, st: &Settings) -> Outcome<Report> {
    match cmd {
        Command::Chi { ch, pair_with } => {
            let v = st.character(ch)?;
            let x = match pair_with {
                Some(w) => euler_pairing(&v, &st.character(w)?)?,
                None => euler_char(&v),
            };
            Ok(Report::new(q_to_value(&x)))
        }
        Command::Pair { ch, with } => {
            let u = st.character(ch)?;
            let w = st.character(with)?;
            Ok(Report::new(json!({
                "chi_uw": q_to_value(&euler_pairing(&u, &w)?),
                "chi_wu": q_to_value(&euler_pairing(&w, &u)?),
            })))
        }
        Command::Cohomology { div } => {
            let d = st.divisor(div)?;
            Ok(Report::new(to_value(&cohomology_vector(&d)?)))
        }
        Command::GoodBundle { rank, c1 } => {
            let c1 = st.divisor(c1)?;
            let g = good_bundle(*rank, &c1)?;
            let summands: Vec<String> = g
                .summands
                .iter()
                .map(|d| (d + &g.shift).to_string())
                .collect();
            let rows = summands.iter().map(|s| vec![csv_cell(&json!(s))]).collect();
            let mut report = Report::new(json!({
                "summands": summands,
                "character": g.twisted_character(),
                "discriminant": fmt_q(&g.discriminant()),
            }));
            report.table = Some((vec!["summand".into()], rows));
            Ok(report)
        }
        Command::Resolution { ch } => {
            let v = st.character(ch)?;
            let res = resolution(&v)?;
            let rows = res
                .terms()
                .iter()
                .map(|(sign, d, k)| vec![sign.to_string(), csv_cell(&json!(d.to_string())), k.to_string()])
                .collect();
            let mut report = Report::new(to_value(&res));
            report.table = Some((vec!["side".into(), "class".into(), "exponent".into()], rows));
            Ok(report)
        }
        Command::WeakBn { ch } => {
            let v = st.character(ch)?;
            Ok(Report::new(to_value(&weak_bn_classify(&v)?)))
        }
        Command::Atlas => {
            let cached = st.atlas(st.surface(None))?;
            let atlas = &cached.atlas;
            let mut header: Vec<String> = vec!["rank".into(), "c1".into(), "ch2".into(), "depth".into(), "history".into()];
            header.insert(0, "slot".into());
            let rows = atlas
                .records
                .iter()
                .map(|r| {
                    let hist: Vec<String> = r.history.iter().map(ToString::to_string).collect();
                    vec![
                        r.slot.to_string(),
                        r.rank().to_string(),
                        csv_cell(&json!(r.ch.c1.to_string())),
                        fmt_q(&r.ch.ch2),
                        r.depth.to_string(),
                        hist.join(" "),
                    ]
                })
                .collect();
            let mut report = Report::new(provenance(&cached));
            report.raw = Some(atlas.to_jsonl());
            report.table = Some((header, rows));
            Ok(report)
        }
        Command::Dlp { nu, eps, rank_ceiling } => {
            let nu = st.divisor(nu)?;
            let m = st.surface(Some(nu.m()));
            let a = st.polarization(eps.as_deref(), m)?;
            let cached = st.atlas(m)?;
            let query = DlpQuery {
                nu,
                polarization: a.clone(),
                rank_ceiling: *rank_ceiling,
            };
            let bound = existence::dlp_sup(&query, &cached.atlas, st.exec)?;
            let mut j = to_value(&bound);
            j["polarization"] = json!(a.to_string());
            j["provenance"] = provenance(&cached);
            Ok(Report::new(j))
        }
        Command::Delta { nu, eps, value } => {
            let nu = st.divisor(nu)?;
            let m = st.surface(Some(nu.m()));
            let a = st.polarization(eps.as_deref(), m)?;
            let cached = st.atlas(m)?;
            let b = existence::delta_bounds(&nu, &a, &cached.atlas, st.exec)?;
            let mut j = to_value(&b);
            if let Some(d) = value {
                j["label"] = to_value(&b.classify(&parse_q(d)?));
            }
            j["polarization"] = json!(a.to_string());
            j["provenance"] = provenance(&cached);
            Ok(Report::new(j))
        }
        Command::WeakDl { ch } => {
            let v = st.character(ch)?;
            let cached = st.atlas(v.m())?;
            let rep = existence::weak_dl_check(&v, &cached.atlas, st.clause_b, st.exec)?;
            let mut j = to_value(&rep);
            j["provenance"] = provenance(&cached);
            Ok(Report::new(j))
        }
        Command::Exists { ch } => {
            let v = st.character(ch)?;
            let cached = st.atlas(v.m())?;
            let p2 = st.atlas(0)?;
            let verdict = existence::exists_stable(&v, &cached.atlas, &p2.atlas, st.clause_b, st.exec)?;
            let code = match verdict {
                ExistenceVerdict::HypothesisViolated { .. } => EXIT_DOMAIN,
                ExistenceVerdict::Undecided { .. } => EXIT_UNDECIDED,
                _ => 0,
            };
            let mut j = to_value(&verdict);
            if let Some(obj) = j.get_mut("provenance") {
                obj["atlas"]["sha256"] = json!(cached.sha256);
                obj["p2_atlas"]["sha256"] = json!(p2.sha256);
            }
            let mut report = Report::new(j);
            report.code = code;
            Ok(report)
        }
        Command::VerifyHn { ch, parts, eps, evidence, scale } => {
            let v = st.character(ch)?;
            let parts = parts
                .iter()
                .map(|p| st.character(p))
                .collect::<Outcome<Vec<_>>>()?;
            let a = st.polarization(eps.as_deref(), v.m())?;
            let evidence = match evidence {
                Some(s) => s
                    .split(',')
                    .map(|e| match e.trim() {
                        "true" | "yes" => Ok(Some(true)),
                        "false" | "no" => Ok(Some(false)),
                        "unknown" | "" => Ok(None),
                        other => Err(usage(format!("bad evidence `{other}`"))),
                    })
                    .collect::<Outcome<Vec<_>>>()?,
                None => Vec::new(),
            };
            let cand = DecompositionCandidate {
                parts,
                polarization: a.clone(),
            };
            let rep = match scale {
                Some(k) => {
                    let s = a.integral_scale() * parse_q(k)?;
                    existence::verify_hn_decomposition_scaled(&v, &cand, &evidence, &s)?
                }
                None => existence::verify_hn_decomposition(&v, &cand, &evidence)?,
            };
            let mut j = to_value(&rep);
            j["polarization"] = json!(a.to_string());
            Ok(Report::new(j))
        }
        Command::SpecialCase { ch, n, d, max_parts, max_nodes } => {
            let v: ChernCharacter = ch.parse()?;
            let d: Vec<i64> = d
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse().map_err(|_| usage(format!("bad multiplicity `{s}`"))))
                .collect::<Outcome<Vec<_>>>()?;
            st.check_m(d.len())?;
            let defaults = SearchBounds::default();
            let bounds = SearchBounds {
                max_parts: max_parts.unwrap_or(defaults.max_parts),
                max_nodes: max_nodes.unwrap_or(defaults.max_nodes),
            };
            let out = existence::special_case_search(&v, d.len(), *n, &d, st.mode, &bounds)?;
            let code = match out {
                SpecialCaseOutcome::Undecided { .. } => EXIT_UNDECIDED,
                _ => 0,
            };
            let mut j = to_value(&out);
            j["mode"] = to_value(&st.mode);
            j["bounds"] = to_value(&bounds);
            let mut report = Report::new(j);
            report.code = code;
            Ok(report)
        }
        Command::HilbNef { class } => {
            let d: HilbDivisor = class.parse()?;
            st.check_m(d.m())?;
            let margins: Vec<Value> = hilbert::nef_margins(&d).iter().map(q_to_value).collect();
            Ok(Report::new(json!({
                "class": d.to_string(),
                "nef": hilbert::is_nef_hilb(&d),
                "margins": margins,
            })))
        }
        Command::HilbDecompose { class } => {
            let d: HilbDivisor = class.parse()?;
            st.check_m(d.m())?;
            let dec = hilbert::nef_decomposition(&d)?;
            let mut j = to_value(&dec);
            j["class"] = json!(d.to_string());
            Ok(Report::new(j))
        }
        Command::Kva { div, k } => {
            let l = st.divisor(div)?;
            let cert = hilbert::k_very_ample_certificate(&l, *k)?;
            let code = match cert {
                KVeryAmple::Unknown { .. } => EXIT_UNDECIDED,
                _ => 0,
            };
            let mut report = Report::new(to_value(&cert));
            report.code = code;
            Ok(report)
        }
        Command::LogFano { n, delta, eps } => {
            let m = st.surface(None);
            let w = hilbert::log_fano_witness(*n, m, &parse_q(delta)?, &parse_q(eps)?)?;
            let margins: Vec<Value> = w.margins.iter().map(q_to_value).collect();
            Ok(Report::new(json!({
                "class": w.class.to_string(),
                "margins": margins,
            })))
        }
        Command::MuDeltaPlot { eps, beta, from, to, samples, random } => {
            let beta = match beta {
                Some(b) => q_list(b)?,
                None => vec![Q::from_integer(0.into()); st.surface(None)],
            };
            let m = beta.len();
            st.check_m(m)?;
            let a = st.polarization(eps.as_deref(), m)?;
            let (lo, hi) = (parse_q(from)?, parse_q(to)?);
            if hi <= lo || *samples == 0 {
                return Err(usage("need from < to and at least one sample"));
            }
            let alphas = plot_abscissae(&lo, &hi, *samples, random.then_some(st.seed));
            let cached = st.atlas(m)?;
            let nus: Vec<DivisorClass> = alphas
                .iter()
                .map(|x| DivisorClass::new(x.clone(), beta.clone()))
                .collect();
            let bounds = par::map(st.exec, &nus, |nu| {
                existence::delta_bounds(nu, &a, &cached.atlas, Execution::Sequential)
            });
            let mut rows = Vec::new();
            for (nu, b) in nus.iter().zip(bounds) {
                let b = b?;
                let mu = a.slope_of(nu)?;
                let dlp = b.dlp.value.as_ref().map(fmt_q).unwrap_or_else(|| "-inf".into());
                rows.push(vec![fmt_q(&mu), fmt_q(&b.lower), dlp]);
            }
            let header = vec!["mu".to_string(), "delta_lower".into(), "dlp".into()];
            let j = json!({
                "polarization": a.to_string(),
                "points": rows.iter().map(|r| json!({"mu": r[0], "delta_lower": r[1], "dlp": r[2]})).collect::<Vec<_>>(),
                "provenance": provenance(&cached),
            });
            let mut report = Report::new(j);
            report.table = Some((header, rows));
            Ok(report)
        }
    }
}

/// Grid points, or seeded random rationals with denominator 64.
fn plot_abscissae(lo: &Q, hi: &Q, samples: usize, seed: Option<u64>) -> Vec<Q> {
    use rand::{Rng, SeedableRng};
    let width = hi - lo;
    match seed {
        None => (0..=samples)
            .map(|k| lo + &width * Q::new((k as i64).into(), (samples as i64).into()))
            .collect(),
        Some(seed) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut xs: Vec<Q> = (0..samples)
                .map(|_| lo + &width * Q::new(rng.gen_range(0..=64i64).into(), 64.into()))
                .collect();
            xs.sort();
            xs
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let st = match settings(&cli.global) {
        Ok(s) => s,
        Err(f) => return fail(f),
    };
    let go = || run(&cli.command, &st);
    let result = match st.threads {
        Some(n) => par::with_threads(n, go),
        None => go(),
    };
    match result {
        Ok(report) => {
            print!("{}", render(&report, &st.format));
            ExitCode::from(report.code)
        }
        Err(f) => fail(f),
    }
}

fn fail(f: Failure) -> ExitCode {
    match f {
        Failure::Usage(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Failure::Domain(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}
