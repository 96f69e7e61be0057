//! `khinlab`: batch front-end over the exact-arithmetic library.
//!
//! Every run prints a provenance header line (a `#`-prefixed comment) before
//! any data, so output files are self-describing. Exit codes: 0 on success,
//! 1 when a lemma audit is falsified (hypothesis satisfied, conclusion not
//! verified), 2 on usage or input errors.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use khinlab_core::psi::{constant_psi, normalize, power_psi, table_from_csv, PsiFunction};
use khinlab_core::rational::{decimal_approx, fmt_rational, parse_rational, Rational};
use khinlab_core::sets::{
    measure_closed_form, measure_oracle, member, pair_intersection_measure, SetDescriptor,
    Variant, DEFAULT_MEASURE_CAP,
};
use khinlab_core::target::Target;
use khinlab_core::util::par_map_ordered;
use khinlab_core::verify::{
    divisor_identity, key_disjointness, overlap_ratio, quasi_independence_ratio,
    restricted_divisor_bound, verify_basic_size, EulerProductMode, LemmaReport,
};
use khinlab_core::montecarlo::{dyadic_hit_profile, sample, tail_hit_fraction};
use num_traits::One;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_GRID: u64 = 1 << 32;

/// Print one output line; a closed pipe (e.g. `| head`) ends the run quietly.
fn out(line: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if writeln!(stdout, "{line}").is_err() {
        std::process::exit(0);
    }
}

#[derive(Parser)]
#[command(name = "khinlab", version, about = "exact measure audits for inhomogeneous approximation sets on the 2-torus")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    output: OutputFormat,

    /// Append a k-digit decimal approximation column to rational outputs.
    #[arg(long, global = true, value_name = "K")]
    decimal: Option<u32>,

    /// Suppress the timestamp field so identical runs are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,

    /// Worker pool size for per-q scans; output ordering never depends on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Full,
    Tilde,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Full => Variant::Full,
            VariantArg::Tilde => Variant::Tilde,
        }
    }
}

impl VariantArg {
    fn name(self) -> &'static str {
        match self {
            VariantArg::Full => "full",
            VariantArg::Tilde => "tilde",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum LemmaArg {
    BasicSize,
    Overlap,
    Key,
    DivisorIdentity,
    DivisorBound,
    Ratio,
}

/// Flags shared by every subcommand that needs the target data (y, delta).
#[derive(Args)]
struct TargetArgs {
    /// Shift y as "n1/d1,n2/d2".
    #[arg(long, default_value = "0,0")]
    y: String,

    /// Decay exponent delta as "p/s" (positive rational).
    #[arg(long, default_value = "1")]
    delta: String,
}

impl TargetArgs {
    fn build(&self) -> Result<Target, String> {
        let y = parse_point(&self.y)?;
        let delta = parse_rational(&self.delta).map_err(|e| format!("--delta: {e}"))?;
        Target::new(y, delta).map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Lebesgue measure of one approximation set.
    Measure {
        #[arg(long)]
        q: u64,
        /// Psi spec: "num/den", "power:c,delta[,grid]", "minpower:c,delta[,grid]", or "table:PATH".
        #[arg(long)]
        psi: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Full)]
        variant: VariantArg,
        #[command(flatten)]
        target: TargetArgs,
        /// Cross-check the closed form against residue enumeration.
        #[arg(long)]
        oracle: bool,
        /// Enumeration cap for --oracle.
        #[arg(long, default_value_t = DEFAULT_MEASURE_CAP)]
        cap: u64,
    },
    /// Exact measure of the intersection of two approximation sets.
    Intersect {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        psi: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Tilde)]
        variant_q: VariantArg,
        #[arg(long, value_enum, default_value_t = VariantArg::Tilde)]
        variant_r: VariantArg,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, default_value_t = DEFAULT_MEASURE_CAP)]
        cap: u64,
    },
    /// Exact membership test of a point in one approximation set.
    Member {
        /// Point as "x1,x2" with rational coordinates.
        #[arg(long)]
        x: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        psi: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Full)]
        variant: VariantArg,
        #[command(flatten)]
        target: TargetArgs,
    },
    /// Canonical Dirichlet approximant(s) of the target.
    Approximant {
        #[arg(long, conflicts_with = "q_max")]
        q: Option<u64>,
        #[arg(long)]
        q_max: Option<u64>,
        #[command(flatten)]
        target: TargetArgs,
    },
    /// Audit one lemma; exits 1 if any audited instance is falsified.
    VerifyLemma {
        #[arg(long, value_enum)]
        id: LemmaArg,
        #[arg(long, conflicts_with = "q_max")]
        q: Option<u64>,
        #[arg(long)]
        q_max: Option<u64>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        psi: Option<String>,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, default_value_t = DEFAULT_MEASURE_CAP)]
        cap: u64,
        /// Self-test: drop the "p does not divide b" condition from the
        /// Euler product of the basic-size closed form. The audit must then
        /// fail with exit code 1.
        #[arg(long)]
        corrupt_euler_product: bool,
    },
    /// Chung-Erdos quasi-independence ratio R(Q) over the reduced sets.
    Ratio {
        #[arg(long)]
        q_max: u64,
        #[arg(long)]
        psi: String,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, default_value_t = DEFAULT_MEASURE_CAP)]
        cap: u64,
    },
    /// Monte Carlo tail-hit fraction: share of random points landing in some
    /// A_q with q in [Q0, Q1].
    EstimateLimsup {
        #[arg(long, default_value_t = 1)]
        q0: u64,
        #[arg(long)]
        q1: u64,
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        psi: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Full)]
        variant: VariantArg,
        /// Shorthand for --variant tilde.
        #[arg(long, conflicts_with = "variant")]
        tilde: bool,
        #[command(flatten)]
        target: TargetArgs,
        /// Instead of one window, report per-window fractions over the dyadic
        /// windows [2^k, 2^(k+1)) for k = 0..=KMAX.
        #[arg(long, value_name = "KMAX")]
        dyadic: Option<u32>,
    },
}

fn parse_point(s: &str) -> Result<(Rational, Rational), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated rationals, got {s:?}"))?;
    Ok((
        parse_rational(a.trim()).map_err(|e| e.to_string())?,
        parse_rational(b.trim()).map_err(|e| e.to_string())?,
    ))
}

/// Psi specs: a bare rational is a constant function; "power:c,delta[,grid]"
/// is the grid-rounded c q^-delta; "minpower:..." additionally clamps at 1/2;
/// "table:PATH" loads an explicit two-column CSV table.
fn parse_psi(spec: &str) -> Result<PsiFunction, String> {
    if let Some(rest) = spec.strip_prefix("table:") {
        let text = std::fs::read_to_string(rest)
            .map_err(|e| format!("psi table {rest:?}: {e}"))?;
        return table_from_csv(&text).map_err(|e| e.to_string());
    }
    let power = |rest: &str, clamp: bool| -> Result<PsiFunction, String> {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(format!("expected power:c,delta[,grid], got {spec:?}"));
        }
        let c = parse_rational(parts[0].trim()).map_err(|e| e.to_string())?;
        let delta = parse_rational(parts[1].trim()).map_err(|e| e.to_string())?;
        let grid = match parts.get(2) {
            Some(g) => g.trim().parse::<u64>().map_err(|e| format!("grid: {e}"))?,
            None => DEFAULT_GRID,
        };
        let f = power_psi(c, delta, grid).map_err(|e| e.to_string())?;
        if clamp {
            normalize(f, Rational::one()).map_err(|e| e.to_string())
        } else {
            Ok(f)
        }
    };
    if let Some(rest) = spec.strip_prefix("power:") {
        return power(rest, false);
    }
    if let Some(rest) = spec.strip_prefix("minpower:") {
        return power(rest, true);
    }
    Ok(constant_psi(
        parse_rational(spec).map_err(|e| e.to_string())?,
    ))
}

/// One output table: fixed column set, one row per record.
struct Emitter {
    format: OutputFormat,
    decimal: Option<u32>,
    columns: &'static [&'static str],
    /// Column indices holding rationals, eligible for the --decimal column.
    rational_cols: &'static [usize],
    header_written: bool,
}

impl Emitter {
    fn new(
        format: OutputFormat,
        decimal: Option<u32>,
        columns: &'static [&'static str],
        rational_cols: &'static [usize],
    ) -> Self {
        Emitter {
            format,
            decimal,
            columns,
            rational_cols,
            header_written: false,
        }
    }

    fn row(&mut self, values: &[String]) {
        assert_eq!(values.len(), self.columns.len(), "column count mismatch");
        match self.format {
            OutputFormat::Csv => {
                if !self.header_written {
                    let mut header = self.columns.join(",");
                    if self.decimal.is_some() {
                        for &i in self.rational_cols {
                            let _ = write!(header, ",{}_dec", self.columns[i]);
                        }
                    }
                    out(&header);
                    self.header_written = true;
                }
                let mut line = values.join(",");
                if let Some(k) = self.decimal {
                    for &i in self.rational_cols {
                        let dec = parse_rational(&values[i])
                            .map(|r| decimal_approx(&r, k))
                            .unwrap_or_default();
                        let _ = write!(line, ",{dec}");
                    }
                }
                out(&line);
            }
            OutputFormat::Json => {
                let mut obj = serde_json::Map::new();
                for (name, value) in self.columns.iter().zip(values) {
                    obj.insert((*name).into(), serde_json::Value::String(value.clone()));
                }
                if let Some(k) = self.decimal {
                    for &i in self.rational_cols {
                        if let Ok(r) = parse_rational(&values[i]) {
                            obj.insert(
                                format!("{}_dec", self.columns[i]),
                                serde_json::Value::String(decimal_approx(&r, k)),
                            );
                        }
                    }
                }
                out(&serde_json::Value::Object(obj).to_string());
            }
        }
    }
}

fn provenance_header(deterministic: bool) {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut line = format!("# khinlab {VERSION} | args: {}", args.join(" "));
    if !deterministic {
        let ts = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let _ = write!(line, " | timestamp: {ts}");
    }
    out(&line);
}

fn descriptor(
    q: u64,
    psi: &PsiFunction,
    variant: VariantArg,
    target: &Target,
) -> Result<SetDescriptor, String> {
    let psi_q = psi.eval(q);
    let y = target.y().clone();
    match Variant::from(variant) {
        Variant::Full => SetDescriptor::full(q, psi_q, y).map_err(|e| e.to_string()),
        Variant::Tilde => {
            let ap = target.approximant(q).map_err(|e| e.to_string())?;
            SetDescriptor::tilde(q, psi_q, y, ap).map_err(|e| e.to_string())
        }
    }
}

fn report_row(rep: &LemmaReport) -> Vec<String> {
    let flat = |m: &std::collections::BTreeMap<String, String>| {
        m.iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    };
    vec![
        rep.lemma_id.as_str().into(),
        flat(&rep.parameters),
        rep.hypothesis_satisfied.to_string(),
        rep.conclusion_verified.to_string(),
        rep.witness.clone().unwrap_or_default(),
        flat(&rep.computed_values),
    ]
}

const REPORT_COLUMNS: &[&str] = &[
    "lemma",
    "parameters",
    "hypothesis_satisfied",
    "conclusion_verified",
    "witness",
    "computed_values",
];

fn q_range(q: Option<u64>, q_max: Option<u64>) -> Result<Vec<u64>, String> {
    match (q, q_max) {
        (Some(q), None) => Ok(vec![q]),
        (None, Some(m)) => Ok((1..=m).collect()),
        _ => Err("exactly one of --q and --q-max is required".into()),
    }
}

/// Runs one subcommand. `Ok(true)` means every audited conclusion held;
/// `Ok(false)` is a falsification.
fn run(cli: &Cli) -> Result<bool, String> {
    let fmt = cli.output;
    let dec = cli.decimal;
    match &cli.cmd {
        Cmd::Measure {
            q,
            psi,
            variant,
            target,
            oracle,
            cap,
        } => {
            let psi = parse_psi(psi)?;
            let target = target.build()?;
            let d = descriptor(*q, &psi, *variant, &target)?;
            let closed = measure_closed_form(&d).map_err(|e| e.to_string())?;
            if *oracle {
                let enumerated = measure_oracle(&d, *cap).map_err(|e| e.to_string())?;
                let mut em = Emitter::new(
                    fmt,
                    dec,
                    &["q", "variant", "measure", "oracle", "ok"],
                    &[2, 3],
                );
                let ok = closed == enumerated;
                em.row(&[
                    q.to_string(),
                    variant.name().into(),
                    fmt_rational(&closed),
                    fmt_rational(&enumerated),
                    ok.to_string(),
                ]);
                Ok(ok)
            } else {
                let mut em = Emitter::new(fmt, dec, &["q", "variant", "measure"], &[2]);
                em.row(&[q.to_string(), variant.name().into(), fmt_rational(&closed)]);
                Ok(true)
            }
        }
        Cmd::Intersect {
            q,
            r,
            psi,
            variant_q,
            variant_r,
            target,
            cap,
        } => {
            let psi = parse_psi(psi)?;
            let target = target.build()?;
            let dq = descriptor(*q, &psi, *variant_q, &target)?;
            let dr = descriptor(*r, &psi, *variant_r, &target)?;
            let m = pair_intersection_measure(&dq, &dr, *cap).map_err(|e| e.to_string())?;
            let mut em = Emitter::new(
                fmt,
                dec,
                &["q", "r", "variant_q", "variant_r", "measure"],
                &[4],
            );
            em.row(&[
                q.to_string(),
                r.to_string(),
                variant_q.name().into(),
                variant_r.name().into(),
                fmt_rational(&m),
            ]);
            Ok(true)
        }
        Cmd::Member {
            x,
            q,
            psi,
            variant,
            target,
        } => {
            let x = parse_point(x)?;
            let psi = parse_psi(psi)?;
            let target = target.build()?;
            let d = descriptor(*q, &psi, *variant, &target)?;
            let inside = member(&x, &d);
            let mut em = Emitter::new(fmt, dec, &["x1", "x2", "q", "variant", "member"], &[]);
            em.row(&[
                fmt_rational(&x.0),
                fmt_rational(&x.1),
                q.to_string(),
                variant.name().into(),
                inside.to_string(),
            ]);
            Ok(true)
        }
        Cmd::Approximant { q, q_max, target } => {
            let target = target.build()?;
            let qs = q_range(*q, *q_max)?;
            let rows = par_map_ordered(qs, cli.jobs, |&q| {
                target.approximant(q).map_err(|e| e.to_string())
            });
            let mut em = Emitter::new(fmt, dec, &["q", "b", "a1", "a2", "err"], &[4]);
            for row in rows {
                let ap = row?;
                em.row(&[
                    ap.q.to_string(),
                    ap.b.to_string(),
                    ap.a.0.to_string(),
                    ap.a.1.to_string(),
                    fmt_rational(&ap.sup_error),
                ]);
            }
            Ok(true)
        }
        Cmd::VerifyLemma {
            id,
            q,
            q_max,
            r,
            psi,
            target,
            cap,
            corrupt_euler_product,
        } => {
            let target = target.build()?;
            let need_psi = || -> Result<PsiFunction, String> {
                parse_psi(psi.as_deref().ok_or("--psi is required for this lemma")?)
            };
            match id {
                LemmaArg::DivisorIdentity => {
                    let qs = q_range(*q, *q_max)?;
                    let reports = par_map_ordered(qs, cli.jobs, |&q| divisor_identity(q));
                    let mut em =
                        Emitter::new(fmt, dec, &["q", "lhs", "rhs", "ok"], &[1, 2]);
                    let mut all_ok = true;
                    for rep in reports {
                        all_ok &= rep.conclusion_verified;
                        em.row(&[
                            rep.parameters["q"].clone(),
                            rep.computed_values["lhs"].clone(),
                            rep.computed_values["rhs"].clone(),
                            rep.conclusion_verified.to_string(),
                        ]);
                    }
                    Ok(all_ok)
                }
                LemmaArg::DivisorBound => {
                    let delta = target.delta().clone();
                    let qs = q_range(*q, *q_max)?;
                    let reports =
                        par_map_ordered(qs, cli.jobs, |&q| restricted_divisor_bound(q, &delta));
                    let mut em = Emitter::new(fmt, dec, REPORT_COLUMNS, &[]);
                    let mut all_ok = true;
                    for rep in reports {
                        all_ok &= !rep.falsified();
                        em.row(&report_row(&rep));
                    }
                    Ok(all_ok)
                }
                LemmaArg::BasicSize => {
                    let psi = need_psi()?;
                    let mode = if *corrupt_euler_product {
                        EulerProductMode::DropApproximantDenominator
                    } else {
                        EulerProductMode::Standard
                    };
                    let qs = q_range(*q, *q_max)?;
                    let reports = par_map_ordered(qs, cli.jobs, |&q| {
                        verify_basic_size(q, &psi.eval(q), &target, mode, *cap)
                            .map_err(|e| e.to_string())
                    });
                    let mut em = Emitter::new(fmt, dec, REPORT_COLUMNS, &[]);
                    let mut all_ok = true;
                    for rep in reports {
                        let rep = rep?;
                        all_ok &= !rep.falsified();
                        em.row(&report_row(&rep));
                    }
                    Ok(all_ok)
                }
                LemmaArg::Key => {
                    let psi = need_psi()?;
                    let q = q.ok_or("--q is required for the key lemma")?;
                    let r = r.ok_or("--r is required for the key lemma")?;
                    let rep = key_disjointness(q, r, &psi, &target, *cap)
                        .map_err(|e| e.to_string())?;
                    let mut em = Emitter::new(fmt, dec, REPORT_COLUMNS, &[]);
                    let ok = !rep.falsified();
                    em.row(&report_row(&rep));
                    Ok(ok)
                }
                LemmaArg::Overlap => {
                    let psi = need_psi()?;
                    let q = q.ok_or("--q is required for the overlap ratio")?;
                    let r = r.ok_or("--r is required for the overlap ratio")?;
                    let ratio =
                        overlap_ratio(q, r, &psi, &target, *cap).map_err(|e| e.to_string())?;
                    let mut em = Emitter::new(fmt, dec, &["q", "r", "overlap_ratio"], &[2]);
                    em.row(&[q.to_string(), r.to_string(), fmt_rational(&ratio)]);
                    Ok(true)
                }
                LemmaArg::Ratio => {
                    let psi = need_psi()?;
                    let qmax = q_max.ok_or("--q-max is required for the ratio lemma")?;
                    let ratio = quasi_independence_ratio(qmax, &psi, &target, *cap)
                        .map_err(|e| e.to_string())?;
                    let ok = ratio <= Rational::one();
                    let mut em = Emitter::new(fmt, dec, &["q_max", "ratio", "ok"], &[1]);
                    em.row(&[qmax.to_string(), fmt_rational(&ratio), ok.to_string()]);
                    Ok(ok)
                }
            }
        }
        Cmd::Ratio {
            q_max,
            psi,
            target,
            cap,
        } => {
            let psi = parse_psi(psi)?;
            let target = target.build()?;
            let ratio = quasi_independence_ratio(*q_max, &psi, &target, *cap)
                .map_err(|e| e.to_string())?;
            let mut em = Emitter::new(fmt, dec, &["q_max", "ratio"], &[1]);
            em.row(&[q_max.to_string(), fmt_rational(&ratio)]);
            Ok(true)
        }
        Cmd::EstimateLimsup {
            q0,
            q1,
            n,
            seed,
            psi,
            variant,
            tilde,
            target,
            dyadic,
        } => {
            let psi = parse_psi(psi)?;
            let target = target.build()?;
            let variant = if *tilde { &VariantArg::Tilde } else { variant };
            let run = sample(*n, *seed).map_err(|e| e.to_string())?;
            match dyadic {
                Some(kmax) => {
                    let profile =
                        dyadic_hit_profile(&run, *kmax, &psi, &target, (*variant).into())
                            .map_err(|e| e.to_string())?;
                    let mut em = Emitter::new(
                        fmt,
                        dec,
                        &["k", "q0", "q1", "n", "seed", "variant", "fraction"],
                        &[6],
                    );
                    for (k, fr) in profile.iter().enumerate() {
                        em.row(&[
                            k.to_string(),
                            (1u64 << k).to_string(),
                            ((1u64 << (k + 1)) - 1).to_string(),
                            n.to_string(),
                            seed.to_string(),
                            variant.name().into(),
                            fmt_rational(fr),
                        ]);
                    }
                }
                None => {
                    let rep = tail_hit_fraction(&run, *q0, *q1, &psi, &target, (*variant).into())
                        .map_err(|e| e.to_string())?;
                    let mut em = Emitter::new(
                        fmt,
                        dec,
                        &["q0", "q1", "n", "seed", "variant", "fraction"],
                        &[5],
                    );
                    em.row(&[
                        q0.to_string(),
                        q1.to_string(),
                        n.to_string(),
                        seed.to_string(),
                        variant.name().into(),
                        fmt_rational(&rep.fraction),
                    ]);
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    provenance_header(cli.deterministic);
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
