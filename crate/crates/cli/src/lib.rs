//! The `pellian` command line: argument definitions and dispatch.

pub mod cache;
pub mod config;
pub mod error;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::Rational64;
use serde::Serialize;

use pellian_core::counting::{
    count_n_sweep, dyadic_split, hooley_sweep, lemma21_envelope, Strategy, COUNT_CSV_HEADER,
    ENVELOPE_CSV_HEADER, HOOLEY_CSV_HEADER,
};
use pellian_core::forms::{
    class_formula_ratio, h_sum_family, reconcile_convention, FamilyOptions, DEFAULT_MAX_TERMS,
    FAMILY_CSV_HEADER,
};
use pellian_core::arith::qf_growth_table;
use pellian_core::pell::{cf_expand_sqrt, log_eps_growth, nth_solution};
use pellian_core::report::{fmt_sig15, to_csv_string};
use pellian_core::surface::{
    a1_membership, count_nucirc_lower, count_sb, enumerate_surface_points, golubeva_check,
    intersection_rank_check, lift_sweep, point_records, small_branch_lift, squarefree_density_mod,
    yamamoto_diagnostic, Membership, POINT_CSV_HEADER, YAMAMOTO_CSV_HEADER,
};
use pellian_core::{Convention, Poly};

use crate::cache::{Cache, CACHE_ENV};
use crate::config::SweepConfig;
use crate::error::{CliError, CliResult};

const DEFAULT_L_TARGET: f64 = 1e-8;
const DEFAULT_CONSTANT: f64 = 2.0;

#[derive(Debug, Parser)]
#[command(name = "pellian", version, about = "Pell equations, class numbers and integer points on Pellian surfaces")]
pub struct Cli {
    /// Worker partitions for sweeps.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub partitions: Option<u64>,

    /// JSON file with defaults for the global flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Cache of fundamental solutions (line-delimited JSON).
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,

    /// Where to write the CSV/JSON artifact; `-` for standard output in
    /// place of the summary.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fundamental solution of t^2 - d u^2 = 1, or a sweep over d.
    Pell(PellArgs),
    /// N(B), the number of Pell triples of height at most B.
    Count(CountArgs),
    /// S(x, alpha) against its conjectured main term.
    Hooley(HooleyArgs),
    /// Class numbers by reduction cycles and by the analytic formula.
    Classnumber(ClassArgs),
    /// Integer points on 2uyz = y^2 - 3u^2 - 1.
    Surface(SurfaceArgs),
    /// Supremum of the combined counting exponent.
    Envelope(EnvelopeArgs),
    /// Sweeps over d(z) = z^2 + 3.
    Diagnostics(DiagArgs),
}

#[derive(Debug, Args)]
pub struct PellArgs {
    pub d: u64,
    /// Sweep every non-square d in [d, to].
    #[arg(long)]
    pub to: Option<u64>,
    /// The n-th power of the fundamental solution.
    #[arg(long, conflicts_with = "to")]
    pub n: Option<u32>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Comma-separated heights.
    #[arg(long = "B", value_delimiter = ',', required = true, num_args = 1..)]
    pub b: Vec<u64>,
    /// `per_d` walks the solutions of each d, `brute` loops over all (t, u).
    #[arg(long, default_value = "per_d")]
    pub strategy: Strategy,
    /// Record wall time per row (makes the CSV run-dependent).
    #[arg(long)]
    pub timing: bool,
    /// Also report the dyadic split of N(2B) - N(B) for the largest B.
    #[arg(long)]
    pub dyadic: bool,
}

#[derive(Debug, Args)]
pub struct HooleyArgs {
    /// Comma-separated cut-offs.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub x: Vec<u64>,
    /// Rational, e.g. `1/2`.
    #[arg(long, value_parser = parse_rational)]
    pub alpha: Rational64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("classmode").required(true).args(["d", "family", "reconcile"])))]
pub struct ClassArgs {
    /// A single non-square discriminant.
    #[arg(long)]
    pub d: Option<u64>,
    /// Sum over d = z^2 + 3 for z <= Z.
    #[arg(long)]
    pub family: Option<u64>,
    /// Fix the convention and constant from all non-square d <= D.
    #[arg(long)]
    pub reconcile: Option<u64>,
    /// Identify f with -f.
    #[arg(long)]
    pub identify_negation: bool,
    /// Absolute error target for L(1, chi) (default 1e-8).
    #[arg(long)]
    pub l_target: Option<f64>,
    /// Constant in h log eps = c sqrt(d) L (default 2).
    #[arg(long)]
    pub constant: Option<f64>,
    /// Keep z = r mod m, written `m:r`.
    #[arg(long, value_parser = parse_congruence)]
    pub congruence: Option<(u64, u64)>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("surfacemode").required(true)
    .args(["b", "rank", "lift", "lift_sweep", "nucirc", "sb", "membership"])))]
pub struct SurfaceArgs {
    /// List points of height at most B.
    #[arg(long = "B")]
    pub b: Option<u64>,
    /// Intersection matrix ranks and the exponent rho_U + b.
    #[arg(long)]
    pub rank: bool,
    /// Lift of the fundamental unit of d(z) for one z.
    #[arg(long)]
    pub lift: Option<u64>,
    /// Lifts for every admissible z <= Z.
    #[arg(long, value_name = "Z")]
    pub lift_sweep: Option<u64>,
    /// Lower bound for points off A^1-curves of height at most B.
    #[arg(long)]
    pub nucirc: Option<u64>,
    /// S(B) with log B given.
    #[arg(long, value_name = "LOG_B")]
    pub sb: Option<f64>,
    /// Margin for --sb.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Verdict for a solution `t,u,z` of t^2 - (z^2 + 3) u^2 = 1.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub membership: Option<(BigInt, BigInt, i64)>,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    /// Grid points in k.
    #[arg(long, default_value_t = 1000)]
    pub resolution: usize,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("diagmode").required(true).args(["z", "golubeva", "density", "growth", "qf"])))]
pub struct DiagArgs {
    /// log eps against (log sf)^2 for z <= Z.
    #[arg(long = "Z")]
    pub z: Option<u64>,
    /// Exact unit bound at z = 3^N + 1.
    #[arg(long, value_name = "N")]
    pub golubeva: Option<u32>,
    /// Square-free density of d(z) on a residue class, z <= Z.
    #[arg(long)]
    pub density: Option<u64>,
    /// Largest log eps_d / (sqrt(d) log d) over d <= D.
    #[arg(long, value_name = "D")]
    pub growth: Option<u64>,
    /// Q_f(S, Z) / (Z^(1/2) S^(3/4)) for f = z^2 + 3 on a grid.
    #[arg(long)]
    pub qf: bool,
    #[arg(long, default_value_t = 42)]
    pub modulus: u64,
    #[arg(long, default_value_t = 26)]
    pub residue: u64,
}

fn parse_rational(s: &str) -> Result<Rational64, String> {
    let bad = || format!("expected p/q, got {s:?}");
    let r = match s.split_once('/') {
        Some((p, q)) => {
            let (p, q): (i64, i64) = (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
            if q == 0 {
                return Err(bad());
            }
            Rational64::new(p, q)
        }
        None => Rational64::from_integer(s.trim().parse().map_err(|_| bad())?),
    };
    if r <= Rational64::from_integer(0) {
        return Err(format!("alpha must be positive, got {s}"));
    }
    Ok(r)
}

fn parse_triple(s: &str) -> Result<(BigInt, BigInt, i64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || format!("expected t,u,z, got {s:?}");
    match parts[..] {
        [t, u, z] => Ok((
            t.parse().map_err(|_| bad())?,
            u.parse().map_err(|_| bad())?,
            z.parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn parse_congruence(s: &str) -> Result<(u64, u64), String> {
    let (m, r) = s.split_once(':').ok_or_else(|| format!("expected m:r, got {s:?}"))?;
    let m: u64 = m.parse().map_err(|_| format!("bad modulus {m:?}"))?;
    let r: u64 = r.parse().map_err(|_| format!("bad residue {r:?}"))?;
    if m == 0 || r >= m {
        return Err(format!("need 0 <= r < m, got {r} mod {m}"));
    }
    Ok((m, r))
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    /// Human-readable lines for standard output.
    pub summary: String,
    /// The CSV or JSON artifact.
    pub artifact: String,
}

/// Settings after merging the config file under the flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub partitions: usize,
    pub cache: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub config: SweepConfig,
}

impl Settings {
    pub fn resolve(cli: &Cli) -> CliResult<Self> {
        let config = match &cli.config {
            Some(p) => SweepConfig::load(p)?,
            None => SweepConfig::default(),
        };
        Ok(Settings {
            partitions: cli.partitions.map(|p| p as usize).or(config.partitions).unwrap_or(1),
            cache: cli.cache.clone().or_else(|| config.cache.clone()),
            out: cli.out.clone().or_else(|| config.out.clone()),
            config,
        })
    }
}

fn json<T: Serialize>(x: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(x).map_err(pellian_core::Error::from)?;
    s.push('\n');
    Ok(s)
}

fn csv<T: Serialize>(records: &[T], header: &[&str]) -> CliResult<String> {
    Ok(to_csv_string(records, header)?)
}

#[derive(Serialize)]
struct PellRow {
    d: u64,
    t1: String,
    u1: String,
    norm_pm: i8,
    period_length: usize,
    #[serde(serialize_with = "pellian_core::report::ser_f64")]
    log_eps: f64,
}

const PELL_CSV_HEADER: [&str; 6] = ["d", "t1", "u1", "norm_pm", "period_length", "log_eps"];

fn pell(args: &PellArgs, s: &Settings) -> CliResult<Output> {
    let mut cache = match &s.cache {
        Some(p) => Some(Cache::load(p)?),
        None => None,
    };
    let mut lookup = |d: u64| -> CliResult<PellRow> {
        let (sol, norm) = match cache.as_mut() {
            Some(c) => c.fundamental(d)?,
            None => (
                pellian_core::pell::fundamental_solution(d)?,
                pellian_core::pell::fundamental_unit_pm(d)?.norm,
            ),
        };
        Ok(PellRow {
            d,
            t1: sol.t.to_string(),
            u1: sol.u.to_string(),
            norm_pm: norm,
            period_length: cf_expand_sqrt(d)?.period_length(),
            log_eps: sol.log(),
        })
    };
    let mut summary = String::new();
    let artifact = if let Some(to) = args.to {
        if to < args.d {
            return Err(CliError::Usage(format!("--to {to} is below d = {}", args.d)));
        }
        let rows = (args.d.max(2)..=to)
            .filter(|&d| !pellian_core::arith::is_square_u64(d))
            .map(&mut lookup)
            .collect::<CliResult<Vec<_>>>()?;
        let neg = rows.iter().filter(|r| r.norm_pm == -1).count();
        writeln!(summary, "d in [{}, {to}]: {} non-square, {neg} with norm -1 units", args.d, rows.len()).ok();
        csv(&rows, &PELL_CSV_HEADER)?
    } else if let Some(n) = args.n {
        let sol = nth_solution(args.d, n)?;
        writeln!(summary, "d = {}\nn = {n}\nt = {}\nu = {}", args.d, sol.t, sol.u).ok();
        json(&serde_json::json!({"d": args.d, "n": n, "t": sol.t.to_string(), "u": sol.u.to_string()}))?
    } else {
        let row = lookup(args.d)?;
        writeln!(
            summary,
            "d = {}\nt1 = {}\nu1 = {}\nnorm_pm = {}\nperiod_length = {}\nlog_eps = {}",
            row.d,
            row.t1,
            row.u1,
            row.norm_pm,
            row.period_length,
            fmt_sig15(row.log_eps)
        )
        .ok();
        json(&row)?
    };
    if let Some(c) = &cache {
        if c.rejected > 0 {
            writeln!(summary, "cache: {} corrupt records skipped", c.rejected).ok();
        }
    }
    Ok(Output { summary, artifact })
}

fn count(args: &CountArgs, s: &Settings) -> CliResult<Output> {
    let rows = count_n_sweep(&args.b, args.strategy, s.partitions, args.timing)?;
    let mut summary = String::new();
    for r in &rows {
        writeln!(summary, "N({}) = {}", r.b, r.n).ok();
    }
    if args.dyadic {
        let b = *args.b.iter().max().expect("clap requires one B");
        let split = dyadic_split(b)?;
        writeln!(summary, "dyadic B = {b}: M1 = {}, M2 = {}, M3 = {}", split.m1, split.m2, split.m3).ok();
    }
    Ok(Output {
        summary,
        artifact: csv(&rows, &COUNT_CSV_HEADER)?,
    })
}

fn hooley(args: &HooleyArgs, s: &Settings) -> CliResult<Output> {
    let rows = hooley_sweep(&args.x, args.alpha, s.partitions)?;
    let mut summary = String::new();
    for r in &rows {
        writeln!(summary, "S({}, {}) = {}, ratio {}", r.x, r.alpha, r.s, fmt_sig15(r.ratio)).ok();
    }
    Ok(Output {
        summary,
        artifact: csv(&rows, &HOOLEY_CSV_HEADER)?,
    })
}

fn classnumber(args: &ClassArgs, s: &Settings) -> CliResult<Output> {
    let cfg = &s.config;
    let identify = args.identify_negation || cfg.identify_negation.unwrap_or(false);
    let convention = if identify { Convention::IdentifyNegation } else { Convention::Narrow };
    let l_target = args.l_target.or(cfg.l_target).unwrap_or(DEFAULT_L_TARGET);
    let constant = args.constant.or(cfg.constant).unwrap_or(DEFAULT_CONSTANT);
    let mut summary = String::new();
    if let Some(d) = args.d {
        let r = class_formula_ratio(d, convention, l_target)?;
        writeln!(
            summary,
            "d = {d}\nh_narrow = {}\nh_identified = {}\nlog_eps = {}\nL = {} +- {:.3e}\nformula_ratio = {}\nanalytic_h = {}",
            r.h_narrow,
            r.h_identified,
            fmt_sig15(r.log_eps),
            fmt_sig15(r.l_value.value),
            r.l_value.radius,
            fmt_sig15(r.formula_ratio),
            r.analytic_h(constant).map_or("uncertified".into(), |h| h.to_string())
        )
        .ok();
        return Ok(Output {
            summary,
            artifact: json(&r)?,
        });
    }
    if let Some(dmax) = args.reconcile {
        let ds: Vec<u64> = (2..=dmax).filter(|&d| !pellian_core::arith::is_square_u64(d)).collect();
        let r = reconcile_convention(&ds, l_target, s.partitions)?;
        writeln!(
            summary,
            "convention = {:?}\nconstant = {}\nnarrow ratio std = {:.3e}\nidentified ratio std = {:.3e}",
            r.convention,
            fmt_sig15(r.constant),
            r.narrow.std_dev,
            r.identified.std_dev
        )
        .ok();
        return Ok(Output {
            summary,
            artifact: json(&r)?,
        });
    }
    let z = args.family.expect("clap group requires one mode");
    let opts = FamilyOptions {
        convention,
        constant,
        partitions: s.partitions,
        congruence: args.congruence,
        max_terms: cfg.max_terms.unwrap_or(DEFAULT_MAX_TERMS),
    };
    let r = h_sum_family(z, &opts)?;
    writeln!(
        summary,
        "Z = {z}\nterms = {}\nsum = {}\nconditional bound Z^(9/5) (log Z)^(3/5) = {}\ntrivial bound Z^2 / (log Z)^2 = {}\ndisagreements = {:?}",
        r.terms,
        r.sum,
        fmt_sig15(r.conditional_bound),
        fmt_sig15(r.trivial_bound),
        r.disagreements
    )
    .ok();
    Ok(Output {
        summary,
        artifact: csv(&r.records, &FAMILY_CSV_HEADER)?,
    })
}

fn surface(args: &SurfaceArgs, s: &Settings) -> CliResult<Output> {
    let mut summary = String::new();
    let artifact = if args.rank {
        let r = intersection_rank_check();
        let text = serde_json::to_string(&r).map_err(pellian_core::Error::from)?;
        writeln!(summary, "{text}").ok();
        text + "\n"
    } else if let Some(b) = args.b {
        let pts = enumerate_surface_points(b, s.partitions)?;
        let recs = point_records(&pts);
        for label in ["on_known_curve", "not_on_any_integer_curve", "undetermined"] {
            let n = recs.iter().filter(|r| r.verdict == label).count();
            writeln!(summary, "{label} = {n}").ok();
        }
        writeln!(summary, "points of height <= {b}: {}", recs.len()).ok();
        csv(&recs, &POINT_CSV_HEADER)?
    } else if let Some(z) = args.lift {
        let l = small_branch_lift(z)?;
        writeln!(
            summary,
            "z = {z}\nd = {}\nlift = ({}, {}, {})\nheight = {}\nheight is u1 = {}\nprinted sign on surface = {}",
            l.d,
            l.point.y,
            l.point.u,
            l.point.z,
            l.height,
            l.height_is_u1(),
            l.unsigned_point_on_surface
        )
        .ok();
        json(&l)?
    } else if let Some(z) = args.lift_sweep {
        let r = lift_sweep(z, s.partitions)?;
        writeln!(
            summary,
            "qualifying z = {}\nthreshold = {:?}\nexceptions = {:?}\nheight mismatches = {:?}",
            r.qualifying, r.threshold, r.exceptions, r.height_mismatches
        )
        .ok();
        json(&r)?
    } else if let Some(b) = args.nucirc {
        let n = count_nucirc_lower(b, s.partitions)?;
        writeln!(summary, "lower bound at B = {b}: {n}").ok();
        json(&serde_json::json!({"B": b, "count": n}))?
    } else if let Some(log_b) = args.sb {
        let r = count_sb(log_b, args.eps, s.partitions)?;
        writeln!(
            summary,
            "z_max = {}\nqualifying = {}\nS(B) = {}\ncomplement = {}",
            r.z_max,
            r.qualifying,
            r.count,
            r.complement.len()
        )
        .ok();
        json(&r)?
    } else {
        let (t, u, z) = args.membership.as_ref().expect("clap group requires one mode");
        let v = a1_membership(t, u, *z)?;
        let (curve, parameter) = match &v {
            Membership::OnKnownCurve { curve, parameter } => (Some(curve.name.clone()), Some(parameter.to_string())),
            _ => (None, None),
        };
        writeln!(summary, "verdict = {}", v.label()).ok();
        if let (Some(c), Some(p)) = (&curve, &parameter) {
            writeln!(summary, "curve = {c} at x = {p}").ok();
        }
        json(&serde_json::json!({"verdict": v.label(), "curve": curve, "parameter": parameter}))?
    };
    Ok(Output { summary, artifact })
}

fn envelope(args: &EnvelopeArgs) -> CliResult<Output> {
    let env = lemma21_envelope(args.resolution)?;
    let summary = format!(
        "resolution = {}\nsupremum = {}\nargmax k = {}\ndelta_1 range at argmax = [{}, {}]\n",
        env.resolution,
        fmt_sig15(env.supremum),
        fmt_sig15(env.argmax_k),
        fmt_sig15(env.argmax_delta1_lo),
        fmt_sig15(env.argmax_delta1_hi)
    );
    Ok(Output {
        summary,
        artifact: csv(&env.rows, &ENVELOPE_CSV_HEADER)?,
    })
}

fn diagnostics(args: &DiagArgs, s: &Settings) -> CliResult<Output> {
    let mut summary = String::new();
    let artifact = if let Some(z) = args.z {
        let r = yamamoto_diagnostic(z, s.partitions)?;
        writeln!(
            summary,
            "rows = {}\nmin ratio = {} at z = {}",
            r.records.len(),
            fmt_sig15(r.min_ratio),
            r.argmin_z
        )
        .ok();
        csv(&r.records, &YAMAMOTO_CSV_HEADER)?
    } else if let Some(n) = args.golubeva {
        let g = golubeva_check(n)?;
        writeln!(
            summary,
            "n = {n}\nz = {}\nd = {}\nholds = {}\nequality = {}\nrelative slack = {}\nrhs = {} + {} sqrt({})",
            g.z,
            g.d,
            g.holds,
            g.equality,
            fmt_sig15(g.relative_slack),
            g.rhs_a,
            g.rhs_b,
            g.d
        )
        .ok();
        json(&g)?
    } else if let Some(dmax) = args.growth {
        let g = log_eps_growth(dmax, s.partitions)?;
        writeln!(
            summary,
            "max log eps / (sqrt(d) log d) over d <= {dmax} = {} at d = {}",
            fmt_sig15(g.max_ratio),
            g.argmax_d
        )
        .ok();
        json(&g)?
    } else if args.qf {
        let f = Poly::from_i64s(&[3, 0, 1]);
        let cells: Vec<(u64, u64)> = [10u64, 100, 1000]
            .iter()
            .flat_map(|&s| [100u64, 1000, 10_000].map(|z| (s, z)))
            .collect();
        let rows = qf_growth_table(&f, &cells)?;
        for r in &rows {
            writeln!(summary, "S = {}, Z = {}: Q_f = {}, ratio {}", r.s, r.z, r.count, fmt_sig15(r.ratio)).ok();
        }
        csv(&rows, &["s", "z", "count", "ratio"])?
    } else {
        let z = args.density.expect("clap group requires one mode");
        let r = squarefree_density_mod(z, args.modulus, args.residue, s.partitions)?;
        writeln!(
            summary,
            "z = {} mod {}, z <= {z}: {} of {} square-free, density {}",
            r.residue,
            r.modulus,
            r.squarefree,
            r.in_class,
            fmt_sig15(r.density)
        )
        .ok();
        json(&r)?
    };
    Ok(Output { summary, artifact })
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> CliResult<Output> {
    execute(cli, &Settings::resolve(cli)?)
}

pub fn execute(cli: &Cli, s: &Settings) -> CliResult<Output> {
    match &cli.command {
        Command::Pell(a) => pell(a, s),
        Command::Count(a) => count(a, s),
        Command::Hooley(a) => hooley(a, s),
        Command::Classnumber(a) => classnumber(a, s),
        Command::Surface(a) => surface(a, s),
        Command::Envelope(a) => envelope(a),
        Command::Diagnostics(a) => diagnostics(a, s),
    }
}
