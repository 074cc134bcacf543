//! `d2dsim` command line.
//!
//! Subcommands: `theory`, `simulate`, `sweep`, `solve`, `fit`. Experiment
//! parameters come from defaults, then `--config FILE` (flat `key = value`
//! lines, see [`CONFIG_KEYS`]), then flags. Output files are written only after
//! the whole command has succeeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::experiment::{
    fit_scaling, monte_carlo, sweep, Axis, CachePolicy, ExperimentConfig, SweepRow, SweepTable,
    CONFIG_KEYS,
};
use crate::graph::Graph;
use crate::scheduling::{mis_exact, mis_greedy, Method, DEFAULT_EXACT_CAP};
use crate::theory::{eta, optimal_gamma_c, predicted_scaling, r_opt, Regime, RegimeParams};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "d2dsim",
    version,
    about = "D2D caching network simulator and scaling-law toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print eta, the optimal caching exponent, r_opt and predicted exponents
    Theory(ConfigArgs),
    /// Monte Carlo at a single parameter point
    Simulate(ConfigArgs),
    /// Monte Carlo over the Cartesian product of n, m and radius values, as CSV
    Sweep(ConfigArgs),
    /// Maximum independent set of an edge-list conflict graph
    Solve(SolveArgs),
    /// Log-log least squares fit of a two-column CSV
    Fit(FitArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Flat key = value config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of users, comma-separated list [default: 1000]
    #[arg(long)]
    pub n: Option<String>,
    /// Fixed library size(s), comma-separated [default: ceil(2 ln n)]
    #[arg(long, conflicts_with = "m_log_coeff")]
    pub m: Option<String>,
    /// Library size m = ceil(c_m ln n) [default: 2]
    #[arg(long)]
    pub m_log_coeff: Option<String>,
    /// Request Zipf exponent [default: 0.5]
    #[arg(long)]
    pub gamma_r: Option<String>,
    /// Caching exponent: a number, `optimal` or `most-popular` [default: optimal]
    #[arg(long)]
    pub gamma_c: Option<String>,
    /// Target exponent slack epsilon in (0, 1/6) [default: 0.05]
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Fixed radius list `r1,r2,...` or geometric grid `geom:lo:hi:k`; implies --radius-rule fixed
    #[arg(long)]
    pub radius: Option<String>,
    /// `theory` (r_opt with sqrt(c1 c2)) or `fixed` [default: theory]
    #[arg(long)]
    pub radius_rule: Option<String>,
    /// Lower radius constant [default: 1]
    #[arg(long)]
    pub c1: Option<String>,
    /// Upper radius constant [default: 1]
    #[arg(long)]
    pub c2: Option<String>,
    /// exact, greedy or cluster [default: greedy]
    #[arg(long)]
    pub scheduler: Option<String>,
    /// Vertex cap for the exact scheduler [default: 40]
    #[arg(long)]
    pub exact_cap: Option<String>,
    /// Trials per point [default: 100]
    #[arg(long)]
    pub trials: Option<String>,
    /// Master seed; trial i uses seed + i [default: 0]
    #[arg(long)]
    pub seed: Option<String>,
    /// Worker threads, 0 for all cores; never changes results [default: 0]
    #[arg(long)]
    pub workers: Option<String>,
    /// Write CSV output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(&fs::read_to_string(path)?)?;
        }
        // m_log_coeff before m: they conflict, so at most one is present
        let flags = [
            ("n", &self.n),
            ("m_log_coeff", &self.m_log_coeff),
            ("m", &self.m),
            ("gamma_r", &self.gamma_r),
            ("gamma_c", &self.gamma_c),
            ("epsilon", &self.epsilon),
            ("radius", &self.radius),
            ("radius_rule", &self.radius_rule),
            ("c1", &self.c1),
            ("c2", &self.c2),
            ("scheduler", &self.scheduler),
            ("exact_cap", &self.exact_cap),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("workers", &self.workers),
        ];
        debug_assert_eq!(flags.len(), CONFIG_KEYS.len());
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Edge-list file (`p V E` header, then `u v` lines)
    pub input: PathBuf,
    /// exact or greedy
    #[arg(long, default_value = "exact")]
    pub scheduler: String,
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with an optional header row
    pub input: PathBuf,
    /// Column holding x (name or 0-based index)
    #[arg(long, default_value = "0")]
    pub x: String,
    /// Column holding y (name or 0-based index)
    #[arg(long, default_value = "1")]
    pub y: String,
    /// Label for the swept axis: n, m or x
    #[arg(long, default_value = "x")]
    pub axis: String,
}

/// Parses `argv` (including the program name), runs the command and returns the
/// process exit status.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    match run(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn run(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Theory(args) => theory(&args.resolve()?, out),
        Command::Simulate(args) => simulate(&args.resolve()?, args.out.as_deref(), out),
        Command::Sweep(args) => {
            let table = sweep(&args.resolve()?)?;
            emit(&table.to_csv(), args.out.as_deref(), out)
        }
        Command::Solve(args) => solve(&args, out),
        Command::Fit(args) => fit(&args, out),
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn na(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "NA".into())
}

fn theory(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let params = RegimeParams::new(cfg.gamma_r, cfg.epsilon, cfg.c1, cfg.c2)?;
    let regime = params.regime()?;
    let scaling = predicted_scaling(&params)?;
    let (eta_v, gamma_c) = match regime {
        Regime::LowReuse => (
            Some(eta(cfg.gamma_r)?),
            Some(match cfg.cache {
                CachePolicy::Zipf(g) => g,
                _ => optimal_gamma_c(cfg.gamma_r, cfg.epsilon)?,
            }),
        ),
        Regime::HighReuse => (
            None,
            match cfg.cache {
                CachePolicy::Zipf(g) => Some(g),
                _ => None,
            },
        ),
    };
    let regime_name = match regime {
        Regime::HighReuse => "high-reuse",
        Regime::LowReuse => "low-reuse",
    };

    let mut rows = Vec::new();
    for &n in &cfg.n {
        let ms = match &cfg.library {
            crate::experiment::LibraryRule::Fixed(ms) => ms.clone(),
            crate::experiment::LibraryRule::Log { coeff } => {
                vec![crate::experiment::LibraryRule::log_size(*coeff, n)]
            }
        };
        for m in ms {
            rows.push((n, m, r_opt(n, m, &params)?));
        }
    }

    let (n0, m0, r0) = rows[0];
    let mut text = String::new();
    let kv = [
        ("regime", regime_name.to_string()),
        ("gamma_r", format!("{:.6}", cfg.gamma_r)),
        ("epsilon", format!("{:.6}", cfg.epsilon)),
        ("eta", na(eta_v)),
        ("gamma_c", na(gamma_c)),
        ("n", n0.to_string()),
        ("m", m0.to_string()),
        ("r_opt", format!("{r0:.6}")),
        ("n_exponent", format!("{:.6}", scaling.n_exponent)),
        ("m_exponent", format!("{:.6}", scaling.m_exponent)),
    ];
    for (k, v) in kv {
        text.push_str(&format!("{k}={v}\n"));
    }
    text.push_str("regime,gamma_r,epsilon,eta,gamma_c,n,m,r_opt,n_exponent,m_exponent\n");
    let full = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "NA".into());
    for (n, m, r) in rows {
        text.push_str(&format!(
            "{regime_name},{},{},{},{},{n},{m},{r},{},{}\n",
            cfg.gamma_r,
            cfg.epsilon,
            full(eta_v),
            full(gamma_c),
            scaling.n_exponent,
            scaling.m_exponent
        ));
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn simulate(cfg: &ExperimentConfig, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let points = cfg.points()?;
    let [point] = points.as_slice() else {
        return Err(Error::InvalidParameter(format!(
            "simulate needs exactly one parameter point, got {}; use `sweep`",
            points.len()
        )));
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let summary = pool.install(|| monte_carlo(point, cfg.trials, cfg.seed))?;

    let gamma_c = match point.cache {
        CachePolicy::Zipf(g) => g.to_string(),
        _ => "most-popular".into(),
    };
    let se = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "NA".into());
    let text = format!(
        "n={}\nm={}\ngamma_r={}\ngamma_c={}\nradius={}\nscheduler={}\ntrials={}\nseed={}\n\
         L_mean={}\nL_se={}\nG_mean={}\npotential_mean={}\nself_served_mean={}\n",
        point.n,
        point.m,
        point.gamma_r,
        gamma_c,
        point.r,
        point.scheduler,
        cfg.trials,
        cfg.seed,
        summary.l.mean,
        se(summary.l.se),
        summary.g.mean,
        summary.potential_links.mean,
        summary.self_served.mean,
    );
    if let Some(p) = path {
        let table = SweepTable {
            rows: vec![SweepRow {
                point: *point,
                summary,
            }],
            trials: cfg.trials,
            seed: cfg.seed,
        };
        fs::write(p, table.to_csv())?;
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn solve(args: &SolveArgs, out: &mut dyn Write) -> Result<()> {
    let graph = Graph::parse_edge_list(&fs::read_to_string(&args.input)?)?;
    let schedule = match args.scheduler.parse::<Method>()? {
        Method::Exact => mis_exact(&graph, args.exact_cap)?,
        Method::Greedy => mis_greedy(&graph),
        Method::Cluster => {
            return Err(Error::InvalidParameter(
                "the cluster scheduler needs user positions; use exact or greedy".into(),
            ))
        }
    };
    let vertices: Vec<String> = schedule.active.iter().map(ToString::to_string).collect();
    writeln!(out, "method={}", schedule.method)?;
    writeln!(out, "size={}", schedule.len())?;
    writeln!(out, "vertices={}", vertices.join(" "))?;
    Ok(())
}

fn column_index(sel: &str, header: Option<&[&str]>) -> Result<usize> {
    if let Ok(i) = sel.parse::<usize>() {
        return Ok(i);
    }
    header
        .and_then(|h| h.iter().position(|c| c.trim() == sel))
        .ok_or_else(|| Error::InvalidData(format!("no column named `{sel}`")))
}

fn fit(args: &FitArgs, out: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(&args.input)?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();

    let is_numeric_row = |line: &str| line.split(',').all(|f| f.trim().parse::<f64>().is_ok());
    let header: Option<Vec<&str>> = match lines.peek() {
        Some((_, first)) if !is_numeric_row(first) => {
            let h = first.split(',').collect();
            lines.next();
            Some(h)
        }
        _ => None,
    };
    let xi = column_index(&args.x, header.as_deref())?;
    let yi = column_index(&args.y, header.as_deref())?;

    let mut points = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let get = |c: usize| -> Result<f64> {
            let raw = fields.get(c).ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("missing column {c}"),
            })?;
            raw.trim().parse::<f64>().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("`{raw}` is not a number"),
            })
        };
        points.push((get(xi)?, get(yi)?));
    }
    let axis = match args.axis.as_str() {
        "n" => Axis::N,
        "m" => Axis::M,
        "x" => Axis::Unspecified,
        other => return Err(Error::InvalidParameter(format!("unknown axis `{other}`"))),
    };
    let f = fit_scaling(&points, axis)?;
    writeln!(out, "axis={}", f.axis)?;
    writeln!(out, "points={}", points.len())?;
    writeln!(out, "slope={:.6}", f.slope)?;
    writeln!(out, "intercept={:.6}", f.intercept)?;
    writeln!(out, "r_squared={:.6}", f.r_squared)?;
    Ok(())
}
