//! Monte Carlo harness: resolve parameter points, run seeded trials, sweep
//! grids, and fit log-log scaling exponents.
//!
//! Every trial draws from three ChaCha streams derived from its seed (placement,
//! caches, requests), so one component can be held fixed while another varies.
//! Trial `i` of a point uses seed `master_seed + i`. Results are merged in trial
//! order, which makes every table a pure function of the configuration and the
//! master seed, whatever the worker count.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::caching::{assign_caches_most_popular, sample_files, NetworkState};
use crate::geometry::sample_placement;
use crate::linkplan::{enumerate_potential_links, plan};
use crate::popularity::PopularityModel;
use crate::scheduling::{cluster_schedule_on, mis_exact, mis_greedy, Method, DEFAULT_EXACT_CAP};
use crate::theory::{optimal_gamma_c, r_opt, RegimeParams, DEFAULT_EPSILON};
use crate::{Error, Result};

/// Random stream roles within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Placement = 0,
    Caches = 1,
    Requests = 2,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Library size as a function of `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum LibraryRule {
    Fixed(Vec<usize>),
    /// `m = max(1, ceil(coeff * ln n))`
    Log {
        coeff: f64,
    },
}

impl LibraryRule {
    pub fn log_size(coeff: f64, n: usize) -> usize {
        ((coeff * (n as f64).ln()).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CachePolicy {
    Zipf(f64),
    /// Zipf with the exponent from [`optimal_gamma_c`]; low-reuse only.
    Optimal,
    /// Every user caches file 1.
    MostPopular,
}

impl FromStr for CachePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(CachePolicy::Optimal),
            "most-popular" => Ok(CachePolicy::MostPopular),
            v => v.parse::<f64>().map(CachePolicy::Zipf).map_err(|_| {
                Error::InvalidParameter(format!(
                    "gamma_c must be a number, `optimal` or `most-popular`, got `{v}`"
                ))
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RadiusRule {
    Fixed(Vec<f64>),
    /// [`r_opt`] with the configured `c1`, `c2` and epsilon.
    Theory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: Vec<usize>,
    pub library: LibraryRule,
    pub gamma_r: f64,
    pub cache: CachePolicy,
    pub epsilon: f64,
    pub radius: RadiusRule,
    pub c1: f64,
    pub c2: f64,
    pub scheduler: Method,
    pub exact_cap: usize,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; 0 lets rayon decide. Never affects results.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: vec![1000],
            library: LibraryRule::Log { coeff: 2.0 },
            gamma_r: 0.5,
            cache: CachePolicy::Optimal,
            epsilon: DEFAULT_EPSILON,
            radius: RadiusRule::Theory,
            c1: 1.0,
            c2: 1.0,
            scheduler: Method::Greedy,
            exact_cap: DEFAULT_EXACT_CAP,
            trials: 100,
            seed: 0,
            workers: 0,
        }
    }
}

/// Keys accepted by [`ExperimentConfig::set`], in documentation order.
pub const CONFIG_KEYS: &[&str] = &[
    "n",
    "m",
    "m_log_coeff",
    "gamma_r",
    "gamma_c",
    "epsilon",
    "radius",
    "radius_rule",
    "c1",
    "c2",
    "scheduler",
    "exact_cap",
    "trials",
    "seed",
    "workers",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::InvalidParameter(format!("bad value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| parse_num(key, v)).collect()
}

/// `k` geometrically spaced values from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, k: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && k >= 2) {
        return Err(Error::InvalidParameter(format!(
            "geometric grid needs 0 < lo < hi and k >= 2, got {lo}, {hi}, {k}"
        )));
    }
    let ratio = (hi / lo).ln() / (k - 1) as f64;
    Ok((0..k).map(|i| lo * (ratio * i as f64).exp()).collect())
}

fn parse_radii(value: &str) -> Result<Vec<f64>> {
    match value.strip_prefix("geom:") {
        Some(text) => {
            let parts: Vec<&str> = text.split(':').collect();
            let [lo, hi, k] = parts.as_slice() else {
                return Err(Error::InvalidParameter(format!(
                    "radius grid must be `geom:lo:hi:k`, got `{value}`"
                )));
            };
            geometric_grid(
                parse_num("radius", lo)?,
                parse_num("radius", hi)?,
                parse_num("radius", k)?,
            )
        }
        None => parse_list("radius", value),
    }
}

impl ExperimentConfig {
    /// Sets one key from its text form (config files and CLI flags both go through here).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "n" => self.n = parse_list(key, value)?,
            "m" => self.library = LibraryRule::Fixed(parse_list(key, value)?),
            "m_log_coeff" => {
                self.library = LibraryRule::Log {
                    coeff: parse_num(key, value)?,
                }
            }
            "gamma_r" => self.gamma_r = parse_num(key, value)?,
            "gamma_c" => self.cache = value.parse()?,
            "epsilon" => self.epsilon = parse_num(key, value)?,
            "radius" => self.radius = RadiusRule::Fixed(parse_radii(value)?),
            "radius_rule" => match value {
                "theory" => self.radius = RadiusRule::Theory,
                "fixed" => {
                    if !matches!(self.radius, RadiusRule::Fixed(_)) {
                        self.radius = RadiusRule::Fixed(Vec::new());
                    }
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "radius_rule must be `fixed` or `theory`, got `{other}`"
                    )))
                }
            },
            "c1" => self.c1 = parse_num(key, value)?,
            "c2" => self.c2 = parse_num(key, value)?,
            "scheduler" => self.scheduler = value.parse()?,
            "exact_cap" => self.exact_cap = parse_num(key, value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "workers" => self.workers = parse_num(key, value)?,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown config key `{other}`"
                )))
            }
        }
        Ok(())
    }

    /// Applies a flat `key = value` file. `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(key.trim(), value).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return bad("n needs at least one value, all >= 1".into());
        }
        match &self.library {
            LibraryRule::Fixed(ms) if ms.is_empty() || ms.contains(&0) => {
                return bad("m needs at least one value, all >= 1".into())
            }
            LibraryRule::Log { coeff } if !(*coeff > 0.0 && coeff.is_finite()) => {
                return bad(format!("m_log_coeff must be positive, got {coeff}"))
            }
            _ => {}
        }
        if let RadiusRule::Fixed(rs) = &self.radius {
            if rs.is_empty() || rs.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                return bad("fixed radius rule needs at least one positive radius".into());
            }
        }
        if let CachePolicy::Zipf(g) = self.cache {
            if !(g >= 0.0 && g.is_finite()) {
                return bad(format!("gamma_c must be finite and >= 0, got {g}"));
            }
        }
        RegimeParams::new(self.gamma_r, self.epsilon, self.c1, self.c2)?;
        Ok(())
    }

    /// Cartesian product of the swept axes, in `n`, then `m`, then radius order.
    pub fn points(&self) -> Result<Vec<PointParams>> {
        self.validate()?;
        let params = RegimeParams::new(self.gamma_r, self.epsilon, self.c1, self.c2)?;
        let cache = match self.cache {
            CachePolicy::Optimal => CachePolicy::Zipf(optimal_gamma_c(self.gamma_r, self.epsilon)?),
            other => other,
        };
        let mut out = Vec::new();
        for &n in &self.n {
            let ms = match &self.library {
                LibraryRule::Fixed(ms) => ms.clone(),
                LibraryRule::Log { coeff } => vec![LibraryRule::log_size(*coeff, n)],
            };
            for m in ms {
                let radii = match &self.radius {
                    RadiusRule::Fixed(rs) => rs.clone(),
                    RadiusRule::Theory => vec![r_opt(n, m, &params)?],
                };
                for r in radii {
                    out.push(PointParams {
                        n,
                        m,
                        gamma_r: self.gamma_r,
                        cache,
                        epsilon: self.epsilon,
                        r,
                        scheduler: self.scheduler,
                        exact_cap: self.exact_cap,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// One fully resolved parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub n: usize,
    pub m: usize,
    pub gamma_r: f64,
    /// Never [`CachePolicy::Optimal`] once resolved.
    pub cache: CachePolicy,
    pub epsilon: f64,
    pub r: f64,
    pub scheduler: Method,
    pub exact_cap: usize,
}

impl PointParams {
    pub fn new(n: usize, m: usize, gamma_r: f64, gamma_c: f64, r: f64, scheduler: Method) -> Self {
        Self {
            n,
            m,
            gamma_r,
            cache: CachePolicy::Zipf(gamma_c),
            epsilon: DEFAULT_EPSILON,
            r,
            scheduler,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }

    /// Samples the world of one trial.
    pub fn sample_state(&self, seed: u64) -> Result<NetworkState> {
        let placement = sample_placement(self.n, &mut stream_rng(seed, Stream::Placement))?;
        let caches = match self.cache {
            CachePolicy::Zipf(g) => {
                let model = PopularityModel::zipf(self.m, g)?;
                sample_files(&model, self.n, &mut stream_rng(seed, Stream::Caches))
            }
            CachePolicy::MostPopular => assign_caches_most_popular(self.n, self.m)?,
            CachePolicy::Optimal => {
                return Err(Error::InvalidParameter(
                    "caching exponent not resolved".into(),
                ))
            }
        };
        let request_model = PopularityModel::zipf(self.m, self.gamma_r)?;
        let requests = sample_files(
            &request_model,
            self.n,
            &mut stream_rng(seed, Stream::Requests),
        );
        NetworkState::new(placement, caches, requests, self.r, self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialResult {
    /// Active links.
    pub l: usize,
    /// Good clusters.
    pub g: usize,
    pub potential_links: usize,
    pub self_served: usize,
    pub seed: u64,
}

/// Runs the full pipeline for one seed. The good-cluster count is computed for
/// every scheduler.
pub fn run_trial(point: &PointParams, seed: u64) -> Result<TrialResult> {
    let state = point.sample_state(seed)?;
    let (l, g, potential_links) = match point.scheduler {
        Method::Cluster => {
            let links = enumerate_potential_links(&state)?;
            let sched = cluster_schedule_on(&state, &links)?;
            (sched.len(), sched.good_clusters.unwrap_or(0), links.len())
        }
        method => {
            let cg = plan(&state)?;
            let sched = match method {
                Method::Exact => mis_exact(cg.graph(), point.exact_cap)?,
                _ => mis_greedy(cg.graph()),
            };
            let g = cluster_schedule_on(&state, cg.links())?
                .good_clusters
                .unwrap_or(0);
            (sched.len(), g, cg.num_vertices())
        }
    };
    Ok(TrialResult {
        l,
        g,
        potential_links,
        self_served: state.self_served(),
        seed,
    })
}

/// Sample mean with its standard error (absent for a single sample).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: Option<f64>,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let k = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / k;
        let se = (samples.len() >= 2).then(|| {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        });
        Self { mean, se }
    }
}

#[derive(Debug, Clone)]
pub struct MonteCarloSummary {
    pub l: Estimate,
    pub g: Estimate,
    pub potential_links: Estimate,
    pub self_served: Estimate,
    pub trials: Vec<TrialResult>,
}

/// Runs `trials` independent trials on the ambient rayon pool.
pub fn monte_carlo(
    point: &PointParams,
    trials: usize,
    master_seed: u64,
) -> Result<MonteCarloSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let results: Vec<TrialResult> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(point, master_seed.wrapping_add(i)))
        .collect::<Result<_>>()?;
    let column = |f: fn(&TrialResult) -> usize| {
        Estimate::from_samples(&results.iter().map(|t| f(t) as f64).collect::<Vec<_>>())
    };
    Ok(MonteCarloSummary {
        l: column(|t| t.l),
        g: column(|t| t.g),
        potential_links: column(|t| t.potential_links),
        self_served: column(|t| t.self_served),
        trials: results,
    })
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub point: PointParams,
    pub summary: MonteCarloSummary,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub trials: usize,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "n,m,gamma_r,gamma_c,epsilon,radius,scheduler,L_mean,L_se,G_mean,potential_mean,self_served_mean,trials,seed";

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let p = &row.point;
            let s = &row.summary;
            let gamma_c = match p.cache {
                CachePolicy::Zipf(g) => g.to_string(),
                CachePolicy::MostPopular => "most-popular".into(),
                CachePolicy::Optimal => "optimal".into(),
            };
            let se = s.l.se.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                p.n,
                p.m,
                p.gamma_r,
                gamma_c,
                p.epsilon,
                p.r,
                p.scheduler,
                s.l.mean,
                se,
                s.g.mean,
                s.potential_links.mean,
                s.self_served.mean,
                self.trials,
                self.seed
            )
            .expect("writing to a String");
        }
        out
    }
}

/// Monte Carlo at every point of the configuration, on `config.workers` threads.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepTable> {
    let points = config.points()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        points
            .into_iter()
            .map(|point| {
                monte_carlo(&point, config.trials, config.seed)
                    .map(|summary| SweepRow { point, summary })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepTable {
        rows,
        trials: config.trials,
        seed: config.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    N,
    M,
    Unspecified,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::N => "n",
            Axis::M => "m",
            Axis::Unspecified => "x",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub axis: Axis,
}

/// Ordinary least squares of `ln y` on `ln x`.
pub fn fit_scaling(points: &[(f64, f64)], axis: Axis) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InvalidData(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some((x, y)) = points
        .iter()
        .find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::InvalidData(format!(
            "log-log fit needs positive values, got ({x}, {y})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidData("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
        axis,
    })
}
