//! Command-line front end. Every subcommand is a pure function of its
//! resolved [`RunConfig`], so reruns produce identical bytes.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::analytic::{
    chernoff_left_tail, condensate_fraction, critical_t, mean_m, tail_lower_bound,
    tail_upper_bound, ThermalConfig,
};
use crate::sampler::{
    auto_extend, replicate, solve_chemical_potential, CanonicalSampler, GrandCanonicalSampler,
    SamplerError, WSampler,
};
use crate::spectrum::{
    analytic_weyl, build_spectrum, fit_weyl, load_spectrum, EnergySpectrum, TrapKind, WeylParams,
};
use crate::stats::histogram;
use crate::verify;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Cutoff used to start built-in spectra before automatic extension.
const START_CUTOFF: f64 = 64.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Run(String),
    #[error("verification failed: {}", .0.join(", "))]
    Failed(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) | CliError::Failed(_) => 1,
        }
    }
}

fn run_err(e: impl std::fmt::Display) -> CliError {
    CliError::Run(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "bosefluct", version, about = "Condensate fluctuations of trapped ideal Bose gases")]
struct Cli {
    /// Flat key=value file; command-line flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Levels and state counts of a trap.
    Spectrum(Flags),
    /// Condensate fraction over a grid of t/t_c.
    Fraction {
        #[command(flatten)]
        flags: Flags,
        /// Comma-separated t/t_c values.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Canonical occupation samples.
    SampleEnsemble(Flags),
    /// Samples of the limit variable W, with a JSON sidecar and a histogram.
    SampleW(Flags),
    /// Grand-canonical ground occupations at the matched chemical potential.
    GrandCanonical(Flags),
    /// Tail bounds for W at the given points.
    Bounds {
        #[command(flatten)]
        flags: Flags,
        /// Comma-separated x values.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
    },
    /// Run acceptance suites and print a JSON report.
    Verify {
        #[command(flatten)]
        flags: Flags,
        /// Suite to run (repeatable); all suites when omitted.
        #[arg(long)]
        suite: Vec<String>,
    },
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    /// Built-in trap (harmonic-1d/2d/3d, box-2d/3d) or a spectrum file.
    #[arg(long)]
    trap: Option<String>,
    #[arg(long)]
    scale: Option<f64>,
    /// Particle number.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    t_over_tc: Option<f64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Bound on the expected occupancy of omitted levels.
    #[arg(long)]
    cutoff_eps: Option<f64>,
    /// Mean-square accuracy of W samples.
    #[arg(long)]
    delta_w: Option<f64>,
    /// Energy cutoff for generated spectra (grown automatically when needed).
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long)]
    bins: Option<u64>,
    #[arg(long)]
    max_tries: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Fully resolved settings: flags, then the config file, then defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub trap: String,
    pub scale: f64,
    pub n: u64,
    pub t_over_tc: f64,
    pub samples: u64,
    pub seed: u64,
    pub cutoff_eps: f64,
    pub delta_w: f64,
    pub cutoff: Option<f64>,
    pub bins: u64,
    pub max_tries: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            trap: "harmonic-3d".into(),
            scale: 1.0,
            n: 10_000,
            t_over_tc: 0.5,
            samples: 1000,
            seed: 1,
            cutoff_eps: 1e-3,
            delta_w: 0.01,
            cutoff: None,
            bins: 50,
            max_tries: 100_000,
            out: None,
            format: Format::Csv,
        }
    }
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{v}`")))
}

fn parse_format(v: &str) -> Result<Format, CliError> {
    match v {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(CliError::Usage(format!("format must be csv or json, got `{v}`"))),
    }
}

impl RunConfig {
    fn resolve(flags: &Flags, file: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut c = RunConfig::default();
        for (k, v) in file {
            match k.as_str() {
                "trap" => c.trap = v.clone(),
                "scale" => c.scale = parse_value(k, v)?,
                "n" => c.n = parse_value(k, v)?,
                "t_over_tc" => c.t_over_tc = parse_value(k, v)?,
                "samples" => c.samples = parse_value(k, v)?,
                "seed" => c.seed = parse_value(k, v)?,
                "cutoff_eps" => c.cutoff_eps = parse_value(k, v)?,
                "delta_w" => c.delta_w = parse_value(k, v)?,
                "cutoff" => c.cutoff = Some(parse_value(k, v)?),
                "bins" => c.bins = parse_value(k, v)?,
                "max_tries" => c.max_tries = parse_value(k, v)?,
                "out" => c.out = Some(PathBuf::from(v)),
                "format" => c.format = parse_format(v)?,
                _ => return Err(CliError::Usage(format!("unknown config key `{k}`"))),
            }
        }
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = flags.$field.clone() {
                    c.$field = v;
                }
            };
        }
        take!(trap);
        take!(scale);
        take!(n);
        take!(t_over_tc);
        take!(samples);
        take!(seed);
        take!(cutoff_eps);
        take!(delta_w);
        take!(bins);
        take!(max_tries);
        if flags.cutoff.is_some() {
            c.cutoff = flags.cutoff;
        }
        if flags.out.is_some() {
            c.out = flags.out.clone();
        }
        if let Some(f) = &flags.format {
            c.format = parse_format(f)?;
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return bad(format!("scale must be positive, got {}", self.scale));
        }
        if !(self.t_over_tc > 0.0 && self.t_over_tc.is_finite()) {
            return bad(format!("t_over_tc must be positive, got {}", self.t_over_tc));
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.cutoff_eps > 0.0) {
            return bad(format!("cutoff_eps must be positive, got {}", self.cutoff_eps));
        }
        if !(self.delta_w > 0.0) {
            return bad(format!("delta_w must be positive, got {}", self.delta_w));
        }
        if let Some(c) = self.cutoff {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("cutoff must be positive, got {c}"));
            }
        }
        if self.bins == 0 {
            return bad("bins must be at least 1".into());
        }
        if self.max_tries == 0 {
            return bad("max_tries must be at least 1".into());
        }
        if self.trap.parse::<TrapKind>().is_err() && !Path::new(&self.trap).is_file() {
            return bad(format!(
                "trap `{}` is neither a built-in trap nor a readable file",
                self.trap
            ));
        }
        Ok(())
    }

    fn echo(&self) -> Vec<(String, String)> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        vec![
            ("trap".into(), self.trap.clone()),
            ("scale".into(), self.scale.to_string()),
            ("n".into(), self.n.to_string()),
            ("t_over_tc".into(), self.t_over_tc.to_string()),
            ("samples".into(), self.samples.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("cutoff_eps".into(), self.cutoff_eps.to_string()),
            ("delta_w".into(), self.delta_w.to_string()),
            ("cutoff".into(), opt(self.cutoff.map(|c| c.to_string()))),
            ("bins".into(), self.bins.to_string()),
            ("max_tries".into(), self.max_tries.to_string()),
            ("out".into(), opt(self.out.as_ref().map(|p| p.display().to_string()))),
            (
                "format".into(),
                match self.format {
                    Format::Csv => "csv".into(),
                    Format::Json => "json".into(),
                },
            ),
        ]
    }
}

/// A trap resolved to a spectrum and its Weyl constants.
struct Trap {
    spectrum: EnergySpectrum,
    weyl: WeylParams,
    fitted: bool,
}

fn resolve_trap(cfg: &RunConfig) -> Result<Trap, CliError> {
    if let Ok(kind) = cfg.trap.parse::<TrapKind>() {
        if kind != TrapKind::Custom {
            let cutoff = cfg.cutoff.unwrap_or(START_CUTOFF * cfg.scale);
            return Ok(Trap {
                spectrum: build_spectrum(kind, cfg.scale, cutoff).map_err(run_err)?,
                weyl: analytic_weyl(kind, cfg.scale).map_err(run_err)?,
                fitted: false,
            });
        }
    }
    let file = File::open(&cfg.trap).map_err(|e| CliError::Usage(format!("{}: {e}", cfg.trap)))?;
    let spectrum = load_spectrum(BufReader::new(file)).map_err(run_err)?;
    let e1 = spectrum
        .first_excited_energy()
        .ok_or_else(|| run_err("spectrum file has no excited level"))?;
    let top = spectrum.cutoff();
    if top < 10.0 * e1 {
        return Err(run_err(format!(
            "cannot fit Weyl constants: levels span [{e1}, {top}], need a factor of 10"
        )));
    }
    let grid: Vec<f64> = (0..8).map(|i| e1 * (top / e1).powf(i as f64 / 7.0)).collect();
    let fit = fit_weyl(&spectrum, &grid).map_err(run_err)?;
    Ok(Trap {
        spectrum,
        weyl: fit.params,
        fitted: true,
    })
}

/// Rows of plain cells, written as CSV or as a JSON document.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

struct Output<'a> {
    command: &'static str,
    cfg: &'a RunConfig,
    extra: Vec<(String, String)>,
}

impl Output<'_> {
    fn header(&self) -> String {
        let mut s = format!("# bosefluct {VERSION}\n# command: {}\n", self.command);
        for (k, v) in self.cfg.echo().into_iter().chain(self.extra.iter().cloned()) {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s
    }

    fn render(&self, table: &Table) -> String {
        match self.cfg.format {
            Format::Csv => {
                let mut s = self.header();
                s.push_str(&table.columns.join(","));
                s.push('\n');
                for r in &table.rows {
                    let line: Vec<String> = r.iter().map(cell).collect();
                    s.push_str(&line.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let config: serde_json::Map<String, Value> = self
                    .cfg
                    .echo()
                    .into_iter()
                    .map(|(k, v)| (k, Value::String(v)))
                    .collect();
                let extra: serde_json::Map<String, Value> = self
                    .extra
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect();
                let doc = json!({
                    "tool": "bosefluct",
                    "version": VERSION,
                    "command": self.command,
                    "config": config,
                    "info": extra,
                    "columns": table.columns,
                    "rows": table.rows,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

fn emit(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => write_file(path, text),
        None => stdout.write_all(text.as_bytes()).map_err(run_err),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    let f = File::create(path).map_err(|e| run_err(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(f);
    w.write_all(text.as_bytes()).map_err(run_err)?;
    w.flush().map_err(run_err)
}

fn sampler_err(e: SamplerError) -> CliError {
    run_err(e)
}

fn thermal(cfg: &RunConfig, weyl: WeylParams) -> Result<ThermalConfig, CliError> {
    ThermalConfig::at_ratio(cfg.n, cfg.t_over_tc, weyl).map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_spectrum(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let trap = resolve_trap(cfg)?;
    let s = &trap.spectrum;
    let rows = s
        .levels()
        .iter()
        .enumerate()
        .map(|(i, l)| vec![json!(i), json!(l.energy), json!(l.multiplicity), json!(s.cumulative_count(i))])
        .collect();
    let out = Output {
        command: "spectrum",
        cfg,
        extra: vec![
            ("energy_cutoff".into(), s.cutoff().to_string()),
            ("raw_ground_energy".into(), s.raw_ground_energy().to_string()),
            ("weyl_l".into(), trap.weyl.l.to_string()),
            ("weyl_alpha".into(), trap.weyl.alpha.to_string()),
            ("weyl_fitted".into(), trap.fitted.to_string()),
        ],
    };
    let table = Table {
        columns: vec!["level", "energy", "multiplicity", "count"],
        rows,
    };
    emit(cfg, &out.render(&table), stdout)
}

fn default_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

fn cmd_fraction(cfg: &RunConfig, grid: &[f64], stdout: &mut dyn Write) -> Result<(), CliError> {
    if grid.is_empty() || grid.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
        return Err(CliError::Usage("grid values must be positive".into()));
    }
    let mut trap = resolve_trap(cfg)?;
    let tc = critical_t(trap.weyl);
    let mut rows = Vec::new();
    for &r in grid {
        let p = condensate_fraction(r * tc, trap.weyl);
        let th = thermal(&RunConfig { t_over_tc: r, ..cfg.clone() }, trap.weyl)?;
        let em = auto_extend(&mut trap.spectrum, |s| Ok(mean_m(th.beta, s, 1e-6)?))
            .map_err(sampler_err)?;
        rows.push(vec![
            json!(r),
            json!(p.fraction),
            json!((1.0 - em / cfg.n as f64).max(0.0)),
            json!(r * tc),
            json!(p.outside_hypothesis),
        ]);
    }
    let out = Output {
        command: "fraction",
        cfg,
        extra: vec![
            ("t_c".into(), tc.to_string()),
            ("weyl_l".into(), trap.weyl.l.to_string()),
            ("weyl_alpha".into(), trap.weyl.alpha.to_string()),
        ],
    };
    let table = Table {
        columns: vec!["t_over_tc", "fraction", "fraction_finite_n", "t", "outside_hypothesis"],
        rows,
    };
    emit(cfg, &out.render(&table), stdout)
}

fn replicas(cfg: &RunConfig) -> Result<usize, CliError> {
    usize::try_from(cfg.samples).map_err(|_| CliError::Usage("samples too large".into()))
}

fn cmd_sample_ensemble(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut trap = resolve_trap(cfg)?;
    let th = thermal(cfg, trap.weyl)?;
    let sampler = auto_extend(&mut trap.spectrum, |s| {
        CanonicalSampler::from_config(s, &th, cfg.cutoff_eps, cfg.max_tries)
    })
    .map_err(sampler_err)?;
    let xs = replicate(replicas(cfg)?, cfg.seed, |_, rng| sampler.sample(rng)).map_err(sampler_err)?;
    let rows = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            vec![
                json!(i),
                json!(x.ground()),
                json!(x.excited()),
                json!(x.energy),
                json!(x.meta.acceptance_tries),
            ]
        })
        .collect();
    let out = Output {
        command: "sample-ensemble",
        cfg,
        extra: vec![
            ("temperature".into(), th.temperature.to_string()),
            ("retained_levels".into(), sampler.retained_levels().to_string()),
            ("truncation_epsilon".into(), sampler.truncation_epsilon().to_string()),
            ("weyl_l".into(), trap.weyl.l.to_string()),
            ("weyl_alpha".into(), trap.weyl.alpha.to_string()),
            ("weyl_fitted".into(), trap.fitted.to_string()),
        ],
    };
    let table = Table {
        columns: vec!["replica", "N0", "Ntot_excited", "Etot", "tries"],
        rows,
    };
    emit(cfg, &out.render(&table), stdout)
}

fn cmd_sample_w(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut trap = resolve_trap(cfg)?;
    let weyl = trap.weyl;
    let sampler = auto_extend(&mut trap.spectrum, |s| WSampler::new(s, weyl, cfg.delta_w))
        .map_err(sampler_err)?;
    let xs = replicate(replicas(cfg)?, cfg.seed, |_, rng| Ok(sampler.sample(rng)))
        .map_err(sampler_err)?;
    let m = sampler.meta();
    let sidecar = json!({
        "J": m.states,
        "delta": m.delta,
        "normalization": m.normalization,
        "levels": m.levels,
        "blocks": m.blocks,
        "l2_error": m.l2_error,
        "tail_l2": m.tail_l2,
        "weyl_l": weyl.l,
        "weyl_alpha": weyl.alpha,
        "weyl_fitted": trap.fitted,
        "samples": xs.len(),
        "seed": cfg.seed,
    });
    let sidecar_text = serde_json::to_string(&sidecar).expect("serializable");
    let hist = histogram(&xs, cfg.bins as usize).map_err(run_err)?;
    let out = Output {
        command: "sample-w",
        cfg,
        extra: vec![("sidecar".into(), sidecar_text.clone())],
    };
    let table = Table {
        columns: vec!["W"],
        rows: xs.iter().map(|x| vec![json!(x)]).collect(),
    };
    emit(cfg, &out.render(&table), stdout)?;
    if let Some(path) = &cfg.out {
        let mut hist_text = out.header();
        hist_text.push_str("bin_left,bin_right,count\n");
        for b in &hist {
            hist_text.push_str(&format!("{},{},{}\n", b.left, b.right, b.count));
        }
        write_file(&with_suffix(path, ".json"), &(sidecar_text + "\n"))?;
        write_file(&with_suffix(path, ".hist.csv"), &hist_text)?;
    }
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_grand_canonical(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut trap = resolve_trap(cfg)?;
    let th = thermal(cfg, trap.weyl)?;
    let mu = auto_extend(&mut trap.spectrum, |s| {
        solve_chemical_potential(s, th.temperature, cfg.n)
    })
    .map_err(sampler_err)?;
    let sampler = auto_extend(&mut trap.spectrum, |s| {
        GrandCanonicalSampler::new(s, th.temperature, mu, cfg.cutoff_eps)
    })
    .map_err(sampler_err)?;
    let xs = replicate(replicas(cfg)?, cfg.seed, |_, rng| Ok(sampler.sample(rng)))
        .map_err(sampler_err)?;
    let rows = xs
        .iter()
        .enumerate()
        .map(|(i, x)| vec![json!(i), json!(x.ground()), json!(x.total)])
        .collect();
    let out = Output {
        command: "grand-canonical",
        cfg,
        extra: vec![
            ("temperature".into(), th.temperature.to_string()),
            ("mu".into(), mu.to_string()),
            ("weyl_l".into(), trap.weyl.l.to_string()),
            ("weyl_alpha".into(), trap.weyl.alpha.to_string()),
            ("weyl_fitted".into(), trap.fitted.to_string()),
        ],
    };
    let table = Table {
        columns: vec!["replica", "N0", "Ntotal"],
        rows,
    };
    emit(cfg, &out.render(&table), stdout)
}

fn cmd_bounds(cfg: &RunConfig, xs: &[f64], stdout: &mut dyn Write) -> Result<(), CliError> {
    if xs.is_empty() || xs.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(CliError::Usage("x values must be positive".into()));
    }
    let mut trap = resolve_trap(cfg)?;
    let mut rows = Vec::new();
    for &x in xs {
        let (up, lo) = auto_extend(&mut trap.spectrum, |s| {
            Ok((tail_upper_bound(x, s)?, tail_lower_bound(x, s)?))
        })
        .map_err(sampler_err)?;
        let s = &trap.spectrum;
        let left = chernoff_left_tail(x, s, s.excited().len()).map_err(run_err)?;
        rows.push(vec![
            json!(x),
            json!(up.split),
            json!(up.probability),
            json!(lo.split),
            json!(lo.probability),
            json!(left),
        ]);
    }
    let out = Output {
        command: "bounds",
        cfg,
        extra: vec![("energy_cutoff".into(), trap.spectrum.cutoff().to_string())],
    };
    let table = Table {
        columns: vec!["x", "n_x", "upper", "n_x_lower", "lower", "chernoff_left"],
        rows,
    };
    emit(cfg, &out.render(&table), stdout)
}

fn cmd_verify(
    cfg: &RunConfig,
    suites: &[String],
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    for s in suites {
        if !verify::SUITES.contains(&s.as_str()) {
            return Err(CliError::Usage(format!(
                "unknown suite `{s}`; known: {}",
                verify::SUITES.join(", ")
            )));
        }
    }
    let reports = verify::run_all(suites, cfg.seed, stderr).map_err(run_err)?;
    let failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| r.suite.clone()).collect();
    let config: serde_json::Map<String, Value> =
        cfg.echo().into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    let doc = json!({
        "tool": "bosefluct",
        "version": VERSION,
        "config": config,
        "pass": failed.is_empty(),
        "suites": reports,
    });
    let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    emit(cfg, &text, stdout)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failed))
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit
/// code: 0 on success, 1 on a failed run or verification, 2 on usage errors.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    match &cli.command {
        Command::Spectrum(f) => cmd_spectrum(&RunConfig::resolve(f, &file)?, stdout),
        Command::Fraction { flags, grid } => {
            let grid = grid.clone().unwrap_or_else(default_grid);
            cmd_fraction(&RunConfig::resolve(flags, &file)?, &grid, stdout)
        }
        Command::SampleEnsemble(f) => cmd_sample_ensemble(&RunConfig::resolve(f, &file)?, stdout),
        Command::SampleW(f) => {
            let mut file = file;
            file.entry("trap".into()).or_insert_with(|| "harmonic-1d".into());
            cmd_sample_w(&RunConfig::resolve(f, &file)?, stdout)
        }
        Command::GrandCanonical(f) => cmd_grand_canonical(&RunConfig::resolve(f, &file)?, stdout),
        Command::Bounds { flags, x } => {
            let mut file = file;
            file.entry("trap".into()).or_insert_with(|| "harmonic-1d".into());
            let x = x.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0]);
            cmd_bounds(&RunConfig::resolve(flags, &file)?, &x, stdout)
        }
        Command::Verify { flags, suite } => {
            let mut file = file;
            file.entry("seed".into())
                .or_insert_with(|| verify::DEFAULT_SEED.to_string());
            cmd_verify(&RunConfig::resolve(flags, &file)?, suite, stdout, stderr)
        }
    }
}
