//! Command-line front end: argument and config-file handling, dataset
//! generation and error reporting.
//!
//! Exit codes: 0 success, 2 usage or I/O error, 3 numerical failure. Failures
//! print one JSON error record as the last line on stderr.

pub mod axis;
mod commands;
pub mod presets;
pub mod table;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

pub use axis::{AxisSpec, Spacing};
pub use commands::oracle_points;
pub use presets::{Dataset, Preset};
pub use table::{Cell, Format, Table};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "point-source",
    version,
    about = "Datasets for a decaying, evanescent point source of 1D quantum waves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArg,
    #[command(flatten)]
    pub opts: RawOptions,
}

#[derive(Subcommand, Debug, Clone)]
pub enum CommandArg {
    /// Density with its saddle, pole and interference parts over (v0, x, t).
    Density,
    /// Probability flux over (v0, x, t).
    Flux,
    /// Characteristic times over (v0, x).
    Times,
    /// Normalized interference amplitude at the first DIT minimum over (v0, x).
    DitMap,
    /// Figure dataset from a named preset.
    Figure {
        /// flux-origin, norm-factor, density-steady, density-decay, ratio,
        /// transition, dit-trace or dit-map
        #[arg(value_name = "PRESET")]
        name: Option<String>,
    },
    /// Compare the exact solution against an independent oracle.
    OracleCheck,
}

/// Flags as typed. Every field is also a config-file key (same name, no dashes prefix).
#[derive(Args, Debug, Clone, Default)]
pub struct RawOptions {
    /// Value, list (a,b,c) or grid (min:max:count[:lin|log]).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub v0: Option<String>,
    /// Position axis, same grammar as --v0.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Time axis, same grammar as --v0.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Axis grid, e.g. v0=0.01:0.5:20:log. Repeatable.
    #[arg(long = "grid", global = true, value_name = "AXIS=SPEC")]
    pub grid: Vec<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// csv (default) or json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Preset name for `figure`, alternative to the positional argument.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Relative tolerance for the normalization and contour quadratures.
    #[arg(long = "tol-quad", global = true)]
    pub tol_quad: Option<String>,
    /// Seed for oracle-check sample points.
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Number of oracle-check sample points.
    #[arg(long, global = true)]
    pub points: Option<String>,
    /// oracle-check method: quadrature (default) or cn.
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// oracle-check failure threshold on the relative error.
    #[arg(long = "max-rel-err", global = true)]
    pub max_rel_err: Option<String>,
    /// Crank-Nicolson grid spacing.
    #[arg(long, global = true)]
    pub dx: Option<String>,
    /// Crank-Nicolson time step.
    #[arg(long, global = true)]
    pub dt: Option<String>,
    /// Right end of the Crank-Nicolson comparison window.
    #[arg(long = "x-max", global = true)]
    pub x_max: Option<String>,
    /// Crank-Nicolson final time.
    #[arg(long = "t-final", global = true)]
    pub t_final: Option<String>,
    /// Flat `key = value` file with the same keys as the flags; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl RawOptions {
    fn slot(&mut self, key: &str) -> Option<&mut Option<String>> {
        Some(match key {
            "v0" => &mut self.v0,
            "x" => &mut self.x,
            "t" => &mut self.t,
            "out" => &mut self.out,
            "format" => &mut self.format,
            "preset" => &mut self.preset,
            "tol-quad" => &mut self.tol_quad,
            "seed" => &mut self.seed,
            "points" => &mut self.points,
            "method" => &mut self.method,
            "max-rel-err" => &mut self.max_rel_err,
            "dx" => &mut self.dx,
            "dt" => &mut self.dt,
            "x-max" => &mut self.x_max,
            "t-final" => &mut self.t_final,
            _ => return None,
        })
    }

    /// Fill unset options from `key = value` lines. `#` starts a comment.
    pub fn merge_config(&mut self, text: &str) -> Result<(), CliError> {
        let mut grids = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("config line {}: expected key = value", n + 1))
            })?;
            let key = key.trim().trim_start_matches("--").replace('_', "-");
            let value = value.trim().to_string();
            if key == "grid" {
                grids.push(value);
                continue;
            }
            if key == "config" {
                return Err(CliError::usage("config files cannot include other config files"));
            }
            let slot = self.slot(&key).ok_or_else(|| {
                CliError::usage(format!("config line {}: unknown key '{key}'", n + 1))
            })?;
            if slot.is_none() {
                *slot = Some(value);
            }
        }
        if self.grid.is_empty() {
            self.grid = grids;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Density,
    Flux,
    Times,
    DitMap,
    Figure(Preset),
    OracleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Density => "density",
            Command::Flux => "flux",
            Command::Times => "times",
            Command::DitMap => "dit-map",
            Command::Figure(_) => "figure",
            Command::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Quadrature,
    CrankNicolson,
}

/// Fully parsed run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub v0: Option<AxisSpec>,
    pub x: Option<AxisSpec>,
    pub t: Option<AxisSpec>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol_quad: Option<f64>,
    pub seed: u64,
    pub points: usize,
    pub method: OracleMethod,
    pub max_rel_err: Option<f64>,
    pub dx: f64,
    pub dt: f64,
    pub x_max: f64,
    pub t_final: f64,
}

/// A failed run: exit code plus the fields of the stderr error record.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub exit_code: i32,
    pub kind: String,
    pub message: String,
    /// Coordinates of the failing cell, if any.
    pub cell: Vec<(&'static str, f64)>,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            exit_code: EXIT_USAGE,
            kind: "UsageError".into(),
            message: message.into(),
            cell: Vec::new(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError {
            exit_code: EXIT_USAGE,
            kind: "IoError".into(),
            message: format!("{}: {e}", path.display()),
            cell: Vec::new(),
        }
    }

    pub fn numeric(e: crate::Error, cell: &[(&'static str, f64)]) -> Self {
        CliError {
            exit_code: EXIT_NUMERIC,
            kind: e.kind().into(),
            message: e.to_string(),
            cell: cell.to_vec(),
        }
    }

    pub fn record(&self) -> serde_json::Value {
        let mut cell = serde_json::Map::new();
        for (k, v) in &self.cell {
            cell.insert(
                k.to_string(),
                serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, Into::into),
            );
        }
        json!({
            "error": {
                "kind": self.kind,
                "message": self.message,
                "cell": if self.cell.is_empty() { serde_json::Value::Null } else { cell.into() },
                "exit_code": self.exit_code,
            }
        })
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &Option<String>) -> Result<Option<T>, CliError> {
    v.as_ref()
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| CliError::usage(format!("--{key}: cannot parse '{s}'")))
        })
        .transpose()
}

fn positive(key: &str, v: Option<f64>, default: f64) -> Result<f64, CliError> {
    let v = v.unwrap_or(default);
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::usage(format!("--{key} must be positive")))
    }
}

impl RunConfig {
    /// Resolve parsed flags, merging the config file if one is named.
    pub fn from_cli(cli: Cli) -> Result<RunConfig, CliError> {
        let mut o = cli.opts;
        if let Some(path) = o.config.clone() {
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            o.merge_config(&text)?;
        }
        let command = match cli.command {
            CommandArg::Density => Command::Density,
            CommandArg::Flux => Command::Flux,
            CommandArg::Times => Command::Times,
            CommandArg::DitMap => Command::DitMap,
            CommandArg::OracleCheck => Command::OracleCheck,
            CommandArg::Figure { name } => {
                let name = match (name, o.preset.clone()) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(CliError::usage(format!(
                            "preset given twice: '{a}' and '{b}'"
                        )))
                    }
                    (Some(a), _) => a,
                    (None, Some(b)) => b,
                    (None, None) => return Err(CliError::usage(preset_help())),
                };
                let p = Preset::from_name(&name).ok_or_else(|| {
                    CliError::usage(format!("unknown preset '{name}'. {}", preset_help()))
                })?;
                Command::Figure(p)
            }
        };
        if o.preset.is_some() && !matches!(command, Command::Figure(_)) {
            return Err(CliError::usage("--preset only applies to the figure command"));
        }
        let axis = |key: &str, v: &Option<String>| -> Result<Option<AxisSpec>, CliError> {
            v.as_ref()
                .map(|s| s.parse().map_err(|e| CliError::usage(format!("--{key}: {e}"))))
                .transpose()
        };
        let mut v0 = axis("v0", &o.v0)?;
        let mut x = axis("x", &o.x)?;
        let mut t = axis("t", &o.t)?;
        for g in &o.grid {
            let (name, spec) = g
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("--grid '{g}': expected AXIS=SPEC")))?;
            let slot = match name.trim() {
                "v0" => &mut v0,
                "x" => &mut x,
                "t" => &mut t,
                other => return Err(CliError::usage(format!("--grid: unknown axis '{other}'"))),
            };
            if slot.is_some() {
                return Err(CliError::usage(format!("axis '{}' given twice", name.trim())));
            }
            *slot = Some(axis(name.trim(), &Some(spec.to_string()))?.unwrap());
        }
        let format = match &o.format {
            Some(f) => f.parse().map_err(CliError::usage)?,
            None => Format::Csv,
        };
        let method = match o.method.as_deref().map(str::trim) {
            None | Some("quadrature") => OracleMethod::Quadrature,
            Some("cn") => OracleMethod::CrankNicolson,
            Some(m) => return Err(CliError::usage(format!("unknown method '{m}' (quadrature or cn)"))),
        };
        let tol_quad = parse_num::<f64>("tol-quad", &o.tol_quad)?;
        if let Some(tq) = tol_quad {
            if !(tq > 0.0 && tq < 1.0) {
                return Err(CliError::usage("--tol-quad must lie in (0, 1)"));
            }
        }
        let max_rel_err = parse_num::<f64>("max-rel-err", &o.max_rel_err)?;
        if matches!(max_rel_err, Some(m) if !(m > 0.0)) {
            return Err(CliError::usage("--max-rel-err must be positive"));
        }
        let points = parse_num::<usize>("points", &o.points)?.unwrap_or(100);
        if points == 0 {
            return Err(CliError::usage("--points must be at least 1"));
        }
        Ok(RunConfig {
            command,
            v0,
            x,
            t,
            out: o.out.map(PathBuf::from),
            format,
            tol_quad,
            seed: parse_num::<u64>("seed", &o.seed)?.unwrap_or(0),
            points,
            method,
            max_rel_err,
            dx: positive("dx", parse_num("dx", &o.dx)?, 0.01)?,
            dt: positive("dt", parse_num("dt", &o.dt)?, 2.5e-4)?,
            x_max: positive("x-max", parse_num("x-max", &o.x_max)?, 5.0)?,
            t_final: positive("t-final", parse_num("t-final", &o.t_final)?, 10.0)?,
        })
    }
}

fn preset_help() -> String {
    let names: Vec<&str> = presets::ALL.iter().map(|p| p.name()).collect();
    format!("figure needs a preset: {}", names.join(", "))
}

/// Result of a run: the dataset, plus a failure for oracle checks that
/// produced data but exceeded their threshold.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub failure: Option<CliError>,
}

/// Build the dataset for `cfg` without writing it.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut outcome = commands::dispatch(cfg)?;
    let t = &mut outcome.table;
    let mut meta = vec![
        ("tool".to_string(), format!("point-source {}", env!("CARGO_PKG_VERSION"))),
        ("format_version".to_string(), "1".to_string()),
        ("command".to_string(), cfg.command.name().to_string()),
    ];
    if let Command::Figure(p) = cfg.command {
        meta.push(("preset".into(), p.name().into()));
        meta.push(("description".into(), p.summary().into()));
    }
    meta.append(&mut t.metadata);
    meta.push(("rows".into(), t.rows.len().to_string()));
    t.metadata = meta;
    Ok(outcome)
}

/// Run and write the output; returns the process exit code.
pub fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    // Refuse unwritable paths before any work is done.
    let file = match &cfg.out {
        Some(path) => Some(File::create(path).map_err(|e| CliError::io(path, e))?),
        None => None,
    };
    let outcome = match run(cfg) {
        Ok(o) => o,
        Err(e) => {
            if let Some(path) = &cfg.out {
                drop(file);
                let _ = std::fs::remove_file(path);
            }
            return Err(e);
        }
    };
    let written = match (file, &cfg.out) {
        (Some(f), Some(path)) => {
            let mut w = std::io::BufWriter::new(f);
            outcome
                .table
                .write(&mut w, cfg.format)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(path, e))
        }
        _ => {
            let stdout = std::io::stdout();
            let mut w = std::io::BufWriter::new(stdout.lock());
            outcome
                .table
                .write(&mut w, cfg.format)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    };
    written?;
    match outcome.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

/// Entry point shared by the binary and the tests.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            if code != 0 {
                let rec = CliError::usage(e.kind().to_string()).record();
                eprintln!("{rec}");
            }
            return code;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| execute(&cfg));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            eprintln!("{}", e.record());
            e.exit_code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> Result<RunConfig, CliError> {
        let mut full = vec!["point-source"];
        full.extend_from_slice(args);
        let cli = Cli::try_parse_from(full).map_err(|e| CliError::usage(e.to_string()))?;
        RunConfig::from_cli(cli)
    }

    #[test]
    fn flags_parse() {
        let c = cfg(&["density", "--v0", "0.05", "--x", "1.5", "--t", "0.1:40:2000"]).unwrap();
        assert_eq!(c.command, Command::Density);
        assert_eq!(c.t.unwrap().values().len(), 2000);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn grid_flag_and_conflict() {
        let c = cfg(&["times", "--grid", "v0=0.1:0.5:3", "--x", "1"]).unwrap();
        assert_eq!(c.v0.unwrap().values(), vec![0.1, 0.30000000000000004, 0.5]);
        assert!(cfg(&["times", "--grid", "v0=0.1:0.5:3", "--v0", "1"]).is_err());
        assert!(cfg(&["times", "--grid", "y=0.1:0.5:3"]).is_err());
    }

    #[test]
    fn figure_presets() {
        let c = cfg(&["figure", "ratio"]).unwrap();
        assert_eq!(c.command, Command::Figure(Preset::Ratio));
        let c = cfg(&["figure", "--preset", "dit-map"]).unwrap();
        assert_eq!(c.command, Command::Figure(Preset::DitMap));
        assert_eq!(cfg(&["figure"]).unwrap_err().exit_code, EXIT_USAGE);
        assert!(cfg(&["figure", "fig9"]).is_err());
        assert!(cfg(&["density", "--preset", "ratio"]).is_err());
    }

    #[test]
    fn config_fills_but_flags_win() {
        let mut o = RawOptions {
            v0: Some("0.2".into()),
            ..Default::default()
        };
        o.merge_config("# comment\nv0 = 0.9\nx = 1,2  # trailing\ntol_quad=1e-9\ngrid = t=1:2:3\n")
            .unwrap();
        assert_eq!(o.v0.as_deref(), Some("0.2"));
        assert_eq!(o.x.as_deref(), Some("1,2"));
        assert_eq!(o.tol_quad.as_deref(), Some("1e-9"));
        assert_eq!(o.grid, vec!["t=1:2:3".to_string()]);
        assert!(o.clone().merge_config("colour = red").is_err());
        assert!(o.clone().merge_config("just words").is_err());
    }

    #[test]
    fn bad_values_are_usage_errors() {
        for args in [
            &["density", "--t", "1:0:5"][..],
            &["density", "--format", "xml"],
            &["oracle-check", "--points", "-3"],
            &["oracle-check", "--method", "euler"],
            &["density", "--tol-quad", "2"],
        ] {
            assert_eq!(cfg(args).unwrap_err().exit_code, EXIT_USAGE, "{args:?}");
        }
    }

    #[test]
    fn error_record_shape() {
        let e = CliError::numeric(crate::Error::Convergence("x".into()), &[("v0", 0.5), ("t", 1.0)]);
        let r = e.record();
        assert_eq!(r["error"]["kind"], "ConvergenceError");
        assert_eq!(r["error"]["cell"]["t"], 1.0);
        assert_eq!(r["error"]["exit_code"], 3);
    }
}
