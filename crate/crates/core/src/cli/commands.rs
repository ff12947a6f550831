use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::axis::AxisSpec;
use super::presets::{Dataset, Preset};
use super::table::{fmt_f64, Cell, Table};
use super::{CliError, Command, OracleMethod, Outcome, RunConfig};
use crate::analysis::{classify_crossings, dit_first_minimum_time, ratio_r};
use crate::asymptotics::{decompose, psi_interference};
use crate::error::Error;
use crate::oracle::{evolve_cn, pole_distance, psi_quadrature_with, ContourSettings, GridSpec};
use crate::source_model::{flux, norm_factor_with, psi_exact, NormSettings, SourceParams};

pub const DENSITY_COLUMNS: [&str; 10] = [
    "v0", "x", "t", "rho", "norm", "rho_n", "rho_saddle", "rho_pole", "psi_int", "rho_approx",
];
pub const FLUX_COLUMNS: [&str; 6] = ["v0", "x", "t", "flux", "norm", "flux_n"];
pub const TIMES_COLUMNS: [&str; 10] = [
    "v0", "x", "t_c", "t_max_saddle", "bl_time", "scenario", "n_crossings", "crossings", "t_p",
    "t_min1",
];
pub const DIT_MAP_COLUMNS: [&str; 5] = ["v0", "x", "norm", "t_min1", "amplitude"];
pub const NORM_COLUMNS: [&str; 2] = ["v0", "norm"];
pub const RATIO_COLUMNS: [&str; 4] = ["v0", "x", "t", "ratio"];
pub const TRANSITION_COLUMNS: [&str; 7] = ["v0", "x", "t_c", "scenario", "n_crossings", "t_p", "rho_n_tp"];
pub const QUADRATURE_CHECK_COLUMNS: [&str; 9] = [
    "v0", "x", "t", "exact_re", "exact_im", "quad_re", "quad_im", "abs_err", "rel_err",
];
pub const CN_CHECK_COLUMNS: [&str; 6] = ["t", "x", "cn_re", "cn_im", "exact_re", "exact_im"];

const NORM_NOTE: &str =
    "columns after norm are divided by N(v0); at v0 = 0 N diverges, norm is empty and they are unscaled";

struct Axes {
    v0: Vec<f64>,
    x: Vec<f64>,
    t: Vec<f64>,
}

fn need(name: &str, spec: &Option<AxisSpec>, cmd: &str) -> Result<AxisSpec, CliError> {
    spec.clone()
        .ok_or_else(|| CliError::usage(format!("{cmd} needs --{name}")))
}

fn forbid(name: &str, spec: &Option<AxisSpec>, cmd: &str) -> Result<(), CliError> {
    match spec {
        Some(_) => Err(CliError::usage(format!("{cmd} does not take --{name}"))),
        None => Ok(()),
    }
}

fn check_axis(name: &str, vals: &[f64], lo: f64, hi: f64) -> Result<(), CliError> {
    match vals.iter().find(|&&v| !(v >= lo && v <= hi)) {
        Some(v) => Err(CliError::usage(format!(
            "{name} = {} outside [{}, {}]",
            fmt_f64(*v),
            fmt_f64(lo),
            fmt_f64(hi)
        ))),
        None => Ok(()),
    }
}

fn resolve(
    table: &mut Table,
    v0: AxisSpec,
    x: Option<AxisSpec>,
    t: Option<AxisSpec>,
) -> Result<Axes, CliError> {
    table.meta("v0", v0.to_string());
    let v0 = v0.values();
    check_axis("v0", &v0, 0.0, 1.0)?;
    let x = match x {
        Some(s) => {
            table.meta("x", s.to_string());
            let v = s.values();
            check_axis("x", &v, 0.0, f64::MAX)?;
            v
        }
        None => Vec::new(),
    };
    let t = match t {
        Some(s) => {
            table.meta("t", s.to_string());
            let v = s.values();
            check_axis("t", &v, 0.0, f64::MAX)?;
            v
        }
        None => Vec::new(),
    };
    Ok(Axes { v0, x, t })
}

fn norm_settings(cfg: &RunConfig) -> NormSettings<f64> {
    let mut s = NormSettings::default();
    if let Some(tq) = cfg.tol_quad {
        s.rel_tol = tq;
    }
    s
}

fn params(v0: f64) -> Result<SourceParams<f64>, CliError> {
    SourceParams::new(v0).map_err(|e| CliError::numeric(e, &[("v0", v0)]))
}

/// `N(v0)` per axis value; `None` at `v0 = 0` when `allow_zero`.
fn norms(cfg: &RunConfig, v0s: &[f64], allow_zero: bool) -> Result<Vec<Option<f64>>, CliError> {
    let settings = norm_settings(cfg);
    let res: Vec<Result<Option<f64>, CliError>> = v0s
        .par_iter()
        .map(|&v0| {
            if v0 == 0.0 && allow_zero {
                return Ok(None);
            }
            let p = params(v0)?;
            norm_factor_with(&p, settings)
                .map(Some)
                .map_err(|e| CliError::numeric(e, &[("v0", v0)]))
        })
        .collect();
    res.into_iter().collect()
}

/// Evaluate cells in parallel; the first failure in cell order is reported.
fn eval<C, F>(cells: &[C], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    C: Sync,
    F: Fn(&C) -> Result<Vec<Cell>, CliError> + Sync + Send,
{
    let res: Vec<Result<Vec<Cell>, CliError>> = cells.par_iter().map(f).collect();
    res.into_iter().collect()
}

fn grid3(a: &Axes, norms: &[Option<f64>]) -> Vec<(f64, Option<f64>, f64, f64)> {
    let mut out = Vec::with_capacity(a.v0.len() * a.x.len() * a.t.len());
    for (i, &v0) in a.v0.iter().enumerate() {
        for &x in &a.x {
            for &t in &a.t {
                out.push((v0, norms[i], x, t));
            }
        }
    }
    out
}

fn grid2(a: &Axes) -> Vec<(f64, f64)> {
    a.v0.iter()
        .flat_map(|&v0| a.x.iter().map(move |&x| (v0, x)))
        .collect()
}

fn density_table(cfg: &RunConfig, mut table: Table, a: Axes) -> Result<Table, CliError> {
    table.meta("normalization", NORM_NOTE);
    table.meta("norm_rel_tol", fmt_f64(norm_settings(cfg).rel_tol));
    let n = norms(cfg, &a.v0, true)?;
    let cells = grid3(&a, &n);
    table.rows = eval(&cells, |&(v0, n, x, t)| {
        let at = [("v0", v0), ("x", x), ("t", t)];
        let p = params(v0)?;
        let d = decompose(&p, x, t).map_err(|e| CliError::numeric(e, &at))?;
        let s = 1.0 / n.unwrap_or(1.0);
        let rho = d.psi_exact.norm_sqr();
        Ok(vec![
            v0.into(),
            x.into(),
            t.into(),
            rho.into(),
            n.into(),
            (rho * s).into(),
            (d.psi_saddle.norm_sqr() * s).into(),
            (d.psi_pole.norm_sqr() * s).into(),
            (d.psi_interference * s).into(),
            (d.psi_approx.norm_sqr() * s).into(),
        ])
    })?;
    Ok(table)
}

fn flux_table(cfg: &RunConfig, mut table: Table, a: Axes) -> Result<Table, CliError> {
    table.meta("normalization", NORM_NOTE);
    table.meta("norm_rel_tol", fmt_f64(norm_settings(cfg).rel_tol));
    let n = norms(cfg, &a.v0, true)?;
    let cells = grid3(&a, &n);
    table.rows = eval(&cells, |&(v0, n, x, t)| {
        let p = params(v0)?;
        let j = flux(&p, x, t).map_err(|e| CliError::numeric(e, &[("v0", v0), ("x", x), ("t", t)]))?;
        Ok(vec![
            v0.into(),
            x.into(),
            t.into(),
            j.into(),
            n.into(),
            (j / n.unwrap_or(1.0)).into(),
        ])
    })?;
    Ok(table)
}

fn no_minimum_as_empty(r: crate::Result<f64>) -> crate::Result<Option<f64>> {
    match r {
        Ok(t) => Ok(Some(t)),
        Err(Error::NoMinimum { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn times_table(mut table: Table, a: Axes) -> Result<Table, CliError> {
    let cells = grid2(&a);
    table.rows = eval(&cells, |&(v0, x)| {
        let at = [("v0", v0), ("x", x)];
        let p = params(v0)?;
        let ts = classify_crossings(&p, x).map_err(|e| CliError::numeric(e, &at))?;
        let t_min1 =
            no_minimum_as_empty(dit_first_minimum_time(&p, x)).map_err(|e| CliError::numeric(e, &at))?;
        let crossings: Vec<String> = ts.crossings.iter().map(|&c| fmt_f64(c)).collect();
        Ok(vec![
            v0.into(),
            x.into(),
            ts.t_c.into(),
            ts.t_max_saddle.into(),
            ts.bl_time.into(),
            Cell::Text(ts.scenario.as_str().into()),
            Cell::Int(ts.crossings.len() as u64),
            Cell::Text(crossings.join(";")),
            ts.t_p.into(),
            t_min1.into(),
        ])
    })?;
    Ok(table)
}

fn dit_map_table(cfg: &RunConfig, mut table: Table, a: Axes) -> Result<Table, CliError> {
    table.meta("norm_rel_tol", fmt_f64(norm_settings(cfg).rel_tol));
    table.meta("amplitude", "|psi_int(x, t_min1)| / N(v0); empty where no minimum follows t_c");
    let n = norms(cfg, &a.v0, false)?;
    let mut cells = Vec::new();
    for (i, &v0) in a.v0.iter().enumerate() {
        for &x in &a.x {
            cells.push((v0, n[i].unwrap(), x));
        }
    }
    table.rows = eval(&cells, |&(v0, n, x)| {
        let at = [("v0", v0), ("x", x)];
        let p = params(v0)?;
        let t_min =
            no_minimum_as_empty(dit_first_minimum_time(&p, x)).map_err(|e| CliError::numeric(e, &at))?;
        let amp = match t_min {
            Some(t) => Some(
                psi_interference(&p, x, t)
                    .map_err(|e| CliError::numeric(e, &[("v0", v0), ("x", x), ("t", t)]))?
                    .abs()
                    / n,
            ),
            None => None,
        };
        Ok(vec![v0.into(), x.into(), n.into(), t_min.into(), amp.into()])
    })?;
    Ok(table)
}

fn norm_table(cfg: &RunConfig, mut table: Table, a: Axes) -> Result<Table, CliError> {
    table.meta("norm_rel_tol", fmt_f64(norm_settings(cfg).rel_tol));
    let n = norms(cfg, &a.v0, false)?;
    table.rows = a
        .v0
        .iter()
        .zip(n)
        .map(|(&v0, n)| vec![v0.into(), n.into()])
        .collect();
    Ok(table)
}

fn ratio_table(mut table: Table, a: Axes) -> Result<Table, CliError> {
    table.meta("ratio", "|psi_0 / psi_S|^2, zero before t_c");
    let cells = grid3(&a, &vec![None; a.v0.len()]);
    table.rows = eval(&cells, |&(v0, _, x, t)| {
        let p = params(v0)?;
        let r = ratio_r(&p, x, t).map_err(|e| CliError::numeric(e, &[("v0", v0), ("x", x), ("t", t)]))?;
        Ok(vec![v0.into(), x.into(), t.into(), r.into()])
    })?;
    Ok(table)
}

fn transition_table(cfg: &RunConfig, mut table: Table, a: Axes) -> Result<Table, CliError> {
    table.meta("norm_rel_tol", fmt_f64(norm_settings(cfg).rel_tol));
    table.meta("rho_n_tp", "|psi(x, t_p)|^2 / N(v0); empty without a crossing");
    let n = norms(cfg, &a.v0, false)?;
    let mut cells = Vec::new();
    for (i, &v0) in a.v0.iter().enumerate() {
        for &x in &a.x {
            cells.push((v0, n[i].unwrap(), x));
        }
    }
    table.rows = eval(&cells, |&(v0, n, x)| {
        let at = [("v0", v0), ("x", x)];
        let p = params(v0)?;
        let ts = classify_crossings(&p, x).map_err(|e| CliError::numeric(e, &at))?;
        let rho = match ts.t_p {
            Some(t) => Some(
                psi_exact(&p, x, t)
                    .map_err(|e| CliError::numeric(e, &[("v0", v0), ("x", x), ("t", t)]))?
                    .norm_sqr()
                    / n,
            ),
            None => None,
        };
        Ok(vec![
            v0.into(),
            x.into(),
            ts.t_c.into(),
            Cell::Text(ts.scenario.as_str().into()),
            Cell::Int(ts.crossings.len() as u64),
            ts.t_p.into(),
            rho.into(),
        ])
    })?;
    Ok(table)
}

/// Random `(v0, x, t)` with `v0 in [0, 1)`, `x in [0, 10)`, `t in [0.05, 30)`,
/// redrawn when `|t - t_c| < 0.01` or the contour passes too close to a pole.
pub fn oracle_points(seed: u64, count: usize) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v0: f64 = rng.gen_range(0.0..1.0);
        let x: f64 = rng.gen_range(0.0..10.0);
        let t: f64 = rng.gen_range(0.05..30.0);
        let p = SourceParams::new(v0).expect("v0 in range");
        if (t - p.t_c(x)).abs() < 0.01 || pole_distance(&p, x, t) < 2.0 * crate::oracle::contour::POLE_CLEARANCE {
            continue;
        }
        out.push((v0, x, t));
    }
    out.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
    });
    out
}

fn quadrature_check(cfg: &RunConfig, mut table: Table) -> Result<Outcome, CliError> {
    let mut settings = ContourSettings::default();
    if let Some(tq) = cfg.tol_quad {
        settings.rel_tol = tq;
    }
    let limit = cfg.max_rel_err.unwrap_or(1e-8);
    table.meta("seed", cfg.seed.to_string());
    table.meta("points", cfg.points.to_string());
    table.meta("contour_rel_tol", fmt_f64(settings.rel_tol));
    table.meta("max_rel_err", fmt_f64(limit));
    let pts = oracle_points(cfg.seed, cfg.points);
    let res: Vec<Result<(Vec<Cell>, f64), CliError>> = pts
        .par_iter()
        .map(|&(v0, x, t)| {
            let at = [("v0", v0), ("x", x), ("t", t)];
            let p = params(v0)?;
            let e = psi_exact(&p, x, t).map_err(|e| CliError::numeric(e, &at))?;
            let q = psi_quadrature_with(&p, x, t, false, settings).map_err(|e| CliError::numeric(e, &at))?;
            let abs = (e - q).norm();
            let rel = abs / e.norm();
            Ok((
                vec![
                    v0.into(),
                    x.into(),
                    t.into(),
                    e.re.into(),
                    e.im.into(),
                    q.re.into(),
                    q.im.into(),
                    abs.into(),
                    rel.into(),
                ],
                rel,
            ))
        })
        .collect();
    let rows = res.into_iter().collect::<Result<Vec<_>, _>>()?;
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    table.meta("max_observed_rel_err", fmt_f64(worst));
    let failure = pts.iter().zip(&rows).find(|(_, r)| !(r.1 <= limit)).map(|(&(v0, x, t), r)| CliError {
        exit_code: super::EXIT_NUMERIC,
        kind: "OracleMismatch".into(),
        message: format!("relative error {} exceeds {}", fmt_f64(r.1), fmt_f64(limit)),
        cell: vec![("v0", v0), ("x", x), ("t", t)],
    });
    table.rows = rows.into_iter().map(|r| r.0).collect();
    Ok(Outcome { table, failure })
}

fn cn_check(cfg: &RunConfig, mut table: Table) -> Result<Outcome, CliError> {
    let v0s = cfg.v0.clone().unwrap_or(AxisSpec::single(0.1)).values();
    if v0s.len() != 1 {
        return Err(CliError::usage("oracle-check --method cn takes a single --v0"));
    }
    let v0 = v0s[0];
    check_axis("v0", &v0s, 0.0, 1.0)?;
    let limit = cfg.max_rel_err.unwrap_or(1e-3);
    let p = params(v0)?;
    let mut g = GridSpec::new(cfg.dx, cfg.dt, cfg.x_max + 3.0, cfg.t_final);
    g.store_x_max = Some(cfg.x_max);
    table.meta("v0", fmt_f64(v0));
    table.meta("dx", fmt_f64(cfg.dx));
    table.meta("dt", fmt_f64(cfg.dt));
    table.meta("x_domain", fmt_f64(g.x_domain));
    table.meta("t_final", fmt_f64(cfg.t_final));
    table.meta("boundary", "transparent");
    table.meta("ramp_width", fmt_f64(g.ramp_width));
    let at = [("v0", v0)];
    let field = evolve_cn(&p, &g).map_err(|e| CliError::numeric(e, &at))?;
    let t_min = 0.5f64.min(cfg.t_final);
    let rel = field
        .relative_l2(cfg.x_max, t_min, |x, t| psi_exact(&p, x, t))
        .map_err(|e| CliError::numeric(e, &at))?;
    table.meta("relative_l2", fmt_f64(rel));
    table.meta("relative_l2_window", format!("x <= {}, t >= {}", fmt_f64(cfg.x_max), fmt_f64(t_min)));
    table.meta("final_content", fmt_f64(field.final_content));
    table.meta("inflow", fmt_f64(field.inflow));
    table.meta("outflow", fmt_f64(field.outflow));
    table.meta("max_balance_residual", fmt_f64(field.max_balance_residual));
    table.meta("max_rel_err", fmt_f64(limit));
    let mut cells = Vec::new();
    for (n, &t) in field.times.iter().enumerate() {
        if t < t_min {
            continue;
        }
        for (j, &x) in field.positions.iter().enumerate() {
            cells.push((n, j, t, x));
        }
    }
    table.rows = eval(&cells, |&(n, j, t, x)| {
        let e = psi_exact(&p, x, t).map_err(|e| CliError::numeric(e, &[("v0", v0), ("x", x), ("t", t)]))?;
        let c = field.values[n][j];
        Ok(vec![t.into(), x.into(), c.re.into(), c.im.into(), e.re.into(), e.im.into()])
    })?;
    let failure = (!(rel <= limit)).then(|| CliError {
        exit_code: super::EXIT_NUMERIC,
        kind: "OracleMismatch".into(),
        message: format!("relative L2 error {} exceeds {}", fmt_f64(rel), fmt_f64(limit)),
        cell: vec![("v0", v0)],
    });
    Ok(Outcome { table, failure })
}

fn ok(table: Table) -> Outcome {
    Outcome {
        table,
        failure: None,
    }
}

pub(super) fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let name = cfg.command.name();
    match cfg.command {
        Command::Density | Command::Flux => {
            let v0 = need("v0", &cfg.v0, name)?;
            let x = need("x", &cfg.x, name)?;
            let t = need("t", &cfg.t, name)?;
            let cols: &[&'static str] = if cfg.command == Command::Density {
                &DENSITY_COLUMNS
            } else {
                &FLUX_COLUMNS
            };
            let mut table = Table::new(cols);
            let a = resolve(&mut table, v0, Some(x), Some(t))?;
            if cfg.command == Command::Density {
                density_table(cfg, table, a).map(ok)
            } else {
                flux_table(cfg, table, a).map(ok)
            }
        }
        Command::Times | Command::DitMap => {
            forbid("t", &cfg.t, name)?;
            let v0 = need("v0", &cfg.v0, name)?;
            let x = need("x", &cfg.x, name)?;
            if cfg.command == Command::Times {
                let mut table = Table::new(&TIMES_COLUMNS);
                let a = resolve(&mut table, v0, Some(x), None)?;
                times_table(table, a).map(ok)
            } else {
                let mut table = Table::new(&DIT_MAP_COLUMNS);
                let a = resolve(&mut table, v0, Some(x), None)?;
                dit_map_table(cfg, table, a).map(ok)
            }
        }
        Command::Figure(preset) => figure(cfg, preset).map(ok),
        Command::OracleCheck => match cfg.method {
            OracleMethod::Quadrature => {
                for (n, s) in [("v0", &cfg.v0), ("x", &cfg.x), ("t", &cfg.t)] {
                    forbid(n, s, "oracle-check --method quadrature")?;
                }
                let mut table = Table::new(&QUADRATURE_CHECK_COLUMNS);
                table.meta("method", "quadrature");
                quadrature_check(cfg, table)
            }
            OracleMethod::CrankNicolson => {
                forbid("x", &cfg.x, "oracle-check --method cn")?;
                forbid("t", &cfg.t, "oracle-check --method cn")?;
                let mut table = Table::new(&CN_CHECK_COLUMNS);
                table.meta("method", "cn");
                cn_check(cfg, table)
            }
        },
    }
}

fn figure(cfg: &RunConfig, preset: Preset) -> Result<Table, CliError> {
    let d = preset.axes();
    let v0 = cfg.v0.clone().unwrap_or(d.v0);
    let x = match d.x {
        Some(def) => Some(cfg.x.clone().unwrap_or(def)),
        None => {
            forbid("x", &cfg.x, preset.name())?;
            None
        }
    };
    let t = match d.t {
        Some(def) => Some(cfg.t.clone().unwrap_or(def)),
        None => {
            forbid("t", &cfg.t, preset.name())?;
            None
        }
    };
    let cols: &[&'static str] = match preset.dataset() {
        Dataset::Density => &DENSITY_COLUMNS,
        Dataset::Flux => &FLUX_COLUMNS,
        Dataset::Norm => &NORM_COLUMNS,
        Dataset::Ratio => &RATIO_COLUMNS,
        Dataset::Transition => &TRANSITION_COLUMNS,
        Dataset::DitMap => &DIT_MAP_COLUMNS,
    };
    let mut table = Table::new(cols);
    let a = resolve(&mut table, v0, x, t)?;
    match preset.dataset() {
        Dataset::Density => density_table(cfg, table, a),
        Dataset::Flux => flux_table(cfg, table, a),
        Dataset::Norm => norm_table(cfg, table, a),
        Dataset::Ratio => ratio_table(table, a),
        Dataset::Transition => transition_table(cfg, table, a),
        Dataset::DitMap => dit_map_table(cfg, table, a),
    }
}
