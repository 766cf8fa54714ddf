//! Grid evaluation of moments and prediction errors.

use fracmom::distributions::{stable_moment, StableParams};
use fracmom::quad::QuadratureConfig;
use rayon::prelude::*;

use crate::model::{moment_cells, prediction_cells, ModelArgs};
use crate::table::{Cell, Table};
use crate::CliError;

/// One swept variable with its values.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    /// `name=lo:hi:step`, `name=v1,v2,...` or `name=v`.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Usage(format!("grid '{spec}': {why}"));
        let (name, body) = spec.split_once('=').ok_or_else(|| bad("expected name=values"))?;
        let name = name.trim().to_string();
        if !ModelArgs::GRID_VARS.contains(&name.as_str()) {
            return Err(bad(&format!("unknown variable; choose from {}", ModelArgs::GRID_VARS.join(", "))));
        }
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("bad number '{s}'")));
        let values = if body.contains(':') {
            let parts: Vec<&str> = body.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("ranges are lo:hi:step"));
            }
            let (lo, hi, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
            range(lo, hi, step).ok_or_else(|| bad("need lo <= hi and step > 0"))?
        } else {
            body.split(',').map(parse).collect::<Result<Vec<_>, _>>()?
        };
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(bad("no finite values"));
        }
        Ok(Self { name, values })
    }
}

/// `lo, lo + step, ...` up to `hi`, endpoints included up to rounding.
pub fn range(lo: f64, hi: f64, step: f64) -> Option<Vec<f64>> {
    if !(step > 0.0 && lo <= hi) {
        return None;
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    // decimal steps such as 0.1 are generated as k / 10 to keep exact decimals
    let inv = (1.0 / step).round();
    let k0 = (lo * inv).round();
    if (1.0 / step - inv).abs() < 1e-9 * inv && (lo * inv - k0).abs() < 1e-9 * k0.abs().max(1.0) {
        return Some((0..n).map(|i| (k0 + i as f64) / inv).collect());
    }
    Some((0..n).map(|i| lo + i as f64 * step).collect())
}

/// Evaluates the family moment (or the application error with `--model`) at
/// every point of the product grid, first axis slowest.
pub fn sweep(base: &ModelArgs, axes: &[Axis], cfg: &QuadratureConfig) -> Result<Table, CliError> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(CliError::Usage("sweep takes one or two --grid axes".into()));
    }
    if axes.len() == 2 && axes[0].name == axes[1].name {
        return Err(CliError::Usage("grid axes must differ".into()));
    }
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let app = base.model.is_some();
    let rows: Vec<Result<Vec<Cell>, CliError>> = points
        .par_iter()
        .map(|p| {
            let mut args = base.clone();
            for (axis, &v) in axes.iter().zip(p) {
                args.set(&axis.name, v)?;
            }
            let mut row: Vec<Cell> = p.iter().map(|&v| Cell::Num(v)).collect();
            if app {
                row.extend(prediction_cells(&args.predict()?));
            } else {
                row.extend(moment_cells(&args.moment(cfg)?));
            }
            Ok(row)
        })
        .collect();
    let mut header: Vec<&str> = axes.iter().map(|a| a.name.as_str()).collect();
    if app {
        header.extend(["value", "error_scale", "error_skewness"]);
    } else {
        header.extend(["value", "abs_err_est", "method"]);
    }
    let mut table = Table::new(&header);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

/// Parameters of the two-panel stable preset.
pub const FIGURE1_ALPHA: f64 = 1.8;
pub const FIGURE1_LAMBDA: f64 = 0.5;

/// `E|X - mu|^1.5` for stable `alpha = 1.8`, `sigma = 1`: against `mu` on
/// `[-5, 5]` for `beta` in {-1, 0, 1}, and against `beta` on `[-1, 1]` for
/// `mu` in {0, 1, 2}.
pub fn figure1(cfg: &QuadratureConfig) -> Result<(Table, Table), CliError> {
    let eval = |beta: f64, mu: f64| -> Result<f64, CliError> {
        let p = StableParams::new(FIGURE1_ALPHA, beta, 1.0, 0.0)?;
        Ok(stable_moment(&p, mu, FIGURE1_LAMBDA, cfg)?.value)
    };
    let mus = range(-5.0, 5.0, 0.1).expect("valid range");
    let betas = range(-1.0, 1.0, 0.05).expect("valid range");
    let grid = |outer: &[f64], inner: &[f64], swap: bool| -> Result<Table, CliError> {
        let pts: Vec<(f64, f64)> =
            outer.iter().flat_map(|&o| inner.iter().map(move |&i| (o, i))).collect();
        let vals: Vec<Result<f64, CliError>> = pts
            .par_iter()
            .map(|&(o, i)| if swap { eval(i, o) } else { eval(o, i) })
            .collect();
        let mut t = if swap { Table::new(&["mu", "beta", "value"]) } else { Table::new(&["beta", "mu", "value"]) };
        for (&(o, i), v) in pts.iter().zip(vals) {
            t.push(vec![o.into(), i.into(), v?.into()]);
        }
        Ok(t)
    };
    let by_mu = grid(&[-1.0, 0.0, 1.0], &mus, false)?;
    let by_beta = grid(&[0.0, 1.0, 2.0], &betas, true)?;
    Ok((by_mu, by_beta))
}
