//! Estimation errors of least-squares intercept and slope for a design read from CSV.

use std::path::Path;

use clap::ValueEnum;
use fracmom::applications::{regression_errors, RegressionDesign, RegressionNoise};

use crate::table::{Cell, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseKind {
    /// Independent symmetric stable errors.
    Iid,
    /// Elliptically contoured stable error vector.
    Elliptical,
    /// Multivariate Linnik error vector.
    Linnik,
}

impl NoiseKind {
    pub fn noise(self, alpha: f64, beta: f64) -> RegressionNoise {
        match self {
            NoiseKind::Iid => RegressionNoise::IidSymmetricStable { alpha },
            NoiseKind::Elliptical => RegressionNoise::EllipticalStable { alpha },
            NoiseKind::Linnik => RegressionNoise::MultivariateLinnik { alpha, beta },
        }
    }

    fn name(self) -> &'static str {
        match self {
            NoiseKind::Iid => "iid",
            NoiseKind::Elliptical => "elliptical",
            NoiseKind::Linnik => "linnik",
        }
    }
}

/// Numeric column `x` of a CSV file with a header row.
pub fn read_x(path: &Path) -> Result<Vec<f64>, CliError> {
    let usage = |m: String| CliError::Usage(format!("{}: {m}", path.display()));
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| usage(e.to_string()))?;
    let col = rdr
        .headers()
        .map_err(|e| usage(e.to_string()))?
        .iter()
        .position(|h| h == "x")
        .ok_or_else(|| usage("no column named x".into()))?;
    let mut xs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| usage(e.to_string()))?;
        let cell = rec.get(col).unwrap_or("");
        xs.push(cell.parse::<f64>().map_err(|_| usage(format!("row {}: '{cell}' is not a number", i + 1)))?);
    }
    Ok(xs)
}

pub fn regress(x: Vec<f64>, kind: NoiseKind, alpha: f64, beta: f64, lambda: f64) -> Result<Table, CliError> {
    let design = RegressionDesign::new(x, 0.0, 0.0)?;
    let noise = kind.noise(alpha, beta);
    let (s0, s1) = design.error_scales(&noise);
    let (e0, e1) = regression_errors(&design, &noise, lambda)?;
    let mut t = Table::new(&["noise", "sigma0", "sigma1", "intercept_error", "slope_error"]);
    t.push(vec![Cell::from(kind.name()), s0.into(), s1.into(), e0.into(), e1.into()]);
    Ok(t)
}
