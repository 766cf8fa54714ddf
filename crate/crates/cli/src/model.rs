//! Family and application parameters shared by `moment`, `predict` and `sweep`.

use clap::{Args, ValueEnum};
use fracmom::applications::{
    bivariate_linnik_error, bivariate_stable_error, stable_ou_prediction_error, subgaussian_error,
    SpectralMeasure,
};
use fracmom::distributions::{
    CompoundPoissonParams, Distribution, GeometricStableParams, JumpSpec, LinnikParams,
    ParetoParams, StableParams, SubordinatorParams,
};
use fracmom::quad::QuadratureConfig;
use fracmom::transforms::{LevyMeasureSpec, MomentMethod, MomentQuery, MomentResult};

use crate::table::{Cell, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Stable,
    Pareto,
    #[value(alias = "gs")]
    GeometricStable,
    Linnik,
    #[value(alias = "compound-poisson")]
    Cp,
    Subordinator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JumpKind {
    Deterministic,
    Exponential,
    Stable,
    Linnik,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AppModel {
    /// X2 - c X1 for a sub-Gaussian stable vector with correlation gamma.
    #[value(alias = "sub-gaussian")]
    Subgaussian,
    /// X2 - c X1 for a bivariate Linnik vector with correlation gamma.
    #[value(alias = "bivariate-linnik")]
    Linnik,
    /// X_t - c X_0 for the stable Ornstein-Uhlenbeck process.
    Ou,
    /// X2 - c X1 for the four-atom bivariate stable vector with E[X2 | X1] = a X1.
    Nguyen,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ModelArgs {
    /// Distribution family.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Application model (predict and sweep).
    #[arg(long, value_enum)]
    pub model: Option<AppModel>,
    /// Characteristic exponent alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Skewness (stable, geometric stable, Nguyen) or shape (Linnik).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Scale.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Stable location.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Centre of the moment E|X - mu|^(1 + lambda).
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// auto, closed-form, laue-centered, laue-shifted, kawata or laplace.
    #[arg(long)]
    pub method: Option<String>,
    /// Compound Poisson intensity.
    #[arg(long)]
    pub intensity: Option<f64>,
    #[arg(long, value_enum)]
    pub jump: Option<JumpKind>,
    /// Exponent of stable or Linnik jumps.
    #[arg(long)]
    pub jump_alpha: Option<f64>,
    /// Mean of exponential jumps or shape of Linnik jumps.
    #[arg(long)]
    pub jump_beta: Option<f64>,
    /// Subordinator Levy atoms as `location:mass,location:mass`.
    #[arg(long)]
    pub atoms: Option<String>,
    /// Subordinator drift.
    #[arg(long)]
    pub drift: Option<f64>,
    /// Correlation of the underlying Gaussian or Linnik vector.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Predictor coefficient c.
    #[arg(long)]
    pub c: Option<f64>,
    /// OU prediction horizon.
    #[arg(long)]
    pub t: Option<f64>,
    /// OU mean-reversion rate.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Nguyen conditional-mean slope.
    #[arg(long)]
    pub a: Option<f64>,
}

fn need(v: Option<f64>, name: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{name} is required")))
}

impl ModelArgs {
    /// Grid variables accepted by `sweep`.
    pub const GRID_VARS: [&'static str; 5] = ["mu", "beta", "lambda", "c", "t"];

    /// Sets a grid variable. `c` is the compound Poisson intensity for the
    /// `cp` family and the predictor coefficient otherwise.
    pub fn set(&mut self, name: &str, v: f64) -> Result<(), CliError> {
        match name {
            "mu" => self.mu = Some(v),
            "beta" => self.beta = Some(v),
            "lambda" => self.lambda = Some(v),
            "c" if self.model.is_none() && self.family == Some(Family::Cp) => self.intensity = Some(v),
            "c" => self.c = Some(v),
            "t" => self.t = Some(v),
            other => {
                return Err(CliError::Usage(format!(
                    "cannot sweep '{other}'; choose from {}",
                    Self::GRID_VARS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn lambda(&self) -> Result<f64, CliError> {
        need(self.lambda, "lambda")
    }

    pub fn method(&self) -> Result<MomentMethod, CliError> {
        match &self.method {
            None => Ok(MomentMethod::Auto),
            Some(m) => m.parse().map_err(|_| CliError::Usage(format!("unknown method '{m}'"))),
        }
    }

    fn jump(&self) -> Result<JumpSpec, CliError> {
        Ok(match self.jump.unwrap_or(JumpKind::Deterministic) {
            JumpKind::Deterministic => JumpSpec::Deterministic,
            JumpKind::Exponential => JumpSpec::Exponential { beta: self.jump_beta.unwrap_or(1.0) },
            JumpKind::Stable => JumpSpec::SymmetricStable { alpha: need(self.jump_alpha, "jump-alpha")? },
            JumpKind::Linnik => JumpSpec::Linnik {
                alpha: need(self.jump_alpha, "jump-alpha")?,
                beta: self.jump_beta.unwrap_or(1.0),
            },
        })
    }

    fn levy_atoms(&self) -> Result<LevyMeasureSpec, CliError> {
        let text = self
            .atoms
            .as_deref()
            .ok_or_else(|| CliError::Usage("--atoms is required for the subordinator".into()))?;
        let mut atoms = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (x, m) = part
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("atom '{part}' is not location:mass")))?;
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number '{s}' in --atoms")))
            };
            atoms.push((parse(x)?, parse(m)?));
        }
        Ok(LevyMeasureSpec::atoms(atoms)?)
    }

    pub fn distribution(&self) -> Result<Distribution, CliError> {
        let family = self.family.ok_or_else(|| CliError::Usage("--family is required".into()))?;
        let sigma = self.sigma.unwrap_or(1.0);
        Ok(match family {
            Family::Stable => Distribution::Stable(StableParams::new(
                need(self.alpha, "alpha")?,
                self.beta.unwrap_or(0.0),
                sigma,
                self.delta.unwrap_or(0.0),
            )?),
            Family::Pareto => Distribution::Pareto(ParetoParams::new(need(self.alpha, "alpha")?)?),
            Family::GeometricStable => Distribution::GeometricStable(GeometricStableParams::new(
                need(self.alpha, "alpha")?,
                self.beta.unwrap_or(0.0),
                sigma,
            )?),
            Family::Linnik => Distribution::Linnik(LinnikParams::new(
                need(self.alpha, "alpha")?,
                sigma,
                self.beta.unwrap_or(1.0),
            )?),
            Family::Cp => Distribution::CompoundPoisson(CompoundPoissonParams::new(
                self.intensity.unwrap_or(1.0),
                self.jump()?,
            )?),
            Family::Subordinator => Distribution::Subordinator(SubordinatorParams::new(
                self.drift.unwrap_or(0.0),
                self.levy_atoms()?,
            )?),
        })
    }

    pub fn moment(&self, cfg: &QuadratureConfig) -> Result<MomentResult, CliError> {
        let q = MomentQuery::new(self.lambda()?, self.mu.unwrap_or(0.0), self.method()?)?;
        Ok(self.distribution()?.moment(&q, cfg)?)
    }

    /// Prediction error of the application model.
    pub fn predict(&self) -> Result<Prediction, CliError> {
        let model = self.model.ok_or_else(|| CliError::Usage("--model is required".into()))?;
        let (alpha, lambda, c) = (need(self.alpha, "alpha")?, self.lambda()?, need(self.c, "c")?);
        Ok(match model {
            AppModel::Subgaussian => Prediction::plain(subgaussian_error(need(self.gamma, "gamma")?, alpha, c, lambda)?),
            AppModel::Linnik => Prediction::plain(bivariate_linnik_error(
                need(self.gamma, "gamma")?,
                alpha,
                self.beta.unwrap_or(1.0),
                c,
                lambda,
            )?),
            AppModel::Ou => Prediction::plain(stable_ou_prediction_error(
                need(self.rate, "rate")?,
                alpha,
                need(self.t, "t")?,
                c,
                lambda,
            )?),
            AppModel::Nguyen => {
                let m = SpectralMeasure::nguyen(
                    alpha,
                    self.sigma.unwrap_or(1.0),
                    self.beta.unwrap_or(0.0),
                    need(self.a, "a")?,
                )?;
                let e = bivariate_stable_error(&m, alpha, c, lambda)?;
                Prediction { value: e.value, scale: Some(e.sigma0), skew: Some(e.beta0) }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: f64,
    /// Stable scale and skewness of the error, where the model reports them.
    pub scale: Option<f64>,
    pub skew: Option<f64>,
}

impl Prediction {
    fn plain(value: f64) -> Self {
        Self { value, scale: None, skew: None }
    }
}

pub fn moment_table(r: &MomentResult) -> Table {
    let mut t = Table::new(&["value", "abs_err_est", "method"]);
    t.push(moment_cells(r));
    t
}

pub fn moment_cells(r: &MomentResult) -> Vec<Cell> {
    vec![r.value.into(), r.abs_err_est.into(), r.method_used.name().into()]
}

pub fn prediction_table(p: &Prediction) -> Table {
    let mut t = Table::new(&["value", "error_scale", "error_skewness"]);
    t.push(prediction_cells(p));
    t
}

pub fn prediction_cells(p: &Prediction) -> Vec<Cell> {
    let opt = |v: Option<f64>| v.map_or(Cell::Text(String::new()), Cell::Num);
    vec![p.value.into(), opt(p.scale), opt(p.skew)]
}
