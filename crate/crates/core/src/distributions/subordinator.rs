//! Positive infinitely divisible laws: drift `delta >= 0` plus jumps from a
//! Levy measure `nu` on `(0, inf)`.

use crate::error::{Error, Result};
use crate::quad::{integrate_semiinf, QuadratureConfig};
use crate::specfun::gamma_fn;
use crate::transforms::{
    check_lambda, dyadic_integral, id_moment_exists, LaplaceFn, LevyMeasureSpec, MomentMethod,
    MomentResult,
};

#[derive(Debug, Clone)]
pub struct SubordinatorParams {
    pub delta: f64,
    pub nu: LevyMeasureSpec,
}

impl SubordinatorParams {
    /// Checks `delta >= 0`, that `nu` lives on `(0, inf)` and `int (1 ∧ s) nu(ds) < inf`.
    pub fn new(delta: f64, nu: LevyMeasureSpec) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::domain(format!("drift delta = {delta} must be nonnegative")));
        }
        if !nu.positive_only() {
            return Err(Error::domain("subordinator Levy measure must live on (0, inf)"));
        }
        nu.check_integrable(1.0)?;
        Ok(Self { delta, nu })
    }

    pub fn laplace(&self) -> SubordinatorLaplace {
        SubordinatorLaplace { p: self.clone() }
    }

    /// `int f(s) nu(ds)`.
    fn nu_integral(&self, f: &dyn Fn(f64) -> f64) -> Result<f64> {
        match &self.nu {
            LevyMeasureSpec::Atoms(atoms) => Ok(atoms.iter().map(|&(x, m)| m * f(x)).sum()),
            LevyMeasureSpec::Density { density, .. } => {
                let g = |s: f64| {
                    let d = density(s);
                    if d == 0.0 {
                        0.0
                    } else {
                        f(s) * d
                    }
                };
                Ok(dyadic_integral(&g, true)? + dyadic_integral(&g, false)?)
            }
        }
    }

    /// Laplace exponent `Psi(-u) = -delta u - int (1 - e^(-s u)) nu(ds)`.
    pub fn psi_neg(&self, u: f64) -> Result<f64> {
        Ok(-self.delta * u + self.nu_integral(&|s| (-s * u).exp_m1())?)
    }

    /// `E X = delta + int s nu(ds)`.
    pub fn mean(&self) -> Result<f64> {
        Ok(self.delta + self.nu_integral(&|s| s)?)
    }

    fn tail_index(&self) -> f64 {
        match &self.nu {
            LevyMeasureSpec::Density { tails: Some(t), .. } => t.right.min(2.0),
            _ => 2.0,
        }
    }
}

/// `E X^(1+lambda) = lambda / Gamma(1-lambda) {delta I1 + I2}` with
/// `I1 = int (1 - e^Psi(-u)) u^(-1-lambda) du` and
/// `I2 = int [int s (1 - e^(-s u + Psi(-u))) nu(ds)] u^(-1-lambda) du`.
pub fn subordinator_moment(
    p: &SubordinatorParams,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    check_lambda(lambda)?;
    let g = 1.0 + lambda;
    if !id_moment_exists(&p.nu, g)? {
        return Err(Error::existence(format!("Levy measure has no moment of order {g}")));
    }
    let w = -1.0 - lambda;
    let head = (p.tail_index() - 2.0 - lambda).min(0.0);
    if head <= -1.0 {
        return Err(Error::existence(format!("order {g} is not below the jump tail index")));
    }
    let qcfg = cfg.with_singularity(head);
    let failure = std::cell::Cell::new(None);
    let guard = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let mut parts = Vec::with_capacity(2);
    if p.delta > 0.0 {
        let q = integrate_semiinf(|u: f64| -guard(p.psi_neg(u)).exp_m1() * u.powf(w), &qcfg);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        parts.push(q?.require_converged("drift integral")?.scaled(p.delta));
    }
    let q = integrate_semiinf(
        |u: f64| {
            let psi = guard(p.psi_neg(u));
            guard(p.nu_integral(&|s| -s * (psi - s * u).exp_m1())) * u.powf(w)
        },
        &qcfg,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    parts.push(q?.require_converged("jump integral")?);
    let scale = lambda / gamma_fn(1.0 - lambda)?;
    Ok(MomentResult::from_integrals(scale, &parts, MomentMethod::ClosedForm))
}

/// Laplace transform `exp(Psi(-u))` of a subordinator. Quadrature failures in
/// the inner `nu` integrals surface as NaN.
#[derive(Debug, Clone)]
pub struct SubordinatorLaplace {
    p: SubordinatorParams,
}

impl LaplaceFn for SubordinatorLaplace {
    fn lp(&self, t: f64) -> f64 {
        self.p.psi_neg(t).map_or(f64::NAN, f64::exp)
    }

    fn dlp(&self, t: f64) -> f64 {
        let slope = self.p.nu_integral(&|s| s * (-s * t).exp()).unwrap_or(f64::NAN);
        -self.lp(t) * (self.p.delta + slope)
    }

    fn dlp_at_zero(&self) -> f64 {
        self.p.mean().map_or(f64::NAN, |m| -m)
    }

    fn dlp_excess(&self, t: f64) -> f64 {
        let Ok(psi) = self.p.psi_neg(t) else { return f64::NAN };
        let jumps = self.p.nu_integral(&|s| -s * (psi - s * t).exp_m1()).unwrap_or(f64::NAN);
        -self.p.delta * psi.exp_m1() + jumps
    }

    fn one_minus_lp(&self, t: f64) -> f64 {
        self.p.psi_neg(t).map_or(f64::NAN, |psi| -psi.exp_m1())
    }

    fn small_t_index(&self) -> f64 {
        self.p.tail_index()
    }

    fn domain_note(&self) -> String {
        format!("subordinator with drift {}", self.p.delta)
    }
}
