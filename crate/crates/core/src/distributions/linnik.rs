//! Geometric stable and Linnik laws, and the distance between a symmetric
//! stable variable and an independent Linnik-type variable.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate_semiinf, QuadratureConfig};
use crate::specfun::{beta_fn, gamma_fn, tricomi_u};
use crate::transforms::{laue_constant, CharFn, MomentMethod, MomentResult};

use super::require_order_below;

/// Geometric stable law, `phi(t) = 1 / (1 + sigma^alpha |t|^alpha (1 - i theta sign t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricStableParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
}

impl GeometricStableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::domain(format!("geometric stable alpha = {alpha} outside (0, 2)")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::domain(format!("geometric stable beta = {beta} outside [-1, 1]")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain("geometric stable sigma must be positive"));
        }
        if alpha == 1.0 && beta != 0.0 {
            return Err(Error::UnsupportedParam("alpha = 1 is only supported with beta = 0".into()));
        }
        Ok(Self { alpha, beta, sigma })
    }

    pub fn theta(&self) -> f64 {
        if self.alpha == 1.0 {
            0.0
        } else {
            self.beta * (0.5 * PI * self.alpha).tan()
        }
    }

    pub fn chf(&self) -> GeometricStableChf {
        GeometricStableChf { p: *self, theta: self.theta() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GeometricStableChf {
    p: GeometricStableParams,
    theta: f64,
}

impl CharFn for GeometricStableChf {
    fn phi(&self, t: f64) -> Complex64 {
        let s = self.p.sigma.powf(self.p.alpha) * t.abs().powf(self.p.alpha);
        Complex64::new(1.0 + s, -self.theta * s * t.signum()).inv()
    }

    fn dphi(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let GeometricStableParams { alpha, sigma, .. } = self.p;
        let g = alpha * sigma.powf(alpha) * t.abs().powf(alpha - 1.0);
        let ph = self.phi(t);
        -ph * ph * Complex64::new(g * t.signum(), -g * self.theta)
    }

    fn one_minus_re_phi(&self, t: f64) -> f64 {
        let s = self.p.sigma.powf(self.p.alpha) * t.abs().powf(self.p.alpha);
        let th2 = self.theta * self.theta;
        let d = (1.0 + s) * (1.0 + s) + th2 * s * s;
        s * (1.0 + s * (1.0 + th2)) / d
    }

    fn small_t_index(&self) -> f64 {
        self.p.alpha
    }

    fn domain_note(&self) -> String {
        format!("geometric stable alpha = {}: order must stay below alpha", self.p.alpha)
    }
}

/// `E|X - mu|^(1+lambda)` for a geometric stable law.
///
/// `mu = 0` uses the one-dimensional form in `v = (sigma u)^alpha`:
/// `K sigma^g int v^(-g/alpha) ((1+v)^2 + (theta v)^2 + 2 theta^2 v) / ((1+v)^2 + (theta v)^2)^2 dv`.
/// Otherwise the three-integral form is regrouped into a `sin(mu u)` and a
/// `cos(mu u)` integral.
pub fn geometric_stable_moments(
    p: &GeometricStableParams,
    mu: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    require_order_below(p.alpha, lambda, "geometric stable")?;
    let k = laue_constant(lambda)?;
    let (a, th, sig) = (p.alpha, p.theta(), p.sigma);
    let g = 1.0 + lambda;
    if mu == 0.0 {
        let e = -g / a;
        let q = integrate_semiinf(
            |v: f64| {
                let d = (1.0 + v) * (1.0 + v) + (th * v) * (th * v);
                v.powf(e) * (d + 2.0 * th * th * v) / (d * d)
            },
            &cfg.with_singularity(e),
        )?
        .require_converged("geometric stable integral")?;
        return Ok(MomentResult::from_integrals(k * sig.powf(g), &[q], MomentMethod::ClosedForm));
    }
    geometric_stable_moment_shifted(p, mu, lambda, cfg)
}

/// The three-integral form at any `mu`, including `mu = 0`.
pub fn geometric_stable_moment_shifted(
    p: &GeometricStableParams,
    mu: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    require_order_below(p.alpha, lambda, "geometric stable")?;
    let k = laue_constant(lambda)?;
    let (a, th) = (p.alpha, p.theta());
    // scale out sigma: u = v / sigma, m = mu / sigma
    let m = mu / p.sigma;
    let w1 = -1.0 - lambda;
    let w2 = a - lambda - 2.0;
    let pieces = move |v: f64| {
        let s = v.powf(a);
        let d = (1.0 + s) * (1.0 + s) + (th * s) * (th * s);
        let e = 1.0 + s + th * th * s;
        let head = m * v.powf(w1) / d;
        let body = a * v.powf(w2) / d;
        let cross = 2.0 * a * v.powf(w2) * e / (d * d);
        // coefficients of sin(m v) and cos(m v)
        let sin_c = head * (1.0 + s) - body * th + cross * th * s;
        let cos_c = -head * th * s - body + cross * (1.0 + s);
        (sin_c, cos_c)
    };
    let split = Some(1.0 / m.abs().max(1.0));
    let mut parts = Vec::with_capacity(2);
    if m != 0.0 {
        let c = QuadratureConfig { split_point: split, ..cfg.with_oscillation(m, 0.0).with_singularity(-lambda) };
        let q = integrate_semiinf(|v: f64| (m * v).sin() * pieces(v).0, &c)?
            .require_converged("geometric stable sine integral")?;
        parts.push(q);
    }
    let c = if m != 0.0 {
        QuadratureConfig { split_point: split, ..cfg.with_oscillation(m, 0.5 * PI).with_singularity(w2) }
    } else {
        cfg.with_singularity(w2)
    };
    let q = integrate_semiinf(|v: f64| (m * v).cos() * pieces(v).1, &c)?
        .require_converged("geometric stable cosine integral")?;
    parts.push(q);
    Ok(MomentResult::from_integrals(k * p.sigma.powf(1.0 + lambda), &parts, MomentMethod::ClosedForm))
}

/// Linnik law, `phi(t) = (1 + sigma^alpha |t|^alpha)^(-beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinnikParams {
    pub alpha: f64,
    pub sigma: f64,
    pub beta: f64,
}

impl LinnikParams {
    pub fn new(alpha: f64, sigma: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::domain(format!("Linnik alpha = {alpha} outside (0, 2]")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain("Linnik sigma must be positive"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain("Linnik beta must be positive"));
        }
        Ok(Self { alpha, sigma, beta })
    }

    pub fn chf(&self) -> LinnikChf {
        LinnikChf { p: *self }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LinnikChf {
    p: LinnikParams,
}

impl LinnikChf {
    fn s(&self, t: f64) -> f64 {
        self.p.sigma.powf(self.p.alpha) * t.abs().powf(self.p.alpha)
    }
}

impl CharFn for LinnikChf {
    fn phi(&self, t: f64) -> Complex64 {
        Complex64::new((-self.p.beta * self.s(t).ln_1p()).exp(), 0.0)
    }

    fn dphi(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let LinnikParams { alpha, sigma, beta } = self.p;
        let s = self.s(t);
        let g = alpha * sigma.powf(alpha) * t.abs().powf(alpha - 1.0) * t.signum();
        Complex64::new(-beta * g * (-(beta + 1.0) * s.ln_1p()).exp(), 0.0)
    }

    fn one_minus_re_phi(&self, t: f64) -> f64 {
        -(-self.p.beta * self.s(t).ln_1p()).exp_m1()
    }

    fn small_t_index(&self) -> f64 {
        self.p.alpha
    }

    fn domain_note(&self) -> String {
        format!("Linnik alpha = {}: order must stay below alpha", self.p.alpha)
    }
}

/// `E|X|^(1+lambda) = K beta sigma^g B(1 - g/alpha, beta + g/alpha)`.
pub fn linnik_moment(p: &LinnikParams, lambda: f64) -> Result<f64> {
    require_order_below(p.alpha, lambda, "Linnik")?;
    let g = 1.0 + lambda;
    let r = g / p.alpha;
    Ok(laue_constant(lambda)? * p.beta * p.sigma.powf(g) * beta_fn(1.0 - r, p.beta + r)?)
}

/// `E|X - mu|^(1+lambda)`:
/// `K sigma^g { (mu/sigma) int u^(-1-lambda) sin(mu u/sigma) (1+u^alpha)^(-beta)
///   + alpha beta int u^(alpha-lambda-2) cos(mu u/sigma) (1+u^alpha)^(-beta-1) }`.
pub fn linnik_shifted_moment(
    p: &LinnikParams,
    mu: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    require_order_below(p.alpha, lambda, "Linnik")?;
    let k = laue_constant(lambda)?;
    let LinnikParams { alpha: a, sigma, beta } = *p;
    let m = mu / sigma;
    let w2 = a - lambda - 2.0;
    let split = Some(1.0 / m.abs().max(1.0));
    let mut parts = Vec::with_capacity(2);
    if m != 0.0 {
        let c = QuadratureConfig { split_point: split, ..cfg.with_oscillation(m, 0.0).with_singularity(-lambda) };
        let q = integrate_semiinf(
            |u: f64| u.powf(-1.0 - lambda) * (m * u).sin() * (-beta * u.powf(a).ln_1p()).exp(),
            &c,
        )?
        .require_converged("Linnik sine integral")?;
        parts.push(q.scaled(m));
    }
    let c = if m != 0.0 {
        QuadratureConfig { split_point: split, ..cfg.with_oscillation(m, 0.5 * PI).with_singularity(w2) }
    } else {
        cfg.with_singularity(w2)
    };
    let q = integrate_semiinf(
        |u: f64| u.powf(w2) * (m * u).cos() * (-(beta + 1.0) * u.powf(a).ln_1p()).exp(),
        &c,
    )?
    .require_converged("Linnik cosine integral")?;
    parts.push(q.scaled(a * beta));
    Ok(MomentResult::from_integrals(k * sigma.powf(1.0 + lambda), &parts, MomentMethod::ClosedForm))
}

fn check_distance_params(alpha: f64, beta: f64, lambda: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (1, 2)")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain("beta must be positive"));
    }
    require_order_below(alpha, lambda, "stable/Linnik")
}

/// `E|X - Y|^(1+lambda)` for independent `X` with `phi = e^(-|t|^alpha)` and `Y`
/// with `phi = (1 + |t|^alpha / beta)^(-beta)`, via Tricomi's function:
/// `K beta^(1-r) Gamma(1-r) {U(1-r, 2-beta-r; beta) + U(1-r, 1-beta-r; beta)}`, `r = g/alpha`.
pub fn stable_linnik_distance(alpha: f64, beta: f64, lambda: f64) -> Result<f64> {
    check_distance_params(alpha, beta, lambda)?;
    let r = (1.0 + lambda) / alpha;
    let a = 1.0 - r;
    let u1 = tricomi_u(a, 2.0 - beta - r, beta)?.value;
    let u2 = tricomi_u(a, 1.0 - beta - r, beta)?.value;
    Ok(laue_constant(lambda)? * beta.powf(1.0 - r) * gamma_fn(a)? * (u1 + u2))
}

/// The same distance from the two integrals
/// `K beta^(1-r) int u^(-r) e^(-beta u) [(1+u)^(-beta) + (1+u)^(-beta-1)] du`.
pub fn stable_linnik_distance_integral(
    alpha: f64,
    beta: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    check_distance_params(alpha, beta, lambda)?;
    let r = (1.0 + lambda) / alpha;
    let c = QuadratureConfig { split_point: Some(1.0 / beta.max(1.0)), ..cfg.with_singularity(-r) };
    let q = integrate_semiinf(
        |u: f64| {
            let base = u.powf(-r) * (-beta * u - beta * u.ln_1p()).exp();
            base * (1.0 + 1.0 / (1.0 + u))
        },
        &c,
    )?
    .require_converged("stable/Linnik distance integral")?;
    let scale = laue_constant(lambda)? * beta.powf(1.0 - r);
    Ok(MomentResult::from_integrals(scale, &[q], MomentMethod::ClosedForm))
}

/// Characteristic function of `X - Y` in [`stable_linnik_distance`].
#[derive(Debug, Clone, Copy)]
pub struct StableMinusLinnikChf {
    pub alpha: f64,
    pub beta: f64,
}

impl CharFn for StableMinusLinnikChf {
    fn phi(&self, t: f64) -> Complex64 {
        let s = t.abs().powf(self.alpha);
        Complex64::new((-s - self.beta * (s / self.beta).ln_1p()).exp(), 0.0)
    }

    fn dphi(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let s = t.abs().powf(self.alpha);
        let ds = self.alpha * t.abs().powf(self.alpha - 1.0) * t.signum();
        let log_deriv = -ds * (1.0 + 1.0 / (1.0 + s / self.beta));
        Complex64::new(self.phi(t).re * log_deriv, 0.0)
    }

    fn one_minus_re_phi(&self, t: f64) -> f64 {
        let s = t.abs().powf(self.alpha);
        -(-s - self.beta * (s / self.beta).ln_1p()).exp_m1()
    }

    fn small_t_index(&self) -> f64 {
        self.alpha
    }

    fn domain_note(&self) -> String {
        format!("alpha = {}: order must stay below alpha", self.alpha)
    }
}
