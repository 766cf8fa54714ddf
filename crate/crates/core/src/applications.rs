//! Prediction and estimation errors measured by `E|error|^(1+lambda)`.
//!
//! Each closed form is a family moment evaluated at an application-specific
//! scale. The `*_chf` constructors build the characteristic function of the
//! error variable directly from the joint law, so every value can also be
//! reproduced through [`crate::transforms`].

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::distributions::{
    linnik_moment, stable_general_moment, stable_symmetric_moment, LinnikParams, StableParams,
};
use crate::error::{Error, Result};
use crate::quad::{integrate_smooth, QuadratureConfig};
use crate::specfun::gamma_fn;
use crate::transforms::{check_lambda, CharFn};

/// Atoms closer than this to `|a| = 1` make the four-point measure degenerate.
const NGUYEN_GUARD: f64 = 1e-6;

fn check_alpha_order(alpha: f64, lambda: f64) -> Result<()> {
    check_lambda(lambda)?;
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (1, 2)")));
    }
    if 1.0 + lambda >= alpha {
        return Err(Error::existence(format!(
            "order {} is not below alpha = {alpha}",
            1.0 + lambda
        )));
    }
    Ok(())
}

fn check_correlation(gamma: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::domain(format!("correlation {gamma} outside [-1, 1]")))
    }
}

/// `E|Y|^(1+lambda)` for symmetric stable `Y` with scale `sigma >= 0`.
fn symmetric_stable_at_scale(alpha: f64, sigma: f64, lambda: f64) -> Result<f64> {
    if sigma == 0.0 {
        return Ok(0.0);
    }
    stable_symmetric_moment(&StableParams::symmetric(alpha, sigma)?, lambda)
}

/// Finite spectral measure of a bivariate stable vector: atoms `(s1, s2, weight)`
/// on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64, f64)>,
}

/// `int |s2 - c s1|^alpha Gamma(ds)` and `int sgn(s2 - c s1) |s2 - c s1|^alpha Gamma(ds)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralIntegrals {
    pub abs: f64,
    pub signed: f64,
}

impl SpectralMeasure {
    pub fn new(atoms: Vec<(f64, f64, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for &(s1, s2, w) in &atoms {
            if !((s1 * s1 + s2 * s2 - 1.0).abs() <= 1e-12) {
                return Err(Error::domain(format!("atom ({s1}, {s2}) is not on the unit circle")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::domain(format!("atom weight {w} must be finite and nonnegative")));
            }
            total += w;
        }
        if !(total > 0.0) {
            return Err(Error::domain("spectral measure has no mass"));
        }
        Ok(Self { atoms })
    }

    /// Four-point measure of the vector whose conditional mean is `E[X2 | X1] = a X1`.
    pub fn nguyen(alpha: f64, sigma: f64, beta: f64, a: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0 && alpha != 1.0) {
            return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 2) without 1")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) || !(-1.0..=1.0).contains(&beta) {
            return Err(Error::domain("need sigma > 0 and beta in [-1, 1]"));
        }
        if !(a.abs() < 1.0 - NGUYEN_GUARD) {
            return Err(Error::Degenerate(format!(
                "|a| = {} too close to 1: atom weights diverge",
                a.abs()
            )));
        }
        let sa = sigma.powf(alpha);
        let aa = a.abs().powf(alpha);
        let skew = beta * (1.0 - aa) / (1.0 - a.signum() * aa);
        let w = 0.5 * sa / (1.0 - aa) * (1.0 + a * a).powf(0.5 * alpha);
        let r = 1.0 / (1.0 + a * a).sqrt();
        Self::new(vec![
            (0.0, 1.0, 0.5 * sa * (1.0 + beta)),
            (0.0, -1.0, 0.5 * sa * (1.0 - beta)),
            (r, a * r, w * (1.0 + skew)),
            (-r, -a * r, w * (1.0 - skew)),
        ])
    }

    pub fn atoms(&self) -> &[(f64, f64, f64)] {
        &self.atoms
    }

    pub fn integrals(&self, alpha: f64, c: f64) -> SpectralIntegrals {
        let (mut abs, mut signed) = (0.0, 0.0);
        for &(s1, s2, w) in &self.atoms {
            let d = s2 - c * s1;
            let m = w * d.abs().powf(alpha);
            abs += m;
            signed += d.signum() * m;
        }
        SpectralIntegrals { abs, signed }
    }

    /// Ch.f. of `X2 - c X1`, assembled atom by atom from the joint ch.f.
    pub fn error_chf(&self, alpha: f64, c: f64) -> SpectralErrorChf {
        let terms = self
            .atoms
            .iter()
            .map(|&(s1, s2, w)| {
                let d = s2 - c * s1;
                (w * d.abs().powf(alpha), if d == 0.0 { 0.0 } else { d.signum() })
            })
            .collect();
        SpectralErrorChf { alpha, tan: (0.5 * PI * alpha).tan(), terms }
    }
}

/// `u -> phi(-c u, u)` for a bivariate stable ch.f.
/// `exp(-sum_j w_j |<t, s_j>|^alpha (1 - i sgn<t, s_j> tan(pi alpha / 2)))`.
#[derive(Debug, Clone)]
pub struct SpectralErrorChf {
    alpha: f64,
    tan: f64,
    /// `(w_j |d_j|^alpha, sgn d_j)` with `d_j = s2 - c s1`.
    terms: Vec<(f64, f64)>,
}

impl SpectralErrorChf {
    /// Real and imaginary parts of `-log phi(u)` divided by `|u|^alpha`, for `u > 0`.
    fn exponent(&self) -> (f64, f64) {
        let re: f64 = self.terms.iter().map(|t| t.0).sum();
        let im: f64 = self.terms.iter().map(|t| t.0 * t.1).sum();
        (re, -self.tan * im)
    }
}

impl CharFn for SpectralErrorChf {
    fn phi(&self, t: f64) -> Complex64 {
        let (a, b) = self.exponent();
        let v = t.abs().powf(self.alpha);
        (-Complex64::new(a, b * t.signum()) * v).exp()
    }

    fn dphi(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (a, b) = self.exponent();
        let v = self.alpha * t.abs().powf(self.alpha - 1.0);
        -self.phi(t) * Complex64::new(a * t.signum(), b) * v
    }

    fn one_minus_re_phi(&self, t: f64) -> f64 {
        let (a, b) = self.exponent();
        let v = t.abs().powf(self.alpha);
        let half = (0.5 * b * v).sin();
        -(-a * v).exp_m1() + (-a * v).exp() * 2.0 * half * half
    }

    fn small_t_index(&self) -> f64 {
        self.alpha
    }

    fn domain_note(&self) -> String {
        format!("bivariate stable prediction error, alpha = {}", self.alpha)
    }
}

/// Prediction error of the bivariate stable vector together with the scale and
/// skewness of `X2 - c X1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateError {
    pub value: f64,
    pub sigma0: f64,
    pub beta0: f64,
    /// `X2 = c X1` almost surely; `value` is then 0 and `beta0` is set to 0.
    pub degenerate: bool,
}

/// `E|X2 - c X1|^(1+lambda)` for a bivariate stable vector with atomic spectral measure.
pub fn bivariate_stable_error(
    measure: &SpectralMeasure,
    alpha: f64,
    c: f64,
    lambda: f64,
) -> Result<BivariateError> {
    check_alpha_order(alpha, lambda)?;
    bivariate_stable_error_from_integrals(measure.integrals(alpha, c), alpha, lambda)
}

/// As [`bivariate_stable_error`], from spectral integrals supplied by the
/// caller, e.g. by quadrature over a continuous measure.
pub fn bivariate_stable_error_from_integrals(
    ints: SpectralIntegrals,
    alpha: f64,
    lambda: f64,
) -> Result<BivariateError> {
    check_alpha_order(alpha, lambda)?;
    if !(ints.abs >= 0.0 && ints.abs.is_finite()) || !(ints.signed.abs() <= ints.abs * (1.0 + 1e-12)) {
        return Err(Error::domain(format!(
            "spectral integrals ({}, {}) are inconsistent",
            ints.abs, ints.signed
        )));
    }
    if ints.abs == 0.0 {
        return Ok(BivariateError { value: 0.0, sigma0: 0.0, beta0: 0.0, degenerate: true });
    }
    let sigma0 = ints.abs.powf(1.0 / alpha);
    let beta0 = (ints.signed / ints.abs).clamp(-1.0, 1.0);
    let p = StableParams::new(alpha, beta0, sigma0, 0.0)?;
    let value = if beta0 == 0.0 {
        stable_symmetric_moment(&p, lambda)?
    } else {
        stable_general_moment(&p, lambda)?
    };
    Ok(BivariateError { value, sigma0, beta0, degenerate: false })
}

/// `(-c, 1) R (-c, 1)' = 1 - 2 gamma c + c^2` for the correlation matrix `R`.
fn quadratic_form(gamma: f64, c: f64) -> f64 {
    let t = [-c, 1.0];
    let r = [[1.0, gamma], [gamma, 1.0]];
    let mut q = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            q += t[i] * r[i][j] * t[j];
        }
    }
    q.max(0.0)
}

/// `E|X2 - c X1|^(1+lambda)` for the sub-Gaussian vector `A^(1/2) (G1, G2)`
/// with `corr(G1, G2) = gamma`.
pub fn subgaussian_error(gamma: f64, alpha: f64, c: f64, lambda: f64) -> Result<f64> {
    check_alpha_order(alpha, lambda)?;
    check_correlation(gamma)?;
    symmetric_stable_at_scale(alpha, (0.5 * quadratic_form(gamma, c)).sqrt(), lambda)
}

/// Ch.f. `exp(-((t'Rt)/2)^(alpha/2))` of the sub-Gaussian vector along `t = (-c u, u)`.
pub fn subgaussian_error_chf(gamma: f64, alpha: f64, c: f64) -> Result<Arc<dyn CharFn>> {
    check_correlation(gamma)?;
    let q = quadratic_form(gamma, c);
    Ok(Arc::new(StableParams::symmetric(alpha, (0.5 * q).sqrt().max(f64::MIN_POSITIVE))?.chf()))
}

/// `int |s2 - c s1|^alpha Gamma(ds)` for the continuous spectral measure of the
/// sub-Gaussian vector: the image of the uniform law on the circle under
/// `v -> R^(1/2) v / |R^(1/2) v|`, weighted by `|R^(1/2) v|^alpha`.
pub fn subgaussian_spectral_integrals(gamma: f64, alpha: f64, c: f64) -> Result<SpectralIntegrals> {
    check_correlation(gamma)?;
    // R^(1/2) for [[1, g], [g, 1]]
    let (p, m) = ((1.0 + gamma).sqrt(), (1.0 - gamma).sqrt());
    let h = [[0.5 * (p + m), 0.5 * (p - m)], [0.5 * (p - m), 0.5 * (p + m)]];
    // <t, R^(1/2) v> = k1 cos(th) + k2 sin(th), t = (-c, 1)
    let k1 = -c * h[0][0] + h[1][0];
    let k2 = -c * h[0][1] + h[1][1];
    let amp = k1.hypot(k2);
    if amp == 0.0 {
        return Ok(SpectralIntegrals { abs: 0.0, signed: 0.0 });
    }
    let phase = k2.atan2(k1);
    let mean_abs_cos = gamma_fn(0.5 * (alpha + 1.0))? / (PI.sqrt() * gamma_fn(0.5 * alpha + 1.0)?);
    let norm = 2f64.powf(-0.5 * alpha) / mean_abs_cos;
    let f = |th: f64| (k1 * th.cos() + k2 * th.sin()).abs().powf(alpha);
    let cfg = QuadratureConfig { rel_tol: 1e-13, abs_tol: 1e-15, ..QuadratureConfig::default() };
    // zeros of the projection split the circle into two smooth arcs
    let z0 = phase + 0.5 * PI;
    let mut abs = 0.0;
    for (a, b) in [(z0 - PI, z0), (z0, z0 + PI)] {
        let q = integrate_smooth(f, a, b, &cfg)?.require_converged("sub-Gaussian spectral integral")?;
        abs += q.value;
    }
    Ok(SpectralIntegrals { abs: norm * abs / (2.0 * PI), signed: 0.0 })
}

/// `E|X_t - c X_0|^(1+lambda)` for the stationary OU process driven by
/// symmetric `alpha`-stable motion, with mean-reversion rate `rate`.
pub fn stable_ou_prediction_error(rate: f64, alpha: f64, t: f64, c: f64, lambda: f64) -> Result<f64> {
    check_alpha_order(alpha, lambda)?;
    let (s0, s1, a0) = ou_scales(rate, alpha, t, c)?;
    let sa = (s0 * a0.abs()).powf(alpha) + s1.powf(alpha);
    symmetric_stable_at_scale(alpha, sa.powf(1.0 / alpha), lambda)
}

/// Stationary scale `s0`, innovation scale `s1` and the coefficient
/// `e^(-rate t) - c` of `X_0` in `X_t - c X_0`.
fn ou_scales(rate: f64, alpha: f64, t: f64, c: f64) -> Result<(f64, f64, f64)> {
    if !(rate > 0.0 && rate.is_finite()) || !(t >= 0.0) || !c.is_finite() {
        return Err(Error::domain("OU error needs rate > 0, t >= 0 and finite c"));
    }
    let ar = alpha * rate;
    let s0 = ar.powf(-1.0 / alpha);
    let s1 = (-(-ar * t).exp_m1() / ar).powf(1.0 / alpha);
    Ok((s0, s1, (-rate * t).exp() - c))
}

/// Ch.f. of `X_t - c X_0 = (e^(-rate t) - c) X_0 + int_0^t e^(-rate (t-s)) dZ_s`
/// as the product of its two independent parts.
pub fn stable_ou_error_chf(rate: f64, alpha: f64, t: f64, c: f64) -> Result<Arc<dyn CharFn>> {
    let (s0, s1, a0) = ou_scales(rate, alpha, t, c)?;
    let mut parts: Vec<Arc<dyn CharFn>> = Vec::new();
    if a0 != 0.0 {
        parts.push(Arc::new(StableParams::symmetric(alpha, s0 * a0.abs())?.chf()));
    }
    if s1 > 0.0 {
        parts.push(Arc::new(StableParams::symmetric(alpha, s1)?.chf()));
    }
    Ok(Arc::new(ProductChf::new(parts)?))
}

/// `E|X2 - c X1|^(1+lambda)` for the bivariate Linnik vector with ch.f.
/// `(1 + (t'Rt)^(alpha/2))^(-beta)`.
pub fn bivariate_linnik_error(gamma: f64, alpha: f64, beta: f64, c: f64, lambda: f64) -> Result<f64> {
    check_alpha_order(alpha, lambda)?;
    check_correlation(gamma)?;
    let s = quadratic_form(gamma, c).sqrt();
    if s == 0.0 {
        return Ok(0.0);
    }
    linnik_moment(&LinnikParams::new(alpha, s, beta)?, lambda)
}

pub fn bivariate_linnik_error_chf(gamma: f64, alpha: f64, beta: f64, c: f64) -> Result<Arc<dyn CharFn>> {
    check_correlation(gamma)?;
    let s = quadratic_form(gamma, c).sqrt().max(f64::MIN_POSITIVE);
    Ok(Arc::new(LinnikParams::new(alpha, s, beta)?.chf()))
}

/// Ch.f. of a sum of independent variables.
pub struct ProductChf {
    parts: Vec<Arc<dyn CharFn>>,
}

impl ProductChf {
    pub fn new(parts: Vec<Arc<dyn CharFn>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Degenerate("product of no characteristic functions".into()));
        }
        Ok(Self { parts })
    }
}

impl CharFn for ProductChf {
    fn phi(&self, t: f64) -> Complex64 {
        self.parts.iter().map(|p| p.phi(t)).product()
    }

    fn dphi(&self, t: f64) -> Complex64 {
        let phis: Vec<Complex64> = self.parts.iter().map(|p| p.phi(t)).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (k, p) in self.parts.iter().enumerate() {
            let rest: Complex64 = phis
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, v)| *v)
                .product();
            total += p.dphi(t) * rest;
        }
        total
    }

    fn one_minus_re_phi(&self, t: f64) -> f64 {
        // D = prod(1 - z_k) - 1 with z_k = 1 - phi_k, built without cancellation
        let mut d = Complex64::new(0.0, 0.0);
        for p in &self.parts {
            let z = Complex64::new(p.one_minus_re_phi(t), -p.phi(t).im);
            d = d * (Complex64::new(1.0, 0.0) - z) - z;
        }
        -d.re
    }

    fn small_t_index(&self) -> f64 {
        self.parts.iter().map(|p| p.small_t_index()).fold(f64::INFINITY, f64::min)
    }

    fn domain_note(&self) -> String {
        let notes: Vec<String> = self.parts.iter().map(|p| p.domain_note()).collect();
        format!("sum of independent parts: {}", notes.join("; "))
    }
}

/// Covariates of the simple linear model `Y_i = theta0 + theta1 x_i + eps_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDesign {
    pub x: Vec<f64>,
    pub theta0: f64,
    pub theta1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegressionNoise {
    /// Independent standard symmetric stable errors.
    IidSymmetricStable { alpha: f64 },
    /// Ch.f. `exp(-|u'u|^(alpha/2))`.
    EllipticalStable { alpha: f64 },
    /// Ch.f. `(1 + (u'u)^(alpha/2))^(-beta)`.
    MultivariateLinnik { alpha: f64, beta: f64 },
}

impl RegressionNoise {
    fn alpha(&self) -> f64 {
        match *self {
            RegressionNoise::IidSymmetricStable { alpha }
            | RegressionNoise::EllipticalStable { alpha }
            | RegressionNoise::MultivariateLinnik { alpha, .. } => alpha,
        }
    }
}

impl RegressionDesign {
    pub fn new(x: Vec<f64>, theta0: f64, theta1: f64) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::Degenerate("regression needs at least two covariates".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("covariates must be finite"));
        }
        let d = Self { x, theta0, theta1 };
        if !(d.sxx() > 0.0) {
            return Err(Error::Degenerate("all covariates are equal".into()));
        }
        Ok(d)
    }

    fn mean(&self) -> f64 {
        self.x.iter().sum::<f64>() / self.x.len() as f64
    }

    fn sxx(&self) -> f64 {
        let m = self.mean();
        self.x.iter().map(|v| (v - m) * (v - m)).sum()
    }

    /// Weights `a_i`, `b_i` with `theta0_hat - theta0 = sum a_i eps_i` and
    /// `theta1_hat - theta1 = sum b_i eps_i`.
    pub fn error_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let (m, s, n) = (self.mean(), self.sxx(), self.x.len() as f64);
        let a = self.x.iter().map(|v| -((v - m) * m - s / n) / s).collect();
        let b = self.x.iter().map(|v| (v - m) / s).collect();
        (a, b)
    }

    /// Scales `(sigma0, sigma1)` of the intercept and slope errors: `l_alpha`
    /// norms of the weights for iid noise, Euclidean norms otherwise.
    pub fn error_scales(&self, noise: &RegressionNoise) -> (f64, f64) {
        match noise {
            RegressionNoise::IidSymmetricStable { alpha } => {
                let (a, b) = self.error_weights();
                let norm = |w: &[f64]| w.iter().map(|v| v.abs().powf(*alpha)).sum::<f64>().powf(1.0 / alpha);
                (norm(&a), norm(&b))
            }
            _ => {
                let (m, s, n) = (self.mean(), self.sxx(), self.x.len() as f64);
                ((m * m / s + 1.0 / n).sqrt(), 1.0 / s.sqrt())
            }
        }
    }
}

/// `(E|theta0_hat - theta0|^(1+lambda), E|theta1_hat - theta1|^(1+lambda))` for
/// the least-squares estimators.
pub fn regression_errors(
    design: &RegressionDesign,
    noise: &RegressionNoise,
    lambda: f64,
) -> Result<(f64, f64)> {
    let alpha = noise.alpha();
    check_alpha_order(alpha, lambda)?;
    let (s0, s1) = design.error_scales(noise);
    let at = |s: f64| -> Result<f64> {
        match *noise {
            RegressionNoise::MultivariateLinnik { alpha, beta } => {
                linnik_moment(&LinnikParams::new(alpha, s, beta)?, lambda)
            }
            _ => symmetric_stable_at_scale(alpha, s, lambda),
        }
    };
    Ok((at(s0)?, at(s1)?))
}

/// Ch.f.s of the intercept and slope errors assembled from the noise law.
pub fn regression_error_chfs(
    design: &RegressionDesign,
    noise: &RegressionNoise,
) -> Result<(Arc<dyn CharFn>, Arc<dyn CharFn>)> {
    let (a, b) = design.error_weights();
    let build = |w: &[f64]| -> Result<Arc<dyn CharFn>> {
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(match *noise {
            RegressionNoise::IidSymmetricStable { alpha } => {
                let parts = w
                    .iter()
                    .filter(|v| **v != 0.0)
                    .map(|v| Ok(Arc::new(StableParams::symmetric(alpha, v.abs())?.chf()) as Arc<dyn CharFn>))
                    .collect::<Result<Vec<_>>>()?;
                Arc::new(ProductChf::new(parts)?)
            }
            RegressionNoise::EllipticalStable { alpha } => {
                Arc::new(StableParams::symmetric(alpha, norm)?.chf())
            }
            RegressionNoise::MultivariateLinnik { alpha, beta } => {
                Arc::new(LinnikParams::new(alpha, norm, beta)?.chf())
            }
        })
    };
    Ok((build(&a)?, build(&b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{moment_centered_from_chf, moment_from_chf_kawata};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn laue(cf: &dyn CharFn, lambda: f64) -> f64 {
        moment_centered_from_chf(cf, lambda, &cfg()).unwrap().value
    }

    #[test]
    fn axis_atoms_give_marginal() {
        let (alpha, w, lambda) = (1.7, 0.8, 0.4);
        let m = SpectralMeasure::new(vec![(0.0, 1.0, w), (0.0, -1.0, w)]).unwrap();
        for c in [-3.0, 0.0, 2.5] {
            let e = bivariate_stable_error(&m, alpha, c, lambda).unwrap();
            let s = symmetric_stable_at_scale(alpha, (2.0 * w).powf(1.0 / alpha), lambda).unwrap();
            assert!(rel(e.value, s) < 1e-14);
            assert_eq!(e.beta0, 0.0);
        }
    }

    #[test]
    fn nguyen_at_conditional_mean() {
        let (alpha, sigma, beta, a, lambda) = (1.6, 1.3, 0.4, 0.5, 0.3);
        let m = SpectralMeasure::nguyen(alpha, sigma, beta, a).unwrap();
        let ints = m.integrals(alpha, a);
        assert!(rel(ints.abs, sigma.powf(alpha)) < 1e-13);
        let e = bivariate_stable_error(&m, alpha, a, lambda).unwrap();
        assert!(rel(e.sigma0, sigma) < 1e-13 && rel(e.beta0, beta) < 1e-12);
        let direct = stable_general_moment(&StableParams::new(alpha, beta, sigma, 0.0).unwrap(), lambda).unwrap();
        assert!(rel(e.value, direct) < 1e-13);
    }

    #[test]
    fn nguyen_integrals_match_closed_display() {
        let (alpha, sigma, beta) = (1.4, 0.9, -0.6);
        for a in [-0.7, -0.2, 0.3, 0.8] {
            let m = SpectralMeasure::nguyen(alpha, sigma, beta, a).unwrap();
            for c in [-1.0, 0.1, 0.9, 2.0] {
                let i = m.integrals(alpha, c);
                let sa = sigma.powf(alpha);
                let d = (a - c).abs().powf(alpha);
                let abs = sa * (1.0 + d / (1.0 - a.abs().powf(alpha)));
                let signed = beta * sa * (1.0 + (a - c).signum() * d / (1.0 - a.signum() * a.abs().powf(alpha)));
                assert!(rel(i.abs, abs) < 1e-13 && rel(i.signed, signed) < 1e-12, "a={a} c={c}");
            }
        }
    }

    #[test]
    fn nguyen_guard() {
        assert!(matches!(SpectralMeasure::nguyen(1.5, 1.0, 0.0, 0.9999999), Err(Error::Degenerate(_))));
        assert!(SpectralMeasure::new(vec![(0.6, 0.8, 1.0), (0.6, 0.81, 1.0)]).is_err());
        assert!(SpectralMeasure::new(vec![(1.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn degenerate_prediction_is_flagged() {
        let r = 0.5f64.sqrt();
        let m = SpectralMeasure::new(vec![(r, r, 1.0), (-r, -r, 1.0)]).unwrap();
        let e = bivariate_stable_error(&m, 1.5, 1.0, 0.2).unwrap();
        assert!(e.degenerate && e.value == 0.0);
    }

    #[test]
    fn spectral_chf_matches_closed_form() {
        let m = SpectralMeasure::nguyen(1.7, 1.0, 0.5, 0.3).unwrap();
        for c in [0.0, 0.3, 1.5] {
            let e = bivariate_stable_error(&m, 1.7, c, 0.4).unwrap().value;
            let cf = m.error_chf(1.7, c);
            assert!(rel(laue(&cf, 0.4), e) < 1e-8, "c={c}");
            let k = moment_from_chf_kawata(&cf, 0.4, &cfg()).unwrap().value;
            assert!(rel(k, e) < 1e-8, "c={c}");
        }
    }

    #[test]
    fn subgaussian_routes() {
        let (g, alpha, lambda) = (0.5, 1.8, 0.3);
        for c in [0.5, -1.0, 2.0] {
            let e = subgaussian_error(g, alpha, c, lambda).unwrap();
            let ints = subgaussian_spectral_integrals(g, alpha, c).unwrap();
            assert!(rel(ints.abs, (0.5 * quadratic_form(g, c)).powf(0.5 * alpha)) < 1e-12);
            let b = bivariate_stable_error_from_integrals(ints, alpha, lambda).unwrap().value;
            assert!(rel(b, e) < 1e-12);
            let cf = subgaussian_error_chf(g, alpha, c).unwrap();
            assert!(rel(laue(cf.as_ref(), lambda), e) < 1e-8);
        }
        assert_eq!(subgaussian_error(1.0, 1.5, 1.0, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn ou_limits_and_chf() {
        let (rate, alpha, lambda) = (0.7f64, 1.6, 0.4);
        let k = |s: f64| symmetric_stable_at_scale(alpha, s, lambda).unwrap();
        let t = 1.3;
        let c = (-rate * t).exp();
        let e = stable_ou_prediction_error(rate, alpha, t, c, lambda).unwrap();
        let s = (-(-alpha * rate * t).exp_m1() / (alpha * rate)).powf(1.0 / alpha);
        assert!(rel(e, k(s)) < 1e-13);
        let far = stable_ou_prediction_error(rate, alpha, 60.0, 0.0, lambda).unwrap();
        assert!(rel(far, k((alpha * rate).powf(-1.0 / alpha))) < 1e-13);
        for c in [0.0, 0.2, 1.7] {
            let e = stable_ou_prediction_error(rate, alpha, t, c, lambda).unwrap();
            let cf = stable_ou_error_chf(rate, alpha, t, c).unwrap();
            assert!(rel(laue(cf.as_ref(), lambda), e) < 1e-8, "c={c}");
        }
    }

    #[test]
    fn linnik_error_routes() {
        let (g, alpha, beta, lambda) = (-0.3, 1.7, 1.4, 0.5);
        assert_eq!(bivariate_linnik_error(1.0, alpha, beta, 1.0, lambda).unwrap(), 0.0);
        let marginal = linnik_moment(&LinnikParams::new(alpha, 1.0, beta).unwrap(), lambda).unwrap();
        assert!(rel(bivariate_linnik_error(g, alpha, beta, 0.0, lambda).unwrap(), marginal) < 1e-14);
        for c in [-0.3, 1.0] {
            let e = bivariate_linnik_error(g, alpha, beta, c, lambda).unwrap();
            let cf = bivariate_linnik_error_chf(g, alpha, beta, c).unwrap();
            assert!(rel(laue(cf.as_ref(), lambda), e) < 1e-8);
        }
    }

    #[test]
    fn regression_two_points() {
        let d = RegressionDesign::new(vec![0.0, 1.0], 0.0, 0.0).unwrap();
        let (alpha, lambda) = (1.5, 0.3);
        let (_, e1) = regression_errors(&d, &RegressionNoise::IidSymmetricStable { alpha }, lambda).unwrap();
        let coef = symmetric_stable_at_scale(alpha, 1.0, lambda).unwrap();
        assert!(rel(e1, coef * 2f64.powf((1.0 + lambda) / alpha)) < 1e-13);
    }

    #[test]
    fn regression_scales() {
        let d = RegressionDesign::new(vec![-2.0, -0.5, 0.5, 2.0], 0.0, 0.0).unwrap();
        let (s0, _) = d.error_scales(&RegressionNoise::EllipticalStable { alpha: 1.5 });
        assert!(rel(s0, 0.5) < 1e-15);
        let x = vec![0.3, 1.1, 2.0, 4.5, 5.0];
        let d1 = RegressionDesign::new(x.clone(), 0.0, 0.0).unwrap();
        let d2 = RegressionDesign::new(x.iter().map(|v| 2.0 * v).collect(), 0.0, 0.0).unwrap();
        let noise = RegressionNoise::EllipticalStable { alpha: 1.7 };
        let (_, e1) = regression_errors(&d1, &noise, 0.4).unwrap();
        let (_, e2) = regression_errors(&d2, &noise, 0.4).unwrap();
        assert!(rel(e2, e1 / 2f64.powf(1.4)) < 1e-13);
        // elliptical scales are Euclidean norms of the weights
        let (a, b) = d1.error_weights();
        let (s0, s1) = d1.error_scales(&noise);
        assert!(rel(s0, a.iter().map(|v| v * v).sum::<f64>().sqrt()) < 1e-13);
        assert!(rel(s1, b.iter().map(|v| v * v).sum::<f64>().sqrt()) < 1e-13);
        assert!(matches!(RegressionDesign::new(vec![1.0, 1.0], 0.0, 0.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn regression_chf_routes() {
        let d = RegressionDesign::new(vec![0.0, 0.4, 1.5, 3.0], 1.0, 2.0).unwrap();
        let lambda = 0.3;
        for noise in [
            RegressionNoise::IidSymmetricStable { alpha: 1.6 },
            RegressionNoise::EllipticalStable { alpha: 1.6 },
            RegressionNoise::MultivariateLinnik { alpha: 1.6, beta: 0.7 },
        ] {
            let (e0, e1) = regression_errors(&d, &noise, lambda).unwrap();
            let (c0, c1) = regression_error_chfs(&d, &noise).unwrap();
            assert!(rel(laue(c0.as_ref(), lambda), e0) < 1e-8, "{noise:?}");
            assert!(rel(laue(c1.as_ref(), lambda), e1) < 1e-8, "{noise:?}");
        }
    }
}
