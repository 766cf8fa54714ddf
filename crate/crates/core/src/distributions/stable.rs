//! Stable laws with `phi(t) = exp{i delta t - sigma^alpha |t|^alpha (1 - i theta sign t)}`,
//! `theta = beta tan(pi alpha / 2)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate_semiinf, QuadratureConfig};
use crate::specfun::gamma_fn;
use crate::transforms::{laue_constant, CharFn, MomentMethod, MomentResult};

use super::require_order_below;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub delta: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::domain(format!("stable alpha = {alpha} outside (0, 2]")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::domain(format!("stable beta = {beta} outside [-1, 1]")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!("stable sigma = {sigma} must be positive")));
        }
        if !delta.is_finite() {
            return Err(Error::domain("stable delta must be finite"));
        }
        if alpha == 1.0 && beta != 0.0 {
            return Err(Error::UnsupportedParam(
                "alpha = 1 is only supported with beta = 0".into(),
            ));
        }
        Ok(Self { alpha, beta, sigma, delta })
    }

    pub fn symmetric(alpha: f64, sigma: f64) -> Result<Self> {
        Self::new(alpha, 0.0, sigma, 0.0)
    }

    /// `beta tan(pi alpha / 2)`; zero for the Gaussian and the Cauchy case.
    pub fn theta(&self) -> f64 {
        if self.alpha == 2.0 || self.alpha == 1.0 {
            0.0
        } else {
            self.beta * (0.5 * PI * self.alpha).tan()
        }
    }

    pub fn chf(&self) -> StableChf {
        StableChf { p: *self, theta: self.theta() }
    }

    fn require_centred(&self) -> Result<()> {
        if self.delta != 0.0 {
            return Err(Error::domain("formula assumes delta = 0; shift the centre instead"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StableChf {
    p: StableParams,
    theta: f64,
}

impl StableChf {
    /// `(s, x)` with `phi(t) = e^(-s) e^(i x)`.
    fn exponent(&self, t: f64) -> (f64, f64) {
        let s = self.p.sigma.powf(self.p.alpha) * t.abs().powf(self.p.alpha);
        (s, self.p.delta * t + self.theta * s * t.signum())
    }
}

impl CharFn for StableChf {
    fn phi(&self, t: f64) -> Complex64 {
        let (s, x) = self.exponent(t);
        Complex64::from_polar((-s).exp(), x)
    }

    fn dphi(&self, t: f64) -> Complex64 {
        let StableParams { alpha, sigma, delta, .. } = self.p;
        if t == 0.0 {
            return Complex64::new(0.0, delta);
        }
        let g = alpha * sigma.powf(alpha) * t.abs().powf(alpha - 1.0);
        self.phi(t) * Complex64::new(-g * t.signum(), delta + g * self.theta)
    }

    fn one_minus_re_phi(&self, t: f64) -> f64 {
        let (s, x) = self.exponent(t);
        -(-s).exp_m1() + 2.0 * (-s).exp() * (0.5 * x).sin().powi(2)
    }

    fn small_t_index(&self) -> f64 {
        self.p.alpha
    }

    fn domain_note(&self) -> String {
        format!("stable alpha = {}: order must stay below alpha", self.p.alpha)
    }
}

/// `E|X|^(1+lambda)` for a symmetric stable law:
/// `K Gamma(1 - (1+lambda)/alpha) sigma^(1+lambda)`.
pub fn stable_symmetric_moment(p: &StableParams, lambda: f64) -> Result<f64> {
    p.require_centred()?;
    if p.theta() != 0.0 {
        return Err(Error::domain("symmetric formula needs beta = 0"));
    }
    require_order_below(p.alpha, lambda, "stable")?;
    let g = 1.0 + lambda;
    Ok(laue_constant(lambda)? * gamma_fn(1.0 - g / p.alpha)? * p.sigma.powf(g))
}

/// Symmetric stable moment through the Gaussian mixture representation,
/// `2^g Gamma((1+g)/2) Gamma(1 - g/alpha) sigma^g / (Gamma(1 - g/2) sqrt(pi))`.
pub fn stable_symmetric_moment_mixture(p: &StableParams, lambda: f64) -> Result<f64> {
    p.require_centred()?;
    require_order_below(p.alpha, lambda, "stable")?;
    let g = 1.0 + lambda;
    Ok(2f64.powf(g) * gamma_fn(0.5 * (1.0 + g))? * gamma_fn(1.0 - g / p.alpha)? * p.sigma.powf(g)
        / (gamma_fn(1.0 - 0.5 * g)? * PI.sqrt()))
}

/// `E|X|^(1+lambda)` for a stable law with `delta = 0` and any skewness.
pub fn stable_general_moment(p: &StableParams, lambda: f64) -> Result<f64> {
    p.require_centred()?;
    require_order_below(p.alpha, lambda, "stable")?;
    let g = 1.0 + lambda;
    let th = p.theta();
    let r = 1.0 - g / p.alpha;
    let ang = r * th.atan();
    Ok(laue_constant(lambda)?
        * gamma_fn(r)?
        * p.sigma.powf(g)
        * (1.0 + th * th).powf(g / (2.0 * p.alpha) - 0.5)
        * (ang.cos() + th * ang.sin()))
}

/// The same moment from the Mellin-transform expression
/// `Gamma(1 - g/alpha) (1+theta^2)^(g/(2 alpha)) cos((g/alpha) atan theta) sigma^g / (Gamma(1-g) cos(g pi/2))`.
pub fn stable_moment_mellin(p: &StableParams, lambda: f64) -> Result<f64> {
    p.require_centred()?;
    require_order_below(p.alpha, lambda, "stable")?;
    let g = 1.0 + lambda;
    let th = p.theta();
    let kappa = gamma_fn(1.0 - g)? * (0.5 * g * PI).cos();
    Ok(gamma_fn(1.0 - g / p.alpha)?
        * (1.0 + th * th).powf(g / (2.0 * p.alpha))
        * ((g / p.alpha) * th.atan()).cos()
        * p.sigma.powf(g)
        / kappa)
}

/// `E|X - mu|^(1+lambda)` for `delta = 0` from the two-integral representation
/// in the scaled variable `v = sigma u`:
/// `K sigma^g { (mu/sigma) int v^(-1-lambda) e^(-v^a) sin(m v - theta v^a)
///   + alpha int v^(a-lambda-2) e^(-v^a) [cos(m v - theta v^a) - theta sin(m v - theta v^a)] }`,
/// `m = mu / sigma`.
pub fn stable_shifted_moment(
    p: &StableParams,
    mu: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    p.require_centred()?;
    require_order_below(p.alpha, lambda, "stable")?;
    let k = laue_constant(lambda)?;
    let (a, th) = (p.alpha, p.theta());
    let m = mu / p.sigma;
    let scale = k * p.sigma.powf(1.0 + lambda);
    let split = Some(1.0 / m.abs().max(1.0));
    let mut parts = Vec::with_capacity(2);
    if m != 0.0 {
        let cfg1 = QuadratureConfig { split_point: split, ..cfg.with_singularity(-lambda) };
        let q = integrate_semiinf(
            |v: f64| {
                let s = v.powf(a);
                v.powf(-1.0 - lambda) * (-s).exp() * (m * v - th * s).sin()
            },
            &cfg1,
        )?
        .require_converged("stable shifted sine integral")?;
        parts.push(q.scaled(scale * m));
    }
    let cfg2 = QuadratureConfig { split_point: split, ..cfg.with_singularity(a - lambda - 2.0) };
    let q = integrate_semiinf(
        |v: f64| {
            let s = v.powf(a);
            let ph = m * v - th * s;
            v.powf(a - lambda - 2.0) * (-s).exp() * (ph.cos() - th * ph.sin())
        },
        &cfg2,
    )?
    .require_converged("stable shifted cosine integral")?;
    parts.push(q.scaled(scale * a));
    Ok(MomentResult::from_integrals(1.0, &parts, MomentMethod::ClosedForm))
}

/// `E X^gamma = Gamma(1 - gamma/alpha) sigma^gamma / Gamma(1 - gamma)` for a
/// positive stable law with Laplace transform `exp(-(sigma t)^alpha)`,
/// `0 < alpha < 1`, `0 < gamma < alpha`.
pub fn stable_subordinator_moment(alpha: f64, sigma: f64, gamma: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("subordinator alpha = {alpha} outside (0, 1)")));
    }
    if !(sigma > 0.0) {
        return Err(Error::domain("sigma must be positive"));
    }
    if !(gamma > 0.0) {
        return Err(Error::domain("gamma must be positive"));
    }
    if gamma >= alpha {
        return Err(Error::existence(format!(
            "positive stable law with alpha = {alpha} has no moment of order {gamma}"
        )));
    }
    Ok(gamma_fn(1.0 - gamma / alpha)? * sigma.powf(gamma) / gamma_fn(1.0 - gamma)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn chf_examples() {
        let g = StableParams::new(2.0, 0.0, 1.0, 0.0).unwrap().chf();
        for &t in &[0.0, 0.3, 1.0, 2.5] {
            assert!((g.phi(t).re - (-t * t).exp()).abs() < 1e-15);
            assert!(g.phi(t).im.abs() < 1e-15);
        }
        let s = StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap().chf();
        assert!((s.phi(1.0).re - (-1.0f64).exp()).abs() < 1e-15);
        let sk = StableParams::new(1.5, 1.0, 1.0, 0.3).unwrap().chf();
        for k in 0..64 {
            let t = 0.1 + 0.15 * k as f64;
            let d = sk.phi(-t) - sk.phi(t).conj();
            assert!(d.norm() < 1e-15);
            assert!(sk.phi(t).norm() <= 1.0);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let c = StableParams::new(1.7, -0.6, 1.3, 0.4).unwrap().chf();
        for &t in &[-2.0, -0.7, 0.2, 1.1] {
            let h = 1e-6;
            let fd = (c.phi(t + h) - c.phi(t - h)) / (2.0 * h);
            assert!((fd - c.dphi(t)).norm() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn one_minus_re_phi_is_accurate_near_zero() {
        let c = StableParams::new(1.8, 0.5, 1.0, 0.0).unwrap().chf();
        let t: f64 = 1e-7;
        let s = t.powf(1.8);
        // leading order: s (the theta term enters at s^2)
        assert!(rel(c.one_minus_re_phi(t), s) < 1e-10);
    }

    #[test]
    fn unsupported_and_invalid() {
        assert!(matches!(StableParams::new(1.0, 0.5, 1.0, 0.0), Err(Error::UnsupportedParam(_))));
        assert!(StableParams::new(2.1, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 1.1, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 0.0, 0.0).is_err());
        let p = StableParams::symmetric(1.5, 1.0).unwrap();
        assert!(matches!(stable_symmetric_moment(&p, 0.5), Err(Error::Existence(_))));
    }

    #[test]
    fn gaussian_value() {
        let p = StableParams::symmetric(2.0, 1.0).unwrap();
        let v = stable_symmetric_moment(&p, 0.5).unwrap();
        assert!(rel(v, 1.446_409_084_632_077_142_5) < 1e-13);
    }

    #[test]
    fn symmetric_forms_agree() {
        for &a in &[1.3, 1.5, 1.8, 1.95, 2.0] {
            for &l in &[0.1, 0.25] {
                let p = StableParams::symmetric(a, 1.7).unwrap();
                let x = stable_symmetric_moment(&p, l).unwrap();
                let y = stable_symmetric_moment_mixture(&p, l).unwrap();
                let z = stable_general_moment(&p, l).unwrap();
                assert!(rel(x, y) < 1e-12 && rel(x, z) < 1e-13, "a={a} l={l}");
            }
        }
    }

    #[test]
    fn general_forms_agree_and_are_even_in_beta() {
        for &a in &[1.3, 1.8] {
            for &b in &[-1.0, -0.3, 0.7, 1.0] {
                let p = StableParams::new(a, b, 0.8, 0.0).unwrap();
                let q = StableParams::new(a, -b, 0.8, 0.0).unwrap();
                let x = stable_general_moment(&p, 0.2).unwrap();
                assert!(rel(x, stable_moment_mellin(&p, 0.2).unwrap()) < 1e-11);
                assert!(rel(x, stable_general_moment(&q, 0.2).unwrap()) < 1e-14);
            }
        }
    }

    #[test]
    fn sigma_scaling() {
        let p1 = StableParams::symmetric(1.8, 1.0).unwrap();
        let p2 = StableParams::symmetric(1.8, 2.0).unwrap();
        let r = stable_symmetric_moment(&p2, 0.5).unwrap() / stable_symmetric_moment(&p1, 0.5).unwrap();
        assert!(rel(r, 2f64.powf(1.5)) < 1e-13);
    }

    #[test]
    fn shifted_reduces_at_zero_and_is_symmetric() {
        let cfg = QuadratureConfig::default();
        for &b in &[-1.0, 0.0, 0.5] {
            let p = StableParams::new(1.8, b, 1.0, 0.0).unwrap();
            let r = stable_shifted_moment(&p, 0.0, 0.5, &cfg).unwrap();
            assert!(rel(r.value, stable_general_moment(&p, 0.5).unwrap()) < 1e-9, "b={b}");
        }
        let p = StableParams::symmetric(1.8, 1.0).unwrap();
        for &mu in &[0.5, 2.0, 5.0] {
            let a = stable_shifted_moment(&p, mu, 0.5, &cfg).unwrap().value;
            let b = stable_shifted_moment(&p, -mu, 0.5, &cfg).unwrap().value;
            assert!(rel(a, b) < 1e-10);
        }
    }

    #[test]
    fn subordinator_utility() {
        // alpha = 1/2: Levy law with E X^g = Gamma(1 - 2g) / Gamma(1 - g)
        let v = stable_subordinator_moment(0.5, 1.0, 0.25).unwrap();
        assert!(rel(v, gamma_fn(0.5).unwrap() / gamma_fn(0.75).unwrap()) < 1e-14);
        assert!(matches!(stable_subordinator_moment(0.5, 1.0, 0.6), Err(Error::Existence(_))));
    }
}
