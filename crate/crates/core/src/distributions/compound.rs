//! Compound Poisson laws `X = J_1 + ... + J_N`, `N ~ Poisson(c)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate_finite, Endpoint, QuadratureConfig};
use crate::specfun::{beta_fn, gamma_fn, hyp1f1};
use crate::transforms::{
    laue_constant, moment_from_laplace, CharFn, LaplaceFn, MomentMethod, MomentResult,
};

use super::linnik::LinnikParams;
use super::stable::{stable_symmetric_moment, StableParams};
use super::require_order_below;

/// Poisson weights below this are dropped from series.
const WEIGHT_FLOOR: f64 = 1e-16;

/// Jump distribution of a compound Poisson law.
#[derive(Clone)]
pub enum JumpSpec {
    /// Exponential with mean `beta`.
    Exponential { beta: f64 },
    /// Symmetric stable with unit scale.
    SymmetricStable { alpha: f64 },
    /// `phi(t) = (1 + |t|^alpha)^(-beta)`.
    Linnik { alpha: f64, beta: f64 },
    /// Unit jump.
    Deterministic,
    Custom(CustomJump),
}

/// User-supplied jump law, by ch.f. or, for nonnegative jumps, by Laplace transform.
#[derive(Clone)]
pub enum CustomJump {
    Chf(Arc<dyn CharFn>),
    Laplace(Arc<dyn LaplaceFn>),
}

impl fmt::Debug for JumpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JumpSpec::Exponential { beta } => write!(f, "Exponential({beta})"),
            JumpSpec::SymmetricStable { alpha } => write!(f, "SymmetricStable({alpha})"),
            JumpSpec::Linnik { alpha, beta } => write!(f, "Linnik({alpha}, {beta})"),
            JumpSpec::Deterministic => write!(f, "Deterministic"),
            JumpSpec::Custom(CustomJump::Chf(c)) => write!(f, "Custom(chf: {})", c.domain_note()),
            JumpSpec::Custom(CustomJump::Laplace(l)) => {
                write!(f, "Custom(laplace: {})", l.domain_note())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompoundPoissonParams {
    pub c: f64,
    pub jump: JumpSpec,
}

impl CompoundPoissonParams {
    pub fn new(c: f64, jump: JumpSpec) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("intensity c = {c} must be positive")));
        }
        match jump {
            JumpSpec::Exponential { beta } if !(beta > 0.0 && beta.is_finite()) => {
                return Err(Error::domain("exponential jump mean must be positive"));
            }
            JumpSpec::SymmetricStable { alpha } if !(alpha > 0.0 && alpha <= 2.0) => {
                return Err(Error::domain(format!("stable jump alpha = {alpha} outside (0, 2]")));
            }
            JumpSpec::Linnik { alpha, beta } => {
                LinnikParams::new(alpha, 1.0, beta)?;
            }
            _ => {}
        }
        Ok(Self { c, jump })
    }

    pub fn jump_chf(&self) -> Option<Arc<dyn CharFn>> {
        Some(match &self.jump {
            JumpSpec::Exponential { beta } => Arc::new(ExponentialChf { beta: *beta }),
            JumpSpec::SymmetricStable { alpha } => {
                Arc::new(StableParams::symmetric(*alpha, 1.0).ok()?.chf())
            }
            JumpSpec::Linnik { alpha, beta } => {
                Arc::new(LinnikParams::new(*alpha, 1.0, *beta).ok()?.chf())
            }
            JumpSpec::Deterministic => Arc::new(UnitAtomChf),
            JumpSpec::Custom(CustomJump::Chf(c)) => c.clone(),
            JumpSpec::Custom(CustomJump::Laplace(_)) => return None,
        })
    }

    pub fn jump_laplace(&self) -> Option<Arc<dyn LaplaceFn>> {
        Some(match &self.jump {
            JumpSpec::Exponential { beta } => Arc::new(ExponentialLaplace { beta: *beta }),
            JumpSpec::Deterministic => Arc::new(UnitAtomLaplace),
            JumpSpec::Custom(CustomJump::Laplace(l)) => l.clone(),
            _ => return None,
        })
    }

    /// `exp(c (phi_J(t) - 1))`; `None` for a jump given only by its Laplace transform.
    pub fn chf(&self) -> Option<CompoundPoissonChf> {
        Some(CompoundPoissonChf { c: self.c, jump: self.jump_chf()? })
    }

    /// `exp(-c (1 - L_J(t)))` for nonnegative jumps.
    pub fn laplace(&self) -> Option<CompoundPoissonLaplace> {
        Some(CompoundPoissonLaplace { c: self.c, jump: self.jump_laplace()? })
    }

    pub fn jump_is_symmetric(&self) -> bool {
        matches!(self.jump, JumpSpec::SymmetricStable { .. } | JumpSpec::Linnik { .. })
    }
}

#[derive(Debug, Clone, Copy)]
struct ExponentialChf {
    beta: f64,
}

impl CharFn for ExponentialChf {
    fn phi(&self, t: f64) -> Complex64 {
        Complex64::new(1.0, -self.beta * t).inv()
    }

    fn dphi(&self, t: f64) -> Complex64 {
        let d = Complex64::new(1.0, -self.beta * t);
        Complex64::new(0.0, self.beta) / (d * d)
    }

    fn one_minus_re_phi(&self, t: f64) -> f64 {
        let bt2 = (self.beta * t).powi(2);
        bt2 / (1.0 + bt2)
    }

    fn small_t_index(&self) -> f64 {
        2.0
    }

    fn domain_note(&self) -> String {
        format!("exponential jump with mean {}", self.beta)
    }
}

#[derive(Debug, Clone, Copy)]
struct ExponentialLaplace {
    beta: f64,
}

impl LaplaceFn for ExponentialLaplace {
    fn lp(&self, t: f64) -> f64 {
        1.0 / (1.0 + self.beta * t)
    }

    fn dlp(&self, t: f64) -> f64 {
        -self.beta / (1.0 + self.beta * t).powi(2)
    }

    fn dlp_at_zero(&self) -> f64 {
        -self.beta
    }

    fn dlp_excess(&self, t: f64) -> f64 {
        let bt = self.beta * t;
        self.beta * bt * (2.0 + bt) / (1.0 + bt).powi(2)
    }

    fn one_minus_lp(&self, t: f64) -> f64 {
        let bt = self.beta * t;
        bt / (1.0 + bt)
    }

    fn small_t_index(&self) -> f64 {
        2.0
    }

    fn domain_note(&self) -> String {
        format!("exponential jump with mean {}", self.beta)
    }
}

#[derive(Debug, Clone, Copy)]
struct UnitAtomChf;

impl CharFn for UnitAtomChf {
    fn phi(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, t)
    }

    fn dphi(&self, t: f64) -> Complex64 {
        Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, t)
    }

    fn one_minus_re_phi(&self, t: f64) -> f64 {
        2.0 * (0.5 * t).sin().powi(2)
    }

    fn small_t_index(&self) -> f64 {
        2.0
    }

    fn period(&self) -> Option<f64> {
        Some(2.0 * PI)
    }

    fn domain_note(&self) -> String {
        "unit jump".into()
    }
}

#[derive(Debug, Clone, Copy)]
struct UnitAtomLaplace;

impl LaplaceFn for UnitAtomLaplace {
    fn lp(&self, t: f64) -> f64 {
        (-t).exp()
    }

    fn dlp(&self, t: f64) -> f64 {
        -(-t).exp()
    }

    fn dlp_at_zero(&self) -> f64 {
        -1.0
    }

    fn dlp_excess(&self, t: f64) -> f64 {
        -(-t).exp_m1()
    }

    fn one_minus_lp(&self, t: f64) -> f64 {
        -(-t).exp_m1()
    }

    fn small_t_index(&self) -> f64 {
        2.0
    }

    fn domain_note(&self) -> String {
        "unit jump".into()
    }
}

#[derive(Clone)]
pub struct CompoundPoissonChf {
    c: f64,
    jump: Arc<dyn CharFn>,
}

impl CharFn for CompoundPoissonChf {
    fn phi(&self, t: f64) -> Complex64 {
        (self.c * (self.jump.phi(t) - 1.0)).exp()
    }

    fn dphi(&self, t: f64) -> Complex64 {
        self.c * self.jump.dphi(t) * self.phi(t)
    }

    fn one_minus_re_phi(&self, t: f64) -> f64 {
        let a = self.c * self.jump.one_minus_re_phi(t);
        let b = self.c * self.jump.phi(t).im;
        -(-a).exp_m1() + 2.0 * (-a).exp() * (0.5 * b).sin().powi(2)
    }

    fn small_t_index(&self) -> f64 {
        self.jump.small_t_index()
    }

    fn period(&self) -> Option<f64> {
        self.jump.period()
    }

    fn domain_note(&self) -> String {
        format!("compound Poisson with c = {} and {}", self.c, self.jump.domain_note())
    }
}

#[derive(Clone)]
pub struct CompoundPoissonLaplace {
    c: f64,
    jump: Arc<dyn LaplaceFn>,
}

impl LaplaceFn for CompoundPoissonLaplace {
    fn lp(&self, t: f64) -> f64 {
        (-self.c * self.jump.one_minus_lp(t)).exp()
    }

    fn dlp(&self, t: f64) -> f64 {
        self.c * self.jump.dlp(t) * self.lp(t)
    }

    fn dlp_at_zero(&self) -> f64 {
        self.c * self.jump.dlp_at_zero()
    }

    fn dlp_excess(&self, t: f64) -> f64 {
        let one_minus = -(-self.c * self.jump.one_minus_lp(t)).exp_m1();
        let mean_j = -self.jump.dlp_at_zero();
        self.c * (self.jump.dlp_excess(t) * self.lp(t) + mean_j * one_minus)
    }

    fn one_minus_lp(&self, t: f64) -> f64 {
        -(-self.c * self.jump.one_minus_lp(t)).exp_m1()
    }

    fn small_t_index(&self) -> f64 {
        self.jump.small_t_index()
    }

    fn domain_note(&self) -> String {
        format!("compound Poisson with c = {} and {}", self.c, self.jump.domain_note())
    }
}

/// Poisson(c) weights `e^(-c) c^k / k!` for `k = 0, 1, ...` until they fall
/// below [`WEIGHT_FLOOR`] past the mode.
fn poisson_weights(c: f64) -> Vec<f64> {
    let mut w = vec![(-c).exp()];
    let mut k = 0usize;
    let mut ln_w = -c;
    loop {
        k += 1;
        ln_w += c.ln() - (k as f64).ln();
        let wk = ln_w.exp();
        w.push(wk);
        if k as f64 > c && wk < WEIGHT_FLOOR {
            return w;
        }
    }
}

/// `e^(-c) sum_k |k - mu|^g c^k / k!` for the unit-jump law.
pub fn cp_deterministic_moment(c: f64, mu: f64, lambda: f64) -> Result<f64> {
    crate::transforms::laue_constant(lambda)?;
    let g = 1.0 + lambda;
    Ok(poisson_weights(c)
        .iter()
        .enumerate()
        .map(|(k, w)| w * (k as f64 - mu).abs().powf(g))
        .sum())
}

/// `c beta^g Gamma(2+lambda) {1F1(1-lambda; 2; -c) + (c/2) 1F1(1-lambda; 3; -c)}`.
pub fn cp_exponential_moment(c: f64, beta: f64, lambda: f64) -> Result<f64> {
    laue_constant(lambda)?;
    let a = hyp1f1(1.0 - lambda, 2.0, -c)?.value;
    let b = hyp1f1(1.0 - lambda, 3.0, -c)?.value;
    Ok(c * beta.powf(1.0 + lambda) * gamma_fn(2.0 + lambda)? * (a + 0.5 * c * b))
}

/// `K e^(-c) c sum_n c^n Gamma(1 - g/alpha) / (n! (n+1)^(1 - g/alpha))`.
///
/// The sum is cut at the first term below `1e-16` of the partial sum and the
/// remaining Poisson mass bounds the error.
pub fn cp_stable_series(c: f64, alpha: f64, lambda: f64) -> Result<MomentResult> {
    require_order_below(alpha, lambda, "stable jump")?;
    let k = laue_constant(lambda)?;
    let r = 1.0 - (1.0 + lambda) / alpha;
    let g = gamma_fn(r)?;
    let mut sum = 0.0;
    let mut ln_w = -c;
    for n in 0..100_000usize {
        if n > 0 {
            ln_w += c.ln() - (n as f64).ln();
        }
        let term = ln_w.exp() * (n as f64 + 1.0).powf(-r);
        sum += term;
        if n as f64 > c && term < WEIGHT_FLOOR * sum {
            let scale = k * c * g;
            let tail = ln_w.exp() * c / (n as f64 + 1.0 - c);
            let mut res = MomentResult::closed_form(scale * sum);
            res.abs_err_est += scale * tail;
            return Ok(res);
        }
    }
    Err(Error::NonConvergence {
        what: "stable-jump compound Poisson series".into(),
        value: k * c * g * sum,
        abs_err: f64::NAN,
    })
}

/// `K c e^(-c) int_0^1 v^(g/(alpha beta)) (1 - v^(1/beta))^(-g/alpha) e^(c v) dv`.
pub fn cp_linnik_moment(
    c: f64,
    alpha: f64,
    beta: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    require_order_below(alpha, lambda, "Linnik jump")?;
    let k = laue_constant(lambda)?;
    let g = 1.0 + lambda;
    let (p, r) = (g / (alpha * beta), g / alpha);
    // integrate in d = 1 - v so the singular end keeps full precision
    let qcfg = QuadratureConfig { singular_endpoint: Endpoint::Lower, ..cfg.with_singularity(-r) };
    let q = integrate_finite(
        |d: f64| {
            let ln_v = (-d).ln_1p();
            let gap = -(ln_v / beta).exp_m1();
            (p * ln_v - c * d).exp() * gap.powf(-r)
        },
        0.0,
        1.0,
        &qcfg,
    )?
    .require_converged("Linnik-jump integral")?;
    Ok(MomentResult::from_integrals(k * c, &[q], MomentMethod::ClosedForm))
}

/// `beta = 1` case: `K c e^(-c) B(1 - g/alpha, 1 + g/alpha) 1F1(1 + g/alpha; 2; c)`.
pub fn cp_geometric_stable_moment(c: f64, alpha: f64, lambda: f64) -> Result<f64> {
    require_order_below(alpha, lambda, "geometric stable jump")?;
    let r = (1.0 + lambda) / alpha;
    let f = hyp1f1(1.0 + r, 2.0, c)?.value;
    Ok(laue_constant(lambda)? * c * (-c).exp() * beta_fn(1.0 - r, 1.0 + r)? * f)
}

/// Family-specific formula for `E|X - mu|^(1+lambda)`, when one exists.
pub fn cp_closed_form(
    p: &CompoundPoissonParams,
    mu: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Option<Result<MomentResult>> {
    match (&p.jump, mu == 0.0) {
        (JumpSpec::Deterministic, _) => {
            Some(cp_deterministic_moment(p.c, mu, lambda).map(MomentResult::closed_form))
        }
        (JumpSpec::Exponential { beta }, true) => {
            Some(cp_exponential_moment(p.c, *beta, lambda).map(MomentResult::closed_form))
        }
        (JumpSpec::SymmetricStable { alpha }, true) => Some(cp_stable_series(p.c, *alpha, lambda)),
        (JumpSpec::Linnik { alpha, beta }, true) => {
            Some(cp_linnik_moment(p.c, *alpha, *beta, lambda, cfg))
        }
        _ => None,
    }
}

/// `sum_k P(N = k) E|J_1 + ... + J_k|^(1+lambda)` for jump families closed
/// under convolution.
pub fn cp_moment_convolution_route(
    p: &CompoundPoissonParams,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    let g = 1.0 + lambda;
    let weights = poisson_weights(p.c);
    let mut total = MomentResult::closed_form(0.0);
    let mut add = |w: f64, m: MomentResult| {
        total.value += w * m.value;
        total.abs_err_est += w * m.abs_err_est;
        total.diagnostics.integrals += m.diagnostics.integrals;
        total.diagnostics.segments_used += m.diagnostics.segments_used;
        total.diagnostics.evaluations += m.diagnostics.evaluations;
    };
    match &p.jump {
        JumpSpec::Deterministic => {
            laue_constant(lambda)?;
            for (k, &w) in weights.iter().enumerate().skip(1) {
                add(w, MomentResult::closed_form((k as f64).powf(g)));
            }
        }
        JumpSpec::SymmetricStable { alpha } => {
            let m1 = stable_symmetric_moment(&StableParams::symmetric(*alpha, 1.0)?, lambda)?;
            for (k, &w) in weights.iter().enumerate().skip(1) {
                add(w, MomentResult::closed_form((k as f64).powf(g / alpha) * m1));
            }
        }
        JumpSpec::Exponential { beta } => {
            for (k, &w) in weights.iter().enumerate().skip(1) {
                let lp = GammaLaplace { shape: k as f64, scale: *beta };
                add(w, moment_from_laplace(&lp, lambda, cfg)?);
            }
        }
        other => {
            return Err(Error::UnsupportedJump(format!(
                "{other:?} has no k-fold convolution in closed form"
            )))
        }
    }
    total.method_used = MomentMethod::ClosedForm;
    Ok(total)
}

/// Gamma(shape, scale) Laplace transform `(1 + scale t)^(-shape)`.
#[derive(Debug, Clone, Copy)]
struct GammaLaplace {
    shape: f64,
    scale: f64,
}

impl LaplaceFn for GammaLaplace {
    fn lp(&self, t: f64) -> f64 {
        (-self.shape * (self.scale * t).ln_1p()).exp()
    }

    fn dlp(&self, t: f64) -> f64 {
        -self.shape * self.scale * (-(self.shape + 1.0) * (self.scale * t).ln_1p()).exp()
    }

    fn dlp_at_zero(&self) -> f64 {
        -self.shape * self.scale
    }

    fn dlp_excess(&self, t: f64) -> f64 {
        let x = -(-(self.shape + 1.0) * (self.scale * t).ln_1p()).exp_m1();
        self.shape * self.scale * x
    }

    fn small_t_index(&self) -> f64 {
        2.0
    }

    fn domain_note(&self) -> String {
        format!("gamma law with shape {}", self.shape)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{moment_centered_from_chf, moment_from_chf_kawata, moment_shifted_from_chf};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn cp(c: f64, jump: JumpSpec) -> CompoundPoissonParams {
        CompoundPoissonParams::new(c, jump).unwrap()
    }

    #[test]
    fn unit_jump_series_value() {
        // e^-1 sum k^1.5 / k!, mpmath
        let v = cp_deterministic_moment(1.0, 0.0, 0.5).unwrap();
        assert!(rel(v, 1.3727326403575221) < 1e-13, "{v}");
        let conv = cp_moment_convolution_route(&cp(1.0, JumpSpec::Deterministic), 0.5, &cfg())
            .unwrap()
            .value;
        assert!(rel(conv, v) < 1e-14);
    }

    #[test]
    fn unit_jump_transform_routes() {
        let p = cp(1.0, JumpSpec::Deterministic);
        let cf = p.chf().unwrap();
        let exact = cp_deterministic_moment(1.0, 0.0, 0.5).unwrap();
        let l = moment_from_laplace(&p.laplace().unwrap(), 0.5, &cfg()).unwrap().value;
        let k = moment_from_chf_kawata(&cf, 0.5, &cfg()).unwrap().value;
        assert!(rel(l, exact) < 1e-9 && rel(k, exact) < 1e-8, "{l} {k} {exact}");
        for &mu in &[0.5, 2.0] {
            let s = moment_shifted_from_chf(&cf, 0.5, mu, &cfg()).unwrap().value;
            let e = cp_deterministic_moment(1.0, mu, 0.5).unwrap();
            assert!(rel(s, e) < 1e-8, "mu={mu}: {s} vs {e}");
        }
    }

    #[test]
    fn exponential_jump_routes() {
        let p = cp(2.0, JumpSpec::Exponential { beta: 1.0 });
        let closed = cp_exponential_moment(2.0, 1.0, 0.5).unwrap();
        let lp = moment_from_laplace(&p.laplace().unwrap(), 0.5, &cfg()).unwrap().value;
        let conv = cp_moment_convolution_route(&p, 0.5, &cfg()).unwrap().value;
        let laue = moment_centered_from_chf(&p.chf().unwrap(), 0.5, &cfg()).unwrap().value;
        assert!(rel(lp, closed) < 1e-9, "{lp} vs {closed}");
        assert!(rel(conv, closed) < 1e-8, "{conv} vs {closed}");
        assert!(rel(laue, closed) < 1e-8, "{laue} vs {closed}");
        let tiny = cp_exponential_moment(1e-9, 1.0, 0.5).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-8);
    }

    #[test]
    fn stable_jump_series_matches_integrals() {
        let (c, a, l) = (1.5, 1.8, 0.5);
        let p = cp(c, JumpSpec::SymmetricStable { alpha: a });
        let series = cp_stable_series(c, a, l).unwrap().value;
        let conv = cp_moment_convolution_route(&p, l, &cfg()).unwrap().value;
        let kaw = moment_from_chf_kawata(&p.chf().unwrap(), l, &cfg()).unwrap().value;
        assert!(rel(series, conv) < 1e-13, "{series} vs {conv}");
        assert!(rel(series, kaw) < 1e-8, "{series} vs {kaw}");
    }

    #[test]
    fn linnik_jump_forms() {
        let (c, a, l) = (1.3, 1.7, 0.4);
        let p = cp(c, JumpSpec::Linnik { alpha: a, beta: 1.0 });
        let int = cp_linnik_moment(c, a, 1.0, l, &cfg()).unwrap().value;
        let beta_form = cp_geometric_stable_moment(c, a, l).unwrap();
        let laue = moment_centered_from_chf(&p.chf().unwrap(), l, &cfg()).unwrap().value;
        assert!(rel(int, beta_form) < 1e-9, "{int} vs {beta_form}");
        assert!(rel(int, laue) < 1e-8, "{int} vs {laue}");
        let p = cp(0.7, JumpSpec::Linnik { alpha: 1.9, beta: 2.5 });
        let int = cp_linnik_moment(0.7, 1.9, 2.5, 0.5, &cfg()).unwrap().value;
        let kaw = moment_from_chf_kawata(&p.chf().unwrap(), 0.5, &cfg()).unwrap().value;
        assert!(rel(int, kaw) < 1e-8, "{int} vs {kaw}");
    }

    #[test]
    fn intensity_additivity() {
        for jump in [
            JumpSpec::Exponential { beta: 0.7 },
            JumpSpec::SymmetricStable { alpha: 1.5 },
            JumpSpec::Linnik { alpha: 1.2, beta: 2.0 },
            JumpSpec::Deterministic,
        ] {
            let a = cp(0.4, jump.clone()).chf().unwrap();
            let b = cp(1.1, jump.clone()).chf().unwrap();
            let ab = cp(1.5, jump).chf().unwrap();
            for k in 0..64 {
                let t = -6.0 + 0.19 * k as f64;
                assert!((ab.phi(t) - a.phi(t) * b.phi(t)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn chf_invariants() {
        let p = cp(0.8, JumpSpec::Exponential { beta: 2.0 });
        let f = p.chf().unwrap();
        assert_eq!(f.phi(0.0), Complex64::new(1.0, 0.0));
        for k in 0..64 {
            let t = 0.05 + 0.3 * k as f64;
            assert!((f.phi(-t) - f.phi(t).conj()).norm() < 1e-15);
            assert!(f.phi(t).norm() <= 1.0 + 1e-15);
            assert!((1.0 - f.phi(t).re - f.one_minus_re_phi(t)).abs() < 1e-14);
            let h = 1e-6;
            let fd = (f.phi(t + h) - f.phi(t - h)) / (2.0 * h);
            assert!((fd - f.dphi(t)).norm() < 1e-7);
        }
    }

    #[test]
    fn non_closed_jump_rejected() {
        let p = cp(1.0, JumpSpec::Linnik { alpha: 1.5, beta: 2.0 });
        assert!(matches!(
            cp_moment_convolution_route(&p, 0.3, &cfg()),
            Err(Error::UnsupportedJump(_))
        ));
    }
}
