//! Generic moment evaluators.
//!
//! Every evaluator reduces `E|X - mu|^(1+lambda)` to one or two real integrals
//! over `(0, inf)` with an `u^(-1-lambda)` or `u^(-2-lambda)` weight:
//!
//! | method | integrand | constant |
//! |---|---|---|
//! | Laue, centred | `Re phi'(-u) u^(-1-lambda)` | `K = lambda / (sin(lambda pi/2) Gamma(1-lambda))` |
//! | Laue, shifted | `sin(mu u)[mu Re phi(-u) - Im phi'(-u)] + cos(mu u)[mu Im phi(-u) + Re phi'(-u)]` | `K` |
//! | Kawata | `(1 - Re phi(u)) u^(-2-lambda)` | `(1+lambda) K` |
//! | Laplace | `(phi'(u) - phi'(0+)) u^(-1-lambda)` | `lambda / Gamma(1-lambda)` |
//!
//! The shifted Laue integrand is `Im[e^(i mu u) phi(-u)] mu + Re[e^(i mu u) phi'(-u)]`
//! regrouped by trigonometric factor so that each piece has a single
//! oscillation for the quadrature to track.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate_semiinf, integrate_smooth, QuadResult, QuadratureConfig};
use crate::specfun::gamma_fn;

/// Characteristic function `phi(t) = E e^(itX)` with its analytic derivative.
pub trait CharFn: Send + Sync {
    fn phi(&self, t: f64) -> Complex64;

    fn dphi(&self, t: f64) -> Complex64;

    /// `1 - Re phi(t)`. Families override this with a form that does not
    /// cancel for small `t`.
    fn one_minus_re_phi(&self, t: f64) -> f64 {
        1.0 - self.phi(t).re
    }

    /// Exponent `k` of `1 - Re phi(t) ~ C t^k` at the origin: `alpha` for
    /// stable-like laws, 2 when the variance is finite.
    fn small_t_index(&self) -> f64;

    /// Period of `phi` for lattice laws.
    fn period(&self) -> Option<f64> {
        None
    }

    /// Parameter constraints of the family, for messages.
    fn domain_note(&self) -> String;
}

/// Laplace transform `phi(t) = E e^(-tX)` of a nonnegative variable, `t >= 0`.
pub trait LaplaceFn: Send + Sync {
    fn lp(&self, t: f64) -> f64;

    fn dlp(&self, t: f64) -> f64;

    /// `phi'(0+) = -E X`; `-inf` when the mean is infinite.
    fn dlp_at_zero(&self) -> f64;

    /// `phi'(t) - phi'(0+) = E[X (1 - e^(-tX))]`.
    fn dlp_excess(&self, t: f64) -> f64 {
        self.dlp(t) - self.dlp_at_zero()
    }

    fn one_minus_lp(&self, t: f64) -> f64 {
        1.0 - self.lp(t)
    }

    /// Exponent `k` with `dlp_excess(t) ~ C t^(k-1)` at the origin.
    fn small_t_index(&self) -> f64;

    fn domain_note(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentMethod {
    Auto,
    ClosedForm,
    LaueCentered,
    LaueShifted,
    Kawata,
    Laplace,
}

impl MomentMethod {
    pub fn name(self) -> &'static str {
        match self {
            MomentMethod::Auto => "auto",
            MomentMethod::ClosedForm => "closed-form",
            MomentMethod::LaueCentered => "laue-centered",
            MomentMethod::LaueShifted => "laue-shifted",
            MomentMethod::Kawata => "kawata",
            MomentMethod::Laplace => "laplace",
        }
    }
}

impl fmt::Display for MomentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MomentMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "auto" => MomentMethod::Auto,
            "closed-form" | "closed" => MomentMethod::ClosedForm,
            "laue-centered" | "laue-centred" | "centered" => MomentMethod::LaueCentered,
            "laue-shifted" | "laue" | "shifted" => MomentMethod::LaueShifted,
            "kawata" => MomentMethod::Kawata,
            "laplace" | "lp" => MomentMethod::Laplace,
            other => return Err(Error::domain(format!("unknown method '{other}'"))),
        })
    }
}

/// Order `1 + lambda`, centre `mu` and evaluation route of a moment request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentQuery {
    pub lambda: f64,
    pub mu: f64,
    pub method: MomentMethod,
}

impl MomentQuery {
    pub fn new(lambda: f64, mu: f64, method: MomentMethod) -> Result<Self> {
        check_lambda(lambda)?;
        if !mu.is_finite() {
            return Err(Error::domain(format!("centre mu = {mu} is not finite")));
        }
        Ok(Self { lambda, mu, method })
    }

    pub fn gamma(&self) -> f64 {
        1.0 + self.lambda
    }
}

/// Work counters collected from the quadrature calls behind a result.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub integrals: usize,
    pub segments_used: usize,
    pub evaluations: usize,
}

impl Diagnostics {
    pub fn from_quad(parts: &[QuadResult]) -> Self {
        Self {
            integrals: parts.len(),
            segments_used: parts.iter().map(|q| q.segments_used).sum(),
            evaluations: parts.iter().map(|q| q.evaluations).sum(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentResult {
    pub value: f64,
    pub abs_err_est: f64,
    pub method_used: MomentMethod,
    pub diagnostics: Diagnostics,
}

impl MomentResult {
    /// Result of an explicit formula, carrying a rounding-level error estimate.
    pub fn closed_form(value: f64) -> Self {
        Self {
            value,
            abs_err_est: 64.0 * f64::EPSILON * value.abs(),
            method_used: MomentMethod::ClosedForm,
            diagnostics: Diagnostics::default(),
        }
    }

    pub(crate) fn from_integrals(
        scale: f64,
        parts: &[QuadResult],
        method: MomentMethod,
    ) -> Self {
        let value: f64 = parts.iter().map(|q| q.value).sum::<f64>() * scale;
        let err: f64 = parts.iter().map(|q| q.abs_err_est).sum::<f64>() * scale.abs();
        Self {
            value: value.max(0.0),
            abs_err_est: err,
            method_used: method,
            diagnostics: Diagnostics::from_quad(parts),
        }
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::domain(format!("lambda = {lambda} outside (0, 1)")));
    }
    Ok(())
}

/// `lambda / (sin(lambda pi / 2) Gamma(1 - lambda))`.
pub fn laue_constant(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(lambda / ((0.5 * lambda * PI).sin() * gamma_fn(1.0 - lambda)?))
}

/// Power of the integrand at the origin for a law whose `1 - Re phi` vanishes
/// like `t^index`; rejects orders at or above the index.
fn head_exponent(index: f64, lambda: f64, note: &str) -> Result<f64> {
    let s = index - 2.0 - lambda;
    if s <= -1.0 {
        return Err(Error::existence(format!(
            "order {} is not below the moment index {index} ({note})",
            1.0 + lambda
        )));
    }
    Ok(s.min(0.0))
}

fn require(q: QuadResult, what: &str) -> Result<QuadResult> {
    q.require_converged(what)
}

/// Accepts two pieces of a sum when their combined error meets the tolerance
/// of the sum, so that a small piece need not meet a relative target alone.
fn require_pair(
    a: QuadResult,
    b: QuadResult,
    cfg: &QuadratureConfig,
    what: &str,
) -> Result<(QuadResult, QuadResult)> {
    let err = a.abs_err_est + b.abs_err_est;
    let total = a.value + b.value;
    if (a.converged && b.converged) || err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
        return Ok((a, b));
    }
    Err(Error::NonConvergence { what: what.into(), value: total, abs_err: err })
}

/// Configures the tail of a Laue or Kawata integral for a law with a periodic
/// characteristic function, whose integrand does not decay beyond `u^tail`.
fn lattice_tail(cfg: &QuadratureConfig, period: Option<f64>, tail: f64) -> QuadratureConfig {
    match period {
        Some(p) => cfg.with_periodic_tail(p, tail),
        None => cfg.clone(),
    }
}

/// Smallest common period of `phi` (period `p`) and `sin(mu u)`, if the
/// frequency ratio is a fraction with a small denominator.
fn joint_period(p: f64, mu: f64) -> Option<f64> {
    let osc = 2.0 * PI / mu.abs();
    let r = p / osc;
    (1..=64u32).find_map(|q| {
        let num = r * q as f64;
        ((num - num.round()).abs() <= 1e-10 * num.max(1.0) && num.round() >= 1.0)
            .then(|| q as f64 * p)
    })
}

/// `E X^(1+lambda)` for nonnegative `X` from its Laplace transform.
pub fn moment_from_laplace(
    lp: &dyn LaplaceFn,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    check_lambda(lambda)?;
    let d0 = lp.dlp_at_zero();
    if !d0.is_finite() {
        return Err(Error::existence(format!(
            "Laplace transform has infinite slope at 0, so the mean is infinite ({})",
            lp.domain_note()
        )));
    }
    let s = head_exponent(lp.small_t_index(), lambda, &lp.domain_note())?;
    let cfg = cfg.with_singularity(s);
    let q = integrate_semiinf(|u: f64| lp.dlp_excess(u) * u.powf(-1.0 - lambda), &cfg)?;
    let q = require(q, "Laplace moment integral")?;
    let scale = lambda / gamma_fn(1.0 - lambda)?;
    Ok(MomentResult::from_integrals(scale, &[q], MomentMethod::Laplace))
}

/// `E|X|^(1+lambda)` from `Re phi'(-u)`.
pub fn moment_centered_from_chf(
    cf: &dyn CharFn,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    let k = laue_constant(lambda)?;
    let s = head_exponent(cf.small_t_index(), lambda, &cf.domain_note())?;
    let cfg = lattice_tail(cfg, cf.period(), -1.0 - lambda).with_singularity(s);
    let q = integrate_semiinf(|u: f64| cf.dphi(-u).re * u.powf(-1.0 - lambda), &cfg)?;
    let q = require(q, "centred Laue integral")?;
    Ok(MomentResult::from_integrals(k, &[q], MomentMethod::LaueCentered))
}

/// `E|X - mu|^(1+lambda)` from `phi` and `phi'` on the negative half line.
pub fn moment_shifted_from_chf(
    cf: &dyn CharFn,
    lambda: f64,
    mu: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    let k = laue_constant(lambda)?;
    if !mu.is_finite() {
        return Err(Error::domain(format!("centre mu = {mu} is not finite")));
    }
    let s = head_exponent(cf.small_t_index(), lambda, &cf.domain_note())?;
    let w = -1.0 - lambda;
    if mu == 0.0 {
        let cfg = lattice_tail(cfg, cf.period(), w).with_singularity(s);
        let q = integrate_semiinf(|u: f64| cf.dphi(-u).re * u.powf(w), &cfg)?;
        let q = require(q, "shifted Laue integral")?;
        return Ok(MomentResult::from_integrals(k, &[q], MomentMethod::LaueShifted));
    }
    let base = match cf.period() {
        Some(p) => {
            let joint = joint_period(p, mu).ok_or_else(|| {
                Error::UnsupportedParam(format!(
                    "centre {mu} is incommensurate with the lattice period {p}"
                ))
            })?;
            cfg.with_periodic_tail(joint, w)
        }
        None => cfg.clone(),
    };
    let periodic = base.tail_period > 0.0;
    let sin_cfg = if periodic { base.clone() } else { base.with_oscillation(mu, 0.0) }
        .with_singularity(-lambda);
    let cos_cfg = if periodic { base.clone() } else { base.with_oscillation(mu, 0.5 * PI) }
        .with_singularity(s);
    let q_sin = integrate_semiinf(
        |u: f64| {
            let (ph, dph) = (cf.phi(-u), cf.dphi(-u));
            (mu * u).sin() * (mu * ph.re - dph.im) * u.powf(w)
        },
        &sin_cfg,
    )?;
    let q_cos = integrate_semiinf(
        |u: f64| {
            let (ph, dph) = (cf.phi(-u), cf.dphi(-u));
            (mu * u).cos() * (mu * ph.im + dph.re) * u.powf(w)
        },
        &cos_cfg,
    )?;
    let (q_sin, q_cos) = require_pair(q_sin, q_cos, &base, "shifted Laue integrals")?;
    Ok(MomentResult::from_integrals(k, &[q_sin, q_cos], MomentMethod::LaueShifted))
}

/// `E|X|^(1+lambda)` from `1 - Re phi(u)`.
pub fn moment_from_chf_kawata(
    cf: &dyn CharFn,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    let k = laue_constant(lambda)? * (1.0 + lambda);
    let s = head_exponent(cf.small_t_index(), lambda, &cf.domain_note())?;
    let cfg = lattice_tail(cfg, cf.period(), -2.0 - lambda).with_singularity(s);
    let q = integrate_semiinf(|u: f64| cf.one_minus_re_phi(u) * u.powf(-2.0 - lambda), &cfg)?;
    let q = require(q, "Kawata integral")?;
    Ok(MomentResult::from_integrals(k, &[q], MomentMethod::Kawata))
}

// ---------------------------------------------------------------------------
// Levy measures

/// Tail exponents `e` of a Levy density, `nu(x) ~ |x|^(-1-e)` as `|x| -> inf`.
/// `f64::INFINITY` marks a tail lighter than every power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailExponents {
    pub left: f64,
    pub right: f64,
}

impl TailExponents {
    pub fn symmetric(e: f64) -> Self {
        Self { left: e, right: e }
    }

    pub fn light() -> Self {
        Self::symmetric(f64::INFINITY)
    }
}

pub type LevyDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Levy measure given by a density on `R \ {0}` or by finitely many atoms.
#[derive(Clone)]
pub enum LevyMeasureSpec {
    Density {
        density: LevyDensity,
        /// Density vanishes on `(-inf, 0)`.
        positive_only: bool,
        tails: Option<TailExponents>,
    },
    /// `(location, mass)` pairs, locations nonzero.
    Atoms(Vec<(f64, f64)>),
}

impl fmt::Debug for LevyMeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevyMeasureSpec::Density { positive_only, tails, .. } => f
                .debug_struct("Density")
                .field("positive_only", positive_only)
                .field("tails", tails)
                .finish_non_exhaustive(),
            LevyMeasureSpec::Atoms(a) => f.debug_tuple("Atoms").field(a).finish(),
        }
    }
}

/// `int` of `g` over `(0, 1]` (`toward_zero`) or `[1, inf)` by dyadic panels,
/// failing when the panel sums stop shrinking geometrically.
pub(crate) fn dyadic_integral(g: &dyn Fn(f64) -> f64, toward_zero: bool) -> Result<f64> {
    let cfg = QuadratureConfig { rel_tol: 1e-9, abs_tol: 1e-300, ..QuadratureConfig::default() };
    let mut total = 0.0;
    let mut shrinking = 0;
    let mut prev = f64::NAN;
    for k in 0..1100 {
        let (a, b) = if toward_zero {
            (0.5f64.powi(k + 1), 0.5f64.powi(k))
        } else {
            (2f64.powi(k), 2f64.powi(k + 1))
        };
        if a == 0.0 || !b.is_finite() {
            break;
        }
        let panel = integrate_smooth(g, a, b, &cfg)?.value;
        if !panel.is_finite() {
            return Err(Error::domain("Levy density is not integrable"));
        }
        total += panel;
        if panel.abs() <= 1e-17 * total.abs() || (panel == 0.0 && k > 4) {
            return Ok(total);
        }
        let r = panel.abs() / prev.abs();
        if r < 0.98 {
            shrinking += 1;
            if shrinking >= 6 && panel.abs() * r / (1.0 - r) <= 1e-12 * total.abs() {
                return Ok(total + panel * r / (1.0 - r));
            }
        } else if k > 30 {
            shrinking = 0;
        }
        prev = panel;
        if k > 200 && shrinking == 0 {
            break;
        }
    }
    Err(Error::domain("Levy measure integral does not converge"))
}

impl LevyMeasureSpec {
    /// Density-based measure. Verifies `int (x^2 ∧ 1) nu(dx) < inf`.
    pub fn density(
        density: LevyDensity,
        positive_only: bool,
        tails: Option<TailExponents>,
    ) -> Result<Self> {
        let spec = LevyMeasureSpec::Density { density, positive_only, tails };
        spec.check_integrable(2.0)?;
        Ok(spec)
    }

    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, m) in &atoms {
            if !(x.is_finite() && x != 0.0 && m.is_finite() && m >= 0.0) {
                return Err(Error::domain(format!("invalid Levy atom ({x}, {m})")));
            }
        }
        Ok(LevyMeasureSpec::Atoms(atoms))
    }

    /// Checks `int (|x|^p ∧ 1) nu(dx) < inf`; `p = 2` in general, `p = 1` for
    /// subordinators.
    pub fn check_integrable(&self, p: f64) -> Result<()> {
        if let LevyMeasureSpec::Density { density, positive_only, .. } = self {
            let sides: &[f64] = if *positive_only { &[1.0] } else { &[1.0, -1.0] };
            for &sign in sides {
                let near = |x: f64| x.powf(p) * density(sign * x);
                let far = |x: f64| density(sign * x);
                dyadic_integral(&near, true)?;
                dyadic_integral(&far, false)?;
            }
        }
        Ok(())
    }

    pub fn small_jump_integrable(&self) -> bool {
        self.check_integrable(2.0).is_ok()
    }

    pub fn positive_only(&self) -> bool {
        match self {
            LevyMeasureSpec::Density { positive_only, .. } => *positive_only,
            LevyMeasureSpec::Atoms(a) => a.iter().all(|&(x, _)| x > 0.0),
        }
    }
}

/// Local tail exponent `e` of `nu(x) ~ x^(-1-e)`, read off `nu` at `x` and `2x`.
fn local_exponent(nu: &dyn Fn(f64) -> f64, x: f64) -> Option<f64> {
    let (a, b) = (nu(x), nu(2.0 * x));
    (a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite())
        .then(|| -(b / a).ln() / std::f64::consts::LN_2 - 1.0)
}

/// Probes one side of a density with no declared exponent. `Some(INFINITY)`
/// means the density dies out faster than any power.
fn probe_tail(nu: &dyn Fn(f64) -> f64) -> Option<f64> {
    let mut history = Vec::new();
    for k in (4..=60).step_by(4) {
        let x = 2f64.powi(k);
        match local_exponent(nu, x) {
            None => {
                if nu(x) == 0.0 {
                    return Some(f64::INFINITY);
                }
                return None;
            }
            Some(e) => history.push(e),
        }
        let n = history.len();
        if n >= 3 {
            let (e0, e1, e2) = (history[n - 3], history[n - 2], history[n - 1]);
            if e2 > 50.0 && e2 > e1 && e1 > e0 {
                return Some(f64::INFINITY);
            }
            if (e2 - e1).abs() < 1e-4 && (e1 - e0).abs() < 1e-4 {
                return Some(e2);
            }
        }
    }
    None
}

/// Whether `E|X|^gamma < inf` for the infinitely divisible law with Levy
/// measure `nu`, through `int_{|x|>1} |x|^gamma nu(dx) < inf`.
pub fn id_moment_exists(nu: &LevyMeasureSpec, gamma: f64) -> Result<bool> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(Error::domain(format!("gamma = {gamma} outside (0, 2)")));
    }
    match nu {
        LevyMeasureSpec::Atoms(_) => Ok(true),
        LevyMeasureSpec::Density { density, positive_only, tails } => {
            let (right, left) = match tails {
                Some(t) => (t.right, t.left),
                None => {
                    let right = probe_tail(&|x| density(x)).ok_or(Error::UnknownTail)?;
                    let left = if *positive_only {
                        f64::INFINITY
                    } else {
                        probe_tail(&|x| density(-x)).ok_or(Error::UnknownTail)?
                    };
                    for e in [right, left] {
                        if e.is_finite() && (e - gamma).abs() < 1e-3 {
                            return Err(Error::UnknownTail);
                        }
                    }
                    (right, left)
                }
            };
            let left = if *positive_only { f64::INFINITY } else { left };
            Ok(gamma < right && gamma < left)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// N(0, 2): `phi(t) = exp(-t^2)`.
    struct Gauss;

    impl CharFn for Gauss {
        fn phi(&self, t: f64) -> Complex64 {
            Complex64::new((-t * t).exp(), 0.0)
        }
        fn dphi(&self, t: f64) -> Complex64 {
            Complex64::new(-2.0 * t * (-t * t).exp(), 0.0)
        }
        fn one_minus_re_phi(&self, t: f64) -> f64 {
            -(-t * t).exp_m1()
        }
        fn small_t_index(&self) -> f64 {
            2.0
        }
        fn domain_note(&self) -> String {
            "gaussian".into()
        }
    }

    /// Point mass at `a`.
    struct Atom(f64);

    impl CharFn for Atom {
        fn phi(&self, t: f64) -> Complex64 {
            Complex64::from_polar(1.0, self.0 * t)
        }
        fn dphi(&self, t: f64) -> Complex64 {
            Complex64::i() * self.0 * Complex64::from_polar(1.0, self.0 * t)
        }
        fn one_minus_re_phi(&self, t: f64) -> f64 {
            2.0 * (0.5 * self.0 * t).sin().powi(2)
        }
        fn small_t_index(&self) -> f64 {
            2.0
        }
        fn period(&self) -> Option<f64> {
            Some(2.0 * PI / self.0.abs())
        }
        fn domain_note(&self) -> String {
            "point mass".into()
        }
    }

    impl LaplaceFn for Atom {
        fn lp(&self, t: f64) -> f64 {
            (-self.0 * t).exp()
        }
        fn dlp(&self, t: f64) -> f64 {
            -self.0 * (-self.0 * t).exp()
        }
        fn dlp_at_zero(&self) -> f64 {
            -self.0
        }
        fn dlp_excess(&self, t: f64) -> f64 {
            -self.0 * (-self.0 * t).exp_m1()
        }
        fn small_t_index(&self) -> f64 {
            2.0
        }
        fn domain_note(&self) -> String {
            "point mass".into()
        }
    }

    struct ExpLaplace;

    impl LaplaceFn for ExpLaplace {
        fn lp(&self, t: f64) -> f64 {
            1.0 / (1.0 + t)
        }
        fn dlp(&self, t: f64) -> f64 {
            -1.0 / ((1.0 + t) * (1.0 + t))
        }
        fn dlp_at_zero(&self) -> f64 {
            -1.0
        }
        fn dlp_excess(&self, t: f64) -> f64 {
            t * (2.0 + t) / ((1.0 + t) * (1.0 + t))
        }
        fn small_t_index(&self) -> f64 {
            2.0
        }
        fn domain_note(&self) -> String {
            "exponential".into()
        }
    }

    struct HalfStableSubordinator;

    impl LaplaceFn for HalfStableSubordinator {
        fn lp(&self, t: f64) -> f64 {
            (-t.sqrt()).exp()
        }
        fn dlp(&self, t: f64) -> f64 {
            -0.5 / t.sqrt() * (-t.sqrt()).exp()
        }
        fn dlp_at_zero(&self) -> f64 {
            f64::NEG_INFINITY
        }
        fn small_t_index(&self) -> f64 {
            0.5
        }
        fn domain_note(&self) -> String {
            "stable subordinator".into()
        }
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    const GAUSS_15: f64 = 1.446_409_084_632_077_142_5;

    #[test]
    fn gaussian_reference_value() {
        let v = 2f64.powf(1.5) * gamma_fn(1.25).unwrap() / PI.sqrt();
        assert!(rel(v, GAUSS_15) < 1e-15);
    }

    #[test]
    fn laplace_examples() {
        let r = moment_from_laplace(&Atom(1.0), 0.5, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
        assert_eq!(r.method_used, MomentMethod::Laplace);
        let r = moment_from_laplace(&ExpLaplace, 0.5, &cfg()).unwrap();
        assert!(rel(r.value, gamma_fn(2.5).unwrap()) < 1e-9);
        assert!(matches!(
            moment_from_laplace(&HalfStableSubordinator, 0.5, &cfg()),
            Err(Error::Existence(_))
        ));
    }

    #[test]
    fn gaussian_all_chf_routes() {
        for f in [moment_centered_from_chf, moment_from_chf_kawata] {
            let r = f(&Gauss, 0.5, &cfg()).unwrap();
            assert!(rel(r.value, GAUSS_15) < 1e-9, "{}", r.value);
            assert!(r.abs_err_est < 1e-8);
        }
        let r = moment_shifted_from_chf(&Gauss, 0.5, 0.0, &cfg()).unwrap();
        assert!(rel(r.value, GAUSS_15) < 1e-9);
    }

    #[test]
    fn lattice_point_mass() {
        // |a|^(1+lambda) for every route, and |a - mu|^(1+lambda) when shifted
        for &a in &[1.0, 2.5] {
            for &lambda in &[0.25, 0.5, 0.75] {
                let exact = f64::powf(a, 1.0 + lambda);
                let c = moment_centered_from_chf(&Atom(a), lambda, &cfg()).unwrap();
                let k = moment_from_chf_kawata(&Atom(a), lambda, &cfg()).unwrap();
                assert!(rel(c.value, exact) < 1e-8, "laue a={a} l={lambda}: {}", c.value);
                assert!(rel(k.value, exact) < 1e-8, "kawata a={a} l={lambda}: {}", k.value);
            }
        }
        for &mu in &[0.5, 2.0, -1.0] {
            let r = moment_shifted_from_chf(&Atom(1.0), 0.5, mu, &cfg()).unwrap();
            let exact = f64::powf((1.0 - mu).abs(), 1.5);
            assert!((r.value - exact).abs() < 1e-8, "mu={mu}: {} vs {exact}", r.value);
        }
    }

    #[test]
    fn shifted_gaussian_symmetry_and_optimality() {
        let m0 = moment_centered_from_chf(&Gauss, 0.5, &cfg()).unwrap().value;
        for &mu in &[0.5, 1.0, 2.0, 5.0] {
            let p = moment_shifted_from_chf(&Gauss, 0.5, mu, &cfg()).unwrap();
            let n = moment_shifted_from_chf(&Gauss, 0.5, -mu, &cfg()).unwrap();
            assert!((p.value - n.value).abs() <= 1e-8 * p.value);
            assert!(p.value > m0);
        }
    }

    #[test]
    fn shifted_gaussian_matches_direct_density() {
        // E|X - 1|^1.5 for X ~ N(0, 2) by plain quadrature of the density
        let pdf = |x: f64| (-x * x / 4.0).exp() / (4.0 * PI).sqrt();
        let direct = integrate_smooth(|x| (x - 1.0).abs().powf(1.5) * pdf(x), -40.0, 1.0, &cfg())
            .unwrap()
            .value
            + integrate_smooth(|x| (x - 1.0).abs().powf(1.5) * pdf(x), 1.0, 42.0, &cfg())
                .unwrap()
                .value;
        let r = moment_shifted_from_chf(&Gauss, 0.5, 1.0, &cfg()).unwrap();
        assert!(rel(r.value, direct) < 1e-9, "{} vs {direct}", r.value);
    }

    #[test]
    fn existence_rejected_at_index() {
        struct Heavy;
        impl CharFn for Heavy {
            fn phi(&self, t: f64) -> Complex64 {
                Complex64::new((-t.abs().powf(1.5)).exp(), 0.0)
            }
            fn dphi(&self, t: f64) -> Complex64 {
                Complex64::new(-1.5 * t.signum() * t.abs().sqrt() * (-t.abs().powf(1.5)).exp(), 0.0)
            }
            fn small_t_index(&self) -> f64 {
                1.5
            }
            fn domain_note(&self) -> String {
                "alpha = 1.5".into()
            }
        }
        assert!(matches!(moment_centered_from_chf(&Heavy, 0.5, &cfg()), Err(Error::Existence(_))));
        assert!(matches!(moment_from_chf_kawata(&Heavy, 0.7, &cfg()), Err(Error::Existence(_))));
        assert!(moment_centered_from_chf(&Heavy, 0.3, &cfg()).is_ok());
    }

    #[test]
    fn query_validation() {
        assert!(MomentQuery::new(0.0, 0.0, MomentMethod::Auto).is_err());
        assert!(MomentQuery::new(1.0, 0.0, MomentMethod::Auto).is_err());
        assert!(MomentQuery::new(0.5, f64::NAN, MomentMethod::Auto).is_err());
        assert_eq!(MomentQuery::new(0.5, 1.0, MomentMethod::Kawata).unwrap().gamma(), 1.5);
        assert_eq!("laue-shifted".parse::<MomentMethod>().unwrap(), MomentMethod::LaueShifted);
        assert!("bogus".parse::<MomentMethod>().is_err());
    }

    fn stable_density(alpha: f64) -> LevyDensity {
        Arc::new(move |x: f64| x.abs().powf(-1.0 - alpha))
    }

    #[test]
    fn levy_moment_existence() {
        let nu = LevyMeasureSpec::density(stable_density(1.8), false, Some(TailExponents::symmetric(1.8)))
            .unwrap();
        assert!(id_moment_exists(&nu, 1.5).unwrap());
        assert!(!id_moment_exists(&nu, 1.9).unwrap());
        let exp_jumps = LevyMeasureSpec::density(
            Arc::new(|x: f64| if x > 0.0 { 2.0 * (-x).exp() } else { 0.0 }),
            true,
            None,
        )
        .unwrap();
        for g in [0.1, 1.0, 1.99] {
            assert!(id_moment_exists(&exp_jumps, g).unwrap());
        }
    }

    #[test]
    fn levy_tail_probing() {
        let nu = LevyMeasureSpec::density(stable_density(1.8), false, None).unwrap();
        assert!(id_moment_exists(&nu, 1.5).unwrap());
        assert!(!id_moment_exists(&nu, 1.9).unwrap());
        assert_eq!(id_moment_exists(&nu, 1.8), Err(Error::UnknownTail));
        // slowly varying correction keeps the local exponent drifting
        let drifting = LevyMeasureSpec::density(
            Arc::new(|x: f64| x.abs().powf(-2.5) / (2.0 + x.abs().ln()).ln().max(0.1)),
            false,
            None,
        )
        .unwrap();
        assert_eq!(id_moment_exists(&drifting, 1.0), Err(Error::UnknownTail));
    }

    #[test]
    fn levy_integrability_check() {
        // alpha = 2.2 is not a Levy density: x^2 nu(x) ~ x^-1.2 near 0
        assert!(LevyMeasureSpec::density(stable_density(2.2), false, None).is_err());
        // alpha = -0.1: too heavy at infinity
        assert!(LevyMeasureSpec::density(stable_density(-0.1), false, None).is_err());
        assert!(LevyMeasureSpec::atoms(vec![(1.0, 2.0), (-0.5, 1.0)]).is_ok());
        assert!(LevyMeasureSpec::atoms(vec![(0.0, 1.0)]).is_err());
    }
}
