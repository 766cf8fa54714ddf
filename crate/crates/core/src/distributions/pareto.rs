//! Pareto law on `(0, inf)` with density `alpha (1+x)^(-alpha-1)`.
//!
//! The characteristic function and Laplace transform have no elementary form.
//! They are evaluated as `t^(q-p-1) int_0^inf w^p K(w) (t+w)^(-q) dw` after the
//! substitution `w = t x`, which keeps the oscillation frequency at one for
//! every `t`. The integral is cut at `min(t, 1)` and `1`, with the middle piece
//! in `ln w` so that the `w ~ t` feature of `(t+w)^(-q)` is resolved for tiny `t`.
//!
//! For `|t| >= 1`, `phi` and `phi'` use the contour `x = i w` instead, where
//! the integrand `e^(-t w) (1 + i w)^(-q)` no longer oscillates.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{
    integrate_finite, integrate_semiinf, integrate_smooth, zero_result, QuadResult, QuadratureConfig,
};
use crate::specfun::{beta_fn, hyp2f1};
use crate::transforms::{CharFn, LaplaceFn};

use super::require_order_below;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoParams {
    pub alpha: f64,
}

impl ParetoParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain(format!("Pareto alpha = {alpha} must be positive")));
        }
        Ok(Self { alpha })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.alpha * (1.0 + x).powf(-self.alpha - 1.0)
        }
    }

    pub fn mean(&self) -> f64 {
        if self.alpha > 1.0 {
            1.0 / (self.alpha - 1.0)
        } else {
            f64::INFINITY
        }
    }

    pub fn chf(&self) -> ParetoChf {
        ParetoChf { alpha: self.alpha }
    }

    pub fn laplace(&self) -> ParetoLaplace {
        ParetoLaplace { alpha: self.alpha }
    }
}

/// `E|X - mu|^(1+lambda)` for `mu >= 0`:
/// `alpha {(mu+1)^(1+lambda-alpha) B(alpha-1-lambda, 2+lambda) + mu^(2+lambda)/(2+lambda) 2F1(1, alpha+1; 3+lambda; -mu)}`.
pub fn pareto_shifted_moment(p: &ParetoParams, mu: f64, lambda: f64) -> Result<f64> {
    require_order_below(p.alpha, lambda, "Pareto")?;
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("Pareto formula needs a finite mu >= 0, got {mu}")));
    }
    let a = p.alpha;
    let first = (mu + 1.0).powf(1.0 + lambda - a) * beta_fn(a - 1.0 - lambda, 2.0 + lambda)?;
    let second = if mu == 0.0 {
        0.0
    } else {
        mu.powf(2.0 + lambda) / (2.0 + lambda) * hyp2f1(1.0, a + 1.0, 3.0 + lambda, -mu)?.value
    };
    Ok(a * (first + second))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kernel {
    Cos,
    Sin,
    OneMinusCos,
    Exp,
    OneMinusExp,
}

impl Kernel {
    fn eval(self, w: f64) -> f64 {
        match self {
            Kernel::Cos => w.cos(),
            Kernel::Sin => w.sin(),
            Kernel::OneMinusCos => 2.0 * (0.5 * w).sin().powi(2),
            Kernel::Exp => (-w).exp(),
            Kernel::OneMinusExp => -(-w).exp_m1(),
        }
    }
}

fn inner_cfg() -> QuadratureConfig {
    QuadratureConfig { rel_tol: 1e-11, abs_tol: 1e-15, ..QuadratureConfig::default() }
}

/// `int_0^inf w^k e^(-t w) (1 + i w)^(-q) dw` for `t >= 1`, via `v = t w`;
/// NaN if a part fails.
fn contour_integral(t: f64, k: i32, q: f64) -> Complex64 {
    let cfg = QuadratureConfig { rel_tol: 1e-12, abs_tol: 1e-14, ..QuadratureConfig::default() };
    let h = |v: f64| v.powi(k) * (-v).exp() * Complex64::new(1.0, v / t).powf(-q);
    let (Ok(re), Ok(im)) = (
        integrate_semiinf(|v| h(v).re, &cfg),
        integrate_semiinf(|v| h(v).im, &cfg),
    ) else {
        return Complex64::new(f64::NAN, f64::NAN);
    };
    let z = Complex64::new(re.value, im.value);
    if re.abs_err_est + im.abs_err_est > 1e-11 * z.norm() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    z * t.powi(-k - 1)
}

/// `int_0^inf x^p K(t x) (1+x)^(-q) dx` for `t > 0`; NaN if a piece fails.
fn scaled_integral(t: f64, p: i32, q: f64, kernel: Kernel) -> f64 {
    scaled_integral_checked(t, p, q, kernel).unwrap_or(f64::NAN)
}

fn scaled_integral_checked(t: f64, p: i32, q: f64, kernel: Kernel) -> Result<f64> {
    let cfg = inner_cfg();
    let g = |w: f64| w.powi(p) * (t + w).powf(-q);
    let f = |w: f64| kernel.eval(w) * g(w);
    let a = t.min(1.0);
    let mut total = integrate_finite(f, 0.0, a, &cfg)?.require_converged("Pareto transform head")?.value;
    if t < 1.0 {
        let ln_span = -t.ln();
        total += integrate_smooth(
            |y: f64| {
                let w = t * y.exp();
                f(w) * w
            },
            0.0,
            ln_span,
            &cfg,
        )?
        .require_converged("Pareto transform middle")?
        .value;
    }
    let shifted = |y: f64| g(1.0 + y);
    let scale = total.abs().max((1.0 + t).powf(-q));
    let cfg = QuadratureConfig { abs_tol: 1e-12 * scale, ..cfg };
    let tail = match kernel {
        Kernel::Cos | Kernel::Sin => {
            // zeros of sin(1 + y) sit at k pi - 1, of cos(1 + y) at k pi + pi/2 - 1
            let phase = if kernel == Kernel::Sin { -1.0 } else { FRAC_PI_2 - 1.0 };
            let c = cfg.with_oscillation(1.0, phase);
            integrate_semiinf(|y: f64| kernel.eval(1.0 + y) * shifted(y), &c)?
        }
        Kernel::OneMinusCos => {
            // int_1^inf g minus the oscillating cos part; only used with p = 0
            let c = cfg.with_oscillation(1.0, FRAC_PI_2 - 1.0);
            let osc = integrate_semiinf(|y: f64| (1.0 + y).cos() * shifted(y), &c)?;
            let plain = (t + 1.0).powf(1.0 - q) / (q - 1.0);
            QuadResult { value: plain, ..zero_result() }.combine(osc.scaled(-1.0))
        }
        Kernel::Exp | Kernel::OneMinusExp => {
            integrate_semiinf(|y: f64| kernel.eval(1.0 + y) * shifted(y), &cfg)?
        }
    };
    if !(tail.converged || tail.abs_err_est <= 1e-10 * scale) {
        return Err(Error::NonConvergence {
            what: "Pareto transform tail".into(),
            value: tail.value,
            abs_err: tail.abs_err_est,
        });
    }
    total += tail.value;
    Ok(t.powf(q - p as f64 - 1.0) * total)
}

/// Characteristic function `alpha int e^(itx) (1+x)^(-alpha-1) dx`.
#[derive(Debug, Clone, Copy)]
pub struct ParetoChf {
    alpha: f64,
}

impl CharFn for ParetoChf {
    fn phi(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let u = t.abs();
        let q = self.alpha + 1.0;
        if u < 1.0 {
            let re = self.alpha * scaled_integral(u, 0, q, Kernel::Cos);
            let im = self.alpha * scaled_integral(u, 0, q, Kernel::Sin);
            return Complex64::new(re, im * t.signum());
        }
        let v = Complex64::i() * self.alpha * contour_integral(u, 0, q);
        if t > 0.0 {
            v
        } else {
            v.conj()
        }
    }

    fn dphi(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            let m = if self.alpha > 1.0 { 1.0 / (self.alpha - 1.0) } else { f64::NAN };
            return Complex64::new(0.0, m);
        }
        // phi'(t) = i alpha int x e^(itx) (1+x)^(-alpha-1) dx
        let u = t.abs();
        let q = self.alpha + 1.0;
        if u < 1.0 {
            let c = self.alpha * scaled_integral(u, 1, q, Kernel::Cos);
            let s = self.alpha * scaled_integral(u, 1, q, Kernel::Sin);
            return Complex64::new(-s * t.signum(), c);
        }
        let d = -Complex64::i() * self.alpha * contour_integral(u, 1, q);
        if t > 0.0 {
            d
        } else {
            -d.conj()
        }
    }

    fn one_minus_re_phi(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        self.alpha * scaled_integral(t.abs(), 0, self.alpha + 1.0, Kernel::OneMinusCos)
    }

    fn small_t_index(&self) -> f64 {
        self.alpha.min(2.0)
    }

    fn domain_note(&self) -> String {
        format!("Pareto alpha = {}: order must stay below alpha", self.alpha)
    }
}

/// Laplace transform `alpha int e^(-tx) (1+x)^(-alpha-1) dx`.
#[derive(Debug, Clone, Copy)]
pub struct ParetoLaplace {
    alpha: f64,
}

impl LaplaceFn for ParetoLaplace {
    fn lp(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 1.0;
        }
        self.alpha * scaled_integral(t, 0, self.alpha + 1.0, Kernel::Exp)
    }

    fn dlp(&self, t: f64) -> f64 {
        if t == 0.0 {
            return self.dlp_at_zero();
        }
        -self.alpha * scaled_integral(t, 1, self.alpha + 1.0, Kernel::Exp)
    }

    fn dlp_at_zero(&self) -> f64 {
        if self.alpha > 1.0 {
            -1.0 / (self.alpha - 1.0)
        } else {
            f64::NEG_INFINITY
        }
    }

    fn dlp_excess(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        self.alpha * scaled_integral(t, 1, self.alpha + 1.0, Kernel::OneMinusExp)
    }

    fn one_minus_lp(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        self.alpha * scaled_integral(t, 0, self.alpha + 1.0, Kernel::OneMinusExp)
    }

    fn small_t_index(&self) -> f64 {
        self.alpha.min(2.0)
    }

    fn domain_note(&self) -> String {
        format!("Pareto alpha = {}: order must stay below alpha", self.alpha)
    }
}
