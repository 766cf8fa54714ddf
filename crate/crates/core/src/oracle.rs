//! Reference values computed without fractional derivatives: Fourier
//! inversion of a ch.f., quadrature of an explicit density, lattice series and
//! Monte Carlo.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Gamma, Open01, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::distributions::{Distribution, JumpSpec, StableParams};
use crate::error::{Error, Result};
use crate::quad::{integrate_semiinf, integrate_smooth, QuadResult, QuadratureConfig};
use crate::specfun::ln_gamma;
use crate::transforms::{check_lambda, CharFn, LevyMeasureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    DensityInversion,
    DirectDensity,
    Series,
    MonteCarlo,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::DensityInversion => "DensityInversion",
            OracleKind::DirectDensity => "DirectDensity",
            OracleKind::Series => "Series",
            OracleKind::MonteCarlo => "MonteCarlo",
        }
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One analytic value checked against one oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub target: String,
    pub analytic: f64,
    pub oracle: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub oracle_kind: OracleKind,
    pub seed: Option<u64>,
}

impl OracleReport {
    pub fn new(
        target: impl Into<String>,
        analytic: f64,
        oracle: f64,
        tolerance: f64,
        oracle_kind: OracleKind,
        seed: Option<u64>,
    ) -> Self {
        let abs_diff = (analytic - oracle).abs();
        Self {
            target: target.into(),
            analytic,
            oracle,
            abs_diff,
            tolerance,
            passed: abs_diff <= tolerance,
            oracle_kind,
            seed,
        }
    }
}

/// Algebraic tail `f(x) ~ sum_j c_j |x|^(-1-index-j*step)`, fitted separately
/// on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    pub index: f64,
    pub step: f64,
}

impl TailModel {
    /// Stable, Linnik and geometric stable densities: corrections in powers of `|x|^-index`.
    pub fn stable_like(index: f64) -> Self {
        Self { index, step: index }
    }

    /// Densities such as `(1 + x)^(-1-index)`: corrections in integer powers.
    pub fn integer_steps(index: f64) -> Self {
        Self { index, step: 1.0 }
    }

    fn exponents(&self) -> [f64; 3] {
        let e0 = -1.0 - self.index;
        [e0, e0 - self.step, e0 - 2.0 * self.step]
    }
}

/// Density `f(x) = (1/pi) int_0^inf Re[e^(-itx) phi(t)] dt`.
pub fn invert_density(cf: &dyn CharFn, x: f64) -> Result<f64> {
    let g = |t: f64| {
        let p = cf.phi(t);
        let (s, c) = (t * x).sin_cos();
        c * p.re + s * p.im
    };
    Ok(fourier_integral(&g, x, "density inversion", 1e-11)? / PI)
}

/// `P(X <= x) = 1/2 - (1/pi) int_0^inf Im[e^(-itx) phi(t)] / t dt`, for laws with a finite mean.
pub fn invert_cdf(cf: &dyn CharFn, x: f64) -> Result<f64> {
    let g = |t: f64| {
        let p = cf.phi(t);
        let (s, c) = (t * x).sin_cos();
        (c * p.im - s * p.re) / t
    };
    Ok(0.5 - fourier_integral(&g, x, "distribution inversion", 1e-11)? / PI)
}

/// `int_0^inf g(t) dt` for `g` oscillating with angular frequency `|x|`. Below
/// the first zero `pi/|x|` the range is covered by dyadic panels.
fn fourier_integral(g: &dyn Fn(f64) -> f64, x: f64, what: &str, abs: f64) -> Result<f64> {
    let cfg = inversion_cfg();
    let w = x.abs();
    if w == 0.0 {
        return accept(integrate_semiinf(g, &cfg)?, what, 1e-6, abs);
    }
    let t0 = if w < 1.0 { PI / w } else { 0.0 };
    let mut head = 0.0;
    let (mut a, mut b) = (0.0, t0.min(1.0));
    while a < t0 {
        head += accept(integrate_smooth(g, a, b, &cfg)?, what, 1e-6, abs)?;
        a = b;
        b = (2.0 * b).min(t0);
    }
    let tail_cfg = QuadratureConfig {
        split_point: (t0 > 0.0).then_some(PI / w),
        ..cfg.with_oscillation(w, 0.0)
    };
    let tail = integrate_semiinf(|u| g(t0 + u), &tail_cfg)?;
    Ok(head + accept(tail, what, 1e-6, abs)?)
}

fn inversion_cfg() -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: 1e-11,
        abs_tol: 1e-16,
        max_segments: 400,
        ..QuadratureConfig::default()
    }
}

fn accept(q: QuadResult, what: &str, rel: f64, abs: f64) -> Result<f64> {
    if q.converged || q.abs_err_est <= abs.max(rel * q.value.abs()) {
        Ok(q.value)
    } else {
        Err(Error::NonConvergence {
            what: what.into(),
            value: q.value,
            abs_err: q.abs_err_est,
        })
    }
}

/// `E|X - mu|^(1+lambda)` by integrating the inverted density, with fitted
/// tails beyond the window. Corrections to the leading tail power are taken
/// in steps of `tail_index`.
pub fn density_inversion_moment(
    cf: &dyn CharFn,
    tail_index: f64,
    mu: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let support = (f64::NEG_INFINITY, f64::INFINITY);
    density_inversion_moment_with(cf, TailModel::stable_like(tail_index), support, mu, lambda, cfg)
}

/// As [`density_inversion_moment`], for a law known to live on `support`.
pub fn density_inversion_moment_with(
    cf: &dyn CharFn,
    tail: TailModel,
    support: (f64, f64),
    mu: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_moment_order(tail.index, lambda)?;
    let pdf = |x: f64| invert_density(cf, x);
    let window = Window {
        lo: support.0,
        hi: support.1,
        tail: Some(tail),
        floor: 1e-9,
        negligible: 1e-11,
    };
    Ok(window.moment(&pdf, mu, 1.0 + lambda, cfg)?.0)
}

/// `int |x - mu|^(1+lambda) pdf(x) dx` over `support`. Infinite ends need a
/// tail model unless the density is negligible there.
pub fn direct_density_moment(
    pdf: &dyn Fn(f64) -> f64,
    support: (f64, f64),
    tail: Option<TailModel>,
    mu: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_lambda(lambda)?;
    if let Some(t) = tail {
        check_moment_order(t.index, lambda)?;
    }
    let (lo, hi) = support;
    if !(lo < hi) || lo.is_nan() || hi.is_nan() {
        return Err(Error::domain(format!("empty support [{lo}, {hi}]")));
    }
    let f = |x: f64| Ok(pdf(x));
    let window = Window { lo, hi, tail, floor: 1e-13, negligible: 1e-15 };
    let (m, mass) = window.moment(&f, mu, 1.0 + lambda, cfg)?;
    if (mass - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(mass));
    }
    Ok(m)
}

fn check_moment_order(index: f64, lambda: f64) -> Result<()> {
    check_lambda(lambda)?;
    if !(index > 1.0 + lambda) {
        return Err(Error::existence(format!(
            "order {} is not below the tail index {index}",
            1.0 + lambda
        )));
    }
    Ok(())
}

struct Window {
    lo: f64,
    hi: f64,
    tail: Option<TailModel>,
    /// Smallest density value trusted for the tail fit.
    floor: f64,
    /// Bound on `|f(x)| x^(g+1)` below which a side counts as exhausted.
    negligible: f64,
}

/// Contribution beyond the window on one side.
struct Side {
    edge: f64,
    moment: f64,
    mass: f64,
}

impl Window {
    /// Returns the moment and the total mass.
    fn moment(
        &self,
        pdf: &dyn Fn(f64) -> Result<f64>,
        mu: f64,
        g: f64,
        cfg: &QuadratureConfig,
    ) -> Result<(f64, f64)> {
        let right = self.side(pdf, 1.0, mu, g)?;
        let left = self.side(pdf, -1.0, mu, g)?;
        let (a, b) = (-left.edge, right.edge);

        let mut pts = vec![a, b];
        for p in [0.0, mu] {
            if p > a && p < b {
                pts.push(p);
            }
        }
        let mut k = 0.125;
        while k < b.abs().max(a.abs()) {
            for p in [k, -k, mu + k, mu - k] {
                if p > a && p < b {
                    pts.push(p);
                }
            }
            k *= 2.0;
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();

        let qcfg = QuadratureConfig {
            rel_tol: cfg.rel_tol.min(1e-10),
            abs_tol: 1e-16,
            max_segments: cfg.max_segments.max(1024),
            ..QuadratureConfig::default()
        };
        let failure = Cell::new(None);
        let cache = RefCell::new(HashMap::new());
        let eval = |x: f64| {
            if let Some(&v) = cache.borrow().get(&x.to_bits()) {
                return v;
            }
            let v = match pdf(x) {
                Ok(v) => v,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            };
            cache.borrow_mut().insert(x.to_bits(), v);
            v
        };
        let (mut moment, mut mass) = (left.moment + right.moment, left.mass + right.mass);
        let (mut moment_err, mut mass_err) = (0.0, 0.0);
        for w in pts.windows(2) {
            let q = integrate_smooth(|x| (x - mu).abs().powf(g) * eval(x), w[0], w[1], &qcfg);
            let r = integrate_smooth(&eval, w[0], w[1], &qcfg);
            if let Some(e) = failure.take() {
                return Err(e);
            }
            let (q, r) = (q?, r?);
            moment += q.value;
            moment_err += q.abs_err_est;
            mass += r.value;
            mass_err += r.abs_err_est;
        }
        for (what, v, e) in [("window moment", moment, moment_err), ("window mass", mass, mass_err)] {
            if !(e <= 1e-9 * v.abs() + 1e-14) {
                return Err(Error::NonConvergence { what: what.into(), value: v, abs_err: e });
            }
        }
        Ok((moment, mass))
    }

    fn side(&self, pdf: &dyn Fn(f64) -> Result<f64>, s: f64, mu: f64, g: f64) -> Result<Side> {
        let bound = if s > 0.0 { self.hi } else { -self.lo };
        if bound.is_finite() {
            return Ok(Side { edge: bound, moment: 0.0, mass: 0.0 });
        }
        let ks: Vec<i32> = (3..=14).collect();
        let xs: Vec<f64> = ks.iter().map(|&k| 2f64.powi(k)).collect();
        let fs = xs.iter().map(|&x| pdf(s * x)).collect::<Result<Vec<f64>>>()?;
        let far = |i: usize| xs[i] >= 4.0 * mu.abs() && xs[i] >= 16.0;

        // light or empty side
        for i in 0..xs.len() - 1 {
            let negligible = |j: usize| fs[j].abs() * xs[j].powf(g + 1.0) < self.negligible;
            if far(i) && negligible(i) && negligible(i + 1) {
                return Ok(Side { edge: xs[i], moment: 0.0, mass: 0.0 });
            }
        }
        let Some(tail) = self.tail else {
            return Err(Error::TailFit { fitted: f64::NAN, declared: f64::INFINITY });
        };
        let Some(i) = (0..xs.len() - 2)
            .rev()
            .find(|&i| far(i) && fs[i + 2].abs() >= self.floor)
        else {
            return Err(Error::TailFit { fitted: f64::NAN, declared: tail.index });
        };
        let x0 = xs[i];
        let (f0, f1, f2) = (fs[i], fs[i + 1], fs[i + 2]);
        let local = (f0 / f1).log2() - 1.0;
        if !(local.is_finite() && (local - tail.index).abs() <= 0.05 * tail.index) {
            return Err(Error::TailFit { fitted: local, declared: tail.index });
        }
        let e = tail.exponents();
        let d = solve3(
            [
                [1.0, 1.0, 1.0],
                [2f64.powf(e[0]), 2f64.powf(e[1]), 2f64.powf(e[2])],
                [4f64.powf(e[0]), 4f64.powf(e[1]), 4f64.powf(e[2])],
            ],
            [f0, f1, f2],
        )
        .ok_or(Error::TailFit { fitted: local, declared: tail.index })?;

        // f(x) = sum_j d_j (x / x0)^e_j beyond x0; |x - mu| = x - s mu there
        let m = s * mu / x0;
        let mut moment = 0.0;
        let mut mass = 0.0;
        for j in 0..3 {
            mass += d[j] / (-e[j] - 1.0);
            let mut binom = 1.0;
            let mut pw = 1.0;
            let mut acc = 0.0;
            for k in 0..200 {
                let kf = k as f64;
                let term = binom * pw / (kf - g - e[j] - 1.0);
                acc += term;
                if k > 2 && term.abs() < 1e-18 * acc.abs() {
                    break;
                }
                binom *= (g - kf) / (kf + 1.0);
                pw *= -m;
            }
            moment += d[j] * acc;
        }
        Ok(Side {
            edge: x0,
            moment: moment * x0.powf(1.0 + g),
            mass: mass * x0,
        })
    }
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (j, o) in out.iter_mut().enumerate() {
        let mut m = a;
        for i in 0..3 {
            m[i][j] = b[i];
        }
        *o = det(m) / d;
    }
    Some(out)
}

/// `sum_k |k - mu|^(1+lambda) p_k` over the lattice `k = 0, 1, ...`.
pub fn lattice_series_moment(pmf: &dyn Fn(u64) -> f64, mu: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let g = 1.0 + lambda;
    let (mut sum, mut mass) = (0.0, 0.0);
    for k in 0..1_000_000u64 {
        let p = pmf(k);
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidIntegrand(k as f64));
        }
        let term = (k as f64 - mu).abs().powf(g) * p;
        sum += term;
        mass += p;
        if k as f64 > mu && mass > 1.0 - 1e-15 && term <= 1e-18 * sum.max(1e-300) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "lattice series".into(),
        value: sum,
        abs_err: (1.0 - mass).abs(),
    })
}

/// `P(N = k)` for `N ~ Poisson(c)`.
pub fn poisson_pmf(c: f64) -> impl Fn(u64) -> f64 {
    move |k| {
        let kf = k as f64;
        (kf * c.ln() - c - ln_gamma(kf + 1.0).unwrap_or(f64::INFINITY)).exp()
    }
}

/// Laws the Monte Carlo oracle can simulate.
#[derive(Debug, Clone)]
pub enum SamplerSpec {
    Family(Distribution),
    /// `X2 - c X1` for a sub-Gaussian vector with correlation `gamma`.
    SubGaussianError { alpha: f64, gamma: f64, c: f64 },
    /// `X2 - c X1` for a bivariate Linnik vector with correlation `gamma`.
    BivariateLinnikError { alpha: f64, beta: f64, gamma: f64, c: f64 },
    /// `X_t - c X_0` for the stationary stable Ornstein-Uhlenbeck process.
    StableOuError { rate: f64, alpha: f64, t: f64, c: f64 },
}

#[derive(Debug, Clone)]
enum Jump {
    Exponential(f64),
    Stable(f64),
    Linnik(f64, Gamma<f64>),
    Unit,
}

#[derive(Debug, Clone)]
enum Sampler {
    Stable { alpha: f64, beta: f64, sigma: f64, delta: f64 },
    GeometricStable { alpha: f64, beta: f64, sigma: f64 },
    Linnik { alpha: f64, sigma: f64, mix: Gamma<f64> },
    Pareto { alpha: f64 },
    CompoundPoisson { count: Poisson<f64>, jump: Jump },
    Atoms { delta: f64, atoms: Vec<(f64, Poisson<f64>)> },
    SubGaussian { alpha: f64, gamma: f64, c: f64, scale: f64, mix: Option<Gamma<f64>> },
    Ou { alpha: f64, a0: f64, s0: f64, s1: f64 },
}

fn gamma_law(shape: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, 1.0).map_err(|e| Error::domain(format!("gamma mixing law: {e}")))
}

fn poisson_law(c: f64) -> Result<Poisson<f64>> {
    Poisson::new(c).map_err(|e| Error::domain(format!("Poisson rate {c}: {e}")))
}

impl SamplerSpec {
    fn name(&self) -> String {
        match self {
            SamplerSpec::Family(d) => d.name().into(),
            SamplerSpec::SubGaussianError { .. } => "sub-Gaussian error".into(),
            SamplerSpec::BivariateLinnikError { .. } => "bivariate Linnik error".into(),
            SamplerSpec::StableOuError { .. } => "stable OU error".into(),
        }
    }

    /// Sampler and the tail index of the sampled law.
    fn build(&self) -> Result<(Sampler, f64)> {
        let unsupported = || Error::UnsupportedSampler(self.name());
        let check_alpha = |alpha: f64| {
            if alpha > 0.0 && alpha <= 2.0 {
                Ok(())
            } else {
                Err(Error::domain(format!("alpha = {alpha} outside (0, 2]")))
            }
        };
        let check_gamma = |gamma: f64| {
            if (-1.0..=1.0).contains(&gamma) {
                Ok(())
            } else {
                Err(Error::domain(format!("correlation {gamma} outside [-1, 1]")))
            }
        };
        let stable_index = |alpha: f64| if alpha == 2.0 { f64::INFINITY } else { alpha };
        Ok(match self {
            SamplerSpec::Family(d) => match d {
                Distribution::Stable(p) => (
                    Sampler::Stable { alpha: p.alpha, beta: p.beta, sigma: p.sigma, delta: p.delta },
                    stable_index(p.alpha),
                ),
                Distribution::GeometricStable(p) => (
                    Sampler::GeometricStable { alpha: p.alpha, beta: p.beta, sigma: p.sigma },
                    p.alpha,
                ),
                Distribution::Linnik(p) => (
                    Sampler::Linnik { alpha: p.alpha, sigma: p.sigma, mix: gamma_law(p.beta)? },
                    stable_index(p.alpha),
                ),
                Distribution::Pareto(p) => (Sampler::Pareto { alpha: p.alpha }, p.alpha),
                Distribution::CompoundPoisson(p) => {
                    let (jump, index) = match &p.jump {
                        JumpSpec::Exponential { beta } => (Jump::Exponential(*beta), f64::INFINITY),
                        JumpSpec::SymmetricStable { alpha } => (Jump::Stable(*alpha), stable_index(*alpha)),
                        JumpSpec::Linnik { alpha, beta } => {
                            (Jump::Linnik(*alpha, gamma_law(*beta)?), stable_index(*alpha))
                        }
                        JumpSpec::Deterministic => (Jump::Unit, f64::INFINITY),
                        JumpSpec::Custom(_) => return Err(unsupported()),
                    };
                    (Sampler::CompoundPoisson { count: poisson_law(p.c)?, jump }, index)
                }
                Distribution::Subordinator(p) => match &p.nu {
                    LevyMeasureSpec::Atoms(atoms) => {
                        let atoms = atoms
                            .iter()
                            .filter(|&&(_, m)| m > 0.0)
                            .map(|&(x, m)| Ok((x, poisson_law(m)?)))
                            .collect::<Result<Vec<_>>>()?;
                        (Sampler::Atoms { delta: p.delta, atoms }, f64::INFINITY)
                    }
                    LevyMeasureSpec::Density { .. } => return Err(unsupported()),
                },
            },
            &SamplerSpec::SubGaussianError { alpha, gamma, c } => {
                check_alpha(alpha)?;
                check_gamma(gamma)?;
                (
                    Sampler::SubGaussian { alpha, gamma, c, scale: 1.0, mix: None },
                    stable_index(alpha),
                )
            }
            &SamplerSpec::BivariateLinnikError { alpha, beta, gamma, c } => {
                check_alpha(alpha)?;
                check_gamma(gamma)?;
                let mix = Some(gamma_law(beta)?);
                (
                    Sampler::SubGaussian { alpha, gamma, c, scale: 2f64.sqrt(), mix },
                    stable_index(alpha),
                )
            }
            &SamplerSpec::StableOuError { rate, alpha, t, c } => {
                check_alpha(alpha)?;
                if !(rate > 0.0 && t >= 0.0) {
                    return Err(Error::domain("OU error needs rate > 0 and t >= 0"));
                }
                let ar = alpha * rate;
                let s0 = ar.powf(-1.0 / alpha);
                let s1 = (-(-ar * t).exp_m1() / ar).powf(1.0 / alpha);
                let a0 = (-rate * t).exp() - c;
                (Sampler::Ou { alpha, a0, s0, s1 }, stable_index(alpha))
            }
        })
    }
}

/// Chambers-Mallows-Stuck draw from the stable law with ch.f.
/// `exp(-|t|^alpha (1 - i beta tan(pi alpha/2) sgn t))`.
fn stable_unit<R: Rng + ?Sized>(alpha: f64, beta: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    let v = PI * (u - 0.5);
    let w: f64 = rng.sample(Exp1);
    if alpha == 1.0 {
        return v.tan();
    }
    let t = if alpha == 2.0 { 0.0 } else { beta * (0.5 * PI * alpha).tan() };
    let b = t.atan() / alpha;
    let s = (1.0 + t * t).powf(0.5 / alpha);
    let a = alpha * (v + b);
    s * a.sin() / v.cos().powf(1.0 / alpha) * ((v - a).cos() / w).powf((1.0 - alpha) / alpha)
}

impl Sampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            &Sampler::Stable { alpha, beta, sigma, delta } => {
                sigma * stable_unit(alpha, beta, rng) + delta
            }
            &Sampler::GeometricStable { alpha, beta, sigma } => {
                let e: f64 = rng.sample(Exp1);
                sigma * e.powf(1.0 / alpha) * stable_unit(alpha, beta, rng)
            }
            Sampler::Linnik { alpha, sigma, mix } => {
                let g: f64 = rng.sample(mix);
                sigma * g.powf(1.0 / alpha) * stable_unit(*alpha, 0.0, rng)
            }
            &Sampler::Pareto { alpha } => {
                let u: f64 = rng.sample(Open01);
                u.powf(-1.0 / alpha) - 1.0
            }
            Sampler::CompoundPoisson { count, jump } => {
                let n = rng.sample(count) as u64;
                (0..n)
                    .map(|_| match jump {
                        Jump::Exponential(b) => b * rng.sample::<f64, _>(Exp1),
                        Jump::Stable(a) => stable_unit(*a, 0.0, rng),
                        Jump::Linnik(a, mix) => {
                            let g: f64 = rng.sample(mix);
                            g.powf(1.0 / a) * stable_unit(*a, 0.0, rng)
                        }
                        Jump::Unit => 1.0,
                    })
                    .sum()
            }
            Sampler::Atoms { delta, atoms } => {
                delta + atoms.iter().map(|(x, n)| x * rng.sample(n)).sum::<f64>()
            }
            Sampler::SubGaussian { alpha, gamma, c, scale, mix } => {
                let half = 0.5 * alpha;
                let a = if *alpha == 2.0 {
                    1.0
                } else {
                    (0.5 * PI * half).cos().powf(1.0 / half) * stable_unit(half, 1.0, rng)
                };
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                let g1 = z1;
                let g2 = gamma * z1 + (1.0 - gamma * gamma).sqrt() * z2;
                let y = scale * a.sqrt() * (g2 - c * g1);
                match mix {
                    Some(m) => rng.sample(m).powf(1.0 / alpha) * y,
                    None => y,
                }
            }
            &Sampler::Ou { alpha, a0, s0, s1 } => {
                a0 * s0 * stable_unit(alpha, 0.0, rng) + s1 * stable_unit(alpha, 0.0, rng)
            }
        }
    }
}

/// Number of independent blocks in [`mc_moment`].
pub const MC_BLOCKS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Location of the block means: their median, shifted by a multiple of
    /// their median absolute deviation when the summand has infinite variance.
    pub estimate: f64,
    /// Asymptotic standard deviation of `estimate`, scaled from the deviation
    /// of the block means.
    pub stderr_proxy: f64,
    pub mean: f64,
    /// Classical standard error; infinite-variance summands make it unreliable.
    pub stderr: f64,
    /// Tail index `alpha / (1 + lambda)` of the summand `|X - mu|^(1+lambda)`.
    pub summand_index: f64,
    pub n: usize,
    pub seed: u64,
}

/// Median `m`, median absolute deviation `d` and asymptotic standard
/// deviation `s` of `m_hat - (m / d) d_hat` for the limit law of a block mean,
/// all for unit scale and zero mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockLimit {
    pub median: f64,
    pub mad: f64,
    pub spread: f64,
}

impl BlockLimit {
    const NORMAL_MAD: f64 = 0.674_489_750_196_081_7;

    /// Normal limit, for summands with finite variance.
    pub fn normal() -> Self {
        Self { median: 0.0, mad: Self::NORMAL_MAD, spread: (0.5 * PI).sqrt() }
    }

    /// Totally skewed `kappa`-stable limit of sums with tail index `kappa < 2`.
    pub fn skewed_stable(kappa: f64) -> Result<Self> {
        if !(kappa > 1.0 && kappa < 2.0) {
            return Err(Error::domain(format!("summand index {kappa} outside (1, 2)")));
        }
        let cf = StableParams::new(kappa, 1.0, 1.0, 0.0)?.chf();
        let cdf = |x: f64| invert_cdf(&cf, x);
        let m = bisect(|x| Ok(cdf(x)? - 0.5), -1.0, 1.0)?;
        let d = bisect(|r| Ok(cdf(m + r)? - cdf(m - r)? - 0.5), 0.0, 1.0)?;
        let (fm, fl, fh) = (
            invert_density(&cf, m)?,
            invert_density(&cf, m - d)?,
            invert_density(&cf, m + d)?,
        );
        let (lo, hi) = (cdf(m - d)?, cdf(m + d)?);
        let r = -m / d;
        let c = (fh - fl) / fm;
        // influence of one block mean on m_hat + r d_hat, by region
        let infl = |side: f64, outside: f64| {
            side / (2.0 * fm) + r * (outside - c * side) / (2.0 * (fh + fl))
        };
        let var = lo * infl(-1.0, 1.0).powi(2)
            + (0.5 - lo) * infl(-1.0, -1.0).powi(2)
            + (hi - 0.5) * infl(1.0, -1.0).powi(2)
            + (1.0 - hi) * infl(1.0, 1.0).powi(2);
        Ok(Self { median: m, mad: d, spread: var.sqrt() })
    }
}

/// Root of an increasing function, bracket widened by doubling.
fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let width = hi - lo;
    for _ in 0..60 {
        if f(lo)? <= 0.0 {
            break;
        }
        lo -= (hi - lo).max(width);
    }
    for _ in 0..60 {
        if f(hi)? >= 0.0 {
            break;
        }
        hi += (hi - lo).max(width);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Median-of-means estimate of `E|X - mu|^(1+lambda)`. Block `b` draws from
/// ChaCha8 stream `b` of `seed`, so results do not depend on thread scheduling.
///
/// When `|X - mu|^(1+lambda)` has infinite variance the block means follow a
/// totally skewed stable law whose median lies below its mean by a fixed
/// multiple of its median absolute deviation; that offset is added back.
pub fn mc_moment(spec: &SamplerSpec, n: usize, mu: f64, lambda: f64, seed: u64) -> Result<McEstimate> {
    check_lambda(lambda)?;
    let g = 1.0 + lambda;
    let (sampler, index) = spec.build()?;
    if g >= index {
        return Err(Error::existence(format!(
            "{} has no moment of order {g}",
            spec.name()
        )));
    }
    if n < MC_BLOCKS {
        return Err(Error::domain(format!("need at least {MC_BLOCKS} samples")));
    }
    let summand_index = index / g;
    let limit = if summand_index >= 2.0 {
        BlockLimit::normal()
    } else {
        BlockLimit::skewed_stable(summand_index)?
    };
    let blocks: Vec<(f64, f64, usize)> = (0..MC_BLOCKS)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let m = n / MC_BLOCKS + usize::from(b < n % MC_BLOCKS);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..m {
                let y = (sampler.sample(&mut rng) - mu).abs().powf(g);
                s1 += y;
                s2 += y * y;
            }
            (s1, s2, m)
        })
        .collect();

    let means: Vec<f64> = blocks.iter().map(|&(s, _, m)| s / m as f64).collect();
    let centre = median(&means);
    let dev: Vec<f64> = means.iter().map(|m| (m - centre).abs()).collect();
    let scale = median(&dev) / limit.mad;
    let estimate = centre - limit.median * scale;
    let stderr_proxy = limit.spread * scale / (MC_BLOCKS as f64).sqrt();

    let total: f64 = blocks.iter().map(|b| b.0).sum();
    let total2: f64 = blocks.iter().map(|b| b.1).sum();
    let nf = n as f64;
    let mean = total / nf;
    let var = (total2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    Ok(McEstimate {
        estimate,
        stderr_proxy,
        mean,
        stderr: (var / nf).sqrt(),
        summand_index,
        n,
        seed,
    })
}

/// Draws `n` variates from stream 0 of `seed`.
pub fn mc_samples(spec: &SamplerSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    let (sampler, _) = spec.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| sampler.sample(&mut rng)).collect())
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{
        stable_general_moment, CompoundPoissonParams, LinnikParams, ParetoParams,
    };
    use crate::specfun::gamma_fn;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    // E|X|^1.5 for N(0, 2): 2^1.5 Gamma(1.25) / sqrt(pi)
    const GAUSS_15: f64 = 1.4464090846320772;

    #[test]
    fn report_pass_flag() {
        let r = OracleReport::new("x", 1.0, 1.0 + 1e-7, 1e-6, OracleKind::Series, None);
        assert!(r.passed);
        let r = OracleReport::new("x", 1.0, f64::NAN, 1e-6, OracleKind::Series, None);
        assert!(!r.passed);
    }

    #[test]
    fn gaussian_inversion() {
        let cf = StableParams::symmetric(2.0, 1.0).unwrap().chf();
        let v = density_inversion_moment(&cf, f64::INFINITY, 0.0, 0.5, &cfg()).unwrap();
        assert!(rel(v, GAUSS_15) < 1e-9, "{v}");
        let f0 = invert_density(&cf, 0.0).unwrap();
        assert!(rel(f0, 0.5 / PI.sqrt()) < 1e-12);
    }

    #[test]
    fn uniform_and_exponential_direct() {
        let u = direct_density_moment(&|_| 1.0, (0.0, 1.0), None, 0.0, 0.5, &cfg()).unwrap();
        assert!(rel(u, 0.4) < 1e-12);
        let e = |x: f64| (-x).exp();
        let v = direct_density_moment(&e, (0.0, f64::INFINITY), None, 0.0, 0.5, &cfg()).unwrap();
        assert!(rel(v, gamma_fn(2.5).unwrap()) < 1e-11, "{v}");
    }

    #[test]
    fn normalization_is_checked() {
        let r = direct_density_moment(&|_| 0.5, (0.0, 1.0), None, 0.0, 0.5, &cfg());
        assert!(matches!(r, Err(Error::Normalization(_))));
    }

    #[test]
    fn pareto_direct_density() {
        let p = ParetoParams::new(3.0).unwrap();
        let pdf = |x: f64| p.pdf(x);
        let v = direct_density_moment(
            &pdf,
            (0.0, f64::INFINITY),
            Some(TailModel::integer_steps(3.0)),
            0.0,
            0.5,
            &cfg(),
        )
        .unwrap();
        // 3 B(2.5, 1.5)
        assert!(rel(v, 0.5890486225480862) < 1e-9, "{v}");
    }

    #[test]
    fn wrong_tail_index_is_reported() {
        let cf = StableParams::symmetric(1.5, 1.0).unwrap().chf();
        let r = density_inversion_moment(&cf, 1.9, 0.0, 0.2, &cfg());
        assert!(matches!(r, Err(Error::TailFit { .. })), "{r:?}");
    }

    #[test]
    fn poisson_series() {
        let v = lattice_series_moment(&poisson_pmf(1.0), 0.0, 0.5).unwrap();
        assert!(rel(v, 1.3727326403575221) < 1e-13, "{v}");
    }

    #[test]
    fn mc_is_deterministic() {
        let s = SamplerSpec::Family(Distribution::Stable(StableParams::new(1.7, 0.4, 1.0, 0.0).unwrap()));
        let a = mc_moment(&s, 20_000, 0.0, 0.3, 7).unwrap();
        let b = mc_moment(&s, 20_000, 0.0, 0.3, 7).unwrap();
        assert_eq!(a, b);
        let c = mc_moment(&s, 20_000, 0.0, 0.3, 8).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn mc_gaussian_and_poisson() {
        let s = SamplerSpec::Family(Distribution::Stable(StableParams::symmetric(2.0, 1.0).unwrap()));
        let r = mc_moment(&s, 1_000_000, 0.0, 0.5, 11).unwrap();
        assert!((r.estimate - GAUSS_15).abs() < 3.0 * r.stderr_proxy, "{r:?}");
        let cp = CompoundPoissonParams::new(1.0, JumpSpec::Deterministic).unwrap();
        let s = SamplerSpec::Family(Distribution::CompoundPoisson(cp));
        let r = mc_moment(&s, 1_000_000, 0.0, 0.5, 12).unwrap();
        assert!((r.estimate - 1.3727326403575221).abs() < 3.0 * r.stderr_proxy, "{r:?}");
    }

    #[test]
    fn block_limits() {
        let n = BlockLimit::normal();
        assert!((n.spread / n.mad - (0.5 * PI).sqrt() * 1.482602218505602).abs() < 1e-12);
        // scipy levy_stable (S1) median for alpha = 1.5, beta = 1
        let s = BlockLimit::skewed_stable(1.5).unwrap();
        assert!((s.median + 0.7167106854550216).abs() < 1e-9, "{s:?}");
        let near = BlockLimit::skewed_stable(1.99).unwrap();
        assert!((near.mad - n.mad * 2f64.sqrt()).abs() < 0.01, "{near:?}");
    }

    #[test]
    fn mc_skewed_summand_is_recentred() {
        let s = SamplerSpec::Family(Distribution::Stable(StableParams::new(1.5, 0.5, 1.0, 0.0).unwrap()));
        let r = mc_moment(&s, 1_000_000, 0.0, 0.3, 3).unwrap();
        let exact = stable_general_moment(&StableParams::new(1.5, 0.5, 1.0, 0.0).unwrap(), 0.3).unwrap();
        assert!((r.estimate - exact).abs() < 3.0 * r.stderr_proxy, "{r:?} vs {exact}");
    }

    #[test]
    fn mc_rejects_missing_moment() {
        let s = SamplerSpec::Family(Distribution::Linnik(LinnikParams::new(1.2, 1.0, 1.0).unwrap()));
        assert!(matches!(mc_moment(&s, 1000, 0.0, 0.5, 1), Err(Error::Existence(_))));
    }

    #[test]
    fn cdf_inversion_of_cauchy_free_case() {
        let cf = StableParams::symmetric(2.0, 1.0).unwrap().chf();
        let f = invert_cdf(&cf, 1.0).unwrap();
        // Phi(1 / sqrt 2)
        assert!((f - 0.7602499389065233).abs() < 1e-10, "{f}");
    }
}
