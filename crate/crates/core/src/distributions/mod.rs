//! Distribution families with validated parameters, transforms and moment
//! fast paths.

pub mod compound;
pub mod linnik;
pub mod pareto;
pub mod stable;
pub mod subordinator;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

pub use compound::{
    cp_closed_form, cp_deterministic_moment, cp_exponential_moment, cp_geometric_stable_moment,
    cp_linnik_moment, cp_moment_convolution_route, cp_stable_series, CompoundPoissonChf,
    CompoundPoissonLaplace, CompoundPoissonParams, CustomJump, JumpSpec,
};
pub use linnik::{
    geometric_stable_moment_shifted, geometric_stable_moments, linnik_moment,
    linnik_shifted_moment, stable_linnik_distance, stable_linnik_distance_integral,
    GeometricStableChf, GeometricStableParams, LinnikChf, LinnikParams, StableMinusLinnikChf,
};
pub use pareto::{pareto_shifted_moment, ParetoChf, ParetoLaplace, ParetoParams};
pub use stable::{
    stable_general_moment, stable_moment_mellin, stable_shifted_moment, stable_subordinator_moment,
    stable_symmetric_moment, stable_symmetric_moment_mixture, StableChf, StableParams,
};
pub use subordinator::{subordinator_moment, SubordinatorLaplace, SubordinatorParams};

use crate::error::{Error, Result};
use crate::quad::QuadratureConfig;
use crate::transforms::{
    check_lambda, moment_centered_from_chf, moment_from_chf_kawata, moment_from_laplace,
    moment_shifted_from_chf, CharFn, LaplaceFn, MomentMethod, MomentQuery, MomentResult,
};

/// Rejects orders `1 + lambda` at or above the tail index of a family.
pub(crate) fn require_order_below(index: f64, lambda: f64, name: &str) -> Result<()> {
    check_lambda(lambda)?;
    if 1.0 + lambda >= index {
        return Err(Error::existence(format!(
            "{name} law with index {index} has no moment of order {}",
            1.0 + lambda
        )));
    }
    Ok(())
}

/// `E|X - mu|^(1+lambda)` for the stable law including its shift `delta`.
pub fn stable_moment(
    p: &StableParams,
    mu: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    let centred = StableParams { delta: 0.0, ..*p };
    let m = mu - p.delta;
    if m == 0.0 {
        stable_general_moment(&centred, lambda).map(MomentResult::closed_form)
    } else {
        stable_shifted_moment(&centred, m, lambda, cfg)
    }
}

/// `E|X - mu|^(1+lambda)` for compound Poisson laws: the family formula when
/// one exists, otherwise the Laplace route for nonnegative jumps at `mu = 0`
/// and the shifted ch.f. route in general.
pub fn cp_moment(
    p: &CompoundPoissonParams,
    mu: f64,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    let q = MomentQuery::new(lambda, mu, MomentMethod::Auto)?;
    Distribution::CompoundPoisson(p.clone()).moment(&q, cfg)
}

/// Every supported family.
#[derive(Debug, Clone)]
pub enum Distribution {
    Stable(StableParams),
    Pareto(ParetoParams),
    GeometricStable(GeometricStableParams),
    Linnik(LinnikParams),
    CompoundPoisson(CompoundPoissonParams),
    Subordinator(SubordinatorParams),
}

impl Distribution {
    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Stable(_) => "stable",
            Distribution::Pareto(_) => "pareto",
            Distribution::GeometricStable(_) => "geometric-stable",
            Distribution::Linnik(_) => "linnik",
            Distribution::CompoundPoisson(_) => "compound-poisson",
            Distribution::Subordinator(_) => "subordinator",
        }
    }

    /// Characteristic function; `None` for laws given only by a Laplace transform.
    pub fn chf(&self) -> Option<Arc<dyn CharFn>> {
        Some(match self {
            Distribution::Stable(p) => Arc::new(p.chf()),
            Distribution::Pareto(p) => Arc::new(p.chf()),
            Distribution::GeometricStable(p) => Arc::new(p.chf()),
            Distribution::Linnik(p) => Arc::new(p.chf()),
            Distribution::CompoundPoisson(p) => Arc::new(p.chf()?),
            Distribution::Subordinator(_) => return None,
        })
    }

    /// Laplace transform for laws supported on `[0, inf)`.
    pub fn laplace(&self) -> Option<Arc<dyn LaplaceFn>> {
        match self {
            Distribution::Pareto(p) => Some(Arc::new(p.laplace())),
            Distribution::CompoundPoisson(p) => Some(Arc::new(p.laplace()?)),
            Distribution::Subordinator(p) => Some(Arc::new(p.laplace())),
            _ => None,
        }
    }

    /// Family formula for `E|X - mu|^(1+lambda)`, if there is one at this `mu`.
    pub fn closed_form(
        &self,
        mu: f64,
        lambda: f64,
        cfg: &QuadratureConfig,
    ) -> Option<Result<MomentResult>> {
        Some(match self {
            Distribution::Stable(p) => stable_moment(p, mu, lambda, cfg),
            Distribution::Pareto(p) if mu >= 0.0 => {
                pareto_shifted_moment(p, mu, lambda).map(MomentResult::closed_form)
            }
            Distribution::Pareto(_) => return None,
            Distribution::GeometricStable(p) => geometric_stable_moments(p, mu, lambda, cfg),
            Distribution::Linnik(p) if mu == 0.0 => {
                linnik_moment(p, lambda).map(MomentResult::closed_form)
            }
            Distribution::Linnik(p) => linnik_shifted_moment(p, mu, lambda, cfg),
            Distribution::CompoundPoisson(p) => return cp_closed_form(p, mu, lambda, cfg),
            Distribution::Subordinator(p) if mu == 0.0 => subordinator_moment(p, lambda, cfg),
            Distribution::Subordinator(_) => return None,
        })
    }

    /// `E|X - mu|^(1+lambda)` by the requested route.
    ///
    /// `Auto` takes the family formula, then the Laplace route for nonnegative
    /// laws at `mu = 0`, then the shifted ch.f. route.
    pub fn moment(&self, q: &MomentQuery, cfg: &QuadratureConfig) -> Result<MomentResult> {
        check_lambda(q.lambda)?;
        let (lambda, mu) = (q.lambda, q.mu);
        match q.method {
            MomentMethod::Auto => {
                if let Some(r) = self.closed_form(mu, lambda, cfg) {
                    return r;
                }
                if mu == 0.0 {
                    if let Some(lp) = self.laplace() {
                        return moment_from_laplace(lp.as_ref(), lambda, cfg);
                    }
                }
                moment_shifted_from_chf(self.require_chf()?.as_ref(), lambda, mu, cfg)
            }
            MomentMethod::ClosedForm => self.closed_form(mu, lambda, cfg).unwrap_or_else(|| {
                Err(Error::UnsupportedParam(format!(
                    "no {} formula for centre {mu}",
                    self.name()
                )))
            }),
            MomentMethod::Laplace => {
                if mu != 0.0 {
                    return Err(Error::UnsupportedParam(
                        "the Laplace route computes E X^(1+lambda) and needs mu = 0".into(),
                    ));
                }
                let lp = self.laplace().ok_or_else(|| {
                    Error::UnsupportedParam(format!("{} law has no Laplace transform", self.name()))
                })?;
                moment_from_laplace(lp.as_ref(), lambda, cfg)
            }
            MomentMethod::LaueShifted => {
                moment_shifted_from_chf(self.require_chf()?.as_ref(), lambda, mu, cfg)
            }
            MomentMethod::LaueCentered => {
                let cf = recentre(self.require_chf()?, mu);
                moment_centered_from_chf(cf.as_ref(), lambda, &recentred_cfg(cfg, mu))
            }
            MomentMethod::Kawata => {
                let cf = recentre(self.require_chf()?, mu);
                moment_from_chf_kawata(cf.as_ref(), lambda, &recentred_cfg(cfg, mu))
            }
        }
    }

    fn require_chf(&self) -> Result<Arc<dyn CharFn>> {
        self.chf().ok_or_else(|| {
            Error::UnsupportedParam(format!(
                "{} law is handled through its Laplace transform",
                self.name()
            ))
        })
    }
}

/// A recentred integrand mixes the powers `u^(index-2-lambda)` and
/// `u^(-lambda)` at the origin, so the head is sampled much closer to 0.
fn recentred_cfg(cfg: &QuadratureConfig, mu: f64) -> QuadratureConfig {
    if mu == 0.0 {
        cfg.clone()
    } else {
        QuadratureConfig { endpoint_cutoff: cfg.endpoint_cutoff.min(1e-22), ..cfg.clone() }
    }
}

/// Ch.f. of `X - mu`.
struct Recentred {
    inner: Arc<dyn CharFn>,
    mu: f64,
}

fn recentre(cf: Arc<dyn CharFn>, mu: f64) -> Arc<dyn CharFn> {
    if mu == 0.0 {
        cf
    } else {
        Arc::new(Recentred { inner: cf, mu })
    }
}

impl CharFn for Recentred {
    fn phi(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.mu * t) * self.inner.phi(t)
    }

    fn dphi(&self, t: f64) -> Complex64 {
        let rot = Complex64::from_polar(1.0, -self.mu * t);
        rot * (self.inner.dphi(t) - Complex64::new(0.0, self.mu) * self.inner.phi(t))
    }

    fn one_minus_re_phi(&self, t: f64) -> f64 {
        let a = self.mu * t;
        2.0 * (0.5 * a).sin().powi(2) + a.cos() * self.inner.one_minus_re_phi(t)
            - a.sin() * self.inner.phi(t).im
    }

    fn small_t_index(&self) -> f64 {
        self.inner.small_t_index()
    }

    fn period(&self) -> Option<f64> {
        // the shifted lattice keeps its period only for whole turns
        let p = self.inner.period()?;
        let turns = self.mu * p / (2.0 * PI);
        ((turns - turns.round()).abs() < 1e-12).then_some(p)
    }

    fn domain_note(&self) -> String {
        format!("{} recentred at {}", self.inner.domain_note(), self.mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn routes_agree_through_dispatch() {
        let fams = [
            Distribution::Stable(StableParams::symmetric(1.8, 1.0).unwrap()),
            Distribution::Linnik(LinnikParams::new(1.8, 1.0, 2.0).unwrap()),
            Distribution::GeometricStable(GeometricStableParams::new(1.8, 0.5, 1.0).unwrap()),
            Distribution::Pareto(ParetoParams::new(3.0).unwrap()),
            Distribution::CompoundPoisson(
                CompoundPoissonParams::new(2.0, JumpSpec::Exponential { beta: 1.0 }).unwrap(),
            ),
        ];
        for d in &fams {
            let closed = d
                .moment(&MomentQuery::new(0.5, 0.0, MomentMethod::ClosedForm).unwrap(), &cfg())
                .unwrap()
                .value;
            for m in [MomentMethod::LaueCentered, MomentMethod::Kawata, MomentMethod::LaueShifted] {
                let v = d.moment(&MomentQuery::new(0.5, 0.0, m).unwrap(), &cfg()).unwrap().value;
                assert!(rel(v, closed) < 1e-7, "{} {m}: {v} vs {closed}", d.name());
            }
        }
    }

    #[test]
    fn recentred_routes_match_shifted() {
        let d = Distribution::Stable(StableParams::new(1.8, 0.5, 1.0, 0.0).unwrap());
        let q = |m| MomentQuery::new(0.5, 1.0, m).unwrap();
        let closed = d.moment(&q(MomentMethod::ClosedForm), &cfg()).unwrap().value;
        for m in [MomentMethod::LaueCentered, MomentMethod::Kawata, MomentMethod::LaueShifted] {
            let v = d.moment(&q(m), &cfg()).unwrap().value;
            assert!(rel(v, closed) < 1e-7, "{m}: {v} vs {closed}");
        }
    }

    #[test]
    fn stable_delta_shifts_centre() {
        let a = StableParams::new(1.7, 0.3, 1.2, 0.8).unwrap();
        let b = StableParams::new(1.7, 0.3, 1.2, 0.0).unwrap();
        let va = stable_moment(&a, 1.5, 0.4, &cfg()).unwrap().value;
        let vb = stable_moment(&b, 0.7, 0.4, &cfg()).unwrap().value;
        assert!(rel(va, vb) < 1e-14);
    }

    #[test]
    fn pareto_negative_centre_falls_back() {
        let d = Distribution::Pareto(ParetoParams::new(3.0).unwrap());
        assert!(d.closed_form(-1.0, 0.5, &cfg()).is_none());
        let q = MomentQuery::new(0.5, -1.0, MomentMethod::Auto).unwrap();
        let r = d.moment(&q, &cfg()).unwrap();
        assert_eq!(r.method_used, MomentMethod::LaueShifted);
        // E|X + 1|^1.5 = 3 int_1^inf x^1.5 x^-4 dx
        assert!(rel(r.value, 3.0 / 1.5) < 1e-7, "{}", r.value);
    }

    #[test]
    fn existence_boundary() {
        let d = Distribution::Linnik(LinnikParams::new(1.5, 1.0, 1.0).unwrap());
        let q = MomentQuery::new(0.5, 0.0, MomentMethod::Auto).unwrap();
        assert!(matches!(d.moment(&q, &cfg()), Err(Error::Existence(_))));
        let q = MomentQuery::new(0.5, 0.0, MomentMethod::Kawata).unwrap();
        assert!(matches!(d.moment(&q, &cfg()), Err(Error::Existence(_))));
    }
}
