//! Reference checks run by `validate`: every closed form against an oracle
//! that does not use fractional derivatives.

use std::sync::Arc;

use fracmom::applications::{
    bivariate_linnik_error, stable_ou_prediction_error, subgaussian_error, subgaussian_error_chf,
};
use fracmom::distributions::{
    pareto_shifted_moment, CompoundPoissonParams, Distribution, GeometricStableParams, JumpSpec,
    LinnikParams, ParetoParams, StableParams,
};
use fracmom::oracle::{
    density_inversion_moment, density_inversion_moment_with, direct_density_moment,
    lattice_series_moment, mc_moment, poisson_pmf, OracleKind, OracleReport, SamplerSpec, TailModel,
};
use fracmom::quad::QuadratureConfig;
use fracmom::transforms::{CharFn, MomentMethod, MomentQuery};
use fracmom::Result;
use rayon::prelude::*;

/// Relative tolerance of density-inversion rows.
pub const INVERSION_REL_TOL: f64 = 1e-5;
/// Relative tolerance of direct density quadrature rows.
pub const DIRECT_REL_TOL: f64 = 1e-9;
/// Absolute tolerance of lattice series rows.
pub const SERIES_ABS_TOL: f64 = 1e-8;
/// Monte Carlo rows pass within this many standard-error proxies.
pub const MC_SIGMAS: f64 = 3.0;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub mc_samples: usize,
    pub monte_carlo: bool,
    /// Keep only targets of this group (text before the first `:`).
    pub only: Option<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: crate::config::DEFAULT_SEED,
            mc_samples: DEFAULT_MC_SAMPLES,
            monte_carlo: true,
            only: None,
        }
    }
}

/// `(analytic, oracle, tolerance)`.
type Outcome = Result<(f64, f64, f64)>;

struct Case {
    target: String,
    kind: OracleKind,
    seed: Option<u64>,
    run: Box<dyn Fn(&QuadratureConfig) -> Outcome + Send + Sync>,
}

impl Case {
    fn new(
        target: String,
        kind: OracleKind,
        seed: Option<u64>,
        run: impl Fn(&QuadratureConfig) -> Outcome + Send + Sync + 'static,
    ) -> Self {
        Self { target, kind, seed, run: Box::new(run) }
    }

    fn group(&self) -> &str {
        self.target.split(':').next().unwrap_or("")
    }

    fn report(&self, cfg: &QuadratureConfig) -> OracleReport {
        match (self.run)(cfg) {
            Ok((analytic, oracle, tol)) => {
                OracleReport::new(self.target.clone(), analytic, oracle, tol, self.kind, self.seed)
            }
            Err(e) => {
                eprintln!("{}: {e}", self.target);
                OracleReport::new(self.target.clone(), f64::NAN, f64::NAN, 0.0, self.kind, self.seed)
            }
        }
    }
}

pub const GROUPS: [&str; 6] = ["stable", "geometric-stable", "linnik", "pareto", "cp", "applications"];

fn analytic(d: &Distribution, mu: f64, lambda: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(d.moment(&MomentQuery::new(lambda, mu, MomentMethod::Auto)?, cfg)?.value)
}

fn inversion_case(target: String, d: Distribution, index: f64, mu: f64, lambda: f64) -> Case {
    Case::new(target, OracleKind::DensityInversion, None, move |cfg| {
        let a = analytic(&d, mu, lambda, cfg)?;
        let cf = d.chf().expect("family with a ch.f.");
        let o = density_inversion_moment(cf.as_ref(), index, mu, lambda, cfg)?;
        Ok((a, o, INVERSION_REL_TOL * a.abs()))
    })
}

fn mc_case(
    target: String,
    spec: SamplerSpec,
    exact: impl Fn(&QuadratureConfig) -> Result<f64> + Send + Sync + 'static,
    mu: f64,
    lambda: f64,
    n: usize,
    seed: u64,
    classical: bool,
) -> Case {
    Case::new(target, OracleKind::MonteCarlo, Some(seed), move |cfg| {
        let a = exact(cfg)?;
        let e = mc_moment(&spec, n, mu, lambda, seed)?;
        Ok(if classical {
            (a, e.mean, MC_SIGMAS * e.stderr)
        } else {
            (a, e.estimate, MC_SIGMAS * e.stderr_proxy)
        })
    })
}

fn cases(opts: &SuiteOptions) -> Vec<Case> {
    let mut v = Vec::new();
    let lam = 0.3;

    for alpha in [1.5, 1.8] {
        for beta in [0.0, 0.5] {
            for mu in [0.0, 1.0] {
                let d = Distribution::Stable(StableParams::new(alpha, beta, 1.0, 0.0).unwrap());
                let t = format!("stable:alpha={alpha};beta={beta};sigma=1;mu={mu};lambda={lam}");
                v.push(inversion_case(t, d, alpha, mu, lam));
            }
        }
    }
    let gauss = Distribution::Stable(StableParams::symmetric(2.0, 1.0).unwrap());
    v.push(inversion_case("stable:alpha=2;beta=0;sigma=1;mu=0;lambda=0.5".into(), gauss, f64::INFINITY, 0.0, 0.5));

    for mu in [0.0, 1.0] {
        let d = Distribution::GeometricStable(GeometricStableParams::new(1.8, 0.5, 1.0).unwrap());
        v.push(inversion_case(format!("geometric-stable:alpha=1.8;beta=0.5;sigma=1;mu={mu};lambda={lam}"), d, 1.8, mu, lam));
        let d = Distribution::Linnik(LinnikParams::new(1.8, 1.0, 1.0).unwrap());
        v.push(inversion_case(format!("linnik:alpha=1.8;beta=1;sigma=1;mu={mu};lambda={lam}"), d, 1.8, mu, lam));
    }

    let pareto = ParetoParams::new(3.0).unwrap();
    for mu in [0.0, 1.0] {
        let t = format!("pareto:alpha=3;mu={mu};lambda=0.5");
        v.push(Case::new(t.clone(), OracleKind::DirectDensity, None, move |cfg| {
            let a = pareto_shifted_moment(&pareto, mu, 0.5)?;
            let pdf = |x: f64| pareto.pdf(x);
            let o = direct_density_moment(&pdf, (0.0, f64::INFINITY), Some(TailModel::integer_steps(3.0)), mu, 0.5, cfg)?;
            Ok((a, o, DIRECT_REL_TOL * a))
        }));
        v.push(Case::new(t, OracleKind::DensityInversion, None, move |cfg| {
            let a = pareto_shifted_moment(&pareto, mu, 0.5)?;
            let cf = pareto.chf();
            let o = density_inversion_moment_with(
                &cf,
                TailModel::integer_steps(3.0),
                (0.0, f64::INFINITY),
                mu,
                0.5,
                cfg,
            )?;
            Ok((a, o, INVERSION_REL_TOL * a))
        }));
    }

    for c in [0.5, 1.0, 2.0] {
        for l in [0.25, 0.5, 0.75] {
            let t = format!("cp:jump=deterministic;c={c};mu=0;lambda={l}");
            v.push(Case::new(t, OracleKind::Series, None, move |cfg| {
                let d = Distribution::CompoundPoisson(CompoundPoissonParams::new(c, JumpSpec::Deterministic)?);
                let a = d.moment(&MomentQuery::new(l, 0.0, MomentMethod::Laplace)?, cfg)?.value;
                let o = lattice_series_moment(&poisson_pmf(c), 0.0, l)?;
                Ok((a, o, SERIES_ABS_TOL))
            }));
        }
    }

    let (gamma, alpha) = (0.5, 1.8);
    let t = format!("applications:model=subgaussian;alpha={alpha};gamma={gamma};c=0.2;lambda={lam}");
    v.push(Case::new(t, OracleKind::DensityInversion, None, move |cfg| {
        let a = subgaussian_error(gamma, alpha, 0.2, lam)?;
        let cf: Arc<dyn CharFn> = subgaussian_error_chf(gamma, alpha, 0.2)?;
        let o = density_inversion_moment(cf.as_ref(), alpha, 0.0, lam, cfg)?;
        Ok((a, o, INVERSION_REL_TOL * a))
    }));

    if opts.monte_carlo {
        let (n, seed) = (opts.mc_samples, opts.seed);
        let fam = |d: Distribution| SamplerSpec::Family(d);
        let exact_of = |d: Distribution, mu: f64| move |cfg: &QuadratureConfig| analytic(&d, mu, lam, cfg);
        let families: Vec<(String, Distribution, bool)> = vec![
            ("stable:alpha=1.8;beta=0;sigma=1".into(), Distribution::Stable(StableParams::new(1.8, 0.0, 1.0, 0.0).unwrap()), false),
            ("stable:alpha=1.5;beta=0.5;sigma=1".into(), Distribution::Stable(StableParams::new(1.5, 0.5, 1.0, 0.0).unwrap()), false),
            ("geometric-stable:alpha=1.8;beta=0.5;sigma=1".into(), Distribution::GeometricStable(GeometricStableParams::new(1.8, 0.5, 1.0).unwrap()), false),
            ("linnik:alpha=1.8;beta=2;sigma=1".into(), Distribution::Linnik(LinnikParams::new(1.8, 1.0, 2.0).unwrap()), false),
            ("pareto:alpha=3".into(), Distribution::Pareto(ParetoParams::new(3.0).unwrap()), false),
            ("cp:jump=exponential;c=1".into(), Distribution::CompoundPoisson(CompoundPoissonParams::new(1.0, JumpSpec::Exponential { beta: 1.0 }).unwrap()), true),
            ("cp:jump=deterministic;c=1".into(), Distribution::CompoundPoisson(CompoundPoissonParams::new(1.0, JumpSpec::Deterministic).unwrap()), false),
        ];
        for (name, d, classical) in families {
            let t = format!("{name};mu=0;lambda={lam};n={n}");
            v.push(mc_case(t, fam(d.clone()), exact_of(d, 0.0), 0.0, lam, n, seed, classical));
        }
        let c = gamma;
        v.push(mc_case(
            format!("applications:model=subgaussian;alpha={alpha};gamma={gamma};c={c};lambda={lam};n={n}"),
            SamplerSpec::SubGaussianError { alpha, gamma, c },
            move |_| subgaussian_error(gamma, alpha, c, lam),
            0.0,
            lam,
            n,
            seed,
            false,
        ));
        v.push(mc_case(
            format!("applications:model=linnik;alpha={alpha};beta=1.5;gamma={gamma};c=0;lambda={lam};n={n}"),
            SamplerSpec::BivariateLinnikError { alpha, beta: 1.5, gamma, c: 0.0 },
            move |_| bivariate_linnik_error(gamma, alpha, 1.5, 0.0, lam),
            0.0,
            lam,
            n,
            seed,
            false,
        ));
        v.push(mc_case(
            format!("applications:model=ou;alpha={alpha};rate=0.7;t=1;c=0.3;lambda={lam};n={n}"),
            SamplerSpec::StableOuError { rate: 0.7, alpha, t: 1.0, c: 0.3 },
            move |_| stable_ou_prediction_error(0.7, alpha, 1.0, 0.3, lam),
            0.0,
            lam,
            n,
            seed,
            false,
        ));
    }
    v
}

/// Runs the selected checks; rows come back in a fixed order.
pub fn run_suite(opts: &SuiteOptions, cfg: &QuadratureConfig) -> Vec<OracleReport> {
    let selected: Vec<Case> = cases(opts)
        .into_iter()
        .filter(|c| opts.only.as_deref().map_or(true, |g| c.group() == g))
        .collect();
    selected.par_iter().map(|c| c.report(cfg)).collect()
}

pub fn report_table(rows: &[OracleReport]) -> crate::table::Table {
    use crate::table::Cell;
    let mut t = crate::table::Table::new(&[
        "target", "analytic", "oracle", "abs_diff", "tolerance", "passed", "oracle_kind", "seed",
    ]);
    for r in rows {
        t.push(vec![
            r.target.clone().into(),
            r.analytic.into(),
            r.oracle.into(),
            r.abs_diff.into(),
            r.tolerance.into(),
            Cell::Bool(r.passed),
            r.oracle_kind.name().into(),
            r.seed.map_or(Cell::Text(String::new()), Cell::Int),
        ]);
    }
    t
}
