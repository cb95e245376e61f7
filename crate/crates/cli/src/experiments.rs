use std::sync::Arc;

use nclp_core::algebra::{Algebra, Element};
use nclp_core::centralizers::{estimate_c, estimate_q, lift_centralizer, NCCentralizer};
use nclp_core::commutative::CommCentralizer;
use nclp_core::interpolation::{
    change_of_state, derivative_bound_check, fan_estimate, kosaki_norm, Couple, Side, StateDensity, StripFunction,
    StripTerm,
};
use nclp_core::random::Sampler;
use nclp_core::twisted_sum::{
    elementary_inequality_check, estimate_duality_constant, nontriviality_witness, sigma_elementary_duality_bound,
};
use nclp_core::{conjugate, Complex64, ScalarFn};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::{Comparison, Row};

type Rows = Result<Vec<Row>, CliError>;

pub fn dispatch(cfg: &ExperimentConfig) -> Rows {
    match cfg.experiment.as_str() {
        "norms" => norms(cfg),
        "centralizer-constants" => centralizer_constants(cfg),
        "nontriviality" => nontriviality(cfg),
        "duality" => duality(cfg),
        "inequality-grid" => inequality_grid(cfg),
        "kosaki" => kosaki(cfg),
        "change-of-state" => change_of_state_rows(cfg),
        "derivative-bound" => derivative_bound(cfg),
        "lift-consistency" => lift_consistency(cfg),
        other => Err(CliError::UnknownExperiment(other.to_string())),
    }
}

/// Runs `trial(i)` for `i < n` in parallel; rows come back in trial order.
fn per_trial(n: usize, trial: impl Fn(u64) -> Rows + Send + Sync) -> Rows {
    let nested: Vec<Vec<Row>> = (0..n as u64).into_par_iter().map(trial).collect::<Result<_, _>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// The configured algebra, or a fresh random one per trial.
fn algebra_for(
    cfg: &ExperimentConfig,
    s: &mut Sampler,
    max_blocks: usize,
    max_dim: usize,
) -> Result<Arc<Algebra>, CliError> {
    match &cfg.algebra {
        Some(section) => section.build(),
        None => Ok(s.algebra(max_blocks, max_dim)),
    }
}

fn fixed_algebra(cfg: &ExperimentConfig, dim: usize) -> Result<Arc<Algebra>, CliError> {
    match &cfg.algebra {
        Some(section) => section.build(),
        None => Ok(Algebra::matrix(dim, 1.0)?),
    }
}

fn describe(alg: &Algebra) -> String {
    alg.blocks().iter().map(|b| format!("{}x{}", b.dim, b.weight)).collect::<Vec<_>>().join("+")
}

fn norms(cfg: &ExperimentConfig) -> Rows {
    let exps = cfg.exponents_or(&[1.5, 2.0, 3.0]);
    per_trial(cfg.trials_or(100), |i| {
        let mut s = Sampler::for_trial(cfg.seed, i);
        let alg = algebra_for(cfg, &mut s, 4, 4)?;
        let x = s.ginibre(&alg);
        let mu = x.mu();
        exps.iter()
            .map(|&p| {
                let inputs = format!("trial={i};p={p};algebra={}", describe(&alg));
                Ok(Row::new("lp_norm_vs_mu", inputs, x.lp_norm(p)?, mu.lp_norm(p)?, 1e-10, Comparison::RelWithin))
            })
            .collect()
    })
}

fn centralizer_constants(cfg: &ExperimentConfig) -> Rows {
    let alg = fixed_algebra(cfg, 3)?;
    let trials = cfg.trials_or(1000);
    let mut rows = Vec::new();
    for p in cfg.exponents_or(&[1.5, 2.0, 3.0]) {
        let omega = match &cfg.centralizer {
            Some(section) => section.build(p)?,
            None => NCCentralizer::OmegaP { p },
        };
        let inputs = format!("kind={};p={};trials={trials};algebra={}", omega.name(), omega.p(), describe(&alg));
        rows.push(Row::report("estimate_q", inputs.clone(), estimate_q(&omega, &alg, omega.p(), trials, cfg.seed)?));
        rows.push(Row::report("estimate_c", inputs, estimate_c(&omega, &alg, omega.p(), trials, cfg.seed)?));
    }
    Ok(rows)
}

fn nontriviality(cfg: &ExperimentConfig) -> Rows {
    let sizes = cfg.sizes.clone().unwrap_or_else(|| (1..=8).map(|k| 1usize << k).collect());
    let mut s = Sampler::new(cfg.seed);
    let mut rows = Vec::new();
    for p in cfg.exponents_or(&[2.0]) {
        for &n in &sizes {
            let profiles = [
                ("uniform", vec![1.0; n]),
                ("geometric", (0..n).map(|i| 2f64.powi(i as i32)).collect()),
                ("random", (0..n).map(|_| s.log_uniform(1e-2, 1e2)).collect::<Vec<f64>>()),
            ];
            for (name, w) in profiles {
                let ratio = nontriviality_witness(&w, p)?.ratio;
                let inputs = format!("n={n};profile={name};p={p}");
                rows.push(Row::new("witness_ratio", inputs, ratio, (n as f64).ln(), 1e-9, Comparison::AbsWithin));
            }
        }
    }
    Ok(rows)
}

fn normalized_diagonal(s: &mut Sampler, alg: &Arc<Algebra>, r: f64) -> Result<Element, CliError> {
    let x = s.positive_diagonal(alg, 1e-3, 1e3);
    let x = x.scale_real(1.0 / x.lp_norm(r)?);
    Ok(x.scale_real(1.0 / x.lp_norm(r)?))
}

fn duality(cfg: &ExperimentConfig) -> Rows {
    let alg = fixed_algebra(cfg, 4)?;
    let trials = cfg.trials_or(10_000);
    let phis = match cfg.centralizer.as_ref().and_then(|c| c.phi.clone()) {
        Some(phi) => vec![phi],
        None => vec![ScalarFn::Identity, ScalarFn::Clip(-1.0, 1.0)],
    };
    let mut rows = Vec::new();
    for p in cfg.exponents_or(&[1.25, 1.5, 2.0]) {
        let inputs = format!("p={p};trials={trials};algebra={}", describe(&alg));
        rows.push(Row::report("duality_constant", inputs, estimate_duality_constant(&alg, p, trials, cfg.seed)?));
        if p > 2.0 {
            continue;
        }
        for phi in &phis {
            let ratios: Vec<f64> = (0..trials as u64)
                .into_par_iter()
                .map(|i| {
                    let mut s = Sampler::for_trial(cfg.seed, i);
                    let n = 1 + s.index(8);
                    let weights: Vec<f64> = (0..n).map(|_| s.log_uniform(0.1, 10.0)).collect();
                    let diag = Algebra::diagonal(&weights)?;
                    let y = normalized_diagonal(&mut s, &diag, conjugate(p))?;
                    let w = normalized_diagonal(&mut s, &diag, p)?;
                    let (lhs, bound) = sigma_elementary_duality_bound(&y, &w, p, phi)?;
                    Ok(if bound > 0.0 { lhs / bound } else { 0.0 })
                })
                .collect::<Result<_, CliError>>()?;
            let worst = ratios.iter().copied().fold(0.0, f64::max);
            let violations = ratios.iter().filter(|&&r| r > 1.0 + 1e-12).count();
            let inputs = format!("p={p};phi={phi};trials={trials}");
            rows.push(Row::new("sigma_bound_max_ratio", inputs.clone(), worst, 1.0, 1e-12, Comparison::AtMost));
            rows.push(Row::new("sigma_bound_violations", inputs, violations as f64, 0.0, 0.0, Comparison::AbsWithin));
        }
    }
    Ok(rows)
}

fn inequality_grid(cfg: &ExperimentConfig) -> Rows {
    let grid = cfg.grid.unwrap_or_default();
    let mut rows = Vec::new();
    for p in cfg.exponents_or(&[1.25, 1.5, 2.0, 3.0]) {
        let r = elementary_inequality_check(p, &grid)?;
        let inputs = format!("p={p};lo={};hi={};points={}", grid.lo, grid.hi, grid.points);
        rows.push(Row::new("max_ratio", inputs.clone(), r.max_ratio, 1.0, 0.0, Comparison::AtMost));
        rows.push(Row::new("violations", inputs, r.violations as f64, 0.0, 0.0, Comparison::AbsWithin));
    }
    Ok(rows)
}

fn kosaki(cfg: &ExperimentConfig) -> Rows {
    let exps = cfg.exponents_or(&[1.5, 2.0, 3.0]);
    per_trial(cfg.trials_or(100), |i| {
        let mut s = Sampler::for_trial(cfg.seed, i);
        let n = 1 + s.index(6);
        let weights: Vec<f64> = (0..n).map(|_| s.log_uniform(0.25, 4.0)).collect();
        let alg = Algebra::diagonal(&weights)?;
        let d = StateDensity::state(s.positive_diagonal(&alg, 0.05, 1.0))?;
        let dd = d.density().diagonal_entries();
        let a: Vec<Complex64> = (0..n).map(|_| s.complex_normal()).collect();
        let b: Vec<Complex64> = (0..n).map(|_| s.complex_normal()).collect();
        let (ea, eb) = (Element::diagonal(&alg, &a)?, Element::diagonal(&alg, &b)?);
        let mut rows = Vec::new();
        for &p in &exps {
            let formula = a
                .iter()
                .zip(&dd)
                .zip(&weights)
                .map(|((x, di), w)| w * x.norm().powf(p) * di.re)
                .sum::<f64>()
                .powf(1.0 / p);
            let inputs = format!("trial={i};n={n};p={p}");
            rows.push(Row::new(
                "kosaki_norm_vs_weighted_lp",
                inputs.clone(),
                kosaki_norm(&ea, &d, p, Side::Left)?,
                formula,
                1e-10,
                Comparison::RelWithin,
            ));
            let (lhs, rhs) = fan_estimate(&ea, &eb, &d, p)?;
            rows.push(Row::new("fan_estimate", inputs, lhs, rhs, 0.0, Comparison::AtMost));
        }
        Ok(rows)
    })
}

fn change_of_state_rows(cfg: &ExperimentConfig) -> Rows {
    let alg = fixed_algebra(cfg, 4)?;
    let exps = cfg.exponents_or(&[1.5, 2.0, 3.0]);
    per_trial(cfg.trials_or(100), |i| {
        let mut s = Sampler::for_trial(cfg.seed, i);
        let d0 = StateDensity::state(s.positive_definite(&alg))?;
        let d1 = StateDensity::state(s.positive_definite(&alg))?;
        let a = s.ginibre(&alg);
        exps.iter()
            .map(|&p| {
                let before = kosaki_norm(&a, &d0, p, Side::Left)?;
                let after = kosaki_norm(&change_of_state(&a, &d0, &d1, p)?, &d1, p, Side::Left)?;
                Ok(Row::new("isometry", format!("trial={i};p={p}"), after, before, 1e-8, Comparison::RelWithin))
            })
            .collect()
    })
}

fn kernel_function(s: &mut Sampler, alg: &Arc<Algebra>, theta: f64) -> Result<StripFunction, CliError> {
    let lambda = s.uniform(0.25, 2.0);
    let k = 1 + s.index(3);
    let terms = (0..k).map(|_| StripTerm { rate: s.uniform(-2.0, 2.0), coefficient: s.ginibre(alg) }).collect();
    let e = StripFunction::new(lambda, terms)?;
    Ok(if s.index(2) == 0 { e.vanishing_at(theta)? } else { e.with_conformal(theta, 1)? })
}

fn derivative_bound(cfg: &ExperimentConfig) -> Rows {
    let thetas = cfg.theta.map_or_else(|| vec![1.0 / 3.0, 0.5, 2.0 / 3.0], |t| vec![t]);
    let couples = cfg.couple.clone().map_or_else(|| vec!["M_L1".to_string(), "kosaki_left".to_string()], |c| vec![c]);
    let sampling = cfg.sampling.unwrap_or_default();
    let trials = cfg.trials_or(100);
    let mut rows = Vec::new();
    for couple_name in &couples {
        for &theta in &thetas {
            rows.extend(per_trial(trials, |i| {
                let mut s = Sampler::for_trial(cfg.seed, i);
                let alg = algebra_for(cfg, &mut s, 2, 3)?;
                let couple = match couple_name.as_str() {
                    "M_L1" => Couple::MLOne,
                    "kosaki_left" => Couple::KosakiLeft(StateDensity::state(s.positive_definite(&alg))?),
                    _ => Couple::KosakiRight(StateDensity::state(s.positive_definite(&alg))?),
                };
                let f = kernel_function(&mut s, &alg, theta)?;
                let (lhs, rhs) = derivative_bound_check(&f, &couple, theta, &sampling)?;
                let inputs = format!("trial={i};couple={couple_name};theta={theta}");
                Ok(vec![Row::new("derivative_bound", inputs, lhs, rhs, 1e-3, Comparison::AtMost)])
            })?);
        }
    }
    Ok(rows)
}

fn lift_consistency(cfg: &ExperimentConfig) -> Rows {
    let exps = cfg.exponents_or(&[1.5, 2.0, 3.0]);
    per_trial(cfg.trials_or(1000), |i| {
        let mut s = Sampler::for_trial(cfg.seed, i);
        let alg = match &cfg.algebra {
            Some(section) => section.build()?,
            None => Algebra::matrix(2 + s.index(7), s.log_uniform(0.25, 4.0))?,
        };
        let x = s.normal_element(&alg);
        exps.iter()
            .map(|&p| {
                let lifted = lift_centralizer(&CommCentralizer::KaltonPeck { p }, &x, p)?;
                let direct = NCCentralizer::OmegaP { p }.apply(&x)?;
                let err = (&lifted - &direct).lp_norm(p)? / x.lp_norm(p)?;
                let inputs = format!("trial={i};p={p};algebra={}", describe(&alg));
                Ok(Row::new("lift_vs_omega_p", inputs, err, 0.0, 1e-10, Comparison::AbsWithin))
            })
            .collect()
    })
}
