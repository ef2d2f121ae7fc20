//! Dispatch of the computation commands.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regulator_core::dilog::{bloch_wigner, cross_ratio, li2, CrossRatioConvention};
use regulator_core::grassmann::{
    denominator, dilog_presentation, f_invariant, grassmann_cochain, integrand,
    integrand_equivalence, lift_to_group, numerator_coeff, VectorTuple,
};
use regulator_core::jet_forms::{
    required_jet_order, theorem1_residual, Conventions, MetricFamily, TestScene,
};
use regulator_core::linalg::{CMatrix, C64};
use regulator_core::quad::{QuadratureConfig, SimplexPoint};
use regulator_core::sample;
use regulator_core::transgression::{
    borel_cochain, chern_cochain, chern_prefactor, cocycle_defect, GroupTuple,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::campaign;
use crate::config::{Command, ConventionArgs, JetChoice, RunConfig};
use crate::error::{CliError, Result};
use crate::input::{check_weight, read_json, MetricSpec, TupleFile, VectorsFile};
use crate::report::{Report, SCHEMA_VERSION};

/// ε-ladder for the trace-form comparison.
pub const EPSILON_LADDER: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

/// What a command produced, before it is wrapped into a [`Report`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Vec<Value>,
    pub summary: Value,
    pub converged: bool,
    pub passed: Option<bool>,
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

pub fn run(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    config.quadrature.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let q = &config.quadrature;
    let outcome = match &config.command {
        Command::Dilog { z } => dilog(*z),
        Command::Transgress {
            r,
            tuple,
            borel,
            epsilon,
        } => transgress(*r, tuple, *borel, *epsilon, q)?,
        Command::Grassmann {
            r,
            vectors,
            point,
            equivalence,
        } => grassmann(*r, vectors, point.as_deref(), *equivalence, q)?,
        Command::DilogPresentation {
            vectors,
            sweep_conventions,
            convention,
        } => presentation(vectors, *sweep_conventions, *convention, q)?,
        Command::CocycleTest { r, trials, rank } => cocycle_test(*r, *trials, *rank, q, &mut rng)?,
        Command::VerifyTh1 {
            r,
            n,
            scene,
            points,
            jets,
            step,
            tol,
            conventions,
        } => verify_th1(*r, *n, scene, *points, *jets, *step, *tol, conventions, &mut rng)?,
        Command::Campaign {
            suite,
            trials,
            r,
            conventions,
        } => campaign::run(
            *suite,
            trials.unwrap_or(suite.default_trials()),
            *r,
            conventions.conventions(),
            q,
            &mut rng,
        )?,
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command: config.command.name().to_string(),
        config: config.clone(),
        results: outcome.results,
        summary: outcome.summary,
        converged: outcome.converged,
        passed: outcome.passed,
        wall_time_seconds: config.timing.then(|| start.elapsed().as_secs_f64()),
    })
}

fn dilog(z: C64) -> Outcome {
    Outcome {
        results: vec![json!({
            "z": z,
            "li2": li2(z),
            "bloch_wigner": bloch_wigner(z),
        })],
        summary: Value::Null,
        converged: true,
        passed: None,
    }
}

fn transgress(
    r: usize,
    path: &Path,
    borel: bool,
    epsilon: Option<f64>,
    q: &QuadratureConfig,
) -> Result<Outcome> {
    let file: TupleFile = read_json(path)?;
    check_weight(r, file.r, "tuple file")?;
    let n = file
        .g
        .first()
        .ok_or_else(|| CliError::Input("the tuple has no group elements".into()))?
        .rows();
    if let Some(declared) = file.rank {
        if declared != n {
            return Err(CliError::Input(format!("tuple file declares N = {declared} but g_0 is {n}x{n}")));
        }
    }
    let h = match file.h {
        MetricSpec::Named(_) => CMatrix::identity(n),
        MetricSpec::RankOne { rank1 } => rank1.outer_self(),
        MetricSpec::Matrix(m) => m,
    };
    let eps = epsilon.or(file.epsilon).unwrap_or(0.0);
    let tuple = GroupTuple::new(r, file.g, h, eps)?;
    let prefactor = chern_prefactor(r);
    let chern = chern_cochain(&tuple, q)?;
    let mut results = vec![json!({
        "quantity": "chern-cochain",
        "result": chern,
        "prefactor": prefactor,
        "raw_integral": chern.value / prefactor,
    })];
    let mut converged = chern.converged;
    if borel {
        let b = borel_cochain(&tuple, q)?;
        converged &= b.converged;
        results.push(json!({"quantity": "borel-integral", "result": b}));
    }
    Ok(Outcome {
        results,
        summary: json!({"r": r, "N": n, "epsilon": eps}),
        converged,
        passed: None,
    })
}

fn parse_point(coords: &[f64], n: usize) -> Result<SimplexPoint> {
    let p = if coords.len() == n {
        SimplexPoint::from_free(coords)
    } else if coords.len() == n + 1 {
        SimplexPoint::new(coords.to_vec())
    } else {
        return Err(CliError::Input(format!(
            "--point needs {n} free or {} barycentric coordinates, got {}",
            n + 1,
            coords.len()
        )));
    };
    Ok(p?)
}

fn grassmann(
    r: usize,
    path: &Path,
    point: Option<&[f64]>,
    equivalence: bool,
    q: &QuadratureConfig,
) -> Result<Outcome> {
    let file: VectorsFile = read_json(path)?;
    check_weight(r, file.r, "vectors file")?;
    let tuple = VectorTuple::new(file.v)?;
    if tuple.weight() != r {
        return Err(CliError::Input(format!("vectors live in C^{}, not C^{r}", tuple.weight())));
    }
    let m = 2 * r - 1;
    let summary = json!({"r": r, "generic": tuple.is_generic(), "min_minor": tuple.min_minor()});
    if equivalence {
        let t = match point {
            Some(c) => parse_point(c, m)?,
            None => SimplexPoint::barycenter(m),
        };
        let (gs, v) = lift_to_group(&tuple);
        let rep = integrand_equivalence(&gs, &v, &t, &EPSILON_LADDER)?;
        return Ok(Outcome {
            results: rep.rows.iter().map(to_value).collect(),
            summary: json!({
                "r": r,
                "point": rep.point,
                "minor_side": rep.minor_side,
                "extrapolated": rep.extrapolated,
                "extrapolated_relative_difference": rep.extrapolated_relative_difference,
            }),
            converged: true,
            passed: None,
        });
    }
    if let Some(c) = point {
        let t = parse_point(c, m)?;
        return Ok(Outcome {
            results: vec![json!({
                "point": t.coords(),
                "numerator": numerator_coeff(&tuple, &t)?,
                "denominator": denominator(&tuple, &t)?,
                "integrand": integrand(&tuple, &t)?,
            })],
            summary,
            converged: true,
            passed: None,
        });
    }
    let res = grassmann_cochain(&tuple, q)?;
    Ok(Outcome {
        results: vec![json!({"quantity": "grassmann-cochain", "result": res})],
        summary,
        converged: res.converged,
        passed: None,
    })
}

fn presentation(
    path: &Path,
    sweep: bool,
    convention: CrossRatioConvention,
    q: &QuadratureConfig,
) -> Result<Outcome> {
    let file: VectorsFile = read_json(path)?;
    check_weight(2, file.r, "vectors file")?;
    let v = file.v;
    let p = dilog_presentation(&v, q)?;
    let conventions: Vec<CrossRatioConvention> = if sweep {
        CrossRatioConvention::ALL.to_vec()
    } else {
        vec![convention]
    };
    let results = conventions
        .into_iter()
        .map(|conv| {
            let cr = cross_ratio(&v, conv)?;
            let d = bloch_wigner(cr);
            let ratio = (d != 0.0).then(|| p.value / C64::new(0.0, d));
            Ok(json!({
                "convention": conv.name(),
                "cross_ratio": cr,
                "bloch_wigner": d,
                "ratio_to_i_d": ratio,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome {
        results,
        summary: json!({"presentation": p, "f": f_invariant(&v)?}),
        converged: p.converged,
        passed: None,
    })
}

/// `|defect|` against five times the summed error estimates, with a
/// round-off floor for cochains that are exact.
pub fn cocycle_trial(trial: usize, r: usize, rank: usize, q: &QuadratureConfig, rng: &mut impl Rng) -> Result<(Value, bool, bool)> {
    let elements = (0..=2 * r).map(|_| sample::invertible(rng, rank)).collect();
    let tuple = GroupTuple::with_identity_metric(r, elements)?;
    let d = cocycle_defect(&tuple, q)?;
    let scale: f64 = d.faces.iter().map(|f| f.value.norm()).sum();
    let threshold = (5.0 * d.error_sum).max(64.0 * f64::EPSILON * scale);
    let pass = d.defect.norm() < threshold;
    let value = json!({
        "trial": trial,
        "defect": d.defect,
        "abs_defect": d.defect.norm(),
        "error_sum": d.error_sum,
        "threshold": threshold,
        "converged": d.converged,
        "pass": pass,
    });
    Ok((value, d.converged, pass))
}

fn cocycle_test(r: usize, trials: usize, rank: usize, q: &QuadratureConfig, rng: &mut impl Rng) -> Result<Outcome> {
    let mut out = Outcome {
        converged: true,
        passed: Some(true),
        ..Default::default()
    };
    for trial in 0..trials {
        let (value, converged, pass) = cocycle_trial(trial, r, rank, q, rng)?;
        out.results.push(value);
        out.converged &= converged;
        out.passed = Some(out.passed.unwrap() && pass);
    }
    out.summary = json!({"r": r, "N": rank, "trials": trials});
    Ok(out)
}

/// Default residual thresholds per weight and jet source.
pub fn residual_tolerance(r: usize, jets: JetChoice) -> f64 {
    match (jets, r) {
        (JetChoice::FiniteDifference, _) => 1e-4,
        (_, 1) => 1e-9,
        (_, 2) => 1e-7,
        _ => 1e-6,
    }
}

/// Fills in a random base point for whichever coordinates are missing.
pub fn random_point(scene: &mut TestScene, rng: &mut impl Rng, force: bool) {
    if force || scene.z.len() != scene.m {
        scene.z = (0..scene.m).map(|_| sample::disc(rng, 0.3)).collect();
    }
    if force || scene.tau.len() != scene.k {
        scene.tau = match scene.family {
            MetricFamily::Affine { .. } => sample::simplex_point(rng, scene.k).free().to_vec(),
            _ => (0..scene.k).map(|_| rng.gen_range(-0.3..0.3)).collect(),
        };
    }
}

pub fn residual_rows(
    scene: &TestScene,
    r: usize,
    ns: &[usize],
    jets: JetChoice,
    step: f64,
    conventions: Conventions,
    tol: f64,
) -> Result<Vec<(Value, bool)>> {
    ns.iter()
        .map(|&n| {
            let order = required_jet_order(r, n);
            let metric = match jets {
                JetChoice::Exact => scene.jet_metric(order)?,
                JetChoice::FiniteDifference => scene.finite_difference_metric(order, step)?,
            };
            let rep = theorem1_residual(&metric, r, n, conventions)?;
            let pass = rep.residual < tol;
            Ok((
                json!({
                    "n": n,
                    "z": scene.z,
                    "tau": scene.tau,
                    "residual": rep.residual,
                    "lhs_norm": rep.lhs_norm,
                    "rhs_norm": rep.rhs_norm,
                    "source": rep.source,
                    "pass": pass,
                }),
                pass,
            ))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn verify_th1(
    r: usize,
    n: Option<usize>,
    path: &Path,
    points: usize,
    jets: JetChoice,
    step: f64,
    tol: Option<f64>,
    conventions: &ConventionArgs,
    rng: &mut impl Rng,
) -> Result<Outcome> {
    if r == 0 {
        return Err(CliError::Input("r must be positive".into()));
    }
    let mut scene: TestScene = read_json(path)?;
    let ns: Vec<usize> = match n {
        Some(n) => vec![n],
        None => (1..2 * r).collect(),
    };
    let tol = tol.unwrap_or(residual_tolerance(r, jets));
    let conv = conventions.conventions();
    let mut out = Outcome {
        converged: true,
        passed: Some(true),
        ..Default::default()
    };
    for p in 0..points.max(1) {
        random_point(&mut scene, rng, p > 0);
        scene.validate()?;
        for (mut row, pass) in residual_rows(&scene, r, &ns, jets, step, conv, tol)? {
            row["point"] = json!(p);
            out.results.push(row);
            out.passed = Some(out.passed.unwrap() && pass);
        }
    }
    let worst = out
        .results
        .iter()
        .filter_map(|v| v["residual"].as_f64())
        .fold(0.0, f64::max);
    out.summary = json!({
        "r": r,
        "tolerance": tol,
        "max_residual": worst,
        "conventions": conv,
    });
    Ok(out)
}
