use std::path::Path;

use phasegroup::compat::{compat_samples, compat_scan, linspace, VARIANTS};
use phasegroup::dynamics::{e_map, evolve, f_map, invert_e, invert_f};
use phasegroup::groupoid::constant_poisson::{cp_generate_side, cp_left_right_set_distance, phase_lift_graph, ConstantPoissonSpace};
use phasegroup::groupoid::cotangent::{casimir_checks as run_casimir, ctg_flow, ctg_generate, max_base_deviation, quarter_turn, CotangentGroupPoint};
use phasegroup::groupoid::pair::pair_generate;
use phasegroup::groupoid::{cotangent::DualFunction, FlowSettings, ScalarField, Side};
use phasegroup::legendre::{oracle_flow, phi_with_steps};
use phasegroup::matgroup::{decompose_left, decompose_right, su_coords, su_from_coords};
use phasegroup::sample::matrix_column_names;
use phasegroup::sampling::{random_sb, random_sl, random_su, random_su_algebra, rng_from_seed, SampleRng};
use phasegroup::{FlowConfig, LagrangianSample, Matrix, MetricData, SpecialLinear, SuElement, TriangularPositive};
use rand::Rng;
use serde_json::json;

use crate::config::{self, CasimirConfig, CompatConfig, DecomposeConfig, EvolveConfig, ExamplesConfig, FeConfig, PhiConfig};
use crate::error::{ensure_within, CliError};
use crate::output::{names, num, nums, Artifacts, RunStamp};
use crate::{CasimirArgs, CompatArgs, DecomposeArgs, EvolveArgs, FeArgs, PhiArgs};

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn matrix_from(j: &phasegroup::MatrixJson) -> Result<Matrix, CliError> {
    Matrix::try_from(j).map_err(CliError::config)
}

/// `count` seeded directions with norms evenly spaced on `[lo, hi]`.
fn su_fan(n: usize, count: usize, lo: f64, hi: f64, rng: &mut SampleRng) -> Vec<SuElement> {
    linspace(lo, hi, count)
        .into_iter()
        .map(|norm| random_su_algebra(n, Some(norm), rng))
        .collect()
}

fn uniform_box(dim: usize, count: usize, half_width: f64, rng: &mut SampleRng) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| half_width * (2.0 * rng.random::<f64>() - 1.0)).collect())
        .collect()
}

pub fn decompose(a: &DecomposeArgs, path: Option<&Path>, seed: Option<u64>, art: &mut Artifacts) -> Result<(), CliError> {
    let mut cfg: DecomposeConfig = config::load(path)?;
    set(&mut cfg.seed, seed);
    set(&mut cfg.n, a.n);
    set(&mut cfg.samples, a.samples);
    set(&mut cfg.tolerance, a.tolerance);
    if let Some(g) = &a.g {
        cfg.g = Some(config::matrix_arg(g)?);
    }
    cfg.validate()?;

    let inputs: Vec<SpecialLinear> = match &cfg.g {
        Some(j) => vec![SpecialLinear::new(matrix_from(j)?).map_err(CliError::config)?],
        None => {
            let mut rng = rng_from_seed(cfg.seed);
            (0..cfg.samples).map(|_| random_sl(cfg.n, &mut rng)).collect()
        }
    };
    let mut rows = Vec::with_capacity(inputs.len());
    let mut worst = 0.0f64;
    for (id, g) in inputs.iter().enumerate() {
        let (u, gl) = decompose_left(g)?;
        let (gr, v) = decompose_right(g)?;
        let scale = g.matrix().frobenius_norm();
        let rl = (u.matrix() * gl.matrix()).distance(g.matrix()) / scale;
        let rr = (gr.matrix() * v.matrix()).distance(g.matrix()) / scale;
        worst = worst.max(rl).max(rr);
        rows.push(vec![id.to_string(), num(scale), num(rl), num(rr)]);
        if cfg.g.is_some() {
            art.json(
                "decompose.json",
                &json!({
                    "u": u.matrix().to_json(),
                    "gamma_left": gl.matrix().to_json(),
                    "gamma_right": gr.matrix().to_json(),
                    "v": v.matrix().to_json(),
                    "left_residual": rl,
                    "right_residual": rr,
                }),
            )?;
        }
    }
    let stamp = RunStamp {
        seed: cfg.seed,
        steps: 0,
        tolerance: cfg.tolerance,
    };
    let header = ["id", "norm", "left_residual", "right_residual"].map(String::from);
    art.csv("decompose.csv", &stamp, &header, &rows)?;
    art.note(format!("decomposed {} matrices, worst relative residual {worst:e}", inputs.len()));
    ensure_within("relative reconstruction residual", worst, cfg.tolerance)
}

pub fn evolve_sun(a: &EvolveArgs, path: Option<&Path>, seed: Option<u64>, art: &mut Artifacts) -> Result<(), CliError> {
    let mut cfg: EvolveConfig = config::load(path)?;
    set(&mut cfg.seed, seed);
    set(&mut cfg.n, a.n);
    set(&mut cfg.epsilon, a.epsilon);
    set(&mut cfg.t, a.t);
    set(&mut cfg.steps, a.steps);
    set(&mut cfg.tolerance, a.tolerance);
    cfg.renormalize |= a.renormalize;
    if let Some(g) = &a.g0 {
        cfg.g0 = Some(config::matrix_arg(g)?);
    }
    cfg.validate()?;

    let g0 = match &cfg.g0 {
        Some(j) => SpecialLinear::new(matrix_from(j)?).map_err(CliError::config)?,
        None => {
            let mut rng = rng_from_seed(cfg.seed);
            let u = random_su::<f64, _>(cfg.n, &mut rng);
            let gamma = random_sb::<f64, _>(cfg.n, cfg.spread, &mut rng);
            let mut m = gamma.matrix().clone();
            for i in 0..cfg.n {
                for j in i + 1..cfg.n {
                    m[(i, j)] = m[(i, j)] * cfg.spread;
                }
            }
            let gamma = TriangularPositive::new(m)?;
            SpecialLinear::new(u.matrix() * gamma.matrix())?
        }
    };
    let flow = FlowConfig {
        epsilon: cfg.epsilon,
        t_final: cfg.t,
        steps: cfg.steps,
        renormalize: cfg.renormalize,
    };
    let rec = evolve(&g0, &flow)?;
    let rows: Vec<Vec<String>> = (0..rec.len())
        .map(|k| {
            nums(&[
                rec.times[k],
                rec.energy[k],
                rec.det_drift[k],
                rec.gamma_l_drift[k],
                rec.gamma_r_drift[k],
            ])
        })
        .collect();
    let stamp = RunStamp {
        seed: cfg.seed,
        steps: cfg.steps,
        tolerance: cfg.tolerance,
    };
    let header = ["t", "H", "detdrift", "gammaLdrift", "gammaRdrift"].map(String::from);
    art.csv("evolve_sun.csv", &stamp, &header, &rows)?;
    let h0 = rec.energy[0];
    let energy_drift = rec.max_energy_drift();
    art.json(
        "evolve_sun_final.json",
        &json!({
            "g0": g0.matrix().to_json(),
            "g": rec.final_point().matrix().to_json(),
            "H0": h0,
            "max_energy_drift": energy_drift,
            "max_det_drift": rec.max_det_drift(),
            "max_gamma_l_drift": rec.max_gamma_l_drift(),
            "max_gamma_r_drift": rec.max_gamma_r_drift(),
        }),
    )?;
    art.note(format!("integrated {} steps, H = {h0}, energy drift {energy_drift:e}", cfg.steps));
    ensure_within("energy drift", energy_drift, cfg.tolerance)?;
    ensure_within("determinant drift", rec.max_det_drift(), cfg.tolerance)?;
    ensure_within("gamma_L drift", rec.max_gamma_l_drift(), cfg.tolerance)?;
    ensure_within("gamma_R drift", rec.max_gamma_r_drift(), cfg.tolerance)
}

pub fn fe_maps(a: &FeArgs, path: Option<&Path>, seed: Option<u64>, art: &mut Artifacts) -> Result<(), CliError> {
    let mut cfg: FeConfig = config::load(path)?;
    set(&mut cfg.seed, seed);
    set(&mut cfg.n, a.n);
    set(&mut cfg.epsilon, a.epsilon);
    set(&mut cfg.samples, a.samples);
    set(&mut cfg.tolerance, a.tolerance);
    cfg.invert |= a.invert;
    cfg.validate()?;

    let d = cfg.n * cfg.n - 1;
    let mut header = vec!["id".to_string()];
    header.extend(names("f", d));
    header.extend(names("e", d));
    if cfg.invert {
        header.push("f_roundtrip".into());
        header.push("e_roundtrip".into());
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut rows = Vec::with_capacity(cfg.samples);
    let mut worst = 0.0f64;
    for id in 0..cfg.samples {
        let gamma = random_sb::<f64, _>(cfg.n, cfg.spread, &mut rng);
        let f = f_map(&gamma, cfg.epsilon);
        let e = e_map(&gamma, cfg.epsilon);
        let mut row = vec![id.to_string()];
        row.extend(nums(&su_coords(f.matrix())));
        row.extend(nums(&su_coords(e.matrix())));
        if cfg.invert {
            let rf = invert_f(&f, cfg.epsilon)?.matrix().distance(gamma.matrix());
            let re = invert_e(&e, cfg.epsilon)?.matrix().distance(gamma.matrix());
            worst = worst.max(rf).max(re);
            row.push(num(rf));
            row.push(num(re));
        }
        rows.push(row);
    }
    let stamp = RunStamp {
        seed: cfg.seed,
        steps: 0,
        tolerance: cfg.tolerance,
    };
    art.csv("fe_maps.csv", &stamp, &header, &rows)?;
    if cfg.invert {
        art.note(format!("{} round trips, worst residual {worst:e}", cfg.samples));
        ensure_within("inverse round trip", worst, cfg.tolerance)?;
    } else {
        art.note(format!("evaluated F and E on {} points", cfg.samples));
    }
    Ok(())
}

pub fn phi(a: &PhiArgs, path: Option<&Path>, seed: Option<u64>, art: &mut Artifacts) -> Result<(), CliError> {
    let mut cfg: PhiConfig = config::load(path)?;
    set(&mut cfg.seed, seed);
    set(&mut cfg.n, a.n);
    set(&mut cfg.c, a.c);
    set(&mut cfg.steps, a.steps);
    set(&mut cfg.tolerance, a.tolerance);
    cfg.oracle |= a.oracle;
    cfg.grid |= a.grid;
    if let Some(e) = &a.eta0 {
        cfg.eta0 = Some(config::matrix_arg(e)?);
    }
    cfg.validate()?;

    let mut rng = rng_from_seed(cfg.seed);
    let n = cfg.eta0.as_ref().map_or(cfg.n, |e| e.n);
    let l = MetricData::new(cfg.c, n).map_err(CliError::config)?;
    let stamp = RunStamp {
        seed: cfg.seed,
        steps: cfg.steps,
        tolerance: cfg.tolerance,
    };

    if cfg.grid {
        let etas = su_fan(n, cfg.grid_points, 0.0, cfg.grid_max_norm, &mut rng);
        let mut header = vec!["eta_id".to_string()];
        header.extend(names("eta", n * n - 1));
        header.extend(matrix_column_names("gamma", n));
        header.push("det_residual".into());
        if cfg.oracle {
            header.push("oracle_distance".into());
        }
        let mut rows = Vec::with_capacity(etas.len());
        let mut worst = 0.0f64;
        for (id, eta) in etas.iter().enumerate() {
            let gamma = phi_with_steps(eta, &l, cfg.steps)?;
            let mut row = vec![id.to_string()];
            row.extend(nums(&su_coords(eta.matrix())));
            row.extend(nums(&gamma.matrix().to_real_vec()));
            row.push(num((gamma.matrix().det().re - 1.0).abs()));
            if cfg.oracle {
                let d = oracle_flow(eta, &l, 1.0, cfg.steps)?.matrix().distance(gamma.matrix());
                worst = worst.max(d);
                row.push(num(d));
            }
            rows.push(row);
        }
        art.csv("phi_grid.csv", &stamp, &header, &rows)?;
        art.note(format!("{} geodesics", etas.len()));
        if cfg.oracle {
            art.note(format!("worst oracle distance {worst:e}"));
            ensure_within("oracle distance", worst, cfg.tolerance)?;
        }
        return Ok(());
    }

    let eta = match &cfg.eta0 {
        Some(j) => SuElement::new(matrix_from(j)?).map_err(CliError::config)?,
        None => random_su_algebra(n, Some(1.0), &mut rng),
    };
    let gamma = phi_with_steps(&eta, &l, cfg.steps)?;
    let mut report = json!({
        "eta0": eta.matrix().to_json(),
        "c": cfg.c,
        "gamma": gamma.matrix().to_json(),
    });
    art.note(serde_json::to_string(&gamma.matrix().to_json()).map_err(std::io::Error::other)?);
    let mut distance = None;
    if cfg.oracle {
        let other = oracle_flow(&eta, &l, 1.0, cfg.steps)?;
        let d = other.matrix().distance(gamma.matrix());
        report["oracle_gamma"] = json!(other.matrix().to_json());
        report["oracle_distance"] = json!(d);
        art.note(format!("oracle distance {d:e}"));
        distance = Some(d);
    }
    art.json("phi.json", &report)?;
    match distance {
        Some(d) => ensure_within("oracle distance", d, cfg.tolerance),
        None => Ok(()),
    }
}

pub fn compat(a: &CompatArgs, path: Option<&Path>, seed: Option<u64>, art: &mut Artifacts) -> Result<(), CliError> {
    let mut cfg: CompatConfig = config::load(path)?;
    set(&mut cfg.seed, seed);
    set(&mut cfg.n, a.n);
    set(&mut cfg.epsilon, a.epsilon);
    set(&mut cfg.c, a.c);
    set(&mut cfg.steps, a.steps);
    set(&mut cfg.directions, a.directions);
    if a.scan.is_some() {
        cfg.scan = a.scan.clone();
    }
    cfg.validate()?;

    let grid: Vec<(f64, f64)> = match &cfg.scan {
        None => vec![(cfg.epsilon, cfg.c)],
        Some(s) => {
            let (e, c) = config::parse_scan(s)?;
            let cs = linspace(c.lo, c.hi, c.steps);
            linspace(e.lo, e.hi, e.steps)
                .into_iter()
                .flat_map(|eps| cs.iter().map(move |&c| (eps, c)))
                .collect()
        }
    };
    let vs = compat_samples::<f64>(cfg.n, cfg.directions, cfg.seed);
    let table = compat_scan(&grid, &vs, cfg.n, cfg.steps)?;
    let stamp = RunStamp {
        seed: cfg.seed,
        steps: cfg.steps,
        tolerance: cfg.tolerance,
    };

    let mut sample_header = vec!["v_id".to_string(), "norm".to_string()];
    sample_header.extend(names("v", cfg.n * cfg.n - 1));
    let sample_rows: Vec<Vec<String>> = vs
        .iter()
        .enumerate()
        .map(|(id, v)| {
            let mut row = vec![id.to_string(), num(v.matrix().frobenius_norm())];
            row.extend(nums(&su_coords(v.matrix())));
            row
        })
        .collect();
    art.csv("compat_samples.csv", &stamp, &sample_header, &sample_rows)?;

    let mut rows = Vec::new();
    for row in &table.rows {
        for (v_id, rep) in row.reports.iter().enumerate() {
            for (k, r) in rep.residuals.iter().enumerate() {
                rows.push(vec![num(row.epsilon), num(row.c), VARIANTS[k].to_string(), v_id.to_string(), num(*r)]);
            }
        }
    }
    let header = ["epsilon", "c", "variant", "v_id", "residual"].map(String::from);
    art.csv("compat.csv", &stamp, &header, &rows)?;

    let ranked: Vec<Vec<String>> = table
        .ranking()
        .into_iter()
        .enumerate()
        .map(|(rank, i)| {
            let r = &table.rows[i];
            let mut row = vec![rank.to_string()];
            row.extend(nums(&[r.epsilon, r.c, r.max_best, r.mean_best, r.shrink_ratio]));
            row
        })
        .collect();
    let header = ["rank", "epsilon", "c", "max_best", "mean_best", "shrink_ratio"].map(String::from);
    art.csv("compat_ranking.csv", &stamp, &header, &ranked)?;

    let best = &table.rows[table.ranking()[0]];
    art.note(format!(
        "{} grid points x {} samples; smallest mean best-variant residual {:e} at epsilon = {}, c = {}",
        grid.len(),
        vs.len(),
        best.mean_best,
        best.epsilon,
        best.c
    ));
    Ok(())
}

pub fn examples(which: u8, path: Option<&Path>, seed: Option<u64>, art: &mut Artifacts) -> Result<(), CliError> {
    let mut cfg: ExamplesConfig = config::load(path)?;
    set(&mut cfg.seed, seed);
    cfg.validate()?;
    let settings = FlowSettings {
        steps: cfg.steps,
        radius: cfg.radius,
    };
    let stamp = RunStamp {
        seed: cfg.seed,
        steps: cfg.steps,
        tolerance: cfg.tolerance,
    };
    let mut rng = rng_from_seed(cfg.seed);
    match which {
        1 => {
            let ex = &cfg.cotangent;
            let x = match &ex.x {
                Some(c) => SuElement::new(su_from_coords(ex.n, c)).map_err(CliError::config)?,
                None => quarter_turn(),
            };
            let fiber = su_fan(ex.n, ex.fiber_points, 0.0, ex.fiber_max_norm, &mut rng);
            let sample = ctg_generate(&DualFunction::linear(&x), ex.side, &fiber, &settings)?;
            art.sample("example1.csv", &stamp, &sample)?;
            let dev = max_base_deviation(&sample, &x);
            art.note(format!("{} fiber points, worst base deviation from exp(X) {dev:e}", sample.len()));
            ensure_within("base deviation from exp(X)", dev, cfg.tolerance)?;
            check_residuals(&sample, cfg.tolerance)
        }
        2 => {
            let ex = &cfg.pair;
            let grid = uniform_box(ex.field.dim(), ex.points, ex.half_width, &mut rng);
            let sample = pair_generate(&ex.field, ex.side, &grid, &settings)?;
            art.sample("example2.csv", &stamp, &sample)?;
            art.note(format!("{} diagonal points", sample.len()));
            check_residuals(&sample, cfg.tolerance)
        }
        _ => {
            let ex = &cfg.constant_poisson;
            let v = ConstantPoissonSpace::from_rows(&ex.r).map_err(CliError::config)?;
            let grid = uniform_box(v.dim(), ex.points, ex.half_width, &mut rng);
            let left = cp_generate_side(&ex.field, &v, Side::Left, &grid, &settings)?;
            let right = cp_generate_side(&ex.field, &v, Side::Right, &grid, &settings)?;
            let lift = phase_lift_graph(&ex.field, &v, &grid, &ex.t_grid, &settings)?;
            art.sample("example3.csv", &stamp, &left)?;
            art.sample("example3_right.csv", &stamp, &right)?;
            art.sample("example3_phase_lift.csv", &stamp, &lift)?;
            let d = cp_left_right_set_distance(&ex.field, &v, &grid, &settings)?;
            art.note(format!("{} unit points, left/right set distance {d:e}", grid.len()));
            ensure_within("left/right set distance", d, cfg.tolerance)?;
            check_residuals(&left, cfg.tolerance)?;
            check_residuals(&right, cfg.tolerance)?;
            check_residuals(&lift, cfg.tolerance)
        }
    }
}

fn check_residuals(sample: &LagrangianSample, tol: f64) -> Result<(), CliError> {
    for (k, name) in sample.residual_names.iter().enumerate() {
        ensure_within(name, sample.max_residual(k), tol)?;
    }
    Ok(())
}

pub fn casimir_checks(a: &CasimirArgs, path: Option<&Path>, seed: Option<u64>, art: &mut Artifacts) -> Result<(), CliError> {
    let mut cfg: CasimirConfig = config::load(path)?;
    set(&mut cfg.seed, seed);
    set(&mut cfg.n, a.n);
    set(&mut cfg.samples, a.samples);
    set(&mut cfg.t, a.t);
    set(&mut cfg.steps, a.steps);
    set(&mut cfg.tolerance, a.tolerance);
    cfg.validate()?;

    let settings = FlowSettings {
        steps: cfg.steps,
        radius: cfg.radius,
    };
    let n = cfg.n;
    let d = n * n - 1;
    let mut rng = rng_from_seed(cfg.seed);
    let mut params = vec!["sample_id".to_string()];
    params.extend(names("m0_", d));
    let mut phase = matrix_column_names("g", n);
    phase.extend(names("m", d));
    let mut sample = LagrangianSample::new(
        params,
        phase,
        vec!["commutation".into(), "isotropy".into(), "matched".into()],
    );
    for (id, norm) in linspace(cfg.min_norm, cfg.max_norm, cfg.samples).into_iter().enumerate() {
        let g = random_su(n, &mut rng);
        let m = random_su_algebra(n, Some(norm), &mut rng);
        let point = CotangentGroupPoint::new(g, m.clone())?;
        let rep = run_casimir(&cfg.f, &cfg.g, std::slice::from_ref(&point), cfg.t, &settings)?;
        let end = ctg_flow(&cfg.f, Side::Left, &CotangentGroupPoint::unit(&m), cfg.t, &settings)?;
        let mut param = vec![id as f64];
        param.extend(su_coords(m.matrix()));
        let mut ph = end.g.matrix().to_real_vec();
        ph.extend(su_coords(end.m.matrix()));
        sample.push(param, ph, vec![rep.commutation, rep.isotropy, rep.matched]);
    }
    art.sample("casimir_checks.csv", &RunStamp {
        seed: cfg.seed,
        steps: cfg.steps,
        tolerance: cfg.tolerance,
    }, &sample)?;
    art.note(format!(
        "{} samples: commutation {:e}, isotropy {:e}, matched {:e}",
        sample.len(),
        sample.max_residual(0),
        sample.max_residual(1),
        sample.max_residual(2)
    ));
    check_residuals(&sample, cfg.tolerance)
}
