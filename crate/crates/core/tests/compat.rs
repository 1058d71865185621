use phasegroup::compat::{compat_residual, compat_residual_with_steps, compat_samples, compat_scan, linspace, VARIANTS};
use phasegroup::dynamics::e_map;
use phasegroup::legendre::{phi, MetricData};
use phasegroup::matgroup::{su_from_coords, AntiHermitianTraceless};
use proptest::prelude::*;

fn su(coords: &[f64]) -> AntiHermitianTraceless<f64> {
    AntiHermitianTraceless::new(su_from_coords(2, coords)).unwrap()
}

#[test]
fn zero_agrees_under_every_variant() {
    for n in 2..=3 {
        let r = compat_residual(&AntiHermitianTraceless::<f64>::zero(n), 1.0, &MetricData::standard(n)).unwrap();
        for (k, x) in r.residuals.iter().enumerate() {
            assert!(*x < 1e-10, "{}", VARIANTS[k]);
        }
    }
}

#[test]
fn compatibility_fails_at_unit_norm() {
    // the best variant still misses by more than 1e-3 somewhere on the unit sphere
    let l = MetricData::standard(2);
    let vs = compat_samples::<f64>(2, 8, 7);
    let worst = vs
        .iter()
        .filter(|v| (v.matrix().frobenius_norm() - 1.0).abs() < 1e-12)
        .map(|v| compat_residual(v, 1.0, &l).unwrap().best().1)
        .fold(0.0, f64::max);
    assert!(worst > 1e-3, "{worst:e}");
    let diag = compat_residual(&su(&[0.0, 0.0, 1.0 / 2f64.sqrt()]), 1.0, &l).unwrap();
    assert!(diag.best().1 > 1e-3);
}

#[test]
fn report_pieces_are_consistent() {
    let l = MetricData::standard(2);
    let v = su(&[0.3, -0.2, 0.5]);
    let r = compat_residual(&v, 1.0, &l).unwrap();
    // each variant is a genuine preimage under E of its own argument
    let args = [(v.scale(-1.0), 1.0), (v.clone(), 1.0), (v.clone(), -1.0)];
    for (g, (x, eps)) in r.lhs_variants.iter().zip(&args) {
        assert!(e_map(g, *eps).matrix().distance(x.matrix()) < 1e-12);
    }
    assert!(r.rhs.matrix().distance(phi(&v, &l).unwrap().matrix()) < 1e-14);
    for (g, res) in r.lhs_variants.iter().zip(&r.residuals) {
        assert!((g.matrix().distance(r.rhs.matrix()) - res).abs() < 1e-15);
    }
    assert_eq!(r.lhs_variants[0], r.lhs_variants[2]);
}

#[test]
fn residual_shrinks_with_the_input() {
    let l = MetricData::standard(2);
    let dir = su(&[0.6, 0.0, -0.8]);
    let mut prev = f64::INFINITY;
    for s in [1.0, 0.3, 0.1, 0.03, 0.01] {
        let r = compat_residual(&dir.scale(s), 1.0, &l).unwrap().best().1;
        assert!(r < prev);
        prev = r;
    }
    assert!(prev < 1e-2);
}

#[test]
fn samples_are_deterministic() {
    let a = compat_samples::<f64>(3, 5, 42);
    let b = compat_samples::<f64>(3, 5, 42);
    assert_eq!(a, b);
    assert_eq!(a.len(), 20);
    assert_ne!(a, compat_samples::<f64>(3, 5, 43));
}

#[test]
fn scan_table_matches_direct_evaluation() {
    let vs = compat_samples::<f64>(2, 2, 1);
    let grid: Vec<(f64, f64)> = linspace(0.5, 1.5, 3).into_iter().map(|e| (e, 1.0)).collect();
    let table = compat_scan(&grid, &vs, 2, 200).unwrap();
    assert_eq!(table.rows.len(), 3);
    for row in &table.rows {
        let l = MetricData::new(row.c, 2).unwrap();
        for (v, rep) in vs.iter().zip(&row.reports) {
            let direct = compat_residual_with_steps(v, row.epsilon, &l, 200).unwrap();
            assert_eq!(direct.residuals, rep.residuals);
        }
        assert!(row.mean_best <= row.max_best);
    }
    let rank = table.ranking();
    for w in rank.windows(2) {
        assert!(table.rows[w[0]].mean_best <= table.rows[w[1]].mean_best);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn residuals_are_finite_and_nonnegative(a in -1.0f64..1.0, b in -1.0f64..1.0, d in -1.0f64..1.0, eps in 0.2f64..3.0) {
        let r = compat_residual_with_steps(&su(&[a, b, d]), eps, &MetricData::standard(2), 200).unwrap();
        prop_assert!(r.residuals.iter().all(|x| x.is_finite() && *x >= 0.0));
    }
}
