//! Compatibility of the Hamiltonian section with the Legendre map.
//!
//! The reduced condition compares the SB(N) element obtained by inverting
//! `E` at `v` with the geodesic endpoint `phi(v)`. The minus sign in front of
//! the inverse can be placed on the argument or on `eps`, so every reading is
//! evaluated and reported separately.

use rand::Rng;

use crate::dynamics::invert_e;
use crate::error::Result;
use crate::legendre::{phi_with_steps, MetricData, DEFAULT_STEPS};
use crate::matgroup::{dual_identify, AntiHermitianTraceless, TriangularPositiveElement};
use crate::sampling::{random_su_algebra, rng_from_seed};
use crate::scalar::Real;

/// Labels of the sign readings, in report order.
pub const VARIANTS: [&str; 3] = ["inv_e_neg_v", "inv_e_v", "inv_e_v_neg_eps"];

/// Frobenius norms of the default `v` samples.
pub const SAMPLE_NORMS: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

#[derive(Clone, Debug, PartialEq)]
pub struct CompatReport<T> {
    pub v: AntiHermitianTraceless<T>,
    /// One entry per label in [`VARIANTS`].
    pub lhs_variants: Vec<TriangularPositiveElement<T>>,
    /// `phi(v)`
    pub rhs: TriangularPositiveElement<T>,
    pub residuals: Vec<T>,
    pub epsilon: T,
    pub c: T,
}

impl<T: Real> CompatReport<T> {
    /// Smallest residual and the index of the variant attaining it (first on ties).
    pub fn best(&self) -> (usize, T) {
        self.residuals
            .iter()
            .copied()
            .enumerate()
            .fold((0, T::infinity()), |b, (k, r)| if r < b.1 { (k, r) } else { b })
    }
}

pub fn compat_residual<T: Real>(v: &AntiHermitianTraceless<T>, epsilon: T, l: &MetricData<T>) -> Result<CompatReport<T>> {
    compat_residual_with_steps(v, epsilon, l, DEFAULT_STEPS)
}

pub fn compat_residual_with_steps<T: Real>(
    v: &AntiHermitianTraceless<T>,
    epsilon: T,
    l: &MetricData<T>,
    steps: usize,
) -> Result<CompatReport<T>> {
    let rhs = phi_with_steps(&dual_identify(v), l, steps)?;
    let lhs_variants = vec![
        invert_e(&v.scale(-T::one()), epsilon)?,
        invert_e(v, epsilon)?,
        invert_e(v, -epsilon)?,
    ];
    let residuals = lhs_variants.iter().map(|g| g.matrix().distance(rhs.matrix())).collect();
    Ok(CompatReport {
        v: v.clone(),
        lhs_variants,
        rhs,
        residuals,
        epsilon,
        c: l.c,
    })
}

/// Seeded `v` samples: `directions` random unit directions in su(N), each
/// scaled to every norm in [`SAMPLE_NORMS`]. Ordered direction-major.
pub fn compat_samples<T: Real>(n: usize, directions: usize, seed: u64) -> Vec<AntiHermitianTraceless<T>> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(directions * SAMPLE_NORMS.len());
    for _ in 0..directions {
        let dir = random_su_algebra::<T, _>(n, Some(1.0), &mut rng);
        // keep the stream position independent of the norm list
        let _: u64 = rng.random();
        for &s in &SAMPLE_NORMS {
            out.push(dir.scale(T::lit(s)));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow<T> {
    pub epsilon: T,
    pub c: T,
    /// Over the samples, of the best-variant residual.
    pub max_best: T,
    pub mean_best: T,
    /// Mean best-variant residual at `v / 10` divided by the one at `v`;
    /// below one when agreement improves towards the origin.
    pub shrink_ratio: T,
    pub reports: Vec<CompatReport<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanTable<T> {
    /// In grid order.
    pub rows: Vec<ScanRow<T>>,
}

impl<T: Real> ScanTable<T> {
    /// Row indices sorted by mean best-variant residual (stable in grid order).
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by(|&a, &b| {
            self.rows[a]
                .mean_best
                .partial_cmp(&self.rows[b].mean_best)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        idx
    }
}

/// Evenly spaced `steps` points from `lo` to `hi` inclusive (`lo` alone when `steps == 1`).
pub fn linspace<T: Real>(lo: T, hi: T, steps: usize) -> Vec<T> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|k| lo + (hi - lo) * T::lit(k as f64) / T::lit((steps - 1) as f64))
            .collect(),
    }
}

/// Evaluate every `(eps, c)` pair of `grid` on the sample set `vs`.
pub fn compat_scan<T: Real>(grid: &[(T, T)], vs: &[AntiHermitianTraceless<T>], n: usize, steps: usize) -> Result<ScanTable<T>> {
    let mut rows = Vec::with_capacity(grid.len());
    for &(epsilon, c) in grid {
        let l = MetricData::new(c, n)?;
        let mut reports = Vec::with_capacity(vs.len());
        let mut shrunk = T::zero();
        for v in vs {
            reports.push(compat_residual_with_steps(v, epsilon, &l, steps)?);
            shrunk += compat_residual_with_steps(&v.scale(T::lit(0.1)), epsilon, &l, steps)?.best().1;
        }
        let count = T::lit(vs.len().max(1) as f64);
        let bests: Vec<T> = reports.iter().map(|r| r.best().1).collect();
        let max_best = bests.iter().copied().fold(T::zero(), T::max);
        let sum = bests.iter().copied().fold(T::zero(), |a, b| a + b);
        let mean_best = sum / count;
        let shrink_ratio = if sum > T::zero() { shrunk / sum } else { T::zero() };
        rows.push(ScanRow {
            epsilon,
            c,
            max_best,
            mean_best,
            shrink_ratio,
            reports,
        });
    }
    Ok(ScanTable { rows })
}
