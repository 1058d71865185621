//! Seeded random elements of the groups and algebras.
//!
//! All generators take an explicit RNG so that runs are reproducible from a
//! single `u64` seed (see [`rng_from_seed`]).

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matgroup::{
    decompose_left, su_basis, AntiHermitianTraceless, SpecialLinearElement, SpecialUnitaryElement,
    TriangularPositiveElement,
};
use crate::matrix::SquareMatrix;
use crate::scalar::Real;

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal<T: Real, R: Rng>(rng: &mut R) -> T {
    let x: f64 = rng.sample(StandardNormal);
    T::lit(x)
}

/// Complex Ginibre matrix scaled to unit determinant.
pub fn random_sl<T: Real, R: Rng>(n: usize, rng: &mut R) -> SpecialLinearElement<T> {
    loop {
        let m = SquareMatrix::<T>::from_fn(n, |_, _| Complex::new(normal(rng), normal(rng)));
        let det = m.det();
        if det.norm() < T::lit(1e-3) {
            continue;
        }
        let root = Complex::from_polar(
            det.norm().powf(T::one() / T::lit(n as f64)),
            det.arg() / T::lit(n as f64),
        );
        let g = m.scale(root.inv());
        if let Ok(g) = SpecialLinearElement::new(g) {
            return g;
        }
    }
}

/// Haar-distributed element of SU(N) (unitary factor of a Ginibre matrix).
pub fn random_su<T: Real, R: Rng>(n: usize, rng: &mut R) -> SpecialUnitaryElement<T> {
    loop {
        if let Ok((u, _)) = decompose_left(&random_sl::<T, R>(n, rng)) {
            return u;
        }
    }
}

/// Element of SB(N) with standard normal strictly upper entries and
/// log-diagonal of standard deviation `log_spread`.
pub fn random_sb<T: Real, R: Rng>(n: usize, log_spread: f64, rng: &mut R) -> TriangularPositiveElement<T> {
    let mut logs: Vec<T> = (0..n).map(|_| normal::<T, R>(rng) * T::lit(log_spread)).collect();
    let mean = logs.iter().fold(T::zero(), |a, &b| a + b) / T::lit(n as f64);
    for l in &mut logs {
        *l -= mean;
    }
    let mut m = SquareMatrix::<T>::zeros(n);
    for i in 0..n {
        m[(i, i)] = Complex::new(logs[i].exp(), T::zero());
        for j in i + 1..n {
            m[(i, j)] = Complex::new(normal(rng), normal(rng));
        }
    }
    TriangularPositiveElement::new(m).expect("diagonal normalized to unit determinant")
}

/// su(N) element with i.i.d. standard normal coordinates in the su basis,
/// rescaled to Frobenius norm `norm` when given.
pub fn random_su_algebra<T: Real, R: Rng>(n: usize, norm: Option<f64>, rng: &mut R) -> AntiHermitianTraceless<T> {
    let x = su_basis::<T>(n)
        .iter()
        .fold(SquareMatrix::zeros(n), |acc, b| &acc + &b.scale_real(normal(rng)));
    let x = match norm {
        Some(target) => {
            let f = x.frobenius_norm();
            if f > T::zero() {
                x.scale_real(T::lit(target) / f)
            } else {
                x
            }
        }
        None => x,
    };
    AntiHermitianTraceless::new(x).expect("basis combination is in su(N)")
}
