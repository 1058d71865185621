//! Dense factorization kernels used by the group code.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::Real;

/// `A = Q R` with `Q` unitary and `R` upper triangular with a real positive
/// diagonal. The strictly lower part of `R` is exactly zero.
pub fn qr_positive<T: Real>(a: &SquareMatrix<T>) -> Result<(SquareMatrix<T>, SquareMatrix<T>)> {
    if !a.is_finite() {
        return Err(Error::NonFinite("qr input"));
    }
    let n = a.n();
    let scale = a.frobenius_norm();
    let mut r = a.clone();
    let mut q = SquareMatrix::<T>::identity(n);
    let two = T::lit(2.0);

    for k in 0..n.saturating_sub(1) {
        let xnorm = (k..n).fold(T::zero(), |acc, i| acc + r[(i, k)].norm_sqr()).sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > T::zero() {
            x0 / x0.norm()
        } else {
            Complex::one()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<Complex<T>> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for z in &mut v {
            *z = *z / vnorm;
        }
        // R <- (I - 2 v v^H) R on rows k..n
        for j in k..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(Complex::<T>::zero(), |acc, (t, vi)| acc + vi.conj() * r[(k + t, j)]);
            for (t, vi) in v.iter().enumerate() {
                let upd = *vi * dot * two;
                r[(k + t, j)] -= upd;
            }
        }
        // Q <- Q (I - 2 v v^H) on columns k..n
        for i in 0..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(Complex::<T>::zero(), |acc, (t, vi)| acc + q[(i, k + t)] * *vi);
            for (t, vi) in v.iter().enumerate() {
                let upd = dot * vi.conj() * two;
                q[(i, k + t)] -= upd;
            }
        }
    }

    let tiny = T::epsilon() * scale * T::lit(n as f64);
    for k in 0..n {
        let d = r[(k, k)];
        let m = d.norm();
        if !(m > tiny) {
            return Err(Error::Singular);
        }
        let phase = d / m;
        // row k of R times conj(phase), column k of Q times phase
        for j in k..n {
            r[(k, j)] = r[(k, j)] * phase.conj();
        }
        r[(k, k)] = Complex::new(m, T::zero());
        for i in 0..n {
            q[(i, k)] = q[(i, k)] * phase;
        }
        for i in k + 1..n {
            r[(i, k)] = Complex::zero();
        }
    }
    Ok((q, r))
}

/// Reversal permutation applied on both sides: `J A J`.
pub(crate) fn flip<T: Real>(a: &SquareMatrix<T>) -> SquareMatrix<T> {
    let n = a.n();
    SquareMatrix::from_fn(n, |i, j| a[(n - 1 - i, n - 1 - j)])
}

/// `A = R Q` with `R` upper triangular (positive real diagonal) and `Q` unitary.
pub fn rq_positive<T: Real>(a: &SquareMatrix<T>) -> Result<(SquareMatrix<T>, SquareMatrix<T>)> {
    // J A^T J = (J Q^T J)(J R^T J) is a QR factorization.
    let (q1, r1) = qr_positive(&flip(&a.transpose()))?;
    let r = flip(&r1).transpose();
    let q = flip(&q1).transpose();
    Ok((r, q))
}

/// Lower Cholesky factor `L` with `P = L L^H`, `P` Hermitian positive definite.
/// Only the lower triangle of `P` is read.
pub fn cholesky_lower<T: Real>(p: &SquareMatrix<T>) -> Result<SquareMatrix<T>> {
    let n = p.n();
    let mut l = SquareMatrix::<T>::zeros(n);
    for j in 0..n {
        let mut d = p[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > T::zero()) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex::new(ljj, T::zero());
        for i in j + 1..n {
            let mut s = p[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Upper factor `U` with `P = U U^H` (positive real diagonal).
pub fn cholesky_upper_outer<T: Real>(p: &SquareMatrix<T>) -> Result<SquareMatrix<T>> {
    let l = cholesky_lower(&flip(p))?;
    Ok(flip(&l))
}

/// `log det P` for Hermitian positive definite `P`, together with `tr(P^-1)`.
pub fn logdet_and_trace_inv<T: Real>(p: &SquareMatrix<T>) -> Result<(T, T)> {
    let l = cholesky_lower(p)?;
    let n = p.n();
    let logdet = (0..n).fold(T::zero(), |acc, i| acc + l[(i, i)].re.ln()) * T::lit(2.0);
    // tr(P^-1) = ||L^-1||_F^2
    let mut tr = T::zero();
    for j in 0..n {
        // forward solve L y = e_j
        let mut y = vec![Complex::<T>::zero(); n];
        y[j] = Complex::one();
        for i in j..n {
            let mut s = y[i];
            for k in j..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
            tr += y[i].norm_sqr();
        }
    }
    Ok((logdet, tr))
}

const PADE6: [f64; 7] = [
    1.0,
    0.5,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

/// Matrix exponential by scaling and squaring with a diagonal [6/6] Padé
/// kernel. After scaling `||A / 2^s||_F <= 1/2`.
pub fn expm<T: Real>(a: &SquareMatrix<T>) -> SquareMatrix<T> {
    let n = a.n();
    let norm = a.frobenius_norm();
    assert!(norm.is_finite(), "expm of non-finite matrix");
    let half = T::lit(0.5);
    let mut s = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > half {
        scaled_norm = scaled_norm * half;
        s += 1;
    }
    let x = a.scale_real(T::lit(0.5f64.powi(s as i32)));

    let mut num = SquareMatrix::<T>::identity(n);
    let mut den = SquareMatrix::<T>::identity(n);
    let mut pow = SquareMatrix::<T>::identity(n);
    for (k, &ck) in PADE6.iter().enumerate().skip(1) {
        pow = &pow * &x;
        let term = pow.scale_real(T::lit(ck));
        num = &num + &term;
        den = if k % 2 == 0 { &den + &term } else { &den - &term };
    }
    let mut e = den
        .solve(&num)
        .expect("Pade denominator is well conditioned after scaling");
    for _ in 0..s {
        e = &e * &e;
    }
    e
}

/// Solve the real dense system `a x = b` (`a` row-major `m x m`).
pub fn solve_real<T: Real>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    let m = b.len();
    if a.len() != m * m {
        return Err(Error::DimensionMismatch {
            expected: m * m,
            got: a.len(),
        });
    }
    let mut a = a.to_vec();
    let mut x = b.to_vec();
    let scale = a.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    for k in 0..m {
        let (p, pivot) = (k..m)
            .map(|i| (i, a[i * m + k].abs()))
            .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot > T::epsilon() * scale * T::lit(m as f64)) {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..m {
                a.swap(k * m + j, p * m + j);
            }
            x.swap(k, p);
        }
        for i in k + 1..m {
            let l = a[i * m + k] / a[k * m + k];
            for j in k..m {
                let t = a[k * m + j];
                a[i * m + j] -= l * t;
            }
            let xk = x[k];
            x[i] -= l * xk;
        }
    }
    for i in (0..m).rev() {
        let mut s = x[i];
        for j in i + 1..m {
            s -= a[i * m + j] * x[j];
        }
        x[i] = s / a[i * m + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = SquareMatrix<f64>;

    fn sample(n: usize, seed: u64) -> M {
        // small deterministic LCG, enough for fixed unit-test inputs
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        M::from_fn(n, |_, _| Complex::new(next(), next()))
    }

    #[test]
    fn qr_reconstructs_with_positive_diagonal() {
        for n in 1..=5 {
            let a = sample(n, n as u64);
            let (q, r) = qr_positive(&a).unwrap();
            assert!((&q * &r).distance(&a) < 1e-13 * a.frobenius_norm());
            assert!((&q.adjoint() * &q).distance(&M::identity(n)) < 1e-13);
            for k in 0..n {
                assert!(r[(k, k)].re > 0.0 && r[(k, k)].im == 0.0);
            }
            assert_eq!(r.strict_lower_max(), 0.0);
        }
    }

    #[test]
    fn rq_reconstructs() {
        let a = sample(4, 11);
        let (r, q) = rq_positive(&a).unwrap();
        assert!((&r * &q).distance(&a) < 1e-13 * a.frobenius_norm());
        assert_eq!(r.strict_lower_max(), 0.0);
        assert!((&q * &q.adjoint()).distance(&M::identity(4)) < 1e-13);
    }

    #[test]
    fn qr_rejects_singular() {
        let a = M::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert_eq!(qr_positive(&a).err(), Some(Error::Singular));
    }

    #[test]
    fn cholesky_variants() {
        let b = sample(3, 5);
        let p = &(&b * &b.adjoint()) + &M::identity(3);
        let l = cholesky_lower(&p).unwrap();
        assert!((&l * &l.adjoint()).distance(&p) < 1e-13);
        let u = cholesky_upper_outer(&p).unwrap();
        assert_eq!(u.strict_lower_max(), 0.0);
        assert!((&u * &u.adjoint()).distance(&p) < 1e-13);
        let neg = M::from_real_diag(&[1.0, -1.0]);
        assert_eq!(cholesky_lower(&neg).err(), Some(Error::NotPositiveDefinite));
    }

    #[test]
    fn logdet_matches_lu() {
        let b = sample(3, 9);
        let p = &(&b * &b.adjoint()) + &M::identity(3);
        let (ld, tr) = logdet_and_trace_inv(&p).unwrap();
        assert!((ld - p.det().re.ln()).abs() < 1e-12);
        assert!((tr - p.inverse().unwrap().trace().re).abs() < 1e-12);
    }

    #[test]
    fn expm_zero_and_diagonal() {
        assert_eq!(expm(&M::zeros(3)), M::identity(3));
        let a = 1.3;
        let e = expm(&M::from_real_diag(&[a, -a]));
        assert!((e[(0, 0)].re - a.exp()).abs() < 1e-13 * a.exp());
        assert!((e[(1, 1)].re - (-a).exp()).abs() < 1e-15);
        assert_eq!(e[(0, 1)], Complex::zero());
    }

    #[test]
    fn solve_real_small_system() {
        let a: [f64; 4] = [2.0, 1.0, 1.0, 3.0];
        let x = solve_real(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        assert_eq!(solve_real(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0]).err(), Some(Error::Singular));
    }
}
