//! Matrix groups SL(N,C) = SU(N) . SB(N) and the Manin-triple splitting of
//! sl(N,C) = su(N) + sb(N).
//!
//! Covectors are carried by matrices through the imaginary-trace pairing
//! `<W, Z> = Im tr(W Z)`, under which su(N) and sb(N) are isotropic and
//! mutually dual.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::SquareMatrix;
use crate::scalar::Real;

fn rel_scale<T: Real>(m: &SquareMatrix<T>) -> T {
    T::one().max(m.frobenius_norm())
}

fn membership<T: Real>(what: &'static str, residual: T, tol: T) -> Result<()> {
    if residual <= tol {
        Ok(())
    } else {
        Err(Error::Membership {
            what,
            residual: residual.to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        })
    }
}

fn exact_upper_real_diag<T: Real>(what: &'static str, m: &SquareMatrix<T>) -> Result<()> {
    if m.strict_lower_max() != T::zero() {
        return Err(Error::Membership {
            what,
            residual: m.strict_lower_max().to_f64_lossy(),
            tol: 0.0,
        });
    }
    let im = m.diag().iter().fold(T::zero(), |acc, z| acc.max(z.im.abs()));
    if im != T::zero() {
        return Err(Error::Membership {
            what,
            residual: im.to_f64_lossy(),
            tol: 0.0,
        });
    }
    Ok(())
}

macro_rules! matrix_newtype {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name<T>(SquareMatrix<T>);

        impl<T: Real> $name<T> {
            /// Validate `m` with the default membership tolerance.
            pub fn new(m: SquareMatrix<T>) -> Result<Self> {
                Self::with_tol(m, T::membership_tol())
            }

            pub fn with_tol(m: SquareMatrix<T>, tol: T) -> Result<Self> {
                if !m.is_finite() {
                    return Err(Error::NonFinite(stringify!($name)));
                }
                Self::check(&m, tol)?;
                Ok(Self(m))
            }

            /// Wrap without validation. Callers guarantee membership.
            #[allow(dead_code)]
            pub(crate) fn new_unchecked(m: SquareMatrix<T>) -> Self {
                Self(m)
            }

            #[inline]
            pub fn matrix(&self) -> &SquareMatrix<T> {
                &self.0
            }

            pub fn into_matrix(self) -> SquareMatrix<T> {
                self.0
            }

            #[inline]
            pub fn n(&self) -> usize {
                self.0.n()
            }
        }

        impl<T> AsRef<SquareMatrix<T>> for $name<T> {
            fn as_ref(&self) -> &SquareMatrix<T> {
                &self.0
            }
        }
    };
}

matrix_newtype!(
    /// Element of SL(N,C): `|det - 1| <= tol`.
    SpecialLinearElement
);
matrix_newtype!(
    /// Element of SU(N).
    SpecialUnitaryElement
);
matrix_newtype!(
    /// Element of SB(N): upper triangular, positive real diagonal, det 1.
    TriangularPositiveElement
);
matrix_newtype!(
    /// Element of su(N): anti-Hermitian and traceless.
    AntiHermitianTraceless
);
matrix_newtype!(
    /// Element of sb(N): upper triangular, real traceless diagonal.
    TriangularTracelessReal
);

impl<T: Real> SpecialLinearElement<T> {
    fn check(m: &SquareMatrix<T>, tol: T) -> Result<()> {
        membership("SL(N,C) determinant", Self::residual_of(m), tol)
    }

    pub fn residual_of(m: &SquareMatrix<T>) -> T {
        (m.det() - Complex::one()).norm()
    }

    pub fn identity(n: usize) -> Self {
        Self(SquareMatrix::identity(n))
    }
}

impl<T: Real> SpecialUnitaryElement<T> {
    fn check(m: &SquareMatrix<T>, tol: T) -> Result<()> {
        membership("SU(N)", Self::residual_of(m), tol)
    }

    /// `max(||m^H m - I||_F, |det m - 1|)`
    pub fn residual_of(m: &SquareMatrix<T>) -> T {
        let n = m.n();
        let unit = (&m.adjoint() * m).distance(&SquareMatrix::identity(n));
        unit.max((m.det() - Complex::one()).norm())
    }

    pub fn identity(n: usize) -> Self {
        Self(SquareMatrix::identity(n))
    }

    pub fn to_special_linear(&self) -> SpecialLinearElement<T> {
        SpecialLinearElement(self.0.clone())
    }
}

impl<T: Real> TriangularPositiveElement<T> {
    fn check(m: &SquareMatrix<T>, tol: T) -> Result<()> {
        exact_upper_real_diag("SB(N) shape", m)?;
        if m.diag().iter().any(|z| !(z.re > T::zero())) {
            return Err(Error::Membership {
                what: "SB(N) positive diagonal",
                residual: f64::INFINITY,
                tol: 0.0,
            });
        }
        membership("SB(N) determinant", Self::residual_of(m), tol)
    }

    /// `|prod diag - 1|`; shape conditions are exact and checked separately.
    pub fn residual_of(m: &SquareMatrix<T>) -> T {
        let det = m.diag().iter().fold(T::one(), |acc, z| acc * z.re);
        (det - T::one()).abs()
    }

    pub fn identity(n: usize) -> Self {
        Self(SquareMatrix::identity(n))
    }

    pub fn to_special_linear(&self) -> SpecialLinearElement<T> {
        SpecialLinearElement(self.0.clone())
    }
}

impl<T: Real> AntiHermitianTraceless<T> {
    fn check(m: &SquareMatrix<T>, tol: T) -> Result<()> {
        membership("su(N)", Self::residual_of(m), tol * rel_scale(m))
    }

    pub fn residual_of(m: &SquareMatrix<T>) -> T {
        (m + &m.adjoint()).frobenius_norm().max(m.trace().norm())
    }

    pub fn zero(n: usize) -> Self {
        Self(SquareMatrix::zeros(n))
    }

    /// `i * diag(d)` for a real traceless `d`.
    pub fn from_imag_diag(d: &[T]) -> Result<Self> {
        Self::new(SquareMatrix::from_diag(
            &d.iter().map(|&x| Complex::new(T::zero(), x)).collect::<Vec<_>>(),
        ))
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale_real(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }
}

impl<T: Real> TriangularTracelessReal<T> {
    fn check(m: &SquareMatrix<T>, tol: T) -> Result<()> {
        exact_upper_real_diag("sb(N) shape", m)?;
        membership("sb(N) trace", Self::residual_of(m), tol * rel_scale(m))
    }

    pub fn residual_of(m: &SquareMatrix<T>) -> T {
        m.trace().norm()
    }

    pub fn zero(n: usize) -> Self {
        Self(SquareMatrix::zeros(n))
    }
}

/// Left Iwasawa factorization `g = u gamma`.
///
/// Column-wise orthonormalization with positive-diagonal normalization makes
/// the pair unique.
pub fn decompose_left<T: Real>(
    g: &SpecialLinearElement<T>,
) -> Result<(SpecialUnitaryElement<T>, TriangularPositiveElement<T>)> {
    let (q, r) = linalg::qr_positive(g.matrix())?;
    Ok((SpecialUnitaryElement::new(q)?, TriangularPositiveElement::new(r)?))
}

/// Right Iwasawa factorization `g = gamma u` (row-wise orthonormalization).
pub fn decompose_right<T: Real>(
    g: &SpecialLinearElement<T>,
) -> Result<(TriangularPositiveElement<T>, SpecialUnitaryElement<T>)> {
    let (r, q) = linalg::rq_positive(g.matrix())?;
    Ok((TriangularPositiveElement::new(r)?, SpecialUnitaryElement::new(q)?))
}

/// Real-linear splitting `Z = X + A`, `X` in su(N), `A` in sb(N).
///
/// `X` copies the strictly lower part of `Z`, mirrors it anti-Hermitian into
/// the strictly upper part and keeps `i Im diag Z`; `A = Z - X`.
pub fn iwasawa_split<T: Real>(
    z: &SquareMatrix<T>,
) -> Result<(AntiHermitianTraceless<T>, TriangularTracelessReal<T>)> {
    let tol = T::membership_tol() * rel_scale(z);
    membership("sl(N,C) trace", z.trace().norm(), tol)?;
    let (x, a) = split_unchecked(z);
    Ok((
        AntiHermitianTraceless::new_unchecked(x),
        TriangularTracelessReal::new_unchecked(a),
    ))
}

pub(crate) fn split_unchecked<T: Real>(z: &SquareMatrix<T>) -> (SquareMatrix<T>, SquareMatrix<T>) {
    let n = z.n();
    let mut x = SquareMatrix::<T>::zeros(n);
    for i in 0..n {
        for j in 0..i {
            x[(i, j)] = z[(i, j)];
            x[(j, i)] = -z[(i, j)].conj();
        }
        x[(i, i)] = Complex::new(T::zero(), z[(i, i)].im);
    }
    let mut a = z - &x;
    for i in 0..n {
        for j in 0..i {
            a[(i, j)] = Complex::zero();
        }
        a[(i, i)].im = T::zero();
    }
    (x, a)
}

/// su(N) component of the splitting, without the trace check.
pub(crate) fn su_part<T: Real>(z: &SquareMatrix<T>) -> SquareMatrix<T> {
    split_unchecked(z).0
}

/// `<W, Z> = Im tr(W Z)`.
pub fn pairing<T: Real>(w: &SquareMatrix<T>, z: &SquareMatrix<T>) -> Result<T> {
    w.check_same_size(z)?;
    Ok(pairing_unchecked(w, z))
}

pub(crate) fn pairing_unchecked<T: Real>(w: &SquareMatrix<T>, z: &SquareMatrix<T>) -> T {
    let n = w.n();
    let mut s = T::zero();
    for i in 0..n {
        for k in 0..n {
            s += (w[(i, k)] * z[(k, i)]).im;
        }
    }
    s
}

/// Identification of the annihilator of sb(N) with su(N).
///
/// Under the imaginary-trace realization this is the identity on matrix
/// representatives; it exists so every call site states which side of the
/// duality it is on.
pub fn dual_identify<T: Real>(w: &AntiHermitianTraceless<T>) -> AntiHermitianTraceless<T> {
    w.clone()
}

pub fn matrix_exp<T: Real>(z: &SquareMatrix<T>) -> SquareMatrix<T> {
    linalg::expm(z)
}

/// Real basis of su(N), ordered: for each `i < j` the pair
/// `E_ij - E_ji`, `i(E_ij + E_ji)`; then `i(E_kk - E_{k+1,k+1})`.
pub fn su_basis<T: Real>(n: usize) -> Vec<SquareMatrix<T>> {
    let i_unit = Complex::new(T::zero(), T::one());
    let mut basis = Vec::with_capacity(n * n - 1);
    for i in 0..n {
        for j in i + 1..n {
            let mut a = SquareMatrix::zeros(n);
            a[(i, j)] = Complex::one();
            a[(j, i)] = -Complex::<T>::one();
            basis.push(a);
            let mut b = SquareMatrix::zeros(n);
            b[(i, j)] = i_unit;
            b[(j, i)] = i_unit;
            basis.push(b);
        }
    }
    for k in 0..n - 1 {
        let mut d = SquareMatrix::zeros(n);
        d[(k, k)] = i_unit;
        d[(k + 1, k + 1)] = -i_unit;
        basis.push(d);
    }
    basis
}

/// Real basis of sb(N): for each `i < j` the pair `E_ij`, `i E_ij`; then
/// `E_kk - E_{k+1,k+1}`.
pub fn sb_basis<T: Real>(n: usize) -> Vec<SquareMatrix<T>> {
    let i_unit = Complex::new(T::zero(), T::one());
    let mut basis = Vec::with_capacity(n * n - 1);
    for i in 0..n {
        for j in i + 1..n {
            let mut a = SquareMatrix::zeros(n);
            a[(i, j)] = Complex::one();
            basis.push(a);
            let mut b = SquareMatrix::zeros(n);
            b[(i, j)] = i_unit;
            basis.push(b);
        }
    }
    for k in 0..n - 1 {
        let mut d = SquareMatrix::zeros(n);
        d[(k, k)] = Complex::one();
        d[(k + 1, k + 1)] = -Complex::<T>::one();
        basis.push(d);
    }
    basis
}

/// Coordinates of an su(N) element in [`su_basis`] (which is orthogonal for
/// the real Frobenius inner product).
pub fn su_coords<T: Real>(x: &SquareMatrix<T>) -> Vec<T> {
    let n = x.n();
    let mut c = Vec::with_capacity(n * n - 1);
    for i in 0..n {
        for j in i + 1..n {
            let z = x[(i, j)];
            c.push(z.re);
            c.push(z.im);
        }
    }
    // i diag(d) with d = sum_k c_k (e_k - e_{k+1}) gives d_0 = c_0,
    // d_k = c_k - c_{k-1}, so c_k = d_0 + ... + d_k.
    let mut acc = T::zero();
    for k in 0..n - 1 {
        acc += x[(k, k)].im;
        c.push(acc);
    }
    c
}

pub fn su_from_coords<T: Real>(n: usize, c: &[T]) -> SquareMatrix<T> {
    assert_eq!(c.len(), n * n - 1, "su(N) coordinate count");
    su_basis::<T>(n)
        .iter()
        .zip(c)
        .fold(SquareMatrix::zeros(n), |acc, (b, &ck)| &acc + &b.scale_real(ck))
}

/// Polar projection onto U(N) followed by a determinant phase fix.
pub fn project_unitary<T: Real>(m: &SquareMatrix<T>) -> Result<SpecialUnitaryElement<T>> {
    let n = m.n();
    let half = T::lit(0.5);
    let mut x = m.clone();
    for _ in 0..50 {
        let next = (&x + &x.inverse()?.adjoint()).scale_real(half);
        let delta = next.distance(&x);
        x = next;
        if delta <= T::epsilon() * T::lit(10.0) {
            break;
        }
    }
    let det = x.det();
    let phase = Complex::from_polar(T::one(), -det.arg() / T::lit(n as f64));
    SpecialUnitaryElement::new(x.scale(phase))
}

/// Rescale the diagonal of an upper-triangular positive matrix to det 1.
pub fn rescale_triangular<T: Real>(m: &SquareMatrix<T>) -> Result<TriangularPositiveElement<T>> {
    let n = m.n();
    let det = m.diag().iter().fold(T::one(), |acc, z| acc * z.re);
    if !(det > T::zero()) {
        return Err(Error::InvalidArgument("non-positive triangular determinant".into()));
    }
    let s = det.powf(-T::one() / T::lit(n as f64));
    TriangularPositiveElement::new(m.scale_real(s))
}

/// Re-project `g` onto SL(N,C) through its left factorization.
pub fn renormalize<T: Real>(g: &SquareMatrix<T>) -> Result<SpecialLinearElement<T>> {
    let (q, r) = linalg::qr_positive(g)?;
    let u = project_unitary(&q)?;
    let gamma = rescale_triangular(&r)?;
    Ok(SpecialLinearElement::new_unchecked(u.matrix() * gamma.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = SquareMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_decomposes_trivially() {
        let g = SpecialLinearElement::<f64>::identity(3);
        let (u, gamma) = decompose_left(&g).unwrap();
        assert!(u.matrix().distance(&M::identity(3)) < 1e-15);
        assert!(gamma.matrix().distance(&M::identity(3)) < 1e-15);
        let (gamma, u) = decompose_right(&g).unwrap();
        assert!(u.matrix().distance(&M::identity(3)) < 1e-15);
        assert!(gamma.matrix().distance(&M::identity(3)) < 1e-15);
    }

    #[test]
    fn triangular_input_is_its_own_factor() {
        let d = M::from_real_diag(&[2.0, 0.5]);
        let g = SpecialLinearElement::new(d.clone()).unwrap();
        let (u, gamma) = decompose_left(&g).unwrap();
        assert!(u.matrix().distance(&M::identity(2)) < 1e-15);
        assert!(gamma.matrix().distance(&d) < 1e-15);
        let (gamma, u) = decompose_right(&g).unwrap();
        assert!(u.matrix().distance(&M::identity(2)) < 1e-15);
        assert!(gamma.matrix().distance(&d) < 1e-15);
    }

    #[test]
    fn singular_input_rejected() {
        let g = SpecialLinearElement::new_unchecked(M::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap());
        assert_eq!(decompose_left(&g).err(), Some(Error::Singular));
        assert!(SpecialLinearElement::new(g.into_matrix()).is_err());
    }

    #[test]
    fn split_examples() {
        // su input stays in su
        let z = M::from_rows(vec![vec![c(0.0, 1.0), c(1.0, 2.0)], vec![c(-1.0, 2.0), c(0.0, -1.0)]]).unwrap();
        let (x, a) = iwasawa_split(&z).unwrap();
        assert_eq!(x.matrix(), &z);
        assert_eq!(a.matrix(), &M::zeros(2));

        let e12 = M::unit(2, 0, 1);
        let (x, a) = iwasawa_split(&e12).unwrap();
        assert_eq!(x.matrix(), &M::zeros(2));
        assert_eq!(a.matrix(), &e12);

        let e21 = M::unit(2, 1, 0);
        let (x, a) = iwasawa_split(&e21).unwrap();
        assert_eq!(x.matrix(), &(&e21 - &e12));
        assert_eq!(a.matrix(), &e12);

        assert!(iwasawa_split(&M::identity(2)).is_err());
    }

    #[test]
    fn pairing_examples() {
        let w = M::from_diag(&[c(0.0, 1.0), c(0.0, -1.0)]);
        let z = M::from_real_diag(&[1.0, -1.0]);
        assert_eq!(pairing(&w, &z).unwrap(), 2.0);
        let su = su_basis::<f64>(2);
        let sb = sb_basis::<f64>(2);
        for a in &su {
            for b in &su {
                assert_eq!(pairing(a, b).unwrap(), 0.0);
            }
        }
        for a in &sb {
            for b in &sb {
                assert_eq!(pairing(a, b).unwrap(), 0.0);
            }
        }
        assert!(pairing(&M::zeros(2), &M::zeros(3)).is_err());
    }

    #[test]
    fn dual_identify_is_identity_on_representatives() {
        let zero = AntiHermitianTraceless::<f64>::zero(2);
        assert_eq!(dual_identify(&zero), zero);
        let h = AntiHermitianTraceless::from_imag_diag(&[1.0, -1.0]).unwrap();
        assert_eq!(dual_identify(&h), h);
        let r = AntiHermitianTraceless::new(&M::unit(2, 0, 1).scale(c(0.0, 1.0)) - &M::unit(2, 1, 0).scale(c(0.0, 1.0)));
        // i(E12 - E21) is Hermitian, so it is not a valid su element
        assert!(r.is_err());
        let s = AntiHermitianTraceless::new(&M::unit(2, 0, 1) - &M::unit(2, 1, 0)).unwrap();
        assert_eq!(dual_identify(&s), s);
    }

    #[test]
    fn su_coordinates_round_trip() {
        let coords = [0.3, -1.2, 0.7, 2.0, -0.4, 1.1, 0.9, -0.6];
        let x = su_from_coords::<f64>(3, &coords);
        AntiHermitianTraceless::new(x.clone()).unwrap();
        let back = su_coords(&x);
        for (a, b) in coords.iter().zip(&back) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn membership_checks() {
        assert!(TriangularPositiveElement::new(M::from_real_diag(&[2.0, 0.5])).is_ok());
        assert!(TriangularPositiveElement::new(M::from_real_diag(&[-2.0, -0.5])).is_err());
        assert!(TriangularPositiveElement::new(M::from_real_rows(&[&[1.0, 0.0], &[1e-30, 1.0]]).unwrap()).is_err());
        assert!(TriangularTracelessReal::new(M::from_real_diag(&[1.0, -1.0])).is_ok());
        assert!(TriangularTracelessReal::new(M::from_real_diag(&[1.0, 1.0])).is_err());
        assert!(SpecialUnitaryElement::new(M::from_real_diag(&[2.0, 0.5])).is_err());
    }

    #[test]
    fn renormalize_restores_membership() {
        let g = M::from_rows(vec![vec![c(1.0, 0.1), c(0.2, 0.0)], vec![c(0.0, 0.3), c(1.05, 0.0)]]).unwrap();
        let r = renormalize(&g).unwrap();
        assert!(SpecialLinearElement::residual_of(r.matrix()) < 1e-13);
    }

    #[test]
    fn works_in_single_precision() {
        let g = SpecialLinearElement::<f32>::new(SquareMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]).unwrap())
            .unwrap();
        let (u, gamma) = decompose_left(&g).unwrap();
        assert!((u.matrix() * gamma.matrix()).distance(g.matrix()) < 1e-5);
    }
}
