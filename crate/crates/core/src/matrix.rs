//! Dense square complex matrices.
//!
//! Everything in the crate (group elements, Lie algebra elements and covector
//! representatives) is carried by [`SquareMatrix`]. Sizes of interest are
//! small (N <= 16), so storage is a flat row-major `Vec` and all kernels are
//! the textbook dense ones.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: fmt::Debug> fmt::Debug for SquareMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  [")?;
            for j in 0..self.n {
                let z = &self.data[i * self.n + j];
                write!(f, " ({:?}, {:?})", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix size must be positive");
        Self {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from row-major entries. Fails unless `rows` is square.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    /// Real matrix from row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
                .collect(),
        )
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    /// Matrix unit `E_ij` (one at `(i, j)`, zero elsewhere).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = Complex::one();
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn diag(&self) -> Vec<Complex<T>> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.n)
            .map(|i| (0..self.n).fold(T::zero(), |acc, j| acc + self[(i, j)].norm()))
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// `self * rhs - rhs * self`
    pub fn commutator(&self, rhs: &Self) -> Self {
        &(self * rhs) - &(rhs * self)
    }

    /// Frobenius distance `||self - other||_F`.
    pub fn distance(&self, other: &Self) -> T {
        assert_eq!(self.n, other.n, "size mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc + (*a - *b).norm_sqr())
            .sqrt()
    }

    /// Largest modulus among strictly lower-triangular entries.
    pub fn strict_lower_max(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                m = m.max(self[(i, j)].norm());
            }
        }
        m
    }

    pub fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            })
        }
    }

    /// Interleaved real packing `[re00, im00, re01, im01, ...]`.
    pub fn to_real_vec(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(2 * self.data.len());
        self.write_real(&mut v);
        v
    }

    pub fn write_real(&self, out: &mut Vec<T>) {
        for z in &self.data {
            out.push(z.re);
            out.push(z.im);
        }
    }

    /// Inverse of [`Self::to_real_vec`]; `v` must hold exactly `2 n^2` reals.
    pub fn from_real_slice(n: usize, v: &[T]) -> Self {
        assert_eq!(v.len(), 2 * n * n, "packed length mismatch");
        Self {
            n,
            data: v.chunks_exact(2).map(|c| Complex::new(c[0], c[1])).collect(),
        }
    }

    pub fn cast<U: Real>(&self) -> SquareMatrix<U> {
        SquareMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
        }
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu<T>> {
        let n = self.n;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let scale = self.norm_inf();
        if !scale.is_finite() {
            return Err(Error::NonFinite("lu"));
        }
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= T::epsilon() * scale * T::lit(n as f64) || pivot == T::zero() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let akk = a[(k, k)];
            for i in k + 1..n {
                let l = a[(i, k)] / akk;
                a[(i, k)] = l;
                for j in k + 1..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= l * t;
                }
            }
        }
        Ok(Lu { lu: a, perm, sign })
    }

    pub fn det(&self) -> Complex<T> {
        match self.lu() {
            Ok(lu) => lu.det(),
            Err(_) => Complex::zero(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        let n = self.n;
        let mut inv = Self::zeros(n);
        for j in 0..n {
            let mut e = vec![Complex::zero(); n];
            e[j] = Complex::one();
            let x = lu.solve_vec(&e);
            for i in 0..n {
                inv[(i, j)] = x[i];
            }
        }
        Ok(inv)
    }

    /// Solve `self * X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        self.check_same_size(rhs)?;
        let lu = self.lu()?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for j in 0..n {
            let col: Vec<_> = (0..n).map(|i| rhs[(i, j)]).collect();
            let x = lu.solve_vec(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        Ok(out)
    }
}

pub struct Lu<T> {
    lu: SquareMatrix<T>,
    perm: Vec<usize>,
    sign: T,
}

impl<T: Real> Lu<T> {
    pub fn det(&self) -> Complex<T> {
        let n = self.lu.n;
        (0..n).fold(Complex::new(self.sign, T::zero()), |acc, i| acc * self.lu[(i, i)])
    }

    pub fn solve_vec(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.n;
        let mut y: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                let yk = y[k];
                y[i] -= l * yk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                let yk = y[k];
                y[i] -= u * yk;
            }
            y[i] = y[i] / self.lu[(i, i)];
        }
        y
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> Add for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn add(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "size mismatch");
        SquareMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn sub(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "size mismatch");
        SquareMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Neg for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn neg(self) -> SquareMatrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> Mul for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn mul(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.n, rhs.n, "size mismatch");
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// JSON wire form `{"n": int, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl<T: Real> From<&SquareMatrix<T>> for MatrixJson {
    fn from(m: &SquareMatrix<T>) -> Self {
        let n = m.n();
        let row = |i: usize, f: fn(&Complex<T>) -> T| -> Vec<f64> {
            // + 0.0 drops the sign of negative zero
            (0..n).map(|j| f(&m[(i, j)]).to_f64_lossy() + 0.0).collect()
        };
        MatrixJson {
            n,
            re: (0..n).map(|i| row(i, |z| z.re)).collect(),
            im: (0..n).map(|i| row(i, |z| z.im)).collect(),
        }
    }
}

impl<T: Real> TryFrom<&MatrixJson> for SquareMatrix<T> {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        let n = j.n;
        if n == 0 {
            return Err(Error::InvalidArgument("matrix size must be positive".into()));
        }
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&j.re) || !shape_ok(&j.im) {
            return Err(Error::InvalidArgument(format!(
                "expected {n}x{n} re/im arrays"
            )));
        }
        let m = SquareMatrix::from_fn(n, |r, c| Complex::new(T::lit(j.re[r][c]), T::lit(j.im[r][c])));
        if !m.is_finite() {
            return Err(Error::NonFinite("matrix json"));
        }
        Ok(m)
    }
}

impl<T: Real> SquareMatrix<T> {
    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from(self)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: MatrixJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Self::try_from(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = SquareMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_det_and_inverse() {
        let i3 = M::identity(3);
        assert_eq!(i3.det(), c(1.0, 0.0));
        assert_eq!(i3.inverse().unwrap(), i3);
    }

    #[test]
    fn det_of_permuted_triangular() {
        let m = M::from_rows(vec![
            vec![c(0.0, 0.0), c(2.0, 0.0)],
            vec![c(3.0, 1.0), c(5.0, 0.0)],
        ])
        .unwrap();
        // det = 0*5 - 2*(3+i)
        let d = m.det();
        assert!((d - c(-6.0, -2.0)).norm() < 1e-14);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).distance(&M::identity(2)) < 1e-14);
    }

    #[test]
    fn singular_is_reported() {
        let m = M::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert_eq!(m.lu().err(), Some(Error::Singular));
    }

    #[test]
    fn json_round_trip_and_shape_errors() {
        let m = M::from_fn(2, |i, j| c(i as f64 + 0.5, j as f64 - 0.25));
        let s = serde_json::to_string(&m.to_json()).unwrap();
        assert_eq!(M::from_json_str(&s).unwrap(), m);
        assert!(M::from_json_str(r#"{"n":2,"re":[[1,0]],"im":[[0,0],[0,0]]}"#).is_err());
    }

    #[test]
    fn real_packing_round_trip() {
        let m = M::from_fn(3, |i, j| c(i as f64, -(j as f64)));
        assert_eq!(M::from_real_slice(3, &m.to_real_vec()), m);
    }
}
