//! Generating functions on three symplectic groupoids.
//!
//! A function `f` on the unit manifold is pulled back along the left (or
//! right) projection and the unit set is pushed through the time-1 flow of
//! the resulting Hamiltonian. The engines are
//!
//! * [`constant_poisson`]: `T*V` realizing a vector space with constant
//!   Poisson tensor,
//! * [`cotangent`]: `T*G` over the dual of su(N), right trivialized,
//! * [`pair`]: the pair groupoid `S x S-bar` of a symplectic vector space.
//!
//! Vector fields follow `q' = -dH/dp`, `p' = dH/dq` for `omega = sum dq ^ dp`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub mod constant_poisson;
pub mod cotangent;
pub mod pair;

/// Relative central-difference step for gradients and Jacobians.
pub const FD_STEP: f64 = 1e-5;

/// Which projection a function is pulled back along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Integration settings shared by the engines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSettings<T> {
    pub steps: usize,
    /// Abort once any state coordinate exceeds this in absolute value.
    pub radius: T,
}

impl<T: Real> Default for FlowSettings<T> {
    fn default() -> Self {
        // power of two: affine flows with dyadic data are integrated exactly
        Self {
            steps: 256,
            radius: T::lit(1e6),
        }
    }
}

pub(crate) fn check_window<T: Real>(x: &[T], radius: T) -> Result<()> {
    if x.iter().any(|v| v.abs() > radius) {
        Err(Error::Excursion {
            radius: radius.to_f64_lossy(),
        })
    } else {
        Ok(())
    }
}

pub trait ScalarField<T: Real> {
    fn dim(&self) -> usize;

    fn value(&self, x: &[T]) -> T;

    /// Central differences unless overridden.
    fn gradient(&self, x: &[T]) -> Vec<T> {
        fd_gradient(|y| self.value(y), x)
    }
}

pub fn fd_gradient<T: Real>(f: impl Fn(&[T]) -> T, x: &[T]) -> Vec<T> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = T::lit(FD_STEP) * T::one().max(x[i].abs());
            y[i] = x[i] + h;
            let fp = f(&y);
            y[i] = x[i] - h;
            let fm = f(&y);
            y[i] = x[i];
            (fp - fm) / (h + h)
        })
        .collect()
}

/// Smooth functions on a real vector space, as read from configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec<T> {
    Zero { dim: usize },
    /// `a . x`
    Linear { a: Vec<T> },
    /// `x^T A x / 2`, `A` symmetric
    Quadratic { a: Vec<Vec<T>> },
    /// `|x|^2 / 2`
    Oscillator { dim: usize },
    /// `amplitude * sin(k . x)`; gradient by finite differences.
    Wave { k: Vec<T>, amplitude: T },
}

impl<T: Real> FieldSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Zero { dim } | FieldSpec::Oscillator { dim } if *dim == 0 => {
                Err(Error::InvalidArgument("field dimension must be positive".into()))
            }
            FieldSpec::Linear { a } if a.is_empty() => Err(Error::InvalidArgument("empty coefficient vector".into())),
            FieldSpec::Wave { k, .. } if k.is_empty() => Err(Error::InvalidArgument("empty wave vector".into())),
            FieldSpec::Quadratic { a } => {
                let n = a.len();
                if n == 0 || a.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidArgument("quadratic form must be a nonempty square matrix".into()));
                }
                for i in 0..n {
                    for j in 0..i {
                        if a[i][j] != a[j][i] {
                            return Err(Error::InvalidArgument("quadratic form must be symmetric".into()));
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

impl<T: Real> ScalarField<T> for FieldSpec<T> {
    fn dim(&self) -> usize {
        match self {
            FieldSpec::Zero { dim } | FieldSpec::Oscillator { dim } => *dim,
            FieldSpec::Linear { a } => a.len(),
            FieldSpec::Quadratic { a } => a.len(),
            FieldSpec::Wave { k, .. } => k.len(),
        }
    }

    fn value(&self, x: &[T]) -> T {
        match self {
            FieldSpec::Zero { .. } => T::zero(),
            FieldSpec::Linear { a } => dot(a, x),
            FieldSpec::Quadratic { a } => {
                a.iter().zip(x).fold(T::zero(), |acc, (row, &xi)| acc + xi * dot(row, x)) * T::lit(0.5)
            }
            FieldSpec::Oscillator { .. } => dot(x, x) * T::lit(0.5),
            FieldSpec::Wave { k, amplitude } => *amplitude * dot(k, x).sin(),
        }
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        match self {
            FieldSpec::Zero { dim } => vec![T::zero(); *dim],
            FieldSpec::Linear { a } => a.clone(),
            FieldSpec::Quadratic { a } => a.iter().map(|row| dot(row, x)).collect(),
            FieldSpec::Oscillator { .. } => x.to_vec(),
            FieldSpec::Wave { .. } => fd_gradient(|y| self.value(y), x),
        }
    }
}

/// Dense real matrix, row-major, used for symplectic forms and Jacobians.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> RealMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    /// `A^T B A`
    pub fn congruence(&self, b: &Self) -> Self {
        assert_eq!(b.rows, self.rows);
        assert_eq!(b.cols, self.rows);
        let mut out = Self::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in 0..self.cols {
                let mut s = T::zero();
                for k in 0..self.rows {
                    let ak = self.get(k, i);
                    if ak == T::zero() {
                        continue;
                    }
                    for l in 0..self.rows {
                        s += ak * b.get(k, l) * self.get(l, j);
                    }
                }
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn frobenius_distance(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
            .sqrt()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &a| acc + a * a).sqrt()
    }
}

/// `[[0, I], [-I, 0]]` for coordinates packed as `(q_1..q_d, p_1..p_d)`.
pub fn canonical_omega<T: Real>(d: usize) -> RealMatrix<T> {
    let mut w = RealMatrix::zeros(2 * d, 2 * d);
    for k in 0..d {
        w.set(k, d + k, T::one());
        w.set(d + k, k, -T::one());
    }
    w
}

/// Block diagonal `diag(a, -a)`.
pub fn twisted_product<T: Real>(a: &RealMatrix<T>) -> RealMatrix<T> {
    let m = a.rows;
    let mut w = RealMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            w.set(i, j, a.get(i, j));
            w.set(m + i, m + j, -a.get(i, j));
        }
    }
    w
}

/// Central-difference Jacobian of `map` at `x` (step relative to each coordinate).
pub fn fd_jacobian<T: Real>(mut map: impl FnMut(&[T]) -> Result<Vec<T>>, x: &[T]) -> Result<RealMatrix<T>> {
    let mut y = x.to_vec();
    let mut cols = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = T::lit(FD_STEP) * T::one().max(x[i].abs());
        y[i] = x[i] + h;
        let fp = map(&y)?;
        y[i] = x[i] - h;
        let fm = map(&y)?;
        y[i] = x[i];
        cols.push(fp.iter().zip(&fm).map(|(&a, &b)| (a - b) / (h + h)).collect::<Vec<T>>());
    }
    let rows = cols.first().map_or(0, Vec::len);
    let mut j = RealMatrix::zeros(rows, x.len());
    for (c, col) in cols.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            j.set(r, c, v);
        }
    }
    Ok(j)
}

/// `||J^T W J - W||_F`
pub fn symplectic_defect<T: Real>(j: &RealMatrix<T>, omega: &RealMatrix<T>) -> T {
    j.congruence(omega).frobenius_distance(omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_gradients_match_differences() {
        let specs: Vec<FieldSpec<f64>> = vec![
            FieldSpec::Linear { a: vec![0.5, -1.0] },
            FieldSpec::Quadratic {
                a: vec![vec![2.0, 0.5], vec![0.5, -1.0]],
            },
            FieldSpec::Oscillator { dim: 2 },
            FieldSpec::Wave {
                k: vec![1.0, 2.0],
                amplitude: 0.3,
            },
        ];
        let x = [0.3, -0.7];
        for s in &specs {
            s.validate().unwrap();
            let g = s.gradient(&x);
            let fd = fd_gradient(|y| s.value(y), &x);
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-9, "{s:?}");
            }
        }
    }

    #[test]
    fn asymmetric_quadratic_rejected() {
        let s = FieldSpec::<f64>::Quadratic {
            a: vec![vec![1.0, 0.5], vec![0.0, 1.0]],
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn rotation_is_symplectic_shear_is_not() {
        let w = canonical_omega::<f64>(1);
        let (s, c) = 0.3f64.sin_cos();
        let rot = fd_jacobian(|x: &[f64]| Ok(vec![c * x[0] - s * x[1], s * x[0] + c * x[1]]), &[0.2, 0.1]).unwrap();
        assert!(symplectic_defect(&rot, &w) < 1e-10);
        let stretch = fd_jacobian(|x: &[f64]| Ok(vec![2.0 * x[0], x[1]]), &[0.2, 0.1]).unwrap();
        assert!(symplectic_defect(&stretch, &w) > 0.5);
    }

    #[test]
    fn field_spec_json() {
        let s: FieldSpec<f64> = serde_json::from_str(r#"{"kind": "linear", "a": [0.0, 1.0]}"#).unwrap();
        assert_eq!(s, FieldSpec::Linear { a: vec![0.0, 1.0] });
    }
}
