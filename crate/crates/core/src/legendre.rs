//! The one-fiber Legendre map on SB(N).
//!
//! The free Lagrangian on SU(N) is encoded by the right-invariant
//! contravariant metric on SB(N) determined by `l(W1, W2) = -c tr(W1 W2)` on
//! su(N) (su(N) represents the covectors of sb(N) through `Im tr`). Its
//! geodesic with initial momentum `eta0` is integrated in Euler-Arnold form
//!
//! ```text
//! V     = sharp(mu)                     (velocity in sb(N))
//! gamma' = V gamma                      (right-invariant reconstruction)
//! mu'   = s * su-part([mu, V])          (coadjoint motion, s = MOMENTUM_SIGN)
//! ```
//!
//! and `phi(eta0) = gamma(1)`. The sign `s` is fixed by agreement with
//! [`CoordinateOracle`], which integrates the same metric in explicit
//! canonical coordinates and is free of any sign convention.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matgroup::{
    self, su_basis, su_coords, AntiHermitianTraceless, SpecialUnitaryElement, TriangularPositiveElement,
    TriangularTracelessReal,
};
use crate::matrix::SquareMatrix;
use crate::ode;
use crate::sample::{matrix_column_names, LagrangianSample};
use crate::scalar::Real;

/// Default RK4 step count for a unit-time geodesic.
pub const DEFAULT_STEPS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentumSign {
    Plus,
    Minus,
}

impl MomentumSign {
    fn factor<T: Real>(self) -> T {
        match self {
            MomentumSign::Plus => T::one(),
            MomentumSign::Minus => -T::one(),
        }
    }
}

/// Sign of the coadjoint term selected by the coordinate oracle; the test
/// `momentum_sign_matches_coordinate_oracle` re-derives it.
pub const MOMENTUM_SIGN: MomentumSign = MomentumSign::Minus;

/// Bi-invariant form `l(W1, W2) = -c tr(W1 W2)` on su(N).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricData<T> {
    pub c: T,
    pub n: usize,
}

impl<T: Real> MetricData<T> {
    pub fn new(c: T, n: usize) -> Result<Self> {
        if !(c > T::zero()) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("metric scale must be positive, got {c}")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument("matrix size must be at least 2".into()));
        }
        Ok(Self { c, n })
    }

    pub fn standard(n: usize) -> Self {
        Self { c: T::one(), n }
    }

    pub fn eval(&self, a: &SquareMatrix<T>, b: &SquareMatrix<T>) -> T {
        -self.c * (a * b).trace().re
    }

    /// `l(mu, mu) / 2`
    pub fn energy(&self, mu: &SquareMatrix<T>) -> T {
        self.eval(mu, mu) * T::lit(0.5)
    }

    fn check(&self, m: &SquareMatrix<T>) -> Result<()> {
        if m.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: m.n(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicState<T> {
    pub gamma: TriangularPositiveElement<T>,
    pub mu: AntiHermitianTraceless<T>,
}

/// Raise a momentum: the unique `V` in sb(N) with
/// `Im tr(W V) = l(mu, W)` for every `W` in su(N).
///
/// `-i c mu` satisfies the identity; its su(N) component pairs to zero with
/// su(N), so the sb(N) component is the answer.
pub fn metric_sharp<T: Real>(mu: &AntiHermitianTraceless<T>, l: &MetricData<T>) -> Result<TriangularTracelessReal<T>> {
    l.check(mu.matrix())?;
    Ok(TriangularTracelessReal::new_unchecked(sharp_raw(mu.matrix(), l.c)))
}

fn sharp_raw<T: Real>(mu: &SquareMatrix<T>, c: T) -> SquareMatrix<T> {
    matgroup::split_unchecked(&mu.scale(Complex::new(T::zero(), -c))).1
}

fn geodesic_field<T: Real>(n: usize, c: T, sign: T) -> impl FnMut(&[T]) -> Result<Vec<T>> {
    let half = 2 * n * n;
    move |x: &[T]| {
        let gamma = SquareMatrix::from_real_slice(n, &x[..half]);
        let mu = SquareMatrix::from_real_slice(n, &x[half..]);
        let v = sharp_raw(&mu, c);
        let dgamma = &v * &gamma;
        let dmu = matgroup::su_part(&mu.commutator(&v)).scale_real(sign);
        let mut out = dgamma.to_real_vec();
        dmu.write_real(&mut out);
        Ok(out)
    }
}

/// Integrate the geodesic from `(I, eta0)` to time `t_final`, reporting every
/// intermediate state to `observe`.
pub fn geodesic_flow_observed<T: Real>(
    eta0: &AntiHermitianTraceless<T>,
    l: &MetricData<T>,
    t_final: T,
    steps: usize,
    sign: MomentumSign,
    mut observe: impl FnMut(T, &SquareMatrix<T>, &SquareMatrix<T>),
) -> Result<GeodesicState<T>> {
    l.check(eta0.matrix())?;
    let n = l.n;
    let half = 2 * n * n;
    let mut x0 = SquareMatrix::<T>::identity(n).to_real_vec();
    eta0.matrix().write_real(&mut x0);
    let end = ode::integrate(geodesic_field(n, l.c, sign.factor()), &x0, t_final, steps, |_, t, x| {
        observe(
            t,
            &SquareMatrix::from_real_slice(n, &x[..half]),
            &SquareMatrix::from_real_slice(n, &x[half..]),
        );
        Ok(())
    })
    .map_err(|e| match e {
        Error::NonFinite(_) => Error::NonFinite("geodesic flow"),
        other => other,
    })?;
    // the flow preserves det 1 only up to the integration error
    let gamma = matgroup::rescale_triangular(&SquareMatrix::from_real_slice(n, &end[..half]))?;
    let mu = AntiHermitianTraceless::new(SquareMatrix::from_real_slice(n, &end[half..]))?;
    Ok(GeodesicState { gamma, mu })
}

pub fn geodesic_flow_with_sign<T: Real>(
    eta0: &AntiHermitianTraceless<T>,
    l: &MetricData<T>,
    t_final: T,
    steps: usize,
    sign: MomentumSign,
) -> Result<GeodesicState<T>> {
    geodesic_flow_observed(eta0, l, t_final, steps, sign, |_, _, _| {})
}

/// Right-invariant geodesic on SB(N) with initial momentum `eta0`.
pub fn geodesic_flow<T: Real>(
    eta0: &AntiHermitianTraceless<T>,
    l: &MetricData<T>,
    t_final: T,
    steps: usize,
) -> Result<GeodesicState<T>> {
    geodesic_flow_with_sign(eta0, l, t_final, steps, MOMENTUM_SIGN)
}

/// Largest `|E(t) - E(0)|` of the energy `l(mu, mu) / 2` along a geodesic.
pub fn geodesic_energy_drift<T: Real>(
    eta0: &AntiHermitianTraceless<T>,
    l: &MetricData<T>,
    t_final: T,
    steps: usize,
) -> Result<T> {
    let e0 = l.energy(eta0.matrix());
    let mut drift = T::zero();
    geodesic_flow_observed(eta0, l, t_final, steps, MOMENTUM_SIGN, |_, _, mu| {
        drift = drift.max((l.energy(mu) - e0).abs());
    })?;
    Ok(drift)
}

/// `phi(eta0) = gamma(1)`.
pub fn phi<T: Real>(eta0: &AntiHermitianTraceless<T>, l: &MetricData<T>) -> Result<TriangularPositiveElement<T>> {
    phi_with_steps(eta0, l, DEFAULT_STEPS)
}

pub fn phi_with_steps<T: Real>(
    eta0: &AntiHermitianTraceless<T>,
    l: &MetricData<T>,
    steps: usize,
) -> Result<TriangularPositiveElement<T>> {
    Ok(geodesic_flow(eta0, l, T::one(), steps)?.gamma)
}

/// The same geodesic problem in explicit canonical coordinates on SB(N).
///
/// Coordinates `theta`: real and imaginary parts of the strictly upper
/// entries (row-major), then `log gamma_kk` for `k < N - 1`; the last
/// diagonal entry is fixed by `det = 1`. The Hamiltonian is the kinetic
/// energy `l(mu, mu) / 2` with `mu` recovered from the conjugate momenta
/// `p_k = <mu, (d gamma / d theta_k) gamma^-1>`. Gradients are central
/// finite differences.
#[derive(Clone, Debug)]
pub struct CoordinateOracle<T> {
    l: MetricData<T>,
    basis: Vec<SquareMatrix<T>>,
    fd_step: T,
}

impl<T: Real> CoordinateOracle<T> {
    pub fn new(l: MetricData<T>) -> Self {
        Self {
            basis: su_basis(l.n),
            l,
            fd_step: T::lit(1e-5),
        }
    }

    pub fn dim(&self) -> usize {
        self.l.n * self.l.n - 1
    }

    pub fn gamma(&self, theta: &[T]) -> SquareMatrix<T> {
        let n = self.l.n;
        let mut g = SquareMatrix::<T>::zeros(n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                g[(i, j)] = Complex::new(theta[k], theta[k + 1]);
                k += 2;
            }
        }
        let mut sum = T::zero();
        for d in 0..n - 1 {
            g[(d, d)] = Complex::new(theta[k + d].exp(), T::zero());
            sum += theta[k + d];
        }
        g[(n - 1, n - 1)] = Complex::new((-sum).exp(), T::zero());
        g
    }

    fn tangents(&self, theta: &[T], gamma: &SquareMatrix<T>) -> Vec<SquareMatrix<T>> {
        let n = self.l.n;
        let mut out = Vec::with_capacity(self.dim());
        for i in 0..n {
            for j in i + 1..n {
                out.push(SquareMatrix::unit(n, i, j));
                out.push(SquareMatrix::unit(n, i, j).scale(Complex::new(T::zero(), T::one())));
            }
        }
        let last = gamma[(n - 1, n - 1)];
        for d in 0..n - 1 {
            let mut t = SquareMatrix::zeros(n);
            t[(d, d)] = gamma[(d, d)];
            t[(n - 1, n - 1)] = -last;
            out.push(t);
        }
        debug_assert_eq!(out.len(), theta.len());
        out
    }

    /// Matrix `B` with `p = B m`, `m` the su-basis coordinates of `mu`.
    fn momentum_matrix(&self, theta: &[T]) -> Result<Vec<T>> {
        let d = self.dim();
        let gamma = self.gamma(theta);
        let inv = gamma.inverse()?;
        let tangents = self.tangents(theta, &gamma);
        let mut b = vec![T::zero(); d * d];
        for (k, t) in tangents.iter().enumerate() {
            let v = t * &inv;
            for (j, e) in self.basis.iter().enumerate() {
                b[k * d + j] = matgroup::pairing_unchecked(e, &v);
            }
        }
        Ok(b)
    }

    /// Conjugate momenta of `mu` at `theta`.
    pub fn momenta(&self, theta: &[T], mu: &SquareMatrix<T>) -> Result<Vec<T>> {
        let d = self.dim();
        let b = self.momentum_matrix(theta)?;
        let m = su_coords(mu);
        Ok((0..d)
            .map(|k| (0..d).fold(T::zero(), |acc, j| acc + b[k * d + j] * m[j]))
            .collect())
    }

    /// Right-trivialized momentum `mu` for canonical data `(theta, p)`.
    pub fn trivialize(&self, theta: &[T], p: &[T]) -> Result<SquareMatrix<T>> {
        let b = self.momentum_matrix(theta)?;
        let m = linalg::solve_real(&b, p)?;
        Ok(matgroup::su_from_coords(self.l.n, &m))
    }

    pub fn hamiltonian(&self, theta: &[T], p: &[T]) -> Result<T> {
        let mu = self.trivialize(theta, p)?;
        Ok(self.l.energy(&mu))
    }

    fn fd_gradient(&self, x: &[T], f: impl Fn(&[T]) -> Result<T>) -> Result<Vec<T>> {
        let mut y = x.to_vec();
        let mut g = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            let h = self.fd_step * T::one().max(x[i].abs());
            y[i] = x[i] + h;
            let fp = f(&y)?;
            y[i] = x[i] - h;
            let fm = f(&y)?;
            y[i] = x[i];
            g.push((fp - fm) / (h + h));
        }
        Ok(g)
    }

    /// Canonical vector field `(dH/dp, -dH/dtheta)` on packed `(theta, p)`.
    pub fn field(&self, z: &[T]) -> Result<Vec<T>> {
        let d = self.dim();
        let (theta, p) = z.split_at(d);
        let dh_dp = self.fd_gradient(p, |pp| self.hamiltonian(theta, pp))?;
        let dh_dtheta = self.fd_gradient(theta, |tt| self.hamiltonian(tt, p))?;
        let mut out = dh_dp;
        out.extend(dh_dtheta.into_iter().map(|v| -v));
        Ok(out)
    }

    /// Integrate from `gamma = I`, `mu = eta0`; returns the final canonical state.
    pub fn flow_state(&self, eta0: &AntiHermitianTraceless<T>, t_final: T, steps: usize) -> Result<Vec<T>> {
        self.l.check(eta0.matrix())?;
        let d = self.dim();
        let theta0 = vec![T::zero(); d];
        let mut z0 = theta0.clone();
        z0.extend(self.momenta(&theta0, eta0.matrix())?);
        ode::flow(|z| self.field(z), &z0, t_final, steps).map_err(|e| match e {
            Error::NonFinite(_) => Error::NonFinite("coordinate oracle"),
            other => other,
        })
    }
}

/// Endpoint of the geodesic computed by [`CoordinateOracle`].
pub fn oracle_flow<T: Real>(
    eta0: &AntiHermitianTraceless<T>,
    l: &MetricData<T>,
    t_final: T,
    steps: usize,
) -> Result<TriangularPositiveElement<T>> {
    let oracle = CoordinateOracle::new(*l);
    let z = oracle.flow_state(eta0, t_final, steps)?;
    TriangularPositiveElement::new(oracle.gamma(&z[..oracle.dim()]))
}

/// Covector `xi = phi(eta0) eta0 u` sampled over a grid.
#[derive(Clone, Debug)]
pub struct LegendrePoint<T> {
    pub eta_index: usize,
    pub u_index: usize,
    /// `phi(eta0) u`
    pub base: SquareMatrix<T>,
    /// `Im tr` representative of `xi` at `base`: `u^-1 eta0 phi(eta0)^-1`
    pub covector: SquareMatrix<T>,
}

/// Sample the Lagrangian submanifold generated by the free Lagrangian over
/// `eta_grid x u_grid` (row-major in `eta`).
pub fn lagrangian_sample<T: Real>(
    eta_grid: &[AntiHermitianTraceless<T>],
    u_grid: &[SpecialUnitaryElement<T>],
    l: &MetricData<T>,
    steps: usize,
) -> Result<Vec<LegendrePoint<T>>> {
    let mut out = Vec::with_capacity(eta_grid.len() * u_grid.len());
    for (a, eta) in eta_grid.iter().enumerate() {
        let gamma = phi_with_steps(eta, l, steps)?;
        let gamma_inv = gamma.matrix().inverse()?;
        let right = eta.matrix() * &gamma_inv;
        for (b, u) in u_grid.iter().enumerate() {
            l.check(u.matrix())?;
            out.push(LegendrePoint {
                eta_index: a,
                u_index: b,
                base: gamma.matrix() * u.matrix(),
                covector: &u.matrix().adjoint() * &right,
            });
        }
    }
    Ok(out)
}

/// Column-labelled form of [`lagrangian_sample`] output.
pub fn to_lagrangian_sample<T: Real>(
    points: &[LegendrePoint<T>],
    eta_grid: &[AntiHermitianTraceless<T>],
    n: usize,
) -> LagrangianSample<T> {
    let d = n * n - 1;
    let mut params = vec!["eta_id".to_string(), "u_id".to_string()];
    params.extend((0..d).map(|k| format!("eta{k}")));
    let mut phase = matrix_column_names("base", n);
    phase.extend(matrix_column_names("xi", n));
    let mut s = LagrangianSample::new(params, phase, vec!["det_residual".into()]);
    for p in points {
        let mut param = vec![T::lit(p.eta_index as f64), T::lit(p.u_index as f64)];
        param.extend(su_coords(eta_grid[p.eta_index].matrix()));
        let mut ph = p.base.to_real_vec();
        p.covector.write_real(&mut ph);
        let det = (p.base.det() - Complex::new(T::one(), T::zero())).norm();
        s.push(param, ph, vec![det]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::{pairing, sb_basis};

    type M = SquareMatrix<f64>;

    fn eta(coords: &[f64], n: usize) -> AntiHermitianTraceless<f64> {
        AntiHermitianTraceless::new(matgroup::su_from_coords(n, coords)).unwrap()
    }

    #[test]
    fn sharp_zero_and_linearity() {
        let l = MetricData::standard(2);
        assert_eq!(metric_sharp(&AntiHermitianTraceless::zero(2), &l).unwrap().matrix(), &M::zeros(2));
        let a = eta(&[0.3, -0.2, 0.9], 2);
        let b = eta(&[-1.1, 0.4, 0.25], 2);
        let combo = a.scale(2.0).add(&b.scale(-0.5));
        let lhs = metric_sharp(&combo, &l).unwrap();
        let rhs = &metric_sharp(&a, &l).unwrap().matrix().scale_real(2.0)
            + &metric_sharp(&b, &l).unwrap().matrix().scale_real(-0.5);
        assert!(lhs.matrix().distance(&rhs) < 1e-15);
    }

    /// Assemble the pairing matrix between the su and sb bases and solve
    /// for the sb coordinates of the raised momentum.
    fn sharp_by_linear_system(mu: &M, l: &MetricData<f64>) -> M {
        let n = l.n;
        let su = su_basis::<f64>(n);
        let sb = sb_basis::<f64>(n);
        let d = su.len();
        let mut a = vec![0.0; d * d];
        let mut rhs = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                a[i * d + j] = pairing(&su[i], &sb[j]).unwrap();
            }
            rhs[i] = l.eval(mu, &su[i]);
        }
        let v = linalg::solve_real(&a, &rhs).unwrap();
        sb.iter().zip(&v).fold(M::zeros(n), |acc, (b, &x)| &acc + &b.scale_real(x))
    }

    #[test]
    fn sharp_matches_linear_system() {
        for n in 2..=4 {
            let l = MetricData::new(1.7, n).unwrap();
            let coords: Vec<f64> = (0..n * n - 1).map(|k| ((k * 7 + 3) % 11) as f64 / 5.0 - 1.0).collect();
            let mu = eta(&coords, n);
            let fast = metric_sharp(&mu, &l).unwrap();
            let brute = sharp_by_linear_system(mu.matrix(), &l);
            assert!(fast.matrix().distance(&brute) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn zero_momentum_stays_at_identity() {
        let l = MetricData::standard(3);
        let s = geodesic_flow(&AntiHermitianTraceless::zero(3), &l, 1.0, 10).unwrap();
        assert_eq!(s.gamma.matrix(), &M::identity(3));
        assert_eq!(phi(&AntiHermitianTraceless::zero(2), &MetricData::standard(2)).unwrap().matrix(), &M::identity(2));
        let o = oracle_flow(&AntiHermitianTraceless::zero(2), &MetricData::standard(2), 1.0, 10).unwrap();
        assert!(o.matrix().distance(&M::identity(2)) < 1e-15);
    }

    #[test]
    fn diagonal_momentum_gives_exponential() {
        // mu = i diag(t, -t) commutes with its velocity diag(t, -t), so
        // gamma(1) = diag(e^t, e^-t)
        let t: f64 = 0.4;
        let mu = AntiHermitianTraceless::from_imag_diag(&[t, -t]).unwrap();
        let g = phi(&mu, &MetricData::standard(2)).unwrap();
        let expected = M::from_real_diag(&[t.exp(), (-t).exp()]);
        assert!(g.matrix().distance(&expected) < 1e-12);
    }

    #[test]
    fn momentum_sign_matches_coordinate_oracle() {
        let l = MetricData::standard(2);
        let mu = eta(&[0.8, -0.5, 0.6], 2);
        let oracle = oracle_flow(&mu, &l, 1.0, 400).unwrap();
        let plus = geodesic_flow_with_sign(&mu, &l, 1.0, 400, MomentumSign::Plus).unwrap();
        let minus = geodesic_flow_with_sign(&mu, &l, 1.0, 400, MomentumSign::Minus).unwrap();
        let dp = plus.gamma.matrix().distance(oracle.matrix());
        let dm = minus.gamma.matrix().distance(oracle.matrix());
        let (chosen, other) = match MOMENTUM_SIGN {
            MomentumSign::Plus => (dp, dm),
            MomentumSign::Minus => (dm, dp),
        };
        assert!(chosen < 1e-7, "selected sign misses oracle: {chosen:e}");
        assert!(other > 1e-3, "signs indistinguishable: {other:e}");
    }

    #[test]
    fn oracle_momenta_invert() {
        let l = MetricData::new(0.7, 3).unwrap();
        let oracle = CoordinateOracle::new(l);
        let theta: Vec<f64> = (0..8).map(|k| 0.1 * k as f64 - 0.3).collect();
        let mu = eta(&[0.2, 0.1, -0.3, 0.5, 0.0, 0.4, -0.2, 0.7], 3);
        let p = oracle.momenta(&theta, mu.matrix()).unwrap();
        assert!(oracle.trivialize(&theta, &p).unwrap().distance(mu.matrix()) < 1e-13);
        assert!((oracle.gamma(&theta).det().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sample_cardinality_and_zero_slice() {
        let l = MetricData::standard(2);
        let etas = vec![AntiHermitianTraceless::zero(2), eta(&[0.3, 0.1, -0.2], 2)];
        let us = vec![SpecialUnitaryElement::identity(2), SpecialUnitaryElement::new(M::from_diag(&[
            Complex::new(0.0, 1.0),
            Complex::new(0.0, -1.0),
        ]))
        .unwrap()];
        let pts = lagrangian_sample(&etas, &us, &l, 50).unwrap();
        assert_eq!(pts.len(), 4);
        for p in pts.iter().filter(|p| p.eta_index == 0) {
            assert_eq!(p.covector, M::zeros(2));
            assert!(p.base.distance(us[p.u_index].matrix()) < 1e-15);
        }
        let s = to_lagrangian_sample(&pts, &etas, 2);
        assert_eq!(s.len(), 4);
        assert!(s.max_residual(0) < 1e-12);
    }

    #[test]
    fn metric_scale_must_be_positive() {
        assert!(MetricData::<f64>::new(0.0, 2).is_err());
        assert!(MetricData::<f64>::new(-1.0, 2).is_err());
        assert!(MetricData::<f64>::new(1.0, 1).is_err());
    }
}
