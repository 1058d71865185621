//! Free motion on the phase space SL(N,C) of the standard Poisson SU(N).
//!
//! The Hamiltonian `H(g) = tr(g^H g) / 2` produces
//! `g' = i eps [g g^H g - tr(g^H g) g / N]`. Both Iwasawa triangular factors
//! are constants of motion; the unitary factors rotate with the angular
//! velocities `F(gamma_L)` (body side) and `E(gamma_R)` (space side).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matgroup::{
    self, AntiHermitianTraceless, SpecialLinearElement, SpecialUnitaryElement, TriangularPositiveElement,
};
use crate::matrix::SquareMatrix;
use crate::ode;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig<T> {
    pub epsilon: T,
    pub t_final: T,
    pub steps: usize,
    /// Re-project onto SL(N,C) after every step.
    pub renormalize: bool,
}

impl<T: Real> Default for FlowConfig<T> {
    fn default() -> Self {
        Self {
            epsilon: T::one(),
            t_final: T::one(),
            steps: 1000,
            renormalize: false,
        }
    }
}

impl<T: Real> FlowConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidArgument("steps must be at least 1".into()));
        }
        if !self.t_final.is_finite() || !self.epsilon.is_finite() {
            return Err(Error::InvalidArgument("t_final and epsilon must be finite".into()));
        }
        Ok(())
    }
}

/// Samples of an integrated trajectory with its conservation diagnostics.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord<T> {
    pub times: Vec<T>,
    pub points: Vec<SpecialLinearElement<T>>,
    pub energy: Vec<T>,
    /// `|det g(t) - 1|`
    pub det_drift: Vec<T>,
    /// `||gamma_L(t) - gamma_L(0)||_F` with `g = u gamma_L`
    pub gamma_l_drift: Vec<T>,
    /// `||gamma_R(t) - gamma_R(0)||_F` with `g = gamma_R u`
    pub gamma_r_drift: Vec<T>,
}

impl<T: Real> TrajectoryRecord<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_energy_drift(&self) -> T {
        let e0 = self.energy[0];
        self.energy.iter().fold(T::zero(), |m, &e| m.max((e - e0).abs()))
    }

    pub fn max_det_drift(&self) -> T {
        self.det_drift.iter().fold(T::zero(), |m, &d| m.max(d))
    }

    pub fn max_gamma_l_drift(&self) -> T {
        self.gamma_l_drift.iter().fold(T::zero(), |m, &d| m.max(d))
    }

    pub fn max_gamma_r_drift(&self) -> T {
        self.gamma_r_drift.iter().fold(T::zero(), |m, &d| m.max(d))
    }

    pub fn final_point(&self) -> &SpecialLinearElement<T> {
        self.points.last().expect("trajectory holds the initial point")
    }
}

/// `H(g) = tr(g^H g) / 2`.
pub fn free_hamiltonian<T: Real>(g: &SpecialLinearElement<T>) -> T {
    half_trace_gram(g.matrix())
}

fn half_trace_gram<T: Real>(m: &SquareMatrix<T>) -> T {
    let s = m.as_slice().iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    s * T::lit(0.5)
}

/// `i eps [g g^H g - tr(g^H g) g / N]`
pub fn eqmot_rhs<T: Real>(g: &SpecialLinearElement<T>, epsilon: T) -> SquareMatrix<T> {
    rhs_raw(g.matrix(), epsilon)
}

fn rhs_raw<T: Real>(g: &SquareMatrix<T>, epsilon: T) -> SquareMatrix<T> {
    let n = T::lit(g.n() as f64);
    let gg = &(g * &g.adjoint()) * g;
    let tr = half_trace_gram(g) * T::lit(2.0);
    let bracket = &gg - &g.scale_real(tr / n);
    bracket.scale(Complex::new(T::zero(), epsilon))
}

/// Integrate the free-motion equation with the classical RK4 scheme.
pub fn evolve<T: Real>(g0: &SpecialLinearElement<T>, cfg: &FlowConfig<T>) -> Result<TrajectoryRecord<T>> {
    cfg.validate()?;
    let n = g0.n();
    let h = cfg.t_final / T::lit(cfg.steps as f64);
    let eps = cfg.epsilon;
    let mut field = |x: &[T]| -> Result<Vec<T>> {
        let g = SquareMatrix::from_real_slice(n, x);
        Ok(rhs_raw(&g, eps).to_real_vec())
    };

    let (_, gl0) = linalg::qr_positive(g0.matrix())?;
    let (gr0, _) = linalg::rq_positive(g0.matrix())?;

    let cap = cfg.steps + 1;
    let mut rec = TrajectoryRecord {
        times: Vec::with_capacity(cap),
        points: Vec::with_capacity(cap),
        energy: Vec::with_capacity(cap),
        det_drift: Vec::with_capacity(cap),
        gamma_l_drift: Vec::with_capacity(cap),
        gamma_r_drift: Vec::with_capacity(cap),
    };
    let push = |rec: &mut TrajectoryRecord<T>, t: T, g: SquareMatrix<T>| -> Result<()> {
        let (_, gl) = linalg::qr_positive(&g)?;
        let (gr, _) = linalg::rq_positive(&g)?;
        rec.times.push(t);
        rec.energy.push(half_trace_gram(&g));
        rec.det_drift.push(SpecialLinearElement::residual_of(&g));
        rec.gamma_l_drift.push(gl.distance(&gl0));
        rec.gamma_r_drift.push(gr.distance(&gr0));
        rec.points.push(SpecialLinearElement::new_unchecked(g));
        Ok(())
    };

    push(&mut rec, T::zero(), g0.matrix().clone())?;
    let mut x = g0.matrix().to_real_vec();
    for k in 1..=cfg.steps {
        x = ode::rk4_step(&mut field, &x, h).map_err(|_| Error::NonFinite("evolve"))?;
        let mut g = SquareMatrix::from_real_slice(n, &x);
        if cfg.renormalize {
            g = matgroup::renormalize(&g)?.into_matrix();
            x = g.to_real_vec();
        }
        push(&mut rec, h * T::lit(k as f64), g)?;
    }
    Ok(rec)
}

fn hermitian_traceless_part<T: Real>(m: &SquareMatrix<T>) -> SquareMatrix<T> {
    let n = T::lit(m.n() as f64);
    let sym = (m + &m.adjoint()).scale_real(T::lit(0.5));
    let shift = sym.trace().re / n;
    &sym - &SquareMatrix::identity(m.n()).scale_real(shift)
}

fn to_su<T: Real>(p: &SquareMatrix<T>, epsilon: T) -> AntiHermitianTraceless<T> {
    // i eps (P - tr(P)/N), with P Hermitian
    AntiHermitianTraceless::new_unchecked(hermitian_traceless_part(p).scale(Complex::new(T::zero(), epsilon)))
}

/// `F(gamma) = i eps [gamma gamma^H - tr(gamma gamma^H) / N]`
pub fn f_map<T: Real>(gamma: &TriangularPositiveElement<T>, epsilon: T) -> AntiHermitianTraceless<T> {
    let g = gamma.matrix();
    to_su(&(g * &g.adjoint()), epsilon)
}

/// `E(gamma) = i eps [gamma^H gamma - tr(gamma^H gamma) / N]`
pub fn e_map<T: Real>(gamma: &TriangularPositiveElement<T>, epsilon: T) -> AntiHermitianTraceless<T> {
    let g = gamma.matrix();
    to_su(&(&g.adjoint() * g), epsilon)
}

/// Unique `c > -lambda_min(H)` with `det(H + c I) = 1` for Hermitian traceless `H`.
///
/// `log det(H + cI)` is increasing and concave on the feasible ray, so Newton
/// iterates started left of the root approach it monotonically; bisection
/// supplies such a start and guards every step.
pub fn unit_det_shift<T: Real>(h: &SquareMatrix<T>) -> Result<T> {
    let n = h.n();
    let id = SquareMatrix::<T>::identity(n);
    let eval = |c: T| linalg::logdet_and_trace_inv(&(h + &id.scale_real(c))).ok();

    // c = 0 is never a solution unless H = 0 (traceless spectrum); at
    // c = ||H||_F + 1 every eigenvalue of H + cI is >= 1.
    let mut lo = T::zero();
    let mut hi = h.frobenius_norm() + T::one();
    let tol = T::epsilon() * T::lit(8.0 * n as f64);
    match eval(hi) {
        Some((f, _)) if f.abs() <= tol => return Ok(hi),
        Some(_) => {}
        None => return Err(Error::RootFinding("upper bracket not positive definite".into())),
    }
    // last feasible point left of the root: (c, log det, d/dc log det)
    let mut left: Option<(T, T, T)> = None;
    for _ in 0..400 {
        let mid = (lo + hi) * T::lit(0.5);
        let cand = match left {
            Some((c, f, d)) => {
                let next = c - f / d;
                if next > lo && next < hi {
                    next
                } else {
                    mid
                }
            }
            None => mid,
        };
        match eval(cand) {
            None => {
                lo = cand;
                left = None;
            }
            Some((f, _)) if f.abs() <= tol => return Ok(cand),
            Some((f, _)) if f > T::zero() => hi = cand,
            Some((f, d)) => {
                lo = cand;
                left = Some((cand, f, d));
            }
        }
        if hi - lo <= T::epsilon() * hi {
            return Ok(hi);
        }
    }
    Err(Error::RootFinding(format!("bracket [{lo}, {hi}] did not close")))
}

fn shifted_hermitian<T: Real>(x: &AntiHermitianTraceless<T>, epsilon: T) -> Result<SquareMatrix<T>> {
    if epsilon == T::zero() {
        return Err(Error::InvalidArgument("epsilon must be nonzero".into()));
    }
    // H = X / (i eps) = -i X / eps
    let h = hermitian_traceless_part(&x.matrix().scale(Complex::new(T::zero(), -T::one() / epsilon)));
    let c = unit_det_shift(&h)?;
    Ok(&h + &SquareMatrix::identity(h.n()).scale_real(c))
}

/// Inverse of [`f_map`]: solve `gamma gamma^H = H + cI`, `H = X / (i eps)`.
pub fn invert_f<T: Real>(x: &AntiHermitianTraceless<T>, epsilon: T) -> Result<TriangularPositiveElement<T>> {
    let p = shifted_hermitian(x, epsilon)?;
    let gamma = linalg::cholesky_upper_outer(&p)?;
    TriangularPositiveElement::new(gamma)
}

/// Inverse of [`e_map`]: solve `gamma^H gamma = H + cI`.
pub fn invert_e<T: Real>(x: &AntiHermitianTraceless<T>, epsilon: T) -> Result<TriangularPositiveElement<T>> {
    let p = shifted_hermitian(x, epsilon)?;
    let gamma = linalg::cholesky_lower(&p)?.adjoint();
    TriangularPositiveElement::new(gamma)
}

/// Tangent vector `g'` at base point `g` of SL(N,C).
#[derive(Clone, Debug)]
pub struct SectionPoint<T> {
    pub g: SpecialLinearElement<T>,
    pub gdot: SquareMatrix<T>,
    pub gamma: TriangularPositiveElement<T>,
}

fn trivialized<T: Real>(m: SquareMatrix<T>) -> Result<AntiHermitianTraceless<T>> {
    // tangent data is compared with a looser tolerance: finite-difference
    // velocities carry O(h^2) errors
    AntiHermitianTraceless::with_tol(m, T::membership_tol().sqrt())
}

/// Section of the left projection: `g = u F^-1(u^-1 u')`, `g' = u' F^-1(u^-1 u')`.
pub fn section_left<T: Real>(
    u: &SpecialUnitaryElement<T>,
    udot: &SquareMatrix<T>,
    epsilon: T,
) -> Result<SectionPoint<T>> {
    u.matrix().check_same_size(udot)?;
    let body = trivialized(&u.matrix().adjoint() * udot)?;
    let gamma = invert_f(&body, epsilon)?;
    Ok(SectionPoint {
        g: SpecialLinearElement::new_unchecked(u.matrix() * gamma.matrix()),
        gdot: udot * gamma.matrix(),
        gamma,
    })
}

/// Section of the right projection: `g = E^-1(u' u^-1) u`, `g' = E^-1(u' u^-1) u'`.
pub fn section_right<T: Real>(
    u: &SpecialUnitaryElement<T>,
    udot: &SquareMatrix<T>,
    epsilon: T,
) -> Result<SectionPoint<T>> {
    u.matrix().check_same_size(udot)?;
    let space = trivialized(udot * &u.matrix().adjoint())?;
    let gamma = invert_e(&space, epsilon)?;
    Ok(SectionPoint {
        g: SpecialLinearElement::new_unchecked(gamma.matrix() * u.matrix()),
        gdot: gamma.matrix() * udot,
        gamma,
    })
}

/// Which Iwasawa factor a finite-difference velocity refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorSide {
    /// `u` from `g = u gamma`
    Left,
    /// `u` from `g = gamma u`
    Right,
}

/// Unitary factor at sample `k` and its central-difference velocity, using the
/// trajectory's own step as stencil width. `k` must be an interior index.
pub fn unitary_factor_velocity<T: Real>(
    rec: &TrajectoryRecord<T>,
    k: usize,
    side: FactorSide,
) -> Result<(SpecialUnitaryElement<T>, SquareMatrix<T>)> {
    if k == 0 || k + 1 >= rec.len() {
        return Err(Error::InvalidArgument("central difference needs an interior sample".into()));
    }
    let factor = |g: &SpecialLinearElement<T>| -> Result<SquareMatrix<T>> {
        Ok(match side {
            FactorSide::Left => linalg::qr_positive(g.matrix())?.0,
            FactorSide::Right => linalg::rq_positive(g.matrix())?.1,
        })
    };
    let up = factor(&rec.points[k + 1])?;
    let um = factor(&rec.points[k - 1])?;
    let dt = rec.times[k + 1] - rec.times[k - 1];
    let udot = (&up - &um).scale_real(T::one() / dt);
    let u = SpecialUnitaryElement::with_tol(factor(&rec.points[k])?, T::membership_tol().sqrt())?;
    Ok((u, udot))
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = SquareMatrix<f64>;

    fn diag_gamma() -> TriangularPositiveElement<f64> {
        TriangularPositiveElement::new(M::from_real_diag(&[2.0, 0.5])).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(free_hamiltonian(&SpecialLinearElement::<f64>::identity(3)), 1.5);
        let g = SpecialLinearElement::new(M::from_real_diag(&[2.0, 0.5])).unwrap();
        assert_eq!(free_hamiltonian(&g), 2.125);
    }

    #[test]
    fn rhs_diagonal_example_and_linearity() {
        let g = SpecialLinearElement::new(M::from_real_diag(&[2.0, 0.5])).unwrap();
        let r = eqmot_rhs(&g, 1.0);
        let expected = M::from_diag(&[Complex::new(0.0, 3.75), Complex::new(0.0, -0.9375)]);
        assert!(r.distance(&expected) < 1e-15);
        let r2 = eqmot_rhs(&g, 2.0);
        assert!(r2.distance(&r.scale_real(2.0)) < 1e-15);
    }

    #[test]
    fn f_and_e_examples() {
        let f = f_map(&diag_gamma(), 1.0);
        let expected = M::from_diag(&[Complex::new(0.0, 1.875), Complex::new(0.0, -1.875)]);
        assert!(f.matrix().distance(&expected) < 1e-15);
        assert!(e_map(&diag_gamma(), 1.0).matrix().distance(&expected) < 1e-15);
        assert!(f_map(&TriangularPositiveElement::identity(3), 1.0).matrix().frobenius_norm() < 1e-15);

        // gamma = I + E12: gamma^H gamma = [[1,1],[1,2]], trace 3
        let g = TriangularPositiveElement::new(M::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap()).unwrap();
        let e = e_map(&g, 1.0);
        let i = Complex::new(0.0, 1.0);
        let expected = M::from_real_rows(&[&[-0.5, 1.0], &[1.0, 0.5]]).unwrap().scale(i);
        assert!(e.matrix().distance(&expected) < 1e-15);
        // gamma gamma^H = [[2,1],[1,1]]
        let f = f_map(&g, 1.0);
        let expected = M::from_real_rows(&[&[0.5, 1.0], &[1.0, -0.5]]).unwrap().scale(i);
        assert!(f.matrix().distance(&expected) < 1e-15);
    }

    #[test]
    fn invert_f_worked_example() {
        let x = AntiHermitianTraceless::from_imag_diag(&[1.875, -1.875]).unwrap();
        let h = M::from_real_diag(&[1.875, -1.875]);
        let c = unit_det_shift(&h).unwrap();
        assert!((c - 2.125).abs() < 1e-14, "c = {c}");
        let gamma = invert_f(&x, 1.0).unwrap();
        assert!(gamma.matrix().distance(diag_gamma().matrix()) < 1e-14);
        let gamma = invert_e(&x, 1.0).unwrap();
        assert!(gamma.matrix().distance(diag_gamma().matrix()) < 1e-14);
    }

    #[test]
    fn invert_zero_is_identity() {
        let z = AntiHermitianTraceless::<f64>::zero(3);
        assert!(invert_f(&z, 1.0).unwrap().matrix().distance(&M::identity(3)) < 1e-14);
        assert!(invert_e(&z, 0.5).unwrap().matrix().distance(&M::identity(3)) < 1e-14);
    }

    #[test]
    fn epsilon_zero_rejected() {
        let z = AntiHermitianTraceless::<f64>::zero(2);
        assert!(matches!(invert_f(&z, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(invert_e(&z, 0.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn unitary_start_is_an_equilibrium() {
        let i = Complex::new(0.0, 1.0);
        let u = M::from_rows(vec![vec![i, Complex::new(0.0, 0.0)], vec![Complex::new(0.0, 0.0), -i]]).unwrap();
        let g0 = SpecialLinearElement::new(u.clone()).unwrap();
        let rec = evolve(&g0, &FlowConfig { steps: 20, ..Default::default() }).unwrap();
        assert_eq!(rec.len(), 21);
        for p in &rec.points {
            assert!(p.matrix().distance(&u) < 1e-15);
        }
    }

    #[test]
    fn section_with_zero_velocity() {
        let u = SpecialUnitaryElement::<f64>::identity(2);
        let s = section_left(&u, &M::zeros(2), 1.0).unwrap();
        assert!(s.g.matrix().distance(&M::identity(2)) < 1e-14);
        assert_eq!(s.gdot, M::zeros(2));
        let s = section_right(&u, &M::zeros(2), 1.0).unwrap();
        assert!(s.gamma.matrix().distance(&M::identity(2)) < 1e-14);
    }

    #[test]
    fn section_left_recovers_chosen_gamma() {
        let gamma = TriangularPositiveElement::new(
            M::from_rows(vec![
                vec![Complex::new(1.5, 0.0), Complex::new(0.3, -0.7)],
                vec![Complex::new(0.0, 0.0), Complex::new(1.0 / 1.5, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        let u = SpecialUnitaryElement::<f64>::identity(2);
        let udot = u.matrix() * f_map(&gamma, 0.7).matrix();
        let s = section_left(&u, &udot, 0.7).unwrap();
        assert!(s.gamma.matrix().distance(gamma.matrix()) < 1e-12);
        let udot = e_map(&gamma, 0.7).matrix() * u.matrix();
        let s = section_right(&u, &udot, 0.7).unwrap();
        assert!(s.gamma.matrix().distance(gamma.matrix()) < 1e-12);
    }
}
