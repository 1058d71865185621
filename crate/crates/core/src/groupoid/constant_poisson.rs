//! A vector space `V` with constant Poisson tensor `{x^j, x^k} = r^jk`,
//! realized in `T*V = V + V*` with `omega = sum dx^j ^ dp_j`.
//!
//! Projections: `x_L = q + r(p) / 2` and `x_R = q - r(p) / 2` with
//! `r(p)^j = p_k r^kj`. The unit set is the zero section.

use crate::error::{Error, Result};
use crate::groupoid::{check_window, fd_jacobian, canonical_omega, symplectic_defect, FlowSettings, ScalarField, Side};
use crate::ode;
use crate::sample::LagrangianSample;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantPoissonSpace<T> {
    n: usize,
    /// Row-major `r^jk`.
    r: Vec<T>,
}

impl<T: Real> ConstantPoissonSpace<T> {
    pub fn new(n: usize, r: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if r.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: r.len(),
            });
        }
        for j in 0..n {
            for k in 0..n {
                if r[j * n + k] + r[k * n + j] != T::zero() || !r[j * n + k].is_finite() {
                    return Err(Error::InvalidArgument(format!("Poisson tensor is not antisymmetric at ({j}, {k})")));
                }
            }
        }
        Ok(Self { n, r })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn r(&self, j: usize, k: usize) -> T {
        self.r[j * self.n + k]
    }

    /// `r(p)^j = p_k r^kj`
    pub fn contract(&self, p: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|j| (0..self.n).fold(T::zero(), |acc, k| acc + p[k] * self.r(k, j)))
            .collect()
    }

    /// `sum_j r^kj a_j`, the term entering `dH/dp_k` for `H = f(q + r(p)/2)`.
    fn apply(&self, a: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|k| (0..self.n).fold(T::zero(), |acc, j| acc + self.r(k, j) * a[j]))
            .collect()
    }

    fn check(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                got: len,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwistedCotangentPoint<T> {
    pub q: Vec<T>,
    pub p: Vec<T>,
}

impl<T: Real> TwistedCotangentPoint<T> {
    pub fn new(q: Vec<T>, p: Vec<T>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                got: p.len(),
            });
        }
        if q.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("cotangent point"));
        }
        Ok(Self { q, p })
    }

    /// `(x0, 0)`
    pub fn unit(x0: &[T]) -> Self {
        Self {
            q: x0.to_vec(),
            p: vec![T::zero(); x0.len()],
        }
    }

    pub fn packed(&self) -> Vec<T> {
        self.q.iter().chain(&self.p).copied().collect()
    }

    pub fn from_packed(z: &[T]) -> Self {
        let (q, p) = z.split_at(z.len() / 2);
        Self {
            q: q.to_vec(),
            p: p.to_vec(),
        }
    }
}

fn projection<T: Real>(pt: &TwistedCotangentPoint<T>, v: &ConstantPoissonSpace<T>, sign: T) -> Result<Vec<T>> {
    v.check(pt.q.len())?;
    v.check(pt.p.len())?;
    let rp = v.contract(&pt.p);
    Ok(pt.q.iter().zip(&rp).map(|(&q, &r)| q + sign * T::lit(0.5) * r).collect())
}

/// `x_L = q + r(p) / 2`
pub fn cp_left_projection<T: Real>(pt: &TwistedCotangentPoint<T>, v: &ConstantPoissonSpace<T>) -> Result<Vec<T>> {
    projection(pt, v, T::one())
}

/// `x_R = q - r(p) / 2`
pub fn cp_right_projection<T: Real>(pt: &TwistedCotangentPoint<T>, v: &ConstantPoissonSpace<T>) -> Result<Vec<T>> {
    projection(pt, v, -T::one())
}

pub fn cp_projection<T: Real>(pt: &TwistedCotangentPoint<T>, v: &ConstantPoissonSpace<T>, side: Side) -> Result<Vec<T>> {
    match side {
        Side::Left => cp_left_projection(pt, v),
        Side::Right => cp_right_projection(pt, v),
    }
}

fn side_sign<T: Real>(side: Side) -> T {
    match side {
        Side::Left => T::one(),
        Side::Right => -T::one(),
    }
}

/// `f` pulled back along the `side` projection.
pub fn pulled_back<T: Real, F: ScalarField<T>>(f: &F, v: &ConstantPoissonSpace<T>, side: Side, z: &[T]) -> Result<T> {
    let x = cp_projection(&TwistedCotangentPoint::from_packed(z), v, side)?;
    Ok(f.value(&x))
}

fn hamiltonian_field<'a, T: Real, F: ScalarField<T>>(
    f: &'a F,
    v: &'a ConstantPoissonSpace<T>,
    side: Side,
    radius: T,
) -> impl FnMut(&[T]) -> Result<Vec<T>> + 'a {
    let n = v.n;
    let s = side_sign::<T>(side);
    move |z: &[T]| {
        check_window(z, radius)?;
        let (q, p) = z.split_at(n);
        let rp = v.contract(p);
        let x: Vec<T> = q.iter().zip(&rp).map(|(&a, &b)| a + s * T::lit(0.5) * b).collect();
        let grad = f.gradient(&x);
        // dH/dq = grad, dH/dp_k = (s / 2) r^kj grad_j
        let dh_dp = v.apply(&grad);
        let mut out: Vec<T> = dh_dp.iter().map(|&d| -(s * T::lit(0.5) * d)).collect();
        out.extend(grad);
        Ok(out)
    }
}

/// Time-`t` flow of `f` pulled back along `side`.
pub fn cp_flow<T: Real, F: ScalarField<T>>(
    f: &F,
    v: &ConstantPoissonSpace<T>,
    side: Side,
    start: &TwistedCotangentPoint<T>,
    t: T,
    settings: &FlowSettings<T>,
) -> Result<TwistedCotangentPoint<T>> {
    v.check(start.q.len())?;
    v.check(start.p.len())?;
    if f.dim() != v.n {
        return Err(Error::DimensionMismatch {
            expected: v.n,
            got: f.dim(),
        });
    }
    let end = ode::flow(hamiltonian_field(f, v, side, settings.radius), &start.packed(), t, settings.steps)?;
    Ok(TwistedCotangentPoint::from_packed(&end))
}

fn column_names(n: usize) -> (Vec<String>, Vec<String>) {
    let params = (0..n).map(|j| format!("x0_{j}")).collect();
    let phase = (0..n).map(|j| format!("q{j}")).chain((0..n).map(|j| format!("p{j}"))).collect();
    (params, phase)
}

/// Endpoints of the time-1 flow of `f` pulled back along `side`, started on the
/// unit set. Residual columns: `f_drift` (change of the Hamiltonian) and
/// `anchor_drift` (motion of the opposite projection, which the flow fixes).
pub fn cp_generate_side<T: Real, F: ScalarField<T>>(
    f: &F,
    v: &ConstantPoissonSpace<T>,
    side: Side,
    x0_grid: &[Vec<T>],
    settings: &FlowSettings<T>,
) -> Result<LagrangianSample<T>> {
    let (params, phase) = column_names(v.n);
    let mut out = LagrangianSample::new(params, phase, vec!["f_drift".into(), "anchor_drift".into()]);
    let other = match side {
        Side::Left => Side::Right,
        Side::Right => Side::Left,
    };
    for x0 in x0_grid {
        v.check(x0.len())?;
        let end = cp_flow(f, v, side, &TwistedCotangentPoint::unit(x0), T::one(), settings)?;
        let h = f.value(&cp_projection(&end, v, side)?);
        let anchor = cp_projection(&end, v, other)?;
        let drift = anchor.iter().zip(x0).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
        out.push(x0.clone(), end.packed(), vec![(h - f.value(x0)).abs(), drift]);
    }
    Ok(out)
}

/// Left-generated Lagrangian sample `exp(X_{f^left})` applied to the zero section.
pub fn cp_generate<T: Real, F: ScalarField<T>>(
    f: &F,
    v: &ConstantPoissonSpace<T>,
    x0_grid: &[Vec<T>],
    settings: &FlowSettings<T>,
) -> Result<LagrangianSample<T>> {
    cp_generate_side(f, v, Side::Left, x0_grid, settings)
}

/// Characteristics `{(flow_t(x0), f(x0), t)}` of the phase lift. Each `t` is
/// reached with `settings.steps` steps of size `t / steps`, so the `t = 1`
/// slice reproduces [`cp_generate`] exactly.
pub fn phase_lift_graph<T: Real, F: ScalarField<T>>(
    f: &F,
    v: &ConstantPoissonSpace<T>,
    x0_grid: &[Vec<T>],
    t_grid: &[T],
    settings: &FlowSettings<T>,
) -> Result<LagrangianSample<T>> {
    let n = v.n;
    let mut params = vec!["x0_id".to_string(), "t".to_string()];
    params.extend((0..n).map(|j| format!("x0_{j}")));
    let mut phase = column_names(n).1;
    phase.push("e".into());
    phase.push("s".into());
    let mut out = LagrangianSample::new(params, phase, vec!["e_drift".into()]);
    for (id, x0) in x0_grid.iter().enumerate() {
        v.check(x0.len())?;
        let e = f.value(x0);
        for &t in t_grid {
            let end = cp_flow(f, v, Side::Left, &TwistedCotangentPoint::unit(x0), t, settings)?;
            let h = f.value(&cp_left_projection(&end, v)?);
            let mut param = vec![T::lit(id as f64), t];
            param.extend(x0.iter().copied());
            let mut ph = end.packed();
            ph.push(e);
            ph.push(t);
            out.push(param, ph, vec![(h - e).abs()]);
        }
    }
    Ok(out)
}

/// Largest distance between each left-generated endpoint and the
/// right-generated endpoint started at its left projection.
///
/// Both clouds are the same submanifold; the right flow fixes the left
/// projection, which therefore parameterizes the comparison.
pub fn cp_left_right_set_distance<T: Real, F: ScalarField<T>>(
    f: &F,
    v: &ConstantPoissonSpace<T>,
    x0_grid: &[Vec<T>],
    settings: &FlowSettings<T>,
) -> Result<T> {
    let mut worst = T::zero();
    for x0 in x0_grid {
        let left = cp_flow(f, v, Side::Left, &TwistedCotangentPoint::unit(x0), T::one(), settings)?;
        let anchor = cp_left_projection(&left, v)?;
        let right = cp_flow(f, v, Side::Right, &TwistedCotangentPoint::unit(&anchor), T::one(), settings)?;
        let d = left
            .packed()
            .iter()
            .zip(right.packed())
            .fold(T::zero(), |acc, (&a, b)| acc + (a - b) * (a - b))
            .sqrt();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// `||J^T Omega J - Omega||_F` for the time-1 map at `start`.
pub fn cp_symplectic_defect<T: Real, F: ScalarField<T>>(
    f: &F,
    v: &ConstantPoissonSpace<T>,
    side: Side,
    start: &TwistedCotangentPoint<T>,
    settings: &FlowSettings<T>,
) -> Result<T> {
    let j = fd_jacobian(
        |z| Ok(cp_flow(f, v, side, &TwistedCotangentPoint::from_packed(z), T::one(), settings)?.packed()),
        &start.packed(),
    )?;
    Ok(symplectic_defect(&j, &canonical_omega(v.n)))
}

/// Isotropy of the generated cloud at `x0`: `||T^T Omega T||_F` for the
/// tangent frame `T` of the map `x0 -> endpoint`, together with the smallest
/// singular-value proxy `min_k |T e_k|` guarding against rank loss.
pub fn cp_lagrangian_defect<T: Real, F: ScalarField<T>>(
    f: &F,
    v: &ConstantPoissonSpace<T>,
    x0: &[T],
    settings: &FlowSettings<T>,
) -> Result<(T, T)> {
    let frame = fd_jacobian(
        |y| Ok(cp_flow(f, v, Side::Left, &TwistedCotangentPoint::unit(y), T::one(), settings)?.packed()),
        x0,
    )?;
    let form = frame.congruence(&canonical_omega(v.n));
    let rank_proxy = (0..frame.cols)
        .map(|c| (0..frame.rows).fold(T::zero(), |acc, r| acc + frame.get(r, c) * frame.get(r, c)).sqrt())
        .fold(T::infinity(), T::min);
    Ok((form.frobenius_norm(), rank_proxy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::FieldSpec;

    fn plane() -> ConstantPoissonSpace<f64> {
        ConstantPoissonSpace::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap()
    }

    #[test]
    fn projection_examples() {
        let v = plane();
        let pt = TwistedCotangentPoint::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(cp_left_projection(&pt, &v).unwrap(), vec![-0.5, 0.0]);
        assert_eq!(cp_right_projection(&pt, &v).unwrap(), vec![0.5, 0.0]);
        let q = TwistedCotangentPoint::unit(&[0.3, 0.4]);
        assert_eq!(cp_left_projection(&q, &v).unwrap(), vec![0.3, 0.4]);
        let flat = ConstantPoissonSpace::new(2, vec![0.0; 4]).unwrap();
        assert_eq!(cp_left_projection(&pt, &flat).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn non_antisymmetric_rejected() {
        assert!(ConstantPoissonSpace::new(2, vec![0.0, 1.0, 1.0, 0.0]).is_err());
        assert!(ConstantPoissonSpace::new(2, vec![1.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn linear_endpoint_closed_form() {
        let f = FieldSpec::Linear { a: vec![0.0, 1.0] };
        let s = cp_generate(&f, &plane(), &[vec![0.0, 0.0]], &FlowSettings::default()).unwrap();
        assert_eq!(s.points[0].phase, vec![-0.5, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn excursion_aborts() {
        let f = FieldSpec::Linear { a: vec![0.0, 1.0] };
        let tight = FlowSettings { steps: 16, radius: 0.5 };
        assert!(matches!(
            cp_generate(&f, &plane(), &[vec![0.0, 0.0]], &tight),
            Err(Error::Excursion { .. })
        ));
    }
}
