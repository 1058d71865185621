//! Pair groupoid `S x S-bar` of a symplectic vector space `S = R^{2m}`
//! (coordinates `(q_1..q_m, p_1..p_m)`), with projections `(x, y) -> x` and
//! `(x, y) -> y`. The unit set is the diagonal.
//!
//! `f^left = f(x)` moves the first leg by the flow of `X_f`; `f^right = f(y)`
//! moves the second leg, where the reversed form turns it into `exp(-X_f)`.

use crate::error::{Error, Result};
use crate::groupoid::{
    canonical_omega, check_window, fd_jacobian, symplectic_defect, twisted_product, FlowSettings, ScalarField, Side,
};
use crate::ode;
use crate::sample::LagrangianSample;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct PairGroupoidPoint<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Real> PairGroupoidPoint<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != y.len() || x.len() % 2 != 0 || x.is_empty() {
            return Err(Error::InvalidArgument("pair legs must have equal even length".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("pair point"));
        }
        Ok(Self { x, y })
    }

    pub fn diagonal(x: &[T]) -> Self {
        Self {
            x: x.to_vec(),
            y: x.to_vec(),
        }
    }

    pub fn packed(&self) -> Vec<T> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    pub fn from_packed(z: &[T]) -> Self {
        let (x, y) = z.split_at(z.len() / 2);
        Self {
            x: x.to_vec(),
            y: y.to_vec(),
        }
    }
}

/// Hamiltonian vector field of `f` on `S` itself.
fn xf<T: Real, F: ScalarField<T>>(f: &F, x: &[T], sign: T) -> Vec<T> {
    let m = x.len() / 2;
    let g = f.gradient(x);
    // q' = -dH/dp, p' = dH/dq
    let mut out: Vec<T> = g[m..].iter().map(|&d| -(sign * d)).collect();
    out.extend(g[..m].iter().map(|&d| sign * d));
    out
}

/// Time-`t` flow of `f` on `S` (`sign = -1` runs it backwards).
pub fn flow_on_s<T: Real, F: ScalarField<T>>(f: &F, x: &[T], t: T, settings: &FlowSettings<T>) -> Result<Vec<T>> {
    let radius = settings.radius;
    ode::flow(
        |z: &[T]| {
            check_window(z, radius)?;
            Ok(xf(f, z, T::one()))
        },
        x,
        t,
        settings.steps,
    )
}

/// Flow of `f` pulled back along `side` on the product with form `omega (+) -omega`.
pub fn pair_flow<T: Real, F: ScalarField<T>>(
    f: &F,
    side: Side,
    start: &PairGroupoidPoint<T>,
    t: T,
    settings: &FlowSettings<T>,
) -> Result<PairGroupoidPoint<T>> {
    let d = start.x.len();
    if f.dim() != d || start.y.len() != d || d % 2 != 0 {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: d,
        });
    }
    let radius = settings.radius;
    let end = ode::flow(
        |z: &[T]| {
            check_window(z, radius)?;
            let (x, y) = z.split_at(d);
            let mut out = vec![T::zero(); 2 * d];
            match side {
                Side::Left => out[..d].copy_from_slice(&xf(f, x, T::one())),
                Side::Right => out[d..].copy_from_slice(&xf(f, y, -T::one())),
            }
            Ok(out)
        },
        &start.packed(),
        t,
        settings.steps,
    )?;
    Ok(PairGroupoidPoint::from_packed(&end))
}

/// Time-1 flow of the diagonal. Residual column `f_drift` records the change
/// of `f` on the moving leg.
pub fn pair_generate<T: Real, F: ScalarField<T>>(
    f: &F,
    side: Side,
    x0_grid: &[Vec<T>],
    settings: &FlowSettings<T>,
) -> Result<LagrangianSample<T>> {
    let d = f.dim();
    let params = (0..d).map(|j| format!("x0_{j}")).collect();
    let phase = (0..d).map(|j| format!("x{j}")).chain((0..d).map(|j| format!("y{j}"))).collect();
    let mut out = LagrangianSample::new(params, phase, vec!["f_drift".into()]);
    for x0 in x0_grid {
        let end = pair_flow(f, side, &PairGroupoidPoint::diagonal(x0), T::one(), settings)?;
        let moved = match side {
            Side::Left => &end.x,
            Side::Right => &end.y,
        };
        out.push(x0.clone(), end.packed(), vec![(f.value(moved) - f.value(x0)).abs()]);
    }
    Ok(out)
}

/// `diag(Omega, -Omega)` in the packed `(x, y)` layout.
pub fn pair_omega<T: Real>(d: usize) -> crate::groupoid::RealMatrix<T> {
    twisted_product(&canonical_omega(d / 2))
}

pub fn pair_symplectic_defect<T: Real, F: ScalarField<T>>(
    f: &F,
    side: Side,
    start: &PairGroupoidPoint<T>,
    settings: &FlowSettings<T>,
) -> Result<T> {
    let j = fd_jacobian(
        |z| Ok(pair_flow(f, side, &PairGroupoidPoint::from_packed(z), T::one(), settings)?.packed()),
        &start.packed(),
    )?;
    Ok(symplectic_defect(&j, &pair_omega(start.x.len())))
}
