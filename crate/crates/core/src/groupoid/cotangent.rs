//! `T*G` for `G = SU(N)` as the symplectic groupoid of the Lie-Poisson dual.
//!
//! Points are `(g, m)` with `m` the covector right-translated to the unit,
//! paired with su(N) through `<m, W> = -tr(m W)`. The left projection is `m`,
//! the right projection is the body momentum `g^-1 m g`, and the unit set is
//! the fiber over the identity.
//!
//! For `f` on the dual, `f^left(g, m) = f(m)` generates left translations:
//! `g' = df(m) g`, `m' = [df(m), m]`. The right pullback
//! `k^right(g, m) = k(g^-1 m g)` generates right translations:
//! `g' = g dk(g^-1 m g)`, `m' = 0`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{canonical_omega, check_window, fd_jacobian, symplectic_defect, FlowSettings, Side};
use crate::linalg;
use crate::matgroup::{matrix_exp, su_basis, su_coords, su_from_coords, AntiHermitianTraceless, SpecialUnitaryElement};
use crate::matrix::SquareMatrix;
use crate::ode;
use crate::sample::{matrix_column_names, LagrangianSample};
use crate::scalar::Real;

/// `-tr(a b)`
pub fn su_pair<T: Real>(a: &SquareMatrix<T>, b: &SquareMatrix<T>) -> T {
    -(a * b).trace().re
}

/// `|m|^2 / 2` with `|m|^2 = -tr(m^2)`.
pub fn half_norm_sq<T: Real>(m: &SquareMatrix<T>) -> T {
    su_pair(m, m) * T::lit(0.5)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CotangentGroupPoint<T> {
    pub g: SpecialUnitaryElement<T>,
    pub m: AntiHermitianTraceless<T>,
}

impl<T: Real> CotangentGroupPoint<T> {
    pub fn new(g: SpecialUnitaryElement<T>, m: AntiHermitianTraceless<T>) -> Result<Self> {
        if g.n() != m.n() {
            return Err(Error::DimensionMismatch {
                expected: g.n(),
                got: m.n(),
            });
        }
        Ok(Self { g, m })
    }

    /// `(e, m)`
    pub fn unit(m: &AntiHermitianTraceless<T>) -> Self {
        Self {
            g: SpecialUnitaryElement::identity(m.n()),
            m: m.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    pub fn left_projection(&self) -> &AntiHermitianTraceless<T> {
        &self.m
    }

    /// `g^-1 m g`
    pub fn right_projection(&self) -> SquareMatrix<T> {
        body(self.g.matrix(), self.m.matrix())
    }

    fn packed(&self) -> Vec<T> {
        let mut v = self.g.matrix().to_real_vec();
        self.m.matrix().write_real(&mut v);
        v
    }

    /// Distance `||g - g'||_F + ||m - m'||_F`.
    pub fn distance(&self, other: &Self) -> T {
        self.g.matrix().distance(other.g.matrix()) + self.m.matrix().distance(other.m.matrix())
    }
}

fn body<T: Real>(g: &SquareMatrix<T>, m: &SquareMatrix<T>) -> SquareMatrix<T> {
    &(&g.adjoint() * m) * g
}

/// Functions on the dual of su(N).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DualFunction<T> {
    /// `<m, X>`, `X` given by its su(N) basis coordinates.
    Linear { x: Vec<T> },
    /// `psi(|m|^2 / 2)` with `psi(s) = sum coeffs[k] s^k`.
    Casimir { coeffs: Vec<T> },
}

impl<T: Real> DualFunction<T> {
    pub fn linear(x: &AntiHermitianTraceless<T>) -> Self {
        DualFunction::Linear {
            x: su_coords(x.matrix()),
        }
    }

    /// `psi(s) + (s - s0)^2`: same differential as `psi` wherever `|m|^2 / 2 = s0`.
    pub fn matched_casimir(coeffs: &[T], s0: T) -> Self {
        let mut c = coeffs.to_vec();
        c.resize(c.len().max(3), T::zero());
        c[0] += s0 * s0;
        c[1] -= T::lit(2.0) * s0;
        c[2] += T::one();
        DualFunction::Casimir { coeffs: c }
    }

    fn linear_matrix(&self, n: usize) -> Result<Option<SquareMatrix<T>>> {
        match self {
            DualFunction::Linear { x } => {
                if x.len() != n * n - 1 {
                    return Err(Error::DimensionMismatch {
                        expected: n * n - 1,
                        got: x.len(),
                    });
                }
                Ok(Some(su_from_coords(n, x)))
            }
            DualFunction::Casimir { .. } => Ok(None),
        }
    }

    pub fn value(&self, m: &SquareMatrix<T>) -> Result<T> {
        match self {
            DualFunction::Linear { .. } => {
                let x = self.linear_matrix(m.n())?.expect("linear");
                Ok(su_pair(m, &x))
            }
            DualFunction::Casimir { coeffs } => Ok(poly(coeffs, half_norm_sq(m))),
        }
    }

    /// Differential at `m` as an element of su(N).
    pub fn gradient(&self, m: &SquareMatrix<T>) -> Result<SquareMatrix<T>> {
        match self {
            DualFunction::Linear { .. } => Ok(self.linear_matrix(m.n())?.expect("linear")),
            DualFunction::Casimir { coeffs } => Ok(m.scale_real(poly_derivative(coeffs, half_norm_sq(m)))),
        }
    }

    pub fn is_casimir(&self) -> bool {
        matches!(self, DualFunction::Casimir { .. })
    }
}

fn poly<T: Real>(c: &[T], s: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &a| acc * s + a)
}

fn poly_derivative<T: Real>(c: &[T], s: T) -> T {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(T::zero(), |acc, (k, &a)| acc * s + a * T::lit(k as f64))
}

/// Time-`t` flow of `f` pulled back along `side`.
pub fn ctg_flow<T: Real>(
    f: &DualFunction<T>,
    side: Side,
    start: &CotangentGroupPoint<T>,
    t: T,
    settings: &FlowSettings<T>,
) -> Result<CotangentGroupPoint<T>> {
    let n = start.n();
    let half = 2 * n * n;
    f.linear_matrix(n)?;
    let radius = settings.radius;
    let field = |z: &[T]| -> Result<Vec<T>> {
        check_window(z, radius)?;
        let g = SquareMatrix::from_real_slice(n, &z[..half]);
        let m = SquareMatrix::from_real_slice(n, &z[half..]);
        let (dg, dm) = match side {
            Side::Left => {
                let w = f.gradient(&m)?;
                (&w * &g, w.commutator(&m))
            }
            Side::Right => {
                let w = f.gradient(&body(&g, &m))?;
                (&g * &w, SquareMatrix::zeros(n))
            }
        };
        let mut out = dg.to_real_vec();
        dm.write_real(&mut out);
        Ok(out)
    };
    let end = ode::flow(field, &start.packed(), t, settings.steps).map_err(|e| match e {
        Error::NonFinite(_) => Error::NonFinite("cotangent flow"),
        other => other,
    })?;
    CotangentGroupPoint::new(
        SpecialUnitaryElement::new(SquareMatrix::from_real_slice(n, &end[..half]))?,
        AntiHermitianTraceless::new(SquareMatrix::from_real_slice(n, &end[half..]))?,
    )
}

/// Time-1 flow of the unit fiber `{(e, m)}` over `fiber`. Residual columns:
/// `f_drift` and `anchor_drift` (motion of the opposite projection).
pub fn ctg_generate<T: Real>(
    f: &DualFunction<T>,
    side: Side,
    fiber: &[AntiHermitianTraceless<T>],
    settings: &FlowSettings<T>,
) -> Result<LagrangianSample<T>> {
    let n = fiber.first().map_or(2, |m| m.n());
    let d = n * n - 1;
    let params = (0..d).map(|k| format!("m0_{k}")).collect();
    let mut phase = matrix_column_names("g", n);
    phase.extend((0..d).map(|k| format!("m{k}")));
    let mut out = LagrangianSample::new(params, phase, vec!["f_drift".into(), "anchor_drift".into()]);
    for m0 in fiber {
        let end = ctg_flow(f, side, &CotangentGroupPoint::unit(m0), T::one(), settings)?;
        let anchor = match side {
            Side::Left => end.right_projection(),
            Side::Right => end.m.matrix().clone(),
        };
        let moved = match side {
            Side::Left => end.m.matrix().clone(),
            Side::Right => end.right_projection(),
        };
        let drift = (f.value(&moved)? - f.value(m0.matrix())?).abs();
        let mut ph = end.g.matrix().to_real_vec();
        ph.extend(su_coords(end.m.matrix()));
        out.push(su_coords(m0.matrix()), ph, vec![drift, anchor.distance(m0.matrix())]);
    }
    Ok(out)
}

/// Largest `||g(1) - exp(X)||_F` over a generated sample of `Linear(X)`.
pub fn max_base_deviation<T: Real>(sample: &LagrangianSample<T>, x: &AntiHermitianTraceless<T>) -> T {
    let n = x.n();
    let target = matrix_exp(x.matrix());
    sample
        .points
        .iter()
        .map(|p| SquareMatrix::from_real_slice(n, &p.phase[..2 * n * n]).distance(&target))
        .fold(T::zero(), T::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CasimirReport<T> {
    /// Largest distance between the two orders of the `f`-left and `g`-right flows.
    pub commutation: T,
    /// Largest deviation of either projection of an `f`-flowed unit from its start.
    pub isotropy: T,
    /// Largest endpoint distance between `f` and a Casimir with the same differential.
    pub matched: T,
    pub samples: usize,
}

/// Numerical witnesses for commuting Casimir flows and abelian isotropy.
///
/// `f` and `g` must be Casimirs. Each sample point `(g_s, m_s)` is used for
/// the commutation test; the unit `(e, m_s)` for the isotropy and
/// matched-differential tests. Samples with `m_s = 0` are rejected.
pub fn casimir_checks<T: Real>(
    f: &DualFunction<T>,
    g: &DualFunction<T>,
    samples: &[CotangentGroupPoint<T>],
    t: T,
    settings: &FlowSettings<T>,
) -> Result<CasimirReport<T>> {
    let coeffs = match (f, g) {
        (DualFunction::Casimir { coeffs }, DualFunction::Casimir { .. }) => coeffs,
        _ => return Err(Error::InvalidArgument("casimir checks need two Casimir functions".into())),
    };
    let mut rep = CasimirReport {
        commutation: T::zero(),
        isotropy: T::zero(),
        matched: T::zero(),
        samples: samples.len(),
    };
    for s in samples {
        if s.m.matrix().frobenius_norm() <= T::epsilon() {
            return Err(Error::InvalidArgument(
                "sample at the origin of the dual lies outside the regular locus".into(),
            ));
        }
        let fg = ctg_flow(f, Side::Left, &ctg_flow(g, Side::Right, s, t, settings)?, t, settings)?;
        let gf = ctg_flow(g, Side::Right, &ctg_flow(f, Side::Left, s, t, settings)?, t, settings)?;
        rep.commutation = rep.commutation.max(fg.distance(&gf));

        let unit = CotangentGroupPoint::unit(&s.m);
        let end = ctg_flow(f, Side::Left, &unit, t, settings)?;
        let left = end.m.matrix().distance(s.m.matrix());
        let right = end.right_projection().distance(s.m.matrix());
        rep.isotropy = rep.isotropy.max(left.max(right));

        let twin = DualFunction::matched_casimir(coeffs, half_norm_sq(s.m.matrix()));
        let end_twin = ctg_flow(&twin, Side::Left, &unit, t, settings)?;
        rep.matched = rep.matched.max(end.distance(&end_twin));
    }
    Ok(rep)
}

fn dexp_frame<T: Real>(theta: &SquareMatrix<T>, basis: &[SquareMatrix<T>]) -> Vec<SquareMatrix<T>> {
    // right-trivialized derivative of exp: sum_j ad_theta^j(e) / (j + 1)!
    basis
        .iter()
        .map(|e| {
            let mut term = e.clone();
            let mut acc = e.clone();
            for j in 1..40 {
                term = theta.commutator(&term).scale_real(T::one() / T::lit((j + 1) as f64));
                if term.frobenius_norm() <= T::epsilon() * acc.frobenius_norm() {
                    break;
                }
                acc = &acc + &term;
            }
            acc
        })
        .collect()
}

fn log_near_identity<T: Real>(u: &SquareMatrix<T>) -> Result<SquareMatrix<T>> {
    let n = u.n();
    let a = u - &SquareMatrix::identity(n);
    if a.frobenius_norm() > T::lit(0.5) {
        return Err(Error::InvalidArgument("chart log requested far from the identity".into()));
    }
    let mut pow = a.clone();
    let mut acc = a.clone();
    for k in 2..200 {
        pow = &pow * &a;
        let term = pow.scale_real(T::lit(if k % 2 == 0 { -1.0 } else { 1.0 } / k as f64));
        acc = &acc + &term;
        if term.frobenius_norm() <= T::epsilon() * T::lit(1e-2) {
            break;
        }
    }
    Ok(acc)
}

/// Canonical chart `(theta, p)` centered at a point of `T*G`:
/// `g = exp(sum theta_k e_k) g_c` and `p_k = <m, dexp(e_k)>`, in which the
/// Liouville form is `sum p_k dtheta_k`.
struct Chart<T> {
    center: SquareMatrix<T>,
    basis: Vec<SquareMatrix<T>>,
}

impl<T: Real> Chart<T> {
    fn new(center: &SpecialUnitaryElement<T>) -> Self {
        Self {
            center: center.matrix().clone(),
            basis: su_basis(center.n()),
        }
    }

    fn coords(&self, pt: &CotangentGroupPoint<T>) -> Result<Vec<T>> {
        let theta = log_near_identity(&(pt.g.matrix() * &self.center.adjoint()))?;
        let frame = dexp_frame(&theta, &self.basis);
        let mut out = su_coords(&theta);
        out.extend(frame.iter().map(|t| su_pair(pt.m.matrix(), t)));
        Ok(out)
    }

    fn point(&self, z: &[T]) -> Result<CotangentGroupPoint<T>> {
        let n = self.center.n();
        let d = self.basis.len();
        let theta = su_from_coords(n, &z[..d]);
        let frame = dexp_frame(&theta, &self.basis);
        let mut b = vec![T::zero(); d * d];
        for (k, t) in frame.iter().enumerate() {
            for (j, e) in self.basis.iter().enumerate() {
                b[k * d + j] = su_pair(e, t);
            }
        }
        let c = linalg::solve_real(&b, &z[d..])?;
        let g = &matrix_exp(&theta) * &self.center;
        CotangentGroupPoint::new(
            SpecialUnitaryElement::new(g)?,
            AntiHermitianTraceless::new(su_from_coords(n, &c))?,
        )
    }
}

/// `||J^T Omega J - Omega||_F` of the time-1 flow at `start`, in canonical
/// charts centered at `start` and at its image.
pub fn ctg_symplectic_defect<T: Real>(
    f: &DualFunction<T>,
    side: Side,
    start: &CotangentGroupPoint<T>,
    settings: &FlowSettings<T>,
) -> Result<T> {
    let image = ctg_flow(f, side, start, T::one(), settings)?;
    let chart_in = Chart::new(&start.g);
    let chart_out = Chart::new(&image.g);
    let z0 = chart_in.coords(start)?;
    let j = fd_jacobian(
        |z| chart_out.coords(&ctg_flow(f, side, &chart_in.point(z)?, T::one(), settings)?),
        &z0,
    )?;
    Ok(symplectic_defect(&j, &canonical_omega(chart_in.basis.len())))
}

/// `(iπ/2) diag(1, -1)`, whose exponential is `diag(i, -i)`.
pub fn quarter_turn<T: Real>() -> AntiHermitianTraceless<T> {
    let a = T::FRAC_PI_2();
    AntiHermitianTraceless::new(SquareMatrix::from_diag(&[Complex::new(T::zero(), a), Complex::new(T::zero(), -a)]))
        .expect("diagonal imaginary traceless")
}
