//! Classical fourth-order Runge-Kutta on flat real state vectors.
//!
//! The update is evaluated per component as `x + h * (k1 + 2 k2 + 2 k3 + k4) / 6`,
//! so a constant vector field with dyadic data and a power-of-two step count
//! is integrated without any rounding.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn rk4_step<T, F>(field: &mut F, x: &[T], h: T) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Result<Vec<T>>,
{
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let k1 = field(x)?;
    let y: Vec<T> = x.iter().zip(&k1).map(|(&a, &k)| a + h * half * k).collect();
    let k2 = field(&y)?;
    let y: Vec<T> = x.iter().zip(&k2).map(|(&a, &k)| a + h * half * k).collect();
    let k3 = field(&y)?;
    let y: Vec<T> = x.iter().zip(&k3).map(|(&a, &k)| a + h * k).collect();
    let k4 = field(&y)?;
    let out: Vec<T> = (0..x.len())
        .map(|i| x[i] + h * (k1[i] + two * k2[i] + two * k3[i] + k4[i]) / six)
        .collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("rk4 step"));
    }
    Ok(out)
}

/// Integrate from `t = 0` to `t_final` in `steps` equal steps, calling
/// `observe(step_index, t, state)` on the initial state and after each step.
pub fn integrate<T, F, O>(
    mut field: F,
    x0: &[T],
    t_final: T,
    steps: usize,
    mut observe: O,
) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Result<Vec<T>>,
    O: FnMut(usize, T, &[T]) -> Result<()>,
{
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if !t_final.is_finite() {
        return Err(Error::InvalidArgument("final time must be finite".into()));
    }
    let h = t_final / T::lit(steps as f64);
    let mut x = x0.to_vec();
    observe(0, T::zero(), &x)?;
    for k in 1..=steps {
        x = rk4_step(&mut field, &x, h)?;
        observe(k, h * T::lit(k as f64), &x)?;
    }
    Ok(x)
}

/// Endpoint only.
pub fn flow<T, F>(field: F, x0: &[T], t_final: T, steps: usize) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Result<Vec<T>>,
{
    integrate(field, x0, t_final, steps, |_, _, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_fourth_order() {
        let run = |steps| {
            let x = flow(|x: &[f64]| Ok(vec![-x[0]]), &[1.0], 1.0, steps).unwrap();
            (x[0] - (-1.0f64).exp()).abs()
        };
        let ratio = run(10) / run(20);
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }

    #[test]
    fn constant_field_is_exact_for_dyadic_data() {
        let x = flow(|_: &[f64]| Ok(vec![0.75, -1.25]), &[0.0, 0.0], 1.0, 64).unwrap();
        assert_eq!(x, vec![0.75, -1.25]);
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(flow(|_: &[f64]| Ok(vec![0.0]), &[0.0], 1.0, 0).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let r = flow(|x: &[f64]| Ok(vec![x[0] * x[0] * 1e300]), &[1e10], 1.0, 4);
        assert_eq!(r.err(), Some(Error::NonFinite("rk4 step")));
    }
}
