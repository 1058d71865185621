//! Finite point clouds standing in for generated Lagrangian submanifolds.

use std::io::{self, Write};

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct SamplePoint<T> {
    pub param: Vec<T>,
    pub phase: Vec<T>,
    pub residuals: Vec<T>,
}

/// Column-labelled point cloud `{(parameter, phase-space point, residuals)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianSample<T> {
    pub param_names: Vec<String>,
    pub phase_names: Vec<String>,
    pub residual_names: Vec<String>,
    pub points: Vec<SamplePoint<T>>,
}

impl<T: Real> LagrangianSample<T> {
    pub fn new(param_names: Vec<String>, phase_names: Vec<String>, residual_names: Vec<String>) -> Self {
        Self {
            param_names,
            phase_names,
            residual_names,
            points: Vec::new(),
        }
    }

    pub fn push(&mut self, param: Vec<T>, phase: Vec<T>, residuals: Vec<T>) {
        debug_assert_eq!(param.len(), self.param_names.len());
        debug_assert_eq!(phase.len(), self.phase_names.len());
        debug_assert_eq!(residuals.len(), self.residual_names.len());
        self.points.push(SamplePoint {
            param,
            phase,
            residuals,
        });
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest value of residual column `k` over the cloud.
    pub fn max_residual(&self, k: usize) -> T {
        self.points
            .iter()
            .fold(T::zero(), |m, p| m.max(p.residuals[k].abs()))
    }

    /// Header row then one row per point. Values use Rust's shortest
    /// round-trip formatting, so output is deterministic.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<&str> = self
            .param_names
            .iter()
            .chain(&self.phase_names)
            .chain(&self.residual_names)
            .map(String::as_str)
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for p in &self.points {
            let row: Vec<String> = p
                .param
                .iter()
                .chain(&p.phase)
                .chain(&p.residuals)
                .map(|v| format_value(v.to_f64_lossy()))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Shortest round-trip text for `v`: plain decimals for moderate magnitudes,
/// exponent form below 1e-4 or from 1e15 on. Negative zero prints as `0`.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".to_string()
    } else if (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Column names `prefix{i}{j}_re`, `prefix{i}{j}_im` matching
/// [`crate::matrix::SquareMatrix::to_real_vec`].
pub fn matrix_column_names(prefix: &str, n: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            names.push(format!("{prefix}{i}{j}_re"));
            names.push(format!("{prefix}{i}{j}_im"));
        }
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(-0.0), "0");
        assert_eq!(format_value(0.25), "0.25");
        assert_eq!(format_value(1.8555e-11), "1.8555e-11");
        assert_eq!(format_value(-3e20), "-3e20");
        assert_eq!(format_value(1.0), "1");
        for v in [1.0 / 3.0, 2.0e-7, -123456.789] {
            assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_layout() {
        let mut s = LagrangianSample::<f64>::new(vec!["x".into()], vec!["q".into(), "p".into()], vec!["r".into()]);
        s.push(vec![0.5], vec![1.0, -2.0], vec![1e-17]);
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "x,q,p,r\n0.5,1,-2,1e-17\n");
        assert_eq!(s.max_residual(0), 1e-17);
    }
}
