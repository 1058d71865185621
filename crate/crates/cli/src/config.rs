//! JSON run configurations, one per subcommand. Every key is optional;
//! missing keys take the defaults below, unknown keys are rejected.

use std::fs;
use std::path::Path;

use phasegroup::groupoid::cotangent::DualFunction;
use phasegroup::groupoid::{FieldSpec, Side};
use phasegroup::MatrixJson;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 20240601;

pub fn load<C: DeserializeOwned + Default>(path: Option<&Path>) -> Result<C, CliError> {
    match path {
        None => Ok(C::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

/// Inline JSON (starting with `{`) or a path to a JSON file.
pub fn matrix_arg(arg: &str) -> Result<MatrixJson, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Config(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(CliError::config)
}

fn check(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg.to_string()))
    }
}

fn check_n(n: usize) -> Result<(), CliError> {
    check((2..=16).contains(&n), "n must lie in 2..=16")
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    check(tol.is_finite() && tol > 0.0, "tolerance must be positive and finite")
}

fn check_steps(steps: usize) -> Result<(), CliError> {
    check(steps > 0, "steps must be at least 1")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeConfig {
    pub seed: u64,
    pub n: usize,
    /// Random SL(N, C) inputs, used when `g` is absent.
    pub samples: usize,
    pub g: Option<MatrixJson>,
    /// Relative to `||g||_F`.
    pub tolerance: f64,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            n: 3,
            samples: 100,
            g: None,
            tolerance: 1e-12,
        }
    }
}

impl DecomposeConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        check_tol(self.tolerance)?;
        match &self.g {
            Some(g) => check_n(g.n),
            None => {
                check_n(self.n)?;
                check(self.samples > 0, "samples must be at least 1")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub seed: u64,
    pub n: usize,
    pub epsilon: f64,
    pub t: f64,
    pub steps: usize,
    pub renormalize: bool,
    /// Initial point; a seeded `u gamma` when absent.
    pub g0: Option<MatrixJson>,
    /// Spread of the random triangular factor.
    pub spread: f64,
    /// Bound on every conserved-quantity drift.
    pub tolerance: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            n: 2,
            epsilon: 1.0,
            t: 1.0,
            steps: 1000,
            renormalize: false,
            g0: None,
            spread: 0.3,
            tolerance: 1e-8,
        }
    }
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        check_n(self.g0.as_ref().map_or(self.n, |g| g.n))?;
        check(self.epsilon.is_finite() && self.epsilon != 0.0, "epsilon must be finite and nonzero")?;
        check(self.t.is_finite(), "t must be finite")?;
        check(self.spread.is_finite() && self.spread >= 0.0, "spread must be nonnegative")?;
        check_steps(self.steps)?;
        check_tol(self.tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeConfig {
    pub seed: u64,
    pub n: usize,
    pub epsilon: f64,
    pub samples: usize,
    /// Standard deviation of `log gamma_kk` of the random SB(N) inputs.
    pub spread: f64,
    /// Also run the inverses and report round-trip residuals.
    pub invert: bool,
    pub tolerance: f64,
}

impl Default for FeConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            n: 2,
            epsilon: 1.0,
            samples: 100,
            spread: 0.5,
            invert: false,
            tolerance: 1e-9,
        }
    }
}

impl FeConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        check_n(self.n)?;
        check(self.epsilon.is_finite() && self.epsilon != 0.0, "epsilon must be finite and nonzero")?;
        check(self.samples > 0, "samples must be at least 1")?;
        check(self.spread.is_finite() && self.spread >= 0.0, "spread must be nonnegative")?;
        check_tol(self.tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhiConfig {
    pub seed: u64,
    pub n: usize,
    pub c: f64,
    pub steps: usize,
    /// Initial momentum; a seeded unit-norm element when absent.
    pub eta0: Option<MatrixJson>,
    /// Compare with the coordinate oracle.
    pub oracle: bool,
    /// Sample a seeded grid of momenta instead of a single `eta0`.
    pub grid: bool,
    pub grid_points: usize,
    pub grid_max_norm: f64,
    /// Bound on the oracle distance.
    pub tolerance: f64,
}

impl Default for PhiConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            n: 2,
            c: 1.0,
            steps: 1000,
            eta0: None,
            oracle: false,
            grid: false,
            grid_points: 20,
            grid_max_norm: 2.0,
            tolerance: 1e-6,
        }
    }
}

impl PhiConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        check_n(self.eta0.as_ref().map_or(self.n, |e| e.n))?;
        check(self.c.is_finite() && self.c > 0.0, "c must be positive")?;
        check_steps(self.steps)?;
        check(self.grid_points > 0, "grid_points must be at least 1")?;
        check(self.grid_max_norm.is_finite() && self.grid_max_norm >= 0.0, "grid_max_norm must be nonnegative")?;
        check_tol(self.tolerance)
    }
}

/// `lo:hi:steps`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Range {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || CliError::Config(format!("bad range {s:?}, expected lo:hi:steps"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let steps: usize = parts[2].parse().map_err(|_| bad())?;
        if !lo.is_finite() || !hi.is_finite() || steps == 0 || lo > hi {
            return Err(bad());
        }
        Ok(Self { lo, hi, steps })
    }
}

/// `eps_min:eps_max:steps,c_min:c_max:steps`
pub fn parse_scan(s: &str) -> Result<(Range, Range), CliError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| CliError::Config(format!("bad scan {s:?}, expected two ranges separated by a comma")))?;
    Ok((Range::parse(a)?, Range::parse(b)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompatConfig {
    pub seed: u64,
    pub n: usize,
    pub epsilon: f64,
    pub c: f64,
    pub steps: usize,
    /// Random directions in su(N); each is taken at every sample norm.
    pub directions: usize,
    /// `eps_min:eps_max:steps,c_min:c_max:steps`; overrides `epsilon` and `c`.
    pub scan: Option<String>,
    /// Recorded in the CSV header; the residuals are reported, not bounded.
    pub tolerance: f64,
}

impl Default for CompatConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            n: 2,
            epsilon: 1.0,
            c: 1.0,
            steps: 1000,
            directions: 4,
            scan: None,
            tolerance: 1e-3,
        }
    }
}

impl CompatConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        check_n(self.n)?;
        check(self.epsilon.is_finite() && self.epsilon != 0.0, "epsilon must be finite and nonzero")?;
        check(self.c.is_finite() && self.c > 0.0, "c must be positive")?;
        check_steps(self.steps)?;
        check(self.directions > 0, "directions must be at least 1")?;
        if let Some(s) = &self.scan {
            let (e, c) = parse_scan(s)?;
            check(e.lo != 0.0 && e.hi != 0.0 && (e.lo > 0.0) == (e.hi > 0.0), "epsilon range must not contain 0")?;
            check(c.lo > 0.0, "c range must be positive")?;
        }
        check_tol(self.tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CotangentExample {
    pub n: usize,
    /// su(N) coordinates of `X`; the quarter turn `(i pi / 2) diag(1, -1)` when absent.
    pub x: Option<Vec<f64>>,
    pub side: Side,
    pub fiber_points: usize,
    pub fiber_max_norm: f64,
}

impl Default for CotangentExample {
    fn default() -> Self {
        Self {
            n: 2,
            x: None,
            side: Side::Left,
            fiber_points: 50,
            fiber_max_norm: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairExample {
    pub field: FieldSpec<f64>,
    pub side: Side,
    pub points: usize,
    /// Grid points are drawn from `[-half_width, half_width]^d`.
    pub half_width: f64,
}

impl Default for PairExample {
    fn default() -> Self {
        Self {
            field: FieldSpec::Oscillator { dim: 2 },
            side: Side::Left,
            points: 20,
            half_width: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoissonExample {
    /// Antisymmetric `r^{jk}`, row-major rows.
    pub r: Vec<Vec<f64>>,
    pub field: FieldSpec<f64>,
    pub points: usize,
    pub half_width: f64,
    /// Times at which the phase lift is sampled.
    pub t_grid: Vec<f64>,
}

impl Default for PoissonExample {
    fn default() -> Self {
        Self {
            r: vec![vec![0.0, 1.0], vec![-1.0, 0.0]],
            field: FieldSpec::Wave {
                k: vec![1.0, -0.5],
                amplitude: 0.8,
            },
            points: 20,
            half_width: 1.0,
            t_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExamplesConfig {
    pub seed: u64,
    pub steps: usize,
    /// Excursion radius; a flow leaving this box aborts.
    pub radius: f64,
    pub tolerance: f64,
    pub cotangent: CotangentExample,
    pub pair: PairExample,
    pub constant_poisson: PoissonExample,
}

impl Default for ExamplesConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            steps: 256,
            radius: 1e6,
            tolerance: 1e-8,
            cotangent: CotangentExample::default(),
            pair: PairExample::default(),
            constant_poisson: PoissonExample::default(),
        }
    }
}

impl ExamplesConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        check_steps(self.steps)?;
        check(self.radius > 0.0, "radius must be positive")?;
        check_tol(self.tolerance)?;
        let ct = &self.cotangent;
        check_n(ct.n)?;
        if let Some(x) = &ct.x {
            check(x.len() == ct.n * ct.n - 1, "cotangent.x needs n^2 - 1 coordinates")?;
        } else {
            check(ct.n == 2, "the default quarter turn needs n = 2")?;
        }
        check(ct.fiber_points > 0, "cotangent.fiber_points must be at least 1")?;
        check(ct.fiber_max_norm.is_finite() && ct.fiber_max_norm >= 0.0, "cotangent.fiber_max_norm must be nonnegative")?;
        let p = &self.pair;
        p.field.validate().map_err(CliError::config)?;
        check(phasegroup::groupoid::ScalarField::dim(&p.field) % 2 == 0, "pair.field needs an even dimension")?;
        check(p.points > 0 && p.half_width >= 0.0, "pair grid must be nonempty")?;
        let cp = &self.constant_poisson;
        cp.field.validate().map_err(CliError::config)?;
        check(
            phasegroup::groupoid::ScalarField::dim(&cp.field) == cp.r.len(),
            "constant_poisson.field dimension must match r",
        )?;
        check(cp.points > 0 && cp.half_width >= 0.0, "constant_poisson grid must be nonempty")?;
        check(cp.t_grid.iter().all(|t| t.is_finite()), "constant_poisson.t_grid must be finite")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CasimirConfig {
    pub seed: u64,
    pub n: usize,
    pub f: DualFunction<f64>,
    pub g: DualFunction<f64>,
    pub samples: usize,
    /// Sample momenta have norms in `[min_norm, max_norm]`.
    pub min_norm: f64,
    pub max_norm: f64,
    pub t: f64,
    pub steps: usize,
    pub radius: f64,
    pub tolerance: f64,
}

impl Default for CasimirConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            n: 2,
            f: DualFunction::Casimir {
                coeffs: vec![0.0, 1.0, 0.5],
            },
            g: DualFunction::Casimir {
                coeffs: vec![1.0, -0.3, 0.0, 0.2],
            },
            samples: 10,
            min_norm: 0.3,
            max_norm: 1.5,
            t: 1.0,
            steps: 256,
            radius: 1e6,
            tolerance: 1e-8,
        }
    }
}

impl CasimirConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        check_n(self.n)?;
        check(self.f.is_casimir() && self.g.is_casimir(), "f and g must both be Casimir functions")?;
        check(self.samples > 0, "samples must be at least 1")?;
        check(
            self.min_norm > 0.0 && self.min_norm <= self.max_norm && self.max_norm.is_finite(),
            "need 0 < min_norm <= max_norm",
        )?;
        check(self.t.is_finite(), "t must be finite")?;
        check_steps(self.steps)?;
        check(self.radius > 0.0, "radius must be positive")?;
        check_tol(self.tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        let (e, c) = parse_scan("0.25:4:5,0.5:2:3").unwrap();
        assert_eq!(e, Range { lo: 0.25, hi: 4.0, steps: 5 });
        assert_eq!(c.steps, 3);
        assert!(parse_scan("0.25:4").is_err());
        assert!(Range::parse("2:1:3").is_err());
        assert!(Range::parse("1:2:0").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<PhiConfig>(r#"{"n": 2, "cc": 1}"#).is_err());
        let c: PhiConfig = serde_json::from_str(r#"{"c": 2.0}"#).unwrap();
        assert_eq!(c.n, 2);
        assert_eq!(c.c, 2.0);
    }

    #[test]
    fn defaults_validate() {
        DecomposeConfig::default().validate().unwrap();
        EvolveConfig::default().validate().unwrap();
        FeConfig::default().validate().unwrap();
        PhiConfig::default().validate().unwrap();
        CompatConfig::default().validate().unwrap();
        ExamplesConfig::default().validate().unwrap();
        CasimirConfig::default().validate().unwrap();
    }
}
