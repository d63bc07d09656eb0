//! Search budgets shared by the ordering tests and the union optimizer.

use serde::{Deserialize, Serialize};

/// Default seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub seed: u64,
    /// Verdicts with a violation in `(0, tolerance]` are undecided.
    pub tolerance: f64,
    /// Random midpoint pairs for the concavity test.
    pub pairs: usize,
    /// Random lines for the second-difference scan.
    pub lines: usize,
    /// Grid resolution for seeding the more-capable maximization.
    pub grid: f64,
    /// Auxiliary alphabet sizes per chain level (top first). `None` means `|X| + 2`.
    pub cardinalities: Option<Vec<usize>>,
    pub multistarts: usize,
    pub iterations: usize,
    /// Initial projected-gradient step size.
    pub step: f64,
    /// Support-direction weights λ for the sweep `λ R0 + R1`.
    pub lambdas: Vec<f64>,
    /// Extra union directions placed along the widest inner/outer gap.
    pub refine: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            tolerance: 1e-7,
            pairs: 50_000,
            lines: 1_000,
            grid: 0.01,
            cardinalities: None,
            multistarts: 6,
            iterations: 60,
            step: 0.5,
            lambdas: default_lambdas(),
            refine: 6,
        }
    }
}

/// `{0, 0.1, ..., 3.0} ∪ {10, 1000}`
pub fn default_lambdas() -> Vec<f64> {
    (0..=30)
        .map(|i| i as f64 / 10.0)
        .chain([10.0, 1000.0])
        .collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("auxiliary cardinalities must be at least 1")]
    Cardinality,
    #[error("multistarts must be at least 1")]
    Multistarts,
    #[error("support weights must be nonnegative and finite")]
    Lambda,
    #[error("grid resolution must lie in (0, 1]")]
    Grid,
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Reduced budgets for quick checks.
    pub fn fast(seed: u64) -> Self {
        Self {
            seed,
            pairs: 5_000,
            lines: 200,
            multistarts: 3,
            iterations: 30,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self
            .cardinalities
            .as_ref()
            .is_some_and(|c| c.iter().any(|&n| n == 0))
        {
            return Err(ConfigError::Cardinality);
        }
        if self.multistarts == 0 {
            return Err(ConfigError::Multistarts);
        }
        if self.lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(ConfigError::Lambda);
        }
        if !(self.grid > 0.0 && self.grid <= 1.0) {
            return Err(ConfigError::Grid);
        }
        Ok(())
    }

    /// Cardinality of auxiliary level `level` for input alphabet size `x`.
    pub fn cardinality(&self, level: usize, x: usize) -> usize {
        match &self.cardinalities {
            Some(c) if !c.is_empty() => c[level.min(c.len() - 1)],
            _ => x + 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = SearchConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(c.lambdas.len(), 33);
        assert_eq!(c.lambdas[30], 3.0);
        assert_eq!(c.cardinality(0, 2), 4);
        let bad = SearchConfig {
            lambdas: vec![-1.0],
            ..c
        };
        assert_eq!(bad.validate(), Err(ConfigError::Lambda));
    }
}
