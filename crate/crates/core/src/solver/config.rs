use std::time::Duration;

/// How the first solution is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Each component 0 or 1 with equal probability.
    #[default]
    Binary,
    /// Each component uniform in `[0, 1)`.
    Uniform,
}

impl std::str::FromStr for InitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(InitMode::Binary),
            "uniform" => Ok(InitMode::Uniform),
            other => Err(format!(
                "unknown init mode `{other}` (expected binary|uniform)"
            )),
        }
    }
}

/// What a quantized candidate must beat to be adopted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuantizeReference {
    /// The current solution, i.e. the one just improved by the gradual phase.
    #[default]
    Current,
    /// The solution the cycle started from, before the gradual phase. Later
    /// snaps in the same phase compare against the last adopted snap.
    CycleStart,
}

impl std::str::FromStr for QuantizeReference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "current" => Ok(QuantizeReference::Current),
            "cycle-start" => Ok(QuantizeReference::CycleStart),
            other => Err(format!(
                "unknown quantize reference `{other}` (expected current|cycle-start)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("mu must be finite and > 1, got {0}")]
    InvalidMu(f64),
    #[error("need 0 < delta_min <= delta_init <= delta_max = {delta_max}; got delta_min = {delta_min}, delta_init = {delta_init}")]
    InvalidDelta {
        delta_min: f64,
        delta_init: f64,
        delta_max: f64,
    },
    #[error("stay probability must lie in [0, 1], got {0}")]
    InvalidStayProbability(f64),
    #[error("population size must be at least 1")]
    EmptyPopulation,
    #[error("max_flux_attempts must be at least 1")]
    NoFluxAttempts,
}

/// Parameters of the search. `delta_max` is derived as `1 / mu`, so the
/// coarsest quantization grid (`delta_max * mu`) is the binary grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Step shrink/grow factor.
    pub mu: f64,
    pub delta_init: f64,
    /// Floor for the step size; rejections never shrink it further.
    pub delta_min: f64,
    pub stay_probability: f64,
    /// Budget in cycles, one admissibility check round per cycle.
    pub max_cycles: u64,
    pub time_limit: Option<Duration>,
    pub population_size: usize,
    pub seed: u64,
    pub init: InitMode,
    /// Adopt the last quantized candidate on phase exit even when it does
    /// not improve fitness.
    pub force_quantize: bool,
    pub quantize_reference: QuantizeReference,
    /// Cap on flux attempts in the gradual phase of one cycle. The phase
    /// also ends on the first acceptance or on a rejection at `delta_min`.
    pub max_flux_attempts: u32,
    /// Collect a [`TraceRecord`](super::TraceRecord) list in the outcome.
    pub record_trace: bool,
}

pub const DEFAULT_SEED: u64 = 0x5EED_0FC0_FFEE;

impl Default for SolverConfig {
    fn default() -> Self {
        Self::with_mu(2.0)
    }
}

impl SolverConfig {
    /// Defaults scaled to `mu`: `delta_init = delta_max = 1/mu`,
    /// `delta_min = mu^-2`.
    ///
    /// Every rejection shrinks the step, and from a binary start almost
    /// every early candidate is rejected (fitness is 0 until every clause
    /// has some support), so with a deep floor the step collapses to the floor within a few cycles and the
    /// search crawls. On planted 3-SAT with 20 variables and 60 clauses a
    /// floor of `mu^-20` solves almost nothing in 100k cycles, while
    /// `mu^-2` solves roughly 90%.
    pub fn with_mu(mu: f64) -> Self {
        SolverConfig {
            mu,
            delta_init: 1.0 / mu,
            delta_min: mu.powi(-2),
            stay_probability: 1.0 / 3.0,
            max_cycles: 100_000,
            time_limit: None,
            population_size: 1,
            seed: DEFAULT_SEED,
            init: InitMode::Binary,
            force_quantize: false,
            quantize_reference: QuantizeReference::Current,
            max_flux_attempts: 64,
            record_trace: false,
        }
    }

    pub fn delta_max(&self) -> f64 {
        1.0 / self.mu
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.mu.is_finite() && self.mu > 1.0) {
            return Err(ConfigError::InvalidMu(self.mu));
        }
        let delta_max = self.delta_max();
        if !(self.delta_min > 0.0
            && self.delta_min <= self.delta_init
            && self.delta_init <= delta_max)
        {
            return Err(ConfigError::InvalidDelta {
                delta_min: self.delta_min,
                delta_init: self.delta_init,
                delta_max,
            });
        }
        if !(0.0..=1.0).contains(&self.stay_probability) {
            return Err(ConfigError::InvalidStayProbability(self.stay_probability));
        }
        if self.population_size == 0 {
            return Err(ConfigError::EmptyPopulation);
        }
        if self.max_flux_attempts == 0 {
            return Err(ConfigError::NoFluxAttempts);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SolverConfig::default();
        c.validate().unwrap();
        assert_eq!(c.mu, 2.0);
        assert_eq!(c.delta_init, 0.5);
        assert_eq!(c.delta_max(), 0.5);
        assert_eq!(c.delta_min, 0.25);
        assert_eq!(c.delta_max() * c.mu, 1.0);
        assert_eq!(c.max_cycles, 100_000);
        assert_eq!(c.population_size, 1);
    }

    #[test]
    fn other_mu_defaults_are_valid() {
        for mu in [1.5, 3.0, 4.0, 10.0] {
            SolverConfig::with_mu(mu).validate().unwrap();
        }
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |f: fn(&mut SolverConfig)| {
            let mut c = SolverConfig::default();
            f(&mut c);
            c.validate().unwrap_err()
        };
        assert!(matches!(bad(|c| c.mu = 1.0), ConfigError::InvalidMu(_)));
        assert!(matches!(
            bad(|c| c.delta_init = 0.75),
            ConfigError::InvalidDelta { .. }
        ));
        assert!(matches!(
            bad(|c| c.delta_min = 0.0),
            ConfigError::InvalidDelta { .. }
        ));
        assert!(matches!(
            bad(|c| c.delta_min = 0.6),
            ConfigError::InvalidDelta { .. }
        ));
        assert!(matches!(
            bad(|c| c.stay_probability = -0.1),
            ConfigError::InvalidStayProbability(_)
        ));
        assert!(matches!(
            bad(|c| c.population_size = 0),
            ConfigError::EmptyPopulation
        ));
        assert!(matches!(
            bad(|c| c.max_flux_attempts = 0),
            ConfigError::NoFluxAttempts
        ));
    }

    #[test]
    fn init_mode_parsing() {
        assert_eq!("binary".parse::<InitMode>().unwrap(), InitMode::Binary);
        assert_eq!("uniform".parse::<InitMode>().unwrap(), InitMode::Uniform);
        assert!("other".parse::<InitMode>().is_err());
    }
}
