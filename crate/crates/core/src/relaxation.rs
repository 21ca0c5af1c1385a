//! Continuous probabilistic relaxation of a CNF formula.
//!
//! Each variable carries a value `X_i` in `[0, 1]`, read as the probability
//! that the variable is true. A literal is true with probability `X_i`
//! (or `1 - X_i` when negated), a clause with probability
//! `1 - prod(1 - p(lit))`, and the fitness is the product of clause
//! probabilities, treating clauses as independent.
//!
//! Convention note: the operator formulas this method was first described
//! with (`Y = X1 * X2` for OR, `Y = X1 + X2 - X1 * X2` for AND) are the
//! probability-of-false reading. We use probability-of-true instead so that
//! a fitness of exactly 1 marks a satisfying assignment, which is what the
//! admissibility test checks for. The two readings are related by
//! `X_i -> 1 - X_i`.

use rand::Rng;

use crate::formula::{BinaryAssignment, Clause, CnfFormula, FormulaError, Literal};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RelaxationError {
    #[error("grid resolution must lie in (0, 1], got {0}")]
    InvalidResolution(f64),
    #[error("flux step must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("stay probability must lie in [0, 1], got {0}")]
    InvalidStayProbability(f64),
}

/// A point of the unit hypercube. All constructors and mutators clamp.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousAssignment(Vec<f64>);

impl ContinuousAssignment {
    pub fn new(values: Vec<f64>) -> Self {
        ContinuousAssignment(values.into_iter().map(clamp_unit).collect())
    }

    pub fn from_binary(b: &BinaryAssignment) -> Self {
        ContinuousAssignment(
            b.values()
                .iter()
                .map(|&v| if v { 1.0 } else { 0.0 })
                .collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn set(&mut self, index: usize, value: f64) {
        self.0[index] = clamp_unit(value);
    }

    /// Largest per-coordinate difference. Panics on length mismatch.
    pub fn linf_distance(&self, other: &ContinuousAssignment) -> f64 {
        assert_eq!(self.len(), other.len(), "assignment lengths differ");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    #[inline]
    fn literal_probability(&self, lit: Literal) -> f64 {
        let x = self.0[lit.var()];
        if lit.is_negated() {
            1.0 - x
        } else {
            x
        }
    }
}

#[inline]
fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// Fitness value in `[0, 1]`; 1 exactly at satisfying corners.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fitness(f64);

impl Fitness {
    pub const ZERO: Fitness = Fitness(0.0);
    pub const ONE: Fitness = Fitness(1.0);

    pub fn new(value: f64) -> Self {
        Fitness(clamp_unit(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }
}

/// Probability that `clause` is satisfied under independent variables.
pub fn clause_probability(clause: &Clause, x: &ContinuousAssignment) -> f64 {
    let all_false: f64 = clause
        .literals()
        .iter()
        .map(|&l| 1.0 - x.literal_probability(l))
        .product();
    1.0 - all_false
}

/// The fitness `eta`: product over clauses of [`clause_probability`].
pub fn eval_fitness(
    formula: &CnfFormula,
    x: &ContinuousAssignment,
) -> Result<Fitness, FormulaError> {
    if x.len() != formula.num_variables() {
        return Err(FormulaError::LengthMismatch {
            expected: formula.num_variables(),
            actual: x.len(),
        });
    }
    let mut eta = 1.0;
    for clause in formula.clauses() {
        eta *= clause_probability(clause, x);
        if eta == 0.0 {
            break;
        }
    }
    Ok(Fitness::new(eta))
}

/// A precision level: values are representable only as multiples of the
/// resolution `g` (clamped to `[0, 1]`). `g = mu^-k` encodes `k` base-`mu`
/// digits of precision; `g = 1` is the binary grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationGrid {
    resolution: f64,
}

impl QuantizationGrid {
    pub fn new(resolution: f64) -> Result<Self, RelaxationError> {
        if resolution.is_finite() && resolution > 0.0 && resolution <= 1.0 {
            Ok(QuantizationGrid { resolution })
        } else {
            Err(RelaxationError::InvalidResolution(resolution))
        }
    }

    pub fn binary() -> Self {
        QuantizationGrid { resolution: 1.0 }
    }

    /// Grid with `digits` base-`mu` digits, i.e. resolution `mu^-digits`.
    pub fn with_digits(mu: f64, digits: u32) -> Result<Self, RelaxationError> {
        Self::new(mu.powi(-(digits as i32)))
    }

    pub fn resolution(self) -> f64 {
        self.resolution
    }

    /// Nearest grid point, ties rounded up.
    #[inline]
    pub fn snap(self, x: f64) -> f64 {
        let k = (x / self.resolution + 0.5).floor();
        clamp_unit(k * self.resolution)
    }

    pub fn contains(self, x: f64) -> bool {
        self.snap(x) == x
    }

    pub fn contains_all(self, x: &ContinuousAssignment) -> bool {
        x.values().iter().all(|&v| self.contains(v))
    }
}

pub fn quantize(x: &ContinuousAssignment, grid: QuantizationGrid) -> ContinuousAssignment {
    ContinuousAssignment(x.values().iter().map(|&v| grid.snap(v)).collect())
}

/// Rounds each component at 0.5 (ties to true).
pub fn to_binary(x: &ContinuousAssignment) -> BinaryAssignment {
    BinaryAssignment::new(x.values().iter().map(|&v| v >= 0.5).collect())
}

/// Step size and move distribution for the random flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxParams {
    delta: f64,
    stay_probability: f64,
}

impl FluxParams {
    pub fn new(delta: f64, stay_probability: f64) -> Result<Self, RelaxationError> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(RelaxationError::InvalidDelta(delta));
        }
        if !(0.0..=1.0).contains(&stay_probability) {
            return Err(RelaxationError::InvalidStayProbability(stay_probability));
        }
        Ok(FluxParams {
            delta,
            stay_probability,
        })
    }

    pub fn delta(self) -> f64 {
        self.delta
    }

    pub fn stay_probability(self) -> f64 {
        self.stay_probability
    }

    /// Stay with `stay_probability`, otherwise up or down with equal odds.
    pub fn sample_move<R: Rng + ?Sized>(self, rng: &mut R) -> Move {
        let u: f64 = rng.random();
        let up = self.stay_probability + 0.5 * (1.0 - self.stay_probability);
        if u < self.stay_probability {
            Move::Stay
        } else if u < up {
            Move::Up
        } else {
            Move::Down
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Stay,
    Up,
    Down,
}

impl Move {
    #[inline]
    pub fn apply(self, x: f64, delta: f64) -> f64 {
        match self {
            Move::Stay => x,
            Move::Up => clamp_unit(x + delta),
            Move::Down => clamp_unit(x - delta),
        }
    }
}

/// Applies one move per coordinate. Panics if `moves` is shorter than `x`.
pub fn apply_moves(x: &ContinuousAssignment, delta: f64, moves: &[Move]) -> ContinuousAssignment {
    assert!(moves.len() >= x.len(), "one move per coordinate required");
    ContinuousAssignment(
        x.values()
            .iter()
            .zip(moves)
            .map(|(&v, m)| m.apply(v, delta))
            .collect(),
    )
}

/// Random fluctuation: every coordinate independently stays or moves by
/// `+-delta`, then clamps. Consumes exactly one `f64` draw per coordinate.
pub fn flux<R: Rng + ?Sized>(
    x: &ContinuousAssignment,
    params: FluxParams,
    rng: &mut R,
) -> ContinuousAssignment {
    ContinuousAssignment(
        x.values()
            .iter()
            .map(|&v| params.sample_move(rng).apply(v, params.delta))
            .collect(),
    )
}
