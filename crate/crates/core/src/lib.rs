//! SAT solving by continuous relaxation.
//!
//! Boolean variables are relaxed to probabilities in `[0, 1]` and scored by
//! a smooth fitness (the probability that every clause holds when variables
//! are drawn independently). The search alternates small random moves of
//! adaptive size with quantization of the solution onto coarser grids, and
//! stops when the binary rounding satisfies the formula.
//!
//! Modules:
//! - [`formula`]: CNF formulas, DIMACS I/O, exact evaluation.
//! - [`relaxation`]: fitness, grids, quantization, random flux.
//! - [`solver`]: the search loop, population mode, traces.
//! - [`oracle`]: brute-force solving and random instance generation.
//! - [`cli`]: the `qevo-sat` command line.

pub mod cli;
pub mod formula;
pub mod oracle;
pub mod relaxation;
pub mod solver;

pub use formula::{BinaryAssignment, Clause, CnfFormula, FormulaError, Literal};
pub use relaxation::{ContinuousAssignment, Fitness, FluxParams, QuantizationGrid};
pub use solver::{solve, solve_population, SolveOutcome, SolverConfig, Status};
