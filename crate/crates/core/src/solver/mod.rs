//! The search loop.
//!
//! One cycle is:
//!
//! 1. **Gradual phase.** Random flux of the current solution with step
//!    `delta`. A candidate replaces the current solution only if its
//!    fitness is strictly higher; every rejection divides `delta` by `mu`
//!    (never below `delta_min`). The phase ends on the first acceptance,
//!    on a rejection with `delta` already at the floor, or after
//!    `max_flux_attempts` attempts.
//! 2. **Quantization phase** (only after an acceptance). The solution is
//!    snapped to the grid of step `delta * mu`. While that strictly improves
//!    fitness and `delta < delta_max`, the snapped solution is adopted,
//!    `delta` grows by `mu` and the snap repeats on the coarser grid.
//! 3. **Admissibility check.** The binary rounding of the solution is
//!    tested against the formula.
//!
//! The method is incomplete: it reports [`Status::Satisfiable`] with a
//! verified model or [`Status::Unknown`] when the budget runs out.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{BinaryAssignment, CnfFormula, FormulaError};
use crate::relaxation::{
    eval_fitness, flux, quantize, to_binary, ContinuousAssignment, Fitness, FluxParams,
    QuantizationGrid,
};

mod config;
mod trace;

pub use config::{ConfigError, InitMode, QuantizeReference, SolverConfig, DEFAULT_SEED};
pub use trace::{read_trace_csv, write_trace_csv, Phase, TraceRecord, TRACE_CSV_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Satisfiable,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Satisfiable => "SATISFIABLE",
            Status::Unknown => "UNKNOWN",
        })
    }
}

/// Receives solver events as they happen.
pub trait Observer {
    /// `current` is the solution after the event.
    fn on_record(&mut self, _record: &TraceRecord, _current: &ContinuousAssignment) {}

    /// Called for every snap inside a quantization phase with the grid used
    /// and the snapped candidate, whether or not it was adopted.
    fn on_quantize(
        &mut self,
        _grid: QuantizationGrid,
        _candidate: &ContinuousAssignment,
        _adopted: bool,
    ) {
    }
}

impl Observer for () {}

impl Observer for Vec<TraceRecord> {
    fn on_record(&mut self, record: &TraceRecord, _current: &ContinuousAssignment) {
        self.push(*record);
    }
}

/// Search state of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    current: ContinuousAssignment,
    delta: f64,
    eta: Fitness,
    cycle: u64,
    best_binary: BinaryAssignment,
    best_satisfied: usize,
}

impl SolverState {
    pub fn new(
        formula: &CnfFormula,
        current: ContinuousAssignment,
        delta: f64,
    ) -> Result<Self, FormulaError> {
        let eta = eval_fitness(formula, &current)?;
        let best_binary = to_binary(&current);
        let best_satisfied = formula.count_satisfied(&best_binary)?;
        Ok(SolverState {
            current,
            delta,
            eta,
            cycle: 0,
            best_binary,
            best_satisfied,
        })
    }

    pub fn current(&self) -> &ContinuousAssignment {
        &self.current
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eta(&self) -> Fitness {
        self.eta
    }

    /// Completed cycles.
    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    /// Binary rounding with the most satisfied clauses seen so far.
    pub fn best_binary(&self) -> &BinaryAssignment {
        &self.best_binary
    }

    pub fn best_satisfied(&self) -> usize {
        self.best_satisfied
    }

    fn adopt(&mut self, x: ContinuousAssignment, eta: Fitness) {
        self.current = x;
        self.eta = eta;
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: Status,
    /// Present iff `status` is satisfiable; always re-verified.
    pub assignment: Option<BinaryAssignment>,
    pub cycles_used: u64,
    pub wall_time: Duration,
    /// Best binary rounding seen, by satisfied clause count.
    pub best_binary: BinaryAssignment,
    pub best_satisfied: usize,
    pub trace: Option<Vec<TraceRecord>>,
}

/// The random stream of population member `member` under `seed`. Streams
/// of different members are independent, so results do not depend on the
/// order members are evaluated in.
pub fn member_rng(seed: u64, member: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member as u64);
    rng
}

fn fitness(formula: &CnfFormula, x: &ContinuousAssignment) -> Fitness {
    eval_fitness(formula, x).expect("assignment length matches formula")
}

fn flux_params(config: &SolverConfig, delta: f64) -> FluxParams {
    FluxParams::new(delta, config.stay_probability).expect("validated config")
}

pub fn init_state<R: Rng + ?Sized>(
    formula: &CnfFormula,
    config: &SolverConfig,
    rng: &mut R,
) -> SolverState {
    let n = formula.num_variables();
    let values: Vec<f64> = match config.init {
        InitMode::Binary => (0..n)
            .map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 })
            .collect(),
        InitMode::Uniform => (0..n).map(|_| rng.random::<f64>()).collect(),
    };
    SolverState::new(
        formula,
        ContinuousAssignment::new(values),
        config.delta_init,
    )
    .expect("assignment length matches formula")
}

/// Accepts `candidate` iff its fitness strictly exceeds the current one;
/// otherwise shrinks `delta` by `mu`, floored at `delta_min`.
pub fn offer_candidate(
    state: &mut SolverState,
    formula: &CnfFormula,
    config: &SolverConfig,
    candidate: ContinuousAssignment,
    observer: &mut dyn Observer,
) -> bool {
    let eta_new = fitness(formula, &candidate);
    let accepted = eta_new > state.eta;
    let record = TraceRecord {
        cycle: state.cycle,
        phase: if accepted {
            Phase::FluxAccept
        } else {
            Phase::FluxReject
        },
        delta: state.delta,
        eta_before: state.eta.value(),
        eta_after: eta_new.value(),
        jump_distance: 0.0,
    };
    if accepted {
        state.adopt(candidate, eta_new);
    } else {
        state.delta = (state.delta / config.mu).max(config.delta_min);
    }
    observer.on_record(&record, &state.current);
    accepted
}

/// One flux attempt followed by [`offer_candidate`].
pub fn gradual_step<R: Rng + ?Sized>(
    state: &mut SolverState,
    formula: &CnfFormula,
    config: &SolverConfig,
    rng: &mut R,
    observer: &mut dyn Observer,
) -> bool {
    let candidate = flux(&state.current, flux_params(config, state.delta), rng);
    offer_candidate(state, formula, config, candidate, observer)
}

/// Repeats [`gradual_step`] until acceptance, a rejection at the step
/// floor, or the attempt cap. Returns whether a candidate was accepted.
pub fn gradual_phase<R: Rng + ?Sized>(
    state: &mut SolverState,
    formula: &CnfFormula,
    config: &SolverConfig,
    rng: &mut R,
    observer: &mut dyn Observer,
) -> bool {
    for _ in 0..config.max_flux_attempts {
        let at_floor = state.delta <= config.delta_min;
        if gradual_step(state, formula, config, rng, observer) {
            return true;
        }
        if at_floor {
            break;
        }
    }
    false
}

/// Snaps to successively coarser grids while that improves fitness.
///
/// The first snap must beat `reference` (the current fitness when `None`);
/// later snaps must beat the previously adopted one.
pub fn quantization_phase(
    state: &mut SolverState,
    formula: &CnfFormula,
    config: &SolverConfig,
    reference: Option<Fitness>,
    observer: &mut dyn Observer,
) {
    let delta_max = config.delta_max();
    let entry = state.current.clone();
    let entry_eta = state.eta;
    let entry_delta = state.delta;
    let mut reference = reference.unwrap_or(state.eta);

    loop {
        let grid =
            QuantizationGrid::new((state.delta * config.mu).min(1.0)).expect("grid step in (0, 1]");
        let candidate = quantize(&state.current, grid);
        let eta_q = fitness(formula, &candidate);
        let improved = eta_q > reference;
        let grow = improved && state.delta < delta_max;
        let adopt = improved || config.force_quantize;
        observer.on_quantize(grid, &candidate, adopt);
        if adopt {
            state.adopt(candidate, eta_q);
            reference = eta_q;
        }
        if !grow {
            break;
        }
        state.delta = (state.delta * config.mu).min(delta_max);
    }

    let record = TraceRecord {
        cycle: state.cycle,
        phase: Phase::Quantize,
        delta: entry_delta,
        eta_before: entry_eta.value(),
        eta_after: state.eta.value(),
        jump_distance: entry.linf_distance(&state.current),
    };
    observer.on_record(&record, &state.current);
}

/// Tests the binary rounding of the current solution, updates the best
/// binary assignment, and completes the cycle.
pub fn admissibility_check(
    state: &mut SolverState,
    formula: &CnfFormula,
    observer: &mut dyn Observer,
) -> Option<BinaryAssignment> {
    let binary = to_binary(&state.current);
    let satisfied = formula
        .count_satisfied(&binary)
        .expect("assignment length matches formula");
    let is_model = satisfied == formula.num_clauses();
    let record = TraceRecord {
        cycle: state.cycle,
        phase: Phase::AdmissibilityCheck,
        delta: state.delta,
        eta_before: state.eta.value(),
        eta_after: if is_model { 1.0 } else { 0.0 },
        jump_distance: 0.0,
    };
    if satisfied > state.best_satisfied {
        state.best_satisfied = satisfied;
        state.best_binary = binary.clone();
    }
    state.cycle += 1;
    observer.on_record(&record, &state.current);
    is_model.then_some(binary)
}

enum CycleEnd {
    Continue,
    Found(BinaryAssignment),
    OutOfTime,
}

fn expired(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

fn run_cycle<R: Rng + ?Sized>(
    state: &mut SolverState,
    formula: &CnfFormula,
    config: &SolverConfig,
    rng: &mut R,
    deadline: Option<Instant>,
    observer: &mut dyn Observer,
) -> CycleEnd {
    let start_eta = state.eta;
    let accepted = gradual_phase(state, formula, config, rng, observer);
    if expired(deadline) {
        return CycleEnd::OutOfTime;
    }
    if accepted {
        let reference = match config.quantize_reference {
            QuantizeReference::Current => None,
            QuantizeReference::CycleStart => Some(start_eta),
        };
        quantization_phase(state, formula, config, reference, observer);
        if expired(deadline) {
            return CycleEnd::OutOfTime;
        }
    }
    match admissibility_check(state, formula, observer) {
        Some(model) => CycleEnd::Found(model),
        None => CycleEnd::Continue,
    }
}

/// Copies the fittest member's solution and step to every member. Ties go
/// to the lowest index.
fn sync_population(members: &mut [(SolverState, ChaCha8Rng)], observer: &mut dyn Observer) {
    let mut best = 0;
    for (i, (s, _)) in members.iter().enumerate() {
        if s.eta > members[best].0.eta {
            best = i;
        }
    }
    let worst_eta = members
        .iter()
        .map(|(s, _)| s.eta.value())
        .fold(f64::INFINITY, f64::min);
    let leader = members[best].0.clone();
    for (s, _) in members.iter_mut() {
        s.current = leader.current.clone();
        s.delta = leader.delta;
        s.eta = leader.eta;
    }
    let record = TraceRecord {
        // every member has completed the cycle being synchronised
        cycle: leader.cycle - 1,
        phase: Phase::PopulationSync,
        delta: leader.delta,
        eta_before: worst_eta,
        eta_after: leader.eta.value(),
        jump_distance: 0.0,
    };
    observer.on_record(&record, &leader.current);
}

struct Tee<'a> {
    trace: Option<Vec<TraceRecord>>,
    inner: &'a mut dyn Observer,
}

impl Observer for Tee<'_> {
    fn on_record(&mut self, record: &TraceRecord, current: &ContinuousAssignment) {
        if let Some(t) = self.trace.as_mut() {
            t.push(*record);
        }
        self.inner.on_record(record, current);
    }

    fn on_quantize(
        &mut self,
        grid: QuantizationGrid,
        candidate: &ContinuousAssignment,
        adopted: bool,
    ) {
        self.inner.on_quantize(grid, candidate, adopted);
    }
}

fn drive(
    formula: &CnfFormula,
    config: &SolverConfig,
    population: usize,
    observer: &mut dyn Observer,
) -> Result<SolveOutcome, SolverError> {
    config.validate()?;
    let start = Instant::now();
    let deadline = config.time_limit.map(|t| start + t);
    let mut obs = Tee {
        trace: config.record_trace.then(Vec::new),
        inner: observer,
    };

    let mut members: Vec<(SolverState, ChaCha8Rng)> = (0..population.max(1))
        .map(|i| {
            let mut rng = member_rng(config.seed, i);
            let state = init_state(formula, config, &mut rng);
            (state, rng)
        })
        .collect();

    let mut cycles: u64 = 0;
    let mut found = None;
    'search: while cycles < config.max_cycles && !expired(deadline) {
        for (state, rng) in members.iter_mut() {
            match run_cycle(state, formula, config, rng, deadline, &mut obs) {
                CycleEnd::Continue => {}
                CycleEnd::Found(model) => {
                    cycles += 1;
                    found = Some(model);
                    break 'search;
                }
                CycleEnd::OutOfTime => break 'search,
            }
        }
        cycles += 1;
        if members.len() > 1 {
            sync_population(&mut members, &mut obs);
        }
    }

    let (best_state, _) = members
        .iter()
        .rev()
        .max_by_key(|(s, _)| s.best_satisfied)
        .expect("at least one member");
    let (best_binary, best_satisfied) = match &found {
        Some(model) => (model.clone(), formula.num_clauses()),
        None => (best_state.best_binary.clone(), best_state.best_satisfied),
    };

    if let Some(model) = &found {
        assert!(
            formula.eval_boolean(model)?,
            "reported model does not satisfy the formula"
        );
    }

    Ok(SolveOutcome {
        status: if found.is_some() {
            Status::Satisfiable
        } else {
            Status::Unknown
        },
        assignment: found,
        cycles_used: cycles,
        wall_time: start.elapsed(),
        best_binary,
        best_satisfied,
        trace: obs.trace,
    })
}

/// Single-trajectory search using the random stream of member 0.
/// `config.population_size` is ignored.
pub fn solve(formula: &CnfFormula, config: &SolverConfig) -> Result<SolveOutcome, SolverError> {
    drive(formula, config, 1, &mut ())
}

/// Population search with `config.population_size` members. After every
/// cycle the fittest member's solution and step are copied to all members.
/// With one member this is exactly [`solve`].
pub fn solve_population(
    formula: &CnfFormula,
    config: &SolverConfig,
) -> Result<SolveOutcome, SolverError> {
    drive(formula, config, config.population_size, &mut ())
}

/// Runs [`solve_population`] (or [`solve`] for a population of one) while
/// reporting every event to `observer`.
pub fn solve_observed(
    formula: &CnfFormula,
    config: &SolverConfig,
    observer: &mut dyn Observer,
) -> Result<SolveOutcome, SolverError> {
    drive(formula, config, config.population_size, observer)
}
