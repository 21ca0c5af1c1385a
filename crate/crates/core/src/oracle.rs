//! Ground truth for tests and benchmarks: exhaustive solving of small
//! formulas and seeded random k-SAT generation.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{BinaryAssignment, CnfFormula, Literal};

/// Largest formula [`brute_force_solve`] accepts.
pub const MAX_BRUTE_FORCE_VARIABLES: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("brute force is limited to {max} variables, formula has {actual}")]
    TooManyVariables { actual: usize, max: usize },
    #[error("clause width {width} must be in 1..={num_variables}")]
    InvalidClauseWidth { width: usize, num_variables: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteForceResult {
    Sat(BinaryAssignment),
    Unsat,
}

impl BruteForceResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, BruteForceResult::Sat(_))
    }
}

/// Returns the lexicographically smallest satisfying assignment (variable 0
/// most significant, false before true), or `Unsat`.
pub fn brute_force_solve(formula: &CnfFormula) -> Result<BruteForceResult, OracleError> {
    let n = formula.num_variables();
    if n > MAX_BRUTE_FORCE_VARIABLES {
        return Err(OracleError::TooManyVariables {
            actual: n,
            max: MAX_BRUTE_FORCE_VARIABLES,
        });
    }
    // Bit (n-1-v) of the enumeration index holds variable v.
    let masks: Vec<(u32, u32)> = formula
        .clauses()
        .iter()
        .map(|c| {
            c.literals().iter().fold((0u32, 0u32), |(pos, neg), l| {
                let bit = 1u32 << (n - 1 - l.var());
                if l.is_negated() {
                    (pos, neg | bit)
                } else {
                    (pos | bit, neg)
                }
            })
        })
        .collect();

    let total: u64 = 1u64 << n;
    for index in 0..total {
        let a = index as u32;
        if masks.iter().all(|&(pos, neg)| (a & pos) | (!a & neg) != 0) {
            return Ok(BruteForceResult::Sat(BinaryAssignment::from_index(
                n, index,
            )));
        }
    }
    Ok(BruteForceResult::Unsat)
}

/// Parameters of a random k-SAT instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    pub num_variables: usize,
    pub num_clauses: usize,
    pub clause_width: usize,
    pub seed: u64,
    pub require_satisfiable: bool,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.clause_width == 0 || self.clause_width > self.num_variables {
            return Err(OracleError::InvalidClauseWidth {
                width: self.clause_width,
                num_variables: self.num_variables,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub formula: CnfFormula,
    /// The hidden assignment every clause was conditioned on, when planted.
    pub planted: Option<BinaryAssignment>,
}

/// Uniform random k-SAT, or the planted model when `require_satisfiable`:
/// a hidden assignment is drawn first and each clause is redrawn until the
/// hidden assignment satisfies it. Planted instances are biased away from
/// uniform k-SAT (clauses never contradict the hidden assignment).
pub fn generate_instance(spec: &InstanceSpec) -> Result<GeneratedInstance, OracleError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.num_variables;

    let planted = spec
        .require_satisfiable
        .then(|| BinaryAssignment::new((0..n).map(|_| rng.random_bool(0.5)).collect()));

    let mut clauses = Vec::with_capacity(spec.num_clauses);
    for _ in 0..spec.num_clauses {
        loop {
            let clause = random_clause(&mut rng, n, spec.clause_width);
            let keep = match &planted {
                Some(hidden) => clause.iter().any(|l| l.eval(hidden.values())),
                None => true,
            };
            if keep {
                clauses.push(clause);
                break;
            }
        }
    }

    let formula = CnfFormula::new(n, clauses).expect("generated clauses are valid");
    Ok(GeneratedInstance { formula, planted })
}

pub fn generate_random_ksat(spec: &InstanceSpec) -> Result<CnfFormula, OracleError> {
    generate_instance(spec).map(|g| g.formula)
}

fn random_clause<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<Literal> {
    let mut vars = sample(rng, n, k).into_vec();
    vars.sort_unstable();
    vars.into_iter()
        .map(|v| Literal::new(v, rng.random_bool(0.5)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: usize, clauses: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_dimacs_clauses(n, clauses).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let r = brute_force_solve(&f(2, &[&[1, 2], &[-1]])).unwrap();
        assert_eq!(r, BruteForceResult::Sat(vec![false, true].into()));

        let r = brute_force_solve(&f(1, &[&[1], &[-1]])).unwrap();
        assert_eq!(r, BruteForceResult::Unsat);

        let r = brute_force_solve(&f(2, &[])).unwrap();
        assert_eq!(r, BruteForceResult::Sat(vec![false, false].into()));
    }

    #[test]
    fn brute_force_lexicographic_minimum() {
        // satisfied by (F,T,T), (T,F,*), (T,T,T)... smallest is (F,T,T)
        let formula = f(3, &[&[1, 2], &[1, 3], &[-1, -2, 3]]);
        let r = brute_force_solve(&formula).unwrap();
        assert_eq!(r, BruteForceResult::Sat(vec![false, true, true].into()));
    }

    #[test]
    fn brute_force_guard() {
        let formula = f(31, &[&[31]]);
        assert_eq!(
            brute_force_solve(&formula).unwrap_err(),
            OracleError::TooManyVariables {
                actual: 31,
                max: 30
            }
        );
    }

    fn spec(seed: u64, planted: bool) -> InstanceSpec {
        InstanceSpec {
            num_variables: 5,
            num_clauses: 10,
            clause_width: 3,
            seed,
            require_satisfiable: planted,
        }
    }

    #[test]
    fn generation_is_seeded() {
        let a = generate_random_ksat(&spec(42, false)).unwrap();
        let b = generate_random_ksat(&spec(42, false)).unwrap();
        let c = generate_random_ksat(&spec(43, false)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn clauses_have_distinct_variables() {
        for seed in 0..20 {
            let formula = generate_random_ksat(&spec(seed, seed % 2 == 0)).unwrap();
            assert_eq!(formula.num_clauses(), 10);
            for clause in formula.clauses() {
                let mut vars: Vec<_> = clause.literals().iter().map(|l| l.var()).collect();
                vars.dedup();
                assert_eq!(vars.len(), 3);
            }
        }
    }

    #[test]
    fn planted_assignment_satisfies() {
        for seed in 0..50 {
            let spec = InstanceSpec {
                num_variables: 12,
                num_clauses: 80,
                clause_width: 3,
                seed,
                require_satisfiable: true,
            };
            let g = generate_instance(&spec).unwrap();
            let hidden = g.planted.unwrap();
            assert!(g.formula.eval_boolean(&hidden).unwrap());
            assert!(brute_force_solve(&g.formula).unwrap().is_sat());
        }
    }

    #[test]
    fn invalid_width() {
        let mut s = spec(0, false);
        s.clause_width = 6;
        assert!(generate_random_ksat(&s).is_err());
        s.clause_width = 0;
        assert!(generate_random_ksat(&s).is_err());
    }
}
