//! CNF formulas and their exact boolean semantics.
//!
//! Variables are 0-indexed everywhere in the Rust API. The 1-indexed DIMACS
//! convention only appears in [`Literal::from_dimacs`], [`Literal::to_dimacs`]
//! and the [`dimacs`] reader/writer.

use std::fmt;

pub mod dimacs;

pub use dimacs::{parse_dimacs, read_dimacs, ParseError, ParseWarning, Parsed};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("literal refers to variable {variable} (1-indexed) but the formula has {num_variables} variables")]
    VariableOutOfRange {
        variable: usize,
        num_variables: usize,
    },
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
    #[error("assignment has {actual} values but the formula has {expected} variables")]
    LengthMismatch { expected: usize, actual: usize },
}

/// A possibly negated variable. The variable index is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    pub fn new(var: usize, negated: bool) -> Self {
        Literal {
            var: var as u32,
            negated,
        }
    }

    pub fn positive(var: usize) -> Self {
        Self::new(var, false)
    }

    pub fn negative(var: usize) -> Self {
        Self::new(var, true)
    }

    /// Builds a literal from a signed, 1-indexed DIMACS integer. Returns
    /// `None` for 0, which is the clause terminator rather than a literal.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Self::new(value.unsigned_abs() as usize - 1, value < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// 0-based variable index.
    #[inline]
    pub fn var(self) -> usize {
        self.var as usize
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.negated
    }

    #[inline]
    pub fn eval(self, values: &[bool]) -> bool {
        values[self.var()] != self.negated
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals with no repeated literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// Removes repeated literals, keeping first occurrences in order.
    /// Complementary pairs (tautologies) are kept as written.
    fn from_literals(literals: impl IntoIterator<Item = Literal>) -> Self {
        let mut out: Vec<Literal> = Vec::new();
        for lit in literals {
            if !out.contains(&lit) {
                out.push(lit);
            }
        }
        Clause { literals: out }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_satisfied_by(&self, values: &[bool]) -> bool {
        self.literals.iter().any(|l| l.eval(values))
    }
}

/// An immutable conjunction of clauses over `num_variables` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_variables: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    /// Validates and builds a formula. Duplicate literals inside a clause are
    /// dropped; empty clauses and out-of-range variables are rejected.
    pub fn new<C, L>(num_variables: usize, clauses: C) -> Result<Self, FormulaError>
    where
        C: IntoIterator<Item = L>,
        L: IntoIterator<Item = Literal>,
    {
        let mut out = Vec::new();
        for (index, lits) in clauses.into_iter().enumerate() {
            let clause = Clause::from_literals(lits);
            if clause.is_empty() {
                return Err(FormulaError::EmptyClause { index });
            }
            if let Some(bad) = clause.literals.iter().find(|l| l.var() >= num_variables) {
                return Err(FormulaError::VariableOutOfRange {
                    variable: bad.var() + 1,
                    num_variables,
                });
            }
            out.push(clause);
        }
        Ok(CnfFormula {
            num_variables,
            clauses: out,
        })
    }

    /// Builds a formula from DIMACS-style signed integers, one slice per clause.
    pub fn from_dimacs_clauses(
        num_variables: usize,
        clauses: &[&[i64]],
    ) -> Result<Self, FormulaError> {
        let mut converted = Vec::with_capacity(clauses.len());
        for (index, c) in clauses.iter().enumerate() {
            let mut lits = Vec::with_capacity(c.len());
            for &v in c.iter() {
                match Literal::from_dimacs(v) {
                    Some(l) => lits.push(l),
                    None if v == 0 => return Err(FormulaError::EmptyClause { index }),
                    None => {
                        return Err(FormulaError::VariableOutOfRange {
                            variable: v.unsigned_abs() as usize,
                            num_variables,
                        })
                    }
                }
            }
            converted.push(lits);
        }
        Self::new(num_variables, converted)
    }

    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    fn check_len(&self, assignment: &BinaryAssignment) -> Result<(), FormulaError> {
        if assignment.len() != self.num_variables {
            return Err(FormulaError::LengthMismatch {
                expected: self.num_variables,
                actual: assignment.len(),
            });
        }
        Ok(())
    }

    /// True iff every clause has a literal made true by `assignment`.
    pub fn eval_boolean(&self, assignment: &BinaryAssignment) -> Result<bool, FormulaError> {
        self.check_len(assignment)?;
        let values = assignment.values();
        Ok(self.clauses.iter().all(|c| c.is_satisfied_by(values)))
    }

    pub fn count_satisfied(&self, assignment: &BinaryAssignment) -> Result<usize, FormulaError> {
        self.check_len(assignment)?;
        let values = assignment.values();
        Ok(self
            .clauses
            .iter()
            .filter(|c| c.is_satisfied_by(values))
            .count())
    }

    /// DIMACS text with a `p cnf` header and one clause per line.
    pub fn to_dimacs(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_variables, self.clauses.len())?;
        for clause in &self.clauses {
            for lit in clause.literals() {
                write!(f, "{lit} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for CnfFormula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_dimacs(s.as_bytes()).map(|p| p.formula)
    }
}

/// A classical truth assignment, indexed by 0-based variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BinaryAssignment(Vec<bool>);

impl BinaryAssignment {
    pub fn new(values: Vec<bool>) -> Self {
        BinaryAssignment(values)
    }

    pub fn all_false(n: usize) -> Self {
        BinaryAssignment(vec![false; n])
    }

    /// The `index`-th assignment in lexicographic order with variable 0 as
    /// the most significant position (false < true).
    pub fn from_index(n: usize, index: u64) -> Self {
        BinaryAssignment((0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect())
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: usize) -> bool {
        self.0[var]
    }

    /// Signed 1-indexed literals: `i` when variable `i` is true, `-i` otherwise.
    pub fn to_dimacs_literals(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().enumerate().map(|(i, &b)| {
            let v = i as i64 + 1;
            if b {
                v
            } else {
                -v
            }
        })
    }
}

impl From<Vec<bool>> for BinaryAssignment {
    fn from(values: Vec<bool>) -> Self {
        BinaryAssignment(values)
    }
}
