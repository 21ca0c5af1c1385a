//! DIMACS CNF reader.
//!
//! Grammar: any number of comment lines starting with `c`, exactly one
//! problem line `p cnf <nvars> <nclauses>`, then whitespace separated signed
//! integers where `0` terminates a clause. A line starting with `%` ends the
//! input (SATLIB benchmark files carry this trailer).

use std::io::Read;

use super::{CnfFormula, Literal};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: missing `p cnf` problem line before clauses")]
    MissingHeader { line: usize },
    #[error("no `p cnf` problem line found")]
    NoHeader,
    #[error("line {line}: malformed problem line `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: duplicate problem line")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {literal} out of range for {num_variables} variables")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        num_variables: usize,
    },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("final clause is not terminated by 0")]
    UnterminatedClause,
    #[error("line {line}: input is not valid UTF-8")]
    InvalidUtf8 { line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    ClauseCountMismatch { declared: usize, found: usize },
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseWarning::ClauseCountMismatch { declared, found } => write!(
                f,
                "header declares {declared} clauses but {found} were read"
            ),
        }
    }
}

/// A successfully parsed formula together with any tolerated irregularities.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub formula: CnfFormula,
    pub warnings: Vec<ParseWarning>,
}

pub fn read_dimacs<R: Read>(mut reader: R) -> Result<Parsed, ParseError> {
    let mut buf = Vec::new();
    reader.read_to_end(&mut buf)?;
    parse_dimacs(&buf)
}

pub fn parse_dimacs(input: &[u8]) -> Result<Parsed, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    // set when `current` holds at least one token since the last terminator
    let mut open = false;

    for (idx, raw) in input.split(|&b| b == b'\n').enumerate() {
        let line = idx + 1;
        let first = raw.iter().copied().find(|b| !b.is_ascii_whitespace());
        match first {
            None => continue,
            Some(b'c') => continue,
            Some(b'%') => break,
            _ => {}
        }
        let text = std::str::from_utf8(raw).map_err(|_| ParseError::InvalidUtf8 { line })?;
        let trimmed = text.trim();

        if first == Some(b'p') {
            if header.is_some() {
                return Err(ParseError::DuplicateHeader { line });
            }
            header = Some(
                parse_header(trimmed).ok_or_else(|| ParseError::MalformedHeader {
                    line,
                    text: trimmed.to_string(),
                })?,
            );
            continue;
        }

        let Some((num_variables, _)) = header else {
            return Err(ParseError::MissingHeader { line });
        };

        for token in trimmed.split_ascii_whitespace() {
            let value: i64 = token.parse().map_err(|_| ParseError::InvalidToken {
                line,
                token: token.to_string(),
            })?;
            if value == 0 {
                if current.is_empty() {
                    return Err(ParseError::EmptyClause { line });
                }
                clauses.push(std::mem::take(&mut current));
                open = false;
                continue;
            }
            if value.unsigned_abs() > num_variables as u64 {
                return Err(ParseError::LiteralOutOfRange {
                    line,
                    literal: value,
                    num_variables,
                });
            }
            // in range, so from_dimacs cannot fail
            current.push(Literal::from_dimacs(value).expect("nonzero literal"));
            open = true;
        }
    }

    if open {
        return Err(ParseError::UnterminatedClause);
    }
    let (num_variables, declared) = header.ok_or(ParseError::NoHeader)?;

    let mut warnings = Vec::new();
    if declared != clauses.len() {
        warnings.push(ParseWarning::ClauseCountMismatch {
            declared,
            found: clauses.len(),
        });
    }

    // empty clauses and out-of-range literals were rejected while scanning
    let formula = CnfFormula::new(num_variables, clauses).expect("clauses validated while parsing");
    Ok(Parsed { formula, warnings })
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut parts = line.split_ascii_whitespace();
    if parts.next()? != "p" || parts.next()? != "cnf" {
        return None;
    }
    let nvars = parts.next()?.parse().ok()?;
    let nclauses = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((nvars, nclauses))
}
