//! Solver event records and their CSV form.
//!
//! Field meaning per phase:
//!
//! | phase                 | `delta`              | `eta_before` | `eta_after`                      | `jump_distance` |
//! |-----------------------|----------------------|--------------|----------------------------------|-----------------|
//! | `FLUX_ACCEPT/REJECT`  | step used            | current      | candidate                        | 0               |
//! | `QUANTIZE`            | step on phase entry  | phase entry  | phase exit                       | L-inf entry to exit |
//! | `ADMISSIBILITY_CHECK` | step                 | current      | fitness of the binary rounding   | 0               |
//! | `POPULATION_SYNC`     | step of the best     | worst member | best member                      | 0               |
//!
//! One `QUANTIZE` record covers a whole quantization phase, including every
//! grid coarsening inside it.

use std::fmt;
use std::io::{self, BufRead, Write};

pub const TRACE_CSV_HEADER: &str = "cycle,phase,delta,eta_before,eta_after,jump_distance";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    FluxAccept,
    FluxReject,
    Quantize,
    AdmissibilityCheck,
    PopulationSync,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::FluxAccept => "FLUX_ACCEPT",
            Phase::FluxReject => "FLUX_REJECT",
            Phase::Quantize => "QUANTIZE",
            Phase::AdmissibilityCheck => "ADMISSIBILITY_CHECK",
            Phase::PopulationSync => "POPULATION_SYNC",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "FLUX_ACCEPT" => Phase::FluxAccept,
            "FLUX_REJECT" => Phase::FluxReject,
            "QUANTIZE" => Phase::Quantize,
            "ADMISSIBILITY_CHECK" => Phase::AdmissibilityCheck,
            "POPULATION_SYNC" => Phase::PopulationSync,
            other => return Err(format!("unknown phase `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub cycle: u64,
    pub phase: Phase,
    pub delta: f64,
    pub eta_before: f64,
    pub eta_after: f64,
    pub jump_distance: f64,
}

impl TraceRecord {
    /// Floats use Rust's shortest round-trip formatting, so reading a row
    /// back yields bit-identical values.
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.cycle, self.phase, self.delta, self.eta_before, self.eta_after, self.jump_distance
        )
    }

    pub fn from_csv_row(row: &str) -> Result<Self, String> {
        let fields: Vec<&str> = row.trim_end().split(',').collect();
        if fields.len() != 6 {
            return Err(format!("expected 6 fields, got {}: `{row}`", fields.len()));
        }
        let float = |s: &str| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
        Ok(TraceRecord {
            cycle: fields[0]
                .parse()
                .map_err(|e| format!("`{}`: {e}", fields[0]))?,
            phase: fields[1].parse()?,
            delta: float(fields[2])?,
            eta_before: float(fields[3])?,
            eta_after: float(fields[4])?,
            jump_distance: float(fields[5])?,
        })
    }
}

pub fn write_trace_csv<W: Write>(mut out: W, records: &[TraceRecord]) -> io::Result<()> {
    writeln!(out, "{TRACE_CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.to_csv_row())?;
    }
    Ok(())
}

pub fn read_trace_csv<R: BufRead>(input: R) -> io::Result<Vec<TraceRecord>> {
    let invalid = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim_end() != TRACE_CSV_HEADER {
        return Err(invalid("missing trace header".into()));
    }
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(TraceRecord::from_csv_row(&line).map_err(invalid)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let r = TraceRecord {
            cycle: 3,
            phase: Phase::Quantize,
            delta: 0.125,
            eta_before: 0.5,
            eta_after: 0.75,
            jump_distance: 0.25,
        };
        assert_eq!(r.to_csv_row(), "3,QUANTIZE,0.125,0.5,0.75,0.25");
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &[r]).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "cycle,phase,delta,eta_before,eta_after,jump_distance\n3,QUANTIZE,0.125,0.5,0.75,0.25\n"
        );
        assert_eq!(read_trace_csv(&buf[..]).unwrap(), vec![r]);
    }

    #[test]
    fn phase_names_round_trip() {
        for p in [
            Phase::FluxAccept,
            Phase::FluxReject,
            Phase::Quantize,
            Phase::AdmissibilityCheck,
            Phase::PopulationSync,
        ] {
            assert_eq!(p.as_str().parse::<Phase>().unwrap(), p);
        }
    }

    #[test]
    fn bad_rows() {
        assert!(TraceRecord::from_csv_row("1,QUANTIZE,0.5").is_err());
        assert!(TraceRecord::from_csv_row("1,JUMP,0.5,0,0,0").is_err());
        assert!(read_trace_csv(&b"nope\n"[..]).is_err());
    }
}
