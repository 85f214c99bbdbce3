//! Reader for `n,probability` number-distribution CSV files.

use std::io::Read;

use catsize::NumberDistribution;

pub const HEADER: &str = "n,probability";

/// Largest deviation of the probability sum from one that is accepted (and
/// then renormalized away).
pub const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum InputError {
    /// The file is not a well-formed distribution table.
    Malformed { line: u64, reason: String },
    /// Well-formed, but the probabilities do not sum to one.
    NotNormalized { total: f64 },
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputError::Malformed { line, reason } => write!(f, "line {line}: {reason}"),
            InputError::NotNormalized { total } => {
                write!(
                    f,
                    "probabilities sum to {total}, outside 1 ± {SUM_TOLERANCE:e}"
                )
            }
        }
    }
}

fn malformed(line: u64, reason: impl Into<String>) -> InputError {
    InputError::Malformed {
        line,
        reason: reason.into(),
    }
}

/// Parses a distribution. Rows must list `n = 0, 1, ..., N` in order.
pub fn read_distribution(reader: impl Read) -> Result<NumberDistribution, InputError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => {
            return Err(malformed(
                1,
                format!("empty file, expected header `{HEADER}`"),
            ))
        }
        Some(r) => r.map_err(|e| malformed(1, e.to_string()))?,
    };
    if header.len() != 2 || &header[0] != "n" || &header[1] != "probability" {
        return Err(malformed(1, format!("header must be exactly `{HEADER}`")));
    }
    let mut probs = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(malformed(
                line,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        let n: usize = record[0]
            .parse()
            .map_err(|_| malformed(line, format!("`{}` is not a particle count", &record[0])))?;
        if n != probs.len() {
            return Err(malformed(
                line,
                format!("expected n = {}, found {n}", probs.len()),
            ));
        }
        let p: f64 = record[1]
            .parse()
            .map_err(|_| malformed(line, format!("`{}` is not a decimal", &record[1])))?;
        if !(p.is_finite() && p >= 0.0) {
            return Err(malformed(line, format!("probability {p} is not in [0, 1]")));
        }
        probs.push(p);
    }
    if probs.is_empty() {
        return Err(malformed(2, "no data rows"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(InputError::NotNormalized { total });
    }
    NumberDistribution::renormalized(probs, SUM_TOLERANCE).map_err(|e| malformed(0, e.to_string()))
}

/// Renders a distribution in the format [`read_distribution`] accepts.
pub fn write_distribution(dist: &NumberDistribution) -> String {
    let mut out = format!("{HEADER}\n");
    for (k, p) in dist.probs().iter().enumerate() {
        out.push_str(&format!("{k},{p:e}\n"));
    }
    out
}
