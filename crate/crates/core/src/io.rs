//! Instance files and reproducible random instances.
//!
//! ```text
//! 3 2
//! 3 1
//! 1 3
//! 2 2
//!
//! 3 1
//! 1 3
//! 2.5 1
//! ```
//!
//! The header gives `n` and `k`, followed by `n` bid rows and optionally,
//! after a blank line, `n` valuation rows. Values are exact decimals or
//! fractions (`2.5`, `7/3`). Lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::mechanism::Instance;
use crate::rational::Rational;
use crate::vector::{Vector, VectorSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FileError {
    #[error("{0}")]
    Io(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: value {value} in column {column} is not strictly positive")]
    NonPositive {
        line: usize,
        column: usize,
        value: String,
    },
    #[error("expected {expected} rows (bids, optionally followed by valuations), found {found}")]
    RowCount { expected: usize, found: usize },
    #[error(transparent)]
    Invalid(#[from] Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub dim: usize,
    pub bids: Vec<Vector>,
    pub valuations: Option<Vec<Vector>>,
    /// Source line of each bid row, then each valuation row.
    lines: Vec<usize>,
}

impl InstanceFile {
    pub fn new(dim: usize, bids: Vec<Vector>, valuations: Option<Vec<Vector>>) -> Self {
        InstanceFile {
            dim,
            bids,
            valuations,
            lines: Vec::new(),
        }
    }

    pub fn from_instance(instance: &Instance) -> Self {
        let valuations = instance.has_valuations().then(|| {
            instance
                .agents()
                .iter()
                .map(|a| a.valuation.clone().expect("checked"))
                .collect()
        });
        InstanceFile::new(instance.dim(), instance.bids(), valuations)
    }

    pub fn bid_set(&self) -> Result<VectorSet, FileError> {
        Ok(VectorSet::new(self.dim, self.bids.clone())?)
    }

    /// Mechanism view; every value must be strictly positive.
    pub fn to_instance(&self) -> Result<Instance, FileError> {
        let rows = self.bids.iter().chain(self.valuations.iter().flatten());
        for (r, row) in rows.enumerate() {
            if let Some(column) = row.coords().iter().position(|x| !x.is_positive()) {
                return Err(FileError::NonPositive {
                    line: self.lines.get(r).copied().unwrap_or(0),
                    column: column + 1,
                    value: row.get(column).to_string(),
                });
            }
        }
        Ok(Instance::new(
            self.dim,
            self.bids.clone(),
            self.valuations.clone(),
        )?)
    }

    /// Canonical text form; parsing it back gives the same file.
    pub fn serialize(&self) -> String {
        let mut out = format!("{} {}\n", self.bids.len(), self.dim);
        let row = |out: &mut String, v: &Vector| {
            let cells: Vec<String> = v.coords().iter().map(Rational::to_string).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        };
        for b in &self.bids {
            row(&mut out, b);
        }
        if let Some(vals) = &self.valuations {
            out.push('\n');
            for v in vals {
                row(&mut out, v);
            }
        }
        out
    }
}

fn parse_row(line: usize, text: &str, k: usize) -> Result<Vector, FileError> {
    let cells = text
        .split_whitespace()
        .map(|t| {
            t.parse::<Rational>().map_err(|e| FileError::Malformed {
                line,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if cells.len() != k {
        return Err(FileError::DimensionMismatch {
            line,
            expected: k,
            found: cells.len(),
        });
    }
    Ok(Vector::new(cells)?)
}

pub fn parse_instance_str(text: &str) -> Result<InstanceFile, FileError> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = rows.next().ok_or(FileError::Malformed {
        line: 1,
        message: "missing header `n k`".into(),
    })?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| FileError::Malformed {
            line: hline,
            message: format!("header must be two integers `n k`, got {header:?}"),
        })?;
    let [n, k] = nums[..] else {
        return Err(FileError::Malformed {
            line: hline,
            message: format!("header must be two integers `n k`, got {header:?}"),
        });
    };
    if k == 0 {
        return Err(FileError::Malformed {
            line: hline,
            message: "k must be at least 1".into(),
        });
    }
    let body: Vec<(usize, &str)> = rows.collect();
    if body.len() != n && body.len() != 2 * n {
        return Err(FileError::RowCount {
            expected: n,
            found: body.len(),
        });
    }
    let vectors = body
        .iter()
        .map(|&(line, text)| parse_row(line, text, k))
        .collect::<Result<Vec<_>, _>>()?;
    let lines = body.iter().map(|&(line, _)| line).collect();
    let (bids, vals) = vectors.split_at(n);
    Ok(InstanceFile {
        dim: k,
        bids: bids.to_vec(),
        valuations: (!vals.is_empty()).then(|| vals.to_vec()),
        lines,
    })
}

pub fn parse_instance(path: impl AsRef<Path>) -> Result<InstanceFile, FileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| FileError::Io(format!("{}: {e}", path.display())))?;
    parse_instance_str(&text)
}

/// `n` random vectors with integer coordinates drawn from `range`. With
/// `enforce_dv` no two vectors share a value in any dimension. Valuations
/// equal the bids.
pub fn generate_instance(
    n: usize,
    k: usize,
    seed: u64,
    enforce_dv: bool,
    range: RangeInclusive<u64>,
) -> Result<Instance, Error> {
    let rows = random_vectors(n, k, seed, enforce_dv, range)?;
    Instance::new(k, rows.clone(), Some(rows))
}

pub fn random_vectors(
    n: usize,
    k: usize,
    seed: u64,
    distinct_per_dimension: bool,
    range: RangeInclusive<u64>,
) -> Result<Vec<Vector>, Error> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::ZeroDimension);
    }
    let (lo, hi) = (*range.start(), *range.end());
    if lo == 0 || lo > hi {
        return Err(Error::Precondition(format!(
            "value range {lo}..={hi} must be non-empty and positive"
        )));
    }
    let width = hi - lo + 1;
    if distinct_per_dimension && width < n as u64 {
        return Err(Error::Precondition(format!(
            "value range {lo}..={hi} holds {width} values, fewer than the {n} distinct values needed"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns: Vec<Vec<u64>> = (0..k)
        .map(|_| {
            if distinct_per_dimension {
                sample(&mut rng, width as usize, n)
                    .into_iter()
                    .map(|x| lo + x as u64)
                    .collect()
            } else {
                (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
            }
        })
        .collect();
    Ok((0..n)
        .map(|i| {
            let coords = columns
                .iter()
                .map(|c| Rational::from_integer(c[i] as i64))
                .collect();
            Vector::new(coords).expect("k >= 1")
        })
        .collect())
}
