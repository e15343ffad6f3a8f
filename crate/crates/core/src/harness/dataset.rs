use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs are drawn from `[-VALUE_BOUND, VALUE_BOUND]` so differences stay
/// inside the working interval of the sign approximation.
pub const VALUE_BOUND: f64 = 0.12;

/// Pairs `(x1, x2)` to compare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDataset {
    pub pairs: Vec<(f64, f64)>,
    pub seed: Option<u64>,
    pub min_gap: Option<f64>,
}

/// Uniform pairs in the box, rejection-sampled so that `|x1 - x2| >= min_gap`.
pub fn gen_pairs(n: usize, seed: u64, min_gap: Option<f64>) -> Result<PairDataset> {
    if n == 0 {
        return Err(Error::InvalidArgument("dataset needs at least one pair".into()));
    }
    if let Some(g) = min_gap {
        if !(0.0..2.0 * VALUE_BOUND).contains(&g) {
            return Err(Error::InvalidArgument(format!(
                "min_gap {g} must lie in [0, {})",
                2.0 * VALUE_BOUND
            )));
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let gap = min_gap.unwrap_or(0.0);
    let mut pairs = Vec::with_capacity(n);
    while pairs.len() < n {
        let x1 = rng.random_range(-VALUE_BOUND..=VALUE_BOUND);
        let x2 = rng.random_range(-VALUE_BOUND..=VALUE_BOUND);
        if (x1 - x2).abs() >= gap {
            pairs.push((x1, x2));
        }
    }
    Ok(PairDataset { pairs, seed: Some(seed), min_gap })
}

impl PairDataset {
    pub fn from_pairs(pairs: Vec<(f64, f64)>) -> Result<Self> {
        let ds = PairDataset { pairs, seed: None, min_gap: None };
        ds.validate()?;
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks that every value lies in the input box and gaps are respected.
    pub fn validate(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(Error::InvalidArgument("empty dataset".into()));
        }
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            for v in [a, b] {
                if !v.is_finite() || v.abs() > VALUE_BOUND {
                    return Err(Error::InvalidArgument(format!(
                        "pair {i}: value {v} outside [-{VALUE_BOUND}, {VALUE_BOUND}]"
                    )));
                }
            }
            if let Some(g) = self.min_gap {
                if (a - b).abs() < g {
                    return Err(Error::InvalidArgument(format!("pair {i}: gap below {g}")));
                }
            }
        }
        Ok(())
    }

    /// One pair per line, whitespace or comma separated; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> =
                line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let bad = || Error::InvalidArgument(format!("line {}: expected two numbers", lineno + 1));
            if fields.len() != 2 {
                return Err(bad());
            }
            let a: f64 = fields[0].parse().map_err(|_| bad())?;
            let b: f64 = fields[1].parse().map_err(|_| bad())?;
            pairs.push((a, b));
        }
        PairDataset::from_pairs(pairs)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "# seed {seed}");
        }
        if let Some(g) = self.min_gap {
            let _ = writeln!(out, "# min_gap {g}");
        }
        for (a, b) in &self.pairs {
            let _ = writeln!(out, "{a:e} {b:e}");
        }
        out
    }
}
