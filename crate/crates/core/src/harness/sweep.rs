use std::cmp::Ordering;

use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::PairDataset;
use super::eval::{
    instance_seed, key_seed, run_encrypted_eval_with_keys, FailureThresholds, REPORT_SCHEMA_VERSION,
};
use super::metrics::mae;
use crate::comparator::{select, ComparatorConfig, OracleBackend, PlainRingBackend, EvalBackend};
use crate::encoder::{EncodingParams, FractionalEncoder};
use crate::error::{Error, Result};
use crate::fv::{estimated_security, keygen, paper_modulus, SchemeParams, DEFAULT_RELIN_BASE_BITS};
use crate::ring::DEFAULT_SIGMA;

/// Value ranges to combine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub degrees: Vec<usize>,
    /// Bit sizes of the published moduli.
    pub modulus_bits: Vec<u32>,
    pub plain_moduli: Vec<u64>,
    pub bases: Vec<u32>,
    pub frac_digits: Vec<usize>,
    pub int_digits: Vec<usize>,
}

impl SweepGrid {
    /// The full published grid.
    pub fn published() -> Self {
        SweepGrid {
            degrees: vec![8192, 16384, 32768],
            modulus_bits: vec![116, 226, 435, 829],
            plain_moduli: vec![4096, 16384, 65536],
            bases: vec![3, 5, 7, 9],
            frac_digits: vec![6, 8, 10, 24, 32],
            int_digits: vec![8, 16, 32, 64],
        }
    }

    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &degree in &self.degrees {
            for &modulus_bits in &self.modulus_bits {
                for &plain_modulus in &self.plain_moduli {
                    for &base in &self.bases {
                        for &int_digits in &self.int_digits {
                            for &frac_digits in &self.frac_digits {
                                out.push(SweepPoint {
                                    degree,
                                    modulus_bits,
                                    plain_modulus,
                                    base,
                                    int_digits,
                                    frac_digits,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub degree: usize,
    pub modulus_bits: u32,
    pub plain_modulus: u64,
    pub base: u32,
    pub int_digits: usize,
    pub frac_digits: usize,
}

impl SweepPoint {
    pub fn encoding(&self) -> EncodingParams {
        EncodingParams::new(self.base, self.int_digits, self.frac_digits)
    }

    fn size_key(&self) -> (usize, u32, u64, usize, usize, u32) {
        (
            self.degree,
            self.modulus_bits,
            self.plain_modulus,
            self.int_digits,
            self.frac_digits,
            self.base,
        )
    }

    fn scheme(&self) -> Result<std::sync::Arc<SchemeParams>> {
        let q = paper_modulus(self.modulus_bits).ok_or_else(|| {
            Error::InvalidParams(format!("no published modulus with {} bits", self.modulus_bits))
        })?;
        SchemeParams::new(
            self.degree,
            q,
            self.plain_modulus,
            DEFAULT_SIGMA,
            DEFAULT_RELIN_BASE_BITS.min(self.modulus_bits),
            "sweep",
        )
    }
}

/// How each combination is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Full encryption, evaluation and decryption.
    Encrypted,
    /// The same circuit on encoded plaintexts mod `t`: captures digit
    /// growth but not noise, so `q` has no effect.
    NoiseFree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub point: SweepPoint,
    pub security_bits: u32,
    pub mae_weights: f64,
    pub mae_scaled: f64,
    pub failures: usize,
    pub accomplished: bool,
    pub min_noise_budget: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub point: SweepPoint,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub mode: SweepMode,
    pub r: u32,
    pub variant: crate::comparator::Variant,
    pub instance_count: usize,
    /// Best first.
    pub ranked: Vec<SweepEntry>,
    pub skipped: Vec<SkippedPoint>,
}

fn noise_free_entry(
    point: SweepPoint,
    params: std::sync::Arc<SchemeParams>,
    cfg: &ComparatorConfig,
    dataset: &PairDataset,
    thresholds: &FailureThresholds,
) -> Result<SweepEntry> {
    let encoder = FractionalEncoder::new(params.clone(), point.encoding())?;
    let backend = PlainRingBackend::new(encoder.clone());
    let (mut exp_w, mut got_w, mut exp_s, mut got_s) = (vec![], vec![], vec![], vec![]);
    let mut failures = 0;
    for &(x1, x2) in &dataset.pairs {
        let o = select(&OracleBackend, &x1, &x2, cfg)?;
        let decoded = backend
            .inject(x1)
            .and_then(|a| Ok((a, backend.inject(x2)?)))
            .and_then(|(a, b)| select(&backend, &a, &b, cfg))
            .and_then(|s| {
                Ok([
                    encoder.decode(&s.weight_first)?,
                    encoder.decode(&s.weight_second)?,
                    encoder.decode(&s.scaled_first)?,
                    encoder.decode(&s.scaled_second)?,
                ])
            })
            .unwrap_or([f64::NAN; 4]);
        let oracle = [o.weight_first, o.weight_second, o.scaled_first, o.scaled_second];
        if decoded.iter().zip(&oracle).any(|(d, e)| !((d - e).abs() < thresholds.accuracy_limit)) {
            failures += 1;
        }
        exp_w.extend_from_slice(&oracle[..2]);
        got_w.extend_from_slice(&decoded[..2]);
        exp_s.extend_from_slice(&oracle[2..]);
        got_s.extend_from_slice(&decoded[2..]);
    }
    Ok(SweepEntry {
        point,
        security_bits: estimated_security(params.degree(), params.modulus().bits()),
        mae_weights: mae(&exp_w, &got_w)?,
        mae_scaled: mae(&exp_s, &got_s)?,
        failures,
        accomplished: failures == 0,
        min_noise_budget: None,
    })
}

/// Best first: accomplished runs, then combinations meeting 128-bit
/// security, then smaller weight MAE, then smaller parameters.
fn rank(a: &SweepEntry, b: &SweepEntry) -> Ordering {
    let nan_last = |x: f64| if x.is_nan() { f64::INFINITY } else { x };
    b.accomplished
        .cmp(&a.accomplished)
        .then((b.security_bits >= 128).cmp(&(a.security_bits >= 128)))
        .then(nan_last(a.mae_weights).total_cmp(&nan_last(b.mae_weights)))
        .then(a.point.size_key().cmp(&b.point.size_key()))
}

/// Evaluates every grid combination and ranks them.
///
/// Combinations whose digit budgets do not fit the ring or modulus are
/// skipped with a reason.
pub fn sweep(
    grid: &SweepGrid,
    cfg: &ComparatorConfig,
    dataset: &PairDataset,
    mode: SweepMode,
    seed: u64,
) -> Result<SweepReport> {
    dataset.validate()?;
    let thresholds = FailureThresholds::default();
    let mut skipped = Vec::new();
    let mut runnable = Vec::new();
    for point in grid.points() {
        let prepared = point
            .scheme()
            .and_then(|p| point.encoding().validate(p.degree(), p.plain_modulus()).map(|_| p));
        match prepared {
            Ok(p) => runnable.push((point, p)),
            Err(e) => {
                info!("skipping {point:?}: {e}");
                skipped.push(SkippedPoint { point, reason: e.to_string() });
            }
        }
    }
    let mut ranked = runnable
        .into_par_iter()
        .enumerate()
        .map(|(i, (point, params))| match mode {
            SweepMode::NoiseFree => noise_free_entry(point, params, cfg, dataset, &thresholds),
            SweepMode::Encrypted => {
                let combo_seed = instance_seed(seed, usize::MAX - i);
                let keys =
                    keygen(&params, &mut ChaCha20Rng::seed_from_u64(key_seed(combo_seed)))?;
                let report = run_encrypted_eval_with_keys(
                    &keys,
                    point.encoding(),
                    cfg,
                    dataset,
                    combo_seed,
                    thresholds,
                )?;
                info!("{point:?}: mae {:.4}, failures {}", report.mae_weights, report.failures);
                Ok(SweepEntry {
                    point,
                    security_bits: estimated_security(params.degree(), params.modulus().bits()),
                    mae_weights: report.mae_weights,
                    mae_scaled: report.mae_scaled,
                    failures: report.failures,
                    accomplished: report.accomplished,
                    min_noise_budget: Some(report.min_noise_budget),
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(rank);
    Ok(SweepReport {
        schema_version: REPORT_SCHEMA_VERSION,
        mode,
        r: cfg.r,
        variant: cfg.variant,
        instance_count: dataset.len(),
        ranked,
        skipped,
    })
}
