use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::PairDataset;
use super::metrics::{gap_bins, ideal_weights, mae, GapBin};
use crate::comparator::{
    depth_estimate, select, ComparatorConfig, EvalBackend, FvBackend, OracleBackend,
    PlainRingBackend, Variant,
};
use crate::encoder::{EncodingParams, FractionalEncoder};
use crate::error::Result;
use crate::fv::{keygen, KeySet, SchemeParams};

/// Version of the JSON layout of [`EvalReport`].
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Thresholds for flagging failed instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureThresholds {
    /// A decrypted output further than this many encoding truncation
    /// bounds from the noise-free plaintext result counts as noise failure.
    pub noise_factor: f64,
    /// An output whose error against the oracle reaches this value counts
    /// as not accomplished.
    pub accuracy_limit: f64,
}

impl Default for FailureThresholds {
    fn default() -> Self {
        FailureThresholds { noise_factor: 10.0, accuracy_limit: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceStatus {
    Ok,
    NoiseExhausted,
    ErrorExceeded,
}

/// Outputs of one pair: `[weight_first, weight_second, scaled_first, scaled_second]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub index: usize,
    pub x1: f64,
    pub x2: f64,
    pub gap: f64,
    pub decrypted: [f64; 4],
    pub noise_free: [f64; 4],
    pub oracle: [f64; 4],
    pub ideal: [f64; 4],
    /// Mean absolute weight error against the oracle.
    pub weight_error: f64,
    pub scaled_error: f64,
    pub min_noise_budget: u32,
    /// `(ciphertext products, plaintext products)` behind the first weight.
    pub weight_depth: (u32, u32),
    /// Same for the first scaled output.
    pub scaled_depth: (u32, u32),
    pub status: InstanceStatus,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub degree: usize,
    pub modulus_bits: u64,
    pub plain_modulus: u64,
    pub sigma: f64,
    pub relin_base_bits: u32,
    pub base: u32,
    pub int_digits: usize,
    pub frac_digits: usize,
}

impl ParamSummary {
    pub fn new(params: &SchemeParams, ep: &EncodingParams) -> Self {
        ParamSummary {
            degree: params.degree(),
            modulus_bits: params.modulus().bits(),
            plain_modulus: params.plain_modulus(),
            sigma: params.sigma(),
            relin_base_bits: params.relin_base_bits(),
            base: ep.base,
            int_digits: ep.int_digits,
            frac_digits: ep.frac_digits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub preset: String,
    pub params: ParamSummary,
    pub variant: Variant,
    pub r: u32,
    pub independent_weights: bool,
    pub seed: u64,
    pub instance_count: usize,
    /// MAE of the weights against the oracle weights.
    pub mae_weights: f64,
    pub mae_scaled: f64,
    /// MAE against the exact step function the selection approximates.
    pub mae_weights_ideal: f64,
    pub mae_scaled_ideal: f64,
    pub failures: usize,
    pub noise_failures: usize,
    pub accomplished: bool,
    pub thresholds: FailureThresholds,
    /// `(ciphertext products, plaintext products)` of the weights.
    pub expected_weight_depth: (u32, u32),
    pub min_noise_budget: u32,
    pub mean_seconds: f64,
    pub gap_bins: Vec<GapBin>,
    pub instances: Vec<InstanceResult>,
    pub timestamp: u64,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Clears wall-clock fields so that reports can be compared.
    pub fn without_timing(mut self) -> Self {
        self.timestamp = 0;
        self.mean_seconds = 0.0;
        for inst in &mut self.instances {
            inst.seconds = 0.0;
        }
        self
    }
}

/// Encryption seed for instance `index`, independent of scheduling.
pub fn instance_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.set_stream(index as u64 + 1);
    rng.next_u64()
}

/// Seed used for key generation from the master seed.
pub fn key_seed(master: u64) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.next_u64()
}

fn select4<B: EvalBackend>(
    backend: &B,
    x1: f64,
    x2: f64,
    cfg: &ComparatorConfig,
) -> Result<[B::Value; 4]> {
    let a = backend.inject(x1)?;
    let b = backend.inject(x2)?;
    let s = select(backend, &a, &b, cfg)?;
    Ok([s.weight_first, s.weight_second, s.scaled_first, s.scaled_second])
}

fn run_instance(
    keys: &KeySet,
    encoder: &FractionalEncoder,
    cfg: &ComparatorConfig,
    thresholds: &FailureThresholds,
    master_seed: u64,
    index: usize,
    (x1, x2): (f64, f64),
) -> Result<InstanceResult> {
    let oracle = select4(&OracleBackend, x1, x2, cfg)?;
    let (i1, i2) = ideal_weights(cfg.variant, x1, x2);
    let ideal = [i1, i2, i1 * x1, i2 * x2];

    let plain = PlainRingBackend::new(encoder.clone());
    let noise_free = select4(&plain, x1, x2, cfg)?.map(|p| encoder.decode(&p).unwrap_or(f64::NAN));

    let backend =
        FvBackend::new(encoder.clone(), &keys.public, &keys.relin, instance_seed(master_seed, index));
    let start = Instant::now();
    let cts = select4(&backend, x1, x2, cfg)?;
    let seconds = start.elapsed().as_secs_f64();

    let mut decrypted = [0.0; 4];
    let mut min_budget = u32::MAX;
    for (slot, ct) in decrypted.iter_mut().zip(&cts) {
        *slot = backend.reveal(&keys.secret, ct)?;
        min_budget = min_budget.min(keys.secret.noise_budget(ct)?);
    }

    let noise_tol = thresholds.noise_factor * encoder.encoding().truncation_bound();
    let noisy = min_budget == 0
        || decrypted.iter().zip(&noise_free).any(|(d, p)| !((d - p).abs() <= noise_tol));
    let inaccurate = decrypted
        .iter()
        .zip(&oracle)
        .any(|(d, o)| !((d - o).abs() < thresholds.accuracy_limit));
    let status = if noisy {
        InstanceStatus::NoiseExhausted
    } else if inaccurate {
        InstanceStatus::ErrorExceeded
    } else {
        InstanceStatus::Ok
    };
    let err = |k: usize| ((decrypted[k] - oracle[k]).abs() + (decrypted[k + 1] - oracle[k + 1]).abs()) / 2.0;
    Ok(InstanceResult {
        index,
        x1,
        x2,
        gap: (x1 - x2).abs(),
        decrypted,
        noise_free,
        oracle,
        ideal,
        weight_error: err(0),
        scaled_error: err(2),
        min_noise_budget: min_budget,
        weight_depth: (cts[0].mult_depth(), cts[0].plain_mult_count()),
        scaled_depth: (cts[2].mult_depth(), cts[2].plain_mult_count()),
        status,
        seconds,
    })
}

/// Encrypts each pair, runs the selection, decrypts and scores it.
///
/// Noise failures and inaccurate instances are reported, not raised.
pub fn run_encrypted_eval_with_keys(
    keys: &KeySet,
    ep: EncodingParams,
    cfg: &ComparatorConfig,
    dataset: &PairDataset,
    seed: u64,
    thresholds: FailureThresholds,
) -> Result<EvalReport> {
    dataset.validate()?;
    let params = keys.public.params().clone();
    let encoder = FractionalEncoder::new(params.clone(), ep)?;
    let mut instances = dataset
        .pairs
        .par_iter()
        .enumerate()
        .map(|(i, &pair)| run_instance(keys, &encoder, cfg, &thresholds, seed, i, pair))
        .collect::<Result<Vec<_>>>()?;
    instances.sort_by_key(|inst| inst.index);

    let collect = |range: std::ops::Range<usize>, pick: fn(&InstanceResult) -> &[f64; 4]| {
        instances.iter().flat_map(|inst| pick(inst)[range.clone()].to_vec()).collect::<Vec<_>>()
    };
    let dec_w = collect(0..2, |i| &i.decrypted);
    let dec_s = collect(2..4, |i| &i.decrypted);
    let failures = instances.iter().filter(|i| i.status != InstanceStatus::Ok).count();
    let noise_failures =
        instances.iter().filter(|i| i.status == InstanceStatus::NoiseExhausted).count();
    let bins = gap_bins(
        &instances.iter().map(|i| (i.gap, i.weight_error)).collect::<Vec<_>>(),
        0.03,
        0.24,
    );
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        preset: params.name().to_string(),
        params: ParamSummary::new(&params, &ep),
        variant: cfg.variant,
        r: cfg.r,
        independent_weights: cfg.independent_weights,
        seed,
        instance_count: instances.len(),
        mae_weights: mae(&collect(0..2, |i| &i.oracle), &dec_w)?,
        mae_scaled: mae(&collect(2..4, |i| &i.oracle), &dec_s)?,
        mae_weights_ideal: mae(&collect(0..2, |i| &i.ideal), &dec_w)?,
        mae_scaled_ideal: mae(&collect(2..4, |i| &i.ideal), &dec_s)?,
        failures,
        noise_failures,
        accomplished: failures == 0,
        thresholds,
        expected_weight_depth: depth_estimate(cfg.variant, cfg.r),
        min_noise_budget: instances.iter().map(|i| i.min_noise_budget).min().unwrap_or(0),
        mean_seconds: instances.iter().map(|i| i.seconds).sum::<f64>() / instances.len() as f64,
        gap_bins: bins,
        instances,
        timestamp,
    })
}

/// Generates keys from `seed` and runs [`run_encrypted_eval_with_keys`].
pub fn run_encrypted_eval(
    params: &Arc<SchemeParams>,
    ep: EncodingParams,
    cfg: &ComparatorConfig,
    dataset: &PairDataset,
    seed: u64,
) -> Result<EvalReport> {
    FractionalEncoder::new(params.clone(), ep)?;
    let keys = keygen(params, &mut ChaCha20Rng::seed_from_u64(key_seed(seed)))?;
    run_encrypted_eval_with_keys(&keys, ep, cfg, dataset, seed, FailureThresholds::default())
}
