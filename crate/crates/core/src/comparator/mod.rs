//! Comparison by iterated sign approximation and selection by weighting.
//!
//! Circuits are written once against [`EvalBackend`] and run unchanged on
//! reals, on encoded plaintexts and on ciphertexts.

mod backend;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use backend::{EvalBackend, FvBackend, OracleBackend, PlainRingBackend};

use crate::approx::DOUBLING_CONST;
use crate::error::{Error, Result};

/// Which selection to perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Weights `(1 + w)/2`, larger input favoured; ties map to halves.
    GtHalf,
    /// Mirror of `GtHalf`.
    LtHalf,
    /// Weight `(1 + w12)(1 + w21)` on both inputs; ties map to one.
    Eq,
    /// Weights `w (1 + w)/2`; ties map to zero.
    Gt,
    /// Mirror of `Gt`.
    Lt,
}

impl Variant {
    pub const ALL: [Variant; 5] =
        [Variant::GtHalf, Variant::LtHalf, Variant::Eq, Variant::Gt, Variant::Lt];

    pub fn name(self) -> &'static str {
        match self {
            Variant::GtHalf => "gt_half",
            Variant::LtHalf => "lt_half",
            Variant::Eq => "eq",
            Variant::Gt => "gt",
            Variant::Lt => "lt",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variant {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparatorConfig {
    pub r: u32,
    pub variant: Variant,
    /// Evaluate `w21` as a second comparison instead of negating `w12`.
    pub independent_weights: bool,
}

impl ComparatorConfig {
    pub fn new(r: u32, variant: Variant) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("r must be at least 1".into()));
        }
        Ok(ComparatorConfig { r, variant, independent_weights: true })
    }

    pub fn with_independent_weights(mut self, independent: bool) -> Self {
        self.independent_weights = independent;
        self
    }
}

/// Weighted outputs of a selection and the weights themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectResult<V> {
    pub scaled_first: V,
    pub scaled_second: V,
    pub weight_first: V,
    pub weight_second: V,
}

/// The circuit's plaintext constants, prepared once per evaluation.
pub struct CircuitConstants<C> {
    neg_doubling: C,
    one: C,
    half: C,
}

impl<C> CircuitConstants<C> {
    pub fn new<B: EvalBackend<Constant = C>>(backend: &B) -> Result<Self> {
        Ok(CircuitConstants {
            neg_doubling: backend.constant(-DOUBLING_CONST)?,
            one: backend.constant(1.0)?,
            half: backend.constant(0.5)?,
        })
    }
}

/// `w12 ~ sgn(x1 - x2)` after `r` doubling steps.
///
/// Each step computes `z (z^2 - c) = -p(z)`; since `p` is odd the signs
/// cancel in pairs and a single negation fixes odd `r`.
pub fn comp<B: EvalBackend>(
    backend: &B,
    consts: &CircuitConstants<B::Constant>,
    x1: &B::Value,
    x2: &B::Value,
    r: u32,
) -> Result<B::Value> {
    let mut z = backend.sub(x1, x2)?;
    for _ in 0..r {
        let y = backend.mul(&z, &z)?;
        let u = backend.add_const(&y, &consts.neg_doubling)?;
        z = backend.mul(&z, &u)?;
    }
    if r % 2 == 1 {
        z = backend.negate(&z)?;
    }
    Ok(z)
}

/// Runs the configured selection on `(x1, x2)`.
pub fn select<B: EvalBackend>(
    backend: &B,
    x1: &B::Value,
    x2: &B::Value,
    cfg: &ComparatorConfig,
) -> Result<SelectResult<B::Value>> {
    if cfg.r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let consts = CircuitConstants::new(backend)?;
    let w12 = comp(backend, &consts, x1, x2, cfg.r)?;
    let w21 = if cfg.independent_weights {
        comp(backend, &consts, x2, x1, cfg.r)?
    } else {
        backend.negate(&w12)?
    };
    let half_shift = |w: &B::Value| -> Result<B::Value> {
        backend.mul_const(&backend.add_const(w, &consts.one)?, &consts.half)
    };
    let s12 = half_shift(&w12)?;
    let s21 = half_shift(&w21)?;
    let (weight_first, weight_second) = match cfg.variant {
        Variant::GtHalf => (s12, s21),
        Variant::LtHalf => (s21, s12),
        Variant::Gt | Variant::Lt => {
            let t12 = backend.mul(&w12, &s12)?;
            let t21 = backend.mul(&w21, &s21)?;
            if cfg.variant == Variant::Gt {
                (t12, t21)
            } else {
                (t21, t12)
            }
        }
        Variant::Eq => {
            // 4 s12 s21 = (1 + w12)(1 + w21), which is 1 + w12 w21 when
            // w21 = -w12.
            let p = backend.mul(&s12, &s21)?;
            let p2 = backend.add(&p, &p)?;
            let w = backend.add(&p2, &p2)?;
            (w.clone(), w)
        }
    };
    Ok(SelectResult {
        scaled_first: backend.mul(&weight_first, x1)?,
        scaled_second: backend.mul(&weight_second, x2)?,
        weight_first,
        weight_second,
    })
}

fn select_variant<B: EvalBackend>(
    backend: &B,
    x1: &B::Value,
    x2: &B::Value,
    cfg: &ComparatorConfig,
    variant: Variant,
) -> Result<SelectResult<B::Value>> {
    select(backend, x1, x2, &ComparatorConfig { variant, ..*cfg })
}

pub fn select_gt_half<B: EvalBackend>(
    backend: &B,
    x1: &B::Value,
    x2: &B::Value,
    cfg: &ComparatorConfig,
) -> Result<SelectResult<B::Value>> {
    select_variant(backend, x1, x2, cfg, Variant::GtHalf)
}

pub fn select_lt_half<B: EvalBackend>(
    backend: &B,
    x1: &B::Value,
    x2: &B::Value,
    cfg: &ComparatorConfig,
) -> Result<SelectResult<B::Value>> {
    select_variant(backend, x1, x2, cfg, Variant::LtHalf)
}

pub fn select_eq<B: EvalBackend>(
    backend: &B,
    x1: &B::Value,
    x2: &B::Value,
    cfg: &ComparatorConfig,
) -> Result<SelectResult<B::Value>> {
    select_variant(backend, x1, x2, cfg, Variant::Eq)
}

pub fn select_gt<B: EvalBackend>(
    backend: &B,
    x1: &B::Value,
    x2: &B::Value,
    cfg: &ComparatorConfig,
) -> Result<SelectResult<B::Value>> {
    select_variant(backend, x1, x2, cfg, Variant::Gt)
}

pub fn select_lt<B: EvalBackend>(
    backend: &B,
    x1: &B::Value,
    x2: &B::Value,
    cfg: &ComparatorConfig,
) -> Result<SelectResult<B::Value>> {
    select_variant(backend, x1, x2, cfg, Variant::Lt)
}

/// `(ciphertext products, plaintext products)` on the critical path of the
/// weights. Scaled outputs cost one more ciphertext product.
pub fn depth_estimate(variant: Variant, r: u32) -> (u32, u32) {
    match variant {
        Variant::GtHalf | Variant::LtHalf => (2 * r, 1),
        Variant::Eq | Variant::Gt | Variant::Lt => (2 * r + 1, 1),
    }
}

/// Oracle weights of a selection on reals.
pub fn oracle_weights(x1: f64, x2: f64, cfg: &ComparatorConfig) -> Result<(f64, f64)> {
    let res = select(&OracleBackend, &x1, &x2, cfg)?;
    Ok((res.weight_first, res.weight_second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::tanh_iterate;

    #[test]
    fn comp_matches_iteration() {
        let consts = CircuitConstants::new(&OracleBackend).unwrap();
        for r in 1..6 {
            let w = comp(&OracleBackend, &consts, &0.1, &0.0, r).unwrap();
            assert_eq!(w, tanh_iterate(0.1, r));
        }
        let w = comp(&OracleBackend, &consts, &0.07, &0.07, 3).unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn variant_names_roundtrip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("ge".parse::<Variant>().is_err());
    }

    #[test]
    fn zero_iterations_rejected() {
        assert!(ComparatorConfig::new(0, Variant::Gt).is_err());
    }
}
