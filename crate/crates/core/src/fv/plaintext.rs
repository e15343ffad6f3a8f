use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use super::SchemeParams;
use crate::error::{Error, Result};
use crate::ring::RingElement;

/// An element of `R_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plaintext {
    poly: RingElement,
}

impl Plaintext {
    pub fn zero(params: &SchemeParams) -> Self {
        Plaintext { poly: RingElement::zero(params.plain_ring()) }
    }

    /// Coefficients are reduced mod `t`.
    pub fn from_u64(params: &SchemeParams, coeffs: &[u64]) -> Result<Self> {
        let big = coeffs.iter().map(|&c| BigUint::from(c)).collect();
        Ok(Plaintext { poly: RingElement::from_coeffs(params.plain_ring(), big)? })
    }

    pub fn from_i64(params: &SchemeParams, coeffs: &[i64]) -> Result<Self> {
        Ok(Plaintext { poly: RingElement::from_i64(params.plain_ring(), coeffs)? })
    }

    /// Constant polynomial `value mod t`.
    pub fn constant(params: &SchemeParams, value: i64) -> Self {
        Plaintext {
            poly: RingElement::monomial(params.plain_ring(), 0, &BigInt::from(value)),
        }
    }

    pub(crate) fn from_poly(poly: RingElement) -> Self {
        Plaintext { poly }
    }

    pub fn poly(&self) -> &RingElement {
        &self.poly
    }

    pub fn ring(&self) -> &Arc<crate::ring::RingParams> {
        self.poly.params()
    }

    pub fn degree(&self) -> usize {
        self.poly.params().degree()
    }

    /// Coefficients in `[0, t)`.
    pub fn coeffs_u64(&self) -> Vec<u64> {
        self.poly.coeffs().iter().map(|c| c.to_u64().expect("t < 2^62")).collect()
    }

    /// Coefficients lifted to `(-t/2, t/2]`.
    pub fn centered_i64(&self) -> Vec<i64> {
        self.poly.centered().iter().map(|c| c.to_i64().expect("t < 2^62")).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn add(&self, other: &Plaintext) -> Result<Plaintext> {
        Ok(Plaintext { poly: self.poly.add(&other.poly)? })
    }

    pub fn sub(&self, other: &Plaintext) -> Result<Plaintext> {
        Ok(Plaintext { poly: self.poly.sub(&other.poly)? })
    }

    pub fn negate(&self) -> Plaintext {
        Plaintext { poly: self.poly.negate() }
    }

    /// Product in `R_t`.
    pub fn mul(&self, other: &Plaintext) -> Result<Plaintext> {
        Ok(Plaintext { poly: self.poly.mul(&other.poly)? })
    }

    pub(crate) fn check(&self, params: &SchemeParams) -> Result<()> {
        if **self.poly.params() == **params.plain_ring() {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }
}
