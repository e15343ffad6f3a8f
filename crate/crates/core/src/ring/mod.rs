//! Arithmetic in `R_q = Z_q[x]/(x^d + 1)` with arbitrary-precision coefficients.
//!
//! Coefficients are stored reduced in `[0, q)`. Products go through the exact
//! multi-prime engine in [`crt`] and are then reduced mod `q`, which works for
//! any `q`. The schoolbook product and the transform directly over `q`
//! ([`RingElement::ntt_forward`]) are kept as independent routes.

pub mod bigntt;
pub mod crt;
pub mod modarith;
pub mod ntt;
mod sample;

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
pub use bigntt::BigNttTable;
pub use crt::CrtContext;
pub use sample::{sample_gaussian, sample_ternary, sample_uniform, DEFAULT_SIGMA};

/// Degree and coefficient modulus of a ring instance.
pub struct RingParams {
    degree: usize,
    modulus: BigUint,
    half_modulus: BigUint,
    big_ntt: OnceLock<std::result::Result<Arc<BigNttTable>, Error>>,
}

impl fmt::Debug for RingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingParams")
            .field("degree", &self.degree)
            .field("modulus_bits", &self.modulus.bits())
            .finish()
    }
}

impl PartialEq for RingParams {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.modulus == other.modulus
    }
}

impl Eq for RingParams {}

impl RingParams {
    pub fn new(degree: usize, modulus: BigUint) -> Result<Arc<Self>> {
        if !degree.is_power_of_two() || degree < 4 {
            return Err(Error::InvalidRing(format!("degree {degree} must be a power of two >= 4")));
        }
        if degree.trailing_zeros() >= modarith::MAX_LOG_ORDER {
            return Err(Error::InvalidRing(format!("degree {degree} exceeds the supported maximum")));
        }
        if modulus < BigUint::from(2u32) {
            return Err(Error::InvalidRing("modulus must be at least 2".into()));
        }
        let half_modulus = &modulus >> 1u32;
        Ok(Arc::new(RingParams {
            degree,
            modulus,
            half_modulus,
            big_ntt: OnceLock::new(),
        }))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// `floor(q / 2)`; values above it are negative representatives.
    pub fn half_modulus(&self) -> &BigUint {
        &self.half_modulus
    }

    pub(crate) fn crt(&self) -> Arc<CrtContext> {
        CrtContext::for_degree(self.degree)
    }

    /// Transform tables over `q`, if `q` admits a primitive `2d`-th root.
    pub fn big_ntt(&self) -> Result<Arc<BigNttTable>> {
        self.big_ntt
            .get_or_init(|| BigNttTable::new(&self.modulus, self.degree).map(Arc::new))
            .clone()
    }

    pub fn supports_ntt(&self) -> bool {
        self.big_ntt().is_ok()
    }

    /// Reduces a signed integer into `[0, q)`.
    pub fn reduce(&self, v: &BigInt) -> BigUint {
        let r = v.mod_floor(&BigInt::from_biguint(Sign::Plus, self.modulus.clone()));
        r.to_biguint().expect("mod_floor is nonnegative")
    }

    /// Centered representative in `(-q/2, q/2]`.
    pub fn center(&self, c: &BigUint) -> BigInt {
        if c > &self.half_modulus {
            -BigInt::from_biguint(Sign::Plus, &self.modulus - c)
        } else {
            BigInt::from_biguint(Sign::Plus, c.clone())
        }
    }
}

/// An element of `R_q`.
#[derive(Clone)]
pub struct RingElement {
    params: Arc<RingParams>,
    coeffs: Vec<BigUint>,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.coeffs.iter().take(8).map(|c| c.to_string()).collect();
        write!(f, "RingElement(d={}, [{}{}])", self.params.degree, shown.join(", "),
            if self.coeffs.len() > 8 { ", ..." } else { "" })
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        *self.params == *other.params && self.coeffs == other.coeffs
    }
}

impl Eq for RingElement {}

/// An element in the evaluation domain of the transform over `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NttForm {
    params: Arc<RingParams>,
    values: Vec<BigUint>,
}

impl NttForm {
    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn pointwise_mul(&self, other: &NttForm) -> Result<NttForm> {
        if *self.params != *other.params {
            return Err(Error::RingMismatch);
        }
        let q = self.params.modulus();
        let values = self.values.iter().zip(&other.values).map(|(a, b)| (a * b) % q).collect();
        Ok(NttForm { params: self.params.clone(), values })
    }

    pub fn ntt_inverse(&self) -> Result<RingElement> {
        let table = self.params.big_ntt()?;
        let mut values = self.values.clone();
        table.inverse(&mut values);
        Ok(RingElement { params: self.params.clone(), coeffs: values })
    }
}

impl RingElement {
    pub fn zero(params: &Arc<RingParams>) -> Self {
        RingElement {
            params: params.clone(),
            coeffs: vec![BigUint::zero(); params.degree],
        }
    }

    pub fn one(params: &Arc<RingParams>) -> Self {
        let mut e = Self::zero(params);
        e.coeffs[0] = BigUint::one() % params.modulus();
        e
    }

    /// `coeff * x^power` for `power < d`.
    pub fn monomial(params: &Arc<RingParams>, power: usize, coeff: &BigInt) -> Self {
        assert!(power < params.degree);
        let mut e = Self::zero(params);
        e.coeffs[power] = params.reduce(coeff);
        e
    }

    /// Builds an element from unsigned coefficients, reducing each mod `q`.
    pub fn from_coeffs(params: &Arc<RingParams>, coeffs: Vec<BigUint>) -> Result<Self> {
        if coeffs.len() != params.degree {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                params.degree,
                coeffs.len()
            )));
        }
        let q = params.modulus();
        let coeffs = coeffs.into_iter().map(|c| if &c >= q { c % q } else { c }).collect();
        Ok(RingElement { params: params.clone(), coeffs })
    }

    pub fn from_signed(params: &Arc<RingParams>, coeffs: &[BigInt]) -> Result<Self> {
        if coeffs.len() != params.degree {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                params.degree,
                coeffs.len()
            )));
        }
        Ok(RingElement {
            params: params.clone(),
            coeffs: coeffs.iter().map(|c| params.reduce(c)).collect(),
        })
    }

    pub fn from_i64(params: &Arc<RingParams>, coeffs: &[i64]) -> Result<Self> {
        let big: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        Self::from_signed(params, &big)
    }

    pub fn params(&self) -> &Arc<RingParams> {
        &self.params
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigUint> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Centered lift of every coefficient into `(-q/2, q/2]`.
    pub fn centered(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|c| self.params.center(c)).collect()
    }

    /// Bit length of the largest centered coefficient.
    pub fn centered_bits(&self) -> u64 {
        let q = self.params.modulus();
        let half = self.params.half_modulus();
        self.coeffs
            .iter()
            .map(|c| if c > half { (q - c).bits() } else { c.bits() })
            .max()
            .unwrap_or(0)
            .max(1)
    }

    /// Infinity norm of the centered lift.
    pub fn centered_norm(&self) -> BigUint {
        let q = self.params.modulus();
        let half = self.params.half_modulus();
        self.coeffs
            .iter()
            .map(|c| if c > half { q - c } else { c.clone() })
            .max()
            .unwrap_or_default()
    }

    fn check(&self, other: &RingElement) -> Result<()> {
        if Arc::ptr_eq(&self.params, &other.params) || *self.params == *other.params {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        let q = self.params.modulus();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| {
                let s = a + b;
                if &s >= q {
                    s - q
                } else {
                    s
                }
            })
            .collect();
        Ok(RingElement { params: self.params.clone(), coeffs })
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        let q = self.params.modulus();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| if a >= b { a - b } else { a + q - b })
            .collect();
        Ok(RingElement { params: self.params.clone(), coeffs })
    }

    pub fn negate(&self) -> RingElement {
        let q = self.params.modulus();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| if c.is_zero() { BigUint::zero() } else { q - c })
            .collect();
        RingElement { params: self.params.clone(), coeffs }
    }

    pub fn scalar_mul(&self, k: &BigInt) -> RingElement {
        let q = self.params.modulus();
        let k = self.params.reduce(k);
        let coeffs = self.coeffs.iter().map(|c| (c * &k) % q).collect();
        RingElement { params: self.params.clone(), coeffs }
    }

    /// Negacyclic product, computed exactly over the integers and reduced mod `q`.
    pub fn mul(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        let ctx = self.params.crt();
        let q = self.params.modulus();
        let k = ctx.primes_for_product(self.centered_bits(), other.centered_bits(), 1);
        let mut a = ctx.to_rns_centered(&self.coeffs, q, k);
        let mut b = ctx.to_rns_centered(&other.coeffs, q, k);
        ctx.forward(&mut a);
        ctx.forward(&mut b);
        let mut prod = ctx.mul_pointwise(&a, &b);
        ctx.inverse(&mut prod);
        let exact = ctx.reconstruct(&prod);
        Ok(RingElement {
            params: self.params.clone(),
            coeffs: exact.iter().map(|c| self.params.reduce(c)).collect(),
        })
    }

    /// Quadratic-time negacyclic product; independent verification route.
    pub fn mul_schoolbook(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        let n = self.params.degree;
        let q = self.params.modulus();
        let mut pos = vec![BigUint::zero(); n];
        let mut neg = vec![BigUint::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let p = a * b;
                if i + j < n {
                    pos[i + j] += p;
                } else {
                    neg[i + j - n] += p;
                }
            }
        }
        let coeffs = pos
            .into_iter()
            .zip(neg)
            .map(|(p, m)| {
                let p = p % q;
                let m = m % q;
                if p >= m {
                    p - m
                } else {
                    p + q - m
                }
            })
            .collect();
        Ok(RingElement { params: self.params.clone(), coeffs })
    }

    /// Forward transform over `q`; errors when `q` has no primitive `2d`-th root.
    pub fn ntt_forward(&self) -> Result<NttForm> {
        let table = self.params.big_ntt()?;
        let mut values = self.coeffs.clone();
        table.forward(&mut values);
        Ok(NttForm { params: self.params.clone(), values })
    }

    /// Product through the transform over `q`.
    pub fn mul_ntt(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        self.ntt_forward()?.pointwise_mul(&other.ntt_forward()?)?.ntt_inverse()
    }

    /// Fixed-width lowercase hex dump of the coefficients (test fixtures).
    pub fn to_hex(&self) -> String {
        let width = (self.params.modulus().bits() as usize).div_ceil(4);
        self.coeffs
            .iter()
            .map(|c| format!("{:0>width$}", c.to_str_radix(16)))
            .collect::<Vec<_>>()
            .join(":")
    }

    pub fn from_hex(params: &Arc<RingParams>, s: &str) -> Result<Self> {
        let coeffs = s
            .split(':')
            .map(|h| {
                BigUint::parse_bytes(h.as_bytes(), 16)
                    .ok_or_else(|| Error::Serialization(format!("bad hex coefficient `{h}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coeffs.iter().any(|c| c >= params.modulus()) {
            return Err(Error::Serialization("coefficient not reduced".into()));
        }
        Self::from_coeffs(params, coeffs)
    }
}
