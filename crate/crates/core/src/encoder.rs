//! Fractional encoding of reals into plaintext polynomials.
//!
//! A value `sum u_i b^i + sum u_j b^-j` with balanced digits is stored with
//! integer digit `u_i` at coefficient `i` and fractional digit `u_j` at
//! coefficient `d - j` with its sign flipped, so that `x^d = -1` makes ring
//! products line up with products of the encoded values.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fv::{Plaintext, SchemeParams};

/// Base and digit budgets of the encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingParams {
    pub base: u32,
    pub int_digits: usize,
    pub frac_digits: usize,
}

impl Default for EncodingParams {
    /// `b = 7`, eight integer and eight fractional digits.
    fn default() -> Self {
        EncodingParams { base: 7, int_digits: 8, frac_digits: 8 }
    }
}

impl EncodingParams {
    pub fn new(base: u32, int_digits: usize, frac_digits: usize) -> Self {
        EncodingParams { base, int_digits, frac_digits }
    }

    /// Checks the budgets against a ring degree and plaintext modulus.
    pub fn validate(&self, degree: usize, plain_modulus: u64) -> Result<()> {
        if self.base < 2 {
            return Err(Error::InvalidParams(format!("base {} below 2", self.base)));
        }
        if (self.base / 2) as u64 >= plain_modulus / 2 {
            return Err(Error::InvalidParams(format!(
                "digits of base {} do not fit modulus {plain_modulus}",
                self.base
            )));
        }
        if self.int_digits + self.frac_digits > degree {
            return Err(Error::Infeasible(format!(
                "n_i + n_f = {} exceeds degree {degree}",
                self.int_digits + self.frac_digits
            )));
        }
        // Decoding splits the polynomial in half.
        if self.int_digits > degree / 2 || self.frac_digits > degree / 2 {
            return Err(Error::Infeasible(format!(
                "digit budgets ({}, {}) exceed half the degree {degree}",
                self.int_digits, self.frac_digits
            )));
        }
        Ok(())
    }

    /// Largest truncation error of `encode`: `b^-n_f`.
    pub fn truncation_bound(&self) -> f64 {
        (self.base as f64).powi(-(self.frac_digits as i32))
    }
}

/// Rewrites plain base-b digits (least significant first) into balanced
/// digits in place and returns the carry out of the top digit.
fn balance(digits: &mut [i64], base: u32) -> i64 {
    let b = base as i64;
    let mut carry = 0;
    for u in digits.iter_mut() {
        let mut r = *u + carry;
        carry = 0;
        if r > b / 2 {
            r -= b;
            carry = 1;
        }
        *u = r;
    }
    carry
}

/// Balanced digits of a non-negative integer, least significant first.
fn balanced_digits(mut n: u128, base: u32) -> Vec<i64> {
    let b = base as u128;
    let mut out = Vec::new();
    while n > 0 {
        out.push((n % b) as i64);
        n /= b;
    }
    let carry = balance(&mut out, base);
    if carry != 0 {
        out.push(carry);
    }
    out
}

/// Encoder bound to one parameter set.
#[derive(Debug, Clone)]
pub struct FractionalEncoder {
    params: Arc<SchemeParams>,
    ep: EncodingParams,
}

impl FractionalEncoder {
    pub fn new(params: Arc<SchemeParams>, ep: EncodingParams) -> Result<Self> {
        ep.validate(params.degree(), params.plain_modulus())?;
        Ok(FractionalEncoder { params, ep })
    }

    pub fn params(&self) -> &Arc<SchemeParams> {
        &self.params
    }

    pub fn encoding(&self) -> &EncodingParams {
        &self.ep
    }

    /// Signed digit layout of `x` before reduction mod `t`.
    pub fn digits(&self, x: f64) -> Result<Vec<i64>> {
        let overflow = || Error::EncodingOverflow {
            value: x,
            digits: self.ep.int_digits,
            base: self.ep.base as u64,
        };
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!("cannot encode {x}")));
        }
        let d = self.params.degree();
        let b = self.ep.base;
        let mag = x.abs();
        if mag >= 2f64.powi(100) {
            return Err(overflow());
        }
        let int_part = mag.trunc();
        let mut frac = mag - int_part;

        // Plain base-b fractional digits, most significant first, truncated.
        let mut frac_digits = Vec::with_capacity(self.ep.frac_digits);
        for _ in 0..self.ep.frac_digits {
            frac *= b as f64;
            let digit = frac.trunc();
            frac -= digit;
            frac_digits.push(digit as i64);
        }
        frac_digits.reverse();
        let carry = balance(&mut frac_digits, b);
        let int_digits = balanced_digits(int_part as u128 + carry as u128, b);
        if int_digits.len() > self.ep.int_digits {
            return Err(overflow());
        }

        let sign = if x < 0.0 { -1 } else { 1 };
        let mut coeffs = vec![0i64; d];
        for (i, &u) in int_digits.iter().enumerate() {
            coeffs[i] = sign * u;
        }
        // frac_digits[k] has weight b^-(n_f - k).
        for (k, &u) in frac_digits.iter().enumerate() {
            let j = self.ep.frac_digits - k;
            coeffs[d - j] = -sign * u;
        }
        Ok(coeffs)
    }

    pub fn encode(&self, x: f64) -> Result<Plaintext> {
        Plaintext::from_i64(&self.params, &self.digits(x)?)
    }

    /// Reads centered coefficients: the lower half as integer digits, the
    /// upper half as sign-flipped fractional digits. May return a
    /// non-finite value once digits have grown past the representable range.
    pub fn decode(&self, pt: &Plaintext) -> Result<f64> {
        pt_check(pt, &self.params)?;
        Ok(decode_centered(&pt.centered_i64(), self.ep.base))
    }
}

fn pt_check(pt: &Plaintext, params: &SchemeParams) -> Result<()> {
    if pt.ring() == params.plain_ring() {
        Ok(())
    } else {
        Err(Error::RingMismatch)
    }
}

/// Evaluates a centered coefficient vector under the fractional layout.
pub fn decode_centered(coeffs: &[i64], base: u32) -> f64 {
    let d = coeffs.len();
    let b = base as f64;
    let mut int_sum = 0.0;
    let mut frac_sum = 0.0;
    // Sum smallest magnitudes first.
    for j in (1..=d - d / 2).rev() {
        let c = coeffs[d - j];
        if c != 0 {
            frac_sum -= c as f64 * b.powi(-(j as i32));
        }
    }
    for (i, &c) in coeffs.iter().enumerate().take(d / 2).rev() {
        if c != 0 {
            int_sum += c as f64 * b.powi(i as i32);
        }
    }
    int_sum + frac_sum
}
