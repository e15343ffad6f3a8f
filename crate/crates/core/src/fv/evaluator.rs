use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

use super::keys::{scale_plaintext, RelinKey};
use super::{Plaintext, SchemeParams};
use crate::error::{Error, Result};
use crate::ring::crt::max_bits;
use crate::ring::RingElement;

/// A ciphertext with depth bookkeeping.
///
/// `mult_depth` counts ciphertext-ciphertext products on the critical path
/// and `plain_mult_count` counts plaintext products on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Ciphertext {
    pub(crate) params: Arc<SchemeParams>,
    pub(crate) parts: Vec<RingElement>,
    pub(crate) mult_depth: u32,
    pub(crate) plain_mult_count: u32,
}

impl Ciphertext {
    pub(crate) fn new(
        params: Arc<SchemeParams>,
        parts: Vec<RingElement>,
        mult_depth: u32,
        plain_mult_count: u32,
    ) -> Self {
        debug_assert!(parts.len() >= 2);
        Ciphertext { params, parts, mult_depth, plain_mult_count }
    }

    pub fn params(&self) -> &Arc<SchemeParams> {
        &self.params
    }

    pub fn parts(&self) -> &[RingElement] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.len()
    }

    pub fn mult_depth(&self) -> u32 {
        self.mult_depth
    }

    pub fn plain_mult_count(&self) -> u32 {
        self.plain_mult_count
    }

    pub(crate) fn check_params(&self, params: &SchemeParams) -> Result<()> {
        if *self.params == *params {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }
}

/// `round(num / den)` for `den > 0`, ties away from zero.
fn div_round(num: &BigInt, den: &BigUint) -> BigInt {
    let mag = num.magnitude();
    let r = ((mag << 1u32) + den) / (den << 1u32);
    BigInt::from_biguint(if num.sign() == Sign::Minus { Sign::Minus } else { Sign::Plus }, r)
}

/// Homomorphic operations for one parameter set.
#[derive(Debug, Clone)]
pub struct Evaluator {
    params: Arc<SchemeParams>,
}

impl Evaluator {
    pub fn new(params: Arc<SchemeParams>) -> Self {
        Evaluator { params }
    }

    pub fn params(&self) -> &Arc<SchemeParams> {
        &self.params
    }

    fn check(&self, ct: &Ciphertext) -> Result<()> {
        ct.check_params(&self.params)
    }

    pub fn add(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        self.check(a)?;
        self.check(b)?;
        let n = a.size().max(b.size());
        let zero = RingElement::zero(self.params.ring());
        let parts = (0..n)
            .map(|i| {
                let x = a.parts.get(i).unwrap_or(&zero);
                let y = b.parts.get(i).unwrap_or(&zero);
                x.add(y)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ciphertext::new(
            self.params.clone(),
            parts,
            a.mult_depth.max(b.mult_depth),
            a.plain_mult_count.max(b.plain_mult_count),
        ))
    }

    pub fn negate(&self, a: &Ciphertext) -> Result<Ciphertext> {
        self.check(a)?;
        let parts = a.parts.iter().map(|p| p.negate()).collect();
        Ok(Ciphertext::new(self.params.clone(), parts, a.mult_depth, a.plain_mult_count))
    }

    pub fn sub(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        self.add(a, &self.negate(b)?)
    }

    pub fn add_plain(&self, a: &Ciphertext, p: &Plaintext) -> Result<Ciphertext> {
        self.check(a)?;
        p.check(&self.params)?;
        let mut out = a.clone();
        out.parts[0] = out.parts[0].add(&scale_plaintext(&self.params, p)?)?;
        Ok(out)
    }

    pub fn sub_plain(&self, a: &Ciphertext, p: &Plaintext) -> Result<Ciphertext> {
        self.add_plain(a, &p.negate())
    }

    /// Multiplies every part by the centered lift of `p`.
    pub fn mul_plain(&self, a: &Ciphertext, p: &Plaintext) -> Result<Ciphertext> {
        self.check(a)?;
        p.check(&self.params)?;
        let ring = self.params.ring();
        let ctx = ring.crt();
        let q = ring.modulus();
        let plain: Vec<BigInt> = p.centered_i64().into_iter().map(BigInt::from).collect();
        let k = ctx.primes_for_product(q.bits(), max_bits(&plain), 1);
        let mut plain_rns = ctx.to_rns_signed(&plain, k);
        ctx.forward(&mut plain_rns);
        let parts = a
            .parts
            .iter()
            .map(|part| {
                let mut x = ctx.to_rns_centered(part.coeffs(), q, k);
                ctx.forward(&mut x);
                let mut prod = ctx.mul_pointwise(&x, &plain_rns);
                ctx.inverse(&mut prod);
                let exact = ctx.reconstruct(&prod);
                RingElement::from_signed(ring, &exact)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ciphertext::new(self.params.clone(), parts, a.mult_depth, a.plain_mult_count + 1))
    }

    /// Tensor product scaled by `t/q`, without relinearization.
    pub fn mul_no_relin(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        self.check(a)?;
        self.check(b)?;
        let ring = self.params.ring();
        let ctx = ring.crt();
        let q = ring.modulus();
        let t = BigInt::from(self.params.plain_modulus());
        let bits_a = a.parts.iter().map(|p| p.centered_bits()).max().unwrap_or(1);
        let bits_b = b.parts.iter().map(|p| p.centered_bits()).max().unwrap_or(1);
        let k = ctx.primes_for_product(bits_a, bits_b, a.size().min(b.size()));
        let forward = |ct: &Ciphertext| {
            ct.parts
                .iter()
                .map(|p| {
                    let mut r = ctx.to_rns_centered(p.coeffs(), q, k);
                    ctx.forward(&mut r);
                    r
                })
                .collect::<Vec<_>>()
        };
        let fa = forward(a);
        let fb = forward(b);
        let n_out = a.size() + b.size() - 1;
        let mut parts = Vec::with_capacity(n_out);
        for j in 0..n_out {
            let mut acc = ctx.zero(k);
            for (i, x) in fa.iter().enumerate() {
                if j >= i && j - i < fb.len() {
                    ctx.mul_acc(&mut acc, x, &fb[j - i]);
                }
            }
            ctx.inverse(&mut acc);
            let exact = ctx.reconstruct(&acc);
            let scaled: Vec<BigInt> = exact.iter().map(|v| div_round(&(v * &t), q)).collect();
            parts.push(RingElement::from_signed(ring, &scaled)?);
        }
        Ok(Ciphertext::new(
            self.params.clone(),
            parts,
            a.mult_depth.max(b.mult_depth) + 1,
            a.plain_mult_count.max(b.plain_mult_count),
        ))
    }

    /// Brings a three-part ciphertext back to two parts.
    pub fn relinearize(&self, a: &Ciphertext, rlk: &RelinKey) -> Result<Ciphertext> {
        self.check(a)?;
        if *rlk.params != *self.params {
            return Err(Error::RelinKeyMismatch);
        }
        match a.size() {
            2 => return Ok(a.clone()),
            3 => {}
            n => {
                return Err(Error::InvalidArgument(format!(
                    "relinearization supports 3-part ciphertexts, got {n}"
                )))
            }
        }
        let ring = self.params.ring();
        let ctx = ring.crt();
        let w = self.params.relin_base_bits() as usize;
        let k = rlk.prime_count();
        let keys = rlk.transformed();
        let digits = decompose(a.parts[2].coeffs(), w, rlk.digit_count());
        let mut acc0 = ctx.zero(k);
        let mut acc1 = ctx.zero(k);
        for (digit, (k0, k1)) in digits.iter().zip(keys.iter()) {
            let mut d = ctx.to_rns_signed(digit, k);
            ctx.forward(&mut d);
            ctx.mul_acc(&mut acc0, &d, k0);
            ctx.mul_acc(&mut acc1, &d, k1);
        }
        ctx.inverse(&mut acc0);
        ctx.inverse(&mut acc1);
        let r0 = RingElement::from_signed(ring, &ctx.reconstruct(&acc0))?;
        let r1 = RingElement::from_signed(ring, &ctx.reconstruct(&acc1))?;
        Ok(Ciphertext::new(
            self.params.clone(),
            vec![a.parts[0].add(&r0)?, a.parts[1].add(&r1)?],
            a.mult_depth,
            a.plain_mult_count,
        ))
    }

    /// Ciphertext product followed by relinearization.
    pub fn mul(&self, a: &Ciphertext, b: &Ciphertext, rlk: &RelinKey) -> Result<Ciphertext> {
        if *rlk.params != *self.params {
            return Err(Error::RelinKeyMismatch);
        }
        let product = self.mul_no_relin(a, b)?;
        self.relinearize(&product, rlk)
    }

    pub fn square(&self, a: &Ciphertext, rlk: &RelinKey) -> Result<Ciphertext> {
        self.mul(a, a, rlk)
    }
}

/// Base-`2^w` digits of coefficients in `[0, q)`, least significant first.
fn decompose(coeffs: &[BigUint], w: usize, count: usize) -> Vec<Vec<BigInt>> {
    let mask = (BigUint::from(1u32) << w) - 1u32;
    let mut out = vec![Vec::with_capacity(coeffs.len()); count];
    for c in coeffs {
        let mut rest = c.clone();
        for digits in out.iter_mut() {
            if rest.is_zero() {
                digits.push(BigInt::zero());
            } else {
                digits.push(BigInt::from_biguint(Sign::Plus, &rest & &mask));
                rest >>= w;
            }
        }
        debug_assert!(rest.is_zero());
    }
    out
}
