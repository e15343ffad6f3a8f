use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use rand::Rng;

use super::evaluator::Ciphertext;
use super::{log2_big, Plaintext, SchemeParams};
use crate::error::{Error, Result};
use crate::ring::crt::RnsPoly;
use crate::ring::{sample_gaussian, sample_ternary, sample_uniform, RingElement};

/// Ternary secret `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecretKey {
    pub(crate) params: Arc<SchemeParams>,
    pub(crate) s: RingElement,
}

/// `(p0, p1) = (-(a s + e), a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicKey {
    pub(crate) params: Arc<SchemeParams>,
    pub(crate) p0: RingElement,
    pub(crate) p1: RingElement,
}

/// Key-switching material for `s^2`, one pair per base-`2^w` digit:
/// `(-(a_i s + e_i) + 2^(w i) s^2, a_i)`.
#[derive(Debug)]
pub struct RelinKey {
    pub(crate) params: Arc<SchemeParams>,
    pub(crate) pairs: Vec<(RingElement, RingElement)>,
    transformed: OnceLock<Arc<Vec<(RnsPoly, RnsPoly)>>>,
}

impl Clone for RelinKey {
    fn clone(&self) -> Self {
        RelinKey::from_pairs(self.params.clone(), self.pairs.clone())
    }
}

impl PartialEq for RelinKey {
    fn eq(&self, other: &Self) -> bool {
        *self.params == *other.params && self.pairs == other.pairs
    }
}

impl Eq for RelinKey {}

/// Secret, public and relinearization keys for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct KeySet {
    pub secret: SecretKey,
    pub public: PublicKey,
    pub relin: RelinKey,
}

pub fn keygen<R: Rng + ?Sized>(params: &Arc<SchemeParams>, rng: &mut R) -> Result<KeySet> {
    if params.delta() < &BigUint::from(2u32) {
        return Err(Error::InvalidParams("delta below 2".into()));
    }
    let ring = params.ring();
    let s = sample_ternary(ring, rng);
    let a = sample_uniform(ring, rng);
    let e = sample_gaussian(ring, params.sigma(), rng)?;
    let p0 = a.mul(&s)?.add(&e)?.negate();
    let secret = SecretKey { params: params.clone(), s: s.clone() };
    let public = PublicKey { params: params.clone(), p0, p1: a };

    let s2 = s.mul(&s)?;
    let w = params.relin_base_bits();
    let mut pairs = Vec::with_capacity(params.relin_digit_count());
    for i in 0..params.relin_digit_count() {
        let a_i = sample_uniform(ring, rng);
        let e_i = sample_gaussian(ring, params.sigma(), rng)?;
        let shift = BigInt::from_biguint(Sign::Plus, BigUint::from(1u32) << (w as usize * i));
        let k0 = a_i.mul(&s)?.add(&e_i)?.negate().add(&s2.scalar_mul(&shift))?;
        pairs.push((k0, a_i));
    }
    let relin = RelinKey::from_pairs(params.clone(), pairs);
    Ok(KeySet { secret, public, relin })
}

impl RelinKey {
    pub(crate) fn from_pairs(params: Arc<SchemeParams>, pairs: Vec<(RingElement, RingElement)>) -> Self {
        RelinKey { params, pairs, transformed: OnceLock::new() }
    }

    pub fn params(&self) -> &Arc<SchemeParams> {
        &self.params
    }

    pub fn digit_count(&self) -> usize {
        self.pairs.len()
    }

    /// Prime count used for relinearization products.
    pub(crate) fn prime_count(&self) -> usize {
        let ctx = self.params.ring().crt();
        ctx.primes_for_product(
            self.params.relin_base_bits() as u64,
            self.params.modulus().bits(),
            self.pairs.len(),
        )
    }

    /// Key pairs in the transformed residue domain, computed on first use.
    pub(crate) fn transformed(&self) -> Arc<Vec<(RnsPoly, RnsPoly)>> {
        self.transformed
            .get_or_init(|| {
                let ctx = self.params.ring().crt();
                let q = self.params.modulus();
                let k = self.prime_count();
                let forms = self
                    .pairs
                    .iter()
                    .map(|(k0, k1)| {
                        let mut a = ctx.to_rns_centered(k0.coeffs(), q, k);
                        let mut b = ctx.to_rns_centered(k1.coeffs(), q, k);
                        ctx.forward(&mut a);
                        ctx.forward(&mut b);
                        (a, b)
                    })
                    .collect();
                Arc::new(forms)
            })
            .clone()
    }
}

impl PublicKey {
    pub fn params(&self) -> &Arc<SchemeParams> {
        &self.params
    }

    /// `(p0 u + e1 + delta m, p1 u + e2)` with ternary `u` and Gaussian errors.
    pub fn encrypt<R: Rng + ?Sized>(&self, pt: &Plaintext, rng: &mut R) -> Result<Ciphertext> {
        pt.check(&self.params)?;
        let ring = self.params.ring();
        let u = sample_ternary(ring, rng);
        let e1 = sample_gaussian(ring, self.params.sigma(), rng)?;
        let e2 = sample_gaussian(ring, self.params.sigma(), rng)?;
        let scaled = scale_plaintext(&self.params, pt)?;
        let c0 = self.p0.mul(&u)?.add(&e1)?.add(&scaled)?;
        let c1 = self.p1.mul(&u)?.add(&e2)?;
        Ok(Ciphertext::new(self.params.clone(), vec![c0, c1], 0, 0))
    }
}

/// `delta * m` as an element of `R_q`.
pub(crate) fn scale_plaintext(params: &SchemeParams, pt: &Plaintext) -> Result<RingElement> {
    let delta = params.delta();
    let coeffs = pt.poly().coeffs().iter().map(|c| c * delta).collect();
    RingElement::from_coeffs(params.ring(), coeffs)
}

impl SecretKey {
    pub fn params(&self) -> &Arc<SchemeParams> {
        &self.params
    }

    pub fn poly(&self) -> &RingElement {
        &self.s
    }

    /// `c0 + c1 s + c2 s^2 + ...` in `[0, q)`.
    fn dot(&self, ct: &Ciphertext) -> Result<RingElement> {
        ct.check_params(&self.params)?;
        let mut acc = ct.parts[0].clone();
        let mut power = self.s.clone();
        for (i, part) in ct.parts.iter().enumerate().skip(1) {
            acc = acc.add(&part.mul(&power)?)?;
            if i + 1 < ct.parts.len() {
                power = power.mul(&self.s)?;
            }
        }
        Ok(acc)
    }

    /// `round(t x / q) mod t` coefficientwise.
    pub fn decrypt(&self, ct: &Ciphertext) -> Result<Plaintext> {
        let x = self.dot(ct)?;
        let q = self.params.modulus();
        let t = BigUint::from(self.params.plain_modulus());
        let half_q = q >> 1u32;
        let coeffs = x
            .coeffs()
            .iter()
            .map(|c| ((c * &t + &half_q) / q) % &t)
            .collect();
        Ok(Plaintext::from_poly(RingElement::from_coeffs(self.params.plain_ring(), coeffs)?))
    }

    /// Remaining invariant-noise budget in bits:
    /// `floor(log2 q - log2 ||t x mod q||_inf - 1)`, clamped at zero.
    pub fn noise_budget(&self, ct: &Ciphertext) -> Result<u32> {
        let x = self.dot(ct)?;
        let q = self.params.modulus();
        let t = BigUint::from(self.params.plain_modulus());
        let half_q = q >> 1u32;
        let norm = x
            .coeffs()
            .iter()
            .map(|c| {
                let v = (c * &t).mod_floor(q);
                if v > half_q {
                    q - v
                } else {
                    v
                }
            })
            .max()
            .unwrap_or_default();
        let log_q = log2_big(q);
        let budget = if norm.bits() == 0 {
            log_q - 1.0
        } else {
            log_q - log2_big(&norm) - 1.0
        };
        Ok(budget.floor().max(0.0) as u32)
    }
}
