//! Textbook levelled Fan-Vercauteren encryption.
//!
//! Ciphertexts are relinearized right after every ciphertext product, so a
//! value produced by [`Evaluator`] always has two parts. Decryption never
//! fails loudly; use [`SecretKey::noise_budget`] to know whether the result
//! can be trusted.

mod evaluator;
mod keys;
mod params;
mod plaintext;
pub mod serialize;

pub use evaluator::{Ciphertext, Evaluator};
pub use keys::{keygen, KeySet, PublicKey, RelinKey, SecretKey};
pub use params::{
    estimated_security, paper_modulus, SchemeParams, DEFAULT_RELIN_BASE_BITS, PAPER_MODULUS_BITS,
    PRESET_NAMES,
};
pub use plaintext::Plaintext;

/// log2 of a positive big integer, accurate to about 1e-15 relative.
pub(crate) fn log2_big(x: &num_bigint::BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        let v: u64 = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).log2();
    }
    let shift = bits - 64;
    let top: u64 = (x >> shift).iter_u64_digits().next().unwrap_or(0);
    shift as f64 + (top as f64).log2()
}
