use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ring::{RingParams, DEFAULT_SIGMA};

/// Bit sizes of the ciphertext moduli in the published parameter grid.
pub const PAPER_MODULUS_BITS: [u32; 4] = [116, 226, 435, 829];

/// Built-in preset names.
pub const PRESET_NAMES: [&str; 2] = ["paper-r3", "insecure-test"];

/// Default relinearization window.
pub const DEFAULT_RELIN_BASE_BITS: u32 = 60;

fn pow2(e: u32) -> BigUint {
    BigUint::from(1u32) << e
}

/// The ciphertext modulus of the published grid with the given bit size.
pub fn paper_modulus(bits: u32) -> Option<BigUint> {
    Some(match bits {
        116 => pow2(116) - pow2(18) + 1u32,
        226 => pow2(226) - pow2(26) + 1u32,
        435 => pow2(435) - pow2(33) + 1u32,
        829 => pow2(829) - pow2(54) - pow2(53) - pow2(52) + 1u32,
        _ => return None,
    })
}

/// Classical security level in bits of a ternary-secret RLWE instance
/// with degree `d` and a `log_q`-bit modulus, read off the community
/// standard's parameter table (256, 192 or 128; 0 when below 128).
pub fn estimated_security(degree: usize, log_q: u64) -> u32 {
    // (d, max log q for 128, 192, 256 bits)
    const TABLE: [(usize, [u64; 3]); 6] = [
        (1024, [27, 19, 14]),
        (2048, [54, 37, 29]),
        (4096, [109, 75, 58]),
        (8192, [218, 152, 118]),
        (16384, [438, 305, 237]),
        (32768, [881, 611, 476]),
    ];
    let Some((_, limits)) = TABLE.iter().find(|(d, _)| *d == degree) else {
        return 0;
    };
    [256, 192, 128]
        .into_iter()
        .zip(limits.iter().rev())
        .find(|(_, &max)| log_q <= max)
        .map_or(0, |(bits, _)| bits)
}

/// FV parameters `(d, q, t, sigma, relinearization window)`.
pub struct SchemeParams {
    name: String,
    ring: Arc<RingParams>,
    plain_ring: Arc<RingParams>,
    plain_modulus: u64,
    sigma: f64,
    relin_base_bits: u32,
    security_note: String,
    delta: BigUint,
}

impl fmt::Debug for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchemeParams")
            .field("name", &self.name)
            .field("d", &self.ring.degree())
            .field("log2_q", &self.ring.modulus().bits())
            .field("t", &self.plain_modulus)
            .field("sigma", &self.sigma)
            .field("relin_base_bits", &self.relin_base_bits)
            .finish()
    }
}

impl PartialEq for SchemeParams {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.plain_modulus == other.plain_modulus
            && self.sigma.to_bits() == other.sigma.to_bits()
            && self.relin_base_bits == other.relin_base_bits
    }
}

impl SchemeParams {
    pub fn new(
        degree: usize,
        modulus: BigUint,
        plain_modulus: u64,
        sigma: f64,
        relin_base_bits: u32,
        security_note: &str,
    ) -> Result<Arc<Self>> {
        if plain_modulus < 2 {
            return Err(Error::InvalidParams("plaintext modulus must be at least 2".into()));
        }
        if plain_modulus >= 1 << 62 {
            return Err(Error::InvalidParams("plaintext modulus must be below 2^62".into()));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParams(format!("sigma must be positive, got {sigma}")));
        }
        let delta = &modulus / plain_modulus;
        if delta < BigUint::from(2u32) {
            return Err(Error::InvalidParams(format!(
                "q/t too small: delta = floor(q/t) = {delta} < 2"
            )));
        }
        let q_bits = modulus.bits() as u32;
        if relin_base_bits == 0 || relin_base_bits > q_bits {
            return Err(Error::InvalidParams(format!(
                "relinearization window {relin_base_bits} outside [1, {q_bits}]"
            )));
        }
        let ring = RingParams::new(degree, modulus)?;
        let plain_ring = RingParams::new(degree, BigUint::from(plain_modulus))?;
        Ok(Arc::new(SchemeParams {
            name: format!("custom-d{degree}-q{q_bits}-t{plain_modulus}"),
            ring,
            plain_ring,
            plain_modulus,
            sigma,
            relin_base_bits,
            security_note: security_note.to_string(),
            delta,
        }))
    }

    /// Same parameters under a different display name.
    pub fn renamed(self: &Arc<Self>, name: &str) -> Arc<Self> {
        Arc::new(SchemeParams {
            name: name.to_string(),
            ring: self.ring.clone(),
            plain_ring: self.plain_ring.clone(),
            plain_modulus: self.plain_modulus,
            sigma: self.sigma,
            relin_base_bits: self.relin_base_bits,
            security_note: self.security_note.clone(),
            delta: self.delta.clone(),
        })
    }

    /// Built-in presets.
    ///
    /// `paper-r3` is `d = 16384, q = 2^435 - 2^33 + 1, t = 65536`.
    /// `insecure-test` is `d = 2048, q = 2^116 - 2^18 + 1, t = 65536` with a
    /// 16-bit relinearization window; far too small a ring for its modulus and
    /// only meant for fast tests.
    pub fn preset(name: &str) -> Result<Arc<Self>> {
        let p = match name {
            "paper-r3" => Self::new(
                16384,
                paper_modulus(435).unwrap(),
                65536,
                DEFAULT_SIGMA,
                DEFAULT_RELIN_BASE_BITS,
                "estimated 128-bit (ternary secret)",
            )?,
            "insecure-test" => Self::new(
                2048,
                paper_modulus(116).unwrap(),
                65536,
                DEFAULT_SIGMA,
                16,
                "insecure-test",
            )?,
            other => return Err(Error::UnknownPreset(other.to_string())),
        };
        Ok(p.renamed(name))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ring(&self) -> &Arc<RingParams> {
        &self.ring
    }

    /// `R_t`, the plaintext ring.
    pub fn plain_ring(&self) -> &Arc<RingParams> {
        &self.plain_ring
    }

    pub fn degree(&self) -> usize {
        self.ring.degree()
    }

    pub fn modulus(&self) -> &BigUint {
        self.ring.modulus()
    }

    pub fn plain_modulus(&self) -> u64 {
        self.plain_modulus
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn relin_base_bits(&self) -> u32 {
        self.relin_base_bits
    }

    pub fn security_note(&self) -> &str {
        &self.security_note
    }

    /// `floor(q / t)`.
    pub fn delta(&self) -> &BigUint {
        &self.delta
    }

    /// Number of relinearization digits, `ceil(log2 q / w)`.
    pub fn relin_digit_count(&self) -> usize {
        (self.modulus().bits() as usize).div_ceil(self.relin_base_bits as usize)
    }

    /// Canonical byte encoding hashed into serialized headers.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = b"fvcond-params-v1".to_vec();
        out.extend_from_slice(&(self.degree() as u64).to_le_bytes());
        let q = self.modulus().to_bytes_le();
        out.extend_from_slice(&(q.len() as u32).to_le_bytes());
        out.extend_from_slice(&q);
        out.extend_from_slice(&self.plain_modulus.to_le_bytes());
        out.extend_from_slice(&self.sigma.to_bits().to_le_bytes());
        out.extend_from_slice(&self.relin_base_bits.to_le_bytes());
        out
    }

    pub fn hash(&self) -> [u8; 32] {
        Sha256::digest(self.canonical_bytes()).into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_published_values() {
        let p = SchemeParams::preset("paper-r3").unwrap();
        assert_eq!(p.degree(), 16384);
        assert_eq!(p.plain_modulus(), 65536);
        assert_eq!(p.modulus(), &(pow2(435) - pow2(33) + 1u32));
        assert_eq!(p.relin_base_bits(), 60);
        assert_eq!(p.relin_digit_count(), 8);
        let t = SchemeParams::preset("insecure-test").unwrap();
        assert_eq!(t.degree(), 2048);
        assert_eq!(t.modulus().bits(), 116);
        assert_eq!(t.security_note(), "insecure-test");
        assert!(matches!(SchemeParams::preset("nope"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn rejects_degenerate_params() {
        let q = BigUint::from(97u32);
        assert!(SchemeParams::new(8, q.clone(), 64, 3.19, 4, "x").is_err()); // delta = 1
        assert!(SchemeParams::new(8, q.clone(), 1, 3.19, 4, "x").is_err());
        assert!(SchemeParams::new(8, q.clone(), 16, 0.0, 4, "x").is_err());
        assert!(SchemeParams::new(8, q.clone(), 16, 3.19, 0, "x").is_err());
        assert!(SchemeParams::new(8, q.clone(), 16, 3.19, 8, "x").is_err()); // 97 has 7 bits
        assert!(SchemeParams::new(8, q, 16, 3.19, 7, "x").is_ok());
    }

    #[test]
    fn hash_distinguishes_params() {
        let a = SchemeParams::preset("paper-r3").unwrap();
        let b = SchemeParams::preset("insecure-test").unwrap();
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), SchemeParams::preset("paper-r3").unwrap().hash());
    }

    #[test]
    fn grid_moduli_sizes() {
        for bits in PAPER_MODULUS_BITS {
            assert_eq!(paper_modulus(bits).unwrap().bits(), bits as u64);
        }
        assert!(paper_modulus(100).is_none());
    }
}
