use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::encoder::FractionalEncoder;
use crate::error::Result;
use crate::fv::{Ciphertext, Evaluator, Plaintext, PublicKey, RelinKey, SecretKey};

/// Arithmetic a comparison circuit needs. Constants are prepared once with
/// [`EvalBackend::constant`] and reused across the circuit.
pub trait EvalBackend {
    type Value: Clone;
    type Constant;

    fn constant(&self, x: f64) -> Result<Self::Constant>;
    fn inject(&self, x: f64) -> Result<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn negate(&self, a: &Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn add_const(&self, a: &Self::Value, c: &Self::Constant) -> Result<Self::Value>;
    fn mul_const(&self, a: &Self::Value, c: &Self::Constant) -> Result<Self::Value>;
}

/// Double-precision reference arithmetic.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleBackend;

impl EvalBackend for OracleBackend {
    type Value = f64;
    type Constant = f64;

    fn constant(&self, x: f64) -> Result<f64> {
        Ok(x)
    }
    fn inject(&self, x: f64) -> Result<f64> {
        Ok(x)
    }
    fn add(&self, a: &f64, b: &f64) -> Result<f64> {
        Ok(a + b)
    }
    fn sub(&self, a: &f64, b: &f64) -> Result<f64> {
        Ok(a - b)
    }
    fn negate(&self, a: &f64) -> Result<f64> {
        Ok(-a)
    }
    fn mul(&self, a: &f64, b: &f64) -> Result<f64> {
        Ok(a * b)
    }
    fn add_const(&self, a: &f64, c: &f64) -> Result<f64> {
        Ok(a + c)
    }
    fn mul_const(&self, a: &f64, c: &f64) -> Result<f64> {
        Ok(a * c)
    }
}

/// Encoded plaintexts in `R_t` without encryption: exactly what a
/// noise-free decryption of the encrypted circuit would produce.
#[derive(Debug, Clone)]
pub struct PlainRingBackend {
    encoder: FractionalEncoder,
}

impl PlainRingBackend {
    pub fn new(encoder: FractionalEncoder) -> Self {
        PlainRingBackend { encoder }
    }

    pub fn encoder(&self) -> &FractionalEncoder {
        &self.encoder
    }
}

impl EvalBackend for PlainRingBackend {
    type Value = Plaintext;
    type Constant = Plaintext;

    fn constant(&self, x: f64) -> Result<Plaintext> {
        self.encoder.encode(x)
    }
    fn inject(&self, x: f64) -> Result<Plaintext> {
        self.encoder.encode(x)
    }
    fn add(&self, a: &Plaintext, b: &Plaintext) -> Result<Plaintext> {
        a.add(b)
    }
    fn sub(&self, a: &Plaintext, b: &Plaintext) -> Result<Plaintext> {
        a.sub(b)
    }
    fn negate(&self, a: &Plaintext) -> Result<Plaintext> {
        Ok(a.negate())
    }
    fn mul(&self, a: &Plaintext, b: &Plaintext) -> Result<Plaintext> {
        a.mul(b)
    }
    fn add_const(&self, a: &Plaintext, c: &Plaintext) -> Result<Plaintext> {
        a.add(c)
    }
    fn mul_const(&self, a: &Plaintext, c: &Plaintext) -> Result<Plaintext> {
        a.mul(c)
    }
}

/// FV ciphertexts; constants become encoded plaintexts.
#[derive(Debug)]
pub struct FvBackend<'a> {
    encoder: FractionalEncoder,
    evaluator: Evaluator,
    public: &'a PublicKey,
    relin: &'a RelinKey,
    rng: Mutex<ChaCha20Rng>,
}

impl<'a> FvBackend<'a> {
    /// `seed` drives the encryption randomness of [`EvalBackend::inject`].
    pub fn new(
        encoder: FractionalEncoder,
        public: &'a PublicKey,
        relin: &'a RelinKey,
        seed: u64,
    ) -> Self {
        let evaluator = Evaluator::new(encoder.params().clone());
        FvBackend {
            encoder,
            evaluator,
            public,
            relin,
            rng: Mutex::new(ChaCha20Rng::seed_from_u64(seed)),
        }
    }

    pub fn encoder(&self) -> &FractionalEncoder {
        &self.encoder
    }

    /// Decrypts and decodes.
    pub fn reveal(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<f64> {
        self.encoder.decode(&sk.decrypt(ct)?)
    }
}

impl EvalBackend for FvBackend<'_> {
    type Value = Ciphertext;
    type Constant = Plaintext;

    fn constant(&self, x: f64) -> Result<Plaintext> {
        self.encoder.encode(x)
    }
    fn inject(&self, x: f64) -> Result<Ciphertext> {
        let pt = self.encoder.encode(x)?;
        let mut rng = self.rng.lock().unwrap_or_else(|e| e.into_inner());
        self.public.encrypt(&pt, &mut *rng)
    }
    fn add(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        self.evaluator.add(a, b)
    }
    fn sub(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        self.evaluator.sub(a, b)
    }
    fn negate(&self, a: &Ciphertext) -> Result<Ciphertext> {
        self.evaluator.negate(a)
    }
    fn mul(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        self.evaluator.mul(a, b, self.relin)
    }
    fn add_const(&self, a: &Ciphertext, c: &Plaintext) -> Result<Ciphertext> {
        self.evaluator.add_plain(a, c)
    }
    fn mul_const(&self, a: &Ciphertext, c: &Plaintext) -> Result<Ciphertext> {
        self.evaluator.mul_plain(a, c)
    }
}
