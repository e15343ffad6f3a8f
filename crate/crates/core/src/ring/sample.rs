use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{RingElement, RingParams};
use crate::error::{Error, Result};

/// Default error standard deviation.
pub const DEFAULT_SIGMA: f64 = 3.19;

/// Tail cut for the rounded Gaussian, in standard deviations.
const GAUSSIAN_TAIL: f64 = 6.0;

fn uniform_below<R: Rng + ?Sized>(q: &BigUint, rng: &mut R) -> BigUint {
    let bits = q.bits() as usize;
    let bytes = bits.div_ceil(8);
    let excess = bytes * 8 - bits;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        if excess > 0 {
            let last = buf.len() - 1;
            buf[last] &= 0xffu8 >> excess;
        }
        let v = BigUint::from_bytes_le(&buf);
        if &v < q {
            return v;
        }
    }
}

/// Coefficients uniform in `[0, q)`.
pub fn sample_uniform<R: Rng + ?Sized>(params: &Arc<RingParams>, rng: &mut R) -> RingElement {
    let coeffs = (0..params.degree()).map(|_| uniform_below(params.modulus(), rng)).collect();
    RingElement { params: params.clone(), coeffs }
}

/// Coefficients uniform in `{-1, 0, 1}`.
pub fn sample_ternary<R: Rng + ?Sized>(params: &Arc<RingParams>, rng: &mut R) -> RingElement {
    let q = params.modulus();
    let coeffs = (0..params.degree())
        .map(|_| match rng.random_range(0..3u8) {
            0 => q - 1u32,
            1 => BigUint::zero(),
            _ => BigUint::from(1u32) % q,
        })
        .collect();
    RingElement { params: params.clone(), coeffs }
}

/// Rounded centered Gaussian with standard deviation `sigma`, cut at 6 sigma.
pub fn sample_gaussian<R: Rng + ?Sized>(
    params: &Arc<RingParams>,
    sigma: f64,
    rng: &mut R,
) -> Result<RingElement> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    let bound = GAUSSIAN_TAIL * sigma;
    let coeffs = (0..params.degree())
        .map(|_| loop {
            let v: f64 = normal.sample(rng);
            if v.abs() <= bound {
                break params.reduce(&BigInt::from(v.round() as i64));
            }
        })
        .collect();
    Ok(RingElement { params: params.clone(), coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn params(d: usize) -> Arc<RingParams> {
        let q = (BigUint::from(1u32) << 116u32) - (BigUint::from(1u32) << 18u32) + 1u32;
        RingParams::new(d, q).unwrap()
    }

    #[test]
    fn deterministic_per_seed() {
        let p = params(64);
        let a = sample_uniform(&p, &mut ChaCha20Rng::seed_from_u64(9));
        let b = sample_uniform(&p, &mut ChaCha20Rng::seed_from_u64(9));
        assert_eq!(a, b);
        let g1 = sample_gaussian(&p, 3.19, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        let g2 = sample_gaussian(&p, 3.19, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn ternary_support() {
        let p = params(256);
        let t = sample_ternary(&p, &mut ChaCha20Rng::seed_from_u64(2));
        let q_minus_1 = p.modulus() - 1u32;
        assert!(t
            .coeffs()
            .iter()
            .all(|c| c.is_zero() || c == &BigUint::from(1u32) || c == &q_minus_1));
        // all three values show up
        assert!(t.coeffs().iter().any(|c| c.is_zero()));
        assert!(t.coeffs().iter().any(|c| c == &q_minus_1));
    }

    #[test]
    fn uniform_stays_below_q() {
        let p = params(256);
        let u = sample_uniform(&p, &mut ChaCha20Rng::seed_from_u64(5));
        assert!(u.coeffs().iter().all(|c| c < p.modulus()));
        assert!(u.centered_bits() > 100);
    }

    #[test]
    fn gaussian_statistics() {
        let p = params(8192);
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut n = 0.0;
        let mut max_abs = 0i64;
        for _ in 0..10 {
            let g = sample_gaussian(&p, 3.2, &mut rng).unwrap();
            for c in g.centered() {
                let v = i64::try_from(&c).unwrap();
                max_abs = max_abs.max(v.abs());
                sum += v as f64;
                sum_sq += (v * v) as f64;
                n += 1.0;
            }
        }
        let mean = sum / n;
        let std = (sum_sq / n - mean * mean).sqrt();
        assert!((std - 3.2).abs() / 3.2 < 0.05, "std {std}");
        assert!(mean.abs() < 0.1);
        assert!(max_abs as f64 <= 6.0 * 3.2 + 0.5);
    }

    #[test]
    fn gaussian_rejects_nonpositive_sigma() {
        let p = params(8);
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert!(sample_gaussian(&p, 0.0, &mut rng).is_err());
        assert!(sample_gaussian(&p, -1.0, &mut rng).is_err());
        assert!(sample_gaussian(&p, f64::NAN, &mut rng).is_err());
    }
}
