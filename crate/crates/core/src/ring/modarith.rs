//! Word-sized modular arithmetic used by the multi-prime product engine.

/// A prime modulus in `[2^61, 2^62)` with precomputed Barrett constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modulus {
    p: u64,
    barrett: u64,
}

impl Modulus {
    pub fn new(p: u64) -> Self {
        assert!(p >= 1 << 61 && p < 1 << 62, "modulus must lie in [2^61, 2^62)");
        let barrett = ((1u128 << 124) / p as u128) as u64;
        Modulus { p, barrett }
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Reduces `x < 2^124`.
    #[inline]
    pub fn reduce_u128(&self, x: u128) -> u64 {
        let q = (((x >> 61) * self.barrett as u128) >> 63) as u128;
        let mut r = (x - q * self.p as u128) as u64;
        while r >= self.p {
            r -= self.p;
        }
        r
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce_u128(a as u128 * b as u128)
    }

    /// Precomputes the Shoup companion of a constant `w < p`.
    #[inline]
    pub fn shoup(&self, w: u64) -> u64 {
        (((w as u128) << 64) / self.p as u128) as u64
    }

    /// `x * w mod p` for a constant `w` with companion `w_shoup`; any `x < 2^64`.
    #[inline]
    pub fn mul_shoup(&self, x: u64, w: u64, w_shoup: u64) -> u64 {
        let q = ((x as u128 * w_shoup as u128) >> 64) as u64;
        let r = x.wrapping_mul(w).wrapping_sub(q.wrapping_mul(self.p));
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "zero has no inverse");
        self.pow(a, self.p - 2)
    }
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// log2 of the largest supported two-power cyclotomic order (2d).
pub const MAX_LOG_ORDER: u32 = 17;

/// Number of word primes available to the product engine.
pub const PRIME_COUNT: usize = 40;

/// Primes `p = k * 2^17 + 1` in `[2^61, 2^62)`, descending.
pub fn ntt_primes() -> &'static [u64] {
    use std::sync::OnceLock;
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let step = 1u64 << MAX_LOG_ORDER;
        let mut k = ((1u64 << 62) - 1) / step;
        let mut out = Vec::with_capacity(PRIME_COUNT);
        while out.len() < PRIME_COUNT {
            let p = k * step + 1;
            assert!(p >= 1 << 61, "ran out of NTT primes");
            if is_prime_u64(p) {
                out.push(p);
            }
            k -= 1;
        }
        out
    })
}

/// Finds a primitive `order`-th root of unity modulo `m.value()` (`order` a power of two).
pub fn primitive_root_of_unity(m: &Modulus, order: u64) -> Option<u64> {
    let p = m.value();
    if order == 0 || !order.is_power_of_two() || (p - 1) % order != 0 {
        return None;
    }
    let cofactor = (p - 1) / order;
    for g in 2..p.min(1 << 20) {
        let w = m.pow(g, cofactor);
        if m.pow(w, order / 2) == p - 1 {
            return Some(w);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primes_are_ntt_friendly() {
        let primes = ntt_primes();
        assert_eq!(primes.len(), PRIME_COUNT);
        for &p in primes {
            assert!(is_prime_u64(p));
            assert_eq!((p - 1) % (1 << MAX_LOG_ORDER), 0);
            assert!(p >= 1 << 61 && p < 1 << 62);
        }
    }

    #[test]
    fn miller_rabin_small() {
        let primes: Vec<u64> = (0..100).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(primes[..10], [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(!is_prime_u64(3215031751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn root_of_unity_has_exact_order() {
        let m = Modulus::new(ntt_primes()[0]);
        let w = primitive_root_of_unity(&m, 1 << 12).unwrap();
        assert_eq!(m.pow(w, 1 << 12), 1);
        assert_eq!(m.pow(w, 1 << 11), m.value() - 1);
    }

    proptest! {
        #[test]
        fn barrett_matches_u128(a in any::<u64>(), b in any::<u64>(), idx in 0usize..PRIME_COUNT) {
            let m = Modulus::new(ntt_primes()[idx]);
            let (a, b) = (a % m.value(), b % m.value());
            let expect = ((a as u128 * b as u128) % m.value() as u128) as u64;
            prop_assert_eq!(m.mul(a, b), expect);
        }

        #[test]
        fn shoup_matches_u128(x in any::<u64>(), w in any::<u64>(), idx in 0usize..PRIME_COUNT) {
            let m = Modulus::new(ntt_primes()[idx]);
            let w = w % m.value();
            let expect = ((x as u128 * w as u128) % m.value() as u128) as u64;
            prop_assert_eq!(m.mul_shoup(x, w, m.shoup(w)), expect);
        }
    }
}
