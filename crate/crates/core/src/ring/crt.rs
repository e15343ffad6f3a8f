//! Exact integer negacyclic products via residue number systems.
//!
//! Signed integer polynomials are reduced into a prefix of word primes, each
//! residue polynomial is transformed with [`NttTable`], multiplied pointwise,
//! and the exact integer result is rebuilt with Garner's algorithm. The prefix
//! length is chosen from coefficient bit bounds so that the product modulus
//! exceeds twice the largest possible output magnitude.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use rayon::prelude::*;

use super::modarith::{ntt_primes, Modulus, MAX_LOG_ORDER, PRIME_COUNT};
use super::ntt::NttTable;

/// Residues of one integer polynomial, one row per prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RnsPoly {
    pub rows: Vec<Vec<u64>>,
}

impl RnsPoly {
    pub fn prime_count(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug)]
pub struct CrtContext {
    degree: usize,
    tables: Vec<NttTable>,
    // 2^64 mod p_i and its Shoup companion
    radix: Vec<(u64, u64)>,
    // garner[i][j] = p_j^{-1} mod p_i (j < i), with Shoup companion
    garner: Vec<Vec<(u64, u64)>>,
    // product of the first k primes, and its floor half, as u64 limbs
    products: Vec<Vec<u64>>,
    halves: Vec<Vec<u64>>,
}

fn limbs_mul_add(x: &mut Vec<u64>, m: u64, a: u64) {
    let mut carry = a as u128;
    for limb in x.iter_mut() {
        let v = *limb as u128 * m as u128 + carry;
        *limb = v as u64;
        carry = v >> 64;
    }
    if carry > 0 {
        x.push(carry as u64);
    }
}

fn limbs_trim(x: &mut Vec<u64>) {
    while x.len() > 1 && *x.last().unwrap() == 0 {
        x.pop();
    }
}

fn limbs_cmp(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    let la = a.iter().rposition(|&v| v != 0).map_or(0, |i| i + 1);
    let lb = b.iter().rposition(|&v| v != 0).map_or(0, |i| i + 1);
    if la != lb {
        return la.cmp(&lb);
    }
    for i in (0..la).rev() {
        if a[i] != b[i] {
            return a[i].cmp(&b[i]);
        }
    }
    std::cmp::Ordering::Equal
}

// a - b, requires a >= b
fn limbs_sub(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len());
    let mut borrow = 0u64;
    for i in 0..a.len() {
        let bi = b.get(i).copied().unwrap_or(0);
        let (d1, o1) = a[i].overflowing_sub(bi);
        let (d2, o2) = d1.overflowing_sub(borrow);
        out.push(d2);
        borrow = (o1 || o2) as u64;
    }
    debug_assert_eq!(borrow, 0);
    out
}

fn limbs_to_biguint(x: &[u64]) -> BigUint {
    let mut digits = Vec::with_capacity(2 * x.len());
    for &l in x {
        digits.push(l as u32);
        digits.push((l >> 32) as u32);
    }
    BigUint::new(digits)
}

impl CrtContext {
    /// Shared context for ring degree `degree`, built once per process.
    pub fn for_degree(degree: usize) -> Arc<CrtContext> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CrtContext>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        guard
            .entry(degree)
            .or_insert_with(|| Arc::new(CrtContext::new(degree)))
            .clone()
    }

    fn new(degree: usize) -> Self {
        assert!(
            degree.is_power_of_two() && degree >= 2 && degree.trailing_zeros() < MAX_LOG_ORDER,
            "unsupported degree {degree}"
        );
        let primes = ntt_primes();
        let moduli: Vec<Modulus> = primes.iter().map(|&p| Modulus::new(p)).collect();
        let tables = moduli
            .par_iter()
            .map(|&m| NttTable::new(m, degree).expect("NTT prime supports degree"))
            .collect();
        let radix = moduli
            .iter()
            .map(|m| {
                let r = ((1u128 << 64) % m.value() as u128) as u64;
                (r, m.shoup(r))
            })
            .collect();
        let garner = (0..PRIME_COUNT)
            .map(|i| {
                (0..i)
                    .map(|j| {
                        let inv = moduli[i].inv(primes[j] % primes[i]);
                        (inv, moduli[i].shoup(inv))
                    })
                    .collect()
            })
            .collect();
        let mut products = vec![vec![1u64]];
        let mut halves = vec![vec![0u64]];
        for &p in primes {
            let mut next = products.last().unwrap().clone();
            limbs_mul_add(&mut next, p, 0);
            let mut half = next.clone();
            // shift right by one bit
            let mut carry = 0u64;
            for limb in half.iter_mut().rev() {
                let v = *limb;
                *limb = (v >> 1) | (carry << 63);
                carry = v & 1;
            }
            limbs_trim(&mut half);
            products.push(next);
            halves.push(half);
        }
        CrtContext {
            degree,
            tables,
            radix,
            garner,
            products,
            halves,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of primes needed so that values of magnitude below `2^bits` are
    /// recovered exactly (product modulus above `2^(bits+1)`).
    pub fn primes_for_bits(&self, bits: u64) -> usize {
        let mut acc = 0.0f64;
        for (k, table) in self.tables.iter().enumerate() {
            acc += (table.modulus().value() as f64).log2();
            if acc > bits as f64 + 1.0 {
                return k + 1;
            }
        }
        panic!("exact product of {bits}-bit coefficients exceeds the prime budget");
    }

    /// Prime count for a negacyclic product of operands with the given
    /// coefficient bit bounds, summed `terms` times.
    pub fn primes_for_product(&self, bits_a: u64, bits_b: u64, terms: usize) -> usize {
        let log_d = self.degree.trailing_zeros() as u64;
        let log_terms = (terms.max(1) as f64).log2().ceil() as u64;
        self.primes_for_bits(bits_a + bits_b + log_d + log_terms)
    }

    fn residue_of_limbs(&self, i: usize, limbs: &[u64]) -> u64 {
        let m = self.tables[i].modulus();
        let (r, rs) = self.radix[i];
        let mut acc = 0u64;
        for &l in limbs.iter().rev() {
            acc = m.add(m.mul_shoup(acc, r, rs), l % m.value());
        }
        acc
    }

    /// Residues of signed big integers.
    pub fn to_rns_signed(&self, coeffs: &[BigInt], k: usize) -> RnsPoly {
        assert_eq!(coeffs.len(), self.degree);
        let rows = (0..k)
            .into_par_iter()
            .map(|i| {
                let m = self.tables[i].modulus();
                coeffs
                    .iter()
                    .map(|c| {
                        let limbs: Vec<u64> = c.magnitude().iter_u64_digits().collect();
                        let r = self.residue_of_limbs(i, &limbs);
                        if c.sign() == Sign::Minus {
                            m.neg(r)
                        } else {
                            r
                        }
                    })
                    .collect()
            })
            .collect();
        RnsPoly { rows }
    }

    /// Residues of the centered lifts of coefficients stored in `[0, q)`.
    pub fn to_rns_centered(&self, coeffs: &[BigUint], q: &BigUint, k: usize) -> RnsPoly {
        assert_eq!(coeffs.len(), self.degree);
        let half = q >> 1u32;
        let neg: Vec<bool> = coeffs.iter().map(|c| c > &half).collect();
        let q_limbs: Vec<u64> = q.iter_u64_digits().collect();
        let rows = (0..k)
            .into_par_iter()
            .map(|i| {
                let m = self.tables[i].modulus();
                let q_res = self.residue_of_limbs(i, &q_limbs);
                coeffs
                    .iter()
                    .zip(&neg)
                    .map(|(c, &is_neg)| {
                        let limbs: Vec<u64> = c.iter_u64_digits().collect();
                        let r = self.residue_of_limbs(i, &limbs);
                        if is_neg {
                            m.sub(r, q_res)
                        } else {
                            r
                        }
                    })
                    .collect()
            })
            .collect();
        RnsPoly { rows }
    }

    /// Residues of signed word integers.
    pub fn to_rns_i64(&self, coeffs: &[i64], k: usize) -> RnsPoly {
        assert_eq!(coeffs.len(), self.degree);
        let rows = (0..k)
            .map(|i| {
                let m = self.tables[i].modulus();
                coeffs
                    .iter()
                    .map(|&c| {
                        let r = c.unsigned_abs() % m.value();
                        if c < 0 {
                            m.neg(r)
                        } else {
                            r
                        }
                    })
                    .collect()
            })
            .collect();
        RnsPoly { rows }
    }

    pub fn forward(&self, a: &mut RnsPoly) {
        a.rows
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, row)| self.tables[i].forward(row));
    }

    pub fn inverse(&self, a: &mut RnsPoly) {
        a.rows
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, row)| self.tables[i].inverse(row));
    }

    /// Pointwise product in the transformed domain.
    pub fn mul_pointwise(&self, a: &RnsPoly, b: &RnsPoly) -> RnsPoly {
        let k = a.prime_count().min(b.prime_count());
        let rows = (0..k)
            .map(|i| {
                let m = self.tables[i].modulus();
                a.rows[i].iter().zip(&b.rows[i]).map(|(&x, &y)| m.mul(x, y)).collect()
            })
            .collect();
        RnsPoly { rows }
    }

    /// `acc += a * b` pointwise; uses the first `acc.prime_count()` rows.
    pub fn mul_acc(&self, acc: &mut RnsPoly, a: &RnsPoly, b: &RnsPoly) {
        for (i, row) in acc.rows.iter_mut().enumerate() {
            let m = self.tables[i].modulus();
            for ((z, &x), &y) in row.iter_mut().zip(&a.rows[i]).zip(&b.rows[i]) {
                *z = m.add(*z, m.mul(x, y));
            }
        }
    }

    pub fn add_assign(&self, acc: &mut RnsPoly, a: &RnsPoly) {
        for (i, row) in acc.rows.iter_mut().enumerate() {
            let m = self.tables[i].modulus();
            for (z, &x) in row.iter_mut().zip(&a.rows[i]) {
                *z = m.add(*z, x);
            }
        }
    }

    pub fn zero(&self, k: usize) -> RnsPoly {
        RnsPoly {
            rows: vec![vec![0u64; self.degree]; k],
        }
    }

    /// Rebuilds the signed integers with magnitude below half the product
    /// modulus of the rows used.
    pub fn reconstruct(&self, a: &RnsPoly) -> Vec<BigInt> {
        let k = a.prime_count();
        assert!(k >= 1);
        let primes = ntt_primes();
        let product = &self.products[k];
        let half = &self.halves[k];
        (0..self.degree)
            .into_par_iter()
            .map_init(
                || (vec![0u64; k], Vec::with_capacity(k + 1)),
                |(mixed, acc), c| {
                    // Garner mixed-radix digits
                    for i in 0..k {
                        let m = self.tables[i].modulus();
                        let mut x = a.rows[i][c];
                        for j in 0..i {
                            let (inv, inv_s) = self.garner[i][j];
                            x = m.mul_shoup(m.sub(x, mixed[j] % m.value()), inv, inv_s);
                        }
                        mixed[i] = x;
                    }
                    acc.clear();
                    acc.push(mixed[k - 1]);
                    for i in (0..k - 1).rev() {
                        limbs_mul_add(acc, primes[i], mixed[i]);
                    }
                    if limbs_cmp(acc, half) == std::cmp::Ordering::Greater {
                        let mag = limbs_sub(product, acc);
                        BigInt::from_biguint(Sign::Minus, limbs_to_biguint(&mag))
                    } else {
                        BigInt::from_biguint(Sign::Plus, limbs_to_biguint(acc))
                    }
                },
            )
            .collect()
    }

    /// Exact negacyclic product of two signed integer polynomials.
    pub fn negacyclic_product(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let k = self.primes_for_product(max_bits(a), max_bits(b), 1);
        let mut ra = self.to_rns_signed(a, k);
        let mut rb = self.to_rns_signed(b, k);
        self.forward(&mut ra);
        self.forward(&mut rb);
        let mut prod = self.mul_pointwise(&ra, &rb);
        self.inverse(&mut prod);
        self.reconstruct(&prod)
    }
}

/// Largest coefficient bit length (at least 1).
pub fn max_bits(coeffs: &[BigInt]) -> u64 {
    coeffs.iter().map(|c| c.bits()).max().unwrap_or(0).max(1)
}

/// Schoolbook negacyclic product over the integers; test oracle.
pub fn negacyclic_schoolbook(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len();
    assert_eq!(n, b.len());
    let mut out = vec![BigInt::from(0); n];
    for i in 0..n {
        if a[i].sign() == Sign::NoSign {
            continue;
        }
        for j in 0..n {
            let p = &a[i] * &b[j];
            if i + j < n {
                out[i + j] += p;
            } else {
                out[i + j - n] -= p;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_poly(rng: &mut ChaCha8Rng, n: usize, bits: u64) -> Vec<BigInt> {
        (0..n)
            .map(|_| {
                let mut v = BigInt::from(0);
                for _ in 0..bits.div_ceil(32) {
                    v = (v << 32u32) + BigInt::from(rng.random::<u32>());
                }
                v >>= (bits.div_ceil(32) * 32 - bits) as usize;
                if rng.random_bool(0.5) {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }

    #[test]
    fn product_matches_schoolbook_across_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(n, bits) in &[(4usize, 3u64), (16, 64), (32, 435), (64, 829), (8, 1)] {
            let ctx = CrtContext::for_degree(n);
            let a = random_poly(&mut rng, n, bits);
            let b = random_poly(&mut rng, n, bits);
            assert_eq!(ctx.negacyclic_product(&a, &b), negacyclic_schoolbook(&a, &b));
        }
    }

    #[test]
    fn reconstruct_handles_extremes() {
        let ctx = CrtContext::for_degree(4);
        let k = 3;
        let half = limbs_to_biguint(&ctx.halves[k]);
        let top = BigInt::from_biguint(Sign::Plus, half.clone());
        let vals = vec![top.clone(), -top.clone(), BigInt::from(-1), BigInt::from(0)];
        let rns = ctx.to_rns_signed(&vals, k);
        assert_eq!(ctx.reconstruct(&rns), vals);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn small_products_exact(a in proptest::collection::vec(-1000i64..1000, 8),
                                b in proptest::collection::vec(-1000i64..1000, 8)) {
            let ctx = CrtContext::for_degree(8);
            let ab: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
            let bb: Vec<BigInt> = b.iter().map(|&x| BigInt::from(x)).collect();
            let k = ctx.primes_for_product(10, 10, 1);
            let mut ra = ctx.to_rns_i64(&a, k);
            let mut rb = ctx.to_rns_i64(&b, k);
            ctx.forward(&mut ra);
            ctx.forward(&mut rb);
            let mut p = ctx.mul_pointwise(&ra, &rb);
            ctx.inverse(&mut p);
            prop_assert_eq!(ctx.reconstruct(&p), negacyclic_schoolbook(&ab, &bb));
        }
    }
}
