//! Negacyclic NTT directly over the big coefficient modulus `q`.
//!
//! Only available when `q` is prime and `2d | q - 1`. The scheme itself
//! multiplies through [`super::crt`]; this transform is exposed for callers
//! that want to stay in the `Z_q` evaluation domain.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub(crate) fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    const SMALL: [u32; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];
    for &p in &SMALL {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &SMALL {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[derive(Debug, Clone)]
pub struct BigNttTable {
    modulus: BigUint,
    degree: usize,
    psi_rev: Vec<BigUint>,
    psi_inv_rev: Vec<BigUint>,
    degree_inv: BigUint,
}

fn bit_reverse(mut x: usize, bits: u32) -> usize {
    let mut r = 0;
    for _ in 0..bits {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    r
}

fn mod_inverse(a: &BigUint, q: &BigUint) -> BigUint {
    // q prime
    a.modpow(&(q - 2u32), q)
}

impl BigNttTable {
    pub fn new(modulus: &BigUint, degree: usize) -> Result<Self> {
        let order = 2 * degree;
        let no_root = Error::NoRootOfUnity { order };
        let q_minus_1 = modulus - 1u32;
        if !(&q_minus_1 % order).is_zero() || !is_probable_prime(modulus) {
            return Err(no_root);
        }
        let cofactor = &q_minus_1 / order;
        let mut psi = None;
        for g in 2u32..200 {
            let w = BigUint::from(g).modpow(&cofactor, modulus);
            if w.modpow(&BigUint::from(degree), modulus) == q_minus_1 {
                psi = Some(w);
                break;
            }
        }
        let psi = psi.ok_or(no_root)?;
        let psi_inv = mod_inverse(&psi, modulus);
        let bits = degree.trailing_zeros();
        let mut psi_rev = vec![BigUint::zero(); degree];
        let mut psi_inv_rev = vec![BigUint::zero(); degree];
        let (mut pw, mut pw_inv) = (BigUint::one(), BigUint::one());
        for i in 0..degree {
            let r = bit_reverse(i, bits);
            psi_rev[r] = pw.clone();
            psi_inv_rev[r] = pw_inv.clone();
            pw = (&pw * &psi) % modulus;
            pw_inv = (&pw_inv * &psi_inv) % modulus;
        }
        let degree_inv = mod_inverse(&BigUint::from(degree), modulus);
        Ok(BigNttTable {
            modulus: modulus.clone(),
            degree,
            psi_rev,
            psi_inv_rev,
            degree_inv,
        })
    }

    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.modulus {
            s - &self.modulus
        } else {
            s
        }
    }

    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            a + &self.modulus - b
        }
    }

    pub fn forward(&self, a: &mut [BigUint]) {
        let n = self.degree;
        let mut t = n;
        let mut m = 1;
        while m < n {
            t >>= 1;
            for i in 0..m {
                let j1 = 2 * i * t;
                let w = &self.psi_rev[m + i];
                for j in j1..j1 + t {
                    let u = a[j].clone();
                    let v = (&a[j + t] * w) % &self.modulus;
                    a[j] = self.add(&u, &v);
                    a[j + t] = self.sub(&u, &v);
                }
            }
            m <<= 1;
        }
    }

    pub fn inverse(&self, a: &mut [BigUint]) {
        let n = self.degree;
        let mut t = 1;
        let mut m = n;
        while m > 1 {
            let h = m >> 1;
            let mut j1 = 0;
            for i in 0..h {
                let w = &self.psi_inv_rev[h + i];
                for j in j1..j1 + t {
                    let u = a[j].clone();
                    let v = a[j + t].clone();
                    a[j] = self.add(&u, &v);
                    a[j + t] = (self.sub(&u, &v) * w) % &self.modulus;
                }
                j1 += 2 * t;
            }
            t <<= 1;
            m = h;
        }
        for x in a.iter_mut() {
            *x = (&*x * &self.degree_inv).mod_floor(&self.modulus);
        }
    }
}
