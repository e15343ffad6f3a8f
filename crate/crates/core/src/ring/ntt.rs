//! Negacyclic number-theoretic transform over a word prime.
//!
//! Forward is Cooley-Tukey with bit-reversed powers of a primitive `2d`-th
//! root `psi`; inverse is Gentleman-Sande. The transformed vector is in
//! bit-reversed order, which is fine for pointwise products.

use super::modarith::{primitive_root_of_unity, Modulus};

#[derive(Debug, Clone)]
pub struct NttTable {
    modulus: Modulus,
    degree: usize,
    psi_rev: Vec<u64>,
    psi_rev_shoup: Vec<u64>,
    psi_inv_rev: Vec<u64>,
    psi_inv_rev_shoup: Vec<u64>,
    degree_inv: u64,
    degree_inv_shoup: u64,
}

fn bit_reverse(mut x: usize, bits: u32) -> usize {
    let mut r = 0;
    for _ in 0..bits {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    r
}

impl NttTable {
    /// Returns `None` when the prime has no primitive `2 * degree`-th root.
    pub fn new(modulus: Modulus, degree: usize) -> Option<Self> {
        assert!(degree.is_power_of_two() && degree >= 2);
        let psi = primitive_root_of_unity(&modulus, 2 * degree as u64)?;
        let psi_inv = modulus.inv(psi);
        let bits = degree.trailing_zeros();
        let mut psi_rev = vec![0u64; degree];
        let mut psi_inv_rev = vec![0u64; degree];
        let (mut pw, mut pw_inv) = (1u64, 1u64);
        for i in 0..degree {
            let r = bit_reverse(i, bits);
            psi_rev[r] = pw;
            psi_inv_rev[r] = pw_inv;
            pw = modulus.mul(pw, psi);
            pw_inv = modulus.mul(pw_inv, psi_inv);
        }
        let psi_rev_shoup = psi_rev.iter().map(|&w| modulus.shoup(w)).collect();
        let psi_inv_rev_shoup = psi_inv_rev.iter().map(|&w| modulus.shoup(w)).collect();
        let degree_inv = modulus.inv(degree as u64);
        Some(NttTable {
            modulus,
            degree,
            psi_rev,
            psi_rev_shoup,
            psi_inv_rev,
            psi_inv_rev_shoup,
            degree_inv,
            degree_inv_shoup: modulus.shoup(degree_inv),
        })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// In-place forward transform; input and output entries in `[0, p)`.
    pub fn forward(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.degree);
        let m_ = &self.modulus;
        let n = self.degree;
        let mut t = n;
        let mut m = 1;
        while m < n {
            t >>= 1;
            for i in 0..m {
                let j1 = 2 * i * t;
                let w = self.psi_rev[m + i];
                let ws = self.psi_rev_shoup[m + i];
                let (lo, hi) = a[j1..j1 + 2 * t].split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let u = *x;
                    let v = m_.mul_shoup(*y, w, ws);
                    *x = m_.add(u, v);
                    *y = m_.sub(u, v);
                }
            }
            m <<= 1;
        }
    }

    /// In-place inverse transform, including the `1/d` scaling.
    pub fn inverse(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.degree);
        let m_ = &self.modulus;
        let n = self.degree;
        let mut t = 1;
        let mut m = n;
        while m > 1 {
            let h = m >> 1;
            let mut j1 = 0;
            for i in 0..h {
                let w = self.psi_inv_rev[h + i];
                let ws = self.psi_inv_rev_shoup[h + i];
                let (lo, hi) = a[j1..j1 + 2 * t].split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let u = *x;
                    let v = *y;
                    *x = m_.add(u, v);
                    *y = m_.mul_shoup(m_.sub(u, v), w, ws);
                }
                j1 += 2 * t;
            }
            t <<= 1;
            m = h;
        }
        for x in a.iter_mut() {
            *x = m_.mul_shoup(*x, self.degree_inv, self.degree_inv_shoup);
        }
    }
}
