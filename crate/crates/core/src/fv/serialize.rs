//! Versioned binary layout for keys and ciphertexts.
//!
//! Every blob starts with a 4-byte magic, a little-endian `u16` format
//! version and the SHA-256 of the parameter set's canonical bytes. A ring
//! element is `u32 degree`, `u32 coefficient width in bytes`, then `degree`
//! fixed-width little-endian coefficients.

use std::sync::Arc;

use num_bigint::BigUint;

use super::keys::{PublicKey, RelinKey, SecretKey};
use super::{Ciphertext, KeySet, SchemeParams};
use crate::error::{Error, Result};
use crate::ring::RingElement;

pub const FORMAT_VERSION: u16 = 1;

pub const MAGIC_CIPHERTEXT: &[u8; 4] = b"FVCT";
pub const MAGIC_KEYSET: &[u8; 4] = b"FVKS";
pub const MAGIC_PUBLIC: &[u8; 4] = b"FVPK";

fn write_header(out: &mut Vec<u8>, magic: &[u8; 4], params: &SchemeParams) {
    out.extend_from_slice(magic);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&params.hash());
}

fn write_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn write_element(out: &mut Vec<u8>, e: &RingElement) {
    let width = (e.params().modulus().bits() as usize).div_ceil(8);
    write_u32(out, e.params().degree() as u32);
    write_u32(out, width as u32);
    for c in e.coeffs() {
        let mut bytes = c.to_bytes_le();
        if bytes.len() == 1 && bytes[0] == 0 {
            bytes.clear();
        }
        bytes.resize(width, 0);
        out.extend_from_slice(&bytes);
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::Serialization("unexpected end of input".into()));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn header(&mut self, magic: &[u8; 4], params: &SchemeParams) -> Result<()> {
        if self.take(4)? != magic {
            return Err(Error::Serialization(format!(
                "bad magic, expected {}",
                String::from_utf8_lossy(magic)
            )));
        }
        let version = u16::from_le_bytes(self.take(2)?.try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::Serialization(format!("unsupported format version {version}")));
        }
        if self.take(32)? != params.hash() {
            return Err(Error::Serialization("parameter hash mismatch".into()));
        }
        Ok(())
    }

    fn element(&mut self, params: &SchemeParams) -> Result<RingElement> {
        let ring = params.ring();
        let degree = self.u32()? as usize;
        let width = self.u32()? as usize;
        let expect = (ring.modulus().bits() as usize).div_ceil(8);
        if degree != ring.degree() || width != expect {
            return Err(Error::Serialization(format!(
                "element shape ({degree}, {width}) does not match parameters ({}, {expect})",
                ring.degree()
            )));
        }
        let mut coeffs = Vec::with_capacity(degree);
        for _ in 0..degree {
            let c = BigUint::from_bytes_le(self.take(width)?);
            if &c >= ring.modulus() {
                return Err(Error::Serialization("coefficient not reduced mod q".into()));
            }
            coeffs.push(c);
        }
        RingElement::from_coeffs(ring, coeffs)
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Serialization("trailing bytes".into()));
        }
        Ok(())
    }
}

pub fn ciphertext_to_bytes(ct: &Ciphertext) -> Vec<u8> {
    let mut out = Vec::new();
    write_header(&mut out, MAGIC_CIPHERTEXT, &ct.params);
    write_u32(&mut out, ct.mult_depth);
    write_u32(&mut out, ct.plain_mult_count);
    write_u32(&mut out, ct.parts.len() as u32);
    for p in &ct.parts {
        write_element(&mut out, p);
    }
    out
}

pub fn ciphertext_from_bytes(params: &Arc<SchemeParams>, data: &[u8]) -> Result<Ciphertext> {
    let mut r = Reader { data, pos: 0 };
    r.header(MAGIC_CIPHERTEXT, params)?;
    let depth = r.u32()?;
    let plain = r.u32()?;
    let n = r.u32()? as usize;
    if n < 2 {
        return Err(Error::Serialization("ciphertext needs at least two parts".into()));
    }
    let parts = (0..n).map(|_| r.element(params)).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Ok(Ciphertext::new(params.clone(), parts, depth, plain))
}

pub fn public_key_to_bytes(pk: &PublicKey) -> Vec<u8> {
    let mut out = Vec::new();
    write_header(&mut out, MAGIC_PUBLIC, &pk.params);
    write_element(&mut out, &pk.p0);
    write_element(&mut out, &pk.p1);
    out
}

pub fn public_key_from_bytes(params: &Arc<SchemeParams>, data: &[u8]) -> Result<PublicKey> {
    let mut r = Reader { data, pos: 0 };
    r.header(MAGIC_PUBLIC, params)?;
    let p0 = r.element(params)?;
    let p1 = r.element(params)?;
    r.finish()?;
    Ok(PublicKey { params: params.clone(), p0, p1 })
}

/// Secret key, public key, then `u32` digit count and relinearization pairs.
pub fn keyset_to_bytes(keys: &KeySet) -> Vec<u8> {
    let mut out = Vec::new();
    write_header(&mut out, MAGIC_KEYSET, &keys.secret.params);
    write_element(&mut out, &keys.secret.s);
    write_element(&mut out, &keys.public.p0);
    write_element(&mut out, &keys.public.p1);
    write_u32(&mut out, keys.relin.pairs.len() as u32);
    for (a, b) in &keys.relin.pairs {
        write_element(&mut out, a);
        write_element(&mut out, b);
    }
    out
}

pub fn keyset_from_bytes(params: &Arc<SchemeParams>, data: &[u8]) -> Result<KeySet> {
    let mut r = Reader { data, pos: 0 };
    r.header(MAGIC_KEYSET, params)?;
    let s = r.element(params)?;
    let p0 = r.element(params)?;
    let p1 = r.element(params)?;
    let n = r.u32()? as usize;
    if n != params.relin_digit_count() {
        return Err(Error::Serialization(format!(
            "expected {} relinearization pairs, found {n}",
            params.relin_digit_count()
        )));
    }
    let pairs = (0..n)
        .map(|_| Ok((r.element(params)?, r.element(params)?)))
        .collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Ok(KeySet {
        secret: SecretKey { params: params.clone(), s },
        public: PublicKey { params: params.clone(), p0, p1 },
        relin: RelinKey::from_pairs(params.clone(), pairs),
    })
}
