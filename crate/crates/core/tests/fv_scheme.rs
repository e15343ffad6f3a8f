use std::sync::Arc;

use fvcond::fv::serialize::{
    ciphertext_from_bytes, ciphertext_to_bytes, keyset_from_bytes, keyset_to_bytes,
};
use fvcond::fv::{keygen, Evaluator, KeySet, Plaintext, SchemeParams};
use fvcond::Error;
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn small_params() -> Arc<SchemeParams> {
    let q = (BigUint::from(1u32) << 116u32) - (BigUint::from(1u32) << 18u32) + 1u32;
    SchemeParams::new(64, q, 257, 3.19, 16, "toy").unwrap()
}

fn setup(seed: u64) -> (Arc<SchemeParams>, KeySet, Evaluator, ChaCha20Rng) {
    let params = small_params();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let keys = keygen(&params, &mut rng).unwrap();
    let ev = Evaluator::new(params.clone());
    (params, keys, ev, rng)
}

fn poly(params: &SchemeParams, seed: i64) -> Plaintext {
    let coeffs: Vec<i64> = (0..params.degree() as i64).map(|i| (i * 31 + seed * 7) % 19 - 9).collect();
    Plaintext::from_i64(params, &coeffs).unwrap()
}

#[test]
fn encrypt_decrypt_roundtrip() {
    let (params, keys, _, mut rng) = setup(1);
    for s in 0..5 {
        let m = poly(&params, s);
        let ct = keys.public.encrypt(&m, &mut rng).unwrap();
        assert_eq!(keys.secret.decrypt(&ct).unwrap(), m);
    }
}

#[test]
fn homomorphic_ops_match_plaintext_ring() {
    let (params, keys, ev, mut rng) = setup(2);
    let a = poly(&params, 1);
    let b = poly(&params, 2);
    let ca = keys.public.encrypt(&a, &mut rng).unwrap();
    let cb = keys.public.encrypt(&b, &mut rng).unwrap();
    let dec = |c: &fvcond::fv::Ciphertext| keys.secret.decrypt(c).unwrap();
    assert_eq!(dec(&ev.add(&ca, &cb).unwrap()), a.add(&b).unwrap());
    assert_eq!(dec(&ev.sub(&ca, &cb).unwrap()), a.sub(&b).unwrap());
    assert_eq!(dec(&ev.negate(&ca).unwrap()), a.negate());
    assert_eq!(dec(&ev.add_plain(&ca, &b).unwrap()), a.add(&b).unwrap());
    assert_eq!(dec(&ev.mul_plain(&ca, &b).unwrap()), a.mul(&b).unwrap());
    let unrelin = ev.mul_no_relin(&ca, &cb).unwrap();
    assert_eq!(unrelin.size(), 3);
    assert_eq!(dec(&unrelin), a.mul(&b).unwrap());
    let prod = ev.mul(&ca, &cb, &keys.relin).unwrap();
    assert_eq!(prod.size(), 2);
    assert_eq!(dec(&prod), a.mul(&b).unwrap());
}

#[test]
fn add_plain_matches_adding_a_fresh_encryption() {
    let (params, keys, ev, mut rng) = setup(3);
    let a = poly(&params, 4);
    let b = poly(&params, 5);
    let ca = keys.public.encrypt(&a, &mut rng).unwrap();
    let cb = keys.public.encrypt(&b, &mut rng).unwrap();
    let x = keys.secret.decrypt(&ev.add_plain(&ca, &b).unwrap()).unwrap();
    let y = keys.secret.decrypt(&ev.add(&ca, &cb).unwrap()).unwrap();
    assert_eq!(x, y);
}

#[test]
fn depth_counters() {
    let (params, keys, ev, mut rng) = setup(4);
    let c = keys.public.encrypt(&Plaintext::constant(&params, 3), &mut rng).unwrap();
    assert_eq!((c.mult_depth(), c.plain_mult_count()), (0, 0));
    let c2 = ev.mul(&c, &c, &keys.relin).unwrap();
    let c3 = ev.mul(&c2, &c, &keys.relin).unwrap();
    assert_eq!(c3.mult_depth(), 2);
    let p = ev.mul_plain(&c, &Plaintext::constant(&params, 2)).unwrap();
    assert_eq!((p.mult_depth(), p.plain_mult_count()), (0, 1));
    let mixed = ev.mul(&p, &c2, &keys.relin).unwrap();
    assert_eq!((mixed.mult_depth(), mixed.plain_mult_count()), (2, 1));
    let sum = ev.add(&c3, &p).unwrap();
    assert_eq!((sum.mult_depth(), sum.plain_mult_count()), (2, 1));
}

#[test]
fn noise_budget_behaviour() {
    let (params, keys, ev, mut rng) = setup(5);
    let zero = keys.public.encrypt(&Plaintext::zero(&params), &mut rng).unwrap();
    let m = keys.public.encrypt(&poly(&params, 6), &mut rng).unwrap();
    let b0 = keys.secret.noise_budget(&zero).unwrap();
    let bm = keys.secret.noise_budget(&m).unwrap();
    assert!(b0.abs_diff(bm) <= 2, "{b0} vs {bm}");

    let by_plain = ev.mul_plain(&m, &Plaintext::constant(&params, 1)).unwrap();
    assert!(keys.secret.noise_budget(&by_plain).unwrap() + 1 >= bm);

    let mut c = keys.public.encrypt(&Plaintext::constant(&params, 2), &mut rng).unwrap();
    let mut last = keys.secret.noise_budget(&c).unwrap();
    let mut value: u64 = 2;
    let mut failed = false;
    for _ in 0..12 {
        c = ev.square(&c, &keys.relin).unwrap();
        value = value * value % 257;
        let budget = keys.secret.noise_budget(&c).unwrap();
        assert!(budget <= last);
        last = budget;
        let ok = keys.secret.decrypt(&c).unwrap() == Plaintext::constant(&params, value as i64);
        if budget > 0 {
            assert!(ok, "decryption wrong with budget {budget}");
        }
        if !ok {
            failed = true;
            break;
        }
    }
    assert!(failed, "repeated squaring should eventually exhaust the budget");
}

#[test]
fn keygen_is_deterministic_per_seed() {
    let params = small_params();
    let a = keygen(&params, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
    let b = keygen(&params, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
    let c = keygen(&params, &mut ChaCha20Rng::seed_from_u64(10)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.secret, c.secret);
}

#[test]
fn relin_key_from_other_params_is_rejected() {
    let (params, keys, ev, mut rng) = setup(6);
    let other = SchemeParams::new(64, params.modulus().clone(), 257, 3.19, 20, "other").unwrap();
    let other_keys = keygen(&other, &mut rng).unwrap();
    let c = keys.public.encrypt(&Plaintext::constant(&params, 1), &mut rng).unwrap();
    assert_eq!(ev.mul(&c, &c, &other_keys.relin), Err(Error::RelinKeyMismatch));
}

#[test]
fn serialization_roundtrip() {
    let (params, keys, ev, mut rng) = setup(7);
    let c = keys.public.encrypt(&poly(&params, 3), &mut rng).unwrap();
    let c = ev.mul(&c, &c, &keys.relin).unwrap();
    let bytes = ciphertext_to_bytes(&c);
    assert_eq!(&bytes[..4], b"FVCT");
    assert_eq!(ciphertext_from_bytes(&params, &bytes).unwrap(), c);

    let kb = keyset_to_bytes(&keys);
    assert_eq!(keyset_from_bytes(&params, &kb).unwrap(), keys);

    let other = SchemeParams::new(64, params.modulus().clone(), 65537, 3.19, 16, "x").unwrap();
    assert!(matches!(ciphertext_from_bytes(&other, &bytes), Err(Error::Serialization(_))));
    assert!(ciphertext_from_bytes(&params, &bytes[..bytes.len() - 1]).is_err());
}
