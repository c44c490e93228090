use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use secnc_core::gf::{FieldParams, Gf, PrimeField};
use secnc_core::linalg::{contract, expand, MatrixFq};
use secnc_core::network_sim::{lift, noncoherent_decode};
use secnc_core::rankmetric::{GabidulinCode, LinPoly};
use secnc_core::secure_scheme::{CosetCoder, SchemeInstance, SchemeParams};
use secnc_core::Elem;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3), Just(5), Just(7)]
}

fn random_elems(f: &Gf, len: usize, r: &mut ChaCha8Rng) -> Vec<Elem> {
    use rand::Rng;
    (0..len).map(|_| f.element(r.gen_range(0..f.order())).unwrap()).collect()
}

/// Random `rows x cols` matrix of rank exactly `rank`.
fn with_rank(f: PrimeField, rows: usize, cols: usize, rank: usize, r: &mut ChaCha8Rng) -> MatrixFq {
    if rank == 0 {
        return MatrixFq::zeros(f, rows, cols);
    }
    let d = MatrixFq::random_full_rank(f, rows, rank, r);
    let z = MatrixFq::random_full_rank(f, rank, cols, r);
    d.mul(&z).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_bounds(q in prime(), rows in 1usize..7, inner in 1usize..7, cols in 1usize..7, seed: u64) {
        let f = PrimeField::new(q).unwrap();
        let mut r = rng(seed);
        let a = MatrixFq::random(f, rows, inner, &mut r);
        let b = MatrixFq::random(f, inner, cols, &mut r);
        let ab = a.mul(&b).unwrap();
        prop_assert!(a.rank() <= rows.min(inner));
        prop_assert_eq!(a.rank(), a.transpose().rank());
        prop_assert!(ab.rank() <= a.rank().min(b.rank()));
        let rref = a.rref();
        prop_assert_eq!(rref.pivots.len(), a.rank());
        prop_assert_eq!(rref.matrix.rref().matrix, rref.matrix.clone());
    }

    #[test]
    fn solve_and_null_space(q in prime(), n in 1usize..6, extra in 0usize..3, seed: u64) {
        let f = PrimeField::new(q).unwrap();
        let mut r = rng(seed);
        let a = MatrixFq::random_full_rank(f, n + extra, n, &mut r);
        let x = MatrixFq::random(f, n, 2, &mut r);
        let b = a.mul(&x).unwrap();
        prop_assert_eq!(a.solve(&b).unwrap(), x);
        let left = a.left_inverse().unwrap();
        prop_assert_eq!(left.mul(&a).unwrap(), MatrixFq::identity(f, n));
        let wide = MatrixFq::random(f, n, n + extra + 1, &mut r);
        let kernel = wide.null_space();
        prop_assert_eq!(kernel.cols() + wide.rank(), wide.cols());
        prop_assert!(wide.mul(&kernel).unwrap().is_zero());
    }

    #[test]
    fn expand_contract_round_trip(q in prime(), m in 1usize..5, len in 1usize..6, seed: u64) {
        let f = Gf::new(FieldParams::with_default_modulus(q, m).unwrap());
        let mut r = rng(seed);
        let v = random_elems(&f, len, &mut r);
        let x = expand(&f, &v);
        prop_assert_eq!(x.shape(), (len, m));
        prop_assert_eq!(contract(&f, &x).unwrap(), v);
    }

    #[test]
    fn frobenius_is_a_field_automorphism(q in prime(), m in 1usize..5, i in 0usize..8, seed: u64) {
        let f = Gf::new(FieldParams::with_default_modulus(q, m).unwrap());
        let mut r = rng(seed);
        let v = random_elems(&f, 2, &mut r);
        let (a, b) = (v[0], v[1]);
        prop_assert_eq!(f.frobenius(f.add(a, b), i), f.add(f.frobenius(a, i), f.frobenius(b, i)));
        prop_assert_eq!(f.frobenius(f.mul(a, b), i), f.mul(f.frobenius(a, i), f.frobenius(b, i)));
        prop_assert_eq!(f.frobenius(a, m), a);
        prop_assert_eq!(f.frobenius_inv(f.frobenius(a, i), i), a);
    }

    #[test]
    fn linearized_composition(m in 2usize..7, da in 0usize..3, db in 0usize..3, seed: u64) {
        let f = Gf::binary(m).unwrap();
        let mut r = rng(seed);
        let a = LinPoly::new(random_elems(&f, da + 1, &mut r));
        let b = LinPoly::new(random_elems(&f, db + 1, &mut r));
        let z = random_elems(&f, 2, &mut r);
        let ab = a.compose(&f, &b);
        prop_assert_eq!(ab.eval(&f, z[0]), a.eval(&f, b.eval(&f, z[0])));
        // linear over the base field
        prop_assert_eq!(a.eval(&f, f.add(z[0], z[1])), f.add(a.eval(&f, z[0]), a.eval(&f, z[1])));
        if !a.is_zero() {
            prop_assert_eq!(a.left_divide(&f, &ab), Some(b.clone()));
        }
    }

    #[test]
    fn gabidulin_corrects_up_to_half_distance(n in 2usize..8, k_frac in 0.0f64..1.0, seed: u64) {
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let t = (n - k) / 2;
        let f = Gf::binary(n + 1).unwrap();
        let code = GabidulinCode::with_default_points(f.clone(), n, k).unwrap();
        let mut r = rng(seed);
        let u = random_elems(&f, k, &mut r);
        let c = code.encode(&u).unwrap();
        let rank = (seed as usize) % (t + 1);
        let e = with_rank(f.base(), n, n + 1, rank, &mut r);
        let y = contract(&f, &expand(&f, &c).add(&e).unwrap()).unwrap();
        let out = code.decode(&y, t).unwrap();
        prop_assert_eq!(out.message(), Some(&u[..]));
    }

    #[test]
    fn coset_coding_round_trip(n in 2usize..7, k_frac in 0.0f64..1.0, seed: u64) {
        let k = 1 + ((n - 2) as f64 * k_frac) as usize;
        let f = Gf::binary(n).unwrap();
        let coder = CosetCoder::gabidulin(f.clone(), n, k).unwrap();
        let mut r = rng(seed);
        let s = random_elems(&f, coder.message_len(), &mut r);
        let x = coder.encode(&s, &mut r).unwrap();
        prop_assert_eq!(coder.decode(&x).unwrap(), s);
    }

    #[test]
    fn scheme_decodes_coherently(n in 3usize..8, t in 0usize..3, mu in 0usize..3, extra in 0usize..3, seed: u64) {
        prop_assume!(n > 2 * t + mu);
        let k = n - 2 * t - mu;
        let inst = SchemeInstance::build(SchemeParams::binary(n, n, t, mu, k).unwrap()).unwrap();
        let f = inst.field();
        let mut r = rng(seed);
        let s = inst.random_message(&mut r);
        let x = inst.encode(&s, &mut r).unwrap();
        let a = MatrixFq::random_full_rank(f.base(), n + extra, n, &mut r);
        let e = with_rank(f.base(), n + extra, n, (seed as usize) % (t + 1), &mut r);
        let y = a.mul(&expand(f, &x)).unwrap().add(&e).unwrap();
        let out = inst.coherent_decode(&y, &a).unwrap();
        prop_assert_eq!(out.message(), Some(&s[..]));
    }

    #[test]
    fn scheme_decodes_noncoherently(n in 3usize..7, t in 0usize..2, mu in 0usize..2, extra in 0usize..3, seed: u64) {
        prop_assume!(n > 2 * t + mu);
        let k = n - 2 * t - mu;
        let inst = SchemeInstance::build(SchemeParams::binary(n, n, t, mu, k).unwrap()).unwrap();
        let f = inst.field();
        let mut r = rng(seed);
        let s = inst.random_message(&mut r);
        let x = inst.encode(&s, &mut r).unwrap();
        let rows = n + extra;
        let a = MatrixFq::random_full_rank(f.base(), rows, n, &mut r);
        let e = with_rank(f.base(), rows, 2 * n, (seed as usize) % (t + 1), &mut r);
        let y = a.mul(&lift(f, &x)).unwrap().add(&e).unwrap();
        let out = noncoherent_decode(&inst, &y).unwrap();
        prop_assert_eq!(out.message(), Some(&s[..]));
    }

    #[test]
    fn encoder_views_agree(n in 3usize..8, t in 0usize..3, mu in 0usize..3, seed: u64) {
        prop_assume!(n > 2 * t + mu);
        let inst = SchemeInstance::build(SchemeParams::binary(n, n, t, mu, n - 2 * t - mu).unwrap()).unwrap();
        let mut r = rng(seed);
        let s = inst.random_message(&mut r);
        let v = inst.random_randomness(&mut r);
        prop_assert_eq!(inst.encode_with_randomness(&s, &v).unwrap(), inst.encode_via_transform(&s, &v).unwrap());
    }
}
