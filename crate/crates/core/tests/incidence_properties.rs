mod common;

use common::*;
use incidence_core::poset::connected_posets;
use incidence_core::{Algebra, Field, IdempotentClass};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fields() -> [Field; 3] {
    [Field::prime(2).unwrap(), Field::prime(3).unwrap(), Field::Rational]
}

/// An algebra over a random small poset and field, plus an rng seed.
fn algebra_strategy() -> impl Strategy<Value = (Algebra, u64)> {
    let posets = posets_up_to_dim(10);
    (0..posets.len(), 0usize..3, any::<u64>())
        .prop_map(move |(i, f, seed)| (Algebra::new(posets[i].clone(), fields()[f]), seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ring_axioms_and_identity((alg, seed) in algebra_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g, h) = (random_element(&alg, &mut rng), random_element(&alg, &mut rng), random_element(&alg, &mut rng));
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        let one = alg.identity();
        prop_assert_eq!(&one * &f, f.clone());
        prop_assert_eq!(&f * &one, f.clone());
        prop_assert_eq!(scalar_mat(&(&f * &g)), scalar_mat_mul(alg.field(), &scalar_mat(&f), &scalar_mat(&g)));
    }

    #[test]
    fn inverse_exists_exactly_for_unit_diagonals((alg, seed) in algebra_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_element(&alg, &mut rng);
        let units_on_diagonal = (0..alg.poset().len()).all(|x| !f.get(x, x).is_zero());
        match f.invert() {
            Ok(g) => {
                prop_assert!(units_on_diagonal);
                prop_assert_eq!(&f * &g, alg.identity());
                prop_assert_eq!(&g * &f, alg.identity());
            }
            Err(_) => prop_assert!(!units_on_diagonal),
        }
        let u = random_invertible(&alg, &mut rng);
        prop_assert_eq!(&u * &u.invert().unwrap(), alg.identity());
    }

    #[test]
    fn radical_is_an_ideal((alg, seed) in algebra_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, strict) = random_element(&alg, &mut rng).split_diagonal();
        let g = random_element(&alg, &mut rng);
        prop_assert!(strict.in_radical(None).unwrap());
        prop_assert!((&strict * &g).in_radical(None).unwrap());
        prop_assert!((&g * &strict).in_radical(None).unwrap());
    }
}

#[test]
fn inverse_criterion_exhaustive_over_f2() {
    for poset in posets_up_to_dim(6) {
        let alg = Algebra::new(poset, Field::prime(2).unwrap());
        let all = all_elements(&alg);
        let id = Mat::identity(alg.poset().len());
        let mats: Vec<Mat> = all.iter().map(Mat::of).collect();
        for (f, mf) in all.iter().zip(&mats) {
            let brute = mats.iter().any(|mg| mf.mul(mg, 2) == id);
            assert_eq!(f.invert().is_ok(), brute, "{f}");
        }
    }
}

#[test]
fn center_is_scalar_on_connected_posets() {
    for poset in connected_up_to_dim(6) {
        let alg = Algebra::new(poset, Field::prime(2).unwrap());
        let basis: Vec<_> = alg.basis().pairs().iter().map(|&(u, v)| alg.e(u, v)).collect();
        for f in all_elements(&alg) {
            let central = basis.iter().all(|e| &f * e == e * &f);
            assert_eq!(central, f.is_zero() || f == alg.identity(), "{f}");
        }
    }
}

#[test]
fn idempotents_have_zero_one_diagonal() {
    for p in [2, 3] {
        for poset in posets_up_to_dim(6) {
            let alg = Algebra::new(poset, Field::prime(p).unwrap());
            for f in all_elements(&alg).iter().filter(|f| &f.square() == *f) {
                for x in 0..alg.poset().len() {
                    let d = f.get(x, x);
                    assert!(d.is_zero() || d.is_one(), "{f}");
                }
            }
        }
    }
}

#[test]
fn primitive_idempotents_conjugate_to_standard() {
    for poset in connected_posets(3) {
        let alg = Algebra::new(poset, Field::prime(3).unwrap());
        for f in all_elements(&alg) {
            if let IdempotentClass::Primitive { base } = f.classify_idempotent() {
                let u = f.conjugator_to_standard().unwrap();
                assert_eq!(conjugate(&u, &f), alg.e(base, base), "{f}");
                assert_eq!(f.primitive_base().unwrap(), base);
            }
        }
    }
}

#[test]
fn element_files_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for field in fields() {
        for poset in connected_posets(4) {
            let alg = Algebra::new(poset, field);
            let f = random_element(&alg, &mut rng);
            let text = f.to_json();
            let back = alg.element_from_json(&text).unwrap();
            assert_eq!(back, f);
            assert_eq!(back.to_json(), text);
        }
    }
}
