mod common;

use common::{brute_force_elements, dot, random_pointed_monoid, random_saturated_morphism, v};
use logflat::monoid::{
    check_integral_bounded, integrality_certificate_free_base, is_kummer,
    is_kummer_by_definition, AffineMonoid, MonoidMorphism, MorphismVerdict,
};
use logflat::{Int, IntMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn generators(d: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, d), 1..=4)
}

fn monoid(d: usize, gens: &[Vec<i64>]) -> AffineMonoid {
    AffineMonoid::new(d, gens.iter().map(|g| v(g)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn saturation_is_idempotent(gens in generators(2)) {
        let m = monoid(2, &gens);
        let s = m.saturate().unwrap();
        prop_assert_eq!(s.saturate().unwrap(), s.clone());
        prop_assert!(s.is_saturated().is_verified());
        for g in m.generators() {
            prop_assert!(s.contains(g).unwrap().is_verified());
        }
    }

    #[test]
    fn saturation_idempotent_in_rank_three(gens in generators(3)) {
        let s = monoid(3, &gens).saturate().unwrap();
        prop_assert_eq!(s.saturate().unwrap(), s);
    }

    #[test]
    fn membership_matches_enumeration(seed in any::<u64>(), d in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, h) = random_pointed_monoid(&mut rng, d);
        let min_h = m.generators().iter().map(|g| dot(&h, g)).min().unwrap();
        let known = brute_force_elements(&m, 8);
        let window: Vec<Vec<Int>> = if d == 1 {
            (-12..=12).map(|a| v(&[a])).collect()
        } else {
            (-8..=8).flat_map(|a| (-8..=8).map(move |b| v(&[a, b]))).collect()
        };
        for x in window {
            if dot(&h, &x) > &min_h * 8 {
                continue;
            }
            let verdict = m.contains(&x).unwrap();
            prop_assert_eq!(verdict.is_verified(), known.contains(&x), "{} {:?}", m, x);
        }
    }

    #[test]
    fn kummer_paths_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_saturated_morphism(&mut rng);
        let a = is_kummer(&u).unwrap();
        let b = is_kummer_by_definition(&u).unwrap();
        prop_assert_eq!(a.is_verified(), b.is_verified(), "{}", u);
        let decided = !matches!(a, MorphismVerdict::Inconclusive { .. });
        prop_assert!(decided);
    }

    #[test]
    fn certificate_excludes_refutation(n in 1i64..=3, r in 1usize..=2, k in 0i64..=2) {
        // [n] followed by a Kummer inclusion of N^r into a finer lattice
        let p = AffineMonoid::free(r);
        let mut m = IntMatrix::scalar(r, Int::from(n));
        m[(0, 0)] = Int::from(n + k);
        let u = MonoidMorphism::new(p.clone(), p, m).unwrap();
        let cert = integrality_certificate_free_base(&u).unwrap();
        prop_assert!(cert.v_exact.is_verified());
        prop_assert!(!check_integral_bounded(&u, 2).unwrap().is_refuted());
    }
}

#[test]
fn hand_examples() {
    let u = MonoidMorphism::multiplication(2, 3);
    assert!(is_kummer(&u).unwrap().is_verified());
    let diag = MonoidMorphism::new(
        AffineMonoid::free(1),
        AffineMonoid::free(2),
        IntMatrix::from_i64_rows(&[&[1], &[1]]),
    )
    .unwrap();
    assert!(is_kummer(&diag).unwrap().is_refuted());
    let shear = MonoidMorphism::new(
        AffineMonoid::free(2),
        AffineMonoid::free(2),
        IntMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]),
    )
    .unwrap();
    assert!(is_kummer(&shear).unwrap().is_refuted());
}

#[test]
fn kummer_into_non_free_target() {
    // N^2 -> the cone over (1,0), (1,2) in its own group: index 2
    let q = AffineMonoid::from_i64(2, &[&[1, 0], &[1, 1], &[1, 2]]).unwrap();
    let u = MonoidMorphism::new(
        AffineMonoid::free(2),
        q,
        IntMatrix::from_i64_rows(&[&[1, 1], &[0, 2]]),
    )
    .unwrap();
    assert!(is_kummer(&u).unwrap().is_verified());
    assert!(is_kummer_by_definition(&u).unwrap().is_verified());
    assert_eq!(u.cokernel().torsion.order(), Int::from(2));
    let cert = integrality_certificate_free_base(&u).unwrap();
    assert_eq!(cert.n, Int::from(2));
}
