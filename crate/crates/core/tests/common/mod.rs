#![allow(dead_code)]

use std::collections::BTreeSet;

use logflat::dedekind::{DedekindLogBase, Divisor, FactoredK, Unit};
use logflat::monodromy::MonodromyData;
use logflat::monoid::{AffineMonoid, MonoidMorphism};
use logflat::mun::{rac_make, torsor_from_element, MunTorsorClass, RacElement};
use logflat::{FiniteAbelianGroup, GroupElement, Int, IntMatrix, QmodZ};
use num_integer::Integer;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn v(xs: &[i64]) -> Vec<Int> {
    xs.iter().map(|&x| Int::from(x)).collect()
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A random monoid of ambient rank `d` whose generators all have positive
/// height under a random functional, returned with that functional.
pub fn random_pointed_monoid(rng: &mut ChaCha8Rng, d: usize) -> (AffineMonoid, Vec<Int>) {
    let h: Vec<Int> = loop {
        let h: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
        if h.iter().any(|&x| x != 0) {
            break v(&h);
        }
    };
    let count = rng.gen_range(1..=4);
    let mut gens = Vec::new();
    while gens.len() < count {
        let g = v(&(0..d).map(|_| rng.gen_range(-3..=3)).collect::<Vec<_>>());
        if dot(&h, &g) >= Int::from(1) {
            gens.push(g);
        }
    }
    (AffineMonoid::new(d, gens).unwrap(), h)
}

/// A random monoid of rank at most 2, sometimes with units.
pub fn random_monoid(rng: &mut ChaCha8Rng, d: usize) -> AffineMonoid {
    let (m, _) = random_pointed_monoid(rng, d);
    if d == 2 && rng.gen_bool(0.25) {
        let mut gens = m.generators().to_vec();
        let g = gens[0].clone();
        gens.push(g.iter().map(|x| -x).collect());
        return AffineMonoid::new(d, gens).unwrap();
    }
    m
}

/// Every sum of at most `max_total` generators.
pub fn brute_force_elements(m: &AffineMonoid, max_total: usize) -> BTreeSet<Vec<Int>> {
    let d = m.ambient_rank();
    let mut all = BTreeSet::new();
    all.insert(vec![Int::from(0); d]);
    let mut layer = all.clone();
    for _ in 0..max_total {
        let mut next = BTreeSet::new();
        for x in &layer {
            for g in m.generators() {
                let y: Vec<Int> = x.iter().zip(g).map(|(a, b)| a + b).collect();
                if all.insert(y.clone()) {
                    next.insert(y);
                }
            }
        }
        layer = next;
    }
    all
}

/// A random morphism between saturated monoids of rank at most 2: either an
/// inclusion of a saturated submonoid or a random integer matrix.
pub fn random_saturated_morphism(rng: &mut ChaCha8Rng) -> MonoidMorphism {
    loop {
        let dq = rng.gen_range(1..=2);
        let q = random_monoid(rng, dq).saturate().unwrap();
        if rng.gen_bool(0.5) {
            let count = rng.gen_range(1..=3);
            let elems: Vec<Vec<Int>> = brute_force_elements(&q, 3)
                .into_iter()
                .filter(|x| x.iter().any(|c| c != &Int::from(0)))
                .collect();
            if elems.is_empty() {
                continue;
            }
            let gens: Vec<Vec<Int>> = (0..count)
                .map(|_| {
                    let k = rng.gen_range(1..=3);
                    elems[rng.gen_range(0..elems.len())]
                        .iter()
                        .map(|x| x * k)
                        .collect()
                })
                .collect();
            let p = AffineMonoid::new(dq, gens).unwrap().saturate().unwrap();
            if let Ok(u) = MonoidMorphism::new(p, q, IntMatrix::identity(dq)) {
                return u;
            }
        } else {
            let dp = rng.gen_range(1..=2);
            let p = random_monoid(rng, dp).saturate().unwrap();
            let data: Vec<Int> = (0..dq * dp).map(|_| Int::from(rng.gen_range(-2..=2))).collect();
            let m = IntMatrix::new(dq, dp, data);
            if let Ok(u) = MonoidMorphism::new(p, q, m) {
                return u;
            }
        }
    }
}

/// The two standard bases with a nonempty log support.
pub fn test_bases() -> Vec<DedekindLogBase> {
    vec![
        DedekindLogBase::integers(&[2, 3, 5, 7], &[2, 5]),
        DedekindLogBase::q_sqrt_minus_5(&["p2", "p3"]),
    ]
}

fn random_unit(rng: &mut ChaCha8Rng, b: &DedekindLogBase) -> Unit {
    let w: i64 = b.unit_torsion().to_string().parse().unwrap();
    let free: Vec<i64> = (0..b.unit_rank()).map(|_| rng.gen_range(-3..=3)).collect();
    b.unit(rng.gen_range(0..w), &free).unwrap()
}

/// A random element of `K^*` whose divisor is `base + (random n-multiples off D)`,
/// retried until principal.
fn random_element_over(
    rng: &mut ChaCha8Rng,
    b: &DedekindLogBase,
    n: i64,
    base: impl Fn(&mut ChaCha8Rng, &str) -> i64,
) -> FactoredK {
    loop {
        let mut d = Divisor::zero();
        for p in b.places() {
            let c = if b.in_support(p) {
                base(rng, p)
            } else {
                n * rng.gen_range(-2..=2)
            };
            d.add_term(p, &Int::from(c));
        }
        let u = random_unit(rng, b);
        if let Ok(z) = b.element(u, d) {
            return z;
        }
    }
}

pub fn random_torsor(rng: &mut ChaCha8Rng, b: &DedekindLogBase, n: i64) -> MunTorsorClass {
    let z = random_element_over(rng, b, n, |rng, _| rng.gen_range(-6..=6));
    torsor_from_element(b, &Int::from(n), &z).unwrap()
}

/// A random pair `(I, z)` with branch divisor `Δ >= 0` supported on `D`.
pub fn random_rac(rng: &mut ChaCha8Rng, b: &DedekindLogBase, n: i64) -> RacElement {
    loop {
        let mut ideal = Divisor::zero();
        for p in b.places() {
            ideal.add_term(p, &Int::from(rng.gen_range(-2..=2)));
        }
        let mut div = ideal.scale(&Int::from(-n));
        for p in b.log_support() {
            div.add_term(p, &Int::from(rng.gen_range(0..=2 * n)));
        }
        let u = random_unit(rng, b);
        if let Ok(z) = b.element(u, div) {
            return rac_make(b, &Int::from(n), ideal, z).unwrap();
        }
    }
}

/// A random finite abelian group of order at most `max_order`.
pub fn random_group(rng: &mut ChaCha8Rng, max_order: i64) -> FiniteAbelianGroup {
    loop {
        let k = rng.gen_range(1..=3);
        let orders: Vec<Int> = (0..k).map(|_| Int::from(rng.gen_range(2..=max_order))).collect();
        let g = FiniteAbelianGroup::from_cyclic_orders(&orders);
        if g.order() <= Int::from(max_order) {
            return g;
        }
    }
}

/// A random bilinear table: each generator pair gets a multiple of
/// `1/gcd(orders)`.
pub fn random_pairing(rng: &mut ChaCha8Rng, max_order: i64) -> MonodromyData {
    let phi = random_group(rng, max_order);
    let psi = random_group(rng, max_order);
    let table = phi
        .invariant_factors()
        .iter()
        .map(|a| {
            psi.invariant_factors()
                .iter()
                .map(|b| {
                    let g: i64 = a.gcd(b).to_string().parse().unwrap();
                    QmodZ::from_i64(rng.gen_range(0..g), g)
                })
                .collect()
        })
        .collect();
    MonodromyData::new(phi, psi, table).unwrap()
}

pub fn random_element(rng: &mut ChaCha8Rng, g: &FiniteAbelianGroup) -> GroupElement {
    let coords: Vec<Int> = g
        .invariant_factors()
        .iter()
        .map(|d| Int::from(rng.gen_range(0..d.to_string().parse::<i64>().unwrap())))
        .collect();
    g.element(&coords).unwrap()
}
