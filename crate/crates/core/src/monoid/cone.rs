use std::collections::HashSet;

use crate::error::MonoidError;
use crate::lattice::{dot, integer_kernel, primitive};
use crate::{Int, IntMatrix};
use num_traits::{Signed, Zero};

/// Largest ambient dimension the exact cone routines accept.
pub const MAX_CONE_DIM: usize = 4;

const MAX_FM_ROWS: usize = 20_000;

/// A rational polyhedral cone `cone(g_1, ..., g_m)` in `R^dim`, stored with
/// both descriptions: the generators and the inequalities.
///
/// `equalities` is a lattice basis of the integer vectors vanishing on the
/// span; `facets` holds one primitive inward normal per facet, chosen inside
/// the span so that it does not depend on how the cone was generated.
#[derive(Clone, Debug)]
pub struct Cone {
    dim: usize,
    generators: Vec<Vec<Int>>,
    equalities: Vec<Vec<Int>>,
    facets: Vec<Vec<Int>>,
}

impl Cone {
    /// Computes the facets of `cone(generators)` by Fourier–Motzkin
    /// elimination of the multipliers in `x = G·λ, λ >= 0`.
    pub fn from_generators(generators: &[Vec<Int>], dim: usize) -> Result<Cone, MonoidError> {
        if dim > MAX_CONE_DIM {
            return Err(MonoidError::Capability {
                operation: "cone facet computation",
                rank: dim,
                max: MAX_CONE_DIM,
            });
        }
        let gens: Vec<Vec<Int>> = generators
            .iter()
            .filter(|g| g.iter().any(|x| !x.is_zero()))
            .cloned()
            .collect();
        let equalities = if gens.is_empty() {
            (0..dim)
                .map(|i| (0..dim).map(|j| Int::from((i == j) as i64)).collect())
                .collect()
        } else {
            integer_kernel(&IntMatrix::from_rows(&gens, dim))
        };
        let span_dim = dim - equalities.len();

        let candidates = eliminate_multipliers(&gens, dim)?;
        let mut seen_tight: HashSet<Vec<bool>> = HashSet::new();
        let mut facets = Vec::new();
        for h in candidates {
            let values: Vec<Int> = gens.iter().map(|g| dot(&h, g)).collect();
            debug_assert!(values.iter().all(|v| !v.is_negative()));
            if values.iter().all(|v| v.is_zero()) {
                continue;
            }
            let tight: Vec<bool> = values.iter().map(|v| v.is_zero()).collect();
            let tight_gens: Vec<Vec<Int>> = gens
                .iter()
                .zip(&tight)
                .filter(|(_, t)| **t)
                .map(|(g, _)| g.clone())
                .collect();
            let r = IntMatrix::from_rows(&tight_gens, dim).rank();
            if r + 1 != span_dim || !seen_tight.insert(tight) {
                continue;
            }
            // canonical normal: the primitive one inside the span of the cone
            let mut rows = tight_gens;
            rows.extend(equalities.iter().cloned());
            let normal = if rows.is_empty() {
                h
            } else {
                let k = integer_kernel(&IntMatrix::from_rows(&rows, dim));
                debug_assert_eq!(k.len(), 1);
                let n = k.into_iter().next().unwrap();
                if gens.iter().any(|g| dot(&n, g).is_negative()) {
                    n.iter().map(|x| -x).collect()
                } else {
                    n
                }
            };
            facets.push(normal);
        }
        facets.sort();
        Ok(Cone {
            dim,
            generators: gens,
            equalities,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<Int>] {
        &self.generators
    }

    pub fn facets(&self) -> &[Vec<Int>] {
        &self.facets
    }

    pub fn equalities(&self) -> &[Vec<Int>] {
        &self.equalities
    }

    /// Dimension of the linear span.
    pub fn span_dim(&self) -> usize {
        self.dim - self.equalities.len()
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        assert_eq!(x.len(), self.dim);
        self.equalities.iter().all(|e| dot(e, x).is_zero())
            && self.facets.iter().all(|h| !dot(h, x).is_negative())
    }

    /// Lattice basis (Hermite form) of the integer points of the lineality space.
    pub fn lineality_lattice(&self) -> Vec<Vec<Int>> {
        let rows: Vec<Vec<Int>> = self
            .equalities
            .iter()
            .chain(&self.facets)
            .cloned()
            .collect();
        if rows.is_empty() {
            return integer_kernel(&IntMatrix::zeros(1, self.dim));
        }
        integer_kernel(&IntMatrix::from_rows(&rows, self.dim))
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality_lattice().is_empty()
    }

    /// Sum of the facet normals: zero on the lineality space and strictly
    /// positive on every other point of the cone.
    pub fn positive_functional(&self) -> Vec<Int> {
        let mut h = vec![Int::zero(); self.dim];
        for f in &self.facets {
            for (a, b) in h.iter_mut().zip(f) {
                *a += b;
            }
        }
        h
    }

    /// Generators of the dual cone `{y : y·x >= 0 for all x in the cone}`.
    pub fn dual_generators(&self) -> Vec<Vec<Int>> {
        let mut out = self.facets.clone();
        for e in &self.equalities {
            out.push(e.clone());
            out.push(e.iter().map(|x| -x).collect());
        }
        out
    }
}

/// Projects `{(x, λ) : x - G·λ = 0, λ >= 0}` onto `x`. Returns the surviving
/// inequalities on `x` (equalities on `x` are recomputed by the caller).
///
/// Each inequality carries the set of multipliers `λ_i >= 0` it was combined
/// from; a row whose set contains another row's set is dropped as redundant.
fn eliminate_multipliers(gens: &[Vec<Int>], dim: usize) -> Result<Vec<Vec<Int>>, MonoidError> {
    let m = gens.len();
    if m > 64 {
        return Err(MonoidError::SearchTooLarge {
            operation: "Fourier-Motzkin elimination",
            size: m,
        });
    }
    let width = dim + m;
    let mut eqs: Vec<Vec<Int>> = (0..dim)
        .map(|j| {
            let mut row = vec![Int::zero(); width];
            row[j] = Int::from(1);
            for (i, g) in gens.iter().enumerate() {
                row[dim + i] = -g[j].clone();
            }
            row
        })
        .collect();
    let mut ineqs: Vec<(Vec<Int>, u64)> = (0..m)
        .map(|i| {
            let mut row = vec![Int::zero(); width];
            row[dim + i] = Int::from(1);
            (row, 1u64 << i)
        })
        .collect();
    let mut remaining: Vec<usize> = (dim..width).collect();

    while !remaining.is_empty() {
        let with_eq = remaining
            .iter()
            .position(|&c| eqs.iter().any(|r| !r[c].is_zero()));
        if let Some(pos) = with_eq {
            let c = remaining.swap_remove(pos);
            let p = eqs.iter().position(|r| !r[c].is_zero()).unwrap();
            let pivot = eqs.swap_remove(p);
            let (pa, sign) = (pivot[c].abs(), pivot[c].signum());
            let clear = |r: &mut Vec<Int>| {
                if r[c].is_zero() {
                    return;
                }
                let f = -(r[c].clone() * &sign);
                for (x, y) in r.iter_mut().zip(&pivot) {
                    *x = x.clone() * &pa + &f * y;
                }
                *r = primitive(r);
            };
            eqs.iter_mut().for_each(clear);
            ineqs.iter_mut().for_each(|(r, _)| clear(r));
        } else {
            let cost = |c: usize| {
                let pos = ineqs.iter().filter(|(r, _)| r[c].is_positive()).count();
                let neg = ineqs.iter().filter(|(r, _)| r[c].is_negative()).count();
                pos * neg
            };
            let pos = (0..remaining.len())
                .min_by_key(|&i| cost(remaining[i]))
                .unwrap();
            let c = remaining.swap_remove(pos);
            let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
            for r in ineqs.drain(..) {
                if r.0[c].is_positive() {
                    pos.push(r);
                } else if r.0[c].is_negative() {
                    neg.push(r);
                } else {
                    keep.push(r);
                }
            }
            for (p, hp) in &pos {
                for (q, hq) in &neg {
                    let (a, b) = (-q[c].clone(), p[c].clone());
                    let row: Vec<Int> = p.iter().zip(q).map(|(x, y)| x * &a + y * &b).collect();
                    keep.push((primitive(&row), hp | hq));
                }
                if keep.len() > MAX_FM_ROWS {
                    return Err(MonoidError::SearchTooLarge {
                        operation: "Fourier-Motzkin elimination",
                        size: keep.len(),
                    });
                }
            }
            ineqs = keep;
        }
        ineqs.retain(|(r, _)| r.iter().any(|x| !x.is_zero()));
        let mut seen = HashSet::new();
        ineqs.retain(|(r, _)| seen.insert(r.clone()));
        let hist: Vec<u64> = ineqs.iter().map(|(_, h)| *h).collect();
        let mut i = 0;
        ineqs.retain(|(_, h)| {
            let idx = i;
            i += 1;
            !hist
                .iter()
                .enumerate()
                .any(|(j, o)| j != idx && (h & o) == *o && o != h)
        });
    }
    Ok(ineqs.into_iter().map(|(r, _)| r[..dim].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Int> {
        xs.iter().map(|&x| Int::from(x)).collect()
    }

    /// Facets by brute force: normals of hyperplanes through span_dim - 1
    /// independent generators that keep every generator on one side.
    fn brute_facets(gens: &[Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
        let cone = Cone::from_generators(gens, dim).unwrap();
        let span = cone.span_dim();
        let mut out: Vec<Vec<Int>> = Vec::new();
        let m = gens.len();
        for mask in 0u32..(1 << m) {
            let subset: Vec<Vec<Int>> = (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| gens[i].clone())
                .collect();
            if subset.len() + 1 != span.max(1) && !(span == 1 && subset.is_empty()) {
                continue;
            }
            let mut rows = subset.clone();
            rows.extend(cone.equalities().iter().cloned());
            let normals = if rows.is_empty() {
                integer_kernel(&IntMatrix::zeros(1, dim))
            } else {
                integer_kernel(&IntMatrix::from_rows(&rows, dim))
            };
            if normals.len() != 1 {
                continue;
            }
            for sign in [1i64, -1] {
                let h: Vec<Int> = normals[0].iter().map(|x| x * sign).collect();
                let vals: Vec<Int> = gens.iter().map(|g| dot(&h, g)).collect();
                if vals.iter().all(|x| !x.is_negative()) && vals.iter().any(|x| x.is_positive()) {
                    let h = primitive(&h);
                    if !out.contains(&h) {
                        out.push(h);
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn quadrant() {
        let c = Cone::from_generators(&[v(&[1, 0]), v(&[0, 1])], 2).unwrap();
        assert_eq!(c.facets(), &[v(&[0, 1]), v(&[1, 0])]);
        assert!(c.contains(&v(&[3, 0])));
        assert!(!c.contains(&v(&[-1, 2])));
        assert!(c.is_pointed());
    }

    #[test]
    fn half_plane_and_line() {
        let c = Cone::from_generators(&[v(&[1, 0]), v(&[-1, 0]), v(&[0, 1])], 2).unwrap();
        assert_eq!(c.facets(), &[v(&[0, 1])]);
        assert_eq!(c.lineality_lattice(), vec![v(&[1, 0])]);
        assert!(!c.is_pointed());

        let line = Cone::from_generators(&[v(&[1, 1]), v(&[-2, -2])], 2).unwrap();
        assert!(line.facets().is_empty());
        assert_eq!(line.span_dim(), 1);
        assert!(line.contains(&v(&[-5, -5])));
        assert!(!line.contains(&v(&[1, 0])));
    }

    #[test]
    fn ray_in_plane() {
        let c = Cone::from_generators(&[v(&[1, 2])], 2).unwrap();
        assert_eq!(c.span_dim(), 1);
        assert_eq!(c.facets().len(), 1);
        assert!(c.contains(&v(&[2, 4])));
        assert!(!c.contains(&v(&[-1, -2])));
        assert!(!c.contains(&v(&[1, 1])));
    }

    #[test]
    fn trivial_cone() {
        let c = Cone::from_generators(&[v(&[0, 0])], 2).unwrap();
        assert!(c.contains(&v(&[0, 0])));
        assert!(!c.contains(&v(&[1, 0])));
    }

    #[test]
    fn matches_brute_force_in_3d() {
        let gens = vec![
            v(&[1, 0, 0]),
            v(&[0, 1, 0]),
            v(&[0, 0, 1]),
            v(&[1, 1, -1]),
            v(&[2, -1, 1]),
        ];
        let c = Cone::from_generators(&gens, 3).unwrap();
        assert_eq!(c.facets(), &brute_facets(&gens, 3)[..]);
        let flat = vec![v(&[1, 0, 1]), v(&[0, 1, 1]), v(&[1, 1, 2]), v(&[2, 1, 3])];
        let c = Cone::from_generators(&flat, 3).unwrap();
        assert_eq!(c.span_dim(), 2);
        assert_eq!(c.facets().len(), 2);
    }

    #[test]
    fn random_cones_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..150 {
            let dim = rng.gen_range(2..=4);
            let count = rng.gen_range(1..=7);
            let gens: Vec<Vec<Int>> = (0..count)
                .map(|_| (0..dim).map(|_| Int::from(rng.gen_range(-3..=3))).collect())
                .collect();
            let c = Cone::from_generators(&gens, dim).unwrap();
            let nonzero: Vec<Vec<Int>> = gens
                .iter()
                .filter(|g| g.iter().any(|x| !x.is_zero()))
                .cloned()
                .collect();
            if nonzero.is_empty() || c.span_dim() == 0 {
                continue;
            }
            assert_eq!(c.facets(), &brute_facets(&nonzero, dim)[..], "{gens:?}");
        }
    }

    #[test]
    fn rank_cap() {
        let gens = vec![v(&[1, 0, 0, 0, 0])];
        assert!(matches!(
            Cone::from_generators(&gens, 5),
            Err(MonoidError::Capability { .. })
        ));
    }

    #[test]
    fn dual_generators_are_nonnegative() {
        let gens = vec![v(&[1, 0, 1]), v(&[0, 1, 1]), v(&[1, 1, 2])];
        let c = Cone::from_generators(&gens, 3).unwrap();
        for y in c.dual_generators() {
            for g in &gens {
                assert!(!dot(&y, g).is_negative());
            }
        }
    }
}
