//! Affine monoids (finitely generated submonoids of `Z^d`) and morphisms
//! between them.
//!
//! Every monoid here is integral by construction. Most questions are answered
//! inside the group completion, in coordinates along a Hermite basis of
//! `M^gp`: there the cone of `M` is full-dimensional and its facets come from
//! [`cone::Cone`].

pub mod cone;
mod hilbert;
mod morphism;

use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::MonoidError;
use crate::lattice::{dot, hermite_rows, integer_kernel, solve_in_row_lattice};
use crate::{Int, IntMatrix};
use cone::Cone;

pub use morphism::{
    compose, is_exact, is_kummer, is_kummer_by_definition, kummer_report,
    check_integral_bounded, integrality_certificate_free_base, IntegralityCertificate,
    KummerReport, MonoidMorphism,
};

/// Largest rank of `M^gp` handled by the exact routines.
pub const MAX_GP_RANK: usize = cone::MAX_CONE_DIM;

/// Node budget for a single membership search.
pub const MEMBERSHIP_BUDGET: usize = 200_000;

/// Outcome of a possibly incomplete decision procedure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MorphismVerdict {
    Verified,
    Refuted { witness: Witness },
    /// The search stopped at `bound` without reaching a decision.
    Inconclusive { bound: u64 },
}

impl MorphismVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, MorphismVerdict::Verified)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, MorphismVerdict::Refuted { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            MorphismVerdict::Refuted { witness } => Some(witness),
            _ => None,
        }
    }

    pub(crate) fn refuted(reason: impl Into<String>, vectors: Vec<Vec<Int>>) -> Self {
        MorphismVerdict::Refuted {
            witness: Witness {
                reason: reason.into(),
                vectors,
            },
        }
    }
}

impl fmt::Display for MorphismVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismVerdict::Verified => write!(f, "verified"),
            MorphismVerdict::Refuted { witness } => write!(f, "refuted: {witness}"),
            MorphismVerdict::Inconclusive { bound } => write!(f, "inconclusive (bound {bound})"),
        }
    }
}

/// A concrete counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub reason: String,
    #[serde(serialize_with = "crate::json::ser_vecs")]
    pub vectors: Vec<Vec<Int>>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.reason)?;
        for v in &self.vectors {
            write!(f, " {}", fmt_vec(v))?;
        }
        Ok(())
    }
}

pub(crate) fn fmt_vec(v: &[Int]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Cached data of a monoid, all in coordinates along the Hermite basis of `M^gp`.
#[derive(Debug)]
pub(crate) struct Structure {
    pub basis: Vec<Vec<Int>>,
    pub cone: Cone,
    pub positive: Vec<Int>,
    /// Generators with `positive · g > 0`.
    pub pos_gens: Vec<Vec<Int>>,
    /// Hermite basis of the group generated by the remaining generators.
    pub units: Vec<Vec<Int>>,
}

/// The submonoid of `Z^d` generated by a finite set of vectors.
#[derive(Clone, Debug)]
pub struct AffineMonoid {
    rank: usize,
    generators: Vec<Vec<Int>>,
    basis: OnceLock<Vec<Vec<Int>>>,
    structure: OnceLock<Result<Arc<Structure>, MonoidError>>,
}

impl PartialEq for AffineMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.generators == other.generators
    }
}

impl Eq for AffineMonoid {}

impl AffineMonoid {
    /// Zero vectors are dropped, duplicates removed and the rest sorted in
    /// decreasing lexicographic order (so `N^r` lists `e_1, ..., e_r`).
    pub fn new(rank: usize, generators: Vec<Vec<Int>>) -> Result<Self, MonoidError> {
        if generators.is_empty() {
            return Err(MonoidError::NoGenerators);
        }
        for (index, g) in generators.iter().enumerate() {
            if g.len() != rank {
                return Err(MonoidError::GeneratorLength {
                    index,
                    expected: rank,
                    got: g.len(),
                });
            }
        }
        let mut gens: Vec<Vec<Int>> = generators
            .into_iter()
            .filter(|g| g.iter().any(|x| !x.is_zero()))
            .collect();
        gens.sort_by(|a, b| b.cmp(a));
        gens.dedup();
        Ok(AffineMonoid {
            rank,
            generators: gens,
            basis: OnceLock::new(),
            structure: OnceLock::new(),
        })
    }

    pub fn from_i64(rank: usize, generators: &[&[i64]]) -> Result<Self, MonoidError> {
        Self::new(
            rank,
            generators
                .iter()
                .map(|g| g.iter().map(|&x| Int::from(x)).collect())
                .collect(),
        )
    }

    /// `N^r` with its standard generators.
    pub fn free(r: usize) -> Self {
        let gens = (0..r)
            .map(|i| (0..r).map(|j| Int::from((i == j) as i64)).collect())
            .collect();
        if r == 0 {
            return Self::new(0, vec![vec![]]).unwrap();
        }
        Self::new(r, gens).unwrap()
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    /// Nonzero generators in normal form. Empty for the trivial monoid.
    pub fn generators(&self) -> &[Vec<Int>] {
        &self.generators
    }

    pub(crate) fn structure(&self) -> Result<Arc<Structure>, MonoidError> {
        self.structure
            .get_or_init(|| build_structure(self.rank, &self.generators).map(Arc::new))
            .clone()
    }

    /// Hermite basis of `M^gp` as the rows of a matrix.
    pub fn gp_completion(&self) -> IntMatrix {
        IntMatrix::from_rows(self.gp_basis(), self.rank)
    }

    pub(crate) fn gp_basis(&self) -> &[Vec<Int>] {
        self.basis
            .get_or_init(|| hermite_rows(&self.generators, self.rank))
    }

    pub fn gp_rank(&self) -> usize {
        self.gp_basis().len()
    }

    /// Coordinates of `x` along the basis of [`gp_completion`](Self::gp_completion).
    pub fn gp_coords(&self, x: &[Int]) -> Option<Vec<Int>> {
        solve_in_row_lattice(self.gp_basis(), x)
    }

    pub fn from_gp_coords(&self, c: &[Int]) -> Vec<Int> {
        from_coords(self.gp_basis(), c, self.rank)
    }

    fn check_len(&self, x: &[Int]) -> Result<(), MonoidError> {
        if x.len() != self.rank {
            return Err(MonoidError::VectorLength {
                expected: self.rank,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Whether `x` is a nonnegative integer combination of the generators.
    ///
    /// Points outside `M^gp` or outside the cone are refuted at once. The
    /// rest is an exhaustive search bounded by a height function that is
    /// positive on the cone minus its lineality space, so the answer is exact
    /// unless the search exceeds [`MEMBERSHIP_BUDGET`] nodes.
    pub fn contains(&self, x: &[Int]) -> Result<MorphismVerdict, MonoidError> {
        self.check_len(x)?;
        if x.iter().all(|v| v.is_zero()) {
            return Ok(MorphismVerdict::Verified);
        }
        let st = self.structure()?;
        let Some(t) = solve_in_row_lattice(&st.basis, x) else {
            return Ok(MorphismVerdict::refuted(
                "not in the group generated by the monoid",
                vec![x.to_vec()],
            ));
        };
        if !st.cone.contains(&t) {
            return Ok(MorphismVerdict::refuted(
                "outside the cone of the monoid",
                vec![x.to_vec()],
            ));
        }
        Ok(match search_membership(&st, &t, MEMBERSHIP_BUDGET) {
            Some(true) => MorphismVerdict::Verified,
            Some(false) => MorphismVerdict::refuted(
                "in the cone and the group but not a combination of generators",
                vec![x.to_vec()],
            ),
            None => MorphismVerdict::Inconclusive {
                bound: MEMBERSHIP_BUDGET as u64,
            },
        })
    }

    /// `contains`, collapsed to a boolean; `None` when undecided.
    pub fn contains_bool(&self, x: &[Int]) -> Result<Option<bool>, MonoidError> {
        Ok(match self.contains(x)? {
            MorphismVerdict::Verified => Some(true),
            MorphismVerdict::Refuted { .. } => Some(false),
            MorphismVerdict::Inconclusive { .. } => None,
        })
    }

    /// Whether `M = cone(M) ∩ M^gp`. A refutation carries `a` and `n·a` with
    /// `a` in `M^gp \ M` and `n·a` in `M`.
    pub fn is_saturated(&self) -> MorphismVerdict {
        let missing = match self.hilbert_missing() {
            Ok(m) => m,
            Err(_) => {
                return MorphismVerdict::Inconclusive {
                    bound: MAX_GP_RANK as u64,
                }
            }
        };
        match missing {
            Missing::None => MorphismVerdict::Verified,
            Missing::Undecided => MorphismVerdict::Inconclusive {
                bound: MEMBERSHIP_BUDGET as u64,
            },
            Missing::Element(a, n) => {
                let na: Vec<Int> = a.iter().map(|x| x * &n).collect();
                MorphismVerdict::refuted(
                    format!("a is in the group completion, {n}·a is in the monoid, a is not"),
                    vec![a, na],
                )
            }
        }
    }

    fn hilbert_missing(&self) -> Result<Missing, MonoidError> {
        let sat = self.saturate()?;
        for g in sat.generators() {
            match self.contains(g)? {
                MorphismVerdict::Verified => {}
                MorphismVerdict::Inconclusive { .. } => return Ok(Missing::Undecided),
                MorphismVerdict::Refuted { .. } => {
                    for n in 2..=MAX_SATURATION_MULTIPLE {
                        let na: Vec<Int> = g.iter().map(|x| x * n).collect();
                        if self.contains(&na)?.is_verified() {
                            return Ok(Missing::Element(g.clone(), Int::from(n)));
                        }
                    }
                    return Ok(Missing::Undecided);
                }
            }
        }
        Ok(Missing::None)
    }

    /// The saturation `cone(M) ∩ M^gp`, generated by its Hilbert basis together
    /// with a basis of its unit group and the negatives of that basis.
    pub fn saturate(&self) -> Result<AffineMonoid, MonoidError> {
        let basis = self.gp_basis().to_vec();
        self.saturate_in(&basis)
    }

    /// Saturation with respect to all integer points of the linear span of
    /// `M`, rather than `M^gp`.
    pub fn saturate_in_ambient(&self) -> Result<AffineMonoid, MonoidError> {
        let basis = span_lattice(&self.generators, self.rank);
        self.saturate_in(&basis)
    }

    fn saturate_in(&self, basis: &[Vec<Int>]) -> Result<AffineMonoid, MonoidError> {
        if basis.is_empty() {
            return Ok(self.clone());
        }
        let k = basis.len();
        if k > MAX_GP_RANK {
            return Err(MonoidError::Capability {
                operation: "saturation",
                rank: k,
                max: MAX_GP_RANK,
            });
        }
        let coords: Vec<Vec<Int>> = self
            .generators
            .iter()
            .map(|g| solve_in_row_lattice(basis, g).expect("generator lies in the lattice"))
            .collect();
        let sat = hilbert::saturated_generators(&coords, k)?;
        let gens = sat
            .iter()
            .map(|c| from_coords(basis, c, self.rank))
            .collect();
        AffineMonoid::new(self.rank, gens)
    }

    /// Whether the monoid has no units other than 0.
    pub fn is_sharp(&self) -> Result<bool, MonoidError> {
        Ok(self.structure()?.units.is_empty())
    }
}

const MAX_SATURATION_MULTIPLE: i64 = 64;

enum Missing {
    None,
    Undecided,
    Element(Vec<Int>, Int),
}

impl fmt::Display for AffineMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| fmt_vec(g)).collect();
        write!(f, "<{}> in Z^{}", parts.join(", "), self.rank)
    }
}

impl Serialize for AffineMonoid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AffineMonoid", 2)?;
        st.serialize_field("ambient_rank", &self.rank)?;
        let g: Vec<_> = self
            .generators
            .iter()
            .map(|v| crate::json::json_ints(v))
            .collect();
        st.serialize_field("generators", &g)?;
        st.end()
    }
}

pub(crate) fn from_coords(basis: &[Vec<Int>], c: &[Int], dim: usize) -> Vec<Int> {
    let mut x = vec![Int::zero(); dim];
    for (ci, b) in c.iter().zip(basis) {
        for (xj, bj) in x.iter_mut().zip(b) {
            *xj += ci * bj;
        }
    }
    x
}

/// Hermite basis of `Z^d ∩ span(vectors)`.
pub(crate) fn span_lattice(vectors: &[Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
    if vectors.is_empty() {
        return vec![];
    }
    let normals = integer_kernel(&IntMatrix::from_rows(vectors, dim));
    if normals.is_empty() {
        return (0..dim)
            .map(|i| (0..dim).map(|j| Int::from((i == j) as i64)).collect())
            .collect();
    }
    integer_kernel(&IntMatrix::from_rows(&normals, dim))
}

fn build_structure(rank: usize, generators: &[Vec<Int>]) -> Result<Structure, MonoidError> {
    let basis = hermite_rows(generators, rank);
    let k = basis.len();
    if k > MAX_GP_RANK {
        return Err(MonoidError::Capability {
            operation: "exact membership",
            rank: k,
            max: MAX_GP_RANK,
        });
    }
    let gens: Vec<Vec<Int>> = generators
        .iter()
        .map(|g| solve_in_row_lattice(&basis, g).expect("generator lies in its own group"))
        .collect();
    let cone = Cone::from_generators(&gens, k)?;
    let positive = cone.positive_functional();
    let (pos_gens, unit_gens): (Vec<_>, Vec<_>) = gens
        .iter()
        .cloned()
        .partition(|g| dot(&positive, g).is_positive());
    let units = hermite_rows(&unit_gens, k);
    let mut pos_gens = pos_gens;
    // large steps first: the search then finds representations sooner
    pos_gens.sort_by_key(|g| std::cmp::Reverse(dot(&positive, g)));
    Ok(Structure {
        basis,
        cone,
        positive,
        pos_gens,
        units,
    })
}

/// Depth-first search for `t = Σ k_i g_i + (unit)`, `k_i >= 0`, over the
/// generators of positive height. `None` when the node budget runs out.
pub(crate) fn search_membership(st: &Structure, t: &[Int], budget: usize) -> Option<bool> {
    let mut ctx = Search {
        st,
        budget,
        nodes: 0,
        failed: HashSet::new(),
    };
    ctx.dfs(0, t.to_vec())
}

struct Search<'a> {
    st: &'a Structure,
    budget: usize,
    nodes: usize,
    failed: HashSet<(usize, Vec<Int>)>,
}

impl Search<'_> {
    fn in_units(&self, r: &[Int]) -> bool {
        if self.st.units.is_empty() {
            return r.iter().all(|x| x.is_zero());
        }
        solve_in_row_lattice(&self.st.units, r).is_some()
    }

    fn dfs(&mut self, i: usize, r: Vec<Int>) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if !self.st.cone.contains(&r) {
            return Some(false);
        }
        let hr = dot(&self.st.positive, &r);
        if hr.is_zero() || i == self.st.pos_gens.len() {
            return Some(hr.is_zero() && self.in_units(&r));
        }
        let key = (i, r);
        if self.failed.contains(&key) {
            return Some(false);
        }
        let (i, r) = key;
        let g = &self.st.pos_gens[i];
        let hg = dot(&self.st.positive, g);
        let max_k = hr.div_floor(&hg);
        let mut k = Int::zero();
        let mut cur = r.clone();
        while k <= max_k {
            if self.dfs(i + 1, cur.clone())? {
                return Some(true);
            }
            for (c, gj) in cur.iter_mut().zip(g) {
                *c -= gj;
            }
            k += 1;
        }
        self.failed.insert((i, r));
        Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Int> {
        xs.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn gp_examples() {
        let m = AffineMonoid::from_i64(1, &[&[2], &[3]]).unwrap();
        assert_eq!(m.gp_completion().row_vecs(), vec![v(&[1])]);
        let m = AffineMonoid::free(2);
        assert_eq!(m.gp_completion(), IntMatrix::identity(2));
        let m = AffineMonoid::from_i64(2, &[&[2, 0], &[0, 2]]).unwrap();
        assert_eq!(m.gp_completion().row_vecs(), vec![v(&[2, 0]), v(&[0, 2])]);
    }

    #[test]
    fn numerical_semigroup_membership() {
        let m = AffineMonoid::from_i64(1, &[&[2], &[3]]).unwrap();
        assert!(m.contains(&v(&[7])).unwrap().is_verified());
        assert!(m.contains(&v(&[1])).unwrap().is_refuted());
        assert!(m.contains(&v(&[-2])).unwrap().is_refuted());
        assert!(AffineMonoid::free(2).contains(&v(&[0, 0])).unwrap().is_verified());
    }

    #[test]
    fn membership_with_units() {
        // Z × N
        let m = AffineMonoid::from_i64(2, &[&[1, 0], &[-1, 0], &[0, 1]]).unwrap();
        assert!(m.contains(&v(&[-5, 3])).unwrap().is_verified());
        assert!(!m.is_sharp().unwrap());
        // 2Z × N: (1, 0) is in the group but not the monoid
        let m = AffineMonoid::from_i64(2, &[&[2, 0], &[-2, 0], &[1, 1]]).unwrap();
        assert!(m.contains(&v(&[1, 1])).unwrap().is_verified());
        assert!(m.contains(&v(&[-1, 1])).unwrap().is_verified());
        assert!(m.contains(&v(&[1, 0])).unwrap().is_refuted());
    }

    #[test]
    fn saturation_examples() {
        assert!(AffineMonoid::free(3).is_saturated().is_verified());
        let m = AffineMonoid::from_i64(1, &[&[2], &[3]]).unwrap();
        let verdict = m.is_saturated();
        assert_eq!(verdict.witness().unwrap().vectors, vec![v(&[1]), v(&[2])]);
        assert_eq!(m.saturate().unwrap().generators(), &[v(&[1])]);
        assert_eq!(AffineMonoid::free(2).saturate().unwrap(), AffineMonoid::free(2));
    }

    #[test]
    fn saturation_is_relative_to_the_group_completion() {
        // (1, 1) is not in the group generated by (1, 0) and (1, 2)
        let m = AffineMonoid::from_i64(2, &[&[1, 0], &[1, 2]]).unwrap();
        assert!(m.is_saturated().is_verified());
        assert_eq!(m.saturate().unwrap(), m);
        let amb = m.saturate_in_ambient().unwrap();
        assert_eq!(amb.generators(), &[v(&[1, 2]), v(&[1, 1]), v(&[1, 0])]);
    }

    #[test]
    fn saturation_with_lineality() {
        let m = AffineMonoid::from_i64(2, &[&[2, 0], &[-2, 0], &[1, 2]]).unwrap();
        let s = m.saturate().unwrap();
        assert!(s.is_saturated().is_verified());
        assert_eq!(s.saturate().unwrap(), s);
        assert!(s.contains(&v(&[-1, 2])).unwrap().is_verified());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(AffineMonoid::new(2, vec![]), Err(MonoidError::NoGenerators));
        assert!(AffineMonoid::new(2, vec![v(&[1])]).is_err());
        let m = AffineMonoid::free(2);
        assert!(m.contains(&v(&[1])).is_err());
        let big = AffineMonoid::free(5);
        assert!(matches!(
            big.contains(&v(&[1, 0, 0, 0, 0])),
            Err(MonoidError::Capability { .. })
        ));
    }
}
