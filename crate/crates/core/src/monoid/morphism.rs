use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::cone::Cone;
use super::{fmt_vec, AffineMonoid, MorphismVerdict};
use crate::error::MonoidError;
use crate::lattice::{cokernel, dot, smith_normal_form, solve_in_row_lattice, Cokernel};
use crate::{Int, IntMatrix};

/// A monoid morphism given by an integer matrix on the ambient lattices
/// (`target rank × source rank`, acting on column vectors).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidMorphism {
    source: AffineMonoid,
    target: AffineMonoid,
    matrix: IntMatrix,
}

impl MonoidMorphism {
    /// Checks the shape and that every source generator lands in the target.
    pub fn new(
        source: AffineMonoid,
        target: AffineMonoid,
        matrix: IntMatrix,
    ) -> Result<Self, MonoidError> {
        let (er, ec) = (target.ambient_rank(), source.ambient_rank());
        if matrix.shape() != (er, ec) {
            return Err(MonoidError::MatrixShape {
                rows: matrix.rows(),
                cols: matrix.cols(),
                expected_rows: er,
                expected_cols: ec,
            });
        }
        for (index, g) in source.generators().iter().enumerate() {
            match target.contains(&matrix.mul_vec(g))? {
                MorphismVerdict::Verified => {}
                MorphismVerdict::Refuted { .. } => return Err(MonoidError::NotAMorphism { index }),
                MorphismVerdict::Inconclusive { .. } => {
                    return Err(MonoidError::UndecidedMorphism { index })
                }
            }
        }
        Ok(MonoidMorphism {
            source,
            target,
            matrix,
        })
    }

    /// Multiplication by `n` on `N^r`.
    pub fn multiplication(r: usize, n: i64) -> Self {
        let p = AffineMonoid::free(r);
        Self::new(p.clone(), p, IntMatrix::scalar(r, Int::from(n))).unwrap()
    }

    pub fn identity(m: &AffineMonoid) -> Self {
        Self::new(m.clone(), m.clone(), IntMatrix::identity(m.ambient_rank())).unwrap()
    }

    pub fn source(&self) -> &AffineMonoid {
        &self.source
    }

    pub fn target(&self) -> &AffineMonoid {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        self.matrix.mul_vec(x)
    }

    /// `u^gp` in coordinates along the Hermite bases of `P^gp` and `Q^gp`.
    pub fn gp_matrix(&self) -> IntMatrix {
        let pb = self.source.gp_basis();
        let qb = self.target.gp_basis();
        let cols: Vec<Vec<Int>> = pb
            .iter()
            .map(|b| {
                solve_in_row_lattice(qb, &self.matrix.mul_vec(b))
                    .expect("a morphism maps P^gp into Q^gp")
            })
            .collect();
        if cols.is_empty() {
            return IntMatrix::zeros(qb.len(), 0);
        }
        IntMatrix::from_cols(&cols, qb.len())
    }

    /// `coker(u^gp)`.
    pub fn cokernel(&self) -> Cokernel<Int> {
        cokernel(&self.gp_matrix())
    }

    pub fn is_injective_on_groups(&self) -> bool {
        let a = self.gp_matrix();
        a.rank() == a.cols()
    }
}

impl fmt::Display for MonoidMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} by {}", self.source, self.target, self.matrix)
    }
}

impl Serialize for MonoidMorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("MonoidMorphism", 3)?;
        st.serialize_field("source", &self.source)?;
        st.serialize_field("target", &self.target)?;
        let m: Vec<_> = self
            .matrix
            .row_vecs()
            .iter()
            .map(|r| crate::json::json_ints(r))
            .collect();
        st.serialize_field("matrix", &m)?;
        st.end()
    }
}

/// `u ∘ w`.
pub fn compose(u: &MonoidMorphism, w: &MonoidMorphism) -> Result<MonoidMorphism, MonoidError> {
    if w.target != u.source {
        return Err(MonoidError::NotComposable);
    }
    Ok(MonoidMorphism {
        source: w.source.clone(),
        target: u.target.clone(),
        matrix: &u.matrix * &w.matrix,
    })
}

/// Whether `P = (u^gp)^{-1}(Q)`, assuming both monoids are saturated.
///
/// For saturated monoids this is the inclusion of rational cones
/// `{c : F_Q·A·c >= 0} ⊆ cone(P)`, i.e. every facet normal of `P` lies in
/// the cone spanned by the pulled-back facet normals of `Q`. A failure
/// produces a dual generator `w` with `u(w) ∈ Q` and `w ∉ P`, which is then
/// re-checked by direct membership.
pub fn is_exact(u: &MonoidMorphism) -> Result<MorphismVerdict, MonoidError> {
    let sp = u.source.structure()?;
    let sq = u.target.structure()?;
    let a = u.gp_matrix();
    let kp = a.cols();
    let pulled: Vec<Vec<Int>> = sq
        .cone
        .facets()
        .iter()
        .map(|f| (0..kp).map(|j| dot(f, &a.col(j))).collect())
        .collect();
    let dual = Cone::from_generators(&pulled, kp)?;
    let preimage_gens = dual.dual_generators();
    for h in sp.cone.facets() {
        if dual.contains(h) {
            continue;
        }
        let y = preimage_gens
            .iter()
            .find(|y| dot(h, y).is_negative())
            .expect("a functional outside a cone is negative on a dual generator");
        let w = u.source.from_gp_coords(y);
        let in_q = u.target.contains(&u.apply(&w))?;
        let in_p = u.source.contains(&w)?;
        return Ok(if in_q.is_verified() && in_p.is_refuted() {
            MorphismVerdict::refuted("u(w) lies in Q but w does not lie in P", vec![w])
        } else {
            MorphismVerdict::Inconclusive {
                bound: super::MEMBERSHIP_BUDGET as u64,
            }
        });
    }
    Ok(MorphismVerdict::Verified)
}

/// The three ingredients of the exact-plus-finite-cokernel criterion.
#[derive(Clone, Debug, Serialize)]
pub struct KummerReport {
    pub injective_on_groups: bool,
    pub cokernel_torsion: crate::FiniteAbelianGroup,
    pub cokernel_free_rank: usize,
    pub exact: MorphismVerdict,
    pub verdict: MorphismVerdict,
}

impl KummerReport {
    /// The first sub-criterion that fails, if any.
    pub fn failed_criterion(&self) -> Option<String> {
        if !self.injective_on_groups {
            return Some("u^gp is not injective".into());
        }
        if self.cokernel_free_rank > 0 {
            return Some(format!(
                "coker(u^gp) is infinite (free rank {})",
                self.cokernel_free_rank
            ));
        }
        match &self.exact {
            MorphismVerdict::Verified => None,
            MorphismVerdict::Refuted { witness } => Some(format!("u is not exact: {witness}")),
            MorphismVerdict::Inconclusive { bound } => {
                Some(format!("exactness undecided (bound {bound})"))
            }
        }
    }
}

pub fn kummer_report(u: &MonoidMorphism) -> Result<KummerReport, MonoidError> {
    let a = u.gp_matrix();
    let injective = a.rank() == a.cols();
    let coker = cokernel(&a);
    let exact = is_exact(u)?;
    let verdict = if !injective {
        let ker = crate::lattice::integer_kernel(&a);
        let w = u.source.from_gp_coords(&ker[0]);
        MorphismVerdict::refuted("u^gp is not injective; kernel vector", vec![w])
    } else if coker.free_rank > 0 {
        let g = u
            .target
            .generators()
            .iter()
            .find(|g| {
                let c = u.target.gp_coords(g).unwrap();
                let mut cols = a.col_vecs();
                cols.push(c);
                IntMatrix::from_cols(&cols, a.rows()).rank() > a.rank()
            })
            .expect("the generators span Q^gp")
            .clone();
        MorphismVerdict::refuted(
            format!(
                "coker(u^gp) has free rank {}; no multiple of this generator comes from P",
                coker.free_rank
            ),
            vec![g],
        )
    } else {
        exact.clone()
    };
    Ok(KummerReport {
        injective_on_groups: injective,
        cokernel_torsion: coker.torsion,
        cokernel_free_rank: coker.free_rank,
        exact,
        verdict,
    })
}

/// Kummer test through the criterion: `u^gp` injective, `u` exact and
/// `coker(u^gp)` finite. Source and target are assumed saturated.
pub fn is_kummer(u: &MonoidMorphism) -> Result<MorphismVerdict, MonoidError> {
    Ok(kummer_report(u)?.verdict)
}

/// Kummer test straight from the definition: `u` injective, and every
/// generator `a` of `Q` has a multiple `n·a` in `u(P)`.
///
/// The least `n` with `n·a ∈ u(P^gp)` comes from solving `A·c = a` over `Q`;
/// some multiple of `n·a` then lies in `u(P)` exactly when `c` lies in the
/// cone of `P`.
pub fn is_kummer_by_definition(u: &MonoidMorphism) -> Result<MorphismVerdict, MonoidError> {
    let sp = u.source.structure()?;
    let a = u.gp_matrix();
    let kp = a.cols();
    let snf = smith_normal_form(&a);
    let d = snf.diagonal();
    let r = snf.rank();
    if r < kp {
        let w = u.source.from_gp_coords(&snf.v.col(r));
        return Ok(MorphismVerdict::refuted(
            "u^gp is not injective; kernel vector",
            vec![w],
        ));
    }
    for g in u.target.generators() {
        let y = snf.u.mul_vec(&u.target.gp_coords(g).unwrap());
        if y[r..].iter().any(|x| !x.is_zero()) {
            return Ok(MorphismVerdict::refuted(
                "no multiple of this generator of Q lies in u(P^gp)",
                vec![g.clone()],
            ));
        }
        let n = (0..r).fold(Int::one(), |acc, i| {
            let den = &d[i] / y[i].gcd(&d[i]);
            acc.lcm(&den)
        });
        let z: Vec<Int> = (0..r).map(|i| &y[i] * &n / &d[i]).collect();
        let c = snf.v.mul_vec(&z);
        if !sp.cone.contains(&c) {
            return Ok(MorphismVerdict::refuted(
                format!("{n}·a lies in u(P^gp) but no multiple of a lies in u(P)"),
                vec![g.clone()],
            ));
        }
    }
    Ok(MorphismVerdict::Verified)
}

/// A map `v: Q^gp -> Z^r` with `v ∘ u = n`, exact on `Q -> N^r`.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralityCertificate {
    #[serde(serialize_with = "crate::json::ser_int")]
    pub n: Int,
    /// Rows indexed by the generators of `P`, columns by the Hermite basis of `Q^gp`.
    #[serde(serialize_with = "crate::json::ser_matrix")]
    pub v: IntMatrix,
    pub v_exact: MorphismVerdict,
}

/// Builds the certificate for a Kummer morphism out of a free monoid: `n` is
/// the exponent of `coker(u^gp)` and `v = n·A^{-1}`, where `A` is `u^gp` in
/// the coordinates given by the generators of `P` and the Hermite basis of `Q^gp`.
pub fn integrality_certificate_free_base(
    u: &MonoidMorphism,
) -> Result<IntegralityCertificate, MonoidError> {
    let pgens = u.source.generators();
    let k = pgens.len();
    if k != u.source.gp_rank() {
        return Err(MonoidError::CertificatePrecondition(
            "a free source monoid".into(),
        ));
    }
    if !is_kummer(u)?.is_verified() {
        return Err(MonoidError::CertificatePrecondition(
            "a Kummer morphism".into(),
        ));
    }
    let kq = u.target.gp_rank();
    let cols: Vec<Vec<Int>> = pgens
        .iter()
        .map(|g| u.target.gp_coords(&u.apply(g)).unwrap())
        .collect();
    let a = IntMatrix::from_cols(&cols, kq);
    let n = cokernel(&a).torsion.exponent();
    let det = a.determinant();
    let scaled = a.adjugate().scaled(&n);
    let mut v = IntMatrix::zeros(k, kq);
    for i in 0..k {
        for j in 0..kq {
            let (q, rem) = scaled[(i, j)].div_rem(&det);
            if !rem.is_zero() {
                return Err(MonoidError::CertificatePrecondition(
                    "n·A^{-1} to be integral (internal error)".into(),
                ));
            }
            v[(i, j)] = q;
        }
    }
    debug_assert_eq!(&v * &a, IntMatrix::scalar(k, n.clone()));
    let q_coords = AffineMonoid::new(
        kq,
        u.target
            .generators()
            .iter()
            .map(|g| u.target.gp_coords(g).unwrap())
            .collect(),
    )?;
    let vm = MonoidMorphism::new(q_coords, AffineMonoid::free(k), v.clone())?;
    let v_exact = is_exact(&vm)?;
    if !v_exact.is_verified() {
        return Err(MonoidError::CertificatePrecondition(format!(
            "v to be exact (internal error: {v_exact})"
        )));
    }
    Ok(IntegralityCertificate { n, v, v_exact })
}

/// Searches for a violation of integrality among `a_1, a_2 ∈ P`,
/// `b_1, b_2 ∈ Q` that are sums of at most `bound` generators.
///
/// A quadruple with `u(a_1) + b_1 = u(a_2) + b_2` is a violation when no
/// `a_3 ∈ P` has `b_1 - u(a_3) ∈ Q` and `a_1 + a_3 - a_2 ∈ P`. The search over
/// `a_3` is only exhaustive when `Q` is sharp and `u` sends every generator of
/// `P` to a nonzero element; otherwise quadruples without a found `a_3` are
/// skipped. Never returns `Verified`.
pub fn check_integral_bounded(
    u: &MonoidMorphism,
    bound: usize,
) -> Result<MorphismVerdict, MonoidError> {
    let sq = u.target.structure()?;
    let h = |x: &[Int]| -> Int {
        let c = u.target.gp_coords(x).expect("element of Q^gp");
        dot(&sq.positive, &c)
    };
    let pgens = u.source.generators();
    let images: Vec<Vec<Int>> = pgens.iter().map(|g| u.apply(g)).collect();
    let heights: Vec<Int> = images.iter().map(|x| h(x)).collect();
    let exhaustive = sq.units.is_empty() && heights.iter().all(|x| x.is_positive());

    let elems_p = small_sums(pgens, u.source.ambient_rank(), bound);
    let elems_q = small_sums(u.target.generators(), u.target.ambient_rank(), bound);
    for a1 in &elems_p {
        for a2 in &elems_p {
            if a1 == a2 {
                continue;
            }
            let ua1 = u.apply(a1);
            let ua2 = u.apply(a2);
            for b1 in &elems_q {
                let b2: Vec<Int> = ua1
                    .iter()
                    .zip(b1)
                    .zip(&ua2)
                    .map(|((x, y), z)| x + y - z)
                    .collect();
                if u.target.contains_bool(&b2)? != Some(true) {
                    continue;
                }
                let budget = h(b1);
                match find_a3(u, a1, a2, b1, pgens, &heights, &budget)? {
                    Some(true) => {}
                    Some(false) if exhaustive => {
                        return Ok(MorphismVerdict::refuted(
                            "u(a1) + b1 = u(a2) + b2 admits no factorization (a1, a2, b1, b2)",
                            vec![a1.clone(), a2.clone(), b1.clone(), b2],
                        ));
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(MorphismVerdict::Inconclusive {
        bound: bound as u64,
    })
}

/// All sums of at most `bound` generators.
fn small_sums(gens: &[Vec<Int>], dim: usize, bound: usize) -> Vec<Vec<Int>> {
    let mut layer: BTreeSet<Vec<Int>> = BTreeSet::new();
    layer.insert(vec![Int::zero(); dim]);
    let mut all = layer.clone();
    for _ in 0..bound {
        let mut next = BTreeSet::new();
        for x in &layer {
            for g in gens {
                let y: Vec<Int> = x.iter().zip(g).map(|(a, b)| a + b).collect();
                if all.insert(y.clone()) {
                    next.insert(y);
                }
            }
        }
        layer = next;
    }
    all.into_iter().collect()
}

/// Looks for `a_3 ∈ P` with `h(u(a_3)) <= budget`, `b_1 - u(a_3) ∈ Q` and
/// `a_1 + a_3 - a_2 ∈ P`. `None` if some membership test was undecided.
fn find_a3(
    u: &MonoidMorphism,
    a1: &[Int],
    a2: &[Int],
    b1: &[Int],
    pgens: &[Vec<Int>],
    heights: &[Int],
    budget: &Int,
) -> Result<Option<bool>, MonoidError> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![(vec![Int::zero(); a1.len()], Int::zero())];
    let mut undecided = false;
    while let Some((a3, used)) = stack.pop() {
        if !seen.insert(a3.clone()) {
            continue;
        }
        let ua3 = u.apply(&a3);
        let b: Vec<Int> = b1.iter().zip(&ua3).map(|(x, y)| x - y).collect();
        let a4: Vec<Int> = a1
            .iter()
            .zip(&a3)
            .zip(a2)
            .map(|((x, y), z)| x + y - z)
            .collect();
        match (u.target.contains_bool(&b)?, u.source.contains_bool(&a4)?) {
            (Some(true), Some(true)) => return Ok(Some(true)),
            (None, _) | (_, None) => undecided = true,
            _ => {}
        }
        for (g, hg) in pgens.iter().zip(heights) {
            if !hg.is_positive() {
                continue;
            }
            let next_used = &used + hg;
            if &next_used <= budget {
                let next: Vec<Int> = a3.iter().zip(g).map(|(x, y)| x + y).collect();
                stack.push((next, next_used));
            }
        }
    }
    Ok(if undecided { None } else { Some(false) })
}

impl fmt::Display for IntegralityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.v.row_vecs().iter().map(|r| fmt_vec(r)).collect();
        write!(f, "n = {}, v = [{}]", self.n, rows.join(", "))
    }
}
