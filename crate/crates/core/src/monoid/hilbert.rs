//! Generators of `cone(G) ∩ Z^k` for a full-dimensional cone.
//!
//! The lineality lattice is split off with a unimodular change of basis. In
//! the pointed quotient every lattice point of the cone is a nonnegative
//! integer combination of the generators and of the lattice points in the
//! half-open parallelepipeds spanned by linearly independent generator
//! subsets; the irreducible ones among those candidates form the Hilbert basis.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::cone::Cone;
use crate::error::MonoidError;
use crate::lattice::{dot, floor_div, smith_normal_form};
use crate::{Int, IntMatrix};

const MAX_CANDIDATES: usize = 200_000;

pub(crate) fn unimodular_inverse(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    debug_assert!(snf.diagonal().iter().all(|d| d == &Int::from(1)));
    &snf.v * &snf.u
}

/// Generators of the saturated monoid `cone(gens) ∩ Z^k`, in a canonical
/// form: a lattice basis of the units with its negatives, followed by the
/// Hilbert basis of the pointed quotient lifted through a fixed complement.
pub(crate) fn saturated_generators(
    gens: &[Vec<Int>],
    k: usize,
) -> Result<Vec<Vec<Int>>, MonoidError> {
    let cone = Cone::from_generators(gens, k)?;
    let lin = cone.lineality_lattice();
    let l = lin.len();
    let (project, complement): (IntMatrix, IntMatrix) = if l == 0 {
        (IntMatrix::identity(k), IntMatrix::identity(k))
    } else {
        let v = smith_normal_form(&IntMatrix::from_rows(&lin, k)).v;
        let w = unimodular_inverse(&v);
        (v, w)
    };
    let quotient = |x: &[Int]| -> Vec<Int> {
        (l..k).map(|j| dot(x, &project.col(j))).collect()
    };
    let lift = |q: &[Int]| -> Vec<Int> {
        let mut x = vec![Int::zero(); k];
        for (j, qj) in q.iter().enumerate() {
            for (xi, wi) in x.iter_mut().zip(complement.row(l + j)) {
                *xi += qj * wi;
            }
        }
        x
    };

    let mut out: Vec<Vec<Int>> = Vec::new();
    for b in &lin {
        out.push(b.clone());
        out.push(b.iter().map(|x| -x).collect());
    }
    let kq = k - l;
    if kq == 0 {
        return Ok(out);
    }
    let qgens: Vec<Vec<Int>> = gens
        .iter()
        .map(|g| quotient(g))
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .collect();
    for h in pointed_hilbert_basis(&qgens, kq)? {
        out.push(lift(&h));
    }
    Ok(out)
}

/// Hilbert basis of `cone(gens) ∩ Z^k` for a pointed full-dimensional cone.
pub(crate) fn pointed_hilbert_basis(
    gens: &[Vec<Int>],
    k: usize,
) -> Result<Vec<Vec<Int>>, MonoidError> {
    let cone = Cone::from_generators(gens, k)?;
    let mut candidates: BTreeSet<Vec<Int>> = gens.iter().cloned().collect();
    for subset in independent_subsets(gens, k) {
        let b = IntMatrix::from_rows(&subset, k);
        parallelepiped_points(&b, &mut candidates)?;
    }
    candidates.retain(|x| x.iter().any(|v| !v.is_zero()));
    let cand: Vec<Vec<Int>> = candidates.into_iter().collect();
    let irreducible = cand
        .iter()
        .filter(|x| {
            !cand.iter().any(|g| {
                g != *x && {
                    let d: Vec<Int> = x.iter().zip(g).map(|(a, b)| a - b).collect();
                    cone.contains(&d)
                }
            })
        })
        .cloned()
        .collect();
    Ok(irreducible)
}

fn independent_subsets(gens: &[Vec<Int>], k: usize) -> Vec<Vec<Vec<Int>>> {
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        gens: &[Vec<Int>],
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<Int>>>,
    ) {
        if chosen.len() == k {
            let rows: Vec<Vec<Int>> = chosen.iter().map(|&i| gens[i].clone()).collect();
            if IntMatrix::from_rows(&rows, k).rank() == k {
                out.push(rows);
            }
            return;
        }
        for i in start..gens.len() {
            chosen.push(i);
            rec(gens, k, i + 1, chosen, out);
            chosen.pop();
        }
    }
    rec(gens, k, 0, &mut chosen, &mut out);
    out
}

/// Adds every lattice point `λ·B` with `λ ∈ [0, 1)^k` to `out`.
fn parallelepiped_points(
    b: &IntMatrix,
    out: &mut BTreeSet<Vec<Int>>,
) -> Result<(), MonoidError> {
    let k = b.rows();
    let det = b.determinant();
    let adj = b.adjugate();
    let snf = smith_normal_form(b);
    let d = snf.diagonal();
    let v_inv = unimodular_inverse(&snf.v);
    let count = d
        .iter()
        .try_fold(1usize, |acc, x| x.to_string().parse::<usize>().ok().and_then(|x| acc.checked_mul(x)));
    match count {
        Some(c) if out.len() + c <= MAX_CANDIDATES => {}
        _ => {
            return Err(MonoidError::SearchTooLarge {
                operation: "Hilbert basis enumeration",
                size: count.unwrap_or(usize::MAX),
            })
        }
    }
    let mut y = vec![Int::zero(); k];
    loop {
        // representative y·V^{-1} of a coset of the row lattice of B
        let x: Vec<Int> = (0..k).map(|j| dot(&y, &v_inv.col(j))).collect();
        let lambda_num: Vec<Int> = (0..k).map(|i| dot(&x, &adj.col(i))).collect();
        let mut p = x;
        for (i, num) in lambda_num.iter().enumerate() {
            let f = floor_div(num, &det);
            if f.is_zero() {
                continue;
            }
            for (pj, bj) in p.iter_mut().zip(b.row(i)) {
                *pj -= &f * bj;
            }
        }
        out.insert(p);
        // odometer over 0 <= y_i < d_i
        let mut i = 0;
        loop {
            if i == k {
                return Ok(());
            }
            y[i] += 1;
            if y[i] < d[i] {
                break;
            }
            y[i] = Int::zero();
            i += 1;
        }
    }
}
