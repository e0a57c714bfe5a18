use super::{ext_gcd, AbelianGroup, IntScalar, Matrix};

/// Result of a Smith normal form computation: `u · a · v = d`.
///
/// `u` and `v` are unimodular, `d` is diagonal with non-negative entries
/// `d_0 | d_1 | ...`, and any zero entries come last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm<T> {
    pub u: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: IntScalar> SmithForm<T> {
    /// The `min(rows, cols)` diagonal entries.
    pub fn diagonal(&self) -> Vec<T> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

/// Smith normal form by gcd row/column reduction.
///
/// The pivot at each stage is an entry of least absolute value in the
/// remaining block. No modular arithmetic is involved.
pub fn smith_normal_form<T: IntScalar>(a: &Matrix<T>) -> SmithForm<T> {
    let (m, n) = a.shape();
    let mut d = a.clone();
    let mut u = Matrix::identity(m);
    let mut v = Matrix::identity(n);

    'stages: for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = min_abs_entry(&d, t) else {
                break 'stages;
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }

            // divisibility: fold an offending row into the pivot row and retry
            let pivot = d[(t, t)].clone();
            let offending = (t + 1..m)
                .find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match offending {
                Some(i) => {
                    let one = T::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { u, d, v }
}

fn min_abs_entry<T: IntScalar>(a: &Matrix<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, T)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a[(i, j)].abs();
            if x.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, _, b)| x < *b) {
                best = Some((i, j, x));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// `Z^rows / im(a)` split as torsion part plus free rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel<T> {
    pub torsion: AbelianGroup<T>,
    pub free_rank: usize,
    /// Row transform from the SNF; `u · x` gives coordinates in the diagonal basis.
    u: Matrix<T>,
    diag: Vec<T>,
}

impl<T: IntScalar> Cokernel<T> {
    /// Image of a vector of `Z^rows` in the torsion part (free coordinates dropped).
    pub fn project_torsion(&self, x: &[T]) -> Vec<T> {
        let y = self.u.mul_vec(x);
        self.diag
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero() && !d.is_one())
            .map(|(i, d)| y[i].mod_floor(d))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }
}

/// Cokernel of the lattice map `Z^cols -> Z^rows` given by `a`.
pub fn cokernel<T: IntScalar>(a: &Matrix<T>) -> Cokernel<T> {
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let rank = snf.rank();
    let factors: Vec<T> = diag[..rank]
        .iter()
        .filter(|d| !d.is_one())
        .cloned()
        .collect();
    Cokernel {
        torsion: AbelianGroup::from_invariant_factors(factors)
            .expect("SNF diagonal is a divisibility chain"),
        free_rank: a.rows() - rank,
        u: snf.u,
        diag,
    }
}

/// Basis (rows, Hermite normal form) of `{x in Z^cols : a·x = 0}`.
pub fn integer_kernel<T: IntScalar>(a: &Matrix<T>) -> Vec<Vec<T>> {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let basis: Vec<Vec<T>> = (r..a.cols()).map(|j| snf.v.col(j)).collect();
    hermite_rows(&basis, a.cols())
}

/// Row-style Hermite normal form of the lattice spanned by `vectors` in `Z^dim`.
///
/// Output rows are in echelon form with positive pivots, entries above each
/// pivot reduced into `[0, pivot)`, zero rows removed. The result depends only
/// on the lattice, so it doubles as a canonical form for lattice equality.
pub fn hermite_rows<T: IntScalar>(vectors: &[Vec<T>], dim: usize) -> Vec<Vec<T>> {
    let mut a: Vec<Vec<T>> = vectors
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    for v in &a {
        assert_eq!(v.len(), dim, "vector length does not match lattice dimension");
    }
    let mut r = 0;
    for c in 0..dim {
        if r == a.len() {
            break;
        }
        for i in r + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            if a[r][c].is_zero() {
                a.swap(r, i);
                continue;
            }
            let (p, q) = (a[r][c].clone(), a[i][c].clone());
            let (g, x, y) = ext_gcd(&p, &q);
            let (pg, qg) = (p / g.clone(), q / g);
            let new_r: Vec<T> = a[r]
                .iter()
                .zip(&a[i])
                .map(|(s, t)| x.clone() * s.clone() + y.clone() * t.clone())
                .collect();
            let new_i: Vec<T> = a[r]
                .iter()
                .zip(&a[i])
                .map(|(s, t)| pg.clone() * t.clone() - qg.clone() * s.clone())
                .collect();
            a[r] = new_r;
            a[i] = new_i;
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
        }
        let piv = a[r][c].clone();
        for i in 0..r {
            let q = a[i][c].div_floor(&piv);
            if q.is_zero() {
                continue;
            }
            let row = a[r].clone();
            for (x, y) in a[i].iter_mut().zip(row) {
                *x = x.clone() - q.clone() * y;
            }
        }
        r += 1;
    }
    a.truncate(r);
    a.retain(|v| v.iter().any(|x| !x.is_zero()));
    a
}

/// Integer coordinates of `x` in a basis produced by [`hermite_rows`], if `x`
/// lies in that lattice.
pub fn solve_in_row_lattice<T: IntScalar>(hnf: &[Vec<T>], x: &[T]) -> Option<Vec<T>> {
    let mut rest = x.to_vec();
    let mut coords = Vec::with_capacity(hnf.len());
    for b in hnf {
        let p = b.iter().position(|e| !e.is_zero())?;
        // entries left of the pivot must already be cleared
        if rest[..p].iter().any(|e| !e.is_zero()) {
            return None;
        }
        let (q, r) = rest[p].div_mod_floor(&b[p]);
        if !r.is_zero() {
            return None;
        }
        for (e, bv) in rest.iter_mut().zip(b) {
            *e = e.clone() - q.clone() * bv.clone();
        }
        coords.push(q);
    }
    rest.iter().all(|e| e.is_zero()).then_some(coords)
}
