//! Predictions from a monodromy pairing `Φ × Φ' -> Q/Z` between component
//! groups, supplied as data.
//!
//! The pairing is given on the standard generators of both groups; pairing
//! values are convention dependent up to sign, which does not affect
//! orthogonality or orders.

use num_traits::Zero;
use serde::Serialize;

use crate::error::MonodromyError;
use crate::{FiniteAbelianGroup, GroupElement, Int, QmodZ};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonodromyData {
    phi: FiniteAbelianGroup,
    phi_prime: FiniteAbelianGroup,
    table: Vec<Vec<QmodZ>>,
}

impl MonodromyData {
    /// `table[i][j]` is the pairing of the `i`-th generator of `phi` with the
    /// `j`-th generator of `phi_prime`. Each value must be killed by both
    /// generator orders, otherwise the table does not extend bilinearly.
    pub fn new(
        phi: FiniteAbelianGroup,
        phi_prime: FiniteAbelianGroup,
        table: Vec<Vec<QmodZ>>,
    ) -> Result<Self, MonodromyError> {
        let (r, c) = (phi.rank(), phi_prime.rank());
        let cols = table.first().map_or(0, |row| row.len());
        if table.len() != r || table.iter().any(|row| row.len() != c) {
            return Err(MonodromyError::TableShape {
                rows: table.len(),
                cols,
                expected_rows: r,
                expected_cols: c,
            });
        }
        for (i, row) in table.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let left = &phi.invariant_factors()[i];
                let right = &phi_prime.invariant_factors()[j];
                if !v.scale(left).is_zero() || !v.scale(right).is_zero() {
                    return Err(MonodromyError::NotBilinear {
                        row: i,
                        col: j,
                        value: v.to_string(),
                        left: left.to_string(),
                        right: right.to_string(),
                    });
                }
            }
        }
        Ok(MonodromyData {
            phi,
            phi_prime,
            table,
        })
    }

    pub fn phi(&self) -> &FiniteAbelianGroup {
        &self.phi
    }

    pub fn phi_prime(&self) -> &FiniteAbelianGroup {
        &self.phi_prime
    }

    pub fn table(&self) -> &[Vec<QmodZ>] {
        &self.table
    }
}

/// Bilinear extension of the generator table.
pub fn pair(d: &MonodromyData, x: &GroupElement, y: &GroupElement) -> Result<QmodZ, MonodromyError> {
    if x.parent() != &d.phi {
        return Err(MonodromyError::WrongGroup(x.to_string()));
    }
    if y.parent() != &d.phi_prime {
        return Err(MonodromyError::WrongGroup(y.to_string()));
    }
    let mut acc = QmodZ::zero();
    for (xi, row) in x.coords().iter().zip(&d.table) {
        if xi.is_zero() {
            continue;
        }
        for (yj, v) in y.coords().iter().zip(row) {
            acc = acc.add(&v.scale(&(xi * yj)));
        }
    }
    Ok(acc)
}

/// Division by `y` along a subgroup `G`: the torsor is predicted fppf iff the
/// reduction of `y` in `Φ'` is orthogonal to the image of `G` in `Φ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisionProblem {
    pub data: MonodromyData,
    pub g_image: Vec<GroupElement>,
    pub y_image: GroupElement,
}

impl DivisionProblem {
    pub fn new(
        data: MonodromyData,
        g_image: Vec<GroupElement>,
        y_image: GroupElement,
    ) -> Result<Self, MonodromyError> {
        if let Some(g) = g_image.iter().find(|g| g.parent() != &data.phi) {
            return Err(MonodromyError::WrongGroup(g.to_string()));
        }
        if y_image.parent() != &data.phi_prime {
            return Err(MonodromyError::WrongGroup(y_image.to_string()));
        }
        Ok(DivisionProblem {
            data,
            g_image,
            y_image,
        })
    }
}

pub fn predict_fppf(p: &DivisionProblem) -> bool {
    p.g_image.iter().all(|g| {
        pair(&p.data, g, &p.y_image)
            .expect("parents checked")
            .is_zero()
    })
}

/// With `G` cyclic and `x` generating its image, the ramification index of
/// the division torsor is the order of `(x, y)` in `Q/Z`.
pub fn predict_ramification(
    d: &MonodromyData,
    x: &GroupElement,
    y: &GroupElement,
) -> Result<Int, MonodromyError> {
    Ok(pair(d, x, y)?.order())
}
