//! Exact integer linear algebra.
//!
//! Everything here is generic over an exact integer scalar (`BigInt` in the
//! rest of the crate, fixed-width integers where a test wants a cross-check).
//! Nothing in this module ever rounds.

mod group;
mod matrix;
mod modone;
mod smith;

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

pub use group::{AbelianGroup, GroupElem, MultipleQuotient};
pub use matrix::Matrix;
pub use modone::ModOne;
pub use smith::{
    cokernel, hermite_rows, integer_kernel, smith_normal_form, solve_in_row_lattice, Cokernel,
    SmithForm,
};

/// An exact integer type the lattice algorithms can run over.
pub trait IntScalar:
    Integer
    + Signed
    + Clone
    + Debug
    + Display
    + Hash
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_i64_exact(v: i64) -> Self {
        Self::from_i64(v).expect("scalar cannot represent i64 value")
    }
}

impl<T> IntScalar for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + Hash
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Extended gcd: returns `(g, x, y)` with `g = x·a + y·b` and `g >= 0`.
pub fn ext_gcd<T: IntScalar>(a: &T, b: &T) -> (T, T, T) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Floor division with a positive divisor; `floor_div(-3, 2) == -2`.
pub fn floor_div<T: IntScalar>(a: &T, b: &T) -> T {
    a.div_floor(b)
}

/// Inner product of two integer vectors of equal length.
pub fn dot<T: IntScalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Divides a vector by the gcd of its entries; the zero vector is returned unchanged.
pub fn primitive<T: IntScalar>(v: &[T]) -> Vec<T> {
    let g = v.iter().fold(T::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x.clone() / g.clone()).collect()
}
