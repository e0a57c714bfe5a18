use std::fmt;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::{smith_normal_form, IntScalar, Matrix};
use crate::error::LatticeError;
use crate::json::json_int;

/// A finite abelian group `Z/d_1 × ... × Z/d_k` in invariant-factor form
/// (`d_i >= 2`, `d_i | d_{i+1}`). The empty list is the trivial group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup<T> {
    factors: Vec<T>,
}

impl<T: IntScalar> AbelianGroup<T> {
    pub fn trivial() -> Self {
        AbelianGroup { factors: vec![] }
    }

    pub fn cyclic(n: T) -> Self {
        Self::from_cyclic_orders(&[n])
    }

    /// Accepts a list that is already in invariant-factor form.
    pub fn from_invariant_factors(factors: Vec<T>) -> Result<Self, LatticeError> {
        let two = T::one() + T::one();
        for (i, d) in factors.iter().enumerate() {
            if *d < two {
                return Err(LatticeError::BadInvariantFactor {
                    index: i,
                    value: d.to_string(),
                });
            }
            if i > 0 && !d.is_multiple_of(&factors[i - 1]) {
                return Err(LatticeError::DivisibilityChain {
                    index: i,
                    value: d.to_string(),
                    previous: factors[i - 1].to_string(),
                });
            }
        }
        Ok(AbelianGroup { factors })
    }

    /// Canonicalizes `Z/n_1 × ... × Z/n_k` for arbitrary positive orders.
    pub fn from_cyclic_orders(orders: &[T]) -> Self {
        assert!(
            orders.iter().all(|n| n.is_positive()),
            "cyclic orders must be positive"
        );
        let snf = smith_normal_form(&Matrix::diagonal(orders));
        let factors = snf.diagonal().into_iter().filter(|d| !d.is_one()).collect();
        AbelianGroup { factors }
    }

    pub fn invariant_factors(&self) -> &[T] {
        &self.factors
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> T {
        self.factors
            .iter()
            .fold(T::one(), |acc, d| acc * d.clone())
    }

    pub fn exponent(&self) -> T {
        self.factors.last().cloned().unwrap_or_else(T::one)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    pub fn zero(&self) -> GroupElem<T> {
        GroupElem {
            parent: self.clone(),
            coords: vec![T::zero(); self.factors.len()],
        }
    }

    /// The standard generators, one per invariant factor.
    pub fn generators(&self) -> Vec<GroupElem<T>> {
        (0..self.rank())
            .map(|i| {
                let mut coords = vec![T::zero(); self.rank()];
                coords[i] = T::one();
                GroupElem {
                    parent: self.clone(),
                    coords,
                }
            })
            .collect()
    }

    /// Reduces arbitrary integer coordinates into the group.
    pub fn element(&self, coords: &[T]) -> Result<GroupElem<T>, LatticeError> {
        if coords.len() != self.rank() {
            return Err(LatticeError::CoordinateCount {
                expected: self.rank(),
                got: coords.len(),
            });
        }
        Ok(GroupElem {
            parent: self.clone(),
            coords: coords
                .iter()
                .zip(&self.factors)
                .map(|(c, d)| c.mod_floor(d))
                .collect(),
        })
    }

    pub fn element_i64(&self, coords: &[i64]) -> Result<GroupElem<T>, LatticeError> {
        let c: Vec<T> = coords.iter().map(|&x| T::from_i64_exact(x)).collect();
        self.element(&c)
    }

    /// Every element, in lexicographic order of coordinates.
    pub fn elements(&self) -> impl Iterator<Item = GroupElem<T>> + '_ {
        let total = self.order().to_usize().expect("group too large to enumerate");
        (0..total).map(move |mut idx| {
            let mut coords = vec![T::zero(); self.rank()];
            for i in (0..self.rank()).rev() {
                let d = self.factors[i].to_usize().unwrap();
                coords[i] = T::from_usize(idx % d).unwrap();
                idx /= d;
            }
            GroupElem {
                parent: self.clone(),
                coords,
            }
        })
    }

    /// The quotient `G / nG` together with the reduction map.
    pub fn mod_multiples(&self, n: &T) -> MultipleQuotient<T> {
        let mut keep = Vec::new();
        let mut factors = Vec::new();
        for (i, d) in self.factors.iter().enumerate() {
            let g = d.gcd(n);
            if !g.is_one() {
                keep.push(i);
                factors.push(g);
            }
        }
        MultipleQuotient {
            source: self.clone(),
            target: AbelianGroup { factors },
            keep,
        }
    }
}

impl<T: IntScalar> fmt::Display for AbelianGroup<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Reduction `G -> G/nG`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultipleQuotient<T> {
    pub source: AbelianGroup<T>,
    pub target: AbelianGroup<T>,
    keep: Vec<usize>,
}

impl<T: IntScalar> MultipleQuotient<T> {
    pub fn apply(&self, x: &GroupElem<T>) -> GroupElem<T> {
        assert_eq!(x.parent, self.source, "element of the wrong group");
        let coords: Vec<T> = self.keep.iter().map(|&i| x.coords[i].clone()).collect();
        self.target.element(&coords).expect("coordinate count matches")
    }
}

/// An element of an [`AbelianGroup`], stored as reduced coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElem<T> {
    parent: AbelianGroup<T>,
    coords: Vec<T>,
}

impl<T: IntScalar> GroupElem<T> {
    pub fn parent(&self) -> &AbelianGroup<T> {
        &self.parent
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.parent, other.parent, "adding elements of different groups");
        let coords: Vec<T> = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        self.parent.element(&coords).unwrap()
    }

    pub fn neg(&self) -> Self {
        let coords: Vec<T> = self.coords.iter().map(|a| -a.clone()).collect();
        self.parent.element(&coords).unwrap()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// `k · self` for any integer `k`.
    pub fn scale(&self, k: &T) -> Self {
        let coords: Vec<T> = self.coords.iter().map(|a| a.clone() * k.clone()).collect();
        self.parent.element(&coords).unwrap()
    }

    /// Least `k >= 1` with `k · self = 0`.
    pub fn order(&self) -> T {
        self.coords
            .iter()
            .zip(self.parent.invariant_factors())
            .fold(T::one(), |acc, (c, d)| acc.lcm(&(d.clone() / c.gcd(d))))
    }
}

impl<T: IntScalar> fmt::Display for GroupElem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl<T: IntScalar> Serialize for AbelianGroup<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let f: Vec<_> = self.factors.iter().map(json_int).collect();
        f.serialize(s)
    }
}

impl<T: IntScalar> Serialize for GroupElem<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GroupElement", 2)?;
        st.serialize_field("group", &self.parent)?;
        let c: Vec<_> = self.coords.iter().map(json_int).collect();
        st.serialize_field("coords", &c)?;
        st.end()
    }
}
