//! Helpers for the JSON shape of exact values.

use serde::Serialize;

use crate::lattice::IntScalar;

/// Integers serialize as JSON numbers when they fit in `i64`, otherwise as
/// decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum JsonInt {
    Small(i64),
    Big(String),
}

pub fn json_int<T: IntScalar>(x: &T) -> JsonInt {
    match x.to_i64() {
        Some(v) => JsonInt::Small(v),
        None => JsonInt::Big(x.to_string()),
    }
}

pub fn json_ints<T: IntScalar>(xs: &[T]) -> Vec<JsonInt> {
    xs.iter().map(json_int).collect()
}

pub fn ser_int<T: IntScalar, S: serde::Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    json_int(x).serialize(s)
}

pub fn ser_vec<T: IntScalar, S: serde::Serializer>(xs: &[T], s: S) -> Result<S::Ok, S::Error> {
    json_ints(xs).serialize(s)
}

pub fn ser_vecs<T: IntScalar, S: serde::Serializer>(
    xs: &[Vec<T>],
    s: S,
) -> Result<S::Ok, S::Error> {
    let v: Vec<Vec<JsonInt>> = xs.iter().map(|x| json_ints(x)).collect();
    v.serialize(s)
}

pub fn ser_matrix<T: IntScalar, S: serde::Serializer>(
    m: &crate::lattice::Matrix<T>,
    s: S,
) -> Result<S::Ok, S::Error> {
    ser_vecs(&m.row_vecs(), s)
}
