//! Serde helpers: exact numbers are written as strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serializer;

use crate::ffpoly::rational_to_string;

pub fn rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_to_string(r))
}

pub fn rational_opt<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&rational_to_string(r)),
        None => s.serialize_none(),
    }
}

pub fn bigint<S: Serializer>(r: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn rationals<S: Serializer>(r: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(r.iter().map(rational_to_string))
}

pub fn bigints<S: Serializer>(r: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(r.iter().map(|x| x.to_string()))
}
