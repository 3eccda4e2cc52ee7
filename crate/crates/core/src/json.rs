//! Serialization helpers: integers stay integers, rationals become `{num, den}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Emits a JSON number when it fits in `i64`, otherwise a decimal string.
pub struct BigIntJson<'a>(pub &'a BigInt);

impl Serialize for BigIntJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

pub struct RatJson<'a>(pub &'a BigRational);

impl Serialize for RatJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Rational", 2)?;
        st.serialize_field("num", &BigIntJson(self.0.numer()))?;
        st.serialize_field("den", &BigIntJson(self.0.denom()))?;
        st.end()
    }
}

pub fn rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    RatJson(r).serialize(s)
}

pub fn rationals<S: Serializer>(rs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(RatJson))
}

pub fn opt_rational<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => RatJson(r).serialize(s),
        None => s.serialize_none(),
    }
}

pub fn rat_value(r: &BigRational) -> serde_json::Value {
    serde_json::to_value(RatJson(r)).expect("rational serializes")
}

/// Exact values (machine-word rationals and containers of them) as JSON.
pub trait ExactJson {
    fn to_json(&self) -> serde_json::Value;
}

impl ExactJson for num_rational::Ratio<i64> {
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"num": self.numer(), "den": self.denom()})
    }
}

impl ExactJson for BigRational {
    fn to_json(&self) -> serde_json::Value {
        rat_value(self)
    }
}

impl<T: ExactJson> ExactJson for Option<T> {
    fn to_json(&self) -> serde_json::Value {
        self.as_ref().map_or(serde_json::Value::Null, ExactJson::to_json)
    }
}

impl<T: ExactJson, const N: usize> ExactJson for [T; N] {
    fn to_json(&self) -> serde_json::Value {
        self.iter().map(ExactJson::to_json).collect()
    }
}

impl<T: ExactJson> ExactJson for Vec<T> {
    fn to_json(&self) -> serde_json::Value {
        self.iter().map(ExactJson::to_json).collect()
    }
}

/// `serialize_with` adapter for `ExactJson` fields.
pub fn exact<T: ExactJson, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    v.to_json().serialize(s)
}
