//! JSON encoding shared by the problem schema and the reports.
//!
//! Floats are written with 17 significant digits in scientific notation so
//! that identical inputs give byte-identical output and every value
//! round-trips exactly. Non-finite values become `null`.

use num_complex::Complex64;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

/// Formats `x` with 17 significant digits, `null` when not finite.
pub fn format_sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// `serialize_with` helper for `f64` fields.
pub fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format_sig17(*x)).map_err(S::Error::custom)?;
    raw.serialize(s)
}

/// `serialize_with` helper for `Vec<f64>` fields.
pub fn sig17_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let wrapped: Vec<Sig17> = xs.iter().copied().map(Sig17).collect();
    wrapped.serialize(s)
}

/// `f64` serialized through [`sig17`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        sig17(&self.0, s)
    }
}

/// Complex number in the `{"re": .., "im": ..}` wire form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex {
    #[serde(serialize_with = "sig17")]
    pub re: f64,
    #[serde(serialize_with = "sig17", default)]
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        JsonComplex { re: z.re, im: z.im }
    }
}

impl From<JsonComplex> for Complex64 {
    fn from(z: JsonComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// `serialize_with` helper for `Complex64` fields.
pub fn complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    JsonComplex::from(*z).serialize(s)
}

pub fn complex_opt<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
    z.map(JsonComplex::from).serialize(s)
}

pub fn deserialize_complex<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    JsonComplex::deserialize(d).map(Complex64::from)
}
