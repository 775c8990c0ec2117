//! Serialization helpers shared by the report types.

use serde::Serializer;

/// Writes non-finite values as the strings `inf`, `-inf` or `nan`.
pub fn inf_as_string<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}
