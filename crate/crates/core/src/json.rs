//! JSON wire format: complex scalars are `[re, im]`, vectors are arrays of
//! scalars, matrices are arrays of rows.

use serde::ser::{SerializeSeq, Serializer};
use serde_json::Value;

use crate::linalg::{CMatrix, CVector, C64};

pub type WireComplex = [f64; 2];

pub fn complex_to_wire(z: C64) -> WireComplex {
    [z.re, z.im]
}

pub fn ser_complex<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    complex_to_wire(*z).serialize_into(s)
}

trait SerializeInto {
    fn serialize_into<S: Serializer>(self, s: S) -> Result<S::Ok, S::Error>;
}

impl SerializeInto for WireComplex {
    fn serialize_into<S: Serializer>(self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&self[0])?;
        seq.serialize_element(&self[1])?;
        seq.end()
    }
}

pub fn ser_complex_vec<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&complex_to_wire(*z))?;
    }
    seq.end()
}

pub fn vector_to_wire(v: &CVector) -> Vec<WireComplex> {
    v.iter().map(|&z| complex_to_wire(z)).collect()
}

pub fn matrix_to_wire(m: &CMatrix) -> Vec<Vec<WireComplex>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_to_wire(m[(i, j)])).collect())
        .collect()
}

pub fn matrix_to_value(m: &CMatrix) -> Value {
    serde_json::to_value(matrix_to_wire(m)).expect("finite floats serialize")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct WireError(pub String);

/// Accepts `[re, im]` or a bare real number.
pub fn complex_from_value(v: &Value) -> Result<C64, WireError> {
    match v {
        Value::Number(x) => Ok(C64::new(x.as_f64().ok_or_else(|| WireError("bad number".into()))?, 0.0)),
        Value::Array(parts) if parts.len() == 2 => {
            let re = parts[0].as_f64().ok_or_else(|| WireError("complex real part is not a number".into()))?;
            let im = parts[1].as_f64().ok_or_else(|| WireError("complex imaginary part is not a number".into()))?;
            Ok(C64::new(re, im))
        }
        other => Err(WireError(format!("expected [re, im], found {other}"))),
    }
}

pub fn vector_from_value(v: &Value) -> Result<CVector, WireError> {
    let items = v.as_array().ok_or_else(|| WireError("vector must be an array".into()))?;
    let entries = items.iter().map(complex_from_value).collect::<Result<Vec<_>, _>>()?;
    Ok(CVector::from_vec(entries))
}

pub fn matrix_from_value(v: &Value) -> Result<CMatrix, WireError> {
    let rows = v.as_array().ok_or_else(|| WireError("matrix must be an array of rows".into()))?;
    if rows.is_empty() {
        return Err(WireError("matrix has no rows".into()));
    }
    let parsed = rows.iter().map(vector_from_value).collect::<Result<Vec<_>, _>>()?;
    let ncols = parsed[0].len();
    if parsed.iter().any(|r| r.len() != ncols) {
        return Err(WireError("matrix rows have different lengths".into()));
    }
    Ok(CMatrix::from_fn(parsed.len(), ncols, |i, j| parsed[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn matrices_round_trip_exactly(entries in proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 9)) {
            let m = CMatrix::from_fn(3, 3, |i, j| C64::new(entries[3 * i + j].0, entries[3 * i + j].1));
            let text = serde_json::to_string(&matrix_to_value(&m)).unwrap();
            let back = matrix_from_value(&serde_json::from_str(&text).unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }
    }

    #[test]
    fn bare_numbers_are_real() {
        let v: Value = serde_json::from_str("[[1, [0, 2]], [3.5, [-1, -1]]]").unwrap();
        let m = matrix_from_value(&v).unwrap();
        assert_eq!(m[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(m[(0, 1)], C64::new(0.0, 2.0));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let v: Value = serde_json::from_str("[[1, 2], [3]]").unwrap();
        assert!(matrix_from_value(&v).is_err());
    }
}
