//! Big numbers serialize as decimal strings so JSON consumers never lose
//! precision.

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::ser::SerializeStruct;
use serde::Serializer;

use crate::combinatorics::BoundPair;

pub(crate) fn big<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub(crate) fn rational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub(crate) fn rational_pair<S: Serializer>(x: &BoundPair<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("BoundPair", 2)?;
    st.serialize_field("lower", &x.lower.to_string())?;
    st.serialize_field("upper", &x.upper.to_string())?;
    st.end()
}
