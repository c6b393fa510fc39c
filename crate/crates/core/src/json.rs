//! Serde helpers for arbitrary-precision values.
//!
//! Integers travel as decimal strings so they survive JSON parsers that
//! coerce numbers to `f64`. Rationals are a decimal string when integral and
//! a `[num, den]` pair of decimal strings otherwise; `[num]` is also accepted.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `BigInt` as a decimal string.
pub mod int_string {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let raw = IntRepr::deserialize(d)?;
        raw.into_bigint().map_err(D::Error::custom)
    }
}

/// A fixed-size array of `BigInt`s as decimal strings.
pub mod int_array {
    use super::*;

    pub fn serialize<S: Serializer, const N: usize>(
        v: &[BigInt; N],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(|x| x.to_str_radix(10)).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(
        d: D,
    ) -> Result<[BigInt; N], D::Error> {
        let raw = Vec::<IntRepr>::deserialize(d)?;
        if raw.len() != N {
            return Err(D::Error::custom(format!("expected {N} integers, got {}", raw.len())));
        }
        let parsed: Result<Vec<BigInt>, String> = raw.into_iter().map(IntRepr::into_bigint).collect();
        let parsed = parsed.map_err(D::Error::custom)?;
        parsed
            .try_into()
            .map_err(|_| D::Error::custom("length mismatch"))
    }
}

/// `BigInt` as a bare JSON number of any size.
pub mod int_number {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        let n: serde_json::Number = v
            .to_str_radix(10)
            .parse()
            .map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        IntRepr::deserialize(d)?.into_bigint().map_err(D::Error::custom)
    }
}

/// `BigRational` as a decimal string or a `[num, den]` pair.
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        RatRepr::from(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        RatRepr::deserialize(d)?.into_rational().map_err(D::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Str(String),
    Num(serde_json::Number),
}

impl IntRepr {
    fn into_bigint(self) -> Result<BigInt, String> {
        let text = match self {
            IntRepr::Str(s) => s,
            IntRepr::Num(n) => n.to_string(),
        };
        parse_int(&text)
    }
}

pub(crate) fn parse_int(text: &str) -> Result<BigInt, String> {
    text.trim()
        .parse::<BigInt>()
        .map_err(|e| format!("invalid integer {text:?}: {e}"))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Int(String),
    Pair(Vec<String>),
}

impl From<&BigRational> for RatRepr {
    fn from(v: &BigRational) -> Self {
        if v.is_integer() {
            RatRepr::Int(v.numer().to_str_radix(10))
        } else {
            RatRepr::Pair(vec![v.numer().to_str_radix(10), v.denom().to_str_radix(10)])
        }
    }
}

impl RatRepr {
    fn into_rational(self) -> Result<BigRational, String> {
        match self {
            RatRepr::Int(s) => Ok(BigRational::from_integer(parse_int(&s)?)),
            RatRepr::Pair(parts) => match parts.as_slice() {
                [n] => Ok(BigRational::from_integer(parse_int(n)?)),
                [n, d] => {
                    let den = parse_int(d)?;
                    if den == BigInt::from(0) {
                        return Err("zero denominator".into());
                    }
                    Ok(BigRational::new(parse_int(n)?, den))
                }
                _ => Err(format!("expected [num] or [num, den], got {} entries", parts.len())),
            },
        }
    }
}

/// Lists of `BigInt`s as bare JSON numbers.
pub mod int_number_lists {
    use super::*;
    use serde::ser::SerializeSeq;

    struct Row<'a>(&'a [BigInt]);

    impl Serialize for Row<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(self.0.len()))?;
            for v in self.0 {
                let n: serde_json::Number = v
                    .to_str_radix(10)
                    .parse()
                    .map_err(serde::ser::Error::custom)?;
                seq.serialize_element(&n)?;
            }
            seq.end()
        }
    }

    pub fn serialize<S: Serializer>(rows: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for r in rows {
            seq.serialize_element(&Row(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let raw = Vec::<Vec<IntRepr>>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_iter().map(IntRepr::into_bigint).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)
    }
}

/// `Vec<BigRational>`, each entry as in [`rational`].
pub mod rational_list {
    use super::*;

    pub fn serialize<S: Serializer>(vs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<RatRepr> = vs.iter().map(RatRepr::from).collect();
        reprs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<RatRepr>::deserialize(d)?
            .into_iter()
            .map(|r| r.into_rational().map_err(D::Error::custom))
            .collect()
    }
}
