//! Serde helpers that keep `inf`, `-inf` and `nan` through JSON, which has no
//! spelling for them: non-finite values are written as strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Number(f64),
    Text(String),
}

fn to_repr(v: f64) -> Repr {
    if v.is_finite() {
        Repr::Number(v)
    } else if v.is_nan() {
        Repr::Text("nan".into())
    } else if v > 0.0 {
        Repr::Text("inf".into())
    } else {
        Repr::Text("-inf".into())
    }
}

fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
    match r {
        Repr::Number(v) => Ok(v),
        Repr::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
            "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
            "nan" => Ok(f64::NAN),
            other => Err(E::custom(format!("expected a number, `inf` or `nan`, got `{other}`"))),
        },
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        values.iter().map(|&v| to_repr(v)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
    }
}

pub mod map {
    use super::*;

    pub fn serialize<S: Serializer>(values: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        values
            .iter()
            .map(|(k, &v)| (k, to_repr(v)))
            .collect::<BTreeMap<_, _>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        BTreeMap::<String, Repr>::deserialize(d)?
            .into_iter()
            .map(|(k, r)| from_repr(r).map(|v| (k, v)))
            .collect()
    }
}

pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, Debug)]
    struct Probe {
        #[serde(with = "vec")]
        p: Vec<f64>,
        #[serde(with = "map")]
        m: BTreeMap<String, f64>,
    }

    #[test]
    fn non_finite_values_survive_json() {
        let probe = Probe {
            p: vec![2.0, f64::INFINITY],
            m: [("a".to_string(), f64::NAN), ("b".to_string(), -f64::INFINITY)].into(),
        };
        let text = serde_json::to_string(&probe).unwrap();
        assert_eq!(text, r#"{"p":[2.0,"inf"],"m":{"a":"nan","b":"-inf"}}"#);
        let back: Probe = serde_json::from_str(&text).unwrap();
        assert_eq!(back.p, probe.p);
        assert!(back.m["a"].is_nan() && back.m["b"] == f64::NEG_INFINITY);
        assert!(serde_json::from_str::<Probe>(r#"{"p":["two"],"m":{}}"#).is_err());
    }
}
