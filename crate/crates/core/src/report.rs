use std::fmt;

use serde::{Deserialize, Serialize};

/// One checked equality: a residual norm against its threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub name: String,
    #[serde(with = "extended_f64")]
    pub residual: f64,
    #[serde(with = "extended_f64")]
    pub threshold: f64,
    pub pass: bool,
}

/// Residual norms for a set of matrix identities and the conjunction of
/// their verdicts.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
    pub overall: bool,
}

impl ConditionReport {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
            overall: true,
        }
    }

    /// Records `residual ≤ threshold` under `name`.
    pub fn push(&mut self, name: impl Into<String>, residual: f64, threshold: f64) {
        let residual = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual.max(0.0)
        };
        let pass = residual.is_finite() && residual <= threshold;
        self.overall &= pass;
        self.entries.push(ConditionEntry {
            name: name.into(),
            residual,
            threshold,
            pass,
        });
    }

    pub fn entry(&self, name: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| {
                format!(
                    "{}={:.3e}{}{:.1e}",
                    e.name,
                    e.residual,
                    if e.pass { "<=" } else { ">" },
                    e.threshold
                )
            })
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}


/// Serde adapter that writes non-finite floats as the strings `"inf"`,
/// `"-inf"` and `"nan"`, since JSON numbers cannot hold them.
pub mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}
