use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::FamilyError;
use crate::expr::Params;

/// A family parameter: a number, a coefficient list or expression text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl ParamValue {
    /// Reads `1.5` as a number, `1,0.1` as a list and anything else as text.
    pub fn parse(s: &str) -> Self {
        let s = s.trim();
        if let Ok(x) = s.parse::<f64>() {
            return ParamValue::Number(x);
        }
        if s.contains(',') {
            let items: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
            if let Ok(v) = items {
                return ParamValue::List(v);
            }
        }
        ParamValue::Text(s.to_string())
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(x) => write!(f, "{x}"),
            ParamValue::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

/// Named family parameters in sorted order.
pub type FamilyParams = BTreeMap<String, ParamValue>;

pub(crate) struct Reader<'a> {
    given: &'a FamilyParams,
    defaults: FamilyParams,
}

impl<'a> Reader<'a> {
    pub fn new(given: &'a FamilyParams, defaults: FamilyParams) -> Self {
        Self { given, defaults }
    }

    fn get(&self, name: &str) -> Option<&ParamValue> {
        self.given.get(name).or_else(|| self.defaults.get(name))
    }

    pub fn number(&self, name: &str) -> Result<f64, FamilyError> {
        match self.get(name) {
            Some(ParamValue::Number(x)) => Ok(*x),
            Some(ParamValue::List(v)) if v.len() == 1 => Ok(v[0]),
            Some(_) => Err(FamilyError::BadParam {
                name: name.into(),
                expected: "a number",
            }),
            None => Err(FamilyError::MissingParam(name.into())),
        }
    }

    pub fn list(&self, name: &str) -> Result<Vec<f64>, FamilyError> {
        match self.get(name) {
            Some(ParamValue::Number(x)) => Ok(vec![*x]),
            Some(ParamValue::List(v)) => Ok(v.clone()),
            Some(_) => Err(FamilyError::BadParam {
                name: name.into(),
                expected: "a comma-separated list of numbers",
            }),
            None => Err(FamilyError::MissingParam(name.into())),
        }
    }

    pub fn text(&self, name: &str) -> Result<String, FamilyError> {
        match self.get(name) {
            Some(v) => Ok(v.to_string()),
            None => Err(FamilyError::MissingParam(name.into())),
        }
    }

    /// All numeric parameters, for binding expression text.
    pub fn numbers(&self) -> Params {
        let mut out = Params::new();
        for (k, v) in self.defaults.iter().chain(self.given.iter()) {
            if let ParamValue::Number(x) = v {
                out.insert(k.clone(), *x);
            } else {
                out.remove(k);
            }
        }
        out
    }

    /// Rejects keys without a default, except extra numbers when allowed.
    pub fn check_known(&self, family: &str, allow_extra_numbers: bool) -> Result<(), FamilyError> {
        for (k, v) in self.given {
            let known = self.defaults.contains_key(k);
            if !known && !(allow_extra_numbers && matches!(v, ParamValue::Number(_))) {
                return Err(FamilyError::UnknownParam {
                    family: family.into(),
                    name: k.clone(),
                });
            }
        }
        Ok(())
    }

    /// Defaults overridden by the given values.
    pub fn resolved(&self) -> FamilyParams {
        let mut out = self.defaults.clone();
        out.extend(self.given.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }
}

pub(crate) fn table(items: &[(&str, ParamValue)]) -> FamilyParams {
    items.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

pub(crate) fn num(x: f64) -> ParamValue {
    ParamValue::Number(x)
}

pub(crate) fn text(s: &str) -> ParamValue {
    ParamValue::Text(s.into())
}

pub(crate) fn list(v: &[f64]) -> ParamValue {
    ParamValue::List(v.to_vec())
}
