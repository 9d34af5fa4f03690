use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::error::RuleError;
use crate::geometry::{ball, ReducedWord, VertexSet};

/// Where a configuration's values are known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Every vertex; anything not listed as a zero is 1.
    Everywhere,
    /// A ball; anything in it not listed as a zero is 1.
    Ball { center: ReducedWord, radius: usize },
    /// An explicit finite set.
    Finite(VertexSet),
}

/// A `{0,1}` colouring of (part of) the tree, stored by its zero set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    domain: Domain,
    zeros: VertexSet,
}

impl Configuration {
    /// Zeros as given, ones everywhere else.
    pub fn padded(zeros: VertexSet) -> Self {
        Configuration { domain: Domain::Everywhere, zeros }
    }

    pub fn all_ones() -> Self {
        Configuration::padded(VertexSet::new())
    }

    pub fn on_ball(center: ReducedWord, radius: usize, zeros: VertexSet) -> Result<Self, RuleError> {
        if let Some(z) = zeros.iter().find(|z| z.distance(&center) > radius) {
            return Err(RuleError::BadConfiguration(format!("zero {z} outside the ball")));
        }
        Ok(Configuration { domain: Domain::Ball { center, radius }, zeros })
    }

    /// Values on `domain`: zero on `zeros`, one elsewhere.
    pub fn on_set(domain: VertexSet, zeros: VertexSet) -> Result<Self, RuleError> {
        if let Some(z) = zeros.iter().find(|z| !domain.contains(z)) {
            return Err(RuleError::BadConfiguration(format!("zero {z} outside the domain")));
        }
        Ok(Configuration { domain: Domain::Finite(domain), zeros })
    }

    /// The domain as a vertex set, unless it is everything.
    pub fn domain_vertices(&self) -> Option<VertexSet> {
        match &self.domain {
            Domain::Everywhere => None,
            Domain::Ball { center, radius } => Some(ball(center, *radius)),
            Domain::Finite(set) => Some(set.clone()),
        }
    }

    pub fn from_values(values: &BTreeMap<ReducedWord, bool>) -> Self {
        let domain: VertexSet = values.keys().cloned().collect();
        let zeros = values.iter().filter(|(_, v)| !**v).map(|(k, _)| k.clone()).collect();
        Configuration { domain: Domain::Finite(domain), zeros }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn zeros(&self) -> &VertexSet {
        &self.zeros
    }

    pub fn is_zero(&self, v: &ReducedWord) -> bool {
        self.zeros.contains(v)
    }

    /// `Some(true)` for 1, `Some(false)` for 0, `None` off the domain.
    pub fn value(&self, v: &ReducedWord) -> Option<bool> {
        if self.zeros.contains(v) {
            return Some(false);
        }
        let known = match &self.domain {
            Domain::Everywhere => true,
            Domain::Ball { center, radius } => v.distance(center) <= *radius,
            Domain::Finite(set) => set.contains(v),
        };
        known.then_some(true)
    }

    pub fn covers(&self, center: &ReducedWord, radius: usize) -> bool {
        match &self.domain {
            Domain::Everywhere => true,
            Domain::Ball { center: c, radius: r } => center.distance(c) + radius <= *r,
            Domain::Finite(set) => ball(center, radius).iter().all(|v| set.contains(v)),
        }
    }

    pub fn require(&self, center: &ReducedWord, radius: usize) -> Result<(), RuleError> {
        if self.covers(center, radius) {
            Ok(())
        } else {
            Err(RuleError::InsufficientDomain { vertex: center.clone(), radius })
        }
    }

    /// Zeros within `radius` of `center`.
    pub fn zeros_near(&self, center: &ReducedWord, radius: usize) -> VertexSet {
        self.zeros.iter().filter(|z| z.distance(center) <= radius).cloned().collect()
    }

    /// The configuration seen from `g`: `x -> self(g x)`.
    pub fn shifted(&self, g: &ReducedWord) -> Configuration {
        let gi = g.inverse();
        let domain = match &self.domain {
            Domain::Everywhere => Domain::Everywhere,
            Domain::Ball { center, radius } => Domain::Ball { center: gi.mul(center), radius: *radius },
            Domain::Finite(set) => Domain::Finite(set.iter().map(|v| gi.mul(v)).collect()),
        };
        Configuration { domain, zeros: self.zeros.iter().map(|v| gi.mul(v)).collect() }
    }

    /// Same zeros, ones replacing the unknown region.
    pub fn with_padding(&self) -> Configuration {
        Configuration::padded(self.zeros.clone())
    }

    /// `{"word": 0|1, ...}`; a `"*": 1` entry marks all-ones padding and a
    /// `"*ball"` entry `{"center": w, "radius": r}` a ball domain.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        match &self.domain {
            Domain::Everywhere => {
                map.insert("*".into(), Value::from(1));
            }
            Domain::Ball { center, radius } => {
                map.insert(
                    "*ball".into(),
                    serde_json::json!({ "center": center.to_string(), "radius": radius }),
                );
            }
            Domain::Finite(set) => {
                for v in set {
                    if !self.zeros.contains(v) {
                        map.insert(v.to_string(), Value::from(1));
                    }
                }
            }
        }
        for z in &self.zeros {
            map.insert(z.to_string(), Value::from(0));
        }
        Value::Object(map)
    }

    pub fn from_json(value: &Value) -> Result<Self, RuleError> {
        let bad = |m: String| RuleError::BadConfiguration(m);
        let obj = value.as_object().ok_or_else(|| bad("expected a JSON object".into()))?;
        let mut values = BTreeMap::new();
        let mut padded = false;
        let mut ball_domain = None;
        for (k, v) in obj {
            if k == "*" {
                padded = v.as_u64() == Some(1);
                if !padded {
                    return Err(bad("padding value must be 1".into()));
                }
                continue;
            }
            if k == "*ball" {
                let center = v
                    .get("center")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("ball needs a center".into()))?
                    .parse::<ReducedWord>()
                    .map_err(|e| bad(e.to_string()))?;
                let radius = v
                    .get("radius")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("ball needs a radius".into()))?;
                ball_domain = Some((center, radius as usize));
                continue;
            }
            let word: ReducedWord = k.parse().map_err(|e: crate::error::GeometryError| bad(e.to_string()))?;
            let bit = match v.as_u64() {
                Some(0) => false,
                Some(1) => true,
                _ => return Err(bad(format!("value for {k} must be 0 or 1"))),
            };
            values.insert(word, bit);
        }
        let zeros: VertexSet = values.iter().filter(|(_, b)| !**b).map(|(k, _)| k.clone()).collect();
        match (padded, ball_domain) {
            (true, Some(_)) => Err(bad("choose either padding or a ball domain".into())),
            (true, None) => Ok(Configuration::padded(zeros)),
            (false, Some((c, r))) => Configuration::on_ball(c, r, zeros),
            (false, None) => Ok(Configuration::from_values(&values)),
        }
    }
}
