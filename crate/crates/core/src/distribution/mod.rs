//! Abstract distributions on closed colored maps, free cumulants, free
//! products, freeness tests and the free central limit theorem.

mod clt;
mod cumulant;
mod empirical;
mod freeness;

pub use clt::{clt, clt_cumulant, clt_limit};
pub use cumulant::{
    cumulant_budget, cumulant_transform, free_product, is_free_cumulant_test, moments_from_cumulants,
    CumulantTable, FreenessVerdict,
};
pub use empirical::{empirical_distribution, EmpiricalDistribution, JointSampler};
pub use freeness::{freeness_statistic, FreenessReport, FreenessRow};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::combmap::{canonical_form, serialize_map, ColoredMap};
use crate::error::{Error, Result};
use crate::poset::HatConfig;
use crate::scalar::Scalar;

/// Fallback used for connected maps that are not in the table.
pub type Rule<S> = Arc<dyn Fn(&ColoredMap) -> Result<S> + Send + Sync>;

/// Moments of a family of colored variables, stored on connected maps.
///
/// Values on disconnected maps are products over components and the empty
/// map has value one.
#[derive(Clone)]
pub struct AbstractDistribution<S: Scalar> {
    arity: BTreeMap<String, usize>,
    family: BTreeMap<String, String>,
    table: BTreeMap<String, (ColoredMap, S)>,
    rule: Option<Rule<S>>,
}

impl<S: Scalar> fmt::Debug for AbstractDistribution<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AbstractDistribution")
            .field("arity", &self.arity)
            .field("family", &self.family)
            .field("entries", &self.table.len())
            .field("rule", &self.rule.is_some())
            .finish()
    }
}

impl<S: Scalar> Default for AbstractDistribution<S> {
    fn default() -> Self {
        AbstractDistribution {
            arity: BTreeMap::new(),
            family: BTreeMap::new(),
            table: BTreeMap::new(),
            rule: None,
        }
    }
}

impl<S: Scalar> AbstractDistribution<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a color with its arity and family.
    pub fn declare(&mut self, color: &str, arity: usize, family: &str) -> Result<()> {
        if let Some(&a) = self.arity.get(color) {
            if a != arity || self.family[color] != family {
                return Err(Error::Precondition(format!("color `{color}` declared twice")));
            }
        }
        self.arity.insert(color.into(), arity);
        self.family.insert(color.into(), family.into());
        Ok(())
    }

    pub fn with_color(mut self, color: &str, arity: usize, family: &str) -> Result<Self> {
        self.declare(color, arity, family)?;
        Ok(self)
    }

    pub fn with_rule(mut self, rule: Rule<S>) -> Self {
        self.rule = Some(rule);
        self
    }

    pub fn arity(&self, color: &str) -> Option<usize> {
        self.arity.get(color).copied()
    }

    pub fn colors(&self) -> impl Iterator<Item = (&str, usize)> {
        self.arity.iter().map(|(c, &a)| (c.as_str(), a))
    }

    pub fn family(&self, color: &str) -> Result<&str> {
        self.family
            .get(color)
            .map(String::as_str)
            .ok_or_else(|| Error::Missing(format!("color `{color}`")))
    }

    pub fn families(&self) -> BTreeSet<&str> {
        self.family.values().map(String::as_str).collect()
    }

    pub fn hat_config(&self) -> HatConfig {
        HatConfig::new(self.family.iter().map(|(c, f)| (c.clone(), f.clone())))
    }

    /// The family of a monochromatic map, `None` for mixed maps.
    pub fn family_of_map(&self, cm: &ColoredMap) -> Result<Option<&str>> {
        let mut found: Option<&str> = None;
        for c in cm.colors() {
            let f = self.family(c)?;
            match found {
                Some(g) if g != f => return Ok(None),
                _ => found = Some(f),
            }
        }
        Ok(found)
    }

    fn check_colors(&self, cm: &ColoredMap) -> Result<()> {
        for (v, c) in cm.colors().iter().enumerate() {
            match self.arity.get(c) {
                None => return Err(Error::Missing(format!("color `{c}`"))),
                Some(&a) if a != cm.map().degree(v) => {
                    return Err(Error::Arity(format!(
                        "color `{c}` has arity {a}, vertex {v} has degree {}",
                        cm.map().degree(v)
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Stores the value of a connected closed map.
    pub fn insert(&mut self, cm: &ColoredMap, value: S) -> Result<()> {
        if !cm.map().is_closed() || cm.map().gamma() != 1 {
            return Err(Error::Precondition("only connected closed maps are stored".into()));
        }
        self.check_colors(cm)?;
        let canon = canonical_form(cm);
        self.table.insert(canon.key, (canon.map, value));
        Ok(())
    }

    pub fn contains(&self, cm: &ColoredMap) -> bool {
        self.table.contains_key(&canonical_form(cm).key)
    }

    fn connected_value(&self, cm: &ColoredMap) -> Result<S> {
        let canon = canonical_form(cm);
        if let Some((_, v)) = self.table.get(&canon.key) {
            return Ok(v.clone());
        }
        match &self.rule {
            Some(rule) => rule(&canon.map),
            None => Err(Error::Missing(canon.key)),
        }
    }

    /// Moment of a closed map: the product of its component values.
    pub fn value(&self, cm: &ColoredMap) -> Result<S> {
        if !cm.map().is_closed() {
            return Err(Error::Precondition("moments are defined on closed maps".into()));
        }
        self.check_colors(cm)?;
        let mut acc = S::one();
        for comp in cm.split_components() {
            acc = acc * self.connected_value(&comp)?;
        }
        Ok(acc)
    }

    /// Stored entries in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &ColoredMap, &S)> {
        self.table.iter().map(|(k, (m, v))| (k.as_str(), m, v))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// The marginal on one family: its colors, its stored maps and the rule.
    pub fn restrict_family(&self, family: &str) -> Self {
        let keep: BTreeSet<&String> = self
            .family
            .iter()
            .filter(|(_, f)| f.as_str() == family)
            .map(|(c, _)| c)
            .collect();
        AbstractDistribution {
            arity: self.arity.iter().filter(|(c, _)| keep.contains(c)).map(|(c, a)| (c.clone(), *a)).collect(),
            family: self.family.iter().filter(|(c, _)| keep.contains(c)).map(|(c, f)| (c.clone(), f.clone())).collect(),
            table: self
                .table
                .iter()
                .filter(|(_, (m, _))| m.colors().iter().all(|c| keep.contains(c)))
                .map(|(k, e)| (k.clone(), e.clone()))
                .collect(),
            rule: self.rule.clone(),
        }
    }

    /// JSON list of `{map, value, stderr?}` in key order.
    pub fn dump_json(&self, stderr: Option<&BTreeMap<String, f64>>) -> Value {
        let rows = self
            .table
            .iter()
            .map(|(k, (m, v))| {
                let mut row = json!({ "map": serialize_map(m), "value": v.to_f64() });
                if let Some(se) = stderr.and_then(|t| t.get(k)) {
                    row["stderr"] = json!(se);
                }
                row
            })
            .collect();
        Value::Array(rows)
    }
}
