//! The hat-map freeness statistic.

use super::AbstractDistribution;
use crate::combmap::{canonical_form, ColoredMap};
use crate::error::Result;
use crate::poset::hat_maps;

#[derive(Clone, Debug, PartialEq)]
pub struct FreenessRow {
    pub map: String,
    /// Whether every hat map has a non-monochromatic or centered component.
    pub qualifies: bool,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreenessReport {
    /// Largest |moment| over qualifying maps, zero if none qualify.
    pub statistic: f64,
    pub rows: Vec<FreenessRow>,
}

/// Largest |moment| over maps whose moment freeness forces to vanish.
///
/// A monochromatic component counts as centered when its value under
/// `reference` is within `tolerance` of zero. Families come from
/// `empirical`.
pub fn freeness_statistic(
    empirical: &AbstractDistribution<f64>,
    reference: &AbstractDistribution<f64>,
    budget: &[ColoredMap],
    tolerance: f64,
) -> Result<FreenessReport> {
    let cfg = empirical.hat_config();
    let mut report = FreenessReport {
        statistic: 0.0,
        rows: Vec::with_capacity(budget.len()),
    };
    for cm in budget {
        let mut qualifies = true;
        for hat in hat_maps(cm, &cfg)? {
            let mut found = false;
            for comp in hat.split_components() {
                found = match empirical.family_of_map(&comp)? {
                    None => true,
                    Some(_) => reference.value(&comp)?.abs() <= tolerance,
                };
                if found {
                    break;
                }
            }
            if !found {
                qualifies = false;
                break;
            }
        }
        let value = empirical.value(cm)?;
        if qualifies {
            report.statistic = report.statistic.max(value.abs());
        }
        report.rows.push(FreenessRow {
            map: canonical_form(cm).key,
            qualifies,
            value,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::CombMap;
    use crate::distribution::free_product;
    use std::sync::Arc;

    fn cm(map: CombMap, colors: &[&str]) -> ColoredMap {
        ColoredMap::new(map, colors.iter().map(|c| c.to_string()).collect()).unwrap()
    }

    /// A centered semicircular-like marginal given by its connected moments.
    fn marginal(name: &str, var: f64) -> AbstractDistribution<f64> {
        let v = var;
        let rule = move |m: &ColoredMap| -> Result<f64> {
            let n = m.map().vertex_count();
            // Loops vanish, the 2-vertex melons have value `var`, larger maps
            // take the value of a melonic product when they are a cycle.
            if n == 1 {
                return Ok(0.0);
            }
            if n == 2 {
                return Ok(v);
            }
            Ok(0.0)
        };
        AbstractDistribution::new()
            .with_color(name, 2, name)
            .unwrap()
            .with_rule(Arc::new(rule))
    }

    #[test]
    fn free_product_has_zero_statistic() {
        let joint = free_product(&[marginal("a", 1.0), marginal("b", 2.0)]).unwrap();
        let budget: Vec<ColoredMap> = vec![
            cm(CombMap::melon(2, None).unwrap(), &["a", "b"]),
            cm(CombMap::cycle(4).unwrap(), &["a", "b", "a", "b"]),
            cm(CombMap::cycle(4).unwrap(), &["a", "a", "b", "b"]),
        ];
        let r = freeness_statistic(&joint, &joint, &budget, 1e-12).unwrap();
        assert!(r.rows[0].qualifies && r.rows[1].qualifies);
        assert!(!r.rows[2].qualifies);
        assert!(r.statistic <= 1e-12, "{r:?}");
    }

    #[test]
    fn single_family_is_vacuous() {
        let d = marginal("a", 1.0);
        let budget = vec![cm(CombMap::melon(2, None).unwrap(), &["a", "a"])];
        let r = freeness_statistic(&d, &d, &budget, 1e-12).unwrap();
        assert_eq!(r.statistic, 0.0);
    }
}
