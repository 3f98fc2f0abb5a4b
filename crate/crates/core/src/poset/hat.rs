//! Maps reachable by chromatic switches whose components are monochromatic
//! or minimal non-monochromatic.

use std::collections::{BTreeMap, HashSet};

use super::{covering_switches, require_closed};
use crate::combmap::{ColoredMap, CombMap};
use crate::error::{Error, Result};

/// Assigns each color to a family.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HatConfig {
    family: BTreeMap<String, String>,
}

impl HatConfig {
    pub fn new<I, A, B>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        HatConfig {
            family: pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
        }
    }

    /// Every color is its own family.
    pub fn singletons<'a>(colors: impl IntoIterator<Item = &'a str>) -> Self {
        HatConfig::new(colors.into_iter().map(|c| (c, c)))
    }

    pub fn family(&self, color: &str) -> Result<&str> {
        self.family
            .get(color)
            .map(String::as_str)
            .ok_or_else(|| Error::Missing(format!("family of color `{color}`")))
    }

    pub fn families(&self) -> impl Iterator<Item = (&str, &str)> {
        self.family.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    fn check(&self, cm: &ColoredMap) -> Result<()> {
        for c in cm.colors() {
            self.family(c)?;
        }
        Ok(())
    }

    /// Family of each vertex.
    pub fn vertex_families<'a>(&'a self, cm: &ColoredMap) -> Result<Vec<&'a str>> {
        cm.colors().iter().map(|c| self.family(c)).collect()
    }
}

fn has_disconnecting_switch(m: &CombMap) -> bool {
    covering_switches(m)
        .map(|s| s.iter().any(|s| s.delta_gamma == 1))
        .unwrap_or(false)
}

/// Condition (P1): each component is monochromatic or minimal.
pub fn satisfies_p1(cm: &ColoredMap, cfg: &HatConfig) -> Result<bool> {
    let fam = cfg.vertex_families(cm)?;
    for g in cm.map().components().groups() {
        let mono = g.iter().all(|&v| fam[v] == fam[g[0]]);
        if !mono && has_disconnecting_switch(&cm.map().restrict(&g)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All maps below `cm` satisfying (P1) that are reached from `cm` by
/// disconnecting chromatic switches through maps failing (P1).
pub fn hat_maps(cm: &ColoredMap, cfg: &HatConfig) -> Result<Vec<ColoredMap>> {
    require_closed(cm.map())?;
    cfg.check(cm)?;
    if satisfies_p1(cm, cfg)? {
        return Ok(vec![cm.clone()]);
    }
    let fam = cfg.vertex_families(cm)?;
    let mut out = Vec::new();
    let mut found: HashSet<Vec<usize>> = HashSet::new();
    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    let mut stack = vec![cm.map().clone()];
    while let Some(m) = stack.pop() {
        let edge_families = |(a, b): (usize, usize)| (fam[m.vertex_of(a)], fam[m.vertex_of(b)]);
        for s in covering_switches(&m)? {
            if s.delta_gamma != 1 {
                continue;
            }
            let (c1, c2) = edge_families(s.replaced[0]);
            let (c3, c4) = edge_families(s.replaced[1]);
            let chromatic = c1 != c2 && c3 != c4 && (c1 == c3 || c1 == c4 || c2 == c3 || c2 == c4);
            if !chromatic || !visited.insert(s.map.alpha().images().to_vec()) {
                continue;
            }
            let next = cm.with_alpha(s.map.alpha().clone())?;
            if satisfies_p1(&next, cfg)? {
                if found.insert(s.map.alpha().images().to_vec()) {
                    out.push(next);
                }
            } else {
                stack.push(s.map);
            }
        }
    }
    out.sort_by(|a, b| a.map().alpha().images().cmp(b.map().alpha().images()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::{closed_maps_with_degrees, colorings, MapKind};
    use crate::poset::SwitchPosetView;

    fn colored(m: CombMap, colors: &[&str]) -> ColoredMap {
        ColoredMap::new(m, colors.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn monochromatic_map_is_its_own_hat() {
        let cm = colored(CombMap::cycle(4).unwrap(), &["a"; 4]);
        let cfg = HatConfig::singletons(["a"]);
        assert_eq!(hat_maps(&cm, &cfg).unwrap(), vec![cm]);
    }

    #[test]
    fn mixed_melon_splits_into_loops() {
        let cm = colored(CombMap::melon(2, None).unwrap(), &["a", "b"]);
        let cfg = HatConfig::singletons(["a", "b"]);
        let hats = hat_maps(&cm, &cfg).unwrap();
        let loops = CombMap::from_cycles(&[vec![1, 2], vec![3, 4]], &[vec![1, 2], vec![3, 4]], MapKind::Map).unwrap();
        assert_eq!(hats.len(), 1);
        assert_eq!(hats[0].map(), &loops);
    }

    #[test]
    fn four_cycle_separates_the_pairs() {
        let cm = colored(CombMap::cycle(4).unwrap(), &["a", "a", "b", "b"]);
        let cfg = HatConfig::singletons(["a", "b"]);
        let hats = hat_maps(&cm, &cfg).unwrap();
        assert_eq!(hats.len(), 1);
        assert_eq!(hats[0].map().components().groups(), vec![vec![0, 1], vec![2, 3]]);
        assert!(hat_maps(&cm, &HatConfig::singletons(["a"])).is_err());
    }

    #[test]
    fn hats_are_closed_under_meet() {
        for degrees in [vec![2, 2, 2, 2], vec![4, 2, 2], vec![2, 2, 2, 2, 2, 2]] {
            let maps = closed_maps_with_degrees(&degrees).unwrap();
            for m in maps.iter().filter(|m| m.gamma() == 1).step_by(if degrees.len() == 6 { 97 } else { 1 }) {
                let view = SwitchPosetView::new(m.pi().clone());
                for cm in colorings(m, &["a", "b"]) {
                    let cfg = HatConfig::singletons(["a", "b"]);
                    let hats = hat_maps(&cm, &cfg).unwrap();
                    let alphas: HashSet<Vec<usize>> =
                        hats.iter().map(|h| h.map().alpha().images().to_vec()).collect();
                    for x in &hats {
                        for y in &hats {
                            let (meet, _) = view.meet_join(x.map(), y.map(), m).unwrap();
                            assert!(alphas.contains(meet.alpha().images()), "{m:?} {cm:?}");
                        }
                    }
                }
            }
        }
    }
}
