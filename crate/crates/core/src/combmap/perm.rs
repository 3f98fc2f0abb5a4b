use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A bijection of `{0, .., m-1}`.
///
/// Directed edges are 0-based everywhere in the API; cycle notation in
/// constructors and in the text format is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Permutation {
            images: (0..m).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        for (e, &img) in images.iter().enumerate() {
            if img >= m {
                return Err(Error::InvalidMap {
                    edge: e + 1,
                    reason: format!("image {} out of range 1..={m}", img + 1),
                });
            }
            if seen[img] {
                return Err(Error::InvalidMap {
                    edge: img + 1,
                    reason: "not a bijection (image hit twice)".into(),
                });
            }
            seen[img] = true;
        }
        Ok(Permutation { images })
    }

    /// Build from 1-based cycles. Elements of `1..=m` not mentioned are fixed.
    pub fn from_cycles(m: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<Option<usize>> = vec![None; m];
        for cycle in cycles {
            for (k, &e) in cycle.iter().enumerate() {
                if e == 0 || e > m {
                    return Err(Error::InvalidMap {
                        edge: e,
                        reason: format!("label out of range 1..={m}"),
                    });
                }
                if images[e - 1].is_some() {
                    return Err(Error::InvalidMap {
                        edge: e,
                        reason: "appears in two cycles".into(),
                    });
                }
                let next = cycle[(k + 1) % cycle.len()];
                if next == 0 || next > m {
                    return Err(Error::InvalidMap {
                        edge: next,
                        reason: format!("label out of range 1..={m}"),
                    });
                }
                images[e - 1] = Some(next - 1);
            }
        }
        Permutation::from_images(
            images
                .into_iter()
                .enumerate()
                .map(|(e, img)| img.unwrap_or(e))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, e: usize) -> usize {
        self.images[e]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (e, &img) in self.images.iter().enumerate() {
            inv[img] = e;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        Permutation {
            images: other.images.iter().map(|&e| self.images[e]).collect(),
        }
    }

    /// Cycles, each starting at its least element, ordered by least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut e = start;
            while !seen[e] {
                seen[e] = true;
                cycle.push(e);
                e = self.images[e];
            }
            out.push(cycle);
        }
        out
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|&e| self.images[e] == e).collect()
    }

    pub fn is_involution(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(e, &img)| self.images[img] == e)
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Minimal number of transpositions: `m - #cycles`.
    pub fn length(&self) -> usize {
        self.len() - self.cycle_count()
    }

    /// All permutations of `{0..n}` in lexicographic order of image vectors.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation {
                images: cur.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }

    /// 1-based cycle notation, fixed points included: `(1 2)(3)`.
    pub fn to_cycle_string(&self) -> String {
        self.cycles()
            .iter()
            .map(|c| {
                let inner: Vec<String> = c.iter().map(|e| (e + 1).to_string()).collect();
                format!("({})", inner.join(" "))
            })
            .collect()
    }
}
