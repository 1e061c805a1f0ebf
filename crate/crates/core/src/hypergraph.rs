use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::{GroundSet, Subset};

/// A finite hypergraph with explicit edges.
///
/// Edges are kept deduplicated and sorted in the canonical [`Subset`] order.
/// Non-minimal edges are kept; call [`Hypergraph::minimal_antichain`] to drop
/// them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    ground: GroundSet,
    edges: Vec<Subset>,
}

impl Hypergraph {
    /// Validates and canonicalizes an edge list over `{0, .., n-1}`.
    pub fn new<I: IntoIterator<Item = Subset>>(n: usize, edges: I) -> Result<Self> {
        let ground = GroundSet::new(n)?;
        let mut edges: Vec<Subset> = edges.into_iter().collect();
        if let Some(&bad) = edges.iter().find(|e| !ground.contains(**e)) {
            return Err(Error::EdgeOutOfRange {
                edge: bad,
                element: bad.span() - 1,
                n,
            });
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Hypergraph { ground, edges })
    }

    pub fn from_lists(n: usize, edges: &[&[usize]]) -> Result<Self> {
        // element indices >= 64 cannot be represented at all
        for list in edges {
            if let Some(&e) = list.iter().find(|&&e| e >= n) {
                return Err(Error::EdgeOutOfRange {
                    edge: Subset::from_elements(list.iter().copied().filter(|&x| x < 64)),
                    element: e,
                    n,
                });
            }
        }
        Hypergraph::new(n, edges.iter().map(|l| l.iter().copied().collect()))
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.size()
    }

    pub fn edges(&self) -> &[Subset] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Maximum edge size, 0 without edges.
    pub fn ell_bound(&self) -> usize {
        self.edges.last().map_or(0, |e| e.len())
    }

    pub fn contains_edge(&self, s: Subset) -> bool {
        self.edges.binary_search(&s).is_ok()
    }

    pub fn edge_index(&self, s: Subset) -> Option<usize> {
        self.edges.binary_search(&s).ok()
    }

    pub fn has_empty_edge(&self) -> bool {
        self.edges.first() == Some(&Subset::EMPTY)
    }

    /// Whether `a` lies in the upset generated by the edges.
    pub fn in_upset(&self, a: Subset) -> bool {
        self.edges.iter().any(|e| e.is_subset_of(a))
    }

    /// Some edge contained in `a`, if any.
    pub fn edge_inside(&self, a: Subset) -> Option<Subset> {
        self.edges.iter().copied().find(|e| e.is_subset_of(a))
    }

    /// Keeps only the inclusion-minimal edges. The generated upset is unchanged.
    pub fn minimal_antichain(&self) -> Hypergraph {
        // canonical order lists smaller sets first, so every potential
        // subset of an edge has already been decided
        let mut minimal: Vec<Subset> = Vec::new();
        for &e in &self.edges {
            if !minimal.iter().any(|m| m.is_subset_of(e)) {
                minimal.push(e);
            }
        }
        Hypergraph {
            ground: self.ground,
            edges: minimal,
        }
    }

    /// `ℓ(⟨H⟩)`: the size of a largest inclusion-minimal edge.
    pub fn largest_minimal_element(&self) -> Result<usize> {
        if self.edges.is_empty() {
            return Err(Error::NoEdges);
        }
        Ok(self.minimal_antichain().ell_bound())
    }

    /// Same edges on a larger ground set.
    pub fn with_ground(&self, n: usize) -> Result<Hypergraph> {
        Hypergraph::new(n, self.edges.iter().copied())
    }
}

/// Plain `{ n, edges }` form used for (de)serialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphDoc {
    pub n: usize,
    pub edges: Vec<Subset>,
}

impl From<&Hypergraph> for HypergraphDoc {
    fn from(h: &Hypergraph) -> Self {
        HypergraphDoc {
            n: h.n(),
            edges: h.edges.clone(),
        }
    }
}

impl TryFrom<HypergraphDoc> for Hypergraph {
    type Error = Error;

    fn try_from(doc: HypergraphDoc) -> Result<Self> {
        Hypergraph::new(doc.n, doc.edges)
    }
}

impl Serialize for Hypergraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HypergraphDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hypergraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = HypergraphDoc::deserialize(d)?;
        Hypergraph::try_from(doc).map_err(serde::de::Error::custom)
    }
}
