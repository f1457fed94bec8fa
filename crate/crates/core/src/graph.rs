//! Road network model: an undirected graph with integer lengths and edge
//! safety scores, plus the POI set and an optional planar embedding.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{domain, Result};

pub type VertexId = u32;

/// Canonical undirected edge identity, always stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeKey {
    pub u: VertexId,
    pub v: VertexId,
}

impl EdgeKey {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a < b {
            EdgeKey { u: a, v: b }
        } else {
            EdgeKey { u: b, v: a }
        }
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub length: u32,
    pub ess: u32,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, length: u32, ess: u32) -> Self {
        let k = EdgeKey::new(u, v);
        Edge { u: k.u, v: k.v, length, ess }
    }

    pub fn key(&self) -> EdgeKey {
        EdgeKey { u: self.u, v: self.v }
    }
}

/// One side of an undirected edge as seen from its other endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub to: VertexId,
    pub length: u32,
    pub ess: u32,
    /// Per-edge tie-break weight, see [`edge_tie`].
    pub tie: u64,
}

/// Deterministic 64-bit weight of an edge. Path tie-break values are sums of
/// these, so two distinct simple paths with equal signatures are ordered by a
/// quantity that is additive under concatenation.
pub fn edge_tie(key: EdgeKey) -> u64 {
    let mut z = ((key.u as u64) << 32 | key.v as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoadGraph {
    s_max: u32,
    adj: Vec<Vec<Incidence>>,
    edge_count: usize,
    is_poi: Vec<bool>,
    pois: Vec<VertexId>,
    coords: Option<Vec<(f64, f64)>>,
}

impl RoadGraph {
    pub fn new(vertex_count: usize, s_max: u32) -> Result<Self> {
        if s_max == 0 {
            return domain("s_max must be positive");
        }
        if vertex_count > u32::MAX as usize {
            return domain("too many vertices");
        }
        Ok(RoadGraph {
            s_max,
            adj: vec![Vec::new(); vertex_count],
            edge_count: 0,
            is_poi: vec![false; vertex_count],
            pois: Vec::new(),
            coords: None,
        })
    }

    pub fn from_edges(
        vertex_count: usize,
        s_max: u32,
        edges: impl IntoIterator<Item = Edge>,
        pois: impl IntoIterator<Item = VertexId>,
    ) -> Result<Self> {
        let mut g = RoadGraph::new(vertex_count, s_max)?;
        for e in edges {
            g.add_edge(e)?;
        }
        for p in pois {
            g.add_poi(p)?;
        }
        Ok(g)
    }

    pub fn s_max(&self) -> u32 {
        self.s_max
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        (v as usize) < self.adj.len()
    }

    pub fn neighbors(&self, v: VertexId) -> &[Incidence] {
        &self.adj[v as usize]
    }

    pub fn edge(&self, a: VertexId, b: VertexId) -> Option<Edge> {
        let row = self.adj.get(a as usize)?;
        let i = row.binary_search_by_key(&b, |x| x.to).ok()?;
        Some(Edge::new(a, b, row[i].length, row[i].ess))
    }

    /// All edges in canonical `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, row)| {
            let u = u as VertexId;
            row.iter()
                .filter(move |x| x.to > u)
                .map(move |x| Edge { u, v: x.to, length: x.length, ess: x.ess })
        })
    }

    pub fn total_length(&self) -> u64 {
        self.edges().map(|e| e.length as u64).sum()
    }

    fn check_edge(&self, e: &Edge) -> Result<()> {
        if !self.contains_vertex(e.u) || !self.contains_vertex(e.v) {
            return domain(format!("edge ({}, {}) references a missing vertex", e.u, e.v));
        }
        if e.u == e.v {
            return domain(format!("self-loop at vertex {}", e.u));
        }
        if e.length < 1 {
            return domain(format!("edge ({}, {}) has length 0", e.u, e.v));
        }
        if e.ess < 1 || e.ess > self.s_max {
            return domain(format!(
                "edge ({}, {}) has ess {} outside [1, {}]",
                e.u, e.v, e.ess, self.s_max
            ));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, e: Edge) -> Result<()> {
        let e = Edge::new(e.u, e.v, e.length, e.ess);
        self.check_edge(&e)?;
        let tie = edge_tie(e.key());
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            let row = &mut self.adj[a as usize];
            match row.binary_search_by_key(&b, |x| x.to) {
                Ok(_) => return domain(format!("duplicate edge ({}, {})", e.u, e.v)),
                Err(i) => row.insert(i, Incidence { to: b, length: e.length, ess: e.ess, tie }),
            }
        }
        self.edge_count += 1;
        Ok(())
    }

    pub fn remove_edge(&mut self, a: VertexId, b: VertexId) -> Result<Edge> {
        let Some(e) = self.edge(a, b) else {
            return domain(format!("unknown edge ({a}, {b})"));
        };
        for (x, y) in [(e.u, e.v), (e.v, e.u)] {
            let row = &mut self.adj[x as usize];
            let i = row.binary_search_by_key(&y, |z| z.to).expect("symmetric adjacency");
            row.remove(i);
        }
        self.edge_count -= 1;
        Ok(e)
    }

    /// Changes an edge's safety score and returns the previous one.
    pub fn set_ess(&mut self, a: VertexId, b: VertexId, ess: u32) -> Result<u32> {
        let Some(e) = self.edge(a, b) else {
            return domain(format!("unknown edge ({a}, {b})"));
        };
        self.check_edge(&Edge { ess, ..e })?;
        for (x, y) in [(e.u, e.v), (e.v, e.u)] {
            let row = &mut self.adj[x as usize];
            let i = row.binary_search_by_key(&y, |z| z.to).expect("symmetric adjacency");
            row[i].ess = ess;
        }
        Ok(e.ess)
    }

    pub fn is_poi(&self, v: VertexId) -> bool {
        self.is_poi.get(v as usize).copied().unwrap_or(false)
    }

    /// POIs in ascending vertex order.
    pub fn pois(&self) -> &[VertexId] {
        &self.pois
    }

    pub fn add_poi(&mut self, v: VertexId) -> Result<()> {
        if !self.contains_vertex(v) {
            return domain(format!("POI {v} is not a vertex"));
        }
        if self.is_poi[v as usize] {
            return domain(format!("vertex {v} is already a POI"));
        }
        self.is_poi[v as usize] = true;
        let i = self.pois.binary_search(&v).unwrap_err();
        self.pois.insert(i, v);
        Ok(())
    }

    pub fn remove_poi(&mut self, v: VertexId) -> Result<()> {
        if !self.is_poi(v) {
            return domain(format!("vertex {v} is not a POI"));
        }
        self.is_poi[v as usize] = false;
        let i = self.pois.binary_search(&v).expect("poi list in sync");
        self.pois.remove(i);
        Ok(())
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn set_coords(&mut self, coords: Vec<(f64, f64)>) -> Result<()> {
        if coords.len() != self.vertex_count() {
            return domain(format!(
                "{} coordinates for {} vertices",
                coords.len(),
                self.vertex_count()
            ));
        }
        self.coords = Some(coords);
        Ok(())
    }

    pub fn clear_coords(&mut self) {
        self.coords = None;
    }

    /// Smallest ESS over the edges incident to `v`, or `None` for an isolated vertex.
    pub fn min_incident_ess(&self, v: VertexId) -> Option<u32> {
        self.adj[v as usize].iter().map(|x| x.ess).min()
    }

    /// Checks that the straight-line distance between the endpoints of every
    /// edge does not exceed its length, so Euclidean distance lower-bounds
    /// network distance.
    pub fn check_embedding(&self) -> Result<()> {
        let Some(c) = &self.coords else {
            return domain("graph has no coordinates");
        };
        for e in self.edges() {
            let (a, b) = (c[e.u as usize], c[e.v as usize]);
            let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
            if d > e.length as f64 * (1.0 + 1e-9) {
                return domain(format!(
                    "edge ({}, {}) has length {} below its straight-line distance {:.3}",
                    e.u, e.v, e.length, d
                ));
            }
        }
        Ok(())
    }

    /// SHA-256 over vertex count, s_max, edges and POIs. Indexes record it so a
    /// persisted index is never paired with a different graph.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.vertex_count() as u64).to_le_bytes());
        h.update(self.s_max.to_le_bytes());
        for e in self.edges() {
            h.update(e.u.to_le_bytes());
            h.update(e.v.to_le_bytes());
            h.update(e.length.to_le_bytes());
            h.update(e.ess.to_le_bytes());
        }
        h.update(b"pois");
        for p in &self.pois {
            h.update(p.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_are_canonical_and_symmetric() {
        let g = RoadGraph::from_edges(3, 4, [Edge::new(2, 0, 5, 3), Edge::new(1, 2, 1, 4)], [])
            .unwrap();
        let es: Vec<Edge> = g.edges().collect();
        assert_eq!(es, vec![Edge::new(0, 2, 5, 3), Edge::new(1, 2, 1, 4)]);
        assert_eq!(g.edge(2, 0), g.edge(0, 2));
        assert_eq!(g.min_incident_ess(2), Some(3));
    }

    #[test]
    fn rejects_invalid_edges() {
        let mut g = RoadGraph::new(3, 4).unwrap();
        assert!(g.add_edge(Edge::new(0, 1, 0, 1)).is_err());
        assert!(g.add_edge(Edge::new(0, 1, 1, 0)).is_err());
        assert!(g.add_edge(Edge::new(0, 1, 1, 5)).is_err());
        assert!(g.add_edge(Edge::new(0, 3, 1, 1)).is_err());
        assert!(g.add_edge(Edge::new(1, 1, 1, 1)).is_err());
        g.add_edge(Edge::new(0, 1, 1, 1)).unwrap();
        assert!(g.add_edge(Edge::new(1, 0, 2, 2)).is_err());
    }

    #[test]
    fn mutation_round_trip() {
        let mut g = RoadGraph::from_edges(3, 4, [Edge::new(0, 1, 2, 2)], [1]).unwrap();
        let h = g.content_hash();
        assert_eq!(g.set_ess(1, 0, 3).unwrap(), 2);
        assert_ne!(g.content_hash(), h);
        g.set_ess(0, 1, 2).unwrap();
        assert_eq!(g.content_hash(), h);
        g.remove_edge(1, 0).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(g.remove_edge(0, 1).is_err());
        assert!(g.add_poi(1).is_err());
        g.remove_poi(1).unwrap();
        assert!(g.remove_poi(1).is_err());
    }
}
