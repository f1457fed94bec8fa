//! Safety-score network Voronoi diagram.
//!
//! Every vertex is labelled with the POI that has its unconstrained safest
//! path. An edge whose endpoints carry different labels is split at the point
//! where the two signatures balance; that point is a border shared by both
//! cells. Split points stay virtual: they are identified by their edge and
//! offset and never become graph vertices.
//!
//! All lengths inside the diagram are doubled so every split offset is an
//! integer.

mod cell;
mod labels;
mod query;
mod update;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{EdgeKey, RoadGraph, VertexId};
use crate::par;
use crate::persist;
use crate::safety::{PathCost, SafetySignature};

pub use cell::{CellArc, VoronoiCell};
pub use labels::Label;
pub use query::{UsnStream, Usn, SNVD_RULES};
pub use update::SnvdChange;

/// Factor applied to every length inside the diagram.
pub const SCALE: u64 = 2;

const MAGIC: &[u8; 8] = b"KSNN-VD ";

/// How an edge is shared between cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeCell {
    Whole(VertexId),
    /// Split at `at` scaled units from the lower endpoint `u`; the part next
    /// to `u` belongs to `u_gen`, the rest to `v_gen`.
    Split { at: u64, u_gen: VertexId, v_gen: VertexId },
}

impl EdgeCell {
    /// Cell of the part of the edge touching `x`.
    pub fn side(&self, key: EdgeKey, x: VertexId) -> VertexId {
        match *self {
            EdgeCell::Whole(g) => g,
            EdgeCell::Split { u_gen, v_gen, .. } => {
                if x == key.u {
                    u_gen
                } else {
                    v_gen
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BorderPoint {
    Vertex(VertexId),
    Split(EdgeKey),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snvd {
    labels: Vec<Option<Label>>,
    edge_cells: HashMap<EdgeKey, EdgeCell>,
    cells: BTreeMap<VertexId, VoronoiCell>,
    /// Cells each border point belongs to, ascending.
    border_cells: HashMap<BorderPoint, Vec<VertexId>>,
}

/// Level that decides where a mixed-label edge of score `ess` splits, given
/// the scaled unconstrained signatures of its two endpoints. `Ok(None)` when
/// the signatures are identical, so the endpoints themselves tie. Levels
/// below `ess` must already agree: the split can only move length on level
/// `ess`.
pub fn deciding_level(a: &SafetySignature, b: &SafetySignature, ess: u32) -> Result<Option<u32>> {
    if a == b {
        return Ok(None);
    }
    let below = ess as usize - 1;
    if let Some(l) = (0..below).find(|&l| a.levels()[l] != b.levels()[l]) {
        return domain(format!("signatures differ on level {} below the edge score {ess}", l + 1));
    }
    Ok(Some(ess))
}

/// Offset from the `a` endpoint of the balance point on an edge of scaled
/// length `len`: `(len + b[s] - a[s]) / 2`, clamped to the edge.
pub fn split_offset(a: &SafetySignature, b: &SafetySignature, len: u64, s: u32) -> u64 {
    let (da, db) = (a.levels()[s as usize - 1] as i128, b.levels()[s as usize - 1] as i128);
    let at = (len as i128 + db - da) / 2;
    at.clamp(0, len as i128) as u64
}

impl Snvd {
    pub fn build(graph: &RoadGraph) -> Result<Snvd> {
        if graph.pois().is_empty() {
            return domain("the diagram needs at least one POI");
        }
        let labels = labels::compute(graph);
        let mut edge_cells = HashMap::new();
        for e in graph.edges() {
            if let Some(c) = labels::edge_cell(graph, &labels, e.key())? {
                edge_cells.insert(e.key(), c);
            }
        }
        let mut d = Snvd { labels, edge_cells, cells: BTreeMap::new(), border_cells: HashMap::new() };
        let gens: Vec<VertexId> = graph.pois().to_vec();
        d.rebuild_cells(graph, &gens);
        Ok(d)
    }

    /// Recomputes the given cells from labels and edge assignments, then the
    /// border index and adjacency of every cell.
    fn rebuild_cells(&mut self, graph: &RoadGraph, gens: &[VertexId]) {
        let mut members: HashMap<VertexId, Vec<VertexId>> = gens.iter().map(|&g| (g, Vec::new())).collect();
        for (v, l) in self.labels.iter().enumerate() {
            if let Some(l) = l {
                if let Some(m) = members.get_mut(&l.gen) {
                    m.push(v as VertexId);
                }
            }
        }
        let mut borders: HashMap<VertexId, Vec<BorderPoint>> = gens.iter().map(|&g| (g, Vec::new())).collect();
        for (&key, &ec) in &self.edge_cells {
            if let EdgeCell::Split { u_gen, v_gen, .. } = ec {
                for g in [u_gen, v_gen] {
                    if let Some(b) = borders.get_mut(&g) {
                        b.push(BorderPoint::Split(key));
                    }
                }
            }
        }
        for v in 0..graph.vertex_count() as VertexId {
            let cs = self.vertex_cells(graph, v);
            if cs.len() >= 2 {
                for g in cs {
                    if let Some(b) = borders.get_mut(&g) {
                        b.push(BorderPoint::Vertex(v));
                    }
                }
            }
        }
        let inputs: Vec<(VertexId, Vec<VertexId>, Vec<BorderPoint>)> = gens
            .iter()
            .map(|g| {
                let mut b = borders.remove(g).unwrap_or_default();
                b.sort_unstable();
                (*g, members.remove(g).unwrap_or_default(), b)
            })
            .collect();
        let built = par::map_any(&inputs, |(g, m, b)| cell::build_cell(self, graph, *g, m.clone(), b.clone()));
        for c in built {
            self.cells.insert(c.generator, c);
        }
        self.cells.retain(|g, _| graph.is_poi(*g));
        self.refresh_border_index();
    }

    fn refresh_border_index(&mut self) {
        let mut bc: HashMap<BorderPoint, Vec<VertexId>> = HashMap::new();
        for c in self.cells.values() {
            for &b in &c.borders {
                bc.entry(b).or_default().push(c.generator);
            }
        }
        for v in bc.values_mut() {
            v.sort_unstable();
        }
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for gs in bc.values() {
            for &a in gs {
                for &b in gs {
                    if a != b {
                        adj.entry(a).or_default().push(b);
                    }
                }
            }
        }
        for (g, c) in self.cells.iter_mut() {
            let mut a = adj.remove(g).unwrap_or_default();
            a.sort_unstable();
            a.dedup();
            c.adjacent = a;
        }
        self.border_cells = bc;
    }

    pub fn label(&self, v: VertexId) -> Option<&Label> {
        self.labels[v as usize].as_ref()
    }

    /// Generator of the cell a vertex belongs to.
    pub fn locate(&self, v: VertexId) -> Option<VertexId> {
        self.label(v).map(|l| l.gen)
    }

    pub fn edge_cell(&self, key: EdgeKey) -> Option<EdgeCell> {
        self.edge_cells.get(&key).copied()
    }

    pub fn cells(&self) -> impl Iterator<Item = &VoronoiCell> {
        self.cells.values()
    }

    pub fn cell(&self, gen: VertexId) -> Option<&VoronoiCell> {
        self.cells.get(&gen)
    }

    /// Cells whose edges touch `v`, plus the cell of its own label, ascending.
    pub fn vertex_cells(&self, graph: &RoadGraph, v: VertexId) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self.label(v).map(|l| l.gen).into_iter().collect();
        for inc in graph.neighbors(v) {
            let key = EdgeKey::new(v, inc.to);
            if let Some(ec) = self.edge_cells.get(&key) {
                out.push(ec.side(key, v));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn border_cells(&self, b: BorderPoint) -> &[VertexId] {
        self.border_cells.get(&b).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn border_count(&self) -> usize {
        self.border_cells.len()
    }

    /// Border points per original vertex.
    pub fn border_fraction(&self, graph: &RoadGraph) -> f64 {
        self.border_count() as f64 / graph.vertex_count().max(1) as f64
    }

    /// Checks that every split point and every endpoint border sits where the
    /// signatures of its two cells balance up to the deciding level.
    pub fn check_border_balance(&self, graph: &RoadGraph) -> Result<()> {
        for e in graph.edges() {
            let key = e.key();
            let (Some(lu), Some(lv)) = (self.label(e.u), self.label(e.v)) else { continue };
            if lu.gen == lv.gen {
                continue;
            }
            let len = e.length as u64 * SCALE;
            let s = e.ess as usize;
            let (a, b) = match self.edge_cells[&key] {
                EdgeCell::Split { at, .. } => {
                    (lu.cost.sig.with_edge(e.ess, at), lv.cost.sig.with_edge(e.ess, len - at))
                }
                EdgeCell::Whole(g) if g == lv.gen => (lu.cost.sig.clone(), lv.cost.sig.with_edge(e.ess, len)),
                EdgeCell::Whole(_) => (lu.cost.sig.with_edge(e.ess, len), lv.cost.sig.clone()),
            };
            if a.levels()[..s] != b.levels()[..s] {
                return Err(Error::Index(format!(
                    "border on edge ({}, {}) is unbalanced: {a} vs {b}",
                    e.u, e.v
                )));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path, graph: &RoadGraph) -> Result<()> {
        persist::save(path, MAGIC, &graph.content_hash(), &(SCALE, self))
    }

    pub fn load(path: &Path, graph: &RoadGraph) -> Result<Snvd> {
        let (scale, d): (u64, Snvd) = persist::load(path, MAGIC, &graph.content_hash())?;
        if scale != SCALE {
            return Err(Error::Index(format!("index uses length scale {scale}, expected {SCALE}")));
        }
        Ok(d)
    }

    pub fn is_index_file(path: &Path) -> Result<bool> {
        Ok(&persist::peek_magic(path)? == MAGIC)
    }
}

pub(crate) fn unscale(cost: &PathCost) -> PathCost {
    PathCost { sig: cost.sig.unscaled(SCALE), tie: cost.tie }
}
