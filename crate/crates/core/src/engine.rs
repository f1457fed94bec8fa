//! Uniform access to the four kSNN engines and their indexes.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::ct::CtTree;
use crate::error::{Error, Result};
use crate::graph::RoadGraph;
use crate::ine::ine_ksnn_with;
use crate::par::{self, Parallelism};
use crate::query::{QueryOutput, QuerySpec, SearchOptions};
use crate::rtree::{rtree_ksnn_with, PoiSpatialIndex};
use crate::snvd::Snvd;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EngineKind {
    Ine,
    Ct,
    Snvd,
    Rtree,
}

impl EngineKind {
    pub const ALL: [EngineKind; 4] = [EngineKind::Ine, EngineKind::Ct, EngineKind::Snvd, EngineKind::Rtree];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Ine => "ine",
            EngineKind::Ct => "ct",
            EngineKind::Snvd => "snvd",
            EngineKind::Rtree => "rtree",
        }
    }

    /// Pruning rules the engine understands.
    pub fn rules(self) -> &'static [u8] {
        match self {
            EngineKind::Ine => &crate::ine::INE_RULES,
            EngineKind::Ct => &crate::ct::CT_RULES,
            EngineKind::Snvd => &crate::snvd::SNVD_RULES,
            EngineKind::Rtree => &[],
        }
    }

    pub fn needs_index(self) -> bool {
        self != EngineKind::Ine
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ine" => Ok(EngineKind::Ine),
            "ct" | "ct-tree" => Ok(EngineKind::Ct),
            "snvd" => Ok(EngineKind::Snvd),
            "rtree" | "r-tree" => Ok(EngineKind::Rtree),
            _ => Err(Error::Config(format!("unknown engine {s:?}; expected ine, ct, snvd or rtree"))),
        }
    }
}

/// Indexes built or loaded for one graph.
#[derive(Clone, Debug, Default)]
pub struct Indexes {
    pub ct: Option<CtTree>,
    pub snvd: Option<Snvd>,
    pub rtree: Option<PoiSpatialIndex>,
}

impl Indexes {
    /// Builds whatever `kind` needs and is not present yet.
    pub fn ensure(&mut self, graph: &RoadGraph, kind: EngineKind, ct_height_cap: Option<u32>) -> Result<()> {
        match kind {
            EngineKind::Ine => {}
            EngineKind::Ct if self.ct.is_none() => self.ct = Some(CtTree::build(graph, ct_height_cap)?),
            EngineKind::Snvd if self.snvd.is_none() => self.snvd = Some(Snvd::build(graph)?),
            EngineKind::Rtree if self.rtree.is_none() => self.rtree = Some(PoiSpatialIndex::build(graph)?),
            _ => {}
        }
        Ok(())
    }

    pub fn build(graph: &RoadGraph, kinds: &[EngineKind], ct_height_cap: Option<u32>) -> Result<Indexes> {
        let mut idx = Indexes::default();
        for &k in kinds {
            idx.ensure(graph, k, ct_height_cap)?;
        }
        Ok(idx)
    }

    /// Loads an index file, detecting its kind from the file header.
    pub fn load_file(&mut self, path: &Path, graph: &RoadGraph) -> Result<EngineKind> {
        if !path.exists() {
            return Err(Error::MissingIndex(path.to_path_buf()));
        }
        if CtTree::is_index_file(path)? {
            self.ct = Some(CtTree::load(path, graph)?);
            Ok(EngineKind::Ct)
        } else if Snvd::is_index_file(path)? {
            self.snvd = Some(Snvd::load(path, graph)?);
            Ok(EngineKind::Snvd)
        } else if PoiSpatialIndex::is_index_file(path)? {
            self.rtree = Some(PoiSpatialIndex::load(path, graph)?);
            Ok(EngineKind::Rtree)
        } else {
            Err(Error::Index(format!("{} is not an index file", path.display())))
        }
    }

    fn missing(kind: EngineKind) -> Error {
        Error::Index(format!("engine {kind} needs a {kind} index"))
    }

    pub fn run(&self, kind: EngineKind, graph: &RoadGraph, q: &QuerySpec, opts: &SearchOptions) -> Result<QueryOutput> {
        match kind {
            EngineKind::Ine => ine_ksnn_with(graph, q, opts),
            EngineKind::Ct => self.ct.as_ref().ok_or_else(|| Self::missing(kind))?.ksnn_with(graph, q, opts),
            EngineKind::Snvd => self.snvd.as_ref().ok_or_else(|| Self::missing(kind))?.ksnn_with(graph, q, opts),
            EngineKind::Rtree => {
                rtree_ksnn_with(graph, self.rtree.as_ref().ok_or_else(|| Self::missing(kind))?, q, opts)
            }
        }
    }

    /// Runs `q` on two engines and fails unless the answers are identical.
    pub fn verify(
        &self,
        a: EngineKind,
        b: EngineKind,
        graph: &RoadGraph,
        q: &QuerySpec,
        opts: &SearchOptions,
    ) -> Result<(QueryOutput, QueryOutput)> {
        let (x, y) = (self.run(a, graph, q, opts)?, self.run(b, graph, q, opts)?);
        if x.answer != y.answer {
            return Err(Error::Index(format!(
                "engines {a} and {b} disagree on source {}:\n{a}:\n{}{b}:\n{}",
                q.source,
                x.answer.render(),
                y.answer.render()
            )));
        }
        Ok((x, y))
    }

    /// Answers a batch of queries, optionally spread over threads.
    pub fn run_batch(
        &self,
        kind: EngineKind,
        graph: &RoadGraph,
        queries: &[QuerySpec],
        opts: &SearchOptions,
        mode: Parallelism,
    ) -> Result<Vec<QueryOutput>> {
        par::map(mode, queries, |q| self.run(kind, graph, q, opts)).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in EngineKind::ALL {
            assert_eq!(k.name().parse::<EngineKind>().unwrap(), k);
        }
        assert!("dijkstra".parse::<EngineKind>().is_err());
    }

    #[test]
    fn missing_index_is_an_error() {
        let g = RoadGraph::from_edges(2, 1, [crate::graph::Edge::new(0, 1, 1, 1)], [1]).unwrap();
        let q = QuerySpec::new(0, 1, 5);
        let err = Indexes::default().run(EngineKind::Ct, &g, &q, &SearchOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Index(_)));
    }
}
