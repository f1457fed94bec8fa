//! Exhaustive reference answers for small graphs. Shares only the graph model
//! and score arithmetic with the engines.

use crate::error::{Error, Result};
use crate::graph::{edge_tie, EdgeKey, RoadGraph, VertexId};
use crate::query::{Answer, QuerySpec};
use crate::safety::{PathCost, SafetySignature};

pub const DEFAULT_VERTEX_CAP: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidPath {
    pub target: VertexId,
    pub vertices: Vec<VertexId>,
    pub signature: SafetySignature,
    pub tie: u128,
    pub length: u64,
}

pub fn enumerate_valid_paths(graph: &RoadGraph, v_l: VertexId, d_c: u64) -> Result<Vec<ValidPath>> {
    enumerate_valid_paths_capped(graph, v_l, d_c, DEFAULT_VERTEX_CAP)
}

/// Every simple path from `v_l` shorter than `d_c`, including the empty path.
pub fn enumerate_valid_paths_capped(
    graph: &RoadGraph,
    v_l: VertexId,
    d_c: u64,
    cap: usize,
) -> Result<Vec<ValidPath>> {
    if graph.vertex_count() > cap {
        return Err(Error::OracleCap { vertices: graph.vertex_count(), cap });
    }
    if !graph.contains_vertex(v_l) {
        return Err(Error::Domain(format!("source {v_l} is not a vertex")));
    }
    let mut out = Vec::new();
    let mut stack = vec![v_l];
    let mut on_path = vec![false; graph.vertex_count()];
    on_path[v_l as usize] = true;
    let mut levels = vec![0u64; graph.s_max() as usize];
    dfs(graph, d_c, &mut stack, &mut on_path, &mut levels, 0, &mut out);
    Ok(out)
}

fn dfs(
    graph: &RoadGraph,
    d_c: u64,
    stack: &mut Vec<VertexId>,
    on_path: &mut [bool],
    levels: &mut [u64],
    tie: u128,
    out: &mut Vec<ValidPath>,
) {
    let length: u64 = levels.iter().sum();
    out.push(ValidPath {
        target: *stack.last().unwrap(),
        vertices: stack.clone(),
        signature: SafetySignature::from_levels(levels.to_vec()),
        tie,
        length,
    });
    let tail = *stack.last().unwrap();
    for inc in graph.neighbors(tail) {
        if on_path[inc.to as usize] || length + inc.length as u64 >= d_c {
            continue;
        }
        on_path[inc.to as usize] = true;
        stack.push(inc.to);
        levels[inc.ess as usize - 1] += inc.length as u64;
        let t = tie + edge_tie(EdgeKey::new(tail, inc.to)) as u128;
        dfs(graph, d_c, stack, on_path, levels, t, out);
        levels[inc.ess as usize - 1] -= inc.length as u64;
        stack.pop();
        on_path[inc.to as usize] = false;
    }
}

/// Best valid path per reachable POI, ranked safest first.
pub fn ranked_pois(graph: &RoadGraph, v_l: VertexId, d_c: u64) -> Result<Vec<ValidPath>> {
    let mut best: Vec<Option<ValidPath>> = vec![None; graph.vertex_count()];
    for p in enumerate_valid_paths(graph, v_l, d_c)? {
        if !graph.is_poi(p.target) {
            continue;
        }
        let slot = &mut best[p.target as usize];
        let better = match slot {
            None => true,
            Some(b) => (&p.signature, p.tie, &p.vertices) < (&b.signature, b.tie, &b.vertices),
        };
        if better {
            *slot = Some(p);
        }
    }
    let mut ranked: Vec<ValidPath> = best.into_iter().flatten().collect();
    ranked.sort_by(|a, b| {
        (&a.signature, a.tie, a.target).cmp(&(&b.signature, b.tie, b.target))
    });
    Ok(ranked)
}

pub fn brute_ksnn(graph: &RoadGraph, q: &QuerySpec) -> Result<Answer> {
    q.validate(graph)?;
    let cands = ranked_pois(graph, q.source, q.d_c)?
        .into_iter()
        .map(|p| (p.target, PathCost { sig: p.signature, tie: p.tie }, p.vertices))
        .collect();
    Answer::from_candidates(cands, q.k, q.d_c)
}

/// POIs ordered by their unconstrained safest path from `v_l`.
pub fn unconstrained_ranking(graph: &RoadGraph, v_l: VertexId) -> Result<Vec<ValidPath>> {
    ranked_pois(graph, v_l, graph.total_length() + 1)
}
