use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{RoadGraph, VertexId};
use crate::safety::{pss, PathCost, Pss, SafetySignature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub source: VertexId,
    pub k: usize,
    pub d_c: u64,
}

impl QuerySpec {
    pub fn new(source: VertexId, k: usize, d_c: u64) -> Self {
        QuerySpec { source, k, d_c }
    }

    pub fn validate(&self, graph: &RoadGraph) -> Result<()> {
        if !graph.contains_vertex(self.source) {
            return domain(format!("source {} is not a vertex", self.source));
        }
        if self.k == 0 {
            return domain("k must be at least 1");
        }
        if self.d_c <= 1 {
            return domain(format!("d_c must exceed 1, got {}", self.d_c));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnswerEntry {
    pub poi: VertexId,
    pub path: Vec<VertexId>,
    pub length: u64,
    pub signature: SafetySignature,
    pub tie: u128,
    pub pss: Pss,
}

/// Ranked kSNN result, safest first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Answer {
    pub entries: Vec<AnswerEntry>,
}

impl Answer {
    /// Ranks candidate `(poi, cost, path)` triples by cost then POI id and
    /// keeps the best `k`. Each POI must appear at most once.
    pub(crate) fn from_candidates(
        mut cands: Vec<(VertexId, PathCost, Vec<VertexId>)>,
        k: usize,
        d_c: u64,
    ) -> Result<Answer> {
        cands.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        cands.truncate(k);
        let entries = cands
            .into_iter()
            .map(|(poi, cost, path)| {
                Ok(AnswerEntry {
                    poi,
                    length: cost.length(),
                    pss: pss(&cost.sig, d_c)?,
                    signature: cost.sig,
                    tie: cost.tie,
                    path,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Answer { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pois(&self) -> Vec<VertexId> {
        self.entries.iter().map(|e| e.poi).collect()
    }

    /// Text form used by the CLI; identical answers render identically.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, e) in self.entries.iter().enumerate() {
            let path: Vec<String> = e.path.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(
                s,
                "{}\tpoi={}\tlength={}\tpss={}\tpss_decimal={:.6e}\tsignature={}\tpath={}",
                i + 1,
                e.poi,
                e.length,
                e.pss,
                e.pss.to_f64(),
                e.signature,
                path.join("-")
            );
        }
        s
    }
}

/// Work counters reported by every engine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Distinct vertices reached by any explored path.
    pub vertices_accessed: u64,
    /// Paths admitted to a priority queue or label set.
    pub valid_paths_explored: u64,
    /// Independent single-target searches; only the Euclidean baseline runs them.
    pub candidate_searches: u64,
}

#[derive(Clone, Debug)]
pub struct QueryOutput {
    pub answer: Answer,
    pub counters: Counters,
}

/// Set of enabled pruning rules, numbered 1 to 7.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rules(u8);

impl Rules {
    pub const fn all() -> Self {
        Rules(0x7f)
    }

    pub const fn none() -> Self {
        Rules(0)
    }

    pub fn only(rules: &[u8]) -> Self {
        rules.iter().fold(Rules::none(), |r, &n| r.with(n, true))
    }

    pub fn with(self, rule: u8, on: bool) -> Self {
        assert!((1..=7).contains(&rule), "pruning rules are numbered 1 to 7");
        let bit = 1u8 << (rule - 1);
        Rules(if on { self.0 | bit } else { self.0 & !bit })
    }

    pub fn enabled(self, rule: u8) -> bool {
        (1..=7).contains(&rule) && self.0 & (1 << (rule - 1)) != 0
    }

    /// Restricts to the rules in `applicable`.
    pub fn restrict(self, applicable: &[u8]) -> Self {
        Rules::only(&applicable.iter().copied().filter(|&r| self.enabled(r)).collect::<Vec<_>>())
    }

    /// Every subset of `applicable`.
    pub fn subsets(applicable: &[u8]) -> Vec<Rules> {
        (0..1u32 << applicable.len())
            .map(|mask| {
                let on: Vec<u8> = applicable
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &r)| r)
                    .collect();
                Rules::only(&on)
            })
            .collect()
    }

    pub fn parse(s: &str) -> Result<Rules> {
        match s.trim() {
            "all" => return Ok(Rules::all()),
            "none" => return Ok(Rules::none()),
            _ => {}
        }
        let mut r = Rules::none();
        for part in s.split([',', '+']) {
            let part = part.trim().trim_start_matches(['R', 'r']);
            let n: u8 = part
                .parse()
                .ok()
                .filter(|n| (1..=7).contains(n))
                .ok_or_else(|| Error::Config(format!("bad pruning rule list {s:?}")))?;
            r = r.with(n, true);
        }
        Ok(r)
    }
}

impl fmt::Display for Rules {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let on: Vec<String> = (1..=7u8).filter(|&r| self.enabled(r)).map(|r| format!("R{r}")).collect();
        if on.is_empty() {
            write!(f, "none")
        } else {
            write!(f, "{}", on.join("+"))
        }
    }
}

impl fmt::Debug for Rules {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Per-query knobs shared by all engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub rules: Rules,
    /// Abort once this many paths have been admitted.
    pub max_paths: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { rules: Rules::all(), max_paths: None }
    }
}

impl SearchOptions {
    pub fn with_rules(rules: Rules) -> Self {
        SearchOptions { rules, ..Default::default() }
    }
}

/// Distinct-vertex and admitted-path bookkeeping for one query.
pub(crate) struct Tally {
    seen: Vec<bool>,
    pub counters: Counters,
    max_paths: Option<u64>,
}

impl Tally {
    pub fn new(vertex_count: usize, max_paths: Option<u64>) -> Self {
        Tally { seen: vec![false; vertex_count], counters: Counters::default(), max_paths }
    }

    pub fn touch(&mut self, v: VertexId) {
        let s = &mut self.seen[v as usize];
        if !*s {
            *s = true;
            self.counters.vertices_accessed += 1;
        }
    }

    /// Counts a path ending at `v` without checking the budget.
    pub fn note(&mut self, v: VertexId) {
        self.touch(v);
        self.counters.valid_paths_explored += 1;
    }

    /// Records an admitted path ending at `v`.
    pub fn admit(&mut self, v: VertexId) -> Result<()> {
        self.touch(v);
        self.counters.valid_paths_explored += 1;
        match self.max_paths {
            Some(m) if self.counters.valid_paths_explored > m => Err(Error::Budget(m)),
            _ => Ok(()),
        }
    }
}
