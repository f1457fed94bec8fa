use super::{CtTree, NodeId};
use crate::error::Result;
use crate::graph::{Edge, RoadGraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeChange {
    Add(Edge),
    Remove { u: VertexId, v: VertexId },
    SetEss { u: VertexId, v: VertexId, ess: u32 },
}

impl EdgeChange {
    pub fn endpoints(&self) -> (VertexId, VertexId) {
        match *self {
            EdgeChange::Add(e) => (e.u, e.v),
            EdgeChange::Remove { u, v } | EdgeChange::SetEss { u, v, .. } => (u, v),
        }
    }

    /// Applies the change to `graph`.
    pub fn apply(&self, graph: &mut RoadGraph) -> Result<()> {
        match *self {
            EdgeChange::Add(e) => graph.add_edge(e),
            EdgeChange::Remove { u, v } => graph.remove_edge(u, v).map(|_| ()),
            EdgeChange::SetEss { u, v, ess } => graph.set_ess(u, v, ess).map(|_| ()),
        }
    }
}

impl CtTree {
    /// Applies an edge change to `graph` and repairs the tree. Every node
    /// whose child partition changed gets its subtree rebuilt; metadata is
    /// refreshed on the chains of both endpoints.
    pub fn update_edge(&mut self, graph: &mut RoadGraph, change: EdgeChange) -> Result<()> {
        change.apply(graph)?;
        let (x, y) = change.endpoints();
        let mut rebuilt: Vec<NodeId> = Vec::new();
        let mut work = vec![self.root];
        while let Some(id) = work.pop() {
            let n = self.node(id);
            let fresh = self.split(graph, &n.vertices, n.floor);
            let same = match &fresh {
                None => n.children.is_empty(),
                Some((floor, comps)) => {
                    comps.len() == n.children.len()
                        && n.children.iter().zip(comps).all(|(&c, comp)| {
                            let c = self.node(c);
                            c.floor == *floor && &c.vertices == comp
                        })
                }
            };
            if same {
                for &c in &n.children {
                    let c = self.node(c);
                    if c.contains(x) || c.contains(y) {
                        work.push(c.id);
                    }
                }
                continue;
            }
            self.drop_descendants(id);
            let depth = self.node(id).depth;
            if let Some((floor, comps)) = fresh {
                for comp in comps {
                    let created = self.build_subtree(graph, comp, floor, Some(id), depth + 1);
                    rebuilt.extend(created);
                }
            }
            self.refresh_locators(graph, id);
        }
        let mut chain: Vec<NodeId> = self.locator(x).iter().chain(self.locator(y)).copied().collect();
        chain.extend(rebuilt);
        chain.sort_unstable();
        chain.dedup();
        self.refresh_metadata(graph, &chain);
        self.refresh_border_depth(graph, x);
        self.refresh_border_depth(graph, y);
        Ok(())
    }

    fn drop_descendants(&mut self, id: NodeId) {
        let mut stack = std::mem::take(&mut self.node_mut(id).children);
        while let Some(c) = stack.pop() {
            let n = self.nodes[c as usize].take().expect("live node id");
            stack.extend(n.children);
            self.free.push(c);
        }
    }

    /// Adds or removes a POI in `graph` and refreshes POI counts and POI
    /// distances along its chain.
    pub fn update_poi(&mut self, graph: &mut RoadGraph, v: VertexId, add: bool) -> Result<()> {
        if add {
            graph.add_poi(v)?;
        } else {
            graph.remove_poi(v)?;
        }
        let chain = self.locator(v).to_vec();
        self.refresh_poi_metadata(graph, &chain);
        Ok(())
    }
}
