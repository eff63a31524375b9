//! Directed causal graphs over a signature's variables.

use std::collections::BTreeSet;

use crate::signature::VarId;

/// A directed graph with one node per signature variable, stored as sorted
/// parent lists per child. Acyclicity is not enforced here; model validation
/// rejects cyclic graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalGraph {
    parents: Vec<Vec<VarId>>,
}

impl CausalGraph {
    pub fn new(var_count: usize, edges: &[(VarId, VarId)]) -> CausalGraph {
        let mut parents = vec![Vec::new(); var_count];
        for &(from, to) in edges {
            parents[to.index()].push(from);
        }
        for list in &mut parents {
            list.sort();
            list.dedup();
        }
        CausalGraph { parents }
    }

    pub fn var_count(&self) -> usize {
        self.parents.len()
    }

    /// Parents of `child` in canonical (name) order.
    pub fn parents(&self, child: VarId) -> &[VarId] {
        &self.parents[child.index()]
    }

    pub fn edges(&self) -> Vec<(VarId, VarId)> {
        let mut out = Vec::new();
        for (child, list) in self.parents.iter().enumerate() {
            for &p in list {
                out.push((p, VarId(child as u32)));
            }
        }
        out.sort();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, from: VarId, to: VarId) -> bool {
        self.parents[to.index()].binary_search(&from).is_ok()
    }

    /// Kahn's algorithm. `Ok` holds every node in a topological order;
    /// `Err` holds the nodes of one cycle, in edge order.
    pub fn topological_order(&self) -> Result<Vec<VarId>, Vec<VarId>> {
        let n = self.parents.len();
        let mut remaining: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut children = vec![Vec::new(); n];
        for (child, list) in self.parents.iter().enumerate() {
            for &p in list {
                children[p.index()].push(VarId(child as u32));
            }
        }
        let mut ready: Vec<VarId> =
            (0..n).filter(|&i| remaining[i] == 0).map(|i| VarId(i as u32)).collect();
        ready.reverse();
        let mut order = Vec::with_capacity(n);
        while let Some(next) = ready.pop() {
            order.push(next);
            for &c in &children[next.index()] {
                remaining[c.index()] -= 1;
                if remaining[c.index()] == 0 {
                    ready.push(c);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // Walk backwards through unresolved parents until a node repeats.
        let stuck: BTreeSet<usize> =
            (0..n).filter(|&i| remaining[i] > 0).collect();
        let start = *stuck.iter().next().expect("cycle exists");
        let mut path = vec![VarId(start as u32)];
        let mut seen = BTreeSet::from([start]);
        loop {
            let here = path.last().unwrap().index();
            let back = self.parents[here]
                .iter()
                .find(|p| stuck.contains(&p.index()))
                .copied()
                .expect("node in cycle has a stuck parent");
            if !seen.insert(back.index()) {
                let at = path.iter().position(|&v| v == back).unwrap();
                let mut cycle: Vec<VarId> = path[at..].to_vec();
                cycle.reverse();
                return Err(cycle);
            }
            path.push(back);
        }
    }

    /// All descendants of the seed set, excluding the seeds themselves unless
    /// reachable through a longer path.
    pub fn descendants(&self, seeds: &[VarId]) -> BTreeSet<VarId> {
        let n = self.parents.len();
        let mut children = vec![Vec::new(); n];
        for (child, list) in self.parents.iter().enumerate() {
            for &p in list {
                children[p.index()].push(VarId(child as u32));
            }
        }
        let mut out = BTreeSet::new();
        let mut stack: Vec<VarId> = seeds.to_vec();
        while let Some(v) = stack.pop() {
            for &c in &children[v.index()] {
                if out.insert(c) {
                    stack.push(c);
                }
            }
        }
        out
    }

    /// The graph with all incoming edges to `targets` removed (intervention
    /// surgery on the graph).
    pub fn without_incoming(&self, targets: &[VarId]) -> CausalGraph {
        let mut parents = self.parents.clone();
        for t in targets {
            parents[t.index()].clear();
        }
        CausalGraph { parents }
    }

    pub fn is_subgraph_of(&self, other: &CausalGraph) -> bool {
        self.parents.len() == other.parents.len()
            && self
                .parents
                .iter()
                .enumerate()
                .all(|(c, list)| list.iter().all(|&p| other.has_edge(p, VarId(c as u32))))
    }
}
