use super::SwitchId;

/// Plain undirected switch graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<SwitchId>>,
}

impl Graph {
    pub fn from_edges(nodes: usize, edges: impl IntoIterator<Item = (SwitchId, SwitchId)>) -> Self {
        let mut adj = vec![Vec::new(); nodes];
        for (a, b) in edges {
            if a == b {
                continue;
            }
            adj[a.0].push(b);
            adj[b.0].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Self { adj }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn neighbors(&self, id: SwitchId) -> &[SwitchId] {
        &self.adj[id.0]
    }

    pub fn degree(&self, id: SwitchId) -> usize {
        self.adj[id.0].len()
    }

    pub fn has_edge(&self, a: SwitchId, b: SwitchId) -> bool {
        self.adj[a.0].binary_search(&b).is_ok()
    }

    /// Each undirected edge once, as `(low, high)`, in sorted order.
    pub fn edges(&self) -> Vec<(SwitchId, SwitchId)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, list)| {
                list.iter()
                    .filter(move |&&j| j.0 > i)
                    .map(move |&j| (SwitchId(i), j))
            })
            .collect()
    }

    /// Copy of the graph without the listed edges.
    pub fn without_edges(&self, removed: &[(SwitchId, SwitchId)]) -> Self {
        let mut adj = self.adj.clone();
        for &(a, b) in removed {
            adj[a.0].retain(|&x| x != b);
            adj[b.0].retain(|&x| x != a);
        }
        Self { adj }
    }
}
