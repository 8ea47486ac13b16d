//! Integer max-flow (Dinic's algorithm) used by the density checker. All
//! capacities are exact integers so cut comparisons carry no floating-point
//! error.

/// Directed flow network with paired forward/reverse arcs (`id ^ 1`).
pub(crate) struct FlowNetwork {
    adjacency: Vec<Vec<usize>>,
    targets: Vec<usize>,
    capacity: Vec<i64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adjacency: vec![Vec::new(); nodes],
            targets: Vec::new(),
            capacity: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) {
        debug_assert!(cap >= 0);
        let id = self.targets.len();
        self.targets.push(to);
        self.capacity.push(cap);
        self.adjacency[from].push(id);
        self.targets.push(from);
        self.capacity.push(0);
        self.adjacency[to].push(id + 1);
    }

    fn bfs_levels(&self, source: usize, sink: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1; self.adjacency.len()];
        level[source] = 0;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &id in &self.adjacency[u] {
                let v = self.targets[id];
                if self.capacity[id] > 0 && level[v] < 0 {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        (level[sink] >= 0).then_some(level)
    }

    fn dfs_augment(
        &mut self,
        u: usize,
        sink: usize,
        pushed: i64,
        level: &[i32],
        iter: &mut [usize],
    ) -> i64 {
        if u == sink {
            return pushed;
        }
        while iter[u] < self.adjacency[u].len() {
            let id = self.adjacency[u][iter[u]];
            let v = self.targets[id];
            if self.capacity[id] > 0 && level[v] == level[u] + 1 {
                let flow = self.dfs_augment(v, sink, pushed.min(self.capacity[id]), level, iter);
                if flow > 0 {
                    self.capacity[id] -= flow;
                    self.capacity[id ^ 1] += flow;
                    return flow;
                }
            }
            iter[u] += 1;
        }
        0
    }

    /// Computes the maximum flow from `source` to `sink`, mutating residual
    /// capacities in place.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> i64 {
        let mut total = 0_i64;
        while let Some(level) = self.bfs_levels(source, sink) {
            let mut iter = vec![0_usize; self.adjacency.len()];
            loop {
                let pushed = self.dfs_augment(source, sink, i64::MAX, &level, &mut iter);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// After [`max_flow`], the nodes residual-reachable from the source form
    /// the minimal minimum cut's source side.
    pub fn min_cut_source_side(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adjacency.len()];
        seen[source] = true;
        let mut stack = vec![source];
        while let Some(u) = stack.pop() {
            for &id in &self.adjacency[u] {
                let v = self.targets[id];
                if self.capacity[id] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_textbook_network() {
        // s=0, t=5; max flow 23 (a standard worked example).
        let mut net = FlowNetwork::new(6);
        net.add_edge(0, 1, 16);
        net.add_edge(0, 2, 13);
        net.add_edge(1, 2, 10);
        net.add_edge(2, 1, 4);
        net.add_edge(1, 3, 12);
        net.add_edge(3, 2, 9);
        net.add_edge(2, 4, 14);
        net.add_edge(4, 3, 7);
        net.add_edge(3, 5, 20);
        net.add_edge(4, 5, 4);
        assert_eq!(net.max_flow(0, 5), 23);
        let side = net.min_cut_source_side(0);
        assert!(side[0] && !side[5]);
        // Cut capacity across the side equals the flow value: edges (1,3)=12,
        // (4,3)=7 and (4,5)=4 cross the cut {0,1,2,4}.
        assert_eq!(side, vec![true, true, true, false, true, false]);
    }

    #[test]
    fn saturated_and_disconnected_cases() {
        let mut net = FlowNetwork::new(3);
        net.add_edge(0, 1, 5);
        // No arc into node 2: flow is zero and the source side is {0, 1}.
        assert_eq!(net.max_flow(0, 2), 0);
        let side = net.min_cut_source_side(0);
        assert_eq!(side, vec![true, true, false]);

        let mut net = FlowNetwork::new(2);
        net.add_edge(0, 1, 0);
        assert_eq!(net.max_flow(0, 1), 0);
        assert_eq!(net.min_cut_source_side(0), vec![true, false]);
    }

    #[test]
    fn parallel_arcs_accumulate() {
        let mut net = FlowNetwork::new(2);
        net.add_edge(0, 1, 3);
        net.add_edge(0, 1, 4);
        assert_eq!(net.max_flow(0, 1), 7);
    }
}
