//! Maximum flow by Edmonds-Karp and Dinic on a residual arc list.

use crate::graph::Graph;
use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: f64,
    rev: usize,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Vec<Arc>>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        Self {
            arcs: vec![Vec::new(); n],
        }
    }

    /// Capacities from edge weights; undirected edges carry flow both ways.
    pub fn from_graph(g: &Graph) -> Self {
        let mut net = Self::new(g.node_count());
        for e in g.edges() {
            let back = if g.is_directed() { 0.0 } else { e.weight };
            net.add_arc(e.src, e.dst, e.weight, back);
        }
        net
    }

    pub fn node_count(&self) -> usize {
        self.arcs.len()
    }

    /// Adds `u → v` with capacity `cap` and its paired reverse arc with capacity `back`.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: f64, back: f64) {
        let (ru, rv) = (self.arcs[v].len(), self.arcs[u].len());
        self.arcs[u].push(Arc { to: v, cap, rev: ru });
        self.arcs[v].push(Arc { to: u, cap: back, rev: rv });
    }

    pub fn edmonds_karp(&mut self, s: usize, t: usize) -> f64 {
        let n = self.node_count();
        let mut total = 0.0;
        loop {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                if v == t {
                    break;
                }
                for (i, a) in self.arcs[v].iter().enumerate() {
                    if a.cap > 0.0 && !seen[a.to] {
                        seen[a.to] = true;
                        prev[a.to] = Some((v, i));
                        queue.push_back(a.to);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck = f64::INFINITY;
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                bottleneck = bottleneck.min(self.arcs[u][i].cap);
                v = u;
            }
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                self.push(u, i, bottleneck);
                v = u;
            }
            total += bottleneck;
        }
    }

    pub fn dinic(&mut self, s: usize, t: usize) -> f64 {
        let n = self.node_count();
        let mut total = 0.0;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for a in &self.arcs[v] {
                    if a.cap > 0.0 && level[a.to] == usize::MAX {
                        level[a.to] = level[v] + 1;
                        queue.push_back(a.to);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            let mut next = vec![0usize; n];
            loop {
                let pushed = self.blocking_path(s, t, &level, &mut next);
                if pushed <= 0.0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    /// One augmenting path in the level graph (iterative DFS with current-arc pointers).
    fn blocking_path(&mut self, s: usize, t: usize, level: &[usize], next: &mut [usize]) -> f64 {
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut v = s;
        loop {
            if v == t {
                let bottleneck = stack
                    .iter()
                    .map(|&(u, i)| self.arcs[u][i].cap)
                    .fold(f64::INFINITY, f64::min);
                for &(u, i) in &stack {
                    self.push(u, i, bottleneck);
                }
                return bottleneck;
            }
            let mut advanced = false;
            while next[v] < self.arcs[v].len() {
                let a = &self.arcs[v][next[v]];
                if a.cap > 0.0 && level[a.to] == level[v] + 1 {
                    stack.push((v, next[v]));
                    v = a.to;
                    advanced = true;
                    break;
                }
                next[v] += 1;
            }
            if !advanced {
                match stack.pop() {
                    Some((u, _)) => {
                        next[u] += 1;
                        v = u;
                    }
                    None => return 0.0,
                }
            }
        }
    }

    fn push(&mut self, u: usize, i: usize, amount: f64) {
        let (to, rev) = (self.arcs[u][i].to, self.arcs[u][i].rev);
        self.arcs[u][i].cap -= amount;
        self.arcs[to][rev].cap += amount;
    }

    /// Nodes reachable from `s` in the residual network (the source side of a minimum cut).
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for a in &self.arcs[v] {
                if a.cap > 0.0 && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    EdmondsKarp,
    Dinic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinCut {
    pub value: f64,
    /// Source-side nodes, ascending.
    pub source_side: Vec<usize>,
    /// Graph edges leaving the source side.
    pub cut_edges: usize,
}

pub fn min_cut(g: &Graph, s: usize, t: usize, engine: Engine) -> MinCut {
    let mut net = FlowNetwork::from_graph(g);
    let value = match engine {
        Engine::EdmondsKarp => net.edmonds_karp(s, t),
        Engine::Dinic => net.dinic(s, t),
    };
    let side = net.residual_reachable(s);
    let cut_edges = g
        .edges()
        .iter()
        .filter(|e| {
            if g.is_directed() {
                side[e.src] && !side[e.dst]
            } else {
                side[e.src] != side[e.dst]
            }
        })
        .count();
    MinCut {
        value,
        source_side: (0..g.node_count()).filter(|&v| side[v]).collect(),
        cut_edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_parallel_paths() {
        let g = Graph::new(4, true, [(0, 1, 1.0), (1, 3, 1.0), (0, 2, 1.0), (2, 3, 1.0)]).unwrap();
        for engine in [Engine::EdmondsKarp, Engine::Dinic] {
            let cut = min_cut(&g, 0, 3, engine);
            assert_eq!(cut.value, 2.0);
            assert_eq!(cut.cut_edges, 2);
        }
    }

    #[test]
    fn disconnected_is_zero() {
        let g = Graph::new(4, true, [(0, 1, 3.0), (2, 3, 3.0)]).unwrap();
        let cut = min_cut(&g, 0, 3, Engine::Dinic);
        assert_eq!(cut.value, 0.0);
        assert_eq!(cut.source_side, vec![0, 1]);
    }

    #[test]
    fn undirected_capacity_both_ways() {
        let g = Graph::new(3, false, [(1, 0, 2.0), (2, 1, 5.0)]).unwrap();
        assert_eq!(min_cut(&g, 2, 0, Engine::EdmondsKarp).value, 2.0);
    }

    #[test]
    fn classic_network() {
        let g = Graph::new(
            6,
            true,
            [(0, 1, 16.0), (0, 2, 13.0), (1, 2, 10.0), (2, 1, 4.0), (1, 3, 12.0), (3, 2, 9.0), (2, 4, 14.0), (4, 3, 7.0), (3, 5, 20.0), (4, 5, 4.0)],
        )
        .unwrap();
        assert_eq!(min_cut(&g, 0, 5, Engine::EdmondsKarp).value, 23.0);
        assert_eq!(min_cut(&g, 0, 5, Engine::Dinic).value, 23.0);
    }
}
