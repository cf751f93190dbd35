//! Primal network simplex for uncapacitated minimum-cost flow with integer
//! arc costs.
//!
//! The spanning tree is kept strongly feasible (leaving-arc rule with `<` on
//! the source side of the cycle and `≤` on the target side), which rules out
//! cycling on degenerate pivots. Potentials are exact integers.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork<T> {
    nodes: usize,
    supply: Vec<T>,
    from: Vec<usize>,
    to: Vec<usize>,
    cost: Vec<i64>,
}

impl<T: Scalar> FlowNetwork<T> {
    /// `supply[v] > 0` is a source, `< 0` a sink; totals must balance.
    pub(crate) fn new(supply: Vec<T>) -> Self {
        Self {
            nodes: supply.len(),
            supply,
            from: Vec::new(),
            to: Vec::new(),
            cost: Vec::new(),
        }
    }

    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cost: i64) {
        debug_assert!(from < self.nodes && to < self.nodes && cost >= 0);
        self.from.push(from);
        self.to.push(to);
        self.cost.push(cost);
    }

    /// Optimal flow on every real arc and its total cost.
    pub(crate) fn solve(&self) -> Result<(Vec<T>, T)> {
        Solver::new(self).run()
    }
}

struct Solver<'a, T> {
    net: &'a FlowNetwork<T>,
    root: usize,
    // arcs: real ones first, then one artificial arc per node
    from: Vec<usize>,
    to: Vec<usize>,
    cost: Vec<i64>,
    flow: Vec<T>,
    in_tree: Vec<bool>,
    tree_adj: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    depth: Vec<usize>,
    pi: Vec<i64>,
    next_arc: usize,
    block: usize,
}

const NONE: usize = usize::MAX;

impl<'a, T: Scalar> Solver<'a, T> {
    fn new(net: &'a FlowNetwork<T>) -> Self {
        let n = net.nodes;
        let real = net.from.len();
        let max_cost = net.cost.iter().copied().max().unwrap_or(0);
        let big = (max_cost + 1) * (n as i64 + 1);
        let mut from = net.from.clone();
        let mut to = net.to.clone();
        let mut cost = net.cost.clone();
        let mut flow = vec![T::zero(); real];
        let mut tree_adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for v in 0..n {
            let s = net.supply[v];
            if s >= T::zero() {
                from.push(v);
                to.push(n);
                flow.push(s);
            } else {
                from.push(n);
                to.push(v);
                flow.push(-s);
            }
            cost.push(big);
            tree_adj[v].push(real + v);
            tree_adj[n].push(real + v);
        }
        let arcs = from.len();
        let mut in_tree = vec![false; arcs];
        in_tree[real..].iter_mut().for_each(|t| *t = true);
        Self {
            net,
            root: n,
            from,
            to,
            cost,
            flow,
            in_tree,
            tree_adj,
            queue: VecDeque::new(),
            parent: vec![NONE; n + 1],
            pred: vec![NONE; n + 1],
            depth: vec![0; n + 1],
            pi: vec![0; n + 1],
            next_arc: 0,
            block: ((real as f64).sqrt().ceil() as usize).max(10),
        }
    }

    fn build_tree(&mut self) {
        self.parent[self.root] = self.root;
        self.pred[self.root] = NONE;
        self.depth[self.root] = 0;
        self.pi[self.root] = 0;
        self.hang(self.root);
    }

    /// Recomputes parent, depth and potential for everything below `top`,
    /// whose own entries must already be correct.
    fn hang(&mut self, top: usize) {
        self.queue.clear();
        self.queue.push_back(top);
        while let Some(u) = self.queue.pop_front() {
            for i in 0..self.tree_adj[u].len() {
                let a = self.tree_adj[u][i];
                if a == self.pred[u] {
                    continue;
                }
                let (v, down) = if self.from[a] == u {
                    (self.to[a], true)
                } else {
                    (self.from[a], false)
                };
                self.parent[v] = u;
                self.pred[v] = a;
                self.depth[v] = self.depth[u] + 1;
                self.pi[v] = if down {
                    self.pi[u] + self.cost[a]
                } else {
                    self.pi[u] - self.cost[a]
                };
                self.queue.push_back(v);
            }
        }
    }

    fn reduced(&self, a: usize) -> i64 {
        self.cost[a] + self.pi[self.from[a]] - self.pi[self.to[a]]
    }

    /// Block search over real arcs: the most negative reduced cost within
    /// the first block that has one.
    fn entering(&mut self) -> Option<usize> {
        let real = self.net.from.len();
        if real == 0 {
            return None;
        }
        let mut best = None;
        let mut best_rc = 0i64;
        let mut scanned = 0;
        let mut in_block = 0;
        let mut a = self.next_arc;
        while scanned < real {
            if !self.in_tree[a] {
                let rc = self.reduced(a);
                if rc < best_rc {
                    best_rc = rc;
                    best = Some(a);
                }
            }
            scanned += 1;
            in_block += 1;
            a += 1;
            if a == real {
                a = 0;
            }
            if in_block == self.block {
                if best.is_some() {
                    break;
                }
                in_block = 0;
            }
        }
        self.next_arc = a;
        best
    }

    fn join(&self, mut u: usize, mut v: usize) -> usize {
        while u != v {
            if self.depth[u] >= self.depth[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        u
    }

    fn pivot(&mut self, entering: usize) {
        let first = self.from[entering];
        let second = self.to[entering];
        let join = self.join(first, second);
        let mut delta: Option<T> = None;
        let mut leaving = NONE;
        let mut on_first = true;

        // Flow runs join → … → first → second → … → join.
        let mut x = first;
        while x != join {
            let a = self.pred[x];
            if self.from[a] == x && delta.is_none_or(|d| self.flow[a] < d) {
                delta = Some(self.flow[a]);
                leaving = a;
                on_first = true;
            }
            x = self.parent[x];
        }
        let mut x = second;
        while x != join {
            let a = self.pred[x];
            if self.to[a] == x && delta.is_none_or(|d| self.flow[a] <= d) {
                delta = Some(self.flow[a]);
                leaving = a;
                on_first = false;
            }
            x = self.parent[x];
        }
        let delta = delta.expect("bounded problem: every cycle has a backward arc");

        if delta > T::zero() {
            self.flow[entering] = self.flow[entering] + delta;
            let mut x = first;
            while x != join {
                let a = self.pred[x];
                self.flow[a] = if self.from[a] == x {
                    self.flow[a] - delta
                } else {
                    self.flow[a] + delta
                };
                x = self.parent[x];
            }
            let mut x = second;
            while x != join {
                let a = self.pred[x];
                self.flow[a] = if self.from[a] == x {
                    self.flow[a] + delta
                } else {
                    self.flow[a] - delta
                };
                x = self.parent[x];
            }
        }
        self.in_tree[leaving] = false;
        self.in_tree[entering] = true;
        for v in [self.from[leaving], self.to[leaving]] {
            let slot = self.tree_adj[v].iter().position(|&a| a == leaving).unwrap();
            self.tree_adj[v].swap_remove(slot);
        }
        self.tree_adj[first].push(entering);
        self.tree_adj[second].push(entering);
        // The side that lost its path to the root hangs off the entering arc.
        let (low, high) = if on_first { (first, second) } else { (second, first) };
        self.parent[low] = high;
        self.pred[low] = entering;
        self.depth[low] = self.depth[high] + 1;
        self.pi[low] = if self.from[entering] == high {
            self.pi[high] + self.cost[entering]
        } else {
            self.pi[high] - self.cost[entering]
        };
        self.hang(low);
    }

    fn run(mut self) -> Result<(Vec<T>, T)> {
        self.build_tree();
        let limit = 50 * (self.from.len() + 10) * (self.root + 1);
        let mut steps = 0usize;
        while let Some(a) = self.entering() {
            self.pivot(a);
            steps += 1;
            if steps > limit {
                return Err(Error::Precondition("network simplex exceeded its pivot budget".into()));
            }
        }
        let real = self.net.from.len();
        let residual: T = self.flow[real..].iter().copied().sum();
        let total_supply: T = self.net.supply.iter().filter(|s| **s > T::zero()).copied().sum();
        if residual > T::mass_tolerance() * (T::one() + total_supply) * T::of_usize(self.root + 1) {
            return Err(Error::Precondition(format!(
                "supplies do not balance: {residual} left on artificial arcs"
            )));
        }
        let mut flows = self.flow;
        flows.truncate(real);
        let total = flows
            .iter()
            .zip(&self.net.cost)
            .map(|(&f, &c)| f * T::of_usize(c as usize))
            .sum();
        Ok((flows, total))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_assignment() {
        // costs [[0, 3], [2, 0]] with unit masses on each side
        let mut net = FlowNetwork::new(vec![0.5, 0.5, -0.5, -0.5]);
        net.add_arc(0, 2, 0);
        net.add_arc(0, 3, 3);
        net.add_arc(1, 2, 2);
        net.add_arc(1, 3, 0);
        let (flow, cost) = net.solve().unwrap();
        assert_eq!(cost, 0.0);
        assert_eq!(flow, vec![0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn forced_split() {
        let mut net = FlowNetwork::<f64>::new(vec![1.0, -0.25, -0.75]);
        net.add_arc(0, 1, 4);
        net.add_arc(0, 2, 1);
        let (_, cost) = net.solve().unwrap();
        assert!((cost - 1.75).abs() < 1e-12);
    }

    #[test]
    fn path_routing() {
        // chain 0 → 1 → 2 → 3 plus an expensive shortcut
        let mut net = FlowNetwork::new(vec![1.0, 0.0, 0.0, -1.0]);
        net.add_arc(0, 1, 1);
        net.add_arc(1, 2, 1);
        net.add_arc(2, 3, 1);
        net.add_arc(0, 3, 5);
        let (flow, cost) = net.solve().unwrap();
        assert_eq!(cost, 3.0);
        assert_eq!(flow[3], 0.0);
    }

    #[test]
    fn unbalanced_rejected() {
        let mut net = FlowNetwork::new(vec![1.0, -0.5]);
        net.add_arc(0, 1, 1);
        assert!(net.solve().is_err());
    }
}
