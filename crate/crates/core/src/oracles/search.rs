// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use crate::assign::{greedy_assign_default, ifa_assign};
use crate::netmodel::{ChannelAssignment, Network};
use crate::scalar::{top_k_value, NearBest, Scalar};

use super::{Oracle, OracleResult, Problem};

/// An odd node set whose induced subgraph is connected and not bipartite.
#[derive(Debug, Clone)]
pub struct OddTerm<T> {
    pub members: Vec<usize>,
    pub edges: Vec<usize>,
    /// `2 / (|U| - 1)`.
    pub scale: T,
}

/// Odd sets that can beat every node term for some weights and assignment.
///
/// A set whose induced subgraph is disconnected is dominated by one of its odd
/// components or by the node terms; a bipartite one by the node terms alone.
pub fn odd_terms<T: Scalar>(net: &Network<T>) -> Vec<OddTerm<T>> {
    let n = net.n_nodes();
    let mut adj = vec![0u64; n];
    for l in net.edges() {
        adj[l.u] |= 1 << l.v;
        adj[l.v] |= 1 << l.u;
    }
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    for mask in 1u64..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if size < 3 || size % 2 == 0 {
            continue;
        }
        let twice: u32 = (0..n).filter(|&v| mask >> v & 1 == 1).map(|v| (adj[v] & mask).count_ones()).sum();
        // connected and containing a cycle needs at least |U| edges
        if (twice as usize) < 2 * size {
            continue;
        }
        if let Some(false) = connected_bipartite(&adj, mask) {
            let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let edges = (0..net.n_edges())
                .filter(|&e| {
                    let l = net.edge(e);
                    mask >> l.u & 1 == 1 && mask >> l.v & 1 == 1
                })
                .collect();
            out.push(OddTerm { members, edges, scale: T::lit(2.0 / (size - 1) as f64) });
        }
    }
    out
}

/// `None` if the induced subgraph on `mask` is disconnected, else whether it is bipartite.
fn connected_bipartite(adj: &[u64], mask: u64) -> Option<bool> {
    let start = mask.trailing_zeros() as usize;
    let mut side = [0u64; 2];
    side[0] = 1 << start;
    let mut frontier = vec![(start, 0usize)];
    let mut bipartite = true;
    while let Some((v, s)) = frontier.pop() {
        let mut nb = adj[v] & mask;
        while nb != 0 {
            let x = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            let bit = 1u64 << x;
            if side[s] & bit != 0 {
                bipartite = false;
            } else if side[1 - s] & bit == 0 {
                side[1 - s] |= bit;
                frontier.push((x, 1 - s));
            }
        }
    }
    ((side[0] | side[1]) == mask).then_some(bipartite)
}

/// Smallest possible sum of the `k` largest entries after adding `extra` to
/// `loads` in any nonnegative split.
fn waterfill_top_k<T: Scalar>(loads: &[T], extra: T, k: usize, scratch: &mut Vec<T>) -> T {
    if extra <= T::zero() {
        return top_k_value(loads, k, scratch);
    }
    let nw = loads.len();
    scratch.clear();
    scratch.extend_from_slice(loads);
    scratch.sort_by(|a, b| a.partial_cmp(b).expect("finite loads"));
    let mut prefix = T::zero();
    let mut j = 0;
    let level = loop {
        prefix = prefix + scratch[j];
        j += 1;
        let level = (extra + prefix) / T::lit(j as f64);
        if j == nw || level <= scratch[j] {
            break level;
        }
    };
    for x in &mut scratch[..j] {
        *x = level;
    }
    scratch[nw - k.min(nw)..].iter().fold(T::zero(), |acc, &x| acc + x)
}

struct Search<'a, T> {
    net: &'a Network<T>,
    k: usize,
    nw: usize,
    ne: usize,
    order: Vec<usize>,
    // objective weight of link e on channel w at [w * ne + e]
    weight: Vec<T>,
    // channel-independent weights allow the water-filling bound
    uniform_weight: bool,
    // normalized load constraint, WhiteRec only
    normalized: Option<Vec<T>>,
    threshold: T,
    symmetric: bool,
    terms: Vec<OddTerm<T>>,
    by_weight_bound: Vec<(T, usize)>,
    by_normalized_bound: Vec<(T, usize)>,
    load: Vec<T>,
    norm_load: Vec<T>,
    remaining: Vec<T>,
    pending: Vec<usize>,
    channel_of: Vec<usize>,
    tracker: NearBest<T, Vec<usize>>,
    explored: u64,
    budget: u64,
    aborted: bool,
    scratch: Vec<T>,
    buf: Vec<T>,
}

impl<'a, T: Scalar> Search<'a, T> {
    fn new(net: &'a Network<T>, problem: Problem, k: usize, budget: u64) -> Self {
        let (nw, ne) = (net.n_channels(), net.n_edges());
        let normalized_weights: Vec<T> =
            (0..nw).flat_map(|w| (0..ne).map(move |e| net.demand(e) / net.capacity(w, e))).collect();
        let weight = match problem {
            Problem::Feasi => normalized_weights.clone(),
            _ => (0..nw).flat_map(|_| (0..ne).map(|e| net.demand(e))).collect(),
        };
        let uniform_weight = (0..ne).all(|e| (1..nw).all(|w| weight[w * ne + e] == weight[e]));
        let capacity_symmetric = (0..ne).all(|e| (1..nw).all(|w| net.capacity(w, e) == net.capacity(0, e)));
        let symmetric = match problem {
            Problem::WhiteRecInf | Problem::WhiteRecApprox => true,
            Problem::WhiteRec | Problem::Feasi => capacity_symmetric,
        };
        let normalized = (problem == Problem::WhiteRec).then_some(normalized_weights);
        let mut order: Vec<usize> = (0..ne).collect();
        order.sort_by(|&a, &b| net.demand(b).partial_cmp(&net.demand(a)).expect("finite").then(a.cmp(&b)));
        let terms = if problem == Problem::WhiteRecApprox { Vec::new() } else { odd_terms(net) };
        let bound_of = |w: &[T], t: &OddTerm<T>| {
            t.edges.iter().map(|&e| (0..nw).map(|c| w[c * ne + e]).fold(T::zero(), T::max)).sum::<T>() * t.scale
        };
        let mut by_weight_bound: Vec<(T, usize)> =
            terms.iter().enumerate().map(|(i, t)| (bound_of(&weight, t), i)).collect();
        by_weight_bound.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite").then(a.1.cmp(&b.1)));
        let mut by_normalized_bound: Vec<(T, usize)> = match &normalized {
            Some(q) => terms.iter().enumerate().map(|(i, t)| (bound_of(q, t), i)).collect(),
            None => Vec::new(),
        };
        by_normalized_bound.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite").then(a.1.cmp(&b.1)));
        let n = net.n_nodes();
        // channel-independent weight still to be placed at each node
        let mut remaining = vec![T::zero(); n];
        for (e, l) in net.edges().iter().enumerate() {
            remaining[l.u] = remaining[l.u] + weight[e];
            remaining[l.v] = remaining[l.v] + weight[e];
        }
        Search {
            net,
            k,
            nw,
            ne,
            order,
            weight,
            uniform_weight,
            normalized,
            threshold: T::one() / (T::one() - T::tolerance()),
            symmetric,
            terms,
            by_weight_bound,
            by_normalized_bound,
            load: vec![T::zero(); n * nw],
            norm_load: vec![T::zero(); n * nw],
            remaining,
            pending: (0..n).map(|v| net.degree(v)).collect(),
            channel_of: vec![0; ne],
            tracker: NearBest::minimizing(),
            explored: 0,
            budget,
            aborted: false,
            scratch: Vec::with_capacity(nw),
            buf: vec![T::zero(); nw],
        }
    }

    fn node_bound(&mut self, v: usize) -> T {
        let loads = &self.load[v * self.nw..(v + 1) * self.nw];
        if self.uniform_weight && self.pending[v] > 0 {
            waterfill_top_k(loads, self.remaining[v], self.k, &mut self.scratch)
        } else {
            top_k_value(loads, self.k, &mut self.scratch)
        }
    }

    fn key(&self, channel_of: &[usize]) -> Vec<usize> {
        if !self.symmetric {
            return channel_of.to_vec();
        }
        let mut relabel = vec![usize::MAX; self.nw];
        let mut next = 0;
        channel_of
            .iter()
            .map(|&w| {
                if relabel[w] == usize::MAX {
                    relabel[w] = next;
                    next += 1;
                }
                relabel[w]
            })
            .collect()
    }

    fn term_value(&mut self, weight_of: impl Fn(usize, usize) -> T, t: usize, k: usize) -> T {
        self.buf.iter_mut().for_each(|x| *x = T::zero());
        for &e in &self.terms[t].edges {
            let w = self.channel_of[e];
            self.buf[w] = self.buf[w] + weight_of(w, e);
        }
        top_k_value(&self.buf, k, &mut self.scratch) * self.terms[t].scale
    }

    /// Objective at a complete assignment whose node terms give `node_max`, or
    /// `None` if it is infeasible or cannot be among the best.
    fn leaf_value(&mut self, node_max: T) -> Option<T> {
        let mut value = node_max;
        let ne = self.ne;
        for i in 0..self.by_weight_bound.len() {
            let (bound, t) = self.by_weight_bound[i];
            if bound <= value {
                break;
            }
            let weight = std::mem::take(&mut self.weight);
            let x = self.term_value(|w, e| weight[w * ne + e], t, self.k);
            self.weight = weight;
            value = value.max(x);
            if !self.tracker.admits(value) {
                return None;
            }
        }
        if let Some(q) = self.normalized.take() {
            let mut ok = true;
            for i in 0..self.by_normalized_bound.len() {
                let (bound, t) = self.by_normalized_bound[i];
                if bound <= self.threshold {
                    break;
                }
                if self.term_value(|w, e| q[w * ne + e], t, 1) > self.threshold {
                    ok = false;
                    break;
                }
            }
            self.normalized = Some(q);
            if !ok {
                return None;
            }
        }
        Some(value)
    }

    fn dfs(&mut self, depth: usize, lower: T, used: usize) {
        if self.aborted {
            return;
        }
        if depth == self.ne {
            if self.explored >= self.budget {
                self.aborted = true;
                return;
            }
            self.explored += 1;
            if let Some(value) = self.leaf_value(lower) {
                let key = self.key(&self.channel_of);
                self.tracker.offer(value, || key);
            }
            return;
        }
        let e = self.order[depth];
        let (u, v) = {
            let l = self.net.edge(e);
            (l.u, l.v)
        };
        let limit = if self.symmetric { self.nw.min(used + 1) } else { self.nw };
        for w in 0..limit {
            let (iu, iv, ix) = (u * self.nw + w, v * self.nw + w, w * self.ne + e);
            let saved = (self.load[iu], self.load[iv], self.norm_load[iu], self.norm_load[iv]);
            let saved_remaining = (self.remaining[u], self.remaining[v]);
            self.load[iu] = saved.0 + self.weight[ix];
            self.load[iv] = saved.1 + self.weight[ix];
            self.remaining[u] = saved_remaining.0 - self.weight[ix];
            self.remaining[v] = saved_remaining.1 - self.weight[ix];
            self.pending[u] -= 1;
            self.pending[v] -= 1;
            let feasible = match &self.normalized {
                Some(q) => {
                    self.norm_load[iu] = saved.2 + q[ix];
                    self.norm_load[iv] = saved.3 + q[ix];
                    self.norm_load[iu] <= self.threshold && self.norm_load[iv] <= self.threshold
                }
                None => true,
            };
            if feasible {
                let bound = lower.max(self.node_bound(u)).max(self.node_bound(v));
                if self.tracker.admits(bound) {
                    self.channel_of[e] = w;
                    self.dfs(depth + 1, bound, used.max(w + 1));
                }
            }
            self.load[iu] = saved.0;
            self.load[iv] = saved.1;
            self.norm_load[iu] = saved.2;
            self.norm_load[iv] = saved.3;
            self.remaining[u] = saved_remaining.0;
            self.remaining[v] = saved_remaining.1;
            self.pending[u] += 1;
            self.pending[v] += 1;
            if self.aborted {
                return;
            }
        }
    }

    /// Full evaluation of a given assignment, used for warm starts.
    fn evaluate(&mut self, y: &ChannelAssignment) -> Option<T> {
        self.channel_of.copy_from_slice(y.as_slice());
        let (nw, ne) = (self.nw, self.ne);
        let mut load = vec![T::zero(); self.net.n_nodes() * nw];
        let mut norm_load = vec![T::zero(); self.net.n_nodes() * nw];
        for (e, l) in self.net.edges().iter().enumerate() {
            let w = y.channel(e);
            for x in [l.u, l.v] {
                load[x * nw + w] = load[x * nw + w] + self.weight[w * ne + e];
                if let Some(q) = &self.normalized {
                    norm_load[x * nw + w] = norm_load[x * nw + w] + q[w * ne + e];
                }
            }
        }
        if norm_load.iter().any(|&x| x > self.threshold) {
            return None;
        }
        let node_max = load
            .chunks(nw)
            .map(|c| top_k_value(c, self.k, &mut self.scratch))
            .fold(T::zero(), T::max);
        self.leaf_value(node_max)
    }
}

pub(super) fn run<T: Scalar>(net: &Network<T>, problem: Problem, k: usize, oracle: &Oracle) -> OracleResult<T> {
    let mut s = Search::new(net, problem, k, oracle.budget);
    if oracle.warm_start && net.n_edges() > 0 {
        let mut starts = vec![ifa_assign(net)];
        starts.extend(greedy_assign_default(net).ok());
        for y in starts {
            if let Some(value) = s.evaluate(&y) {
                let key = s.key(y.as_slice());
                s.tracker.offer(value, || key);
            }
        }
    }
    s.dfs(0, T::zero(), 0);
    let proven_optimal = !s.aborted;
    let explored = s.explored;
    let best = s.tracker.finish();
    let objective = best.as_ref().map(|&(value, _)| match problem {
        Problem::Feasi if value > T::zero() => T::one() / value,
        Problem::Feasi => T::infinity(),
        _ => value,
    });
    OracleResult {
        problem,
        k,
        best_assignment: best.map(|(_, key)| ChannelAssignment::from_vec_unchecked(key)),
        objective,
        explored,
        proven_optimal,
    }
}
