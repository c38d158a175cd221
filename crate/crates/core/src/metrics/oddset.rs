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

//! Odd-set enumeration shared by the recovery-capacity and feasibility metrics.

use crate::netmodel::{ChannelAssignment, Network, OddSet};
use crate::scalar::{top_k_sum, top_k_value, NearBest, Scalar};

/// Best odd set and the channels realising its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddSetWitness {
    pub set: OddSet,
    pub channels: Vec<usize>,
}

type Key = (Vec<usize>, Vec<usize>);

/// Maximises `2/(|U|-1) * (sum of the k largest per-channel loads inside E(U))`
/// over every odd `U` with `|U| >= 3`, for each requested `k` at once.
///
/// Subsets are visited depth-first with members added in increasing index order,
/// so each subset is reached exactly once and per-channel loads are extended
/// from the parent prefix rather than recomputed. A subset is skipped when even
/// its total induced weight cannot reach the current best.
pub(crate) fn max_over_odd_sets<T: Scalar>(
    net: &Network<T>,
    y: &ChannelAssignment,
    weight: &[T],
    ks: &[usize],
) -> Vec<(T, Option<OddSetWitness>)> {
    let n = net.n_nodes();
    assert!(n <= 63, "odd-set enumeration limited to 63 nodes");
    let n_channels = net.n_channels();
    // lower-indexed neighbours only: when v joins, edges to earlier members appear
    let mut lower: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, l) in net.edges().iter().enumerate() {
        let (lo, hi) = (l.u.min(l.v), l.u.max(l.v));
        lower[hi].push((lo, e));
    }
    let mut search = Search {
        channel_of: y.as_slice(),
        weight,
        ks,
        lower,
        loads: vec![vec![T::zero(); n_channels]; n + 1],
        totals: vec![T::zero(); n + 1],
        members: Vec::with_capacity(n),
        mask: 0,
        trackers: ks.iter().map(|_| NearBest::maximizing()).collect(),
        scratch: Vec::new(),
    };
    search.descend(0, n);
    let trackers = std::mem::take(&mut search.trackers);
    trackers
        .into_iter()
        .map(|t| match t.finish() {
            Some((value, (members, channels))) => {
                (value, Some(OddSetWitness { set: OddSet::from_sorted_unchecked(members), channels }))
            }
            None => (T::zero(), None),
        })
        .collect()
}

struct Search<'a, T> {
    channel_of: &'a [usize],
    weight: &'a [T],
    ks: &'a [usize],
    lower: Vec<Vec<(usize, usize)>>,
    loads: Vec<Vec<T>>,
    totals: Vec<T>,
    members: Vec<usize>,
    mask: u64,
    trackers: Vec<NearBest<T, Key>>,
    scratch: Vec<T>,
}

impl<T: Scalar> Search<'_, T> {
    fn descend(&mut self, start: usize, n: usize) {
        let depth = self.members.len();
        for v in start..n {
            let (head, tail) = self.loads.split_at_mut(depth + 1);
            let (parent, child) = (&head[depth], &mut tail[0]);
            child.copy_from_slice(parent);
            let mut total = self.totals[depth];
            for &(u, e) in &self.lower[v] {
                if self.mask & (1u64 << u) != 0 {
                    child[self.channel_of[e]] = child[self.channel_of[e]] + self.weight[e];
                    total = total + self.weight[e];
                }
            }
            self.totals[depth + 1] = total;
            self.members.push(v);
            self.mask |= 1u64 << v;

            let size = depth + 1;
            if size >= 3 && size % 2 == 1 {
                self.evaluate(size, total);
            }
            if v + 1 < n {
                self.descend(v + 1, n);
            }

            self.members.pop();
            self.mask &= !(1u64 << v);
        }
    }

    fn evaluate(&mut self, size: usize, total: T) {
        let scale = T::lit(2.0) / T::lit((size - 1) as f64);
        let loads = &self.loads[size];
        for (i, &k) in self.ks.iter().enumerate() {
            if !self.trackers[i].admits(total * scale) {
                continue;
            }
            let value = top_k_value(loads, k, &mut self.scratch) * scale;
            let members = &self.members;
            self.trackers[i].offer(value, || (members.clone(), top_k_sum(loads, k).1));
        }
    }
}

/// Exact maximum restricted to three-node sets, in `O(|E| d_max)`.
///
/// A triple with one induced link is worth that link's weight; every other triple
/// worth considering contains a link and a neighbour of one of its endpoints.
pub(crate) fn max_over_triples<T: Scalar>(
    net: &Network<T>,
    y: &ChannelAssignment,
    weight: &[T],
    k: usize,
) -> T {
    if net.n_nodes() < 3 {
        return T::zero();
    }
    let mut best = weight.iter().fold(T::zero(), |acc, &w| acc.max(w));
    let mut loads: Vec<(usize, T)> = Vec::with_capacity(3);
    let mut scratch = Vec::with_capacity(3);
    for l in net.edges() {
        let (a, b) = (l.u, l.v);
        for &side in &[a, b] {
            for &f in net.incident(side) {
                let c = net.edge(f).other(side);
                if c == a || c == b {
                    continue;
                }
                loads.clear();
                let mut add = |e: usize| {
                    let w = y.channel(e);
                    match loads.iter_mut().find(|(ch, _)| *ch == w) {
                        Some(slot) => slot.1 = slot.1 + weight[e],
                        None => loads.push((w, weight[e])),
                    }
                };
                let ab = net.edge_between(a, b).expect("edge exists");
                add(ab);
                if let Some(e) = net.edge_between(a, c) {
                    add(e);
                }
                if let Some(e) = net.edge_between(b, c) {
                    add(e);
                }
                let values: Vec<T> = loads.iter().map(|&(_, x)| x).collect();
                best = best.max(top_k_value(&values, k, &mut scratch));
            }
        }
    }
    best
}
