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

//! Secondary network, white channels, demands and channel assignments.
//!
//! Nodes, links and channels are addressed by dense indices. Names only exist for
//! the file format and are mapped to indices on parse.

pub(crate) mod format;

pub use format::{
    parse_assignment, parse_network, serialize_assignment, serialize_network, AssignmentDoc,
    NetworkDoc,
};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An undirected link with its traffic demand (Mbps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link<T> {
    pub u: usize,
    pub v: usize,
    pub demand: T,
}

impl<T> Link<T> {
    pub fn other(&self, node: usize) -> usize {
        if self.u == node {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, node: usize) -> bool {
        self.u == node || self.v == node
    }
}

/// Channel capacity specification accepted by [`Network::new`].
#[derive(Debug, Clone, PartialEq)]
pub enum Capacity<T> {
    /// Every channel sustains the same rate on every link.
    Uniform(T),
    /// One rate per channel, shared by all links.
    PerChannel(Vec<T>),
    /// Full `[channel][edge]` matrix.
    Matrix(Vec<Vec<T>>),
}

/// Secondary network `G = (V, E)` with the white channel set and per-link rates.
///
/// Immutable once built; every accessor is read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<T = f64> {
    node_names: Vec<String>,
    channel_names: Vec<String>,
    edges: Vec<Link<T>>,
    capacity: Vec<Vec<T>>,
    incidence: Vec<Vec<usize>>,
}

impl<T: Scalar> Network<T> {
    /// Builds a network with default names `n0..`, `w0..`.
    pub fn new(
        n_nodes: usize,
        n_channels: usize,
        edges: Vec<(usize, usize, T)>,
        capacity: Capacity<T>,
    ) -> Result<Self> {
        let node_names = (0..n_nodes).map(|i| format!("n{i}")).collect();
        let channel_names = (0..n_channels).map(|i| format!("w{i}")).collect();
        Self::with_names(node_names, channel_names, edges, capacity)
    }

    pub fn with_names(
        node_names: Vec<String>,
        channel_names: Vec<String>,
        edges: Vec<(usize, usize, T)>,
        capacity: Capacity<T>,
    ) -> Result<Self> {
        let n_nodes = node_names.len();
        let n_channels = channel_names.len();
        if n_channels == 0 {
            return Err(Error::NoChannels);
        }
        let mut incidence = vec![Vec::new(); n_nodes];
        let mut links = Vec::with_capacity(edges.len());
        for (idx, &(u, v, demand)) in edges.iter().enumerate() {
            if u >= n_nodes || v >= n_nodes {
                return Err(Error::InvalidEdge { u, v, reason: "endpoint out of range" });
            }
            if u == v {
                return Err(Error::InvalidEdge { u, v, reason: "self-loop" });
            }
            if incidence[u].iter().any(|&e: &usize| {
                let l: &Link<T> = &links[e];
                l.other(u) == v
            }) {
                return Err(Error::InvalidEdge { u, v, reason: "parallel edge" });
            }
            if !(demand > T::zero()) || !demand.is_finite() {
                return Err(Error::NonpositiveDemand { edge: idx });
            }
            incidence[u].push(idx);
            incidence[v].push(idx);
            links.push(Link { u, v, demand });
        }
        let n_edges = links.len();
        let capacity = match capacity {
            Capacity::Uniform(r) => vec![vec![r; n_edges]; n_channels],
            Capacity::PerChannel(per) => {
                if per.len() != n_channels {
                    return Err(Error::CapacityShape {
                        expected_rows: n_channels,
                        expected_cols: n_edges,
                    });
                }
                per.into_iter().map(|r| vec![r; n_edges]).collect()
            }
            Capacity::Matrix(m) => {
                if m.len() != n_channels || m.iter().any(|row| row.len() != n_edges) {
                    return Err(Error::CapacityShape {
                        expected_rows: n_channels,
                        expected_cols: n_edges,
                    });
                }
                m
            }
        };
        for (w, row) in capacity.iter().enumerate() {
            for (e, &r) in row.iter().enumerate() {
                if !(r > T::zero()) {
                    return Err(Error::NonpositiveCapacity { channel: w, edge: e });
                }
            }
        }
        Ok(Network { node_names, channel_names, edges: links, capacity, incidence })
    }

    pub fn n_nodes(&self) -> usize {
        self.node_names.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_channels(&self) -> usize {
        self.channel_names.len()
    }

    pub fn edges(&self) -> &[Link<T>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Link<T> {
        &self.edges[e]
    }

    pub fn demand(&self, e: usize) -> T {
        self.edges[e].demand
    }

    /// Sustainable rate `R[w][e]`.
    pub fn capacity(&self, w: usize, e: usize) -> T {
        self.capacity[w][e]
    }

    pub fn capacity_matrix(&self) -> &[Vec<T>] {
        &self.capacity
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn node_name(&self, v: usize) -> &str {
        &self.node_names[v]
    }

    pub fn channel_name(&self, w: usize) -> &str {
        &self.channel_names[w]
    }

    /// Links incident on `v`, i.e. `δ(v)`, in ascending edge index order.
    pub fn incident_edges(&self, v: usize) -> Result<&[usize]> {
        self.incidence
            .get(v)
            .map(Vec::as_slice)
            .ok_or(Error::InvalidNode { node: v, n_nodes: self.n_nodes() })
    }

    /// Unchecked variant of [`Network::incident_edges`] for hot loops.
    pub(crate) fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Links with both endpoints in `set`, i.e. `E(U)`, ascending.
    pub fn induced_edges(&self, set: &OddSet) -> Vec<usize> {
        let mut out: Vec<usize> = set
            .members()
            .iter()
            .filter(|&&v| v < self.n_nodes())
            .flat_map(|&v| self.incidence[v].iter().copied())
            .filter(|&e| {
                let l = &self.edges[e];
                set.contains(l.u) && set.contains(l.v)
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = if self.incidence[u].len() <= self.incidence[v].len() { (u, v) } else { (v, u) };
        self.incidence[a].iter().copied().find(|&e| self.edges[e].other(a) == b)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    /// Maximum node degree `d_max` (0 for an empty graph).
    pub fn max_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Total demand on links incident on `v`.
    pub fn node_demand(&self, v: usize) -> T {
        self.incidence[v].iter().fold(T::zero(), |acc, &e| acc + self.edges[e].demand)
    }

    /// `max_v Σ_{e∈δ(v)} r_e`.
    pub fn max_node_demand(&self) -> T {
        (0..self.n_nodes()).map(|v| self.node_demand(v)).fold(T::zero(), T::max)
    }

    /// Total traffic `L_tot = Σ_e r_e`.
    pub fn total_demand(&self) -> T {
        self.edges.iter().fold(T::zero(), |acc, l| acc + l.demand)
    }

    pub fn max_demand(&self) -> T {
        self.edges.iter().fold(T::zero(), |acc, l| acc.max(l.demand))
    }

    /// True iff every `R[w][e]` is identical.
    pub fn is_homogeneous(&self) -> bool {
        let mut all = self.capacity.iter().flatten();
        match all.next() {
            None => true,
            Some(&first) => all.all(|&r| r == first),
        }
    }

    pub fn has_uniform_demand(&self) -> bool {
        match self.edges.first() {
            None => true,
            Some(first) => self.edges.iter().all(|l| l.demand == first.demand),
        }
    }

    /// `(R_min, R_max)` over all channel/link pairs; `None` without links.
    pub fn capacity_range(&self) -> Option<(T, T)> {
        let mut all = self.capacity.iter().flatten().copied();
        let first = all.next()?;
        Some(all.fold((first, first), |(lo, hi), r| (lo.min(r), hi.max(r))))
    }

    /// Two-colourability check by breadth-first search over every component.
    pub fn is_bipartite(&self) -> bool {
        let n = self.n_nodes();
        let mut side = vec![u8::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        for start in 0..n {
            if side[start] != u8::MAX {
                continue;
            }
            side[start] = 0;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &e in &self.incidence[v] {
                    let u = self.edges[e].other(v);
                    if side[u] == u8::MAX {
                        side[u] = 1 - side[v];
                        queue.push_back(u);
                    } else if side[u] == side[v] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Same topology and names with demands multiplied by `factor`.
    pub fn scaled_demands(&self, factor: T) -> Result<Self> {
        let edges = self.edges.iter().map(|l| (l.u, l.v, l.demand * factor)).collect();
        Self::with_names(
            self.node_names.clone(),
            self.channel_names.clone(),
            edges,
            Capacity::Matrix(self.capacity.clone()),
        )
    }
}

/// Total map from links to exactly one white channel each.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelAssignment {
    channel_of: Vec<usize>,
}

impl ChannelAssignment {
    pub fn new<T: Scalar>(net: &Network<T>, channel_of: Vec<usize>) -> Result<Self> {
        if channel_of.len() != net.n_edges() {
            return Err(Error::AssignmentLength { got: channel_of.len(), expected: net.n_edges() });
        }
        if let Some(&bad) = channel_of.iter().find(|&&w| w >= net.n_channels()) {
            return Err(Error::InvalidChannel { channel: bad, n_channels: net.n_channels() });
        }
        Ok(ChannelAssignment { channel_of })
    }

    pub(crate) fn from_vec_unchecked(channel_of: Vec<usize>) -> Self {
        ChannelAssignment { channel_of }
    }

    pub fn channel(&self, e: usize) -> usize {
        self.channel_of[e]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.channel_of
    }

    pub fn len(&self) -> usize {
        self.channel_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channel_of.is_empty()
    }

    /// Edge set `E_w` for every channel.
    pub fn classes(&self, n_channels: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); n_channels];
        for (e, &w) in self.channel_of.iter().enumerate() {
            out[w].push(e);
        }
        out
    }
}

/// Node set of odd cardinality at least three (a member of the odd-set family).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OddSet {
    members: Vec<usize>,
}

impl OddSet {
    pub fn new(mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        let distinct = members.windows(2).all(|w| w[0] != w[1]);
        if !distinct || members.len() < 3 || members.len() % 2 == 0 {
            return Err(Error::InvalidOddSet(members));
        }
        Ok(OddSet { members })
    }

    pub(crate) fn from_sorted_unchecked(members: Vec<usize>) -> Self {
        debug_assert!(members.len() >= 3 && members.len() % 2 == 1);
        OddSet { members }
    }

    /// Sorted members.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// `(|U| - 1) / 2`, the maximum matching size inside the set.
    pub fn half_floor(&self) -> usize {
        (self.members.len() - 1) / 2
    }
}
