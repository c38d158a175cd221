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

//! Recovery capacity `C(y,k) = max{M1, M2}` and the feasibility ratio `β(y)`.
//!
//! `M1` is the worst node: the sum of the `k` heaviest per-channel loads on its
//! incident links. `M2` is the worst odd set `U`: the `k` heaviest per-channel
//! loads inside `E(U)`, scaled by `2/(|U|-1)`. Both maximisations over channel
//! sets reduce to "sum of the `k` largest loads", so channel subsets are never
//! enumerated. Odd sets are enumerated exactly up to a node cap; above it `M2` is
//! bracketed between the exact three-node maximum and the node-load bounds.

mod oddset;
mod report;

pub use report::evaluation_json;

pub use oddset::OddSetWitness;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{ChannelAssignment, Network};
use crate::scalar::{top_k_sum, NearBest, Scalar};

/// Default node cap for exact odd-set enumeration (about 2^18 subsets).
pub const DEFAULT_ODDSET_EXACT_CAP: usize = 18;

/// Hard limit imposed by the bitmask used during enumeration.
pub const MAX_ODDSET_EXACT_CAP: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Bracket,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Bracket => "bracket",
        }
    }
}

/// A value known exactly or only up to a closed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate<T> {
    Exact(T),
    Interval { lo: T, hi: T },
}

impl<T: Scalar> Estimate<T> {
    pub fn lo(&self) -> T {
        match *self {
            Estimate::Exact(x) => x,
            Estimate::Interval { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> T {
        match *self {
            Estimate::Exact(x) => x,
            Estimate::Interval { hi, .. } => hi,
        }
    }

    pub fn exact(&self) -> Option<T> {
        match *self {
            Estimate::Exact(x) => Some(x),
            Estimate::Interval { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Estimate::Exact(_))
    }

    /// Membership with the absolute tolerance on both ends.
    pub fn contains(&self, x: T) -> bool {
        let eps = T::tolerance();
        x >= self.lo() - eps && x <= self.hi() + eps
    }
}

/// Node and channel set realising `M1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeWitness {
    pub node: usize,
    pub channels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport<T = f64> {
    pub m1: T,
    pub witness_m1: Option<NodeWitness>,
    pub m2: Estimate<T>,
    pub witness_m2: Option<OddSetWitness>,
    pub capacity: Estimate<T>,
    pub k: usize,
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feasibility {
    Yes,
    No,
    Unknown,
}

impl Feasibility {
    pub fn as_str(self) -> &'static str {
        match self {
            Feasibility::Yes => "yes",
            Feasibility::No => "no",
            Feasibility::Unknown => "unknown",
        }
    }
}

/// `β(y) = min{Z1, Z2}`: the largest uniform scaling of all demands that keeps
/// every node and odd-set constraint of every channel satisfied.
///
/// Infinite values (no loaded constraint) are represented by `T::infinity()`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport<T = f64> {
    pub z1: T,
    /// `(node, channel)` of the tightest node constraint.
    pub witness_z1: Option<(usize, usize)>,
    pub z2: Estimate<T>,
    pub witness_z2: Option<OddSetWitness>,
    pub beta: Estimate<T>,
    pub feasible: Feasibility,
    pub mode: Mode,
}

/// Per-channel demand on links incident on `v`.
pub fn node_channel_loads<T: Scalar>(net: &Network<T>, y: &ChannelAssignment, v: usize) -> Result<Vec<T>> {
    let mut loads = vec![T::zero(); net.n_channels()];
    for &e in net.incident_edges(v)? {
        loads[y.channel(e)] = loads[y.channel(e)] + net.demand(e);
    }
    Ok(loads)
}

/// `Σ_{e∈δ(v)} r_e y_e^w`.
pub fn channel_load_at_node<T: Scalar>(
    net: &Network<T>,
    y: &ChannelAssignment,
    v: usize,
    w: usize,
) -> Result<T> {
    if w >= net.n_channels() {
        return Err(Error::InvalidChannel { channel: w, n_channels: net.n_channels() });
    }
    Ok(net
        .incident_edges(v)?
        .iter()
        .filter(|&&e| y.channel(e) == w)
        .fold(T::zero(), |acc, &e| acc + net.demand(e)))
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidK)
    } else {
        Ok(())
    }
}

/// Worst node over arbitrary link weights, for the `k` heaviest channels.
fn max_over_nodes<T: Scalar>(
    net: &Network<T>,
    y: &ChannelAssignment,
    weight: &[T],
    k: usize,
) -> (T, Option<NodeWitness>) {
    let mut tracker = NearBest::maximizing();
    let mut loads = vec![T::zero(); net.n_channels()];
    for v in 0..net.n_nodes() {
        loads.iter_mut().for_each(|x| *x = T::zero());
        for &e in net.incident(v) {
            loads[y.channel(e)] = loads[y.channel(e)] + weight[e];
        }
        let (value, channels) = top_k_sum(&loads, k);
        tracker.offer(value, || (v, channels));
    }
    match tracker.finish() {
        Some((value, (node, channels))) => (value, Some(NodeWitness { node, channels })),
        None => (T::zero(), None),
    }
}

fn demands<T: Scalar>(net: &Network<T>) -> Vec<T> {
    net.edges().iter().map(|l| l.demand).collect()
}

/// Time share `r_e / R[y_e][e]` of each link on its assigned channel.
fn normalized_loads<T: Scalar>(net: &Network<T>, y: &ChannelAssignment) -> Vec<T> {
    (0..net.n_edges()).map(|e| net.demand(e) / net.capacity(y.channel(e), e)).collect()
}

/// `M1(y,k)` with the lexicographically smallest `(node, channel set)` witness.
///
/// With `k >= |W|` this is the largest total node demand.
pub fn compute_m1<T: Scalar>(net: &Network<T>, y: &ChannelAssignment, k: usize) -> Result<(T, Option<NodeWitness>)> {
    check_k(k)?;
    Ok(max_over_nodes(net, y, &demands(net), k))
}

/// Bounds `lo <= M2(y,k) <= hi`, computable at any size.
///
/// `lo` is the exact maximum over three-node sets. Sets with at least five nodes
/// are worth at most `5/4 M1`, so `hi = max(lo, 1.25 M1)`; with fewer than five
/// nodes the three-node maximum is already exact.
pub fn compute_m2_bracket<T: Scalar>(net: &Network<T>, y: &ChannelAssignment, k: usize) -> Result<(T, T)> {
    check_k(k)?;
    let weights = demands(net);
    let (m1, _) = max_over_nodes(net, y, &weights, k);
    Ok(bracket_from(net, y, &weights, k, m1))
}

fn bracket_from<T: Scalar>(net: &Network<T>, y: &ChannelAssignment, weight: &[T], k: usize, node_max: T) -> (T, T) {
    let lo = oddset::max_over_triples(net, y, weight, k);
    let hi = if net.n_nodes() < 5 { lo } else { lo.max(T::lit(1.25) * node_max) };
    (lo, hi)
}

/// True iff no two links sharing a node use the same channel.
pub fn is_interference_free<T: Scalar>(net: &Network<T>, y: &ChannelAssignment) -> bool {
    let mut seen = vec![usize::MAX; net.n_channels()];
    (0..net.n_nodes()).all(|v| {
        net.incident(v).iter().all(|&e| {
            let w = y.channel(e);
            let fresh = seen[w] != v;
            seen[w] = v;
            fresh
        })
    })
}

/// Metric evaluation with a configurable cap on exact odd-set enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluator {
    pub oddset_exact_cap: usize,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator { oddset_exact_cap: DEFAULT_ODDSET_EXACT_CAP }
    }
}

impl Evaluator {
    pub fn with_cap(oddset_exact_cap: usize) -> Self {
        Evaluator { oddset_exact_cap: oddset_exact_cap.min(MAX_ODDSET_EXACT_CAP) }
    }

    pub fn exact_allowed<T: Scalar>(&self, net: &Network<T>) -> bool {
        net.n_nodes() <= self.oddset_exact_cap.min(MAX_ODDSET_EXACT_CAP)
    }

    /// Exact when the node count permits, bracketed otherwise.
    pub fn default_mode<T: Scalar>(&self, net: &Network<T>) -> Mode {
        if self.exact_allowed(net) {
            Mode::Exact
        } else {
            Mode::Bracket
        }
    }

    fn require_exact<T: Scalar>(&self, net: &Network<T>) -> Result<()> {
        if self.exact_allowed(net) {
            Ok(())
        } else {
            Err(Error::ExactDisabled { n_nodes: net.n_nodes(), cap: self.oddset_exact_cap })
        }
    }

    /// Exact `M2(y,k)` by enumerating every odd node set.
    pub fn m2_exact<T: Scalar>(
        &self,
        net: &Network<T>,
        y: &ChannelAssignment,
        k: usize,
    ) -> Result<(T, Option<OddSetWitness>)> {
        check_k(k)?;
        self.require_exact(net)?;
        Ok(oddset::max_over_odd_sets(net, y, &demands(net), &[k]).pop().expect("one k requested"))
    }

    pub fn recovery_capacity<T: Scalar>(
        &self,
        net: &Network<T>,
        y: &ChannelAssignment,
        k: usize,
        mode: Mode,
    ) -> Result<RecoveryReport<T>> {
        Ok(self.recovery_capacity_multi(net, y, &[k], mode)?.pop().expect("one k requested"))
    }

    /// [`Evaluator::recovery_capacity`] for several `k` sharing one odd-set pass.
    pub fn recovery_capacity_multi<T: Scalar>(
        &self,
        net: &Network<T>,
        y: &ChannelAssignment,
        ks: &[usize],
        mode: Mode,
    ) -> Result<Vec<RecoveryReport<T>>> {
        for &k in ks {
            check_k(k)?;
        }
        let weights = demands(net);
        let m1s: Vec<_> = ks.iter().map(|&k| max_over_nodes(net, y, &weights, k)).collect();
        match mode {
            Mode::Exact => {
                self.require_exact(net)?;
                let m2s = oddset::max_over_odd_sets(net, y, &weights, ks);
                Ok(ks
                    .iter()
                    .zip(m1s)
                    .zip(m2s)
                    .map(|((&k, (m1, witness_m1)), (m2, witness_m2))| RecoveryReport {
                        m1,
                        witness_m1,
                        m2: Estimate::Exact(m2),
                        witness_m2,
                        capacity: Estimate::Exact(m1.max(m2)),
                        k,
                        mode,
                    })
                    .collect())
            }
            Mode::Bracket => Ok(ks
                .iter()
                .zip(m1s)
                .map(|(&k, (m1, witness_m1))| {
                    let (lo, hi) = bracket_from(net, y, &weights, k, m1);
                    RecoveryReport {
                        m1,
                        witness_m1,
                        m2: Estimate::Interval { lo, hi },
                        witness_m2: None,
                        capacity: Estimate::Interval { lo: m1.max(lo), hi: m1.max(hi) },
                        k,
                        mode,
                    }
                })
                .collect()),
        }
    }

    pub fn feasibility_ratio<T: Scalar>(
        &self,
        net: &Network<T>,
        y: &ChannelAssignment,
        mode: Mode,
    ) -> Result<FeasibilityReport<T>> {
        let q = normalized_loads(net, y);
        let (node_load, node_witness) = max_over_nodes(net, y, &q, 1);
        let invert = |load: T| if load > T::zero() { T::one() / load } else { T::infinity() };
        let z1 = invert(node_load);
        let witness_z1 = node_witness
            .filter(|_| node_load > T::zero())
            .map(|w| (w.node, w.channels[0]));
        let threshold = T::one() - T::tolerance();
        let (z2, witness_z2, beta, feasible) = match mode {
            Mode::Exact => {
                self.require_exact(net)?;
                let (odd_load, witness) =
                    oddset::max_over_odd_sets(net, y, &q, &[1]).pop().expect("one k requested");
                let z2 = invert(odd_load);
                let beta = z1.min(z2);
                let feasible = if beta >= threshold { Feasibility::Yes } else { Feasibility::No };
                let witness = witness.filter(|_| odd_load > T::zero());
                (Estimate::Exact(z2), witness, Estimate::Exact(beta), feasible)
            }
            Mode::Bracket => {
                let (lo, hi) = bracket_from(net, y, &q, 1, node_load);
                let z2 = Estimate::Interval { lo: invert(hi), hi: invert(lo) };
                let beta = Estimate::Interval { lo: z1.min(invert(hi)), hi: z1.min(invert(lo)) };
                let feasible = if beta.lo() >= threshold {
                    Feasibility::Yes
                } else if beta.hi() < threshold {
                    Feasibility::No
                } else {
                    Feasibility::Unknown
                };
                (z2, None, beta, feasible)
            }
        };
        Ok(FeasibilityReport { z1, witness_z1, z2, witness_z2, beta, feasible, mode })
    }

    /// Feasibility in the default mode for this network size.
    pub fn is_feasible<T: Scalar>(&self, net: &Network<T>, y: &ChannelAssignment) -> Feasibility {
        self.feasibility_ratio(net, y, self.default_mode(net))
            .map(|r| r.feasible)
            .unwrap_or(Feasibility::Unknown)
    }
}

/// Exact `M2(y,k)` under the default node cap.
pub fn compute_m2_exact<T: Scalar>(
    net: &Network<T>,
    y: &ChannelAssignment,
    k: usize,
) -> Result<(T, Option<OddSetWitness>)> {
    Evaluator::default().m2_exact(net, y, k)
}

pub fn recovery_capacity<T: Scalar>(
    net: &Network<T>,
    y: &ChannelAssignment,
    k: usize,
    mode: Mode,
) -> Result<RecoveryReport<T>> {
    Evaluator::default().recovery_capacity(net, y, k, mode)
}

pub fn feasibility_ratio<T: Scalar>(net: &Network<T>, y: &ChannelAssignment, mode: Mode) -> Result<FeasibilityReport<T>> {
    Evaluator::default().feasibility_ratio(net, y, mode)
}

pub fn is_feasible<T: Scalar>(net: &Network<T>, y: &ChannelAssignment) -> Feasibility {
    Evaluator::default().is_feasible(net, y)
}

#[cfg(test)]
mod tests;
