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

//! Random instances and the scaling, gap and sustained-traffic studies.
//!
//! Every instance is generated from its own seed, derived from the master seed
//! and the instance index with [`derive_seed`], so studies give the same
//! records however the work is split across threads.

mod studies;

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::netmodel::{Capacity, ChannelAssignment, Network};
use crate::scalar::Scalar;

pub use studies::{
    run_gap_study, run_scaling_study, run_traffic_study, GapCell, GapConfig, GapSummary, ScalingConfig,
    ScalingPoint, ScalingSeries, ScalingSummary, StudyOutput, TrafficCell, TrafficConfig, TrafficSummary,
};

/// Exact CSV header of study output.
pub const CSV_HEADER: [&str; 16] = [
    "instance_id",
    "seed",
    "n_nodes",
    "n_edges",
    "n_channels",
    "k",
    "algorithm",
    "m1",
    "m2_lo",
    "m2_hi",
    "capacity_lo",
    "capacity_hi",
    "beta",
    "l_tot",
    "ratio",
    "runtime_ms",
];

/// Seed of instance `index` under master seed `master`: the splitmix64 output
/// for state `master + (index + 1) * 0x9E3779B97F4A7C15`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Parameters of one random instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub n_nodes: usize,
    pub edge_prob: f64,
    pub degree_cap: usize,
    /// Inclusive; equal ends give uniform demands.
    pub demand_range: (f64, f64),
    /// Inclusive, drawn once per channel.
    pub capacity_range: (f64, f64),
    /// Draw a single capacity shared by all channels.
    pub homogeneous: bool,
    pub n_channels: usize,
    pub k: usize,
    pub seed: u64,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            n_nodes: 20,
            edge_prob: 0.6,
            degree_cap: 8,
            demand_range: (1.0, 100.0),
            capacity_range: (75.0, 200.0),
            homogeneous: false,
            n_channels: 3,
            k: 1,
            seed: 0,
        }
    }
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.into()));
        if !(self.edge_prob > 0.0 && self.edge_prob <= 1.0) {
            return bad("edge_prob must lie in (0, 1]");
        }
        if self.degree_cap == 0 {
            return bad("degree_cap must be >= 1");
        }
        for (name, (lo, hi)) in [("demand_range", self.demand_range), ("capacity_range", self.capacity_range)] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} must satisfy 0 < lo <= hi")));
            }
        }
        if self.n_channels == 0 {
            return bad("n_channels must be >= 1");
        }
        if self.k == 0 {
            return bad("k must be >= 1");
        }
        Ok(())
    }

    /// Same parameters at another size, channel count, k and seed.
    pub fn at(&self, n_nodes: usize, n_channels: usize, k: usize, seed: u64) -> Self {
        InstanceSpec { n_nodes, n_channels, k, seed, ..self.clone() }
    }
}

/// Random graph with degree cap: node pairs are visited in a seeded random
/// order and each is joined with probability `edge_prob` unless an endpoint
/// already has `degree_cap` links. Links come out sorted by endpoints.
pub fn generate_instance<T: Scalar>(spec: &InstanceSpec) -> Result<Network<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_nodes;
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(&mut rng);
    let mut degree = vec![0usize; n];
    let mut links = Vec::new();
    for (u, v) in pairs {
        if rng.gen_bool(spec.edge_prob) && degree[u] < spec.degree_cap && degree[v] < spec.degree_cap {
            degree[u] += 1;
            degree[v] += 1;
            links.push((u, v));
        }
    }
    links.sort_unstable();
    let (dlo, dhi) = spec.demand_range;
    let edges = links.into_iter().map(|(u, v)| (u, v, T::lit(rng.gen_range(dlo..=dhi)))).collect();
    let (clo, chi) = spec.capacity_range;
    let capacity = if spec.homogeneous {
        Capacity::Uniform(T::lit(rng.gen_range(clo..=chi)))
    } else {
        Capacity::PerChannel((0..spec.n_channels).map(|_| T::lit(rng.gen_range(clo..=chi))).collect())
    };
    Network::new(n, spec.n_channels, edges, capacity)
}

/// One algorithm evaluated on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub instance_id: u64,
    pub seed: u64,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub n_channels: usize,
    pub k: usize,
    pub algorithm: &'static str,
    pub m1: f64,
    pub m2_lo: f64,
    pub m2_hi: f64,
    pub capacity_lo: f64,
    pub capacity_hi: f64,
    /// Lower end of the `β` interval (exact in exact mode).
    pub beta: f64,
    pub l_tot: f64,
    /// `capacity_hi / l_tot`.
    pub ratio: f64,
    pub runtime_ms: f64,
    pub assignment: ChannelAssignment,
}

impl ExperimentRecord {
    /// `min(β, 1)`.
    pub fn sustained(&self) -> f64 {
        self.beta.min(1.0)
    }
}

fn fixed(x: f64) -> String {
    if x.is_finite() {
        format!("{:.9}", if x == 0.0 { 0.0 } else { x })
    } else {
        String::new()
    }
}

/// Writes the header and one row per record. `runtime_ms` stays empty unless
/// `timings` is set, so output is reproducible byte for byte.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], timings: bool, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.instance_id.to_string(),
            r.seed.to_string(),
            r.n_nodes.to_string(),
            r.n_edges.to_string(),
            r.n_channels.to_string(),
            r.k.to_string(),
            r.algorithm.to_string(),
            fixed(r.m1),
            fixed(r.m2_lo),
            fixed(r.m2_hi),
            fixed(r.capacity_lo),
            fixed(r.capacity_hi),
            fixed(r.beta),
            fixed(r.l_tot),
            fixed(r.ratio),
            if timings { format!("{:.3}", r.runtime_ms) } else { String::new() },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// usable points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
