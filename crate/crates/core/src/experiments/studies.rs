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

use std::time::Instant;

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::assign::{greedy_assign, ifa_assign, random_assign, shuffled_order, DEFAULT_SEED};
use crate::error::Result;
use crate::json::fixed9;
use crate::metrics::Evaluator;
use crate::netmodel::{ChannelAssignment, Network};
use crate::oracles::{Oracle, OracleResult, Problem, DEFAULT_BUDGET, MAX_ORACLE_NODES};
use crate::scalar::Scalar;

use super::{derive_seed, generate_instance, loglog_slope, ExperimentRecord, InstanceSpec};

const EPS: f64 = 1e-9;

/// Records in instance order plus a study-specific summary.
#[derive(Debug, Clone)]
pub struct StudyOutput<S> {
    pub records: Vec<ExperimentRecord>,
    pub summary: S,
}

fn num(x: f64) -> Value {
    fixed9(x)
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, fixed9)
}

fn mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

struct Instance {
    id: u64,
    seed: u64,
    net: Network,
}

impl Instance {
    fn new(template: &InstanceSpec, master: u64, id: u64, n: usize, nw: usize, k: usize) -> Result<Self> {
        let seed = derive_seed(master, id);
        Ok(Instance { id, seed, net: generate_instance(&template.at(n, nw, k, seed))? })
    }

    fn greedy(&self) -> ChannelAssignment {
        let order = shuffled_order(self.net.n_edges(), derive_seed(self.seed, 2));
        greedy_assign(&self.net, &order).expect("order is a permutation")
    }

    fn random(&self) -> ChannelAssignment {
        random_assign(&self.net, derive_seed(self.seed, 1))
    }

    fn record(
        &self,
        evaluator: &Evaluator,
        algorithm: &'static str,
        y: ChannelAssignment,
        k: usize,
        runtime_ms: f64,
    ) -> Result<ExperimentRecord> {
        let mode = evaluator.default_mode(&self.net);
        let rep = evaluator.recovery_capacity(&self.net, &y, k, mode)?;
        let feas = evaluator.feasibility_ratio(&self.net, &y, mode)?;
        let l_tot = self.net.total_demand();
        Ok(ExperimentRecord {
            instance_id: self.id,
            seed: self.seed,
            n_nodes: self.net.n_nodes(),
            n_edges: self.net.n_edges(),
            n_channels: self.net.n_channels(),
            k,
            algorithm,
            m1: rep.m1,
            m2_lo: rep.m2.lo(),
            m2_hi: rep.m2.hi(),
            capacity_lo: rep.capacity.lo(),
            capacity_hi: rep.capacity.hi(),
            beta: feas.beta.lo(),
            l_tot,
            ratio: if l_tot > 0.0 { rep.capacity.hi() / l_tot } else { 0.0 },
            runtime_ms,
            assignment: y,
        })
    }
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, f64) {
    let t = Instant::now();
    let r = f();
    (r, ms_since(t))
}

/// IFA is interference-free on every instance of a cell when `|W|` exceeds
/// the largest degree the generator can produce.
fn ifa_defined(template: &InstanceSpec, n: usize, nw: usize) -> bool {
    nw > template.degree_cap.min(n.saturating_sub(1))
}

// ---------------------------------------------------------------- scaling

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub sizes: Vec<usize>,
    pub channels: Vec<usize>,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub template: InstanceSpec,
    pub evaluator: Evaluator,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            sizes: (1..=10).map(|i| 20 * i).collect(),
            channels: vec![3, 5],
            k: 2,
            trials: 100,
            seed: DEFAULT_SEED,
            template: InstanceSpec::default(),
            evaluator: Evaluator::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPoint {
    pub n_nodes: usize,
    pub instances: usize,
    pub mean_ratio: f64,
    pub mean_ratio_lo: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSeries {
    pub n_channels: usize,
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of `ln(mean ratio)` against `ln |V|`.
    pub slope: Option<f64>,
    /// `-slope`: the ratio scales as `|V|^-a`.
    pub exponent: Option<f64>,
    /// Uniform demands only: instances where the capacity is certainly above
    /// `r k ceil((d_max + 1) / |W|)`, and where the bracket cannot decide.
    pub bound_violations: Option<usize>,
    pub bound_undecided: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSummary {
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub series: Vec<ScalingSeries>,
}

impl ScalingSummary {
    pub fn to_json(&self) -> Value {
        let series: Vec<Value> = self
            .series
            .iter()
            .map(|s| {
                let mut m = Map::new();
                m.insert("n_channels".into(), s.n_channels.into());
                m.insert("slope".into(), opt_num(s.slope));
                m.insert("exponent".into(), opt_num(s.exponent));
                let points: Vec<Value> = s
                    .points
                    .iter()
                    .map(|p| {
                        let mut pm = Map::new();
                        pm.insert("n_nodes".into(), p.n_nodes.into());
                        pm.insert("instances".into(), p.instances.into());
                        pm.insert("mean_ratio".into(), num(p.mean_ratio));
                        pm.insert("mean_ratio_lo".into(), num(p.mean_ratio_lo));
                        Value::Object(pm)
                    })
                    .collect();
                m.insert("points".into(), points.into());
                if let (Some(v), Some(u)) = (s.bound_violations, s.bound_undecided) {
                    m.insert("bound_violations".into(), v.into());
                    m.insert("bound_undecided".into(), u.into());
                }
                Value::Object(m)
            })
            .collect();
        let mut m = Map::new();
        m.insert("study".into(), "scaling".into());
        m.insert("k".into(), self.k.into());
        m.insert("trials".into(), self.trials.into());
        m.insert("seed".into(), self.seed.into());
        m.insert("series".into(), series.into());
        Value::Object(m)
    }
}

/// IFA on random instances of growing size; the ratio of recovery capacity
/// (upper end of its bracket) to total demand, averaged per size, is fitted
/// on a log-log scale.
pub fn run_scaling_study(cfg: &ScalingConfig) -> Result<StudyOutput<ScalingSummary>> {
    let uniform = cfg.template.demand_range.0 == cfg.template.demand_range.1;
    let mut jobs = Vec::new();
    for &nw in &cfg.channels {
        for &n in &cfg.sizes {
            for _ in 0..cfg.trials {
                jobs.push((jobs.len() as u64, n, nw));
            }
        }
    }
    let rows: Vec<(ExperimentRecord, Option<f64>)> = jobs
        .par_iter()
        .map(|&(id, n, nw)| {
            let inst = Instance::new(&cfg.template, cfg.seed, id, n, nw, cfg.k)?;
            let (y, ms) = timed(|| ifa_assign(&inst.net));
            let rec = inst.record(&cfg.evaluator, "ifa", y, cfg.k, ms)?;
            let bound = uniform.then(|| {
                let per_node = (inst.net.max_degree() + 1).div_ceil(nw);
                cfg.template.demand_range.0 * (cfg.k * per_node) as f64
            });
            Ok((rec, bound))
        })
        .collect::<Result<_>>()?;
    let series = cfg
        .channels
        .iter()
        .map(|&nw| {
            let of_series: Vec<&(ExperimentRecord, Option<f64>)> =
                rows.iter().filter(|(r, _)| r.n_channels == nw).collect();
            let points: Vec<ScalingPoint> = cfg
                .sizes
                .iter()
                .map(|&n| {
                    let at: Vec<&ExperimentRecord> =
                        of_series.iter().map(|(r, _)| r).filter(|r| r.n_nodes == n).collect();
                    ScalingPoint {
                        n_nodes: n,
                        instances: at.len(),
                        mean_ratio: mean(at.iter().map(|r| r.ratio)).unwrap_or(0.0),
                        mean_ratio_lo: mean(
                            at.iter().map(|r| if r.l_tot > 0.0 { r.capacity_lo / r.l_tot } else { 0.0 }),
                        )
                        .unwrap_or(0.0),
                    }
                })
                .collect();
            let slope = loglog_slope(&points.iter().map(|p| (p.n_nodes as f64, p.mean_ratio)).collect::<Vec<_>>());
            let (bound_violations, bound_undecided) = if uniform {
                let v = of_series.iter().filter(|(r, b)| r.capacity_lo > b.unwrap() + EPS).count();
                let u = of_series
                    .iter()
                    .filter(|(r, b)| r.capacity_lo <= b.unwrap() + EPS && r.capacity_hi > b.unwrap() + EPS)
                    .count();
                (Some(v), Some(u))
            } else {
                (None, None)
            };
            ScalingSeries { n_channels: nw, points, slope, exponent: slope.map(|s| -s), bound_violations, bound_undecided }
        })
        .collect();
    Ok(StudyOutput {
        records: rows.into_iter().map(|(r, _)| r).collect(),
        summary: ScalingSummary { k: cfg.k, trials: cfg.trials, seed: cfg.seed, series },
    })
}

// ---------------------------------------------------------------- gap

#[derive(Debug, Clone, PartialEq)]
pub struct GapConfig {
    pub sizes: Vec<usize>,
    pub channels: Vec<usize>,
    pub ks: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub template: InstanceSpec,
    pub budget: u64,
    pub evaluator: Evaluator,
}

impl Default for GapConfig {
    fn default() -> Self {
        GapConfig {
            sizes: vec![6, 8, 10],
            channels: vec![2, 3],
            ks: vec![1, 2],
            trials: 200,
            seed: DEFAULT_SEED,
            template: InstanceSpec { degree_cap: 2, ..InstanceSpec::default() },
            budget: DEFAULT_BUDGET,
            evaluator: Evaluator::default(),
        }
    }
}

/// Means over instances whose optimum was proven and feasible. `ifa` is
/// `None` (N/A) when `|W|` does not exceed the degree cap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCell {
    pub n_nodes: usize,
    pub n_channels: usize,
    pub k: usize,
    pub instances: usize,
    pub solved: usize,
    pub infeasible: Vec<u64>,
    pub budget_exhausted: Vec<u64>,
    pub ifa_defined: bool,
    pub mean_gap_random: Option<f64>,
    pub mean_gap_greedy: Option<f64>,
    pub mean_gap_ifa: Option<f64>,
    pub max_gap_greedy: Option<f64>,
    pub max_gap_ifa: Option<f64>,
    /// Gaps on infeasible instances, against the unconstrained optimum.
    pub mean_gap_relaxed_greedy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapSummary {
    pub trials: usize,
    pub seed: u64,
    pub cells: Vec<GapCell>,
}

impl GapSummary {
    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .cells
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("n_nodes".into(), c.n_nodes.into());
                m.insert("n_channels".into(), c.n_channels.into());
                m.insert("k".into(), c.k.into());
                m.insert("instances".into(), c.instances.into());
                m.insert("solved".into(), c.solved.into());
                let mut gap = Map::new();
                gap.insert("random".into(), opt_num(c.mean_gap_random));
                gap.insert("greedy".into(), opt_num(c.mean_gap_greedy));
                gap.insert("ifa".into(), if c.ifa_defined { opt_num(c.mean_gap_ifa) } else { "N/A".into() });
                m.insert("mean_gap".into(), gap.into());
                let mut worst = Map::new();
                worst.insert("greedy".into(), opt_num(c.max_gap_greedy));
                worst.insert("ifa".into(), if c.ifa_defined { opt_num(c.max_gap_ifa) } else { "N/A".into() });
                m.insert("max_gap".into(), worst.into());
                m.insert("infeasible_instances".into(), c.infeasible.clone().into());
                m.insert("mean_gap_relaxed_greedy".into(), opt_num(c.mean_gap_relaxed_greedy));
                m.insert("budget_exhausted_instances".into(), c.budget_exhausted.clone().into());
                Value::Object(m)
            })
            .collect();
        let mut m = Map::new();
        m.insert("study".into(), "gap".into());
        m.insert("trials".into(), self.trials.into());
        m.insert("seed".into(), self.seed.into());
        m.insert("cells".into(), cells.into());
        Value::Object(m)
    }
}

enum Optimum {
    Feasible(f64),
    Infeasible(f64),
    Exhausted,
}

fn oracle_record(
    inst: &Instance,
    evaluator: &Evaluator,
    name: &'static str,
    res: &OracleResult,
    k: usize,
    ms: f64,
) -> Result<Option<ExperimentRecord>> {
    match &res.best_assignment {
        Some(y) if res.proven_optimal => inst.record(evaluator, name, y.clone(), k, ms).map(Some),
        _ => Ok(None),
    }
}

/// Greedy, random and IFA against the exact optimum on small instances.
/// Gap is `(ALG - OPT) / OPT`.
pub fn run_gap_study(cfg: &GapConfig) -> Result<StudyOutput<GapSummary>> {
    let oracle = Oracle::with_budget(cfg.budget);
    let mut jobs = Vec::new();
    for &n in &cfg.sizes {
        for &nw in &cfg.channels {
            for _ in 0..cfg.trials {
                jobs.push((jobs.len() as u64, n, nw));
            }
        }
    }
    type Outcome = (Vec<ExperimentRecord>, Vec<(usize, Optimum)>);
    let outcomes: Vec<Outcome> = jobs
        .par_iter()
        .map(|&(id, n, nw)| {
            let inst = Instance::new(&cfg.template, cfg.seed, id, n, nw, cfg.ks[0])?;
            let (greedy, t_greedy) = timed(|| inst.greedy());
            let (random, t_random) = timed(|| inst.random());
            let ifa = ifa_defined(&cfg.template, n, nw).then(|| timed(|| ifa_assign(&inst.net)));
            let mut records = Vec::new();
            let mut optima = Vec::new();
            for &k in &cfg.ks {
                let (res, t_opt) = timed(|| oracle.solve(&inst.net, Problem::WhiteRec, k));
                let res = res?;
                let optimum = if !res.proven_optimal {
                    Optimum::Exhausted
                } else if let Some(c) = res.objective {
                    records.extend(oracle_record(&inst, &cfg.evaluator, "optimal", &res, k, t_opt)?);
                    Optimum::Feasible(c)
                } else {
                    let (relaxed, t_relaxed) = timed(|| oracle.solve(&inst.net, Problem::WhiteRecInf, k));
                    let relaxed = relaxed?;
                    records.extend(oracle_record(&inst, &cfg.evaluator, "optimal_relaxed", &relaxed, k, t_relaxed)?);
                    match (relaxed.proven_optimal, relaxed.objective) {
                        (true, Some(c)) => Optimum::Infeasible(c),
                        _ => Optimum::Exhausted,
                    }
                };
                optima.push((k, optimum));
                records.push(inst.record(&cfg.evaluator, "greedy", greedy.clone(), k, t_greedy)?);
                if let Some((y, t)) = &ifa {
                    records.push(inst.record(&cfg.evaluator, "ifa", y.clone(), k, *t)?);
                }
                records.push(inst.record(&cfg.evaluator, "random", random.clone(), k, t_random)?);
            }
            Ok((records, optima))
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for &n in &cfg.sizes {
        for &nw in &cfg.channels {
            for &k in &cfg.ks {
                let defined = ifa_defined(&cfg.template, n, nw);
                let mut cell = GapCell {
                    n_nodes: n,
                    n_channels: nw,
                    k,
                    instances: 0,
                    solved: 0,
                    infeasible: Vec::new(),
                    budget_exhausted: Vec::new(),
                    ifa_defined: defined,
                    mean_gap_random: None,
                    mean_gap_greedy: None,
                    mean_gap_ifa: None,
                    max_gap_greedy: None,
                    max_gap_ifa: None,
                    mean_gap_relaxed_greedy: None,
                };
                let (mut random, mut greedy, mut ifa, mut relaxed) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
                for ((id, jn, jw), (records, optima)) in jobs.iter().zip(&outcomes) {
                    if (*jn, *jw) != (n, nw) {
                        continue;
                    }
                    cell.instances += 1;
                    let cap_of = |alg: &str| {
                        records.iter().find(|r| r.k == k && r.algorithm == alg).map(|r| r.capacity_hi)
                    };
                    let gap = |alg: &str, opt: f64| cap_of(alg).map(|c| (c - opt) / opt);
                    match optima.iter().find(|(kk, _)| *kk == k).map(|(_, o)| o) {
                        Some(Optimum::Feasible(opt)) if *opt > 0.0 => {
                            cell.solved += 1;
                            random.extend(gap("random", *opt));
                            greedy.extend(gap("greedy", *opt));
                            ifa.extend(gap("ifa", *opt));
                        }
                        Some(Optimum::Feasible(_)) => cell.solved += 1,
                        Some(Optimum::Infeasible(opt)) => {
                            cell.infeasible.push(*id);
                            if *opt > 0.0 {
                                relaxed.extend(gap("greedy", *opt));
                            }
                        }
                        _ => cell.budget_exhausted.push(*id),
                    }
                }
                cell.mean_gap_random = mean(random.iter().copied());
                cell.mean_gap_greedy = mean(greedy.iter().copied());
                cell.max_gap_greedy = greedy.iter().copied().reduce(f64::max);
                if defined {
                    cell.mean_gap_ifa = mean(ifa.iter().copied());
                    cell.max_gap_ifa = ifa.iter().copied().reduce(f64::max);
                }
                cell.mean_gap_relaxed_greedy = mean(relaxed);
                cells.push(cell);
            }
        }
    }
    Ok(StudyOutput {
        records: outcomes.into_iter().flat_map(|(r, _)| r).collect(),
        summary: GapSummary { trials: cfg.trials, seed: cfg.seed, cells },
    })
}

// ---------------------------------------------------------------- traffic

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficConfig {
    pub sizes: Vec<usize>,
    pub channels: Vec<usize>,
    /// Capacity models to run: per-channel draws (`false`) and a single shared draw (`true`).
    pub homogeneous: Vec<bool>,
    pub trials: usize,
    pub seed: u64,
    pub template: InstanceSpec,
    pub budget: u64,
    pub evaluator: Evaluator,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig {
            sizes: vec![6, 8, 10],
            channels: vec![2, 3],
            homogeneous: vec![false, true],
            trials: 200,
            seed: DEFAULT_SEED,
            template: InstanceSpec { degree_cap: 2, ..InstanceSpec::default() },
            budget: DEFAULT_BUDGET,
            evaluator: Evaluator::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficCell {
    pub n_nodes: usize,
    pub n_channels: usize,
    pub homogeneous: bool,
    pub instances: usize,
    /// Instances whose best `β` is at least 1.
    pub feasible: usize,
    /// Instances where the optimum was replaced by the bound `Rmax / C_lb(1)`.
    pub optimal_bounded: usize,
    pub ifa_defined: bool,
    pub mean_optimal: f64,
    pub mean_ifa: Option<f64>,
    pub mean_greedy: f64,
    pub mean_random: f64,
    /// Among feasible instances, the share on which IFA sustains all demand.
    pub ifa_full_on_feasible: Option<f64>,
    /// Feasible instances with greedy below `(1/rho) Rmin/Rmax`.
    pub greedy_bound_violations: usize,
    /// Feasible instances with IFA below `Rmin/Rmax`.
    pub ifa_bound_violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficSummary {
    pub trials: usize,
    pub seed: u64,
    pub cells: Vec<TrafficCell>,
}

impl TrafficSummary {
    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .cells
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("n_nodes".into(), c.n_nodes.into());
                m.insert("n_channels".into(), c.n_channels.into());
                m.insert("homogeneous".into(), c.homogeneous.into());
                m.insert("instances".into(), c.instances.into());
                m.insert("feasible".into(), c.feasible.into());
                m.insert("optimal_bounded".into(), c.optimal_bounded.into());
                let mut s = Map::new();
                s.insert("optimal".into(), num(c.mean_optimal));
                s.insert("ifa".into(), if c.ifa_defined { opt_num(c.mean_ifa) } else { "N/A".into() });
                s.insert("greedy".into(), num(c.mean_greedy));
                s.insert("random".into(), num(c.mean_random));
                m.insert("mean_sustained".into(), s.into());
                m.insert("ifa_full_on_feasible".into(), opt_num(c.ifa_full_on_feasible));
                m.insert("greedy_bound_violations".into(), c.greedy_bound_violations.into());
                m.insert("ifa_bound_violations".into(), c.ifa_bound_violations.into());
                Value::Object(m)
            })
            .collect();
        let mut m = Map::new();
        m.insert("study".into(), "traffic".into());
        m.insert("trials".into(), self.trials.into());
        m.insert("seed".into(), self.seed.into());
        m.insert("cells".into(), cells.into());
        Value::Object(m)
    }
}

/// Upper bound on the best `β` from the lower bound `max(max r_e, max_v d_v / |W|)` on `C(y,1)`.
fn beta_upper_bound<T: Scalar>(net: &Network<T>) -> f64 {
    let lb = net.max_demand().as_f64().max(net.max_node_demand().as_f64() / net.n_channels() as f64);
    match net.capacity_range() {
        Some((_, rmax)) if lb > 0.0 => rmax.as_f64() / lb,
        _ => f64::INFINITY,
    }
}

/// Sustained fraction `min(β, 1)` of each scheme against the best assignment.
pub fn run_traffic_study(cfg: &TrafficConfig) -> Result<StudyOutput<TrafficSummary>> {
    let oracle = Oracle::with_budget(cfg.budget);
    let mut jobs = Vec::new();
    for &n in &cfg.sizes {
        for &nw in &cfg.channels {
            for &h in &cfg.homogeneous {
                for _ in 0..cfg.trials {
                    jobs.push((jobs.len() as u64, n, nw, h));
                }
            }
        }
    }
    // records, best sustained fraction, whether it is only a bound, Rmin/Rmax
    type Outcome = (Vec<ExperimentRecord>, f64, bool, f64);
    let outcomes: Vec<Outcome> = jobs
        .par_iter()
        .map(|&(id, n, nw, h)| {
            let template = InstanceSpec { homogeneous: h, ..cfg.template.clone() };
            let inst = Instance::new(&template, cfg.seed, id, n, nw, 1)?;
            let mut records = Vec::new();
            let (best, bounded) = if n <= MAX_ORACLE_NODES {
                let (res, ms) = timed(|| oracle.solve(&inst.net, Problem::Feasi, 1));
                let res = res?;
                records.extend(oracle_record(&inst, &cfg.evaluator, "optimal", &res, 1, ms)?);
                match (res.proven_optimal, res.objective) {
                    (true, Some(beta)) => (beta.min(1.0), false),
                    _ => (beta_upper_bound(&inst.net).min(1.0), true),
                }
            } else {
                (beta_upper_bound(&inst.net).min(1.0), true)
            };
            let (y, t) = timed(|| inst.greedy());
            records.push(inst.record(&cfg.evaluator, "greedy", y, 1, t)?);
            if ifa_defined(&template, n, nw) {
                let (y, t) = timed(|| ifa_assign(&inst.net));
                records.push(inst.record(&cfg.evaluator, "ifa", y, 1, t)?);
            }
            let (y, t) = timed(|| inst.random());
            records.push(inst.record(&cfg.evaluator, "random", y, 1, t)?);
            let spread = inst.net.capacity_range().map_or(1.0, |(lo, hi)| lo / hi);
            Ok((records, best, bounded, spread))
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for &n in &cfg.sizes {
        for &nw in &cfg.channels {
            for &h in &cfg.homogeneous {
                let defined = ifa_defined(&cfg.template, n, nw);
                let rho = 1.5 * (3.0 - 2.0 / nw as f64);
                let of_cell: Vec<&Outcome> = jobs
                    .iter()
                    .zip(&outcomes)
                    .filter(|((_, jn, jw, jh), _)| (*jn, *jw, *jh) == (n, nw, h))
                    .map(|(_, o)| o)
                    .collect();
                let sustained = |o: &Outcome, alg: &str| {
                    o.0.iter().find(|r| r.algorithm == alg).map(ExperimentRecord::sustained)
                };
                let feasible: Vec<&&Outcome> = of_cell.iter().filter(|o| !o.2 && o.1 >= 1.0 - EPS).collect();
                let ifa_full = feasible.iter().filter_map(|o| sustained(o, "ifa")).map(|s| (s >= 1.0 - EPS) as u8 as f64);
                cells.push(TrafficCell {
                    n_nodes: n,
                    n_channels: nw,
                    homogeneous: h,
                    instances: of_cell.len(),
                    feasible: feasible.len(),
                    optimal_bounded: of_cell.iter().filter(|o| o.2).count(),
                    ifa_defined: defined,
                    mean_optimal: mean(of_cell.iter().map(|o| o.1)).unwrap_or(0.0),
                    mean_ifa: if defined { mean(of_cell.iter().filter_map(|o| sustained(o, "ifa"))) } else { None },
                    mean_greedy: mean(of_cell.iter().filter_map(|o| sustained(o, "greedy"))).unwrap_or(0.0),
                    mean_random: mean(of_cell.iter().filter_map(|o| sustained(o, "random"))).unwrap_or(0.0),
                    ifa_full_on_feasible: if defined { mean(ifa_full) } else { None },
                    greedy_bound_violations: feasible
                        .iter()
                        .filter(|o| sustained(o, "greedy").is_some_and(|s| s < o.3 / rho - EPS))
                        .count(),
                    ifa_bound_violations: feasible
                        .iter()
                        .filter(|o| sustained(o, "ifa").is_some_and(|s| s < o.3 - EPS))
                        .count(),
                });
            }
        }
    }
    Ok(StudyOutput {
        records: outcomes.into_iter().flat_map(|o| o.0).collect(),
        summary: TrafficSummary { trials: cfg.trials, seed: cfg.seed, cells },
    })
}
