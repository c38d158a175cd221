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

use std::fs;
use std::path::PathBuf;

use chanrec::experiments::{
    run_gap_study, run_scaling_study, run_traffic_study, write_csv, ExperimentRecord, GapConfig, InstanceSpec,
    ScalingConfig, TrafficConfig,
};
use chanrec::json::to_pretty_bytes;
use chanrec::Evaluator;
use clap::ValueEnum;
use serde_json::Value;

use crate::{emit, CliResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum StudyKind {
    Scaling,
    Gap,
    Traffic,
}

impl StudyKind {
    fn name(self) -> &'static str {
        match self {
            StudyKind::Scaling => "scaling",
            StudyKind::Gap => "gap",
            StudyKind::Traffic => "traffic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum CapacityModel {
    PerChannel,
    Homogeneous,
    Both,
}

/// Overrides of the random-instance parameters.
#[derive(Debug, Clone, clap::Args)]
pub(crate) struct GeneratorArgs {
    #[arg(long)]
    edge_prob: Option<f64>,
    #[arg(long)]
    degree_cap: Option<usize>,
    /// Inclusive demand range `lo,hi` in Mbps; `r,r` gives uniform demands.
    #[arg(long, value_delimiter = ',', value_name = "LO,HI")]
    demand_range: Option<Vec<f64>>,
    /// Inclusive per-channel capacity range `lo,hi` in Mbps.
    #[arg(long, value_delimiter = ',', value_name = "LO,HI")]
    capacity_range: Option<Vec<f64>>,
    /// One capacity shared by all channels.
    #[arg(long)]
    homogeneous: bool,
}

impl GeneratorArgs {
    fn apply(&self, base: InstanceSpec) -> CliResult<InstanceSpec> {
        let pair = |v: &Option<Vec<f64>>, d: (f64, f64), flag: &str| match v.as_deref() {
            None => Ok(d),
            Some([lo, hi]) => Ok((*lo, *hi)),
            Some(_) => Err(Failure::Usage(format!("--{flag} takes two values `lo,hi`"))),
        };
        let spec = InstanceSpec {
            edge_prob: self.edge_prob.unwrap_or(base.edge_prob),
            degree_cap: self.degree_cap.unwrap_or(base.degree_cap),
            demand_range: pair(&self.demand_range, base.demand_range, "demand-range")?,
            capacity_range: pair(&self.capacity_range, base.capacity_range, "capacity-range")?,
            homogeneous: self.homogeneous || base.homogeneous,
            ..base
        };
        spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(spec)
    }

    pub(crate) fn template(&self) -> CliResult<InstanceSpec> {
        self.apply(InstanceSpec::default())
    }
}

#[derive(Debug, clap::Args)]
pub(crate) struct StudyArgs {
    #[arg(value_enum)]
    kind: StudyKind,
    /// Node counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Channel counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    channels: Option<Vec<usize>>,
    /// Preemption counts; the scaling study takes exactly one.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = chanrec::assign::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    gen: GeneratorArgs,
    /// Capacity models for the traffic study.
    #[arg(long, value_enum, default_value = "both")]
    capacity_model: CapacityModel,
    /// Oracle budget per solve (gap and traffic).
    #[arg(long)]
    budget: Option<u64>,
    /// Largest node count for exact odd-set enumeration.
    #[arg(long, default_value_t = chanrec::metrics::DEFAULT_ODDSET_EXACT_CAP)]
    cap: usize,
    /// Directory for `<kind>.csv` and `<kind>_summary.json`.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// CSV path, overriding `--out-dir`; `-` for stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Summary JSON path, overriding `--out-dir`; `-` for stdout.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Fill the `runtime_ms` column (makes output machine dependent).
    #[arg(long)]
    timings: bool,
}

fn check_ks(ks: &[usize]) -> CliResult {
    if ks.contains(&0) {
        return Err(Failure::Input(chanrec::Error::InvalidK));
    }
    Ok(())
}

fn nonempty<T>(v: &[T], flag: &str) -> CliResult {
    if v.is_empty() {
        return Err(Failure::Usage(format!("--{flag} needs at least one value")));
    }
    Ok(())
}

fn execute(a: &StudyArgs) -> CliResult<(Vec<ExperimentRecord>, Value)> {
    let evaluator = Evaluator::with_cap(a.cap);
    match a.kind {
        StudyKind::Scaling => {
            let d = ScalingConfig::default();
            let ks = a.k.clone().unwrap_or(vec![d.k]);
            if ks.len() != 1 {
                return Err(Failure::Usage("the scaling study takes exactly one --k".into()));
            }
            check_ks(&ks)?;
            let cfg = ScalingConfig {
                sizes: a.sizes.clone().unwrap_or(d.sizes),
                channels: a.channels.clone().unwrap_or(d.channels),
                k: ks[0],
                trials: a.trials.unwrap_or(d.trials),
                seed: a.seed,
                template: a.gen.apply(d.template)?,
                evaluator,
            };
            nonempty(&cfg.sizes, "sizes")?;
            nonempty(&cfg.channels, "channels")?;
            let out = run_scaling_study(&cfg)?;
            Ok((out.records, out.summary.to_json()))
        }
        StudyKind::Gap => {
            let d = GapConfig::default();
            let cfg = GapConfig {
                sizes: a.sizes.clone().unwrap_or(d.sizes),
                channels: a.channels.clone().unwrap_or(d.channels),
                ks: a.k.clone().unwrap_or(d.ks),
                trials: a.trials.unwrap_or(d.trials),
                seed: a.seed,
                template: a.gen.apply(d.template)?,
                budget: a.budget.unwrap_or(d.budget),
                evaluator,
            };
            check_ks(&cfg.ks)?;
            nonempty(&cfg.sizes, "sizes")?;
            nonempty(&cfg.channels, "channels")?;
            nonempty(&cfg.ks, "k")?;
            let out = run_gap_study(&cfg)?;
            Ok((out.records, out.summary.to_json()))
        }
        StudyKind::Traffic => {
            let d = TrafficConfig::default();
            let homogeneous = match a.capacity_model {
                CapacityModel::PerChannel => vec![false],
                CapacityModel::Homogeneous => vec![true],
                CapacityModel::Both => vec![false, true],
            };
            let cfg = TrafficConfig {
                sizes: a.sizes.clone().unwrap_or(d.sizes),
                channels: a.channels.clone().unwrap_or(d.channels),
                homogeneous,
                trials: a.trials.unwrap_or(d.trials),
                seed: a.seed,
                template: a.gen.apply(d.template)?,
                budget: a.budget.unwrap_or(d.budget),
                evaluator,
            };
            nonempty(&cfg.sizes, "sizes")?;
            nonempty(&cfg.channels, "channels")?;
            let out = run_traffic_study(&cfg)?;
            Ok((out.records, out.summary.to_json()))
        }
    }
}

fn target(explicit: &Option<PathBuf>, dir: &PathBuf, file: String) -> Option<PathBuf> {
    match explicit {
        Some(p) if p.as_os_str() == "-" => None,
        Some(p) => Some(p.clone()),
        None => Some(dir.join(file)),
    }
}

pub(crate) fn run(a: StudyArgs) -> CliResult {
    if a.jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Io(e.to_string()))?;
    let (records, summary) = pool.install(|| execute(&a))?;
    let name = a.kind.name();
    if a.csv.is_none() || a.summary.is_none() {
        fs::create_dir_all(&a.out_dir)
            .map_err(|e| Failure::Io(format!("cannot create {}: {e}", a.out_dir.display())))?;
    }
    let mut csv = Vec::new();
    write_csv(&records, a.timings, &mut csv)?;
    emit(target(&a.csv, &a.out_dir, format!("{name}.csv")).as_deref(), &csv)?;
    emit(target(&a.summary, &a.out_dir, format!("{name}_summary.json")).as_deref(), &to_pretty_bytes(&summary))
}
