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

//! White-channel assignment for spectrum-sharing networks with a worst-case
//! preemption recovery guarantee.
//!
//! Every link of a secondary network is assigned one white channel. When any
//! `k` channels are preempted, the links on them switch to a backup channel;
//! [`metrics`] computes the backup capacity this needs and whether the
//! assignment sustains the traffic at all, [`assign`] builds assignments
//! (greedy, interference-free, random), [`oracles`] finds exact optima by
//! branch and bound on small instances, and [`experiments`] runs the scaling,
//! gap and sustained-traffic studies.
//!
//! The numeric core is generic over [`Scalar`] (`f64` or `f32`); the aliases
//! below fix it to `f64`.

pub mod assign;
pub mod error;
pub mod experiments;
pub mod json;
pub mod metrics;
pub mod netmodel;
pub mod oracles;
pub mod scalar;

pub use assign::{edge_color, greedy_assign, ifa_assign, random_assign, EdgeColoring};
pub use error::{Error, Result};
pub use experiments::{ExperimentRecord, InstanceSpec};
pub use metrics::{Estimate, Evaluator, Feasibility, FeasibilityReport, Mode, RecoveryReport};
pub use netmodel::{Capacity, ChannelAssignment, Network, OddSet};
pub use oracles::{Oracle, OracleResult, Problem};
pub use scalar::Scalar;

pub type NetworkF64 = Network<f64>;
pub type NetworkF32 = Network<f32>;
pub type RecoveryReportF64 = RecoveryReport<f64>;
pub type RecoveryReportF32 = RecoveryReport<f32>;
pub type FeasibilityReportF64 = FeasibilityReport<f64>;
pub type FeasibilityReportF32 = FeasibilityReport<f32>;
pub type OracleResultF64 = OracleResult<f64>;
pub type OracleResultF32 = OracleResult<f32>;
