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

use serde_json::{Map, Value};

use super::{Estimate, FeasibilityReport, NodeWitness, OddSetWitness, RecoveryReport};
use crate::json::fixed9;
use crate::netmodel::Network;
use crate::scalar::Scalar;

fn estimate<T: Scalar>(e: &Estimate<T>) -> Value {
    match e {
        Estimate::Exact(x) => fixed9(x.as_f64()),
        Estimate::Interval { lo, hi } => Value::Array(vec![fixed9(lo.as_f64()), fixed9(hi.as_f64())]),
    }
}

fn channel_names<T: Scalar>(net: &Network<T>, channels: &[usize]) -> Value {
    Value::Array(channels.iter().map(|&w| Value::String(net.channel_name(w).to_owned())).collect())
}

fn node_witness<T: Scalar>(net: &Network<T>, w: &NodeWitness) -> Value {
    let mut m = Map::new();
    m.insert("node".into(), Value::String(net.node_name(w.node).to_owned()));
    m.insert("channels".into(), channel_names(net, &w.channels));
    Value::Object(m)
}

fn odd_set_witness<T: Scalar>(net: &Network<T>, w: &OddSetWitness) -> Value {
    let mut m = Map::new();
    let nodes = w.set.members().iter().map(|&v| Value::String(net.node_name(v).to_owned())).collect();
    m.insert("nodes".into(), Value::Array(nodes));
    m.insert("channels".into(), channel_names(net, &w.channels));
    Value::Object(m)
}

impl<T: Scalar> RecoveryReport<T> {
    /// Fields in fixed order; `m2`/`witness_m2` in exact mode, `m2_lo`/`m2_hi`
    /// in bracket mode. Reals carry nine decimals.
    pub fn to_json(&self, net: &Network<T>) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("m1".into(), fixed9(self.m1.as_f64()));
        match self.m2 {
            Estimate::Exact(x) => {
                m.insert("m2".into(), fixed9(x.as_f64()));
            }
            Estimate::Interval { lo, hi } => {
                m.insert("m2_lo".into(), fixed9(lo.as_f64()));
                m.insert("m2_hi".into(), fixed9(hi.as_f64()));
            }
        }
        m.insert("capacity".into(), estimate(&self.capacity));
        m.insert("k".into(), Value::from(self.k));
        if let Some(w) = &self.witness_m1 {
            m.insert("witness_m1".into(), node_witness(net, w));
        }
        if let Some(w) = &self.witness_m2 {
            m.insert("witness_m2".into(), odd_set_witness(net, w));
        }
        m.insert("mode".into(), Value::String(self.mode.as_str().into()));
        m
    }
}

impl<T: Scalar> FeasibilityReport<T> {
    /// `z1`, `z2`, `beta`, `feasible`; infinite ratios are written as `null`.
    pub fn to_json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("z1".into(), fixed9(self.z1.as_f64()));
        m.insert("z2".into(), estimate(&self.z2));
        m.insert("beta".into(), estimate(&self.beta));
        m.insert("feasible".into(), Value::String(self.feasible.as_str().into()));
        m
    }
}

/// Recovery fields followed by feasibility fields in one object.
pub fn evaluation_json<T: Scalar>(
    net: &Network<T>,
    recovery: &RecoveryReport<T>,
    feasibility: &FeasibilityReport<T>,
) -> Value {
    let mut m = recovery.to_json(net);
    m.extend(feasibility.to_json());
    Value::Object(m)
}
