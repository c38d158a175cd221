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

//! Exact optima by branch and bound, for small instances.
//!
//! Links are decided in order of descending demand, channels in index order.
//! A partial assignment is cut when a node's load, water-filled with the
//! demand it still has to place, already exceeds the incumbent. Odd-set terms
//! are only evaluated at leaves, and only for connected non-bipartite induced
//! subgraphs; the rest are dominated by the node terms.

mod search;
#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::json::fixed9;
use crate::netmodel::format::assignment_map;
use crate::netmodel::{ChannelAssignment, Network};
use crate::scalar::Scalar;

pub use search::OddTerm;

/// Default cap on leaf evaluations.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Largest node count for which the odd-set table is built.
pub const MAX_ORACLE_NODES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Minimize `C(y,k)` over feasible assignments.
    WhiteRec,
    /// Minimize `C(y,k)` over all assignments.
    WhiteRecInf,
    /// Maximize `β(y)`.
    Feasi,
    /// Minimize `M1(y,k)` alone over all assignments.
    WhiteRecApprox,
}

impl Problem {
    pub fn as_str(self) -> &'static str {
        match self {
            Problem::WhiteRec => "whiterec",
            Problem::WhiteRecInf => "whiterecinf",
            Problem::Feasi => "feasi",
            Problem::WhiteRecApprox => "whiterecapprox",
        }
    }
}

/// Outcome of an exact search.
///
/// `best_assignment` and `objective` are `None` when no feasible assignment
/// exists (or none was found before the budget ran out).
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T = f64> {
    pub problem: Problem,
    pub k: usize,
    pub best_assignment: Option<ChannelAssignment>,
    /// `C_opt(k)`, or `β*` for [`Problem::Feasi`].
    pub objective: Option<T>,
    /// Leaves of the search tree that were evaluated.
    pub explored: u64,
    pub proven_optimal: bool,
}

impl<T: Scalar> OracleResult<T> {
    /// Proven that no feasible assignment exists.
    pub fn is_infeasible(&self) -> bool {
        self.proven_optimal && self.objective.is_none()
    }

    /// `{"objective","proven_optimal","explored","assignment"}`; `null` marks
    /// infeasibility (and an unbounded `β*` on a network without links).
    pub fn to_json(&self, net: &Network<T>) -> Value {
        let mut m = Map::new();
        m.insert("objective".into(), self.objective.map_or(Value::Null, |x| fixed9(x.as_f64())));
        m.insert("proven_optimal".into(), Value::Bool(self.proven_optimal));
        m.insert("explored".into(), Value::from(self.explored));
        m.insert(
            "assignment".into(),
            self.best_assignment.as_ref().map_or(Value::Null, |y| assignment_map(net, y)),
        );
        Value::Object(m)
    }
}

/// Search settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    /// Maximum number of leaf evaluations.
    pub budget: u64,
    /// Start from the greedy and interference-free assignments as incumbents.
    pub warm_start: bool,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { budget: DEFAULT_BUDGET, warm_start: true }
    }
}

impl Oracle {
    pub fn with_budget(budget: u64) -> Self {
        Oracle { budget, ..Oracle::default() }
    }

    pub fn solve<T: Scalar>(&self, net: &Network<T>, problem: Problem, k: usize) -> Result<OracleResult<T>> {
        if k == 0 {
            return Err(Error::InvalidK);
        }
        if net.n_nodes() > MAX_ORACLE_NODES {
            return Err(Error::OracleTooLarge { n_nodes: net.n_nodes(), cap: MAX_ORACLE_NODES });
        }
        let k = if problem == Problem::Feasi { 1 } else { k };
        Ok(search::run(net, problem, k, self))
    }
}

pub fn solve_whiterec_exact<T: Scalar>(net: &Network<T>, k: usize, budget: u64) -> Result<OracleResult<T>> {
    Oracle::with_budget(budget).solve(net, Problem::WhiteRec, k)
}

pub fn solve_whiterecinf_exact<T: Scalar>(net: &Network<T>, k: usize, budget: u64) -> Result<OracleResult<T>> {
    Oracle::with_budget(budget).solve(net, Problem::WhiteRecInf, k)
}

pub fn solve_feasi_exact<T: Scalar>(net: &Network<T>, budget: u64) -> Result<OracleResult<T>> {
    Oracle::with_budget(budget).solve(net, Problem::Feasi, 1)
}

pub fn solve_whiterec_approx_exact<T: Scalar>(net: &Network<T>, k: usize, budget: u64) -> Result<OracleResult<T>> {
    Oracle::with_budget(budget).solve(net, Problem::WhiteRecApprox, k)
}
