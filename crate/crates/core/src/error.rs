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

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid node index {node} (network has {n_nodes} nodes)")]
    InvalidNode { node: usize, n_nodes: usize },

    #[error("invalid channel index {channel} (network has {n_channels} channels)")]
    InvalidChannel { channel: usize, n_channels: usize },

    #[error("invalid edge {{{u}, {v}}}: {reason}")]
    InvalidEdge { u: usize, v: usize, reason: &'static str },

    #[error("nonpositive demand on edge {edge}")]
    NonpositiveDemand { edge: usize },

    #[error("nonpositive capacity for channel {channel} on edge {edge}")]
    NonpositiveCapacity { channel: usize, edge: usize },

    #[error("capacity matrix must be {expected_rows} x {expected_cols}")]
    CapacityShape { expected_rows: usize, expected_cols: usize },

    #[error("network has no white channels")]
    NoChannels,

    #[error("odd set must have odd cardinality >= 3 with distinct members, got {0:?}")]
    InvalidOddSet(Vec<usize>),

    #[error("assignment covers {got} edges, network has {expected}")]
    AssignmentLength { got: usize, expected: usize },

    #[error("edge order is not a permutation: index {0} is out of range or repeated")]
    InvalidOrder(usize),

    #[error("k must be >= 1")]
    InvalidK,

    #[error("exact odd-set enumeration disabled for {n_nodes} nodes (cap {cap}); use compute_m2_bracket")]
    ExactDisabled { n_nodes: usize, cap: usize },

    #[error("exact search supports at most {cap} nodes, network has {n_nodes}")]
    OracleTooLarge { n_nodes: usize, cap: usize },

    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),

    #[error("parse error in `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { field: field.into(), message: message.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
