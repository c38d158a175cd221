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

//! JSON documents for networks and assignments.
//!
//! ```json
//! { "nodes": ["n0", "n1"], "channels": ["w0"],
//!   "edges": [ {"u": "n0", "v": "n1", "demand": 42.5} ],
//!   "capacity": 150.0 }
//! ```
//!
//! `capacity` is either one number (all channels, all links) or a matrix with
//! one row of `|E|` rates per channel.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Capacity, ChannelAssignment, Network};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub nodes: Vec<String>,
    pub channels: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    pub capacity: CapacityDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub u: String,
    pub v: String,
    pub demand: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CapacityDoc {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

// Hand-written: untagged deserialization does not see numbers as numbers when
// serde_json buffers them with `arbitrary_precision`.
impl<'de> Deserialize<'de> for CapacityDoc {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let number = |v: &serde_json::Value| {
            v.as_f64().ok_or_else(|| D::Error::custom("capacity entries must be numbers"))
        };
        match serde_json::Value::deserialize(de)? {
            serde_json::Value::Number(n) => Ok(CapacityDoc::Scalar(
                n.as_f64().ok_or_else(|| D::Error::custom("capacity must be a number"))?,
            )),
            serde_json::Value::Array(rows) => rows
                .iter()
                .map(|row| match row {
                    serde_json::Value::Array(xs) => xs.iter().map(number).collect(),
                    _ => Err(D::Error::custom("capacity rows must be arrays")),
                })
                .collect::<std::result::Result<_, _>>()
                .map(CapacityDoc::Matrix),
            _ => Err(D::Error::custom("capacity must be a number or a per-channel matrix")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentDoc {
    pub assignment: serde_json::Map<String, serde_json::Value>,
}

fn index_names(names: &[String], field: &str) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if map.insert(name.clone(), i).is_some() {
            return Err(Error::parse(format!("{field}[{i}]"), format!("duplicate name `{name}`")));
        }
    }
    Ok(map)
}

fn cast<T: Scalar>(x: f64, field: &str) -> Result<T> {
    T::from_f64(x).ok_or_else(|| Error::parse(field, "value not representable"))
}

impl NetworkDoc {
    pub fn into_network<T: Scalar>(self) -> Result<Network<T>> {
        let node_ix = index_names(&self.nodes, "nodes")?;
        index_names(&self.channels, "channels")?;
        if self.channels.is_empty() {
            return Err(Error::parse("channels", "at least one channel required"));
        }
        let mut seen = HashMap::new();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let lookup = |name: &str, side: &str| {
                node_ix.get(name).copied().ok_or_else(|| {
                    Error::parse(format!("edges[{i}].{side}"), format!("dangling node reference `{name}`"))
                })
            };
            let u = lookup(&e.u, "u")?;
            let v = lookup(&e.v, "v")?;
            if u == v {
                return Err(Error::parse(format!("edges[{i}]"), "self-loop"));
            }
            if let Some(prev) = seen.insert((u.min(v), u.max(v)), i) {
                return Err(Error::parse(format!("edges[{i}]"), format!("parallel to edges[{prev}]")));
            }
            if !(e.demand > 0.0) || !e.demand.is_finite() {
                return Err(Error::parse(format!("edges[{i}].demand"), "nonpositive demand"));
            }
            edges.push((u, v, cast(e.demand, "demand")?));
        }
        let capacity = match self.capacity {
            CapacityDoc::Scalar(r) => {
                if !(r > 0.0) {
                    return Err(Error::parse("capacity", "nonpositive capacity"));
                }
                Capacity::Uniform(cast(r, "capacity")?)
            }
            CapacityDoc::Matrix(rows) => {
                if rows.len() != self.channels.len() {
                    return Err(Error::parse(
                        "capacity",
                        format!("expected {} rows (one per channel), got {}", self.channels.len(), rows.len()),
                    ));
                }
                let mut m = Vec::with_capacity(rows.len());
                for (w, row) in rows.into_iter().enumerate() {
                    if row.len() != edges.len() {
                        return Err(Error::parse(
                            format!("capacity[{w}]"),
                            format!("expected {} entries (one per edge), got {}", edges.len(), row.len()),
                        ));
                    }
                    let mut out = Vec::with_capacity(row.len());
                    for (e, r) in row.into_iter().enumerate() {
                        if !(r > 0.0) {
                            return Err(Error::parse(format!("capacity[{w}][{e}]"), "nonpositive capacity"));
                        }
                        out.push(cast(r, "capacity")?);
                    }
                    m.push(out);
                }
                Capacity::Matrix(m)
            }
        };
        Network::with_names(self.nodes, self.channels, edges, capacity)
    }

    pub fn from_network<T: Scalar>(net: &Network<T>) -> Self {
        let edges = net
            .edges()
            .iter()
            .map(|l| EdgeDoc {
                u: net.node_name(l.u).to_owned(),
                v: net.node_name(l.v).to_owned(),
                demand: l.demand.as_f64(),
            })
            .collect();
        let capacity = if net.n_edges() > 0 && net.is_homogeneous() {
            CapacityDoc::Scalar(net.capacity(0, 0).as_f64())
        } else {
            CapacityDoc::Matrix(
                net.capacity_matrix()
                    .iter()
                    .map(|row| row.iter().map(|r| r.as_f64()).collect())
                    .collect(),
            )
        };
        NetworkDoc {
            nodes: net.node_names().to_vec(),
            channels: net.channel_names().to_vec(),
            edges,
            capacity,
        }
    }
}

pub fn parse_network<T: Scalar>(text: &[u8]) -> Result<Network<T>> {
    let doc: NetworkDoc =
        serde_json::from_slice(text).map_err(|e| Error::parse("document", e.to_string()))?;
    doc.into_network()
}

pub fn serialize_network<T: Scalar>(net: &Network<T>) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&NetworkDoc::from_network(net))
        .expect("network document serializes");
    out.push(b'\n');
    out
}

/// `{"assignment": {"<edge index>": "<channel name>", ...}}` in edge order.
pub fn serialize_assignment<T: Scalar>(net: &Network<T>, y: &ChannelAssignment) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&assignment_value(net, y)).expect("assignment serializes");
    out.push(b'\n');
    out
}

pub(crate) fn assignment_map<T: Scalar>(net: &Network<T>, y: &ChannelAssignment) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = y
        .as_slice()
        .iter()
        .enumerate()
        .map(|(e, &w)| (e.to_string(), serde_json::Value::String(net.channel_name(w).to_owned())))
        .collect();
    serde_json::Value::Object(map)
}

fn assignment_value<T: Scalar>(net: &Network<T>, y: &ChannelAssignment) -> serde_json::Value {
    let mut root = serde_json::Map::new();
    root.insert("assignment".into(), assignment_map(net, y));
    serde_json::Value::Object(root)
}

pub fn parse_assignment<T: Scalar>(net: &Network<T>, text: &[u8]) -> Result<ChannelAssignment> {
    let doc: AssignmentDoc =
        serde_json::from_slice(text).map_err(|e| Error::parse("document", e.to_string()))?;
    let channel_ix = index_names(net.channel_names(), "channels")?;
    let mut channel_of = vec![None; net.n_edges()];
    for (key, value) in &doc.assignment {
        let field = format!("assignment.{key}");
        let e: usize = key.parse().map_err(|_| Error::parse(&field, "edge key must be an index"))?;
        if e >= net.n_edges() {
            return Err(Error::parse(&field, format!("edge index out of range (|E| = {})", net.n_edges())));
        }
        let name = value.as_str().ok_or_else(|| Error::parse(&field, "channel must be a name"))?;
        let w = *channel_ix
            .get(name)
            .ok_or_else(|| Error::parse(&field, format!("unknown channel `{name}`")))?;
        channel_of[e] = Some(w);
    }
    let channel_of = channel_of
        .into_iter()
        .enumerate()
        .map(|(e, w)| w.ok_or_else(|| Error::parse(format!("assignment.{e}"), "edge not assigned")))
        .collect::<Result<Vec<_>>>()?;
    ChannelAssignment::new(net, channel_of)
}
