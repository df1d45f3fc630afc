//! JSON topology files.
//!
//! ```json
//! {"version":1,"L":2,"w":6,"seed":7,
//!  "switches":[{"id":0,"coords":[0.05,0.17],"servers":2}, ...],
//!  "edges":[{"a":0,"b":1,"roles":["ring:1"]}, ...]}
//! ```
//!
//! Coordinates are written in shortest round-trip form, so reading a file
//! back yields bit-identical doubles.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Edge, EdgeRole, Switch, SwitchId, Topology};
use crate::error::{Error, Result};
use crate::geometry::Coordinates;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyFile {
    version: u32,
    #[serde(rename = "L")]
    spaces: usize,
    w: usize,
    seed: Option<u64>,
    switches: Vec<SwitchRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SwitchRecord {
    id: usize,
    coords: Vec<f64>,
    servers: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    a: usize,
    b: usize,
    roles: Vec<String>,
}

impl Topology {
    pub fn to_json(&self) -> String {
        let file = TopologyFile {
            version: FORMAT_VERSION,
            spaces: self.spaces,
            w: self.ports,
            seed: self.seed,
            switches: self
                .switches
                .iter()
                .map(|s| SwitchRecord {
                    id: s.id.0,
                    coords: s.coords.values(),
                    servers: s.servers,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(&(a, b), roles)| EdgeRecord {
                    a: a.0,
                    b: b.0,
                    roles: roles.iter().map(EdgeRole::to_string).collect(),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("topology serializes");
        out.push('\n');
        out
    }

    /// Parses and validates a topology file.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: TopologyFile = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        if file.version != FORMAT_VERSION {
            return Err(Error::Parse {
                path: "version".into(),
                message: format!("unsupported version {}", file.version),
            });
        }
        let switches = file
            .switches
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let coords = s
                    .coords
                    .iter()
                    .map(|&v| v.try_into())
                    .collect::<Result<Vec<_>>>()
                    .and_then(Coordinates::new)
                    .map_err(|e| Error::Parse {
                        path: format!("switches[{i}].coords"),
                        message: e.to_string(),
                    })?;
                Ok(Switch {
                    id: SwitchId(s.id),
                    coords,
                    servers: s.servers,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = file
            .edges
            .into_iter()
            .enumerate()
            .map(|(i, e)| {
                let roles = e
                    .roles
                    .iter()
                    .map(|r| r.parse::<EdgeRole>())
                    .collect::<Result<BTreeSet<_>, _>>()
                    .map_err(|message| Error::Parse {
                        path: format!("edges[{i}].roles"),
                        message,
                    })?;
                Ok(Edge {
                    a: SwitchId(e.a.min(e.b)),
                    b: SwitchId(e.a.max(e.b)),
                    roles,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Topology::from_parts(file.spaces, file.w, file.seed, switches, edges)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Reads a coordinate override: a JSON array of per-switch coordinate arrays,
/// optionally wrapped as `{"coords": [...]}`.
pub fn parse_coordinate_list(text: &str) -> Result<Vec<Coordinates>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Shape {
        Bare(Vec<Vec<f64>>),
        Wrapped { coords: Vec<Vec<f64>> },
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let shape: Shape = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    let rows = match shape {
        Shape::Bare(rows) | Shape::Wrapped { coords: rows } => rows,
    };
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let per_space = row
                .iter()
                .map(|&v| v.try_into())
                .collect::<Result<Vec<_>>>()
                .and_then(Coordinates::new);
            per_space.map_err(|e| Error::Parse {
                path: format!("[{i}]"),
                message: e.to_string(),
            })
        })
        .collect()
}
