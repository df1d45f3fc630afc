use std::fmt;
use std::path::Path;

use s2_core::topology::Topology;
use s2_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Infeasible,
    Io,
}

/// A run-ending error with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub reason: String,
}

impl Failure {
    pub fn config(reason: impl Into<String>) -> Self {
        Self {
            kind: Kind::Config,
            reason: reason.into(),
        }
    }

    pub fn io(reason: impl Into<String>) -> Self {
        Self {
            kind: Kind::Io,
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            Kind::Config => 2,
            Kind::Infeasible => 3,
            Kind::Io => 4,
        }
    }
}

impl fmt::Display for Failure {
    /// `error[<kind>]: <reason>` on a single line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            Kind::Config => "config",
            Kind::Infeasible => "infeasible",
            Kind::Io => "io",
        };
        let reason = self.reason.split_whitespace().collect::<Vec<_>>().join(" ");
        write!(f, "error[{kind}]: {reason}")
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::Config(_) | Error::Disconnected(..) => Kind::Infeasible,
            Error::Io(_) => Kind::Io,
            _ => Kind::Config,
        };
        Self {
            kind,
            reason: e.to_string(),
        }
    }
}

/// Loads a topology file, naming the path in I/O failures.
pub fn load_topology(path: &Path) -> Result<Topology, Failure> {
    Topology::load(path).map_err(|e| match e {
        Error::Io(e) => Failure::io(format!("{}: {e}", path.display())),
        e => e.into(),
    })
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::io(e.to_string())
    }
}
