use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use s2_core::topology::CoordMode;

use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Build,
    ShortestPaths,
    GreedyPaths,
    LinkLoad,
    ForwardingState,
    Bisection,
    Throughput,
    Failures,
    KeyRouting,
}

/// Single seed `7` or inclusive range `1..20`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedRange {
    pub first: u64,
    pub last: u64,
}

impl SeedRange {
    pub fn single(seed: u64) -> Self {
        Self { first: seed, last: seed }
    }

    pub fn seeds(&self) -> Vec<u64> {
        (self.first..=self.last).collect()
    }
}

impl FromStr for SeedRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("invalid seed '{x}'"));
        match s.split_once("..") {
            Some((a, b)) => {
                let (first, last) = (parse(a)?, parse(b)?);
                if first > last {
                    return Err(format!("empty seed range '{s}'"));
                }
                Ok(Self { first, last })
            }
            None => parse(s).map(Self::single),
        }
    }
}

impl fmt::Display for SeedRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.first == self.last {
            write!(f, "{}", self.first)
        } else {
            write!(f, "{}..{}", self.first, self.last)
        }
    }
}

impl Serialize for SeedRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SeedRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Self::single(n)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Switch-to-switch hops.
    #[default]
    Switch,
    /// Server-to-server hops, weighted by server counts.
    Server,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FirstHop {
    #[default]
    Hash,
    LoadAware,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    pub n: Option<usize>,
    pub servers: Option<usize>,
    pub ports: Option<usize>,
    #[serde(default)]
    pub coord_mode: CoordMode,
    #[serde(default = "default_seeds")]
    pub seeds: SeedRange,
    pub topology_file: Option<PathBuf>,
    pub coords_file: Option<PathBuf>,
}

fn default_seeds() -> SeedRange {
    SeedRange::single(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub k_hops: usize,
    pub d_spaces: Option<usize>,
    pub metric: Metric,
    pub regular_baseline: bool,
    pub subflows: Vec<usize>,
    pub first_hop: FirstHop,
    pub fractions: Vec<f64>,
    pub switch_failures: bool,
    pub trials: usize,
    pub partitions: usize,
    pub keys: usize,
    pub hop_budget: Option<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            k_hops: 2,
            d_spaces: None,
            metric: Metric::Switch,
            regular_baseline: false,
            subflows: vec![1, 8],
            first_hop: FirstHop::Hash,
            fractions: vec![0.0, 0.1, 0.2],
            switch_failures: false,
            trials: 1,
            partitions: 50,
            keys: 100,
            hop_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for CSV files and the JSON summary; stdout only if absent.
    pub dir: Option<PathBuf>,
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub topology: TopologyConfig,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::config(e.message()))
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let t = &self.topology;
        if t.topology_file.is_none() {
            if t.n.is_none() || t.ports.is_none() {
                return Err(Failure::config("n and ports are required unless a topology file is given"));
            }
        } else if t.coords_file.is_some() {
            return Err(Failure::config("coords file cannot be combined with a topology file"));
        }
        let p = &self.params;
        if !(1..=2).contains(&p.k_hops) {
            return Err(Failure::config(format!("k_hops must be 1 or 2, got {}", p.k_hops)));
        }
        if p.d_spaces == Some(0) {
            return Err(Failure::config("d_spaces must be at least 1"));
        }
        if p.subflows.is_empty() || p.subflows.contains(&0) {
            return Err(Failure::config("subflows must be a non-empty list of positive counts"));
        }
        if p.fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Failure::config("failure fractions must lie in [0, 1]"));
        }
        if p.trials == 0 || p.partitions == 0 {
            return Err(Failure::config("trials and partitions must be positive"));
        }
        if self.experiment == Experiment::Build && t.seeds.first != t.seeds.last {
            return Err(Failure::config("build takes a single seed"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!("7".parse::<SeedRange>().unwrap().seeds(), vec![7]);
        assert_eq!("1..3".parse::<SeedRange>().unwrap().seeds(), vec![1, 2, 3]);
        assert!("3..1".parse::<SeedRange>().is_err());
        assert!("x".parse::<SeedRange>().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
            experiment = "greedy_paths"
            [topology]
            n = 40
            ports = 8
            seeds = "1..3"
            coord_mode = "pure_random"
            [params]
            k_hops = 1
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.topology.seeds.seeds(), vec![1, 2, 3]);
        assert_eq!(cfg.topology.coord_mode, CoordMode::PureRandom);
        assert_eq!(cfg.params.k_hops, 1);
        cfg.validate().unwrap();
        let again = ExperimentConfig::from_toml(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml("experiment = \"nope\"\n[topology]\n").is_err());
        assert!(ExperimentConfig::from_toml("experiment = \"build\"\n[topology]\nn = 3\nbogus = 1\n").is_err());
        let cfg = ExperimentConfig::from_toml("experiment = \"build\"\n[topology]\nn = 9\n").unwrap();
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig::from_toml("experiment = \"failures\"\n[topology]\nn = 9\nports = 6\n[params]\nfractions = [1.5]\n").unwrap();
        assert!(cfg.validate().is_err());
    }
}
