use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use s2_core::topology::CoordMode;

use crate::config::{Experiment, ExperimentConfig, FirstHop, Metric, OutputConfig, Params, SeedRange, TopologyConfig};
use crate::failure::Failure;

#[derive(Parser, Debug)]
#[command(name = "s2", version, about = "S2 data center topology toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct TopoArgs {
    /// Number of switches.
    #[arg(long)]
    n: Option<usize>,
    /// Number of servers (defaults to n).
    #[arg(long)]
    servers: Option<usize>,
    /// Ports per switch.
    #[arg(long)]
    ports: Option<usize>,
    #[arg(long, default_value = "balanced")]
    coord_mode: CoordMode,
    /// JSON array of per-switch coordinate arrays.
    #[arg(long)]
    coords: Option<PathBuf>,
    /// Load a saved topology instead of deploying one.
    #[arg(long)]
    topology: Option<PathBuf>,
    /// Seed or inclusive seed range such as 1..20.
    #[arg(long, default_value = "1")]
    seed: SeedRange,
    /// Directory for CSV tables and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RouteArgs {
    #[arg(long, default_value_t = 2)]
    k_hops: usize,
    /// Route on the first d spaces only.
    #[arg(long)]
    d_spaces: Option<usize>,
    #[arg(long)]
    hop_budget: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Deploy a topology and write it as JSON.
    Build {
        #[command(flatten)]
        topo: TopoArgs,
        /// Topology JSON destination (stdout if absent).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a topology file for structural violations.
    Validate { file: PathBuf },
    /// Shortest path lengths over all pairs.
    ShortestPaths {
        #[command(flatten)]
        topo: TopoArgs,
        #[arg(long, value_enum, default_value = "switch")]
        metric: Metric,
        /// Also measure a random regular graph of equal degree.
        #[arg(long)]
        regular_baseline: bool,
    },
    /// Greediest routing path lengths over all pairs.
    GreedyPaths {
        #[command(flatten)]
        topo: TopoArgs,
        #[command(flatten)]
        route: RouteArgs,
        #[arg(long, value_enum, default_value = "switch")]
        metric: Metric,
    },
    /// Per-link routed path counts and control areas.
    LinkLoad {
        #[command(flatten)]
        topo: TopoArgs,
        #[command(flatten)]
        route: RouteArgs,
    },
    /// Routing table sizes.
    ForwardingState {
        #[command(flatten)]
        topo: TopoArgs,
        #[arg(long, default_value_t = 2)]
        k_hops: usize,
    },
    /// Minimum bisection bandwidth over random partitions.
    Bisection {
        #[command(flatten)]
        topo: TopoArgs,
        #[arg(long, default_value_t = 50)]
        partitions: usize,
    },
    /// Max-min fair throughput of permutation traffic.
    Throughput {
        #[command(flatten)]
        topo: TopoArgs,
        #[command(flatten)]
        route: RouteArgs,
        /// Subflow counts to compare.
        #[arg(long, value_delimiter = ',', default_value = "1,8")]
        subflows: Vec<usize>,
        #[arg(long, value_enum, default_value = "hash")]
        first_hop: FirstHop,
    },
    /// Routing success under random link or switch failures.
    Failures {
        #[command(flatten)]
        topo: TopoArgs,
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2")]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Fail switches instead of links.
        #[arg(long)]
        switch_failures: bool,
        #[arg(long)]
        hop_budget: Option<usize>,
    },
    /// Key-based routing to home switches.
    KeyRouting {
        #[command(flatten)]
        topo: TopoArgs,
        #[arg(long, default_value_t = 100)]
        keys: usize,
        #[arg(long)]
        hop_budget: Option<usize>,
    },
    /// Run an experiment described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output directory in the file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl TopoArgs {
    fn split(self) -> (TopologyConfig, OutputConfig) {
        (
            TopologyConfig {
                n: self.n,
                servers: self.servers,
                ports: self.ports,
                coord_mode: self.coord_mode,
                seeds: self.seed,
                topology_file: self.topology,
                coords_file: self.coords,
            },
            OutputConfig { dir: self.out },
        )
    }
}

impl RouteArgs {
    fn apply(self, p: &mut Params) {
        p.k_hops = self.k_hops;
        p.d_spaces = self.d_spaces;
        p.hop_budget = self.hop_budget;
    }
}

impl Command {
    /// Converts an experiment subcommand into a config plus the optional
    /// topology output path of `build`.
    pub fn into_config(self) -> Result<(ExperimentConfig, Option<PathBuf>), Failure> {
        let mut params = Params::default();
        let mut topology_out = None;
        let (experiment, topo) = match self {
            Command::Build { topo, output } => {
                topology_out = output;
                (Experiment::Build, topo)
            }
            Command::ShortestPaths {
                topo,
                metric,
                regular_baseline,
            } => {
                params.metric = metric;
                params.regular_baseline = regular_baseline;
                (Experiment::ShortestPaths, topo)
            }
            Command::GreedyPaths { topo, route, metric } => {
                route.apply(&mut params);
                params.metric = metric;
                (Experiment::GreedyPaths, topo)
            }
            Command::LinkLoad { topo, route } => {
                route.apply(&mut params);
                (Experiment::LinkLoad, topo)
            }
            Command::ForwardingState { topo, k_hops } => {
                params.k_hops = k_hops;
                (Experiment::ForwardingState, topo)
            }
            Command::Bisection { topo, partitions } => {
                params.partitions = partitions;
                (Experiment::Bisection, topo)
            }
            Command::Throughput {
                topo,
                route,
                subflows,
                first_hop,
            } => {
                route.apply(&mut params);
                params.subflows = subflows;
                params.first_hop = first_hop;
                (Experiment::Throughput, topo)
            }
            Command::Failures {
                topo,
                fractions,
                trials,
                switch_failures,
                hop_budget,
            } => {
                params.fractions = fractions;
                params.trials = trials;
                params.switch_failures = switch_failures;
                params.hop_budget = hop_budget;
                (Experiment::Failures, topo)
            }
            Command::KeyRouting { topo, keys, hop_budget } => {
                params.keys = keys;
                params.hop_budget = hop_budget;
                (Experiment::KeyRouting, topo)
            }
            Command::Validate { .. } | Command::Run { .. } => {
                return Err(Failure::config("not an experiment subcommand"));
            }
        };
        let (topology, output) = topo.split();
        Ok((
            ExperimentConfig {
                experiment,
                topology,
                params,
                output,
            },
            topology_out,
        ))
    }
}
