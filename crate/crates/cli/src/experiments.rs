//! Experiment dispatch. Every experiment fans out over the configured seeds
//! and returns CSV tables plus a JSON summary.

use std::collections::BTreeMap;
use std::fs;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use s2_core::analysis::{
    all_pairs_shortest, control_area_report, failure_experiment, forwarding_state, link_load, routing_path_stats,
    switch_failure_experiment, PairWeights, PathStats,
};
use s2_core::bandwidth::{bisection_bandwidth, maxmin_throughput, permutation_traffic, route_subflows};
use s2_core::rng::derived;
use s2_core::routing::{home_switches, FirstHopMode, KeyAddress, RouteOptions, Router};
use s2_core::topology::{generate_random_regular, parse_coordinate_list, DeployParams, SwitchId, Topology};

use crate::config::{Experiment, ExperimentConfig, FirstHop, Metric};
use crate::failure::{load_topology, Failure};

/// Version of the CSV column layouts documented in the README.
pub const CSV_SCHEMA_VERSION: u32 = 1;

// RNG stream ids, one per experiment randomness source.
const STREAM_REGULAR: u64 = 1;
const STREAM_BISECTION: u64 = 2;
const STREAM_TRAFFIC: u64 = 3;
const STREAM_FAILURES: u64 = 4;

pub struct Table {
    pub name: String,
    pub csv: Vec<u8>,
}

pub struct Outcome {
    pub tables: Vec<Table>,
    pub results: Value,
    /// Topology JSON produced by `build`.
    pub topology: Option<String>,
}

fn table<R: Serialize>(name: &str, rows: &[R]) -> Result<Table, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let csv = w.into_inner().map_err(|e| Failure::io(e.to_string()))?;
    Ok(Table {
        name: name.to_string(),
        csv,
    })
}

/// Where each seed's topology comes from.
struct Source {
    fixed: Option<Topology>,
    params: Option<DeployParams>,
}

impl Source {
    fn new(cfg: &ExperimentConfig) -> Result<Self, Failure> {
        let t = &cfg.topology;
        if let Some(path) = &t.topology_file {
            return Ok(Self {
                fixed: Some(load_topology(path)?),
                params: None,
            });
        }
        let n = t.n.expect("validated");
        let mut params = DeployParams::new(n, t.servers.unwrap_or(n), t.ports.expect("validated")).coord_mode(t.coord_mode);
        if let Some(path) = &t.coords_file {
            let text = fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            params = params.with_coordinates(parse_coordinate_list(&text)?);
        }
        params.space_count()?;
        Ok(Self {
            fixed: None,
            params: Some(params),
        })
    }

    fn topology(&self, seed: u64) -> Result<Topology, Failure> {
        match (&self.fixed, &self.params) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(p)) => Ok(Topology::deploy_seeded(p, seed)?),
            (None, None) => unreachable!("source has a topology or parameters"),
        }
    }
}

fn per_seed<T: Send>(cfg: &ExperimentConfig, f: impl Fn(u64) -> Result<T, Failure> + Sync) -> Result<Vec<(u64, T)>, Failure> {
    cfg.topology
        .seeds
        .seeds()
        .into_par_iter()
        .map(|s| f(s).map(|v| (s, v)))
        .collect()
}

fn weights(metric: Metric, servers: &[usize]) -> PairWeights<'_> {
    match metric {
        Metric::Switch => PairWeights::Switch,
        Metric::Server => PairWeights::Server(servers),
    }
}

fn servers_of(t: &Topology) -> Vec<usize> {
    t.switches().iter().map(|s| s.servers).collect()
}

fn mean(v: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = v.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

fn route_options(cfg: &ExperimentConfig) -> RouteOptions {
    RouteOptions {
        d_spaces: cfg.params.d_spaces,
        k_hops: cfg.params.k_hops,
        hop_budget: cfg.params.hop_budget,
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
    cfg.validate()?;
    let source = Source::new(cfg)?;
    match cfg.experiment {
        Experiment::Build => build(cfg, &source),
        Experiment::ShortestPaths => shortest_paths(cfg, &source),
        Experiment::GreedyPaths => greedy_paths(cfg, &source),
        Experiment::LinkLoad => link_loads(cfg, &source),
        Experiment::ForwardingState => forwarding(cfg, &source),
        Experiment::Bisection => bisection(cfg, &source),
        Experiment::Throughput => throughput(cfg, &source),
        Experiment::Failures => failures(cfg, &source),
        Experiment::KeyRouting => key_routing(cfg, &source),
    }
}

fn build(cfg: &ExperimentConfig, source: &Source) -> Result<Outcome, Failure> {
    let seed = cfg.topology.seeds.first;
    let t = source.topology(seed)?;
    Ok(Outcome {
        tables: Vec::new(),
        results: json!({
            "switches": t.switch_count(),
            "servers": t.server_count(),
            "spaces": t.spaces(),
            "edges": t.edge_count(),
        }),
        topology: Some(t.to_json()),
    })
}

#[derive(Serialize)]
struct ShortestRow {
    seed: u64,
    graph: &'static str,
    mean: f64,
    p10: usize,
    p90: usize,
    pairs: u64,
}

#[derive(Serialize)]
struct HistogramRow {
    seed: u64,
    graph: &'static str,
    length: usize,
    count: u64,
}

fn pooled(stats: &[&PathStats]) -> Option<PathStats> {
    let mut h = BTreeMap::new();
    for s in stats {
        for (l, c) in &s.histogram {
            *h.entry(*l).or_insert(0u64) += c;
        }
    }
    PathStats::from_histogram(h)
}

fn stats_summary(stats: &[&PathStats]) -> Value {
    let p = pooled(stats);
    json!({
        "mean": mean(stats.iter().map(|s| s.mean)),
        "p10": p.as_ref().map(|p| p.p10),
        "p90": p.as_ref().map(|p| p.p90),
    })
}

fn shortest_paths(cfg: &ExperimentConfig, source: &Source) -> Result<Outcome, Failure> {
    let runs = per_seed(cfg, |seed| {
        let t = source.topology(seed)?;
        let sv = servers_of(&t);
        let w = weights(cfg.params.metric, &sv);
        let mut out = vec![("s2", all_pairs_shortest(&t.graph(), w)?)];
        if cfg.params.regular_baseline {
            let g = generate_random_regular(t.switch_count(), 2 * t.spaces(), &mut derived(seed, STREAM_REGULAR))?;
            out.push(("regular", all_pairs_shortest(&g, w)?));
        }
        Ok(out)
    })?;
    let mut rows = Vec::new();
    let mut hist = Vec::new();
    let mut by_graph: BTreeMap<&str, Vec<&PathStats>> = BTreeMap::new();
    for (seed, graphs) in &runs {
        for (graph, s) in graphs {
            rows.push(ShortestRow {
                seed: *seed,
                graph,
                mean: s.mean,
                p10: s.p10,
                p90: s.p90,
                pairs: s.count(),
            });
            hist.extend(s.histogram.iter().map(|(&length, &count)| HistogramRow {
                seed: *seed,
                graph,
                length,
                count,
            }));
            by_graph.entry(graph).or_default().push(s);
        }
    }
    let results: BTreeMap<_, _> = by_graph.iter().map(|(g, s)| (*g, stats_summary(s))).collect();
    Ok(Outcome {
        tables: vec![table("shortest_paths", &rows)?, table("shortest_path_histogram", &hist)?],
        results: json!({ "metric": cfg.params.metric, "graphs": results }),
        topology: None,
    })
}

#[derive(Serialize)]
struct GreedyRow {
    seed: u64,
    k_hops: usize,
    d_spaces: usize,
    mean: Option<f64>,
    p10: Option<usize>,
    p90: Option<usize>,
    attempted: u64,
    delivered: u64,
    local_minimum: u64,
    budget_exceeded: u64,
    shortest_mean: f64,
}

fn greedy_paths(cfg: &ExperimentConfig, source: &Source) -> Result<Outcome, Failure> {
    let opts = route_options(cfg);
    let runs = per_seed(cfg, |seed| {
        let t = source.topology(seed)?;
        let sv = servers_of(&t);
        let w = weights(cfg.params.metric, &sv);
        let r = Router::new(&t);
        let st = routing_path_stats(&r, &opts, w)?;
        let sp = all_pairs_shortest(r.graph(), w)?;
        Ok(GreedyRow {
            seed,
            k_hops: opts.k_hops,
            d_spaces: opts.d_spaces.unwrap_or(t.spaces()),
            mean: st.mean(),
            p10: st.paths.as_ref().map(|p| p.p10),
            p90: st.paths.as_ref().map(|p| p.p90),
            attempted: st.attempted,
            delivered: st.delivered,
            local_minimum: st.local_minimum,
            budget_exceeded: st.budget_exceeded,
            shortest_mean: sp.mean,
        })
    })?;
    let rows: Vec<_> = runs.into_iter().map(|(_, r)| r).collect();
    let delivered: u64 = rows.iter().map(|r| r.delivered).sum();
    let attempted: u64 = rows.iter().map(|r| r.attempted).sum();
    let results = json!({
        "metric": cfg.params.metric,
        "k_hops": opts.k_hops,
        "mean": mean(rows.iter().filter_map(|r| r.mean)),
        "shortest_mean": mean(rows.iter().map(|r| r.shortest_mean)),
        "success_rate": delivered as f64 / attempted.max(1) as f64,
    });
    Ok(Outcome {
        tables: vec![table("greedy_paths", &rows)?],
        results,
        topology: None,
    })
}

#[derive(Serialize)]
struct LinkRow {
    seed: u64,
    a: usize,
    b: usize,
    path_count: u64,
    endpoint_mcd: f64,
    endpoint_cd_sum: f64,
}

#[derive(Serialize)]
struct SwitchLoadRow {
    seed: u64,
    switch: usize,
    path_count: u64,
    log_control_area: f64,
}

fn link_loads(cfg: &ExperimentConfig, source: &Source) -> Result<Outcome, Failure> {
    let opts = route_options(cfg);
    let runs = per_seed(cfg, |seed| {
        let t = source.topology(seed)?;
        let r = Router::new(&t);
        let load = link_load(&t, &r, &opts)?;
        let areas = control_area_report(&t, &load.switch_counts);
        Ok((load, areas))
    })?;
    let mut links = Vec::new();
    let mut switches = Vec::new();
    let mut per_seed_summary = Vec::new();
    for (seed, (load, areas)) in &runs {
        links.extend(load.rows.iter().map(|r| LinkRow {
            seed: *seed,
            a: r.a.0,
            b: r.b.0,
            path_count: r.path_count,
            endpoint_mcd: r.endpoint_mcd,
            endpoint_cd_sum: r.endpoint_cd_sum,
        }));
        switches.extend(load.switch_counts.iter().zip(&areas.log_area_sum).enumerate().map(|(s, (&c, &a))| SwitchLoadRow {
            seed: *seed,
            switch: s,
            path_count: c,
            log_control_area: a,
        }));
        let deciles = load.decile_endpoint_mcd();
        per_seed_summary.push(json!({
            "seed": seed,
            "max_path_count": load.max_path_count(),
            "top_decile_endpoint_mcd": deciles.map(|d| d.0),
            "bottom_decile_endpoint_mcd": deciles.map(|d| d.1),
            "control_area_correlation": areas.correlation,
        }));
    }
    Ok(Outcome {
        tables: vec![table("link_load", &links)?, table("switch_load", &switches)?],
        results: json!({
            "k_hops": opts.k_hops,
            "mean_max_path_count": mean(runs.iter().map(|(_, (l, _))| l.max_path_count() as f64)),
            "seeds": per_seed_summary,
        }),
        topology: None,
    })
}

#[derive(Serialize)]
struct StateRow {
    seed: u64,
    switch: usize,
    degree: usize,
    entries: usize,
}

fn forwarding(cfg: &ExperimentConfig, source: &Source) -> Result<Outcome, Failure> {
    let k = cfg.params.k_hops;
    let runs = per_seed(cfg, |seed| {
        let t = source.topology(seed)?;
        let g = t.graph();
        let st = forwarding_state(&g, &t.all_coords(), k)?;
        let degrees: Vec<usize> = (0..g.node_count()).map(|s| g.degree(SwitchId(s))).collect();
        Ok((st, degrees, 2 * t.spaces()))
    })?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (seed, (st, degrees, d)) in &runs {
        rows.extend(st.per_switch.iter().zip(degrees).enumerate().map(|(s, (&entries, &degree))| StateRow {
            seed: *seed,
            switch: s,
            degree,
            entries,
        }));
        let bound = if k == 1 { *d } else { d + d * d };
        summary.push(json!({ "seed": seed, "mean": st.mean, "max": st.max, "bound": bound }));
    }
    Ok(Outcome {
        tables: vec![table("forwarding_state", &rows)?],
        results: json!({ "k_hops": k, "seeds": summary }),
        topology: None,
    })
}

#[derive(Serialize)]
struct BisectionRow {
    seed: u64,
    partition: usize,
    max_flow: f64,
}

fn bisection(cfg: &ExperimentConfig, source: &Source) -> Result<Outcome, Failure> {
    let runs = per_seed(cfg, |seed| {
        let t = source.topology(seed)?;
        Ok(bisection_bandwidth(&t, cfg.params.partitions, &mut derived(seed, STREAM_BISECTION))?)
    })?;
    let mut rows = Vec::new();
    for (seed, rep) in &runs {
        rows.extend(rep.per_partition.iter().enumerate().map(|(i, &v)| BisectionRow {
            seed: *seed,
            partition: i,
            max_flow: v,
        }));
    }
    let per_seed: Vec<_> = runs.iter().map(|(s, r)| json!({ "seed": s, "min": r.min })).collect();
    Ok(Outcome {
        tables: vec![table("bisection", &rows)?],
        results: json!({
            "partitions": cfg.params.partitions,
            "mean_of_minimums": mean(runs.iter().map(|(_, r)| r.min)),
            "seeds": per_seed,
        }),
        topology: None,
    })
}

#[derive(Serialize)]
struct RateRow {
    seed: u64,
    subflows: usize,
    flow: usize,
    src: usize,
    dst: usize,
    rate: f64,
}

#[derive(Serialize)]
struct ThroughputRow {
    seed: u64,
    subflows: usize,
    flows: usize,
    excluded: usize,
    total: f64,
    normalized: f64,
    jain_index: f64,
}

fn throughput(cfg: &ExperimentConfig, source: &Source) -> Result<Outcome, Failure> {
    let opts = route_options(cfg);
    let mode = match cfg.params.first_hop {
        FirstHop::Hash => FirstHopMode::Hash,
        FirstHop::LoadAware => FirstHopMode::LoadAware,
    };
    let runs = per_seed(cfg, |seed| {
        let t = source.topology(seed)?;
        let r = Router::new(&t);
        let hosts = t.server_switches();
        let m = permutation_traffic(hosts.len(), &mut derived(seed, STREAM_TRAFFIC))?;
        let mut out = Vec::new();
        for &k in &cfg.params.subflows {
            let routes = route_subflows(&r, &hosts, &m, k, mode, &opts)?;
            out.push((k, maxmin_throughput(&t, &m, &routes)?));
        }
        Ok((m, out))
    })?;
    let mut rates = Vec::new();
    let mut totals = Vec::new();
    for (seed, (m, reps)) in &runs {
        for (k, rep) in reps {
            rates.extend(rep.flows.iter().zip(&rep.per_flow_rate).map(|(&f, &rate)| RateRow {
                seed: *seed,
                subflows: *k,
                flow: f,
                src: m.flows[f].src,
                dst: m.flows[f].dst,
                rate,
            }));
            totals.push(ThroughputRow {
                seed: *seed,
                subflows: *k,
                flows: m.flows.len(),
                excluded: rep.excluded.len(),
                total: rep.total,
                normalized: 100.0 * rep.total / m.flows.len() as f64,
                jain_index: rep.jain_index,
            });
        }
    }
    let by_k: BTreeMap<String, Value> = cfg
        .params
        .subflows
        .iter()
        .map(|&k| {
            let rows: Vec<_> = totals.iter().filter(|r| r.subflows == k).collect();
            (
                k.to_string(),
                json!({
                    "normalized": mean(rows.iter().map(|r| r.normalized)),
                    "jain_index": mean(rows.iter().map(|r| r.jain_index)),
                }),
            )
        })
        .collect();
    Ok(Outcome {
        tables: vec![table("throughput", &totals)?, table("flow_rates", &rates)?],
        results: json!({ "first_hop": cfg.params.first_hop, "subflows": by_k }),
        topology: None,
    })
}

#[derive(Serialize)]
struct FailureRow {
    seed: u64,
    model: &'static str,
    fraction: f64,
    trials: usize,
    attempted: u64,
    delivered: u64,
    local_minimum: u64,
    budget_exceeded: u64,
    success_rate: f64,
    mean_path_length: f64,
}

fn failures(cfg: &ExperimentConfig, source: &Source) -> Result<Outcome, Failure> {
    let p = &cfg.params;
    let model = if p.switch_failures { "switch" } else { "link" };
    let runs = per_seed(cfg, |seed| {
        let t = source.topology(seed)?;
        let mut rng = derived(seed, STREAM_FAILURES);
        p.fractions
            .iter()
            .map(|&f| {
                let rep = if p.switch_failures {
                    switch_failure_experiment(&t, f, p.trials, p.hop_budget, &mut rng)?
                } else {
                    failure_experiment(&t, f, p.trials, p.hop_budget, &mut rng)?
                };
                Ok(FailureRow {
                    seed,
                    model,
                    fraction: f,
                    trials: p.trials,
                    attempted: rep.attempted,
                    delivered: rep.delivered,
                    local_minimum: rep.local_minimum,
                    budget_exceeded: rep.budget_exceeded,
                    success_rate: rep.success_rate,
                    mean_path_length: rep.mean_success_path_length,
                })
            })
            .collect::<Result<Vec<_>, Failure>>()
    })?;
    let rows: Vec<FailureRow> = runs.into_iter().flat_map(|(_, r)| r).collect();
    let by_f: Vec<Value> = p
        .fractions
        .iter()
        .map(|&f| {
            let sel: Vec<_> = rows.iter().filter(|r| r.fraction == f).collect();
            json!({ "fraction": f, "success_rate": mean(sel.iter().map(|r| r.success_rate)) })
        })
        .collect();
    Ok(Outcome {
        tables: vec![table("failures", &rows)?],
        results: json!({ "model": model, "fractions": by_f }),
        topology: None,
    })
}

#[derive(Serialize)]
struct KeyRow {
    seed: u64,
    key: String,
    source: usize,
    terminal: usize,
    hops: usize,
    home: bool,
}

fn key_routing(cfg: &ExperimentConfig, source: &Source) -> Result<Outcome, Failure> {
    let runs = per_seed(cfg, |seed| {
        let t = source.topology(seed)?;
        let r = Router::new(&t);
        let d = cfg.params.d_spaces.unwrap_or(t.spaces());
        let mut rows = Vec::new();
        for i in 0..cfg.params.keys {
            let name = format!("key-{i}");
            let key = KeyAddress::new(name.as_bytes(), d)?;
            let homes = home_switches(&t, &key)?;
            for s in 0..t.switch_count() {
                let p = r.key_route(SwitchId(s), &key, cfg.params.hop_budget)?;
                rows.push(KeyRow {
                    seed,
                    key: name.clone(),
                    source: s,
                    terminal: p.destination().0,
                    hops: p.hop_count(),
                    home: p.success && homes.contains(&p.destination()),
                });
            }
        }
        Ok(rows)
    })?;
    let rows: Vec<KeyRow> = runs.into_iter().flat_map(|(_, r)| r).collect();
    let hits = rows.iter().filter(|r| r.home).count();
    Ok(Outcome {
        results: json!({
            "routes": rows.len(),
            "home_rate": hits as f64 / rows.len().max(1) as f64,
            "mean_hops": mean(rows.iter().map(|r| r.hops as f64)),
        }),
        tables: vec![table("key_routing", &rows)?],
        topology: None,
    })
}
