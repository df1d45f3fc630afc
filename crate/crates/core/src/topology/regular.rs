//! Random regular graphs, used as the Jellyfish-style baseline.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{Graph, SwitchId};
use crate::error::{Error, Result};
use crate::rng::Rng;

const MAX_RESTARTS: usize = 1000;
const REPAIR_TRIES: usize = 200;

/// Samples a simple `r`-regular graph on `n` vertices.
///
/// Stubs are shuffled and matched; matches that would create a self-loop or a
/// parallel edge are dropped and the leftover stubs are placed by random
/// pairing, then by splitting an existing edge (the Jellyfish repair move).
/// A construction that cannot be completed is restarted from scratch.
pub fn generate_random_regular(n: usize, r: usize, rng: &mut Rng) -> Result<Graph> {
    if r >= n {
        return Err(Error::Config(format!("degree {r} must be below vertex count {n}")));
    }
    if (n * r) % 2 == 1 {
        return Err(Error::Config(format!("n·r = {} is odd", n * r)));
    }
    for _ in 0..MAX_RESTARTS {
        if let Some(adj) = attempt(n, r, rng) {
            let edges = adj.iter().enumerate().flat_map(|(i, set)| {
                set.iter()
                    .filter(move |&&j| j > i)
                    .map(move |&j| (SwitchId(i), SwitchId(j)))
            });
            return Ok(Graph::from_edges(n, edges));
        }
    }
    Err(Error::Config(format!(
        "no {r}-regular graph on {n} vertices after {MAX_RESTARTS} restarts"
    )))
}

fn attempt(n: usize, r: usize, rng: &mut Rng) -> Option<Vec<BTreeSet<usize>>> {
    let mut adj = vec![BTreeSet::new(); n];
    let mut free = vec![r; n];
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, r)).collect();
    stubs.shuffle(rng);
    for pair in stubs.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        if a != b && adj[a].insert(b) {
            adj[b].insert(a);
            free[a] -= 1;
            free[b] -= 1;
        }
    }

    let mut budget = REPAIR_TRIES * n.max(1);
    loop {
        let open: Vec<usize> = (0..n).filter(|&v| free[v] > 0).collect();
        if open.is_empty() {
            return Some(adj);
        }
        if budget == 0 {
            return None;
        }
        budget -= 1;

        let mut legal = Vec::new();
        for (i, &x) in open.iter().enumerate() {
            for &y in &open[i + 1..] {
                if !adj[x].contains(&y) {
                    legal.push((x, y));
                }
            }
        }
        if let Some(&(x, y)) = legal.get(rng.gen_range(0..legal.len().max(1))) {
            adj[x].insert(y);
            adj[y].insert(x);
            free[x] -= 1;
            free[y] -= 1;
            continue;
        }

        // no direct pair possible: split an existing edge
        let edges: Vec<(usize, usize)> = adj
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .collect();
        if edges.is_empty() {
            return None;
        }
        let (u, v) = match open.iter().find(|&&v| free[v] >= 2) {
            Some(&v) => (v, v),
            None if open.len() >= 2 => (open[0], open[1]),
            None => return None,
        };
        let mut done = false;
        for _ in 0..REPAIR_TRIES {
            let (mut x, mut y) = edges[rng.gen_range(0..edges.len())];
            if rng.gen::<bool>() {
                std::mem::swap(&mut x, &mut y);
            }
            let fits_u = x != u && x != v && !adj[u].contains(&x);
            let fits_v = y != u && y != v && !adj[v].contains(&y);
            if fits_u && fits_v {
                adj[x].remove(&y);
                adj[y].remove(&x);
                adj[u].insert(x);
                adj[x].insert(u);
                adj[v].insert(y);
                adj[y].insert(v);
                free[u] -= 1;
                free[v] -= 1;
                done = true;
                break;
            }
        }
        if !done {
            return None;
        }
    }
}
