#![allow(dead_code)]

use std::collections::BTreeSet;

use crn_siphons::network::{parse_network, ReactionNetwork};
use crn_siphons::set::IndexSet;
use rand::Rng;

pub fn network_text(name: &str) -> String {
    let path = format!("{}/examples/networks/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn network_path(name: &str) -> String {
    format!("{}/examples/networks/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn load(name: &str) -> ReactionNetwork {
    parse_network(&network_text(name)).unwrap()
}

/// `c1 + c2 <-> c2 + c3 <-> ... <-> c(s-1) + c(s)`.
pub fn chain(s: usize) -> ReactionNetwork {
    let names: Vec<String> = (1..=s).map(|i| format!("c{i}")).collect();
    let complexes: Vec<Vec<u64>> = (0..s - 1)
        .map(|k| (0..s).map(|i| u64::from(i == k || i == k + 1)).collect())
        .collect();
    let mut edges = Vec::new();
    for k in 0..complexes.len().saturating_sub(1) {
        edges.push((k, k + 1));
        edges.push((k + 1, k));
    }
    ReactionNetwork::from_parts(names, complexes, &edges).unwrap()
}

/// Species names to an index set.
pub fn named(net: &ReactionNetwork, names: &str) -> IndexSet {
    net.species()
        .parse_set(names.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()))
        .unwrap()
}

pub fn name_sets(net: &ReactionNetwork, sets: &[IndexSet]) -> BTreeSet<String> {
    sets.iter().map(|z| net.species().format_set(z)).collect()
}

/// A random valid network with at most `max_species` species: a few sparse
/// complexes with exponents up to 2, joined by random distinct reactions.
pub fn random_network(rng: &mut impl Rng, max_species: usize) -> ReactionNetwork {
    loop {
        let s = rng.gen_range(1..=max_species);
        let n = rng.gen_range(2..=7);
        let mut complexes: Vec<Vec<u64>> = Vec::new();
        for _ in 0..n {
            let c: Vec<u64> = (0..s)
                .map(|_| if rng.gen_ratio(1, 3) { rng.gen_range(1..=2) } else { 0 })
                .collect();
            if !complexes.contains(&c) {
                complexes.push(c);
            }
        }
        if complexes.len() < 2 {
            continue;
        }
        let m = rng.gen_range(1..=2 * complexes.len());
        let mut edges = Vec::new();
        for _ in 0..m {
            let a = rng.gen_range(0..complexes.len());
            let b = rng.gen_range(0..complexes.len());
            if a != b && !edges.contains(&(a, b)) {
                edges.push((a, b));
                if rng.gen_ratio(1, 2) && !edges.contains(&(b, a)) {
                    edges.push((b, a));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        // keep only complexes that take part in a reaction
        let mut used: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        used.sort_unstable();
        used.dedup();
        let remap = |k: usize| used.binary_search(&k).unwrap();
        let kept: Vec<Vec<u64>> = used.iter().map(|&k| complexes[k].clone()).collect();
        let edges: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (remap(a), remap(b))).collect();
        let names: Vec<String> = (0..s).map(|i| format!("x{i}")).collect();
        if let Ok(net) = ReactionNetwork::from_parts(names, kept, &edges) {
            return net;
        }
    }
}

/// Fixed networks shared by the property checks.
pub fn corpus() -> Vec<(String, ReactionNetwork)> {
    let mut v: Vec<(String, ReactionNetwork)> = ["receptor_ligand.crn", "enzyme_inhibitor.crn", "futile_cycle.crn", "minors5x5.crn"]
        .iter()
        .map(|n| (n.to_string(), load(n)))
        .collect();
    for s in [3, 5, 8] {
        v.push((format!("chain{s}"), chain(s)));
    }
    for (name, text) in [
        ("non_pointed", "A + B <-> 2A + 2B"),
        ("inflow", "0 <-> A\nA + B <-> C"),
        ("cycle", "X -> Y\nY -> Z\nZ -> X"),
    ] {
        v.push((name.to_string(), parse_network(text).unwrap()));
    }
    v
}
