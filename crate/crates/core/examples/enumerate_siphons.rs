//! Minimal siphons by search, by brute force, and as a size histogram for a
//! network too large to list.

use crn_siphons::network::{parse_network, ReactionNetwork};
use crn_siphons::siphons::{brute_force_minimal_siphons, count_minimal_siphons, minimal_siphons, EnumConfig};

fn chain(s: usize) -> ReactionNetwork {
    let names: Vec<String> = (1..=s).map(|i| format!("c{i}")).collect();
    let complexes = (0..s - 1)
        .map(|k| (0..s).map(|i| u64::from(i == k || i == k + 1)).collect())
        .collect();
    let edges: Vec<(usize, usize)> = (0..s - 2).flat_map(|k| [(k, k + 1), (k + 1, k)]).collect();
    ReactionNetwork::from_parts(names, complexes, &edges).unwrap()
}

fn main() {
    let net = parse_network(include_str!("networks/receptor_ligand.crn")).unwrap();
    let cfg = EnumConfig::default();
    for z in minimal_siphons(&net, &cfg).unwrap() {
        println!("{}", net.species().format_set(z.members()));
    }
    assert_eq!(brute_force_minimal_siphons(&net).unwrap().len(), 3);

    let long = chain(30);
    let hist = count_minimal_siphons(&long, &cfg).unwrap();
    println!("chain of 30: {} minimal siphons", hist.total);
    for (size, n) in &hist.by_size {
        println!("  size {size}: {n}");
    }
}
