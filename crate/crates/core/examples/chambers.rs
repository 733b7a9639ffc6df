//! Vertex supports of invariant polyhedra: initial conditions in the same
//! chamber share a signature.

use crn_siphons::arith::{int, ratio};
use crn_siphons::geometry::chamber_signature;
use crn_siphons::network::parse_network;

fn main() {
    let net = parse_network(include_str!("networks/receptor_ligand.crn")).unwrap();
    let samples = [
        ("first", vec![ratio(1, 10), ratio(1, 10), int(1), ratio(1, 10), ratio(1, 10)]),
        ("first again", vec![ratio(1, 5), ratio(1, 10), int(2), ratio(1, 10), ratio(1, 10)]),
        ("all ones", vec![int(1); 5]),
    ];
    for (label, c0) in samples {
        let sig = chamber_signature(&net, c0).unwrap();
        let names: Vec<String> = sig.iter().map(|v| net.species().format_set(v)).collect();
        println!("{label}: {}", names.join(" | "));
    }
}
