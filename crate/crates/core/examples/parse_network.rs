//! Parse a reaction file, print its canonical form and the complex graph's
//! strong components.

use crn_siphons::network::parse_network;

fn main() {
    let text = include_str!("networks/enzyme_inhibitor.crn");
    let net = parse_network(text).expect("valid network");
    print!("{net}");
    let conn = net.connectivity();
    println!("strongly connected: {}", conn.is_strongly_connected);
    for comp in &conn.strong_components {
        let names: Vec<String> = comp.iter().map(|&k| net.format_complex(k)).collect();
        println!("component: {}", names.join(" | "));
    }
    for g in net.stoichiometric_generators() {
        println!("reaction vector {g:?}");
    }
}
