//! The 5x5 adjacent-minors network: relevant minimal siphons grouped into
//! orbits of the square's symmetries, and face dimensions at three centres.

use std::path::Path;

use crn_siphons::arith::{conservation_basis, int, ratio};
use crn_siphons::cli::load_symmetries;
use crn_siphons::geometry::{face_dimension, InvariantPolytope};
use crn_siphons::network::parse_network;
use crn_siphons::relevance::{orbit_partition, RelevanceContext};
use crn_siphons::siphons::{minimal_siphons, EnumConfig};

fn main() {
    let net = parse_network(include_str!("networks/minors5x5.crn")).unwrap();
    let sym = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/networks/minors5x5.sym");
    let perms = load_symmetries(&net, &sym).unwrap();
    let ctx = RelevanceContext::new(&net);
    let siphons = minimal_siphons(&net, &EnumConfig::default()).unwrap();
    let relevant: Vec<_> = siphons
        .iter()
        .map(|z| z.members().clone())
        .filter(|z| ctx.checked(z).unwrap().relevant)
        .collect();
    println!("{} minimal siphons, {} relevant", siphons.len(), relevant.len());
    let basis = conservation_basis(&net);
    for (label, centre) in [("all ones", int(1)), ("centre 1/2", ratio(1, 2)), ("centre 3/2", ratio(3, 2))] {
        let mut c0 = vec![int(1); 25];
        c0[12] = centre;
        let p = InvariantPolytope::new(&basis, c0).unwrap();
        println!("{label}:");
        for orbit in orbit_partition(&relevant, &perms) {
            let z = &relevant[orbit[0]];
            let dim = face_dimension(&p, z).map_or("empty".to_string(), |d| d.to_string());
            println!("  orbit of {} ({} sets): face {dim}", net.species().format_set(z), orbit.len());
        }
    }
}
