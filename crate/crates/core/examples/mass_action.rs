//! Mass-action vector field and exact checks that siphon faces are invariant.

use crn_siphons::arith::{int, ratio};
use crn_siphons::dynamics::{build_rhs, check_face_invariance, check_steady_face, MassActionSystem};
use crn_siphons::network::parse_network;
use crn_siphons::siphons::{minimal_siphons, EnumConfig};

fn main() {
    let net = parse_network(include_str!("networks/receptor_ligand.crn")).unwrap();
    let kappa = vec![int(1), int(2), int(3), ratio(1, 2), int(5), ratio(1, 3), int(7), ratio(3, 2)];
    let sys = MassActionSystem::new(&net, kappa).unwrap();
    print!("{}", build_rhs(&sys).format(&net));
    for z in minimal_siphons(&net, &EnumConfig::default()).unwrap() {
        let z = z.members();
        let inv = check_face_invariance(&net, z, 20, 0).unwrap();
        let steady = check_steady_face(&net, z, 20, 0).unwrap();
        println!(
            "{}: invariant {}, steady {}",
            net.species().format_set(z),
            inv.passed(),
            steady.passed()
        );
    }
}
