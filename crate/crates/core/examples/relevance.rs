//! Which minimal siphons can hold a boundary steady state, globally, for one
//! initial condition, and over a set of samples.

use crn_siphons::arith::int;
use crn_siphons::geometry::InvariantPolytope;
use crn_siphons::network::parse_network;
use crn_siphons::relevance::{RelevanceContext, Witness};
use crn_siphons::siphons::{minimal_siphons, EnumConfig};

fn main() {
    let net = parse_network(include_str!("networks/receptor_ligand.crn")).unwrap();
    let ctx = RelevanceContext::new(&net);
    let ones = InvariantPolytope::for_network(&net, vec![int(1); 5]).unwrap();
    for z in minimal_siphons(&net, &EnumConfig::default()).unwrap() {
        let z = z.members();
        let global = ctx.checked(z).unwrap();
        let local = ctx.c0(&ones, z).unwrap();
        let why = match &global.witness {
            Witness::ConservationLaw(l) => format!("law {l:?}"),
            _ => "no conservation law inside".to_string(),
        };
        println!(
            "{}: relevant {} ({why}); at all-ones {}",
            net.species().format_set(z),
            global.relevant,
            local.relevant
        );
        assert!(ctx.verify(&global, &[]));
    }
}
