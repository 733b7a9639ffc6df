//! Conservation laws and the facets of the cone they span.

use crn_siphons::arith::conservation_basis;
use crn_siphons::geometry::network_cone;
use crn_siphons::network::parse_network;

fn main() {
    let net = parse_network(include_str!("networks/futile_cycle.crn")).unwrap();
    let basis = conservation_basis(&net);
    println!("{} independent conservation laws", basis.dim());
    for row in basis.integer_rows() {
        println!("  {row:?}");
    }
    let cone = network_cone(&net);
    match cone.facets() {
        Ok(facets) => {
            for f in facets {
                println!(
                    "facet spanned by {{{}}}, complement {{{}}}, normal {:?}",
                    net.species().format_set(&f.generators),
                    net.species().format_set(&f.complement(net.num_species())),
                    f.normal
                );
            }
        }
        Err(e) => println!("no facets: {e}"),
    }
}
