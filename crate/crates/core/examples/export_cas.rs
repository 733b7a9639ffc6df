//! Macaulay2 scripts for cross-checking siphons with a computer algebra system.

use crn_siphons::cas::{export_cas_script, CasFlavor, CasOptions};
use crn_siphons::network::parse_network;

fn main() {
    let enzyme = parse_network(include_str!("networks/enzyme_inhibitor.crn")).unwrap();
    print!(
        "{}",
        export_cas_script(&enzyme, &CasOptions { flavor: CasFlavor::Jg, lowercase: true })
    );
    let receptor = parse_network(include_str!("networks/receptor_ligand.crn")).unwrap();
    print!(
        "{}",
        export_cas_script(&receptor, &CasOptions { flavor: CasFlavor::Mg, lowercase: false })
    );
}
