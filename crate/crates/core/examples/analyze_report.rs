//! Full analysis as text and as JSON.

use crn_siphons::network::parse_network;
use crn_siphons::relevance::{analyze, AnalysisOptions};
use crn_siphons::report::{render_text, JsonReport};

fn main() {
    let net = parse_network(include_str!("networks/futile_cycle.crn")).unwrap();
    let report = analyze(&net, &AnalysisOptions::default()).unwrap();
    print!("{}", render_text(&report));
    let json = JsonReport::from_report(&report, false);
    println!("{}", serde_json::to_string_pretty(&json.verdicts).unwrap());
}
