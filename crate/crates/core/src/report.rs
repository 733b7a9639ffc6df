//! Serializable form of an [`AnalysisReport`] and its text rendering.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, Rational};
use crate::network::{ConnectivityInfo, ReactionNetwork};
use crate::relevance::{AnalysisReport, RelevanceVerdict, Witness};
use crate::set::IndexSet;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema_version: u32,
    pub network: JsonNetwork,
    pub connectivity: ConnectivityInfo,
    pub conservation_basis: Vec<Vec<String>>,
    pub cone: JsonCone,
    pub minimal_siphons: Vec<JsonSiphon>,
    pub complete: bool,
    pub verdicts: JsonVerdicts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbits: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<JsonTiming>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonNetwork {
    pub species: Vec<String>,
    pub complexes: Vec<String>,
    pub reactions: Vec<JsonReaction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonReaction {
    pub source: usize,
    pub target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonCone {
    pub dimension: usize,
    pub pointed: bool,
    pub facets: Option<Vec<JsonFacet>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonFacet {
    pub generators: Vec<String>,
    pub complement: Vec<String>,
    pub normal: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JsonWitness {
    ConservationLaw { vector: Vec<String> },
    NoConservationLaw { certificate: Vec<String> },
    Facet { complement: Vec<String>, normal: Vec<String> },
    NoFacet,
    FacePoint { sample: usize, point: Vec<String> },
    EmptyFaces { certificates: Vec<Vec<String>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonWitnessEntry {
    /// `star_lp`, `facet`, `c0_face` or `omega_face`.
    pub route: String,
    #[serde(flatten)]
    pub witness: JsonWitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonSiphon {
    pub members: Vec<String>,
    pub relevant: bool,
    pub cross_checked: bool,
    pub witnesses: Vec<JsonWitnessEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0_relevant: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_relevant: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonVerdicts {
    pub relevant_count: usize,
    pub all_non_relevant: bool,
    pub boundary_steady_state_certificate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady_face_note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0_relevant_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonTiming {
    pub siphons_ms: f64,
    pub relevance_ms: f64,
    pub total_ms: f64,
}

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn integers(v: &[BigInt]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn names(net: &ReactionNetwork, z: &IndexSet) -> Vec<String> {
    z.iter().map(|i| net.species().name(i).to_string()).collect()
}

fn witness(net: &ReactionNetwork, route: &str, v: &RelevanceVerdict) -> JsonWitnessEntry {
    let s = net.num_species();
    let witness = match &v.witness {
        Witness::ConservationLaw(l) => JsonWitness::ConservationLaw { vector: integers(l) },
        Witness::NoConservationLaw(y) => JsonWitness::NoConservationLaw {
            certificate: rationals(y),
        },
        Witness::Facet(f) => JsonWitness::Facet {
            complement: names(net, &f.complement(s)),
            normal: integers(&f.normal),
        },
        Witness::NoFacet => JsonWitness::NoFacet,
        Witness::FacePoint { sample, point } => JsonWitness::FacePoint {
            sample: *sample,
            point: rationals(point),
        },
        Witness::EmptyFaces(c) => JsonWitness::EmptyFaces {
            certificates: c.iter().map(|y| rationals(y)).collect(),
        },
    };
    JsonWitnessEntry {
        route: route.to_string(),
        witness,
    }
}

impl JsonReport {
    pub fn from_report(r: &AnalysisReport, include_timing: bool) -> Self {
        let net = &r.network;
        let s = net.num_species();
        let network = JsonNetwork {
            species: net.species().names().to_vec(),
            complexes: (0..net.complexes().len()).map(|k| net.format_complex(k)).collect(),
            reactions: net
                .reactions()
                .iter()
                .map(|rx| JsonReaction {
                    source: rx.source,
                    target: rx.target,
                    label: rx.rate_label.clone(),
                })
                .collect(),
        };
        let cone = JsonCone {
            dimension: r.conservation_basis.dim(),
            pointed: r.cone_pointed,
            facets: r.facets.as_ref().map(|fs| {
                fs.iter()
                    .map(|f| JsonFacet {
                        generators: names(net, &f.generators),
                        complement: names(net, &f.complement(s)),
                        normal: integers(&f.normal),
                    })
                    .collect()
            }),
        };
        let minimal_siphons = r
            .siphons
            .iter()
            .map(|a| {
                let mut witnesses = vec![witness(net, "star_lp", &a.verdict)];
                if let Some(v) = &a.facet_verdict {
                    witnesses.push(witness(net, "facet", v));
                }
                if let Some(v) = &a.c0_verdict {
                    witnesses.push(witness(net, "c0_face", v));
                }
                if let Some(v) = &a.omega_verdict {
                    witnesses.push(witness(net, "omega_face", v));
                }
                JsonSiphon {
                    members: names(net, &a.siphon),
                    relevant: a.verdict.relevant,
                    cross_checked: a.verdict.cross_checked,
                    witnesses,
                    c0_relevant: a.c0_verdict.as_ref().map(|v| v.relevant),
                    face_dim: a.face_dim,
                    omega_relevant: a.omega_verdict.as_ref().map(|v| v.relevant),
                }
            })
            .collect();
        let ms = |d: std::time::Duration| d.as_secs_f64() * 1000.0;
        JsonReport {
            schema_version: SCHEMA_VERSION,
            network,
            connectivity: r.connectivity.clone(),
            conservation_basis: r
                .conservation_basis
                .matrix()
                .row_vectors()
                .iter()
                .map(|row| rationals(row))
                .collect(),
            cone,
            minimal_siphons,
            complete: r.complete,
            verdicts: JsonVerdicts {
                relevant_count: r.relevant().count(),
                all_non_relevant: r.all_non_relevant,
                boundary_steady_state_certificate: r.boundary_steady_state_certificate.clone(),
                steady_face_note: r.steady_face_note.clone(),
                c0_relevant_count: r.c0.as_ref().map(|_| r.c0_relevant().count()),
            },
            c0: r.c0.as_ref().map(|c| rationals(c)),
            orbits: r.orbits.clone(),
            timing: include_timing.then(|| JsonTiming {
                siphons_ms: ms(r.timing.siphons),
                relevance_ms: ms(r.timing.relevance),
                total_ms: ms(r.timing.total),
            }),
        }
    }
}

/// Plain-text summary of a report.
pub fn render_text(r: &AnalysisReport) -> String {
    let net = &r.network;
    let s = net.num_species();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "network: {} species, {} complexes, {} reactions",
        s,
        net.complexes().len(),
        net.reactions().len()
    );
    let _ = writeln!(
        out,
        "strongly connected: {}; linkage classes: {}",
        r.connectivity.is_strongly_connected,
        r.connectivity.linkage_classes.len()
    );
    let _ = writeln!(out, "conservation basis ({}):", r.conservation_basis.dim());
    for row in r.conservation_basis.integer_rows() {
        let _ = writeln!(out, "  {}", integers(&row).join(" "));
    }
    match &r.facets {
        Some(fs) => {
            let _ = writeln!(out, "cone: pointed, {} facets", fs.len());
            for f in fs {
                let _ = writeln!(out, "  complement {}", net.species().format_set(&f.complement(s)));
            }
        }
        None => {
            let _ = writeln!(out, "cone: not pointed");
        }
    }
    if !r.complete {
        let _ = writeln!(out, "budget exceeded: siphon list is partial");
    }
    let _ = writeln!(out, "minimal siphons ({}):", r.siphons.len());
    for a in &r.siphons {
        let mut line = format!(
            "  {}: {}",
            net.species().format_set(&a.siphon),
            if a.verdict.relevant { "relevant" } else { "not relevant" }
        );
        if let Witness::ConservationLaw(l) = &a.verdict.witness {
            let _ = write!(line, " [law {}]", integers(l).join(" "));
        }
        if let Some(v) = &a.c0_verdict {
            let _ = write!(line, "; c0: {}", if v.relevant { "relevant" } else { "not relevant" });
        }
        if let Some(d) = a.face_dim {
            let _ = write!(line, ", face dim {d}");
        }
        if let Some(v) = &a.omega_verdict {
            let _ = write!(line, "; samples: {}", if v.relevant { "relevant" } else { "not relevant" });
        }
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "relevant: {}", r.relevant().count());
    if let Some(orbits) = &r.orbits {
        let sizes: Vec<String> = orbits.iter().map(|o| o.len().to_string()).collect();
        let _ = writeln!(out, "orbit sizes: {}", sizes.join(" "));
    }
    if let Some(c) = &r.boundary_steady_state_certificate {
        let _ = writeln!(out, "certificate: {c}");
    }
    if let Some(n) = &r.steady_face_note {
        let _ = writeln!(out, "note: {n}");
    }
    out
}
