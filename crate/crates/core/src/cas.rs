//! Macaulay2 scripts reproducing the ideal-theoretic computation of
//! siphons, for cross-checking with an external computer algebra system.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::network_cone;
use crate::network::ReactionNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CasFlavor {
    /// `c^{y_i} (c^{y_j} - c^{y_i})` per reaction.
    #[default]
    Ig,
    /// Binomials `c^{y_i} - c^{y_j}`, one per reaction up to reversal.
    Jg,
    /// The complex monomials; meaningful for strongly connected networks.
    Mg,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown flavor `{0}` (expected ig, jg or mg)")]
pub struct UnknownFlavor(String);

impl FromStr for CasFlavor {
    type Err = UnknownFlavor;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ig" => Ok(CasFlavor::Ig),
            "jg" => Ok(CasFlavor::Jg),
            "mg" => Ok(CasFlavor::Mg),
            _ => Err(UnknownFlavor(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CasOptions {
    pub flavor: CasFlavor,
    pub lowercase: bool,
}

const RESERVED: &[&str] = &["ringG", "idealG", "boundaryB", "ii", "pi", "end", "do", "if", "then", "else", "for", "from", "to", "in", "of", "and", "or", "not", "new", "list", "global", "local", "symbol", "try", "catch", "break", "return", "while"];

/// Ring variable names: species names with `_` dropped, optionally
/// lowercased, made unique and kept clear of script identifiers.
pub fn variable_names(net: &ReactionNetwork, lowercase: bool) -> Vec<String> {
    let mut used: HashSet<String> = RESERVED.iter().map(|s| s.to_string()).collect();
    net.species()
        .names()
        .iter()
        .map(|n| {
            let mut base: String = n.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
            if lowercase {
                base = base.to_ascii_lowercase();
            }
            if base.is_empty() || base.starts_with(|c: char| c.is_ascii_digit()) {
                base.insert(0, 'x');
            }
            let mut name = base.clone();
            let mut k = 1;
            while !used.insert(name.clone()) {
                name = format!("{base}'{k}");
                k += 1;
            }
            name
        })
        .collect()
}

fn monomial(exponents: &[u64], vars: &[String]) -> String {
    let factors: Vec<String> = exponents
        .iter()
        .zip(vars)
        .filter(|(e, _)| **e > 0)
        .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect();
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    }
}

/// Generators of the chosen ideal, as Macaulay2 expressions.
pub fn ideal_generators(net: &ReactionNetwork, flavor: CasFlavor, vars: &[String]) -> Vec<String> {
    let mono = |k: usize| monomial(&net.complexes()[k].exponents, vars);
    match flavor {
        CasFlavor::Ig => net
            .reactions()
            .iter()
            .map(|r| {
                let src = mono(r.source);
                let dst = mono(r.target);
                if src == "1" {
                    format!("{dst}-1")
                } else {
                    format!("{src}*({dst}-{src})")
                }
            })
            .collect(),
        CasFlavor::Jg => {
            let mut seen = HashSet::new();
            net.reactions()
                .iter()
                .filter(|r| seen.insert((r.source.min(r.target), r.source.max(r.target))))
                .map(|r| format!("{}-{}", mono(r.source), mono(r.target)))
                .collect()
        }
        CasFlavor::Mg => (0..net.complexes().len()).map(mono).collect(),
    }
}

/// The complete script: ring, ideal, decomposition with the product of all
/// variables added, and saturation by the intersection of the facet primes
/// when `Q` is pointed.
pub fn export_cas_script(net: &ReactionNetwork, opts: &CasOptions) -> String {
    let vars = variable_names(net, opts.lowercase);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "-- {} species, {} complexes, {} reactions",
        vars.len(),
        net.complexes().len(),
        net.reactions().len()
    );
    let _ = writeln!(out, "ringG = QQ[{}];", vars.join(","));
    let flavor = if opts.flavor == CasFlavor::Mg && !net.connectivity().is_strongly_connected {
        let _ = writeln!(
            out,
            "-- the network is not strongly connected; using the ig ideal instead of the monomial one"
        );
        CasFlavor::Ig
    } else {
        opts.flavor
    };
    let gens = ideal_generators(net, flavor, &vars);
    let _ = writeln!(out, "idealG = ideal({});", gens.join(", "));
    let _ = writeln!(out, "decompose(idealG + ideal product gens ringG)");
    if flavor == CasFlavor::Mg {
        let _ = writeln!(out, "minimalPrimes idealG");
    }
    let cone = network_cone(net);
    if let Some(facets) = &cone.facets {
        if !facets.is_empty() {
            let s = net.num_species();
            let primes: Vec<String> = facets
                .iter()
                .map(|f| {
                    let comp: Vec<&str> = f.complement(s).iter().map(|i| vars[i].as_str()).collect();
                    format!("ideal({})", comp.join(","))
                })
                .collect();
            let b = if primes.len() == 1 {
                primes[0].clone()
            } else {
                format!("intersect({})", primes.join(", "))
            };
            let _ = writeln!(out, "boundaryB = {b};");
            let _ = writeln!(out, "decompose saturate(idealG, boundaryB)");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;

    #[test]
    fn monomial_ideal_of_receptor_ligand() {
        let net = parse_network(
            "species A, B, C, D, E\n2A + C <-> A + D\nA + D <-> E\nE <-> B + C\nB + C <-> 2A + C",
        )
        .unwrap();
        let vars = variable_names(&net, false);
        assert_eq!(
            ideal_generators(&net, CasFlavor::Mg, &vars),
            vec!["A^2*C", "A*D", "E", "B*C"]
        );
        let script = export_cas_script(&net, &CasOptions { flavor: CasFlavor::Mg, lowercase: false });
        assert!(script.contains("idealG = ideal(A^2*C, A*D, E, B*C);"));
        assert!(script.contains("intersect("));
    }

    #[test]
    fn names_stay_clear_of_script_identifiers() {
        let net = parse_network("x_1 -> ii\nii -> ringG").unwrap();
        assert_eq!(variable_names(&net, false), vec!["x1", "ii'1", "ringG'1"]);
    }

    #[test]
    fn flavor_parsing() {
        assert_eq!("JG".parse::<CasFlavor>(), Ok(CasFlavor::Jg));
        assert!("xx".parse::<CasFlavor>().is_err());
        assert_eq!(CasFlavor::default(), CasFlavor::Ig);
    }
}
