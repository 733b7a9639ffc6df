//! Reaction network data model, the `.crn` text parser and complex-graph
//! connectivity.
//!
//! A network is a directed graph on complexes. Each complex is a vector of
//! non-negative stoichiometric coefficients over the species table; the
//! empty vector (written `0`) is permitted as the zero complex.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::set::IndexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: duplicate reaction {reaction}")]
    DuplicateReaction { line: usize, reaction: String },
    #[error("line {line}: species `{name}` is not declared")]
    UndeclaredSpecies { line: usize, name: String },
    #[error("species `{0}` declared twice")]
    DuplicateSpecies(String),
    #[error("network has no reactions")]
    Empty,
    #[error("complex {0} appears in no reaction")]
    IsolatedComplex(usize),
    #[error("complexes {0} and {1} are identical")]
    DuplicateComplex(usize, usize),
    #[error("reaction {0} has identical source and target")]
    SelfLoop(usize),
    #[error("reaction {0} refers to a complex that does not exist")]
    BadComplexIndex(usize),
    #[error("complex {index} has {found} coefficients, expected {expected}")]
    ComplexWidth {
        index: usize,
        found: usize,
        expected: usize,
    },
}

/// Ordered table of species names. The order fixes the coordinate order of
/// every vector and matrix derived from the network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeciesTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl SpeciesTable {
    pub fn new<I, S>(names: I) -> Result<Self, NetworkError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut table = SpeciesTable {
            names: Vec::new(),
            index: HashMap::new(),
        };
        for name in names {
            let name = name.into();
            if table.index.contains_key(&name) {
                return Err(NetworkError::DuplicateSpecies(name));
            }
            table.push(name);
        }
        Ok(table)
    }

    fn push(&mut self, name: String) -> usize {
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        i
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Renders an index set as space-separated species names.
    pub fn format_set(&self, set: &IndexSet) -> String {
        set.iter()
            .map(|i| self.names[i].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses a list of species names into an index set.
    pub fn parse_set<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<IndexSet, String> {
        names
            .into_iter()
            .map(|n| self.index_of(n).ok_or_else(|| format!("unknown species `{n}`")))
            .collect()
    }
}

/// A complex, i.e. the exponent vector of its monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Complex {
    pub exponents: Vec<u64>,
}

impl Complex {
    pub fn new(exponents: Vec<u64>) -> Self {
        Complex { exponents }
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Species with a positive coefficient.
    pub fn support(&self) -> IndexSet {
        self.exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Whether the complex contains species `a`.
    pub fn contains(&self, a: usize) -> bool {
        self.exponents[a] > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reaction {
    pub source: usize,
    pub target: usize,
    pub rate_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactionNetwork {
    species: SpeciesTable,
    complexes: Vec<Complex>,
    reactions: Vec<Reaction>,
    supports: Vec<IndexSet>,
}

impl ReactionNetwork {
    /// Builds and validates a network.
    pub fn new(
        species: SpeciesTable,
        complexes: Vec<Complex>,
        reactions: Vec<Reaction>,
    ) -> Result<Self, NetworkError> {
        if reactions.is_empty() {
            return Err(NetworkError::Empty);
        }
        let s = species.len();
        for (k, c) in complexes.iter().enumerate() {
            if c.exponents.len() != s {
                return Err(NetworkError::ComplexWidth {
                    index: k,
                    found: c.exponents.len(),
                    expected: s,
                });
            }
        }
        let mut seen_complex: HashMap<&Complex, usize> = HashMap::new();
        for (k, c) in complexes.iter().enumerate() {
            if let Some(&prev) = seen_complex.get(c) {
                return Err(NetworkError::DuplicateComplex(prev, k));
            }
            seen_complex.insert(c, k);
        }
        let mut used = vec![false; complexes.len()];
        let mut seen_edge = HashMap::new();
        for (r, rx) in reactions.iter().enumerate() {
            if rx.source >= complexes.len() || rx.target >= complexes.len() {
                return Err(NetworkError::BadComplexIndex(r));
            }
            if rx.source == rx.target {
                return Err(NetworkError::SelfLoop(r));
            }
            if seen_edge.insert((rx.source, rx.target), r).is_some() {
                return Err(NetworkError::DuplicateReaction {
                    line: 0,
                    reaction: format!("{} -> {}", rx.source, rx.target),
                });
            }
            used[rx.source] = true;
            used[rx.target] = true;
        }
        if let Some(k) = used.iter().position(|u| !u) {
            return Err(NetworkError::IsolatedComplex(k));
        }
        let supports = complexes.iter().map(Complex::support).collect();
        Ok(ReactionNetwork {
            species,
            complexes,
            reactions,
            supports,
        })
    }

    /// Convenience constructor from species names, exponent rows and
    /// unlabelled directed edges.
    pub fn from_parts<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        complexes: Vec<Vec<u64>>,
        edges: &[(usize, usize)],
    ) -> Result<Self, NetworkError> {
        let species = SpeciesTable::new(names)?;
        let complexes = complexes.into_iter().map(Complex::new).collect();
        let reactions = edges
            .iter()
            .map(|&(source, target)| Reaction {
                source,
                target,
                rate_label: None,
            })
            .collect();
        Self::new(species, complexes, reactions)
    }

    pub fn species(&self) -> &SpeciesTable {
        &self.species
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// Support of complex `k`.
    pub fn support(&self, k: usize) -> &IndexSet {
        &self.supports[k]
    }

    /// Reaction vectors `y_target - y_source`, one per directed reaction in
    /// reaction order.
    pub fn stoichiometric_generators(&self) -> Vec<Vec<i64>> {
        self.reactions
            .iter()
            .map(|r| {
                let src = &self.complexes[r.source].exponents;
                let tgt = &self.complexes[r.target].exponents;
                src.iter()
                    .zip(tgt)
                    .map(|(&a, &b)| b as i64 - a as i64)
                    .collect()
            })
            .collect()
    }

    /// Species that occur in no complex.
    pub fn unused_species(&self) -> IndexSet {
        let mut used = IndexSet::new();
        for s in &self.supports {
            used.union_with(s);
        }
        used.complement(self.num_species())
    }

    pub fn connectivity(&self) -> ConnectivityInfo {
        ConnectivityInfo::of(self)
    }

    pub fn format_complex(&self, k: usize) -> String {
        format_complex(&self.species, &self.complexes[k])
    }

    /// Canonical `.crn` text. Reparsing it reproduces the network exactly.
    pub fn to_canonical_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "species {}", self.species.names.join(", "));
        for r in &self.reactions {
            let _ = write!(
                out,
                "{} -> {}",
                self.format_complex(r.source),
                self.format_complex(r.target)
            );
            if let Some(label) = &r.rate_label {
                let _ = write!(out, " ; k={label}");
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ReactionNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_text())
    }
}

fn format_complex(species: &SpeciesTable, c: &Complex) -> String {
    if c.is_zero() {
        return "0".to_string();
    }
    c.exponents
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                species.name(i).to_string()
            } else {
                format!("{e}{}", species.name(i))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Strong and weak components of the complex graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityInfo {
    pub strong_components: Vec<Vec<usize>>,
    pub linkage_classes: Vec<Vec<usize>>,
    pub is_strongly_connected: bool,
    pub components_strongly_connected: bool,
}

impl ConnectivityInfo {
    fn of(net: &ReactionNetwork) -> Self {
        let n = net.complexes.len();
        let mut graph = DiGraph::<(), ()>::with_capacity(n, net.reactions.len());
        let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
        let mut uf = UnionFind::<usize>::new(n);
        for r in &net.reactions {
            graph.add_edge(nodes[r.source], nodes[r.target], ());
            uf.union(r.source, r.target);
        }
        let mut strong: Vec<Vec<usize>> = tarjan_scc(&graph)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        strong.sort();

        let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
        for k in 0..n {
            by_root.entry(uf.find(k)).or_default().push(k);
        }
        let mut linkage: Vec<Vec<usize>> = by_root.into_values().collect();
        linkage.sort();

        let components_strongly_connected = strong.len() == linkage.len();
        ConnectivityInfo {
            is_strongly_connected: strong.len() == 1,
            components_strongly_connected,
            strong_components: strong,
            linkage_classes: linkage,
        }
    }
}

/// Parses `.crn` text.
///
/// Grammar, one statement per line:
///
/// ```text
/// line         := comment | reaction | species_decl | blank
/// comment      := '#' .*
/// species_decl := 'species' ident (',' ident)*
/// reaction     := complex ('->' | '<->') complex [';' 'k' '=' ident]
/// complex      := '0' | term ('+' term)*
/// term         := [integer] ident
/// ```
pub fn parse_network(text: &str) -> Result<ReactionNetwork, NetworkError> {
    let mut lines = Vec::new();
    let mut declared: Option<SpeciesTable> = None;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let body = raw.split('#').next().unwrap_or("");
        let tokens = lex(body, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        if matches!(&tokens[0].tok, Tok::Ident(w) if w == "species")
            && !tokens.iter().any(|t| t.tok.is_arrow())
        {
            let table = declared.get_or_insert_with(|| SpeciesTable::new::<_, String>([]).unwrap());
            parse_species_decl(&tokens, line_no, table)?;
        } else {
            lines.push((line_no, tokens));
        }
    }

    let explicit = declared.is_some();
    let mut species = declared.unwrap_or_else(|| SpeciesTable::new::<_, String>([]).unwrap());
    let mut parsed = Vec::new();
    for (line_no, tokens) in &lines {
        let stmt = ReactionLine::parse(tokens, *line_no)?;
        for name in stmt.names() {
            if species.index_of(name).is_none() {
                if explicit {
                    return Err(NetworkError::UndeclaredSpecies {
                        line: *line_no,
                        name: name.to_string(),
                    });
                }
                species.push(name.to_string());
            }
        }
        parsed.push((*line_no, stmt));
    }
    if parsed.is_empty() {
        return Err(NetworkError::Empty);
    }

    let s = species.len();
    let mut complexes: Vec<Complex> = Vec::new();
    let mut complex_index: HashMap<Complex, usize> = HashMap::new();
    let mut intern = |terms: &[(u64, String)]| -> usize {
        let mut exps = vec![0u64; s];
        for (coef, name) in terms {
            exps[species.index_of(name).unwrap()] += coef;
        }
        let c = Complex::new(exps);
        *complex_index.entry(c.clone()).or_insert_with(|| {
            complexes.push(c);
            complexes.len() - 1
        })
    };

    let mut reactions = Vec::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (line_no, stmt) in &parsed {
        let lhs = intern(&stmt.lhs);
        let rhs = intern(&stmt.rhs);
        if lhs == rhs {
            return Err(NetworkError::Syntax {
                line: *line_no,
                column: 1,
                message: "reactant and product complexes are identical".into(),
            });
        }
        let mut push = |source: usize, target: usize, label: Option<String>| {
            if seen.insert((source, target), *line_no).is_some() {
                return Err(NetworkError::DuplicateReaction {
                    line: *line_no,
                    reaction: format!("{source} -> {target}"),
                });
            }
            reactions.push(Reaction {
                source,
                target,
                rate_label: label,
            });
            Ok(())
        };
        if stmt.reversible {
            push(lhs, rhs, stmt.label.as_ref().map(|l| format!("{l}_fwd")))?;
            push(rhs, lhs, stmt.label.as_ref().map(|l| format!("{l}_rev")))?;
        } else {
            push(lhs, rhs, stmt.label.clone())?;
        }
    }

    ReactionNetwork::new(species, complexes, reactions)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Plus,
    Arrow,
    BiArrow,
    Semi,
    Comma,
    Eq,
}

impl Tok {
    fn is_arrow(&self) -> bool {
        matches!(self, Tok::Arrow | Tok::BiArrow)
    }

    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Plus => "`+`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::BiArrow => "`<->`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> NetworkError {
    NetworkError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(body: &str, line: usize) -> Result<Vec<Token>, NetworkError> {
    let chars: Vec<char> = body.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits
                .parse::<u64>()
                .map_err(|_| syntax(line, column, "coefficient does not fit in 64 bits"))?;
            Tok::Int(n)
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let (tok, width) = if rest.starts_with("<->") {
                (Tok::BiArrow, 3)
            } else if rest.starts_with("->") {
                (Tok::Arrow, 2)
            } else {
                match c {
                    '+' => (Tok::Plus, 1),
                    ';' => (Tok::Semi, 1),
                    ',' => (Tok::Comma, 1),
                    '=' => (Tok::Eq, 1),
                    _ => return Err(syntax(line, column, format!("unexpected character `{c}`"))),
                }
            };
            i += width;
            tok
        };
        out.push(Token { tok, column });
    }
    Ok(out)
}

fn parse_species_decl(
    tokens: &[Token],
    line: usize,
    table: &mut SpeciesTable,
) -> Result<(), NetworkError> {
    let mut expect_ident = true;
    for t in &tokens[1..] {
        match (&t.tok, expect_ident) {
            (Tok::Ident(name), true) => {
                if table.index_of(name).is_some() {
                    return Err(NetworkError::DuplicateSpecies(name.clone()));
                }
                table.push(name.clone());
                expect_ident = false;
            }
            (Tok::Comma, false) => expect_ident = true,
            (tok, _) => {
                return Err(syntax(
                    line,
                    t.column,
                    format!("unexpected {} in species declaration", tok.describe()),
                ))
            }
        }
    }
    if expect_ident {
        let column = tokens.last().map(|t| t.column).unwrap_or(1);
        return Err(syntax(line, column, "expected species name"));
    }
    Ok(())
}

struct ReactionLine {
    lhs: Vec<(u64, String)>,
    rhs: Vec<(u64, String)>,
    reversible: bool,
    label: Option<String>,
}

impl ReactionLine {
    fn names(&self) -> impl Iterator<Item = &str> {
        self.lhs.iter().chain(self.rhs.iter()).map(|(_, n)| n.as_str())
    }

    fn parse(tokens: &[Token], line: usize) -> Result<Self, NetworkError> {
        let mut pos = 0;
                let lhs = parse_complex(tokens, &mut pos, line)?;
        let reversible = match tokens.get(pos) {
            Some(Token { tok: Tok::Arrow, .. }) => false,
            Some(Token {
                tok: Tok::BiArrow, ..
            }) => true,
            Some(t) => {
                return Err(syntax(
                    line,
                    t.column,
                    format!("expected `->` or `<->`, found {}", t.tok.describe()),
                ))
            }
            None => return Err(syntax(line, end_column(tokens), "expected `->` or `<->`")),
        };
        pos += 1;
        let rhs = parse_complex(tokens, &mut pos, line)?;
        let mut label = None;
        if let Some(t) = tokens.get(pos) {
            if t.tok != Tok::Semi {
                return Err(syntax(
                    line,
                    t.column,
                    format!("unexpected {} after reaction", t.tok.describe()),
                ));
            }
            pos += 1;
            match tokens.get(pos..) {
                Some(
                    [Token {
                        tok: Tok::Ident(k), ..
                    }, Token { tok: Tok::Eq, .. }, Token {
                        tok: Tok::Ident(name),
                        ..
                    }],
                ) if k == "k" => label = Some(name.clone()),
                _ => {
                    let column = tokens.get(pos).map(|t| t.column).unwrap_or(t.column + 1);
                    return Err(syntax(line, column, "expected rate label `k=<ident>`"));
                }
            }
        }
        Ok(ReactionLine {
            lhs,
            rhs,
            reversible,
            label,
        })
    }
}

fn end_column(tokens: &[Token]) -> usize {
    tokens.last().map(|t| t.column + 1).unwrap_or(1)
}

fn parse_complex(
    tokens: &[Token],
    pos: &mut usize,
    line: usize,
) -> Result<Vec<(u64, String)>, NetworkError> {
    if let Some(Token {
        tok: Tok::Int(0), ..
    }) = tokens.get(*pos)
    {
        let next = tokens.get(*pos + 1).map(|t| &t.tok);
        if !matches!(next, Some(Tok::Ident(_))) {
            *pos += 1;
            return Ok(Vec::new());
        }
    }
    let mut terms = Vec::new();
    loop {
        let coef = match tokens.get(*pos) {
            Some(Token {
                tok: Tok::Int(n),
                column,
            }) => {
                if *n == 0 {
                    return Err(syntax(line, *column, "coefficient must be at least 1"));
                }
                *pos += 1;
                *n
            }
            _ => 1,
        };
        match tokens.get(*pos) {
            Some(Token {
                tok: Tok::Ident(name),
                ..
            }) => {
                terms.push((coef, name.clone()));
                *pos += 1;
            }
            Some(t) => {
                return Err(syntax(
                    line,
                    t.column,
                    format!("expected species name, found {}", t.tok.describe()),
                ))
            }
            None => return Err(syntax(line, end_column(tokens), "expected species name")),
        }
        match tokens.get(*pos) {
            Some(Token { tok: Tok::Plus, .. }) => {
                *pos += 1;
                // a dangling `+` is reported at the `+` itself
                if !matches!(
                    tokens.get(*pos).map(|t| &t.tok),
                    Some(Tok::Ident(_)) | Some(Tok::Int(_))
                ) {
                    return Err(syntax(
                        line,
                        tokens[*pos - 1].column,
                        "dangling `+` without a following term",
                    ));
                }
            }
            _ => return Ok(terms),
        }
    }
}
