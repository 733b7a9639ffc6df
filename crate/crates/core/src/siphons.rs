//! Siphons: the predicate, minimal-siphon enumeration, a brute-force
//! oracle, and minimal transversals of hypergraphs (the fast path for
//! strongly connected networks).
//!
//! A non-empty species set `Z` is a siphon when every reaction producing a
//! species of `Z` consumes a species of `Z`. For each species `z` the
//! constraint table stores the reactant supports of the reactions that
//! produce `z` without consuming it; `Z` is a siphon iff for every `z ∈ Z`
//! each stored support meets `Z`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::ReactionNetwork;
use crate::set::{inclusion_minimal, IndexSet};

/// A non-empty set of species indices satisfying the siphon condition.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Siphon(IndexSet);

impl Siphon {
    /// Checks the siphon condition.
    pub fn new(net: &ReactionNetwork, members: IndexSet) -> Result<Self, SiphonViolation> {
        is_siphon(net, &members)?;
        Ok(Siphon(members))
    }

    pub(crate) fn new_unchecked(members: IndexSet) -> Self {
        Siphon(members)
    }

    pub fn members(&self) -> &IndexSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Siphon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Siphon{:?}", self.0)
    }
}

/// Why a set fails to be a siphon.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SiphonViolation {
    #[error("the empty set is not a siphon")]
    Empty,
    #[error("reaction {reaction} produces species {species} without consuming any member")]
    Unprotected { reaction: usize, species: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SiphonError {
    #[error("enumeration budget exceeded after {} results", partial.len())]
    BudgetExceeded { partial: Vec<IndexSet> },
    #[error("brute force is limited to {max} species, network has {found}")]
    TooManySpecies { max: usize, found: usize },
    #[error("the transversal fast path needs a strongly connected network")]
    NotStronglyConnected,
}

/// Limits for the enumerators. `None` means unlimited.
#[derive(Debug, Clone, Default)]
pub struct EnumConfig {
    pub max_results: Option<usize>,
    pub time_limit: Option<Duration>,
}

impl EnumConfig {
    fn deadline(&self) -> Option<Instant> {
        self.time_limit.map(|d| Instant::now() + d)
    }
}

/// `true`, or the first violated `(reaction, species)` pair.
pub fn is_siphon(net: &ReactionNetwork, z: &IndexSet) -> Result<(), SiphonViolation> {
    if z.is_empty() {
        return Err(SiphonViolation::Empty);
    }
    for (r, rx) in net.reactions().iter().enumerate() {
        let produced = net.support(rx.target);
        if !produced.intersects(z) {
            continue;
        }
        if !net.support(rx.source).intersects(z) {
            let species = produced.intersection(z).first().unwrap();
            return Err(SiphonViolation::Unprotected {
                reaction: r,
                species,
            });
        }
    }
    Ok(())
}

/// Per-species implication clauses derived from the network.
#[derive(Debug, Clone)]
pub struct SiphonConstraintTable {
    clauses: Vec<Vec<IndexSet>>,
}

impl SiphonConstraintTable {
    pub fn new(net: &ReactionNetwork) -> Self {
        let s = net.num_species();
        let mut clauses = vec![Vec::new(); s];
        for rx in net.reactions() {
            let src = net.support(rx.source);
            for z in net.support(rx.target).iter() {
                if !src.contains(z) {
                    clauses[z].push(src.clone());
                }
            }
        }
        // a clause implied by a smaller one is redundant
        let clauses = clauses.into_iter().map(inclusion_minimal).collect();
        SiphonConstraintTable { clauses }
    }

    pub fn clauses(&self, z: usize) -> &[IndexSet] {
        &self.clauses[z]
    }

    pub fn num_species(&self) -> usize {
        self.clauses.len()
    }

    fn is_satisfied(&self, z: &IndexSet) -> bool {
        !z.is_empty()
            && z
                .iter()
                .all(|x| self.clauses[x].iter().all(|c| c.intersects(z)))
    }

    /// The largest siphon inside `w` (the union of all siphons contained in
    /// it); empty when `w` contains none.
    pub fn largest_siphon_within(&self, w: &IndexSet) -> IndexSet {
        let mut cur = w.clone();
        loop {
            let bad: Vec<usize> = cur
                .iter()
                .filter(|&x| self.clauses[x].iter().any(|c| !c.intersects(&cur)))
                .collect();
            if bad.is_empty() {
                return cur;
            }
            for x in bad {
                cur.remove(x);
            }
        }
    }

    /// Whether the siphon `z` contains no smaller siphon.
    pub fn is_minimal(&self, z: &IndexSet) -> bool {
        z.iter()
            .all(|x| self.largest_siphon_within(&z.without(x)).is_empty())
    }

    /// Shrinks a siphon to a minimal siphon inside it.
    fn shrink(&self, z: &IndexSet) -> IndexSet {
        let mut cur = z.clone();
        'outer: loop {
            for x in cur.to_vec() {
                let inner = self.largest_siphon_within(&cur.without(x));
                if !inner.is_empty() {
                    cur = inner;
                    continue 'outer;
                }
            }
            return cur;
        }
    }
}

struct Budget {
    deadline: Option<Instant>,
    max_results: Option<usize>,
    ticks: u32,
}

impl Budget {
    fn new(cfg: &EnumConfig) -> Self {
        Budget {
            deadline: cfg.deadline(),
            max_results: cfg.max_results,
            ticks: 0,
        }
    }

    fn exhausted(&mut self, results: usize) -> bool {
        if self.max_results.is_some_and(|m| results > m) {
            return true;
        }
        self.ticks = self.ticks.wrapping_add(1);
        self.ticks.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() > d)
    }
}

struct Search<'a> {
    table: &'a SiphonConstraintTable,
    found: Vec<IndexSet>,
    minimal: HashSet<IndexSet>,
    budget: Budget,
    aborted: bool,
}

impl Search<'_> {
    fn run(&mut self, z: IndexSet, allowed: IndexSet) {
        if self.aborted {
            return;
        }
        if self.budget.exhausted(self.minimal.len()) {
            self.aborted = true;
            return;
        }
        if self.found.iter().any(|f| f.is_subset(&z)) {
            return;
        }
        // fail-first: the violated clause with the fewest admissible fixes
        let mut best: Option<IndexSet> = None;
        for x in z.iter() {
            for c in self.table.clauses(x) {
                if c.intersects(&z) {
                    continue;
                }
                let cands = c.intersection(&allowed);
                if cands.is_empty() {
                    return;
                }
                if best.as_ref().is_none_or(|b| cands.len() < b.len()) {
                    best = Some(cands);
                }
            }
        }
        match best {
            None => {
                debug_assert!(self.table.is_satisfied(&z));
                let min = self.table.shrink(&z);
                self.found.push(z);
                if !self.found.contains(&min) {
                    self.found.push(min.clone());
                }
                self.minimal.insert(min);
            }
            Some(cands) => {
                let mut allowed = allowed;
                for a in cands.iter() {
                    allowed.remove(a);
                    self.run(z.with(a), allowed.clone());
                    if self.aborted {
                        return;
                    }
                }
            }
        }
    }
}

/// Minimal siphons by branch-and-prune search, regardless of connectivity.
///
/// Seeds are processed independently: the search from seed `k` only adds
/// species with larger index, so each minimal siphon is produced under its
/// smallest member.
pub fn minimal_siphons_search(
    net: &ReactionNetwork,
    cfg: &EnumConfig,
) -> Result<Vec<IndexSet>, SiphonError> {
    let table = SiphonConstraintTable::new(net);
    let s = net.num_species();
    let per_seed: Vec<(Vec<IndexSet>, bool)> = (0..s)
        .into_par_iter()
        .map(|seed| {
            let mut search = Search {
                table: &table,
                found: Vec::new(),
                minimal: HashSet::new(),
                budget: Budget::new(cfg),
                aborted: false,
            };
            let allowed: IndexSet = (seed + 1..s).collect();
            search.run(IndexSet::singleton(seed), allowed);
            (search.minimal.into_iter().collect(), search.aborted)
        })
        .collect();
    let aborted = per_seed.iter().any(|(_, a)| *a);
    let mut all: Vec<IndexSet> = per_seed.into_iter().flat_map(|(v, _)| v).collect();
    all.sort();
    all.dedup();
    if aborted || cfg.max_results.is_some_and(|m| all.len() > m) {
        return Err(SiphonError::BudgetExceeded { partial: all });
    }
    Ok(all)
}

/// Minimal siphons in canonical order (size, then lexicographic).
///
/// Strongly connected networks go through the transversal fast path; all
/// others through the general search.
pub fn minimal_siphons(
    net: &ReactionNetwork,
    cfg: &EnumConfig,
) -> Result<Vec<Siphon>, SiphonError> {
    let sets = if net.connectivity().is_strongly_connected {
        minimal_siphons_fast(net, cfg)?
    } else {
        minimal_siphons_search(net, cfg)?
    };
    Ok(sets.into_iter().map(Siphon::new_unchecked).collect())
}

pub const BRUTE_FORCE_MAX_SPECIES: usize = 22;

/// Literal enumeration of all non-empty subsets. Test oracle.
pub fn brute_force_minimal_siphons(net: &ReactionNetwork) -> Result<Vec<IndexSet>, SiphonError> {
    let s = net.num_species();
    if s > BRUTE_FORCE_MAX_SPECIES {
        return Err(SiphonError::TooManySpecies {
            max: BRUTE_FORCE_MAX_SPECIES,
            found: s,
        });
    }
    let siphons: Vec<IndexSet> = (1u64..1 << s)
        .map(|mask| (0..s).filter(|&i| mask >> i & 1 == 1).collect::<IndexSet>())
        .filter(|z| is_siphon(net, z).is_ok())
        .collect();
    Ok(inclusion_minimal(siphons))
}

/// A set family on vertices `0..num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    pub num_vertices: usize,
    pub edges: Vec<IndexSet>,
}

impl Hypergraph {
    pub fn new(num_vertices: usize, edges: Vec<IndexSet>) -> Self {
        Hypergraph {
            num_vertices,
            edges,
        }
    }

    /// Complex supports of a network.
    pub fn of_complexes(net: &ReactionNetwork) -> Self {
        let edges = (0..net.complexes().len())
            .map(|k| net.support(k).clone())
            .collect();
        Hypergraph::new(net.num_species(), edges)
    }
}

/// Number of minimal transversals, overall and per size.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeHistogram {
    pub total: u64,
    pub by_size: BTreeMap<usize, u64>,
}

impl SizeHistogram {
    pub fn record(&mut self, size: usize) {
        self.total += 1;
        *self.by_size.entry(size).or_default() += 1;
    }

    pub fn of<'a>(sets: impl IntoIterator<Item = &'a IndexSet>) -> Self {
        let mut h = SizeHistogram::default();
        for s in sets {
            h.record(s.len());
        }
        h
    }
}

/// Berge dualization; the transversals of the final edge are streamed to
/// `emit` instead of being stored.
fn berge(
    h: &Hypergraph,
    cfg: &EnumConfig,
    mut emit: impl FnMut(IndexSet),
) -> Result<(), SiphonError> {
    let edges = inclusion_minimal_in_order(&h.edges);
    if edges.iter().any(IndexSet::is_empty) {
        return Ok(());
    }
    if edges.is_empty() {
        // the empty set is the only transversal of the empty family
        emit(IndexSet::new());
        return Ok(());
    }
    let m = edges.len();
    // incidence of each vertex over edge indices
    let mut inc = vec![IndexSet::with_capacity(m); h.num_vertices];
    for (k, e) in edges.iter().enumerate() {
        for v in e.iter() {
            inc[v].insert(k);
        }
    }
    let deadline = cfg.deadline();
    let mut family: Vec<IndexSet> = vec![IndexSet::new()];
    let mut processed = IndexSet::with_capacity(m);
    for (k, edge) in edges.iter().enumerate() {
        let last = k + 1 == m;
        let mut next = Vec::with_capacity(family.len() * 2);
        let mut out = |set: IndexSet, next: &mut Vec<IndexSet>| {
            if last {
                emit(set);
            } else {
                next.push(set);
            }
        };
        for (n, t) in family.into_iter().enumerate() {
            if n % 65536 == 0 && deadline.is_some_and(|d| Instant::now() > d) {
                return Err(SiphonError::BudgetExceeded {
                    partial: Vec::new(),
                });
            }
            if t.intersects(edge) {
                out(t, &mut next);
                continue;
            }
            // edges among the processed ones hit exactly once by t
            let mut seen1 = IndexSet::new();
            let mut seen2 = IndexSet::new();
            for u in t.iter() {
                seen2.union_with(&seen1.intersection(&inc[u]));
                seen1.union_with(&inc[u]);
            }
            let once = seen1.difference(&seen2).intersection(&processed);
            let private: Vec<IndexSet> = t.iter().map(|u| inc[u].intersection(&once)).collect();
            for v in edge.iter() {
                if private.iter().all(|p| !p.is_subset(&inc[v])) {
                    out(t.with(v), &mut next);
                }
            }
        }
        family = next;
        processed.insert(k);
    }
    Ok(())
}

/// Keeps inclusion-minimal edges, preserving input order; drops duplicates.
fn inclusion_minimal_in_order(edges: &[IndexSet]) -> Vec<IndexSet> {
    let mut out: Vec<IndexSet> = Vec::new();
    for (k, e) in edges.iter().enumerate() {
        let dominated = edges.iter().enumerate().any(|(j, f)| {
            j != k && f.is_subset(e) && (f != e || j < k)
        });
        if !dominated {
            out.push(e.clone());
        }
    }
    out
}

/// All minimal transversals (minimal hitting sets) in canonical order.
pub fn minimal_transversals(
    h: &Hypergraph,
    cfg: &EnumConfig,
) -> Result<Vec<IndexSet>, SiphonError> {
    let mut out = Vec::new();
    let mut over = false;
    berge(h, cfg, |t| {
        if cfg.max_results.is_some_and(|m| out.len() >= m) {
            over = true;
        } else {
            out.push(t);
        }
    })?;
    out.sort();
    if over {
        return Err(SiphonError::BudgetExceeded { partial: out });
    }
    Ok(out)
}

/// Counts minimal transversals by size without storing the final family.
pub fn count_minimal_transversals(
    h: &Hypergraph,
    cfg: &EnumConfig,
) -> Result<SizeHistogram, SiphonError> {
    let mut hist = SizeHistogram::default();
    berge(h, cfg, |t| hist.record(t.len()))?;
    Ok(hist)
}

/// Species absent from every complex are singleton siphons; for strongly
/// connected networks every other siphon hits every complex.
fn fast_path_parts(net: &ReactionNetwork) -> Result<(Hypergraph, Vec<IndexSet>), SiphonError> {
    if !net.connectivity().is_strongly_connected {
        return Err(SiphonError::NotStronglyConnected);
    }
    let unused = net.unused_species().iter().map(IndexSet::singleton).collect();
    Ok((Hypergraph::of_complexes(net), unused))
}

/// Minimal siphons of a strongly connected network as minimal transversals
/// of its complex supports.
pub fn minimal_siphons_fast(
    net: &ReactionNetwork,
    cfg: &EnumConfig,
) -> Result<Vec<IndexSet>, SiphonError> {
    let (h, mut singles) = fast_path_parts(net)?;
    let mut sets = minimal_transversals(&h, cfg).map_err(|e| match e {
        SiphonError::BudgetExceeded { mut partial } => {
            partial.extend(singles.iter().cloned());
            partial.sort();
            SiphonError::BudgetExceeded { partial }
        }
        other => other,
    })?;
    sets.retain(|t| !t.is_empty());
    sets.append(&mut singles);
    sets.sort();
    Ok(sets)
}

/// Size histogram of the minimal siphons. Uses the streaming transversal
/// count for strongly connected networks.
pub fn count_minimal_siphons(
    net: &ReactionNetwork,
    cfg: &EnumConfig,
) -> Result<SizeHistogram, SiphonError> {
    if net.connectivity().is_strongly_connected {
        let (h, singles) = fast_path_parts(net)?;
        let mut hist = SizeHistogram::default();
        berge(&h, cfg, |t| {
            if !t.is_empty() {
                hist.record(t.len())
            }
        })?;
        for s in &singles {
            hist.record(s.len());
        }
        Ok(hist)
    } else {
        Ok(SizeHistogram::of(&minimal_siphons_search(net, cfg)?))
    }
}
