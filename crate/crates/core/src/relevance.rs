//! Relevance of siphons: whether the face a siphon cuts out of some (or a
//! given) invariant polyhedron is non-empty.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{
    conservation_basis, primitive_integer, stoichiometric_basis, Rational, RationalVector,
    SubspaceBasis,
};
use crate::geometry::{
    build_cone, face_dimension, face_feasibility, ConeQ, Facet, GeometryError, InvariantPolytope,
};
use crate::lp::{feasible, Feasibility, LinearSystem};
use crate::network::{ConnectivityInfo, ReactionNetwork};
use crate::set::IndexSet;
use crate::siphons::{is_siphon, minimal_siphons, EnumConfig, Siphon, SiphonError, SiphonViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelevanceError {
    #[error("not a siphon: {0}")]
    NotASiphon(#[from] SiphonViolation),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("no sample points given")]
    EmptySamples,
    #[error("relevance routes disagree on {0:?}")]
    RouteDisagreement(IndexSet),
    #[error("permutation {index} is not a symmetry of the network")]
    NotASymmetry { index: usize },
    #[error(transparent)]
    Enumeration(#[from] SiphonError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Non-negative conservation law supported inside the siphon.
    StarLp,
    /// Facet of `Q` whose complement lies inside the siphon.
    Facet,
    /// Non-emptiness of the face of a given invariant polyhedron.
    FaceLp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Primitive integer non-negative conservation law with support in `Z`.
    ConservationLaw(Vec<BigInt>),
    /// Farkas certificate for the conservation-law LP.
    NoConservationLaw(RationalVector),
    /// A facet whose complement is contained in `Z`.
    Facet(Facet),
    /// No facet complement fits inside `Z`.
    NoFacet,
    /// A point of the face `F_Z`, with the index of the sample it came from.
    FacePoint { sample: usize, point: RationalVector },
    /// One Farkas certificate per sample, each proving the face empty.
    EmptyFaces(Vec<RationalVector>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceVerdict {
    pub siphon: IndexSet,
    pub relevant: bool,
    pub route: Route,
    pub witness: Witness,
    pub cross_checked: bool,
}

/// Shared data for repeated relevance queries on one network.
#[derive(Debug, Clone)]
pub struct RelevanceContext<'a> {
    pub net: &'a ReactionNetwork,
    pub stoichiometric: SubspaceBasis,
    pub cone: ConeQ,
}

impl<'a> RelevanceContext<'a> {
    pub fn new(net: &'a ReactionNetwork) -> Self {
        RelevanceContext {
            net,
            stoichiometric: stoichiometric_basis(net),
            cone: build_cone(conservation_basis(net)),
        }
    }

    pub fn num_species(&self) -> usize {
        self.net.num_species()
    }

    /// `{ l ⊥ L_stoi, l_i = 0 off Z, l_Z ≥ 0, Σ_Z l = 1 }`.
    pub fn star_system(&self, z: &IndexSet) -> LinearSystem {
        let s = self.num_species();
        let outside = z.complement(s);
        let mut norm = vec![Rational::zero(); s];
        for i in z.iter() {
            norm[i] = Rational::one();
        }
        let mut sys = LinearSystem::new(s)
            .nonneg(z.iter())
            .zero(outside.iter())
            .normalize(norm);
        for row in self.stoichiometric.matrix().row_vectors() {
            sys = sys.equation(row, Rational::zero());
        }
        sys
    }

    pub fn star(&self, z: &IndexSet) -> Result<RelevanceVerdict, RelevanceError> {
        is_siphon(self.net, z)?;
        let verdict = match feasible(&self.star_system(z)) {
            Feasibility::Feasible { witness } => RelevanceVerdict {
                siphon: z.clone(),
                relevant: false,
                route: Route::StarLp,
                witness: Witness::ConservationLaw(primitive_integer(&witness)),
                cross_checked: false,
            },
            Feasibility::Infeasible { certificate } => RelevanceVerdict {
                siphon: z.clone(),
                relevant: true,
                route: Route::StarLp,
                witness: Witness::NoConservationLaw(certificate),
                cross_checked: false,
            },
        };
        Ok(verdict)
    }

    pub fn facet(&self, z: &IndexSet) -> Result<RelevanceVerdict, RelevanceError> {
        is_siphon(self.net, z)?;
        let s = self.num_species();
        let facets = self.cone.facets()?;
        let found = facets.iter().find(|f| f.complement(s).is_subset(z));
        Ok(RelevanceVerdict {
            siphon: z.clone(),
            relevant: found.is_none(),
            route: Route::Facet,
            witness: found.map_or(Witness::NoFacet, |f| Witness::Facet(f.clone())),
            cross_checked: false,
        })
    }

    /// Star route, cross-checked by the facet route when `Q` is pointed.
    pub fn checked(&self, z: &IndexSet) -> Result<RelevanceVerdict, RelevanceError> {
        let mut v = self.star(z)?;
        if self.cone.pointed {
            if self.facet(z)?.relevant != v.relevant {
                return Err(RelevanceError::RouteDisagreement(z.clone()));
            }
            v.cross_checked = true;
        }
        Ok(v)
    }

    pub fn c0(&self, p: &InvariantPolytope, z: &IndexSet) -> Result<RelevanceVerdict, RelevanceError> {
        self.omega(std::slice::from_ref(p), z)
    }

    pub fn omega(
        &self,
        samples: &[InvariantPolytope],
        z: &IndexSet,
    ) -> Result<RelevanceVerdict, RelevanceError> {
        is_siphon(self.net, z)?;
        if samples.is_empty() {
            return Err(RelevanceError::EmptySamples);
        }
        let mut certificates = Vec::with_capacity(samples.len());
        for (k, p) in samples.iter().enumerate() {
            match face_feasibility(p, z) {
                Feasibility::Feasible { witness } => {
                    return Ok(RelevanceVerdict {
                        siphon: z.clone(),
                        relevant: true,
                        route: Route::FaceLp,
                        witness: Witness::FacePoint {
                            sample: k,
                            point: witness,
                        },
                        cross_checked: false,
                    })
                }
                Feasibility::Infeasible { certificate } => certificates.push(certificate),
            }
        }
        Ok(RelevanceVerdict {
            siphon: z.clone(),
            relevant: false,
            route: Route::FaceLp,
            witness: Witness::EmptyFaces(certificates),
            cross_checked: false,
        })
    }

    /// Exact re-verification of a verdict's witness. Face-route verdicts need
    /// the samples they were computed from.
    pub fn verify(&self, v: &RelevanceVerdict, samples: &[InvariantPolytope]) -> bool {
        let z = &v.siphon;
        let s = self.num_species();
        match (&v.witness, v.relevant) {
            (Witness::ConservationLaw(l), false) => {
                let lr: RationalVector =
                    l.iter().map(|x| Rational::from_integer(x.clone())).collect();
                l.len() == s
                    && l.iter().all(|x| !x.is_negative())
                    && l.iter().any(|x| x.is_positive())
                    && (0..s).all(|i| z.contains(i) || l[i].is_zero())
                    && self.cone.basis.contains(&lr).unwrap_or(false)
            }
            (Witness::NoConservationLaw(y), true) => self.star_system(z).refuted_by(y),
            (Witness::Facet(f), false) => {
                f.complement(s).is_subset(z) && f.verify(self.cone.basis.matrix())
            }
            (Witness::NoFacet, true) => self
                .cone
                .facets()
                .is_ok_and(|fs| fs.iter().all(|f| !f.complement(s).is_subset(z))),
            (Witness::FacePoint { sample, point }, true) => samples
                .get(*sample)
                .is_some_and(|p| p.face_system(z).satisfied_by(point)),
            (Witness::EmptyFaces(certs), false) => {
                certs.len() == samples.len()
                    && samples
                        .iter()
                        .zip(certs)
                        .all(|(p, y)| p.face_system(z).refuted_by(y))
            }
            _ => false,
        }
    }
}

/// Global relevance through the conservation-law LP.
pub fn is_relevant_star(net: &ReactionNetwork, z: &IndexSet) -> Result<RelevanceVerdict, RelevanceError> {
    RelevanceContext::new(net).star(z)
}

/// Global relevance through the facets of `Q`.
pub fn is_relevant_facet(
    net: &ReactionNetwork,
    z: &IndexSet,
) -> Result<RelevanceVerdict, RelevanceError> {
    RelevanceContext::new(net).facet(z)
}

pub fn is_c0_relevant(
    net: &ReactionNetwork,
    c0: RationalVector,
    z: &IndexSet,
) -> Result<RelevanceVerdict, RelevanceError> {
    let p = InvariantPolytope::for_network(net, c0)?;
    RelevanceContext::new(net).c0(&p, z)
}

pub fn omega_relevant(
    net: &ReactionNetwork,
    samples: &[RationalVector],
    z: &IndexSet,
) -> Result<RelevanceVerdict, RelevanceError> {
    let polys = polytopes(net, samples)?;
    RelevanceContext::new(net).omega(&polys, z)
}

fn polytopes(
    net: &ReactionNetwork,
    samples: &[RationalVector],
) -> Result<Vec<InvariantPolytope>, RelevanceError> {
    let basis = conservation_basis(net);
    samples
        .iter()
        .map(|c| InvariantPolytope::new(&basis, c.clone()).map_err(Into::into))
        .collect()
}

pub fn relevant_minimal_siphons(
    net: &ReactionNetwork,
    cfg: &EnumConfig,
) -> Result<Vec<Siphon>, RelevanceError> {
    let ctx = RelevanceContext::new(net);
    let all = minimal_siphons(net, cfg)?;
    let flags: Vec<bool> = all
        .par_iter()
        .map(|z| ctx.star(z.members()).map(|v| v.relevant))
        .collect::<Result<_, _>>()?;
    Ok(all
        .into_iter()
        .zip(flags)
        .filter_map(|(z, r)| r.then_some(z))
        .collect())
}

/// `true` when `perm` (image of each species) maps the reaction graph onto
/// itself.
pub fn is_symmetry(net: &ReactionNetwork, perm: &[usize]) -> bool {
    let s = net.num_species();
    if perm.len() != s || perm.iter().copied().collect::<IndexSet>().len() != s || perm.iter().any(|&i| i >= s) {
        return false;
    }
    let index: HashMap<Vec<u64>, usize> = net
        .complexes()
        .iter()
        .enumerate()
        .map(|(k, c)| (c.exponents.clone(), k))
        .collect();
    let image: Option<Vec<usize>> = net
        .complexes()
        .iter()
        .map(|c| {
            let mut e = vec![0; s];
            for (i, &x) in c.exponents.iter().enumerate() {
                e[perm[i]] = x;
            }
            index.get(&e).copied()
        })
        .collect();
    let Some(image) = image else {
        return false;
    };
    let edges: std::collections::HashSet<(usize, usize)> =
        net.reactions().iter().map(|r| (r.source, r.target)).collect();
    net.reactions()
        .iter()
        .all(|r| edges.contains(&(image[r.source], image[r.target])))
}

/// Partition of `sets` into orbits of the group generated by `perms`.
/// Orbits are lists of indices into `sets`, each sorted, ordered by first
/// member.
pub fn orbit_partition(sets: &[IndexSet], perms: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let position: HashMap<&IndexSet, usize> = sets.iter().enumerate().map(|(k, z)| (z, k)).collect();
    let mut orbit_of = vec![usize::MAX; sets.len()];
    let mut orbits = Vec::new();
    for start in 0..sets.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        orbit_of[start] = id;
        let mut members = vec![start];
        let mut frontier = vec![start];
        while let Some(k) = frontier.pop() {
            for p in perms {
                let img: IndexSet = sets[k].iter().map(|i| p[i]).collect();
                if let Some(&j) = position.get(&img) {
                    if orbit_of[j] == usize::MAX {
                        orbit_of[j] = id;
                        members.push(j);
                        frontier.push(j);
                    }
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    orbits
}

/// Inputs for [`analyze`] beyond the network.
#[derive(Debug, Clone, Default)]
pub struct AnalysisOptions {
    pub c0: Option<RationalVector>,
    pub omega: Vec<RationalVector>,
    pub symmetries: Vec<Vec<usize>>,
    pub enumeration: EnumConfig,
}

#[derive(Debug, Clone)]
pub struct SiphonAnalysis {
    pub siphon: IndexSet,
    pub verdict: RelevanceVerdict,
    pub facet_verdict: Option<RelevanceVerdict>,
    pub c0_verdict: Option<RelevanceVerdict>,
    pub face_dim: Option<usize>,
    pub omega_verdict: Option<RelevanceVerdict>,
}

#[derive(Debug, Clone, Default)]
pub struct Timing {
    pub siphons: Duration,
    pub relevance: Duration,
    pub total: Duration,
}

pub const NO_BOUNDARY_STEADY_STATES: &str = "no invariant polyhedron has a boundary steady state: \
every minimal siphon carries a non-negative conservation law supported inside it";

pub const STEADY_FACES: &str = "the network is strongly connected: every face cut out by a \
siphon meeting all complexes consists entirely of steady states";

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub network: ReactionNetwork,
    pub connectivity: ConnectivityInfo,
    pub conservation_basis: SubspaceBasis,
    pub cone_pointed: bool,
    pub facets: Option<Vec<Facet>>,
    pub siphons: Vec<SiphonAnalysis>,
    /// `false` when the enumeration budget ran out and `siphons` is partial.
    pub complete: bool,
    pub all_non_relevant: bool,
    pub boundary_steady_state_certificate: Option<String>,
    pub steady_face_note: Option<String>,
    pub orbits: Option<Vec<Vec<usize>>>,
    pub c0: Option<RationalVector>,
    pub timing: Timing,
}

impl AnalysisReport {
    pub fn relevant(&self) -> impl Iterator<Item = &SiphonAnalysis> {
        self.siphons.iter().filter(|a| a.verdict.relevant)
    }

    pub fn c0_relevant(&self) -> impl Iterator<Item = &SiphonAnalysis> {
        self.siphons
            .iter()
            .filter(|a| a.c0_verdict.as_ref().is_some_and(|v| v.relevant))
    }
}

/// Minimal siphons with cross-checked relevance verdicts and, when asked,
/// `c0`-relevance, face dimensions, sample relevance and symmetry orbits.
pub fn analyze(net: &ReactionNetwork, opts: &AnalysisOptions) -> Result<AnalysisReport, RelevanceError> {
    let start = Instant::now();
    for (index, p) in opts.symmetries.iter().enumerate() {
        if !is_symmetry(net, p) {
            return Err(RelevanceError::NotASymmetry { index });
        }
    }
    let ctx = RelevanceContext::new(net);
    let basis = ctx.cone.basis.clone();
    let c0_poly = opts
        .c0
        .as_ref()
        .map(|c| InvariantPolytope::new(&basis, c.clone()))
        .transpose()?;
    let omega = polytopes(net, &opts.omega)?;

    let (sets, complete) = match minimal_siphons(net, &opts.enumeration) {
        Ok(v) => (v.into_iter().map(|z| z.members().clone()).collect::<Vec<_>>(), true),
        Err(SiphonError::BudgetExceeded { partial }) => (partial, false),
        Err(e) => return Err(e.into()),
    };
    let siphon_time = start.elapsed();

    let rel_start = Instant::now();
    let siphons: Vec<SiphonAnalysis> = sets
        .par_iter()
        .map(|z| {
            let verdict = ctx.checked(z)?;
            let facet_verdict = if ctx.cone.pointed { Some(ctx.facet(z)?) } else { None };
            let (c0_verdict, face_dim) = match &c0_poly {
                Some(p) => (Some(ctx.c0(p, z)?), face_dimension(p, z)),
                None => (None, None),
            };
            let omega_verdict = if omega.is_empty() {
                None
            } else {
                Some(ctx.omega(&omega, z)?)
            };
            if c0_verdict.as_ref().is_some_and(|v| v.relevant)
                || omega_verdict.as_ref().is_some_and(|v| v.relevant)
            {
                // a non-empty face anywhere implies global relevance
                if !verdict.relevant {
                    return Err(RelevanceError::RouteDisagreement(z.clone()));
                }
            }
            Ok(SiphonAnalysis {
                siphon: z.clone(),
                verdict,
                facet_verdict,
                c0_verdict,
                face_dim,
                omega_verdict,
            })
        })
        .collect::<Result<_, RelevanceError>>()?;
    let relevance_time = rel_start.elapsed();

    let all_non_relevant = siphons.iter().all(|a| !a.verdict.relevant);
    let orbits = (!opts.symmetries.is_empty())
        .then(|| orbit_partition(&sets, &opts.symmetries));
    let connectivity = net.connectivity();
    Ok(AnalysisReport {
        network: net.clone(),
        steady_face_note: connectivity
            .is_strongly_connected
            .then(|| STEADY_FACES.to_string()),
        connectivity,
        conservation_basis: basis,
        cone_pointed: ctx.cone.pointed,
        facets: ctx.cone.facets.clone(),
        complete,
        boundary_steady_state_certificate: (complete && all_non_relevant)
            .then(|| NO_BOUNDARY_STEADY_STATES.to_string()),
        all_non_relevant,
        siphons,
        orbits,
        c0: opts.c0.clone(),
        timing: Timing {
            siphons: siphon_time,
            relevance: relevance_time,
            total: start.elapsed(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use crate::network::parse_network;

    const RECEPTOR_LIGAND: &str =
        "species A, B, C, D, E\n2A + C <-> A + D\nA + D <-> E\nE <-> B + C\nB + C <-> 2A + C";

    fn set(v: &[usize]) -> IndexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn star_route_on_receptor_ligand() {
        let net = parse_network(RECEPTOR_LIGAND).unwrap();
        let ctx = RelevanceContext::new(&net);
        let v = ctx.checked(&set(&[2, 3, 4])).unwrap();
        assert!(!v.relevant && v.cross_checked);
        let expected: Vec<BigInt> = [0, 0, 1, 1, 1].into_iter().map(BigInt::from).collect();
        assert_eq!(v.witness, Witness::ConservationLaw(expected));
        assert!(ctx.verify(&v, &[]));
        let v = ctx.checked(&set(&[0, 1, 4])).unwrap();
        assert!(v.relevant);
        assert!(ctx.verify(&v, &[]));
        assert!(matches!(
            ctx.star(&set(&[4])),
            Err(RelevanceError::NotASiphon(_))
        ));
    }

    #[test]
    fn c0_relevance_in_first_chamber() {
        let net = parse_network(RECEPTOR_LIGAND).unwrap();
        let c0 = vec![ratio(1, 10), ratio(1, 10), int(1), ratio(1, 10), ratio(1, 10)];
        assert!(is_c0_relevant(&net, c0.clone(), &set(&[0, 1, 4])).unwrap().relevant);
        let v = is_c0_relevant(&net, c0.clone(), &set(&[0, 2, 4])).unwrap();
        assert!(!v.relevant);
        let p = InvariantPolytope::for_network(&net, c0).unwrap();
        assert!(RelevanceContext::new(&net).verify(&v, &[p]));
        assert_eq!(
            omega_relevant(&net, &[], &set(&[0, 1, 4])),
            Err(RelevanceError::EmptySamples)
        );
    }

    #[test]
    fn orbits_of_a_swap() {
        let sets = vec![set(&[0]), set(&[1]), set(&[2])];
        let orbits = orbit_partition(&sets, &[vec![1, 0, 2]]);
        assert_eq!(orbits, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn symmetry_check() {
        let net = parse_network("X <-> Y").unwrap();
        assert!(is_symmetry(&net, &[1, 0]));
        let net = parse_network("X -> Y").unwrap();
        assert!(!is_symmetry(&net, &[1, 0]));
        assert!(is_symmetry(&net, &[0, 1]));
    }

    #[test]
    fn analysis_of_receptor_ligand() {
        let net = parse_network(RECEPTOR_LIGAND).unwrap();
        let opts = AnalysisOptions {
            c0: Some(vec![int(1); 5]),
            ..Default::default()
        };
        let r = analyze(&net, &opts).unwrap();
        assert_eq!(r.siphons.len(), 3);
        assert_eq!(r.relevant().count(), 2);
        let c0: Vec<&IndexSet> = r.c0_relevant().map(|a| &a.siphon).collect();
        assert_eq!(c0, vec![&set(&[0, 2, 4])]);
        assert!(!r.all_non_relevant);
        assert!(r.boundary_steady_state_certificate.is_none());
        assert!(r.steady_face_note.is_some());
    }
}
