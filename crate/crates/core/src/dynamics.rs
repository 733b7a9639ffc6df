//! Mass-action right-hand side, exact evaluation, and randomized checks that
//! siphon faces are forward-invariant (and made of steady states when the
//! network is strongly connected).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{format_rational, Rational, RationalVector};
use crate::network::ReactionNetwork;
use crate::set::IndexSet;
use crate::siphons::{is_siphon, SiphonViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("expected {expected} rate constants, got {found}")]
    RateCount { expected: usize, found: usize },
    #[error("rate constant of reaction {reaction} must be positive")]
    NonPositiveRate { reaction: usize },
    #[error("point has {found} coordinates, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("point has a negative coordinate at {index}")]
    NegativePoint { index: usize },
    #[error("not a siphon: {0}")]
    NotASiphon(#[from] SiphonViolation),
    #[error("steady faces need a strongly connected network")]
    NotStronglyConnected,
    #[error("siphon misses complex {complex}")]
    MissesComplex { complex: usize },
}

/// A network with a positive rate constant per reaction.
#[derive(Debug, Clone)]
pub struct MassActionSystem<'a> {
    pub net: &'a ReactionNetwork,
    pub kappa: Vec<Rational>,
}

impl<'a> MassActionSystem<'a> {
    pub fn new(net: &'a ReactionNetwork, kappa: Vec<Rational>) -> Result<Self, DynamicsError> {
        if kappa.len() != net.reactions().len() {
            return Err(DynamicsError::RateCount {
                expected: net.reactions().len(),
                found: kappa.len(),
            });
        }
        if let Some(reaction) = kappa.iter().position(|k| !k.is_positive()) {
            return Err(DynamicsError::NonPositiveRate { reaction });
        }
        Ok(MassActionSystem { net, kappa })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coefficient: Rational,
    pub exponents: Vec<u64>,
}

impl Term {
    pub fn involves(&self, z: &IndexSet) -> bool {
        z.iter().any(|i| self.exponents[i] > 0)
    }

    fn eval(&self, x: &[Rational]) -> Rational {
        let mut v = self.coefficient.clone();
        for (xi, &e) in x.iter().zip(&self.exponents) {
            if e > 0 {
                v *= num_traits::pow(xi.clone(), e as usize);
            }
        }
        v
    }
}

/// One polynomial per species; terms have nonzero coefficients and are
/// sorted by exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialVectorField {
    pub components: Vec<Vec<Term>>,
}

impl PolynomialVectorField {
    pub fn num_species(&self) -> usize {
        self.components.len()
    }

    /// `dX/dt = ...` lines using the network's species names.
    pub fn format(&self, net: &ReactionNetwork) -> String {
        let names = net.species().names();
        let mut out = String::new();
        for (i, terms) in self.components.iter().enumerate() {
            let _ = write!(out, "d{}/dt = ", names[i]);
            if terms.is_empty() {
                out.push('0');
            }
            for (k, t) in terms.iter().enumerate() {
                let neg = t.coefficient.is_negative();
                let sign = match (k, neg) {
                    (0, true) => "-",
                    (0, false) => "",
                    (_, true) => " - ",
                    (_, false) => " + ",
                };
                out.push_str(sign);
                let c = t.coefficient.abs();
                let mut factors = Vec::new();
                if !c.is_one() || t.exponents.iter().all(|&e| e == 0) {
                    factors.push(format_rational(&c));
                }
                for (j, &e) in t.exponents.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => factors.push(names[j].clone()),
                        _ => factors.push(format!("{}^{e}", names[j])),
                    }
                }
                out.push_str(&factors.join("*"));
            }
            out.push('\n');
        }
        out
    }
}

/// For each reaction `i -> j` adds `κ (y_j - y_i) c^{y_i}`.
pub fn build_rhs(sys: &MassActionSystem<'_>) -> PolynomialVectorField {
    let net = sys.net;
    let s = net.num_species();
    let mut acc: Vec<BTreeMap<Vec<u64>, Rational>> = vec![BTreeMap::new(); s];
    for (r, k) in net.reactions().iter().zip(&sys.kappa) {
        let src = &net.complexes()[r.source].exponents;
        let dst = &net.complexes()[r.target].exponents;
        for i in 0..s {
            let delta = dst[i] as i64 - src[i] as i64;
            if delta != 0 {
                *acc[i].entry(src.clone()).or_insert_with(Rational::zero) +=
                    k * Rational::from_integer(BigInt::from(delta));
            }
        }
    }
    let components = acc
        .into_iter()
        .map(|m| {
            m.into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(exponents, coefficient)| Term {
                    coefficient,
                    exponents,
                })
                .collect()
        })
        .collect();
    PolynomialVectorField { components }
}

pub fn eval_rhs(
    field: &PolynomialVectorField,
    point: &[Rational],
) -> Result<RationalVector, DynamicsError> {
    if point.len() != field.num_species() {
        return Err(DynamicsError::Dimension {
            expected: field.num_species(),
            found: point.len(),
        });
    }
    if let Some(index) = point.iter().position(|x| x.is_negative()) {
        return Err(DynamicsError::NegativePoint { index });
    }
    Ok(field
        .components
        .iter()
        .map(|terms| terms.iter().map(|t| t.eval(point)).sum())
        .collect())
}

/// Structural form of forward invariance: every positive term of `dz/dt`,
/// `z ∈ Z`, contains a variable of `Z`. Returns the first offending
/// `(species, term)` pair.
pub fn positive_terms_involve(field: &PolynomialVectorField, z: &IndexSet) -> Result<(), (usize, usize)> {
    for i in z.iter() {
        for (k, t) in field.components[i].iter().enumerate() {
            if t.coefficient.is_positive() && !t.involves(z) {
                return Err((i, k));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass { trials: usize },
    /// A sampled point where the checked coordinates did not vanish.
    Counterexample {
        kappa: Vec<Rational>,
        point: RationalVector,
        species: usize,
    },
    /// A positive monomial of `dz/dt` with no variable of `Z`.
    Structural { species: usize, term: Term },
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass { .. })
    }
}

/// Random positive rational with numerator and denominator in `1..=20`.
pub fn random_positive(rng: &mut impl Rng) -> Rational {
    Rational::new(
        BigInt::from(rng.gen_range(1..=20i64)),
        BigInt::from(rng.gen_range(1..=20i64)),
    )
}

/// Random non-negative rational; zero about one time in eight.
pub fn random_nonneg(rng: &mut impl Rng) -> Rational {
    if rng.gen_ratio(1, 8) {
        Rational::zero()
    } else {
        random_positive(rng)
    }
}

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn random_face_sample(net: &ReactionNetwork, z: &IndexSet, rng: &mut ChaCha8Rng) -> (Vec<Rational>, RationalVector) {
    let kappa = (0..net.reactions().len()).map(|_| random_positive(rng)).collect();
    let point = (0..net.num_species())
        .map(|i| if z.contains(i) { Rational::zero() } else { random_nonneg(rng) })
        .collect();
    (kappa, point)
}

/// Runs `trials` seeded samples; `coords` selects which coordinates of the
/// RHS must vanish.
fn sample_face(
    net: &ReactionNetwork,
    z: &IndexSet,
    coords: &IndexSet,
    trials: usize,
    seed: u64,
) -> CheckOutcome {
    let failure = (0..trials).into_par_iter().find_map_first(|t| {
        let mut rng = trial_rng(seed, t);
        let (kappa, point) = random_face_sample(net, z, &mut rng);
        let sys = MassActionSystem::new(net, kappa.clone()).expect("positive rates");
        let value = eval_rhs(&build_rhs(&sys), &point).expect("valid point");
        coords
            .iter()
            .find(|&i| !value[i].is_zero())
            .map(|species| CheckOutcome::Counterexample {
                kappa,
                point,
                species,
            })
    });
    failure.unwrap_or(CheckOutcome::Pass { trials })
}

/// Exact checks that `{x ≥ 0 : x_Z = 0}` is forward-invariant: the `Z`
/// coordinates of the RHS vanish at random face points, and every positive
/// monomial of `dz/dt` contains a `Z` variable.
pub fn check_face_invariance(
    net: &ReactionNetwork,
    z: &IndexSet,
    trials: usize,
    seed: u64,
) -> Result<CheckOutcome, DynamicsError> {
    is_siphon(net, z)?;
    let ones = MassActionSystem::new(net, vec![Rational::one(); net.reactions().len()])?;
    if let Err((species, k)) = positive_terms_involve(&build_rhs(&ones), z) {
        let term = build_rhs(&ones).components[species][k].clone();
        return Ok(CheckOutcome::Structural { species, term });
    }
    Ok(sample_face(net, z, z, trials, seed))
}

/// For a strongly connected network, checks that the whole RHS vanishes at
/// random points of the siphon face.
pub fn check_steady_face(
    net: &ReactionNetwork,
    z: &IndexSet,
    trials: usize,
    seed: u64,
) -> Result<CheckOutcome, DynamicsError> {
    if !net.connectivity().is_strongly_connected {
        return Err(DynamicsError::NotStronglyConnected);
    }
    is_siphon(net, z)?;
    if let Some(complex) = (0..net.complexes().len()).find(|&k| !net.support(k).intersects(z)) {
        return Err(DynamicsError::MissesComplex { complex });
    }
    Ok(sample_face(net, z, &IndexSet::full(net.num_species()), trials, seed))
}
