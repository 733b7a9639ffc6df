//! Polyhedral geometry of a network: the cone `Q` spanned by the columns of
//! a conservation basis, its facets, and the invariant polyhedra
//! `P(c0) = (c0 + L_stoi) ∩ R≥0` with their faces and vertex supports.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{
    conservation_basis, null_space, primitive_integer, Rational, RationalMatrix, RationalVector,
    SubspaceBasis,
};
use crate::lp::{affine_dim, feasible, Feasibility, LinearSystem};
use crate::network::ReactionNetwork;
use crate::set::IndexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("the cone Q is not pointed; use the conservation-law LP for relevance")]
    NotPointed,
    #[error("initial condition must be strictly positive")]
    NonPositive,
    #[error("initial condition has {found} entries, expected {expected}")]
    Dimension { expected: usize, found: usize },
}

/// A facet of `Q`: the generator columns lying on it and an integer normal
/// that vanishes exactly on them and is positive on every other column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Facet {
    pub generators: IndexSet,
    pub normal: Vec<BigInt>,
}

impl Facet {
    /// The species not on the facet.
    pub fn complement(&self, s: usize) -> IndexSet {
        self.generators.complement(s)
    }

    /// The conservation law `normalᵀ A`, non-negative with support equal to
    /// the facet complement.
    pub fn conservation_law(&self, basis: &SubspaceBasis) -> Vec<BigInt> {
        let v: RationalVector = self
            .normal
            .iter()
            .map(|x| Rational::from_integer(x.clone()))
            .collect();
        basis
            .matrix()
            .left_mul_vec(&v)
            .expect("normal has cone dimension")
            .into_iter()
            .map(|x| x.to_integer())
            .collect()
    }

    /// Exact check of the normal against the columns of `a`.
    pub fn verify(&self, a: &RationalMatrix) -> bool {
        let v: RationalVector = self
            .normal
            .iter()
            .map(|x| Rational::from_integer(x.clone()))
            .collect();
        (0..a.cols()).all(|i| {
            let p = crate::arith::dot(&v, &a.column(i));
            if self.generators.contains(i) {
                p.is_zero()
            } else {
                p.is_positive()
            }
        })
    }
}

/// The cone `Q`, identified with the cone spanned by the columns of a
/// conservation basis matrix.
#[derive(Debug, Clone)]
pub struct ConeQ {
    pub basis: SubspaceBasis,
    pub dim: usize,
    pub pointed: bool,
    pub facets: Option<Vec<Facet>>,
}

impl ConeQ {
    pub fn num_species(&self) -> usize {
        self.basis.ambient_dim()
    }

    /// `true` when there are no conservation relations at all.
    pub fn is_trivial(&self) -> bool {
        self.dim == 0
    }

    pub fn facets(&self) -> Result<&[Facet], GeometryError> {
        self.facets.as_deref().ok_or(GeometryError::NotPointed)
    }
}

/// Builds `Q` from a basis of `L_cons` and enumerates its facets when it
/// is pointed.
pub fn build_cone(basis: SubspaceBasis) -> ConeQ {
    let dim = basis.dim();
    let pointed = is_pointed(basis.matrix());
    let mut cone = ConeQ {
        basis,
        dim,
        pointed,
        facets: None,
    };
    if pointed {
        cone.facets = Some(cone_facets(&cone).expect("cone is pointed"));
    }
    cone
}

pub fn network_cone(net: &ReactionNetwork) -> ConeQ {
    build_cone(conservation_basis(net))
}

/// `Q` is pointed iff some `v` is strictly positive on every nonzero column.
fn is_pointed(a: &RationalMatrix) -> bool {
    let d = a.rows();
    if d == 0 {
        return true;
    }
    let nonzero: Vec<usize> = (0..a.cols())
        .filter(|&i| a.column(i).iter().any(|x| !x.is_zero()))
        .collect();
    // variables: v (free, d) then one slack per nonzero column
    let n = d + nonzero.len();
    let mut sys = LinearSystem::new(n).nonneg(d..n);
    for (k, &i) in nonzero.iter().enumerate() {
        let mut row = vec![Rational::zero(); n];
        for (r, x) in a.column(i).into_iter().enumerate() {
            row[r] = x;
        }
        row[d + k] = -Rational::one();
        sys = sys.equation(row, Rational::one());
    }
    feasible(&sys).is_feasible()
}

fn to_i128(v: &[BigInt]) -> Option<Vec<i128>> {
    v.iter().map(|x| i128::try_from(x).ok()).collect()
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Distinct ray directions among the nonzero columns, as primitive integer
/// vectors, each with one representative column.
fn distinct_rays(a: &RationalMatrix) -> Vec<Vec<BigInt>> {
    let mut seen = HashSet::new();
    let mut rays = Vec::new();
    for i in 0..a.cols() {
        let col = a.column(i);
        if col.iter().all(Zero::is_zero) {
            continue;
        }
        let mut p = primitive_integer(&col);
        // primitive_integer fixes the sign of the first entry; undo that so
        // the direction is kept
        let first = col.iter().find(|x| !x.is_zero()).unwrap();
        if first.is_negative() {
            p.iter_mut().for_each(|x| *x = -x.clone());
        }
        if seen.insert(p.clone()) {
            rays.push(p);
        }
    }
    rays
}

/// Facet normals by depth-first choice of `d-1` independent rays, keeping the
/// orthogonal complement of the chosen rays in fraction-free integer form.
/// Returns `None` on `i128` overflow.
fn facet_normals_i128(rays: &[Vec<i128>], d: usize) -> Option<HashSet<Vec<i128>>> {
    fn reduce(v: &mut [i128]) {
        let g = v.iter().fold(0, |acc, &x| gcd_i128(acc, x));
        if g > 1 {
            v.iter_mut().for_each(|x| *x /= g);
        }
    }

    fn dot(a: &[i128], b: &[i128]) -> Option<i128> {
        a.iter()
            .zip(b)
            .try_fold(0i128, |acc, (x, y)| acc.checked_add(x.checked_mul(*y)?))
    }

    fn dfs(
        rays: &[Vec<i128>],
        start: usize,
        complement: Vec<Vec<i128>>,
        out: &mut HashSet<Vec<i128>>,
    ) -> Option<()> {
        if complement.len() == 1 {
            let mut v = complement.into_iter().next().unwrap();
            let mut sign = 0i128;
            for r in rays {
                let p = dot(&v, r)?.signum();
                if p != 0 {
                    if sign == 0 {
                        sign = p;
                    } else if p != sign {
                        return Some(());
                    }
                }
            }
            if sign < 0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            reduce(&mut v);
            out.insert(v);
            return Some(());
        }
        for j in start..rays.len() {
            let r = &rays[j];
            let prods: Vec<i128> = complement.iter().map(|w| dot(w, r)).collect::<Option<_>>()?;
            let Some(p) = prods.iter().position(|&x| x != 0) else {
                continue; // dependent on the chosen rays
            };
            let pivot = &complement[p];
            let mut next = Vec::with_capacity(complement.len() - 1);
            for (k, w) in complement.iter().enumerate() {
                if k == p {
                    continue;
                }
                let mut nw: Vec<i128> = w
                    .iter()
                    .zip(pivot)
                    .map(|(x, y)| {
                        prods[p]
                            .checked_mul(*x)?
                            .checked_sub(prods[k].checked_mul(*y)?)
                    })
                    .collect::<Option<_>>()?;
                reduce(&mut nw);
                next.push(nw);
            }
            dfs(rays, j + 1, next, out)?;
        }
        Some(())
    }

    let identity: Vec<Vec<i128>> = (0..d)
        .map(|i| (0..d).map(|j| i128::from(i == j)).collect())
        .collect();
    // parallel over the first chosen ray
    let parts: Vec<Option<HashSet<Vec<i128>>>> = (0..rays.len())
        .into_par_iter()
        .map(|first| {
            let mut out = HashSet::new();
            let r = &rays[first];
            let prods: Vec<i128> = identity.iter().map(|w| dot(w, r)).collect::<Option<_>>()?;
            let p = prods.iter().position(|&x| x != 0)?;
            let next: Vec<Vec<i128>> = identity
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != p)
                .map(|(k, w)| {
                    w.iter()
                        .zip(&identity[p])
                        .map(|(x, y)| prods[p] * x - prods[k] * y)
                        .collect()
                })
                .collect();
            dfs(rays, first + 1, next, &mut out)?;
            Some(out)
        })
        .collect();
    let mut all = HashSet::new();
    for part in parts {
        all.extend(part?);
    }
    Some(all)
}

/// Reference route: every `(d-1)`-subset of rays, normal from an exact null
/// space computation.
pub(crate) fn facet_normals_exact(rays: &[Vec<BigInt>], d: usize) -> HashSet<Vec<BigInt>> {
    let mut out = HashSet::new();
    let mut subset = Vec::new();
    fn rec(
        rays: &[Vec<BigInt>],
        d: usize,
        start: usize,
        subset: &mut Vec<usize>,
        out: &mut HashSet<Vec<BigInt>>,
    ) {
        if subset.len() == d - 1 {
            let m = RationalMatrix::from_bigint_rows(
                d,
                &subset.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>(),
            );
            let ns = null_space(&m);
            if ns.rows() != 1 {
                return;
            }
            let mut v = primitive_integer(ns.row(0));
            let signs: BTreeSet<i8> = rays
                .iter()
                .map(|r| {
                    let p: BigInt = v.iter().zip(r).map(|(a, b)| a * b).sum();
                    if p.is_positive() {
                        1
                    } else if p.is_negative() {
                        -1
                    } else {
                        0
                    }
                })
                .filter(|&x| x != 0)
                .collect();
            match signs.len() {
                0 => {}
                1 => {
                    if signs.contains(&-1) {
                        v.iter_mut().for_each(|x| *x = -x.clone());
                    }
                    out.insert(v);
                }
                _ => {}
            }
            return;
        }
        for j in start..rays.len() {
            subset.push(j);
            rec(rays, d, j + 1, subset, out);
            subset.pop();
        }
    }
    rec(rays, d, 0, &mut subset, &mut out);
    out
}

fn facet_from_normal(a: &RationalMatrix, normal: Vec<BigInt>) -> Facet {
    let v: RationalVector = normal
        .iter()
        .map(|x| Rational::from_integer(x.clone()))
        .collect();
    let generators = (0..a.cols())
        .filter(|&i| crate::arith::dot(&v, &a.column(i)).is_zero())
        .collect();
    Facet { generators, normal }
}

/// The facets of a pointed cone, sorted canonically by generator set.
pub fn cone_facets(q: &ConeQ) -> Result<Vec<Facet>, GeometryError> {
    if !q.pointed {
        return Err(GeometryError::NotPointed);
    }
    let a = q.basis.matrix();
    let d = q.dim;
    if d == 0 {
        return Ok(Vec::new());
    }
    let rays = distinct_rays(a);
    let normals: Vec<Vec<BigInt>> = if d == 1 {
        // a pointed ray: the single facet is the origin
        let positive = rays.first().is_some_and(|r| r[0].is_positive());
        vec![vec![if positive { BigInt::one() } else { -BigInt::one() }]]
    } else {
        let small: Option<Vec<Vec<i128>>> = rays.iter().map(|r| to_i128(r)).collect();
        match small.and_then(|r| facet_normals_i128(&r, d)) {
            Some(set) => set
                .into_iter()
                .map(|v| v.into_iter().map(BigInt::from).collect())
                .collect(),
            None => facet_normals_exact(&rays, d).into_iter().collect(),
        }
    };
    let mut by_generators: HashMap<IndexSet, Facet> = HashMap::new();
    for n in normals {
        let f = facet_from_normal(a, n);
        by_generators.entry(f.generators.clone()).or_insert(f);
    }
    let mut facets: Vec<Facet> = by_generators.into_values().collect();
    facets.sort_by(|x, y| x.generators.cmp(&y.generators));
    debug_assert!(facets.iter().all(|f| f.verify(a)));
    Ok(facets)
}

/// `P(c0) = { x ≥ 0 : A x = A c0 }`.
#[derive(Debug, Clone)]
pub struct InvariantPolytope {
    pub a: RationalMatrix,
    pub b: RationalVector,
    pub c0: RationalVector,
}

impl InvariantPolytope {
    pub fn new(basis: &SubspaceBasis, c0: RationalVector) -> Result<Self, GeometryError> {
        let a = basis.matrix().clone();
        if c0.len() != a.cols() {
            return Err(GeometryError::Dimension {
                expected: a.cols(),
                found: c0.len(),
            });
        }
        if !c0.iter().all(Signed::is_positive) {
            return Err(GeometryError::NonPositive);
        }
        let b = a.mul_vec(&c0).expect("checked width");
        Ok(InvariantPolytope { a, b, c0 })
    }

    pub fn for_network(net: &ReactionNetwork, c0: RationalVector) -> Result<Self, GeometryError> {
        Self::new(&conservation_basis(net), c0)
    }

    pub fn num_species(&self) -> usize {
        self.a.cols()
    }

    /// The face system `{ x ≥ 0, x_Z = 0, A x = b }`.
    pub fn face_system(&self, z: &IndexSet) -> LinearSystem {
        let s = self.num_species();
        let mut sys = LinearSystem::new(s).nonneg(0..s).zero(z.iter());
        for i in 0..self.a.rows() {
            sys = sys.equation(self.a.row(i).to_vec(), self.b[i].clone());
        }
        sys
    }
}

/// A point of the face `F_Z`, or `None` when the face is empty.
pub fn face_nonempty(p: &InvariantPolytope, z: &IndexSet) -> Option<RationalVector> {
    if z.is_empty() {
        return Some(p.c0.clone());
    }
    face_feasibility(p, z).witness().cloned()
}

/// The face LP with its witness or infeasibility certificate.
pub fn face_feasibility(p: &InvariantPolytope, z: &IndexSet) -> Feasibility {
    feasible(&p.face_system(z))
}

/// Dimension of `F_Z`, or `None` when it is empty.
pub fn face_dimension(p: &InvariantPolytope, z: &IndexSet) -> Option<usize> {
    affine_dim(&p.face_system(z))
}

/// Solves the square system `A_B x = b` when `A_B` is nonsingular.
fn solve_square(a: &RationalMatrix, cols: &[usize], b: &[Rational]) -> Option<RationalVector> {
    let d = a.rows();
    let mut m: Vec<RationalVector> = (0..d)
        .map(|i| {
            let mut row: RationalVector = cols.iter().map(|&j| a[(i, j)].clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    for c in 0..d {
        let p = (c..d).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        let pivot = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[d].clone()).collect())
}

/// Supports of the vertices of `P(c0)`, sorted canonically.
///
/// Enumerates column bases of `A`; degenerate vertices arising from several
/// bases are reported once.
pub fn vertex_supports(p: &InvariantPolytope) -> Vec<IndexSet> {
    let d = p.a.rows();
    let s = p.a.cols();

    // columns in DFS order with incremental independence checks
    fn rec(
        p: &InvariantPolytope,
        start: usize,
        chosen: &mut Vec<usize>,
        echelon: &mut Vec<(usize, RationalVector)>,
        out: &mut HashSet<IndexSet>,
    ) {
        let d = p.a.rows();
        if chosen.len() == d {
            if let Some(x) = solve_square(&p.a, chosen, &p.b) {
                if x.iter().all(|v| !v.is_negative()) {
                    let support = chosen
                        .iter()
                        .zip(&x)
                        .filter(|(_, v)| v.is_positive())
                        .map(|(&j, _)| j)
                        .collect();
                    out.insert(support);
                }
            }
            return;
        }
        let remaining = d - chosen.len();
        for j in start..=p.a.cols() - remaining {
            let mut col = p.a.column(j);
            for (pc, row) in echelon.iter() {
                if !col[*pc].is_zero() {
                    let f = col[*pc].clone() / &row[*pc];
                    for (x, y) in col.iter_mut().zip(row) {
                        *x -= &f * y;
                    }
                }
            }
            let Some(pc) = col.iter().position(|x| !x.is_zero()) else {
                continue;
            };
            chosen.push(j);
            echelon.push((pc, col));
            rec(p, j + 1, chosen, echelon, out);
            echelon.pop();
            chosen.pop();
        }
    }

    let found: Vec<HashSet<IndexSet>> = if d == 0 {
        vec![std::iter::once(IndexSet::new()).collect()]
    } else {
        (0..s)
            .into_par_iter()
            .map(|first| {
                let mut out = HashSet::new();
                let mut chosen = Vec::new();
                let mut echelon = Vec::new();
                if s - first >= d {
                    let col = p.a.column(first);
                    if let Some(pc) = col.iter().position(|x| !x.is_zero()) {
                        chosen.push(first);
                        echelon.push((pc, col));
                        rec(p, first + 1, &mut chosen, &mut echelon, &mut out);
                    }
                }
                out
            })
            .collect()
    };
    let mut all: Vec<IndexSet> = found.into_iter().flatten().collect::<HashSet<_>>().into_iter().collect();
    all.sort();
    all
}

/// Canonical description of the chamber containing the image of `c0`: the
/// sorted list of vertex supports of `P(c0)`.
pub fn chamber_signature(
    net: &ReactionNetwork,
    c0: RationalVector,
) -> Result<Vec<IndexSet>, GeometryError> {
    Ok(vertex_supports(&InvariantPolytope::for_network(net, c0)?))
}
