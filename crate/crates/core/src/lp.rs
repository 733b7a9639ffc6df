//! Exact linear feasibility.
//!
//! Phase-one simplex over arbitrary-precision rationals with Bland's rule.
//! Every answer carries proof: a feasible point, or a Farkas multiplier
//! vector that combines the equations into a contradiction.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{dot, Rational, RationalMatrix, RationalVector};
use crate::set::IndexSet;

/// Sign restriction on a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Free,
    NonNeg,
    Zero,
}

/// `{ x : eq_rows · x = rhs, x_j ≥ 0 (j ∈ nonneg), x_j = 0 (j ∈ zero) }`,
/// optionally with one extra row `normalization · x = 1`.
///
/// A variable listed both as non-negative and zero is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub eq_rows: RationalMatrix,
    pub rhs: RationalVector,
    pub nonneg_vars: IndexSet,
    pub zero_vars: IndexSet,
    pub normalization: Option<RationalVector>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            eq_rows: RationalMatrix::zeros(0, num_vars),
            rhs: Vec::new(),
            nonneg_vars: IndexSet::new(),
            zero_vars: IndexSet::new(),
            normalization: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.eq_rows.cols()
    }

    pub fn equation(mut self, row: RationalVector, rhs: Rational) -> Self {
        self.eq_rows.push_row(row);
        self.rhs.push(rhs);
        self
    }

    pub fn nonneg(mut self, vars: impl IntoIterator<Item = usize>) -> Self {
        for j in vars {
            self.nonneg_vars.insert(j);
        }
        self
    }

    pub fn zero(mut self, vars: impl IntoIterator<Item = usize>) -> Self {
        for j in vars {
            self.zero_vars.insert(j);
        }
        self
    }

    pub fn normalize(mut self, form: RationalVector) -> Self {
        assert_eq!(form.len(), self.num_vars(), "normalization width");
        self.normalization = Some(form);
        self
    }

    pub fn kind(&self, j: usize) -> VarKind {
        if self.zero_vars.contains(j) {
            VarKind::Zero
        } else if self.nonneg_vars.contains(j) {
            VarKind::NonNeg
        } else {
            VarKind::Free
        }
    }

    /// All equality rows including the normalization row, with their
    /// right-hand sides.
    fn all_rows(&self) -> (Vec<&[Rational]>, Vec<Rational>) {
        let mut rows: Vec<&[Rational]> = (0..self.eq_rows.rows()).map(|i| self.eq_rows.row(i)).collect();
        let mut rhs = self.rhs.clone();
        if let Some(n) = &self.normalization {
            rows.push(n);
            rhs.push(Rational::one());
        }
        (rows, rhs)
    }

    /// Exact check that `x` satisfies every constraint.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let (rows, rhs) = self.all_rows();
        let signs_ok = x.iter().enumerate().all(|(j, v)| match self.kind(j) {
            VarKind::Free => true,
            VarKind::NonNeg => !v.is_negative(),
            VarKind::Zero => v.is_zero(),
        });
        signs_ok && rows.iter().zip(&rhs).all(|(r, b)| &dot(r, x) == b)
    }

    /// Exact check of a Farkas certificate `y` (one multiplier per row,
    /// normalization row last): `yᵀb > 0` while `(yᵀA)_j` is `= 0` on free
    /// variables and `≤ 0` on non-negative ones.
    pub fn refuted_by(&self, y: &[Rational]) -> bool {
        let (rows, rhs) = self.all_rows();
        if y.len() != rows.len() {
            return false;
        }
        if !dot(y, &rhs).is_positive() {
            return false;
        }
        (0..self.num_vars()).all(|j| {
            let combo: Rational = rows.iter().zip(y).map(|(r, yi)| &r[j] * yi).sum();
            match self.kind(j) {
                VarKind::Free => combo.is_zero(),
                VarKind::NonNeg => !combo.is_positive(),
                VarKind::Zero => true,
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// A basic feasible point.
    Feasible { witness: RationalVector },
    /// Farkas multipliers, one per equation row (normalization row last).
    Infeasible { certificate: RationalVector },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }

    pub fn witness(&self) -> Option<&RationalVector> {
        match self {
            Feasibility::Feasible { witness } => Some(witness),
            Feasibility::Infeasible { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&RationalVector> {
        match self {
            Feasibility::Infeasible { certificate } => Some(certificate),
            Feasibility::Feasible { .. } => None,
        }
    }

    /// Re-verifies the attached proof against `sys`.
    pub fn verify(&self, sys: &LinearSystem) -> bool {
        match self {
            Feasibility::Feasible { witness } => sys.satisfied_by(witness),
            Feasibility::Infeasible { certificate } => sys.refuted_by(certificate),
        }
    }
}

/// Column of the standard-form problem: which original variable it comes
/// from and with which sign.
#[derive(Clone, Copy)]
struct Column {
    var: usize,
    negated: bool,
}

struct Tableau {
    /// `m` rows of `width + 1` entries; the last entry is the rhs.
    rows: Vec<RationalVector>,
    /// Reduced costs, `width + 1` entries; the last is minus the objective.
    costs: RationalVector,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        if !self.costs[c].is_zero() {
            let f = self.costs[c].clone();
            for (x, p) in self.costs.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Runs Bland's rule to optimality (the phase-one objective is bounded
    /// below by zero).
    fn solve(&mut self) {
        loop {
            let Some(enter) = (0..self.width).find(|&j| self.costs[j].is_negative()) else {
                return;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let (r, _) = leave.expect("phase-one objective is bounded");
            self.pivot(r, enter);
        }
    }
}

/// Decides feasibility of `sys` exactly.
pub fn feasible(sys: &LinearSystem) -> Feasibility {
    let n = sys.num_vars();
    let (rows, rhs) = sys.all_rows();
    let m = rows.len();

    let mut columns = Vec::new();
    for j in 0..n {
        match sys.kind(j) {
            VarKind::Zero => {}
            VarKind::NonNeg => columns.push(Column {
                var: j,
                negated: false,
            }),
            VarKind::Free => {
                columns.push(Column {
                    var: j,
                    negated: false,
                });
                columns.push(Column {
                    var: j,
                    negated: true,
                });
            }
        }
    }
    let k = columns.len();
    let width = k + m;

    let signs: Vec<bool> = rhs.iter().map(|b| b.is_negative()).collect();
    let mut tab_rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(width + 1);
        for col in &columns {
            let mut v = rows[i][col.var].clone();
            if col.negated ^ signs[i] {
                v = -v;
            }
            row.push(v);
        }
        for a in 0..m {
            row.push(if a == i { Rational::one() } else { Rational::zero() });
        }
        row.push(if signs[i] { -rhs[i].clone() } else { rhs[i].clone() });
        tab_rows.push(row);
    }
    let mut costs = vec![Rational::zero(); width + 1];
    for j in 0..k {
        costs[j] = -tab_rows.iter().map(|r| r[j].clone()).sum::<Rational>();
    }
    costs[width] = -tab_rows.iter().map(|r| r[width].clone()).sum::<Rational>();

    let mut tab = Tableau {
        rows: tab_rows,
        costs,
        basis: (k..k + m).collect(),
        width,
    };
    tab.solve();

    if tab.costs[width].is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < k {
                let col = columns[b];
                let v = &tab.rows[i][width];
                if col.negated {
                    x[col.var] -= v;
                } else {
                    x[col.var] += v;
                }
            }
        }
        Feasibility::Feasible { witness: x }
    } else {
        // reduced cost of artificial i is 1 - y_i
        let certificate = (0..m)
            .map(|i| {
                let y = Rational::one() - &tab.costs[k + i];
                if signs[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        Feasibility::Infeasible { certificate }
    }
}

/// Dimension of the affine hull of the feasible set, or `None` when it is
/// empty.
///
/// Each non-negative variable is probed for being positive somewhere on the
/// set; the ones that never are become implicit equalities.
pub fn affine_dim(sys: &LinearSystem) -> Option<usize> {
    let start = feasible(sys);
    let witness = start.witness()?;
    let n = sys.num_vars();
    let mut can_be_positive = IndexSet::with_capacity(n);
    for (j, v) in witness.iter().enumerate() {
        if sys.kind(j) == VarKind::NonNeg && v.is_positive() {
            can_be_positive.insert(j);
        }
    }
    let (rows, rhs) = sys.all_rows();
    for j in 0..n {
        if sys.kind(j) != VarKind::NonNeg || can_be_positive.contains(j) {
            continue;
        }
        // homogenized probe: R x - t b = 0, t ≥ 0, x_j = 1
        let mut probe = LinearSystem::new(n + 1);
        for (r, b) in rows.iter().zip(&rhs) {
            let mut row = r.to_vec();
            row.push(-b.clone());
            probe = probe.equation(row, Rational::zero());
        }
        let mut unit = vec![Rational::zero(); n + 1];
        unit[j] = Rational::one();
        probe = probe
            .equation(unit, Rational::one())
            .nonneg(sys.nonneg_vars.iter().chain(std::iter::once(n)))
            .zero(sys.zero_vars.iter());
        if let Feasibility::Feasible { witness } = feasible(&probe) {
            for (k, v) in witness.iter().take(n).enumerate() {
                if sys.kind(k) == VarKind::NonNeg && v.is_positive() {
                    can_be_positive.insert(k);
                }
            }
        }
    }
    let live: Vec<usize> = (0..n)
        .filter(|&j| match sys.kind(j) {
            VarKind::Free => true,
            VarKind::NonNeg => can_be_positive.contains(j),
            VarKind::Zero => false,
        })
        .collect();
    let restricted = RationalMatrix::from_rows(
        live.len(),
        rows.iter()
            .map(|r| live.iter().map(|&j| r[j].clone()).collect())
            .collect(),
    );
    Some(live.len() - restricted.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn ints(v: &[i64]) -> RationalVector {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn forced_zero_contradicts_normalization() {
        let sys = LinearSystem::new(1)
            .nonneg([0])
            .zero([0])
            .normalize(ints(&[1]));
        let res = feasible(&sys);
        assert!(!res.is_feasible());
        assert!(res.verify(&sys));
    }

    #[test]
    fn simplex_vertex_witness() {
        let sys = LinearSystem::new(2)
            .equation(ints(&[1, 1]), int(1))
            .nonneg([0, 1]);
        let res = feasible(&sys);
        let w = res.witness().unwrap();
        assert!(res.verify(&sys));
        assert!(w == &ints(&[1, 0]) || w == &ints(&[0, 1]));
        assert_eq!(affine_dim(&sys), Some(1));
    }

    #[test]
    fn pinned_variable_has_dimension_zero() {
        let sys = LinearSystem::new(1).equation(ints(&[1]), int(0)).nonneg([0]);
        assert_eq!(affine_dim(&sys), Some(0));
    }

    #[test]
    fn empty_system_is_feasible() {
        let sys = LinearSystem::new(3);
        assert_eq!(
            feasible(&sys),
            Feasibility::Feasible {
                witness: ints(&[0, 0, 0])
            }
        );
        assert_eq!(affine_dim(&sys), Some(3));
    }

    #[test]
    fn negative_rhs_and_free_variables() {
        // x - y = -3, x ≥ 0, y free, x + y = 1  →  x = -1 infeasible
        let sys = LinearSystem::new(2)
            .equation(ints(&[1, -1]), int(-3))
            .equation(ints(&[1, 1]), int(1))
            .nonneg([0]);
        let res = feasible(&sys);
        assert!(!res.is_feasible());
        assert!(res.verify(&sys));

        let sys = LinearSystem::new(2)
            .equation(ints(&[1, -1]), int(-3))
            .nonneg([0]);
        let res = feasible(&sys);
        assert!(res.is_feasible() && res.verify(&sys));
    }

    #[test]
    fn bogus_proofs_are_rejected() {
        let sys = LinearSystem::new(2)
            .equation(ints(&[1, 1]), int(1))
            .nonneg([0, 1]);
        assert!(!sys.satisfied_by(&ints(&[2, -1])));
        assert!(!sys.refuted_by(&ints(&[1])));
        assert!(!sys.refuted_by(&ints(&[-1])));
    }

    #[test]
    fn deterministic() {
        let sys = LinearSystem::new(4)
            .equation(ints(&[1, 2, 0, 1]), int(4))
            .equation(ints(&[0, 1, 1, 1]), int(2))
            .nonneg(0..4);
        assert_eq!(feasible(&sys), feasible(&sys));
    }
}
