//! Exact rational linear algebra: dense matrices, fraction-free row
//! reduction, null spaces, and the stoichiometric / conservation subspaces
//! of a network.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::network::ReactionNetwork;

pub type Rational = num_rational::BigRational;
pub type RationalVector = Vec<Rational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot parse rational `{0}`")]
    BadRational(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p` or `p/q` (no decimals).
pub fn parse_rational(text: &str) -> Result<Rational, ArithError> {
    let t = text.trim();
    let bad = || ArithError::BadRational(text.to_string());
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

/// Formats as `p/q`, or `p` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive. The zero vector maps to itself.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter().map(|x| x / &g * &sign).collect()
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` fixes the width when there are no
    /// rows.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        RationalMatrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn from_i64_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    pub fn from_bigint_rows(cols: usize, rows: &[Vec<BigInt>]) -> Self {
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<RationalVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> RationalVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<RationalVector, ArithError> {
        if v.len() != self.cols {
            return Err(ArithError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `vᵀ M`.
    pub fn left_mul_vec(&self, v: &[Rational]) -> Result<RationalVector, ArithError> {
        if v.len() != self.rows {
            return Err(ArithError::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![Rational::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.row(i)) {
                *o += vi * x;
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, cols: &[usize]) -> RationalMatrix {
        let rows = (0..self.rows)
            .map(|i| cols.iter().map(|&j| self[(i, j)].clone()).collect())
            .collect();
        RationalMatrix::from_rows(cols.len(), rows)
    }

    pub fn push_row(&mut self, row: Vec<Rational>) {
        assert_eq!(row.len(), self.cols, "row width");
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn rank(&self) -> usize {
        row_reduce(self).rank
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowReduction {
    pub rank: usize,
    pub rref: RationalMatrix,
    pub pivot_cols: Vec<usize>,
}

/// Fraction-free (Bareiss) echelon form over the integers after clearing
/// row denominators; returns the echelon rows and their pivot columns.
fn bareiss_echelon(m: &RationalMatrix) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| primitive_integer(m.row(i)))
        .collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&p| !a[p][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, bottom) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = pivot_row[c].clone();
        for row in bottom.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let v = &pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
            // previously-skipped columns stay zero below the pivot rows
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Reduced row echelon form, rank and pivot columns.
pub fn row_reduce(m: &RationalMatrix) -> RowReduction {
    let (echelon, pivots) = bareiss_echelon(m);
    let cols = m.cols();
    let mut rows: Vec<RationalVector> = echelon
        .into_iter()
        .map(|r| r.into_iter().map(Rational::from_integer).collect())
        .collect();
    for (k, &c) in pivots.iter().enumerate().rev() {
        let inv = rows[k][c].recip();
        for x in rows[k].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[k].clone();
        for row in rows.iter_mut().take(k) {
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
    }
    RowReduction {
        rank: pivots.len(),
        rref: RationalMatrix::from_rows(cols, rows),
        pivot_cols: pivots,
    }
}

/// Basis of `{ x : M x = 0 }`, one row per free column, in column order.
pub fn null_space(m: &RationalMatrix) -> RationalMatrix {
    let red = row_reduce(m);
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &c in &red.pivot_cols {
        is_pivot[c] = true;
    }
    let rows = (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (k, &p) in red.pivot_cols.iter().enumerate() {
                v[p] = -red.rref[(k, f)].clone();
            }
            v
        })
        .collect();
    RationalMatrix::from_rows(cols, rows)
}

/// A linear subspace given by linearly independent basis rows.
#[derive(Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    basis: RationalMatrix,
}

impl SubspaceBasis {
    /// Row space of `m`, with a basis of primitive integer rows taken from
    /// the reduced echelon form.
    pub fn row_space(m: &RationalMatrix) -> Self {
        let red = row_reduce(m);
        Self::from_independent_rows(red.rref)
    }

    /// Wraps rows already known to be independent, normalizing each to a
    /// primitive integer vector.
    fn from_independent_rows(m: RationalMatrix) -> Self {
        let cols = m.cols();
        let rows = (0..m.rows())
            .map(|i| {
                primitive_integer(m.row(i))
                    .into_iter()
                    .map(Rational::from_integer)
                    .collect()
            })
            .collect();
        SubspaceBasis {
            basis: RationalMatrix::from_rows(cols, rows),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.dim())
            .map(|i| self.basis.row(i).iter().map(|x| x.to_integer()).collect())
            .collect()
    }

    /// Whether `v` lies in the span of the basis rows.
    pub fn contains(&self, v: &[Rational]) -> Result<bool, ArithError> {
        if v.len() != self.ambient_dim() {
            return Err(ArithError::DimensionMismatch {
                expected: self.ambient_dim(),
                found: v.len(),
            });
        }
        let mut m = self.basis.clone();
        m.push_row(v.to_vec());
        Ok(m.rank() == self.dim())
    }

    /// Same subspace (mutual containment).
    pub fn same_span(&self, other: &SubspaceBasis) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.dim() == other.dim()
            && (0..other.dim()).all(|i| self.contains(other.basis.row(i)).unwrap_or(false))
    }

    /// The orthogonal complement.
    pub fn orthogonal_complement(&self) -> SubspaceBasis {
        Self::from_independent_rows(null_space(&self.basis))
    }
}

impl fmt::Debug for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubspaceBasis({:?})", self.basis)
    }
}

/// Membership test for a row space.
pub fn in_row_space(b: &SubspaceBasis, v: &[Rational]) -> Result<bool, ArithError> {
    b.contains(v)
}

fn generator_matrix(net: &ReactionNetwork) -> RationalMatrix {
    RationalMatrix::from_i64_rows(net.num_species(), &net.stoichiometric_generators())
}

/// `L_stoi`: the span of the reaction vectors.
pub fn stoichiometric_basis(net: &ReactionNetwork) -> SubspaceBasis {
    SubspaceBasis::row_space(&generator_matrix(net))
}

/// `L_cons`: the orthogonal complement of the stoichiometric subspace, as
/// primitive integer rows. Pivot order follows the species order.
pub fn conservation_basis(net: &ReactionNetwork) -> SubspaceBasis {
    SubspaceBasis::from_independent_rows(null_space(&generator_matrix(net)))
}
