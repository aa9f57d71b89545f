//! Exact integer and rational linear algebra primitives.
//!
//! Everything downstream (chamber tests, destabilizing one-parameter
//! subgroups, convex feasibility) reduces to a handful of operations on
//! integer vectors: dot-product pairings, fraction-free rank and nullspace
//! computations, and rational linear-programming feasibility. All arithmetic
//! is arbitrary precision; there is no floating point anywhere in this crate.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use std::fmt;

pub type Int = BigInt;
pub type Rational = BigRational;

/// Integer vector in the ambient coordinate lattice.
///
/// Depending on context this holds a character (weight) or a cocharacter
/// (one-parameter subgroup). Ordering is lexicographic on entries, which is
/// the canonical order used for states throughout the crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(pub Vec<Int>);

impl IntVector {
    pub fn from_i64(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&x| Int::from(x)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        IntVector(vec![Int::zero(); dim])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    /// Dot product. Panics on length mismatch; use [`pairing`] for the
    /// checked variant.
    pub fn dot(&self, other: &IntVector) -> Int {
        assert_eq!(self.len(), other.len(), "dot product length mismatch");
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        assert_eq!(self.len(), other.len());
        IntVector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        assert_eq!(self.len(), other.len());
        IntVector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: &Int) -> IntVector {
        IntVector(self.0.iter().map(|a| a * c).collect())
    }

    pub fn sum(&self) -> Int {
        self.0.iter().sum()
    }

    /// Divides out the gcd of the entries. The zero vector is returned
    /// unchanged; the sign is left as found.
    pub fn primitive(&self) -> IntVector {
        let mut g = Int::zero();
        for x in &self.0 {
            g = g.gcd(x);
        }
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntVector(self.0.iter().map(|x| x / &g).collect())
    }

    /// Primitive vector with the first nonzero entry positive. Used as the
    /// canonical representative of a proportionality class.
    pub fn direction(&self) -> IntVector {
        let p = self.primitive();
        match p.0.iter().find(|x| !x.is_zero()) {
            Some(x) if x.is_negative() => p.neg(),
            _ => p,
        }
    }

    pub fn is_proportional_to(&self, other: &IntVector) -> bool {
        !self.is_zero() && !other.is_zero() && self.direction() == other.direction()
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExactError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// The perfect pairing between cocharacters and characters, realized as the
/// coordinate dot product.
pub fn pairing(lambda: &IntVector, chi: &IntVector) -> Result<Int, ExactError> {
    if lambda.len() != chi.len() {
        return Err(ExactError::DimensionMismatch(lambda.len(), chi.len()));
    }
    Ok(lambda.dot(chi))
}

/// Fraction-free (Bareiss) elimination. Returns the echelon rows (nonzero,
/// linearly independent, spanning the input row space) and leaves rank =
/// number of returned rows.
fn bareiss_echelon(rows: &[IntVector]) -> Vec<Vec<Int>> {
    let mut m: Vec<Vec<Int>> = rows.iter().map(|r| r.0.clone()).collect();
    if m.is_empty() {
        return Vec::new();
    }
    let ncols = m[0].len();
    let nrows = m.len();
    let mut prev = Int::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let num = &m[i][j] * &m[r][c] - &m[i][c] * &m[r][j];
                m[i][j] = &num / &prev; // exact by Bareiss
            }
            m[i][c] = Int::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    m.truncate(r);
    m
}

/// Rank of the integer matrix whose rows are the given vectors.
pub fn rank(rows: &[IntVector]) -> usize {
    bareiss_echelon(rows).len()
}

pub fn is_linearly_independent(vs: &[IntVector]) -> bool {
    rank(vs) == vs.len()
}

/// Dimension of the linear span of a finite character set.
pub fn span_dim(set: &[IntVector]) -> usize {
    rank(set)
}

/// Determinant of a square integer matrix by fraction-free elimination.
fn bareiss_det(mut m: Vec<Vec<Int>>) -> Int {
    let n = m.len();
    if n == 0 {
        return Int::one();
    }
    let mut prev = Int::one();
    let mut sign = 1i32;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return Int::zero();
        };
        if p != k {
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = &num / &prev;
            }
            m[i][k] = Int::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Primitive integer generator of the one-dimensional common kernel of the
/// given rows, or `None` when the corank is not exactly one.
///
/// The generator is the vector of signed maximal minors of an echelon basis
/// of the row space, so it is exact; the sign is unspecified and callers
/// normalize it (e.g. into the fundamental chamber).
pub fn nullspace_primitive(rows: &[IntVector], dim: usize) -> Option<IntVector> {
    let echelon = bareiss_echelon(rows);
    if echelon.len() + 1 != dim {
        return None;
    }
    let k = echelon.len();
    let mut out = Vec::with_capacity(dim);
    for j in 0..dim {
        let minor: Vec<Vec<Int>> = echelon
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        debug_assert_eq!(minor.len(), k);
        let d = bareiss_det(minor);
        out.push(if j % 2 == 0 { d } else { -d });
    }
    let v = IntVector(out);
    if v.is_zero() {
        return None;
    }
    debug_assert!(rows.iter().all(|r| r.dot(&v).is_zero()));
    Some(v.primitive())
}

/// Rectangular rational matrix, rows × columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    pub rows: Vec<Vec<Rational>>,
}

impl RationalMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Self {
        if let Some(first) = rows.first() {
            let w = first.len();
            assert!(rows.iter().all(|r| r.len() == w), "ragged matrix");
        }
        RationalMatrix { rows }
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }
}

/// Whether there exists `t` with `A·t = rhs` and `t ≥ lower_bounds`
/// entrywise. Exact rational phase-1 simplex with Bland's anti-cycling rule,
/// so termination is guaranteed.
pub fn lp_feasible(
    equalities: &RationalMatrix,
    rhs: &[Rational],
    lower_bounds: &[Rational],
) -> bool {
    let m = equalities.rows.len();
    let n = equalities.ncols();
    assert_eq!(rhs.len(), m, "rhs length mismatch");
    assert_eq!(lower_bounds.len(), n, "bounds length mismatch");
    if m == 0 {
        return true;
    }

    // Substitute t = lower + u with u >= 0, flip rows so b >= 0.
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut b: Vec<Rational> = Vec::with_capacity(m);
    for (row, r) in equalities.rows.iter().zip(rhs.iter()) {
        let shift: Rational = row
            .iter()
            .zip(lower_bounds.iter())
            .map(|(a, l)| a * l)
            .sum();
        let mut bi = r - shift;
        let mut arow = row.clone();
        if bi < Rational::zero() {
            bi = -bi;
            for a in &mut arow {
                *a = -a.clone();
            }
        }
        // append identity column for the artificial variable later
        tab.push(arow);
        b.push(bi);
    }
    for (i, row) in tab.iter_mut().enumerate() {
        for k in 0..m {
            row.push(if k == i {
                Rational::one()
            } else {
                Rational::zero()
            });
        }
    }

    // Phase 1: minimize the sum of artificials. basis[i] = n + i initially.
    // obj[j] = z_j - c_j; entering while some obj[j] > 0 (Bland: smallest j).
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut obj: Vec<Rational> = (0..n + m)
        .map(|j| {
            if j < n {
                tab.iter().map(|row| row[j].clone()).sum()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let mut w: Rational = b.iter().cloned().sum();

    while let Some(e) = (0..n + m).find(|&j| obj[j] > Rational::zero()) {
        // Ratio test; Bland tie-break on the smallest basis variable.
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if tab[i][e] > Rational::zero() {
                let ratio = &b[i] / &tab[i][e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((l, _)) = leave else {
            // Phase-1 objective is bounded below by zero, so an unbounded
            // direction cannot occur; treat defensively as infeasible.
            return false;
        };

        // Pivot on (l, e).
        let piv = tab[l][e].clone();
        for x in tab[l].iter_mut() {
            *x /= &piv;
        }
        b[l] /= &piv;
        let pivot_row = tab[l].clone();
        let pivot_b = b[l].clone();
        for (i, (row, bi)) in tab.iter_mut().zip(b.iter_mut()).enumerate() {
            if i != l && !row[e].is_zero() {
                let f = row[e].clone();
                for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                    let d = &f * p;
                    *x -= d;
                }
                let d = &f * &pivot_b;
                *bi -= d;
            }
        }
        if !obj[e].is_zero() {
            let f = obj[e].clone();
            for (o, t) in obj.iter_mut().zip(tab[l].iter()) {
                let d = &f * t;
                *o -= d;
            }
            let d = &f * &b[l];
            w -= d;
        }
        basis[l] = e;
    }

    w.is_zero()
}

fn columns_matrix(set: &[IntVector]) -> (RationalMatrix, usize) {
    let dim = set[0].len();
    let rows = (0..dim)
        .map(|r| {
            set.iter()
                .map(|v| Rational::from_integer(v.0[r].clone()))
                .collect()
        })
        .collect();
    (RationalMatrix::new(rows), dim)
}

/// Whether the origin lies in the convex hull of the set: a nonnegative
/// convex combination summing to one.
pub fn conv_contains_origin(set: &[IntVector]) -> bool {
    if set.is_empty() {
        return false;
    }
    let (mut mat, dim) = columns_matrix(set);
    mat.rows.push(vec![Rational::one(); set.len()]);
    let mut rhs = vec![Rational::zero(); dim];
    rhs.push(Rational::one());
    let lower = vec![Rational::zero(); set.len()];
    lp_feasible(&mat, &rhs, &lower)
}

/// Whether the origin lies in the relative interior of the convex hull:
/// for a finite set this is exactly the existence of a strictly positive
/// combination, rescaled here to coefficients ≥ 1.
pub fn relint_contains_origin(set: &[IntVector]) -> bool {
    if set.is_empty() {
        return false;
    }
    let (mat, dim) = columns_matrix(set);
    let rhs = vec![Rational::zero(); dim];
    let lower = vec![Rational::one(); set.len()];
    lp_feasible(&mat, &rhs, &lower)
}

/// A linear subspace kept in reduced row echelon form over the rationals.
///
/// The RREF basis is a canonical representative of the subspace, so equality
/// and hashing on `Subspace` values deduplicate spans exactly. Used by the
/// polystable stratification to enumerate matroid flats.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    dim: usize,
    rref: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn zero(dim: usize) -> Self {
        Subspace {
            dim,
            rref: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rref.len()
    }

    fn reduce(&self, v: &IntVector) -> Vec<Rational> {
        let mut w: Vec<Rational> =
            v.0.iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect();
        for row in &self.rref {
            let lead = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            if !w[lead].is_zero() {
                let f = w[lead].clone();
                for (wj, rj) in w.iter_mut().zip(row.iter()) {
                    let d = &f * rj;
                    *wj -= d;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &IntVector) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// The span of `self` and `v`; returns `None` when `v` already lies in
    /// the subspace.
    pub fn extend(&self, v: &IntVector) -> Option<Subspace> {
        let w = self.reduce(v);
        let lead = w.iter().position(|x| !x.is_zero())?;
        let inv = w[lead].clone();
        let new_row: Vec<Rational> = w.into_iter().map(|x| x / &inv).collect();
        let mut rows = self.rref.clone();
        // Eliminate the new pivot from existing rows, then insert sorted by
        // pivot column to keep the representative canonical.
        for row in &mut rows {
            if !row[lead].is_zero() {
                let f = row[lead].clone();
                for (rj, nj) in row.iter_mut().zip(new_row.iter()) {
                    let d = &f * nj;
                    *rj -= d;
                }
            }
        }
        rows.push(new_row);
        rows.sort_by_key(|r| r.iter().position(|x| !x.is_zero()).unwrap());
        Some(Subspace {
            dim: self.dim,
            rref: rows,
        })
    }
}
