//! Dense fuzzy subsets and fuzzy relations over a linear Heyting algebra.
//!
//! Compositions are max-min matrix products:
//! `(f o g)(a, c) = max_b min(f(a, b), g(b, c))`.
//!
//! [`residual_update`] is the engine of the bisimulation solver. Each
//! inequality of the form `phi^-1 o R <= R' o phi^-1` is, by adjunction,
//! equivalent to an entrywise upper bound on `phi`:
//!
//! ```text
//! phi(u, u') <= min_v  R(u, v) -> (R' o phi^-1)(u', v)
//! ```
//!
//! Meeting `phi` with that bound (computed from the previous iterate) is the
//! greatest single-step correction. The other three shapes (`phi o R' <= R o phi`,
//! `R o phi <= phi o R'`, `R' o phi^-1 <= phi^-1 o R`) are the same bound applied
//! to the inverse relation and/or the inverse accessibility relations.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::TruthValue;
use crate::par::Exec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelError {
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    Shape { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("matrix must have at least one row and one column")]
    Empty,
}

/// A fuzzy subset of a finite set, index-aligned with that set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FuzzyVec(pub Vec<TruthValue>);

impl FuzzyVec {
    pub fn filled(len: usize, value: TruthValue) -> Self {
        FuzzyVec(vec![value; len])
    }

    pub fn zeros(len: usize) -> Self {
        Self::filled(len, TruthValue::zero())
    }

    pub fn ones(len: usize) -> Self {
        Self::filled(len, TruthValue::one())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TruthValue> {
        self.0.iter()
    }

    pub fn leq(&self, other: &FuzzyVec) -> Result<bool, RelError> {
        self.same_len(other, "leq")?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    /// First index where `self[i] > other[i]`.
    pub fn first_excess(&self, other: &FuzzyVec) -> Option<usize> {
        self.0.iter().zip(&other.0).position(|(a, b)| a > b)
    }

    fn same_len(&self, other: &FuzzyVec, op: &'static str) -> Result<(), RelError> {
        if self.len() != other.len() {
            return Err(RelError::Shape { op, left: (1, self.len()), right: (1, other.len()) });
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for FuzzyVec {
    type Output = TruthValue;
    fn index(&self, i: usize) -> &TruthValue {
        &self.0[i]
    }
}

impl FromIterator<TruthValue> for FuzzyVec {
    fn from_iter<I: IntoIterator<Item = TruthValue>>(iter: I) -> Self {
        FuzzyVec(iter.into_iter().collect())
    }
}

/// A fuzzy relation between two finite sets, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FuzzyMat {
    rows: usize,
    cols: usize,
    data: Vec<TruthValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointwiseOp {
    Meet,
    Join,
}

/// Which side of the relation a residual bound constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `phi^-1 o R <= R' o phi^-1` (or its inverse-side twin).
    Forward,
    /// `R o phi <= phi o R'` (or its inverse-side twin).
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The condition is imposed on `phi` itself.
    Direct,
    /// The condition is imposed on `phi^-1`, read as a relation from `W'` to `W`.
    Inverse,
}

impl FuzzyMat {
    pub fn filled(rows: usize, cols: usize, value: TruthValue) -> Self {
        FuzzyMat { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, TruthValue::zero())
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, TruthValue::one())
    }

    /// The crisp identity relation.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { TruthValue::one() } else { TruthValue::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> TruthValue) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        FuzzyMat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<TruthValue>>) -> Result<Self, RelError> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || cols == 0 {
            return Err(RelError::Empty);
        }
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(RelError::Ragged { row: i, found: row.len(), expected: cols });
            }
            data.extend(row);
        }
        Ok(FuzzyMat { rows: n, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &TruthValue {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: TruthValue) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[TruthValue] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<TruthValue>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &TruthValue> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(TruthValue::is_zero)
    }

    /// The inverse (transposed) relation.
    pub fn inverse(&self) -> FuzzyMat {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn compose(&self, other: &FuzzyMat) -> Result<FuzzyMat, RelError> {
        if self.cols != other.rows {
            return Err(RelError::Shape { op: "compose", left: self.shape(), right: other.shape() });
        }
        Ok(Self::from_fn(self.rows, other.cols, |a, c| sup_min((0..self.cols).map(|b| (self.get(a, b), other.get(b, c))))))
    }

    /// `(phi o g)(a) = max_b min(phi(a, b), g(b))`.
    pub fn compose_vec(&self, g: &FuzzyVec) -> Result<FuzzyVec, RelError> {
        if self.cols != g.len() {
            return Err(RelError::Shape { op: "compose_mat_vec", left: self.shape(), right: (g.len(), 1) });
        }
        Ok((0..self.rows).map(|a| sup_min(self.row(a).iter().zip(g.iter()))).collect())
    }

    pub fn pointwise(&self, op: PointwiseOp, other: &FuzzyMat) -> Result<FuzzyMat, RelError> {
        self.same_shape(other, "pointwise")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| match op {
                PointwiseOp::Meet => a.meet(b),
                PointwiseOp::Join => a.join(b),
            })
            .collect();
        Ok(FuzzyMat { rows: self.rows, cols: self.cols, data })
    }

    pub fn meet(&self, other: &FuzzyMat) -> Result<FuzzyMat, RelError> {
        self.pointwise(PointwiseOp::Meet, other)
    }

    pub fn join(&self, other: &FuzzyMat) -> Result<FuzzyMat, RelError> {
        self.pointwise(PointwiseOp::Join, other)
    }

    /// Entrywise `self <= other`.
    pub fn leq(&self, other: &FuzzyMat) -> Result<bool, RelError> {
        self.same_shape(other, "leq")?;
        Ok(self.data.iter().zip(&other.data).all(|(a, b)| a <= b))
    }

    /// First `(row, col)` where `self > other`, in row-major order.
    pub fn first_excess(&self, other: &FuzzyMat) -> Result<Option<(usize, usize)>, RelError> {
        self.same_shape(other, "first_excess")?;
        Ok(self.data.iter().zip(&other.data).position(|(a, b)| a > b).map(|k| (k / self.cols, k % self.cols)))
    }

    /// Nonzero counts per row and per column.
    pub fn nonzero_profile(&self) -> NonzeroProfile {
        let mut rows = vec![0; self.rows];
        let mut cols = vec![0; self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j).is_zero() {
                    rows[i] += 1;
                    cols[j] += 1;
                }
            }
        }
        NonzeroProfile { rows, cols }
    }

    fn same_shape(&self, other: &FuzzyMat, op: &'static str) -> Result<(), RelError> {
        if self.shape() != other.shape() {
            return Err(RelError::Shape { op, left: self.shape(), right: other.shape() });
        }
        Ok(())
    }
}

impl FuzzyVec {
    /// `(f o phi)(b) = max_a min(f(a), phi(a, b))`.
    pub fn compose_mat(&self, phi: &FuzzyMat) -> Result<FuzzyVec, RelError> {
        if self.len() != phi.rows() {
            return Err(RelError::Shape { op: "compose_vec_mat", left: (1, self.len()), right: phi.shape() });
        }
        Ok((0..phi.cols()).map(|b| sup_min((0..phi.rows()).map(|a| (&self[a], phi.get(a, b))))).collect())
    }

    /// `f o g = max_a min(f(a), g(a))`.
    pub fn compose_vec(&self, g: &FuzzyVec) -> Result<TruthValue, RelError> {
        self.same_len(g, "compose_vec_vec")?;
        Ok(sup_min(self.iter().zip(g.iter())))
    }
}

/// Row and column counts of nonzero entries. For finite relations these are
/// always finite; they are reported as image-/domain-finiteness metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonzeroProfile {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl NonzeroProfile {
    pub fn max_image(&self) -> usize {
        self.rows.iter().copied().max().unwrap_or(0)
    }

    pub fn max_domain(&self) -> usize {
        self.cols.iter().copied().max().unwrap_or(0)
    }
}

fn sup_min<'a>(pairs: impl Iterator<Item = (&'a TruthValue, &'a TruthValue)>) -> TruthValue {
    pairs.map(|(a, b)| if a <= b { a } else { b }).max().cloned().unwrap_or_else(TruthValue::zero)
}

fn inf_residuum<'a>(pairs: impl Iterator<Item = (&'a TruthValue, &'a TruthValue)>) -> TruthValue {
    pairs.filter(|(x, z)| x > z).map(|(_, z)| z).min().cloned().unwrap_or_else(TruthValue::one)
}

/// `chi(x, y) = min_{x2} rx(x, x2) -> (ry o phi^-1)(y, x2)` for `phi: X x Y`.
fn forward_bound(phi: &FuzzyMat, rx: &FuzzyMat, ry: &FuzzyMat, exec: Exec) -> FuzzyMat {
    let (nx, ny) = phi.shape();
    // target(y, x2) = (ry o phi^-1)(y, x2)
    let target = ry.compose(&phi.inverse()).expect("shapes checked by caller");
    let rows = exec.map_range(nx, |x| (0..ny).map(|y| inf_residuum(rx.row(x).iter().zip(target.row(y)))).collect::<Vec<_>>());
    FuzzyMat { rows: nx, cols: ny, data: rows.into_iter().flatten().collect() }
}

/// Greatest entrywise bound `chi` such that `phi /\ chi` satisfies the chosen
/// inequality when the previous iterate `phi` is kept on the right-hand side.
///
/// `phi` is `W x W'`, `r` is on `W`, `r_prime` on `W'`. The four combinations:
///
/// | direction | side    | inequality                     |
/// |-----------|---------|--------------------------------|
/// | Forward   | Direct  | `phi^-1 o R <= R' o phi^-1`    |
/// | Forward   | Inverse | `phi o R' <= R o phi`          |
/// | Backward  | Direct  | `R o phi <= phi o R'`          |
/// | Backward  | Inverse | `R' o phi^-1 <= phi^-1 o R`    |
pub fn residual_update(
    phi: &FuzzyMat,
    r: &FuzzyMat,
    r_prime: &FuzzyMat,
    direction: Direction,
    side: Side,
    exec: Exec,
) -> Result<FuzzyMat, RelError> {
    let (k, m) = phi.shape();
    if r.shape() != (k, k) {
        return Err(RelError::Shape { op: "residual_update", left: phi.shape(), right: r.shape() });
    }
    if r_prime.shape() != (m, m) {
        return Err(RelError::Shape { op: "residual_update", left: phi.shape(), right: r_prime.shape() });
    }
    Ok(match (direction, side) {
        (Direction::Forward, Side::Direct) => forward_bound(phi, r, r_prime, exec),
        (Direction::Forward, Side::Inverse) => forward_bound(&phi.inverse(), r_prime, r, exec).inverse(),
        (Direction::Backward, Side::Direct) => forward_bound(phi, &r.inverse(), &r_prime.inverse(), exec),
        (Direction::Backward, Side::Inverse) => forward_bound(&phi.inverse(), &r_prime.inverse(), &r.inverse(), exec).inverse(),
    })
}

/// Every distinct value occurring in the given matrices and vectors.
pub fn value_set<'a>(
    mats: impl IntoIterator<Item = &'a FuzzyMat>,
    vecs: impl IntoIterator<Item = &'a FuzzyVec>,
) -> BTreeSet<TruthValue> {
    let mut set: BTreeSet<TruthValue> = mats.into_iter().flat_map(|m| m.entries().cloned()).collect();
    set.extend(vecs.into_iter().flat_map(|v| v.iter().cloned()));
    set
}
