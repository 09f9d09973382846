//! Sparse real operators on truncated bases.
//!
//! Matrices are stored by column (source index). Norms and kernels are
//! computed block by block: the nonzero pattern splits into connected
//! components, each of which is small for the weight-conserving operators in
//! this crate, and each block goes through a dense SVD.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    dim_target: usize,
    dim_source: usize,
    columns: Vec<Vec<(usize, f64)>>,
    boundary: BTreeSet<usize>,
}

impl OperatorMatrix {
    pub fn zeros(dim_target: usize, dim_source: usize) -> Self {
        OperatorMatrix { dim_target, dim_source, columns: vec![Vec::new(); dim_source], boundary: BTreeSet::new() }
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let columns =
            values.iter().enumerate().map(|(k, &v)| if v == 0.0 { Vec::new() } else { vec![(k, v)] }).collect();
        OperatorMatrix { dim_target: values.len(), dim_source: values.len(), columns, boundary: BTreeSet::new() }
    }

    /// Sums duplicate entries and drops exact zeros.
    pub fn from_triplets(
        dim_target: usize,
        dim_source: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut cols: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); dim_source];
        for (r, c, v) in triplets {
            assert!(r < dim_target && c < dim_source, "entry ({r}, {c}) out of bounds");
            *cols[c].entry(r).or_insert(0.0) += v;
        }
        let columns = cols.into_iter().map(|col| col.into_iter().filter(|&(_, v)| v != 0.0).collect()).collect();
        OperatorMatrix { dim_target, dim_source, columns, boundary: BTreeSet::new() }
    }

    pub fn with_boundary(mut self, boundary: impl IntoIterator<Item = usize>) -> Self {
        self.boundary = boundary.into_iter().collect();
        self
    }

    pub fn dim_target(&self) -> usize {
        self.dim_target
    }

    pub fn dim_source(&self) -> usize {
        self.dim_source
    }

    pub fn column(&self, source: usize) -> &[(usize, f64)] {
        &self.columns[source]
    }

    /// Source indices whose image was clipped by the truncation.
    pub fn boundary_ledger(&self) -> &BTreeSet<usize> {
        &self.boundary
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn get(&self, target: usize, source: usize) -> f64 {
        self.columns[source]
            .binary_search_by_key(&target, |&(r, _)| r)
            .map(|k| self.columns[source][k].1)
            .unwrap_or(0.0)
    }

    /// Iterates `(target, source, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.columns.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    /// Transpose. All entries are real, so this is the adjoint. The boundary
    /// ledger does not transfer and is left empty.
    pub fn adjoint(&self) -> Self {
        OperatorMatrix::from_triplets(self.dim_source, self.dim_target, self.entries().map(|(r, c, v)| (c, r, v)))
    }

    /// `self ∘ rhs`. A source of the product is on the boundary when it was
    /// on `rhs`'s boundary or `rhs` maps it onto a boundary source of `self`.
    pub fn compose(&self, rhs: &OperatorMatrix) -> Result<Self> {
        if self.dim_source != rhs.dim_target {
            return Err(Error::DimensionMismatch(format!(
                "compose {}x{} with {}x{}",
                self.dim_target, self.dim_source, rhs.dim_target, rhs.dim_source
            )));
        }
        let columns: Vec<Vec<(usize, f64)>> = rhs
            .columns
            .par_iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
                for &(mid, v) in col {
                    for &(r, w) in &self.columns[mid] {
                        *acc.entry(r).or_insert(0.0) += w * v;
                    }
                }
                acc.into_iter().filter(|&(_, v)| v != 0.0).collect()
            })
            .collect();
        let mut boundary = rhs.boundary.clone();
        for (c, col) in rhs.columns.iter().enumerate() {
            if col.iter().any(|(mid, _)| self.boundary.contains(mid)) {
                boundary.insert(c);
            }
        }
        Ok(OperatorMatrix { dim_target: self.dim_target, dim_source: rhs.dim_source, columns, boundary })
    }

    /// `a·self + b·rhs`. Boundary ledgers are merged.
    pub fn combine(&self, a: f64, rhs: &OperatorMatrix, b: f64) -> Result<Self> {
        if self.dim_target != rhs.dim_target || self.dim_source != rhs.dim_source {
            return Err(Error::DimensionMismatch(format!(
                "add {}x{} and {}x{}",
                self.dim_target, self.dim_source, rhs.dim_target, rhs.dim_source
            )));
        }
        let triplets =
            self.entries().map(|(r, c, v)| (r, c, a * v)).chain(rhs.entries().map(|(r, c, v)| (r, c, b * v)));
        let mut out = OperatorMatrix::from_triplets(self.dim_target, self.dim_source, triplets);
        out.boundary = self.boundary.union(&rhs.boundary).copied().collect();
        Ok(out)
    }

    pub fn add(&self, rhs: &OperatorMatrix) -> Result<Self> {
        self.combine(1.0, rhs, 1.0)
    }

    pub fn sub(&self, rhs: &OperatorMatrix) -> Result<Self> {
        self.combine(1.0, rhs, -1.0)
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = OperatorMatrix::from_triplets(
            self.dim_target,
            self.dim_source,
            self.entries().map(|(r, c, v)| (r, c, a * v)),
        );
        out.boundary = self.boundary.clone();
        out
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &OperatorMatrix) -> Result<Self> {
        self.compose(rhs)?.sub(&rhs.compose(self)?)
    }

    pub fn is_diagonal(&self) -> bool {
        self.dim_source == self.dim_target && self.entries().all(|(r, c, _)| r == c)
    }

    pub fn diagonal_values(&self) -> Result<Vec<f64>> {
        if !self.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        Ok((0..self.dim_source).map(|k| self.get(k, k)).collect())
    }

    /// Keep entries whose row and column are both selected; dimensions stay.
    pub fn restrict(&self, rows: &[bool], cols: &[bool]) -> Self {
        assert_eq!(rows.len(), self.dim_target);
        assert_eq!(cols.len(), self.dim_source);
        OperatorMatrix::from_triplets(
            self.dim_target,
            self.dim_source,
            self.entries().filter(|&(r, c, _)| rows[r] && cols[c]),
        )
    }

    /// Re-index into a smaller matrix on the given rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut row_pos = vec![usize::MAX; self.dim_target];
        for (k, &r) in rows.iter().enumerate() {
            row_pos[r] = k;
        }
        let triplets = cols.iter().enumerate().flat_map(|(kc, &c)| {
            let row_pos = &row_pos;
            self.columns[c]
                .iter()
                .filter(move |(r, _)| row_pos[*r] != usize::MAX)
                .map(move |&(r, v)| (row_pos[r], kc, v))
        });
        OperatorMatrix::from_triplets(rows.len(), cols.len(), triplets)
    }

    /// Move entry `(r, c)` to `(row_map[r], col_map[c])` in a matrix of the
    /// given shape. Used to conjugate by permutation unitaries.
    pub fn relabel(&self, dim_target: usize, dim_source: usize, row_map: &[usize], col_map: &[usize]) -> Self {
        let mut out = OperatorMatrix::from_triplets(
            dim_target,
            dim_source,
            self.entries().map(|(r, c, v)| (row_map[r], col_map[c], v)),
        );
        out.boundary = self.boundary.iter().map(|&c| col_map[c]).collect();
        out
    }

    /// Block-diagonal `self ⊕ rhs`.
    pub fn direct_sum(&self, rhs: &OperatorMatrix) -> Self {
        let (t, s) = (self.dim_target, self.dim_source);
        let mut out = OperatorMatrix::from_triplets(
            t + rhs.dim_target,
            s + rhs.dim_source,
            self.entries().chain(rhs.entries().map(|(r, c, v)| (r + t, c + s, v))),
        );
        out.boundary = self.boundary.iter().copied().chain(rhs.boundary.iter().map(|c| c + s)).collect();
        out
    }

    /// The 2×2 block operator `[[a, b], [c, d]]` on a doubled space.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        let (t, s) = (a.dim_target, a.dim_source);
        for m in [b, c, d] {
            if m.dim_target != t || m.dim_source != s {
                return Err(Error::DimensionMismatch("block2x2 blocks differ in shape".into()));
            }
        }
        let triplets = a
            .entries()
            .chain(b.entries().map(|(r, k, v)| (r, k + s, v)))
            .chain(c.entries().map(|(r, k, v)| (r + t, k, v)))
            .chain(d.entries().map(|(r, k, v)| (r + t, k + s, v)));
        Ok(OperatorMatrix::from_triplets(2 * t, 2 * s, triplets))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim_target, self.dim_source);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.abs()).fold(0.0, f64::max)
    }

    /// Connected blocks of the nonzero pattern, as (rows, columns) pairs.
    /// Columns without entries form blocks with no rows.
    pub fn blocks(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let t = self.dim_target;
        let mut uf = UnionFind::new(t + self.dim_source);
        for (r, c, _) in self.entries() {
            uf.union(r, t + c);
        }
        let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for c in 0..self.dim_source {
            groups.entry(uf.find(t + c)).or_default().1.push(c);
        }
        let mut touched = vec![false; t];
        for (r, _, _) in self.entries() {
            touched[r] = true;
        }
        for r in (0..t).filter(|&r| touched[r]) {
            groups.entry(uf.find(r)).or_default().0.push(r);
        }
        groups.into_values().collect()
    }

    /// Singular values of every connected block, paired with the block's
    /// column count.
    fn block_singular_values(&self) -> Vec<(usize, Vec<f64>)> {
        self.blocks()
            .into_par_iter()
            .map(|(rows, cols)| {
                if rows.is_empty() {
                    return (cols.len(), Vec::new());
                }
                let dense = self.submatrix(&rows, &cols).to_dense();
                let sv = dense.svd(false, false).singular_values;
                (cols.len(), sv.iter().copied().collect())
            })
            .collect()
    }

    /// Operator (spectral) norm.
    pub fn operator_norm(&self) -> f64 {
        self.block_singular_values().into_iter().flat_map(|(_, sv)| sv).fold(0.0, f64::max)
    }

    /// Dimension of the numerical kernel: singular values below `threshold`
    /// (including columns with no entries) count as kernel directions.
    pub fn kernel_dimension(&self, threshold: f64) -> KernelReport {
        let mut report = KernelReport { dimension: 0, largest_below: 0.0, smallest_above: f64::INFINITY };
        for (ncols, sv) in self.block_singular_values() {
            let rank = sv.iter().filter(|&&s| s >= threshold).count();
            report.dimension += ncols - rank;
            for &s in &sv {
                if s < threshold {
                    report.largest_below = report.largest_below.max(s);
                } else {
                    report.smallest_above = report.smallest_above.min(s);
                }
            }
        }
        report
    }
}

/// Result of [`OperatorMatrix::kernel_dimension`].
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct KernelReport {
    pub dimension: usize,
    /// Largest singular value counted as zero (0 if none).
    pub largest_below: f64,
    /// Smallest singular value counted as nonzero (∞ if none).
    pub smallest_above: f64,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift(n: usize) -> OperatorMatrix {
        OperatorMatrix::from_triplets(n, n, (0..n - 1).map(|k| (k + 1, k, 1.0)))
    }

    #[test]
    fn compose_and_adjoint() {
        let s = shift(4);
        let ss = s.adjoint().compose(&s).unwrap();
        assert_eq!(ss.diagonal_values().unwrap(), vec![1.0, 1.0, 1.0, 0.0]);
        assert!(!s.is_diagonal());
        assert!(matches!(s.diagonal_values(), Err(Error::NotDiagonal)));
        assert!(s.compose(&OperatorMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn norm_matches_dense_svd() {
        let m =
            OperatorMatrix::from_triplets(5, 5, vec![(0, 0, 1.0), (1, 0, 2.0), (2, 3, -3.0), (4, 4, 0.5), (3, 1, 1.5)]);
        let dense = m.to_dense().svd(false, false).singular_values.max();
        assert!((m.operator_norm() - dense).abs() < 1e-12);
        assert_eq!(m.blocks().len(), 5);
    }

    #[test]
    fn kernel_counts_empty_columns() {
        let s = shift(4);
        // last column of the shift is empty
        assert_eq!(s.kernel_dimension(1e-8).dimension, 1);
        assert_eq!(s.adjoint().kernel_dimension(1e-8).dimension, 1);
        let d = OperatorMatrix::diagonal(&[1.0, 1e-12, 2.0]);
        let k = d.kernel_dimension(1e-6);
        assert_eq!(k.dimension, 1);
        assert_eq!(k.largest_below, 1e-12);
        assert_eq!(k.smallest_above, 1.0);
    }

    #[test]
    fn relabel_and_direct_sum() {
        let a = OperatorMatrix::diagonal(&[1.0, 2.0]);
        let b = OperatorMatrix::diagonal(&[3.0]);
        let s = a.direct_sum(&b);
        assert_eq!(s.diagonal_values().unwrap(), vec![1.0, 2.0, 3.0]);
        let p = s.relabel(3, 3, &[2, 0, 1], &[2, 0, 1]);
        assert_eq!(p.diagonal_values().unwrap(), vec![2.0, 3.0, 1.0]);
    }

    #[test]
    fn boundary_propagates_through_composition() {
        let a = OperatorMatrix::identity(3).with_boundary([2]);
        let b = shift(3);
        // b maps column 1 onto row 2, which is a boundary source of a
        assert_eq!(a.compose(&b).unwrap().boundary_ledger().iter().copied().collect::<Vec<_>>(), vec![1]);
    }
}
