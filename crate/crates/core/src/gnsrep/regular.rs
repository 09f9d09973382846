//! Regular actions `π(a)Ω ↦ π(convolve(ρ, a))Ω` and the equivariance checks
//! built on them. Matrices are exact in the unnormalized Gram–Schmidt basis.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dirac::EquivarianceSide;
use crate::coordalg::{convolve, exact_rank, AlgebraElement, Functional, GsBasis, Monomial, Side};
use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::pwbasis::PwBasis;
use crate::qarith::{HalfInt, QScalar};

/// Square matrix with exact entries, stored by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactOperator {
    dim: usize,
    columns: Vec<BTreeMap<usize, QScalar>>,
}

impl ExactOperator {
    pub fn from_columns(columns: Vec<BTreeMap<usize, QScalar>>) -> Result<Self> {
        let dim = columns.len();
        if columns.iter().flat_map(|c| c.keys()).any(|&r| r >= dim) {
            return Err(Error::DimensionMismatch("row index outside a square matrix".into()));
        }
        let columns = columns.into_iter().map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect()).collect();
        Ok(ExactOperator { dim, columns })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn columns(&self) -> &[BTreeMap<usize, QScalar>] {
        &self.columns
    }

    pub fn get(&self, row: usize, col: usize) -> QScalar {
        self.columns[col].get(&row).cloned().unwrap_or_else(QScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(BTreeMap::is_empty)
    }

    pub fn compose(&self, rhs: &ExactOperator) -> Result<ExactOperator> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(format!("compose {} with {}", self.dim, rhs.dim)));
        }
        let columns = rhs
            .columns
            .par_iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, QScalar> = BTreeMap::new();
                for (mid, v) in col {
                    for (r, w) in &self.columns[*mid] {
                        *acc.entry(*r).or_insert_with(QScalar::zero) += &(w * v);
                    }
                }
                acc
            })
            .collect();
        ExactOperator::from_columns(columns)
    }

    pub fn combine(&self, a: &QScalar, rhs: &ExactOperator, b: &QScalar) -> Result<ExactOperator> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(format!("add {} and {}", self.dim, rhs.dim)));
        }
        let columns = self
            .columns
            .iter()
            .zip(&rhs.columns)
            .map(|(x, y)| {
                let mut acc: BTreeMap<usize, QScalar> = x.iter().map(|(r, v)| (*r, v * a)).collect();
                for (r, v) in y {
                    *acc.entry(*r).or_insert_with(QScalar::zero) += &(v * b);
                }
                acc
            })
            .collect();
        ExactOperator::from_columns(columns)
    }

    pub fn rank(&self) -> Result<usize> {
        exact_rank(&self.columns)
    }

    /// Numeric matrix in the orthonormal basis, given the norms `‖f_k‖`.
    pub fn to_orthonormal(&self, norms: &[f64], q: f64) -> Result<OperatorMatrix> {
        let mut triplets = Vec::new();
        for (y, col) in self.columns.iter().enumerate() {
            for (&x, c) in col {
                triplets.push((x, y, c.evaluate(q)?.get() * norms[x] / norms[y]));
            }
        }
        Ok(OperatorMatrix::from_triplets(self.dim, self.dim, triplets))
    }
}

fn side_of(side: EquivarianceSide) -> Side {
    match side {
        EquivarianceSide::Left => Side::Left,
        EquivarianceSide::Right => Side::Right,
    }
}

/// Exact regular action of `ρ` in the f-basis. Convolution never raises the
/// degree, so an image outside the truncated span is an error.
pub fn regular_action_exact(rho: &Functional, side: EquivarianceSide, gs: &GsBasis) -> Result<ExactOperator> {
    let s = side_of(side);
    let (cols, _) = gs.coefficient_matrix(|f| convolve(rho, f, s), true)?;
    ExactOperator::from_columns(cols)
}

/// Regular action of `ρ` in the orthonormal basis at q.
pub fn regular_action(rho: &Functional, side: EquivarianceSide, gs: &GsBasis, q: f64) -> Result<OperatorMatrix> {
    regular_action_exact(rho, side, gs)?.to_orthonormal(&gs.norms_at(q)?, q)
}

/// Counit, Haar, and `h(x* ·)` for every monomial `x` of degree at most 2.
pub fn standard_functionals() -> Vec<Functional> {
    let mut out = vec![Functional::Counit, Functional::Haar];
    out.extend(Monomial::up_to_degree(2).into_iter().map(|m| Functional::InnerWith(AlgebraElement::monomial(m))));
    out
}

/// True iff `d` is diagonal with eigenvalues constant in `i` (left) or in
/// `j` (right) on every level.
pub fn check_structural_equivariance(d: &OperatorMatrix, basis: &PwBasis, side: EquivarianceSide) -> bool {
    let Ok(values) = d.diagonal_values() else {
        return false;
    };
    if values.len() != basis.len() {
        return false;
    }
    let mut seen: HashMap<(HalfInt, HalfInt), f64> = HashMap::new();
    basis.labels().iter().zip(values).all(|(l, v)| {
        let key = match side {
            EquivarianceSide::Left => (l.n, l.j),
            EquivarianceSide::Right => (l.n, l.i),
        };
        *seen.entry(key).or_insert(v) == v
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicEquivariance {
    /// Every commutator vanishes identically.
    pub exact_zero: bool,
    /// Largest interior-level commutator norm at the evaluation point.
    pub max_residual: f64,
    /// `(functional, exact zero, norm)` per functional.
    pub per_functional: Vec<(String, bool, f64)>,
}

/// Commutators `[D, u_ρ]` for diagonal `D` over a set of functionals. With
/// `D = diag(λ)` the f-basis entries are `(λ_x − λ_y)·c_xy`, so exactness
/// reduces to `λ_x = λ_y` wherever `c_xy ≠ 0`.
pub fn check_dynamic_equivariance(
    d: &OperatorMatrix,
    side: EquivarianceSide,
    gs: &GsBasis,
    functionals: &[Functional],
    q: f64,
) -> Result<DynamicEquivariance> {
    let lambda = d.diagonal_values()?;
    if lambda.len() != gs.len() {
        return Err(Error::DimensionMismatch(format!("{} eigenvalues for {} basis vectors", lambda.len(), gs.len())));
    }
    let norms = gs.norms_at(q)?;
    let mask = gs.basis().interior_mask();
    let per: Vec<(String, bool, f64)> = functionals
        .par_iter()
        .map(|rho| {
            let u = regular_action_exact(rho, side, gs)?;
            let mut exact = true;
            let mut triplets = Vec::new();
            for (y, col) in u.columns().iter().enumerate() {
                for (&x, c) in col {
                    let gap = lambda[x] - lambda[y];
                    if gap != 0.0 {
                        exact = false;
                        triplets.push((x, y, gap * c.evaluate(q)?.get() * norms[x] / norms[y]));
                    }
                }
            }
            let comm = OperatorMatrix::from_triplets(gs.len(), gs.len(), triplets).restrict(&mask, &mask);
            Ok((rho.to_string(), exact, comm.operator_norm()))
        })
        .collect::<Result<_>>()?;
    Ok(DynamicEquivariance {
        exact_zero: per.iter().all(|p| p.1),
        max_residual: per.iter().map(|p| p.2).fold(0.0, f64::max),
        per_functional: per,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordalg::{gs_basis, Generator};
    use crate::gnsrep::{d1, dirac_family, EigenvalueModel};
    use crate::pwbasis::{PwIndex, Truncation};
    use std::sync::OnceLock;

    const Q: f64 = 0.5;

    fn gs2() -> &'static GsBasis {
        static GS: OnceLock<GsBasis> = OnceLock::new();
        GS.get_or_init(|| gs_basis(Truncation::from_twice(4).unwrap()).unwrap())
    }

    #[test]
    fn counit_acts_as_identity() {
        for side in [EquivarianceSide::Left, EquivarianceSide::Right] {
            let u = regular_action(&Functional::Counit, side, gs2(), Q).unwrap();
            assert_eq!(u, OperatorMatrix::identity(gs2().len()));
        }
    }

    #[test]
    fn haar_gives_rank_one_projection() {
        let uh = regular_action_exact(&Functional::Haar, EquivarianceSide::Right, gs2()).unwrap();
        assert_eq!(uh.compose(&uh).unwrap(), uh);
        assert_eq!(uh.rank().unwrap(), 1);
        let rho = Functional::InnerWith(AlgebraElement::generator(Generator::Alpha));
        let ur = regular_action_exact(&rho, EquivarianceSide::Right, gs2()).unwrap();
        let rho1 = rho.apply(&AlgebraElement::one());
        assert_eq!(uh.compose(&ur).unwrap(), uh.combine(&rho1, &uh, &QScalar::zero()).unwrap());
    }

    #[test]
    fn structural_checks() {
        let t = gs2().truncation();
        let b = gs2().basis();
        assert!(check_structural_equivariance(&d1(t), b, EquivarianceSide::Left));
        assert!(!check_structural_equivariance(&d1(t), b, EquivarianceSide::Right));
        let id = OperatorMatrix::identity(b.len());
        assert!(check_structural_equivariance(&id, b, EquivarianceSide::Right));
    }

    #[test]
    fn left_models_commute_with_left_action() {
        let fs = standard_functionals();
        let t = gs2().truncation();
        for m in [EigenvalueModel::D1, EigenvalueModel::D2, EigenvalueModel::left(1, -1.0, 0.0, 1.0, 2.0)] {
            let r = check_dynamic_equivariance(&dirac_family(&m, t), EquivarianceSide::Left, gs2(), &fs, Q).unwrap();
            assert!(r.exact_zero, "{m:?}: {:?}", r.per_functional);
            assert_eq!(r.max_residual, 0.0);
        }
        let mut v = d1(t).diagonal_values().unwrap();
        let k = gs2().basis().index_of(&PwIndex::from_twice(2, 0, 0)).unwrap();
        v[k] += 0.5;
        let r =
            check_dynamic_equivariance(&OperatorMatrix::diagonal(&v), EquivarianceSide::Left, gs2(), &fs, Q).unwrap();
        assert!(!r.exact_zero);
        assert!(r.max_residual > 0.0);
    }
}
