//! Exact sparse Gaussian elimination over `QScalar`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::qarith::QScalar;

type Row = BTreeMap<usize, QScalar>;

fn axpy(target: &mut Row, source: &Row, c: &QScalar) {
    for (k, v) in source {
        let e = target.entry(*k).or_insert_with(QScalar::zero);
        *e -= &(v * c);
        if e.is_zero() {
            target.remove(k);
        }
    }
}

/// Reduced row echelon form. Returns `(pivot column, row, rhs)` triples and
/// the leftover rows, which have no entries.
type Pivot = (usize, Row, QScalar);

fn rref(mut rows: Vec<(Row, QScalar)>) -> Result<(Vec<Pivot>, Vec<QScalar>)> {
    rows.retain(|(r, b)| !r.is_empty() || !b.is_zero());
    let mut pivots: Vec<Pivot> = Vec::new();
    // Sparsest row first keeps coefficient growth down.
    while let Some(best) = rows
        .iter()
        .enumerate()
        .filter(|(_, (r, _))| !r.is_empty())
        .min_by_key(|(_, (r, _))| (r.len(), *r.keys().next().unwrap()))
        .map(|(k, _)| k)
    {
        let (mut row, mut b) = rows.swap_remove(best);
        let (&col, lead) = row.iter().next().unwrap();
        let inv = lead.recip()?;
        for v in row.values_mut() {
            *v = &*v * &inv;
        }
        b = &b * &inv;
        for (other, ob) in rows.iter_mut() {
            if let Some(c) = other.get(&col).cloned() {
                axpy(other, &row, &c);
                *ob -= &(&b * &c);
            }
        }
        for (_, other, ob) in pivots.iter_mut() {
            if let Some(c) = other.get(&col).cloned() {
                axpy(other, &row, &c);
                *ob -= &(&b * &c);
            }
        }
        pivots.push((col, row, b));
    }
    Ok((pivots, rows.into_iter().map(|(_, b)| b).collect()))
}

/// Solve `rows · x = rhs` exactly. Entry `k` of the result is `Some` when the
/// system pins `x_k` uniquely.
pub fn solve_exact(rows: &[BTreeMap<usize, QScalar>], rhs: &[QScalar], nvars: usize) -> Result<Vec<Option<QScalar>>> {
    if rows.len() != rhs.len() {
        return Err(Error::DimensionMismatch(format!("{} rows, {} right-hand sides", rows.len(), rhs.len())));
    }
    let system = rows.iter().cloned().zip(rhs.iter().cloned()).collect();
    let (pivots, leftover) = rref(system)?;
    if leftover.iter().any(|b| !b.is_zero()) {
        return Err(Error::InconsistentSystem(format!("{} contradictory equations", leftover.len())));
    }
    let mut out = vec![None; nvars];
    for (col, row, b) in pivots {
        if row.len() == 1 {
            out[col] = Some(b);
        }
    }
    Ok(out)
}

/// Exact rank of a sparse matrix given by rows.
pub fn exact_rank(rows: &[BTreeMap<usize, QScalar>]) -> Result<usize> {
    let system = rows.iter().cloned().map(|r| (r, QScalar::zero())).collect();
    Ok(rref(system)?.0.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(entries: &[(usize, QScalar)]) -> Row {
        entries.iter().cloned().collect()
    }

    #[test]
    fn solves_small_system() {
        let q = QScalar::q();
        // x0 + q x1 = 1 + q², x1 = q
        let rows = vec![row(&[(0, QScalar::one()), (1, q.clone())]), row(&[(1, QScalar::one())])];
        let rhs = vec![&QScalar::one() + &(&q * &q), q.clone()];
        let x = solve_exact(&rows, &rhs, 3).unwrap();
        assert_eq!(x[0], Some(QScalar::one()));
        assert_eq!(x[1], Some(q));
        assert_eq!(x[2], None);
    }

    #[test]
    fn detects_inconsistency_and_rank() {
        let rows = vec![row(&[(0, QScalar::one())]), row(&[(0, QScalar::from_int(2))])];
        assert!(solve_exact(&rows, &[QScalar::one(), QScalar::one()], 1).is_err());
        assert_eq!(exact_rank(&rows).unwrap(), 1);
    }
}
