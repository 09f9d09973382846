//! Peter–Weyl basis of the truncated GNS space by exact Gram–Schmidt.
//!
//! The monomials of a fixed bi-weight `(i, j)` form a chain
//! `α^{-(i+j)} β^{m0+r} β*^{l0+r}`, `r = 0, 1, ...`, of degree
//! `2·max(|i|,|j|) + 2r`. Orthogonalizing each chain in order of degree gives
//! vectors `f` with leading coefficient 1; the `r`-th one is labelled
//! `n = max(|i|,|j|) + r`. Everything is exact until `e = f / ‖f‖`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::hopf::inner;
use super::{AlgebraElement, Generator, Monomial};
use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::pwbasis::{enumerate_pw, PwBasis, PwIndex, Truncation};
use crate::qarith::{HalfInt, QScalar};

/// Conventions the basis depends on. Cached bases are keyed by its hash.
pub const CONVENTION: &str = "weights a=(-1/2,-1/2) b=(1/2,-1/2) stars negated; \
coproduct from u=((a,-q b*),(b,a*)); normal order a^k b^m b*^l; \
gram-schmidt by degree within bi-weight class, leading coefficient 1; \
haar h(b^m b*^m)=(1-q^2)/(1-q^(2m+2))";

const SCHEMA_VERSION: u32 = 1;

pub fn convention_hash() -> String {
    hex::encode(Sha256::digest(CONVENTION.as_bytes()))
}

/// Exact f-basis coefficients, one map per source column.
pub type ExactColumns = Vec<BTreeMap<usize, QScalar>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsVector {
    pub label: PwIndex,
    /// The monomial this vector adds to its class.
    pub leading: Monomial,
    /// Unnormalized vector `f`.
    pub element: AlgebraElement,
    /// `⟨f, f⟩`.
    pub norm_sq: QScalar,
}

type Class = (HalfInt, HalfInt);

pub struct GsBasis {
    basis: PwBasis,
    vectors: Vec<GsVector>,
    stars: Vec<AlgebraElement>,
    classes: HashMap<Class, Vec<usize>>,
}

fn class_monomial(i: HalfInt, j: HalfInt, r: u32) -> Monomial {
    let apow = -(i + j).to_int().expect("class weights share parity");
    let diff = (i - j).to_int().expect("class weights share parity");
    let (m0, l0) = (diff.max(0) as u32, (-diff).max(0) as u32);
    Monomial::new(apow, m0 + r, l0 + r)
}

fn orthogonalize_class(i: HalfInt, j: HalfInt, nmax: HalfInt) -> Result<Vec<GsVector>> {
    let n0 = i.abs().max(j.abs());
    let mut out: Vec<GsVector> = Vec::new();
    for (r, n) in HalfInt::range_inclusive(n0, nmax).enumerate() {
        let x = class_monomial(i, j, r as u32);
        let xe = AlgebraElement::monomial(x);
        let mut f = xe.clone();
        for prev in &out {
            let c = inner(&prev.element, &xe).checked_div(&prev.norm_sq)?;
            f.add_scaled(&prev.element, &-c);
        }
        let norm_sq = inner(&f, &f);
        if norm_sq.is_zero() {
            return Err(Error::SingularGram(format!("({i}, {j}) at degree {}", x.degree())));
        }
        out.push(GsVector { label: PwIndex { n, i, j }, leading: x, element: f, norm_sq });
    }
    Ok(out)
}

/// Build the basis for every label in the truncation.
pub fn gs_basis(t: Truncation) -> Result<GsBasis> {
    let nmax = t.nmax();
    let weights = || (-nmax.twice()..=nmax.twice()).map(HalfInt::from_twice);
    let classes: Vec<Class> =
        weights().flat_map(|i| weights().map(move |j| (i, j))).filter(|(i, j)| i.same_parity(*j)).collect();
    let vectors: Vec<GsVector> = classes
        .par_iter()
        .map(|&(i, j)| orthogonalize_class(i, j, nmax))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    GsBasis::assemble(t, vectors)
}

impl GsBasis {
    fn assemble(t: Truncation, vectors: Vec<GsVector>) -> Result<Self> {
        let basis = enumerate_pw(t);
        if vectors.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!("{} vectors for {} labels", vectors.len(), basis.len())));
        }
        let mut slots: Vec<Option<GsVector>> = vec![None; basis.len()];
        for v in vectors {
            let k = basis.index_of(&v.label)?;
            slots[k] = Some(v);
        }
        let vectors: Vec<GsVector> = slots
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| Error::InvalidLabel(format!("missing vector for {}", basis.labels()[k]))))
            .collect::<Result<_>>()?;
        let mut classes: HashMap<Class, Vec<usize>> = HashMap::new();
        for (k, v) in vectors.iter().enumerate() {
            classes.entry((v.label.i, v.label.j)).or_default().push(k);
        }
        let stars = vectors.iter().map(|v| v.element.star()).collect();
        Ok(GsBasis { basis, vectors, stars, classes })
    }

    pub fn truncation(&self) -> Truncation {
        self.basis.truncation()
    }

    pub fn basis(&self) -> &PwBasis {
        &self.basis
    }

    pub fn vectors(&self) -> &[GsVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `‖f_k‖` at a numeric q.
    pub fn norms_at(&self, q: f64) -> Result<Vec<f64>> {
        self.vectors.iter().map(|v| v.norm_sq.sqrt_at(q)).collect()
    }

    /// Expand `z` in the f-basis: `z ≈ Σ c_k f_k`. The flag reports whether
    /// the expansion is exact, i.e. `z` lies in the truncated span.
    pub fn expand(&self, z: &AlgebraElement) -> Result<(BTreeMap<usize, QScalar>, bool)> {
        let mut by_class: BTreeMap<Class, AlgebraElement> = BTreeMap::new();
        for (m, c) in z.terms() {
            by_class.entry(m.weight()).or_default().add_term(*m, c);
        }
        let mut coeffs = BTreeMap::new();
        let mut exact = true;
        for (class, part) in by_class {
            let Some(members) = self.classes.get(&class) else {
                exact = false;
                continue;
            };
            let mut residual = part.clone();
            for &k in members {
                let c =
                    super::hopf::haar(&self.stars[k].normal_multiply(&part)).checked_div(&self.vectors[k].norm_sq)?;
                if !c.is_zero() {
                    residual.add_scaled(&self.vectors[k].element, &-&c);
                    coeffs.insert(k, c);
                }
            }
            exact &= residual.is_zero();
        }
        Ok((coeffs, exact))
    }

    /// Exact matrix of a linear map in the f-basis, column by column.
    /// `strict` demands that every image stays inside the truncated span.
    pub fn coefficient_matrix(
        &self,
        map: impl Fn(&AlgebraElement) -> AlgebraElement + Sync,
        strict: bool,
    ) -> Result<(ExactColumns, Vec<usize>)> {
        let cols: Vec<(BTreeMap<usize, QScalar>, bool)> =
            self.vectors.par_iter().map(|v| self.expand(&map(&v.element))).collect::<Result<_>>()?;
        let mut clipped = Vec::new();
        for (k, (_, exact)) in cols.iter().enumerate() {
            if !exact {
                if strict {
                    return Err(Error::TruncationOverflow(format!("image of {}", self.basis.labels()[k])));
                }
                clipped.push(k);
            }
        }
        Ok((cols.into_iter().map(|(c, _)| c).collect(), clipped))
    }

    /// Convert f-basis coefficients to the orthonormal e-basis at q.
    pub fn to_numeric(&self, cols: &[BTreeMap<usize, QScalar>], q: f64) -> Result<OperatorMatrix> {
        let norms = self.norms_at(q)?;
        let mut triplets = Vec::new();
        for (y, col) in cols.iter().enumerate() {
            for (&x, c) in col {
                triplets.push((x, y, c.evaluate(q)?.get() * norms[x] / norms[y]));
            }
        }
        Ok(OperatorMatrix::from_triplets(self.len(), self.len(), triplets))
    }

    /// Exact left multiplication by a generator, in the f-basis.
    pub fn pi_exact_coefficients(&self, g: Generator) -> Result<(ExactColumns, Vec<usize>)> {
        let x = AlgebraElement::generator(g);
        self.coefficient_matrix(|f| x.normal_multiply(f), false)
    }

    /// Left multiplication by a generator in the orthonormal basis at q. Top
    /// level sources whose images leave the truncation are on the boundary.
    pub fn pi_exact(&self, g: Generator, q: f64) -> Result<OperatorMatrix> {
        let (cols, clipped) = self.pi_exact_coefficients(g)?;
        Ok(self.to_numeric(&cols, q)?.with_boundary(clipped))
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let doc = GsCache {
            schema_version: SCHEMA_VERSION,
            convention_hash: convention_hash(),
            nmax: self.truncation().nmax(),
            vectors: self.vectors.clone(),
        };
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_vec_pretty(&doc)?)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let doc: GsCache = serde_json::from_slice(&std::fs::read(path)?)?;
        if doc.schema_version != SCHEMA_VERSION || doc.convention_hash != convention_hash() {
            return Err(Error::InvalidConfig(format!("{} was written under other conventions", path.display())));
        }
        GsBasis::assemble(Truncation::new(doc.nmax)?, doc.vectors)
    }
}

#[derive(Serialize, Deserialize)]
struct GsCache {
    schema_version: u32,
    convention_hash: String,
    nmax: HalfInt,
    vectors: Vec<GsVector>,
}

/// Read the basis from `dir` if a matching cache file exists; otherwise build
/// it and write the cache.
pub fn load_or_build_gs_basis(t: Truncation, dir: &Path) -> Result<GsBasis> {
    let name = format!("gs_basis_{}_nmax{}.json", &convention_hash()[..12], t.nmax().twice());
    let path = dir.join(name);
    if path.exists() {
        if let Ok(b) = GsBasis::load_json(&path) {
            if b.truncation() == t {
                return Ok(b);
            }
        }
    }
    let b = gs_basis(t)?;
    std::fs::create_dir_all(dir)?;
    b.save_json(&path)?;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: f64 = 0.5;

    fn basis(twice: i32) -> GsBasis {
        gs_basis(Truncation::from_twice(twice).unwrap()).unwrap()
    }

    #[test]
    fn low_vectors() {
        let b = basis(2);
        assert_eq!(b.vectors()[0].element, AlgebraElement::one());
        let k = b.basis().index_of(&PwIndex::from_twice(1, -1, -1)).unwrap();
        assert_eq!(b.vectors()[k].element, AlgebraElement::generator(Generator::Alpha));
        let k = b.basis().index_of(&PwIndex::from_twice(1, 1, -1)).unwrap();
        assert_eq!(b.vectors()[k].element, AlgebraElement::generator(Generator::Beta));
    }

    #[test]
    fn exactly_orthogonal_and_numerically_orthonormal() {
        let b = basis(4);
        let norms = b.norms_at(Q).unwrap();
        for (x, vx) in b.vectors().iter().enumerate() {
            for (y, vy) in b.vectors().iter().enumerate() {
                let g = inner(&vx.element, &vy.element);
                if x != y {
                    assert!(g.is_zero(), "{} vs {}", vx.label, vy.label);
                } else {
                    let v = g.evaluate(Q).unwrap().get() / (norms[x] * norms[y]);
                    assert!((v - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pi_exact_on_vacuum() {
        let b = basis(2);
        let a = b.pi_exact(Generator::Alpha, Q).unwrap();
        let col = a.column(0);
        assert_eq!(col.len(), 1);
        let target = b.basis().index_of(&PwIndex::from_twice(1, -1, -1)).unwrap();
        assert_eq!(col[0].0, target);
        let expected = Q / (1.0 + Q * Q).sqrt();
        assert!((col[0].1 - expected).abs() < 1e-14);
        let bt = b.pi_exact(Generator::Beta, Q).unwrap();
        let target = b.basis().index_of(&PwIndex::from_twice(1, 1, -1)).unwrap();
        let expected = ((1.0 - Q * Q) / (1.0 - Q.powi(4))).sqrt();
        assert!((bt.get(target, 0) - expected).abs() < 1e-14);
    }

    #[test]
    fn pi_exact_is_isometric_on_interior() {
        let b = basis(4);
        let t = b.truncation();
        let a = b.pi_exact(Generator::Alpha, Q).unwrap();
        let bt = b.pi_exact(Generator::Beta, Q).unwrap();
        let sum = a.adjoint().compose(&a).unwrap().add(&bt.adjoint().compose(&bt).unwrap()).unwrap();
        for (k, label) in b.basis().labels().iter().enumerate() {
            if t.is_interior(label.n) {
                for &(r, v) in sum.column(k) {
                    let expected = if r == k { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-10, "{label}");
                }
            }
        }
        assert!(!a.boundary_ledger().is_empty());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = Truncation::from_twice(2).unwrap();
        let built = load_or_build_gs_basis(t, dir.path()).unwrap();
        let loaded = load_or_build_gs_basis(t, dir.path()).unwrap();
        assert_eq!(built.vectors(), loaded.vectors());
    }
}
