//! The named checks. Each one reads the shared context and returns a record;
//! library errors inside a check become a failing record, not an abort.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CheckRecord, Status, SuiteContext};
use crate::coordalg::{haar, haar_invariance_oracle, hopf_axioms, AlgebraElement, Functional, Generator};
use crate::decomp::{
    asymptotic_level_residual, check_dirac_intertwine, difference_blocks, index_pairing, oracle_blocks, DecayStatus,
    IdealWitness, Triple,
};
use crate::dlssvrep::{check_relations, dirac_dlssv, relation_residuals, CoeffKind, DlssvRepresentation, Mutation};
use crate::error::{Error, Result};
use crate::gnsrep::{
    check_dynamic_equivariance, check_structural_equivariance, commutator_norm, d1, d2, dirac_family, growth_bound,
    regular_action, regular_action_exact, sign_compact_diff, standard_functionals, summability_partial_sums,
    DiracSpectrum, EigenvalueModel, EquivarianceSide, GrowthBound, HatRepresentation, LevelSpectrum,
};
use crate::operator::OperatorMatrix;
use crate::pwbasis::{enumerate_dlssv, enumerate_pw, pw_dimension, Truncation};
use crate::qarith::{HalfInt, QScalar};

type CheckFn = fn(&str, &SuiteContext) -> Result<CheckRecord>;

const CHECKS: [(&str, CheckFn); 19] = [
    ("dimensions", dimensions),
    ("intertwine", intertwine),
    ("ideal_alpha_star", ideal_decay),
    ("ideal_beta", ideal_decay),
    ("asymptotics", asymptotics),
    ("oracle_alpha", oracle),
    ("oracle_beta", oracle),
    ("relations", relations),
    ("relations_mutation", relations_mutation),
    ("equivariance_dynamic", equivariance_dynamic),
    ("equivariance_structural", equivariance_structural),
    ("haar_projection", haar_projection),
    ("growth_bound", growth),
    ("sign_compactness", sign_compactness),
    ("summability_d1", summability),
    ("summability_dlssv", summability),
    ("index_pairing", index),
    ("hopf_exact", hopf_exact),
    ("commutator_plateau", commutator_plateau),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Run one check by name.
pub fn run_check(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let (_, f) = CHECKS
        .iter()
        .find(|c| c.0 == name)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown check '{name}' (known: {})", check_names().join(", "))))?;
    Ok(f(name, ctx).unwrap_or_else(|e| CheckRecord::new(name).demote(Status::Fail).detail(format!("error: {e}"))))
}

/// Keys sort by level: `norm[2n=03]`.
fn key(prefix: &str, n: HalfInt) -> String {
    format!("{prefix}[2n={:02}]", n.twice())
}

const INSUFFICIENT: &str = "insufficient levels";

fn dimensions(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let mut bad = Vec::new();
    for twice in 0..=ctx.truncation.nmax().twice() {
        let t = Truncation::from_twice(twice)?;
        let (pw, dl) = (enumerate_pw(t).len(), enumerate_dlssv(t).len());
        if dl != 2 * pw || pw != pw_dimension(t) {
            bad.push(format!("2n={twice}: pw {pw}, dlssv {dl}"));
        }
    }
    let t = ctx.truncation;
    Ok(CheckRecord::new(name)
        .measure("pw_dimension", enumerate_pw(t).len() as f64)
        .measure("dlssv_dimension", enumerate_dlssv(t).len() as f64)
        .measure("mismatches", bad.len() as f64)
        .threshold("mismatches", 0.0)
        .require(bad.is_empty())
        .detail(bad.join("; ")))
}

fn intertwine(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let r = check_dirac_intertwine(ctx.truncation)?;
    let shown: Vec<String> = r.mismatches.iter().take(5).map(|(a, b)| format!("{a} -> {b}")).collect();
    Ok(CheckRecord::new(name)
        .measure("mismatches", r.mismatches.len() as f64)
        .threshold("mismatches", 0.0)
        .require(r.holds)
        .detail(shown.join("; ")))
}

fn with_levels(mut rec: CheckRecord, w: &IdealWitness) -> CheckRecord {
    for &(n, v) in &w.levels {
        rec = rec.measure(key("norm", n), v);
    }
    rec
}

fn ideal_decay(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let g = if name == "ideal_beta" { Generator::Beta } else { Generator::AlphaStar };
    let q = ctx.config.q;
    let w = difference_blocks(g, ctx.truncation, q)?;
    let strong = q * q * ctx.config.tolerance("ideal_strong");
    let weak = q * ctx.config.tolerance("ideal_weak");
    let status = w.assess(strong, weak);
    if status == DecayStatus::Skipped {
        return Ok(CheckRecord::skipped(name, INSUFFICIENT));
    }
    let mut rec = CheckRecord::new(name).threshold("ratio_strong", strong).threshold("ratio_weak", weak);
    rec = with_levels(rec, &w);
    if let (Some(r), Some(c)) = (w.ratio, w.constant) {
        rec = rec.measure("ratio", r).measure("constant", c);
    }
    Ok(match status {
        DecayStatus::Pass => rec,
        DecayStatus::Warn => rec.demote(Status::Warn).detail("decay slower than q^2 but within the q bound"),
        _ => rec.demote(Status::Fail).detail("decay slower than q"),
    })
}

fn asymptotics(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let q = ctx.config.q;
    let slack = ctx.config.tolerance("asymptotics");
    let mut rec = CheckRecord::new(name).threshold("scaled", slack);
    let mut worst: f64 = 0.0;
    for kind in CoeffKind::ALL {
        let c = asymptotic_level_residual(kind, HalfInt::ONE, q)? / (q * q);
        rec = rec.measure(format!("{kind}:constant"), c);
        for twice in [4, 6] {
            let n = HalfInt::from_twice(twice);
            let r = asymptotic_level_residual(kind, n, q)?;
            let scaled = if c > 0.0 { r / (c * q.powi(twice)) } else { r };
            worst = worst.max(scaled);
            rec = rec.measure(key(&format!("{kind}:scaled"), n), scaled);
        }
    }
    Ok(rec.measure("scaled_max", worst).require(worst <= slack))
}

fn oracle(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    if ctx.oracle.truncation().nmax().twice() < 4 {
        return Ok(CheckRecord::skipped(name, INSUFFICIENT));
    }
    let g = if name == "oracle_beta" { Generator::Beta } else { Generator::Alpha };
    let q = ctx.config.q;
    let c = oracle_blocks(g, &ctx.oracle, q)?;
    let slack = ctx.config.tolerance("oracle");
    let ratio_bound = q * q * ctx.config.tolerance("oracle_ratio");
    let mut rec = with_levels(CheckRecord::new(name), &c.witness)
        .measure("calibration", c.calibration)
        .measure("scaled_max", c.max_scaled())
        .measure("sign_flips", c.flips as f64)
        .threshold("scaled", slack)
        .threshold("ratio", ratio_bound)
        .require(c.max_scaled() <= slack);
    if let Some(r) = c.witness.ratio {
        rec = rec.measure("ratio", r);
        if r > ratio_bound {
            rec = rec.demote(Status::Warn).detail("fitted ratio above the q^2 slack");
        }
    }
    Ok(rec)
}

fn relations(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    if ctx.truncation.nmax().twice() < 2 {
        return Ok(CheckRecord::skipped(name, INSUFFICIENT));
    }
    let r = check_relations(ctx.truncation, ctx.config.q)?;
    let tol = ctx.config.tolerance("relations");
    let mut rec = CheckRecord::new(name).threshold("residual", tol);
    for (k, v) in r.relations.iter().chain(&r.adjointness) {
        rec = rec.measure(k.clone(), *v);
    }
    Ok(rec.measure("max", r.max()).require(r.max() <= tol))
}

fn relations_mutation(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    if ctx.truncation.nmax().twice() < 4 {
        return Ok(CheckRecord::skipped(name, INSUFFICIENT));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed);
    let candidates = Mutation::candidates();
    let m = *candidates.choose(&mut rng).ok_or_else(|| Error::InvalidConfig("no mutation candidates".into()))?;
    let rep = DlssvRepresentation::with_mutation(ctx.truncation, ctx.config.q, Some(m))?;
    let r = relation_residuals(&rep, ctx.config.q)?;
    let floor = ctx.config.tolerance("mutation");
    Ok(CheckRecord::new(name)
        .measure("relation_residual", r.max_relation())
        .threshold("relation_residual_min", floor)
        .require(r.max_relation() > floor)
        .detail(format!("flipped {} entry ({}, {})", m.kind, m.row, m.col)))
}

fn models() -> [EigenvalueModel; 3] {
    [EigenvalueModel::D1, EigenvalueModel::D2, EigenvalueModel::left(1, -1.0, 0.0, 1.0, 2.0)]
}

fn model_name(m: &EigenvalueModel) -> String {
    format!("D({},{},{},{},{})", m.k, m.a, m.b, m.c, m.d)
}

fn equivariance_dynamic(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let gs = &ctx.exact;
    let fs = standard_functionals();
    let mut rec = CheckRecord::new(name).threshold("residual", 0.0);
    for m in models() {
        let d = dirac_family(&m, gs.truncation());
        let r = check_dynamic_equivariance(&d, EquivarianceSide::Left, gs, &fs, ctx.config.q)?;
        rec = rec.measure(format!("{}:residual", model_name(&m)), r.max_residual).require(r.exact_zero);
    }
    Ok(rec.measure("functionals", fs.len() as f64))
}

fn equivariance_structural(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    if ctx.truncation.nmax().twice() < 2 {
        return Ok(CheckRecord::skipped(name, INSUFFICIENT));
    }
    let t = ctx.truncation;
    let basis = enumerate_pw(t);
    let mut rec = CheckRecord::new(name);
    for m in models() {
        let d = dirac_family(&m, t);
        let left = check_structural_equivariance(&d, &basis, EquivarianceSide::Left);
        let right = check_structural_equivariance(&d, &basis, EquivarianceSide::Right);
        let label = model_name(&m);
        rec = rec
            .measure(format!("{label}:left"), f64::from(u8::from(left)))
            .measure(format!("{label}:right"), f64::from(u8::from(right)))
            .require(left && !right);
    }
    Ok(rec)
}

fn haar_projection(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let gs = &ctx.exact;
    let side = EquivarianceSide::Right;
    let uh = regular_action_exact(&Functional::Haar, side, gs)?;
    let idempotent = uh.compose(&uh)? == uh;
    let rank = uh.rank()?;
    let mut absorbs = 0usize;
    let fs = standard_functionals();
    for rho in &fs {
        let ur = regular_action_exact(rho, side, gs)?;
        let rho1 = rho.apply(&AlgebraElement::one());
        if uh.compose(&ur)? == uh.combine(&rho1, &uh, &QScalar::zero())? {
            absorbs += 1;
        }
    }
    let u = regular_action(&Functional::Haar, side, gs, ctx.config.q)?;
    let sym = u.sub(&u.adjoint())?.max_abs_entry();
    let idem = u.compose(&u)?.sub(&u)?.max_abs_entry();
    let tol = ctx.config.tolerance("haar");
    Ok(CheckRecord::new(name)
        .measure("exact_rank", rank as f64)
        .measure("exact_idempotent", f64::from(u8::from(idempotent)))
        .measure("absorbing_functionals", absorbs as f64)
        .measure("functionals", fs.len() as f64)
        .measure("numeric_asymmetry", sym)
        .measure("numeric_idempotency", idem)
        .threshold("numeric", tol)
        .require(idempotent && rank == 1 && absorbs == fs.len() && sym <= tol && idem <= tol))
}

fn growth(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let t = ctx.truncation;
    // level 0 has no j < n vectors; its increment must stay out of the trend window
    if t.nmax().twice() < 3 {
        return Ok(CheckRecord::skipped(name, INSUFFICIENT));
    }
    let basis = enumerate_pw(t);
    let (x, y) = (d2(t), d1(t));
    let pointwise = x.diagonal_values()?.iter().zip(y.diagonal_values()?).all(|(a, b)| a.abs() <= 1.0 + b.abs());
    let mut rec = CheckRecord::new(name).threshold("k1", 1.0).threshold("k2", 1.0);
    match growth_bound(&x, &y, &basis)? {
        GrowthBound::Feasible { k1, k2 } => {
            rec = rec.measure("k1", k1).measure("k2", k2).require(k1 == 1.0 && k2 == 1.0);
        }
        GrowthBound::Infeasible { k2, .. } => {
            rec = rec.measure("k2", k2).demote(Status::Fail).detail("no admissible k2");
        }
    }
    Ok(rec.measure("pointwise", f64::from(u8::from(pointwise))).require(pointwise))
}

fn sign_compactness(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let t = ctx.truncation;
    if t.nmax().twice() < 3 {
        return Ok(CheckRecord::skipped(name, INSUFFICIENT));
    }
    let basis = enumerate_pw(t);
    let base = d1(t);
    let same = sign_compact_diff(&base, &d2(t), &basis)?;
    let opposite = sign_compact_diff(&base, &base.scale(-1.0), &basis)?;
    // flip one eigenvalue on a level at least two half-steps below the top
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed);
    let lowest_top = t.nmax() - HalfInt::from_twice(3);
    let eligible: Vec<usize> = (0..basis.len()).filter(|&k| basis.labels()[k].n <= lowest_top).collect();
    let &k = eligible.choose(&mut rng).ok_or_else(|| Error::InvalidConfig("no eligible vector".into()))?;
    let mut v = base.diagonal_values()?;
    v[k] = -v[k];
    let flipped = sign_compact_diff(&base, &OperatorMatrix::diagonal(&v), &basis)?;
    let level = basis.labels()[k].n;
    Ok(CheckRecord::new(name)
        .measure("d1_d2_compact", f64::from(u8::from(same.compact)))
        .measure("flip_level", level.to_f64())
        .measure("flip_witness", flipped.witness.map_or(-1.0, HalfInt::to_f64))
        .measure("opposite_compact", f64::from(u8::from(opposite.compact)))
        .require(same.compact && same.witness.is_none())
        .require(flipped.compact && flipped.witness == Some(level))
        .require(!opposite.compact)
        .detail(format!("flipped {}", basis.labels()[k])))
}

/// Level at which the Cauchy increment is read off (`2n = 40`).
const SUMMABILITY_LEVEL: HalfInt = HalfInt::from_int(20);

fn summability(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let spectrum =
        if name == "summability_dlssv" { DiracSpectrum::Dlssv } else { DiracSpectrum::Model(EigenvalueModel::D1) };
    Ok(summability_record(
        name,
        &spectrum,
        ctx.config.tolerance("summability_cauchy"),
        ctx.config.tolerance("summability_divergence"),
    ))
}

pub(crate) fn summability_record(
    name: &str,
    spectrum: &impl LevelSpectrum,
    cauchy: f64,
    divergence: f64,
) -> CheckRecord {
    let s4 = summability_partial_sums(spectrum, 4.0, SUMMABILITY_LEVEL);
    let s2 = summability_partial_sums(spectrum, 2.0, SUMMABILITY_LEVEL);
    let inc4 = s4.last_increment().unwrap_or(f64::INFINITY);
    let min2 = s2.levels.iter().map(|l| l.1).fold(f64::INFINITY, f64::min);
    CheckRecord::new(name)
        .measure(key("s4_increment", SUMMABILITY_LEVEL), inc4)
        .measure("s4_partial_sum", s4.levels.last().map_or(0.0, |l| l.2))
        .measure("s2_min_increment", min2)
        .measure("s2_partial_sum", s2.levels.last().map_or(0.0, |l| l.2))
        .threshold("s4_increment", cauchy)
        .threshold("s2_increment_min", divergence)
        .require(inc4 < cauchy && min2 >= divergence)
}

pub(crate) const INDEX_THRESHOLDS: [f64; 3] = [1e-6, 1e-4, 1e-2];

fn index(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let t = ctx.truncation;
    if t.nmax().twice() < 2 {
        return Ok(CheckRecord::skipped(name, INSUFFICIENT));
    }
    let mut rec = CheckRecord::new(name).threshold("index_nonzero", 1.0);
    let mut values = Vec::new();
    for triple in [Triple::Cp, Triple::Dlssv] {
        let mut gap = f64::INFINITY;
        for th in INDEX_THRESHOLDS {
            let r = index_pairing(triple, t, ctx.config.q, th)?;
            gap = gap.min(r.gap);
            values.push(r.index);
            rec = rec.measure(format!("{triple}:index[threshold={th:e}]"), r.index as f64);
        }
        rec = rec.measure(format!("{triple}:gap"), gap);
    }
    let agreed = values.iter().all(|&v| v == values[0]);
    let magnitude = values[0].abs();
    let rec = rec.require(agreed && values[0] != 0);
    Ok(if magnitude == 1 { rec } else { rec.detail(format!("|index| = {magnitude}, expected 1")) })
}

fn hopf_exact(name: &str, _ctx: &SuiteContext) -> Result<CheckRecord> {
    let r = hopf_axioms(4);
    let oracle = haar_invariance_oracle(4)?;
    let haar_mismatch = oracle.iter().filter(|(m, v)| haar(&AlgebraElement::monomial(**m)) != **v).count();
    let failures = [&r.coassociativity, &r.counit, &r.homomorphism, &r.invariance];
    let mut detail: Vec<String> = failures.iter().flat_map(|f| f.iter().take(3).cloned()).collect();
    if haar_mismatch > 0 {
        detail.push(format!("{haar_mismatch} Haar values differ from the invariance solution"));
    }
    Ok(CheckRecord::new(name)
        .measure("monomials", r.monomials as f64)
        .measure("coassociativity_failures", r.coassociativity.len() as f64)
        .measure("counit_failures", r.counit.len() as f64)
        .measure("homomorphism_failures", r.homomorphism.len() as f64)
        .measure("invariance_failures", r.invariance.len() as f64)
        .measure("haar_oracle_mismatches", haar_mismatch as f64)
        .require(r.holds() && haar_mismatch == 0)
        .detail(detail.join("; ")))
}

fn plateau_norms(t: Truncation, q: f64) -> Result<(f64, f64)> {
    let hat = HatRepresentation::new(t, q)?;
    let a = hat.generator(Generator::Alpha);
    let all = vec![true; a.dim_source()];
    let cp = commutator_norm(&d1(t), a, &all)?;
    let dl = DlssvRepresentation::new(t, q)?;
    let b = dl.generator(Generator::Alpha);
    let all = vec![true; b.dim_source()];
    Ok((cp, commutator_norm(&dirac_dlssv(t), b, &all)?))
}

fn commutator_plateau(name: &str, ctx: &SuiteContext) -> Result<CheckRecord> {
    let t = ctx.truncation;
    if t.nmax().twice() < 2 {
        return Ok(CheckRecord::skipped(name, INSUFFICIENT));
    }
    let lower = Truncation::new(t.nmax() - HalfInt::ONE)?;
    let (cp0, dl0) = plateau_norms(lower, ctx.config.q)?;
    let (cp1, dl1) = plateau_norms(t, ctx.config.q)?;
    let rel = |a: f64, b: f64| (b - a).abs() / a.abs().max(f64::MIN_POSITIVE);
    let tol = ctx.config.tolerance("plateau");
    Ok(CheckRecord::new(name)
        .measure("cp_lower", cp0)
        .measure("cp_upper", cp1)
        .measure("cp_relative_change", rel(cp0, cp1))
        .measure("dlssv_lower", dl0)
        .measure("dlssv_upper", dl1)
        .measure("dlssv_relative_change", rel(dl0, dl1))
        .threshold("relative_change", tol)
        .require(rel(cp0, cp1) < tol && rel(dl0, dl1) < tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_mutation_breaks_the_relations() {
        let t = Truncation::from_twice(4).unwrap();
        for m in Mutation::candidates() {
            let rep = DlssvRepresentation::with_mutation(t, 0.5, Some(m)).unwrap();
            let r = relation_residuals(&rep, 0.5).unwrap();
            assert!(r.max_relation() > 0.05, "{m:?}: {}", r.max_relation());
        }
    }

    #[test]
    fn summability_records() {
        let d1 = summability_record("x", &DiracSpectrum::Model(EigenvalueModel::D1), 1e-3, 0.5);
        assert_eq!(d1.status, Status::Pass, "{d1:?}");
    }
}
