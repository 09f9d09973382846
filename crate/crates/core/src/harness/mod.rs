//! The verification suite: configuration, the catalogue of named checks and
//! deterministic report emission.

mod checks;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coordalg::{convention_hash, load_or_build_gs_basis, GsBasis};
use crate::decomp::Triple;
use crate::dlssvrep::dirac_dlssv;
use crate::error::{Error, Result};
use crate::gnsrep::{dirac_family, DiracSpectrum, EigenvalueModel, LevelSpectrum};
use crate::pwbasis::{BasisLabel, Truncation};
use crate::qarith::HalfInt;

pub use checks::{check_names, run_check};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const ENV_OUTPUT_DIR: &str = "SUQ2_OUTPUT_DIR";
pub const ENV_PRECISION: &str = "SUQ2_PRECISION";

/// Default tolerances. Slack factors multiply the rate they qualify.
pub const DEFAULT_TOLERANCES: [(&str, f64); 11] = [
    ("relations", 1e-10),
    ("mutation", 0.05),
    ("ideal_strong", 1.2),
    ("ideal_weak", 1.1),
    ("asymptotics", 2.0),
    ("oracle", 2.0),
    ("oracle_ratio", 1.3),
    ("haar", 1e-12),
    ("summability_cauchy", 1e-3),
    ("summability_divergence", 0.5),
    ("plateau", 0.01),
];

mod half_int_text {
    use super::HalfInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &HalfInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<HalfInt, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub q: f64,
    #[serde(with = "half_int_text")]
    pub nmax: HalfInt,
    /// Truncation of the symbolic Gram–Schmidt oracle.
    #[serde(with = "half_int_text")]
    pub oracle_nmax: HalfInt,
    /// Truncation for the checks done entirely in rational arithmetic.
    #[serde(with = "half_int_text")]
    pub exact_nmax: HalfInt,
    pub tolerances: BTreeMap<String, f64>,
    pub output_dir: PathBuf,
    /// Significant digits of reported values.
    pub precision: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            q: 0.5,
            nmax: HalfInt::from_int(6),
            oracle_nmax: HalfInt::from_int(3),
            exact_nmax: HalfInt::from_int(2),
            tolerances: DEFAULT_TOLERANCES.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            output_dir: PathBuf::from("suq2-out"),
            precision: 12,
            seed: 0,
        }
    }
}

impl SuiteConfig {
    /// Apply `SUQ2_OUTPUT_DIR` and `SUQ2_PRECISION`.
    pub fn with_env_overrides(mut self) -> Result<Self> {
        if let Ok(dir) = std::env::var(ENV_OUTPUT_DIR) {
            if !dir.is_empty() {
                self.output_dir = PathBuf::from(dir);
            }
        }
        if let Ok(p) = std::env::var(ENV_PRECISION) {
            self.precision = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("{ENV_PRECISION}={p} is not a digit count")))?;
        }
        Ok(self)
    }

    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.tolerances.contains_key(name) {
            let known: Vec<&str> = DEFAULT_TOLERANCES.iter().map(|t| t.0).collect();
            return Err(Error::InvalidConfig(format!("unknown tolerance '{name}' (known: {})", known.join(", "))));
        }
        self.tolerances.insert(name.to_string(), value);
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances
            .get(name)
            .copied()
            .or_else(|| DEFAULT_TOLERANCES.iter().find(|t| t.0 == name).map(|t| t.1))
            .unwrap_or(f64::NAN)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::InvalidConfig(format!("q = {} outside (0, 1)", self.q)));
        }
        if self.nmax < HalfInt::ZERO {
            return Err(Error::InvalidConfig(format!("nmax = {} is negative", self.nmax)));
        }
        if self.oracle_nmax < HalfInt::ZERO || self.oracle_nmax > self.nmax {
            return Err(Error::InvalidConfig(format!(
                "oracle_nmax = {} must lie in [0, nmax = {}]",
                self.oracle_nmax, self.nmax
            )));
        }
        if self.exact_nmax < HalfInt::ZERO || self.exact_nmax > self.oracle_nmax {
            return Err(Error::InvalidConfig(format!(
                "exact_nmax = {} must lie in [0, oracle_nmax = {}]",
                self.exact_nmax, self.oracle_nmax
            )));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidConfig(format!("tolerance {k} = {v} must be positive")));
        }
        if self.precision == 0 || self.precision > 17 {
            return Err(Error::InvalidConfig(format!("precision {} outside 1..=17", self.precision)));
        }
        Ok(())
    }

    pub fn truncation(&self) -> Result<Truncation> {
        Truncation::new(self.nmax)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Warn,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Warn => "warn",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub measured: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, f64>,
    pub detail: String,
    /// Wall time; kept out of serialized reports so that they are
    /// reproducible byte for byte.
    #[serde(skip)]
    pub runtime: Duration,
}

impl CheckRecord {
    pub fn new(name: &str) -> Self {
        CheckRecord {
            name: name.to_string(),
            status: Status::Pass,
            measured: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            detail: String::new(),
            runtime: Duration::ZERO,
        }
    }

    pub fn skipped(name: &str, why: &str) -> Self {
        CheckRecord { status: Status::Skipped, detail: format!("skipped: {why}"), ..CheckRecord::new(name) }
    }

    pub fn measure(mut self, key: impl Into<String>, value: f64) -> Self {
        self.measured.insert(key.into(), value);
        self
    }

    pub fn threshold(mut self, key: impl Into<String>, value: f64) -> Self {
        self.thresholds.insert(key.into(), value);
        self
    }

    pub fn detail(mut self, text: impl Into<String>) -> Self {
        self.detail = text.into();
        self
    }

    /// Downgrade to `status` unless already worse.
    pub fn demote(mut self, status: Status) -> Self {
        let rank = |s: Status| match s {
            Status::Skipped => 0,
            Status::Pass => 1,
            Status::Warn => 2,
            Status::Fail => 3,
        };
        if rank(status) > rank(self.status) {
            self.status = status;
        }
        self
    }

    pub fn require(self, ok: bool) -> Self {
        if ok {
            self
        } else {
            self.demote(Status::Fail)
        }
    }

    fn rounded(mut self, digits: usize) -> Self {
        let r = |v: &mut f64| *v = round_sig(*v, digits);
        self.measured.values_mut().for_each(r);
        self.thresholds.values_mut().for_each(r);
        self
    }
}

/// Round to `digits` significant digits.
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", digits.saturating_sub(1), v).parse().unwrap_or(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub convention_hash: String,
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One row per measured value and threshold.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(["check", "status", "kind", "quantity", "value"]).map_err(io)?;
        for c in &self.checks {
            let status = c.status.to_string();
            for (kind, map) in [("measured", &c.measured), ("threshold", &c.thresholds)] {
                for (k, v) in map {
                    w.write_record([c.name.as_str(), status.as_str(), kind, k.as_str(), v.to_string().as_str()])
                        .map_err(io)?;
                }
            }
            if c.measured.is_empty() && c.thresholds.is_empty() {
                w.write_record([c.name.as_str(), status.as_str(), "", "", ""]).map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Write `report.json` and `report.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join("report.json");
        let csv = dir.join("report.csv");
        std::fs::write(&json, self.to_json()?)?;
        std::fs::write(&csv, self.to_csv()?)?;
        Ok((json, csv))
    }
}

/// Shared inputs of the checks.
pub struct SuiteContext {
    pub config: SuiteConfig,
    pub truncation: Truncation,
    pub oracle: GsBasis,
    pub exact: GsBasis,
}

impl SuiteContext {
    pub fn new(config: SuiteConfig) -> Result<Self> {
        config.validate()?;
        let cache = config.output_dir.join("cache");
        std::fs::create_dir_all(&cache)?;
        let oracle = load_or_build_gs_basis(Truncation::new(config.oracle_nmax)?, &cache)?;
        let exact = load_or_build_gs_basis(Truncation::new(config.exact_nmax)?, &cache)?;
        Ok(SuiteContext { truncation: config.truncation()?, config, oracle, exact })
    }
}

/// Run every registered check (concurrently, reported in registry order)
/// and write the report files.
pub fn run_suite(config: SuiteConfig) -> Result<SuiteReport> {
    let report = evaluate_suite(config, &check_names())?;
    report.write(&report.config.output_dir)?;
    Ok(report)
}

/// Run the named checks without writing anything but the oracle cache.
pub fn evaluate_suite(config: SuiteConfig, names: &[&str]) -> Result<SuiteReport> {
    let ctx = SuiteContext::new(config)?;
    let digits = ctx.config.precision;
    let checks = names
        .par_iter()
        .map(|name| {
            let start = Instant::now();
            let mut rec = run_check(name, &ctx)?;
            rec.runtime = start.elapsed();
            Ok(rec.rounded(digits))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport {
        schema_version: REPORT_SCHEMA_VERSION,
        convention_hash: convention_hash(),
        config: ctx.config,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    #[serde(with = "half_int_text")]
    pub n: HalfInt,
    pub eigenvalue: f64,
    /// Counted on the truncated basis.
    pub multiplicity: u64,
    /// Closed-form value.
    pub expected: u64,
}

/// Eigenvalues of a triple's Dirac operator with counted and closed-form
/// multiplicities, level by level.
pub fn spectrum_table(triple: Triple, t: Truncation) -> Result<Vec<SpectrumRow>> {
    let (values, levels, spectrum) = match triple {
        Triple::Cp => {
            let b = crate::pwbasis::enumerate_pw(t);
            let m = EigenvalueModel::D1;
            (dirac_family(&m, t).diagonal_values()?, b.levels(), DiracSpectrum::Model(m))
        }
        Triple::Dlssv => {
            let b = crate::pwbasis::enumerate_dlssv(t);
            (dirac_dlssv(t).diagonal_values()?, b.iter().map(BasisLabel::level).collect(), DiracSpectrum::Dlssv)
        }
    };
    let mut rows = Vec::new();
    for n in t.levels() {
        for (lambda, expected) in spectrum.level(n) {
            let multiplicity = values.iter().zip(&levels).filter(|(v, l)| **l == n && **v == lambda).count() as u64;
            rows.push(SpectrumRow { n, eigenvalue: lambda, multiplicity, expected });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut c = SuiteConfig::default();
        assert!(c.validate().is_ok());
        c.q = 1.0;
        assert!(c.validate().is_err());
        let mut c = SuiteConfig { oracle_nmax: HalfInt::from_int(7), ..SuiteConfig::default() };
        assert!(c.validate().is_err());
        c.oracle_nmax = HalfInt::from_int(3);
        assert!(c.set_tolerance("relations", 1e-8).is_ok());
        assert!(c.set_tolerance("nonsense", 1.0).is_err());
        c.tolerances.insert("relations".into(), -1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = SuiteConfig { nmax: HalfInt::from_twice(7), ..SuiteConfig::default() };
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"nmax\":\"7/2\""), "{text}");
        assert_eq!(serde_json::from_str::<SuiteConfig>(&text).unwrap(), c);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.123456789, 3), 0.123);
        assert_eq!(round_sig(-98765.0, 2), -99000.0);
        assert_eq!(round_sig(0.0, 3), 0.0);
    }

    #[test]
    fn dlssv_spectrum_table() {
        let rows = spectrum_table(Triple::Dlssv, Truncation::from_twice(4).unwrap()).unwrap();
        assert!(rows.iter().all(|r| r.multiplicity == r.expected));
        assert_eq!((rows[0].eigenvalue, rows[0].multiplicity), (1.0, 2));
        let n1: Vec<(f64, u64)> =
            rows.iter().filter(|r| r.n == HalfInt::ONE).map(|r| (r.eigenvalue, r.multiplicity)).collect();
        assert_eq!(n1, vec![(3.0, 12), (-2.0, 6)]);
    }
}
