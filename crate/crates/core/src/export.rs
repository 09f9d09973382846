//! Named operators and their sparse text dump: a coordinate-format matrix
//! with a comment header recording the space, truncation, q and the
//! convention hash, followed by 1-based `row col value` triplets.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coordalg::{convention_hash, Generator};
use crate::decomp::{difference_operator, unitary_u};
use crate::dlssvrep::{dirac_dlssv, DlssvRepresentation};
use crate::error::{Error, Result};
use crate::gnsrep::{d1, d2, HatRepresentation};
use crate::operator::OperatorMatrix;
use crate::pwbasis::{enumerate_dlssv, enumerate_doubled, enumerate_pw, Truncation};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    /// `L₂(h)` in the Peter–Weyl basis.
    Pw,
    /// The sector space `⊕ W_n↑ ⊕ W_n↓`.
    Dlssv,
    /// `L₂(h) ⊕ L₂(h)` as the source of `U`.
    DoubledToDlssv,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Pw => "pw",
            Space::Dlssv => "dlssv",
            Space::DoubledToDlssv => "doubled->dlssv",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OperatorName {
    Hat(Generator),
    PiPrime(Generator),
    Difference(Generator),
    D1,
    D2,
    DiracDlssv,
    UnitaryU,
}

fn generator_suffix(g: Generator) -> &'static str {
    match g {
        Generator::Alpha => "alpha",
        Generator::Beta => "beta",
        Generator::AlphaStar => "alpha_star",
        Generator::BetaStar => "beta_star",
    }
}

impl OperatorName {
    pub fn all() -> Vec<OperatorName> {
        let mut out = Vec::new();
        for g in Generator::ALL {
            out.extend([OperatorName::Hat(g), OperatorName::PiPrime(g), OperatorName::Difference(g)]);
        }
        out.extend([OperatorName::D1, OperatorName::D2, OperatorName::DiracDlssv, OperatorName::UnitaryU]);
        out
    }

    pub fn space(self) -> Space {
        match self {
            OperatorName::Hat(_) | OperatorName::D1 | OperatorName::D2 => Space::Pw,
            OperatorName::PiPrime(_) | OperatorName::Difference(_) | OperatorName::DiracDlssv => Space::Dlssv,
            OperatorName::UnitaryU => Space::DoubledToDlssv,
        }
    }

    pub fn build(self, t: Truncation, q: f64) -> Result<OperatorMatrix> {
        Ok(match self {
            OperatorName::Hat(g) => HatRepresentation::new(t, q)?.generator(g).clone(),
            OperatorName::PiPrime(g) => DlssvRepresentation::new(t, q)?.generator(g).clone(),
            OperatorName::Difference(g) => difference_operator(g, t, q)?,
            OperatorName::D1 => d1(t),
            OperatorName::D2 => d2(t),
            OperatorName::DiracDlssv => dirac_dlssv(t),
            OperatorName::UnitaryU => unitary_u(t)?.operator(),
        })
    }
}

impl fmt::Display for OperatorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorName::Hat(g) => write!(f, "hat_{}", generator_suffix(*g)),
            OperatorName::PiPrime(g) => write!(f, "pi_prime_{}", generator_suffix(*g)),
            OperatorName::Difference(g) => write!(f, "diff_{}", generator_suffix(*g)),
            OperatorName::D1 => f.write_str("d1"),
            OperatorName::D2 => f.write_str("d2"),
            OperatorName::DiracDlssv => f.write_str("dirac_dlssv"),
            OperatorName::UnitaryU => f.write_str("unitary_u"),
        }
    }
}

impl FromStr for OperatorName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorName::all().into_iter().find(|n| n.to_string() == s).ok_or_else(|| {
            let names: Vec<String> = OperatorName::all().iter().map(ToString::to_string).collect();
            Error::Parse(format!("unknown operator '{s}' (known: {})", names.join(", ")))
        })
    }
}

fn labels(space: Space, t: Truncation) -> (Vec<String>, Vec<String>) {
    match space {
        Space::Pw => {
            let l: Vec<String> = enumerate_pw(t).iter().map(ToString::to_string).collect();
            (l.clone(), l)
        }
        Space::Dlssv => {
            let l: Vec<String> = enumerate_dlssv(t).iter().map(ToString::to_string).collect();
            (l.clone(), l)
        }
        Space::DoubledToDlssv => (
            enumerate_dlssv(t).iter().map(ToString::to_string).collect(),
            enumerate_doubled(t).iter().map(ToString::to_string).collect(),
        ),
    }
}

/// Sparse text for a named operator; values use `precision` significant
/// digits.
pub fn dump_operator(name: OperatorName, t: Truncation, q: f64, precision: usize) -> Result<String> {
    let m = name.build(t, q)?;
    let (rows, cols) = labels(name.space(), t);
    let mut out = String::new();
    let digits = precision.max(1) - 1;
    // writing to a String cannot fail
    let _ = writeln!(out, "%%MatrixMarket matrix coordinate real general");
    let _ = writeln!(out, "% operator: {name}");
    let _ = writeln!(out, "% space: {}", name.space());
    let _ = writeln!(out, "% nmax: {}", t.nmax());
    let _ = writeln!(out, "% q: {q}");
    let _ = writeln!(out, "% convention: {}", convention_hash());
    let _ = writeln!(out, "% boundary columns: {}", m.boundary_ledger().len());
    for (k, l) in rows.iter().enumerate() {
        let _ = writeln!(out, "% row {} {l}", k + 1);
    }
    if name.space() == Space::DoubledToDlssv {
        for (k, l) in cols.iter().enumerate() {
            let _ = writeln!(out, "% col {} {l}", k + 1);
        }
    }
    let mut entries: Vec<(usize, usize, f64)> = m.entries().collect();
    entries.sort_by_key(|e| (e.1, e.0));
    let _ = writeln!(out, "{} {} {}", m.dim_target(), m.dim_source(), entries.len());
    for (r, c, v) in entries {
        let _ = writeln!(out, "{} {} {v:.digits$e}", r + 1, c + 1);
    }
    Ok(out)
}

/// Parse the triplet section of a dump back into an operator.
pub fn parse_dump(text: &str) -> Result<OperatorMatrix> {
    let mut lines = text.lines().filter(|l| !l.starts_with('%') && !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad size line '{header}'"))))
        .collect::<Result<_>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(Error::Parse(format!("bad size line '{header}'")));
    };
    let mut triplets = Vec::with_capacity(nnz);
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("bad entry '{line}'"));
        let [r, c, v] = parts[..] else { return Err(bad()) };
        let r: usize = r.parse().map_err(|_| bad())?;
        let c: usize = c.parse().map_err(|_| bad())?;
        if r == 0 || c == 0 || r > rows || c > cols {
            return Err(bad());
        }
        triplets.push((r - 1, c - 1, v.parse::<f64>().map_err(|_| bad())?));
    }
    if triplets.len() != nnz {
        return Err(Error::Parse(format!("expected {nnz} entries, found {}", triplets.len())));
    }
    Ok(OperatorMatrix::from_triplets(rows, cols, triplets))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in OperatorName::all() {
            assert_eq!(n.to_string().parse::<OperatorName>().unwrap(), n);
        }
        assert!("pi_prime_gamma".parse::<OperatorName>().is_err());
    }

    #[test]
    fn dump_round_trips() {
        let t = Truncation::from_twice(2).unwrap();
        let text = dump_operator(OperatorName::PiPrime(Generator::Alpha), t, 0.5, 17).unwrap();
        assert!(text.starts_with("%%MatrixMarket"));
        assert!(text.contains("% convention: "));
        let back = parse_dump(&text).unwrap();
        let m = OperatorName::PiPrime(Generator::Alpha).build(t, 0.5).unwrap();
        assert!(back.sub(&m).unwrap().max_abs_entry() < 1e-15);
        let u = dump_operator(OperatorName::UnitaryU, t, 0.5, 6).unwrap();
        assert!(u.contains("% col 1 "));
    }
}
