//! Enumerations of (compact, target) pairs driving the step-by-step builds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{outer_family, CompactSpec, DomainSpec};
use crate::num::Complex;
use crate::series::Polynomial;

/// `(re + i·im) / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussRat {
    pub re: i64,
    pub im: i64,
    pub den: u64,
}

impl GaussRat {
    pub fn int(re: i64, im: i64) -> Self {
        GaussRat { re, im, den: 1 }
    }

    pub fn to_complex(self, prec: u32) -> Complex {
        let d = rug::Float::with_val(prec, self.den);
        Complex::new(
            rug::Float::with_val(prec, self.re) / &d,
            rug::Float::with_val(prec, self.im) / &d,
        )
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imag = |im: i64| match im {
            1 => "i".to_string(),
            -1 => "-i".to_string(),
            _ => format!("{im}i"),
        };
        let body = match (self.re, self.im) {
            (re, 0) => re.to_string(),
            (0, im) => imag(im),
            (re, im) if im > 0 => format!("{re}+{}", imag(im)),
            (re, im) => format!("{re}{}", imag(im)),
        };
        match (self.den, self.im != 0 && self.re != 0) {
            (1, _) => write!(f, "{body}"),
            (d, true) => write!(f, "({body})/{d}"),
            (d, false) => write!(f, "{body}/{d}"),
        }
    }
}

fn parse_gauss(s: &str) -> std::result::Result<GaussRat, String> {
    let s = s.trim();
    let (body, den) = match s.rsplit_once('/') {
        Some((b, d)) => {
            let den: u64 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if den == 0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            (b.trim(), den)
        }
        None => (s, 1),
    };
    let body = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')).unwrap_or(body);
    let int = |t: &str| -> std::result::Result<i64, String> {
        match t {
            "" | "+" => Ok(1),
            "-" => Ok(-1),
            _ => t.parse().map_err(|_| format!("bad number {t:?} in {s:?}")),
        }
    };
    if body.is_empty() {
        return Err("empty coefficient".into());
    }
    let (re, im) = match body.strip_suffix('i') {
        None => (int(body)?, 0),
        Some("") => (0, 1),
        Some(rest) => match rest[1..].rfind(['+', '-']) {
            Some(pos) => (int(&rest[..pos + 1])?, int(&rest[pos + 1..])?),
            None => (0, int(rest)?),
        },
    };
    Ok(GaussRat { re, im, den })
}

/// Polynomial in `z` with Gaussian-rational coefficients, written
/// `poly:c0,c1,…` (for example `poly:0,1` is `z`, `poly:1+2i,1/3`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TargetPoly {
    pub coeffs: Vec<GaussRat>,
}

impl TargetPoly {
    pub fn to_polynomial(&self, prec: u32) -> Polynomial {
        Polynomial::new(
            Complex::zero(prec),
            self.coeffs.iter().map(|c| c.to_complex(prec)).collect(),
        )
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| c.re != 0 || c.im != 0).unwrap_or(0)
    }
}

impl fmt::Display for TargetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "poly:{}", parts.join(","))
    }
}

impl FromStr for TargetPoly {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let body = s
            .strip_prefix("poly:")
            .ok_or_else(|| format!("target {s:?} must start with \"poly:\""))?;
        let coeffs = body.split(',').map(parse_gauss).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(TargetPoly { coeffs })
    }
}

impl TryFrom<String> for TargetPoly {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<TargetPoly> for String {
    fn from(t: TargetPoly) -> String {
        t.to_string()
    }
}

fn level_count(h: u64) -> Option<u128> {
    let per = (2 * h as u128 + 1).pow(2) * h as u128;
    per.checked_pow(h as u32)
}

/// `j`-th (1-based) polynomial of the level enumeration: level `H` lists, in
/// mixed radix, every polynomial of degree `< H` whose coefficients have
/// numerators in `[−H, H]²` and denominators in `1..=H`. Repeats across
/// levels are allowed.
pub fn gaussian_polynomial(j: usize) -> Result<TargetPoly> {
    if j == 0 {
        return Err(Error::InvalidArgument("target index starts at 1".into()));
    }
    let mut rest = (j - 1) as u128;
    for h in 1u64.. {
        let count = level_count(h).expect("levels reached by usize indices fit in u128");
        if rest < count {
            let side = 2 * h as u128 + 1;
            // Numerators in the order 0, 1, −1, 2, −2, …
            let signed = |d: u128| -> i64 {
                let d = d as i64;
                if d % 2 == 1 {
                    (d + 1) / 2
                } else {
                    -d / 2
                }
            };
            let coeffs = (0..h)
                .map(|_| {
                    let den = (rest % h as u128) as u64 + 1;
                    rest /= h as u128;
                    let re = signed(rest % side);
                    rest /= side;
                    let im = signed(rest % side);
                    rest /= side;
                    GaussRat { re, im, den }
                })
                .collect();
            return Ok(TargetPoly { coeffs });
        }
        rest -= count;
    }
    unreachable!()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompactFamily {
    List(Vec<CompactSpec>),
    /// The outer schedule of disks around the closure of the domain.
    Outer(DomainSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetFamily {
    List(Vec<TargetPoly>),
    GaussianRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Repetition {
    /// Diagonal `d` lists pairs `1..=d` again, so every pair recurs.
    InfiniteRepeat,
    /// Step `n` handles pair `n` once.
    SinglePass,
}

/// What step `n` of a build handles.
#[derive(Clone, Debug, Serialize)]
pub struct Assignment {
    pub pair: usize,
    pub m: usize,
    pub j: usize,
    pub compact: CompactSpec,
    pub target: TargetPoly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetEnumeration {
    pub compacts: CompactFamily,
    pub targets: TargetFamily,
    pub repetition: Repetition,
}

impl TargetEnumeration {
    pub fn new(compacts: CompactFamily, targets: TargetFamily, repetition: Repetition) -> Self {
        TargetEnumeration {
            compacts,
            targets,
            repetition,
        }
    }

    fn compact_count(&self) -> Option<usize> {
        match &self.compacts {
            CompactFamily::List(v) => Some(v.len()),
            CompactFamily::Outer(_) => None,
        }
    }

    fn target_count(&self) -> Option<usize> {
        match &self.targets {
            TargetFamily::List(v) => Some(v.len()),
            TargetFamily::GaussianRational => None,
        }
    }

    /// Number of distinct pairs, `None` when infinite.
    pub fn pair_count(&self) -> Option<usize> {
        Some(self.compact_count()? * self.target_count()?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pair_count() == Some(0) {
            return Err(Error::InvalidArgument("enumeration has no pairs".into()));
        }
        if let CompactFamily::List(v) = &self.compacts {
            v.iter().try_for_each(CompactSpec::validate)?;
        }
        Ok(())
    }

    /// `(m, j)` of pair `t` (1-based): pairs are listed along the diagonals
    /// `m + j = const` with increasing `m`, skipping out-of-range entries.
    pub fn pair(&self, t: usize) -> Result<(usize, usize)> {
        if t == 0 {
            return Err(Error::InvalidArgument("pair index starts at 1".into()));
        }
        let (mc, jc) = (self.compact_count(), self.target_count());
        if self.pair_count().is_some_and(|n| t > n) {
            return Err(Error::InvalidArgument(format!("pair {t} out of range")));
        }
        let mut seen = 0;
        for s in 2.. {
            for m in 1..s {
                let j = s - m;
                if mc.is_some_and(|c| m > c) || jc.is_some_and(|c| j > c) {
                    continue;
                }
                seen += 1;
                if seen == t {
                    return Ok((m, j));
                }
            }
        }
        unreachable!()
    }

    /// Pair index handled at step `n` (1-based).
    pub fn pair_at_step(&self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::InvalidArgument("step index starts at 1".into()));
        }
        match self.repetition {
            Repetition::SinglePass => {
                if self.pair_count().is_some_and(|c| n > c) {
                    return Err(Error::InvalidArgument(format!("single-pass enumeration ends before step {n}")));
                }
                Ok(n)
            }
            Repetition::InfiniteRepeat => {
                let cap = self.pair_count().unwrap_or(usize::MAX);
                let mut rest = n;
                for d in 1.. {
                    let len = d.min(cap);
                    if rest <= len {
                        return Ok(rest);
                    }
                    rest -= len;
                }
                unreachable!()
            }
        }
    }

    pub fn compact(&self, m: usize) -> Result<CompactSpec> {
        match &self.compacts {
            CompactFamily::List(v) => v
                .get(m.wrapping_sub(1))
                .cloned()
                .ok_or_else(|| Error::InvalidArgument(format!("compact {m} out of range"))),
            CompactFamily::Outer(domain) => outer_family(domain, m),
        }
    }

    pub fn target(&self, j: usize) -> Result<TargetPoly> {
        match &self.targets {
            TargetFamily::List(v) => v
                .get(j.wrapping_sub(1))
                .cloned()
                .ok_or_else(|| Error::InvalidArgument(format!("target {j} out of range"))),
            TargetFamily::GaussianRational => gaussian_polynomial(j),
        }
    }

    pub fn step(&self, n: usize) -> Result<Assignment> {
        let pair = self.pair_at_step(n)?;
        let (m, j) = self.pair(pair)?;
        Ok(Assignment {
            pair,
            m,
            j,
            compact: self.compact(m)?,
            target: self.target(j)?,
        })
    }
}

/// Prefix length within which pair `t` first occurs under infinite repetition.
pub fn fairness_window(t: usize) -> usize {
    t * (t + 1) / 2
}
