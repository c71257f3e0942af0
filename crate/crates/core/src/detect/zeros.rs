//! Lists of nontrivial zeros read from text files.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Zeros beta + i gamma sorted by |gamma|. When `paired` is set the list holds
/// only gamma > 0 and each zero stands for itself and its conjugate.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroList {
    pub zeros: Vec<(f64, f64)>,
    pub paired: bool,
    pub source: String,
}

impl ZeroList {
    pub fn new(mut zeros: Vec<(f64, f64)>, source: impl Into<String>) -> Result<Self> {
        for &(b, g) in &zeros {
            if !(b > 0.0 && b < 1.0) || !g.is_finite() {
                return Err(Error::DataIntegrity(format!("zero {b} + {g}i lies outside the critical strip")));
            }
        }
        zeros.sort_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
        let paired = zeros.iter().all(|z| z.1 > 0.0);
        Ok(Self {
            zeros,
            paired,
            source: source.into(),
        })
    }

    pub fn empty() -> Self {
        Self {
            zeros: Vec::new(),
            paired: true,
            source: "empty".into(),
        }
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn truncated(&self, count: usize) -> Self {
        Self {
            zeros: self.zeros[..count.min(self.zeros.len())].to_vec(),
            paired: self.paired,
            source: format!("{} (first {count})", self.source),
        }
    }

    /// Every zero as a complex number, conjugates included when paired.
    pub fn expanded(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.zeros.len() * 2);
        for &(b, g) in &self.zeros {
            out.push(Complex64::new(b, g));
            if self.paired {
                out.push(Complex64::new(b, -g));
            }
        }
        out
    }

    /// One ordinate per line (beta = 1/2) or "beta,gamma"; blank lines and
    /// '#' comments are skipped.
    pub fn parse(text: &str, source: impl Into<String>) -> Result<Self> {
        let mut zeros = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse { line: i + 1, message };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("'{s}': {e}")));
            let z = match fields.as_slice() {
                [g] => {
                    let g = num(g)?;
                    if !(g > 0.0) {
                        return Err(bad(format!("ordinate {g} must be positive")));
                    }
                    (0.5, g)
                }
                [b, g] => (num(b)?, num(g)?),
                _ => return Err(bad(format!("expected 'gamma' or 'beta,gamma', got '{line}'"))),
            };
            if !(z.0 > 0.0 && z.0 < 1.0) || !z.1.is_finite() {
                return Err(bad(format!("zero {} + {}i lies outside the critical strip", z.0, z.1)));
            }
            zeros.push(z);
        }
        Self::new(zeros, source)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.display().to_string())
    }
}

pub const POLE_DISTANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct ZeroSum {
    pub re: f64,
    pub im: f64,
    pub terms: usize,
    /// Heuristic bound for the omitted zeros from the zero-counting density
    /// (1/2pi) log(gamma/2pi); only defined for k >= 1 and paired lists.
    pub tail_estimate: Option<f64>,
}

/// sum over the listed zeros of (s - rho)^{-(k+1)}.
pub fn hadamard_zero_sum(zeros: &ZeroList, s: Complex64, k: u32) -> Result<ZeroSum> {
    let mut total = Complex64::new(0.0, 0.0);
    let all = zeros.expanded();
    for rho in &all {
        let d = s - rho;
        if d.norm() < POLE_DISTANCE {
            return Err(Error::Pole(format!("s = {s} is within {POLE_DISTANCE} of the zero {rho}")));
        }
        total += d.powi(-(k as i32 + 1));
    }
    let tail_estimate = match (zeros.zeros.last(), k) {
        (Some(&(_, g)), k) if k >= 1 && zeros.paired && g > 2.0 * std::f64::consts::PI => {
            let kf = f64::from(k);
            Some(g.powf(-kf) * ((g / (2.0 * std::f64::consts::PI)).ln() / kf + 1.0 / (kf * kf)) / std::f64::consts::PI)
        }
        _ => None,
    };
    Ok(ZeroSum {
        re: total.re,
        im: total.im,
        terms: all.len(),
        tail_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_forms() {
        let z = ZeroList::parse("# zeros\n14.134725\n\n0.7, -3.5  # synthetic\n", "t").unwrap();
        assert_eq!(z.zeros, vec![(0.7, -3.5), (0.5, 14.134725)]);
        assert!(!z.paired);
        assert!(matches!(ZeroList::parse("1.0\nx\n", "t"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn single_zero_sum() {
        let z = ZeroList::new(vec![(0.5, 0.0)], "t").unwrap();
        let z = ZeroList { paired: false, ..z };
        let s = hadamard_zero_sum(&z, Complex64::new(1.5, 0.0), 0).unwrap();
        assert!((s.re - 1.0).abs() < 1e-15 && s.im == 0.0);
        assert!(hadamard_zero_sum(&z, Complex64::new(0.5, 0.0), 0).is_err());
    }
}
