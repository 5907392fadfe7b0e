//! Finite-support distributions, iid block extensions and single-letter
//! information quantities. All logarithms are taken to the distribution's
//! base `K` (the code alphabet size).

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, entropy_term, log_base};

/// Default cap on the number of blocks materialized by [`IidSource::block_distribution`].
pub const DEFAULT_MAX_SUPPORT: usize = 1 << 20;

const SUM_TOL: f64 = 1e-9;

/// Probability assignment over an ordered, finite support.
///
/// Support order is canonical: downstream code breaks ties and orders
/// codebook members by support index.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    labels: Vec<String>,
    probs: Vec<f64>,
    base: usize,
}

impl Distribution {
    /// Builds a distribution, dropping zero-probability symbols and
    /// renormalizing. The input must sum to one within `1e-9`.
    pub fn new<S: Into<String>>(entries: Vec<(S, f64)>, base: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidInput(format!("logarithm base {base} < 2")));
        }
        let mut labels = Vec::with_capacity(entries.len());
        let mut probs = Vec::with_capacity(entries.len());
        let mut seen = std::collections::HashSet::new();
        for (label, p) in entries {
            let label = label.into();
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "probability {p} of `{label}` is not a finite non-negative number"
                )));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::InvalidInput(format!("duplicate symbol `{label}`")));
            }
            if p > 0.0 {
                labels.push(label);
                probs.push(p);
            }
        }
        if probs.is_empty() {
            return Err(Error::InvalidInput(
                "distribution has no positive mass".into(),
            ));
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        for p in &mut probs {
            *p /= total;
        }
        Ok(Self {
            labels,
            probs,
            base,
        })
    }

    /// Distribution with auto-generated labels `0, 1, ...`.
    pub fn from_probs(probs: &[f64], base: usize) -> Result<Self> {
        Self::new(
            probs
                .iter()
                .enumerate()
                .map(|(i, &p)| (i.to_string(), p))
                .collect(),
            base,
        )
    }

    pub fn uniform(m: usize, base: usize) -> Result<Self> {
        Self::from_probs(&vec![1.0 / m as f64; m], base)
    }

    /// Builds directly from already-normalized, strictly positive parts.
    fn from_parts(labels: Vec<String>, probs: Vec<f64>, base: usize) -> Self {
        debug_assert_eq!(labels.len(), probs.len());
        Self {
            labels,
            probs,
            base,
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, idx: usize) -> f64 {
        self.probs[idx]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, idx: usize) -> &str {
        &self.labels[idx]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownSymbol(label.to_string()))
    }

    /// Same probabilities, logarithms in a different base.
    pub fn with_base(&self, base: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidInput(format!("logarithm base {base} < 2")));
        }
        Ok(Self {
            base,
            ..self.clone()
        })
    }

    /// `log_K(1 / P(x))` for support index `idx`.
    pub fn self_information(&self, idx: usize) -> f64 {
        -log_base(self.probs[idx], self.base)
    }

    pub fn self_information_of(&self, label: &str) -> Result<f64> {
        Ok(self.self_information(self.index_of(label)?))
    }

    pub fn entropy(&self) -> f64 {
        compensated_sum(self.probs.iter().map(|&p| entropy_term(p, self.base)))
    }

    /// Variance of the self-information, `E[i(X)^2] - H^2`, computed as the
    /// centered second moment so that constant self-information gives exactly 0.
    pub fn varentropy(&self) -> f64 {
        let h = self.entropy();
        let v = compensated_sum(self.probs.iter().enumerate().map(|(i, &p)| {
            let d = self.self_information(i) - h;
            p * d * d
        }));
        if self.probs.iter().all(|&p| p == self.probs[0]) {
            0.0
        } else {
            v.max(0.0)
        }
    }

    /// Mass of a subset of support indices.
    pub fn mass_of(&self, set: &[usize]) -> f64 {
        compensated_sum(set.iter().map(|&i| self.probs[i]))
    }

    /// Restriction to `set`, renormalized. Returns the new distribution and
    /// the mass of `set` under `self`.
    pub fn conditional_on_set(&self, set: &[usize]) -> Result<(Distribution, f64)> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut idx: Vec<usize> = set.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.len()) {
            return Err(Error::InvalidInput(format!(
                "support index {bad} out of range"
            )));
        }
        let mass = self.mass_of(&idx);
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let probs = idx.iter().map(|&i| self.probs[i] / mass).collect();
        Ok((Distribution::from_parts(labels, probs, self.base), mass))
    }
}

impl fmt::Display for Distribution {
    /// Writes the plain-text distribution format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "K {}", self.base)?;
        for (l, p) in self.labels.iter().zip(&self.probs) {
            writeln!(f, "{l} {p:?}")?;
        }
        Ok(())
    }
}

/// Stationary memoryless source given by its single-letter distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct IidSource {
    single_letter: Distribution,
}

impl IidSource {
    pub fn new(single_letter: Distribution) -> Self {
        Self { single_letter }
    }

    pub fn bernoulli(p: f64, base: usize) -> Result<Self> {
        Ok(Self::new(Distribution::from_probs(&[p, 1.0 - p], base)?))
    }

    pub fn single_letter(&self) -> &Distribution {
        &self.single_letter
    }

    pub fn entropy(&self) -> f64 {
        self.single_letter.entropy()
    }

    pub fn varentropy(&self) -> f64 {
        self.single_letter.varentropy()
    }

    /// Distribution of `n`-blocks, in lexicographic order of letter-index tuples.
    ///
    /// Each block probability is the product of its letter probabilities taken
    /// in sorted letter order, so permutations of the same multiset get
    /// bit-identical probabilities.
    pub fn block_distribution(&self, n: usize, max_support: usize) -> Result<Distribution> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "block length must be at least 1".into(),
            ));
        }
        let m = self.single_letter.len();
        let size = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if size > max_support as u128 {
            return Err(Error::SupportBlowup {
                size,
                limit: max_support,
            });
        }
        let size = size as usize;
        let letters = &self.single_letter;
        let compact = letters.labels.iter().all(|l| l.chars().count() == 1);
        let mut labels = Vec::with_capacity(size);
        let mut probs = Vec::with_capacity(size);
        let mut tuple = vec![0usize; n];
        let mut sorted = vec![0usize; n];
        for _ in 0..size {
            sorted.copy_from_slice(&tuple);
            sorted.sort_unstable();
            let p = sorted.iter().fold(1.0, |acc, &i| acc * letters.probs[i]);
            let parts: Vec<&str> = tuple.iter().map(|&i| letters.labels[i].as_str()).collect();
            labels.push(if compact {
                parts.concat()
            } else {
                parts.join(",")
            });
            probs.push(p);
            // odometer increment, last position fastest
            for pos in (0..n).rev() {
                tuple[pos] += 1;
                if tuple[pos] < m {
                    break;
                }
                tuple[pos] = 0;
            }
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            for p in &mut probs {
                *p /= total;
            }
        }
        Ok(Distribution::from_parts(labels, probs, letters.base))
    }
}

/// Parses the plain-text distribution format: a `K <int>` header, then
/// `<symbol> <probability>` lines. Blank lines and `#` comments are ignored.
pub fn parse_distribution(text: &str) -> Result<Distribution> {
    let mut base: Option<usize> = None;
    let mut entries = Vec::new();
    let mut last_line = 1;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        last_line = lineno;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if base.is_none() {
            if fields.len() != 2 || fields[0] != "K" {
                return Err(Error::parse(lineno, "expected header `K <int>`"));
            }
            let k = fields[1]
                .parse::<usize>()
                .map_err(|_| Error::parse(lineno, "K must be an integer"))?;
            if k < 2 {
                return Err(Error::parse(lineno, "K must be at least 2"));
            }
            base = Some(k);
            continue;
        }
        if fields.len() != 2 {
            return Err(Error::parse(lineno, "expected `<symbol> <probability>`"));
        }
        let p = fields[1]
            .parse::<f64>()
            .map_err(|_| Error::parse(lineno, "probability must be a number"))?;
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::parse(lineno, "probability must be non-negative"));
        }
        if entries.iter().any(|(l, _): &(String, f64)| l == fields[0]) {
            return Err(Error::parse(
                lineno,
                format!("duplicate symbol `{}`", fields[0]),
            ));
        }
        entries.push((fields[0].to_string(), p));
    }
    let base = base.ok_or_else(|| Error::parse(last_line, "missing header"))?;
    Distribution::new(entries, base).map_err(|e| match e {
        Error::InvalidInput(m) => Error::parse(last_line, m),
        other => other,
    })
}
