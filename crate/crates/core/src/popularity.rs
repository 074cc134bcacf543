//! Zipf popularity models for requests and cache placement.
//!
//! File ranks are 1-based everywhere in the public interface: rank 1 is the
//! most popular file.

use std::fmt;

use rand::Rng;

use crate::{Error, Result};

/// 1-based rank of a file in the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FileId(pub u32);

impl FileId {
    pub fn rank(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Generalized harmonic sum `sum_{j=a}^{b} j^(-gamma)`, summed exactly term by term.
pub fn harmonic_sum(gamma: f64, a: usize, b: usize) -> Result<f64> {
    if a == 0 {
        return Err(Error::InvalidParameter(
            "harmonic sum lower index must be >= 1".into(),
        ));
    }
    if a > b {
        return Err(Error::InvalidRange { a, b });
    }
    if !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "exponent must be finite, got {gamma}"
        )));
    }
    // smallest terms first
    Ok(compensated_sum(
        (a..=b).rev().map(|j| (j as f64).powf(-gamma)),
    ))
}

/// Zipf distribution over a library of `m` files.
///
/// Immutable after construction; share it freely between trial workers.
#[derive(Debug, Clone)]
pub struct PopularityModel {
    gamma: f64,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl PopularityModel {
    pub fn zipf(m: usize, gamma: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "library size m must be >= 1".into(),
            ));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Zipf exponent must be finite and non-negative, got {gamma}"
            )));
        }
        let norm = harmonic_sum(gamma, 1, m)?;
        let pmf: Vec<f64> = (1..=m).map(|i| (i as f64).powf(-gamma) / norm).collect();
        let mut cdf = Vec::with_capacity(m);
        let mut acc = 0.0;
        for p in &pmf {
            acc += p;
            cdf.push(acc);
        }
        Ok(Self { gamma, pmf, cdf })
    }

    pub fn m(&self) -> usize {
        self.pmf.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Probability masses indexed from 0 (entry 0 is rank 1).
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Probability of the file with the given 1-based rank.
    pub fn prob(&self, file: FileId) -> f64 {
        self.pmf[file.rank() - 1]
    }

    /// Draws a file by inverse CDF, `O(log m)` per draw.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> FileId {
        let total = *self.cdf.last().expect("non-empty library");
        let u = rng.gen::<f64>() * total;
        let idx = self
            .cdf
            .partition_point(|&c| c <= u)
            .min(self.pmf.len() - 1);
        FileId(idx as u32 + 1)
    }
}

/// Builds the Zipf model with `pmf[i] = i^(-gamma) / H(gamma, 1, m)`.
pub fn zipf_pmf(m: usize, gamma: f64) -> Result<PopularityModel> {
    PopularityModel::zipf(m, gamma)
}

/// `sum_{j=a}^{b} f_j p_j` for a request model `f` and a caching model `p`.
pub fn overlap_mass(
    requests: &PopularityModel,
    caches: &PopularityModel,
    a: usize,
    b: usize,
) -> Result<f64> {
    if requests.m() != caches.m() {
        return Err(Error::InvalidParameter(format!(
            "library sizes differ: {} vs {}",
            requests.m(),
            caches.m()
        )));
    }
    if a == 0 || b > requests.m() {
        return Err(Error::InvalidParameter(format!(
            "ranks must lie in [1, {}], got [{a}, {b}]",
            requests.m()
        )));
    }
    if a > b {
        return Err(Error::InvalidRange { a, b });
    }
    Ok(compensated_sum(
        (a..=b).map(|j| requests.pmf[j - 1] * caches.pmf[j - 1]),
    ))
}
