use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walk::WalkGeometry;

/// Probability of finding the walker at each site after `t` steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialDistribution {
    pub t: usize,
    pub s0: i64,
    /// Indexed by `site - 1`.
    pub probabilities: Vec<f64>,
    /// Free-form provenance: engine, parameters, seed.
    pub metadata: BTreeMap<String, String>,
}

impl SpatialDistribution {
    pub fn new(geometry: &WalkGeometry, probabilities: Vec<f64>) -> Self {
        debug_assert_eq!(probabilities.len(), geometry.n);
        Self { t: geometry.t, s0: geometry.s0, probabilities, metadata: BTreeMap::new() }
    }

    /// Point mass at `site`.
    pub fn delta(geometry: &WalkGeometry, site: i64) -> Self {
        let mut p = vec![0.0; geometry.n];
        p[geometry.site_index(site)] = 1.0;
        Self::new(geometry, p)
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn n(&self) -> usize {
        self.probabilities.len()
    }

    pub fn get(&self, site: i64) -> f64 {
        let n = self.probabilities.len() as i64;
        self.probabilities[(site - 1).rem_euclid(n) as usize]
    }

    /// `(site, p)` pairs in site order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probabilities.iter().enumerate().map(|(i, &p)| (i as i64 + 1, p))
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Largest absolute difference to another distribution on the same lattice.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Total weight on sites with the wrong parity for `t` steps.
    pub fn parity_violation(&self) -> f64 {
        self.iter()
            .filter(|(s, _)| (s - self.s0 - self.t as i64).rem_euclid(2) != 0)
            .map(|(_, p)| p.abs())
            .sum()
    }
}

/// Distribution `W(m)` of the occupation of a single island.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationDistribution {
    support: Vec<(u32, f64)>,
}

impl OccupationDistribution {
    pub fn new(support: Vec<(u32, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidParameter("occupation distribution has empty support".into()));
        }
        if support.iter().any(|&(_, w)| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidParameter("occupation weights must be finite and >= 0".into()));
        }
        let total: f64 = support.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("occupation weights sum to {total}, not 1")));
        }
        Ok(Self { support })
    }

    /// Uniform over `lo..=hi`.
    pub fn uniform(lo: u32, hi: u32) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidParameter(format!("empty occupation range {lo}..={hi}")));
        }
        let w = 1.0 / (hi - lo + 1) as f64;
        Self::new((lo..=hi).map(|m| (m, w)).collect())
    }

    /// Every island holds exactly `m` anyons.
    pub fn fixed(m: u32) -> Self {
        Self { support: vec![(m, 1.0)] }
    }

    pub fn support(&self) -> &[(u32, f64)] {
        &self.support
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        if self.support.len() == 1 {
            return self.support[0].0;
        }
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for &(m, w) in &self.support {
            acc += w;
            if u < acc {
                return m;
            }
        }
        self.support.last().expect("support is non-empty").0
    }
}
