//! One-dimensional chain of scatterers separated by random discrete phases.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{substream, REDUCTION_BLOCK};
use crate::stats::{linear_fit, mean_stderr};

/// Transmission (`t`, `t'`) and reflection (`r`, `r'`) amplitudes; unprimed
/// for a wave incident from the left, primed from the right.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    pub t: Complex64,
    pub r: Complex64,
    pub tp: Complex64,
    pub rp: Complex64,
}

impl Scatterer {
    pub fn new(t: Complex64, r: Complex64, tp: Complex64, rp: Complex64) -> Result<Self> {
        if t.norm_sqr() + r.norm_sqr() > 1.0 + 1e-12 || tp.norm_sqr() + rp.norm_sqr() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter("scatterer creates flux".into()));
        }
        if tp.norm() == 0.0 {
            return Err(Error::InvalidParameter("t' must be nonzero".into()));
        }
        Ok(Self { t, r, tp, rp })
    }

    /// The Hadamard coin read as a scatterer: `t = -1/sqrt2`, `t' = r = r' = 1/sqrt2`.
    pub fn balanced() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self { t: -h, r: h, tp: h, rp: h }
    }

    /// `S = [[r, t'], [t, r']]` is unitary.
    pub fn is_unitary(&self) -> bool {
        let cols = [(self.r, self.t), (self.tp, self.rp)];
        let norm0 = cols[0].0.norm_sqr() + cols[0].1.norm_sqr();
        let norm1 = cols[1].0.norm_sqr() + cols[1].1.norm_sqr();
        let dot = cols[0].0.conj() * cols[1].0 + cols[0].1.conj() * cols[1].1;
        (norm0 - 1.0).abs() < 1e-12 && (norm1 - 1.0).abs() < 1e-12 && dot.norm() < 1e-12
    }

    /// Transfer matrix taking `(right-moving, left-moving)` amplitudes across the scatterer.
    pub fn transfer(&self) -> [[Complex64; 2]; 2] {
        let inv = 1.0 / self.tp;
        [[self.t - self.r * self.rp * inv, self.rp * inv], [-self.r * inv, inv]]
    }
}

/// Amplitudes of the composite of scatterers `1..=n`.
pub type Block = Scatterer;

/// Appends `next` behind `left` after free propagation with phase `theta`.
pub fn compose_block(left: &Block, theta: f64, next: &Scatterer) -> Result<Block> {
    let e1 = Complex64::from_polar(1.0, theta);
    let e2 = e1 * e1;
    let loop_gain = next.r * left.rp * e2;
    if loop_gain.norm() >= 1.0 {
        return Err(Error::Divergent(loop_gain.norm()));
    }
    let inv_d = 1.0 / (1.0 - loop_gain);
    Ok(Block {
        t: left.t * e1 * next.t * inv_d,
        rp: next.rp + next.tp * e2 * left.rp * next.t * inv_d,
        r: left.r + left.tp * e2 * next.r * left.t * inv_d,
        tp: next.tp * e1 * left.tp * inv_d,
    })
}

fn mat_mul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut c = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Chain amplitudes from the product of transfer matrices; an independent
/// route to [`compose_block`].
pub fn transfer_chain(scatterers: &[Scatterer], thetas: &[f64]) -> Result<Block> {
    if scatterers.is_empty() || thetas.len() + 1 != scatterers.len() {
        return Err(Error::LengthMismatch { left: scatterers.len(), right: thetas.len() + 1 });
    }
    let mut m = scatterers[0].transfer();
    for (s, &theta) in scatterers[1..].iter().zip(thetas) {
        let p = [
            [Complex64::from_polar(1.0, theta), Complex64::default()],
            [Complex64::default(), Complex64::from_polar(1.0, -theta)],
        ];
        m = mat_mul(&s.transfer(), &mat_mul(&p, &m));
    }
    let [[m11, m12], [m21, m22]] = m;
    Ok(Block { t: m11 - m12 * m21 / m22, r: -m21 / m22, rp: m12 / m22, tp: 1.0 / m22 })
}

/// `prod_{m=1}^N (1 - C e^{2 pi i m / N})`, evaluated factor by factor.
pub fn cyclotomic_product(c: Complex64, n: u32) -> Complex64 {
    (1..=n).map(|m| 1.0 - c * Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64)).product()
}

/// `(1/N) sum_m ln|1 - C e^{2 pi i m/N}|^2 = (1/N) ln|1 - C^N|^2`.
pub fn cyclotomic_average(c: Complex64, n: u32) -> Result<f64> {
    if c.norm() > 1.0 {
        return Err(Error::InvalidParameter(format!("|C| = {} exceeds 1", c.norm())));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    Ok((1.0 - c.powu(n)).norm_sqr().ln() / n as f64)
}

/// Analytic bracket on the localisation length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum XiBounds {
    Applicable { lower: f64, upper: f64 },
    /// `|t|^N + |r|^N >= 1`; includes the semion case `N = 2` of the balanced coin.
    Inapplicable { reason: String },
}

/// `1 / ((2/N) ln(1 +- |r|^N) - ln|t|^2)`.
pub fn xi_bounds(t_abs: f64, r_abs: f64, n: u32) -> Result<XiBounds> {
    if n == 0 || !(0.0..=1.0).contains(&t_abs) || !(0.0..=1.0).contains(&r_abs) {
        return Err(Error::InvalidParameter(format!("bad bound inputs |t| = {t_abs}, |r| = {r_abs}, N = {n}")));
    }
    let nf = n as f64;
    let (tn, rn) = (t_abs.powf(nf), r_abs.powf(nf));
    if tn + rn >= 1.0 - 1e-15 {
        let reason = if n == 2 {
            format!("|t|^N + |r|^N = {} >= 1; N = 2 is the semion case, undecided by these bounds", tn + rn)
        } else {
            format!("|t|^N + |r|^N = {} >= 1", tn + rn)
        };
        return Ok(XiBounds::Inapplicable { reason });
    }
    let base = -(t_abs * t_abs).ln();
    let lower = 1.0 / (2.0 / nf * (1.0 + rn).ln() + base);
    let upper = 1.0 / (2.0 / nf * (1.0 - rn).ln() + base);
    Ok(XiBounds::Applicable { lower, upper })
}

/// Common limit of both bounds as `N -> infinity`: `-1 / ln|t|^2`.
pub fn xi_limit(t_abs: f64) -> f64 {
    -1.0 / (t_abs * t_abs).ln()
}

/// Uniform discrete phases `pi m / N`, `m = 0..N-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseEnsemble {
    pub n: u32,
}

impl PhaseEnsemble {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        Ok(Self { n })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        PI * rng.gen_range(0..self.n) as f64 / self.n as f64
    }
}

/// Monte Carlo estimate of the localisation length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalisationEstimate {
    pub n_max: usize,
    pub samples: usize,
    pub skip: usize,
    /// Fitted slope of `<ln|t_{1,n}|^2>` against `n`.
    pub slope: f64,
    pub slope_stderr: f64,
    pub xi_hat: f64,
    pub xi_stderr: f64,
    /// `(n, <ln|t_{1,n}|^2>, stderr)` for `n = 1..=n_max`.
    pub series: Vec<(usize, f64, f64)>,
}

/// Samples `samples` chains of `n_max` copies of `scatterer`, regresses the
/// mean log transmission over `n > skip` and reports `xi = -1 / slope`. The
/// slope error is the spread of per-chain slopes.
pub fn mc_localization_length(
    scatterer: &Scatterer,
    ensemble: &PhaseEnsemble,
    n_max: usize,
    samples: usize,
    skip: usize,
    seed: u64,
) -> Result<LocalisationEstimate> {
    if samples < 2 {
        return Err(Error::InvalidParameter("at least two samples are needed for an error bar".into()));
    }
    if n_max < skip + 3 {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} leaves fewer than 3 points after skipping {skip}")));
    }
    let xs: Vec<f64> = (skip + 1..=n_max).map(|n| n as f64).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();

    struct Partial {
        sum: Vec<f64>,
        sum_sq: Vec<f64>,
        slope: f64,
        slope_sq: f64,
    }
    let blocks: Vec<usize> = (0..samples).step_by(REDUCTION_BLOCK).collect();
    let partial: Vec<Result<Partial>> = blocks
        .par_iter()
        .map(|&start| {
            let mut p = Partial { sum: vec![0.0; n_max], sum_sq: vec![0.0; n_max], slope: 0.0, slope_sq: 0.0 };
            let mut series = vec![0.0; n_max];
            for i in start..(start + REDUCTION_BLOCK).min(samples) {
                let mut rng = substream(seed, i as u64);
                let mut block = *scatterer;
                series[0] = block.t.norm_sqr().ln();
                for v in series.iter_mut().skip(1) {
                    block = compose_block(&block, ensemble.sample(&mut rng), scatterer)?;
                    *v = block.t.norm_sqr().ln();
                }
                for (k, &v) in series.iter().enumerate() {
                    p.sum[k] += v;
                    p.sum_sq[k] += v * v;
                }
                let slope = xs.iter().zip(&series[skip..]).map(|(x, y)| (x - xm) * y).sum::<f64>() / sxx;
                p.slope += slope;
                p.slope_sq += slope * slope;
            }
            Ok(p)
        })
        .collect();
    let mut sum = vec![0.0; n_max];
    let mut sum_sq = vec![0.0; n_max];
    let (mut slope_sum, mut slope_sq) = (0.0, 0.0);
    for p in partial {
        let p = p?;
        for k in 0..n_max {
            sum[k] += p.sum[k];
            sum_sq[k] += p.sum_sq[k];
        }
        slope_sum += p.slope;
        slope_sq += p.slope_sq;
    }
    let series: Vec<(usize, f64, f64)> = (0..n_max)
        .map(|k| {
            let (m, e) = mean_stderr(sum[k], sum_sq[k], samples);
            (k + 1, m, e)
        })
        .collect();
    let ys: Vec<f64> = series[skip..].iter().map(|s| s.1).collect();
    let fit = linear_fit(&xs, &ys)?;
    let (_, slope_stderr) = mean_stderr(slope_sum, slope_sq, samples);
    let slope = fit.slope;
    let (xi_hat, xi_stderr) = if slope < 0.0 {
        (-1.0 / slope, slope_stderr / (slope * slope))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(LocalisationEstimate { n_max, samples, skip, slope, slope_stderr, xi_hat, xi_stderr, series })
}
