//! Variances, least-squares fits and error bars.

use serde::{Deserialize, Serialize};

use crate::distribution::SpatialDistribution;
use crate::error::{Error, Result};

/// Normalisation tolerance accepted by [`variance`].
pub const NORMALISATION_TOLERANCE: f64 = 1e-9;
/// Largest accepted ratio of RMS residual to the fitted range of a log-linear fit.
pub const POOR_FIT_THRESHOLD: f64 = 0.02;

/// `sigma^2 = sum p s^2 - (sum p s)^2`.
pub fn variance(dist: &SpatialDistribution) -> Result<f64> {
    let total = dist.total();
    if (total - 1.0).abs() > NORMALISATION_TOLERANCE {
        return Err(Error::Unnormalized(total));
    }
    Ok(raw_variance(&dist.probabilities, dist.s0))
}

/// Variance without the normalisation check. Offsets are taken from `s0`
/// to keep the two moments small.
pub(crate) fn raw_variance(p: &[f64], s0: i64) -> f64 {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (i, &pi) in p.iter().enumerate() {
        let x = (i as i64 + 1 - s0) as f64;
        m1 += pi * x;
        m2 += pi * x * x;
    }
    (m2 - m1 * m1).max(0.0)
}

/// Mean variance at step `t` with its standard error across samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariancePoint {
    pub t: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Mean and standard error of the mean from running sums.
pub(crate) fn mean_stderr(sum: f64, sum_sq: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - sum * sum / nf) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

/// Ordinary least squares `y = slope x + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    /// Root-mean-square residual.
    pub residual_rms: f64,
    /// Inclusive range of `x` actually used.
    pub window: (f64, f64),
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("a line needs two points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let (slope_stderr, intercept_stderr) = if n > 2 {
        let s2 = ssr / (nf - 2.0);
        ((s2 / sxx).sqrt(), (s2 * (1.0 / nf + mx * mx / sxx)).sqrt())
    } else {
        (0.0, 0.0)
    };
    if !slope.is_finite() || !intercept.is_finite() {
        return Err(Error::InsufficientData("fit produced non-finite parameters".into()));
    }
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        slope_stderr,
        intercept_stderr,
        residual_rms: (ssr / nf).sqrt(),
        window: (lo, hi),
        points: n,
    })
}

impl FitResult {
    /// RMS residual relative to the span of the fitted line over the window.
    pub fn misfit_ratio(&self) -> f64 {
        let span = (self.slope * (self.window.1 - self.window.0)).abs();
        if span == 0.0 {
            if self.residual_rms == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.residual_rms / span
        }
    }
}

/// One-sided and averaged localisation lengths `xi = -1 / slope`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocLengthFit {
    pub left: FitResult,
    pub right: FitResult,
    pub xi_left: f64,
    pub xi_right: f64,
    pub xi: f64,
    pub xi_stderr: f64,
}

/// Default distance window `5 <= |s - s0| <= 0.8 t`.
pub fn default_xi_window(t: usize) -> (f64, f64) {
    (5.0, 0.8 * t as f64)
}

/// Fits `mean ln p` against `|s - s0|` separately on each side of `s0`.
///
/// `mean_ln_p` is indexed by `site - 1`; `None` and non-finite entries (parity
/// holes, sites that were ever exactly zero) are skipped.
pub fn loc_length_fit(mean_ln_p: &[Option<f64>], s0: i64, window: (f64, f64)) -> Result<LocLengthFit> {
    let side = |dir: i64| -> Result<(FitResult, f64, f64)> {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (i, v) in mean_ln_p.iter().enumerate() {
            let d = (i as i64 + 1 - s0) * dir;
            if d <= 0 || (d as f64) < window.0 || (d as f64) > window.1 {
                continue;
            }
            if let Some(y) = v.filter(|y| y.is_finite()) {
                xs.push(d as f64);
                ys.push(y);
            }
        }
        if xs.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "{} populated sites in window [{}, {}] on the {} side",
                xs.len(),
                window.0,
                window.1,
                if dir < 0 { "left" } else { "right" }
            )));
        }
        let fit = linear_fit(&xs, &ys)?;
        let ratio = fit.misfit_ratio();
        if ratio > POOR_FIT_THRESHOLD {
            return Err(Error::PoorFit { ratio, threshold: POOR_FIT_THRESHOLD });
        }
        if fit.slope >= 0.0 {
            return Err(Error::InsufficientData(format!("non-decaying tail, slope {}", fit.slope)));
        }
        let xi = -1.0 / fit.slope;
        let xi_err = fit.slope_stderr / (fit.slope * fit.slope);
        Ok((fit, xi, xi_err))
    };
    let (left, xi_left, el) = side(-1)?;
    let (right, xi_right, er) = side(1)?;
    Ok(LocLengthFit {
        left,
        right,
        xi_left,
        xi_right,
        xi: 0.5 * (xi_left + xi_right),
        xi_stderr: 0.5 * (el * el + er * er).sqrt(),
    })
}

/// `C(t') = amplitude * exp(-rate t')` by least squares on `ln C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub amplitude: f64,
    pub rate: f64,
    pub amplitude_stderr: f64,
    pub rate_stderr: f64,
    pub fit: FitResult,
}

pub fn exp_fit(series: &[(f64, f64)]) -> Result<ExpFit> {
    if series.len() < 3 {
        return Err(Error::InsufficientData(format!("exponential fit needs 3 points, got {}", series.len())));
    }
    if let Some(&(at, value)) = series.iter().find(|(_, c)| c.is_nan() || *c <= 0.0) {
        return Err(Error::NonPositive { at, value });
    }
    let x: Vec<f64> = series.iter().map(|p| p.0).collect();
    let y: Vec<f64> = series.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&x, &y)?;
    let amplitude = fit.intercept.exp();
    Ok(ExpFit {
        amplitude,
        rate: -fit.slope,
        amplitude_stderr: amplitude * fit.intercept_stderr,
        rate_stderr: fit.slope_stderr,
        fit,
    })
}

/// Log-log slope of `sigma^2(t)`: 2 ballistic, 1 diffusive, near 0 localised.
///
/// `window` bounds `t` inclusively; by default the last half of the series.
pub fn growth_exponent(series: &[VariancePoint], window: Option<(usize, usize)>) -> Result<FitResult> {
    let (lo, hi) = match window {
        Some(w) => w,
        None => {
            let last = series.iter().map(|p| p.t).max().unwrap_or(0);
            (last / 2, last)
        }
    };
    let pts: Vec<&VariancePoint> = series.iter().filter(|p| p.t >= lo && p.t <= hi && p.t > 0).collect();
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!("growth fit needs 5 points in [{lo}, {hi}], got {}", pts.len())));
    }
    if let Some(p) = pts.iter().find(|p| p.mean.is_nan() || p.mean <= 0.0) {
        return Err(Error::NonPositive { at: p.t as f64, value: p.mean });
    }
    let x: Vec<f64> = pts.iter().map(|p| (p.t as f64).ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.mean.ln()).collect();
    linear_fit(&x, &y)
}
