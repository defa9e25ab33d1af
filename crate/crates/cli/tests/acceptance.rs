//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the criteria execute in
//! order and print their measurements. Criteria listed in `KNOWN_FAILURES`
//! are still evaluated at full tolerance and reported as FAIL; only an
//! unexpected failure makes the target exit nonzero.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, LN_2, TAU};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use anyonwalk::abelian;
use anyonwalk::ising::{self, ising_trace_formula, t_coefficient, t_coefficient_brute, TauMatrix};
use anyonwalk::scattering::{self, cyclotomic_product, PhaseEnsemble, Scatterer, XiBounds};
use anyonwalk::seed::substream;
use anyonwalk::stats::{self, VariancePoint};
use anyonwalk::topo::invariants::fusion_trace_oracle;
use anyonwalk::topo::triple::TripleCache;
use anyonwalk::walk::{enumerate_path_pairs, linking_profile, LinkingProfile};
use anyonwalk::{AbelianStatistics, BracketConvention, IslandConfig, OccupationDistribution, PathPair, WalkGeometry};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

/// Criteria that cannot be met as stated, with the measured reason.
const KNOWN_FAILURES: &[(u32, &str)] = &[
    (
        1,
        "at t = 600 the mean log profile is still curved near the start site; the default window \
         5 <= d <= 0.8 t gives xi about 1.60, and the same fit at t = 1000 falls inside the band",
    ),
    (
        5,
        "the closed form omits the sign between two anyons on the same island; with m_s = 2 and \
         l_s / 2 odd the bracket gives the opposite sign (400 of 20760 cases at t = 5, 6), and \
         replacing m_s by m_s^2 in the phase exponent matches the bracket everywhere",
    ),
];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

type Outcome = Result<Verdict, Box<dyn std::error::Error>>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn conv() -> BracketConvention {
    BracketConvention::calibrated().expect("bracket root calibrates")
}

fn all_pairs(t: usize, s0: i64) -> Vec<PathPair> {
    (s0 - t as i64..=s0 + t as i64)
        .step_by(2)
        .flat_map(|target| enumerate_path_pairs(t, target, s0).expect("valid t").collect::<Vec<_>>())
        .collect()
}

fn criterion_1() -> Outcome {
    let g = WalkGeometry::new(1301, 600)?;
    let stats = AbelianStatistics::new(8, 1)?;
    let mc = abelian::averaged_distribution_mc(&stats, &OccupationDistribution::uniform(1, 8)?, 500, 7, &g)?;
    let ratio = mc.variance[599].mean / mc.variance[299].mean;
    let window = stats::default_xi_window(g.t);
    let (lo, hi) = (1.412 - 0.1, 1.477 + 0.1);
    let fit = stats::loc_length_fit(&mc.mean_ln_p, g.s0, window)?;
    let far = stats::loc_length_fit(&mc.mean_ln_p, g.s0, (0.4 * g.t as f64, 0.8 * g.t as f64))?;
    let ratio_ok = (0.8..=1.25).contains(&ratio);
    let xi_ok = (lo..=hi).contains(&fit.xi);
    Ok(verdict(
        ratio_ok && xi_ok,
        format!(
            "sigma^2(600)/sigma^2(300) = {ratio:.4} [{}]; xi over d in [{}, {}] = {:.4} +- {:.4} \
             (left {:.4}, right {:.4}) vs [{lo:.3}, {hi:.3}] [{}]; far-tail diagnostic xi over [{}, {}] = {:.4}",
            if ratio_ok { "ok" } else { "out" },
            window.0,
            window.1,
            fit.xi,
            fit.xi_stderr,
            fit.xi_left,
            fit.xi_right,
            if xi_ok { "ok" } else { "out" },
            0.4 * g.t as f64,
            0.8 * g.t as f64,
            far.xi,
        ),
    ))
}

fn criterion_2() -> Outcome {
    let g = WalkGeometry::new(401, 200)?;
    let fermions = AbelianStatistics::fermions();
    let empty = abelian::fixed_config_distribution_statevec(&IslandConfig::empty(g.n), &fermions, &g)?;
    let mc = abelian::averaged_distribution_mc(&fermions, &OccupationDistribution::uniform(1, 8)?, 32, 2, &g)?;
    let mut worst = mc.distribution.max_abs_diff(&empty);
    for k in 0..8 {
        let config = IslandConfig::random(g.n, &OccupationDistribution::uniform(0, 16)?, &mut substream(20, k));
        let d = abelian::fixed_config_distribution_statevec(&config, &fermions, &g)?;
        worst = worst.max(d.max_abs_diff(&empty));
    }
    let exponent = stats::growth_exponent(&mc.variance, None)?.slope;
    Ok(verdict(
        worst < 1e-12 && (exponent - 2.0).abs() <= 0.05,
        format!("max |dp| = {worst:.2e}; growth exponent = {exponent:.4}"),
    ))
}

fn criterion_3() -> Outcome {
    let occ = OccupationDistribution::uniform(0, 8)?;
    let mut items = Vec::new();
    for n in [2u32, 4, 8] {
        for k in 0..50u64 {
            items.push((n, k));
        }
    }
    let worst = items
        .par_iter()
        .map(|&(n, k)| -> anyonwalk::Result<f64> {
            let stats = AbelianStatistics::new(n, 1)?;
            let mut worst: f64 = 0.0;
            let full = WalkGeometry::minimal(10);
            let config = IslandConfig::random(full.n, &occ, &mut substream(30 + n as u64, k));
            for t in 1..=10 {
                let g = full.with_steps(t)?;
                let a = abelian::fixed_config_distribution_pathsum(&config, &stats, &g, 14)?;
                let b = abelian::fixed_config_distribution_statevec(&config, &stats, &g)?;
                worst = worst.max(a.max_abs_diff(&b));
            }
            Ok(worst)
        })
        .collect::<anyonwalk::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(verdict(worst < 1e-12, format!("150 configurations x t = 1..10; max |dp| = {worst:.2e}")))
}

fn criterion_4() -> Outcome {
    let stats = AbelianStatistics::new(8, 1)?;
    let occ = OccupationDistribution::uniform(1, 8)?;
    let mut worst_z: f64 = 0.0;
    let mut pass = true;
    let mut sites = 0;
    for t in [4usize, 7, 10] {
        let g = WalkGeometry::minimal(t);
        let exact = abelian::averaged_distribution_exact(&stats, &g, 14)?;
        let mc = abelian::averaged_distribution_mc(&stats, &occ, 10_000, 40 + t as u64, &g)?;
        for (i, (&pe, &pm)) in exact.probabilities.iter().zip(&mc.distribution.probabilities).enumerate() {
            let err = mc.stderr[i];
            let diff = (pe - pm).abs();
            if err > 0.0 {
                worst_z = worst_z.max(diff / err);
                pass &= diff <= 3.0 * err;
                sites += 1;
            } else {
                pass &= diff < 1e-12;
            }
        }
    }
    Ok(verdict(pass, format!("t in {{4, 7, 10}}, {sites} sampled sites; worst |exact - mc| / stderr = {worst_z:.3}")))
}

/// Diagnostic variant of the closed form whose phase is `(-i)^{sum (l/2) m^2}`.
/// The extra `(l/2) m(m-1)` quarter turns are the pairwise sign between two
/// anyons sharing an island.
fn squared_occupation_trace(profile: &LinkingProfile, config: &IslandConfig, f: &ising::IsingTrace) -> Complex64 {
    if f.vanishing {
        return Complex64::new(0.0, 0.0);
    }
    let quarter: i64 = profile
        .links()
        .iter()
        .zip(config.as_slice())
        .filter(|(_, &m)| m > 0)
        .map(|(&l, &m)| (l / 2) * (m as i64) * (m as i64))
        .sum();
    Complex64::new(0.0, -1.0).powi(quarter.rem_euclid(4) as i32) * f.tau_sign as f64
}

fn criterion_5() -> Outcome {
    let conv = conv();
    let occ = OccupationDistribution::uniform(0, 2)?;
    let mut pairs_checked = 0usize;
    let (mut worst, mut worst_sq) = (0.0f64, 0.0f64);
    let mut modulus_ok = true;
    for t in 1..=6 {
        let g = WalkGeometry::minimal(t);
        let pairs = all_pairs(t, g.s0);
        let configs: Vec<IslandConfig> =
            (0..30).map(|k| IslandConfig::random(g.n, &occ, &mut substream(50 + t as u64, k))).collect();
        let (w, ws, ok) = pairs
            .par_iter()
            .map_init(
                || TripleCache::new(conv),
                |cache, p| -> anyonwalk::Result<(f64, f64, bool)> {
                    let profile = linking_profile(p, &g)?;
                    let tau = TauMatrix::from_pair(p, &g, cache)?;
                    let (mut worst, mut worst_sq) = (0.0f64, 0.0f64);
                    let mut ok = true;
                    for config in &configs {
                        let f = ising_trace_formula(&profile, config, &tau)?;
                        let o = fusion_trace_oracle(p, config, &g, &conv)?;
                        worst = worst.max((f.value - o).norm());
                        worst_sq = worst_sq.max((squared_occupation_trace(&profile, config, &f) - o).norm());
                        let m = o.norm();
                        ok &= m < 1e-9 || (m - 1.0).abs() < 1e-9;
                    }
                    Ok((worst, worst_sq, ok))
                },
            )
            .collect::<anyonwalk::Result<Vec<_>>>()?
            .into_iter()
            .fold((0.0f64, 0.0f64, true), |(w, ws, ok), (x, xs, y)| (w.max(x), ws.max(xs), ok && y));
        worst = worst.max(w);
        worst_sq = worst_sq.max(ws);
        modulus_ok &= ok;
        pairs_checked += pairs.len();
    }
    Ok(verdict(
        worst < 1e-9 && modulus_ok,
        format!(
            "{pairs_checked} admissible pairs x 30 configurations; max |formula - bracket| = {worst:.2e}; \
             |tr Y| in {{0, 1}}: {modulus_ok}; with m_s^2 in the quarter-turn exponent: {worst_sq:.2e}"
        ),
    ))
}

fn criterion_6() -> Outcome {
    let conv = conv();
    let occ = OccupationDistribution::uniform(0, 3)?;
    let mut cache = TripleCache::new(conv);
    let mut comparisons = 0usize;
    for t in 1..=6 {
        let g = WalkGeometry::minimal(t);
        for k in 0..6 {
            let config = IslandConfig::random(g.n, &occ, &mut substream(60 + t as u64, k));
            for p in all_pairs(t, g.s0) {
                let profile = linking_profile(&p, &g)?;
                let tau = TauMatrix::from_pair(&p, &g, &mut cache)?;
                let base = ising_trace_formula(&profile, &config, &tau)?;
                for s in 1..=g.n as i64 {
                    let m = config.get(s);
                    let mut shifted = config.clone();
                    shifted.set(s, m + 2);
                    if ising_trace_formula(&profile, &shifted, &tau)?.tau_sign != base.tau_sign {
                        return Ok(verdict(false, format!("tau factor changed under m + 2 at island {s}, {p:?}")));
                    }
                    if m > 0 {
                        shifted.set(s, m + 4);
                        if ising_trace_formula(&profile, &shifted, &tau)?.value != base.value {
                            return Ok(verdict(false, format!("trace changed under m + 4 at island {s}, {p:?}")));
                        }
                    }
                    comparisons += 1;
                }
            }
        }
    }
    // The bracket itself, on backgrounds small enough to shift by a full period.
    let mut worst: f64 = 0.0;
    for t in 1..=3 {
        let g = WalkGeometry::minimal(t);
        for p in all_pairs(t, g.s0) {
            for s in 1..=g.n as i64 {
                for m in 1..=2 {
                    let a = fusion_trace_oracle(&p, &IslandConfig::sparse(g.n, &[(s, m)]), &g, &conv)?;
                    let b = fusion_trace_oracle(&p, &IslandConfig::sparse(g.n, &[(s, m + 4)]), &g, &conv)?;
                    worst = worst.max((a - b).norm());
                }
            }
        }
    }
    Ok(verdict(
        worst < 1e-9,
        format!("{comparisons} exact closed-form shifts agree; bracket m -> m + 4 max deviation {worst:.2e}"),
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = substream(70, 0);
    let mut nonzero = 0;
    for trial in 0..10_000 {
        let n = rng.gen_range(2..=16);
        let density = rng.gen_range(0.05..0.6);
        let mut tau = TauMatrix::new(n);
        for a in 1..=n as i64 {
            for b in a + 1..=n as i64 {
                if rng.gen_bool(density) {
                    tau.set(a, b, 1)?;
                }
            }
        }
        let (fast, brute) = (t_coefficient(&tau)?, t_coefficient_brute(&tau)?);
        if fast != brute {
            return Ok(verdict(false, format!("trial {trial}: rank {fast} vs brute {brute}")));
        }
        nonzero += (fast != 0.0) as usize;
    }
    Ok(verdict(true, format!("10000 matrices agree exactly ({nonzero} with T != 0)")))
}

fn criterion_8() -> Outcome {
    let s = Scatterer::balanced();
    let mut pass = true;
    let mut lines = Vec::new();
    for n in [3u32, 4, 6, 8, 16] {
        let est = scattering::mc_localization_length(&s, &PhaseEnsemble::new(n)?, 800, 10_000, 20, 80 + n as u64)?;
        let XiBounds::Applicable { lower, upper } = scattering::xi_bounds(FRAC_1_SQRT_2, FRAC_1_SQRT_2, n)? else {
            return Ok(verdict(false, format!("bounds inapplicable at N = {n}")));
        };
        let ok = est.xi_hat + 2.0 * est.xi_stderr >= lower && est.xi_hat - 2.0 * est.xi_stderr <= upper;
        pass &= ok;
        lines.push(format!("N={n}: {:.4}+-{:.4} in [{lower:.4}, {upper:.4}]{}", est.xi_hat, est.xi_stderr, if ok { "" } else { " OUT" }));
    }
    let XiBounds::Applicable { lower, upper } = scattering::xi_bounds(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 4096)? else {
        return Ok(verdict(false, "bounds inapplicable at large N"));
    };
    let limit_dev = (lower - 1.0 / LN_2).abs().max((upper - 1.0 / LN_2).abs());
    pass &= limit_dev < 1e-3;
    let mut rng = substream(81, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let c = Complex64::from_polar(rng.gen_range(0.0..0.999), rng.gen_range(0.0..TAU));
        let n = rng.gen_range(1..=32);
        worst = worst.max((cyclotomic_product(c, n) - (1.0 - c.powu(n))).norm());
    }
    pass &= worst < 1e-12;
    Ok(verdict(
        pass,
        format!("{}; N=4096 bounds within {limit_dev:.1e} of 1/ln 2; product identity max error {worst:.1e}", lines.join(", ")),
    ))
}

fn criterion_9() -> Outcome {
    let conv = conv();
    let mut anchors = Vec::new();
    let mut pass = true;
    let mut last = None;
    // Pairs returning to the start exist only for even t. When every such
    // pair has the same tau_t the normalisation vanishes and C is undefined;
    // that case must surface as an error rather than a number.
    for t in [2usize, 4, 6, 8, 10] {
        let s = ising::correlator_series(t, 14, &conv)?;
        let (c0, c1) = (s.values[0].1, s.values[1].1);
        if s.mean_sign.abs() == 1.0 {
            let reported = matches!(ising::correlator(t, 0, 14, &conv), Err(anyonwalk::Error::DegenerateNormalization(_)));
            pass &= reported && c0.is_none() && c1.is_none();
            anchors.push(format!("t={t}: all {} pairs share tau_t, degenerate{}", s.pairs, if reported { " (reported)" } else { " NOT REPORTED" }));
        } else {
            pass &= c0 == Some(1.0) && c1 == Some(1.0);
            anchors.push(format!("t={t}: C0={} C1={}", opt_str(c0), opt_str(c1)));
        }
        last = Some(s);
    }
    let s = last.expect("t = 10 ran");
    let window: Vec<(f64, f64)> = s.values[2..=6].iter().map(|&(tp, c)| (tp as f64, c.unwrap_or(f64::NAN))).collect();
    let fit = stats::exp_fit(&window)?;
    pass &= fit.rate > 0.0;
    let synthetic: Vec<(f64, f64)> = (0..=18).map(|tp| (tp as f64, 1.7679 * (-0.57699 * tp as f64).exp())).collect();
    let round = stats::exp_fit(&synthetic)?;
    let round_dev = (round.amplitude - 1.7679).abs().max((round.rate - 0.57699).abs());
    pass &= round_dev < 1e-6;
    Ok(verdict(
        pass,
        format!(
            "{}; t=10 fit over t' in [2, 6]: {:.4} exp(-{:.4} t'); synthetic round trip error {round_dev:.1e}",
            anchors.join(", "),
            fit.amplitude,
            fit.rate
        ),
    ))
}

fn opt_str(c: Option<f64>) -> String {
    c.map_or_else(|| "undefined".into(), |v| v.to_string())
}

fn criterion_10() -> Outcome {
    let conv = conv();
    let g = WalkGeometry::minimal(12);
    let ising_series = ising::ising_variance_series(&g, 12, 14, &conv)?;
    let stats8 = AbelianStatistics::new(8, 1)?;
    let abelian_series: Vec<VariancePoint> = (1..=12)
        .map(|t| -> anyonwalk::Result<VariancePoint> {
            let d = abelian::averaged_distribution_exact(&stats8, &g.with_steps(t)?, 14)?;
            Ok(VariancePoint { t, mean: stats::variance(&d)?, stderr: 0.0 })
        })
        .collect::<anyonwalk::Result<_>>()?;
    let (vi, va) = (ising_series[11].mean, abelian_series[11].mean);
    let window = Some((6, 12));
    let ei = stats::growth_exponent(&ising_series, window)?;
    let ea = stats::growth_exponent(&abelian_series, window)?;
    Ok(verdict(
        vi > va && ei.slope > 0.0 && ea.slope < ei.slope,
        format!(
            "sigma^2(12): Ising {vi:.4} vs Abelian N=8 {va:.4}; growth exponent over t in [6, 12]: Ising {:.4}, Abelian {:.4}",
            ei.slope, ea.slope
        ),
    ))
}

fn criterion_11() -> Outcome {
    let g = WalkGeometry::new(1001, 500)?;
    let stats = AbelianStatistics::new(8, 1)?;
    let noise = anyonwalk::TemporalNoise::whole_lattice(0.5, &g);
    let mc = abelian::temporal_noise_walk(&stats, &OccupationDistribution::uniform(1, 8)?, &noise, 100, 11, &g)?;
    let fit = stats::growth_exponent(&mc.variance, None)?;
    Ok(verdict(
        (fit.slope - 1.0).abs() <= 0.15,
        format!("100 samples, t = 500; growth exponent over t in [250, 500] = {:.4} +- {:.4}", fit.slope, fit.slope_stderr),
    ))
}

const DETERMINISM_CONFIGS: &[(&str, &str)] = &[
    (
        "abelian-averaged",
        "kind = \"abelian-averaged\"\nseed = 5\nsamples = 64\nplots = true\n[geometry]\nn = 121\nt = 60\n[statistics]\nanyons = \"abelian\"\nN = 8\n",
    ),
    (
        "abelian-temporal",
        "kind = \"abelian-temporal\"\nseed = 6\nsamples = 48\n[geometry]\nn = 101\nt = 50\n[statistics]\nanyons = \"abelian\"\nN = 4\n[noise]\np_minus1 = 0.3\n",
    ),
    (
        "abelian-fixed",
        "kind = \"abelian-fixed\"\nmethod = \"path-sum\"\n[geometry]\nt = 8\n[statistics]\nanyons = \"abelian\"\nN = 3\n[islands]\nsparse = [[7, 2], [9, 1], [10, 5]]\n",
    ),
    ("ising-averaged", "kind = \"ising-averaged\"\n[geometry]\nt = 8\n"),
    (
        "ising-fixed",
        "kind = \"ising-fixed\"\nmethod = \"monte-carlo\"\nseed = 9\nsamples = 40\n[geometry]\nt = 7\n[occupation]\nuniform = [0, 3]\n",
    ),
    ("correlator", "kind = \"correlator\"\n[geometry]\nt = 8\n"),
    (
        "scattering",
        "kind = \"scattering\"\nseed = 3\nsamples = 400\n[statistics]\nanyons = \"abelian\"\nN = 8\n[scattering]\nn_max = 60\nskip = 10\n",
    ),
];

fn csv_bytes(dir: &Path) -> std::io::Result<BTreeMap<String, Vec<u8>>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            out.insert(path.file_name().unwrap_or_default().to_string_lossy().into_owned(), std::fs::read(&path)?);
        }
    }
    Ok(out)
}

fn criterion_12() -> Outcome {
    let root = tempfile::tempdir()?;
    let exe = env!("CARGO_BIN_EXE_anyonwalk");
    let mut files = 0;
    for (name, text) in DETERMINISM_CONFIGS {
        let cfg = root.path().join(format!("{name}.toml"));
        std::fs::write(&cfg, text)?;
        let mut runs = Vec::new();
        for (label, workers) in [("w1", "1"), ("w4", "4"), ("w4-again", "4")] {
            let out = root.path().join(format!("{name}-{label}"));
            let status = Command::new(exe)
                .args(["run", cfg.to_str().unwrap_or_default(), "--out", out.to_str().unwrap_or_default()])
                .env("ANYWALK_WORKERS", workers)
                .env_remove("ANYWALK_OUT_DIR")
                .output()?;
            if !status.status.success() {
                return Ok(verdict(false, format!("{name} with {workers} workers exited {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr))));
            }
            let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json"))?)?;
            if manifest["status"] != "complete" {
                return Ok(verdict(false, format!("{name}: manifest not finalised")));
            }
            runs.push(csv_bytes(&out)?);
        }
        if runs[0].is_empty() || runs.iter().any(|r| r != &runs[0]) {
            return Ok(verdict(false, format!("{name}: CSV differs between worker counts or repeats")));
        }
        files += runs[0].len();
    }
    Ok(verdict(true, format!("{} configurations, {files} CSV files byte-identical for 1, 4 and 4 workers", DETERMINISM_CONFIGS.len())))
}

fn main() {
    // `cargo test` passes harness flags; a name filter selects criteria by number.
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [Criterion; 12] = [
        (1, "Abelian localisation, N=8, t=600", criterion_1),
        (2, "fermion control", criterion_2),
        (3, "Abelian path sum = state vector", criterion_3),
        (4, "exact average = Monte Carlo", criterion_4),
        (5, "Ising closed form = bracket oracle", criterion_5),
        (6, "periodicity in m", criterion_6),
        (7, "T coefficient rank = brute force", criterion_7),
        (8, "scattering bounds", criterion_8),
        (9, "correlator", criterion_9),
        (10, "Abelian / Ising separation, t=12", criterion_10),
        (11, "temporal-noise diffusion", criterion_11),
        (12, "determinism across worker counts", criterion_12),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = f().unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        println!(
            "criterion {id:>2} {}  {name} ({:.1}s): {}",
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
        match (v.pass, known) {
            (false, Some((_, why))) => println!("             known deviation: {why}"),
            (false, None) => unexpected.push(id),
            (true, Some(_)) => println!("             listed as a known deviation but passed"),
            (true, None) => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
