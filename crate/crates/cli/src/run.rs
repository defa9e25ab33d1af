//! Executes one configured experiment and writes its artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyonwalk::abelian::{self, AbelianWalker};
use anyonwalk::ising;
use anyonwalk::scattering::{self, PhaseEnsemble, Scatterer, XiBounds};
use anyonwalk::stats;
use anyonwalk::{BracketConvention, McAverage, SpatialDistribution, TemporalNoise, VariancePoint, WalkGeometry};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Kind, Method, RunConfig};
use crate::output::{line_plot, num, opt, sha256_file, Table};
use crate::CliError;

pub const DEFAULT_OUT_DIR: &str = "anyonwalk-out";
const DEFAULT_N_MAX: usize = 200;
const DEFAULT_SKIP: usize = 20;
const DEFAULT_CORRELATOR_WINDOW: [usize; 2] = [2, 6];

pub struct RunReport {
    pub out_dir: PathBuf,
    pub manifest: Value,
    pub summary: Value,
    /// Every file written besides the manifest.
    pub files: Vec<PathBuf>,
}

#[derive(Default)]
struct Artifacts {
    tables: Vec<(&'static str, Table)>,
    plots: Vec<(&'static str, String)>,
    summary: serde_json::Map<String, Value>,
}

impl Artifacts {
    fn put(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }
}

/// Runs `config`, writing into its output directory. `conv` is the bracket
/// root used by the Ising engines; it must pass calibration for those kinds.
pub fn run(config: &RunConfig, conv: BracketConvention) -> Result<RunReport, CliError> {
    config.validate()?;
    let out_dir = config.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    std::fs::create_dir_all(&out_dir)?;
    let checks = conv.calibration_report();
    let calibrated = checks.iter().all(|c| c.pass);
    let mut manifest = json!({
        "status": "running",
        "software": { "name": "anyonwalk", "version": env!("CARGO_PKG_VERSION") },
        "kind": config.kind.label(),
        "seed": config.seed,
        "workers": rayon::current_num_threads(),
        "config": config,
        "calibration": { "root": conv.label(), "angle": conv.angle, "pass": calibrated, "checks": checks },
        "wall_time_s": null,
        "outputs": [],
    });
    let manifest_path = out_dir.join("manifest.json");
    write_json(&manifest_path, &manifest)?;

    let start = Instant::now();
    let result = if !calibrated && matches!(config.kind, Kind::IsingAveraged | Kind::IsingFixed | Kind::Correlator) {
        Err(CliError::Engine(anyonwalk::Error::Calibration(format!("{} fails the bracket probes", conv.label()))))
    } else {
        compute(config, &conv)
    };
    manifest["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    let artifacts = match result {
        Ok(a) => a,
        Err(e) => {
            manifest["status"] = json!("failed");
            manifest["error"] = json!(e.to_string());
            write_json(&manifest_path, &manifest)?;
            return Err(e);
        }
    };

    let mut files = Vec::new();
    for (name, table) in &artifacts.tables {
        let path = out_dir.join(name);
        std::fs::write(&path, table.render())?;
        files.push(path);
    }
    let summary = Value::Object(artifacts.summary);
    let summary_path = out_dir.join("summary.json");
    write_json(&summary_path, &summary)?;
    files.push(summary_path);
    if config.plots {
        for (name, svg) in &artifacts.plots {
            let path = out_dir.join(name);
            std::fs::write(&path, svg)?;
            files.push(path);
        }
    }
    let outputs: Vec<Value> = files
        .iter()
        .map(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            sha256_file(p).map(|digest| json!({ "file": name, "sha256": digest }))
        })
        .collect::<std::io::Result<_>>()?;
    manifest["outputs"] = Value::Array(outputs);
    manifest["status"] = json!("complete");
    write_json(&manifest_path, &manifest)?;
    Ok(RunReport { out_dir, manifest, summary, files })
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn compute(config: &RunConfig, conv: &BracketConvention) -> Result<Artifacts, CliError> {
    let mut art = Artifacts::default();
    art.put("kind", config.kind.label());
    art.put("method", config.method());
    let limit = config.limits.enumeration;
    match config.kind {
        Kind::AbelianFixed => {
            let g = config.geometry()?;
            let stats = config.abelian_statistics()?;
            let islands = config.island_config(config.islands.as_ref().expect("validated"), &g)?;
            let (dist, series) = match config.method() {
                Method::PathSum => {
                    let mut series = Vec::with_capacity(g.t);
                    for t in 1..g.t {
                        let d = abelian::fixed_config_distribution_pathsum(&islands, &stats, &g.with_steps(t)?, limit)?;
                        series.push(VariancePoint { t, mean: stats::variance(&d)?, stderr: 0.0 });
                    }
                    let d = abelian::fixed_config_distribution_pathsum(&islands, &stats, &g, limit)?;
                    series.push(VariancePoint { t: g.t, mean: stats::variance(&d)?, stderr: 0.0 });
                    (d, series)
                }
                _ => {
                    let mut walker = AbelianWalker::new(&islands, &stats, &g)?;
                    let mut series = Vec::with_capacity(g.t);
                    for t in 1..=g.t {
                        walker.step();
                        series.push(VariancePoint { t, mean: walker.variance(), stderr: 0.0 });
                    }
                    (SpatialDistribution::new(&g, walker.probabilities()), series)
                }
            };
            art.put("N", stats.n);
            art.put("sign", stats.sign);
            distribution_outputs(&mut art, &dist, None, None);
            variance_outputs(&mut art, &series, config);
        }
        Kind::AbelianAveraged if config.method() == Method::Exact => {
            let g = config.geometry()?;
            let stats = config.abelian_statistics()?;
            let mut series = Vec::with_capacity(g.t);
            for t in 1..g.t {
                let d = abelian::averaged_distribution_exact(&stats, &g.with_steps(t)?, limit)?;
                series.push(VariancePoint { t, mean: stats::variance(&d)?, stderr: 0.0 });
            }
            let dist = abelian::averaged_distribution_exact(&stats, &g, limit)?;
            series.push(VariancePoint { t: g.t, mean: stats::variance(&dist)?, stderr: 0.0 });
            art.put("N", stats.n);
            distribution_outputs(&mut art, &dist, None, None);
            variance_outputs(&mut art, &series, config);
        }
        Kind::AbelianAveraged | Kind::AbelianTemporal => {
            let g = config.geometry()?;
            let stats = config.abelian_statistics()?;
            let occ = config.occupation_distribution()?;
            let samples = config.samples.expect("validated");
            let mc = match &config.noise {
                Some(n) => {
                    let noise = match n.region {
                        Some([lo, hi]) => TemporalNoise { p_minus1: n.p_minus1, region: (lo, hi) },
                        None => TemporalNoise::whole_lattice(n.p_minus1, &g),
                    };
                    art.put("noise", noise);
                    abelian::temporal_noise_walk(&stats, &occ, &noise, samples, config.seed, &g)?
                }
                None => abelian::averaged_distribution_mc(&stats, &occ, samples, config.seed, &g)?,
            };
            art.put("N", stats.n);
            art.put("occupation", occ.support());
            mc_outputs(&mut art, &mc, &g, config);
        }
        Kind::IsingAveraged => {
            let g = config.geometry()?;
            let series = ising::ising_variance_series(&g, g.t, limit, conv)?;
            let dist = ising::ising_averaged_distribution(&g, limit, conv)?;
            distribution_outputs(&mut art, &dist, None, None);
            variance_outputs(&mut art, &series, config);
        }
        Kind::IsingFixed if config.method() == Method::MonteCarlo => {
            let g = config.geometry()?;
            let occ = config.occupation_distribution()?;
            let mc = ising::ising_fixed_mc(&occ, config.samples.expect("validated"), config.seed, &g, limit, conv)?;
            art.put("occupation", occ.support());
            mc_outputs(&mut art, &mc, &g, config);
        }
        Kind::IsingFixed => {
            let g = config.geometry()?;
            let islands = config.island_config(config.islands.as_ref().expect("validated"), &g)?;
            let mut series = Vec::with_capacity(g.t);
            for t in 1..g.t {
                let d = ising::ising_fixed_distribution(&islands, &g.with_steps(t)?, limit, conv)?;
                series.push(VariancePoint { t, mean: stats::variance(&d)?, stderr: 0.0 });
            }
            let dist = ising::ising_fixed_distribution(&islands, &g, limit, conv)?;
            series.push(VariancePoint { t: g.t, mean: stats::variance(&dist)?, stderr: 0.0 });
            distribution_outputs(&mut art, &dist, None, None);
            variance_outputs(&mut art, &series, config);
        }
        Kind::Scattering => scattering_outputs(&mut art, config)?,
        Kind::Correlator => {
            let t = config.geometry()?.t;
            let series = ising::correlator_series(t, limit, conv)?;
            let mut table = Table::new(&["t_prime", "C"]);
            for &(tp, c) in &series.values {
                table.push(vec![tp.to_string(), opt(c)]);
            }
            let [lo, hi] = config.fit.correlator_window.unwrap_or(DEFAULT_CORRELATOR_WINDOW);
            let window: Vec<(f64, f64)> = series
                .values
                .iter()
                .filter(|(tp, _)| (lo..=hi).contains(tp))
                .map(|&(tp, c)| (tp as f64, c.unwrap_or(f64::NAN)))
                .collect();
            art.put("t", t);
            art.put("pairs", series.pairs);
            art.put("mean_sign", series.mean_sign);
            art.put("fit_window", [lo, hi]);
            art.put("exp_fit", fit_value(stats::exp_fit(&window)));
            let pts: Vec<(f64, f64)> = series.values.iter().map(|&(tp, c)| (tp as f64, c.unwrap_or(f64::NAN))).collect();
            art.plots.push(("correlator.svg", line_plot("Correlator", "t'", "C(t, t')", &pts)));
            art.tables.push(("correlator.csv", table));
        }
    }
    Ok(art)
}

fn fit_value<T: Serialize>(fit: anyonwalk::Result<T>) -> Value {
    match fit {
        Ok(f) => serde_json::to_value(f).unwrap_or(Value::Null),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn distribution_outputs(art: &mut Artifacts, dist: &SpatialDistribution, stderr: Option<&[f64]>, mean_ln_p: Option<&[Option<f64>]>) {
    let mut table = Table::new(&["s", "p", "stderr", "mean_ln_p"]);
    for (i, (s, p)) in dist.iter().enumerate() {
        let err = stderr.map(|e| e[i]).unwrap_or(0.0);
        let ln_p = match mean_ln_p {
            Some(v) => v[i],
            None => (p > 0.0).then(|| p.ln()),
        };
        table.push(vec![s.to_string(), num(p), num(err), opt(ln_p)]);
    }
    art.put("t", dist.t);
    art.put("s0", dist.s0);
    art.put("n", dist.n());
    art.put("total_probability", dist.total());
    art.put("variance", stats::variance(dist).ok());
    let pts: Vec<(f64, f64)> = dist.iter().map(|(s, p)| (s as f64, p)).collect();
    art.plots.push(("distribution.svg", line_plot("Position distribution", "s", "p(s, t)", &pts)));
    art.tables.push(("distribution.csv", table));
}

fn variance_outputs(art: &mut Artifacts, series: &[VariancePoint], config: &RunConfig) {
    let mut table = Table::new(&["t", "variance", "stderr"]);
    for p in series {
        table.push(vec![p.t.to_string(), num(p.mean), num(p.stderr)]);
    }
    let window = config.fit.exponent_window.map(|[a, b]| (a, b));
    art.put("growth_exponent", fit_value(stats::growth_exponent(series, window)));
    let pts: Vec<(f64, f64)> = series.iter().map(|p| (p.t as f64, p.mean)).collect();
    art.plots.push(("variance.svg", line_plot("Variance", "t", "sigma^2(t)", &pts)));
    art.tables.push(("variance.csv", table));
}

fn mc_outputs(art: &mut Artifacts, mc: &McAverage, g: &WalkGeometry, config: &RunConfig) {
    art.put("samples", mc.samples);
    distribution_outputs(art, &mc.distribution, Some(&mc.stderr), Some(&mc.mean_ln_p));
    variance_outputs(art, &mc.variance, config);
    let at = |t: usize| mc.variance.iter().find(|p| p.t == t).map(|p| p.mean);
    if let (Some(full), Some(half)) = (at(g.t), at(g.t / 2)) {
        art.put("saturation_ratio", json!({ "t": g.t, "half": g.t / 2, "ratio": full / half }));
    }
    let window = config.fit.xi_window.map(|[a, b]| (a, b)).unwrap_or_else(|| stats::default_xi_window(g.t));
    art.put("xi_window", [window.0, window.1]);
    art.put("xi_fit", fit_value(stats::loc_length_fit(&mc.mean_ln_p, g.s0, window)));
    let pts: Vec<(f64, f64)> =
        mc.mean_ln_p.iter().enumerate().filter_map(|(i, v)| v.map(|y| (i as f64 + 1.0, y))).collect();
    art.plots.push(("mean_ln_p.svg", line_plot("Mean log probability", "s", "<ln p(s, t)>", &pts)));
}

fn scattering_outputs(art: &mut Artifacts, config: &RunConfig) -> Result<(), CliError> {
    let stats = config.abelian_statistics()?;
    let sc = config.scattering.clone().unwrap_or_default();
    let scatterer = match sc.t_abs {
        None => Scatterer::balanced(),
        Some(a) if (0.0..=1.0).contains(&a) && a > 0.0 => {
            let b = (1.0 - a * a).sqrt();
            Scatterer::new(Complex64::new(-a, 0.0), Complex64::new(b, 0.0), Complex64::new(a, 0.0), Complex64::new(b, 0.0))?
        }
        Some(a) => return Err(CliError::Schema(format!("scattering.t_abs = {a} outside (0, 1]"))),
    };
    let (t_abs, r_abs) = (scatterer.t.norm(), scatterer.r.norm());
    let n_max = sc.n_max.unwrap_or(DEFAULT_N_MAX);
    let skip = sc.skip.unwrap_or(DEFAULT_SKIP);
    let est = scattering::mc_localization_length(
        &scatterer,
        &PhaseEnsemble::new(stats.n)?,
        n_max,
        config.samples.expect("validated"),
        skip,
        config.seed,
    )?;
    let mut table = Table::new(&["n", "mean_ln_T", "stderr"]);
    for &(n, m, e) in &est.series {
        table.push(vec![n.to_string(), num(m), num(e)]);
    }
    let bounds = scattering::xi_bounds(t_abs, r_abs, stats.n)?;
    let (lower, upper) = match &bounds {
        XiBounds::Applicable { lower, upper } => (Some(*lower), Some(*upper)),
        XiBounds::Inapplicable { .. } => (None, None),
    };
    art.put("N", stats.n);
    art.put("t_abs", t_abs);
    art.put("samples", est.samples);
    art.put("n_max", n_max);
    art.put("skip", skip);
    art.put("xi_hat", est.xi_hat);
    art.put("xi_stderr", est.xi_stderr);
    art.put("xi_lower", lower);
    art.put("xi_upper", upper);
    art.put("bounds", &bounds);
    art.put("xi_limit", scattering::xi_limit(t_abs));
    art.put("slope", est.slope);
    art.put("slope_stderr", est.slope_stderr);
    let pts: Vec<(f64, f64)> = est.series.iter().map(|&(n, m, _)| (n as f64, m)).collect();
    art.plots.push(("scattering.svg", line_plot("Mean log transmission", "n", "<ln T>", &pts)));
    art.tables.push(("scattering.csv", table));
    Ok(())
}
