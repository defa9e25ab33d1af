//! Run configuration: TOML schema, overrides and per-kind validation.

use std::path::PathBuf;

use anyonwalk::walk::{IslandConfig, WalkGeometry};
use anyonwalk::{AbelianStatistics, OccupationDistribution};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    AbelianFixed,
    AbelianAveraged,
    AbelianTemporal,
    IsingAveraged,
    IsingFixed,
    Scattering,
    Correlator,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::AbelianFixed => "abelian-fixed",
            Kind::AbelianAveraged => "abelian-averaged",
            Kind::AbelianTemporal => "abelian-temporal",
            Kind::IsingAveraged => "ising-averaged",
            Kind::IsingFixed => "ising-fixed",
            Kind::Scattering => "scattering",
            Kind::Correlator => "correlator",
        }
    }

    fn is_abelian(self) -> bool {
        matches!(self, Kind::AbelianFixed | Kind::AbelianAveraged | Kind::AbelianTemporal | Kind::Scattering)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub n: Option<usize>,
    pub t: usize,
    pub s0: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Anyons {
    Abelian,
    Ising,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatisticsConfig {
    pub anyons: Anyons,
    #[serde(rename = "N")]
    pub n: Option<u32>,
    pub sign: Option<i8>,
}

/// Exactly one of the fields must be set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OccupationConfig {
    pub uniform: Option<[u32; 2]>,
    pub fixed: Option<u32>,
    pub weights: Option<Vec<(u32, f64)>>,
}

/// Explicit island occupations for fixed-configuration runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IslandsConfig {
    pub occupations: Option<Vec<u32>>,
    pub sparse: Option<Vec<(i64, u32)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    StateVector,
    PathSum,
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub xi_window: Option<[f64; 2]>,
    pub exponent_window: Option<[usize; 2]>,
    pub correlator_window: Option<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub p_minus1: f64,
    pub region: Option<[i64; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringConfig {
    pub n_max: Option<usize>,
    pub skip: Option<usize>,
    /// `|t|` of each scatterer; the balanced coin when absent.
    pub t_abs: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsConfig {
    pub enumeration: usize,
}

impl Default for LimitsConfig {
    fn default() -> Self {
        Self { enumeration: 12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    pub samples: Option<usize>,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub plots: bool,
    pub method: Option<Method>,
    pub geometry: Option<GeometryConfig>,
    pub statistics: Option<StatisticsConfig>,
    pub occupation: Option<OccupationConfig>,
    pub islands: Option<IslandsConfig>,
    #[serde(default)]
    pub fit: FitConfig,
    pub noise: Option<NoiseConfig>,
    pub scattering: Option<ScatteringConfig>,
    #[serde(default)]
    pub limits: LimitsConfig,
}

/// Command-line and environment overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    /// `dotted.key=value` assignments; values are parsed as TOML when possible.
    pub set: Vec<String>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

pub fn parse(text: &str, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut doc: toml::Table = toml::from_str(text).map_err(|e| schema(e.to_string()))?;
    for assignment in &overrides.set {
        apply_set(&mut doc, assignment)?;
    }
    if let Some(seed) = overrides.seed {
        doc.insert("seed".into(), toml::Value::Integer(seed as i64));
    }
    if let Some(samples) = overrides.samples {
        doc.insert("samples".into(), toml::Value::Integer(samples as i64));
    }
    if let Some(dir) = &overrides.out_dir {
        doc.insert("out_dir".into(), toml::Value::String(dir.display().to_string()));
    }
    let config: RunConfig = toml::Value::Table(doc).try_into().map_err(|e: toml::de::Error| schema(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

fn apply_set(doc: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| schema(format!("override {assignment:?} is not key=value")))?;
    let value = parse_scalar(raw.trim());
    let mut parts: Vec<&str> = key.trim().split('.').collect();
    let leaf = parts.pop().filter(|k| !k.is_empty()).ok_or_else(|| schema(format!("empty key in {assignment:?}")))?;
    let mut table = doc;
    for part in parts {
        let entry = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| schema(format!("override {key:?}: {part} is not a section")))?;
    }
    table.insert(leaf.to_string(), value);
    Ok(())
}

fn parse_scalar(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

impl RunConfig {
    pub fn method(&self) -> Method {
        self.method.unwrap_or(match self.kind {
            Kind::AbelianFixed => Method::StateVector,
            Kind::IsingFixed => Method::PathSum,
            Kind::IsingAveraged | Kind::Correlator => Method::Exact,
            _ => Method::MonteCarlo,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let kind = self.kind.label();
        let needs_geometry = !matches!(self.kind, Kind::Scattering);
        if needs_geometry && self.geometry.is_none() {
            return Err(schema(format!("{kind} needs a [geometry] section")));
        }
        if !needs_geometry && self.geometry.is_some() {
            return Err(schema("scattering takes no [geometry] section"));
        }
        if let Some(stats) = &self.statistics {
            let ising = stats.anyons == Anyons::Ising;
            if self.kind.is_abelian() == ising {
                return Err(schema(format!("{kind} cannot use {:?} statistics", stats.anyons)));
            }
            if ising && (stats.n.is_some() || stats.sign.is_some()) {
                return Err(schema("Ising statistics take no N or sign"));
            }
        }
        if self.kind.is_abelian() {
            self.abelian_statistics()?;
        }
        if self.noise.is_some() != (self.kind == Kind::AbelianTemporal) {
            return Err(schema("a [noise] section is required for abelian-temporal and only allowed there"));
        }
        if self.scattering.is_some() && self.kind != Kind::Scattering {
            return Err(schema("a [scattering] section is only allowed for scattering runs"));
        }
        let methods: &[Method] = match self.kind {
            Kind::AbelianFixed => &[Method::StateVector, Method::PathSum],
            Kind::AbelianAveraged => &[Method::MonteCarlo, Method::Exact],
            Kind::IsingFixed => &[Method::PathSum, Method::MonteCarlo],
            Kind::AbelianTemporal => &[Method::MonteCarlo],
            Kind::Scattering => &[Method::MonteCarlo],
            Kind::IsingAveraged | Kind::Correlator => &[Method::Exact],
        };
        if !methods.contains(&self.method()) {
            return Err(schema(format!("method {:?} is not available for {kind}", self.method())));
        }
        let method = self.method();
        let fixed = matches!(self.kind, Kind::AbelianFixed) || (self.kind == Kind::IsingFixed && method == Method::PathSum);
        if fixed != self.islands.is_some() {
            return Err(schema(if fixed {
                format!("{kind} needs an [islands] section")
            } else {
                format!("{kind} takes no [islands] section")
            }));
        }
        let sampled = method == Method::MonteCarlo;
        if sampled && self.samples.is_none() {
            return Err(schema(format!("{kind} needs samples")));
        }
        if self.samples == Some(0) {
            return Err(schema("samples must be positive"));
        }
        if self.occupation.is_some() && (!sampled || self.kind == Kind::Scattering) {
            return Err(schema(format!("{kind} with method {method:?} takes no [occupation]")));
        }
        self.occupation_distribution()?;
        if needs_geometry {
            let g = self.geometry()?;
            if let Some(islands) = &self.islands {
                self.island_config(islands, &g)?;
            }
            if self.kind == Kind::Correlator && g.t % 2 != 0 {
                return Err(schema("correlator runs need even t"));
            }
        }
        if let Some(noise) = &self.noise {
            if !(0.0..=1.0).contains(&noise.p_minus1) {
                return Err(schema(format!("noise.p_minus1 = {} outside [0, 1]", noise.p_minus1)));
            }
        }
        if let Some([lo, hi]) = self.fit.xi_window {
            if !(lo >= 0.0 && hi > lo) {
                return Err(schema(format!("fit.xi_window [{lo}, {hi}] is empty")));
            }
        }
        for (name, w) in [("exponent_window", self.fit.exponent_window), ("correlator_window", self.fit.correlator_window)] {
            if let Some([lo, hi]) = w {
                if hi <= lo {
                    return Err(schema(format!("fit.{name} [{lo}, {hi}] is empty")));
                }
            }
        }
        Ok(())
    }

    /// Geometry with `n` defaulting to the smallest lattice `2t + 1`.
    pub fn geometry(&self) -> Result<WalkGeometry, CliError> {
        let g = self.geometry.as_ref().ok_or_else(|| schema("missing [geometry]"))?;
        let n = g.n.unwrap_or(2 * g.t + 1);
        let geometry = match g.s0 {
            Some(s0) => WalkGeometry::with_s0(n, g.t, s0),
            None => WalkGeometry::new(n, g.t),
        };
        geometry.map_err(|e| schema(e.to_string()))
    }

    pub fn abelian_statistics(&self) -> Result<AbelianStatistics, CliError> {
        let stats = self
            .statistics
            .as_ref()
            .ok_or_else(|| schema(format!("{} needs [statistics] with anyons = \"abelian\"", self.kind.label())))?;
        let n = stats.n.ok_or_else(|| schema("abelian statistics need N"))?;
        AbelianStatistics::new(n, stats.sign.unwrap_or(1)).map_err(|e| schema(e.to_string()))
    }

    /// Occupation law, defaulting to uniform on one period: `1..=N` for
    /// Abelian runs and `1..=4` for Ising runs.
    pub fn occupation_distribution(&self) -> Result<OccupationDistribution, CliError> {
        let result = match &self.occupation {
            None => {
                let hi = if self.kind.is_abelian() { self.abelian_statistics()?.n } else { 4 };
                OccupationDistribution::uniform(1, hi)
            }
            Some(o) => match (&o.uniform, &o.fixed, &o.weights) {
                (Some([lo, hi]), None, None) => OccupationDistribution::uniform(*lo, *hi),
                (None, Some(m), None) => Ok(OccupationDistribution::fixed(*m)),
                (None, None, Some(w)) => OccupationDistribution::new(w.clone()),
                _ => return Err(schema("[occupation] needs exactly one of uniform, fixed, weights")),
            },
        };
        result.map_err(|e| schema(e.to_string()))
    }

    pub fn island_config(&self, islands: &IslandsConfig, g: &WalkGeometry) -> Result<IslandConfig, CliError> {
        match (&islands.occupations, &islands.sparse) {
            (Some(occ), None) => {
                if occ.len() != g.n {
                    return Err(schema(format!("islands.occupations has {} entries, lattice has {}", occ.len(), g.n)));
                }
                IslandConfig::new(occ.clone()).map_err(|e| schema(e.to_string()))
            }
            (None, Some(sparse)) => {
                if let Some((s, _)) = sparse.iter().find(|(s, _)| *s < 1 || *s > g.n as i64) {
                    return Err(schema(format!("island {s} outside 1..={}", g.n)));
                }
                Ok(IslandConfig::sparse(g.n, sparse))
            }
            _ => Err(schema("[islands] needs exactly one of occupations, sparse")),
        }
    }
}
