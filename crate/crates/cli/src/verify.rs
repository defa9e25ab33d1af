//! Invariant suite behind `anyonwalk verify`, run at reduced sizes.

use std::f64::consts::{LN_2, PI, TAU};

use anyonwalk::abelian;
use anyonwalk::ising::{self, ising_trace_formula, t_coefficient, t_coefficient_brute, TauMatrix};
use anyonwalk::scattering::{self, compose_block, cyclotomic_product, transfer_chain, Scatterer, XiBounds};
use anyonwalk::seed::substream;
use anyonwalk::topo::bracket::kauffman_bracket;
use anyonwalk::topo::invariants::{fusion_trace_oracle, tau_parity};
use anyonwalk::topo::triple::TripleCache;
use anyonwalk::walk::{enumerate_path_pairs, linking_profile};
use anyonwalk::{
    AbelianStatistics, BracketConvention, BracketMethod, BraidWord, Crossing, IslandConfig, OccupationDistribution,
    WalkGeometry,
};
use num_complex::Complex64;
use rand::Rng;

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

type Outcome = anyonwalk::Result<(bool, String)>;

fn check(name: impl Into<String>, f: impl FnOnce() -> Outcome) -> Check {
    let (pass, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Check { name: name.into(), pass, detail }
}

/// Worst deviation against a tolerance.
fn within(worst: f64, tol: f64) -> (bool, String) {
    (worst <= tol, format!("max deviation {worst:.2e} (tol {tol:.0e})"))
}

pub fn run_suite(conv: &BracketConvention) -> Vec<Check> {
    let mut checks: Vec<Check> = conv
        .calibration_report()
        .into_iter()
        .map(|c| Check {
            name: format!("calibration: {}", c.name),
            pass: c.pass,
            detail: format!("{:.6}{:+.6}i, expected {}{:+}i", c.value.re, c.value.im, c.expected.re, c.expected.im),
        })
        .collect();

    checks.push(check("bracket: skein = state sum", || {
        let mut rng = substream(101, 0);
        let mut worst: f64 = 0.0;
        for _ in 0..150 {
            let strands = rng.gen_range(2..=5);
            let len = rng.gen_range(0..=12);
            let crossings = (0..len)
                .map(|_| Crossing { k: rng.gen_range(1..strands), sign: if rng.gen_bool(0.5) { 1 } else { -1 } })
                .collect();
            let word = BraidWord::new(strands, crossings)?;
            let a = kauffman_bracket(&word, BracketMethod::Skein, conv)?;
            let b = kauffman_bracket(&word, BracketMethod::StateSum, conv)?;
            worst = worst.max((a - b).norm());
        }
        Ok(within(worst, 1e-9))
    }));

    checks.push(check("abelian: path sum = state vector", || {
        let mut worst: f64 = 0.0;
        let occ = OccupationDistribution::uniform(0, 8)?;
        for (i, t) in [4usize, 6, 8].into_iter().enumerate() {
            let g = WalkGeometry::minimal(t);
            for n in [2u32, 4, 8] {
                let stats = AbelianStatistics::new(n, 1)?;
                for k in 0..4 {
                    let config = IslandConfig::random(g.n, &occ, &mut substream(102, (i * 100 + k) as u64));
                    let a = abelian::fixed_config_distribution_pathsum(&config, &stats, &g, 12)?;
                    let b = abelian::fixed_config_distribution_statevec(&config, &stats, &g)?;
                    worst = worst.max(a.max_abs_diff(&b));
                }
            }
        }
        Ok(within(worst, 1e-12))
    }));

    checks.push(check("abelian: exact average normalised", || {
        let mut worst: f64 = 0.0;
        for t in 1..=8 {
            let d = abelian::averaged_distribution_exact(&AbelianStatistics::new(8, 1)?, &WalkGeometry::minimal(t), 12)?;
            worst = worst.max((d.total() - 1.0).abs());
        }
        Ok(within(worst, 1e-12))
    }));

    checks.push(check("abelian: fermions = empty background", || {
        let g = WalkGeometry::new(41, 20)?;
        let empty = abelian::fixed_config_distribution_statevec(&IslandConfig::empty(g.n), &AbelianStatistics::fermions(), &g)?;
        let mc = abelian::averaged_distribution_mc(&AbelianStatistics::fermions(), &OccupationDistribution::uniform(1, 8)?, 4, 103, &g)?;
        Ok(within(mc.distribution.max_abs_diff(&empty), 1e-12))
    }));

    checks.push(check("ising: fast tau = bracket tau", || {
        let mut cache = TripleCache::new(*conv);
        let mut compared = 0;
        for t in 2..=5 {
            let g = WalkGeometry::minimal(t);
            for target in (g.s0 - t as i64..=g.s0 + t as i64).step_by(2) {
                for p in enumerate_path_pairs(t, target, g.s0)? {
                    let fast = TauMatrix::from_pair(&p, &g, &mut cache)?;
                    for s1 in 1..=g.n as i64 {
                        for s2 in s1 + 1..=g.n as i64 {
                            if fast.get(s1, s2) != tau_parity(&p, s1, s2, &g, conv)? {
                                return Ok((false, format!("mismatch at t = {t}, islands ({s1}, {s2})")));
                            }
                            compared += 1;
                        }
                    }
                }
            }
        }
        Ok((true, format!("{compared} entries agree")))
    }));

    checks.push(check("ising: closed form = bracket oracle", || {
        let mut cache = TripleCache::new(*conv);
        let occ = OccupationDistribution::uniform(0, 2)?;
        let mut worst: f64 = 0.0;
        for t in 1..=4 {
            let g = WalkGeometry::minimal(t);
            for k in 0..5 {
                let config = IslandConfig::random(g.n, &occ, &mut substream(104, (t * 10 + k) as u64));
                for target in (g.s0 - t as i64..=g.s0 + t as i64).step_by(2) {
                    for p in enumerate_path_pairs(t, target, g.s0)? {
                        let tau = TauMatrix::from_pair(&p, &g, &mut cache)?;
                        let f = ising_trace_formula(&linking_profile(&p, &g)?, &config, &tau)?.value;
                        worst = worst.max((f - fusion_trace_oracle(&p, &config, &g, conv)?).norm());
                    }
                }
            }
        }
        Ok(within(worst, 1e-9))
    }));

    checks.push(check("ising: averaged walk normalised", || {
        let mut worst: f64 = 0.0;
        for t in 1..=8 {
            let d = ising::ising_averaged_distribution(&WalkGeometry::minimal(t), 12, conv)?;
            worst = worst.max((d.total() - 1.0).abs());
        }
        Ok(within(worst, 1e-12))
    }));

    checks.push(check("ising: T coefficient rank = brute force", || {
        let mut rng = substream(105, 0);
        for trial in 0..2000 {
            let n = rng.gen_range(2..=16);
            let mut tau = TauMatrix::new(n);
            for a in 1..=n as i64 {
                for b in a + 1..=n as i64 {
                    if rng.gen_bool(0.3) {
                        tau.set(a, b, 1)?;
                    }
                }
            }
            if t_coefficient(&tau)? != t_coefficient_brute(&tau)? {
                return Ok((false, format!("trial {trial} differs")));
            }
        }
        Ok((true, "2000 matrices agree".into()))
    }));

    checks.push(check("ising: correlator anchors", || {
        let s = ising::correlator_series(6, 12, conv)?;
        let ok = s.values[0].1 == Some(1.0) && s.values[1].1 == Some(1.0);
        Ok((ok, format!("C(6, 0) = {:?}, C(6, 1) = {:?}", s.values[0].1, s.values[1].1)))
    }));

    checks.push(check("scattering: cyclotomic product", || {
        let mut rng = substream(106, 0);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let c = Complex64::from_polar(rng.gen_range(0.0..0.99), rng.gen_range(0.0..TAU));
            let n = rng.gen_range(1..=32);
            worst = worst.max((cyclotomic_product(c, n) - (1.0 - c.powu(n))).norm());
        }
        Ok(within(worst, 1e-12))
    }));

    checks.push(check("scattering: composition = transfer matrices", || {
        let mut rng = substream(107, 0);
        let s = Scatterer::balanced();
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let len = rng.gen_range(1..30);
            let thetas: Vec<f64> = (0..len).map(|_| PI * rng.gen_range(1..=8) as f64 / 8.0).collect();
            let mut block = s;
            for &th in &thetas {
                block = compose_block(&block, th, &s)?;
            }
            let chain = transfer_chain(&vec![s; len + 1], &thetas)?;
            worst = worst.max((chain.t - block.t).norm()).max((chain.r - block.r).norm());
        }
        Ok(within(worst, 1e-10))
    }));

    checks.push(check("scattering: bounds meet at 1/ln 2", || {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match scattering::xi_bounds(h, h, 4096)? {
            XiBounds::Applicable { lower, upper } => {
                Ok(within((lower - 1.0 / LN_2).abs().max((upper - 1.0 / LN_2).abs()), 1e-3))
            }
            XiBounds::Inapplicable { reason } => Ok((false, reason)),
        }
    }));

    checks
}

pub fn render(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!("{:<width$}  {}  {}\n", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    out.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
    out
}
