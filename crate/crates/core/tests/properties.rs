use anyonwalk::abelian::{self, abelian_trace};
use anyonwalk::ising::{ising_trace_formula, t_coefficient, t_coefficient_brute, TauMatrix};
use anyonwalk::scattering::{compose_block, cyclotomic_average, cyclotomic_product, transfer_chain, Scatterer};
use anyonwalk::stats::{exp_fit, linear_fit, variance};
use anyonwalk::topo::bracket::kauffman_bracket;
use anyonwalk::topo::invariants::fusion_trace_oracle;
use anyonwalk::topo::triple::TripleCache;
use anyonwalk::walk::{enumerate_path_pairs, linking_profile};
use anyonwalk::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn history(bits: u64, t: usize) -> CoinHistory {
    CoinHistory::from_packed(bits, t).unwrap()
}

/// An admissible pair obtained by sorting random histories onto a common endpoint.
fn admissible(t: usize, seed_a: u64, seed_b: u64, s0: i64) -> Option<PathPair> {
    let mask = (1u64 << t) - 1;
    let a = history(seed_a & mask, t);
    let pairs: Vec<PathPair> = enumerate_path_pairs(t, walk::final_position(&a, s0), s0).ok()?.collect();
    let candidates: Vec<&PathPair> = pairs.iter().filter(|p| p.forward == a).collect();
    candidates.get(seed_b as usize % candidates.len().max(1)).map(|p| **p)
}

fn config_strategy(n: usize, max_m: u32) -> impl Strategy<Value = IslandConfig> {
    proptest::collection::vec(0..=max_m, n).prop_map(|v| IslandConfig::new(v).unwrap())
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() < tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn statevec_is_normalised(t in 1usize..=12, n_stat in 1u32..=8, config in config_strategy(25, 9)) {
        let g = WalkGeometry::new(25, t).unwrap();
        let stats = AbelianStatistics::new(n_stat, 1).unwrap();
        let d = abelian::fixed_config_distribution_statevec(&config, &stats, &g).unwrap();
        prop_assert!((d.total() - 1.0).abs() < 1e-12);
        prop_assert_eq!(d.parity_violation(), 0.0);
    }

    #[test]
    fn pathsum_matches_statevec(t in 1usize..=7, n_stat in 1u32..=8, sign in prop_oneof![Just(1i8), Just(-1i8)], config in config_strategy(15, 8)) {
        let g = WalkGeometry::new(15, t).unwrap();
        let stats = AbelianStatistics::new(n_stat, sign).unwrap();
        let a = abelian::fixed_config_distribution_pathsum(&config, &stats, &g, 14).unwrap();
        let b = abelian::fixed_config_distribution_statevec(&config, &stats, &g).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn exchange_sign_leaves_fixed_distribution_unchanged(t in 1usize..=10, n_stat in 2u32..=8, config in config_strategy(21, 8)) {
        let g = WalkGeometry::new(21, t).unwrap();
        let plus = abelian::fixed_config_distribution_statevec(&config, &AbelianStatistics::new(n_stat, 1).unwrap(), &g).unwrap();
        let minus = abelian::fixed_config_distribution_statevec(&config, &AbelianStatistics::new(n_stat, -1).unwrap(), &g).unwrap();
        prop_assert!(plus.max_abs_diff(&minus) < 1e-12);
    }

    #[test]
    fn translation_moves_distribution_and_keeps_variance(t in 1usize..=10, shift in 1i64..=6, config in config_strategy(21, 8)) {
        let n = 21 + 6;
        let stats = AbelianStatistics::new(8, 1).unwrap();
        let base = WalkGeometry::with_s0(n, t, 11).unwrap();
        let moved = WalkGeometry::with_s0(n, t, 11 + shift).unwrap();
        let mut c0 = IslandConfig::empty(n);
        let mut c1 = IslandConfig::empty(n);
        for (i, &m) in config.as_slice().iter().enumerate() {
            c0.set(i as i64 + 1, m);
            c1.set(i as i64 + 1 + shift, m);
        }
        let a = abelian::fixed_config_distribution_statevec(&c0, &stats, &base).unwrap();
        let b = abelian::fixed_config_distribution_statevec(&c1, &stats, &moved).unwrap();
        for s in 1..=(n as i64 - shift) {
            prop_assert!((a.get(s) - b.get(s + shift)).abs() < 1e-13);
        }
        prop_assert!((variance(&a).unwrap() - variance(&b).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn swapping_a_pair_conjugates_traces(t in 2usize..=5, ba in any::<u64>(), bb in any::<u64>(), config in config_strategy(11, 2)) {
        let g = WalkGeometry::minimal(t);
        let config = IslandConfig::new(config.as_slice()[..g.n].to_vec()).unwrap();
        let pair = admissible(t, ba, bb, g.s0).unwrap();
        let swapped = pair.swapped();
        let stats = AbelianStatistics::new(6, 1).unwrap();
        let ab = abelian_trace(&linking_profile(&pair, &g).unwrap(), &config, &stats).unwrap();
        let ab_sw = abelian_trace(&linking_profile(&swapped, &g).unwrap(), &config, &stats).unwrap();
        prop_assert!(close(ab, ab_sw.conj(), 1e-12));
        let conv = BracketConvention::ising();
        let o = fusion_trace_oracle(&pair, &config, &g, &conv).unwrap();
        let o_sw = fusion_trace_oracle(&swapped, &config, &g, &conv).unwrap();
        prop_assert!(close(o, o_sw.conj(), 1e-9));
        prop_assert!(o.norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn skein_matches_state_sum(strands in 1usize..=5, raw in proptest::collection::vec((0usize..8, any::<bool>()), 0..=12)) {
        let crossings: Vec<Crossing> = if strands == 1 {
            Vec::new()
        } else {
            raw.iter().map(|&(k, pos)| Crossing { k: 1 + k % (strands - 1), sign: if pos { 1 } else { -1 } }).collect()
        };
        let word = BraidWord::new(strands, crossings).unwrap();
        for conv in [BracketConvention::ising(), BracketConvention::from_angle(0.3)] {
            let a = kauffman_bracket(&word, BracketMethod::Skein, &conv).unwrap();
            let b = kauffman_bracket(&word, BracketMethod::StateSum, &conv).unwrap();
            prop_assert!(close(a, b, 1e-9 * (1.0 + a.norm())), "{word}: {a} vs {b}");
        }
    }

    #[test]
    fn ising_trace_has_period_four(t in 2usize..=5, ba in any::<u64>(), bb in any::<u64>(), config in config_strategy(11, 3), island in 0usize..11) {
        let g = WalkGeometry::minimal(t);
        let config = IslandConfig::new(config.as_slice()[..g.n].to_vec()).unwrap();
        let island = (island % g.n) as i64 + 1;
        let pair = admissible(t, ba, bb, g.s0).unwrap();
        let profile = linking_profile(&pair, &g).unwrap();
        let mut cache = TripleCache::new(BracketConvention::ising());
        let tau = TauMatrix::from_pair(&pair, &g, &mut cache).unwrap();
        let base = ising_trace_formula(&profile, &config, &tau).unwrap();
        let mut plus2 = config.clone();
        plus2.set(island, config.get(island) + 2);
        let mut plus4 = config.clone();
        plus4.set(island, config.get(island) + 4);
        let shifted2 = ising_trace_formula(&profile, &plus2, &tau).unwrap();
        let shifted4 = ising_trace_formula(&profile, &plus4, &tau).unwrap();
        prop_assert_eq!(shifted2.tau_sign, base.tau_sign);
        if config.get(island) > 0 {
            prop_assert_eq!(shifted4.value, base.value);
        }
    }

    #[test]
    fn oracle_has_period_four_on_sparse_configs(t in 2usize..=4, ba in any::<u64>(), bb in any::<u64>(), m in 1u32..=2, island in 0usize..9) {
        let g = WalkGeometry::minimal(t);
        let island = (island % g.n) as i64 + 1;
        let pair = admissible(t, ba, bb, g.s0).unwrap();
        let conv = BracketConvention::ising();
        let a = fusion_trace_oracle(&pair, &IslandConfig::sparse(g.n, &[(island, m)]), &g, &conv).unwrap();
        let b = fusion_trace_oracle(&pair, &IslandConfig::sparse(g.n, &[(island, m + 4)]), &g, &conv).unwrap();
        prop_assert!(close(a, b, 1e-9), "{a} vs {b}");
    }

    #[test]
    fn t_coefficient_rank_matches_brute_force(n in 2usize..=16, entries in proptest::collection::vec((1i64..=16, 1i64..=16), 0..40)) {
        let mut tau = TauMatrix::new(n);
        for (a, b) in entries {
            let (a, b) = ((a - 1) % n as i64 + 1, (b - 1) % n as i64 + 1);
            if a != b {
                tau.set(a, b, 1 - tau.get(a, b)).unwrap();
            }
        }
        prop_assert_eq!(t_coefficient(&tau).unwrap(), t_coefficient_brute(&tau).unwrap());
    }

    #[test]
    fn cyclotomic_product_identity(re in -0.99f64..0.99, im in -0.99f64..0.99, n in 1u32..=32) {
        let c = Complex64::new(re, im);
        prop_assume!(c.norm() < 1.0);
        let lhs = cyclotomic_product(c, n);
        prop_assert!(close(lhs, 1.0 - c.powu(n), 1e-12));
        let avg: f64 = (1..=n)
            .map(|m| (1.0 - c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / n as f64)).norm_sqr().ln())
            .sum::<f64>()
            / n as f64;
        prop_assert!((avg - cyclotomic_average(c, n).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn composition_conserves_flux(thetas in proptest::collection::vec(0.0f64..std::f64::consts::TAU, 1..20)) {
        let s = Scatterer::balanced();
        let mut block = s;
        for &theta in &thetas {
            block = compose_block(&block, theta, &s).unwrap();
            prop_assert!((block.t.norm_sqr() + block.r.norm_sqr() - 1.0).abs() < 1e-10);
            prop_assert!((block.tp.norm_sqr() + block.rp.norm_sqr() - 1.0).abs() < 1e-10);
        }
        let chain = transfer_chain(&vec![s; thetas.len() + 1], &thetas).unwrap();
        prop_assert!(close(chain.t, block.t, 1e-10));
        prop_assert!(close(chain.r, block.r, 1e-10));
    }

    #[test]
    fn linear_fit_round_trip(slope in -5.0f64..5.0, intercept in -10.0f64..10.0, len in 3usize..50) {
        let x: Vec<f64> = (0..len).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|&x| slope * x + intercept).collect();
        let fit = linear_fit(&x, &y).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!((fit.intercept - intercept).abs() < 1e-9);
        prop_assert!(fit.residual_rms < 1e-9);
    }

    #[test]
    fn exp_fit_round_trip(amplitude in 0.1f64..10.0, rate in 0.01f64..2.0) {
        let series: Vec<(f64, f64)> = (2..=6).map(|k| (k as f64, amplitude * (-rate * k as f64).exp())).collect();
        let fit = exp_fit(&series).unwrap();
        prop_assert!((fit.amplitude - amplitude).abs() < 1e-6 * amplitude);
        prop_assert!((fit.rate - rate).abs() < 1e-6);
    }
}

#[test]
fn fermions_match_the_empty_background() {
    let g = WalkGeometry::new(61, 30).unwrap();
    let occ = OccupationDistribution::uniform(1, 8).unwrap();
    let empty = abelian::fixed_config_distribution_statevec(&IslandConfig::empty(g.n), &AbelianStatistics::fermions(), &g).unwrap();
    let mc = abelian::averaged_distribution_mc(&AbelianStatistics::fermions(), &occ, 8, 3, &g).unwrap();
    assert!(mc.distribution.max_abs_diff(&empty) < 1e-12);
}

#[test]
fn mc_runs_are_reproducible() {
    let g = WalkGeometry::new(41, 20).unwrap();
    let occ = OccupationDistribution::uniform(1, 8).unwrap();
    let stats = AbelianStatistics::new(8, 1).unwrap();
    let a = abelian::averaged_distribution_mc(&stats, &occ, 40, 11, &g).unwrap();
    let b = abelian::averaged_distribution_mc(&stats, &occ, 40, 11, &g).unwrap();
    assert_eq!(a, b);
    let c = abelian::averaged_distribution_mc(&stats, &occ, 40, 12, &g).unwrap();
    assert_ne!(a.distribution, c.distribution);
}
