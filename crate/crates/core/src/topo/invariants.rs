use num_complex::Complex64;

use super::bracket::{kauffman_bracket, BracketConvention, BracketMethod};
use super::braid::BraidWord;
use crate::error::{Error, Result};
use crate::walk::{linking_profile, pair_word, IslandConfig, LinkingProfile, PathPair, WalkGeometry};

/// Residue tolerance when reading a triple invariant off a trace.
pub const TAU_RESIDUE_TOLERANCE: f64 = 1e-8;

/// `w = 2 sum_s m_s l_s`.
pub fn writhe(profile: &LinkingProfile, config: &IslandConfig) -> Result<i64> {
    check_dims(profile, config)?;
    Ok(2 * profile.links().iter().zip(config.as_slice()).map(|(&l, &m)| l * m as i64).sum::<i64>())
}

pub(crate) fn check_dims(profile: &LinkingProfile, config: &IslandConfig) -> Result<()> {
    if profile.len() != config.len() {
        return Err(Error::Dimension(format!(
            "linking profile has {} islands, configuration {}",
            profile.len(),
            config.len()
        )));
    }
    Ok(())
}

/// Cubic Conway coefficient of a two-component link with linking number `l`
/// built from a pure two-strand braid: `l (l^2 - 1) / 6`.
pub fn conway_c2(l: i64) -> i64 {
    let c2 = l * (l * l - 1) / 6;
    debug_assert!(l % 2 != 0 || (c2 - l / 2).rem_euclid(2) == 0);
    c2
}

/// Fusion-space trace `<L>(A) / d^{|m|}` of the pair's link, evaluated from
/// the Kauffman bracket of the closed word `B_{a'}^dagger B_a`.
pub fn fusion_trace_oracle(
    pair: &PathPair,
    config: &IslandConfig,
    geometry: &WalkGeometry,
    conv: &BracketConvention,
) -> Result<Complex64> {
    if !pair.is_admissible(geometry.s0) {
        return Err(Error::InadmissiblePair("endpoints or last outcomes differ".into()));
    }
    let word = pair_word(pair, config, geometry);
    normalised_bracket(&word, conv)
}

/// `<closure(word)> / d^{r-1}`; equals 1 on the identity braid.
pub fn normalised_bracket(word: &BraidWord, conv: &BracketConvention) -> Result<Complex64> {
    let bracket = kauffman_bracket(word, BracketMethod::StateSum, conv)?;
    Ok(bracket / conv.loop_value().powi(word.strands() as i32 - 1))
}

/// Jones polynomial at `q = i` recovered from the bracket: `<L> / (-A^3)^w`.
pub fn jones_at_i(word: &BraidWord, conv: &BracketConvention) -> Result<Complex64> {
    let bracket = kauffman_bracket(word, BracketMethod::StateSum, conv)?;
    let framing = -conv.a_pow(3);
    Ok(bracket / framing.powi(word.writhe() as i32))
}

/// `(-i)^k`.
pub(crate) fn minus_i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Reads `tau` off a three-component trace `T = (-i)^{(l'+l'')/2} (-1)^tau`.
pub(crate) fn tau_from_trace(trace: Complex64, l1: i64, l2: i64) -> Result<u8> {
    let residue = trace / minus_i_pow((l1 + l2) / 2);
    if (residue - 1.0).norm() < TAU_RESIDUE_TOLERANCE {
        Ok(0)
    } else if (residue + 1.0).norm() < TAU_RESIDUE_TOLERANCE {
        Ok(1)
    } else {
        Err(Error::TauResidue { re: residue.re, im: residue.im })
    }
}

/// Parity of the triple invariant of the sublink formed by the walker and one
/// anyon from each of islands `s1 < s2`.
///
/// Returns 0 when either winding number is odd: the trace then vanishes and
/// the invariant cannot be read off it.
pub fn tau_parity(
    pair: &PathPair,
    s1: i64,
    s2: i64,
    geometry: &WalkGeometry,
    conv: &BracketConvention,
) -> Result<u8> {
    if s1 >= s2 {
        return Err(Error::InvalidParameter(format!("tau needs s' < s'', got ({s1}, {s2})")));
    }
    let profile = linking_profile(pair, geometry)?;
    let (l1, l2) = (profile.link(s1), profile.link(s2));
    if l1 % 2 != 0 || l2 % 2 != 0 {
        return Ok(0);
    }
    let sub = IslandConfig::sparse(geometry.n, &[(s1, 1), (s2, 1)]);
    let trace = fusion_trace_oracle(pair, &sub, geometry, conv)?;
    tau_from_trace(trace, l1, l2)
}

/// `arf = sum_s m_s c2(s) + sum_{s'<s''} m_s' m_s'' tau(s', s'')  (mod 2)`.
pub fn arf_invariant(
    pair: &PathPair,
    config: &IslandConfig,
    geometry: &WalkGeometry,
    conv: &BracketConvention,
) -> Result<u8> {
    let profile = linking_profile(pair, geometry)?;
    check_dims(&profile, config)?;
    let occupied: Vec<i64> = (1..=geometry.n as i64).filter(|&s| config.get(s) > 0).collect();
    if let Some(&s) = occupied.iter().find(|&&s| profile.link(s) % 2 != 0) {
        return Err(Error::InvalidParameter(format!(
            "arf needs even winding numbers; island {s} has l = {}",
            profile.link(s)
        )));
    }
    let mut arf: i64 = occupied.iter().map(|&s| config.get(s) as i64 * conway_c2(profile.link(s))).sum();
    let touched: Vec<i64> = occupied
        .iter()
        .copied()
        .filter(|&s| profile.forward_counts()[s as usize - 1] + profile.backward_counts()[s as usize - 1] > 0)
        .collect();
    for (i, &s1) in touched.iter().enumerate() {
        for &s2 in &touched[i + 1..] {
            let mm = config.get(s1) as i64 * config.get(s2) as i64;
            if mm % 2 == 1 {
                arf += tau_parity(pair, s1, s2, geometry, conv)? as i64;
            }
        }
    }
    Ok(arf.rem_euclid(2) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::CoinHistory;

    fn pair(a: &[u8], b: &[u8]) -> PathPair {
        PathPair::new(CoinHistory::new(a).unwrap(), CoinHistory::new(b).unwrap()).unwrap()
    }

    #[test]
    fn writhe_examples() {
        let g = WalkGeometry::minimal(2);
        let p = linking_profile(&pair(&[1, 0], &[1, 0]), &g).unwrap();
        assert_eq!(writhe(&p, &IslandConfig::uniform(g.n, 3)).unwrap(), 0);

        let g = WalkGeometry::minimal(3);
        let p = linking_profile(&pair(&[1, 0, 0], &[0, 1, 0]), &g).unwrap();
        let one = IslandConfig::sparse(g.n, &[(g.s0, 1)]);
        assert_eq!(writhe(&p, &one).unwrap(), 2);
        let two = IslandConfig::sparse(g.n, &[(g.s0, 2), (g.s0 - 1, 3)]);
        assert_eq!(writhe(&p, &two).unwrap(), -2);
        assert!(writhe(&p, &IslandConfig::empty(3)).is_err());
    }

    #[test]
    fn conway_c2_examples() {
        assert_eq!(conway_c2(0), 0);
        assert_eq!(conway_c2(2), 1);
        assert_eq!(conway_c2(4), 10);
        assert_eq!(conway_c2(-2), -1);
        for l in (-20..=20).step_by(2) {
            assert_eq!((conway_c2(l) - l / 2).rem_euclid(2), 0);
        }
    }

    #[test]
    fn oracle_identity_and_empty_config() {
        let conv = BracketConvention::ising();
        let g = WalkGeometry::minimal(4);
        let a = CoinHistory::new(&[1, 0, 0, 1]).unwrap();
        let config = IslandConfig::uniform(g.n, 2);
        let v = fusion_trace_oracle(&PathPair::new(a, a).unwrap(), &config, &g, &conv).unwrap();
        assert!((v - 1.0).norm() < 1e-12);

        let empty = IslandConfig::empty(g.n);
        for target in [g.s0 - 2, g.s0, g.s0 + 2] {
            for p in crate::walk::enumerate_path_pairs(4, target, g.s0).unwrap() {
                let v = fusion_trace_oracle(&p, &empty, &g, &conv).unwrap();
                assert!((v - 1.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn oracle_single_winding_vanishes() {
        let conv = BracketConvention::ising();
        let g = WalkGeometry::minimal(3);
        let config = IslandConfig::sparse(g.n, &[(g.s0, 1)]);
        let v = fusion_trace_oracle(&pair(&[1, 0, 0], &[0, 1, 0]), &config, &g, &conv).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn oracle_double_winding_is_minus_i() {
        let conv = BracketConvention::ising();
        let g = WalkGeometry::minimal(5);
        let config = IslandConfig::sparse(g.n, &[(g.s0, 1)]);
        let p = pair(&[1, 0, 1, 0, 0], &[0, 1, 0, 1, 0]);
        // l(s0) = 2, l(s0-1) = -2 but island s0-1 is empty
        let v = fusion_trace_oracle(&p, &config, &g, &conv).unwrap();
        assert!((v - Complex64::new(0.0, -1.0)).norm() < 1e-12, "{v}");
    }

    #[test]
    fn oracle_rejects_inadmissible_pairs() {
        let conv = BracketConvention::ising();
        let g = WalkGeometry::minimal(2);
        let r = fusion_trace_oracle(&pair(&[1, 1], &[0, 0]), &IslandConfig::empty(g.n), &g, &conv);
        assert!(matches!(r, Err(Error::InadmissiblePair(_))));
    }

    #[test]
    fn tau_examples() {
        let conv = BracketConvention::ising();
        let g = WalkGeometry::minimal(4);
        // never visits islands far from the start: unlinked
        let p = pair(&[1, 0, 1, 0], &[1, 0, 1, 0]);
        assert_eq!(tau_parity(&p, 1, 2, &g, &conv).unwrap(), 0);
        // odd winding around s0: convention 0
        let g = WalkGeometry::minimal(3);
        let p = pair(&[1, 0, 0], &[0, 1, 0]);
        let prof = linking_profile(&p, &g).unwrap();
        assert_eq!(prof.link(g.s0).rem_euclid(2), 1);
        assert_eq!(tau_parity(&p, g.s0 - 1, g.s0, &g, &conv).unwrap(), 0);
        assert!(tau_parity(&p, g.s0, g.s0 - 1, &g, &conv).is_err());
    }

    #[test]
    fn borromean_pair_has_odd_tau() {
        // the walker loops round s0-1 then s0 forward and in the opposite
        // order backward: pairwise unlinked, triple linked
        let conv = BracketConvention::ising();
        let g = WalkGeometry::minimal(5);
        let p = pair(&[0, 1, 1, 0, 0], &[1, 0, 0, 1, 0]);
        let prof = linking_profile(&p, &g).unwrap();
        assert!(prof.is_zero());
        assert_eq!(tau_parity(&p, g.s0 - 1, g.s0, &g, &conv).unwrap(), 1);
        let config = IslandConfig::sparse(g.n, &[(g.s0 - 1, 1), (g.s0, 1)]);
        assert_eq!(arf_invariant(&p, &config, &g, &conv).unwrap(), 1);
        let v = fusion_trace_oracle(&p, &config, &g, &conv).unwrap();
        assert!((v + 1.0).norm() < 1e-12, "{v}");
    }

    #[test]
    fn arf_examples() {
        let conv = BracketConvention::ising();
        let g = WalkGeometry::minimal(4);
        let trivial = pair(&[1, 0, 1, 0], &[1, 0, 1, 0]);
        assert_eq!(arf_invariant(&trivial, &IslandConfig::uniform(g.n, 1), &g, &conv).unwrap(), 0);

        let g5 = WalkGeometry::minimal(5);
        let p = pair(&[1, 0, 1, 0, 0], &[0, 1, 0, 1, 0]);
        let config = IslandConfig::sparse(g5.n, &[(g5.s0, 1)]);
        assert_eq!(arf_invariant(&p, &config, &g5, &conv).unwrap(), 1);

        let odd = pair(&[1, 0, 0], &[0, 1, 0]);
        let g2 = WalkGeometry::minimal(3);
        assert!(arf_invariant(&odd, &IslandConfig::sparse(g2.n, &[(g2.s0, 1)]), &g2, &conv).is_err());
    }
}
