use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SamplerConfig;
use crate::kinematics::{invariants_of, DefGrad, InvariantTriplet};

/// Smallest admissible volume ratio of a sampled deformation gradient.
pub const MIN_DET: f64 = 0.05;

/// Latin-hypercube samples of `F`: one stratified column per component, the
/// diagonal drawn from `1 + U(−δ, δ)` and the off-diagonal from `U(−δ, δ)`.
/// Samples with `det F ≤ 0.05` are dropped.
pub fn lhs_defgrads(cfg: &SamplerConfig, seed: u64) -> Vec<(DefGrad, InvariantTriplet)> {
    let n = cfg.n_cloud;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns = Vec::with_capacity(9);
    for comp in 0..9 {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(&mut rng);
        let offset = if comp % 4 == 0 { 1.0 } else { 0.0 };
        let col: Vec<f64> = strata
            .into_iter()
            .map(|s| {
                let u = (s as f64 + rng.random::<f64>()) / n as f64;
                offset + cfg.delta * (2.0 * u - 1.0)
            })
            .collect();
        columns.push(col);
    }
    (0..n)
        .filter_map(|i| {
            let comps: Vec<f64> = columns.iter().map(|c| c[i]).collect();
            let f = DefGrad::from_components(&comps).ok()?;
            if f.det() <= MIN_DET {
                return None;
            }
            let t = invariants_of(&f).ok()?;
            Some((f, t))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_bound_gives_identity() {
        let cfg = SamplerConfig { n_cloud: 20, delta: 0.0, ..SamplerConfig::default() };
        let out = lhs_defgrads(&cfg, 1);
        assert_eq!(out.len(), 20);
        for (f, t) in out {
            assert_eq!(f, DefGrad::identity());
            assert_eq!(t, InvariantTriplet::REFERENCE);
        }
    }

    #[test]
    fn each_stratum_is_hit_once() {
        let cfg = SamplerConfig { n_cloud: 64, delta: 0.2, ..SamplerConfig::default() };
        let out = lhs_defgrads(&cfg, 7);
        for comp in 0..9 {
            let offset = if comp % 4 == 0 { 1.0 } else { 0.0 };
            let mut hits = vec![0; 64];
            for (f, _) in &out {
                let u = (f.components()[comp] - offset + 0.2) / 0.4;
                hits[((u * 64.0) as usize).min(63)] += 1;
            }
            assert!(hits.iter().all(|&h| h == 1), "component {comp}: {hits:?}");
        }
    }
}
