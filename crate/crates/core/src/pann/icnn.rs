use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{mask_violation, Variant};
use crate::diff::Scalar;
use crate::error::{Error, Result};
use crate::materials::Potential;

/// Architecture of a dense input-convex network potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IcnnConfig {
    pub layers: usize,
    pub hidden: usize,
    pub variant: Variant,
}

impl Default for IcnnConfig {
    fn default() -> Self {
        Self { layers: 2, hidden: 200, variant: Variant::Polyconvex }
    }
}

/// Offsets of each weight block inside the flat parameter vector.
///
/// Layer 0: input weights `[H × 3]` (row-major, unit then input channel)
/// followed by the bias `[H]`. Layer `l ≥ 1`: hidden weights `[H × H]`
/// followed by input weights `[H × 3]`. Finally the output weights `[H]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IcnnLayout {
    pub hidden: usize,
    pub layers: usize,
    pub skip: Vec<usize>,
    pub bias: usize,
    pub weights: Vec<usize>,
    pub output: usize,
    pub len: usize,
}

impl IcnnLayout {
    pub fn new(layers: usize, hidden: usize) -> Self {
        let h = hidden;
        let mut skip = vec![0];
        let bias = 3 * h;
        let mut weights = vec![usize::MAX];
        let mut at = 4 * h;
        for _ in 1..layers {
            weights.push(at);
            at += h * h;
            skip.push(at);
            at += 3 * h;
        }
        Self { hidden, layers, skip, bias, weights, output: at, len: at + h }
    }

    /// Input weight of `unit` in layer `layer` for channel `k` (0 = I1, 1 = I2, 2 = J).
    pub fn skip_index(&self, layer: usize, unit: usize, k: usize) -> usize {
        self.skip[layer] + 3 * unit + k
    }

    /// Hidden weight from unit `from` of layer `layer − 1` into unit `to` of `layer`.
    pub fn weight_index(&self, layer: usize, to: usize, from: usize) -> usize {
        self.weights[layer] + self.hidden * to + from
    }
}

/// Dense input-convex network `φ(I1, I2, J)` with input pass-through:
///
/// ```text
/// z₀ = sp(𝒲₀ x + b₀),  z_l = sp(W_l z_{l−1} + 𝒲_l x),  φ = w_out · z_{L−1}
/// ```
/// with `sp` the softplus. Hidden and output weights are non-negative; the
/// polyconvex variant additionally keeps the `I1`, `I2` input weights
/// non-negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Icnn {
    pub config: IcnnConfig,
    pub theta: Vec<f64>,
}

impl Icnn {
    pub fn layout(&self) -> IcnnLayout {
        IcnnLayout::new(self.config.layers, self.config.hidden)
    }

    pub fn n_params_of(config: &IcnnConfig) -> usize {
        IcnnLayout::new(config.layers, config.hidden).len
    }

    /// Non-negativity mask over the flat parameter vector.
    pub fn nonneg_mask(config: &IcnnConfig) -> Vec<bool> {
        let lay = IcnnLayout::new(config.layers, config.hidden);
        let mut mask = vec![false; lay.len];
        for l in 1..lay.layers {
            for i in lay.weights[l]..lay.weights[l] + lay.hidden * lay.hidden {
                mask[i] = true;
            }
        }
        for i in lay.output..lay.len {
            mask[i] = true;
        }
        if config.variant == Variant::Polyconvex {
            for l in 0..lay.layers {
                for u in 0..lay.hidden {
                    mask[lay.skip_index(l, u, 0)] = true;
                    mask[lay.skip_index(l, u, 1)] = true;
                }
            }
        }
        mask
    }

    /// Build from explicit weights, rejecting mask violations.
    pub fn new(config: IcnnConfig, theta: Vec<f64>) -> Result<Self> {
        if config.layers == 0 || config.hidden == 0 {
            return Err(Error::InvalidArgument("network needs at least one layer and unit".into()));
        }
        let n = Self::n_params_of(&config);
        if theta.len() != n {
            return Err(Error::Structure(format!("expected {n} weights, got {}", theta.len())));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Structure("non-finite weight".into()));
        }
        if let Some(i) = mask_violation(&theta, &Self::nonneg_mask(&config)) {
            return Err(Error::Structure(format!("constrained weight {i} is negative ({})", theta[i])));
        }
        Ok(Self { config, theta })
    }

    /// Random initialization: masked entries `|N(0, 1/H)|`, others `N(0, 1/H)`.
    pub fn init<R: Rng + ?Sized>(config: IcnnConfig, rng: &mut R) -> Result<Self> {
        let n = Self::n_params_of(&config);
        let mask = Self::nonneg_mask(&config);
        let normal = Normal::new(0.0, (1.0 / config.hidden as f64).sqrt())
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let theta = (0..n)
            .map(|i| {
                let w: f64 = normal.sample(rng);
                if mask[i] {
                    w.abs()
                } else {
                    w
                }
            })
            .collect();
        Self::new(config, theta)
    }
}

impl Potential for Icnn {
    fn name(&self) -> String {
        format!("icnn {} {}x{}", self.config.variant, self.config.layers, self.config.hidden)
    }

    fn params(&self) -> Vec<f64> {
        self.theta.clone()
    }

    fn energy<S: Scalar>(&self, theta: &[S], x: [S; 3]) -> S {
        let lay = self.layout();
        let h = lay.hidden;
        let skip = |l: usize, u: usize| {
            let o = lay.skip_index(l, u, 0);
            x[0] * theta[o] + x[1] * theta[o + 1] + x[2] * theta[o + 2]
        };
        let mut z: Vec<S> = (0..h).map(|u| (skip(0, u) + theta[lay.bias + u]).softplus()).collect();
        for l in 1..lay.layers {
            z = (0..h)
                .map(|u| {
                    let row = &theta[lay.weight_index(l, u, 0)..lay.weight_index(l, u, 0) + h];
                    let mut acc = skip(l, u);
                    for (w, zv) in row.iter().zip(&z) {
                        acc = acc + *zv * *w;
                    }
                    acc.softplus()
                })
                .collect();
        }
        let mut out = S::zero();
        for (w, zv) in theta[lay.output..].iter().zip(&z) {
            out = out + *zv * *w;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::InvariantTriplet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parameter_counts() {
        let c = IcnnConfig { layers: 2, hidden: 32, variant: Variant::Relaxed };
        assert_eq!(Icnn::n_params_of(&c), 4 * 32 + 32 * 32 + 3 * 32 + 32);
        assert_eq!(Icnn::n_params_of(&IcnnConfig::default()), 41600);
    }

    #[test]
    fn single_unit_is_softplus_of_i1() {
        let c = IcnnConfig { layers: 1, hidden: 1, variant: Variant::Polyconvex };
        // [w_I1, w_I2, w_J, b, w_out]
        let net = Icnn::new(c, vec![1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let v = net.value(&InvariantTriplet::new(3.0, 1.0, 1.0)).unwrap();
        assert!((v - (1.0 + 3f64.exp()).ln()).abs() < 1e-14);
    }

    #[test]
    fn mask_violation_is_structural() {
        let c = IcnnConfig { layers: 1, hidden: 1, variant: Variant::Polyconvex };
        assert!(matches!(Icnn::new(c, vec![-1.0, 0.0, 0.0, 0.0, 1.0]), Err(Error::Structure(_))));
        let c = IcnnConfig { variant: Variant::Relaxed, ..c };
        assert!(Icnn::new(c, vec![-1.0, 0.0, -2.0, 0.0, 1.0]).is_ok());
    }

    #[test]
    fn init_respects_mask() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for v in Variant::ALL {
            let c = IcnnConfig { layers: 2, hidden: 8, variant: v };
            let net = Icnn::init(c, &mut rng).unwrap();
            assert_eq!(mask_violation(&net.theta, &Icnn::nonneg_mask(&c)), None);
        }
    }
}
