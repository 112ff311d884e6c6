use serde::{Deserialize, Serialize};

use crate::diff::{sigmoid_f64, Scalar};

/// Lower stretch limit of the hard-concrete distribution.
pub const GAMMA: f64 = -0.1;
/// Upper stretch limit.
pub const ZETA: f64 = 1.1;
/// Temperature.
pub const BETA: f64 = 2.0 / 3.0;
/// Deterministic gates below this value are rounded to zero before pruning.
pub const ROUND_THRESHOLD: f64 = 0.05;

/// Hard-concrete gate logits, one per gated parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    pub log_alpha: Vec<f64>,
}

impl GateParams {
    pub fn new(n: usize, init: f64) -> Self {
        Self { log_alpha: vec![init; n] }
    }

    pub fn len(&self) -> usize {
        self.log_alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_alpha.is_empty()
    }

    pub fn deterministic(&self) -> Vec<f64> {
        self.log_alpha.iter().map(|&a| deterministic_gate(a)).collect()
    }

    /// Deterministic gates with small values snapped to zero.
    pub fn rounded(&self) -> Vec<f64> {
        self.deterministic().into_iter().map(round_gate).collect()
    }

    /// Fraction of gates that are exactly zero after rounding.
    pub fn closed_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.rounded().iter().filter(|&&z| z == 0.0).count() as f64 / self.len() as f64
    }
}

fn stretch<S: Scalar>(s: S) -> S {
    let z = s * (ZETA - GAMMA) + GAMMA;
    if z.value() <= 0.0 {
        S::zero()
    } else if z.value() >= 1.0 {
        S::one()
    } else {
        z
    }
}

/// Sampled gate `clamp(sigmoid((ln u − ln(1−u) + ln α)/β)·(ζ−γ) + γ, 0, 1)`.
pub fn stochastic_gate<S: Scalar>(log_alpha: S, u: f64) -> S {
    let noise = u.ln() - (1.0 - u).ln();
    stretch(((log_alpha + noise) / BETA).sigmoid())
}

/// Evaluation-time gate `clamp(sigmoid(ln α)·(ζ−γ) + γ, 0, 1)`.
pub fn deterministic_gate(log_alpha: f64) -> f64 {
    stretch(sigmoid_f64(log_alpha))
}

pub fn round_gate(z: f64) -> f64 {
    if z < ROUND_THRESHOLD {
        0.0
    } else {
        z
    }
}

/// Expected number of open gates, `Σ sigmoid(ln α − β ln(−γ/ζ))`.
pub fn l0_complexity<S: Scalar>(log_alpha: &[S]) -> S {
    let shift = BETA * (-GAMMA / ZETA).ln();
    log_alpha.iter().fold(S::zero(), |acc, &a| acc + (a - shift).sigmoid())
}
