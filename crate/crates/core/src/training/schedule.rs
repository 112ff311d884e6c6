use serde::{Deserialize, Serialize};

/// Epoch-indexed learning-rate and penalty-weight schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainSchedule {
    pub epochs: usize,
    pub batch: usize,
    pub lr0: f64,
    /// Learning rate is divided by `lr_factor` every `lr_step` epochs.
    pub lr_step: usize,
    pub lr_factor: f64,
    /// First epoch with non-zero penalties.
    pub penalty_start: usize,
    /// Length of the linear penalty ramp.
    pub warmup: usize,
    pub w_l0: f64,
    pub w_input: f64,
    /// Indicator penalty weight (relaxed variant only).
    pub w_indicator: f64,
}

impl Default for TrainSchedule {
    fn default() -> Self {
        Self {
            epochs: 2800,
            batch: 10,
            lr0: 0.1,
            lr_step: 700,
            lr_factor: 10.0,
            penalty_start: 1000,
            warmup: 500,
            w_l0: 1.0,
            w_input: 1e4,
            w_indicator: 1.0,
        }
    }
}

impl TrainSchedule {
    /// Default schedule compressed proportionally to `epochs`.
    pub fn scaled(epochs: usize) -> Self {
        let full = Self::default();
        let scale = |n: usize| ((n as f64 * epochs as f64 / full.epochs as f64).round() as usize).max(1);
        Self {
            epochs,
            lr_step: scale(full.lr_step),
            penalty_start: scale(full.penalty_start),
            warmup: scale(full.warmup),
            ..full
        }
    }

    pub fn lr(&self, epoch: usize) -> f64 {
        self.lr0 / self.lr_factor.powi((epoch / self.lr_step.max(1)) as i32)
    }

    /// Penalty ramp in `[0, 1]`: zero before `penalty_start`, linear over `warmup`.
    pub fn ramp(&self, epoch: usize) -> f64 {
        if epoch < self.penalty_start {
            0.0
        } else if self.warmup == 0 {
            1.0
        } else {
            ((epoch - self.penalty_start) as f64 / self.warmup as f64).min(1.0)
        }
    }
}
