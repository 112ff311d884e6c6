use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    batch_terms, l0_complexity, predict_stress, r2_score, stochastic_gate, Adam, GateParams, LabeledSample,
    TrainSchedule,
};
use crate::diff::{Scalar, Tape, Var};
use crate::error::{Error, Result};
use crate::model::{AnyModel, ModelFile};
use crate::pann::{extract_sparse_form, project_nonneg, Extraction, Icnn, IcnnConfig, Variant};

/// Everything that determines a pre-training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PretrainConfig {
    pub net: IcnnConfig,
    pub schedule: TrainSchedule,
    pub seed: u64,
    pub test_fraction: f64,
    /// Apply the input-dependency penalty.
    pub input_penalty: bool,
    /// Initial gate logit; the default opens every gate fully.
    pub gate_init: f64,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        Self {
            net: IcnnConfig::default(),
            schedule: TrainSchedule::default(),
            seed: 0,
            test_fraction: 0.2,
            input_penalty: true,
            gate_init: 3.0,
        }
    }
}

/// Per-epoch telemetry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub lr: f64,
    pub ramp: f64,
    pub loss: f64,
    pub stress: f64,
    pub l0: f64,
    pub input: f64,
    pub indicator: f64,
    pub r2_train: f64,
    pub r2_test: f64,
    pub open_gates: usize,
}

pub const TELEMETRY_HEADER: &str =
    "epoch,lr,ramp,loss,stress,l0,input,indicator,r2_train,r2_test,open_gates";

pub fn write_telemetry<W: Write>(out: &mut W, records: &[EpochRecord]) -> Result<()> {
    writeln!(out, "{TELEMETRY_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{:e},{},{:e},{:e},{:e},{:e},{:e},{},{},{}",
            r.epoch, r.lr, r.ramp, r.loss, r.stress, r.l0, r.input, r.indicator, r.r2_train, r.r2_test, r.open_gates
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct PretrainOutcome {
    /// Raw (ungated) network weights.
    pub net: Icnn,
    pub gates: GateParams,
    pub telemetry: Vec<EpochRecord>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Pruned closed form under the rounded deterministic gates.
    pub extraction: Extraction,
    /// Normalized pruned model.
    pub model: AnyModel,
    pub r2_train: f64,
    pub r2_test: f64,
    pub closed_fraction: f64,
}

impl PretrainOutcome {
    /// Dense network with gate logits, as a model file.
    pub fn dense_file(&self) -> ModelFile {
        dense_file(&self.net, &self.gates)
    }
}

fn dense_file(net: &Icnn, gates: &GateParams) -> ModelFile {
    let mut file = ModelFile::from_model(&AnyModel::dense(net.clone()).normalized());
    file.gates = Some(gates.log_alpha.clone());
    file
}

fn subset(data: &[LabeledSample], idx: &[usize]) -> Vec<LabeledSample> {
    idx.iter().map(|&i| data[i].clone()).collect()
}

fn r2_with(net: &Icnn, eff: &[f64], data: &[LabeledSample]) -> f64 {
    if data.is_empty() {
        return f64::NAN;
    }
    let truth: Vec<[f64; 3]> = data.iter().map(|s| s.s_diag).collect();
    r2_score(&predict_stress(net, eff, data), &truth)
}

/// Train a gated network on labeled stress data.
///
/// The loss per batch is the mean squared diagonal-stress error plus, ramped
/// in by the schedule, `w_L0` times the expected gate count, `w_input` times
/// the input-dependency penalty and (relaxed variant) `w_indicator` times the
/// polyconvexity indicator penalty. Masked weights are projected to zero
/// after every step. A non-finite loss aborts the run; when `checkpoint` is
/// given, the last finite state is written there first.
pub fn pretrain(cfg: &PretrainConfig, data: &[LabeledSample], checkpoint: Option<&Path>) -> Result<PretrainOutcome> {
    if data.len() < 2 {
        return Err(Error::InvalidArgument("pre-training needs at least two samples".into()));
    }
    if !(0.0..1.0).contains(&cfg.test_fraction) {
        return Err(Error::InvalidArgument(format!("test fraction {} outside [0, 1)", cfg.test_fraction)));
    }
    let sched = &cfg.schedule;
    if sched.batch == 0 {
        return Err(Error::InvalidArgument("batch size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut net = Icnn::init(cfg.net, &mut rng)?;
    let n = net.theta.len();
    let mask = Icnn::nonneg_mask(&cfg.net);
    let mut gates = GateParams::new(n, cfg.gate_init);

    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut rng);
    let n_test = ((data.len() as f64) * cfg.test_fraction).round() as usize;
    let test: Vec<usize> = order[..n_test].to_vec();
    let mut train: Vec<usize> = order[n_test..].to_vec();
    let (train_set, test_set) = (subset(data, &train), subset(data, &test));

    let mut opt_w = Adam::new(n);
    let mut opt_g = Adam::new(n);
    let with_indicator = cfg.net.variant == Variant::Relaxed;
    let mut telemetry = Vec::with_capacity(sched.epochs);
    let mut last_good = (net.theta.clone(), gates.log_alpha.clone());

    for epoch in 0..sched.epochs {
        let lr = sched.lr(epoch);
        let ramp = sched.ramp(epoch);
        let (w_l0, w_in, w_ind) = (
            ramp * sched.w_l0,
            if cfg.input_penalty { ramp * sched.w_input } else { 0.0 },
            if with_indicator { ramp * sched.w_indicator } else { 0.0 },
        );
        train.shuffle(&mut rng);
        let mut sums = [0.0; 5];
        let mut n_batches = 0usize;
        for chunk in train.chunks(sched.batch) {
            let noise: Vec<f64> = (0..n).map(|_| rng.random::<f64>().clamp(1e-6, 1.0 - 1e-6)).collect();
            let batch: Vec<&LabeledSample> = chunk.iter().map(|&i| &data[i]).collect();
            let tape = Tape::with_capacity(1 << 16);
            let w = tape.vars(&net.theta);
            let la = tape.vars(&gates.log_alpha);
            let eff: Vec<Var> = w.iter().zip(&la).zip(&noise).map(|((&wi, &ai), &u)| wi * stochastic_gate(ai, u)).collect();
            let terms = batch_terms(&net, &eff, &batch, w_ind > 0.0);
            let l0 = l0_complexity(&la);
            let mut loss = terms.stress;
            if w_l0 > 0.0 {
                loss = loss + l0 * w_l0;
            }
            if w_in > 0.0 {
                loss = loss + terms.input * w_in;
            }
            if w_ind > 0.0 {
                loss = loss + terms.indicator * w_ind;
            }
            let lv = loss.value();
            if !lv.is_finite() {
                if let Some(path) = checkpoint {
                    let net_ok = Icnn { config: cfg.net, theta: last_good.0.clone() };
                    dense_file(&net_ok, &GateParams { log_alpha: last_good.1.clone() }).write(path)?;
                }
                return Err(Error::Diverged { epoch });
            }
            let mut leaves = w.clone();
            leaves.extend_from_slice(&la);
            let grad = tape.gradient(loss, &leaves)?;
            if grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged { epoch });
            }
            opt_w.step(&mut net.theta, &grad[..n], lr);
            project_nonneg(&mut net.theta, &mask);
            opt_g.step(&mut gates.log_alpha, &grad[n..], lr);
            for (s, v) in sums.iter_mut().zip([lv, terms.stress.value(), l0.value(), terms.input.value(), terms.indicator.value()]) {
                *s += v;
            }
            n_batches += 1;
        }
        last_good = (net.theta.clone(), gates.log_alpha.clone());
        let det = gates.deterministic();
        let eff: Vec<f64> = net.theta.iter().zip(&det).map(|(a, b)| a * b).collect();
        let nb = n_batches.max(1) as f64;
        telemetry.push(EpochRecord {
            epoch,
            lr,
            ramp,
            loss: sums[0] / nb,
            stress: sums[1] / nb,
            l0: sums[2] / nb,
            input: sums[3] / nb,
            indicator: sums[4] / nb,
            r2_train: r2_with(&net, &eff, &train_set),
            r2_test: r2_with(&net, &eff, &test_set),
            open_gates: det.iter().filter(|&&z| z > 0.0).count(),
        });
    }

    let rounded = gates.rounded();
    let extraction = extract_sparse_form(&net, &rounded)?;
    let model = AnyModel::expr(extraction.model.clone()).normalized();
    let theta = extraction.model.theta.clone();
    let r2_train = r2_with_model(&extraction, &theta, &train_set);
    let r2_test = r2_with_model(&extraction, &theta, &test_set);
    let closed_fraction = gates.closed_fraction();
    Ok(PretrainOutcome {
        net,
        gates,
        telemetry,
        train,
        test,
        extraction,
        model,
        r2_train,
        r2_test,
        closed_fraction,
    })
}

fn r2_with_model(ex: &Extraction, theta: &[f64], data: &[LabeledSample]) -> f64 {
    if data.is_empty() {
        return f64::NAN;
    }
    let truth: Vec<[f64; 3]> = data.iter().map(|s| s.s_diag).collect();
    r2_score(&predict_stress(&ex.model, theta, data), &truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{triplet_of_diagonal, InvariantTriplet};
    use crate::materials::{second_pk_stress, GentGent};

    fn toy_data() -> Vec<LabeledSample> {
        let m = GentGent::default();
        let mut out = Vec::new();
        for a in [0.85, 1.0, 1.15] {
            for b in [0.9, 1.1] {
                let c = [a, b, 1.05];
                let mut sorted = c;
                sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
                let s = second_pk_stress(&m, sorted).unwrap();
                let t = InvariantTriplet::from_array(triplet_of_diagonal(c));
                out.push(LabeledSample::new(t, s).unwrap());
            }
        }
        out
    }

    #[test]
    fn zero_epoch_run_returns_initial_net() {
        let cfg = PretrainConfig {
            net: IcnnConfig { layers: 2, hidden: 4, variant: Variant::Polyconvex },
            schedule: TrainSchedule { epochs: 0, ..TrainSchedule::default() },
            ..PretrainConfig::default()
        };
        let out = pretrain(&cfg, &toy_data(), None).unwrap();
        assert!(out.telemetry.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        assert_eq!(out.net, Icnn::init(cfg.net, &mut rng).unwrap());
        let mut buf = Vec::new();
        write_telemetry(&mut buf, &out.telemetry).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), TELEMETRY_HEADER);
    }

    #[test]
    fn short_run_is_reproducible_and_masked() {
        let cfg = PretrainConfig {
            net: IcnnConfig { layers: 2, hidden: 4, variant: Variant::Polyconvex },
            schedule: TrainSchedule { batch: 2, ..TrainSchedule::scaled(20) },
            seed: 5,
            ..PretrainConfig::default()
        };
        let a = pretrain(&cfg, &toy_data(), None).unwrap();
        let b = pretrain(&cfg, &toy_data(), None).unwrap();
        assert_eq!(a.net, b.net);
        assert_eq!(a.telemetry, b.telemetry);
        let mask = Icnn::nonneg_mask(&cfg.net);
        assert_eq!(crate::pann::mask_violation(&a.net.theta, &mask), None);
    }
}
