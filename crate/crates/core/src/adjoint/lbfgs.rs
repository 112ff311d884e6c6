use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Breakdown, CalibrationProblem};
use crate::error::Result;

/// Limited-memory BFGS with projected backtracking (Armijo) line search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LbfgsConfig {
    pub max_iter: usize,
    pub memory: usize,
    /// Stop when `‖∇J‖∞` falls below this.
    pub gtol: f64,
    /// Stop when the relative objective decrease of an iteration is below this.
    pub ftol: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        Self { max_iter: 50, memory: 10, gtol: 1e-12, ftol: 1e-14, armijo: 1e-4, max_backtracks: 30 }
    }
}

/// Per-iteration record; iteration 0 is the starting point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub iteration: usize,
    pub total: f64,
    pub displacement: f64,
    pub force: f64,
    pub regularization: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub evaluations: usize,
}

pub const HISTORY_HEADER: &str = "iteration,total,displacement,force,regularization,grad_norm,step,evaluations";

pub fn write_history<W: Write>(out: &mut W, history: &[HistoryRecord]) -> Result<()> {
    writeln!(out, "{HISTORY_HEADER}")?;
    for h in history {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            h.iteration, h.total, h.displacement, h.force, h.regularization, h.grad_norm, h.step, h.evaluations
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOutcome {
    pub theta: Vec<f64>,
    pub breakdown: Breakdown,
    pub history: Vec<HistoryRecord>,
    /// Why the iteration stopped.
    pub reason: String,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project(theta: &mut [f64], mask: &[bool]) {
    for (t, &m) in theta.iter_mut().zip(mask) {
        if m && *t < 0.0 {
            *t = 0.0;
        }
    }
}

/// Minimize the calibration objective from `theta0`. Failed forward solves
/// count as an infinite objective during the line search; a line-search
/// failure ends the run with the best iterate.
pub fn calibrate(p: &CalibrationProblem<'_>, theta0: &[f64], cfg: &LbfgsConfig) -> Result<CalibrationOutcome> {
    let mask = p.model.calibration_mask();
    let mut theta = theta0.to_vec();
    project(&mut theta, &mask);
    let mut ev = p.evaluate(&theta)?;
    let mut evaluations = 1;
    let record = |it: usize, b: &Breakdown, g: &[f64], step: f64, evals: usize| HistoryRecord {
        iteration: it,
        total: b.total,
        displacement: b.displacement,
        force: b.force,
        regularization: b.regularization,
        grad_norm: g.iter().fold(0.0f64, |a, v| a.max(v.abs())),
        step,
        evaluations: evals,
    };
    let mut history = vec![record(0, &ev.breakdown, &ev.gradient, 0.0, evaluations)];
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut reason = "iteration limit".to_string();

    for it in 1..=cfg.max_iter {
        let g = &ev.gradient;
        if g.iter().all(|v| v.abs() < cfg.gtol) {
            reason = "gradient tolerance".into();
            break;
        }
        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(pairs.len());
        for (s, y, rho) in pairs.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = match pairs.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1.0 / dot(g, g).sqrt().max(1e-300),
        };
        for qi in &mut q {
            *qi *= gamma;
        }
        for ((s, y, rho), a) in pairs.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        if dot(&dir, g) >= 0.0 {
            pairs.clear();
            let scale = 1.0 / dot(g, g).sqrt().max(1e-300);
            dir = g.iter().map(|v| -v * scale).collect();
        }

        let f0 = ev.breakdown.total;
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let mut trial: Vec<f64> = theta.iter().zip(&dir).map(|(t, d)| t + step * d).collect();
            project(&mut trial, &mask);
            let moved: Vec<f64> = trial.iter().zip(&theta).map(|(a, b)| a - b).collect();
            evaluations += 1;
            if let Ok(b) = p.objective(&trial) {
                if b.total.is_finite() && b.total <= f0 + cfg.armijo * dot(g, &moved) {
                    accepted = Some(trial);
                    break;
                }
            }
            step *= 0.5;
        }
        let Some(next) = accepted else {
            reason = "line search failed".into();
            break;
        };
        let next_ev = p.evaluate(&next)?;
        evaluations += 1;
        let s: Vec<f64> = next.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = next_ev.gradient.iter().zip(&ev.gradient).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() && sy > 0.0 {
            if pairs.len() == cfg.memory.max(1) {
                pairs.pop_front();
            }
            pairs.push_back((s, y, 1.0 / sy));
        }
        let decrease = f0 - next_ev.breakdown.total;
        theta = next;
        ev = next_ev;
        history.push(record(it, &ev.breakdown, &ev.gradient, step, evaluations));
        if decrease <= cfg.ftol * f0.abs() {
            reason = "objective stalled".into();
            break;
        }
    }
    Ok(CalibrationOutcome { theta, breakdown: ev.breakdown, history, reason })
}
