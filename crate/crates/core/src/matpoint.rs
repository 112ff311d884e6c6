//! Single material-point tests: traction-free uniaxial tension by Newton's
//! method on the lateral stretch, and curve-wise comparison of a model
//! against a reference potential in the canonical constrained modes.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{InvariantTriplet, LoadingMode};
use crate::materials::Potential;
use crate::sampling::canonical_test_data;

/// Converged traction-free uniaxial state `F = diag(λ, λ₂, λ₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniaxialState {
    pub lambda: f64,
    pub lambda2: f64,
    pub s11: f64,
    pub s22: f64,
    /// `∂S22/∂λ₂` at the solution.
    pub slope: f64,
    pub iterations: usize,
}

pub const UNIAXIAL_TOL: f64 = 1e-10;
const MAX_ITER: usize = 50;
const MAX_HALVINGS: usize = 20;

/// Lateral stress, its derivative in `λ₂` and the axial stress.
fn lateral<M: Potential + ?Sized>(m: &M, l: f64, l2: f64) -> Result<(f64, f64, f64)> {
    let b = l2 * l2;
    let t = InvariantTriplet::new(l * l + 2.0 * b, 2.0 * l * l * b + b * b, l * b);
    let d = m.eval(&t)?;
    let [p1, p2, pj] = d.g;
    let di = [4.0 * l2, 4.0 * l * l * l2 + 4.0 * l2 * b, 2.0 * l * l2];
    let dp = |a: usize| (0..3).map(|k| d.hess(a, k) * di[k]).sum::<f64>();
    let s22 = 2.0 * p1 + 2.0 * (l * l + b) * p2 + l * pj;
    let ds22 = 2.0 * dp(0) + 2.0 * (l * l + b) * dp(1) + 4.0 * l2 * p2 + l * dp(2);
    let s11 = 2.0 * p1 + 4.0 * b * p2 + b / l * pj;
    Ok((s22, ds22, s11))
}

/// Solve `S22(λ₂) = 0` at axial stretch `lambda`, starting from `guess`
/// (default `λ^{-1/4}`), with step halving whenever `|S22|` fails to drop.
pub fn uniaxial_newton<M: Potential + ?Sized>(m: &M, lambda: f64, guess: Option<f64>) -> Result<UniaxialState> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("axial stretch must be positive, got {lambda}")));
    }
    let mut l2 = guess.unwrap_or(lambda.powf(-0.25));
    let (mut s22, mut ds, mut s11) = lateral(m, lambda, l2)?;
    for it in 0..=MAX_ITER {
        if s22.abs() < UNIAXIAL_TOL {
            if ds == 0.0 {
                return Err(Error::Domain(format!("degenerate lateral tangent at λ = {lambda}")));
            }
            return Ok(UniaxialState { lambda, lambda2: l2, s11, s22, slope: ds, iterations: it });
        }
        if it == MAX_ITER || ds == 0.0 || !ds.is_finite() {
            break;
        }
        let step = -s22 / ds;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial = l2 + scale * step;
            if trial > 0.0 {
                if let Ok(next) = lateral(m, lambda, trial) {
                    if next.0.abs() < s22.abs() {
                        l2 = trial;
                        (s22, ds, s11) = next;
                        accepted = true;
                        break;
                    }
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITER, residual: s22.abs() })
}

/// Uniaxial states along `lambdas`, each solve seeded with the previous one.
pub fn uniaxial_curve<M: Potential + ?Sized>(m: &M, lambdas: &[f64]) -> Result<Vec<UniaxialState>> {
    let mut guess = None;
    lambdas
        .iter()
        .map(|&l| {
            let s = uniaxial_newton(m, l, guess)?;
            guess = Some(s.lambda2);
            Ok(s)
        })
        .collect()
}

/// Control range inside which the pre-training data lie.
pub fn training_window(mode: LoadingMode) -> (f64, f64) {
    match mode {
        LoadingMode::SimpleShear => (-0.2, 0.2),
        _ => (0.8, 1.2),
    }
}

/// Truth vs prediction at one control value (`S11, S22, S33, S12`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPoint {
    pub mode: LoadingMode,
    pub control: f64,
    pub in_range: bool,
    pub truth_energy: f64,
    pub pred_energy: f64,
    pub truth: [f64; 4],
    pub pred: [f64; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeScore {
    pub mode: LoadingMode,
    pub r2_inside: f64,
    pub r2_outside: f64,
    pub r2_all: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub points: Vec<ComparisonPoint>,
    pub scores: Vec<ModeScore>,
}

/// Pooled coefficient of determination over stress components, each
/// centred on its own mean.
pub fn pooled_r2(points: &[&ComparisonPoint]) -> f64 {
    if points.is_empty() {
        return f64::NAN;
    }
    let n = points.len() as f64;
    let (mut res, mut tot) = (0.0, 0.0);
    for k in 0..4 {
        let mean = points.iter().map(|p| p.truth[k]).sum::<f64>() / n;
        for p in points {
            res += (p.pred[k] - p.truth[k]).powi(2);
            tot += (p.truth[k] - mean).powi(2);
        }
    }
    if tot > 0.0 {
        1.0 - res / tot
    } else if res == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    }
}

fn components(s: &nalgebra::Matrix3<f64>) -> [f64; 4] {
    [s[(0, 0)], s[(1, 1)], s[(2, 2)], s[(0, 1)]]
}

/// Compare `model` to `truth` along each mode over its control `range`
/// with `steps + 1` points.
pub fn run_validation<M: Potential + ?Sized, T: Potential + ?Sized>(
    model: &M,
    truth: &T,
    modes: &[LoadingMode],
    range: impl Fn(LoadingMode) -> (f64, f64),
    steps: usize,
) -> Result<ValidationReport> {
    let mut points = Vec::new();
    let mut scores = Vec::new();
    for &mode in modes {
        let (lo, hi) = range(mode);
        let want = canonical_test_data(truth, mode, lo, hi, steps)?;
        let got = canonical_test_data(model, mode, lo, hi, steps)?;
        let (wl, wh) = training_window(mode);
        let start = points.len();
        for (w, g) in want.iter().zip(&got) {
            points.push(ComparisonPoint {
                mode,
                control: w.control,
                in_range: w.control >= wl - 1e-12 && w.control <= wh + 1e-12,
                truth_energy: w.energy,
                pred_energy: g.energy,
                truth: components(&w.s),
                pred: components(&g.s),
            });
        }
        let mine = &points[start..];
        let inside: Vec<_> = mine.iter().filter(|p| p.in_range).collect();
        let outside: Vec<_> = mine.iter().filter(|p| !p.in_range).collect();
        scores.push(ModeScore {
            mode,
            r2_inside: pooled_r2(&inside),
            r2_outside: pooled_r2(&outside),
            r2_all: pooled_r2(&mine.iter().collect::<Vec<_>>()),
        });
    }
    Ok(ValidationReport { points, scores })
}

pub const VALIDATION_HEADER: &str =
    "mode,control,in_range,truth_energy,pred_energy,truth_s11,pred_s11,truth_s22,pred_s22,truth_s33,pred_s33,truth_s12,pred_s12";

impl ValidationReport {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "{VALIDATION_HEADER}")?;
        for p in &self.points {
            write!(out, "{},{},{},{},{}", p.mode.name(), p.control, p.in_range, p.truth_energy, p.pred_energy)?;
            for k in 0..4 {
                write!(out, ",{},{}", p.truth[k], p.pred[k])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn score(&self, mode: LoadingMode) -> Option<&ModeScore> {
        self.scores.iter().find(|s| s.mode == mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{GentGent, NeoHookean};
    use crate::sampling::canonical_range;

    #[test]
    fn reference_stretch_is_stress_free() {
        let s = uniaxial_newton(&GentGent::default(), 1.0, None).unwrap();
        assert!((s.lambda2 - 1.0).abs() < 1e-10);
        assert!(s.s11.abs() < 1e-9);
    }

    #[test]
    fn lateral_slope_matches_difference() {
        let m = NeoHookean::default();
        let (l, l2, h) = (1.3, 0.9, 1e-6);
        let (_, ds, _) = lateral(&m, l, l2).unwrap();
        let fd = (lateral(&m, l, l2 + h).unwrap().0 - lateral(&m, l, l2 - h).unwrap().0) / (2.0 * h);
        assert!((ds - fd).abs() < 1e-7 * (1.0 + fd.abs()));
    }

    #[test]
    fn self_comparison_scores_one() {
        let m = GentGent::default();
        let r = run_validation(&m, &m, &LoadingMode::ALL, canonical_range, 20).unwrap();
        assert!(r.scores.iter().all(|s| s.r2_inside == 1.0 && s.r2_outside == 1.0));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 3 * 21);
    }

    #[test]
    fn uniaxial_tension_thins_laterally() {
        let c = uniaxial_curve(&NeoHookean::default(), &[1.0, 1.1, 1.2, 1.3]).unwrap();
        assert!(c.windows(2).all(|w| w[1].lambda2 < w[0].lambda2 && w[1].s11 > w[0].s11));
    }
}
