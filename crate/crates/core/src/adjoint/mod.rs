//! Calibration of potential parameters against full-field displacement and
//! reaction-force data. Each recorded load step is an equilibrium `R_f(u, θ) = 0`;
//! its contribution to `dJ/dθ` comes from one transposed tangent solve
//! `K_ffᵀ λ = −∂J/∂u_f` and parameter-seeded residual sensitivities.

mod lbfgs;

pub use lbfgs::{calibrate, write_history, CalibrationOutcome, HistoryRecord, LbfgsConfig, HISTORY_HEADER};

use serde::{Deserialize, Serialize};

use crate::diff::Dual1;
use crate::error::{Error, Result};
use crate::fem::{
    assemble, residual_with, solve_path, tangent_transpose_product, DicDataset, Dirichlet, Mesh2D, NewtonOptions,
    StepState,
};
use crate::kinematics::InvariantTriplet;
use crate::materials::Potential;
use crate::model::AnyModel;
use crate::polyconvexity::indicator_penalty_with;

/// Objective weights. `alpha1 = None` balances the force term against the
/// displacement term at the starting parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObjectiveWeights {
    pub alpha1: Option<f64>,
    pub alpha2: f64,
    /// Weight of the polyconvexity-indicator penalty at `indicator_points`.
    pub indicator: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self { alpha1: None, alpha2: 1e-4, indicator: 0.0 }
    }
}

/// Components of the calibration objective.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub total: f64,
    /// `½ Σ_steps Σ_nodes a_n |u − d|²`.
    pub displacement: f64,
    /// `(α1/2) Σ_steps (F − F_d)²`.
    pub force: f64,
    /// `α2 ‖θ − θ0‖²` plus the indicator penalty.
    pub regularization: f64,
}

pub struct CalibrationProblem<'a> {
    pub mesh: &'a Mesh2D,
    /// Model whose parameters are the design variables.
    pub model: AnyModel,
    pub dic: &'a DicDataset,
    pub theta0: Vec<f64>,
    pub alpha1: f64,
    pub alpha2: f64,
    pub indicator_weight: f64,
    pub indicator_points: Vec<InvariantTriplet>,
    pub newton: NewtonOptions,
    tributary: Vec<f64>,
}

/// Objective, gradient and the solved states at one parameter vector.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub breakdown: Breakdown,
    pub gradient: Vec<f64>,
    pub states: Vec<StepState>,
    /// Adjoint field per recorded step (zeros on prescribed dofs).
    pub adjoints: Vec<Vec<f64>>,
}

impl<'a> CalibrationProblem<'a> {
    /// Set up with `theta0 = model.params()`; resolves an automatic `alpha1`
    /// with one forward solve.
    pub fn new(mesh: &'a Mesh2D, model: AnyModel, dic: &'a DicDataset, weights: &ObjectiveWeights) -> Result<Self> {
        mesh.validate()?;
        for s in &dic.steps {
            if s.u.len() != mesh.n_dofs() {
                return Err(Error::InvalidArgument(format!(
                    "dataset step {} has {} values, mesh has {} dofs",
                    s.step,
                    s.u.len(),
                    mesh.n_dofs()
                )));
            }
        }
        let theta0 = model.params();
        let mut p = Self {
            mesh,
            model,
            dic,
            theta0,
            alpha1: weights.alpha1.unwrap_or(1.0),
            alpha2: weights.alpha2,
            indicator_weight: weights.indicator,
            indicator_points: Vec::new(),
            newton: NewtonOptions::default(),
            tributary: mesh.tributary_areas(),
        };
        if weights.alpha1.is_none() {
            let states = p.states(&p.theta0.clone())?;
            let (du, df) = p.misfits(&states);
            p.alpha1 = if df > 0.0 && du > 0.0 { du / df } else { 1.0 };
        }
        Ok(p)
    }

    pub fn n_params(&self) -> usize {
        self.theta0.len()
    }

    /// Recorded equilibrium states for parameters `theta`.
    pub fn states(&self, theta: &[f64]) -> Result<Vec<StepState>> {
        let m = self.model.with_params(theta)?;
        let path = solve_path(self.mesh, &m, &self.dic.schedule, &self.newton)?;
        self.dic
            .steps
            .iter()
            .map(|s| {
                path.get(s.step.wrapping_sub(1))
                    .cloned()
                    .ok_or_else(|| Error::InvalidArgument(format!("dataset step {} not in schedule", s.step)))
            })
            .collect()
    }

    /// Unweighted displacement misfit and `½ Σ (F − F_d)²`.
    fn misfits(&self, states: &[StepState]) -> (f64, f64) {
        let mut du = 0.0;
        let mut df = 0.0;
        for (s, d) in states.iter().zip(&self.dic.steps) {
            for (n, a) in self.tributary.iter().enumerate() {
                du += 0.5 * a * ((s.u[2 * n] - d.u[2 * n]).powi(2) + (s.u[2 * n + 1] - d.u[2 * n + 1]).powi(2));
            }
            df += 0.5 * (s.force - d.force).powi(2);
        }
        (du, df)
    }

    fn regularization(&self, theta: &[f64]) -> f64 {
        let l2: f64 = theta.iter().zip(&self.theta0).map(|(a, b)| (a - b).powi(2)).sum();
        let ind = if self.indicator_weight > 0.0 && !self.indicator_points.is_empty() {
            indicator_penalty_with(&self.model, theta, &self.indicator_points, self.indicator_weight)
        } else {
            0.0
        };
        self.alpha2 * l2 + ind
    }

    fn breakdown(&self, theta: &[f64], states: &[StepState]) -> Breakdown {
        let (du, df) = self.misfits(states);
        let force = self.alpha1 * df;
        let regularization = self.regularization(theta);
        Breakdown { total: du + force + regularization, displacement: du, force, regularization }
    }

    pub fn objective(&self, theta: &[f64]) -> Result<Breakdown> {
        self.check_len(theta)?;
        let states = self.states(theta)?;
        Ok(self.breakdown(theta, &states))
    }

    fn check_len(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::InvalidArgument(format!("expected {} parameters, got {}", self.n_params(), theta.len())));
        }
        Ok(())
    }

    /// Objective and adjoint gradient.
    pub fn evaluate(&self, theta: &[f64]) -> Result<Evaluation> {
        self.check_len(theta)?;
        let m = self.model.with_params(theta)?;
        let states = self.states(theta)?;
        let breakdown = self.breakdown(theta, &states);
        let n = theta.len();
        let mut gradient: Vec<f64> = theta.iter().zip(&self.theta0).map(|(a, b)| 2.0 * self.alpha2 * (a - b)).collect();
        if self.indicator_weight > 0.0 && !self.indicator_points.is_empty() {
            for k in 0..n {
                let th = seeded(theta, k);
                gradient[k] += indicator_penalty_with(&self.model, &th, &self.indicator_points, self.indicator_weight).d;
            }
        }
        let top = self.mesh.set("top")?;
        let mut e_top = vec![0.0; self.mesh.n_dofs()];
        for &node in top {
            e_top[2 * node + 1] = 1.0;
        }
        let mut adjoints = Vec::with_capacity(states.len());
        for (s, d) in states.iter().zip(&self.dic.steps) {
            let bc = Dirichlet::tensile(self.mesh, s.prescribed, self.dic.schedule.fix_top_ux)?;
            let map = bc.dof_map(self.mesh);
            let asm = assemble(self.mesh, &m, &s.u)?;
            let df = self.alpha1 * (s.force - d.force);
            let df_du = tangent_transpose_product(self.mesh, &asm.blocks, &e_top);
            let rhs: Vec<f64> = map
                .free
                .iter()
                .map(|&dof| -(self.tributary[dof / 2] * (s.u[dof] - d.u[dof]) + df * df_du[dof]))
                .collect();
            let lam_f = map.stiffness(self.mesh, &asm.blocks).factor()?.solve_transpose(&rhs);
            let mut lam = vec![0.0; self.mesh.n_dofs()];
            for (k, &dof) in map.free.iter().enumerate() {
                lam[dof] = lam_f[k];
            }
            for (k, g) in gradient.iter_mut().enumerate() {
                let r = residual_with(self.mesh, &self.model, &seeded(theta, k), &s.u)?;
                let dr_free: f64 = map.free.iter().map(|&dof| lam[dof] * r[dof].d).sum();
                let dforce: f64 = top.iter().map(|&node| r[2 * node + 1].d).sum();
                *g += dr_free + df * dforce;
            }
            adjoints.push(lam);
        }
        Ok(Evaluation { breakdown, gradient, states, adjoints })
    }
}

fn seeded(theta: &[f64], k: usize) -> Vec<Dual1> {
    theta
        .iter()
        .enumerate()
        .map(|(i, &t)| if i == k { Dual1::variable(t) } else { Dual1::constant(t) })
        .collect()
}
