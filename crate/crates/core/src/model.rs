//! Runtime-selected potentials and their JSON file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diff::Scalar;
use crate::error::{Error, Result};
use crate::kinematics::InvariantTriplet;
use crate::materials::{normalization_terms, GentGent, NeoHookean, Ogden, Potential};
use crate::pann::{Expr, ExprModel, Icnn, IcnnConfig, SparseModel, Variant};

/// Concrete potential families.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseModel {
    GentGent(GentGent),
    NeoHookean(NeoHookean),
    Ogden(Ogden),
    Sparse(SparseModel),
    Expr(ExprModel),
    Dense(Icnn),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            BaseModel::GentGent($m) => $body,
            BaseModel::NeoHookean($m) => $body,
            BaseModel::Ogden($m) => $body,
            BaseModel::Sparse($m) => $body,
            BaseModel::Expr($m) => $body,
            BaseModel::Dense($m) => $body,
        }
    };
}

impl Potential for BaseModel {
    fn name(&self) -> String {
        dispatch!(self, m => m.name())
    }

    fn params(&self) -> Vec<f64> {
        dispatch!(self, m => m.params())
    }

    fn energy<S: Scalar>(&self, theta: &[S], x: [S; 3]) -> S {
        dispatch!(self, m => m.energy(theta, x))
    }

    fn check_domain(&self, theta: &[f64], t: &InvariantTriplet) -> Result<()> {
        dispatch!(self, m => m.check_domain(theta, t))
    }
}

impl BaseModel {
    pub fn variant(&self) -> Option<Variant> {
        match self {
            BaseModel::Sparse(m) => Some(m.variant),
            BaseModel::Expr(m) => Some(m.variant),
            BaseModel::Dense(m) => Some(m.config.variant),
            _ => None,
        }
    }

    /// Same model with a replaced parameter vector.
    pub fn with_params(&self, t: &[f64]) -> Result<Self> {
        if t.len() != self.n_params() {
            return Err(Error::InvalidArgument(format!(
                "{} takes {} parameters, got {}",
                self.name(),
                self.n_params(),
                t.len()
            )));
        }
        Ok(match self {
            BaseModel::GentGent(_) => BaseModel::GentGent(GentGent { mu: t[0], jm: t[1], kappa: t[2], c2: t[3] }),
            BaseModel::NeoHookean(_) => BaseModel::NeoHookean(NeoHookean { mu: t[0], lambda: t[1] }),
            BaseModel::Ogden(_) => BaseModel::Ogden(Ogden {
                c10: t[0],
                c01: t[1],
                c20: t[2],
                c02: t[3],
                c30: t[4],
                c03: t[5],
                kappa: t[6],
            }),
            BaseModel::Sparse(m) => BaseModel::Sparse(SparseModel { variant: m.variant, theta: t.to_vec() }),
            BaseModel::Expr(m) => BaseModel::Expr(ExprModel { theta: t.to_vec(), ..m.clone() }),
            BaseModel::Dense(m) => BaseModel::Dense(Icnn { config: m.config, theta: t.to_vec() }),
        })
    }
}

/// Any potential the toolkit knows how to build, calibrate and serialize,
/// optionally shifted so energy and stress vanish at the reference state.
#[derive(Clone, Debug, PartialEq)]
pub struct AnyModel {
    pub base: BaseModel,
    pub normalized: bool,
}

impl From<BaseModel> for AnyModel {
    fn from(base: BaseModel) -> Self {
        Self { base, normalized: false }
    }
}

impl AnyModel {
    pub fn gent_gent(m: GentGent) -> Self {
        BaseModel::GentGent(m).into()
    }

    pub fn neo_hookean(m: NeoHookean) -> Self {
        BaseModel::NeoHookean(m).into()
    }

    pub fn ogden(m: Ogden) -> Self {
        BaseModel::Ogden(m).into()
    }

    pub fn sparse(m: SparseModel) -> Self {
        BaseModel::Sparse(m).into()
    }

    pub fn expr(m: ExprModel) -> Self {
        BaseModel::Expr(m).into()
    }

    pub fn dense(m: Icnn) -> Self {
        BaseModel::Dense(m).into()
    }

    pub fn normalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    pub fn variant(&self) -> Option<Variant> {
        self.base.variant()
    }

    /// Entries that must stay non-negative under calibration. Only the
    /// polyconvex variant enforces its mask; other models are unconstrained.
    pub fn calibration_mask(&self) -> Vec<bool> {
        match &self.base {
            BaseModel::Sparse(m) if m.variant == Variant::Polyconvex => SparseModel::nonneg_mask(m.variant),
            BaseModel::Expr(m) if m.variant == Variant::Polyconvex => m.nonneg.clone(),
            BaseModel::Dense(m) if m.config.variant == Variant::Polyconvex => Icnn::nonneg_mask(&m.config),
            _ => vec![false; self.n_params()],
        }
    }

    pub fn with_params(&self, theta: &[f64]) -> Result<Self> {
        Ok(Self { base: self.base.with_params(theta)?, normalized: self.normalized })
    }

    /// Pretty closed form, where one exists.
    pub fn formula(&self) -> Option<String> {
        match &self.base {
            BaseModel::Expr(m) => Some(m.to_string()),
            _ => None,
        }
    }
}

impl Potential for AnyModel {
    fn name(&self) -> String {
        if self.normalized {
            format!("normalized {}", self.base.name())
        } else {
            self.base.name()
        }
    }

    fn params(&self) -> Vec<f64> {
        self.base.params()
    }

    fn energy<S: Scalar>(&self, theta: &[S], x: [S; 3]) -> S {
        let raw = self.base.energy(theta, x);
        if self.normalized {
            let (phi0, n) = normalization_terms(&self.base, theta);
            raw - phi0 - n * (x[2] - 1.0)
        } else {
            raw
        }
    }

    fn check_domain(&self, theta: &[f64], t: &InvariantTriplet) -> Result<()> {
        self.base.check_domain(theta, t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    Analytic,
    Sparse,
    Expr,
    Dense,
}

/// Reference offsets removed by normalization, recorded for inspection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub phi0: f64,
    pub n: f64,
}

/// On-disk model description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub form: Form,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<IcnnConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonneg: Option<Vec<bool>>,
    /// Gate logits of a dense network, when it was trained with gates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gates: Option<Vec<f64>>,
    pub normalization: Option<NormalizationRecord>,
}

impl ModelFile {
    pub fn from_model(model: &AnyModel) -> Self {
        let normalization = model.normalized.then(|| {
            let (phi0, n) = normalization_terms(&model.base, &model.params());
            NormalizationRecord { phi0, n }
        });
        let params = model.params();
        let mut file = ModelFile {
            form: Form::Analytic,
            material: None,
            variant: model.variant(),
            params,
            config: None,
            expr: None,
            nonneg: None,
            gates: None,
            normalization,
        };
        match &model.base {
            BaseModel::GentGent(_) => file.material = Some("gent_gent".into()),
            BaseModel::NeoHookean(_) => file.material = Some("neo_hookean".into()),
            BaseModel::Ogden(_) => file.material = Some("ogden".into()),
            BaseModel::Sparse(_) => file.form = Form::Sparse,
            BaseModel::Expr(m) => {
                file.form = Form::Expr;
                file.expr = Some(m.expr.clone());
                file.nonneg = Some(m.nonneg.clone());
            }
            BaseModel::Dense(m) => {
                file.form = Form::Dense;
                file.config = Some(m.config);
            }
        }
        file
    }

    pub fn to_model(&self) -> Result<AnyModel> {
        let p = &self.params;
        let need = |what: &str| Error::Parse(format!("{:?} model file is missing `{what}`", self.form));
        let base = match self.form {
            Form::Analytic => {
                let material = self.material.as_deref().ok_or_else(|| need("material"))?;
                let probe = match material {
                    "gent_gent" => BaseModel::GentGent(GentGent::default()),
                    "neo_hookean" => BaseModel::NeoHookean(NeoHookean::default()),
                    "ogden" => BaseModel::Ogden(Ogden::default()),
                    other => return Err(Error::Parse(format!("unknown material `{other}`"))),
                };
                probe.with_params(p)?
            }
            Form::Sparse => {
                let variant = self.variant.ok_or_else(|| need("variant"))?;
                BaseModel::Sparse(SparseModel::new(variant, p.clone())?)
            }
            Form::Expr => {
                let variant = self.variant.ok_or_else(|| need("variant"))?;
                let expr = self.expr.clone().ok_or_else(|| need("expr"))?;
                let nonneg = self.nonneg.clone().unwrap_or_else(|| vec![false; p.len()]);
                BaseModel::Expr(ExprModel::new(variant, expr, p.clone(), nonneg)?)
            }
            Form::Dense => {
                let config = self.config.ok_or_else(|| need("config"))?;
                BaseModel::Dense(Icnn::new(config, p.clone())?)
            }
        };
        Ok(AnyModel { base, normalized: self.normalization.is_some() })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

pub fn load_model(path: &Path) -> Result<AnyModel> {
    ModelFile::read(path)?.to_model()
}

pub fn save_model(model: &AnyModel, path: &Path) -> Result<()> {
    ModelFile::from_model(model).write(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_json() {
        let models = vec![
            AnyModel::gent_gent(GentGent::default()),
            AnyModel::ogden(Ogden::default()).normalized(),
            AnyModel::sparse(SparseModel::pretrained(Variant::Relaxed)).normalized(),
        ];
        for m in models {
            let json = serde_json::to_string(&ModelFile::from_model(&m)).unwrap();
            let back: ModelFile = serde_json::from_str(&json).unwrap();
            assert_eq!(back.to_model().unwrap(), m);
        }
    }

    #[test]
    fn normalized_wrapper_matches_generic_normalization() {
        let raw = SparseModel::pretrained(Variant::Polyconvex);
        let a = crate::materials::Normalized::new(raw.clone());
        let b = AnyModel::sparse(raw).normalized();
        let t = InvariantTriplet::new(3.7, 4.1, 1.2);
        assert_eq!(a.eval(&t).unwrap(), b.eval(&t).unwrap());
    }

    #[test]
    fn with_params_checks_length() {
        let m = AnyModel::neo_hookean(NeoHookean::default());
        assert!(m.with_params(&[1.0]).is_err());
        assert_eq!(m.with_params(&[2.0, 0.5]).unwrap().params(), vec![2.0, 0.5]);
    }
}
