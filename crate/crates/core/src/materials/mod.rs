//! Strain-energy potentials `φ(I1, I2, J; θ)` and the stresses they induce.

mod analytic;
mod stress;

pub use analytic::{AnalyticSet, GentGent, NeoHookean, Ogden, GENT_GUARD};
pub use stress::{diag_stress_generic, first_pk_stress, invariant_partials, second_pk_full, second_pk_stress};

use crate::diff::{lift, Dual2, Scalar};
use crate::error::{Error, Result};
use crate::kinematics::InvariantTriplet;

/// Scalar strain-energy density of the isotropic invariants.
///
/// `energy` is written once against [`Scalar`] so the same expression gives
/// values, invariant derivatives (through [`Dual2`]) and parameter
/// sensitivities. The parameter vector is always passed explicitly; `params`
/// returns the model's own values.
pub trait Potential {
    fn name(&self) -> String;

    fn params(&self) -> Vec<f64>;

    fn energy<S: Scalar>(&self, theta: &[S], x: [S; 3]) -> S;

    /// Reject states outside the model's admissible region.
    fn check_domain(&self, _theta: &[f64], t: &InvariantTriplet) -> Result<()> {
        if !(t.j > 0.0) || !(t.i1 > 0.0) || !(t.i2 > 0.0) {
            return Err(Error::Domain(format!("invariants {t} outside admissible region")));
        }
        Ok(())
    }

    fn n_params(&self) -> usize {
        self.params().len()
    }

    /// Value and invariant derivatives at `t` for parameters `theta`.
    fn eval_with(&self, theta: &[f64], t: &InvariantTriplet) -> Result<Dual2<f64>> {
        self.check_domain(theta, t)?;
        let th = lift(theta);
        let out = self.energy(&th, Dual2::seed(t.as_array()));
        if !out.is_finite() {
            return Err(Error::Domain(format!("{} not finite at {t}", self.name())));
        }
        Ok(out)
    }

    fn eval(&self, t: &InvariantTriplet) -> Result<Dual2<f64>> {
        self.eval_with(&self.params(), t)
    }

    fn value(&self, t: &InvariantTriplet) -> Result<f64> {
        self.check_domain(&self.params(), t)?;
        let v = self.energy(&self.params(), t.as_array());
        if !v.is_finite() {
            return Err(Error::Domain(format!("{} not finite at {t}", self.name())));
        }
        Ok(v)
    }
}

impl<P: Potential + ?Sized> Potential for &P {
    fn name(&self) -> String {
        (**self).name()
    }
    fn params(&self) -> Vec<f64> {
        (**self).params()
    }
    fn energy<S: Scalar>(&self, theta: &[S], x: [S; 3]) -> S {
        (**self).energy(theta, x)
    }
    fn check_domain(&self, theta: &[f64], t: &InvariantTriplet) -> Result<()> {
        (**self).check_domain(theta, t)
    }
}

/// Energy offset `φ(3,3,1)` and stress constant `n = 2φ₁ + 4φ₂ + φ_J` at the
/// reference state, as functions of `theta`.
pub fn normalization_terms<M: Potential + ?Sized, S: Scalar>(model: &M, theta: &[S]) -> (S, S) {
    let th = lift(theta);
    let x = Dual2::seed([S::from_f64(3.0), S::from_f64(3.0), S::from_f64(1.0)]);
    let d = model.energy(&th, x);
    let n = d.g[0] * 2.0 + d.g[1] * 4.0 + d.g[2];
    (d.v, n)
}

/// `φ̂ = φ − φ(3,3,1) − n (J − 1)`: zero energy and zero stress at the
/// reference state. The shift is affine in `J`, so every second derivative
/// and the `I1`, `I2` first derivatives are untouched.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalized<M>(pub M);

impl<M> Normalized<M> {
    pub fn new(model: M) -> Self {
        Self(model)
    }

    pub fn inner(&self) -> &M {
        &self.0
    }
}

impl<M: Potential> Potential for Normalized<M> {
    fn name(&self) -> String {
        format!("normalized {}", self.0.name())
    }

    fn params(&self) -> Vec<f64> {
        self.0.params()
    }

    fn energy<S: Scalar>(&self, theta: &[S], x: [S; 3]) -> S {
        let (phi0, n) = normalization_terms(&self.0, theta);
        self.0.energy(theta, x) - phi0 - n * (x[2] - 1.0)
    }

    fn check_domain(&self, theta: &[f64], t: &InvariantTriplet) -> Result<()> {
        self.0.check_domain(theta, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `φ = J`, whose normalization removes everything.
    struct Volume;

    impl Potential for Volume {
        fn name(&self) -> String {
            "volume".into()
        }
        fn params(&self) -> Vec<f64> {
            vec![]
        }
        fn energy<S: Scalar>(&self, _theta: &[S], x: [S; 3]) -> S {
            x[2]
        }
    }

    #[test]
    fn normalizing_volume_gives_zero() {
        let m = Normalized::new(Volume);
        let (_, n) = normalization_terms(&Volume, &[] as &[f64]);
        assert_eq!(n, 1.0);
        for t in [[3.0, 3.0, 1.0], [5.0, 7.0, 1.7], [2.5, 2.0, 0.6]] {
            let d = m.eval(&InvariantTriplet::from_array(t)).unwrap();
            assert!(d.v.abs() < 1e-15);
            assert!(d.g.iter().all(|g| g.abs() < 1e-15));
        }
    }

    #[test]
    fn normalization_is_idempotent() {
        let once = Normalized::new(GentGent::default());
        let twice = Normalized::new(Normalized::new(GentGent::default()));
        for t in [[3.0, 3.0, 1.0], [3.4, 3.1, 1.1], [3.2, 3.5, 0.9]] {
            let t = InvariantTriplet::from_array(t);
            let a = once.eval(&t).unwrap();
            let b = twice.eval(&t).unwrap();
            assert!((a.v - b.v).abs() < 1e-12);
            for k in 0..3 {
                assert!((a.g[k] - b.g[k]).abs() < 1e-12);
            }
        }
    }
}
