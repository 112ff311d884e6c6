//! Forward and reverse differentiation used throughout the crate.
//!
//! Potentials are written once against [`Scalar`]. Evaluating them with
//! [`Dual2<f64>`] gives invariant-space gradients and Hessians; with
//! `Dual2<Var>` a stress-valued loss can be differentiated in the parameters
//! (reverse over forward); with `Dual2<Dual1>` a single parameter
//! sensitivity is pushed through the stress.

mod dual1;
mod dual2;
mod scalar;
mod tape;

pub use dual1::Dual1;
pub use dual2::{hess_index, Dual2};
pub use scalar::{sigmoid_f64, softplus_f64, Scalar};
pub use tape::{Tape, Var};

use crate::error::{Error, Result};

/// Evaluate `f` at `seed` with all three directions seeded.
///
/// Non-finite results (log of a non-positive number, division by zero) are
/// reported as [`Error::Domain`].
pub fn dual2_eval<F>(f: F, seed: [f64; 3]) -> Result<Dual2<f64>>
where
    F: FnOnce([Dual2<f64>; 3]) -> Dual2<f64>,
{
    if seed.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("non-finite seed {seed:?}")));
    }
    let out = f(Dual2::seed(seed));
    if !out.is_finite() {
        return Err(Error::Domain(format!("non-finite derivative at {seed:?}")));
    }
    Ok(out)
}

/// Lift a slice of scalars into constant `Dual2` values.
pub fn lift<T: Scalar>(xs: &[T]) -> Vec<Dual2<T>> {
    xs.iter().map(|&x| Dual2::constant(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_errors_are_reported() {
        let r = dual2_eval(|[x, _, _]| x.ln(), [-1.0, 1.0, 1.0]);
        assert!(matches!(r, Err(Error::Domain(_))));
        let r = dual2_eval(|[x, y, _]| x / (y - 1.0), [1.0, 1.0, 1.0]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
