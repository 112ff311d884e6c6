use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Icnn, Variant};
use crate::diff::Scalar;
use crate::error::{Error, Result};
use crate::materials::Potential;

/// Expression node of a pruned network potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    /// Invariant channel: 0 = I1, 1 = I2, 2 = J.
    Input { index: usize },
    Param { index: usize },
    Const { value: f64 },
    Sum { terms: Vec<Expr> },
    Mul { a: Box<Expr>, b: Box<Expr> },
    Softplus { arg: Box<Expr> },
}

impl Expr {
    pub fn eval<S: Scalar>(&self, theta: &[S], x: &[S; 3]) -> S {
        match self {
            Expr::Input { index } => x[*index],
            Expr::Param { index } => theta[*index],
            Expr::Const { value } => S::from_f64(*value),
            Expr::Sum { terms } => {
                let mut it = terms.iter();
                match it.next() {
                    None => S::zero(),
                    Some(first) => it.fold(first.eval(theta, x), |acc, t| acc + t.eval(theta, x)),
                }
            }
            Expr::Mul { a, b } => a.eval(theta, x) * b.eval(theta, x),
            Expr::Softplus { arg } => arg.eval(theta, x).softplus(),
        }
    }

    pub fn depends_on_input(&self) -> bool {
        match self {
            Expr::Input { .. } => true,
            Expr::Param { .. } | Expr::Const { .. } => false,
            Expr::Sum { terms } => terms.iter().any(Expr::depends_on_input),
            Expr::Mul { a, b } => a.depends_on_input() || b.depends_on_input(),
            Expr::Softplus { arg } => arg.depends_on_input(),
        }
    }

    /// Number of `Param` leaves.
    pub fn param_count(&self) -> usize {
        match self {
            Expr::Param { .. } => 1,
            Expr::Input { .. } | Expr::Const { .. } => 0,
            Expr::Sum { terms } => terms.iter().map(Expr::param_count).sum(),
            Expr::Mul { a, b } => a.param_count() + b.param_count(),
            Expr::Softplus { arg } => arg.param_count(),
        }
    }

    fn sum(mut terms: Vec<Expr>) -> Expr {
        if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum { terms }
        }
    }

    fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul { a: Box::new(a), b: Box::new(b) }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Input { index } => f.write_str(["I1", "I2", "J"].get(*index).unwrap_or(&"?")),
            Expr::Param { index } => write!(f, "θ{}", index + 1),
            Expr::Const { value } => write!(f, "{value}"),
            Expr::Sum { terms } => {
                f.write_str("(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            Expr::Mul { a, b } => write!(f, "{a}·{b}"),
            Expr::Softplus { arg } => match arg.as_ref() {
                Expr::Sum { .. } => write!(f, "sp{arg}"),
                _ => write!(f, "sp({arg})"),
            },
        }
    }
}

/// Potential given by an expression tree over its own parameter vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExprModel {
    pub variant: Variant,
    pub expr: Expr,
    pub theta: Vec<f64>,
    /// Entries of `theta` that must stay non-negative.
    pub nonneg: Vec<bool>,
}

impl ExprModel {
    pub fn new(variant: Variant, expr: Expr, theta: Vec<f64>, nonneg: Vec<bool>) -> Result<Self> {
        if nonneg.len() != theta.len() {
            return Err(Error::Structure("mask length differs from parameter count".into()));
        }
        if !Self::indices_in_range(&expr, theta.len()) {
            return Err(Error::Structure("expression refers to a missing parameter or input".into()));
        }
        Ok(Self { variant, expr, theta, nonneg })
    }

    fn indices_in_range(e: &Expr, n: usize) -> bool {
        match e {
            Expr::Input { index } => *index < 3,
            Expr::Param { index } => *index < n,
            Expr::Const { .. } => true,
            Expr::Sum { terms } => terms.iter().all(|t| Self::indices_in_range(t, n)),
            Expr::Mul { a, b } => Self::indices_in_range(a, n) && Self::indices_in_range(b, n),
            Expr::Softplus { arg } => Self::indices_in_range(arg, n),
        }
    }

    pub fn is_constant(&self) -> bool {
        !self.expr.depends_on_input()
    }
}

impl Potential for ExprModel {
    fn name(&self) -> String {
        format!("expr {}", self.variant)
    }

    fn params(&self) -> Vec<f64> {
        self.theta.clone()
    }

    fn energy<S: Scalar>(&self, theta: &[S], x: [S; 3]) -> S {
        self.expr.eval(theta, &x)
    }
}

impl fmt::Display for ExprModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "φ = {}", self.expr)
    }
}

/// Result of pruning a gated network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub model: ExprModel,
    pub initial: usize,
    pub surviving: usize,
    /// Index of each surviving parameter in the dense vector.
    pub source: Vec<usize>,
    /// The pruned model does not depend on the invariants.
    pub constant: bool,
}

/// Prune a network whose weights are multiplied by deterministic gate values
/// `gates` (already rounded, so closed gates are exactly zero).
///
/// Zero weights are dropped, units that cannot reach the output are removed,
/// and units with no incoming weights fold to the constant `sp(0)`.
pub fn extract_sparse_form(net: &Icnn, gates: &[f64]) -> Result<Extraction> {
    let lay = net.layout();
    if gates.len() != lay.len {
        return Err(Error::Structure(format!("expected {} gates, got {}", lay.len, gates.len())));
    }
    let eff: Vec<f64> = net.theta.iter().zip(gates).map(|(t, g)| t * g).collect();
    let alive = |i: usize| eff[i] != 0.0;
    let mask = Icnn::nonneg_mask(&net.config);
    let (h, nl) = (lay.hidden, lay.layers);

    // Backward reachability from the output.
    let mut needed = vec![vec![false; h]; nl];
    for u in 0..h {
        needed[nl - 1][u] = alive(lay.output + u);
    }
    for l in (1..nl).rev() {
        for u in 0..h {
            if needed[l][u] {
                for v in 0..h {
                    if alive(lay.weight_index(l, u, v)) {
                        needed[l - 1][v] = true;
                    }
                }
            }
        }
    }

    let mut theta = Vec::new();
    let mut nonneg = Vec::new();
    let mut source = Vec::new();
    let mut param = |i: usize| {
        theta.push(eff[i]);
        nonneg.push(mask[i]);
        source.push(i);
        Expr::Param { index: theta.len() - 1 }
    };

    let mut prev: Vec<Option<Expr>> = vec![None; h];
    for l in 0..nl {
        let mut cur: Vec<Option<Expr>> = vec![None; h];
        for u in 0..h {
            if !needed[l][u] {
                continue;
            }
            let mut terms = Vec::new();
            if l > 0 {
                for v in 0..h {
                    let i = lay.weight_index(l, u, v);
                    if alive(i) {
                        let z = prev[v].clone().expect("reachable unit was built");
                        terms.push(Expr::mul(param(i), z));
                    }
                }
            }
            for k in 0..3 {
                let i = lay.skip_index(l, u, k);
                if alive(i) {
                    terms.push(Expr::mul(param(i), Expr::Input { index: k }));
                }
            }
            if l == 0 && alive(lay.bias + u) {
                terms.push(param(lay.bias + u));
            }
            cur[u] = Some(if terms.is_empty() {
                Expr::Const { value: std::f64::consts::LN_2 }
            } else {
                Expr::Softplus { arg: Box::new(Expr::sum(terms)) }
            });
        }
        prev = cur;
    }

    let mut out = Vec::new();
    for u in 0..h {
        let i = lay.output + u;
        if alive(i) {
            out.push(Expr::mul(param(i), prev[u].clone().expect("output unit was built")));
        }
    }
    let expr = if out.is_empty() { Expr::Const { value: 0.0 } } else { Expr::sum(out) };
    let surviving = theta.len();
    let model = ExprModel::new(net.config.variant, expr, theta, nonneg)?;
    let constant = model.is_constant();
    Ok(Extraction { model, initial: lay.len, surviving, source, constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::InvariantTriplet;
    use crate::pann::IcnnConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn net() -> Icnn {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        Icnn::init(IcnnConfig { layers: 2, hidden: 6, variant: Variant::Relaxed }, &mut rng).unwrap()
    }

    #[test]
    fn open_gates_keep_everything() {
        let n = net();
        let ex = extract_sparse_form(&n, &vec![1.0; n.theta.len()]).unwrap();
        assert_eq!(ex.surviving, ex.initial);
        assert!(!ex.constant);
        let t = InvariantTriplet::new(3.5, 3.9, 1.1);
        let a = n.eval(&t).unwrap();
        let b = ex.model.eval(&t).unwrap();
        assert!((a.v - b.v).abs() < 1e-12);
        assert!((a.hess(0, 2) - b.hess(0, 2)).abs() < 1e-12);
    }

    #[test]
    fn closed_gates_give_constant_model() {
        let n = net();
        let ex = extract_sparse_form(&n, &vec![0.0; n.theta.len()]).unwrap();
        assert!(ex.constant);
        assert_eq!(ex.surviving, 0);
    }

    #[test]
    fn partial_pruning_matches_gated_network() {
        let n = net();
        let gates: Vec<f64> = (0..n.theta.len()).map(|i| if i % 3 == 0 { 0.0 } else { 0.9 }).collect();
        let ex = extract_sparse_form(&n, &gates).unwrap();
        let gated = Icnn { config: n.config, theta: n.theta.iter().zip(&gates).map(|(a, b)| a * b).collect() };
        let t = InvariantTriplet::new(4.0, 4.5, 0.9);
        assert!((gated.value(&t).unwrap() - ex.model.value(&t).unwrap()).abs() < 1e-12);
        assert!(ex.surviving < ex.initial);
        let json = serde_json::to_string(&ex.model).unwrap();
        let back: ExprModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ex.model);
    }
}
