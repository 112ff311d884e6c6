use hyperdisc::kinematics::LoadingMode;
use hyperdisc::materials::{second_pk_stress, AnalyticSet, NeoHookean, Potential};
use hyperdisc::matpoint::{run_validation, training_window, uniaxial_curve, uniaxial_newton};
use hyperdisc::model::AnyModel;
use hyperdisc::pann::{SparseModel, Variant};
use hyperdisc::sampling::canonical_range;

#[test]
fn nearly_incompressible_neo_hookean_contracts_isochorically() {
    let m = NeoHookean { mu: 1.0, lambda: 1e4 };
    for l in [1.2, 1.5] {
        let s = uniaxial_newton(&m, l, None).unwrap();
        let want = l.powf(-0.5);
        assert!((s.lambda2 - want).abs() < 0.01 * want, "λ={l}: {} vs {want}", s.lambda2);
        assert!(s.s22.abs() < 1e-10);
    }
}

#[test]
fn gent_gent_matches_bisection() {
    let gg = AnalyticSet::shipped().gent_gent;
    for l in [0.7, 1.1, 1.4] {
        let s22 = |l2: f64| second_pk_stress(&gg, [l * l, l2 * l2, l2 * l2]).unwrap()[1];
        let (mut lo, mut hi) = (0.3, 1.6);
        assert!(s22(lo) * s22(hi) < 0.0);
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if (s22(mid) < 0.0) == (s22(lo) < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = uniaxial_newton(&gg, l, None).unwrap();
        assert!((s.lambda2 - lo).abs() < 1e-8);
        // lateral symmetry of the traction-free state
        let full = second_pk_stress(&gg, [l * l, s.lambda2.powi(2), s.lambda2.powi(2)]).unwrap();
        assert_eq!(full[1], full[2]);
    }
}

#[test]
fn uniaxial_curve_is_monotone_in_tension() {
    let nh = AnalyticSet::shipped().neo_hookean;
    let lams: Vec<f64> = (0..=20).map(|k| 1.0 + 0.02 * k as f64).collect();
    let curve = uniaxial_curve(&nh, &lams).unwrap();
    assert!(curve[0].s11.abs() < 1e-12);
    assert!(curve.windows(2).all(|w| w[1].s11 > w[0].s11));
}

struct Zero;
impl Potential for Zero {
    fn name(&self) -> String {
        "zero".into()
    }
    fn params(&self) -> Vec<f64> {
        vec![]
    }
    fn energy<S: hyperdisc::diff::Scalar>(&self, _: &[S], _: [S; 3]) -> S {
        S::zero()
    }
}

#[test]
fn validation_scores_bracket_trivial_models() {
    let gg = AnalyticSet::shipped().gent_gent;
    let same = run_validation(&gg, &gg, &LoadingMode::ALL, canonical_range, 40).unwrap();
    assert!(same.scores.iter().all(|s| s.r2_all == 1.0));
    let zero = run_validation(&Zero, &gg, &LoadingMode::ALL, canonical_range, 40).unwrap();
    assert!(zero.scores.iter().all(|s| s.r2_all <= 0.0));
    let mut csv = Vec::new();
    zero.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 1 + 3 * 41);
}

#[test]
fn polyconvex_set_fits_shear_worse_than_unconstrained_set() {
    let gg = AnalyticSet::shipped().gent_gent;
    let score = |v| {
        let m = AnyModel::sparse(SparseModel::pretrained(v)).normalized();
        let r = run_validation(&m, &gg, &[LoadingMode::SimpleShear], training_window, 40).unwrap();
        r.scores[0].r2_inside
    };
    let (s1, s3) = (score(Variant::Polyconvex), score(Variant::Unconstrained));
    assert!(s1 < s3, "Set 1 R² {s1} vs Set 3 R² {s3}");
}
