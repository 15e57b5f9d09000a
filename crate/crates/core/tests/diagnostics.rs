use cocycle_lab::base::{find_homoclinic, FiberCoord, PeriodicLeaf, SkewProduct, TorusAutomorphism, TrigPoly};
use cocycle_lab::cocycle::{CocycleField, LebesgueSampler, SkewCocycle};
use cocycle_lab::diagnostics::{
    positivity_search, rotation_sweep, transvection_perturbation, weak_twisting_test, SearchConfig, Side,
    TwistingConfig, Verdict,
};
use cocycle_lab::holonomy::{certify_fiber_bunching, loop_holonomy, HomoclinicLoop};
use cocycle_lab::symplectic::{SymplecticMatrix, Transvection};
use nalgebra::{DMatrix, DVector};

fn mild_hyperbolic() -> SkewCocycle {
    let m = SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, &[1.25, 0.25, 0.25, 0.85])).unwrap();
    let theta = TrigPoly::constant(2, 0.1).with_cos(&[1, 0], 0.02);
    SkewCocycle::new(
        CocycleField::constant(m),
        SkewProduct::new(TorusAutomorphism::cat(), theta),
    )
}

fn origin_loop(c: &SkewCocycle) -> HomoclinicLoop {
    let leaf = PeriodicLeaf::origin(&c.skew);
    let z = find_homoclinic(c.skew.base(), &leaf, 0).unwrap();
    HomoclinicLoop::new(&c.skew, leaf, z)
}

/// Transvection along the bisector of the eigendirections of the mild matrix.
fn mixing_transvection() -> Transvection {
    let e = DMatrix::from_row_slice(2, 2, &[1.25, 0.25, 0.25, 0.85]).symmetric_eigen();
    let v: DVector<f64> = e.eigenvectors.column(0) + e.eigenvectors.column(1);
    Transvection::new(&v, 0.05).unwrap()
}

#[test]
fn constant_hyperbolic_does_not_twist() {
    let c = mild_hyperbolic();
    let cert = certify_fiber_bunching(&c, 20, 3).unwrap();
    assert!(cert.pass);
    let lp = origin_loop(&c);
    let v = weak_twisting_test(&c, &cert, &lp, &LebesgueSampler, &TwistingConfig::default()).unwrap();
    assert_eq!(v.verdict, Verdict::Negative);
    assert!(v.windows.iter().all(|w| w.twisting == 0));
}

#[test]
fn transvection_near_homoclinic_fiber_twists() {
    let c = mild_hyperbolic();
    let lp = origin_loop(&c);
    for side in [Side::Left, Side::Right] {
        let p = transvection_perturbation(&c.field, &lp, c.skew.base(), &[mixing_transvection()], 0.05, None, side)
            .unwrap();
        let hat = SkewCocycle::new(p.field, c.skew.clone());
        let cert = certify_fiber_bunching(&hat, 20, 3).unwrap();
        assert!(cert.pass);
        let v = weak_twisting_test(&hat, &cert, &lp, &LebesgueSampler, &TwistingConfig::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Positive, "{side:?}: {v:?}");
        assert_eq!(v.j, Some(1));
        assert!(v.fraction >= 0.05);
    }
}

#[test]
fn right_side_loop_is_stable_sigma_unstable() {
    let c = mild_hyperbolic();
    let cert = certify_fiber_bunching(&c, 20, 3).unwrap();
    let lp = origin_loop(&c);
    let tau = mixing_transvection();
    let p = transvection_perturbation(&c.field, &lp, c.skew.base(), &[tau.clone()], 0.05, None, Side::Right).unwrap();
    let hat = SkewCocycle::new(p.field, c.skew.clone());
    let cert_hat = certify_fiber_bunching(&hat, 20, 3).unwrap();
    for k in 0..4 {
        let t = FiberCoord::new(0.1 + 0.2 * k as f64);
        let before = loop_holonomy(&c, &cert, &lp, t).unwrap();
        let after = loop_holonomy(&hat, &cert_hat, &lp, t).unwrap();
        let expect = before.stable.matrix.entries() * tau.matrix().entries() * before.unstable.matrix.entries();
        assert!((after.matrix.entries() - expect).amax() < 1e-6);
    }
}

fn identity_scenario() -> SkewCocycle {
    SkewCocycle::new(
        CocycleField::identity(1),
        SkewProduct::new(TorusAutomorphism::cat(), TrigPoly::zero(2)),
    )
}

#[test]
fn identity_pipeline_reports_obstruction_and_ends_positive() {
    let c = identity_scenario();
    let leaf = PeriodicLeaf::origin(&c.skew);
    let cfg = SearchConfig::default();
    let r = positivity_search(&c, &leaf, &cfg).unwrap();
    assert!(r.obstruction);
    assert!(r.theta.is_some());
    assert!(r.final_pinching.verdict.is_positive());
    assert!(r.budget_used <= r.budget);
    assert!(r.final_positive, "{:?}", r.log);
    assert!(r.twisting_after.iter().all(|v| v.verdict.is_positive()), "{:?}", r.log);
}

#[test]
fn sweep_turns_positive_below_half() {
    let c = identity_scenario();
    let leaf = PeriodicLeaf::origin(&c.skew);
    let cfg = SearchConfig::default();
    let thetas: Vec<f64> = (0..=10).map(|k| 0.05 * k as f64).collect();
    let (record, rows) = rotation_sweep(&c, &leaf, &thetas, &cfg).unwrap();
    assert!(record.is_some());
    assert_eq!(rows.len(), 11);
    assert!(!rows[0].pinching.verdict.is_positive());
    assert!(rows.iter().any(|r| r.pinching.verdict.is_positive()));
}

#[test]
fn pinching_and_twisting_input_needs_no_perturbation() {
    let c = mild_hyperbolic();
    let lp = origin_loop(&c);
    let p = transvection_perturbation(&c.field, &lp, c.skew.base(), &[mixing_transvection()], 0.05, None, Side::Right)
        .unwrap();
    let hat = SkewCocycle::new(p.field, c.skew.clone());
    let r = positivity_search(&hat, &lp.leaf, &SearchConfig::default()).unwrap();
    assert!(r.perturbations.is_empty(), "{:?}", r.log);
    assert!(r.final_positive);
}
