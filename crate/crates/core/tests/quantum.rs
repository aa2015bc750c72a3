use bellfacets::quantum::Complex;
use bellfacets::*;
use nalgebra::DVector;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// ½(ac + ae + ce − 1) on the first variables of three parties.
fn mermin() -> BellInequality {
    let s = SignFunction::from_fn(3, |v| {
        let (a, c, e) = (v.first(0), v.first(1), v.first(2));
        (a * c + a * e + c * e - 1) / 2
    })
    .unwrap();
    inequality_from_sign_function(&s).unwrap()
}

fn ghz() -> DVector<Complex<f64>> {
    let mut psi = DVector::from_element(8, Complex::new(0.0, 0.0));
    psi[0] = Complex::new(FRAC_1_SQRT_2, 0.0);
    psi[7] = Complex::new(FRAC_1_SQRT_2, 0.0);
    psi
}

#[test]
fn mermin_coefficients() {
    let ineq = mermin();
    assert_eq!(ineq.bound, 64);
    let support: Vec<(String, i64)> = ineq
        .support()
        .iter()
        .map(|t| (polytope::settings_label(t), ineq.coeff(t)))
        .collect();
    assert_eq!(
        support,
        vec![("E_000".into(), -32), ("E_011".into(), 32), ("E_101".into(), 32), ("E_110".into(), 32)]
    );
}

#[test]
fn ghz_reaches_twice_the_bound() {
    // ⟨σ(φ1)σ(φ2)σ(φ3)⟩ = cos(φ1 + φ2 + φ3) on GHZ
    let (alpha, beta) = (-PI / 6.0, PI / 3.0);
    let dirs = Directions::from_azimuths(&[[beta, alpha, 0.0]; 3]);
    let value = evaluate_state(&mermin(), &dirs, &ghz()).unwrap();
    assert!((value - 128.0).abs() < 1e-9, "{value}");
}

#[test]
fn unnormalized_state_rejected() {
    let dirs = Directions::from_azimuths(&[[0.0; 3]; 3]);
    let psi = ghz() * Complex::new(2.0, 0.0);
    assert!(matches!(evaluate_state(&mermin(), &dirs, &psi), Err(BellError::NotNormalized { .. })));
}

#[test]
fn seesaw_mermin_matches_ghz_value() {
    let opts = SeesawOptions { seed: 3, restarts: 8, ..Default::default() };
    let report = seesaw_maximize::<f64>(&mermin(), &opts).unwrap();
    assert!((report.quantum_max - 128.0).abs() < 1e-6);
    assert!((report.violation_ratio - 2.0).abs() < 1e-6);
    assert!(report.monotone);
    let replay = evaluate_state(&mermin(), &report.directions, &report.state).unwrap();
    assert!((replay - report.quantum_max).abs() < 1e-9);
}

#[test]
fn factorable_inequalities_have_no_violation() {
    for s in enumerate_admissible(2, EnumerationMode::Backtracking).unwrap().iter().filter(|s| is_factorable(s)) {
        let ineq = inequality_from_sign_function(s).unwrap();
        let report = seesaw_maximize::<f64>(&ineq, &SeesawOptions { seed: 1, restarts: 4, ..Default::default() }).unwrap();
        assert!((report.violation_ratio - 1.0).abs() < 1e-6, "{s}: {}", report.violation_ratio);
    }
}
