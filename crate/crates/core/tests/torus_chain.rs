use std::time::Instant;

use nalgebra::DMatrix;
use proptest::prelude::*;
use systole_lab::exterior::KForm;
use systole_lab::rng::{random_spd, random_unimodular, stream};
use systole_lab::torus::{
    check_inequality_chain, cohomology_lattice, homology_lattice, stable_2_systole, theorem_report,
};
use systole_lab::FlatTorus;

fn random_torus(seed: u64, index: u64, n: usize) -> FlatTorus {
    FlatTorus::new(n, random_spd(&mut stream(seed, index), 2 * n)).unwrap()
}

#[test]
fn random_t4_reports_pass() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let r = theorem_report(&random_torus(31, i, 2)).unwrap();
        assert!(r.pass, "sample {i}: {r:?}");
        assert!((r.volume - 1.0).abs() < 1e-9);
        worst = worst.max(r.ratio / r.bound_chain.bound);
    }
    assert!(worst <= 1.0);
    eprintln!("100 reports in {:?}, worst ratio/bound {worst}", start.elapsed());
}

#[test]
fn stsys_is_invariant_under_unimodular_pullback() {
    for i in 0..50 {
        let t = random_torus(32, i, 2);
        let u = random_unimodular(&mut stream(33, i), 4, 8).map(|v| v as f64);
        let moved = FlatTorus::new(2, u.transpose() * t.gram() * &u).unwrap();
        let a = stable_2_systole(&t).unwrap().value;
        let b = stable_2_systole(&moved).unwrap().value;
        assert!((a - b).abs() <= 1e-9 * a, "sample {i}: {a} vs {b}");
        assert!((t.volume() - moved.volume()).abs() <= 1e-9);
        let ra = a * a / t.volume();
        let rb = b * b / moved.volume();
        assert!((ra - rb).abs() <= 1e-9);
    }
}

#[test]
fn nonzero_pairings_bound_minima_products() {
    // A covector and a class achieving λ_1 and λ_b* need not pair nontrivially,
    // but among b independent covectors one pairs nontrivially with the
    // shortest class, so λ_1 · λ_b* ≥ 1.
    for i in 0..30 {
        let t = random_torus(34, i, 2);
        let h = homology_lattice(&t).unwrap().successive_minima().unwrap();
        let c = cohomology_lattice(&t).unwrap().successive_minima().unwrap();
        assert!(h.lambdas[0] * c.lambdas[5] >= 1.0 - 1e-9);
        assert!(c.lambdas[0] * h.lambdas[5] >= 1.0 - 1e-9);
    }
}

#[test]
fn one_dimensional_second_homology_is_tight() {
    for i in 0..50 {
        let r = theorem_report(&random_torus(35, i, 1)).unwrap();
        assert_eq!(r.ratio, 1.0, "sample {i}");
        assert!(r.pass);
    }
}

#[test]
fn tight_alphas_on_random_tori() {
    // The chain holds for any integral pair with nonzero wedge.
    let omega = KForm::symplectic(2).unwrap();
    let dx12 = KForm::basis(4, &[0, 1]).unwrap();
    let dx34 = KForm::basis(4, &[2, 3]).unwrap();
    for i in 0..20 {
        let t = random_torus(36, i, 2);
        assert!(check_inequality_chain(&t, &[omega.clone(), omega.clone()]).unwrap().pass);
        let c = check_inequality_chain(&t, &[dx12.clone(), dx34.clone()]).unwrap();
        assert!((c.integral - 1.0).abs() < 1e-12 && c.pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(16) })]

    #[test]
    fn ratio_is_scale_invariant(seed in 0u64..1000, c in 0.3f64..3.0) {
        let t = random_torus(seed, 0, 2);
        let scaled = FlatTorus::new(2, t.gram() * (c * c)).unwrap();
        let a = stable_2_systole(&t).unwrap().value;
        let b = stable_2_systole(&scaled).unwrap().value;
        prop_assert!((b - c * c * a).abs() <= 1e-9 * b);
        let ra = a * a / t.volume();
        let rb = b * b / scaled.volume();
        prop_assert!((ra - rb).abs() <= 1e-9);
    }

    #[test]
    fn identity_with_diagonal_scaling(t in 0.5f64..2.0) {
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![t * t, t * t, 1.0 / (t * t), 1.0 / (t * t)]));
        let r = theorem_report(&FlatTorus::new(2, g).unwrap()).unwrap();
        let expect = t.min(1.0 / t).powi(2);
        prop_assert!((r.stsys2 - expect).abs() <= 1e-12);
        prop_assert!(r.pass);
    }
}
