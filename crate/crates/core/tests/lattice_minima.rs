use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;
use systole_lab::lattice::{
    dual_lattice, gamma_product, mahler_product, random_euclidean_lattice, random_plane_norm, successive_minima,
};
use systole_lab::normspace::{gamma2_euclidean, sandwich_bound_check};
use systole_lab::rng::{random_basis_2d, random_matrix, random_unimodular, stream};
use systole_lab::{Lattice, NormSpec};

/// Successive minima by scanning a coordinate box and picking greedily with a
/// floating-point rank test.
fn box_scan_minima(l: &Lattice) -> Vec<f64> {
    let b = l.dim();
    let radius = (0..b)
        .map(|j| {
            let mut e = vec![0; b];
            e[j] = 1;
            l.norm_of(&e)
        })
        .fold(0.0, f64::max);
    // Euclidean equivalence constant from dense direction sampling, with margin.
    let c = if b == 2 {
        (0..100_000)
            .map(|i| {
                let t = PI * i as f64 / 100_000.0;
                l.norm().eval(&[t.cos(), t.sin()]).unwrap()
            })
            .fold(f64::INFINITY, f64::min)
            * 0.9
    } else {
        let mut rng = stream(1, 0);
        (0..200_000)
            .map(|_| {
                let v = systole_lab::rng::normal_vec(&mut rng, b);
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                l.norm().eval(&v).unwrap() / n
            })
            .fold(f64::INFINITY, f64::min)
            * 0.5
    };
    let inv = l.basis().clone().try_inverse().unwrap();
    let bounds: Vec<i64> = (0..b).map(|i| (inv.row(i).norm() * radius / c).ceil() as i64).collect();
    let mut points: Vec<(f64, Vec<i64>)> = Vec::new();
    let mut z = vec![0i64; b];
    fn rec(i: usize, z: &mut Vec<i64>, bounds: &[i64], l: &Lattice, out: &mut Vec<(f64, Vec<i64>)>) {
        if i == z.len() {
            if z.iter().any(|&v| v != 0) {
                out.push((l.norm_of(z), z.clone()));
            }
            return;
        }
        for v in -bounds[i]..=bounds[i] {
            z[i] = v;
            rec(i + 1, z, bounds, l, out);
        }
    }
    rec(0, &mut z, &bounds, l, &mut points);
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut chosen: Vec<Vec<f64>> = Vec::new();
    let mut lambdas = Vec::new();
    for (n, p) in points {
        let mut cand = chosen.clone();
        cand.push(p.iter().map(|&v| v as f64).collect());
        let m = DMatrix::from_fn(cand.len(), b, |i, j| cand[i][j]);
        if m.rank(1e-9) == cand.len() {
            chosen = cand;
            lambdas.push(n);
            if lambdas.len() == b {
                break;
            }
        }
    }
    lambdas
}

fn test_lattices() -> Vec<Lattice> {
    let mut out = vec![
        Lattice::integer(2, NormSpec::euclidean_identity(2)).unwrap(),
        Lattice::hexagonal(NormSpec::euclidean_identity(2)).unwrap(),
        Lattice::hexagonal(NormSpec::linf()).unwrap(),
        Lattice::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]), NormSpec::euclidean_identity(2)).unwrap(),
        Lattice::integer(3, NormSpec::euclidean_identity(3)).unwrap(),
        Lattice::integer(3, NormSpec::Lp { p: 1.0 }).unwrap(),
    ];
    for i in 0..30 {
        let mut rng = stream(21, i);
        let basis = random_basis_2d(&mut rng);
        out.push(Lattice::new(basis, random_plane_norm(&mut rng)).unwrap());
    }
    for i in 0..10 {
        let mut rng = stream(22, i);
        let mut basis = random_matrix(&mut rng, 3, 3);
        let det = basis.determinant().abs();
        basis /= det.cbrt();
        let norm = if i % 2 == 0 { NormSpec::euclidean_identity(3) } else { NormSpec::Lp { p: 3.0 } };
        out.push(Lattice::new(basis, norm).unwrap());
    }
    out
}

#[test]
fn minima_agree_with_box_scan() {
    for (i, l) in test_lattices().iter().enumerate() {
        let fast = successive_minima(l).unwrap();
        let slow = box_scan_minima(l);
        assert_eq!(fast.lambdas.len(), slow.len());
        for (a, b) in fast.lambdas.iter().zip(&slow) {
            assert!((a - b).abs() <= 1e-9 * b.max(1.0), "lattice {i}: {:?} vs {slow:?}", fast.lambdas);
        }
    }
}

#[test]
fn minima_results_are_consistent() {
    for l in test_lattices() {
        let m = successive_minima(&l).unwrap();
        assert!(m.lambdas.windows(2).all(|w| w[0] <= w[1]));
        for (lam, a) in m.lambdas.iter().zip(&m.achievers) {
            assert!((l.norm_of(a) - lam).abs() <= 1e-9);
        }
        let a = DMatrix::from_fn(l.dim(), l.dim(), |i, j| m.achievers[j][i] as f64);
        assert!(a.determinant().abs() >= 0.5);
    }
}

#[test]
fn unimodular_invariance() {
    for (i, l) in test_lattices().into_iter().take(10).enumerate() {
        let base = successive_minima(&l).unwrap().lambdas;
        for k in 0..100 {
            let u = random_unimodular(&mut stream(23 + i as u64, k), l.dim(), 6);
            let moved = Lattice::new(l.basis() * u.map(|v| v as f64), l.norm().clone()).unwrap();
            let got = successive_minima(&moved).unwrap().lambdas;
            for (a, b) in got.iter().zip(&base) {
                assert!((a - b).abs() <= 1e-9, "lattice {i} transform {k}");
            }
        }
    }
}

#[test]
fn double_dual_is_the_same_lattice() {
    for l in test_lattices().into_iter().filter(|l| l.dim() == 2) {
        let dd = dual_lattice(&dual_lattice(&l).unwrap()).unwrap();
        assert!((dd.det().abs() - l.det().abs()).abs() < 1e-12);
        let a = successive_minima(&l).unwrap().lambdas;
        let b = successive_minima(&dd).unwrap().lambdas;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn euclidean_plane_gamma_and_mahler_bounds() {
    let mut worst_gamma = 0.0f64;
    let mut worst_mahler = 0.0f64;
    for i in 0..2000 {
        let l = random_euclidean_lattice(&mut stream(24, i));
        worst_gamma = worst_gamma.max(gamma_product(&l).unwrap());
        worst_mahler = worst_mahler.max(mahler_product(&l).unwrap());
    }
    assert!(worst_gamma <= gamma2_euclidean() + 1e-9);
    assert!(worst_mahler <= 2f64.sqrt() + 1e-9);
}

#[test]
fn sandwich_bound_examples_and_fuzz() {
    let r = sandwich_bound_check(&Lattice::integer(2, NormSpec::linf()).unwrap()).unwrap();
    assert!(r.pass && r.gamma_general <= 1.5 + 1e-6);
    let r = sandwich_bound_check(&Lattice::hexagonal(NormSpec::euclidean_identity(2)).unwrap()).unwrap();
    assert!((r.gamma_general - gamma2_euclidean()).abs() < 1e-12 && r.pass);
    for i in 0..100 {
        let mut rng = stream(25, i);
        let basis = random_basis_2d(&mut rng);
        let k = 3 + (i as usize % 6);
        let facets = (0..k)
            .map(|j| {
                let t = PI * (j as f64 + 0.5 * systole_lab::rng::normal(&mut rng).tanh()) / k as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let l = Lattice::new(basis, NormSpec::Polytope { facets }).unwrap();
        let r = sandwich_bound_check(&l).unwrap();
        assert!(r.pass, "sample {i}: {r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn scaling_scales_minima(seed in 0u64..10_000, t in 0.1f64..10.0) {
        let mut rng = stream(seed, 0);
        let l = Lattice::new(random_basis_2d(&mut rng), random_plane_norm(&mut rng)).unwrap();
        let scaled = Lattice::new(l.basis() * t, l.norm().clone()).unwrap();
        let a = successive_minima(&l).unwrap().lambdas;
        let b = successive_minima(&scaled).unwrap().lambdas;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((t * x - y).abs() <= 1e-12 * y.max(1.0) * 10.0);
        }
        let g = gamma_product(&l).unwrap();
        let gs = gamma_product(&scaled).unwrap();
        prop_assert!((g - gs).abs() <= 1e-9);
        prop_assert!(g <= 1.5 + 1e-6);
    }
}
