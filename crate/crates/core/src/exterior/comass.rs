//! Comass and mass norms.
//!
//! Comass of a k-form is the maximum of `a(v_1, …, v_k)` over unit vectors. It
//! is attained on orthonormal frames. For 2-forms it is the largest canonical
//! block; for top-degree forms the absolute coefficient. Everything else goes
//! through [`comass_numeric`], a multi-start alternating maximization over
//! orthonormal frames.

use nalgebra::DVector;
use serde::Serialize;

use super::{canonical_form_2, two_form_blocks, KForm};
use crate::error::{Error, Result};
use crate::rng::{normal_vec, stream};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComassResult {
    pub value: f64,
    /// `k` unit vectors; `a(witness) == value` up to rounding.
    pub witness: Vec<Vec<f64>>,
    /// True when `value` comes from a closed form rather than an optimizer.
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComassOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for ComassOptions {
    fn default() -> Self {
        ComassOptions { restarts: 50, tol: 1e-10, max_sweeps: 500, seed: 0x5157_0e1a }
    }
}

fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

/// Largest canonical block, with witness the first block plane mapped through `q`.
pub fn comass_2form(a: &KForm) -> Result<ComassResult> {
    let c = canonical_form_2(a)?;
    let witness: Vec<Vec<f64>> = (0..2).map(|j| c.q.column(j).iter().copied().collect()).collect();
    let value = a.evaluate(&witness)?;
    Ok(ComassResult { value, witness, certified: true })
}

/// Comass of a 2-form from the singular values alone; the fast path for norms.
pub fn comass_2form_value(a: &KForm) -> Result<f64> {
    Ok(two_form_blocks(a)?.first().copied().unwrap_or(0.0))
}

pub fn comass_top(a: &KForm) -> Result<f64> {
    Ok(a.top_coefficient()?.abs())
}

/// Mass of a 2-vector, the norm dual to comass: the sum of its canonical blocks.
pub fn mass_2vector(x: &KForm) -> Result<f64> {
    Ok(two_form_blocks(x)?.iter().sum())
}

/// Comass by the cheapest exact route available, else numerically.
pub fn comass(a: &KForm) -> Result<ComassResult> {
    let m = a.dim();
    match a.degree() {
        0 => Ok(ComassResult { value: a.coeffs()[0].abs(), witness: vec![], certified: true }),
        1 => {
            let n = a.coeff_norm();
            let w = if n > 0.0 { a.coeffs().iter().map(|c| c / n).collect() } else { unit(m, 0) };
            Ok(ComassResult { value: n, witness: vec![w], certified: true })
        }
        2 => comass_2form(a),
        k if k == m => {
            let c = a.top_coefficient()?;
            let mut witness: Vec<Vec<f64>> = (0..m).map(|i| unit(m, i)).collect();
            if c < 0.0 {
                witness[0][0] = -1.0;
            }
            Ok(ComassResult { value: c.abs(), witness, certified: true })
        }
        _ => comass_numeric_with(a, &ComassOptions::default()),
    }
}

pub fn comass_numeric(a: &KForm, restarts: usize, tol: f64) -> Result<ComassResult> {
    comass_numeric_with(a, &ComassOptions { restarts, tol, ..ComassOptions::default() })
}

/// Multi-start alternating maximization over orthonormal frames.
///
/// With all vectors but `v_j` fixed, `u ↦ a(…, u, …)` is a linear functional
/// `g`, maximized over the unit sphere by `g / |g|`, which is automatically
/// orthogonal to the other vectors. Every step is feasible, so the returned
/// value never exceeds the true comass beyond rounding.
pub fn comass_numeric_with(a: &KForm, opts: &ComassOptions) -> Result<ComassResult> {
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let m = a.dim();
    let k = a.degree();
    if k == 0 {
        return Ok(ComassResult { value: a.coeffs()[0].abs(), witness: vec![], certified: false });
    }

    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for restart in 0..opts.restarts {
        let mut rng = stream(opts.seed, restart as u64);
        let mut frame: Vec<DVector<f64>> =
            (0..k).map(|_| DVector::from_vec(normal_vec(&mut rng, m))).collect();
        orthonormalize(&mut frame);
        let mut value = frame_value(a, &frame)?;
        if value < 0.0 {
            frame[0].neg_mut();
            value = -value;
        }
        for _ in 0..opts.max_sweeps {
            let before = value;
            for j in 0..k {
                let g = slot_functional(a, &frame, j)?;
                let n = g.norm();
                if n > 0.0 {
                    frame[j] = g / n;
                }
            }
            orthonormalize(&mut frame);
            value = frame_value(a, &frame)?;
            if value < 0.0 {
                frame[0].neg_mut();
                value = -value;
            }
            if value - before < opts.tol {
                break;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, frame.iter().map(|v| v.iter().copied().collect()).collect()));
        }
    }
    let (_, witness) = best.expect("at least one restart");
    let value = a.evaluate(&witness)?;
    Ok(ComassResult { value, witness, certified: false })
}

fn frame_value(a: &KForm, frame: &[DVector<f64>]) -> Result<f64> {
    let vs: Vec<&[f64]> = frame.iter().map(|v| v.as_slice()).collect();
    a.evaluate(&vs)
}

/// The 1-form `u ↦ a(v_0, …, v_{j-1}, u, v_{j+1}, …)` as a vector.
fn slot_functional(a: &KForm, frame: &[DVector<f64>], j: usize) -> Result<DVector<f64>> {
    let k = frame.len();
    let mut acc = a.clone();
    for (i, v) in frame.iter().enumerate() {
        if i != j {
            acc = acc.contract(v.as_slice())?;
        }
    }
    // Moving `u` from slot j to the last slot takes k-1-j transpositions.
    let sign = if (k - 1 - j).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(DVector::from_vec(acc.coeffs().to_vec()) * sign)
}

fn orthonormalize(frame: &mut [DVector<f64>]) {
    for i in 0..frame.len() {
        for _ in 0..2 {
            for j in 0..i {
                let c = frame[j].dot(&frame[i]);
                let prev = frame[j].clone();
                frame[i] -= prev * c;
            }
        }
        let n = frame[i].norm();
        if n > 0.0 {
            frame[i] /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{hodge_star, inner_product, wedge};
    use crate::rng::{random_form, random_orthogonal, SampleRng};

    fn symplectic2() -> KForm {
        KForm::symplectic(2).unwrap()
    }

    #[test]
    fn two_form_examples() {
        assert_eq!(comass_2form(&symplectic2()).unwrap().value, 1.0);
        let a = KForm::new(2, 2, vec![3.0]).unwrap();
        let r = comass_2form(&a).unwrap();
        assert_eq!(r.value, 3.0);
        assert!(r.certified);
        assert_eq!(comass_2form_value(&KForm::zero(4, 2).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn witness_reproduces_value() {
        for i in 0..50 {
            let a = random_form(&mut stream(21, i), 6, 2);
            let r = comass_2form(&a).unwrap();
            assert!((a.evaluate(&r.witness).unwrap() - r.value).abs() <= 1e-9 * r.value);
            for w in &r.witness {
                assert!((w.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn top_degree() {
        assert_eq!(comass_top(&KForm::top(4, 2.0).unwrap()).unwrap(), 2.0);
        assert_eq!(comass_top(&KForm::top(4, 0.0).unwrap()).unwrap(), 0.0);
        let w = wedge(&symplectic2(), &symplectic2()).unwrap();
        assert_eq!(comass_top(&w).unwrap(), 2.0);
        assert!(comass_top(&symplectic2()).is_err());
        let c = comass_numeric(&KForm::top(3, -1.75).unwrap(), 5, 1e-12).unwrap();
        assert!((c.value - 1.75).abs() < 1e-12);
        assert!(!c.certified);
    }

    #[test]
    fn numeric_matches_symplectic() {
        let r = comass_numeric(&symplectic2(), 50, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn numeric_rejects_bad_options() {
        assert!(comass_numeric(&symplectic2(), 0, 1e-10).is_err());
        assert!(comass_numeric(&symplectic2(), 3, 0.0).is_err());
        assert!(comass_numeric(&symplectic2(), 3, f64::NAN).is_err());
    }

    #[test]
    fn numeric_brackets_certified_on_two_forms() {
        for i in 0..60 {
            let a = random_form(&mut stream(31, i), 5 + (i % 3) as usize, 2);
            let exact = comass_2form(&a).unwrap().value;
            let num = comass_numeric(&a, 50, 1e-10).unwrap().value;
            assert!(num <= exact + 1e-9);
            assert!(num >= exact - 1e-4, "{num} vs {exact}");
        }
    }

    #[test]
    fn agrees_with_many_restart_oracle_on_r6() {
        let a = random_form(&mut stream(41, 0), 6, 2);
        let exact = comass_2form(&a).unwrap().value;
        let oracle = comass_numeric(&a, 200, 1e-12).unwrap().value;
        assert!((exact - oracle).abs() < 1e-6);
    }

    /// Best of random orthonormal frames, then random-perturbation hill
    /// climbing from the best few. Shares no code with the optimizer.
    fn sampling_oracle(a: &KForm, frames: usize, rng: &mut SampleRng) -> f64 {
        let m = a.dim();
        let k = a.degree();
        let mut top: Vec<(f64, nalgebra::DMatrix<f64>)> = Vec::new();
        for _ in 0..frames {
            let q = random_orthogonal(rng, m);
            let cols: Vec<Vec<f64>> = (0..k).map(|j| q.column(j).iter().copied().collect()).collect();
            let v = a.evaluate(&cols).unwrap().abs();
            if top.len() < 8 || v > top[top.len() - 1].0 {
                top.push((v, q));
                top.sort_by(|x, y| y.0.total_cmp(&x.0));
                top.truncate(8);
            }
        }
        let mut best = top[0].0;
        for (mut val, mut q) in top {
            let mut step = 0.2;
            while step > 1e-7 {
                let mut improved = false;
                for _ in 0..40 {
                    let noise = crate::rng::random_matrix(rng, m, m) * step;
                    let cand = (&q + noise).qr().q();
                    let cols: Vec<Vec<f64>> = (0..k).map(|j| cand.column(j).iter().copied().collect()).collect();
                    let v = a.evaluate(&cols).unwrap().abs();
                    if v > val {
                        val = v;
                        q = cand;
                        improved = true;
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            best = best.max(val);
        }
        best
    }

    #[test]
    fn four_form_on_r6_matches_sampling_oracle() {
        let a = random_form(&mut stream(51, 0), 6, 4);
        let num = comass_numeric(&a, 50, 1e-10).unwrap().value;
        let oracle = sampling_oracle(&a, 1_000_000, &mut stream(51, 1));
        assert!(num >= oracle - 1e-9, "numeric {num} below oracle {oracle}");
        assert!((num - oracle).abs() < 1e-3, "numeric {num} oracle {oracle}");
    }

    #[test]
    fn mass_examples() {
        assert_eq!(mass_2vector(&KForm::basis(4, &[0, 1]).unwrap()).unwrap(), 1.0);
        assert!((mass_2vector(&symplectic2()).unwrap() - 2.0).abs() < 1e-15);
        // 2·(v∧w) with v, w orthonormal.
        let q = random_orthogonal(&mut stream(61, 0), 4);
        let v = KForm::new(4, 1, q.column(0).iter().copied().collect()).unwrap();
        let w = KForm::new(4, 1, q.column(1).iter().copied().collect()).unwrap();
        let x = &wedge(&v, &w).unwrap() * 2.0;
        assert!((mass_2vector(&x).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mass_comass_duality() {
        for i in 0..20 {
            let mut rng = stream(71, i);
            let x = random_form(&mut rng, 4, 2);
            let mass = mass_2vector(&x).unwrap();
            let mut best = f64::NEG_INFINITY;
            for _ in 0..500 {
                let w = random_form(&mut rng, 4, 2);
                let c = comass_2form_value(&w).unwrap();
                best = best.max(inner_product(&(&w * (1.0 / c)), &x).unwrap());
            }
            assert!(best <= mass + 1e-9);
            // Canonical witness: Σ e_{2i}∧e_{2i+1} in the canonical frame of x.
            let canon = canonical_form_2(&x).unwrap();
            let qinv = canon.q.transpose();
            let omega0 = KForm::symplectic(2).unwrap().pullback(&qinv).unwrap();
            assert!((comass_2form_value(&omega0).unwrap() - 1.0).abs() < 1e-9);
            assert!((inner_product(&omega0, &x).unwrap() - mass).abs() < 1e-9);
        }
    }

    #[test]
    fn mass_of_symplectic_vector_via_duality_search() {
        // Unit-comass forms never pair above 2 with e12 + e34; random search
        // followed by hill climbing gets close to it.
        let x = symplectic2();
        let mut rng = stream(72, 0);
        let pair = |w: &KForm| {
            let c = comass_numeric(w, 3, 1e-10).unwrap().value;
            inner_product(&(w * (1.0 / c)), &x).unwrap()
        };
        let mut best_w = random_form(&mut rng, 4, 2);
        let mut best = pair(&best_w);
        for _ in 0..2000 {
            let w = random_form(&mut rng, 4, 2);
            let v = pair(&w);
            assert!(v <= 2.0 + 1e-9);
            if v > best {
                best = v;
                best_w = w;
            }
        }
        let mut step = 0.3;
        for _ in 0..3000 {
            let w = &best_w + &(&random_form(&mut rng, 4, 2) * step);
            let v = pair(&w);
            assert!(v <= 2.0 + 1e-9);
            if v > best {
                best = v;
                best_w = w;
            } else {
                step *= 0.999;
            }
        }
        assert!(best > 1.99, "best found {best}");
    }

    #[test]
    fn comass_is_a_norm_on_two_forms() {
        for i in 0..200 {
            let mut rng = stream(81, i);
            let a = random_form(&mut rng, 6, 2);
            let b = random_form(&mut rng, 6, 2);
            let ca = comass_2form_value(&a).unwrap();
            let cb = comass_2form_value(&b).unwrap();
            let cab = comass_2form_value(&(&a + &b)).unwrap();
            assert!(cab <= ca + cb + 1e-9);
            let t = -2.5;
            let cta = comass_2form_value(&(&a * t)).unwrap();
            assert!((cta - 2.5 * ca).abs() <= 1e-12 * ca);
        }
    }

    #[test]
    fn dispatcher_routes() {
        let one = KForm::new(3, 1, vec![3.0, 4.0, 0.0]).unwrap();
        assert_eq!(comass(&one).unwrap().value, 5.0);
        let three = hodge_star(&random_form(&mut stream(91, 0), 5, 2));
        let r = comass(&three).unwrap();
        assert!(!r.certified);
        assert!((three.evaluate(&r.witness).unwrap() - r.value).abs() <= 1e-9 * r.value);
    }
}
