//! The verification suites behind each subcommand.
//!
//! Sample `i` always draws from `stream(seed, i)`, and parallel results are
//! collected in index order, so reports do not depend on the thread count.

use rayon::prelude::*;
use serde_json::json;
use systole_lab::exterior::{
    check_inner_product_bound, check_wedge_bound, comass_numeric_with, comass_top, wedge, ComassOptions, KForm,
};
use systole_lab::lattice::{
    dual_lattice, minima_csv, random_euclidean_lattice, speyer_sample, successive_minima,
    summarize_speyer, MinimaResult,
};
use systole_lab::normspace::{gamma2_euclidean, john_ellipsoid, sandwich_check};
use systole_lab::rng::{random_form, random_spd, stream};
use systole_lab::torus::{check_inequality_chain, cohomology_lattice, homology_lattice, theorem_report};
use systole_lab::tolerances::{BOUND_REL, IDENTITY_ABS, SPEYER_ABS};
use systole_lab::{FlatTorus, Lattice, NormSpec, Result};

use crate::report::{csv_float, Check, RunReport};

fn par_map<T: Send>(count: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..count).into_par_iter().map(f).collect()
}

/// Index and value of the first maximum.
fn argmax(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    values
        .into_iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best })
}

/// Wedge-comass bound and the inner-product step on random 2-forms of `R^{2n}`.
pub fn lemma31(n: usize, samples: u64, seed: u64) -> Result<RunReport> {
    let dim = 2 * n;
    let rows = par_map(samples, |i| {
        let mut rng = stream(seed, i);
        let forms: Vec<KForm> = (0..n).map(|_| random_form(&mut rng, dim, 2)).collect();
        let wedge = check_wedge_bound(&forms)?;
        let a = random_form(&mut rng, dim, 2);
        let b = random_form(&mut rng, dim, 2);
        let inner = check_inner_product_bound(&a, &b)?;
        Ok((wedge, inner))
    })?;
    let omega = KForm::symplectic(n)?;
    let tight = check_wedge_bound(&vec![omega.clone(); n])?;
    let tight_ratio = tight.ratio.unwrap_or(f64::NAN);
    let aligned = check_inner_product_bound(&omega, &omega)?;

    let wedge_violations = rows.iter().filter(|r| !r.0.pass).count();
    let inner_violations = rows.iter().filter(|r| !r.1.pass).count();
    let (worst_wedge, max_wedge) = argmax(rows.iter().map(|r| r.0.ratio.unwrap_or(0.0)));
    let inner_ratio = |c: &systole_lab::exterior::InnerProductCheck| if c.rhs > 0.0 { c.lhs / c.rhs } else { 0.0 };
    let (worst_inner, max_inner) = argmax(rows.iter().map(|r| inner_ratio(&r.1)));

    let checks = vec![
        Check::count_zero("wedge_bound_violations", wedge_violations),
        Check::count_zero("inner_product_violations", inner_violations),
        Check::at_most("symplectic_tuple_ratio_gap", (tight_ratio - 1.0).abs(), IDENTITY_ABS),
        Check::at_most("aligned_pair_equality_gap", (aligned.lhs - aligned.rhs).abs(), IDENTITY_ABS),
    ];
    let witnesses = json!({
        "n": n,
        "max_wedge_ratio": max_wedge,
        "max_wedge_ratio_sample": worst_wedge,
        "max_inner_ratio": max_inner,
        "max_inner_ratio_sample": worst_inner,
        "symplectic_tuple": tight,
        "aligned_pair": aligned,
        "relative_tolerance": BOUND_REL,
    });
    let mut csv = String::from("sample,wedge_lhs,wedge_rhs,wedge_ratio,inner_lhs,inner_rhs\n");
    for (i, (w, p)) in rows.iter().enumerate() {
        csv.push_str(&format!(
            "{i},{},{},{},{},{}\n",
            csv_float(w.lhs),
            csv_float(w.rhs),
            w.ratio.map(csv_float).unwrap_or_default(),
            csv_float(p.lhs),
            csv_float(p.rhs)
        ));
    }
    Ok(RunReport::new("lemma31", Some(seed), Some(samples), checks, witnesses).with_csv(csv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaMode {
    Euclid2,
    Mahler,
    Speyer,
}

/// Sample `i` of the Euclidean plane suites; sample 0 is hexagonal.
pub fn euclidean_sample(seed: u64, index: u64) -> Lattice {
    if index == 0 {
        Lattice::hexagonal(NormSpec::euclidean_identity(2)).expect("hexagonal basis is valid")
    } else {
        random_euclidean_lattice(&mut stream(seed, index))
    }
}

struct GammaRow {
    lattice: Lattice,
    value: f64,
    primal: MinimaResult,
    dual: MinimaResult,
}

fn gamma_row(lattice: Lattice, mode: GammaMode) -> Result<GammaRow> {
    let primal = successive_minima(&lattice)?;
    let dual = successive_minima(&dual_lattice(&lattice)?)?;
    let value = match mode {
        GammaMode::Mahler => primal.lambdas[0] * dual.lambdas[0],
        _ => primal.lambdas[0] * dual.lambdas[lattice.dim() - 1],
    };
    Ok(GammaRow { lattice, value, primal, dual })
}

pub fn gamma(mode: GammaMode, samples: u64, seed: u64) -> Result<RunReport> {
    let rows = par_map(samples, |i| {
        let lattice = match mode {
            GammaMode::Speyer => speyer_sample(seed, i),
            _ => euclidean_sample(seed, i),
        };
        gamma_row(lattice, mode)
    })?;
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let hex = gamma2_euclidean();
    let (best_index, best) = argmax(values.iter().copied());
    let (suite, checks, witnesses) = match mode {
        GammaMode::Euclid2 => {
            let violations = values.iter().filter(|&&v| v > hex + 1e-9).count();
            (
                "gamma-euclid2",
                vec![
                    Check::count_zero("values_above_2_over_sqrt3", violations),
                    Check::at_most("hexagonal_gap", (values[0] - hex).abs(), 1e-9),
                    Check::at_most("max_gap", (best - hex).abs(), 1e-9),
                ],
                json!({"max": best, "max_sample": best_index, "best_config": rows[best_index].lattice, "bound": hex}),
            )
        }
        GammaMode::Mahler => {
            let bound = 2f64.sqrt();
            let violations = values.iter().filter(|&&v| v > bound + 1e-9).count();
            (
                "gamma-mahler",
                vec![
                    Check::count_zero("values_above_sqrt2", violations),
                    Check::at_most("hexagonal_gap", (values[0] - hex).abs(), 1e-9),
                ],
                json!({"max": best, "max_sample": best_index, "best_config": rows[best_index].lattice, "bound": bound}),
            )
        }
        GammaMode::Speyer => {
            let configs: Vec<Lattice> = rows.iter().map(|r| r.lattice.clone()).collect();
            let report = summarize_speyer(&configs, &values)?;
            (
                "gamma-speyer",
                vec![
                    Check::count_zero("values_above_3_over_2", report.violations),
                    Check::at_least("best_value", report.best_value, hex - 1e-12),
                ],
                json!({
                    "best_value": report.best_value,
                    "best_sample": report.best_index,
                    "best_config": report.best_config,
                    "bound": 1.5,
                    "bound_tolerance": SPEYER_ABS,
                }),
            )
        }
    };
    let mut table = Vec::with_capacity(2 * rows.len());
    for (i, r) in rows.iter().enumerate() {
        table.push((format!("{i}"), r.primal.clone()));
        table.push((format!("{i}*"), r.dual.clone()));
    }
    Ok(RunReport::new(suite, Some(seed), Some(samples), checks, witnesses).with_csv(minima_csv(&table)))
}

/// John ellipsoid of a plane norm and the sandwich margins.
pub fn john(norm: &NormSpec) -> Result<RunReport> {
    let result = john_ellipsoid(norm, 2)?;
    let sandwich = sandwich_check(norm, &result)?;
    let checks = vec![
        Check::new("sandwich", sandwich.pass),
        Check::at_least("min_lower_margin", sandwich.min_lower_margin, -systole_lab::tolerances::SANDWICH_ABS),
        Check::at_least("min_upper_margin", sandwich.min_upper_margin, -systole_lab::tolerances::SANDWICH_ABS),
    ];
    let witnesses = json!({
        "norm": norm,
        "john": result,
        "sandwich_gram": NormSpec::Euclidean { gram: result.sandwich_gram() },
        "convention": "ellipsoid norm |x|_E from gram_e is the inscribed ellipsoid; |x| = |x|_E / sqrt(2) satisfies |x| <= ||x|| <= sqrt(2) |x|",
        "directions": sandwich.directions,
    });
    let mut csv = String::from("angle,norm,inner,lower_margin,upper_margin\n");
    for d in &sandwich.directions {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_float(d.angle),
            csv_float(d.norm),
            csv_float(d.inner),
            csv_float(d.lower_margin),
            csv_float(d.upper_margin)
        ));
    }
    Ok(RunReport::new("john", None, None, checks, witnesses).with_csv(csv))
}

/// `dx_1∧dx_2, dx_3∧dx_4, …` and the `n`-fold symplectic form.
fn canonical_and_tight_alphas(n: usize) -> Result<(Vec<KForm>, Vec<KForm>)> {
    let canonical = (0..n).map(|j| KForm::basis(2 * n, &[2 * j, 2 * j + 1])).collect::<Result<Vec<_>>>()?;
    let omega = KForm::symplectic(n)?;
    Ok((canonical, vec![omega; n]))
}

pub enum TorusSource {
    Given(FlatTorus),
    Random { count: u64, n: usize },
}

pub fn torus(source: TorusSource, seed: u64) -> Result<RunReport> {
    let (tori, samples): (Vec<FlatTorus>, Option<u64>) = match source {
        TorusSource::Given(t) => (vec![t], None),
        TorusSource::Random { count, n } => {
            let tori = par_map(count, |i| FlatTorus::new(n, random_spd(&mut stream(seed, i), 2 * n)))?;
            (tori, Some(count))
        }
    };
    let rows = tori
        .par_iter()
        .map(|t| {
            let report = theorem_report(t)?;
            let (canonical, tight) = canonical_and_tight_alphas(t.n())?;
            let canonical = check_inequality_chain(t, &canonical)?;
            let tight = check_inequality_chain(t, &tight)?;
            let hom = homology_lattice(t)?.successive_minima()?;
            let coh = cohomology_lattice(t)?.successive_minima()?;
            Ok((report, canonical, tight, hom, coh))
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = rows.iter().filter(|r| !r.0.pass).count();
    let chain_failures = rows.iter().filter(|r| !(r.1.pass && r.2.pass)).count();
    let (max_index, max_ratio) = argmax(rows.iter().map(|r| r.0.ratio));
    let (tightest_index, tightest) = argmax(rows.iter().map(|r| r.0.ratio / r.0.bound_chain.bound));
    let checks = vec![
        Check::count_zero("theorem_report_failures", failures),
        Check::count_zero("inequality_chain_failures", chain_failures),
    ];
    let witnesses = if rows.len() == 1 {
        json!({"torus": tori[0], "report": rows[0].0, "canonical_chain": rows[0].1, "tight_chain": rows[0].2})
    } else {
        json!({
            "max_ratio": max_ratio,
            "max_ratio_sample": max_index,
            "max_ratio_torus": tori[max_index],
            "max_ratio_report": rows[max_index].0,
            "max_ratio_over_bound": tightest,
            "max_ratio_over_bound_sample": tightest_index,
        })
    };
    let mut table = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        table.push((format!("torus-{i}-homology"), r.3.clone()));
        table.push((format!("torus-{i}-cohomology"), r.4.clone()));
    }
    Ok(RunReport::new("torus", Some(seed), samples, checks, witnesses).with_csv(minima_csv(&table)))
}

pub fn constants() -> RunReport {
    let report = RunReport::new("constants", None, None, vec![], serde_json::Value::Null);
    let csv = report.constants.csv();
    report.with_csv(csv)
}

/// Empirical `|a∧b| / (|a| |b|)` for 4-forms on `R^8`, comass by the optimizer.
/// Exploratory: there is no acceptance threshold.
pub fn hp2_fuzz(samples: u64, seed: u64) -> Result<RunReport> {
    let opts = ComassOptions { restarts: 8, ..ComassOptions::default() };
    let values = par_map(samples, |i| {
        let mut rng = stream(seed, i);
        let a = random_form(&mut rng, 8, 4);
        let b = random_form(&mut rng, 8, 4);
        let top = comass_top(&wedge(&a, &b)?)?;
        let ca = comass_numeric_with(&a, &opts)?.value;
        let cb = comass_numeric_with(&b, &opts)?.value;
        Ok(top / (ca * cb))
    })?;
    let omega = KForm::symplectic(4)?;
    let omega2 = wedge(&omega, &omega)?;
    let sq = comass_top(&wedge(&omega2, &omega2)?)?;
    let c_omega2 = comass_numeric_with(&omega2, &ComassOptions { restarts: 50, ..ComassOptions::default() })?.value;
    let (max_index, max) = argmax(values.iter().copied());
    let witnesses = json!({
        "acceptance": false,
        "max_constant": max,
        "max_constant_sample": max_index,
        "omega_squared_constant": sq / (c_omega2 * c_omega2),
        "note": "comass values come from the optimizer and are lower bounds, so constants are upper estimates",
    });
    let mut csv = String::from("sample,constant\n");
    for (i, v) in values.iter().enumerate() {
        csv.push_str(&format!("{i},{}\n", csv_float(*v)));
    }
    Ok(RunReport::new("hp2-fuzz", Some(seed), Some(samples), vec![], witnesses).with_csv(csv))
}
