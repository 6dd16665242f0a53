//! The wedge-comass bound `|ω_1 ∧ … ∧ ω_n| ≤ n! Π|ω_i|` and the two facts it
//! rests on: `a·b ≤ n|a||b|` for 2-forms on `R^{2n}`, and `|⋆b| = |b|`.

use serde::Serialize;

use super::{comass, comass_2form_value, comass_numeric_with, comass_top, factorial, hodge_star, inner_product, wedge_all, ComassOptions, KForm};
use crate::error::{Error, Result};
use crate::tolerances::{BOUND_REL, OPTIMIZER_REL};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WedgeBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, absent when `rhs == 0`.
    pub ratio: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerProductCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarIsometryCheck {
    pub comass_b: f64,
    pub comass_star_b: f64,
    pub relative_gap: f64,
    pub pass: bool,
}

fn symplectic_dim(forms: &[&KForm]) -> Result<usize> {
    let first = forms.first().ok_or_else(|| Error::InvalidArgument("no forms given".into()))?;
    let dim = first.dim();
    if dim % 2 != 0 {
        return Err(Error::DimensionMismatch(format!("R^{dim} is not even-dimensional")));
    }
    for f in forms {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch(format!("R^{} vs R^{dim}", f.dim())));
        }
        if f.degree() != 2 {
            return Err(Error::InvalidArgument(format!("degree {} is not 2", f.degree())));
        }
    }
    Ok(dim / 2)
}

/// `comass(ω_1 ∧ … ∧ ω_n)` against `n! Π comass(ω_i)` for 2-forms on `R^{2n}`.
pub fn check_wedge_bound(forms: &[KForm]) -> Result<WedgeBoundCheck> {
    let refs: Vec<&KForm> = forms.iter().collect();
    let n = symplectic_dim(&refs)?;
    if forms.len() != n {
        return Err(Error::DimensionMismatch(format!("{} forms on R^{}, expected {n}", forms.len(), 2 * n)));
    }
    let lhs = comass_top(&wedge_all(forms)?)?;
    let rhs = forms
        .iter()
        .map(comass_2form_value)
        .try_fold(factorial(n), |acc, c| c.map(|c| acc * c))?;
    let ratio = (rhs > 0.0).then(|| lhs / rhs);
    Ok(WedgeBoundCheck { lhs, rhs, ratio, pass: lhs <= rhs * (1.0 + BOUND_REL) })
}

/// `a·b` against `n |a| |b|` for 2-forms on `R^{2n}`.
pub fn check_inner_product_bound(a: &KForm, b: &KForm) -> Result<InnerProductCheck> {
    let n = symplectic_dim(&[a, b])?;
    let lhs = inner_product(a, b)?;
    let rhs = n as f64 * comass_2form_value(a)? * comass_2form_value(b)?;
    Ok(InnerProductCheck { lhs, rhs, pass: lhs <= rhs * (1.0 + BOUND_REL) })
}

/// Compares the comass of `b` and of `⋆b`, each by its own route: closed form
/// for degrees 0, 1, 2 and top, otherwise the optimizer with `samples` restarts.
pub fn check_star_isometry(b: &KForm, samples: usize) -> Result<StarIsometryCheck> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let opts = ComassOptions { restarts: samples, ..ComassOptions::default() };
    let measure = |f: &KForm| -> Result<f64> {
        let k = f.degree();
        if k <= 2 || k == f.dim() {
            Ok(comass(f)?.value)
        } else {
            Ok(comass_numeric_with(f, &opts)?.value)
        }
    };
    let comass_b = measure(b)?;
    let comass_star_b = measure(&hodge_star(b))?;
    let scale = comass_b.max(comass_star_b);
    let relative_gap = if scale > 0.0 { (comass_b - comass_star_b).abs() / scale } else { 0.0 };
    Ok(StarIsometryCheck { comass_b, comass_star_b, relative_gap, pass: relative_gap <= OPTIMIZER_REL })
}
