//! Reference values of optimal systolic ratios and lattice constants.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantRow {
    pub space: &'static str,
    /// Closed form of the bound.
    pub expression: &'static str,
    /// Numerical value; absent for the family `CP^n`.
    pub value: Option<f64>,
    pub kind: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorialComparison {
    pub n: u32,
    /// `n!`, the wedge-comass constant for `n` 2-forms.
    pub n_factorial: u128,
    /// `(2n)! / 2^n`.
    pub double_factorial_ratio: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsTable {
    pub rows: Vec<ConstantRow>,
    pub comparison: Vec<FactorialComparison>,
}

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

pub fn constants_table() -> ConstantsTable {
    let s3 = 3f64.sqrt();
    let row = |space, expression, value, kind| ConstantRow { space, expression, value, kind };
    let rows = vec![
        row("T^2", "2/sqrt(3)", Some(2.0 / s3), "systolic"),
        row("RP^2", "pi/2", Some(PI / 2.0), "systolic"),
        row("CP^n", "n!", None, "stable systolic"),
        row("RP^2#RP^2", "pi/(2*sqrt(2))", Some(PI / (2.0 * SQRT_2)), "systolic"),
        row("3RP^2", "(sqrt(2)+1)/3", Some((SQRT_2 + 1.0) / 3.0), "systolic, K <= 0"),
        row("S^2 minus 3 points", "2*sqrt(3)", Some(2.0 * s3), "geodesics"),
        row("S^2 minus 4 points", "4/sqrt(3)", Some(4.0 / s3), "geodesics"),
        row("Gamma_2^e", "2/sqrt(3)", Some(2.0 / s3), "lattice, Euclidean plane"),
        row("Gamma_2", "3/2", Some(1.5), "lattice, normed plane"),
        row("Mahler", "sqrt(2)", Some(SQRT_2), "lattice, lambda_1(L) lambda_1(L*)"),
    ];
    let comparison = (1..=10)
        .map(|n| FactorialComparison {
            n,
            n_factorial: factorial(n),
            double_factorial_ratio: factorial(2 * n) >> n,
        })
        .collect();
    ConstantsTable { rows, comparison }
}

impl ConstantsTable {
    pub fn csv(&self) -> String {
        let mut out = String::from("space,expression,value,kind\n");
        for r in &self.rows {
            let value = r.value.map(crate::report::csv_float).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", r.space, r.expression, value, r.kind.replace(',', ";")));
        }
        out.push_str("n,n_factorial,double_factorial_ratio\n");
        for c in &self.comparison {
            out.push_str(&format!("{},{},{}\n", c.n, c.n_factorial, c.double_factorial_ratio));
        }
        out
    }
}
