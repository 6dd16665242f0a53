//! Flat tori `R^{2n}/Z^{2n}` and their stable 2-systoles.
//!
//! With `G = L Lᵀ`, integer vectors map to orthonormal coordinates by `Lᵀ`
//! and integer covectors by `L⁻¹`; on 2-vectors and 2-forms this is the
//! induced map on `Λ²`. The homology lattice `Λ²Z^{2n}` carries the mass
//! norm and the cohomology lattice the comass norm, so both reduce to the
//! canonical-form routines of [`crate::exterior`].

use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exterior::{binomial, canonical_form_2, comass_2form_value, factorial, mass_2vector, wedge_all, KForm};
use crate::lattice::{successive_minima_with, LatticeNorm, MinimaResult};
use crate::normspace::{check_spd, serialize_matrix, MatrixJson};
use crate::tolerances::BOUND_REL;

pub const MODELING_ASSUMPTION: &str =
    "stable norm of a real 2-class on a flat torus = mass of its constant representative";

const MAX_N: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct FlatTorus {
    n: usize,
    gram: DMatrix<f64>,
    chol: DMatrix<f64>,
}

impl FlatTorus {
    /// `T^{2n}` with the flat metric `G` on `R^{2n}/Z^{2n}`.
    pub fn new(n: usize, gram: DMatrix<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if gram.nrows() != 2 * n || gram.ncols() != 2 * n {
            return Err(Error::DimensionMismatch(format!(
                "Gram is {}x{}, expected {}x{}",
                gram.nrows(),
                gram.ncols(),
                2 * n,
                2 * n
            )));
        }
        check_spd(&gram)?;
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization failed".into()))?
            .l();
        Ok(FlatTorus { n, gram, chol })
    }

    pub fn standard(n: usize) -> Result<Self> {
        FlatTorus::new(n, DMatrix::identity(2 * n, 2 * n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `sqrt(det G)`, the product of the Cholesky diagonal.
    pub fn volume(&self) -> f64 {
        self.chol.diagonal().iter().product()
    }

    /// Rank of `Λ²Z^{2n}`.
    pub fn b2(&self) -> usize {
        binomial(2 * self.n, 2)
    }

    /// Mass of an integral 2-vector given by lexicographic coefficients.
    pub fn mass_of(&self, coeffs: &[i64]) -> Result<f64> {
        let x = KForm::new(2 * self.n, 2, coeffs.iter().map(|&c| c as f64).collect())?;
        mass_2vector(&x.push_forward_2(&self.chol.transpose())?)
    }

    /// 2-covector in orthonormal coordinates.
    pub fn orthonormal_covector(&self, alpha: &KForm) -> Result<KForm> {
        alpha.push_forward_2(&self.inverse_chol()?)
    }

    fn inverse_chol(&self) -> Result<DMatrix<f64>> {
        self.chol
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))
    }

    /// Matrix of the induced map on `Λ²` in the lexicographic basis.
    fn compound(&self, t: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let m = 2 * self.n;
        let b = self.b2();
        let mut out = DMatrix::zeros(b, b);
        for k in 0..b {
            let mut e = KForm::zero(m, 2)?;
            e.coeffs_mut()[k] = 1.0;
            let img = e.push_forward_2(t)?;
            out.column_mut(k).copy_from_slice(img.coeffs());
        }
        Ok(out)
    }
}

/// Mass or comass of 2-vectors / 2-forms given by orthonormal coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormNormKind {
    Mass,
    Comass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormNorm {
    pub n: usize,
    pub kind: FormNormKind,
}

impl LatticeNorm for FormNorm {
    fn norm(&self, x: &[f64]) -> f64 {
        let f = KForm::new(2 * self.n, 2, x.to_vec()).expect("coefficient count matches Λ²");
        match self.kind {
            FormNormKind::Mass => mass_2vector(&f),
            FormNormKind::Comass => comass_2form_value(&f),
        }
        .expect("degree is 2")
    }

    /// Blocks `a_i ≥ 0` with `Σ a_i² = |x|²`: mass `Σ a_i ≥ |x|`, comass
    /// `max a_i ≥ |x| / √n`.
    fn euclidean_lower_bound(&self) -> f64 {
        match self.kind {
            FormNormKind::Mass => 1.0,
            FormNormKind::Comass => 1.0 / (self.n as f64).sqrt(),
        }
    }
}

/// `Λ²Z^{2n}` in orthonormal coordinates, with the mass or comass norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormLattice {
    #[serde(serialize_with = "serialize_matrix")]
    pub basis: DMatrix<f64>,
    pub norm: FormNormKind,
    pub n: usize,
}

impl FormLattice {
    pub fn norm_of(&self, coeffs: &[i64]) -> f64 {
        let x: Vec<f64> = (0..self.basis.nrows())
            .map(|i| coeffs.iter().enumerate().map(|(j, &c)| self.basis[(i, j)] * c as f64).sum())
            .collect();
        self.form_norm().norm(&x)
    }

    pub fn successive_minima(&self) -> Result<MinimaResult> {
        successive_minima_with(&self.basis, &self.form_norm())
    }

    fn form_norm(&self) -> FormNorm {
        FormNorm { n: self.n, kind: self.norm }
    }
}

/// Integral 2-homology under the mass norm.
pub fn homology_lattice(t: &FlatTorus) -> Result<FormLattice> {
    Ok(FormLattice { basis: t.compound(&t.chol.transpose())?, norm: FormNormKind::Mass, n: t.n })
}

/// Integral 2-cohomology under the comass norm.
pub fn cohomology_lattice(t: &FlatTorus) -> Result<FormLattice> {
    Ok(FormLattice { basis: t.compound(&t.inverse_chol()?)?, norm: FormNormKind::Comass, n: t.n })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableSystole {
    pub value: f64,
    /// Lexicographic coefficients on `e_i ∧ e_j`.
    pub achiever: Vec<i64>,
}

pub fn stable_2_systole(t: &FlatTorus) -> Result<StableSystole> {
    if t.n > MAX_N {
        return Err(Error::Unsupported(format!("n = {} exceeds the enumeration cap n ≤ {MAX_N}", t.n)));
    }
    let m = homology_lattice(t)?.successive_minima()?;
    Ok(StableSystole { value: m.lambdas[0], achiever: m.achievers[0].clone() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityChain {
    /// `∫ a_1 ∧ … ∧ a_n`.
    pub integral: f64,
    pub comasses: Vec<f64>,
    pub volume: f64,
    /// `n! Π comass(α_j) · vol`.
    pub upper: f64,
    /// `1 ≤ |∫|`.
    pub lower_holds: bool,
    /// `|∫| ≤ n! Π comass(α_j) · vol`.
    pub upper_holds: bool,
    pub pass: bool,
}

/// Checks `1 ≤ |∫ a_1∧…∧a_n| ≤ n! Π comass(α_j) vol` for integral 2-covectors
/// `α_j` given in the coordinates `dx_i`.
pub fn check_inequality_chain(t: &FlatTorus, alphas: &[KForm]) -> Result<InequalityChain> {
    let m = 2 * t.n;
    if alphas.len() != t.n {
        return Err(Error::DimensionMismatch(format!("{} covectors for n = {}", alphas.len(), t.n)));
    }
    for a in alphas {
        if a.dim() != m || a.degree() != 2 {
            return Err(Error::DimensionMismatch(format!("expected 2-covectors on R^{m}")));
        }
        if a.coeffs().iter().any(|c| c.fract() != 0.0) {
            return Err(Error::Precondition("covectors must have integer coefficients".into()));
        }
    }
    let degree = wedge_all(alphas)?.top_coefficient()?;
    if degree == 0.0 {
        return Err(Error::Precondition("the wedge is not a nonzero multiple of the fundamental class".into()));
    }
    let orth = alphas.iter().map(|a| t.orthonormal_covector(a)).collect::<Result<Vec<_>>>()?;
    let volume = t.volume();
    let integral = wedge_all(&orth)?.top_coefficient()? * volume;
    let comasses = orth
        .iter()
        .map(|a| {
            let c = canonical_form_2(a)?;
            Ok(c.blocks.iter().copied().fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    let upper = factorial(t.n) * comasses.iter().product::<f64>() * volume;
    let lower_holds = integral.abs() >= 1.0 - BOUND_REL;
    let upper_holds = integral.abs() <= upper * (1.0 + BOUND_REL);
    Ok(InequalityChain { integral, comasses, volume, upper, lower_holds, upper_holds, pass: lower_holds && upper_holds })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundChain {
    pub lambda1_homology: f64,
    /// `λ_b` of the cohomology lattice under the comass norm.
    pub lambdab_cohomology: f64,
    /// Chosen cohomology minima achievers, lexicographic coefficients.
    pub alphas: Vec<Vec<i64>>,
    pub alpha_comasses: Vec<f64>,
    pub integral: f64,
    pub chain: InequalityChain,
    /// `n! (λ_1 λ_b)^n`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystoleReport {
    pub n: usize,
    pub stsys2: f64,
    pub achiever: Vec<i64>,
    pub volume: f64,
    /// `stsys2^n / volume`.
    pub ratio: f64,
    pub bound_chain: BoundChain,
    pub modeling_assumption: &'static str,
    pub pass: bool,
}

/// Stable 2-systole, volume and ratio, with the bound `n! (λ_1 λ_b)^n`.
///
/// The covectors `α_j` are drawn from the cohomology successive-minima
/// achievers, so each has comass at most `λ_b`; the first `n`-tuple (with
/// repetition) whose wedge is nonzero is used.
pub fn theorem_report(t: &FlatTorus) -> Result<SystoleReport> {
    let sys = stable_2_systole(t)?;
    let coh = cohomology_lattice(t)?.successive_minima()?;
    let b = t.b2();
    let lambdab = coh.lambdas[b - 1];
    let m = 2 * t.n;
    let as_form = |c: &[i64]| KForm::new(m, 2, c.iter().map(|&v| v as f64).collect());
    let covectors = coh.achievers.iter().map(|c| as_form(c)).collect::<Result<Vec<_>>>()?;
    let tuple = first_nonzero_tuple(&covectors, t.n)?
        .ok_or_else(|| Error::Precondition("no product of cohomology minima is nonzero".into()))?;
    let alphas: Vec<KForm> = tuple.iter().map(|&i| covectors[i].clone()).collect();
    let chain = check_inequality_chain(t, &alphas)?;
    let volume = t.volume();
    let ratio = sys.value.powi(t.n as i32) / volume;
    let bound = factorial(t.n) * (sys.value * lambdab).powi(t.n as i32);
    let pass = chain.pass && ratio <= bound * (1.0 + 1e-6);
    Ok(SystoleReport {
        n: t.n,
        stsys2: sys.value,
        achiever: sys.achiever,
        volume,
        ratio,
        bound_chain: BoundChain {
            lambda1_homology: sys.value,
            lambdab_cohomology: lambdab,
            alphas: tuple.iter().map(|&i| coh.achievers[i].clone()).collect(),
            alpha_comasses: chain.comasses.clone(),
            integral: chain.integral,
            chain,
            bound,
        },
        modeling_assumption: MODELING_ASSUMPTION,
        pass,
    })
}

/// First nondecreasing index tuple of length `n` whose wedge is nonzero.
fn first_nonzero_tuple(forms: &[KForm], n: usize) -> Result<Option<Vec<usize>>> {
    fn rec(forms: &[KForm], n: usize, start: usize, cur: &mut Vec<usize>) -> Result<Option<Vec<usize>>> {
        if cur.len() == n {
            let picked: Vec<KForm> = cur.iter().map(|&i| forms[i].clone()).collect();
            return Ok((wedge_all(&picked)?.top_coefficient()? != 0.0).then(|| cur.clone()));
        }
        for i in start..forms.len() {
            cur.push(i);
            if let Some(found) = rec(forms, n, i, cur)? {
                return Ok(Some(found));
            }
            cur.pop();
        }
        Ok(None)
    }
    rec(forms, n, 0, &mut Vec::new())
}

#[derive(Serialize)]
struct TorusOut<'a> {
    n: usize,
    #[serde(serialize_with = "serialize_matrix")]
    gram: &'a DMatrix<f64>,
}

#[derive(Deserialize)]
struct TorusIn {
    n: usize,
    gram: MatrixJson,
}

impl Serialize for FlatTorus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TorusOut { n: self.n, gram: &self.gram }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FlatTorus {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = TorusIn::deserialize(d)?;
        let gram = raw.gram.into_square(Some(2 * raw.n)).map_err(D::Error::custom)?;
        FlatTorus::new(raw.n, gram).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(v))
    }

    fn lex(n: usize, pairs: &[((usize, usize), i64)]) -> Vec<i64> {
        let idx: Vec<[usize; 2]> = pairs.iter().map(|((i, j), _)| [*i, *j]).collect();
        let terms: Vec<(&[usize], f64)> = idx.iter().zip(pairs).map(|(ij, (_, c))| (&ij[..], *c as f64)).collect();
        let f = KForm::from_terms(2 * n, 2, &terms).unwrap();
        f.coeffs().iter().map(|&c| c as i64).collect()
    }

    #[test]
    fn homology_norm_examples() {
        let t = FlatTorus::standard(2).unwrap();
        let h = homology_lattice(&t).unwrap();
        assert_eq!(h.basis, DMatrix::identity(6, 6));
        assert_eq!(h.norm_of(&lex(2, &[((0, 1), 1)])), 1.0);
        assert!((h.norm_of(&lex(2, &[((0, 1), 1), ((2, 3), 1)])) - 2.0).abs() < 1e-12);
        let t = FlatTorus::new(2, diag(&[4.0, 4.0, 1.0, 1.0])).unwrap();
        assert_eq!(t.mass_of(&lex(2, &[((0, 1), 1)])).unwrap(), 4.0);
        assert_eq!(t.mass_of(&lex(2, &[((2, 3), 1)])).unwrap(), 1.0);
    }

    #[test]
    fn systole_examples() {
        let s = stable_2_systole(&FlatTorus::standard(2).unwrap()).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.achiever.iter().map(|c| c.abs()).sum::<i64>(), 1);
        let t = FlatTorus::new(2, diag(&[4.0, 4.0, 0.25, 0.25])).unwrap();
        let s = stable_2_systole(&t).unwrap();
        assert_eq!(s.value, 0.25);
        assert_eq!(s.achiever.iter().map(|c| c.abs()).collect::<Vec<_>>(), lex(2, &[((2, 3), 1)]));
        assert_eq!(stable_2_systole(&FlatTorus::standard(1).unwrap()).unwrap().value, 1.0);
        assert!(matches!(stable_2_systole(&FlatTorus::standard(3).unwrap()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn chain_examples() {
        let t = FlatTorus::standard(2).unwrap();
        let dx12 = KForm::basis(4, &[0, 1]).unwrap();
        let dx34 = KForm::basis(4, &[2, 3]).unwrap();
        let c = check_inequality_chain(&t, &[dx12.clone(), dx34]).unwrap();
        assert_eq!(c.integral, 1.0);
        assert_eq!(c.comasses, vec![1.0, 1.0]);
        assert_eq!(c.upper, 2.0);
        assert!(c.pass);
        let omega = KForm::symplectic(2).unwrap();
        let c = check_inequality_chain(&t, &[omega.clone(), omega]).unwrap();
        assert_eq!(c.integral, 2.0);
        assert!((c.upper - 2.0).abs() < 1e-12 && c.pass);
        let skew = FlatTorus::new(2, DMatrix::from_row_slice(4, 4, &[
            2.0, 0.3, 0.0, 0.1, 0.3, 1.0, 0.2, 0.0, 0.0, 0.2, 1.5, 0.4, 0.1, 0.0, 0.4, 1.0,
        ]))
        .unwrap();
        assert!(matches!(check_inequality_chain(&skew, &[dx12.clone(), dx12.clone()]), Err(Error::Precondition(_))));
        assert!(check_inequality_chain(&t, &[&dx12 * 0.5, dx12]).is_err());
    }

    #[test]
    fn report_examples() {
        let r = theorem_report(&FlatTorus::standard(2).unwrap()).unwrap();
        assert_eq!((r.stsys2, r.volume, r.ratio), (1.0, 1.0, 1.0));
        assert_eq!(r.bound_chain.lambdab_cohomology, 1.0);
        assert_eq!(r.bound_chain.bound, 2.0);
        assert!(r.pass);
        let r = theorem_report(&FlatTorus::new(2, diag(&[4.0, 4.0, 0.25, 0.25])).unwrap()).unwrap();
        assert_eq!(r.ratio, 1.0 / 16.0);
        assert!(r.pass);
        let r = theorem_report(&FlatTorus::new(1, DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0])).unwrap())
            .unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!(r.pass);
    }

    #[test]
    fn json_round_trip() {
        let t: FlatTorus = serde_json::from_str(r#"{"n":1,"gram":[1,0.5,0.5,1]}"#).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<FlatTorus>(&text).unwrap(), t);
        assert!(serde_json::from_str::<FlatTorus>(r#"{"n":2,"gram":[1,0.5,0.5,1]}"#).is_err());
        assert!(serde_json::from_str::<FlatTorus>(r#"{"n":1,"gram":[1,2,2,1]}"#).is_err());
    }
}
