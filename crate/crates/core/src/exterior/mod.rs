//! Exterior algebra over `R^m` with constant coefficients.
//!
//! A [`KForm`] stores one coefficient per strictly increasing multi-index, in
//! lexicographic order. The same type doubles as a k-vector: the pairing of a
//! form with a k-vector is the coefficient dot product ([`inner_product`]).
//!
//! Indices are 0-based in the Rust API and 1-based in the JSON encoding.

mod canonical;
mod checks;
mod comass;

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use canonical::{canonical_form_2, two_form_blocks, CanonicalForm2};
pub use checks::{
    check_inner_product_bound, check_star_isometry, check_wedge_bound, InnerProductCheck,
    StarIsometryCheck, WedgeBoundCheck,
};
pub use comass::{
    comass, comass_2form, comass_2form_value, comass_numeric, comass_numeric_with, comass_top,
    mass_2vector, ComassOptions, ComassResult,
};

/// Largest supported ambient dimension; `C(12, 6) = 924` coefficients at most.
pub const MAX_DIM: usize = 12;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Multi-indices of one ambient dimension, as bitmasks.
struct IndexTable {
    /// `by_degree[k]` lists the k-subsets in lexicographic order.
    by_degree: Vec<Vec<u16>>,
    /// Position of each mask inside `by_degree[popcount(mask)]`.
    rank: Vec<u32>,
}

impl IndexTable {
    fn build(m: usize) -> Self {
        let mut by_degree = vec![Vec::new(); m + 1];
        let mut rank = vec![u32::MAX; 1 << m];
        for (k, list) in by_degree.iter_mut().enumerate() {
            let mut current = Vec::with_capacity(k);
            lex_subsets(m, k, 0, &mut current, list);
            for (r, &mask) in list.iter().enumerate() {
                rank[mask as usize] = r as u32;
            }
        }
        IndexTable { by_degree, rank }
    }
}

fn lex_subsets(m: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<u16>) {
    if current.len() == k {
        out.push(current.iter().fold(0u16, |acc, &i| acc | (1 << i)));
        return;
    }
    let remaining = k - current.len();
    for i in start..=(m - remaining) {
        current.push(i);
        lex_subsets(m, k, i + 1, current, out);
        current.pop();
    }
}

fn table(m: usize) -> &'static IndexTable {
    static TABLES: OnceLock<Vec<IndexTable>> = OnceLock::new();
    &TABLES.get_or_init(|| (0..=MAX_DIM).map(IndexTable::build).collect())[m]
}

fn mask_indices(mask: u16) -> Vec<usize> {
    (0..16).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Sign of the shuffle that sorts the concatenation `(left, right)` of two
/// disjoint index sets.
fn merge_sign(left: u16, right: u16) -> f64 {
    let mut inversions = 0u32;
    let mut r = right;
    while r != 0 {
        let j = r.trailing_zeros();
        inversions += (left >> (j + 1)).count_ones();
        r &= r - 1;
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Degree-`k` alternating form on `R^m` with constant coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl KForm {
    pub fn new(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_shape(dim, degree)?;
        let expected = binomial(dim, degree);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients supplied, C({dim},{degree}) = {expected} expected",
                coeffs.len()
            )));
        }
        Ok(KForm { dim, degree, coeffs })
    }

    pub fn zero(dim: usize, degree: usize) -> Result<Self> {
        check_shape(dim, degree)?;
        Ok(KForm { dim, degree, coeffs: vec![0.0; binomial(dim, degree)] })
    }

    /// `e_{i1} ∧ … ∧ e_{ik}` for arbitrary distinct indices; unsorted input
    /// picks up the sign of the sorting permutation.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        Self::from_terms(dim, indices.len(), &[(indices, 1.0)])
    }

    /// Sum of `c · e_I` terms. Repeated indices within a term give zero.
    pub fn from_terms(dim: usize, degree: usize, terms: &[(&[usize], f64)]) -> Result<Self> {
        let mut form = Self::zero(dim, degree)?;
        for (indices, c) in terms {
            if indices.len() != degree {
                return Err(Error::InvalidArgument(format!(
                    "term {indices:?} does not have degree {degree}"
                )));
            }
            if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
                return Err(Error::InvalidArgument(format!("index {bad} out of range for R^{dim}")));
            }
            let mut mask = 0u16;
            let mut sign = 1.0;
            let mut repeated = false;
            for &i in indices.iter() {
                let bit = 1u16 << i;
                if mask & bit != 0 {
                    repeated = true;
                    break;
                }
                sign *= merge_sign(mask, bit);
                mask |= bit;
            }
            if !repeated {
                let r = table(dim).rank[mask as usize] as usize;
                form.coeffs[r] += sign * c;
            }
        }
        Ok(form)
    }

    /// `Σ_i e_{2i} ∧ e_{2i+1}` on `R^{2n}`.
    pub fn symplectic(n: usize) -> Result<Self> {
        let pairs: Vec<[usize; 2]> = (0..n).map(|i| [2 * i, 2 * i + 1]).collect();
        let terms: Vec<(&[usize], f64)> = pairs.iter().map(|p| (&p[..], 1.0)).collect();
        Self::from_terms(2 * n, 2, &terms)
    }

    /// `c · e_1 ∧ … ∧ e_m`.
    pub fn top(dim: usize, c: f64) -> Result<Self> {
        Self::new(dim, dim, vec![c])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Sorted multi-indices in storage order.
    pub fn multi_indices(&self) -> Vec<Vec<usize>> {
        self.masks().iter().map(|&m| mask_indices(m)).collect()
    }

    pub fn coeff(&self, indices: &[usize]) -> f64 {
        let probe = KForm::basis(self.dim, indices).expect("valid multi-index");
        inner_product(self, &probe).expect("same shape")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Euclidean norm of the coefficient array.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    fn masks(&self) -> &'static [u16] {
        &table(self.dim).by_degree[self.degree]
    }

    /// Interior product: `(ι_v a)(w_2, …, w_k) = a(v, w_2, …, w_k)`.
    pub fn contract(&self, v: &[f64]) -> Result<KForm> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} contracted with a form on R^{}",
                v.len(),
                self.dim
            )));
        }
        if self.degree == 0 {
            return Err(Error::InvalidArgument("cannot contract a 0-form".into()));
        }
        let tab = table(self.dim);
        let mut out = vec![0.0; binomial(self.dim, self.degree - 1)];
        for (&mask, &c) in self.masks().iter().zip(&self.coeffs) {
            if c == 0.0 {
                continue;
            }
            let mut rest = mask;
            let mut below = 0u32;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
                let target = tab.rank[(mask & !(1 << i)) as usize] as usize;
                out[target] += sign * v[i] * c;
                below += 1;
            }
        }
        Ok(KForm { dim: self.dim, degree: self.degree - 1, coeffs: out })
    }

    /// `a(v_1, …, v_k)`, the alternating multilinear extension.
    pub fn evaluate<V: AsRef<[f64]>>(&self, vectors: &[V]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::InvalidArgument(format!(
                "{} vectors supplied to a {}-form",
                vectors.len(),
                self.degree
            )));
        }
        let mut acc = self.clone();
        for v in vectors {
            acc = acc.contract(v.as_ref())?;
        }
        Ok(acc.coeffs[0])
    }

    /// Pullback along the linear map whose columns are `q`'s columns:
    /// `(q*a)(e_I) = a(q e_{i1}, …, q e_{ik})`.
    pub fn pullback(&self, q: &DMatrix<f64>) -> Result<KForm> {
        if q.nrows() != self.dim || q.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} map for a form on R^{}",
                q.nrows(),
                q.ncols(),
                self.dim
            )));
        }
        let cols: Vec<Vec<f64>> = (0..self.dim).map(|j| q.column(j).iter().copied().collect()).collect();
        let coeffs = self
            .masks()
            .iter()
            .map(|&mask| {
                let frame: Vec<&[f64]> = mask_indices(mask).into_iter().map(|i| cols[i].as_slice()).collect();
                self.evaluate(&frame)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(KForm { dim: self.dim, degree: self.degree, coeffs })
    }

    /// Coefficient of `e_1 ∧ … ∧ e_m`.
    pub fn top_coefficient(&self) -> Result<f64> {
        if self.degree != self.dim {
            return Err(Error::InvalidArgument(format!(
                "degree {} is not the top degree {}",
                self.degree, self.dim
            )));
        }
        Ok(self.coeffs[0])
    }

    /// Antisymmetric `A` with `a(u, v) = uᵀ A v` (degree 2 only).
    pub fn to_antisymmetric(&self) -> Result<DMatrix<f64>> {
        if self.degree != 2 {
            return Err(Error::InvalidArgument(format!("degree {} is not 2", self.degree)));
        }
        let mut a = DMatrix::zeros(self.dim, self.dim);
        for (&mask, &c) in self.masks().iter().zip(&self.coeffs) {
            let idx = mask_indices(mask);
            a[(idx[0], idx[1])] = c;
            a[(idx[1], idx[0])] = -c;
        }
        Ok(a)
    }

    /// Inverse of [`KForm::to_antisymmetric`]; only the strict upper triangle is read.
    pub fn from_antisymmetric(a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch("coefficient matrix is not square".into()));
        }
        let dim = a.nrows();
        let mut form = Self::zero(dim, 2)?;
        for (r, &mask) in table(dim).by_degree[2].iter().enumerate() {
            let idx = mask_indices(mask);
            form.coeffs[r] = a[(idx[0], idx[1])];
        }
        Ok(form)
    }

    /// Image of a 2-vector under the linear map `t`, i.e. the second compound
    /// matrix acting on the coefficients: `(t u) ∧ (t v)`.
    pub fn push_forward_2(&self, t: &DMatrix<f64>) -> Result<KForm> {
        let a = self.to_antisymmetric()?;
        if t.nrows() != self.dim || t.ncols() != self.dim {
            return Err(Error::DimensionMismatch("map does not match the form".into()));
        }
        KForm::from_antisymmetric(&(t * a * t.transpose()))
    }

    fn same_shape(&self, other: &KForm) -> Result<()> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::DimensionMismatch(format!(
                "({}, {}) vs ({}, {}) as (dim, degree)",
                self.dim, self.degree, other.dim, other.degree
            )));
        }
        Ok(())
    }
}

fn check_shape(dim: usize, degree: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidArgument(format!("dimension {dim} outside 1..={MAX_DIM}")));
    }
    if degree > dim {
        return Err(Error::InvalidArgument(format!("degree {degree} exceeds dimension {dim}")));
    }
    Ok(())
}

/// Exterior product with the standard shuffle sign convention.
pub fn wedge(a: &KForm, b: &KForm) -> Result<KForm> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!("R^{} vs R^{}", a.dim, b.dim)));
    }
    let degree = a.degree + b.degree;
    if degree > a.dim {
        return Err(Error::DegreeOverflow { left: a.degree, right: b.degree, dim: a.dim });
    }
    // Evaluate in a canonical argument order so that swapping the arguments
    // changes the result by exactly the sign (-1)^{pq}.
    if canonical_key_cmp(a, b) == std::cmp::Ordering::Greater {
        let sign = if (a.degree * b.degree).is_multiple_of(2) { 1.0 } else { -1.0 };
        return Ok(&wedge_ordered(b, a) * sign);
    }
    Ok(wedge_ordered(a, b))
}

fn canonical_key_cmp(a: &KForm, b: &KForm) -> std::cmp::Ordering {
    a.degree.cmp(&b.degree).then_with(|| {
        a.coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

fn wedge_ordered(a: &KForm, b: &KForm) -> KForm {
    let degree = a.degree + b.degree;
    let tab = table(a.dim);
    let mut out = vec![0.0; binomial(a.dim, degree)];
    for (&ma, &ca) in a.masks().iter().zip(&a.coeffs) {
        if ca == 0.0 {
            continue;
        }
        for (&mb, &cb) in b.masks().iter().zip(&b.coeffs) {
            if cb == 0.0 || ma & mb != 0 {
                continue;
            }
            out[tab.rank[(ma | mb) as usize] as usize] += merge_sign(ma, mb) * ca * cb;
        }
    }
    KForm { dim: a.dim, degree, coeffs: out }
}

/// Wedge of a nonempty list of forms, left to right.
pub fn wedge_all(forms: &[KForm]) -> Result<KForm> {
    let (first, rest) = forms
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty wedge product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, f| wedge(&acc, f))
}

/// Hodge star for the standard orientation and inner product:
/// `a ∧ ⋆b = ⟨a, b⟩ e_1 ∧ … ∧ e_m`.
pub fn hodge_star(a: &KForm) -> KForm {
    let tab = table(a.dim);
    let full: u16 = ((1u32 << a.dim) - 1) as u16;
    let mut out = vec![0.0; binomial(a.dim, a.dim - a.degree)];
    for (&mask, &c) in a.masks().iter().zip(&a.coeffs) {
        let comp = full & !mask;
        out[tab.rank[comp as usize] as usize] = merge_sign(mask, comp) * c;
    }
    KForm { dim: a.dim, degree: a.dim - a.degree, coeffs: out }
}

/// Orthonormal-frame inner product (coefficient dot product).
pub fn inner_product(a: &KForm, b: &KForm) -> Result<f64> {
    a.same_shape(b)?;
    Ok(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x * y).sum())
}

impl Add for &KForm {
    type Output = KForm;
    fn add(self, rhs: &KForm) -> KForm {
        self.same_shape(rhs).expect("adding forms of different shape");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(x, y)| x + y).collect();
        KForm { dim: self.dim, degree: self.degree, coeffs }
    }
}

impl Sub for &KForm {
    type Output = KForm;
    fn sub(self, rhs: &KForm) -> KForm {
        self + &(-rhs)
    }
}

impl Neg for &KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        self * -1.0
    }
}

impl Mul<f64> for &KForm {
    type Output = KForm;
    fn mul(self, t: f64) -> KForm {
        KForm { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * t).collect() }
    }
}

#[derive(Serialize, Deserialize)]
struct Term {
    idx: Vec<usize>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct KFormJson {
    dim: usize,
    degree: usize,
    coeffs: Vec<Term>,
}

impl Serialize for KForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .multi_indices()
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, &c)| c != 0.0)
            .map(|(idx, &c)| Term { idx: idx.into_iter().map(|i| i + 1).collect(), c })
            .collect();
        KFormJson { dim: self.dim, degree: self.degree, coeffs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for KForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = KFormJson::deserialize(d)?;
        let mut form = KForm::zero(raw.dim, raw.degree).map_err(D::Error::custom)?;
        let mut seen = vec![false; form.coeffs.len()];
        for term in raw.coeffs {
            if term.idx.len() != raw.degree {
                return Err(D::Error::custom(format!("index {:?} has wrong length", term.idx)));
            }
            if term.idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(D::Error::custom(format!("index {:?} is not strictly increasing", term.idx)));
            }
            if term.idx.iter().any(|&i| i == 0 || i > raw.dim) {
                return Err(D::Error::custom(format!("index {:?} outside 1..={}", term.idx, raw.dim)));
            }
            let mask = term.idx.iter().fold(0u16, |m, &i| m | 1 << (i - 1));
            let r = table(raw.dim).rank[mask as usize] as usize;
            if std::mem::replace(&mut seen[r], true) {
                return Err(D::Error::custom(format!("index {:?} listed twice", term.idx)));
            }
            form.coeffs[r] = term.c;
        }
        Ok(form)
    }
}
