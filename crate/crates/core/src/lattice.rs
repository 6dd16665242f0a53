//! Full-rank lattices in normed spaces.
//!
//! Successive minima are computed exactly: Fincke–Pohst enumeration inside a
//! Euclidean ball that provably contains the norm ball, followed by a greedy
//! pass that keeps each point independent of those already kept.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::normspace::{serialize_matrix, MatrixJson, NormSpec};
use crate::rng::{random_basis_2d, random_spd, stream};
use crate::tolerances::{ENUMERATION_CAP, SINGULAR_DET, SPEYER_ABS};

/// A norm usable for enumeration: its value and a constant `c > 0` with
/// `norm(x) ≥ c |x|_2`.
pub trait LatticeNorm {
    fn norm(&self, x: &[f64]) -> f64;
    fn euclidean_lower_bound(&self) -> f64;
}

struct SpecNorm<'a> {
    spec: &'a NormSpec,
    lower: f64,
}

impl LatticeNorm for SpecNorm<'_> {
    fn norm(&self, x: &[f64]) -> f64 {
        self.spec.eval_unchecked(x)
    }
    fn euclidean_lower_bound(&self) -> f64 {
        self.lower
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    basis: DMatrix<f64>,
    norm: NormSpec,
    lower: f64,
}

impl Lattice {
    /// Lattice spanned by the columns of `basis`.
    ///
    /// Non-Euclidean norms are accepted in the plane; in higher dimension only
    /// Euclidean and `ℓ_p` norms are.
    pub fn new(basis: DMatrix<f64>, norm: NormSpec) -> Result<Self> {
        if !basis.is_square() || basis.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!("basis is {}x{}", basis.nrows(), basis.ncols())));
        }
        let dim = basis.nrows();
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("basis has non-finite entries".into()));
        }
        let det = basis.determinant();
        if !(det.abs() > SINGULAR_DET) {
            return Err(Error::SingularBasis(det));
        }
        if dim > 2 && matches!(norm, NormSpec::Polytope { .. }) {
            return Err(Error::Unsupported("polytope norms are supported in the plane only".into()));
        }
        let lower = norm.euclidean_lower_bound(dim)?;
        Ok(Lattice { basis, norm, lower })
    }

    pub fn integer(dim: usize, norm: NormSpec) -> Result<Self> {
        Lattice::new(DMatrix::identity(dim, dim), norm)
    }

    /// Columns `(1, 0)` and `(1/2, √3/2)`.
    pub fn hexagonal(norm: NormSpec) -> Result<Self> {
        Lattice::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 3f64.sqrt() / 2.0]), norm)
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    pub fn det(&self) -> f64 {
        self.basis.determinant()
    }

    pub fn with_norm(&self, norm: NormSpec) -> Result<Self> {
        Lattice::new(self.basis.clone(), norm)
    }

    /// `basis · coords`.
    pub fn point(&self, coords: &[i64]) -> Vec<f64> {
        lattice_vector(&self.basis, coords)
    }

    pub fn norm_of(&self, coords: &[i64]) -> f64 {
        self.norm.eval_unchecked(&self.point(coords))
    }

    fn lattice_norm(&self) -> SpecNorm<'_> {
        SpecNorm { spec: &self.norm, lower: self.lower }
    }
}

fn lattice_vector(basis: &DMatrix<f64>, coords: &[i64]) -> Vec<f64> {
    (0..basis.nrows())
        .map(|i| coords.iter().enumerate().map(|(j, &z)| basis[(i, j)] * z as f64).sum())
        .collect()
}

/// Inverse-transpose basis under the dual norm.
pub fn dual_lattice(l: &Lattice) -> Result<Lattice> {
    let inv = l.basis.clone().try_inverse().ok_or(Error::SingularBasis(l.det()))?;
    Lattice::new(inv.transpose(), l.norm.dual()?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticePoint {
    pub coords: Vec<i64>,
    pub norm: f64,
}

/// All nonzero lattice points of norm at most `radius`, by norm then coordinates.
pub fn enumerate_points(l: &Lattice, radius: f64) -> Result<Vec<LatticePoint>> {
    enumerate_with(&l.basis, &l.lattice_norm(), radius)
}

/// Enumeration for any basis and norm.
///
/// Every point with `norm ≤ radius` has `|x|_2 ≤ radius / c`, so a
/// Fincke–Pohst walk over that Euclidean ball misses nothing. Candidates are
/// counted against [`ENUMERATION_CAP`].
pub fn enumerate_with(basis: &DMatrix<f64>, norm: &dyn LatticeNorm, radius: f64) -> Result<Vec<LatticePoint>> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius {radius} must be positive and finite")));
    }
    let c = norm.euclidean_lower_bound();
    if !(c > 0.0) {
        return Err(Error::InvalidArgument("norm has no positive Euclidean lower bound".into()));
    }
    let b = basis.ncols();
    let gram = basis.transpose() * basis;
    let chol = gram.cholesky().ok_or(Error::SingularBasis(basis.determinant()))?;
    // gram = Rᵀ R with R upper triangular.
    let r = chol.l().transpose();
    let euclid = radius / c * (1.0 + 1e-9);
    let budget = euclid * euclid;
    let slack = radius * 1e-12;

    let mut out = Vec::new();
    let mut z = vec![0i64; b];
    let mut visited = 0usize;
    let mut walk = Walk { r: &r, budget, z: &mut z, visited: &mut visited };
    walk.level(b, 0.0, &mut |z| {
        if z.iter().all(|&v| v == 0) {
            return;
        }
        let x = lattice_vector(basis, z);
        let n = norm.norm(&x);
        if n <= radius + slack {
            out.push(LatticePoint { coords: z.to_vec(), norm: n });
        }
    })?;
    out.sort_by(|a, b| a.norm.total_cmp(&b.norm).then_with(|| a.coords.cmp(&b.coords)));
    Ok(out)
}

struct Walk<'a> {
    r: &'a DMatrix<f64>,
    budget: f64,
    z: &'a mut [i64],
    visited: &'a mut usize,
}

impl Walk<'_> {
    /// Fixes coordinates `level-1, …, 0` given those above, with `used` the
    /// squared length already spent on higher levels.
    fn level(&mut self, level: usize, used: f64, emit: &mut dyn FnMut(&[i64])) -> Result<()> {
        if level == 0 {
            *self.visited += 1;
            if *self.visited > ENUMERATION_CAP {
                return Err(Error::ResourceLimit { limit: ENUMERATION_CAP, radius: self.budget.sqrt() });
            }
            emit(self.z);
            return Ok(());
        }
        let i = level - 1;
        let rii = self.r[(i, i)];
        let shift: f64 = (level..self.z.len()).map(|j| self.r[(i, j)] * self.z[j] as f64).sum::<f64>() / rii;
        let center = -shift;
        let room = (self.budget - used).max(0.0);
        let half = room.sqrt() / rii;
        let lo = (center - half).ceil() as i64;
        let hi = (center + half).floor() as i64;
        for v in lo..=hi {
            let d = rii * (v as f64 - center);
            let spent = used + d * d;
            if spent > self.budget * (1.0 + 1e-12) {
                continue;
            }
            self.z[i] = v;
            self.level(i, spent, emit)?;
        }
        self.z[i] = 0;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaResult {
    pub lambdas: Vec<f64>,
    pub achievers: Vec<Vec<i64>>,
}

pub fn successive_minima(l: &Lattice) -> Result<MinimaResult> {
    successive_minima_with(&l.basis, &l.lattice_norm())
}

const RADIUS_DOUBLINGS: usize = 8;

/// Greedy selection over enumerated points, doubling the radius until `b`
/// independent points fit. The first radius is `1.5 · |det|^{1/b}` times the
/// largest norm of a coordinate vector. Radii are clamped to the longest basis
/// vector, which bounds `λ_b`.
pub fn successive_minima_with(basis: &DMatrix<f64>, norm: &dyn LatticeNorm) -> Result<MinimaResult> {
    let b = basis.ncols();
    let unit = (0..b)
        .map(|i| {
            let mut e = vec![0.0; b];
            e[i] = 1.0;
            norm.norm(&e)
        })
        .fold(0.0, f64::max);
    let longest = (0..b)
        .map(|j| norm.norm(basis.column(j).as_slice()))
        .fold(0.0, f64::max)
        * (1.0 + 1e-9);
    let mut radius = (1.5 * basis.determinant().abs().powf(1.0 / b as f64) * unit).min(longest);
    for _ in 0..=RADIUS_DOUBLINGS {
        let points = enumerate_with(basis, norm, radius)?;
        let mut echelon = Echelon::new(b);
        let mut result = MinimaResult { lambdas: Vec::with_capacity(b), achievers: Vec::with_capacity(b) };
        for p in points {
            if echelon.insert(&p.coords) {
                result.lambdas.push(p.norm);
                result.achievers.push(p.coords);
                if result.lambdas.len() == b {
                    return Ok(result);
                }
            }
        }
        radius = (radius * 2.0).min(longest);
    }
    Err(Error::ResourceLimit { limit: ENUMERATION_CAP, radius })
}

/// Integer row echelon form for exact independence tests.
struct Echelon {
    rows: Vec<(usize, Vec<i128>)>,
    dim: usize,
}

impl Echelon {
    fn new(dim: usize) -> Self {
        Echelon { rows: Vec::new(), dim }
    }

    /// Adds `v` if it is independent of the rows so far.
    fn insert(&mut self, v: &[i64]) -> bool {
        let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for (pivot, row) in &self.rows {
            let a = v[*pivot];
            if a == 0 {
                continue;
            }
            let p = row[*pivot];
            for k in 0..self.dim {
                v[k] = v[k] * p - row[k] * a;
            }
            reduce(&mut v);
        }
        match v.iter().position(|&x| x != 0) {
            Some(pivot) => {
                self.rows.push((pivot, v));
                true
            }
            None => false,
        }
    }
}

fn reduce(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| gcd(g, x.abs()));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaDetails {
    pub lambda1: f64,
    pub achiever: Vec<i64>,
    /// `λ_b` of the dual lattice under the dual norm.
    pub dual_lambda_b: f64,
    pub dual_achiever: Vec<i64>,
    pub product: f64,
}

pub fn gamma_details(l: &Lattice) -> Result<GammaDetails> {
    let primal = successive_minima(l)?;
    let dual = successive_minima(&dual_lattice(l)?)?;
    let b = l.dim();
    Ok(GammaDetails {
        lambda1: primal.lambdas[0],
        achiever: primal.achievers[0].clone(),
        dual_lambda_b: dual.lambdas[b - 1],
        dual_achiever: dual.achievers[b - 1].clone(),
        product: primal.lambdas[0] * dual.lambdas[b - 1],
    })
}

/// `λ_1(L) · λ_b(L*)`.
pub fn gamma_product(l: &Lattice) -> Result<f64> {
    Ok(gamma_details(l)?.product)
}

/// `λ_1(L) · λ_1(L*)` for a Euclidean plane lattice.
pub fn mahler_product(l: &Lattice) -> Result<f64> {
    if l.dim() != 2 || !matches!(l.norm, NormSpec::Euclidean { .. }) {
        return Err(Error::InvalidArgument("the Mahler product needs a Euclidean plane lattice".into()));
    }
    let primal = successive_minima(l)?;
    let dual = successive_minima(&dual_lattice(l)?)?;
    Ok(primal.lambdas[0] * dual.lambdas[0])
}

/// Random plane lattice (determinant one) under the Euclidean norm.
pub fn random_euclidean_lattice<R: Rng + ?Sized>(rng: &mut R) -> Lattice {
    Lattice::new(random_basis_2d(rng), NormSpec::euclidean_identity(2)).expect("basis has determinant one")
}

/// Random plane norm: Euclidean with a random Gram, a polygon with 3 to 8
/// facet directions, or `ℓ_p` with `p ∈ {1, 1.5, 3, ∞}`.
pub fn random_plane_norm<R: Rng + ?Sized>(rng: &mut R) -> NormSpec {
    match rng.random_range(0..3) {
        0 => NormSpec::Euclidean { gram: random_spd(rng, 2) },
        1 => {
            let k = rng.random_range(3..=8);
            let facets = (0..k)
                .map(|_| {
                    let t: f64 = rng.random_range(0.0..PI);
                    let len: f64 = rng.random_range(0.5..2.0);
                    vec![len * t.cos(), len * t.sin()]
                })
                .collect();
            NormSpec::Polytope { facets }
        }
        _ => {
            let p = [1.0, 1.5, 3.0, f64::INFINITY][rng.random_range(0..4)];
            NormSpec::Lp { p }
        }
    }
}

/// Sample `index` of a search with master seed `seed`; index 0 is the
/// hexagonal lattice with the Euclidean norm.
pub fn speyer_sample(seed: u64, index: u64) -> Lattice {
    if index == 0 {
        return Lattice::hexagonal(NormSpec::euclidean_identity(2)).expect("hexagonal basis is valid");
    }
    let mut rng = stream(seed, index);
    loop {
        let basis = random_basis_2d(&mut rng);
        // Degenerate random polygons (all facets parallel) are redrawn.
        if let Ok(l) = Lattice::new(basis, random_plane_norm(&mut rng)) {
            return l;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeyerReport {
    pub samples: usize,
    pub best_value: f64,
    pub best_config: Lattice,
    pub best_index: usize,
    /// Values above `3/2 + 1e-6`.
    pub violations: usize,
}

/// Gamma products of `samples` configurations: the hexagonal one and
/// `samples - 1` random ones.
pub fn speyer_search(samples: usize, seed: u64) -> Result<SpeyerReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let configs: Vec<Lattice> = (0..samples as u64).map(|i| speyer_sample(seed, i)).collect();
    speyer_search_configs(&configs)
}

pub fn speyer_search_configs(configs: &[Lattice]) -> Result<SpeyerReport> {
    let values = configs.iter().map(gamma_product).collect::<Result<Vec<_>>>()?;
    summarize_speyer(configs, &values)
}

/// Aggregates precomputed gamma products; the first maximum wins ties.
pub fn summarize_speyer(configs: &[Lattice], values: &[f64]) -> Result<SpeyerReport> {
    if configs.is_empty() || configs.len() != values.len() {
        return Err(Error::InvalidArgument("need one value per configuration".into()));
    }
    let mut best_index = 0;
    for (i, v) in values.iter().enumerate() {
        if v.total_cmp(&values[best_index]) == Ordering::Greater {
            best_index = i;
        }
    }
    Ok(SpeyerReport {
        samples: configs.len(),
        best_value: values[best_index],
        best_config: configs[best_index].clone(),
        best_index,
        violations: values.iter().filter(|&&v| v > 1.5 + SPEYER_ABS).count(),
    })
}

/// CSV with columns `lattice-id,k,lambda_k`; `k` counts from 1.
pub fn minima_csv(rows: &[(String, MinimaResult)]) -> String {
    let mut out = String::from("lattice-id,k,lambda_k\n");
    for (id, m) in rows {
        for (k, l) in m.lambdas.iter().enumerate() {
            // 15 significant digits.
            let l: f64 = format!("{l:.14e}").parse().expect("formatted float parses");
            out.push_str(&format!("{id},{},{l}\n", k + 1));
        }
    }
    out
}

#[derive(Serialize)]
struct LatticeOut<'a> {
    dim: usize,
    #[serde(serialize_with = "serialize_matrix")]
    basis: &'a DMatrix<f64>,
    norm: &'a NormSpec,
}

#[derive(Deserialize)]
struct LatticeIn {
    dim: usize,
    basis: MatrixJson,
    norm: NormSpec,
}

impl Serialize for Lattice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LatticeOut { dim: self.dim(), basis: &self.basis, norm: &self.norm }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lattice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = LatticeIn::deserialize(d)?;
        let basis = raw.basis.into_square(Some(raw.dim)).map_err(D::Error::custom)?;
        Lattice::new(basis, raw.norm).map_err(D::Error::custom)
    }
}
