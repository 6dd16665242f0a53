//! Norms on `R^b`, their duals, and planar John ellipsoids.
//!
//! A [`NormSpec`] is one of three families: Euclidean with a Gram matrix, the
//! gauge of a centrally symmetric polytope given by facet functionals, or
//! `ℓ_p`. Dual norms stay inside the same family.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{gamma_details, Lattice};
use crate::tolerances::{JOHN_TOL, SANDWICH_ABS, SPEYER_ABS};

/// Hermite-type constant of the plane, `2/√3`.
pub fn gamma2_euclidean() -> f64 {
    2.0 / 3f64.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    /// `sqrt(xᵀ G x)`.
    Euclidean { gram: DMatrix<f64> },
    /// `max_j |⟨u_j, x⟩|`; the unit ball is `{x : |⟨u_j, x⟩| ≤ 1 ∀j}`.
    Polytope { facets: Vec<Vec<f64>> },
    /// `ℓ_p`, `p ∈ [1, ∞]`.
    Lp { p: f64 },
}

impl NormSpec {
    pub fn euclidean_identity(dim: usize) -> Self {
        NormSpec::Euclidean { gram: DMatrix::identity(dim, dim) }
    }

    pub fn linf() -> Self {
        NormSpec::Lp { p: f64::INFINITY }
    }

    /// Ambient dimension, when the variant fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            NormSpec::Euclidean { gram } => Some(gram.nrows()),
            NormSpec::Polytope { facets } => facets.first().map(Vec::len),
            NormSpec::Lp { .. } => None,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if let Some(d) = self.dim() {
            if d != dim {
                return Err(Error::DimensionMismatch(format!("norm on R^{d} used in R^{dim}")));
            }
        }
        match self {
            NormSpec::Euclidean { gram } => {
                if !gram.is_square() {
                    return Err(Error::DimensionMismatch("Gram matrix is not square".into()));
                }
                check_spd(gram)
            }
            NormSpec::Polytope { facets } => {
                if facets.is_empty() || facets.iter().any(|u| u.len() != dim) {
                    return Err(Error::DimensionMismatch("facets must all lie in R^b".into()));
                }
                if facets.iter().any(|u| u.iter().all(|&c| c == 0.0)) {
                    return Err(Error::InvalidArgument("zero facet functional".into()));
                }
                let u = DMatrix::from_fn(facets.len(), dim, |i, j| facets[i][j]);
                if u.rank(1e-10 * u.amax()) < dim {
                    return Err(Error::InvalidArgument("facets do not span, unit ball is unbounded".into()));
                }
                Ok(())
            }
            NormSpec::Lp { p } => {
                if !(*p >= 1.0) {
                    return Err(Error::InvalidArgument(format!("p = {p} is not in [1, ∞]")));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if let Some(d) = self.dim() {
            if d != x.len() {
                return Err(Error::DimensionMismatch(format!("vector in R^{} for a norm on R^{d}", x.len())));
            }
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            NormSpec::Euclidean { gram } => {
                let b = x.len();
                let mut s = 0.0;
                for i in 0..b {
                    for j in 0..b {
                        s += x[i] * gram[(i, j)] * x[j];
                    }
                }
                s.max(0.0).sqrt()
            }
            NormSpec::Polytope { facets } => facets
                .iter()
                .map(|u| u.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().abs())
                .fold(0.0, f64::max),
            NormSpec::Lp { p } => lp_norm(x, *p),
        }
    }

    /// The dual norm `f ↦ max{⟨f, x⟩ : |x| ≤ 1}`.
    pub fn dual(&self) -> Result<NormSpec> {
        match self {
            NormSpec::Euclidean { gram } => {
                let inv = gram
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::NotPositiveDefinite("singular Gram matrix".into()))?;
                Ok(NormSpec::Euclidean { gram: symmetrize(&inv) })
            }
            NormSpec::Lp { p } => Ok(NormSpec::Lp { p: conjugate_exponent(*p) }),
            NormSpec::Polytope { facets } => {
                if facets.first().map(Vec::len) != Some(2) {
                    return Err(Error::Unsupported("dual of a polytope norm is only available in the plane".into()));
                }
                // The dual ball is conv{±u_j}; its facets are the primal vertices.
                let vertices = polygon_vertices(facets)?;
                let facets = vertices
                    .into_iter()
                    .filter(upper_half)
                    .map(|v| v.to_vec())
                    .collect();
                Ok(NormSpec::Polytope { facets })
            }
        }
    }

    /// A constant `c > 0` with `|x| ≥ c |x|_2` for all `x ∈ R^dim`.
    pub fn euclidean_lower_bound(&self, dim: usize) -> Result<f64> {
        self.validate(dim)?;
        Ok(match self {
            NormSpec::Euclidean { gram } => {
                SymmetricEigen::new(gram.clone()).eigenvalues.min().max(0.0).sqrt()
            }
            NormSpec::Lp { p } if *p <= 2.0 => 1.0,
            NormSpec::Lp { p } => (dim as f64).powf(1.0 / p - 0.5),
            NormSpec::Polytope { facets } if dim == 2 => {
                let r = polygon_vertices(facets)?
                    .iter()
                    .map(|v| v[0].hypot(v[1]))
                    .fold(0.0, f64::max);
                1.0 / r
            }
            NormSpec::Polytope { facets } => {
                // max_j |u_j·x| ≥ |Ux|_2 / √J ≥ σ_min(U) |x|_2 / √J.
                let u = DMatrix::from_fn(facets.len(), dim, |i, j| facets[i][j]);
                let smin = u.singular_values().min();
                smin / (facets.len() as f64).sqrt()
            }
        })
    }

    /// Facet form of `ℓ_1` / `ℓ_∞` in the plane.
    fn as_planar_polytope(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            NormSpec::Polytope { facets } => Some(facets.clone()),
            NormSpec::Lp { p } if p.is_infinite() => Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            NormSpec::Lp { p } if *p == 1.0 => Some(vec![vec![1.0, 1.0], vec![1.0, -1.0]]),
            _ => None,
        }
    }
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        let scale = x.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        scale * x.iter().map(|v| (v.abs() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn check_spd(gram: &DMatrix<f64>) -> Result<()> {
    if !gram.is_square() {
        return Err(Error::NotPositiveDefinite("matrix is not square".into()));
    }
    let asym = (gram - gram.transpose()).amax();
    if asym > 1e-12 * (1.0 + gram.amax()) {
        return Err(Error::NotPositiveDefinite(format!("asymmetry {asym:e}")));
    }
    let min = SymmetricEigen::new(symmetrize(gram)).eigenvalues.min();
    if !(min > 1e-10) {
        return Err(Error::NotPositiveDefinite(format!("smallest eigenvalue {min:e}")));
    }
    Ok(())
}

fn upper_half(v: &[f64; 2]) -> bool {
    let a = v[1].atan2(v[0]);
    (0.0..PI).contains(&a)
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull of a planar point set, counter-clockwise, collinear points dropped.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let scale = pts.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let eps = 1e-14 * scale * scale;
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= eps {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Vertices of the planar unit ball `{x : |⟨u_j, x⟩| ≤ 1}`, counter-clockwise.
///
/// The ball is the polar of `conv{±u_j}`: each hull edge `(p, q)` gives the
/// vertex solving `⟨p, x⟩ = ⟨q, x⟩ = 1`.
pub fn polygon_vertices(facets: &[Vec<f64>]) -> Result<Vec<[f64; 2]>> {
    if facets.iter().any(|u| u.len() != 2) {
        return Err(Error::DimensionMismatch("planar facets expected".into()));
    }
    let pts: Vec<[f64; 2]> = facets.iter().flat_map(|u| [[u[0], u[1]], [-u[0], -u[1]]]).collect();
    let hull = convex_hull(pts);
    if hull.len() < 4 {
        return Err(Error::InvalidArgument("facets do not span the plane".into()));
    }
    let k = hull.len();
    let mut verts: Vec<[f64; 2]> = (0..k)
        .map(|i| {
            let p = hull[i];
            let q = hull[(i + 1) % k];
            let det = p[0] * q[1] - p[1] * q[0];
            [(q[1] - p[1]) / det, (p[0] - q[0]) / det]
        })
        .collect();
    verts.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    Ok(verts)
}

/// Maximum-volume ellipsoid inscribed in a planar unit ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JohnResult {
    /// Gram of the norm `|x|_E = sqrt(xᵀ gram_e x)` whose unit ball is the ellipsoid.
    #[serde(serialize_with = "serialize_matrix")]
    pub gram_e: DMatrix<f64>,
    /// True once the sandwich check passed on every sampled direction.
    pub ratio_checked: bool,
    pub iterations: usize,
    /// Log-determinant of the design matrix after each accepted step.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

impl JohnResult {
    /// Gram of `|·| = |·|_E / √b`, so that `|x| ≤ ‖x‖ ≤ √b |x|`.
    pub fn sandwich_gram(&self) -> DMatrix<f64> {
        &self.gram_e / self.gram_e.nrows() as f64
    }
}

/// Inscribed ellipsoid of maximal area for a planar norm.
///
/// Polytopes (and `ℓ_1`, `ℓ_∞`) are solved through the dual problem: the
/// polar of the inscribed ellipsoid is the minimum-area centred ellipse through
/// the points `±u_j`, found by coordinate ascent on `log det Σ w_j u_j u_jᵀ`
/// over the simplex (Fedorov–Wynn steps with away steps). At the optimum
/// `max_j u_jᵀ M⁻¹ u_j = b`. The returned ellipsoid `xᵀ (s M) x ≤ 1` with
/// `s = max_j u_jᵀ M⁻¹ u_j` is feasible at every iterate.
///
/// `ℓ_p` with `1 < p < ∞` is invariant under the symmetries of the square,
/// which forces a disc; its radius is the inradius of the ball.
pub fn john_ellipsoid(norm: &NormSpec, b: usize) -> Result<JohnResult> {
    if b != 2 {
        return Err(Error::Unsupported(format!("John ellipsoids are computed in the plane only, not R^{b}")));
    }
    norm.validate(b)?;
    let mut result = if let NormSpec::Euclidean { gram } = norm {
        JohnResult { gram_e: gram.clone(), ratio_checked: false, iterations: 0, objective_trace: vec![] }
    } else if let Some(facets) = norm.as_planar_polytope() {
        john_polytope(&facets)?
    } else {
        let NormSpec::Lp { p } = norm else { unreachable!() };
        // Inradius r: 1 for p ≥ 2, 2^{1/2 - 1/p} below (touching on the diagonals).
        let inv_r2 = if *p >= 2.0 { 1.0 } else { 2f64.powf(2.0 / p - 1.0) };
        JohnResult {
            gram_e: DMatrix::identity(2, 2) * inv_r2,
            ratio_checked: false,
            iterations: 0,
            objective_trace: vec![],
        }
    };
    result.ratio_checked = sandwich_check(norm, &result)?.pass;
    Ok(result)
}

const JOHN_MAX_ITER: usize = 100_000;

fn john_polytope(facets: &[Vec<f64>]) -> Result<JohnResult> {
    let b = 2usize;
    let us: Vec<DVector<f64>> = facets.iter().map(|u| DVector::from_column_slice(u)).collect();
    let n = us.len();
    let mut w = vec![1.0 / n as f64; n];
    let design = |w: &[f64]| {
        let mut m = DMatrix::zeros(b, b);
        for (u, &wj) in us.iter().zip(w) {
            m += u * u.transpose() * wj;
        }
        m
    };
    let bf = b as f64;
    let mut trace = Vec::new();
    for iter in 0..JOHN_MAX_ITER {
        let m = design(&w);
        let minv = m
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("facets do not span the plane".into()))?;
        trace.push(m.determinant().ln());
        let g: Vec<f64> = us.iter().map(|u| (u.transpose() * &minv * u)[(0, 0)]).collect();
        let (jp, gp) = g.iter().copied().enumerate().fold((0, f64::MIN), |a, (j, v)| if v > a.1 { (j, v) } else { a });
        let (jm, gm) = g
            .iter()
            .copied()
            .enumerate()
            .filter(|&(j, _)| w[j] > 0.0)
            .fold((0, f64::MAX), |a, (j, v)| if v < a.1 { (j, v) } else { a });
        let eps_plus = gp / bf - 1.0;
        let eps_minus = 1.0 - gm / bf;
        if eps_plus.max(eps_minus) <= JOHN_TOL {
            let s = gp;
            let gram_e = symmetrize(&(m * s));
            return Ok(JohnResult { gram_e, ratio_checked: false, iterations: iter, objective_trace: trace });
        }
        // Exact line search for log det((1-α)M + α u uᵀ) along e_j.
        let (j, alpha) = if eps_plus >= eps_minus {
            (jp, (gp - bf) / (bf * (gp - 1.0)))
        } else {
            let floor = -w[jm] / (1.0 - w[jm]);
            let alpha = if gm > 1.0 { ((gm - bf) / (bf * (gm - 1.0))).max(floor) } else { floor };
            (jm, alpha)
        };
        for wi in w.iter_mut() {
            *wi *= 1.0 - alpha;
        }
        w[j] += alpha;
        if w[j] < 1e-300 {
            w[j] = 0.0;
        }
    }
    Err(Error::NoConvergence(JOHN_MAX_ITER))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionMargin {
    pub angle: f64,
    /// `‖x‖` at the Euclidean unit vector `x`.
    pub norm: f64,
    /// `|x|` for the scaled ellipsoid norm.
    pub inner: f64,
    /// `‖x‖ - |x|`, nonnegative when the lower inequality holds.
    pub lower_margin: f64,
    /// `√b |x| - ‖x‖`, nonnegative when the upper inequality holds.
    pub upper_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub directions: Vec<DirectionMargin>,
    pub min_lower_margin: f64,
    pub min_upper_margin: f64,
    pub pass: bool,
}

/// Sample directions: 360 equally spaced angles, plus facet normals and ball
/// vertices for polytopes.
pub fn sample_directions(norm: &NormSpec) -> Vec<f64> {
    let mut angles: Vec<f64> = (0..360).map(|i| i as f64 * PI / 180.0).collect();
    if let Some(facets) = norm.as_planar_polytope() {
        for u in &facets {
            angles.push(u[1].atan2(u[0]));
            angles.push((-u[1]).atan2(-u[0]));
        }
        if let Ok(vs) = polygon_vertices(&facets) {
            angles.extend(vs.iter().map(|v| v[1].atan2(v[0])));
        }
    }
    angles
}

/// Verifies `|x| ≤ ‖x‖ ≤ √2 |x|` for `|·| = |·|_E / √2` on sampled directions.
pub fn sandwich_check(norm: &NormSpec, john: &JohnResult) -> Result<SandwichReport> {
    let inner_norm = NormSpec::Euclidean { gram: john.sandwich_gram() };
    let mut directions = Vec::new();
    for angle in sample_directions(norm) {
        let x = [angle.cos(), angle.sin()];
        let nx = norm.eval(&x)?;
        let ix = inner_norm.eval(&x)?;
        directions.push(DirectionMargin {
            angle,
            norm: nx,
            inner: ix,
            lower_margin: nx - ix,
            upper_margin: SQRT_2 * ix - nx,
        });
    }
    let min_lower_margin = directions.iter().map(|d| d.lower_margin).fold(f64::INFINITY, f64::min);
    let min_upper_margin = directions.iter().map(|d| d.upper_margin).fold(f64::INFINITY, f64::min);
    let pass = min_lower_margin >= -SANDWICH_ABS && min_upper_margin >= -SANDWICH_ABS;
    Ok(SandwichReport { directions, min_lower_margin, min_upper_margin, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichBoundCheck {
    /// `λ_1(L) λ_2(L*)` under the lattice's own norm.
    pub gamma_general: f64,
    /// The same product under the John sandwich norm `|·|`.
    pub gamma_euclidean: f64,
    /// `√2 · 2/√3`.
    pub gamma_euclidean_bound: f64,
    /// `λ_1(L, ‖·‖) ≤ √2 λ_1(L, |·|)`.
    pub lambda1_step: bool,
    /// `λ_2(L*, ‖·‖*) ≤ λ_2(L*, |·|*)`.
    pub dual_step: bool,
    pub pass: bool,
}

/// The plane case of `Γ_b ≤ √b Γ_b^e`, checked on one lattice.
///
/// From `|·| ≤ ‖·‖ ≤ √2 |·|`: `λ_1(L, ‖·‖) ≤ √2 λ_1(L, |·|)`, and dualizing
/// `|·| ≤ ‖·‖` gives `‖·‖* ≤ |·|*`, hence `λ_2(L*, ‖·‖*) ≤ λ_2(L*, |·|*)`.
/// Their product is at most `√2 · 2/√3`; the sharper `3/2` is checked too.
pub fn sandwich_bound_check(lattice: &Lattice) -> Result<SandwichBoundCheck> {
    if lattice.dim() != 2 {
        return Err(Error::Unsupported("sandwich check is planar".into()));
    }
    let john = john_ellipsoid(lattice.norm(), 2)?;
    let general = gamma_details(lattice)?;
    let euclid_lattice = lattice.with_norm(NormSpec::Euclidean { gram: john.sandwich_gram() })?;
    let euclid = gamma_details(&euclid_lattice)?;
    let rel = 1.0 + 1e-9;
    let lambda1_step = general.lambda1 <= SQRT_2 * euclid.lambda1 * rel;
    let dual_step = general.dual_lambda_b <= euclid.dual_lambda_b * rel;
    let gamma_euclidean_bound = SQRT_2 * gamma2_euclidean();
    let gamma_general = general.product;
    let pass = lambda1_step
        && dual_step
        && gamma_general <= gamma_euclidean_bound + SPEYER_ABS
        && gamma_general <= 1.5 + SPEYER_ABS;
    Ok(SandwichBoundCheck {
        gamma_general,
        gamma_euclidean: euclid.product,
        gamma_euclidean_bound,
        lambda1_step,
        dual_step,
        pass,
    })
}

pub(crate) fn serialize_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    rows.serialize(s)
}

/// Square matrix from nested rows or a flat row-major array.
#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum MatrixJson {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl MatrixJson {
    pub(crate) fn into_square(self, dim: Option<usize>) -> std::result::Result<DMatrix<f64>, String> {
        match self {
            MatrixJson::Rows(rows) => {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) || dim.is_some_and(|d| d != n) {
                    return Err("matrix rows do not form a square of the stated size".into());
                }
                Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
            }
            MatrixJson::Flat(v) => {
                let n = (v.len() as f64).sqrt().round() as usize;
                if n * n != v.len() || dim.is_some_and(|d| d != n) {
                    return Err(format!("{} entries do not form a square matrix", v.len()));
                }
                Ok(DMatrix::from_row_slice(n, n, &v))
            }
        }
    }
}

pub(crate) fn deserialize_matrix<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DMatrix<f64>, D::Error> {
    MatrixJson::deserialize(d)?.into_square(None).map_err(D::Error::custom)
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
enum NormSpecJson {
    Euclidean {
        #[serde(serialize_with = "serialize_matrix", deserialize_with = "deserialize_matrix")]
        gram: DMatrix<f64>,
    },
    Polytope {
        facets: Vec<Vec<f64>>,
    },
    Lp {
        p: Exponent,
    },
}

/// `p` as a JSON number, or the string `"inf"` for `∞`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Exponent {
    Finite(f64),
    Named(String),
}

impl Serialize for NormSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let json = match self.clone() {
            NormSpec::Euclidean { gram } => NormSpecJson::Euclidean { gram },
            NormSpec::Polytope { facets } => NormSpecJson::Polytope { facets },
            NormSpec::Lp { p } if p.is_infinite() => NormSpecJson::Lp { p: Exponent::Named("inf".into()) },
            NormSpec::Lp { p } => NormSpecJson::Lp { p: Exponent::Finite(p) },
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = match NormSpecJson::deserialize(d)? {
            NormSpecJson::Euclidean { gram } => NormSpec::Euclidean { gram },
            NormSpecJson::Polytope { facets } => NormSpec::Polytope { facets },
            NormSpecJson::Lp { p: Exponent::Finite(p) } => NormSpec::Lp { p },
            NormSpecJson::Lp { p: Exponent::Named(name) } => match name.to_ascii_lowercase().as_str() {
                "inf" | "infinity" => NormSpec::Lp { p: f64::INFINITY },
                other => return Err(D::Error::custom(format!("unknown exponent {other:?}"))),
            },
        };
        let dim = spec.dim().unwrap_or(2);
        spec.validate(dim).map_err(D::Error::custom)?;
        Ok(spec)
    }
}
