//! Canonical form `a₁ e₁∧e₂ + a₂ e₃∧e₄ + …` of a 2-form under an orthogonal
//! change of basis.
//!
//! With `A` the antisymmetric coefficient matrix, `AᵀA = -A²` has eigenvalues
//! `a_i²`, each of even multiplicity, so the blocks are the singular values of
//! `A` taken in pairs. Singular values are used instead of the eigenvalues of
//! `AᵀA` because they keep absolute accuracy `ε|A|` for small blocks.
//! Blocks are peeled off one at a time: take a unit `x` in the top right
//! singular subspace of `A` restricted to the orthogonal complement of the
//! planes found so far, and pair it with `y = Aᵀx / |Aᵀx|`. Then `a(x, y) = |Aᵀx|` and the
//! plane `span{x, y}` is `A`-invariant, so its complement is too. Inside a
//! repeated eigenspace, `x` is the projection of the first coordinate vector
//! with the largest component there, which makes the basis reproducible and
//! gives `q = I` for forms that are already in block form.

use nalgebra::{DMatrix, DVector};

use super::KForm;
use crate::error::{Error, Result};

/// Orthogonal `q` and descending blocks with `q*a = Σ blocks[i] e_{2i}∧e_{2i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm2 {
    pub q: DMatrix<f64>,
    pub blocks: Vec<f64>,
}

impl CanonicalForm2 {
    /// `Σ blocks[i] e_{2i} ∧ e_{2i+1}` on the ambient space.
    pub fn block_form(&self) -> KForm {
        let m = self.q.nrows();
        let pairs: Vec<[usize; 2]> = (0..self.blocks.len()).map(|i| [2 * i, 2 * i + 1]).collect();
        let terms: Vec<(&[usize], f64)> =
            pairs.iter().zip(&self.blocks).map(|(p, &b)| (&p[..], b)).collect();
        KForm::from_terms(m, 2, &terms).expect("block form fits the ambient space")
    }
}

fn require_two_form(a: &KForm) -> Result<()> {
    if a.degree() != 2 {
        return Err(Error::InvalidArgument(format!("expected a 2-form, got degree {}", a.degree())));
    }
    Ok(())
}

/// Block values only, from the singular values of `A` (no basis).
///
/// Singular values come in equal pairs; each block is the mean of a pair.
pub fn two_form_blocks(a: &KForm) -> Result<Vec<f64>> {
    require_two_form(a)?;
    let m = a.dim();
    if m == 2 {
        return Ok(vec![a.coeffs()[0].abs()]);
    }
    let mat = a.to_antisymmetric()?;
    let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok((0..m / 2).map(|i| 0.5 * (sv[2 * i] + sv[2 * i + 1])).collect())
}

pub fn canonical_form_2(a: &KForm) -> Result<CanonicalForm2> {
    require_two_form(a)?;
    let m = a.dim();
    let mat = a.to_antisymmetric()?;
    let scale = mat.amax();
    // Blocks below this count as zero.
    let zero = 1e-12 * scale;
    let cluster_rel = 1e-10;

    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(m);
    while chosen.len() + 1 < m && scale > 0.0 {
        let proj = complement_projector(m, &chosen);
        let svd = (&proj * &mat * &proj).svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let top = svd.singular_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top <= zero {
            break;
        }
        // Orthonormal basis of the top right singular subspace.
        let cluster: Vec<DVector<f64>> = (0..m)
            .filter(|&i| svd.singular_values[i] >= top * (1.0 - cluster_rel))
            .map(|i| v_t.row(i).transpose())
            .collect();
        let mut x = preferred_unit_vector(m, &cluster);
        gram_schmidt_into(&mut x, &chosen);
        let x = x.normalize();
        let mut y = mat.transpose() * &x;
        gram_schmidt_into(&mut y, &chosen);
        y -= &x * x.dot(&y);
        let ny = y.norm();
        if ny <= zero {
            break;
        }
        chosen.push(x);
        chosen.push(y / ny);
    }
    complete_basis(m, &mut chosen);

    let q = DMatrix::from_columns(&chosen);
    let pulled = q.transpose() * &mat * &q;
    let mut blocks: Vec<f64> = (0..m / 2).map(|i| pulled[(2 * i, 2 * i + 1)]).collect();
    if m == 2 {
        // Single coefficient: report it exactly.
        blocks[0] = a.coeffs()[0].abs();
    }
    for b in blocks.iter_mut() {
        if *b < 0.0 {
            *b = 0.0;
        }
    }
    Ok(CanonicalForm2 { q, blocks })
}

fn complement_projector(m: usize, chosen: &[DVector<f64>]) -> DMatrix<f64> {
    let mut p = DMatrix::identity(m, m);
    for v in chosen {
        p -= v * v.transpose();
    }
    p
}

fn gram_schmidt_into(v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    // Two passes keep the result orthogonal to working precision.
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(v);
            *v -= b * c;
        }
    }
}

/// Unit vector in `span(cluster)`: the projection of the first coordinate
/// vector whose projection is longest.
fn preferred_unit_vector(m: usize, cluster: &[DVector<f64>]) -> DVector<f64> {
    let mut best = 0usize;
    let mut best_len = -1.0;
    for i in 0..m {
        let len: f64 = cluster.iter().map(|c| c[i] * c[i]).sum();
        if len > best_len * (1.0 + 1e-12) + 1e-15 {
            best = i;
            best_len = len;
        }
    }
    let mut x = DVector::zeros(m);
    for c in cluster {
        x += c * c[best];
    }
    x.normalize()
}

/// Extend an orthonormal set to a basis with projected coordinate vectors,
/// always taking the first one with the longest residual.
fn complete_basis(m: usize, chosen: &mut Vec<DVector<f64>>) {
    while chosen.len() < m {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for i in 0..m {
            let mut v = DVector::zeros(m);
            v[i] = 1.0;
            gram_schmidt_into(&mut v, chosen);
            let n = v.norm();
            if best.as_ref().is_none_or(|(bn, _)| n > *bn * (1.0 + 1e-12)) {
                best = Some((n, v));
            }
        }
        let (n, v) = best.expect("m > 0");
        chosen.push(v / n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_form, random_orthogonal, stream};
    use crate::tolerances::{CANONICAL_ABS, ORTHOGONALITY_ABS};

    fn orthogonality_error(q: &DMatrix<f64>) -> f64 {
        let n = q.nrows();
        (q.transpose() * q - DMatrix::identity(n, n)).amax()
    }

    fn reconstruction_error(a: &KForm, c: &CanonicalForm2) -> f64 {
        let pulled = a.pullback(&c.q).unwrap();
        (&pulled - &c.block_form()).coeffs().iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    #[test]
    fn already_canonical_in_the_plane() {
        let a = KForm::new(2, 2, vec![3.0]).unwrap();
        let c = canonical_form_2(&a).unwrap();
        assert_eq!(c.blocks, vec![3.0]);
        assert_eq!(c.q, DMatrix::identity(2, 2));
    }

    #[test]
    fn single_off_pattern_term_gives_a_signed_permutation() {
        let a = KForm::basis(4, &[0, 2]).unwrap();
        let c = canonical_form_2(&a).unwrap();
        assert!((c.blocks[0] - 1.0).abs() < 1e-15);
        assert_eq!(c.blocks[1], 0.0);
        for v in c.q.iter() {
            assert!(v.abs() < 1e-15 || (v.abs() - 1.0).abs() < 1e-15, "entry {v}");
        }
        assert!(reconstruction_error(&a, &c) < CANONICAL_ABS);
    }

    #[test]
    fn recovers_planted_blocks() {
        // A = Q0 · diag([[0,5],[-5,0]], [[0,2],[-2,0]]) · Q0ᵀ.
        let q0 = random_orthogonal(&mut stream(11, 0), 4);
        let planted = KForm::from_terms(4, 2, &[(&[0, 1], 5.0), (&[2, 3], 2.0)]).unwrap();
        let mat = &q0 * planted.to_antisymmetric().unwrap() * q0.transpose();
        let a = KForm::from_antisymmetric(&mat).unwrap();
        let c = canonical_form_2(&a).unwrap();
        assert!((c.blocks[0] - 5.0).abs() < 1e-12);
        assert!((c.blocks[1] - 2.0).abs() < 1e-12);
        assert!(orthogonality_error(&c.q) < ORTHOGONALITY_ABS);
        assert!(reconstruction_error(&a, &c) < CANONICAL_ABS);
    }

    #[test]
    fn repeated_blocks_are_separated() {
        let q0 = random_orthogonal(&mut stream(12, 0), 6);
        let planted = KForm::from_terms(6, 2, &[(&[0, 1], 1.5), (&[2, 3], 1.5), (&[4, 5], 1.5)]).unwrap();
        let mat = &q0 * planted.to_antisymmetric().unwrap() * q0.transpose();
        let a = KForm::from_antisymmetric(&mat).unwrap();
        let c = canonical_form_2(&a).unwrap();
        for b in &c.blocks {
            assert!((b - 1.5).abs() < 1e-12);
        }
        assert!(orthogonality_error(&c.q) < ORTHOGONALITY_ABS);
        assert!(reconstruction_error(&a, &c) < CANONICAL_ABS);
    }

    #[test]
    fn zero_form() {
        let c = canonical_form_2(&KForm::zero(5, 2).unwrap()).unwrap();
        assert_eq!(c.blocks, vec![0.0, 0.0]);
        assert_eq!(c.q, DMatrix::identity(5, 5));
    }

    #[test]
    fn rank_deficient_and_odd_dimensions() {
        for (m, seed) in [(3usize, 1u64), (5, 2), (7, 3), (8, 4)] {
            let u = random_form(&mut stream(seed, 0), m, 1);
            let v = random_form(&mut stream(seed, 1), m, 1);
            let a = crate::exterior::wedge(&u, &v).unwrap();
            let c = canonical_form_2(&a).unwrap();
            assert!(orthogonality_error(&c.q) < ORTHOGONALITY_ABS);
            assert!(reconstruction_error(&a, &c) < CANONICAL_ABS);
            assert!(c.blocks[1..].iter().all(|&b| b < 1e-12));
        }
    }

    #[test]
    fn random_forms_reconstruct() {
        for i in 0..200 {
            let m = 2 + (i % 9) as usize;
            let a = random_form(&mut stream(99, i), m, 2);
            let c = canonical_form_2(&a).unwrap();
            assert!(orthogonality_error(&c.q) < ORTHOGONALITY_ABS, "m={m}");
            assert!(reconstruction_error(&a, &c) < CANONICAL_ABS, "m={m}");
            assert!(c.blocks.windows(2).all(|w| w[0] >= w[1]));
            let fast = two_form_blocks(&a).unwrap();
            for (x, y) in fast.iter().zip(&c.blocks) {
                assert!((x - y).abs() < 1e-10 * (1.0 + x));
            }
        }
    }

    #[test]
    fn blocks_match_pfaffian_oracle_on_r4() {
        // On R^4: a1² + a2² = |coeffs|², a1·a2 = |Pf(A)|.
        for i in 0..100 {
            let a = random_form(&mut stream(5, i), 4, 2);
            let c = a.coeffs();
            let s: f64 = c.iter().map(|x| x * x).sum();
            let pf = (c[0] * c[5] - c[1] * c[4] + c[2] * c[3]).abs();
            let hi = 0.5 * ((s + 2.0 * pf).sqrt() + (s - 2.0 * pf).max(0.0).sqrt());
            let lo = 0.5 * ((s + 2.0 * pf).sqrt() - (s - 2.0 * pf).max(0.0).sqrt());
            let got = canonical_form_2(&a).unwrap().blocks;
            assert!((got[0] - hi).abs() < 1e-10);
            assert!((got[1] - lo).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_other_degrees() {
        assert!(canonical_form_2(&KForm::zero(4, 3).unwrap()).is_err());
    }
}
