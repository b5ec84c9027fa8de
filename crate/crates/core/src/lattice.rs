//! Full-rank lattices in R^d with cached Gram-Schmidt data.
//!
//! Basis vectors are the *rows* of the basis matrix everywhere in this crate,
//! including the JSON file format.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::intlin;

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Relative tolerance for algebraic identities (determinants, duality).
pub const ALGEBRAIC_TOL: f64 = 1e-9;
/// Absolute tolerance for integrality checks.
pub const INTEGRALITY_TOL: f64 = 1e-7;
/// Bases with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e8;

pub fn all_finite<'a>(it: impl IntoIterator<Item = &'a f64>) -> bool {
    it.into_iter().all(|x| x.is_finite())
}

/// Builds a matrix whose rows are the given vectors.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let m = rows[0].len();
    for r in rows {
        check_dim(m, r.len())?;
    }
    Ok(Matrix::from_fn(n, m, |i, j| rows[i][j]))
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Modified Gram-Schmidt on the rows of `basis`.
///
/// Returns the orthogonalized rows and their lengths. Row `i` of `basis` equals
/// row `i` of the result plus a combination of the earlier orthogonalized rows.
pub fn gram_schmidt(basis: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    let (gs, norms, _) = gram_schmidt_with_mu(basis)?;
    Ok((gs, norms))
}

fn gram_schmidt_with_mu(basis: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let d = basis.nrows();
    if d == 0 || basis.ncols() != d {
        return Err(Error::InvalidInput(format!(
            "basis must be square, got {}x{}",
            basis.nrows(),
            basis.ncols()
        )));
    }
    if !all_finite(basis.iter()) {
        return Err(Error::InvalidInput("non-finite basis entry".into()));
    }
    let mut gs = basis.clone();
    let mut mu = Matrix::identity(d, d);
    let mut sq = vec![0.0; d];
    for i in 0..d {
        let original_norm = basis.row(i).norm();
        for j in 0..i {
            let m = gs.row(i).dot(&gs.row(j)) / sq[j];
            mu[(i, j)] = m;
            let rj = gs.row(j).clone_owned();
            let mut ri = gs.row_mut(i);
            ri -= rj * m;
        }
        sq[i] = gs.row(i).norm_squared();
        if original_norm == 0.0 || sq[i].sqrt() <= 1e-12 * original_norm {
            return Err(Error::SingularBasis);
        }
    }
    let norms = sq.iter().map(|s| s.sqrt()).collect();
    Ok((gs, norms, mu))
}

#[derive(Debug, Clone)]
pub struct Lattice {
    basis: Matrix,
    gs: Matrix,
    gs_norms: Vec<f64>,
    mu: Matrix,
    det_abs: f64,
}

impl Lattice {
    pub fn new(basis: Matrix) -> Result<Self> {
        let (gs, gs_norms, mu) = gram_schmidt_with_mu(&basis)?;
        let svd = basis.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin <= 0.0 {
            return Err(Error::SingularBasis);
        }
        let cond = smax / smin;
        if cond > MAX_CONDITION {
            return Err(Error::IllConditioned(cond));
        }
        let det_abs = gs_norms.iter().product();
        Ok(Lattice { basis, gs, gs_norms, mu, det_abs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Lattice::new(matrix_from_rows(rows)?)
    }

    /// The integer lattice Z^d.
    pub fn integer(d: usize) -> Self {
        Lattice::new(Matrix::identity(d, d)).expect("identity basis is valid")
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn gram_schmidt_basis(&self) -> &Matrix {
        &self.gs
    }

    pub fn gram_schmidt_norms(&self) -> &[f64] {
        &self.gs_norms
    }

    /// Gram-Schmidt coefficients: `mu[(i, j)] = <b_i, b~_j> / |b~_j|^2` for `j < i`.
    pub fn mu(&self) -> &Matrix {
        &self.mu
    }

    pub fn det_abs(&self) -> f64 {
        self.det_abs
    }

    pub fn dual(&self) -> Lattice {
        dual(self)
    }

    /// Dual basis rows `b*_j` with `<b_i, b*_j> = delta_ij`.
    pub fn dual_basis(&self) -> Matrix {
        self.basis
            .clone()
            .try_inverse()
            .expect("validated basis is invertible")
            .transpose()
    }

    /// The lattice point `sum_i coeffs[i] * b_i`.
    pub fn point(&self, coeffs: &[i64]) -> Vector {
        let mut x = Vector::zeros(self.dim());
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                x += self.basis.row(i).transpose() * (c as f64);
            }
        }
        x
    }

    /// Real coefficients of `x` with respect to the basis.
    pub fn coordinates(&self, x: &Vector) -> Vector {
        self.dual_basis() * x
    }

    /// True when all basis entries are exact integers.
    pub fn is_integral(&self) -> bool {
        self.basis.iter().all(|x| x.fract() == 0.0 && x.abs() < 2f64.powi(52))
    }

    /// Image of the lattice under `x -> T x`.
    pub fn transformed(&self, t: &Matrix) -> Result<Lattice> {
        check_dim(self.dim(), t.nrows())?;
        Lattice::new(&self.basis * t.transpose())
    }
}

/// Dual lattice; its basis is the inverse transpose of the primal basis.
pub fn dual(lat: &Lattice) -> Lattice {
    Lattice::new(lat.dual_basis()).expect("dual of a well-conditioned basis is well-conditioned")
}

/// Whether two bases generate the same lattice.
///
/// With rows as basis vectors, `B_b = U B_a` for an integer unimodular `U`.
pub fn lattice_equal(a: &Lattice, b: &Lattice) -> Result<bool> {
    check_dim(a.dim(), b.dim())?;
    let a_inv = a.basis.clone().try_inverse().ok_or(Error::SingularBasis)?;
    let u = &b.basis * a_inv;
    let integral = u.iter().all(|x| (x - x.round()).abs() <= INTEGRALITY_TOL);
    if !integral {
        return Ok(false);
    }
    let det = u.map(|x| x.round()).determinant();
    Ok((det.abs() - 1.0).abs() <= INTEGRALITY_TOL)
}

/// Result of [`integer_normal_of_span`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpanNormal {
    /// Dual-lattice vector orthogonal to every input point, with its integer
    /// coefficients in the dual basis.
    Normal { coeffs: Vec<i64>, vector: Vec<f64> },
    FullRank,
}

/// Finds a nonzero dual-lattice vector orthogonal to all points (given by
/// their integer lattice coordinates), or reports that they span R^d.
///
/// Works by integer elimination on the coefficient vectors: for a kernel vector
/// `k`, the dual vector `y = sum k_i b*_i` satisfies `<x, y> = <c, k> = 0`.
pub fn integer_normal_of_span(lat: &Lattice, coeffs: &[Vec<i64>]) -> Result<SpanNormal> {
    let d = lat.dim();
    let (rank, kernel) = intlin::integer_kernel(coeffs, d)?;
    if rank == d {
        return Ok(SpanNormal::FullRank);
    }
    let k = intlin::canonical_primitive(&kernel[0]).ok_or(Error::Internal("zero kernel vector".into()))?;
    let k = intlin::to_i64(&k)?;
    let vector = lat.dual().point(&k);
    Ok(SpanNormal::Normal { coeffs: k, vector: vector.iter().copied().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_lattice(rng: &mut ChaCha8Rng, d: usize) -> Lattice {
        loop {
            let m = Matrix::from_fn(d, d, |_, _| rng.gen_range(-5i32..=5) as f64);
            if let Ok(l) = Lattice::new(m) {
                return l;
            }
        }
    }

    #[test]
    fn gram_schmidt_identity() {
        let (gs, norms) = gram_schmidt(&Matrix::identity(3, 3)).unwrap();
        assert_eq!(gs, Matrix::identity(3, 3));
        assert_eq!(norms, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn gram_schmidt_one_projection() {
        let b = matrix_from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let (gs, norms) = gram_schmidt(&b).unwrap();
        assert!((gs - Matrix::identity(2, 2)).norm() < 1e-15);
        assert_eq!(norms, vec![1.0, 1.0]);
    }

    #[test]
    fn gram_schmidt_norms_match_lu_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let lat = random_lattice(&mut rng, 4);
            let det = lat.basis().clone().lu().determinant().abs();
            assert!((lat.det_abs() - det).abs() <= 1e-9 * det);
            // orthogonality of the rows
            let gs = lat.gram_schmidt_basis();
            for i in 0..4 {
                for j in 0..i {
                    assert!(gs.row(i).dot(&gs.row(j)).abs() < 1e-9 * lat.gram_schmidt_norms()[i] * lat.gram_schmidt_norms()[j]);
                }
            }
        }
    }

    #[test]
    fn singular_basis_rejected() {
        let b = matrix_from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(Lattice::new(b), Err(Error::SingularBasis)));
    }

    #[test]
    fn ill_conditioned_rejected() {
        let b = matrix_from_rows(&[vec![1.0, 0.0], vec![0.0, 1e-9]]).unwrap();
        assert!(matches!(Lattice::new(b), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn dual_examples() {
        let z3 = Lattice::integer(3);
        assert_eq!(z3.dual().basis(), &Matrix::identity(3, 3));
        let l = Lattice::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let expected = matrix_from_rows(&[vec![0.5, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((l.dual().basis() - expected).norm() < 1e-15);
    }

    #[test]
    fn dual_pairing_is_kronecker_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lat = random_lattice(&mut rng, 3);
        let du = lat.dual();
        let g = lat.basis() * du.basis().transpose();
        assert!((g - Matrix::identity(3, 3)).amax() < 1e-9);
        assert!((lat.det_abs() * du.det_abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lattice_equal_examples() {
        let z2 = Lattice::integer(2);
        let sheared = Lattice::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let index2 = Lattice::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(lattice_equal(&z2, &z2).unwrap());
        assert!(lattice_equal(&z2, &sheared).unwrap());
        assert!(!lattice_equal(&z2, &index2).unwrap());
        assert!(lattice_equal(&z2, &Lattice::integer(3)).is_err());
    }

    #[test]
    fn normal_of_rank_one_span() {
        let z3 = Lattice::integer(3);
        let pts = vec![vec![0, 0, 0], vec![1, 0, 0], vec![-1, 0, 0]];
        match integer_normal_of_span(&z3, &pts).unwrap() {
            SpanNormal::Normal { coeffs, .. } => {
                assert_eq!(coeffs[0], 0);
                assert!(coeffs.iter().any(|&c| c != 0));
            }
            SpanNormal::FullRank => panic!("rank 1 span reported full rank"),
        }
    }

    #[test]
    fn normal_of_plane_is_e3() {
        let z3 = Lattice::integer(3);
        let pts = vec![
            vec![0, 0, 0],
            vec![1, 1, 0],
            vec![-1, -1, 0],
            vec![1, -1, 0],
            vec![-1, 1, 0],
        ];
        let n = integer_normal_of_span(&z3, &pts).unwrap();
        assert_eq!(n, SpanNormal::Normal { coeffs: vec![0, 0, 1], vector: vec![0.0, 0.0, 1.0] });
    }

    #[test]
    fn full_rank_and_empty() {
        let z2 = Lattice::integer(2);
        let pts = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(integer_normal_of_span(&z2, &pts).unwrap(), SpanNormal::FullRank);
        assert!(matches!(integer_normal_of_span(&z2, &[]).unwrap(), SpanNormal::Normal { .. }));
    }

    #[test]
    fn normal_on_skewed_lattice_is_orthogonal() {
        let lat = Lattice::from_rows(&[vec![2.0, 1.0, 0.0], vec![0.5, 3.0, 1.0], vec![1.0, -1.0, 4.0]]).unwrap();
        let pts = vec![vec![1, 2, 0], vec![2, 4, 0], vec![0, 0, 0], vec![3, -1, 0]];
        let SpanNormal::Normal { vector, .. } = integer_normal_of_span(&lat, &pts).unwrap() else {
            panic!("expected a normal")
        };
        let y = Vector::from_vec(vector);
        for c in &pts {
            assert!(lat.point(c).dot(&y).abs() < 1e-9);
        }
    }
}
