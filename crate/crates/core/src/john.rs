//! Minimum-volume enclosing ellipsoids and the John-position normalization.

use nalgebra::SymmetricEigen;
use rand::Rng;
use serde::Serialize;

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::lattice::{Matrix, Vector};

/// Allowed slack over `d * vol^{1/d}` for the normalized circumradius.
pub const JOHN_SLACK: f64 = 1.1;
/// Optimality gap used when normalizing polytopes.
pub const JOHN_MVEE_EPS: f64 = 1e-7;

const MVEE_MAX_ITERS: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct JohnResult {
    /// `T` with `|det T| = 1`.
    pub transform: Matrix,
    pub transformed_body: Body,
    pub circumradius_after: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MveeResult {
    pub shape: Vec<Vec<f64>>,
    pub iterations: usize,
    pub gap: f64,
}

/// Origin-centred minimum-volume enclosing ellipsoid `{x : x^T A x <= 1}` of
/// the symmetrized set `{±p}`, returned as `A`.
///
/// Khachiyan's barycentric coordinate ascent with Todd-Yildirim away steps.
/// For symmetric sets the centre is the origin and the optimality condition
/// reads `max_i p_i^T X(u)^{-1} p_i <= d` where `X(u) = sum u_i p_i p_i^T`;
/// iteration stops once that maximum is within a factor `1 + eps`.
pub fn mvee(points: &[Vector], eps: f64) -> Result<Matrix> {
    Ok(mvee_with_stats(points, eps)?.0)
}

pub fn mvee_with_stats(points: &[Vector], eps: f64) -> Result<(Matrix, usize, f64)> {
    let pts: Vec<&Vector> = points.iter().filter(|p| p.norm() > 0.0).collect();
    if pts.is_empty() {
        return Err(Error::InvalidInput("mvee: rank-deficient point set".into()));
    }
    let d = pts[0].len();
    if pts.iter().any(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: 0 });
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("mvee: eps must be positive".into()));
    }
    let n = pts.len();
    let df = d as f64;
    let mut u = vec![1.0 / n as f64; n];
    let moment = |u: &[f64]| {
        let mut x = Matrix::zeros(d, d);
        for (p, &w) in pts.iter().zip(u) {
            if w > 0.0 {
                x.ger(w, p, p, 1.0);
            }
        }
        x
    };
    let first = moment(&u);
    let sv = first.clone().symmetric_eigen().eigenvalues;
    if sv.min() <= 1e-14 * sv.max().max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidInput("mvee: rank-deficient point set".into()));
    }
    for iter in 0..MVEE_MAX_ITERS {
        let x = moment(&u);
        let xinv = x
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("mvee: rank-deficient point set".into()))?;
        let m: Vec<f64> = pts.iter().map(|p| (&xinv * *p).dot(*p)).collect();
        let (jmax, &mmax) = m
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let gap = mmax / df - 1.0;
        if gap <= eps {
            let a = xinv / df;
            return Ok(((&a + a.transpose()) * 0.5, iter, gap));
        }
        let (jmin, &mmin) = m
            .iter()
            .enumerate()
            .filter(|(i, _)| u[*i] > 0.0)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("support nonempty");
        if mmax - df >= df - mmin {
            let step = (mmax - df) / (df * (mmax - 1.0));
            u.iter_mut().for_each(|w| *w *= 1.0 - step);
            u[jmax] += step;
        } else {
            // away step, clipped so the weight stays nonnegative
            let step = ((mmin - df) / (df * (mmin - 1.0))).max(-u[jmin] / (1.0 - u[jmin]));
            u.iter_mut().for_each(|w| *w *= 1.0 - step);
            u[jmin] += step;
            if u[jmin] < 1e-300 {
                u[jmin] = 0.0;
            }
        }
    }
    Err(Error::Internal("mvee did not converge".into()))
}

fn sqrt_spd(a: &Matrix) -> Matrix {
    let eig = SymmetricEigen::new(a.clone());
    let s = eig.eigenvalues.map(|l| l.sqrt());
    &eig.eigenvectors * Matrix::from_diagonal(&s) * eig.eigenvectors.transpose()
}

/// Determinant-one `T` that maps the ellipsoid `{x^T A x <= 1}` onto a ball.
pub fn whitening_transform(shape: &Matrix) -> Matrix {
    let d = shape.nrows() as f64;
    let root = sqrt_spd(shape);
    let det = root.determinant().abs();
    root / det.powf(1.0 / d)
}

/// Puts the body in (approximate) John position.
///
/// Ellipsoids are whitened analytically; polytopal bodies use the MVEE of
/// their vertex set. The result satisfies
/// `circumradius_after <= 1.1 * d * vol^{1/d}`, which is checked.
pub fn john_normalize<R: Rng + ?Sized>(body: &Body, rng: &mut R) -> Result<JohnResult> {
    let d = body.dim();
    let shape = match body {
        Body::Ellipsoid { shape } => shape.clone(),
        _ => {
            let vs = body.vertices().ok_or_else(|| {
                Error::JohnUnsupported(format!("no exact vertex description in dimension {d}"))
            })?;
            mvee(&vs, JOHN_MVEE_EPS)?
        }
    };
    let transform = whitening_transform(&shape);
    let transformed_body = body.apply_transform(&transform)?;
    let circumradius_after = transformed_body.circumradius();
    let vol = body.volume(rng).value;
    let bound = JOHN_SLACK * d as f64 * vol.powf(1.0 / d as f64);
    if circumradius_after > bound {
        return Err(Error::Internal(format!(
            "john position circumradius {circumradius_after} exceeds {bound}"
        )));
    }
    Ok(JohnResult { transform, transformed_body, circumradius_after })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix_from_rows;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    #[test]
    fn mvee_of_cross_vertices_is_unit_disk() {
        let pts = vec![v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, -1.0])];
        let a = mvee(&pts, 1e-9).unwrap();
        assert!((a - Matrix::identity(2, 2)).amax() < 1e-8);
    }

    #[test]
    fn mvee_of_square_vertices() {
        let pts = vec![v(&[1.0, 1.0]), v(&[1.0, -1.0]), v(&[-1.0, 1.0]), v(&[-1.0, -1.0])];
        let a = mvee(&pts, 1e-9).unwrap();
        assert!((a - Matrix::identity(2, 2) * 0.5).amax() < 1e-8);
    }

    #[test]
    fn mvee_contains_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let eps = 1e-6;
        let mut pts = Vec::new();
        for _ in 0..10 {
            let p = Vector::from_fn(3, |_, _| rng.gen_range(-2.0..2.0));
            pts.push(-p.clone());
            pts.push(p);
        }
        let a = mvee(&pts, eps).unwrap();
        for p in &pts {
            assert!((&a * p).dot(p) <= 1.0 + eps);
        }
    }

    #[test]
    fn mvee_of_rotated_box_is_tight_on_every_axis() {
        let eps = 1e-6;
        let (c, s) = (0.6f64, 0.8f64);
        let rot = Matrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        let hw = [1.5, 0.7, 0.3];
        let mut pts = Vec::new();
        for mask in 0..8 {
            let corner = Vector::from_fn(3, |i, _| if mask >> i & 1 == 1 { hw[i] } else { -hw[i] });
            pts.push(&rot * corner);
        }
        let a = mvee(&pts, eps).unwrap();
        for p in &pts {
            assert!((&a * p).dot(p) <= 1.0 + eps);
        }
        // shrinking any semi-axis by (1 - 10 eps) loses some point
        let eig = SymmetricEigen::new(a.clone());
        for k in 0..3 {
            let mut vals = eig.eigenvalues.clone();
            vals[k] /= (1.0 - 10.0 * eps).powi(2);
            let shrunk = &eig.eigenvectors * Matrix::from_diagonal(&vals) * eig.eigenvectors.transpose();
            let worst = pts.iter().map(|p| (&shrunk * p).dot(p)).fold(0.0, f64::max);
            assert!(worst > 1.0 + eps, "axis {k} not tight: {worst} {vals}");
        }
    }

    #[test]
    fn mvee_rejects_degenerate_set() {
        let pts = vec![v(&[1.0, 0.0]), v(&[2.0, 0.0])];
        assert!(mvee(&pts, 1e-6).is_err());
    }

    #[test]
    fn john_on_unit_ball_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = john_normalize(&Body::ball(3, 1.0).unwrap(), &mut rng).unwrap();
        assert!((r.transform - Matrix::identity(3, 3)).amax() < 1e-12);
        assert!((r.circumradius_after - 1.0).abs() < 1e-12);
    }

    #[test]
    fn john_whitens_ellipsoid() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let body = Body::ellipsoid(Matrix::from_diagonal(&v(&[0.25, 4.0]))).unwrap();
        let r = john_normalize(&body, &mut rng).unwrap();
        let expected = Matrix::from_diagonal(&v(&[0.5, 2.0]));
        assert!((r.transform.abs() - expected).amax() < 1e-12);
        assert!((r.transform.determinant().abs() - 1.0).abs() < 1e-9);
        let Body::Ellipsoid { shape } = &r.transformed_body else { panic!() };
        assert!((shape - Matrix::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn john_on_flat_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let body = Body::cuboid(vec![4.0, 0.25]).unwrap();
        let r = john_normalize(&body, &mut rng).unwrap();
        assert!((r.transform.determinant().abs() - 1.0).abs() < 1e-9);
        assert!(r.circumradius_after <= 1.1 * 2.0 * 2.0);
        assert!((r.circumradius_after - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn john_on_sheared_polytope() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let normals = matrix_from_rows(&[vec![1.0, 3.0, 0.0], vec![0.0, 1.0, -2.0], vec![1.0, 1.0, 1.0], vec![5.0, 0.0, 1.0]]).unwrap();
        let body = Body::hpolytope(normals, vec![1.0, 2.0, 1.5, 3.0]).unwrap();
        let r = john_normalize(&body, &mut rng).unwrap();
        assert!((r.transform.determinant().abs() - 1.0).abs() < 1e-9);
        let vol = body.volume(&mut rng).value;
        assert!(r.circumradius_after <= 1.1 * 3.0 * vol.powf(1.0 / 3.0));
    }
}
