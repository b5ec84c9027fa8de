//! Origin-symmetric convex bodies: membership, circumradius, volume and
//! linear images.

use nalgebra::SymmetricEigen;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::{all_finite, matrix_from_rows, matrix_rows, Matrix, Vector};

/// Boundary tolerance of the membership oracle; boundary points count as inside.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Relative standard-error target of Monte Carlo volume estimates.
pub const VOLUME_REL_ERR: f64 = 0.01;
/// Maximum number of (normal-subset, sign) systems solved by exact vertex enumeration.
pub const VERTEX_ENUM_BUDGET: u64 = 2_000_000;

const MC_BATCH: u64 = 10_000;
const MC_MAX_SAMPLES: u64 = 100_000_000;

/// An origin-symmetric convex body in R^d.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    /// `{x : x^T A x <= 1}` with `A` symmetric positive definite.
    Ellipsoid { shape: Matrix },
    Box { half_widths: Vec<f64> },
    /// `{x : sum |x_i| / scales_i <= 1}`.
    CrossPolytope { scales: Vec<f64> },
    /// `{x : |<a_i, x>| <= b_i}`; normals are the rows of `normals`.
    HPolytope { normals: Matrix, offsets: Vec<f64> },
    /// `T K` for an inner body `K`, evaluated through `T^{-1}`.
    Pullback { inner: Box<Body>, transform: Matrix, inverse: Matrix },
}

/// Serialized form of a [`Body`] (the body JSON file schema).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BodySpec {
    Ellipsoid { shape: Vec<Vec<f64>> },
    Box { half_widths: Vec<f64> },
    CrossPolytope { scales: Vec<f64> },
    Hpolytope { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
    Pullback { transform: Vec<Vec<f64>>, inner: Box<BodySpec> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Volume {
    pub value: f64,
    pub std_error: f64,
}

fn positive_finite(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidInput(format!("{what}: empty")));
    }
    if v.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(Error::InvalidInput(format!("{what}: entries must be positive and finite")));
    }
    Ok(())
}

fn is_diagonal(t: &Matrix) -> bool {
    let scale = t.amax();
    (0..t.nrows()).all(|i| (0..t.ncols()).all(|j| i == j || t[(i, j)].abs() <= 1e-12 * scale))
}

/// Volume of the unit Euclidean ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Calls `f` on every k-subset of `0..n` in lexicographic order until it returns false.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

impl Body {
    pub fn ellipsoid(shape: Matrix) -> Result<Body> {
        if shape.nrows() == 0 || shape.nrows() != shape.ncols() || !all_finite(shape.iter()) {
            return Err(Error::InvalidInput("ellipsoid shape must be square and finite".into()));
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * shape.amax() {
            return Err(Error::InvalidInput("ellipsoid shape must be symmetric".into()));
        }
        let shape = (&shape + shape.transpose()) * 0.5;
        if shape.clone().cholesky().is_none() {
            return Err(Error::InvalidInput("ellipsoid shape must be positive definite".into()));
        }
        Ok(Body::Ellipsoid { shape })
    }

    pub fn ball(d: usize, radius: f64) -> Result<Body> {
        positive_finite(&[radius], "radius")?;
        Body::ellipsoid(Matrix::identity(d, d) / (radius * radius))
    }

    pub fn cuboid(half_widths: Vec<f64>) -> Result<Body> {
        positive_finite(&half_widths, "half_widths")?;
        Ok(Body::Box { half_widths })
    }

    pub fn cross_polytope(scales: Vec<f64>) -> Result<Body> {
        positive_finite(&scales, "scales")?;
        Ok(Body::CrossPolytope { scales })
    }

    pub fn hpolytope(normals: Matrix, offsets: Vec<f64>) -> Result<Body> {
        positive_finite(&offsets, "offsets")?;
        check_dim(normals.nrows(), offsets.len())?;
        if !all_finite(normals.iter()) {
            return Err(Error::InvalidInput("non-finite normal".into()));
        }
        let d = normals.ncols();
        let sv = normals.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let rank = sv.iter().filter(|&&s| s > 1e-10 * smax).count();
        if normals.nrows() < d || rank < d {
            return Err(Error::InvalidInput("unbounded polytope: normals do not span R^d".into()));
        }
        Ok(Body::HPolytope { normals, offsets })
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Body> {
        match spec {
            BodySpec::Ellipsoid { shape } => Body::ellipsoid(matrix_from_rows(shape)?),
            BodySpec::Box { half_widths } => Body::cuboid(half_widths.clone()),
            BodySpec::CrossPolytope { scales } => Body::cross_polytope(scales.clone()),
            BodySpec::Hpolytope { normals, offsets } => {
                Body::hpolytope(matrix_from_rows(normals)?, offsets.clone())
            }
            BodySpec::Pullback { transform, inner } => {
                Body::from_spec(inner)?.apply_transform(&matrix_from_rows(transform)?)
            }
        }
    }

    pub fn to_spec(&self) -> BodySpec {
        match self {
            Body::Ellipsoid { shape } => BodySpec::Ellipsoid { shape: matrix_rows(shape) },
            Body::Box { half_widths } => BodySpec::Box { half_widths: half_widths.clone() },
            Body::CrossPolytope { scales } => BodySpec::CrossPolytope { scales: scales.clone() },
            Body::HPolytope { normals, offsets } => BodySpec::Hpolytope {
                normals: matrix_rows(normals),
                offsets: offsets.clone(),
            },
            Body::Pullback { inner, transform, .. } => BodySpec::Pullback {
                transform: matrix_rows(transform),
                inner: Box::new(inner.to_spec()),
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::Ellipsoid { shape } => shape.nrows(),
            Body::Box { half_widths } => half_widths.len(),
            Body::CrossPolytope { scales } => scales.len(),
            Body::HPolytope { normals, .. } => normals.ncols(),
            Body::Pullback { transform, .. } => transform.nrows(),
        }
    }

    /// Membership with boundary tolerance [`BOUNDARY_TOL`].
    pub fn contains(&self, x: &Vector) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &Vector) -> bool {
        let lim = 1.0 + BOUNDARY_TOL;
        match self {
            Body::Ellipsoid { shape } => (shape * x).dot(x) <= lim,
            Body::Box { half_widths } => x.iter().zip(half_widths).all(|(xi, h)| xi.abs() <= h * lim),
            Body::CrossPolytope { scales } => {
                x.iter().zip(scales).map(|(xi, s)| xi.abs() / s).sum::<f64>() <= lim
            }
            Body::HPolytope { normals, offsets } => {
                let ax = normals * x;
                ax.iter().zip(offsets).all(|(v, b)| v.abs() <= b * lim)
            }
            Body::Pullback { inner, inverse, .. } => inner.contains_unchecked(&(inverse * x)),
        }
    }

    /// Vertices of a polytopal body, when they can be listed exactly.
    pub fn vertices(&self) -> Option<Vec<Vector>> {
        let d = self.dim();
        match self {
            Body::Ellipsoid { .. } => None,
            Body::Box { half_widths } => {
                if d > 20 {
                    return None;
                }
                Some(
                    (0..1u32 << d)
                        .map(|mask| {
                            Vector::from_fn(d, |i, _| {
                                if mask >> i & 1 == 1 {
                                    -half_widths[i]
                                } else {
                                    half_widths[i]
                                }
                            })
                        })
                        .collect(),
                )
            }
            Body::CrossPolytope { scales } => {
                let mut out = Vec::with_capacity(2 * d);
                for (i, &s) in scales.iter().enumerate() {
                    let mut v = Vector::zeros(d);
                    v[i] = s;
                    out.push(v.clone());
                    out.push(-v);
                }
                Some(out)
            }
            Body::HPolytope { normals, offsets } => hpolytope_vertices(normals, offsets),
            Body::Pullback { inner, transform, .. } => {
                inner.vertices().map(|vs| vs.iter().map(|v| transform * v).collect())
            }
        }
    }

    /// Radius of the smallest origin-centred ball containing the body.
    ///
    /// Exact for every variant whose vertices can be enumerated. For large
    /// H-polytopes this is an upper bound from parallelotope certificates.
    pub fn circumradius(&self) -> f64 {
        match self {
            Body::Ellipsoid { shape } => {
                let eig = SymmetricEigen::new(shape.clone());
                1.0 / eig.eigenvalues.min().sqrt()
            }
            Body::Box { half_widths } => half_widths.iter().map(|h| h * h).sum::<f64>().sqrt(),
            Body::CrossPolytope { scales } => scales.iter().cloned().fold(0.0, f64::max),
            Body::HPolytope { normals, offsets } => match hpolytope_vertices(normals, offsets) {
                Some(vs) => max_norm(&vs),
                None => parallelotope_certificate(normals, offsets).0,
            },
            Body::Pullback { inner, transform, .. } => match self.vertices() {
                Some(vs) => max_norm(&vs),
                None => transform.clone().svd(false, false).singular_values.max() * inner.circumradius(),
            },
        }
    }

    /// Per-coordinate bounds `|x_j| <= bbox[j]` valid for every point of the body.
    pub fn bounding_box(&self) -> Vec<f64> {
        let d = self.dim();
        match self {
            Body::Ellipsoid { shape } => {
                let inv = shape.clone().try_inverse().expect("positive definite");
                (0..d).map(|i| inv[(i, i)].sqrt()).collect()
            }
            Body::Box { half_widths } => half_widths.clone(),
            Body::CrossPolytope { scales } => scales.clone(),
            _ => match self.vertices() {
                Some(vs) => (0..d).map(|j| vs.iter().map(|v| v[j].abs()).fold(0.0, f64::max)).collect(),
                None => match self {
                    Body::HPolytope { normals, offsets } => parallelotope_certificate(normals, offsets).1,
                    Body::Pullback { inner, transform, .. } => {
                        let ib = inner.bounding_box();
                        (0..d)
                            .map(|j| (0..d).map(|k| transform[(j, k)].abs() * ib[k]).sum())
                            .collect()
                    }
                    _ => unreachable!(),
                },
            },
        }
    }

    /// Volume: closed form where available, Monte Carlo otherwise.
    pub fn volume<R: Rng + ?Sized>(&self, rng: &mut R) -> Volume {
        let d = self.dim();
        match self {
            Body::Ellipsoid { shape } => Volume {
                value: unit_ball_volume(d) / shape.determinant().sqrt(),
                std_error: 0.0,
            },
            Body::Box { half_widths } => Volume {
                value: half_widths.iter().map(|h| 2.0 * h).product(),
                std_error: 0.0,
            },
            Body::CrossPolytope { scales } => Volume {
                value: 2f64.powi(d as i32) / factorial(d) * scales.iter().product::<f64>(),
                std_error: 0.0,
            },
            Body::HPolytope { .. } => monte_carlo_volume(self, rng, VOLUME_REL_ERR),
            Body::Pullback { inner, transform, .. } => {
                let det = transform.determinant().abs();
                let v = inner.volume(rng);
                Volume { value: det * v.value, std_error: det * v.std_error }
            }
        }
    }

    /// The body `T K = {T x : x in K}`.
    pub fn apply_transform(&self, t: &Matrix) -> Result<Body> {
        let d = self.dim();
        if t.nrows() != d || t.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: t.nrows() });
        }
        if !all_finite(t.iter()) {
            return Err(Error::InvalidInput("non-finite transform".into()));
        }
        let inv = t
            .clone()
            .try_inverse()
            .filter(|_| t.determinant().abs() > 1e-300)
            .ok_or_else(|| Error::InvalidInput("singular transform".into()))?;
        if *t == Matrix::identity(d, d) {
            return Ok(self.clone());
        }
        let diag = is_diagonal(t);
        Ok(match self {
            Body::Ellipsoid { shape } => {
                let s = inv.transpose() * shape * &inv;
                Body::Ellipsoid { shape: (&s + s.transpose()) * 0.5 }
            }
            Body::Box { half_widths } if diag => Body::Box {
                half_widths: half_widths.iter().enumerate().map(|(i, h)| h * t[(i, i)].abs()).collect(),
            },
            Body::Box { half_widths } => Body::HPolytope { normals: inv, offsets: half_widths.clone() },
            Body::CrossPolytope { scales } if diag => Body::CrossPolytope {
                scales: scales.iter().enumerate().map(|(i, s)| s * t[(i, i)].abs()).collect(),
            },
            Body::CrossPolytope { .. } => Body::Pullback {
                inner: Box::new(self.clone()),
                transform: t.clone(),
                inverse: inv,
            },
            Body::HPolytope { normals, offsets } => Body::HPolytope {
                normals: normals * &inv,
                offsets: offsets.clone(),
            },
            Body::Pullback { inner, transform, inverse } => Body::Pullback {
                inner: inner.clone(),
                transform: t * transform,
                inverse: inverse * inv,
            },
        })
    }
}

fn max_norm(vs: &[Vector]) -> f64 {
    vs.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Exact vertex enumeration of `{|<a_i, x>| <= b_i}` by solving every
/// d-subset of facet pairs; `None` when the combinatorial budget is exceeded.
fn hpolytope_vertices(normals: &Matrix, offsets: &[f64]) -> Option<Vec<Vector>> {
    let (m, d) = (normals.nrows(), normals.ncols());
    let systems = binomial(m, d).saturating_mul(1u64 << (d - 1).min(63));
    if systems > VERTEX_ENUM_BUDGET {
        return None;
    }
    let scale = offsets.iter().cloned().fold(0.0, f64::max);
    let mut out: Vec<Vector> = Vec::new();
    for_each_subset(m, d, |subset| {
        let a = Matrix::from_fn(d, d, |i, j| normals[(subset[i], j)]);
        let Some(lu) = Some(a.lu()).filter(|lu| lu.determinant().abs() > 1e-12) else {
            return true;
        };
        for signs in 0..1u64 << (d - 1) {
            let rhs = Vector::from_fn(d, |i, _| {
                let b = offsets[subset[i]];
                if i > 0 && signs >> (i - 1) & 1 == 1 {
                    -b
                } else {
                    b
                }
            });
            let Some(x) = lu.solve(&rhs) else { continue };
            let ax = normals * &x;
            let feasible = ax.iter().zip(offsets).all(|(v, b)| v.abs() <= b * (1.0 + 1e-9));
            if feasible {
                for v in [x.clone(), -x] {
                    if !out.iter().any(|w| (w - &v).amax() <= 1e-9 * scale.max(1.0)) {
                        out.push(v);
                    }
                }
            }
        }
        true
    });
    Some(out)
}

/// Any `d` independent facet pairs bound a parallelotope containing the body.
/// Returns (circumradius bound, bounding box) minimized over a deterministic
/// set of subsets.
fn parallelotope_certificate(normals: &Matrix, offsets: &[f64]) -> (f64, Vec<f64>) {
    let (m, d) = (normals.nrows(), normals.ncols());
    let mut best_r = f64::INFINITY;
    let mut best_box = vec![f64::INFINITY; d];
    let mut tried = 0u64;
    for_each_subset(m, d, |subset| {
        tried += 1;
        let a = Matrix::from_fn(d, d, |i, j| normals[(subset[i], j)]);
        if let Some(inv) = a.try_inverse() {
            if inv.iter().all(|x| x.is_finite()) {
                let b: Vec<f64> = subset.iter().map(|&i| offsets[i]).collect();
                for j in 0..d {
                    let w: f64 = (0..d).map(|k| inv[(j, k)].abs() * b[k]).sum();
                    best_box[j] = best_box[j].min(w);
                }
                if d <= 16 {
                    let r = (0..1u32 << d)
                        .map(|mask| {
                            let z = Vector::from_fn(d, |i, _| if mask >> i & 1 == 1 { -b[i] } else { b[i] });
                            (&inv * z).norm()
                        })
                        .fold(0.0, f64::max);
                    best_r = best_r.min(r);
                }
            }
        }
        tried < 20_000
    });
    let box_r = best_box.iter().map(|x| x * x).sum::<f64>().sqrt();
    (best_r.min(box_r), best_box)
}

/// Rejection-sampling volume estimate inside the bounding box, run until the
/// relative standard error drops to `rel_target`.
pub fn monte_carlo_volume<R: Rng + ?Sized>(body: &Body, rng: &mut R, rel_target: f64) -> Volume {
    let bbox = body.bounding_box();
    let d = body.dim();
    let box_vol: f64 = bbox.iter().map(|h| 2.0 * h).product();
    let mut hits = 0u64;
    let mut n = 0u64;
    let mut x = Vector::zeros(d);
    loop {
        for _ in 0..MC_BATCH {
            for j in 0..d {
                x[j] = rng.gen_range(-bbox[j]..=bbox[j]);
            }
            if body.contains_unchecked(&x) {
                hits += 1;
            }
        }
        n += MC_BATCH;
        let p = hits as f64 / n as f64;
        let se = box_vol * (p * (1.0 - p) / n as f64).sqrt();
        let value = box_vol * p;
        if (hits > 0 && se <= rel_target * value) || n >= MC_MAX_SAMPLES {
            return Volume { value, std_error: se };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    fn square_hpoly() -> Body {
        Body::hpolytope(Matrix::identity(2, 2), vec![1.0, 1.0]).unwrap()
    }

    fn rotation(theta: f64) -> Matrix {
        matrix_from_rows(&[vec![theta.cos(), -theta.sin()], vec![theta.sin(), theta.cos()]]).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(Body::ball(3, 1.0).unwrap().contains(&v(&[0.0, 0.0, 0.0])).unwrap());
        assert!(Body::cuboid(vec![1.0, 1.0]).unwrap().contains(&v(&[1.0, 1.0])).unwrap());
        let cross = Body::cross_polytope(vec![1.0; 3]).unwrap();
        assert!(!cross.contains(&v(&[1.0, 1.0, 0.0])).unwrap());
        assert!(cross.contains(&v(&[0.5, 0.5, 0.0])).unwrap());
        assert!(cross.contains(&v(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn circumradius_examples() {
        assert!((Body::cuboid(vec![1.0; 3]).unwrap().circumradius() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(Body::cross_polytope(vec![2.0, 1.0]).unwrap().circumradius(), 2.0);
        let e = Body::ellipsoid(Matrix::from_diagonal(&v(&[0.25, 1.0]))).unwrap();
        assert!((e.circumradius() - 2.0).abs() < 1e-12);
        assert!((square_hpoly().circumradius() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_volumes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(Body::cuboid(vec![1.0, 1.0]).unwrap().volume(&mut rng), Volume { value: 4.0, std_error: 0.0 });
        let c = Body::cross_polytope(vec![1.0; 3]).unwrap().volume(&mut rng);
        assert!((c.value - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.std_error, 0.0);
        let b = Body::ball(3, 1.0).unwrap().volume(&mut rng);
        assert!((b.value - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_square_volume() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let vol = square_hpoly().volume(&mut rng);
        assert!(vol.std_error > 0.0 || vol.value == 4.0);
        assert!((vol.value - 4.0).abs() <= 3.0 * vol.std_error + 1e-12);
        assert!(vol.std_error <= 0.01 * vol.value);
    }

    #[test]
    fn hpolytope_needs_spanning_normals() {
        let normals = matrix_from_rows(&[vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!(Body::hpolytope(normals, vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn transform_identity_and_diagonal() {
        let ball = Body::ball(2, 1.0).unwrap();
        assert_eq!(ball.apply_transform(&Matrix::identity(2, 2)).unwrap(), ball);
        let t = Matrix::from_diagonal(&v(&[2.0, 0.5]));
        let e = ball.apply_transform(&t).unwrap();
        let Body::Ellipsoid { shape } = &e else { panic!("ellipsoid expected") };
        assert!((shape - Matrix::from_diagonal(&v(&[0.25, 4.0]))).amax() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((e.volume(&mut rng).value - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn rotated_box_membership() {
        let rot = rotation(std::f64::consts::FRAC_PI_4);
        let body = Body::cuboid(vec![1.0, 1.0]).unwrap().apply_transform(&rot).unwrap();
        assert!(matches!(body, Body::HPolytope { .. }));
        assert!(body.contains(&v(&[2f64.sqrt() - 1e-6, 0.0])).unwrap());
        assert!(!body.contains(&v(&[2f64.sqrt() + 1e-6, 0.0])).unwrap());
        assert!((body.circumradius() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rotated_cross_polytope_is_pullback() {
        let rot = rotation(0.3);
        let body = Body::cross_polytope(vec![2.0, 1.0]).unwrap().apply_transform(&rot).unwrap();
        assert!(matches!(body, Body::Pullback { .. }));
        assert!((body.circumradius() - 2.0).abs() < 1e-12);
        let x = &rot * v(&[1.9, 0.0]);
        assert!(body.contains(&x).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((body.volume(&mut rng).value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn singular_transform_rejected() {
        let t = matrix_from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(Body::ball(2, 1.0).unwrap().apply_transform(&t).is_err());
    }

    #[test]
    fn cube_vertices_from_h_description() {
        let cube = Body::hpolytope(Matrix::identity(3, 3), vec![1.0, 2.0, 3.0]).unwrap();
        let vs = cube.vertices().unwrap();
        assert_eq!(vs.len(), 8);
        assert_eq!(cube.bounding_box(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn body_spec_json_round_trip() {
        let json = r#"{"type":"cross_polytope","scales":[1.0,2.0]}"#;
        let spec: BodySpec = serde_json::from_str(json).unwrap();
        let body = Body::from_spec(&spec).unwrap();
        assert_eq!(body, Body::cross_polytope(vec![1.0, 2.0]).unwrap());
        assert_eq!(serde_json::to_string(&body.to_spec()).unwrap(), json);
    }
}
