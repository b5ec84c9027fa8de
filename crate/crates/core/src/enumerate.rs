//! Lattice points inside bodies: Fincke-Pohst ball enumeration, the
//! membership-filtered point set `K ∩ Λ`, a brute-force grid oracle and
//! hyperplane counting.

use crate::bodies::{unit_ball_volume, Body};
use crate::error::{check_dim, Error, Result};
use crate::intlin;
use crate::lattice::{Lattice, Vector};

/// Largest estimated number of lattice points in the enclosing ball.
pub const ENUMERATION_POINT_BUDGET: f64 = 1e8;
/// Hard cap on Fincke-Pohst tree nodes for body enumeration.
pub const ENUMERATION_NODE_BUDGET: u64 = 1_600_000_000;
/// Largest coefficient box scanned by the grid oracle.
pub const GRID_SCAN_BUDGET: f64 = 1e7;

/// Calls `f(coeffs, squared_distance)` for every lattice point within
/// `radius` of `center` (or the origin), in a fixed deterministic order.
///
/// Pruning uses a relative slack of 1e-9 on the squared radius so that
/// boundary points are never lost to rounding; callers filter exactly.
/// Returns the number of tree nodes visited.
pub fn for_each_in_ball<F>(
    lat: &Lattice,
    center: Option<&Vector>,
    radius: f64,
    max_nodes: u64,
    mut f: F,
) -> Result<u64>
where
    F: FnMut(&[i64], f64),
{
    let d = lat.dim();
    let t: Vec<f64> = match center {
        Some(c) => {
            check_dim(d, c.len())?;
            lat.coordinates(c).iter().copied().collect()
        }
        None => vec![0.0; d],
    };
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("invalid radius {radius}")));
    }
    let r2 = radius * radius * (1.0 + 1e-9);
    let sq: Vec<f64> = lat.gram_schmidt_norms().iter().map(|n| n * n).collect();
    let mut state = FpState {
        d,
        t,
        sq,
        mu: lat.mu(),
        r2,
        z: vec![0i64; d],
        nodes: 0,
        max_nodes,
    };
    state.visit(d - 1, 0.0, &mut f)?;
    Ok(state.nodes)
}

struct FpState<'a> {
    d: usize,
    t: Vec<f64>,
    sq: Vec<f64>,
    mu: &'a nalgebra::DMatrix<f64>,
    r2: f64,
    z: Vec<i64>,
    nodes: u64,
    max_nodes: u64,
}

impl FpState<'_> {
    fn visit<F: FnMut(&[i64], f64)>(&mut self, j: usize, partial: f64, f: &mut F) -> Result<()> {
        let mut c = self.t[j];
        for i in j + 1..self.d {
            c -= (self.z[i] as f64 - self.t[i]) * self.mu[(i, j)];
        }
        let remaining = self.r2 - partial;
        if remaining < 0.0 {
            return Ok(());
        }
        let half = (remaining / self.sq[j]).sqrt();
        let lo = (c - half).ceil() as i64;
        let hi = (c + half).floor() as i64;
        for zj in lo..=hi {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::BudgetExceeded(format!(
                    "Fincke-Pohst visited more than {} nodes",
                    self.max_nodes
                )));
            }
            let y = zj as f64 - c;
            let next = partial + self.sq[j] * y * y;
            if next > self.r2 {
                continue;
            }
            self.z[j] = zj;
            if j == 0 {
                f(&self.z, next);
            } else {
                self.visit(j - 1, next, f)?;
            }
        }
        self.z[j] = 0;
        Ok(())
    }
}

/// Expected number of lattice points in a ball, from the volume heuristic.
pub fn ball_point_estimate(lat: &Lattice, radius: f64) -> f64 {
    unit_ball_volume(lat.dim()) * radius.powi(lat.dim() as i32) / lat.det_abs()
}

/// The finite set `K ∩ Λ`, sorted lexicographically by lattice coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vector>,
    coeffs: Vec<Vec<i64>>,
    contains_zero: bool,
}

impl PointSet {
    /// Builds a point set from lattice coordinates; points are recomputed from the basis.
    pub fn from_coeffs(lat: &Lattice, mut coeffs: Vec<Vec<i64>>) -> Result<PointSet> {
        for c in &coeffs {
            check_dim(lat.dim(), c.len())?;
        }
        coeffs.sort();
        coeffs.dedup();
        let points = coeffs.iter().map(|c| lat.point(c)).collect();
        let contains_zero = coeffs.iter().any(|c| c.iter().all(|&x| x == 0));
        Ok(PointSet { dim: lat.dim(), points, coeffs, contains_zero })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn coeffs(&self) -> &[Vec<i64>] {
        &self.coeffs
    }

    pub fn contains_zero(&self) -> bool {
        self.contains_zero
    }

    /// Closed under `x -> -x`.
    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|c| {
            let neg: Vec<i64> = c.iter().map(|x| -x).collect();
            self.coeffs.binary_search(&neg).is_ok()
        })
    }

    /// Dimension of the linear span of the points.
    pub fn rank(&self) -> Result<usize> {
        intlin::rank(&self.coeffs, self.dim)
    }

    /// Exact count of points on the hyperplane `<x, y> = 0` where `y` is
    /// given by integer coordinates in the dual basis.
    pub fn count_orthogonal(&self, dual_coeffs: &[i64]) -> Result<usize> {
        check_dim(self.dim, dual_coeffs.len())?;
        if dual_coeffs.iter().all(|&k| k == 0) {
            return Err(Error::ZeroVector);
        }
        Ok(self
            .coeffs
            .iter()
            .filter(|c| c.iter().zip(dual_coeffs).map(|(&a, &b)| a as i128 * b as i128).sum::<i128>() == 0)
            .count())
    }
}

/// All lattice points of the body: ball enumeration at the circumradius
/// followed by the membership filter.
pub fn enumerate_in_body(lat: &Lattice, body: &Body) -> Result<PointSet> {
    check_dim(lat.dim(), body.dim())?;
    let radius = body.circumradius();
    let estimate = ball_point_estimate(lat, radius);
    if !(estimate <= ENUMERATION_POINT_BUDGET) {
        return Err(Error::EnumerationTooExpensive(format!(
            "about {estimate:.3e} lattice points in the enclosing ball"
        )));
    }
    let mut coeffs = Vec::new();
    for_each_in_ball(lat, None, radius, ENUMERATION_NODE_BUDGET, |z, _| {
        if body.contains_unchecked(&lat.point(z)) {
            coeffs.push(z.to_vec());
        }
    })
    .map_err(|e| match e {
        Error::BudgetExceeded(m) => Error::EnumerationTooExpensive(m),
        other => other,
    })?;
    PointSet::from_coeffs(lat, coeffs)
}

/// Brute-force oracle: scans every coefficient vector with
/// `|z_i| <= R * |b*_i|` and keeps those inside the body.
pub fn grid_scan_oracle(lat: &Lattice, body: &Body) -> Result<PointSet> {
    check_dim(lat.dim(), body.dim())?;
    let d = lat.dim();
    let radius = body.circumradius();
    let dual = lat.dual_basis();
    let bounds: Vec<i64> = (0..d)
        .map(|i| (radius * dual.row(i).norm() * (1.0 + 1e-9)).floor() as i64)
        .collect();
    let cells: f64 = bounds.iter().map(|&k| (2 * k + 1) as f64).product();
    if cells > GRID_SCAN_BUDGET {
        return Err(Error::BudgetExceeded(format!("grid scan over {cells:.3e} coefficient vectors")));
    }
    let mut z: Vec<i64> = bounds.iter().map(|k| -k).collect();
    let mut coeffs = Vec::new();
    loop {
        if body.contains_unchecked(&lat.point(&z)) {
            coeffs.push(z.clone());
        }
        let mut i = 0;
        loop {
            if i == d {
                return PointSet::from_coeffs(lat, coeffs);
            }
            if z[i] < bounds[i] {
                z[i] += 1;
                break;
            }
            z[i] = -bounds[i];
            i += 1;
        }
    }
}

/// Counts `(points on y⊥, total)`.
///
/// When `y` and all points have integer coordinates the inner products are
/// exact integers; otherwise `|<x, y>| <= 1e-9 |x| |y|` counts as orthogonal.
pub fn slice_count(ps: &PointSet, y: &Vector) -> Result<(usize, usize)> {
    check_dim(ps.dim(), y.len())?;
    if y.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVector);
    }
    let integral = |v: &Vector| v.iter().all(|x| x.fract() == 0.0 && x.abs() < 2f64.powi(52));
    let on = if integral(y) && ps.points().iter().all(integral) {
        let yi: Vec<i128> = y.iter().map(|&v| v as i128).collect();
        ps.points()
            .iter()
            .filter(|x| x.iter().zip(&yi).map(|(&a, &b)| a as i128 * b).sum::<i128>() == 0)
            .count()
    } else {
        let yn = y.norm();
        ps.points()
            .iter()
            .filter(|x| {
                let xn = x.norm();
                xn == 0.0 || x.dot(y).abs() <= 1e-9 * xn * yn
            })
            .count()
    };
    Ok((on, ps.len()))
}
