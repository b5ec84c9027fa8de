//! Exact integer linear algebra on lattice-coordinate vectors.
//!
//! Everything here runs in `i128` with checked arithmetic. The inputs are small
//! coefficient vectors (desk-scale dimensions), so overflow is reported rather
//! than silently wrapped.

use crate::error::{Error, Result};

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

/// Extended Euclid: returns `(g, x, y)` with `g = gcd(a, b) >= 0` and `a*x + b*y = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn gcd_slice(v: &[i128]) -> i128 {
    v.iter().fold(0i128, |g, &x| ext_gcd(g, x).0)
}

/// Divides out the content and fixes the sign so the first nonzero entry is positive.
/// Returns `None` for the zero vector.
pub fn canonical_primitive(v: &[i128]) -> Option<Vec<i128>> {
    let g = gcd_slice(v);
    if g == 0 {
        return None;
    }
    let mut out: Vec<i128> = v.iter().map(|&x| x / g).collect();
    if let Some(&first) = out.iter().find(|&&x| x != 0) {
        if first < 0 {
            out.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Some(out)
}

pub fn dot(a: &[i128], b: &[i128]) -> Result<i128> {
    a.iter()
        .zip(b)
        .try_fold(0i128, |acc, (&x, &y)| add(acc, mul(x, y)?))
}

pub fn to_i128(v: &[i64]) -> Vec<i128> {
    v.iter().map(|&x| x as i128).collect()
}

pub fn to_i64(v: &[i128]) -> Result<Vec<i64>> {
    v.iter()
        .map(|&x| i64::try_from(x).map_err(|_| Error::Overflow))
        .collect()
}

/// Square integer matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub n: usize,
    pub data: Vec<i128>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn at(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.n + j]
    }

    pub fn mul_vec(&self, v: &[i128]) -> Result<Vec<i128>> {
        (0..self.n)
            .map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], v))
            .collect()
    }

    pub fn transpose_mul_vec(&self, v: &[i128]) -> Result<Vec<i128>> {
        let mut out = vec![0i128; self.n];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = add(*o, mul(self.at(i, j), vi)?)?;
            }
        }
        Ok(out)
    }

    /// Replaces rows `(i, j)` by `(a*r_i + b*r_j, c*r_i + d*r_j)`.
    fn combine_rows(&mut self, i: usize, j: usize, a: i128, b: i128, c: i128, d: i128) -> Result<()> {
        let n = self.n;
        for k in 0..n {
            let ri = self.data[i * n + k];
            let rj = self.data[j * n + k];
            self.data[i * n + k] = add(mul(a, ri)?, mul(b, rj)?)?;
            self.data[j * n + k] = add(mul(c, ri)?, mul(d, rj)?)?;
        }
        Ok(())
    }
}

/// For a primitive `v`, builds a unimodular `M` with `M v = e_1`.
pub fn unimodular_to_e1(v: &[i128]) -> Result<IntMatrix> {
    let n = v.len();
    let mut m = IntMatrix::identity(n);
    let mut w = v.to_vec();
    for i in (1..n).rev() {
        let (a, b) = (w[i - 1], w[i]);
        if b == 0 {
            continue;
        }
        let (g, x, y) = ext_gcd(a, b);
        // [[x, y], [-b/g, a/g]] has determinant (x*a + y*b)/g = 1.
        m.combine_rows(i - 1, i, x, y, -b / g, a / g)?;
        w[i - 1] = g;
        w[i] = 0;
    }
    match w[0] {
        1 => {}
        -1 => {
            for k in 0..n {
                m.data[k] = -m.data[k];
            }
        }
        _ => return Err(Error::InvalidInput("vector is not primitive".into())),
    }
    Ok(m)
}

/// Integer column elimination (Hermite-style) of the `rows` matrix.
///
/// Returns the rank and a basis of the integer kernel `{k : <r, k> = 0 for all rows r}`.
pub fn integer_kernel(rows: &[Vec<i64>], dim: usize) -> Result<(usize, Vec<Vec<i128>>)> {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| to_i128(r)).collect();
    for r in &a {
        if r.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
        }
    }
    // Column operations on `a` are mirrored on `u`; columns of `u` stay a Z-basis of Z^dim.
    let mut u = IntMatrix::identity(dim);
    let mut pivot = 0usize;
    for row in 0..a.len() {
        if pivot == dim {
            break;
        }
        for col in pivot + 1..dim {
            let (p, q) = (a[row][pivot], a[row][col]);
            if q == 0 {
                continue;
            }
            let (g, x, y) = ext_gcd(p, q);
            let (c, d) = (-q / g, p / g);
            // new_pivot = x*col_p + y*col_q, new_col = c*col_p + d*col_q; det = x*d - y*c = 1.
            for r in a.iter_mut() {
                let (ap, aq) = (r[pivot], r[col]);
                r[pivot] = add(mul(x, ap)?, mul(y, aq)?)?;
                r[col] = add(mul(c, ap)?, mul(d, aq)?)?;
            }
            for k in 0..dim {
                let (up, uq) = (u.at(k, pivot), u.at(k, col));
                u.data[k * dim + pivot] = add(mul(x, up)?, mul(y, uq)?)?;
                u.data[k * dim + col] = add(mul(c, up)?, mul(d, uq)?)?;
            }
        }
        if a[row][pivot] != 0 {
            pivot += 1;
        }
    }
    let kernel = (pivot..dim)
        .map(|col| (0..dim).map(|k| u.at(k, col)).collect())
        .collect();
    Ok((pivot, kernel))
}

pub fn rank(rows: &[Vec<i64>], dim: usize) -> Result<usize> {
    Ok(integer_kernel(rows, dim)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(12, 18), (-7, 3), (0, 5), (5, 0), (-4, -6)] {
            let (g, x, y) = ext_gcd(a, b);
            assert_eq!(a * x + b * y, g);
            assert!(g >= 0);
        }
    }

    #[test]
    fn unimodular_maps_to_e1() {
        let v = vec![6i128, 10, 15];
        let m = unimodular_to_e1(&v).unwrap();
        assert_eq!(m.mul_vec(&v).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn kernel_of_plane_in_z3() {
        let rows = vec![vec![1, 1, 0], vec![1, -1, 0], vec![-1, -1, 0]];
        let (rank, ker) = integer_kernel(&rows, 3).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(ker.len(), 1);
        assert_eq!(canonical_primitive(&ker[0]).unwrap(), vec![0, 0, 1]);
    }

    #[test]
    fn kernel_vectors_annihilate_rows() {
        let rows = vec![vec![2, 3, 5, 7], vec![1, -1, 0, 4]];
        let (rank, ker) = integer_kernel(&rows, 4).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(ker.len(), 2);
        for k in &ker {
            for r in &rows {
                assert_eq!(dot(&to_i128(r), k).unwrap(), 0);
            }
        }
    }

    #[test]
    fn full_rank_has_empty_kernel() {
        let rows = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
        let (rank, ker) = integer_kernel(&rows, 2).unwrap();
        assert_eq!(rank, 2);
        assert!(ker.is_empty());
    }
}
