//! Discrete Gaussian samplers on lattices.
//!
//! [`ExactSampler`] tabulates `D_{Λ,s}` on the theta truncation ball and
//! samples by inversion. [`KleinSampler`] walks the Gram-Schmidt basis
//! backwards, drawing one integer per level from a one-dimensional discrete
//! Gaussian around the conditional centre.

use std::collections::BTreeMap;

use rand::Rng;

use crate::enumerate::{ball_point_estimate, for_each_in_ball};
use crate::error::{Error, Result};
use crate::gaussian::{truncation_radius, CompensatedSum, GaussianParam};
use crate::lattice::{Lattice, Vector};

/// Largest support tabulated by the exact sampler.
pub const EXACT_SUPPORT_BUDGET: f64 = 2e7;
/// The one-dimensional sampler draws from `[c - 12 s, c + 12 s]`.
pub const TAIL_CUT: f64 = 12.0;

/// Samples `z ∈ Z` with probability proportional to `ρ_s(z - center)` by
/// rejection from the uniform distribution on the truncated window.
pub fn sample_integer<R: Rng + ?Sized>(center: f64, s: f64, rng: &mut R) -> i64 {
    let lo = (center - TAIL_CUT * s).ceil() as i64;
    let hi = (center + TAIL_CUT * s).floor() as i64;
    if lo >= hi {
        return center.round() as i64;
    }
    loop {
        let z = rng.gen_range(lo..=hi);
        let y = z as f64 - center;
        let accept = (-std::f64::consts::PI * y * y / (s * s)).exp();
        if rng.gen::<f64>() < accept {
            return z;
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExactSampler {
    lattice: Lattice,
    dim: usize,
    coeffs: Vec<i64>,
    cumulative: Vec<f64>,
    index: BTreeMap<Vec<i64>, usize>,
}

impl ExactSampler {
    pub fn new(lat: &Lattice, s: GaussianParam) -> Result<Self> {
        let radius = truncation_radius(lat, s.value());
        let estimate = ball_point_estimate(lat, radius);
        if estimate > EXACT_SUPPORT_BUDGET {
            return Err(Error::ThetaTooExpensive(format!(
                "exact sampler support of about {estimate:.3e} points"
            )));
        }
        let d = lat.dim();
        let mut entries: Vec<(Vec<i64>, f64)> = Vec::new();
        let s2 = s.value() * s.value();
        for_each_in_ball(lat, None, radius, (EXACT_SUPPORT_BUDGET * 20.0) as u64, |z, n2| {
            entries.push((z.to_vec(), (-std::f64::consts::PI * n2 / s2).exp()));
        })
        .map_err(|e| match e {
            Error::BudgetExceeded(m) => Error::ThetaTooExpensive(m),
            other => other,
        })?;
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut coeffs = Vec::with_capacity(entries.len() * d);
        let mut cumulative = Vec::with_capacity(entries.len());
        let mut acc = CompensatedSum::default();
        let mut index = BTreeMap::new();
        for (i, (z, w)) in entries.into_iter().enumerate() {
            acc.add(w);
            cumulative.push(acc.value());
            coeffs.extend_from_slice(&z);
            index.insert(z, i);
        }
        Ok(ExactSampler { lattice: lat.clone(), dim: d, coeffs, cumulative, index })
    }

    pub fn support_len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn support(&self) -> impl Iterator<Item = &[i64]> {
        self.coeffs.chunks(self.dim)
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().expect("support contains the origin")
    }

    /// Probability of the lattice point with the given coordinates.
    pub fn probability(&self, coeffs: &[i64]) -> f64 {
        match self.index.get(coeffs) {
            Some(&i) => {
                let prev = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
                (self.cumulative[i] - prev) / self.total()
            }
            None => 0.0,
        }
    }

    pub fn sample_coeffs<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<i64> {
        let u = rng.gen::<f64>() * self.total();
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1);
        self.coeffs[i * self.dim..(i + 1) * self.dim].to_vec()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        self.lattice.point(&self.sample_coeffs(rng))
    }
}

/// One draw from `D_{Λ,s}` with the exact sampler.
pub fn exact_sampler<R: Rng + ?Sized>(lat: &Lattice, s: GaussianParam, rng: &mut R) -> Result<Vector> {
    Ok(ExactSampler::new(lat, s)?.sample(rng))
}

#[derive(Debug, Clone)]
pub struct KleinSampler {
    lattice: Lattice,
    s: f64,
}

impl KleinSampler {
    /// Requires `s >= max_i |b~_i|`.
    pub fn new(lat: &Lattice, s: GaussianParam) -> Result<Self> {
        let max_gs = lat.gram_schmidt_norms().iter().cloned().fold(0.0, f64::max);
        if s.value() < max_gs {
            return Err(Error::OutOfRegime { s: s.value(), max_gs });
        }
        Ok(KleinSampler { lattice: lat.clone(), s: s.value() })
    }

    pub fn sample_coeffs<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<i64> {
        let d = self.lattice.dim();
        let mu = self.lattice.mu();
        let gs = self.lattice.gram_schmidt_norms();
        let mut z = vec![0i64; d];
        for i in (0..d).rev() {
            // centre the b~_i component of sum_{j >= i} z_j b_j at zero
            let c: f64 = -(i + 1..d).map(|j| z[j] as f64 * mu[(j, i)]).sum::<f64>();
            z[i] = sample_integer(c, self.s / gs[i], rng);
        }
        z
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        self.lattice.point(&self.sample_coeffs(rng))
    }
}

/// One draw with Klein's sampler; errors outside its regime.
pub fn klein_sampler<R: Rng + ?Sized>(lat: &Lattice, s: GaussianParam, rng: &mut R) -> Result<Vector> {
    Ok(KleinSampler::new(lat, s)?.sample(rng))
}

/// Empirical total-variation distance between two samples, with every point
/// of reference mass below `min_mass` lumped into a single bin.
pub fn empirical_tv(a: &[Vec<i64>], b: &[Vec<i64>], reference: &ExactSampler, min_mass: f64) -> f64 {
    fn hist<'a>(xs: &'a [Vec<i64>], reference: &ExactSampler, min_mass: f64) -> BTreeMap<Option<&'a [i64]>, f64> {
        let mut h = BTreeMap::new();
        for x in xs {
            let key = (reference.probability(x) >= min_mass).then_some(x.as_slice());
            *h.entry(key).or_default() += 1.0 / xs.len() as f64;
        }
        h
    }
    let (ha, hb) = (hist(a, reference, min_mass), hist(b, reference, min_mass));
    let keys: std::collections::BTreeSet<_> = ha.keys().chain(hb.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (ha.get(k).unwrap_or(&0.0) - hb.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::prob_zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gp(s: f64) -> GaussianParam {
        GaussianParam::new(s).unwrap()
    }

    #[test]
    fn exact_zero_frequency_on_z2() {
        let z2 = Lattice::integer(2);
        let sampler = ExactSampler::new(&z2, gp(1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let zeros = (0..n).filter(|_| sampler.sample_coeffs(&mut rng) == [0, 0]).count();
        let p = prob_zero(&z2, gp(1.0)).unwrap();
        assert!((p - 0.92044179f64.powi(2)).abs() < 1e-7);
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((zeros as f64 / n as f64 - p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn exact_ratio_of_neighbours_on_z1() {
        let sampler = ExactSampler::new(&Lattice::integer(1), gp(1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let (mut c0, mut c1) = (0.0f64, 0.0f64);
        let (mut plus, mut minus) = (0.0f64, 0.0f64);
        for _ in 0..n {
            match sampler.sample_coeffs(&mut rng)[0] {
                0 => c0 += 1.0,
                1 => {
                    c1 += 1.0;
                    plus += 1.0
                }
                -1 => {
                    c1 += 1.0;
                    minus += 1.0
                }
                _ => {}
            }
        }
        let r = c1 / c0;
        let target = 2.0 * (-std::f64::consts::PI).exp();
        // delta method for a ratio of multinomial counts
        let sigma = r * (1.0 / c1 + 1.0 / c0).sqrt();
        assert!((r - target).abs() <= 3.0 * sigma);
        let sym_sigma = (plus + minus).sqrt();
        assert!((plus - minus).abs() <= 3.0 * sym_sigma);
    }

    #[test]
    fn klein_regime_check() {
        let lat = Lattice::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(KleinSampler::new(&lat, gp(2.0)), Err(Error::OutOfRegime { .. })));
        assert!(KleinSampler::new(&lat, gp(3.0)).is_ok());
    }

    #[test]
    fn klein_marginals_on_z2() {
        let z2 = Lattice::integer(2);
        let klein = KleinSampler::new(&z2, gp(1.0)).unwrap();
        let exact1 = ExactSampler::new(&Lattice::integer(1), gp(1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let ks: Vec<Vec<i64>> = (0..n).map(|_| klein.sample_coeffs(&mut rng)).collect();
        let ex: Vec<Vec<i64>> = (0..n).map(|_| exact1.sample_coeffs(&mut rng)).collect();
        for coord in 0..2 {
            let marginal: Vec<Vec<i64>> = ks.iter().map(|z| vec![z[coord]]).collect();
            assert!(empirical_tv(&marginal, &ex, &exact1, 0.0) <= 0.02);
        }
    }

    #[test]
    fn klein_output_is_lattice_point() {
        let lat = Lattice::from_rows(&[vec![1.0, 0.5, 0.0], vec![0.2, 1.1, 0.3], vec![0.0, 0.4, 0.9]]).unwrap();
        let klein = KleinSampler::new(&lat, gp(2.5)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let x = klein.sample(&mut rng);
            let c = lat.coordinates(&x);
            assert!(c.iter().all(|v| (v - v.round()).abs() < 1e-9));
        }
    }

    #[test]
    fn one_dimensional_sampler_is_deterministic_per_stream() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<i64> = (0..50).map(|_| sample_integer(0.3, 2.0, &mut a)).collect();
        let ys: Vec<i64> = (0..50).map(|_| sample_integer(0.3, 2.0, &mut b)).collect();
        assert_eq!(xs, ys);
    }
}
