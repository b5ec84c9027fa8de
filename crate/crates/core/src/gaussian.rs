//! Gaussian mass `ρ_s(x) = exp(-π |x|² / s²)` on points, lattices and cosets.
//!
//! Theta sums are computed by Fincke-Pohst enumeration of a ball whose
//! radius is chosen so that a rigorous tail bound on the omitted mass is
//! below [`TAIL_TARGET`]. The bound uses the node-count estimate
//! `#{x in Λ + c : |x| <= r} <= Π_i (1 + 2r / |b~_i|)` summed over shells.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::enumerate::{ball_point_estimate, for_each_in_ball};
use crate::error::{check_dim, Error, Result};
use crate::lattice::{Lattice, Vector};

/// Absolute bound on the Gaussian mass omitted by truncation.
pub const TAIL_TARGET: f64 = 1e-16;
/// Largest number of lattice points a theta sum may enumerate.
pub const THETA_TERM_BUDGET: f64 = 1e8;
const THETA_NODE_BUDGET: u64 = 400_000_000;

/// Width parameter `s > 0` of `ρ_s`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct GaussianParam(f64);

impl GaussianParam {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s > 0.0 {
            Ok(GaussianParam(s))
        } else {
            Err(Error::InvalidInput(format!("gaussian parameter must be positive and finite, got {s}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaResult {
    pub value: f64,
    pub truncation_radius: f64,
    pub terms_used: u64,
    /// Upper bound on the mass of all omitted terms.
    pub tail_bound: f64,
}

pub fn rho(x: &Vector, s: GaussianParam) -> f64 {
    rho_sq(x.norm_squared(), s.0)
}

#[inline]
fn rho_sq(norm_sq: f64, s: f64) -> f64 {
    (-std::f64::consts::PI * norm_sq / (s * s)).exp()
}

/// Neumaier compensated summation.
#[derive(Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Rigorous bound on `ρ_s` mass of lattice (or coset) points farther than `r`.
pub fn tail_bound(lat: &Lattice, s: f64, r: f64) -> f64 {
    let h = s / 2.0;
    let log_count = |rad: f64| -> f64 {
        lat.gram_schmidt_norms().iter().map(|g| (1.0 + 2.0 * rad / g).ln()).sum()
    };
    let mut total = 0.0;
    for k in 0..100_000u32 {
        let inner = r + k as f64 * h;
        let log_term = log_count(inner + h) - std::f64::consts::PI * inner * inner / (s * s);
        let term = log_term.exp();
        total += term;
        if k > 2 && term < 1e-40 * total.max(1e-300) {
            break;
        }
    }
    total
}

/// Smallest radius (on a grid of step `s/8`) whose tail bound is below [`TAIL_TARGET`].
pub fn truncation_radius(lat: &Lattice, s: f64) -> f64 {
    let step = s / 8.0;
    let mut r = step;
    while tail_bound(lat, s, r) > TAIL_TARGET {
        r += step;
    }
    r
}

fn gaussian_sum(lat: &Lattice, center: Option<&Vector>, s: GaussianParam) -> Result<ThetaResult> {
    let s = s.0;
    let radius = truncation_radius(lat, s);
    let estimate = ball_point_estimate(lat, radius);
    if estimate > THETA_TERM_BUDGET {
        return Err(Error::ThetaTooExpensive(format!(
            "about {estimate:.3e} terms needed (s = {s}, det = {:.3e})",
            lat.det_abs()
        )));
    }
    let mut sum = CompensatedSum::default();
    let mut terms = 0u64;
    for_each_in_ball(lat, center, radius, THETA_NODE_BUDGET, |_, norm_sq| {
        sum.add(rho_sq(norm_sq, s));
        terms += 1;
    })
    .map_err(|e| match e {
        Error::BudgetExceeded(m) => Error::ThetaTooExpensive(m),
        other => other,
    })?;
    Ok(ThetaResult {
        value: sum.value(),
        truncation_radius: radius,
        terms_used: terms,
        tail_bound: tail_bound(lat, s, radius),
    })
}

/// `ρ_s(Λ) = Σ_{x ∈ Λ} ρ_s(x)`.
pub fn theta(lat: &Lattice, s: GaussianParam) -> Result<ThetaResult> {
    gaussian_sum(lat, None, s)
}

/// `ρ_s(Λ + shift)`.
pub fn shifted_theta(lat: &Lattice, shift: &Vector, s: GaussianParam) -> Result<ThetaResult> {
    check_dim(lat.dim(), shift.len())?;
    let center = -shift;
    gaussian_sum(lat, Some(&center), s)
}

/// Relative residual `|lhs - rhs| / lhs` of the Poisson summation identity
/// `ρ_s(Λ) = det(Λ)^{-1} s^d ρ_{1/s}(Λ*)`, both sides summed independently.
pub fn poisson_check(lat: &Lattice, s: GaussianParam) -> Result<f64> {
    let lhs = theta(lat, s)?.value;
    let dual_s = GaussianParam::new(1.0 / s.0)?;
    let rhs = s.0.powi(lat.dim() as i32) / lat.det_abs() * theta(&lat.dual(), dual_s)?.value;
    Ok((lhs - rhs).abs() / lhs)
}

/// Probability of the origin under `D_{Λ,s}`, i.e. `1 / ρ_s(Λ)`.
pub fn prob_zero(lat: &Lattice, s: GaussianParam) -> Result<f64> {
    Ok(1.0 / theta(lat, s)?.value)
}

/// `ρ_t(Z)` for `t > 0`.
pub fn rho_integers(t: f64) -> Result<f64> {
    Ok(theta(&Lattice::integer(1), GaussianParam::new(t)?)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthBound {
    /// `ρ_{s|x|}(Z)^{-1}`.
    pub exact: f64,
    /// `min(1, (s|x|)^{-1})`, without the absolute constant.
    pub closed_form: f64,
}

/// Lower bound on `Pr_{y ~ D_{Λ*,s}}[<x, y> = 0]` for a lattice vector of norm `x_norm`.
pub fn orth_prob_lower_bound(x_norm: f64, s: GaussianParam) -> Result<OrthBound> {
    if !(x_norm > 0.0 && x_norm.is_finite()) {
        return Err(Error::InvalidInput(format!("x_norm must be positive, got {x_norm}")));
    }
    let t = s.0 * x_norm;
    Ok(OrthBound { exact: 1.0 / rho_integers(t)?, closed_form: (1.0 / t).min(1.0) })
}

/// Gaussian mass of `Λ*` split by the integer value of `<x, y>` for a fixed
/// `x ∈ Λ` (given by its lattice coordinates).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerMasses {
    pub layers: BTreeMap<i64, f64>,
    pub total: f64,
}

impl LayerMasses {
    /// Mass of the hyperplane layer `<x, y> = 0` relative to the whole dual lattice.
    pub fn zero_fraction(&self) -> f64 {
        self.layers.get(&0).copied().unwrap_or(0.0) / self.total
    }
}

pub fn orthogonal_layer_masses(lat: &Lattice, x_coeffs: &[i64], s: GaussianParam) -> Result<LayerMasses> {
    check_dim(lat.dim(), x_coeffs.len())?;
    let dual = lat.dual();
    let radius = truncation_radius(&dual, s.0);
    let estimate = ball_point_estimate(&dual, radius);
    if estimate > THETA_TERM_BUDGET {
        return Err(Error::ThetaTooExpensive(format!("about {estimate:.3e} dual terms")));
    }
    let mut sums: BTreeMap<i64, CompensatedSum> = BTreeMap::new();
    let mut total = CompensatedSum::default();
    for_each_in_ball(&dual, None, radius, THETA_NODE_BUDGET, |k, norm_sq| {
        // <x, y> = sum c_i k_i because <b_i, b*_j> = delta_ij
        let layer: i64 = x_coeffs.iter().zip(k).map(|(c, k)| c * k).sum();
        let w = rho_sq(norm_sq, s.0);
        sums.entry(layer).or_default().add(w);
        total.add(w);
    })?;
    Ok(LayerMasses {
        layers: sums.into_iter().map(|(k, v)| (k, v.value())).collect(),
        total: total.value(),
    })
}
