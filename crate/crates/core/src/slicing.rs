//! Hyperplane slices `K ∩ Λ ∩ y⊥` through the origin.
//!
//! The randomized finder draws `y` from the discrete Gaussian on the dual of
//! the John-normalized lattice and accepts once the slice holds at least a
//! `p/2` fraction of the points. Two deterministic oracles (an exhaustive
//! search over spanned hyperplanes and a short-dual-vector search) supply
//! the best achievable ratio for comparison.
//!
//! All counts are exact: a dual vector is carried as its integer coordinates
//! `k` in the dual basis, and `<x, y> = Σ c_i k_i` for a lattice point with
//! coordinates `c`. A linear change of frame `Λ -> TΛ` leaves these dual
//! coordinates unchanged, so sampling in the normalized frame and counting in
//! the original frame agree.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::{Body, Volume};
use crate::enumerate::{ball_point_estimate, enumerate_in_body, for_each_in_ball, PointSet};
use crate::error::{check_dim, Error, Result};
use crate::gaussian::GaussianParam;
use crate::intlin::{self, IntMatrix};
use crate::john::{john_normalize, JohnResult};
use crate::lattice::{integer_normal_of_span, Lattice, Matrix, SpanNormal, Vector};
use crate::sampler::{ExactSampler, KleinSampler, EXACT_SUPPORT_BUDGET};

pub const MAX_ATTEMPTS_CAP: u64 = 1_000_000;
/// Limits of the exhaustive oracle.
pub const EXACT_MAX_POINTS: usize = 2000;
pub const EXACT_MAX_DIM: usize = 6;
pub const EXACT_NODE_BUDGET: u64 = 200_000;
/// Largest number of dual candidates scored by the dual search.
pub const DUAL_SEARCH_BUDGET: f64 = 2e5;
/// Target number of dual vectors enumerated by the default dual search radius.
const DUAL_SEARCH_DEFAULT_COUNT: f64 = 3000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinderConfig {
    /// Scale of the Gaussian width, `s = C vol^{1/(d(d-1))}`.
    pub big_c: f64,
    /// Constant of the acceptance threshold `p = c / (s R)`.
    pub small_c: f64,
    /// Defaults to `10 ⌈1/p⌉` (at least the Las Vegas expectation), capped at 10^6.
    pub max_attempts: Option<u64>,
    pub seed: u64,
    /// Base of the exponential comparison line `α = C^{-d}`.
    pub baseline_c: f64,
}

impl Default for FinderConfig {
    fn default() -> Self {
        FinderConfig { big_c: 2.0, small_c: 0.5, max_attempts: None, seed: 0, baseline_c: 2.0 }
    }
}

impl FinderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.big_c >= 1.0 && self.big_c.is_finite()) {
            return Err(Error::InvalidInput(format!("big_C must be >= 1, got {}", self.big_c)));
        }
        if !(self.small_c > 0.0 && self.small_c <= 1.0) {
            return Err(Error::InvalidInput(format!("small_c must lie in (0, 1], got {}", self.small_c)));
        }
        if self.max_attempts == Some(0) {
            return Err(Error::InvalidInput("max_attempts must be at least 1".into()));
        }
        if !(self.baseline_c > 0.0 && self.baseline_c.is_finite()) {
            return Err(Error::InvalidInput("baseline_c must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceMethod {
    Randomized,
    ExactOracle,
    DualSearch,
    Degenerate,
}

impl fmt::Display for SliceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SliceMethod::Randomized => "randomized",
            SliceMethod::ExactOracle => "exact_oracle",
            SliceMethod::DualSearch => "dual_search",
            SliceMethod::Degenerate => "degenerate",
        })
    }
}

/// The exact fraction `on / total`; equality and order compare values.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SliceRatio {
    pub on: u64,
    pub total: u64,
}

impl SliceRatio {
    pub fn new(on: u64, total: u64) -> Result<Self> {
        if total == 0 || on > total {
            return Err(Error::InvalidInput(format!("invalid ratio {on}/{total}")));
        }
        Ok(SliceRatio { on, total })
    }

    pub fn to_f64(self) -> f64 {
        self.on as f64 / self.total as f64
    }

    pub fn is_one(self) -> bool {
        self.on == self.total
    }

    /// `on / total >= x`, compared exactly against the binary value of `x`.
    pub fn at_least(self, x: f64) -> bool {
        let lhs = BigRational::new(BigInt::from(self.on), BigInt::from(self.total));
        match BigRational::from_float(x) {
            Some(rhs) => lhs >= rhs,
            None => x.is_nan() || x < 0.0,
        }
    }

    /// Reduced numerator and denominator.
    pub fn reduced(self) -> (u64, u64) {
        let g = intlin::ext_gcd(self.on as i128, self.total as i128).0 as u64;
        (self.on / g, self.total / g)
    }
}

impl PartialEq for SliceRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SliceRatio {}

impl PartialOrd for SliceRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SliceRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.on as u128 * other.total as u128).cmp(&(other.on as u128 * self.total as u128))
    }
}

impl fmt::Display for SliceRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.reduced();
        write!(f, "{n}/{d}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceResult {
    /// The dual vector `y` in ambient coordinates.
    pub normal: Vec<f64>,
    /// Integer coordinates of `y` in the dual basis.
    pub normal_coeffs: Vec<i64>,
    pub on_count: u64,
    pub total: u64,
    pub ratio: SliceRatio,
    pub method: SliceMethod,
    pub attempts: Option<u64>,
}

impl SliceResult {
    fn new(lat: &Lattice, coeffs: Vec<i64>, on: usize, total: usize, method: SliceMethod) -> Result<Self> {
        if coeffs.iter().all(|&k| k == 0) {
            return Err(Error::ZeroVector);
        }
        let ratio = SliceRatio::new(on as u64, total as u64)?;
        let normal = lat.dual().point(&coeffs).iter().copied().collect();
        Ok(SliceResult {
            normal,
            normal_coeffs: coeffs,
            on_count: on as u64,
            total: total as u64,
            ratio,
            method,
            attempts: None,
        })
    }
}

/// `s = C vol^{1/(d(d-1))}`, clamped below at 1.
pub fn recommend_s_for_volume(d: usize, vol: f64, big_c: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidInput("no hyperplanes through the origin in dimension 1".into()));
    }
    if !(vol > 0.0 && vol.is_finite()) {
        return Err(Error::InvalidInput(format!("volume must be positive, got {vol}")));
    }
    let exponent = 1.0 / (d * (d - 1)) as f64;
    Ok((big_c * vol.powf(exponent)).max(1.0))
}

pub fn recommend_s<R: Rng + ?Sized>(body: &Body, big_c: f64, rng: &mut R) -> Result<f64> {
    recommend_s_for_volume(body.dim(), body.volume(rng).value, big_c)
}

/// `p = min(1, c / (s R))`.
pub fn threshold_p(circumradius: f64, s: f64, small_c: f64) -> Result<f64> {
    if !(s >= 1.0) {
        return Err(Error::InvalidInput(format!("s must be at least 1, got {s}")));
    }
    if !(circumradius > 0.0) {
        return Err(Error::InvalidInput(format!("circumradius must be positive, got {circumradius}")));
    }
    Ok((small_c / (s * circumradius)).min(1.0))
}

/// Which discrete Gaussian sampler the finder uses.
#[derive(Debug, Clone)]
pub enum DualSampler {
    Klein(KleinSampler),
    Exact(ExactSampler),
}

impl DualSampler {
    /// Klein's sampler when `s` is in its regime, the tabulated one otherwise.
    pub fn for_lattice(lat: &Lattice, s: GaussianParam) -> Result<Self> {
        match KleinSampler::new(lat, s) {
            Ok(k) => Ok(DualSampler::Klein(k)),
            Err(regime @ Error::OutOfRegime { .. }) => {
                let radius = crate::gaussian::truncation_radius(lat, s.value());
                if ball_point_estimate(lat, radius) > EXACT_SUPPORT_BUDGET {
                    return Err(regime);
                }
                Ok(DualSampler::Exact(ExactSampler::new(lat, s)?))
            }
            Err(e) => Err(e),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DualSampler::Klein(_) => "klein",
            DualSampler::Exact(_) => "exact",
        }
    }

    pub fn sample_coeffs<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<i64> {
        match self {
            DualSampler::Klein(k) => k.sample_coeffs(rng),
            DualSampler::Exact(e) => e.sample_coeffs(rng),
        }
    }
}

/// Everything the finder and the report need about one (lattice, body) pair.
#[derive(Debug, Clone)]
pub struct SlicingInstance {
    pub lattice: Lattice,
    pub body: Body,
    pub points: PointSet,
    pub rank: usize,
    pub john: Option<JohnResult>,
    pub volume: Volume,
    /// Circumradius of the (normalized) body used in `p`.
    pub circumradius: f64,
    pub s: f64,
    pub p: f64,
    /// Upper bound on `Pr[y = 0]`: `det(Λ*) s^{-d}` in the normalized frame.
    pub prob_zero_bound: f64,
}

impl SlicingInstance {
    pub fn prepare<R: Rng + ?Sized>(lat: &Lattice, body: &Body, cfg: &FinderConfig, rng: &mut R) -> Result<Self> {
        cfg.validate()?;
        check_dim(lat.dim(), body.dim())?;
        let d = lat.dim();
        let points = enumerate_in_body(lat, body)?;
        let rank = points.rank()?;
        let volume = body.volume(rng);
        let john = match john_normalize(body, rng) {
            Ok(j) => Some(j),
            Err(Error::JohnUnsupported(msg)) => {
                log::warn!("proceeding without John normalization: {msg}");
                None
            }
            Err(e) => return Err(e),
        };
        let circumradius = match &john {
            Some(j) => j.circumradius_after,
            None => body.circumradius(),
        };
        let s = recommend_s_for_volume(d, volume.value, cfg.big_c)?;
        let p = threshold_p(circumradius, s, cfg.small_c)?;
        let prob_zero_bound = s.powi(-(d as i32)) / lat.det_abs();
        Ok(SlicingInstance {
            lattice: lat.clone(),
            body: body.clone(),
            points,
            rank,
            john,
            volume,
            circumradius,
            s,
            p,
            prob_zero_bound,
        })
    }

    /// The same instance with `s` and `p` recomputed for other constants.
    pub fn with_constants(&self, big_c: f64, small_c: f64) -> Result<Self> {
        let d = self.dim();
        let s = recommend_s_for_volume(d, self.volume.value, big_c)?;
        let p = threshold_p(self.circumradius, s, small_c)?;
        let prob_zero_bound = s.powi(-(d as i32)) / self.lattice.det_abs();
        Ok(SlicingInstance { s, p, prob_zero_bound, ..self.clone() })
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn is_degenerate(&self) -> bool {
        self.rank < self.dim()
    }

    /// Dual of the lattice in the normalized frame.
    pub fn sampling_lattice(&self) -> Result<Lattice> {
        match &self.john {
            Some(j) => Ok(self.lattice.transformed(&j.transform)?.dual()),
            None => Ok(self.lattice.dual()),
        }
    }

    /// The proof's requirement `Pr[y = 0] < p/2`.
    pub fn prob_zero_guard(&self) -> bool {
        self.prob_zero_bound < self.p / 2.0
    }

    pub fn default_max_attempts(&self) -> u64 {
        if !self.prob_zero_guard() {
            return MAX_ATTEMPTS_CAP;
        }
        let base = 10.0 * (1.0 / self.p).ceil();
        let las_vegas = (10.0 / (self.p / 2.0 - self.prob_zero_bound)).ceil();
        base.max(las_vegas).min(MAX_ATTEMPTS_CAP as f64) as u64
    }
}

/// Samples `y ~ D_{Λ*,s}` until `y != 0` and the slice holds at least `p/2` of the points.
pub fn randomized_finder<R: Rng + ?Sized>(lat: &Lattice, body: &Body, cfg: &FinderConfig, rng: &mut R) -> Result<SliceResult> {
    let inst = SlicingInstance::prepare(lat, body, cfg, rng)?;
    run_randomized(&inst, cfg, rng).map(|(r, _)| r)
}

/// Finder on a prepared instance; also returns the sampler name.
pub fn run_randomized<R: Rng + ?Sized>(inst: &SlicingInstance, cfg: &FinderConfig, rng: &mut R) -> Result<(SliceResult, &'static str)> {
    if inst.is_degenerate() {
        return Err(Error::NotFullDimensional { rank: inst.rank, dim: inst.dim() });
    }
    let max_attempts = match cfg.max_attempts {
        Some(m) => m,
        None => {
            if !inst.prob_zero_guard() {
                log::warn!(
                    "Pr[y = 0] bound {:.3e} is not below p/2 = {:.3e}; using {} attempts",
                    inst.prob_zero_bound,
                    inst.p / 2.0,
                    MAX_ATTEMPTS_CAP
                );
            }
            inst.default_max_attempts()
        }
    };
    let sampler = DualSampler::for_lattice(&inst.sampling_lattice()?, GaussianParam::new(inst.s)?)?;
    let half_p = inst.p / 2.0;
    let total = inst.points.len();
    for attempt in 1..=max_attempts {
        let k = sampler.sample_coeffs(rng);
        if k.iter().all(|&x| x == 0) {
            continue;
        }
        let on = inst.points.count_orthogonal(&k)?;
        let ratio = SliceRatio::new(on as u64, total as u64)?;
        if ratio.at_least(half_p) {
            let mut res = SliceResult::new(&inst.lattice, k, on, total, SliceMethod::Randomized)?;
            res.attempts = Some(attempt);
            return Ok((res, sampler.name()));
        }
    }
    Err(Error::AttemptsExhausted(max_attempts))
}

/// A dual vector orthogonal to the whole (rank-deficient) point set.
pub fn degenerate_hyperplane(lat: &Lattice, ps: &PointSet) -> Result<SliceResult> {
    match integer_normal_of_span(lat, ps.coeffs())? {
        SpanNormal::FullRank => Err(Error::FullRank),
        SpanNormal::Normal { coeffs, .. } => {
            let on = ps.count_orthogonal(&coeffs)?;
            if on != ps.len() {
                return Err(Error::Internal("normal of span misses a point".into()));
            }
            SliceResult::new(lat, coeffs, on, ps.len().max(1), SliceMethod::Degenerate).map(|mut r| {
                if ps.is_empty() {
                    r.on_count = 1;
                    r.total = 1;
                    r.ratio = SliceRatio { on: 1, total: 1 };
                }
                r
            })
        }
    }
}

type Dir = (Vec<i128>, u64);

/// Groups nonzero coefficient vectors by line through the origin.
fn directions(coeffs: &[Vec<i64>]) -> (Vec<Dir>, u64) {
    let mut zero = 0u64;
    let mut map: BTreeMap<Vec<i128>, u64> = BTreeMap::new();
    for c in coeffs {
        match intlin::canonical_primitive(&intlin::to_i128(c)) {
            Some(p) => *map.entry(p).or_default() += 1,
            None => zero += 1,
        }
    }
    (sort_dirs(map), zero)
}

fn sort_dirs(map: BTreeMap<Vec<i128>, u64>) -> Vec<Dir> {
    let mut v: Vec<Dir> = map.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

struct ExactSearch<'a> {
    all: &'a [Dir],
    zero: u64,
    best: Option<(u64, Vec<i128>)>,
    nodes: u64,
    budget: u64,
}

impl ExactSearch<'_> {
    fn true_count(&self, k: &[i128]) -> Result<u64> {
        let mut on = self.zero;
        for (dir, w) in self.all {
            if intlin::dot(dir, k)? == 0 {
                on += w;
            }
        }
        Ok(on)
    }

    fn offer(&mut self, k: Vec<i128>) -> Result<()> {
        let Some(k) = intlin::canonical_primitive(&k) else { return Ok(()) };
        let on = self.true_count(&k)?;
        let better = match &self.best {
            None => true,
            Some((w, b)) => on > *w || (on == *w && k < *b),
        };
        if better {
            self.best = Some((on, k));
        }
        Ok(())
    }

    fn best_weight(&self) -> u64 {
        self.best.as_ref().map_or(0, |b| b.0)
    }

    /// Hyperplanes of the quotient lattice whose first (in list order)
    /// contained direction is the pivot; earlier directions are dropped.
    fn visit(&mut self, dirs: &[Dir], dim: usize, forced: u64, stack: &mut Vec<IntMatrix>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!("exact oracle exceeded {} search nodes", self.budget)));
        }
        if dim == 1 || dirs.is_empty() {
            let mut k = vec![0i128; dim];
            k[0] = 1;
            return self.offer(lift(stack, k)?);
        }
        if dim == 2 {
            // every direction spans its own line
            for (v, w) in dirs {
                if forced + w < self.best_weight() {
                    break;
                }
                self.offer(lift(stack, vec![v[1], -v[0]])?)?;
            }
            return Ok(());
        }
        let mut suffix: Vec<u64> = dirs.iter().rev().scan(0u64, |acc, d| { *acc += d.1; Some(*acc) }).collect();
        suffix.reverse();
        for i in 0..dirs.len() {
            if forced + suffix[i] < self.best_weight() {
                break;
            }
            let (pivot, w) = &dirs[i];
            let m = intlin::unimodular_to_e1(pivot)?;
            let mut next_forced = forced + w;
            let mut map: BTreeMap<Vec<i128>, u64> = BTreeMap::new();
            for (dir, wj) in &dirs[i + 1..] {
                let img = m.mul_vec(dir)?;
                match intlin::canonical_primitive(&img[1..]) {
                    Some(p) => *map.entry(p).or_default() += wj,
                    None => next_forced += wj,
                }
            }
            stack.push(m);
            let r = self.visit(&sort_dirs(map), dim - 1, next_forced, stack);
            stack.pop();
            r?;
        }
        Ok(())
    }
}

/// Maps a normal of the innermost quotient back to dual coordinates of the full lattice.
fn lift(stack: &[IntMatrix], mut k: Vec<i128>) -> Result<Vec<i128>> {
    for m in stack.iter().rev() {
        let mut full = Vec::with_capacity(k.len() + 1);
        full.push(0);
        full.extend_from_slice(&k);
        k = m.transpose_mul_vec(&full)?;
    }
    Ok(k)
}

/// Exhaustive best slice of a point set, with an explicit node budget.
///
/// Searches every hyperplane spanned by points: a hyperplane is reached from
/// its first contained direction, the lattice is quotiented by that
/// direction (a unimodular map sends it to `e_1`) and the search recurses in
/// one dimension less. Branches whose remaining weight cannot reach the best
/// count are pruned. Ties go to the lexicographically smallest primitive normal.
pub fn best_slice_exact_points(lat: &Lattice, ps: &PointSet, node_budget: u64) -> Result<SliceResult> {
    let d = lat.dim();
    check_dim(d, ps.dim())?;
    if ps.len() > EXACT_MAX_POINTS || d > EXACT_MAX_DIM {
        return Err(Error::BudgetExceeded(format!(
            "exact oracle supports at most {EXACT_MAX_POINTS} points in dimension <= {EXACT_MAX_DIM}"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidInput("no hyperplanes through the origin in dimension 1".into()));
    }
    let (dirs, zero) = directions(ps.coeffs());
    let mut search = ExactSearch { all: &dirs, zero, best: None, nodes: 0, budget: node_budget };
    for i in 0..d {
        let mut e = vec![0i128; d];
        e[i] = 1;
        search.offer(e)?;
    }
    search.visit(&dirs, d, zero, &mut Vec::new())?;
    let (on, k) = search.best.ok_or(Error::NoCandidates)?;
    SliceResult::new(lat, intlin::to_i64(&k)?, on as usize, ps.len(), SliceMethod::ExactOracle)
}

/// Ground-truth best slice of `K ∩ Λ`.
pub fn best_slice_exact(lat: &Lattice, body: &Body) -> Result<SliceResult> {
    let ps = enumerate_in_body(lat, body)?;
    best_slice_exact_points(lat, &ps, EXACT_NODE_BUDGET)
}

/// Scores every primitive dual vector of norm at most `norm_bound`.
pub fn best_slice_dual_search_points(lat: &Lattice, ps: &PointSet, norm_bound: f64) -> Result<SliceResult> {
    check_dim(lat.dim(), ps.dim())?;
    let dual = lat.dual();
    let estimate = ball_point_estimate(&dual, norm_bound);
    if estimate > DUAL_SEARCH_BUDGET {
        return Err(Error::BudgetExceeded(format!("dual search over about {estimate:.3e} vectors")));
    }
    let mut candidates: Vec<Vec<i64>> = Vec::new();
    for_each_in_ball(&dual, None, norm_bound, (DUAL_SEARCH_BUDGET * 50.0) as u64, |k, n2| {
        if n2 > norm_bound * norm_bound {
            return;
        }
        let ki = intlin::to_i128(k);
        if let Some(p) = intlin::canonical_primitive(&ki) {
            if p == ki {
                candidates.push(k.to_vec());
            }
        }
    })?;
    candidates.sort();
    let mut best: Option<(usize, Vec<i64>)> = None;
    for k in candidates {
        let on = ps.count_orthogonal(&k)?;
        if best.as_ref().is_none_or(|(b, _)| on > *b) {
            best = Some((on, k));
        }
    }
    let (on, k) = best.ok_or(Error::NoCandidates)?;
    SliceResult::new(lat, k, on, ps.len(), SliceMethod::DualSearch)
}

pub fn best_slice_dual_search(lat: &Lattice, body: &Body, norm_bound: f64) -> Result<SliceResult> {
    let ps = enumerate_in_body(lat, body)?;
    best_slice_dual_search_points(lat, &ps, norm_bound)
}

/// Dual radius expected to hold a few thousand dual vectors.
pub fn default_dual_norm_bound(lat: &Lattice) -> f64 {
    let d = lat.dim() as i32;
    let dual_det = 1.0 / lat.det_abs();
    let r = (DUAL_SEARCH_DEFAULT_COUNT * dual_det / crate::bodies::unit_ball_volume(lat.dim())).powf(1.0 / d as f64);
    let shortest = lat.dual().gram_schmidt_norms()[0].max(lat.dual_basis().row(0).norm());
    r.max(shortest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub version: String,
    pub body_id: String,
    pub d: usize,
    pub vol: f64,
    pub vol_err: f64,
    /// Circumradius after John normalization (before, if normalization was unavailable).
    pub circumradius: f64,
    pub john_applied: bool,
    pub s_used: f64,
    pub p_threshold: f64,
    pub prob_zero_bound: f64,
    pub prob_zero_guard: bool,
    pub points: u64,
    pub rank: usize,
    pub degenerate: bool,
    pub best_ratio: SliceRatio,
    pub best_method: SliceMethod,
    pub best_normal: Vec<i64>,
    pub ratio_randomized: Option<SliceRatio>,
    pub randomized_normal: Option<Vec<i64>>,
    pub attempts: Option<u64>,
    pub sampler: Option<String>,
    /// `best_ratio · d · vol^{1/(d-1)}`, when `best_ratio < 1`.
    pub implied_c_theorem: Option<f64>,
    pub implied_c_theorem_err: Option<f64>,
    /// `best_ratio · vol^{1/d}`, when `K ∩ Λ` spans R^d.
    pub implied_alpha_q1: Option<f64>,
    pub implied_alpha_q1_err: Option<f64>,
    pub baseline_c: f64,
    /// `best_ratio · C^d`.
    pub exponential_baseline: f64,
}

fn implied_quantities(best: SliceRatio, d: usize, vol: f64, vol_err: f64, full_rank: bool) -> (Option<f64>, Option<f64>, Option<f64>, Option<f64>) {
    let r = best.to_f64();
    let df = d as f64;
    let rel = vol_err / vol;
    let (c, c_err) = if best.is_one() {
        (None, None)
    } else {
        let c = r * df * vol.powf(1.0 / (df - 1.0));
        (Some(c), Some(c * rel / (df - 1.0)))
    };
    let (a, a_err) = if full_rank {
        let a = r * vol.powf(1.0 / df);
        (Some(a), Some(a * rel / df))
    } else {
        (None, None)
    };
    (c, c_err, a, a_err)
}

impl BoundReport {
    /// Recomputes the derived fields and checks them to 1e-9.
    pub fn check_consistency(&self) -> Result<()> {
        let (c, _, a, _) = implied_quantities(self.best_ratio, self.d, self.vol, self.vol_err, !self.degenerate);
        let close = |x: Option<f64>, y: Option<f64>| match (x, y) {
            (Some(x), Some(y)) => (x - y).abs() <= 1e-9 * x.abs().max(1.0),
            (None, None) => true,
            _ => false,
        };
        let baseline = self.best_ratio.to_f64() * self.baseline_c.powi(self.d as i32);
        if !close(c, self.implied_c_theorem)
            || !close(a, self.implied_alpha_q1)
            || !close(Some(baseline), Some(self.exponential_baseline))
        {
            return Err(Error::Internal("bound report fields are inconsistent".into()));
        }
        if let Some(r) = self.ratio_randomized {
            if r > self.best_ratio {
                return Err(Error::Internal("randomized ratio exceeds best ratio".into()));
            }
        }
        Ok(())
    }
}

/// Full pipeline on one body: normalize, enumerate, run the randomized
/// finder and the best available oracle, and fill a [`BoundReport`].
pub fn verify_bound<R: Rng + ?Sized>(lat: &Lattice, body: &Body, cfg: &FinderConfig, rng: &mut R) -> Result<BoundReport> {
    let inst = SlicingInstance::prepare(lat, body, cfg, rng)?;
    verify_prepared(&inst, cfg, rng, "")
}

pub fn verify_prepared<R: Rng + ?Sized>(inst: &SlicingInstance, cfg: &FinderConfig, rng: &mut R, body_id: &str) -> Result<BoundReport> {
    let d = inst.dim();
    let lat = &inst.lattice;
    let (best, randomized, sampler) = if inst.is_degenerate() {
        (degenerate_hyperplane(lat, &inst.points)?, None, None)
    } else {
        let (rand_res, sampler) = run_randomized(inst, cfg, rng)?;
        let best = match best_slice_exact_points(lat, &inst.points, EXACT_NODE_BUDGET) {
            Ok(b) => b,
            Err(Error::BudgetExceeded(msg)) => {
                log::info!("exact oracle unavailable ({msg}); using dual search");
                let y = Vector::from_vec(rand_res.normal.clone());
                let bound = default_dual_norm_bound(lat).max(y.norm() * (1.0 + 1e-9));
                best_slice_dual_search_points(lat, &inst.points, bound)?
            }
            Err(e) => return Err(e),
        };
        if best.ratio < rand_res.ratio {
            return Err(Error::Internal(format!(
                "oracle ratio {} below randomized ratio {}",
                best.ratio, rand_res.ratio
            )));
        }
        (best, Some(rand_res), Some(sampler))
    };
    let (c, c_err, a, a_err) = implied_quantities(best.ratio, d, inst.volume.value, inst.volume.std_error, !inst.is_degenerate());
    let report = BoundReport {
        version: crate::VERSION.to_string(),
        body_id: body_id.to_string(),
        d,
        vol: inst.volume.value,
        vol_err: inst.volume.std_error,
        circumradius: inst.circumradius,
        john_applied: inst.john.is_some(),
        s_used: inst.s,
        p_threshold: inst.p,
        prob_zero_bound: inst.prob_zero_bound,
        prob_zero_guard: inst.prob_zero_guard(),
        points: inst.points.len() as u64,
        rank: inst.rank,
        degenerate: inst.is_degenerate(),
        best_ratio: best.ratio,
        best_method: best.method,
        best_normal: best.normal_coeffs.clone(),
        ratio_randomized: randomized.as_ref().map(|r| r.ratio),
        randomized_normal: randomized.as_ref().map(|r| r.normal_coeffs.clone()),
        attempts: randomized.as_ref().and_then(|r| r.attempts),
        sampler: sampler.map(str::to_string),
        implied_c_theorem: c,
        implied_c_theorem_err: c_err,
        implied_alpha_q1: a,
        implied_alpha_q1_err: a_err,
        baseline_c: cfg.baseline_c,
        exponential_baseline: best.ratio.to_f64() * cfg.baseline_c.powi(d as i32),
    };
    report.check_consistency()?;
    Ok(report)
}

/// `T` used by the instance, identity when normalization was skipped.
pub fn instance_transform(inst: &SlicingInstance) -> Matrix {
    inst.john
        .as_ref()
        .map(|j| j.transform.clone())
        .unwrap_or_else(|| Matrix::identity(inst.dim(), inst.dim()))
}
