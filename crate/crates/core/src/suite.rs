//! The standard body suite and the constants calibration sweep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Matrix};
use crate::slicing::{run_randomized, verify_prepared, BoundReport, FinderConfig, SlicingInstance};

#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub id: String,
    pub body: Body,
}

impl SuiteEntry {
    fn new(id: impl Into<String>, body: Body) -> Self {
        SuiteEntry { id: id.into(), body }
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }
}

fn rotation(d: usize, i: usize, j: usize, angle: f64) -> Matrix {
    let mut r = Matrix::identity(d, d);
    let (s, c) = angle.sin_cos();
    r[(i, i)] = c;
    r[(j, j)] = c;
    r[(i, j)] = -s;
    r[(j, i)] = s;
    r
}

/// `|<n_i, x>| <= b_i` with `2d` random normals; seeded, so the suite is fixed.
fn random_hpolytope(d: usize, seed: u64) -> Body {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 2 * d;
    let normals = Matrix::from_fn(m, d, |_, _| rng.gen_range(-1.0..1.0));
    let offsets = (0..m).map(|_| rng.gen_range(1.0..2.0)).collect();
    Body::hpolytope(normals, offsets).expect("random normals span")
}

/// Cubes, cross-polytopes, balls, boxes, a skewed ellipsoid, random
/// H-polytopes, a rotated cross-polytope and two thin boxes whose lattice
/// points are rank deficient. Dimensions 2 to 6.
pub fn standard_suite() -> Vec<SuiteEntry> {
    let mut out = Vec::new();
    for d in 2..=6 {
        out.push(SuiteEntry::new(format!("cube_d{d}"), Body::cuboid(vec![1.0; d]).unwrap()));
    }
    for d in 2..=6 {
        out.push(SuiteEntry::new(format!("cross_d{d}"), Body::cross_polytope(vec![1.0; d]).unwrap()));
    }
    // vol = 10^2
    let r2 = (100.0 / std::f64::consts::PI).sqrt();
    out.push(SuiteEntry::new("ball_d2_vol100", Body::ball(2, r2).unwrap()));
    out.push(SuiteEntry::new("ball_d3_r1.5", Body::ball(3, 1.5).unwrap()));
    out.push(SuiteEntry::new("ball_d4_r1.2", Body::ball(4, 1.2).unwrap()));
    // vol = 10^3
    out.push(SuiteEntry::new("box_d3_vol1000", Body::cuboid(vec![5.0; 3]).unwrap()));
    out.push(SuiteEntry::new("box_d4", Body::cuboid(vec![2.0, 1.0, 1.0, 1.0]).unwrap()));
    let axes = Matrix::from_diagonal(&crate::lattice::Vector::from_vec(vec![1.0 / 9.0, 1.0 / 1.44, 1.0]));
    let rot = rotation(3, 0, 1, 0.4) * rotation(3, 1, 2, 0.7);
    let skew = &rot * axes * rot.transpose();
    out.push(SuiteEntry::new("ellipsoid_d3_skew", Body::ellipsoid((&skew + skew.transpose()) * 0.5).unwrap()));
    out.push(SuiteEntry::new("hpoly_d3", random_hpolytope(3, 31)));
    out.push(SuiteEntry::new("hpoly_d4", random_hpolytope(4, 41)));
    let shear = Matrix::from_row_slice(3, 3, &[1.0, 0.5, 0.0, 0.0, 1.0, 0.3, 0.2, 0.0, 1.0]);
    out.push(SuiteEntry::new(
        "cross_d3_rotated",
        Body::cross_polytope(vec![2.5, 2.0, 1.5]).unwrap().apply_transform(&(rotation(3, 0, 2, 0.5) * shear)).unwrap(),
    ));
    out.push(SuiteEntry::new("thin_box_d2", Body::cuboid(vec![1.0, 0.01]).unwrap()));
    out.push(SuiteEntry::new("thin_box_d3", Body::cuboid(vec![1.0, 0.05, 0.05]).unwrap()));
    out
}

pub fn body_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64))
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

#[derive(Debug)]
pub struct SuiteOutcome {
    pub id: String,
    pub result: Result<BoundReport>,
}

/// Runs `verify_bound` on every entry over `Z^d`, body `i` with seed `seed + i`.
/// Output order follows the entries.
pub fn run_suite(entries: &[SuiteEntry], cfg: &FinderConfig, threads: Option<usize>) -> Result<Vec<SuiteOutcome>> {
    cfg.validate()?;
    let pool = pool(threads)?;
    Ok(pool.install(|| {
        entries
            .par_iter()
            .enumerate()
            .map(|(i, e)| {
                let mut rng = body_rng(cfg.seed, i);
                let lat = Lattice::integer(e.dim());
                let result = SlicingInstance::prepare(&lat, &e.body, cfg, &mut rng)
                    .and_then(|inst| verify_prepared(&inst, cfg, &mut rng, &e.id));
                SuiteOutcome { id: e.id.clone(), result }
            })
            .collect()
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCell {
    pub big_c: f64,
    pub small_c: f64,
    pub instances: usize,
    pub successes: usize,
    /// Largest number of attempts any successful instance needed.
    pub max_attempts_used: u64,
    pub admissible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub version: String,
    pub seed: u64,
    pub cells: Vec<CalibrationCell>,
    /// Per `big_C`, the largest admissible `small_c`.
    pub largest_small_c: Vec<(f64, Option<f64>)>,
    /// Smallest `big_C` admitting some `small_c` on the grid.
    pub smallest_big_c: Option<f64>,
}

pub const DEFAULT_BIG_C_GRID: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 4.0];
pub const DEFAULT_SMALL_C_GRID: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 1.0];

/// Runs the randomized finder on every non-degenerate entry for each grid
/// point; a cell is admissible when all instances succeed within budget.
pub fn calibrate(
    entries: &[SuiteEntry],
    big_cs: &[f64],
    small_cs: &[f64],
    cfg: &FinderConfig,
    threads: Option<usize>,
) -> Result<CalibrationReport> {
    cfg.validate()?;
    let pool = pool(threads)?;
    let prepared: Vec<SlicingInstance> = pool.install(|| {
        entries
            .par_iter()
            .enumerate()
            .map(|(i, e)| {
                let mut rng = body_rng(cfg.seed, i);
                SlicingInstance::prepare(&Lattice::integer(e.dim()), &e.body, cfg, &mut rng)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let active: Vec<(usize, &SlicingInstance)> = prepared.iter().enumerate().filter(|(_, p)| !p.is_degenerate()).collect();
    let mut cells = Vec::new();
    for &big_c in big_cs {
        for &small_c in small_cs {
            let grid_cfg = FinderConfig { big_c, small_c, ..cfg.clone() };
            grid_cfg.validate()?;
            let outcomes: Vec<Option<u64>> = pool.install(|| {
                active
                    .par_iter()
                    .map(|&(i, inst)| {
                        let mut rng = body_rng(cfg.seed, i);
                        let inst = inst.with_constants(big_c, small_c).ok()?;
                        run_randomized(&inst, &grid_cfg, &mut rng).ok().and_then(|(r, _)| r.attempts)
                    })
                    .collect()
            });
            let successes = outcomes.iter().filter(|o| o.is_some()).count();
            cells.push(CalibrationCell {
                big_c,
                small_c,
                instances: active.len(),
                successes,
                max_attempts_used: outcomes.iter().flatten().copied().max().unwrap_or(0),
                admissible: successes == active.len(),
            });
        }
    }
    let largest_small_c: Vec<(f64, Option<f64>)> = big_cs
        .iter()
        .map(|&b| {
            let best = cells
                .iter()
                .filter(|c| c.big_c == b && c.admissible)
                .map(|c| c.small_c)
                .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
            (b, best)
        })
        .collect();
    let smallest_big_c = largest_small_c
        .iter()
        .filter(|(_, s)| s.is_some())
        .map(|(b, _)| *b)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.min(x))));
    Ok(CalibrationReport {
        version: crate::VERSION.to_string(),
        seed: cfg.seed,
        cells,
        largest_small_c,
        smallest_big_c,
    })
}
