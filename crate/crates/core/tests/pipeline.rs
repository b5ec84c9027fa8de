use latslice::gaussian::orthogonal_layer_masses;
use latslice::slicing::{
    best_slice_dual_search_points, best_slice_exact_points, default_dual_norm_bound, degenerate_hyperplane,
    randomized_finder, verify_bound, SliceMethod, EXACT_NODE_BUDGET,
};
use latslice::suite::{run_suite, standard_suite};
use latslice::{
    enumerate_in_body, integer_normal_of_span, Body, FinderConfig, GaussianParam, Lattice, Matrix, PointSet, SliceRatio,
    SpanNormal,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn dual_search_agrees_with_exact_on_small_suite() {
    for e in standard_suite() {
        let lat = Lattice::integer(e.dim());
        let ps = enumerate_in_body(&lat, &e.body).unwrap();
        if ps.rank().unwrap() < e.dim() {
            continue;
        }
        let exact = match best_slice_exact_points(&lat, &ps, EXACT_NODE_BUDGET) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let dual = best_slice_dual_search_points(&lat, &ps, default_dual_norm_bound(&lat)).unwrap();
        assert_eq!(exact.ratio, dual.ratio, "{}", e.id);
    }
}

#[test]
fn finder_accepts_on_cross_polytope_d4() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let lat = Lattice::integer(4);
    let body = Body::cross_polytope(vec![1.0; 4]).unwrap();
    let r = randomized_finder(&lat, &body, &FinderConfig::default(), &mut rng).unwrap();
    assert_eq!(r.method, SliceMethod::Randomized);
    let vol: f64 = 16.0 / 24.0;
    let s = (2.0 * vol.powf(1.0 / 12.0)).max(1.0);
    // the John position of the cross-polytope is itself, R = 1
    let p = (0.5 / s).min(1.0);
    assert!(r.ratio.at_least(p / 2.0));
}

#[test]
fn degenerate_rank_deficient_sublattice() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let d = rng.gen_range(3..=5);
        let gens: Vec<Vec<i64>> = (0..d - 1).map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let mut coeffs = vec![vec![0; d]];
        for _ in 0..12 {
            let mut v = vec![0i64; d];
            for g in &gens {
                let m = rng.gen_range(-2..=2);
                v.iter_mut().zip(g).for_each(|(a, b)| *a += m * b);
            }
            coeffs.push(v.iter().map(|x| -x).collect());
            coeffs.push(v);
        }
        let lat = Lattice::integer(d);
        let ps = PointSet::from_coeffs(&lat, coeffs).unwrap();
        let r = degenerate_hyperplane(&lat, &ps).unwrap();
        assert!(r.ratio.is_one());
        match integer_normal_of_span(&lat, ps.coeffs()).unwrap() {
            SpanNormal::Normal { coeffs, .. } => assert_eq!(coeffs, r.normal_coeffs),
            SpanNormal::FullRank => panic!("rank deficient by construction"),
        }
    }
}

#[test]
fn cube_reports_closed_form_constant() {
    for d in 2..=4 {
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let rep = verify_bound(&Lattice::integer(d), &Body::cuboid(vec![1.0; d]).unwrap(), &FinderConfig::default(), &mut rng).unwrap();
        assert_eq!(rep.best_ratio, SliceRatio { on: 1, total: 3 });
        let df = d as f64;
        assert!((rep.implied_c_theorem.unwrap() - df / 3.0 * 2f64.powf(df / (df - 1.0))).abs() < 1e-12);
    }
}

#[test]
fn verify_on_skewed_lattice_counts_in_original_frame() {
    let lat = Lattice::from_rows(&[vec![1.0, 0.3, 0.0], vec![0.0, 1.1, 0.2], vec![0.1, 0.0, 0.9]]).unwrap();
    let t = Matrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 0.7]);
    let body = Body::cuboid(vec![1.5, 1.0, 1.2]).unwrap().apply_transform(&t).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rep = verify_bound(&lat, &body, &FinderConfig::default(), &mut rng).unwrap();
    let ps = enumerate_in_body(&lat, &body).unwrap();
    assert_eq!(ps.count_orthogonal(&rep.best_normal).unwrap() as u64, rep.best_ratio.on);
    if let Some(k) = &rep.randomized_normal {
        assert_eq!(ps.count_orthogonal(k).unwrap() as u64, rep.ratio_randomized.unwrap().on);
    }
}

#[test]
fn layer_masses_bound_the_orthogonal_mass() {
    let lat = Lattice::from_rows(&[vec![1.0, 0.2], vec![-0.3, 1.4]]).unwrap();
    for (x, s) in [([1i64, 0], 1.0), ([1, 1], 1.5), ([2, -1], 0.8)] {
        let gp = GaussianParam::new(s).unwrap();
        let masses = orthogonal_layer_masses(&lat, &x, gp).unwrap();
        let norm = lat.point(&x).norm();
        let bound = latslice::gaussian::orth_prob_lower_bound(norm, gp).unwrap().exact;
        assert!(masses.zero_fraction() >= bound - 1e-9);
    }
}

#[test]
fn suite_reports_are_consistent() {
    let cfg = FinderConfig { seed: 7, ..FinderConfig::default() };
    let outcomes = run_suite(&standard_suite(), &cfg, None).unwrap();
    for o in outcomes {
        let r = o.result.unwrap();
        r.check_consistency().unwrap();
        if r.degenerate {
            assert!(r.best_ratio.is_one());
        } else {
            assert!(r.ratio_randomized.unwrap().at_least(r.p_threshold / 2.0));
        }
    }
}
