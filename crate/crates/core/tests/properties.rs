use latslice::enumerate::PointSet;
use latslice::gaussian::{poisson_check, prob_zero, shifted_theta, theta};
use latslice::intlin::{canonical_primitive, unimodular_to_e1};
use latslice::slicing::{
    best_slice_dual_search_points, best_slice_exact_points, degenerate_hyperplane, run_randomized, SlicingInstance,
    EXACT_NODE_BUDGET,
};
use latslice::{enumerate_in_body, grid_scan_oracle, slice_count, Body, FinderConfig, GaussianParam, Lattice, Matrix, SliceRatio, Vector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Near-identity bases keep the condition number far from the rejection limit.
fn lattice_strategy(d: usize) -> impl Strategy<Value = Lattice> {
    (prop::collection::vec(-0.4f64..0.4, d * d), prop::collection::vec(0.6f64..1.6, d)).prop_map(move |(off, diag)| {
        let m = Matrix::from_fn(d, d, |i, j| if i == j { diag[i] } else { off[i * d + j] });
        Lattice::new(m).unwrap()
    })
}

fn body_strategy(d: usize) -> impl Strategy<Value = Body> {
    let widths = prop::collection::vec(0.5f64..2.5, d);
    prop_oneof![
        widths.clone().prop_map(|w| Body::cuboid(w).unwrap()),
        widths.clone().prop_map(|w| Body::cross_polytope(w).unwrap()),
        (0.5f64..2.5).prop_map(move |r| Body::ball(d, r).unwrap()),
        (widths, prop::collection::vec(-0.3f64..0.3, d * d)).prop_map(move |(w, off)| {
            let t = Matrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { off[i * d + j] });
            Body::cross_polytope(w).unwrap().apply_transform(&t).unwrap()
        }),
    ]
}

fn dim_lattice_body() -> impl Strategy<Value = (Lattice, Body)> {
    (2usize..=4).prop_flat_map(|d| (lattice_strategy(d), body_strategy(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_matches_grid_scan((lat, body) in dim_lattice_body()) {
        let fast = enumerate_in_body(&lat, &body).unwrap();
        let slow = grid_scan_oracle(&lat, &body).unwrap();
        prop_assert_eq!(fast.coeffs(), slow.coeffs());
        prop_assert!(fast.contains_zero());
        prop_assert!(fast.is_symmetric());
    }

    #[test]
    fn dual_pairs_to_identity(lat in (1usize..=5).prop_flat_map(lattice_strategy)) {
        let prod = lat.basis() * lat.dual_basis().transpose();
        prop_assert!((prod - Matrix::identity(lat.dim(), lat.dim())).amax() < 1e-9);
        prop_assert!((lat.det_abs() * lat.dual().det_abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn poisson_identity(lat in (1usize..=3).prop_flat_map(lattice_strategy), s in 0.5f64..2.0) {
        let gp = GaussianParam::new(s).unwrap();
        prop_assert!(poisson_check(&lat, gp).unwrap() <= 1e-9);
        let d = lat.dim() as i32;
        prop_assert!(prob_zero(&lat, gp).unwrap() <= lat.det_abs() * s.powi(-d) * (1.0 + 1e-9));
    }

    #[test]
    fn shift_never_increases_theta(
        (lat, shift) in (1usize..=3).prop_flat_map(|d| (lattice_strategy(d), prop::collection::vec(-2.0f64..2.0, d))),
        s in 0.5f64..2.0,
    ) {
        let gp = GaussianParam::new(s).unwrap();
        let t = theta(&lat, gp).unwrap().value;
        let shifted = shifted_theta(&lat, &Vector::from_vec(shift), gp).unwrap().value;
        prop_assert!(shifted <= t * (1.0 + 1e-9));
    }

    #[test]
    fn unimodular_sends_primitive_vector_to_e1(v in prop::collection::vec(-30i128..30, 2..6)) {
        prop_assume!(v.iter().any(|&x| x != 0));
        let p = canonical_primitive(&v).unwrap();
        let m = unimodular_to_e1(&p).unwrap();
        let img = m.mul_vec(&p).unwrap();
        prop_assert_eq!(img[0], 1);
        prop_assert!(img[1..].iter().all(|&x| x == 0));
    }

    #[test]
    fn slice_count_invariant_under_integer_scaling(
        (lat, body) in dim_lattice_body(),
        k in prop::collection::vec(-3i64..=3, 4),
        scale in prop_oneof![-5i64..=-1, 1i64..=5],
    ) {
        let ps = enumerate_in_body(&lat, &body).unwrap();
        let k = &k[..lat.dim()];
        prop_assume!(k.iter().any(|&x| x != 0));
        let scaled: Vec<i64> = k.iter().map(|x| x * scale).collect();
        prop_assert_eq!(ps.count_orthogonal(k).unwrap(), ps.count_orthogonal(&scaled).unwrap());
    }

    #[test]
    fn oracles_are_ordered((lat, body) in dim_lattice_body(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = FinderConfig { seed, ..FinderConfig::default() };
        let inst = SlicingInstance::prepare(&lat, &body, &cfg, &mut rng).unwrap();
        let ps = &inst.points;
        if inst.is_degenerate() {
            let deg = degenerate_hyperplane(&lat, ps).unwrap();
            prop_assert!(deg.ratio.is_one());
            return Ok(());
        }
        let exact = best_slice_exact_points(&lat, ps, EXACT_NODE_BUDGET).unwrap();
        let dual = best_slice_dual_search_points(&lat, ps, 3.0).unwrap();
        let (rand_res, _) = run_randomized(&inst, &cfg, &mut rng).unwrap();
        prop_assert!(exact.ratio >= dual.ratio);
        prop_assert!(exact.ratio >= rand_res.ratio);
        prop_assert!(rand_res.ratio.at_least(inst.p / 2.0));
        for r in [&exact, &dual, &rand_res] {
            prop_assert_eq!(ps.count_orthogonal(&r.normal_coeffs).unwrap() as u64, r.on_count);
            let (on, total) = slice_count(ps, &Vector::from_vec(r.normal.clone())).unwrap();
            prop_assert_eq!((on as u64, total as u64), (r.on_count, r.total));
        }
    }

    #[test]
    fn degenerate_normal_kills_every_point(
        rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..3),
        mults in prop::collection::vec(-2i64..=2, 6),
    ) {
        // points in the span of at most two integer vectors in Z^4
        let mut coeffs = vec![vec![0i64; 4]];
        for (i, m) in mults.iter().enumerate() {
            let r = &rows[i % rows.len()];
            coeffs.push(r.iter().map(|x| x * m).collect());
            coeffs.push(r.iter().map(|x| -x * m).collect());
        }
        let lat = Lattice::integer(4);
        let ps = PointSet::from_coeffs(&lat, coeffs).unwrap();
        let res = degenerate_hyperplane(&lat, &ps).unwrap();
        prop_assert!(res.ratio.is_one());
        for c in ps.coeffs() {
            let dot: i64 = c.iter().zip(&res.normal_coeffs).map(|(a, b)| a * b).sum();
            prop_assert_eq!(dot, 0);
        }
    }

    #[test]
    fn ratio_order_matches_cross_multiplication(a in 0u64..50, b in 1u64..50, c in 0u64..50, e in 1u64..50) {
        prop_assume!(a <= b && c <= e);
        let x = SliceRatio::new(a, b).unwrap();
        let y = SliceRatio::new(c, e).unwrap();
        prop_assert_eq!(x.cmp(&y), (a * e).cmp(&(c * b)));
        // away from equality, rounding c/e to a double cannot flip the comparison
        let threshold = c as f64 / e as f64;
        match (a * e).cmp(&(c * b)) {
            std::cmp::Ordering::Greater => prop_assert!(x.at_least(threshold)),
            std::cmp::Ordering::Less => prop_assert!(!x.at_least(threshold)),
            std::cmp::Ordering::Equal => {}
        }
    }
}
