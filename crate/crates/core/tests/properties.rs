use hbspace::approx::toeplitz_tail_bound;
use hbspace::blaschke::{blaschke_eval, BlaschkeSpec};
use hbspace::experiments::dilation_ratio;
use hbspace::series::{cauchy_product, from_grid, min_grid_size, series_exp, to_grid};
use hbspace::spaces::{cauchy_kernel, dilate, make_hb_element, Pair, Symbol};
use hbspace::toeplitz::{apply_analytic, apply_coanalytic, solve_coanalytic_triangular};
use hbspace::{Complex64, TruncatedSeries};
use proptest::prelude::*;
use std::sync::OnceLock;

fn coeffs(max_degree: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=max_degree + 1)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

fn series(max_degree: usize) -> impl Strategy<Value = TruncatedSeries> {
    coeffs(max_degree).prop_map(|c| TruncatedSeries::new(c).unwrap())
}

fn b0_pair() -> &'static Pair {
    static PAIR: OnceLock<Pair> = OnceLock::new();
    PAIR.get_or_init(|| Pair::from_symbol(&Symbol::b0(), 256, 2048).unwrap())
}

fn close(a: Complex64, b: Complex64, rel: f64, scale: f64) -> bool {
    (a - b).norm() <= rel * scale.max(1e-300)
}

/// Coefficient ℓ¹ norm bounds the sup norm.
fn l1(s: &TruncatedSeries) -> f64 {
    s.coeffs().iter().map(|c| c.norm()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_round_trip(f in series(64)) {
        let m = min_grid_size(f.degree());
        let back = from_grid(&to_grid(&f, m).unwrap(), f.degree()).unwrap();
        prop_assert!(back.max_abs_diff(&f) <= 1e-12 * f.max_abs_coeff().max(1e-300));
    }

    #[test]
    fn parseval_on_grid(f in series(64)) {
        let grid = to_grid(&f, min_grid_size(f.degree())).unwrap();
        let h2 = f.norm_h2_sq();
        prop_assert!((grid.mean_sq() - h2).abs() <= 1e-12 * h2.max(1e-300));
    }

    #[test]
    fn cauchy_product_commutes_and_associates(f in series(24), g in series(24), h in series(24)) {
        let n = 40;
        let fg = cauchy_product(&f, &g, n);
        let gf = cauchy_product(&g, &f, n);
        let left = cauchy_product(&fg, &h, n);
        let right = cauchy_product(&f, &cauchy_product(&g, &h, n), n);
        let scale = l1(&f) * l1(&g) * l1(&h);
        for k in 0..=n {
            prop_assert!(close(fg.coeff(k), gf.coeff(k), 1e-12, l1(&f) * l1(&g)));
            prop_assert!(close(left.coeff(k), right.coeff(k), 1e-12, scale));
        }
    }

    #[test]
    fn exp_turns_sums_into_products(f in series(32), g in series(32)) {
        let n = 48;
        let lhs = series_exp(&(&f + &g), n);
        let rhs = cauchy_product(&series_exp(&f, n), &series_exp(&g, n), n);
        let scale = rhs.max_abs_coeff();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * scale);
    }

    #[test]
    fn toeplitz_adjoint(h in series(64), f in series(64), g in series(64)) {
        // pad g so the product h·f is never clipped
        let n = h.degree() + f.degree();
        let g = g.resized(n);
        let lhs = apply_analytic(&h, &f, n).inner(&g);
        let rhs = f.resized(n).inner(&apply_coanalytic(&h, &g));
        let scale = l1(&h) * f.norm_h2() * g.norm_h2();
        prop_assert!(close(lhs, rhs, 1e-10, scale));
    }

    #[test]
    fn coanalytic_products_compose(h in series(16), k in series(16), f in series(64)) {
        let n = h.degree() + k.degree();
        let lhs = apply_coanalytic(&h, &apply_coanalytic(&k, &f));
        let rhs = apply_coanalytic(&cauchy_product(&h, &k, n), &f);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * l1(&h) * l1(&k) * l1(&f));
    }

    #[test]
    fn contraction_symbols_contract(h in series(16), f in series(64)) {
        let grid = min_grid_size(h.degree().max(f.degree()));
        let sup = to_grid(&h, grid).unwrap().sup_abs();
        // the grid estimates sup |h| from below; use the coefficient bound
        // to rescale into the unit ball with certainty
        let h = h.scale(Complex64::new(1.0 / l1(&h).max(sup), 0.0));
        let out = apply_coanalytic(&h, &f);
        prop_assert!(out.norm_h2() <= f.norm_h2() * (1.0 + 1e-10));
    }

    #[test]
    fn triangular_solve_inverts(a in series(64), g in series(64), a0 in 0.1..2.0f64) {
        // a dominant constant term keeps 1/a bounded, as for the outer factor of a pair
        let mut c = a.coeffs().to_vec();
        c[0] = Complex64::new(0.0, 0.0);
        let tail = l1(&TruncatedSeries::new(c.clone()).unwrap());
        let damp = if tail > 0.0 { 0.9 * a0 / tail } else { 1.0 };
        let mut c: Vec<Complex64> = c.iter().map(|x| x * damp).collect();
        c[0] = Complex64::new(a0, 0.0);
        let a = TruncatedSeries::new(c).unwrap();
        let x = solve_coanalytic_triangular(&a, &g).unwrap();
        let back = apply_coanalytic(&a, &x);
        prop_assert!((&back - &g).norm_h2() <= 1e-9 * g.norm_h2().max(1e-300));
    }

    #[test]
    fn triangular_solve_is_backward_stable(a in series(64), g in series(64), a0 in 0.1..2.0f64) {
        // without dominance the solution can grow like (‖a‖₁/â(0))^N; the
        // residual stays at rounding level relative to ‖a‖₁‖x‖
        let mut c = a.coeffs().to_vec();
        c[0] = Complex64::new(a0, 0.0);
        let a = TruncatedSeries::new(c).unwrap();
        let x = solve_coanalytic_triangular(&a, &g).unwrap();
        let back = apply_coanalytic(&a, &x);
        let scale = g.norm_h2() + l1(&a) * x.norm_h2();
        prop_assert!((&back - &g).norm_h2() <= 1e-13 * (a.degree() + 1) as f64 * scale);
    }

    #[test]
    fn kernels_are_eigenvectors(h in series(8), re in -0.6..0.6f64, im in -0.6..0.6f64) {
        let w = Complex64::new(re, im);
        let n = 200;
        let k = cauchy_kernel(w, n).unwrap();
        let out = apply_coanalytic(&h, &k);
        let lambda = h.eval(w).conj();
        // indices below n − deg h see the full symbol
        for j in 0..=(n - h.degree()) {
            prop_assert!(close(out.coeff(j), lambda * k.coeff(j), 1e-10, l1(&h)));
        }
    }

    #[test]
    fn coanalytic_never_raises_degree(h in series(16), p in series(32)) {
        let q = apply_coanalytic(&h, &p);
        prop_assert_eq!(q.degree(), p.degree());
    }

    #[test]
    fn coanalytic_symbols_intertwine(h in series(12), f in series(64)) {
        let b = Symbol::b0().taylor(64).unwrap();
        let lhs = apply_coanalytic(&b, &apply_coanalytic(&h, &f));
        let rhs = apply_coanalytic(&h, &apply_coanalytic(&b, &f));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * l1(&h) * l1(&f));
    }

    #[test]
    fn tail_bound_holds(h in series(12), g in series(24), t in 0.0..=1.0f64) {
        let h = h.scale(Complex64::new(t / l1(&h), 0.0));
        let bound = toeplitz_tail_bound(&h, &g, min_grid_size(4 * g.degree().max(h.degree()))).unwrap();
        let actual = (&apply_coanalytic(&h, &g) - &g).norm_h2_sq();
        prop_assert!(actual <= bound + 1e-10);
    }

    #[test]
    fn multiplier_bound_through_outer_factor(h0 in series(8), f in series(32)) {
        // for h = a·h₀, ‖T_h̄ f‖_{H(b)} ≤ ‖h/a‖∞ ‖f‖_{H²}
        let pair = b0_pair();
        let h = cauchy_product(pair.a(), &h0, pair.degree());
        let sup = to_grid(&h0, 4096).unwrap().sup_abs();
        let g = apply_coanalytic(&h, &f.resized(pair.degree()));
        let norm = make_hb_element(&g, pair).unwrap().hb_norm();
        prop_assert!(norm <= sup * f.norm_h2() * (1.0 + 1e-6));
    }

    #[test]
    fn fplus_paths_agree(f in series(64)) {
        let e = make_hb_element(&f, b0_pair()).unwrap();
        prop_assert!(e.path_discrepancy <= 1e-8 * f.max_abs_coeff().max(1.0));
        let direct = f.norm_h2_sq() + e.fplus.norm_h2_sq();
        prop_assert!((e.hb_norm_sq - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn kernels_reproduce(f in series(64), re in -0.63..0.63f64, im in -0.63..0.63f64) {
        let w = Complex64::new(re, im);
        let k = cauchy_kernel(w, f.degree()).unwrap();
        prop_assert!(close(f.inner(&k), f.eval(w), 1e-10, l1(&f)));
    }

    #[test]
    fn b0_dilations_do_not_increase_norm(f in series(64), r in 0.1..0.99f64) {
        prop_assert!(dilation_ratio(b0_pair(), &f, r).unwrap() <= 1.0 + 1e-8);
    }

    #[test]
    fn dilation_shrinks_h2_norm(f in series(64), r in 0.0..1.0f64) {
        prop_assert!(dilate(&f, r).norm_h2() <= f.norm_h2());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn blaschke_is_bounded_and_multiplicative(
        zeros in prop::collection::btree_set(1u32..999, 1..6),
        angle in 0.0..std::f64::consts::TAU,
        radius in 0.0..=1.0f64,
    ) {
        let zeros: Vec<f64> = zeros.into_iter().map(|z| z as f64 / 1000.0).collect();
        let one = BlaschkeSpec::from_zeros(&zeros, 1).unwrap();
        let two = one.with_power(2).unwrap();
        let z = Complex64::from_polar(radius, angle);
        let v1 = blaschke_eval(&one, z);
        prop_assert!(v1.norm() <= 1.0 + 1e-12);
        prop_assert!((blaschke_eval(&two, z) - v1 * v1).norm() <= 1e-12);
        let at_zero: f64 = zeros.iter().product();
        prop_assert!((blaschke_eval(&one, Complex64::new(0.0, 0.0)).re - at_zero).abs() <= 1e-12);
    }
}
