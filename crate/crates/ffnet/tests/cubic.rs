use ffnet::cubic::{critical_mu_roots, p_plus, root_structure_p_pm, solve_cubic_real, Cubic};
use proptest::prelude::*;

// Exact count oracle: split the real line at the critical points of p, so
// each piece is monotone, and count sign changes across the pieces.
fn count_oracle(c: &Cubic) -> usize {
    let bound = 1.0 + [c.c2, c.c1, c.c0].iter().map(|v| (v / c.c3).abs()).fold(0.0, f64::max);
    let (a, b, d) = (3.0 * c.c3, 2.0 * c.c2, c.c1);
    let disc = b * b - 4.0 * a * d;
    let mut cuts = vec![-bound];
    if disc > 0.0 {
        let q = disc.sqrt();
        let mut cr = [(-b - q) / (2.0 * a), (-b + q) / (2.0 * a)];
        cr.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.extend(cr);
    }
    cuts.push(bound);
    cuts.windows(2).filter(|w| c.eval(w[0]).signum() != c.eval(w[1]).signum() && c.eval(w[1]) != 0.0).count()
}

fn coeff() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn lead() -> impl Strategy<Value = f64> {
    prop_oneof![1.0..10.0f64, -10.0..-1.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn residual_small(c3 in lead(), c2 in coeff(), c1 in coeff(), c0 in coeff()) {
        let c = Cubic::new(c3, c2, c1, c0);
        let r = solve_cubic_real(&c, 1e-10).unwrap();
        for &x in &r.roots {
            prop_assert!(c.eval(x).abs() <= 1e-10 * c.scale(), "root {} residual {}", x, c.eval(x));
        }
    }

    // tiny leading coefficients push roots to |x| ~ 1/c3, where only a
    // relative residual is meaningful in double precision
    #[test]
    fn residual_relative_small_leading(c3 in -1e-2..1e-2f64, c2 in coeff(), c1 in coeff(), c0 in coeff()) {
        prop_assume!(c3.abs() > 1e-6);
        let c = Cubic::new(c3, c2, c1, c0);
        let r = solve_cubic_real(&c, 1e-10).unwrap();
        for &x in &r.roots {
            let size = c3.abs() * x.abs().powi(3) + c2.abs() * x * x + c1.abs() * x.abs() + c0.abs();
            prop_assert!(c.eval(x).abs() <= 1e-10 * size.max(c.scale()), "root {} residual {}", x, c.eval(x));
        }
    }

    #[test]
    fn count_matches_oracle(c3 in coeff(), c2 in coeff(), c1 in coeff(), c0 in coeff()) {
        prop_assume!(c3.abs() > 1e-6);
        let c = Cubic::new(c3, c2, c1, c0);
        prop_assume!(c.discriminant().abs() > 1e-12 * c.scale().powi(4));
        let r = solve_cubic_real(&c, 1e-10).unwrap();
        prop_assert_eq!(r.len(), count_oracle(&c));
    }
}

proptest! {
    #[test]
    fn p_minus_is_negated_p_plus(mu in 1e-3..5.0f64, eps in -3.0..3.0f64, lambda in 0.01..3.0f64) {
        let plus = root_structure_p_pm(mu, eps, lambda).unwrap().plus;
        let minus = solve_cubic_real(&Cubic::new(-1.0, 0.0, mu + eps, lambda * mu.sqrt()), 1e-10).unwrap();
        let mut a: Vec<f64> = plus.roots.iter().map(|r| -r).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut b = minus.roots.clone();
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn monotone_regime_single_root(mu in 1e-3..5.0f64, extra in 0.0..3.0f64, lambda in 0.01..3.0f64) {
        let eps = -mu - extra;
        let pm = root_structure_p_pm(mu, eps, lambda).unwrap();
        prop_assert_eq!(pm.plus.len(), 1);
        prop_assert_eq!(pm.minus.len(), 1);
    }

    #[test]
    fn critical_roots_give_double_root(eps in 0.01..2.0f64, lambda in 0.05..2.0f64) {
        prop_assume!((eps - lambda).abs() > 1e-3);
        for mu in critical_mu_roots(eps, lambda).unwrap().roots {
            let c = p_plus(mu, eps, lambda);
            prop_assert!(c.discriminant().abs() < 1e-10 * c.scale().powi(4));
        }
    }
}

#[test]
fn double_root_reported_with_multiplicity() {
    // (y-1)^2 (y+2) = y^3 - 3y + 2
    let r = solve_cubic_real(&Cubic::new(1.0, 0.0, -3.0, 2.0), 1e-10).unwrap();
    assert_eq!(r.len(), 2);
    let mut m: Vec<u8> = r.multiplicities.clone();
    m.sort();
    assert_eq!(m, vec![1, 2]);
}

#[test]
fn critical_curve_bisection_oracle() {
    for (eps, lambda) in [(0.3, 1.0), (0.5, 0.8), (1.5, 1.0)] {
        let f = |mu: f64| 4.0 * (mu + eps).powi(3) - 27.0 * lambda * lambda * mu;
        let roots = critical_mu_roots(eps, lambda).unwrap().roots;
        let grid: Vec<f64> = (1..200_000).map(|i| i as f64 * 5e-5).collect();
        let mut oracle = Vec::new();
        for w in grid.windows(2) {
            if f(w[0]).signum() != f(w[1]).signum() {
                let (mut a, mut b) = (w[0], w[1]);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if f(a).signum() == f(m).signum() { a = m } else { b = m }
                }
                oracle.push(0.5 * (a + b));
            }
        }
        assert_eq!(roots.len(), oracle.len(), "eps={eps} lambda={lambda}");
        for (r, o) in roots.iter().zip(&oracle) {
            assert!((r - o).abs() < 1e-9);
        }
    }
}
