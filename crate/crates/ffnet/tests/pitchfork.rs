use ffnet::pitchfork::{
    classify_region, enumerate_counts, equilibria, saddle_node_locus, three_cell_equilibria,
    three_cell_vector_field, vector_field, PitchforkParams, Stability,
};
use ffnet::cubic::p_plus;
use ffnet::sim::{integrate, SystemSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn equilibrium_residual(mu in -2.0..3.0f64, eps in -2.0..2.0f64, lambda in 0.05..3.0f64) {
        let p = PitchforkParams::new(mu, eps, lambda);
        for e in equilibria(&p).unwrap() {
            let f = vector_field(&p, e.x, e.y);
            prop_assert!(f[0].abs() <= 1e-10 && f[1].abs() <= 1e-10);
        }
    }

    #[test]
    fn three_cell_residual(mu in -1.0..2.0f64, eps in -1.0..1.0f64, lambda in 0.05..2.0f64) {
        let p = PitchforkParams::new(mu, eps, lambda);
        for e in three_cell_equilibria(&p).unwrap() {
            let f = three_cell_vector_field(&p, [e.x, e.y, e.z]);
            prop_assert!(f.iter().all(|v| v.abs() <= 1e-10));
        }
    }

    #[test]
    fn lambda_scaling(mu in -1.0..3.0f64, eps in -1.0..1.5f64, lambda in 0.1..5.0f64) {
        let a = classify_region(&PitchforkParams::new(mu * lambda, eps * lambda, lambda)).unwrap();
        let b = classify_region(&PitchforkParams::new(mu, eps, 1.0)).unwrap();
        prop_assume!(!a.boundary && !b.boundary);
        prop_assert_eq!(a.tag, b.tag);
        prop_assert_eq!(a.expected_counts, b.expected_counts);
    }
}

#[test]
fn census_grid_matches_enumeration() {
    let mut checked = 0;
    for mu in ffnet::linspace(0.06, 3.0, 50) {
        for eps in ffnet::linspace(-1.0, 1.5, 50) {
            let p = PitchforkParams::new(mu, eps, 1.0);
            let r = classify_region(&p).unwrap();
            if r.boundary {
                continue;
            }
            checked += 1;
            assert_eq!(enumerate_counts(&p).unwrap(), r.expected_counts, "eps={eps} mu={mu}");
        }
    }
    assert!(checked > 2000);
}

#[test]
fn saddle_node_locus_has_double_roots() {
    let c = saddle_node_locus(0.2, (-0.19, 1.5), 20).unwrap();
    let pts: Vec<_> = c.points().collect();
    assert_eq!(pts.len(), 20);
    for p in pts {
        let q = p_plus(0.2, p[0], p[1]);
        assert!(q.discriminant().abs() < 1e-10 * q.scale().powi(4));
    }
}

fn jacobian(p: &PitchforkParams, x: f64, y: f64) -> [[f64; 2]; 2] {
    let h = 1e-6;
    let fx1 = vector_field(p, x + h, y);
    let fx0 = vector_field(p, x - h, y);
    let fy1 = vector_field(p, x, y + h);
    let fy0 = vector_field(p, x, y - h);
    [
        [(fx1[0] - fx0[0]) / (2.0 * h), (fy1[0] - fy0[0]) / (2.0 * h)],
        [(fx1[1] - fx0[1]) / (2.0 * h), (fy1[1] - fy0[1]) / (2.0 * h)],
    ]
}

#[test]
fn stability_matches_integration() {
    for (mu, eps) in [(0.5, 0.3), (1.0, 0.5), (0.3, -0.1), (2.0, 0.1)] {
        let p = PitchforkParams::new(mu, eps, 1.0);
        let s = SystemSpec::Pitchfork2(p);
        for e in equilibria(&p).unwrap() {
            match e.stability {
                Stability::StableNode => {
                    for d in [[1e-3, 0.0], [0.0, -1e-3], [7e-4, 7e-4]] {
                        let t = integrate(&s, &[e.x + d[0], e.y + d[1]], 100.0, 1e-2).unwrap();
                        let end = t.states.last().unwrap();
                        assert!((end[0] - e.x).hypot(end[1] - e.y) < 1e-4);
                    }
                }
                Stability::Saddle => {
                    let j = jacobian(&p, e.x, e.y);
                    // eigenvector of the positive eigenvalue of a triangular Jacobian
                    let (l, v) = if j[0][0] > 0.0 {
                        let l = j[0][0];
                        (l, if (l - j[1][1]).abs() > 1e-12 { [1.0, j[1][0] / (l - j[1][1])] } else { [1.0, 0.0] })
                    } else {
                        (j[1][1], [0.0, 1.0])
                    };
                    assert!(l > 0.0);
                    let n = v[0].hypot(v[1]);
                    let x0 = [e.x + 1e-3 * v[0] / n, e.y + 1e-3 * v[1] / n];
                    let t = integrate(&s, &x0, 20.0, 1e-2).unwrap();
                    let end = t.states.last().unwrap();
                    assert!((end[0] - e.x).hypot(end[1] - e.y) > 1e-2);
                }
                _ => {}
            }
        }
    }
}
