mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use trimdepth::baselines::{
    sample_mean_and_pcs, spatial_median, spherical_pcs, spherical_pcs_about,
};
use trimdepth::depth::depth_weights;
use trimdepth::io::{dataset_to_csv, dataset_to_json, parse_csv, parse_json, Dataset};
use trimdepth::simulation::{generate_sample, replication_rng, SimModel};
use trimdepth::{
    alpha_radii, sample_distances, trimmed_cov_pcs, trimmed_mean, Grid, TrimConfig, TrimWeights,
    WeightedSample,
};

fn sample(rows: Vec<Vec<f64>>, q: &[f64]) -> WeightedSample {
    WeightedSample::new(rows, q.to_vec(), Vec::new()).unwrap()
}

fn transform(rows: &[Vec<f64>], a: f64, u: &QuadratureUnitary, b: &[f64]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| u.apply(r).iter().zip(b).map(|(x, s)| a * x + s).collect())
        .collect()
}

#[test]
fn jacobi_oracle_diagonalizes() {
    let mut g = rng(3);
    for p in [1, 2, 5, 9] {
        let x = normal_matrix(&mut g, p, p);
        let a: Vec<Vec<f64>> = (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| (0..p).map(|k| x[i][k] * x[j][k]).sum())
                    .collect()
            })
            .collect();
        let (vals, vecs) = jacobi_eigen(&a);
        for (l, v) in vals.iter().zip(&vecs) {
            let av = mat_vec(&a, v);
            for (lhs, rhs) in av.iter().zip(v) {
                assert!((lhs - l * rhs).abs() < 1e-10 * (1.0 + vals[0]));
            }
        }
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn gram_route_matches_covariance_oracle_with_trimming() {
    let mut g = rng(17);
    for _ in 0..40 {
        let n = g.random_range(4..12);
        let p = g.random_range(2..7);
        let rows = normal_matrix(&mut g, n, p);
        let q = random_quadrature(&mut g, p);
        let s = sample(rows.clone(), &q);
        let w: Vec<f64> = (0..n)
            .map(|i| {
                if i == 0 {
                    0.0
                } else {
                    g.random_range(0.1..1.0)
                }
            })
            .collect();
        let weights = TrimWeights::from_values(w.clone(), TrimConfig::untrimmed()).unwrap();
        let fit = trimmed_cov_pcs(&s, &weights, p).unwrap();
        let (mean, vals, funcs) = covariance_oracle(&rows, &w, &q);
        for (a, b) in fit.mean.iter().zip(&mean) {
            assert!((a - b).abs() < 1e-12);
        }
        for (k, l) in fit.eigenvalues.iter().enumerate() {
            assert!((l - vals[k]).abs() <= 1e-8 * vals[0]);
            let c = dot_q(&fit.pc_values[k], &funcs[k], &q).abs();
            assert!((c - 1.0).abs() < 1e-8, "k={k} c={c}");
        }
    }
}

#[test]
fn eigenbasis_recovered_on_fast_decay_model() {
    let grid = Grid::uniform(0.0, 1.0, 50).unwrap();
    let mut r = replication_rng(99, SimModel::FastDecay, 0);
    let s = generate_sample(SimModel::FastDecay, 500, &grid, &mut r).unwrap();
    let q = s.quad_weights().to_vec();
    for cfg in [
        TrimConfig::hard(0.5, 0.2).unwrap(),
        TrimConfig::soft(0.5, 0.2, 0.5).unwrap(),
    ] {
        let w = depth_weights(&sample_distances(&s), &cfg).unwrap();
        let fit = trimmed_cov_pcs(&s, &w, 2).unwrap();
        for k in 1..=2 {
            let phi = sine(k, grid.knots());
            // recovery is up to order within the span, so take the best match
            let best = fit
                .pc_values
                .iter()
                .map(|f| dot_q(f, &phi, &q).abs())
                .fold(0.0, f64::max);
            assert!(best >= 0.95, "k={k}: {best}");
        }
    }
}

#[test]
fn spherical_pcs_find_major_axis() {
    let mut g = rng(5);
    let rows: Vec<Vec<f64>> = (0..2000)
        .map(|_| vec![3.0 * normal(&mut g), normal(&mut g)])
        .collect();
    let fit = spherical_pcs(&WeightedSample::euclidean(rows).unwrap(), 1).unwrap();
    let v = &fit.pc_values[0];
    let angle = v[1].atan2(v[0]).abs();
    let angle = angle.min(std::f64::consts::PI - angle);
    assert!(angle < 0.1, "{angle}");
}

#[test]
fn spherical_pcs_ignore_deviation_length() {
    let mut g = rng(8);
    let rows = normal_matrix(&mut g, 15, 4);
    let s = WeightedSample::euclidean(rows.clone()).unwrap();
    let m = spatial_median(&s, 1e-12, 1000).unwrap().median;
    let stretched: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let f = g.random_range(0.2..5.0);
            r.iter().zip(&m).map(|(x, c)| c + f * (x - c)).collect()
        })
        .collect();
    let t = WeightedSample::euclidean(stretched).unwrap();
    let a = spherical_pcs_about(&s, &m, 3).unwrap();
    let b = spherical_pcs_about(&t, &m, 3).unwrap();
    for k in 0..3 {
        assert!((a.eigenvalues[k] - b.eigenvalues[k]).abs() < 1e-12);
        let c: f64 = a.pc_values[k]
            .iter()
            .zip(&b.pc_values[k])
            .map(|(x, y)| x * y)
            .sum();
        assert!((c.abs() - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trimmed_estimators_are_equivariant(seed in any::<u64>(), soft in any::<bool>()) {
        let mut g = rng(seed);
        let (n, p) = (g.random_range(5..15), g.random_range(2..8));
        let rows = normal_matrix(&mut g, n, p);
        let q = random_quadrature(&mut g, p);
        let a = if g.random_bool(0.5) { 1.0 } else { -1.0 } * g.random_range(0.3..4.0);
        let b: Vec<f64> = (0..p).map(|_| 3.0 * normal(&mut g)).collect();
        let u = QuadratureUnitary::new(&mut g, &q);
        let cfg = if soft { TrimConfig::soft(0.5, 0.2, 0.5).unwrap() } else { TrimConfig::hard(0.4, 0.3).unwrap() };

        let s = sample(rows.clone(), &q);
        let t = sample(transform(&rows, a, &u, &b), &q);
        let ws = depth_weights(&sample_distances(&s), &cfg).unwrap();
        let wt = depth_weights(&sample_distances(&t), &cfg).unwrap();
        prop_assert_eq!(&ws.w, &wt.w);

        let fs = trimmed_cov_pcs(&s, &ws, p).unwrap();
        let ft = trimmed_cov_pcs(&t, &wt, p).unwrap();
        let expected: Vec<f64> = u.apply(&fs.mean).iter().zip(&b).map(|(x, s)| a * x + s).collect();
        let diff: Vec<f64> = expected.iter().zip(&ft.mean).map(|(x, y)| x - y).collect();
        prop_assert!(norm_q(&diff, &q) <= 1e-10 * (1.0 + norm_q(&expected, &q)));
        prop_assert_eq!(fs.components(), ft.components());
        for k in 0..fs.components() {
            prop_assert!((ft.eigenvalues[k] - a * a * fs.eigenvalues[k]).abs() <= 1e-10 * a * a * fs.eigenvalues[0]);
            let simple = (k == 0 || fs.eigenvalues[k - 1] - fs.eigenvalues[k] > 1e-6 * fs.eigenvalues[0])
                && (k + 1 == fs.components() || fs.eigenvalues[k] - fs.eigenvalues[k + 1] > 1e-6 * fs.eigenvalues[0]);
            if simple {
                let c = dot_q(&ft.pc_values[k], &u.apply(&fs.pc_values[k]), &q).abs();
                prop_assert!((c - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn baselines_are_equivariant(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (n, p) = (g.random_range(6..15), g.random_range(2..6));
        let rows = normal_matrix(&mut g, n, p);
        let q = random_quadrature(&mut g, p);
        let a = if g.random_bool(0.5) { 1.0 } else { -1.0 } * g.random_range(0.3..4.0);
        let b: Vec<f64> = (0..p).map(|_| normal(&mut g)).collect();
        let u = QuadratureUnitary::new(&mut g, &q);
        let s = sample(rows.clone(), &q);
        let t = sample(transform(&rows, a, &u, &b), &q);

        let ms = spatial_median(&s, 1e-13, 5000).unwrap();
        let mt = spatial_median(&t, 1e-13, 5000).unwrap();
        let expected: Vec<f64> = u.apply(&ms.median).iter().zip(&b).map(|(x, s)| a * x + s).collect();
        let diff: Vec<f64> = expected.iter().zip(&mt.median).map(|(x, y)| x - y).collect();
        prop_assert!(norm_q(&diff, &q) <= 1e-8 * (1.0 + norm_q(&expected, &q)));

        let ss = sample_mean_and_pcs(&s, 1).unwrap();
        let st = sample_mean_and_pcs(&t, 1).unwrap();
        prop_assert!((st.eigenvalues[0] - a * a * ss.eigenvalues[0]).abs() <= 1e-10 * a * a * ss.eigenvalues[0]);

        // spherical components about the transformed centre are exactly equivariant,
        // unless the median sits on a data point and that direction is undefined
        prop_assume!(s.rows().all(|x| s.distance(x, &ms.median) > 1e-6));
        let centre_t: Vec<f64> = u.apply(&ms.median).iter().zip(&b).map(|(x, s)| a * x + s).collect();
        let hs = spherical_pcs_about(&s, &ms.median, 1).unwrap();
        let ht = spherical_pcs_about(&t, &centre_t, 1).unwrap();
        prop_assert!((hs.eigenvalues[0] - ht.eigenvalues[0]).abs() < 1e-10);
        let c = dot_q(&ht.pc_values[0], &u.apply(&hs.pc_values[0]), &q).abs();
        prop_assert!((c - 1.0).abs() < 1e-8);
    }

    #[test]
    fn median_objective_never_increases(seed in any::<u64>()) {
        let mut g = rng(seed);
        let mut rows = normal_matrix(&mut g, 12, 3);
        rows[3] = rows[0].clone();
        rows[7] = rows[0].clone();
        let r = spatial_median(&WeightedSample::euclidean(rows).unwrap(), 1e-10, 500).unwrap();
        for w in r.objective.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-14));
        }
    }

    #[test]
    fn mirrored_sample_has_exact_centre(seed in any::<u64>(), soft in any::<bool>()) {
        let mut g = rng(seed);
        let (n, p) = (g.random_range(3..20), g.random_range(1..6));
        let half = normal_matrix(&mut g, n, p);
        let mu: Vec<f64> = (0..p).map(|_| 5.0 * normal(&mut g)).collect();
        let mut rows = half.clone();
        rows.extend(half.iter().map(|r| r.iter().zip(&mu).map(|(x, m)| 2.0 * m - x).collect::<Vec<f64>>()));
        let q = random_quadrature(&mut g, p);
        let s = sample(rows, &q);
        let cfg = if soft { TrimConfig::soft(0.5, 0.2, 0.5).unwrap() } else { TrimConfig::hard(0.5, 0.3).unwrap() };
        let w = depth_weights(&sample_distances(&s), &cfg).unwrap();
        let m = trimmed_mean(&s, &w).unwrap();
        for (a, b) in m.iter().zip(&mu) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn radii_match_brute_force(xs in prop::collection::vec(prop_oneof![(-30i32..30).prop_map(f64::from), -30.0f64..30.0], 1..30), alpha in 0.01f64..0.5) {
        let s = WeightedSample::euclidean(xs.iter().map(|&x| vec![x]).collect()).unwrap();
        let k = (alpha * xs.len() as f64).ceil() as usize;
        prop_assume!(k >= 1 && (alpha * xs.len() as f64 - (alpha * xs.len() as f64).round()).abs() > 1e-6);
        let p = alpha_radii(&sample_distances(&s), alpha).unwrap();
        let (radii, ranks) = brute_radii_1d(&xs, k);
        prop_assert_eq!(p.radii, radii);
        prop_assert_eq!(p.ranks, ranks);
    }

    #[test]
    fn csv_round_trip(
        rows in prop::collection::vec(prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 3), 1..6),
        gaps in prop::collection::vec(1e-6f64..10.0, 2),
    ) {
        let knots = vec![-1.0, -1.0 + gaps[0], -1.0 + gaps[0] + gaps[1]];
        let s = WeightedSample::on_grid(rows, Grid::new(knots).unwrap()).unwrap();
        let text = dataset_to_csv(&s).unwrap();
        let back = parse_csv(&text, "x.csv").unwrap();
        prop_assert_eq!(&back.sample, &s);
        prop_assert_eq!(dataset_to_csv(&back.sample).unwrap(), text);
    }

    #[test]
    fn json_round_trip(
        xs in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 4), 1..5),
        ys in prop::collection::vec(-1e6f64..1e6, 2),
    ) {
        let n = xs.len();
        let doc = serde_json::json!({
            "schema_version": 1,
            "channels": [
                {"name": "x", "grid": [0.0, 0.25, 0.5, 1.0], "values": xs},
                {"name": "e", "grid": null, "values": vec![ys.clone(); n]}
            ]
        });
        let d = parse_json(&doc.to_string(), "d.json").unwrap();
        let text = dataset_to_json(&d).unwrap();
        let back: Dataset = parse_json(&text, "d.json").unwrap();
        prop_assert_eq!(back, d);
    }
}
