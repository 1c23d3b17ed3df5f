use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use sparse_qubo::anneal::{solve_sa, AnnealSchedule};
use sparse_qubo::exhaustive::{solve_exhaustive_qubo, solve_exhaustive_sparse};
use sparse_qubo::linalg::{residual_sq, sq_norm, Matrix};
use sparse_qubo::metrics::{oracle_tune, support_error, Metric};
use sparse_qubo::qubo::{build_l0_qubo, build_l2_qubo, build_sparse_coding_qubo};
use sparse_qubo::rng::rng_from_seed;
use sparse_qubo::{omp, FixedPointFormat};

fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = rng_from_seed(seed);
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn gaussian_vec(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Format with `n` coordinates, `bits` bits each, random scales and a representable zero.
fn format_strategy(n: usize, bits: usize) -> impl Strategy<Value = FixedPointFormat> {
    let levels = 1u64 << bits;
    (
        prop::collection::vec(0..levels, n),
        prop::collection::vec(
            prop_oneof![Just(1.0), Just(0.5), Just(0.25), Just(2.0), 0.1f64..3.0],
            n,
        ),
    )
        .prop_map(move |(zero, d)| {
            let c_min = zero
                .iter()
                .zip(&d)
                .map(|(&z, &di)| -(z as f64) * di)
                .collect();
            FixedPointFormat::new(c_min, d, bits).unwrap()
        })
}

fn sized_format() -> impl Strategy<Value = FixedPointFormat> {
    (1usize..=5, 1usize..=4).prop_flat_map(|(n, bits)| format_strategy(n, bits))
}

fn bits_of(mask: u64, len: usize) -> Vec<u8> {
    (0..len).map(|a| ((mask >> a) & 1) as u8).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decode_encode_roundtrip(format in sized_format(), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let q: Vec<u8> = (0..format.data_spins()).map(|_| rng.random_range(0..2u8)).collect();
        let x = format.decode_vector(&q).unwrap();
        let back = format.encode_vector(&x, false).unwrap();
        prop_assert_eq!(back.as_slice(), q.as_slice());
        prop_assert_eq!(format.decode_vector(&back).unwrap(), x.clone());
        let nnz = x.iter().filter(|v| **v != 0.0).count();
        prop_assert_eq!(nnz, format.block_cardinality(&q));
    }

    #[test]
    fn zero_code_is_unique_zero(format in sized_format()) {
        for i in 0..format.len() {
            let p = format.bits();
            let zeros: Vec<u64> = (0..1u64 << p)
                .filter(|&c| format.decode_coordinate(i, &bits_of(c, p)) == 0.0)
                .collect();
            prop_assert_eq!(zeros, vec![format.zero_code_value(i)]);
            prop_assert_eq!(bits_of(format.zero_code_value(i), p), format.zero_code(i));
        }
    }

    #[test]
    fn l2_energy_equals_residual(format in sized_format(), m in 1usize..6, seed in any::<u64>()) {
        let n = format.len();
        let a = gaussian_matrix(m, n, seed);
        let b = gaussian_vec(m, seed ^ 1);
        let qubo = build_l2_qubo(&a, &b, &format).unwrap();
        let tol = 1e-9 * (1.0 + sq_norm(&b));
        let d = qubo.dim();
        let masks: Vec<u64> = if d <= 14 {
            (0..1u64 << d).collect()
        } else {
            let mut rng = rng_from_seed(seed ^ 2);
            (0..2000).map(|_| rng.random::<u64>() & ((1 << d) - 1)).collect()
        };
        for mask in masks {
            let q = bits_of(mask, d);
            let x = format.decode_vector(&q).unwrap();
            prop_assert!((qubo.energy(&q) - residual_sq(&a, &x, &b)).abs() <= tol);
        }
        // symmetric
        let w = qubo.matrix();
        for i in 0..d {
            for j in 0..i {
                prop_assert_eq!(w[(i, j)], w[(j, i)]);
            }
        }
    }

    #[test]
    fn l2_energy_scales_quadratically(format in sized_format(), m in 1usize..5, t in 0.1f64..4.0, seed in any::<u64>()) {
        let n = format.len();
        let a = gaussian_matrix(m, n, seed);
        let b = gaussian_vec(m, seed ^ 3);
        let scaled_a = Matrix::from_fn(m, n, |i, j| t * a[(i, j)]);
        let scaled_b: Vec<f64> = b.iter().map(|v| t * v).collect();
        let q1 = build_l2_qubo(&a, &b, &format).unwrap();
        let q2 = build_l2_qubo(&scaled_a, &scaled_b, &format).unwrap();
        let mut rng = rng_from_seed(seed ^ 4);
        for _ in 0..32 {
            let q: Vec<u8> = (0..q1.dim()).map(|_| rng.random_range(0..2u8)).collect();
            let (e1, e2) = (q1.energy(&q), q2.energy(&q));
            prop_assert!((e2 - t * t * e1).abs() <= 1e-8 * (1.0 + e2.abs()));
        }
    }

    #[test]
    fn l0_min_over_ancillas_is_cardinality(format in (1usize..=3, 1usize..=5).prop_flat_map(|(n, p)| format_strategy(n, p))) {
        let qubo = build_l0_qubo(&format).unwrap();
        let n = format.len();
        let data = format.data_spins();
        let n_anc = qubo.n_ancilla();
        prop_assert_eq!(n_anc, if format.bits() >= 3 { n } else { 0 });
        for mask in 0..1u64 << data {
            let q = bits_of(mask, data);
            let card = format.block_cardinality(&q) as f64;
            let mut values = Vec::new();
            for anc in 0..1u64 << n_anc {
                let mut full = q.clone();
                full.extend(bits_of(anc, n_anc));
                values.push(qubo.energy(&full));
            }
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(min, card);
            // no ancilla setting undercuts the cardinality
            prop_assert!(values.iter().all(|v| *v >= card));
        }
    }

    #[test]
    fn support_error_symmetric_and_scale_invariant(
        x in prop::collection::vec(prop_oneof![Just(0.0), -3.0f64..3.0], 1..12),
        y_seed in any::<u64>(),
        c in prop_oneof![1.0f64..10.0, -10.0f64..-1.0],
    ) {
        let mut rng = rng_from_seed(y_seed);
        let y: Vec<f64> = x.iter().map(|_| if rng.random::<bool>() { 0.0 } else { rng.random_range(-2.0..2.0) }).collect();
        let e = support_error(&x, &y, 1e-6).unwrap();
        prop_assert_eq!(e, support_error(&y, &x, 1e-6).unwrap());
        let scaled: Vec<f64> = y.iter().map(|v| c * v).collect();
        prop_assert_eq!(e, support_error(&x, &scaled, 1e-6).unwrap());
    }
}

#[test]
fn joint_optimum_three_bit() {
    // N = 3, P = 3, lambda = 0.5: 2^12 extended spins vs 512 signals.
    let (m, n, lambda) = (4, 3, 0.5);
    let a = gaussian_matrix(m, n, 77);
    let b = gaussian_vec(m, 78);
    let format = FixedPointFormat::uniform(n, -3.0, 1.0, 3).unwrap();
    let qubo = build_sparse_coding_qubo(&a, &b, &format, lambda).unwrap();
    assert_eq!(qubo.dim(), 12);
    let best_qubo = (0..1u64 << 12)
        .map(|mask| qubo.energy(&bits_of(mask, 12)))
        .fold(f64::INFINITY, f64::min);
    let mut best_direct = f64::INFINITY;
    for mask in 0..1u64 << 9 {
        let x = format.decode_vector(&bits_of(mask, 9)).unwrap();
        let nnz = x.iter().filter(|v| **v != 0.0).count() as f64;
        best_direct = best_direct.min(residual_sq(&a, &x, &b) + lambda * nnz);
    }
    assert!((best_qubo - best_direct).abs() < 1e-9);
}

#[test]
fn annealer_matches_enumeration_on_random_problems() {
    let mut hits = 0;
    for seed in 0..100u64 {
        let mut rng = rng_from_seed(seed);
        let d = 16;
        let mut w = Matrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let v: f64 = rng.sample(StandardNormal);
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
        let p = sparse_qubo::QuboProblem::from_matrix(w, 0.0).unwrap();
        let exact = solve_exhaustive_qubo(&p).unwrap();
        let schedule = AnnealSchedule::auto(&p, 2000, 32, seed);
        let sa = solve_sa(&p, &schedule).unwrap();
        assert!(exact.energy <= sa.energy + 1e-9);
        if (sa.energy - exact.energy).abs() <= 1e-9 {
            hits += 1;
        }
    }
    assert!(hits >= 95, "{hits}/100");
}

#[test]
fn exhaustive_sparse_residual_non_increasing_in_k() {
    let a = gaussian_matrix(6, 10, 5);
    let b = gaussian_vec(6, 6);
    let residuals: Vec<f64> = (0..=6)
        .map(|k| residual_sq(&a, &solve_exhaustive_sparse(&a, &b, k).unwrap(), &b))
        .collect();
    assert!(
        residuals.windows(2).all(|w| w[1] <= w[0] + 1e-12),
        "{residuals:?}"
    );
}

#[test]
fn oracle_reports_reproducible_error() {
    let a = sparse_qubo::instance::generate_low_coherence_matrix(8, 16, 0.02, 500, 1).unwrap();
    let mut x = vec![0.0; 16];
    x[3] = 1.0;
    x[8] = 1.0;
    let b = sparse_qubo::instance::synthesize_measurements(&a, &x, 0.1, 2).unwrap();
    let method = |k: f64| omp(&a, &b, k as usize);
    let grid = [1.0, 2.0, 3.0, 4.0];
    let tuned = oracle_tune(method, &grid, &x, Metric::Reconstruction, 1e-6).unwrap();
    let again = omp(&a, &b, tuned.param as usize).unwrap();
    assert_eq!(again, tuned.estimate);
    for &k in &grid {
        let e = sparse_qubo::reconstruction_error(&x, &omp(&a, &b, k as usize).unwrap()).unwrap();
        assert!(tuned.error <= e);
    }
}

#[test]
fn oracle_finds_exact_lambda_on_noiseless_instance() {
    let a = sparse_qubo::instance::generate_low_coherence_matrix(8, 10, 0.02, 1000, 3).unwrap();
    let format = FixedPointFormat::binary(10);
    let mut x = vec![0.0; 10];
    x[1] = 1.0;
    x[6] = 1.0;
    let b = a.mul_vec(&x);
    let method = |lambda: f64| {
        let p = build_sparse_coding_qubo(&a, &b, &format, lambda)?;
        Ok(solve_exhaustive_qubo(&p)?.x_hat)
    };
    let grid = sparse_qubo::metrics::qubo_lambda_grid(&b, 10);
    let tuned = oracle_tune(method, &grid, &x, Metric::Reconstruction, 1e-6).unwrap();
    assert_eq!(tuned.error, 0.0);
}
