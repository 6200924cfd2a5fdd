mod common;

use lattice_precoder::exact::ratio;
use lattice_precoder::lattice::min_distance;
use lattice_precoder::precoder::{
    build_precoder, complexify_vector, evaluate_precoder, gmd_precoder, gmd_result, objective, objective_f64,
    realify_matrix, realify_vector, spectrum_of, ChannelSpectrum,
};
use lattice_precoder::QuadraticForm;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use common::{random_form, random_spectrum, rng};

fn random_orthogonal<R: Rng>(r: &mut R, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0)).qr().q()
}

fn spectrum(n: usize) -> impl Strategy<Value = ChannelSpectrum> {
    prop::collection::vec(0.1f64..10.0, n).prop_map(|s| ChannelSpectrum::new(s).unwrap())
}

fn complex_matrix(n: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), n * n)
        .prop_map(move |v| DMatrix::from_fn(n, n, |i, j| Complex64::new(v[i * n + j].0, v[i * n + j].1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_cannot_beat_objective(n in 3usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_form(&mut r, n, 64);
        let s = random_spectrum(&mut r, n, 0.2, 5.0);
        let best = objective(&g, &s).unwrap();
        let s_inv2 = DMatrix::from_diagonal(&DVector::from_iterator(n, s.values().iter().map(|x| 1.0 / (x * x))));
        for _ in 0..4 {
            let u = random_orthogonal(&mut r, n);
            let power = (&s_inv2 * &u * g.as_f64() * u.transpose()).trace();
            prop_assert!(power >= best - 1e-9);
        }
        // the eigenvector rotation attains it
        let f = build_precoder(&g, &s).unwrap().f;
        prop_assert!(((&f * f.transpose()).trace() - best).abs() <= 1e-9 * best);
    }

    #[test]
    fn precoder_power_matches_objective(n in 2usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_form(&mut r, n, 64);
        let s = random_spectrum(&mut r, n, 0.2, 5.0);
        let res = build_precoder(&g, &s).unwrap();
        let p = objective(&g, &s).unwrap();
        prop_assert!((res.power - p).abs() <= 1e-9 * p);
        // the received Gram is G itself
        let b = s.matrix() * &res.f;
        prop_assert!(((b.transpose() * b) - g.as_f64()).abs().max() < 1e-9 * g.as_f64().abs().max());
        prop_assert_eq!(res.dmin2, lattice_precoder::exact::to_f64(&min_distance(&g).unwrap().form_min));
    }

    #[test]
    fn objective_is_concave(n in 2usize..=4, seed in any::<u64>(), k in 1i128..10) {
        let mut r = rng(seed);
        let (g1, g2) = (random_form(&mut r, n, 64), random_form(&mut r, n, 64));
        let s = random_spectrum(&mut r, n, 0.1, 10.0);
        let (a, b) = (ratio(k, 10), ratio(10 - k, 10));
        let mix = QuadraticForm::from_packed(n, g1.packed().iter().zip(g2.packed()).map(|(x, y)| a * x + b * y).collect()).unwrap();
        let gamma = k as f64 / 10.0;
        let rhs = gamma * objective(&g1, &s).unwrap() + (1.0 - gamma) * objective(&g2, &s).unwrap();
        prop_assert!(objective(&mix, &s).unwrap() >= rhs - 1e-9);
    }

    #[test]
    fn gmd_meets_the_floor(s in (2usize..=4).prop_flat_map(spectrum)) {
        let n = s.dim() as f64;
        let res = gmd_result(&s).unwrap();
        prop_assert!(res.normalized_dmin2 >= s.det().powf(2.0 / n) / n - 1e-9);
        let d = gmd_precoder(&s).unwrap();
        let back = &d.w * s.matrix() * &d.f;
        prop_assert!((back - &d.r).abs().max() < 1e-10 * s.values()[0]);
        for i in 0..s.dim() {
            for j in 0..i {
                prop_assert!(d.r[(i, j)].abs() < 1e-10 * s.values()[0]);
            }
        }
    }

    #[test]
    fn normalized_distance_is_scale_free(s in (2usize..=4).prop_flat_map(spectrum)) {
        let f = gmd_precoder(&s).unwrap().f;
        let base = evaluate_precoder(&f, &s).unwrap().normalized_dmin2;
        for c in [0.5, 2.0, 10.0] {
            let scaled = evaluate_precoder(&(&f * c), &s).unwrap().normalized_dmin2;
            prop_assert!((scaled - base).abs() <= 1e-12 * base);
        }
    }

    #[test]
    fn realification_is_a_ring_map(a in (1usize..=3).prop_flat_map(complex_matrix), seed in any::<u64>()) {
        let n = a.nrows();
        let mut r = rng(seed);
        let b = DMatrix::from_fn(n, n, |_, _| Complex64::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)));
        let x: Vec<Complex64> = (0..n).map(|_| Complex64::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0))).collect();
        prop_assert!((realify_matrix(&(&a * &b)) - realify_matrix(&a) * realify_matrix(&b)).abs().max() < 1e-9);
        // the block layout acts on stacked vectors as the conjugate matrix
        let lhs = realify_matrix(&a) * DVector::from_vec(realify_vector(&x));
        let ax = a.map(|z| z.conj()) * DVector::from_vec(x.clone());
        prop_assert!((lhs - DVector::from_vec(realify_vector(ax.as_slice()))).abs().max() < 1e-9);
        prop_assert_eq!(complexify_vector(&realify_vector(&x)), x);
    }

    #[test]
    fn complex_spectrum_doubles(a in (1usize..=3).prop_flat_map(complex_matrix)) {
        prop_assume!(a.clone().svd(false, false).singular_values.min() > 1e-3);
        let complex_sv = {
            let mut v: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
            v.sort_by(|x, y| y.total_cmp(x));
            v
        };
        let (s, _, _) = spectrum_of(&realify_matrix(&a)).unwrap();
        for (k, v) in complex_sv.iter().enumerate() {
            prop_assert!((s.values()[2 * k] - v).abs() < 1e-9 * complex_sv[0]);
            prop_assert!((s.values()[2 * k + 1] - v).abs() < 1e-9 * complex_sv[0]);
        }
    }

    #[test]
    fn float_objective_agrees(n in 2usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_form(&mut r, n, 64);
        let s = random_spectrum(&mut r, n, 0.2, 5.0);
        prop_assert_eq!(objective(&g, &s).unwrap(), objective_f64(g.as_f64(), &s).unwrap());
    }
}

#[test]
fn identity_precoder_figures() {
    let s = ChannelSpectrum::new(vec![1.0, 1.0]).unwrap();
    let res = evaluate_precoder(&DMatrix::identity(2, 2), &s).unwrap();
    assert_eq!((res.dmin2, res.power, res.normalized_dmin2), (1.0, 2.0, 0.5));
}

#[test]
fn gmd_distance_exceeds_squared_diagonal() {
    let s = ChannelSpectrum::new(vec![4.0, 1.0]).unwrap();
    let d = gmd_precoder(&s).unwrap();
    let res = evaluate_precoder(&d.f, &s).unwrap();
    assert!(res.dmin2 >= 4.0 - 1e-9);
}
