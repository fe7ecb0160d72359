use std::sync::Arc;

use migr_scatter::fft::{fft_forward, fft_inverse};
use migr_scatter::geometry::{fibonacci_sphere, gaussian_bump};
use migr_scatter::migr::{synthesize_migr, MigrSpec};
use migr_scatter::recovery::{band_correlation, hermitian_complete, CorrelationEstimate};
use migr_scatter::rsgf::{decode, encode, AnyField};
use migr_scatter::scatter::{far_field, AcquisitionKind, FarFieldMeta, FarFieldSet, ScatteringConfig};
use migr_scatter::{ComplexField, GridSpec, ScalarField};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid8() -> GridSpec {
    GridSpec::centered_cube(8, 1.0).unwrap()
}

fn complex_data(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

fn band_set(values: &[Complex64], delta: f64, k0: f64) -> FarFieldSet {
    let ks: Vec<f64> = (0..values.len()).map(|j| k0 + j as f64 * delta).collect();
    let meta = FarFieldMeta { kind: AcquisitionKind::Passive, m: Some(2.5), seed: 0, delta };
    let mut set = FarFieldSet::new(meta, vec![[0.0, 0.0, 1.0]], ks).unwrap();
    for (j, &v) in values.iter().enumerate() {
        set.set(0, j, v);
    }
    set
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rsgf_roundtrip_is_exact(data in prop::collection::vec(-1e6..1e6f64, 512), cdata in complex_data(512)) {
        let real = AnyField::Real(ScalarField::new(grid8(), data).unwrap());
        prop_assert_eq!(&decode(&encode(&real)).unwrap(), &real);
        let cplx = AnyField::Complex(ComplexField::new(grid8(), cdata).unwrap());
        prop_assert_eq!(&decode(&encode(&cplx)).unwrap(), &cplx);
    }

    #[test]
    fn fft_is_unitary_and_invertible(data in complex_data(512)) {
        let f = ComplexField::new(grid8(), data).unwrap();
        let spec = fft_forward(&f);
        prop_assert!((spec.norm() - f.norm()).abs() <= 1e-12 * f.norm().max(1.0));
        let back = fft_inverse(&spec);
        for (a, b) in back.data().iter().zip(f.data()) {
            prop_assert!((a - b).norm() <= 1e-9 * f.norm().max(1.0));
        }
    }

    #[test]
    fn band_estimator_is_quadratic_and_real_at_zero_shift(
        data in complex_data(48),
        c in (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b)| Complex64::new(a, b)),
    ) {
        let base = band_set(&data, 0.25, 4.0);
        let scaled = base.scaled(c);
        for tau in [0.0, 0.5, 2.0] {
            let a = band_correlation(&base, 2.5, tau, [0.0, 0.0, 1.0], 4.0).unwrap().value;
            let b = band_correlation(&scaled, 2.5, tau, [0.0, 0.0, 1.0], 4.0).unwrap().value;
            prop_assert!((b - a * c.norm_sqr()).norm() <= 1e-10 * (a.norm() * c.norm_sqr()).max(1e-300));
        }
        let zero = band_correlation(&base, 2.5, 0.0, [0.0, 0.0, 1.0], 4.0).unwrap().value;
        prop_assert!(zero.re >= 0.0 && zero.im.abs() <= 1e-12 * zero.re.max(1e-300));
    }

    #[test]
    fn hermitian_completion_conjugates_the_mirror(
        values in complex_data(6),
        tilt in -0.9..0.9f64,
    ) {
        let n = [0.0, 0.0, 1.0];
        let z = (1.0 - tilt * tilt).sqrt();
        let dirs = [[tilt, 0.0, z], [0.0, tilt, z], [-tilt, 0.0, z]];
        let samples: Vec<CorrelationEstimate> = dirs
            .iter()
            .zip(values.chunks(2))
            .flat_map(|(&dir, v)| {
                [0.5, 1.0].into_iter().zip(v.iter().copied()).map(move |(tau, value)| CorrelationEstimate {
                    tau, dir, band: [4.0, 8.0], value, n_terms: 16,
                })
            })
            .collect();
        let full = hermitian_complete(&samples, n).unwrap();
        prop_assert_eq!(full.len(), 2 * samples.len());
        for s in &samples {
            let m = full
                .iter()
                .find(|p| p.tau == s.tau && p.dir == [-s.dir[0], -s.dir[1], -s.dir[2]])
                .unwrap();
            prop_assert_eq!(m.value, s.value.conj());
        }
    }

    #[test]
    fn far_field_is_linear_in_the_source(
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        k in 0.5..12.0f64,
        cx in -0.1..0.1f64,
    ) {
        let grid = GridSpec::centered_cube(16, 2.0).unwrap();
        let f = gaussian_bump(grid, [cx, 0.0, 0.0], 1.0, 0.1, 0.3).unwrap();
        let g = gaussian_bump(grid, [0.0, 0.1, -cx], 2.0, 0.08, 0.3).unwrap();
        let sum = ScalarField::new(grid, f.data().iter().zip(g.data()).map(|(x, y)| a * x + b * y).collect()).unwrap();
        let dirs = fibonacci_sphere(5);
        let ff = |s: ScalarField| far_field(&ScatteringConfig::new(grid, k).with_source(Arc::new(s)), None, &dirs).unwrap();
        let (uf, ug, us) = (ff(f), ff(g), ff(sum));
        for ((x, y), z) in uf.iter().zip(&ug).zip(&us) {
            let want = x * a + y * b;
            prop_assert!((z - want).norm() <= 1e-12 * (x.norm() * a.abs() + y.norm() * b.abs()).max(1e-12));
        }
    }

    #[test]
    fn realization_scales_with_root_of_strength(c in 0.1..10.0f64, seed in 0u64..1000) {
        let grid = GridSpec::centered_cube(16, 2.0).unwrap();
        let mu = gaussian_bump(grid, [0.0; 3], 1.0, 0.1, 0.4).unwrap();
        let spec = Arc::new(MigrSpec::centered(2.5, mu).unwrap());
        let scaled = Arc::new(spec.with_scaled_strength(c).unwrap());
        let f = synthesize_migr(&spec, seed).unwrap().field;
        let g = synthesize_migr(&scaled, seed).unwrap().field;
        let r = c.sqrt();
        for (x, y) in f.data().iter().zip(g.data()) {
            prop_assert!((y - r * x).abs() <= 1e-12 * (r * x.abs()).max(1e-12));
        }
        // support stays inside the strength support
        for (x, m) in f.data().iter().zip(spec.strength().data()) {
            if *m == 0.0 {
                prop_assert_eq!(*x, 0.0);
            }
        }
    }
}
