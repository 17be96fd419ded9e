use num_complex::Complex64 as C64;
use proptest::prelude::*;
use upconv_core::cascade::{nbar_sfg, sfg_generator, EXPM_TOL};
use upconv_core::states::{SQUEEZED_TAIL_TOL, COHERENT_TAIL_TOL};
use upconv_core::{
    apply_sfg, calibrate_kappa, coherence_order, coherent_state, matrix_exponential, photon_number_distribution,
    squeezed_vacuum, thermal_density, CoherentAmplitude, ComplexMatrix, FockDim, SfgUnitary, SqueezeParam,
    TwoModeState,
};

fn dim(n: usize) -> FockDim {
    FockDim::new(n).unwrap()
}

fn random_state(da: usize, db: usize) -> impl Strategy<Value = TwoModeState> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), da * db).prop_map(move |v| {
        let mut psi: Vec<C64> = v.into_iter().map(|(r, i)| C64::new(r, i)).collect();
        psi[0] += C64::new(1.0, 0.0);
        let n = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|c| *c /= n);
        TwoModeState::pure(psi, dim(da), dim(db)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sfg_preserves_norm(psi in random_state(14, 6), kappa in 0.0..0.1f64) {
        let out = apply_sfg(&psi, kappa).unwrap();
        prop_assert!((out.norm_sqr().sqrt() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn sfg_conserves_weighted_number(psi in random_state(14, 6), kappa in 0.0..0.5f64) {
        let n = |s: &TwoModeState| s.expect_diagonal(|na, nb| (na + 2 * nb) as f64);
        let out = apply_sfg(&psi, kappa).unwrap();
        prop_assert!((n(&out) - n(&psi)).abs() <= 1e-8);
    }

    #[test]
    fn coherent_statistics_are_poissonian(re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let alpha = CoherentAmplitude::new(C64::new(re, im)).unwrap();
        prop_assume!(alpha.mean_photon_number() > 1e-3);
        let s = coherent_state(alpha, dim(60)).unwrap();
        let pn = photon_number_distribution(s.amplitudes()).unwrap();
        prop_assert!(pn.probs().iter().sum::<f64>() >= 1.0 - COHERENT_TAIL_TOL);
        for k in 1..=4 {
            prop_assert!((coherence_order(s.amplitudes(), k).unwrap() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn thermal_factorial_moments(nbar in 1e-3..0.5f64) {
        let rho = thermal_density(nbar, dim(80)).unwrap();
        let mut fact = 1.0;
        for k in 1..=4 {
            fact *= k as f64;
            prop_assert!((coherence_order(rho.state(), k).unwrap() - fact).abs() <= 1e-6);
        }
    }

    #[test]
    fn squeezed_vacuum_has_even_support(nbar in 1e-4..0.3f64, phase in -3.0..3.0f64) {
        let z = SqueezeParam::from_mean_photon_number(nbar, phase).unwrap();
        let s = squeezed_vacuum(z, dim(50)).unwrap();
        let pn = photon_number_distribution(s.amplitudes()).unwrap();
        prop_assert!(pn.probs().iter().skip(1).step_by(2).all(|&p| p == 0.0));
        prop_assert!(pn.probs().iter().sum::<f64>() >= 1.0 - SQUEEZED_TAIL_TOL);
    }
}

#[test]
fn squeezed_g2_approaches_closed_form() {
    let nbar = 0.1;
    let z = SqueezeParam::from_mean_photon_number(nbar, 0.0).unwrap();
    let g2_50 = coherence_order(squeezed_vacuum(z, dim(50)).unwrap().amplitudes(), 2).unwrap();
    assert!((g2_50 - (3.0 + 1.0 / nbar)).abs() <= 1e-6, "g2 {g2_50}");
    let g2_20 = coherence_order(squeezed_vacuum(z, dim(20)).unwrap().amplitudes(), 2).unwrap();
    assert!((g2_50 - 13.0).abs() <= (g2_20 - 13.0).abs());
}

#[test]
fn dense_unitary_is_unitary_at_default_dims() {
    let (da, db) = (dim(50), dim(10));
    let gen = sfg_generator(8.7715e-3, da, db);
    let u = matrix_exponential(&gen, EXPM_TOL).unwrap();
    let dev = u.adjoint().matmul(&u).unwrap().max_abs_diff(&ComplexMatrix::identity(500));
    assert!(dev <= 1e-10, "deviation {dev}");
    let blocks = SfgUnitary::new(8.7715e-3, da, db).unwrap().to_dense();
    assert!(blocks.max_abs_diff(&u) <= 1e-12);
}

#[test]
fn sfg_output_grows_with_coupling() {
    let mut last = -1.0;
    for i in 0..=25 {
        let kappa = 0.05 * i as f64 / 25.0;
        let n = nbar_sfg(0.1, kappa, dim(50), dim(10)).unwrap();
        assert!(n > last, "not increasing at kappa {kappa}");
        last = n;
    }
}

#[test]
fn calibration_round_trip() {
    for target in [1e-7, 1e-6, 1e-5, 1e-4] {
        let kappa = calibrate_kappa(0.1, target, dim(50), dim(10)).unwrap();
        let n = nbar_sfg(0.1, kappa, dim(50), dim(10)).unwrap();
        assert!(((n - target) / target).abs() <= 1e-4, "target {target}: got {n}");
    }
}
