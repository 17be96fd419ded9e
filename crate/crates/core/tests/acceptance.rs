//! Acceptance report: one PASS/FAIL line per criterion, non-zero exit on failure.
//!
//! Run with `cargo test -p upconv-core --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use upconv_core::hbt::{DEFAULT_BACKGROUND_WINDOW, DEFAULT_BIN_WIDTH, DEFAULT_TAU_MAX};
use upconv_core::interference::{noiseless_fringe_scan, phase_grid, sigma_from_coherence_time, BIPHOTON_COHERENCE_TIME};
use upconv_core::photostream::two_photon_law;
use upconv_core::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn dims() -> (FockDim, FockDim) {
    (FockDim::new(50).unwrap(), FockDim::new(10).unwrap())
}

fn cascade_statistics() -> Result<Outcome> {
    let start = Instant::now();
    let r = run_cascade(&CascadeConfig::reference())?;
    let secs = start.elapsed().as_secs_f64();
    let pass = within(r.g2_sfg, 11.3, 0.1)
        && within(r.purity_sfg, 0.999997, 2e-6)
        && within(r.fidelity_coherent, 0.99998, 2e-5)
        && within(r.nbar_sfg, 1.0e-5, 1e-7)
        && secs < 10.0;
    Ok(outcome(
        pass,
        format!(
            "g2={:.4} purity={:.7} fidelity={:.6} nbar={:.4e} ({secs:.2} s)",
            r.g2_sfg, r.purity_sfg, r.fidelity_coherent, r.nbar_sfg
        ),
    ))
}

fn kappa_calibration() -> Result<Outcome> {
    let (da, db) = dims();
    let kappa = calibrate_kappa(0.1, 1e-5, da, db)?;
    Ok(outcome(within(kappa, 8.7715e-3, 1e-6), format!("kappa={kappa:.7e}")))
}

/// Squeezed-vacuum factorial moments summed from the closed-form coefficients.
fn squeezed_moments(nbar: f64, terms: usize) -> (f64, f64) {
    let r = nbar.sqrt().asinh();
    let t = r.tanh();
    let mut moments = [0.0f64; 5];
    let mut log_c2 = -r.cosh().ln(); // |c_0|²
    for n in 0..terms {
        if n > 0 {
            // |c_n|² / |c_{n-1}|² = t² (2n)(2n−1) / (4n²)
            log_c2 += 2.0 * t.ln() + ((2 * n) as f64).ln() + ((2 * n - 1) as f64).ln() - (4.0 * (n * n) as f64).ln();
        }
        let p = log_c2.exp();
        let m = 2 * n;
        let mut falling = 1.0;
        for (k, slot) in moments.iter_mut().enumerate() {
            if k > 0 {
                falling *= m as f64 - (k as f64 - 1.0);
            }
            *slot += p * falling.max(0.0);
        }
    }
    let g2 = moments[2] / moments[1].powi(2);
    let g4 = moments[4] / moments[1].powi(4);
    (g2, g4)
}

fn ratio_law() -> Result<Outcome> {
    let nbar = 0.1;
    let (g2_ref, g4_ref) = squeezed_moments(nbar, 400);
    let mut worst = 0.0f64;
    let mut pass = within(g2_ref, 3.0 + 1.0 / nbar, 1e-9);
    let (da, db) = dims();
    for target in [1e-6, 1e-5, 1e-4] {
        let kappa = calibrate_kappa(nbar, target, da, db)?;
        let r = run_cascade(&CascadeConfig { kappa, ..CascadeConfig::reference() })?;
        let predicted = g4_ref / (g2_ref * g2_ref);
        let rel = ((r.g2_sfg - predicted) / r.g2_sfg).abs();
        worst = worst.max(rel);
        pass &= r.nbar_sfg <= 1e-4 * (1.0 + 1e-3) && rel <= 1e-2;
        pass &= within(r.g2_spdc, g2_ref, 1e-6);
    }
    Ok(outcome(
        pass,
        format!("oracle g2_spdc={g2_ref:.6} prediction={:.4}, worst relative gap {worst:.2e}", g4_ref / (g2_ref * g2_ref)),
    ))
}

fn reference_statistics() -> Result<Outcome> {
    let dim = FockDim::new(10).unwrap();
    let thermal = thermal_density(1e-5, dim)?;
    let g2_th = coherence_order(thermal.state(), 2)?;
    let alpha = CoherentAmplitude::from_mean_photon_number(1e-5)?;
    let coherent = coherent_state(alpha, dim)?;
    let g2_coh = coherence_order(coherent.amplitudes(), 2)?;
    Ok(outcome(
        within(g2_th, 2.0, 1e-6) && within(g2_coh, 1.0, 1e-9),
        format!("thermal g2={g2_th:.9} coherent g2={g2_coh:.12}"),
    ))
}

fn doubled_fringe() -> Result<Outcome> {
    let jsa = EffectiveJsa::default_biphoton();
    let template = SpectralPhase::default();
    let rates = ArmRates::reference();
    let phi = phase_grid(0.0, 3.0 * PI, PI / 9.0)?;
    let clean = noiseless_fringe_scan(&jsa, &template, &phi, &rates, 0.1)?;
    let est = fit_fringe_frequency(&phi, &clean.counts, &vec![1.0; phi.len()], 0.25, 1.0)?;
    let mut pass = within(est.frequency, 0.5, 5e-4);

    let seeds = 100;
    let mut freqs = Vec::with_capacity(seeds);
    let mut inside = 0;
    for seed in 0..seeds as u64 {
        let scan = simulate_fringe_scan(&jsa, &template, &phi, &rates, 0.1, seed)?;
        let sigmas: Vec<f64> = scan.counts.iter().map(|c| c.max(1.0).sqrt()).collect();
        let e = fit_fringe_frequency(&phi, &scan.counts, &sigmas, 0.25, 1.0)?;
        if (e.frequency - 0.5).abs() <= 3.0 * e.error {
            inside += 1;
        }
        freqs.push(e.frequency);
    }
    let n = freqs.len() as f64;
    let mean = freqs.iter().sum::<f64>() / n;
    let sd = (freqs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let se = sd / n.sqrt();
    pass &= (mean - 0.5).abs() <= 3.0 * se && inside as f64 >= 0.95 * n;
    Ok(outcome(
        pass,
        format!(
            "noiseless f={:.6}; noisy mean f={mean:.5} ± {se:.5}, {inside}/{seeds} seeds within 3 sigma",
            est.frequency
        ),
    ))
}

fn visibility_arithmetic() -> Result<Outcome> {
    let v = visibility_from_rates(344.4, 568.8, 202.9)?;
    let ratio = indistinguishability(0.738, v)?;
    Ok(outcome(within(v, 0.897, 1e-3) && within(ratio, 0.823, 2e-3), format!("V_max={v:.4} V/V_max={ratio:.4}")))
}

fn odd_order_cancellation() -> Result<Outcome> {
    let jsa = EffectiveJsa::default_biphoton();
    let s = sigma_from_coherence_time(BIPHOTON_COHERENCE_TIME);
    let base = SpectralPhase { phi0: 0.3, beta: 1.0 / (s * s), ..Default::default() };
    let g0 = g_amplitude(&jsa, &base)?;
    // Direct oracle: both photons' full single-photon phases summed node by node.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut worst_direct = 0.0f64;
    for _ in 0..100 {
        let p = SpectralPhase {
            alpha: rng.random_range(-40.0..40.0) / s,
            gamma: rng.random_range(-40.0..40.0) / (s * s * s),
            ..base
        };
        worst = worst.max((g_amplitude(&jsa, &p)? - g0).norm());
        let (mut acc, mut norm) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for ((&o, &w), &a) in jsa.grid().nodes.iter().zip(&jsa.grid().weights).zip(jsa.amplitudes()) {
            let phase = p.single_photon(jsa.omega0(), o) + p.single_photon(jsa.omega0(), -o);
            acc += a * w * C64::from_polar(1.0, phase);
            norm += a * w;
        }
        worst_direct = worst_direct.max((acc / norm - g0).norm());
    }
    Ok(outcome(
        worst <= 1e-10 && worst_direct <= 1e-10,
        format!("max |dg| = {worst:.1e} (direct per-photon sum: {worst_direct:.1e})"),
    ))
}

fn quadrature_oracle() -> Result<Outcome> {
    let jsa = EffectiveJsa::default_biphoton();
    let s = jsa.sigma();
    let mut worst = 0.0f64;
    for x in [0.5, 1.0, 2.0] {
        let g = g_amplitude(&jsa, &SpectralPhase { beta: x / (s * s), ..Default::default() })?;
        worst = worst.max((g.norm() - (1.0 + x * x).powf(-0.25)).abs());
    }
    Ok(outcome(worst <= 1e-6, format!("max deviation from closed form {worst:.1e}")))
}

fn hbt_pipeline() -> Result<Outcome> {
    let start = Instant::now();
    let det = DetectorModel::default();
    let tc = 200e-9;
    let source_rate = 4_000.0;
    let duration = 3_600.0;
    let mut lines = Vec::new();
    let mut pass = true;
    let mut events = 0usize;
    for (g, source) in [
        (2.0, SourceModel::Thermal { mean_rate: source_rate, coherence_time: tc }),
        (8.5, SourceModel::Bunched { mean_rate: source_rate, coherence_time: tc, pn: two_photon_law(source_rate * tc, 8.5)? }),
    ] {
        let pair = split_stream(&source, &det, &det, duration, 2024)?;
        events += pair.first.len() + pair.second.len();
        let h = cross_correlate(&pair.first, &pair.second, DEFAULT_BIN_WIDTH, DEFAULT_TAU_MAX)?;
        let h = normalize_g2(&h, DEFAULT_BACKGROUND_WINDOW)?;
        let n = h.normalization.as_ref().unwrap();
        let c = h.center_index();
        let (g0, err) = (n.g2[c], n.g2_errors[c]);
        pass &= (g0 - g).abs() <= 3.0 * err;
        lines.push(format!("G={g}: g2(0)={g0:.3}±{err:.3}"));
    }
    pass &= events >= 1_000_000;

    let coherent = SourceModel::Coherent { mean_rate: 5_000.0 };
    let (mut beyond, mut bins) = (0usize, 0usize);
    for seed in 0..100u64 {
        let a = generate_stream(&coherent, &det, 200.0, 2 * seed)?;
        let b = generate_stream(&coherent, &det, 200.0, 2 * seed + 1)?;
        let h = normalize_g2(&cross_correlate(&a, &b, DEFAULT_BIN_WIDTH, DEFAULT_TAU_MAX)?, DEFAULT_BACKGROUND_WINDOW)?;
        let n = h.normalization.unwrap();
        beyond += n.g2.iter().zip(&n.g2_errors).filter(|(g, e)| (*g - 1.0).abs() > 3.0 * *e).count();
        bins += n.g2.len();
    }
    let frac = beyond as f64 / bins as f64;
    let secs = start.elapsed().as_secs_f64();
    pass &= frac <= 0.01 && secs < 60.0;
    Ok(outcome(
        pass,
        format!("{}; {events} events; flat: {:.2}% bins beyond 3 sigma ({secs:.1} s)", lines.join(", "), 100.0 * frac),
    ))
}

fn correlator_correctness() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut mismatches = 0;
    for _ in 0..50 {
        let draw = |rng: &mut ChaCha8Rng| {
            let n = rng.random_range(1..=1000);
            let span = rng.random_range(1_000_000u64..50_000_000);
            let mut v: Vec<u64> = (0..n).map(|_| rng.random_range(0..span)).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let (t1, t2) = (draw(&mut rng), draw(&mut rng));
        let w = rng.random_range(1_000i64..20_000);
        let tau = rng.random_range(0i64..1_000_000);
        let s = |ts: &Vec<u64>| TimeTagStream {
            timestamps: ts.clone(),
            duration_ps: *ts.last().unwrap(),
            resolution_ps: 1,
            detector: None,
        };
        let h = cross_correlate(&s(&t1), &s(&t2), w as f64 * 1e-12, tau as f64 * 1e-12)?;
        let half = (tau + w / 2) / w;
        let mut reference = vec![0u64; (2 * half + 1) as usize];
        for &a in &t1 {
            for &b in &t2 {
                let d = b as i64 - a as i64;
                if d.abs() <= tau {
                    let k = (d as f64 / w as f64 + 0.5).floor() as i64;
                    reference[(k + half) as usize] += 1;
                }
            }
        }
        if h.counts != reference {
            mismatches += 1;
        }
    }
    Ok(outcome(mismatches == 0, format!("{mismatches}/50 histograms differ from all-pairs count")))
}

fn peak_arithmetic() -> Result<Outcome> {
    // 301 bins of 10 ns; |τ| ∈ [260 ns, 1.5 µs] selects 250 bins holding 1115 counts.
    let mut counts = vec![4u64; 301];
    let window: Vec<usize> = (0..301).filter(|&i| (i as i64 - 150).abs() >= 26).collect();
    for &i in window.iter().take(115) {
        counts[i] = 5;
    }
    counts[150] = 38;
    let h = hbt::CorrelationHistogram::from_counts(10_000, counts)?;
    let h = normalize_g2(&h, (260e-9, 1.5e-6))?;
    let p = peak_statistics(&h).unwrap();
    let n = h.normalization.as_ref().unwrap();
    let pass = n.window_bins == 250
        && within(n.background, 4.46, 1e-12)
        && p.tau == 0.0
        && within(p.g2, 8.5, 0.05)
        && within(p.g2_error, 1.4, 0.05)
        && p.significance > 5.0;
    Ok(outcome(
        pass,
        format!(
            "background {:.2}±{:.2}, g2(0)={:.2}±{:.2}, significance {:.2}",
            n.background, n.background_error, p.g2, p.g2_error, p.significance
        ),
    ))
}

fn conservation() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (da, db) = (FockDim::new(16).unwrap(), FockDim::new(6).unwrap());
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mut psi: Vec<C64> = (0..96).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|c| *c /= norm);
        let state = TwoModeState::pure(psi, da, db)?;
        let kappa = rng.random_range(0.0..0.5);
        let out = apply_sfg(&state, kappa)?;
        let n = |s: &TwoModeState| s.expect_diagonal(|a, b| (a + 2 * b) as f64);
        worst = worst.max((n(&out) - n(&state)).abs());
    }
    Ok(outcome(worst <= 1e-8, format!("max change of <N_A + 2 N_B> = {worst:.1e}")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 12] = [
        ("cascade statistics", cascade_statistics),
        ("kappa calibration", kappa_calibration),
        ("low-gain ratio law", ratio_law),
        ("reference statistics", reference_statistics),
        ("doubled fringe frequency", doubled_fringe),
        ("visibility arithmetic", visibility_arithmetic),
        ("odd-order cancellation", odd_order_cancellation),
        ("quadrature oracle", quadrature_oracle),
        ("HBT pipeline", hbt_pipeline),
        ("correlator vs all-pairs", correlator_correctness),
        ("peak significance", peak_arithmetic),
        ("weighted number conservation", conservation),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error[{}]: {e}", e.code())),
        };
        if !pass {
            failures += 1;
        }
        println!("{} {:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {}/{} passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
