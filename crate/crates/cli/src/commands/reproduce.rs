//! Reference configurations with their expected values and tolerances.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use upconv_core::hbt::{expected_background, significance, CorrelationHistogram, DEFAULT_BACKGROUND_WINDOW, DEFAULT_BIN_WIDTH, DEFAULT_TAU_MAX};
use upconv_core::interference::{noiseless_fringe_scan, phase_grid};
use upconv_core::photostream::two_photon_law;
use upconv_core::{
    calibrate_kappa, coherence_order, coherent_state, cross_correlate, fit_fringe_frequency, indistinguishability,
    normalize_g2, run_cascade, simulate_fringe_scan, split_stream, thermal_density, visibility_from_rates, ArmRates,
    CascadeConfig, CoherentAmplitude, DetectorModel, EffectiveJsa, FockDim, SourceModel, SpectralPhase,
};

use crate::output::{display, write_json, OutDir};
use crate::{Failure, Outcome};

/// Width of the seeded checks, in standard errors.
pub const STAT_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReproduceArgs {
    #[arg(long)]
    pub seed: u64,
    /// Multiplies the reference coupling strength.
    #[arg(long, default_value_t = 1.0)]
    pub kappa_scale: f64,
    #[arg(long, default_value = "reproduce.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// `within` (|value − expected| ≤ tolerance) or `at least`.
    pub relation: &'static str,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, expected: f64, tolerance: f64) -> Check {
    Check { name, value, expected, tolerance, relation: "within", pass: (value - expected).abs() <= tolerance }
}

fn at_least(name: &'static str, value: f64, bound: f64) -> Check {
    Check { name, value, expected: bound, tolerance: 0.0, relation: "at least", pass: value >= bound }
}

pub fn checks(seed: u64, kappa_scale: f64) -> Result<Vec<Check>, Failure> {
    let mut out = Vec::new();
    let base = CascadeConfig::reference();
    let r = run_cascade(&CascadeConfig { kappa: base.kappa * kappa_scale, ..base.clone() })?;
    out.push(check("cascade g2_sfg", r.g2_sfg, 11.3, 0.1));
    out.push(check("cascade purity", r.purity_sfg, 0.999997, 2e-6));
    out.push(check("cascade fidelity to coherent", r.fidelity_coherent, 0.99998, 2e-5));
    out.push(check("cascade nbar_sfg", r.nbar_sfg, 1e-5, 1e-7));
    let kappa = calibrate_kappa(0.1, 1e-5, base.dim_a, base.dim_b)?;
    out.push(check("calibrated kappa", kappa, 8.7715e-3, 1e-6));

    let dim = FockDim::new(10)?;
    out.push(check("thermal g2", coherence_order(thermal_density(1e-5, dim)?.state(), 2)?, 2.0, 1e-6));
    let coh = coherent_state(CoherentAmplitude::from_mean_photon_number(1e-5)?, dim)?;
    out.push(check("coherent g2", coherence_order(coh.amplitudes(), 2)?, 1.0, 1e-9));

    let rates = ArmRates::reference();
    let v_max = visibility_from_rates(rates.raw_a, rates.raw_b, rates.dark)?;
    out.push(check("maximal visibility", v_max, 0.897, 1e-3));
    out.push(check("indistinguishability", indistinguishability(0.738, v_max)?, 0.823, 2e-3));

    let jsa = EffectiveJsa::default_biphoton();
    let phi = phase_grid(0.0, 3.0 * PI, PI / 9.0)?;
    let template = SpectralPhase::default();
    let clean = noiseless_fringe_scan(&jsa, &template, &phi, &rates, 0.1)?;
    let est = fit_fringe_frequency(&phi, &clean.counts, &vec![1.0; phi.len()], 0.25, 1.0)?;
    out.push(check("fringe frequency, noiseless", est.frequency, 0.5, 5e-4));
    let noisy = simulate_fringe_scan(&jsa, &template, &phi, &rates, 0.1, seed)?;
    let sigmas: Vec<f64> = noisy.counts.iter().map(|c| c.max(1.0).sqrt()).collect();
    let est = fit_fringe_frequency(&phi, &noisy.counts, &sigmas, 0.25, 1.0)?;
    out.push(check("fringe frequency, Poisson noise", est.frequency, 0.5, STAT_SIGMAS * est.error));

    // 250 background bins summing to 1115 around a 38-count peak.
    let mut counts = vec![4u64; 301];
    let window: Vec<usize> = (0..301).filter(|&i| (i as i64 - 150).abs() >= 26).collect();
    window.iter().take(115).for_each(|&i| counts[i] = 5);
    counts[150] = 38;
    let h = normalize_g2(&CorrelationHistogram::from_counts(10_000, counts)?, (260e-9, 1.5e-6))?;
    let n = h.normalization.as_ref().unwrap();
    out.push(check("peak g2(0)", n.g2[150], 8.5, 0.05));
    out.push(check("peak g2(0) error", n.g2_errors[150], 1.4, 0.05));
    out.push(at_least("peak significance", significance(38.0, n.background, n.background_error), 5.0));
    let accidental = expected_background(60.9, 50.3, 40.0 * 3600.0, DEFAULT_BIN_WIDTH);
    out.push(check("accidental coincidences per bin", accidental, 4.46, 0.14));

    let tc = 200e-9;
    let source = SourceModel::Bunched { mean_rate: 2e4, coherence_time: tc, pn: two_photon_law(2e4 * tc, 8.5)? };
    let det = DetectorModel::default();
    let pair = split_stream(&source, &det, &det, 30.0, seed)?;
    let h = normalize_g2(&cross_correlate(&pair.first, &pair.second, DEFAULT_BIN_WIDTH, DEFAULT_TAU_MAX)?, DEFAULT_BACKGROUND_WINDOW)?;
    let c = h.center_index();
    let n = h.normalization.as_ref().unwrap();
    out.push(check("simulated bunched g2(0)", n.g2[c], 8.5, STAT_SIGMAS * n.g2_errors[c]));
    Ok(out)
}

#[derive(Serialize)]
struct Report<'a> {
    passed: usize,
    failed: usize,
    checks: &'a [Check],
}

pub fn run(args: &ReproduceArgs, out: &OutDir) -> Outcome {
    if !(args.kappa_scale.is_finite() && args.kappa_scale >= 0.0) {
        return Err(Failure::usage(format!("--kappa-scale must be non-negative, got {}", args.kappa_scale)));
    }
    let list = checks(args.seed, args.kappa_scale)?;
    let failed = list.iter().filter(|c| !c.pass).count();
    let path = out.prepare(&args.out)?;
    write_json(&path, "reproduce", args, &Report { passed: list.len() - failed, failed, checks: &list })?;

    let mut text = String::new();
    for c in &list {
        let expected = match c.relation {
            "within" => format!("{:.7e} ± {:.1e}", c.expected, c.tolerance),
            _ => format!(">= {}", c.expected),
        };
        let mark = if c.pass { "PASS" } else { "FAIL" };
        text.push_str(&format!("{mark} {:<44} {:>14.7e}  expected {expected}\n", c.name, c.value));
    }
    if failed > 0 {
        print!("{text}");
        return Err(Failure {
            code: "E_REPRODUCE",
            message: format!("{failed} of {} checks failed (report: {})", list.len(), display(&path)),
            exit: 1,
        });
    }
    text.push_str(&format!("reproduce: {}/{} checks passed -> {}\n", list.len(), list.len(), display(&path)));
    Ok(text)
}
