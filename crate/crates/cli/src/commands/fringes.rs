use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use upconv_core::interference::{noiseless_fringe_scan, phase_grid, sigma_from_coherence_time, DEGENERATE_WAVELENGTH, SPEED_OF_LIGHT};
use upconv_core::{fit_fringe_frequency, simulate_fringe_scan, ArmRates, EffectiveJsa, SpectralPhase};

use super::positive;
use crate::output::{display, num, CsvTable, OutDir};
use crate::Outcome;

#[derive(Debug, Clone, Args, Serialize)]
pub struct FringesArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi_start: f64,
    #[arg(long, default_value_t = 3.0 * PI, allow_hyphen_values = true)]
    pub phi_stop: f64,
    #[arg(long, default_value_t = PI / 9.0)]
    pub phi_step: f64,
    /// Raw count rate with only the up-converted arm open (Hz).
    #[arg(long, default_value_t = 344.4)]
    pub rate_a: f64,
    /// Raw count rate with only the pump arm open (Hz).
    #[arg(long, default_value_t = 568.8)]
    pub rate_b: f64,
    /// Dark count rate (Hz).
    #[arg(long, default_value_t = 202.9)]
    pub dark: f64,
    /// Integration time per phase setting (s).
    #[arg(long, default_value_t = 0.1)]
    pub dwell: f64,
    /// Quadratic coefficient of the summed spectral phase (s²).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Biphoton coherence time setting the spectral width (s).
    #[arg(long, default_value_t = 50e-15)]
    pub coherence_time: f64,
    /// Lower end of the fringe-frequency search.
    #[arg(long, default_value_t = 0.25)]
    pub f_min: f64,
    /// Upper end of the fringe-frequency search.
    #[arg(long, default_value_t = 1.0)]
    pub f_max: f64,
    /// Use expected counts instead of Poisson samples.
    #[arg(long)]
    pub noiseless: bool,
    #[arg(long, required_unless_present = "noiseless")]
    pub seed: Option<u64>,
    #[arg(long, default_value = "fringes.csv")]
    pub out: PathBuf,
}

pub fn run(args: &FringesArgs, out: &OutDir) -> Outcome {
    let phi = phase_grid(args.phi_start, args.phi_stop, args.phi_step)?;
    let omega0 = 2.0 * PI * SPEED_OF_LIGHT / DEGENERATE_WAVELENGTH;
    let jsa = EffectiveJsa::gaussian(omega0, sigma_from_coherence_time(positive("coherence-time", args.coherence_time)?))?;
    let template = SpectralPhase { beta: args.beta, ..Default::default() };
    let rates = ArmRates { raw_a: args.rate_a, raw_b: args.rate_b, dark: args.dark };
    let scan = match (args.noiseless, args.seed) {
        (false, Some(seed)) => simulate_fringe_scan(&jsa, &template, &phi, &rates, args.dwell, seed)?,
        _ => noiseless_fringe_scan(&jsa, &template, &phi, &rates, args.dwell)?,
    };
    let sigmas: Vec<f64> =
        if args.noiseless { vec![1.0; phi.len()] } else { scan.counts.iter().map(|c| c.max(1.0).sqrt()).collect() };
    let est = fit_fringe_frequency(&phi, &scan.counts, &sigmas, args.f_min, args.f_max)?;

    let path = out.prepare(&args.out)?;
    CsvTable {
        command: "fringes",
        config: serde_json::to_value(args)?,
        meta: vec![
            ("v_max".into(), num(scan.v_max)),
            ("visibility".into(), num(scan.visibility)),
            ("indistinguishability".into(), num(scan.visibility / scan.v_max)),
            ("fit_frequency".into(), num(scan.fit_frequency)),
            ("fit_mean".into(), num(scan.fit.mean)),
            ("fit_cos".into(), num(scan.fit.cos_amp)),
            ("fit_sin".into(), num(scan.fit.sin_amp)),
            ("fit_chi2".into(), num(scan.fit.chi2)),
            ("frequency_estimate".into(), num(est.frequency)),
            ("frequency_error".into(), num(est.error)),
        ],
        columns: &["phi", "counts", "error", "fit"],
        rows: phi
            .iter()
            .zip(&scan.counts)
            .map(|(&p, &c)| vec![num(p), num(c), num(c.sqrt()), num(scan.fit.eval(p))])
            .collect(),
    }
    .write(&path)?;

    Ok(format!(
        "fringes: {} points, frequency {:.4} ± {:.4}, visibility {:.3} (max {:.3}) -> {}\n",
        phi.len(),
        est.frequency,
        est.error,
        scan.visibility,
        scan.v_max,
        display(&path)
    ))
}
