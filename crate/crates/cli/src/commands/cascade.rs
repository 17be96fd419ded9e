use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use upconv_core::{calibrate_kappa, run_cascade, CascadeConfig, FockDim};

use super::parse_dims;
use crate::output::{display, num, sibling, write_json, CsvTable, OutDir};
use crate::{Failure, Outcome};

#[derive(Debug, Clone, Args, Serialize)]
pub struct CascadeArgs {
    /// Mean photon number of the down-converted mode.
    #[arg(long, default_value_t = 0.1)]
    pub nbar_spdc: f64,
    /// Up-conversion strength; overrides calibration.
    #[arg(long, conflicts_with = "target_nbar_sfg")]
    pub kappa: Option<f64>,
    /// Calibrate kappa so that the up-converted mode holds this many photons.
    #[arg(long)]
    pub target_nbar_sfg: Option<f64>,
    /// Fock dimensions of the down- and up-converted modes.
    #[arg(long, default_value = "50,10", value_parser = parse_dims)]
    pub dims: (usize, usize),
    /// Phase of the squeezing parameter (rad).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub zeta_phase: f64,
    /// JSON report.
    #[arg(long, default_value = "cascade.json")]
    pub out: PathBuf,
    /// Photon-number CSV; defaults to `<out stem>.pn.csv`.
    #[arg(long)]
    pub pn_out: Option<PathBuf>,
}

pub const DEFAULT_TARGET_NBAR_SFG: f64 = 1e-5;

#[derive(Serialize)]
struct Resolved<'a> {
    args: &'a CascadeArgs,
    kappa: f64,
    kappa_source: &'static str,
    target_nbar_sfg: Option<f64>,
}

pub fn run(args: &CascadeArgs, out: &OutDir) -> Outcome {
    let dim_a = FockDim::new(args.dims.0).map_err(Failure::from)?;
    let dim_b = FockDim::new(args.dims.1).map_err(Failure::from)?;
    let (kappa, source, target) = match args.kappa {
        Some(k) => (k, "given", None),
        None => {
            let target = args.target_nbar_sfg.unwrap_or(DEFAULT_TARGET_NBAR_SFG);
            (calibrate_kappa(args.nbar_spdc, target, dim_a, dim_b)?, "calibrated", Some(target))
        }
    };
    let config = CascadeConfig { nbar_spdc: args.nbar_spdc, kappa, dim_a, dim_b, zeta_phase: args.zeta_phase };
    let report = run_cascade(&config)?;
    let resolved = Resolved { args, kappa, kappa_source: source, target_nbar_sfg: target };

    let json_path = out.prepare(&args.out)?;
    write_json(&json_path, "cascade", &resolved, &report)?;

    let pn_path = out.prepare(&args.pn_out.clone().unwrap_or_else(|| sibling(&args.out, "pn.csv")))?;
    CsvTable {
        command: "cascade",
        config: serde_json::to_value(&resolved)?,
        meta: vec![("g2_sfg".into(), num(report.g2_sfg)), ("nbar_sfg".into(), num(report.nbar_sfg))],
        columns: &["n", "p_n"],
        rows: report.pn_sfg.probs().iter().enumerate().map(|(n, p)| vec![n.to_string(), num(*p)]).collect(),
    }
    .write(&pn_path)?;

    Ok(format!(
        "cascade: g2_sfg={:.4} nbar_sfg={:.4e} purity={:.7} fidelity={:.6} kappa={:.6e} ({source}) -> {}, {}\n",
        report.g2_sfg,
        report.nbar_sfg,
        report.purity_sfg,
        report.fidelity_coherent,
        kappa,
        display(&json_path),
        display(&pn_path),
    ))
}
