use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use upconv_core::hbt::{expected_background, DEFAULT_BIN_WIDTH, DEFAULT_TAU_MAX};
use upconv_core::photostream::{DEFAULT_DEAD_TIME, DEFAULT_RESOLUTION};
use upconv_core::{
    cross_correlate, normalize_g2, peak_statistics, split_stream, DetectorModel, PhotonNumberDistribution,
    SourceModel, TimeTagStream,
};

use super::parse_range;
use crate::output::{display, num, sidecar, CsvTable, OutDir, TOOL, VERSION};
use crate::{Failure, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Coherent,
    Thermal,
    Bunched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagFormat {
    /// Little-endian `TTAG` records.
    Binary,
    /// One timestamp per line.
    Text,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HbtSimArgs {
    #[arg(long, value_enum)]
    pub source: SourceKind,
    /// Photon-number law for `bunched` (a cascade report or a JSON array).
    #[arg(long, required_if_eq("source", "bunched"))]
    pub pn: Option<PathBuf>,
    /// Source photon rate before the beam splitter and detector losses (Hz).
    #[arg(long)]
    pub rate: f64,
    /// Slot length for thermal and bunched light (s).
    #[arg(long, required_if_eq_any([("source", "thermal"), ("source", "bunched")]))]
    pub coherence_time: Option<f64>,
    /// Acquisition time (s).
    #[arg(long)]
    pub duration: f64,
    #[arg(long, default_value_t = 1.0)]
    pub efficiency: f64,
    /// Dark count rate of the first detector (Hz).
    #[arg(long, default_value_t = 0.0)]
    pub dark1: f64,
    /// Dark count rate of the second detector (Hz).
    #[arg(long, default_value_t = 0.0)]
    pub dark2: f64,
    #[arg(long, default_value_t = DEFAULT_DEAD_TIME)]
    pub dead_time: f64,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, num_args = 2, value_names = ["CH1", "CH2"], default_values = ["ch1.ttag", "ch2.ttag"])]
    pub out: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = TagFormat::Binary)]
    pub format: TagFormat,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HbtAnalyzeArgs {
    pub ch1: PathBuf,
    pub ch2: PathBuf,
    /// Histogram bin width (s).
    #[arg(long, default_value_t = DEFAULT_BIN_WIDTH)]
    pub bin: f64,
    /// Largest |t2 - t1| counted (s).
    #[arg(long, default_value_t = DEFAULT_TAU_MAX)]
    pub tau_max: f64,
    /// Background window on |tau| (s), as lo:hi.
    #[arg(long, default_value = "2e-7:5e-7", value_parser = parse_range)]
    pub bg_window: (f64, f64),
    #[arg(long, default_value = "g2.csv")]
    pub out: PathBuf,
}

/// Reads `report.pn_sfg.probs`, `pn_sfg.probs`, `probs` or a bare array.
pub fn read_pn(path: &Path) -> Result<PhotonNumberDistribution, Failure> {
    let text = fs::read_to_string(path)?;
    let doc: Value = serde_json::from_str(&text)?;
    let probs = [
        doc.pointer("/report/pn_sfg/probs"),
        doc.pointer("/pn_sfg/probs"),
        doc.pointer("/probs"),
        Some(&doc),
    ]
    .into_iter()
    .flatten()
    .find(|v| v.is_array())
    .ok_or_else(|| Failure { code: "E_FORMAT", message: format!("{}: no photon-number array", path.display()), exit: 1 })?;
    let probs: Vec<f64> = serde_json::from_value(probs.clone())?;
    // Cascade reports are renormalized after truncation; allow for rounding.
    Ok(PhotonNumberDistribution::new(probs, 1e-9)?)
}

fn source_model(args: &HbtSimArgs) -> Result<SourceModel, Failure> {
    let tc = args.coherence_time.unwrap_or(0.0);
    Ok(match args.source {
        SourceKind::Coherent => SourceModel::Coherent { mean_rate: args.rate },
        SourceKind::Thermal => SourceModel::Thermal { mean_rate: args.rate, coherence_time: tc },
        SourceKind::Bunched => {
            let path = args.pn.as_ref().ok_or_else(|| Failure::usage("--pn is required for a bunched source"))?;
            SourceModel::Bunched { mean_rate: args.rate, coherence_time: tc, pn: read_pn(path)? }
        }
    })
}

pub fn simulate(args: &HbtSimArgs, out: &OutDir) -> Outcome {
    let source = source_model(args)?;
    let detector = |dark| DetectorModel {
        efficiency: args.efficiency,
        dark_rate: dark,
        dead_time: args.dead_time,
        resolution: args.resolution,
    };
    let (d1, d2) = (detector(args.dark1), detector(args.dark2));
    let pair = split_stream(&source, &d1, &d2, args.duration, args.seed)?;

    let mut written = Vec::new();
    for (i, (stream, path)) in [&pair.first, &pair.second].into_iter().zip(&args.out).enumerate() {
        let path = out.prepare(path)?;
        let meta = json!({
            "tool": TOOL,
            "version": VERSION,
            "command": "hbt-sim",
            "channel": i + 1,
            "config": args,
            "source_g2": source.g2().ok(),
            "detector": stream.detector,
            "events": stream.len(),
            "emitted": pair.emitted,
        });
        match args.format {
            TagFormat::Binary => {
                stream.write_ttag(BufWriter::new(File::create(&path)?))?;
                let mut w = BufWriter::new(File::create(sidecar(&path))?);
                serde_json::to_writer_pretty(&mut w, &meta)?;
                std::io::Write::flush(&mut w)?;
            }
            TagFormat::Text => {
                let comments = vec![format!("{TOOL} hbt-sim {VERSION}"), format!("meta: {}", serde_json::to_string(&meta)?)];
                stream.write_text(BufWriter::new(File::create(&path)?), &comments)?;
            }
        }
        written.push(path);
    }
    Ok(format!(
        "hbt-sim: ch1 {} events ({:.2} Hz), ch2 {} events ({:.2} Hz), {} photons emitted -> {}, {}\n",
        pair.first.len(),
        pair.first.mean_rate(),
        pair.second.len(),
        pair.second.mean_rate(),
        pair.emitted,
        display(&written[0]),
        display(&written[1]),
    ))
}

fn read_stream(path: &Path) -> Result<TimeTagStream, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure { code: "E_IO", message: format!("{}: {e}", path.display()), exit: 1 })?;
    TimeTagStream::read_auto(&bytes).map_err(|e| {
        let f = Failure::from(e);
        Failure { message: format!("{}: {}", path.display(), f.message), ..f }
    })
}

pub fn analyze(args: &HbtAnalyzeArgs, out: &OutDir) -> Outcome {
    let s1 = read_stream(&args.ch1)?;
    let s2 = read_stream(&args.ch2)?;
    let hist = cross_correlate(&s1, &s2, args.bin, args.tau_max)?;
    let hist = normalize_g2(&hist, args.bg_window)?;
    let norm = hist.normalization.as_ref().expect("normalized histogram");
    let peak = peak_statistics(&hist).expect("normalized histogram");
    let duration = s1.duration_s().max(s2.duration_s());
    let accidental = expected_background(s1.mean_rate(), s2.mean_rate(), duration, hist.bin_width());
    let c = hist.center_index();

    let path = out.prepare(&args.out)?;
    CsvTable {
        command: "hbt-analyze",
        config: serde_json::to_value(args)?,
        meta: vec![
            ("events".into(), format!("{} {}", s1.len(), s2.len())),
            ("duration_s".into(), num(duration)),
            ("background".into(), num(norm.background)),
            ("background_error".into(), num(norm.background_error)),
            ("background_bins".into(), norm.window_bins.to_string()),
            ("accidental_estimate".into(), num(accidental)),
            ("g2_zero".into(), num(norm.g2[c])),
            ("g2_zero_error".into(), num(norm.g2_errors[c])),
            ("peak_tau_ns".into(), num((peak.tau * 1e12).round() / 1e3)),
            ("peak_g2".into(), num(peak.g2)),
            ("peak_g2_error".into(), num(peak.g2_error)),
            ("peak_significance".into(), num(peak.significance)),
        ],
        columns: &["tau_ns", "counts", "error", "g2", "g2_error"],
        rows: (0..hist.len())
            .map(|i| {
                vec![num(hist.tau_ps(i) as f64 / 1e3), hist.counts[i].to_string(), num(hist.errors[i]), num(norm.g2[i]), num(norm.g2_errors[i])]
            })
            .collect(),
    }
    .write(&path)?;

    Ok(format!(
        "hbt-analyze: g2(0)={:.3}±{:.3} background={:.3}±{:.3} peak at {:.0} ns (significance {:.2}) -> {}\n",
        norm.g2[c],
        norm.g2_errors[c],
        norm.background,
        norm.background_error,
        peak.tau * 1e9,
        peak.significance,
        display(&path)
    ))
}
