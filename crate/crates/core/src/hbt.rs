//! Two-detector coincidence analysis: start-multistop cross-correlation,
//! background normalization to `g⁽²⁾(τ)` and peak statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photostream::{TimeTagStream, PS_PER_S};

pub const DEFAULT_BIN_WIDTH: f64 = 10e-9;
pub const DEFAULT_TAU_MAX: f64 = 5.5e-7;
pub const DEFAULT_BACKGROUND_WINDOW: (f64, f64) = (200e-9, 500e-9);
pub const MIN_BACKGROUND_BINS: usize = 20;

/// Histogram of `t2 − t1` with bins centered on multiples of the bin width.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationHistogram {
    pub bin_width_ps: u64,
    pub tau_max_ps: u64,
    pub counts: Vec<u64>,
    pub errors: Vec<f64>,
    pub normalization: Option<Normalization>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    /// Seconds, applied to `|τ|`.
    pub window: (f64, f64),
    pub window_bins: usize,
    pub background: f64,
    pub background_error: f64,
    pub g2: Vec<f64>,
    pub g2_errors: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakStatistics {
    pub tau: f64,
    pub counts: u64,
    pub g2: f64,
    pub g2_error: f64,
    pub significance: f64,
}

impl CorrelationHistogram {
    /// Built directly from bin contents; bin `i` sits at `(i − K)·width`.
    pub fn from_counts(bin_width_ps: u64, counts: Vec<u64>) -> Result<Self> {
        if bin_width_ps == 0 || counts.len() % 2 == 0 {
            return Err(Error::Shape("histogram needs a positive bin width and an odd bin count".into()));
        }
        let half = (counts.len() / 2) as u64;
        let errors = counts.iter().map(|&c| (c as f64).sqrt()).collect();
        Ok(Self { bin_width_ps, tau_max_ps: half * bin_width_ps, counts, errors, normalization: None })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width_ps as f64 / PS_PER_S
    }

    fn half(&self) -> i64 {
        (self.counts.len() / 2) as i64
    }

    pub fn center_index(&self) -> usize {
        self.counts.len() / 2
    }

    /// Bin center in picoseconds.
    pub fn tau_ps(&self, bin: usize) -> i64 {
        (bin as i64 - self.half()) * self.bin_width_ps as i64
    }

    /// Bin center in seconds.
    pub fn tau(&self, bin: usize) -> f64 {
        self.tau_ps(bin) as f64 / PS_PER_S
    }

    pub fn taus(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.tau(i)).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn g2(&self) -> Option<&[f64]> {
        self.normalization.as_ref().map(|n| n.g2.as_slice())
    }
}

fn check_sorted(s: &TimeTagStream, name: &str) -> Result<()> {
    if s.timestamps.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Format(format!("{name} timestamps are not sorted")));
    }
    Ok(())
}

/// Counts every pair with `|t2 − t1| ≤ tau_max`.
pub fn cross_correlate(s1: &TimeTagStream, s2: &TimeTagStream, bin_width: f64, tau_max: f64) -> Result<CorrelationHistogram> {
    check_sorted(s1, "first stream")?;
    check_sorted(s2, "second stream")?;
    if !(bin_width.is_finite() && bin_width > 0.0 && tau_max.is_finite() && tau_max >= 0.0) {
        return Err(Error::Config(format!("bad bin width {bin_width} or range {tau_max}")));
    }
    let w = (bin_width * PS_PER_S).round() as u64;
    let resolution = s1.resolution_ps.max(s2.resolution_ps);
    if w == 0 || w < resolution {
        return Err(Error::Config(format!("bin width {w} ps is below the stream resolution {resolution} ps")));
    }
    let tau_max_ps = (tau_max * PS_PER_S).round() as u64;
    let half = (tau_max_ps + w / 2) / w;
    let mut counts = vec![0u64; (2 * half + 1) as usize];
    accumulate(&s1.timestamps, &s2.timestamps, w as i64, tau_max_ps as i64, half as i64, &mut counts);
    let errors = counts.iter().map(|&c| (c as f64).sqrt()).collect();
    Ok(CorrelationHistogram { bin_width_ps: w, tau_max_ps, counts, errors, normalization: None })
}

fn accumulate(t1: &[u64], t2: &[u64], w: i64, tau_max: i64, half: i64, counts: &mut [u64]) {
    let mut lo = 0usize;
    for &a in t1 {
        let a = a as i64;
        while lo < t2.len() && (t2[lo] as i64) < a - tau_max {
            lo += 1;
        }
        for &b in &t2[lo..] {
            let d = b as i64 - a;
            if d > tau_max {
                break;
            }
            let k = (2 * d + w).div_euclid(2 * w);
            counts[(k + half) as usize] += 1;
        }
    }
}

/// Scales the histogram by the mean count of the bins whose `|τ|` lies in
/// `window` (seconds). The zero-delay bin must be outside the window.
pub fn normalize_g2(hist: &CorrelationHistogram, window: (f64, f64)) -> Result<CorrelationHistogram> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Config(format!("background window ({lo}, {hi}) must satisfy 0 < lo < hi")));
    }
    let selected: Vec<u64> = (0..hist.len())
        .filter(|&i| {
            let t = hist.tau(i).abs();
            t >= lo * (1.0 - 1e-12) && t <= hi * (1.0 + 1e-12)
        })
        .map(|i| hist.counts[i])
        .collect();
    if selected.len() < MIN_BACKGROUND_BINS {
        return Err(Error::Config(format!(
            "background window holds {} bins, need at least {MIN_BACKGROUND_BINS}",
            selected.len()
        )));
    }
    let n = selected.len() as f64;
    let sum: u64 = selected.iter().sum();
    if sum == 0 {
        return Err(Error::UndefinedNormalization);
    }
    let background = sum as f64 / n;
    let background_error = (sum as f64).sqrt() / n;
    let g2: Vec<f64> = hist.counts.iter().map(|&c| c as f64 / background).collect();
    let rel_bg = background_error / background;
    let g2_errors = hist
        .counts
        .iter()
        .zip(&g2)
        .map(|(&c, &g)| ((c as f64).sqrt() / background).hypot(g * rel_bg))
        .collect();
    let mut out = hist.clone();
    out.normalization = Some(Normalization {
        window,
        window_bins: selected.len(),
        background,
        background_error,
        g2,
        g2_errors,
    });
    Ok(out)
}

/// Largest bin, ties going to the smallest `|τ|`. `None` before normalization.
pub fn peak_statistics(hist: &CorrelationHistogram) -> Option<PeakStatistics> {
    let norm = hist.normalization.as_ref()?;
    let c = hist.center_index();
    let bin = (0..hist.len()).min_by(|&i, &j| {
        hist.counts[j].cmp(&hist.counts[i]).then_with(|| i.abs_diff(c).cmp(&j.abs_diff(c)))
    })?;
    let counts = hist.counts[bin];
    Some(PeakStatistics {
        tau: hist.tau(bin),
        counts,
        g2: norm.g2[bin],
        g2_error: norm.g2_errors[bin],
        significance: significance(counts as f64, norm.background, norm.background_error),
    })
}

/// `(peak − bg)/√(peak + σ_bg²)`
pub fn significance(peak: f64, background: f64, background_error: f64) -> f64 {
    (peak - background) / (peak + background_error * background_error).sqrt()
}

/// Accidental coincidences per bin for uncorrelated streams.
pub fn expected_background(rate1: f64, rate2: f64, duration: f64, bin_width: f64) -> f64 {
    rate1 * rate2 * duration * bin_width
}
