//! Monte Carlo time-tag streams for single-photon detectors.
//!
//! Times are integer picoseconds. Each stream goes through: source photons,
//! optional 50/50 routing, per-photon efficiency thinning, Poissonian dark
//! counts, a non-paralyzable dead-time filter, and finally quantization to
//! the timestamp resolution.
//!
//! Thermal and bunched light use a slot model: time is cut into slots of one
//! coherence time, each slot draws an independent photon number, and the
//! photons of a slot are spread uniformly over it.

use std::io::{BufRead, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::PhotonNumberDistribution;

pub const PS_PER_S: f64 = 1e12;
pub const DEFAULT_DEAD_TIME: f64 = 45e-9;
pub const DEFAULT_RESOLUTION: f64 = 10e-9;
/// Generation window; each window draws from its own random stream.
pub const DEFAULT_CHUNK_PS: u64 = 1_000_000_000_000;
/// Upper bound on the expected number of raw events in one stream.
pub const MAX_EXPECTED_EVENTS: f64 = 2e9;

pub const TTAG_MAGIC: &[u8; 4] = b"TTAG";
pub const TTAG_VERSION: u16 = 1;

/// Single-photon detector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub efficiency: f64,
    /// Hz
    pub dark_rate: f64,
    /// s
    pub dead_time: f64,
    /// s
    pub resolution: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self { efficiency: 1.0, dark_rate: 0.0, dead_time: DEFAULT_DEAD_TIME, resolution: DEFAULT_RESOLUTION }
    }
}

impl DetectorModel {
    /// Unit efficiency, no dark counts, no dead time, 1 ps resolution.
    pub fn ideal() -> Self {
        Self { efficiency: 1.0, dark_rate: 0.0, dead_time: 0.0, resolution: 1e-12 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::Config(format!("efficiency {} outside [0, 1]", self.efficiency)));
        }
        if !(self.dark_rate.is_finite() && self.dark_rate >= 0.0) {
            return Err(Error::Config(format!("dark rate must be non-negative, got {}", self.dark_rate)));
        }
        if !(self.dead_time.is_finite() && self.dead_time >= 0.0) {
            return Err(Error::Config(format!("dead time must be non-negative, got {}", self.dead_time)));
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) || self.resolution_ps() == 0 {
            return Err(Error::Config(format!("resolution must be at least 1 ps, got {}", self.resolution)));
        }
        Ok(())
    }

    pub fn dead_time_ps(&self) -> u64 {
        seconds_to_ps(self.dead_time)
    }

    pub fn resolution_ps(&self) -> u64 {
        seconds_to_ps(self.resolution)
    }
}

fn seconds_to_ps(s: f64) -> u64 {
    (s * PS_PER_S).round() as u64
}

/// Light source feeding the detectors. Rates are photons per second at the
/// detector plane, before efficiency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SourceModel {
    Coherent { mean_rate: f64 },
    Thermal { mean_rate: f64, coherence_time: f64 },
    /// Slots whose photon number follows `pn`, thinned to `mean_rate`.
    Bunched { mean_rate: f64, coherence_time: f64, pn: PhotonNumberDistribution },
}

impl SourceModel {
    pub fn mean_rate(&self) -> f64 {
        match self {
            SourceModel::Coherent { mean_rate }
            | SourceModel::Thermal { mean_rate, .. }
            | SourceModel::Bunched { mean_rate, .. } => *mean_rate,
        }
    }

    /// `g⁽²⁾(0)` of the emitted light.
    pub fn g2(&self) -> Result<f64> {
        match self {
            SourceModel::Coherent { .. } => Ok(1.0),
            SourceModel::Thermal { .. } => Ok(2.0),
            SourceModel::Bunched { pn, .. } => pn.coherence(2),
        }
    }

    fn validate(&self) -> Result<()> {
        let rate = self.mean_rate();
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::Config(format!("mean rate must be non-negative, got {rate}")));
        }
        match self {
            SourceModel::Coherent { .. } => Ok(()),
            SourceModel::Thermal { coherence_time, .. } | SourceModel::Bunched { coherence_time, .. } => {
                if !(coherence_time.is_finite() && seconds_to_ps(*coherence_time) >= 1) {
                    return Err(Error::Config(format!("coherence time must be at least 1 ps, got {coherence_time}")));
                }
                Ok(())
            }
        }
    }

    fn slot_law(&self) -> Result<Option<(u64, SlotLaw)>> {
        Ok(match self {
            SourceModel::Coherent { .. } => None,
            SourceModel::Thermal { mean_rate, coherence_time } => {
                Some((seconds_to_ps(*coherence_time), SlotLaw::BoseEinstein(mean_rate * coherence_time)))
            }
            SourceModel::Bunched { mean_rate, coherence_time, pn } => {
                let target = mean_rate * coherence_time;
                let mean = pn.mean();
                let probs = if target == 0.0 {
                    vec![1.0]
                } else if mean > 0.0 {
                    rescale_distribution(pn.probs(), target / mean)?
                } else {
                    return Err(Error::Config("bunched source needs a distribution with non-zero mean".into()));
                };
                Some((seconds_to_ps(*coherence_time), SlotLaw::table(probs)))
            }
        })
    }
}

/// Binomial thinning of a photon-number law, `G(s) ↦ G(1 − η + ηs)` on the
/// generating function. For `η ≤ 1` this is loss; `η > 1` is accepted when
/// the result is still a probability distribution. Either way every
/// normalized factorial moment `g⁽ᵏ⁾` is unchanged.
pub fn rescale_distribution(probs: &[f64], eta: f64) -> Result<Vec<f64>> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::Config(format!("rescaling factor must be non-negative, got {eta}")));
    }
    let len = probs.len();
    let mut out = vec![0.0; len];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        let mut binom = 1.0; // C(n, m), starting at n = m
        for n in m..len {
            if n > m {
                binom *= n as f64 / (n - m) as f64;
            }
            acc += probs[n] * binom * eta.powi(m as i32) * (1.0 - eta).powi((n - m) as i32);
        }
        *slot = acc;
    }
    if out.iter().any(|&p| p < -1e-15 || !p.is_finite()) {
        return Err(Error::Config(format!(
            "photon-number law cannot be rescaled by a factor {eta:.4}; lower the rate or raise the coherence time"
        )));
    }
    for p in out.iter_mut() {
        *p = p.max(0.0);
    }
    let total: f64 = out.iter().sum();
    for p in out.iter_mut() {
        *p /= total;
    }
    Ok(out)
}

/// Slot law with probabilities `{p0, p1, p2}` chosen so that the mean is
/// `mean` and `g⁽²⁾ = g2`. Requires `mean ≤ 1/g2`.
pub fn two_photon_law(mean: f64, g2: f64) -> Result<PhotonNumberDistribution> {
    if !(mean > 0.0 && g2 >= 0.0 && mean * g2 <= 1.0) {
        return Err(Error::Config(format!("no {{0,1,2}}-photon law with mean {mean} and g2 {g2}")));
    }
    let p2 = 0.5 * g2 * mean * mean;
    let p1 = mean - 2.0 * p2;
    let p0 = 1.0 - p1 - p2;
    if p0 < 0.0 {
        return Err(Error::Config(format!("no {{0,1,2}}-photon law with mean {mean} and g2 {g2}")));
    }
    PhotonNumberDistribution::new(vec![p0, p1, p2], 0.0)
}

#[derive(Clone, Debug)]
enum SlotLaw {
    BoseEinstein(f64),
    /// Probability of a non-empty slot and the cumulative law of `n ≥ 1`.
    Table { occupied: f64, cumulative: Vec<f64> },
}

impl SlotLaw {
    fn table(probs: Vec<f64>) -> Self {
        let occupied: f64 = probs.iter().skip(1).sum();
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .skip(1)
            .map(|p| {
                acc += p / occupied;
                acc
            })
            .collect();
        SlotLaw::Table { occupied, cumulative }
    }

    fn occupied(&self) -> f64 {
        match self {
            SlotLaw::BoseEinstein(mu) => mu / (1.0 + mu),
            SlotLaw::Table { occupied, .. } => *occupied,
        }
    }

    /// Photon number of a slot, conditioned on it being non-empty.
    fn sample_occupied(&self, rng: &mut ChaCha8Rng) -> u64 {
        match self {
            SlotLaw::BoseEinstein(mu) => {
                // n − 1 is geometric with success probability 1/(1+μ).
                1 + Geometric::new(1.0 / (1.0 + mu)).map(|g| g.sample(rng)).unwrap_or(0)
            }
            SlotLaw::Table { cumulative, .. } => {
                let u: f64 = rng.random();
                let idx = cumulative.partition_point(|&c| c < u).min(cumulative.len() - 1);
                idx as u64 + 1
            }
        }
    }
}

/// Sorted detector timestamps (ps).
#[derive(Clone, Debug, PartialEq)]
pub struct TimeTagStream {
    pub timestamps: Vec<u64>,
    pub duration_ps: u64,
    pub resolution_ps: u64,
    /// Known when the stream was simulated; files only carry the resolution.
    pub detector: Option<DetectorModel>,
}

impl TimeTagStream {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.duration_ps as f64 / PS_PER_S
    }

    pub fn mean_rate(&self) -> f64 {
        self.len() as f64 / self.duration_s()
    }

    /// Strictly increasing and inside `[0, duration]`.
    pub fn validate(&self) -> Result<()> {
        if self.timestamps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Format("timestamps are not strictly increasing".into()));
        }
        if self.timestamps.last().is_some_and(|&t| t > self.duration_ps) {
            return Err(Error::Format("timestamp beyond the stream duration".into()));
        }
        Ok(())
    }

    /// Smallest gap between consecutive timestamps.
    pub fn min_gap(&self) -> Option<u64> {
        self.timestamps.windows(2).map(|w| w[1] - w[0]).min()
    }

    /// Writes the binary `TTAG` format (little endian).
    pub fn write_ttag<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(TTAG_MAGIC)?;
        w.write_all(&TTAG_VERSION.to_le_bytes())?;
        w.write_all(&self.resolution_ps.to_le_bytes())?;
        w.write_all(&self.duration_ps.to_le_bytes())?;
        w.write_all(&(self.timestamps.len() as u64).to_le_bytes())?;
        for t in &self.timestamps {
            w.write_all(&t.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_ttag<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|_| Error::Format("truncated TTAG header".into()))?;
        if &magic != TTAG_MAGIC {
            return Err(Error::Format("missing TTAG magic".into()));
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        let mut cursor = rest.as_slice();
        let version = u16::from_le_bytes(take::<2>(&mut cursor)?);
        if version != TTAG_VERSION {
            return Err(Error::Format(format!("unsupported TTAG version {version}")));
        }
        let resolution_ps = u64::from_le_bytes(take::<8>(&mut cursor)?);
        let duration_ps = u64::from_le_bytes(take::<8>(&mut cursor)?);
        let count = u64::from_le_bytes(take::<8>(&mut cursor)?) as usize;
        if cursor.len() != count.saturating_mul(8) {
            return Err(Error::Format(format!(
                "header announces {count} timestamps but {} bytes follow",
                cursor.len()
            )));
        }
        let timestamps = cursor.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Self { timestamps, duration_ps, resolution_ps, detector: None })
    }

    /// Plain text: `#` comment lines, then one timestamp (ps) per line.
    /// `resolution_ps` and `duration_ps` are written as `# key=value`.
    pub fn write_text<W: Write>(&self, mut w: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "# resolution_ps={}", self.resolution_ps)?;
        writeln!(w, "# duration_ps={}", self.duration_ps)?;
        for t in &self.timestamps {
            writeln!(w, "{t}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut timestamps = Vec::new();
        let (mut resolution_ps, mut duration_ps) = (None, None);
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                let parse = |v: &str| {
                    v.trim().parse::<u64>().map_err(|_| Error::Format(format!("line {}: bad header value", lineno + 1)))
                };
                if let Some(v) = comment.strip_prefix("resolution_ps=") {
                    resolution_ps = Some(parse(v)?);
                } else if let Some(v) = comment.strip_prefix("duration_ps=") {
                    duration_ps = Some(parse(v)?);
                }
                continue;
            }
            let t = line
                .parse::<u64>()
                .map_err(|_| Error::Format(format!("line {}: not an integer timestamp: {line:?}", lineno + 1)))?;
            timestamps.push(t);
        }
        let duration_ps = duration_ps.unwrap_or_else(|| timestamps.iter().copied().max().unwrap_or(0));
        Ok(Self { timestamps, duration_ps, resolution_ps: resolution_ps.unwrap_or(1), detector: None })
    }

    /// Reads either format, dispatching on the `TTAG` magic.
    pub fn read_auto(bytes: &[u8]) -> Result<Self> {
        if bytes.starts_with(TTAG_MAGIC) {
            Self::read_ttag(bytes)
        } else {
            Self::read_text(bytes)
        }
    }
}

fn take<const N: usize>(cursor: &mut &[u8]) -> Result<[u8; N]> {
    if cursor.len() < N {
        return Err(Error::Format("truncated TTAG header".into()));
    }
    let (head, tail) = cursor.split_at(N);
    *cursor = tail;
    Ok(head.try_into().unwrap())
}

/// Two streams behind a 50/50 beam splitter.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamPair {
    pub first: TimeTagStream,
    pub second: TimeTagStream,
    /// Photons emitted by the source before splitting and loss.
    pub emitted: u64,
}

// Random stream purposes; combined with the chunk index.
const STREAM_SOURCE: u64 = 0;
const STREAM_ROUTE: u64 = 1;
const STREAM_DETECTOR: u64 = 2; // + detector index

fn chunk_rng(seed: u64, purpose: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 40) | chunk);
    rng
}

fn poisson_count(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
}

struct Plan {
    duration_ps: u64,
    chunk_ps: u64,
    slots: Option<(u64, SlotLaw)>,
    rate: f64,
}

impl Plan {
    fn new(source: &SourceModel, duration: f64, detectors: &[DetectorModel]) -> Result<Self> {
        source.validate()?;
        for d in detectors {
            d.validate()?;
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::Config(format!("duration must be positive, got {duration}")));
        }
        if duration * PS_PER_S > (u64::MAX / 4) as f64 {
            return Err(Error::Config(format!("duration {duration} s overflows the picosecond clock")));
        }
        let expected = duration * (source.mean_rate() + detectors.iter().map(|d| d.dark_rate).sum::<f64>());
        if expected > MAX_EXPECTED_EVENTS {
            return Err(Error::Config(format!("{expected:e} expected events exceeds the limit {MAX_EXPECTED_EVENTS:e}")));
        }
        let slots = source.slot_law()?;
        let chunk_ps = match &slots {
            Some((slot_ps, _)) => slot_ps * (DEFAULT_CHUNK_PS / slot_ps).max(1),
            None => DEFAULT_CHUNK_PS,
        };
        Ok(Self { duration_ps: seconds_to_ps(duration).max(1), chunk_ps, slots, rate: source.mean_rate() })
    }

    fn chunks(&self) -> impl Iterator<Item = (u64, u64, u64)> + '_ {
        let n = self.duration_ps.div_ceil(self.chunk_ps);
        (0..n).map(move |c| (c, c * self.chunk_ps, ((c + 1) * self.chunk_ps).min(self.duration_ps)))
    }

    /// Sorted source photon times in `[start, end)`.
    fn photons(&self, start: u64, end: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
        let mut out = Vec::new();
        match &self.slots {
            None => {
                let n = poisson_count(self.rate * (end - start) as f64 / PS_PER_S, rng);
                out.extend((0..n).map(|_| rng.random_range(start..end)));
                out.sort_unstable();
            }
            Some((slot_ps, law)) => {
                let q = law.occupied();
                if q <= 0.0 {
                    return out;
                }
                let skip = Geometric::new(q.min(1.0)).expect("occupation probability in (0, 1]");
                let (first, last) = (start / slot_ps, end.div_ceil(*slot_ps));
                let mut slot = first.saturating_add(skip.sample(rng));
                while slot < last {
                    let n = law.sample_occupied(rng);
                    let s0 = slot * slot_ps;
                    let base = out.len();
                    out.extend((0..n).map(|_| s0 + rng.random_range(0..*slot_ps)).filter(|&t| t < end));
                    out[base..].sort_unstable();
                    slot = slot.saturating_add(1).saturating_add(skip.sample(rng));
                }
            }
        }
        out
    }
}

/// Efficiency, dark counts, dead time and quantization for one detector.
struct DetectorChain {
    model: DetectorModel,
    index: u64,
    raw: Vec<u64>,
}

impl DetectorChain {
    fn new(model: DetectorModel, index: u64) -> Self {
        Self { model, index, raw: Vec::new() }
    }

    fn push_chunk(&mut self, photons: &[u64], chunk: (u64, u64, u64), seed: u64) {
        let (c, start, end) = chunk;
        let mut rng = chunk_rng(seed, STREAM_DETECTOR + self.index, c);
        let base = self.raw.len();
        let eff = self.model.efficiency;
        self.raw.extend(photons.iter().copied().filter(|_| eff >= 1.0 || rng.random::<f64>() < eff));
        let n_dark = poisson_count(self.model.dark_rate * (end - start) as f64 / PS_PER_S, &mut rng);
        self.raw.extend((0..n_dark).map(|_| rng.random_range(start..end)));
        self.raw[base..].sort_unstable();
    }

    fn finish(self, duration_ps: u64) -> TimeTagStream {
        let dead = self.model.dead_time_ps();
        let res = self.model.resolution_ps();
        let mut out: Vec<u64> = Vec::with_capacity(self.raw.len());
        let mut last_kept: Option<u64> = None;
        for t in self.raw {
            if let Some(l) = last_kept {
                if t - l < dead {
                    continue;
                }
            }
            last_kept = Some(t);
            let q = t - t % res;
            if out.last() != Some(&q) {
                out.push(q);
            }
        }
        TimeTagStream { timestamps: out, duration_ps, resolution_ps: res, detector: Some(self.model) }
    }
}

/// One detector looking at the whole source.
pub fn generate_stream(source: &SourceModel, detector: &DetectorModel, duration: f64, seed: u64) -> Result<TimeTagStream> {
    let plan = Plan::new(source, duration, std::slice::from_ref(detector))?;
    let mut chain = DetectorChain::new(*detector, 0);
    for chunk in plan.chunks() {
        let mut rng = chunk_rng(seed, STREAM_SOURCE, chunk.0);
        let photons = plan.photons(chunk.1, chunk.2, &mut rng);
        chain.push_chunk(&photons, chunk, seed);
    }
    Ok(chain.finish(plan.duration_ps))
}

/// Two detectors behind a 50/50 beam splitter; each photon is routed independently.
pub fn split_stream(
    source: &SourceModel,
    first: &DetectorModel,
    second: &DetectorModel,
    duration: f64,
    seed: u64,
) -> Result<StreamPair> {
    let plan = Plan::new(source, duration, &[*first, *second])?;
    let mut chains = [DetectorChain::new(*first, 0), DetectorChain::new(*second, 1)];
    let mut emitted = 0u64;
    let (mut to_first, mut to_second) = (Vec::new(), Vec::new());
    for chunk in plan.chunks() {
        let mut rng = chunk_rng(seed, STREAM_SOURCE, chunk.0);
        let photons = plan.photons(chunk.1, chunk.2, &mut rng);
        emitted += photons.len() as u64;
        let mut route = chunk_rng(seed, STREAM_ROUTE, chunk.0);
        to_first.clear();
        to_second.clear();
        for t in photons {
            if route.random::<bool>() {
                to_first.push(t);
            } else {
                to_second.push(t);
            }
        }
        chains[0].push_chunk(&to_first, chunk, seed);
        chains[1].push_chunk(&to_second, chunk, seed);
    }
    let [a, b] = chains;
    Ok(StreamPair { first: a.finish(plan.duration_ps), second: b.finish(plan.duration_ps), emitted })
}
