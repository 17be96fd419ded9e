//! Reference states of light and their photon-counting statistics.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ComplexMatrix, DensityMatrix, FockDim};

/// Largest truncation tail accepted for coherent and thermal states.
pub const COHERENT_TAIL_TOL: f64 = 1e-12;
/// Largest normalization deficit accepted for squeezed vacuum.
pub const SQUEEZED_TAIL_TOL: f64 = 1e-10;
/// Rounding floor used when a state reports a zero tail.
const ROUNDING_TOL: f64 = 1e-12;

/// Squeezing parameter `ζ = |ζ| e^{iφ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParam {
    magnitude: f64,
    phase: f64,
}

impl SqueezeParam {
    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        if !(magnitude.is_finite() && magnitude >= 0.0) {
            return Err(Error::Config(format!("squeezing magnitude must be finite and non-negative, got {magnitude}")));
        }
        if !phase.is_finite() {
            return Err(Error::Config("squeezing phase must be finite".into()));
        }
        Ok(Self { magnitude, phase: wrap_phase(phase) })
    }

    /// Squeezing that yields mean photon number `sinh²|ζ| = nbar`.
    pub fn from_mean_photon_number(nbar: f64, phase: f64) -> Result<Self> {
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(Error::Config(format!("mean photon number must be non-negative, got {nbar}")));
        }
        Self::new(nbar.sqrt().asinh(), phase)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    /// Phase in `(-π, π]`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.magnitude.sinh().powi(2)
    }
}

fn wrap_phase(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Coherent-state amplitude `α`, with mean photon number `|α|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentAmplitude(C64);

impl CoherentAmplitude {
    pub fn new(alpha: C64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Config("coherent amplitude must be finite".into()));
        }
        Ok(Self(alpha))
    }

    /// Real amplitude with the given mean photon number.
    pub fn from_mean_photon_number(nbar: f64) -> Result<Self> {
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(Error::Config(format!("mean photon number must be non-negative, got {nbar}")));
        }
        Ok(Self(C64::new(nbar.sqrt(), 0.0)))
    }

    pub fn alpha(&self) -> C64 {
        self.0
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.0.norm_sqr()
    }
}

/// A state together with the probability mass discarded by truncation.
///
/// Constructors renormalize the retained part, so `tail` is the only
/// record of the truncation error.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncated<S> {
    state: S,
    tail: f64,
}

impl<S> Truncated<S> {
    pub fn state(&self) -> &S {
        &self.state
    }

    pub fn into_state(self) -> S {
        self.state
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }
}

impl Truncated<Vec<C64>> {
    pub fn amplitudes(&self) -> &[C64] {
        &self.state
    }
}

/// Photon-number probabilities `p(n)`, `n = 0 … dim-1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct PhotonNumberDistribution {
    probs: Vec<f64>,
    tail_tol: f64,
}

#[derive(Deserialize)]
struct RawDistribution {
    probs: Vec<f64>,
    #[serde(default)]
    tail_tol: f64,
}

impl TryFrom<RawDistribution> for PhotonNumberDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        Self::new(raw.probs, raw.tail_tol)
    }
}

impl PhotonNumberDistribution {
    pub fn new(probs: Vec<f64>, tail_tol: f64) -> Result<Self> {
        if !(tail_tol.is_finite() && (0.0..1.0).contains(&tail_tol)) {
            return Err(Error::Config(format!("tail tolerance must lie in [0, 1), got {tail_tol}")));
        }
        if probs.is_empty() {
            return Err(Error::Config("empty photon-number distribution".into()));
        }
        let mut probs = probs;
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -ROUNDING_TOL || *p > 1.0 + ROUNDING_TOL {
                return Err(Error::Config(format!("probability {p} outside [0, 1]")));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let total: f64 = probs.iter().sum();
        if total < 1.0 - tail_tol - ROUNDING_TOL || total > 1.0 + ROUNDING_TOL {
            return Err(Error::Config(format!(
                "probabilities sum to {total}, outside [1 - {tail_tol:e}, 1]"
            )));
        }
        Ok(Self { probs, tail_tol })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.factorial_moment(1)
    }

    /// `⟨a†ᵏaᵏ⟩ = Σ p(n) n!/(n-k)!`.
    pub fn factorial_moment(&self, k: usize) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .skip(k)
            .map(|(n, &p)| p * falling_factorial(n, k))
            .sum()
    }

    /// Normalized factorial moment `g⁽ᵏ⁾ = ⟨a†ᵏaᵏ⟩ / ⟨a†a⟩ᵏ`.
    pub fn coherence(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::Config("coherence order must be at least 1".into()));
        }
        let mean = self.mean();
        if !(mean > 0.0) {
            return Err(Error::UndefinedStatistic("mean photon number is zero".into()));
        }
        Ok(self.factorial_moment(k) / mean.powi(k as i32))
    }
}

fn falling_factorial(n: usize, k: usize) -> f64 {
    (0..k).map(|j| (n - j) as f64).product()
}

/// Anything from which a photon-number distribution can be read off.
pub trait PhotonStatistics {
    fn photon_probs(&self) -> Vec<f64>;

    /// Probability mass lost to truncation, if known.
    fn truncation_tail(&self) -> f64 {
        0.0
    }
}

impl PhotonStatistics for [C64] {
    fn photon_probs(&self) -> Vec<f64> {
        self.iter().map(|z| z.norm_sqr()).collect()
    }
}

impl PhotonStatistics for Vec<C64> {
    fn photon_probs(&self) -> Vec<f64> {
        self.as_slice().photon_probs()
    }
}

impl PhotonStatistics for DensityMatrix {
    fn photon_probs(&self) -> Vec<f64> {
        self.populations()
    }
}

impl PhotonStatistics for PhotonNumberDistribution {
    fn photon_probs(&self) -> Vec<f64> {
        self.probs.clone()
    }

    fn truncation_tail(&self) -> f64 {
        self.tail_tol
    }
}

impl<S: PhotonStatistics> PhotonStatistics for Truncated<S> {
    fn photon_probs(&self) -> Vec<f64> {
        self.state.photon_probs()
    }

    fn truncation_tail(&self) -> f64 {
        self.tail
    }
}

/// `p(n) = ⟨n|ρ|n⟩` (or `|ψ_n|²`).
pub fn photon_number_distribution<S: PhotonStatistics + ?Sized>(state: &S) -> Result<PhotonNumberDistribution> {
    let tail = state.truncation_tail().max(ROUNDING_TOL);
    PhotonNumberDistribution::new(state.photon_probs(), tail)
}

/// `g⁽ᵏ⁾` of a state.
pub fn coherence_order<S: PhotonStatistics + ?Sized>(state: &S, k: usize) -> Result<f64> {
    photon_number_distribution(state)?.coherence(k)
}

/// `ln n!` for `n = 0 … len-1`.
fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    out.push(0.0);
    for n in 1..len {
        acc += (n as f64).ln();
        out.push(acc);
    }
    out.truncate(len);
    out
}

fn renormalize(v: &mut [C64]) {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
}

/// Sums `Σ_{n≥start} t_n` given `t_start` and the ratio `t_{n+1}/t_n`,
/// stopping once the terms are decreasing and negligible.
fn geometric_like_tail(first: f64, ratio: impl Fn(usize) -> f64, start: usize) -> f64 {
    let mut sum = 0.0;
    let mut term = first;
    let mut n = start;
    while term > 0.0 && n < start + 1_000_000 {
        sum += term;
        let r = ratio(n);
        if r < 1.0 && term < sum * 1e-18 {
            break;
        }
        term *= r;
        n += 1;
    }
    sum
}

/// Coherent state `e^{-|α|²/2} Σ αⁿ/√n! |n⟩`, renormalized on `dim` levels.
pub fn coherent_state(alpha: CoherentAmplitude, dim: FockDim) -> Result<Truncated<Vec<C64>>> {
    let d = dim.get();
    let a = alpha.alpha();
    let nbar = a.norm_sqr();
    if nbar == 0.0 {
        return Ok(Truncated { state: crate::fock::basis_vector(d, 0), tail: 0.0 });
    }
    let ln_nbar = nbar.ln();
    let ln_p = |n: usize, ln_fact: f64| -nbar + n as f64 * ln_nbar - ln_fact;
    let lf = ln_factorials(d);
    let arg = a.arg();
    let mut amps: Vec<C64> =
        (0..d).map(|n| C64::from_polar((0.5 * ln_p(n, lf[n])).exp(), n as f64 * arg)).collect();

    let ln_fact_d = lf[d - 1] + (d as f64).ln();
    let tail = geometric_like_tail(ln_p(d, ln_fact_d).exp(), |n| nbar / (n + 1) as f64, d);
    if tail > COHERENT_TAIL_TOL {
        return Err(Error::Precision { tail, tol: COHERENT_TAIL_TOL });
    }
    renormalize(&mut amps);
    Ok(Truncated { state: amps, tail })
}

/// Thermal state with Bose–Einstein populations `n̄ⁿ/(1+n̄)^{n+1}`.
pub fn thermal_density(nbar: f64, dim: FockDim) -> Result<Truncated<DensityMatrix>> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::Config(format!("mean photon number must be non-negative, got {nbar}")));
    }
    let d = dim.get();
    let ratio = nbar / (1.0 + nbar);
    let tail = ratio.powi(d as i32);
    if tail > COHERENT_TAIL_TOL {
        return Err(Error::Precision { tail, tol: COHERENT_TAIL_TOL });
    }
    let norm = 1.0 - tail;
    let diag: Vec<C64> =
        (0..d).map(|n| C64::new(ratio.powi(n as i32) / (1.0 + nbar) / norm, 0.0)).collect();
    let rho = DensityMatrix::new(ComplexMatrix::diagonal(&diag))?;
    Ok(Truncated { state: rho, tail })
}

/// Squeezed vacuum `Σ c_n |2n⟩` with
/// `c_n = √(sech r (2n)!)/n! · (-e^{iφ} tanh(r)/2)ⁿ`.
///
/// Coefficients are evaluated in log space; odd levels are exactly zero.
pub fn squeezed_vacuum(zeta: SqueezeParam, dim: FockDim) -> Result<Truncated<Vec<C64>>> {
    let d = dim.get();
    let r = zeta.magnitude();
    let mut amps = vec![C64::new(0.0, 0.0); d];
    if r == 0.0 {
        amps[0] = C64::new(1.0, 0.0);
        return Ok(Truncated { state: amps, tail: 0.0 });
    }
    let ln_sech = -r.cosh().ln();
    let ln_half_tanh = (0.5 * r.tanh()).ln();
    // phase of (-e^{iφ})ⁿ
    let step = zeta.phase() + PI;

    let ln_abs_sq = |n: usize, ln_fact_2n: f64, ln_fact_n: f64| {
        ln_sech + ln_fact_2n - 2.0 * ln_fact_n + 2.0 * n as f64 * ln_half_tanh
    };

    let pairs = d.div_ceil(2);
    let lf = ln_factorials(2 * pairs + 1);
    for n in 0..pairs {
        let mag = (0.5 * ln_abs_sq(n, lf[2 * n], lf[n])).exp();
        amps[2 * n] = C64::from_polar(mag, n as f64 * step);
    }

    let ln_fact_2p: f64 = lf[2 * pairs];
    let ln_fact_p: f64 = lf[pairs];
    let quarter_tanh_sq = (0.5 * r.tanh()).powi(2);
    let tail = geometric_like_tail(
        ln_abs_sq(pairs, ln_fact_2p, ln_fact_p).exp(),
        |n| {
            let n = n as f64;
            (2.0 * n + 2.0) * (2.0 * n + 1.0) / ((n + 1.0) * (n + 1.0)) * quarter_tanh_sq
        },
        pairs,
    );
    if tail > SQUEEZED_TAIL_TOL {
        return Err(Error::Precision { tail, tol: SQUEEZED_TAIL_TOL });
    }
    renormalize(&mut amps);
    Ok(Truncated { state: amps, tail })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> FockDim {
        FockDim::new(n).unwrap()
    }

    #[test]
    fn phase_wrapping() {
        assert_eq!(SqueezeParam::new(0.1, PI).unwrap().phase(), PI);
        assert!((SqueezeParam::new(0.1, -PI).unwrap().phase() - PI).abs() < 1e-15);
        assert!((SqueezeParam::new(0.1, 3.0 * PI / 2.0).unwrap().phase() + PI / 2.0).abs() < 1e-15);
        assert!(SqueezeParam::new(-0.1, 0.0).is_err());
    }

    #[test]
    fn vacuum_limits() {
        let c = coherent_state(CoherentAmplitude::new(C64::new(0.0, 0.0)).unwrap(), dim(5)).unwrap();
        assert_eq!(c.amplitudes()[0], C64::new(1.0, 0.0));
        let s = squeezed_vacuum(SqueezeParam::new(0.0, 0.0).unwrap(), dim(5)).unwrap();
        assert_eq!(s.amplitudes()[0], C64::new(1.0, 0.0));
        let t = thermal_density(0.0, dim(3)).unwrap();
        assert_eq!(t.state().populations(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn weak_coherent_poisson() {
        let c = coherent_state(CoherentAmplitude::from_mean_photon_number(1e-5).unwrap(), dim(10)).unwrap();
        let p = photon_number_distribution(&c).unwrap();
        assert!((p.probs()[0] - (-1e-5f64).exp()).abs() < 1e-15);
        assert!((p.probs()[1] - 1e-5 * (-1e-5f64).exp()).abs() < 1e-18);
        assert!((coherence_order(&c, 2).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn coherent_tail_is_exact_poisson_remainder() {
        // |α|² = 1 on 12 levels: Σ_{n≥12} e^{-1}/n!
        let c = coherent_state(CoherentAmplitude::from_mean_photon_number(1.0).unwrap(), dim(20)).unwrap();
        let mut want = 0.0;
        let mut fact = (1..20).map(|k| k as f64).product::<f64>();
        for n in 20..40 {
            fact *= n as f64;
            want += (-1.0f64).exp() / fact;
        }
        assert!((c.tail() - want).abs() <= 1e-3 * want);
        assert!(coherent_state(CoherentAmplitude::from_mean_photon_number(1.0).unwrap(), dim(12)).is_err());
    }

    #[test]
    fn thermal_ratio_and_g2() {
        let t = thermal_density(0.1, dim(20)).unwrap();
        let p = t.state().populations();
        assert!((p[1] / p[0] - 0.1 / 1.1).abs() < 1e-15);
        let t = thermal_density(1e-5, dim(10)).unwrap();
        assert!((coherence_order(&t, 2).unwrap() - 2.0).abs() < 1e-9);
        assert!(matches!(thermal_density(1.0, dim(10)), Err(Error::Precision { .. })));
    }

    #[test]
    fn squeezed_mean_and_parity() {
        let z = SqueezeParam::from_mean_photon_number(0.1, 0.0).unwrap();
        let s = squeezed_vacuum(z, dim(50)).unwrap();
        let p = photon_number_distribution(&s).unwrap();
        assert!((p.mean() - 0.1).abs() < 1e-10);
        assert!(p.probs().iter().skip(1).step_by(2).all(|&x| x == 0.0));
        assert!(matches!(
            squeezed_vacuum(SqueezeParam::from_mean_photon_number(4.0, 0.0).unwrap(), dim(10)),
            Err(Error::Precision { .. })
        ));
    }

    #[test]
    fn squeezed_amplitude_signs_follow_phase() {
        // φ = 0: c_1 = -√(sech r · 2)/1 · tanh(r)/2 < 0
        let s = squeezed_vacuum(SqueezeParam::new(0.5, 0.0).unwrap(), dim(40)).unwrap();
        let a = s.amplitudes();
        assert!(a[2].re < 0.0 && a[4].re > 0.0);
        assert!(a[2].im.abs() < 1e-15);
    }

    #[test]
    fn coherence_order_examples() {
        let one = crate::fock::basis_vector(4, 1);
        assert_eq!(coherence_order(one.as_slice(), 2).unwrap(), 0.0);
        let vac = crate::fock::basis_vector(4, 0);
        assert!(matches!(coherence_order(vac.as_slice(), 2), Err(Error::UndefinedStatistic(_))));
        assert!(coherence_order(one.as_slice(), 0).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(PhotonNumberDistribution::new(vec![0.5, 0.5], 0.0).is_ok());
        assert!(PhotonNumberDistribution::new(vec![0.5, 0.4], 0.0).is_err());
        assert!(PhotonNumberDistribution::new(vec![0.5, 0.4], 0.2).is_ok());
        assert!(PhotonNumberDistribution::new(vec![1.5, -0.5], 0.0).is_err());
    }
}
