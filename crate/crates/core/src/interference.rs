//! Single-photon interference between pump light and up-converted biphotons.
//!
//! One arm carries the pump photon, the other a biphoton that picks up a
//! spectral phase `φ(ω)` before being up-converted back to `ω_p = 2ω₀`.
//! The up-converted amplitude is
//! `g = ∫dΩ Γ(Ω) exp{i[φ(ω₀+Ω) + φ(ω₀−Ω)]}`, in which every odd order of the
//! phase expansion cancels and every even order counts twice.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{composite_gauss_legendre, QuadratureRule};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Centre wavelength of the degenerate down-converted photons.
pub const DEGENERATE_WAVELENGTH: f64 = 1064e-9;
/// Biphoton coherence time used for the default spectral width.
pub const BIPHOTON_COHERENCE_TIME: f64 = 50e-15;
/// Fringe frequency expected for the doubled phase sensitivity.
pub const DOUBLED_FRINGE_FREQUENCY: f64 = 0.5;
/// Integration range in units of σ.
pub const JSA_HALF_WIDTH_SIGMAS: f64 = 6.0;
pub const DEFAULT_PANELS: usize = 128;
pub const DEFAULT_PANEL_ORDER: usize = 16;
/// Minimum number of nodes per local period of the integrand phase.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 8.0;

/// Spectral phase expanded around ω₀:
/// `φ(ω₀±Ω) = φ₀ ± αΩ + (β/2)Ω² ± (γ/6)Ω³`, plus a path term `ωz/c`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralPhase {
    /// rad
    pub phi0: f64,
    /// s
    pub alpha: f64,
    /// s²
    pub beta: f64,
    /// s³
    pub gamma: f64,
    /// m
    pub z: f64,
}

impl SpectralPhase {
    pub fn constant(phi0: f64) -> Self {
        Self { phi0, ..Self::default() }
    }

    pub fn with_phi0(self, phi0: f64) -> Self {
        Self { phi0, ..self }
    }

    pub fn is_finite(&self) -> bool {
        [self.phi0, self.alpha, self.beta, self.gamma, self.z].iter().all(|x| x.is_finite())
    }

    /// Phase picked up by one photon at `ω₀ + detuning`.
    pub fn single_photon(&self, omega0: f64, detuning: f64) -> f64 {
        let o = detuning;
        self.phi0
            + self.alpha * o
            + 0.5 * self.beta * o * o
            + self.gamma / 6.0 * o * o * o
            + (omega0 + o) * self.z / SPEED_OF_LIGHT
    }
}

/// `φ(ω₀+Ω) + φ(ω₀−Ω)`, with the odd orders dropped analytically.
pub fn phase_sum(phase: &SpectralPhase, omega0: f64, detuning: f64) -> f64 {
    2.0 * (phase.phi0 + omega0 * phase.z / SPEED_OF_LIGHT) + phase.beta * detuning * detuning
}

/// σ of the default Gaussian amplitude for a given biphoton coherence time.
pub fn sigma_from_coherence_time(coherence_time: f64) -> f64 {
    1.0 / coherence_time
}

/// Effective joint spectral amplitude `Γ(ω₀, Ω)` sampled on a quadrature grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveJsa {
    omega0: f64,
    sigma: f64,
    rule: QuadratureRule,
    amplitudes: Vec<C64>,
}

impl EffectiveJsa {
    /// Gaussian `Γ(Ω) ∝ exp(-Ω²/σ²)` on the default grid.
    pub fn gaussian(omega0: f64, sigma: f64) -> Result<Self> {
        Self::gaussian_with_grid(omega0, sigma, DEFAULT_PANELS, DEFAULT_PANEL_ORDER)
    }

    pub fn gaussian_with_grid(omega0: f64, sigma: f64, panels: usize, order: usize) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Config(format!("JSA width must be positive, got {sigma}")));
        }
        let half = JSA_HALF_WIDTH_SIGMAS * sigma;
        let rule = composite_gauss_legendre(-half, half, panels, order)?;
        let amplitudes = rule.nodes.iter().map(|&o| C64::new((-(o / sigma).powi(2)).exp(), 0.0)).collect();
        Self::from_samples(omega0, sigma, rule, amplitudes)
    }

    /// Degenerate photons at 1064 nm with a 50 fs coherence time.
    pub fn default_biphoton() -> Self {
        let omega0 = 2.0 * PI * SPEED_OF_LIGHT / DEGENERATE_WAVELENGTH;
        Self::gaussian(omega0, sigma_from_coherence_time(BIPHOTON_COHERENCE_TIME))
            .expect("default JSA parameters are valid")
    }

    /// Arbitrary amplitudes on a grid that must be symmetric about Ω = 0.
    pub fn from_samples(omega0: f64, sigma: f64, rule: QuadratureRule, amplitudes: Vec<C64>) -> Result<Self> {
        if rule.nodes.len() != amplitudes.len() || rule.weights.len() != amplitudes.len() || rule.is_empty() {
            return Err(Error::Shape("JSA samples, nodes and weights must have equal non-zero length".into()));
        }
        if !(sigma.is_finite() && sigma > 0.0) || !omega0.is_finite() {
            return Err(Error::Config("JSA centre and width must be finite, width positive".into()));
        }
        if amplitudes.iter().any(|z| !z.is_finite()) {
            return Err(Error::Numerical("JSA amplitudes must be finite".into()));
        }
        let n = rule.len();
        let scale = rule.nodes.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..n {
            if (rule.nodes[i] + rule.nodes[n - 1 - i]).abs() > 1e-12 * scale {
                return Err(Error::Config("JSA grid is not symmetric about zero detuning".into()));
            }
        }
        Ok(Self { omega0, sigma, rule, amplitudes })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn grid(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Fails if the grid samples the local oscillation of `e^{iβΩ²}` too coarsely.
    pub fn check_resolution(&self, phase: &SpectralPhase) -> Result<()> {
        let edge = self.rule.nodes.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let slope = 2.0 * phase.beta.abs() * edge;
        if slope == 0.0 {
            return Ok(());
        }
        let samples = 2.0 * PI / (slope * self.rule.max_spacing());
        if samples < MIN_SAMPLES_PER_PERIOD {
            return Err(Error::Resolution(format!(
                "{samples:.2} samples per period at the grid edge (need {MIN_SAMPLES_PER_PERIOD})"
            )));
        }
        Ok(())
    }
}

/// Up-converted amplitude `g(ω_p)`, normalized so that `g = 1` at zero phase.
pub fn g_amplitude(jsa: &EffectiveJsa, phase: &SpectralPhase) -> Result<C64> {
    if !phase.is_finite() {
        return Err(Error::Config("spectral phase coefficients must be finite".into()));
    }
    jsa.check_resolution(phase)?;
    let mut norm = C64::new(0.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for ((&o, &w), &amp) in jsa.rule.nodes.iter().zip(&jsa.rule.weights).zip(&jsa.amplitudes) {
        let weighted = amp * w;
        norm += weighted;
        acc += weighted * C64::from_polar(1.0, phase_sum(phase, jsa.omega0, o));
    }
    if norm.norm() == 0.0 {
        return Err(Error::Numerical("JSA integrates to zero".into()));
    }
    Ok(acc / norm)
}

/// Detection probability `|1 + g|²/4` at the bright output.
pub fn fringe_probability(g: C64) -> f64 {
    (C64::new(1.0, 0.0) + g).norm_sqr() / 4.0
}

/// Best visibility for arms of unequal intensity after subtracting dark counts.
pub fn visibility_from_rates(raw_a: f64, raw_b: f64, dark: f64) -> Result<f64> {
    if !(dark.is_finite() && dark >= 0.0) {
        return Err(Error::InvalidRate(format!("dark rate must be non-negative, got {dark}")));
    }
    if !(raw_a.is_finite() && raw_b.is_finite()) || raw_a < dark || raw_b < dark {
        return Err(Error::InvalidRate(format!("arm rates ({raw_a}, {raw_b}) below dark rate {dark}")));
    }
    let (ia, ib) = (raw_a - dark, raw_b - dark);
    if ia + ib == 0.0 {
        return Err(Error::InvalidRate("both arms are at the dark level".into()));
    }
    Ok(2.0 * (ia * ib).sqrt() / (ia + ib))
}

/// `V / V_max`, a lower bound on the indistinguishability of the two arms.
pub fn indistinguishability(visibility: f64, v_max: f64) -> Result<f64> {
    if !(v_max > 0.0) {
        return Err(Error::InvalidRate(format!("maximal visibility must be positive, got {v_max}")));
    }
    Ok(visibility / v_max)
}

/// Raw detector rates with one arm blocked, and the dark rate (Hz).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmRates {
    pub raw_a: f64,
    pub raw_b: f64,
    pub dark: f64,
}

impl ArmRates {
    pub fn reference() -> Self {
        Self { raw_a: 344.4, raw_b: 568.8, dark: 202.9 }
    }

    /// Dark-subtracted arm intensities.
    pub fn signal(&self) -> Result<(f64, f64)> {
        visibility_from_rates(self.raw_a, self.raw_b, self.dark)?;
        Ok((self.raw_a - self.dark, self.raw_b - self.dark))
    }

    pub fn max_visibility(&self) -> Result<f64> {
        visibility_from_rates(self.raw_a, self.raw_b, self.dark)
    }
}

/// Result of a fixed-frequency fringe fit
/// `y = mean + a·cos(φ/f) + b·sin(φ/f)`.
///
/// The frequency `f` is counted per period of the applied phase: a fringe
/// with the pump's own sensitivity has `f = 1`, the doubled biphoton
/// sensitivity has `f = 0.5`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub frequency: f64,
    pub mean: f64,
    pub cos_amp: f64,
    pub sin_amp: f64,
    pub chi2: f64,
}

impl FringeFit {
    pub fn amplitude(&self) -> f64 {
        self.cos_amp.hypot(self.sin_amp)
    }

    /// Phase offset θ in `mean + A cos(φ/f − θ)`.
    pub fn phase_offset(&self) -> f64 {
        self.sin_amp.atan2(self.cos_amp)
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let x = phi / self.frequency;
        self.mean + self.cos_amp * x.cos() + self.sin_amp * x.sin()
    }
}

/// Weighted linear least squares of the fringe model at fixed frequency.
pub fn fit_fixed_frequency(phi: &[f64], y: &[f64], sigma: &[f64], frequency: f64) -> Result<FringeFit> {
    if phi.len() != y.len() || phi.len() != sigma.len() {
        return Err(Error::Shape("fit inputs must have equal length".into()));
    }
    if phi.len() < 3 {
        return Err(Error::Config("fringe fit needs at least three points".into()));
    }
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(Error::Config(format!("fringe frequency must be positive, got {frequency}")));
    }
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for ((&p, &v), &s) in phi.iter().zip(y).zip(sigma) {
        if !(s > 0.0) {
            return Err(Error::Config("fit uncertainties must be positive".into()));
        }
        let w = 1.0 / (s * s);
        let x = p / frequency;
        let basis = [1.0, x.cos(), x.sin()];
        for i in 0..3 {
            atb[i] += w * basis[i] * v;
            for j in 0..3 {
                ata[i][j] += w * basis[i] * basis[j];
            }
        }
    }
    let c = solve3(ata, atb).ok_or_else(|| Error::Numerical("degenerate fringe fit".into()))?;
    let mut fit = FringeFit { frequency, mean: c[0], cos_amp: c[1], sin_amp: c[2], chi2: 0.0 };
    fit.chi2 = phi.iter().zip(y).zip(sigma).map(|((&p, &v), &s)| ((v - fit.eval(p)) / s).powi(2)).sum();
    Ok(fit)
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for k in 0..3 {
        let p = (k..3).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in (k + 1)..3 {
            let f = a[i][k] / a[k][k];
            for j in k..3 {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = ((k + 1)..3).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// Frequency found by minimizing χ² over a sweep of fixed-frequency fits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEstimate {
    pub frequency: f64,
    /// One-sigma error from the Δχ² = 1 curvature.
    pub error: f64,
    pub fit: FringeFit,
}

/// Sweeps the fringe frequency over `[f_lo, f_hi]` and refines the χ² minimum.
pub fn fit_fringe_frequency(phi: &[f64], y: &[f64], sigma: &[f64], f_lo: f64, f_hi: f64) -> Result<FrequencyEstimate> {
    if !(f_lo > 0.0 && f_hi > f_lo) {
        return Err(Error::Config(format!("invalid frequency range [{f_lo}, {f_hi}]")));
    }
    let chi2 = |f: f64| fit_fixed_frequency(phi, y, sigma, f).map(|fit| fit.chi2);
    const STEPS: usize = 400;
    let step = (f_hi - f_lo) / STEPS as f64;
    let mut best = (f_lo, f64::INFINITY);
    for i in 0..=STEPS {
        let f = f_lo + i as f64 * step;
        let c = chi2(f)?;
        if c < best.1 {
            best = (f, c);
        }
    }
    // Golden-section refinement inside the neighbouring sweep cells.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((best.0 - step).max(f_lo), (best.0 + step).min(f_hi));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (chi2(c)?, chi2(d)?);
    while (b - a).abs() > 1e-12 * (a.abs() + b.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = chi2(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = chi2(d)?;
        }
    }
    let f = 0.5 * (a + b);
    let h = 1e-4 * f;
    let curvature = (chi2(f + h)? - 2.0 * chi2(f)? + chi2(f - h)?) / (h * h);
    let error = if curvature > 0.0 { (2.0 / curvature).sqrt() } else { f64::INFINITY };
    Ok(FrequencyEstimate { frequency: f, error, fit: fit_fixed_frequency(phi, y, sigma, f)? })
}

/// Counts (or their expectations) recorded at each phase setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    /// SLM phase settings (rad).
    pub phase_values: Vec<f64>,
    pub counts: Vec<f64>,
    /// Count rates (Hz).
    pub rates: Vec<f64>,
    /// Poissonian rate errors (Hz).
    pub errors: Vec<f64>,
    pub dwell: f64,
    pub fit_frequency: f64,
    pub fit: FringeFit,
    /// Dark-subtracted fringe visibility from the fit, clamped to [0, 1].
    pub visibility: f64,
    /// Best visibility allowed by the arm imbalance.
    pub v_max: f64,
}

/// Expected counts per phase setting: the pump arm interferes with the
/// up-converted arm, whose amplitude is scaled by `g(φ)`.
pub fn expected_counts(
    jsa: &EffectiveJsa,
    template: &SpectralPhase,
    phi_values: &[f64],
    rates: &ArmRates,
    dwell: f64,
) -> Result<Vec<f64>> {
    if !(dwell.is_finite() && dwell > 0.0) {
        return Err(Error::Config(format!("dwell time must be positive, got {dwell}")));
    }
    let (ia, ib) = rates.signal()?;
    phi_values
        .iter()
        .map(|&phi| {
            let g = g_amplitude(jsa, &template.with_phi0(phi))?;
            let intensity = ia * g.norm_sqr() + ib + 2.0 * (ia * ib).sqrt() * g.re;
            Ok(dwell * (intensity.max(0.0) + rates.dark))
        })
        .collect()
}

fn scan_from_counts(phi_values: &[f64], counts: Vec<f64>, sigmas: &[f64], rates: &ArmRates, dwell: f64) -> Result<FringeScan> {
    let fit = fit_fixed_frequency(phi_values, &counts, sigmas, DOUBLED_FRINGE_FREQUENCY)?;
    let background = fit.mean - rates.dark * dwell;
    let visibility = if background > 0.0 { (fit.amplitude() / background).clamp(0.0, 1.0) } else { 0.0 };
    Ok(FringeScan {
        phase_values: phi_values.to_vec(),
        rates: counts.iter().map(|c| c / dwell).collect(),
        errors: counts.iter().map(|c| c.sqrt() / dwell).collect(),
        counts,
        dwell,
        fit_frequency: DOUBLED_FRINGE_FREQUENCY,
        fit,
        visibility,
        v_max: rates.max_visibility()?,
    })
}

/// Noise-free scan: expected counts fitted with unit weights.
pub fn noiseless_fringe_scan(
    jsa: &EffectiveJsa,
    template: &SpectralPhase,
    phi_values: &[f64],
    rates: &ArmRates,
    dwell: f64,
) -> Result<FringeScan> {
    let counts = expected_counts(jsa, template, phi_values, rates, dwell)?;
    scan_from_counts(phi_values, counts, &vec![1.0; phi_values.len()], rates, dwell)
}

/// Poisson-sampled fringe scan. Point `i` draws from its own stream of the
/// seeded generator, so results do not depend on evaluation order.
pub fn simulate_fringe_scan(
    jsa: &EffectiveJsa,
    template: &SpectralPhase,
    phi_values: &[f64],
    rates: &ArmRates,
    dwell: f64,
    seed: u64,
) -> Result<FringeScan> {
    let expected = expected_counts(jsa, template, phi_values, rates, dwell)?;
    let counts: Vec<f64> = expected
        .iter()
        .enumerate()
        .map(|(i, &mean)| {
            if mean <= 0.0 {
                return 0.0;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            Poisson::new(mean).map(|p| p.sample(&mut rng)).unwrap_or(0.0)
        })
        .collect();
    let sigmas: Vec<f64> = counts.iter().map(|&c| c.max(1.0).sqrt()).collect();
    scan_from_counts(phi_values, counts, &sigmas, rates, dwell)
}

/// Inclusive phase grid `start, start + step, …` up to `stop`. The last point
/// may overshoot `stop` by up to 5% of a step, so rounded endpoints such as
/// `0:0.349:9.42` still cover the intended `0:π/9:3π`.
pub fn phase_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
        return Err(Error::Config(format!("invalid phase grid {start}:{step}:{stop}")));
    }
    let n = ((stop - start) / step + 0.05).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_orders_cancel_in_phase_sum() {
        let p = SpectralPhase { alpha: 1e-15, ..Default::default() };
        assert_eq!(phase_sum(&p, 1.77e15, 3e13), 0.0);
        let p = SpectralPhase { beta: 2e-30, ..Default::default() };
        assert!((phase_sum(&p, 0.0, 1e15) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn half_wavelength_path_gives_pi() {
        let omega0 = 2.0 * PI * SPEED_OF_LIGHT / 1064e-9;
        let p = SpectralPhase { z: 266e-9, ..Default::default() };
        assert!((phase_sum(&p, omega0, 0.0) - PI).abs() < 1e-12);
    }

    #[test]
    fn phase_sum_agrees_with_direct_evaluation() {
        let p = SpectralPhase { phi0: 0.3, alpha: 2e-14, beta: 1e-28, gamma: 3e-42, z: 1e-6 };
        let omega0 = 1.7e15;
        for o in [-4e13, -1e12, 0.0, 5e12, 6e13] {
            let direct = p.single_photon(omega0, o) + p.single_photon(omega0, -o);
            assert!((direct - phase_sum(&p, omega0, o)).abs() < 1e-9 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn zero_and_constant_phase() {
        let jsa = EffectiveJsa::default_biphoton();
        let g = g_amplitude(&jsa, &SpectralPhase::default()).unwrap();
        assert!((g - C64::new(1.0, 0.0)).norm() < 1e-14);
        let g = g_amplitude(&jsa, &SpectralPhase::constant(0.4)).unwrap();
        assert!((g - C64::from_polar(1.0, 0.8)).norm() < 1e-14);
    }

    #[test]
    fn fringe_probability_limits() {
        assert_eq!(fringe_probability(C64::new(1.0, 0.0)), 1.0);
        assert_eq!(fringe_probability(C64::new(-1.0, 0.0)), 0.0);
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let jsa = EffectiveJsa::gaussian_with_grid(1e15, 1e13, 4, 4).unwrap();
        let p = SpectralPhase { beta: 20.0 / 1e26, ..Default::default() };
        assert!(matches!(g_amplitude(&jsa, &p), Err(Error::Resolution(_))));
    }

    #[test]
    fn asymmetric_grid_is_rejected() {
        let rule = QuadratureRule { nodes: vec![-1.0, 0.5], weights: vec![1.0, 1.0] };
        let amps = vec![C64::new(1.0, 0.0); 2];
        assert!(EffectiveJsa::from_samples(1.0, 1.0, rule, amps).is_err());
    }

    #[test]
    fn visibility_arithmetic() {
        assert_eq!(visibility_from_rates(100.0, 100.0, 0.0).unwrap(), 1.0);
        assert!(matches!(visibility_from_rates(100.0, 50.0, 60.0), Err(Error::InvalidRate(_))));
        let v = visibility_from_rates(344.4, 568.8, 202.9).unwrap();
        assert!((v - 0.897).abs() < 1e-3);
    }

    #[test]
    fn fixed_frequency_fit_recovers_parameters() {
        let phi = phase_grid(0.0, 3.0 * PI, PI / 9.0).unwrap();
        let y: Vec<f64> = phi.iter().map(|p| 10.0 + 3.0 * (2.0 * p - 0.7).cos()).collect();
        let fit = fit_fixed_frequency(&phi, &y, &vec![1.0; phi.len()], 0.5).unwrap();
        assert!((fit.mean - 10.0).abs() < 1e-12);
        assert!((fit.amplitude() - 3.0).abs() < 1e-12);
        assert!((fit.phase_offset() - 0.7).abs() < 1e-12);
        assert!(fit.chi2 < 1e-20);
    }

    #[test]
    fn phase_grid_is_inclusive() {
        let g = phase_grid(0.0, 9.42, 0.349).unwrap();
        assert_eq!(g.len(), 27 + 1);
        assert!(phase_grid(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn dwell_must_be_positive() {
        let jsa = EffectiveJsa::default_biphoton();
        let r = simulate_fringe_scan(&jsa, &SpectralPhase::default(), &[0.0, 1.0, 2.0], &ArmRates::reference(), 0.0, 1);
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
