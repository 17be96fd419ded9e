//! Down-conversion followed by up-conversion on two truncated modes.
//!
//! The SPDC mode (A) starts in squeezed vacuum, the SFG mode (B) in vacuum.
//! The up-conversion unitary `exp{κ(a²b† − a†²b)}` commutes with
//! `N_A + 2N_B`, so it is exponentiated one conserved sector at a time.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    annihilation_matrix, basis_vector, fidelity_to_coherent, matrix_exponential, partial_trace_over_a, purity,
    tensor_product, ComplexMatrix, FockDim, TwoModeState,
};
use crate::states::{
    coherence_order, photon_number_distribution, squeezed_vacuum, CoherentAmplitude, PhotonNumberDistribution,
    SqueezeParam,
};

/// Backward-error tolerance used for the sector exponentials.
pub const EXPM_TOL: f64 = 1e-14;
/// Upper end of the bisection bracket for κ.
pub const KAPPA_BRACKET_MAX: f64 = 0.05;
/// Relative tolerance on κ at which bisection stops.
pub const KAPPA_REL_TOL: f64 = 1e-6;

pub const DEFAULT_DIM_SPDC: usize = 50;
pub const DEFAULT_DIM_SFG: usize = 10;

/// Parameters of one cascade run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeConfig {
    /// Target `sinh²|ζ|` of the down-converted mode.
    pub nbar_spdc: f64,
    /// Up-conversion strength.
    pub kappa: f64,
    pub dim_a: FockDim,
    pub dim_b: FockDim,
    #[serde(default)]
    pub zeta_phase: f64,
}

impl CascadeConfig {
    /// `n̄_SPDC = 0.1`, `κ = 8.7715e-3`, 50 × 10 levels.
    pub fn reference() -> Self {
        Self {
            nbar_spdc: 0.1,
            kappa: 8.7715e-3,
            dim_a: FockDim::new(DEFAULT_DIM_SPDC).unwrap(),
            dim_b: FockDim::new(DEFAULT_DIM_SFG).unwrap(),
            zeta_phase: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.nbar_spdc.is_finite() && self.nbar_spdc >= 0.0) {
            return Err(Error::Config(format!("nbar_spdc must be non-negative, got {}", self.nbar_spdc)));
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::Config(format!("kappa must be non-negative, got {}", self.kappa)));
        }
        Ok(())
    }
}

/// Statistics of the up-converted mode after tracing out the SPDC mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub pn_sfg: PhotonNumberDistribution,
    pub g2_sfg: f64,
    pub purity_sfg: f64,
    pub fidelity_coherent: f64,
    pub nbar_sfg: f64,
    pub nbar_spdc_out: f64,
    /// `g⁽²⁾` of the input squeezed vacuum.
    pub g2_spdc: f64,
    /// `g⁽⁴⁾` of the input squeezed vacuum.
    pub g4_spdc: f64,
    /// Low-gain prediction `g⁽⁴⁾_SPDC / (g⁽²⁾_SPDC)²` for `g2_sfg`.
    pub g2_sfg_predicted: f64,
    /// Truncation tail of the input squeezed vacuum.
    pub spdc_tail: f64,
}

/// `exp{κ(a²b† − a†²b)}` on the truncated joint space, stored as sector blocks.
#[derive(Clone, Debug)]
pub struct SfgUnitary {
    kappa: f64,
    dim_a: FockDim,
    dim_b: FockDim,
    sectors: Vec<Sector>,
}

#[derive(Clone, Debug)]
struct Sector {
    indices: Vec<usize>,
    block: ComplexMatrix,
}

/// Generator `κ(a²⊗b† − a†²⊗b)` as a dense joint-space matrix.
pub fn sfg_generator(kappa: f64, dim_a: FockDim, dim_b: FockDim) -> ComplexMatrix {
    let a = annihilation_matrix(dim_a);
    let b = annihilation_matrix(dim_b);
    let a2 = &a * &a;
    let a2_dag = a2.adjoint();
    let up = tensor_product(&a2, &b.adjoint());
    let down = tensor_product(&a2_dag, &b);
    (&up - &down).scale_real(kappa)
}

impl SfgUnitary {
    pub fn new(kappa: f64, dim_a: FockDim, dim_b: FockDim) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::Config(format!("kappa must be non-negative, got {kappa}")));
        }
        let generator = sfg_generator(kappa, dim_a, dim_b);
        let (da, db) = (dim_a.get(), dim_b.get());
        let max_sector = (da - 1) + 2 * (db - 1);
        let mut sectors = Vec::with_capacity(max_sector + 1);
        for s in 0..=max_sector {
            let indices: Vec<usize> = (0..db)
                .filter_map(|nb| s.checked_sub(2 * nb).filter(|&na| na < da).map(|na| na * db + nb))
                .collect();
            if indices.is_empty() {
                continue;
            }
            let block = if indices.len() == 1 || kappa == 0.0 {
                ComplexMatrix::identity(indices.len())
            } else {
                matrix_exponential(&generator.select(&indices, &indices), EXPM_TOL)?
            };
            sectors.push(Sector { indices, block });
        }
        Ok(Self { kappa, dim_a, dim_b, sectors })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Applies the unitary to a joint amplitude vector.
    pub fn apply_vec(&self, psi: &[C64]) -> Result<Vec<C64>> {
        let n = self.dim_a.get() * self.dim_b.get();
        if psi.len() != n {
            return Err(Error::Shape(format!("state of length {} on a joint space of dimension {n}", psi.len())));
        }
        let mut out = vec![C64::new(0.0, 0.0); n];
        let mut local = Vec::new();
        for sector in &self.sectors {
            local.clear();
            local.extend(sector.indices.iter().map(|&i| psi[i]));
            let rotated = sector.block.mul_vec(&local)?;
            for (&i, z) in sector.indices.iter().zip(rotated) {
                out[i] = z;
            }
        }
        Ok(out)
    }

    /// Full joint-space matrix.
    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.dim_a.get() * self.dim_b.get();
        let mut u = ComplexMatrix::zeros(n, n);
        for sector in &self.sectors {
            for (r, &i) in sector.indices.iter().enumerate() {
                for (c, &j) in sector.indices.iter().enumerate() {
                    u[(i, j)] = sector.block[(r, c)];
                }
            }
        }
        u
    }

    pub fn apply(&self, psi: &TwoModeState) -> Result<TwoModeState> {
        if psi.dim_a() != self.dim_a || psi.dim_b() != self.dim_b {
            return Err(Error::Shape(format!(
                "state dims ({}, {}) do not match unitary dims ({}, {})",
                psi.dim_a().get(),
                psi.dim_b().get(),
                self.dim_a.get(),
                self.dim_b.get()
            )));
        }
        if psi.is_pure_repr() {
            let v = self.apply_vec(psi.amplitudes().unwrap())?;
            TwoModeState::pure(v, self.dim_a, self.dim_b)
        } else {
            psi.conjugated_by(&self.to_dense())
        }
    }
}

/// `Ŝ_SFG(κ)|ψ⟩`.
pub fn apply_sfg(psi: &TwoModeState, kappa: f64) -> Result<TwoModeState> {
    SfgUnitary::new(kappa, psi.dim_a(), psi.dim_b())?.apply(psi)
}

/// `|Ψ_SPDC⟩ = S(ζ)|0⟩ ⊗ |0⟩`.
pub fn initial_state(nbar_spdc: f64, zeta_phase: f64, dim_a: FockDim, dim_b: FockDim) -> Result<(TwoModeState, f64)> {
    let zeta = SqueezeParam::from_mean_photon_number(nbar_spdc, zeta_phase)?;
    let sq = squeezed_vacuum(zeta, dim_a)?;
    let tail = sq.tail();
    let state = TwoModeState::product(sq.amplitudes(), &basis_vector(dim_b.get(), 0))?;
    Ok((state, tail))
}

fn sfg_mean(initial: &TwoModeState, kappa: f64) -> Result<f64> {
    let out = apply_sfg(initial, kappa)?;
    Ok(out.expect_diagonal(|_, nb| nb as f64))
}

/// Mean occupation of the up-converted mode as a function of κ.
pub fn nbar_sfg(nbar_spdc: f64, kappa: f64, dim_a: FockDim, dim_b: FockDim) -> Result<f64> {
    let (initial, _) = initial_state(nbar_spdc, 0.0, dim_a, dim_b)?;
    sfg_mean(&initial, kappa)
}

/// Solves `n̄_SFG(κ) = target` by bisection on `[0, 0.05]`.
pub fn calibrate_kappa(nbar_spdc: f64, target_nbar_sfg: f64, dim_a: FockDim, dim_b: FockDim) -> Result<f64> {
    if !(target_nbar_sfg.is_finite() && target_nbar_sfg >= 0.0) {
        return Err(Error::Calibration(format!("target occupation must be non-negative, got {target_nbar_sfg}")));
    }
    if target_nbar_sfg == 0.0 {
        return Ok(0.0);
    }
    let (initial, _) = initial_state(nbar_spdc, 0.0, dim_a, dim_b)?;
    let f = |k: f64| sfg_mean(&initial, k).map(|n| n - target_nbar_sfg);

    let (mut lo, mut hi) = (0.0, KAPPA_BRACKET_MAX);
    if f(hi)? < 0.0 {
        return Err(Error::Calibration(format!(
            "n̄_SFG = {target_nbar_sfg:e} is not reached for κ ≤ {KAPPA_BRACKET_MAX}"
        )));
    }
    while hi - lo > KAPPA_REL_TOL * 0.5 * (hi + lo) {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Squeezed vacuum → SFG → partial trace, with the derived statistics.
pub fn run_cascade(config: &CascadeConfig) -> Result<CascadeReport> {
    config.validate()?;
    let (initial, spdc_tail) = initial_state(config.nbar_spdc, config.zeta_phase, config.dim_a, config.dim_b)?;

    let spdc_vec: Vec<C64> = {
        let db = config.dim_b.get();
        initial.amplitudes().unwrap().iter().step_by(db).copied().collect()
    };
    let g2_spdc = coherence_order(spdc_vec.as_slice(), 2)?;
    let g4_spdc = coherence_order(spdc_vec.as_slice(), 4)?;

    let out = SfgUnitary::new(config.kappa, config.dim_a, config.dim_b)?.apply(&initial)?;
    let rho = partial_trace_over_a(&out)?;
    let pn_sfg = photon_number_distribution(&rho)?;
    let nbar_sfg = pn_sfg.mean();
    let g2_sfg = pn_sfg.coherence(2)?;
    let alpha = CoherentAmplitude::from_mean_photon_number(nbar_sfg)?;
    let fidelity_coherent = fidelity_to_coherent(&rho, alpha.alpha())?;

    Ok(CascadeReport {
        g2_sfg,
        purity_sfg: purity(&rho),
        fidelity_coherent,
        nbar_sfg,
        nbar_spdc_out: out.expect_diagonal(|na, _| na as f64),
        g2_spdc,
        g4_spdc,
        g2_sfg_predicted: g4_spdc / (g2_spdc * g2_spdc),
        spdc_tail,
        pn_sfg,
    })
}
