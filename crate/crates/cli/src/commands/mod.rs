pub mod cascade;
pub mod fringes;
pub mod hbt;
pub mod reproduce;

use crate::Failure;

/// Parses `a:b` into a pair of numbers.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo = a.trim().parse::<f64>().map_err(|e| format!("{a:?}: {e}"))?;
    let hi = b.trim().parse::<f64>().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((lo, hi))
}

/// Parses `a,b` into two Fock dimensions.
pub fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected DIM_A,DIM_B, got {s:?}"))?;
    let da = a.trim().parse::<usize>().map_err(|e| format!("{a:?}: {e}"))?;
    let db = b.trim().parse::<usize>().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((da, db))
}

pub fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Failure::usage(format!("--{name} must be positive, got {x}")))
    }
}
