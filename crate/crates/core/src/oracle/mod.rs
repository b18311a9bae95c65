//! Independent ground truth for the analytic expressions: Monte Carlo over
//! the raw SNR events and adaptive integration of the exact integrals.

pub mod adaptive;
pub mod mc;
pub mod reference;

pub use mc::{mc_estimate, mc_system, mc_t2t, sample_gains, McEstimate, McEvent};
pub use reference::{quad_reference_system, quad_reference_t2t, Event};

use crate::error::{Error, Result};

/// Tolerance for the adaptive reference used in relative-error reports.
pub const REFERENCE_TOL: f64 = 1e-10;

/// `|approx - reference| / |reference|`.
pub fn relative_error(approx: f64, reference: f64) -> Result<f64> {
    if reference == 0.0 {
        return Err(Error::InvalidArgument(
            "relative error against a zero reference".into(),
        ));
    }
    Ok((approx - reference).abs() / reference.abs())
}
