//! Stochastic cross-check of the analytic transducer spectra.
//!
//! The mechanical and microwave amplitudes are integrated as classical
//! complex Langevin equations driven by independent white noises whose
//! quadrature densities reproduce the symmetrized quantum noise (vacuum =
//! 1/2). Welch spectra of the microwave output are then compared with the
//! closed-form prediction.
//!
//! ```no_run
//! use fbtransducer::params::reduced_preset;
//! use fbtransducer_oracle::{validate, SimConfig, BAND_KAPPA, RMS_TOL};
//!
//! let cfg = SimConfig::for_params(reduced_preset("fig6")?, 7)?;
//! let report = validate(&cfg, BAND_KAPPA, RMS_TOL)?;
//! assert!(report.comparison.pass);
//! # Ok::<(), fbtransducer_oracle::OracleError>(())
//! ```

pub mod config;
pub mod error;
pub mod psd;
pub mod sim;

pub use config::{DriveDensities, DriveMask, SimConfig};
pub use error::{OracleError, Result};
pub use psd::{
    analytic_output_spectrum, compare, mc_spectra, validate, welch_psd, Comparison, McSpectra,
    Quadrature, ValidationReport, BAND_KAPPA, RMS_TOL,
};
pub use sim::{simulate, TraceBundle};
