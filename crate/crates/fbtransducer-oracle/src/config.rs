//! Simulation settings and the white-noise drive weights.

use std::f64::consts::PI;

use fbtransducer::{EffectiveCouplings, ReducedParams};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{OracleError, Result};

/// Largest allowed `dt` times the fastest rate in the model.
pub const MAX_RATE_STEP: f64 = 0.05;

/// Default `dt` times the fastest rate. The Euler bias on the spectra is
/// below 1% here.
pub const DEFAULT_RATE_STEP: f64 = 0.005;

/// Welch segments required for a spectral estimate.
pub const MIN_SEGMENTS: usize = 8;

pub const DEFAULT_SEGMENTS: usize = 2048;

/// Switches for the individual noise inputs. Disabled inputs are replaced by
/// zero, which is unphysical but useful for checking one channel at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DriveMask {
    pub thermal: bool,
    /// Optical input, vacuum in the transmitted mode.
    pub optical: bool,
    pub optical_loss: bool,
    pub detection: bool,
    /// Microwave input and microwave loss port.
    pub microwave: bool,
}

impl DriveMask {
    pub const ALL: Self = Self {
        thermal: true,
        optical: true,
        optical_loss: true,
        detection: true,
        microwave: true,
    };

    pub const NONE: Self = Self {
        thermal: false,
        optical: false,
        optical_loss: false,
        detection: false,
        microwave: false,
    };
}

impl Default for DriveMask {
    fn default() -> Self {
        Self::ALL
    }
}

/// Per-quadrature densities of the independent noises driving the
/// mechanical mode, vacuum = 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveDensities {
    pub thermal: f64,
    pub optical: f64,
    pub optical_loss: f64,
    pub detection: f64,
    /// Microwave input and loss port, each.
    pub microwave: f64,
}

impl DriveDensities {
    pub fn new(r: &ReducedParams, eff: &EffectiveCouplings, mask: DriveMask) -> Self {
        let on = |b: bool, v: f64| if b { v } else { 0.0 };
        let h = r.h_gain;
        let hl = 2.0 * h * eff.lambda_l;
        let det = if r.eta_d < 1.0 {
            eff.eta_om * eff.eps * eff.eps * h / (4.0 * (2.0 * r.eta_l - 1.0).powi(2))
        } else {
            0.0
        };
        Self {
            thermal: on(mask.thermal, eff.eta_b * (r.nbar + 0.5)),
            optical: on(mask.optical, eff.eta_om * (h + 1.0 / h) / 4.0),
            optical_loss: on(mask.optical_loss, eff.eta_ol * (hl + 1.0 / hl) / 4.0),
            detection: on(mask.detection, det),
            microwave: on(mask.microwave, 0.5),
        }
    }

    /// Total density driving the mechanical mode.
    pub fn mechanical_total(&self) -> f64 {
        self.thermal + self.optical + self.optical_loss + self.detection
    }
}

/// Settings for one Monte Carlo run.
///
/// The run is split into `chunks` independent streams, each with its own
/// burn-in, so results do not depend on the thread count. The simulated time
/// is roughly `(n_segments + chunks) * segment_len * dt / 2` plus burn-in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub params: ReducedParams,
    pub dt: f64,
    /// Samples per Welch segment.
    pub segment_len: usize,
    pub n_segments: usize,
    pub seed: u64,
    /// Time discarded at the start of each stream.
    pub burn_in: f64,
    pub chunks: usize,
    pub mask: DriveMask,
    pub initial_b: Complex64,
    pub initial_c: Complex64,
}

impl SimConfig {
    /// Defaults for `params`: `dt` at [`DEFAULT_RATE_STEP`], frequency
    /// resolution of a twentieth of the slowest linewidth, and
    /// [`DEFAULT_SEGMENTS`] segments.
    pub fn for_params(params: ReducedParams, seed: u64) -> Result<Self> {
        let eff = params.effective()?;
        let dt = DEFAULT_RATE_STEP / fastest_rate(&eff);
        let slow = eff.gamma_prime.min(eff.kappa_m);
        let want = (40.0 * PI / (slow * dt)).ceil() as usize;
        let segment_len = want.next_power_of_two();
        let n_segments = DEFAULT_SEGMENTS;
        Ok(Self {
            params,
            dt,
            segment_len,
            n_segments,
            seed,
            burn_in: 40.0 / slow,
            chunks: default_chunks(n_segments),
            mask: DriveMask::ALL,
            initial_b: Complex64::new(0.0, 0.0),
            initial_c: Complex64::new(0.0, 0.0),
        })
    }

    pub fn with_segments(mut self, n: usize) -> Self {
        self.n_segments = n;
        self.chunks = default_chunks(n);
        self
    }

    /// Checks the step size and the segment layout.
    pub fn validate(&self) -> Result<EffectiveCouplings> {
        let eff = self.params.effective()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(OracleError::InvalidConfig(format!("dt = {}", self.dt)));
        }
        let product = self.dt * fastest_rate(&eff);
        if product >= MAX_RATE_STEP {
            return Err(OracleError::UnstableStep {
                dt: self.dt,
                product,
            });
        }
        if self.n_segments < MIN_SEGMENTS {
            return Err(OracleError::TooFewSegments {
                got: self.n_segments,
                min: MIN_SEGMENTS,
            });
        }
        if self.segment_len < 16 || self.segment_len % 2 != 0 {
            return Err(OracleError::InvalidConfig(format!(
                "segment length {} must be even and at least 16",
                self.segment_len
            )));
        }
        if self.chunks == 0 || self.chunks > self.n_segments {
            return Err(OracleError::InvalidConfig(format!(
                "{} chunks for {} segments",
                self.chunks, self.n_segments
            )));
        }
        if !(self.burn_in >= 0.0) {
            return Err(OracleError::InvalidConfig(format!(
                "burn-in {}",
                self.burn_in
            )));
        }
        Ok(eff)
    }

    /// Total simulated time, burn-in included.
    pub fn duration(&self) -> f64 {
        let half = self.segment_len / 2;
        let samples = (self.n_segments + self.chunks) * half;
        samples as f64 * self.dt + self.chunks as f64 * self.burn_in
    }

    /// Segments assigned to each stream.
    pub(crate) fn chunk_segments(&self) -> Vec<usize> {
        let base = self.n_segments / self.chunks;
        let extra = self.n_segments % self.chunks;
        (0..self.chunks)
            .map(|i| base + usize::from(i < extra))
            .collect()
    }
}

fn default_chunks(n_segments: usize) -> usize {
    (n_segments / 32).clamp(1, 128)
}

/// Fastest rate the integrator has to resolve.
pub fn fastest_rate(eff: &EffectiveCouplings) -> f64 {
    eff.gamma_prime.max(eff.kappa_m).max(2.0 * eff.g_m)
}
