//! What the in-loop homodyne photocurrent reveals about the transferred
//! state.
//!
//! Frequencies are sideband detunings `ω`; the photocurrent frequency in the
//! lab frame is `ω + Ω`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{ModelError, Result};
use crate::params::{EffectiveCouplings, ReducedParams};
use crate::response::{ideal_gain, susceptibilities};
use crate::spectrum::SpectrumSeries;

/// Gains from the optical input, the mechanical bath and the microwave input
/// into the optical output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LightGains {
    pub t_aa: Complex64,
    pub t_ba: Complex64,
    pub t_ca: Complex64,
}

impl LightGains {
    pub fn sum(&self) -> f64 {
        self.t_aa.norm_sqr() + self.t_ba.norm_sqr() + self.t_ca.norm_sqr()
    }
}

/// Input-to-light gains at sideband detuning `omega`.
pub fn light_gains(r: &ReducedParams, eff: &EffectiveCouplings, omega: f64) -> LightGains {
    let x = eff.gamma_prime * susceptibilities(eff, omega).chi_b_em;
    LightGains {
        t_aa: 1.0 - eff.eta_om * x,
        t_ba: (eff.eta_om * eff.eta_b).sqrt() * x,
        t_ca: eff.eta_om.sqrt() * ideal_gain(r, eff, omega),
    }
}

/// Narrowband optical pulse entering the transducer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseSpec {
    /// Centre detuning from the upper sideband.
    pub omega_p: f64,
    /// Second moment of the pulse quadrature seen by the detector.
    pub b_theta_var: f64,
    /// Duration of the rectangular pulse.
    pub duration: f64,
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

impl PulseSpec {
    /// Rectangular pulse whose envelope `x(ω)` has the requested full width at
    /// half maximum.
    pub fn rectangular(omega_p: f64, b_theta_var: f64, fwhm: f64) -> Self {
        // sinc(y) = 1/2 at a single y in (0, 1); the envelope half width in ω
        // is 2πy/T.
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if sinc(m) > 0.5 {
                lo = m
            } else {
                hi = m
            }
        }
        let y_half = 0.5 * (lo + hi);
        Self {
            omega_p,
            b_theta_var,
            duration: 2.0 * 2.0 * PI * y_half / fwhm,
        }
    }

    /// Default pulse: FWHM one tenth of the broadened linewidth.
    pub fn default_for(eff: &EffectiveCouplings, omega_p: f64, b_theta_var: f64) -> Self {
        Self::rectangular(omega_p, b_theta_var, eff.gamma_prime / 10.0)
    }

    /// Envelope `x(ω)` of the rectangular pulse, using lab-frame frequencies
    /// so the image term at negative frequency is included.
    pub fn envelope(&self, eff: &EffectiveCouplings, omega: f64) -> f64 {
        let w = omega + eff.omega;
        let wp = self.omega_p + eff.omega;
        let k = self.duration / (2.0 * PI);
        0.5 * (sinc(k * (w - wp)) + sinc(k * (w + wp))).abs()
    }

    /// Whether the pulse is narrow against the transfer bandwidth `Γ′`.
    pub fn is_narrowband(&self, eff: &EffectiveCouplings) -> bool {
        self.duration * eff.gamma_prime >= 2.0 * PI * 2.0
    }
}

/// Single-sided photocurrent spectrum for a pulsed optical input.
pub fn photocurrent_spectrum_pulse(
    r: &ReducedParams,
    eff: &EffectiveCouplings,
    grid: &[f64],
    pulse: &PulseSpec,
) -> SpectrumSeries {
    let t_aa_p = light_gains(r, eff, pulse.omega_p).t_aa.norm_sqr();
    let values = grid
        .iter()
        .map(|&w| {
            let t_ba = light_gains(r, eff, w).t_ba.norm_sqr();
            0.5 + 0.5 * r.nbar * t_ba + t_aa_p * pulse.envelope(eff, w) * (pulse.b_theta_var - 0.5)
        })
        .collect();
    SpectrumSeries::new(grid.to_vec(), values, "photocurrent", "gamma")
}

/// Photocurrent spectrum for a vacuum optical input, split by source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VacuumSpectrum {
    pub optical: SpectrumSeries,
    pub mechanical: SpectrumSeries,
    pub microwave: SpectrumSeries,
    pub total: SpectrumSeries,
}

/// Per-source contributions at one detuning for arbitrary feedback gain `h`:
/// `(optical, mechanical, microwave)`.
fn vacuum_terms(r: &ReducedParams, eff: &EffectiveCouplings, omega: f64) -> (f64, f64, f64) {
    let h = r.h_gain;
    let g = light_gains(r, eff, omega);
    let (t_aa, t_ba, t_ca) = (g.t_aa.norm_sqr(), g.t_ba.norm_sqr(), g.t_ca.norm_sqr());
    let h2 = h * h;
    let optical = (1.0 + h2) / (8.0 * h2) * (t_aa + 1.0)
        - (1.0 - h2) / (4.0 * h2) * (1.0 - t_ba / (2.0 * eff.eta_b) - t_ca / 2.0);
    let mechanical = (2.0 * r.nbar + 1.0) * t_ba / (4.0 * h);
    let microwave = t_ca / (4.0 * h);
    (optical, mechanical, microwave)
}

/// Symmetrized in-loop photocurrent spectrum with vacuum optical input, for
/// any feedback gain. Requires unit efficiencies.
pub fn vacuum_spectrum(
    r: &ReducedParams,
    eff: &EffectiveCouplings,
    grid: &[f64],
) -> Result<VacuumSpectrum> {
    for v in [r.eta_l, r.eta_m, r.eta_d] {
        if (v - 1.0).abs() > 1e-12 {
            return Err(ModelError::OutOfScope(
                "the arbitrary-gain photocurrent spectrum needs unit efficiencies",
            ));
        }
    }
    let n = grid.len();
    let (mut o, mut m, mut w, mut t) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for &x in grid {
        let (a, b, c) = vacuum_terms(r, eff, x);
        o.push(a);
        m.push(b);
        w.push(c);
        t.push(a + b + c);
    }
    let mk = |v, l| SpectrumSeries::new(grid.to_vec(), v, l, "gamma");
    Ok(VacuumSpectrum {
        optical: mk(o, "optical"),
        mechanical: mk(m, "mechanical"),
        microwave: mk(w, "microwave"),
        total: mk(t, "total"),
    })
}

/// Closed-form total of [`vacuum_spectrum`] at one detuning, written without
/// the per-source split.
pub fn vacuum_total(r: &ReducedParams, eff: &EffectiveCouplings, omega: f64) -> f64 {
    let h = r.h_gain;
    let g = light_gains(r, eff, omega);
    let (t_aa, t_ba, t_ca) = (g.t_aa.norm_sqr(), g.t_ba.norm_sqr(), g.t_ca.norm_sqr());
    let eb = eff.eta_b;
    0.25 + t_aa / 4.0
        + t_ca / (4.0 * h)
        + (1.0 - eb - h * h + eb * h * (h + 4.0 * r.nbar + 2.0)) / (8.0 * h * h * eb) * t_ba
}
