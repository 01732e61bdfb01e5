//! Parameter records, unit conventions and the feedback-dressed effective
//! couplings.
//!
//! All rates are angular frequencies. [`ReducedParams`] is the canonical
//! internal form: every rate it implies is expressed in units of the bare
//! mechanical linewidth `Γ`, so `Γ = 1` throughout the reduced model.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{ModelError, Result};

/// Default half-width of the excluded band around critical coupling `η_L = 1/2`.
pub const CRITICAL_TOL: f64 = 1e-9;

/// Quality factor below which the high-Q approximations are flagged.
pub const Q_WARN: f64 = 10.0;

/// Bare mechanical quality factor used by the named presets.
pub const PRESET_QUALITY: f64 = 1e7;

/// Mechanical frequency of the named presets, 1 MHz.
pub const PRESET_OMEGA: f64 = 2.0 * PI * 1e6;

/// Dimensional parameters of the transducer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Mechanical angular frequency (rad/s).
    pub omega: f64,
    /// Bare mechanical energy decay rate (rad/s).
    pub gamma: f64,
    pub kappa_l: f64,
    pub kappa_m: f64,
    /// Pump-enhanced optomechanical coupling (rad/s).
    pub g_l: f64,
    /// Pump-enhanced electromechanical coupling (rad/s).
    pub g_m: f64,
    pub nbar: f64,
    pub eta_l: f64,
    pub eta_m: f64,
    pub eta_d: f64,
    /// Feedback gain relative to the symmetrizing gain.
    pub h_gain: f64,
}

/// Dimensionless parameters; the form every model formula consumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    /// Optomechanical cooperativity.
    pub cl: f64,
    /// Electromechanical cooperativity dressed by the broadened linewidth.
    pub cmp: f64,
    /// Linewidth ratio `Γ′/κ_M`.
    pub beta: f64,
    pub eta_l: f64,
    pub eta_m: f64,
    pub eta_d: f64,
    pub nbar: f64,
    pub h_gain: f64,
    /// Bare mechanical quality factor `Ω/Γ`. Only the feedback delay, the
    /// lab-frame conversion and the regime warnings depend on it.
    #[serde(default = "default_quality")]
    pub quality: f64,
}

fn default_quality() -> f64 {
    PRESET_QUALITY
}

/// Quantities derived from the parameters once feedback is applied.
///
/// Rates are in units of `Γ` when derived from [`ReducedParams`] and in rad/s
/// when derived from [`PhysicalParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCouplings {
    /// `η_L/|2η_L − 1|`.
    pub lambda_l: f64,
    /// +1 for an overcoupled optical cavity, -1 for undercoupled.
    pub sigma: f64,
    /// Feedback gain that transfers both optical quadratures equally.
    pub g_sym: f64,
    /// Feedback-broadened mechanical linewidth.
    pub gamma_prime: f64,
    pub eta_b: f64,
    pub eta_om: f64,
    pub eta_ol: f64,
    /// `√((1 − η_d)/η_d)`, the detection-vacuum weight.
    pub eps: f64,
    /// Quarter-cycle feedback delay `π/(2Ω)`.
    pub tau: f64,
    /// Quality factor after broadening, `Ω/Γ′`.
    pub q_prime: f64,
    /// Microwave linewidth `Γ′/β`.
    pub kappa_m: f64,
    /// Electromechanical coupling implied by `C_M′`.
    pub g_m: f64,
    /// Mechanical frequency in the same units as the rates.
    pub omega: f64,
}

/// Regime violations that leave the formulas evaluable but less trustworthy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Warning {
    LowQuality { q: f64 },
    LowBroadenedQuality { q_prime: f64 },
    MicrowaveUnresolved { kappa_m_over_omega: f64 },
    StrongElectromechanical { two_g_m_over_omega: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::LowQuality { q } => write!(f, "mechanical Q = {q:.3} below {Q_WARN}"),
            Warning::LowBroadenedQuality { q_prime } => {
                write!(f, "broadened Q' = {q_prime:.3} below {Q_WARN}")
            }
            Warning::MicrowaveUnresolved { kappa_m_over_omega } => write!(
                f,
                "microwave cavity not sideband resolved (kappa_M/Omega = {kappa_m_over_omega:.3})"
            ),
            Warning::StrongElectromechanical { two_g_m_over_omega } => write!(
                f,
                "electromechanical splitting comparable to Omega (2 g_M/Omega = {two_g_m_over_omega:.3})"
            ),
        }
    }
}

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(ModelError::InvalidParameter {
            name,
            value: v,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(ModelError::InvalidParameter {
            name,
            value: v,
            reason: "must be positive and finite",
        });
    }
    Ok(())
}

fn check_nonneg(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(ModelError::InvalidParameter {
            name,
            value: v,
            reason: "must be non-negative and finite",
        });
    }
    Ok(())
}

impl ReducedParams {
    /// Reduced parameters with unit efficiencies, unit feedback gain and the
    /// preset quality factor.
    pub fn new(cl: f64, cmp: f64, beta: f64, nbar: f64) -> Self {
        Self {
            cl,
            cmp,
            beta,
            eta_l: 1.0,
            eta_m: 1.0,
            eta_d: 1.0,
            nbar,
            h_gain: 1.0,
            quality: PRESET_QUALITY,
        }
    }

    pub fn with_efficiencies(mut self, eta_l: f64, eta_m: f64, eta_d: f64) -> Self {
        self.eta_l = eta_l;
        self.eta_m = eta_m;
        self.eta_d = eta_d;
        self
    }

    pub fn with_h_gain(mut self, h: f64) -> Self {
        self.h_gain = h;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("cl", self.cl)?;
        check_nonneg("cmp", self.cmp)?;
        check_positive("beta", self.beta)?;
        check_unit("eta_l", self.eta_l)?;
        check_unit("eta_m", self.eta_m)?;
        check_unit("eta_d", self.eta_d)?;
        check_nonneg("nbar", self.nbar)?;
        check_positive("h_gain", self.h_gain)?;
        check_positive("quality", self.quality)?;
        Ok(())
    }

    /// Effective couplings with the default critical-coupling tolerance.
    pub fn effective(&self) -> Result<EffectiveCouplings> {
        derive_effective(self, CRITICAL_TOL)
    }

    /// Regime warnings for these parameters.
    pub fn warnings(&self) -> Result<Vec<Warning>> {
        let eff = self.effective()?;
        let mut out = Vec::new();
        if self.quality < Q_WARN {
            out.push(Warning::LowQuality { q: self.quality });
        }
        if eff.q_prime < Q_WARN {
            out.push(Warning::LowBroadenedQuality {
                q_prime: eff.q_prime,
            });
        }
        if eff.kappa_m >= eff.omega {
            out.push(Warning::MicrowaveUnresolved {
                kappa_m_over_omega: eff.kappa_m / eff.omega,
            });
        }
        if 2.0 * eff.g_m >= eff.omega {
            out.push(Warning::StrongElectromechanical {
                two_g_m_over_omega: 2.0 * eff.g_m / eff.omega,
            });
        }
        Ok(out)
    }
}

/// Broadening factor `Γ′/Γ = 1 + 4h′λ_L C_L`.
fn broadening(r: &ReducedParams, lambda_l: f64) -> f64 {
    1.0 + 4.0 * r.h_gain * lambda_l * r.cl
}

/// Derives the feedback-dressed couplings, in units of `Γ`.
///
/// Fails with [`ModelError::CriticalCoupling`] when `|η_L − 1/2| < tol`.
pub fn derive_effective(r: &ReducedParams, tol: f64) -> Result<EffectiveCouplings> {
    r.validate()?;
    let detune = 2.0 * r.eta_l - 1.0;
    if detune.abs() < 2.0 * tol {
        return Err(ModelError::CriticalCoupling {
            eta_l: r.eta_l,
            tol,
        });
    }
    let lambda_l = r.eta_l / detune.abs();
    let sigma = if r.eta_l > 0.5 { 1.0 } else { -1.0 };
    let d = broadening(r, lambda_l);
    let four_hc = 4.0 * r.h_gain * r.cl;
    let gamma_prime = d;
    let kappa_m = gamma_prime / r.beta;
    let eps = if r.eta_d > 0.0 {
        ((1.0 - r.eta_d) / r.eta_d).sqrt()
    } else {
        f64::INFINITY
    };
    let omega = r.quality;
    Ok(EffectiveCouplings {
        lambda_l,
        sigma,
        g_sym: 8.0 * r.cl * r.eta_l.sqrt() / detune.abs(),
        gamma_prime,
        eta_b: 1.0 / d,
        eta_om: four_hc * r.eta_l / d,
        eta_ol: four_hc * (lambda_l - sigma * r.eta_l) / d,
        eps,
        tau: PI / (2.0 * omega),
        q_prime: omega / gamma_prime,
        kappa_m,
        g_m: (r.cmp * gamma_prime * kappa_m / 4.0).sqrt(),
        omega,
    })
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("omega", self.omega)?;
        check_positive("gamma", self.gamma)?;
        check_positive("kappa_l", self.kappa_l)?;
        check_positive("kappa_m", self.kappa_m)?;
        check_nonneg("g_l", self.g_l)?;
        check_nonneg("g_m", self.g_m)?;
        check_nonneg("nbar", self.nbar)?;
        check_unit("eta_l", self.eta_l)?;
        check_unit("eta_m", self.eta_m)?;
        check_unit("eta_d", self.eta_d)?;
        check_positive("h_gain", self.h_gain)?;
        Ok(())
    }

    /// Effective couplings with rates in rad/s.
    pub fn effective(&self) -> Result<EffectiveCouplings> {
        let r = to_reduced(self)?;
        let e = r.effective()?;
        let s = self.gamma;
        Ok(EffectiveCouplings {
            gamma_prime: e.gamma_prime * s,
            tau: e.tau / s,
            kappa_m: e.kappa_m * s,
            g_m: e.g_m * s,
            omega: e.omega * s,
            g_sym: e.g_sym,
            ..e
        })
    }
}

/// Converts physical parameters to the reduced form.
pub fn to_reduced(p: &PhysicalParams) -> Result<ReducedParams> {
    p.validate()?;
    let cl = 4.0 * p.g_l * p.g_l / (p.gamma * p.kappa_l);
    let detune = (2.0 * p.eta_l - 1.0).abs();
    if detune < 2.0 * CRITICAL_TOL {
        return Err(ModelError::CriticalCoupling {
            eta_l: p.eta_l,
            tol: CRITICAL_TOL,
        });
    }
    let lambda_l = p.eta_l / detune;
    let gamma_prime = p.gamma * (1.0 + 4.0 * p.h_gain * lambda_l * cl);
    Ok(ReducedParams {
        cl,
        cmp: 4.0 * p.g_m * p.g_m / (gamma_prime * p.kappa_m),
        beta: gamma_prime / p.kappa_m,
        eta_l: p.eta_l,
        eta_m: p.eta_m,
        eta_d: p.eta_d,
        nbar: p.nbar,
        h_gain: p.h_gain,
        quality: p.omega / p.gamma,
    })
}

/// Rebuilds physical parameters from reduced ones given the mechanical
/// frequency and the optical linewidth, which the reduced form does not fix.
pub fn to_physical(r: &ReducedParams, omega: f64, kappa_l: f64) -> Result<PhysicalParams> {
    let eff = r.effective()?;
    check_positive("omega", omega)?;
    check_positive("kappa_l", kappa_l)?;
    let gamma = omega / r.quality;
    Ok(PhysicalParams {
        omega,
        gamma,
        kappa_l,
        kappa_m: eff.kappa_m * gamma,
        g_l: (r.cl * gamma * kappa_l / 4.0).sqrt(),
        g_m: eff.g_m * gamma,
        nbar: r.nbar,
        eta_l: r.eta_l,
        eta_m: r.eta_m,
        eta_d: r.eta_d,
        h_gain: r.h_gain,
    })
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 4] = ["gold_square", "gold_star", "fig6", "fig2_grid"];

/// Optical linewidth used to give the presets a physical form. The reduced
/// model never depends on it.
const PRESET_KAPPA_L: f64 = 2.0 * PI * 10e6;

/// Named parameter sets in reduced form.
///
/// `fig2_grid` resolves to its centre panel; the full grid is
/// [`transmission_grid`].
pub fn reduced_preset(name: &str) -> Result<ReducedParams> {
    let base = |cl, nbar| ReducedParams::new(cl, 1.0, 1.0, nbar);
    match name {
        "gold_square" => Ok(base(1e4, 1e3).with_efficiencies(0.95, 0.98, 0.85)),
        "gold_star" => Ok(base(1e5, 1e3).with_efficiencies(0.98, 0.98, 0.96)),
        "fig6" => Ok(base(500.0, 100.0)),
        "fig2_grid" => Ok(base(1e4, 1e3)),
        other => Err(ModelError::UnknownPreset(other.to_string())),
    }
}

/// Named parameter sets in physical form, with a 1 MHz resonator of quality
/// factor 1e7.
pub fn preset(name: &str) -> Result<PhysicalParams> {
    let r = reduced_preset(name)?;
    to_physical(&r, PRESET_OMEGA, PRESET_KAPPA_L)
}

/// The nine `(β, C_M′)` panels of the transmission figure, row-major in β.
pub fn transmission_grid() -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(9);
    for beta in [0.1, 1.0, 10.0] {
        for cmp in [0.5, 1.0, 10.0] {
            out.push((beta, cmp));
        }
    }
    out
}
