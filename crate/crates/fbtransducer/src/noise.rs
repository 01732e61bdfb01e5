//! Added-noise budget, the quantum transfer witness and loss-sweep traces.
//!
//! Variances use the vacuum = 1/2 convention. For a narrowband input pulse
//! the variance added to either output quadrature equals the noise spectrum
//! at the pulse frequency, so the budget is evaluated at a single detuning.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::forward::forward_gains;
use crate::params::{derive_effective, EffectiveCouplings, ReducedParams, CRITICAL_TOL};
use crate::quadrature::{self, InputTerm};
use crate::response::{ideal_transmission, matched_detuning};

/// Per-source added noise at one detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseBudget {
    /// Optical loss port.
    pub v_opt: f64,
    /// Thermal mechanical bath.
    pub v_mech: f64,
    /// Microwave vacuum (reflection and loss port).
    pub v_mw: f64,
    /// Vacuum admitted by inefficient homodyne detection.
    pub v_det: f64,
    pub v_total: f64,
    pub omega: f64,
    /// Transmission `T_ac` at `omega`.
    pub t_ac: f64,
}

impl NoiseBudget {
    /// Vacuum variance divided by the added noise.
    pub fn vacuum_ratio(&self) -> f64 {
        0.5 / self.v_total
    }
}

/// Noise budget at sideband detuning `omega`.
pub fn noise_budget(r: &ReducedParams, eff: &EffectiveCouplings, omega: f64) -> NoiseBudget {
    let t_inf = ideal_transmission(r, eff, omega);
    let em = r.eta_m;
    let hl = 2.0 * r.h_gain * eff.lambda_l;
    let v_opt = em * eff.eta_ol * (hl + 1.0 / hl) * t_inf / 4.0;
    let v_mech = em * eff.eta_b * (r.nbar + 0.5) * t_inf;
    let v_mw = (1.0 - em * t_inf) / 2.0;
    let det_weight = if r.eta_d < 1.0 {
        (1.0 - r.eta_d) / r.eta_d
    } else {
        0.0
    };
    let v_det =
        em * eff.eta_om / (2.0 * r.eta_l - 1.0).powi(2) * det_weight * r.h_gain / 4.0 * t_inf;
    NoiseBudget {
        v_opt,
        v_mech,
        v_mw,
        v_det,
        v_total: v_opt + v_mech + v_mw + v_det,
        omega,
        t_ac: em * eff.eta_om * t_inf,
    }
}

/// Added variance on either output quadrature, valid for input pulses that
/// are spectrally narrow compared with the transfer bandwidth.
pub fn added_variance(r: &ReducedParams, eff: &EffectiveCouplings, omega: f64) -> f64 {
    noise_budget(r, eff, omega).v_total
}

/// Noise budget at the matched detuning.
pub fn matched_budget(r: &ReducedParams) -> Result<NoiseBudget> {
    let eff = r.effective()?;
    Ok(noise_budget(r, &eff, matched_detuning(r, &eff)))
}

/// Output-noise quadrature spectra `(S_X, S_Y)` computed by expanding the
/// microwave output over raw input operators.
///
/// Independent of [`noise_budget`]; both must agree.
pub fn quadrature_noise(r: &ReducedParams, eff: &EffectiveCouplings, omega: f64) -> (f64, f64) {
    let gp = forward_gains(r, eff, omega);
    let gn = forward_gains(r, eff, -omega);
    let plain = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let (lp, lq) = quadrature::bogoliubov(2.0 * r.h_gain * eff.lambda_l);
    let (yp, yq) = quadrature::phase_quadrature();
    let terms = [
        InputTerm::through_gain(0, 1, 0.0, gp.t_alc, gn.t_alc, lp, lq),
        InputTerm::through_gain(1, 1, r.nbar, gp.t_bc, gn.t_bc, plain.0, plain.1),
        InputTerm::through_gain(2, 0, 0.0, gp.t_cc, gn.t_cc, plain.0, plain.1),
        InputTerm::through_gain(3, 0, 0.0, gp.t_clc, gn.t_clc, plain.0, plain.1),
        InputTerm::through_gain(4, 1, 0.0, gp.t_vc, gn.t_vc, yp, yq),
    ];
    (
        quadrature::spectrum_x(&terms),
        quadrature::spectrum_y(&terms),
    )
}

/// Witness value together with its lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessReport {
    pub w_t: f64,
    /// `|g_X g_Y − 1|²/(|g_X g_Y| + 1)²`, the forbidden-region boundary as it
    /// is usually quoted. It bounds `W_T²`.
    pub w_t_min: f64,
    /// `√w_t_min`, the tight lower bound on `W_T` itself.
    pub w_t_floor: f64,
    /// Lower bound `|1 − g_X g_Y|²/4` on the product of added variances.
    pub vq_floor: f64,
    pub g_x: f64,
    pub g_y: f64,
    pub v_x_add: f64,
    pub v_y_add: f64,
}

impl WitnessReport {
    /// Whether transfer beats every measure-and-prepare scheme.
    pub fn beats_classical(&self) -> bool {
        self.w_t < 1.0
    }
}

/// Quantum transfer witness for quadrature gains and added variances.
pub fn transfer_witness(g_x: f64, g_y: f64, v_x_add: f64, v_y_add: f64) -> WitnessReport {
    let gg = g_x * g_y;
    let denom = gg.abs() + 1.0;
    let w_t_min = (gg - 1.0).powi(2) / (denom * denom);
    WitnessReport {
        w_t: (4.0 * v_x_add * v_y_add).sqrt() / denom,
        w_t_min,
        w_t_floor: w_t_min.sqrt(),
        vq_floor: (1.0 - gg).powi(2) / 4.0,
        g_x,
        g_y,
        v_x_add,
        v_y_add,
    }
}

/// Witness for a quadrature-symmetric budget, with gain `√T_ac`.
pub fn budget_witness(b: &NoiseBudget) -> WitnessReport {
    let g = b.t_ac.sqrt();
    transfer_witness(g, g, b.v_total, b.v_total)
}

/// Efficiency swept by [`tv_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LossAxis {
    EtaL,
    EtaM,
    EtaD,
}

impl LossAxis {
    pub fn name(self) -> &'static str {
        match self {
            LossAxis::EtaL => "eta_l",
            LossAxis::EtaM => "eta_m",
            LossAxis::EtaD => "eta_d",
        }
    }

    pub fn apply(self, r: &ReducedParams, v: f64) -> ReducedParams {
        let mut out = *r;
        match self {
            LossAxis::EtaL => out.eta_l = v,
            LossAxis::EtaM => out.eta_m = v,
            LossAxis::EtaD => out.eta_d = v,
        }
        out
    }
}

impl std::str::FromStr for LossAxis {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "eta_l" | "etaL" => Ok(LossAxis::EtaL),
            "eta_m" | "etaM" => Ok(LossAxis::EtaM),
            "eta_d" | "etaD" => Ok(LossAxis::EtaD),
            _ => Err(format!("unknown loss axis `{s}`")),
        }
    }
}

/// One point of a transmission/added-noise trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvPoint {
    pub loss_value: f64,
    /// `None` where the parameters hit critical coupling.
    pub t_ac: Option<f64>,
    pub v_add: Option<f64>,
    pub w_t: Option<f64>,
    /// Marks the 10% increments of the swept efficiency.
    pub tick: bool,
}

/// Sweeps one efficiency over `[0, 1]` at matched transfer, holding the rest
/// of `base` fixed. The grid holds `samples` even points plus every 10% tick.
pub fn tv_trace(base: &ReducedParams, axis: LossAxis, samples: usize) -> Vec<TvPoint> {
    let mut xs: Vec<f64> = (0..samples.max(2))
        .map(|i| i as f64 / (samples.max(2) - 1) as f64)
        .collect();
    xs.extend((0..=10).map(|k| k as f64 / 10.0));
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    xs.into_iter()
        .map(|x| {
            let tick = ((x * 10.0).round() - x * 10.0).abs() < 1e-9;
            let r = axis.apply(base, x);
            match derive_effective(&r, CRITICAL_TOL) {
                Ok(eff) => {
                    let b = noise_budget(&r, &eff, matched_detuning(&r, &eff));
                    TvPoint {
                        loss_value: x,
                        t_ac: Some(b.t_ac),
                        v_add: Some(b.v_total),
                        w_t: Some(budget_witness(&b).w_t),
                        tick,
                    }
                }
                Err(ModelError::CriticalCoupling { .. }) => TvPoint {
                    loss_value: x,
                    t_ac: None,
                    v_add: None,
                    w_t: None,
                    tick,
                },
                Err(e) => panic!("sweep produced invalid parameters: {e}"),
            }
        })
        .collect()
}

/// Which figure of merit a threshold search tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Witness,
    AddedNoise,
}

/// Locates where `metric` crosses `level` as one efficiency varies in
/// `[lo, hi]`, by bisection. Returns `None` when the endpoints do not
/// bracket a crossing.
pub fn loss_threshold(
    base: &ReducedParams,
    axis: LossAxis,
    metric: Metric,
    level: f64,
    lo: f64,
    hi: f64,
) -> Result<Option<f64>> {
    let f = |x: f64| -> Result<f64> {
        let b = matched_budget(&axis.apply(base, x))?;
        Ok(match metric {
            Metric::Witness => budget_witness(&b).w_t,
            Metric::AddedNoise => b.v_total,
        } - level)
    };
    crate::bisect(f, lo, hi, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::reduced_preset;
    use approx::assert_relative_eq;

    #[test]
    fn gold_square_budget() {
        let b = matched_budget(&reduced_preset("gold_square").unwrap()).unwrap();
        assert!((b.t_ac - 0.882).abs() < 0.002);
        assert!((b.v_opt - 0.0633).abs() < 5e-4, "{}", b.v_opt);
        assert!((b.v_mech - 0.0232).abs() < 5e-4, "{}", b.v_mech);
        assert!((b.v_mw - 0.01).abs() < 1e-6, "{}", b.v_mw);
        assert!((b.v_det - 0.0480).abs() < 5e-4, "{}", b.v_det);
        assert!((b.vacuum_ratio() - 3.4).abs() < 0.17);
    }

    #[test]
    fn gold_star_budget() {
        let b = matched_budget(&reduced_preset("gold_star").unwrap()).unwrap();
        assert!((b.t_ac - 0.9408).abs() < 1e-3);
        assert!((b.v_total - 0.0478).abs() < 1e-3, "{}", b.v_total);
    }

    #[test]
    fn lossless_high_cooperativity_is_noiseless() {
        let r = ReducedParams::new(1e14, 1.0, 1.0, 1e3);
        let b = matched_budget(&r).unwrap();
        assert!(b.v_total < 1e-10, "{}", b.v_total);
    }

    #[test]
    fn no_microwave_coupling_reflects_vacuum() {
        let r = ReducedParams::new(100.0, 1.0, 1.0, 10.0).with_efficiencies(0.9, 0.0, 0.7);
        let b = matched_budget(&r).unwrap();
        assert_eq!(b.v_total, 0.5);
        assert_eq!(added_variance(&r, &r.effective().unwrap(), 0.0), 0.5);
    }

    #[test]
    fn budget_matches_quadrature_expansion() {
        let cases = [
            ReducedParams::new(1e4, 1.0, 1.0, 1e3).with_efficiencies(0.95, 0.98, 0.85),
            ReducedParams::new(30.0, 3.0, 0.4, 2.0)
                .with_efficiencies(0.7, 0.6, 0.5)
                .with_h_gain(2.5),
            ReducedParams::new(5.0, 0.7, 3.0, 0.0)
                .with_efficiencies(0.3, 0.9, 0.9)
                .with_h_gain(0.4),
        ];
        for r in cases {
            let e = r.effective().unwrap();
            for w in [0.3, 1.0, 7.0, 40.0] {
                let w = w * e.gamma_prime / 10.0;
                let b = noise_budget(&r, &e, w);
                let (sx, sy) = quadrature_noise(&r, &e, w);
                assert_relative_eq!(sx, sy, epsilon = 1e-12);
                assert_relative_eq!(sx, b.v_total, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn witness_examples() {
        let w = transfer_witness(1.0, 1.0, 0.5, 0.5);
        assert_relative_eq!(w.w_t, 0.5, epsilon = 1e-15);
        assert_eq!(w.w_t_min, 0.0);
        // Symmetric unit-transmission channel at the measure-and-prepare
        // boundary: added variance (T + 1)/2.
        let w = transfer_witness(1.0, 1.0, 1.0, 1.0);
        assert_relative_eq!(w.w_t, 1.0, epsilon = 1e-15);
        let w = transfer_witness(2.0, 0.5, 0.1, 0.2);
        assert_eq!(w.w_t_min, 0.0);
    }

    #[test]
    fn detection_thresholds() {
        let base = ReducedParams::new(1e7, 1.0, 1.0, 1e3);
        let w = loss_threshold(&base, LossAxis::EtaD, Metric::Witness, 1.0, 0.05, 0.9)
            .unwrap()
            .unwrap();
        assert!((w - 0.2).abs() < 1e-3, "{w}");
        let v = loss_threshold(&base, LossAxis::EtaD, Metric::AddedNoise, 0.5, 0.05, 0.9)
            .unwrap()
            .unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn trace_has_ticks_and_skips_critical_point() {
        let base = ReducedParams::new(1e4, 1.0, 1.0, 1e3);
        let t = tv_trace(&base, LossAxis::EtaL, 51);
        assert_eq!(t.iter().filter(|p| p.tick).count(), 11);
        let crit = t
            .iter()
            .find(|p| (p.loss_value - 0.5).abs() < 1e-12)
            .unwrap();
        assert!(crit.t_ac.is_none());
    }
}
