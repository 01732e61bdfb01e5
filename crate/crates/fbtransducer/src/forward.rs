//! Optical-to-microwave transfer gains with coupling losses.
//!
//! One implementation covers every feedback gain `h′`; `h′ = 1` is just a
//! parameter value.

use num_complex::Complex64;
use serde::Serialize;

use crate::params::{EffectiveCouplings, ReducedParams};
use crate::response::{ideal_gain, susceptibilities};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gains from each input channel into the microwave output at one detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferGains {
    /// Transferred optical signal mode.
    pub t_ac: Complex64,
    /// Optical loss port.
    pub t_alc: Complex64,
    /// Mechanical bath.
    pub t_bc: Complex64,
    /// Microwave input (reflection).
    pub t_cc: Complex64,
    /// Microwave loss port.
    pub t_clc: Complex64,
    /// Detection-vacuum phase quadrature.
    pub t_vc: Complex64,
}

impl TransferGains {
    pub fn transmissions(&self) -> [f64; 6] {
        [
            self.t_ac.norm_sqr(),
            self.t_alc.norm_sqr(),
            self.t_bc.norm_sqr(),
            self.t_cc.norm_sqr(),
            self.t_clc.norm_sqr(),
            self.t_vc.norm_sqr(),
        ]
    }
}

/// Labels for the undercoupled branch, attached to serialized outputs.
pub fn regime_label(eff: &EffectiveCouplings) -> &'static str {
    if eff.sigma > 0.0 {
        "beam-splitter regime"
    } else {
        "two-mode-squeezing regime"
    }
}

/// Forward gains at sideband detuning `omega`.
pub fn forward_gains(r: &ReducedParams, eff: &EffectiveCouplings, omega: f64) -> TransferGains {
    let t_inf = ideal_gain(r, eff, omega);
    let chi = susceptibilities(eff, omega);
    let em = r.eta_m;
    let kc = eff.kappa_m * chi.chi_c_em;
    let two_eta = 2.0 * r.eta_l - 1.0;
    let vc_weight = if r.eta_d < 1.0 {
        eff.sigma * eff.eps * (r.h_gain / 2.0).sqrt() / two_eta
    } else {
        0.0
    };
    TransferGains {
        t_ac: (em * eff.eta_om).sqrt() * t_inf,
        t_alc: (em * eff.eta_ol).sqrt() * t_inf,
        t_bc: I * (em * eff.eta_b).sqrt() * t_inf,
        t_cc: 1.0 - em * kc,
        t_clc: -(em * (1.0 - em)).sqrt() * kc,
        t_vc: -I * (em * eff.eta_om).sqrt() * vc_weight * t_inf,
    }
}

/// `σT_ac + T_alc + T_bc + T_cc + T_clc − 1`. The detection-vacuum channel is
/// classical noise and does not enter the commutator.
pub fn sum_rule_residual(g: &TransferGains, sigma: f64) -> f64 {
    sigma * g.t_ac.norm_sqr()
        + g.t_alc.norm_sqr()
        + g.t_bc.norm_sqr()
        + g.t_cc.norm_sqr()
        + g.t_clc.norm_sqr()
        - 1.0
}

/// Transmission reached as both cooperativities grow without bound:
/// `η_M|2η_L − 1|`, and 0 at `η_L = 0`.
pub fn max_transmission(r: &ReducedParams) -> f64 {
    if r.eta_l == 0.0 {
        return 0.0;
    }
    r.eta_m * (2.0 * r.eta_l - 1.0).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::reduced_preset;
    use crate::response::matched_detuning;
    use approx::assert_relative_eq;

    fn eval(r: ReducedParams, w: f64) -> (TransferGains, EffectiveCouplings) {
        let e = r.effective().unwrap();
        (forward_gains(&r, &e, w), e)
    }

    #[test]
    fn perfect_detection_has_no_vacuum_channel() {
        let r = ReducedParams::new(10.0, 1.0, 1.0, 5.0).with_efficiencies(0.9, 0.9, 1.0);
        assert_eq!(eval(r, 0.4).0.t_vc, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn lossless_cavities() {
        let r = ReducedParams::new(10.0, 2.0, 0.5, 5.0);
        for w in [-30.0, -1.0, 0.0, 2.5, 40.0] {
            let (g, _) = eval(r, w);
            assert_eq!(g.t_alc.norm(), 0.0);
            assert_eq!(g.t_clc.norm(), 0.0);
            let s = g.t_ac.norm_sqr() + g.t_bc.norm_sqr() + g.t_cc.norm_sqr();
            assert_relative_eq!(s, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn gold_square_transmission() {
        let r = reduced_preset("gold_square").unwrap();
        let e = r.effective().unwrap();
        let g = forward_gains(&r, &e, matched_detuning(&r, &e));
        assert!(
            (g.t_ac.norm_sqr() - 0.88).abs() < 0.005,
            "{}",
            g.t_ac.norm_sqr()
        );
    }

    #[test]
    fn undercoupled_sum_rule() {
        let r = ReducedParams::new(7.0, 3.0, 2.0, 1.0).with_efficiencies(0.3, 0.8, 0.6);
        for w in [-20.0, -3.0, 0.0, 1.0, 15.0] {
            let (g, e) = eval(r, w);
            assert_eq!(e.sigma, -1.0);
            assert!(sum_rule_residual(&g, e.sigma).abs() < 1e-12);
        }
        assert_eq!(
            regime_label(&r.effective().unwrap()),
            "two-mode-squeezing regime"
        );
    }

    #[test]
    fn reflective_without_pump() {
        let r = ReducedParams::new(7.0, 0.0, 2.0, 1.0);
        let (g, e) = eval(r, 0.0);
        assert_relative_eq!(g.t_cc.norm_sqr(), 1.0, epsilon = 1e-15);
        assert_eq!(g.t_ac.norm(), 0.0);
        assert!(sum_rule_residual(&g, e.sigma).abs() < 1e-15);
    }

    #[test]
    fn unit_gain_detection_vacuum_form() {
        // At h′ = 1 the vacuum gain reduces to −i√(η_Mη_OM/2)(λ_Lε/η_L)t∞.
        let r = ReducedParams::new(50.0, 1.0, 1.0, 5.0).with_efficiencies(0.93, 0.9, 0.7);
        let (g, e) = eval(r, 1.3);
        let t_inf = ideal_gain(&r, &e, 1.3);
        let expect =
            -I * (r.eta_m * e.eta_om / 2.0).sqrt() * (e.lambda_l * e.eps / r.eta_l) * t_inf;
        assert!((g.t_vc - expect).norm() < 1e-14);
    }

    #[test]
    fn max_transmission_values() {
        let r = ReducedParams::new(1.0, 1.0, 1.0, 0.0);
        assert_relative_eq!(
            max_transmission(&r.with_efficiencies(0.95, 0.98, 1.0)),
            0.882,
            epsilon = 1e-12
        );
        assert_eq!(max_transmission(&r.with_efficiencies(0.5, 1.0, 1.0)), 0.0);
        assert_relative_eq!(
            max_transmission(&r.with_efficiencies(1e-9, 1.0, 1.0)),
            1.0,
            epsilon = 1e-8
        );
        assert_eq!(max_transmission(&r.with_efficiencies(0.0, 1.0, 1.0)), 0.0);
    }

    #[test]
    fn approaches_max_transmission() {
        let r = ReducedParams::new(1e9, 1.0, 1.0, 0.0).with_efficiencies(0.8, 0.9, 1.0);
        let (g, _) = eval(r, 0.0);
        assert_relative_eq!(g.t_ac.norm_sqr(), max_transmission(&r), max_relative = 1e-8);
    }
}
