//! Microwave-to-optical transfer through an all-optical coherent feedback
//! loop.
//!
//! The loop fixes the optomechanical ratio of the second pass to the first at
//! `s = h/η_d`. Only the unsqueezed setting `s = 1` is public, so the
//! mechanical response is evaluated with feedback ratio `h = η_d`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{ModelError, Result};
use crate::homodyne::{light_gains, LightGains};
use crate::params::{EffectiveCouplings, ReducedParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Prefactors of each input in the optical output at `ω + Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReverseCoefficients {
    pub x_in: Complex64,
    pub y_in: Complex64,
    pub x_v: Complex64,
    pub y_v: Complex64,
    pub b_in: Complex64,
    pub c_in: Complex64,
}

impl ReverseCoefficients {
    /// Coefficients on `a(ω)` and `a(−ω)†` of the optical input implied by
    /// its two quadrature prefactors.
    pub fn optical_mode(&self) -> (Complex64, Complex64) {
        quad_to_mode(self.x_in, self.y_in)
    }

    /// Same for the loop-loss vacuum.
    pub fn vacuum_mode(&self) -> (Complex64, Complex64) {
        quad_to_mode(self.x_v, self.y_v)
    }
}

fn quad_to_mode(x: Complex64, y: Complex64) -> (Complex64, Complex64) {
    ((x - I * y) * FRAC_1_SQRT_2, (x + I * y) * FRAC_1_SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReverseChannel {
    pub s_ratio: f64,
    pub omega: f64,
    pub coefficients: ReverseCoefficients,
    pub gains: LightGains,
    pub noise: f64,
}

impl ReverseChannel {
    /// `|t_aa|² + |t_ba|² + |t_ca|² − 1`.
    pub fn normalization_residual(&self) -> f64 {
        self.gains.sum() - 1.0
    }
}

/// Forward and reverse squeezing ratios of a loop whose passes have
/// cooperativities `c1`, `c2`.
pub fn loop_ratios(c1: f64, c2: f64, eta_d: f64) -> (f64, f64) {
    ((eta_d * c2 / c1).sqrt(), (c2 / (eta_d * c1)).sqrt())
}

/// Parameters and couplings seen by the mechanics for reverse ratio `s`.
pub fn loop_params(r: &ReducedParams, s: f64) -> Result<(ReducedParams, EffectiveCouplings)> {
    if (r.eta_l - 1.0).abs() > 1e-12 || (r.eta_m - 1.0).abs() > 1e-12 {
        return Err(ModelError::OutOfScope(
            "coherent feedback is modelled with unit cavity couplings",
        ));
    }
    let rl = r.with_h_gain(s * r.eta_d);
    let eff = rl.effective()?;
    Ok((rl, eff))
}

fn loop_phase(eff: &EffectiveCouplings, omega: f64) -> Complex64 {
    Complex64::from_polar(1.0, (omega + eff.omega) * eff.tau)
}

fn coefficients_at(
    r: &ReducedParams,
    eff: &EffectiveCouplings,
    omega: f64,
) -> (ReverseCoefficients, LightGains) {
    let g = light_gains(r, eff, omega);
    let ph = loop_phase(eff, omega);
    let ed = r.eta_d;
    let k = FRAC_1_SQRT_2;
    let t = g.t_aa;
    let c = ReverseCoefficients {
        x_in: ph * ed.sqrt() * (ed - 1.0 + t) / ed * k,
        y_in: ph * ed.sqrt() * I * t * k,
        x_v: -ph * (1.0 - ed).sqrt() * k,
        y_v: -ph * (1.0 - ed).sqrt() * I * t * k,
        b_in: g.t_ba,
        c_in: -I * g.t_ca,
    };
    (c, g)
}

/// Noise shared by both transfer directions: a direct reflection, the
/// mechanical bath, and the loop loss acting through the mechanics.
pub fn three_channel_noise(
    t_direct: f64,
    t_mech: f64,
    nbar: f64,
    eta_d: f64,
    eta_om: f64,
    eta_b: f64,
) -> f64 {
    0.5 * t_direct + (nbar + 0.5) * t_mech + (1.0 - eta_d) / (4.0 * eta_d) * eta_om / eta_b * t_mech
}

/// Output decomposition at sideband detuning `omega`, for `s = 1`.
pub fn reverse_channel(r: &ReducedParams, omega: f64) -> Result<ReverseChannel> {
    let (rl, eff) = loop_params(r, 1.0)?;
    let (coefficients, gains) = coefficients_at(&rl, &eff, omega);
    let noise = three_channel_noise(
        gains.t_aa.norm_sqr(),
        gains.t_ba.norm_sqr(),
        rl.nbar,
        rl.eta_d,
        eff.eta_om,
        eff.eta_b,
    );
    Ok(ReverseChannel {
        s_ratio: 1.0,
        omega,
        coefficients,
        gains,
        noise,
    })
}

/// Quadrature-symmetric added noise of the microwave-to-optical channel.
pub fn reverse_added_noise(r: &ReducedParams, omega: f64) -> Result<f64> {
    Ok(reverse_channel(r, omega)?.noise)
}

/// Forward added noise written in the same three-channel form, after
/// exchanging the optical and microwave roles. Valid for unit cavity couplings
/// and unit feedback gain.
pub fn forward_symmetric_noise(r: &ReducedParams, omega: f64) -> Result<f64> {
    if (r.eta_l - 1.0).abs() > 1e-12 || (r.eta_m - 1.0).abs() > 1e-12 {
        return Err(ModelError::OutOfScope(
            "the symmetric form assumes unit cavity couplings",
        ));
    }
    let eff = r.effective()?;
    let g = crate::forward::forward_gains(r, &eff, omega);
    Ok(three_channel_noise(
        g.t_cc.norm_sqr(),
        g.t_bc.norm_sqr(),
        r.nbar,
        r.eta_d,
        eff.eta_om,
        eff.eta_b,
    ))
}

/// Noise carried into the output mode by the optical input, the loop
/// vacuum and the mechanical bath, each as `Σ (n̄ + 1/2)|coefficient|²` over
/// its raw operators. Their sum is the closed-form added noise.
pub fn per_input_noise(ch: &ReverseChannel, nbar: f64) -> [f64; 3] {
    let (a, ad) = ch.coefficients.optical_mode();
    let (v, vd) = ch.coefficients.vacuum_mode();
    [
        0.5 * (a.norm_sqr() + ad.norm_sqr()),
        0.5 * (v.norm_sqr() + vd.norm_sqr()),
        (nbar + 0.5) * ch.coefficients.b_in.norm_sqr(),
    ]
}

/// Output mode prefactors for general reverse ratio `s`, on the raw input
/// operators `a(ω), a(−ω)†` of the optical input and the loop vacuum, plus
/// the mechanical and microwave gains.
#[cfg(test)]
fn general_s_modes(r: &ReducedParams, s: f64, omega: f64) -> Result<[(Complex64, Complex64); 4]> {
    let (rl, eff) = loop_params(r, s)?;
    let g = light_gains(&rl, &eff, omega);
    let ph = loop_phase(&eff, omega);
    let ed = r.eta_d;
    let t = g.t_aa;
    let k = FRAC_1_SQRT_2;
    let x_in = ph * ed.sqrt() * (ed - 1.0 + t) / (ed * s.sqrt()) * k;
    let y_in = ph * ed.sqrt() * I * s.sqrt() * t * k;
    let x_v = -ph * (1.0 - ed).sqrt() / s.sqrt() * k;
    let y_v = -ph * (1.0 - ed).sqrt() * I * s.sqrt() * t * k;
    let zero = Complex64::new(0.0, 0.0);
    Ok([
        quad_to_mode(x_in, y_in),
        quad_to_mode(x_v, y_v),
        (g.t_ba, zero),
        (-I * g.t_ca, zero),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::noise_budget;
    use crate::quadrature::{spectrum_x, spectrum_y, InputTerm};
    use crate::spectrum::symmetric_grid;
    use approx::assert_relative_eq;

    fn matched(cl: f64, eta_d: f64, nbar: f64) -> ReducedParams {
        ReducedParams::new(cl, 1.0, 1.0, nbar).with_efficiencies(1.0, 1.0, eta_d)
    }

    #[test]
    fn normalized_for_all_detection_efficiencies() {
        for ed in [0.2, 0.5, 0.85, 1.0] {
            let r = matched(300.0, ed, 10.0);
            let (_, e) = loop_params(&r, 1.0).unwrap();
            for w in symmetric_grid(6.0 * e.gamma_prime, 201) {
                let ch = reverse_channel(&r, w).unwrap();
                assert!(ch.normalization_residual().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn general_ratio_commutator() {
        for s in [0.4, 1.0, 2.5] {
            for ed in [0.3, 0.85, 1.0] {
                let r = matched(50.0, ed, 1.0);
                for w in [-30.0, -1.0, 0.0, 4.0, 90.0] {
                    let m = general_s_modes(&r, s, w).unwrap();
                    let c: f64 = m.iter().map(|(p, q)| p.norm_sqr() - q.norm_sqr()).sum();
                    assert!((c - 1.0).abs() < 1e-12, "s={s} ed={ed} w={w}: {c}");
                }
            }
        }
    }

    #[test]
    fn lower_sideband_reflects() {
        let r = matched(500.0, 0.85, 100.0);
        let (_, e) = loop_params(&r, 1.0).unwrap();
        let w = -2.0 * e.omega;
        let ch = reverse_channel(&r, w).unwrap();
        let ph = loop_phase(&e, w);
        let (a, a_dag) = ch.coefficients.optical_mode();
        let (v, v_dag) = ch.coefficients.vacuum_mode();
        assert!((a - ph * 0.85f64.sqrt()).norm() < 1e-3);
        assert!((v + ph * 0.15f64.sqrt()).norm() < 1e-3);
        assert!(a_dag.norm() < 1e-3 && v_dag.norm() < 1e-3);
        assert!(ch.coefficients.b_in.norm() < 1e-3 && ch.coefficients.c_in.norm() < 1e-3);
    }

    #[test]
    fn quarter_cycle_delay() {
        let r = matched(500.0, 0.85, 100.0);
        let (_, e) = loop_params(&r, 1.0).unwrap();
        assert_relative_eq!(e.tau, std::f64::consts::PI / (2.0 * e.omega));
        let ph = loop_phase(&e, 0.0);
        assert!((ph - I).norm() < 1e-12);
    }

    #[test]
    fn lossless_strong_limit_is_clean() {
        let r = matched(1e9, 1.0, 100.0);
        let ch = reverse_channel(&r, 0.0).unwrap();
        assert!((ch.coefficients.c_in.norm() - 1.0).abs() < 1e-6);
        assert!(ch.noise < 1e-6);
    }

    #[test]
    fn loss_limit() {
        let r = matched(1e5, 0.85, 100.0);
        let n = reverse_added_noise(&r, 0.0).unwrap();
        let limit: f64 = (1.0 / 0.85 - 1.0) / 4.0;
        assert!((limit - 0.0441).abs() < 1e-4);
        assert!((n - limit).abs() < 1e-3, "{n}");
    }

    #[test]
    fn ratios_differ_by_detection_efficiency() {
        for (c1, c2, ed) in [(1.0, 1.0, 0.85), (2e3, 5e3, 0.4)] {
            let (h, s) = loop_ratios(c1, c2, ed);
            assert_relative_eq!(h / s, ed, max_relative = 1e-14);
        }
    }

    /// Printed per-input quadrature split, used only through its X/Y mean:
    /// the split itself goes negative, the mean is the per-input mode noise.
    fn printed_split(t: Complex64, e: f64) -> [(f64, f64); 2] {
        let (t2, re) = (t.norm_sqr(), t.re);
        let f = (1.0 - e) / (4.0 * e);
        let a = (1.0 + e * e) / (4.0 * e) * t2;
        let v = (1.0 - e) / 4.0;
        [
            (
                a + f * (1.0 - 2.0 * e + (e - 2.0) * re),
                a + f * (1.0 - (e + 2.0) * re),
            ),
            (v * (2.0 + t2 + re), v * (t2 - re)),
        ]
    }

    #[test]
    fn per_input_noise_matches_closed_form_and_printed_means() {
        for ed in [0.2, 0.6, 0.85] {
            let r = matched(80.0, ed, 20.0);
            let (_, e) = loop_params(&r, 1.0).unwrap();
            for w in symmetric_grid(5.0 * e.gamma_prime, 81) {
                let ch = reverse_channel(&r, w).unwrap();
                let parts = per_input_noise(&ch, r.nbar);
                assert!((parts.iter().sum::<f64>() - ch.noise).abs() < 1e-12);
                let printed = printed_split(ch.gains.t_aa, ed);
                for k in 0..2 {
                    let mean = 0.5 * (printed[k].0 + printed[k].1);
                    assert!((mean - parts[k]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn demodulated_quadratures_are_symmetric() {
        // Quadratures of the sideband operator pair the output at Ω + ω with
        // the one at Ω − ω; each contributes its own mode noise.
        for ed in [0.3, 0.85] {
            let r = matched(40.0, ed, 5.0);
            let (rl, e) = loop_params(&r, 1.0).unwrap();
            for w in symmetric_grid(4.0 * e.gamma_prime, 41) {
                let zero = Complex64::new(0.0, 0.0);
                let (cp, gp) = coefficients_at(&rl, &e, w);
                let (cn, gn) = coefficients_at(&rl, &e, -w);
                let term = |id, p, n, occupancy| InputTerm {
                    id,
                    shift: 1,
                    occupancy,
                    pos: p,
                    neg: n,
                };
                let terms = [
                    term(0, cp.optical_mode(), cn.optical_mode(), 0.0),
                    term(1, cp.vacuum_mode(), cn.vacuum_mode(), 0.0),
                    term(2, (gp.t_ba, zero), (gn.t_ba, zero), r.nbar),
                ];
                let expect = 0.5
                    * (reverse_added_noise(&r, w).unwrap() + reverse_added_noise(&r, -w).unwrap());
                assert!((spectrum_x(&terms) - expect).abs() < 1e-12);
                assert!((spectrum_y(&terms) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn forward_reverse_symmetry() {
        for ed in [0.4, 0.85, 1.0] {
            for cl in [3.0, 80.0, 1e4] {
                let r = matched(cl, ed, 30.0);
                let eff = r.effective().unwrap();
                for w in symmetric_grid(5.0 * eff.gamma_prime, 61) {
                    let b = noise_budget(&r, &eff, w);
                    let s = forward_symmetric_noise(&r, w).unwrap();
                    assert!((b.v_total - s).abs() < 1e-10, "{} {}", b.v_total, s);
                }
            }
        }
    }

    #[test]
    fn lossy_couplings_out_of_scope() {
        let r = matched(10.0, 0.9, 1.0).with_efficiencies(0.95, 1.0, 0.9);
        assert!(matches!(
            reverse_channel(&r, 0.0),
            Err(ModelError::OutOfScope(_))
        ));
    }
}
