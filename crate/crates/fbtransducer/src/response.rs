//! Susceptibilities and the ideal (infinite optomechanical cooperativity)
//! transfer gain.
//!
//! Frequencies are detunings `ω` from the upper mechanical sideband, so the
//! mechanical susceptibility is always evaluated at `ω + Ω` and `Ω` never
//! enters the arithmetic.

use num_complex::Complex64;
use serde::Serialize;

use crate::params::{EffectiveCouplings, ReducedParams};
use crate::spectrum::{symmetric_grid, SpectrumSeries};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance on `C_M′ − 1` and `β − 1` when deciding which detunings are
/// matched.
pub const MATCH_TOL: f64 = 1e-9;

/// Susceptibilities at one sideband detuning `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Susceptibilities {
    /// Bare mechanical susceptibility at `ω + Ω`.
    pub chi_b: Complex64,
    /// Bare microwave susceptibility at `ω`.
    pub chi_c: Complex64,
    /// Mechanical susceptibility at `ω + Ω` dressed by the microwave cavity.
    pub chi_b_em: Complex64,
    /// Microwave susceptibility at `ω` dressed by the resonator.
    pub chi_c_em: Complex64,
    /// Cross susceptibility linking the two modes.
    pub chi_cross: Complex64,
}

/// Evaluates all susceptibilities at sideband detuning `omega`.
pub fn susceptibilities(eff: &EffectiveCouplings, omega: f64) -> Susceptibilities {
    let chi_b = 1.0 / (eff.gamma_prime / 2.0 - I * omega);
    let chi_c = 1.0 / (eff.kappa_m / 2.0 - I * omega);
    let g2 = eff.g_m * eff.g_m;
    let dressing = 1.0 + g2 * chi_b * chi_c;
    let chi_c_em = chi_c / dressing;
    Susceptibilities {
        chi_b,
        chi_c,
        chi_b_em: chi_b / dressing,
        chi_c_em,
        chi_cross: eff.g_m * chi_b * chi_c_em,
    }
}

/// Ideal transfer gain `t∞(ω)` in closed form.
pub fn ideal_gain(r: &ReducedParams, eff: &EffectiveCouplings, omega: f64) -> Complex64 {
    if r.cmp == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mech = 1.0 - 2.0 * I * omega / eff.gamma_prime;
    let mw = 1.0 - 2.0 * I * omega / eff.kappa_m;
    -2.0 * r.cmp.sqrt() / (r.cmp + mech * mw)
}

/// Ideal transmission `T∞(ω) = |t∞(ω)|²`.
pub fn ideal_transmission(r: &ReducedParams, eff: &EffectiveCouplings, omega: f64) -> f64 {
    ideal_gain(r, eff, omega).norm_sqr()
}

/// Detunings at which `T∞ = 1`.
///
/// Returns `[0]` for impedance-matched cooperativity `C_M′ = 1`, the two
/// hybridized peaks `±Γ′√(C_M′ − 1)/2` for `β = 1` and `C_M′ > 1`, and an
/// empty list otherwise.
pub fn optimal_detunings(r: &ReducedParams, eff: &EffectiveCouplings) -> Vec<f64> {
    let candidates = if (r.cmp - 1.0).abs() < MATCH_TOL {
        vec![0.0]
    } else if (r.beta - 1.0).abs() < MATCH_TOL && r.cmp > 1.0 {
        let w = eff.gamma_prime * (r.cmp - 1.0).sqrt() / 2.0;
        vec![-w, w]
    } else {
        Vec::new()
    };
    candidates
        .into_iter()
        .filter(|&w| (ideal_transmission(r, eff, w) - 1.0).abs() < MATCH_TOL)
        .collect()
}

/// The detuning used for "matched transfer": the first optimal detuning, or
/// zero when none exists.
pub fn matched_detuning(r: &ReducedParams, eff: &EffectiveCouplings) -> f64 {
    optimal_detunings(r, eff)
        .into_iter()
        .map(|w| w.abs())
        .fold(None, |acc: Option<f64>, w| {
            Some(acc.map_or(w, |a| a.min(w)))
        })
        .unwrap_or(0.0)
}

/// Default grid: 2001 points spanning `±max(5Γ′, 5κ_M, 3g_M)`.
pub fn default_grid(eff: &EffectiveCouplings) -> Vec<f64> {
    let half = (5.0 * eff.gamma_prime)
        .max(5.0 * eff.kappa_m)
        .max(3.0 * eff.g_m);
    symmetric_grid(half, 2001)
}

/// `T∞` sampled over `grid` (units of `Γ`).
pub fn transmission_spectrum(
    r: &ReducedParams,
    eff: &EffectiveCouplings,
    grid: &[f64],
) -> SpectrumSeries {
    let values = grid
        .iter()
        .map(|&w| ideal_transmission(r, eff, w))
        .collect();
    SpectrumSeries::new(grid.to_vec(), values, "T_inf", "gamma")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn setup(cmp: f64, beta: f64) -> (ReducedParams, EffectiveCouplings) {
        let r = ReducedParams::new(100.0, cmp, beta, 10.0);
        let e = r.effective().unwrap();
        (r, e)
    }

    // T∞ written as a real rational function of u = 2ω/κ_M, derived by hand
    // from the closed-form gain.
    fn quartic_oracle(cmp: f64, beta: f64, u: f64) -> f64 {
        let u2 = u * u;
        4.0 * cmp * beta * beta
            / (u2 * u2
                + u2 * (1.0 - 2.0 * cmp * beta + beta * beta)
                + beta * beta * (1.0 + cmp).powi(2))
    }

    #[test]
    fn decoupled_limit() {
        let (_, e) = setup(0.0, 1.0);
        let s = susceptibilities(&e, 3.0);
        assert_eq!(s.chi_b_em, s.chi_b);
        assert_eq!(s.chi_c_em, s.chi_c);
        assert_eq!(s.chi_cross, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn matched_on_sideband() {
        let (r, e) = setup(1.0, 1.0);
        let s = susceptibilities(&e, 0.0);
        assert_relative_eq!((e.gamma_prime * s.chi_b_em).re, 1.0, epsilon = 1e-14);
        assert_relative_eq!((e.gamma_prime * s.chi_b_em).im, 0.0, epsilon = 1e-14);
        let t = ideal_gain(&r, &e, 0.0);
        assert_relative_eq!(t.re, -1.0, epsilon = 1e-15);
        assert_relative_eq!(t.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn overdriven_on_sideband() {
        let (r, e) = setup(4.0, 1.0);
        let t = ideal_gain(&r, &e, 0.0);
        assert_relative_eq!(t.re, -0.8, epsilon = 1e-15);
        assert_relative_eq!(t.norm_sqr(), 0.64, epsilon = 1e-15);
    }

    #[test]
    fn cross_susceptibility_identities() {
        for &(cmp, beta) in &[(0.5, 0.1), (1.0, 1.0), (10.0, 10.0), (3.0, 0.7)] {
            let (r, e) = setup(cmp, beta);
            for &w in &default_grid(&e) {
                let s = susceptibilities(&e, w);
                let alt = e.g_m * s.chi_c * s.chi_b_em;
                assert!((s.chi_cross - alt).norm() <= 1e-12 * s.chi_cross.norm().max(1e-300));
                let t2 = e.gamma_prime * e.kappa_m * s.chi_cross.norm_sqr();
                assert!((t2 - ideal_transmission(&r, &e, w)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_quartic_form() {
        for &(cmp, beta) in &[(0.5, 0.1), (1.0, 1.0), (10.0, 10.0), (3.0, 0.7)] {
            let (r, e) = setup(cmp, beta);
            for i in -50..=50 {
                let w = i as f64 * 0.1 * e.kappa_m;
                let u = 2.0 * w / e.kappa_m;
                assert_relative_eq!(
                    ideal_transmission(&r, &e, w),
                    quartic_oracle(cmp, beta, u),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn optimal_detuning_cases() {
        let (r, e) = setup(1.0, 0.1);
        assert_eq!(optimal_detunings(&r, &e), vec![0.0]);
        let (r, e) = setup(10.0, 1.0);
        let w = optimal_detunings(&r, &e);
        assert_eq!(w.len(), 2);
        assert_relative_eq!(w[1], 1.5 * e.gamma_prime, max_relative = 1e-14);
        assert_relative_eq!(w[0], -1.5 * e.gamma_prime, max_relative = 1e-14);
        let (r, e) = setup(0.5, 2.0);
        assert!(optimal_detunings(&r, &e).is_empty());
        let peak = transmission_spectrum(&r, &e, &default_grid(&e)).max();
        assert!(peak < 1.0);
    }

    #[test]
    fn quartic_flat_top() {
        let (r, e) = setup(1.0, 1.0);
        for i in -20..=20 {
            let w = i as f64 * 0.05 * e.kappa_m;
            let expect = 1.0 / (1.0 + 4.0 * (w / e.kappa_m).powi(4));
            assert_relative_eq!(ideal_transmission(&r, &e, w), expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn no_pump_no_gain() {
        let (r, e) = setup(0.0, 1.0);
        assert_eq!(ideal_gain(&r, &e, 0.3), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn strong_coupling_peak_width_tends_to_linewidth() {
        let (r, e) = setup(400.0, 1.0);
        let peak = optimal_detunings(&r, &e)[1];
        // Scan outward from the peak for the half-maximum points.
        let f = |w: f64| ideal_transmission(&r, &e, w) - 0.5;
        let bisect = |mut a: f64, mut b: f64| {
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if f(a) * f(m) <= 0.0 {
                    b = m
                } else {
                    a = m
                }
            }
            0.5 * (a + b)
        };
        let hi = bisect(peak, peak + 5.0 * e.gamma_prime);
        let lo = bisect(peak - 5.0 * e.gamma_prime, peak);
        let fwhm = hi - lo;
        assert!(
            (fwhm / e.gamma_prime - 1.0).abs() < 0.02,
            "{}",
            fwhm / e.gamma_prime
        );
    }

    #[test]
    fn default_grid_covers_splitting() {
        let (r, e) = setup(10.0, 1.0);
        let g = default_grid(&e);
        assert_eq!(g.len(), 2001);
        assert!(g[2000] > optimal_detunings(&r, &e)[1]);
    }
}
