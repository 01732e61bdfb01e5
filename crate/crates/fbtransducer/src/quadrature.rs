//! Quadrature spectra from raw mode expansions.
//!
//! An output field `c(ω)` is written as a sum of independent thermal inputs,
//! each entering as `α a(ω + kΩ) + β a(−ω − kΩ)†`. The output quadratures
//! `X(ω) = [c(ω) + c(−ω)†]/√2` and `Y(ω) = i[c(−ω)† − c(ω)]/√2` are then
//! expanded over raw operators at distinct frequencies, coefficients at the
//! same operator are added coherently, and the symmetrized spectrum is the sum
//! of `(n̄ + 1/2)|coefficient|²` over operators.
//!
//! This is deliberately a separate route from the closed-form budgets: it uses
//! the gains at `−ω` as computed rather than assuming Hermitian symmetry.

use num_complex::Complex64;
use std::collections::BTreeMap;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One thermal input channel of an output field.
#[derive(Debug, Clone, Copy)]
pub struct InputTerm {
    /// Channel identity; terms with the same id share raw operators.
    pub id: usize,
    /// Sideband shift `k`: the channel is sampled at `±ω + kΩ`.
    pub shift: i32,
    /// Thermal occupancy of the channel.
    pub occupancy: f64,
    /// Coefficients in `c(ω)` of `a(ω + kΩ)` and `a(−ω − kΩ)†`.
    pub pos: (Complex64, Complex64),
    /// Coefficients in `c(−ω)` of `a(−ω + kΩ)` and `a(ω − kΩ)†`.
    pub neg: (Complex64, Complex64),
}

impl InputTerm {
    /// A channel entering through gain `t(±ω)` applied to the Bogoliubov mode
    /// `p a + q a†`.
    pub fn through_gain(
        id: usize,
        shift: i32,
        occupancy: f64,
        t_pos: Complex64,
        t_neg: Complex64,
        p: Complex64,
        q: Complex64,
    ) -> Self {
        Self {
            id,
            shift,
            occupancy,
            pos: (t_pos * p, t_pos * q),
            neg: (t_neg * p, t_neg * q),
        }
    }
}

/// Coefficients of the Bogoliubov mode `(X/√s + i√s Y)/√2` on `a` and `a†`.
pub fn bogoliubov(s: f64) -> (Complex64, Complex64) {
    let r = s.sqrt();
    (
        Complex64::new((1.0 / r + r) / 2.0, 0.0),
        Complex64::new((1.0 / r - r) / 2.0, 0.0),
    )
}

/// Coefficients of the phase quadrature `Y = −i(a − a†)/√2`.
pub fn phase_quadrature() -> (Complex64, Complex64) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (-I * h, I * h)
}

/// Coefficients of the amplitude quadrature `X = (a + a†)/√2`.
pub fn amplitude_quadrature() -> (Complex64, Complex64) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (Complex64::new(h, 0.0), Complex64::new(h, 0.0))
}

// Raw operator key: (channel, sign of ω, multiple of Ω, daggered).
type Key = (usize, i8, i32, bool);

fn accumulate(terms: &[InputTerm], weight_c: Complex64, weight_cdag: Complex64) -> f64 {
    let mut coef: BTreeMap<Key, (Complex64, f64)> = BTreeMap::new();
    let mut add = |k: Key, v: Complex64, n: f64| {
        let e = coef.entry(k).or_insert((Complex64::new(0.0, 0.0), n));
        e.0 += v;
    };
    for t in terms {
        let k = t.shift;
        let n = t.occupancy;
        // From c(ω).
        add((t.id, 1, k, false), weight_c * t.pos.0, n);
        add((t.id, -1, -k, true), weight_c * t.pos.1, n);
        // From c(−ω)†, which conjugates the coefficients and flips daggers.
        add((t.id, -1, k, true), weight_cdag * t.neg.0.conj(), n);
        add((t.id, 1, -k, false), weight_cdag * t.neg.1.conj(), n);
    }
    coef.values().map(|(c, n)| (n + 0.5) * c.norm_sqr()).sum()
}

/// Symmetrized amplitude-quadrature spectrum of the output.
pub fn spectrum_x(terms: &[InputTerm]) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    accumulate(terms, Complex64::new(h, 0.0), Complex64::new(h, 0.0))
}

/// Symmetrized phase-quadrature spectrum of the output.
pub fn spectrum_y(terms: &[InputTerm]) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    accumulate(terms, -I * h, I * h)
}
