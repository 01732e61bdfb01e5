//! Frequency-domain model of a feedback-enabled optical-to-microwave
//! electro-optomechanical transducer.
//!
//! The optical field is transferred onto a mechanical resonator with a
//! quarter-cycle delayed feedback loop that symmetrizes the two optical
//! quadratures, and the resonator is read out by a sideband-resolved
//! microwave cavity. The crate computes transfer gains, added-noise budgets,
//! the quantum transfer witness, Wigner-function propagation, homodyne
//! photocurrent spectra, the coherent-feedback reverse channel and two-mode
//! Gaussian entanglement of the transferred state.
//!
//! Parameters live in [`params::ReducedParams`]; rates are in units of the
//! bare mechanical linewidth and frequencies are detunings from the upper
//! mechanical sideband.

pub mod error;
pub mod forward;
pub mod gaussian_ent;
pub mod homodyne;
pub mod noise;
pub mod params;
pub mod quadrature;
pub mod response;
pub mod reverse;
pub mod spectrum;
pub mod wigner;

pub use error::{ModelError, Result};
pub use params::{EffectiveCouplings, PhysicalParams, ReducedParams};
pub use spectrum::SpectrumSeries;

/// Root of `f` in `[lo, hi]` by bisection, or `None` if the endpoints do not
/// bracket a sign change.
pub fn bisect<F>(f: F, lo: f64, hi: f64, xtol: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(Some(a));
    }
    if fb == 0.0 {
        return Ok(Some(b));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    while b - a > xtol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(Some(m));
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_root() {
        let r = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-14)
            .unwrap()
            .unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert_eq!(bisect(|x| Ok(x * x + 1.0), 0.0, 2.0, 1e-14).unwrap(), None);
    }
}
