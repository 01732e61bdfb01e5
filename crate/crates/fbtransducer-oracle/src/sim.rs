//! Euler–Maruyama integration of the mechanical and microwave amplitudes in
//! the frame rotating at their resonances.

use fbtransducer::EffectiveCouplings;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::config::{DriveDensities, SimConfig};
use crate::error::{OracleError, Result};

/// Sampled trajectories after burn-in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceBundle {
    pub dt: f64,
    /// Mechanical amplitude.
    pub b: Vec<Complex64>,
    /// Intracavity microwave amplitude.
    pub c: Vec<Complex64>,
    /// Microwave output field.
    pub c_out: Vec<Complex64>,
}

impl TraceBundle {
    pub fn len(&self) -> usize {
        self.c_out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c_out.is_empty()
    }
}

/// One independent noise stream with its integrator state.
pub(crate) struct Stepper {
    rng: ChaCha8Rng,
    dt: f64,
    half_gamma: f64,
    half_kappa: f64,
    g: f64,
    sqrt_gamma: f64,
    sqrt_k_in: f64,
    sqrt_k_loss: f64,
    /// Standard deviations of each noise increment's real and imaginary parts.
    b_sigma: [f64; 4],
    mw_sigma: f64,
    limit_sq: f64,
    step: usize,
    pub b: Complex64,
    pub c: Complex64,
}

impl Stepper {
    pub fn new(cfg: &SimConfig, eff: &EffectiveCouplings, stream: u64) -> Self {
        let d = DriveDensities::new(&cfg.params, eff, cfg.mask);
        let dt = cfg.dt;
        let sig = |density: f64| (density * dt / 2.0).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);
        let eta_m = cfg.params.eta_m;
        let scale = 1.0 + d.mechanical_total().max(d.microwave).sqrt();
        let limit = 1e4 * (scale + cfg.initial_b.norm() + cfg.initial_c.norm());
        Self {
            rng,
            dt,
            half_gamma: eff.gamma_prime / 2.0,
            half_kappa: eff.kappa_m / 2.0,
            g: eff.g_m,
            sqrt_gamma: eff.gamma_prime.sqrt(),
            sqrt_k_in: (eta_m * eff.kappa_m).sqrt(),
            sqrt_k_loss: ((1.0 - eta_m) * eff.kappa_m).sqrt(),
            b_sigma: [
                sig(d.thermal),
                sig(d.optical),
                sig(d.optical_loss),
                sig(d.detection),
            ],
            mw_sigma: sig(d.microwave),
            limit_sq: limit * limit,
            step: 0,
            b: cfg.initial_b,
            c: cfg.initial_c,
        }
    }

    fn increment(&mut self, sigma: f64) -> Complex64 {
        if sigma == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(sigma * re, sigma * im)
    }

    /// Advances one step and returns the output field over that step.
    pub fn step(&mut self) -> Result<Complex64> {
        let mut drive_b = Complex64::new(0.0, 0.0);
        for k in 0..4 {
            drive_b += self.increment(self.b_sigma[k]);
        }
        let dw_in = self.increment(self.mw_sigma);
        let dw_loss = self.increment(self.mw_sigma);
        let i = Complex64::i();
        let (b, c, dt) = (self.b, self.c, self.dt);
        let nb = b + (-self.half_gamma * b + i * self.g * c) * dt + self.sqrt_gamma * drive_b;
        let nc = c
            + (-self.half_kappa * c + i * self.g * b) * dt
            + self.sqrt_k_in * dw_in
            + self.sqrt_k_loss * dw_loss;
        // Midpoint cavity amplitude keeps the half-weight correlation with the
        // input noise of the same step.
        let out = dw_in / dt - self.sqrt_k_in * 0.5 * (c + nc);
        self.b = nb;
        self.c = nc;
        self.step += 1;
        let m = nb.norm_sqr().max(nc.norm_sqr());
        if !(m < self.limit_sq) {
            return Err(OracleError::Diverged {
                step: self.step,
                magnitude: m.sqrt(),
            });
        }
        Ok(out)
    }

    pub fn burn(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }
}

pub(crate) fn burn_steps(cfg: &SimConfig) -> usize {
    (cfg.burn_in / cfg.dt).ceil() as usize
}

/// Integrates one stream (stream 0 of `cfg.seed`) and records
/// `(n_segments + 1) * segment_len / 2` samples after burn-in, enough for
/// `n_segments` half-overlapping Welch segments.
pub fn simulate(cfg: &SimConfig) -> Result<TraceBundle> {
    let eff = cfg.validate()?;
    let n = (cfg.n_segments + 1) * cfg.segment_len / 2;
    let mut st = Stepper::new(cfg, &eff, 0);
    st.burn(burn_steps(cfg))?;
    let mut b = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let mut c_out = Vec::with_capacity(n);
    for _ in 0..n {
        let out = st.step()?;
        b.push(st.b);
        c.push(st.c);
        c_out.push(out);
    }
    Ok(TraceBundle {
        dt: cfg.dt,
        b,
        c,
        c_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DriveMask;
    use fbtransducer::ReducedParams;

    fn small(params: ReducedParams, seed: u64) -> SimConfig {
        let mut cfg = SimConfig::for_params(params, seed)
            .unwrap()
            .with_segments(8);
        cfg.segment_len = 256;
        cfg
    }

    #[test]
    fn same_seed_same_trace() {
        let cfg = small(ReducedParams::new(10.0, 1.0, 1.0, 5.0), 3);
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        let mut other = cfg.clone();
        other.seed = 4;
        assert_ne!(simulate(&other).unwrap().c_out, a.c_out);
    }

    #[test]
    fn noiseless_run_decays_from_any_start() {
        let mut cfg = small(ReducedParams::new(10.0, 2.0, 0.5, 5.0), 1);
        cfg.mask = DriveMask::NONE;
        cfg.burn_in = 0.0;
        cfg.initial_b = Complex64::new(3.0, -1.0);
        cfg.initial_c = Complex64::new(-2.0, 4.0);
        cfg.segment_len = 8192;
        let eff = cfg.validate().unwrap();
        let tr = simulate(&cfg).unwrap();
        let t_end = tr.len() as f64 * cfg.dt;
        // Slowest decay of the coupled modes is at least min(Γ′, κ)/2 here.
        let slow = eff.gamma_prime.min(eff.kappa_m) / 2.0;
        assert!(t_end * slow > 30.0);
        let last = tr.b.last().unwrap().norm() + tr.c.last().unwrap().norm();
        assert!(last < 1e-8, "{last}");
        assert!(tr.c_out.last().unwrap().norm() < 1e-8);
    }

    #[test]
    fn uncoupled_mechanics_relax_to_drive_density() {
        // With no microwave coupling the mechanical mode is a complex OU
        // process whose quadrature variance equals the total drive density.
        let r = ReducedParams::new(10.0, 0.0, 1.0, 20.0);
        let mut cfg = small(r, 11);
        cfg.mask = DriveMask {
            thermal: true,
            ..DriveMask::NONE
        };
        let eff = cfg.validate().unwrap();
        let mut st = Stepper::new(&cfg, &eff, 0);
        st.burn(burn_steps(&cfg)).unwrap();
        let steps = 10_000_000;
        let mut acc = 0.0;
        for _ in 0..steps {
            st.step().unwrap();
            acc += st.b.norm_sqr();
        }
        let var = acc / steps as f64;
        let expect = eff.eta_b * (r.nbar + 0.5);
        assert!((var / expect - 1.0).abs() < 0.05, "{var} vs {expect}");
    }
}
