//! Welch spectra of the simulated output and comparison with the analytic
//! prediction.

use std::f64::consts::PI;
use std::sync::Arc;

use fbtransducer::noise::noise_budget;
use fbtransducer::{ReducedParams, SpectrumSeries};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::config::{SimConfig, MIN_SEGMENTS};
use crate::error::{OracleError, Result};
use crate::sim::{burn_steps, Stepper, TraceBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrature {
    X,
    Y,
}

/// Accumulates Hann-windowed periodograms of the X and Y quadratures of a
/// complex signal. One complex FFT per segment yields both.
struct Welch {
    fft: Arc<dyn Fft<f64>>,
    window: Vec<f64>,
    buf: Vec<Complex64>,
    sum_x: Vec<f64>,
    sum_y: Vec<f64>,
    count: usize,
}

impl Welch {
    fn new(n: usize) -> Self {
        let window = (0..n)
            .map(|k| 0.5 * (1.0 - (2.0 * PI * k as f64 / n as f64).cos()))
            .collect();
        Self {
            fft: FftPlanner::new().plan_fft_forward(n),
            window,
            buf: vec![Complex64::new(0.0, 0.0); n],
            sum_x: vec![0.0; n],
            sum_y: vec![0.0; n],
            count: 0,
        }
    }

    fn add(&mut self, seg: &[Complex64]) {
        let n = self.window.len();
        for ((b, &z), &w) in self.buf.iter_mut().zip(seg).zip(&self.window) {
            *b = z * w;
        }
        self.fft.process(&mut self.buf);
        // X = √2 Re z and Y = √2 Im z, so their transforms are
        // (Z_k + Z*_{-k})/√2 and (Z_k - Z*_{-k})/(√2 i).
        for k in 0..n {
            let zk = self.buf[k];
            let zm = self.buf[(n - k) % n].conj();
            self.sum_x[k] += 0.5 * (zk + zm).norm_sqr();
            self.sum_y[k] += 0.5 * (zk - zm).norm_sqr();
        }
        self.count += 1;
    }

    fn merge(&mut self, other: &Welch) {
        for (a, b) in self.sum_x.iter_mut().zip(&other.sum_x) {
            *a += b;
        }
        for (a, b) in self.sum_y.iter_mut().zip(&other.sum_y) {
            *a += b;
        }
        self.count += other.count;
    }

    /// Two-sided densities on an increasing grid, normalized so white noise
    /// of quadrature density D reads D.
    fn finish(&self, dt: f64) -> (SpectrumSeries, SpectrumSeries) {
        let n = self.window.len();
        let w2: f64 = self.window.iter().map(|w| w * w).sum();
        let norm = dt / (w2 * self.count as f64);
        let shift = |k: usize| (k + n / 2) % n;
        let omega: Vec<f64> = (0..n)
            .map(|j| {
                let k = shift(j);
                let signed = if k >= n / 2 {
                    k as f64 - n as f64
                } else {
                    k as f64
                };
                2.0 * PI * signed / (n as f64 * dt)
            })
            .collect();
        let x = (0..n).map(|j| self.sum_x[shift(j)] * norm).collect();
        let y = (0..n).map(|j| self.sum_y[shift(j)] * norm).collect();
        (
            SpectrumSeries::new(omega.clone(), x, "mc_x", "gamma"),
            SpectrumSeries::new(omega, y, "mc_y", "gamma"),
        )
    }
}

fn feed(welch: &mut Welch, trace: &[Complex64], n_segments: usize) {
    let n = welch.window.len();
    for s in 0..n_segments {
        let start = s * n / 2;
        welch.add(&trace[start..start + n]);
    }
}

/// Welch estimate of one output quadrature from a recorded trace, Hann
/// window with 50% overlap.
pub fn welch_psd(trace: &TraceBundle, q: Quadrature, segment_len: usize) -> Result<SpectrumSeries> {
    if segment_len < 2 || segment_len % 2 != 0 {
        return Err(OracleError::InvalidConfig(format!(
            "segment length {segment_len} must be even"
        )));
    }
    let half = segment_len / 2;
    let n_segments = (trace.len() / half).saturating_sub(1);
    if n_segments < MIN_SEGMENTS {
        return Err(OracleError::TooFewSegments {
            got: n_segments,
            min: MIN_SEGMENTS,
        });
    }
    let mut w = Welch::new(segment_len);
    feed(&mut w, &trace.c_out, n_segments);
    let (x, y) = w.finish(trace.dt);
    Ok(match q {
        Quadrature::X => x,
        Quadrature::Y => y,
    })
}

/// Output quadrature spectra from a full run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSpectra {
    pub x: SpectrumSeries,
    pub y: SpectrumSeries,
    pub segments: usize,
}

/// Runs every stream of `cfg` in parallel and returns the averaged Welch
/// spectra of the output field. Results depend only on `cfg`, not on the
/// number of threads.
pub fn mc_spectra(cfg: &SimConfig) -> Result<McSpectra> {
    let eff = cfg.validate()?;
    let n = cfg.segment_len;
    let burn = burn_steps(cfg);
    let parts: Vec<Welch> = cfg
        .chunk_segments()
        .into_par_iter()
        .enumerate()
        .map(|(stream, segs)| -> Result<Welch> {
            let mut st = Stepper::new(cfg, &eff, stream as u64);
            st.burn(burn)?;
            let len = (segs + 1) * n / 2;
            let mut trace = Vec::with_capacity(len);
            for _ in 0..len {
                trace.push(st.step()?);
            }
            let mut w = Welch::new(n);
            feed(&mut w, &trace, segs);
            Ok(w)
        })
        .collect::<Result<_>>()?;
    let mut total = Welch::new(n);
    for p in &parts {
        total.merge(p);
    }
    let (x, y) = total.finish(cfg.dt);
    Ok(McSpectra {
        x,
        y,
        segments: total.count,
    })
}

/// Analytic output-quadrature spectrum with vacuum at every input: the
/// added noise plus the transmitted optical vacuum.
pub fn analytic_output_spectrum(r: &ReducedParams, omega: &[f64]) -> Result<SpectrumSeries> {
    let eff = r.effective()?;
    let h = r.h_gain;
    let values = omega
        .iter()
        .map(|&w| {
            let b = noise_budget(r, &eff, w);
            b.v_total + b.t_ac * (h + 1.0 / h) / 4.0
        })
        .collect();
    Ok(SpectrumSeries::new(
        omega.to_vec(),
        values,
        "analytic",
        "gamma",
    ))
}

/// Relative deviation of a Monte Carlo spectrum from a reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub band: f64,
    pub points: usize,
    pub max_rel: f64,
    pub rms_rel: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares `mc` against `reference` at every Monte Carlo frequency with
/// |ω| ≤ `band`, interpolating the reference linearly. Passes when the RMS
/// relative deviation is within `tolerance`.
pub fn compare(
    reference: &SpectrumSeries,
    mc: &SpectrumSeries,
    band: f64,
    tolerance: f64,
) -> Result<Comparison> {
    let mut max_rel: f64 = 0.0;
    let mut sum_sq = 0.0;
    let mut points = 0;
    for (&w, &v) in mc.omega.iter().zip(&mc.values) {
        if w.abs() > band {
            continue;
        }
        let a = reference
            .interpolate(w)
            .ok_or(OracleError::OutsideGrid(w))?;
        let rel = (v - a) / a;
        max_rel = max_rel.max(rel.abs());
        sum_sq += rel * rel;
        points += 1;
    }
    if points == 0 {
        return Err(OracleError::InvalidConfig(format!(
            "no Monte Carlo frequencies within ±{band}"
        )));
    }
    let rms_rel = (sum_sq / points as f64).sqrt();
    Ok(Comparison {
        band,
        points,
        max_rel,
        rms_rel,
        tolerance,
        pass: rms_rel <= tolerance,
    })
}

/// Result of [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub config: SimConfig,
    pub comparison: Comparison,
    /// Monte Carlo X spectrum inside the band.
    pub mc: SpectrumSeries,
    /// Analytic spectrum on the same grid.
    pub analytic: SpectrumSeries,
}

/// Default comparison band in units of the microwave linewidth.
pub const BAND_KAPPA: f64 = 3.0;

/// Default RMS tolerance.
pub const RMS_TOL: f64 = 0.05;

/// Simulates `cfg` and compares the X spectrum with the analytic one over
/// ±`band_kappa` microwave linewidths.
pub fn validate(cfg: &SimConfig, band_kappa: f64, tolerance: f64) -> Result<ValidationReport> {
    let eff = cfg.validate()?;
    let band = band_kappa * eff.kappa_m;
    let spectra = mc_spectra(cfg)?;
    let (omega, values): (Vec<f64>, Vec<f64>) = spectra
        .x
        .omega
        .iter()
        .zip(&spectra.x.values)
        .filter(|(w, _)| w.abs() <= band)
        .map(|(&w, &v)| (w, v))
        .unzip();
    let mc = SpectrumSeries::new(omega.clone(), values, "mc_x", "gamma");
    let analytic = analytic_output_spectrum(&cfg.params, &omega)?;
    let comparison = compare(&analytic, &mc, band, tolerance)?;
    Ok(ValidationReport {
        config: cfg.clone(),
        comparison,
        mc,
        analytic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DriveMask;
    use crate::sim::simulate;
    use approx::assert_relative_eq;

    fn white(len: usize, sigma: f64) -> TraceBundle {
        // Deterministic pseudo-random white sequence from a simple LCG mixed
        // through the Box–Muller map.
        let mut state: u64 = 12345;
        let mut uni = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 + 0.5) / (1u64 << 53) as f64
        };
        let c_out = (0..len)
            .map(|_| {
                let (u, v) = (uni(), uni());
                let r = (-2.0 * u.ln()).sqrt() * sigma;
                Complex64::new(r * (2.0 * PI * v).cos(), r * (2.0 * PI * v).sin())
            })
            .collect();
        TraceBundle {
            dt: 0.01,
            b: Vec::new(),
            c: Vec::new(),
            c_out,
        }
    }

    #[test]
    fn white_noise_reads_its_density() {
        // Per-sample quadrature variance D/dt with D = 1/2.
        let dt = 0.01;
        let sigma = (0.5 / dt / 2.0_f64).sqrt();
        let tr = white(64 * 1025, sigma);
        for q in [Quadrature::X, Quadrature::Y] {
            let s = welch_psd(&tr, q, 128).unwrap();
            let mean = s.values.iter().sum::<f64>() / s.len() as f64;
            assert_relative_eq!(mean, 0.5, max_relative = 0.01);
        }
    }

    #[test]
    fn grid_is_increasing_and_centred() {
        let tr = white(16 * 9, 1.0);
        let s = welch_psd(&tr, Quadrature::X, 16).unwrap();
        assert_eq!(s.len(), 16);
        assert_relative_eq!(s.omega[0], -PI / tr.dt, max_relative = 1e-12);
        assert_eq!(s.omega[8], 0.0);
    }

    #[test]
    fn short_trace_is_rejected() {
        let tr = white(16 * 3, 1.0);
        assert!(matches!(
            welch_psd(&tr, Quadrature::X, 16),
            Err(OracleError::TooFewSegments { got: 5, .. })
        ));
    }

    #[test]
    fn single_stream_matches_recorded_trace() {
        let r = ReducedParams::new(10.0, 1.0, 1.0, 5.0);
        let mut cfg = SimConfig::for_params(r, 9).unwrap().with_segments(8);
        cfg.segment_len = 256;
        cfg.chunks = 1;
        let tr = simulate(&cfg).unwrap();
        let direct = welch_psd(&tr, Quadrature::X, 256).unwrap();
        let run = mc_spectra(&cfg).unwrap();
        assert_eq!(run.segments, 8);
        for (a, b) in direct.values.iter().zip(&run.x.values) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12);
        }
    }

    #[test]
    fn vacuum_passes_through_flat() {
        // No optomechanical cooperativity and only microwave vacuum: the
        // cavity just reflects vacuum.
        let r = ReducedParams::new(10.0, 0.0, 1.0, 0.0);
        let mut cfg = SimConfig::for_params(r, 5).unwrap().with_segments(2048);
        cfg.mask = DriveMask {
            microwave: true,
            ..DriveMask::NONE
        };
        let run = mc_spectra(&cfg).unwrap();
        let eff = cfg.validate().unwrap();
        let flat = SpectrumSeries::new(vec![-1e9, 1e9], vec![0.5, 0.5], "vac", "gamma");
        let c = compare(&flat, &run.x, 3.0 * eff.kappa_m, 0.05).unwrap();
        assert!(c.pass, "{c:?}");
        let c = compare(&flat, &run.y, 3.0 * eff.kappa_m, 0.05).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn error_shrinks_with_segments() {
        let r = ReducedParams::new(50.0, 1.0, 1.0, 10.0);
        let rms = |segs: usize| {
            let cfg = SimConfig::for_params(r, 21).unwrap().with_segments(segs);
            validate(&cfg, BAND_KAPPA, 1.0).unwrap().comparison.rms_rel
        };
        let (a, b, c) = (rms(16), rms(64), rms(256));
        assert!(a > b && b > c, "{a} {b} {c}");
        // Statistical error scales as segments^-1/2, so 16x more segments
        // should cut it by about 4.
        let ratio = a / c;
        assert!((2.5..6.5).contains(&ratio), "{ratio}");
    }
}
