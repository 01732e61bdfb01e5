//! Subcommand implementations. Each writes its tables and plots through the
//! sink and returns the JSON report.

pub mod homodyne;
pub mod misc;
pub mod states;
pub mod transfer;

use fbtransducer::forward::regime_label;
use fbtransducer::ReducedParams;
use serde_json::{json, Value};

use crate::config::Source;
use crate::output::Sink;

/// Everything a subcommand needs besides its own flags.
pub struct Ctx {
    pub params: ReducedParams,
    pub source: Source,
    pub seed: u64,
    pub lab_frame: bool,
    pub sink: Sink,
}

impl Ctx {
    /// Parameter echo for reports and the manifest.
    pub fn params_json(&self) -> Value {
        let eff = self.params.effective().ok();
        let warnings: Vec<String> = self
            .params
            .warnings()
            .map(|w| w.iter().map(|w| w.to_string()).collect())
            .unwrap_or_default();
        json!({
            "source": self.source.describe(),
            "reduced": self.params,
            "effective": eff,
            "regime": eff.as_ref().map(regime_label),
            "warnings": warnings,
            "units": "rates in units of the bare mechanical linewidth",
        })
    }
}

/// Evenly spaced values in log space.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Evenly spaced values, endpoints included.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spaces_hit_their_endpoints() {
        let l = log_space(0.1, 1000.0, 5);
        assert!((l[0] - 0.1).abs() < 1e-15 && (l[4] - 1000.0).abs() < 1e-9);
        assert!((l[1] - 1.0).abs() < 1e-12);
        assert_eq!(lin_space(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
