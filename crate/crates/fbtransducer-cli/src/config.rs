//! Parameter resolution: command default, preset, TOML config, then flags.

use std::f64::consts::PI;
use std::path::Path;

use clap::Args;
use fbtransducer::params::{reduced_preset, to_reduced};
use fbtransducer::{PhysicalParams, ReducedParams};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Overrides named after the reduced parameter fields.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Optomechanical cooperativity.
    #[arg(long, global = true)]
    pub cl: Option<f64>,
    /// Effective electromechanical cooperativity.
    #[arg(long, global = true)]
    pub cmp: Option<f64>,
    /// Broadened mechanical linewidth over microwave linewidth.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long = "eta-l", alias = "eta_l", global = true)]
    pub eta_l: Option<f64>,
    #[arg(long = "eta-m", alias = "eta_m", global = true)]
    pub eta_m: Option<f64>,
    #[arg(long = "eta-d", alias = "eta_d", global = true)]
    pub eta_d: Option<f64>,
    #[arg(long, global = true)]
    pub nbar: Option<f64>,
    /// Feedback gain relative to the symmetrizing gain.
    #[arg(long = "h-gain", alias = "h_gain", global = true)]
    pub h_gain: Option<f64>,
    /// Mechanical quality factor.
    #[arg(long, global = true)]
    pub quality: Option<f64>,
}

impl Overrides {
    fn apply(&self, r: &mut ReducedParams) {
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut r.cl, self.cl);
        set(&mut r.cmp, self.cmp);
        set(&mut r.beta, self.beta);
        set(&mut r.eta_l, self.eta_l);
        set(&mut r.eta_m, self.eta_m);
        set(&mut r.eta_d, self.eta_d);
        set(&mut r.nbar, self.nbar);
        set(&mut r.h_gain, self.h_gain);
        set(&mut r.quality, self.quality);
    }
}

/// Physical parameters in a config file. Each rate may be given in rad/s
/// (`gamma`) or in Hz (`gamma_hz`, multiplied by 2π).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalToml {
    omega: Option<f64>,
    omega_hz: Option<f64>,
    gamma: Option<f64>,
    gamma_hz: Option<f64>,
    kappa_l: Option<f64>,
    kappa_l_hz: Option<f64>,
    kappa_m: Option<f64>,
    kappa_m_hz: Option<f64>,
    g_l: Option<f64>,
    g_l_hz: Option<f64>,
    g_m: Option<f64>,
    g_m_hz: Option<f64>,
    nbar: Option<f64>,
    eta_l: Option<f64>,
    eta_m: Option<f64>,
    eta_d: Option<f64>,
    h_gain: Option<f64>,
}

fn rate(name: &str, rad: Option<f64>, hz: Option<f64>) -> Result<f64> {
    match (rad, hz) {
        (Some(v), None) => Ok(v),
        (None, Some(f)) => Ok(2.0 * PI * f),
        (Some(_), Some(_)) => Err(CliError::Config(format!(
            "both `{name}` and `{name}_hz` given"
        ))),
        (None, None) => Err(CliError::Config(format!(
            "physical parameters need `{name}` or `{name}_hz`"
        ))),
    }
}

impl PhysicalToml {
    pub fn to_physical(&self) -> Result<PhysicalParams> {
        Ok(PhysicalParams {
            omega: rate("omega", self.omega, self.omega_hz)?,
            gamma: rate("gamma", self.gamma, self.gamma_hz)?,
            kappa_l: rate("kappa_l", self.kappa_l, self.kappa_l_hz)?,
            kappa_m: rate("kappa_m", self.kappa_m, self.kappa_m_hz)?,
            g_l: rate("g_l", self.g_l, self.g_l_hz)?,
            g_m: rate("g_m", self.g_m, self.g_m_hz)?,
            nbar: self
                .nbar
                .ok_or_else(|| CliError::Config("physical parameters need `nbar`".into()))?,
            eta_l: self.eta_l.unwrap_or(1.0),
            eta_m: self.eta_m.unwrap_or(1.0),
            eta_d: self.eta_d.unwrap_or(1.0),
            h_gain: self.h_gain.unwrap_or(1.0),
        })
    }
}

/// Reduced-parameter overrides in a config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedToml {
    cl: Option<f64>,
    cmp: Option<f64>,
    beta: Option<f64>,
    eta_l: Option<f64>,
    eta_m: Option<f64>,
    eta_d: Option<f64>,
    nbar: Option<f64>,
    h_gain: Option<f64>,
    quality: Option<f64>,
}

impl From<&ReducedToml> for Overrides {
    fn from(t: &ReducedToml) -> Self {
        Overrides {
            cl: t.cl,
            cmp: t.cmp,
            beta: t.beta,
            eta_l: t.eta_l,
            eta_m: t.eta_m,
            eta_d: t.eta_d,
            nbar: t.nbar,
            h_gain: t.h_gain,
            quality: t.quality,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub params: Option<ReducedToml>,
    pub physical: Option<PhysicalToml>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }
}

/// Where the base parameters came from, echoed into reports.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Preset(String),
    CommandDefault,
    Physical,
}

impl Source {
    pub fn describe(&self) -> String {
        match self {
            Source::Preset(p) => format!("preset:{p}"),
            Source::CommandDefault => "command-default".into(),
            Source::Physical => "config:physical".into(),
        }
    }
}

/// Resolves parameters. Later stages win: command default, preset (flag
/// before config), physical config, reduced config, command-line overrides.
pub fn resolve(
    default: ReducedParams,
    preset: Option<&str>,
    config: Option<&ConfigFile>,
    overrides: &Overrides,
) -> Result<(ReducedParams, Source)> {
    let preset = preset.or(config.and_then(|c| c.preset.as_deref()));
    let (mut r, mut source) = match preset {
        Some(name) => (reduced_preset(name)?, Source::Preset(name.to_string())),
        None => (default, Source::CommandDefault),
    };
    if let Some(c) = config {
        if let Some(p) = &c.physical {
            let q = r.quality;
            r = to_reduced(&p.to_physical()?)?;
            if p.omega.is_none() && p.omega_hz.is_none() {
                r.quality = q;
            }
            source = Source::Physical;
        }
        if let Some(t) = &c.params {
            Overrides::from(t).apply(&mut r);
        }
    }
    overrides.apply(&mut r);
    r.validate()?;
    Ok((r, source))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flags_override_preset() {
        let o = Overrides {
            eta_d: Some(0.5),
            ..Default::default()
        };
        let base = ReducedParams::new(1.0, 1.0, 1.0, 0.0);
        let (r, src) = resolve(base, Some("gold_square"), None, &o).unwrap();
        assert_eq!(r.eta_d, 0.5);
        assert_eq!(r.eta_l, 0.95);
        assert_eq!(src, Source::Preset("gold_square".into()));
    }

    #[test]
    fn config_params_sit_between_preset_and_flags() {
        let cfg =
            ConfigFile::parse("preset = \"fig6\"\nseed = 3\n[params]\nnbar = 7.0\ncl = 20.0\n")
                .unwrap();
        let o = Overrides {
            cl: Some(30.0),
            ..Default::default()
        };
        let base = ReducedParams::new(1.0, 1.0, 1.0, 0.0);
        let (r, _) = resolve(base, None, Some(&cfg), &o).unwrap();
        assert_eq!(r.nbar, 7.0);
        assert_eq!(r.cl, 30.0);
        assert_eq!(cfg.seed, Some(3));
    }

    #[test]
    fn hz_keys_are_scaled_by_two_pi() {
        // g_L chosen so that C_L = 4 g_L²/(Γ κ_L) = 100.
        let text = "[physical]\nomega_hz = 1e6\ngamma_hz = 0.1\nkappa_l_hz = 1e7\n\
                    g_l_hz = 5e3\nkappa_m_hz = 1e4\ng_m_hz = 1e3\nnbar = 10.0\n";
        let cfg = ConfigFile::parse(text).unwrap();
        let p = cfg.physical.as_ref().unwrap().to_physical().unwrap();
        assert_relative_eq!(p.gamma, 2.0 * PI * 0.1, max_relative = 1e-15);
        let base = ReducedParams::new(1.0, 1.0, 1.0, 0.0);
        let (r, src) = resolve(base, None, Some(&cfg), &Overrides::default()).unwrap();
        assert_relative_eq!(r.cl, 100.0, max_relative = 1e-12);
        assert_relative_eq!(r.quality, 1e7, max_relative = 1e-12);
        assert_eq!(src, Source::Physical);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ConfigFile::parse("[params]\ncll = 1.0\n").is_err());
    }

    #[test]
    fn invalid_override_is_reported() {
        let o = Overrides {
            eta_m: Some(1.5),
            ..Default::default()
        };
        let base = ReducedParams::new(1.0, 1.0, 1.0, 0.0);
        assert!(resolve(base, None, None, &o).is_err());
    }
}
