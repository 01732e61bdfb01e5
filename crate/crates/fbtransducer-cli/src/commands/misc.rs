//! Reverse transfer, entanglement, the Monte Carlo check and preset listing.

use clap::Args;
use fbtransducer::gaussian_ent::{tmss_channel_inseparability, transfer_report, ChannelSpec};
use fbtransducer::noise::{budget_witness, matched_budget, noise_budget};
use fbtransducer::params::{preset, reduced_preset, PRESET_NAMES};
use fbtransducer::reverse::{
    forward_symmetric_noise, loop_params, per_input_noise, reverse_channel,
};
use fbtransducer::spectrum::symmetric_grid;
use fbtransducer::ReducedParams;
use fbtransducer_oracle::{validate, SimConfig};
use serde_json::{json, Value};

use super::{lin_space, Ctx};
use crate::error::Result;
use crate::output::{Cell, Table};
use crate::svg::{LinePlot, Series};

#[derive(Debug, Clone, Args)]
pub struct ReverseArgs {
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    /// Half width of the grid in units of the loop's broadened linewidth.
    #[arg(long, default_value_t = 5.0)]
    pub half_width: f64,
}

pub fn reverse(ctx: &mut Ctx, args: &ReverseArgs) -> Result<Value> {
    let r = ctx.params;
    let (_, loop_eff) = loop_params(&r, 1.0)?;
    let grid = symmetric_grid(args.half_width * loop_eff.gamma_prime, args.points);
    let mut headers = vec!["omega", "omega_over_gamma_prime"];
    if ctx.lab_frame {
        headers.push("omega_lab");
    }
    headers.extend([
        "abs_x_in",
        "abs_y_in",
        "abs_x_v",
        "abs_y_v",
        "abs_b_in",
        "abs_c_in",
        "T_signal",
        "noise",
        "forward_noise",
    ]);
    let mut table = Table::new(&headers);
    // Forward side of the exchange identity uses unit feedback gain.
    let fwd = r.with_h_gain(1.0);
    let fwd_eff = fwd.effective()?;
    let mut symmetry: f64 = 0.0;
    let (mut noise_curve, mut signal_curve) = (Vec::new(), Vec::new());
    for &w in &grid {
        let ch = reverse_channel(&r, w)?;
        let c = ch.coefficients;
        let f = forward_symmetric_noise(&fwd, w)?;
        symmetry = symmetry.max((noise_budget(&fwd, &fwd_eff, w).v_total - f).abs());
        let mut row: Vec<Cell> = vec![w.into(), (w / loop_eff.gamma_prime).into()];
        if ctx.lab_frame {
            row.push((w + loop_eff.omega).into());
        }
        let t_sig = c.c_in.norm_sqr();
        row.extend(
            [
                c.x_in.norm(),
                c.y_in.norm(),
                c.x_v.norm(),
                c.y_v.norm(),
                c.b_in.norm(),
                c.c_in.norm(),
                t_sig,
                ch.noise,
                f,
            ]
            .map(Cell::from),
        );
        table.push(row);
        noise_curve.push((w / loop_eff.gamma_prime, ch.noise));
        signal_curve.push((w / loop_eff.gamma_prime, t_sig));
    }
    ctx.sink.csv("", &table)?;
    let plot = LinePlot {
        title: "Microwave-to-optical transfer".into(),
        x_label: "detuning / broadened linewidth".into(),
        y_label: "transmission, added noise".into(),
        series: vec![
            Series::new("signal", signal_curve),
            Series::new("added noise", noise_curve),
        ],
        hlines: vec![(0.5, "vacuum".into())],
        ..Default::default()
    };
    ctx.sink.svg("", &plot.render())?;
    let ch = reverse_channel(&r, 0.0)?;
    Ok(json!({
        "at_sideband": {
            "noise": ch.noise,
            "signal": ch.coefficients.c_in.norm_sqr(),
            "per_input": per_input_noise(&ch, r.nbar),
            "normalization_residual": ch.normalization_residual(),
        },
        "detection_limit": (1.0 / r.eta_d - 1.0) / 4.0,
        "forward_reverse_max_residual": symmetry,
    }))
}

#[derive(Debug, Clone, Args)]
pub struct EntanglementArgs {
    /// Squeezing parameter reported in the JSON.
    #[arg(long, default_value_t = 3.0)]
    pub r: f64,
    #[arg(long)]
    pub gx: Option<f64>,
    #[arg(long)]
    pub gy: Option<f64>,
    #[arg(long)]
    pub vx: Option<f64>,
    #[arg(long)]
    pub vy: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

pub fn entanglement(ctx: &mut Ctx, args: &EntanglementArgs) -> Result<Value> {
    // Without explicit channel flags, use the transducer at matched transfer.
    let b = matched_budget(&ctx.params)?;
    let g = b.t_ac.sqrt();
    let channel = ChannelSpec {
        g_x: args.gx.unwrap_or(g),
        g_y: args.gy.unwrap_or(g),
        v_x: args.vx.unwrap_or(b.v_total),
        v_y: args.vy.unwrap_or(b.v_total),
    };
    let mut table = Table::new(&["r", "I", "W_T"]);
    let mut curve = Vec::new();
    let report = transfer_report(args.r, channel)?;
    for r in lin_space(0.0, args.r_max, args.points) {
        let i = tmss_channel_inseparability(r, &channel, None)?;
        table.push(vec![r.into(), i.into(), report.w_t.into()]);
        curve.push((r, i));
    }
    ctx.sink.csv("", &table)?;
    let plot = LinePlot {
        title: "Inseparability after one-mode transfer".into(),
        x_label: "squeezing r".into(),
        y_label: "I".into(),
        series: vec![Series::new("I", curve)],
        hlines: vec![(report.w_t, "W_T".into()), (1.0, "separable".into())],
        ..Default::default()
    };
    ctx.sink.svg("", &plot.render())?;
    Ok(json!({
        "report": report,
        "limit_inseparability": tmss_channel_inseparability(args.r_max, &channel, None)?,
    }))
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Welch segments (at least 8; the default gives about 2% scatter).
    #[arg(long)]
    pub segments: Option<usize>,
    /// Comparison band half width in microwave linewidths.
    #[arg(long, default_value_t = fbtransducer_oracle::BAND_KAPPA)]
    pub band_kappa: f64,
    /// RMS relative tolerance.
    #[arg(long, default_value_t = fbtransducer_oracle::RMS_TOL)]
    pub tol: f64,
}

pub fn oracle_validate(ctx: &mut Ctx, args: &OracleArgs) -> Result<Value> {
    let mut cfg = SimConfig::for_params(ctx.params, ctx.seed)?;
    if let Some(n) = args.segments {
        cfg = cfg.with_segments(n);
    }
    let rep = validate(&cfg, args.band_kappa, args.tol)?;
    let mut table = Table::new(&["omega", "mc", "analytic", "rel_dev"]);
    let mut mc_curve = Vec::new();
    let mut an_curve = Vec::new();
    for ((&w, &m), &a) in rep
        .mc
        .omega
        .iter()
        .zip(&rep.mc.values)
        .zip(&rep.analytic.values)
    {
        table.push(vec![w.into(), m.into(), a.into(), ((m - a) / a).into()]);
        mc_curve.push((w, m));
        an_curve.push((w, a));
    }
    ctx.sink.csv("", &table)?;
    let plot = LinePlot {
        title: "Monte Carlo versus closed form".into(),
        x_label: "detuning".into(),
        y_label: "output quadrature PSD".into(),
        series: vec![
            Series::new("monte carlo", mc_curve),
            Series::new("analytic", an_curve),
        ],
        ..Default::default()
    };
    ctx.sink.svg("", &plot.render())?;
    let c = &rep.comparison;
    Ok(json!({
        "verdict": if c.pass { "pass" } else { "fail" },
        "comparison": c,
        "config": rep.config,
        "simulated_time": rep.config.duration(),
    }))
}

pub fn presets(ctx: &mut Ctx) -> Result<Value> {
    let mut table = Table::new(&[
        "name",
        "cl",
        "cmp",
        "beta",
        "eta_l",
        "eta_m",
        "eta_d",
        "nbar",
        "h_gain",
        "quality",
        "gamma_prime",
        "kappa_m",
        "g_m",
        "t_ac",
        "v_add",
        "w_t",
    ]);
    let mut list = Vec::new();
    for name in PRESET_NAMES {
        let r: ReducedParams = reduced_preset(name)?;
        let eff = r.effective()?;
        let b = matched_budget(&r)?;
        let w = budget_witness(&b).w_t;
        table.push(vec![
            name.into(),
            r.cl.into(),
            r.cmp.into(),
            r.beta.into(),
            r.eta_l.into(),
            r.eta_m.into(),
            r.eta_d.into(),
            r.nbar.into(),
            r.h_gain.into(),
            r.quality.into(),
            eff.gamma_prime.into(),
            eff.kappa_m.into(),
            eff.g_m.into(),
            b.t_ac.into(),
            b.v_total.into(),
            w.into(),
        ]);
        list.push(json!({
            "name": name,
            "reduced": r,
            "physical": preset(name)?,
            "effective": eff,
            "matched": b,
        }));
    }
    ctx.sink.csv("", &table)?;
    Ok(json!({ "presets": list }))
}
