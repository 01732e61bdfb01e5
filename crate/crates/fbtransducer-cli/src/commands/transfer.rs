//! Transmission spectra, noise budgets and the witness figures.

use clap::Args;
use fbtransducer::noise::{
    budget_witness, loss_threshold, matched_budget, tv_trace, LossAxis, Metric,
};
use fbtransducer::params::{reduced_preset, transmission_grid};
use fbtransducer::response::{optimal_detunings, transmission_spectrum};
use fbtransducer::spectrum::symmetric_grid;
use fbtransducer::{EffectiveCouplings, ReducedParams};
use serde_json::{json, Value};

use super::{lin_space, log_space, Ctx};
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};
use crate::svg::{Heatmap, LinePlot, Series};

/// Lowest η_L searched for thresholds; stays clear of critical coupling.
const ETA_L_FLOOR: f64 = 0.5 + 1e-6;

#[derive(Debug, Clone, Args)]
pub struct TransmissionArgs {
    /// Sample all nine (beta, cmp) panels of the transmission figure.
    #[arg(long)]
    pub grid: bool,
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    /// Half width of the detuning grid in units of the broadened linewidth.
    #[arg(long)]
    pub half_width: Option<f64>,
}

/// Default half width: `max(5Γ′, 5κ_M, 3g_M)`.
fn default_half(eff: &EffectiveCouplings) -> f64 {
    (5.0 * eff.gamma_prime)
        .max(5.0 * eff.kappa_m)
        .max(3.0 * eff.g_m)
}

pub fn transmission(ctx: &mut Ctx, args: &TransmissionArgs) -> Result<Value> {
    let panels: Vec<ReducedParams> = if args.grid {
        transmission_grid()
            .into_iter()
            .map(|(beta, cmp)| ReducedParams {
                beta,
                cmp,
                ..ctx.params
            })
            .collect()
    } else {
        vec![ctx.params]
    };
    let mut headers = vec!["beta", "cmp", "omega", "omega_over_gamma_prime"];
    if ctx.lab_frame {
        headers.push("omega_lab");
    }
    headers.push("t_inf");
    let mut table = Table::new(&headers);
    let mut plot = LinePlot {
        title: "Ideal transmission".into(),
        x_label: "detuning / broadened linewidth".into(),
        y_label: "T_inf".into(),
        ..Default::default()
    };
    let mut summaries = Vec::new();
    for r in &panels {
        let eff = r.effective()?;
        let half = args
            .half_width
            .map_or_else(|| default_half(&eff), |h| h * eff.gamma_prime);
        let grid = symmetric_grid(half, args.points);
        let s = transmission_spectrum(r, &eff, &grid);
        for (&w, &t) in s.omega.iter().zip(&s.values) {
            let mut row: Vec<Cell> = vec![
                r.beta.into(),
                r.cmp.into(),
                w.into(),
                (w / eff.gamma_prime).into(),
            ];
            if ctx.lab_frame {
                row.push((w + eff.omega).into());
            }
            row.push(t.into());
            table.push(row);
        }
        let (imax, tmax) = s.argmax().unwrap_or((0, f64::NAN));
        let peaks = optimal_detunings(r, &eff);
        summaries.push(json!({
            "beta": r.beta,
            "cmp": r.cmp,
            "gamma_prime": eff.gamma_prime,
            "kappa_m": eff.kappa_m,
            "max_t_inf": tmax,
            "argmax_omega": s.omega.get(imax),
            "optimal_detunings": peaks,
            "optimal_detunings_over_gamma_prime":
                peaks.iter().map(|p| p / eff.gamma_prime).collect::<Vec<_>>(),
        }));
        plot.series.push(Series::new(
            format!("beta={} cmp={}", r.beta, r.cmp),
            s.omega
                .iter()
                .zip(&s.values)
                .map(|(w, t)| (w / eff.gamma_prime, *t))
                .collect(),
        ));
    }
    ctx.sink.csv("", &table)?;
    ctx.sink.svg("", &plot.render())?;
    Ok(json!({ "panels": summaries }))
}

#[derive(Debug, Clone, Args)]
pub struct NoiseSweepArgs {
    #[arg(long, default_value_t = 61)]
    pub points: usize,
    /// Smallest C_L/n̄ in the sweep.
    #[arg(long, default_value_t = 0.1)]
    pub ratio_min: f64,
    #[arg(long, default_value_t = 1e4)]
    pub ratio_max: f64,
}

pub fn noise_sweep(ctx: &mut Ctx, args: &NoiseSweepArgs) -> Result<Value> {
    let base = ctx.params;
    if base.nbar <= 0.0 {
        return Err(CliError::Usage(
            "noise-sweep scans C_L/nbar and needs nbar > 0".into(),
        ));
    }
    let mut table = Table::new(&[
        "cl_over_nbar",
        "cl",
        "t_ac",
        "v_opt",
        "v_mech",
        "v_mw",
        "v_det",
        "v_total",
        "vacuum_ratio",
        "w_t",
    ]);
    let names = ["v_opt", "v_mech", "v_mw", "v_det", "v_total"];
    let mut curves: Vec<Vec<(f64, f64)>> = vec![Vec::new(); names.len()];
    for ratio in log_space(args.ratio_min, args.ratio_max, args.points) {
        let r = ReducedParams {
            cl: ratio * base.nbar,
            ..base
        };
        let b = matched_budget(&r)?;
        let w = budget_witness(&b).w_t;
        table.push(vec![
            ratio.into(),
            r.cl.into(),
            b.t_ac.into(),
            b.v_opt.into(),
            b.v_mech.into(),
            b.v_mw.into(),
            b.v_det.into(),
            b.v_total.into(),
            b.vacuum_ratio().into(),
            w.into(),
        ]);
        for (c, v) in curves
            .iter_mut()
            .zip([b.v_opt, b.v_mech, b.v_mw, b.v_det, b.v_total])
        {
            c.push((ratio, v));
        }
    }
    let b = matched_budget(&base)?;
    let witness = budget_witness(&b);
    ctx.sink.csv("", &table)?;
    let plot = LinePlot {
        title: "Added noise at matched transfer".into(),
        x_label: "C_L / nbar".into(),
        y_label: "variance (vacuum = 1/2)".into(),
        log_x: true,
        log_y: true,
        series: names
            .iter()
            .zip(curves)
            .map(|(n, c)| Series::new(*n, c))
            .collect(),
        hlines: vec![(0.5, "vacuum".into())],
        ..Default::default()
    };
    ctx.sink.svg("", &plot.render())?;
    Ok(json!({
        "cl_over_nbar": base.cl / base.nbar,
        "budget": b,
        "v_add": b.v_total,
        "t_ac": b.t_ac,
        "vacuum_ratio": b.vacuum_ratio(),
        "witness": witness,
    }))
}

#[derive(Debug, Clone, Args)]
pub struct TvArgs {
    /// Evenly spaced samples per loss axis (10% ticks are always added).
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
}

fn axis_range(axis: LossAxis) -> (f64, f64) {
    match axis {
        LossAxis::EtaL => (ETA_L_FLOOR, 1.0),
        LossAxis::EtaM => (0.0, 1.0),
        LossAxis::EtaD => (1e-6, 1.0),
    }
}

fn thresholds(base: &ReducedParams, axis: LossAxis) -> Result<Value> {
    let (lo, hi) = axis_range(axis);
    let w = loss_threshold(base, axis, Metric::Witness, 1.0, lo, hi)?;
    let v = loss_threshold(base, axis, Metric::AddedNoise, 0.5, lo, hi)?;
    Ok(json!({ "witness_one": w, "vacuum_noise": v }))
}

fn marker(name: &str) -> Result<Value> {
    let r = reduced_preset(name)?;
    let b = matched_budget(&r)?;
    Ok(json!({ "preset": name, "t_ac": b.t_ac, "v_add": b.v_total, "w_t": budget_witness(&b).w_t }))
}

pub fn tv_diagram(ctx: &mut Ctx, args: &TvArgs) -> Result<Value> {
    let base = ctx.params;
    let mut table = Table::new(&["axis", "loss_value", "T_ac", "V_add", "W_T", "tick"]);
    let mut plot = LinePlot {
        title: "Transmission versus added noise".into(),
        x_label: "T_ac".into(),
        y_label: "V_add".into(),
        // Heisenberg-forbidden region V < (1 - T)/2.
        shade: Some(vec![(0.0, 0.0), (0.0, 0.5), (1.0, 0.0)]),
        hlines: vec![(0.5, "vacuum".into())],
        ..Default::default()
    };
    let mut found = serde_json::Map::new();
    for axis in [LossAxis::EtaL, LossAxis::EtaM, LossAxis::EtaD] {
        let pts = tv_trace(&base, axis, args.samples);
        let mut curve = Vec::new();
        for p in &pts {
            table.push(vec![
                axis.name().into(),
                p.loss_value.into(),
                p.t_ac.into(),
                p.v_add.into(),
                p.w_t.into(),
                p.tick.into(),
            ]);
            if let (Some(t), Some(v)) = (p.t_ac, p.v_add) {
                curve.push((t, v));
            }
        }
        plot.series.push(Series::new(axis.name(), curve));
        found.insert(axis.name().into(), thresholds(&base, axis)?);
    }
    // Witness = 1 boundary for symmetric transfer: V = (1 + T)/2.
    plot.series.push(
        Series::new(
            "W_T = 1",
            lin_space(0.0, 1.0, 11)
                .into_iter()
                .map(|t| (t, (1.0 + t) / 2.0))
                .collect(),
        )
        .dashed(),
    );
    ctx.sink.csv("", &table)?;
    ctx.sink.svg("", &plot.render())?;
    Ok(json!({
        "thresholds": found,
        "markers": [marker("gold_square")?, marker("gold_star")?],
    }))
}

#[derive(Debug, Clone, Args)]
pub struct WitnessMapArgs {
    /// Samples per efficiency axis.
    #[arg(long, default_value_t = 46)]
    pub points: usize,
    #[arg(long, default_value_t = 0.55)]
    pub eta_l_min: f64,
}

pub fn witness_map(ctx: &mut Ctx, args: &WitnessMapArgs) -> Result<Value> {
    if args.eta_l_min <= 0.5 {
        return Err(CliError::Usage(
            "--eta-l-min must stay above the critical coupling at 1/2".into(),
        ));
    }
    let base = ctx.params;
    let eta_ls = lin_space(args.eta_l_min, 1.0, args.points);
    let eta_ms = lin_space(0.0, 1.0, args.points);
    let mut table = Table::new(&["eta_l", "eta_m", "t_ac", "v_add", "w_t"]);
    let mut values = Vec::with_capacity(eta_ls.len() * eta_ms.len());
    for &em in &eta_ms {
        for &el in &eta_ls {
            let r = ReducedParams {
                eta_l: el,
                eta_m: em,
                ..base
            };
            let b = matched_budget(&r)?;
            let w = budget_witness(&b).w_t;
            table.push(vec![
                el.into(),
                em.into(),
                b.t_ac.into(),
                b.v_total.into(),
                w.into(),
            ]);
            values.push(w);
        }
    }
    let mut boundary = Vec::new();
    for &em in &eta_ms {
        let r = ReducedParams { eta_m: em, ..base };
        let t = loss_threshold(&r, LossAxis::EtaL, Metric::Witness, 1.0, ETA_L_FLOOR, 1.0)?;
        boundary.push(json!({ "eta_m": em, "eta_l_threshold": t }));
    }
    ctx.sink.csv("", &table)?;
    let map = Heatmap {
        title: format!("Transfer witness, eta_d = {}", base.eta_d),
        x_label: "eta_L".into(),
        y_label: "eta_M".into(),
        x: (args.eta_l_min, 1.0),
        y: (0.0, 1.0),
        nx: eta_ls.len(),
        ny: eta_ms.len(),
        values,
        diverging: false,
        contour: Some(1.0),
    };
    ctx.sink.svg("", &map.render())?;
    Ok(json!({ "witness_boundary": boundary }))
}
