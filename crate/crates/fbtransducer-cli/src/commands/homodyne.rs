//! In-loop photocurrent: light gains, vacuum spectra and pulsed inputs.

use clap::Args;
use fbtransducer::homodyne::{
    light_gains, photocurrent_spectrum_pulse, vacuum_spectrum, PulseSpec,
};
use fbtransducer::spectrum::symmetric_grid;
use fbtransducer::ReducedParams;
use serde_json::{json, Value};

use super::Ctx;
use crate::error::Result;
use crate::output::{Cell, Table};
use crate::svg::{LinePlot, Series};

#[derive(Debug, Clone, Args)]
pub struct GainsArgs {
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    /// Half width of the grid in units of the broadened linewidth.
    #[arg(long, default_value_t = 5.0)]
    pub half_width: f64,
    /// Overlay several optomechanical cooperativities.
    #[arg(long, value_delimiter = ',')]
    pub cl_values: Vec<f64>,
}

fn frame_headers(ctx: &Ctx, first: &str, rest: &[&'static str]) -> Table {
    let mut h = vec![first, "omega", "omega_over_gamma_prime"];
    if ctx.lab_frame {
        h.push("omega_lab");
    }
    h.extend_from_slice(rest);
    Table::new(&h)
}

fn frame_cells(ctx: &Ctx, tag: f64, w: f64, gamma_prime: f64, omega: f64) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![tag.into(), w.into(), (w / gamma_prime).into()];
    if ctx.lab_frame {
        row.push((w + omega).into());
    }
    row
}

pub fn gains(ctx: &mut Ctx, args: &GainsArgs) -> Result<Value> {
    let cls = if args.cl_values.is_empty() {
        vec![ctx.params.cl]
    } else {
        args.cl_values.clone()
    };
    let mut table = frame_headers(ctx, "cl", &["T_aa", "T_ba", "T_ca", "sum"]);
    let mut summaries = Vec::new();
    let mut plot = LinePlot {
        title: "Input-to-photocurrent gains".into(),
        x_label: "detuning / broadened linewidth".into(),
        y_label: "transmission".into(),
        ..Default::default()
    };
    for cl in cls {
        let r = ReducedParams { cl, ..ctx.params };
        let eff = r.effective()?;
        let grid = symmetric_grid(args.half_width * eff.gamma_prime, args.points);
        let mut curves: [Vec<(f64, f64)>; 3] = Default::default();
        let mut worst: f64 = 0.0;
        for &w in &grid {
            let g = light_gains(&r, &eff, w);
            let t = [g.t_aa.norm_sqr(), g.t_ba.norm_sqr(), g.t_ca.norm_sqr()];
            let sum = g.sum();
            worst = worst.max((sum - 1.0).abs());
            let mut row = frame_cells(ctx, cl, w, eff.gamma_prime, eff.omega);
            row.extend([t[0].into(), t[1].into(), t[2].into(), sum.into()]);
            table.push(row);
            for (c, v) in curves.iter_mut().zip(t) {
                c.push((w / eff.gamma_prime, v));
            }
        }
        let at0 = light_gains(&r, &eff, 0.0);
        summaries.push(json!({
            "cl": cl,
            "gamma_prime": eff.gamma_prime,
            "at_sideband": {
                "T_aa": at0.t_aa.norm_sqr(),
                "T_ba": at0.t_ba.norm_sqr(),
                "T_ca": at0.t_ca.norm_sqr(),
            },
            "max_sum_rule_residual": worst,
        }));
        for (name, c) in ["T_aa", "T_ba", "T_ca"].into_iter().zip(curves) {
            plot.series.push(Series::new(format!("{name} C_L={cl}"), c));
        }
    }
    ctx.sink.csv("", &table)?;
    ctx.sink.svg("", &plot.render())?;
    Ok(json!({ "panels": summaries }))
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Feedback gains to evaluate.
    #[arg(long = "h-values", value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0])]
    pub h_values: Vec<f64>,
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    /// Half width of the grid in units of the broadened linewidth.
    #[arg(long, default_value_t = 5.0)]
    pub half_width: f64,
    /// Quadrature second moment of an input pulse; adds a pulsed spectrum.
    #[arg(long)]
    pub b_var: Option<f64>,
    /// Pulse centre detuning in units of the broadened linewidth.
    #[arg(long, default_value_t = 0.0)]
    pub pulse_omega: f64,
    /// Pulse envelope FWHM in units of the broadened linewidth.
    #[arg(long, default_value_t = 0.1)]
    pub pulse_fwhm: f64,
}

pub fn spectrum(ctx: &mut Ctx, args: &SpectrumArgs) -> Result<Value> {
    let mut table = frame_headers(ctx, "h", &["optical", "mechanical", "microwave", "total"]);
    let mut summaries = Vec::new();
    for &h in &args.h_values {
        let r = ReducedParams {
            h_gain: h,
            ..ctx.params
        };
        let eff = r.effective()?;
        let grid = symmetric_grid(args.half_width * eff.gamma_prime, args.points);
        let s = vacuum_spectrum(&r, &eff, &grid)?;
        for (k, &w) in grid.iter().enumerate() {
            let mut row = frame_cells(ctx, h, w, eff.gamma_prime, eff.omega);
            row.extend([
                s.optical.values[k].into(),
                s.mechanical.values[k].into(),
                s.microwave.values[k].into(),
                s.total.values[k].into(),
            ]);
            table.push(row);
        }
        let (imin, vmin) =
            s.total
                .values
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |a, (i, &v)| if v < a.1 { (i, v) } else { a },
                );
        summaries.push(json!({
            "h": h,
            "gamma_prime": eff.gamma_prime,
            "min_total": vmin,
            "argmin_omega": grid[imin],
            "max_total": s.total.max(),
            "squashing": vmin < 0.5,
            "edge_total": s.total.values.last(),
        }));
        let scaled = |v: &[f64]| -> Vec<(f64, f64)> {
            grid.iter()
                .zip(v)
                .map(|(w, y)| (w / eff.gamma_prime, *y))
                .collect()
        };
        let plot = LinePlot {
            title: format!("Photocurrent spectrum, h = {h}"),
            x_label: "detuning / broadened linewidth".into(),
            y_label: "spectral density (shot noise = 1/2)".into(),
            series: vec![
                Series::new("optical", scaled(&s.optical.values)),
                Series::new("mechanical", scaled(&s.mechanical.values)),
                Series::new("microwave", scaled(&s.microwave.values)),
            ],
            hlines: vec![(0.5, "shot noise".into())],
            stacked: true,
            ..Default::default()
        };
        ctx.sink.svg(&format!("h{}", h), &plot.render())?;
    }
    ctx.sink.csv("", &table)?;
    let mut report = json!({ "panels": summaries });
    if let Some(bvar) = args.b_var {
        report["pulse"] = pulse(ctx, args, bvar)?;
    }
    Ok(report)
}

fn pulse(ctx: &mut Ctx, args: &SpectrumArgs, bvar: f64) -> Result<Value> {
    let r = ctx.params;
    let eff = r.effective()?;
    let p = PulseSpec::rectangular(
        args.pulse_omega * eff.gamma_prime,
        bvar,
        args.pulse_fwhm * eff.gamma_prime,
    );
    let grid = symmetric_grid(args.half_width * eff.gamma_prime, args.points);
    let s = photocurrent_spectrum_pulse(&r, &eff, &grid, &p);
    let mut table = frame_headers(ctx, "b_var", &["envelope", "photocurrent"]);
    for (&w, &v) in s.omega.iter().zip(&s.values) {
        let mut row = frame_cells(ctx, bvar, w, eff.gamma_prime, eff.omega);
        row.extend([p.envelope(&eff, w).into(), v.into()]);
        table.push(row);
    }
    ctx.sink.csv("pulse", &table)?;
    let plot = LinePlot {
        title: "Photocurrent with a pulsed input".into(),
        x_label: "detuning / broadened linewidth".into(),
        y_label: "spectral density".into(),
        series: vec![Series::new(
            "photocurrent",
            s.omega
                .iter()
                .zip(&s.values)
                .map(|(w, v)| (w / eff.gamma_prime, *v))
                .collect(),
        )],
        hlines: vec![(0.5, "shot noise".into())],
        ..Default::default()
    };
    ctx.sink.svg("pulse", &plot.render())?;
    Ok(json!({
        "spec": p,
        "narrowband": p.is_narrowband(&eff),
        "t_aa_at_pulse": light_gains(&r, &eff, p.omega_p).t_aa.norm_sqr(),
    }))
}
