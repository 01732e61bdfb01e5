//! Fidelity and Wigner-negativity sweeps with optional output-state insets.

use clap::{Args, ValueEnum};
use fbtransducer::noise::matched_budget;
use fbtransducer::wigner::{
    fidelity, negativity, propagate_state, GridSpec, StateSpec, WignerGrid,
};
use fbtransducer::{bisect, ReducedParams};
use serde_json::{json, Value};

use super::{lin_space, log_space, Ctx};
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};
use crate::svg::{Heatmap, LinePlot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepAxis {
    /// Cooperativity ratio C_L/n̄ on a log scale.
    Ratio,
    /// Homodyne detection efficiency.
    EtaD,
}

impl SweepAxis {
    fn column(self) -> &'static str {
        match self {
            SweepAxis::Ratio => "cl_over_nbar",
            SweepAxis::EtaD => "eta_d",
        }
    }

    fn apply(self, base: &ReducedParams, x: f64) -> ReducedParams {
        match self {
            SweepAxis::Ratio => ReducedParams {
                cl: x * base.nbar,
                ..*base
            },
            SweepAxis::EtaD => ReducedParams { eta_d: x, ..*base },
        }
    }

    fn values(self, min: Option<f64>, max: Option<f64>, n: usize) -> Vec<f64> {
        match self {
            SweepAxis::Ratio => log_space(min.unwrap_or(0.1), max.unwrap_or(100.0), n),
            SweepAxis::EtaD => lin_space(min.unwrap_or(0.05), max.unwrap_or(1.0), n),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct StateSweepArgs {
    /// Comma-separated input states: fock:N, cat:A, cat:A:odd, cat:RE:IM:PARITY.
    #[arg(long, default_value = "fock:0,fock:1,fock:2,cat:2")]
    pub states: String,
    #[arg(long, value_enum, default_value_t = SweepAxis::Ratio)]
    pub sweep: SweepAxis,
    #[arg(long, default_value_t = 25)]
    pub points: usize,
    #[arg(long)]
    pub min: Option<f64>,
    #[arg(long)]
    pub max: Option<f64>,
    /// Grid points per phase-space axis.
    #[arg(long, default_value_t = 512)]
    pub grid_n: usize,
    /// Half width of the phase-space grid.
    #[arg(long, default_value_t = 8.0)]
    pub extent: f64,
    /// Sweep values at which to dump output Wigner grids.
    #[arg(long, value_delimiter = ',')]
    pub inset: Vec<f64>,
    /// Keep every k-th grid point in inset dumps.
    #[arg(long, default_value_t = 4)]
    pub inset_stride: usize,
}

fn parse_states(s: &str) -> Result<Vec<StateSpec>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<StateSpec>().map_err(CliError::Usage))
        .collect()
}

/// Channel `(gain, added variance)` at matched transfer.
fn channel(r: &ReducedParams) -> Result<(f64, f64, f64)> {
    let b = matched_budget(r)?;
    Ok((b.t_ac.sqrt(), b.v_total, b.t_ac))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Figure {
    Fidelity,
    Negativity,
}

struct Prepared {
    state: StateSpec,
    input: WignerGrid,
    pure_negativity: f64,
}

impl Prepared {
    /// Output grid and matching input for one channel.
    fn propagate(&self, spec: GridSpec, g: f64, v: f64) -> Result<(WignerGrid, WignerGrid)> {
        let spec = adapted_grid(spec, &self.state, g, v);
        let input = if spec == self.input.spec() {
            self.input.clone()
        } else {
            self.state.grid(spec)?
        };
        Ok((input, propagate_state(&self.state, g, v, spec)?))
    }
}

/// Widens the grid when the output would spill past it. Point density is
/// kept up to twice the requested count, then the spacing grows.
fn adapted_grid(spec: GridSpec, state: &StateSpec, g: f64, v: f64) -> GridSpec {
    let photons = match *state {
        StateSpec::Fock { n } => n as f64,
        StateSpec::Cat { alpha, .. } => alpha.norm_sqr(),
    };
    let need = g * (2.0 * photons + 1.0).sqrt() + 6.0 * (v + g * g / 2.0).sqrt();
    if need <= spec.extent_x {
        return spec;
    }
    let n = ((spec.nx as f64 * need / spec.extent_x).ceil() as usize).min(2 * spec.nx);
    GridSpec::square(need, n + n % 2)
}

pub fn fidelity_sweep(ctx: &mut Ctx, args: &StateSweepArgs) -> Result<Value> {
    sweep(ctx, args, Figure::Fidelity)
}

pub fn negativity_sweep(ctx: &mut Ctx, args: &StateSweepArgs) -> Result<Value> {
    sweep(ctx, args, Figure::Negativity)
}

fn sweep(ctx: &mut Ctx, args: &StateSweepArgs, fig: Figure) -> Result<Value> {
    let spec = GridSpec::square(args.extent, args.grid_n);
    let states = parse_states(&args.states)?;
    if states.is_empty() {
        return Err(CliError::Usage("no input states given".into()));
    }
    let prepared: Vec<Prepared> = states
        .iter()
        .map(|s| {
            let input = s.grid(spec)?;
            let pure_negativity = negativity(&input);
            Ok(Prepared {
                state: *s,
                input,
                pure_negativity,
            })
        })
        .collect::<Result<_>>()?;
    let base = ctx.params;
    let col = args.sweep.column();
    let metric = match fig {
        Figure::Fidelity => "fidelity",
        Figure::Negativity => "negativity",
    };
    let mut table = Table::new(&[
        col,
        "state",
        "t_ac",
        "v_add",
        metric,
        "negativity_pure",
        "negativity_ratio",
    ]);
    let mut curves: Vec<Vec<(f64, f64)>> = vec![Vec::new(); prepared.len()];
    for x in args.sweep.values(args.min, args.max, args.points) {
        let r = args.sweep.apply(&base, x);
        let (g, v, t) = channel(&r)?;
        for (k, p) in prepared.iter().enumerate() {
            let (input, out) = p.propagate(spec, g, v)?;
            let n = negativity(&out);
            let ratio = (p.pure_negativity > 0.0).then(|| n / p.pure_negativity);
            let value = match fig {
                Figure::Fidelity => fidelity(&input, &out)?,
                Figure::Negativity => n,
            };
            table.push(vec![
                x.into(),
                p.state.label().into(),
                t.into(),
                v.into(),
                value.into(),
                p.pure_negativity.into(),
                Cell::from(ratio),
            ]);
            let plotted = match fig {
                Figure::Fidelity => Some(value),
                Figure::Negativity => ratio,
            };
            if let Some(y) = plotted {
                curves[k].push((x, y));
            }
        }
    }
    ctx.sink.csv("", &table)?;
    let (title, y_label, hlines) = match fig {
        Figure::Fidelity => (
            "Transfer fidelity",
            "F",
            vec![
                (0.5, "classical 1/2".to_string()),
                (2.0 / 3.0, "no-cloning 2/3".to_string()),
            ],
        ),
        Figure::Negativity => ("Output negativity", "N / N_pure", Vec::new()),
    };
    let plot = LinePlot {
        title: title.into(),
        x_label: col.into(),
        y_label: y_label.into(),
        log_x: args.sweep == SweepAxis::Ratio,
        series: prepared
            .iter()
            .zip(curves)
            .filter(|(_, c)| !c.is_empty())
            .map(|(p, c)| Series::new(p.state.label(), c))
            .collect(),
        hlines,
        ..Default::default()
    };
    ctx.sink.svg("", &plot.render())?;

    let mut at_base = Vec::new();
    let (g, v, t) = channel(&base)?;
    for p in &prepared {
        let (input, out) = p.propagate(spec, g, v)?;
        let n = negativity(&out);
        at_base.push(json!({
            "state": p.state,
            "label": p.state.label(),
            "fidelity": fidelity(&input, &out)?,
            "negativity": n,
            "negativity_pure": p.pure_negativity,
            "negativity_ratio": (p.pure_negativity > 0.0).then(|| n / p.pure_negativity),
        }));
    }
    for &x in &args.inset {
        let r = args.sweep.apply(&base, x);
        let (g, v, _) = channel(&r)?;
        for p in &prepared {
            let (_, out) = p.propagate(spec, g, v)?;
            let tag = format!("inset_{}_{}", fmt_tag(x), p.state.label());
            write_inset(ctx, &tag, &out, args.inset_stride.max(1))?;
        }
    }
    let mut report = json!({
        "grid": { "extent": args.extent, "n": args.grid_n },
        "sweep": col,
        "at_base": { "t_ac": t, "v_add": v, "states": at_base },
    });
    if fig == Figure::Fidelity {
        report["vacuum_crossings"] = vacuum_crossings(&base, args.sweep)?;
    }
    Ok(report)
}

fn fmt_tag(x: f64) -> String {
    format!("{x}").replace(['.', '-'], "p")
}

fn write_inset(ctx: &mut Ctx, tag: &str, w: &WignerGrid, stride: usize) -> Result<()> {
    let spec = w.spec();
    let is: Vec<usize> = (0..spec.nx).step_by(stride).collect();
    let js: Vec<usize> = (0..spec.ny).step_by(stride).collect();
    let mut table = Table::new(&["x", "y", "w"]);
    let mut values = Vec::with_capacity(is.len() * js.len());
    for &j in &js {
        for &i in &is {
            let v = w.at(i, j);
            table.push(vec![spec.x(i).into(), spec.y(j).into(), v.into()]);
            values.push(v);
        }
    }
    ctx.sink.csv(tag, &table)?;
    let map = Heatmap {
        title: tag.to_string(),
        x_label: "X".into(),
        y_label: "Y".into(),
        x: (spec.x(is[0]), spec.x(*is.last().unwrap_or(&0))),
        y: (spec.y(js[0]), spec.y(*js.last().unwrap_or(&0))),
        nx: is.len(),
        ny: js.len(),
        values,
        diverging: true,
        contour: Some(0.0),
    };
    ctx.sink.svg(tag, &map.render())
}

/// Vacuum fidelity through a gain-g, added-variance-v channel is
/// `1/(1/2 + g²/2 + v)`; locate where it reaches 1/2 and 2/3.
fn vacuum_crossings(base: &ReducedParams, axis: SweepAxis) -> Result<Value> {
    let f = |x: f64| -> fbtransducer::Result<f64> {
        let b = matched_budget(&axis.apply(base, x))?;
        Ok(1.0 / (0.5 + b.t_ac / 2.0 + b.v_total))
    };
    let (lo, hi): (f64, f64) = match axis {
        SweepAxis::Ratio => (1e-4, 1e6),
        SweepAxis::EtaD => (1e-6, 1.0),
    };
    let mut out = serde_json::Map::new();
    for (name, level) in [("f_half", 0.5), ("f_two_thirds", 2.0 / 3.0)] {
        let x = if axis == SweepAxis::Ratio {
            // Bisect in log space so the tolerance is relative.
            bisect(|u: f64| Ok(f(u.exp())? - level), lo.ln(), hi.ln(), 1e-12)?.map(f64::exp)
        } else {
            bisect(|u| Ok(f(u)? - level), lo, hi, 1e-12)?
        };
        out.insert(name.into(), json!(x));
    }
    Ok(Value::Object(out))
}
