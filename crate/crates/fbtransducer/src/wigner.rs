//! Wigner functions on a square phase-space grid.
//!
//! Quadratures follow `X = (a + a†)/√2`, so the vacuum has per-axis variance
//! 1/2 and peak value 1/π. A coherent amplitude `α` sits at `√2 α`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};
use std::str::FromStr;

use crate::error::{ModelError, Result};

/// Tolerance on the trapezoid normalization of every grid.
pub const NORM_TOL: f64 = 1e-4;
/// Largest Fock number accepted; the Laguerre recurrence is well inside its
/// stable range up to here on the default grid.
pub const MAX_FOCK: u32 = 20;
/// Largest cat amplitude accepted.
pub const MAX_CAT_ALPHA: f64 = 6.0;
/// Negative volume below this is reported as zero.
pub const NEGATIVITY_FLOOR: f64 = 1e-6;

/// Sampling of a grid: `nx × ny` points spanning `[-extent, extent]` on each
/// axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub extent_x: f64,
    pub extent_y: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(extent: f64, n: usize) -> Self {
        Self {
            extent_x: extent,
            extent_y: extent,
            nx: n,
            ny: n,
        }
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.extent_x / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.extent_y / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.extent_x + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.extent_y + j as f64 * self.dy()
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 3 || self.ny < 3 || !(self.extent_x > 0.0) || !(self.extent_y > 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "grid",
                value: self.nx.min(self.ny) as f64,
                reason: "needs at least 3 points per axis and positive extents",
            });
        }
        Ok(())
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::square(8.0, 512)
    }
}

/// Sampled Wigner function. `values` is row-major with `y` as the row index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub extent_x: f64,
    pub extent_y: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    pub convention: String,
}

impl WignerGrid {
    pub fn spec(&self) -> GridSpec {
        GridSpec {
            extent_x: self.extent_x,
            extent_y: self.extent_y,
            nx: self.nx,
            ny: self.ny,
        }
    }

    /// Sample `f(x, y)` on the grid without any normalization check.
    pub fn sample<F>(spec: GridSpec, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let mut values = vec![0.0; spec.nx * spec.ny];
        values
            .par_chunks_mut(spec.nx)
            .enumerate()
            .for_each(|(j, row)| {
                let y = spec.y(j);
                for (i, v) in row.iter_mut().enumerate() {
                    *v = f(spec.x(i), y);
                }
            });
        Self {
            extent_x: spec.extent_x,
            extent_y: spec.extent_y,
            nx: spec.nx,
            ny: spec.ny,
            values,
            convention: "sqrt2".into(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Trapezoid integral of `f(W)` over the grid.
    pub fn integrate_with<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let s = self.spec();
        let mut total = 0.0;
        for j in 0..self.ny {
            let wy = if j == 0 || j == self.ny - 1 { 0.5 } else { 1.0 };
            let row = &self.values[j * self.nx..(j + 1) * self.nx];
            let mut acc = 0.0;
            for (i, &v) in row.iter().enumerate() {
                let wx = if i == 0 || i == self.nx - 1 { 0.5 } else { 1.0 };
                acc += wx * f(v);
            }
            total += wy * acc;
        }
        total * s.dx() * s.dy()
    }

    pub fn norm(&self) -> f64 {
        self.integrate_with(|v| v)
    }

    fn checked(self, what: &str) -> Result<Self> {
        let n = self.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(ModelError::GridTooCoarse(format!(
                "{what}: grid integral {n:.6} differs from 1 by more than {NORM_TOL:e}"
            )));
        }
        Ok(self)
    }

    /// Bilinear interpolation; zero outside the grid.
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let s = self.spec();
        let fx = (x + s.extent_x) / s.dx();
        let fy = (y + s.extent_y) / s.dy();
        if !(fx >= 0.0 && fy >= 0.0) || fx > (s.nx - 1) as f64 || fy > (s.ny - 1) as f64 {
            return 0.0;
        }
        let i = (fx.floor() as usize).min(s.nx - 2);
        let j = (fy.floor() as usize).min(s.ny - 2);
        let (u, v) = (fx - i as f64, fy - j as f64);
        (1.0 - u) * (1.0 - v) * self.at(i, j)
            + u * (1.0 - v) * self.at(i + 1, j)
            + (1.0 - u) * v * self.at(i, j + 1)
            + u * v * self.at(i + 1, j + 1)
    }
}

/// Parity of a cat superposition `|α⟩ ± |−α⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

/// Analytic input states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Fock { n: u32 },
    Cat { alpha: Complex64, parity: Parity },
}

impl StateSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StateSpec::Fock { n } if n > MAX_FOCK => Err(ModelError::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "Fock number above 20",
            }),
            StateSpec::Cat { alpha, .. } if !(alpha.norm() <= MAX_CAT_ALPHA) => {
                Err(ModelError::InvalidParameter {
                    name: "alpha",
                    value: alpha.norm(),
                    reason: "cat amplitude above 6",
                })
            }
            _ => Ok(()),
        }
    }

    /// Wigner function at `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            StateSpec::Fock { n } => fock_value(n, x, y),
            StateSpec::Cat { alpha, parity } => cat_value(alpha, parity, x, y),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            StateSpec::Fock { n } => format!("fock{n}"),
            StateSpec::Cat { alpha, parity } => {
                let p = if parity == Parity::Even {
                    "even"
                } else {
                    "odd"
                };
                if alpha.im == 0.0 {
                    format!("cat_{p}_{}", alpha.re)
                } else {
                    format!("cat_{p}_{}_{}", alpha.re, alpha.im)
                }
            }
        }
    }

    /// Sample on a grid and check normalization.
    pub fn grid(&self, spec: GridSpec) -> Result<WignerGrid> {
        self.validate()?;
        spec.validate()?;
        let s = *self;
        WignerGrid::sample(spec, move |x, y| s.eval(x, y)).checked(&s.label())
    }
}

/// Parses `fock:N`, `cat:A` (even), `cat:A:odd` or `cat:RE:IM:PARITY`.
impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t}: {e}"));
        let parity = |t: &str| match t {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(format!("unknown parity {t}")),
        };
        match parts.as_slice() {
            ["fock", n] => Ok(StateSpec::Fock {
                n: n.parse().map_err(|e| format!("{n}: {e}"))?,
            }),
            ["cat", a] => Ok(StateSpec::Cat {
                alpha: Complex64::new(num(a)?, 0.0),
                parity: Parity::Even,
            }),
            ["cat", a, p] => Ok(StateSpec::Cat {
                alpha: Complex64::new(num(a)?, 0.0),
                parity: parity(p)?,
            }),
            ["cat", re, im, p] => Ok(StateSpec::Cat {
                alpha: Complex64::new(num(re)?, num(im)?),
                parity: parity(p)?,
            }),
            _ => Err(format!("cannot parse state '{s}'")),
        }
    }
}

/// Laguerre polynomial `L_n(x)` by the three-term recurrence.
pub fn laguerre(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn fock_value(n: u32, x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign / PI * (-r2).exp() * laguerre(n, 2.0 * r2)
}

fn cat_value(alpha: Complex64, parity: Parity, x: f64, y: f64) -> f64 {
    let (ax, ay) = (SQRT_2 * alpha.re, SQRT_2 * alpha.im);
    let plus = (-((x - ax).powi(2) + (y - ay).powi(2))).exp();
    let minus = (-((x + ax).powi(2) + (y + ay).powi(2))).exp();
    let fringe = (-(x * x + y * y)).exp() * (2.0 * SQRT_2 * (x * alpha.im - y * alpha.re)).cos();
    let overlap = -2.0 * alpha.norm_sqr();
    let (num, den) = match parity {
        Parity::Even => (0.5 * (plus + minus) + fringe, 1.0 + overlap.exp()),
        Parity::Odd => (0.5 * (plus + minus) - fringe, -overlap.exp_m1()),
    };
    num / (PI * den)
}

/// Fock state `|n⟩`.
pub fn wigner_fock(n: u32, spec: GridSpec) -> Result<WignerGrid> {
    StateSpec::Fock { n }.grid(spec)
}

/// Cat state proportional to `|α⟩ ± |−α⟩`.
pub fn wigner_cat(alpha: Complex64, parity: Parity, spec: GridSpec) -> Result<WignerGrid> {
    StateSpec::Cat { alpha, parity }.grid(spec)
}

/// Isotropic Gaussian with per-axis variance `v`, centred at the origin.
pub fn gaussian(v: f64, spec: GridSpec) -> Result<WignerGrid> {
    spec.validate()?;
    WignerGrid::sample(spec, move |x, y| {
        (-(x * x + y * y) / (2.0 * v)).exp() / (2.0 * PI * v)
    })
    .checked("gaussian")
}

fn check_channel(gain: f64, v_add: f64) -> Result<()> {
    if !(gain >= 0.0 && gain.is_finite()) {
        return Err(ModelError::InvalidParameter {
            name: "gain",
            value: gain,
            reason: "must be finite and nonnegative",
        });
    }
    if !(v_add >= 0.0 && v_add.is_finite()) {
        return Err(ModelError::InvalidParameter {
            name: "v_add",
            value: v_add,
            reason: "must be finite and nonnegative",
        });
    }
    if gain == 0.0 && v_add == 0.0 {
        return Err(ModelError::InvalidParameter {
            name: "gain",
            value: gain,
            reason: "zero gain with zero noise leaves a point mass",
        });
    }
    Ok(())
}

fn kernel(v: f64, step: f64, n: usize) -> Vec<f64> {
    let sigma = v.sqrt();
    let half = ((8.0 * sigma / step).ceil() as usize).min(n - 1);
    let mut k: Vec<f64> = (0..=half)
        .map(|m| (-(m as f64 * step).powi(2) / (2.0 * v)).exp())
        .collect();
    let total: f64 = k[0] + 2.0 * k[1..].iter().sum::<f64>();
    k.iter_mut().for_each(|w| *w /= total);
    k
}

fn blur_rows(values: &mut [f64], nx: usize, k: &[f64]) {
    let half = k.len() as isize - 1;
    values.par_chunks_mut(nx).for_each(|row| {
        let src = row.to_vec();
        for (i, out) in row.iter_mut().enumerate() {
            let lo = (i as isize - half).max(0) as usize;
            let hi = ((i as isize + half) as usize).min(nx - 1);
            *out = (lo..=hi)
                .map(|m| k[(m as isize - i as isize).unsigned_abs()] * src[m])
                .sum();
        }
    });
}

fn transpose(values: &[f64], nx: usize, ny: usize) -> Vec<f64> {
    let mut t = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            t[i * ny + j] = values[j * nx + i];
        }
    }
    t
}

/// Separable direct-space convolution with an isotropic Gaussian of per-axis
/// variance `v`. Mass carried past the grid edge is lost, not wrapped.
pub fn gaussian_blur(w: &WignerGrid, v: f64) -> WignerGrid {
    if v == 0.0 {
        return w.clone();
    }
    let s = w.spec();
    let mut vals = w.values.clone();
    blur_rows(&mut vals, s.nx, &kernel(v, s.dx(), s.nx));
    let mut t = transpose(&vals, s.nx, s.ny);
    blur_rows(&mut t, s.ny, &kernel(v, s.dy(), s.ny));
    WignerGrid {
        values: transpose(&t, s.ny, s.nx),
        ..w.clone()
    }
}

fn finish(out: WignerGrid) -> Result<WignerGrid> {
    let n = out.norm();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(ModelError::GridTooCoarse(format!(
            "propagated grid integral {n:.6}; widen the extents or refine the grid"
        )));
    }
    Ok(out)
}

/// Output of the channel `W_in(r/g)/g²` convolved with a Gaussian of
/// per-axis variance `v_add`, resampling the input grid bilinearly.
pub fn propagate(w_in: &WignerGrid, gain: f64, v_add: f64) -> Result<WignerGrid> {
    check_channel(gain, v_add)?;
    let s = w_in.spec();
    let scaled = if gain == 1.0 {
        w_in.clone()
    } else if gain == 0.0 {
        return finish(gaussian_blur(&point_mass(s), v_add));
    } else {
        let g = gain;
        WignerGrid::sample(s, |x, y| w_in.interpolate(x / g, y / g) / (g * g))
    };
    finish(gaussian_blur(&scaled, v_add))
}

/// As [`propagate`] with a complex gain: the input is first rotated by the
/// gain's phase.
pub fn propagate_complex(w_in: &WignerGrid, gain: Complex64, v_add: f64) -> Result<WignerGrid> {
    let (g, phi) = (gain.norm(), gain.arg());
    if phi == 0.0 {
        return propagate(w_in, g, v_add);
    }
    let (c, sn) = (phi.cos(), phi.sin());
    let rotated = WignerGrid::sample(w_in.spec(), |x, y| {
        w_in.interpolate(c * x + sn * y, -sn * x + c * y)
    });
    propagate(&rotated, g, v_add)
}

/// Same channel evaluated from the analytic input, so rescaling introduces no
/// interpolation error.
pub fn propagate_state(
    state: &StateSpec,
    gain: f64,
    v_add: f64,
    spec: GridSpec,
) -> Result<WignerGrid> {
    state.validate()?;
    spec.validate()?;
    check_channel(gain, v_add)?;
    if gain == 0.0 {
        return finish(gaussian_blur(&point_mass(spec), v_add));
    }
    let s = *state;
    let g = gain;
    let scaled = WignerGrid::sample(spec, move |x, y| s.eval(x / g, y / g) / (g * g));
    finish(gaussian_blur(&scaled, v_add))
}

fn point_mass(spec: GridSpec) -> WignerGrid {
    let mut w = WignerGrid::sample(spec, |_, _| 0.0);
    let (i, j) = (spec.nx / 2, spec.ny / 2);
    if spec.nx % 2 == 1 && spec.ny % 2 == 1 {
        w.values[j * spec.nx + i] = 1.0 / (spec.dx() * spec.dy());
    } else {
        // Split over the four nearest samples for even grids.
        let (i0, j0) = (spec.nx / 2 - 1 + spec.nx % 2, spec.ny / 2 - 1 + spec.ny % 2);
        let cells = [(i0, j0), (i, j0), (i0, j), (i, j)];
        let uniq: std::collections::BTreeSet<_> = cells.into_iter().collect();
        let share = 1.0 / (uniq.len() as f64 * spec.dx() * spec.dy());
        for (a, b) in uniq {
            w.values[b * spec.nx + a] = share;
        }
    }
    w
}

/// Overlap fidelity `2π ∬ W_in W_out`.
pub fn fidelity(w_in: &WignerGrid, w_out: &WignerGrid) -> Result<f64> {
    if w_in.spec() != w_out.spec() || w_in.values.len() != w_out.values.len() {
        return Err(ModelError::GridMismatch);
    }
    let prod = WignerGrid {
        values: w_in
            .values
            .iter()
            .zip(&w_out.values)
            .map(|(a, b)| a * b)
            .collect(),
        ..w_in.clone()
    };
    Ok(2.0 * PI * prod.norm())
}

/// Integrated negative volume `∬|W| − 1`, evaluated as `∬(|W| − W)` so the
/// normalization error of the quadrature does not leak in.
pub fn negativity(w: &WignerGrid) -> f64 {
    let n = w.integrate_with(|v| v.abs() - v);
    if n < NEGATIVITY_FLOOR {
        0.0
    } else {
        n
    }
}
