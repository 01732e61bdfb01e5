//! Two-mode Gaussian entanglement after one or both modes pass through a
//! transducer-like channel.
//!
//! Quadratures are ordered `(X₁⁺, X₁⁻, X₂⁺, X₂⁻)` with `[X⁺, X⁻] = i`, so a
//! vacuum has variance 1/2.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::noise::transfer_witness;

/// Smallest eigenvalue of `V + (i/2)Ω` tolerated as physical.
pub const BONA_FIDE_TOL: f64 = 1e-10;
/// Negative discriminant tolerated before reporting an invalid matrix.
pub const BRANCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix2Mode {
    pub v: [[f64; 4]; 4],
    pub m_squared: f64,
}

/// Which mode a channel acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    One,
    Two,
}

impl CovarianceMatrix2Mode {
    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.v[i][j])
    }

    fn block(&self, r: usize, c: usize) -> Matrix2<f64> {
        Matrix2::from_fn(|i, j| self.v[r + i][c + j])
    }

    pub fn a(&self) -> Matrix2<f64> {
        self.block(0, 0)
    }

    pub fn b(&self) -> Matrix2<f64> {
        self.block(2, 2)
    }

    pub fn c(&self) -> Matrix2<f64> {
        self.block(0, 2)
    }

    /// `det V` through the Schur complement of `A`, which stays accurate when
    /// the entries are large and nearly cancel.
    pub fn det(&self) -> f64 {
        let a = self.a();
        match a.try_inverse() {
            Some(ai) => {
                a.determinant() * (self.b() - self.c().transpose() * ai * self.c()).determinant()
            }
            None => self.matrix().determinant(),
        }
    }

    /// Smallest eigenvalue of the Hermitian form `V + (i m²/2) Ω`.
    pub fn uncertainty_margin(&self) -> f64 {
        let w = Matrix2::new(0.0, 1.0, -1.0, 0.0);
        let mut h = Matrix4::<Complex64>::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let om = if i / 2 == j / 2 {
                    w[(i % 2, j % 2)]
                } else {
                    0.0
                };
                h[(i, j)] = Complex64::new(self.v[i][j], 0.5 * self.m_squared * om);
            }
        }
        SymmetricEigen::new(h).eigenvalues.min()
    }

    pub fn is_bona_fide(&self) -> bool {
        self.uncertainty_margin() >= -BONA_FIDE_TOL
    }

    /// Smallest symplectic eigenvalue of `V` itself; 1/2 for pure states.
    pub fn min_symplectic(&self) -> Result<f64> {
        let (a, b, c) = (
            self.a().determinant(),
            self.b().determinant(),
            self.c().determinant(),
        );
        smaller_root(
            a + b + 2.0 * c,
            self.det(),
            a.abs() + b.abs() + 2.0 * c.abs(),
        )
    }

    /// Smallest symplectic eigenvalue of the partial transpose.
    pub fn min_symplectic_pt(&self) -> Result<f64> {
        let (a, b, c) = (
            self.a().determinant(),
            self.b().determinant(),
            self.c().determinant(),
        );
        smaller_root(
            a + b - 2.0 * c,
            self.det(),
            a.abs() + b.abs() + 2.0 * c.abs(),
        )
    }
}

// Smaller ν from ν⁴ − Δν² + det = 0, using the product of roots to avoid
// cancellation. `scale` bounds the magnitude of the terms summed into Δ.
fn smaller_root(delta: f64, det: f64, scale: f64) -> Result<f64> {
    let disc = delta * delta - 4.0 * det;
    if disc < -BRANCH_TOL * delta.abs().max(1.0).powi(2) {
        return Err(ModelError::NumericalBranch(disc));
    }
    // A discriminant within rounding of zero is a degenerate pair; taking
    // its square root would turn ε into √ε.
    let disc = if disc.abs() < 64.0 * f64::EPSILON * delta.abs() * scale.max(delta.abs()) {
        0.0
    } else {
        disc
    };
    let big = delta + disc.max(0.0).sqrt();
    if big <= 0.0 {
        return Err(ModelError::NumericalBranch(disc));
    }
    Ok((2.0 * det / big).max(0.0).sqrt())
}

/// Two-mode squeezed vacuum with squeezing parameter `r`.
pub fn tmss_covariance(r: f64) -> Result<CovarianceMatrix2Mode> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(ModelError::InvalidParameter {
            name: "r",
            value: r,
            reason: "squeezing must be finite and nonnegative",
        });
    }
    let c = (2.0 * r).cosh() / 2.0;
    let s = (2.0 * r).sinh() / 2.0;
    Ok(CovarianceMatrix2Mode {
        v: [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ],
        m_squared: 1.0,
    })
}

/// Pass one mode through `X⁺ → g_x X⁺ + noise`, `X⁻ → g_y X⁻ + noise` with
/// uncorrelated noise variances `v_x`, `v_y`.
pub fn apply_channel(
    cov: &CovarianceMatrix2Mode,
    mode: Mode,
    g_x: f64,
    g_y: f64,
    v_x: f64,
    v_y: f64,
) -> Result<CovarianceMatrix2Mode> {
    for (name, v) in [("v_x", v_x), ("v_y", v_y)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name,
                value: v,
                reason: "noise variance must be nonnegative",
            });
        }
    }
    let off = if mode == Mode::One { 0 } else { 2 };
    let mut m = Matrix4::<f64>::identity();
    m[(off, off)] = g_x;
    m[(off + 1, off + 1)] = g_y;
    let mut out = m * cov.matrix() * m.transpose();
    out[(off, off)] += v_x;
    out[(off + 1, off + 1)] += v_y;
    Ok(CovarianceMatrix2Mode {
        v: std::array::from_fn(|i| std::array::from_fn(|j| out[(i, j)])),
        m_squared: cov.m_squared,
    })
}

/// Degree of inseparability `2ν̃₋/m²`; below one means entangled.
pub fn inseparability(cov: &CovarianceMatrix2Mode) -> Result<f64> {
    Ok(2.0 * cov.min_symplectic_pt()? / cov.m_squared)
}

/// Inseparability of a two-mode squeezed state after `first` acts on mode one
/// and optionally `second` on mode two.
///
/// Evaluated from the state's structure with `cosh² − sinh² = 1` applied
/// exactly, so it stays accurate at squeezing levels where the matrix entries
/// themselves have lost the small eigenvalue to rounding.
pub fn tmss_channel_inseparability(
    r: f64,
    first: &ChannelSpec,
    second: Option<&ChannelSpec>,
) -> Result<f64> {
    tmss_covariance(r)?;
    let id = ChannelSpec {
        g_x: 1.0,
        g_y: 1.0,
        v_x: 0.0,
        v_y: 0.0,
    };
    let (p, q) = (first, second.unwrap_or(&id));
    for ch in [p, q] {
        if !(ch.v_x >= 0.0 && ch.v_y >= 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "v",
                value: ch.v_x.min(ch.v_y),
                reason: "noise variance must be nonnegative",
            });
        }
    }
    let ch = (2.0 * r).cosh() / 2.0;
    let sh = (2.0 * r).sinh() / 2.0;
    // Per-quadrature blocks [[a, c], [c, b]] for X⁺ and X⁻.
    let blk = |g1: f64, g2: f64, v1: f64, v2: f64| {
        let a = g1 * g1 * ch + v1;
        let b = g2 * g2 * ch + v2;
        let det = 0.25 * g1 * g1 * g2 * g2 + ch * (g1 * g1 * v2 + g2 * g2 * v1) + v1 * v2;
        (a, b, det)
    };
    let (ax, bx, dx) = blk(p.g_x, q.g_x, p.v_x, q.v_x);
    let (ay, by, dy) = blk(p.g_y, q.g_y, p.v_y, q.v_y);
    let cross = (p.g_x * q.g_x * p.g_y * q.g_y).abs() * sh * sh;
    let delta_pt = ax * ay + bx * by + 2.0 * cross;
    Ok(2.0 * smaller_root(delta_pt, dx * dy, delta_pt)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub g_x: f64,
    pub g_y: f64,
    pub v_x: f64,
    pub v_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Entangled,
    Separable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub r: f64,
    pub channel: ChannelSpec,
    #[serde(rename = "I")]
    pub inseparability: f64,
    #[serde(rename = "W_T")]
    pub w_t: f64,
    pub verdict: Verdict,
}

/// Send mode one of a two-mode squeezed state through `channel`.
pub fn transfer_report(r: f64, channel: ChannelSpec) -> Result<EntanglementReport> {
    let cov = apply_channel(
        &tmss_covariance(r)?,
        Mode::One,
        channel.g_x,
        channel.g_y,
        channel.v_x,
        channel.v_y,
    )?;
    let i = inseparability(&cov)?;
    let w = transfer_witness(channel.g_x, channel.g_y, channel.v_x, channel.v_y).w_t;
    Ok(EntanglementReport {
        r,
        channel,
        inseparability: i,
        w_t: w,
        verdict: if i < 1.0 {
            Verdict::Entangled
        } else {
            Verdict::Separable
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_pair() {
        let v = tmss_covariance(0.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(v.v[i][j], if i == j { 0.5 } else { 0.0 });
            }
        }
        assert_relative_eq!(inseparability(&v).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn squeezed_entries() {
        let v = tmss_covariance(1.0).unwrap();
        assert!((v.v[0][0] - 1.881).abs() < 1e-3);
        assert!((v.v[0][2] - 1.813).abs() < 1e-3);
        assert!((v.v[1][3] + 1.813).abs() < 1e-3);
        // Variance of X₁⁺ − X₂⁺.
        let diff = v.v[0][0] + v.v[2][2] - 2.0 * v.v[0][2];
        assert_relative_eq!(diff, (-2.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn untouched_state_inseparability() {
        for r in [0.1, 0.5, 1.0, 3.0] {
            let i = inseparability(&tmss_covariance(r).unwrap()).unwrap();
            assert!((i - (-2.0 * r).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn pure_states_have_unit_purity_eigenvalue() {
        for r in [0.0, 0.7, 1.0, 1.7, 2.0, 3.0] {
            let v = tmss_covariance(r).unwrap();
            assert!((v.min_symplectic().unwrap() - 0.5).abs() < 1e-10);
            assert!(v.is_bona_fide());
        }
    }

    #[test]
    fn identity_channel() {
        let v = tmss_covariance(0.8).unwrap();
        assert_eq!(apply_channel(&v, Mode::One, 1.0, 1.0, 0.0, 0.0).unwrap(), v);
    }

    #[test]
    fn loss_alone_keeps_entanglement() {
        let v = tmss_covariance(1.0).unwrap();
        for eta in [0.9, 0.5, 0.1, 0.01] {
            let g = f64::sqrt(eta);
            let out =
                apply_channel(&v, Mode::One, g, g, (1.0 - eta) / 2.0, (1.0 - eta) / 2.0).unwrap();
            assert!(out.is_bona_fide());
            assert!(inseparability(&out).unwrap() < 1.0);
        }
    }

    #[test]
    fn strong_squeezing_recovers_witness() {
        for &(g, v) in &[(0.94, 0.145), (0.5, 0.4), (1.0, 0.02), (0.3, 0.9)] {
            let rep = transfer_report(
                10.0,
                ChannelSpec {
                    g_x: g,
                    g_y: g,
                    v_x: v,
                    v_y: v,
                },
            )
            .unwrap();
            assert!((rep.inseparability - rep.w_t).abs() < 1e-3, "{rep:?}");
        }
        let rep = transfer_report(
            10.0,
            ChannelSpec {
                g_x: 0.8,
                g_y: 0.6,
                v_x: 0.2,
                v_y: 0.35,
            },
        )
        .unwrap();
        assert!((rep.inseparability - rep.w_t).abs() < 1e-3);
    }

    #[test]
    fn convergence_is_monotone() {
        let ch = ChannelSpec {
            g_x: 0.9,
            g_y: 0.9,
            v_x: 0.3,
            v_y: 0.3,
        };
        let errs: Vec<f64> = [2.0, 5.0, 10.0]
            .iter()
            .map(|&r| {
                let rep = transfer_report(r, ch).unwrap();
                rep.inseparability - rep.w_t
            })
            .collect();
        // At r = 10 the Schur complement keeps about eight digits.
        assert!(errs[0] > errs[1] && errs[1] > errs[2].abs());
        assert!(errs[2].abs() < 1e-6);
    }

    #[test]
    fn both_modes_through_same_channel() {
        for &(g, vx, vy) in &[(0.9, 0.3, 0.3), (0.6, 0.2, 0.5), (1.0, 0.1, 0.4)] {
            let v = tmss_covariance(10.0).unwrap();
            let one = apply_channel(&v, Mode::One, g, g, vx, vy).unwrap();
            let both = apply_channel(&one, Mode::Two, g, g, vx, vy).unwrap();
            let i = inseparability(&both).unwrap();
            assert!((i - 2.0 * (vx * vy).sqrt()).abs() < 1e-3, "{i}");
        }
    }

    #[test]
    fn structured_route_matches_matrix_route() {
        let chs = [
            ChannelSpec {
                g_x: 0.9,
                g_y: 0.8,
                v_x: 0.3,
                v_y: 0.1,
            },
            ChannelSpec {
                g_x: 0.5,
                g_y: 0.5,
                v_x: 0.0,
                v_y: 0.7,
            },
        ];
        for r in [0.0, 0.4, 1.5, 4.0] {
            let v = tmss_covariance(r).unwrap();
            let one = apply_channel(
                &v,
                Mode::One,
                chs[0].g_x,
                chs[0].g_y,
                chs[0].v_x,
                chs[0].v_y,
            )
            .unwrap();
            let both = apply_channel(
                &one,
                Mode::Two,
                chs[1].g_x,
                chs[1].g_y,
                chs[1].v_x,
                chs[1].v_y,
            )
            .unwrap();
            let s1 = tmss_channel_inseparability(r, &chs[0], None).unwrap();
            let s2 = tmss_channel_inseparability(r, &chs[0], Some(&chs[1])).unwrap();
            assert!((s1 - inseparability(&one).unwrap()).abs() < 1e-7, "r={r}");
            assert!((s2 - inseparability(&both).unwrap()).abs() < 1e-7, "r={r}");
        }
    }

    #[test]
    fn structured_dual_channel_identity() {
        for &(g, vx, vy) in &[(0.9, 0.3, 0.3), (0.6, 0.2, 0.5), (1.0, 0.1, 0.4)] {
            let ch = ChannelSpec {
                g_x: g,
                g_y: g,
                v_x: vx,
                v_y: vy,
            };
            let i = tmss_channel_inseparability(12.0, &ch, Some(&ch)).unwrap();
            assert!((i - 2.0 * (vx * vy).sqrt()).abs() < 1e-9, "{i}");
        }
    }

    #[test]
    fn invalid_matrix_detected() {
        let mut v = tmss_covariance(1.0).unwrap();
        v.v[0][0] = 0.01;
        v.v[1][1] = 0.01;
        assert!(!v.is_bona_fide());
    }

    #[test]
    fn verdicts() {
        let ch = |v| ChannelSpec {
            g_x: 1.0,
            g_y: 1.0,
            v_x: v,
            v_y: v,
        };
        assert_eq!(
            transfer_report(3.0, ch(0.1)).unwrap().verdict,
            Verdict::Entangled
        );
        assert_eq!(
            transfer_report(3.0, ch(1.5)).unwrap().verdict,
            Verdict::Separable
        );
    }
}
