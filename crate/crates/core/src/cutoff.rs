//! Momentum cutoff families g_eps, their radial L^1 norms, the four-momentum
//! profiles they restrict, and mollifier-derived cutoffs built from a
//! compactly supported bump by self-convolution.

use num_complex::Complex64;

use crate::bessel::besj1;
use crate::dirac::Mass;
use crate::error::{CfsError, Result};
use crate::quad;

/// Linear interpolation on a sorted table, zero outside the sampled range.
fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if xs.is_empty() || x < xs[0] || x > *xs.last().unwrap() {
        return 0.0;
    }
    let idx = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => return ys[i],
        Err(i) => i,
    };
    if idx == 0 {
        return ys[0];
    }
    let (x0, x1) = (xs[idx - 1], xs[idx]);
    let t = (x - x0) / (x1 - x0);
    ys[idx - 1] * (1.0 - t) + ys[idx] * t
}

/// Rotationally symmetric four-momentum profile, evaluated on the Euclidean
/// radius rho = sqrt((k^0)^2 + |k|^2).
#[derive(Debug, Clone, PartialEq)]
pub enum FourMomentumCutoff {
    /// A exp(-rho^2 / (2 B^2))
    Gaussian { amplitude: f64, width: f64 },
    /// indicator of the ball rho <= radius
    Ball { radius: f64 },
    Constant { value: f64 },
    /// sampled radial profile, e.g. the transform of a mollifier
    RadialTable { rho: Vec<f64>, val: Vec<f64> },
}

impl FourMomentumCutoff {
    pub fn eval_radius4(&self, rho: f64) -> f64 {
        match self {
            FourMomentumCutoff::Gaussian { amplitude, width } => {
                amplitude * (-rho * rho / (2.0 * width * width)).exp()
            }
            FourMomentumCutoff::Ball { radius } => {
                if rho <= *radius {
                    1.0
                } else {
                    0.0
                }
            }
            FourMomentumCutoff::Constant { value } => *value,
            FourMomentumCutoff::RadialTable { rho: rs, val } => interp(rs, val, rho).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CutoffKind {
    /// indicator of |k| <= 1/eps
    Sharp,
    /// amplitude exp(-(eps |k|)^2 / (2 width^2)), a direct three-momentum family
    Gaussian { width: f64 },
    /// g_eps(k) = G(eps * (omega(k), k)) for a four-momentum profile G;
    /// the restriction to the mass shell depends on the mass
    OnShell {
        four: FourMomentumCutoff,
        mass: f64,
    },
    /// sampled unit-scale radial profile, g_eps(k) = table(eps |k|)
    CustomRadial { rs: Vec<f64>, vals: Vec<f64> },
}

/// A radial three-momentum cutoff g_eps with scale eps and an overall
/// amplitude. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffProfile {
    pub kind: CutoffKind,
    pub epsilon: f64,
    pub amplitude: f64,
}

impl CutoffProfile {
    pub fn sharp(epsilon: f64) -> Result<Self> {
        Self::new(CutoffKind::Sharp, epsilon)
    }

    pub fn gaussian(epsilon: f64, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(CfsError::InvalidArgument(format!(
                "gaussian cutoff width must be positive, got {width}"
            )));
        }
        Self::new(CutoffKind::Gaussian { width }, epsilon)
    }

    pub fn custom(epsilon: f64, rs: Vec<f64>, vals: Vec<f64>) -> Result<Self> {
        if rs.len() != vals.len() || rs.len() < 2 {
            return Err(CfsError::InvalidArgument(
                "custom cutoff table needs at least two samples".into(),
            ));
        }
        if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CfsError::InvalidArgument(
                "custom cutoff values must be finite and nonnegative".into(),
            ));
        }
        if vals.iter().all(|v| *v == 0.0) {
            return Err(CfsError::InvalidArgument(
                "cutoff must not vanish identically".into(),
            ));
        }
        Self::new(CutoffKind::CustomRadial { rs, vals }, epsilon)
    }

    pub fn new(kind: CutoffKind, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(CfsError::InvalidArgument(format!(
                "cutoff scale must be positive, got {epsilon}"
            )));
        }
        Ok(CutoffProfile {
            kind,
            epsilon,
            amplitude: 1.0,
        })
    }

    pub fn scaled(&self, c: f64) -> CutoffProfile {
        let mut out = self.clone();
        out.amplitude *= c;
        out
    }

    /// g_eps(|k|) for radial momentum r = |k| >= 0.
    pub fn eval(&self, r: f64) -> f64 {
        let e = self.epsilon;
        let v = match &self.kind {
            CutoffKind::Sharp => {
                if e * r <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            CutoffKind::Gaussian { width } => {
                let s = e * r / width;
                (-0.5 * s * s).exp()
            }
            CutoffKind::OnShell { four, mass } => {
                let w2 = r * r + mass * mass;
                four.eval_radius4(e * (w2 + r * r).sqrt())
            }
            CutoffKind::CustomRadial { rs, vals } => interp(rs, vals, e * r),
        };
        self.amplitude * v
    }

    /// Exact support radius in |k|, where one is known.
    pub fn support_radius(&self) -> Option<f64> {
        match &self.kind {
            CutoffKind::Sharp => Some(1.0 / self.epsilon),
            CutoffKind::OnShell { four, mass } => match four {
                FourMomentumCutoff::Ball { radius } => {
                    // eps^2 (2 r^2 + m^2) <= radius^2
                    let lim = (radius / self.epsilon).powi(2) - mass * mass;
                    if lim <= 0.0 {
                        Some(0.0)
                    } else {
                        Some((lim / 2.0).sqrt())
                    }
                }
                _ => None,
            },
            CutoffKind::CustomRadial { rs, .. } => rs.last().map(|r| r / self.epsilon),
            CutoffKind::Gaussian { .. } => None,
        }
    }

    /// Radius beyond which r^2 g(r)^2 drops below 1e-16 of its peak; the
    /// quadrature tail truncation radius.
    pub fn effective_radius(&self, m: Mass) -> f64 {
        if let Some(r) = self.support_radius() {
            return r;
        }
        match &self.kind {
            CutoffKind::Gaussian { width } => {
                // r^2 exp(-(eps r / w)^2) peak at r = w/eps; solve the decay directly
                let scale = width / self.epsilon;
                scale * 7.0
            }
            _ => {
                let hard = 60.0 / self.epsilon + 10.0 * m.value();
                quad::tail_radius(|r| r * r * self.eval(r) * self.eval(r), 1.0, 1e-16, hard)
            }
        }
    }

    /// Upper bound for sup_k g_eps(k).
    pub fn sup_bound(&self, m: Mass) -> f64 {
        let analytic = match &self.kind {
            CutoffKind::Sharp => Some(1.0),
            CutoffKind::Gaussian { .. } => Some(1.0),
            _ => None,
        };
        if let Some(v) = analytic {
            return self.amplitude.abs() * v;
        }
        let rmax = self.effective_radius(m).max(1.0);
        let mut sup: f64 = 0.0;
        for i in 0..=2000 {
            let r = rmax * i as f64 / 2000.0;
            sup = sup.max(self.eval(r).abs());
        }
        sup * 1.01
    }
}

/// Restriction of a four-momentum profile to the mass shell,
/// k |-> G(omega(k), k), as a radial three-momentum cutoff.
pub fn cutoff_on_shell(four: FourMomentumCutoff, epsilon: f64, m: Mass) -> Result<CutoffProfile> {
    CutoffProfile::new(
        CutoffKind::OnShell {
            four,
            mass: m.value(),
        },
        epsilon,
    )
}

/// L^1(R^3) norms of the squared cutoff: `norm_a` = ||g^2||, `norm_b` = ||g^2 / omega||.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffNorms {
    pub norm_a: f64,
    pub norm_b: f64,
}

pub fn cutoff_l1_norms(g: &CutoffProfile, m: Mass) -> Result<CutoffNorms> {
    let rmax = g.effective_radius(m);
    if !(rmax.is_finite() && rmax > 0.0) {
        return Err(CfsError::InvalidArgument(
            "cutoff has empty effective support".into(),
        ));
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    let a = quad::adaptive_real(
        |r| {
            let gv = g.eval(r);
            four_pi * r * r * gv * gv
        },
        0.0,
        rmax,
        1e-12,
        1e-10,
    )?;
    let b = quad::adaptive_real(
        |r| {
            let gv = g.eval(r);
            four_pi * r * r * gv * gv / (r * r + m.value() * m.value()).sqrt()
        },
        0.0,
        rmax,
        1e-12,
        1e-10,
    )?;
    Ok(CutoffNorms {
        norm_a: a.value.re,
        norm_b: b.value.re,
    })
}

/// Pointwise product of a sampled radial momentum profile with the cutoff:
/// the regularized profile. Linear in the profile; idempotent only for
/// cutoffs taking values in {0, 1}.
pub fn regularize_radial_samples(rs: &[f64], vals: &[f64], g: &CutoffProfile) -> Vec<f64> {
    rs.iter()
        .zip(vals.iter())
        .map(|(r, v)| v * g.eval(*r))
        .collect()
}

/// A mollifier h_eps(x) = eps^-4 h(x / eps) built from a bump h1 supported in
/// B(0, 1/2) by self-convolution h = h1 * h1, normalized to unit L^1 norm.
/// Stored as a radial table of the unit-scale h together with its
/// four-momentum transform.
#[derive(Debug, Clone)]
pub struct MollifierSample {
    pub epsilon: f64,
    pub grid_n: usize,
    /// radial grid on [0, 1] for the unit-scale h
    pub rs: Vec<f64>,
    /// h values on `rs`, normalized so that the L^1 norm over R^4 is 1
    pub h: Vec<f64>,
    /// measured support radius of h_eps (scaled by eps)
    pub support_radius: f64,
    /// L^1 norm of h_eps recomputed from the table (should be 1)
    pub l1_norm: f64,
    pub sup_h_unit: f64,
}

/// The standard smooth bump exp(-1 / (1 - |2x|^2)) on |x| < 1/2.
pub fn standard_bump(r: f64) -> f64 {
    let s = 2.0 * r;
    if s >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Builds the mollifier by direct summation of the 4D self-convolution of
/// `base` (a radial bump supported in B(0, 1/2)) on a uniform grid with
/// `grid_n` points per axis.
pub fn build_mollifier<B>(base: B, epsilon: f64, grid_n: usize) -> Result<MollifierSample>
where
    B: Fn(f64) -> f64,
{
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(CfsError::InvalidArgument(format!(
            "mollifier scale must be positive, got {epsilon}"
        )));
    }
    if grid_n < 8 {
        return Err(CfsError::InvalidArgument(
            "mollifier grid needs at least 8 points per axis".into(),
        ));
    }
    // validate the base bump: support in B(0, 1/2), nonnegative
    let probe = 1000;
    for i in 0..=probe {
        let r = 0.75 * i as f64 / probe as f64;
        let v = base(r);
        if !v.is_finite() || v < 0.0 {
            return Err(CfsError::InvalidArgument(format!(
                "base bump must be finite and nonnegative, got {v} at r = {r}"
            )));
        }
        if r > 0.5 && v > 0.0 {
            return Err(CfsError::InvalidArgument(format!(
                "base bump must vanish outside B(0, 1/2), got {v} at r = {r}"
            )));
        }
    }
    if base(0.0) == 0.0 {
        return Err(CfsError::InvalidArgument(
            "base bump must not vanish at the origin".into(),
        ));
    }

    // grid over [-1/2, 1/2]^4 holding the base bump
    let step = 1.0 / grid_n as f64;
    let axis: Vec<f64> = (0..grid_n)
        .map(|i| -0.5 + (i as f64 + 0.5) * step)
        .collect();
    let cell = step.powi(4);
    // enumerate grid points with nonzero bump value
    let mut pts: Vec<([f64; 4], f64)> = Vec::new();
    for &x0 in &axis {
        for &x1 in &axis {
            let r01 = x0 * x0 + x1 * x1;
            if r01 > 0.25 {
                continue;
            }
            for &x2 in &axis {
                let r012 = r01 + x2 * x2;
                if r012 > 0.25 {
                    continue;
                }
                for &x3 in &axis {
                    let r = (r012 + x3 * x3).sqrt();
                    let v = base(r);
                    if v > 0.0 {
                        pts.push(([x0, x1, x2, x3], v));
                    }
                }
            }
        }
    }

    // h(z) = sum over grid of h1(x) h1(z - x) * cell, evaluated on radii in [0, 1];
    // by O(4) symmetry z = (r, 0, 0, 0) suffices
    let n_rad = 161;
    let rs: Vec<f64> = (0..n_rad).map(|i| i as f64 / (n_rad - 1) as f64).collect();
    let mut h: Vec<f64> = rs
        .iter()
        .map(|&r| {
            let mut s = 0.0;
            for (x, v) in &pts {
                let d0 = r - x[0];
                let rr = (d0 * d0 + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
                s += v * base(rr);
            }
            s * cell
        })
        .collect();

    // normalize: ||h||_L1 over R^4 = 2 pi^2 int r^3 h(r) dr
    let two_pi2 = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
    let raw_l1 = two_pi2
        * quad::adaptive_real(|r| r.powi(3) * interp(&rs, &h, r), 0.0, 1.0, 1e-13, 1e-11)?
            .value
            .re;
    if raw_l1 <= 0.0 {
        return Err(CfsError::InvalidArgument(
            "mollifier normalization failed: zero mass".into(),
        ));
    }
    for v in &mut h {
        *v /= raw_l1;
    }
    let l1_norm = two_pi2
        * quad::adaptive_real(|r| r.powi(3) * interp(&rs, &h, r), 0.0, 1.0, 1e-13, 1e-11)?
            .value
            .re;
    let sup_h_unit = h.iter().cloned().fold(0.0, f64::max);
    let support_unit = rs
        .iter()
        .zip(h.iter())
        .filter(|(_, v)| **v > 0.0)
        .map(|(r, _)| *r)
        .fold(0.0, f64::max);
    Ok(MollifierSample {
        epsilon,
        grid_n,
        rs,
        h,
        support_radius: epsilon * support_unit,
        l1_norm,
        sup_h_unit,
    })
}

impl MollifierSample {
    /// Unit-scale h at radius r (support within [0, 1]).
    pub fn h_unit(&self, r: f64) -> f64 {
        interp(&self.rs, &self.h, r)
    }

    /// h_eps(x) = eps^-4 h(|x| / eps).
    pub fn h_eps(&self, r: f64) -> f64 {
        self.h_unit(r / self.epsilon) / self.epsilon.powi(4)
    }

    /// sup |h_eps| = eps^-4 sup h.
    pub fn sup_h_eps(&self) -> f64 {
        self.sup_h_unit / self.epsilon.powi(4)
    }

    /// Four-momentum transform G(rho) = (2 pi)^2 rho^-1 int h(r) r^2 J1(rho r) dr
    /// of the unit-scale h, tabulated on [0, rho_max]; G(eps k) restricted to
    /// the mass shell is the induced three-momentum cutoff.
    pub fn to_cutoff(&self, m: Mass) -> Result<CutoffProfile> {
        let two_pi_sq = (2.0 * std::f64::consts::PI).powi(2);
        let mut rho_grid = vec![0.0f64];
        let mut vals = Vec::new();
        // G(0) = 2 pi^2 int r^3 h dr = l1 norm = 1 by normalization (times (2pi)^2 / (2pi)^2)
        let g0 = self.l1_norm;
        vals.push(g0);
        let d_rho = 0.05;
        let rho_max = 240.0;
        let mut rho = d_rho;
        let mut below = 0usize;
        while rho <= rho_max {
            let integrand = |r: f64| {
                Complex64::new(self.h_unit(r) * r * r * besj1(rho * r), 0.0)
            };
            let q = quad::oscillatory(integrand, 1.0, rho, 1e-13, 1e-10)?;
            let val = two_pi_sq * q.value.re / rho;
            rho_grid.push(rho);
            // G = (2 pi)^4 (F h1)^2 >= 0; clip transform noise below zero
            vals.push(val.max(0.0));
            if val.abs() < 1e-12 * g0 {
                below += 1;
                if below > 40 {
                    break;
                }
            } else {
                below = 0;
            }
            rho += d_rho;
        }
        CutoffProfile::new(
            CutoffKind::OnShell {
                four: FourMomentumCutoff::RadialTable {
                    rho: rho_grid,
                    val: vals,
                },
                mass: m.value(),
            },
            self.epsilon,
        )
    }
}
