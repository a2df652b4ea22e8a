//! Finite ensembles of wave packets with cached Gram matrices. Ensemble
//! members are coefficient vectors over the packet list, so orthonormalized
//! members and projections stay exact linear combinations.

use num_complex::Complex64;

use crate::cutoff::CutoffProfile;
use crate::dirac::{Bispinor, Mass, SpacetimePoint};
use crate::error::{CfsError, Result};
use crate::linalg::{condition_number, CMatrix};
use crate::packet::{evaluate_with, jacobian_sup_bound, PacketProfile, WavePacket};
use crate::quad;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Solution-space inner product (u|v) of two packets, reduced to a radial
/// quadrature. Packets in different spin or energy branches are orthogonal
/// pointwise in momentum space.
pub fn inner_product(u: &WavePacket, v: &WavePacket, m: Mass) -> Result<Complex64> {
    if u.sign != v.sign || u.spin != v.spin {
        return Ok(C_ZERO);
    }
    let mv = m.value();
    let dt = v.center.t - u.center.t;
    let dx = [
        v.center.x1 - u.center.x1,
        v.center.x2 - u.center.x2,
        v.center.x3 - u.center.x3,
    ];

    // accumulate the combined envelope: e^{-alpha k^2 + k.c + const_a} times
    // optional radial tables and k3 / (omega + m) powers
    let mut alpha = 0.0f64;
    let mut const_a = 0.0f64;
    let mut c = [
        Complex64::new(0.0, -dx[0]),
        Complex64::new(0.0, -dx[1]),
        Complex64::new(0.0, -dx[2]),
    ];
    let mut k3_count = 0u8;
    let mut tables: Vec<(&[f64], &[f64])> = Vec::new();
    let mut kmax_cap = f64::INFINITY;
    let mut sigma_min = f64::INFINITY;
    let mut p_norm_max = 0.0f64;

    for prof in [&u.profile, &v.profile] {
        match prof {
            PacketProfile::IsotropicGaussian {
                sigma,
                momentum_center: p,
            } => {
                let s2 = sigma * sigma;
                alpha += 1.0 / (4.0 * s2);
                const_a += -p.norm_sq() / (4.0 * s2);
                c[0] += Complex64::new(p.k1 / (2.0 * s2), 0.0);
                c[1] += Complex64::new(p.k2 / (2.0 * s2), 0.0);
                c[2] += Complex64::new(p.k3 / (2.0 * s2), 0.0);
                sigma_min = sigma_min.min(*sigma);
                p_norm_max = p_norm_max.max(p.norm());
            }
            PacketProfile::K3WeightedGaussian { sigma } => {
                let s2 = sigma * sigma;
                alpha += 1.0 / (4.0 * s2);
                k3_count += 1;
                sigma_min = sigma_min.min(*sigma);
            }
            PacketProfile::CustomRadial { rs, vals } => {
                tables.push((rs, vals));
                kmax_cap = kmax_cap.min(*rs.last().unwrap());
            }
        }
    }

    let kmax = if alpha > 0.0 {
        let c_re_norm = (c[0].re * c[0].re + c[1].re * c[1].re + c[2].re * c[2].re).sqrt();
        (c_re_norm / (2.0 * alpha) + 8.0 / alpha.sqrt()).min(kmax_cap)
    } else {
        kmax_cap
    };
    if !kmax.is_finite() || kmax <= 0.0 {
        return Err(CfsError::InvalidArgument(
            "inner product integrand has no finite support".into(),
        ));
    }

    let cc = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    let zr = cc.sqrt();
    let sign = u.sign.signum();
    let chi_sq = |k: f64| {
        let w = (k * k + mv * mv).sqrt();
        2.0 * w / (w + mv)
    };
    let omega_m = |k: f64| (k * k + mv * mv).sqrt() + mv;
    let table_weight = |k: f64| -> f64 {
        tables
            .iter()
            .map(|(rs, vals)| table_interp(rs, vals, k))
            .product()
    };

    let kernels_at = |k: f64| super_kernels(-alpha * k * k + const_a, zr * k);
    // time phase of conj(lambda_u) lambda_v is e^{+i sign omega (t0_v - t0_u)}
    let phase = |k: f64| Complex64::new(0.0, sign * (k * k + mv * mv).sqrt() * dt).exp();

    let integrand = |k: f64| -> Complex64 {
        let (k0, k1, k2) = kernels_at(k);
        let base = phase(k) * chi_sq(k) * table_weight(k);
        match k3_count {
            0 => base * k * k * k0,
            1 => base * k.powi(4) * omega_m(k) * c[2] * k1,
            _ => {
                base * k.powi(4)
                    * omega_m(k)
                    * omega_m(k)
                    * (k1 + k * k * c[2] * c[2] * k2)
            }
        }
    };
    let mut peak = 0.0f64;
    for i in 1..=64 {
        let k = kmax * i as f64 / 64.0;
        peak = peak.max(integrand(k).norm());
    }
    let abs_tol = (1e-14 * peak * kmax).max(1e-280);
    let freq = dt.abs() + zr.norm();
    let q = quad::oscillatory(integrand, kmax, freq, abs_tol, 1e-10)?;
    let four_pi = 4.0 * std::f64::consts::PI;
    Ok(u.amplitude.conj() * v.amplitude * four_pi * q.value)
}

fn table_interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
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
    let t = (x - xs[idx - 1]) / (xs[idx] - xs[idx - 1]);
    ys[idx - 1] * (1.0 - t) + ys[idx] * t
}

fn super_kernels(a: f64, z: Complex64) -> (Complex64, Complex64, Complex64) {
    // same entire kernels as the packet evaluator
    let one = Complex64::new(1.0, 0.0);
    if z.norm() < 0.2 {
        let ea = Complex64::new(a.exp(), 0.0);
        let z2 = z * z;
        let z4 = z2 * z2;
        let z6 = z4 * z2;
        (
            ea * (one + z2 / 6.0 + z4 / 120.0 + z6 / 5040.0),
            ea * (Complex64::new(1.0 / 3.0, 0.0) + z2 / 30.0 + z4 / 840.0 + z6 / 45360.0),
            ea * (Complex64::new(1.0 / 15.0, 0.0) + z2 / 210.0 + z4 / 7560.0 + z6 / 498960.0),
        )
    } else {
        let ep = (Complex64::new(a, 0.0) + z).exp();
        let em = (Complex64::new(a, 0.0) - z).exp();
        let z2 = z * z;
        let z3 = z2 * z;
        let z5 = z3 * z2;
        (
            (ep - em) / (2.0 * z),
            (ep * (z - one) + em * (z + one)) / (2.0 * z3),
            (ep * (z2 - 3.0 * z + 3.0) - em * (z2 + 3.0 * z + 3.0)) / (2.0 * z5),
        )
    }
}

/// A packet basis with its cached Gram matrix. Members of the ensemble are
/// coefficient vectors over the basis.
#[derive(Debug, Clone)]
pub struct SolutionFamily {
    pub packets: Vec<WavePacket>,
    pub m: Mass,
    gram: CMatrix,
}

impl SolutionFamily {
    pub fn new(packets: Vec<WavePacket>, m: Mass) -> Result<Self> {
        if packets.is_empty() {
            return Err(CfsError::InvalidArgument(
                "family needs at least one packet".into(),
            ));
        }
        let n = packets.len();
        let mut gram = CMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = inner_product(&packets[i], &packets[j], m)?;
                gram[(i, j)] = v;
                gram[(j, i)] = v.conj();
            }
        }
        Ok(SolutionFamily { packets, m, gram })
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }

    pub fn packet_gram(&self) -> &CMatrix {
        &self.gram
    }

    /// e_i coefficient vectors, one member per packet.
    pub fn identity_members(&self) -> Vec<Vec<Complex64>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut c = vec![C_ZERO; n];
                c[i] = Complex64::new(1.0, 0.0);
                c
            })
            .collect()
    }

    /// (a|b) for members given by coefficient vectors.
    pub fn member_inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let n = self.len();
        let mut s = C_ZERO;
        for i in 0..n {
            if a[i] == C_ZERO {
                continue;
            }
            for j in 0..n {
                s += a[i].conj() * self.gram[(i, j)] * b[j];
            }
        }
        s
    }

    pub fn member_norm(&self, a: &[Complex64]) -> f64 {
        self.member_inner(a, a).re.max(0.0).sqrt()
    }

    pub fn members_gram(&self, members: &[Vec<Complex64>]) -> CMatrix {
        let n = members.len();
        let mut g = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.member_inner(&members[i], &members[j]);
            }
        }
        g
    }

    pub fn member_value(
        &self,
        coeffs: &[Complex64],
        x: SpacetimePoint,
        g: Option<&CutoffProfile>,
    ) -> Result<Bispinor> {
        let mut v = Bispinor::ZERO;
        for (c, p) in coeffs.iter().zip(self.packets.iter()) {
            if *c == C_ZERO {
                continue;
            }
            v = v + evaluate_with(p, x, g, self.m)?.scale(*c);
        }
        Ok(v)
    }

    /// Subadditive gradient bound for a member.
    pub fn member_jacobian_bound(&self, coeffs: &[Complex64]) -> Result<f64> {
        let mut s = 0.0;
        for (c, p) in coeffs.iter().zip(self.packets.iter()) {
            if c.norm() == 0.0 {
                continue;
            }
            s += c.norm() * jacobian_sup_bound(p, self.m)?.total;
        }
        Ok(s)
    }

    pub fn member_translate(&self, coeffs: &[Complex64], a: SpacetimePoint) -> Vec<WavePacket> {
        self.packets
            .iter()
            .zip(coeffs.iter())
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(p, c)| p.translate(a).with_amplitude(p.amplitude * c))
            .collect()
    }

    /// Classical recursive Gram-Schmidt on members; fails when the member
    /// Gram matrix is numerically singular.
    pub fn orthonormalize(&self, members: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
        let g = self.members_gram(members);
        let cond = condition_number(&g);
        if cond > 1e12 {
            return Err(CfsError::DegenerateFamily { cond, limit: 1e12 });
        }
        let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(members.len());
        for mem in members {
            let mut c = mem.clone();
            for prev in &out {
                let proj = self.member_inner(prev, &c);
                for (ci, pi) in c.iter_mut().zip(prev.iter()) {
                    *ci -= proj * pi;
                }
            }
            let norm = self.member_norm(&c);
            if norm < 1e-14 {
                return Err(CfsError::DegenerateFamily {
                    cond: f64::INFINITY,
                    limit: 1e12,
                });
            }
            for ci in c.iter_mut() {
                *ci /= Complex64::new(norm, 0.0);
            }
            out.push(c);
        }
        Ok(out)
    }

    /// Largest deviation of the member Gram matrix from the identity.
    pub fn orthonormality_defect(&self, members: &[Vec<Complex64>]) -> f64 {
        let g = self.members_gram(members);
        let n = members.len();
        let mut d = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                d = d.max((g[(i, j)] - Complex64::new(want, 0.0)).norm());
            }
        }
        d
    }

    /// Concatenates two families over the union of their packet lists.
    pub fn concat(a: &SolutionFamily, b: &SolutionFamily) -> Result<SolutionFamily> {
        let mut packets = a.packets.clone();
        packets.extend(b.packets.iter().cloned());
        SolutionFamily::new(packets, a.m)
    }
}
