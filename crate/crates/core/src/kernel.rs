//! The regularized kernel of the fermionic projector, its doubly-regularized
//! variant, closed-form diagonal spectra, the momentum-lattice basis-sum
//! surrogate and diagonal perturbations with their Bauer-Fike bound.

use num_complex::Complex64;

use crate::bessel::{j0, j1};
use crate::cutoff::{cutoff_l1_norms, CutoffProfile};
use crate::dirac::{
    gamma, slash_spatial, Bispinor, EnergySign, Mass, SpacetimePoint, SpinMatrix,
};
use crate::error::Result;
use crate::lattice::MomentumLattice;
use crate::linalg::{general_eigenvalues, operator_norm, CMatrix};
use crate::quad;

/// Cutoff power in the momentum integral: g gives the regularized kernel,
/// g^2 the doubly-regularized one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelPower {
    Single,
    Double,
}

#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub value: SpinMatrix,
    pub xi: SpacetimePoint,
    pub sign: EnergySign,
    pub power: KernelPower,
}

/// 1 / (2 (2 pi)^4)
fn half_inv_two_pi_4() -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    1.0 / (2.0 * two_pi.powi(4))
}

/// Kernel value at separation xi = x - y, assembled from three radial
/// integrals (the identity, gamma^0 and xi-hat . gamma coefficients).
pub fn kernel(
    xi: SpacetimePoint,
    g: &CutoffProfile,
    sign: EnergySign,
    power: KernelPower,
    m: Mass,
) -> Result<KernelMatrix> {
    let mv = m.value();
    let s = sign.signum();
    let tau = xi.t;
    let rvec = xi.spatial();
    let r = rvec.norm();
    let kmax = g.effective_radius(m);
    let freq = r + tau.abs();
    let gw = |k: f64| -> f64 {
        let v = g.eval(k);
        match power {
            KernelPower::Single => v,
            KernelPower::Double => v * v,
        }
    };
    let phase = |k: f64| Complex64::new(0.0, -s * (k * k + mv * mv).sqrt() * tau).exp();

    let run = |f: &dyn Fn(f64) -> Complex64| -> Result<Complex64> {
        let mut peak = 0.0f64;
        for i in 1..=64 {
            let k = kmax * i as f64 / 64.0;
            peak = peak.max(f(k).norm());
        }
        let abs_tol = (1e-14 * peak * kmax).max(1e-280);
        Ok(quad::oscillatory(f, kmax, freq, abs_tol, 1e-10)?.value)
    };

    let c_id = run(&|k: f64| {
        let w = (k * k + mv * mv).sqrt();
        phase(k) * (k * k * gw(k) * (mv / w) * j0(k * r))
    })?;
    let c_g0 = run(&|k: f64| phase(k) * (k * k * gw(k) * j0(k * r)))?;
    let c_vec = if r > 0.0 {
        run(&|k: f64| {
            let w = (k * k + mv * mv).sqrt();
            phase(k) * (k * k * k * gw(k) / w * j1(k * r))
        })?
    } else {
        Complex64::new(0.0, 0.0)
    };

    let four_pi = 4.0 * std::f64::consts::PI;
    let scale = four_pi * half_inv_two_pi_4();
    let mut value = SpinMatrix::identity().scale(c_id * scale)
        + gamma(0).scale(c_g0 * scale * Complex64::new(s, 0.0));
    if r > 0.0 {
        let xhat = rvec.scale(1.0 / r);
        let minus_i = Complex64::new(0.0, -1.0);
        value = value + slash_spatial(xhat).scale(c_vec * scale * minus_i);
    }
    Ok(KernelMatrix {
        value,
        xi,
        sign,
        power,
    })
}

/// Causal combination: the negative-branch kernel minus the positive one.
pub fn kernel_causal(
    xi: SpacetimePoint,
    g: &CutoffProfile,
    power: KernelPower,
    m: Mass,
) -> Result<KernelMatrix> {
    let neg = kernel(xi, g, EnergySign::Negative, power, m)?;
    let pos = kernel(xi, g, EnergySign::Positive, power, m)?;
    Ok(KernelMatrix {
        value: neg.value - pos.value,
        xi,
        sign: EnergySign::Negative,
        power,
    })
}

/// Spectrum of the doubly-regularized kernel on the diagonal:
/// lambda_(+-) = (m ||g^2/omega|| +- ||g^2||) / (2 (2 pi)^4), each twice.
#[derive(Debug, Clone, Copy)]
pub struct DiagonalSpectrum {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

pub fn diagonal_spectrum(g: &CutoffProfile, m: Mass) -> Result<DiagonalSpectrum> {
    let n = cutoff_l1_norms(g, m)?;
    let c = half_inv_two_pi_4();
    Ok(DiagonalSpectrum {
        lambda_plus: c * (m.value() * n.norm_b + n.norm_a),
        lambda_minus: c * (m.value() * n.norm_b - n.norm_a),
    })
}

/// Basis-sum surrogate of the doubly-regularized kernel: the Riemann sum
/// (+-)(2 pi)^(-1) sum_modes R u(x) conj(R u(y)) over normalized plane-wave
/// spinor modes on the lattice cells.
#[derive(Debug, Clone)]
pub struct LatticeKernel {
    pub value: SpinMatrix,
    /// set when the cell size resolves the cutoff support poorly
    pub coarse_warning: bool,
}

pub fn kernel_from_lattice_sum(
    x: SpacetimePoint,
    y: SpacetimePoint,
    lattice: &MomentumLattice,
    g: &CutoffProfile,
    sign: EnergySign,
    m: Mass,
) -> LatticeKernel {
    let mut acc = SpinMatrix::zero();
    for mode in lattice.modes(sign) {
        let vx = mode.reg_value(x, g, m);
        let vy = mode.reg_value(y, g, m);
        acc = acc + vx.outer_spin(&vy);
    }
    let s = sign.signum();
    let value = acc.scale(Complex64::new(s / (2.0 * std::f64::consts::PI), 0.0));
    let support = g.effective_radius(m);
    let coarse_warning = lattice.max_cell_extent() > support / 4.0;
    LatticeKernel {
        value,
        coarse_warning,
    }
}

/// Diagonal kernel plus a rank-one-per-state perturbation
/// Delta P = -(2 pi)^(-1) sum_+ v conj(v) + (2 pi)^(-1) sum_- v conj(v),
/// with the Bauer-Fike radius ||Delta P||_2 around the unperturbed pair.
#[derive(Debug, Clone)]
pub struct PerturbedDiagonal {
    pub matrix: SpinMatrix,
    pub eigenvalues: Vec<Complex64>,
    pub bauer_fike_bound: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

pub fn perturbed_diagonal(
    g: &CutoffProfile,
    m: Mass,
    states: &[(Bispinor, EnergySign)],
) -> Result<PerturbedDiagonal> {
    let base = kernel(
        SpacetimePoint::default(),
        g,
        EnergySign::Negative,
        KernelPower::Double,
        m,
    )?;
    let inv_two_pi = 1.0 / (2.0 * std::f64::consts::PI);
    let mut delta = SpinMatrix::zero();
    for (v, sgn) in states {
        let outer = v.outer_spin(v);
        let w = match sgn {
            EnergySign::Positive => -inv_two_pi,
            EnergySign::Negative => inv_two_pi,
        };
        delta = delta + outer.scale(Complex64::new(w, 0.0));
    }
    let matrix = base.value + delta;
    let eigenvalues = general_eigenvalues(&CMatrix::from_spin(&matrix))?;
    let bauer_fike_bound = operator_norm(&CMatrix::from_spin(&delta));
    let spec = diagonal_spectrum(g, m)?;
    Ok(PerturbedDiagonal {
        matrix,
        eigenvalues,
        bauer_fike_bound,
        lambda_plus: spec.lambda_plus,
        lambda_minus: spec.lambda_minus,
    })
}

/// Distance of each eigenvalue to the closer of lambda_(+-).
pub fn eigenvalue_distances(p: &PerturbedDiagonal) -> Vec<f64> {
    p.eigenvalues
        .iter()
        .map(|l| {
            let dp = (l - Complex64::new(p.lambda_plus, 0.0)).norm();
            let dm = (l - Complex64::new(p.lambda_minus, 0.0)).norm();
            dp.min(dm)
        })
        .collect()
}

/// Entrywise check helper: gamma^0 K(xi)^dag gamma^0, the expected value of
/// K(-xi) by conjugation symmetry.
pub fn conjugate_flip(k: &SpinMatrix) -> SpinMatrix {
    gamma(0) * k.adjoint() * gamma(0)
}

/// Exposes the sign structure at the diagonal: c1 I + c2 gamma^0 with both
/// coefficients real.
pub fn diagonal_components(k: &SpinMatrix) -> (Complex64, Complex64) {
    let c1 = (k.0[0][0] + k.0[2][2]) * Complex64::new(0.5, 0.0);
    let c2 = (k.0[0][0] - k.0[2][2]) * Complex64::new(0.5, 0.0);
    (c1, c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::ThreeMomentum;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn m1() -> Mass {
        Mass::new(1.0).unwrap()
    }

    fn sharp_closed_forms(meps: f64) -> (f64, f64) {
        let norm_a = 4.0 * PI / 3.0 / meps.powi(3);
        let x = 1.0 / meps;
        let norm_b = 2.0 * PI * ((x.powi(4) + x * x).sqrt() - x.asinh());
        (norm_a, norm_b)
    }

    #[test]
    fn diagonal_matches_closed_form() {
        let g = CutoffProfile::sharp(0.1).unwrap();
        let k = kernel(
            SpacetimePoint::default(),
            &g,
            EnergySign::Negative,
            KernelPower::Double,
            m1(),
        )
        .unwrap();
        let (norm_a, norm_b) = sharp_closed_forms(0.1);
        let c = 1.0 / (2.0 * (2.0 * PI).powi(4));
        let want = SpinMatrix::identity().scale(Complex64::new(c * norm_b, 0.0))
            - gamma(0).scale(Complex64::new(c * norm_a, 0.0));
        let rel = k.value.max_abs_diff(&want) / want.max_abs();
        assert!(rel < 1e-6, "rel = {rel}");
    }

    #[test]
    fn diagonal_spectrum_values_at_tenth() {
        let g = CutoffProfile::sharp(0.1).unwrap();
        let s = diagonal_spectrum(&g, m1()).unwrap();
        assert!((s.lambda_plus - 1.54035).abs() < 1e-4, "{}", s.lambda_plus);
        assert!((s.lambda_minus + 1.14728).abs() < 1e-4, "{}", s.lambda_minus);
        assert!(s.lambda_minus < -1e-12);
        assert!(s.lambda_plus > s.lambda_minus.abs());
    }

    #[test]
    fn leading_order_sharp_cutoff() {
        // lambda_(+-) ~ (m / eps^2 +- 2 / (3 eps^3)) / (2 (2 pi)^3) within 5% at m eps = 0.01
        let eps = 0.01;
        let g = CutoffProfile::sharp(eps).unwrap();
        let s = diagonal_spectrum(&g, m1()).unwrap();
        let c = 1.0 / (2.0 * (2.0 * PI).powi(3));
        let lead_p = c * (1.0 / (eps * eps) + 2.0 / (3.0 * eps.powi(3)));
        let lead_m = c * (1.0 / (eps * eps) - 2.0 / (3.0 * eps.powi(3)));
        assert!((lead_p - s.lambda_plus).abs() / s.lambda_plus.abs() < 0.05);
        assert!((lead_m - s.lambda_minus).abs() / s.lambda_minus.abs() < 0.05);
    }

    #[test]
    fn lambda_signs_for_various_cutoffs() {
        let cutoffs = [
            CutoffProfile::sharp(1.0).unwrap(),
            CutoffProfile::sharp(0.3).unwrap(),
            CutoffProfile::gaussian(0.5, 1.0).unwrap(),
        ];
        for g in cutoffs {
            let s = diagonal_spectrum(&g, m1()).unwrap();
            assert!(s.lambda_plus > 1e-12);
            assert!(s.lambda_minus < -1e-12);
            assert!(s.lambda_plus > s.lambda_minus.abs());
        }
    }

    #[test]
    fn lightcone_magnitude_grows_under_scale_refinement() {
        // the unregularized kernel diverges on the light cone; shrinking the
        // scale must inflate the regularized magnitude there
        let xi = SpacetimePoint::new(1.5, 1.5, 0.0, 0.0).unwrap();
        let mut mags = Vec::new();
        for eps in [0.5, 0.25, 0.125] {
            let g = CutoffProfile::sharp(eps).unwrap();
            let k = kernel(xi, &g, EnergySign::Negative, KernelPower::Double, m1()).unwrap();
            mags.push(k.value.max_abs());
        }
        assert!(mags[1] > mags[0] && mags[2] > mags[1], "{mags:?}");
    }

    #[test]
    fn lattice_refinement_halves_error_off_diagonal() {
        let g = CutoffProfile::sharp(0.3).unwrap();
        let xi = SpacetimePoint::new(0.0, 0.7, 0.0, 0.0).unwrap();
        let exact = kernel(xi, &g, EnergySign::Negative, KernelPower::Double, m1()).unwrap();
        let extent = 1.1 / 0.3;
        let mut errs = Vec::new();
        for n in [16usize, 32, 64] {
            let lat = MomentumLattice::uniform(n, extent);
            let got = kernel_from_lattice_sum(
                xi,
                SpacetimePoint::default(),
                &lat,
                &g,
                EnergySign::Negative,
                m1(),
            );
            errs.push(got.value.max_abs_diff(&exact.value) / exact.value.max_abs());
        }
        assert!(errs[1] < 0.75 * errs[0], "{errs:?}");
        assert!(errs[2] < 0.75 * errs[1], "{errs:?}");
    }

    #[test]
    fn coarse_lattice_raises_warning() {
        let g = CutoffProfile::sharp(0.3).unwrap();
        let coarse = MomentumLattice::uniform(4, 1.1 / 0.3);
        let got = kernel_from_lattice_sum(
            SpacetimePoint::default(),
            SpacetimePoint::default(),
            &coarse,
            &g,
            EnergySign::Negative,
            m1(),
        );
        assert!(got.coarse_warning);
        let fine = MomentumLattice::uniform(32, 1.1 / 0.3);
        let ok = kernel_from_lattice_sum(
            SpacetimePoint::default(),
            SpacetimePoint::default(),
            &fine,
            &g,
            EnergySign::Negative,
            m1(),
        );
        assert!(!ok.coarse_warning);
    }

    #[test]
    fn perturbation_bound_scales_quadratically_with_amplitude() {
        let g = CutoffProfile::sharp(0.2).unwrap();
        let v = Bispinor([
            Complex64::new(0.05, 0.02),
            Complex64::new(-0.03, 0.01),
            Complex64::new(0.02, -0.04),
            Complex64::new(0.01, 0.03),
        ]);
        let two = v.scale(Complex64::new(2.0, 0.0));
        let p1 = perturbed_diagonal(&g, m1(), &[(v, EnergySign::Positive)]).unwrap();
        let p2 = perturbed_diagonal(&g, m1(), &[(two, EnergySign::Positive)]).unwrap();
        let ratio_bound = p2.bauer_fike_bound / p1.bauer_fike_bound;
        assert!((ratio_bound - 4.0).abs() < 1e-9, "{ratio_bound}");
        let shift = |p: &PerturbedDiagonal| {
            eigenvalue_distances(p).into_iter().fold(0.0f64, f64::max)
        };
        let ratio_shift = shift(&p2) / shift(&p1);
        assert!(
            ratio_shift > 2.5 && ratio_shift < 5.5,
            "shift ratio {ratio_shift}"
        );
    }

    #[test]
    fn diagonal_is_real_diagonal_matrix() {
        let g = CutoffProfile::gaussian(0.3, 1.0).unwrap();
        let k = kernel(
            SpacetimePoint::default(),
            &g,
            EnergySign::Negative,
            KernelPower::Double,
            m1(),
        )
        .unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(k.value.0[i][j].norm() < 1e-12 * k.value.max_abs());
                } else {
                    assert!(k.value.0[i][j].im.abs() < 1e-12 * k.value.max_abs());
                }
            }
        }
        let (c1, c2) = diagonal_components(&k.value);
        assert!(c1.re > 0.0);
        assert!(c2.re < 0.0); // negative branch: - ||g^2|| gamma^0
    }

    #[test]
    fn conjugation_symmetry_at_random_separations() {
        let g = CutoffProfile::sharp(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..5 {
            let xi = SpacetimePoint::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
            .unwrap();
            let minus_xi = SpacetimePoint::new(-xi.t, -xi.x1, -xi.x2, -xi.x3).unwrap();
            for sign in [EnergySign::Negative, EnergySign::Positive] {
                let k = kernel(xi, &g, sign, KernelPower::Double, m1()).unwrap();
                let km = kernel(minus_xi, &g, sign, KernelPower::Double, m1()).unwrap();
                let want = conjugate_flip(&k.value);
                let rel = km.value.max_abs_diff(&want) / k.value.max_abs().max(1e-30);
                assert!(rel < 1e-8, "sign {sign:?}: rel = {rel}");
            }
        }
    }

    #[test]
    fn spacelike_decay_of_entries() {
        let g = CutoffProfile::gaussian(0.5, 1.0).unwrap();
        let mut mags = Vec::new();
        for r in [2.0, 4.0, 8.0, 16.0] {
            let xi = SpacetimePoint::new(0.0, r, 0.0, 0.0).unwrap();
            let k = kernel(xi, &g, EnergySign::Negative, KernelPower::Double, m1()).unwrap();
            mags.push(k.value.max_abs());
        }
        for w in mags.windows(2) {
            assert!(w[1] < w[0], "magnitudes {mags:?}");
        }
    }

    #[test]
    fn single_mode_lattice_sum() {
        // one cell at momentum k0: the sum is
        // (+-)(2 pi)^(-1) (2 pi)^(-3) V g(k0)^2 p(k0) gamma^0 phase
        let k0 = ThreeMomentum::new(0.4, -0.2, 0.1).unwrap();
        let vol = 0.3;
        let lat = MomentumLattice::single_mode(k0, vol);
        let g = CutoffProfile::gaussian(0.7, 1.0).unwrap();
        let x = SpacetimePoint::new(0.2, 0.1, 0.0, -0.4).unwrap();
        let y = SpacetimePoint::new(-0.1, 0.3, 0.2, 0.0).unwrap();
        for sign in [EnergySign::Negative, EnergySign::Positive] {
            let got = kernel_from_lattice_sum(x, y, &lat, &g, sign, m1());
            let s = sign.signum();
            let w = crate::dirac::omega(k0, m1());
            let dt = x.t - y.t;
            let dxv = x.spatial();
            let dyv = y.spatial();
            let kdotdx = k0.k1 * (dxv.k1 - dyv.k1)
                + k0.k2 * (dxv.k2 - dyv.k2)
                + k0.k3 * (dxv.k3 - dyv.k3);
            let phase = Complex64::new(0.0, -(s * w * dt - kdotdx)).exp();
            let gv = g.eval(k0.norm());
            let p = crate::dirac::energy_projector(k0, sign, m1());
            let cell_weight = vol / (2.0 * PI).powi(3);
            let want = (p * gamma(0)).scale(
                phase * Complex64::new(s * cell_weight * gv * gv / (2.0 * PI), 0.0),
            );
            let rel = got.value.max_abs_diff(&want) / want.max_abs();
            assert!(rel < 1e-12, "sign {sign:?} rel {rel}");
        }
    }

    #[test]
    fn lattice_sum_converges_to_diagonal_kernel() {
        let g = CutoffProfile::sharp(0.3).unwrap();
        let exact = kernel(
            SpacetimePoint::default(),
            &g,
            EnergySign::Negative,
            KernelPower::Double,
            m1(),
        )
        .unwrap();
        let extent = 1.1 / 0.3;
        let mut errs = Vec::new();
        for n in [16usize, 32] {
            let lat = MomentumLattice::uniform(n, extent);
            let got = kernel_from_lattice_sum(
                SpacetimePoint::default(),
                SpacetimePoint::default(),
                &lat,
                &g,
                EnergySign::Negative,
                m1(),
            );
            errs.push(got.value.max_abs_diff(&exact.value) / exact.value.max_abs());
        }
        assert!(errs[1] < errs[0]);
        assert!(errs[1] < 1e-2, "errs = {errs:?}");
    }

    #[test]
    fn causal_combination_is_difference_of_branches() {
        let g = CutoffProfile::gaussian(0.5, 1.0).unwrap();
        let xi = SpacetimePoint::new(0.4, 0.2, -0.6, 0.3).unwrap();
        let c = kernel_causal(xi, &g, KernelPower::Double, m1()).unwrap();
        let neg = kernel(xi, &g, EnergySign::Negative, KernelPower::Double, m1()).unwrap();
        let pos = kernel(xi, &g, EnergySign::Positive, KernelPower::Double, m1()).unwrap();
        let want = neg.value - pos.value;
        assert!(c.value.max_abs_diff(&want) < 1e-14 * want.max_abs().max(1e-30));
        // the diagonal causal kernel is pure gamma^0: the identity parts cancel
        let c0 = kernel_causal(SpacetimePoint::default(), &g, KernelPower::Double, m1()).unwrap();
        let (id_part, g0_part) = diagonal_components(&c0.value);
        assert!(id_part.norm() < 1e-10 * g0_part.norm());
        assert!(g0_part.re < 0.0);
    }

    #[test]
    fn perturbation_empty_states_reproduces_spectrum() {
        let g = CutoffProfile::sharp(0.2).unwrap();
        let p = perturbed_diagonal(&g, m1(), &[]).unwrap();
        let mut re: Vec<f64> = p.eigenvalues.iter().map(|l| l.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] - p.lambda_minus).abs() < 1e-6 * p.lambda_minus.abs());
        assert!((re[1] - p.lambda_minus).abs() < 1e-6 * p.lambda_minus.abs());
        assert!((re[2] - p.lambda_plus).abs() < 1e-6 * p.lambda_plus);
        assert!((re[3] - p.lambda_plus).abs() < 1e-6 * p.lambda_plus);
        assert!(p.bauer_fike_bound < 1e-14);
    }

    #[test]
    fn perturbation_respects_bauer_fike() {
        let g = CutoffProfile::sharp(0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n_states = rng.gen_range(1..4);
            let states: Vec<(Bispinor, EnergySign)> = (0..n_states)
                .map(|_| {
                    let v = Bispinor([
                        Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)),
                        Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)),
                        Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)),
                        Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)),
                    ]);
                    let s = if rng.gen_bool(0.5) {
                        EnergySign::Positive
                    } else {
                        EnergySign::Negative
                    };
                    (v, s)
                })
                .collect();
            let p = perturbed_diagonal(&g, m1(), &states).unwrap();
            for d in eigenvalue_distances(&p) {
                assert!(
                    d <= p.bauer_fike_bound * (1.0 + 1e-9) + 1e-12,
                    "distance {d} exceeds {b}",
                    b = p.bauer_fike_bound
                );
            }
        }
    }
}
