//! Local correlation matrices on finite solution families: rank and
//! signature reports, the spin-space isometry, current densities, the
//! eigenvector basis generated by the kernel, translation covariance and
//! injectivity probing.

use num_complex::Complex64;

use crate::cutoff::CutoffProfile;
use crate::dirac::{gamma, Bispinor, EnergySign, Mass, SpacetimePoint};
use crate::error::Result;
use crate::family::SolutionFamily;
use crate::kernel::{diagonal_spectrum, DiagonalSpectrum};
use crate::lattice::LatticeSea;
use crate::linalg::{hermitian_eigen, operator_norm, CMatrix};

/// Hermitian Gram-type matrix M_ij = -conj(R u_i(x)) R u_j(x) of the
/// regularized member values at a point; rank at most four with at most two
/// positive and two negative eigenvalues.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub matrix: CMatrix,
    pub values: Vec<Bispinor>,
    pub point: SpacetimePoint,
}

pub fn correlation_matrix(
    family: &SolutionFamily,
    members: &[Vec<Complex64>],
    x: SpacetimePoint,
    g: &CutoffProfile,
) -> Result<CorrelationMatrix> {
    let values: Vec<Bispinor> = members
        .iter()
        .map(|c| family.member_value(c, x, Some(g)))
        .collect::<Result<_>>()?;
    Ok(correlation_from_values(values, x))
}

pub fn correlation_from_values(values: Vec<Bispinor>, x: SpacetimePoint) -> CorrelationMatrix {
    let n = values.len();
    let mut matrix = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            matrix[(i, j)] = -values[i].spin_dot(&values[j]);
        }
    }
    CorrelationMatrix {
        matrix,
        values,
        point: x,
    }
}

/// Rank, signature and eigenvalue data of a correlation matrix. The rank
/// threshold is tau times the largest eigenvalue magnitude.
#[derive(Debug, Clone)]
pub struct SpinSpaceReport {
    pub rank: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    pub eigenvalues: Vec<f64>,
    pub regular: bool,
    /// coefficient vectors of the eigenvectors counted in the rank
    pub range_basis: Vec<Vec<Complex64>>,
}

pub const DEFAULT_RANK_TAU: f64 = 1e-8;

pub fn spin_space_report(m: &CorrelationMatrix, tau: f64) -> Result<SpinSpaceReport> {
    let eig = hermitian_eigen(&m.matrix)?;
    let scale = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let thr = tau * scale;
    let mut n_plus = 0;
    let mut n_minus = 0;
    let mut range_basis = Vec::new();
    for (v, vec) in eig.values.iter().zip(eig.vectors.iter()) {
        if *v > thr {
            n_plus += 1;
            range_basis.push(vec.clone());
        } else if *v < -thr {
            n_minus += 1;
            range_basis.push(vec.clone());
        }
    }
    let rank = n_plus + n_minus;
    Ok(SpinSpaceReport {
        rank,
        n_plus,
        n_minus,
        eigenvalues: eig.values,
        regular: rank == 4,
        range_basis,
    })
}

/// Internal-consistency check of the spin-space inner product: the matrix
/// path and a fresh pointwise path must agree entrywise.
pub fn isometry_check(
    family: &SolutionFamily,
    members: &[Vec<Complex64>],
    x: SpacetimePoint,
    g: &CutoffProfile,
) -> Result<f64> {
    let corr = correlation_matrix(family, members, x, g)?;
    let mut max_dev = 0.0f64;
    for (i, a) in members.iter().enumerate() {
        let va = family.member_value(a, x, Some(g))?;
        for (j, b) in members.iter().enumerate() {
            let vb = family.member_value(b, x, Some(g))?;
            // <u|v>_x = -(u|F(x)v) equals the spin product of the values
            let direct = va.spin_dot(&vb);
            let via_matrix = -corr.matrix[(i, j)];
            max_dev = max_dev.max((direct - via_matrix).norm());
        }
    }
    Ok(max_dev)
}

/// Regularized current density sum_i conj(R u_i(x)) gamma^mu R u_i(x);
/// real, and nonnegative for mu = 0.
pub fn current_density(
    family: &SolutionFamily,
    members: &[Vec<Complex64>],
    x: SpacetimePoint,
    mu: usize,
    g: &CutoffProfile,
) -> Result<f64> {
    assert!(mu < 4, "current index out of range: {mu}");
    let gm = gamma(0) * gamma(mu);
    let mut total = 0.0;
    for c in members {
        let v = family.member_value(c, x, Some(g))?;
        let gv = gm.apply(&v);
        total += v.dot(&gv).re;
    }
    Ok(total)
}

/// Current density of a list of raw bispinor values (for lattice seas).
pub fn current_density_of_values(values: &[Bispinor], mu: usize) -> f64 {
    let gm = gamma(0) * gamma(mu);
    values.iter().map(|v| v.dot(&gm.apply(v)).re).sum()
}

/// Compares the spectra of F at x + a with the translated family at x.
pub fn translation_covariance_check(
    family: &SolutionFamily,
    members: &[Vec<Complex64>],
    x: SpacetimePoint,
    a: SpacetimePoint,
    g: &CutoffProfile,
) -> Result<f64> {
    let direct = correlation_matrix(family, members, x + a, g)?;
    // translated members evaluated at x: each member value is
    // sum_i c_i (U_a u_i)(x) = sum_i c_i u_i(x + a), via translated packets
    let translated_values: Vec<Bispinor> = members
        .iter()
        .map(|c| {
            let packets = family.member_translate(c, a);
            let mut v = Bispinor::ZERO;
            for p in &packets {
                v = v + crate::packet::evaluate_regularized(p, x, g, family.m)?;
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let translated = correlation_from_values(translated_values, x);
    let ed = hermitian_eigen(&direct.matrix)?;
    let et = hermitian_eigen(&translated.matrix)?;
    let mut dev = 0.0f64;
    for (a_val, b_val) in ed.values.iter().zip(et.values.iter()) {
        dev = dev.max((a_val - b_val).abs());
    }
    Ok(dev)
}

/// Pairwise operator-norm distances ||F(x_i) - F(x_j)||_2 over a point grid.
#[derive(Debug, Clone)]
pub struct InjectivityReport {
    pub min_distance: f64,
    pub min_pair: (usize, usize),
    pub distances: Vec<(usize, usize, f64)>,
    pub separated: bool,
}

pub fn injectivity_probe(
    family: &SolutionFamily,
    members: &[Vec<Complex64>],
    points: &[SpacetimePoint],
    g: &CutoffProfile,
    separation_threshold: f64,
) -> Result<InjectivityReport> {
    let mats: Vec<CorrelationMatrix> = points
        .iter()
        .map(|&x| correlation_matrix(family, members, x, g))
        .collect::<Result<_>>()?;
    let mut distances = Vec::new();
    let mut min_distance = f64::INFINITY;
    let mut min_pair = (0, 0);
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = operator_norm(&mats[i].matrix.sub(&mats[j].matrix));
            if d < min_distance {
                min_distance = d;
                min_pair = (i, j);
            }
            distances.push((i, j, d));
        }
    }
    if points.len() < 2 {
        min_distance = 0.0;
    }
    Ok(InjectivityReport {
        min_distance,
        min_pair,
        distances,
        separated: min_distance > separation_threshold,
    })
}

/// The four kernel-generated states e_(x, mu) on a lattice sea: coefficient
/// vectors of P_eps(. , x) e_mu over the mode basis, their eigenvalue
/// residuals under the correlation operator, and the diagonal spectrum they
/// should reproduce.
#[derive(Debug, Clone)]
pub struct EigenbasisReport {
    /// per mu: expected eigenvalue 2 pi lambda (minus branch for mu = 0, 1)
    pub expected: [f64; 4],
    /// per mu: measured Rayleigh quotient of F on e_(x, mu)
    pub measured: [f64; 4],
    /// per mu: relative residual ||F e - lambda e|| / (|lambda| ||e||)
    pub residuals: [f64; 4],
    pub spectrum: DiagonalSpectrum,
    pub coefficients: Vec<Vec<Complex64>>,
    /// set when the cell size resolves the cutoff support poorly
    pub coarse_warning: bool,
}

pub fn eigenbasis_at_point(
    sea: &LatticeSea,
    g: &CutoffProfile,
    m: Mass,
    x: SpacetimePoint,
) -> Result<EigenbasisReport> {
    let spec = diagonal_spectrum(g, m)?;
    let values = sea.mode_values(x, g, m);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut expected = [0.0f64; 4];
    let mut measured = [0.0f64; 4];
    let mut residuals = [0.0f64; 4];
    let mut coefficients = Vec::with_capacity(4);
    for mu in 0..4 {
        // e_(x, mu) has mode coefficients v_m^dag (gamma^0-structured source):
        // the state P_eps(., x) e_mu expands over modes with coefficients
        // proportional to conj(value components); the kernel already carries
        // one cutoff factor through the mode values.
        let e_mu = Bispinor::basis(mu);
        let sgn = match sea.sign {
            EnergySign::Negative => -1.0,
            EnergySign::Positive => 1.0,
        };
        let coeffs: Vec<Complex64> = values
            .iter()
            .map(|v| {
                // (phi_m | P(., x) e_mu) = sgn (2 pi)^(-1) v_m^dag gamma^0 e_mu
                Complex64::new(sgn / two_pi, 0.0) * v.spin_dot(&e_mu)
            })
            .collect();
        let f_c = LatticeSea::f_apply(&values, &coeffs);
        let norm_sq: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let rayleigh: Complex64 = coeffs
            .iter()
            .zip(f_c.iter())
            .map(|(c, f)| c.conj() * f)
            .sum();
        let lam_expect = two_pi
            * if mu < 2 {
                spec.lambda_minus
            } else {
                spec.lambda_plus
            };
        let mut resid_sq = 0.0;
        for (c, f) in coeffs.iter().zip(f_c.iter()) {
            resid_sq += (f - c * Complex64::new(lam_expect, 0.0)).norm_sqr();
        }
        expected[mu] = lam_expect;
        measured[mu] = rayleigh.re / norm_sq.max(1e-300);
        residuals[mu] = (resid_sq.sqrt()) / (lam_expect.abs() * norm_sq.sqrt()).max(1e-300);
        coefficients.push(coeffs);
    }
    let coarse_warning = sea.lattice.max_cell_extent() > g.effective_radius(m) / 4.0;
    Ok(EigenbasisReport {
        expected,
        measured,
        residuals,
        spectrum: spec,
        coefficients,
        coarse_warning,
    })
}

/// Scales every entry of the correlation matrix of a family whose cutoff
/// amplitude was multiplied by c; used to assert exact c^2 bilinearity.
pub fn amplitude_scaling_defect(
    family: &SolutionFamily,
    members: &[Vec<Complex64>],
    x: SpacetimePoint,
    g: &CutoffProfile,
    c: f64,
) -> Result<f64> {
    let base = correlation_matrix(family, members, x, g)?;
    let scaled = correlation_matrix(family, members, x, &g.scaled(c))?;
    let mut dev = 0.0f64;
    let n = members.len();
    for i in 0..n {
        for j in 0..n {
            let want = base.matrix[(i, j)] * Complex64::new(c * c, 0.0);
            dev = dev.max((scaled.matrix[(i, j)] - want).norm());
        }
    }
    Ok(dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::{Spin, ThreeMomentum};
    use crate::lattice::MomentumLattice;
    use crate::packet::WavePacket;
    use std::f64::consts::PI;

    fn m1() -> Mass {
        Mass::new(1.0).unwrap()
    }

    fn origin() -> SpacetimePoint {
        SpacetimePoint::default()
    }

    fn vacuum_four(sigma: f64, x0: SpacetimePoint, m: Mass) -> (SolutionFamily, Vec<Vec<Complex64>>) {
        let a = (2.0 * PI.sqrt() * sigma).powi(-3);
        let b = PI.powf(-1.5) * sigma.powi(-5) / 16.0;
        let packets = vec![
            WavePacket::special_b(Spin::Up, sigma, b, x0).unwrap(),
            WavePacket::special_b(Spin::Down, sigma, b, x0).unwrap(),
            WavePacket::special_a(Spin::Up, sigma, a, x0).unwrap(),
            WavePacket::special_a(Spin::Down, sigma, a, x0).unwrap(),
        ];
        let fam = SolutionFamily::new(packets, m).unwrap();
        let members = fam.orthonormalize(&fam.identity_members()).unwrap();
        (fam, members)
    }

    #[test]
    fn single_packet_correlation_entry_is_real_nonpositive_trace() {
        let u = WavePacket::special_a(Spin::Up, 1.0, 1.0, origin()).unwrap();
        let fam = SolutionFamily::new(vec![u], m1()).unwrap();
        let members = fam.orthonormalize(&fam.identity_members()).unwrap();
        let g = CutoffProfile::sharp(0.3).unwrap();
        let corr = correlation_matrix(&fam, &members, origin(), &g).unwrap();
        assert!(corr.matrix[(0, 0)].im.abs() < 1e-12);
    }

    #[test]
    fn vacuum_family_rank_four_signature_2_2() {
        let (fam, members) = vacuum_four(1.0, origin(), m1());
        for meps in [1e-1, 1e-2] {
            let g = CutoffProfile::sharp(meps).unwrap();
            let corr = correlation_matrix(&fam, &members, origin(), &g).unwrap();
            let rep = spin_space_report(&corr, DEFAULT_RANK_TAU).unwrap();
            assert_eq!(rep.rank, 4, "meps={meps}: eigenvalues {:?}", rep.eigenvalues);
            assert_eq!((rep.n_plus, rep.n_minus), (2, 2));
            assert!(rep.regular);
        }
    }

    #[test]
    fn hermiticity_and_inertia_bounds() {
        let (fam, members) = vacuum_four(0.8, origin(), m1());
        let g = CutoffProfile::gaussian(0.2, 1.0).unwrap();
        let x = SpacetimePoint::new(0.3, -0.2, 0.4, 0.1).unwrap();
        let corr = correlation_matrix(&fam, &members, x, &g).unwrap();
        assert!(corr.matrix.hermitian_defect() < 1e-12 * corr.matrix.max_abs());
        let rep = spin_space_report(&corr, DEFAULT_RANK_TAU).unwrap();
        assert!(rep.n_plus <= 2 && rep.n_minus <= 2);
        assert!(rep.rank <= 4);
    }

    #[test]
    fn zero_matrix_reports_rank_zero() {
        let corr = correlation_from_values(vec![Bispinor::ZERO, Bispinor::ZERO], origin());
        let rep = spin_space_report(&corr, DEFAULT_RANK_TAU).unwrap();
        assert_eq!(rep.rank, 0);
        assert!(!rep.regular);
    }

    #[test]
    fn isometry_two_paths_agree() {
        let (fam, members) = vacuum_four(1.0, origin(), m1());
        let g = CutoffProfile::sharp(0.5).unwrap();
        let dev = isometry_check(&fam, &members, origin(), &g).unwrap();
        assert!(dev < 1e-12);
    }

    #[test]
    fn charge_density_positive_single_packet() {
        let u = WavePacket::special_a(Spin::Down, 1.0, 1.0, origin()).unwrap();
        let fam = SolutionFamily::new(vec![u], m1()).unwrap();
        let members = fam.orthonormalize(&fam.identity_members()).unwrap();
        let g = CutoffProfile::sharp(0.4).unwrap();
        let j0 = current_density(&fam, &members, origin(), 0, &g).unwrap();
        assert!(j0 > 0.0);
        // spatial currents of an isotropic packet at its center vanish
        for mu in 1..4 {
            let jmu = current_density(&fam, &members, origin(), mu, &g).unwrap();
            assert!(jmu.abs() < 1e-10 * j0, "mu={mu}: {jmu} vs {j0}");
        }
    }

    #[test]
    fn empty_member_list_zero_current() {
        let u = WavePacket::special_a(Spin::Up, 1.0, 1.0, origin()).unwrap();
        let fam = SolutionFamily::new(vec![u], m1()).unwrap();
        let g = CutoffProfile::sharp(0.4).unwrap();
        let j = current_density(&fam, &[], origin(), 0, &g).unwrap();
        assert_eq!(j, 0.0);
    }

    #[test]
    fn translation_covariance_zero_offset() {
        let (fam, members) = vacuum_four(1.0, origin(), m1());
        let g = CutoffProfile::sharp(0.5).unwrap();
        let dev =
            translation_covariance_check(&fam, &members, origin(), SpacetimePoint::default(), &g)
                .unwrap();
        assert!(dev < 1e-10);
    }

    #[test]
    fn amplitude_scaling_is_quadratic() {
        let (fam, members) = vacuum_four(1.0, origin(), m1());
        let g = CutoffProfile::sharp(0.5).unwrap();
        let dev = amplitude_scaling_defect(&fam, &members, origin(), &g, 1.7).unwrap();
        let base = correlation_matrix(&fam, &members, origin(), &g).unwrap();
        assert!(dev < 1e-12 * base.matrix.max_abs() * 1.7 * 1.7);
    }

    #[test]
    fn eigenbasis_reproduces_diagonal_spectrum() {
        let g = CutoffProfile::sharp(0.3).unwrap();
        let lat = MomentumLattice::uniform(20, 1.1 / 0.3);
        let sea = LatticeSea::new(lat, EnergySign::Negative);
        let rep = eigenbasis_at_point(&sea, &g, m1(), origin()).unwrap();
        assert!(rep.expected[0] < 0.0);
        assert!(rep.expected[3] > 0.0);
        for mu in 0..4 {
            assert!(
                (rep.measured[mu] - rep.expected[mu]).abs() / rep.expected[mu].abs() < 2e-2,
                "mu={mu}: measured {} expected {}",
                rep.measured[mu],
                rep.expected[mu]
            );
            assert!(rep.residuals[mu] < 5e-2, "mu={mu}: {}", rep.residuals[mu]);
        }
    }

    #[test]
    fn eigenbasis_translation_relation() {
        let g = CutoffProfile::sharp(0.4).unwrap();
        let lat = MomentumLattice::uniform(12, 1.1 / 0.4);
        let sea = LatticeSea::new(lat, EnergySign::Negative);
        let a = SpacetimePoint::new(0.3, -0.2, 0.5, 0.1).unwrap();
        let at_zero = eigenbasis_at_point(&sea, &g, m1(), origin()).unwrap();
        let at_a = eigenbasis_at_point(&sea, &g, m1(), a).unwrap();
        // e_(x + a, mu) is the inverse translate of e_(x, mu): F(x + a) =
        // U_a^dag F(x) U_a maps its eigenvectors through U_a^dag, so the
        // mode coefficients pick up the conjugate plane-wave phase of a
        for mu in 0..4 {
            let mut max_dev = 0.0f64;
            let mut scale = 0.0f64;
            for (mode, (c0, ca)) in sea
                .lattice
                .modes(sea.sign)
                .zip(at_zero.coefficients[mu].iter().zip(at_a.coefficients[mu].iter()))
            {
                let w = crate::dirac::omega(mode.k, m1());
                let s = mode.sign.signum();
                let phase = Complex64::new(
                    0.0,
                    s * w * a.t - (mode.k.k1 * a.x1 + mode.k.k2 * a.x2 + mode.k.k3 * a.x3),
                )
                .exp();
                let translated = c0 * phase;
                max_dev = max_dev.max((translated - ca).norm());
                scale = scale.max(ca.norm());
            }
            assert!(max_dev < 1e-10 * scale.max(1e-30), "mu={mu}: {max_dev}");
        }
    }

    #[test]
    fn sub_family_compression_is_exact() {
        // the correlation matrix of a sub-family is the corresponding block
        // of the full matrix
        let (fam, members) = vacuum_four(1.0, origin(), m1());
        let g = CutoffProfile::sharp(0.3).unwrap();
        let x = SpacetimePoint::new(0.2, 0.4, -0.1, 0.3).unwrap();
        let full = correlation_matrix(&fam, &members, x, &g).unwrap();
        let sub = correlation_matrix(&fam, &members[..2], x, &g).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (full.matrix[(i, j)] - sub.matrix[(i, j)]).norm()
                        < 1e-12 * full.matrix.max_abs(),
                    "({i},{j})"
                );
            }
        }
    }

    #[test]
    fn current_difference_counts_particles_and_holes() {
        // tr(F_vac^mu - F^mu) over a lattice sea with one removed negative
        // mode and one added positive mode equals J_added - J_removed
        let g = CutoffProfile::sharp(0.5).unwrap();
        let lat = MomentumLattice::uniform(6, 1.1 / 0.5);
        let sea = LatticeSea::new(lat.clone(), EnergySign::Negative);
        let m = m1();
        let x = SpacetimePoint::new(0.2, -0.1, 0.4, 0.0).unwrap();
        let vac_values = sea.mode_values(x, &g, m);
        // remove the mode with the largest value, add one positive mode
        let removed_idx = 7usize;
        let added_mode = crate::lattice::LatticeMode {
            k: ThreeMomentum::new(0.3, 0.1, -0.2).unwrap(),
            volume: 0.2,
            spin: Spin::Up,
            sign: EnergySign::Positive,
        };
        let added_value = added_mode.reg_value(x, &g, m);
        let mut mod_values = vac_values.clone();
        mod_values.remove(removed_idx);
        mod_values.push(added_value);
        for mu in 0..4 {
            let tr_vac = -current_density_of_values(&vac_values, mu);
            let tr_mod = -current_density_of_values(&mod_values, mu);
            let j_removed = current_density_of_values(&[vac_values[removed_idx]], mu);
            let j_added = current_density_of_values(&[added_value], mu);
            let lhs = tr_vac - tr_mod;
            let rhs = j_added - j_removed;
            assert!(
                (lhs - rhs).abs() < 1e-12 * (lhs.abs().max(1.0)),
                "mu={mu}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn random_families_respect_rank_and_inertia_bounds() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(314);
        let g = CutoffProfile::sharp(0.3).unwrap();
        let mut draws = 0;
        while draws < 100 {
            let n = rng.gen_range(1..=5);
            let packets: Vec<WavePacket> = (0..n)
                .map(|_| {
                    let sign = if rng.gen_bool(0.5) {
                        crate::dirac::EnergySign::Negative
                    } else {
                        crate::dirac::EnergySign::Positive
                    };
                    let spin = if rng.gen_bool(0.5) { Spin::Up } else { Spin::Down };
                    WavePacket::isotropic_gaussian(
                        sign,
                        spin,
                        rng.gen_range(0.4..1.3),
                        SpacetimePoint::new(
                            rng.gen_range(-0.5..0.5),
                            rng.gen_range(-1.0..1.0),
                            rng.gen_range(-1.0..1.0),
                            rng.gen_range(-1.0..1.0),
                        )
                        .unwrap(),
                        ThreeMomentum::new(
                            rng.gen_range(-0.5..0.5),
                            rng.gen_range(-0.5..0.5),
                            rng.gen_range(-0.5..0.5),
                        )
                        .unwrap(),
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    )
                    .unwrap()
                })
                .collect();
            let fam = SolutionFamily::new(packets, m1()).unwrap();
            let members = match fam.orthonormalize(&fam.identity_members()) {
                Ok(m) => m,
                Err(_) => continue, // skip near-degenerate random draws
            };
            let x = SpacetimePoint::new(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
            .unwrap();
            let corr = correlation_matrix(&fam, &members, x, &g).unwrap();
            assert!(corr.matrix.hermitian_defect() <= 1e-12 * corr.matrix.max_abs().max(1e-300));
            let rep = spin_space_report(&corr, DEFAULT_RANK_TAU).unwrap();
            assert!(rep.rank <= 4);
            assert!(rep.n_plus <= 2 && rep.n_minus <= 2);
            draws += 1;
        }
    }

    #[test]
    fn injectivity_probe_separates_and_degenerates() {
        // a family of narrow packets at several momentum modes separates
        // distinct points
        let packets = vec![
            WavePacket::narrow_gaussian(EnergySign::Negative, Spin::Up, 0.3, ThreeMomentum::default())
                .unwrap(),
            WavePacket::narrow_gaussian(
                EnergySign::Negative,
                Spin::Up,
                0.3,
                ThreeMomentum::new(0.8, 0.0, 0.0).unwrap(),
            )
            .unwrap(),
            WavePacket::narrow_gaussian(
                EnergySign::Negative,
                Spin::Down,
                0.3,
                ThreeMomentum::new(0.0, 0.9, 0.3).unwrap(),
            )
            .unwrap(),
        ];
        let fam = SolutionFamily::new(packets, m1()).unwrap();
        let members = fam.orthonormalize(&fam.identity_members()).unwrap();
        let g = CutoffProfile::sharp(0.1).unwrap();
        let points = [
            origin(),
            SpacetimePoint::new(0.0, 1.0, 0.0, 0.0).unwrap(),
            SpacetimePoint::new(1.0, 0.0, 1.0, 0.0).unwrap(),
        ];
        let rep = injectivity_probe(&fam, &members, &points, &g, 1e-10).unwrap();
        assert!(rep.separated, "min distance {}", rep.min_distance);
        assert!(rep.min_distance > 0.0);

        // identical point pair: distance zero
        let rep0 = injectivity_probe(&fam, &members, &[origin(), origin()], &g, 1e-10).unwrap();
        assert!(rep0.min_distance < 1e-12);
        assert!(!rep0.separated);
    }
}
