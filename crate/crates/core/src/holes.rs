//! Holes and particles: approximating smooth sets, the non-recursive Gram
//! determinant orthogonalization, projection onto the complement of a hole
//! subspace, the microscopic behaviour distribution, regularity experiments
//! and eigenvalue-perturbation verification.

use num_complex::Complex64;

use crate::correlation::{correlation_from_values, spin_space_report, SpinSpaceReport};
use crate::cutoff::CutoffProfile;
use crate::dirac::{Bispinor, EnergySign, Mass, SpacetimePoint, SpinMatrix};
use crate::error::{CfsError, Result};
use crate::family::SolutionFamily;
use crate::kernel::{eigenvalue_distances, perturbed_diagonal, PerturbedDiagonal};
use crate::lattice::LatticeSea;
use crate::linalg::{determinant, general_eigenvalues, operator_norm, solve, CMatrix};

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Non-recursive Gram-Schmidt: the i-th orthogonal member is the cofactor
/// expansion of the bordered Gram determinant, normalized to coefficient one
/// on the i-th input. Matches the recursive algorithm exactly in exact
/// arithmetic.
pub fn gram_determinant_orthogonalize(
    family: &SolutionFamily,
    members: &[Vec<Complex64>],
) -> Result<Vec<Vec<Complex64>>> {
    let n = members.len();
    let gram = family.members_gram(members);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // top block entry (r, c) = (phi_r | phi_c) for r < i, c <= i;
        // the orthogonal member is sum_k (-1)^(i + k) det(minor without
        // column k) phi_k / det(minor without column i)
        let mut coeffs_on_members = vec![C_ZERO; n];
        if i == 0 {
            coeffs_on_members[0] = C_ONE;
        } else {
            let mut dets = Vec::with_capacity(i + 1);
            for skip in 0..=i {
                let mut minor = CMatrix::zeros(i);
                for r in 0..i {
                    let mut cc = 0;
                    for c in 0..=i {
                        if c == skip {
                            continue;
                        }
                        minor[(r, cc)] = gram[(r, c)];
                        cc += 1;
                    }
                }
                dets.push(determinant(&minor));
            }
            let pivot = dets[i];
            if pivot.norm() < 1e-250 {
                return Err(CfsError::DegenerateFamily {
                    cond: f64::INFINITY,
                    limit: 1e12,
                });
            }
            for (k, d) in dets.iter().enumerate() {
                let sign = if (i + k) % 2 == 0 { 1.0 } else { -1.0 };
                coeffs_on_members[k] = d / pivot * Complex64::new(sign, 0.0);
            }
        }
        // expand member combination back onto the packet basis
        let dim = family.len();
        let mut c = vec![C_ZERO; dim];
        for (k, w) in coeffs_on_members.iter().enumerate() {
            if w.norm() == 0.0 {
                continue;
            }
            for (ci, mi) in c.iter_mut().zip(members[k].iter()) {
                *ci += w * mi;
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Orthonormal smooth members psi_i approximating an orthonormal hole basis
/// u_i with closeness eps_tol, together with the overlap matrix
/// M_ji = (u_j | psi_i).
#[derive(Debug, Clone)]
pub struct ApproximatingSet {
    pub target: Vec<Vec<Complex64>>,
    pub psi: Vec<Vec<Complex64>>,
    pub overlap: CMatrix,
    pub eps_tol: f64,
    pub m_inverse_norm: f64,
}

pub fn approximating_set(
    family: &SolutionFamily,
    target: Vec<Vec<Complex64>>,
    psi: Vec<Vec<Complex64>>,
    eps_tol: f64,
) -> Result<ApproximatingSet> {
    if target.len() != psi.len() || target.is_empty() {
        return Err(CfsError::InvalidArgument(
            "approximating set needs matching nonempty bases".into(),
        ));
    }
    let n = target.len();
    for i in 0..n {
        // || u_i - psi_i || < eps_tol
        let mut diff = target[i].clone();
        for (d, p) in diff.iter_mut().zip(psi[i].iter()) {
            *d -= p;
        }
        let dist = family.member_norm(&diff);
        if dist >= eps_tol {
            return Err(CfsError::InvalidArgument(format!(
                "psi_{i} misses its target by {dist}, tolerance {eps_tol}"
            )));
        }
    }
    let mut overlap = CMatrix::zeros(n);
    for j in 0..n {
        for i in 0..n {
            overlap[(j, i)] = family.member_inner(&target[j], &psi[i]);
            let want = if i == j { 1.0 } else { 0.0 };
            if (overlap[(j, i)] - Complex64::new(want, 0.0)).norm() > eps_tol {
                return Err(CfsError::InvalidArgument(format!(
                    "overlap ({j},{i}) deviates from identity beyond {eps_tol}"
                )));
            }
        }
    }
    // nonsingularity witness
    let eigs = general_eigenvalues(&overlap)?;
    if eigs.iter().any(|l| l.norm() < 1e-12) {
        return Err(CfsError::NonApproximatingSet);
    }
    // || M^-1 ||_2 via the smallest singular value
    let m_inverse_norm = {
        let ata = overlap.adjoint().mul(&overlap);
        let e = crate::linalg::hermitian_eigen(&ata)?;
        let min = e.values.last().copied().unwrap_or(0.0).max(0.0);
        if min == 0.0 {
            f64::INFINITY
        } else {
            1.0 / min.sqrt()
        }
    };
    Ok(ApproximatingSet {
        target,
        psi,
        overlap,
        eps_tol,
        m_inverse_norm,
    })
}

/// Solves M lambda = D for the unique coefficients making
/// Psi[phi] = phi - sum_i lambda_i psi_i orthogonal to every u_j.
pub fn project_out(
    family: &SolutionFamily,
    aset: &ApproximatingSet,
    phi: &[Complex64],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = aset.target.len();
    let d: Vec<Complex64> = (0..n)
        .map(|j| family.member_inner(&aset.target[j], phi))
        .collect();
    let lambda = solve(&aset.overlap, &d).map_err(|_| CfsError::NonApproximatingSet)?;
    let mut psi_phi = phi.to_vec();
    for (i, l) in lambda.iter().enumerate() {
        for (c, p) in psi_phi.iter_mut().zip(aset.psi[i].iter()) {
            *c -= l * p;
        }
    }
    Ok((psi_phi, lambda))
}

/// E(psi, eps, x) = |psi(x)| + eps sum_i ||J psi_i||_(x, inf): the density
/// term plus eps times the summed gradient bounds.
#[derive(Debug, Clone, Copy)]
pub struct MicroBehaviour {
    pub density_term: f64,
    pub gradient_term: f64,
    pub value: f64,
}

pub fn micro_behaviour(
    family: &SolutionFamily,
    members: &[Vec<Complex64>],
    x: SpacetimePoint,
    epsilon: f64,
) -> Result<MicroBehaviour> {
    let mut density_sq = 0.0;
    let mut grad = 0.0;
    for c in members {
        let v = family.member_value(c, x, None)?;
        density_sq += v.dot(&v).re;
        grad += family.member_jacobian_bound(c)?;
    }
    let density_term = density_sq.max(0.0).sqrt();
    let gradient_term = epsilon * grad;
    Ok(MicroBehaviour {
        density_term,
        gradient_term,
        value: density_term + gradient_term,
    })
}

pub const MACROSCOPIC_LIMIT: f64 = 1e9;

impl MicroBehaviour {
    /// E < 1e9 m^(3/2) in units of the mass.
    pub fn is_macroscopic(&self, m: Mass) -> bool {
        self.value < MACROSCOPIC_LIMIT * m.value().powf(1.5)
    }
}

/// Outcome of the hole-regularity experiment: the numerical rank verdict of
/// the four projected special solutions at x0 and, separately, the analytic
/// bound chain values (applicable only when ||M^-1|| < 2).
#[derive(Debug, Clone)]
pub struct HoleRegularityReport {
    pub spin_report: SpinSpaceReport,
    pub values: Vec<Bispinor>,
    pub a_alpha_bounds: Option<[f64; 4]>,
    pub analytic_pass: Option<bool>,
    pub micro: MicroBehaviour,
    pub m_inverse_norm: f64,
    pub lambdas: Vec<Vec<Complex64>>,
}

/// Projects the four special solutions through the approximating set,
/// regularizes, evaluates at x0 and reports rank and bound data.
///
/// `specials` are the coefficient vectors of the four special solutions in
/// the family, ordered (b-up, b-down, a-up, a-down) to match the unit
/// vectors e_0 .. e_3 at x0; `c_alpha` are their center values (the
/// normalizations beta / gamma with signs).
pub fn hole_regularity_experiment(
    family: &SolutionFamily,
    aset: &ApproximatingSet,
    specials: &[Vec<Complex64>; 4],
    c_alpha: [Complex64; 4],
    profile_norms: [f64; 4],
    x0: SpacetimePoint,
    g: &CutoffProfile,
    rank_tau: f64,
) -> Result<HoleRegularityReport> {
    let epsilon = g.epsilon;
    let mut values = Vec::with_capacity(4);
    let mut lambdas = Vec::with_capacity(4);
    let mut jac_specials = [0.0f64; 4];
    for (idx, phi) in specials.iter().enumerate() {
        let (psi_phi, lambda) = project_out(family, aset, phi)?;
        let v = family.member_value(&psi_phi, x0, Some(g))?;
        values.push(v);
        lambdas.push(lambda);
        jac_specials[idx] = family.member_jacobian_bound(phi)?;
    }
    let corr = correlation_from_values(values.clone(), x0);
    let spin_report = spin_space_report(&corr, rank_tau)?;
    let micro = micro_behaviour(family, &aset.psi, x0, epsilon)?;

    // analytic chain: A_alpha <= eps ||J u_alpha|| / |C| +
    //   (2^3 pi^(3/2) ||G_alpha|| / |C|) (eps sum_i ||J psi_i|| + |psi(x0)|)
    let analytic = if aset.m_inverse_norm < 2.0 {
        let mut bounds = [0.0f64; 4];
        let mut sum_jac_psi = 0.0;
        for p in &aset.psi {
            sum_jac_psi += family.member_jacobian_bound(p)?;
        }
        let mut psi_density_sq = 0.0;
        for p in &aset.psi {
            let v = family.member_value(p, x0, None)?;
            psi_density_sq += v.dot(&v).re;
        }
        let psi_density = psi_density_sq.max(0.0).sqrt();
        let coef = 8.0 * std::f64::consts::PI.powf(1.5);
        for alpha in 0..4 {
            let c = c_alpha[alpha].norm().max(1e-300);
            bounds[alpha] = epsilon * jac_specials[alpha] / c
                + coef * profile_norms[alpha] / c * (epsilon * sum_jac_psi + psi_density);
        }
        let pass = bounds.iter().all(|b| *b < 0.25);
        (Some(bounds), Some(pass))
    } else {
        (None, None)
    };

    Ok(HoleRegularityReport {
        spin_report,
        values,
        a_alpha_bounds: analytic.0,
        analytic_pass: analytic.1,
        micro,
        m_inverse_norm: aset.m_inverse_norm,
        lambdas,
    })
}

/// Removes the four range vectors of F(x0) from a lattice sea and returns
/// the operator norm of the compressed correlation operator at x0, which
/// must collapse to zero.
pub fn lattice_hole_degeneracy(
    sea: &LatticeSea,
    g: &CutoffProfile,
    m: Mass,
    x0: SpacetimePoint,
) -> Result<f64> {
    let values = sea.mode_values(x0, g, m);
    // range of F(x0): coefficient vectors W^dag y for the eigenvectors y of
    // the 4x4 compression -gamma^0 W W^dag
    let ww = LatticeSea::ww_outer(&values);
    let hole_dirs = orthonormal_range_coeffs(&values, &ww)?;
    // compressed operator: Pi0 F Pi0 with Pi0 = I - sum b b^dag;
    // its norm equals the norm of -gamma^0 (W Pi0)(W Pi0)^dag
    // (W Pi0)(W Pi0)^dag = W W^dag - sum_i (W b_i)(W b_i)^dag
    let mut compressed = ww;
    for b in &hole_dirs {
        let wb = LatticeSea::w_apply(&values, b);
        for i in 0..4 {
            for j in 0..4 {
                compressed.0[i][j] -= wb.0[i] * wb.0[j].conj();
            }
        }
    }
    let g0 = crate::dirac::gamma(0);
    let f0 = (g0 * compressed).scale(Complex64::new(-1.0, 0.0));
    Ok(operator_norm(&CMatrix::from_spin(&f0)))
}

fn orthonormal_range_coeffs(
    values: &[Bispinor],
    ww: &SpinMatrix,
) -> Result<Vec<Vec<Complex64>>> {
    // eigenvectors of the Hermitian W W^dag with nonzero eigenvalue span the
    // column space of W; W^dag of that basis spans the range of the
    // correlation operator on coefficients
    let e = crate::linalg::hermitian_eigen(&CMatrix::from_spin(ww))?;
    let scale = e.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut raw: Vec<Vec<Complex64>> = Vec::new();
    for (val, vec) in e.values.iter().zip(e.vectors.iter()) {
        if *val > 1e-12 * scale {
            let y = Bispinor([vec[0], vec[1], vec[2], vec[3]]);
            raw.push(LatticeSea::w_adjoint(values, &y));
        }
    }
    // Gram-Schmidt in coefficient space (Euclidean)
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for mut v in raw {
        for b in &out {
            let proj: Complex64 = b.iter().zip(v.iter()).map(|(bi, vi)| bi.conj() * vi).sum();
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi -= proj * bi;
            }
        }
        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-14 {
            for c in v.iter_mut() {
                *c /= Complex64::new(norm, 0.0);
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Result of the eigenvalue-perturbation experiment: the perturbed kernel
/// spectrum, the Bauer-Fike radius and the microscopic-behaviour bound,
/// both of which must dominate every eigenvalue displacement.
#[derive(Debug, Clone)]
pub struct PerturbationExperiment {
    pub perturbed: PerturbedDiagonal,
    pub distances: Vec<f64>,
    pub micro_bound: f64,
    pub micro: MicroBehaviour,
}

/// `states` are orthonormal members of the family with their energy signs.
pub fn eigenvalue_perturbation_experiment(
    family: &SolutionFamily,
    states: &[(Vec<Complex64>, EnergySign)],
    x: SpacetimePoint,
    g: &CutoffProfile,
) -> Result<PerturbationExperiment> {
    let m = family.m;
    let mut value_sign: Vec<(Bispinor, EnergySign)> = Vec::with_capacity(states.len());
    for (c, s) in states {
        value_sign.push((family.member_value(c, x, Some(g))?, *s));
    }
    let perturbed = perturbed_diagonal(g, m, &value_sign)?;
    let distances = eigenvalue_distances(&perturbed);
    let members: Vec<Vec<Complex64>> = states.iter().map(|(c, _)| c.clone()).collect();
    let micro = micro_behaviour(family, &members, x, g.epsilon)?;
    // 2 pi ||Delta P|| <= 2 E^2, so eigenvalue displacements are bounded by
    // E^2 / pi
    let micro_bound = micro.value * micro.value / std::f64::consts::PI;
    Ok(PerturbationExperiment {
        perturbed,
        distances,
        micro_bound,
        micro,
    })
}
