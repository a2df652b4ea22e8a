//! Finite momentum lattices: the desk-scale surrogate for a Hilbert basis of
//! the negative (or positive) energy subspace. Each cell carries two
//! normalized plane-wave spinor modes; the induced correlation operator has
//! rank at most four, so all of its spectral data reduces to 4x4 problems.

use num_complex::Complex64;

use crate::cutoff::CutoffProfile;
use crate::dirac::{
    fundamental_spinor, fundamental_spinor_norm_sq, omega, Bispinor, EnergySign, Mass,
    SpacetimePoint, Spin, SpinMatrix,
};
use crate::dirac::ThreeMomentum;

const INV_TWO_PI_32: f64 = 0.063_493_635_934_240_97; // (2 pi)^(-3/2)

#[derive(Debug, Clone)]
pub struct MomentumLattice {
    /// (cell center, cell volume)
    pub cells: Vec<(ThreeMomentum, f64)>,
    cell_extent: f64,
}

impl MomentumLattice {
    /// Midpoint grid of n^3 cells over the cube [-extent, extent]^3.
    pub fn uniform(n_per_axis: usize, extent: f64) -> Self {
        let n = n_per_axis.max(1);
        let step = 2.0 * extent / n as f64;
        let vol = step * step * step;
        let coord = |i: usize| -extent + (i as f64 + 0.5) * step;
        let mut cells = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    cells.push((
                        ThreeMomentum {
                            k1: coord(i),
                            k2: coord(j),
                            k3: coord(l),
                        },
                        vol,
                    ));
                }
            }
        }
        MomentumLattice {
            cells,
            cell_extent: step,
        }
    }

    pub fn single_mode(k: ThreeMomentum, volume: f64) -> Self {
        MomentumLattice {
            cells: vec![(k, volume)],
            cell_extent: volume.cbrt(),
        }
    }

    pub fn max_cell_extent(&self) -> f64 {
        self.cell_extent
    }

    pub fn modes(&self, sign: EnergySign) -> impl Iterator<Item = LatticeMode> + '_ {
        self.cells.iter().flat_map(move |(k, vol)| {
            [Spin::Up, Spin::Down].into_iter().map(move |spin| LatticeMode {
                k: *k,
                volume: *vol,
                spin,
                sign,
            })
        })
    }

    pub fn mode_count(&self) -> usize {
        2 * self.cells.len()
    }
}

/// One normalized plane-wave spinor mode on a lattice cell.
#[derive(Debug, Clone, Copy)]
pub struct LatticeMode {
    pub k: ThreeMomentum,
    pub volume: f64,
    pub spin: Spin,
    pub sign: EnergySign,
}

impl LatticeMode {
    /// Regularized pointwise value
    /// (2 pi)^(-3/2) sqrt(V) g(|k|) chihat(k) e^(-i(sign omega t - k.x)).
    pub fn reg_value(&self, x: SpacetimePoint, g: &CutoffProfile, m: Mass) -> Bispinor {
        let w = omega(self.k, m);
        let s = self.sign.signum();
        let kx = self.k.k1 * x.x1 + self.k.k2 * x.x2 + self.k.k3 * x.x3;
        let phase = Complex64::new(0.0, -(s * w * x.t - kx)).exp();
        let chi = fundamental_spinor(self.k, self.sign, self.spin, m);
        let chi_norm = fundamental_spinor_norm_sq(self.k, m).sqrt();
        let scale =
            phase * Complex64::new(INV_TWO_PI_32 * self.volume.sqrt() * g.eval(self.k.norm()) / chi_norm, 0.0);
        chi.scale(scale)
    }

    /// Unregularized value (cutoff weight one).
    pub fn value(&self, x: SpacetimePoint, m: Mass) -> Bispinor {
        let w = omega(self.k, m);
        let s = self.sign.signum();
        let kx = self.k.k1 * x.x1 + self.k.k2 * x.x2 + self.k.k3 * x.x3;
        let phase = Complex64::new(0.0, -(s * w * x.t - kx)).exp();
        let chi = fundamental_spinor(self.k, self.sign, self.spin, m);
        let chi_norm = fundamental_spinor_norm_sq(self.k, m).sqrt();
        let scale = phase * Complex64::new(INV_TWO_PI_32 * self.volume.sqrt() / chi_norm, 0.0);
        chi.scale(scale)
    }
}

/// The lattice sea: all modes of one energy branch, with streaming access to
/// the 4x4 compressions of its correlation operator.
#[derive(Debug, Clone)]
pub struct LatticeSea {
    pub lattice: MomentumLattice,
    pub sign: EnergySign,
}

impl LatticeSea {
    pub fn new(lattice: MomentumLattice, sign: EnergySign) -> Self {
        LatticeSea { lattice, sign }
    }

    pub fn mode_values(&self, x: SpacetimePoint, g: &CutoffProfile, m: Mass) -> Vec<Bispinor> {
        self.lattice
            .modes(self.sign)
            .map(|mode| mode.reg_value(x, g, m))
            .collect()
    }

    /// W W^dag = sum over modes of v v^dag (4x4, Hermitian PSD); the nonzero
    /// spectrum of the correlation operator F(x) = -W^dag gamma^0 W on the
    /// mode basis equals the spectrum of -gamma^0 (W W^dag).
    pub fn ww_outer(values: &[Bispinor]) -> SpinMatrix {
        let mut acc = SpinMatrix::zero();
        for v in values {
            for i in 0..4 {
                for j in 0..4 {
                    acc.0[i][j] += v.0[i] * v.0[j].conj();
                }
            }
        }
        acc
    }

    /// F(x) applied to a coefficient vector: (F c)_m = -v_m^dag gamma^0 (sum_n c_n v_n).
    pub fn f_apply(values: &[Bispinor], coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut s = Bispinor::ZERO;
        for (v, c) in values.iter().zip(coeffs.iter()) {
            if c.norm() > 0.0 {
                s = s + v.scale(*c);
            }
        }
        values.iter().map(|v| -v.spin_dot(&s)).collect()
    }

    /// W^dag y for a 4-vector y: the coefficient vector of the state
    /// projecting y back onto the mode basis.
    pub fn w_adjoint(values: &[Bispinor], y: &Bispinor) -> Vec<Complex64> {
        values.iter().map(|v| v.dot(y)).collect()
    }

    /// W c: the pointwise value of the member with coefficients c.
    pub fn w_apply(values: &[Bispinor], coeffs: &[Complex64]) -> Bispinor {
        let mut s = Bispinor::ZERO;
        for (v, c) in values.iter().zip(coeffs.iter()) {
            if c.norm() > 0.0 {
                s = s + v.scale(*c);
            }
        }
        s
    }
}
