//! Exact 4x4 Dirac algebra in the standard (Dirac) representation.
//!
//! Conventions: metric signature (+,-,-,-), natural units (hbar = c = 1),
//! momenta in units of the mass m, lengths in 1/m. The spin inner product
//! on C^4 is `conj(a) b = a^dag gamma^0 b`.

use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{CfsError, Result};

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Particle mass, strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mass(f64);

impl Mass {
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() || m <= 0.0 {
            return Err(CfsError::InvalidArgument(format!(
                "mass must be finite and positive, got {m}"
            )));
        }
        Ok(Mass(m))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Mass {
    fn default() -> Self {
        Mass(1.0)
    }
}

/// Spatial momentum k in units of m.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThreeMomentum {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl ThreeMomentum {
    pub fn new(k1: f64, k2: f64, k3: f64) -> Result<Self> {
        if !(k1.is_finite() && k2.is_finite() && k3.is_finite()) {
            return Err(CfsError::InvalidArgument(format!(
                "momentum components must be finite, got ({k1}, {k2}, {k3})"
            )));
        }
        Ok(ThreeMomentum { k1, k2, k3 })
    }

    pub fn norm_sq(self) -> f64 {
        self.k1 * self.k1 + self.k2 * self.k2 + self.k3 * self.k3
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dot(self, other: ThreeMomentum) -> f64 {
        self.k1 * other.k1 + self.k2 * other.k2 + self.k3 * other.k3
    }

    pub fn scale(self, c: f64) -> ThreeMomentum {
        ThreeMomentum {
            k1: c * self.k1,
            k2: c * self.k2,
            k3: c * self.k3,
        }
    }
}

/// Spacetime point x = (t, x1, x2, x3) in units of 1/m.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, x1: f64, x2: f64, x3: f64) -> Result<Self> {
        if !(t.is_finite() && x1.is_finite() && x2.is_finite() && x3.is_finite()) {
            return Err(CfsError::InvalidArgument(format!(
                "spacetime components must be finite, got ({t}, {x1}, {x2}, {x3})"
            )));
        }
        Ok(SpacetimePoint { t, x1, x2, x3 })
    }

    pub fn spatial(self) -> ThreeMomentum {
        ThreeMomentum {
            k1: self.x1,
            k2: self.x2,
            k3: self.x3,
        }
    }

    pub fn spatial_norm(self) -> f64 {
        self.spatial().norm()
    }

}

impl Add for SpacetimePoint {
    type Output = SpacetimePoint;
    fn add(self, other: SpacetimePoint) -> SpacetimePoint {
        SpacetimePoint {
            t: self.t + other.t,
            x1: self.x1 + other.x1,
            x2: self.x2 + other.x2,
            x3: self.x3 + other.x3,
        }
    }
}

impl Sub for SpacetimePoint {
    type Output = SpacetimePoint;
    fn sub(self, other: SpacetimePoint) -> SpacetimePoint {
        SpacetimePoint {
            t: self.t - other.t,
            x1: self.x1 - other.x1,
            x2: self.x2 - other.x2,
            x3: self.x3 - other.x3,
        }
    }
}

/// Sign of the energy branch k^0 = +omega or k^0 = -omega.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    pub fn signum(self) -> f64 {
        match self {
            EnergySign::Positive => 1.0,
            EnergySign::Negative => -1.0,
        }
    }
}

/// Spin label of the plane-wave basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// Energy on the mass shell, omega(k) = sqrt(|k|^2 + m^2) >= m.
pub fn omega(k: ThreeMomentum, m: Mass) -> f64 {
    (k.norm_sq() + m.value() * m.value()).sqrt()
}

/// Complex 4-component spinor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bispinor(pub [Complex64; 4]);

impl Bispinor {
    pub const ZERO: Bispinor = Bispinor([C_ZERO; 4]);

    pub fn basis(mu: usize) -> Bispinor {
        assert!(mu < 4, "basis index out of range: {mu}");
        let mut v = [C_ZERO; 4];
        v[mu] = C_ONE;
        Bispinor(v)
    }

    /// Euclidean inner product a^dag b.
    pub fn dot(&self, other: &Bispinor) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Spin inner product conj(a) b = a^dag gamma^0 b.
    pub fn spin_dot(&self, other: &Bispinor) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
            - self.0[2].conj() * other.0[2]
            - self.0[3].conj() * other.0[3]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).re.sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Bispinor {
        let mut v = self.0;
        for e in &mut v {
            *e *= c;
        }
        Bispinor(v)
    }

    /// Rank-one matrix a * (conj(b)) built with the spin conjugate row vector.
    pub fn outer_spin(&self, other: &Bispinor) -> SpinMatrix {
        let conj_row = [
            other.0[0].conj(),
            other.0[1].conj(),
            -other.0[2].conj(),
            -other.0[3].conj(),
        ];
        let mut m = SpinMatrix::zero();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = self.0[i] * conj_row[j];
            }
        }
        m
    }
}

impl Add for Bispinor {
    type Output = Bispinor;
    fn add(self, rhs: Bispinor) -> Bispinor {
        let mut v = self.0;
        for (a, b) in v.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
        Bispinor(v)
    }
}

impl Sub for Bispinor {
    type Output = Bispinor;
    fn sub(self, rhs: Bispinor) -> Bispinor {
        let mut v = self.0;
        for (a, b) in v.iter_mut().zip(rhs.0.iter()) {
            *a -= b;
        }
        Bispinor(v)
    }
}

impl Neg for Bispinor {
    type Output = Bispinor;
    fn neg(self) -> Bispinor {
        self.scale(-C_ONE)
    }
}

/// Dense complex 4x4 matrix acting on bispinors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMatrix(pub [[Complex64; 4]; 4]);

impl SpinMatrix {
    pub fn zero() -> SpinMatrix {
        SpinMatrix([[C_ZERO; 4]; 4])
    }

    pub fn identity() -> SpinMatrix {
        let mut m = SpinMatrix::zero();
        for i in 0..4 {
            m[(i, i)] = C_ONE;
        }
        m
    }

    pub fn adjoint(&self) -> SpinMatrix {
        let mut m = SpinMatrix::zero();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, c: Complex64) -> SpinMatrix {
        let mut m = *self;
        for row in &mut m.0 {
            for e in row {
                *e *= c;
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2] + self.0[3][3]
    }

    pub fn apply(&self, v: &Bispinor) -> Bispinor {
        let mut out = [C_ZERO; 4];
        for i in 0..4 {
            let mut s = C_ZERO;
            for j in 0..4 {
                s += self.0[i][j] * v.0[j];
            }
            out[i] = s;
        }
        Bispinor(out)
    }

    /// Largest absolute entry, used for entrywise comparisons.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &SpinMatrix) -> f64 {
        let mut d = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }
}

impl Index<(usize, usize)> for SpinMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for SpinMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for SpinMatrix {
    type Output = SpinMatrix;
    fn add(self, rhs: SpinMatrix) -> SpinMatrix {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for SpinMatrix {
    type Output = SpinMatrix;
    fn sub(self, rhs: SpinMatrix) -> SpinMatrix {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

impl Mul for SpinMatrix {
    type Output = SpinMatrix;
    fn mul(self, rhs: SpinMatrix) -> SpinMatrix {
        let mut m = SpinMatrix::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut s = C_ZERO;
                for l in 0..4 {
                    s += self.0[i][l] * rhs.0[l][j];
                }
                m.0[i][j] = s;
            }
        }
        m
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dirac matrix gamma^mu in the standard representation:
/// gamma^0 = diag(1,1,-1,-1), gamma^i = [[0, sigma_i], [-sigma_i, 0]].
pub fn gamma(mu: usize) -> SpinMatrix {
    assert!(mu < 4, "gamma index out of range: {mu}");
    let o = C_ZERO;
    let u = C_ONE;
    let i = C_I;
    match mu {
        0 => SpinMatrix([
            [u, o, o, o],
            [o, u, o, o],
            [o, o, -u, o],
            [o, o, o, -u],
        ]),
        1 => SpinMatrix([
            [o, o, o, u],
            [o, o, u, o],
            [o, -u, o, o],
            [-u, o, o, o],
        ]),
        2 => SpinMatrix([
            [o, o, o, -i],
            [o, o, i, o],
            [o, i, o, o],
            [-i, o, o, o],
        ]),
        _ => SpinMatrix([
            [o, o, u, o],
            [o, o, o, -u],
            [-u, o, o, o],
            [o, u, o, o],
        ]),
    }
}

/// k . gamma = k1 gamma^1 + k2 gamma^2 + k3 gamma^3.
pub fn slash_spatial(k: ThreeMomentum) -> SpinMatrix {
    let o = C_ZERO;
    let kp = c(k.k1, k.k2);
    let km = c(k.k1, -k.k2);
    let k3 = c(k.k3, 0.0);
    // assembled entrywise; agrees with k1*gamma(1)+k2*gamma(2)+k3*gamma(3)
    SpinMatrix([
        [o, o, k3, km],
        [o, o, kp, -k3],
        [-k3, -km, o, o],
        [-kp, k3, o, o],
    ])
}

/// Momentum-space Hamiltonian symbol h(k) = gamma^0 (k . gamma) + m gamma^0.
///
/// Hermitian with eigenvalues +-omega(k), each twice.
pub fn hamiltonian_symbol(k: ThreeMomentum, m: Mass) -> SpinMatrix {
    let g0 = gamma(0);
    g0 * slash_spatial(k) + g0.scale(c(m.value(), 0.0))
}

/// Spectral projector p_(+-)(k) onto the positive/negative branch of h(k):
/// p_(+-) = (1/2)(I -+ (k.gamma/omega) gamma^0 +- (m/omega) gamma^0).
pub fn energy_projector(k: ThreeMomentum, sign: EnergySign, m: Mass) -> SpinMatrix {
    let w = omega(k, m);
    let s = sign.signum();
    let half = c(0.5, 0.0);
    let kg_g0 = slash_spatial(k) * gamma(0);
    let mut p = SpinMatrix::identity();
    p = p + kg_g0.scale(c(-s / w, 0.0)) + gamma(0).scale(c(s * m.value() / w, 0.0));
    p.scale(half)
}

fn pauli_dot(k: ThreeMomentum) -> [[Complex64; 2]; 2] {
    [
        [c(k.k3, 0.0), c(k.k1, -k.k2)],
        [c(k.k1, k.k2), c(-k.k3, 0.0)],
    ]
}

/// Fundamental spinor chi^(+-)_(up|down)(k) spanning the branch subspaces:
/// chi^+ = (e_s, (sigma.k)/(omega+m) e_s), chi^- = (-(sigma.k)/(omega+m) e_s, e_s).
///
/// Not normalized; |chi|^2 = 2 omega / (omega + m).
pub fn fundamental_spinor(k: ThreeMomentum, sign: EnergySign, spin: Spin, m: Mass) -> Bispinor {
    let w = omega(k, m);
    let denom = w + m.value();
    let s = pauli_dot(k);
    let col = match spin {
        Spin::Up => 0,
        Spin::Down => 1,
    };
    let sk = [s[0][col] / denom, s[1][col] / denom];
    let e = |row: usize| if row == col { C_ONE } else { C_ZERO };
    match sign {
        EnergySign::Positive => Bispinor([e(0), e(1), sk[0], sk[1]]),
        EnergySign::Negative => Bispinor([-sk[0], -sk[1], e(0), e(1)]),
    }
}

/// Squared Euclidean norm of the fundamental spinor, 2 omega / (omega + m).
pub fn fundamental_spinor_norm_sq(k: ThreeMomentum, m: Mass) -> f64 {
    let w = omega(k, m);
    2.0 * w / (w + m.value())
}
