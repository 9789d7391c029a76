//! Exact linear algebra on one- and two-qubit spaces.
//!
//! Kets and operators are fixed-size arrays of complex amplitudes; two-qubit
//! objects use the basis ordering `|00⟩, |01⟩, |10⟩, |11⟩` with Alice's qubit
//! first. The only decomposition offered is the Schmidt form of a *real*
//! two-qubit state, parameterized by two Y-rotations and an entanglement
//! angle.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{reduce_half_turn, Scalar};

/// State vector of dimension `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ket<T, const N: usize> {
    amps: [Complex<T>; N],
}

/// Single-qubit ket.
pub type Ket2<T> = Ket<T, 2>;
/// Two-qubit ket, ordered `|00⟩, |01⟩, |10⟩, |11⟩`.
pub type Ket4<T> = Ket<T, 4>;

/// Square operator of dimension `N`, stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Operator<T, const N: usize> {
    m: [[Complex<T>; N]; N],
}

pub type Op2<T> = Operator<T, 2>;
pub type Op4<T> = Operator<T, 4>;

impl<T: Scalar, const N: usize> Ket<T, N> {
    pub fn new(amps: [Complex<T>; N]) -> Self {
        Self { amps }
    }

    pub fn from_real(amps: [T; N]) -> Self {
        Self {
            amps: amps.map(|a| Complex::new(a, T::zero())),
        }
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(index: usize) -> Self {
        assert!(index < N, "basis index {index} out of range for dimension {N}");
        let mut amps = [Complex::zero(); N];
        amps[index] = Complex::one();
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex<T>; N] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - T::one()).abs() <= T::algebra_tol()
    }

    pub(crate) fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized {
                norm_sqr: self.norm_sqr().as_f64(),
            })
        }
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > T::zero()) || !n2.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: n2.as_f64() });
        }
        Ok(self.scale(T::one() / n2.sqrt()))
    }

    pub fn scale(&self, k: T) -> Self {
        Self {
            amps: self.amps.map(|a| a * k),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Largest imaginary part among the amplitudes.
    pub fn max_imag(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc.max(a.im.abs()))
    }

    /// Real parts of the amplitudes, or `None` if any imaginary part exceeds
    /// the algebraic tolerance.
    pub fn real_parts(&self) -> Option<[T; N]> {
        if self.max_imag() > T::algebra_tol() {
            None
        } else {
            Some(self.amps.map(|a| a.re))
        }
    }

    /// Largest entrywise distance to `other`, minimized over the global sign.
    pub fn distance_up_to_sign(&self, other: &Self) -> T {
        let plus = self
            .amps
            .iter()
            .zip(other.amps.iter())
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm()));
        let minus = self
            .amps
            .iter()
            .zip(other.amps.iter())
            .fold(T::zero(), |acc, (a, b)| acc.max((a + b).norm()));
        plus.min(minus)
    }
}

impl<T: Scalar> Ket2<T> {
    pub fn zero() -> Self {
        Self::basis(0)
    }

    pub fn one() -> Self {
        Self::basis(1)
    }

    /// `|+⟩ = (|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::from_real([h, h])
    }

    /// `|−⟩ = (|0⟩ − |1⟩)/√2`.
    pub fn minus() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::from_real([h, -h])
    }

    pub fn tensor(&self, other: &Ket2<T>) -> Ket4<T> {
        let [a0, a1] = self.amps;
        let [b0, b1] = other.amps;
        Ket4::new([a0 * b0, a0 * b1, a1 * b0, a1 * b1])
    }
}

impl<T: Scalar> Ket4<T> {
    /// `cos η |00⟩ + sin η |11⟩`.
    pub fn canonical(eta: T) -> Self {
        Self::from_real([eta.cos(), T::zero(), T::zero(), eta.sin()])
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        Self::canonical(T::FRAC_PI_4())
    }

    /// `2 |c₀₀ c₁₁ − c₀₁ c₁₀|`.
    pub fn concurrence(&self) -> T {
        let [a, b, c, d] = self.amps;
        (a * d - b * c).norm() * T::lit(2.0)
    }
}

impl<T: Scalar, const N: usize> Operator<T, N> {
    pub fn new(m: [[Complex<T>; N]; N]) -> Self {
        Self { m }
    }

    pub fn from_real(m: [[T; N]; N]) -> Self {
        Self {
            m: m.map(|row| row.map(|x| Complex::new(x, T::zero()))),
        }
    }

    pub fn zero() -> Self {
        Self {
            m: [[Complex::zero(); N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = [[Complex::zero(); N]; N];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex::one();
        }
        Self { m }
    }

    pub fn diag(d: [T; N]) -> Self {
        let mut m = [[Complex::zero(); N]; N];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex::new(d[i], T::zero());
        }
        Self { m }
    }

    /// Outer product `|ket⟩⟨ket|`.
    pub fn projector(ket: &Ket<T, N>) -> Self {
        let a = ket.amplitudes();
        let mut m = [[Complex::zero(); N]; N];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = a[r] * a[c].conj();
            }
        }
        Self { m }
    }

    pub fn entries(&self) -> &[[Complex<T>; N]; N] {
        &self.m
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = [[Complex::zero(); N]; N];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = self.m[c][r].conj();
            }
        }
        Self { m }
    }

    pub fn scale(&self, k: T) -> Self {
        Self {
            m: self.m.map(|row| row.map(|x| x * k)),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..N).fold(Complex::zero(), |acc, i| acc + self.m[i][i])
    }

    /// Entrywise maximum of `|self − other|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for r in 0..N {
            for c in 0..N {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self) -> bool {
        self.max_abs_diff(&self.adjoint()) <= T::algebra_tol()
    }

    pub fn is_unitary(&self) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Self::identity()) <= T::algebra_tol()
    }

    pub fn apply(&self, ket: &Ket<T, N>) -> Ket<T, N> {
        let a = ket.amplitudes();
        let mut out = [Complex::zero(); N];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..N).fold(Complex::zero(), |acc, c| acc + self.m[r][c] * a[c]);
        }
        Ket::new(out)
    }
}

impl<T: Scalar> Op2<T> {
    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Op2<T>) -> Op4<T> {
        let mut m = [[Complex::zero(); 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = self.m[r / 2][c / 2] * other.m[r % 2][c % 2];
            }
        }
        Op4::new(m)
    }

    /// `self ⊗ 1`: acts on Alice's qubit only.
    pub fn on_alice(&self) -> Op4<T> {
        self.tensor(&Op2::identity())
    }

    /// `1 ⊗ self`: acts on Bob's qubit only.
    pub fn on_bob(&self) -> Op4<T> {
        Op2::identity().tensor(self)
    }
}

impl<T: Scalar, const N: usize> Add for Operator<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self.m;
        for (row, rrow) in m.iter_mut().zip(rhs.m.iter()) {
            for (x, y) in row.iter_mut().zip(rrow.iter()) {
                *x = *x + *y;
            }
        }
        Self { m }
    }
}

impl<T: Scalar, const N: usize> Sub for Operator<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar, const N: usize> Neg for Operator<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Scalar, const N: usize> Mul for Operator<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = [[Complex::zero(); N]; N];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = (0..N).fold(Complex::zero(), |acc, k| acc + self.m[r][k] * rhs.m[k][c]);
            }
        }
        Self { m }
    }
}

impl<T: Scalar, const N: usize> Mul<Ket<T, N>> for Operator<T, N> {
    type Output = Ket<T, N>;
    fn mul(self, rhs: Ket<T, N>) -> Ket<T, N> {
        self.apply(&rhs)
    }
}

/// Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn pauli<T: Scalar>(axis: Axis) -> Op2<T> {
    let o = Complex::zero();
    let l = Complex::one();
    let i = Complex::i();
    match axis {
        Axis::X => Op2::new([[o, l], [l, o]]),
        Axis::Y => Op2::new([[o, -i], [i, o]]),
        Axis::Z => Op2::new([[l, o], [o, -l]]),
    }
}

/// `exp(−i·angle·σ_Y) = [[cos a, −sin a], [sin a, cos a]]`.
pub fn rotation_y<T: Scalar>(angle: T) -> Op2<T> {
    let (s, c) = angle.sin_cos();
    Op2::from_real([[c, -s], [s, c]])
}

pub fn tensor<T: Scalar>(a: &Op2<T>, b: &Op2<T>) -> Op4<T> {
    a.tensor(b)
}

pub fn tensor_ket<T: Scalar>(a: &Ket2<T>, b: &Ket2<T>) -> Ket4<T> {
    a.tensor(b)
}

/// Born-rule expectation `⟨ψ|M|ψ⟩` of a Hermitian observable.
pub fn expectation<T: Scalar, const N: usize>(obs: &Operator<T, N>, state: &Ket<T, N>) -> Result<T> {
    let deviation = obs.max_abs_diff(&obs.adjoint());
    if deviation > T::algebra_tol() {
        return Err(Error::NonHermitian {
            deviation: deviation.as_f64(),
        });
    }
    state.ensure_normalized()?;
    let value = state.inner(&obs.apply(state));
    debug_assert!(
        value.im.abs() <= T::lit(10.0) * T::algebra_tol(),
        "imaginary residue {} on Hermitian expectation",
        value.im
    );
    Ok(value.re)
}

/// Real two-qubit state written as `R_Y(α) ⊗ R_Y(β) · (cos η |00⟩ + sin η |11⟩)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchmidtResult<T> {
    /// Entanglement angle in `[0, π/4]`; `tan η` is the ratio of the smaller to
    /// the larger singular value.
    pub eta: T,
    /// Alice's rotation angle in `(−π/2, π/2]`.
    pub alpha: T,
    /// Bob's rotation angle in `(−π/2, π/2]`.
    pub beta: T,
}

impl<T: Scalar> SchmidtResult<T> {
    pub fn reconstruct(&self) -> Ket4<T> {
        rotation_y(self.alpha)
            .tensor(&rotation_y(self.beta))
            .apply(&Ket4::canonical(self.eta))
    }
}

/// Schmidt decomposition of a normalized real two-qubit state.
///
/// Write the amplitudes as the 2×2 matrix `C[a][b] = ⟨ab|ψ⟩` and split it into
/// a rotation-like part `ρ₁·R(α−β)` and a reflection-like part
/// `ρ₂·Z·R(−(α+β))`. Then the singular values are `ρ₁ ± ρ₂` and both angles
/// follow from two `atan2` calls. States whose coefficient matrix has negative
/// determinant need a reflection on one side and are rejected.
///
/// At `η = π/4` only `α − β` is determined; the result then carries `β = 0`.
pub fn schmidt_decompose<T: Scalar>(state: &Ket4<T>) -> Result<SchmidtResult<T>> {
    let magnitude = state.max_imag();
    if magnitude > T::algebra_tol() {
        return Err(Error::ComplexStateUnsupported {
            magnitude: magnitude.as_f64(),
        });
    }
    state.ensure_normalized()?;
    let [c00, c01, c10, c11] = state.amplitudes().map(|a| a.re);
    let two = T::lit(2.0);

    let p = (c00 + c11) / two;
    let q = (c10 - c01) / two;
    let r = (c00 - c11) / two;
    let t = (c01 + c10) / two;
    let rot = p.hypot(q);
    let refl = r.hypot(t);

    let det = c00 * c11 - c01 * c10;
    if det < -T::algebra_tol() {
        return Err(Error::ReflectedState { det: det.as_f64() });
    }

    let larger = rot + refl;
    let smaller = (rot - refl).max(T::zero());
    let eta = smaller.atan2(larger);

    let diff = q.atan2(p);
    let (alpha, beta) = if refl <= T::algebra_tol() {
        (diff, T::zero())
    } else {
        let sum = t.atan2(r);
        ((sum + diff) / two, (sum - diff) / two)
    };

    Ok(SchmidtResult {
        eta,
        alpha: reduce_half_turn(alpha),
        beta: reduce_half_turn(beta),
    })
}
