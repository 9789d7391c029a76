//! Unsharp two-outcome measurements on Alice's qubit.
//!
//! A measurement is fixed by a basis (σ_Z-like or σ_X-like) and a sharpness
//! angle `μ ∈ [0, π/4]`: `μ = 0` is projective, `μ = π/4` leaves the state
//! untouched and produces a fair coin. The Kraus operators are
//!
//! ```text
//! K₊ = cos μ · Π⁺ + sin μ · Π⁻
//! K₋ = sin μ · Π⁺ + cos μ · Π⁻
//! ```
//!
//! with `Π^±` the eigenprojectors of the basis Pauli. Effects and observables
//! are always derived from the Kraus operators.

use std::fmt;

use crate::error::{Error, Result};
use crate::qcore::{pauli, Axis, Ket2, Ket4, Op2};
use crate::scalar::Scalar;

/// Probabilities at or below this value count as impossible outcomes.
pub const OUTCOME_PROBABILITY_FLOOR: f64 = 1e-12;

/// Measurement basis: `Z` is `m = 0`, `X` is `m = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::Z, Basis::X];

    pub fn index(self) -> usize {
        match self {
            Basis::Z => 0,
            Basis::X => 1,
        }
    }

    pub fn from_index(m: usize) -> Result<Self> {
        match m {
            0 => Ok(Basis::Z),
            1 => Ok(Basis::X),
            other => Err(Error::IndexOutOfRange(other)),
        }
    }

    pub fn axis(self) -> Axis {
        match self {
            Basis::Z => Axis::Z,
            Basis::X => Axis::X,
        }
    }
}

/// Dichotomic outcome `±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> i32 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn value<T: Scalar>(self) -> T {
        match self {
            Outcome::Plus => T::one(),
            Outcome::Minus => -T::one(),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        })
    }
}

/// Basis choice plus sharpness; the sharpness is validated on construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementSetting<T> {
    basis: Basis,
    sharpness: T,
}

impl<T: Scalar> MeasurementSetting<T> {
    pub fn new(basis: Basis, sharpness: T) -> Result<Self> {
        validate_sharpness(sharpness)?;
        Ok(Self { basis, sharpness })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn sharpness(&self) -> T {
        self.sharpness
    }
}

/// Rejects `μ` outside `[0, π/4]` (including NaN).
pub fn validate_sharpness<T: Scalar>(mu: T) -> Result<()> {
    if mu >= T::zero() && mu <= T::FRAC_PI_4() {
        Ok(())
    } else {
        Err(Error::InvalidSharpness { mu: mu.as_f64() })
    }
}

/// Both Kraus operators of one setting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausPair<T> {
    pub k_plus: Op2<T>,
    pub k_minus: Op2<T>,
}

impl<T: Scalar> KrausPair<T> {
    pub fn new(setting: &MeasurementSetting<T>) -> Self {
        Self {
            k_plus: kraus(setting, Outcome::Plus),
            k_minus: kraus(setting, Outcome::Minus),
        }
    }

    pub fn get(&self, outcome: Outcome) -> &Op2<T> {
        match outcome {
            Outcome::Plus => &self.k_plus,
            Outcome::Minus => &self.k_minus,
        }
    }

    /// `K₊†K₊ + K₋†K₋`; the identity for a valid instrument.
    pub fn completeness(&self) -> Op2<T> {
        self.k_plus.adjoint() * self.k_plus + self.k_minus.adjoint() * self.k_minus
    }
}

/// Eigenprojector of the basis Pauli for eigenvalue `outcome`.
pub fn projector<T: Scalar>(basis: Basis, outcome: Outcome) -> Op2<T> {
    let ket = match (basis, outcome) {
        (Basis::Z, Outcome::Plus) => Ket2::zero(),
        (Basis::Z, Outcome::Minus) => Ket2::one(),
        (Basis::X, Outcome::Plus) => Ket2::plus(),
        (Basis::X, Outcome::Minus) => Ket2::minus(),
    };
    Op2::projector(&ket)
}

pub fn kraus<T: Scalar>(setting: &MeasurementSetting<T>, outcome: Outcome) -> Op2<T> {
    let (s, c) = setting.sharpness.sin_cos();
    let (on_match, on_other) = match outcome {
        Outcome::Plus => (c, s),
        Outcome::Minus => (s, c),
    };
    projector(setting.basis, Outcome::Plus).scale(on_match) + projector(setting.basis, Outcome::Minus).scale(on_other)
}

/// POVM effect `K†K`.
pub fn effect<T: Scalar>(setting: &MeasurementSetting<T>, outcome: Outcome) -> Op2<T> {
    let k = kraus(setting, outcome);
    k.adjoint() * k
}

/// `E₊ − E₋`, equal to `cos(2μ)·σ` for the basis Pauli `σ`.
pub fn observable<T: Scalar>(setting: &MeasurementSetting<T>) -> Op2<T> {
    effect(setting, Outcome::Plus) - effect(setting, Outcome::Minus)
}

/// Probability that Alice's measurement on `state` yields `outcome`.
pub fn outcome_probability<T: Scalar>(state: &Ket4<T>, setting: &MeasurementSetting<T>, outcome: Outcome) -> Result<T> {
    state.ensure_normalized()?;
    let k = kraus(setting, outcome).on_alice();
    // ⟨ψ|K†K|ψ⟩ = ‖Kψ‖², which is non-negative by construction
    Ok(k.apply(state).norm_sqr())
}

/// Applies `K ⊗ 1` and renormalizes.
pub fn apply_measurement<T: Scalar>(
    state: &Ket4<T>,
    setting: &MeasurementSetting<T>,
    outcome: Outcome,
) -> Result<Ket4<T>> {
    state.ensure_normalized()?;
    let branch = kraus(setting, outcome).on_alice().apply(state);
    let probability = branch.norm_sqr();
    if probability <= T::lit(OUTCOME_PROBABILITY_FLOOR) {
        return Err(Error::ImpossibleOutcome {
            probability: probability.as_f64(),
        });
    }
    Ok(branch.scale(T::one() / probability.sqrt()))
}

/// Basis Pauli as an operator, used for closed-form comparisons.
pub fn basis_pauli<T: Scalar>(basis: Basis) -> Op2<T> {
    pauli(basis.axis())
}
