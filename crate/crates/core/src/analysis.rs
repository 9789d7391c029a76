//! Certification quantities evaluated exactly on the canonical state
//! `cos η |00⟩ + sin η |11⟩`: the CHSH value and the witness
//! `W = 1⊗1 − σ_Z⊗σ_Z − σ_X⊗σ_X`.

use crate::error::{Error, Result};
use crate::instrument::{effect, Basis, Outcome};
use crate::protocol::{bob_observable, StepParams};
use crate::qcore::{expectation, pauli, Axis, Ket4, Op2, Op4};
use crate::scalar::Scalar;

/// The four correlators `⟨A_i B_j⟩` and their CHSH combination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChshBreakdown<T> {
    /// Indexed `[i][j]` by Alice's and Bob's setting.
    pub correlators: [[T; 2]; 2],
    pub s_value: T,
}

impl<T: Scalar> ChshBreakdown<T> {
    pub fn from_correlators(correlators: [[T; 2]; 2]) -> Self {
        let c = correlators;
        Self {
            correlators,
            s_value: c[0][0] + c[0][1] + c[1][0] - c[1][1],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessReport<T> {
    pub expectation: T,
    /// Separable states satisfy `⟨W⟩ ≥ separable_bound` (zero).
    pub separable_bound: T,
}

impl<T: Scalar> WitnessReport<T> {
    pub fn detects_entanglement(&self) -> bool {
        self.expectation < self.separable_bound
    }
}

/// Projector onto outcome `b` of a ±1-valued observable: `(1 + b·B)/2`.
pub(crate) fn dichotomic_projector<T: Scalar>(obs: &Op2<T>, outcome: Outcome) -> Op2<T> {
    (Op2::identity() + obs.scale(outcome.value())).scale(T::lit(0.5))
}

/// Born-rule correlator `Σ_{a,b} a·b ⟨ψ| E_{a|i}(μ) ⊗ Π_{b|B_j} |ψ⟩`.
fn correlator<T: Scalar>(step: &StepParams<T>, state: &Ket4<T>, i: usize, j: usize) -> Result<T> {
    let setting = step.setting(Basis::from_index(i)?)?;
    let bob = bob_observable(step, j)?;
    let mut total = T::zero();
    for a in Outcome::ALL {
        for b in Outcome::ALL {
            let joint = effect(&setting, a).tensor(&dichotomic_projector(&bob, b));
            total = total + a.value::<T>() * b.value::<T>() * expectation(&joint, state)?;
        }
    }
    Ok(total)
}

/// CHSH value from the four Born-rule correlators.
pub fn chsh_exact<T: Scalar>(step: &StepParams<T>) -> Result<ChshBreakdown<T>> {
    if !(step.eta > T::zero()) {
        return Err(Error::DegenerateState);
    }
    let state = Ket4::canonical(step.eta);
    let mut c = [[T::zero(); 2]; 2];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = correlator(step, &state, i, j)?;
        }
    }
    Ok(ChshBreakdown::from_correlators(c))
}

/// `S = 2 cos(2μ) √(1 + sin²(2η))`.
pub fn chsh_closed_form<T: Scalar>(eta: T, mu: T) -> T {
    let two = T::lit(2.0);
    two * (two * mu).cos() * (T::one() + (two * eta).sin().powi(2)).sqrt()
}

pub fn witness_operator<T: Scalar>() -> Op4<T> {
    let zz = pauli::<T>(Axis::Z).tensor(&pauli(Axis::Z));
    let xx = pauli::<T>(Axis::X).tensor(&pauli(Axis::X));
    Op4::identity() - zz - xx
}

/// `⟨W⟩` on the step's canonical state; analytically `−sin 2η`.
pub fn witness_expectation<T: Scalar>(step: &StepParams<T>) -> Result<WitnessReport<T>> {
    Ok(WitnessReport {
        expectation: expectation(&witness_operator(), &Ket4::canonical(step.eta))?,
        separable_bound: T::zero(),
    })
}

/// Min-entropy (bits) certified by a CHSH value through the standard
/// guessing-probability bound `P_g = ½ + ½ √(2 − S²/4)`.
///
/// Values above `2√2` by less than the algebraic tolerance are clamped.
pub fn min_entropy_bound<T: Scalar>(s_value: T) -> Result<T> {
    let two = T::lit(2.0);
    let tsirelson = two * T::SQRT_2();
    if !(s_value >= two) || s_value > tsirelson + T::algebra_tol() {
        return Err(Error::OutOfRange {
            value: s_value.as_f64(),
            low: 2.0,
            high: 2.0 * std::f64::consts::SQRT_2,
        });
    }
    // 2 − S²/4 factored so it stays accurate near the Tsirelson bound
    let slack = ((tsirelson - s_value) * (tsirelson + s_value) / T::lit(4.0)).max(T::zero());
    let half = T::lit(0.5);
    Ok(-(half + half * slack.sqrt()).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{bob_angle, max_sharpness};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

    fn step(eta: f64, mu: f64) -> StepParams<f64> {
        StepParams {
            eta,
            alpha: 0.0,
            beta: 0.0,
            theta: bob_angle(eta),
            mu,
            bob_rotation: 0.0,
        }
    }

    #[test]
    fn chsh_examples() {
        let tsirelson = chsh_exact(&step(FRAC_PI_4, 0.0)).unwrap();
        assert!((tsirelson.s_value - 2.0 * SQRT_2).abs() < 1e-12);
        assert!((chsh_exact(&step(FRAC_PI_4, 0.34)).unwrap().s_value - 2.20).abs() < 0.005);
        // step-3 amplified branch: η = arctan(tan 0.19 / tan 0.34), θ from η
        let eta = (0.19_f64.tan() / 0.34_f64.tan()).atan();
        assert!((chsh_exact(&step(eta, 0.0)).unwrap().s_value - 2.61).abs() < 0.005);
        assert_eq!(chsh_exact(&step(0.0, 0.0)), Err(Error::DegenerateState));
    }

    #[test]
    fn breakdown_is_consistent() {
        let b = chsh_exact(&step(0.3, 0.1)).unwrap();
        let c = b.correlators;
        assert!((b.s_value - (c[0][0] + c[0][1] + c[1][0] - c[1][1])).abs() < 1e-12);
        assert!(c.iter().flatten().all(|x| x.abs() <= 1.0));
    }

    #[test]
    fn closed_form_examples() {
        assert!((chsh_closed_form(FRAC_PI_4, 0.0) - 2.0 * SQRT_2).abs() < 1e-15);
        assert!((chsh_closed_form(0.34_f64, 0.19) - 2.19).abs() < 0.005);
        assert!((chsh_closed_form(0.07_f64, 0.0) - 2.02).abs() < 0.005);
    }

    #[test]
    fn closed_form_matches_born_rule() {
        for eta in [0.07, 0.12, 0.34, 0.50, FRAC_PI_4] {
            for mu in [0.0, 0.19, 0.34] {
                let exact = chsh_exact(&step(eta, mu)).unwrap().s_value;
                assert!((exact - chsh_closed_form(eta, mu)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn violation_iff_below_max_sharpness() {
        for k in 1..=50 {
            let eta = FRAC_PI_4 * k as f64 / 50.0;
            let limit = max_sharpness(eta).unwrap();
            assert!((chsh_closed_form(eta, limit) - 2.0).abs() < 1e-9);
            assert!(chsh_closed_form(eta, 0.95 * limit) > 2.0);
            assert!(chsh_closed_form(eta, (1.05 * limit).min(FRAC_PI_4)) < 2.0);
        }
    }

    #[test]
    fn witness_examples() {
        let w = witness_operator::<f64>();
        assert!(w.is_hermitian());
        assert!((expectation(&w, &Ket4::bell()).unwrap() + 1.0).abs() < 1e-15);
        assert!(expectation(&w, &Ket4::basis(0)).unwrap().abs() < 1e-15);
        let psi_plus = Ket4::from_real([0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
        assert!((expectation(&w, &psi_plus).unwrap() - 1.0).abs() < 1e-15);
        // eigenvectors of W: Bell basis
        let singlet = Ket4::from_real([0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]);
        let phi_minus = Ket4::from_real([FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2]);
        assert!((expectation(&w, &singlet).unwrap() - 3.0).abs() < 1e-15);
        assert!((expectation(&w, &phi_minus).unwrap() - 1.0).abs() < 1e-15);
        assert!((w.trace().re - 4.0).abs() < 1e-15);
    }

    #[test]
    fn witness_on_canonical_states() {
        for (eta, printed) in [(0.34, -0.63), (0.50, -0.84), (0.12, -0.23)] {
            let r = witness_expectation(&step(eta, 0.0)).unwrap();
            assert!((r.expectation + (2.0 * eta).sin()).abs() < 1e-12);
            assert!((r.expectation - printed).abs() < 0.01);
            assert!(r.detects_entanglement());
        }
    }

    #[test]
    fn min_entropy_examples() {
        assert_eq!(min_entropy_bound(2.0).unwrap(), 0.0);
        assert!((min_entropy_bound(2.0 * SQRT_2).unwrap() - 1.0).abs() < 1e-12);
        // −log₂(½ + ½√(2 − 2.61²/4))
        assert!((min_entropy_bound(2.61_f64).unwrap() - 0.372_435_998_400_727_6).abs() < 1e-12);
        assert!(min_entropy_bound(1.99).is_err());
        assert!(min_entropy_bound(3.0).is_err());
    }
}
