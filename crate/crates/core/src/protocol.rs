//! The sequential protocol.
//!
//! At step `k` the shared state is `U_A,k ⊗ U_B,k (cos η_k |00⟩ + sin η_k |11⟩)`
//! with `U_A,k = R_Y(α_k)` and `U_B,k` a product of Y-rotations. Alice undoes
//! `U_A,k`, measures with sharpness `μ_k`, and the four possible outcomes map
//! `(η_k, μ_k)` to new `(α_{k+1}, β_{k+1}, η_{k+1})` in closed form:
//!
//! | Kraus    | α′                                | β′                                 | η′                          |
//! |----------|-----------------------------------|------------------------------------|-----------------------------|
//! | `K₊₁|₀`  | 0                                 | 0                                  | `arctan(tan μ · tan η)`     |
//! | `K₋₁|₀`  | π/2                               | π/2                                | `arctan(tan μ / tan η)`     |
//! | `K₊₁|₁`  | `½ arccot(tan 2μ · cos 2η)`       | `½ arctan(tan 2η · cos 2μ)`        | `½ arcsin(sin 2μ · sin 2η)` |
//! | `K₋₁|₁`  | negated                           | negated                            | same                        |
//!
//! Every quantity is evaluated through `atan2` so that `η = π/4` and the
//! `μ > η` corner of the `K₋₁|₀` row stay well defined.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::instrument::{
    apply_measurement, outcome_probability, validate_sharpness, Basis, MeasurementSetting, Outcome,
};
use crate::qcore::{pauli, rotation_y, Axis, Ket4, Op2};
use crate::scalar::{arccot, Scalar};

/// One of Alice's recorded (basis, outcome) pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HistoryEntry {
    pub basis: Basis,
    pub outcome: Outcome,
}

impl HistoryEntry {
    pub fn new(basis: Basis, outcome: Outcome) -> Self {
        Self { basis, outcome }
    }

    /// The four entries in table order: `+1|0, -1|0, +1|1, -1|1`.
    pub fn all() -> [HistoryEntry; 4] {
        [
            Self::new(Basis::Z, Outcome::Plus),
            Self::new(Basis::Z, Outcome::Minus),
            Self::new(Basis::X, Outcome::Plus),
            Self::new(Basis::X, Outcome::Minus),
        ]
    }
}

impl fmt::Display for HistoryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.outcome, self.basis.index())
    }
}

impl FromStr for HistoryEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::HistoryParse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (outcome, basis) = s.trim().split_once('|').ok_or_else(|| fail("missing '|'"))?;
        let outcome = match outcome.trim() {
            "+1" | "1" => Outcome::Plus,
            "-1" | "\u{2212}1" => Outcome::Minus,
            _ => return Err(fail("outcome must be +1 or -1")),
        };
        let basis = match basis.trim() {
            "0" => Basis::Z,
            "1" => Basis::X,
            _ => return Err(fail("basis must be 0 or 1")),
        };
        Ok(Self { basis, outcome })
    }
}

/// Alice's measurement record, oldest first.
///
/// Renders as `+1|0; -1|1`; the empty history renders as `-`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History(Vec<HistoryEntry>);

impl History {
    pub fn new(entries: Vec<HistoryEntry>) -> Self {
        Self(entries)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn entries(&self) -> &[HistoryEntry] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extended(&self, entry: HistoryEntry) -> Self {
        let mut v = self.0.clone();
        v.push(entry);
        Self(v)
    }

    /// Every history of exactly `len` entries, in table order.
    pub fn all_of_length(len: usize) -> Vec<History> {
        let mut out = vec![History::empty()];
        for _ in 0..len {
            out = out
                .iter()
                .flat_map(|h| HistoryEntry::all().into_iter().map(move |e| h.extended(e)))
                .collect();
        }
        out
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for History {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() || t == "-" {
            return Ok(History::empty());
        }
        t.split(';').map(str::parse).collect::<Result<Vec<_>>>().map(History)
    }
}

/// Parameters governing one step of the protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepParams<T> {
    /// Entanglement angle `η_k ∈ [0, π/4]`.
    pub eta: T,
    /// Alice's frame rotation `α_k`; she applies `R_Y(−α_k)` before measuring.
    pub alpha: T,
    /// Bob's incremental rotation `β_k` picked up at the previous step.
    pub beta: T,
    /// Bob's measurement angle `θ_k = arccot(sin 2η_k)`.
    pub theta: T,
    /// Sharpness of Alice's measurement at this step.
    pub mu: T,
    /// Bob's accumulated rotation: `U_B,k = R_Y(bob_rotation)`.
    pub bob_rotation: T,
}

impl<T: Scalar> StepParams<T> {
    /// `R_Y(α) ⊗ R_Y(bob_rotation) (cos η |00⟩ + sin η |11⟩)`.
    pub fn lab_state(&self) -> Ket4<T> {
        rotation_y(self.alpha)
            .tensor(&rotation_y(self.bob_rotation))
            .apply(&Ket4::canonical(self.eta))
    }

    /// Measurement Alice performs at this step in basis `basis`.
    pub fn setting(&self, basis: Basis) -> Result<MeasurementSetting<T>> {
        MeasurementSetting::new(basis, self.mu)
    }
}

/// Bob's measurement angle for entanglement `eta`.
pub fn bob_angle<T: Scalar>(eta: T) -> T {
    arccot((eta + eta).sin())
}

/// Sharpness schedule `μ_1, …, μ_n`; its length is the number of steps.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig<T> {
    schedule: Vec<T>,
}

impl<T: Scalar> ProtocolConfig<T> {
    /// Validates the schedule. A sharp (`μ = 0`) measurement destroys the
    /// entanglement, so it is allowed only at the final step.
    pub fn new(schedule: Vec<T>) -> Result<Self> {
        if schedule.is_empty() {
            return Err(Error::InvalidSchedule("schedule is empty".into()));
        }
        for (k, &mu) in schedule.iter().enumerate() {
            validate_sharpness(mu)?;
            if mu == T::zero() && k + 1 < schedule.len() {
                return Err(Error::InvalidSchedule(format!(
                    "sharp measurement (mu = 0) at step {} of {}; only the final step may be sharp",
                    k + 1,
                    schedule.len()
                )));
            }
        }
        Ok(Self { schedule })
    }

    /// The three-step schedule `(0.34, 0.19, 0)` used in the experiment.
    pub fn three_step() -> Self {
        Self::new(vec![T::lit(0.34), T::lit(0.19), T::zero()]).expect("valid schedule")
    }

    pub fn steps(&self) -> usize {
        self.schedule.len()
    }

    pub fn schedule(&self) -> &[T] {
        &self.schedule
    }

    /// Sharpness at 1-based step `k`; steps past the schedule read as sharp.
    pub fn sharpness_at(&self, k: usize) -> T {
        k.checked_sub(1)
            .and_then(|i| self.schedule.get(i))
            .copied()
            .unwrap_or_else(T::zero)
    }
}

/// Parameters of step 1: the Bell state with no frame corrections.
pub fn initial_params<T: Scalar>(mu_1: T) -> Result<StepParams<T>> {
    validate_sharpness(mu_1)?;
    let eta = T::FRAC_PI_4();
    Ok(StepParams {
        eta,
        alpha: T::zero(),
        beta: T::zero(),
        theta: bob_angle(eta),
        mu: mu_1,
        bob_rotation: T::zero(),
    })
}

/// Closed-form parameters after Alice records `entry` at the step `prev`.
pub fn update_params<T: Scalar>(prev: &StepParams<T>, entry: HistoryEntry, next_mu: T) -> Result<StepParams<T>> {
    if !(prev.eta > T::zero()) {
        return Err(Error::DegenerateState);
    }
    validate_sharpness(prev.mu)?;
    validate_sharpness(next_mu)?;
    let two = T::lit(2.0);
    let (eta, mu) = (prev.eta, prev.mu);

    let (alpha, beta, eta_next) = match (entry.basis, entry.outcome) {
        (Basis::Z, Outcome::Plus) => {
            let e = (mu.sin() * eta.sin()).atan2(mu.cos() * eta.cos());
            (T::zero(), T::zero(), e)
        }
        (Basis::Z, Outcome::Minus) => {
            // amplitudes of |00⟩ and |11⟩ after K₋₁|₀
            let low = mu.sin() * eta.cos();
            let high = mu.cos() * eta.sin();
            if low <= high {
                (T::FRAC_PI_2(), T::FRAC_PI_2(), low.atan2(high))
            } else {
                (T::zero(), T::zero(), high.atan2(low))
            }
        }
        (Basis::X, outcome) => {
            let (s2m, c2m) = (two * mu).sin_cos();
            let (s2e, c2e) = (two * eta).sin_cos();
            let e = (s2m * s2e).min(T::one()).asin() / two;
            let a = c2m.atan2(s2m * c2e) / two;
            let b = (s2e * c2m).atan2(c2e) / two;
            match outcome {
                Outcome::Plus => (a, b, e),
                Outcome::Minus => (-a, -b, e),
            }
        }
    };

    Ok(StepParams {
        eta: eta_next,
        alpha,
        beta,
        theta: bob_angle(eta_next),
        mu: next_mu,
        bob_rotation: prev.bob_rotation + beta,
    })
}

/// Result of simulating one branch state-by-state.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchRun<T> {
    /// Joint state after the last recorded measurement (lab frame).
    pub state: Ket4<T>,
    /// Analytic parameters at steps `1 ..= history.len() + 1`.
    pub trace: Vec<StepParams<T>>,
}

impl<T: Scalar> BranchRun<T> {
    pub fn last(&self) -> &StepParams<T> {
        self.trace.last().expect("trace is never empty")
    }
}

/// Runs `history` from the Bell state by explicit matrix action, tracking the
/// closed-form parameters alongside.
///
/// Parameters following the final scheduled measurement carry `μ = 0`.
pub fn run_branch<T: Scalar>(config: &ProtocolConfig<T>, history: &History) -> Result<BranchRun<T>> {
    if history.len() > config.steps() {
        return Err(Error::HistoryTooLong {
            len: history.len(),
            steps: config.steps(),
        });
    }
    let mut state = Ket4::bell();
    let mut trace = vec![initial_params(config.sharpness_at(1))?];
    for (k, &entry) in history.entries().iter().enumerate() {
        let current = trace[k];
        state = rotation_y(-current.alpha).on_alice().apply(&state);
        state = apply_measurement(&state, &current.setting(entry.basis)?, entry.outcome)?;
        trace.push(update_params(&current, entry, config.sharpness_at(k + 2))?);
    }
    Ok(BranchRun { state, trace })
}

/// A node of the protocol tree.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode<T> {
    pub history: History,
    /// Parameters for step `history.len() + 1`.
    pub params: StepParams<T>,
    /// Probability of reaching this node when Alice picks each basis with
    /// probability ½; sums to one over a tree level.
    pub probability: T,
    /// Probability of the recorded outcomes given the recorded bases.
    pub outcome_probability: T,
}

/// All `4^(depth−1)` nodes governing step `depth`, in table order.
pub fn enumerate_tree<T: Scalar>(config: &ProtocolConfig<T>, depth: usize) -> Result<Vec<TreeNode<T>>> {
    if depth == 0 || depth > config.steps() {
        return Err(Error::HistoryTooLong {
            len: depth.saturating_sub(1),
            steps: config.steps().saturating_sub(1),
        });
    }
    let mut level = vec![TreeNode {
        history: History::empty(),
        params: initial_params(config.sharpness_at(1))?,
        probability: T::one(),
        outcome_probability: T::one(),
    }];
    let basis_choice = T::lit(0.5);
    for k in 1..depth {
        let next_mu = config.sharpness_at(k + 1);
        let mut next = Vec::with_capacity(level.len() * 4);
        for node in &level {
            // Born rule in Alice's corrected frame, where the state is canonical
            // up to Bob's local rotation
            let canonical = Ket4::canonical(node.params.eta);
            for entry in HistoryEntry::all() {
                let p = outcome_probability(&canonical, &node.params.setting(entry.basis)?, entry.outcome)?;
                next.push(TreeNode {
                    history: node.history.extended(entry),
                    params: update_params(&node.params, entry, next_mu)?,
                    probability: node.probability * basis_choice * p,
                    outcome_probability: node.outcome_probability * p,
                });
            }
        }
        level = next;
    }
    Ok(level)
}

/// Bob's observable `B_j = ±cos θ σ_X + sin θ σ_Z` (minus for `j = 1`).
pub fn bob_observable<T: Scalar>(step: &StepParams<T>, choice: usize) -> Result<Op2<T>> {
    if !(step.eta > T::zero()) {
        return Err(Error::DegenerateState);
    }
    let sign = match choice {
        0 => T::one(),
        1 => -T::one(),
        other => return Err(Error::IndexOutOfRange(other)),
    };
    let (s, c) = step.theta.sin_cos();
    Ok(pauli(Axis::X).scale(sign * c) + pauli(Axis::Z).scale(s))
}

/// Largest sharpness that still violates CHSH: `½ arctan(sin 2η)`.
pub fn max_sharpness<T: Scalar>(eta: T) -> Result<T> {
    if !(eta > T::zero()) {
        return Err(Error::DegenerateState);
    }
    if eta > T::FRAC_PI_4() + T::algebra_tol() {
        return Err(Error::OutOfRange {
            value: eta.as_f64(),
            low: 0.0,
            high: std::f64::consts::FRAC_PI_4,
        });
    }
    Ok((eta + eta).sin().atan() / T::lit(2.0))
}

/// Whether outcome `-1` of a σ_Z-type measurement with sharpness `mu`
/// increases the entanglement: `mu > arctan(tan² η)`.
pub fn amplification_condition<T: Scalar>(eta: T, mu: T) -> bool {
    mu > eta.tan().powi(2).atan()
}
