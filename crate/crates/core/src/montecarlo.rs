//! Finite-statistics emulation of the coincidence-counting experiment.
//!
//! Each `(Alice setting, Bob setting, Alice outcome, Bob outcome)` cell is an
//! independent Poisson draw whose mean is proportional to the Born-rule joint
//! probability. Correlators, CHSH values and witness values are then
//! estimated from the counts with first-order Poisson error propagation.
//!
//! Randomness: every cell reads its own ChaCha stream selected from
//! `(plan.stream, layout, i, j, a, b)` under the plan's seed, so a table is
//! reproducible independent of the order cells are generated in.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::analysis::dichotomic_projector;
use crate::error::{Error, Result};
use crate::instrument::{effect, Basis, MeasurementSetting, Outcome};
use crate::protocol::StepParams;
use crate::qcore::{expectation, pauli, Axis, Ket4, Op2};

/// Expected coincidences per complete observable estimate.
pub const DEFAULT_PAIRS: f64 = 3.0e4;

/// Largest `stream` value a plan may carry; the low five bits of the ChaCha
/// stream id encode the cell.
pub const MAX_STREAM: u64 = (1 << 58) - 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentPlan {
    /// Expected coincidences, split evenly across the setting pairs of one estimate.
    pub pairs_per_config: f64,
    pub seed: u64,
    /// Stream offset distinguishing independent tables under one seed
    /// (for example one per protocol branch).
    pub stream: u64,
    /// Scale of correlations when Alice measures a σ_Z-type observable.
    pub visibility_z: f64,
    /// Scale of correlations when Alice measures a σ_X-type observable.
    pub visibility_x: f64,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            pairs_per_config: DEFAULT_PAIRS,
            seed: 0,
            stream: 0,
            visibility_z: 1.0,
            visibility_x: 1.0,
        }
    }
}

impl ExperimentPlan {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pairs_per_config > 0.0) || !self.pairs_per_config.is_finite() {
            return Err(Error::InvalidPlan(format!(
                "pairs_per_config must be positive, got {}",
                self.pairs_per_config
            )));
        }
        for (name, v) in [("visibility_z", self.visibility_z), ("visibility_x", self.visibility_x)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidPlan(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.stream > MAX_STREAM {
            return Err(Error::InvalidPlan(format!(
                "stream {} exceeds {MAX_STREAM}",
                self.stream
            )));
        }
        Ok(())
    }

    fn visibility(&self, alice: Basis) -> f64 {
        match alice {
            Basis::Z => self.visibility_z,
            Basis::X => self.visibility_x,
        }
    }
}

/// Which measurement family a count table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layout {
    /// Alice's unsharp `A_i` against Bob's `B_j`, all four `(i, j)`.
    Chsh,
    /// Sharp σ_Z⊗σ_Z in cell `(0, 0)` and σ_X⊗σ_X in cell `(1, 1)`.
    Witness,
}

impl Layout {
    fn bit(self) -> u64 {
        match self {
            Layout::Chsh => 0,
            Layout::Witness => 1,
        }
    }
}

/// Coincidence counts indexed `[i][j][a][b]`, outcomes ordered `+1, −1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub layout: Layout,
    pub counts: [[[[u64; 2]; 2]; 2]; 2],
}

impl CountTable {
    pub fn zeroed(layout: Layout) -> Self {
        Self {
            layout,
            counts: [[[[0; 2]; 2]; 2]; 2],
        }
    }

    pub fn get(&self, i: usize, j: usize, a: Outcome, b: Outcome) -> u64 {
        self.counts[i][j][a.index()][b.index()]
    }

    pub fn cell_total(&self, i: usize, j: usize) -> u64 {
        self.counts[i][j].iter().flatten().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().flatten().flatten().sum()
    }

    /// True when nothing was recorded (for example a plan with zero pairs).
    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }
}

/// A measured value with its propagated standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_dev: f64,
    /// Set when a contributing count cell was zero; the standard deviation
    /// is reported as computed, without regularization.
    pub zero_count: bool,
}

impl Estimate {
    /// Distance of `value` from `reference` in units of `std_dev`.
    pub fn significance(&self, reference: f64) -> f64 {
        (self.value - reference) / self.std_dev
    }
}

fn check_index(i: usize) -> Result<()> {
    if i < 2 {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange(i))
    }
}

/// Bob's `B_j` from `θ` alone; unlike `protocol::bob_observable` this accepts
/// separable steps (`θ = π/2` at `η = 0`).
fn bob_setting(theta: f64, j: usize) -> Op2<f64> {
    let sign = if j == 0 { 1.0 } else { -1.0 };
    pauli(Axis::X).scale(sign * theta.cos()) + pauli(Axis::Z).scale(theta.sin())
}

/// Mixes the ideal 2×2 outcome distribution toward the product of its marginals.
fn with_visibility(ideal: [[f64; 2]; 2], v: f64) -> [[f64; 2]; 2] {
    let alice = [ideal[0][0] + ideal[0][1], ideal[1][0] + ideal[1][1]];
    let bob = [ideal[0][0] + ideal[1][0], ideal[0][1] + ideal[1][1]];
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            out[a][b] = v * ideal[a][b] + (1.0 - v) * alice[a] * bob[b];
        }
    }
    out
}

fn joint_distribution(alice_effects: [Op2<f64>; 2], bob: &Op2<f64>, eta: f64) -> Result<[[f64; 2]; 2]> {
    let state = Ket4::canonical(eta);
    let mut p = [[0.0; 2]; 2];
    for a in Outcome::ALL {
        for b in Outcome::ALL {
            let op = alice_effects[a.index()].tensor(&dichotomic_projector(bob, b));
            p[a.index()][b.index()] = expectation(&op, &state)?;
        }
    }
    Ok(p)
}

fn chsh_distribution(step: &StepParams<f64>, i: usize, j: usize, plan: &ExperimentPlan) -> Result<[[f64; 2]; 2]> {
    check_index(i)?;
    check_index(j)?;
    if !(step.eta >= 0.0) {
        return Err(Error::OutOfRange {
            value: step.eta,
            low: 0.0,
            high: std::f64::consts::FRAC_PI_4,
        });
    }
    let basis = Basis::from_index(i)?;
    let setting = MeasurementSetting::new(basis, step.mu)?;
    let effects = [effect(&setting, Outcome::Plus), effect(&setting, Outcome::Minus)];
    let ideal = joint_distribution(effects, &bob_setting(step.theta, j), step.eta)?;
    Ok(with_visibility(ideal, plan.visibility(basis)))
}

fn witness_distribution(step: &StepParams<f64>, basis: Basis, plan: &ExperimentPlan) -> Result<[[f64; 2]; 2]> {
    let sharp = MeasurementSetting::new(basis, 0.0)?;
    let effects = [effect(&sharp, Outcome::Plus), effect(&sharp, Outcome::Minus)];
    let sigma = pauli(basis.axis());
    let ideal = joint_distribution(effects, &sigma, step.eta)?;
    Ok(with_visibility(ideal, plan.visibility(basis)))
}

/// `P(a, b | i, j)` for the CHSH configuration at `step`.
pub fn joint_probability(
    step: &StepParams<f64>,
    i: usize,
    j: usize,
    a: Outcome,
    b: Outcome,
    plan: &ExperimentPlan,
) -> Result<f64> {
    Ok(chsh_distribution(step, i, j, plan)?[a.index()][b.index()])
}

/// `P(a, b)` for sharp σ⊗σ measurements in `basis` on both sides.
pub fn witness_joint_probability(
    step: &StepParams<f64>,
    basis: Basis,
    a: Outcome,
    b: Outcome,
    plan: &ExperimentPlan,
) -> Result<f64> {
    Ok(witness_distribution(step, basis, plan)?[a.index()][b.index()])
}

fn cell_stream(plan: &ExperimentPlan, layout: Layout, i: usize, j: usize, a: usize, b: usize) -> u64 {
    (plan.stream << 5) | (layout.bit() << 4) | ((i as u64) << 3) | ((j as u64) << 2) | ((a as u64) << 1) | b as u64
}

fn draw(plan: &ExperimentPlan, stream: u64, mean: f64) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    rng.set_stream(stream);
    let poisson = Poisson::new(mean).expect("finite positive Poisson mean");
    poisson.sample(&mut rng) as u64
}

#[allow(clippy::needless_range_loop)]
fn fill(plan: &ExperimentPlan, layout: Layout, cells: &[(usize, usize, [[f64; 2]; 2])]) -> CountTable {
    let mut table = CountTable::zeroed(layout);
    let per_setting = plan.pairs_per_config.max(0.0) / cells.len() as f64;
    for &(i, j, dist) in cells {
        for a in 0..2 {
            for b in 0..2 {
                let stream = cell_stream(plan, layout, i, j, a, b);
                table.counts[i][j][a][b] = draw(plan, stream, per_setting * dist[a][b]);
            }
        }
    }
    table
}

/// Poisson counts for the four CHSH setting pairs; each receives a quarter of
/// `pairs_per_config` on average.
pub fn simulate_counts(step: &StepParams<f64>, plan: &ExperimentPlan) -> Result<CountTable> {
    let mut cells = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            cells.push((i, j, chsh_distribution(step, i, j, plan)?));
        }
    }
    Ok(fill(plan, Layout::Chsh, &cells))
}

/// Poisson counts for the σ_Z⊗σ_Z and σ_X⊗σ_X settings of the witness; each
/// receives half of `pairs_per_config` on average.
pub fn simulate_witness_counts(step: &StepParams<f64>, plan: &ExperimentPlan) -> Result<CountTable> {
    let cells = [
        (0, 0, witness_distribution(step, Basis::Z, plan)?),
        (1, 1, witness_distribution(step, Basis::X, plan)?),
    ];
    Ok(fill(plan, Layout::Witness, &cells))
}

/// `E = (n₊₊ + n₋₋ − n₊₋ − n₋₊)/N` with
/// `σ² = Σ_ab ((ab − E)/N)² · n_ab`.
#[allow(clippy::needless_range_loop)]
pub fn estimate_correlator(table: &CountTable, i: usize, j: usize) -> Result<Estimate> {
    check_index(i)?;
    check_index(j)?;
    let n = table.cell_total(i, j);
    if n == 0 {
        return Err(Error::EmptyCell { i, j });
    }
    let total = n as f64;
    let cell = &table.counts[i][j];
    let signed = |a: usize, b: usize| if a == b { 1.0 } else { -1.0 };
    let mut value = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            value += signed(a, b) * cell[a][b] as f64;
        }
    }
    value /= total;
    let mut variance = 0.0;
    let mut zero_count = false;
    for a in 0..2 {
        for b in 0..2 {
            let d = (signed(a, b) - value) / total;
            variance += d * d * cell[a][b] as f64;
            zero_count |= cell[a][b] == 0;
        }
    }
    Ok(Estimate {
        value,
        std_dev: variance.sqrt(),
        zero_count,
    })
}

fn expect_layout(table: &CountTable, expected: Layout) -> Result<()> {
    if table.layout == expected {
        Ok(())
    } else {
        Err(Error::WrongLayout {
            expected,
            found: table.layout,
        })
    }
}

/// `S = E₀₀ + E₀₁ + E₁₀ − E₁₁`, variances added.
pub fn estimate_chsh(table: &CountTable) -> Result<Estimate> {
    expect_layout(table, Layout::Chsh)?;
    let mut value = 0.0;
    let mut variance = 0.0;
    let mut zero_count = false;
    for (i, j, sign) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)] {
        let e = estimate_correlator(table, i, j)?;
        value += sign * e.value;
        variance += e.std_dev * e.std_dev;
        zero_count |= e.zero_count;
    }
    Ok(Estimate {
        value,
        std_dev: variance.sqrt(),
        zero_count,
    })
}

/// `⟨W⟩ = 1 − E_ZZ − E_XX`, variances added.
pub fn estimate_witness(table: &CountTable) -> Result<Estimate> {
    expect_layout(table, Layout::Witness)?;
    let zz = estimate_correlator(table, 0, 0)?;
    let xx = estimate_correlator(table, 1, 1)?;
    Ok(Estimate {
        value: 1.0 - zz.value - xx.value,
        std_dev: (zz.std_dev * zz.std_dev + xx.std_dev * xx.std_dev).sqrt(),
        zero_count: zz.zero_count || xx.zero_count,
    })
}
