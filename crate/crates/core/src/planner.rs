//! Micro-rotation planning.
//!
//! A target angle θ is written as a signed sum of elementary CORDIC angles
//! `θ ≈ Σ σₖ·atan(2^(−iₖ))`, stopping as soon as the residual falls inside the
//! requested tolerance ε. Each step picks a shift index from the current
//! residual and a direction equal to the residual's sign, so the identity
//! `residual = θ − Σ σₖ·atan(2^(−iₖ))` holds by construction.
//!
//! Two index policies are provided:
//!
//! * [`IndexPolicy::NearestIndex`] (default): `i = round(−log₂|r|)`, the shift
//!   whose power of two is closest in ratio to the residual. This reproduces the
//!   classic DCT rotator tables (π/4, 3π/8, π/16 and 3π/16 at 10⁻³ and 10⁻⁴).
//! * [`IndexPolicy::PaperLiteral`]: `i = ⌊−log₂ tan|r|⌋ + 1`, a one-sided rule
//!   that never overshoots and therefore converges with same-sign steps only.
//!
//! Published direction strings for π/4 and 3π/8 at 10⁻³ disagree with the
//! angle-sum identity; directions produced here always satisfy it.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest shift index a plan may use. `atan(2⁻³⁰) < 10⁻⁹`, the finest tolerance accepted.
pub const INDEX_MAX: u32 = 30;
/// Step budget of the decomposition loop.
pub const MAX_STEPS: usize = 64;
pub const MIN_EPSILON: f64 = 1e-9;
pub const MAX_EPSILON: f64 = 1e-1;

/// `atan(2^-i)` for `i` in `0..=INDEX_MAX`.
pub fn micro_angle(index: u32) -> f64 {
    static TABLE: OnceLock<[f64; INDEX_MAX as usize + 1]> = OnceLock::new();
    TABLE.get_or_init(|| std::array::from_fn(|i| (-(i as f64)).exp2().atan()))[index as usize]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Direction {
    pub fn of(value: f64) -> Self {
        if value < 0.0 {
            Direction::Negative
        } else {
            Direction::Positive
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Direction::Positive => 1.0,
            Direction::Negative => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Direction::Positive => 1,
            Direction::Negative => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Direction::Positive => Direction::Negative,
            Direction::Negative => Direction::Positive,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Direction::Positive => '+',
            Direction::Negative => '-',
        }
    }
}

/// One elementary rotation by `direction · atan(2^-index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MicroRotation {
    index: u32,
    direction: Direction,
}

impl MicroRotation {
    pub fn new(index: u32, direction: Direction) -> Result<Self> {
        if index > INDEX_MAX {
            return Err(Error::Domain(format!(
                "shift index {index} exceeds {INDEX_MAX}"
            )));
        }
        Ok(Self { index, direction })
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Signed angle contributed by this step.
    pub fn angle(&self) -> f64 {
        self.direction.sign() * micro_angle(self.index)
    }

    /// `1/√(1 + 2^(-2i))`, the norm correction of this step.
    pub fn gain(&self) -> f64 {
        1.0 / (1.0 + (-2.0 * self.index as f64).exp2()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, Serialize, Deserialize)]
pub enum IndexPolicy {
    PaperLiteral,
    #[default]
    NearestIndex,
}

impl IndexPolicy {
    /// Shift index for a non-zero residual, before clamping. May be negative
    /// or larger than [`INDEX_MAX`].
    fn raw_index(self, residual: f64) -> i64 {
        let magnitude = residual.abs();
        match self {
            IndexPolicy::NearestIndex => (-magnitude.log2()).round() as i64,
            IndexPolicy::PaperLiteral => (-magnitude.tan().log2()).floor() as i64 + 1,
        }
    }
}

impl fmt::Display for IndexPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexPolicy::PaperLiteral => "literal",
            IndexPolicy::NearestIndex => "nearest",
        })
    }
}

/// Ordered micro-rotations approximating a target angle within a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationPlan {
    target: f64,
    tolerance: f64,
    steps: Vec<MicroRotation>,
    residual: f64,
    gain: f64,
    policy: IndexPolicy,
}

impl RotationPlan {
    /// Builds a plan from explicit steps. The steps must reach `target`
    /// within `tolerance`.
    pub fn from_steps(
        target: f64,
        tolerance: f64,
        steps: Vec<MicroRotation>,
        policy: IndexPolicy,
    ) -> Result<Self> {
        check_domain(target, tolerance)?;
        let residual = steps.iter().fold(target, |r, s| r - s.angle());
        if residual.abs() > tolerance {
            return Err(Error::Domain(format!(
                "steps leave residual {residual:e} above tolerance {tolerance:e}"
            )));
        }
        let gain = steps_gain(&steps);
        Ok(Self {
            target,
            tolerance,
            steps,
            residual,
            gain,
            policy,
        })
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn steps(&self) -> &[MicroRotation] {
        &self.steps
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn policy(&self) -> IndexPolicy {
        self.policy
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn indices(&self) -> Vec<u32> {
        self.steps.iter().map(|s| s.index).collect()
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.steps.iter().map(|s| s.direction).collect()
    }

    /// Shift indices joined with `/`, e.g. `2/4/6/9/13`.
    pub fn indices_string(&self) -> String {
        self.steps
            .iter()
            .map(|s| s.index.to_string())
            .collect::<Vec<_>>()
            .join("/")
    }

    /// Directions as a `+`/`-` string, e.g. `+-+-+`.
    pub fn directions_string(&self) -> String {
        self.steps.iter().map(|s| s.direction.symbol()).collect()
    }
}

fn check_domain(theta: f64, epsilon: f64) -> Result<()> {
    if !theta.is_finite() || theta.abs() > std::f64::consts::FRAC_PI_2 {
        return Err(Error::Domain(format!(
            "angle {theta} outside [-pi/2, pi/2]"
        )));
    }
    if !(MIN_EPSILON..=MAX_EPSILON).contains(&epsilon) {
        return Err(Error::Domain(format!(
            "tolerance {epsilon:e} outside [{MIN_EPSILON:e}, {MAX_EPSILON:e}]"
        )));
    }
    Ok(())
}

fn steps_gain(steps: &[MicroRotation]) -> f64 {
    steps.iter().map(MicroRotation::gain).product()
}

/// Decomposes `theta` into micro-rotations until `|residual| <= epsilon`.
pub fn decompose(theta: f64, epsilon: f64, policy: IndexPolicy) -> Result<RotationPlan> {
    check_domain(theta, epsilon)?;

    let mut residual = theta;
    let mut steps = Vec::new();
    while residual.abs() > epsilon {
        if steps.len() >= MAX_STEPS {
            return Err(Error::NonTermination {
                max_steps: MAX_STEPS,
                residual,
            });
        }
        let raw = policy.raw_index(residual).max(0);
        if raw > INDEX_MAX as i64 {
            break;
        }
        let step = MicroRotation {
            index: raw as u32,
            direction: Direction::of(residual),
        };
        let next = residual - step.angle();
        if policy == IndexPolicy::NearestIndex {
            debug_assert!(
                next.abs() < residual.abs(),
                "residual must shrink every step"
            );
        }
        residual = next;
        steps.push(step);
    }
    if residual.abs() > epsilon {
        return Err(Error::NonTermination {
            max_steps: steps.len(),
            residual,
        });
    }

    let gain = steps_gain(&steps);
    Ok(RotationPlan {
        target: theta,
        tolerance: epsilon,
        steps,
        residual,
        gain,
        policy,
    })
}

/// `Σ σₖ·atan(2^(−iₖ))` over the plan's steps.
pub fn reconstruct_angle(plan: &RotationPlan) -> f64 {
    plan.steps.iter().map(MicroRotation::angle).sum()
}

/// `Π 1/√(1 + 2^(−2iₖ))`, counting repeated indices. Independent of directions.
pub fn gain(plan: &RotationPlan) -> f64 {
    steps_gain(&plan.steps)
}

/// One row of a rotator parameter table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub angle_rad: f64,
    pub epsilon: f64,
    pub indices: Vec<u32>,
    pub directions: Vec<i8>,
    pub residual_rad: f64,
    pub gain: f64,
}

impl TableRow {
    pub fn from_plan(plan: &RotationPlan) -> Self {
        Self {
            angle_rad: plan.target,
            epsilon: plan.tolerance,
            indices: plan.indices(),
            directions: plan.steps.iter().map(|s| s.direction.as_i8()).collect(),
            residual_rad: plan.residual,
            gain: plan.gain,
        }
    }

    pub fn indices_string(&self) -> String {
        self.indices
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join("/")
    }

    pub fn directions_string(&self) -> String {
        self.directions
            .iter()
            .map(|&d| if d < 0 { '-' } else { '+' })
            .collect()
    }
}

/// One row per `(angle, epsilon)` pair, angle-major.
pub fn generate_table(
    angles: &[f64],
    epsilons: &[f64],
    policy: IndexPolicy,
) -> Result<Vec<TableRow>> {
    let mut rows = Vec::with_capacity(angles.len() * epsilons.len());
    for &angle in angles {
        for &eps in epsilons {
            rows.push(TableRow::from_plan(&decompose(angle, eps, policy)?));
        }
    }
    Ok(rows)
}

pub const TABLE_CSV_HEADER: [&str; 6] = [
    "angle_rad",
    "epsilon",
    "indices",
    "directions",
    "residual_rad",
    "gain",
];

pub fn write_table_csv<W: Write>(rows: &[TableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(TABLE_CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record([
            format!("{:?}", row.angle_rad),
            format!("{:e}", row.epsilon),
            row.indices_string(),
            row.directions_string(),
            format!("{:e}", row.residual_rad),
            format!("{:?}", row.gain),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn table_to_json(rows: &[TableRow]) -> String {
    serde_json::to_string_pretty(rows).expect("table rows serialize")
}
