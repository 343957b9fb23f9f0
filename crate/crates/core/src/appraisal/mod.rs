//! Event appraisal: environmental variables, the goal-weighted value
//! function, event desirability and the OCC event/attraction emotions.

mod appraiser;
mod emotion;
mod environment;

pub use appraiser::{trace, Appraiser, EventAppraisal, ObservedEvent, TraceEntry};
pub use emotion::{
    appraise_first_branch, appraise_fortunes_of_others, appraise_love_hate, linguistic_level,
    EmotionKind, EmotionState, Level, Liking, Phase,
};
pub use environment::{
    update_environmental_state, EnvironmentalState, Observation, Variable, WeightTable,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::personality::GoalVector;

#[derive(Debug, Error, PartialEq)]
pub enum AppraisalError {
    #[error("default response time must be positive, got {0}")]
    NonPositiveDefaultTime(f64),
    #[error("response time must be non-negative, got {0}")]
    NegativeResponseTime(f64),
    #[error("{name} must lie in [0, 1], got {value}")]
    OutOfRange { name: String, value: f64 },
    #[error("weight for {variable:?} on goal {goal} must be finite and non-negative, got {value}")]
    InvalidWeight {
        variable: Variable,
        goal: usize,
        value: f64,
    },
    #[error("goal {0} has an all-zero weight column")]
    ZeroWeightColumn(usize),
    #[error("weights sum to zero")]
    ZeroWeights,
    #[error("goal vector sums to zero")]
    ZeroGoals,
    #[error("intensity {0} outside [0, 1]")]
    IntensityOutOfRange(f64),
    #[error("no classmate agent present")]
    NoClassmate,
    #[error("weight table: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valence {
    Positive,
    Negative,
}

impl Valence {
    pub fn sign(self) -> f64 {
        match self {
            Valence::Positive => 1.0,
            Valence::Negative => -1.0,
        }
    }
}

/// Classified session events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EventKind {
    AccurateResponse,
    EffortShown,
    Thinking,
    HelpRequested,
    InaccurateResponse,
    Timeout,
    LeaveClass,
    HelpRejected,
    SkipExercise,
}

impl EventKind {
    pub const ALL: [EventKind; 9] = [
        EventKind::AccurateResponse,
        EventKind::EffortShown,
        EventKind::Thinking,
        EventKind::HelpRequested,
        EventKind::InaccurateResponse,
        EventKind::Timeout,
        EventKind::LeaveClass,
        EventKind::HelpRejected,
        EventKind::SkipExercise,
    ];

    pub fn valence(self) -> Valence {
        use EventKind::*;
        match self {
            AccurateResponse | EffortShown | Thinking | HelpRequested => Valence::Positive,
            InaccurateResponse | Timeout | LeaveClass | HelpRejected | SkipExercise => {
                Valence::Negative
            }
        }
    }

    /// Events that settle the pending "next answer is correct" prospect.
    pub fn resolves_prospect(self) -> bool {
        matches!(
            self,
            EventKind::AccurateResponse
                | EventKind::InaccurateResponse
                | EventKind::Timeout
                | EventKind::SkipExercise
        )
    }
}

/// One event's effect on each of the four goals, in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ImpactRow(pub [f64; 4]);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppraisalInputs {
    pub desirability: f64,
    pub likelihood: f64,
    pub unexpectedness: f64,
}

/// Weighted mean of the variable values for one goal column.
pub fn value_function(weights: &[f64; 5], values: &[f64; 5]) -> Result<f64, AppraisalError> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(AppraisalError::ZeroWeights);
    }
    let dot: f64 = weights.iter().zip(values).map(|(w, v)| w * v).sum();
    Ok((dot / total).clamp(0.0, 1.0))
}

/// Per-goal impact: the event's valence applied to the goal's value.
pub fn event_impact(
    event: EventKind,
    values: &[f64; 5],
    weights: &WeightTable,
) -> Result<ImpactRow, AppraisalError> {
    let sign = event.valence().sign();
    let mut row = [0.0; 4];
    for (goal, a) in row.iter_mut().enumerate() {
        *a = sign * value_function(&weights.column(goal), values)?;
    }
    Ok(ImpactRow(row))
}

/// Goal-importance weighted mean of an impact row.
pub fn desirability(row: &ImpactRow, goals: &GoalVector) -> Result<f64, AppraisalError> {
    let total = goals.total();
    if total <= 0.0 {
        return Err(AppraisalError::ZeroGoals);
    }
    let dot: f64 = row.0.iter().zip(&goals.0).map(|(a, g)| a * g).sum();
    Ok((dot / total).clamp(-1.0, 1.0))
}

/// Running success ratio; 0.5 before any outcome is known.
pub fn likelihood(history: &[bool]) -> f64 {
    if history.is_empty() {
        return 0.5;
    }
    history.iter().filter(|&&c| c).count() as f64 / history.len() as f64
}

pub fn unexpectedness(likelihood: f64, outcome: bool) -> f64 {
    let o = if outcome { 1.0 } else { 0.0 };
    (o - likelihood).abs()
}
