use serde::{Deserialize, Serialize};

use super::AppraisalError;
use crate::personality::LearningGroup;

/// The five measured variables, in value-vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variable {
    Independence,
    PotentialOfCooperation,
    ResponseSpeed,
    Grade,
    Effort,
}

impl Variable {
    pub const ALL: [Variable; 5] = [
        Variable::Independence,
        Variable::PotentialOfCooperation,
        Variable::ResponseSpeed,
        Variable::Grade,
        Variable::Effort,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentalState {
    pub independence: f64,
    pub potential_of_cooperation: f64,
    pub response_speed: f64,
    pub grade: f64,
    pub effort: f64,
    pub exercises_attempted: u32,
    pub help_requests: u32,
    pub correct_count: u32,
}

/// What one learner action tells us about the environment. `None` fields
/// leave the corresponding variable untouched.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Observation {
    pub help_requested: bool,
    /// `Some` when the action was an attempt at the current exercise.
    pub correct: Option<bool>,
    pub rt: Option<f64>,
    pub dt: f64,
    pub grade: Option<f64>,
    pub effort: Option<f64>,
}

impl EnvironmentalState {
    /// Starting point: independent learners begin fully independent, grouped
    /// learners begin fully cooperative.
    pub fn initial(group: LearningGroup) -> Self {
        let independence = if group == LearningGroup::Independent {
            1.0
        } else {
            0.0
        };
        EnvironmentalState {
            independence,
            potential_of_cooperation: 1.0 - independence,
            response_speed: 0.0,
            grade: 0.0,
            effort: 0.0,
            exercises_attempted: 0,
            help_requests: 0,
            correct_count: 0,
        }
    }

    pub fn as_vector(&self) -> [f64; 5] {
        [
            self.independence,
            self.potential_of_cooperation,
            self.response_speed,
            self.grade,
            self.effort,
        ]
    }

    pub fn get(&self, var: Variable) -> f64 {
        self.as_vector()[var as usize]
    }
}

fn unit(name: &str, value: f64) -> Result<f64, AppraisalError> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(AppraisalError::OutOfRange {
            name: name.to_string(),
            value,
        })
    }
}

pub fn update_environmental_state(
    state: &EnvironmentalState,
    obs: &Observation,
) -> Result<EnvironmentalState, AppraisalError> {
    if !(obs.dt.is_finite() && obs.dt > 0.0) {
        return Err(AppraisalError::NonPositiveDefaultTime(obs.dt));
    }
    let mut next = *state;
    if obs.help_requested {
        next.help_requests += 1;
    }
    if let Some(correct) = obs.correct {
        next.exercises_attempted += 1;
        if correct {
            next.correct_count += 1;
        }
    }
    if obs.help_requested || obs.correct.is_some() {
        let aid = f64::from(next.help_requests) / f64::from(next.exercises_attempted.max(1));
        next.independence = (1.0 - aid).clamp(0.0, 1.0);
        next.potential_of_cooperation = 1.0 - next.independence;
    }
    if let Some(rt) = obs.rt {
        if !(rt.is_finite() && rt >= 0.0) {
            return Err(AppraisalError::NegativeResponseTime(rt));
        }
        next.response_speed = (1.0 - rt / obs.dt).clamp(0.0, 1.0);
    }
    if let Some(grade) = obs.grade {
        next.grade = unit("grade", grade)?;
    }
    if let Some(effort) = obs.effort {
        next.effort = unit("effort", effort)?;
    }
    Ok(next)
}

/// `w[variable][goal]`: how much each variable matters to each goal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightTableDoc", into = "WeightTableDoc")]
pub struct WeightTable([[f64; 4]; 5]);

impl Default for WeightTable {
    fn default() -> Self {
        WeightTable([
            [3.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, 1.0, 3.0],
            [1.0, 1.0, 3.0, 1.0],
            [2.0, 1.0, 1.0, 2.0],
            [1.0, 3.0, 1.0, 1.0],
        ])
    }
}

impl WeightTable {
    pub fn new(rows: [[f64; 4]; 5]) -> Result<Self, AppraisalError> {
        for (r, row) in rows.iter().enumerate() {
            for (g, w) in row.iter().enumerate() {
                if !w.is_finite() || *w < 0.0 {
                    return Err(AppraisalError::InvalidWeight {
                        variable: Variable::ALL[r],
                        goal: g + 1,
                        value: *w,
                    });
                }
            }
        }
        for g in 0..4 {
            if rows.iter().map(|row| row[g]).sum::<f64>() <= 0.0 {
                return Err(AppraisalError::ZeroWeightColumn(g + 1));
            }
        }
        Ok(WeightTable(rows))
    }

    pub fn from_json(text: &str) -> Result<Self, AppraisalError> {
        serde_json::from_str(text).map_err(|e| AppraisalError::Parse(e.to_string()))
    }

    /// Weights of all five variables for goal `goal` (0-based).
    pub fn column(&self, goal: usize) -> [f64; 5] {
        let mut col = [0.0; 5];
        for (c, row) in col.iter_mut().zip(&self.0) {
            *c = row[goal];
        }
        col
    }

    pub fn rows(&self) -> &[[f64; 4]; 5] {
        &self.0
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightTableDoc {
    independence: [f64; 4],
    potential_of_cooperation: [f64; 4],
    response_speed: [f64; 4],
    grade: [f64; 4],
    effort: [f64; 4],
}

impl TryFrom<WeightTableDoc> for WeightTable {
    type Error = AppraisalError;

    fn try_from(d: WeightTableDoc) -> Result<Self, Self::Error> {
        WeightTable::new([
            d.independence,
            d.potential_of_cooperation,
            d.response_speed,
            d.grade,
            d.effort,
        ])
    }
}

impl From<WeightTable> for WeightTableDoc {
    fn from(t: WeightTable) -> Self {
        let [independence, potential_of_cooperation, response_speed, grade, effort] = t.0;
        WeightTableDoc {
            independence,
            potential_of_cooperation,
            response_speed,
            grade,
            effort,
        }
    }
}
