use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::SessionError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exercise {
    pub id: String,
    pub prompt: String,
    pub answer_key: String,
    #[serde(default)]
    pub difficulty: f64,
    /// Seconds allowed before the attempt counts as timed out.
    pub default_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExerciseBank {
    pub title: String,
    pub exercises: Vec<Exercise>,
}

impl ExerciseBank {
    pub fn from_json(text: &str) -> Result<Self, SessionError> {
        let bank: ExerciseBank = serde_json::from_str(text).map_err(|e| {
            SessionError::InvalidBank(format!(
                "line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        bank.validate()?;
        Ok(bank)
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        if self.exercises.is_empty() {
            return Err(SessionError::InvalidBank("bank has no exercises".into()));
        }
        let mut ids = BTreeSet::new();
        for e in &self.exercises {
            if !ids.insert(e.id.as_str()) {
                return Err(SessionError::InvalidBank(format!(
                    "duplicate exercise id `{}`",
                    e.id
                )));
            }
            if !(e.default_time.is_finite() && e.default_time > 0.0) {
                return Err(SessionError::InvalidBank(format!(
                    "exercise `{}`: default_time must be positive",
                    e.id
                )));
            }
            if !(0.0..=1.0).contains(&e.difficulty) {
                return Err(SessionError::InvalidBank(format!(
                    "exercise `{}`: difficulty must lie in [0, 1]",
                    e.id
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.exercises.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exercises.is_empty()
    }
}

fn normalize(s: &str) -> String {
    s.trim().to_lowercase()
}

/// Binary grading, case- and surrounding-whitespace-insensitive.
pub fn grade(exercise: &Exercise, answer: &str) -> f64 {
    if normalize(answer) == normalize(&exercise.answer_key) {
        1.0
    } else {
        0.0
    }
}
