use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    appraise_first_branch, desirability, event_impact, likelihood, unexpectedness,
    update_environmental_state, AppraisalError, AppraisalInputs, EmotionKind, EmotionState,
    EnvironmentalState, EventKind, Level, Observation, Phase, WeightTable,
};
use crate::personality::{GoalVector, LearningGroup};

/// A classified event together with the measurements that accompany it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedEvent {
    pub kind: EventKind,
    #[serde(default)]
    pub rt: Option<f64>,
    pub dt: f64,
    #[serde(default)]
    pub grade: Option<f64>,
    #[serde(default)]
    pub effort: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventAppraisal {
    pub inputs: AppraisalInputs,
    pub emotions: EmotionState,
    pub resolved_prospect: bool,
}

/// Per-learner appraisal state, fed one event at a time in session order.
///
/// Hope and Fear are held about the prospect "the next answer is correct".
/// Events that settle an exercise attempt (accurate, inaccurate, timeout,
/// skip) consume that prospect; [`Appraiser::raise_prospect`] opens the next.
#[derive(Debug, Clone, PartialEq)]
pub struct Appraiser {
    weights: WeightTable,
    goals: GoalVector,
    env: EnvironmentalState,
    history: Vec<bool>,
    prospect: EmotionState,
}

impl Appraiser {
    pub fn new(weights: WeightTable, goals: GoalVector, group: LearningGroup) -> Self {
        Appraiser {
            weights,
            goals,
            env: EnvironmentalState::initial(group),
            history: Vec::new(),
            prospect: EmotionState::neutral(),
        }
    }

    pub fn env(&self) -> &EnvironmentalState {
        &self.env
    }

    pub fn history(&self) -> &[bool] {
        &self.history
    }

    pub fn prospect(&self) -> &EmotionState {
        &self.prospect
    }

    pub fn goals(&self) -> &GoalVector {
        &self.goals
    }

    /// Desirability of `kind` under the current environment and goals.
    pub fn desirability_of(&self, kind: EventKind) -> Result<f64, AppraisalError> {
        let row = event_impact(kind, &self.env.as_vector(), &self.weights)?;
        desirability(&row, &self.goals)
    }

    pub fn observe(&mut self, event: &ObservedEvent) -> Result<EventAppraisal, AppraisalError> {
        let resolves = event.kind.resolves_prospect();
        let outcome = event.kind == EventKind::AccurateResponse;
        let obs = Observation {
            help_requested: event.kind == EventKind::HelpRequested,
            correct: resolves.then_some(outcome),
            rt: event.rt,
            dt: event.dt,
            grade: event.grade,
            effort: event.effort,
        };
        self.env = update_environmental_state(&self.env, &obs)?;

        let d = self.desirability_of(event.kind)?;
        let l = likelihood(&self.history);
        let (u, prior) = if resolves {
            let prior = std::mem::take(&mut self.prospect);
            self.history.push(outcome);
            (unexpectedness(l, outcome), prior)
        } else {
            (0.0, EmotionState::neutral())
        };
        let inputs = AppraisalInputs {
            desirability: d,
            likelihood: l,
            unexpectedness: u,
        };
        let emotions = appraise_first_branch(&inputs, &prior, Phase::OutcomeResolved);
        Ok(EventAppraisal {
            inputs,
            emotions,
            resolved_prospect: resolves,
        })
    }

    /// Opens the prospect for the next answer: Hope when success is at least
    /// as likely as failure, Fear otherwise.
    pub fn raise_prospect(&mut self) -> Result<EventAppraisal, AppraisalError> {
        let l = likelihood(&self.history);
        let (kind, chance) = if l >= 0.5 {
            (EventKind::AccurateResponse, l)
        } else {
            (EventKind::InaccurateResponse, 1.0 - l)
        };
        let inputs = AppraisalInputs {
            desirability: self.desirability_of(kind)?,
            likelihood: chance,
            unexpectedness: 0.0,
        };
        let emotions =
            appraise_first_branch(&inputs, &EmotionState::neutral(), Phase::ProspectRaised);
        self.prospect = emotions.clone();
        Ok(EventAppraisal {
            inputs,
            emotions,
            resolved_prospect: false,
        })
    }
}

/// One line of an appraisal trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub seq: u64,
    pub kind: EventKind,
    pub inputs: AppraisalInputs,
    pub intensities: BTreeMap<EmotionKind, f64>,
    pub levels: BTreeMap<EmotionKind, Level>,
    pub environment: EnvironmentalState,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prospect: Option<AppraisalInputs>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prospect_intensities: Option<BTreeMap<EmotionKind, f64>>,
}

/// Appraises a standalone event sequence, raising a new prospect at the
/// start and after every event that settles one.
pub fn trace(
    events: &[ObservedEvent],
    goals: GoalVector,
    weights: WeightTable,
    group: LearningGroup,
) -> Result<Vec<TraceEntry>, AppraisalError> {
    let mut appraiser = Appraiser::new(weights, goals, group);
    appraiser.raise_prospect()?;
    let mut out = Vec::with_capacity(events.len());
    for (i, event) in events.iter().enumerate() {
        let result = appraiser.observe(event)?;
        let prospect = if result.resolved_prospect {
            Some(appraiser.raise_prospect()?)
        } else {
            None
        };
        out.push(TraceEntry {
            seq: i as u64 + 1,
            kind: event.kind,
            inputs: result.inputs,
            intensities: result.emotions.intensities().clone(),
            levels: result.emotions.levels(),
            environment: *appraiser.env(),
            prospect: prospect.as_ref().map(|p| p.inputs),
            prospect_intensities: prospect.map(|p| p.emotions.intensities().clone()),
        });
    }
    Ok(out)
}
