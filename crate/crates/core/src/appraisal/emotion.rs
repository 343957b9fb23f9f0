use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AppraisalError, AppraisalInputs, Valence};

/// Event-consequence emotions plus the attraction pair Love/Hate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EmotionKind {
    Joy,
    Distress,
    Hope,
    Fear,
    Satisfaction,
    Disappointment,
    Relief,
    FearConfirmed,
    HappyFor,
    Pity,
    Gloating,
    Resentment,
    Love,
    Hate,
}

impl EmotionKind {
    pub const ALL: [EmotionKind; 14] = [
        EmotionKind::Joy,
        EmotionKind::Distress,
        EmotionKind::Hope,
        EmotionKind::Fear,
        EmotionKind::Satisfaction,
        EmotionKind::Disappointment,
        EmotionKind::Relief,
        EmotionKind::FearConfirmed,
        EmotionKind::HappyFor,
        EmotionKind::Pity,
        EmotionKind::Gloating,
        EmotionKind::Resentment,
        EmotionKind::Love,
        EmotionKind::Hate,
    ];

    /// Column of the positive/negative emotion table. Gloating sits in the
    /// positive column and Pity in the negative one.
    pub fn valence(self) -> Valence {
        use EmotionKind::*;
        match self {
            Joy | Hope | Satisfaction | Relief | Gloating | HappyFor | Love => Valence::Positive,
            Distress | Fear | Disappointment | FearConfirmed | Pity | Resentment | Hate => {
                Valence::Negative
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    Low,
    Medium,
    High,
}

/// Crisp thirds: `[0, 1/3)` Low, `[1/3, 2/3)` Medium, `[2/3, 1]` High.
pub fn linguistic_level(intensity: f64) -> Result<Level, AppraisalError> {
    if !(0.0..=1.0).contains(&intensity) {
        return Err(AppraisalError::IntensityOutOfRange(intensity));
    }
    Ok(if intensity < 1.0 / 3.0 {
        Level::Low
    } else if intensity < 2.0 / 3.0 {
        Level::Medium
    } else {
        Level::High
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Liking {
    Love,
    Hate,
}

/// Intensities for every [`EmotionKind`], all in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionState {
    intensity: BTreeMap<EmotionKind, f64>,
    dominant_valence: Valence,
}

impl Default for EmotionState {
    fn default() -> Self {
        Self::neutral()
    }
}

impl EmotionState {
    pub fn neutral() -> Self {
        EmotionState {
            intensity: EmotionKind::ALL.iter().map(|&k| (k, 0.0)).collect(),
            dominant_valence: Valence::Positive,
        }
    }

    pub fn get(&self, kind: EmotionKind) -> f64 {
        self.intensity.get(&kind).copied().unwrap_or(0.0)
    }

    /// Sets one intensity (clamped to `[0, 1]`) and refreshes the dominant valence.
    pub fn set(&mut self, kind: EmotionKind, value: f64) {
        self.intensity.insert(kind, value.clamp(0.0, 1.0));
        self.refresh_valence();
    }

    pub fn with(mut self, kind: EmotionKind, value: f64) -> Self {
        self.set(kind, value);
        self
    }

    /// Copies every non-zero intensity of `other` over this state.
    pub fn overlay(&mut self, other: &EmotionState) {
        for (&k, &v) in &other.intensity {
            if v > 0.0 {
                self.intensity.insert(k, v);
            }
        }
        self.refresh_valence();
    }

    pub fn intensities(&self) -> &BTreeMap<EmotionKind, f64> {
        &self.intensity
    }

    pub fn dominant_valence(&self) -> Valence {
        self.dominant_valence
    }

    pub fn levels(&self) -> BTreeMap<EmotionKind, Level> {
        self.intensity
            .iter()
            .map(|(&k, &v)| (k, linguistic_level(v).unwrap_or(Level::High)))
            .collect()
    }

    fn refresh_valence(&mut self) {
        let (mut pos, mut neg) = (0.0, 0.0);
        for (k, v) in &self.intensity {
            match k.valence() {
                Valence::Positive => pos += v,
                Valence::Negative => neg += v,
            }
        }
        self.dominant_valence = if pos >= neg {
            Valence::Positive
        } else {
            Valence::Negative
        };
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    /// A prospect has been raised (Hope/Fear about the next outcome).
    ProspectRaised,
    /// An outcome is known (Joy/Distress and confirmation of prior prospects).
    OutcomeResolved,
}

/// Event-scoped intensities: anything not produced by this phase is zero.
pub fn appraise_first_branch(
    inputs: &AppraisalInputs,
    prior: &EmotionState,
    phase: Phase,
) -> EmotionState {
    let d = inputs.desirability.clamp(-1.0, 1.0);
    let good = d.max(0.0);
    let bad = (-d).max(0.0);
    let mut out = EmotionState::neutral();
    match phase {
        Phase::ProspectRaised => {
            let l = inputs.likelihood.clamp(0.0, 1.0);
            out.set(EmotionKind::Hope, l * good);
            out.set(EmotionKind::Fear, l * bad);
        }
        Phase::OutcomeResolved => {
            out.set(EmotionKind::Joy, good);
            out.set(EmotionKind::Distress, bad);
            let mu = (1.0 + inputs.unexpectedness.clamp(0.0, 1.0)) / 2.0;
            let hope = prior.get(EmotionKind::Hope) * mu;
            let fear = prior.get(EmotionKind::Fear) * mu;
            if d > 0.0 {
                out.set(EmotionKind::Satisfaction, hope);
                out.set(EmotionKind::Relief, fear);
            } else if d < 0.0 {
                out.set(EmotionKind::Disappointment, hope);
                out.set(EmotionKind::FearConfirmed, fear);
            }
        }
    }
    out
}

/// Reaction to an outcome for the classmate, coloured by the learner's
/// current Love/Hate toward it.
pub fn appraise_fortunes_of_others(
    other_desirability: f64,
    liking: Option<Liking>,
) -> Result<EmotionState, AppraisalError> {
    let liking = liking.ok_or(AppraisalError::NoClassmate)?;
    let d = other_desirability.clamp(-1.0, 1.0);
    let kind = match (d >= 0.0, liking) {
        (true, Liking::Love) => EmotionKind::HappyFor,
        (false, Liking::Love) => EmotionKind::Pity,
        (false, Liking::Hate) => EmotionKind::Gloating,
        (true, Liking::Hate) => EmotionKind::Resentment,
    };
    Ok(EmotionState::neutral().with(kind, d.abs()))
}

/// Attitude toward the classmate. Only the learner's current valence decides;
/// the event valence is accepted for completeness.
pub fn appraise_love_hate(current: Valence, _event: Valence) -> Liking {
    match current {
        Valence::Negative => Liking::Hate,
        Valence::Positive => Liking::Love,
    }
}
