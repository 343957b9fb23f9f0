//! Scripted learners that drive sessions without a human.
//!
//! The simulated learner is a handful of probabilities and carries no memory
//! of its own. It exercises the engine; it says nothing about real learners.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appraisal::{EmotionKind, EventKind};
use crate::assets::Assets;
use crate::personality::{
    canonical_answers, Answers, LearningGroup, PersonalityType, QuestionnaireForm,
};
use crate::session::{
    start_session, LearnerAction, Mode, SessionError, SessionSetup, SessionState,
    DEFAULT_VCA_SKILL,
};
use crate::tactics::{Actor, Tactic};

/// Attempts at one exercise before the learner skips it.
pub const MAX_ATTEMPTS: u32 = 3;

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("profile `{name}`: {message}")]
    Profile { name: String, message: String },
    #[error("no learner profiles")]
    Empty,
    #[error("no modes to simulate")]
    NoModes,
    #[error("profile `{profile}` in {mode}: {source}")]
    Session {
        profile: String,
        mode: Mode,
        source: SessionError,
    },
    #[error("profile file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerProfile {
    pub name: String,
    pub questionnaire_answers: Answers,
    /// Chance that a single attempt is correct.
    pub skill: f64,
    /// Response time is `speed_factor * dt * u` with `u` uniform in [0.5, 1].
    pub speed_factor: f64,
    pub help_propensity: f64,
    pub effort_level: f64,
    /// Leave after this many actions.
    #[serde(default)]
    pub quit_after: Option<u32>,
    #[serde(default)]
    pub think_propensity: f64,
}

impl LearnerProfile {
    pub fn validate(&self) -> Result<(), SimulationError> {
        let bad = |message: String| SimulationError::Profile {
            name: self.name.clone(),
            message,
        };
        for (field, v) in [
            ("skill", self.skill),
            ("help_propensity", self.help_propensity),
            ("effort_level", self.effort_level),
            ("think_propensity", self.think_propensity),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(bad(format!("{field} {v} outside [0, 1]")));
            }
        }
        if !(self.speed_factor > 0.0 && self.speed_factor <= 2.0) {
            return Err(bad(format!(
                "speed_factor {} outside (0, 2]",
                self.speed_factor
            )));
        }
        Ok(())
    }
}

pub fn load_profiles(text: &str) -> Result<Vec<LearnerProfile>, SimulationError> {
    let profiles: Vec<LearnerProfile> =
        serde_json::from_str(text).map_err(|e| SimulationError::Parse(e.to_string()))?;
    profiles.iter().try_for_each(LearnerProfile::validate)?;
    Ok(profiles)
}

/// One unambiguous profile per personality type, identical otherwise.
pub fn canonical_profiles(form: &QuestionnaireForm) -> Vec<LearnerProfile> {
    PersonalityType::all()
        .map(|t| LearnerProfile {
            name: t.to_string(),
            questionnaire_answers: canonical_answers(form, t),
            skill: 0.6,
            speed_factor: 0.8,
            help_propensity: 0.2,
            effort_level: 0.7,
            quit_after: None,
            think_propensity: 0.1,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub profile: String,
    pub mode: Mode,
    pub seed: u64,
    pub initial_group: LearningGroup,
    pub final_group: LearningGroup,
    pub events: u64,
    pub event_counts: BTreeMap<EventKind, u64>,
    pub tactic_counts: BTreeMap<Actor, BTreeMap<Tactic, u64>>,
    /// Intensities after each event; empty in the emotion-free mode.
    pub emotion_trajectory: Vec<BTreeMap<EmotionKind, f64>>,
}

impl SessionReport {
    pub fn from_session(profile: &str, session: &SessionState) -> Self {
        let mut event_counts = BTreeMap::new();
        let mut tactic_counts: BTreeMap<Actor, BTreeMap<Tactic, u64>> = BTreeMap::new();
        let mut emotion_trajectory = Vec::new();
        for r in session.log() {
            *event_counts.entry(r.kind).or_insert(0) += 1;
            if let Some(plan) = &r.plan {
                for c in &plan.sequence {
                    *tactic_counts
                        .entry(c.actor)
                        .or_default()
                        .entry(c.tactic)
                        .or_insert(0) += 1;
                }
            }
            if let Some(e) = &r.emotions_after {
                emotion_trajectory.push(e.intensities().clone());
            }
        }
        SessionReport {
            profile: profile.to_string(),
            mode: session.mode(),
            seed: session.seed(),
            initial_group: session.profile().group,
            final_group: session.group(),
            events: session.log().len() as u64,
            event_counts,
            tactic_counts,
            emotion_trajectory,
        }
    }

    pub fn count(&self, kind: EventKind) -> u64 {
        self.event_counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn tactics_by(&self, actor: Actor) -> u64 {
        self.tactic_counts
            .get(&actor)
            .map_or(0, |m| m.values().sum())
    }
}

#[derive(Debug, Clone)]
pub struct SimulatedSession {
    pub session: SessionState,
    pub report: SessionReport,
}

impl SimulatedSession {
    pub fn log(&self) -> String {
        self.session.export_log()
    }
}

/// Per-(exercise, attempt) draws, independent of everything the engine does.
struct AttemptDraws {
    think: f64,
    help: f64,
    reject: f64,
    correct: f64,
    speed: f64,
}

fn attempt_draws(seed: u64, exercise: usize, attempt: u32) -> AttemptDraws {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    rng.set_stream(((exercise as u64) << 8) | u64::from(attempt));
    AttemptDraws {
        think: rng.random(),
        help: rng.random(),
        reject: rng.random(),
        correct: rng.random(),
        speed: rng.random_range(0.5..=1.0),
    }
}

/// The learner's next action given where the session stands.
struct Learner<'a> {
    profile: &'a LearnerProfile,
    seed: u64,
    exercise: usize,
    attempt: u32,
    thought: bool,
    asked: bool,
    answered_offer: bool,
    actions: u32,
}

impl Learner<'_> {
    fn next_action(&mut self, session: &SessionState) -> LearnerAction {
        if self.profile.quit_after.is_some_and(|n| self.actions >= n) {
            return LearnerAction::Leave;
        }
        if session.cursor() != self.exercise {
            self.exercise = session.cursor();
            self.attempt = 0;
            self.reset_attempt();
        }
        let exercise = session.current_exercise().expect("active session has an exercise");
        if self.attempt >= MAX_ATTEMPTS {
            return LearnerAction::Skip;
        }
        let d = attempt_draws(self.seed, self.exercise, self.attempt);
        let p = self.profile;
        let offered = session.log().last().and_then(|r| r.plan.as_ref()).is_some_and(|plan| {
            plan.contains(Tactic::ProposeCooperateWithVCA) || plan.contains(Tactic::OfferCooperation)
        });
        if offered && !self.answered_offer {
            self.answered_offer = true;
            if d.reject >= p.help_propensity {
                return LearnerAction::RejectHelp;
            }
        }
        if !self.thought {
            self.thought = true;
            if d.think < p.think_propensity {
                return LearnerAction::Think;
            }
        }
        if !self.asked {
            self.asked = true;
            if d.help < p.help_propensity {
                return LearnerAction::RequestHelp;
            }
        }
        self.attempt += 1;
        self.reset_attempt();
        let answer = if d.correct < p.skill {
            exercise.answer_key.clone()
        } else {
            format!("not {}", exercise.answer_key)
        };
        LearnerAction::SubmitAnswer {
            answer,
            rt: p.speed_factor * exercise.default_time * d.speed,
            effort: p.effort_level,
        }
    }

    fn reset_attempt(&mut self) {
        self.thought = false;
        self.asked = false;
        self.answered_offer = false;
    }
}

/// Runs one learner through the bank until it is finished, left, or closed.
pub fn simulate_session(
    profile: &LearnerProfile,
    assets: Arc<Assets>,
    mode: Mode,
    seed: u64,
) -> Result<SimulatedSession, SimulationError> {
    profile.validate()?;
    let wrap = |source| SimulationError::Session {
        profile: profile.name.clone(),
        mode,
        source,
    };
    let setup = SessionSetup {
        id: Some(format!("{}-{}", profile.name, mode).to_lowercase()),
        mode,
        seed,
        vca_skill: DEFAULT_VCA_SKILL,
    };
    let mut session = start_session(setup, &profile.questionnaire_answers, assets).map_err(wrap)?;
    let mut learner = Learner {
        profile,
        seed,
        exercise: 0,
        attempt: 0,
        thought: false,
        asked: false,
        answered_offer: false,
        actions: 0,
    };
    while session.is_active() {
        let action = learner.next_action(&session);
        learner.actions += 1;
        session.step(action).map_err(wrap)?;
    }
    let report = SessionReport::from_session(&profile.name, &session);
    Ok(SimulatedSession { session, report })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub base_seed: u64,
    pub sessions: Vec<SessionReport>,
    /// Personality-assigned group of each profile.
    pub group_distribution: BTreeMap<LearningGroup, u64>,
    pub tactic_frequency: BTreeMap<Mode, BTreeMap<Actor, BTreeMap<Tactic, u64>>>,
}

impl SimulationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn total_tactics(&self, mode: Mode, actor: Actor) -> u64 {
        self.tactic_frequency
            .get(&mode)
            .and_then(|m| m.get(&actor))
            .map_or(0, |m| m.values().sum())
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "groups:");
        for (g, n) in &self.group_distribution {
            let _ = writeln!(out, "  {:<12} {n}", g.to_string());
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<24} {:<5} {:<12} {:<12} {:>6} {:>6} {:>6}",
            "profile", "mode", "start", "end", "events", "vta", "vca"
        );
        for s in &self.sessions {
            let _ = writeln!(
                out,
                "{:<24} {:<5} {:<12} {:<12} {:>6} {:>6} {:>6}",
                s.profile,
                s.mode.to_string(),
                s.initial_group.to_string(),
                s.final_group.to_string(),
                s.events,
                s.tactics_by(Actor::Tutor),
                s.tactics_by(Actor::Classmate)
            );
        }
        for (mode, actors) in &self.tactic_frequency {
            let _ = writeln!(out, "\n{mode} tactics:");
            for (actor, tactics) in actors {
                for (t, n) in tactics {
                    let _ = writeln!(out, "  {actor} {:<40} {n}", t.label());
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct BatchOutput {
    pub sessions: Vec<SimulatedSession>,
    pub report: SimulationReport,
}

/// One session per (profile, mode), profile-major, with seed `base_seed + index`.
pub fn batch_simulate(
    profiles: &[LearnerProfile],
    assets: Arc<Assets>,
    modes: &[Mode],
    base_seed: u64,
) -> Result<BatchOutput, SimulationError> {
    if profiles.is_empty() {
        return Err(SimulationError::Empty);
    }
    if modes.is_empty() {
        return Err(SimulationError::NoModes);
    }
    let jobs: Vec<(&LearnerProfile, Mode, u64)> = profiles
        .iter()
        .flat_map(|p| modes.iter().map(move |&m| (p, m)))
        .enumerate()
        .map(|(i, (p, m))| (p, m, base_seed.wrapping_add(i as u64)))
        .collect();
    let sessions = jobs
        .par_iter()
        .map(|&(p, m, seed)| simulate_session(p, Arc::clone(&assets), m, seed))
        .collect::<Result<Vec<_>, _>>()?;

    let mut group_distribution = BTreeMap::new();
    for p in profiles {
        let group = crate::personality::PersonalityProfile::from_answers(
            &assets.form,
            &p.questionnaire_answers,
        )
        .map_err(|e| SimulationError::Profile {
            name: p.name.clone(),
            message: e.to_string(),
        })?
        .group;
        *group_distribution.entry(group).or_insert(0) += 1;
    }
    let mut tactic_frequency: BTreeMap<Mode, BTreeMap<Actor, BTreeMap<Tactic, u64>>> =
        modes.iter().map(|&m| (m, BTreeMap::new())).collect();
    for s in &sessions {
        let per_mode = tactic_frequency.entry(s.report.mode).or_default();
        for (actor, tactics) in &s.report.tactic_counts {
            let per_actor = per_mode.entry(*actor).or_default();
            for (t, n) in tactics {
                *per_actor.entry(*t).or_insert(0) += n;
            }
        }
    }
    let report = SimulationReport {
        base_seed,
        sessions: sessions.iter().map(|s| s.report.clone()).collect(),
        group_distribution,
        tactic_frequency,
    };
    Ok(BatchOutput { sessions, report })
}
