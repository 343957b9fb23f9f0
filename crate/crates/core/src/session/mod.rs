//! The learning loop: one learner working through an exercise bank under one
//! of the three environment modes.

mod exercise;
mod log;

pub use exercise::{grade, Exercise, ExerciseBank};
pub use log::{replay, LogHeader, LOG_FORMAT};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appraisal::{
    appraise_fortunes_of_others, appraise_love_hate, AppraisalError, AppraisalInputs, Appraiser,
    EmotionKind, EmotionState, EnvironmentalState, EventKind, Liking, ObservedEvent,
};
use crate::assets::Assets;
use crate::personality::{
    opposed_vca, Answers, LearningGroup, PersonalityError, PersonalityProfile, VcaPersonality,
};
use crate::tactics::{
    apply_meta_tactics, evaluate_rules, realize_tactics, GroupSlot, MetaEffect, RuleContext,
    ScriptError, Tactic, TacticPlan,
};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Personality(#[from] PersonalityError),
    #[error(transparent)]
    Appraisal(#[from] AppraisalError),
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error("session {0} is closed")]
    Closed(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("invalid session setup: {0}")]
    InvalidSetup(String),
    #[error("exercise bank: {0}")]
    InvalidBank(String),
    #[error("session log line {line}: {message}")]
    Log { line: usize, message: String },
}

/// Environment modes: no emotions, emotional tutor only, tutor plus classmate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mode {
    Env1,
    Env2,
    Env3,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Env1, Mode::Env2, Mode::Env3];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "env1" | "1" => Ok(Mode::Env1),
            "env2" | "2" => Ok(Mode::Env2),
            "env3" | "3" => Ok(Mode::Env3),
            other => Err(format!("unknown mode `{other}` (expected env1, env2 or env3)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum LearnerAction {
    SubmitAnswer {
        answer: String,
        rt: f64,
        #[serde(default)]
        effort: f64,
    },
    /// The countdown for the current exercise ran out.
    Timeout { rt: f64 },
    RequestHelp,
    RejectHelp,
    Skip,
    Think,
    Leave,
}

impl LearnerAction {
    fn validate(&self) -> Result<(), SessionError> {
        let rt = match self {
            LearnerAction::SubmitAnswer { rt, effort, .. } => {
                if !(0.0..=1.0).contains(effort) {
                    return Err(SessionError::InvalidAction(format!(
                        "effort {effort} outside [0, 1]"
                    )));
                }
                *rt
            }
            LearnerAction::Timeout { rt } => *rt,
            _ => return Ok(()),
        };
        if !(rt.is_finite() && rt >= 0.0) {
            return Err(SessionError::InvalidAction(format!(
                "response time {rt} must be non-negative"
            )));
        }
        Ok(())
    }

    fn response_time(&self) -> Option<f64> {
        match self {
            LearnerAction::SubmitAnswer { rt, .. } | LearnerAction::Timeout { rt } => Some(*rt),
            _ => None,
        }
    }

    fn is_submission(&self) -> bool {
        matches!(
            self,
            LearnerAction::SubmitAnswer { .. } | LearnerAction::Timeout { .. }
        )
    }
}

/// Self-reported effort at or above this marks the attempt as effortful.
pub const EFFORT_THRESHOLD: f64 = 0.66;

/// Maps a learner action onto an event kind. Late submissions time out
/// regardless of correctness.
pub fn classify_event(action: &LearnerAction, grade: Option<f64>, dt: f64) -> EventKind {
    match action {
        LearnerAction::SubmitAnswer { rt, .. } if *rt > dt => EventKind::Timeout,
        LearnerAction::SubmitAnswer { .. } => {
            if grade.unwrap_or(0.0) >= 0.5 {
                EventKind::AccurateResponse
            } else {
                EventKind::InaccurateResponse
            }
        }
        LearnerAction::Timeout { .. } => EventKind::Timeout,
        LearnerAction::RequestHelp => EventKind::HelpRequested,
        LearnerAction::RejectHelp => EventKind::HelpRejected,
        LearnerAction::Skip => EventKind::SkipExercise,
        LearnerAction::Think => EventKind::Thinking,
        LearnerAction::Leave => EventKind::LeaveClass,
    }
}

pub fn shows_effort(action: &LearnerAction) -> bool {
    matches!(action, LearnerAction::SubmitAnswer { effort, .. } if *effort >= EFFORT_THRESHOLD)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SessionStatus {
    Active,
    Closed,
}

/// The classmate's own attempt at the exercise in competitive sessions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VcaOutcome {
    pub correct: bool,
    /// Desirability of the classmate's outcome, judged with the learner's goals.
    pub desirability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    pub kind: EventKind,
    pub action: LearnerAction,
    pub exercise_id: String,
    /// Session clock in seconds: the sum of response times so far.
    pub timestamp: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade: Option<f64>,
    #[serde(default)]
    pub effort_shown: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub appraisal: Option<AppraisalInputs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotions_after: Option<EmotionState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub liking: Option<Liking>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vca_outcome: Option<VcaOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<TacticPlan>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub meta: Vec<MetaEffect>,
    /// Prospect raised for the next answer after this event.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prospect: Option<AppraisalInputs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prospect_emotions: Option<EmotionState>,
    pub group: LearningGroup,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vca: Option<VcaPersonality>,
    pub status: SessionStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSetup {
    pub id: Option<String>,
    pub mode: Mode,
    pub seed: u64,
    /// Probability that the competitive classmate answers correctly.
    pub vca_skill: f64,
}

pub const DEFAULT_VCA_SKILL: f64 = 0.6;

impl SessionSetup {
    pub fn new(mode: Mode, seed: u64) -> Self {
        SessionSetup {
            id: None,
            mode,
            seed,
            vca_skill: DEFAULT_VCA_SKILL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SessionState {
    id: String,
    mode: Mode,
    seed: u64,
    vca_skill: f64,
    answers: Answers,
    profile: PersonalityProfile,
    pub(crate) group: LearningGroup,
    pub(crate) vca: Option<VcaPersonality>,
    appraiser: Option<Appraiser>,
    emotions: EmotionState,
    liking: Option<Liking>,
    cursor: usize,
    pub(crate) status: SessionStatus,
    log: Vec<EventRecord>,
    clock: f64,
    initial_prospect: Option<AppraisalInputs>,
    rng: ChaCha8Rng,
    assets: Arc<Assets>,
}

/// Scores the questionnaire, places the learner, and opens the first prospect.
pub fn start_session(
    setup: SessionSetup,
    answers: &Answers,
    assets: Arc<Assets>,
) -> Result<SessionState, SessionError> {
    if !(0.0..=1.0).contains(&setup.vca_skill) {
        return Err(SessionError::InvalidSetup(format!(
            "vca_skill {} outside [0, 1]",
            setup.vca_skill
        )));
    }
    assets.bank.validate()?;
    let profile = PersonalityProfile::from_answers(&assets.form, answers)?;
    let group = profile.group;
    let vca = (setup.mode == Mode::Env3 && group.has_classmate())
        .then(|| opposed_vca(profile.personality_type));
    let mut appraiser = (setup.mode != Mode::Env1)
        .then(|| Appraiser::new(assets.weights, profile.goals, group));
    let (emotions, initial_prospect) = match appraiser.as_mut() {
        Some(a) => {
            let p = a.raise_prospect()?;
            (p.emotions, Some(p.inputs))
        }
        None => (EmotionState::neutral(), None),
    };
    Ok(SessionState {
        id: setup.id.unwrap_or_else(|| format!("s{:016x}", setup.seed)),
        mode: setup.mode,
        seed: setup.seed,
        vca_skill: setup.vca_skill,
        answers: answers.clone(),
        profile,
        group,
        vca,
        appraiser,
        emotions,
        liking: None,
        cursor: 0,
        status: SessionStatus::Active,
        log: Vec::new(),
        clock: 0.0,
        initial_prospect,
        rng: ChaCha8Rng::seed_from_u64(setup.seed),
        assets,
    })
}

impl SessionState {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn vca_skill(&self) -> f64 {
        self.vca_skill
    }

    pub fn answers(&self) -> &Answers {
        &self.answers
    }

    pub fn profile(&self) -> &PersonalityProfile {
        &self.profile
    }

    pub fn group(&self) -> LearningGroup {
        self.group
    }

    pub fn vca(&self) -> Option<VcaPersonality> {
        self.vca
    }

    /// Environmental variables; `None` in the emotion-free mode.
    pub fn env(&self) -> Option<&EnvironmentalState> {
        self.appraiser.as_ref().map(Appraiser::env)
    }

    pub fn history(&self) -> &[bool] {
        self.appraiser.as_ref().map(Appraiser::history).unwrap_or(&[])
    }

    pub fn emotions(&self) -> &EmotionState {
        &self.emotions
    }

    pub fn liking(&self) -> Option<Liking> {
        self.liking
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn is_active(&self) -> bool {
        self.status == SessionStatus::Active
    }

    pub fn log(&self) -> &[EventRecord] {
        &self.log
    }

    pub fn assets(&self) -> &Arc<Assets> {
        &self.assets
    }

    pub fn initial_prospect(&self) -> Option<&AppraisalInputs> {
        self.initial_prospect.as_ref()
    }

    pub fn current_exercise(&self) -> Option<&Exercise> {
        self.is_active()
            .then(|| self.assets.bank.exercises.get(self.cursor))
            .flatten()
    }

    /// Checks the structural invariants that must hold after every step.
    pub fn check_invariants(&self) -> Result<(), String> {
        let expect_vca = self.mode == Mode::Env3 && self.group.has_classmate();
        if expect_vca != self.vca.is_some() {
            return Err(format!(
                "classmate presence {} does not match mode {} / group {}",
                self.vca.is_some(),
                self.mode,
                self.group
            ));
        }
        if self.is_active() && self.cursor >= self.assets.bank.len() {
            return Err(format!("cursor {} outside the bank while active", self.cursor));
        }
        if self.log.windows(2).any(|w| w[1].seq <= w[0].seq) {
            return Err("event sequence numbers not strictly increasing".into());
        }
        Ok(())
    }

    /// The classmate's attempt at the current exercise. Only competitive
    /// sessions with a classmate produce one.
    pub fn vca_outcome_event(&mut self) -> Result<Option<VcaOutcome>, SessionError> {
        if self.mode != Mode::Env3 || self.group != LearningGroup::Competitive || self.vca.is_none()
        {
            return Ok(None);
        }
        let Some(appraiser) = self.appraiser.as_ref() else {
            return Ok(None);
        };
        let correct = self.rng.random_bool(self.vca_skill);
        let kind = if correct {
            EventKind::AccurateResponse
        } else {
            EventKind::InaccurateResponse
        };
        Ok(Some(VcaOutcome {
            correct,
            desirability: appraiser.desirability_of(kind)?,
        }))
    }

    pub(crate) fn switch_group(&mut self, to: LearningGroup) {
        self.group = to;
        self.vca = (self.mode == Mode::Env3 && to.has_classmate())
            .then(|| opposed_vca(self.profile.personality_type));
    }

    pub(crate) fn close(&mut self) {
        self.status = SessionStatus::Closed;
    }

    /// Runs one learner action through the mode's pipeline and logs it.
    pub fn step(&mut self, action: LearnerAction) -> Result<EventRecord, SessionError> {
        if !self.is_active() {
            return Err(SessionError::Closed(self.id.clone()));
        }
        action.validate()?;
        let assets = Arc::clone(&self.assets);
        let exercise = &assets.bank.exercises[self.cursor];
        let dt = exercise.default_time;

        let raw_grade = match &action {
            LearnerAction::SubmitAnswer { answer, .. } => Some(grade(exercise, answer)),
            LearnerAction::Timeout { .. } => Some(0.0),
            _ => None,
        };
        let kind = classify_event(&action, raw_grade, dt);
        let grade = if kind == EventKind::Timeout {
            Some(0.0)
        } else {
            raw_grade
        };
        if let Some(rt) = action.response_time() {
            self.clock += rt;
        }

        let mut record = EventRecord {
            seq: self.log.last().map_or(1, |r| r.seq + 1),
            kind,
            action: action.clone(),
            exercise_id: exercise.id.clone(),
            timestamp: self.clock,
            grade,
            effort_shown: shows_effort(&action),
            appraisal: None,
            emotions_after: None,
            liking: None,
            vca_outcome: None,
            plan: None,
            meta: Vec::new(),
            prospect: None,
            prospect_emotions: None,
            group: self.group,
            vca: self.vca,
            status: self.status,
        };

        let mut plan: Option<TacticPlan> = None;
        let mut resolved = false;
        if let Some(appraiser) = self.appraiser.as_mut() {
            let prior_valence = self.emotions.dominant_valence();
            let effort = match &action {
                LearnerAction::SubmitAnswer { effort, .. } => Some(*effort),
                _ => None,
            };
            let observed = ObservedEvent {
                kind,
                rt: action.response_time(),
                dt,
                grade,
                effort,
            };
            let appraisal = appraiser.observe(&observed)?;
            resolved = appraisal.resolved_prospect;
            let response_speed = appraiser.env().response_speed;
            let mut emotions = appraisal.emotions;

            self.liking = None;
            if self.mode == Mode::Env3 && self.vca.is_some() {
                let liking = appraise_love_hate(prior_valence, kind.valence());
                let (kind_on, kind_off) = match liking {
                    Liking::Love => (EmotionKind::Love, EmotionKind::Hate),
                    Liking::Hate => (EmotionKind::Hate, EmotionKind::Love),
                };
                emotions.set(kind_on, 1.0);
                emotions.set(kind_off, 0.0);
                self.liking = Some(liking);
                if action.is_submission() {
                    if let Some(outcome) = self.vca_outcome_event()? {
                        let others =
                            appraise_fortunes_of_others(outcome.desirability, self.liking)?;
                        emotions.overlay(&others);
                        record.vca_outcome = Some(outcome);
                    }
                }
            }

            let slot = match self.mode {
                Mode::Env3 => GroupSlot::from(self.group),
                _ => GroupSlot::Ungrouped,
            };
            let ctx = RuleContext {
                group: slot,
                emotions: emotions.levels(),
                event: kind,
                response_speed,
                vca: self.vca,
            };
            let mut evaluated = evaluate_rules(&self.assets.kb, &ctx);
            if self.mode == Mode::Env2 {
                evaluated = evaluated.tutor_only();
            }
            let realized =
                realize_tactics(evaluated, &assets.scripts, slot.group(), &mut self.rng)?;
            if self.mode == Mode::Env3 {
                record.meta = apply_meta_tactics(&realized, self);
            }

            record.appraisal = Some(appraisal.inputs);
            record.liking = self.liking;
            self.emotions = emotions.clone();
            record.emotions_after = Some(emotions);
            plan = Some(realized);
        }

        let advances = matches!(
            kind,
            EventKind::AccurateResponse | EventKind::SkipExercise | EventKind::Timeout
        ) || plan.as_ref().is_some_and(|p| p.contains(Tactic::ShowNextExercise));
        if advances {
            self.cursor += 1;
            if self.cursor >= self.assets.bank.len() {
                self.close();
            }
        }
        if kind == EventKind::LeaveClass {
            self.close();
        }

        if resolved && self.is_active() {
            if let Some(appraiser) = self.appraiser.as_mut() {
                let raised = appraiser.raise_prospect()?;
                record.prospect = Some(raised.inputs);
                record.prospect_emotions = Some(raised.emotions);
            }
        }

        record.plan = plan;
        record.group = self.group;
        record.vca = self.vca;
        record.status = self.status;
        self.log.push(record.clone());
        Ok(record)
    }

    /// Line-delimited JSON: a header line, then one record per event.
    pub fn export_log(&self) -> String {
        let mut out = serde_json::to_string(&LogHeader::from_session(self))
            .expect("log header serializes");
        out.push('\n');
        for record in &self.log {
            out.push_str(&serde_json::to_string(record).expect("event record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn write_log<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.export_log().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::personality::{canonical_answers, PersonalityType};

    fn assets() -> Arc<Assets> {
        Arc::new(Assets::defaults())
    }

    fn answers_for(code: &str) -> Answers {
        canonical_answers(&Assets::defaults().form, code.parse::<PersonalityType>().unwrap())
    }

    fn start(mode: Mode, code: &str) -> SessionState {
        start_session(SessionSetup::new(mode, 11), &answers_for(code), assets()).unwrap()
    }

    fn submit_correct(s: &SessionState, rt: f64) -> LearnerAction {
        LearnerAction::SubmitAnswer {
            answer: s.current_exercise().unwrap().answer_key.clone(),
            rt,
            effort: 0.9,
        }
    }

    fn submit_wrong(rt: f64) -> LearnerAction {
        LearnerAction::SubmitAnswer { answer: "definitely wrong".into(), rt, effort: 0.9 }
    }

    #[test]
    fn classification() {
        let submit = |rt| LearnerAction::SubmitAnswer { answer: "x".into(), rt, effort: 0.0 };
        assert_eq!(classify_event(&submit(5.0), Some(1.0), 10.0), EventKind::AccurateResponse);
        assert_eq!(classify_event(&submit(5.0), Some(0.0), 10.0), EventKind::InaccurateResponse);
        assert_eq!(classify_event(&submit(11.0), Some(1.0), 10.0), EventKind::Timeout);
        assert_eq!(classify_event(&submit(10.0), Some(1.0), 10.0), EventKind::AccurateResponse);
        assert_eq!(classify_event(&LearnerAction::Skip, None, 10.0), EventKind::SkipExercise);
        assert_eq!(classify_event(&LearnerAction::RequestHelp, None, 10.0), EventKind::HelpRequested);
        assert_eq!(classify_event(&LearnerAction::RejectHelp, None, 10.0), EventKind::HelpRejected);
        assert_eq!(classify_event(&LearnerAction::Think, None, 10.0), EventKind::Thinking);
        assert_eq!(classify_event(&LearnerAction::Leave, None, 10.0), EventKind::LeaveClass);
        assert!(shows_effort(&LearnerAction::SubmitAnswer { answer: String::new(), rt: 1.0, effort: 0.66 }));
        assert!(!shows_effort(&LearnerAction::SubmitAnswer { answer: String::new(), rt: 1.0, effort: 0.65 }));
    }

    #[test]
    fn env3_cooperative_learner_gets_opposed_classmate() {
        let s = start(Mode::Env3, "ISFJ");
        assert_eq!(s.group(), LearningGroup::Cooperative);
        assert_eq!(s.vca().unwrap().to_string(), "EN");
        assert!(s.emotions().get(EmotionKind::Hope) > 0.0);
        s.check_invariants().unwrap();
    }

    #[test]
    fn env1_has_no_emotions_or_plans() {
        let mut s = start(Mode::Env1, "ISFJ");
        assert!(s.vca().is_none());
        assert!(s.env().is_none());
        let r = s.step(submit_correct(&s, 3.0)).unwrap();
        assert_eq!(r.kind, EventKind::AccurateResponse);
        assert!(r.plan.is_none() && r.appraisal.is_none() && r.emotions_after.is_none());
        assert_eq!(s.cursor(), 1);
    }

    #[test]
    fn env2_records_group_without_classmate() {
        let mut s = start(Mode::Env2, "ENTP");
        assert_eq!(s.group(), LearningGroup::Competitive);
        assert!(s.vca().is_none());
        let r = s.step(submit_wrong(3.0)).unwrap();
        let plan = r.plan.unwrap();
        assert!(plan.vca_tactics.is_empty());
        let e = r.emotions_after.unwrap();
        assert_eq!(e.get(EmotionKind::Love) + e.get(EmotionKind::Hate), 0.0);
    }

    #[test]
    fn leave_closes_and_further_steps_fail() {
        let mut s = start(Mode::Env3, "ISTJ");
        let r = s.step(LearnerAction::Leave).unwrap();
        assert_eq!(r.status, SessionStatus::Closed);
        assert_eq!(r.plan.unwrap().vta_tactics, vec![Tactic::AllowToLeaveVirtualClass]);
        assert!(matches!(s.step(LearnerAction::Think), Err(SessionError::Closed(_))));
    }

    #[test]
    fn cooperative_disappointment_draws_classmate_support() {
        let mut s = start(Mode::Env3, "ISFJ");
        for _ in 0..4 {
            let a = submit_correct(&s, 1.0);
            s.step(a).unwrap();
        }
        let r = s.step(submit_wrong(1.0)).unwrap();
        let e = r.emotions_after.as_ref().unwrap();
        assert!(e.get(EmotionKind::Disappointment) >= 2.0 / 3.0, "{e:?}");
        let plan = r.plan.unwrap();
        assert_eq!(plan.fired_rule.as_deref(), Some("cooperative-disappointed-wrong-answer"));
        assert_eq!(
            plan.vca_tactics,
            vec![Tactic::IncreaseStudentSelfAbility, Tactic::IncreaseStudentEffort]
        );
    }

    #[test]
    fn independent_disappointment_moves_learner_to_cooperative() {
        let mut s = start(Mode::Env3, "ISTJ");
        assert!(s.vca().is_none());
        for _ in 0..4 {
            let a = submit_correct(&s, 1.0);
            s.step(a).unwrap();
        }
        let r = s.step(submit_wrong(1.0)).unwrap();
        assert_eq!(
            r.plan.as_ref().unwrap().vta_tactics,
            vec![
                Tactic::IncreaseStudentSelfAbility,
                Tactic::IncreaseStudentEffort,
                Tactic::ChangeStudentGroupToCooperative
            ]
        );
        assert_eq!(s.group(), LearningGroup::Cooperative);
        assert_eq!(s.vca().unwrap().to_string(), "EN");
        assert_eq!(r.vca.unwrap().to_string(), "EN");
        s.check_invariants().unwrap();
    }

    #[test]
    fn competitive_classmate_outcomes() {
        for (skill, expect_good) in [(1.0, true), (0.0, false)] {
            let setup = SessionSetup { vca_skill: skill, ..SessionSetup::new(Mode::Env3, 5) };
            let mut s = start_session(setup, &answers_for("ENTP"), assets()).unwrap();
            for _ in 0..4 {
                let a = submit_correct(&s, 2.0);
                let r = s.step(a).unwrap();
                let outcome = r.vca_outcome.unwrap();
                assert_eq!(outcome.correct, expect_good);
                let e = r.emotions_after.unwrap();
                let fortunes = match (expect_good, r.liking.unwrap()) {
                    (true, Liking::Love) => EmotionKind::HappyFor,
                    (true, Liking::Hate) => EmotionKind::Resentment,
                    (false, Liking::Love) => EmotionKind::Pity,
                    (false, Liking::Hate) => EmotionKind::Gloating,
                };
                assert!(e.get(fortunes) > 0.0, "{fortunes:?} in {e:?}");
            }
        }
        let mut coop = start(Mode::Env3, "ISFJ");
        assert_eq!(coop.vca_outcome_event().unwrap(), None);
    }

    #[test]
    fn cursor_advances_once_and_bank_exhaustion_closes() {
        let mut s = start(Mode::Env3, "ISTJ");
        s.step(LearnerAction::Skip).unwrap();
        assert_eq!(s.cursor(), 1);
        s.step(LearnerAction::Timeout { rt: 99.0 }).unwrap();
        assert_eq!(s.cursor(), 2);
        s.step(submit_wrong(1.0)).unwrap();
        assert_eq!(s.cursor(), 2);
        let n = s.assets().bank.len();
        while s.is_active() {
            s.step(LearnerAction::Skip).unwrap();
        }
        assert_eq!(s.cursor(), n);
        assert!(s.current_exercise().is_none());
    }

    #[test]
    fn late_submission_is_a_timeout() {
        let mut s = start(Mode::Env2, "ISTJ");
        let dt = s.current_exercise().unwrap().default_time;
        let a = submit_correct(&s, dt + 1.0);
        let r = s.step(a).unwrap();
        assert_eq!(r.kind, EventKind::Timeout);
        assert_eq!(r.grade, Some(0.0));
    }

    #[test]
    fn invalid_actions_rejected() {
        let mut s = start(Mode::Env2, "ISTJ");
        let bad = LearnerAction::SubmitAnswer { answer: "x".into(), rt: -1.0, effort: 0.0 };
        assert!(matches!(s.step(bad), Err(SessionError::InvalidAction(_))));
        let bad = LearnerAction::SubmitAnswer { answer: "x".into(), rt: 1.0, effort: 2.0 };
        assert!(matches!(s.step(bad), Err(SessionError::InvalidAction(_))));
        assert!(s.log().is_empty());
        let setup = SessionSetup { vca_skill: 1.5, ..SessionSetup::new(Mode::Env3, 1) };
        assert!(start_session(setup, &answers_for("ISTJ"), assets()).is_err());
    }

    #[test]
    fn sequence_numbers_increase() {
        let mut s = start(Mode::Env3, "ESFJ");
        for _ in 0..5 {
            s.step(LearnerAction::Think).unwrap();
            s.step(LearnerAction::RequestHelp).unwrap();
        }
        let seqs: Vec<u64> = s.log().iter().map(|r| r.seq).collect();
        assert_eq!(seqs, (1..=10).collect::<Vec<_>>());
        s.check_invariants().unwrap();
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("env3".parse::<Mode>().unwrap(), Mode::Env3);
        assert_eq!("2".parse::<Mode>().unwrap(), Mode::Env2);
        assert!("env4".parse::<Mode>().is_err());
    }
}
