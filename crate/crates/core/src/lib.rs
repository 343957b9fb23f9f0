//! Affective tutoring engine.
//!
//! A learner's questionnaire answers give a personality type, goal weights
//! and a learning group. Session events are appraised into emotion
//! intensities, and a rule base picks what the tutor and the classmate agent
//! do next.

pub mod appraisal;
pub mod assets;
pub mod personality;
pub mod session;
pub mod simulator;
pub mod tactics;

pub use appraisal::{
    AppraisalError, AppraisalInputs, EmotionKind, EmotionState, EnvironmentalState, EventKind,
    Level, Liking, Valence, WeightTable,
};
pub use assets::{AssetError, AssetPaths, Assets};
pub use personality::{
    Answers, GoalVector, LearningGroup, PersonalityError, PersonalityProfile, PersonalityType,
    QuestionnaireForm, VcaPersonality,
};
pub use session::{
    start_session, EventRecord, Exercise, ExerciseBank, LearnerAction, Mode, SessionError,
    SessionSetup, SessionState, SessionStatus,
};
pub use simulator::{batch_simulate, simulate_session, LearnerProfile, SimulationReport};
pub use tactics::{
    Actor, GroupSlot, KnowledgeBase, RealizedBehavior, ScriptCatalog, Tactic, TacticPlan,
};
