//! Tutor and classmate tactics: per-group catalogs, the if-then knowledge
//! base, and realization into gestures and utterances.

mod meta;
mod rules;
mod scripts;

pub use meta::{apply_meta_tactics, MetaEffect};
pub use rules::{
    evaluate_rules, Comparison, Condition, Conclusion, EmotionAtom, KbError, KnowledgeBase,
    RuleContext, Rule, SpeedBand, TacticPlan,
};
pub use scripts::{
    realize_tactics, BehaviorScript, Gesture, RealizedBehavior, ScriptCatalog, ScriptError,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::personality::LearningGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Actor {
    #[serde(rename = "VTA")]
    Tutor,
    #[serde(rename = "VCA")]
    Classmate,
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Actor::Tutor => "VTA",
            Actor::Classmate => "VCA",
        })
    }
}

/// The group context a rule is evaluated in. `Ungrouped` is the tutor-only
/// environment, where learners are not placed in groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupSlot {
    Ungrouped,
    Independent,
    Cooperative,
    Competitive,
}

impl GroupSlot {
    pub const ALL: [GroupSlot; 4] = [
        GroupSlot::Ungrouped,
        GroupSlot::Independent,
        GroupSlot::Cooperative,
        GroupSlot::Competitive,
    ];

    pub fn group(self) -> Option<LearningGroup> {
        match self {
            GroupSlot::Ungrouped => None,
            GroupSlot::Independent => Some(LearningGroup::Independent),
            GroupSlot::Cooperative => Some(LearningGroup::Cooperative),
            GroupSlot::Competitive => Some(LearningGroup::Competitive),
        }
    }
}

impl From<Option<LearningGroup>> for GroupSlot {
    fn from(group: Option<LearningGroup>) -> Self {
        match group {
            None => GroupSlot::Ungrouped,
            Some(LearningGroup::Independent) => GroupSlot::Independent,
            Some(LearningGroup::Cooperative) => GroupSlot::Cooperative,
            Some(LearningGroup::Competitive) => GroupSlot::Competitive,
        }
    }
}

impl From<LearningGroup> for GroupSlot {
    fn from(group: LearningGroup) -> Self {
        Some(group).into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tactic {
    IncreaseStudentSelfAbility,
    IncreaseStudentEffort,
    CongratulateStudent,
    CongratulateClassmate,
    EncourageStudent,
    RecognizeStudentEffort,
    ShowStudentNewSkills,
    ShowNextExercise,
    AllowToLeaveVirtualClass,
    TeacherIsIdle,
    ProposeCooperateWithVCA,
    ChangeStudentGroupToCooperative,
    ChangeStudentGroupToCompetitive,
    ChangeStudentGroupToIndependent,
    PersuadeStudentToThinkMoreForProblem,
    CooperateWithStudent,
    NotifyStudentForDeadline,
    GiveHelp,
    PersuadeStudentToBeIndependent,
    OfferCooperation,
}

use Tactic::*;

const INDEPENDENT_TUTOR: &[Tactic] = &[
    IncreaseStudentSelfAbility,
    IncreaseStudentEffort,
    CongratulateStudent,
    EncourageStudent,
    RecognizeStudentEffort,
    ShowStudentNewSkills,
    AllowToLeaveVirtualClass,
    TeacherIsIdle,
    ProposeCooperateWithVCA,
    ChangeStudentGroupToCooperative,
    ChangeStudentGroupToCompetitive,
    ShowNextExercise,
];

const COOPERATIVE_CLASSMATE: &[Tactic] = &[
    IncreaseStudentSelfAbility,
    IncreaseStudentEffort,
    PersuadeStudentToThinkMoreForProblem,
    CooperateWithStudent,
    NotifyStudentForDeadline,
    EncourageStudent,
    GiveHelp,
    PersuadeStudentToBeIndependent,
    OfferCooperation,
];

const COOPERATIVE_TUTOR: &[Tactic] = &[
    CongratulateStudent,
    RecognizeStudentEffort,
    ShowStudentNewSkills,
    ShowNextExercise,
    AllowToLeaveVirtualClass,
    TeacherIsIdle,
    ChangeStudentGroupToIndependent,
    ChangeStudentGroupToCompetitive,
];

const COMPETITIVE_CLASSMATE: &[Tactic] = &[
    IncreaseStudentEffort,
    PersuadeStudentToThinkMoreForProblem,
    NotifyStudentForDeadline,
];

const COMPETITIVE_TUTOR: &[Tactic] = &[
    CongratulateStudent,
    CongratulateClassmate,
    IncreaseStudentSelfAbility,
    EncourageStudent,
    RecognizeStudentEffort,
    ShowStudentNewSkills,
    ShowNextExercise,
    AllowToLeaveVirtualClass,
    TeacherIsIdle,
    ChangeStudentGroupToIndependent,
    ChangeStudentGroupToCooperative,
];

/// Tutor-only environment: the independent catalog without group or
/// classmate tactics, plus direct help.
const UNGROUPED_TUTOR: &[Tactic] = &[
    IncreaseStudentSelfAbility,
    IncreaseStudentEffort,
    CongratulateStudent,
    EncourageStudent,
    RecognizeStudentEffort,
    ShowStudentNewSkills,
    AllowToLeaveVirtualClass,
    TeacherIsIdle,
    ShowNextExercise,
    GiveHelp,
];

impl Tactic {
    pub const ALL: [Tactic; 20] = [
        IncreaseStudentSelfAbility,
        IncreaseStudentEffort,
        CongratulateStudent,
        CongratulateClassmate,
        EncourageStudent,
        RecognizeStudentEffort,
        ShowStudentNewSkills,
        ShowNextExercise,
        AllowToLeaveVirtualClass,
        TeacherIsIdle,
        ProposeCooperateWithVCA,
        ChangeStudentGroupToCooperative,
        ChangeStudentGroupToCompetitive,
        ChangeStudentGroupToIndependent,
        PersuadeStudentToThinkMoreForProblem,
        CooperateWithStudent,
        NotifyStudentForDeadline,
        GiveHelp,
        PersuadeStudentToBeIndependent,
        OfferCooperation,
    ];

    /// Tactics `actor` may perform in `slot`.
    pub fn catalog(actor: Actor, slot: GroupSlot) -> &'static [Tactic] {
        match (slot, actor) {
            (GroupSlot::Ungrouped, Actor::Tutor) => UNGROUPED_TUTOR,
            (GroupSlot::Independent, Actor::Tutor) => INDEPENDENT_TUTOR,
            (GroupSlot::Cooperative, Actor::Tutor) => COOPERATIVE_TUTOR,
            (GroupSlot::Cooperative, Actor::Classmate) => COOPERATIVE_CLASSMATE,
            (GroupSlot::Competitive, Actor::Tutor) => COMPETITIVE_TUTOR,
            (GroupSlot::Competitive, Actor::Classmate) => COMPETITIVE_CLASSMATE,
            (GroupSlot::Ungrouped | GroupSlot::Independent, Actor::Classmate) => &[],
        }
    }

    pub fn is_legal(self, actor: Actor, slot: GroupSlot) -> bool {
        Tactic::catalog(actor, slot).contains(&self)
    }

    /// Group a meta-tactic moves the learner to, if any.
    pub fn target_group(self) -> Option<LearningGroup> {
        match self {
            ChangeStudentGroupToCooperative => Some(LearningGroup::Cooperative),
            ChangeStudentGroupToCompetitive => Some(LearningGroup::Competitive),
            ChangeStudentGroupToIndependent => Some(LearningGroup::Independent),
            _ => None,
        }
    }

    /// Hyphenated display label, e.g. `Increase-Student-Self-Ability`.
    pub fn label(self) -> String {
        let name = format!("{self:?}");
        let mut out = String::with_capacity(name.len() + 8);
        let mut prev_upper = false;
        for (i, c) in name.chars().enumerate() {
            if c.is_ascii_uppercase() && i > 0 && !prev_upper {
                out.push('-');
            }
            prev_upper = c.is_ascii_uppercase();
            out.push(c);
        }
        out
    }
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
