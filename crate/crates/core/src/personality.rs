//! Personality identification: questionnaire scoring, learning-group placement
//! and selection of the classmate agent's personality.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PersonalityError {
    #[error("questionnaire parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("questionnaire item `{item}`: {message}")]
    InvalidItem { item: String, message: String },
    #[error("questionnaire: {0}")]
    InvalidForm(String),
    #[error("no answer for questionnaire item `{0}`")]
    MissingAnswer(String),
    #[error("answer given for unknown questionnaire item `{0}`")]
    UnknownItem(String),
    #[error("answer for item `{item}` is {value}, expected a value in [-1, 1]")]
    AnswerOutOfRange { item: String, value: f64 },
    #[error("invalid personality type `{0}`")]
    InvalidType(String),
    #[error("invalid classmate personality `{0}`")]
    InvalidVcaPersonality(String),
    #[error("learners of type {0} are placed in the independent group and have no classmate agent")]
    NoClassmateForIndependent(PersonalityType),
}

/// One of the four preference dichotomies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    EI,
    SN,
    TF,
    JP,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [Dimension::EI, Dimension::SN, Dimension::TF, Dimension::JP];

    /// `(first, second)` pole. Negative scores point at the second pole.
    pub fn poles(self) -> (Pole, Pole) {
        match self {
            Dimension::EI => (Pole::E, Pole::I),
            Dimension::SN => (Pole::S, Pole::N),
            Dimension::TF => (Pole::T, Pole::F),
            Dimension::JP => (Pole::J, Pole::P),
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pole {
    E,
    I,
    S,
    N,
    T,
    F,
    J,
    P,
}

impl Pole {
    pub fn dimension(self) -> Dimension {
        match self {
            Pole::E | Pole::I => Dimension::EI,
            Pole::S | Pole::N => Dimension::SN,
            Pole::T | Pole::F => Dimension::TF,
            Pole::J | Pole::P => Dimension::JP,
        }
    }

    pub fn opposite(self) -> Pole {
        let (first, second) = self.dimension().poles();
        if self == first {
            second
        } else {
            first
        }
    }

    pub fn is_first(self) -> bool {
        self.dimension().poles().0 == self
    }

    pub fn letter(self) -> char {
        match self {
            Pole::E => 'E',
            Pole::I => 'I',
            Pole::S => 'S',
            Pole::N => 'N',
            Pole::T => 'T',
            Pole::F => 'F',
            Pole::J => 'J',
            Pole::P => 'P',
        }
    }

    fn from_letter(c: char) -> Option<Pole> {
        Some(match c {
            'E' => Pole::E,
            'I' => Pole::I,
            'S' => Pole::S,
            'N' => Pole::N,
            'T' => Pole::T,
            'F' => Pole::F,
            'J' => Pole::J,
            'P' => Pole::P,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionItem {
    pub id: String,
    pub prompt: String,
    pub dimension: Dimension,
    /// The pole an "agree" answer counts toward.
    pub keyed_pole: Pole,
    /// Goal index (1..=4) to the weight an "agree" answer contributes.
    #[serde(default)]
    pub goal_weights: BTreeMap<u8, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionnaireForm {
    pub version: String,
    pub items: Vec<QuestionItem>,
}

impl QuestionnaireForm {
    /// Parses and validates a form document.
    pub fn from_json(text: &str) -> Result<Self, PersonalityError> {
        let form: QuestionnaireForm =
            serde_json::from_str(text).map_err(|e| PersonalityError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        form.validate()?;
        Ok(form)
    }

    pub fn validate(&self) -> Result<(), PersonalityError> {
        let mut seen = std::collections::BTreeSet::new();
        let mut dimension_seen = [false; 4];
        let mut goal_totals = [0.0_f64; 4];
        for item in &self.items {
            let invalid = |message: String| PersonalityError::InvalidItem {
                item: item.id.clone(),
                message,
            };
            if !seen.insert(item.id.as_str()) {
                return Err(invalid("duplicate item id".into()));
            }
            if item.keyed_pole.dimension() != item.dimension {
                return Err(invalid(format!(
                    "keyed pole {:?} does not belong to dimension {:?}",
                    item.keyed_pole, item.dimension
                )));
            }
            dimension_seen[item.dimension.index()] = true;
            for (&goal, &weight) in &item.goal_weights {
                if !(1..=4).contains(&goal) {
                    return Err(invalid(format!("goal index {goal} outside 1..=4")));
                }
                if !weight.is_finite() || weight < 0.0 {
                    return Err(invalid(format!(
                        "goal {goal} weight {weight} must be finite and non-negative"
                    )));
                }
                goal_totals[usize::from(goal - 1)] += weight;
            }
        }
        if self.items.is_empty() {
            return Err(PersonalityError::InvalidForm("form has no items".into()));
        }
        for dim in Dimension::ALL {
            if !dimension_seen[dim.index()] {
                return Err(PersonalityError::InvalidForm(format!(
                    "no item measures dimension {dim:?}"
                )));
            }
        }
        for (i, total) in goal_totals.iter().enumerate() {
            if *total <= 0.0 {
                return Err(PersonalityError::InvalidForm(format!(
                    "goal {} has zero total weight",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn item(&self, id: &str) -> Option<&QuestionItem> {
        self.items.iter().find(|item| item.id == id)
    }

    /// Checks that `answers` covers exactly this form's items with in-range values.
    pub fn check_answers(&self, answers: &Answers) -> Result<(), PersonalityError> {
        for id in answers.0.keys() {
            if self.item(id).is_none() {
                return Err(PersonalityError::UnknownItem(id.clone()));
            }
        }
        for item in &self.items {
            let value = answers
                .get(&item.id)
                .ok_or_else(|| PersonalityError::MissingAnswer(item.id.clone()))?;
            if !value.is_finite() || !(-1.0..=1.0).contains(&value) {
                return Err(PersonalityError::AnswerOutOfRange {
                    item: item.id.clone(),
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Item id to agreement in `[-1, 1]` (`+1` fully agree, `-1` fully disagree).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Answers(pub BTreeMap<String, f64>);

impl Answers {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.0.get(id).copied()
    }

    pub fn insert(&mut self, id: impl Into<String>, agreement: f64) {
        self.0.insert(id.into(), agreement);
    }
}

impl FromIterator<(String, f64)> for Answers {
    fn from_iter<T: IntoIterator<Item = (String, f64)>>(iter: T) -> Self {
        Answers(iter.into_iter().collect())
    }
}

/// Signed preference strengths; positive values favour E, S, T, J.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionScores {
    pub ei: f64,
    pub sn: f64,
    pub tf: f64,
    pub jp: f64,
}

impl DimensionScores {
    pub fn get(&self, dim: Dimension) -> f64 {
        match dim {
            Dimension::EI => self.ei,
            Dimension::SN => self.sn,
            Dimension::TF => self.tf,
            Dimension::JP => self.jp,
        }
    }
}

/// A four-letter type such as `ISFJ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PersonalityType([Pole; 4]);

impl PersonalityType {
    pub fn new(ei: Pole, sn: Pole, tf: Pole, jp: Pole) -> Result<Self, PersonalityError> {
        let poles = [ei, sn, tf, jp];
        for (pole, dim) in poles.iter().zip(Dimension::ALL) {
            if pole.dimension() != dim {
                let code: String = poles.iter().map(|p| p.letter()).collect();
                return Err(PersonalityError::InvalidType(code));
            }
        }
        Ok(PersonalityType(poles))
    }

    /// All sixteen types, E/S/T/J-first lexicographic order.
    pub fn all() -> impl Iterator<Item = PersonalityType> {
        (0u8..16).map(|bits| {
            let pick = |dim: Dimension, bit: u8| {
                let (first, second) = dim.poles();
                if bits & (1 << (3 - bit)) == 0 {
                    first
                } else {
                    second
                }
            };
            PersonalityType([
                pick(Dimension::EI, 0),
                pick(Dimension::SN, 1),
                pick(Dimension::TF, 2),
                pick(Dimension::JP, 3),
            ])
        })
    }

    pub fn pole(&self, dim: Dimension) -> Pole {
        self.0[dim.index()]
    }

    pub fn poles(&self) -> [Pole; 4] {
        self.0
    }

    pub fn has(&self, pole: Pole) -> bool {
        self.pole(pole.dimension()) == pole
    }
}

impl fmt::Display for PersonalityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pole in self.0 {
            write!(f, "{}", pole.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PersonalityType {
    type Err = PersonalityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || PersonalityError::InvalidType(s.to_string());
        let poles: Vec<Pole> = s
            .trim()
            .to_ascii_uppercase()
            .chars()
            .map(|c| Pole::from_letter(c).ok_or_else(invalid))
            .collect::<Result<_, _>>()?;
        let [ei, sn, tf, jp]: [Pole; 4] = poles.try_into().map_err(|_| invalid())?;
        PersonalityType::new(ei, sn, tf, jp).map_err(|_| invalid())
    }
}

impl TryFrom<String> for PersonalityType {
    type Error = PersonalityError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<PersonalityType> for String {
    fn from(value: PersonalityType) -> Self {
        value.to_string()
    }
}

/// Goal importances: solve alone, effort regardless of result, answer fast,
/// cooperate with the classmate agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GoalVector(pub [f64; 4]);

impl GoalVector {
    pub const UNIFORM: GoalVector = GoalVector([0.25; 4]);

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LearningGroup {
    Independent,
    Cooperative,
    Competitive,
}

impl LearningGroup {
    pub const ALL: [LearningGroup; 3] = [
        LearningGroup::Independent,
        LearningGroup::Cooperative,
        LearningGroup::Competitive,
    ];

    pub fn has_classmate(self) -> bool {
        self != LearningGroup::Independent
    }
}

impl fmt::Display for LearningGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The classmate agent's personality over the E/I and S/N dimensions, e.g. `IN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VcaPersonality {
    pub ei: Pole,
    pub sn: Pole,
}

impl VcaPersonality {
    pub fn all() -> [VcaPersonality; 4] {
        [
            VcaPersonality { ei: Pole::I, sn: Pole::N },
            VcaPersonality { ei: Pole::I, sn: Pole::S },
            VcaPersonality { ei: Pole::E, sn: Pole::N },
            VcaPersonality { ei: Pole::E, sn: Pole::S },
        ]
    }
}

impl fmt::Display for VcaPersonality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.ei.letter(), self.sn.letter())
    }
}

impl FromStr for VcaPersonality {
    type Err = PersonalityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || PersonalityError::InvalidVcaPersonality(s.to_string());
        let mut chars = s.trim().chars().map(|c| c.to_ascii_uppercase());
        let ei = chars.next().and_then(Pole::from_letter).ok_or_else(invalid)?;
        let sn = chars.next().and_then(Pole::from_letter).ok_or_else(invalid)?;
        if chars.next().is_some() || ei.dimension() != Dimension::EI || sn.dimension() != Dimension::SN
        {
            return Err(invalid());
        }
        Ok(VcaPersonality { ei, sn })
    }
}

impl TryFrom<String> for VcaPersonality {
    type Error = PersonalityError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<VcaPersonality> for String {
    fn from(value: VcaPersonality) -> Self {
        value.to_string()
    }
}

/// Everything derived from a completed questionnaire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonalityProfile {
    pub personality_type: PersonalityType,
    pub scores: DimensionScores,
    pub goals: GoalVector,
    pub group: LearningGroup,
}

impl PersonalityProfile {
    pub fn from_answers(
        form: &QuestionnaireForm,
        answers: &Answers,
    ) -> Result<Self, PersonalityError> {
        let (scores, personality_type) = score_questionnaire(form, answers)?;
        let goals = derive_goal_vector(form, answers)?;
        Ok(PersonalityProfile {
            personality_type,
            scores,
            goals,
            group: assign_group(personality_type),
        })
    }
}

/// Averages signed agreement per dimension; a zero score resolves to the
/// second pole (I, N, F, P).
pub fn score_questionnaire(
    form: &QuestionnaireForm,
    answers: &Answers,
) -> Result<(DimensionScores, PersonalityType), PersonalityError> {
    form.check_answers(answers)?;
    let mut sums = [0.0_f64; 4];
    let mut counts = [0usize; 4];
    for item in &form.items {
        let agreement = answers.get(&item.id).unwrap_or_default();
        let toward_first = if item.keyed_pole.is_first() {
            agreement
        } else {
            -agreement
        };
        sums[item.dimension.index()] += toward_first;
        counts[item.dimension.index()] += 1;
    }
    let mean = |d: Dimension| sums[d.index()] / counts[d.index()] as f64;
    let scores = DimensionScores {
        ei: mean(Dimension::EI),
        sn: mean(Dimension::SN),
        tf: mean(Dimension::TF),
        jp: mean(Dimension::JP),
    };
    let letter = |d: Dimension| {
        let (first, second) = d.poles();
        if scores.get(d) > 0.0 {
            first
        } else {
            second
        }
    };
    let personality_type = PersonalityType([
        letter(Dimension::EI),
        letter(Dimension::SN),
        letter(Dimension::TF),
        letter(Dimension::JP),
    ]);
    Ok((scores, personality_type))
}

/// Weighted share of each goal's possible "agree" weight that the learner
/// actually agreed to. Disagreement counts as zero.
pub fn derive_goal_vector(
    form: &QuestionnaireForm,
    answers: &Answers,
) -> Result<GoalVector, PersonalityError> {
    form.check_answers(answers)?;
    let mut earned = [0.0_f64; 4];
    let mut possible = [0.0_f64; 4];
    for item in &form.items {
        let agreement = answers.get(&item.id).unwrap_or_default().max(0.0);
        for (&goal, &weight) in &item.goal_weights {
            let j = usize::from(goal - 1);
            earned[j] += weight * agreement;
            possible[j] += weight;
        }
    }
    if earned.iter().all(|&e| e == 0.0) {
        return Ok(GoalVector::UNIFORM);
    }
    let mut goals = [0.0; 4];
    for j in 0..4 {
        goals[j] = if possible[j] > 0.0 {
            (earned[j] / possible[j]).clamp(0.0, 1.0)
        } else {
            0.0
        };
    }
    Ok(GoalVector(goals))
}

/// Learning group placement by personality type.
pub fn assign_group(personality_type: PersonalityType) -> LearningGroup {
    use LearningGroup::*;
    match personality_type.to_string().as_str() {
        "INTJ" | "INFP" | "ISTJ" | "INTP" | "ISFP" | "ISTP" => Independent,
        "INFJ" | "ENFP" | "ISFJ" | "ESFP" | "ESTP" | "ENFJ" | "ESTJ" => Cooperative,
        "ENTP" | "ENTJ" | "ESFJ" => Competitive,
        // The sixteen codes above are every constructible type.
        other => unreachable!("personality type {other} missing from group table"),
    }
}

/// Opposed classmate: flips the learner's E/I and S/N letters.
pub fn select_vca_personality(
    personality_type: PersonalityType,
) -> Result<VcaPersonality, PersonalityError> {
    if !assign_group(personality_type).has_classmate() {
        return Err(PersonalityError::NoClassmateForIndependent(personality_type));
    }
    Ok(opposed_vca(personality_type))
}

pub(crate) fn opposed_vca(personality_type: PersonalityType) -> VcaPersonality {
    VcaPersonality {
        ei: personality_type.pole(Dimension::EI).opposite(),
        sn: personality_type.pole(Dimension::SN).opposite(),
    }
}

/// Answers that score unambiguously to `target` on `form`: full agreement
/// with every item keyed toward one of the type's letters, full disagreement
/// otherwise.
pub fn canonical_answers(form: &QuestionnaireForm, target: PersonalityType) -> Answers {
    form.items
        .iter()
        .map(|item| {
            let agreement = if target.has(item.keyed_pole) { 1.0 } else { -1.0 };
            (item.id.clone(), agreement)
        })
        .collect()
}
