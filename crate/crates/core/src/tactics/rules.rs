use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Actor, GroupSlot, RealizedBehavior, Tactic};
use crate::appraisal::{EmotionKind, EventKind, Level};
use crate::personality::VcaPersonality;

#[derive(Debug, Error, PartialEq)]
pub enum KbError {
    #[error("knowledge base parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("rule `{rule}`: {message}")]
    Rule { rule: String, message: String },
    #[error("rule `{rule}`: {actor} tactic {tactic} is not available in the {slot:?} group")]
    IllegalTactic {
        rule: String,
        actor: Actor,
        tactic: Tactic,
        slot: GroupSlot,
    },
    #[error("duplicate rule id `{0}`")]
    DuplicateId(String),
    #[error("knowledge base has no rules")]
    Empty,
    #[error("speed threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    #[default]
    Is,
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmotionAtom {
    pub kind: EmotionKind,
    pub level: Level,
    #[serde(default)]
    pub op: Comparison,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpeedBand {
    HigherThanThreshold,
    LowerThanThreshold,
}

/// Explicit AND/OR condition tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    All(Vec<Condition>),
    Any(Vec<Condition>),
    Group(GroupSlot),
    Emotion(EmotionAtom),
    Event(EventKind),
    Speed(SpeedBand),
    Vca(VcaPersonality),
}

impl Condition {
    pub fn holds(&self, ctx: &RuleContext, speed_threshold: f64) -> bool {
        match self {
            Condition::All(cs) => cs.iter().all(|c| c.holds(ctx, speed_threshold)),
            Condition::Any(cs) => cs.iter().any(|c| c.holds(ctx, speed_threshold)),
            Condition::Group(g) => ctx.group == *g,
            Condition::Emotion(atom) => {
                let level = ctx.emotions.get(&atom.kind).copied().unwrap_or(Level::Low);
                match atom.op {
                    Comparison::Is => level == atom.level,
                    Comparison::AtLeast => level >= atom.level,
                }
            }
            Condition::Event(e) => ctx.event == *e,
            Condition::Speed(SpeedBand::HigherThanThreshold) => {
                ctx.response_speed > speed_threshold
            }
            Condition::Speed(SpeedBand::LowerThanThreshold) => {
                ctx.response_speed <= speed_threshold
            }
            Condition::Vca(v) => ctx.vca == Some(*v),
        }
    }

    /// Whether the tree could hold in `slot`, treating every non-group atom
    /// as satisfiable. Used for catalog checks at load time.
    pub fn may_hold(&self, slot: GroupSlot) -> bool {
        match self {
            Condition::All(cs) => cs.iter().all(|c| c.may_hold(slot)),
            Condition::Any(cs) => cs.iter().any(|c| c.may_hold(slot)),
            Condition::Group(g) => *g == slot,
            Condition::Vca(_) => matches!(slot, GroupSlot::Cooperative | GroupSlot::Competitive),
            Condition::Emotion(_) | Condition::Event(_) | Condition::Speed(_) => true,
        }
    }

    fn check_non_empty(&self) -> Result<(), String> {
        match self {
            Condition::All(cs) | Condition::Any(cs) => {
                if cs.is_empty() {
                    return Err("empty condition group".into());
                }
                cs.iter().try_for_each(Condition::check_non_empty)
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Conclusion {
    pub actor: Actor,
    pub tactic: Tactic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    pub when: Condition,
    pub then: Vec<Conclusion>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnowledgeBase {
    pub speed_threshold: f64,
    pub rules: Vec<Rule>,
}

#[derive(Deserialize)]
struct RawKb {
    #[serde(default = "default_threshold")]
    speed_threshold: f64,
    rules: Vec<RawRule>,
}

#[derive(Deserialize)]
struct RawRule {
    id: String,
    #[serde(default)]
    note: String,
    when: serde_json::Value,
    then: Vec<serde_json::Value>,
}

fn default_threshold() -> f64 {
    0.5
}

impl KnowledgeBase {
    pub fn from_json(text: &str) -> Result<Self, KbError> {
        let raw: RawKb = serde_json::from_str(text).map_err(|e| KbError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut rules = Vec::with_capacity(raw.rules.len());
        for r in raw.rules {
            let rule_err = |message: String| KbError::Rule {
                rule: r.id.clone(),
                message,
            };
            let when: Condition =
                serde_json::from_value(r.when).map_err(|e| rule_err(format!("conditions: {e}")))?;
            let then = r
                .then
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    serde_json::from_value::<Conclusion>(v)
                        .map_err(|e| rule_err(format!("conclusion {}: {e}", i + 1)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rules.push(Rule {
                id: r.id,
                note: r.note,
                when,
                then,
            });
        }
        let kb = KnowledgeBase {
            speed_threshold: raw.speed_threshold,
            rules,
        };
        kb.validate()?;
        Ok(kb)
    }

    pub fn validate(&self) -> Result<(), KbError> {
        if self.rules.is_empty() {
            return Err(KbError::Empty);
        }
        if !(0.0..=1.0).contains(&self.speed_threshold) {
            return Err(KbError::InvalidThreshold(self.speed_threshold));
        }
        let mut ids = BTreeSet::new();
        for rule in &self.rules {
            if !ids.insert(rule.id.as_str()) {
                return Err(KbError::DuplicateId(rule.id.clone()));
            }
            let rule_err = |message: String| KbError::Rule {
                rule: rule.id.clone(),
                message,
            };
            rule.when.check_non_empty().map_err(rule_err)?;
            if rule.then.is_empty() {
                return Err(rule_err("no conclusions".into()));
            }
            let slots: Vec<GroupSlot> = GroupSlot::ALL
                .into_iter()
                .filter(|&s| rule.when.may_hold(s))
                .collect();
            if slots.is_empty() {
                return Err(rule_err("conditions can never hold in any group".into()));
            }
            for slot in slots {
                for c in &rule.then {
                    if !c.tactic.is_legal(c.actor, slot) {
                        return Err(KbError::IllegalTactic {
                            rule: rule.id.clone(),
                            actor: c.actor,
                            tactic: c.tactic,
                            slot,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// Every (actor, tactic) pair some rule can conclude.
    pub fn concluded_tactics(&self) -> BTreeSet<(Actor, Tactic)> {
        self.rules
            .iter()
            .flat_map(|r| r.then.iter().map(|c| (c.actor, c.tactic)))
            .chain(std::iter::once((Actor::Tutor, Tactic::TeacherIsIdle)))
            .collect()
    }
}

/// The facts a rule is matched against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleContext {
    pub group: GroupSlot,
    pub emotions: BTreeMap<EmotionKind, Level>,
    pub event: EventKind,
    pub response_speed: f64,
    pub vca: Option<VcaPersonality>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TacticPlan {
    pub vta_tactics: Vec<Tactic>,
    pub vca_tactics: Vec<Tactic>,
    /// Conclusions in rule order; `realized` follows the same order.
    pub sequence: Vec<Conclusion>,
    pub realized: Vec<RealizedBehavior>,
    pub fired_rule: Option<String>,
}

impl TacticPlan {
    pub fn from_conclusions(conclusions: Vec<Conclusion>, fired_rule: Option<String>) -> Self {
        let pick = |actor| {
            conclusions
                .iter()
                .filter(|c| c.actor == actor)
                .map(|c| c.tactic)
                .collect()
        };
        TacticPlan {
            vta_tactics: pick(Actor::Tutor),
            vca_tactics: pick(Actor::Classmate),
            sequence: conclusions,
            realized: Vec::new(),
            fired_rule,
        }
    }

    pub fn idle() -> Self {
        TacticPlan::from_conclusions(
            vec![Conclusion {
                actor: Actor::Tutor,
                tactic: Tactic::TeacherIsIdle,
            }],
            None,
        )
    }

    pub fn contains(&self, tactic: Tactic) -> bool {
        self.sequence.iter().any(|c| c.tactic == tactic)
    }

    /// Drops classmate tactics, keeping tutor ones in order.
    pub fn tutor_only(self) -> Self {
        let kept = self
            .sequence
            .into_iter()
            .filter(|c| c.actor == Actor::Tutor)
            .collect();
        TacticPlan::from_conclusions(kept, self.fired_rule)
    }
}

/// First rule in file order whose conditions hold fires; otherwise the tutor idles.
pub fn evaluate_rules(kb: &KnowledgeBase, ctx: &RuleContext) -> TacticPlan {
    kb.rules
        .iter()
        .find(|r| r.when.holds(ctx, kb.speed_threshold))
        .map(|r| TacticPlan::from_conclusions(r.then.clone(), Some(r.id.clone())))
        .unwrap_or_else(TacticPlan::idle)
}
