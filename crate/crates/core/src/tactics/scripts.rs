use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Actor, TacticPlan, Tactic};
use crate::personality::LearningGroup;

#[derive(Debug, Error, PartialEq)]
pub enum ScriptError {
    #[error("script catalog parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("script for {tactic}: {message}")]
    Invalid { tactic: Tactic, message: String },
    #[error("no behavior script for tactic {tactic}{}", group.map(|g| format!(" in the {g} group")).unwrap_or_default())]
    Missing {
        tactic: Tactic,
        group: Option<LearningGroup>,
    },
    #[error("animation map `{character}`: {message}")]
    AnimationMap { character: String, message: String },
}

/// Animation-agnostic gesture descriptors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gesture {
    Acknowledge,
    Announce,
    Congratulate,
    Explain,
    Greet,
    Idle,
    Pleased,
    Point,
    Sad,
    Speak,
    Suggest,
    Think,
    Uncertain,
    Wave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorScript {
    pub tactic: Tactic,
    /// Group-specific variant; `None` applies wherever no variant exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<LearningGroup>,
    pub gestures: Vec<Gesture>,
    pub utterances: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptCatalog {
    /// Character animation names (per character) mapped onto descriptors.
    #[serde(default)]
    pub animation_map: BTreeMap<String, BTreeMap<String, Gesture>>,
    pub scripts: Vec<BehaviorScript>,
}

impl ScriptCatalog {
    pub fn from_json(text: &str) -> Result<Self, ScriptError> {
        let catalog: ScriptCatalog =
            serde_json::from_str(text).map_err(|e| ScriptError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn validate(&self) -> Result<(), ScriptError> {
        let mut keys = BTreeSet::new();
        for s in &self.scripts {
            let invalid = |message: &str| ScriptError::Invalid {
                tactic: s.tactic,
                message: message.to_string(),
            };
            if !keys.insert((s.tactic, s.group)) {
                return Err(invalid("duplicate script"));
            }
            if s.utterances.is_empty() {
                return Err(invalid("utterance pool is empty"));
            }
            if s.utterances.iter().any(|u| u.trim().is_empty()) {
                return Err(invalid("blank utterance"));
            }
        }
        for (character, map) in &self.animation_map {
            if map.is_empty() {
                return Err(ScriptError::AnimationMap {
                    character: character.clone(),
                    message: "no animations mapped".into(),
                });
            }
        }
        Ok(())
    }

    /// The group-specific script when one exists, else the generic one.
    pub fn lookup(
        &self,
        tactic: Tactic,
        group: Option<LearningGroup>,
    ) -> Result<&BehaviorScript, ScriptError> {
        let exact = group.and_then(|g| {
            self.scripts
                .iter()
                .find(|s| s.tactic == tactic && s.group == Some(g))
        });
        exact
            .or_else(|| {
                self.scripts
                    .iter()
                    .find(|s| s.tactic == tactic && s.group.is_none())
            })
            .ok_or(ScriptError::Missing { tactic, group })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedBehavior {
    pub actor: Actor,
    pub tactic: Tactic,
    pub gestures: Vec<Gesture>,
    pub utterance: String,
}

/// Picks one utterance per planned tactic, uniformly from its pool.
pub fn realize_tactics<R: Rng + ?Sized>(
    mut plan: TacticPlan,
    catalog: &ScriptCatalog,
    group: Option<LearningGroup>,
    rng: &mut R,
) -> Result<TacticPlan, ScriptError> {
    let mut realized = Vec::with_capacity(plan.sequence.len());
    for c in &plan.sequence {
        let script = catalog.lookup(c.tactic, group)?;
        // u32 keeps the draw identical on 32- and 64-bit targets.
        let pick = rng.random_range(0..script.utterances.len() as u32) as usize;
        realized.push(RealizedBehavior {
            actor: c.actor,
            tactic: c.tactic,
            gestures: script.gestures.clone(),
            utterance: script.utterances[pick].clone(),
        });
    }
    plan.realized = realized;
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tactics::Conclusion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn catalog() -> ScriptCatalog {
        ScriptCatalog {
            animation_map: BTreeMap::new(),
            scripts: vec![
                BehaviorScript {
                    tactic: Tactic::CongratulateStudent,
                    group: None,
                    gestures: vec![Gesture::Congratulate, Gesture::Pleased, Gesture::Speak],
                    utterances: vec!["a".into(), "b".into(), "c".into()],
                },
                BehaviorScript {
                    tactic: Tactic::PersuadeStudentToThinkMoreForProblem,
                    group: Some(LearningGroup::Competitive),
                    gestures: vec![Gesture::Speak],
                    utterances: vec!["competitive".into()],
                },
                BehaviorScript {
                    tactic: Tactic::PersuadeStudentToThinkMoreForProblem,
                    group: None,
                    gestures: vec![Gesture::Think, Gesture::Speak],
                    utterances: vec!["generic".into()],
                },
            ],
        }
    }

    fn plan(tactics: &[(Actor, Tactic)]) -> TacticPlan {
        TacticPlan::from_conclusions(
            tactics.iter().map(|&(actor, tactic)| Conclusion { actor, tactic }).collect(),
            None,
        )
    }

    #[test]
    fn realization_is_seeded() {
        let p = plan(&[(Actor::Tutor, Tactic::CongratulateStudent); 8]);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            realize_tactics(p.clone(), &catalog(), None, &mut rng).unwrap()
        };
        assert_eq!(run(3), run(3));
        let r = run(3);
        assert_eq!(r.realized.len(), 8);
        assert!(r.realized.iter().all(|b| ["a", "b", "c"].contains(&b.utterance.as_str())));
        assert_eq!(r.realized[0].gestures, vec![Gesture::Congratulate, Gesture::Pleased, Gesture::Speak]);
    }

    #[test]
    fn empty_plan_realizes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = realize_tactics(TacticPlan::default(), &catalog(), None, &mut rng).unwrap();
        assert!(r.realized.is_empty());
    }

    #[test]
    fn group_variant_preferred() {
        let p = plan(&[(Actor::Classmate, Tactic::PersuadeStudentToThinkMoreForProblem)]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let comp = realize_tactics(p.clone(), &catalog(), Some(LearningGroup::Competitive), &mut rng).unwrap();
        assert_eq!(comp.realized[0].utterance, "competitive");
        let coop = realize_tactics(p, &catalog(), Some(LearningGroup::Cooperative), &mut rng).unwrap();
        assert_eq!(coop.realized[0].utterance, "generic");
    }

    #[test]
    fn missing_script_names_tactic() {
        let p = plan(&[(Actor::Tutor, Tactic::GiveHelp)]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = realize_tactics(p, &catalog(), None, &mut rng).unwrap_err();
        assert_eq!(err, ScriptError::Missing { tactic: Tactic::GiveHelp, group: None });
        assert!(err.to_string().contains("GiveHelp"));
    }

    #[test]
    fn validation() {
        let mut c = catalog();
        c.scripts[0].utterances.clear();
        assert!(matches!(c.validate(), Err(ScriptError::Invalid { .. })));
        let mut c = catalog();
        let dup = c.scripts[0].clone();
        c.scripts.push(dup);
        assert!(c.validate().is_err());
        let bad_gesture = r#"{"scripts": [{"tactic": "GiveHelp", "gestures": ["Dance"], "utterances": ["x"]}]}"#;
        assert!(matches!(ScriptCatalog::from_json(bad_gesture), Err(ScriptError::Parse { .. })));
    }
}
