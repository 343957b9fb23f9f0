use serde::{Deserialize, Serialize};

use super::{Tactic, TacticPlan};
use crate::personality::{LearningGroup, VcaPersonality};
use crate::session::SessionState;

/// Structural change a plan made to its session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "effect")]
pub enum MetaEffect {
    GroupChanged {
        from: LearningGroup,
        to: LearningGroup,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vca: Option<VcaPersonality>,
    },
    /// A group switch to the group the learner is already in.
    NoOp { tactic: Tactic, group: LearningGroup },
    Closed,
}

/// Applies group switches and leave permission, in plan order.
pub fn apply_meta_tactics(plan: &TacticPlan, session: &mut SessionState) -> Vec<MetaEffect> {
    let mut effects = Vec::new();
    for c in &plan.sequence {
        if let Some(to) = c.tactic.target_group() {
            let from = session.group;
            if from == to {
                effects.push(MetaEffect::NoOp { tactic: c.tactic, group: from });
            } else {
                session.switch_group(to);
                effects.push(MetaEffect::GroupChanged { from, to, vca: session.vca });
            }
        } else if c.tactic == Tactic::AllowToLeaveVirtualClass && session.is_active() {
            session.close();
            effects.push(MetaEffect::Closed);
        }
    }
    effects
}
