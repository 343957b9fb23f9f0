use std::sync::Arc;

use proptest::prelude::*;

use tutor_core::session::replay;
use tutor_core::simulator::{simulate_session, LearnerProfile};
use tutor_core::tactics::{evaluate_rules, RuleContext};
use tutor_core::personality::canonical_answers;
use tutor_core::{
    start_session, Actor, Assets, EmotionKind, EventKind, GroupSlot, LearnerAction,
    LearningGroup, Level, Mode, PersonalityType, SessionSetup, SessionStatus, VcaPersonality,
};

fn assets() -> Arc<Assets> {
    Arc::new(Assets::defaults())
}

fn any_type() -> impl Strategy<Value = PersonalityType> {
    (0usize..16).prop_map(|i| PersonalityType::all().nth(i).unwrap())
}

fn any_mode() -> impl Strategy<Value = Mode> {
    prop::sample::select(Mode::ALL.to_vec())
}

fn any_action() -> impl Strategy<Value = LearnerAction> {
    prop_oneof![
        4 => (any::<bool>(), 0.0f64..80.0, 0.0f64..=1.0).prop_map(|(right, rt, effort)| {
            LearnerAction::SubmitAnswer {
                // Resolved against the current exercise below.
                answer: if right { "\u{1}key".into() } else { "wrong".into() },
                rt,
                effort,
            }
        }),
        1 => (0.0f64..80.0).prop_map(|rt| LearnerAction::Timeout { rt }),
        1 => Just(LearnerAction::RequestHelp),
        1 => Just(LearnerAction::RejectHelp),
        1 => Just(LearnerAction::Skip),
        1 => Just(LearnerAction::Think),
    ]
}

fn run(
    t: PersonalityType,
    mode: Mode,
    seed: u64,
    actions: &[LearnerAction],
) -> tutor_core::SessionState {
    let a = assets();
    let answers = canonical_answers(&a.form, t);
    let mut s = start_session(SessionSetup::new(mode, seed), &answers, a).unwrap();
    for action in actions {
        if !s.is_active() {
            break;
        }
        let action = match action {
            LearnerAction::SubmitAnswer { answer, rt, effort } if answer == "\u{1}key" => {
                LearnerAction::SubmitAnswer {
                    answer: s.current_exercise().unwrap().answer_key.clone(),
                    rt: *rt,
                    effort: *effort,
                }
            }
            other => other.clone(),
        };
        let before_group = s.group();
        let record = s.step(action).unwrap();
        if let Some(plan) = &record.plan {
            let slot = if mode == Mode::Env3 { GroupSlot::from(before_group) } else { GroupSlot::Ungrouped };
            for c in &plan.sequence {
                assert!(c.tactic.is_legal(c.actor, slot), "{:?} {:?} in {slot:?}", c.actor, c.tactic);
            }
            if before_group == LearningGroup::Independent || mode != Mode::Env3 {
                assert!(plan.vca_tactics.is_empty());
            }
            assert_eq!(plan.realized.len(), plan.sequence.len());
        }
        s.check_invariants().unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_sessions_keep_invariants_and_replay(
        t in any_type(),
        mode in any_mode(),
        seed in any::<u64>(),
        actions in prop::collection::vec(any_action(), 0..40),
    ) {
        let s = run(t, mode, seed, &actions);
        let log = s.export_log();
        prop_assert_eq!(log.lines().count(), s.log().len() + 1);
        let again = replay(&log, Arc::clone(s.assets())).unwrap();
        prop_assert_eq!(again.export_log(), log);
        for r in s.log() {
            match mode {
                Mode::Env1 => prop_assert!(r.plan.is_none() && r.appraisal.is_none() && r.emotions_after.is_none()),
                Mode::Env2 => {
                    prop_assert!(r.plan.as_ref().unwrap().vca_tactics.is_empty());
                    prop_assert!(r.vca.is_none() && r.liking.is_none());
                }
                Mode::Env3 => {}
            }
            if let Some(e) = &r.emotions_after {
                prop_assert_eq!(e.get(EmotionKind::Joy) * e.get(EmotionKind::Distress), 0.0);
                prop_assert!(e.intensities().values().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }

    #[test]
    fn rule_evaluation_is_deterministic(
        group in prop::sample::select(GroupSlot::ALL.to_vec()),
        event in prop::sample::select(EventKind::ALL.to_vec()),
        levels in prop::collection::vec(0u8..3, 14),
        speed in 0.0f64..=1.0,
        vca in prop::sample::select(VcaPersonality::all().to_vec()),
    ) {
        let a = Assets::defaults();
        let emotions = EmotionKind::ALL
            .iter()
            .zip(&levels)
            .map(|(&k, &l)| (k, [Level::Low, Level::Medium, Level::High][l as usize]))
            .collect();
        let has_vca = matches!(group, GroupSlot::Cooperative | GroupSlot::Competitive);
        let ctx = RuleContext { group, emotions, event, response_speed: speed, vca: has_vca.then_some(vca) };
        let p1 = evaluate_rules(&a.kb, &ctx);
        let p2 = evaluate_rules(&a.kb, &ctx);
        prop_assert_eq!(serde_json::to_string(&p1).unwrap(), serde_json::to_string(&p2).unwrap());
        for c in &p1.sequence {
            prop_assert!(c.tactic.is_legal(c.actor, group));
        }
        if !has_vca {
            prop_assert!(p1.vca_tactics.is_empty());
        }
    }

    #[test]
    fn more_skill_never_fewer_correct_answers(
        t in any_type(),
        mode in any_mode(),
        seed in any::<u64>(),
        lo in 0.0f64..=1.0,
        hi in 0.0f64..=1.0,
        speed_factor in 0.3f64..=2.0,
        help in 0.0f64..=1.0,
        think in 0.0f64..=1.0,
    ) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let a = assets();
        let mk = |skill| LearnerProfile {
            name: "p".into(),
            questionnaire_answers: canonical_answers(&a.form, t),
            skill,
            speed_factor,
            help_propensity: help,
            effort_level: 0.5,
            quit_after: None,
            think_propensity: think,
        };
        let low = simulate_session(&mk(lo), Arc::clone(&a), mode, seed).unwrap();
        let high = simulate_session(&mk(hi), Arc::clone(&a), mode, seed).unwrap();
        prop_assert!(
            high.report.count(EventKind::AccurateResponse) >= low.report.count(EventKind::AccurateResponse)
        );
    }
}

#[test]
fn report_counts_sum_to_events() {
    let a = assets();
    let profiles = tutor_core::simulator::load_profiles(tutor_core::assets::DEFAULT_PROFILES).unwrap();
    let out = tutor_core::batch_simulate(&profiles, a, &Mode::ALL, 5).unwrap();
    for s in &out.report.sessions {
        assert_eq!(s.event_counts.values().sum::<u64>(), s.events);
        if s.mode == Mode::Env1 {
            assert_eq!(s.tactics_by(Actor::Tutor) + s.tactics_by(Actor::Classmate), 0);
        }
    }
    assert!(out.sessions.iter().all(|s| s.session.status() == SessionStatus::Closed));
}

#[test]
fn canonical_population_covers_expected_classmate_prefixes() {
    let a = assets();
    let profiles = tutor_core::simulator::canonical_profiles(&a.form);
    let out = tutor_core::batch_simulate(&profiles, a, &[Mode::Env3], 1).unwrap();
    let prefixes: std::collections::BTreeSet<String> = out
        .sessions
        .iter()
        .filter_map(|s| s.session.log().first().and_then(|r| r.vca))
        .map(|v| v.to_string())
        .collect();
    assert!(prefixes.contains("IN") && prefixes.contains("IS"), "{prefixes:?}");
    let groups: std::collections::BTreeSet<_> = out.report.sessions.iter().map(|s| s.initial_group).collect();
    assert_eq!(groups.len(), 3);
}
