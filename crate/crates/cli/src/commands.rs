//! Implementations behind the `tutor` subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};

use tutor_core::appraisal::{trace, ObservedEvent};
use tutor_core::assets::{check_script_coverage, read_text};
use tutor_core::personality::select_vca_personality;
use tutor_core::simulator::{batch_simulate, load_profiles};
use tutor_core::{
    Answers, Assets, GoalVector, KnowledgeBase, LearnerProfile, LearningGroup, Mode,
    PersonalityProfile, QuestionnaireForm, ScriptCatalog, WeightTable,
};

pub fn score(form: &QuestionnaireForm, answers: &Answers) -> Result<String> {
    let p = PersonalityProfile::from_answers(form, answers)?;
    let vca = select_vca_personality(p.personality_type)
        .map(|v| v.to_string())
        .unwrap_or_else(|_| "none".into());
    let g = p.goals.0;
    let s = p.scores;
    Ok(format!(
        "{} / {}\nscores: EI {:+.3}  SN {:+.3}  TF {:+.3}  JP {:+.3}\ngoals: {:.3} {:.3} {:.3} {:.3}\nvca: {vca}\n",
        p.personality_type, p.group, s.ei, s.sn, s.tf, s.jp, g[0], g[1], g[2], g[3]
    ))
}

pub fn parse_answers(text: &str) -> Result<Answers> {
    serde_json::from_str(text).context("answers must be a JSON object of item id to agreement")
}

pub fn parse_goals(text: &str) -> Result<GoalVector> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("goals `{text}` must be four comma-separated numbers"))?;
    let Ok(g) = <[f64; 4]>::try_from(parts) else {
        bail!("goals `{text}` must have exactly four values");
    };
    if g.iter().any(|x| !(0.0..=1.0).contains(x)) {
        bail!("goal importances must lie in [0, 1]");
    }
    Ok(GoalVector(g))
}

pub fn appraise_trace(
    events_text: &str,
    goals: GoalVector,
    weights: WeightTable,
    group: LearningGroup,
    json: bool,
) -> Result<String> {
    let events: Vec<ObservedEvent> =
        serde_json::from_str(events_text).context("events file must be a JSON array of events")?;
    let entries = trace(&events, goals, weights, group)?;
    if json {
        let mut out = String::new();
        for e in &entries {
            out.push_str(&serde_json::to_string(e)?);
            out.push('\n');
        }
        return Ok(out);
    }
    let mut out = String::new();
    for e in &entries {
        let _ = write!(
            out,
            "{:>3} {:<20} D={:+.4} L={:.4} U={:.4}",
            e.seq,
            format!("{:?}", e.kind),
            e.inputs.desirability,
            e.inputs.likelihood,
            e.inputs.unexpectedness
        );
        for (k, v) in &e.intensities {
            if *v > 0.0 {
                let _ = write!(out, " {k:?}={v:.4}({:?})", e.levels[k]);
            }
        }
        if let Some(p) = &e.prospect_intensities {
            for (k, v) in p {
                if *v > 0.0 {
                    let _ = write!(out, " next:{k:?}={v:.4}");
                }
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn validate_kb(kb_text: &str, scripts_text: &str) -> Result<String> {
    let kb = KnowledgeBase::from_json(kb_text).context("knowledge base")?;
    let scripts = ScriptCatalog::from_json(scripts_text).context("script catalog")?;
    check_script_coverage(&kb, &scripts).context("script coverage")?;
    Ok(format!(
        "ok: {} rules, {} scripts, speed threshold {}\n",
        kb.rules.len(),
        scripts.scripts.len(),
        kb.speed_threshold
    ))
}

/// Runs the batch and writes `report.json`, `summary.txt` and one log per
/// session under `out`. Returns the summary table.
pub fn simulate(
    profiles: &[LearnerProfile],
    assets: Arc<Assets>,
    modes: &[Mode],
    seed: u64,
    out: &Path,
) -> Result<String> {
    let batch = batch_simulate(profiles, assets, modes, seed)?;
    let logs = out.join("logs");
    fs::create_dir_all(&logs).with_context(|| format!("creating {}", logs.display()))?;
    for s in &batch.sessions {
        let path = logs.join(format!("{}.ndjson", s.session.id()));
        fs::write(&path, s.log()).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut report = batch.report.to_json();
    report.push('\n');
    fs::write(out.join("report.json"), report).context("writing report.json")?;
    let summary = batch.report.summary_table();
    fs::write(out.join("summary.txt"), &summary).context("writing summary.txt")?;
    Ok(summary)
}

pub fn read_profiles(path: Option<&Path>) -> Result<Vec<LearnerProfile>> {
    let text = match path {
        Some(p) => read_text(p)?,
        None => tutor_core::assets::DEFAULT_PROFILES.to_string(),
    };
    Ok(load_profiles(&text)?)
}
