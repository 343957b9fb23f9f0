use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{start_session, EventRecord, Mode, SessionError, SessionSetup, SessionState};
use crate::appraisal::AppraisalInputs;
use crate::assets::Assets;
use crate::personality::{opposed_vca, Answers, PersonalityProfile, VcaPersonality};

pub const LOG_FORMAT: &str = "tutor-session-log/1";

/// First line of a session log: everything needed to rebuild the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: String,
    pub session_id: String,
    pub mode: Mode,
    pub seed: u64,
    pub vca_skill: f64,
    pub bank: String,
    pub answers: Answers,
    pub profile: PersonalityProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vca: Option<VcaPersonality>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_prospect: Option<AppraisalInputs>,
}

impl LogHeader {
    pub(crate) fn from_session(s: &SessionState) -> Self {
        LogHeader {
            format: LOG_FORMAT.to_string(),
            session_id: s.id().to_string(),
            mode: s.mode(),
            seed: s.seed(),
            vca_skill: s.vca_skill(),
            bank: s.assets().bank.title.clone(),
            answers: s.answers().clone(),
            profile: s.profile().clone(),
            vca: initial_vca(s),
            initial_prospect: s.initial_prospect().copied(),
        }
    }
}

/// The classmate the session started with; group switches may change it later.
fn initial_vca(s: &SessionState) -> Option<VcaPersonality> {
    (s.mode() == Mode::Env3 && s.profile().group.has_classmate())
        .then(|| opposed_vca(s.profile().personality_type))
}

fn parse_line<T: for<'de> Deserialize<'de>>(line: &str, n: usize) -> Result<T, SessionError> {
    serde_json::from_str(line).map_err(|e| SessionError::Log {
        line: n,
        message: e.to_string(),
    })
}

/// Rebuilds a session from a log's header and the recorded learner actions.
pub fn replay(log_text: &str, assets: Arc<Assets>) -> Result<SessionState, SessionError> {
    let mut lines = log_text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or(SessionError::Log {
        line: 1,
        message: "empty log".into(),
    })?;
    let header: LogHeader = parse_line(first, 1)?;
    if header.format != LOG_FORMAT {
        return Err(SessionError::Log {
            line: 1,
            message: format!("unsupported log format `{}`", header.format),
        });
    }
    if header.bank != assets.bank.title {
        return Err(SessionError::Log {
            line: 1,
            message: format!(
                "log was recorded against bank `{}`, not `{}`",
                header.bank, assets.bank.title
            ),
        });
    }
    let setup = SessionSetup {
        id: Some(header.session_id),
        mode: header.mode,
        seed: header.seed,
        vca_skill: header.vca_skill,
    };
    let mut session = start_session(setup, &header.answers, assets)?;
    for (i, line) in lines {
        let record: EventRecord = parse_line(line, i + 1)?;
        session.step(record.action)?;
    }
    Ok(session)
}
