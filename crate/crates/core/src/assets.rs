//! Read-only inputs shared by every session: questionnaire, exercise bank,
//! knowledge base, behavior scripts and goal weights.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::appraisal::{AppraisalError, WeightTable};
use crate::personality::{PersonalityError, QuestionnaireForm};
use crate::session::{ExerciseBank, SessionError};
use crate::tactics::{GroupSlot, KbError, KnowledgeBase, ScriptCatalog, ScriptError};

pub const DEFAULT_FORM: &str = include_str!("../data/questionnaire.json");
pub const DEFAULT_BANK: &str = include_str!("../data/exercises.json");
pub const DEFAULT_KB: &str = include_str!("../data/knowledge_base.json");
pub const DEFAULT_SCRIPTS: &str = include_str!("../data/scripts.json");
pub const DEFAULT_WEIGHTS: &str = include_str!("../data/weights.json");
pub const DEFAULT_PROFILES: &str = include_str!("../data/profiles.json");

#[derive(Debug, Error)]
pub enum AssetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("questionnaire: {0}")]
    Form(#[from] PersonalityError),
    #[error(transparent)]
    Bank(#[from] SessionError),
    #[error("knowledge base: {0}")]
    Kb(#[from] KbError),
    #[error("scripts: {0}")]
    Scripts(#[from] ScriptError),
    #[error("weights: {0}")]
    Weights(#[from] AppraisalError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assets {
    pub form: QuestionnaireForm,
    pub bank: ExerciseBank,
    pub kb: KnowledgeBase,
    pub scripts: ScriptCatalog,
    pub weights: WeightTable,
}

/// Optional file overrides; `None` keeps the built-in document.
#[derive(Debug, Clone, Default)]
pub struct AssetPaths {
    pub form: Option<PathBuf>,
    pub bank: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub scripts: Option<PathBuf>,
    pub weights: Option<PathBuf>,
}

pub fn read_text(path: &Path) -> Result<String, AssetError> {
    std::fs::read_to_string(path).map_err(|source| AssetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn text_or(path: &Option<PathBuf>, default: &str) -> Result<String, AssetError> {
    match path {
        Some(p) => read_text(p),
        None => Ok(default.to_string()),
    }
}

impl Assets {
    /// The built-in documents. They are checked by the test suite.
    pub fn defaults() -> Self {
        Assets::load(&AssetPaths::default()).expect("built-in assets are valid")
    }

    pub fn load(paths: &AssetPaths) -> Result<Self, AssetError> {
        let assets = Assets {
            form: QuestionnaireForm::from_json(&text_or(&paths.form, DEFAULT_FORM)?)?,
            bank: ExerciseBank::from_json(&text_or(&paths.bank, DEFAULT_BANK)?)?,
            kb: KnowledgeBase::from_json(&text_or(&paths.kb, DEFAULT_KB)?)?,
            scripts: ScriptCatalog::from_json(&text_or(&paths.scripts, DEFAULT_SCRIPTS)?)?,
            weights: WeightTable::from_json(&text_or(&paths.weights, DEFAULT_WEIGHTS)?)?,
        };
        assets.check_script_coverage()?;
        Ok(assets)
    }

    /// Every tactic the knowledge base can conclude has a script.
    pub fn check_script_coverage(&self) -> Result<(), ScriptError> {
        check_script_coverage(&self.kb, &self.scripts)
    }
}

pub fn check_script_coverage(kb: &KnowledgeBase, scripts: &ScriptCatalog) -> Result<(), ScriptError> {
    for rule in &kb.rules {
        for slot in GroupSlot::ALL {
            if !rule.when.may_hold(slot) {
                continue;
            }
            for c in &rule.then {
                scripts.lookup(c.tactic, slot.group())?;
            }
        }
    }
    Ok(())
}
