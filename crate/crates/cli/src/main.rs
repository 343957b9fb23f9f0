use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tutor_cli::commands;
use tutor_cli::server::{self, SeedPolicy, ServiceConfig};
use tutor_core::assets::{read_text, AssetPaths, DEFAULT_FORM, DEFAULT_KB, DEFAULT_SCRIPTS};
use tutor_core::{Assets, GoalVector, LearningGroup, Mode, PersonalityProfile, QuestionnaireForm, WeightTable};

#[derive(Parser)]
#[command(name = "tutor", version, about = "Affective tutoring engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct AssetArgs {
    /// Questionnaire form (JSON)
    #[arg(long)]
    form: Option<PathBuf>,
    /// Exercise bank (JSON)
    #[arg(long)]
    bank: Option<PathBuf>,
    /// Knowledge base (JSON)
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Behavior script catalog (JSON)
    #[arg(long)]
    scripts: Option<PathBuf>,
    /// Goal weight table (JSON)
    #[arg(long)]
    weights: Option<PathBuf>,
}

impl AssetArgs {
    fn load(&self) -> Result<Assets> {
        let paths = AssetPaths {
            form: self.form.clone(),
            bank: self.bank.clone(),
            kb: self.kb.clone(),
            scripts: self.scripts.clone(),
            weights: self.weights.clone(),
        };
        Ok(Assets::load(&paths)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Independent,
    Cooperative,
    Competitive,
}

impl From<GroupArg> for LearningGroup {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::Independent => LearningGroup::Independent,
            GroupArg::Cooperative => LearningGroup::Cooperative,
            GroupArg::Competitive => LearningGroup::Competitive,
        }
    }
}

#[derive(Debug, Clone)]
struct Modes(Vec<Mode>);

fn parse_modes(s: &str) -> Result<Modes, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Modes(Mode::ALL.to_vec()));
    }
    s.split(',').map(|m| m.parse::<Mode>()).collect::<Result<_, _>>().map(Modes)
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP session service
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Mode for sessions that do not name one
        #[arg(long, default_value = "env3")]
        mode: Mode,
        /// Directory of static UI assets served at /
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
        /// Use this seed for every session instead of a random one
        #[arg(long)]
        seed: Option<u64>,
        /// Include numeric emotion intensities in responses
        #[arg(long)]
        debug: bool,
        #[command(flatten)]
        assets: AssetArgs,
    },
    /// Drive scripted learners through sessions and write logs and a report
    Simulate {
        /// Learner profiles (JSON array); defaults to the bundled set
        #[arg(long)]
        profiles: Option<PathBuf>,
        /// env1, env2, env3, a comma-separated list, or all
        #[arg(long, default_value = "all", value_parser = parse_modes)]
        mode: Modes,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        assets: AssetArgs,
    },
    /// Score a questionnaire: type, goals, group and classmate
    Score {
        #[arg(long)]
        form: Option<PathBuf>,
        /// Answers (JSON object of item id to agreement in [-1, 1])
        #[arg(long)]
        answers: PathBuf,
    },
    /// Print appraisal inputs and emotion intensities for an event list
    AppraiseTrace {
        /// Events (JSON array of {kind, dt, rt?, grade?, effort?})
        #[arg(long)]
        events: PathBuf,
        /// Goal importances, four comma-separated values
        #[arg(long, default_value = "0.25,0.25,0.25,0.25", conflicts_with = "answers")]
        goals: String,
        #[arg(long, value_enum, default_value = "independent", conflicts_with = "answers")]
        group: GroupArg,
        /// Take goals and group from questionnaire answers instead
        #[arg(long)]
        answers: Option<PathBuf>,
        #[arg(long)]
        form: Option<PathBuf>,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// One JSON object per line
        #[arg(long)]
        json: bool,
    },
    /// Check a knowledge base and script catalog
    ValidateKb {
        #[arg(long)]
        kb: Option<PathBuf>,
        #[arg(long)]
        scripts: Option<PathBuf>,
    },
}

fn text_or(path: &Option<PathBuf>, default: &str) -> Result<String> {
    Ok(match path {
        Some(p) => read_text(p)?,
        None => default.to_string(),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Serve { addr, mode, static_dir, seed, debug, assets } => {
            let assets = Arc::new(assets.load()?);
            let config = ServiceConfig {
                addr,
                default_mode: mode,
                static_dir,
                seed_policy: seed.map_or(SeedPolicy::RandomLogged, SeedPolicy::Fixed),
                debug,
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(server::serve(assets, config))
        }
        Command::Simulate { profiles, mode, seed, out, assets } => {
            let assets = Arc::new(assets.load()?);
            let profiles = commands::read_profiles(profiles.as_deref())?;
            let summary = commands::simulate(&profiles, assets, &mode.0, seed, &out)?;
            print!("{summary}");
            Ok(())
        }
        Command::Score { form, answers } => {
            let form = QuestionnaireForm::from_json(&text_or(&form, DEFAULT_FORM)?)?;
            let answers = commands::parse_answers(&read_text(&answers)?)?;
            print!("{}", commands::score(&form, &answers)?);
            Ok(())
        }
        Command::AppraiseTrace { events, goals, group, answers, form, weights, json } => {
            let weights = match &weights {
                Some(p) => WeightTable::from_json(&read_text(p)?)?,
                None => WeightTable::default(),
            };
            let (goals, group): (GoalVector, LearningGroup) = match &answers {
                Some(p) => {
                    let form = QuestionnaireForm::from_json(&text_or(&form, DEFAULT_FORM)?)?;
                    let answers = commands::parse_answers(&read_text(p)?)?;
                    let profile = PersonalityProfile::from_answers(&form, &answers)?;
                    (profile.goals, profile.group)
                }
                None => (commands::parse_goals(&goals)?, group.into()),
            };
            let text = read_text(&events)?;
            print!("{}", commands::appraise_trace(&text, goals, weights, group, json)?);
            Ok(())
        }
        Command::ValidateKb { kb, scripts } => {
            let kb = text_or(&kb, DEFAULT_KB)?;
            let scripts = text_or(&scripts, DEFAULT_SCRIPTS)?;
            print!("{}", commands::validate_kb(&kb, &scripts).context("invalid knowledge base")?);
            Ok(())
        }
    }
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
