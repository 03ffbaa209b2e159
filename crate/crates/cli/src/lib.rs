//! Experiment runner: subcommand dispatch, config parsing, deterministic
//! CSV/JSON/SVG emission and run manifests.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical guard tripped
//! (wrap-around or overflow), 4 non-contraction, 1 anything else.

use std::path::PathBuf;

pub mod commands;
pub mod config;
pub mod manifest;
pub mod svg;

use manifest::RunManifest;

#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub class: String,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { exit_code: 2, class: "config".into(), message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self { exit_code: 1, class: "internal".into(), message: message.into() }
    }

    pub fn from_core(e: biwave_core::Error) -> Self {
        use biwave_core::Error as E;
        let (exit_code, class) = match &e {
            E::WrapAroundContamination { .. } => (3, "numerical-guard"),
            E::Overflow { .. } => (3, "numerical-guard"),
            E::NonContraction { .. } => (4, "non-contraction"),
            E::UnsupportedDimension(_)
            | E::BadPointCount(_)
            | E::BadHalfLength(_)
            | E::BadExponent(_)
            | E::BadSobolevOrder(_)
            | E::BadHlsAlpha(_)
            | E::BadInverseExponent(_)
            | E::InadmissibleTriple { .. }
            | E::BadAlpha(_)
            | E::BadHorizon(_)
            | E::BadStepCount
            | E::BadWindow(_, _)
            | E::TooFewSamples(_)
            | E::EmptyScaleRange(_, _)
            | E::BadDecompositionWindow(_, _)
            | E::BadTime(_)
            | E::BadScale(_)
            | E::OutOfRegime => (2, "config"),
            _ => (1, "runtime"),
        };
        Self { exit_code, class: class.into(), message: e.to_string() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.class, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Propagate,
    Decay,
    Region,
    Whitney,
    Strichartz,
    Solve,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Propagate => "propagate",
            CommandKind::Decay => "decay",
            CommandKind::Region => "region",
            CommandKind::Whitney => "whitney",
            CommandKind::Strichartz => "strichartz",
            CommandKind::Solve => "solve",
        }
    }
}

#[derive(Debug)]
pub struct RunArgs {
    pub command: CommandKind,
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub threads: usize,
}

/// Runs one experiment, always leaving a manifest in the output directory.
/// Returns the process exit code.
pub fn run(args: &RunArgs) -> i32 {
    if args.threads == 0 {
        eprintln!("config: --threads must be at least 1");
        return 2;
    }
    // The global pool can only be installed once per process; later calls
    // with the same intent are harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global();

    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("internal: cannot create output directory: {e}");
        return 1;
    }

    let config_text = match std::fs::read_to_string(&args.config) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("config: cannot read {}: {e}", args.config.display());
            let mut m =
                RunManifest::new(args.command.name(), args.seed, args.threads, serde_json::Value::Null);
            m.set_error("config", &e.to_string());
            let _ = m.write(&args.out);
            return 2;
        }
    };
    let echo: serde_json::Value = toml::from_str::<toml::Value>(&config_text)
        .ok()
        .and_then(|v| serde_json::to_value(v).ok())
        .unwrap_or(serde_json::Value::Null);

    let mut manifest = RunManifest::new(args.command.name(), args.seed, args.threads, echo);
    let result = commands::dispatch(args, &mut manifest);
    let code = match result {
        Ok(()) => 0,
        Err(e) => {
            manifest.set_error(&e.class, &e.message);
            eprintln!("{e}");
            e.exit_code
        }
    };
    if let Err(e) = manifest.write(&args.out) {
        eprintln!("internal: cannot write manifest: {e}");
        return 1;
    }
    code
}
