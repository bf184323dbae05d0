use std::path::PathBuf;

use serde::Serialize;

/// Everything that stops a subcommand before it produces a report.
#[derive(Debug)]
pub enum CliError {
    Core(blindlab_core::Error),
    Io { path: PathBuf, message: String },
    Parse { path: PathBuf, message: String },
    Params(String),
    /// The attacker was handed a file that holds user secrets.
    SecretInput(PathBuf),
}

impl CliError {
    /// Core errors keep their own variant name.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "Io",
            CliError::Parse { .. } => "Parse",
            CliError::Params(_) => "InvalidParams",
            CliError::SecretInput(_) => "SecretInput",
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Body {
                kind: self.kind(),
                message: self.to_string(),
            },
        })
        .expect("error serializes")
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Parse { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Params(m) => write!(f, "invalid parameters: {m}"),
            CliError::SecretInput(path) => write!(f, "{}: refusing to read secret material", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<blindlab_core::Error> for CliError {
    fn from(e: blindlab_core::Error) -> Self {
        CliError::Core(e)
    }
}
