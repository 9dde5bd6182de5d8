use thiserror::Error;

/// Failures of a harness run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("invariant check failed: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) => 2,
            CliError::NoConvergence(_) => 3,
            CliError::Invariant(_) | CliError::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation(_) => "validation",
            CliError::NoConvergence(_) => "no-convergence",
            CliError::Invariant(_) => "invariant",
            CliError::Io(_) => "io",
        }
    }

    /// Single-line `key=value` rendering for stderr.
    pub fn machine_line(&self) -> String {
        let mut line = format!("locgame-error kind={} exit={}", self.kind(), self.exit_code());
        if let CliError::Parse { location, .. } = self {
            line.push_str(&format!(" location={}", quote(location)));
        }
        let message = match self {
            CliError::Parse { message, .. } => message.clone(),
            other => other.to_string(),
        };
        line.push_str(&format!(" message={}", quote(&message)));
        line
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl From<locgame_core::Error> for CliError {
    fn from(e: locgame_core::Error) -> Self {
        use locgame_core::Error as E;
        match e {
            E::InvalidConfig(_) | E::OrderViolation(_) => CliError::Validation(e.to_string()),
            E::NoConvergence { .. } => CliError::NoConvergence(e.to_string()),
            E::NegativeDiscriminant { .. } | E::PlayerIndex { .. } => CliError::Invariant(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
