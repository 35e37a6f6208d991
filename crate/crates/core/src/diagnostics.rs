//! Structured, serializable diagnostics shared by the loaders and the validator.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Configuration id, for scenario diagnostics.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config: Option<u32>,
    /// 1-based source line, when the diagnostic points into a text file.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub line: Option<usize>,
    /// The offending construct, e.g. `block 101` or `node A`.
    pub construct: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(construct: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            config: None,
            line: None,
            construct: construct.into(),
            message: message.into(),
        }
    }

    pub fn warning(construct: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            ..Self::error(construct, message)
        }
    }

    pub fn in_config(mut self, id: u32) -> Self {
        self.config = Some(id);
        self
    }

    pub fn at_line(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}")?;
        if let Some(c) = self.config {
            write!(f, "[config {c}]")?;
        }
        if let Some(l) = self.line {
            write!(f, "[line {l}]")?;
        }
        write!(f, " {}: {}", self.construct, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
