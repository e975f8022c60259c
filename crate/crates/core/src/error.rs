use std::fmt;

use thiserror::Error;

/// A 1-based line/column location in source text.
///
/// Positions are carried for diagnostics only; two positions always compare
/// equal so that structurally identical syntax trees are `==` regardless of
/// where they were read from.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl PartialEq for Pos {
    fn eq(&self, _other: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{message} at {pos}")]
    Syntax { message: String, pos: Pos },

    #[error("unbound variable '{name}'{}", at(.pos))]
    UnboundVariable { name: String, pos: Option<Pos> },

    #[error("divergent binding")]
    DivergentBinding,

    #[error("incomparable value: {0}")]
    Incomparable(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("type error: expected {expected}, got {got}")]
    Type { expected: &'static str, got: String },

    #[error("arity mismatch: {callee} expects {expected} argument(s), got {got}")]
    Arity {
        callee: String,
        expected: usize,
        got: usize,
    },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("no matching clause for {0}")]
    NoMatchingClause(String),

    #[error("pattern not supported by matcher: {pattern} with {matcher}")]
    PatternNotSupported { pattern: String, matcher: String },

    #[error("not a matcher: {0}")]
    NotAMatcher(String),

    #[error("prelude section '{section}': {source}")]
    Prelude {
        section: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Runtime(String),
}

fn at(pos: &Option<Pos>) -> String {
    match pos {
        Some(p) => format!(" at {p}"),
        None => String::new(),
    }
}

impl Error {
    pub fn syntax(message: impl Into<String>, pos: Pos) -> Self {
        Error::Syntax {
            message: message.into(),
            pos,
        }
    }

    pub fn type_error(expected: &'static str, got: impl fmt::Display) -> Self {
        Error::Type {
            expected,
            got: got.to_string(),
        }
    }

    pub fn is_unbound(&self) -> bool {
        matches!(self, Error::UnboundVariable { .. })
    }

    /// True for syntax errors that more input could fix, such as an
    /// unclosed bracket or string.
    pub fn is_incomplete_input(&self) -> bool {
        match self {
            Error::Syntax { message, .. } => {
                message.starts_with("unexpected end of input")
                    || message.starts_with("unterminated string")
            }
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
