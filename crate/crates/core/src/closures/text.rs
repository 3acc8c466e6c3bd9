use std::path::PathBuf;

use thiserror::Error;

use super::dfa::DfaError;
use super::dpda::DpdaError;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Dpda(#[from] DpdaError),
    #[error(transparent)]
    Dfa(#[from] DfaError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Nested { path: PathBuf, source: Box<TextError> },
}

pub(crate) fn syntax(line: usize, message: impl Into<String>) -> TextError {
    TextError::Syntax {
        line,
        message: message.into(),
    }
}

pub(crate) fn tokens(line: &str) -> Vec<&str> {
    line.split_whitespace().take_while(|t| !t.starts_with('#')).collect()
}

pub(crate) fn one_arg(directive: &str, args: &[&str], line: usize) -> Result<String, TextError> {
    match args {
        [a] => Ok(a.to_string()),
        _ => Err(syntax(line, format!("`@{directive}` takes one argument"))),
    }
}
