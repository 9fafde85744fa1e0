//! Exit-code policy: every failure is classified as an input problem,
//! an external-service problem, or an interchange-schema problem, so
//! scripts can branch on the process status alone.
//!
//! | code | meaning                                        |
//! |------|------------------------------------------------|
//! | 0    | success                                        |
//! | 2    | input error (files, config, flags, bad data)   |
//! | 3    | external service error (wiki, MT, scorer)      |
//! | 4    | schema error (malformed interchange artifacts) |

use cdi_core::classifier::ClassifierError;
use cdi_core::debias::DebiasError;
use cdi_core::eval::agreement::AgreementError;
use cdi_core::eval::{MatrixError, StatsError};
use cdi_core::fabricate::FabricateError;
use cdi_core::ingest::IngestError;
use cdi_core::io::JsonlError;
use cdi_core::scoring::ScoringError;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SERVICE: i32 = 3;
pub const EXIT_SCHEMA: i32 = 4;

/// A classified failure: what went wrong, and which exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub source: anyhow::Error,
}

impl CliError {
    pub fn input(err: impl Into<anyhow::Error>) -> Self {
        CliError { exit_code: EXIT_INPUT, source: err.into() }
    }

    pub fn service(err: impl Into<anyhow::Error>) -> Self {
        CliError { exit_code: EXIT_SERVICE, source: err.into() }
    }

    pub fn schema(err: impl Into<anyhow::Error>) -> Self {
        CliError { exit_code: EXIT_SCHEMA, source: err.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // anyhow's alternate form prints the whole cause chain.
        write!(f, "{:#}", self.source)
    }
}

impl From<JsonlError> for CliError {
    fn from(err: JsonlError) -> Self {
        match err {
            JsonlError::Io { .. } => CliError::input(err),
            JsonlError::Schema { .. } => CliError::schema(err),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(err: IngestError) -> Self {
        match err {
            IngestError::FetchFailure { .. } | IngestError::SkipBudgetExceeded { .. } => {
                CliError::service(err)
            }
            _ => CliError::input(err),
        }
    }
}

impl From<FabricateError> for CliError {
    fn from(err: FabricateError) -> Self {
        CliError::input(err)
    }
}

impl From<DebiasError> for CliError {
    fn from(err: DebiasError) -> Self {
        match err {
            DebiasError::TranslationFailure { .. } => CliError::service(err),
            _ => CliError::input(err),
        }
    }
}

impl From<ClassifierError> for CliError {
    fn from(err: ClassifierError) -> Self {
        match err {
            ClassifierError::ScorerUnavailable(_) | ClassifierError::MalformedScore(_) => {
                CliError::service(err)
            }
            ClassifierError::ModelFormat(_) => CliError::schema(err),
            _ => CliError::input(err),
        }
    }
}

impl From<ScoringError> for CliError {
    fn from(err: ScoringError) -> Self {
        match err {
            ScoringError::Classifier(inner) => inner.into(),
            _ => CliError::input(err),
        }
    }
}

impl From<AgreementError> for CliError {
    fn from(err: AgreementError) -> Self {
        CliError::input(err)
    }
}

impl From<StatsError> for CliError {
    fn from(err: StatsError) -> Self {
        CliError::input(err)
    }
}

impl From<MatrixError> for CliError {
    fn from(err: MatrixError) -> Self {
        match err {
            MatrixError::Debias(inner) => inner.into(),
            MatrixError::Classifier(inner) => inner.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_schema_errors_map_to_schema_code() {
        let err =
            JsonlError::Schema { path: "x.jsonl".into(), line: 3, detail: "missing field".into() };
        assert_eq!(CliError::from(err).exit_code, EXIT_SCHEMA);
    }

    #[test]
    fn jsonl_io_errors_map_to_input_code() {
        let err = JsonlError::Io { path: "x.jsonl".into(), detail: "not found".into() };
        assert_eq!(CliError::from(err).exit_code, EXIT_INPUT);
    }

    #[test]
    fn fetch_failures_map_to_service_code() {
        let err = IngestError::FetchFailure { what: "article A".into(), detail: "503".into() };
        assert_eq!(CliError::from(err).exit_code, EXIT_SERVICE);
        let err = IngestError::UnresolvableRoot("Nope".into());
        assert_eq!(CliError::from(err).exit_code, EXIT_INPUT);
    }

    #[test]
    fn translation_failures_are_service_errors_but_missing_tables_are_input() {
        let soft = DebiasError::TranslationFailure { backend: "mt".into(), detail: "down".into() };
        assert_eq!(CliError::from(soft).exit_code, EXIT_SERVICE);
        let hard = DebiasError::MissingTable { source_lang: "en".into(), target_lang: "de".into() };
        assert_eq!(CliError::from(hard).exit_code, EXIT_INPUT);
    }

    #[test]
    fn classifier_errors_split_across_codes() {
        assert_eq!(
            CliError::from(ClassifierError::ScorerUnavailable("down".into())).exit_code,
            EXIT_SERVICE
        );
        assert_eq!(
            CliError::from(ClassifierError::ModelFormat("bad version".into())).exit_code,
            EXIT_SCHEMA
        );
        assert_eq!(CliError::from(ClassifierError::EmptyData).exit_code, EXIT_INPUT);
    }

    #[test]
    fn scoring_errors_unwrap_their_classifier_cause() {
        let err = ScoringError::Classifier(ClassifierError::MalformedScore("1.7".into()));
        assert_eq!(CliError::from(err).exit_code, EXIT_SERVICE);
        let err = ScoringError::NoAnnotators;
        assert_eq!(CliError::from(err).exit_code, EXIT_INPUT);
    }

    #[test]
    fn display_prints_the_cause_chain() {
        let err = CliError::input(anyhow::anyhow!("outer").context("inner context"));
        let text = err.to_string();
        assert!(text.contains("inner context"));
        assert!(text.contains("outer"));
    }
}
