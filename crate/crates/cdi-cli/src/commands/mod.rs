//! One submodule per subcommand, plus helpers they share.

pub mod debias;
pub mod evaluate;
pub mod fabricate;
pub mod ingest;
pub mod plotdata;
pub mod score;
pub mod train;

use crate::config::{DebiasSection, MtBackend};
use crate::error::CliError;
use cdi_core::debias::{HttpTranslator, IdentityClient, TableClient, TranslationClient};
use cdi_core::types::Lang;
use chrono::{DateTime, SecondsFormat};

/// Environment variable that overrides the machine-translation endpoint.
pub const MT_ENDPOINT_VAR: &str = "CDI_MT_ENDPOINT";
/// Environment variable that overrides the external-scorer endpoint.
pub const SCORER_ENDPOINT_VAR: &str = "CDI_SCORER_ENDPOINT";
/// Environment variable holding the Unix timestamp recorded in manifests.
pub const SOURCE_DATE_EPOCH_VAR: &str = "SOURCE_DATE_EPOCH";

/// RFC 3339 timestamp for manifests: `SOURCE_DATE_EPOCH` when set,
/// otherwise the Unix epoch, so reruns are byte-identical by default.
pub fn created_at_from_env() -> Result<String, CliError> {
    let epoch = match std::env::var(SOURCE_DATE_EPOCH_VAR) {
        Ok(raw) => raw.parse::<i64>().map_err(|_| {
            CliError::input(anyhow::anyhow!(
                "{SOURCE_DATE_EPOCH_VAR} must be an integer Unix timestamp, got {raw:?}"
            ))
        })?,
        Err(_) => 0,
    };
    let stamp = DateTime::from_timestamp(epoch, 0).ok_or_else(|| {
        CliError::input(anyhow::anyhow!("{SOURCE_DATE_EPOCH_VAR} value {epoch} is out of range"))
    })?;
    Ok(stamp.to_rfc3339_opts(SecondsFormat::Secs, true))
}

/// Build the translation client the debias settings describe, loading
/// table directions for each language in `langs` (its pivot round trip
/// needs `lang -> pivot` and `pivot -> lang`).
pub fn build_mt_client(
    section: &DebiasSection,
    langs: &[Lang],
) -> Result<Box<dyn TranslationClient>, CliError> {
    match section.backend {
        MtBackend::Identity => Ok(Box::new(IdentityClient)),
        MtBackend::Http => {
            let endpoint = std::env::var(MT_ENDPOINT_VAR)
                .ok()
                .or_else(|| section.endpoint.clone())
                .ok_or_else(|| {
                    CliError::input(anyhow::anyhow!(
                        "debias backend \"http\" needs an endpoint: set [debias].endpoint or {MT_ENDPOINT_VAR}"
                    ))
                })?;
            Ok(Box::new(HttpTranslator::new(endpoint).with_rate_limit(section.rate_limit_rps)))
        }
        MtBackend::Table => {
            if std::env::var(MT_ENDPOINT_VAR).is_ok() {
                log::info!(
                    "{MT_ENDPOINT_VAR} is set but the configured backend is \"table\"; ignoring it"
                );
            }
            let dir = section.tables_dir.as_ref().ok_or_else(|| {
                CliError::input(anyhow::anyhow!(
                    "debias backend \"table\" needs [debias].tables_dir"
                ))
            })?;
            let mut client = TableClient::new("table");
            for lang in langs {
                let source = lang.code();
                let pivot = match lang {
                    Lang::En => section.pivot.en.as_str(),
                    Lang::Cn => section.pivot.cn.as_str(),
                };
                client.load_direction(source, pivot, &dir.join(format!("{source}-{pivot}.tsv")))?;
                client.load_direction(pivot, source, &dir.join(format!("{pivot}-{source}.tsv")))?;
            }
            Ok(Box::new(client))
        }
    }
}
