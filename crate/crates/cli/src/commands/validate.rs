//! `colink validate`: check the whole configuration, reporting every
//! problem found rather than stopping at the first.

use std::path::Path;

use colink_core::ingest::Portfolio;

use crate::config::{Overrides, PipelineConfig};
use crate::CliError;

pub fn run(config_path: &Path, overrides: &Overrides) -> Result<(), CliError> {
    // An unreadable or unparseable config leaves nothing to validate.
    let config = PipelineConfig::load(config_path, overrides)?;

    let mut problems = config.reference_problems();

    let rules = match config.load_suffix_rules() {
        Ok(rules) => Some(rules),
        Err(e) => {
            if config.suffix_rules.as_deref().is_some_and(Path::is_file) {
                problems.push(e.message().to_string());
            }
            // A missing file is already reported by reference_problems.
            None
        }
    };
    if let Err(e) = config.load_allowlist() {
        if config.allowlist.as_deref().is_some_and(Path::is_file) {
            problems.push(e.message().to_string());
        }
    }
    if let Err(e) = config.load_tld_map() {
        if config.tld_country_map.as_deref().is_some_and(Path::is_file) {
            problems.push(e.message().to_string());
        }
    }

    if config.portfolio.is_file() {
        match Portfolio::from_csv_path(&config.portfolio) {
            Ok(portfolio) => {
                if portfolio.is_empty() {
                    problems.push("portfolio has no projects".to_string());
                }
                if let Some(rules) = &rules {
                    problems.extend(portfolio.domain_problems(rules));
                }
            }
            Err(e) => problems.push(format!("portfolio {}: {e}", config.portfolio.display())),
        }
    }

    if let Some(provider) = &config.provider {
        if std::env::var(&provider.credential_env).is_err() {
            problems.push(format!(
                "provider credential environment variable {} is not set",
                provider.credential_env
            ));
        }
    }

    if problems.is_empty() {
        println!("ok");
        Ok(())
    } else {
        for problem in &problems {
            eprintln!("problem: {problem}");
        }
        Err(CliError::Config(format!(
            "{} problem(s) found",
            problems.len()
        )))
    }
}
