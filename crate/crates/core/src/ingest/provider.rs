use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use crate::domain::{normalize_host, split_domain, SuffixRuleSet};
use crate::ingest::{LinkRelation, ProjectSite, RelationSet};

/// One page of referring domains. An empty page terminates pagination.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct ProviderPage {
    pub domains: Vec<ProviderDomain>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ProviderDomain {
    pub domain: String,
    #[serde(default)]
    pub country: Option<String>,
}

#[derive(Debug, Error)]
pub enum ProviderError {
    /// Credential rejected or missing; never retried.
    #[error("provider authentication failed: {0}")]
    AuthFailure(String),
    /// Provider asked us to slow down; retried after the indicated delay.
    #[error("provider rate limited")]
    RateLimited { retry_after: Option<Duration> },
    /// Network failure or unexpected response; retried with backoff.
    #[error("provider transport error: {0}")]
    Transport(String),
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("provider authentication failed: {0}")]
    AuthFailure(String),
    #[error("provider still failing after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },
}

/// A paginated "referring domains for a root domain" query.
///
/// Implementations return pages starting at page 0 and signal the end with
/// an empty page.
pub trait BacklinkProvider {
    fn referring_domains_page(
        &self,
        root_domain: &str,
        page: usize,
    ) -> Result<ProviderPage, ProviderError>;
}

/// Bounded exponential backoff for transient provider failures.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    /// Total attempts per page, including the first.
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 4,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(8),
        }
    }
}

impl RetryPolicy {
    fn delay_for(&self, retry_index: u32) -> Duration {
        let factor = 2u32.saturating_pow(retry_index);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FetchStats {
    pub pages_fetched: usize,
    pub retries: usize,
    pub domains_seen: usize,
    pub domains_rejected: usize,
    pub self_links_dropped: usize,
}

/// Drains the provider's paginated referring-domains endpoint for one
/// project and reduces the result to a deduplicated [`RelationSet`].
///
/// Transient failures ([`ProviderError::RateLimited`],
/// [`ProviderError::Transport`]) are retried per [`RetryPolicy`]; a
/// rate-limit response is retried after the provider-indicated delay when
/// one is given. [`ProviderError::AuthFailure`] aborts immediately.
pub fn fetch_referring_domains<P: BacklinkProvider>(
    project: &ProjectSite,
    provider: &P,
    rules: &SuffixRuleSet,
    policy: &RetryPolicy,
) -> Result<(RelationSet, FetchStats), FetchError> {
    let mut relations = RelationSet::new();
    let mut stats = FetchStats::default();

    for page_index in 0.. {
        let page = fetch_page_with_retry(provider, &project.root_domain, page_index, policy, &mut stats)?;
        stats.pages_fetched += 1;
        if page.domains.is_empty() {
            break;
        }
        for entry in page.domains {
            stats.domains_seen += 1;
            let Ok(host) = normalize_host(&entry.domain) else {
                stats.domains_rejected += 1;
                continue;
            };
            let Ok(parsed) = split_domain(&host, rules) else {
                stats.domains_rejected += 1;
                continue;
            };
            if parsed.root_domain == project.root_domain {
                stats.self_links_dropped += 1;
                continue;
            }
            relations.insert(LinkRelation {
                referring_domain: parsed.root_domain,
                referring_tld: parsed.public_suffix,
                project_id: project.project_id.clone(),
                country: entry
                    .country
                    .as_deref()
                    .map(str::trim)
                    .filter(|c| !c.is_empty())
                    .map(str::to_uppercase),
            });
        }
    }
    Ok((relations, stats))
}

fn fetch_page_with_retry<P: BacklinkProvider>(
    provider: &P,
    root_domain: &str,
    page: usize,
    policy: &RetryPolicy,
    stats: &mut FetchStats,
) -> Result<ProviderPage, FetchError> {
    let mut last_error = String::new();
    for attempt in 0..policy.max_attempts.max(1) {
        match provider.referring_domains_page(root_domain, page) {
            Ok(page) => return Ok(page),
            Err(ProviderError::AuthFailure(msg)) => return Err(FetchError::AuthFailure(msg)),
            Err(ProviderError::RateLimited { retry_after }) => {
                last_error = "rate limited".into();
                if attempt + 1 < policy.max_attempts {
                    stats.retries += 1;
                    std::thread::sleep(retry_after.unwrap_or_else(|| policy.delay_for(attempt)));
                }
            }
            Err(ProviderError::Transport(msg)) => {
                last_error = msg;
                if attempt + 1 < policy.max_attempts {
                    stats.retries += 1;
                    std::thread::sleep(policy.delay_for(attempt));
                }
            }
        }
    }
    Err(FetchError::RetriesExhausted {
        attempts: policy.max_attempts.max(1),
        last: last_error,
    })
}

/// Connection settings for the HTTP backlink provider.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, Deserialize)]
pub struct ProviderConfig {
    pub base_url: String,
    /// Name of the environment variable holding the API credential.
    pub credential_env: String,
    #[serde(default = "default_page_size")]
    pub page_size: usize,
    #[serde(default = "default_retry_max_attempts")]
    pub retry_max_attempts: u32,
}

fn default_page_size() -> usize {
    100
}

fn default_retry_max_attempts() -> u32 {
    4
}

/// HTTP implementation of [`BacklinkProvider`].
///
/// Endpoint: `GET {base_url}/referring-domains?domain=<root>&page=<n>&page_size=<k>`
/// with `Authorization: Bearer <credential>`; the response body is JSON
/// `{"domains": [{"domain": "...", "country": "NL"}, ...]}`.
pub struct HttpProvider {
    client: reqwest::blocking::Client,
    base_url: String,
    credential: String,
    page_size: usize,
}

impl HttpProvider {
    pub fn new(config: &ProviderConfig) -> Result<Self, ProviderError> {
        let credential = std::env::var(&config.credential_env).map_err(|_| {
            ProviderError::AuthFailure(format!(
                "credential environment variable {} is not set",
                config.credential_env
            ))
        })?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        Ok(Self {
            client,
            base_url: config.base_url.trim_end_matches('/').to_string(),
            credential,
            page_size: config.page_size,
        })
    }
}

impl BacklinkProvider for HttpProvider {
    fn referring_domains_page(
        &self,
        root_domain: &str,
        page: usize,
    ) -> Result<ProviderPage, ProviderError> {
        let url = format!("{}/referring-domains", self.base_url);
        let response = self
            .client
            .get(&url)
            .query(&[
                ("domain", root_domain),
                ("page", &page.to_string()),
                ("page_size", &self.page_size.to_string()),
            ])
            .bearer_auth(&self.credential)
            .send()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;

        let status = response.status();
        if status == reqwest::StatusCode::UNAUTHORIZED || status == reqwest::StatusCode::FORBIDDEN {
            return Err(ProviderError::AuthFailure(format!("HTTP {status}")));
        }
        if status == reqwest::StatusCode::TOO_MANY_REQUESTS {
            let retry_after = response
                .headers()
                .get(reqwest::header::RETRY_AFTER)
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.parse::<u64>().ok())
                .map(Duration::from_secs);
            return Err(ProviderError::RateLimited { retry_after });
        }
        if !status.is_success() {
            return Err(ProviderError::Transport(format!("HTTP {status}")));
        }
        response
            .json::<ProviderPage>()
            .map_err(|e| ProviderError::Transport(format!("bad response body: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use std::cell::RefCell;

    fn project() -> ProjectSite {
        ProjectSite {
            project_id: "p1".into(),
            root_domain: "p1-site.eu".into(),
            start_date: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
            end_date: None,
            title: "P1".into(),
        }
    }

    fn quick_policy() -> RetryPolicy {
        RetryPolicy {
            max_attempts: 3,
            base_delay: Duration::from_millis(1),
            max_delay: Duration::from_millis(4),
        }
    }

    /// Scripted provider: each call pops the next canned response.
    struct ScriptedProvider {
        script: RefCell<Vec<Result<ProviderPage, ProviderError>>>,
    }

    impl ScriptedProvider {
        fn new(script: Vec<Result<ProviderPage, ProviderError>>) -> Self {
            Self {
                script: RefCell::new(script),
            }
        }
    }

    impl BacklinkProvider for ScriptedProvider {
        fn referring_domains_page(
            &self,
            _root_domain: &str,
            _page: usize,
        ) -> Result<ProviderPage, ProviderError> {
            self.script.borrow_mut().remove(0)
        }
    }

    fn page(domains: &[(&str, Option<&str>)]) -> ProviderPage {
        ProviderPage {
            domains: domains
                .iter()
                .map(|(d, c)| ProviderDomain {
                    domain: d.to_string(),
                    country: c.map(str::to_string),
                })
                .collect(),
        }
    }

    #[test]
    fn concatenates_disjoint_pages() {
        let provider = ScriptedProvider::new(vec![
            Ok(page(&[("a.org", Some("NL")), ("b.de", None)])),
            Ok(page(&[("c.fr", None)])),
            Ok(page(&[])),
        ]);
        let (relations, stats) =
            fetch_referring_domains(&project(), &provider, SuffixRuleSet::builtin(), &quick_policy())
                .unwrap();
        assert_eq!(relations.len(), 3);
        assert_eq!(stats.pages_fetched, 3);
        assert_eq!(stats.retries, 0);
    }

    #[test]
    fn deduplicates_across_pages() {
        let provider = ScriptedProvider::new(vec![
            Ok(page(&[("a.org", None)])),
            Ok(page(&[("a.org", Some("NL"))])),
            Ok(page(&[])),
        ]);
        let (relations, _) =
            fetch_referring_domains(&project(), &provider, SuffixRuleSet::builtin(), &quick_policy())
                .unwrap();
        assert_eq!(relations.len(), 1);
        let only = relations.iter().next().unwrap();
        assert_eq!(only.country.as_deref(), Some("NL"));
    }

    #[test]
    fn rate_limit_then_success_records_one_retry() {
        let provider = ScriptedProvider::new(vec![
            Err(ProviderError::RateLimited {
                retry_after: Some(Duration::from_millis(1)),
            }),
            Ok(page(&[("a.org", None)])),
            Ok(page(&[])),
        ]);
        let (relations, stats) =
            fetch_referring_domains(&project(), &provider, SuffixRuleSet::builtin(), &quick_policy())
                .unwrap();
        assert_eq!(relations.len(), 1);
        assert_eq!(stats.retries, 1);
    }

    #[test]
    fn auth_failure_is_not_retried() {
        let provider = ScriptedProvider::new(vec![
            Err(ProviderError::AuthFailure("HTTP 401".into())),
            Ok(page(&[("never.org", None)])),
        ]);
        let err =
            fetch_referring_domains(&project(), &provider, SuffixRuleSet::builtin(), &quick_policy())
                .unwrap_err();
        assert!(matches!(err, FetchError::AuthFailure(_)));
    }

    #[test]
    fn transport_errors_exhaust_retries() {
        let provider = ScriptedProvider::new(vec![
            Err(ProviderError::Transport("boom".into())),
            Err(ProviderError::Transport("boom".into())),
            Err(ProviderError::Transport("boom".into())),
        ]);
        let err =
            fetch_referring_domains(&project(), &provider, SuffixRuleSet::builtin(), &quick_policy())
                .unwrap_err();
        match err {
            FetchError::RetriesExhausted { attempts, .. } => assert_eq!(attempts, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn drops_self_links_and_garbage() {
        let provider = ScriptedProvider::new(vec![
            Ok(page(&[
                ("p1-site.eu", None),
                ("not a domain !!", None),
                ("ok.org", None),
            ])),
            Ok(page(&[])),
        ]);
        let (relations, stats) =
            fetch_referring_domains(&project(), &provider, SuffixRuleSet::builtin(), &quick_policy())
                .unwrap();
        assert_eq!(relations.len(), 1);
        assert_eq!(stats.self_links_dropped, 1);
        assert_eq!(stats.domains_rejected, 1);
    }
}
