//! Co-link analysis for portfolios of project websites.
//!
//! The pipeline turns raw backlink data into network artifacts in four
//! stages, each usable on its own:
//!
//! 1. [`ingest`]: read backlink exports or query a provider API, reduce
//!    hyperlinks to unique (referring domain, project) relations.
//! 2. [`filter`]: keep relations from a configured set of countries and
//!    TLDs, split internal (portfolio-to-portfolio) from external links.
//! 3. [`network`] and [`cluster`]: build co-link matrices over the shared
//!    referrer structure and group projects by modularity.
//! 4. [`export`]: write VOSviewer, Pajek, and CSV report files.
//!
//! [`domain`] holds the registrable-domain parser the other stages share.

pub mod cluster;
pub mod domain;
pub mod export;
pub mod filter;
pub mod ingest;
pub mod metrics;
pub mod network;

pub use domain::{
    country_of_tld, normalize_host, split_domain, CountryTldMap, DomainError, ParsedDomain,
    SuffixRuleSet,
};
pub use cluster::{cluster_network, ClusterError, ClusteredNetwork};
pub use export::{to_network_document, ExportError, NetworkDocument};
pub use filter::{ClassifiedRelation, CountryAllowlist, FilterError, Origin};
pub use ingest::{LinkRelation, Portfolio, ProjectSite, RelationSet};
pub use metrics::{MetricsError, PortfolioSummary, ProjectMetrics, TldFrequency};
pub use network::{
    colinked_matrix, colinking_matrix, BipartiteIncidence, CoOccurrenceMatrix, OriginFilter,
};
