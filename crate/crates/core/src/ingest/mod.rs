//! Backlink acquisition and reduction to deduplicated referring-domain
//! relations.
//!
//! Data enters either from offline CSV exports or from a paginated backlink
//! provider; both paths reduce to the same [`RelationSet`], in which any link
//! relationship between a referring domain and a project is counted exactly
//! once.

mod import;
mod portfolio;
mod provider;
mod relations;
mod snapshot;

pub use import::{import_backlinks_csv, ImportError, ImportStats};
pub use portfolio::{Portfolio, PortfolioError, ProjectSite};
pub use provider::{
    fetch_referring_domains, BacklinkProvider, FetchError, FetchStats, HttpProvider,
    ProviderConfig, ProviderDomain, ProviderError, ProviderPage, RetryPolicy,
};
pub use relations::{LinkRelation, RelationSet};
pub use snapshot::{
    snapshot_read, snapshot_write, SnapshotError, SnapshotManifest, MANIFEST_FILE, RELATIONS_FILE,
};
