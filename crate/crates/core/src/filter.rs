//! Inclusion rules and internal/external classification.
//!
//! A relation survives the country filter when any of three clauses holds:
//! its provider-reported country code is allowlisted, the country implied by
//! its TLD is allowlisted, or the TLD itself is accepted outright (the ".eu"
//! case, which maps to no single country). TLD bans are a separate pass so
//! callers can apply them to some networks and not others.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::domain::{country_of_tld, CountryTldMap};
use crate::ingest::{LinkRelation, Portfolio, RelationSet};

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("failed to read allowlist: {0}")]
    Io(#[from] std::io::Error),
    #[error("allowlist line {line}: {message}")]
    MalformedAllowlist { line: usize, message: String },
    #[error(
        "projects {project_a} and {project_b} share the root domain {domain}; \
         internal classification would be ambiguous"
    )]
    DuplicatePortfolioDomain {
        domain: String,
        project_a: String,
        project_b: String,
    },
}

/// Countries and suffixes whose referrers are kept by the country filter.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountryAllowlist {
    /// Uppercase ISO 3166-1 alpha-2 codes.
    codes: BTreeSet<String>,
    /// Lowercase suffixes accepted regardless of any country mapping.
    extra_tlds: BTreeSet<String>,
}

impl CountryAllowlist {
    pub fn new<C, T>(codes: C, extra_tlds: T) -> Self
    where
        C: IntoIterator<Item = String>,
        T: IntoIterator<Item = String>,
    {
        Self {
            codes: codes.into_iter().map(|c| c.to_uppercase()).collect(),
            extra_tlds: extra_tlds.into_iter().map(|t| t.to_lowercase()).collect(),
        }
    }

    /// Parses the `country:XX` / `tld:xx` line format. '#' starts a comment.
    pub fn parse(text: &str) -> Result<Self, FilterError> {
        let mut codes = BTreeSet::new();
        let mut extra_tlds = BTreeSet::new();
        for (index, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| FilterError::MalformedAllowlist {
                line: index + 1,
                message,
            };
            let (kind, value) = line
                .split_once(':')
                .ok_or_else(|| err(format!("expected `country:XX` or `tld:xx`, got {line:?}")))?;
            let value = value.trim();
            match kind.trim() {
                "country" => {
                    let code = value.to_uppercase();
                    if code.len() != 2 || !code.chars().all(|c| c.is_ascii_uppercase()) {
                        return Err(err(format!(
                            "country code must be two ASCII letters, got {value:?}"
                        )));
                    }
                    codes.insert(code);
                }
                "tld" => {
                    let tld = value.to_lowercase();
                    if tld.is_empty()
                        || !tld
                            .chars()
                            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '.')
                    {
                        return Err(err(format!("invalid tld {value:?}")));
                    }
                    extra_tlds.insert(tld);
                }
                other => {
                    return Err(err(format!(
                        "unknown entry kind {other:?}, expected `country` or `tld`"
                    )))
                }
            }
        }
        Ok(Self { codes, extra_tlds })
    }

    pub fn from_path(path: &Path) -> Result<Self, FilterError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// EU member states plus Horizon 2020 associated countries, and ".eu".
    pub fn builtin() -> &'static Self {
        static BUILTIN: OnceLock<CountryAllowlist> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            Self::parse(include_str!("../data/allowlist.txt"))
                .expect("bundled allowlist must parse")
        })
    }

    pub fn allows_code(&self, code: &str) -> bool {
        self.codes.contains(code)
    }

    pub fn allows_tld_outright(&self, tld: &str) -> bool {
        self.extra_tlds.contains(tld)
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty() && self.extra_tlds.is_empty()
    }
}

/// Whether a referrer is itself a portfolio project site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Origin {
    Internal,
    External,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedRelation {
    pub relation: LinkRelation,
    pub origin: Origin,
}

/// Keeps relations attributable to an allowlisted country, by provider
/// country code, by TLD-implied country, or by outright-accepted TLD.
pub fn filter_by_country(
    relations: &RelationSet,
    allow: &CountryAllowlist,
    tld_map: &CountryTldMap,
) -> RelationSet {
    relations
        .iter()
        .filter(|r| {
            let by_code = r
                .country
                .as_deref()
                .is_some_and(|code| allow.allows_code(code));
            let by_tld_country = country_of_tld(&r.referring_tld, tld_map)
                .is_some_and(|code| allow.allows_code(code));
            by_code || by_tld_country || allow.allows_tld_outright(&r.referring_tld)
        })
        .collect()
}

/// Removes relations whose TLD is in the banned set. Exact suffix match.
pub fn exclude_tlds(relations: &RelationSet, banned: &BTreeSet<String>) -> RelationSet {
    relations
        .iter()
        .filter(|r| !banned.contains(&r.referring_tld))
        .collect()
}

/// Labels every relation INTERNAL when its referring domain is another
/// portfolio project's site, EXTERNAL otherwise.
///
/// Fails when two projects share a root domain: the internal label would
/// then be ambiguous, and the collision must be fixed in the portfolio.
pub fn classify_relations(
    relations: &RelationSet,
    portfolio: &Portfolio,
) -> Result<Vec<ClassifiedRelation>, FilterError> {
    let mut domain_owner = std::collections::BTreeMap::new();
    for site in portfolio.sites() {
        if let Some(previous) = domain_owner.insert(site.root_domain.clone(), &site.project_id) {
            return Err(FilterError::DuplicatePortfolioDomain {
                domain: site.root_domain.clone(),
                project_a: previous.clone(),
                project_b: site.project_id.clone(),
            });
        }
    }
    Ok(relations
        .iter()
        .map(|relation| {
            let origin = match domain_owner.get(&relation.referring_domain) {
                Some(owner) if **owner != relation.project_id => Origin::Internal,
                _ => Origin::External,
            };
            ClassifiedRelation { relation, origin }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ProjectSite;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn rel(domain: &str, tld: &str, project: &str, country: Option<&str>) -> LinkRelation {
        LinkRelation {
            referring_domain: domain.to_string(),
            referring_tld: tld.to_string(),
            project_id: project.to_string(),
            country: country.map(str::to_string),
        }
    }

    fn set(relations: &[LinkRelation]) -> RelationSet {
        relations.iter().cloned().collect()
    }

    fn site(id: &str, domain: &str) -> ProjectSite {
        ProjectSite {
            project_id: id.to_string(),
            root_domain: domain.to_string(),
            start_date: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
            end_date: None,
            title: id.to_uppercase(),
        }
    }

    fn portfolio(sites: &[ProjectSite]) -> Portfolio {
        Portfolio::new(sites.to_vec()).unwrap()
    }

    #[test]
    fn parse_accepts_both_line_kinds_and_comments() {
        let allow = CountryAllowlist::parse(
            "# header\ncountry:nl\ncountry:DE # inline\n\ntld:EU\n",
        )
        .unwrap();
        assert!(allow.allows_code("NL"));
        assert!(allow.allows_code("DE"));
        assert!(allow.allows_tld_outright("eu"));
        assert!(!allow.allows_code("US"));
    }

    #[test]
    fn parse_rejects_bad_lines() {
        for bad in ["NL", "country:NLD", "country:N1", "tld:", "state:NL"] {
            assert!(
                matches!(
                    CountryAllowlist::parse(bad),
                    Err(FilterError::MalformedAllowlist { line: 1, .. })
                ),
                "{bad:?} should be rejected"
            );
        }
    }

    #[test]
    fn builtin_allowlist_covers_the_union_context() {
        let allow = CountryAllowlist::builtin();
        for code in ["NL", "DE", "FR", "NO", "CH", "GB"] {
            assert!(allow.allows_code(code), "{code} missing");
        }
        assert!(allow.allows_tld_outright("eu"));
        assert!(!allow.allows_code("US"));
    }

    #[test]
    fn country_filter_keeps_by_code_tld_country_and_extra_tld() {
        let allow = CountryAllowlist::new(
            ["NL".into(), "DE".into()],
            ["eu".to_string()],
        );
        let map = CountryTldMap::builtin();
        let input = set(&[
            rel("a.org", "org", "p1", Some("NL")), // clause a
            rel("b.de", "de", "p1", None),         // clause b
            rel("c.eu", "eu", "p1", None),         // clause c
            rel("d.org", "org", "p1", Some("US")), // no clause
            rel("e.fr", "fr", "p1", None),         // fr maps to FR, not allowed
        ]);
        let kept = filter_by_country(&input, &allow, map);
        let domains: Vec<String> = kept.iter().map(|r| r.referring_domain).collect();
        assert_eq!(domains, ["a.org", "b.de", "c.eu"]);
    }

    #[test]
    fn country_filter_matches_clause_by_clause_oracle() {
        let allow = CountryAllowlist::new(
            ["NL".into(), "DE".into(), "FR".into()],
            ["eu".to_string()],
        );
        let map = CountryTldMap::builtin();
        let fixture = [
            rel("r1.nl", "nl", "p1", None),
            rel("r2.com", "com", "p1", Some("NL")),
            rel("r3.com", "com", "p2", Some("US")),
            rel("r4.eu", "eu", "p2", None),
            rel("r5.org", "org", "p1", None),
            rel("r6.de", "de", "p3", Some("BR")),
            rel("r7.co.uk", "co.uk", "p3", None),
            rel("r8.fr", "fr", "p1", Some("FR")),
            rel("r9.io", "io", "p2", Some("DE")),
            rel("r10.org", "org", "p3", Some("")),
        ];
        let kept = filter_by_country(&set(&fixture), &allow, map);
        for r in &fixture {
            let a = r.country.as_deref().map(|c| allow.allows_code(c)).unwrap_or(false);
            let b = country_of_tld(&r.referring_tld, map)
                .map(|c| allow.allows_code(c))
                .unwrap_or(false);
            let c = allow.allows_tld_outright(&r.referring_tld);
            assert_eq!(
                kept.contains(&r.referring_domain, &r.project_id),
                a || b || c,
                "clause oracle disagrees on {r:?}"
            );
        }
        assert_eq!(kept.len(), 6); // r1, r2, r4, r6 (de tld), r8, r9
    }

    #[test]
    fn exclude_tlds_drops_exact_suffix_matches() {
        let input = set(&[
            rel("a.com", "com", "p1", None),
            rel("b.org", "org", "p1", None),
            rel("c.co.uk", "co.uk", "p1", None),
        ]);
        let banned: BTreeSet<String> = ["com".to_string()].into();
        let out = exclude_tlds(&input, &banned);
        assert_eq!(out.len(), 2);
        assert!(!out.contains("a.com", "p1"));

        let unbanned = exclude_tlds(&input, &BTreeSet::new());
        assert_eq!(unbanned, input);
    }

    #[test]
    fn classify_marks_other_project_sites_internal() {
        let folio = portfolio(&[
            site("pa", "a-project.eu"),
            site("pb", "b-project.eu"),
            site("pc", "c-project.org"),
        ]);
        // Project A's site links to B and C; one outsider links to A.
        let input = set(&[
            rel("a-project.eu", "eu", "pb", None),
            rel("a-project.eu", "eu", "pc", None),
            rel("example.org", "org", "pa", None),
        ]);
        let classified = classify_relations(&input, &folio).unwrap();
        let internal: Vec<&ClassifiedRelation> = classified
            .iter()
            .filter(|c| c.origin == Origin::Internal)
            .collect();
        assert_eq!(internal.len(), 2);
        assert!(internal.iter().all(|c| c.relation.referring_domain == "a-project.eu"));
        assert_eq!(classified.len(), input.len());
    }

    #[test]
    fn classify_rejects_duplicate_portfolio_domains() {
        let folio = portfolio(&[site("pa", "shared.eu"), site("pb", "shared.eu")]);
        let err = classify_relations(&RelationSet::new(), &folio).unwrap_err();
        match err {
            FilterError::DuplicatePortfolioDomain {
                domain,
                project_a,
                project_b,
            } => {
                assert_eq!(domain, "shared.eu");
                assert_eq!((project_a.as_str(), project_b.as_str()), ("pa", "pb"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    fn arb_relation() -> impl Strategy<Value = LinkRelation> {
        let tlds = prop::sample::select(vec!["nl", "de", "eu", "com", "org", "fr", "io"]);
        let countries = prop::option::of(prop::sample::select(vec!["NL", "DE", "US", "FR", "BR"]));
        ("[a-z]{1,6}", tlds, "[a-z]{2}", countries).prop_map(|(name, tld, project, country)| {
            LinkRelation {
                referring_domain: format!("{name}.{tld}"),
                referring_tld: tld.to_string(),
                project_id: project,
                country: country.map(str::to_string),
            }
        })
    }

    proptest! {
        #[test]
        fn filters_commute_and_are_idempotent(
            relations in prop::collection::vec(arb_relation(), 0..40),
            banned_tlds in prop::collection::btree_set(
                prop::sample::select(vec!["com".to_string(), "org".to_string(), "io".to_string()]),
                0..3,
            ),
        ) {
            let input = set(&relations);
            let allow = CountryAllowlist::new(
                ["NL".into(), "DE".into()],
                ["eu".to_string()],
            );
            let map = CountryTldMap::builtin();

            let country_then_ban = exclude_tlds(&filter_by_country(&input, &allow, map), &banned_tlds);
            let ban_then_country = filter_by_country(&exclude_tlds(&input, &banned_tlds), &allow, map);
            prop_assert_eq!(&country_then_ban, &ban_then_country);

            let country_once = filter_by_country(&input, &allow, map);
            prop_assert_eq!(&filter_by_country(&country_once, &allow, map), &country_once);
            let ban_once = exclude_tlds(&input, &banned_tlds);
            prop_assert_eq!(&exclude_tlds(&ban_once, &banned_tlds), &ban_once);
        }

        #[test]
        fn classification_partitions_the_input(
            relations in prop::collection::vec(arb_relation(), 0..40),
        ) {
            let input = set(&relations);
            let folio = portfolio(&[site("pa", "aa.eu"), site("pb", "bb.eu")]);
            let classified = classify_relations(&input, &folio).unwrap();
            prop_assert_eq!(classified.len(), input.len());
            for c in &classified {
                let is_other_project_site = (c.relation.referring_domain == "aa.eu"
                    && c.relation.project_id != "pa")
                    || (c.relation.referring_domain == "bb.eu" && c.relation.project_id != "pb");
                let expected = if is_other_project_site { Origin::Internal } else { Origin::External };
                prop_assert_eq!(c.origin, expected);
                prop_assert!(input.contains(&c.relation.referring_domain, &c.relation.project_id));
            }
        }
    }
}
