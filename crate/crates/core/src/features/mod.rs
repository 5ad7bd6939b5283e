//! Combined feature representation: an L2-normalized TF-IDF block followed
//! by standardized domain indicators, plus the registry that names every
//! column.

mod domain;
mod lexicon;
mod tfidf;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

pub use domain::{domain_index, levenshtein, registered_domain, DomainFeatureExtractor, DOMAIN_DIM, DOMAIN_FEATURES};
pub use lexicon::{LexiconConfig, LEXICON_VERSION};
pub use tfidf::{fit_tfidf, transform_tfidf, TfidfConfig, Vocabulary};

use crate::email::ParsedEmail;
use crate::textprep::tokenize;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConceptGroup {
    Urgency,
    ThreatLanguage,
    Persuasion,
    UrlRisk,
    HeaderAnomaly,
    CredentialHarvesting,
    FinancialLure,
    BrandImpersonation,
    Structure,
    Lexical,
}

impl ConceptGroup {
    pub const ALL: [ConceptGroup; 10] = [
        Self::Urgency,
        Self::ThreatLanguage,
        Self::Persuasion,
        Self::UrlRisk,
        Self::HeaderAnomaly,
        Self::CredentialHarvesting,
        Self::FinancialLure,
        Self::BrandImpersonation,
        Self::Structure,
        Self::Lexical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Urgency => "Urgency",
            Self::ThreatLanguage => "ThreatLanguage",
            Self::Persuasion => "Persuasion",
            Self::UrlRisk => "UrlRisk",
            Self::HeaderAnomaly => "HeaderAnomaly",
            Self::CredentialHarvesting => "CredentialHarvesting",
            Self::FinancialLure => "FinancialLure",
            Self::BrandImpersonation => "BrandImpersonation",
            Self::Structure => "Structure",
            Self::Lexical => "Lexical",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.as_str() == s)
    }

    /// Human wording used in explanations.
    pub fn description(self) -> &'static str {
        match self {
            Self::Urgency => "urgency pressure",
            Self::ThreatLanguage => "threatening language",
            Self::Persuasion => "persuasion and call-to-action wording",
            Self::UrlRisk => "risky links",
            Self::HeaderAnomaly => "sender header anomalies",
            Self::CredentialHarvesting => "credential harvesting",
            Self::FinancialLure => "financial lures",
            Self::BrandImpersonation => "brand impersonation",
            Self::Structure => "message structure",
            Self::Lexical => "individual word usage",
        }
    }
}

/// Sparse feature vector; `entries` is sorted by strictly increasing index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub entries: Vec<(usize, f64)>,
    pub total_dim: usize,
}

impl FeatureVector {
    /// Builds from dense values, keeping nonzero entries.
    pub fn from_dense(values: &[f64]) -> Self {
        Self {
            entries: values.iter().copied().enumerate().filter(|&(_, v)| v != 0.0).collect(),
            total_dim: values.len(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.total_dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |pos| self.entries[pos].1)
    }

    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| weights[i] * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub technical_name: String,
    pub human_name: String,
    pub concept_group: ConceptGroup,
}

/// Names for every feature column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRegistry {
    vocab_size: usize,
    entries: Vec<RegistryEntry>,
}

impl FeatureRegistry {
    /// Registry for a vocabulary followed by [`DOMAIN_FEATURES`].
    pub fn new(vocab: &Vocabulary) -> Self {
        let mut entries = Vec::with_capacity(vocab.len() + DOMAIN_DIM);
        for (i, term) in vocab.terms().iter().enumerate() {
            entries.push(RegistryEntry {
                technical_name: format!("feature_{i}"),
                human_name: format!("word:{term}"),
                concept_group: ConceptGroup::Lexical,
            });
        }
        for (j, (name, group)) in DOMAIN_FEATURES.iter().enumerate() {
            entries.push(RegistryEntry {
                technical_name: format!("feature_{}", vocab.len() + j),
                human_name: String::from(*name),
                concept_group: *group,
            });
        }
        Self { vocab_size: vocab.len(), entries }
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn total_dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    /// Column of a domain feature by human name.
    pub fn domain_feature_index(&self, name: &str) -> Option<usize> {
        domain_index(name).map(|j| self.vocab_size + j)
    }

    pub fn group_of(&self, index: usize) -> Option<ConceptGroup> {
        self.entries.get(index).map(|e| e.concept_group)
    }

    /// Number of columns per concept group.
    pub fn group_sizes(&self) -> Vec<(ConceptGroup, usize)> {
        ConceptGroup::ALL
            .into_iter()
            .map(|g| (g, self.entries.iter().filter(|e| e.concept_group == g).count()))
            .filter(|&(_, n)| n > 0)
            .collect()
    }
}

/// Resolves a column to its names and concept group.
pub fn map_feature(index: usize, registry: &FeatureRegistry) -> Result<&RegistryEntry> {
    registry
        .entries
        .get(index)
        .ok_or(Error::IndexOutOfRange { index, len: registry.total_dim() })
}

/// Training-set mean and standard deviation per domain feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Features with zero training variance; their std is stored as 1.
    pub zero_variance: Vec<bool>,
}

impl DomainStats {
    /// Population statistics over raw domain rows.
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::TooFewRecords(String::from("no rows for domain statistics")));
        }
        let dim = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
        }
        let mut mean = alloc::vec![0.0; dim];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut var = alloc::vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let mut std = Vec::with_capacity(dim);
        let mut zero_variance = Vec::with_capacity(dim);
        for s in var {
            let sd = libm::sqrt(s / n as f64);
            let degenerate = !(sd > 1e-12);
            zero_variance.push(degenerate);
            std.push(if degenerate { 1.0 } else { sd });
        }
        Ok(Self { mean, std, zero_variance })
    }

    pub fn standardize(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter().zip(&self.mean).zip(&self.std).map(|((v, m), s)| (v - m) / s).collect()
    }
}

/// Tokens fed to TF-IDF: the email's subject and body tokens of at least two characters.
pub fn tfidf_tokens(email: &ParsedEmail) -> Vec<String> {
    tokenize(&email.subject)
        .into_iter()
        .chain(tokenize(&email.body_text))
        .map(|t| t.token)
        .filter(|t| t.chars().count() >= 2)
        .collect()
}

/// Raw (unstandardized) domain features with freshly compiled lexicons.
pub fn extract_domain_features(email: &ParsedEmail, lexicons: &LexiconConfig) -> Vec<f64> {
    DomainFeatureExtractor::new(lexicons).extract(email)
}

/// Concatenates the TF-IDF block and the standardized domain block.
pub fn assemble(
    tfidf_block: &[(usize, f64)],
    domain_raw: &[f64],
    stats: &DomainStats,
    registry: &FeatureRegistry,
) -> Result<FeatureVector> {
    let v = registry.vocab_size();
    let d = registry.total_dim() - v;
    if domain_raw.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: domain_raw.len() });
    }
    if stats.mean.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: stats.mean.len() });
    }
    let mut entries = Vec::with_capacity(tfidf_block.len() + d);
    let mut last = None;
    for &(i, value) in tfidf_block {
        if i >= v || last.is_some_and(|l| i <= l) {
            return Err(Error::DimensionMismatch { expected: v, found: i });
        }
        last = Some(i);
        if value != 0.0 {
            entries.push((i, value));
        }
    }
    for (j, z) in stats.standardize(domain_raw).into_iter().enumerate() {
        if z != 0.0 {
            entries.push((v + j, z));
        }
    }
    Ok(FeatureVector { entries, total_dim: v + d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::email::parse_email;
    use alloc::vec;

    fn vocab3() -> Vocabulary {
        fit_tfidf(&[vec!["aa", "bb", "cc"]], TfidfConfig { max_features: 10, min_df: 1 }).unwrap()
    }

    #[test]
    fn domain_examples() {
        let e = parse_email("URGENT: verify your account now!!!");
        let f = extract_domain_features(&e, &LexiconConfig::default());
        assert_eq!(f.len(), DOMAIN_DIM);
        assert!(f[domain_index("urgency_keywords").unwrap()] >= 1.0);
        assert!(f[domain_index("credential_keywords").unwrap()] >= 1.0);
        assert!(f[domain_index("exclamation_density").unwrap()] > 0.0);

        let empty = extract_domain_features(&parse_email(""), &LexiconConfig::default());
        assert!(empty.iter().all(|&v| v == 0.0));

        let e = parse_email("From: a@bank.test\nReply-To: a@evil.test\n\nhello");
        let f = extract_domain_features(&e, &LexiconConfig::default());
        assert_eq!(f[domain_index("sender_replyto_mismatch").unwrap()], 1.0);
        let e = parse_email("From: a@mail.bank.test\nReply-To: b@bank.test\n\nhello");
        let f = extract_domain_features(&e, &LexiconConfig::default());
        assert_eq!(f[domain_index("sender_replyto_mismatch").unwrap()], 0.0);
    }

    #[test]
    fn url_and_brand_features() {
        let raw = "Subject: Final notice\n\nYour PayPal access: http://paypa1.tk/a/b/c hxxp://x http://10.0.0.1/%41%42%43%44 http://u@evil.test";
        let f = extract_domain_features(&parse_email(raw), &LexiconConfig::default());
        let at = |n: &str| f[domain_index(n).unwrap()];
        assert_eq!(at("url_count"), 3.0);
        assert_eq!(at("ip_url_flag"), 1.0);
        assert_eq!(at("suspicious_tld_count"), 1.0);
        assert_eq!(at("url_obfuscation_markers"), 3.0);
        assert_eq!(at("max_path_depth"), 3.0);
        assert_eq!(at("brand_mention_count"), 1.0);
        assert_eq!(at("brand_impersonation"), 1.0);
        assert_eq!(at("typosquat_host_count"), 1.0);
        assert_eq!(at("subject_urgency_flag"), 1.0);

        let ok = extract_domain_features(&parse_email("PayPal receipt https://www.paypal.com/x"), &LexiconConfig::default());
        assert_eq!(ok[domain_index("brand_impersonation").unwrap()], 0.0);
        assert_eq!(ok[domain_index("typosquat_host_count").unwrap()], 0.0);
    }

    #[test]
    fn whitespace_does_not_change_counts() {
        let lex = LexiconConfig::default();
        let a = extract_domain_features(&parse_email("Click here to verify your account!"), &lex);
        let b = extract_domain_features(&parse_email("  \n Click here to verify your account!\n\t "), &lex);
        assert_eq!(a, b);
    }

    #[test]
    fn layout_and_registry() {
        let vocab = vocab3();
        let reg = FeatureRegistry::new(&vocab);
        assert_eq!(reg.total_dim(), 3 + DOMAIN_DIM);
        let first = map_feature(3, &reg).unwrap();
        assert_eq!(first.human_name, DOMAIN_FEATURES[0].0);
        assert_eq!(first.technical_name, "feature_3");
        let urg = reg.domain_feature_index("urgency_keywords").unwrap();
        let e = map_feature(urg, &reg).unwrap();
        assert_eq!((e.human_name.as_str(), e.concept_group), ("urgency_keywords", ConceptGroup::Urgency));
        let w = map_feature(vocab.index_of("bb").unwrap(), &reg).unwrap();
        assert_eq!((w.human_name.as_str(), w.concept_group), ("word:bb", ConceptGroup::Lexical));
        assert_eq!(
            map_feature(reg.total_dim(), &reg),
            Err(Error::IndexOutOfRange { index: reg.total_dim(), len: reg.total_dim() })
        );
    }

    #[test]
    fn assemble_standardizes_domain_block() {
        let vocab = vocab3();
        let reg = FeatureRegistry::new(&vocab);
        let mut mean = vec![0.0; DOMAIN_DIM];
        mean[0] = 2.0;
        mean[1] = 0.5;
        let mut std = vec![1.0; DOMAIN_DIM];
        std[0] = 4.0;
        let stats = DomainStats { mean, std, zero_variance: vec![false; DOMAIN_DIM] };
        let x = assemble(&[], &vec![0.0; DOMAIN_DIM], &stats, &reg).unwrap();
        assert_eq!(x.total_dim, 3 + DOMAIN_DIM);
        // (0 - 2) / 4 and (0 - 0.5) / 1 are the only nonzero entries
        assert_eq!(x.entries, vec![(3, -0.5), (4, -0.5)]);

        let x = assemble(&[(1, 1.0)], &stats.mean, &stats, &reg).unwrap();
        assert_eq!(x.entries, vec![(1, 1.0)]);
        assert!(matches!(assemble(&[], &[0.0; 2], &stats, &reg), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(assemble(&[(3, 1.0)], &stats.mean, &stats, &reg), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn stats_handle_zero_variance() {
        let rows = vec![vec![1.0, 5.0], vec![3.0, 5.0]];
        let s = DomainStats::fit(&rows).unwrap();
        assert_eq!(s.mean, vec![2.0, 5.0]);
        assert_eq!(s.std, vec![1.0, 1.0]);
        assert_eq!(s.zero_variance, vec![false, true]);
        assert!(s.standardize(&s.mean).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn levenshtein_small_cases() {
        assert_eq!(levenshtein("paypa1", "paypal"), 1);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(registered_domain("x@Mail.Bank.test"), "bank.test");
    }
}
