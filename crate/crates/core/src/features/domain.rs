//! Named phishing indicators computed from a parsed email.

use alloc::string::String;
use alloc::vec::Vec;

use super::lexicon::{LexiconConfig, PhraseSet};
use super::ConceptGroup;
use crate::email::{count_ascii_ci, ParsedEmail};
use crate::textprep::token_strings;

/// Domain features in column order: (human name, concept group).
pub const DOMAIN_FEATURES: &[(&str, ConceptGroup)] = &[
    ("urgency_keywords", ConceptGroup::Urgency),
    ("threat_keywords", ConceptGroup::ThreatLanguage),
    ("persuasion_keywords", ConceptGroup::Persuasion),
    ("credential_keywords", ConceptGroup::CredentialHarvesting),
    ("financial_keywords", ConceptGroup::FinancialLure),
    ("brand_mention_count", ConceptGroup::BrandImpersonation),
    ("brand_impersonation", ConceptGroup::BrandImpersonation),
    ("typosquat_host_count", ConceptGroup::BrandImpersonation),
    ("url_count", ConceptGroup::UrlRisk),
    ("ip_url_flag", ConceptGroup::UrlRisk),
    ("suspicious_tld_count", ConceptGroup::UrlRisk),
    ("url_obfuscation_markers", ConceptGroup::UrlRisk),
    ("max_path_depth", ConceptGroup::UrlRisk),
    ("sender_replyto_mismatch", ConceptGroup::HeaderAnomaly),
    ("received_header_count", ConceptGroup::HeaderAnomaly),
    ("has_html", ConceptGroup::Structure),
    ("attachment_marker_count", ConceptGroup::Structure),
    ("exclamation_density", ConceptGroup::Structure),
    ("caps_ratio", ConceptGroup::Structure),
    ("body_length_log", ConceptGroup::Structure),
    ("subject_urgency_flag", ConceptGroup::Urgency),
];

/// Number of domain features.
pub const DOMAIN_DIM: usize = DOMAIN_FEATURES.len();

/// Column of a domain feature by human name.
pub fn domain_index(name: &str) -> Option<usize> {
    DOMAIN_FEATURES.iter().position(|(n, _)| *n == name)
}

/// Lexicons compiled for repeated extraction.
#[derive(Debug, Clone)]
pub struct DomainFeatureExtractor {
    urgency: PhraseSet,
    threat: PhraseSet,
    persuasion: PhraseSet,
    credential: PhraseSet,
    financial: PhraseSet,
    /// One matcher per brand, paired with the brand name stripped to
    /// alphanumerics for host comparisons.
    brands: Vec<(PhraseSet, String)>,
    suspicious_tlds: Vec<String>,
}

impl DomainFeatureExtractor {
    pub fn new(lexicons: &LexiconConfig) -> Self {
        Self {
            urgency: PhraseSet::new(&lexicons.urgency),
            threat: PhraseSet::new(&lexicons.threat),
            persuasion: PhraseSet::new(&lexicons.persuasion),
            credential: PhraseSet::new(&lexicons.credential),
            financial: PhraseSet::new(&lexicons.financial),
            brands: lexicons
                .brand_names
                .iter()
                .map(|b| (PhraseSet::new(core::slice::from_ref(b)), b.chars().filter(|c| c.is_alphanumeric()).collect()))
                .collect(),
            suspicious_tlds: lexicons.suspicious_tlds.clone(),
        }
    }

    pub fn extract(&self, email: &ParsedEmail) -> Vec<f64> {
        let subject_tokens = token_strings(&email.subject);
        let body_tokens = token_strings(&email.body_text);
        let all: Vec<&str> = subject_tokens.iter().chain(body_tokens.iter()).map(String::as_str).collect();
        let subject: Vec<&str> = subject_tokens.iter().map(String::as_str).collect();
        let body_trimmed = email.body_text.trim();

        let mut f = Vec::with_capacity(DOMAIN_DIM);
        f.push(self.urgency.count(&all) as f64);
        f.push(self.threat.count(&all) as f64);
        f.push(self.persuasion.count(&all) as f64);
        f.push(self.credential.count(&all) as f64);
        f.push(self.financial.count(&all) as f64);

        let mut brand_hits = 0;
        let mut impersonation = false;
        for (set, key) in &self.brands {
            let hits = set.count(&all);
            brand_hits += hits;
            if hits > 0 && !email.urls.is_empty() && !email.urls.iter().any(|u| u.host.contains(key.as_str())) {
                impersonation = true;
            }
        }
        f.push(brand_hits as f64);
        f.push(flag(impersonation));
        f.push(email.urls.iter().filter(|u| self.is_typosquat(&u.host)).count() as f64);

        f.push(email.urls.len() as f64);
        f.push(flag(email.urls.iter().any(|u| u.is_ip_host)));
        f.push(email.urls.iter().filter(|u| self.suspicious_tlds.iter().any(|t| *t == u.tld)).count() as f64);
        let text_markers = count_ascii_ci(&email.subject, "hxxp") + count_ascii_ci(&email.body_text, "hxxp");
        let url_markers = email
            .urls
            .iter()
            .map(|u| usize::from(percent_escapes(&u.raw) > 3) + usize::from(u.raw[scheme_len(&u.raw)..].contains('@')))
            .sum::<usize>();
        f.push((text_markers + url_markers) as f64);
        f.push(email.urls.iter().map(|u| u.path_depth).max().unwrap_or(0) as f64);

        let mismatch = match (&email.sender, &email.reply_to) {
            (Some(s), Some(r)) => registered_domain(s) != registered_domain(r),
            _ => false,
        };
        f.push(flag(mismatch));
        f.push(email.header_count("received") as f64);
        f.push(flag(email.has_html));
        f.push(email.attachment_markers.len() as f64);

        let subject_trimmed = email.subject.trim();
        let text_chars = subject_trimmed.chars().count() + body_trimmed.chars().count();
        let bangs = subject_trimmed.matches('!').count() + body_trimmed.matches('!').count();
        f.push(if text_chars == 0 { 0.0 } else { 100.0 * bangs as f64 / text_chars as f64 });
        let (upper, alpha) = body_trimmed
            .chars()
            .filter(|c| c.is_alphabetic())
            .fold((0usize, 0usize), |(u, a), c| (u + usize::from(c.is_uppercase()), a + 1));
        f.push(if alpha == 0 { 0.0 } else { upper as f64 / alpha as f64 });
        f.push(libm::log1p(body_trimmed.chars().count() as f64));
        f.push(flag(self.urgency.count(&subject) > 0));
        debug_assert_eq!(f.len(), DOMAIN_DIM);
        f
    }

    fn is_typosquat(&self, host: &str) -> bool {
        let mut labels = host.rsplit('.');
        let _tld = labels.next();
        let Some(second) = labels.next() else { return false };
        self.brands
            .iter()
            .any(|(_, brand)| brand.chars().count() >= 4 && matches!(levenshtein(second, brand), 1 | 2))
    }
}

fn flag(b: bool) -> f64 {
    if b { 1.0 } else { 0.0 }
}

fn scheme_len(raw: &str) -> usize {
    raw.find("://").map_or(0, |i| i + 3)
}

fn percent_escapes(raw: &str) -> usize {
    let b = raw.as_bytes();
    (0..b.len())
        .filter(|&i| b[i] == b'%' && i + 2 < b.len() && b[i + 1].is_ascii_hexdigit() && b[i + 2].is_ascii_hexdigit())
        .count()
}

/// Last two labels of the domain part of an address, lowercased.
pub fn registered_domain(address: &str) -> String {
    let domain = address.rsplit('@').next().unwrap_or(address).trim().trim_end_matches('.');
    let labels: Vec<&str> = domain.split('.').collect();
    let start = labels.len().saturating_sub(2);
    labels[start..].join(".").to_lowercase()
}

/// Edit distance over chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = alloc::vec![0; b.len() + 1];
    for (i, ca) in a.chars().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != *cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
