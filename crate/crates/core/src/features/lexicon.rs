use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::textprep::token_strings;
use crate::{Error, Result};

/// Current version of the lexicon document format.
pub const LEXICON_VERSION: u32 = 1;

/// Keyword lists used by the domain features. Phrases are lowercase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconConfig {
    pub urgency: Vec<String>,
    pub threat: Vec<String>,
    pub persuasion: Vec<String>,
    pub credential: Vec<String>,
    pub financial: Vec<String>,
    pub brand_names: Vec<String>,
    pub suspicious_tlds: Vec<String>,
}

const URGENCY: &[&str] = &[
    "urgent", "urgently", "immediately", "immediate action", "suspended", "suspension", "expires", "expire",
    "expiring", "expired", "act now", "final notice", "final warning", "within 24 hours", "within 48 hours",
    "right away", "as soon as possible", "limited time", "last chance", "time sensitive", "action required",
    "deadline",
];
const THREAT: &[&str] = &[
    "locked", "terminated", "termination", "closed", "legal action", "penalty", "unauthorized",
    "suspicious activity", "unusual activity", "compromised", "blocked", "permanently", "lawsuit", "arrest",
    "disabled", "restricted",
];
const PERSUASION: &[&str] = &[
    "click here", "click", "congratulations", "you have been selected", "exclusive", "free", "guaranteed",
    "risk-free", "special offer", "dear customer", "dear user", "dear member", "act fast", "don't miss",
    "once in a lifetime",
];
const CREDENTIAL: &[&str] = &[
    "verify", "verification", "password", "login", "log in", "sign in", "account", "confirm identity",
    "confirm your identity", "credentials", "username", "ssn", "social security", "security question", "pin",
    "update your information", "validate",
];
const FINANCIAL: &[&str] = &[
    "prize", "winner", "won", "refund", "wire", "wire transfer", "invoice", "bank", "payment", "lottery",
    "inheritance", "million", "bitcoin", "gift card", "claim", "cash", "beneficiary", "reward",
];
const BRANDS: &[&str] = &[
    "paypal", "amazon", "apple", "microsoft", "netflix", "google", "facebook", "chase", "wells fargo",
    "bank of america", "dhl", "fedex", "irs", "docusign", "dropbox", "linkedin", "office 365",
];
const SUSPICIOUS_TLDS: &[&str] = &["tk", "ml", "ga", "cf", "gq", "zip", "top", "xyz"];

fn owned(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl Default for LexiconConfig {
    fn default() -> Self {
        Self {
            urgency: owned(URGENCY),
            threat: owned(THREAT),
            persuasion: owned(PERSUASION),
            credential: owned(CREDENTIAL),
            financial: owned(FINANCIAL),
            brand_names: owned(BRANDS),
            suspicious_tlds: owned(SUSPICIOUS_TLDS),
        }
    }
}

impl LexiconConfig {
    pub fn categories(&self) -> [(&'static str, &Vec<String>); 7] {
        [
            ("urgency", &self.urgency),
            ("threat", &self.threat),
            ("persuasion", &self.persuasion),
            ("credential", &self.credential),
            ("financial", &self.financial),
            ("brand_names", &self.brand_names),
            ("suspicious_tlds", &self.suspicious_tlds),
        ]
    }

    /// Lists must be nonempty and every phrase lowercase and tokenizable.
    pub fn validate(&self) -> Result<()> {
        for (name, list) in self.categories() {
            if list.is_empty() {
                return Err(Error::InvalidConfig(alloc::format!("lexicon list `{name}` is empty")));
            }
            for phrase in list {
                if phrase.to_lowercase() != *phrase || token_strings(phrase).is_empty() {
                    return Err(Error::InvalidConfig(alloc::format!(
                        "lexicon `{name}` phrase {phrase:?} must be lowercase and contain a word"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Phrase matcher over token sequences, indexed by first token.
#[derive(Debug, Clone, Default)]
pub(crate) struct PhraseSet {
    by_first: BTreeMap<String, Vec<Vec<String>>>,
}

impl PhraseSet {
    pub(crate) fn new(phrases: &[String]) -> Self {
        let mut by_first: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
        for phrase in phrases {
            let toks = token_strings(phrase);
            if let Some(first) = toks.first() {
                by_first.entry(first.clone()).or_default().push(toks);
            }
        }
        Self { by_first }
    }

    /// Number of phrase occurrences in `tokens`. Overlapping phrases each count.
    pub(crate) fn count(&self, tokens: &[&str]) -> usize {
        let mut hits = 0;
        for i in 0..tokens.len() {
            if let Some(candidates) = self.by_first.get(tokens[i]) {
                hits += candidates
                    .iter()
                    .filter(|p| {
                        tokens.len() - i >= p.len() && p.iter().zip(&tokens[i..]).all(|(a, b)| a == b)
                    })
                    .count();
            }
        }
        hits
    }
}
