//! Text normalization and tokenization shared by TF-IDF, LIME and the
//! readability metrics.
//!
//! Tokens are runs of alphanumeric characters. A `-` or `'` is kept when it
//! sits between two alphanumeric characters ("don't", "stop-now"); every
//! other character separates tokens. Tokenization works on the original
//! text so that spans can be used to highlight the exact source bytes.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// A casefolded token and its byte span in the original text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSpan {
    pub token: String,
    pub start: usize,
    pub end: usize,
}

/// Lowercases with Unicode default case mapping.
pub fn casefold(text: &str) -> String {
    text.chars().flat_map(char::to_lowercase).collect()
}

fn is_joiner(c: char) -> bool {
    c == '-' || c == '\''
}

/// Casefolds, replaces separators with spaces, collapses whitespace and trims.
pub fn normalize_text(text: &str) -> String {
    let folded: Vec<char> = casefold(text).chars().collect();
    let mut out = String::with_capacity(folded.len());
    let mut pending_space = false;
    for (i, &c) in folded.iter().enumerate() {
        let keep = c.is_alphanumeric()
            || (is_joiner(c)
                && i > 0
                && folded[i - 1].is_alphanumeric()
                && folded.get(i + 1).is_some_and(|n| n.is_alphanumeric()));
        if keep {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

/// Splits `text` into casefolded tokens with byte spans into `text`.
pub fn tokenize(text: &str) -> Vec<TokenSpan> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &(offset, c)) in chars.iter().enumerate() {
        let keep = c.is_alphanumeric()
            || (is_joiner(c)
                && start.is_some()
                && chars.get(i + 1).is_some_and(|(_, n)| n.is_alphanumeric()));
        match (keep, start) {
            (true, None) => start = Some(offset),
            (false, Some(s)) => {
                tokens.push(TokenSpan {
                    token: casefold(&text[s..offset]),
                    start: s,
                    end: offset,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        tokens.push(TokenSpan {
            token: casefold(&text[s..]),
            start: s,
            end: text.len(),
        });
    }
    tokens
}

/// Convenience: the token strings of [`tokenize`].
pub fn token_strings(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.token).collect()
}
