//! Lenient parsing of raw messages into headers, subject, body and URLs.
//!
//! Parsing never fails. A header block is recognized only when the input
//! starts with `Name: value` lines terminated by a blank line; anything
//! else is treated as a bare body. MIME parts are not decoded.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Url {
    pub raw: String,
    pub host: String,
    pub tld: String,
    pub is_ip_host: bool,
    pub path_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParsedEmail {
    pub headers: Vec<(String, String)>,
    pub subject: String,
    pub body_text: String,
    /// Byte offset of `body_text` within the raw input.
    pub body_offset: usize,
    /// Byte span of the subject value within the raw input, when present.
    pub subject_span: Option<(usize, usize)>,
    pub sender: Option<String>,
    pub reply_to: Option<String>,
    pub urls: Vec<Url>,
    pub has_html: bool,
    pub attachment_markers: Vec<String>,
}

impl ParsedEmail {
    /// First header value named `name`, compared case-insensitively.
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    pub fn header_count(&self, name: &str) -> usize {
        self.headers.iter().filter(|(n, _)| n.eq_ignore_ascii_case(name)).count()
    }
}

struct Line<'a> {
    start: usize,
    text: &'a str,
}

/// Lines with their start offsets; `text` excludes the terminator and a trailing `\r`.
fn lines(raw: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    for piece in raw.split_inclusive('\n') {
        let text = piece.strip_suffix('\n').unwrap_or(piece);
        let text = text.strip_suffix('\r').unwrap_or(text);
        out.push(Line { start, text });
        start += piece.len();
    }
    out
}

/// Splits `Name: value`; the name must be non-empty printable ASCII without spaces.
fn split_header_line(line: &str) -> Option<(&str, &str)> {
    let colon = line.find(':')?;
    let name = &line[..colon];
    if name.is_empty() || !name.bytes().all(|b| (33..=126).contains(&b)) {
        return None;
    }
    Some((name, &line[colon + 1..]))
}

struct HeaderBlock {
    headers: Vec<(String, String)>,
    subject_span: Option<(usize, usize)>,
    body_offset: usize,
}

fn parse_header_block(raw: &str) -> Option<HeaderBlock> {
    let mut headers: Vec<(String, String)> = Vec::new();
    let mut subject_span = None;
    let all = lines(raw);
    for (i, line) in all.iter().enumerate() {
        if line.text.trim().is_empty() {
            if headers.is_empty() {
                return None;
            }
            let body_offset = all.get(i + 1).map_or(raw.len(), |l| l.start);
            return Some(HeaderBlock { headers, subject_span, body_offset });
        }
        let folded = line.text.starts_with([' ', '\t']);
        if folded {
            let (_, value) = headers.last_mut()?;
            value.push(' ');
            value.push_str(line.text.trim());
            continue;
        }
        let (name, value) = split_header_line(line.text)?;
        if name.eq_ignore_ascii_case("subject") && subject_span.is_none() {
            let value_start = line.start + name.len() + 1;
            let lead = value.len() - value.trim_start().len();
            let trimmed = value.trim();
            if !trimmed.is_empty() {
                subject_span = Some((value_start + lead, value_start + lead + trimmed.len()));
            }
        }
        headers.push((name.to_string(), value.trim().to_string()));
    }
    None
}

/// Address inside `<...>` if present, otherwise the trimmed value.
fn extract_address(value: &str) -> Option<String> {
    let addr = match (value.rfind('<'), value.rfind('>')) {
        (Some(l), Some(r)) if l < r => &value[l + 1..r],
        _ => value,
    };
    let addr = addr.trim().trim_matches('"');
    (!addr.is_empty()).then(|| addr.to_string())
}

fn find_ascii_ci(haystack: &str, needle: &str, from: usize) -> Option<usize> {
    let hay = haystack.as_bytes();
    let pat = needle.as_bytes();
    if pat.is_empty() || hay.len() < pat.len() {
        return None;
    }
    (from..=hay.len() - pat.len()).find(|&i| hay[i..i + pat.len()].eq_ignore_ascii_case(pat))
}

pub(crate) fn contains_ascii_ci(haystack: &str, needle: &str) -> bool {
    find_ascii_ci(haystack, needle, 0).is_some()
}

pub(crate) fn count_ascii_ci(haystack: &str, needle: &str) -> usize {
    let mut n = 0;
    let mut from = 0;
    while let Some(i) = find_ascii_ci(haystack, needle, from) {
        n += 1;
        from = i + needle.len();
    }
    n
}

fn attachment_markers(raw: &str) -> Vec<String> {
    const MARKER: &str = "content-disposition: attachment";
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(i) = find_ascii_ci(raw, MARKER, from) {
        from = i + MARKER.len();
        let rest = &raw[from..];
        let line_end = rest.find('\n').unwrap_or(rest.len());
        // folded filename parameter may sit on the following line
        let window_end = rest[line_end..]
            .strip_prefix('\n')
            .filter(|r| r.starts_with([' ', '\t']))
            .map_or(line_end, |r| line_end + 1 + r.find('\n').unwrap_or(r.len()));
        let window = &rest[..window_end];
        if let Some(f) = find_ascii_ci(window, "filename=", 0) {
            let value = &window[f + "filename=".len()..];
            let value = value.trim_start();
            let name = if let Some(q) = value.strip_prefix('"') {
                q.split('"').next().unwrap_or("")
            } else {
                value.split([';', '\r', '\n', ' ', '\t']).next().unwrap_or("")
            };
            if !name.is_empty() {
                out.push(name.to_string());
            }
        }
    }
    out
}

/// Parses a raw message. Total: malformed header blocks degrade to body text.
pub fn parse_email(raw: &str) -> ParsedEmail {
    let block = parse_header_block(raw);
    let (headers, subject_span, body_offset) = match block {
        Some(b) => (b.headers, b.subject_span, b.body_offset),
        None => (Vec::new(), None, 0),
    };
    let mut email = ParsedEmail {
        headers,
        body_text: raw[body_offset..].to_string(),
        body_offset,
        subject_span,
        ..ParsedEmail::default()
    };
    email.subject = email.header("subject").unwrap_or("").to_string();
    email.sender = email.header("from").and_then(extract_address);
    email.reply_to = email.header("reply-to").and_then(extract_address);
    email.has_html = contains_ascii_ci(raw, "<html") || contains_ascii_ci(raw, "<a href");
    email.attachment_markers = attachment_markers(raw);
    let mut urls = extract_urls(&email.subject);
    urls.extend(extract_urls(&email.body_text));
    email.urls = urls;
    email
}

fn is_url_terminator(c: char) -> bool {
    c.is_whitespace() || matches!(c, ')' | '"' | '>' | ',' | '<')
}

fn is_dotted_quad(host: &str) -> bool {
    let parts: Vec<&str> = host.split('.').collect();
    parts.len() == 4
        && parts.iter().all(|p| {
            !p.is_empty() && p.len() <= 3 && p.bytes().all(|b| b.is_ascii_digit()) && p.parse::<u16>().is_ok_and(|v| v <= 255)
        })
}

fn parse_url(raw: &str, scheme_len: usize) -> Option<Url> {
    let rest = &raw[scheme_len..];
    let authority_end = rest.find(['/', '?', '#']).unwrap_or(rest.len());
    let authority = &rest[..authority_end];
    let host_port = authority.rsplit('@').next().unwrap_or(authority);
    let host = match host_port.rfind(':') {
        Some(c) if host_port[c + 1..].bytes().all(|b| b.is_ascii_digit()) => &host_port[..c],
        _ => host_port,
    };
    let host = host.trim_end_matches('.').to_ascii_lowercase();
    if host.is_empty() {
        return None;
    }
    let path = &rest[authority_end..];
    let path = path.split(['?', '#']).next().unwrap_or("");
    let path_depth = path.split('/').filter(|s| !s.is_empty()).count();
    let is_ip_host = is_dotted_quad(&host);
    let tld = if is_ip_host {
        String::new()
    } else {
        host.rsplit('.').next().unwrap_or("").to_string()
    };
    Some(Url { raw: raw.to_string(), host, tld, is_ip_host, path_depth })
}

/// Finds `http://` and `https://` links in order of appearance.
pub fn extract_urls(text: &str) -> Vec<Url> {
    let mut out = Vec::new();
    let mut from = 0;
    loop {
        let http = find_ascii_ci(text, "http://", from);
        let https = find_ascii_ci(text, "https://", from);
        let (start, scheme_len) = match (http, https) {
            (Some(a), Some(b)) if b < a => (b, 8),
            (Some(a), _) => (a, 7),
            (None, Some(b)) => (b, 8),
            (None, None) => break,
        };
        let tail = &text[start..];
        let end = tail.find(is_url_terminator).unwrap_or(tail.len());
        let raw = tail[..end].trim_end_matches('.');
        from = start + end.max(scheme_len);
        if let Some(url) = parse_url(raw, scheme_len) {
            out.push(url);
        }
    }
    out
}
