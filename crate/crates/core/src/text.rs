//! Label normalization shared by entities, relations, matching and scoring.

/// Canonical lookup key for a surface form.
///
/// Lowercases, strips surrounding whitespace and punctuation, and collapses
/// internal whitespace runs to a single space. Interior punctuation is kept,
/// so `"W.W.E. Velocity"` normalizes to `"w.w.e. velocity"`.
pub fn normalize_label(text: &str) -> String {
    let stripped = text.trim_matches(|c: char| c.is_whitespace() || is_punctuation(c));
    let mut out = String::with_capacity(stripped.len());
    for word in stripped.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{2018}' | '\u{2019}' | '\u{201c}' | '\u{201d}' | '\u{2013}' | '\u{2014}' | '\u{2026}'
        )
}
