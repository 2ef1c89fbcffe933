//! Rule-based placeholder spotting: determiner phrases, possessives and
//! `such X` phrases, read off a plain word tokenization.

use crate::model::Span;

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "such", "any", "every", "each", "his", "her", "its", "their", "this", "that", "these", "those",
    "another",
];

/// Words that end a phrase: prepositions, conjunctions, auxiliaries,
/// relative pronouns and common statutory verbs.
const STOP: &[&str] = &[
    "of", "to", "in", "on", "for", "with", "by", "from", "at", "as", "into", "under", "over", "during", "within",
    "after", "before", "between", "without", "upon", "than", "and", "or", "but", "nor", "if", "unless", "whether",
    "which", "who", "whom", "whose", "that", "where", "when", "is", "are", "was", "were", "be", "been", "being",
    "has", "have", "had", "shall", "may", "will", "would", "not", "does", "do", "did", "means", "includes",
    "begins", "beginning", "made", "determined", "employed", "performed", "maintains",
];

const MAX_PHRASE: usize = 6;

struct Word<'a> {
    text: &'a str,
    start: usize,
    end: usize,
}

/// Maximal runs of letters, digits, apostrophes and hyphens, with
/// character offsets.
fn words(text: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut cur: Option<(usize, usize)> = None;
    let is_word = |c: char| c.is_alphanumeric() || c == '\'' || c == '-';
    for (ci, (bi, c)) in text.char_indices().enumerate() {
        match (is_word(c), cur) {
            (true, None) => cur = Some((ci, bi)),
            (false, Some((cs, bs))) => {
                out.push(Word { text: &text[bs..bi], start: cs, end: ci });
                cur = None;
            }
            _ => {}
        }
    }
    if let Some((cs, bs)) = cur {
        out.push(Word { text: &text[bs..], start: cs, end: text.chars().count() });
    }
    out
}

fn possessive(w: &str) -> Option<&str> {
    w.strip_suffix("'s").or_else(|| w.strip_suffix("s'"))
}

/// Whether a word can continue a noun phrase.
fn content(w: &str) -> bool {
    let lower = w.to_lowercase();
    let base = possessive(&lower).unwrap_or(&lower);
    w.chars().next().is_some_and(char::is_alphabetic)
        && !STOP.contains(&base)
        && !DETERMINERS.contains(&base)
}

/// Whether two words are separated by whitespace only.
fn adjacent(text: &[char], a: &Word<'_>, b: &Word<'_>) -> bool {
    text[a.end..b.start].iter().all(|c| c.is_whitespace())
}

/// Candidate placeholder spans, sorted and non-overlapping.
///
/// A phrase starts at a determiner or at a capitalized possessive and runs
/// over following content words on the same clause, at most six words. A
/// possessive inside a phrase continues it (`such individual's taxable
/// year`).
pub fn heuristic_argument_id(text: &str) -> Vec<Span> {
    let ws = words(text);
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < ws.len() {
        let lower = ws[i].text.to_lowercase();
        let starts = DETERMINERS.contains(&lower.as_str())
            || (possessive(ws[i].text).is_some() && ws[i].text.starts_with(char::is_uppercase));
        if !starts {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < ws.len() && j + 1 - i < MAX_PHRASE && adjacent(&chars, &ws[j], &ws[j + 1]) && content(ws[j + 1].text) {
            j += 1;
        }
        if j > i {
            out.push(Span { start: ws[i].start, end: ws[j].end });
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}
