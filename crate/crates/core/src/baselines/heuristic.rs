//! A lexical stand-in for a learned value predictor.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;

use crate::engine::{Query, Resolution, Resolver};
use crate::model::{Value, ValueKind, ValueMap, TRUTH};

/// Scans the case description for a value of the argument's type and
/// picks the one closest to words shared with the argument's placeholder.
/// `@truth` is the share of grounded-text words found in the description.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicResolver;

const MONTHS: [&str; 12] = ["jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"];

/// Capitalized words that are not names.
const NOT_NAMES: &[&str] = &[
    "In", "On", "At", "The", "A", "An", "He", "She", "They", "His", "Her", "Their", "It", "Its", "This", "That", "If",
    "And", "Or", "But", "For", "From", "Since", "During", "After", "Before", "When", "Section", "I",
];

fn words(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).map(str::to_lowercase).collect()
}

/// Share of the distinct words of `text` that occur in `reference`, in [0, 1].
pub fn lexical_overlap(text: &str, reference: &str) -> f64 {
    let t: BTreeSet<String> = words(text).into_iter().collect();
    if t.is_empty() {
        return 0.0;
    }
    let r: BTreeSet<String> = words(reference).into_iter().collect();
    t.intersection(&r).count() as f64 / t.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Want {
    Dollars,
    Date,
    Year,
    Person,
}

fn patterns() -> &'static [(Want, Regex); 4] {
    static P: OnceLock<[(Want, Regex); 4]> = OnceLock::new();
    P.get_or_init(|| {
        [
            (Want::Dollars, Regex::new(r"\$[0-9][0-9,]*").unwrap()),
            (
                Want::Date,
                Regex::new(r"\b(?:Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec)[a-z]*\.? [0-9]{1,2}(?:st|nd|rd|th)?(?:,? [0-9]{4})?\b")
                    .unwrap(),
            ),
            (Want::Year, Regex::new(r"\b(?:1[89]|20)[0-9]{2}\b").unwrap()),
            (Want::Person, Regex::new(r"\b[A-Z][a-z]+\b").unwrap()),
        ]
    })
}

/// Candidate values with their character offsets in the description.
fn candidates(want: Want, description: &str) -> Vec<(usize, Value)> {
    let re = &patterns().iter().find(|(w, _)| *w == want).unwrap().1;
    let at = |byte: usize| description[..byte].chars().count();
    re.find_iter(description)
        .filter_map(|m| {
            let s = m.as_str();
            let v = match want {
                Want::Dollars => Value::Money(s[1..].replace(',', "").parse().ok()?),
                Want::Person => {
                    let lower = s.to_lowercase();
                    if NOT_NAMES.contains(&s) || MONTHS.iter().any(|mo| lower.starts_with(mo)) {
                        return None;
                    }
                    Value::text(s)
                }
                Want::Date | Want::Year => Value::text(s),
            };
            Some((at(m.start()), v))
        })
        .collect()
}

fn want_for(q: &Query<'_>, arg: &str) -> Want {
    match q.case.expected.get(arg).map(Value::kind) {
        Some(ValueKind::Money) => return Want::Dollars,
        Some(ValueKind::Date) => return Want::Date,
        _ => {}
    }
    let placeholder: String = q
        .layer
        .map(|l| l.mentions_of(arg).iter().filter_map(|s| s.slice(q.text)).collect::<Vec<_>>().join(" "))
        .unwrap_or_default()
        .to_lowercase();
    let has = |w: &str| placeholder.split(|c: char| !c.is_alphanumeric()).any(|x| x == w);
    if ["amount", "income", "tax", "wages", "deduction", "sum"].iter().any(|w| has(w)) {
        Want::Dollars
    } else if has("year") || has("years") {
        Want::Year
    } else if has("day") || has("days") || has("date") {
        Want::Date
    } else {
        Want::Person
    }
}

impl HeuristicResolver {
    fn value(&self, q: &Query<'_>, arg: &str) -> (Option<Value>, Option<String>) {
        let want = want_for(q, arg);
        let desc = &q.case.description;
        // Values the case already gives are not answers to anything else.
        let taken: BTreeSet<String> = q.case.inputs.iter().map(|(_, v)| v.canonical()).collect();
        let found: Vec<(usize, Value)> =
            candidates(want, desc).into_iter().filter(|(_, v)| !taken.contains(&v.canonical())).collect();
        if found.is_empty() {
            return (None, Some(format!("no {want:?} value in the description").to_lowercase()));
        }
        // Anchors: description words that also occur in the placeholder.
        let placeholder: BTreeSet<String> = q
            .layer
            .map(|l| l.mentions_of(arg).iter().filter_map(|s| s.slice(q.text)).flat_map(words).collect())
            .unwrap_or_default();
        let mut anchors = Vec::new();
        let mut pos = 0;
        for (ci, chunk) in desc.split_inclusive(|c: char| !c.is_alphanumeric()).map(|c| {
            let start = pos;
            pos += c.chars().count();
            (start, c)
        }) {
            let w = chunk.trim_end_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
            if !w.is_empty() && placeholder.contains(&w) {
                anchors.push(ci);
            }
        }
        let best = found
            .into_iter()
            .enumerate()
            .min_by_key(|(i, (at, _))| {
                let d = anchors.iter().map(|a| a.abs_diff(*at)).min().unwrap_or(0);
                (d, *i)
            })
            .map(|(_, (_, v))| v);
        (best, None)
    }
}

impl Resolver for HeuristicResolver {
    fn name(&self) -> String {
        "heuristic".into()
    }

    fn resolve(&self, q: &Query<'_>) -> Result<Resolution, String> {
        let mut out = Resolution::default();
        for arg in q.required {
            if arg == TRUTH {
                out.values.set_truth(lexical_overlap(q.grounded_text, &q.case.description));
                continue;
            }
            let (v, note) = self.value(q, arg);
            if let Some(v) = v {
                out.values.insert(arg.clone(), v).map_err(|e| e.to_string())?;
            }
            out.notes.extend(note);
        }
        Ok(out)
    }
}

impl HeuristicResolver {
    /// Convenience for callers outside the engine.
    pub fn answer(&self, q: &Query<'_>) -> ValueMap {
        self.resolve(q).map(|r| r.values).unwrap_or_default()
    }
}
