//! Target-object extraction from free-text task instructions.
//!
//! Instructions are merged into one command (clauses concatenated, exact
//! duplicate clauses dropped), then a rule-based pass collects the head noun
//! of the phrase following each manipulation verb (direct object) and of each
//! prepositional phrase after it (indirect objects). Candidates are clustered
//! with average-linkage agglomerative clustering on cosine distance between
//! word vectors; the heaviest cluster wins (direct objects weigh 2, indirect
//! 1, earliest occurrence breaks ties) and its member closest to the cluster
//! centroid is returned, preferring direct objects and then first occurrence.

use std::collections::HashSet;

use thiserror::Error;

use super::cluster::average_linkage;
use super::embeddings::{cosine, EmbeddingProvider};

/// Default cosine-distance cut for merging object clusters.
pub const DEFAULT_CLUSTER_CUT: f64 = 0.35;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("no instructions given")]
    NoInstructions,
    #[error("no manipulation verb found")]
    NoVerbFound,
    #[error("no object found after any manipulation verb")]
    NoObjectFound,
}

const DEFAULT_VERBS: &[&str] = &[
    "pick", "place", "put", "move", "grab", "take", "push", "pull", "open", "close", "shut", "turn",
    "press", "pour", "wipe", "stack", "insert", "remove", "lift", "slide", "drag", "flip", "fold",
    "unfold", "hang", "drop", "set", "lay", "bring", "throw", "toss", "transfer", "rotate", "twist",
    "empty", "fill", "clean", "store", "serve", "grasp", "hold", "carry", "return", "knock", "tilt",
    "cover", "uncover", "unplug", "plug", "bin", "stir", "scoop",
];

const PARTICLES: &[&str] = &["up", "down", "out", "off", "on", "away", "back", "over"];
const DETERMINERS: &[&str] = &[
    "the", "a", "an", "some", "this", "that", "these", "those", "my", "your", "its", "their", "his",
    "her", "our", "all", "any", "each", "both", "another", "other",
];
const PRONOUNS: &[&str] = &["it", "them", "one", "something", "everything", "itself"];
const PREPOSITIONS: &[&str] = &[
    "in", "into", "on", "onto", "to", "from", "with", "inside", "under", "over", "at", "near", "next",
    "beside", "behind", "of", "by", "towards", "toward", "across", "around", "between", "through",
    "for", "off", "out", "against", "above", "below", "underneath", "within", "along", "upon",
];
const CLAUSE_BREAKS: &[&str] = &["and", "then", "while", "before", "after", "so"];
/// Location words that head prepositional phrases without naming objects.
const PLACE_WORDS: &[&str] = &[
    "left", "right", "side", "top", "bottom", "front", "back", "middle", "center", "centre", "edge",
    "corner", "end", "part", "half", "way", "position", "spot", "place", "area", "surface", "upright",
];
const TRAILING_ADVERBS: &[&str] = &[
    "again", "back", "away", "up", "down", "together", "carefully", "slowly", "completely", "forward",
    "forwards", "backward", "backwards", "aside", "sideways", "gently", "quickly", "firmly", "halfway",
];
/// Surface-contact verbs whose `with` phrase names the held tool:
/// "wipe the board with the towel" manipulates the towel.
const INSTRUMENT_VERBS: &[&str] = &["wipe", "clean", "scrub", "sweep", "dust", "stir", "scoop", "polish"];
const INSTRUMENT_MARKERS: &[&str] = &["with", "using"];

/// Manipulation verbs recognized by the extractor.
#[derive(Debug, Clone)]
pub struct VerbLexicon {
    verbs: HashSet<String>,
}

impl Default for VerbLexicon {
    fn default() -> Self {
        VerbLexicon::new(DEFAULT_VERBS.iter().copied())
    }
}

impl VerbLexicon {
    pub fn new<'a>(verbs: impl IntoIterator<Item = &'a str>) -> Self {
        VerbLexicon {
            verbs: verbs.into_iter().map(str::to_lowercase).collect(),
        }
    }

    /// Lexicon verb for an inflected token (`picked`, `placing`, `drops`, ...).
    pub fn lemma(&self, token: &str) -> Option<String> {
        if self.verbs.contains(token) {
            return Some(token.to_string());
        }
        let mut forms: Vec<String> = Vec::new();
        for suffix in ["ing", "ed", "es", "s", "d"] {
            if let Some(stem) = token.strip_suffix(suffix) {
                if stem.len() < 2 {
                    continue;
                }
                forms.push(stem.to_string());
                if suffix == "ing" || suffix == "ed" {
                    forms.push(format!("{stem}e"));
                    let b = stem.as_bytes();
                    if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
                        forms.push(stem[..stem.len() - 1].to_string());
                    }
                }
            }
        }
        forms.into_iter().find(|f| self.verbs.contains(f))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Direct,
    Indirect,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub word: String,
    pub role: Role,
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() || c == '-' || c == '\'' {
            cur.extend(c.to_lowercase());
        } else {
            if !cur.is_empty() {
                tokens.push(std::mem::take(&mut cur));
            }
            if matches!(c, '.' | ',' | ';' | '!' | '?' | ':') {
                tokens.push("|".into());
            }
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

/// Merge instructions into clauses, dropping exact duplicate clauses.
pub fn merge_instructions(instructions: &[String]) -> Vec<Vec<String>> {
    let mut seen: HashSet<Vec<String>> = HashSet::new();
    let mut clauses = Vec::new();
    for text in instructions {
        let mut cur: Vec<String> = Vec::new();
        for tok in tokenize(text).into_iter().chain(std::iter::once("|".to_string())) {
            if tok == "|" || CLAUSE_BREAKS.contains(&tok.as_str()) {
                if !cur.is_empty() && seen.insert(cur.clone()) {
                    clauses.push(std::mem::take(&mut cur));
                }
                cur.clear();
            } else {
                cur.push(tok);
            }
        }
    }
    clauses
}

/// Head noun of the phrase starting at `start`; returns (head, next index).
fn noun_phrase(tokens: &[String], start: usize, lexicon: &VerbLexicon) -> (Option<String>, usize) {
    let mut i = start;
    let mut head: Option<String> = None;
    let mut pronoun = false;
    while i < tokens.len() {
        let t = tokens[i].as_str();
        if PREPOSITIONS.contains(&t) || (head.is_some() && lexicon.lemma(t).is_some()) {
            break;
        }
        if PRONOUNS.contains(&t) && head.is_none() && !pronoun {
            // "it", "them": the phrase names nothing new
            pronoun = true;
            i += 1;
            continue;
        }
        if pronoun {
            break;
        }
        if !DETERMINERS.contains(&t) && !TRAILING_ADVERBS.contains(&t) && !t.chars().all(|c| c.is_ascii_digit()) {
            head = Some(t.to_string());
        }
        i += 1;
    }
    (head, i)
}

fn is_verb_at(tokens: &[String], i: usize, lexicon: &VerbLexicon) -> Option<String> {
    // a lexicon word right after a determiner is a noun ("the bin")
    if i > 0 && DETERMINERS.contains(&tokens[i - 1].as_str()) {
        return None;
    }
    lexicon.lemma(&tokens[i])
}

/// Verbs whose particle may double as a preposition: "turn on the stove".
const PHRASAL: &[&str] = &["pick", "turn", "take", "put", "set", "lay"];

/// Tool named by a `with`/`using` phrase before the next verb, and the index after it.
fn instrument(tokens: &[String], from: usize, lexicon: &VerbLexicon) -> Option<(String, usize)> {
    let mut i = from;
    while i < tokens.len() {
        let t = tokens[i].as_str();
        if INSTRUMENT_MARKERS.contains(&t) {
            let (head, next) = noun_phrase(tokens, i + 1, lexicon);
            return head.filter(|w| !PLACE_WORDS.contains(&w.as_str())).map(|h| (h, next));
        }
        if is_verb_at(tokens, i, lexicon).is_some() {
            return None;
        }
        i += 1;
    }
    None
}

/// Direct and indirect object heads in order of appearance. A tool named
/// after a surface-contact verb counts as the direct object, the surface
/// as indirect.
pub fn object_candidates(clauses: &[Vec<String>], lexicon: &VerbLexicon) -> Result<Vec<Candidate>, ExtractError> {
    let mut saw_verb = false;
    let mut out = Vec::new();
    for tokens in clauses {
        let mut i = 0;
        let mut clause_has_verb = false;
        while i < tokens.len() {
            if let Some(verb) = is_verb_at(tokens, i, lexicon) {
                clause_has_verb = true;
                i += 1;
                if let Some(p) = tokens.get(i).map(String::as_str).filter(|t| PARTICLES.contains(t)) {
                    let followed_by_np = tokens
                        .get(i + 1)
                        .is_some_and(|n| !PREPOSITIONS.contains(&n.as_str()) && !PRONOUNS.contains(&n.as_str()));
                    if followed_by_np && (!PREPOSITIONS.contains(&p) || PHRASAL.contains(&verb.as_str())) {
                        i += 1;
                    }
                }
                let (head, next) = noun_phrase(tokens, i, lexicon);
                let head = head.filter(|w| !PLACE_WORDS.contains(&w.as_str()));
                let tool = INSTRUMENT_VERBS
                    .contains(&verb.as_str())
                    .then(|| instrument(tokens, next, lexicon))
                    .flatten();
                match (head, tool) {
                    (surface, Some((tool, after))) => {
                        out.push(Candidate {
                            word: tool,
                            role: Role::Direct,
                        });
                        if let Some(word) = surface {
                            out.push(Candidate {
                                word,
                                role: Role::Indirect,
                            });
                        }
                        i = after;
                        continue;
                    }
                    (Some(word), None) => out.push(Candidate { word, role: Role::Direct }),
                    (None, None) => {}
                }
                i = next;
            } else if clause_has_verb && PREPOSITIONS.contains(&tokens[i].as_str()) {
                let (head, next) = noun_phrase(tokens, i + 1, lexicon);
                if let Some(word) = head.filter(|w| !PLACE_WORDS.contains(&w.as_str())) {
                    out.push(Candidate {
                        word,
                        role: Role::Indirect,
                    });
                }
                i = next.max(i + 1);
            } else {
                i += 1;
            }
        }
        saw_verb |= clause_has_verb;
    }
    if !saw_verb {
        return Err(ExtractError::NoVerbFound);
    }
    if out.is_empty() {
        return Err(ExtractError::NoObjectFound);
    }
    Ok(out)
}

/// Canonical form: the singular if the embedding table knows it.
fn canonical(word: &str, embeddings: &dyn EmbeddingProvider) -> String {
    if embeddings.vector(word).is_some() {
        return word.to_string();
    }
    for (suffix, repl) in [("ies", "y"), ("es", ""), ("s", "")] {
        if let Some(stem) = word.strip_suffix(suffix) {
            let s = format!("{stem}{repl}");
            if embeddings.vector(&s).is_some() {
                return s;
            }
        }
    }
    word.to_string()
}

pub fn extract_target_object(
    instructions: &[String],
    lexicon: &VerbLexicon,
    embeddings: &dyn EmbeddingProvider,
    cluster_cut: f64,
) -> Result<String, ExtractError> {
    if instructions.iter().all(|s| s.trim().is_empty()) {
        return Err(ExtractError::NoInstructions);
    }
    let clauses = merge_instructions(instructions);
    let mut candidates = object_candidates(&clauses, lexicon)?;
    for c in &mut candidates {
        c.word = canonical(&c.word, embeddings);
    }

    let vectors: Vec<Option<&[f32]>> = candidates.iter().map(|c| embeddings.vector(&c.word)).collect();
    let n = candidates.len();
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if candidates[i].word == candidates[j].word {
                        0.0
                    } else {
                        match (vectors[i], vectors[j]) {
                            (Some(a), Some(b)) => 1.0 - cosine(a, b),
                            _ => 1.0,
                        }
                    }
                })
                .collect()
        })
        .collect();
    let clusters = average_linkage(&dist, cluster_cut);

    let weight = |c: &Candidate| if c.role == Role::Direct { 2 } else { 1 };
    // clusters are ordered by first member, so max_by_key with a reversed
    // index keeps the earliest cluster on weight ties
    let primary = clusters
        .iter()
        .max_by_key(|members| {
            let w: u32 = members.iter().map(|&i| weight(&candidates[i])).sum();
            (w, std::cmp::Reverse(members[0]))
        })
        .expect("at least one candidate");

    let has_direct = primary.iter().any(|&i| candidates[i].role == Role::Direct);
    let pool: Vec<usize> = primary
        .iter()
        .copied()
        .filter(|&i| !has_direct || candidates[i].role == Role::Direct)
        .collect();

    let embedded: Vec<&[f32]> = primary.iter().filter_map(|&i| vectors[i]).collect();
    let best = if embedded.is_empty() {
        pool[0]
    } else {
        let dim = embedded[0].len();
        let mut centroid = vec![0f32; dim];
        for v in &embedded {
            for (c, x) in centroid.iter_mut().zip(v.iter()) {
                *c += x / embedded.len() as f32;
            }
        }
        let mut best = pool[0];
        let mut best_sim = f64::NEG_INFINITY;
        for &i in &pool {
            let sim = vectors[i].map_or(f64::NEG_INFINITY, |v| cosine(v, &centroid));
            if sim > best_sim + 1e-9 {
                best = i;
                best_sim = sim;
            }
        }
        best
    };
    Ok(candidates[best].word.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadata::embeddings::WordVectors;

    fn extract(instr: &[&str]) -> Result<String, ExtractError> {
        let v: Vec<String> = instr.iter().map(|s| s.to_string()).collect();
        extract_target_object(&v, &VerbLexicon::default(), &WordVectors::builtin(), DEFAULT_CLUSTER_CUT)
    }

    #[test]
    fn direct_object_wins() {
        assert_eq!(extract(&["pick up the red mug and place it on the plate"]).unwrap(), "mug");
    }

    #[test]
    fn no_verb() {
        assert_eq!(extract(&["wave hello"]), Err(ExtractError::NoVerbFound));
    }

    #[test]
    fn verb_without_object() {
        assert_eq!(extract(&["pick it up"]), Err(ExtractError::NoObjectFound));
    }

    #[test]
    fn merged_instructions_agree() {
        assert_eq!(extract(&["pick the marker", "put marker in cup"]).unwrap(), "marker");
    }

    #[test]
    fn candidates_in_order_with_roles() {
        let clauses = merge_instructions(&["put marker in cup".to_string()]);
        let c = object_candidates(&clauses, &VerbLexicon::default()).unwrap();
        assert_eq!(
            c,
            vec![
                Candidate { word: "marker".into(), role: Role::Direct },
                Candidate { word: "cup".into(), role: Role::Indirect },
            ]
        );
    }

    #[test]
    fn duplicate_clauses_are_merged_once() {
        let clauses = merge_instructions(&[
            "Pick the marker.".to_string(),
            "pick the marker and put it in the cup".to_string(),
        ]);
        assert_eq!(clauses.len(), 2);
    }

    #[test]
    fn inflections_and_particles() {
        assert_eq!(extract(&["Picked up the carrots, then dropped them in the bin"]).unwrap(), "carrot");
        assert_eq!(extract(&["turn on the stove"]).unwrap(), "stove");
        assert_eq!(extract(&["put the lid on the pot"]).unwrap(), "lid");
    }

    #[test]
    fn pronoun_direct_falls_back_to_indirect() {
        assert_eq!(extract(&["place it in the bin"]).unwrap(), "bin");
    }

    #[test]
    fn tool_of_a_contact_verb_is_the_object() {
        assert_eq!(extract(&["wipe the table with the sponge"]).unwrap(), "sponge");
        assert_eq!(extract(&["clean the plate using a towel"]).unwrap(), "towel");
        // not a contact verb: `with` is an attribute
        assert_eq!(extract(&["pick up the bowl with beans"]).unwrap(), "bowl");
    }

    #[test]
    fn trailing_direction_is_not_the_object() {
        assert_eq!(extract(&["push the green block forward"]).unwrap(), "block");
    }

    #[test]
    fn location_words_are_not_objects() {
        assert_eq!(extract(&["move the cup to the left side"]).unwrap(), "cup");
    }
}
