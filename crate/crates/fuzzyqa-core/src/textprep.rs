//! Linguistic preprocessing: tokenization, stop-word removal, POS tagging
//! and keyword extraction.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");
const DEFAULT_LEXICON: &str = include_str!("../data/tag_lexicon_en.txt");

/// Part-of-speech label attached to a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Other,
}

impl PosTag {
    /// Whether the tag survives keyword extraction.
    pub fn is_content(self) -> bool {
        matches!(self, PosTag::Noun | PosTag::Verb | PosTag::Adjective)
    }
}

/// A lowercased word with its position in the token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub position: usize,
    pub tag: PosTag,
}

/// A content keyword extracted from a tagged token stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keyword {
    pub lemma: String,
    pub tag: PosTag,
    /// Position of the source token.
    pub origin: usize,
}

#[derive(Debug, Error)]
pub enum TextprepError {
    #[error("lexicon line {line}: expected `word<TAB>TAG`, got {content:?}")]
    MalformedLexiconLine { line: usize, content: String },
    #[error("lexicon line {line}: unknown tag {tag:?} (expected NOUN, VERB or ADJ)")]
    UnknownTag { line: usize, tag: String },
}

/// Stop word set. Read-only after load.
#[derive(Debug, Clone)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    /// Parse a stoplist: one word per line, '#' comments and blank lines skipped.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        Stoplist { words }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for Stoplist {
    /// The bundled English list.
    fn default() -> Self {
        Stoplist::parse(DEFAULT_STOPWORDS)
    }
}

/// Word -> POS tag lookup table. Read-only after load.
#[derive(Debug, Clone)]
pub struct TagLexicon {
    tags: HashMap<String, PosTag>,
}

impl TagLexicon {
    /// Parse `word<TAB>TAG` lines with TAG in {NOUN, VERB, ADJ}.
    pub fn parse(text: &str) -> Result<Self, TextprepError> {
        let mut tags = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) =
                line.split_once('\t')
                    .ok_or_else(|| TextprepError::MalformedLexiconLine {
                        line: idx + 1,
                        content: raw.to_string(),
                    })?;
            let tag = match tag.trim() {
                "NOUN" => PosTag::Noun,
                "VERB" => PosTag::Verb,
                "ADJ" => PosTag::Adjective,
                other => {
                    return Err(TextprepError::UnknownTag {
                        line: idx + 1,
                        tag: other.to_string(),
                    })
                }
            };
            tags.insert(word.trim().to_lowercase(), tag);
        }
        Ok(TagLexicon { tags })
    }

    pub fn get(&self, word: &str) -> Option<PosTag> {
        self.tags.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.tags.contains_key(word)
    }
}

impl Default for TagLexicon {
    /// The bundled English lexicon.
    fn default() -> Self {
        TagLexicon::parse(DEFAULT_LEXICON).expect("bundled lexicon is well-formed")
    }
}

/// Split raw text into lowercased tokens: maximal runs of letters/digits,
/// in input order, tagged [`PosTag::Other`]. Empty input yields no tokens.
pub fn tokenize(raw: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in raw.chars() {
        if ch.is_alphanumeric() {
            for lc in ch.to_lowercase() {
                current.push(lc);
            }
        } else if !current.is_empty() {
            push_token(&mut tokens, &mut current);
        }
    }
    if !current.is_empty() {
        push_token(&mut tokens, &mut current);
    }
    tokens
}

fn push_token(tokens: &mut Vec<Token>, text: &mut String) {
    let position = tokens.len();
    tokens.push(Token {
        text: std::mem::take(text),
        position,
        tag: PosTag::Other,
    });
}

/// Drop tokens whose text is in the stoplist; order is preserved.
pub fn remove_stopwords(tokens: Vec<Token>, stoplist: &Stoplist) -> Vec<Token> {
    tokens
        .into_iter()
        .filter(|t| !stoplist.contains(&t.text))
        .collect()
}

/// Tag each token: lexicon lookup first, then suffix heuristics
/// ("-ing"/"-ed" verb, "-ous"/"-ful"/"-y" adjective), noun otherwise.
pub fn pos_tag(tokens: Vec<Token>, lexicon: &TagLexicon) -> Vec<Token> {
    tokens
        .into_iter()
        .map(|mut t| {
            t.tag = lexicon.get(&t.text).unwrap_or_else(|| heuristic_tag(&t.text));
            t
        })
        .collect()
}

fn heuristic_tag(word: &str) -> PosTag {
    for suffix in ["ing", "ed"] {
        if word.len() > suffix.len() && word.ends_with(suffix) {
            return PosTag::Verb;
        }
    }
    for suffix in ["ous", "ful", "y"] {
        if word.len() > suffix.len() && word.ends_with(suffix) {
            return PosTag::Adjective;
        }
    }
    PosTag::Noun
}

/// Keep noun/verb/adjective tokens as keywords, stripping plural "-es"/"-s"
/// when the stem has at least 3 characters and `known` recognizes it.
/// Duplicate lemmas collapse to the first occurrence.
pub fn extract_keywords<F>(tokens: &[Token], known: F) -> Vec<Keyword>
where
    F: Fn(&str) -> bool,
{
    let mut seen = HashSet::new();
    let mut keywords = Vec::new();
    for token in tokens {
        if !token.tag.is_content() {
            continue;
        }
        let lemma = strip_plural(&token.text, &known);
        if seen.insert(lemma.clone()) {
            keywords.push(Keyword {
                lemma,
                tag: token.tag,
                origin: token.position,
            });
        }
    }
    keywords
}

fn strip_plural<F: Fn(&str) -> bool>(text: &str, known: &F) -> String {
    for suffix in ["es", "s"] {
        if let Some(stem) = text.strip_suffix(suffix) {
            if stem.chars().count() >= 3 && known(stem) {
                return stem.to_string();
            }
        }
    }
    text.to_string()
}

/// The composed preprocessing pipeline: tokenize, drop stop words, tag,
/// extract keywords.
pub fn keywords_from_text<F>(
    raw: &str,
    stoplist: &Stoplist,
    lexicon: &TagLexicon,
    known: F,
) -> Vec<Keyword>
where
    F: Fn(&str) -> bool,
{
    let tokens = pos_tag(remove_stopwords(tokenize(raw), stoplist), lexicon);
    extract_keywords(&tokens, known)
}
