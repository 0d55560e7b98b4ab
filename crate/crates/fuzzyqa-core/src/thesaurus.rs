//! Synset storage and synonym-based query expansion.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::textprep::{Keyword, PosTag};

/// A group of interchangeable lemmas sharing one sense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synset {
    pub id: String,
    pub members: Vec<String>,
    pub tag: PosTag,
}

/// One concrete expansion of a keyword sequence: one lemma per original slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryVariant {
    pub lemmas: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ThesaurusError {
    #[error("synset line {line}: expected `ID TAG member1,member2,...`, got {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("synset line {line}: unknown tag {tag:?} (expected NOUN, VERB or ADJ)")]
    UnknownTag { line: usize, tag: String },
    #[error("synset line {line}: duplicate synset id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("synset line {line}: duplicate member {member:?} in synset {id:?}")]
    DuplicateMember { line: usize, id: String, member: String },
    #[error("synset line {line}: synset {id:?} has no members")]
    EmptySynset { line: usize, id: String },
}

/// Synsets indexed by member lemma. Read-only after load.
#[derive(Debug, Clone, Default)]
pub struct Thesaurus {
    /// Sorted by synset id so lookups enumerate deterministically.
    synsets: Vec<Synset>,
    by_lemma: HashMap<String, Vec<usize>>,
}

impl Thesaurus {
    /// Parse `ID<SPACE>TAG<SPACE>member1,member2,...` lines; '#' comments and
    /// blank lines are skipped. Members are lowercased.
    pub fn parse(text: &str) -> Result<Self, ThesaurusError> {
        let mut synsets = Vec::new();
        let mut ids = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = || ThesaurusError::MalformedLine {
                line: idx + 1,
                content: raw.to_string(),
            };
            let mut fields = line.splitn(3, ' ');
            let id = fields.next().ok_or_else(malformed)?.to_string();
            let tag = fields.next().ok_or_else(malformed)?;
            let members_field = fields.next().ok_or_else(malformed)?;
            let tag = match tag {
                "NOUN" => PosTag::Noun,
                "VERB" => PosTag::Verb,
                "ADJ" => PosTag::Adjective,
                other => {
                    return Err(ThesaurusError::UnknownTag {
                        line: idx + 1,
                        tag: other.to_string(),
                    })
                }
            };
            if !ids.insert(id.clone()) {
                return Err(ThesaurusError::DuplicateId { line: idx + 1, id });
            }
            let mut members = Vec::new();
            let mut member_set = HashSet::new();
            for member in members_field.split(',') {
                let member = member.trim().to_lowercase();
                if member.is_empty() {
                    return Err(malformed());
                }
                if !member_set.insert(member.clone()) {
                    return Err(ThesaurusError::DuplicateMember {
                        line: idx + 1,
                        id,
                        member,
                    });
                }
                members.push(member);
            }
            if members.is_empty() {
                return Err(ThesaurusError::EmptySynset { line: idx + 1, id });
            }
            synsets.push(Synset { id, members, tag });
        }

        synsets.sort_by(|a, b| a.id.cmp(&b.id));
        let mut by_lemma: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, synset) in synsets.iter().enumerate() {
            for member in &synset.members {
                by_lemma.entry(member.clone()).or_default().push(i);
            }
        }
        Ok(Thesaurus { synsets, by_lemma })
    }

    pub fn synsets(&self) -> &[Synset] {
        &self.synsets
    }

    /// Whether any synset contains the lemma.
    pub fn contains(&self, lemma: &str) -> bool {
        self.by_lemma.contains_key(lemma)
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    /// All synonyms of `lemma` (excluding the lemma itself), in synset-id
    /// order then member order, deduplicated. Unknown lemmas yield nothing.
    pub fn synonyms(&self, lemma: &str, tag: Option<PosTag>) -> Vec<String> {
        let Some(indices) = self.by_lemma.get(lemma) else {
            return Vec::new();
        };
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for &i in indices {
            let synset = &self.synsets[i];
            if tag.is_some_and(|t| t != synset.tag) {
                continue;
            }
            for member in &synset.members {
                if member != lemma && seen.insert(member.clone()) {
                    out.push(member.clone());
                }
            }
        }
        out
    }
}

/// Enumerate the Cartesian product of per-slot choices
/// `{original} ∪ synonyms(original)`, last slot varying fastest, truncated at
/// `cap`. The all-original variant always comes first.
pub fn expand_query(keywords: &[Keyword], thesaurus: &Thesaurus, cap: usize) -> Vec<QueryVariant> {
    let cap = cap.max(1);
    let slots: Vec<Vec<String>> = keywords
        .iter()
        .map(|k| {
            let mut options = vec![k.lemma.clone()];
            options.extend(
                thesaurus
                    .synonyms(&k.lemma, None)
                    .into_iter()
                    .filter(|s| *s != k.lemma),
            );
            options
        })
        .collect();

    let mut variants = Vec::new();
    let mut choice = vec![0usize; slots.len()];
    loop {
        variants.push(QueryVariant {
            lemmas: choice
                .iter()
                .zip(&slots)
                .map(|(&i, options)| options[i].clone())
                .collect(),
        });
        if variants.len() >= cap {
            return variants;
        }
        // Odometer increment; carry from the last slot toward the first.
        let mut slot = slots.len();
        loop {
            if slot == 0 {
                return variants;
            }
            slot -= 1;
            choice[slot] += 1;
            if choice[slot] < slots[slot].len() {
                break;
            }
            choice[slot] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textprep::{keywords_from_text, Stoplist, TagLexicon};

    const FIXTURE: &str = "\
# two senses of sweet plus a noun synset
a1 ADJ sweet,kindly,sugary
a2 ADJ sweet,melodious,musical
n1 NOUN bloom,blossom
";

    fn keyword(lemma: &str) -> Keyword {
        Keyword {
            lemma: lemma.to_string(),
            tag: PosTag::Noun,
            origin: 0,
        }
    }

    #[test]
    fn parse_single_line() {
        let t = Thesaurus::parse("S1 NOUN sweet,sugary").unwrap();
        assert_eq!(t.synsets().len(), 1);
        assert_eq!(t.synsets()[0].members, vec!["sweet", "sugary"]);
    }

    #[test]
    fn parse_empty_stream() {
        let t = Thesaurus::parse("").unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn parse_singleton_synset() {
        let t = Thesaurus::parse("S1 NOUN lone").unwrap();
        assert_eq!(t.synsets()[0].members.len(), 1);
    }

    #[test]
    fn parse_rejects_malformed_line_with_number() {
        let err = Thesaurus::parse("S1 NOUN ok,fine\nS2 NOUN\n").unwrap_err();
        assert!(matches!(err, ThesaurusError::MalformedLine { line: 2, .. }));
    }

    #[test]
    fn parse_rejects_duplicate_id() {
        let err = Thesaurus::parse("S1 NOUN a,b\nS1 NOUN c,d\n").unwrap_err();
        assert!(matches!(err, ThesaurusError::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn parse_rejects_duplicate_member() {
        let err = Thesaurus::parse("S1 NOUN a,a\n").unwrap_err();
        assert!(matches!(err, ThesaurusError::DuplicateMember { line: 1, .. }));
    }

    #[test]
    fn synonyms_of_sweet_in_synset_order() {
        let t = Thesaurus::parse(FIXTURE).unwrap();
        assert_eq!(
            t.synonyms("sweet", None),
            vec!["kindly", "sugary", "melodious", "musical"]
        );
    }

    #[test]
    fn synonyms_unknown_word_is_empty() {
        let t = Thesaurus::parse(FIXTURE).unwrap();
        assert!(t.synonyms("ravi", None).is_empty());
    }

    #[test]
    fn synonyms_shared_member_listed_once() {
        let t = Thesaurus::parse("S1 NOUN hill,mound\nS2 NOUN hill,mound,knoll\n").unwrap();
        assert_eq!(t.synonyms("hill", None), vec!["mound", "knoll"]);
    }

    #[test]
    fn synonyms_tag_filter() {
        let t = Thesaurus::parse(FIXTURE).unwrap();
        assert!(t.synonyms("sweet", Some(PosTag::Noun)).is_empty());
        assert_eq!(t.synonyms("bloom", Some(PosTag::Noun)), vec!["blossom"]);
    }

    #[test]
    fn synonyms_symmetric_within_synsets() {
        let t = Thesaurus::parse(FIXTURE).unwrap();
        for synset in t.synsets() {
            for a in &synset.members {
                for b in &synset.members {
                    if a != b {
                        assert!(
                            t.synonyms(a, None).contains(b),
                            "{b} missing from synonyms({a})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn expand_two_slot_product() {
        let t = Thesaurus::parse("n1 NOUN blossom,flower").unwrap();
        let keywords = vec![keyword("painting"), keyword("blossom")];
        let variants = expand_query(&keywords, &t, 256);
        assert_eq!(variants.len(), 2);
        assert_eq!(variants[0].lemmas, vec!["painting", "blossom"]);
        assert_eq!(variants[1].lemmas, vec!["painting", "flower"]);
    }

    #[test]
    fn expand_without_synonyms_is_identity() {
        let t = Thesaurus::parse("").unwrap();
        let keywords = vec![keyword("painting"), keyword("ravi")];
        let variants = expand_query(&keywords, &t, 256);
        assert_eq!(variants.len(), 1);
        assert_eq!(variants[0].lemmas, vec!["painting", "ravi"]);
    }

    #[test]
    fn expand_product_cardinality_and_cap() {
        // Slot sizes 1, 2 and 4: full product is 8.
        let t = Thesaurus::parse("s1 NOUN b,b2\ns2 NOUN c,c2,c3,c4\n").unwrap();
        let keywords = vec![keyword("a"), keyword("b"), keyword("c")];
        assert_eq!(expand_query(&keywords, &t, 256).len(), 8);
        let capped = expand_query(&keywords, &t, 3);
        assert_eq!(capped.len(), 3);
        assert_eq!(capped[0].lemmas, vec!["a", "b", "c"]);
    }

    #[test]
    fn expand_counts_match_synonym_sets() {
        let t = Thesaurus::parse(FIXTURE).unwrap();
        let stoplist = Stoplist::default();
        let lexicon = TagLexicon::default();
        let keywords = keywords_from_text("sweet tea", &stoplist, &lexicon, |w| {
            lexicon.contains(w) || t.contains(w)
        });
        let expected: usize = keywords
            .iter()
            .map(|k| 1 + t.synonyms(&k.lemma, None).len())
            .product();
        assert_eq!(expected, 5); // sweet has 4 synonyms, tea none
        assert_eq!(expand_query(&keywords, &t, 256).len(), expected);
    }
}
