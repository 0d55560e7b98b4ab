//! Two-level fuzzy scale: type-1 document membership, interval type-2 word
//! membership bands, score computation and answer prioritization.

use std::collections::HashMap;

use thiserror::Error;

use crate::textprep::Keyword;

/// Membership grade assumed when a word has no sense-bank entry.
pub const UNKNOWN_WORD_MEMBERSHIP: f64 = 0.5;

#[derive(Debug, Error)]
pub enum FuzzyScaleError {
    #[error("membership grade {value} outside [0, 1]")]
    GradeOutOfRange { value: f64 },
    #[error("invalid interval [{lower}, {upper}]: need 0 <= lower <= upper <= 1")]
    InvalidInterval { lower: f64, upper: f64 },
    #[error("sense bank line {line}: expected `lemma<TAB>lower<TAB>upper<TAB>senses`, got {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("sense bank line {line}: duplicate lemma {lemma:?}")]
    DuplicateLemma { line: usize, lemma: String },
    #[error("sense bank line {line}: sense {sense:?} point {point} outside band [{lower}, {upper}]")]
    PointOutsideBand {
        line: usize,
        sense: String,
        point: f64,
        lower: f64,
        upper: f64,
    },
    #[error("document count must be at least 1")]
    ZeroDocuments,
}

/// Crisp membership grade in [0, 1] (level 1 of the scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Type1Membership(f64);

impl Type1Membership {
    pub fn new(mu: f64) -> Result<Self, FuzzyScaleError> {
        if (0.0..=1.0).contains(&mu) {
            Ok(Type1Membership(mu))
        } else {
            Err(FuzzyScaleError::GradeOutOfRange { value: mu })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Interval type-2 membership band with a uniform footprint of uncertainty
/// (level 2 of the scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalType2Membership {
    lower: f64,
    upper: f64,
}

impl IntervalType2Membership {
    pub fn new(lower: f64, upper: f64) -> Result<Self, FuzzyScaleError> {
        if (0.0..=1.0).contains(&lower) && lower <= upper && upper <= 1.0 {
            Ok(IntervalType2Membership { lower, upper })
        } else {
            Err(FuzzyScaleError::InvalidInterval { lower, upper })
        }
    }

    /// Zero-width band: type-2 collapsed to type-1.
    pub fn degenerate(value: f64) -> Result<Self, FuzzyScaleError> {
        Self::new(value, value)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }
}

/// Collapse a band to its centroid, the midpoint of the uniform footprint.
pub fn reduce(interval: &IntervalType2Membership) -> Type1Membership {
    Type1Membership(midpoint(interval.lower, interval.upper))
}

/// Correctly rounded midpoint of two nonnegative grades. Exact half-ULP ties
/// resolve upward so decimal-authored bands hit their decimal midpoint
/// (e.g. [0.61, 0.69] -> 0.65); a zero-width band returns its bound bit-exactly.
fn midpoint(a: f64, b: f64) -> f64 {
    let sum = a + b;
    // TwoSum residual: sum + err == a + b exactly.
    let shifted = sum - a;
    let err = (a - (sum - shifted)) + (b - shifted);
    let half = sum / 2.0;
    let half_err = err / 2.0;
    let mid = half + half_err;
    // Fast2Sum residual of the final addition (|half| >= |half_err|):
    // exact midpoint == mid + rest.
    let rest = (half - mid) + half_err;
    if rest > 0.0 {
        let above = f64::from_bits(mid.to_bits() + 1);
        if 2.0 * rest == above - mid {
            return above;
        }
    }
    mid
}

/// One disambiguated sense of a word, pinned to a point inside its band.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSense {
    pub lemma: String,
    pub label: String,
    pub point: f64,
    pub cues: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
struct SenseEntry {
    interval: IntervalType2Membership,
    senses: Vec<WordSense>,
}

/// Word membership bands with optional cue-word senses. Read-only after load.
#[derive(Debug, Clone, Default)]
pub struct SenseBank {
    entries: HashMap<String, SenseEntry>,
}

impl SenseBank {
    /// Parse `lemma<TAB>lower<TAB>upper<TAB>sense:point:cue1|cue2,...` lines;
    /// '#' comments and blank lines are skipped. Sense points must lie within
    /// the band.
    pub fn parse(text: &str) -> Result<Self, FuzzyScaleError> {
        let mut entries = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let malformed = || FuzzyScaleError::MalformedLine {
                line: idx + 1,
                content: raw.to_string(),
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(malformed());
            }
            let lemma = fields[0].trim().to_lowercase();
            let lower: f64 = fields[1].trim().parse().map_err(|_| malformed())?;
            let upper: f64 = fields[2].trim().parse().map_err(|_| malformed())?;
            let interval = IntervalType2Membership::new(lower, upper)?;
            let mut senses = Vec::new();
            if !fields[3].trim().is_empty() {
                for spec in fields[3].split(',') {
                    let mut parts = spec.splitn(3, ':');
                    let label = parts.next().ok_or_else(malformed)?.trim().to_string();
                    let point: f64 = parts
                        .next()
                        .ok_or_else(malformed)?
                        .trim()
                        .parse()
                        .map_err(|_| malformed())?;
                    let cues: Vec<String> = parts
                        .next()
                        .map(|c| {
                            c.split('|')
                                .map(|w| w.trim().to_lowercase())
                                .filter(|w| !w.is_empty())
                                .collect()
                        })
                        .unwrap_or_default();
                    if label.is_empty() {
                        return Err(malformed());
                    }
                    if !(lower..=upper).contains(&point) {
                        return Err(FuzzyScaleError::PointOutsideBand {
                            line: idx + 1,
                            sense: label,
                            point,
                            lower,
                            upper,
                        });
                    }
                    senses.push(WordSense {
                        lemma: lemma.clone(),
                        label,
                        point,
                        cues,
                    });
                }
            }
            if entries
                .insert(lemma.clone(), SenseEntry { interval, senses })
                .is_some()
            {
                return Err(FuzzyScaleError::DuplicateLemma { line: idx + 1, lemma });
            }
        }
        Ok(SenseBank { entries })
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.entries.contains_key(lemma)
    }

    /// The word's membership band plus the sense best matching the context
    /// (maximal cue overlap, ties to the first listed). Unknown words get the
    /// degenerate default band.
    pub fn word_membership(
        &self,
        lemma: &str,
        context: &[Keyword],
    ) -> (IntervalType2Membership, Option<WordSense>) {
        match self.entries.get(lemma) {
            Some(entry) => {
                let chosen = entry
                    .senses
                    .iter()
                    .enumerate()
                    .map(|(i, sense)| {
                        let overlap = sense
                            .cues
                            .iter()
                            .filter(|cue| context.iter().any(|k| k.lemma == **cue))
                            .count();
                        (overlap, i, sense)
                    })
                    // max_by_key picks the last maximum; invert the index so
                    // ties go to the first listed sense.
                    .max_by_key(|&(overlap, i, _)| (overlap, usize::MAX - i))
                    .map(|(_, _, sense)| sense.clone());
                (entry.interval, chosen)
            }
            None => {
                let band = IntervalType2Membership::degenerate(UNKNOWN_WORD_MEMBERSHIP)
                    .expect("default grade is in range");
                (band, None)
            }
        }
    }
}

/// `(doc_mu + mean of reduced word bands) / doc_count`. An empty word list
/// contributes 0; the result is a ranking value, not itself a membership.
pub fn score(
    doc_mu: Type1Membership,
    word_intervals: &[IntervalType2Membership],
    doc_count: usize,
) -> Result<f64, FuzzyScaleError> {
    if doc_count == 0 {
        return Err(FuzzyScaleError::ZeroDocuments);
    }
    let word_term = if word_intervals.is_empty() {
        0.0
    } else {
        word_intervals.iter().map(|iv| reduce(iv).value()).sum::<f64>()
            / word_intervals.len() as f64
    };
    Ok((doc_mu.value() + word_term) / doc_count as f64)
}

/// Similarity of one query keyword against a candidate document.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordMatch {
    pub keyword: String,
    pub similarity: f64,
}

/// A candidate document with its ranking score and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredAnswer {
    pub doc_id: u32,
    pub score: f64,
    pub cluster: usize,
    pub doc_mu: f64,
    pub breakdown: Vec<KeywordMatch>,
}

/// Order candidates by descending score, ties by ascending doc id. Stable.
pub fn rank(mut candidates: Vec<ScoredAnswer>) -> Vec<ScoredAnswer> {
    candidates.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
    candidates
}
