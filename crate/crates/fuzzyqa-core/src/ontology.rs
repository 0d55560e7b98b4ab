//! Rooted is-a taxonomy with edge-count similarity.
//!
//! Similarity between two concepts is `(e^{x·d} − 1) / (e^{x·d} + e^{y·S} − 2)`
//! where `d` is the tree depth, `S` the shortest path length in edges between
//! the concepts (undirected, through the common subsumer), and `x`, `y` are
//! smoothing factors. Identical concepts score exactly 1; the value decays
//! toward 0 as `S` grows.

use std::collections::HashMap;

use thiserror::Error;

use crate::thesaurus::Thesaurus;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("taxonomy line {line}: expected `child<TAB>parent` or a bare label, got {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("taxonomy line {line}: concept {child:?} already has a parent")]
    DuplicateChild { line: usize, child: String },
    #[error("taxonomy contains a cycle through {concept:?}")]
    Cycle { concept: String },
    #[error("taxonomy is empty")]
    Empty,
    #[error("taxonomy has multiple roots (at least {first:?} and {second:?})")]
    MultipleRoots { first: String, second: String },
    #[error("unknown term {term:?}")]
    UnknownTerm { term: String },
    #[error("degenerate taxonomy: depth is 0, similarity is undefined")]
    DegenerateTaxonomy,
    #[error("smoothing factors must be positive (got x={x}, y={y})")]
    InvalidParams { x: f64, y: f64 },
}

/// Smoothing factors for the edge-count similarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityParams {
    x: f64,
    y: f64,
}

impl SimilarityParams {
    pub fn new(x: f64, y: f64) -> Result<Self, TaxonomyError> {
        if x > 0.0 && y > 0.0 {
            Ok(SimilarityParams { x, y })
        } else {
            Err(TaxonomyError::InvalidParams { x, y })
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

impl Default for SimilarityParams {
    fn default() -> Self {
        SimilarityParams { x: 0.5, y: 0.6 }
    }
}

/// Depth and path length underlying one similarity value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStats {
    /// Maximum root-to-leaf edge count of the whole tree.
    pub depth: usize,
    /// Shortest path length in edges between the two concepts.
    pub path_len: usize,
}

/// A rooted single-tree is-a hierarchy. Immutable after load.
#[derive(Debug, Clone, PartialEq)]
pub struct Taxonomy {
    parent: HashMap<String, String>,
    /// Edge count from the root, per concept.
    level: HashMap<String, usize>,
    /// Concept labels in sorted order.
    concepts: Vec<String>,
    root: String,
    depth: usize,
}

impl Taxonomy {
    /// Parse `child<TAB>parent` lines ('#' comments allowed; labels are
    /// lowercased). A bare `label` line declares a concept without a parent.
    /// The unique parentless concept becomes the root.
    pub fn parse(text: &str) -> Result<Self, TaxonomyError> {
        let mut parent: HashMap<String, String> = HashMap::new();
        let mut concepts: Vec<String> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut note = |label: &str, concepts: &mut Vec<String>| {
            if seen.insert(label.to_string()) {
                concepts.push(label.to_string());
            }
        };
        for (idx, raw) in text.lines().enumerate() {
            // Trim spaces and carriage returns but keep tabs: a dangling tab
            // is a malformed edge, not a bare label.
            let line = raw.trim_matches(|c| c == ' ' || c == '\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = || TaxonomyError::MalformedLine {
                line: idx + 1,
                content: raw.to_string(),
            };
            match line.split_once('\t') {
                Some((child, par)) => {
                    let child = child.trim().to_lowercase();
                    let par = par.trim().to_lowercase();
                    if child.is_empty()
                        || par.is_empty()
                        || child == par
                        || child.contains(char::is_whitespace)
                        || par.contains(char::is_whitespace)
                    {
                        return Err(malformed());
                    }
                    if parent.insert(child.clone(), par.clone()).is_some() {
                        return Err(TaxonomyError::DuplicateChild {
                            line: idx + 1,
                            child,
                        });
                    }
                    note(&child, &mut concepts);
                    note(&par, &mut concepts);
                }
                None => {
                    let label = line.trim().to_lowercase();
                    if label.contains(char::is_whitespace) {
                        return Err(malformed());
                    }
                    note(&label, &mut concepts);
                }
            }
        }
        if concepts.is_empty() {
            return Err(TaxonomyError::Empty);
        }

        // Walk every parent chain once; a revisit within the active chain is
        // a cycle, and chain lengths double as root-distance levels.
        let mut level: HashMap<String, usize> = HashMap::new();
        let mut roots: Vec<String> = Vec::new();
        for concept in &concepts {
            let mut chain = Vec::new();
            let mut cursor = concept.clone();
            while !level.contains_key(&cursor) {
                if chain.contains(&cursor) {
                    return Err(TaxonomyError::Cycle { concept: cursor });
                }
                chain.push(cursor.clone());
                match parent.get(&cursor) {
                    Some(par) => cursor = par.clone(),
                    None => {
                        if !roots.contains(&cursor) {
                            roots.push(cursor.clone());
                        }
                        level.insert(cursor.clone(), 0);
                        chain.pop();
                        break;
                    }
                }
            }
            let mut depth = level[&cursor];
            for node in chain.into_iter().rev() {
                depth += 1;
                level.insert(node, depth);
            }
        }
        if roots.len() > 1 {
            let mut sorted = roots.clone();
            sorted.sort();
            return Err(TaxonomyError::MultipleRoots {
                first: sorted[0].clone(),
                second: sorted[1].clone(),
            });
        }
        let root = roots.pop().expect("acyclic parent chains end at a root");
        let depth = level.values().copied().max().unwrap_or(0);
        concepts.sort();
        Ok(Taxonomy {
            parent,
            level,
            concepts,
            root,
            depth,
        })
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    /// Maximum root-to-leaf edge count; computed once at load.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn contains(&self, concept: &str) -> bool {
        self.level.contains_key(concept)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> {
        self.concepts.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn parent_of(&self, concept: &str) -> Option<&str> {
        self.parent.get(concept).map(String::as_str)
    }

    /// Shortest path in edges between two concepts, routed up through their
    /// lowest common subsumer.
    pub fn shortest_path(&self, t1: &str, t2: &str) -> Result<usize, TaxonomyError> {
        let unknown = |term: &str| TaxonomyError::UnknownTerm {
            term: term.to_string(),
        };
        if !self.contains(t1) {
            return Err(unknown(t1));
        }
        if !self.contains(t2) {
            return Err(unknown(t2));
        }
        // Ancestors of t1 with their distance from t1.
        let mut from_t1: HashMap<&str, usize> = HashMap::new();
        let mut cursor = t1;
        let mut steps = 0;
        loop {
            from_t1.insert(cursor, steps);
            match self.parent.get(cursor) {
                Some(par) => {
                    cursor = par;
                    steps += 1;
                }
                None => break,
            }
        }
        let mut cursor = t2;
        let mut steps = 0;
        loop {
            if let Some(&up) = from_t1.get(cursor) {
                return Ok(up + steps);
            }
            match self.parent.get(cursor) {
                Some(par) => {
                    cursor = par;
                    steps += 1;
                }
                None => unreachable!("both chains end at the single root"),
            }
        }
    }

    /// Tree depth and shortest path length for a concept pair.
    pub fn path_stats(&self, t1: &str, t2: &str) -> Result<PathStats, TaxonomyError> {
        Ok(PathStats {
            depth: self.depth,
            path_len: self.shortest_path(t1, t2)?,
        })
    }

    /// Edge-count similarity between two concepts, in (0, 1].
    pub fn similarity(
        &self,
        t1: &str,
        t2: &str,
        params: &SimilarityParams,
    ) -> Result<f64, TaxonomyError> {
        let path_len = self.shortest_path(t1, t2)?;
        if self.depth == 0 {
            return Err(TaxonomyError::DegenerateTaxonomy);
        }
        Ok(edge_count_similarity(self.depth, path_len, params))
    }
}

/// The similarity formula on raw depth/path values. `path_len == 0` returns
/// exactly 1 (the numerator and denominator coincide algebraically).
pub fn edge_count_similarity(depth: usize, path_len: usize, params: &SimilarityParams) -> f64 {
    if path_len == 0 {
        return 1.0;
    }
    let grown = (params.x * depth as f64).exp();
    (grown - 1.0) / (grown + (params.y * path_len as f64).exp() - 2.0)
}

/// Resolve a lemma to a taxonomy concept: the lemma itself if present,
/// otherwise its first synonym (in deterministic thesaurus order) naming a
/// concept, otherwise nothing.
pub fn term_to_concept(lemma: &str, taxonomy: &Taxonomy, thesaurus: &Thesaurus) -> Option<String> {
    if taxonomy.contains(lemma) {
        return Some(lemma.to_string());
    }
    thesaurus
        .synonyms(lemma, None)
        .into_iter()
        .find(|s| taxonomy.contains(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANT: &str = "irises\tplant\nblossom\tirises\n";

    fn plant_taxonomy() -> Taxonomy {
        Taxonomy::parse(PLANT).unwrap()
    }

    #[test]
    fn parse_infers_root_and_depth() {
        let t = plant_taxonomy();
        assert_eq!(t.root(), "plant");
        assert_eq!(t.depth(), 2);
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn parse_single_edge() {
        let t = Taxonomy::parse("a\tb").unwrap();
        assert_eq!(t.root(), "b");
        assert_eq!(t.depth(), 1);
    }

    #[test]
    fn parse_detects_cycle() {
        let err = Taxonomy::parse("a\tb\nb\ta\n").unwrap_err();
        assert!(matches!(err, TaxonomyError::Cycle { .. }));
    }

    #[test]
    fn parse_detects_multiple_roots() {
        let err = Taxonomy::parse("a\tb\nc\td\n").unwrap_err();
        assert!(matches!(err, TaxonomyError::MultipleRoots { .. }));
    }

    #[test]
    fn parse_rejects_duplicate_child() {
        let err = Taxonomy::parse("a\tb\na\tc\n").unwrap_err();
        assert!(matches!(err, TaxonomyError::DuplicateChild { line: 2, .. }));
    }

    #[test]
    fn parse_rejects_dangling_tab_and_spaced_labels() {
        let err = Taxonomy::parse("a\tb\nbroken\t\n").unwrap_err();
        assert!(matches!(err, TaxonomyError::MalformedLine { line: 2, .. }));
        let err = Taxonomy::parse("two words\n").unwrap_err();
        assert!(matches!(err, TaxonomyError::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn parse_rejects_empty_input() {
        assert!(matches!(Taxonomy::parse(""), Err(TaxonomyError::Empty)));
    }

    #[test]
    fn parse_lowercases_labels() {
        let t = Taxonomy::parse("Blossom\tIrises\nirises\tPLANT\n").unwrap();
        assert!(t.contains("blossom"));
        assert_eq!(t.root(), "plant");
    }

    #[test]
    fn root_only_taxonomy_has_depth_zero() {
        let t = Taxonomy::parse("plant\n").unwrap();
        assert_eq!(t.depth(), 0);
        assert_eq!(t.root(), "plant");
    }

    #[test]
    fn depth_of_chain() {
        let t = Taxonomy::parse("d\tc\nc\tb\nb\ta\n").unwrap();
        assert_eq!(t.depth(), 3);
    }

    #[test]
    fn shortest_path_identity_edge_and_siblings() {
        let t = plant_taxonomy();
        assert_eq!(t.shortest_path("irises", "irises").unwrap(), 0);
        assert_eq!(t.shortest_path("blossom", "irises").unwrap(), 1);
        let siblings = Taxonomy::parse("left\troot\nright\troot\n").unwrap();
        assert_eq!(siblings.shortest_path("left", "right").unwrap(), 2);
    }

    #[test]
    fn shortest_path_unknown_term() {
        let t = plant_taxonomy();
        let err = t.shortest_path("blossom", "ravi").unwrap_err();
        assert!(matches!(err, TaxonomyError::UnknownTerm { term } if term == "ravi"));
    }

    #[test]
    fn shortest_path_is_symmetric_and_triangular() {
        let t = Taxonomy::parse("b\ta\nc\ta\nd\tb\ne\tb\nf\tc\n").unwrap();
        let concepts: Vec<&str> = t.concepts().collect();
        for &p in &concepts {
            for &q in &concepts {
                let pq = t.shortest_path(p, q).unwrap();
                assert_eq!(pq, t.shortest_path(q, p).unwrap());
                for &r in &concepts {
                    let pr = t.shortest_path(p, r).unwrap();
                    let rq = t.shortest_path(r, q).unwrap();
                    assert!(pq <= pr + rq, "triangle violated for {p},{q} via {r}");
                }
            }
        }
    }

    #[test]
    fn similarity_identity_is_exactly_one() {
        let t = plant_taxonomy();
        let params = SimilarityParams::default();
        for concept in t.concepts() {
            assert_eq!(t.similarity(concept, concept, &params).unwrap(), 1.0);
        }
    }

    #[test]
    fn similarity_golden_values() {
        // d=3, x=0.5, y=0.6; expectations frozen from a high-precision
        // evaluation of the formula.
        let params = SimilarityParams::new(0.5, 0.6).unwrap();
        let at_s2 = edge_count_similarity(3, 2, &params);
        let at_s1 = edge_count_similarity(3, 1, &params);
        assert!((at_s2 - 0.600104359659).abs() < 1e-9, "got {at_s2}");
        assert!((at_s1 - 0.808978740435).abs() < 1e-9, "got {at_s1}");
        assert!(at_s1 > at_s2);
    }

    #[test]
    fn similarity_fixture_value() {
        let t = plant_taxonomy();
        let params = SimilarityParams::default();
        let got = t.similarity("blossom", "irises", &params).unwrap();
        assert!((got - 0.676382224499).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn similarity_decays_toward_zero_for_distant_terms() {
        let params = SimilarityParams::default();
        assert!(edge_count_similarity(3, 1000, &params) < 1e-12);
    }

    #[test]
    fn similarity_strictly_decreasing_in_path_len() {
        let params = SimilarityParams::default();
        let mut previous = f64::INFINITY;
        for s in 0..12 {
            let value = edge_count_similarity(4, s, &params);
            assert!(value < previous, "not strictly decreasing at S={s}");
            assert!(value > 0.0 && value <= 1.0);
            previous = value;
        }
    }

    #[test]
    fn similarity_symmetric_over_fixture_pairs() {
        let t = Taxonomy::parse("b\ta\nc\ta\nd\tb\ne\tc\n").unwrap();
        let params = SimilarityParams::default();
        let concepts: Vec<&str> = t.concepts().collect();
        for &p in &concepts {
            for &q in &concepts {
                assert_eq!(
                    t.similarity(p, q, &params).unwrap(),
                    t.similarity(q, p, &params).unwrap()
                );
            }
        }
    }

    #[test]
    fn similarity_rejects_degenerate_taxonomy() {
        let t = Taxonomy::parse("plant\n").unwrap();
        let err = t
            .similarity("plant", "plant", &SimilarityParams::default())
            .unwrap_err();
        assert!(matches!(err, TaxonomyError::DegenerateTaxonomy));
    }

    #[test]
    fn params_must_be_positive() {
        assert!(SimilarityParams::new(0.0, 0.6).is_err());
        assert!(SimilarityParams::new(0.5, -1.0).is_err());
        assert!(SimilarityParams::new(0.5, 0.6).is_ok());
    }

    #[test]
    fn term_to_concept_lookup() {
        let t = plant_taxonomy();
        let thesaurus = Thesaurus::parse("n1 NOUN bloom,blossom\n").unwrap();
        assert_eq!(
            term_to_concept("irises", &t, &thesaurus),
            Some("irises".to_string())
        );
        assert_eq!(
            term_to_concept("bloom", &t, &thesaurus),
            Some("blossom".to_string())
        );
        assert_eq!(term_to_concept("ravi", &t, &thesaurus), None);
    }
}
