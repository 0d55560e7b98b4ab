//! Pipeline orchestration: corpus indexing, question answering and index
//! persistence.
//!
//! Indexing extracts keywords per document, builds the tf-idf matrix and fits
//! the co-cluster model once; answering preprocesses the question, expands it
//! with synonyms, gates candidates by taxonomy similarity and ranks them with
//! the fuzzy scale.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cocluster::{
    build_matrix, fit, CoClusterConfig, CoClusterError, CoClusterModel, PruneReport,
    TermDocMatrix, Variant,
};
use crate::fuzzyscale::{
    rank, score, FuzzyScaleError, KeywordMatch, ScoredAnswer, SenseBank, Type1Membership,
};
use crate::ontology::{term_to_concept, SimilarityParams, Taxonomy, TaxonomyError};
use crate::textprep::{keywords_from_text, Stoplist, TagLexicon};
use crate::thesaurus::{expand_query, QueryVariant, Thesaurus};

const INDEX_HEADER: &str = "fuzzyqa-index v1";

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("duplicate document id {id}")]
    DuplicateDocId { id: u32 },
    #[error("document {id} has an empty body")]
    EmptyDocument { id: u32 },
    #[error("cannot read corpus entry {path}: {source}")]
    CorpusIo {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("question has no keywords after stop-word removal")]
    EmptyQuestion,
    #[error("index line {line}: {reason}")]
    IndexParse { line: usize, reason: String },
    #[error("unsupported index version {found:?} (expected {INDEX_HEADER:?})")]
    VersionMismatch { found: String },
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    CoCluster(#[from] CoClusterError),
    #[error(transparent)]
    FuzzyScale(#[from] FuzzyScaleError),
}

/// One corpus document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: u32,
    pub title: String,
    pub body: String,
}

/// An ordered, id-unique document collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self, EngineError> {
        if documents.is_empty() {
            return Err(EngineError::EmptyCorpus);
        }
        let mut ids = HashSet::new();
        for doc in &documents {
            if !ids.insert(doc.id) {
                return Err(EngineError::DuplicateDocId { id: doc.id });
            }
            if doc.body.trim().is_empty() {
                return Err(EngineError::EmptyDocument { id: doc.id });
            }
        }
        Ok(Corpus { documents })
    }

    /// Load every `*.txt` file in a directory as one document. Files are
    /// sorted by name; ids follow sorted order and titles are the file stems.
    pub fn from_dir(dir: &Path) -> Result<Self, EngineError> {
        let entries = std::fs::read_dir(dir).map_err(|source| EngineError::CorpusIo {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "txt"))
            .collect();
        paths.sort();
        let mut documents = Vec::new();
        for (i, path) in paths.iter().enumerate() {
            let body = std::fs::read_to_string(path).map_err(|source| EngineError::CorpusIo {
                path: path.clone(),
                source,
            })?;
            let title = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
                .replace(['\t', '\n', '\r'], " ");
            documents.push(Document {
                id: i as u32,
                title,
                body,
            });
        }
        Corpus::new(documents)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

/// Stoplist and tag lexicon used for preprocessing. Defaults to the bundled
/// English resources.
#[derive(Debug, Clone, Default)]
pub struct TextResources {
    pub stoplist: Stoplist,
    pub lexicon: TagLexicon,
}

/// Knobs for building an index.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub cocluster: CoClusterConfig,
    pub similarity: SimilarityParams,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            cocluster: CoClusterConfig::default(),
            similarity: SimilarityParams::default(),
        }
    }
}

/// The configuration and input digests an index was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    pub variant: Variant,
    pub clusters: usize,
    pub seed: u64,
    pub tu: f64,
    pub tv: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub x: f64,
    pub y: f64,
    pub taxonomy_digest: String,
    pub thesaurus_digest: String,
}

/// Display metadata for one indexed document (row order = matrix row order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocEntry {
    pub id: u32,
    pub title: String,
}

/// A built index: matrix, fitted model, doc table and fingerprint.
#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    pub matrix: TermDocMatrix,
    pub model: CoClusterModel,
    pub docs: Vec<DocEntry>,
    pub fingerprint: Fingerprint,
}

impl Index {
    pub fn vocabulary(&self) -> &[String] {
        self.matrix.vocab()
    }

    /// Lemmas present in a document (nonzero matrix entries of its row).
    pub fn doc_lemmas(&self, row: usize) -> Vec<&str> {
        self.matrix
            .row(row)
            .iter()
            .enumerate()
            .filter(|(_, &weight)| weight > 0.0)
            .map(|(j, _)| self.matrix.vocab()[j].as_str())
            .collect()
    }

    /// Warnings when the provided taxonomy/thesaurus differ from the ones the
    /// index was built against.
    pub fn digest_warnings(&self, taxonomy: &Taxonomy, thesaurus: &Thesaurus) -> Vec<String> {
        let mut warnings = Vec::new();
        if taxonomy_digest(taxonomy) != self.fingerprint.taxonomy_digest {
            warnings.push("taxonomy differs from the one this index was built with".to_string());
        }
        if thesaurus_digest(thesaurus) != self.fingerprint.thesaurus_digest {
            warnings.push("thesaurus differs from the one this index was built with".to_string());
        }
        warnings
    }
}

fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().fold(String::new(), |mut acc, byte| {
        let _ = write!(acc, "{byte:02x}");
        acc
    })
}

/// Digest over the canonical (sorted, comment-free) edge list.
pub fn taxonomy_digest(taxonomy: &Taxonomy) -> String {
    let mut canonical = String::new();
    for concept in taxonomy.concepts() {
        match taxonomy.parent_of(concept) {
            Some(parent) => {
                let _ = writeln!(canonical, "{concept}\t{parent}");
            }
            None => {
                let _ = writeln!(canonical, "{concept}");
            }
        }
    }
    sha256_hex(&canonical)
}

/// Digest over the canonical (id-sorted) synset list.
pub fn thesaurus_digest(thesaurus: &Thesaurus) -> String {
    let mut canonical = String::new();
    for synset in thesaurus.synsets() {
        let _ = writeln!(
            canonical,
            "{} {} {}",
            synset.id,
            match synset.tag {
                crate::textprep::PosTag::Noun => "NOUN",
                crate::textprep::PosTag::Verb => "VERB",
                crate::textprep::PosTag::Adjective => "ADJ",
                crate::textprep::PosTag::Other => "OTHER",
            },
            synset.members.join(",")
        );
    }
    sha256_hex(&canonical)
}

/// Extract keywords per document, build the tf-idf matrix over the corpus
/// vocabulary and fit the co-cluster model. Deterministic per seed.
pub fn index_corpus(
    corpus: &Corpus,
    taxonomy: &Taxonomy,
    thesaurus: &Thesaurus,
    config: &EngineConfig,
    resources: &TextResources,
) -> Result<(Index, PruneReport), EngineError> {
    let known = |w: &str| resources.lexicon.contains(w) || thesaurus.contains(w);
    let mut streams: Vec<(u32, Vec<String>)> = Vec::with_capacity(corpus.len());
    let mut vocabulary: BTreeSet<String> = BTreeSet::new();
    for doc in corpus.documents() {
        let keywords = keywords_from_text(&doc.body, &resources.stoplist, &resources.lexicon, known);
        for keyword in &keywords {
            vocabulary.insert(keyword.lemma.clone());
        }
        streams.push((doc.id, keywords.into_iter().map(|k| k.lemma).collect()));
    }
    let vocabulary: Vec<String> = vocabulary.into_iter().collect();
    let (matrix, report) = build_matrix(&streams, &vocabulary)?;
    let model = fit(&matrix, &config.cocluster)?;

    let titles: HashMap<u32, &str> = corpus
        .documents()
        .iter()
        .map(|d| (d.id, d.title.as_str()))
        .collect();
    let docs = matrix
        .doc_ids()
        .iter()
        .map(|&id| DocEntry {
            id,
            title: titles.get(&id).copied().unwrap_or_default().to_string(),
        })
        .collect();

    let fingerprint = Fingerprint {
        variant: config.cocluster.variant,
        clusters: config.cocluster.clusters,
        seed: config.cocluster.seed,
        tu: config.cocluster.tu,
        tv: config.cocluster.tv,
        tol: config.cocluster.tol,
        max_iter: config.cocluster.max_iter,
        x: config.similarity.x(),
        y: config.similarity.y(),
        taxonomy_digest: taxonomy_digest(taxonomy),
        thesaurus_digest: thesaurus_digest(thesaurus),
    };
    Ok((
        Index {
            matrix,
            model,
            docs,
            fingerprint,
        },
        report,
    ))
}

/// Keyword x document grid of ontology similarities for one query variant.
#[derive(Debug, Clone, PartialEq)]
pub struct AnswerMatrix {
    keywords: Vec<String>,
    n_docs: usize,
    /// Row-major `keywords x docs`, every cell in [0, 1].
    cells: Vec<f64>,
}

impl AnswerMatrix {
    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn get(&self, keyword: usize, doc: usize) -> f64 {
        self.cells[keyword * self.n_docs + doc]
    }

    pub fn cell_sum(&self) -> f64 {
        self.cells.iter().sum()
    }

    /// Highest similarity any keyword reaches for a document.
    pub fn best_for_doc(&self, doc: usize) -> f64 {
        (0..self.keywords.len())
            .map(|r| self.get(r, doc))
            .fold(0.0, f64::max)
    }
}

/// Cell (keyword, doc) = the best similarity between the keyword's resolved
/// concept and any concept resolvable from the document's lemmas; 0 when
/// either side is unresolvable (or the taxonomy is degenerate).
pub fn build_answer_matrix(
    variant: &QueryVariant,
    index: &Index,
    taxonomy: &Taxonomy,
    thesaurus: &Thesaurus,
    params: &SimilarityParams,
) -> AnswerMatrix {
    let n_docs = index.matrix.n_docs();
    let mut concept_cache: HashMap<String, Option<String>> = HashMap::new();
    let mut resolve = |lemma: &str| -> Option<String> {
        concept_cache
            .entry(lemma.to_string())
            .or_insert_with(|| term_to_concept(lemma, taxonomy, thesaurus))
            .clone()
    };

    let query_concepts: Vec<Option<String>> =
        variant.lemmas.iter().map(|l| resolve(l)).collect();
    let doc_concepts: Vec<Vec<String>> = (0..n_docs)
        .map(|i| {
            let mut concepts: Vec<String> = index
                .doc_lemmas(i)
                .iter()
                .filter_map(|lemma| resolve(lemma))
                .collect();
            concepts.sort();
            concepts.dedup();
            concepts
        })
        .collect();

    let mut sim_cache: HashMap<(String, String), f64> = HashMap::new();
    let mut cells = vec![0.0; variant.lemmas.len() * n_docs];
    for (row, query_concept) in query_concepts.iter().enumerate() {
        let Some(query_concept) = query_concept else {
            continue;
        };
        for (doc, concepts) in doc_concepts.iter().enumerate() {
            let mut best = 0.0f64;
            for concept in concepts {
                let key = (query_concept.clone(), concept.clone());
                let value = *sim_cache.entry(key).or_insert_with(|| {
                    taxonomy
                        .similarity(query_concept, concept, params)
                        .unwrap_or(0.0)
                });
                best = best.max(value);
            }
            cells[row * n_docs + doc] = best;
        }
    }
    AnswerMatrix {
        keywords: variant.lemmas.clone(),
        n_docs,
        cells,
    }
}

/// Retrieval knobs for one question.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryOptions {
    pub top_k: usize,
    /// Candidate gate: a document qualifies when any answer-matrix cell
    /// reaches this similarity.
    pub threshold: f64,
    /// Synonym expansion cap.
    pub cap: usize,
    /// Exact conjunctive keyword match instead of ontology retrieval.
    pub keyword_only: bool,
}

impl Default for QueryOptions {
    fn default() -> Self {
        QueryOptions {
            top_k: 10,
            threshold: 0.3,
            cap: 256,
            keyword_only: false,
        }
    }
}

/// Answer a question against an index: preprocess, expand, gate by ontology
/// similarity under the best variant, then rank candidates with the fuzzy
/// scale. Returns at most `top_k` answers, best first.
#[allow(clippy::too_many_arguments)]
pub fn answer(
    question: &str,
    index: &Index,
    taxonomy: &Taxonomy,
    thesaurus: &Thesaurus,
    sense_bank: &SenseBank,
    params: &SimilarityParams,
    resources: &TextResources,
    options: &QueryOptions,
) -> Result<Vec<ScoredAnswer>, EngineError> {
    let known = |w: &str| resources.lexicon.contains(w) || thesaurus.contains(w);
    let keywords = keywords_from_text(question, &resources.stoplist, &resources.lexicon, known);
    if keywords.is_empty() {
        return Err(EngineError::EmptyQuestion);
    }

    let word_intervals: Vec<_> = keywords
        .iter()
        .map(|k| sense_bank.word_membership(&k.lemma, &keywords).0)
        .collect();

    if options.keyword_only {
        let lemmas: Vec<&str> = keywords.iter().map(|k| k.lemma.as_str()).collect();
        let candidates: Vec<usize> = (0..index.matrix.n_docs())
            .filter(|&i| {
                let doc_lemmas: HashSet<&str> = index.doc_lemmas(i).into_iter().collect();
                lemmas.iter().all(|l| doc_lemmas.contains(l))
            })
            .collect();
        return score_candidates(index, &candidates, &word_intervals, options.top_k, |_| {
            lemmas
                .iter()
                .map(|l| KeywordMatch {
                    keyword: l.to_string(),
                    similarity: 1.0,
                })
                .collect()
        });
    }

    let variants = expand_query(&keywords, thesaurus, options.cap);
    let mut best: Option<(f64, AnswerMatrix)> = None;
    for variant in &variants {
        let matrix = build_answer_matrix(variant, index, taxonomy, thesaurus, params);
        let sum = matrix.cell_sum();
        let better = match &best {
            Some((best_sum, _)) => sum > *best_sum,
            None => true,
        };
        if better {
            best = Some((sum, matrix));
        }
    }
    let (_, matrix) = best.expect("expansion yields at least the original variant");

    let candidates: Vec<usize> = (0..index.matrix.n_docs())
        .filter(|&i| matrix.best_for_doc(i) >= options.threshold)
        .collect();
    score_candidates(index, &candidates, &word_intervals, options.top_k, |doc| {
        matrix
            .keywords()
            .iter()
            .enumerate()
            .map(|(row, keyword)| KeywordMatch {
                keyword: keyword.clone(),
                similarity: matrix.get(row, doc),
            })
            .collect()
    })
}

fn score_candidates<F>(
    index: &Index,
    candidates: &[usize],
    word_intervals: &[crate::fuzzyscale::IntervalType2Membership],
    top_k: usize,
    breakdown_for: F,
) -> Result<Vec<ScoredAnswer>, EngineError>
where
    F: Fn(usize) -> Vec<KeywordMatch>,
{
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    let doc_count = candidates.len();
    let mut answers = Vec::with_capacity(doc_count);
    for &doc in candidates {
        let cluster = index.model.assign_cluster(doc)?;
        let mu = index.model.doc_membership(cluster, doc);
        let doc_mu = Type1Membership::new(mu)?;
        let value = score(doc_mu, word_intervals, doc_count)?;
        answers.push(ScoredAnswer {
            doc_id: index.docs[doc].id,
            score: value,
            cluster,
            doc_mu: mu,
            breakdown: breakdown_for(doc),
        });
    }
    let mut ranked = rank(answers);
    ranked.truncate(top_k.max(1));
    Ok(ranked)
}

/// Serialize an index to the versioned text format. Numbers use the shortest
/// decimal form that round-trips exactly, so identical inputs produce
/// identical bytes.
pub fn index_to_string(index: &Index) -> String {
    let mut out = String::new();
    let fp = &index.fingerprint;
    let _ = writeln!(out, "{INDEX_HEADER}");
    let _ = writeln!(out, "variant {}", fp.variant);
    let _ = writeln!(out, "clusters {}", fp.clusters);
    let _ = writeln!(out, "seed {}", fp.seed);
    let _ = writeln!(out, "tu {}", fp.tu);
    let _ = writeln!(out, "tv {}", fp.tv);
    let _ = writeln!(out, "tol {}", fp.tol);
    let _ = writeln!(out, "max-iter {}", fp.max_iter);
    let _ = writeln!(out, "x {}", fp.x);
    let _ = writeln!(out, "y {}", fp.y);
    let _ = writeln!(out, "taxonomy-digest {}", fp.taxonomy_digest);
    let _ = writeln!(out, "thesaurus-digest {}", fp.thesaurus_digest);

    let vocab = index.matrix.vocab();
    let _ = writeln!(out, "vocab {}", vocab.len());
    for word in vocab {
        let _ = writeln!(out, "{word}");
    }
    let _ = writeln!(out, "docs {}", index.docs.len());
    for entry in &index.docs {
        let _ = writeln!(out, "{}\t{}", entry.id, entry.title);
    }
    let (n, m) = (index.matrix.n_docs(), index.matrix.n_words());
    let _ = writeln!(out, "matrix {n} {m}");
    for i in 0..n {
        let _ = writeln!(out, "{}", join_floats(index.matrix.row(i)));
    }
    let model = &index.model;
    let _ = writeln!(out, "u {} {}", model.clusters(), n);
    for c in 0..model.clusters() {
        let _ = writeln!(out, "{}", join_floats(model.doc_memberships(c)));
    }
    let _ = writeln!(out, "v {} {}", model.clusters(), m);
    for c in 0..model.clusters() {
        let _ = writeln!(out, "{}", join_floats(model.word_memberships(c)));
    }
    let _ = writeln!(out, "iterations {}", model.iterations_run);
    let _ = writeln!(out, "converged {}", model.converged);
    let _ = writeln!(out, "u-clip-events {}", model.u_clip_events);
    let _ = writeln!(out, "v-clip-events {}", model.v_clip_events);
    let _ = writeln!(out, "trace {}", model.objective_trace.len());
    let _ = writeln!(out, "{}", join_floats(&model.objective_trace));
    out
}

/// Write the serialized index to a stream.
pub fn save_index(index: &Index, writer: &mut impl io::Write) -> io::Result<()> {
    writer.write_all(index_to_string(index).as_bytes())
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parse an index previously produced by [`save_index`]. The format is
/// versioned; any other version is rejected.
pub fn load_index(text: &str) -> Result<Index, EngineError> {
    let mut reader = LineReader::new(text);
    let header = reader.next_line()?;
    if header != INDEX_HEADER {
        if header.starts_with("fuzzyqa-index ") {
            return Err(EngineError::VersionMismatch {
                found: header.trim_start_matches("fuzzyqa-index ").to_string(),
            });
        }
        return Err(reader.error("missing index header"));
    }

    let variant: Variant = reader
        .expect_field("variant")?
        .parse()
        .map_err(|e: String| reader.error(&e))?;
    let clusters: usize = reader.parse_field("clusters")?;
    let seed: u64 = reader.parse_field("seed")?;
    let tu: f64 = reader.parse_field("tu")?;
    let tv: f64 = reader.parse_field("tv")?;
    let tol: f64 = reader.parse_field("tol")?;
    let max_iter: usize = reader.parse_field("max-iter")?;
    let x: f64 = reader.parse_field("x")?;
    let y: f64 = reader.parse_field("y")?;
    let taxonomy_digest = reader.expect_field("taxonomy-digest")?.to_string();
    let thesaurus_digest = reader.expect_field("thesaurus-digest")?.to_string();

    let vocab_len: usize = reader.parse_field("vocab")?;
    let mut vocab = Vec::with_capacity(vocab_len);
    for _ in 0..vocab_len {
        vocab.push(reader.next_line()?.to_string());
    }
    let doc_len: usize = reader.parse_field("docs")?;
    let mut docs = Vec::with_capacity(doc_len);
    for _ in 0..doc_len {
        let line = reader.next_line()?;
        let (id, title) = line
            .split_once('\t')
            .ok_or_else(|| reader.error("expected `id<TAB>title`"))?;
        let id: u32 = id.parse().map_err(|_| reader.error("invalid doc id"))?;
        docs.push(DocEntry {
            id,
            title: title.to_string(),
        });
    }

    let (n, m) = reader.parse_dims("matrix")?;
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        rows.push(reader.parse_floats(m)?);
    }
    if docs.len() != n || vocab.len() != m {
        return Err(reader.error("doc table or vocabulary does not match matrix shape"));
    }
    let doc_ids: Vec<u32> = docs.iter().map(|d| d.id).collect();
    let matrix = TermDocMatrix::from_rows(doc_ids, vocab, rows)?;

    let (uc, un) = reader.parse_dims("u")?;
    let mut u = Vec::with_capacity(uc * un);
    for _ in 0..uc {
        u.extend(reader.parse_floats(un)?);
    }
    let (vc, vm) = reader.parse_dims("v")?;
    let mut v = Vec::with_capacity(vc * vm);
    for _ in 0..vc {
        v.extend(reader.parse_floats(vm)?);
    }
    if uc != vc || un != n || vm != m || uc != clusters {
        return Err(reader.error("membership shapes do not match matrix shape"));
    }

    let iterations_run: usize = reader.parse_field("iterations")?;
    let converged: bool = reader
        .expect_field("converged")?
        .parse()
        .map_err(|_| reader.error("invalid converged flag"))?;
    let u_clip_events: usize = reader.parse_field("u-clip-events")?;
    let v_clip_events: usize = reader.parse_field("v-clip-events")?;
    let trace_len: usize = reader.parse_field("trace")?;
    let objective_trace = reader.parse_floats(trace_len)?;

    let model = CoClusterModel::from_parts(
        clusters,
        n,
        m,
        u,
        v,
        objective_trace,
        iterations_run,
        converged,
        u_clip_events,
        v_clip_events,
    )?;
    Ok(Index {
        matrix,
        model,
        docs,
        fingerprint: Fingerprint {
            variant,
            clusters,
            seed,
            tu,
            tv,
            tol,
            max_iter,
            x,
            y,
            taxonomy_digest,
            thesaurus_digest,
        },
    })
}

/// Sequential line reader with stable error positions.
struct LineReader<'a> {
    lines: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> LineReader<'a> {
    fn new(text: &'a str) -> Self {
        LineReader {
            lines: text.lines(),
            line_no: 0,
        }
    }

    fn error(&self, reason: &str) -> EngineError {
        EngineError::IndexParse {
            line: self.line_no,
            reason: reason.to_string(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str, EngineError> {
        self.line_no += 1;
        self.lines.next().ok_or(EngineError::IndexParse {
            line: self.line_no,
            reason: "unexpected end of index".to_string(),
        })
    }

    fn expect_field(&mut self, key: &str) -> Result<&'a str, EngineError> {
        let line = self.next_line()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.error(&format!("expected `{key} ...`, got {line:?}")))
    }

    fn parse_field<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, EngineError> {
        let value = self.expect_field(key)?;
        value
            .parse()
            .map_err(|_| self.error(&format!("invalid value {value:?} for `{key}`")))
    }

    fn parse_dims(&mut self, key: &str) -> Result<(usize, usize), EngineError> {
        let value = self.expect_field(key)?;
        let mut parts = value.split_whitespace();
        let a = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| self.error(&format!("invalid `{key}` dimensions")))?;
        let b = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| self.error(&format!("invalid `{key}` dimensions")))?;
        Ok((a, b))
    }

    fn parse_floats(&mut self, expected: usize) -> Result<Vec<f64>, EngineError> {
        let line = self.next_line()?;
        let values: Result<Vec<f64>, EngineError> = line
            .split_whitespace()
            .map(|field| {
                field.parse::<f64>().map_err(|_| EngineError::IndexParse {
                    line: self.line_no,
                    reason: format!("invalid number {field:?}"),
                })
            })
            .collect();
        let values = values?;
        if values.len() != expected {
            return Err(self.error(&format!(
                "expected {expected} values, got {}",
                values.len()
            )));
        }
        Ok(values)
    }
}
