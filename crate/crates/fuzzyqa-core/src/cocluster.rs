//! Fuzzy co-clustering of the document-term matrix.
//!
//! Three alternating-optimization variants share the coupling objective
//! `Σ_c Σ_i Σ_j u_ci v_cj a_ij` and differ in the fuzzifier:
//!
//! * FCCM — entropy fuzzifier; exponential closed-form updates. The naive
//!   exponent overflows for large aggregates, so the shipped updates compute
//!   exponentials in shifted (max-subtracted) form.
//! * Fuzzy CoDoK — quadratic (Gini) fuzzifier; the linear closed-form updates
//!   can go negative and are clipped to zero then renormalized.
//! * FCC_STF — single-term fuzzifier: the quadratic penalty applies to the
//!   word memberships only; document updates are the constraint-projected
//!   linear rule. Clip-and-renormalize after every update.
//!
//! Document memberships sum to 1 over clusters per document; word memberships
//! sum to 1 over words per cluster. Fits are deterministic per seed.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoClusterError {
    #[error("empty corpus: at least one document is required")]
    EmptyCorpus,
    #[error("duplicate document id {id}")]
    DuplicateDocId { id: u32 },
    #[error("cluster count {clusters} exceeds document count {docs}")]
    TooManyClusters { clusters: usize, docs: usize },
    #[error("invalid co-cluster config: {reason}")]
    InvalidConfig { reason: &'static str },
    #[error("model shape ({clusters} clusters, {docs}x{words}) does not match matrix {matrix_docs}x{matrix_words} with {config_clusters} clusters")]
    ShapeMismatch {
        clusters: usize,
        docs: usize,
        words: usize,
        matrix_docs: usize,
        matrix_words: usize,
        config_clusters: usize,
    },
    #[error("document index {index} out of range (have {docs} documents)")]
    DocIndexOutOfRange { index: usize, docs: usize },
    #[error("matrix line {line}: {reason}")]
    MatrixParse { line: usize, reason: String },
    #[error("matrix entry ({row}, {col}) is negative: {value}")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("matrix row {row} is all zero")]
    ZeroRow { row: usize },
    #[error("matrix column {col} is all zero")]
    ZeroColumn { col: usize },
    #[error("all rows or columns were pruned; nothing left to cluster")]
    AllPruned,
}

/// Which fuzzifier drives the alternating optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Fccm,
    Codok,
    FccStf,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Fccm => "fccm",
            Variant::Codok => "codok",
            Variant::FccStf => "fccstf",
        }
    }

    pub const ALL: [Variant; 3] = [Variant::Fccm, Variant::Codok, Variant::FccStf];
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "fccm" => Ok(Variant::Fccm),
            "codok" => Ok(Variant::Codok),
            "fccstf" | "fcc_stf" | "fcc-stf" => Ok(Variant::FccStf),
            other => Err(format!("unknown variant {other:?} (expected fccm, codok or fccstf)")),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Fit parameters. `tu`/`tv` weight the document/word fuzzifier terms.
#[derive(Debug, Clone, PartialEq)]
pub struct CoClusterConfig {
    pub clusters: usize,
    pub variant: Variant,
    pub tu: f64,
    pub tv: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for CoClusterConfig {
    fn default() -> Self {
        CoClusterConfig {
            clusters: 2,
            variant: Variant::FccStf,
            tu: 1.0,
            tv: 1.0,
            max_iter: 200,
            tol: 1e-7,
            seed: 0,
        }
    }
}

impl CoClusterConfig {
    fn validate(&self, docs: usize) -> Result<(), CoClusterError> {
        if self.clusters == 0 {
            return Err(CoClusterError::InvalidConfig {
                reason: "cluster count must be at least 1",
            });
        }
        if self.clusters > docs {
            return Err(CoClusterError::TooManyClusters {
                clusters: self.clusters,
                docs,
            });
        }
        if !(self.tu > 0.0) || !(self.tv > 0.0) {
            return Err(CoClusterError::InvalidConfig {
                reason: "fuzzifier weights tu and tv must be positive",
            });
        }
        if self.max_iter == 0 {
            return Err(CoClusterError::InvalidConfig {
                reason: "max_iter must be at least 1",
            });
        }
        if !(self.tol > 0.0) {
            return Err(CoClusterError::InvalidConfig {
                reason: "tolerance must be positive",
            });
        }
        Ok(())
    }
}

/// Nonnegative documents x words weight matrix with id/vocabulary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDocMatrix {
    doc_ids: Vec<u32>,
    vocab: Vec<String>,
    /// Row-major, `docs x words`.
    values: Vec<f64>,
}

impl TermDocMatrix {
    /// Build from explicit rows, validating nonnegativity and that no row or
    /// column is all zero.
    pub fn from_rows(
        doc_ids: Vec<u32>,
        vocab: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, CoClusterError> {
        let n = doc_ids.len();
        let m = vocab.len();
        if n == 0 || m == 0 || rows.len() != n {
            return Err(CoClusterError::InvalidConfig {
                reason: "matrix needs at least one document and one word",
            });
        }
        let mut ids = HashSet::new();
        for &id in &doc_ids {
            if !ids.insert(id) {
                return Err(CoClusterError::DuplicateDocId { id });
            }
        }
        let mut values = Vec::with_capacity(n * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(CoClusterError::MatrixParse {
                    line: i + 1,
                    reason: format!("expected {m} values, got {}", row.len()),
                });
            }
            for (j, &value) in row.iter().enumerate() {
                if !(value >= 0.0) {
                    return Err(CoClusterError::NegativeEntry {
                        row: i,
                        col: j,
                        value,
                    });
                }
                values.push(value);
            }
        }
        let matrix = TermDocMatrix {
            doc_ids,
            vocab,
            values,
        };
        matrix.check_no_zero_lines()?;
        Ok(matrix)
    }

    fn check_no_zero_lines(&self) -> Result<(), CoClusterError> {
        let (n, m) = (self.n_docs(), self.n_words());
        for i in 0..n {
            if self.row(i).iter().all(|&v| v == 0.0) {
                return Err(CoClusterError::ZeroRow { row: i });
            }
        }
        for j in 0..m {
            if (0..n).all(|i| self.get(i, j) == 0.0) {
                return Err(CoClusterError::ZeroColumn { col: j });
            }
        }
        Ok(())
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn n_words(&self) -> usize {
        self.vocab.len()
    }

    pub fn get(&self, doc: usize, word: usize) -> f64 {
        self.values[doc * self.n_words() + word]
    }

    pub fn row(&self, doc: usize) -> &[f64] {
        let m = self.n_words();
        &self.values[doc * m..(doc + 1) * m]
    }

    pub fn doc_ids(&self) -> &[u32] {
        &self.doc_ids
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Serialize as `n m` header plus `n` lines of `m` space-separated
    /// decimals (shortest round-tripping form).
    pub fn to_dump_string(&self) -> String {
        let (n, m) = (self.n_docs(), self.n_words());
        let mut out = String::new();
        let _ = writeln!(out, "{n} {m}");
        for i in 0..n {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Parse the dump format. Ids and vocabulary are synthesized as
    /// `0..n-1` and `w0..w(m-1)`.
    pub fn parse_dump(text: &str) -> Result<Self, CoClusterError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(CoClusterError::MatrixParse {
            line: 1,
            reason: "missing `n m` header".to_string(),
        })?;
        let mut parts = header.split_whitespace();
        let parse_dim = |field: Option<&str>| -> Result<usize, CoClusterError> {
            field
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&d| d > 0)
                .ok_or(CoClusterError::MatrixParse {
                    line: 1,
                    reason: format!("invalid `n m` header {header:?}"),
                })
        };
        let n = parse_dim(parts.next())?;
        let m = parse_dim(parts.next())?;
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let (idx, line) = lines.next().ok_or(CoClusterError::MatrixParse {
                line: n + 1,
                reason: format!("expected {n} data rows"),
            })?;
            let row: Result<Vec<f64>, _> = line
                .split_whitespace()
                .map(|field| {
                    field.parse::<f64>().map_err(|_| CoClusterError::MatrixParse {
                        line: idx + 1,
                        reason: format!("invalid value {field:?}"),
                    })
                })
                .collect();
            let row = row?;
            if row.len() != m {
                return Err(CoClusterError::MatrixParse {
                    line: idx + 1,
                    reason: format!("expected {m} values, got {}", row.len()),
                });
            }
            rows.push(row);
        }
        let doc_ids = (0..n as u32).collect();
        let vocab = (0..m).map(|j| format!("w{j}")).collect();
        Self::from_rows(doc_ids, vocab, rows)
    }
}

/// Rows/columns dropped while building a matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PruneReport {
    pub dropped_docs: Vec<u32>,
    pub dropped_words: Vec<String>,
}

/// Build a tf-idf weighted matrix from per-document keyword streams.
/// `tf` counts occurrences in the stream; `idf = ln(1 + n/df)`. All-zero
/// rows and columns are pruned and reported.
pub fn build_matrix(
    docs: &[(u32, Vec<String>)],
    vocabulary: &[String],
) -> Result<(TermDocMatrix, PruneReport), CoClusterError> {
    if docs.is_empty() {
        return Err(CoClusterError::EmptyCorpus);
    }
    let mut ids = HashSet::new();
    for (id, _) in docs {
        if !ids.insert(*id) {
            return Err(CoClusterError::DuplicateDocId { id: *id });
        }
    }
    let word_index: HashMap<&str, usize> = vocabulary
        .iter()
        .enumerate()
        .map(|(j, w)| (w.as_str(), j))
        .collect();

    let m = vocabulary.len();
    let mut report = PruneReport::default();

    // Term counts, dropping documents that hit no vocabulary word.
    let mut kept_docs: Vec<u32> = Vec::new();
    let mut counts: Vec<Vec<f64>> = Vec::new();
    for (id, stream) in docs {
        let mut row = vec![0.0; m];
        for lemma in stream {
            if let Some(&j) = word_index.get(lemma.as_str()) {
                row[j] += 1.0;
            }
        }
        if row.iter().all(|&v| v == 0.0) {
            report.dropped_docs.push(*id);
        } else {
            kept_docs.push(*id);
            counts.push(row);
        }
    }
    if kept_docs.is_empty() {
        return Err(CoClusterError::AllPruned);
    }

    // Document frequencies over the kept rows; drop unused vocabulary.
    let df: Vec<usize> = (0..m)
        .map(|j| counts.iter().filter(|row| row[j] > 0.0).count())
        .collect();
    let kept_cols: Vec<usize> = (0..m).filter(|&j| df[j] > 0).collect();
    for j in 0..m {
        if df[j] == 0 {
            report.dropped_words.push(vocabulary[j].clone());
        }
    }
    if kept_cols.is_empty() {
        return Err(CoClusterError::AllPruned);
    }

    let n = kept_docs.len();
    let vocab: Vec<String> = kept_cols.iter().map(|&j| vocabulary[j].clone()).collect();
    let rows: Vec<Vec<f64>> = counts
        .iter()
        .map(|row| {
            kept_cols
                .iter()
                .map(|&j| {
                    let idf = (1.0 + n as f64 / df[j] as f64).ln();
                    row[j] * idf
                })
                .collect()
        })
        .collect();
    let matrix = TermDocMatrix::from_rows(kept_docs, vocab, rows)?;
    Ok((matrix, report))
}

/// Fitted fuzzy co-cluster memberships.
#[derive(Debug, Clone, PartialEq)]
pub struct CoClusterModel {
    clusters: usize,
    n_docs: usize,
    n_words: usize,
    /// Row-major `clusters x docs`; columns sum to 1 per document.
    u: Vec<f64>,
    /// Row-major `clusters x words`; rows sum to 1 per cluster.
    v: Vec<f64>,
    pub objective_trace: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
    /// Negative raw document-membership updates clipped to zero.
    pub u_clip_events: usize,
    /// Negative raw word-membership updates clipped to zero.
    pub v_clip_events: usize,
}

impl CoClusterModel {
    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn n_words(&self) -> usize {
        self.n_words
    }

    /// u_ci: membership of document `doc` in cluster `cluster`.
    pub fn doc_membership(&self, cluster: usize, doc: usize) -> f64 {
        self.u[cluster * self.n_docs + doc]
    }

    /// v_cj: membership of word `word` in cluster `cluster`.
    pub fn word_membership(&self, cluster: usize, word: usize) -> f64 {
        self.v[cluster * self.n_words + word]
    }

    pub fn doc_memberships(&self, cluster: usize) -> &[f64] {
        &self.u[cluster * self.n_docs..(cluster + 1) * self.n_docs]
    }

    pub fn word_memberships(&self, cluster: usize) -> &[f64] {
        &self.v[cluster * self.n_words..(cluster + 1) * self.n_words]
    }

    /// Dominant cluster of a document: argmax of u_ci, ties to the smallest
    /// cluster index.
    pub fn assign_cluster(&self, doc: usize) -> Result<usize, CoClusterError> {
        if doc >= self.n_docs {
            return Err(CoClusterError::DocIndexOutOfRange {
                index: doc,
                docs: self.n_docs,
            });
        }
        let mut best = 0;
        let mut best_value = self.doc_membership(0, doc);
        for c in 1..self.clusters {
            let value = self.doc_membership(c, doc);
            if value > best_value {
                best = c;
                best_value = value;
            }
        }
        Ok(best)
    }

    /// Reassemble a model from raw parts (used by index deserialization).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        clusters: usize,
        n_docs: usize,
        n_words: usize,
        u: Vec<f64>,
        v: Vec<f64>,
        objective_trace: Vec<f64>,
        iterations_run: usize,
        converged: bool,
        u_clip_events: usize,
        v_clip_events: usize,
    ) -> Result<Self, CoClusterError> {
        if u.len() != clusters * n_docs || v.len() != clusters * n_words {
            return Err(CoClusterError::ShapeMismatch {
                clusters,
                docs: if clusters == 0 { 0 } else { u.len() / clusters },
                words: if clusters == 0 { 0 } else { v.len() / clusters },
                matrix_docs: n_docs,
                matrix_words: n_words,
                config_clusters: clusters,
            });
        }
        Ok(CoClusterModel {
            clusters,
            n_docs,
            n_words,
            u,
            v,
            objective_trace,
            iterations_run,
            converged,
            u_clip_events,
            v_clip_events,
        })
    }
}

/// Alternating optimization until the objective change falls below `tol` or
/// `max_iter` is reached. Deterministic given the seed: U starts from seeded
/// pseudo-random normalized columns, V uniform. Each iteration sweeps all
/// word memberships first (reading the randomized U), then all document
/// memberships, in fixed order; a u-first sweep would recompute U from the
/// uniform V and collapse every fit to the symmetric saddle point.
pub fn fit(matrix: &TermDocMatrix, config: &CoClusterConfig) -> Result<CoClusterModel, CoClusterError> {
    let n = matrix.n_docs();
    let m = matrix.n_words();
    config.validate(n)?;
    let c = config.clusters;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut u = vec![0.0; c * n];
    for i in 0..n {
        let draws: Vec<f64> = (0..c).map(|_| rng.random::<f64>()).collect();
        let total: f64 = draws.iter().sum();
        for (cluster, draw) in draws.iter().enumerate() {
            u[cluster * n + i] = draw / total;
        }
    }
    let mut v = vec![1.0 / m as f64; c * m];

    let mut u_clip_events = 0;
    let mut v_clip_events = 0;
    let mut trace = vec![objective_value(&u, &v, matrix, config)];
    let mut converged = false;
    let mut iterations_run = 0;

    let mut doc_scores = vec![0.0; c];
    let mut word_scores = vec![0.0; m];
    for _ in 0..config.max_iter {
        iterations_run += 1;

        // Word sweep: v_cj from the document-weighted column aggregates.
        for cluster in 0..c {
            let memberships = &u[cluster * n..(cluster + 1) * n];
            for (j, score) in word_scores.iter_mut().enumerate() {
                *score = (0..n).map(|i| memberships[i] * matrix.get(i, j)).sum();
            }
            match config.variant {
                Variant::Fccm => softmax_shifted(&mut word_scores, config.tv),
                Variant::Codok | Variant::FccStf => {
                    let mean = word_scores.iter().sum::<f64>() / m as f64;
                    for score in word_scores.iter_mut() {
                        *score = 1.0 / m as f64 + (*score - mean) / (2.0 * config.tv);
                    }
                    v_clip_events += clip_and_renormalize(&mut word_scores);
                }
            }
            v[cluster * m..(cluster + 1) * m].copy_from_slice(&word_scores);
        }

        // Document sweep: u_ci from the word-weighted row aggregates.
        for i in 0..n {
            let row = matrix.row(i);
            for (cluster, score) in doc_scores.iter_mut().enumerate() {
                *score = dot(&v[cluster * m..(cluster + 1) * m], row);
            }
            match config.variant {
                Variant::Fccm => softmax_shifted(&mut doc_scores, config.tu),
                Variant::Codok => {
                    let mean = doc_scores.iter().sum::<f64>() / c as f64;
                    for score in doc_scores.iter_mut() {
                        *score = 1.0 / c as f64 + (*score - mean) / (2.0 * config.tu);
                    }
                    u_clip_events += clip_and_renormalize(&mut doc_scores);
                }
                Variant::FccStf => {
                    let shift = (1.0 - doc_scores.iter().sum::<f64>()) / c as f64;
                    for score in doc_scores.iter_mut() {
                        *score += shift;
                    }
                    u_clip_events += clip_and_renormalize(&mut doc_scores);
                }
            }
            for (cluster, &score) in doc_scores.iter().enumerate() {
                u[cluster * n + i] = score;
            }
        }

        let objective = objective_value(&u, &v, matrix, config);
        let delta = objective - trace[trace.len() - 1];
        trace.push(objective);
        if delta.abs() < config.tol {
            converged = true;
            break;
        }
    }

    for value in u.iter_mut().chain(v.iter_mut()) {
        *value = value.clamp(0.0, 1.0);
    }

    Ok(CoClusterModel {
        clusters: c,
        n_docs: n,
        n_words: m,
        u,
        v,
        objective_trace: trace,
        iterations_run,
        converged,
        u_clip_events,
        v_clip_events,
    })
}

/// The variant's objective J for the given memberships.
pub fn objective(
    model: &CoClusterModel,
    matrix: &TermDocMatrix,
    config: &CoClusterConfig,
) -> Result<f64, CoClusterError> {
    if model.n_docs != matrix.n_docs()
        || model.n_words != matrix.n_words()
        || model.clusters != config.clusters
    {
        return Err(CoClusterError::ShapeMismatch {
            clusters: model.clusters,
            docs: model.n_docs,
            words: model.n_words,
            matrix_docs: matrix.n_docs(),
            matrix_words: matrix.n_words(),
            config_clusters: config.clusters,
        });
    }
    Ok(objective_value(&model.u, &model.v, matrix, config))
}

fn objective_value(u: &[f64], v: &[f64], matrix: &TermDocMatrix, config: &CoClusterConfig) -> f64 {
    let n = matrix.n_docs();
    let m = matrix.n_words();
    let c = config.clusters;
    let mut coupling = 0.0;
    for cluster in 0..c {
        let words = &v[cluster * m..(cluster + 1) * m];
        for i in 0..n {
            coupling += u[cluster * n + i] * dot(words, matrix.row(i));
        }
    }
    match config.variant {
        Variant::Fccm => {
            coupling - config.tu * entropy_sum(u) - config.tv * entropy_sum(v)
        }
        Variant::Codok => {
            coupling - config.tu * square_sum(u) - config.tv * square_sum(v)
        }
        Variant::FccStf => coupling - config.tv * square_sum(v),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn entropy_sum(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|&x| if x > 0.0 { x * x.ln() } else { 0.0 })
        .sum()
}

fn square_sum(values: &[f64]) -> f64 {
    values.iter().map(|&x| x * x).sum()
}

/// In-place softmax of `scores / temp` with the maximum subtracted before
/// exponentiation, so large aggregates cannot overflow.
fn softmax_shifted(scores: &mut [f64], temp: f64) {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for score in scores.iter_mut() {
        *score = ((*score - max) / temp).exp();
        total += *score;
    }
    for score in scores.iter_mut() {
        *score /= total;
    }
}

/// Clip negative entries to zero and renormalize to sum 1. Returns the number
/// of clipped entries. The raw entries sum to 1 by construction, so at least
/// one is positive.
fn clip_and_renormalize(raw: &mut [f64]) -> usize {
    let mut clipped = 0;
    let mut total = 0.0;
    for value in raw.iter_mut() {
        if *value < 0.0 {
            *value = 0.0;
            clipped += 1;
        }
        total += *value;
    }
    debug_assert!(total > 0.0);
    for value in raw.iter_mut() {
        *value /= total;
    }
    clipped
}
