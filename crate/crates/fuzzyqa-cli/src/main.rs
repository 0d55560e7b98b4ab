//! `fuzzyqa` command-line interface: index a corpus, ask questions, probe
//! taxonomy similarity, preview synonym expansion and inspect co-clustering.
//!
//! Exit codes: 0 success, 1 runtime/data error, 2 usage error.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fuzzyqa_core::cocluster::{fit, CoClusterConfig, TermDocMatrix, Variant};
use fuzzyqa_core::engine::{
    answer, index_corpus, index_to_string, load_index, Corpus, EngineConfig, QueryOptions,
    TextResources,
};
use fuzzyqa_core::fuzzyscale::{ScoredAnswer, SenseBank};
use fuzzyqa_core::ontology::{SimilarityParams, Taxonomy};
use fuzzyqa_core::textprep::{keywords_from_text, Keyword, Stoplist, TagLexicon};
use fuzzyqa_core::thesaurus::{expand_query, Thesaurus};

#[derive(Parser)]
#[command(
    name = "fuzzyqa",
    version,
    about = "Semantic question answering over a plain-text corpus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index: extract keywords, weight the term-document matrix and
    /// fit the fuzzy co-cluster model
    Index(IndexArgs),
    /// Answer a question against a built index
    Ask(AskArgs),
    /// Print depth, shortest path and similarity for two taxonomy terms
    Sim(SimArgs),
    /// Preview keyword extraction and synonym expansion for a question
    Expand(ExpandArgs),
    /// Run fuzzy co-clustering on a matrix dump and print diagnostics
    Cluster(ClusterArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Stop word list (one word per line); defaults to $FUZZYQA_DATA/stopwords.txt
    /// or the bundled English list
    #[arg(long)]
    stoplist: Option<PathBuf>,
    /// Tag lexicon (`word<TAB>TAG` lines); defaults to $FUZZYQA_DATA/lexicon.txt
    /// or the bundled English lexicon
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterKnobs {
    /// Document fuzzifier weight
    #[arg(long, default_value_t = 1.0)]
    tu: f64,
    /// Word fuzzifier weight
    #[arg(long, default_value_t = 1.0)]
    tv: f64,
    /// Convergence threshold on the objective change
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Iteration backstop
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
}

#[derive(Args)]
struct IndexArgs {
    /// Directory of *.txt documents
    #[arg(long)]
    corpus: PathBuf,
    /// Taxonomy file (`child<TAB>parent` lines)
    #[arg(long)]
    taxonomy: PathBuf,
    /// Thesaurus file (`ID TAG member1,member2,...` lines)
    #[arg(long)]
    thesaurus: PathBuf,
    /// Number of co-clusters
    #[arg(long, default_value_t = 2)]
    clusters: usize,
    /// Co-clustering variant
    #[arg(long, default_value = "fccstf", value_parser = parse_variant)]
    variant: Variant,
    /// Seed for the membership initialization
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    knobs: ClusterKnobs,
    /// Similarity smoothing factor for the tree depth
    #[arg(long, default_value_t = 0.5)]
    x: f64,
    /// Similarity smoothing factor for the path length
    #[arg(long, default_value_t = 0.6)]
    y: f64,
    #[command(flatten)]
    preprocess: PreprocessArgs,
    /// Output index file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AskArgs {
    /// Index file produced by `fuzzyqa index`
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    taxonomy: PathBuf,
    #[arg(long)]
    thesaurus: PathBuf,
    /// Sense bank file for word membership bands
    #[arg(long)]
    senses: PathBuf,
    /// The question text
    question: String,
    /// Answers to return
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Candidate similarity gate
    #[arg(long, default_value_t = 0.3)]
    threshold: f64,
    /// Synonym expansion cap
    #[arg(long, default_value_t = 256)]
    cap: usize,
    #[arg(long, default_value_t = 0.5)]
    x: f64,
    #[arg(long, default_value_t = 0.6)]
    y: f64,
    /// Add per-keyword similarities, cluster, document membership and word bands
    #[arg(long)]
    explain: bool,
    /// Exact conjunctive keyword matching instead of ontology retrieval
    #[arg(long)]
    keyword_only: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    #[command(flatten)]
    preprocess: PreprocessArgs,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long)]
    taxonomy: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    x: f64,
    #[arg(long, default_value_t = 0.6)]
    y: f64,
    term1: String,
    term2: String,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long)]
    thesaurus: PathBuf,
    /// Variant cap
    #[arg(long, default_value_t = 256)]
    cap: usize,
    question: String,
    #[command(flatten)]
    preprocess: PreprocessArgs,
}

#[derive(Args)]
struct ClusterArgs {
    /// Matrix dump: `n m` header then n rows of m values
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    clusters: usize,
    #[arg(long, value_parser = parse_variant)]
    variant: Variant,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    knobs: ClusterKnobs,
    /// Report clipped negative membership updates
    #[arg(long)]
    explain: bool,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Index(args) => cmd_index(args),
        Command::Ask(args) => cmd_ask(args),
        Command::Sim(args) => cmd_sim(args),
        Command::Expand(args) => cmd_expand(args),
        Command::Cluster(args) => cmd_cluster(args),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_taxonomy(path: &Path) -> Result<Taxonomy> {
    Taxonomy::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_thesaurus(path: &Path) -> Result<Thesaurus> {
    Thesaurus::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Explicit flags win, then $FUZZYQA_DATA/{stopwords,lexicon}.txt, then the
/// bundled defaults.
fn load_resources(args: &PreprocessArgs) -> Result<TextResources> {
    let data_dir = std::env::var_os("FUZZYQA_DATA").map(PathBuf::from);
    let fallback = |name: &str| -> Option<PathBuf> {
        data_dir
            .as_ref()
            .map(|dir| dir.join(name))
            .filter(|p| p.is_file())
    };
    let stoplist = match args.stoplist.clone().or_else(|| fallback("stopwords.txt")) {
        Some(path) => Stoplist::parse(&read(&path)?),
        None => Stoplist::default(),
    };
    let lexicon = match args.lexicon.clone().or_else(|| fallback("lexicon.txt")) {
        Some(path) => TagLexicon::parse(&read(&path)?)
            .with_context(|| format!("parsing {}", path.display()))?,
        None => TagLexicon::default(),
    };
    Ok(TextResources { stoplist, lexicon })
}

fn cmd_index(args: IndexArgs) -> Result<()> {
    let resources = load_resources(&args.preprocess)?;
    let corpus = Corpus::from_dir(&args.corpus)
        .with_context(|| format!("loading corpus from {}", args.corpus.display()))?;
    let taxonomy = load_taxonomy(&args.taxonomy)?;
    let thesaurus = load_thesaurus(&args.thesaurus)?;
    let config = EngineConfig {
        cocluster: CoClusterConfig {
            clusters: args.clusters,
            variant: args.variant,
            tu: args.knobs.tu,
            tv: args.knobs.tv,
            max_iter: args.knobs.max_iter,
            tol: args.knobs.tol,
            seed: args.seed,
        },
        similarity: SimilarityParams::new(args.x, args.y)?,
    };
    let (index, report) = index_corpus(&corpus, &taxonomy, &thesaurus, &config, &resources)?;
    std::fs::write(&args.out, index_to_string(&index))
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("documents {}", index.docs.len());
    println!("vocabulary {}", index.vocabulary().len());
    println!("clusters {}", index.model.clusters());
    if !report.dropped_docs.is_empty() {
        println!("pruned-documents {}", report.dropped_docs.len());
    }
    if !report.dropped_words.is_empty() {
        println!("pruned-words {}", report.dropped_words.len());
    }
    Ok(())
}

fn cmd_ask(args: AskArgs) -> Result<()> {
    let resources = load_resources(&args.preprocess)?;
    let index = load_index(&read(&args.index)?)
        .with_context(|| format!("loading index {}", args.index.display()))?;
    let taxonomy = load_taxonomy(&args.taxonomy)?;
    let thesaurus = load_thesaurus(&args.thesaurus)?;
    let sense_bank = SenseBank::parse(&read(&args.senses)?)
        .with_context(|| format!("parsing {}", args.senses.display()))?;
    for warning in index.digest_warnings(&taxonomy, &thesaurus) {
        eprintln!("warning: {warning}");
    }
    let params = SimilarityParams::new(args.x, args.y)?;
    let options = QueryOptions {
        top_k: args.top,
        threshold: args.threshold,
        cap: args.cap,
        keyword_only: args.keyword_only,
    };
    let answers = answer(
        &args.question,
        &index,
        &taxonomy,
        &thesaurus,
        &sense_bank,
        &params,
        &resources,
        &options,
    )?;

    let titles: HashMap<u32, &str> = index
        .docs
        .iter()
        .map(|d| (d.id, d.title.as_str()))
        .collect();
    let known = |w: &str| resources.lexicon.contains(w) || thesaurus.contains(w);
    let keywords =
        keywords_from_text(&args.question, &resources.stoplist, &resources.lexicon, known);

    match args.format {
        OutputFormat::Table => {
            if answers.is_empty() {
                println!("no answers");
                return Ok(());
            }
            for entry in &answers {
                let title = titles.get(&entry.doc_id).copied().unwrap_or("");
                println!("{}\t{}\t{:.4}", entry.doc_id, title, entry.score);
                if args.explain {
                    println!("  cluster {}  doc-mu {:.4}", entry.cluster, entry.doc_mu);
                    for m in &entry.breakdown {
                        println!("  sim {} {:.6}", m.keyword, m.similarity);
                    }
                    for keyword in &keywords {
                        let (band, sense) = sense_bank.word_membership(&keyword.lemma, &keywords);
                        let label = sense
                            .map(|s| format!(" sense {} {:.4}", s.label, s.point))
                            .unwrap_or_default();
                        println!(
                            "  band {} [{:.4}, {:.4}]{label}",
                            keyword.lemma,
                            band.lower(),
                            band.upper()
                        );
                    }
                }
            }
        }
        OutputFormat::Json => {
            println!("{}", answers_json(&answers, &titles, &keywords, &sense_bank));
        }
    }
    Ok(())
}

/// Canonical JSON: `serde_json::Value` maps keep keys sorted, so parsing and
/// re-serializing reproduces the bytes.
fn answers_json(
    answers: &[ScoredAnswer],
    titles: &HashMap<u32, &str>,
    keywords: &[Keyword],
    sense_bank: &SenseBank,
) -> String {
    use serde_json::{json, Value};
    let bands: Vec<Value> = keywords
        .iter()
        .map(|keyword| {
            let (band, sense) = sense_bank.word_membership(&keyword.lemma, keywords);
            json!({
                "keyword": keyword.lemma,
                "lower": band.lower(),
                "upper": band.upper(),
                "sense": sense.as_ref().map(|s| s.label.clone()),
                "point": sense.as_ref().map(|s| s.point),
            })
        })
        .collect();
    let entries: Vec<Value> = answers
        .iter()
        .map(|entry| {
            json!({
                "doc_id": entry.doc_id,
                "title": titles.get(&entry.doc_id).copied().unwrap_or(""),
                "score": entry.score,
                "cluster": entry.cluster,
                "doc_mu": entry.doc_mu,
                "breakdown": entry
                    .breakdown
                    .iter()
                    .map(|m| json!({"keyword": m.keyword, "similarity": m.similarity}))
                    .collect::<Vec<Value>>(),
            })
        })
        .collect();
    json!({ "answers": entries, "bands": bands }).to_string()
}

fn cmd_sim(args: SimArgs) -> Result<()> {
    let taxonomy = load_taxonomy(&args.taxonomy)?;
    let params = SimilarityParams::new(args.x, args.y)?;
    let term1 = args.term1.to_lowercase();
    let term2 = args.term2.to_lowercase();
    let stats = taxonomy.path_stats(&term1, &term2)?;
    let similarity = taxonomy.similarity(&term1, &term2, &params)?;
    println!("d={}", stats.depth);
    println!("S={}", stats.path_len);
    println!("St={similarity:.6}");
    Ok(())
}

fn cmd_expand(args: ExpandArgs) -> Result<()> {
    let resources = load_resources(&args.preprocess)?;
    let thesaurus = load_thesaurus(&args.thesaurus)?;
    let known = |w: &str| resources.lexicon.contains(w) || thesaurus.contains(w);
    let keywords =
        keywords_from_text(&args.question, &resources.stoplist, &resources.lexicon, known);
    if keywords.is_empty() {
        bail!("question has no keywords after stop-word removal");
    }
    let lemmas: Vec<&str> = keywords.iter().map(|k| k.lemma.as_str()).collect();
    println!("keywords: {}", lemmas.join(" "));
    for variant in expand_query(&keywords, &thesaurus, args.cap) {
        println!("{}", variant.lemmas.join(" "));
    }
    Ok(())
}

fn cmd_cluster(args: ClusterArgs) -> Result<()> {
    let matrix = TermDocMatrix::parse_dump(&read(&args.matrix)?)
        .with_context(|| format!("parsing {}", args.matrix.display()))?;
    let config = CoClusterConfig {
        clusters: args.clusters,
        variant: args.variant,
        tu: args.knobs.tu,
        tv: args.knobs.tv,
        max_iter: args.knobs.max_iter,
        tol: args.knobs.tol,
        seed: args.seed,
    };
    let model = fit(&matrix, &config)?;
    println!("variant {}", args.variant);
    println!("iterations {}", model.iterations_run);
    println!("converged {}", model.converged);
    let trace: Vec<String> = model.objective_trace.iter().map(|v| v.to_string()).collect();
    println!("trace {}", trace.join(" "));
    for c in 0..model.clusters() {
        let row: Vec<String> = model
            .doc_memberships(c)
            .iter()
            .map(|v| format!("{v:.6}"))
            .collect();
        println!("u[{c}] {}", row.join(" "));
    }
    for c in 0..model.clusters() {
        let row: Vec<String> = model
            .word_memberships(c)
            .iter()
            .map(|v| format!("{v:.6}"))
            .collect();
        println!("v[{c}] {}", row.join(" "));
    }
    if args.explain {
        println!(
            "clipped {} negative document updates, {} negative word updates",
            model.u_clip_events, model.v_clip_events
        );
    }
    Ok(())
}
