use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, Criterion};
use fuzzyqa_core::engine::{answer, index_corpus, Corpus, EngineConfig, QueryOptions, TextResources};
use fuzzyqa_core::fuzzyscale::SenseBank;
use fuzzyqa_core::ontology::{SimilarityParams, Taxonomy};
use fuzzyqa_core::thesaurus::Thesaurus;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(path).expect("fixture readable")
}

fn bench_similarity(c: &mut Criterion) {
    let taxonomy = Taxonomy::parse(&fixture("taxonomy20.tsv")).unwrap();
    let params = SimilarityParams::default();
    let concepts: Vec<&str> = taxonomy.concepts().collect();
    c.bench_function("similarity_all_pairs_20", |b| {
        b.iter(|| {
            let mut total = 0.0;
            for &p in &concepts {
                for &q in &concepts {
                    total += taxonomy.similarity(p, q, black_box(&params)).unwrap();
                }
            }
            total
        })
    });
}

fn bench_answer(c: &mut Criterion) {
    let corpus = Corpus::from_dir(
        &PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/corpus"),
    )
    .unwrap();
    let taxonomy = Taxonomy::parse(&fixture("taxonomy.tsv")).unwrap();
    let thesaurus = Thesaurus::parse(&fixture("thesaurus.txt")).unwrap();
    let sense_bank = SenseBank::parse(&fixture("senses.tsv")).unwrap();
    let resources = TextResources::default();
    let config = EngineConfig::default();
    let (index, _) = index_corpus(&corpus, &taxonomy, &thesaurus, &config, &resources).unwrap();
    let options = QueryOptions::default();

    c.bench_function("answer_blossom_question", |b| {
        b.iter(|| {
            answer(
                black_box("Painting by Ravi with subject Blossom"),
                &index,
                &taxonomy,
                &thesaurus,
                &sense_bank,
                &config.similarity,
                &resources,
                &options,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, bench_similarity, bench_answer);
criterion_main!(benches);
