use infosum::corpus::{idf_formula, parse_corpus, tokenize, Document, IdfTable, Sentence};
use infosum::features::{general_features, FeatureExtractor};
use infosum::lexicons::{CategoryLexicon, ScoredLexicon};
use proptest::prelude::*;

const MRC: &str = "#scored mrc imagery,concreteness imagery:100:700 concreteness:100:700\n\
                   cat\timagery\t600\ncat\tconcreteness\t610\ndog\tconcreteness\t580\n\
                   house\timagery\t100\nhouse\tconcreteness\t700\nrun\timagery\t350\n";
const INQ: &str = "#categories inq NEG,POSEMO,ANIMAL\nabsurd\tNEG\nhapp*\tPOSEMO\ncat\tANIMAL\ndog\tANIMAL,NEG\n";

fn extractor(general: bool) -> FeatureExtractor {
    FeatureExtractor::dictionary(
        vec![ScoredLexicon::parse(MRC.as_bytes()).unwrap().with_bins(7).unwrap()],
        vec![CategoryLexicon::parse(INQ.as_bytes()).unwrap()],
        general,
    )
    .unwrap()
}

fn sentence_text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop::sample::select(
            "cat Dog house run happy happiness absurd the we're , ! ? : \" -- unknown".split(' ').collect::<Vec<_>>(),
        ),
        1..20,
    )
    .prop_map(|w| w.join(" "))
}

fn shuffled_lines(body: &str, perm: &[usize]) -> String {
    let mut lines = body.lines();
    let header = lines.next().unwrap();
    let rows: Vec<&str> = lines.collect();
    let mut out = String::from(header);
    for &i in perm.iter().filter(|&&i| i < rows.len()) {
        out.push('\n');
        out.push_str(rows[i]);
    }
    out
}

#[test]
fn layout_dimensions() {
    let with = extractor(true).layout().total_dim;
    let without = extractor(false).layout().total_dim;
    assert_eq!(with, 2 * 7 + 3 + 6);
    assert_eq!(with - without, 6);
}

#[test]
fn layout_hash_is_stable_and_content_sensitive() {
    assert_eq!(extractor(true).layout_hash(), extractor(true).layout_hash());
    assert_ne!(extractor(true).layout_hash(), extractor(false).layout_hash());
    let changed = FeatureExtractor::dictionary(
        vec![ScoredLexicon::parse(MRC.replace("580", "581").as_bytes()).unwrap().with_bins(7).unwrap()],
        vec![CategoryLexicon::parse(INQ.as_bytes()).unwrap()],
        true,
    )
    .unwrap();
    assert_ne!(extractor(true).layout_hash(), changed.layout_hash());
}

proptest! {
    #[test]
    fn extracted_vectors_fit_the_layout(t in sentence_text()) {
        let s = Sentence::new(0, t.as_str());
        prop_assume!(s.word_count() > 0);
        let ex = extractor(true);
        let v = ex.extract(&s).unwrap();
        prop_assert_eq!(v.values.len(), ex.layout().total_dim);
        prop_assert_eq!(&v.layout_hash, ex.layout_hash());
        let general = ex.layout().block("general").unwrap().offset;
        for (i, x) in v.values.iter().enumerate() {
            prop_assert!(x.is_finite());
            if i < general {
                prop_assert!((0.0..=1.0).contains(x));
            }
        }
        // each scored block sums to the fraction of words in the lexicon
        let block = ex.layout().block("mrc:imagery").unwrap();
        let sum: f64 = v.values[block.offset..block.offset + block.width].iter().sum();
        prop_assert!(sum <= 1.0 + 1e-12);
        prop_assert_eq!(&v.values[general..], &general_features(&s)[..]);
    }

    #[test]
    fn word_count_survives_retokenizing_surfaces(t in "[a-zA-Z',.!? \u{2019}\u{201C}\u{201D}-]{0,60}") {
        let s = Sentence::new(0, t.as_str());
        let joined: Vec<&str> = s.tokens.iter().map(|tok| tok.surface.as_str()).collect();
        let again = tokenize(&joined.join(" "));
        prop_assert_eq!(again.iter().filter(|t| t.is_word).count(), s.word_count());
        for tok in &s.tokens {
            prop_assert_eq!(&t[tok.start..tok.end()], tok.surface.as_str());
        }
    }

    #[test]
    fn corpus_jsonl_roundtrip(docs in prop::collection::vec((prop::collection::vec(sentence_text(), 1..5), prop::option::of(prop::collection::vec(sentence_text(), 1..3))), 1..5)) {
        let documents: Vec<Document> = docs
            .iter()
            .enumerate()
            .map(|(i, (sents, summary))| {
                let s: Vec<&str> = sents.iter().map(String::as_str).collect();
                let m: Option<Vec<&str>> = summary.as_ref().map(|v| v.iter().map(String::as_str).collect());
                Document::new(format!("d{i}"), "news", &s, m.as_deref()).unwrap()
            })
            .collect();
        let corpus = infosum::corpus::Corpus::from_documents(documents).unwrap();
        let mut buf = Vec::new();
        corpus.write_jsonl(&mut buf).unwrap();
        let parsed = parse_corpus(&buf[..]).unwrap();
        prop_assert_eq!(&parsed, &corpus);
        let mut again = Vec::new();
        parsed.write_jsonl(&mut again).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn idf_at_least_one_and_decreasing_in_df(n in 1usize..1000, a in 0usize..1000, b in 0usize..1000) {
        let (lo, hi) = (a.min(b).min(n), a.max(b).min(n));
        prop_assert!(idf_formula(n, hi) >= 1.0);
        prop_assert!(idf_formula(n, lo) >= idf_formula(n, hi));
    }

    #[test]
    fn idf_table_counts_documents_not_occurrences(t in sentence_text()) {
        let d1 = Document::new("a", "", &[t.as_str(), t.as_str()], None).unwrap();
        let d2 = Document::new("b", "", &["nothing shared here"], None).unwrap();
        let idf = IdfTable::from_documents(&[d1.clone(), d2]);
        for w in d1.sentences[0].words() {
            prop_assert_eq!(idf.doc_freq(w), 1);
        }
    }

    #[test]
    fn lexicons_ignore_row_order(perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle()) {
        let s = ScoredLexicon::parse(shuffled_lines(MRC, &perm).as_bytes()).unwrap();
        let c = CategoryLexicon::parse(shuffled_lines(INQ, &perm).as_bytes()).unwrap();
        prop_assert_eq!(s.content_hash(), ScoredLexicon::parse(MRC.as_bytes()).unwrap().content_hash());
        prop_assert_eq!(c.content_hash(), CategoryLexicon::parse(INQ.as_bytes()).unwrap().content_hash());
        prop_assert_eq!(c.lookup_names("happiness").into_iter().collect::<Vec<_>>(), vec!["POSEMO"]);
        prop_assert_eq!(c.lookup_names("dog").len(), 2);
    }
}
