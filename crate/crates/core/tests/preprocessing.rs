use std::io::Cursor;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use sparselda::corpus::{build_corpus, clean_text, read_csv, read_jsonl, Pipeline, RawDocument, REASON_EMPTY};

#[derive(Deserialize)]
struct Golden {
    text: String,
    clean: String,
    tokens: Vec<String>,
}

fn golden() -> Vec<Golden> {
    let raw = include_str!("fixtures/golden_tweets.json");
    serde_json::from_str(raw).unwrap()
}

#[test]
fn golden_tweets_clean_and_tokenize() {
    let cases = golden();
    assert_eq!(cases.len(), 20);
    let pipeline = Pipeline::default();
    for g in &cases {
        assert_eq!(clean_text(&g.text), g.clean, "clean: {}", g.text);
        assert_eq!(pipeline.process(&g.text), g.tokens, "tokens: {}", g.text);
    }
}

#[test]
fn golden_tweets_as_corpus() {
    let raw: Vec<RawDocument> = golden()
        .iter()
        .enumerate()
        .map(|(i, g)| RawDocument::new(format!("t{i}"), g.text.clone()))
        .collect();
    let corpus = build_corpus(&raw, &Pipeline::default());
    let expected_empty: Vec<String> = golden()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.tokens.is_empty())
        .map(|(i, _)| format!("t{i}"))
        .collect();
    let dropped: Vec<String> = corpus.dropped().iter().map(|d| d.id.clone()).collect();
    assert_eq!(dropped, expected_empty);
    assert!(corpus.dropped().iter().all(|d| d.reason == REASON_EMPTY));
    assert_eq!(corpus.num_docs() + dropped.len(), 20);

    // decoding recovers the golden token lists
    let goldens = golden();
    let mut kept = goldens.iter().filter(|g| !g.tokens.is_empty());
    for doc in corpus.docs() {
        let g = kept.next().unwrap();
        let words: Vec<&str> = doc.tokens.iter().map(|&w| corpus.vocab().word(w)).collect();
        assert_eq!(words, g.tokens);
    }
}

/// Random strings biased towards the characters the cleaning regexes act on.
fn noisy_string(rng: &mut ChaCha8Rng) -> String {
    const PIECES: &[&str] = &[
        "http", "https://", "t.co/", "@", "#", " ", "  ", "\t", "\n", "a", "Z", "m", "x", "0", "9", "_", "-", ".", "/", "?", "é", "ß",
        "Ω", "中", "😷", "\u{200b}", "\u{a0}", "RT", "Pox", "amp;",
    ];
    let n = rng.random_range(0..24);
    (0..n).map(|_| PIECES[rng.random_range(0..PIECES.len())]).collect()
}

#[test]
fn clean_text_idempotent_fuzz() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let s = noisy_string(&mut rng);
        let once = clean_text(&s);
        assert_eq!(clean_text(&once), once, "input {s:?}");
        assert!(once.bytes().all(|b| b.is_ascii_lowercase() || b == b' '), "{once:?}");
        assert!(!once.contains("  ") && once.trim() == once, "{once:?}");
    }
}

#[test]
fn csv_and_jsonl_agree() {
    let csv = "id,text\n1,Monkey pox https://t.co/x\n2,\"Cases, cases, cases!\"\n";
    let jsonl = "{\"id\": 1, \"text\": \"Monkey pox https://t.co/x\"}\n{\"id\": \"2\", \"text\": \"Cases, cases, cases!\"}\n";
    let a = read_csv(Cursor::new(csv), "id", "text").unwrap();
    let b = read_jsonl(Cursor::new(jsonl), "id", "text").unwrap();
    assert_eq!(a.docs, b.docs);
    let corpus = build_corpus(&a.docs, &Pipeline::default());
    assert_eq!(corpus.vocab().words(), ["monkey", "pox", "case"]);
    assert_eq!(corpus.doc(1).tokens, vec![2, 2, 2]);
}

#[test]
fn malformed_jsonl_rows_are_reported_and_skipped() {
    let jsonl = "{\"id\": 1, \"text\": \"ok row\"}\nnot json\n{\"id\": 3}\n\n{\"id\": 4, \"text\": \"another\"}\n";
    let r = read_jsonl(Cursor::new(jsonl), "id", "text").unwrap();
    assert_eq!(r.docs.len(), 2);
    assert_eq!(r.failures.len(), 2);
    assert_eq!(r.failures[1].doc_id.as_deref(), Some("3"));
}
