use rand::Rng;
use sparselda::sampler::rng::chain_rng;
use sparselda::sampler::*;

fn corpus(seed: u64, k: usize, vocab_size: usize, docs: usize) -> Synthetic {
    generate_corpus(&SyntheticConfig {
        k,
        vocab_size,
        docs,
        doc_length: 12,
        alpha: 0.4,
        beta: 0.1,
        seed,
    })
    .unwrap()
}

#[test]
fn engines_agree_with_alpha_updates() {
    // equivalence must survive α changing between sweeps
    for seed in 0..8 {
        let s = corpus(seed, 4, 30, 25);
        let hyper = Hyperparameters::symmetric(4, 0.8, 0.05);
        let mut rng_a = chain_rng(seed, 0);
        let mut a = TopicModel::init(&s.corpus, hyper, &mut rng_a).unwrap();
        let mut b = a.clone();
        let mut rng_b = rng_a.clone();
        let mut sparse = SparseSampler::new(&a);
        let mut naive = NaiveSampler::new(TermOrder::Bucketed);
        for sweep in 1..=12 {
            sparse.sweep(&mut a, &s.corpus, &mut rng_a);
            naive.sweep(&mut b, &s.corpus, &mut rng_b);
            assert_eq!(a.assignments(), b.assignments(), "seed {seed} sweep {sweep}");
            if sweep % 4 == 0 {
                let alpha = optimize_alpha(&a);
                a.set_alpha(alpha.clone());
                b.set_alpha(alpha);
                sparse.resync_alpha(&a);
            }
        }
    }
}

#[test]
fn flat_naive_and_sparse_share_the_stationary_law() {
    // different term orders give different chains but the same topic sizes
    // once both have mixed on a planted corpus with one dominant topic
    let s = generate_corpus(&SyntheticConfig { k: 1, vocab_size: 20, docs: 40, doc_length: 20, alpha: 1.0, beta: 0.5, seed: 3 }).unwrap();
    let h = Hyperparameters::symmetric(2, 0.5, 0.1).with_iterations(200).with_opt_interval(0);
    let a = train(&s.corpus, &h, Engine::Naive).unwrap();
    let b = train(&s.corpus, &h, Engine::Sparse).unwrap();
    assert_ne!(a.model.assignments(), b.model.assignments());
    for m in [&a.model, &b.model] {
        assert!(m.counts_consistent(&s.corpus));
        assert_eq!(m.topic_totals().iter().sum::<u32>() as usize, s.corpus.total_tokens());
    }
}

#[test]
fn sparse_draws_follow_full_conditional() {
    let s = corpus(11, 5, 15, 10);
    let mut rng = chain_rng(11, 0);
    let model = TopicModel::init(&s.corpus, Hyperparameters::symmetric(5, 0.3, 0.2), &mut rng).unwrap();
    let mut state = SparseSampler::new(&model);
    let (d, w) = (3, s.corpus.doc(3).tokens[0]);
    state.enter_doc(&model, d);
    let masses = state.bucket_masses(&model, d, w);

    let weights: Vec<f64> = (0..5).map(|t| gibbs_weight_naive(&model, d, w, t)).collect();
    let total: f64 = weights.iter().sum();
    let n = 10_000;
    let mut counts = [0usize; 5];
    for _ in 0..n {
        let u = rng.random::<f64>() * masses.total();
        counts[state.sample(&model, d, w, masses, u).unwrap() as usize] += 1;
    }
    for t in 0..5 {
        let p = weights[t] / total;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        let dev = (counts[t] as f64 - n as f64 * p).abs();
        assert!(dev <= 3.0 * sd + 1.0, "topic {t}: {} vs {}", counts[t], n as f64 * p);
    }
}

#[test]
fn draw_outside_mass_is_an_error() {
    let s = corpus(12, 3, 10, 5);
    let mut rng = chain_rng(0, 0);
    let model = TopicModel::init(&s.corpus, Hyperparameters::symmetric(3, 0.3, 0.2), &mut rng).unwrap();
    let mut state = SparseSampler::new(&model);
    let w = s.corpus.doc(0).tokens[0];
    state.enter_doc(&model, 0);
    let m = state.bucket_masses(&model, 0, w);
    assert!(state.sample(&model, 0, w, m, m.total()).is_err());
    assert!(state.sample(&model, 0, w, m, -1e-9).is_err());
    assert!(state.sample(&model, 0, w, m, f64::NAN).is_err());
}

#[test]
fn single_topic_generator_matches_phi() {
    let s = generate_corpus(&SyntheticConfig { k: 1, vocab_size: 12, docs: 1000, doc_length: 100, alpha: 1.0, beta: 1.0, seed: 21 }).unwrap();
    let n = s.corpus.total_tokens();
    assert_eq!(n, 100_000);
    let mut freq = vec![0usize; 12];
    for doc in s.corpus.docs() {
        for &w in &doc.tokens {
            freq[w as usize] += 1;
        }
    }
    for (w, &c) in freq.iter().enumerate() {
        let p = s.phi[0][w];
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((c as f64 - n as f64 * p).abs() <= 3.0 * sd, "word {w}: {c} vs {}", n as f64 * p);
    }
}

#[test]
fn counts_stay_consistent_across_sweeps() {
    for engine in [Engine::Naive, Engine::Sparse] {
        let s = corpus(5, 4, 25, 20);
        let mut rng = chain_rng(5, 0);
        let mut m = TopicModel::init(&s.corpus, Hyperparameters::symmetric(4, 0.5, 0.1), &mut rng).unwrap();
        let mut sparse = SparseSampler::new(&m);
        let mut naive = NaiveSampler::new(TermOrder::Flat);
        for _ in 0..10 {
            match engine {
                Engine::Naive => naive.sweep(&mut m, &s.corpus, &mut rng),
                Engine::Sparse => sparse.sweep(&mut m, &s.corpus, &mut rng),
            }
            assert!(m.counts_consistent(&s.corpus));
        }
        assert_eq!(m.sweeps(), 10);
    }
}

#[test]
fn checkpoint_resume_continues_the_chain() {
    let s = corpus(8, 3, 20, 15);
    let dir = std::env::temp_dir().join(format!("sparselda-ckpt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("model.json");

    let mut rng = chain_rng(8, 0);
    let mut m = TopicModel::init(&s.corpus, Hyperparameters::symmetric(3, 0.5, 0.1), &mut rng).unwrap();
    let mut sampler = SparseSampler::new(&m);
    for _ in 0..5 {
        sampler.sweep(&mut m, &s.corpus, &mut rng);
    }
    Checkpoint::capture(&m, &s.corpus).write_to(&path).unwrap();
    let mut rng_resumed = rng.clone();
    for _ in 0..5 {
        sampler.sweep(&mut m, &s.corpus, &mut rng);
    }

    let (corpus, mut resumed) = Checkpoint::read_from(&path).unwrap().restore().unwrap();
    assert_eq!(corpus, s.corpus);
    assert_eq!(resumed.sweeps(), 5);
    let mut sampler = SparseSampler::new(&resumed);
    for _ in 0..5 {
        sampler.sweep(&mut resumed, &corpus, &mut rng_resumed);
    }
    assert_eq!(resumed, m);
    std::fs::remove_dir_all(&dir).unwrap();
}
