use std::collections::BTreeSet;

use proptest::prelude::*;
use twentyq_core::catalog::{parse_catalog, preprocess, write_catalog, Catalog, MovieRecord, PreprocessOptions};
use twentyq_core::kgraph::{build_indices, LearnedStats};
use twentyq_core::{Answer, AnswerSignal, Belief, Level};

fn arb_movie(i: usize) -> impl Strategy<Value = MovieRecord> {
    let values = |prefix: &'static str, n: usize| {
        proptest::collection::btree_set(0..n, 0..3)
            .prop_map(move |s| s.into_iter().map(|v| format!("{prefix}{v}")).collect::<Vec<_>>())
    };
    (
        proptest::option::of(1900i32..2025),
        values("g", 5),
        values("s", 4),
        values("a", 8),
        values("d", 4),
        values("c", 3),
    )
        .prop_map(move |(year, g, s, a, d, c)| {
            let mut m = MovieRecord::new(format!("id{i:03}"), format!("Film {i}"), year);
            for (level, vals) in [
                (Level::Genre, g),
                (Level::Subject, s),
                (Level::Actor, a),
                (Level::Director, d),
                (Level::MusicComposer, c),
            ] {
                let refs: Vec<&str> = vals.iter().map(String::as_str).collect();
                if !refs.is_empty() {
                    m = m.with(level, &refs);
                }
            }
            m
        })
}

fn arb_catalog() -> impl Strategy<Value = Catalog> {
    (1usize..40)
        .prop_flat_map(|n| (0..n).map(arb_movie).collect::<Vec<_>>())
        .prop_map(|movies| Catalog::new(movies, "prop").unwrap())
}

/// A belief over `n` movies with strictly positive weights.
fn arb_belief(max: usize) -> impl Strategy<Value = Belief> {
    proptest::collection::vec(0.001f64..1.0, 1..max)
        .prop_map(|w| Belief::from_weights(w.into_iter().enumerate().map(|(i, w)| (format!("b{i:03}"), w))).unwrap())
}

fn split(belief: &Belief, mask: &[bool]) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut yes = BTreeSet::new();
    let mut no = BTreeSet::new();
    for (i, id) in belief.ids().enumerate() {
        if mask[i % mask.len()] {
            yes.insert(id.to_string());
        } else {
            no.insert(id.to_string());
        }
    }
    (yes, no)
}

fn signal(yes: BTreeSet<String>, no: BTreeSet<String>, kind: Answer) -> AnswerSignal {
    AnswerSignal {
        yes_set: yes,
        no_set: no,
        kind,
    }
}

proptest! {
    #[test]
    fn preprocess_is_idempotent(catalog in arb_catalog(), f in 0.0f64..0.5) {
        let options = PreprocessOptions { min_tag_fraction: f, ..Default::default() };
        if let Ok(once) = preprocess(&catalog, &options) {
            let twice = preprocess(&once, &options).unwrap();
            prop_assert_eq!(once, twice);
        }
    }

    #[test]
    fn indices_agree(catalog in arb_catalog()) {
        let idx = build_indices(&catalog);
        for (movie, entities) in idx.forward_map() {
            for e in entities {
                prop_assert!(idx.backward(e).contains(movie));
            }
        }
        for (entity, movies) in idx.backward_map() {
            prop_assert!(!movies.is_empty());
            for m in movies {
                prop_assert!(idx.forward(m).contains(entity));
            }
        }
        prop_assert_eq!(idx.movie_count(), catalog.len());
    }

    #[test]
    fn catalog_round_trips_through_the_file_format(catalog in arb_catalog()) {
        let mut buf = Vec::new();
        write_catalog(&catalog, &mut buf).unwrap();
        let back = parse_catalog(std::str::from_utf8(&buf).unwrap(), "prop").unwrap().value;
        prop_assert_eq!(back.movies(), catalog.movies());
    }

    #[test]
    fn stats_round_trip(catalog in arb_catalog(), picks in proptest::collection::vec(0usize..1000, 0..20)) {
        let idx = build_indices(&catalog);
        let ids: Vec<&str> = catalog.ids().collect();
        let mut stats = LearnedStats::new();
        for p in picks {
            stats.record_election(&idx, ids[p % ids.len()]).unwrap();
        }
        let mut buf = Vec::new();
        stats.save(&mut buf).unwrap();
        prop_assert_eq!(LearnedStats::load(buf.as_slice()).unwrap(), stats);
    }

    #[test]
    fn updates_stay_normalized_positive_and_ordered(
        belief in arb_belief(60),
        mask in proptest::collection::vec(any::<bool>(), 1..8),
        yes in any::<bool>(),
    ) {
        let (a, b) = split(&belief, &mask);
        let kind = if yes { Answer::Yes } else { Answer::No };
        let next = belief.apply_answer(&signal(a.clone(), b.clone(), kind), 1.0).unwrap();
        prop_assert!((next.total() - 1.0).abs() < 1e-9);
        for (id, p) in next.iter() {
            prop_assert!(p > 0.0, "{} driven to zero", id);
        }
        for set in [&a, &b] {
            for x in set {
                for y in set {
                    if belief.prob(x) > belief.prob(y) {
                        prop_assert!(next.prob(x) > next.prob(y));
                    }
                }
            }
        }
    }

    #[test]
    fn swapped_answers_cancel(
        belief in arb_belief(60),
        mask in proptest::collection::vec(any::<bool>(), 1..8),
    ) {
        let (a, b) = split(&belief, &mask);
        let there = belief.apply_answer(&signal(a.clone(), b.clone(), Answer::Yes), 1.0).unwrap();
        let back = there.apply_answer(&signal(b, a, Answer::No), 1.0).unwrap();
        for (id, p) in belief.iter() {
            prop_assert!((back.prob(id) / p - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn redistribution_keeps_differences(
        belief in arb_belief(60),
        mask in proptest::collection::vec(any::<bool>(), 1..8),
    ) {
        let (rejected, kept) = split(&belief, &mask);
        prop_assume!(!kept.is_empty());
        let next = belief.eliminate_and_redistribute(&rejected).unwrap();
        prop_assert!((next.total() - 1.0).abs() < 1e-9);
        for id in &rejected {
            prop_assert_eq!(next.prob(id), 0.0);
        }
        let kept: Vec<&String> = kept.iter().collect();
        for pair in kept.windows(2) {
            let before = belief.prob(pair[0]) - belief.prob(pair[1]);
            let after = next.prob(pair[0]) - next.prob(pair[1]);
            prop_assert!((before - after).abs() < 1e-15);
        }
    }

    #[test]
    fn top_k_is_sorted_and_bounded(belief in arb_belief(30), k in 1usize..10) {
        let top = belief.top_k(k);
        prop_assert_eq!(top.len(), k.min(belief.len()));
        for w in top.windows(2) {
            prop_assert!(w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
        }
    }
}
