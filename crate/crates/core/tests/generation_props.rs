use proptest::prelude::*;

use tsforge_core::anomaly::{contaminate, is_arity_valid, plan_anomalies};
use tsforge_core::expr::{EvalContext, ZeroHistory, CLAMP_BOUND};
use tsforge_core::funcgen::{generate_function, FunctionParams};
use tsforge_core::graph::{generate_graph, validate_graph};
use tsforge_core::rng::{substream, Stream};
use tsforge_core::{audit, generate_dataset, parse_expression, GenerationParams, Label};

fn grid() -> impl Strategy<Value = GenerationParams> {
    (
        prop::sample::select(vec![2usize, 5, 20]),
        prop::sample::select(vec![1usize, 2, 4]),
        prop::sample::select(vec![1usize, 2, 4]),
        any::<u64>(),
    )
        .prop_filter_map("more communities than variables", |(d, k, cap, seed)| {
            (k <= d).then(|| GenerationParams {
                d,
                num_communities: k,
                max_indegree: cap,
                seed,
                ..Default::default()
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn graphs_satisfy_every_invariant(p in grid()) {
        let g = generate_graph(&p, &mut substream(p.seed, Stream::Graph)).unwrap();
        prop_assert_eq!(validate_graph(&g, &p), vec![]);
        for v in 0..p.d {
            prop_assert_eq!(g.indegree(v) == 0, g.is_exogenous(v));
        }
        for c in g.communities() {
            let edges = g.edges().iter().filter(|e| c.contains(&e.dst)).count();
            let endo = c.iter().filter(|&&v| !g.is_exogenous(v)).count();
            prop_assert!(edges <= endo * p.max_indegree);
            let capacity = endo * p.max_indegree.min(c.len());
            prop_assert!(edges >= c.len().min(capacity).max(c.len() - 1));
        }
        let again = generate_graph(&p, &mut substream(p.seed, Stream::Graph)).unwrap();
        prop_assert_eq!(g, again);
    }

    #[test]
    fn linked_graphs_are_valid(
        k in 2usize..5,
        extra in 0usize..12,
        cap in 1usize..4,
        links in 1usize..4,
        seed in any::<u64>(),
    ) {
        let p = GenerationParams {
            d: k + links + extra,
            num_communities: k,
            max_indegree: cap.max(2),
            link_communities: true,
            nb_links: links,
            seed,
            ..Default::default()
        };
        let g = generate_graph(&p, &mut substream(seed, Stream::Graph)).unwrap();
        prop_assert_eq!(validate_graph(&g, &p), vec![]);
    }

    #[test]
    fn budget_is_spent_exactly(
        test_length in 10usize..3000,
        ratio in 0.0f64..0.3,
        d in 1usize..8,
        seed in any::<u64>(),
    ) {
        let p = GenerationParams { d, test_length, contamination_ratio: ratio, seed, ..Default::default() };
        let windows = plan_anomalies(&p, &mut substream(seed, Stream::Plan)).unwrap();
        prop_assert_eq!(windows.iter().map(|w| w.len()).sum::<usize>(), p.anomalous_points());
        for (i, a) in windows.iter().enumerate() {
            prop_assert!(a.t_start >= p.train_length && a.t_end <= p.train_length + test_length);
            prop_assert!(windows[..i].iter().all(|b| !a.overlaps(b)));
        }
    }

    #[test]
    fn mutations_stay_valid(seed in any::<u64>(), parents in prop::collection::btree_set(0usize..6, 0..4)) {
        let parents: Vec<usize> = parents.into_iter().collect();
        let fp = FunctionParams::default();
        let f = generate_function(&parents, &fp, &mut substream(seed, Stream::Function(0))).unwrap();
        let c = contaminate(&f, &parents, &fp, &mut substream(seed, Stream::Mutation(0)), |_| true);
        prop_assert!(is_arity_valid(&c.mutated));
        prop_assert_ne!(&c.mutated, &f);
        let text = c.mutated.to_string();
        let back = parse_expression(&text, 6).unwrap();
        for t in 0..20 {
            let ctx = EvalContext::new(t, &ZeroHistory);
            let v = c.mutated.evaluate(&ctx);
            prop_assert!(v.is_finite());
            prop_assert_eq!(v.to_bits(), back.evaluate(&ctx).to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn runs_are_sound_and_reproducible(
        d in 1usize..8,
        k in 1usize..3,
        cap in 1usize..4,
        ratio in 0.0f64..0.2,
        propagation_prob in 0.0f64..=1.0,
        window_agg in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let p = GenerationParams {
            d,
            num_communities: k.min(d),
            max_indegree: cap,
            train_length: 150,
            test_length: 400,
            contamination_ratio: ratio,
            propagation_prob,
            enable_window_agg: window_agg,
            seed,
            ..Default::default()
        };
        let r = generate_dataset(&p).unwrap();
        prop_assert_eq!(audit(&r), vec![]);
        prop_assert_eq!(r.labels.count(Label::Anomalous), p.anomalous_points());
        prop_assert_eq!(validate_graph(&r.graph, &p), vec![]);
        prop_assert_eq!(generate_dataset(&p).unwrap(), r);
    }
}

#[test]
fn zero_ratio_delivers_the_clean_track() {
    let p = GenerationParams {
        contamination_ratio: 0.0,
        train_length: 100,
        test_length: 300,
        seed: 9,
        ..Default::default()
    };
    let r = generate_dataset(&p).unwrap();
    assert!(r.anomalies.is_empty());
    assert_eq!(r.test, r.clean_test);
    assert_eq!(r.labels.count(Label::Normal), 300 * p.d);
}

#[test]
fn noise_scale_follows_train_spread() {
    let p = GenerationParams {
        d: 3,
        train_length: 50_000,
        test_length: 50_000,
        contamination_ratio: 0.0,
        noise_sigma: 0.1,
        seed: 4,
        ..Default::default()
    };
    let noisy = generate_dataset(&p).unwrap();
    let clean = generate_dataset(&GenerationParams { noise_sigma: 0.0, ..p.clone() }).unwrap();
    let std = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
    };
    for j in 0..p.d {
        let train: Vec<f64> = clean.train.column(j).collect();
        let s = std(&train);
        let added: Vec<f64> = noisy
            .train
            .column(j)
            .zip(clean.train.column(j))
            .chain(noisy.test.column(j).zip(clean.test.column(j)))
            .map(|(a, b)| a - b)
            .collect();
        if s == 0.0 {
            assert!(added.iter().all(|&x| x == 0.0));
        } else {
            let rel = std(&added) / (0.1 * s);
            assert!((rel - 1.0).abs() < 0.05, "x{j}: ratio {rel}");
        }
    }
    assert_eq!(noisy.labels, clean.labels);
}

#[test]
fn generated_functions_rarely_saturate() {
    let fp = FunctionParams {
        horizon: 500,
        ..Default::default()
    };
    let (mut clamped, mut total) = (0usize, 0usize);
    for seed in 0..10_000u64 {
        let parents: &[usize] = match seed % 3 {
            0 => &[],
            1 => &[0],
            _ => &[1, 2],
        };
        let f = generate_function(parents, &fp, &mut substream(seed, Stream::Function(0))).unwrap();
        for t in 0..500 {
            let v = f.evaluate(&EvalContext::new(t, &ZeroHistory));
            clamped += (v.abs() >= CLAMP_BOUND) as usize;
            total += 1;
        }
    }
    let frac = clamped as f64 / total as f64;
    assert!(frac < 0.01, "clamped fraction {frac}");
}
