//! Run configuration text and metrics records round-trip.

use proptest::prelude::*;

use ptrlogic::eval::RunMetrics;
use ptrlogic::RunConfig;

fn assignments() -> impl Strategy<Value = Vec<(&'static str, String)>> {
    let one = prop_oneof![
        (1usize..500).prop_map(|v| ("kb_size", v.to_string())),
        (1usize..4).prop_map(|v| ("difficulty", v.to_string())),
        any::<u64>().prop_map(|v| ("rng_seed", v.to_string())),
        any::<u64>().prop_map(|v| ("train_seed", v.to_string())),
        (1usize..512).prop_map(|v| ("hidden_size", v.to_string())),
        (1usize..512).prop_map(|v| ("embed_size", v.to_string())),
        prop_oneof![Just("ws"), Just("bpe")].prop_map(|v| ("tokenizer", v.to_string())),
        prop_oneof![Just("off"), Just("random"), Just("canonical")].prop_map(|v| ("normalize", v.to_string())),
        prop_oneof![Just("pointer"), Just("vanilla")].prop_map(|v| ("decoder", v.to_string())),
        (1e-5f64..1.0).prop_map(|v| ("learning_rate", v.to_string())),
        prop_oneof![Just("none".to_string()), (0.0f64..=1.0).prop_map(|v| v.to_string())]
            .prop_map(|v| ("target_exact_match", v)),
        any::<bool>().prop_map(|v| ("hash_symbols", v.to_string())),
    ];
    prop::collection::vec(one, 0..12)
}

proptest! {
    #[test]
    fn config_text_round_trips(sets in assignments()) {
        let text: String = sets.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        let c = RunConfig::parse(&text).unwrap();
        let emitted = c.to_text();
        let back = RunConfig::parse(&emitted).unwrap();
        prop_assert_eq!(back.to_text(), emitted);
        prop_assert_eq!(back.model.clone(), c.model.clone());
        prop_assert_eq!(back.train.clone(), c.train.clone());
        prop_assert_eq!(back.target_exact_match, c.target_exact_match);
    }

    #[test]
    fn metrics_lines_round_trip(em in 0.0f64..=1.0, f1 in 0.0f64..=1.0, pairs in 0usize..10_000) {
        let m = RunMetrics {
            label: "run".into(),
            pairs,
            exact_match: em,
            token_accuracy: em,
            precision: f1,
            recall: f1,
            f1,
            loss_curve: Vec::new(),
            wall_clock_secs: 0.5,
        };
        let line = m.to_json_line();
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(RunMetrics::from_json_line(&line).unwrap(), m);
    }
}
