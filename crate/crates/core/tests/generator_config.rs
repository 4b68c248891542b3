use swb_core::data_model::{generate_corpus, Dimension, GeneratorConfig, Marginals};

#[test]
fn documented_example_config_parses_and_generates() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/generator.example.json");
    let config = GeneratorConfig::from_json_file(&path).unwrap();
    assert_eq!(config.n_users, 300);
    assert_eq!(config.marginals, Marginals::Balanced);
    assert_eq!(config.planted[Dimension::PersonalGrowth].intercept, Some(45.0));
    assert_eq!(config.planted[Dimension::Autonomy].weights["repost_ratio"], -1.5);

    let data = generate_corpus(&config, 1).unwrap();
    assert_eq!(data.len(), 300);
    for r in data.records() {
        assert!((20..=120).contains(&r.posts.len()));
    }
}

#[test]
fn unknown_config_field_is_rejected() {
    let mut json: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&GeneratorConfig::paper_like(10)).unwrap()).unwrap();
    json["planted"]["autonomy"]["weights"]["no_such_feature"] = 1.0.into();
    let config: GeneratorConfig = serde_json::from_value(json).unwrap();
    assert!(generate_corpus(&config, 0).is_err());
}
