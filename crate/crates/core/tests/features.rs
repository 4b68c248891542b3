use swb_core::data_model::{
    generate_corpus, Dataset, Gender, GeneratorConfig, LivingPlace, PerDimension, Post, Profile, SwbLabels, UserRecord,
};
use swb_core::features::{
    apply_normalization, build_matrix, extract_behavioral, extract_demographic, extract_linguistic, fit_normalization,
    FeatureFamily, FeatureMatrix, FeatureSet, WindowSpec, BEHAVIORAL_FEATURES, DEMOGRAPHIC_FEATURES, SECONDS_PER_DAY,
};
use swb_core::lexicon::Lexicon;
use swb_core::numerics::DenseMatrix;
use swb_core::Error;

const SURVEY: i64 = 1_350_000_000;

fn profile(gender: Gender, age: u32, living_place: LivingPlace) -> Profile {
    Profile {
        user_id: "x".into(),
        gender,
        age,
        living_place,
        nickname: "nick".into(),
        description: String::new(),
        followers_count: 10,
        followees_count: 5,
        bi_followers_count: 2,
        statuses_count: 600,
        favourites_count: 0,
        geo_enabled: false,
        allow_all_comment: true,
        allow_all_act_msg: false,
        account_created_at: SURVEY - 400 * SECONDS_PER_DAY,
    }
}

fn post(timestamp: i64, text: &str, is_repost: bool) -> Post {
    Post {
        timestamp,
        text: text.into(),
        is_repost,
        mentions_count: 0,
        urls_count: 0,
        hashtags_count: 0,
        comments_received: 0,
        reposts_received: 0,
    }
}

fn record(posts: Vec<Post>) -> UserRecord {
    UserRecord {
        profile: profile(Gender::Female, 25, LivingPlace::OtherCity),
        posts,
        survey_time: SURVEY,
        labels: SwbLabels::from_fn(|_| 30),
    }
}

fn feature(values: &[f64; 26], name: &str) -> f64 {
    values[BEHAVIORAL_FEATURES.iter().position(|n| *n == name).unwrap()]
}

#[test]
fn demographic_encodings() {
    assert_eq!(
        extract_demographic(&profile(Gender::Male, 30, LivingPlace::FirstTier)),
        [1.0, 30.0, 3.0]
    );
    assert_eq!(
        extract_demographic(&profile(Gender::Female, 18, LivingPlace::Rural)),
        [0.0, 18.0, 1.0]
    );
    let a = extract_demographic(&profile(Gender::Male, 40, LivingPlace::OtherCity));
    let b = extract_demographic(&profile(Gender::Male, 40, LivingPlace::Rural));
    assert_eq!(a[..2], b[..2]);
    assert_ne!(a[2], b[2]);
}

#[test]
fn empty_window_gives_zero_ratios() {
    let r = record(vec![post(SURVEY - 30 * SECONDS_PER_DAY, "old news", false)]);
    let f = extract_behavioral(&r, &WindowSpec::default());
    assert_eq!(feature(&f, "posts_in_window"), 0.0);
    for name in [
        "repost_ratio",
        "mean_post_length",
        "night_post_ratio",
        "weekend_post_ratio",
        "mention_ratio",
        "link_ratio",
        "hashtag_ratio",
        "emoticon_ratio",
        "mean_comments_received",
        "mean_reposts_received",
    ] {
        assert_eq!(feature(&f, name), 0.0, "{name}");
    }
}

#[test]
fn repost_ratio_definition() {
    let posts = (0..10).map(|i| post(SURVEY - 1000 + i * 10, "hello", i < 4)).collect();
    let f = extract_behavioral(&record(posts), &WindowSpec::default());
    assert_eq!(feature(&f, "posts_in_window"), 10.0);
    assert_eq!(feature(&f, "repost_ratio"), 0.4);
    assert_eq!(feature(&f, "original_posts_in_window"), 6.0);
}

fn has_emoticon(text: &str) -> bool {
    text.match_indices('[').any(|(start, _)| {
        let rest = &text[start + 1..];
        match rest.find(']') {
            Some(end) => {
                let inner = &rest[..end];
                let n = inner.chars().count();
                (1..=8).contains(&n) && !inner.contains('[') && !inner.chars().any(char::is_whitespace)
            }
            None => false,
        }
    })
}

/// Straightforward recomputation of one behavioral feature from raw fields.
fn brute_behavioral(r: &UserRecord, before_days: i64, after_days: i64, name: &str) -> f64 {
    let p = &r.profile;
    let lo = r.survey_time - before_days * 86_400;
    let hi = r.survey_time + after_days * 86_400;
    let w: Vec<&Post> = r
        .posts
        .iter()
        .filter(|x| x.timestamp >= lo && x.timestamp <= hi)
        .collect();
    let n = w.len() as f64;
    let share = |pred: &dyn Fn(&Post) -> bool| {
        if w.is_empty() {
            0.0
        } else {
            w.iter().filter(|x| pred(x)).count() as f64 / n
        }
    };
    let mean = |f: &dyn Fn(&Post) -> f64| {
        if w.is_empty() {
            0.0
        } else {
            w.iter().map(|x| f(x)).sum::<f64>() / n
        }
    };
    let b = |v: bool| if v { 1.0 } else { 0.0 };
    match name {
        "followers_count" => p.followers_count as f64,
        "followees_count" => p.followees_count as f64,
        "bi_followers_count" => p.bi_followers_count as f64,
        "followers_to_followees_ratio" => {
            if p.followees_count == 0 {
                0.0
            } else {
                p.followers_count as f64 / p.followees_count as f64
            }
        }
        "bi_follow_ratio" => {
            if p.followees_count == 0 {
                0.0
            } else {
                p.bi_followers_count as f64 / p.followees_count as f64
            }
        }
        "statuses_count" => p.statuses_count as f64,
        "favourites_count" => p.favourites_count as f64,
        "posts_in_window" => n,
        "repost_ratio" => share(&|x| x.is_repost),
        "original_posts_in_window" => w.iter().filter(|x| !x.is_repost).count() as f64,
        "mean_post_length" => mean(&|x| x.text.chars().count() as f64),
        "mean_posts_per_day" => {
            let days = (before_days + after_days) as f64;
            if days == 0.0 {
                0.0
            } else {
                n / days
            }
        }
        "night_post_ratio" => share(&|x| x.timestamp.rem_euclid(86_400) < 6 * 3600),
        // Day 0 (1970-01-01) was a Thursday; (day + 4) % 7 counts from Sunday = 0.
        "weekend_post_ratio" => share(&|x| matches!((x.timestamp.div_euclid(86_400) + 4).rem_euclid(7), 0 | 6)),
        "mention_ratio" => share(&|x| x.mentions_count > 0),
        "link_ratio" => share(&|x| x.urls_count > 0),
        "hashtag_ratio" => share(&|x| x.hashtags_count > 0),
        "emoticon_ratio" => share(&|x| has_emoticon(&x.text)),
        "mean_comments_received" => mean(&|x| x.comments_received as f64),
        "mean_reposts_received" => mean(&|x| x.reposts_received as f64),
        "geo_enabled" => b(p.geo_enabled),
        "allow_all_comment" => b(p.allow_all_comment),
        "allow_all_act_msg" => b(p.allow_all_act_msg),
        "nickname_length" => p.nickname.chars().count() as f64,
        "description_length" => p.description.chars().count() as f64,
        "account_age_days" => (r.survey_time - p.account_created_at) as f64 / 86_400.0,
        other => panic!("no oracle for {other}"),
    }
}

#[test]
fn behavioral_matches_brute_force_on_synthetic_users() {
    let data = generate_corpus(&GeneratorConfig::paper_like(60), 21).unwrap();
    for (before, after) in [(7, 7), (14, 14), (0, 3)] {
        let window = WindowSpec::days(before, after);
        for r in data.records() {
            let f = extract_behavioral(r, &window);
            for (j, name) in BEHAVIORAL_FEATURES.iter().enumerate() {
                let want = brute_behavioral(r, before, after, name);
                assert!(
                    (f[j] - want).abs() <= 1e-12 * want.abs().max(1.0),
                    "{} {name}: {} vs {want}",
                    r.profile.user_id,
                    f[j]
                );
            }
        }
    }
}

#[test]
fn window_growth_never_loses_posts() {
    let data = generate_corpus(&GeneratorConfig::paper_like(30), 5).unwrap();
    for r in data.records() {
        let mut last = 0.0;
        for days in [0, 1, 3, 7, 14, 30] {
            let f = extract_behavioral(r, &WindowSpec::days(days, days));
            let n = feature(&f, "posts_in_window");
            assert!(n >= last);
            last = n;
        }
    }
}

#[test]
fn linguistic_edge_cases() {
    let lex = Lexicon::demo();
    let w = WindowSpec::default();
    let none = record(vec![post(SURVEY - 20 * SECONDS_PER_DAY, "happy", false)]);
    assert!(extract_linguistic(&none, &w, &lex).iter().all(|v| *v == 0.0));

    let one = record(vec![post(SURVEY, "开心", false)]);
    let f = extract_linguistic(&one, &w, &lex);
    let posemo = lex.categories().iter().position(|c| c.name == "posemo").unwrap();
    assert_eq!(lex.lookup("开心"), Some(&[posemo][..]));
    for (j, v) in f.iter().enumerate() {
        assert_eq!(*v, if j == posemo { 1.0 } else { 0.0 });
    }
}

#[test]
fn linguistic_is_post_order_invariant_and_sums_per_post() {
    let lex = Lexicon::demo();
    let w = WindowSpec::default();
    let data = generate_corpus(&GeneratorConfig::paper_like(20), 9).unwrap();
    for r in data.records() {
        let f = extract_linguistic(r, &w, &lex);
        let mut shuffled = r.clone();
        shuffled.posts.reverse();
        assert_eq!(extract_linguistic(&shuffled, &w, &lex), f);

        let mut counts = vec![0u64; lex.len()];
        let mut total = 0u64;
        for p in r.posts.iter().filter(|p| w.contains(r.survey_time, p.timestamp)) {
            let c = swb_core::lexicon::count_categories(&swb_core::lexicon::segment(&p.text, &lex), &lex);
            for (a, b) in counts.iter_mut().zip(&c.counts) {
                *a += b;
            }
            total += c.total_tokens;
        }
        for (v, c) in f.iter().zip(&counts) {
            let want = if total == 0 { 0.0 } else { *c as f64 / total as f64 };
            assert!((v - want).abs() < 1e-15);
        }
    }
}

fn lexicon_with(k: usize) -> Lexicon {
    let mut text = String::from("%\n");
    for i in 1..=k {
        text.push_str(&format!("{i}\tcat{i}\n"));
    }
    text.push_str("%\n");
    for i in 1..=k {
        text.push_str(&format!("word{i}\t{i}\n"));
    }
    Lexicon::parse_str(&text, std::path::Path::new("gen.dic")).unwrap()
}

#[test]
fn column_counts_per_family() {
    let data = generate_corpus(&GeneratorConfig::paper_like(10), 1).unwrap();
    let w = WindowSpec::default();
    let demo = Lexicon::demo();
    assert_eq!(build_matrix(&data, FeatureSet::D, &w, None).unwrap().values.cols(), 3);
    assert_eq!(build_matrix(&data, FeatureSet::B, &w, None).unwrap().values.cols(), 26);
    assert_eq!(
        build_matrix(&data, FeatureSet::L, &w, Some(&demo))
            .unwrap()
            .values
            .cols(),
        demo.len()
    );

    let big = lexicon_with(88);
    let full = build_matrix(&data, FeatureSet::ALL, &w, Some(&big)).unwrap();
    assert_eq!(full.values.cols(), 117);
    assert_eq!(full.count(FeatureFamily::Linguistic), 88);

    let bl = build_matrix(&data, "B+L".parse().unwrap(), &w, Some(&demo)).unwrap();
    assert_eq!(bl.values.cols(), 26 + demo.len());
    assert!(bl
        .column_names()
        .iter()
        .all(|n| !DEMOGRAPHIC_FEATURES.contains(&n.as_str())));

    assert!(matches!(build_matrix(&data, FeatureSet::ALL, &w, None), Err(Error::Config(m)) if m.contains("lexicon")));
}

#[test]
fn family_composition_is_concatenation() {
    let data = generate_corpus(&GeneratorConfig::paper_like(25), 2).unwrap();
    let w = WindowSpec::default();
    let lex = Lexicon::demo();
    let d = build_matrix(&data, FeatureSet::D, &w, None).unwrap();
    let b = build_matrix(&data, FeatureSet::B, &w, None).unwrap();
    let l = build_matrix(&data, FeatureSet::L, &w, Some(&lex)).unwrap();
    let dbl = build_matrix(&data, FeatureSet::ALL, &w, Some(&lex)).unwrap();
    for i in 0..data.len() {
        let joined: Vec<f64> = [d.values.row(i), b.values.row(i), l.values.row(i)].concat();
        assert_eq!(dbl.values.row(i), &joined[..]);
    }
    let mut names = d.column_names();
    names.extend(b.column_names());
    names.extend(l.column_names());
    assert_eq!(dbl.column_names(), names);
    assert_eq!(dbl.select_families(FeatureSet::B), b);
}

fn single_column(values: &[f64]) -> FeatureMatrix {
    FeatureMatrix {
        user_ids: (0..values.len()).map(|i| format!("u{i}")).collect(),
        columns: vec![swb_core::features::FeatureColumn {
            name: "age".into(),
            family: FeatureFamily::Demographic,
        }],
        values: DenseMatrix::from_vec(values.len(), 1, values.to_vec()),
        window: WindowSpec::default(),
    }
}

#[test]
fn normalization_formula_and_degenerate_cases() {
    let m = single_column(&[2.0, 4.0, 6.0]);
    let p = fit_normalization(&m, &[0, 1, 2]).unwrap();
    assert_eq!(
        apply_normalization(&m, &p).unwrap().values.column(0),
        vec![0.0, 0.5, 1.0]
    );

    let c = single_column(&[5.0, 5.0, 5.0]);
    let p = fit_normalization(&c, &[0, 1, 2]).unwrap();
    assert_eq!(apply_normalization(&c, &p).unwrap().values.column(0), vec![0.0; 3]);

    let split = single_column(&[1.0, 3.0, 9.0, -4.0]);
    let p = fit_normalization(&split, &[0, 1]).unwrap();
    assert_eq!(
        apply_normalization(&split, &p).unwrap().values.column(0),
        vec![0.0, 1.0, 1.0, 0.0]
    );

    assert!(fit_normalization(&m, &[]).is_err());
    let other = build_matrix(
        &generate_corpus(&GeneratorConfig::paper_like(3), 0).unwrap(),
        FeatureSet::D,
        &WindowSpec::default(),
        None,
    )
    .unwrap();
    assert!(matches!(apply_normalization(&other, &p), Err(Error::Dimension(_))));
}

#[test]
fn normalized_training_rows_span_unit_interval() {
    let data = generate_corpus(&GeneratorConfig::paper_like(50), 8).unwrap();
    let m = build_matrix(&data, FeatureSet::ALL, &WindowSpec::default(), Some(&Lexicon::demo())).unwrap();
    let rows: Vec<usize> = (0..50).step_by(2).collect();
    let p = fit_normalization(&m, &rows).unwrap();
    let out = apply_normalization(&m, &p).unwrap();
    for j in 0..out.values.cols() {
        let col = out.values.column(j);
        assert!(col.iter().all(|v| (0.0..=1.0).contains(v)));
        if p.max[j] > p.min[j] {
            let train: Vec<f64> = rows.iter().map(|&i| col[i]).collect();
            assert!(train.contains(&0.0) && train.contains(&1.0), "column {j}");
        }
    }
}

#[test]
fn csv_round_trip() {
    let data = generate_corpus(&GeneratorConfig::paper_like(12), 4).unwrap();
    let m = build_matrix(&data, FeatureSet::ALL, &WindowSpec::default(), Some(&Lexicon::demo())).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    m.write_csv(&path).unwrap();
    assert_eq!(FeatureMatrix::read_csv(&path, WindowSpec::default()).unwrap(), m);
}

#[test]
fn rows_follow_dataset_order() {
    let data = generate_corpus(&GeneratorConfig::paper_like(15), 6).unwrap();
    let mut records = data.records().to_vec();
    records.reverse();
    let reversed = Dataset::new(records, PerDimension::default()).unwrap();
    let a = build_matrix(&data, FeatureSet::D, &WindowSpec::default(), None).unwrap();
    let b = build_matrix(&reversed, FeatureSet::D, &WindowSpec::default(), None).unwrap();
    for i in 0..15 {
        assert_eq!(a.values.row(i), b.values.row(14 - i));
        assert_eq!(a.user_ids[i], b.user_ids[14 - i]);
    }
}
