use std::path::{Path, PathBuf};

use swb_core::data_model::{
    generate_corpus_with_lexicon, load_dataset, write_dataset, Dataset, GeneratorConfig, Marginals,
};
use swb_core::evaluation::{analyze, format_gamma, run_sweep, SweepConfig, SweepReport};
use swb_core::features::{build_matrix, fit_normalization, FeatureSet};
use swb_core::lexicon::{parse_lexicon, Lexicon};

use crate::args::{AnalyzeArgs, ExtractArgs, GenerateArgs, ReportArgs, SweepArgs};
use crate::config::{resolve_seed, DataSettings, RunConfig};
use crate::error::CliError;

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Data(swb_core::Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

/// `demo` selects the bundled lexicon; anything else is a path.
fn read_lexicon(spec: &str) -> Result<Lexicon, CliError> {
    if spec == "demo" {
        Ok(Lexicon::demo())
    } else {
        Ok(parse_lexicon(spec)?)
    }
}

fn lexicon_for(families: FeatureSet, settings: &DataSettings) -> Result<Option<Lexicon>, CliError> {
    match (&settings.lexicon, families.linguistic) {
        (Some(spec), _) => read_lexicon(spec).map(Some),
        (None, true) => Err(CliError::Usage(
            "linguistic features (L) need a lexicon: pass --lexicon <file.dic> or --lexicon demo".into(),
        )),
        (None, false) => Ok(None),
    }
}

fn load_data(settings: &DataSettings) -> Result<Dataset, CliError> {
    let data = load_dataset(&settings.data)?;
    Ok(match settings.active_threshold {
        Some(t) => data.filter_active(t),
        None => data,
    })
}

pub fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(path) => GeneratorConfig::from_json_file(path)
            .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?,
        None => GeneratorConfig {
            marginals: Marginals::Balanced,
            ..GeneratorConfig::paper_like(1785)
        },
    };
    if let Some(n) = args.n {
        config.n_users = n;
    }
    if args.paper_marginals {
        config.marginals = Marginals::Paper;
    }
    let seed = resolve_seed(args.seed, None)?;
    let lexicon = match &args.lexicon {
        Some(path) => parse_lexicon(path)?,
        None => Lexicon::demo(),
    };
    let dataset = generate_corpus_with_lexicon(&config, seed, &lexicon)?;
    write_dataset(&dataset, &args.out)?;
    let m = dataset.metadata();
    println!(
        "wrote {} records to {} (female {}, male {}; first-tier {}, other city {}, rural {})",
        dataset.len(),
        args.out.display(),
        m.gender_counts.female,
        m.gender_counts.male,
        m.living_place_counts.first_tier,
        m.living_place_counts.other_city,
        m.living_place_counts.rural
    );
    Ok(())
}

fn default_normalization_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map_or_else(|| "features".into(), |s| s.to_string_lossy().into_owned());
    csv.with_file_name(format!("{stem}.normalization.json"))
}

pub fn extract(args: ExtractArgs) -> Result<(), CliError> {
    let config = RunConfig::load(args.data.config.as_deref())?;
    let settings = DataSettings::merge(&args.data, &config)?;
    let families = match (args.families, config.families.as_deref()) {
        (Some(f), _) => f,
        (None, Some([f])) => *f,
        (None, Some(_)) => {
            return Err(CliError::Usage(
                "config `families` must hold exactly one set for extract".into(),
            ))
        }
        (None, None) => FeatureSet::ALL,
    };
    let lexicon = lexicon_for(families, &settings)?;
    let dataset = load_data(&settings)?;
    let matrix = build_matrix(&dataset, families, &settings.window, lexicon.as_ref())?;
    if dataset.is_empty() {
        return Err(CliError::Data(swb_core::Error::InvalidDataset(
            "dataset has no records".into(),
        )));
    }
    let rows: Vec<usize> = (0..dataset.len()).collect();
    let normalization = fit_normalization(&matrix, &rows)?;
    matrix.write_csv(&args.out)?;
    let norm_path = args
        .normalization
        .unwrap_or_else(|| default_normalization_path(&args.out));
    let json = serde_json::to_string_pretty(&normalization).map_err(swb_core::Error::from)? + "\n";
    write_file(&norm_path, &json)?;
    println!(
        "wrote {} users x {} features ({families}) to {}; normalization to {}",
        dataset.len(),
        matrix.values.cols(),
        args.out.display(),
        norm_path.display()
    );
    Ok(())
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let config = RunConfig::load(args.data.config.as_deref())?;
    let settings = DataSettings::merge(&args.data, &config)?;
    let defaults = SweepConfig::default();
    let sweep = SweepConfig {
        combos: args.combos.or(config.families).unwrap_or(defaults.combos),
        algorithms: args.algorithms.or(config.algorithms).unwrap_or(defaults.algorithms),
        dimensions: args.dimensions.or(config.dimensions).unwrap_or(defaults.dimensions),
        hyperparameters: config.hyperparameters.unwrap_or_default(),
        window: settings.window,
        folds: args.folds.or(config.folds).unwrap_or(defaults.folds),
        seed: resolve_seed(args.seed, config.seed)?,
    };
    if sweep.folds < 2 {
        return Err(CliError::Usage(format!(
            "--folds must be at least 2 (got {})",
            sweep.folds
        )));
    }
    let jobs = args.jobs.or(config.jobs);
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    sweep
        .hyperparameters
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let lexicon = lexicon_for(sweep.families(), &settings)?;
    let out_dir = args.out_dir.or(config.out_dir).unwrap_or_else(|| PathBuf::from("."));
    let dataset = load_data(&settings)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs:?} workers: {e}")))?;
    let report = pool.install(|| run_sweep(&dataset, &sweep, lexicon.as_ref()))?;

    ensure_dir(&out_dir)?;
    write_file(&out_dir.join("report.json"), &report.to_json()?)?;
    write_file(&out_dir.join("report.txt"), &report.render_text())?;
    println!("{} cells written to {}", report.cells.len(), out_dir.display());
    for b in &report.best {
        match (b.families, b.algorithm) {
            (Some(f), Some(a)) => println!(
                "best {}: gamma {} with {} / {}",
                b.dimension,
                format_gamma(b.gamma),
                f,
                a.display_name()
            ),
            _ => println!("best {}: undefined", b.dimension),
        }
    }
    if args.strict && !report.all_converged() {
        let stuck: Vec<String> = report
            .cells
            .iter()
            .filter(|c| !c.converged)
            .map(|c| format!("{} {} {}", c.dimension, c.families, c.algorithm))
            .collect();
        return Err(CliError::NonConvergence(format!(
            "{} cell(s) did not converge: {}",
            stuck.len(),
            stuck.join("; ")
        )));
    }
    Ok(())
}

pub fn analyze_cmd(args: AnalyzeArgs) -> Result<(), CliError> {
    let config = RunConfig::load(args.data.config.as_deref())?;
    let settings = DataSettings::merge(&args.data, &config)?;
    let lexicon = lexicon_for(FeatureSet::new(true, true, false), &settings)?;
    let families = FeatureSet::new(true, true, lexicon.is_some());
    let dataset = load_data(&settings)?;
    let matrix = build_matrix(&dataset, families, &settings.window, lexicon.as_ref())?;
    let report = analyze(&dataset, &matrix)?;
    let out_dir = args.out_dir.or(config.out_dir).unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&out_dir)?;
    let json = serde_json::to_string_pretty(&report).map_err(swb_core::Error::from)? + "\n";
    write_file(&out_dir.join("analysis.json"), &json)?;
    write_file(&out_dir.join("analysis.txt"), &report.render_text())?;
    println!(
        "analyzed {} users x {} features; wrote {}",
        report.n_users,
        matrix.values.cols(),
        out_dir.join("analysis.txt").display()
    );
    Ok(())
}

pub fn report(args: ReportArgs) -> Result<(), CliError> {
    let report = SweepReport::load(&args.input)?;
    let text = report.render_text();
    match &args.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
