use std::fs::File;
use std::path::{Path, PathBuf};

use creanet::analysis::{
    alter_nonredundant, collective_cq, collective_nonredundant, ego_cq, ego_nonredundant, write_report, AnalysisInputs,
    ReportFormat,
};
use creanet::dataset::{
    read_alter_script, read_ideas, read_ratings, read_tallies, write_gini, write_ideas, write_ratings, write_scores,
    write_tallies, ColumnMapping, IdeaDataset, ScoreRow,
};
use creanet::engine::{AlterScript, DefaultPolicy, Simulator, TrialConfig};
use creanet::metrics::CqScorer;
use creanet::taxonomy::{Lexicon, Taxonomy};
use creanet::textpipe::{StopWords, TextPipeline};
use serde_json::json;

use crate::error::CliError;
use crate::manifest::{sidecar, RunManifest};
use crate::{AnalyzeArgs, FormatArg, ImportArgs, Metric, ScoreArgs, SimulateArgs, TaxonomyArgs, TaxonomyFormatArg};

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(CliError::io(path))
}

fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn mapping(path: Option<&PathBuf>, manifest: &mut RunManifest) -> Result<ColumnMapping, CliError> {
    match path {
        Some(p) => {
            manifest.add_input(p)?;
            read_toml(p)
        }
        None => Ok(ColumnMapping::default()),
    }
}

fn csv_bytes(
    write: impl FnOnce(&mut Vec<u8>) -> Result<(), creanet::dataset::DatasetError>,
) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(buf)
}

fn parent_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))
}

/// A loaded taxonomy with the lexicon and text pipeline used to score it.
struct Scoring {
    taxonomy: Taxonomy,
    lexicon: Lexicon,
    pipeline: TextPipeline,
}

impl Scoring {
    fn load(args: &TaxonomyArgs, manifest: &mut RunManifest) -> Result<Option<Scoring>, CliError> {
        let Some(path) = &args.taxonomy else {
            return Ok(None);
        };
        manifest.add_input(path)?;
        let taxonomy = Taxonomy::load(path, args.taxonomy_format.into()).map_err(|e| CliError::at(path)(e.into()))?;
        let lexicon = match &args.lexicon {
            Some(p) => {
                manifest.add_input(p)?;
                Lexicon::load(p, &taxonomy).map_err(|e| CliError::at(p)(e.into()))?
            }
            None => Lexicon::from_taxonomy(&taxonomy),
        };
        let stopwords = match &args.stopwords {
            Some(p) => {
                manifest.add_input(p)?;
                StopWords::load(p).map_err(CliError::io(p))?
            }
            None => StopWords::english(),
        };
        Ok(Some(Scoring {
            taxonomy,
            lexicon,
            pipeline: TextPipeline::new(stopwords),
        }))
    }

    fn scorer(&self) -> CqScorer<'_> {
        CqScorer::new(&self.taxonomy, &self.lexicon, &self.pipeline)
    }
}

fn format_name(f: TaxonomyFormatArg) -> &'static str {
    match f {
        TaxonomyFormatArg::Native => "native",
        TaxonomyFormatArg::Wordnet => "wordnet",
    }
}

pub fn taxonomy_import(args: &ImportArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("taxonomy import", json!({ "format": format_name(args.format) }), None);
    let taxonomy =
        Taxonomy::load(&args.source, args.format.into()).map_err(|e| CliError::at(&args.source)(e.into()))?;
    manifest.add_input(&args.source)?;

    let mut native = Vec::new();
    taxonomy
        .write_native(&mut native)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let base = parent_of(&args.out);
    manifest.write_output(&base, &args.out, &native)?;

    if let Some(lex_out) = &args.lexicon_out {
        let lexicon = match &args.index {
            Some(index) => {
                manifest.add_input(index)?;
                let reader = std::io::BufReader::new(open(index)?);
                Lexicon::read_wordnet_index(reader, &taxonomy).map_err(|e| CliError::at(index)(e.into()))?
            }
            None => Lexicon::from_taxonomy(&taxonomy),
        };
        let mut bytes = Vec::new();
        lexicon
            .write(&mut bytes)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        manifest.write_output(&base, lex_out, &bytes)?;
    }
    manifest.save(&sidecar(&args.out))?;
    println!("w = {}, max depth = {}", taxonomy.len(), taxonomy.max_depth());
    Ok(())
}

fn load_ideas(path: &Path, mapping: &ColumnMapping, manifest: &mut RunManifest) -> Result<IdeaDataset, CliError> {
    manifest.add_input(path)?;
    read_ideas(open(path)?, mapping).map_err(|e| CliError::at(path)(e.into()))
}

pub fn score(args: &ScoreArgs) -> Result<(), CliError> {
    let metric = match args.metric {
        Metric::Cq => "cq",
        Metric::Nonredundant => "nonredundant",
        Metric::Collective => "collective",
    };
    let mut manifest = RunManifest::new(
        "score",
        json!({
            "metric": metric,
            "ego_threshold": args.ego_threshold,
            "alter_threshold": args.alter_threshold,
            "taxonomy_format": format_name(args.taxonomy.taxonomy_format),
        }),
        None,
    );
    let mapping = mapping(args.mapping.as_ref(), &mut manifest)?;
    let data = load_ideas(&args.dataset, &mapping, &mut manifest)?;
    let scoring = Scoring::load(&args.taxonomy, &mut manifest)?;
    let needs_bins = matches!(args.metric, Metric::Nonredundant | Metric::Collective);
    if needs_bins && !data.has_bins {
        return Err(CliError::Validation(format!(
            "{}: metric `{metric}` needs a `bin` column",
            args.dataset.display()
        )));
    }

    let mut rows: Vec<ScoreRow> = Vec::new();
    match args.metric {
        Metric::Nonredundant => {
            rows.extend(
                ego_nonredundant(&data.records, args.ego_threshold)?
                    .iter()
                    .map(|s| s.to_row("nonredundant")),
            );
            rows.extend(
                alter_nonredundant(&data.records, args.alter_threshold)?
                    .iter()
                    .map(|s| s.to_row("nonredundant")),
            );
        }
        Metric::Cq => {
            let scoring = scoring
                .ok_or_else(|| CliError::Validation("metric `cq` needs --taxonomy (or CREANET_TAXONOMY)".into()))?;
            rows.extend(ego_cq(&data.records, &scoring.scorer())?.iter().map(|s| s.to_row("cq")));
        }
        Metric::Collective => {
            rows.extend(
                collective_nonredundant(&data.records)?
                    .iter()
                    .map(|s| s.to_row("collective-nonredundant")),
            );
            if let Some(scoring) = &scoring {
                rows.extend(
                    collective_cq(&data.records, &scoring.scorer())?
                        .iter()
                        .map(|s| s.to_row("collective-cq")),
                );
            }
        }
    }
    let bytes = csv_bytes(|b| write_scores(b, &rows))?;
    manifest.write_output(&parent_of(&args.out), &args.out, &bytes)?;
    manifest.save(&sidecar(&args.out))?;
    eprintln!("{} score rows", rows.len());
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let mut base: TrialConfig = match &args.config {
        Some(p) => read_toml(p)?,
        None => TrialConfig::default(),
    };
    if let Some(seed) = args.seed {
        base.seed = seed;
    }
    if args.trials == 0 {
        return Err(CliError::Validation("--trials must be at least 1".into()));
    }
    base.validate()?;
    if args.sweep_gamma.is_empty() {
        return simulate_into(args, &base, &args.out);
    }
    for &gamma in &args.sweep_gamma {
        let mut cfg = base.clone();
        cfg.policy.gamma = gamma;
        cfg.validate()?;
        simulate_into(args, &cfg, &args.out.join(format!("gamma-{gamma}")))?;
    }
    Ok(())
}

fn simulate_into(args: &SimulateArgs, cfg: &TrialConfig, out: &Path) -> Result<(), CliError> {
    let snapshot = serde_json::to_value(cfg).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut manifest = RunManifest::new(
        "simulate",
        json!({ "trial": snapshot, "trials": args.trials }),
        Some(cfg.seed),
    );
    let external = match &args.script {
        Some(p) => {
            manifest.add_input(p)?;
            Some(read_alter_script(open(p)?).map_err(|e| CliError::at(p)(e.into()))?)
        }
        None => None,
    };

    let (mut ideas, mut tallies, mut ratings) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..args.trials {
        let mut trial_cfg = cfg.clone();
        trial_cfg.trial = cfg.trial + i;
        trial_cfg.seed = cfg.seed.wrapping_add(u64::from(i));
        let script = match &external {
            Some(ideas) => AlterScript::from_ideas(ideas.clone(), &trial_cfg)?,
            None => AlterScript::synthetic(&trial_cfg)?,
        };
        let policy = DefaultPolicy::new(trial_cfg.policy.clone());
        let output = Simulator::new(&trial_cfg, &script, &policy)?.run_trial()?;
        ideas.extend(output.idea_records());
        tallies.extend(output.tally_rows());
        ratings.extend(output.rating_rows());
    }

    ensure_dir(out)?;
    manifest.write_output(out, &out.join("ideas.csv"), &csv_bytes(|b| write_ideas(b, &ideas))?)?;
    manifest.write_output(
        out,
        &out.join("tallies.csv"),
        &csv_bytes(|b| write_tallies(b, &tallies))?,
    )?;
    manifest.write_output(
        out,
        &out.join("ratings.csv"),
        &csv_bytes(|b| write_ratings(b, &ratings))?,
    )?;
    let config = toml::to_string(cfg).map_err(|e| CliError::Internal(e.to_string()))?;
    manifest.write_output(out, &out.join("config.toml"), config.as_bytes())?;
    manifest.save(&out.join("manifest.json"))?;
    eprintln!("{}: {} trial(s), {} idea rows", out.display(), args.trials, ideas.len());
    Ok(())
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new(
        "analyze",
        json!({
            "ego_threshold": args.ego_threshold,
            "taxonomy_format": format_name(args.taxonomy.taxonomy_format),
        }),
        None,
    );
    let mapping = mapping(args.mapping.as_ref(), &mut manifest)?;
    let data = load_ideas(&args.dataset, &mapping, &mut manifest)?;
    if !data.has_bins {
        return Err(CliError::Validation(format!(
            "{}: missing `bin` column",
            args.dataset.display()
        )));
    }
    manifest.add_input(&args.tallies)?;
    let tallies = read_tallies(open(&args.tallies)?, &mapping).map_err(|e| CliError::at(&args.tallies)(e.into()))?;
    let ratings = match &args.ratings {
        Some(p) => {
            manifest.add_input(p)?;
            read_ratings(open(p)?, &mapping).map_err(|e| CliError::at(p)(e.into()))?
        }
        None => Vec::new(),
    };
    let scoring = Scoring::load(&args.taxonomy, &mut manifest)?;
    let scorer = scoring.as_ref().map(Scoring::scorer);

    let analysis = creanet::analysis::analyze(&AnalysisInputs {
        records: &data.records,
        tallies: &tallies,
        ratings: &ratings,
        scorer: scorer.as_ref(),
        ego_threshold: args.ego_threshold,
    })?;
    for note in &analysis.skipped {
        eprintln!("skipped {note}");
    }

    let (format, name) = match args.format {
        FormatArg::Csv => (ReportFormat::Csv, "report.csv"),
        FormatArg::Md => (ReportFormat::Markdown, "report.md"),
    };
    let mut report = Vec::new();
    write_report(&mut report, &analysis.reports, format).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut full = serde_json::to_vec_pretty(&analysis.reports).map_err(|e| CliError::Internal(e.to_string()))?;
    full.push(b'\n');
    let mut deltas = csv::Writer::from_writer(Vec::new());
    for d in &analysis.deltas {
        deltas.serialize(d).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let deltas = deltas.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;

    let out = &args.out;
    ensure_dir(out)?;
    manifest.write_output(out, &out.join(name), &report)?;
    manifest.write_output(out, &out.join("report.json"), &full)?;
    manifest.write_output(
        out,
        &out.join("gini.csv"),
        &csv_bytes(|b| write_gini(b, &analysis.gini))?,
    )?;
    manifest.write_output(out, &out.join("deltas.csv"), &deltas)?;
    manifest.save(&out.join("manifest.json"))?;
    eprintln!("{} tests, {} skipped", analysis.reports.len(), analysis.skipped.len());
    Ok(())
}
