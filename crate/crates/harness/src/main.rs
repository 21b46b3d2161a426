//! `ptrlogic` command-line driver.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ptrlogic::data::{prepare_split, NormalizeSetting, TokenizerKind};
use ptrlogic::eval::RunMetrics;
use ptrlogic::pipeline::{self, read_text};
use ptrlogic::report::{metrics_table, plot_series, transfer_table};
use ptrlogic::store::{load_model, save_model, stored_config, tokenizer_from_text, tokenizer_to_text};
use ptrlogic::{HarnessError, Precision, RunConfig};
use ptrlogic_core::corpus::{read_jsonl, CorpusPair};
use ptrlogic_core::el_reasoner::complete_el;
use ptrlogic_core::generator::gen_el_kb;
use ptrlogic_core::logic::{ElKb, Logic, RdfGraph, Theory};
use ptrlogic_core::preprocess::{bpe_train, normalize, NormalizeMode, Tokenizer};
use ptrlogic_core::rdfs_reasoner::materialize_rdfs;
use ptrlogic_neural::Real;

#[derive(Parser)]
#[command(name = "ptrlogic", version, about = "Pointer networks for EL+ and RDFS reasoning")]
struct Cli {
    /// Flat key = value run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Sets every seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_parser = ["ws", "bpe"])]
    tokenizer: Option<String>,
    #[arg(long, global = true, value_parser = ["off", "random", "canonical"])]
    normalize: Option<String>,
    #[arg(long, global = true, value_parser = ["pointer", "vanilla"])]
    decoder: Option<String>,
    /// Extra `key=value` settings, applied last.
    #[arg(long = "set", global = true)]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one EL+ KB as `.elp` text.
    Gen {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derived axioms of an `.elp` KB.
    ReasonEl {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derived triples of an N-Triples graph.
    ReasonRdfs {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rename the symbols of a KB (`.nt` files are read as RDF).
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tokenize each line of a text file.
    Tokenize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stored BPE model; without it BPE is learned from the input.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        save_model: Option<PathBuf>,
    },
    /// Build a labelled corpus split as JSONL files in a directory.
    Corpus {
        #[arg(long)]
        out: PathBuf,
        /// Split this graph per resource instead of generating EL+ KBs.
        #[arg(long)]
        from_nt: Option<PathBuf>,
    },
    /// Tokenize, normalize and encode a corpus directory into pointer targets.
    Encode {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train on a corpus directory and store the selected model.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        model_dir: PathBuf,
        /// Append the metrics record to this file.
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Evaluate a stored model on a JSONL file.
    Eval {
        #[arg(long)]
        model_dir: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Exact match of every model on every data file.
    Transfer {
        #[arg(long = "model-dir", required = true)]
        model_dirs: Vec<PathBuf>,
        #[arg(long = "data", required = true)]
        data: Vec<PathBuf>,
    },
    /// Table (or plot series) of stored metrics records.
    Report {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        plot: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: kind={} msg={msg}", e.kind());
            ExitCode::FAILURE
        }
    }
}

fn run_config(cli: &Cli) -> Result<RunConfig, HarnessError> {
    let mut run = RunConfig::default();
    if let Some(path) = &cli.config {
        run.apply_text(&read_text(path)?)?;
    }
    let mut set = |k: &str, v: &str| run.set(k, v).map_err(HarnessError::Invalid);
    if let Some(s) = cli.seed {
        set("rng_seed", &s.to_string())?;
    }
    for (key, v) in [("tokenizer", &cli.tokenizer), ("normalize", &cli.normalize), ("decoder", &cli.decoder)] {
        if let Some(v) = v {
            set(key, v)?;
        }
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| HarnessError::Invalid(format!("expected key=value, got {kv:?}")))?;
        set(k.trim(), v.trim())?;
    }
    Ok(run)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| HarnessError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| HarnessError::io(Path::new("<stdout>"), e))
        }
    }
}

fn lines<S>(items: impl IntoIterator<Item = S>) -> String
where
    S: std::fmt::Display,
{
    items.into_iter().map(|s| format!("{s}\n")).collect()
}

fn parse_el(path: &Path) -> Result<ElKb, HarnessError> {
    ElKb::parse(&read_text(path)?).map_err(|e| HarnessError::Parse(format!("{}: {e}", path.display())))
}

fn parse_nt(path: &Path) -> Result<RdfGraph, HarnessError> {
    RdfGraph::parse(&read_text(path)?).map_err(|e| HarnessError::Parse(format!("{}: {e}", path.display())))
}

fn append_metrics(path: &Option<PathBuf>, m: &RunMetrics) -> Result<(), HarnessError> {
    let Some(path) = path else { return Ok(()) };
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| HarnessError::io(path, e))?;
    writeln!(f, "{}", m.to_json_line()).map_err(|e| HarnessError::io(path, e))
}

fn print_metrics(runs: &[RunMetrics]) {
    for m in runs {
        println!("{}", m.to_json_line());
    }
    print!("{}", metrics_table(runs));
}

fn label_of(path: &Path) -> String {
    path.file_stem()
        .or(path.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let run = run_config(&cli)?;
    match &cli.command {
        Command::Gen { out } => emit(out, &gen_el_kb(&run.gen)?.to_elp()),
        Command::ReasonEl { input, out } => {
            let c = complete_el(&parse_el(input)?).map_err(|e| HarnessError::Reasoner(e.to_string()))?;
            emit(out, &lines(c.derived()))
        }
        Command::ReasonRdfs { input, out } => {
            let c = materialize_rdfs(&parse_nt(input)?);
            emit(out, &RdfGraph::new(c.into_derived()).to_nt())
        }
        Command::Normalize { input, out } => {
            let mode = match run.prep.normalize {
                NormalizeSetting::Off => None,
                NormalizeSetting::Random => Some(NormalizeMode::Random),
                NormalizeSetting::Canonical => Some(NormalizeMode::Canonical),
            };
            let seed = run.prep.norm_seed;
            let pool = run.prep.pool_size;
            if input.extension().is_some_and(|e| e == "nt") {
                let g = parse_nt(input)?;
                let g = match mode {
                    Some(m) => normalize(&g, m, seed, pool)?.0,
                    None => g,
                };
                emit(out, &g.to_nt())
            } else {
                let kb = parse_el(input)?;
                let kb = match mode {
                    Some(m) => normalize(&kb, m, seed, pool)?.0,
                    None => kb,
                };
                emit(out, &kb.to_elp())
            }
        }
        Command::Tokenize {
            input,
            out,
            model,
            save_model,
        } => {
            let text = read_text(input)?;
            let texts: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
            let tokenizer = match (model, run.prep.tokenizer) {
                (Some(path), _) => tokenizer_from_text(&read_text(path)?)?,
                (None, TokenizerKind::Whitespace) => Tokenizer::Whitespace,
                (None, TokenizerKind::Bpe) => Tokenizer::Bpe(bpe_train(&texts, run.prep.bpe_budget)?),
            };
            if let Some(path) = save_model {
                fs::write(path, tokenizer_to_text(&tokenizer)).map_err(|e| HarnessError::io(path, e))?;
            }
            emit(out, &lines(texts.iter().map(|t| tokenizer.tokenize(t).join(" "))))
        }
        Command::Corpus { out, from_nt } => {
            match from_nt {
                Some(path) => pipeline::write_split(out, &pipeline::rdf_corpus(&parse_nt(path)?, run.split_seed)?)?,
                None => pipeline::write_split(out, &pipeline::el_corpus(&run)?)?,
            }
            Ok(())
        }
        Command::Encode { corpus, out } => {
            let prepared = match pipeline::jsonl_logic(&read_text(&corpus.join(pipeline::SPLIT_FILES[0]))?)? {
                Logic::El => prepare_split(&pipeline::read_split::<ElKb>(corpus)?, &run.prep)?,
                Logic::Rdf => prepare_split(&pipeline::read_split::<RdfGraph>(corpus)?, &run.prep)?,
            };
            pipeline::write_encoded(out, &prepared)
        }
        Command::Train {
            corpus,
            model_dir,
            metrics,
        } => {
            let logic = pipeline::jsonl_logic(&read_text(&corpus.join(pipeline::SPLIT_FILES[0]))?)?;
            let m = match (logic, run.precision) {
                (Logic::El, Precision::F32) => train_cmd::<ElKb, f32>(corpus, model_dir, &run)?,
                (Logic::El, Precision::F64) => train_cmd::<ElKb, f64>(corpus, model_dir, &run)?,
                (Logic::Rdf, Precision::F32) => train_cmd::<RdfGraph, f32>(corpus, model_dir, &run)?,
                (Logic::Rdf, Precision::F64) => train_cmd::<RdfGraph, f64>(corpus, model_dir, &run)?,
            };
            append_metrics(metrics, &m)?;
            print_metrics(&[m]);
            Ok(())
        }
        Command::Eval {
            model_dir,
            data,
            metrics,
        } => {
            let m = eval_cmd(model_dir, data)?;
            append_metrics(metrics, &m)?;
            print_metrics(&[m]);
            Ok(())
        }
        Command::Transfer { model_dirs, data } => {
            let mut exact = Vec::new();
            let mut runs = Vec::new();
            for dir in model_dirs {
                let mut row = Vec::new();
                for d in data {
                    let mut m = eval_cmd(dir, d)?;
                    m.label = format!("{}->{}", label_of(dir), label_of(d));
                    row.push(m.exact_match);
                    runs.push(m);
                }
                exact.push(row);
            }
            print_metrics(&runs);
            let train: Vec<String> = model_dirs.iter().map(|p| label_of(p)).collect();
            let test: Vec<String> = data.iter().map(|p| label_of(p)).collect();
            print!("{}", transfer_table(&train, &test, &exact));
            Ok(())
        }
        Command::Report { metrics, plot } => {
            let runs = read_text(metrics)?
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(RunMetrics::from_json_line)
                .collect::<Result<Vec<_>, _>>()?;
            if *plot {
                print!("{}", plot_series(&runs));
            } else {
                print!("{}", metrics_table(&runs));
            }
            Ok(())
        }
    }
}

fn train_cmd<T: Theory, R: Real + Send + Sync>(
    corpus: &Path,
    model_dir: &Path,
    run: &RunConfig,
) -> Result<RunMetrics, HarnessError> {
    let split = pipeline::read_split::<T>(corpus)?;
    let label = format!("{}-{}", label_of(corpus), run.model.decoder.name());
    let exp = pipeline::run_experiment::<T, R>(&split, run, &label)?;
    if let Some(msg) = &exp.outcome.aborted {
        eprintln!("warning: training stopped early: {msg}");
    }
    save_model(model_dir, &exp.outcome.model, &exp.prepared.tokenizer, run)?;
    let mut m = exp.test;
    m.wall_clock_secs = exp.outcome.wall_clock_secs;
    Ok(m)
}

fn eval_cmd(model_dir: &Path, data: &Path) -> Result<RunMetrics, HarnessError> {
    let text = read_text(data)?;
    let logic = pipeline::jsonl_logic(&text)?;
    let label = label_of(data);
    match (logic, stored_config(model_dir)?.precision) {
        (Logic::El, Precision::F32) => eval_with::<ElKb, f32>(model_dir, &read_jsonl(&text)?, &label),
        (Logic::El, Precision::F64) => eval_with::<ElKb, f64>(model_dir, &read_jsonl(&text)?, &label),
        (Logic::Rdf, Precision::F32) => eval_with::<RdfGraph, f32>(model_dir, &read_jsonl(&text)?, &label),
        (Logic::Rdf, Precision::F64) => eval_with::<RdfGraph, f64>(model_dir, &read_jsonl(&text)?, &label),
    }
}

fn eval_with<T: Theory, R: Real + Send + Sync>(
    model_dir: &Path,
    pairs: &[CorpusPair<T>],
    label: &str,
) -> Result<RunMetrics, HarnessError> {
    let (model, tokenizer, run) = load_model::<R>(model_dir)?;
    pipeline::evaluate_on(&model, &tokenizer, &run, pairs, label)
}
