use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use mathseek_cli::server::{self, AppState};
use mathseek_core::app::{
    bundled, ingest, ingest_file, read_pairs, DataDir, IngestConfig, DATA_ENV,
};
use mathseek_core::enrich::{cross_validate, extract_rules_with, LexicalMap};
use mathseek_core::eval::{run_comparison_with, PrecisionKind};
use mathseek_core::{encode_document, encode_query, parse_mathml, Mode, Qrels, Query};

#[derive(Parser)]
#[command(
    name = "mathseek",
    version,
    about = "Structural search over MathML formulae"
)]
struct Cli {
    /// Data directory (falls back to $MATHSEEK_DATA, then ./mathseek-data).
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a JSON Lines corpus into the data directory.
    Ingest {
        /// Corpus file; one {"id", "pmathml", "cmathml"?, "uri"?} object per line.
        file: Option<PathBuf>,
        /// Use the bundled mini corpus instead of a file.
        #[arg(long, conflicts_with = "file")]
        bundled: bool,
        #[arg(long, default_value_t = 20)]
        max_leaves: usize,
    },
    /// Learn enrichment rules from presentation/content pairs.
    ExtractRules {
        #[arg(long, required_unless_present = "bundled")]
        parallel: Option<PathBuf>,
        /// Use the bundled parallel corpus.
        #[arg(long, conflicts_with = "parallel")]
        bundled: bool,
        /// Defaults to rules.json in the data directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also report k-fold cross-validated conversion accuracy.
        #[arg(long)]
        folds: Option<usize>,
    },
    /// Build the index for one mode, or all of them.
    Build {
        #[arg(long, default_value = "all")]
        mode: ModeArg,
        /// Convert SE documents with rules learned from the other folds of
        /// the corpus's own gold pairs.
        #[arg(long)]
        cv_folds: Option<usize>,
    },
    /// Search with a presentation MathML query.
    Search {
        #[arg(long, default_value = "se")]
        mode: Mode,
        #[arg(long)]
        query_file: PathBuf,
        #[arg(short, default_value_t = 10)]
        k: usize,
    },
    /// Score every query in every mode against graded judgments.
    Eval {
        /// Judgments TSV; defaults to the data directory's compiled judgments.
        #[arg(long)]
        qrels: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "pmathml,se,cmathml")]
        modes: Vec<Mode>,
        #[arg(short, default_value_t = 10)]
        k: usize,
        /// Count any positive grade as a full hit in P@k.
        #[arg(long)]
        binary: bool,
        /// Print per-query rows as TSV after the table.
        #[arg(long)]
        detail: bool,
    },
    /// Print the index terms of a MathML file.
    Encode {
        #[arg(long, value_enum, default_value = "doc")]
        mode: EncodeMode,
        file: PathBuf,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of static front-end files.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    All,
    One(Mode),
}

impl std::str::FromStr for ModeArg {
    type Err = mathseek_core::Error;

    fn from_str(s: &str) -> Result<ModeArg, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            Ok(ModeArg::All)
        } else {
            s.parse().map(ModeArg::One)
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodeMode {
    Doc,
    Query,
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let data = DataDir::resolve(cli.data);
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Ingest {
            file,
            bundled,
            max_leaves,
        } => {
            let config = IngestConfig {
                max_leaf_nodes: max_leaves,
                ..IngestConfig::default()
            };
            let (docs, stats) = match (file, bundled) {
                (Some(f), _) => ingest_file(&f, &config)
                    .with_context(|| format!("ingesting {}", f.display()))?,
                (None, true) => ingest(bundled::CORPUS.as_bytes(), &config)?,
                (None, false) => bail!("give a corpus file or --bundled"),
            };
            data.save_corpus(&docs)?;
            writeln!(
                out,
                "records {}  kept {}  dropped {}  failed {}  -> {}",
                stats.records,
                stats.kept,
                stats.dropped,
                stats.failed,
                data.corpus_path().display()
            )?;
        }
        Command::ExtractRules {
            parallel,
            bundled: _,
            out: path,
            folds,
        } => {
            let pairs = match parallel {
                Some(p) => read_pairs(BufReader::new(
                    File::open(&p).with_context(|| p.display().to_string())?,
                ))?,
                None => bundled::parallel()?,
            };
            let extraction = extract_rules_with(&pairs, &LexicalMap::default());
            for (i, why) in &extraction.skipped {
                log::warn!("pair {}: {why}", i + 1);
            }
            let path = match path {
                Some(p) => p,
                None => {
                    data.create()?;
                    data.rules_path()
                }
            };
            extraction.rules.save(&path)?;
            writeln!(
                out,
                "{} translation and {} segmentation rules from {} pairs ({} skipped) -> {}",
                extraction.rules.translation.len(),
                extraction.rules.segmentation.len(),
                pairs.len(),
                extraction.skipped.len(),
                path.display()
            )?;
            if let Some(k) = folds {
                write!(out, "{}", cross_validate(&pairs, k)?.table())?;
            }
        }
        Command::Build { mode, cv_folds } => {
            let modes = match mode {
                ModeArg::All => Mode::ALL.to_vec(),
                ModeArg::One(m) => vec![m],
            };
            for m in modes {
                let report = data.build(m, cv_folds)?;
                writeln!(
                    out,
                    "{}: {} documents indexed, {} skipped -> {}",
                    m.label(),
                    report.indexed,
                    report.skipped.len(),
                    data.index_path(m).display()
                )?;
            }
        }
        Command::Search {
            mode,
            query_file,
            k,
        } => {
            let text = fs::read_to_string(&query_file)
                .with_context(|| query_file.display().to_string())?;
            let engine = data.load_engine()?;
            let query = Query::new("adhoc", parse_mathml(&text)?);
            for r in engine.search(mode, &query, k)? {
                writeln!(out, "{}\t{}\t{:.6}", r.rank, r.doc_id, r.score)?;
            }
        }
        Command::Eval {
            qrels,
            modes,
            k,
            binary,
            detail,
        } => {
            let engine = data.load_engine()?;
            let qrels = match qrels {
                Some(p) => Qrels::from_tsv(BufReader::new(
                    File::open(&p).with_context(|| p.display().to_string())?,
                ))?,
                None => data.qrels()?,
            };
            let precision = if binary {
                PrecisionKind::Binary
            } else {
                PrecisionKind::Graded
            };
            let report =
                run_comparison_with(&engine, &data.load_queries()?, &qrels, &modes, k, precision)?;
            write!(out, "{}", report.table())?;
            if detail {
                write!(out, "{}", report.detail_tsv())?;
            }
        }
        Command::Encode { mode, file } => {
            let text = fs::read_to_string(&file).with_context(|| file.display().to_string())?;
            let tree = parse_mathml(&text)?;
            let terms = match mode {
                EncodeMode::Doc => encode_document(&tree),
                EncodeMode::Query => encode_query(&tree),
            };
            write!(out, "{}", terms.to_lines())?;
        }
        Command::Serve { port, assets } => {
            if !data.root().exists() {
                bail!(
                    "data directory {} does not exist (set --data or {DATA_ENV})",
                    data.root().display()
                );
            }
            let state = AppState::open(data)?;
            tokio::runtime::Runtime::new()?.block_on(server::serve(state, port, assets))?;
        }
    }
    Ok(())
}
