use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use khmseg::eval::evaluate;
use khmseg::grammar::{render_clusters, split_clusters};
use khmseg::label::{
    join_labels, label_clusters, render_review_queue, LabelDatabase, LabelDatabases,
};
use khmseg::normalize::{normalize_with, NormalizeOptions, RawSequence};
use khmseg::pipeline::{
    build_cluster_inventory, build_sdb, build_sdb_parallel, ingest_lexicon,
    render_fallback_skeleton, seed_fallback_db, LexiconEntry, SyllableDatabase,
};
use khmseg::script::{load_tables, ScriptTables};
use khmseg::segment::{segment_words, Segmenter, WordLexicon};

/// Khmer normalization, cluster splitting, labeling and syllable segmentation.
#[derive(Parser)]
#[command(name = "khmseg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Script tables (defaults to the built-in set)
    #[arg(long, global = true)]
    tables: Option<PathBuf>,
    /// Training database
    #[arg(long, global = true)]
    tdb: Option<PathBuf>,
    /// Fallback cluster database
    #[arg(long, global = true)]
    fallback: Option<PathBuf>,
    /// Syllable database
    #[arg(long, global = true)]
    sdb: Option<PathBuf>,
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Input file (stdin if absent)
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Output file (stdout if absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "|")]
    sep: String,
    /// Repair dangling coengs instead of failing
    #[arg(long, global = true)]
    lenient: bool,
    /// Write per-line diagnostics here
    #[arg(long, global = true)]
    diagnostics: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Put each line into canonical order
    Normalize,
    /// Show the component clusters of each line
    Clusters,
    /// Label the clusters of each line
    Label,
    /// Build the syllable database from a lexicon
    BuildSdb {
        /// Labeled-cluster file
        #[arg(long)]
        labeled: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Review queue of defaulted cluster runs
        #[arg(long)]
        review: Option<PathBuf>,
        /// Unlabeled cluster sequences missing from the training database
        #[arg(long)]
        fallback_skeleton: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Split each line into syllables
    Segment,
    /// Split each line into lexicon words
    SegmentWords,
    /// Score a segmented file against gold
    Eval {
        #[arg(long)]
        gold: PathBuf,
    },
    /// Write the review queue for a lexicon
    ReviewExport,
}

enum Failure {
    Input(String),
    Database(String),
}

type Result<T> = std::result::Result<T, Failure>;

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn db_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Database(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_input(c: &Common) -> Result<String> {
    let mut s = String::new();
    match &c.input {
        Some(p) => open(p)?.read_to_string(&mut s),
        None => io::stdin().read_to_string(&mut s),
    }
    .map_err(input_err)?;
    Ok(s)
}

fn write_to(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(input_err),
    }
}

fn tables(c: &Common) -> Result<ScriptTables> {
    match &c.tables {
        Some(p) => load_tables(open(p)?).map_err(|e| db_err(p, e)),
        None => Ok(ScriptTables::default_tables()),
    }
}

fn label_db(path: Option<&PathBuf>, t: &ScriptTables) -> Result<LabelDatabase> {
    match path {
        Some(p) => LabelDatabase::load(open(p)?, t).map_err(|e| db_err(p, e)),
        None => Ok(LabelDatabase::new()),
    }
}

fn label_dbs(c: &Common, t: &ScriptTables) -> Result<LabelDatabases> {
    LabelDatabases::new(
        label_db(c.tdb.as_ref(), t)?,
        label_db(c.fallback.as_ref(), t)?,
    )
    .map_err(|e| Failure::Database(e.to_string()))
}

fn lexicon(c: &Common) -> Result<Vec<LexiconEntry>> {
    let p = c
        .lexicon
        .as_ref()
        .ok_or_else(|| Failure::Input("--lexicon is required".into()))?;
    ingest_lexicon(open(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
}

/// Applies `f` to the first column of every line, passing other columns
/// through. `f` returns the new text and any diagnostics.
fn map_lines(c: &Common, mut f: impl FnMut(&str) -> Result<(String, Vec<String>)>) -> Result<()> {
    let text = read_input(c)?;
    let mut out = String::new();
    let mut diags = String::new();
    for (i, line) in text.lines().enumerate() {
        let (body, rest) = match line.split_once('\t') {
            Some((b, r)) => (b, Some(r)),
            None => (line, None),
        };
        let (mapped, notes) = f(body).map_err(|e| match e {
            Failure::Input(m) => Failure::Input(format!("line {}: {m}", i + 1)),
            other => other,
        })?;
        out.push_str(&mapped);
        if let Some(r) = rest {
            out.push('\t');
            out.push_str(r);
        }
        out.push('\n');
        for n in notes {
            diags.push_str(&format!("{}\t{n}\n", i + 1));
        }
    }
    write_to(c.out.as_deref(), &out)?;
    if let Some(p) = &c.diagnostics {
        write_to(Some(p), &diags)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let c = &cli.common;
    let t = tables(c)?;
    let opts = NormalizeOptions { lenient: c.lenient };
    let normalize_line =
        |line: &str| normalize_with(&RawSequence::from(line), &t, opts).map_err(input_err);
    match cli.command {
        Command::Normalize => map_lines(c, |line| {
            let n = normalize_line(line)?;
            let notes = n
                .diagnostics
                .iter()
                .map(|d| format!("{}\t{}\t{}", d.position, d.code.as_str(), d.message));
            Ok((n.sequence.to_string(), notes.collect()))
        }),
        Command::Clusters => map_lines(c, |line| {
            let n = normalize_line(line)?;
            Ok((render_clusters(&split_clusters(&n.sequence, &t)), vec![]))
        }),
        Command::Label => {
            let dbs = label_dbs(c, &t)?;
            map_lines(c, |line| {
                let n = normalize_line(line)?;
                let labeling = label_clusters(&split_clusters(&n.sequence, &t), &t, &dbs);
                let clusters: Vec<String> =
                    labeling.clusters.iter().map(|l| l.cluster.text()).collect();
                let conf: Vec<&str> = labeling
                    .clusters
                    .iter()
                    .map(|l| l.confidence.as_str())
                    .collect();
                let notes = labeling.ambiguities.iter().map(|a| a.to_row()).collect();
                Ok((
                    format!(
                        "{}\t{}\t{}",
                        clusters.join("+"),
                        join_labels(&labeling.labels()),
                        conf.join(",")
                    ),
                    notes,
                ))
            })
        }
        Command::BuildSdb {
            labeled,
            report,
            review,
            fallback_skeleton,
            threads,
        } => {
            let entries = lexicon(c)?;
            let dbs = label_dbs(c, &t)?;
            let built = if threads > 1 {
                build_sdb_parallel(&entries, &t, &dbs, threads)
            } else {
                build_sdb(&entries, &t, &dbs)
            };
            write_to(c.out.as_deref(), &built.sdb.persist())?;
            if let Some(p) = labeled {
                write_to(Some(&p), &built.render_labeled())?;
            }
            if let Some(p) = report {
                write_to(Some(&p), &built.report.render())?;
            }
            if let Some(p) = review {
                write_to(Some(&p), &built.render_review())?;
            }
            if let Some(p) = fallback_skeleton {
                let inv = build_cluster_inventory(&entries, &t);
                write_to(
                    Some(&p),
                    &render_fallback_skeleton(&seed_fallback_db(&inv, dbs.tdb())),
                )?;
            }
            if let Some(p) = &c.diagnostics {
                let text: String = built
                    .diagnostics
                    .iter()
                    .map(|d| format!("{}\t{}\n", d.entry, d.message))
                    .collect();
                write_to(Some(p), &text)?;
            }
            Ok(())
        }
        Command::Segment | Command::SegmentWords => {
            let dbs = label_dbs(c, &t)?;
            let sdb = match &c.sdb {
                Some(p) => Some(SyllableDatabase::load(open(p)?, &t).map_err(|e| db_err(p, e))?),
                None => None,
            };
            let mut seg = Segmenter::new(&t, &dbs).with_separator(c.sep.clone());
            if let Some(s) = &sdb {
                seg = seg.with_sdb(s);
            }
            let words = match cli.command {
                Command::SegmentWords => Some(WordLexicon::new(&lexicon(c)?, &t)),
                _ => None,
            };
            map_lines(c, |line| {
                let out = match &words {
                    Some(lex) => segment_words(line, lex, &seg),
                    None => seg.segment_syllables(line),
                };
                Ok((out.render(), out.diagnostics))
            })
        }
        Command::Eval { gold } => {
            let mut g = String::new();
            open(&gold)?.read_to_string(&mut g).map_err(input_err)?;
            let predicted = read_input(c)?;
            let report = evaluate(&g, &predicted, &c.sep).map_err(input_err)?;
            write_to(c.out.as_deref(), &report.render())
        }
        Command::ReviewExport => {
            let entries = lexicon(c)?;
            let dbs = label_dbs(c, &t)?;
            let mut records = Vec::new();
            for e in &entries {
                let n = normalize_with(
                    &RawSequence::from(e.text.as_str()),
                    &t,
                    NormalizeOptions { lenient: true },
                )
                .map_err(input_err)?;
                records
                    .extend(label_clusters(&split_clusters(&n.sequence, &t), &t, &dbs).ambiguities);
            }
            write_to(c.out.as_deref(), &render_review_queue(&records))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("khmseg: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Database(m)) => {
            eprintln!("khmseg: {m}");
            ExitCode::from(2)
        }
    }
}
