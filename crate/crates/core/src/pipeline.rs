//! From a lexicon to a syllable database.
//!
//! Entries are normalized, split into clusters (the cluster inventory),
//! labeled (the labeled-cluster file) and merged into syllables, whose
//! counts make up the syllable database. Per-entry work is independent, so
//! the map phase can run on several threads; the reduce phase sorts by
//! entry ordinal and the output is the same either way.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;
use std::thread;

use thiserror::Error;

use crate::grammar::{split_clusters, ComponentCluster};
use crate::label::{
    label_clusters, merge_syllables, render_review_queue, AmbiguityRecord, LabelDatabase,
    LabelDatabases, LabeledCluster, SyllableLookup, MAX_SYLLABLE_CLUSTERS,
};
use crate::normalize::{
    normalize_with, CanonicalSequence, Diagnostic, NormalizeOptions, RawSequence,
};
use crate::script::ScriptTables;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum EntryType {
    SimpleWord,
    CompoundWord,
    Phrase,
    #[default]
    Unknown,
}

impl EntryType {
    pub const ALL: [EntryType; 4] = [
        Self::SimpleWord,
        Self::CompoundWord,
        Self::Phrase,
        Self::Unknown,
    ];

    /// Row name used in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SimpleWord => "Simple word",
            Self::CompoundWord => "Compound word",
            Self::Phrase => "Phrase",
            Self::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for EntryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntryType {
    type Err = std::convert::Infallible;

    /// Accepts `simple`, `Simple word`, `simple_word` and so on; anything
    /// unrecognised is `Unknown`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase().replace(['_', '-'], " ");
        Ok(match s.as_str() {
            "simple" | "simple word" => Self::SimpleWord,
            "compound" | "compound word" => Self::CompoundWord,
            "phrase" => Self::Phrase,
            _ => Self::Unknown,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub text: String,
    pub entry_type: EntryType,
    pub meaning: Option<String>,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("invalid UTF-8 at byte {offset}")]
    Encoding { offset: usize },
    #[error("line {line}: empty entry text")]
    EmptyText { line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads `text[<TAB>type[<TAB>meaning]]` rows. Blank lines and `#`
/// comments are skipped; duplicates are kept.
pub fn ingest_lexicon<R: Read>(mut source: R) -> Result<Vec<LexiconEntry>, LexiconError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| LexiconError::Encoding {
        offset: e.valid_up_to(),
    })?;
    parse_lexicon(text)
}

pub fn parse_lexicon(text: &str) -> Result<Vec<LexiconEntry>, LexiconError> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        let entry_text = cols.next().unwrap_or_default().trim();
        if entry_text.is_empty() {
            return Err(LexiconError::EmptyText { line: i + 1 });
        }
        let entry_type = cols
            .next()
            .map(|t| t.parse().unwrap_or_default())
            .unwrap_or_default();
        let meaning = cols
            .next()
            .map(str::trim)
            .filter(|m| !m.is_empty())
            .map(str::to_string);
        entries.push(LexiconEntry {
            text: entry_text.to_string(),
            entry_type,
            meaning,
        });
    }
    Ok(entries)
}

/// Something that went wrong with one entry; never fatal for a batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryDiagnostic {
    pub entry: usize,
    pub message: String,
}

impl fmt::Display for EntryDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "entry {}: {}", self.entry, self.message)
    }
}

fn normalize_entry(
    ordinal: usize,
    text: &str,
    tables: &ScriptTables,
    diagnostics: &mut Vec<EntryDiagnostic>,
) -> CanonicalSequence {
    let normalized = normalize_with(
        &RawSequence::from(text),
        tables,
        NormalizeOptions { lenient: true },
    )
    .expect("lenient normalization does not fail");
    diagnostics.extend(
        normalized
            .diagnostics
            .iter()
            .map(|d: &Diagnostic| EntryDiagnostic {
                entry: ordinal,
                message: format!("{} at {}: {}", d.code.as_str(), d.position, d.message),
            }),
    );
    normalized.sequence
}

/// Distinct clusters with their counts, plus the adjacent 2-3 cluster
/// sequences seen in entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClusterInventory {
    pub clusters: BTreeMap<String, u64>,
    pub sequences: BTreeMap<Vec<String>, u64>,
    pub diagnostics: Vec<EntryDiagnostic>,
}

impl ClusterInventory {
    pub fn total(&self) -> u64 {
        self.clusters.values().sum()
    }

    /// `cluster<TAB>count`, sorted by codepoint.
    pub fn render(&self) -> String {
        self.clusters
            .iter()
            .map(|(c, n)| format!("{c}\t{n}\n"))
            .collect()
    }
}

pub fn build_cluster_inventory(
    entries: &[LexiconEntry],
    tables: &ScriptTables,
) -> ClusterInventory {
    let mut inv = ClusterInventory::default();
    for (ordinal, entry) in entries.iter().enumerate() {
        let seq = normalize_entry(ordinal, &entry.text, tables, &mut inv.diagnostics);
        let texts: Vec<String> = split_clusters(&seq, tables)
            .iter()
            .map(ComponentCluster::text)
            .collect();
        for t in &texts {
            *inv.clusters.entry(t.clone()).or_default() += 1;
        }
        for k in 2..=MAX_SYLLABLE_CLUSTERS {
            for w in texts.windows(k) {
                *inv.sequences.entry(w.to_vec()).or_default() += 1;
            }
        }
    }
    inv
}

/// Adjacent cluster sequences missing from the training database, for
/// manual labeling. Sorted by key.
pub fn seed_fallback_db(inventory: &ClusterInventory, tdb: &LabelDatabase) -> Vec<Vec<String>> {
    inventory
        .sequences
        .keys()
        .filter(|k| !tdb.contains(k))
        .cloned()
        .collect()
}

/// Skeleton rows with an empty label column.
pub fn render_fallback_skeleton(keys: &[Vec<String>]) -> String {
    keys.iter()
        .map(|k| format!("{}\t\n", k.join("+")))
        .collect()
}

#[derive(Debug, Error)]
pub enum SdbError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("syllable {syllable:?}: {message}")]
    Invariant { syllable: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Syllables with frequencies and the entries they came from.
/// Equality compares frequencies only; provenance is not persisted.
#[derive(Debug, Clone, Default)]
pub struct SyllableDatabase {
    syllables: BTreeMap<String, u64>,
    provenance: BTreeMap<String, BTreeSet<usize>>,
}

impl PartialEq for SyllableDatabase {
    fn eq(&self, other: &Self) -> bool {
        self.syllables == other.syllables
    }
}

impl Eq for SyllableDatabase {}

impl SyllableDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn frequency_of(&self, syllable: &str) -> Option<u64> {
        self.syllables.get(syllable).copied()
    }

    pub fn sources(&self, syllable: &str) -> Option<&BTreeSet<usize>> {
        self.provenance.get(syllable)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.syllables.iter().map(|(s, n)| (s.as_str(), *n))
    }

    /// Adds one occurrence after checking the syllable invariant.
    pub fn insert(
        &mut self,
        syllable: &str,
        entry: Option<usize>,
        tables: &ScriptTables,
    ) -> Result<(), SdbError> {
        check_syllable(syllable, tables)?;
        self.add(syllable.to_string(), 1, entry);
        Ok(())
    }

    fn add(&mut self, syllable: String, count: u64, entry: Option<usize>) {
        if let Some(e) = entry {
            self.provenance
                .entry(syllable.clone())
                .or_default()
                .insert(e);
        }
        *self.syllables.entry(syllable).or_default() += count;
    }

    /// `syllable<TAB>frequency`, sorted by codepoint.
    pub fn persist(&self) -> String {
        self.syllables
            .iter()
            .map(|(s, n)| format!("{s}\t{n}\n"))
            .collect()
    }

    pub fn load<R: Read>(mut source: R, tables: &ScriptTables) -> Result<Self, SdbError> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::parse(&text, tables)
    }

    pub fn parse(text: &str, tables: &ScriptTables) -> Result<Self, SdbError> {
        let mut db = SyllableDatabase::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| SdbError::Parse {
                line: i + 1,
                message,
            };
            let (syllable, freq) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected syllable<TAB>frequency".into()))?;
            let freq: u64 = freq
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad frequency {freq:?}: {e}")))?;
            if freq == 0 {
                return Err(SdbError::Invariant {
                    syllable: syllable.to_string(),
                    message: "frequency must be at least 1".into(),
                });
            }
            if db.syllables.contains_key(syllable) {
                return Err(parse_err(format!("duplicate syllable {syllable:?}")));
            }
            check_syllable(syllable, tables)?;
            db.add(syllable.to_string(), freq, None);
        }
        Ok(db)
    }
}

impl SyllableLookup for SyllableDatabase {
    fn frequency(&self, text: &str) -> Option<u64> {
        self.frequency_of(text)
    }
}

/// Canonical text splitting into 1-3 grammar-conformant clusters.
pub fn check_syllable(
    syllable: &str,
    tables: &ScriptTables,
) -> Result<Vec<ComponentCluster>, SdbError> {
    let invariant = |message: String| SdbError::Invariant {
        syllable: syllable.to_string(),
        message,
    };
    let seq = CanonicalSequence::from_canonical(syllable, tables)
        .map_err(|e| invariant(e.to_string()))?;
    let clusters = split_clusters(&seq, tables);
    if !(1..=MAX_SYLLABLE_CLUSTERS).contains(&clusters.len()) {
        return Err(invariant(format!(
            "splits into {} clusters",
            clusters.len()
        )));
    }
    if let Some(c) = clusters.iter().find(|c| !c.conforms(tables)) {
        return Err(invariant(format!("cluster {c} does not conform")));
    }
    Ok(clusters)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TypeCounts {
    pub quantity: u64,
    pub syllables: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PipelineReport {
    pub entries_processed: u64,
    pub entries_skipped: u64,
    pub syllables_emitted: u64,
    pub ambiguity_count: u64,
    pub per_type: BTreeMap<EntryType, TypeCounts>,
}

impl PipelineReport {
    /// `Type<TAB>Quantity<TAB>Syllable` rows for the three entry types (and
    /// `Unknown` when present), then a `Total` row and a few `#` counters.
    pub fn render(&self) -> String {
        let mut out = String::from("Type\tQuantity\tSyllable\n");
        let mut total = TypeCounts::default();
        for t in EntryType::ALL {
            let row = self.per_type.get(&t).copied().unwrap_or_default();
            if t == EntryType::Unknown && row == TypeCounts::default() {
                continue;
            }
            out.push_str(&format!("{}\t{}\t{}\n", t, row.quantity, row.syllables));
            total.quantity += row.quantity;
            total.syllables += row.syllables;
        }
        out.push_str(&format!("Total\t{}\t{}\n", total.quantity, total.syllables));
        out.push_str(&format!("# skipped\t{}\n", self.entries_skipped));
        out.push_str(&format!("# ambiguities\t{}\n", self.ambiguity_count));
        out
    }
}

/// What one entry contributed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryResult {
    pub ordinal: usize,
    pub entry_type: EntryType,
    pub normalized: CanonicalSequence,
    pub labeled: Vec<LabeledCluster>,
    pub ambiguities: Vec<AmbiguityRecord>,
    /// Syllable texts; `None` when the entry was skipped.
    pub syllables: Option<Vec<String>>,
    pub diagnostics: Vec<EntryDiagnostic>,
}

pub fn process_entry(
    ordinal: usize,
    entry: &LexiconEntry,
    tables: &ScriptTables,
    dbs: &LabelDatabases,
) -> EntryResult {
    let mut diagnostics = Vec::new();
    let normalized = normalize_entry(ordinal, &entry.text, tables, &mut diagnostics);
    let clusters = split_clusters(&normalized, tables);
    let labeling = label_clusters(&clusters, tables, dbs);
    let syllables = match merge_syllables(&labeling.clusters) {
        Ok(syllables) => {
            let texts: Vec<String> = syllables.iter().map(|s| s.text()).collect();
            match texts.iter().find_map(|t| check_syllable(t, tables).err()) {
                None => Some(texts),
                Some(e) => {
                    diagnostics.push(EntryDiagnostic {
                        entry: ordinal,
                        message: format!("skipped: {e}"),
                    });
                    None
                }
            }
        }
        Err(e) => {
            diagnostics.push(EntryDiagnostic {
                entry: ordinal,
                message: format!("skipped: {e}"),
            });
            None
        }
    };
    EntryResult {
        ordinal,
        entry_type: entry.entry_type,
        normalized,
        labeled: labeling.clusters,
        ambiguities: labeling.ambiguities,
        syllables,
        diagnostics,
    }
}

/// Everything a build produces.
#[derive(Debug, Clone, Default)]
pub struct BuildOutput {
    pub sdb: SyllableDatabase,
    pub report: PipelineReport,
    /// (entry ordinal, record), ordered by ordinal then position.
    pub review: Vec<(usize, AmbiguityRecord)>,
    pub entries: Vec<EntryResult>,
    pub diagnostics: Vec<EntryDiagnostic>,
}

impl BuildOutput {
    /// The labeled-cluster file:
    /// `entry<TAB>position<TAB>cluster<TAB>label<TAB>confidence`.
    pub fn render_labeled(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            for lc in &e.labeled {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    e.ordinal,
                    lc.position,
                    lc.cluster.text(),
                    lc.label,
                    lc.confidence
                ));
            }
        }
        out
    }

    pub fn render_review(&self) -> String {
        render_review_queue(self.review.iter().map(|(_, r)| r))
    }
}

fn reduce(mut results: Vec<EntryResult>) -> BuildOutput {
    results.sort_by_key(|r| r.ordinal);
    let mut out = BuildOutput::default();
    for r in &results {
        out.report.ambiguity_count += r.ambiguities.len() as u64;
        out.review
            .extend(r.ambiguities.iter().map(|a| (r.ordinal, a.clone())));
        out.diagnostics.extend(r.diagnostics.iter().cloned());
        match &r.syllables {
            Some(syllables) => {
                out.report.entries_processed += 1;
                out.report.syllables_emitted += syllables.len() as u64;
                let row = out.report.per_type.entry(r.entry_type).or_default();
                row.quantity += 1;
                row.syllables += syllables.len() as u64;
                for s in syllables {
                    out.sdb.add(s.clone(), 1, Some(r.ordinal));
                }
            }
            None => out.report.entries_skipped += 1,
        }
    }
    out.entries = results;
    out
}

pub fn build_sdb(
    entries: &[LexiconEntry],
    tables: &ScriptTables,
    dbs: &LabelDatabases,
) -> BuildOutput {
    reduce(
        entries
            .iter()
            .enumerate()
            .map(|(i, e)| process_entry(i, e, tables, dbs))
            .collect(),
    )
}

/// Same output as [`build_sdb`], with the per-entry work spread over
/// `threads` scoped threads.
pub fn build_sdb_parallel(
    entries: &[LexiconEntry],
    tables: &ScriptTables,
    dbs: &LabelDatabases,
    threads: usize,
) -> BuildOutput {
    let threads = threads.max(1);
    let chunk = entries.len().div_ceil(threads).max(1);
    let results = thread::scope(|s| {
        let handles: Vec<_> = entries
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                s.spawn(move || {
                    part.iter()
                        .enumerate()
                        .map(|(i, e)| process_entry(c * chunk + i, e, tables, dbs))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    reduce(results)
}
