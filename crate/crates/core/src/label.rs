//! Position labels for clusters and the syllables they merge into.
//!
//! Each cluster of an entry gets one of four labels: `LL` opens a
//! syllable, `MM` continues it, `RR` closes it and `LR` is a syllable on
//! its own. Labels are resolved in tiers: characteristic markers, the
//! training database, the fallback database, an optional syllable
//! database, and finally a structural default that groups clusters in
//! pairs and reports the run for manual review.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::ops::Range;
use std::str::FromStr;

use thiserror::Error;

use crate::grammar::{split_clusters, ComponentCluster};
use crate::normalize::CanonicalSequence;
use crate::script::{marker_role, MarkerRole, ScriptTables};

/// Longest syllable, in clusters.
pub const MAX_SYLLABLE_CLUSTERS: usize = 3;

const MAX_CANDIDATES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PositionLabel {
    LL,
    RR,
    MM,
    LR,
}

impl PositionLabel {
    pub const ALL: [PositionLabel; 4] = [Self::LL, Self::RR, Self::MM, Self::LR];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::LL => "LL",
            Self::RR => "RR",
            Self::MM => "MM",
            Self::LR => "LR",
        }
    }

    /// True for labels after which the syllable is still open.
    pub fn leaves_open(self) -> bool {
        matches!(self, Self::LL | Self::MM)
    }

    /// True for labels that need an open syllable to attach to.
    pub fn needs_open(self) -> bool {
        matches!(self, Self::RR | Self::MM)
    }
}

impl fmt::Display for PositionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown position label {0:?}")]
pub struct UnknownLabel(pub String);

impl FromStr for PositionLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

/// Where a label came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Confidence {
    Marker,
    Tdb,
    Fallback,
    /// Longest match against a syllable database (segmentation only).
    Syllable,
    /// Structural default; always accompanied by a review record when the
    /// run is longer than one cluster.
    Default,
    Manual,
}

impl Confidence {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Marker => "marker",
            Self::Tdb => "tdb",
            Self::Fallback => "fallback",
            Self::Syllable => "sdb",
            Self::Default => "default",
            Self::Manual => "manual",
        }
    }
}

impl fmt::Display for Confidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Confidence {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Self::Marker,
            Self::Tdb,
            Self::Fallback,
            Self::Syllable,
            Self::Default,
            Self::Manual,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCluster {
    pub cluster: ComponentCluster,
    pub label: PositionLabel,
    pub confidence: Confidence,
    /// Ordinal within the entry, from 0.
    pub position: usize,
}

/// A cluster with up to two neighbours on each side.
#[derive(Debug, Clone, Copy)]
pub struct ContextWindow<'a> {
    pub center: &'a ComponentCluster,
    /// Offsets -2, -1, +1, +2.
    neighbors: [Option<&'a ComponentCluster>; 4],
}

impl<'a> ContextWindow<'a> {
    pub fn at(clusters: &'a [ComponentCluster], j: usize) -> Self {
        let get = |p: isize| j.checked_add_signed(p).and_then(|i| clusters.get(i));
        ContextWindow {
            center: &clusters[j],
            neighbors: [get(-2), get(-1), get(1), get(2)],
        }
    }

    /// The cluster at relative offset `p`; `0` is the center.
    pub fn get(&self, p: isize) -> Option<&'a ComponentCluster> {
        match p {
            -2 => self.neighbors[0],
            -1 => self.neighbors[1],
            0 => Some(self.center),
            1 => self.neighbors[2],
            2 => self.neighbors[3],
            _ => None,
        }
    }

    /// Candidate keys as (first offset, clusters), in probe order: the three
    /// triples through the center left to right, then the two pairs.
    pub fn keys(&self) -> Vec<(isize, Vec<String>)> {
        const SPANS: [(isize, isize); 5] = [(-2, 0), (-1, 1), (0, 2), (-1, 0), (0, 1)];
        SPANS
            .iter()
            .filter_map(|&(from, to)| {
                let key = (from..=to)
                    .map(|p| self.get(p).map(ComponentCluster::text))
                    .collect::<Option<Vec<_>>>()?;
                Some((from, key))
            })
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum DatabaseError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("entry {key}: {message}")]
    Invariant { key: String, message: String },
    #[error("{key} is in both the training and the fallback database")]
    Overlap { key: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Cluster sequences of 2-3 clusters mapped to the labels that resolve
/// them. Used for both the training database and the fallback database.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelDatabase {
    entries: BTreeMap<Vec<String>, Vec<PositionLabel>>,
}

impl LabelDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &[String]) -> Option<&[PositionLabel]> {
        self.entries.get(key).map(Vec::as_slice)
    }

    pub fn contains(&self, key: &[String]) -> bool {
        self.entries.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[String], &[PositionLabel])> {
        self.entries
            .iter()
            .map(|(k, v)| (k.as_slice(), v.as_slice()))
    }

    /// Adds an entry after checking that the key is canonical text that
    /// splits into exactly the given clusters and that the labels form
    /// complete syllables.
    pub fn insert(
        &mut self,
        key: Vec<String>,
        labels: Vec<PositionLabel>,
        tables: &ScriptTables,
    ) -> Result<(), DatabaseError> {
        check_entry(&key, &labels, tables)?;
        self.entries.insert(key, labels);
        Ok(())
    }

    /// Parses `clusters<TAB>labels`, clusters joined by `+`, labels by `,`.
    /// Rows with an empty label column are uncurated skeleton rows and are
    /// skipped.
    pub fn parse(text: &str, tables: &ScriptTables) -> Result<Self, DatabaseError> {
        let mut db = LabelDatabase::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| DatabaseError::Parse {
                line: line_no,
                message,
            };
            let mut cols = line.split('\t');
            let key = cols.next().unwrap_or_default();
            let labels = cols.next().unwrap_or_default().trim();
            if labels.is_empty() {
                continue;
            }
            let key: Vec<String> = key.split('+').map(str::to_string).collect();
            let labels = labels
                .split(',')
                .map(|l| l.trim().parse::<PositionLabel>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| parse_err(e.to_string()))?;
            if db.contains(&key) {
                return Err(parse_err(format!("duplicate key {}", key.join("+"))));
            }
            db.insert(key, labels, tables).map_err(|e| match e {
                DatabaseError::Invariant { key, message } => parse_err(format!("{key}: {message}")),
                other => other,
            })?;
        }
        Ok(db)
    }

    pub fn load<R: Read>(mut source: R, tables: &ScriptTables) -> Result<Self, DatabaseError> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::parse(&text, tables)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (key, labels) in &self.entries {
            out.push_str(&key.join("+"));
            out.push('\t');
            out.push_str(&join_labels(labels));
            out.push('\n');
        }
        out
    }
}

fn check_entry(
    key: &[String],
    labels: &[PositionLabel],
    tables: &ScriptTables,
) -> Result<(), DatabaseError> {
    let invariant = |message: String| DatabaseError::Invariant {
        key: key.join("+"),
        message,
    };
    if !(2..=MAX_SYLLABLE_CLUSTERS).contains(&key.len()) {
        return Err(invariant(format!(
            "{} clusters, expected 2 or 3",
            key.len()
        )));
    }
    if key.len() != labels.len() {
        return Err(invariant(format!(
            "{} clusters but {} labels",
            key.len(),
            labels.len()
        )));
    }
    let joined = key.concat();
    let seq =
        CanonicalSequence::from_canonical(&joined, tables).map_err(|e| invariant(e.to_string()))?;
    let split: Vec<String> = split_clusters(&seq, tables)
        .iter()
        .map(ComponentCluster::text)
        .collect();
    if split != key {
        return Err(invariant(format!("text splits as {}", split.join("+"))));
    }
    check_labels(labels).map_err(|e| invariant(e.to_string()))
}

pub fn join_labels(labels: &[PositionLabel]) -> String {
    labels
        .iter()
        .map(|l| l.as_str())
        .collect::<Vec<_>>()
        .join(",")
}

/// The training and fallback databases, with disjoint key sets.
#[derive(Debug, Clone, Default)]
pub struct LabelDatabases {
    tdb: LabelDatabase,
    fallback: LabelDatabase,
}

impl LabelDatabases {
    pub fn new(tdb: LabelDatabase, fallback: LabelDatabase) -> Result<Self, DatabaseError> {
        if let Some((key, _)) = fallback.iter().find(|(k, _)| tdb.contains(k)) {
            return Err(DatabaseError::Overlap { key: key.join("+") });
        }
        Ok(LabelDatabases { tdb, fallback })
    }

    pub fn tdb(&self) -> &LabelDatabase {
        &self.tdb
    }

    pub fn fallback(&self) -> &LabelDatabase {
        &self.fallback
    }
}

/// A database entry matched around a cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowHit {
    /// Offset of the first covered cluster relative to the center.
    pub offset: isize,
    pub labels: Vec<PositionLabel>,
    pub source: Confidence,
}

fn window_hits<'a>(
    window: &ContextWindow<'_>,
    dbs: &'a LabelDatabases,
) -> impl Iterator<Item = WindowHit> + 'a {
    let keys = window.keys();
    [
        (&dbs.tdb, Confidence::Tdb),
        (&dbs.fallback, Confidence::Fallback),
    ]
    .into_iter()
    .flat_map(move |(db, source)| {
        keys.iter()
            .filter_map(|(offset, key)| {
                db.get(key).map(|labels| WindowHit {
                    offset: *offset,
                    labels: labels.to_vec(),
                    source,
                })
            })
            .collect::<Vec<_>>()
    })
}

/// First database hit for the window: the training database is searched
/// with every key before the fallback database.
pub fn label_window(window: &ContextWindow<'_>, dbs: &LabelDatabases) -> Option<WindowHit> {
    window_hits(window, dbs).next()
}

/// Label implied by characteristic signs alone.
pub fn label_by_markers(
    cluster: &ComponentCluster,
    tables: &ScriptTables,
) -> Option<PositionLabel> {
    let (mut begin, mut end) = (false, false);
    for &c in &cluster.codepoints {
        match marker_role(c, tables) {
            MarkerRole::Both => return Some(PositionLabel::LR),
            MarkerRole::Begin => begin = true,
            MarkerRole::End => end = true,
            MarkerRole::None => {}
        }
    }
    match (begin, end) {
        (true, true) => Some(PositionLabel::LR),
        (true, false) => Some(PositionLabel::LL),
        (false, true) => Some(PositionLabel::RR),
        (false, false) => None,
    }
}

/// Known syllables, consulted during segmentation.
pub trait SyllableLookup {
    fn frequency(&self, text: &str) -> Option<u64>;
}

/// A run of defaulted clusters and the labelings a curator could pick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguityRecord {
    /// Position of the first cluster of the run.
    pub position: usize,
    pub clusters: Vec<String>,
    /// Optimal labelings, the chosen one first.
    pub candidates: Vec<Vec<PositionLabel>>,
}

impl AmbiguityRecord {
    /// One review-queue row: clusters, chosen labels, `|`-joined candidates.
    pub fn to_row(&self) -> String {
        let chosen = self
            .candidates
            .first()
            .map(|c| join_labels(c))
            .unwrap_or_default();
        let all = self
            .candidates
            .iter()
            .map(|c| join_labels(c))
            .collect::<Vec<_>>()
            .join("|");
        format!("{}\t{}\t{}", self.clusters.join("+"), chosen, all)
    }
}

/// Review queue: one row per distinct cluster run, in first-seen order.
pub fn render_review_queue<'a>(records: impl IntoIterator<Item = &'a AmbiguityRecord>) -> String {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = String::new();
    for r in records {
        if seen.insert(r.clusters.clone()) {
            out.push_str(&r.to_row());
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Labeling {
    pub clusters: Vec<LabeledCluster>,
    pub ambiguities: Vec<AmbiguityRecord>,
}

impl Labeling {
    pub fn labels(&self) -> Vec<PositionLabel> {
        self.clusters.iter().map(|c| c.label).collect()
    }
}

pub fn label_clusters(
    clusters: &[ComponentCluster],
    tables: &ScriptTables,
    dbs: &LabelDatabases,
) -> Labeling {
    label_clusters_with(clusters, tables, dbs, None)
}

pub fn label_clusters_with(
    clusters: &[ComponentCluster],
    tables: &ScriptTables,
    dbs: &LabelDatabases,
    sdb: Option<&dyn SyllableLookup>,
) -> Labeling {
    let n = clusters.len();
    let mut slots: Vec<Option<(PositionLabel, Confidence)>> = clusters
        .iter()
        .map(|c| label_by_markers(c, tables).map(|l| (l, Confidence::Marker)))
        .collect();

    for j in 0..n {
        if slots[j].is_some() {
            continue;
        }
        let window = ContextWindow::at(clusters, j);
        for hit in window_hits(&window, dbs) {
            let start = j
                .checked_add_signed(hit.offset)
                .expect("window offset in range");
            if fits(&slots, start, &hit.labels) {
                for (i, &label) in hit.labels.iter().enumerate() {
                    if slots[start + i].is_none() {
                        slots[start + i] = Some((label, hit.source));
                    }
                }
                break;
            }
        }
    }

    if let Some(sdb) = sdb {
        apply_syllables(clusters, &mut slots, sdb);
    }

    let mut ambiguities = Vec::new();
    let mut j = 0;
    while j < n {
        if slots[j].is_some() {
            j += 1;
            continue;
        }
        let end = (j..n).find(|&i| slots[i].is_some()).unwrap_or(n);
        let entry = open_state(&slots[..j]);
        let exit = slots.get(end).and_then(|s| s.map(|(l, _)| l));
        let candidates = default_labelings(end - j, entry, exit);
        let chosen = candidates
            .first()
            .cloned()
            .unwrap_or_else(|| vec![PositionLabel::LR; end - j]);
        for (i, label) in chosen.iter().enumerate() {
            slots[j + i] = Some((*label, Confidence::Default));
        }
        if end - j > 1 {
            ambiguities.push(AmbiguityRecord {
                position: j,
                clusters: clusters[j..end]
                    .iter()
                    .map(ComponentCluster::text)
                    .collect(),
                candidates: if candidates.is_empty() {
                    vec![chosen]
                } else {
                    candidates
                },
            });
        }
        j = end;
    }

    let clusters = clusters
        .iter()
        .zip(slots)
        .enumerate()
        .map(|(position, (cluster, slot))| {
            let (label, confidence) = slot.expect("every cluster labeled");
            LabeledCluster {
                cluster: cluster.clone(),
                label,
                confidence,
                position,
            }
        })
        .collect();
    Labeling {
        clusters,
        ambiguities,
    }
}

/// Whether complete syllables `labels` can sit at `start` without
/// contradicting labels already present.
fn fits(
    slots: &[Option<(PositionLabel, Confidence)>],
    start: usize,
    labels: &[PositionLabel],
) -> bool {
    let end = start + labels.len();
    let agrees = labels
        .iter()
        .zip(&slots[start..end])
        .all(|(l, s)| s.is_none_or(|(have, _)| have == *l));
    let left_closed = start == 0 || slots[start - 1].is_none_or(|(l, _)| !l.leaves_open());
    let right_free = slots
        .get(end)
        .is_none_or(|s| s.is_none_or(|(l, _)| !l.needs_open()));
    agrees && left_closed && right_free
}

fn apply_syllables(
    clusters: &[ComponentCluster],
    slots: &mut [Option<(PositionLabel, Confidence)>],
    sdb: &dyn SyllableLookup,
) {
    let n = clusters.len();
    let mut j = 0;
    while j < n {
        let start_ok =
            slots[j].is_none() && (j == 0 || slots[j - 1].is_some_and(|(l, _)| !l.leaves_open()));
        if !start_ok {
            j += 1;
            continue;
        }
        let best = (1..=MAX_SYLLABLE_CLUSTERS.min(n - j))
            .filter(|k| slots[j..j + k].iter().all(Option::is_none))
            .filter_map(|k| {
                let text: String = clusters[j..j + k]
                    .iter()
                    .map(ComponentCluster::text)
                    .collect();
                sdb.frequency(&text).map(|f| (k, f, text))
            })
            .filter(|(k, _, _)| {
                slots
                    .get(j + k)
                    .is_none_or(|s| s.is_none_or(|(l, _)| !l.needs_open()))
            })
            .max_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(b.2.cmp(&a.2)));
        match best {
            Some((k, _, _)) => {
                for (i, label) in syllable_labels(k).into_iter().enumerate() {
                    slots[j + i] = Some((label, Confidence::Syllable));
                }
                j += k;
            }
            None => j += 1,
        }
    }
}

fn syllable_labels(k: usize) -> Vec<PositionLabel> {
    use PositionLabel::*;
    match k {
        1 => vec![LR],
        2 => vec![LL, RR],
        _ => vec![LL, MM, RR],
    }
}

/// Clusters in the syllable left open after `slots`, or 0 if closed.
/// Unlabeled slots are not expected here.
fn open_state(slots: &[Option<(PositionLabel, Confidence)>]) -> usize {
    let mut open = 0;
    for (label, _) in slots.iter().flatten() {
        open = match label {
            PositionLabel::LL => 1,
            PositionLabel::MM if open > 0 => open + 1,
            PositionLabel::MM => 1,
            PositionLabel::RR | PositionLabel::LR => 0,
        };
    }
    open.min(MAX_SYLLABLE_CLUSTERS - 1)
}

/// Cost-minimal labelings of a run of `len` unlabeled clusters entered with
/// `entry` clusters already open and followed by `exit` (or the end).
/// Cost is (MM count, syllables begun); candidates come in label order
/// LL, RR, MM, LR, so the first one groups clusters in pairs.
pub fn default_labelings(
    len: usize,
    entry: usize,
    exit: Option<PositionLabel>,
) -> Vec<Vec<PositionLabel>> {
    type Cost = (usize, usize);
    // state = clusters in the open syllable (0 = closed)
    let states = MAX_SYLLABLE_CLUSTERS;
    let accepts = |state: usize| match exit {
        Some(PositionLabel::RR) => state > 0,
        Some(PositionLabel::MM) => state > 0 && state + 2 <= MAX_SYLLABLE_CLUSTERS,
        _ => state == 0,
    };
    let step = |state: usize, label: PositionLabel| -> Option<(usize, Cost)> {
        match (label, state) {
            (PositionLabel::LL, 0) => Some((1, (0, 1))),
            (PositionLabel::LR, 0) => Some((0, (0, 1))),
            (PositionLabel::MM, s) if s > 0 && s + 2 <= MAX_SYLLABLE_CLUSTERS => {
                Some((s + 1, (1, 0)))
            }
            (PositionLabel::RR, s) if s > 0 => Some((0, (0, 0))),
            _ => None,
        }
    };
    // best[i][s]: cheapest cost to finish from position i in state s
    let mut best: Vec<Vec<Option<Cost>>> = vec![vec![None; states]; len + 1];
    for (s, slot) in best[len].iter_mut().enumerate() {
        *slot = accepts(s).then_some((0, 0));
    }
    for i in (0..len).rev() {
        for s in 0..states {
            best[i][s] = PositionLabel::ALL
                .into_iter()
                .filter_map(|l| {
                    let (next, c) = step(s, l)?;
                    let rest = best[i + 1][next]?;
                    Some((c.0 + rest.0, c.1 + rest.1))
                })
                .min();
        }
    }
    let mut out = Vec::new();
    let Some(target) = best[0][entry] else {
        return out;
    };
    let mut path = Vec::with_capacity(len);
    enumerate(&best, &step, 0, entry, target, &mut path, &mut out);
    out
}

fn enumerate(
    best: &[Vec<Option<(usize, usize)>>],
    step: &dyn Fn(usize, PositionLabel) -> Option<(usize, (usize, usize))>,
    i: usize,
    state: usize,
    remaining: (usize, usize),
    path: &mut Vec<PositionLabel>,
    out: &mut Vec<Vec<PositionLabel>>,
) {
    if out.len() >= MAX_CANDIDATES {
        return;
    }
    if i + 1 == best.len() {
        out.push(path.clone());
        return;
    }
    for label in PositionLabel::ALL {
        let Some((next, c)) = step(state, label) else {
            continue;
        };
        let Some(rest) = best[i + 1][next] else {
            continue;
        };
        if (c.0 + rest.0, c.1 + rest.1) == remaining {
            path.push(label);
            enumerate(best, step, i + 1, next, rest, path, out);
            path.pop();
        }
    }
}

/// Checks that labels form complete syllables of 1-3 clusters.
pub fn check_labels(labels: &[PositionLabel]) -> Result<(), MalformedLabelSequence> {
    let mut open = 0usize;
    for (position, label) in labels.iter().enumerate() {
        let malformed = |reason| MalformedLabelSequence { position, reason };
        open = match (label, open) {
            (PositionLabel::LR, 0) => 0,
            (PositionLabel::LL, 0) => 1,
            (PositionLabel::LR | PositionLabel::LL, _) => {
                return Err(malformed(MalformedReason::Unclosed))
            }
            (PositionLabel::MM | PositionLabel::RR, 0) => {
                return Err(malformed(MalformedReason::NothingOpen))
            }
            (PositionLabel::MM, n) if n + 1 < MAX_SYLLABLE_CLUSTERS => n + 1,
            (PositionLabel::MM, _) => return Err(malformed(MalformedReason::TooLong)),
            (PositionLabel::RR, _) => 0,
        };
    }
    if open > 0 {
        return Err(MalformedLabelSequence {
            position: labels.len(),
            reason: MalformedReason::Unclosed,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MalformedReason {
    NothingOpen,
    Unclosed,
    TooLong,
}

impl fmt::Display for MalformedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NothingOpen => "no open syllable",
            Self::Unclosed => "syllable left open",
            Self::TooLong => "syllable longer than three clusters",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("malformed label sequence at position {position}: {reason}")]
pub struct MalformedLabelSequence {
    pub position: usize,
    pub reason: MalformedReason,
}

/// One to three clusters forming a syllable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syllable {
    pub clusters: Vec<ComponentCluster>,
    /// Cluster positions covered.
    pub span: Range<usize>,
}

impl Syllable {
    pub fn text(&self) -> String {
        self.clusters.iter().map(ComponentCluster::text).collect()
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

fn spans_to_syllables(labeled: &[LabeledCluster], spans: Vec<Range<usize>>) -> Vec<Syllable> {
    spans
        .into_iter()
        .map(|span| Syllable {
            clusters: labeled[span.clone()]
                .iter()
                .map(|l| l.cluster.clone())
                .collect(),
            span,
        })
        .collect()
}

pub fn merge_syllables(
    labeled: &[LabeledCluster],
) -> Result<Vec<Syllable>, MalformedLabelSequence> {
    let labels: Vec<PositionLabel> = labeled.iter().map(|l| l.label).collect();
    check_labels(&labels)?;
    let mut spans = Vec::new();
    let mut start = 0;
    for (i, label) in labels.iter().enumerate() {
        if !label.leaves_open() {
            spans.push(start..i + 1);
            start = i + 1;
        }
    }
    Ok(spans_to_syllables(labeled, spans))
}

/// Like [`merge_syllables`] but never fails: a stray `RR`/`MM` starts a
/// syllable, an `LL`/`LR` inside an open syllable closes it first, and
/// syllables are cut at three clusters. Returns the positions repaired.
pub fn merge_syllables_lenient(labeled: &[LabeledCluster]) -> (Vec<Syllable>, Vec<usize>) {
    let mut spans = Vec::new();
    let mut repaired = Vec::new();
    let mut open: Option<usize> = None;
    for (i, lc) in labeled.iter().enumerate() {
        let label = lc.label;
        if let Some(s) = open {
            if matches!(label, PositionLabel::LL | PositionLabel::LR)
                || i - s >= MAX_SYLLABLE_CLUSTERS
            {
                spans.push(s..i);
                repaired.push(i);
                open = None;
            }
        } else if label.needs_open() {
            repaired.push(i);
        }
        let start = open.unwrap_or(i);
        if label.leaves_open() {
            open = Some(start);
        } else {
            spans.push(start..i + 1);
            open = None;
        }
    }
    if let Some(s) = open {
        spans.push(s..labeled.len());
        repaired.push(labeled.len());
    }
    (spans_to_syllables(labeled, spans), repaired)
}
