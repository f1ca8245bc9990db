//! Syllable and word segmentation of running text.

use std::collections::HashSet;
use std::fmt;

use crate::grammar::split_clusters;
use crate::label::{label_clusters_with, merge_syllables_lenient, LabelDatabases, SyllableLookup};
use crate::normalize::{normalize_with, NormalizeOptions, RawSequence};
use crate::pipeline::LexiconEntry;
use crate::script::ScriptTables;

pub const DEFAULT_SEPARATOR: &str = "|";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedText {
    pub units: Vec<String>,
    pub separator: String,
    pub diagnostics: Vec<String>,
}

impl SegmentedText {
    pub fn render(&self) -> String {
        self.units.join(&self.separator)
    }

    /// The text without separators.
    pub fn joined(&self) -> String {
        self.units.concat()
    }
}

impl fmt::Display for SegmentedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Databases and settings for segmentation.
pub struct Segmenter<'a> {
    pub tables: &'a ScriptTables,
    pub dbs: &'a LabelDatabases,
    pub sdb: Option<&'a dyn SyllableLookup>,
    pub separator: String,
}

impl<'a> Segmenter<'a> {
    pub fn new(tables: &'a ScriptTables, dbs: &'a LabelDatabases) -> Self {
        Segmenter {
            tables,
            dbs,
            sdb: None,
            separator: DEFAULT_SEPARATOR.to_string(),
        }
    }

    pub fn with_sdb(mut self, sdb: &'a dyn SyllableLookup) -> Self {
        self.sdb = Some(sdb);
        self
    }

    pub fn with_separator(mut self, separator: impl Into<String>) -> Self {
        self.separator = separator.into();
        self
    }

    pub fn segment_syllables(&self, text: &str) -> SegmentedText {
        segment_syllables(text, self)
    }
}

pub fn segment_syllables(text: &str, seg: &Segmenter<'_>) -> SegmentedText {
    let normalized = normalize_with(
        &RawSequence::from(text),
        seg.tables,
        NormalizeOptions { lenient: true },
    )
    .expect("lenient normalization does not fail");
    let mut diagnostics: Vec<String> = normalized
        .diagnostics
        .iter()
        .map(|d| format!("{} at {}: {}", d.code.as_str(), d.position, d.message))
        .collect();
    let clusters = split_clusters(&normalized.sequence, seg.tables);
    let labeling = label_clusters_with(&clusters, seg.tables, seg.dbs, seg.sdb);
    let (syllables, repaired) = merge_syllables_lenient(&labeling.clusters);
    diagnostics.extend(
        repaired
            .iter()
            .map(|p| format!("label sequence repaired at cluster {p}")),
    );
    SegmentedText {
        units: syllables.iter().map(|s| s.text()).collect(),
        separator: seg.separator.clone(),
        diagnostics,
    }
}

/// Normalized lexicon texts for word matching.
#[derive(Debug, Clone, Default)]
pub struct WordLexicon {
    words: HashSet<String>,
    longest: usize,
}

impl WordLexicon {
    pub fn new(entries: &[LexiconEntry], tables: &ScriptTables) -> Self {
        let mut lex = WordLexicon::default();
        for e in entries {
            let seq = normalize_with(
                &RawSequence::from(e.text.as_str()),
                tables,
                NormalizeOptions { lenient: true },
            )
            .expect("lenient normalization does not fail")
            .sequence;
            lex.longest = lex.longest.max(seq.len());
            lex.words.insert(seq.to_string());
        }
        lex
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Syllable segmentation, then greedy longest match of syllable runs
/// against the lexicon. Unmatched syllables pass through on their own.
pub fn segment_words(text: &str, lexicon: &WordLexicon, seg: &Segmenter<'_>) -> SegmentedText {
    let syllables = segment_syllables(text, seg);
    let mut diagnostics = syllables.diagnostics;
    let units = syllables.units;
    let mut words = Vec::new();
    let mut i = 0;
    while i < units.len() {
        let mut best = None;
        let mut word = String::new();
        for (k, unit) in units[i..].iter().enumerate() {
            word.push_str(unit);
            if word.chars().count() > lexicon.longest {
                break;
            }
            if lexicon.contains(&word) {
                best = Some((k + 1, word.clone()));
            }
        }
        match best {
            Some((k, w)) => {
                words.push(w);
                i += k;
            }
            None => {
                diagnostics.push(format!("syllable {:?} not in lexicon", units[i]));
                words.push(units[i].clone());
                i += 1;
            }
        }
    }
    SegmentedText {
        units: words,
        separator: seg.separator.clone(),
        diagnostics,
    }
}
