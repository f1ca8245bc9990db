//! Codepoint classes of the Khmer block and the marker tables that drive
//! position labeling.
//!
//! All class membership lives in a line-oriented tables file so the
//! linguistic data can be audited and edited without touching code. The
//! default file ships in `data/khmer.tables` and is embedded at build time.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use thiserror::Error;

const BLOCK_START: u32 = 0x1780;
const BLOCK_END: u32 = 0x17FF;
const BLOCK_LEN: usize = (BLOCK_END - BLOCK_START + 1) as usize;
const DIGIT_ZERO: u32 = 0x17E0;

const DEFAULT_TABLES: &str = include_str!("../data/khmer.tables");

/// Consonant register. Carried for completeness; segmentation never
/// branches on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Series {
    A,
    O,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassKind {
    ConsonantA,
    ConsonantO,
    DependentVowel,
    IndependentVowel,
    Coeng,
    BeginSign,
    EndSign,
    ReplacementSign,
    Digit,
    OtherSign,
    Foreign,
}

impl ClassKind {
    pub fn is_consonant(self) -> bool {
        matches!(self, ClassKind::ConsonantA | ClassKind::ConsonantO)
    }

    /// Kinds that attach to a preceding base inside one orthographic unit.
    pub fn is_mark(self) -> bool {
        matches!(
            self,
            ClassKind::Coeng
                | ClassKind::DependentVowel
                | ClassKind::BeginSign
                | ClassKind::EndSign
                | ClassKind::ReplacementSign
        )
    }
}

/// The class of one scalar value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodepointClass {
    pub kind: ClassKind,
    pub value: char,
}

impl CodepointClass {
    /// Numeric value for `Digit` scalars.
    pub fn digit_value(&self) -> Option<u8> {
        match self.kind {
            ClassKind::Digit => Some((self.value as u32 - DIGIT_ZERO) as u8),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkerRole {
    Begin,
    End,
    Both,
    None,
}

/// Interchangeable subscript pair: after `trigger` the subscript is written
/// `with_trigger`, after any other base it is written `otherwise`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubconsonantRule {
    pub trigger: char,
    pub with_trigger: char,
    pub otherwise: char,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TablesError {
    #[error("tables line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("tables invariant violated by {}: {message}", fmt_scalar(*.scalar))]
    Invariant { scalar: char, message: String },
    #[error("tables invariant violated: {0}")]
    Structure(String),
    #[error("reading tables: {0}")]
    Io(String),
}

/// Immutable script data. Construct with [`load_tables`] or
/// [`ScriptTables::default_tables`].
#[derive(Clone, PartialEq, Eq)]
pub struct ScriptTables {
    pub consonant_series: BTreeMap<char, Series>,
    pub dependent_vowels: BTreeSet<Vec<char>>,
    pub independent_vowels: BTreeSet<char>,
    pub coeng: char,
    pub shifters: BTreeSet<char>,
    pub replacement_signs: BTreeSet<char>,
    pub sign_marks: BTreeSet<char>,
    pub begin_markers: BTreeSet<char>,
    pub end_markers: BTreeSet<char>,
    pub standalone_markers: BTreeSet<char>,
    pub digits: BTreeSet<char>,
    pub sign_unification: BTreeMap<Vec<char>, Vec<char>>,
    pub subconsonant_rules: Vec<SubconsonantRule>,
    kinds: Vec<ClassKind>,
    modifiers: BTreeSet<char>,
}

impl fmt::Debug for ScriptTables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScriptTables")
            .field("consonants", &self.consonant_series.len())
            .field("dependent_vowels", &self.dependent_vowels.len())
            .field("independent_vowels", &self.independent_vowels.len())
            .field("digits", &self.digits.len())
            .finish_non_exhaustive()
    }
}

impl ScriptTables {
    /// The tables embedded from `data/khmer.tables`.
    pub fn default_tables() -> ScriptTables {
        ScriptTables::parse(DEFAULT_TABLES).expect("embedded tables file is valid")
    }

    pub fn parse(text: &str) -> Result<ScriptTables, TablesError> {
        let raw = RawTables::parse(text)?;
        raw.validate()
    }

    pub fn kind(&self, cp: char) -> ClassKind {
        let v = cp as u32;
        if (BLOCK_START..=BLOCK_END).contains(&v) {
            self.kinds[(v - BLOCK_START) as usize]
        } else {
            ClassKind::Foreign
        }
    }

    pub fn is_consonant(&self, cp: char) -> bool {
        self.kind(cp).is_consonant()
    }

    /// Consonant or independent vowel: a scalar that opens a unit.
    pub fn is_base(&self, cp: char) -> bool {
        let k = self.kind(cp);
        k.is_consonant() || k == ClassKind::IndependentVowel
    }

    /// Dependent-vowel scalars that only ever trail another vowel in a
    /// compound entry (nikahit, reahmuk).
    pub fn is_vowel_modifier(&self, cp: char) -> bool {
        self.modifiers.contains(&cp)
    }

    pub fn series(&self, cp: char) -> Option<Series> {
        self.consonant_series.get(&cp).copied()
    }

    /// The prescribed subscript for `sub` under base `main`, if a rule covers it.
    pub fn subconsonant_for(&self, main: char, sub: char) -> Option<char> {
        self.subconsonant_rules
            .iter()
            .find(|r| r.with_trigger == sub || r.otherwise == sub)
            .map(|r| {
                if main == r.trigger {
                    r.with_trigger
                } else {
                    r.otherwise
                }
            })
    }

    /// Renders the tables in the file format accepted by [`load_tables`].
    pub fn serialize(&self) -> String {
        let mut out = String::from("# Khmer script tables\n");
        let set_line = |out: &mut String, section: &str, set: &BTreeSet<char>| {
            if !set.is_empty() {
                out.push_str(section);
                out.push('\t');
                out.push_str(&join_scalars(set.iter().copied()));
                out.push('\n');
            }
        };
        let series = |s: Series| -> BTreeSet<char> {
            self.consonant_series
                .iter()
                .filter(|(_, v)| **v == s)
                .map(|(c, _)| *c)
                .collect()
        };
        set_line(&mut out, "CONSONANT_A", &series(Series::A));
        set_line(&mut out, "CONSONANT_O", &series(Series::O));
        for v in &self.dependent_vowels {
            out.push_str("DEP_VOWEL\t");
            out.push_str(&join_scalars(v.iter().copied()));
            out.push('\n');
        }
        set_line(&mut out, "INDEP_VOWEL", &self.independent_vowels);
        set_line(&mut out, "COENG", &BTreeSet::from([self.coeng]));
        set_line(&mut out, "SHIFTER", &self.shifters);
        set_line(&mut out, "REPLACEMENT", &self.replacement_signs);
        set_line(&mut out, "MARK", &self.sign_marks);
        set_line(&mut out, "BEGIN_SIGN", &self.begin_markers);
        set_line(&mut out, "END_SIGN", &self.end_markers);
        set_line(&mut out, "STANDALONE", &self.standalone_markers);
        set_line(&mut out, "DIGIT", &self.digits);
        for (from, to) in &self.sign_unification {
            out.push_str(&format!(
                "SIGN_UNIFY\t{}\t{}\n",
                join_scalars(from.iter().copied()),
                join_scalars(to.iter().copied())
            ));
        }
        for r in &self.subconsonant_rules {
            out.push_str(&format!(
                "SUBCONS_RULE\t{}\t{}\t{}\n",
                fmt_scalar(r.trigger),
                fmt_scalar(r.with_trigger),
                fmt_scalar(r.otherwise)
            ));
        }
        out
    }
}

pub fn load_tables<R: Read>(mut source: R) -> Result<ScriptTables, TablesError> {
    let mut bytes = Vec::new();
    source
        .read_to_end(&mut bytes)
        .map_err(|e| TablesError::Io(e.to_string()))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| TablesError::Parse {
        line: 1 + bytes[..e.valid_up_to()]
            .iter()
            .filter(|b| **b == b'\n')
            .count(),
        message: format!("invalid UTF-8 at byte {}", e.valid_up_to()),
    })?;
    ScriptTables::parse(text)
}

/// Total classification of a scalar value.
pub fn classify(cp: char, tables: &ScriptTables) -> CodepointClass {
    CodepointClass {
        kind: tables.kind(cp),
        value: cp,
    }
}

pub fn marker_role(cp: char, tables: &ScriptTables) -> MarkerRole {
    if tables.standalone_markers.contains(&cp) {
        return MarkerRole::Both;
    }
    match tables.kind(cp) {
        ClassKind::Digit => return MarkerRole::Both,
        ClassKind::Foreign if !cp.is_control() => return MarkerRole::Both,
        _ => {}
    }
    match (
        tables.begin_markers.contains(&cp),
        tables.end_markers.contains(&cp),
    ) {
        (true, false) => MarkerRole::Begin,
        (false, true) => MarkerRole::End,
        // Validation keeps begin ∩ end inside the standalone set.
        (true, true) => MarkerRole::Both,
        (false, false) => MarkerRole::None,
    }
}

pub fn fmt_scalar(c: char) -> String {
    format!("U+{:04X}", c as u32)
}

fn join_scalars(it: impl Iterator<Item = char>) -> String {
    it.map(fmt_scalar).collect::<Vec<_>>().join(",")
}

fn parse_scalar(field: &str, line: usize) -> Result<char, TablesError> {
    let hex = field
        .trim()
        .strip_prefix("U+")
        .or_else(|| field.trim().strip_prefix("u+"))
        .ok_or_else(|| TablesError::Parse {
            line,
            message: format!("expected U+XXXX, found {field:?}"),
        })?;
    let v = u32::from_str_radix(hex, 16).map_err(|_| TablesError::Parse {
        line,
        message: format!("bad hex scalar {field:?}"),
    })?;
    char::from_u32(v).ok_or_else(|| TablesError::Parse {
        line,
        message: format!("{field} is not a unicode scalar value"),
    })
}

fn parse_list(field: &str, line: usize) -> Result<Vec<char>, TablesError> {
    if field.trim().is_empty() {
        return Err(TablesError::Parse {
            line,
            message: "empty scalar list".into(),
        });
    }
    field.split(',').map(|f| parse_scalar(f, line)).collect()
}

#[derive(Default)]
struct RawTables {
    series: Vec<(char, Series)>,
    dep_vowels: Vec<Vec<char>>,
    indep: Vec<char>,
    coeng: Vec<char>,
    shifters: Vec<char>,
    replacement: Vec<char>,
    marks: Vec<char>,
    begin: Vec<char>,
    end: Vec<char>,
    standalone: Vec<char>,
    digits: Vec<char>,
    unify: Vec<(Vec<char>, Vec<char>)>,
    subcons: Vec<SubconsonantRule>,
}

impl RawTables {
    fn parse(text: &str) -> Result<RawTables, TablesError> {
        let mut raw = RawTables::default();
        let mut entries = 0usize;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim_end();
            if content.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split('\t').collect();
            let section = fields[0].trim();
            let arity = match section {
                "SIGN_UNIFY" => 3,
                "SUBCONS_RULE" => 4,
                _ => 2,
            };
            if fields.len() != arity {
                return Err(TablesError::Parse {
                    line: lineno,
                    message: format!(
                        "{section} expects {} tab-separated fields, found {}",
                        arity,
                        fields.len()
                    ),
                });
            }
            match section {
                "CONSONANT_A" => raw.series.extend(
                    parse_list(fields[1], lineno)?
                        .into_iter()
                        .map(|c| (c, Series::A)),
                ),
                "CONSONANT_O" => raw.series.extend(
                    parse_list(fields[1], lineno)?
                        .into_iter()
                        .map(|c| (c, Series::O)),
                ),
                "DEP_VOWEL" => raw.dep_vowels.push(parse_list(fields[1], lineno)?),
                "INDEP_VOWEL" => raw.indep.extend(parse_list(fields[1], lineno)?),
                "COENG" => raw.coeng.extend(parse_list(fields[1], lineno)?),
                "SHIFTER" => raw.shifters.extend(parse_list(fields[1], lineno)?),
                "REPLACEMENT" => raw.replacement.extend(parse_list(fields[1], lineno)?),
                "MARK" => raw.marks.extend(parse_list(fields[1], lineno)?),
                "BEGIN_SIGN" => raw.begin.extend(parse_list(fields[1], lineno)?),
                "END_SIGN" => raw.end.extend(parse_list(fields[1], lineno)?),
                "STANDALONE" => raw.standalone.extend(parse_list(fields[1], lineno)?),
                "DIGIT" => raw.digits.extend(parse_list(fields[1], lineno)?),
                "SIGN_UNIFY" => raw.unify.push((
                    parse_list(fields[1], lineno)?,
                    parse_list(fields[2], lineno)?,
                )),
                "SUBCONS_RULE" => raw.subcons.push(SubconsonantRule {
                    trigger: parse_scalar(fields[1], lineno)?,
                    with_trigger: parse_scalar(fields[2], lineno)?,
                    otherwise: parse_scalar(fields[3], lineno)?,
                }),
                other => {
                    return Err(TablesError::Parse {
                        line: lineno,
                        message: format!("unknown section {other:?}"),
                    })
                }
            }
            entries += 1;
        }
        if entries == 0 {
            return Err(TablesError::Parse {
                line: 1,
                message: "tables file has no entries".into(),
            });
        }
        Ok(raw)
    }

    fn validate(self) -> Result<ScriptTables, TablesError> {
        let invariant = |scalar: char, message: &str| TablesError::Invariant {
            scalar,
            message: message.to_string(),
        };
        let mut map = KindMap::new();
        let mut consonant_series = BTreeMap::new();
        for &(c, s) in &self.series {
            let kind = match s {
                Series::A => ClassKind::ConsonantA,
                Series::O => ClassKind::ConsonantO,
            };
            map.assign(c, kind)?;
            consonant_series.insert(c, s);
        }
        let mut dependent_vowels = BTreeSet::new();
        let mut modifiers = BTreeSet::new();
        for v in &self.dep_vowels {
            for &c in v {
                map.assign(c, ClassKind::DependentVowel)?;
            }
            for &c in &v[1..] {
                modifiers.insert(c);
            }
            if !dependent_vowels.insert(v.clone()) {
                return Err(invariant(v[0], "duplicate dependent vowel entry"));
            }
        }
        for &c in &self.indep {
            map.assign(c, ClassKind::IndependentVowel)?;
        }
        match self.coeng.as_slice() {
            [c] => map.assign(*c, ClassKind::Coeng)?,
            _ => {
                return Err(TablesError::Structure(format!(
                    "exactly one COENG scalar required, found {}",
                    self.coeng.len()
                )))
            }
        }
        for &c in &self.shifters {
            map.assign(c, ClassKind::BeginSign)?;
        }
        for &c in &self.replacement {
            map.assign(c, ClassKind::ReplacementSign)?;
        }
        for &c in &self.marks {
            map.assign(c, ClassKind::EndSign)?;
        }
        for &c in &self.digits {
            if !(DIGIT_ZERO..DIGIT_ZERO + 10).contains(&(c as u32)) {
                return Err(invariant(c, "digits must lie in U+17E0..U+17E9"));
            }
            map.assign(c, ClassKind::Digit)?;
        }
        // Role-only members take a sign kind when no kind section claimed them.
        for &c in &self.begin {
            if map.unassigned(c) {
                map.assign(c, ClassKind::BeginSign)?;
            }
        }
        for &c in &self.end {
            if map.unassigned(c) {
                map.assign(c, ClassKind::EndSign)?;
            }
        }
        let kinds = map.kinds;
        let kind_of = |c: char| match block_index(c) {
            Some(i) => kinds[i],
            None => ClassKind::Foreign,
        };
        for &c in &self.begin {
            if !matches!(kind_of(c), ClassKind::BeginSign | ClassKind::DependentVowel) {
                return Err(invariant(
                    c,
                    &format!("begin marker classified {:?}", kind_of(c)),
                ));
            }
        }
        for &c in &self.end {
            if !matches!(kind_of(c), ClassKind::EndSign | ClassKind::DependentVowel) {
                return Err(invariant(
                    c,
                    &format!("end marker classified {:?}", kind_of(c)),
                ));
            }
        }
        for &c in &self.standalone {
            let k = kind_of(c);
            if k.is_consonant() || k == ClassKind::Coeng {
                return Err(invariant(c, &format!("standalone marker classified {k:?}")));
            }
        }
        let begin_markers: BTreeSet<char> = self.begin.iter().copied().collect();
        let end_markers: BTreeSet<char> = self.end.iter().copied().collect();
        let standalone_markers: BTreeSet<char> = self.standalone.iter().copied().collect();
        if let Some(c) = begin_markers
            .intersection(&end_markers)
            .find(|c| !standalone_markers.contains(c))
        {
            return Err(invariant(
                *c,
                "marker in both begin and end sets must also be standalone",
            ));
        }

        let mut sign_unification = BTreeMap::new();
        for (from, to) in &self.unify {
            for &c in from.iter().chain(to) {
                if kind_of(c) != ClassKind::DependentVowel {
                    return Err(invariant(
                        c,
                        "sign unification is limited to dependent vowels",
                    ));
                }
            }
            if from == to {
                return Err(invariant(
                    from[0],
                    "sign unification maps a sequence to itself",
                ));
            }
            if sign_unification.insert(from.clone(), to.clone()).is_some() {
                return Err(invariant(from[0], "duplicate sign unification key"));
            }
        }
        for to in sign_unification.values() {
            if let Some(key) = sign_unification.keys().find(|k| contains_seq(to, k)) {
                return Err(invariant(
                    key[0],
                    "sign unification target contains a unification key",
                ));
            }
        }

        let mut seen_sub = BTreeSet::new();
        for r in &self.subcons {
            for c in [r.trigger, r.with_trigger, r.otherwise] {
                if !kind_of(c).is_consonant() {
                    return Err(invariant(c, "subconsonant rules range over consonants"));
                }
            }
            if r.with_trigger == r.otherwise {
                return Err(invariant(
                    r.otherwise,
                    "subconsonant rule pair is degenerate",
                ));
            }
            for c in [r.with_trigger, r.otherwise] {
                if !seen_sub.insert(c) {
                    return Err(invariant(c, "subscript appears in two subconsonant rules"));
                }
            }
        }

        Ok(ScriptTables {
            consonant_series,
            dependent_vowels,
            independent_vowels: self.indep.iter().copied().collect(),
            coeng: self.coeng[0],
            shifters: self.shifters.iter().copied().collect(),
            replacement_signs: self.replacement.iter().copied().collect(),
            sign_marks: self.marks.iter().copied().collect(),
            begin_markers,
            end_markers,
            standalone_markers,
            digits: self.digits.iter().copied().collect(),
            sign_unification,
            subconsonant_rules: self.subcons,
            kinds,
            modifiers,
        })
    }
}

struct KindMap {
    kinds: Vec<ClassKind>,
    assigned: Vec<bool>,
}

impl KindMap {
    fn new() -> Self {
        KindMap {
            kinds: vec![ClassKind::OtherSign; BLOCK_LEN],
            assigned: vec![false; BLOCK_LEN],
        }
    }

    fn unassigned(&self, cp: char) -> bool {
        block_index(cp).is_some_and(|i| !self.assigned[i])
    }

    fn assign(&mut self, cp: char, kind: ClassKind) -> Result<(), TablesError> {
        let i = block_index(cp).ok_or_else(|| TablesError::Invariant {
            scalar: cp,
            message: "class members must lie in the Khmer block".into(),
        })?;
        if self.assigned[i] && self.kinds[i] != kind {
            return Err(TablesError::Invariant {
                scalar: cp,
                message: "scalar listed under two classes".into(),
            });
        }
        self.assigned[i] = true;
        self.kinds[i] = kind;
        Ok(())
    }
}

fn block_index(c: char) -> Option<usize> {
    let v = c as u32;
    (BLOCK_START..=BLOCK_END)
        .contains(&v)
        .then(|| (v - BLOCK_START) as usize)
}

pub(crate) fn contains_seq(hay: &[char], needle: &[char]) -> bool {
    !needle.is_empty() && hay.windows(needle.len()).any(|w| w == needle)
}
