//! Keystroke-order normalization.
//!
//! Khmer text can be typed with the marks of one orthographic unit in many
//! orders. Three passes bring it to a single spelling:
//!
//! 1. [`reorder`] sorts each unit into slot order: base, robat, coeng
//!    pairs (typed relative order kept), register shifter, dependent vowel,
//!    vowel modifiers (nikahit, reahmuk), then end signs.
//! 2. [`unify_signs`] rewrites sign sequences declared equivalent in the
//!    tables (`SIGN_UNIFY`).
//! 3. [`unify_subconsonant`] picks the prescribed form of interchangeable
//!    subscripts (`SUBCONS_RULE`).
//!
//! This is a script-specific ordering, not Unicode normalization: NFC and
//! NFD leave Khmer untouched.

use std::fmt;

use thiserror::Error;

use crate::script::{ClassKind, ScriptTables};

/// Arbitrary input scalars, in typed order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawSequence {
    pub codepoints: Vec<char>,
}

impl From<&str> for RawSequence {
    fn from(s: &str) -> Self {
        RawSequence {
            codepoints: s.chars().collect(),
        }
    }
}

impl From<Vec<char>> for RawSequence {
    fn from(codepoints: Vec<char>) -> Self {
        RawSequence { codepoints }
    }
}

/// A scalar that moved during normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub raw: usize,
    pub canonical: usize,
}

/// Normalized scalars. Only produced by [`normalize`] and friends, or by
/// [`CanonicalSequence::from_canonical`] after verification.
/// Equality and hashing look at the scalars only, not provenance.
#[derive(Debug, Clone, Default)]
pub struct CanonicalSequence {
    codepoints: Vec<char>,
    // canonical index -> raw index
    origins: Vec<usize>,
}

impl PartialEq for CanonicalSequence {
    fn eq(&self, other: &Self) -> bool {
        self.codepoints == other.codepoints
    }
}

impl Eq for CanonicalSequence {}

impl std::hash::Hash for CanonicalSequence {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.codepoints.hash(state);
    }
}

impl CanonicalSequence {
    pub fn codepoints(&self) -> &[char] {
        &self.codepoints
    }

    pub fn len(&self) -> usize {
        self.codepoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codepoints.is_empty()
    }

    /// Raw-to-canonical moves, for diagnostics.
    pub fn provenance(&self) -> Vec<Move> {
        self.origins
            .iter()
            .enumerate()
            .filter(|(c, r)| *c != **r)
            .map(|(canonical, &raw)| Move { raw, canonical })
            .collect()
    }

    /// Wraps text that is already canonical. Fails if normalizing it would
    /// change it or raise an error.
    pub fn from_canonical(text: &str, tables: &ScriptTables) -> Result<Self, NotCanonical> {
        let raw = RawSequence::from(text);
        match normalize(&raw, tables) {
            Ok(seq) if seq.codepoints == raw.codepoints => Ok(seq),
            Ok(seq) => Err(NotCanonical {
                text: text.to_string(),
                expected: seq.to_string(),
            }),
            Err(_) => Err(NotCanonical {
                text: text.to_string(),
                expected: String::new(),
            }),
        }
    }

    /// A contiguous piece of the sequence, keeping provenance. Splitting a
    /// slice taken at cluster boundaries gives back the same clusters, but
    /// the slice need not be canonical on its own when the input held
    /// orphan or malformed marks.
    pub fn slice(&self, range: std::ops::Range<usize>) -> CanonicalSequence {
        CanonicalSequence {
            codepoints: self.codepoints[range.clone()].to_vec(),
            origins: self.origins[range].to_vec(),
        }
    }

    /// Builds a sequence from scalars known to be canonical, e.g. the
    /// concatenation of clusters split from a canonical sequence.
    pub(crate) fn from_trusted(codepoints: Vec<char>) -> Self {
        let origins = (0..codepoints.len()).collect();
        CanonicalSequence {
            codepoints,
            origins,
        }
    }
}

impl fmt::Display for CanonicalSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.codepoints {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{text:?} is not in canonical form (normalizes to {expected:?})")]
pub struct NotCanonical {
    pub text: String,
    pub expected: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("coeng at position {position} has no following consonant")]
    DanglingCoeng { position: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagnosticCode {
    DanglingCoeng,
    CoengRepaired,
    MalformedUnit,
    OrphanMark,
    PreBaseVowel,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::DanglingCoeng => "dangling-coeng",
            DiagnosticCode::CoengRepaired => "coeng-repaired",
            DiagnosticCode::MalformedUnit => "malformed-unit",
            DiagnosticCode::OrphanMark => "orphan-mark",
            DiagnosticCode::PreBaseVowel => "pre-base-vowel",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A non-fatal observation. `position` is a scalar offset into the raw input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub position: usize,
    pub code: DiagnosticCode,
    pub message: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NormalizeOptions {
    /// Drop dangling coengs (with a diagnostic) instead of failing.
    pub lenient: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Normalized {
    pub sequence: CanonicalSequence,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn reorder(
    seq: &RawSequence,
    tables: &ScriptTables,
) -> Result<CanonicalSequence, NormalizeError> {
    reorder_with(seq, tables, NormalizeOptions::default()).map(|n| n.sequence)
}

pub fn reorder_with(
    seq: &RawSequence,
    tables: &ScriptTables,
    options: NormalizeOptions,
) -> Result<Normalized, NormalizeError> {
    let mut diagnostics = Vec::new();
    let tokens = tokenize(&seq.codepoints, tables, options, &mut diagnostics)?;
    let mut out = Emitter::default();
    let mut unit: Option<Unit> = None;
    let mut pending: Vec<Token> = Vec::new();

    for (i, tok) in tokens.iter().enumerate() {
        match tok.slot {
            Slot::Base => {
                if let Some(u) = unit.take() {
                    u.flush(tables, &mut out, &mut diagnostics);
                }
                let mut u = Unit::new(tok.clone());
                for p in pending.drain(..) {
                    diagnostics.push(Diagnostic {
                        position: p.chars[0].1,
                        code: DiagnosticCode::PreBaseVowel,
                        message: "vowel typed before its base moved after it".into(),
                    });
                    u.prebase += 1;
                    u.members.push(p);
                }
                unit = Some(u);
            }
            Slot::Other => {
                if let Some(u) = unit.take() {
                    u.flush(tables, &mut out, &mut diagnostics);
                }
                out.push_token(tok);
            }
            _ => {
                let is_vowel = matches!(tok.slot, Slot::Vowel | Slot::Modifier);
                let base_follows = is_vowel && base_ahead(&tokens[i + 1..]);
                match unit.as_mut() {
                    Some(u)
                        if !(base_follows
                            && tok.slot == Slot::Vowel
                            && !u.accepts_vowel(tok, tables)) =>
                    {
                        u.members.push(tok.clone());
                    }
                    _ if base_follows => pending.push(tok.clone()),
                    _ => {
                        diagnostics.push(Diagnostic {
                            position: tok.chars[0].1,
                            code: DiagnosticCode::OrphanMark,
                            message: "mark with no base to attach to".into(),
                        });
                        out.push_token(tok);
                    }
                }
            }
        }
    }
    if let Some(u) = unit.take() {
        u.flush(tables, &mut out, &mut diagnostics);
    }
    debug_assert!(pending.is_empty());
    diagnostics.sort_by_key(|d| (d.position, d.code));
    Ok(Normalized {
        sequence: CanonicalSequence {
            codepoints: out.codepoints,
            origins: out.origins,
        },
        diagnostics,
    })
}

/// Replaces every unification key with its value, leftmost-longest.
pub fn unify_signs(seq: CanonicalSequence, tables: &ScriptTables) -> CanonicalSequence {
    if tables.sign_unification.is_empty() {
        return seq;
    }
    let mut keys: Vec<(&Vec<char>, &Vec<char>)> = tables.sign_unification.iter().collect();
    keys.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
    let mut codepoints = Vec::with_capacity(seq.codepoints.len());
    let mut origins = Vec::with_capacity(seq.origins.len());
    let mut i = 0;
    'outer: while i < seq.codepoints.len() {
        for (from, to) in &keys {
            if seq.codepoints[i..].starts_with(from) {
                codepoints.extend(to.iter().copied());
                origins.extend(std::iter::repeat_n(seq.origins[i], to.len()));
                i += from.len();
                continue 'outer;
            }
        }
        codepoints.push(seq.codepoints[i]);
        origins.push(seq.origins[i]);
        i += 1;
    }
    CanonicalSequence {
        codepoints,
        origins,
    }
}

/// Rewrites each coeng subscript to the form the tables prescribe for the
/// unit's base consonant.
pub fn unify_subconsonant(mut seq: CanonicalSequence, tables: &ScriptTables) -> CanonicalSequence {
    if tables.subconsonant_rules.is_empty() {
        return seq;
    }
    let mut main: Option<char> = None;
    let mut i = 0;
    while i < seq.codepoints.len() {
        let c = seq.codepoints[i];
        let kind = tables.kind(c);
        if tables.is_base(c) {
            main = Some(c);
        } else if kind == ClassKind::Coeng {
            if let (Some(m), Some(&sub)) = (main, seq.codepoints.get(i + 1)) {
                if tables.is_consonant(sub) {
                    if let Some(prescribed) = tables.subconsonant_for(m, sub) {
                        seq.codepoints[i + 1] = prescribed;
                    }
                    i += 1;
                }
            }
        } else if !kind.is_mark() {
            main = None;
        }
        i += 1;
    }
    seq
}

pub fn normalize(
    seq: &RawSequence,
    tables: &ScriptTables,
) -> Result<CanonicalSequence, NormalizeError> {
    normalize_with(seq, tables, NormalizeOptions::default()).map(|n| n.sequence)
}

pub fn normalize_with(
    seq: &RawSequence,
    tables: &ScriptTables,
    options: NormalizeOptions,
) -> Result<Normalized, NormalizeError> {
    let Normalized {
        sequence,
        diagnostics,
    } = reorder_with(seq, tables, options)?;
    let sequence = unify_subconsonant(unify_signs(sequence, tables), tables);
    Ok(Normalized {
        sequence,
        diagnostics,
    })
}

pub fn normalize_str(
    text: &str,
    tables: &ScriptTables,
) -> Result<CanonicalSequence, NormalizeError> {
    normalize(&RawSequence::from(text), tables)
}

// Sort rank inside a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Base,
    Replacement,
    Pair,
    Shifter,
    Vowel,
    Modifier,
    Sign,
    Other,
}

#[derive(Debug, Clone)]
struct Token {
    slot: Slot,
    // (scalar, raw index)
    chars: Vec<(char, usize)>,
}

fn mark_slot(c: char, tables: &ScriptTables) -> Option<Slot> {
    match tables.kind(c) {
        ClassKind::ReplacementSign => Some(Slot::Replacement),
        ClassKind::BeginSign => Some(Slot::Shifter),
        ClassKind::DependentVowel if tables.is_vowel_modifier(c) => Some(Slot::Modifier),
        ClassKind::DependentVowel => Some(Slot::Vowel),
        ClassKind::EndSign => Some(Slot::Sign),
        _ => None,
    }
}

fn tokenize(
    raw: &[char],
    tables: &ScriptTables,
    options: NormalizeOptions,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<Vec<Token>, NormalizeError> {
    let mut tokens = Vec::with_capacity(raw.len());
    let mut consumed = vec![false; raw.len()];
    for i in 0..raw.len() {
        if consumed[i] {
            continue;
        }
        let c = raw[i];
        if tables.is_base(c) {
            tokens.push(Token {
                slot: Slot::Base,
                chars: vec![(c, i)],
            });
        } else if tables.kind(c) == ClassKind::Coeng {
            // A coeng pairs with the next consonant; marks typed in between
            // are skipped over and sorted back into place later.
            let mut j = i + 1;
            while j < raw.len() && mark_slot(raw[j], tables).is_some() {
                j += 1;
            }
            if j < raw.len() && tables.is_consonant(raw[j]) {
                if j > i + 1 {
                    diagnostics.push(Diagnostic {
                        position: i,
                        code: DiagnosticCode::CoengRepaired,
                        message: "marks typed between coeng and its consonant".into(),
                    });
                }
                consumed[j] = true;
                tokens.push(Token {
                    slot: Slot::Pair,
                    chars: vec![(c, i), (raw[j], j)],
                });
            } else if options.lenient {
                diagnostics.push(Diagnostic {
                    position: i,
                    code: DiagnosticCode::DanglingCoeng,
                    message: "coeng with no following consonant dropped".into(),
                });
            } else {
                return Err(NormalizeError::DanglingCoeng { position: i });
            }
        } else {
            tokens.push(Token {
                slot: mark_slot(c, tables).unwrap_or(Slot::Other),
                chars: vec![(c, i)],
            });
        }
    }
    Ok(tokens)
}

// A base follows after any run of vowel marks.
fn base_ahead(rest: &[Token]) -> bool {
    rest.iter()
        .find(|t| !matches!(t.slot, Slot::Vowel | Slot::Modifier))
        .is_some_and(|t| t.slot == Slot::Base)
}

struct Unit {
    base: Token,
    members: Vec<Token>,
    // leading members that were typed before the base
    prebase: usize,
}

impl Unit {
    fn new(base: Token) -> Self {
        Unit {
            base,
            members: Vec::new(),
            prebase: 0,
        }
    }

    fn vowel_run(&self) -> Vec<char> {
        self.members
            .iter()
            .filter(|t| t.slot == Slot::Vowel)
            .map(|t| t.chars[0].0)
            .collect()
    }

    fn accepts_vowel(&self, tok: &Token, tables: &ScriptTables) -> bool {
        let mut run = self.vowel_run();
        run.push(tok.chars[0].0);
        vowel_item_ok(&run, tables)
    }

    fn well_formed(&self, tables: &ScriptTables) -> bool {
        let count = |slot| self.members.iter().filter(|t| t.slot == slot).count();
        let mut modifiers: Vec<char> = self
            .members
            .iter()
            .filter(|t| t.slot == Slot::Modifier)
            .map(|t| t.chars[0].0)
            .collect();
        let n_mod = modifiers.len();
        modifiers.sort_unstable();
        modifiers.dedup();
        vowel_item_ok(&self.vowel_run(), tables)
            && count(Slot::Shifter) <= 1
            && count(Slot::Replacement) <= 1
            && modifiers.len() == n_mod
    }

    fn flush(
        mut self,
        tables: &ScriptTables,
        out: &mut Emitter,
        diagnostics: &mut Vec<Diagnostic>,
    ) {
        if self.well_formed(tables) {
            self.members.sort_by_key(|t| t.slot);
            out.push_token(&self.base);
            for t in &self.members {
                out.push_token(t);
            }
        } else {
            diagnostics.push(Diagnostic {
                position: self.base.chars[0].1,
                code: DiagnosticCode::MalformedUnit,
                message: "unit has no canonical order; left as typed".into(),
            });
            for t in &self.members[..self.prebase] {
                out.push_token(t);
            }
            out.push_token(&self.base);
            for t in &self.members[self.prebase..] {
                out.push_token(t);
            }
        }
    }
}

// At most one vowel, or a split spelling that sign unification will join.
fn vowel_item_ok(run: &[char], tables: &ScriptTables) -> bool {
    run.len() <= 1 || tables.sign_unification.contains_key(run)
}

#[derive(Default)]
struct Emitter {
    codepoints: Vec<char>,
    origins: Vec<usize>,
}

impl Emitter {
    fn push_token(&mut self, t: &Token) {
        for &(c, i) in &t.chars {
            self.codepoints.push(c);
            self.origins.push(i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KA: char = '\u{1780}';
    const TA: char = '\u{178F}';
    const DA: char = '\u{178A}';
    const RO: char = '\u{179A}';
    const SA: char = '\u{179F}';
    const COENG: char = '\u{17D2}';
    const AA: char = '\u{17B6}';
    const I: char = '\u{17B7}';
    const II: char = '\u{17B8}';
    const U: char = '\u{17BB}';
    const E: char = '\u{17C1}';
    const OO: char = '\u{17C4}';
    const OE: char = '\u{17BE}';
    const NIKAHIT: char = '\u{17C6}';
    const SHIFT: char = '\u{17C9}';
    const BANTOC: char = '\u{17CB}';

    fn t() -> ScriptTables {
        ScriptTables::default_tables()
    }

    fn norm(cps: &[char]) -> Vec<char> {
        normalize(&RawSequence::from(cps.to_vec()), &t())
            .unwrap()
            .codepoints()
            .to_vec()
    }

    #[test]
    fn vowel_before_subscript_moves_after() {
        let tables = t();
        let out = reorder(&RawSequence::from(vec![KA, AA, COENG, RO]), &tables).unwrap();
        assert_eq!(out.codepoints(), &[KA, COENG, RO, AA]);
        assert!(!out.provenance().is_empty());
    }

    #[test]
    fn canonical_input_is_stable() {
        let tables = t();
        let s = vec![SA, COENG, DA, COENG, RO, II];
        let out = reorder(&RawSequence::from(s.clone()), &tables).unwrap();
        assert_eq!(out.codepoints(), s.as_slice());
        assert!(out.provenance().is_empty());
    }

    #[test]
    fn four_typings_of_one_syllable() {
        // sa + subscript da + subscript ro + ii, typed four ways
        let canonical = vec![SA, COENG, DA, COENG, RO, II];
        let variants = [
            vec![SA, COENG, DA, COENG, RO, II],
            vec![SA, COENG, DA, II, COENG, RO],
            vec![SA, II, COENG, DA, COENG, RO],
            vec![II, SA, COENG, DA, COENG, RO],
        ];
        for v in variants {
            assert_eq!(norm(&v), canonical, "variant {v:?}");
        }
    }

    #[test]
    fn modifier_sorts_after_vowel() {
        assert_eq!(norm(&[KA, NIKAHIT, U]), vec![KA, U, NIKAHIT]);
    }

    #[test]
    fn shifter_and_sign_order() {
        assert_eq!(norm(&[KA, AA, SHIFT]), vec![KA, SHIFT, AA]);
        assert_eq!(norm(&[KA, BANTOC, AA]), vec![KA, AA, BANTOC]);
    }

    #[test]
    fn split_vowel_unifies() {
        assert_eq!(norm(&[KA, E, AA]), vec![KA, OO]);
        assert_eq!(norm(&[KA, E, II]), vec![KA, OE]);
        // halves typed around a subscript
        assert_eq!(norm(&[KA, E, COENG, RO, AA]), vec![KA, COENG, RO, OO]);
        // e typed before the base
        assert_eq!(norm(&[E, KA, AA]), vec![KA, OO]);
    }

    #[test]
    fn unify_signs_identity_without_keys() {
        let tables = t();
        let seq = CanonicalSequence::from_trusted(vec![KA, AA]);
        assert_eq!(unify_signs(seq.clone(), &tables), seq);
        let twice = unify_signs(
            unify_signs(CanonicalSequence::from_trusted(vec![KA, E, AA]), &tables),
            &tables,
        );
        assert_eq!(twice.codepoints(), &[KA, OO]);
    }

    #[test]
    fn subscript_rule() {
        let tables = t();
        let fix = |v: Vec<char>| unify_subconsonant(CanonicalSequence::from_trusted(v), &tables);
        assert_eq!(fix(vec![TA, COENG, DA]).codepoints(), &[TA, COENG, TA]);
        assert_eq!(fix(vec![SA, COENG, TA]).codepoints(), &[SA, COENG, DA]);
        assert_eq!(fix(vec![SA, COENG, RO]).codepoints(), &[SA, COENG, RO]);
        let once = fix(vec![TA, COENG, DA, KA, COENG, TA]);
        assert_eq!(fix(once.codepoints().to_vec()), once);
    }

    #[test]
    fn dangling_coeng() {
        let tables = t();
        assert_eq!(
            normalize(&RawSequence::from(vec![KA, COENG]), &tables),
            Err(NormalizeError::DanglingCoeng { position: 1 })
        );
        let lenient = normalize_with(
            &RawSequence::from(vec![KA, COENG, 'x']),
            &tables,
            NormalizeOptions { lenient: true },
        )
        .unwrap();
        assert_eq!(lenient.sequence.codepoints(), &[KA, 'x']);
        assert_eq!(lenient.diagnostics[0].code, DiagnosticCode::DanglingCoeng);
    }

    #[test]
    fn coeng_repair_over_marks() {
        assert_eq!(norm(&[KA, COENG, U, RO]), vec![KA, COENG, RO, U]);
    }

    #[test]
    fn malformed_unit_passes_through() {
        let tables = t();
        let out = normalize_with(
            &RawSequence::from(vec![KA, AA, I]),
            &tables,
            NormalizeOptions::default(),
        )
        .unwrap();
        assert_eq!(out.sequence.codepoints(), &[KA, AA, I]);
        assert_eq!(out.diagnostics[0].code, DiagnosticCode::MalformedUnit);
    }

    #[test]
    fn second_vowel_moves_to_next_base() {
        assert_eq!(norm(&[KA, AA, E, SA]), vec![KA, AA, SA, E]);
    }

    #[test]
    fn empty() {
        assert!(norm(&[]).is_empty());
    }

    #[test]
    fn from_canonical_checks() {
        let tables = t();
        assert!(CanonicalSequence::from_canonical("\u{1780}\u{17B6}", &tables).is_ok());
        assert!(
            CanonicalSequence::from_canonical("\u{1780}\u{17B6}\u{17D2}\u{179A}", &tables).is_err()
        );
    }
}
