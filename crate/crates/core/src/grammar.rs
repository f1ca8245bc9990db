//! Component clusters.
//!
//! A canonical sequence is cut into clusters, each matching one slot
//! pattern:
//!
//! ```text
//! SC         V [C]
//! CC begin   C [X2] [X3] [X1] [X4]
//! CC center  (Y5) [Y6] (Y7) [Y8] [Y9]
//! CC end     (Z10) [Z11] [Z12]
//! ```
//!
//! Slots are listed in storage order. X2/X3/Y7/Y8 are coeng+consonant
//! pairs, X4/Y9 a dependent vowel with its modifiers, X1 a begin sign, Y6
//! the replacement sign, Z12 an end sign. A center cluster opens with
//! either Y5 or Y7. Z11 is only bound when an end sign follows it.
//!
//! Each pattern is matched by a small DFA with last-accept tracking. The
//! splitter tries SC first, then keeps the longest CC match (ties go
//! begin, center, end). Anything left over becomes a one-scalar foreign
//! cluster, so splitting is total and lossless.

use std::fmt;
use std::ops::Range;

use crate::normalize::CanonicalSequence;
use crate::script::{ClassKind, ScriptTables};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternKind {
    Sc,
    CcBegin,
    CcCenter,
    CcEnd,
    Foreign,
}

impl PatternKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PatternKind::Sc => "SC",
            PatternKind::CcBegin => "CC_Begin",
            PatternKind::CcCenter => "CC_Center",
            PatternKind::CcEnd => "CC_End",
            PatternKind::Foreign => "Foreign",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlotName {
    V,
    /// Consonant of an SC cluster.
    ScC,
    C,
    X1,
    X2,
    X3,
    X4,
    Y5,
    Y6,
    Y7,
    Y8,
    Y9,
    Z10,
    Z11,
    Z12,
    Foreign,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SlotBinding {
    pub slot: SlotName,
    /// Offsets into the canonical sequence.
    pub span: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentCluster {
    pub codepoints: Vec<char>,
    pub pattern: PatternKind,
    pub slot_bindings: Vec<SlotBinding>,
    pub source_span: Range<usize>,
}

impl ComponentCluster {
    pub fn text(&self) -> String {
        self.codepoints.iter().collect()
    }

    pub fn len(&self) -> usize {
        self.codepoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codepoints.is_empty()
    }

    pub fn binding(&self, slot: SlotName) -> Option<&[char]> {
        let start = self.source_span.start;
        self.slot_bindings
            .iter()
            .find(|b| b.slot == slot)
            .map(|b| &self.codepoints[b.span.start - start..b.span.end - start])
    }

    /// Checks that the bindings tile the cluster and that every bound
    /// slot holds scalars of the right class.
    pub fn conforms(&self, tables: &ScriptTables) -> bool {
        let mut at = self.source_span.start;
        for b in &self.slot_bindings {
            if b.span.start != at || b.span.end <= b.span.start {
                return false;
            }
            at = b.span.end;
            let cps = &self.codepoints
                [b.span.start - self.source_span.start..b.span.end - self.source_span.start];
            if !slot_accepts(b.slot, cps, tables) {
                return false;
            }
        }
        at == self.source_span.end && self.source_span.len() == self.codepoints.len()
    }
}

impl fmt::Display for ComponentCluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.codepoints {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn slot_accepts(slot: SlotName, cps: &[char], t: &ScriptTables) -> bool {
    let kind = |c: char| t.kind(c);
    let single = |pred: &dyn Fn(ClassKind) -> bool| cps.len() == 1 && pred(kind(cps[0]));
    let pair = || cps.len() == 2 && kind(cps[0]) == ClassKind::Coeng && t.is_consonant(cps[1]);
    let vowel = || {
        !cps.is_empty()
            && kind(cps[0]) == ClassKind::DependentVowel
            && cps[1..].iter().all(|c| t.is_vowel_modifier(*c))
    };
    match slot {
        SlotName::V => single(&|k| k == ClassKind::IndependentVowel),
        SlotName::ScC => single(&ClassKind::is_consonant) || pair(),
        SlotName::C | SlotName::Y5 | SlotName::Z10 | SlotName::Z11 => {
            single(&ClassKind::is_consonant)
        }
        SlotName::X1 => single(&|k| k == ClassKind::BeginSign),
        SlotName::X2 | SlotName::X3 | SlotName::Y7 | SlotName::Y8 => pair(),
        SlotName::X4 | SlotName::Y9 => vowel(),
        SlotName::Y6 => single(&|k| k == ClassKind::ReplacementSign),
        SlotName::Z12 => single(&|k| k == ClassKind::EndSign),
        SlotName::Foreign => cps.len() == 1,
    }
}

// Input symbol classes seen by the DFAs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sym {
    Cons,
    Coeng,
    Shift,
    Repl,
    Vowel,
    Modifier,
    End,
    Indep,
    Other,
}

fn sym(c: char, t: &ScriptTables) -> Sym {
    match t.kind(c) {
        ClassKind::ConsonantA | ClassKind::ConsonantO => Sym::Cons,
        ClassKind::Coeng => Sym::Coeng,
        ClassKind::BeginSign => Sym::Shift,
        ClassKind::ReplacementSign => Sym::Repl,
        ClassKind::DependentVowel if t.is_vowel_modifier(c) => Sym::Modifier,
        ClassKind::DependentVowel => Sym::Vowel,
        ClassKind::EndSign => Sym::End,
        ClassKind::IndependentVowel => Sym::Indep,
        _ => Sym::Other,
    }
}

fn is_mark(s: Sym) -> bool {
    matches!(
        s,
        Sym::Coeng | Sym::Shift | Sym::Repl | Sym::Vowel | Sym::Modifier | Sym::End
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum St {
    Start,
    // SC
    ScV,
    ScCons,
    ScCoeng,
    ScPair,
    // CC begin
    BBase,
    BCoeng1,
    BPair1,
    BCoeng2,
    BPair2,
    BShift,
    BVowel,
    // CC center
    CBase,
    CRepl,
    CCoeng1,
    CPair1,
    CCoeng2,
    CPair2,
    CVowel,
    // CC end
    EBase,
    ECons2,
    ESign,
}

fn step(pattern: PatternKind, st: St, s: Sym) -> Option<(St, SlotName)> {
    use PatternKind::*;
    use SlotName::*;
    use St::*;
    use Sym::*;
    match (pattern, st, s) {
        (Sc, Start, Indep) => Some((ScV, V)),
        (Sc, ScV, Cons) => Some((ScCons, ScC)),
        (Sc, ScV, Sym::Coeng) => Some((ScCoeng, ScC)),
        (Sc, ScCoeng, Cons) => Some((ScPair, ScC)),

        (CcBegin, Start, Cons) => Some((BBase, C)),
        (CcBegin, BBase, Sym::Coeng) => Some((BCoeng1, X2)),
        (CcBegin, BCoeng1, Cons) => Some((BPair1, X2)),
        (CcBegin, BPair1, Sym::Coeng) => Some((BCoeng2, X3)),
        (CcBegin, BCoeng2, Cons) => Some((BPair2, X3)),
        (CcBegin, BBase | BPair1 | BPair2, Shift) => Some((BShift, X1)),
        (CcBegin, BBase | BPair1 | BPair2 | BShift, Vowel | Modifier) => Some((BVowel, X4)),
        (CcBegin, BVowel, Modifier) => Some((BVowel, X4)),

        (CcCenter, Start, Cons) => Some((CBase, Y5)),
        (CcCenter, CBase, Repl) => Some((CRepl, Y6)),
        (CcCenter, Start | CBase | CRepl, Sym::Coeng) => Some((CCoeng1, Y7)),
        (CcCenter, CCoeng1, Cons) => Some((CPair1, Y7)),
        (CcCenter, CPair1, Sym::Coeng) => Some((CCoeng2, Y8)),
        (CcCenter, CCoeng2, Cons) => Some((CPair2, Y8)),
        (CcCenter, CBase | CRepl | CPair1 | CPair2, Vowel | Modifier) => Some((CVowel, Y9)),
        (CcCenter, CVowel, Modifier) => Some((CVowel, Y9)),

        (CcEnd, Start, Cons) => Some((EBase, Z10)),
        (CcEnd, EBase, Cons) => Some((ECons2, Z11)),
        (CcEnd, EBase | ECons2, End) => Some((ESign, Z12)),
        _ => None,
    }
}

// Accepting states; `next` is the symbol after the current position.
fn accepts(st: St, next: Option<Sym>) -> bool {
    use St::*;
    match st {
        ScCons => !next.is_some_and(is_mark),
        ScV | ScPair => true,
        BBase | BPair1 | BPair2 | BShift | BVowel => true,
        CBase | CRepl | CPair1 | CPair2 | CVowel => true,
        EBase | ESign => true,
        _ => false,
    }
}

fn run(pattern: PatternKind, syms: &[Sym], pos: usize) -> Option<Vec<SlotBinding>> {
    let mut st = St::Start;
    let mut slots: Vec<SlotName> = Vec::new();
    let mut best = 0;
    let mut i = pos;
    while i < syms.len() {
        match step(pattern, st, syms[i]) {
            Some((next, slot)) => {
                st = next;
                slots.push(slot);
                i += 1;
                if accepts(st, syms.get(i).copied()) {
                    best = slots.len();
                }
            }
            None => break,
        }
    }
    if best == 0 {
        return None;
    }
    slots.truncate(best);
    let mut bindings: Vec<SlotBinding> = Vec::new();
    for (k, slot) in slots.into_iter().enumerate() {
        let at = pos + k;
        match bindings.last_mut() {
            Some(b) if b.slot == slot => b.span.end = at + 1,
            _ => bindings.push(SlotBinding {
                slot,
                span: at..at + 1,
            }),
        }
    }
    Some(bindings)
}

fn symbols(seq: &CanonicalSequence, tables: &ScriptTables) -> Vec<Sym> {
    seq.codepoints().iter().map(|c| sym(*c, tables)).collect()
}

fn build(
    seq: &[char],
    pattern: PatternKind,
    slot_bindings: Vec<SlotBinding>,
) -> (ComponentCluster, usize) {
    let start = slot_bindings[0].span.start;
    let end = slot_bindings.last().unwrap().span.end;
    (
        ComponentCluster {
            codepoints: seq[start..end].to_vec(),
            pattern,
            slot_bindings,
            source_span: start..end,
        },
        end,
    )
}

pub fn match_sc(
    seq: &CanonicalSequence,
    pos: usize,
    tables: &ScriptTables,
) -> Option<(ComponentCluster, usize)> {
    let syms = symbols(seq, tables);
    match_sc_syms(seq.codepoints(), &syms, pos)
}

pub fn match_cc(
    seq: &CanonicalSequence,
    pos: usize,
    tables: &ScriptTables,
) -> Option<(ComponentCluster, usize)> {
    let syms = symbols(seq, tables);
    match_cc_syms(seq.codepoints(), &syms, pos)
}

fn match_sc_syms(cps: &[char], syms: &[Sym], pos: usize) -> Option<(ComponentCluster, usize)> {
    run(PatternKind::Sc, syms, pos).map(|b| build(cps, PatternKind::Sc, b))
}

fn match_cc_syms(cps: &[char], syms: &[Sym], pos: usize) -> Option<(ComponentCluster, usize)> {
    let mut best: Option<(PatternKind, Vec<SlotBinding>, usize)> = None;
    for pattern in [
        PatternKind::CcBegin,
        PatternKind::CcCenter,
        PatternKind::CcEnd,
    ] {
        if let Some(b) = run(pattern, syms, pos) {
            let end = b.last().unwrap().span.end;
            if best.as_ref().is_none_or(|(_, _, e)| end > *e) {
                best = Some((pattern, b, end));
            }
        }
    }
    best.map(|(p, b, _)| build(cps, p, b))
}

pub fn split_clusters(seq: &CanonicalSequence, tables: &ScriptTables) -> Vec<ComponentCluster> {
    let cps = seq.codepoints();
    let syms = symbols(seq, tables);
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < cps.len() {
        let (cluster, next) = match_sc_syms(cps, &syms, pos)
            .or_else(|| match_cc_syms(cps, &syms, pos))
            .unwrap_or_else(|| {
                build(
                    cps,
                    PatternKind::Foreign,
                    vec![SlotBinding {
                        slot: SlotName::Foreign,
                        span: pos..pos + 1,
                    }],
                )
            });
        out.push(cluster);
        pos = next;
    }
    out
}

pub fn clusters_to_text(clusters: &[ComponentCluster]) -> CanonicalSequence {
    CanonicalSequence::from_trusted(
        clusters
            .iter()
            .flat_map(|c| c.codepoints.iter().copied())
            .collect(),
    )
}

/// `[a]+[b]+...`
pub fn render_clusters(clusters: &[ComponentCluster]) -> String {
    clusters
        .iter()
        .map(|c| format!("[{c}]"))
        .collect::<Vec<_>>()
        .join("+")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::normalize_str;

    fn t() -> ScriptTables {
        ScriptTables::default_tables()
    }

    fn split(s: &str) -> Vec<ComponentCluster> {
        let tables = t();
        split_clusters(&normalize_str(s, &tables).unwrap(), &tables)
    }

    fn texts(s: &str) -> Vec<String> {
        split(s).iter().map(|c| c.text()).collect()
    }

    #[test]
    fn sc_vowel_and_consonant() {
        let tables = t();
        let seq = normalize_str("ឥត", &tables).unwrap();
        let (c, next) = match_sc(&seq, 0, &tables).unwrap();
        assert_eq!(c.text(), "ឥត");
        assert_eq!(next, 2);
        assert_eq!(c.binding(SlotName::V), Some(&['ឥ'][..]));
        assert_eq!(c.binding(SlotName::ScC), Some(&['ត'][..]));

        let seq = normalize_str("ឫ", &tables).unwrap();
        let (c, next) = match_sc(&seq, 0, &tables).unwrap();
        assert_eq!((c.text().as_str(), next), ("ឫ", 1));

        let seq = normalize_str("ក", &tables).unwrap();
        assert!(match_sc(&seq, 0, &tables).is_none());
    }

    #[test]
    fn sc_leaves_consonant_with_marks() {
        assert_eq!(texts("ឥឡូវ"), ["ឥ", "ឡូ", "វ"]);
        assert_eq!(texts("ឱ្យ"), ["ឱ្យ"]);
    }

    #[test]
    fn cc_examples() {
        let tables = t();
        let seq = normalize_str("ក", &tables).unwrap();
        let (c, _) = match_cc(&seq, 0, &tables).unwrap();
        assert_eq!(c.slot_bindings.len(), 1);
        assert_eq!(c.binding(SlotName::C), Some(&['ក'][..]));

        let seq = normalize_str("កា", &tables).unwrap();
        let (c, _) = match_cc(&seq, 0, &tables).unwrap();
        assert_eq!(c.binding(SlotName::C), Some(&['ក'][..]));
        assert_eq!(c.binding(SlotName::X4), Some(&['ា'][..]));

        let seq = normalize_str("ក្រា", &tables).unwrap();
        let (c, _) = match_cc(&seq, 0, &tables).unwrap();
        assert_eq!(c.pattern, PatternKind::CcBegin);
        assert_eq!(c.binding(SlotName::X2), Some(&['្', 'រ'][..]));
        assert_eq!(c.binding(SlotName::X4), Some(&['ា'][..]));
    }

    #[test]
    fn end_and_center_patterns() {
        let c = split("ង់");
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].pattern, PatternKind::CcEnd);
        let c = split("ធម៌");
        assert_eq!(c.iter().map(|c| c.text()).collect::<Vec<_>>(), ["ធ", "ម៌"]);
        assert_eq!(c[1].pattern, PatternKind::CcCenter);
        // silent final carried by Z11/Z12
        assert_eq!(texts("ការណ៍"), ["កា", "រណ៍"]);
    }

    #[test]
    fn information_technology_entry() {
        let clusters = split("វិទ្យាសាស្ត្រកុំព្យូទ័រ");
        let got: Vec<String> = clusters.iter().map(|c| c.text()).collect();
        assert_eq!(got, ["វិ", "ទ្យា", "សា", "ស្ដ្រ", "កុំ", "ព្យូ", "ទ័", "រ"]);
        assert!(clusters.iter().all(|c| c.conforms(&t())));
    }

    #[test]
    fn foreign_singletons_and_round_trip() {
        let tables = t();
        let seq = normalize_str("ab ១២", &tables).unwrap();
        let clusters = split_clusters(&seq, &tables);
        assert_eq!(clusters.len(), 5);
        assert!(clusters.iter().all(|c| c.pattern == PatternKind::Foreign));
        assert_eq!(clusters_to_text(&clusters), seq);
        assert!(split_clusters(&CanonicalSequence::default(), &tables).is_empty());
        assert!(clusters_to_text(&[]).is_empty());
    }

    #[test]
    fn rendering() {
        assert_eq!(render_clusters(&split("បង្រៀន")), "[ប]+[ង្រៀ]+[ន]");
    }
}
