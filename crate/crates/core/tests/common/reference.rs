//! Recursive-descent reference splitter, written from the slot grammar
//! alone. Shares nothing with the library's matcher beyond the tables.

use khmseg::script::{ClassKind, ScriptTables};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Sc,
    Begin,
    Center,
    End,
    Foreign,
}

#[derive(Clone, Copy)]
enum Item {
    Cons,
    BareConsOrPair,
    Pair,
    BeginSign,
    Vowel,
    Repl,
    EndSign,
    Indep,
    ConsBeforeEndSign,
}

struct Slot {
    item: Item,
    optional: bool,
}

const fn req(item: Item) -> Slot {
    Slot {
        item,
        optional: false,
    }
}
const fn opt(item: Item) -> Slot {
    Slot {
        item,
        optional: true,
    }
}

const SC: &[Slot] = &[req(Item::Indep), opt(Item::BareConsOrPair)];
const BEGIN: &[Slot] = &[
    req(Item::Cons),
    opt(Item::Pair),
    opt(Item::Pair),
    opt(Item::BeginSign),
    opt(Item::Vowel),
];
const CENTER_Y5: &[Slot] = &[
    req(Item::Cons),
    opt(Item::Repl),
    opt(Item::Pair),
    opt(Item::Pair),
    opt(Item::Vowel),
];
const CENTER_Y7: &[Slot] = &[req(Item::Pair), opt(Item::Pair), opt(Item::Vowel)];
const END: &[Slot] = &[
    req(Item::Cons),
    opt(Item::ConsBeforeEndSign),
    opt(Item::EndSign),
];

fn is_mark(k: ClassKind) -> bool {
    matches!(
        k,
        ClassKind::Coeng
            | ClassKind::DependentVowel
            | ClassKind::BeginSign
            | ClassKind::EndSign
            | ClassKind::ReplacementSign
    )
}

/// Length of `item` at `pos`, if it matches there.
fn item_len(item: Item, s: &[char], pos: usize, t: &ScriptTables) -> Option<usize> {
    let kind = |i: usize| s.get(i).map(|c| t.kind(*c));
    let cons = |i: usize| kind(i).is_some_and(|k| k.is_consonant());
    let pair = || (kind(pos) == Some(ClassKind::Coeng) && cons(pos + 1)).then_some(2);
    match item {
        Item::Cons => cons(pos).then_some(1),
        Item::Pair => pair(),
        Item::BareConsOrPair => {
            if cons(pos) && !kind(pos + 1).is_some_and(is_mark) {
                Some(1)
            } else {
                pair()
            }
        }
        Item::BeginSign => (kind(pos) == Some(ClassKind::BeginSign)).then_some(1),
        Item::Repl => (kind(pos) == Some(ClassKind::ReplacementSign)).then_some(1),
        Item::EndSign => (kind(pos) == Some(ClassKind::EndSign)).then_some(1),
        Item::Indep => (kind(pos) == Some(ClassKind::IndependentVowel)).then_some(1),
        Item::ConsBeforeEndSign => {
            (cons(pos) && kind(pos + 1) == Some(ClassKind::EndSign)).then_some(1)
        }
        Item::Vowel => {
            if kind(pos) != Some(ClassKind::DependentVowel) {
                return None;
            }
            let mut n = 1;
            while s.get(pos + n).is_some_and(|c| t.is_vowel_modifier(*c)) {
                n += 1;
            }
            Some(n)
        }
    }
}

/// Greedy slot-by-slot descent: each optional slot is taken iff its item
/// matches at the current position.
fn descend(slots: &[Slot], s: &[char], pos: usize, t: &ScriptTables) -> Option<usize> {
    match slots.split_first() {
        None => Some(pos),
        Some((slot, rest)) => match item_len(slot.item, s, pos, t) {
            Some(n) => descend(rest, s, pos + n, t),
            None if slot.optional => descend(rest, s, pos, t),
            None => None,
        },
    }
}

pub fn split(s: &[char], t: &ScriptTables) -> Vec<(Kind, String)> {
    if s.is_empty() {
        return vec![];
    }
    let (kind, end) = if let Some(end) = descend(SC, s, 0, t) {
        (Kind::Sc, end)
    } else {
        let center = descend(CENTER_Y5, s, 0, t).or_else(|| descend(CENTER_Y7, s, 0, t));
        let candidates = [
            (Kind::Begin, descend(BEGIN, s, 0, t)),
            (Kind::Center, center),
            (Kind::End, descend(END, s, 0, t)),
        ];
        let mut best: Option<(Kind, usize)> = None;
        for (k, e) in candidates {
            if let Some(e) = e {
                if best.is_none_or(|(_, b)| e > b) {
                    best = Some((k, e));
                }
            }
        }
        best.unwrap_or((Kind::Foreign, 1))
    };
    let mut out = vec![(kind, s[..end].iter().collect())];
    out.extend(split(&s[end..], t));
    out
}
