//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::reference::{self, Kind};
use khmseg::eval::{evaluate, parse_segmented, EvalReport};
use khmseg::grammar::{clusters_to_text, split_clusters, PatternKind, SlotName};
use khmseg::label::{
    label_clusters, merge_syllables, Confidence, LabelDatabases, LabeledCluster, PositionLabel,
};
use khmseg::normalize::{normalize, normalize_str, normalize_with, NormalizeOptions, RawSequence};
use khmseg::pipeline::{build_sdb, EntryType, LexiconEntry, SyllableDatabase};
use khmseg::script::ScriptTables;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(
        elapsed < limit,
        format!("took {elapsed:?}, limit {limit:?}"),
    )
}

const TABLE_X: &str = "វិទ្យាសាស្ត្រកុំព្យូទ័រ";

fn table_x_merge() -> Outcome {
    use PositionLabel::*;
    let t = ScriptTables::default_tables();
    let clusters = split_clusters(&normalize_str(TABLE_X, &t).unwrap(), &t);
    check(clusters.len() == 8, format!("{} clusters", clusters.len()))?;
    let labels = [LL, RR, LL, RR, LR, LR, LL, RR];
    let labeled: Vec<LabeledCluster> = clusters
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(position, (c, label))| LabeledCluster {
            cluster: c.clone(),
            label,
            confidence: Confidence::Manual,
            position,
        })
        .collect();
    let mut best = Duration::MAX;
    let mut spans = Vec::new();
    for _ in 0..50 {
        let start = Instant::now();
        let syllables = merge_syllables(&labeled).map_err(|e| e.to_string())?;
        best = best.min(start.elapsed());
        spans = syllables.iter().map(|s| s.span.clone()).collect();
    }
    check(
        spans == [0..2, 2..4, 4..5, 5..6, 6..8],
        format!("spans {spans:?}"),
    )?;
    within(best, Duration::from_millis(1))?;
    let derived = label_clusters(&clusters, &t, &LabelDatabases::default()).labels();
    check(derived == labels, format!("labeler gave {derived:?}"))?;
    Ok(format!("5 syllables (0-1)(2-3)(4)(5)(6-7) in {best:?}"))
}

fn sc_patterns() -> Outcome {
    let t = ScriptTables::default_tables();
    // readable Table IV rows: V+C and, with the consonant removed, V alone
    for (text, v, c) in [
        ("ឫស", "ឫ", Some("ស")),
        ("ឥត", "ឥ", Some("ត")),
        ("ឫ", "ឫ", None),
        ("ឥ", "ឥ", None),
    ] {
        let clusters = split_clusters(&normalize_str(text, &t).unwrap(), &t);
        check(
            clusters.len() == 1,
            format!("{text}: {} clusters", clusters.len()),
        )?;
        let cl = &clusters[0];
        check(
            cl.pattern == PatternKind::Sc,
            format!("{text}: {:?}", cl.pattern),
        )?;
        let bound = |s| cl.binding(s).map(|x| x.iter().collect::<String>());
        check(
            bound(SlotName::V).as_deref() == Some(v),
            format!("{text}: V slot"),
        )?;
        check(
            bound(SlotName::ScC).as_deref() == c,
            format!("{text}: C slot"),
        )?;
    }
    let kk = split_clusters(&normalize_str("ក", &t).unwrap(), &t);
    check(kk[0].pattern != PatternKind::Sc, "consonant matched SC")?;
    Ok("ឫស ឥត give V+C, ឫ ឥ give V".into())
}

// A canonical unit as atomic keystroke tokens: the base, coeng pairs in
// order, and single marks.
#[derive(Debug, Clone)]
struct Unit {
    base: char,
    pairs: Vec<[char; 2]>,
    marks: Vec<char>,
    vowel: Option<char>,
}

fn unit_strategy() -> impl Strategy<Value = Unit> {
    let cons = (0x1780u32..=0x17A2)
        .prop_filter("obsolete", |v| *v != 0x179D && *v != 0x179E)
        .prop_map(|v| char::from_u32(v).unwrap());
    let vowel = (0x17B6u32..=0x17C5).prop_map(|v| char::from_u32(v).unwrap());
    (
        cons.clone(),
        prop::collection::vec(cons, 0..=2),
        prop::option::weighted(0.3, prop_oneof![Just('\u{17C9}'), Just('\u{17CA}')]),
        prop::option::weighted(0.1, Just('\u{17CC}')),
        prop::option::weighted(0.8, vowel),
        prop::option::weighted(0.3, prop_oneof![Just('\u{17C6}'), Just('\u{17C7}')]),
        prop::option::weighted(0.2, prop_oneof![Just('\u{17CB}'), Just('\u{17CD}')]),
    )
        .prop_map(|(base, subs, shifter, robat, vowel, modifier, sign)| Unit {
            base,
            pairs: subs.into_iter().map(|s| ['\u{17D2}', s]).collect(),
            marks: [robat, shifter, modifier, sign]
                .into_iter()
                .flatten()
                .collect(),
            vowel,
        })
}

// Every ordering of the unit's tokens after the base with pairs kept in
// their relative order, plus the same with the vowel typed before the base.
fn keystroke_orders(u: &Unit) -> Vec<Vec<char>> {
    let mut tokens: Vec<Vec<char>> = u.pairs.iter().map(|p| p.to_vec()).collect();
    let n_pairs = tokens.len();
    tokens.extend(u.marks.iter().map(|m| vec![*m]));
    tokens.extend(u.vowel.map(|v| vec![v]));
    let mut orders = Vec::new();
    let mut used = vec![false; tokens.len()];
    let mut path = Vec::new();
    permute(&tokens, n_pairs, &mut used, &mut path, &mut orders);
    let mut out = Vec::new();
    for order in orders {
        let mut s = vec![u.base];
        for &i in &order {
            s.extend(&tokens[i]);
        }
        out.push(s);
        if let Some(v) = u.vowel {
            let vi = tokens.len() - 1;
            let mut pre = vec![v, u.base];
            for &i in order.iter().filter(|&&i| i != vi) {
                pre.extend(&tokens[i]);
            }
            out.push(pre);
        }
    }
    out
}

fn permute(
    tokens: &[Vec<char>],
    n_pairs: usize,
    used: &mut [bool],
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if path.len() == tokens.len() {
        out.push(path.clone());
        return;
    }
    for i in 0..tokens.len() {
        // pairs only in order
        if used[i] || (i < n_pairs && i > 0 && !used[i - 1]) {
            continue;
        }
        used[i] = true;
        path.push(i);
        permute(tokens, n_pairs, used, path, out);
        path.pop();
        used[i] = false;
    }
}

fn confluence() -> Outcome {
    let t = ScriptTables::default_tables();
    let start = Instant::now();
    let mut runner = TestRunner::deterministic();
    let strategy = unit_strategy();
    let mut orderings = 0usize;
    for k in 0..1000 {
        let unit = strategy.new_tree(&mut runner).unwrap().current();
        let orders = keystroke_orders(&unit);
        let canonical = normalize(&RawSequence::from(orders[0].clone()), &t)
            .map_err(|e| format!("unit {k}: {e}"))?;
        // the canonical form is itself one fixed point of the unit
        let again = normalize(&RawSequence::from(canonical.codepoints().to_vec()), &t).unwrap();
        check(
            again == canonical,
            format!("unit {k}: canonical form not stable"),
        )?;
        for o in &orders {
            let got =
                normalize(&RawSequence::from(o.clone()), &t).map_err(|e| format!("{o:?}: {e}"))?;
            check(
                got == canonical,
                format!("{:?} -> {} but expected {}", o, got, canonical),
            )?;
        }
        orderings += orders.len();
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "1000 units, {orderings} keystroke orders, 100% confluent in {elapsed:?}"
    ))
}

// ក រ ត ្ ា េ ំ ៉ ់ x
const ALPHABET_10: [char; 10] = [
    '\u{1780}', '\u{179A}', '\u{178F}', '\u{17D2}', '\u{17B6}', '\u{17C1}', '\u{17C6}', '\u{17C9}',
    '\u{17CB}', 'x',
];

fn round_trip_one(s: &[char], t: &ScriptTables) -> Result<(), String> {
    let once = normalize_with(
        &RawSequence::from(s.to_vec()),
        t,
        NormalizeOptions { lenient: true },
    )
    .map_err(|e| e.to_string())?
    .sequence;
    let twice = normalize(&RawSequence::from(once.codepoints().to_vec()), t)
        .map_err(|e| format!("{s:?}: renormalizing failed: {e}"))?;
    check(twice == once, format!("{s:?}: not idempotent"))?;
    let clusters = split_clusters(&once, t);
    check(
        clusters_to_text(&clusters) == once,
        format!("{s:?}: split/join lost text"),
    )?;
    Ok(())
}

fn sdb_identity(strings: &[Vec<char>], t: &ScriptTables) -> Result<usize, String> {
    let entries: Vec<LexiconEntry> = strings
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| LexiconEntry {
            text: s.iter().collect(),
            entry_type: EntryType::Unknown,
            meaning: None,
        })
        .collect();
    let built = build_sdb(&entries, t, &LabelDatabases::default());
    let persisted = built.sdb.persist();
    let loaded = SyllableDatabase::parse(&persisted, t).map_err(|e| e.to_string())?;
    check(loaded == built.sdb, "loaded database differs")?;
    check(
        loaded.persist() == persisted,
        "persisted bytes differ after reload",
    )?;
    Ok(built.sdb.len())
}

fn idempotence_suite() -> Outcome {
    let t = ScriptTables::default_tables();
    let start = Instant::now();
    let strings = common::all_strings(&ALPHABET_10, 4);
    for s in &strings {
        round_trip_one(s, &t)?;
    }
    let n_small = sdb_identity(&strings, &t)?;

    let mut runner = TestRunner::deterministic();
    let fuzz = prop::collection::vec(
        prop_oneof![
            8 => (0x1780u32..=0x17FF).prop_map(|v| char::from_u32(v).unwrap()),
            1 => Just(' '),
            1 => Just('a'),
        ],
        0..12,
    );
    let random: Vec<Vec<char>> = (0..10_000)
        .map(|_| fuzz.new_tree(&mut runner).unwrap().current())
        .collect();
    for s in &random {
        round_trip_one(s, &t)?;
    }
    let n_fuzz = sdb_identity(&random, &t)?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "{} exhaustive + {} fuzz strings, SDBs of {n_small} and {n_fuzz} syllables reload identically, {elapsed:?}",
        strings.len(),
        random.len()
    ))
}

fn kind_of(p: PatternKind) -> Kind {
    match p {
        PatternKind::Sc => Kind::Sc,
        PatternKind::CcBegin => Kind::Begin,
        PatternKind::CcCenter => Kind::Center,
        PatternKind::CcEnd => Kind::End,
        PatternKind::Foreign => Kind::Foreign,
    }
}

fn oracle_equivalence() -> Outcome {
    // ក ្ ា ំ ៉ ់ ឥ ៌
    const ALPHABET_8: [char; 8] = [
        '\u{1780}', '\u{17D2}', '\u{17B6}', '\u{17C6}', '\u{17C9}', '\u{17CB}', '\u{17A5}',
        '\u{17CC}',
    ];
    let t = ScriptTables::default_tables();
    let start = Instant::now();
    let strings = common::all_strings(&ALPHABET_8, 5);
    let mut disagreements = 0;
    let mut first = None;
    for s in &strings {
        let seq = normalize_with(
            &RawSequence::from(s.clone()),
            &t,
            NormalizeOptions { lenient: true },
        )
        .unwrap()
        .sequence;
        let got: Vec<(Kind, String)> = split_clusters(&seq, &t)
            .iter()
            .map(|c| (kind_of(c.pattern), c.text()))
            .collect();
        if got != reference::split(seq.codepoints(), &t) {
            disagreements += 1;
            first.get_or_insert_with(|| seq.to_string());
        }
    }
    let elapsed = start.elapsed();
    check(
        disagreements == 0,
        format!("{disagreements} disagreements, first on {first:?}"),
    )?;
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "{} strings, 0 disagreements, {elapsed:?}",
        strings.len()
    ))
}

fn mini() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini")
}

fn khmseg(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_khmseg"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    check(
        out.status.success(),
        format!(
            "khmseg {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        ),
    )
}

fn build_run(dir: &Path, threads: &str) -> Result<[Vec<u8>; 3], String> {
    let d = mini();
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    khmseg(&[
        "build-sdb",
        "--lexicon",
        &d.join("lexicon.tsv").to_string_lossy(),
        "--tdb",
        &d.join("tdb.tsv").to_string_lossy(),
        "--fallback",
        &d.join("fallback.tsv").to_string_lossy(),
        "--out",
        &p("sdb.tsv"),
        "--labeled",
        &p("labeled.tsv"),
        "--report",
        &p("report.tsv"),
        "--threads",
        threads,
    ])?;
    let read = |n: &str| std::fs::read(dir.join(n)).map_err(|e| e.to_string());
    Ok([read("sdb.tsv")?, read("labeled.tsv")?, read("report.tsv")?])
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let c = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = build_run(a.path(), "1")?;
    let second = build_run(b.path(), "1")?;
    let parallel = build_run(c.path(), "4")?;
    for (i, name) in ["SDB", "labeled clusters", "report"].iter().enumerate() {
        check(
            first[i] == second[i],
            format!("{name} differs between runs"),
        )?;
        check(
            first[i] == parallel[i],
            format!("{name} differs with 4 threads"),
        )?;
        check(!first[i].is_empty(), format!("{name} is empty"))?;
    }
    Ok(format!(
        "SDB ({} B), labeled clusters ({} B), report ({} B) byte-identical across runs and threads",
        first[0].len(),
        first[1].len(),
        first[2].len()
    ))
}

fn end_to_end() -> Outcome {
    let d = mini();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    build_run(dir.path(), "1")?;
    let gold = std::fs::read_to_string(d.join("gold.tsv")).map_err(|e| e.to_string())?;
    let raw: String = parse_segmented(&gold, "|")
        .iter()
        .map(|l| format!("{}\t{}\n", l.units.concat(), l.entry_type))
        .collect();
    std::fs::write(p("raw.tsv"), raw).map_err(|e| e.to_string())?;
    khmseg(&[
        "segment",
        "--tdb",
        &d.join("tdb.tsv").to_string_lossy(),
        "--fallback",
        &d.join("fallback.tsv").to_string_lossy(),
        "--sdb",
        &p("sdb.tsv"),
        "--in",
        &p("raw.tsv"),
        "--out",
        &p("pred.tsv"),
    ])?;
    khmseg(&[
        "eval",
        "--gold",
        &d.join("gold.tsv").to_string_lossy(),
        "--in",
        &p("pred.tsv"),
        "--out",
        &p("report.txt"),
    ])?;
    let text = std::fs::read_to_string(p("report.txt")).map_err(|e| e.to_string())?;
    let report = EvalReport::parse(&text).map_err(|e| e.to_string())?;
    let header: Vec<&str> = text
        .lines()
        .next()
        .unwrap_or_default()
        .split('\t')
        .collect();
    check(
        header.len() >= 5
            && header[..3] == ["Type", "Quantity", "Syllable"]
            && header.last() == Some(&"Average"),
        format!("header {header:?}"),
    )?;
    let names: Vec<&str> = report.rows.iter().map(|r| r.name.as_str()).collect();
    check(
        names == ["Simple word", "Compound word", "Phrase"],
        format!("rows {names:?}"),
    )?;
    check(
        report.total.quantity == 50,
        format!("{} entries", report.total.quantity),
    )?;
    let simple = report.row("Simple word").unwrap().average;
    check(simple == 100.0, format!("Simple word {simple}%"))?;
    let total = report.total.average;
    check(total >= 90.0, format!("overall {total}%"))?;
    Ok(format!(
        "Simple word {}%, overall {}% over {} syllables",
        simple, total, report.total.syllables
    ))
}

fn eval_arithmetic() -> Outcome {
    let gold = std::fs::read_to_string(mini().join("gold.tsv")).map_err(|e| e.to_string())?;
    let same = evaluate(&gold, &gold, "|").map_err(|e| e.to_string())?;
    check(
        same.rows.iter().all(|r| r.average == 100.0) && same.total.average == 100.0,
        "evaluate(x, x) below 100%",
    )?;
    let half = evaluate("ក|ខ\nគ|ឃ\n", "ក|ខ\nគឃ\n", "|").map_err(|e| e.to_string())?;
    check(
        half.total.scores[0] == 50.0,
        format!("{}%", half.total.scores[0]),
    )?;
    Ok("evaluate(x,x) = 100%, one wrong of two equal lines = 50%".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("Table X merge", table_x_merge),
        ("SC conformance", sc_patterns),
        ("normalization confluence", confluence),
        ("idempotence and round-trip", idempotence_suite),
        ("oracle equivalence", oracle_equivalence),
        ("pipeline determinism", determinism),
        ("mini-corpus end-to-end", end_to_end),
        ("evaluate correctness", eval_arithmetic),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
