//! Syllable and word segmentation of free text.

use khmseg::label::{LabelDatabase, LabelDatabases};
use khmseg::pipeline::{build_sdb, parse_lexicon};
use khmseg::script::ScriptTables;
use khmseg::segment::{segment_words, Segmenter, WordLexicon};

fn main() {
    let tables = ScriptTables::default_tables();
    let entries = parse_lexicon(include_str!("../data/mini/lexicon.tsv")).unwrap();
    let tdb = LabelDatabase::parse(include_str!("../data/mini/tdb.tsv"), &tables).unwrap();
    let dbs = LabelDatabases::new(tdb, LabelDatabase::new()).unwrap();
    let sdb = build_sdb(&entries, &tables, &dbs).sdb;
    let lexicon = WordLexicon::new(&entries, &tables);
    let seg = Segmenter::new(&tables, &dbs).with_sdb(&sdb);

    for text in ["ខ្ញុំទៅសាលារៀនភាសាខ្មែរ", "ថ្ងៃនេះភ្លៀងធំ"]
    {
        println!("{text}");
        println!("    syllables: {}", seg.segment_syllables(text));
        println!("    words:     {}", segment_words(text, &lexicon, &seg));
    }
}
