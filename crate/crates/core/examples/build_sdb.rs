//! Building the syllable database from the bundled mini lexicon.

use khmseg::label::{LabelDatabase, LabelDatabases};
use khmseg::pipeline::{build_cluster_inventory, build_sdb, parse_lexicon, seed_fallback_db};
use khmseg::script::ScriptTables;

fn main() {
    let tables = ScriptTables::default_tables();
    let entries = parse_lexicon(include_str!("../data/mini/lexicon.tsv")).unwrap();
    let tdb = LabelDatabase::parse(include_str!("../data/mini/tdb.tsv"), &tables).unwrap();

    let inventory = build_cluster_inventory(&entries, &tables);
    println!(
        "{} entries, {} clusters ({} distinct)",
        entries.len(),
        inventory.total(),
        inventory.clusters.len()
    );
    println!(
        "{} adjacent sequences need fallback labels",
        seed_fallback_db(&inventory, &tdb).len()
    );

    let dbs = LabelDatabases::new(tdb, LabelDatabase::new()).unwrap();
    let out = build_sdb(&entries, &tables, &dbs);
    print!("{}", out.report.render());
    println!("most frequent syllables:");
    let mut by_freq: Vec<_> = out.sdb.iter().collect();
    by_freq.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    for (s, n) in by_freq.into_iter().take(5) {
        println!("    {s}\t{n}");
    }
}
