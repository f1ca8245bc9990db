//! Position labels, the review queue and syllable merging.

use khmseg::grammar::split_clusters;
use khmseg::label::{join_labels, label_clusters, merge_syllables, LabelDatabase, LabelDatabases};
use khmseg::normalize::normalize_str;
use khmseg::script::ScriptTables;

fn main() {
    let tables = ScriptTables::default_tables();
    let tdb = LabelDatabase::parse(include_str!("../data/mini/tdb.tsv"), &tables).unwrap();
    let dbs = LabelDatabases::new(tdb, LabelDatabase::new()).unwrap();

    for word in ["វិទ្យាសាស្ត្រកុំព្យូទ័រ", "ភាសាខ្មែរ", "សៀវភៅ"]
    {
        let clusters = split_clusters(&normalize_str(word, &tables).unwrap(), &tables);
        let labeling = label_clusters(&clusters, &tables, &dbs);
        println!("{word}");
        for lc in &labeling.clusters {
            println!(
                "    {} [{}] {} ({})",
                lc.position, lc.cluster, lc.label, lc.confidence
            );
        }
        let syllables = merge_syllables(&labeling.clusters).unwrap();
        let texts: Vec<String> = syllables.iter().map(|s| s.text()).collect();
        println!("    syllables: {}", texts.join("|"));
        for a in &labeling.ambiguities {
            let alts: Vec<String> = a.candidates.iter().map(|c| join_labels(c)).collect();
            println!(
                "    review: {} -> {}",
                a.clusters.join("+"),
                alts.join(" or ")
            );
        }
    }
}
