//! Splitting canonical text into component clusters.

use khmseg::grammar::split_clusters;
use khmseg::normalize::normalize_str;
use khmseg::script::ScriptTables;

fn main() {
    let tables = ScriptTables::default_tables();
    for word in ["វិទ្យាសាស្ត្រកុំព្យូទ័រ", "ឱ្យ", "ឥត", "ភាគរយ 2024"]
    {
        let seq = normalize_str(word, &tables).expect("well-formed input");
        println!("{word}");
        for c in split_clusters(&seq, &tables) {
            let slots: Vec<String> = c
                .slot_bindings
                .iter()
                .map(|b| {
                    let bound: String = c.binding(b.slot).unwrap_or_default().iter().collect();
                    format!("{:?}={bound}", b.slot)
                })
                .collect();
            println!("    [{c}] {:<10} {}", c.pattern.as_str(), slots.join(" "));
        }
    }
}
