//! Scoring a segmentation run against the bundled gold file.

use khmseg::eval::{evaluate, parse_segmented, EvalReport};
use khmseg::label::{LabelDatabase, LabelDatabases};
use khmseg::script::ScriptTables;
use khmseg::segment::Segmenter;

fn main() {
    let tables = ScriptTables::default_tables();
    let tdb = LabelDatabase::parse(include_str!("../data/mini/tdb.tsv"), &tables).unwrap();
    let gold = include_str!("../data/mini/gold.tsv");

    for (name, dbs) in [
        ("without training database", LabelDatabases::default()),
        (
            "with training database",
            LabelDatabases::new(tdb, LabelDatabase::new()).unwrap(),
        ),
    ] {
        let seg = Segmenter::new(&tables, &dbs);
        let predicted: String = parse_segmented(gold, "|")
            .iter()
            .map(|line| {
                let out = seg.segment_syllables(&line.units.concat());
                format!("{}\t{}\n", out, line.entry_type)
            })
            .collect();
        println!("{name}");
        print!("{}", evaluate(gold, &predicted, "|").unwrap().render());
        println!();
    }

    let published = "Type\tQuantity\tSyllable\tExpert 1\tExpert 2\tAverage\n\
        Simple word\t7278\t7278\t95%\t95%\t95%\n\
        Compound word\t17095\t34190\t93%\t92%\t92.5%\n\
        Phrase\t24574\t96779\t90%\t89%\t89.5%\n\
        Total\t48947\t138247\t92.6%\t92%\t92.3%\n";
    let report = EvalReport::parse(published).unwrap();
    println!(
        "two-expert report: total {:.1}%, syllable-weighted {:.1}%",
        report.total.average,
        report.weighted_average()
    );
}
