//! Keystroke-order input to canonical form.

use khmseg::normalize::{normalize_with, NormalizeOptions, RawSequence};
use khmseg::script::{fmt_scalar, ScriptTables};

fn main() {
    let tables = ScriptTables::default_tables();
    let inputs = [
        // vowel typed before the subscript
        "ក\u{17B6}\u{17D2}\u{179A}",
        // two-part vowel typed as separate signs
        "ក\u{17C1}\u{17B6}",
        // subscript ta after a non-ta base
        "ស\u{17D2}\u{178F}\u{17D2}\u{179A}",
        // trailing coeng, only accepted in lenient mode
        "ក\u{17D2}",
    ];
    for raw in inputs {
        let codes: Vec<String> = raw.chars().map(fmt_scalar).collect();
        match normalize_with(
            &RawSequence::from(raw),
            &tables,
            NormalizeOptions { lenient: true },
        ) {
            Ok(n) => {
                println!("{} -> {}", codes.join(" "), n.sequence);
                for d in &n.diagnostics {
                    println!("    {} at {}: {}", d.code.as_str(), d.position, d.message);
                }
            }
            Err(e) => println!("{}: {e}", codes.join(" ")),
        }
    }
}
