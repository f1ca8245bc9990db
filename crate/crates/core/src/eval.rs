//! Scoring segmentations against gold annotations.
//!
//! Segmented files hold one entry per line: units joined by a separator,
//! optionally followed by a tab and the entry type. A predicted line is
//! correct when its units equal the gold units exactly; a type's accuracy
//! is the share of gold syllables on correct lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::pipeline::EntryType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("gold has {gold} lines but prediction has {predicted}")]
    LineCount { gold: usize, predicted: usize },
    #[error("line {line}: gold and prediction segment different text")]
    TextMismatch { line: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One report row: Type, Quantity, Syllable, one column per scorer,
/// Average.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub name: String,
    pub quantity: u64,
    pub syllables: u64,
    pub scores: Vec<f64>,
    pub average: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub scorers: Vec<String>,
    pub rows: Vec<EvalRow>,
    pub total: EvalRow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedLine {
    pub units: Vec<String>,
    pub entry_type: EntryType,
}

/// Parses a segmented file; blank lines and `#` comments are skipped.
pub fn parse_segmented(text: &str, separator: &str) -> Vec<SegmentedLine> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|line| {
            let (body, ty) = match line.split_once('\t') {
                Some((b, t)) => (b, t.split('\t').next().unwrap_or_default()),
                None => (line, ""),
            };
            SegmentedLine {
                units: body
                    .split(separator)
                    .filter(|u| !u.is_empty())
                    .map(str::to_string)
                    .collect(),
                entry_type: ty.parse().unwrap_or_default(),
            }
        })
        .collect()
}

/// Scores one prediction; see [`evaluate_many`].
pub fn evaluate(gold: &str, predicted: &str, separator: &str) -> Result<EvalReport, EvalError> {
    evaluate_many(gold, &[("Accuracy", predicted)], separator)
}

/// Scores several predictions of the same gold file, one column each.
pub fn evaluate_many(
    gold: &str,
    predictions: &[(&str, &str)],
    separator: &str,
) -> Result<EvalReport, EvalError> {
    let gold = parse_segmented(gold, separator);
    #[derive(Default, Clone)]
    struct Acc {
        quantity: u64,
        syllables: u64,
        correct: Vec<u64>,
    }
    let mut per_type: BTreeMap<EntryType, Acc> = BTreeMap::new();
    for g in &gold {
        let acc = per_type.entry(g.entry_type).or_default();
        acc.quantity += 1;
        acc.syllables += g.units.len() as u64;
        acc.correct = vec![0; predictions.len()];
    }
    for (col, (_, predicted)) in predictions.iter().enumerate() {
        let predicted = parse_segmented(predicted, separator);
        if predicted.len() != gold.len() {
            return Err(EvalError::LineCount {
                gold: gold.len(),
                predicted: predicted.len(),
            });
        }
        for (i, (g, p)) in gold.iter().zip(&predicted).enumerate() {
            if g.units.concat() != p.units.concat() {
                return Err(EvalError::TextMismatch { line: i + 1 });
            }
            if g.units == p.units {
                per_type.get_mut(&g.entry_type).expect("type seen").correct[col] +=
                    g.units.len() as u64;
            }
        }
    }
    let pct = |num: u64, den: u64| {
        if den == 0 {
            100.0
        } else {
            num as f64 * 100.0 / den as f64
        }
    };
    let rows: Vec<EvalRow> = per_type
        .iter()
        .map(|(t, acc)| {
            let scores: Vec<f64> = acc.correct.iter().map(|&c| pct(c, acc.syllables)).collect();
            EvalRow {
                name: t.as_str().to_string(),
                quantity: acc.quantity,
                syllables: acc.syllables,
                average: mean(&scores),
                scores,
            }
        })
        .collect();
    let quantity = rows.iter().map(|r| r.quantity).sum();
    let syllables: u64 = rows.iter().map(|r| r.syllables).sum();
    let weighted = |f: &dyn Fn(&EvalRow) -> f64| {
        if syllables == 0 {
            100.0
        } else {
            rows.iter().map(|r| f(r) * r.syllables as f64).sum::<f64>() / syllables as f64
        }
    };
    let scores: Vec<f64> = (0..predictions.len())
        .map(|c| weighted(&|r: &EvalRow| r.scores[c]))
        .collect();
    let total = EvalRow {
        name: "Total".into(),
        quantity,
        syllables,
        average: weighted(&|r: &EvalRow| r.average),
        scores,
    };
    Ok(EvalReport {
        scorers: predictions.iter().map(|(n, _)| n.to_string()).collect(),
        rows,
        total,
    })
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// `95`, `92.5`: one decimal, trailing `.0` dropped, with a `%` sign.
pub fn format_percent(x: f64) -> String {
    let s = format!("{x:.1}");
    format!("{}%", s.strip_suffix(".0").unwrap_or(&s))
}

fn parse_percent(s: &str, line: usize) -> Result<f64, EvalError> {
    let v: f64 = s
        .trim()
        .trim_end_matches('%')
        .parse()
        .map_err(|_| EvalError::Parse {
            line,
            message: format!("bad percentage {s:?}"),
        })?;
    if !(0.0..=100.0).contains(&v) {
        return Err(EvalError::Parse {
            line,
            message: format!("percentage {s:?} out of range"),
        });
    }
    Ok(v)
}

impl EvalReport {
    pub fn row(&self, name: &str) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Syllable-weighted mean of the row averages.
    pub fn weighted_average(&self) -> f64 {
        let syl: u64 = self.rows.iter().map(|r| r.syllables).sum();
        if syl == 0 {
            return 100.0;
        }
        self.rows
            .iter()
            .map(|r| r.average * r.syllables as f64)
            .sum::<f64>()
            / syl as f64
    }

    pub fn render(&self) -> String {
        let mut out = String::from("Type\tQuantity\tSyllable");
        for s in &self.scorers {
            out.push('\t');
            out.push_str(s);
        }
        out.push_str("\tAverage\n");
        for r in self.rows.iter().chain(std::iter::once(&self.total)) {
            write!(out, "{}\t{}\t{}", r.name, r.quantity, r.syllables).unwrap();
            for s in &r.scores {
                write!(out, "\t{}", format_percent(*s)).unwrap();
            }
            writeln!(out, "\t{}", format_percent(r.average)).unwrap();
        }
        out
    }

    /// Reads a rendered report. The `Total` row is kept as written.
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(EvalError::Parse {
            line: 1,
            message: "empty report".into(),
        })?;
        let cols: Vec<&str> = header.split('\t').collect();
        if cols.len() < 4
            || cols[..3] != ["Type", "Quantity", "Syllable"]
            || cols.last() != Some(&"Average")
        {
            return Err(EvalError::Parse {
                line: 1,
                message: "expected Type, Quantity, Syllable, scorers..., Average".into(),
            });
        }
        let scorers: Vec<String> = cols[3..cols.len() - 1]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut rows = Vec::new();
        for (i, line) in lines {
            let line_no = i + 1;
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != cols.len() {
                return Err(EvalError::Parse {
                    line: line_no,
                    message: format!("expected {} columns, found {}", cols.len(), f.len()),
                });
            }
            let int = |s: &str| {
                s.trim().parse::<u64>().map_err(|_| EvalError::Parse {
                    line: line_no,
                    message: format!("bad count {s:?}"),
                })
            };
            rows.push(EvalRow {
                name: f[0].to_string(),
                quantity: int(f[1])?,
                syllables: int(f[2])?,
                scores: f[3..f.len() - 1]
                    .iter()
                    .map(|s| parse_percent(s, line_no))
                    .collect::<Result<_, _>>()?,
                average: parse_percent(f[f.len() - 1], line_no)?,
            });
        }
        let total = match rows.last() {
            Some(r) if r.name == "Total" => rows.pop().expect("checked"),
            _ => {
                return Err(EvalError::Parse {
                    line: text.lines().count(),
                    message: "missing Total row".into(),
                })
            }
        };
        Ok(EvalReport {
            scorers,
            rows,
            total,
        })
    }
}
