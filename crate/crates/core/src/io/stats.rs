//! Plain-text and delimited statistics tables over result documents.

use super::document::ResultDocument;

const COLUMNS: [&str; 11] = [
    "type", "rep", "t_s(ms)", "t_ss(ms)", "t_ps(ms)", "|Xi_V|", "|A3|", "|B2|", "|P_s|", "|P_ss|",
    "|P_ps|",
];

fn row_of(doc: &ResultDocument) -> Vec<String> {
    let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
    let opt_ms = |x: Option<u64>| x.map_or("-".to_string(), |v| v.to_string());
    vec![
        format!("{}{}", doc.problem.family, doc.problem.rank),
        doc.problem.rep.clone(),
        opt_ms(doc.stats.timings.stable_ms),
        opt_ms(doc.stats.timings.semistable_ms),
        opt_ms(doc.stats.timings.polystable_ms),
        doc.stats.xi_v.to_string(),
        opt(doc.stats.a3),
        opt(doc.stats.b2),
        opt(doc.stats.p_s),
        opt(doc.stats.p_ss),
        opt(doc.stats.p_ps),
    ]
}

/// Renders a statistics table; aligned plain text, or tab-separated when
/// `delimited` is set. An empty input yields only the header.
pub fn emit_stats_table(docs: &[ResultDocument], delimited: bool) -> String {
    let rows: Vec<Vec<String>> = docs.iter().map(row_of).collect();
    if delimited {
        let mut out = COLUMNS.join("\t");
        for row in &rows {
            out.push('\n');
            out.push_str(&row.join("\t"));
        }
        out.push('\n');
        return out;
    }
    let mut widths: Vec<usize> = COLUMNS.iter().map(|c| c.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let fmt_row = |cells: &[String]| -> String {
        cells
            .iter()
            .zip(widths.iter())
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let header: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
    let mut out = fmt_row(&header);
    for row in &rows {
        out.push('\n');
        out.push_str(&fmt_row(row));
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{run, ProblemSpec, Task};
    use crate::roots::RootFamily;

    #[test]
    fn header_only_on_empty_input() {
        let text = emit_stats_table(&[], false);
        assert_eq!(text.lines().count(), 1);
        assert!(text.contains("|P_ps|"));
    }

    #[test]
    fn cubic_surface_row_matches_counts() {
        let spec = ProblemSpec::new(
            RootFamily::A,
            3,
            "irrep(3,0,0)",
            &[Task::Stable, Task::Semistable, Task::Polystable],
        );
        let doc = run(&spec).unwrap();
        let tsv = emit_stats_table(std::slice::from_ref(&doc), true);
        let row: Vec<&str> = tsv.lines().nth(1).unwrap().split('\t').collect();
        assert_eq!(row[0], "A3");
        assert_eq!(&row[5..], &["20", "8", "15", "3", "3", "3"]);
        let aligned = emit_stats_table(&[doc], false);
        assert_eq!(aligned.lines().count(), 2);
    }
}
