//! Result rendering: console tables in the benchmark-report layout, CSV
//! rows, and JSON documents.

use crate::campaign::{CampaignOutput, CompareOutput};

pub const CSV_HEADER: &str =
    "problem,dimension,mode,runs,seed0,best,mean,worst,std,sr_pct,mean_violation,c1,c2,c3,fes";

/// One CSV row per campaign. Floats use the shortest round-tripping form.
pub fn csv_row(output: &CampaignOutput) -> String {
    let a = &output.aggregate;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        output.problem,
        output.dimension,
        output.mode,
        output.runs,
        output.seed0,
        a.best,
        a.mean,
        a.worst,
        a.std,
        a.sr_pct,
        a.mean_violation,
        a.c[0],
        a.c[1],
        a.c[2],
        output.fes_total
    )
}

pub fn csv_document(outputs: &[&CampaignOutput]) -> String {
    let mut doc = String::from(CSV_HEADER);
    doc.push('\n');
    for output in outputs {
        doc.push_str(&csv_row(output));
        doc.push('\n');
    }
    doc
}

pub fn json_document<T: serde::Serialize>(value: &T) -> String {
    let mut doc = serde_json::to_string_pretty(value).expect("output serializes");
    doc.push('\n');
    doc
}

fn num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e-3 && v.abs() < 1e7 {
        format!("{v:.6}")
    } else {
        format!("{v:.5e}")
    }
}

fn c_cell(c: [usize; 3]) -> String {
    if c.iter().all(|&n| n <= 9) {
        format!("[{}{}{}]", c[0], c[1], c[2])
    } else {
        format!("[{},{},{}]", c[0], c[1], c[2])
    }
}

/// Console table, one statistic per row.
pub fn render_table(output: &CampaignOutput) -> String {
    let a = &output.aggregate;
    let mut table = String::new();
    table.push_str(&format!(
        "Problem   {} (D={}, mode={}, runs={}, seed0={}, max_fes={})\n",
        output.problem, output.dimension, output.mode, output.runs, output.seed0, output.max_fes
    ));
    table.push_str(&format!("Best      {}\n", num(a.best)));
    table.push_str(&format!("Mean      {}\n", num(a.mean)));
    table.push_str(&format!("Worst     {}\n", num(a.worst)));
    table.push_str(&format!("STD       {}\n", num(a.std)));
    table.push_str(&format!("SR        {:.0}\n", a.sr_pct));
    table.push_str(&format!("v\u{0304}         {}\n", a.mean_violation));
    table.push_str(&format!("c         {}\n", c_cell(a.c)));
    table.push_str(&format!("FES       {}\n", output.fes_total));
    table
}

/// Console summary of a two-mode comparison.
pub fn render_comparison(compare: &CompareOutput) -> String {
    let m3 = compare.ude3.aggregate.mean;
    let m2 = compare.ude2.aggregate.mean;
    let verdict = if m3 < m2 {
        "ude3 better"
    } else if m3 > m2 {
        "ude2 better"
    } else {
        "tied"
    };
    format!(
        "Compare   Mean(ude3)={} Mean(ude2)={} SR(ude3)={:.0} SR(ude2)={:.0} -> {verdict}\n",
        num(m3),
        num(m2),
        compare.ude3.aggregate.sr_pct,
        compare.ude2.aggregate.sr_pct
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_has_the_pinned_columns() {
        assert_eq!(
            CSV_HEADER.split(',').collect::<Vec<_>>(),
            vec![
                "problem",
                "dimension",
                "mode",
                "runs",
                "seed0",
                "best",
                "mean",
                "worst",
                "std",
                "sr_pct",
                "mean_violation",
                "c1",
                "c2",
                "c3",
                "fes"
            ]
        );
    }

    #[test]
    fn c_cell_formats() {
        assert_eq!(c_cell([0, 0, 0]), "[000]");
        assert_eq!(c_cell([1, 0, 12]), "[1,0,12]");
    }
}
