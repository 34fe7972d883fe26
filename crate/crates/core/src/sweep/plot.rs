//! Gnuplot script drawing `p_hat` against `c` for each size of a sweep.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::{SweepResult, Threshold};
use crate::fmt::g17;

/// A script that reads `csv_path` and plots one curve per `(n, k)` with
/// Wilson error bars and, for point thresholds, a vertical line at the
/// predicted critical value.
pub fn plot_script(result: &SweepResult, csv_path: &str, threshold: Option<Threshold>) -> String {
    let dims: BTreeSet<(usize, usize)> = result.rows.iter().map(|r| (r.n, r.k)).collect();
    let title = result
        .rows
        .first()
        .map(|r| format!("{} ({})", r.criterion, r.regime))
        .unwrap_or_default();
    let quoted = csv_path.replace('\'', "''");

    let mut s = String::new();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set title '{}'", title.replace('\'', "''")).unwrap();
    writeln!(s, "set xlabel 'c'").unwrap();
    writeln!(s, "set ylabel 'estimated probability'").unwrap();
    writeln!(s, "set yrange [-0.05:1.05]").unwrap();
    writeln!(s, "set key bottom right").unwrap();
    match threshold {
        Some(Threshold::Constant(c)) => {
            let c = g17(c);
            writeln!(
                s,
                "set arrow from {c}, graph 0 to {c}, graph 1 nohead dashtype 2"
            )
            .unwrap();
        }
        Some(Threshold::FixedDim(d)) => {
            writeln!(
                s,
                "set arrow from {d}, graph 0 to {d}, graph 1 nohead dashtype 2"
            )
            .unwrap();
        }
        _ => {}
    }
    let curves: Vec<String> = dims
        .iter()
        .map(|(n, k)| {
            format!(
                "'{quoted}' skip 1 using (($3=={n} && $4=={k}) ? $6 : 1/0):9:10:11 \
                 with yerrorlines title 'n={n}, k={k}'"
            )
        })
        .collect();
    if curves.is_empty() {
        writeln!(s, "# no rows to plot").unwrap();
    } else {
        writeln!(s, "plot {}", curves.join(", \\\n     ")).unwrap();
    }
    s
}
