use std::fmt::Write;

use super::LinearProgram;

/// Plain-text triplet form of a program, byte-stable for a given program.
///
/// ```text
/// # lp-triplet v1: minimize c.x subject to A x = b, x >= 0
/// dims <rows> <cols> <nnz>
/// objective
/// <col> <c_col>            (nonzero entries)
/// rhs
/// <row> <b_row>            (nonzero entries)
/// entries
/// <row> <col> <value>      (sorted by row, then column)
/// bounds
/// all 0 inf
/// ```
pub fn export_lp(lp: &LinearProgram) -> String {
    let mut entries = lp.entries.clone();
    entries.sort_by_key(|&(i, j, _)| (i, j));
    let mut out = String::with_capacity(entries.len() * 40);
    out.push_str("# lp-triplet v1: minimize c.x subject to A x = b, x >= 0\n");
    let _ = writeln!(out, "dims {} {} {}", lp.rows, lp.cols, entries.len());
    out.push_str("objective\n");
    for (j, c) in lp.cost.iter().enumerate().filter(|(_, c)| **c != 0.0) {
        let _ = writeln!(out, "{j} {c:.17e}");
    }
    out.push_str("rhs\n");
    for (i, b) in lp.rhs.iter().enumerate().filter(|(_, b)| **b != 0.0) {
        let _ = writeln!(out, "{i} {b:.17e}");
    }
    out.push_str("entries\n");
    for (i, j, v) in entries {
        let _ = writeln!(out, "{i} {j} {v:.17e}");
    }
    out.push_str("bounds\nall 0 inf\n");
    out
}
