//! CSV and JSON writers. Floats are written with 17 significant digits in
//! scientific notation so that every value round-trips exactly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use frac_core::psi::GridFunction;
use frac_core::stability::StabilityCertificate;

use crate::error::CliError;

/// Placed before the node-0 row when the solution is singular at `t = 0`.
pub const PLACEHOLDER_COMMENT: &str =
    "# node 0: u0 is singular at t = 0 (gamma < 1); the value below is a placeholder taken at t_1/2";

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// `t,psi_t,u0`, one row per node.
pub fn solution_csv(u: &GridFunction, first_checked_node: usize) -> String {
    let g = u.grid();
    let mut out = String::from("t,psi_t,u0\n");
    for (i, ((t, p), v)) in g
        .nodes()
        .iter()
        .zip(g.psi_values())
        .zip(u.values())
        .enumerate()
    {
        if i == 0 && first_checked_node > 0 {
            out.push_str(PLACEHOLDER_COMMENT);
            out.push('\n');
        }
        let _ = writeln!(out, "{},{},{}", float(*t), float(*p), float(*v));
    }
    out
}

/// `t,u0,bound,worst_deviation`, one row per node.
pub fn certificate_csv(cert: &StabilityCertificate) -> String {
    let g = cert.solution.grid();
    let mut out = String::from("t,u0,bound,worst_deviation\n");
    for i in 0..g.len() {
        if i == 0 && cert.first_checked_node > 0 {
            out.push_str(PLACEHOLDER_COMMENT);
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{},{},{},{}",
            float(g.nodes()[i]),
            float(cert.solution.values()[i]),
            float(cert.bound.values()[i]),
            float(cert.worst_deviation[i])
        );
    }
    out
}

pub fn certificate_json(cert: &StabilityCertificate) -> String {
    let mut s = serde_json::to_string_pretty(cert).expect("certificate fields are serializable");
    s.push('\n');
    s
}

/// Path of the grid companion of a certificate: `out` with extension `.csv`.
pub fn companion_csv_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "csv") {
        let mut p = out.as_os_str().to_owned();
        p.push(".csv");
        PathBuf::from(p)
    } else {
        out.with_extension("csv")
    }
}
