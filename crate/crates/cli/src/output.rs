//! Deterministic CSV/JSON emission.

use std::ffi::OsString;
use std::io;
use std::path::Path;

use rodmech_core::diagnostics::{EnergyLedger, Momenta};

/// Fixed column schema of every time-series CSV.
pub const CSV_HEADER: &str =
    "t,ke_trans,ke_rot,Um,Ua,Us,Upp,Upw,Upend,E,Px,Py,Pz,Lx,Ly,Lz,Lsx,Lsy,Lsz,aux1,aux2";

/// 17 significant digits: doubles round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV row from a sample; `aux` carries the pendulum invariants (or
/// zeros for other scenarios).
pub fn csv_row(ledger: &EnergyLedger, momenta: &Momenta, aux: (f64, f64)) -> String {
    let p = &ledger.potential;
    let cols = [
        ledger.time,
        ledger.kinetic_translational,
        ledger.kinetic_rotational,
        p.bending,
        p.axial,
        p.shear,
        p.contact,
        p.wall,
        p.pendulum,
        ledger.total,
        momenta.linear.x,
        momenta.linear.y,
        momenta.linear.z,
        momenta.total_angular.x,
        momenta.total_angular.y,
        momenta.total_angular.z,
        momenta.spin.x,
        momenta.spin.y,
        momenta.spin.z,
        aux.0,
        aux.1,
    ];
    let mut row = String::with_capacity(cols.len() * 25);
    for (k, c) in cols.iter().enumerate() {
        if k > 0 {
            row.push(',');
        }
        row.push_str(&fmt_f64(*c));
    }
    row
}

/// Write via a sibling temp file and rename, so readers never observe a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let mut tmp_name: OsString = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_else(|| OsString::from("out"));
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}
