//! CSV and PGM writers for traces and maps.

use super::scan::{Verdict, VisibilityMap};
use super::IndicatorTrace;
use std::fmt::Write as _;

/// `N,s,Re(I),Im(I),abs(I)` rows.
pub fn trace_csv(t: &IndicatorTrace) -> String {
    let mut out = String::from("N,s,Re(I),Im(I),abs(I)\n");
    for i in 0..t.ns.len() {
        let v = t.values[i];
        writeln!(out, "{},{:.16e},{:.16e},{:.16e},{:.16e}", t.ns[i], t.s[i], v.re, v.im, t.abs[i]).expect("writing to a String");
    }
    out
}

/// `x1,x2,verdict,witness_omega,witness_n` rows in lattice order.
pub fn map_csv(m: &VisibilityMap) -> String {
    let mut out = String::from("x1,x2,verdict,witness_omega,witness_n\n");
    for ((p, v), w) in m.points.iter().zip(&m.verdicts).zip(&m.witnesses) {
        let verdict = match v {
            Verdict::Visible => "Visible",
            Verdict::NotShownVisible => "NotShownVisible",
        };
        let (wo, wn) = match w {
            Some(w) => (format!("{:.16e}", w.omega), w.n.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(out, "{:.16e},{:.16e},{verdict},{wo},{wn}", p.x1, p.x2).expect("writing to a String");
    }
    out
}

/// Binary 8-bit PGM, Visible = 255, in the same lattice order as the CSV.
pub fn map_pgm(m: &VisibilityMap) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", m.grid.nx, m.grid.ny).into_bytes();
    out.extend(m.verdicts.iter().map(|v| if *v == Verdict::Visible { 255u8 } else { 0 }));
    out
}
