//! Report rendering. Text tables print at the reference precision; CSV and
//! JSON carry full double precision.

use std::fmt::Write as _;

use qbsc_core::SecurityReport;
use serde::Serialize;

/// Truncates toward zero at `decimals` places, matching the reference table.
pub fn truncated(x: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    // Nudge past representation error so 0.116 does not print as 0.115.
    let t = (x * scale + 1e-7).floor() / scale;
    format!("{t:.decimals$}")
}

/// Brute-force percentage: three decimals, four once it drops below 0.001 %.
pub fn brute_force_percent(p_b: f64) -> String {
    let pct = 100.0 * p_b;
    if pct >= 0.001 {
        truncated(pct, 3)
    } else {
        truncated(pct, 4)
    }
}

pub fn flag(b: bool) -> u8 {
    u8::from(b)
}

pub fn security_text(rows: &[SecurityReport]) -> String {
    let mut out = String::new();
    writeln!(out, "{:>3} {:>10} {:>9} {:>9} {:>4}", "M", "<n>", "p_a(%)", "p_b(%)", "QCM").unwrap();
    for r in rows {
        writeln!(
            out,
            "{:>3} {:>10} {:>9} {:>9} {:>4}",
            r.states,
            truncated(r.mean_photons, 3),
            truncated(100.0 * r.p_a, 3),
            brute_force_percent(r.p_b),
            flag(r.qcm_secure)
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Serialize)]
#[allow(non_snake_case)]
pub struct SecurityCsvRow {
    pub M: usize,
    pub mean_photons: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub qcm_secure: u8,
    pub worst_N: Option<usize>,
}

impl From<&SecurityReport> for SecurityCsvRow {
    fn from(r: &SecurityReport) -> Self {
        Self {
            M: r.states,
            mean_photons: r.mean_photons,
            p_a: r.p_a,
            p_b: r.p_b,
            qcm_secure: flag(r.qcm_secure),
            worst_N: r.worst_n,
        }
    }
}

pub fn csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_matches_reference_digits() {
        assert_eq!(truncated(2.586860494972835, 3), "2.586");
        assert_eq!(truncated(18.036879931271017, 3), "18.036");
        assert_eq!(truncated(40.51057562282128, 3), "40.510");
        assert_eq!(truncated(0.116, 3), "0.116");
    }

    #[test]
    fn brute_force_precision_switch() {
        assert_eq!(brute_force_percent(0.0292849), "2.928");
        assert_eq!(brute_force_percent(0.0000088), "0.0008");
        assert_eq!(brute_force_percent(0.0000010), "0.0001");
    }
}
