//! Hybrid Mittag-Leffler evaluator against frozen high-precision series values.

use enclosure::specfun::{ml_pair, MLOrder};
use enclosure::C64;

fn rows() -> Vec<(u32, C64, C64, C64)> {
    include_str!("data/ml_oracle.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            (v[0] as u32, C64::new(v[1], v[2]), C64::new(v[3], v[4]), C64::new(v[5], v[6]))
        })
        .collect()
}

#[test]
fn hybrid_matches_high_precision_series() {
    let mut worst_e = 0.0f64;
    let mut worst_d = 0.0f64;
    for (n, z, e, d) in rows() {
        let (ge, gd) = ml_pair(MLOrder::new(n).unwrap(), z).unwrap();
        let re = (ge - e).norm() / e.norm();
        let rd = (gd - d).norm() / d.norm();
        if std::env::var("ML_ORACLE_VERBOSE").is_ok() && re.max(rd) > 1e-12 {
            eprintln!(
                "n={n} z={z:.4} |w|={:.2} argw={:.3} rel E {re:.2e} rel E' {rd:.2e}",
                z.norm().powi(n as i32),
                z.powi(n as i32).arg()
            );
        }
        worst_e = worst_e.max(re);
        worst_d = worst_d.max(rd);
    }
    assert!(worst_e < 1e-12, "worst relative error in E {worst_e:.3e}");
    assert!(worst_d < 5e-11, "worst relative error in E' {worst_d:.3e}");
}
