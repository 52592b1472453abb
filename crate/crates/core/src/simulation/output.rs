use std::fmt::Write as _;

use super::{ScalingTable, SimulationReport};

pub const CSV_HEADER: &str = "n,r0,r1,design,R,mean,var,var_hat_upper,eta,delta,rho,skew,kurt,ks,wall_time_s";

fn num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v}"),
        _ => String::new(),
    }
}

/// One CSV line per report, empty cells for missing values.
pub fn reports_to_csv(reports: &[SimulationReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let b = r.bounds;
        let d = r.normality;
        let cells = [
            r.instance.n.to_string(),
            num(r.instance.r0),
            r.instance.r1.map(|v| v.to_string()).unwrap_or_default(),
            r.design.clone(),
            r.replicates.to_string(),
            num(Some(r.mean)),
            num(Some(r.variance)),
            num(b.map(|b| b.upper)),
            num(b.map(|b| b.eta)),
            num(b.map(|b| b.delta)),
            num(b.map(|b| b.rho)),
            num(d.map(|d| d.skewness)),
            num(d.map(|d| d.excess_kurtosis)),
            num(d.map(|d| d.ks_distance)),
            num(r.wall_time_s),
        ];
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn scaling_to_csv(table: &ScalingTable) -> String {
    let mut out = String::from("n,mean,var,var_hat_upper,seeds\n");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.n,
            num(Some(row.mean)),
            num(Some(row.variance)),
            num(row.var_hat_upper),
            row.variances.len()
        );
    }
    out
}
