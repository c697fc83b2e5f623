use serde::Serialize;
use serde_json::json;

use super::config::ExperimentConfig;
use super::output::{Check, Outcome, Report, Table};
use crate::error::{domain, Result};
use crate::operators::{relative_entropy, w2_1d, Measure1d};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TalagrandRow {
    pub mean: f64,
    pub variance: f64,
    pub w2: f64,
    pub entropy: f64,
    /// `√(2 t H)`.
    pub bound: f64,
    pub slack: f64,
    /// Same variance as the reference: the inequality is an equality.
    pub mean_shift: bool,
}

/// `W₂(ν, N(0, t))` against `√(2 t H(ν | N(0, t)))` for `ν = N(m, r t)` over
/// every mean `m` and ratio `r`.
pub fn talagrand_table(t: f64, means: &[f64], ratios: &[f64]) -> Result<Vec<TalagrandRow>> {
    if !(t > 0.0) {
        return domain(format!("t must be positive, got {t}"));
    }
    let mu = Measure1d::gaussian(0.0, t)?;
    let mut rows = Vec::new();
    for &r in ratios {
        if !(r > 0.0) {
            return domain(format!("variance ratio must be positive, got {r}"));
        }
        for &m in means {
            let nu = Measure1d::gaussian(m, r * t)?;
            let w2 = w2_1d(&nu, &mu)?;
            let entropy = relative_entropy(&nu, &mu);
            let bound = (2.0 * t * entropy).sqrt();
            rows.push(TalagrandRow {
                mean: m,
                variance: r * t,
                w2,
                entropy,
                bound,
                slack: bound - w2,
                mean_shift: r == 1.0,
            });
        }
    }
    Ok(rows)
}

pub(super) fn talagrand(cfg: &ExperimentConfig) -> Result<Outcome> {
    let c = &cfg.talagrand;
    let tol = cfg.tolerance();
    let rows = talagrand_table(c.t, &c.means, &c.variance_ratios)?;
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let equality_gap = rows
        .iter()
        .filter(|r| r.mean_shift)
        .map(|r| r.slack.abs())
        .fold(0.0, f64::max);
    let strict_min = rows
        .iter()
        .filter(|r| !r.mean_shift)
        .map(|r| r.slack)
        .fold(f64::INFINITY, f64::min);
    let mut checks = vec![
        Check::at_least("min_slack", min_slack, -tol),
        Check::at_most("mean_shift_equality", equality_gap, tol),
    ];
    if strict_min.is_finite() {
        checks.push(Check::at_least("strict_slack", strict_min, tol));
    }
    let details = json!({ "t": c.t, "rows": rows });
    Ok(Outcome {
        report: Report::new(cfg.experiment.name(), None, tol, checks, details),
        tables: vec![Table::from_rows("talagrand", &rows)?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_rows() {
        let rows = talagrand_table(0.5, &[0.0, 1.0], &[1.0, 4.0]).unwrap();
        assert_eq!(rows[0].w2, 0.0);
        assert_eq!(rows[0].entropy, 0.0);
        assert!((rows[1].w2 - 1.0).abs() < 1e-12 && rows[1].slack.abs() < 1e-12);
        assert!(rows[2].slack > 1e-3 && rows[3].slack > 1e-3);
        assert!(talagrand_table(0.5, &[0.0], &[0.0]).is_err());
        assert!(talagrand_table(0.0, &[0.0], &[1.0]).is_err());
    }
}
