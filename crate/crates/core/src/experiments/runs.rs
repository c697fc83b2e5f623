use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use super::config::{ExperimentConfig, OracleKind};
use super::output::{Check, Outcome, Report, Table};
use super::Probe;
use crate::chernoff::{chernoff_run, ChernoffConfig, ConvergenceReport, Schedule};
use crate::error::{LabError, Result};
use crate::funcspace::{discrete_lipschitz, GridFunction, WeightedGrid};
use crate::generator::{
    difference_quotient, lipschitz_membership, smooth_generator_oracle, Hamiltonian, LipschitzVerdict, Membership,
    SemigroupEval, Side,
};
use crate::operators::model_file::{ModelFile, ModelKind};
use crate::operators::{hjb_fd_oracle, hjb_max_dt, DriftStep, ReferenceStep, StepOperator};

/// The model of a run with the config's grid applied, and its hash.
pub(super) struct Setup {
    pub model: ModelFile,
    pub hash: String,
    pub grid: Arc<WeightedGrid>,
}

impl Setup {
    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let path = cfg
            .model
            .as_ref()
            .ok_or_else(|| LabError::Config(format!("{} needs a model file", cfg.experiment.name())))?;
        let mut model = ModelFile::load(path)?;
        if let Some(g) = cfg.grid {
            model.span = g.span;
            model.dx = g.dx;
        }
        let hash = model.hash()?;
        let grid = Arc::new(model.grid()?);
        Ok(Setup { model, hash, grid })
    }

    fn probe(&self, p: Probe) -> Result<GridFunction> {
        p.on(&self.grid)
    }

    fn oracle(&self, kind: OracleKind, t: f64, f: &GridFunction) -> Result<Option<GridFunction>> {
        match kind {
            OracleKind::None => Ok(None),
            OracleKind::Entropic => Ok(Some(self.model.entropic_step()?.apply(t, f)?)),
        }
    }
}

/// Side-by-side profiles on the reporting window.
fn profiles(grid: &WeightedGrid, window: f64, cols: &[(&str, &GridFunction)]) -> Result<Table> {
    let mut header = vec!["x"];
    header.extend(cols.iter().map(|c| c.0));
    let rows: Vec<Vec<f64>> = grid
        .window(window)
        .map(|i| std::iter::once(grid.x(i)).chain(cols.iter().map(|c| c.1.finite()[i])).collect())
        .collect();
    Table::from_columns("profile", &header, &rows)
}

fn chernoff_limit(
    step: &dyn StepOperator,
    f: &GridFunction,
    cfg: &ExperimentConfig,
) -> Result<(GridFunction, ConvergenceReport)> {
    let r = &cfg.run;
    let schedule = Schedule::dyadic(r.t, r.first, r.last)?;
    let config = ChernoffConfig {
        tolerance: cfg.tolerance(),
        expect: r.expect,
        ..ChernoffConfig::default()
    };
    let (mut iterates, report) = chernoff_run(step, f, r.t, &schedule, &config)?;
    Ok((iterates.pop().expect("nonempty schedule"), report))
}

fn monotone_check(cfg: &ExperimentConfig, name: &str, report: &ConvergenceReport) -> Option<Check> {
    cfg.run
        .monotone_tolerance
        .map(|tol| Check::at_most(format!("{name}_monotone_violation"), report.max_violation, tol))
}

pub(super) fn chernoff_run_exp(cfg: &ExperimentConfig) -> Result<Outcome> {
    let s = Setup::load(cfg)?;
    let r = &cfg.run;
    let f = s.probe(r.probe)?;
    let step = s.model.step_operator()?;
    let (limit, report) = chernoff_limit(step.as_ref(), &f, cfg)?;
    let tol = cfg.tolerance();
    let mut checks = vec![Check::flag("bounded", !report.diverged)];
    checks.extend(monotone_check(cfg, "chernoff", &report));
    let oracle = s.oracle(r.oracle, r.t, &f)?;
    let mut cols = vec![("chernoff", &limit)];
    let mut oracle_error = None;
    if let Some(o) = &oracle {
        let e = limit.sup_distance_on(o, r.window);
        checks.push(Check::at_most("oracle_error", e, tol));
        oracle_error = Some(e);
        cols.push(("oracle", o));
    }
    let details = json!({
        "step": step.name(),
        "probe": r.probe,
        "t": r.t,
        "window": r.window,
        "oracle_error": oracle_error,
        "convergence": report,
    });
    let mut tables = vec![Table::from_rows("convergence", &report.rows)?];
    tables.push(profiles(&s.grid, r.window, &cols)?);
    Ok(Outcome {
        report: Report::new(cfg.experiment.name(), Some(s.hash), tol, checks, details),
        tables,
    })
}

fn hamiltonian(model: &ModelFile) -> Result<Hamiltonian> {
    Ok(match model.model {
        ModelKind::Control => Hamiltonian::Control(model.control_cost()?),
        ModelKind::Wasserstein | ModelKind::Drift => Hamiltonian::Perturbed {
            reference: model.reference_model()?,
            phi: model.phi_cost()?,
        },
        ModelKind::Entropic => {
            let (gamma, var_rate) = model.entropic.as_ref().map_or((1.0, 1.0), |e| (e.gamma, e.var_rate));
            Hamiltonian::Entropic { gamma, var_rate }
        }
        ModelKind::Reference => Hamiltonian::Reference(model.reference_model()?),
    })
}

/// Least-squares slope of `ln e` against `ln h`.
pub fn loglog_slope(hs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Serialize)]
struct QuotientRow {
    probe: Probe,
    h: f64,
    error: f64,
}

#[derive(Serialize)]
struct SlopeRow {
    probe: Probe,
    slope: f64,
    final_error: f64,
    pass: bool,
}

#[derive(Serialize)]
struct MembershipRow {
    probe: Probe,
    expected: Membership,
    verdict: Membership,
    c_estimate: f64,
}

pub(super) fn gen_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let s = Setup::load(cfg)?;
    let g = &cfg.generator;
    let tol = cfg.tolerance();
    let hs: Vec<f64> = (g.first..=g.last).map(|n| g.t0 * 2f64.powi(-n)).collect();
    let step = s.model.step_operator()?;
    let eval = match s.model.model {
        ModelKind::Entropic | ModelKind::Reference => SemigroupEval::exact(step),
        _ => SemigroupEval::chernoff(step, g.width.unwrap_or(hs[0]))?,
    };
    let ham = hamiltonian(&s.model)?;
    let window = cfg.run.window;

    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for &p in &g.probes {
        let f = s.probe(p)?;
        let oracle = smooth_generator_oracle(&f, &ham)?;
        let errs = hs
            .iter()
            .map(|&h| Ok(difference_quotient(&eval, &f, h)?.sup_distance_on(&oracle, window)))
            .collect::<Result<Vec<f64>>>()?;
        rows.extend(hs.iter().zip(&errs).map(|(&h, &error)| QuotientRow { probe: p, h, error }));
        let slope = loglog_slope(&hs, &errs);
        let final_error = *errs.last().unwrap();
        slopes.push(SlopeRow {
            probe: p,
            slope,
            final_error,
            pass: slope >= g.min_slope && final_error <= tol,
        });
    }

    let mut verdicts: Vec<(Probe, Membership, LipschitzVerdict)> = Vec::new();
    for (list, expected) in [(&g.lipschitz_members, Membership::Yes), (&g.lipschitz_outsiders, Membership::No)] {
        for &p in list {
            verdicts.push((p, expected, lipschitz_membership(&eval, &s.probe(p)?, Side::Upper, &hs)?));
        }
    }

    let worst_slope = slopes.iter().map(|r| r.slope).fold(f64::INFINITY, f64::min);
    let worst_final = slopes.iter().map(|r| r.final_error).fold(0.0, f64::max);
    let mut checks = vec![
        Check::at_least("min_slope", worst_slope, g.min_slope),
        Check::at_most("final_error", worst_final, tol),
    ];
    if !verdicts.is_empty() {
        checks.push(Check::flag(
            "lipschitz_classification",
            verdicts.iter().all(|(_, e, v)| v.member == *e),
        ));
    }
    let membership: Vec<MembershipRow> = verdicts
        .iter()
        .map(|(p, e, v)| MembershipRow {
            probe: *p,
            expected: *e,
            verdict: v.member,
            c_estimate: v.c_estimate,
        })
        .collect();
    let details = json!({
        "evaluator": format!("{eval:?}"),
        "h": hs,
        "window": window,
        "slopes": slopes,
        "lipschitz": verdicts.iter().map(|(p, e, v)| json!({"probe": p, "expected": e, "verdict": v})).collect::<Vec<_>>(),
    });
    let tables = vec![
        Table::from_rows("quotient_errors", &rows)?,
        Table::from_rows("slopes", &slopes)?,
        Table::from_rows("lipschitz", &membership)?,
    ];
    Ok(Outcome {
        report: Report::new(cfg.experiment.name(), Some(s.hash), tol, checks, details),
        tables,
    })
}

pub(super) fn hjb_compare(cfg: &ExperimentConfig) -> Result<Outcome> {
    let s = Setup::load(cfg)?;
    if s.model.model != ModelKind::Control {
        return Err(LabError::Config("hjb-compare needs a control model".into()));
    }
    let r = &cfg.run;
    let tol = cfg.tolerance();
    let f = s.probe(r.probe)?;
    let cost = s.model.control_cost()?;
    let step = s.model.step_operator()?;
    let (limit, report) = chernoff_limit(step.as_ref(), &f, cfg)?;
    let dt = cfg.hjb.dt.unwrap_or(0.9 * hjb_max_dt(&cost, s.grid.dx()));
    let hjb = hjb_fd_oracle(&cost, &f, r.t, dt, cfg.hjb.scheme)?;
    let gap = limit.sup_distance_on(&hjb, r.window);
    let mut checks = vec![Check::at_most("chernoff_vs_hjb", gap, tol)];
    checks.extend(monotone_check(cfg, "chernoff", &report));
    let oracle = s.oracle(r.oracle, r.t, &f)?;
    let mut cols = vec![("chernoff", &limit), ("hjb", &hjb)];
    let mut oracle_errors = None;
    if let Some(o) = &oracle {
        let (a, b) = (limit.sup_distance_on(o, r.window), hjb.sup_distance_on(o, r.window));
        checks.push(Check::at_most("chernoff_vs_oracle", a, tol));
        checks.push(Check::at_most("hjb_vs_oracle", b, tol));
        oracle_errors = Some(json!({"chernoff": a, "hjb": b}));
        cols.push(("oracle", o));
    }
    let details = json!({
        "probe": r.probe,
        "t": r.t,
        "window": r.window,
        "dt": dt,
        "gap": gap,
        "oracle_errors": oracle_errors,
        "convergence": report,
    });
    let tables = vec![
        Table::from_rows("convergence", &report.rows)?,
        profiles(&s.grid, r.window, &cols)?,
    ];
    Ok(Outcome {
        report: Report::new(cfg.experiment.name(), Some(s.hash), tol, checks, details),
        tables,
    })
}

#[derive(Serialize)]
struct ChainRow {
    t: f64,
    /// `max (R - J)`: violation of `0 <= J - R`.
    lower: f64,
    /// `max (J - I)`: violation of `J - R <= I - R`.
    middle: f64,
    /// `max (I - R - φ*(r) t)`.
    upper: f64,
    allowance: f64,
}

pub(super) fn wasserstein_compare(cfg: &ExperimentConfig) -> Result<Outcome> {
    let s = Setup::load(cfg)?;
    if !matches!(s.model.model, ModelKind::Wasserstein | ModelKind::Drift) || s.model.drift.is_none() {
        return Err(LabError::Config(
            "wasserstein-compare needs a wasserstein or drift model with a [drift] section".into(),
        ));
    }
    let r = &cfg.run;
    let tol = cfg.tolerance();
    let f = s.probe(r.probe)?;
    let reference = s.model.reference_model()?;
    let phi = s.model.phi_cost()?;
    let drift = DriftStep::new(reference.clone(), phi.clone(), s.model.drift_grid()?)?;
    let wass = s.model.wasserstein_step()?;
    let rstep = ReferenceStep {
        model: Arc::new(reference),
    };
    let dx = s.grid.dx();
    let lip = discrete_lipschitz(f.finite(), dx);
    let allowance = 2.0 * dx * lip;
    let window = s.grid.window(r.window);
    let excess = |a: &GridFunction, b: &GridFunction, c: f64| {
        window
            .clone()
            .map(|i| a.finite()[i] - b.finite()[i] - c)
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut chain = Vec::new();
    for &t in &cfg.chain.times {
        let (rv, jv, iv) = (rstep.apply(t, &f)?, drift.apply(t, &f)?, wass.apply(t, &f)?);
        chain.push(ChainRow {
            t,
            lower: excess(&rv, &jv, 0.0),
            middle: excess(&jv, &iv, 0.0),
            upper: excess(&iv, &rv, phi.conjugate(lip) * t),
            allowance,
        });
    }
    let chain_worst = chain
        .iter()
        .map(|c| c.lower.max(c.middle).max(c.upper))
        .fold(f64::NEG_INFINITY, f64::max);

    let (j_lim, j_rep) = chernoff_limit(&drift, &f, cfg)?;
    let (i_lim, i_rep) = chernoff_limit(&wass, &f, cfg)?;
    let gap = j_lim.sup_distance_on(&i_lim, r.window);
    let mut checks = vec![
        Check::at_most("drift_vs_wasserstein", gap, tol + allowance),
        Check::at_most("chain", chain_worst, cfg.chain.tolerance + allowance),
    ];
    checks.extend(monotone_check(cfg, "drift", &j_rep));
    checks.extend(monotone_check(cfg, "wasserstein", &i_rep));
    let oracle = s.oracle(r.oracle, r.t, &f)?;
    let mut cols = vec![("drift", &j_lim), ("wasserstein", &i_lim)];
    let mut oracle_errors = None;
    if let Some(o) = &oracle {
        let (a, b) = (j_lim.sup_distance_on(o, r.window), i_lim.sup_distance_on(o, r.window));
        checks.push(Check::at_most("drift_vs_oracle", a, tol));
        checks.push(Check::at_most("wasserstein_vs_oracle", b, tol));
        oracle_errors = Some(json!({"drift": a, "wasserstein": b}));
        cols.push(("oracle", o));
    }
    let details = json!({
        "probe": r.probe,
        "t": r.t,
        "window": r.window,
        "lipschitz": lip,
        "gap": gap,
        "chain_worst": chain_worst,
        "oracle_errors": oracle_errors,
        "drift_convergence": j_rep,
        "wasserstein_convergence": i_rep,
    });
    let tables = vec![
        Table::from_rows("chain", &chain)?,
        Table::from_rows("drift_convergence", &j_rep.rows)?,
        Table::from_rows("wasserstein_convergence", &i_rep.rows)?,
        profiles(&s.grid, r.window, &cols)?,
    ];
    Ok(Outcome {
        report: Report::new(cfg.experiment.name(), Some(s.hash), tol, checks, details),
        tables,
    })
}
