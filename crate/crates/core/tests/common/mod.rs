//! Shared fixtures of the integration and acceptance tests.
#![allow(dead_code)]

use std::sync::Arc;

use semigroup_lab::experiments::Probe;
use semigroup_lab::funcspace::{GridFunction, WeightedGrid};
use semigroup_lab::operators::*;

pub fn corpus(g: &Arc<WeightedGrid>) -> Vec<GridFunction> {
    Probe::CORPUS.iter().map(|p| p.on(g).unwrap()).collect()
}

pub fn steps() -> Vec<(Box<dyn StepOperator>, f64, f64)> {
    // (step, L, grid allowance per unit Lipschitz constant)
    let lat = Discretization::Lattice;
    let quad = Discretization::quadrature();
    let bm = ReferenceModel::brownian(1.0, lat.clone()).unwrap();
    let ou = ReferenceModel::new(
        -0.5,
        MeasureFamily::Gaussian { var_rate: 1.0, mean_rate: 0.0 },
        0.5,
        quad.clone(),
    )
    .unwrap();
    let b = symmetric_grid(2.0, 0.05).unwrap();
    let z = symmetric_grid(1.5, 0.05).unwrap();
    let budgets: Vec<f64> = (0..=30).map(|k| k as f64 * 0.05).collect();
    vec![
        (Box::new(IdentityStep), 0.0, 0.0),
        (Box::new(ReferenceStep { model: Arc::new(bm.clone()) }), 0.0, 0.0),
        (Box::new(ReferenceStep { model: Arc::new(bm.with_discretization(quad.clone())) }), 0.0, 0.0),
        (Box::new(ReferenceStep { model: Arc::new(ou.clone()) }), 0.5, 0.05),
        (Box::new(ControlStep::new(ControlCost::entropic(2.0, 0.05).unwrap(), lat.clone())), 0.0, 0.0),
        (Box::new(DriftStep::new(bm.clone(), PhiCost::quadratic(), b.clone()).unwrap()), 0.0, 0.0),
        (Box::new(DriftStep::new(ou.clone(), PhiCost::ball(0.5, 2.0).unwrap(), b.clone()).unwrap()), 0.5, 0.05),
        (
            Box::new(
                WassersteinStep::new(bm.clone(), PhiCost::quadratic(), z.clone(), budgets.clone())
                    .unwrap()
                    .with_rates(b.clone())
                    .unwrap(),
            ),
            0.0,
            0.0,
        ),
        (Box::new(Entropic::matching_quadratic(lat)), 0.0, 0.0),
        (Box::new(Entropic::new(2.0, 1.0, quad).unwrap()), 0.0, 0.0),
    ]
}

/// Runs every step in [`steps`] at `t ∈ {0.1, 0.5}` on the probe corpus and
/// returns one line per failing axiom.
pub fn axiom_failures(verbose: bool) -> Vec<String> {
    let g = Arc::new(WeightedGrid::symmetric(8.0, 0.05).unwrap());
    let probes = corpus(&g);
    let mut failures = Vec::new();
    for (step, l, allowance) in steps() {
        for t in [0.1, 0.5] {
            let s = AxiomSettings {
                t,
                l,
                window: 2.0,
                tolerance: 1e-9,
                grid_allowance: allowance,
            };
            for row in check_axioms(step.as_ref(), &probes, &s).unwrap() {
                if verbose {
                    println!("{:<12} t={t:<4} {:?}: {:.3e}", row.operator, row.axiom, row.worst);
                }
                if !row.pass {
                    failures.push(format!("{} t={t} {:?}: {:.3e}", row.operator, row.axiom, row.worst));
                }
            }
        }
    }
    failures
}
