//! The `verify` subcommand: run the theorem checks on fixed desk-scale
//! setups and print one JSON report per line.

use reg_opt::error::Result;
use reg_opt::linalg::NormOrder;
use reg_opt::problems::{Objective, QuadraticProblem};
use reg_opt::racs::StarNorm;
use reg_opt::verify::{
    check_descent_mu0, check_equilibration_minimality, check_finite_n_bound, check_gamma_bounds,
    check_rms_theorem, commensurate_start, derive_seed, run_naive_mu0, CheckOutcome, TheoremId,
    TheoremReport,
};

/// A verify item: either a finished report or a check whose preconditions
/// ruled it out.
pub enum VerifyItem {
    Report(TheoremReport),
    Skipped { theorem: TheoremId, reason: String },
}

/// Step-size table for the zero-momentum descent runs on the identity
/// quadratic (`L = 1`, parameter 4x8): each entry stays inside
/// `alpha < 2 / (L * Gamma^2)` for its norm order.
const DESCENT_CASES: [(NormOrder, f64); 3] = [
    (NormOrder::L1, 0.5),
    (NormOrder::L2, 0.5),
    (NormOrder::LInf, 0.125),
];

pub fn run_selected(selection: Option<TheoremId>, seed: u64) -> Result<Vec<VerifyItem>> {
    let ids = match selection {
        Some(id) => vec![id],
        None => vec![
            TheoremId::T1a,
            TheoremId::T1b,
            TheoremId::T2,
            TheoremId::T3,
            TheoremId::T4,
        ],
    };
    let mut items = Vec::new();
    for id in ids {
        match id {
            TheoremId::T1a | TheoremId::T1b => {
                items.push(VerifyItem::Report(check_equilibration_minimality(
                    id,
                    100,
                    1000,
                    16,
                    StarNorm::Frobenius,
                    seed,
                )?));
            }
            TheoremId::T2 => {
                items.push(VerifyItem::Report(check_rms_theorem(128, 256, 10_000, seed)));
            }
            TheoremId::T3 => items.extend(descent_items(seed)?),
            TheoremId::T4 => items.extend(finite_n_items(seed)?),
        }
    }
    Ok(items)
}

/// Descent-to-tolerance runs from commensurate starts, plus gamma-envelope
/// checks along generic runs.
fn descent_items(seed: u64) -> Result<Vec<VerifyItem>> {
    let mut items = Vec::new();
    let problem = QuadraticProblem::identity(4, 8);
    for (idx, (p, alpha)) in DESCENT_CASES.iter().enumerate() {
        let case_seed = derive_seed(seed, idx as u64);
        let w0 = commensurate_start((4, 8), *p, *alpha, 2000, case_seed);
        match check_descent_mu0(&problem, *p, *alpha, &w0, 100_000, 1e-6, case_seed)? {
            CheckOutcome::Report(report) => items.push(VerifyItem::Report(report)),
            CheckOutcome::Skipped { reason } => items.push(VerifyItem::Skipped {
                theorem: TheoremId::T3,
                reason,
            }),
        }
    }
    let generic = QuadraticProblem::random(3, 7, derive_seed(seed, 100));
    for (idx, (p, _)) in DESCENT_CASES.iter().enumerate() {
        let case_seed = derive_seed(seed, 200 + idx as u64);
        let w0 = Objective::init(&generic, case_seed);
        let run = run_naive_mu0(&generic, *p, 0.05, &w0, 300, None, true, case_seed);
        items.push(VerifyItem::Report(check_gamma_bounds(&run.grads, *p, case_seed)));
    }
    Ok(items)
}

/// The finite-horizon bound over the full momentum/step-size grid.
fn finite_n_items(seed: u64) -> Result<Vec<VerifyItem>> {
    let mut items = Vec::new();
    for (i, &m) in [2usize, 4, 8].iter().enumerate() {
        let problem = QuadraticProblem::random(m, 2 * m, derive_seed(seed, 300 + i as u64));
        for (j, &mu) in [0.5, 0.9, 0.99].iter().enumerate() {
            for (k, &alpha) in [1e-3, 1e-2].iter().enumerate() {
                let case_seed = derive_seed(seed, (100 * i + 10 * j + k) as u64);
                items.push(VerifyItem::Report(check_finite_n_bound(
                    &problem, mu, alpha, 10_000, case_seed,
                )?));
            }
        }
    }
    Ok(items)
}
