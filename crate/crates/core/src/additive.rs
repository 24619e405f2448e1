//! Additive slack scores: inefficiency α* and super-efficiency β*.

use crate::error::{DeaError, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation, Sense};
use crate::model::{Activity, ModelConfig, ReferenceSet, Returns};
use crate::sbm::ScoreReport;

/// α*: the largest mean relative slack `(Σ s⁻/x + Σ s⁺/y) / (m + s)` over
/// `x = Xλ + s⁻`, `y = Yλ − s⁺`. Zero iff the activity is efficient; zero
/// with an "outside P" note when the activity is not in the technology.
pub fn alpha_star(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<ScoreReport> {
    reference.check(a)?;
    alpha_at(a.inputs(), a.outputs(), reference, config.rts)
}

pub(crate) fn alpha_at(
    x: &[f64],
    y: &[f64],
    reference: &ReferenceSet,
    rts: Returns,
) -> Result<ScoreReport> {
    let (n, m, s) = (reference.n(), reference.m(), reference.s());
    let nv = n + m + s;
    let w = 1.0 / (m + s) as f64;
    let mut obj = vec![0.0; nv];
    for i in 0..m {
        obj[n + i] = w / x[i];
    }
    for r in 0..s {
        obj[n + m + r] = w / y[r];
    }
    let mut lp = LinearProgram::new(Sense::Maximize, obj);
    for i in 0..m {
        let mut row = vec![0.0; nv];
        for j in 0..n {
            row[j] = reference.x(i, j);
        }
        row[n + i] = 1.0;
        lp.add_row(row, Relation::Eq, x[i]);
    }
    for r in 0..s {
        let mut row = vec![0.0; nv];
        for j in 0..n {
            row[j] = reference.y(r, j);
        }
        row[n + m + r] = -1.0;
        lp.add_row(row, Relation::Eq, y[r]);
    }
    if rts == Returns::Variable {
        let mut row = vec![0.0; nv];
        row[..n].iter_mut().for_each(|v| *v = 1.0);
        lp.add_row(row, Relation::Eq, 1.0);
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Infeasible => Ok(ScoreReport {
            score: 0.0,
            lambda: Vec::new(),
            slacks_minus: vec![0.0; m],
            slacks_plus: vec![0.0; s],
            projection: None,
            region: None,
            notes: vec!["outside P".into()],
        }),
        LpStatus::Unbounded => Err(DeaError::Solver("additive program unbounded".into())),
        LpStatus::Optimal => Ok(ScoreReport {
            score: sol.objective_value.max(0.0),
            lambda: sol.primal[..n].to_vec(),
            slacks_minus: sol.primal[n..n + m].iter().map(|v| v.max(0.0)).collect(),
            slacks_plus: sol.primal[n + m..].iter().map(|v| v.max(0.0)).collect(),
            projection: None,
            region: None,
            notes: Vec::new(),
        }),
    }
}

/// β*: the smallest mean relative move `(Σ t⁻/x + Σ t⁺/y) / (m + s)` that
/// brings the activity into the technology while staying dominated by it.
pub fn beta_star(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<ScoreReport> {
    reference.check(a)?;
    config.validate(a.m(), a.s())?;
    let (n, m, s) = (reference.n(), reference.m(), reference.s());
    let (x, y) = (a.inputs(), a.outputs());
    let nv = n + m + s;
    let w = 1.0 / (m + s) as f64;
    let mut obj = vec![0.0; nv];
    for i in 0..m {
        obj[n + i] = w / x[i];
    }
    for r in 0..s {
        obj[n + m + r] = w / y[r];
    }
    let mut lp = LinearProgram::new(Sense::Minimize, obj);
    for i in 0..m {
        let mut row = vec![0.0; nv];
        for j in 0..n {
            row[j] = reference.x(i, j);
        }
        row[n + i] = -1.0;
        lp.add_row(row, Relation::Le, x[i]);
    }
    for r in 0..s {
        let mut row = vec![0.0; nv];
        for j in 0..n {
            row[j] = reference.y(r, j);
        }
        row[n + m + r] = 1.0;
        lp.add_row(row, Relation::Ge, y[r]);
        lp.set_bounds(n + m + r, 0.0, (1.0 - config.tol.eps_pos) * y[r]);
    }
    if config.rts == Returns::Variable {
        let mut row = vec![0.0; nv];
        row[..n].iter_mut().for_each(|v| *v = 1.0);
        lp.add_row(row, Relation::Eq, 1.0);
    }
    let sol = solve_lp(&lp)?;
    if !sol.is_optimal() {
        return Err(DeaError::Solver(format!("additive super-efficiency {:?}", sol.status)));
    }
    let t_minus: Vec<f64> = sol.primal[n..n + m].iter().map(|v| v.max(0.0)).collect();
    let t_plus: Vec<f64> = sol.primal[n + m..].iter().map(|v| v.max(0.0)).collect();
    let projection = Activity::new(
        x.iter().zip(&t_minus).map(|(a, b)| a + b).collect(),
        y.iter().zip(&t_plus).map(|(a, b)| a - b).collect(),
    )
    .ok();
    Ok(ScoreReport {
        score: sol.objective_value.max(0.0),
        lambda: sol.primal[..n].to_vec(),
        slacks_minus: t_minus,
        slacks_plus: t_plus,
        projection,
        region: None,
        notes: Vec::new(),
    })
}
