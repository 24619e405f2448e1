//! Membership in the production possibility set, the efficiency test and
//! the three-region classification.

use crate::additive::alpha_at;
use crate::composite::max_rho_pbar;
use crate::error::Result;
use crate::lp::{solve_lp_with, LinearProgram, Relation, Sense, SimplexOptions};
use crate::model::{Activity, ModelConfig, ReferenceSet, Region, RegionRule, Returns};
use crate::sbm::{delta_star_core, ScoreReport, INWARD_NUDGES};

/// Whether some `λ >= 0` (summing to one under VRS) has `Xλ <= x`, `Yλ >= y`.
pub fn in_production_set(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<bool> {
    reference.check(a)?;
    let n = reference.n();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![0.0; n]);
    for i in 0..reference.m() {
        let row = (0..n).map(|j| reference.x(i, j)).collect();
        lp.add_row(row, Relation::Le, a.inputs()[i]);
    }
    for r in 0..reference.s() {
        let row = (0..n).map(|j| reference.y(r, j)).collect();
        lp.add_row(row, Relation::Ge, a.outputs()[r]);
    }
    if config.rts == Returns::Variable {
        lp.add_row(vec![1.0; n], Relation::Eq, 1.0);
    }
    let opts = SimplexOptions {
        eps_feas: config.tol.eps_feas,
        ..SimplexOptions::default()
    };
    Ok(solve_lp_with(&lp, &opts)?.is_optimal())
}

/// Efficient means outside P, or inside with α* <= eps_zero.
pub fn is_efficient(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<bool> {
    reference.check(a)?;
    let alpha = alpha_at(a.inputs(), a.outputs(), reference, config.rts)?;
    Ok(alpha.score <= config.tol.eps_zero)
}

/// Efficiency test for a point known to lie in P.
fn projection_is_efficient(p: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<bool> {
    for nudge in INWARD_NUDGES {
        let q = if nudge == 0.0 { p.clone() } else { p.nudged_inward(nudge) };
        let alpha = alpha_at(q.inputs(), q.outputs(), reference, config.rts)?;
        if alpha.notes.iter().any(|n| n == "outside P") {
            continue;
        }
        return Ok(alpha.score <= config.tol.eps_zero);
    }
    Ok(true)
}

pub fn classify_region(
    a: &Activity,
    reference: &ReferenceSet,
    config: &ModelConfig,
    rule: RegionRule,
) -> Result<Region> {
    if !is_efficient(a, reference, config)? {
        return Ok(Region::I);
    }
    let delta = delta_star_core(a, reference, config)?;
    classify_with_projection(a, &delta, reference, config, rule)
}

/// Classification reusing an already computed super-efficiency report.
pub(crate) fn classify_with_projection(
    a: &Activity,
    delta: &ScoreReport,
    reference: &ReferenceSet,
    config: &ModelConfig,
    rule: RegionRule,
) -> Result<Region> {
    if !is_efficient(a, reference, config)? {
        return Ok(Region::I);
    }
    let efficient_projection = match rule {
        RegionRule::Projection => match &delta.projection {
            Some(p) => projection_is_efficient(p, reference, config)?,
            None => true,
        },
        RegionRule::Pbar => {
            let best = max_rho_pbar(a, reference, config)?;
            best.value >= 1.0 - config.tol.eps_score
        }
    };
    Ok(if efficient_projection { Region::II } else { Region::III })
}
