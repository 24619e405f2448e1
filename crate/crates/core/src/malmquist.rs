//! Two-period Malmquist index under the exclusive scheme.
//!
//! Within-period scores use the period frontier without the evaluated DMU;
//! cross-period scores use the full other-period frontier, evaluated DMU
//! included.

use rayon::prelude::*;

use crate::composite::{composite_scores, MaximinOptions};
use crate::error::{DeaError, Result};
use crate::model::{Activity, ModelConfig, ReferenceSet};
use crate::sbm::{delta_star_core, rho_star};
use crate::technology::is_efficient;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    /// ρ* for inefficient activities, δ* otherwise.
    SbmGlobal,
    /// γ.
    CompSbm,
}

/// A global (efficiency plus super-efficiency) score of `a`.
pub fn global_score(a: &Activity, reference: &ReferenceSet, kind: ScoreKind, config: &ModelConfig) -> Result<f64> {
    match kind {
        ScoreKind::SbmGlobal => {
            if is_efficient(a, reference, config)? {
                Ok(delta_star_core(a, reference, config)?.score)
            } else {
                Ok(rho_star(a, reference, config)?.score)
            }
        }
        ScoreKind::CompSbm => Ok(composite_scores(a, reference, config, &MaximinOptions::default())?.gamma),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelInput {
    pub period1: ReferenceSet,
    pub period2: ReferenceSet,
    pub evaluated: String,
    pub score_kind: ScoreKind,
}

impl PanelInput {
    pub fn new(period1: ReferenceSet, period2: ReferenceSet, evaluated: impl Into<String>, score_kind: ScoreKind) -> Result<Self> {
        if period1.names() != period2.names() {
            return Err(DeaError::InvalidData("periods must list the same DMUs in the same order".into()));
        }
        if period1.m() != period2.m() || period1.s() != period2.s() {
            return Err(DeaError::Dimension(format!(
                "period shapes differ: ({}, {}) vs ({}, {})",
                period1.m(),
                period1.s(),
                period2.m(),
                period2.s()
            )));
        }
        let evaluated = evaluated.into();
        if period1.index_of(&evaluated).is_none() {
            return Err(DeaError::UnknownDmu(evaluated));
        }
        Ok(Self {
            period1,
            period2,
            evaluated,
            score_kind,
        })
    }
}

/// `E^t(A^u)`: score of the period-`u` activity against the period-`t`
/// frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intermediates {
    pub e1_a1: f64,
    pub e2_a2: f64,
    pub e2_a1: f64,
    pub e1_a2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MalmquistResult {
    pub catch_up: f64,
    pub frontier_shift: f64,
    pub index: f64,
    pub intermediates: Intermediates,
}

pub fn malmquist_index(panel: &PanelInput, config: &ModelConfig) -> Result<MalmquistResult> {
    let j = panel
        .period1
        .index_of(&panel.evaluated)
        .ok_or_else(|| DeaError::UnknownDmu(panel.evaluated.clone()))?;
    let a1 = panel.period1.activity(j);
    let a2 = panel.period2.activity(j);
    let kind = panel.score_kind;
    let own1 = panel.period1.without(j)?;
    let own2 = panel.period2.without(j)?;

    let jobs = [(a1, &own1), (a2, &own2), (a1, &panel.period2), (a2, &panel.period1)];
    let v = jobs
        .par_iter()
        .map(|(a, set)| global_score(a, set, kind, config))
        .collect::<Result<Vec<f64>>>()?;
    let e = Intermediates {
        e1_a1: v[0],
        e2_a2: v[1],
        e2_a1: v[2],
        e1_a2: v[3],
    };
    for (label, v) in [("E1(A1)", e.e1_a1), ("E2(A2)", e.e2_a2), ("E2(A1)", e.e2_a1), ("E1(A2)", e.e1_a2)] {
        if v < config.tol.eps_score {
            return Err(DeaError::DivisionByNearZero {
                context: label.into(),
                value: v,
            });
        }
    }
    let catch_up = e.e2_a2 / e.e1_a1;
    let frontier_shift = ((e.e1_a1 / e.e2_a1) * (e.e1_a2 / e.e2_a2)).sqrt();
    Ok(MalmquistResult {
        catch_up,
        frontier_shift,
        index: catch_up * frontier_shift,
        intermediates: e,
    })
}
