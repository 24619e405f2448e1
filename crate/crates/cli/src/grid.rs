//! `grid`: base-2 log of a score over a rectangle of two-input activities.

use std::str::FromStr;

use compsbm::{
    composite_scores, csbm, global_score, jsbm, Activity, DeaError, MaximinOptions, ModelConfig, ReferenceSet,
    ScoreKind,
};
use rayon::prelude::*;

use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScore {
    /// ρ* inside the technology, δ* outside.
    Splice,
    Jsbm,
    Csbm,
    Gamma,
}

impl FromStr for GridScore {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "splice" => Ok(Self::Splice),
            "jsbm" => Ok(Self::Jsbm),
            "csbm" => Ok(Self::Csbm),
            "gamma" => Ok(Self::Gamma),
            other => Err(format!("unknown grid score `{other}` (expected splice, jsbm, csbm or gamma)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridSpec {
    pub score: GridScore,
    pub x1: (f64, f64),
    pub x2: (f64, f64),
    /// Nodes per axis.
    pub steps: usize,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridNode {
    pub x1: f64,
    pub x2: f64,
    /// NaN when scoring failed.
    pub log2score: f64,
    pub status: String,
}

fn axis(range: (f64, f64), steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![range.0];
    }
    (0..steps)
        .map(|k| range.0 + (range.1 - range.0) * k as f64 / (steps - 1) as f64)
        .collect()
}

pub fn node_score(score: GridScore, a: &Activity, set: &ReferenceSet, cfg: &ModelConfig, opts: &MaximinOptions) -> compsbm::Result<f64> {
    match score {
        GridScore::Splice => global_score(a, set, ScoreKind::SbmGlobal, cfg),
        GridScore::Jsbm => jsbm(a, set, cfg),
        GridScore::Csbm => csbm(a, set, cfg),
        GridScore::Gamma => Ok(composite_scores(a, set, cfg, opts)?.gamma),
    }
}

/// Nodes in x1-major order. Nodes never join the reference set.
pub fn run_grid(set: &ReferenceSet, spec: &GridSpec, cfg: &ModelConfig, opts: &MaximinOptions) -> Result<Vec<GridNode>, DeaError> {
    if set.m() != 2 || set.s() != 1 {
        return Err(DeaError::Dimension(format!(
            "grid needs exactly 2 inputs and 1 output, dataset has {} and {}",
            set.m(),
            set.s()
        )));
    }
    if spec.steps == 0 {
        return Err(DeaError::Config("--steps must be at least 1".into()));
    }
    for (lo, hi) in [spec.x1, spec.x2] {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(DeaError::Config(format!("grid range [{lo}, {hi}] must be positive and ordered")));
        }
    }
    if !(spec.y > 0.0 && spec.y.is_finite()) {
        return Err(DeaError::Config(format!("--y must be positive, got {}", spec.y)));
    }
    cfg.validate(2, 1)?;
    let nodes: Vec<(f64, f64)> = axis(spec.x1, spec.steps)
        .into_iter()
        .flat_map(|a| axis(spec.x2, spec.steps).into_iter().map(move |b| (a, b)))
        .collect();
    Ok(nodes
        .par_iter()
        .map(|&(x1, x2)| {
            let res = Activity::new(vec![x1, x2], vec![spec.y]).and_then(|a| node_score(spec.score, &a, set, cfg, opts));
            match res {
                Ok(v) => GridNode {
                    x1,
                    x2,
                    log2score: v.log2(),
                    status: "ok".into(),
                },
                Err(e) => GridNode {
                    x1,
                    x2,
                    log2score: f64::NAN,
                    status: format!("error: {e}"),
                },
            }
        })
        .collect())
}

pub fn to_table(nodes: &[GridNode]) -> Table {
    Table {
        header: ["x1", "x2", "log2score", "status"].map(String::from).to_vec(),
        rows: nodes
            .iter()
            .map(|n| {
                vec![
                    Cell::num(Some(n.x1)),
                    Cell::num(Some(n.x2)),
                    Cell::num(Some(n.log2score)),
                    Cell::Text(n.status.clone()),
                ]
            })
            .collect(),
    }
}
