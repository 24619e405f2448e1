//! Slacks-based DEA: SBM efficiency, super-efficiency, the CSBM and J-SBM
//! splices, composite scores over the dominated technology, and two-period
//! Malmquist indices.
//!
//! All scores are built from small dense LPs solved by [`lp::solve_lp`], a
//! deterministic dense simplex, so repeated runs are bitwise identical.

pub mod additive;
pub mod cc;
pub mod composite;
pub mod datasets;
pub mod error;
pub mod lp;
pub mod malmquist;
pub mod model;
pub mod optimize;
pub mod sbm;
pub mod technology;

pub use additive::{alpha_star, beta_star};
pub use cc::{linearize_sbm, LpKind};
pub use composite::{
    composite_scores, gamma, gamma_add, gamma_low, gamma_oriented, gamma_se, max_rho_pbar,
    max_rho_pbar_with, min_alpha_pbar, sigma_composite, CompositeScores, MaximinOptions,
    MaximinResult,
};
pub use error::{DeaError, Result};
pub use malmquist::{global_score, malmquist_index, Intermediates, MalmquistResult, PanelInput, ScoreKind};
pub use model::{
    is_dominated_by, Activity, Dominance, ModelConfig, Orientation, Region, RegionRule,
    ReferenceSet, Returns, ToleranceBundle,
};
pub use sbm::{
    csbm, delta_star, delta_star_core, jsbm, projection_rho, projection_rho_report, relaxed_phi,
    rho_star, ProjectionEfficiency, ScoreReport,
};
pub use technology::{classify_region, in_production_set, is_efficient};
