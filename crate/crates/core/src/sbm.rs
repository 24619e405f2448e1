//! SBM efficiency ρ*, super-efficiency δ*, the efficiency of the
//! super-efficiency projection, and the CSBM and J-SBM splices.

use crate::cc::{linearize_efficiency_at, linearize_sbm, CcProgram, LpKind};
use crate::error::{DeaError, Result};
use crate::lp::{lexicographic_slacks, solve_lp, LpSolution};
use crate::model::{Activity, ModelConfig, Orientation, ReferenceSet, Region, RegionRule, Returns};
use crate::technology::{classify_with_projection, is_efficient};

/// Relative tolerance for pinning the primary objective before picking
/// canonical slacks. Falls back to `eps_score` if the tight pin fails.
const PIN_TOL: f64 = 1e-11;

/// Relative inward moves tried when a point that lies in P by construction
/// tests as outside.
pub(crate) const INWARD_NUDGES: [f64; 4] = [0.0, 1e-10, 1e-9, 1e-8];

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub score: f64,
    pub lambda: Vec<f64>,
    /// Input slacks in input units.
    pub slacks_minus: Vec<f64>,
    /// Output slacks in output units.
    pub slacks_plus: Vec<f64>,
    pub projection: Option<Activity>,
    pub region: Option<Region>,
    pub notes: Vec<String>,
}

impl ScoreReport {
    fn trivial(score: f64, m: usize, s: usize, note: &str) -> Self {
        Self {
            score,
            lambda: Vec::new(),
            slacks_minus: vec![0.0; m],
            slacks_plus: vec![0.0; s],
            projection: None,
            region: None,
            notes: vec![note.to_string()],
        }
    }
}

/// Optimal value of the first solve and the canonical primal.
#[derive(Debug, Clone)]
pub(crate) struct Canonical {
    pub value: f64,
    pub primal: Vec<f64>,
    pub notes: Vec<String>,
}

/// Solves `prog` and re-solves for the minimal-total-slack optimum.
/// `Ok(None)` means the program is infeasible.
pub(crate) fn solve_canonical(prog: &CcProgram, eps_score: f64) -> Result<Option<Canonical>> {
    let first = solve_lp(&prog.lp)?;
    match first.status {
        crate::lp::LpStatus::Infeasible => return Ok(None),
        crate::lp::LpStatus::Unbounded => {
            return Err(DeaError::Solver("fractional program reported unbounded".into()))
        }
        crate::lp::LpStatus::Optimal => {}
    }
    let value = first.objective_value;
    let secondary = prog.slack_total();
    let mut notes = Vec::new();
    let chosen = match pinned(prog, value, &secondary, PIN_TOL) {
        Some(sol) => sol,
        None => match pinned(prog, value, &secondary, eps_score) {
            Some(sol) => {
                notes.push("canonical slacks used the loose objective pin".into());
                sol
            }
            None => {
                notes.push("canonical slack re-solve failed; first optimum kept".into());
                first
            }
        },
    };
    Ok(Some(Canonical {
        value,
        primal: chosen.primal,
        notes,
    }))
}

fn pinned(prog: &CcProgram, value: f64, secondary: &[f64], tol: f64) -> Option<LpSolution> {
    match lexicographic_slacks(&prog.lp, value, secondary, tol) {
        Ok(sol) if sol.is_optimal() => Some(sol),
        _ => None,
    }
}

fn check(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<()> {
    reference.check(a)?;
    config.validate(a.m(), a.s())
}

/// SBM efficiency ρ*. Activities outside the technology score 1.
pub fn rho_star(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<ScoreReport> {
    check(a, reference, config)?;
    let prog = linearize_sbm(LpKind::Efficiency, a, reference, config)?;
    let Some(c) = solve_canonical(&prog, config.tol.eps_score)? else {
        return Ok(ScoreReport::trivial(1.0, a.m(), a.s(), "outside P"));
    };
    let bm = prog.back_map(&c.primal)?;
    let target_in: Vec<f64> = a.inputs().iter().zip(&bm.slacks_minus).map(|(x, s)| x - s).collect();
    let target_out: Vec<f64> = a.outputs().iter().zip(&bm.slacks_plus).map(|(y, s)| y + s).collect();
    Ok(ScoreReport {
        score: c.value,
        lambda: bm.lambda,
        slacks_minus: clamp_nonneg(bm.slacks_minus),
        slacks_plus: clamp_nonneg(bm.slacks_plus),
        projection: Activity::new(target_in, target_out).ok(),
        region: None,
        notes: c.notes,
    })
}

/// Super-efficiency δ* with canonical slacks and projection, but no region.
pub fn delta_star_core(
    a: &Activity,
    reference: &ReferenceSet,
    config: &ModelConfig,
) -> Result<ScoreReport> {
    check(a, reference, config)?;
    let prog = linearize_sbm(LpKind::Superefficiency, a, reference, config)?;
    let Some(c) = solve_canonical(&prog, config.tol.eps_score)? else {
        if config.orientation != Orientation::NonOriented && config.rts == Returns::Variable {
            return Err(DeaError::InfeasibleOriented(format!(
                "{:?}-oriented super-efficiency has no feasible reference point",
                config.orientation
            )));
        }
        return Err(DeaError::Solver("super-efficiency program infeasible".into()));
    };
    let bm = prog.back_map(&c.primal)?;
    let t_minus = clamp_nonneg(bm.slacks_minus);
    let t_plus = clamp_nonneg(bm.slacks_plus);
    let proj_in: Vec<f64> = a.inputs().iter().zip(&t_minus).map(|(x, t)| x + t).collect();
    let proj_out: Vec<f64> = a.outputs().iter().zip(&t_plus).map(|(y, t)| y - t).collect();
    let projection = Activity::new(proj_in, proj_out)?;
    // δ* >= 1 holds exactly; tiny undershoot is LP noise.
    let score = if c.value < 1.0 && c.value > 1.0 - config.tol.eps_score { 1.0 } else { c.value };
    Ok(ScoreReport {
        score,
        lambda: bm.lambda,
        slacks_minus: t_minus,
        slacks_plus: t_plus,
        projection: Some(projection),
        region: None,
        notes: c.notes,
    })
}

/// Super-efficiency δ*, with the region under the projection rule.
pub fn delta_star(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<ScoreReport> {
    let mut report = delta_star_core(a, reference, config)?;
    let region = classify_with_projection(a, &report, reference, config, RegionRule::Projection)?;
    report.region = Some(region);
    Ok(report)
}

/// SBM efficiency of the super-efficiency projection with its slacks.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionEfficiency {
    /// ρ* of the projection, computed with the objective measured against the
    /// evaluated activity.
    pub value: f64,
    pub slacks_minus: Vec<f64>,
    pub slacks_plus: Vec<f64>,
    pub lambda: Vec<f64>,
    pub delta: ScoreReport,
}

pub fn projection_rho_report(
    a: &Activity,
    reference: &ReferenceSet,
    config: &ModelConfig,
) -> Result<ProjectionEfficiency> {
    let delta = delta_star_core(a, reference, config)?;
    projection_rho_from(a, delta, reference, config)
}

pub(crate) fn projection_rho_from(
    a: &Activity,
    delta: ScoreReport,
    reference: &ReferenceSet,
    config: &ModelConfig,
) -> Result<ProjectionEfficiency> {
    let proj = delta.projection.clone().expect("delta_star_core always sets a projection");
    // The projection lies on the boundary of P by construction; rounding can
    // put it a hair outside, so retry slightly inside before giving up.
    for (k, nudge) in INWARD_NUDGES.iter().enumerate() {
        let p = if *nudge == 0.0 { proj.clone() } else { proj.nudged_inward(*nudge) };
        let prog = linearize_efficiency_at(p.inputs(), p.outputs(), a.inputs(), a.outputs(), reference, config);
        let Some(mut c) = solve_canonical(&prog, config.tol.eps_score)? else {
            continue;
        };
        if k > 0 {
            c.notes.push(format!("projection evaluated {nudge:e} inside P"));
        }
        let bm = prog.back_map(&c.primal)?;
        let mut delta = delta;
        delta.notes.extend(c.notes);
        return Ok(ProjectionEfficiency {
            value: c.value.min(1.0),
            slacks_minus: clamp_nonneg(bm.slacks_minus),
            slacks_plus: clamp_nonneg(bm.slacks_plus),
            lambda: bm.lambda,
            delta,
        });
    }
    Err(DeaError::Solver("super-efficiency projection is not in P".into()))
}

/// ρ* of the canonical super-efficiency projection.
pub fn projection_rho(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<f64> {
    Ok(projection_rho_report(a, reference, config)?.value)
}

/// Continuous SBM: both slack families in one ratio.
pub fn csbm(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<f64> {
    let p = projection_rho_report(a, reference, config)?;
    Ok(csbm_from(a, &p, config))
}

pub(crate) fn csbm_from(a: &Activity, p: &ProjectionEfficiency, config: &ModelConfig) -> f64 {
    let (cin, cout) = config.priced_coeffs(a.m(), a.s());
    let num: f64 = 1.0
        - (0..a.m())
            .map(|i| cin[i] * (p.slacks_minus[i] - p.delta.slacks_minus[i]) / a.inputs()[i])
            .sum::<f64>();
    let den: f64 = 1.0
        + (0..a.s())
            .map(|r| cout[r] * (p.slacks_plus[r] - p.delta.slacks_plus[r]) / a.outputs()[r])
            .sum::<f64>();
    num / den
}

/// Optimum of the relaxed super-efficiency program (free slacks).
pub fn relaxed_phi(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<f64> {
    check(a, reference, config)?;
    let prog = linearize_sbm(LpKind::Relaxed, a, reference, config)?;
    let sol = solve_lp(&prog.lp)?;
    if !sol.is_optimal() {
        return Err(DeaError::Solver(format!("relaxed program {:?}", sol.status)));
    }
    Ok(sol.objective_value)
}

/// Three-region splice: ρ* on Region I, δ* on Region II and the relaxed
/// optimum on Region III (projection rule).
pub fn jsbm(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<f64> {
    check(a, reference, config)?;
    if !is_efficient(a, reference, config)? {
        return Ok(rho_star(a, reference, config)?.score);
    }
    let delta = delta_star_core(a, reference, config)?;
    match classify_with_projection(a, &delta, reference, config, RegionRule::Projection)? {
        Region::I => Ok(rho_star(a, reference, config)?.score),
        Region::II => Ok(delta.score),
        Region::III => relaxed_phi(a, reference, config),
    }
}

fn clamp_nonneg(mut v: Vec<f64>) -> Vec<f64> {
    v.iter_mut().for_each(|x| *x = x.max(0.0));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{six_unit, six_unit_loo, three_unit};
    use approx::assert_abs_diff_eq;

    fn act(x: &[f64], y: &[f64]) -> Activity {
        Activity::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn rho_of_a3_is_point_eight() {
        let r = rho_star(&act(&[50.0, 20.0], &[1.0]), &three_unit(), &ModelConfig::default()).unwrap();
        assert_abs_diff_eq!(r.score, 0.8, epsilon = 1e-9);
        assert_abs_diff_eq!(r.slacks_minus[0], 20.0, epsilon = 1e-7);
    }

    #[test]
    fn rho_outside_p_is_one() {
        let r = rho_star(&act(&[30.0, 10.0], &[1.0]), &three_unit(), &ModelConfig::default()).unwrap();
        assert_eq!(r.score, 1.0);
        assert!(r.lambda.is_empty());
    }

    #[test]
    fn delta_of_a1_and_inefficient() {
        let cfg = ModelConfig::default();
        let d = delta_star(&act(&[30.0, 10.0], &[1.0]), &three_unit(), &cfg).unwrap();
        assert_abs_diff_eq!(d.score, 1.5, epsilon = 1e-7);
        assert_eq!(d.region, Some(Region::II));
        let d = delta_star(&act(&[50.0, 20.0], &[1.0]), &three_unit(), &cfg).unwrap();
        assert_abs_diff_eq!(d.score, 1.0, epsilon = 1e-12);
        assert_eq!(d.region, Some(Region::I));
    }

    #[test]
    fn d1_superefficiency_projection() {
        let (set, a) = six_unit_loo(0);
        let d = delta_star_core(&a, &set, &ModelConfig::default()).unwrap();
        assert_abs_diff_eq!(d.score, 1.0116, epsilon = 1e-4);
        assert_abs_diff_eq!(d.slacks_minus[1], 27.8784, epsilon = 1e-3);
        let p = projection_rho_report(&a, &set, &ModelConfig::default()).unwrap();
        assert_abs_diff_eq!(p.value, 0.7299, epsilon = 1e-4);
        assert_abs_diff_eq!(csbm_from(&a, &p, &ModelConfig::default()), 0.7397, epsilon = 1e-4);
    }

    #[test]
    fn d1_relaxed_and_jsbm() {
        let (set, a) = six_unit_loo(0);
        let cfg = ModelConfig::default();
        assert_abs_diff_eq!(relaxed_phi(&a, &set, &cfg).unwrap(), 0.4990, epsilon = 1e-4);
        assert_abs_diff_eq!(jsbm(&a, &set, &cfg).unwrap(), 0.4990, epsilon = 1e-4);
    }

    #[test]
    fn member_scores() {
        let set = six_unit();
        let cfg = ModelConfig::default();
        for j in 0..set.n() {
            let a = set.activity(j);
            assert_abs_diff_eq!(rho_star(a, &set, &cfg).unwrap().score, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn csbm_equals_rho_when_inefficient() {
        let a = act(&[50.0, 20.0], &[1.0]);
        let cfg = ModelConfig::default();
        assert_abs_diff_eq!(csbm(&a, &three_unit(), &cfg).unwrap(), 0.8, epsilon = 1e-9);
        assert_abs_diff_eq!(jsbm(&a, &three_unit(), &cfg).unwrap(), 0.8, epsilon = 1e-9);
    }

    #[test]
    fn oriented_scores() {
        let a = act(&[50.0, 20.0], &[1.0]);
        let input = ModelConfig::default().with_orientation(Orientation::Input);
        // Input slack 20 on x1 only: 1 - 20/100.
        assert_abs_diff_eq!(rho_star(&a, &three_unit(), &input).unwrap().score, 0.8, epsilon = 1e-9);
        let output = ModelConfig::default().with_orientation(Orientation::Output);
        let r = rho_star(&a, &three_unit(), &output).unwrap().score;
        assert!(r > 0.0 && r <= 1.0);
        let d = delta_star_core(&act(&[30.0, 10.0], &[1.0]), &three_unit(), &input).unwrap();
        assert!(d.score >= 1.0);
        assert!(d.slacks_plus.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn badly_scaled_data_solves() {
        // Units in the thousands next to unit-free ratios used to break the
        // super-efficiency LP.
        let set = ReferenceSet::from_activities(vec![
            act(&[2038.3928228108846, 1179.5343538589605], &[539.6496370773178, 1285.763304371714, 589.1692893370563]),
            act(&[679.4642742702949, 1818.448795532564], &[138.04990715931388, 1714.3510724956186, 1325.6309010083767]),
            act(&[2000.644807573646, 1376.1234128354538], &[602.3995948770059, 857.1755362478093, 1423.8257825645526]),
        ])
        .unwrap();
        let a = act(&[2076.1408380481234, 2359.068707717921], &[250.99983119875247, 1780.2876522069885, 2945.846446685281]);
        let cfg = ModelConfig::default();
        let d = delta_star(&a, &set, &cfg).unwrap();
        assert!(d.score >= 1.0);
        // Same data in other units gives the same score.
        let k = [1e-3, 10.0];
        let rescale = |v: &Activity| act(&[v.inputs()[0] * k[0], v.inputs()[1] * k[1]], v.outputs());
        let scaled = ReferenceSet::from_activities(set.activities().iter().map(rescale).collect()).unwrap();
        let d2 = delta_star(&rescale(&a), &scaled, &cfg).unwrap();
        assert_abs_diff_eq!(d.score, d2.score, epsilon = 1e-9);
    }
}
