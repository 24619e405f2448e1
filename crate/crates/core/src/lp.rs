//! Dense two-phase simplex solver.
//!
//! Problems here are desk scale (a few dozen variables and rows), so the
//! solver keeps a full tableau. Columns are rescaled by powers of two and
//! rows to unit size; pivoting follows the steepest reduced cost with a
//! fallback to Bland's rule when progress stalls. The same input always
//! produces the same sequence of pivots and therefore bitwise-identical
//! primal vectors.

use crate::error::{DeaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program over `objective.len()` variables.
///
/// Every variable starts with bounds `[0, +inf)`. Use [`LinearProgram::set_free`]
/// or [`LinearProgram::set_bounds`] to change that.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            rows: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = (lower, upper);
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.bounds[var] = (f64::NEG_INFINITY, f64::INFINITY);
        self
    }

    pub fn is_free(&self, var: usize) -> bool {
        let (lo, hi) = self.bounds[var];
        lo == f64::NEG_INFINITY && hi == f64::INFINITY
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(DeaError::Dimension(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        for (k, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(DeaError::Dimension(format!(
                    "row {k} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(DeaError::InvalidData(format!("row {k} is not finite")));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(DeaError::InvalidData("objective is not finite".into()));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
            {
                return Err(DeaError::InvalidData(format!(
                    "variable {j} has invalid bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    /// Objective value at `x`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest row or bound violation at `x`, each scaled by the magnitude of
    /// the terms involved.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for row in &self.rows {
            let lhs = dot(&row.coeffs, x);
            let scale = 1.0
                + row.rhs.abs()
                + row
                    .coeffs
                    .iter()
                    .zip(x)
                    .map(|(a, v)| (a * v).abs())
                    .fold(0.0, f64::max);
            let v = match row.relation {
                Relation::Le => (lhs - row.rhs).max(0.0),
                Relation::Ge => (row.rhs - lhs).max(0.0),
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v / scale);
        }
        for (&(lo, hi), &v) in self.bounds.iter().zip(x) {
            worst = worst.max((lo - v).max(0.0) / (1.0 + v.abs()));
            worst = worst.max((v - hi).max(0.0) / (1.0 + v.abs()));
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective_value: f64,
    pub primal: Vec<f64>,
    /// Row multipliers: the rate of change of the optimum per unit increase of
    /// each row's right-hand side.
    pub duals: Option<Vec<f64>>,
    pub pivots: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, n: usize, pivots: usize) -> Self {
        let objective_value = match status {
            LpStatus::Infeasible => f64::NAN,
            _ => f64::NEG_INFINITY,
        };
        Self {
            status,
            objective_value,
            primal: vec![f64::NAN; n],
            duals: None,
            pivots,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Phase-one residual above which the problem is declared infeasible.
    pub eps_feas: f64,
    /// Smallest magnitude accepted as a pivot element.
    pub pivot_tol: f64,
    /// Reduced-cost threshold for optimality, relative to the largest
    /// reduced cost.
    pub cost_tol: f64,
    pub max_pivots: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            eps_feas: 1e-9,
            pivot_tol: 1e-8,
            cost_tol: 1e-11,
            max_pivots: 50_000,
        }
    }
}

/// Solves `lp` with default options.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(lp, &SimplexOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution> {
    lp.validate()?;
    let scale = column_scales(lp);
    let mut sol = solve_scaled(&scale_columns(lp, &scale), opts)?;
    for (v, c) in sol.primal.iter_mut().zip(&scale) {
        *v *= c;
    }
    Ok(sol)
}

/// Power-of-two column factors from a few rounds of geometric-mean scaling.
/// Variables measured in very different units (a slack in thousands next to
/// a ratio near one) otherwise leave tiny entries that the tableau cannot
/// tell from rounding noise. Powers of two keep the rescaling exact.
fn column_scales(lp: &LinearProgram) -> Vec<f64> {
    let n = lp.num_vars();
    let mut col = vec![1.0; n];
    let mut row = vec![1.0; lp.rows.len()];
    let spread = |vals: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = vals.filter(|v| *v > 0.0).fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if hi > 0.0 { 1.0 / (lo * hi).sqrt() } else { 1.0 }
    };
    for _ in 0..4 {
        for (i, r) in lp.rows.iter().enumerate() {
            row[i] = spread(&mut r.coeffs.iter().zip(&col).map(|(a, c)| a.abs() * c));
        }
        for j in 0..n {
            col[j] = spread(&mut lp.rows.iter().zip(&row).map(|(r, f)| r.coeffs[j].abs() * f));
        }
    }
    col.iter().map(|c| c.log2().round().exp2()).collect()
}

/// The same problem in variables `x / scale`.
fn scale_columns(lp: &LinearProgram, scale: &[f64]) -> LinearProgram {
    let mut out = lp.clone();
    for (o, c) in out.objective.iter_mut().zip(scale) {
        *o *= c;
    }
    for r in &mut out.rows {
        for (a, c) in r.coeffs.iter_mut().zip(scale) {
            *a *= c;
        }
    }
    for (b, c) in out.bounds.iter_mut().zip(scale) {
        *b = (b.0 / c, b.1 / c);
    }
    out
}

fn solve_scaled(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution> {
    let std = StandardForm::build(lp);
    let mut tab = Tableau::new(&std);
    let n = lp.num_vars();

    // Phase one: minimize the sum of artificials.
    let mut cost1 = vec![0.0; tab.width - 1];
    for c in tab.art_start..tab.width - 1 {
        cost1[c] = 1.0;
    }
    let allow_all = tab.width - 1;
    tab.set_costs(&cost1);
    let scale_b = 1.0 + std.rhs.iter().map(|b| b.abs()).fold(0.0, f64::max);
    match tab.run(allow_all, true, opts)? {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => {
            return Err(DeaError::Solver("phase one reported unbounded".into()));
        }
    }
    // A long pivot sequence can strand phase one above zero on rounding
    // alone; retry from a freshly computed tableau before giving up.
    let mut retries = 0;
    while tab.objective_value() > opts.eps_feas * scale_b && retries < 2 && tab.rebuild(&cost1) {
        retries += 1;
        tab.run(allow_all, true, opts)?;
    }
    if tab.objective_value() > opts.eps_feas * scale_b {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, n, tab.pivots));
    }
    tab.drive_out_artificials(opts);

    // Phase two: artificial columns may not re-enter.
    tab.set_costs(&std.cost);
    match tab.run(tab.art_start, false, opts)? {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => {
            return Ok(LpSolution::without_point(LpStatus::Unbounded, n, tab.pivots));
        }
    }

    let clamped = |xs: &[f64]| {
        let mut p = std.recover(xs);
        for (v, &(lo, hi)) in p.iter_mut().zip(&lp.bounds) {
            *v = v.clamp(lo, hi);
        }
        p
    };
    let mut primal = clamped(&tab.basic_values());
    let mut residual = lp.max_violation(&primal);
    let mut duals = tab.duals(&std, lp.sense);
    // The tableau accumulates rounding over many pivots; re-solving the final
    // basis against the original columns usually recovers full accuracy.
    if let Some((xs, y)) = tab.refactor(&std.cost) {
        let refined = clamped(&xs);
        let r = lp.max_violation(&refined);
        if r <= residual {
            primal = refined;
            residual = r;
            duals = tab.duals_from(&y, &std, lp.sense);
        }
    }
    if residual > 1e3 * opts.eps_feas.max(1e-9) {
        return Err(DeaError::Solver(format!(
            "numerical breakdown: residual {residual:e} after {} pivots",
            tab.pivots
        )));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: lp.evaluate(&primal),
        primal,
        duals: Some(duals),
        pivots: tab.pivots,
    })
}

/// Re-solves `lp` with its objective pinned to `optimum` (within `tol`) and
/// `secondary` minimized over that optimal face.
pub fn lexicographic_slacks(
    lp: &LinearProgram,
    optimum: f64,
    secondary: &[f64],
    tol: f64,
) -> Result<LpSolution> {
    if secondary.len() != lp.num_vars() {
        return Err(DeaError::Dimension(format!(
            "secondary objective has {} coefficients, expected {}",
            secondary.len(),
            lp.num_vars()
        )));
    }
    let mut pinned = lp.clone();
    let slack = tol * optimum.abs().max(1.0);
    match lp.sense {
        Sense::Minimize => pinned.add_row(lp.objective.clone(), Relation::Le, optimum + slack),
        Sense::Maximize => pinned.add_row(lp.objective.clone(), Relation::Ge, optimum - slack),
    };
    pinned.sense = Sense::Minimize;
    pinned.objective = secondary.to_vec();
    let mut sol = solve_lp(&pinned)?;
    if sol.is_optimal() {
        sol.objective_value = lp.evaluate(&sol.primal);
        if let Some(d) = sol.duals.as_mut() {
            d.truncate(lp.rows.len());
        }
    }
    Ok(sol)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = lo + x'
    Shift { col: usize, lo: f64 },
    /// x = hi - x'
    Mirror { col: usize, hi: f64 },
    /// x = x⁺ - x⁻
    Split { pos: usize, neg: usize },
}

/// `A x (rel) b` with `x >= 0` and `b >= 0`.
struct StandardForm {
    ncols: usize,
    cost: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rels: Vec<Relation>,
    rhs: Vec<f64>,
    /// Sign flip and scaling of each row, as applied to its dual.
    row_sign: Vec<f64>,
    n_orig_rows: usize,
    maps: Vec<VarMap>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut maps = Vec::with_capacity(lp.num_vars());
        let mut ncols = 0usize;
        let mut extra: Vec<(usize, f64)> = Vec::new();
        for &(lo, hi) in &lp.bounds {
            if lo.is_finite() {
                maps.push(VarMap::Shift { col: ncols, lo });
                if hi.is_finite() {
                    extra.push((ncols, hi - lo));
                }
                ncols += 1;
            } else if hi.is_finite() {
                maps.push(VarMap::Mirror { col: ncols, hi });
                ncols += 1;
            } else {
                maps.push(VarMap::Split {
                    pos: ncols,
                    neg: ncols + 1,
                });
                ncols += 2;
            }
        }

        let obj_sign = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut cost = vec![0.0; ncols];
        for (j, map) in maps.iter().enumerate() {
            let c = obj_sign * lp.objective[j];
            match *map {
                VarMap::Shift { col, .. } => cost[col] += c,
                VarMap::Mirror { col, .. } => cost[col] -= c,
                VarMap::Split { pos, neg } => {
                    cost[pos] += c;
                    cost[neg] -= c;
                }
            }
        }

        let mut rows = Vec::new();
        let mut rels = Vec::new();
        let mut rhs = Vec::new();
        let mut row_sign = Vec::new();
        for row in &lp.rows {
            let mut a = vec![0.0; ncols];
            let mut b = row.rhs;
            for (j, map) in maps.iter().enumerate() {
                let c = row.coeffs[j];
                if c == 0.0 {
                    continue;
                }
                match *map {
                    VarMap::Shift { col, lo } => {
                        a[col] += c;
                        b -= c * lo;
                    }
                    VarMap::Mirror { col, hi } => {
                        a[col] -= c;
                        b -= c * hi;
                    }
                    VarMap::Split { pos, neg } => {
                        a[pos] += c;
                        a[neg] -= c;
                    }
                }
            }
            let (a, rel, b, sign) = normalize_row(a, row.relation, b);
            rows.push(a);
            rels.push(rel);
            rhs.push(b);
            row_sign.push(sign);
        }
        let n_orig_rows = rows.len();
        for (col, width) in extra {
            let mut a = vec![0.0; ncols];
            a[col] = 1.0;
            let (a, rel, b, sign) = normalize_row(a, Relation::Le, width);
            rows.push(a);
            rels.push(rel);
            rhs.push(b);
            row_sign.push(sign);
        }
        Self {
            ncols,
            cost,
            rows,
            rels,
            rhs,
            row_sign,
            n_orig_rows,
            maps,
        }
    }

    fn recover(&self, xs: &[f64]) -> Vec<f64> {
        self.maps
            .iter()
            .map(|map| match *map {
                VarMap::Shift { col, lo } => lo + xs[col],
                VarMap::Mirror { col, hi } => hi - xs[col],
                VarMap::Split { pos, neg } => xs[pos] - xs[neg],
            })
            .collect()
    }
}

/// Flips the row so `b >= 0` and scales it to unit max coefficient. The
/// returned factor maps the transformed row's dual back to the original.
fn normalize_row(mut a: Vec<f64>, rel: Relation, b: f64) -> (Vec<f64>, Relation, f64, f64) {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let sign = if b < 0.0 { -1.0 } else { 1.0 };
    a.iter_mut().for_each(|v| *v *= sign / scale);
    let rel = match (rel, sign < 0.0) {
        (Relation::Le, true) => Relation::Ge,
        (Relation::Ge, true) => Relation::Le,
        (r, _) => r,
    };
    (a, rel, sign * b / scale, sign / scale)
}

/// Consecutive degenerate pivots after which entering columns follow
/// Bland's rule, which cannot cycle.
const BLAND_AFTER: usize = 20;

/// Primal infeasibility tolerated per row by the ratio test.
const HARRIS_TOL: f64 = 1e-9;

enum RunOutcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    nrows: usize,
    width: usize,
    a: Vec<f64>,
    /// The initial tableau, kept for refactoring the final basis.
    orig: Vec<f64>,
    /// Reduced costs; the last entry holds minus the objective value.
    d: Vec<f64>,
    basis: Vec<usize>,
    /// Column that formed the identity for each row in the initial basis.
    init_col: Vec<usize>,
    art_start: usize,
    pivots: usize,
}

impl Tableau {
    fn new(std: &StandardForm) -> Self {
        let nrows = std.rows.len();
        let n_slack = std
            .rels
            .iter()
            .filter(|r| !matches!(r, Relation::Eq))
            .count();
        let n_art = std
            .rels
            .iter()
            .filter(|r| !matches!(r, Relation::Le))
            .count();
        let art_start = std.ncols + n_slack;
        let width = art_start + n_art + 1;
        let mut a = vec![0.0; nrows * width];
        let mut basis = vec![0; nrows];
        let mut init_col = vec![0; nrows];
        let mut next_slack = std.ncols;
        let mut next_art = art_start;
        for i in 0..nrows {
            let row = &mut a[i * width..(i + 1) * width];
            row[..std.ncols].copy_from_slice(&std.rows[i]);
            row[width - 1] = std.rhs[i];
            match std.rels[i] {
                Relation::Le => {
                    row[next_slack] = 1.0;
                    basis[i] = next_slack;
                    init_col[i] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_art] = 1.0;
                    basis[i] = next_art;
                    init_col[i] = next_art;
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = 1.0;
                    basis[i] = next_art;
                    init_col[i] = next_art;
                    next_art += 1;
                }
            }
        }
        Self {
            nrows,
            width,
            orig: a.clone(),
            a,
            d: vec![0.0; width],
            basis,
            init_col,
            art_start,
            pivots: 0,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.width + j]
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let w = self.width;
        self.d.iter_mut().for_each(|v| *v = 0.0);
        self.d[..cost.len()].copy_from_slice(cost);
        for i in 0..self.nrows {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                let row = &self.a[i * w..(i + 1) * w];
                for (dj, aij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * aij;
                }
            }
        }
    }

    fn objective_value(&self) -> f64 {
        -self.d[self.width - 1]
    }

    /// Entering column: the most negative reduced cost, switching to Bland's
    /// lowest-index rule during long degenerate stretches. Ratio-test ties go
    /// to the lowest-index basic variable.
    ///
    /// `bounded` says the objective cannot decrease without limit (phase one),
    /// so a column with no blocking row only reflects rounding and is passed
    /// over. In phase two that happens only for reduced costs at noise level.
    fn run(&mut self, allowed: usize, bounded: bool, opts: &SimplexOptions) -> Result<RunOutcome> {
        let rhs = self.width - 1;
        let mut degenerate_run = 0usize;
        loop {
            let d_scale = 1.0 + self.d[..allowed].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let mut pick = None;
            let d_tol = opts.cost_tol * d_scale;
            let mut candidates: Vec<usize> = (0..allowed).filter(|&j| self.d[j] < -d_tol).collect();
            if degenerate_run < BLAND_AFTER {
                // Steepest reduced cost; stable sort keeps index order on ties.
                candidates.sort_by(|&i, &j| self.d[i].total_cmp(&self.d[j]));
            }
            for q in candidates {
                let col_max = (0..self.nrows).fold(0.0f64, |m, i| m.max(self.at(i, q).abs()));
                let tol = opts.pivot_tol.max(1e-9 * col_max);
                let rows: Vec<(usize, f64, f64)> = (0..self.nrows)
                    .filter_map(|i| {
                        let aiq = self.at(i, q);
                        (aiq > tol).then(|| (i, self.at(i, rhs).max(0.0) / aiq, aiq))
                    })
                    .collect();
                if !rows.is_empty() {
                    pick = Some((q, rows));
                    break;
                }
                if !bounded && self.d[q] < -1e-9 * d_scale {
                    return Ok(RunOutcome::Unbounded);
                }
            }
            let Some((q, rows)) = pick else {
                return Ok(RunOutcome::Optimal);
            };
            // Harris-style screen: among rows blocking within a tiny
            // infeasibility, drop pivots far below the largest one. Then the
            // smallest ratio, ties to the lowest basic index (Bland).
            let bound = rows
                .iter()
                .map(|&(i, _, aiq)| (self.at(i, rhs).max(0.0) + HARRIS_TOL) / aiq)
                .fold(f64::INFINITY, f64::min);
            let big = rows.iter().filter(|r| r.1 <= bound).fold(0.0f64, |m, r| m.max(r.2));
            let ok: Vec<&(usize, f64, f64)> = rows.iter().filter(|r| r.1 <= bound && r.2 >= 1e-3 * big).collect();
            let min_ratio = ok.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
            let p = ok
                .iter()
                .filter(|r| r.1 - min_ratio <= 1e-12 * (1.0 + min_ratio))
                .min_by_key(|r| self.basis[r.0])
                .expect("the largest screened pivot qualifies")
                .0;
            if min_ratio <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(p, q);
            if self.pivots > opts.max_pivots {
                return Err(DeaError::Solver(format!(
                    "pivot limit {} exceeded",
                    opts.max_pivots
                )));
            }
        }
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let w = self.width;
        let inv = 1.0 / self.a[p * w + q];
        for v in &mut self.a[p * w..(p + 1) * w] {
            *v *= inv;
        }
        self.a[p * w + q] = 1.0;
        let (before, rest) = self.a.split_at_mut(p * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[q];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[q] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (v, pv) in self.d.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            self.d[q] = 0.0;
        }
        self.basis[p] = q;
        self.pivots += 1;
    }

    fn drive_out_artificials(&mut self, opts: &SimplexOptions) {
        for i in 0..self.nrows {
            if self.basis[i] < self.art_start {
                continue;
            }
            let entering = (0..self.art_start).find(|&j| self.at(i, j).abs() > opts.pivot_tol * 1e3);
            match entering {
                Some(q) => self.pivot(i, q),
                None => {
                    // Redundant row.
                    let w = self.width;
                    for v in &mut self.a[i * w..i * w + self.art_start] {
                        *v = 0.0;
                    }
                }
            }
        }
    }

    fn basic_values(&self) -> Vec<f64> {
        let mut xs = vec![0.0; self.width - 1];
        for i in 0..self.nrows {
            xs[self.basis[i]] = self.at(i, self.width - 1).max(0.0);
        }
        xs
    }

    /// Basic solution and row prices of the current basis, computed afresh
    /// from the original columns. `None` if the basis matrix is singular.
    /// Recomputes the tableau for the current basis from the original rows,
    /// discarding accumulated rounding. False if the basis looks singular.
    fn rebuild(&mut self, cost: &[f64]) -> bool {
        let (k, w) = (self.nrows, self.width);
        let cols = self.basis.clone();
        let pivots = self.pivots;
        self.a.copy_from_slice(&self.orig);
        let mut free: Vec<usize> = (0..k).collect();
        for &j in &cols {
            let Some(pos) = (0..free.len()).max_by(|&u, &v| self.at(free[u], j).abs().total_cmp(&self.at(free[v], j).abs())) else {
                return false;
            };
            let r = free.swap_remove(pos);
            if self.at(r, j).abs() < 1e-12 {
                return false;
            }
            self.pivot(r, j);
        }
        self.pivots = pivots;
        // Values that should be zero may come back marginally negative.
        for i in 0..k {
            if self.a[i * w + w - 1] < 0.0 {
                self.a[i * w + w - 1] = 0.0;
            }
        }
        self.set_costs(cost);
        true
    }

    fn refactor(&self, cost: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        let (k, w) = (self.nrows, self.width);
        let col = |j: usize| -> Vec<f64> { (0..k).map(|i| self.orig[i * w + j]).collect() };
        let cols: Vec<Vec<f64>> = self.basis.iter().map(|&j| col(j)).collect();
        // B x = b
        let b: Vec<f64> = (0..k).map(|i| self.orig[i * w + w - 1]).collect();
        let bmat: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|c| cols[c][i]).collect()).collect();
        let xb = solve_dense(bmat, b)?;
        // Bᵀ y = c_B
        let cb: Vec<f64> = self.basis.iter().map(|&j| cost.get(j).copied().unwrap_or(0.0)).collect();
        let y = solve_dense(cols, cb)?;
        let mut xs = vec![0.0; w - 1];
        for (i, &j) in self.basis.iter().enumerate() {
            xs[j] = xb[i].max(0.0);
        }
        Some((xs, y))
    }

    fn duals_from(&self, y: &[f64], std: &StandardForm, sense: Sense) -> Vec<f64> {
        let obj_sign = match sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        (0..std.n_orig_rows).map(|i| obj_sign * std.row_sign[i] * y[i]).collect()
    }

    fn duals(&self, std: &StandardForm, sense: Sense) -> Vec<f64> {
        let obj_sign = match sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        (0..std.n_orig_rows)
            .map(|i| {
                let col = self.init_col[i];
                // Initial basis columns carry zero phase-two cost, so the dual
                // of the transformed row is minus its reduced cost.
                let y = -self.d[col];
                obj_sign * std.row_sign[i] * y
            })
            .collect()
    }
}

/// Gaussian elimination with partial pivoting on a dense square system.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-13 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}
