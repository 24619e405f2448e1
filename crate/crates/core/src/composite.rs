//! Composite scores built on the best SBM efficiency inside the dominated
//! part of the technology: γ, γ_low, γ_se, σ̈, the oriented γ and the
//! additive composite.
//!
//! `max_rho_pbar` maximizes, over outer moves `t = (t⁻, t⁺)`, the inner SBM
//! efficiency of `(x + t⁻, y − t⁺)` measured against the evaluated `(x, y)`.
//! That inner value is quasiconvex and nonincreasing in `t`, so the maximum
//! sits at a minimal vertex of the feasible move set
//! `T = {t : (x + t⁻, y − t⁺) ∈ P}`. The search combines:
//!
//! * the canonical super-efficiency move as a seed,
//! * vertex ascent: the inner LP duals `(U, v)` give the bound
//!   `ρ(t) >= ρ(t̂)` for every `t` with `U·t⁻ + v·t⁺ <= U·t̂⁻ + v·t̂⁺`, so
//!   minimizing that weighted move over `T` never loses ground,
//! * exhaustive enumeration when small: every minimal vertex of `T` has the
//!   form `t = (g(μ))₊` with `g(μ) = (Xμ − x, y − Yμ)` and `μ` the
//!   intersection of `n` hyperplanes from `{μⱼ = 0}`, `{gₖ(μ) = 0}` and the
//!   output caps, so checking those `C(n + m + 2s, n)` candidates is exact,
//! * otherwise minimal vertices of `T` sampled with random positive weights,
//!   DIRECT over the whole box and a Nelder-Mead polish.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::additive::{alpha_at, beta_star};
use crate::cc::linearize_efficiency_at;
use crate::error::{DeaError, Result};
use crate::lp::{solve_lp, LinearProgram, Relation, Sense};
use crate::model::{Activity, ModelConfig, Orientation, ReferenceSet, Region, RegionRule, Returns};
use crate::optimize::{direct_maximize, nelder_mead_maximize, DirectOptions, NelderMeadOptions};
use crate::sbm::{csbm_from, delta_star_core, projection_rho_from, relaxed_phi, rho_star, INWARD_NUDGES};
use crate::technology::{classify_with_projection, is_efficient};

#[derive(Debug, Clone, PartialEq)]
pub struct MaximinResult {
    pub value: f64,
    /// `(t⁻, t⁺)` at the best point found.
    pub outer_slacks: (Vec<f64>, Vec<f64>),
    /// Inner LP solves spent (ascent LPs included).
    pub evaluations: usize,
    pub converged: bool,
    /// Value at the seed, or NaN when seeding was disabled.
    pub lower_bound_used: f64,
}

impl MaximinResult {
    /// Turns a budget-limited result into [`DeaError::BudgetExhausted`].
    pub fn strict(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(DeaError::BudgetExhausted {
                evaluations: self.evaluations,
                best: self.value,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximinOptions {
    /// Start from the canonical super-efficiency move and never report
    /// below its value.
    pub seed_lower_bound: bool,
    /// Random-weight vertex starts; `None` means `8 * dims`.
    pub vertex_starts: Option<usize>,
    /// Enumerate vertex candidates exactly when their count is at most this
    /// (and within budget); 0 forces the heuristic search.
    pub exhaustive_limit: usize,
    /// DIRECT stops after this many iterations without improvement.
    pub direct_stall: usize,
    pub rng_seed: u64,
}

impl Default for MaximinOptions {
    fn default() -> Self {
        Self {
            seed_lower_bound: true,
            vertex_starts: None,
            exhaustive_limit: 200_000,
            direct_stall: 12,
            rng_seed: 0x5eed_5b3,
        }
    }
}

/// Best SBM efficiency over activities in P dominated by `a`.
pub fn max_rho_pbar(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<MaximinResult> {
    max_rho_pbar_with(a, reference, config, &MaximinOptions::default())
}

pub fn max_rho_pbar_with(
    a: &Activity,
    reference: &ReferenceSet,
    config: &ModelConfig,
    opts: &MaximinOptions,
) -> Result<MaximinResult> {
    reference.check(a)?;
    config.validate(a.m(), a.s())?;
    if !is_efficient(a, reference, config)? {
        let r = rho_star(a, reference, config)?;
        return Ok(at_origin(r.score, a));
    }
    let delta = delta_star_core(a, reference, config)?;
    maximin_from(a, &delta.slacks_minus, &delta.slacks_plus, reference, config, opts)
}

fn at_origin(value: f64, a: &Activity) -> MaximinResult {
    MaximinResult {
        value,
        outer_slacks: (vec![0.0; a.m()], vec![0.0; a.s()]),
        evaluations: 1,
        converged: true,
        lower_bound_used: value,
    }
}

fn maximin_from(
    a: &Activity,
    seed_minus: &[f64],
    seed_plus: &[f64],
    reference: &ReferenceSet,
    config: &ModelConfig,
    opts: &MaximinOptions,
) -> Result<MaximinResult> {
    let mut outer = Outer::new(a, reference, config, Goal::Rho);
    let target = 1.0 - config.tol.eps_score;
    let mut lower_bound_used = f64::NAN;

    if opts.seed_lower_bound {
        let seed: Vec<f64> = seed_minus.iter().chain(seed_plus).copied().collect();
        let seed = outer.clamp(&seed);
        if let Some(v) = outer.evaluate(&seed, true)? {
            lower_bound_used = v;
            outer.ascend(seed)?;
        }
    }

    let mut exact = false;
    if outer.best_value < target {
        exact = outer.enumerate(opts.exhaustive_limit)?;
    }
    if !exact && outer.best_value < target {
        outer.sample_vertices(opts)?;
        if outer.best_value < target && outer.evals < outer.budget {
            outer.global_search(opts)?;
        }
    }

    let value = outer.best_value.min(1.0);
    if !value.is_finite() {
        return Err(DeaError::Solver("no feasible point found in the dominated set".into()));
    }
    let converged = exact || outer.best_value >= target || !outer.exhausted;
    let (tm, tp) = outer.split(&outer.best_point);
    Ok(MaximinResult {
        value,
        outer_slacks: (tm, tp),
        evaluations: outer.evals,
        converged,
        lower_bound_used,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Goal {
    /// Maximize the inner SBM efficiency (replaced objective).
    Rho,
    /// Minimize α* of the moved point, stored negated.
    Alpha,
}

struct Outer<'a> {
    reference: &'a ReferenceSet,
    config: &'a ModelConfig,
    goal: Goal,
    x: Vec<f64>,
    y: Vec<f64>,
    m: usize,
    s: usize,
    /// Upper bounds of the full move vector; fixed coordinates have 0.
    hi: Vec<f64>,
    active: Vec<usize>,
    budget: usize,
    evals: usize,
    exhausted: bool,
    best_value: f64,
    best_point: Vec<f64>,
}

impl<'a> Outer<'a> {
    fn new(a: &Activity, reference: &'a ReferenceSet, config: &'a ModelConfig, goal: Goal) -> Self {
        let (m, s, n) = (a.m(), a.s(), reference.n());
        // No useful move needs more than enough of DMU j alone to cover every
        // output of `a`; beyond that, dropping some of j only helps.
        let cover: Vec<f64> = (0..n)
            .map(|j| (0..s).map(|r| a.outputs()[r] / reference.y(r, j)).fold(0.0, f64::max))
            .collect();
        let mut hi = Vec::with_capacity(m + s);
        for i in 0..m {
            let xmax = (0..n).map(|j| reference.x(i, j)).fold(0.0, f64::max);
            let covered: f64 = (0..n).map(|j| reference.x(i, j) * cover[j]).sum();
            hi.push((n as f64 * xmax).max(covered));
        }
        for r in 0..s {
            hi.push((1.0 - config.tol.eps_pos) * a.outputs()[r]);
        }
        match config.orientation {
            Orientation::Input => hi[m..].iter_mut().for_each(|h| *h = 0.0),
            Orientation::Output => hi[..m].iter_mut().for_each(|h| *h = 0.0),
            Orientation::NonOriented => {}
        }
        let active = (0..m + s).filter(|&k| hi[k] > 0.0).collect();
        Self {
            reference,
            config,
            goal,
            x: a.inputs().to_vec(),
            y: a.outputs().to_vec(),
            m,
            s,
            hi,
            active,
            budget: config.budget_for(m, s),
            evals: 0,
            exhausted: false,
            best_value: f64::NEG_INFINITY,
            best_point: vec![0.0; m + s],
        }
    }

    fn clamp(&self, t: &[f64]) -> Vec<f64> {
        t.iter().zip(&self.hi).map(|(v, h)| v.clamp(0.0, *h)).collect()
    }

    fn split(&self, t: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (t[..self.m].to_vec(), t[self.m..].to_vec())
    }

    fn full(&self, z: &[f64]) -> Vec<f64> {
        let mut t = vec![0.0; self.m + self.s];
        for (k, &idx) in self.active.iter().enumerate() {
            t[idx] = z[k];
        }
        t
    }

    fn reduced(&self, t: &[f64]) -> Vec<f64> {
        self.active.iter().map(|&k| t[k]).collect()
    }

    fn spend(&mut self) -> bool {
        if self.evals >= self.budget {
            self.exhausted = true;
            return false;
        }
        self.evals += 1;
        true
    }

    fn point(&self, t: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let px = (0..self.m).map(|i| self.x[i] + t[i]).collect();
        let py = (0..self.s).map(|r| self.y[r] - t[self.m + r]).collect();
        (px, py)
    }

    /// Inner value and, for the ρ goal, the LP duals. `None` when the moved
    /// point is outside P or the budget is gone.
    fn inner(&mut self, t: &[f64]) -> Result<Option<(f64, Vec<f64>)>> {
        if !self.spend() {
            return Ok(None);
        }
        let (px, py) = self.point(t);
        if py.iter().any(|v| *v <= 0.0) {
            return Ok(None);
        }
        match self.goal {
            Goal::Rho => {
                let prog = linearize_efficiency_at(&px, &py, &self.x, &self.y, self.reference, self.config);
                let sol = solve_lp(&prog.lp)?;
                if !sol.is_optimal() {
                    return Ok(None);
                }
                Ok(Some((sol.objective_value, sol.duals.unwrap_or_default())))
            }
            Goal::Alpha => {
                let r = alpha_at(&px, &py, self.reference, self.config.rts)?;
                if r.notes.iter().any(|n| n == "outside P") {
                    return Ok(None);
                }
                Ok(Some((-r.score, Vec::new())))
            }
        }
    }

    /// Evaluates, records improvements, and reports the value. Solver
    /// failures at odd points are treated as infeasible.
    fn evaluate(&mut self, t: &[f64], nudge: bool) -> Result<Option<f64>> {
        Ok(self.evaluate_full(t, nudge)?.map(|(v, _)| v))
    }

    fn evaluate_full(&mut self, t: &[f64], nudge: bool) -> Result<Option<(f64, Vec<f64>)>> {
        let mut got = match self.inner(t) {
            Ok(v) => v,
            Err(DeaError::Solver(_)) => None,
            Err(e) => return Err(e),
        };
        let mut at = t.to_vec();
        if nudge {
            // Vertices of T sit on the boundary of P; step inside slightly.
            for k in INWARD_NUDGES.iter().skip(1) {
                if got.is_some() || self.exhausted {
                    break;
                }
                at = self.inward(t, *k);
                got = match self.inner(&at) {
                    Ok(v) => v,
                    Err(DeaError::Solver(_)) => None,
                    Err(e) => return Err(e),
                };
            }
        }
        if let Some((v, _)) = &got {
            if *v > self.best_value {
                self.best_value = *v;
                self.best_point = at;
            }
        }
        Ok(got)
    }

    fn inward(&self, t: &[f64], k: f64) -> Vec<f64> {
        let scale = self.x.iter().chain(&self.y);
        let moved: Vec<f64> = t
            .iter()
            .zip(scale)
            .zip(&self.hi)
            .map(|((v, sc), h)| if *h > 0.0 { v + k * sc } else { *v })
            .collect();
        self.clamp(&moved)
    }

    /// Minimizes `weights · t` over `T`, returning the move.
    fn weighted_vertex(&mut self, weights: &[f64]) -> Result<Option<Vec<f64>>> {
        if !self.spend() {
            return Ok(None);
        }
        let (m, s, n) = (self.m, self.s, self.reference.n());
        let nv = m + s + n;
        let mut obj = vec![0.0; nv];
        obj[..m + s].copy_from_slice(weights);
        let mut lp = LinearProgram::new(Sense::Minimize, obj);
        for i in 0..m {
            let mut row = vec![0.0; nv];
            row[i] = -1.0;
            for j in 0..n {
                row[m + s + j] = self.reference.x(i, j);
            }
            lp.add_row(row, Relation::Le, self.x[i]);
        }
        for r in 0..s {
            let mut row = vec![0.0; nv];
            row[m + r] = 1.0;
            for j in 0..n {
                row[m + s + j] = self.reference.y(r, j);
            }
            lp.add_row(row, Relation::Ge, self.y[r]);
        }
        if self.config.rts == Returns::Variable {
            let mut row = vec![0.0; nv];
            row[m + s..].iter_mut().for_each(|v| *v = 1.0);
            lp.add_row(row, Relation::Eq, 1.0);
        }
        for k in 0..m + s {
            lp.set_bounds(k, 0.0, self.hi[k]);
        }
        let sol = match solve_lp(&lp) {
            Ok(sol) => sol,
            Err(DeaError::Solver(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if !sol.is_optimal() {
            return Ok(None);
        }
        Ok(Some(self.clamp(&sol.primal[..m + s])))
    }

    /// Dual-guided vertex ascent from `t` (ρ goal only).
    fn ascend(&mut self, t: Vec<f64>) -> Result<()> {
        if self.goal != Goal::Rho {
            return Ok(());
        }
        let Some((mut value, mut duals)) = self.evaluate_full(&t, true)? else {
            return Ok(());
        };
        let target = 1.0 - self.config.tol.eps_score;
        let mut current = t;
        for _ in 0..64 {
            if value >= target || duals.is_empty() {
                break;
            }
            let weights = self.dual_weights(&duals);
            let Some(next) = self.weighted_vertex(&weights)? else { break };
            if next == current {
                break;
            }
            let Some((v, d)) = self.evaluate_full(&next, true)? else { break };
            if v <= value + 1e-12 {
                break;
            }
            value = v;
            duals = d;
            current = next;
        }
        Ok(())
    }

    fn dual_weights(&self, duals: &[f64]) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.m + self.s);
        for i in 0..self.m {
            w.push((-duals[1 + i]).max(1e-12 / self.x[i]));
        }
        for r in 0..self.s {
            w.push(duals[1 + self.m + r].max(1e-12 / self.y[r]));
        }
        w
    }

    /// Hyperplanes `a·μ = b` whose `n`-fold intersections contain every
    /// vertex of the lifted move polyhedron.
    fn hyperplanes(&self) -> Vec<(Vec<f64>, f64)> {
        let n = self.reference.n();
        let mut out = Vec::with_capacity(n + self.m + 2 * self.s);
        for j in 0..n {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            out.push((a, 0.0));
        }
        for i in 0..self.m {
            out.push(((0..n).map(|j| self.reference.x(i, j)).collect(), self.x[i]));
        }
        for r in 0..self.s {
            let a: Vec<f64> = (0..n).map(|j| self.reference.y(r, j)).collect();
            out.push((a.clone(), self.y[r]));
            if self.hi[self.m + r] > 0.0 {
                out.push((a, self.y[r] - self.hi[self.m + r]));
            }
        }
        out
    }

    /// Exact search over all vertex candidates. Returns false without
    /// searching when there are more than `limit` of them or they do not fit
    /// the remaining budget.
    fn enumerate(&mut self, limit: usize) -> Result<bool> {
        let n = self.reference.n();
        let planes = self.hyperplanes();
        let vrs = self.config.rts == Returns::Variable;
        let pick = if vrs { n - 1 } else { n };
        let count = binomial(planes.len(), pick);
        let remaining = self.budget.saturating_sub(self.evals) as f64;
        if limit == 0 || count > limit as f64 || count > remaining {
            return Ok(false);
        }
        let mut combo: Vec<usize> = (0..pick).collect();
        let mut seen: Vec<Vec<f64>> = Vec::new();
        loop {
            let mut rows: Vec<(Vec<f64>, f64)> = combo.iter().map(|&k| planes[k].clone()).collect();
            if vrs {
                rows.push((vec![1.0; n], 1.0));
            }
            if let Some(mu) = solve_square(rows) {
                if let Some(t) = self.move_for(&mu) {
                    let key: Vec<f64> = t.iter().map(|v| (v * 1e9).round()).collect();
                    if !seen.contains(&key) {
                        seen.push(key);
                        self.evaluate(&t, true)?;
                    }
                }
            }
            if !next_combination(&mut combo, planes.len()) {
                break;
            }
        }
        Ok(!self.exhausted)
    }

    /// Smallest move reaching `(Xμ, Yμ)`, if `μ` is admissible.
    fn move_for(&self, mu: &[f64]) -> Option<Vec<f64>> {
        let n = self.reference.n();
        if mu.iter().any(|v| *v < -1e-10) {
            return None;
        }
        let mut t = Vec::with_capacity(self.m + self.s);
        for i in 0..self.m {
            let xm: f64 = (0..n).map(|j| self.reference.x(i, j) * mu[j].max(0.0)).sum();
            t.push((xm - self.x[i]).max(0.0));
        }
        for r in 0..self.s {
            let ym: f64 = (0..n).map(|j| self.reference.y(r, j) * mu[j].max(0.0)).sum();
            t.push((self.y[r] - ym).max(0.0));
        }
        let fits = t.iter().zip(&self.hi).zip(self.x.iter().chain(&self.y)).all(|((v, h), scale)| *v <= h + 1e-9 * scale);
        fits.then(|| self.clamp(&t))
    }

    fn sample_vertices(&mut self, opts: &MaximinOptions) -> Result<()> {
        let dims = self.active.len().max(1);
        let starts = opts.vertex_starts.unwrap_or(8 * dims);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
        let target = 1.0 - self.config.tol.eps_score;
        let mut seen: Vec<Vec<f64>> = Vec::new();
        for k in 0..starts {
            if self.best_value >= target || self.exhausted {
                break;
            }
            // Equal weights, then one cheap coordinate at a time, then random
            // log-weights. Maximizers often need weight ratios near 1e4.
            let log_w: Vec<f64> = (0..self.m + self.s)
                .map(|c| match k {
                    0 => 0.0,
                    k if k <= self.active.len() => {
                        if self.active[k - 1] == c {
                            -8.0
                        } else {
                            0.0
                        }
                    }
                    _ => rng.gen_range(-8.0..8.0),
                })
                .collect();
            let weights: Vec<f64> = log_w
                .iter()
                .zip(self.x.iter().chain(&self.y))
                .map(|(g, sc)| g.exp() / sc)
                .collect();
            let Some(v) = self.weighted_vertex(&weights)? else { continue };
            let scale: Vec<f64> = self.hi.iter().map(|h| 1e-9 * (1.0 + h)).collect();
            if seen.iter().any(|p| p.iter().zip(&v).zip(&scale).all(|((a, b), e)| (a - b).abs() <= *e)) {
                continue;
            }
            seen.push(v.clone());
            match self.goal {
                Goal::Rho => self.ascend(v)?,
                Goal::Alpha => {
                    self.evaluate(&v, true)?;
                }
            }
        }
        Ok(())
    }

    fn global_search(&mut self, opts: &MaximinOptions) -> Result<()> {
        let d = self.active.len();
        if d == 0 {
            return Ok(());
        }
        let lo = vec![0.0; d];
        let hi: Vec<f64> = self.active.iter().map(|&k| self.hi[k]).collect();
        let remaining = self.budget.saturating_sub(self.evals);
        let direct_opts = DirectOptions {
            max_evals: remaining * 4 / 5,
            stall_iters: opts.direct_stall,
            tol: self.config.tol.outer_tol,
            ..DirectOptions::default()
        };
        let mut failure: Option<DeaError> = None;
        let outcome = direct_maximize(&lo, &hi, &direct_opts, 3, |z| {
            let t = self.full(z);
            match self.evaluate(&t, false) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    None
                }
            }
        });
        if let Some(e) = failure.take() {
            return Err(e);
        }
        if !outcome.stalled {
            self.exhausted = true;
        }

        let start = self.reduced(&self.best_point);
        let nm_opts = NelderMeadOptions {
            max_evals: (self.budget.saturating_sub(self.evals)).min(200 * d),
            tol: self.config.tol.outer_tol * 1e-3,
            ..NelderMeadOptions::default()
        };
        let _ = nelder_mead_maximize(&lo, &hi, &start, &nm_opts, |z| {
            let t = self.full(z);
            match self.evaluate(&t, false) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    None
                }
            }
        });
        if let Some(e) = failure.take() {
            return Err(e);
        }

        let best = self.best_point.clone();
        self.ascend(best)?;
        for sample in outcome.best {
            let t = self.full(&sample.point);
            self.ascend(t)?;
        }
        Ok(())
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Advances `combo` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for pos in (0..k).rev() {
        if combo[pos] < n - k + pos {
            combo[pos] += 1;
            for q in pos + 1..k {
                combo[q] = combo[q - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut rows: Vec<(Vec<f64>, f64)>) -> Option<Vec<f64>> {
    let n = rows.len();
    for row in rows.iter_mut() {
        let scale = row.0.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale == 0.0 {
            return None;
        }
        row.0.iter_mut().for_each(|v| *v /= scale);
        row.1 /= scale;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| rows[a].0[col].abs().total_cmp(&rows[b].0[col].abs()))?;
        if rows[piv].0[col].abs() < 1e-10 {
            return None;
        }
        rows.swap(col, piv);
        let (head, tail) = rows.split_at_mut(col + 1);
        let p = &head[col];
        for row in tail.iter_mut() {
            let f = row.0[col] / p.0[col];
            if f != 0.0 {
                for c in col..n {
                    row.0[c] -= f * p.0[c];
                }
                row.1 -= f * p.1;
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| rows[r].0[c] * x[c]).sum();
        x[r] = (rows[r].1 - s) / rows[r].0[r];
    }
    Some(x)
}

/// Every composite score of one activity, sharing the LP work.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeScores {
    pub delta: f64,
    pub rho_projection: f64,
    pub max_rho_pbar: MaximinResult,
    pub csbm: f64,
    pub jsbm: f64,
    pub gamma_low: f64,
    pub gamma: f64,
    pub gamma_se: f64,
    pub sigma: f64,
    /// Region under the projection rule.
    pub region: Region,
}

pub fn composite_scores(
    a: &Activity,
    reference: &ReferenceSet,
    config: &ModelConfig,
    opts: &MaximinOptions,
) -> Result<CompositeScores> {
    reference.check(a)?;
    config.validate(a.m(), a.s())?;
    let delta = delta_star_core(a, reference, config)?;
    let region = classify_with_projection(a, &delta, reference, config, RegionRule::Projection)?;
    let (t_minus, t_plus) = (delta.slacks_minus.clone(), delta.slacks_plus.clone());
    let d = delta.score;
    let proj = projection_rho_from(a, delta.clone(), reference, config)?;
    let csbm = csbm_from(a, &proj, config);
    let (max, jsbm) = match region {
        Region::I => {
            let r = rho_star(a, reference, config)?.score;
            (at_origin(r, a), r)
        }
        Region::II => {
            let mut m = at_origin(proj.value, a);
            m.outer_slacks = (t_minus, t_plus);
            (m, d)
        }
        Region::III => (
            maximin_from(a, &t_minus, &t_plus, reference, config, opts)?,
            relaxed_phi(a, reference, config)?,
        ),
    };
    let gamma_low = d * proj.value;
    let gamma = d * max.value;
    Ok(CompositeScores {
        delta: d,
        rho_projection: proj.value,
        csbm,
        jsbm,
        gamma_low,
        gamma,
        gamma_se: (d - 1.0) * max.value + 1.0,
        sigma: (d - 1.0) * proj.value + 1.0,
        max_rho_pbar: max,
        region,
    })
}

/// γ = δ* · max ρ*|P̄.
pub fn gamma(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<f64> {
    Ok(composite_scores(a, reference, config, &MaximinOptions::default())?.gamma)
}

/// γ_low = δ* · ρ* of the canonical projection; never above γ.
pub fn gamma_low(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<f64> {
    let delta = delta_star_core(a, reference, config)?;
    let d = delta.score;
    let proj = projection_rho_from(a, delta, reference, config)?;
    Ok(d * proj.value)
}

/// γ_se = (δ* − 1) · max ρ*|P̄ + 1.
pub fn gamma_se(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<f64> {
    Ok(composite_scores(a, reference, config, &MaximinOptions::default())?.gamma_se)
}

/// σ̈ = (δ* − 1) · ρ* of the canonical projection + 1.
pub fn sigma_composite(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<f64> {
    let delta = delta_star_core(a, reference, config)?;
    let d = delta.score;
    let proj = projection_rho_from(a, delta, reference, config)?;
    Ok((d - 1.0) * proj.value + 1.0)
}

/// γ for an input- or output-oriented configuration.
pub fn gamma_oriented(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<f64> {
    if config.orientation == Orientation::NonOriented {
        return Err(DeaError::Config("gamma_oriented needs an input or output orientation".into()));
    }
    gamma(a, reference, config)
}

/// Smallest α* over activities in P dominated by `a`.
pub fn min_alpha_pbar(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<MaximinResult> {
    reference.check(a)?;
    config.validate(a.m(), a.s())?;
    let opts = MaximinOptions::default();
    let mut outer = Outer::new(a, reference, config, Goal::Alpha);
    let zero_tol = config.tol.eps_zero;
    // Seeds: the activity itself, then the additive and SBM projections.
    outer.evaluate(&vec![0.0; a.m() + a.s()], false)?;
    let beta = beta_star(a, reference, config)?;
    let seed: Vec<f64> = beta.slacks_minus.iter().chain(&beta.slacks_plus).copied().collect();
    let seed = outer.clamp(&seed);
    outer.evaluate(&seed, true)?;
    let lower_bound_used = -outer.best_value;
    let delta = delta_star_core(a, reference, config)?;
    let seed: Vec<f64> = delta.slacks_minus.iter().chain(&delta.slacks_plus).copied().collect();
    let seed = outer.clamp(&seed);
    outer.evaluate(&seed, true)?;
    if -outer.best_value > zero_tol {
        outer.sample_vertices(&opts)?;
    }
    if -outer.best_value > zero_tol && outer.evals < outer.budget {
        outer.global_search(&opts)?;
    }
    if !outer.best_value.is_finite() {
        return Err(DeaError::Solver("no feasible point found in the dominated set".into()));
    }
    let value = (-outer.best_value).max(0.0);
    let (tm, tp) = outer.split(&outer.best_point);
    Ok(MaximinResult {
        value,
        outer_slacks: (tm, tp),
        evaluations: outer.evals,
        converged: value <= zero_tol || !outer.exhausted,
        lower_bound_used,
    })
}

/// γ_add = β* − min α*|P̄.
pub fn gamma_add(a: &Activity, reference: &ReferenceSet, config: &ModelConfig) -> Result<f64> {
    let beta = beta_star(a, reference, config)?.score;
    let min_alpha = min_alpha_pbar(a, reference, config)?.value;
    Ok(beta - min_alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{six_unit_loo, three_unit};
    use approx::assert_abs_diff_eq;

    fn act(x: &[f64], y: &[f64]) -> Activity {
        Activity::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn line_examples() {
        let set = three_unit();
        let cfg = ModelConfig::default();
        let a2 = act(&[40.0, 10.0], &[1.0]);
        let m = max_rho_pbar(&a2, &set, &cfg).unwrap();
        assert_abs_diff_eq!(m.value, 0.875, epsilon = 1e-6);
        assert!(m.converged);
        assert_abs_diff_eq!(gamma(&a2, &set, &cfg).unwrap(), 1.3125, epsilon = 1e-6);
        let a4 = act(&[50.0, 19.0], &[1.0]);
        assert_abs_diff_eq!(gamma(&a4, &set, &cfg).unwrap(), 0.821, epsilon = 1e-3);
        let a1 = act(&[30.0, 10.0], &[1.0]);
        assert_abs_diff_eq!(gamma(&a1, &set, &cfg).unwrap(), 1.5, epsilon = 1e-6);
    }

    #[test]
    fn inefficient_collapses_to_rho() {
        let set = three_unit();
        let cfg = ModelConfig::default();
        let a3 = act(&[50.0, 20.0], &[1.0]);
        let c = composite_scores(&a3, &set, &cfg, &MaximinOptions::default()).unwrap();
        assert_abs_diff_eq!(c.gamma, 0.8, epsilon = 1e-9);
        assert_abs_diff_eq!(c.gamma_se, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.sigma, 1.0, epsilon = 1e-12);
        assert_eq!(c.region, Region::I);
    }

    #[test]
    fn d5_reaches_one() {
        let (set, d5) = six_unit_loo(4);
        let m = max_rho_pbar(&d5, &set, &ModelConfig::default()).unwrap();
        assert!(m.value >= 1.0 - 1e-6, "{m:?}");
    }

    #[test]
    fn additive_composite() {
        let set = three_unit();
        let cfg = ModelConfig::default();
        assert_abs_diff_eq!(gamma_add(&act(&[30.0, 10.0], &[1.0]), &set, &cfg).unwrap(), 1.0 / 6.0, epsilon = 1e-6);
        assert_abs_diff_eq!(gamma_add(&act(&[50.0, 20.0], &[1.0]), &set, &cfg).unwrap(), -2.0 / 15.0, epsilon = 1e-6);
    }

    #[test]
    fn oriented_gamma_requires_orientation() {
        let set = three_unit();
        let a = act(&[30.0, 10.0], &[1.0]);
        assert!(gamma_oriented(&a, &set, &ModelConfig::default()).is_err());
        let g = gamma_oriented(&a, &set, &ModelConfig::default().with_orientation(Orientation::Input)).unwrap();
        assert!(g >= 1.0);
    }

    #[test]
    fn strict_reports_budget() {
        let r = MaximinResult {
            value: 0.5,
            outer_slacks: (vec![], vec![]),
            evaluations: 3,
            converged: false,
            lower_bound_used: 0.4,
        };
        assert!(matches!(r.strict(), Err(DeaError::BudgetExhausted { evaluations: 3, .. })));
    }

    #[test]
    fn move_box_reaches_projection_when_outputs_are_large() {
        // Covering a's output needs 2.5 copies of D1, so the projection moves
        // input 1 by 91, past n * max x = 88.
        let set = ReferenceSet::from_matrices(
            vec!["D1".into(), "D2".into()],
            &[vec![44.0, 16.0], vec![48.0, 56.0], vec![6.0, 29.0]],
            &[vec![22.0, 7.0]],
        )
        .unwrap();
        let a = act(&[19.0, 19.0, 52.0], &[55.0]);
        let cfg = ModelConfig::default();
        let s = composite_scores(&a, &set, &cfg, &MaximinOptions::default()).unwrap();
        assert!(s.max_rho_pbar.value >= s.rho_projection - 1e-9);
        assert!(s.gamma_low <= s.gamma + 1e-9);
        assert_abs_diff_eq!(s.max_rho_pbar.value, 0.762_820_512_8, epsilon = 1e-8);
    }
}
