//! Derivative-free maximizers over a box: DIRECT (dividing rectangles) and
//! a bounded Nelder-Mead. Objectives return `None` at infeasible points.

/// A point and its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct DirectOptions {
    /// Hard cap on objective evaluations.
    pub max_evals: usize,
    /// Stop after this many iterations without an improvement above `tol`.
    pub stall_iters: usize,
    pub tol: f64,
    /// Jones' epsilon in the potential-optimality test.
    pub epsilon: f64,
    /// Smallest side length, in box-relative units, that is still divided.
    pub min_side: f64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self {
            max_evals: 10_000,
            stall_iters: 25,
            tol: 1e-6,
            epsilon: 1e-4,
            min_side: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DirectOutcome {
    /// Best feasible samples found, best first.
    pub best: Vec<Sample>,
    pub evals: usize,
    pub iterations: usize,
    /// True when the run ended on the stall rule rather than the budget.
    pub stalled: bool,
}

struct Rect {
    center: Vec<f64>,
    /// Trisection count per dimension; side = 3^-level.
    level: Vec<u32>,
    value: Option<f64>,
}

impl Rect {
    fn size(&self) -> f64 {
        0.5 * self
            .level
            .iter()
            .map(|&k| 3f64.powi(-2 * k as i32))
            .sum::<f64>()
            .sqrt()
    }
}

/// Maximizes `f` over the box `[lo, hi]` with DIRECT.
pub fn direct_maximize<F>(lo: &[f64], hi: &[f64], opts: &DirectOptions, keep: usize, mut f: F) -> DirectOutcome
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    let d = lo.len();
    let to_box = |u: &[f64]| -> Vec<f64> { (0..d).map(|i| lo[i] + u[i] * (hi[i] - lo[i])).collect() };
    let mut evals = 0usize;
    let mut eval = |u: &[f64], evals: &mut usize| -> Option<f64> {
        *evals += 1;
        f(&to_box(u)).filter(|v| v.is_finite())
    };

    let c0 = vec![0.5; d];
    let v0 = eval(&c0, &mut evals);
    let mut rects = vec![Rect { center: c0, level: vec![0; d], value: v0 }];
    let mut best = v0.unwrap_or(f64::NEG_INFINITY);
    let mut since_improvement = 0usize;
    let mut iterations = 0usize;
    let mut stalled = false;

    while evals < opts.max_evals {
        iterations += 1;
        let chosen = potentially_optimal(&rects, opts.epsilon, opts.min_side);
        if chosen.is_empty() {
            stalled = true;
            break;
        }
        let before = best;
        for idx in chosen {
            if evals + 2 * d > opts.max_evals {
                break;
            }
            let min_level = *rects[idx].level.iter().min().unwrap();
            let dims: Vec<usize> = (0..d).filter(|&i| rects[idx].level[i] == min_level).collect();
            let delta = 3f64.powi(-(min_level as i32) - 1);
            let mut trials = Vec::with_capacity(dims.len());
            for &i in &dims {
                let mut up = rects[idx].center.clone();
                up[i] += delta;
                let mut down = rects[idx].center.clone();
                down[i] -= delta;
                let fu = eval(&up, &mut evals);
                let fd = eval(&down, &mut evals);
                for v in [fu, fd].into_iter().flatten() {
                    best = best.max(v);
                }
                let w = fu.unwrap_or(f64::NEG_INFINITY).max(fd.unwrap_or(f64::NEG_INFINITY));
                trials.push((i, w, up, fu, down, fd));
            }
            // Split along the most promising dimension first so the best
            // children keep the largest boxes.
            trials.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            for (i, _, up, fu, down, fd) in trials {
                rects[idx].level[i] += 1;
                let level = rects[idx].level.clone();
                rects.push(Rect { center: up, level: level.clone(), value: fu });
                rects.push(Rect { center: down, level, value: fd });
            }
        }
        if best > before + opts.tol {
            since_improvement = 0;
        } else {
            since_improvement += 1;
            if since_improvement >= opts.stall_iters {
                stalled = true;
                break;
            }
        }
    }

    let mut feasible: Vec<Sample> = rects
        .iter()
        .filter_map(|r| r.value.map(|v| Sample { point: to_box(&r.center), value: v }))
        .collect();
    feasible.sort_by(|a, b| b.value.total_cmp(&a.value));
    feasible.truncate(keep.max(1));
    DirectOutcome { best: feasible, evals, iterations, stalled }
}

/// Indices of rectangles on the upper-right hull of (size, value), the
/// standard DIRECT selection for maximization.
fn potentially_optimal(rects: &[Rect], epsilon: f64, min_side: f64) -> Vec<usize> {
    let feasible: Vec<f64> = rects.iter().filter_map(|r| r.value).collect();
    let (fmax, fmin) = feasible
        .iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(a, b), &v| (a.max(v), b.min(v)));
    // Infeasible centers rank just below the worst feasible value so their
    // boxes still get divided eventually.
    let penalty = if feasible.is_empty() { 0.0 } else { fmin - 1e-3 * (1.0 + (fmax - fmin).abs()) };
    let value = |r: &Rect| r.value.unwrap_or(penalty);
    let max_level = (min_side.ln() / 3f64.ln()).abs().ceil() as u32;

    // Best rectangle per size class.
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for (k, r) in rects.iter().enumerate() {
        if r.level.iter().min().copied().unwrap_or(0) >= max_level {
            continue;
        }
        let s = r.size();
        match groups.iter_mut().find(|(gs, _)| (gs - s).abs() <= 1e-12 * s.max(1e-300)) {
            Some(g) => {
                let cur = &rects[g.1];
                if value(r) > value(cur) {
                    g.1 = k;
                }
            }
            None => groups.push((s, k)),
        }
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));
    let best = if feasible.is_empty() { penalty } else { fmax };

    let mut out = Vec::new();
    for (j, &(sj, kj)) in groups.iter().enumerate() {
        let fj = value(&rects[kj]);
        let mut k_low: f64 = 0.0;
        let mut k_high = f64::INFINITY;
        for (i, &(si, ki)) in groups.iter().enumerate() {
            if i == j {
                continue;
            }
            let fi = value(&rects[ki]);
            if si < sj {
                k_low = k_low.max((fi - fj) / (sj - si));
            } else {
                k_high = k_high.min((fj - fi) / (si - sj));
            }
        }
        if k_low > k_high {
            continue;
        }
        if k_high.is_finite() && fj + k_high * sj < best + epsilon * best.abs() {
            continue;
        }
        out.push(kj);
    }
    out
}

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Initial step as a fraction of each box side.
    pub initial_step: f64,
    /// Stop when the value spread and the simplex diameter (box-relative)
    /// both fall below this.
    pub tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 2_000,
            initial_step: 0.05,
            tol: 1e-9,
        }
    }
}

/// Maximizes `f` from `start` with Nelder-Mead; trial points are clamped to
/// the box and infeasible points rank below every feasible one.
pub fn nelder_mead_maximize<F>(
    lo: &[f64],
    hi: &[f64],
    start: &[f64],
    opts: &NelderMeadOptions,
    mut f: F,
) -> (Sample, usize)
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    let d = lo.len();
    let clamp = |p: Vec<f64>| -> Vec<f64> { p.into_iter().enumerate().map(|(i, v)| v.clamp(lo[i], hi[i])).collect() };
    let mut evals = 0usize;
    let mut score = |p: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(p).filter(|v| v.is_finite()).unwrap_or(f64::NEG_INFINITY)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let x0 = clamp(start.to_vec());
    let v0 = score(&x0, &mut evals);
    simplex.push((x0.clone(), v0));
    for i in 0..d {
        let width = hi[i] - lo[i];
        let mut p = x0.clone();
        let step = opts.initial_step * width;
        p[i] = if p[i] + step <= hi[i] { p[i] + step } else { p[i] - step };
        let p = clamp(p);
        let v = score(&p, &mut evals);
        simplex.push((p, v));
    }

    let widths: Vec<f64> = (0..d).map(|i| (hi[i] - lo[i]).max(f64::MIN_POSITIVE)).collect();
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let fbest = simplex[0].1;
        let fworst = simplex[d].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| (0..d).map(|i| ((p[i] - simplex[0].0[i]) / widths[i]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if fworst.is_finite() && (fbest - fworst).abs() <= opts.tol && diameter <= opts.tol {
            break;
        }
        if diameter <= 1e-14 {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|i| simplex[..d].iter().map(|(p, _)| p[i]).sum::<f64>() / d as f64)
            .collect();
        let worst = simplex[d].0.clone();
        let along = |t: f64| -> Vec<f64> { clamp((0..d).map(|i| centroid[i] + t * (centroid[i] - worst[i])).collect()) };

        let xr = along(1.0);
        let fr = score(&xr, &mut evals);
        if fr > fbest {
            let xe = along(2.0);
            let fe = score(&xe, &mut evals);
            simplex[d] = if fe > fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr > simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr > fworst {
            let x = along(0.5);
            let v = score(&x, &mut evals);
            (x, v)
        } else {
            let x = along(-0.5);
            let v = score(&x, &mut evals);
            (x, v)
        };
        if fc > fworst.max(fr) || (fc > fworst && !fr.is_finite()) {
            simplex[d] = (xc, fc);
            continue;
        }
        // Shrink toward the best vertex.
        let x_best = simplex[0].0.clone();
        for k in 1..=d {
            let p = clamp((0..d).map(|i| x_best[i] + 0.5 * (simplex[k].0[i] - x_best[i])).collect());
            let v = score(&p, &mut evals);
            simplex[k] = (p, v);
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (point, value) = simplex.swap_remove(0);
    (Sample { point, value }, evals)
}
