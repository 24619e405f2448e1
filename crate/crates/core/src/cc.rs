//! Charnes-Cooper linearization of the SBM fractional programs.
//!
//! Every program uses the variable layout `[t, Λ (n), S⁻ (m), S⁺ (s)]` where
//! `t` is the homogenizing variable, `Λ = t·λ` and `S = t·slack`. The input
//! and output slack blocks mean inefficiency slacks for [`LpKind::Efficiency`]
//! and [`LpKind::Relaxed`], and super-efficiency slacks `T⁻`, `T⁺` for
//! [`LpKind::Superefficiency`].

use crate::error::{DeaError, Result};
use crate::lp::{LinearProgram, Relation, Sense};
use crate::model::{Activity, ModelConfig, Orientation, ReferenceSet, Returns};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpKind {
    /// ρ*: slacks move the activity onto the frontier of P.
    Efficiency,
    /// δ*: slacks move the activity into the dominated part of P.
    Superefficiency,
    /// φ*: efficiency shape with free slacks and equality rows.
    Relaxed,
}

/// A linearized program plus what is needed to map its primal back.
#[derive(Debug, Clone)]
pub struct CcProgram {
    pub kind: LpKind,
    pub lp: LinearProgram,
    n: usize,
    m: usize,
    s: usize,
    denom_x: Vec<f64>,
    denom_y: Vec<f64>,
}

/// Fractional-space view of an LP primal.
#[derive(Debug, Clone, PartialEq)]
pub struct BackMapped {
    pub t: f64,
    pub lambda: Vec<f64>,
    pub slacks_minus: Vec<f64>,
    pub slacks_plus: Vec<f64>,
}

impl CcProgram {
    pub const T: usize = 0;

    pub fn lambda_index(&self, j: usize) -> usize {
        1 + j
    }

    pub fn minus_index(&self, i: usize) -> usize {
        1 + self.n + i
    }

    pub fn plus_index(&self, r: usize) -> usize {
        1 + self.n + self.m + r
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n, self.m, self.s)
    }

    /// Divides the scaled variables by `t`.
    pub fn back_map(&self, primal: &[f64]) -> Result<BackMapped> {
        let t = primal[Self::T];
        if !(t > 0.0) {
            return Err(DeaError::Solver(format!("homogenizing variable t = {t} is not positive")));
        }
        let scaled = |range: std::ops::Range<usize>| -> Vec<f64> {
            primal[range].iter().map(|v| v / t).collect()
        };
        Ok(BackMapped {
            t,
            lambda: scaled(1..1 + self.n),
            slacks_minus: scaled(1 + self.n..1 + self.n + self.m),
            slacks_plus: scaled(1 + self.n + self.m..1 + self.n + self.m + self.s),
        })
    }

    /// Secondary objective for canonical slack selection: the unit-free
    /// total `Σ S⁻ᵢ/xᵢ + Σ S⁺ᵣ/yᵣ` of the scaled slacks.
    pub fn slack_total(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.lp.num_vars()];
        for i in 0..self.m {
            c[self.minus_index(i)] = 1.0 / self.denom_x[i];
        }
        for r in 0..self.s {
            c[self.plus_index(r)] = 1.0 / self.denom_y[r];
        }
        c
    }
}

/// Builds the program of `kind` for activity `a` against `reference`.
pub fn linearize_sbm(
    kind: LpKind,
    a: &Activity,
    reference: &ReferenceSet,
    config: &ModelConfig,
) -> Result<CcProgram> {
    reference.check(a)?;
    config.validate(a.m(), a.s())?;
    Ok(build(kind, a.inputs(), a.outputs(), a.inputs(), a.outputs(), reference, config))
}

/// Efficiency program whose balance rows use the point `(px, py)` while the
/// objective divides by `(dx, dy)`. With `(px, py) = (x + t⁻, y − t⁺)` and
/// `(dx, dy) = (x, y)` this is the inner problem over the dominated set.
pub fn linearize_efficiency_at(
    px: &[f64],
    py: &[f64],
    dx: &[f64],
    dy: &[f64],
    reference: &ReferenceSet,
    config: &ModelConfig,
) -> CcProgram {
    build(LpKind::Efficiency, px, py, dx, dy, reference, config)
}

fn build(
    kind: LpKind,
    px: &[f64],
    py: &[f64],
    dx: &[f64],
    dy: &[f64],
    reference: &ReferenceSet,
    config: &ModelConfig,
) -> CcProgram {
    let (n, m, s) = (reference.n(), reference.m(), reference.s());
    let nv = 1 + n + m + s;
    let (cin, cout) = config.priced_coeffs(m, s);
    let lam = |j: usize| 1 + j;
    let sm = |i: usize| 1 + n + i;
    let sp = |r: usize| 1 + n + m + r;

    let mut objective = vec![0.0; nv];
    objective[0] = 1.0;
    let mut norm = vec![0.0; nv];
    norm[0] = 1.0;
    // Efficiency-type programs subtract input slacks and add output slacks;
    // super-efficiency flips both signs.
    let sign = match kind {
        LpKind::Superefficiency => -1.0,
        _ => 1.0,
    };
    for i in 0..m {
        objective[sm(i)] = -sign * cin[i] / dx[i];
    }
    for r in 0..s {
        norm[sp(r)] = sign * cout[r] / dy[r];
    }

    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    lp.add_row(norm, Relation::Eq, 1.0);

    for i in 0..m {
        let mut row = vec![0.0; nv];
        row[0] = -px[i];
        for j in 0..n {
            row[lam(j)] = reference.x(i, j);
        }
        match kind {
            LpKind::Superefficiency => {
                row[sm(i)] = -1.0;
                lp.add_row(row, Relation::Le, 0.0);
            }
            _ => {
                row[sm(i)] = 1.0;
                lp.add_row(row, Relation::Eq, 0.0);
            }
        }
    }
    for r in 0..s {
        let mut row = vec![0.0; nv];
        row[0] = -py[r];
        for j in 0..n {
            row[lam(j)] = reference.y(r, j);
        }
        match kind {
            LpKind::Superefficiency => {
                row[sp(r)] = 1.0;
                lp.add_row(row, Relation::Ge, 0.0);
            }
            _ => {
                row[sp(r)] = -1.0;
                lp.add_row(row, Relation::Eq, 0.0);
            }
        }
    }
    if kind == LpKind::Superefficiency {
        let keep = 1.0 - config.tol.eps_pos;
        for r in 0..s {
            let mut row = vec![0.0; nv];
            row[0] = -keep * py[r];
            row[sp(r)] = 1.0;
            lp.add_row(row, Relation::Le, 0.0);
        }
    }
    if config.rts == Returns::Variable {
        let mut row = vec![0.0; nv];
        row[0] = -1.0;
        for j in 0..n {
            row[lam(j)] = 1.0;
        }
        lp.add_row(row, Relation::Eq, 0.0);
    }

    match kind {
        LpKind::Relaxed => {
            for i in 0..m {
                lp.set_free(sm(i));
            }
            for r in 0..s {
                lp.set_free(sp(r));
            }
            lp.set_bounds(0, config.tol.eps_pos, f64::INFINITY);
        }
        LpKind::Efficiency | LpKind::Superefficiency => {
            // Unpriced slack blocks of an oriented model are switched off for
            // super-efficiency; for efficiency they stay free to absorb.
            if kind == LpKind::Superefficiency {
                match config.orientation {
                    Orientation::Input => (0..s).for_each(|r| {
                        lp.set_bounds(sp(r), 0.0, 0.0);
                    }),
                    Orientation::Output => (0..m).for_each(|i| {
                        lp.set_bounds(sm(i), 0.0, 0.0);
                    }),
                    Orientation::NonOriented => {}
                }
            }
        }
    }

    CcProgram {
        kind,
        lp,
        n,
        m,
        s,
        denom_x: dx.to_vec(),
        denom_y: dy.to_vec(),
    }
}
