//! Activities, reference sets, model configuration and the dominance relation.

use crate::error::{DeaError, Result};

/// A strictly positive input/output pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Activity {
    inputs: Vec<f64>,
    outputs: Vec<f64>,
}

impl Activity {
    pub fn new(inputs: Vec<f64>, outputs: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() || outputs.is_empty() {
            return Err(DeaError::Dimension(format!(
                "activity needs at least one input and one output (got m={}, s={})",
                inputs.len(),
                outputs.len()
            )));
        }
        for (k, v) in inputs.iter().enumerate() {
            if !(v.is_finite() && *v > 0.0) {
                return Err(DeaError::InvalidData(format!("input {k} is {v}, expected > 0")));
            }
        }
        for (k, v) in outputs.iter().enumerate() {
            if !(v.is_finite() && *v > 0.0) {
                return Err(DeaError::InvalidData(format!("output {k} is {v}, expected > 0")));
            }
        }
        Ok(Self { inputs, outputs })
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    pub fn m(&self) -> usize {
        self.inputs.len()
    }

    pub fn s(&self) -> usize {
        self.outputs.len()
    }

    /// Copy with input `i` replaced.
    pub fn with_input(&self, i: usize, value: f64) -> Result<Self> {
        let mut inputs = self.inputs.clone();
        inputs[i] = value;
        Self::new(inputs, self.outputs.clone())
    }

    /// Copy with output `r` replaced.
    pub fn with_output(&self, r: usize, value: f64) -> Result<Self> {
        let mut outputs = self.outputs.clone();
        outputs[r] = value;
        Self::new(self.inputs.clone(), outputs)
    }

    /// Copy moved into the interior of its dominance cone by a relative `k`:
    /// inputs scaled by `1 + k`, outputs by `1 - k`.
    pub(crate) fn nudged_inward(&self, k: f64) -> Activity {
        Self {
            inputs: self.inputs.iter().map(|v| v * (1.0 + k)).collect(),
            outputs: self.outputs.iter().map(|v| v * (1.0 - k)).collect(),
        }
    }

    pub(crate) fn same_shape(&self, other: &Activity) -> Result<()> {
        if self.m() != other.m() || self.s() != other.s() {
            return Err(DeaError::Dimension(format!(
                "activity shapes differ: ({}, {}) vs ({}, {})",
                self.m(),
                self.s(),
                other.m(),
                other.s()
            )));
        }
        Ok(())
    }
}

/// Result of a dominance comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dominance {
    pub dominated: bool,
    pub strict: bool,
}

/// Whether `a` is dominated by `b`: `b` uses no more of any input and produces
/// no less of any output.
pub fn is_dominated_by(a: &Activity, b: &Activity) -> Result<Dominance> {
    a.same_shape(b)?;
    let dominated = b.inputs.iter().zip(&a.inputs).all(|(bi, ai)| bi <= ai)
        && b.outputs.iter().zip(&a.outputs).all(|(bo, ao)| bo >= ao);
    Ok(Dominance {
        dominated,
        strict: dominated && a != b,
    })
}

/// The named DMUs that span a production possibility set.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet {
    names: Vec<String>,
    dmus: Vec<Activity>,
}

impl ReferenceSet {
    pub fn new(names: Vec<String>, dmus: Vec<Activity>) -> Result<Self> {
        if dmus.is_empty() {
            return Err(DeaError::InvalidData("reference set is empty".into()));
        }
        if names.len() != dmus.len() {
            return Err(DeaError::Dimension(format!(
                "{} names for {} activities",
                names.len(),
                dmus.len()
            )));
        }
        for d in &dmus[1..] {
            dmus[0].same_shape(d)?;
        }
        Ok(Self { names, dmus })
    }

    /// Builds a set from an m×n input matrix and an s×n output matrix given as
    /// row vectors.
    pub fn from_matrices(names: Vec<String>, x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<Self> {
        let n = names.len();
        if x.iter().chain(y).any(|row| row.len() != n) {
            return Err(DeaError::Dimension(format!("data rows must have {n} columns")));
        }
        let dmus = (0..n)
            .map(|j| {
                Activity::new(
                    x.iter().map(|row| row[j]).collect(),
                    y.iter().map(|row| row[j]).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(names, dmus)
    }

    /// Unnamed set, DMUs labelled `D1..Dn`.
    pub fn from_activities(dmus: Vec<Activity>) -> Result<Self> {
        let names = (1..=dmus.len()).map(|k| format!("D{k}")).collect();
        Self::new(names, dmus)
    }

    pub fn n(&self) -> usize {
        self.dmus.len()
    }

    pub fn m(&self) -> usize {
        self.dmus[0].m()
    }

    pub fn s(&self) -> usize {
        self.dmus[0].s()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn activities(&self) -> &[Activity] {
        &self.dmus
    }

    pub fn activity(&self, j: usize) -> &Activity {
        &self.dmus[j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Input `i` of DMU `j`.
    #[inline]
    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.dmus[j].inputs[i]
    }

    /// Output `r` of DMU `j`.
    #[inline]
    pub fn y(&self, r: usize, j: usize) -> f64 {
        self.dmus[j].outputs[r]
    }

    /// The set with DMU `j` removed; fails if that would leave it empty.
    pub fn without(&self, j: usize) -> Result<Self> {
        let mut names = self.names.clone();
        let mut dmus = self.dmus.clone();
        names.remove(j);
        dmus.remove(j);
        Self::new(names, dmus)
    }

    pub fn with_activity(&self, name: impl Into<String>, activity: Activity) -> Result<Self> {
        self.check(&activity)?;
        let mut names = self.names.clone();
        let mut dmus = self.dmus.clone();
        names.push(name.into());
        dmus.push(activity);
        Self::new(names, dmus)
    }

    pub fn replace(&self, j: usize, activity: Activity) -> Result<Self> {
        self.check(&activity)?;
        let mut dmus = self.dmus.clone();
        dmus[j] = activity;
        Self::new(self.names.clone(), dmus)
    }

    pub(crate) fn check(&self, a: &Activity) -> Result<()> {
        self.dmus[0].same_shape(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    NonOriented,
    Input,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Returns {
    #[default]
    Constant,
    Variable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceBundle {
    /// LP feasibility.
    pub eps_feas: f64,
    /// "Slack is zero" decisions.
    pub eps_zero: f64,
    /// Score equality.
    pub eps_score: f64,
    /// Output margin keeping `t⁺ <= (1 - eps_pos) y`.
    pub eps_pos: f64,
    /// Outer optimizer tolerance.
    pub outer_tol: f64,
}

impl Default for ToleranceBundle {
    fn default() -> Self {
        Self {
            eps_feas: 1e-9,
            eps_zero: 1e-7,
            eps_score: 1e-6,
            eps_pos: 1e-6,
            outer_tol: 1e-6,
        }
    }
}

impl ToleranceBundle {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("eps_feas", self.eps_feas),
            ("eps_zero", self.eps_zero),
            ("eps_score", self.eps_score),
            ("eps_pos", self.eps_pos),
            ("outer_tol", self.outer_tol),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v < 1e-2) {
                return Err(DeaError::Config(format!("{name}={v} must lie in (0, 1e-2)")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelConfig {
    pub orientation: Orientation,
    pub rts: Returns,
    pub input_weights: Option<Vec<f64>>,
    pub output_weights: Option<Vec<f64>>,
    pub tol: ToleranceBundle,
    /// Inner LP solves allowed per outer optimization; `None` means
    /// `5000 * (m + s)`.
    pub outer_budget: Option<usize>,
}

impl ModelConfig {
    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn with_rts(mut self, rts: Returns) -> Self {
        self.rts = rts;
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.outer_budget = Some(budget);
        self
    }

    pub fn with_weights(mut self, input: Option<Vec<f64>>, output: Option<Vec<f64>>) -> Self {
        self.input_weights = input;
        self.output_weights = output;
        self
    }

    pub fn budget_for(&self, m: usize, s: usize) -> usize {
        self.outer_budget.unwrap_or(5000 * (m + s))
    }

    pub fn validate(&self, m: usize, s: usize) -> Result<()> {
        self.tol.validate()?;
        if self.outer_budget == Some(0) {
            return Err(DeaError::Config("outer_budget must be at least 1".into()));
        }
        for (label, w, len) in [
            ("input", &self.input_weights, m),
            ("output", &self.output_weights, s),
        ] {
            if let Some(w) = w {
                if w.len() != len {
                    return Err(DeaError::Dimension(format!(
                        "{} {label} weights for {len} {label}s",
                        w.len()
                    )));
                }
                if w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(DeaError::Config(format!("{label} weights must be positive")));
                }
            }
        }
        Ok(())
    }

    /// Normalized input weights `w⁻ / Σw⁻` (all `1/m` when unweighted).
    pub fn input_coeffs(&self, m: usize) -> Vec<f64> {
        normalized(self.input_weights.as_deref(), m)
    }

    /// Normalized output weights `w⁺ / Σw⁺` (all `1/s` when unweighted).
    pub fn output_coeffs(&self, s: usize) -> Vec<f64> {
        normalized(self.output_weights.as_deref(), s)
    }

    /// Coefficients of the input and output slack terms actually priced by
    /// the chosen orientation.
    pub(crate) fn priced_coeffs(&self, m: usize, s: usize) -> (Vec<f64>, Vec<f64>) {
        let cin = self.input_coeffs(m);
        let cout = self.output_coeffs(s);
        match self.orientation {
            Orientation::NonOriented => (cin, cout),
            Orientation::Input => (cin, vec![0.0; s]),
            Orientation::Output => (vec![0.0; m], cout),
        }
    }
}

fn normalized(w: Option<&[f64]>, len: usize) -> Vec<f64> {
    match w {
        Some(w) => {
            let total: f64 = w.iter().sum();
            w.iter().map(|v| v / total).collect()
        }
        None => vec![1.0 / len as f64; len],
    }
}

/// Region of the activity space relative to the reference frontier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Inefficient.
    I,
    /// Efficient, super-efficiency projection efficient.
    II,
    /// Efficient, super-efficiency projection inefficient.
    III,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
        })
    }
}

/// Which certificate decides between Regions II and III.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegionRule {
    /// The canonical super-efficiency projection is efficient.
    #[default]
    Projection,
    /// The dominated part of the technology contains an efficient activity.
    Pbar,
}
