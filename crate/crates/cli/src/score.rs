//! `score`: one row per DMU, each scored against the others by default.

use std::str::FromStr;

use compsbm::{
    composite_scores, csbm, delta_star_core, jsbm, max_rho_pbar_with, projection_rho_report, Activity, DeaError,
    MaximinOptions, ModelConfig, ReferenceSet, Region, RegionRule,
};
use rayon::prelude::*;

use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Delta,
    RhoProjection,
    MaxRhoPbar,
    Jsbm,
    Csbm,
    GammaLow,
    Gamma,
    GammaSe,
    Sigma,
    Region,
    Converged,
    Status,
}

impl Field {
    pub const DEFAULT: [Field; 11] = [
        Field::Delta,
        Field::RhoProjection,
        Field::MaxRhoPbar,
        Field::Jsbm,
        Field::Csbm,
        Field::GammaLow,
        Field::Gamma,
        Field::GammaSe,
        Field::Region,
        Field::Converged,
        Field::Status,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Field::Delta => "delta",
            Field::RhoProjection => "rho_proj",
            Field::MaxRhoPbar => "max_rho",
            Field::Jsbm => "jsbm",
            Field::Csbm => "csbm",
            Field::GammaLow => "gamma_low",
            Field::Gamma => "gamma",
            Field::GammaSe => "gamma_se",
            Field::Sigma => "sigma",
            Field::Region => "region",
            Field::Converged => "converged",
            Field::Status => "status",
        }
    }

    /// Needs the outer maximization over the dominated set.
    fn needs_maximin(self) -> bool {
        matches!(self, Field::MaxRhoPbar | Field::Gamma | Field::GammaSe | Field::Converged)
    }
}

impl FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let all = [Field::Sigma].into_iter().chain(Field::DEFAULT);
        for f in all {
            if f.key() == s {
                return Ok(f);
            }
        }
        let keys: Vec<&str> = Field::DEFAULT.iter().chain(&[Field::Sigma]).map(|f| f.key()).collect();
        Err(format!("unknown score `{s}` (expected one of {})", keys.join(", ")))
    }
}

#[derive(Debug, Clone)]
pub struct ScoreOptions {
    pub config: ModelConfig,
    pub fields: Vec<Field>,
    pub exclude_self: bool,
    pub region_rule: RegionRule,
    pub maximin: MaximinOptions,
}

/// Values for one DMU; `None` where not requested or not computed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreRow {
    pub name: String,
    pub delta: Option<f64>,
    pub rho_projection: Option<f64>,
    pub max_rho_pbar: Option<f64>,
    pub jsbm: Option<f64>,
    pub csbm: Option<f64>,
    pub gamma_low: Option<f64>,
    pub gamma: Option<f64>,
    pub gamma_se: Option<f64>,
    pub sigma: Option<f64>,
    pub region: Option<Region>,
    pub converged: Option<bool>,
    /// `ok`, `infeasible` or `error: ...`.
    pub status: String,
}

impl ScoreRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    fn cell(&self, f: Field) -> Cell {
        match f {
            Field::Delta => Cell::num(self.delta),
            Field::RhoProjection => Cell::num(self.rho_projection),
            Field::MaxRhoPbar => Cell::num(self.max_rho_pbar),
            Field::Jsbm => Cell::num(self.jsbm),
            Field::Csbm => Cell::num(self.csbm),
            Field::GammaLow => Cell::num(self.gamma_low),
            Field::Gamma => Cell::num(self.gamma),
            Field::GammaSe => Cell::num(self.gamma_se),
            Field::Sigma => Cell::num(self.sigma),
            Field::Region => Cell::Text(self.region.map(|r| r.to_string()).unwrap_or_default()),
            Field::Converged => match self.converged {
                Some(b) => Cell::Bool(b),
                None => Cell::Text(String::new()),
            },
            Field::Status => Cell::Text(self.status.clone()),
        }
    }
}

fn status_of(e: &DeaError) -> String {
    match e {
        DeaError::InfeasibleOriented(_) => "infeasible".into(),
        other => format!("error: {other}"),
    }
}

pub fn score_one(name: &str, a: &Activity, reference: &ReferenceSet, opts: &ScoreOptions) -> ScoreRow {
    let mut row = ScoreRow {
        name: name.to_string(),
        ..ScoreRow::default()
    };
    match fill(&mut row, a, reference, opts) {
        Ok(()) => row.status = "ok".into(),
        Err(e) => {
            row = ScoreRow {
                name: name.to_string(),
                status: status_of(&e),
                ..ScoreRow::default()
            }
        }
    }
    row
}

fn fill(row: &mut ScoreRow, a: &Activity, reference: &ReferenceSet, opts: &ScoreOptions) -> compsbm::Result<()> {
    let cfg = &opts.config;
    let wants = |f: Field| opts.fields.contains(&f);
    if opts.fields.iter().any(|f| f.needs_maximin()) {
        let c = composite_scores(a, reference, cfg, &opts.maximin)?;
        let region = match (opts.region_rule, c.region) {
            (RegionRule::Pbar, Region::III) if c.max_rho_pbar.value >= 1.0 - cfg.tol.eps_score => Region::II,
            (_, r) => r,
        };
        row.delta = Some(c.delta);
        row.rho_projection = Some(c.rho_projection);
        row.max_rho_pbar = Some(c.max_rho_pbar.value);
        row.jsbm = Some(c.jsbm);
        row.csbm = Some(c.csbm);
        row.gamma_low = Some(c.gamma_low);
        row.gamma = Some(c.gamma);
        row.gamma_se = Some(c.gamma_se);
        row.sigma = Some(c.sigma);
        row.region = Some(region);
        row.converged = Some(c.max_rho_pbar.converged);
        return Ok(());
    }
    // LP-only path.
    let delta = delta_star_core(a, reference, cfg)?;
    let d = delta.score;
    row.delta = Some(d);
    if [Field::RhoProjection, Field::GammaLow, Field::Sigma].into_iter().any(wants) {
        let p = projection_rho_report(a, reference, cfg)?.value;
        row.rho_projection = Some(p);
        row.gamma_low = Some(d * p);
        row.sigma = Some((d - 1.0) * p + 1.0);
    }
    if wants(Field::Csbm) {
        row.csbm = Some(csbm(a, reference, cfg)?);
    }
    if wants(Field::Jsbm) {
        row.jsbm = Some(jsbm(a, reference, cfg)?);
    }
    if wants(Field::Region) {
        let r = compsbm::delta_star(a, reference, cfg)?.region.expect("region is set");
        row.region = Some(match (opts.region_rule, r) {
            (RegionRule::Pbar, Region::III) => {
                let best = max_rho_pbar_with(a, reference, cfg, &opts.maximin)?;
                if best.value >= 1.0 - cfg.tol.eps_score {
                    Region::II
                } else {
                    Region::III
                }
            }
            (_, r) => r,
        });
    }
    Ok(())
}

/// Scores every DMU in input order on the current rayon pool.
pub fn score_all(set: &ReferenceSet, opts: &ScoreOptions) -> Result<Vec<ScoreRow>, DeaError> {
    opts.config.validate(set.m(), set.s())?;
    if opts.exclude_self && set.n() < 2 {
        return Err(DeaError::InvalidData("leave-one-out scoring needs at least two DMUs".into()));
    }
    let rows = (0..set.n())
        .into_par_iter()
        .map(|j| {
            let name = &set.names()[j];
            let a = set.activity(j);
            if opts.exclude_self {
                match set.without(j) {
                    Ok(r) => score_one(name, a, &r, opts),
                    Err(e) => ScoreRow {
                        name: name.clone(),
                        status: status_of(&e),
                        ..ScoreRow::default()
                    },
                }
            } else {
                score_one(name, a, set, opts)
            }
        })
        .collect();
    Ok(rows)
}

pub fn to_table(rows: &[ScoreRow], fields: &[Field]) -> Table {
    let mut header = vec!["name".to_string()];
    header.extend(fields.iter().map(|f| f.key().to_string()));
    let body = rows
        .iter()
        .map(|r| {
            let mut cells = vec![Cell::Text(r.name.clone())];
            cells.extend(fields.iter().map(|f| r.cell(*f)));
            cells
        })
        .collect();
    Table { header, rows: body }
}

#[cfg(test)]
mod tests {
    use super::*;
    use compsbm::datasets::six_unit;

    fn opts(fields: &[Field]) -> ScoreOptions {
        ScoreOptions {
            config: ModelConfig::default(),
            fields: fields.to_vec(),
            exclude_self: true,
            region_rule: RegionRule::Projection,
            maximin: MaximinOptions::default(),
        }
    }

    #[test]
    fn parse_fields() {
        assert_eq!("gamma_low".parse::<Field>().unwrap(), Field::GammaLow);
        assert_eq!("sigma".parse::<Field>().unwrap(), Field::Sigma);
        assert!("gamma2".parse::<Field>().is_err());
    }

    #[test]
    fn lp_only_path_agrees_with_full_path() {
        let set = six_unit();
        let light = score_all(&set, &opts(&[Field::Delta, Field::RhoProjection, Field::Csbm, Field::Jsbm, Field::GammaLow, Field::Region])).unwrap();
        let full = score_all(&set, &opts(&Field::DEFAULT)).unwrap();
        for (l, f) in light.iter().zip(&full) {
            assert!(l.is_ok() && f.is_ok());
            assert_eq!(l.max_rho_pbar, None);
            for (a, b) in [(l.delta, f.delta), (l.rho_projection, f.rho_projection), (l.csbm, f.csbm), (l.jsbm, f.jsbm), (l.gamma_low, f.gamma_low)] {
                assert!((a.unwrap() - b.unwrap()).abs() < 1e-9);
            }
            assert_eq!(l.region, f.region);
        }
    }

    #[test]
    fn pbar_rule_moves_d5() {
        let set = six_unit();
        let mut o = opts(&[Field::Region]);
        assert_eq!(score_all(&set, &o).unwrap()[4].region, Some(Region::III));
        o.region_rule = RegionRule::Pbar;
        assert_eq!(score_all(&set, &o).unwrap()[4].region, Some(Region::II));
        o.fields = Field::DEFAULT.to_vec();
        assert_eq!(score_all(&set, &o).unwrap()[4].region, Some(Region::II));
    }
}
