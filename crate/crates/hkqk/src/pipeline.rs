//! Model configuration and the end-to-end verification run.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catalog;
use crate::chart::Chart;
use crate::coeff::CoefficientFunction;
use crate::correspondence::{canonical_deformation, falsification_specs, Correspondence, CorrespondenceSummary, DeformationSpec};
use crate::error::{Error, Result};
use crate::forms::Point;
use crate::hk::{verify_four_form, verify_hyperkahler, verify_rotating, verify_symmetry, HyperKahlerStructure, SymmetryData};
use crate::linalg;
use crate::models::cmap::{self, build_cmap_model, verify_cmap, CmapModel, CmapParams};
use crate::models::cone::verify_cone;
use crate::models::flat::{build_flat_model, FlatModel, FlatParams};
use crate::rational::Rational;
use crate::report::{CheckEntry, Status, VerificationReport};
use crate::twist::{smooth_quotient_predicate, verify_twist, TwistData};
use crate::verify::{Mode, Verifier};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Flat,
    Cmap,
}

fn one() -> Rational {
    Rational::one()
}

fn default_samples() -> usize {
    20
}

/// A model parameter file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: ModelKind,
    #[serde(default)]
    pub p: usize,
    #[serde(default)]
    pub q: usize,
    #[serde(default)]
    pub lambdas: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<Rational>,
    #[serde(default)]
    pub c: Rational,
    #[serde(default = "one")]
    pub k: Rational,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub mode: Mode,
    /// Also run the falsification suite.
    #[serde(default)]
    pub falsification: bool,
}

impl ModelConfig {
    pub fn from_json(src: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn flat(p: usize, q: usize, lambdas: &[i64], c: i64) -> Self {
        ModelConfig {
            model: ModelKind::Flat,
            p,
            q,
            lambdas: lambdas.iter().map(|&l| Rational::from_int(l)).collect(),
            lambda2: None,
            c: Rational::from_int(c),
            k: Rational::one(),
            seed: 0,
            samples: 20,
            mode: Mode::Sampled,
            falsification: false,
        }
    }

    pub fn cmap(lambda2: Rational) -> Self {
        ModelConfig {
            model: ModelKind::Cmap,
            p: 0,
            q: 0,
            lambdas: Vec::new(),
            lambda2: Some(lambda2),
            c: Rational::zero(),
            k: Rational::one(),
            seed: 0,
            samples: 20,
            mode: Mode::Sampled,
            falsification: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParams("samples must be at least 1".into()));
        }
        match self.model {
            ModelKind::Flat => {
                if self.lambdas.len() != self.p + self.q {
                    return Err(Error::InvalidParams(format!("{} weights for p + q = {}", self.lambdas.len(), self.p + self.q)));
                }
            }
            ModelKind::Cmap => {
                if self.lambda2.is_none() {
                    return Err(Error::InvalidParams("cmap needs lambda2".into()));
                }
            }
        }
        Ok(())
    }

    pub fn flat_params(&self) -> FlatParams {
        FlatParams::new(self.p, self.q, &self.lambdas, self.c.clone(), self.k.clone())
    }

    pub fn cmap_params(&self) -> CmapParams {
        CmapParams { lambda2: self.lambda2.clone().unwrap_or_default(), c: self.c.clone() }
    }
}

/// The summary block of a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub model: String,
    pub dim: usize,
    #[serde(flatten)]
    pub correspondence: CorrespondenceSummary,
}

/// One `chart_consistency`-style entry for a whole chart.
pub fn consistency_entry(name: &str, chart: &Chart) -> CheckEntry {
    let bad: Vec<String> = chart.consistency_check().failures().iter().map(|e| format!("{}: {}", e.name, e.residual)).collect();
    CheckEntry::identity(name, "symbolic", bad.is_empty(), if bad.is_empty() { "0".into() } else { bad.join("; ") })
}

fn nonzero_at(f: &CoefficientFunction, pt: &Point) -> bool {
    f.eval(&pt.values).is_some_and(|v| !v.is_zero())
}

/// Away from `g(X,X) = 0`, `a = 0`, `mu = c` and `det g^N = 0`.
pub fn admissible(sd: &SymmetryData, td: &TwistData, c: &Rational, gn: Option<&crate::forms::MetricTensor>, pt: &Point) -> bool {
    let pole = sd.mu.sub(&CoefficientFunction::constant(c.clone()));
    if !(nonzero_at(&sd.norm_x2, pt) && nonzero_at(&td.a, pt) && nonzero_at(&pole, pt)) {
        return false;
    }
    match gn {
        Some(g) => g.evaluate(pt).is_ok_and(|m| !linalg::determinant(m.matrix()).is_zero()),
        None => true,
    }
}

fn verifier(cfg: &ModelConfig, chart: &Chart, admissible: impl Fn(&Point) -> bool) -> Result<Verifier> {
    Verifier::new(cfg.mode, cfg.samples, cfg.seed, chart.scalars.clone(), chart.relations().clone(), admissible)
}

/// Pass iff the connection system fails at some sample point.
fn connection_falsifier(corr: &Correspondence, name: &str, v: &Verifier) -> CheckEntry {
    let e = corr.connection_entry(name, v);
    if e.status == Status::Fail && e.residual.starts_with("unsolvable") {
        CheckEntry { status: Status::Pass, residual: format!("expected failure found: {}", e.residual), ..e }
    } else if e.status == Status::Pass {
        CheckEntry { status: Status::Fail, residual: "connection system solvable at every sample point".into(), ..e }
    } else {
        e
    }
}

struct Common<'a> {
    chart: &'a Chart,
    h: &'a HyperKahlerStructure,
    sd: &'a SymmetryData,
    td: &'a TwistData,
    c: &'a Rational,
    k: &'a Rational,
}

/// Twist and correspondence stages shared by both models.
fn correspondence_stage(m: &Common, twist_valid: bool, falsify: bool, v: &Verifier, r: &mut VerificationReport) -> Result<CorrespondenceSummary> {
    let spec = canonical_deformation(m.sd, m.c, m.chart)?;
    let corr = Correspondence { chart: m.chart, h: m.h, sd: m.sd, td: m.td, spec: &spec, c: m.c.clone(), k: m.k.clone() };
    let (cr, summary) = corr.verify(twist_valid, v)?;
    r.extend(cr);
    if falsify {
        let trivial = m.td.f.is_zero();
        for (name, s) in falsification_specs(&spec, trivial) {
            match s {
                Some(s) => {
                    let s: DeformationSpec = s;
                    let fc = corr.with_spec(&s);
                    r.push(fc.falsify(name, v));
                    if m.chart.dim() == 8 {
                        r.push(connection_falsifier(&fc, &format!("{name}[connection]"), v));
                    }
                }
                None => r.push(CheckEntry::info(name, "F = 0: the undeformed spec is the untwisted hyperKahler metric")),
            }
        }
    }
    Ok(summary)
}

fn finish(mut r: VerificationReport, model: &str, dim: usize, summary: Option<CorrespondenceSummary>) -> VerificationReport {
    r.entries.sort_by_key(|e| catalog::order(&e.name));
    if let Some(s) = summary {
        r.summary = Some(serde_json::to_value(RunSummary { model: model.into(), dim, correspondence: s }).expect("summary serializes"));
    }
    r
}

/// Runs the whole pipeline for a configuration.
pub fn run(cfg: &ModelConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    match cfg.model {
        ModelKind::Flat => run_flat(cfg, &build_flat_model(&cfg.flat_params())?),
        ModelKind::Cmap => run_cmap(cfg),
    }
}

/// The flat pipeline on a built model, whose twist data may be replaced.
pub fn run_flat(cfg: &ModelConfig, m: &FlatModel) -> Result<VerificationReport> {
    let c = &m.params.c;
    let gn = canonical_deformation(&m.sd, c, &m.chart).ok().map(|spec| crate::correspondence::elementary_deformation(&m.h, &m.sd, &spec.f, &spec.h));
    let v = verifier(cfg, &m.chart, |pt| admissible(&m.sd, &m.td, c, gn.as_ref(), pt))?;
    let mut r = VerificationReport::new(format!("flat H^({},{})", m.params.p, m.params.q));
    r.push(consistency_entry("chart_consistency", &m.chart));
    r.extend(verify_hyperkahler(&m.chart, &m.h, &v));
    r.extend(verify_rotating(&m.chart, &m.h, &m.sd.x, &v));
    r.extend(verify_symmetry(&m.chart, &m.h, &m.sd, Some(&m.g_ref), &v));
    r.extend(verify_four_form(&m.chart, &m.h, &m.sd.x, &v));

    let beta = m.f_primitive();
    let c_ext = m.td.a.sub(&m.sd.x.pair(&beta)).constant_value(m.chart.relations());
    let twist = match c_ext {
        Some(c_ext) => verify_twist(&m.chart, &m.h, &m.sd, &m.td, &beta, &c_ext, &v).0,
        None => {
            let mut t = crate::twist::validate_twist_data(&m.chart, &m.td, &v);
            t.push(CheckEntry::identity("principal_lift", "symbolic", false, "a - beta(X) is not constant"));
            t
        }
    };
    let twist_valid = twist.passed();
    r.extend(twist);
    let (orbifold, smooth, text) = smooth_quotient_predicate(m.weights(), c);
    r.push(CheckEntry::info("twist_smooth_quotient", text).with_detail(json!({ "orbifold": orbifold, "smooth": smooth })));
    let bridge = m.bridge_residual();
    r.push(CheckEntry::identity("bridge_beta", "symbolic", bridge.is_zero(), bridge.format_with(&m.chart.scalars)));

    let common = Common { chart: &m.chart, h: &m.h, sd: &m.sd, td: &m.td, c, k: &m.params.k };
    let summary = correspondence_stage(&common, twist_valid, cfg.falsification, &v, &mut r)?;
    Ok(finish(r, "flat", m.chart.dim(), Some(summary)))
}

/// The cone, the special connection and, when it exists, the c-map twist.
pub fn run_cmap(cfg: &ModelConfig) -> Result<VerificationReport> {
    let params = cfg.cmap_params();
    let (cone_report, cone, sc) = verify_cone(&params.lambda2)?;
    let mut r = VerificationReport::new(format!("rigid c-map lambda^2 = {}", params.lambda2));
    r.extend(cone_report);
    let Some(sc) = sc else {
        return Ok(finish(r, "cmap", cmap::DIM, None));
    };
    let m = build_cmap_model(&params, &cone, &sc)?;
    run_cmap_model(cfg, &m, r)
}

fn run_cmap_model(cfg: &ModelConfig, m: &CmapModel, mut r: VerificationReport) -> Result<VerificationReport> {
    let c = &m.params.c;
    let v = verifier(cfg, &m.chart, |pt| cmap::admissible(m, pt))?;
    r.extend(verify_hyperkahler(&m.chart, &m.h, &v));
    r.extend(verify_rotating(&m.chart, &m.h, &m.sd.x, &v));
    r.extend(verify_symmetry(&m.chart, &m.h, &m.sd, None, &v));
    r.extend(verify_four_form(&m.chart, &m.h, &m.sd.x, &v));
    let twist = match m.extension_constant() {
        Ok(c_ext) => verify_twist(&m.chart, &m.h, &m.sd, &m.td, &m.beta, &c_ext, &v).0,
        Err(e) => {
            let mut t = crate::twist::validate_twist_data(&m.chart, &m.td, &v);
            t.push(CheckEntry::identity("principal_lift", "symbolic", false, e.to_string()));
            t
        }
    };
    let twist_valid = twist.passed();
    r.extend(twist);
    r.extend(verify_cmap(m));
    r.push(cmap::qk_connection_entry(m, &v));
    let common = Common { chart: &m.chart, h: &m.h, sd: &m.sd, td: &m.td, c, k: &m.k };
    let summary = correspondence_stage(&common, twist_valid, cfg.falsification, &v, &mut r)?;
    Ok(finish(r, "cmap", cmap::DIM, Some(summary)))
}

/// The chart of the model described by a configuration.
pub fn build_chart(cfg: &ModelConfig) -> Result<Chart> {
    cfg.validate()?;
    match cfg.model {
        ModelKind::Flat => Ok(build_flat_model(&cfg.flat_params())?.chart),
        ModelKind::Cmap => {
            let params = cfg.cmap_params();
            let (_, cone, sc) = verify_cone(&params.lambda2)?;
            let sc = sc.ok_or_else(|| Error::Unsolvable(format!("no special connection for lambda^2 = {}", params.lambda2)))?;
            cmap::cotangent_chart(&cone, &sc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let cfg = ModelConfig::from_json(r#"{"model": "flat", "p": 2, "q": 0, "lambdas": [1, "2"], "c": 1}"#).unwrap();
        assert_eq!(cfg.samples, 20);
        assert_eq!(cfg.lambdas[1], Rational::from_int(2));
        assert!(matches!(ModelConfig::from_json(r#"{"model": "flat", "bogus": 1}"#), Err(Error::Parse(_))));
        assert!(matches!(ModelConfig::from_json(r#"{"model": "flat", "p": 2, "lambdas": [1]}"#), Err(Error::InvalidParams(_))));
        assert!(matches!(ModelConfig::from_json(r#"{"model": "cmap"}"#), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn cmap_with_no_connection_fails_cleanly() {
        let r = run(&ModelConfig::cmap(Rational::one())).unwrap();
        assert!(!r.passed());
        assert!(r.summary.is_none());
    }
}
