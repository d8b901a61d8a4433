//! Running identities symbolically or at exact sample points.

use serde::{Deserialize, Serialize};

use crate::coeff::CoefficientFunction;
use crate::error::Result;
use crate::forms::{mask_indices, DifferentialForm, Matrix, MetricTensor, Point};
use crate::jet::Jet;
use crate::relations::Relations;
use crate::report::{CheckEntry, Status};
use crate::sampling::{first_hit, sample_points};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Symbolic,
    Sampled,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "symbolic" => Ok(Mode::Symbolic),
            "sampled" => Ok(Mode::Sampled),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

/// A residual that must vanish.
#[derive(Clone, Debug)]
pub enum Tensor<C: Scalar> {
    Scalar(C),
    Form(DifferentialForm<C>),
    Matrix(Matrix<C>),
}

impl<C: Scalar> Tensor<C> {
    pub fn metric(g: MetricTensor<C>) -> Self {
        Tensor::Matrix(g.matrix().clone())
    }

    /// First non-vanishing entry as `(position, value)`.
    pub fn first_nonzero(&self, rel: &Relations) -> Option<(String, C)> {
        match self {
            Tensor::Scalar(c) => (!c.vanishes(rel)).then(|| ("scalar".to_string(), c.reduce(rel))),
            Tensor::Form(f) => f.terms().iter().find(|(_, c)| !c.vanishes(rel)).map(|(m, c)| (format!("{:?}", mask_indices(*m)), c.reduce(rel))),
            Tensor::Matrix(m) => {
                for (i, r) in m.iter().enumerate() {
                    for (j, c) in r.iter().enumerate() {
                        if !c.vanishes(rel) {
                            return Some((format!("[{i}][{j}]"), c.reduce(rel)));
                        }
                    }
                }
                None
            }
        }
    }

    fn count_nonzero(&self, rel: &Relations) -> usize {
        match self {
            Tensor::Scalar(c) => usize::from(!c.vanishes(rel)),
            Tensor::Form(f) => f.terms().values().filter(|c| !c.vanishes(rel)).count(),
            Tensor::Matrix(m) => m.iter().flatten().filter(|c| !c.vanishes(rel)).count(),
        }
    }
}

/// Summary of the first non-vanishing residual, or `None` if all vanish.
pub fn residual_summary<C: Scalar>(parts: &[Tensor<C>], rel: &Relations, names: &[String]) -> Option<String> {
    let total: usize = parts.iter().map(|t| t.count_nonzero(rel)).sum();
    for (k, t) in parts.iter().enumerate() {
        if let Some((pos, c)) = t.first_nonzero(rel) {
            let mut s = format!("{total} nonzero entr{}; first in part {k} at {pos} = {}", if total == 1 { "y" } else { "ies" }, c.describe(names));
            if s.len() > 240 {
                let mut cut = 240;
                while !s.is_char_boundary(cut) {
                    cut -= 1;
                }
                s.truncate(cut);
                s.push_str("...");
            }
            return Some(s);
        }
    }
    None
}

/// Executes identities in the configured mode over one chart.
#[derive(Clone, Debug)]
pub struct Verifier {
    pub mode: Mode,
    pub samples: usize,
    pub seed: u64,
    pub points: Vec<Point>,
    pub scalars: Vec<String>,
    pub relations: Relations,
}

impl Verifier {
    pub fn new(mode: Mode, samples: usize, seed: u64, scalars: Vec<String>, relations: Relations, admissible: impl Fn(&Point) -> bool) -> Result<Self> {
        let points = sample_points(scalars.len(), &relations, samples, seed, admissible)?;
        Ok(Verifier { mode, samples, seed, points, scalars, relations })
    }

    /// Verifier without sample points; only symbolic checks are possible.
    pub fn symbolic_only(scalars: Vec<String>, relations: Relations) -> Self {
        Verifier { mode: Mode::Symbolic, samples: 0, seed: 0, points: Vec::new(), scalars, relations }
    }

    pub fn mode_label(&self) -> String {
        match self.mode {
            Mode::Symbolic => "symbolic".into(),
            Mode::Sampled => self.pointwise_label(),
        }
    }

    pub fn pointwise_label(&self) -> String {
        format!("sampled(n={}, seed={})", self.points.len(), self.seed)
    }

    /// Identity that must hold: symbolic residual in symbolic mode, jets at
    /// every sample point in sampled mode.
    pub fn identity(
        &self,
        name: &str,
        symbolic: impl FnOnce() -> Result<Vec<Tensor<CoefficientFunction>>>,
        pointwise: impl Fn(&Point) -> Result<Vec<Tensor<Jet>>> + Sync + Send,
    ) -> CheckEntry {
        match self.mode {
            Mode::Symbolic => self.symbolic_identity(name, symbolic),
            Mode::Sampled => self.sampled_identity(name, pointwise),
        }
    }

    pub fn symbolic_identity(&self, name: &str, symbolic: impl FnOnce() -> Result<Vec<Tensor<CoefficientFunction>>>) -> CheckEntry {
        match symbolic() {
            Ok(parts) => match residual_summary(&parts, &self.relations, &self.scalars) {
                None => CheckEntry::identity(name, "symbolic", true, "0"),
                Some(s) => CheckEntry::identity(name, "symbolic", false, s),
            },
            Err(e) => CheckEntry::identity(name, "symbolic", false, format!("error: {e}")),
        }
    }

    pub fn sampled_identity(&self, name: &str, pointwise: impl Fn(&Point) -> Result<Vec<Tensor<Jet>>> + Sync + Send) -> CheckEntry {
        let label = self.pointwise_label();
        let rel = Relations::none();
        let hit = first_hit(&self.points, |pt| Ok(residual_summary(&pointwise(pt)?, &rel, &self.scalars)));
        match hit {
            Ok(None) => CheckEntry::identity(name, &label, true, "0"),
            Ok(Some((i, s))) => CheckEntry::identity(name, &label, false, s).with_witness(Some(&self.points[i])),
            Err(e) => CheckEntry::identity(name, &label, false, format!("error: {e}")),
        }
    }

    /// Falsification: passes iff the residual is nonzero at some sample
    /// point, which is recorded as the witness.
    pub fn witness(&self, name: &str, pointwise: impl Fn(&Point) -> Result<Vec<Tensor<Jet>>> + Sync + Send) -> CheckEntry {
        let label = self.pointwise_label();
        let rel = Relations::none();
        match first_hit(&self.points, |pt| Ok(residual_summary(&pointwise(pt)?, &rel, &self.scalars))) {
            Ok(Some((i, s))) => CheckEntry::new(name, &label, Status::Pass, false, format!("expected nonzero residual found: {s}")).with_witness(Some(&self.points[i])),
            Ok(None) => CheckEntry::new(name, &label, Status::Fail, true, "residual vanished at every sample point"),
            Err(e) => CheckEntry::new(name, &label, Status::Fail, false, format!("error: {e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::sampling::Lift;

    #[test]
    fn both_modes_agree_on_a_true_identity() {
        let ch = Chart::coordinate(&["x", "y"]);
        let f = ch.parse("x^2*y/(1 + y^2)").unwrap();
        let df = ch.d_function(&f);
        for mode in [Mode::Symbolic, Mode::Sampled] {
            let v = Verifier::new(mode, 5, 1, ch.scalars.clone(), Relations::none(), |_| true).unwrap();
            let e = v.identity(
                "dd",
                || Ok(vec![Tensor::Form(ch.d(&df))]),
                |pt| {
                    let fr = ch.lift(pt, 2)?;
                    let j = f.lift(pt, 2)?;
                    Ok(vec![Tensor::Form(fr.d(&fr.d_function(&j)))])
                },
            );
            assert_eq!(e.status, Status::Pass, "{e:?}");
        }
    }

    #[test]
    fn sampled_failure_has_witness() {
        let ch = Chart::coordinate(&["x"]);
        let f = ch.parse("x").unwrap();
        let v = Verifier::new(Mode::Sampled, 3, 2, ch.scalars.clone(), Relations::none(), |p| !p.values[0].is_zero()).unwrap();
        let e = v.identity("x_is_zero", || unreachable!(), |pt| Ok(vec![Tensor::Scalar(f.lift(pt, 0)?)]));
        assert_eq!(e.status, Status::Fail);
        assert_eq!(e.witness_point.as_ref().unwrap()[0], v.points[0].values[0].to_string());
        let w = v.witness("x_nonzero", |pt| Ok(vec![Tensor::Scalar(f.lift(pt, 0)?)]));
        assert_eq!(w.status, Status::Pass);
    }
}
