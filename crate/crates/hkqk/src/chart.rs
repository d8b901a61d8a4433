//! Charts: a coframe with declared structure equations and scalar
//! generators with declared differentials.

use serde::{Deserialize, Serialize};

use crate::coeff::CoefficientFunction;
use crate::error::{Error, Result};
use crate::expr::parse_coefficient;
use crate::forms::{mask_indices, wedge_sign, Accumulator, DifferentialForm, MetricTensor, Point, VectorField};
use crate::jet::Jet;
use crate::relations::Relations;
use crate::report::{summarize_form, CheckEntry, VerificationReport};
use crate::scalar::Scalar;

/// Structure data of a chart with coefficients in `C`.
#[derive(Clone, Debug)]
pub struct Frame<C: Scalar = CoefficientFunction> {
    /// `d theta^i` for each coframe element.
    pub structure: Vec<DifferentialForm<C>>,
    /// `d s_j` for each scalar generator.
    pub differentials: Vec<DifferentialForm<C>>,
    pub relations: Relations,
}

/// Splits `mask` around bit `i` into the bits below and above it.
fn split_at(mask: u64, i: usize) -> (u64, u64) {
    let below = mask & ((1u64 << i) - 1);
    let above = mask & !below & !(1u64 << i);
    (below, above)
}

/// Pushes `c * theta^A ^ lam ^ theta^B` where `lam` is a form.
fn push_inserted<C: Scalar>(acc: &mut Accumulator<C>, below: u64, above: u64, lam: &DifferentialForm<C>, c: &C) {
    for (m, l) in lam.terms() {
        let s1 = wedge_sign(below, *m);
        if s1 == 0 {
            continue;
        }
        let s2 = wedge_sign(below | m, above);
        if s2 == 0 {
            continue;
        }
        let v = c.times(l);
        acc.push(below | m | above, if s1 * s2 < 0 { v.negate() } else { v });
    }
}

impl<C: Scalar> Frame<C> {
    pub fn dim(&self) -> usize {
        self.structure.len()
    }

    pub fn num_scalars(&self) -> usize {
        self.differentials.len()
    }

    /// `df = sum_j (df/ds_j) ds_j`.
    pub fn d_function(&self, f: &C) -> DifferentialForm<C> {
        let mut acc = Accumulator::new();
        for (j, ds) in self.differentials.iter().enumerate() {
            if ds.is_zero() {
                continue;
            }
            let p = f.partial(j);
            if p.is_zero() {
                continue;
            }
            for (m, c) in ds.terms() {
                acc.push(*m, p.times(c));
            }
        }
        acc.finish(self.dim(), 1, Some(&self.relations))
    }

    /// Exterior derivative by the Leibniz rule on components.
    pub fn d(&self, alpha: &DifferentialForm<C>) -> DifferentialForm<C> {
        let n = self.dim();
        let deg = alpha.degree() + 1;
        if alpha.is_zero() || deg > n {
            return DifferentialForm::zero(n, deg);
        }
        let mut acc = Accumulator::new();
        for (mask, c) in alpha.terms() {
            let dc = self.d_function(c);
            for (m1, v) in dc.terms() {
                let s = wedge_sign(*m1, *mask);
                if s != 0 {
                    acc.push(m1 | mask, if s < 0 { v.negate() } else { v.clone() });
                }
            }
            // c * sum_k (-1)^k theta^{<k} ^ d theta^{i_k} ^ theta^{>k}
            for (k, i) in mask_indices(*mask).into_iter().enumerate() {
                let (below, above) = split_at(*mask, i);
                let ck = if k % 2 == 1 { c.negate() } else { c.clone() };
                push_inserted(&mut acc, below, above, &self.structure[i], &ck);
            }
        }
        acc.finish(n, deg, Some(&self.relations))
    }

    /// Directional derivative `X(f)`.
    pub fn vector_apply(&self, x: &VectorField<C>, f: &C) -> C {
        let parts: Vec<C> = self
            .differentials
            .iter()
            .enumerate()
            .filter_map(|(j, ds)| {
                let xs = x.pair(ds);
                if xs.is_zero() {
                    return None;
                }
                let p = f.partial(j);
                (!p.is_zero()).then(|| p.times(&xs))
            })
            .collect();
        C::sum_all(&parts).reduce(&self.relations)
    }

    /// `L_X theta^i = d(X^i) + X -| d theta^i` for every coframe element.
    pub fn lie_coframe(&self, x: &VectorField<C>) -> Result<Vec<DifferentialForm<C>>> {
        self.check_vector(x)?;
        (0..self.dim())
            .map(|i| Ok(self.d_function(&x.components()[i]).add(&self.structure[i].interior(x)?).reduce(&self.relations)))
            .collect()
    }

    fn check_vector(&self, x: &VectorField<C>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::ChartMismatch { left: self.dim(), right: x.dim() });
        }
        Ok(())
    }

    fn check_form(&self, a: &DifferentialForm<C>) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::ChartMismatch { left: self.dim(), right: a.dim() });
        }
        Ok(())
    }

    /// Lie derivative as the degree-0 derivation extending `X(f)` and `L_X theta^i`.
    pub fn lie(&self, x: &VectorField<C>, alpha: &DifferentialForm<C>) -> Result<DifferentialForm<C>> {
        self.check_form(alpha)?;
        let lam = self.lie_coframe(x)?;
        self.lie_with(x, &lam, alpha)
    }

    /// Lie derivative given precomputed `L_X theta^i`.
    pub fn lie_with(&self, x: &VectorField<C>, lam: &[DifferentialForm<C>], alpha: &DifferentialForm<C>) -> Result<DifferentialForm<C>> {
        let mut acc = Accumulator::new();
        for (mask, c) in alpha.terms() {
            acc.push(*mask, self.vector_apply(x, c));
            for i in mask_indices(*mask) {
                let (below, above) = split_at(*mask, i);
                push_inserted(&mut acc, below, above, &lam[i], c);
            }
        }
        Ok(acc.finish(self.dim(), alpha.degree(), Some(&self.relations)))
    }

    /// `(L_X g)_{kl} = X(g_kl) + sum_i (g_il L^i_k + g_ki L^i_l)` where
    /// `L_X theta^i = sum_k L^i_k theta^k`.
    pub fn lie_metric(&self, x: &VectorField<C>, g: &MetricTensor<C>) -> Result<MetricTensor<C>> {
        let n = self.dim();
        if g.dim() != n {
            return Err(Error::ChartMismatch { left: n, right: g.dim() });
        }
        let lam = self.lie_coframe(x)?;
        let l: Vec<Vec<C>> = lam.iter().map(|f| (0..n).map(|k| f.coefficient(&[k])).collect()).collect();
        let mut m = vec![vec![C::zero(); n]; n];
        for k in 0..n {
            for j in k..n {
                let mut parts = vec![self.vector_apply(x, g.get(k, j))];
                for (i, li) in l.iter().enumerate() {
                    if !li[k].is_zero() && !g.get(i, j).is_zero() {
                        parts.push(g.get(i, j).times(&li[k]));
                    }
                    if !li[j].is_zero() && !g.get(k, i).is_zero() {
                        parts.push(g.get(k, i).times(&li[j]));
                    }
                }
                m[k][j] = C::sum_all(&parts).reduce(&self.relations);
            }
        }
        Ok(MetricTensor::from_matrix(m))
    }

    /// `d(d theta^i)` and `d(d s_j)`; all vanish on a consistent chart.
    pub fn d_squared_residuals(&self) -> (Vec<DifferentialForm<C>>, Vec<DifferentialForm<C>>) {
        let a = self.structure.iter().map(|f| self.d(f)).collect();
        let b = self.differentials.iter().map(|f| self.d(f)).collect();
        (a, b)
    }
}

impl Frame<CoefficientFunction> {
    /// Lifts every structure coefficient to a jet of the given order at `pt`.
    pub fn lift(&self, pt: &Point, order: u32) -> Result<Frame<Jet>> {
        let lift_form = |f: &DifferentialForm<CoefficientFunction>| {
            f.try_map(|idx, c| {
                Jet::lift(c, &pt.values, order).ok_or_else(|| Error::DenominatorVanishes { component: format!("{idx:?}"), point: pt.to_string() })
            })
        };
        Ok(Frame {
            structure: self.structure.iter().map(lift_form).collect::<Result<_>>()?,
            differentials: self.differentials.iter().map(lift_form).collect::<Result<_>>()?,
            relations: Relations::none(),
        })
    }
}

/// A named chart over exact rational functions.
#[derive(Clone, Debug)]
pub struct Chart {
    pub coframe: Vec<String>,
    pub scalars: Vec<String>,
    pub frame: Frame<CoefficientFunction>,
}

impl Chart {
    pub fn new(
        coframe: Vec<String>,
        scalars: Vec<String>,
        structure: Vec<DifferentialForm>,
        differentials: Vec<DifferentialForm>,
        relations: Relations,
    ) -> Result<Self> {
        let n = coframe.len();
        if n == 0 || n > crate::forms::MAX_DIM {
            return Err(Error::MalformedChart(format!("dimension {n} out of range")));
        }
        if structure.len() != n {
            return Err(Error::MalformedChart(format!("{} structure equations for {n} coframe elements", structure.len())));
        }
        if differentials.len() != scalars.len() {
            return Err(Error::MalformedChart(format!("{} differentials for {} scalars", differentials.len(), scalars.len())));
        }
        for (i, f) in structure.iter().enumerate() {
            if f.dim() != n || (f.degree() != 2 && !f.is_zero()) {
                return Err(Error::MalformedChart(format!("d{} must be a 2-form", coframe[i])));
            }
        }
        for (j, f) in differentials.iter().enumerate() {
            if f.dim() != n || (f.degree() != 1 && !f.is_zero()) {
                return Err(Error::MalformedChart(format!("d{} must be a 1-form", scalars[j])));
            }
        }
        for (c, s) in relations.circles() {
            if *c >= scalars.len() || *s >= scalars.len() {
                return Err(Error::MalformedChart("relation refers to a missing scalar".into()));
            }
        }
        let structure = structure.into_iter().map(|f| if f.is_zero() { DifferentialForm::zero(n, 2) } else { f }).collect();
        let differentials = differentials.into_iter().map(|f| if f.is_zero() { DifferentialForm::zero(n, 1) } else { f }).collect();
        Ok(Chart { coframe, scalars, frame: Frame { structure, differentials, relations } })
    }

    /// Coordinate chart `theta^i = dx^i`.
    pub fn coordinate(names: &[&str]) -> Self {
        let n = names.len();
        let coframe = names.iter().map(|s| format!("d{s}")).collect();
        let scalars = names.iter().map(|s| s.to_string()).collect();
        let structure = (0..n).map(|_| DifferentialForm::zero(n, 2)).collect();
        let differentials = (0..n).map(|i| DifferentialForm::basis(n, i)).collect();
        Chart::new(coframe, scalars, structure, differentials, Relations::none()).expect("coordinate chart")
    }

    pub fn dim(&self) -> usize {
        self.coframe.len()
    }

    pub fn num_scalars(&self) -> usize {
        self.scalars.len()
    }

    pub fn relations(&self) -> &Relations {
        &self.frame.relations
    }

    pub fn scalar(&self, name: &str) -> Result<CoefficientFunction> {
        self.scalars
            .iter()
            .position(|s| s == name)
            .map(CoefficientFunction::generator)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn parse(&self, src: &str) -> Result<CoefficientFunction> {
        parse_coefficient(src, &self.scalars)
    }

    pub fn d(&self, alpha: &DifferentialForm) -> DifferentialForm {
        self.frame.d(alpha)
    }

    pub fn d_function(&self, f: &CoefficientFunction) -> DifferentialForm {
        self.frame.d_function(f)
    }

    pub fn lie(&self, x: &VectorField, alpha: &DifferentialForm) -> Result<DifferentialForm> {
        self.frame.lie(x, alpha)
    }

    pub fn lie_metric(&self, x: &VectorField, g: &MetricTensor) -> Result<MetricTensor> {
        self.frame.lie_metric(x, g)
    }

    pub fn vector_apply(&self, x: &VectorField, f: &CoefficientFunction) -> CoefficientFunction {
        self.frame.vector_apply(x, f)
    }

    pub fn reduce(&self, f: &CoefficientFunction) -> CoefficientFunction {
        f.reduce(self.relations())
    }

    pub fn lift(&self, pt: &Point, order: u32) -> Result<Frame<Jet>> {
        self.frame.lift(pt, order)
    }

    pub fn format_form(&self, f: &DifferentialForm) -> String {
        f.format_with(&self.coframe, &self.scalars)
    }

    /// Checks `d^2 = 0` on every coframe element and scalar generator.
    pub fn consistency_check(&self) -> VerificationReport {
        let mut r = VerificationReport::new("chart consistency");
        let (a, b) = self.frame.d_squared_residuals();
        for (i, f) in a.iter().enumerate() {
            let name = format!("d2_coframe[{}]", self.coframe[i]);
            r.push(CheckEntry::identity(&name, "symbolic", f.is_zero(), summarize_form(f, &self.scalars)).with_anchor("chart_consistency"));
        }
        for (j, f) in b.iter().enumerate() {
            let name = format!("d2_scalar[{}]", self.scalars[j]);
            r.push(CheckEntry::identity(&name, "symbolic", f.is_zero(), summarize_form(f, &self.scalars)).with_anchor("chart_consistency"));
        }
        r
    }

    pub fn is_consistent(&self) -> bool {
        let (a, b) = self.frame.d_squared_residuals();
        a.iter().chain(b.iter()).all(|f| f.is_zero())
    }

    pub fn to_doc(&self) -> ChartDoc {
        ChartDoc {
            dim: self.dim(),
            coframe: self.coframe.clone(),
            scalars: self.scalars.clone(),
            relations: self.relations().circles().iter().map(|(c, s)| [self.scalars[*c].clone(), self.scalars[*s].clone()]).collect(),
            structure_equations: self.frame.structure.iter().map(|f| form_terms(f, &self.scalars)).collect(),
            scalar_differentials: self.frame.differentials.iter().map(|f| form_terms(f, &self.scalars)).collect(),
        }
    }

    pub fn from_doc(doc: &ChartDoc) -> Result<Self> {
        let n = doc.dim;
        if doc.coframe.len() != n {
            return Err(Error::MalformedChart(format!("dim {n} but {} coframe names", doc.coframe.len())));
        }
        let mut rel = Relations::none();
        for [c, s] in &doc.relations {
            let pos = |x: &String| doc.scalars.iter().position(|y| y == x).ok_or_else(|| Error::UnknownGenerator(x.clone()));
            rel.add_circle(pos(c)?, pos(s)?);
        }
        let structure = doc.structure_equations.iter().map(|t| parse_form(t, n, 2, &doc.scalars)).collect::<Result<_>>()?;
        let differentials = doc.scalar_differentials.iter().map(|t| parse_form(t, n, 1, &doc.scalars)).collect::<Result<_>>()?;
        Chart::new(doc.coframe.clone(), doc.scalars.clone(), structure, differentials, rel)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("chart serializes")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let doc: ChartDoc = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        Chart::from_doc(&doc)
    }

    pub fn form_to_terms(&self, f: &DifferentialForm) -> Vec<FormTerm> {
        form_terms(f, &self.scalars)
    }

    pub fn form_from_terms(&self, terms: &[FormTerm], degree: usize) -> Result<DifferentialForm> {
        parse_form(terms, self.dim(), degree, &self.scalars)
    }
}

/// One component of a serialized form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormTerm {
    pub indices: Vec<usize>,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartDoc {
    pub dim: usize,
    pub coframe: Vec<String>,
    pub scalars: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<[String; 2]>,
    pub structure_equations: Vec<Vec<FormTerm>>,
    pub scalar_differentials: Vec<Vec<FormTerm>>,
}

fn form_terms(f: &DifferentialForm, scalars: &[String]) -> Vec<FormTerm> {
    f.components().into_iter().map(|(idx, c)| FormTerm { indices: idx, coefficient: c.format_with(scalars) }).collect()
}

fn parse_form(terms: &[FormTerm], dim: usize, degree: usize, scalars: &[String]) -> Result<DifferentialForm> {
    let mut comps = Vec::new();
    for t in terms {
        if t.indices.len() != degree {
            return Err(Error::DegreeMismatch { expected: degree, found: t.indices.len() });
        }
        if t.indices.iter().any(|i| *i >= dim) {
            return Err(Error::MalformedChart(format!("index out of range in {:?}", t.indices)));
        }
        comps.push((t.indices.clone(), parse_coefficient(&t.coefficient, scalars)?));
    }
    Ok(DifferentialForm::from_components(dim, degree, comps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn cf(n: i64) -> CoefficientFunction {
        CoefficientFunction::from_int(n)
    }

    #[test]
    fn coordinate_leibniz() {
        let ch = Chart::coordinate(&["x", "y"]);
        let x = ch.scalar("x").unwrap();
        let alpha = DifferentialForm::monomial(2, &[1], x);
        assert_eq!(ch.d(&alpha), DifferentialForm::monomial(2, &[0, 1], cf(1)));
        assert!(ch.consistency_check().passed());
    }

    #[test]
    fn lie_along_coordinate_field() {
        let ch = Chart::coordinate(&["x", "y"]);
        let x = ch.scalar("x").unwrap();
        let alpha = DifferentialForm::monomial(2, &[1], x);
        let dx = VectorField::new(vec![cf(1), cf(0)]);
        assert_eq!(ch.lie(&dx, &alpha).unwrap(), DifferentialForm::basis(2, 1));
    }

    #[test]
    fn inconsistent_declaration_fails() {
        // d th1 = th1^th2, d th2 = th2^th3 gives d^2 th1 = -th1^th2^th3
        let n = 3;
        let structure = vec![
            DifferentialForm::monomial(n, &[0, 1], cf(1)),
            DifferentialForm::monomial(n, &[1, 2], cf(1)),
            DifferentialForm::zero(n, 2),
        ];
        let ch = Chart::new(vec!["e1".into(), "e2".into(), "e3".into()], vec![], structure, vec![], Relations::none()).unwrap();
        let (a, _) = ch.frame.d_squared_residuals();
        assert_eq!(a[0], DifferentialForm::monomial(n, &[0, 1, 2], cf(-1)));
        assert!(!ch.consistency_check().passed());
    }

    #[test]
    fn json_round_trip() {
        let src = r#"{
            "dim": 2,
            "coframe": ["a", "b"],
            "scalars": ["t"],
            "structure_equations": [[], [{"indices": [0, 1], "coefficient": "-2"}]],
            "scalar_differentials": [[{"indices": [0], "coefficient": "t"}]]
        }"#;
        let ch = Chart::from_json(src).unwrap();
        assert_eq!(ch.frame.structure[1].coefficient(&[0, 1]), cf(-2));
        let again = Chart::from_json(&ch.to_json()).unwrap();
        assert_eq!(again.to_doc(), ch.to_doc());
        assert!(Chart::from_json("{\"dim\": 1}").is_err());
    }

    #[test]
    fn lifted_frame_matches_symbolic_d() {
        let ch = Chart::coordinate(&["x", "y"]);
        let x = ch.scalar("x").unwrap();
        let y = ch.scalar("y").unwrap();
        let f = x.mul(&y).div(&cf(1).add(&x.mul(&x))).unwrap();
        let pt = Point::new(vec![Rational::new(1, 2), Rational::from_int(3)]);
        let jf = ch.lift(&pt, 1).unwrap();
        let lifted = Jet::lift(&f, &pt.values, 1).unwrap();
        let dj = jf.d_function(&lifted);
        let ds = ch.d_function(&f).evaluate(&pt).unwrap();
        for i in 0..2 {
            assert_eq!(dj.coefficient(&[i]).value(), ds.coefficient(&[i]));
        }
    }
}
