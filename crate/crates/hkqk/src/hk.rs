//! HyperKahler structures, rotating symmetries and their derived forms.

use crate::chart::{Chart, Frame};
use crate::coeff::CoefficientFunction;
use crate::error::{Error, Result};
use crate::forms::{two_form_of, DifferentialForm, EndomorphismField, MetricTensor, Point, VectorField};
use crate::jet::Jet;
use crate::linalg::{self, mat_add, mat_mul, mat_sub, transpose};
use crate::rational::Rational;
use crate::report::{CheckEntry, VerificationReport};
use crate::sampling::Lift;
use crate::scalar::Scalar;
use crate::verify::{residual_summary, Tensor, Verifier};

#[derive(Clone, Debug)]
pub struct HyperKahlerStructure<C: Scalar = CoefficientFunction> {
    pub g: MetricTensor<C>,
    pub i: EndomorphismField<C>,
    pub j: EndomorphismField<C>,
    pub k: EndomorphismField<C>,
    pub omega_i: DifferentialForm<C>,
    pub omega_j: DifferentialForm<C>,
    pub omega_k: DifferentialForm<C>,
}

impl<C: Scalar> HyperKahlerStructure<C> {
    /// Builds the structure from g, I, J with K = IJ and omega_A = g(A., .).
    pub fn from_complex_structures(g: MetricTensor<C>, i: EndomorphismField<C>, j: EndomorphismField<C>) -> Self {
        let k = i.compose(&j);
        let omega_i = two_form_of(&g, &i);
        let omega_j = two_form_of(&g, &j);
        let omega_k = two_form_of(&g, &k);
        HyperKahlerStructure { g, i, j, k, omega_i, omega_j, omega_k }
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn complex(&self) -> [&EndomorphismField<C>; 3] {
        [&self.i, &self.j, &self.k]
    }

    pub fn omegas(&self) -> [&DifferentialForm<C>; 3] {
        [&self.omega_i, &self.omega_j, &self.omega_k]
    }

    pub fn four_form(&self) -> DifferentialForm<C> {
        four_form_of(self.omegas())
    }
}

impl HyperKahlerStructure {
    /// Builds the structure from g and the three Kahler forms via
    /// `A = -g^{-1} omega_A`.
    pub fn from_kahler_forms(g: MetricTensor, omegas: [DifferentialForm; 3], rel: &crate::relations::Relations) -> Result<Self> {
        let ginv = linalg::inverse(g.matrix(), rel).ok_or_else(|| Error::DegenerateAtPoint("metric is not invertible".into()))?;
        let mut ends = Vec::new();
        for w in &omegas {
            let m = linalg::mat_neg(&mat_mul(&ginv, &w.to_matrix()?));
            ends.push(EndomorphismField::from_matrix(linalg::mat_reduce(&m, rel)));
        }
        let [omega_i, omega_j, omega_k] = omegas;
        let k = ends.pop().unwrap();
        let j = ends.pop().unwrap();
        let i = ends.pop().unwrap();
        Ok(HyperKahlerStructure { g, i, j, k, omega_i, omega_j, omega_k })
    }

    pub fn lift(&self, pt: &Point, order: u32) -> Result<HyperKahlerStructure<Jet>> {
        Ok(HyperKahlerStructure {
            g: self.g.lift(pt, order)?,
            i: self.i.lift(pt, order)?,
            j: self.j.lift(pt, order)?,
            k: self.k.lift(pt, order)?,
            omega_i: self.omega_i.lift(pt, order)?,
            omega_j: self.omega_j.lift(pt, order)?,
            omega_k: self.omega_k.lift(pt, order)?,
        })
    }
}

/// `sum_A omega_A ^ omega_A`.
pub fn four_form_of<C: Scalar>(omegas: [&DifferentialForm<C>; 3]) -> DifferentialForm<C> {
    let n = omegas[0].dim();
    omegas.iter().fold(DifferentialForm::zero(n, 4), |acc, w| acc.add(&w.wedge(w).expect("same chart")))
}

fn minus_identity<C: Scalar>(n: usize) -> Vec<Vec<C>> {
    linalg::mat_neg(&linalg::identity(n))
}

pub fn quaternion_residuals<C: Scalar>(h: &HyperKahlerStructure<C>) -> Vec<Tensor<C>> {
    let n = h.dim();
    let m = |a: &EndomorphismField<C>| a.matrix().clone();
    let sq = |a: &EndomorphismField<C>| mat_sub(&a.compose(a).matrix().clone(), &minus_identity(n));
    vec![
        Tensor::Matrix(sq(&h.i)),
        Tensor::Matrix(sq(&h.j)),
        Tensor::Matrix(sq(&h.k)),
        Tensor::Matrix(mat_sub(h.i.compose(&h.j).matrix(), &m(&h.k))),
        Tensor::Matrix(mat_add(h.j.compose(&h.i).matrix(), &m(&h.k))),
    ]
}

pub fn hermitian_residuals<C: Scalar>(h: &HyperKahlerStructure<C>) -> Vec<Tensor<C>> {
    h.complex()
        .iter()
        .map(|a| Tensor::Matrix(mat_sub(&mat_mul(&mat_mul(&transpose(a.matrix()), h.g.matrix()), a.matrix()), h.g.matrix())))
        .collect()
}

pub fn kahler_form_residuals<C: Scalar>(h: &HyperKahlerStructure<C>) -> Vec<Tensor<C>> {
    h.complex().iter().zip(h.omegas()).map(|(a, w)| Tensor::Form(w.sub(&two_form_of(&h.g, a)))).collect()
}

pub fn closed_residuals<C: Scalar>(fr: &Frame<C>, h: &HyperKahlerStructure<C>) -> Vec<Tensor<C>> {
    h.omegas().iter().map(|w| Tensor::Form(fr.d(w))).collect()
}

/// `L_X g`, `L_X omega_I`, `L_X omega_J - omega_K`, `L_X omega_K + omega_J`.
pub fn rotating_residuals<C: Scalar>(fr: &Frame<C>, h: &HyperKahlerStructure<C>, x: &VectorField<C>) -> Result<Vec<Tensor<C>>> {
    let lam = fr.lie_coframe(x)?;
    Ok(vec![
        Tensor::metric(fr.lie_metric(x, &h.g)?),
        Tensor::Form(fr.lie_with(x, &lam, &h.omega_i)?),
        Tensor::Form(fr.lie_with(x, &lam, &h.omega_j)?.sub(&h.omega_k)),
        Tensor::Form(fr.lie_with(x, &lam, &h.omega_k)?.add(&h.omega_j)),
    ])
}

/// `A^T F A - F`; zero iff F is of type (1,1) for A.
pub fn type_11_residual<C: Scalar>(f: &DifferentialForm<C>, a: &EndomorphismField<C>) -> Result<Vec<Vec<C>>> {
    let fm = f.to_matrix()?;
    Ok(mat_sub(&mat_mul(&mat_mul(&transpose(a.matrix()), &fm), a.matrix()), &fm))
}

pub fn type_11_check(f: &DifferentialForm, a: &EndomorphismField, rel: &crate::relations::Relations) -> Result<bool> {
    if f.degree() != 2 && !f.is_zero() {
        return Err(Error::DegreeMismatch { expected: 2, found: f.degree() });
    }
    Ok(residual_summary(&[Tensor::Matrix(type_11_residual(f, a)?)], rel, &[]).is_none())
}

/// The forms derived from a rotating symmetry.
#[derive(Clone, Debug)]
pub struct SymmetryData<C: Scalar = CoefficientFunction> {
    pub x: VectorField<C>,
    /// `alpha_0, alpha_I, alpha_J, alpha_K`.
    pub alpha: [DifferentialForm<C>; 4],
    pub g_alpha: MetricTensor<C>,
    /// `G = d alpha_0 + omega_I`.
    pub big_g: DifferentialForm<C>,
    pub mu: C,
    /// `g(X, X)`.
    pub norm_x2: C,
}

impl<C: Scalar> SymmetryData<C> {
    /// Computes the derived forms without checking anything.
    pub fn compute(fr: &Frame<C>, h: &HyperKahlerStructure<C>, x: VectorField<C>, mu: C) -> Result<Self> {
        let a0 = h.g.lower(&x)?.reduce(&fr.relations);
        let alpha_of = |a: &EndomorphismField<C>| a.pullback(&a0).neg().reduce(&fr.relations);
        let alpha = [a0.clone(), alpha_of(&h.i), alpha_of(&h.j), alpha_of(&h.k)];
        let g_alpha = alpha.iter().fold(MetricTensor::zero(h.dim()), |acc, a| acc.add(&MetricTensor::square(a))).reduce(&fr.relations);
        let big_g = fr.d(&a0).add(&h.omega_i).reduce(&fr.relations);
        let norm_x2 = x.pair(&a0).reduce(&fr.relations);
        Ok(SymmetryData { x, alpha, g_alpha, big_g, mu, norm_x2 })
    }
}

impl SymmetryData {
    pub fn lift(&self, pt: &Point, order: u32) -> Result<SymmetryData<Jet>> {
        Ok(SymmetryData {
            x: self.x.lift(pt, order)?,
            alpha: [self.alpha[0].lift(pt, order)?, self.alpha[1].lift(pt, order)?, self.alpha[2].lift(pt, order)?, self.alpha[3].lift(pt, order)?],
            g_alpha: self.g_alpha.lift(pt, order)?,
            big_g: self.big_g.lift(pt, order)?,
            mu: self.mu.lift(pt, order)?,
            norm_x2: self.norm_x2.lift(pt, order)?,
        })
    }
}

/// Derives the symmetry data and insists on `d alpha_I = 0` and `d mu = alpha_I`.
pub fn derive_symmetry_data(chart: &Chart, h: &HyperKahlerStructure, x: VectorField, mu: CoefficientFunction) -> Result<SymmetryData> {
    let sd = SymmetryData::compute(&chart.frame, h, x, mu)?;
    let rel = chart.relations();
    if let Some(s) = residual_summary(&[Tensor::Form(chart.d(&sd.alpha[1]))], rel, &chart.scalars) {
        return Err(Error::NotClosed(s));
    }
    let dmu = chart.d_function(&sd.mu);
    if let Some(s) = residual_summary(&[Tensor::Form(dmu.sub(&sd.alpha[1]))], rel, &chart.scalars) {
        return Err(Error::MomentMapMismatch(s));
    }
    Ok(sd)
}

/// `d alpha_I`, `d alpha_J - omega_K`, `d alpha_K + omega_J`.
pub fn alpha_residuals<C: Scalar>(fr: &Frame<C>, h: &HyperKahlerStructure<C>, sd: &SymmetryData<C>) -> [Tensor<C>; 3] {
    [
        Tensor::Form(fr.d(&sd.alpha[1])),
        Tensor::Form(fr.d(&sd.alpha[2]).sub(&h.omega_k)),
        Tensor::Form(fr.d(&sd.alpha[3]).add(&h.omega_j)),
    ]
}

/// `d alpha_0 - (G - omega_I)` against an independently given G.
pub fn alpha0_residual<C: Scalar>(fr: &Frame<C>, h: &HyperKahlerStructure<C>, sd: &SymmetryData<C>, g_ref: &DifferentialForm<C>) -> Tensor<C> {
    Tensor::Form(fr.d(&sd.alpha[0]).sub(&g_ref.sub(&h.omega_i)))
}

pub fn moment_residual<C: Scalar>(fr: &Frame<C>, sd: &SymmetryData<C>) -> Tensor<C> {
    Tensor::Form(fr.d_function(&sd.mu).sub(&sd.alpha[1]))
}

pub fn g_type_residuals<C: Scalar>(h: &HyperKahlerStructure<C>, sd: &SymmetryData<C>) -> Result<Vec<Tensor<C>>> {
    h.complex().iter().map(|a| Ok(Tensor::Matrix(type_11_residual(&sd.big_g, a)?))).collect()
}

/// Pointwise: g_alpha has rank 4 and equals g(X, X) g on span(X, IX, JX, KX).
pub fn g_alpha_at(h: &HyperKahlerStructure, sd: &SymmetryData, pt: &Point) -> Result<Option<String>> {
    let n2 = sd.norm_x2.eval(&pt.values).ok_or_else(|| Error::DenominatorVanishes { component: "g(X,X)".into(), point: pt.to_string() })?;
    if n2.is_zero() {
        return Ok(None);
    }
    let ga = sd.g_alpha.evaluate(pt)?;
    let g = h.g.evaluate(pt)?;
    let x = sd.x.evaluate(pt)?;
    let r = linalg::rank(ga.matrix(), &Default::default());
    if r != 4 {
        return Ok(Some(format!("rank {r}")));
    }
    let span: Vec<VectorField<Rational>> = std::iter::once(x.clone())
        .chain(h.complex().iter().map(|a| a.evaluate(pt).map(|e| e.apply(&x))).collect::<Result<Vec<_>>>()?)
        .collect();
    for (p, v) in span.iter().enumerate() {
        for (q, w) in span.iter().enumerate() {
            let lhs = ga.apply(v, w);
            let rhs = &n2 * &g.apply(v, w);
            if lhs != rhs {
                return Ok(Some(format!("g_alpha({p},{q}) = {lhs} but g(X,X) g = {rhs}")));
            }
        }
    }
    Ok(None)
}

/// Quaternion, Hermitian, Kahler-form and closedness checks.
pub fn verify_hyperkahler(chart: &Chart, h: &HyperKahlerStructure, v: &Verifier) -> VerificationReport {
    let mut r = VerificationReport::new("hyperkahler");
    let fr = &chart.frame;
    r.push(v.identity("hk_quaternion_relations", || Ok(quaternion_residuals(h)), |pt| Ok(quaternion_residuals(&h.lift(pt, 0)?))));
    r.push(v.identity("hk_hermitian", || Ok(hermitian_residuals(h)), |pt| Ok(hermitian_residuals(&h.lift(pt, 0)?))));
    r.push(v.identity("hk_kahler_forms", || Ok(kahler_form_residuals(h)), |pt| Ok(kahler_form_residuals(&h.lift(pt, 0)?))));
    r.push(v.identity("hk_closed", || Ok(closed_residuals(fr, h)), |pt| Ok(closed_residuals(&chart.lift(pt, 1)?, &h.lift(pt, 1)?))));
    r
}

/// `L_X g = 0`, `L_X omega_I = 0`, `L_X omega_J = omega_K`, `L_X omega_K = -omega_J`.
pub fn verify_rotating(chart: &Chart, h: &HyperKahlerStructure, x: &VectorField, v: &Verifier) -> VerificationReport {
    let mut r = VerificationReport::new("rotating symmetry");
    let names = ["rotating_isometry", "rotating_omega_I", "rotating_omega_J", "rotating_omega_K"];
    for (k, name) in names.iter().enumerate() {
        r.push(v.identity(
            name,
            || Ok(vec![rotating_residuals(&chart.frame, h, x)?.swap_remove(k)]),
            |pt| Ok(vec![rotating_residuals(&chart.lift(pt, 1)?, &h.lift(pt, 1)?, &x.lift(pt, 1)?)?.swap_remove(k)]),
        ));
    }
    let n2 = h.g.apply(x, x).reduce(chart.relations());
    r.push(CheckEntry::identity("rotating_nonnull", "symbolic", !n2.is_zero(), if n2.is_zero() { "g(X,X) = 0".to_string() } else { format!("g(X,X) = {}", n2.format_with(&chart.scalars)) }));
    r
}

/// Checks of the derived forms; `g_ref` is an independently given G if the model has one.
pub fn verify_symmetry(chart: &Chart, h: &HyperKahlerStructure, sd: &SymmetryData, g_ref: Option<&DifferentialForm>, v: &Verifier) -> VerificationReport {
    let mut r = VerificationReport::new("symmetry data");
    let fr = &chart.frame;
    let names = ["symmetry_d_alpha_I", "symmetry_d_alpha_J", "symmetry_d_alpha_K"];
    for (k, name) in names.iter().enumerate() {
        r.push(v.identity(
            name,
            || Ok(vec![alpha_residuals(fr, h, sd)[k].clone()]),
            |pt| Ok(vec![alpha_residuals(&chart.lift(pt, 1)?, &h.lift(pt, 1)?, &sd.lift(pt, 1)?)[k].clone()]),
        ));
    }
    let g_ref = g_ref.cloned().unwrap_or_else(|| sd.big_g.clone());
    r.push(v.identity(
        "symmetry_d_alpha_0",
        || Ok(vec![alpha0_residual(fr, h, sd, &g_ref)]),
        |pt| Ok(vec![alpha0_residual(&chart.lift(pt, 1)?, &h.lift(pt, 1)?, &sd.lift(pt, 1)?, &g_ref.lift(pt, 1)?)]),
    ));
    r.push(v.identity("moment_map", || Ok(vec![moment_residual(fr, sd)]), |pt| Ok(vec![moment_residual(&chart.lift(pt, 1)?, &sd.lift(pt, 1)?)])));
    r.push(v.identity(
        "moment_map_invariant",
        || Ok(vec![Tensor::Scalar(fr.vector_apply(&sd.x, &sd.mu))]),
        |pt| {
            let f = chart.lift(pt, 1)?;
            let s = sd.lift(pt, 1)?;
            Ok(vec![Tensor::Scalar(f.vector_apply(&s.x, &s.mu))])
        },
    ));
    r.push(v.identity("G_type_11", || g_type_residuals(h, sd), |pt| g_type_residuals(&h.lift(pt, 0)?, &sd.lift(pt, 0)?)));
    if !v.points.is_empty() {
        let label = v.pointwise_label();
        let hit = crate::sampling::first_hit(&v.points, |pt| g_alpha_at(h, sd, pt));
        r.push(match hit {
            Ok(None) => CheckEntry::identity("g_alpha_rank", &label, true, "0"),
            Ok(Some((i, s))) => CheckEntry::identity("g_alpha_rank", &label, false, s).with_witness(Some(&v.points[i])),
            Err(e) => CheckEntry::identity("g_alpha_rank", &label, false, format!("error: {e}")),
        });
    }
    r
}

/// `d Omega = 0` and `L_X Omega = 0`.
pub fn verify_four_form(chart: &Chart, h: &HyperKahlerStructure, x: &VectorField, v: &Verifier) -> VerificationReport {
    let mut r = VerificationReport::new("fundamental four-form");
    let omega = h.four_form();
    r.push(v.identity("four_form_closed", || Ok(vec![Tensor::Form(chart.d(&omega))]), |pt| {
        Ok(vec![Tensor::Form(chart.lift(pt, 1)?.d(&h.lift(pt, 1)?.four_form()))])
    }));
    r.push(v.identity(
        "four_form_invariant",
        || Ok(vec![Tensor::Form(chart.lie(x, &omega)?)]),
        |pt| Ok(vec![Tensor::Form(chart.lift(pt, 1)?.lie(&x.lift(pt, 1)?, &h.lift(pt, 1)?.four_form())?)]),
    ));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::Relations;

    fn r(n: i64) -> CoefficientFunction {
        CoefficientFunction::from_int(n)
    }

    /// Flat H with coordinates (x, y, u, v).
    fn flat() -> (Chart, HyperKahlerStructure) {
        let ch = Chart::coordinate(&["x", "y", "u", "v"]);
        let g = MetricTensor::diagonal(vec![r(1); 4]);
        let f = |pairs: &[([usize; 2], i64)]| DifferentialForm::from_components(4, 2, pairs.iter().map(|(ix, c)| (ix.to_vec(), r(*c))));
        let wi = f(&[([0, 1], 1), ([2, 3], -1)]);
        let wj = f(&[([0, 2], -1), ([1, 3], -1)]);
        let wk = f(&[([1, 2], -1), ([0, 3], 1)]);
        let h = HyperKahlerStructure::from_kahler_forms(g, [wi, wj, wk], &Relations::none()).unwrap();
        (ch, h)
    }

    #[test]
    fn flat_structure_is_hyperkahler() {
        let (ch, h) = flat();
        let v = Verifier::symbolic_only(ch.scalars.clone(), Relations::none());
        let rep = verify_hyperkahler(&ch, &h, &v);
        assert!(rep.passed(), "{}", rep.to_text());
        assert!(type_11_check(&h.omega_i, &h.i, &Relations::none()).unwrap());
        assert!(!type_11_check(&h.omega_j, &h.i, &Relations::none()).unwrap());
    }

    #[test]
    fn scaled_omega_k_breaks_compatibility() {
        let (ch, mut h) = flat();
        h.omega_k = h.omega_k.scale_rational(&Rational::from_int(2));
        let v = Verifier::symbolic_only(ch.scalars.clone(), Relations::none());
        let rep = verify_hyperkahler(&ch, &h, &v);
        assert!(!rep.entry("hk_kahler_forms").unwrap().passed());
    }

    #[test]
    fn translation_is_not_rotating() {
        let (ch, h) = flat();
        let x = VectorField::basis(4, 0);
        let v = Verifier::symbolic_only(ch.scalars.clone(), Relations::none());
        let rep = verify_rotating(&ch, &h, &x, &v);
        assert!(rep.entry("rotating_isometry").unwrap().passed());
        assert!(!rep.entry("rotating_omega_J").unwrap().passed());
    }

    #[test]
    fn four_form_of_flat_h() {
        let (_, h) = flat();
        let om = h.four_form();
        assert_eq!(om.len(), 1);
        assert_eq!(om.coefficient(&[0, 1, 2, 3]), r(-6));
    }

    #[test]
    fn zero_moment_map_is_rejected() {
        let (ch, h) = flat();
        let half = CoefficientFunction::constant(Rational::new(1, 2));
        let (x, y, u, vv) = (ch.scalar("x").unwrap(), ch.scalar("y").unwrap(), ch.scalar("u").unwrap(), ch.scalar("v").unwrap());
        let xf = VectorField::new(vec![y.mul(&half), x.mul(&half).neg(), vv.mul(&half).neg(), u.mul(&half)]);
        assert!(matches!(derive_symmetry_data(&ch, &h, xf.clone(), CoefficientFunction::zero()), Err(Error::MomentMapMismatch(_))));
        let mu = ch.parse("(x^2 + y^2 + u^2 + v^2)/4").unwrap();
        let sd = derive_symmetry_data(&ch, &h, xf, mu).unwrap();
        assert!(sd.big_g.is_zero());
    }
}
