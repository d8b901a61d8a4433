//! Twist data, the twisted differential, principal extensions and
//! structure constants of twisted coframes.

use num_integer::Integer;

use crate::chart::{Chart, Frame};
use crate::coeff::CoefficientFunction;
use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, Matrix, Point, VectorField};
use crate::jet::Jet;
use crate::linalg::{self, mat_mul, transpose};
use crate::rational::Rational;
use crate::relations::Relations;
use crate::report::{CheckEntry, Status, VerificationReport};
use crate::sampling::Lift;
use crate::scalar::Scalar;
use crate::verify::{residual_summary, Tensor, Verifier};

/// `(X, F, a)` with `dF = 0`, `L_X F = 0` and `da = -X -| F`.
#[derive(Clone, Debug)]
pub struct TwistData<C: Scalar = CoefficientFunction> {
    pub x: VectorField<C>,
    pub f: DifferentialForm<C>,
    pub a: C,
}

impl<C: Scalar> TwistData<C> {
    /// `F = 0`, `a = 1`.
    pub fn trivial(x: VectorField<C>) -> Self {
        let n = x.dim();
        TwistData { x, f: DifferentialForm::zero(n, 2), a: C::one() }
    }
}

impl TwistData {
    pub fn lift(&self, pt: &Point, order: u32) -> Result<TwistData<Jet>> {
        Ok(TwistData { x: self.x.lift(pt, order)?, f: self.f.lift(pt, order)?, a: self.a.lift(pt, order)? })
    }
}

/// `dF`, `L_X F`, `da + X -| F`.
pub fn twist_residuals<C: Scalar>(fr: &Frame<C>, td: &TwistData<C>) -> Result<[Tensor<C>; 3]> {
    Ok([
        Tensor::Form(fr.d(&td.f)),
        Tensor::Form(fr.lie(&td.x, &td.f)?),
        Tensor::Form(fr.d_function(&td.a).add(&td.f.interior(&td.x)?)),
    ])
}

/// `d alpha - (1/a) F ^ (X -| alpha)` without checking invariance of `alpha`.
pub fn d_w<C: Scalar>(fr: &Frame<C>, td: &TwistData<C>, alpha: &DifferentialForm<C>) -> Result<DifferentialForm<C>> {
    let da = fr.d(alpha);
    if td.f.is_zero() || alpha.degree() == 0 {
        return Ok(da);
    }
    let inv = td.a.recip().ok_or(Error::InvalidTwist("twist function vanishes".into()))?;
    let corr = td.f.wedge(&alpha.interior(&td.x)?)?.scale(&inv);
    Ok(da.sub(&corr).reduce(&fr.relations))
}

/// The twisted differential of an X-invariant form.
pub fn twisted_derivative(chart: &Chart, td: &TwistData, alpha: &DifferentialForm) -> Result<DifferentialForm> {
    let l = chart.lie(&td.x, alpha)?;
    if let Some(s) = residual_summary(&[Tensor::Form(l)], chart.relations(), &chart.scalars) {
        return Err(Error::NotInvariant(s));
    }
    d_w(&chart.frame, td, alpha)
}

/// The twisted complex structure is integrable iff F is of type (1,1).
pub fn twisted_integrability_check(td: &TwistData, i: &crate::forms::EndomorphismField, rel: &Relations) -> Result<bool> {
    crate::hk::type_11_check(&td.f, i, rel)
}

/// Equation checks for twist data plus the recorded assumption on periods.
pub fn validate_twist_data(chart: &Chart, td: &TwistData, v: &Verifier) -> VerificationReport {
    let mut r = VerificationReport::new("twist data");
    let names = ["twist_F_closed", "twist_F_invariant", "twist_hamiltonian"];
    for (k, name) in names.iter().enumerate() {
        r.push(v.identity(
            name,
            || Ok(vec![twist_residuals(&chart.frame, td)?[k].clone()]),
            |pt| Ok(vec![twist_residuals(&chart.lift(pt, 1)?, &td.lift(pt, 1)?)?[k].clone()]),
        ));
    }
    let a = td.a.reduce(chart.relations());
    r.push(CheckEntry::identity("twist_nonzero", "symbolic", !a.is_zero(), format!("a = {}", a.format_with(&chart.scalars))));
    r.push(CheckEntry::new("twist_integral_periods", "assumption", Status::Unchecked, true, "assumed; periods of F are not computable on a single chart"));
    r
}

/// `d_W d_W alpha` for `omega_I`, `alpha_0` and `alpha_I`.
pub fn d_w_squared_residuals<C: Scalar>(fr: &Frame<C>, td: &TwistData<C>, h: &crate::hk::HyperKahlerStructure<C>, sd: &crate::hk::SymmetryData<C>) -> Result<Vec<Tensor<C>>> {
    [&h.omega_i, &sd.alpha[0], &sd.alpha[1]].iter().map(|a| Ok(Tensor::Form(d_w(fr, td, &d_w(fr, td, a)?)?))).collect()
}

/// Twist data, twisted differential and principal extension checks for one model.
pub fn verify_twist(
    chart: &Chart,
    h: &crate::hk::HyperKahlerStructure,
    sd: &crate::hk::SymmetryData,
    td: &TwistData,
    beta: &DifferentialForm,
    c_ext: &Rational,
    v: &Verifier,
) -> (VerificationReport, Option<PrincipalExtension>) {
    let mut r = validate_twist_data(chart, td, v);
    let integrable = match twisted_integrability_check(td, &h.i, chart.relations()) {
        Ok(b) => CheckEntry::identity("twisted_integrability", "symbolic", b, if b { "0".into() } else { "F is not of type (1,1) for I".to_string() }),
        Err(e) => CheckEntry::identity("twisted_integrability", "symbolic", false, format!("error: {e}")),
    };
    r.push(integrable);
    r.push(v.identity("twisted_derivative", || d_w_squared_residuals(&chart.frame, td, h, sd), |pt| {
        d_w_squared_residuals(&chart.lift(pt, 2)?, &td.lift(pt, 2)?, &h.lift(pt, 2)?, &sd.lift(pt, 2)?)
    }));
    let ext = match principal_extension(chart, td, beta, c_ext) {
        Ok(ext) => ext,
        Err(e) => {
            r.push(CheckEntry::identity("principal_extension_exact", "symbolic", false, e.to_string()));
            return (r, None);
        }
    };
    r.extend(verify_extension(&ext));
    let descent: Result<Vec<_>> = [&h.omega_i, &sd.alpha[0], &sd.alpha[1]].iter().map(|a| descent_residual(&ext, a)).collect();
    r.push(match descent {
        Ok(parts) => match residual_summary(&parts, ext.extended.relations(), &ext.extended.scalars) {
            None => CheckEntry::identity("principal_descent", "symbolic", true, "0"),
            Some(s) => CheckEntry::identity("principal_descent", "symbolic", false, s),
        },
        Err(e) => CheckEntry::identity("principal_descent", "symbolic", false, format!("error: {e}")),
    });
    (r, Some(ext))
}

/// Orbifold and smoothness predicates on the integer data of a circle twist.
pub fn smooth_quotient_predicate(weights: &[Rational], c: &Rational) -> (bool, bool, String) {
    let all: Vec<&Rational> = weights.iter().chain(std::iter::once(c)).collect();
    if !all.iter().all(|w| w.is_integer()) {
        return (false, false, "not all of lambda_i, c are integers".into());
    }
    let ints: Vec<num_bigint::BigInt> = all.iter().map(|w| w.numer()).collect();
    for x in 0..ints.len() {
        for y in (x + 1)..ints.len() {
            let g = ints[x].gcd(&ints[y]);
            if g != num_bigint::BigInt::from(1) {
                return (true, false, format!("integers, not pairwise coprime (gcd({}, {}) = {g})", ints[x], ints[y]));
            }
        }
    }
    (true, true, "integers, pairwise coprime".into())
}

/// The principal circle bundle `P = M x S^1` for exact `F = d beta`.
#[derive(Clone, Debug)]
pub struct PrincipalExtension {
    pub base: Chart,
    /// Base coframe plus `theta` with `d theta = F`, scalars plus `tau` with `d tau = theta - beta`.
    pub extended: Chart,
    pub beta: DifferentialForm,
    pub td: TwistData,
    pub c: Rational,
    /// `X' = X + c d/dtau`, whose `theta`-component is `beta(X) + c`.
    pub x_prime: VectorField,
}

impl PrincipalExtension {
    pub fn theta_index(&self) -> usize {
        self.base.dim()
    }

    pub fn tau_index(&self) -> usize {
        self.base.num_scalars()
    }

    /// A base form viewed on P.
    pub fn pullback(&self, alpha: &DifferentialForm) -> DifferentialForm {
        alpha.extend_dim(self.extended.dim())
    }

    pub fn theta(&self) -> DifferentialForm {
        DifferentialForm::basis(self.extended.dim(), self.theta_index())
    }

    /// The basic form `alpha - (1/a) theta ^ (X -| alpha)` that is H-related to `alpha`.
    pub fn horizontal_lift(&self, alpha: &DifferentialForm) -> Result<DifferentialForm> {
        let up = self.pullback(alpha);
        if alpha.degree() == 0 {
            return Ok(up);
        }
        let ix = self.pullback(&alpha.interior(&self.td.x)?);
        let inv = self.td.a.recip().ok_or(Error::InvalidTwist("twist function vanishes".into()))?;
        Ok(up.sub(&self.theta().wedge(&ix)?.scale(&inv)).reduce(self.extended.relations()))
    }
}

pub fn principal_extension(chart: &Chart, td: &TwistData, beta: &DifferentialForm, c: &Rational) -> Result<PrincipalExtension> {
    let rel = chart.relations();
    let exact = chart.d(beta).sub(&td.f);
    if let Some(s) = residual_summary(&[Tensor::Form(exact)], rel, &chart.scalars) {
        return Err(Error::NotExact(s));
    }
    let n = chart.dim();
    let m = n + 1;
    let mut coframe = chart.coframe.clone();
    coframe.push("theta".into());
    let mut scalars = chart.scalars.clone();
    scalars.push("tau".into());
    let mut structure: Vec<DifferentialForm> = chart.frame.structure.iter().map(|f| f.extend_dim(m)).collect();
    structure.push(td.f.extend_dim(m));
    let mut differentials: Vec<DifferentialForm> = chart.frame.differentials.iter().map(|f| f.extend_dim(m)).collect();
    differentials.push(DifferentialForm::basis(m, n).sub(&beta.extend_dim(m)));
    let extended = Chart::new(coframe, scalars, structure, differentials, rel.clone())?;
    let mut comps: Vec<CoefficientFunction> = td.x.components().to_vec();
    comps.push(td.x.pair(beta).add(&CoefficientFunction::constant(c.clone())).reduce(rel));
    Ok(PrincipalExtension { base: chart.clone(), extended, beta: beta.clone(), td: td.clone(), c: c.clone(), x_prime: VectorField::new(comps) })
}

/// Consistency of the extension and `theta(X') = a`.
pub fn verify_extension(ext: &PrincipalExtension) -> VerificationReport {
    let mut r = VerificationReport::new("principal extension");
    let rel = ext.extended.relations();
    r.push(CheckEntry::identity("principal_extension_exact", "symbolic", true, "0"));
    let cons = ext.extended.consistency_check();
    let bad: Vec<_> = cons.failures().iter().map(|e| format!("{}: {}", e.name, e.residual)).collect();
    r.push(CheckEntry::identity("principal_extension_consistency", "symbolic", bad.is_empty(), if bad.is_empty() { "0".into() } else { bad.join("; ") }));
    let lift = ext.x_prime.components()[ext.theta_index()].sub(&ext.td.a).reduce(rel);
    r.push(CheckEntry::identity("principal_lift", "symbolic", lift.is_zero(), lift.format_with(&ext.extended.scalars)));
    r
}

/// `X' -| alpha` and `L_X' alpha`; both vanish iff alpha is basic.
pub fn basic_residuals(ext: &PrincipalExtension, alpha: &DifferentialForm) -> Result<[Tensor<CoefficientFunction>; 2]> {
    Ok([Tensor::Form(alpha.interior(&ext.x_prime)?.reduce(ext.extended.relations())), Tensor::Form(ext.extended.lie(&ext.x_prime, alpha)?)])
}

pub fn basic_form_check(ext: &PrincipalExtension, alpha: &DifferentialForm) -> Result<bool> {
    let r = basic_residuals(ext, alpha)?;
    Ok(residual_summary(&r, ext.extended.relations(), &ext.extended.scalars).is_none())
}

/// `d(alpha_H) - (d_W alpha)_H` for an invariant base form.
pub fn descent_residual(ext: &PrincipalExtension, alpha: &DifferentialForm) -> Result<Tensor<CoefficientFunction>> {
    let lhs = ext.extended.d(&ext.horizontal_lift(alpha)?);
    let rhs = ext.horizontal_lift(&twisted_derivative(&ext.base, &ext.td, alpha)?)?;
    Ok(Tensor::Form(lhs.sub(&rhs).reduce(ext.extended.relations())))
}

/// Structure functions `c^i_jk` of a coframe, `d eta^i = -1/2 c^i_jk eta^j ^ eta^k`.
#[derive(Clone, Debug)]
pub struct StructureFunctions {
    /// `c[i][j][k]`, antisymmetric in `j, k`.
    pub c: Vec<Vec<Vec<CoefficientFunction>>>,
    /// The same values when every function is constant.
    pub constants: Option<Vec<Vec<Vec<Rational>>>>,
}

impl StructureFunctions {
    /// Components `(i, j, k, value)` with `j < k` and nonzero value.
    pub fn nonzero(&self) -> Vec<(usize, usize, usize, CoefficientFunction)> {
        let n = self.c.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in (j + 1)..n {
                    if !self.c[i][j][k].is_zero() {
                        out.push((i, j, k, self.c[i][j][k].clone()));
                    }
                }
            }
        }
        out
    }
}

/// Expresses `d eta^i` in a basic coframe of the extended chart.
pub fn structure_constants(ext: &PrincipalExtension, coframe: &[DifferentialForm]) -> Result<StructureFunctions> {
    let ch = &ext.extended;
    let rel = ch.relations();
    let n = ext.base.dim();
    if coframe.len() != n {
        return Err(Error::NotACoframe(format!("{} forms for dimension {n}", coframe.len())));
    }
    for (i, e) in coframe.iter().enumerate() {
        if e.degree() != 1 || e.dim() != n + 1 {
            return Err(Error::NotACoframe(format!("element {i} is not a 1-form on the extended chart")));
        }
        if !basic_form_check(ext, e)? {
            return Err(Error::NotBasic(i));
        }
    }
    let m = n + 1;
    let mut a: Matrix<CoefficientFunction> = coframe.iter().map(|e| (0..m).map(|b| e.coefficient(&[b])).collect()).collect();
    a.push((0..m).map(|b| if b == n { CoefficientFunction::one() } else { CoefficientFunction::zero() }).collect());
    let ainv = linalg::inverse(&a, rel).ok_or_else(|| Error::NotACoframe("forms are dependent together with theta".into()))?;
    let mut c = vec![vec![vec![CoefficientFunction::zero(); n]; n]; n];
    for (i, e) in coframe.iter().enumerate() {
        let de = ch.d(e).to_matrix()?;
        let t = linalg::mat_reduce(&mat_mul(&mat_mul(&transpose(&ainv), &de), &ainv), rel);
        for j in 0..m {
            if !t[j][n].reduce(rel).is_zero() {
                return Err(Error::NotExpressible(format!("d eta^{i} has a theta component {}", t[j][n].format_with(&ch.scalars))));
            }
        }
        for j in 0..n {
            for k in 0..n {
                c[i][j][k] = t[j][k].neg();
            }
        }
    }
    let constants = c
        .iter()
        .map(|p| p.iter().map(|q| q.iter().map(|x| x.constant_value(rel)).collect::<Option<Vec<_>>>()).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>();
    Ok(StructureFunctions { c, constants })
}

/// Jacobi residuals `sum_m c^m_ij c^l_mk + c^m_jk c^l_mi + c^m_ki c^l_mj` for
/// `[e_j, e_k] = c^i_jk e_i`; returns the nonzero ones as `(i, j, k, l, value)`.
pub fn jacobi_residuals(c: &[Vec<Vec<Rational>>]) -> Vec<(usize, usize, usize, usize, Rational)> {
    let n = c.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                for l in 0..n {
                    let mut s = Rational::zero();
                    for m in 0..n {
                        s = &s + &(&c[m][i][j] * &c[l][m][k]);
                        s = &s + &(&c[m][j][k] * &c[l][m][i]);
                        s = &s + &(&c[m][k][i] * &c[l][m][j]);
                    }
                    if !s.is_zero() {
                        out.push((i, j, k, l, s));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> CoefficientFunction {
        CoefficientFunction::from_int(n)
    }

    #[test]
    fn trivial_twist_is_plain_d() {
        let ch = Chart::coordinate(&["x", "y"]);
        let x = ch.scalar("x").unwrap();
        let xf = VectorField::new(vec![r(1), r(0)]);
        let td = TwistData::trivial(xf);
        let alpha = DifferentialForm::monomial(2, &[1], ch.scalar("y").unwrap().mul(&x));
        let _ = twisted_derivative(&ch, &td, &alpha).unwrap_err();
        let inv = DifferentialForm::monomial(2, &[1], ch.scalar("y").unwrap());
        assert_eq!(twisted_derivative(&ch, &td, &inv).unwrap(), ch.d(&inv));
    }

    #[test]
    fn coordinate_coframe_is_abelian() {
        let ch = Chart::coordinate(&["x", "y"]);
        let xf = VectorField::new(vec![r(1), r(0)]);
        let mut td = TwistData::trivial(xf);
        td.a = r(1);
        let ext = principal_extension(&ch, &td, &DifferentialForm::zero(2, 1), &Rational::zero()).unwrap();
        assert!(!verify_extension(&ext).passed());
        let ext = principal_extension(&ch, &td, &DifferentialForm::zero(2, 1), &Rational::one()).unwrap();
        assert!(verify_extension(&ext).passed());
        // x is not X'-invariant, dy is
        let dy = DifferentialForm::basis(3, 1);
        assert!(basic_form_check(&ext, &dy).unwrap());
        assert!(!basic_form_check(&ext, &ext.theta()).unwrap());
        let dx_h = ext.horizontal_lift(&DifferentialForm::basis(2, 0)).unwrap();
        assert!(basic_form_check(&ext, &dx_h).unwrap());
        let sc = structure_constants(&ext, &[dx_h, dy]).unwrap();
        assert!(sc.nonzero().is_empty());
        assert!(sc.constants.is_some());
    }

    #[test]
    fn hyperbolic_plane_constants() {
        // da = 0, db = -2 a^b
        let n = 2;
        let structure = vec![DifferentialForm::zero(n, 2), DifferentialForm::monomial(n, &[0, 1], r(-2))];
        let ch = Chart::new(vec!["a".into(), "b".into()], vec![], structure, vec![], Relations::none()).unwrap();
        let td = TwistData { x: VectorField::zero(2), f: DifferentialForm::zero(2, 2), a: r(1) };
        let ext = principal_extension(&ch, &td, &DifferentialForm::zero(2, 1), &Rational::one()).unwrap();
        let sc = structure_constants(&ext, &[DifferentialForm::basis(3, 0), DifferentialForm::basis(3, 1)]).unwrap();
        let k = sc.constants.unwrap();
        assert_eq!(k[1][0][1], Rational::from_int(2));
        assert_eq!(k[1][1][0], Rational::from_int(-2));
        assert!(jacobi_residuals(&k).is_empty());
    }

    #[test]
    fn smoothness_predicate() {
        let w = [Rational::from_int(1), Rational::from_int(2)];
        assert!(smooth_quotient_predicate(&w, &Rational::from_int(3)).1);
        assert!(!smooth_quotient_predicate(&w, &Rational::from_int(4)).1);
        assert!(!smooth_quotient_predicate(&w, &Rational::new(1, 2)).0);
    }
}
