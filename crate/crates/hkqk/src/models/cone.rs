//! The conic Kahler surface over the real hyperbolic plane and its special
//! Kahler connections.
//!
//! The chart uses the rescaled coframe `(a', b', phi, psi) = t (lambda a, lambda b, phi, dt/t)`
//! in which only `L = lambda^2` appears:
//!
//! ```text
//! d a'  = -a' ^ psi / t
//! d b'  = -b' ^ psi / t - a' ^ b' / t
//! d phi = -phi ^ psi / t + (2/L) a' ^ b' / t
//! d psi = 0
//! ```
//!
//! Scalars are `t` and a point `(c, s)` on the unit circle, the cosine and
//! sine of an angle `sigma` with `d sigma = (phi + (2/L) b')/t`.

use serde_json::json;

use crate::chart::{Chart, Frame};
use crate::coeff::CoefficientFunction;
use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, EndomorphismField, Matrix, MetricTensor, VectorField};
use crate::linalg;
use crate::poly::Polynomial;
use crate::rational::Rational;
use crate::relations::Relations;
use crate::report::{CheckEntry, Status, VerificationReport};
use crate::scalar::Scalar;
use crate::verify::{residual_summary, Tensor};

use super::polysys::{self, Choice, ChoiceKind, Outcome};

pub const T: usize = 0;
pub const C: usize = 1;
pub const S: usize = 2;
/// First generator index of the connection unknowns.
pub const UNKNOWNS: usize = 3;
/// `P`, `Q`, `R` blocks of 64 unknowns each.
pub const BLOCK: usize = 64;

fn k(r: Rational) -> CoefficientFunction {
    CoefficientFunction::constant(r)
}

fn t_inv() -> CoefficientFunction {
    CoefficientFunction::generator(T).recip().unwrap()
}

#[derive(Clone, Debug)]
pub struct Cone {
    pub lambda2: Rational,
    pub chart: Chart,
    /// `g_C = (a'^2 + b'^2)/L - phi^2 - psi^2`.
    pub g: MetricTensor,
    /// `omega_C = a' ^ b' / L - phi ^ psi`.
    pub omega: DifferentialForm,
    pub i: EndomorphismField,
    /// `t` times the dual of `phi`.
    pub x: VectorField,
    /// `eta` and `Omega` as constant matrices.
    pub eta: Matrix<Rational>,
    pub om: Matrix<Rational>,
    pub im: Matrix<Rational>,
}

/// Structure equations of the rescaled cone coframe in dimension `n >= 4`.
pub fn cone_structure(lambda2: &Rational, n: usize) -> Vec<DifferentialForm> {
    let ti = t_inv();
    let two_l = &Rational::from_int(2) / lambda2;
    vec![
        DifferentialForm::monomial(n, &[0, 3], ti.neg()),
        DifferentialForm::monomial(n, &[1, 3], ti.neg()).add(&DifferentialForm::monomial(n, &[0, 1], ti.neg())),
        DifferentialForm::monomial(n, &[2, 3], ti.neg()).add(&DifferentialForm::monomial(n, &[0, 1], ti.scale(&two_l))),
        DifferentialForm::zero(n, 2),
    ]
}

/// `dt`, `dc`, `ds` in dimension `n >= 4`.
pub fn cone_differentials(lambda2: &Rational, n: usize) -> Vec<DifferentialForm> {
    let ti = t_inv();
    let two_l = &Rational::from_int(2) / lambda2;
    let gamma = DifferentialForm::monomial(n, &[2], ti.clone()).add(&DifferentialForm::monomial(n, &[1], ti.scale(&two_l)));
    let c = CoefficientFunction::generator(C);
    let s = CoefficientFunction::generator(S);
    vec![DifferentialForm::basis(n, 3), gamma.scale(&s.neg()), gamma.scale(&c)]
}

pub fn circle() -> Relations {
    let mut rel = Relations::none();
    rel.add_circle(C, S);
    rel
}

pub fn build_cone(lambda2: &Rational) -> Result<Cone> {
    if lambda2.is_zero() || lambda2.is_negative() {
        return Err(Error::InvalidParams(format!("lambda^2 must be positive, got {lambda2}")));
    }
    let n = 4;
    let chart = Chart::new(
        ["a", "b", "phi", "psi"].map(String::from).to_vec(),
        ["t", "c", "s"].map(String::from).to_vec(),
        cone_structure(lambda2, n),
        cone_differentials(lambda2, n),
        circle(),
    )?;
    let li = lambda2.recip().unwrap();
    let one = Rational::one();
    let m1 = -one.clone();
    let z = Rational::zero();
    let eta = vec![
        vec![li.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), li.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), m1.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), m1.clone()],
    ];
    let mut om = vec![vec![z.clone(); 4]; 4];
    om[0][1] = li.clone();
    om[1][0] = -li.clone();
    om[2][3] = m1.clone();
    om[3][2] = one.clone();
    let mut im = vec![vec![z.clone(); 4]; 4];
    im[1][0] = one.clone();
    im[0][1] = m1.clone();
    im[3][2] = one.clone();
    im[2][3] = m1;
    let cf = |m: &Matrix<Rational>| m.iter().map(|r| r.iter().cloned().map(k).collect()).collect::<Matrix<CoefficientFunction>>();
    let g = MetricTensor::from_matrix(cf(&eta));
    let omega = DifferentialForm::from_matrix(&cf(&om));
    let i = EndomorphismField::from_matrix(cf(&im));
    let mut x = vec![CoefficientFunction::zero(); 4];
    x[2] = CoefficientFunction::generator(T);
    Ok(Cone { lambda2: lambda2.clone(), chart, g, omega, i, x: VectorField::new(x), eta, om, im })
}

/// The unrescaled chart `da = 0, db = -lambda a ^ b, dphi = 2 a ^ b`, `dt` exact.
pub fn plain_cone_chart(lambda: &CoefficientFunction, extra_scalars: &[&str], extra_differentials: Vec<DifferentialForm>) -> Result<Chart> {
    let n = 4;
    let ab = DifferentialForm::monomial(n, &[0, 1], CoefficientFunction::one());
    let structure = vec![DifferentialForm::zero(n, 2), ab.scale(&lambda.neg()), ab.scale_rational(&Rational::from_int(2)), DifferentialForm::zero(n, 2)];
    let mut scalars = vec!["t".to_string()];
    scalars.extend(extra_scalars.iter().map(|s| s.to_string()));
    let mut diffs = vec![DifferentialForm::basis(n, 3)];
    diffs.extend(extra_differentials);
    Chart::new(["a", "b", "phi", "dt"].map(String::from).to_vec(), scalars, structure, diffs, Relations::none())
}

/// With a generator `l` for lambda, the rescaled coframe `t(l a, l b, phi, dt/t)`
/// satisfies the structure equations with `L = l^2`; returns the residuals.
pub fn lambda_reduction_residuals() -> Result<Vec<DifferentialForm>> {
    let n = 4;
    let l = CoefficientFunction::generator(1);
    let ch = plain_cone_chart(&l, &["l"], vec![DifferentialForm::zero(n, 1)])?;
    let t = CoefficientFunction::generator(0);
    let hat = [
        DifferentialForm::basis(n, 0).scale(&t.mul(&l)),
        DifferentialForm::basis(n, 1).scale(&t.mul(&l)),
        DifferentialForm::basis(n, 2).scale(&t),
        DifferentialForm::basis(n, 3),
    ];
    // the hatted structure equations with 2/L replaced by 2/l^2
    let ti = t_inv();
    let two_l = k(Rational::from_int(2)).div(&l.mul(&l)).unwrap();
    let w = |a: usize, b: usize| hat[a].wedge(&hat[b]).unwrap();
    let expected = [
        w(0, 3).scale(&ti.neg()),
        w(1, 3).scale(&ti.neg()).add(&w(0, 1).scale(&ti.neg())),
        w(2, 3).scale(&ti.neg()).add(&w(0, 1).scale(&ti.mul(&two_l))),
        DifferentialForm::zero(n, 2),
    ];
    let mut out: Vec<DifferentialForm> = hat.iter().zip(&expected).map(|(h, e)| ch.d(h).sub(e)).collect();
    // d sigma = phi + (2/l^2) l b is closed
    let sigma = DifferentialForm::basis(n, 2).add(&DifferentialForm::basis(n, 1).scale(&k(Rational::from_int(2)).div(&l).unwrap()));
    out.push(ch.d(&sigma));
    Ok(out)
}

/// Connection forms `omega^i_j` indexed `[i][j]`.
pub type ConnectionForms = Vec<Vec<DifferentialForm>>;

/// `omega^i_j = sum_k Gamma(i,j,k) theta^k / t` with
/// `Gamma = P + Q (c^2 - s^2) + R 2cs`; unknowns are generators from `UNKNOWNS` on.
pub fn ansatz(fourier: bool) -> ConnectionForms {
    let c = CoefficientFunction::generator(C);
    let s = CoefficientFunction::generator(S);
    let cos2 = c.mul(&c).sub(&s.mul(&s));
    let sin2 = c.mul(&s).scale(&Rational::from_int(2));
    let ti = t_inv();
    let idx = |i: usize, j: usize, kk: usize| i * 16 + j * 4 + kk;
    (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    let comps = (0..4).map(|kk| {
                        let p = CoefficientFunction::generator(UNKNOWNS + idx(i, j, kk));
                        let mut g = p;
                        if fourier {
                            g = g
                                .add(&CoefficientFunction::generator(UNKNOWNS + BLOCK + idx(i, j, kk)).mul(&cos2))
                                .add(&CoefficientFunction::generator(UNKNOWNS + 2 * BLOCK + idx(i, j, kk)).mul(&sin2));
                        }
                        (vec![kk], g.mul(&ti))
                    });
                    DifferentialForm::from_components(4, 1, comps)
                })
                .collect()
        })
        .collect()
}

/// Residuals of a connection on the cone.
pub struct ConnectionResiduals<Cf: Scalar> {
    /// `d theta^i + omega^i_j ^ theta^j`.
    pub torsion: Vec<DifferentialForm<Cf>>,
    /// `sum_l M_lj omega^l_i + M_il omega^l_j` for the given bilinear form `M`.
    pub compatibility: Vec<DifferentialForm<Cf>>,
    /// `(d^nabla I)^i = I_ij d theta^j + omega^i_k ^ I_kj theta^j`.
    pub d_nabla_i: Vec<DifferentialForm<Cf>>,
    /// `d omega^i_j + omega^i_k ^ omega^k_j`.
    pub curvature: Vec<DifferentialForm<Cf>>,
}

pub fn connection_residuals<Cf: Scalar>(fr: &Frame<Cf>, w: &[Vec<DifferentialForm<Cf>>], m: &Matrix<Rational>, im: &Matrix<Rational>) -> Result<ConnectionResiduals<Cf>> {
    let n = w.len();
    let basis = |j: usize| DifferentialForm::<Cf>::basis(n, j);
    let mut torsion = Vec::new();
    let mut d_nabla_i = Vec::new();
    for i in 0..n {
        let mut tor = fr.structure[i].clone();
        let mut dn = DifferentialForm::zero(n, 2);
        for j in 0..n {
            tor = tor.add(&w[i][j].wedge(&basis(j))?);
            if !im[i][j].is_zero() {
                dn = dn.add(&fr.structure[j].scale_rational(&im[i][j]));
            }
            for kk in 0..n {
                if !im[kk][j].is_zero() {
                    dn = dn.add(&w[i][kk].wedge(&basis(j))?.scale_rational(&im[kk][j]));
                }
            }
        }
        torsion.push(tor.reduce(&fr.relations));
        d_nabla_i.push(dn.reduce(&fr.relations));
    }
    let mut compatibility = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut f = DifferentialForm::zero(n, 1);
            for l in 0..n {
                if !m[l][j].is_zero() {
                    f = f.add(&w[l][i].scale_rational(&m[l][j]));
                }
                if !m[i][l].is_zero() {
                    f = f.add(&w[l][j].scale_rational(&m[i][l]));
                }
            }
            compatibility.push(f.reduce(&fr.relations));
        }
    }
    let mut curvature = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut f = fr.d(&w[i][j]);
            for kk in 0..n {
                f = f.add(&w[i][kk].wedge(&w[kk][j])?);
            }
            curvature.push(f.reduce(&fr.relations));
        }
    }
    Ok(ConnectionResiduals { torsion, compatibility, d_nabla_i, curvature })
}

/// Polynomial equations in the unknowns from the vanishing of form components
/// as functions of `(t, c, s)`.
pub fn extract_equations(forms: &[DifferentialForm], rel: &Relations) -> Vec<Polynomial> {
    let mut out = Vec::new();
    for f in forms {
        for c in f.terms().values() {
            let r = c.reduce(rel);
            for (_, p) in r.numerator().coefficients_in(&[T, C, S]) {
                let q = p.map_vars(|v| v - UNKNOWNS);
                if !q.is_zero() {
                    out.push(q);
                }
            }
        }
    }
    out
}

/// Connection forms with the unknowns replaced by values.
pub fn substitute(w: &ConnectionForms, values: &[Rational]) -> ConnectionForms {
    let mut images: Vec<Polynomial> = (0..UNKNOWNS).map(Polynomial::var).collect();
    images.extend((0..3 * BLOCK).map(|u| Polynomial::constant(values.get(u).cloned().unwrap_or_default())));
    w.iter()
        .map(|row| row.iter().map(|f| f.map(|c| c.substitute(&images).expect("no new poles")).reduce(&circle())).collect())
        .collect()
}

#[derive(Clone, Debug)]
pub struct SpecialConnection {
    pub values: Vec<Rational>,
    pub forms: ConnectionForms,
    pub free: usize,
    pub choices: Vec<Choice>,
    pub equations: usize,
}

pub fn unknown_name(u: usize) -> String {
    let block = ["P", "Q", "R"][u / BLOCK];
    let r = u % BLOCK;
    format!("{block}{}{}{}", r / 16, (r / 4) % 4, r % 4)
}

/// Solves for a flat torsion-free symplectic connection with `d^nabla I = 0`
/// in the mode-two Fourier ansatz.
pub fn solve_special_connection(cone: &Cone) -> Result<SpecialConnection> {
    let w = ansatz(true);
    let fr = &cone.chart.frame;
    let rel = cone.chart.relations();
    let res = connection_residuals(fr, &w, &cone.om, &cone.im)?;
    let mut forms = res.torsion.clone();
    forms.extend(res.compatibility.iter().cloned());
    forms.extend(res.d_nabla_i.iter().cloned());
    forms.extend(res.curvature.iter().cloned());
    let eqs = extract_equations(&forms, rel);
    let opts = polysys::Options { gauge: (2 * BLOCK..3 * BLOCK).collect() };
    match polysys::solve(&eqs, 3 * BLOCK, &opts) {
        Outcome::Solved { values, free, choices } => Ok(SpecialConnection { forms: substitute(&w, &values), values, free: free.len(), choices, equations: eqs.len() }),
        Outcome::Inconsistent { reason, rank_defect, branches } => Err(Error::Unsolvable(match rank_defect {
            Some(d) => format!("{} equations; {d}", eqs.len()),
            None => format!("{} equations; {reason} ({branches} branches)", eqs.len()),
        })),
    }
}

/// The Levi-Civita connection of `g_C` among constant coefficients.
pub fn levi_civita(cone: &Cone) -> Result<ConnectionForms> {
    let w = ansatz(false);
    let fr = &cone.chart.frame;
    let res = connection_residuals(fr, &w, &cone.eta, &cone.im)?;
    let mut forms = res.torsion;
    forms.extend(res.compatibility);
    let eqs = extract_equations(&forms, cone.chart.relations());
    match polysys::solve(&eqs, 3 * BLOCK, &polysys::Options::default()) {
        Outcome::Solved { values, free, .. } => {
            let used: Vec<usize> = free.into_iter().filter(|&u| u < BLOCK).collect();
            if !used.is_empty() {
                return Err(Error::Unsolvable(format!("Levi-Civita system underdetermined in {} unknowns", used.len())));
            }
            Ok(substitute(&w, &values))
        }
        Outcome::Inconsistent { reason, .. } => Err(Error::Unsolvable(reason)),
    }
}

/// Whether two connections agree as forms.
pub fn same_connection(a: &ConnectionForms, b: &ConnectionForms) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| x.sub(y).reduce(&circle()).is_zero())
}

/// Exact residuals of a solved special connection; empty iff it is special and flat.
pub fn special_residual_summary(cone: &Cone, w: &ConnectionForms) -> Result<Option<String>> {
    let res = connection_residuals(&cone.chart.frame, w, &cone.om, &cone.im)?;
    let parts: Vec<Tensor<CoefficientFunction>> = [res.torsion, res.compatibility, res.d_nabla_i, res.curvature].into_iter().flatten().map(Tensor::Form).collect();
    Ok(residual_summary(&parts, cone.chart.relations(), &cone.chart.scalars))
}

fn named_values(values: &[Rational]) -> serde_json::Map<String, serde_json::Value> {
    values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(u, v)| (unknown_name(u), json!(v.to_string()))).collect()
}

/// Cone checks and the special connection; the connection is returned when it exists.
pub fn verify_cone(lambda2: &Rational) -> Result<(VerificationReport, Cone, Option<SpecialConnection>)> {
    let cone = build_cone(lambda2)?;
    let mut r = VerificationReport::new("cone");
    let plain = plain_cone_chart(&CoefficientFunction::generator(1), &["l"], vec![DifferentialForm::zero(4, 1)])?;
    let bad: Vec<String> = [plain.consistency_check(), cone.chart.consistency_check()].iter().flat_map(|c| c.failures().into_iter().map(|e| format!("{}: {}", e.name, e.residual)).collect::<Vec<_>>()).collect();
    r.push(CheckEntry::identity("cone_chart_consistency", "symbolic", bad.is_empty(), if bad.is_empty() { "0".into() } else { bad.join("; ") }));
    let red: Vec<Tensor<CoefficientFunction>> = lambda_reduction_residuals()?.into_iter().map(Tensor::Form).collect();
    let s = residual_summary(&red, &Relations::none(), &["t".to_string(), "l".to_string()]);
    r.push(CheckEntry::identity("cone_lambda_reduction", "symbolic", s.is_none(), s.unwrap_or_else(|| "0".into())));
    let dw = cone.chart.d(&cone.omega);
    r.push(CheckEntry::identity("cone_kahler_closed", "symbolic", dw.is_zero(), cone.chart.format_form(&dw)));
    let (p, m, z) = linalg::inertia(&cone.eta);
    r.push(CheckEntry::identity("cone_signature", "symbolic", (p, m, z) == (2, 2, 0), format!("({p},{m})")));

    let sc = match solve_special_connection(&cone) {
        Ok(sc) => sc,
        Err(e) => {
            r.push(CheckEntry::new("special_connection", "symbolic", Status::Fail, false, format!("no solution for lambda^2 = {lambda2}: {e}")));
            return Ok((r, cone, None));
        }
    };
    let choices: Vec<String> = sc.choices.iter().map(|c| format!("{} {} = {}", if c.kind == ChoiceKind::Gauge { "gauge" } else { "root" }, unknown_name(c.var), c.value)).collect();
    r.push(CheckEntry::identity("special_connection", "symbolic", true, "0").with_detail(json!({
        "lambda2": lambda2.to_string(),
        "equations": sc.equations,
        "free": sc.free,
        "choices": choices,
        "values": named_values(&sc.values),
    })));
    let lc = levi_civita(&cone);
    let (status, text) = match &lc {
        Ok(lc) => {
            let equal = same_connection(&sc.forms, lc);
            let expected = *lambda2 == Rational::from_int(4);
            (equal == expected, if equal { "equal to Levi-Civita" } else { "distinct from Levi-Civita" }.to_string())
        }
        Err(e) => (false, format!("Levi-Civita: {e}")),
    };
    r.push(CheckEntry::new("special_connection_levi_civita", "symbolic", if status { Status::Pass } else { Status::Fail }, status, text));
    let s = special_residual_summary(&cone, &sc.forms)?;
    r.push(CheckEntry::identity("special_connection_flat", "symbolic", s.is_none(), s.unwrap_or_else(|| "0".into())));
    Ok((r, cone, Some(sc)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_is_consistent_and_kahler() {
        for l2 in [Rational::from_int(4), Rational::new(4, 3), Rational::one()] {
            let c = build_cone(&l2).unwrap();
            assert!(c.chart.is_consistent(), "{}", c.chart.consistency_check().to_text());
            assert!(c.chart.d(&c.omega).is_zero());
        }
        assert!(lambda_reduction_residuals().unwrap().iter().all(|r| r.is_zero()));
    }

    #[test]
    fn special_connections() {
        let v = |sc: &SpecialConnection, name: &str| {
            let u = (0..3 * BLOCK).find(|&u| unknown_name(u) == name).unwrap();
            sc.values[u].clone()
        };
        let c4 = build_cone(&Rational::from_int(4)).unwrap();
        let s4 = solve_special_connection(&c4).unwrap();
        assert_eq!(v(&s4, "P311"), Rational::new(1, 4));
        assert!(same_connection(&s4.forms, &levi_civita(&c4).unwrap()));

        let c43 = build_cone(&Rational::new(4, 3)).unwrap();
        let s43 = solve_special_connection(&c43).unwrap();
        assert_eq!(v(&s43, "P311"), Rational::new(3, 4));
        assert_eq!(v(&s43, "Q110"), Rational::one());
        assert_eq!(v(&s43, "R111"), Rational::one());
        assert!(!same_connection(&s43.forms, &levi_civita(&c43).unwrap()));

        let e = solve_special_connection(&build_cone(&Rational::one()).unwrap()).unwrap_err();
        assert!(matches!(e, Error::Unsolvable(_)), "{e}");
    }

    #[test]
    fn cone_reports() {
        let (r, _, sc) = verify_cone(&Rational::new(4, 3)).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert!(sc.is_some());
        let (r, _, sc) = verify_cone(&Rational::one()).unwrap();
        assert!(!r.passed() && sc.is_none());
        assert!(r.entry("special_connection").unwrap().residual.contains("rank"));
    }

    #[test]
    fn unknown_names() {
        assert_eq!(unknown_name(3 * 16 + 1 * 4 + 1), "P311");
        assert_eq!(unknown_name(2 * BLOCK + 1 * 16 + 1 * 4 + 1), "R111");
    }
}
