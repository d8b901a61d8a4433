//! Rigid c-map: the cotangent bundle `H = T*C` of the cone with its flat
//! special connection, and the twist of the canonical deformation.
//!
//! Coframe on `H`: the cone coframe `0..4` and `Dp_0..Dp_3` at `4..8`.
//! Scalars: `t, c, s, p_0..p_3`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::chart::Chart;
use crate::coeff::CoefficientFunction;
use crate::correspondence::{canonical_deformation, canonical_twist_data, Correspondence};
use crate::error::{Error, Result};
use crate::forms::{two_form_of, DifferentialForm, EndomorphismField, Matrix, MetricTensor, VectorField};
use crate::hk::{derive_symmetry_data, HyperKahlerStructure, SymmetryData};
use crate::linalg::{self, mat_mul, transpose};
use crate::rational::Rational;
use crate::report::{CheckEntry, Status, VerificationReport};
use crate::twist::{basic_form_check, jacobi_residuals, principal_extension, structure_constants, PrincipalExtension, StructureFunctions, TwistData};
use crate::verify::Verifier;

use super::cone::{circle, cone_differentials, cone_structure, Cone, SpecialConnection, C, S, T};

pub const DIM: usize = 8;

fn p_index(i: usize) -> usize {
    3 + i
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmapParams {
    pub lambda2: Rational,
    #[serde(default)]
    pub c: Rational,
}

#[derive(Clone, Debug)]
pub struct CmapModel {
    pub params: CmapParams,
    pub chart: Chart,
    pub h: HyperKahlerStructure,
    pub sd: SymmetryData,
    pub td: TwistData,
    /// The stored curvature form, compared with `G` to find `k`.
    pub f_ref: DifferentialForm,
    pub k: Rational,
    /// Primitive of `F`: `-(t/2) phi + 1/2 E -| (-L Dp_0 ^ Dp_1 + Dp_2 ^ Dp_3)`.
    pub beta: DifferentialForm,
}

pub fn scalar_names() -> Vec<String> {
    ["t", "c", "s", "p0", "p1", "p2", "p3"].map(String::from).to_vec()
}

/// `T*C` with `d(Dp_i) = omega^j_i ^ Dp_j` and `dp_i = Dp_i + p_j omega^j_i`.
pub fn cotangent_chart(cone: &Cone, connection: &SpecialConnection) -> Result<Chart> {
    let w = |i: usize, j: usize| connection.forms[i][j].extend_dim(DIM);
    let mut structure = cone_structure(&cone.lambda2, DIM);
    for i in 0..4 {
        let mut f = DifferentialForm::zero(DIM, 2);
        for j in 0..4 {
            f = f.add(&w(j, i).wedge(&DifferentialForm::basis(DIM, 4 + j))?);
        }
        structure.push(f.reduce(&circle()));
    }
    let mut diffs = cone_differentials(&cone.lambda2, DIM);
    for i in 0..4 {
        let mut f = DifferentialForm::basis(DIM, 4 + i);
        for j in 0..4 {
            f = f.add(&w(j, i).scale(&CoefficientFunction::generator(p_index(j))));
        }
        diffs.push(f.reduce(&circle()));
    }
    let coframe = ["a", "b", "phi", "psi", "Dp0", "Dp1", "Dp2", "Dp3"].map(String::from).to_vec();
    Chart::new(coframe, scalar_names(), structure, diffs, circle())
}

fn k(r: Rational) -> CoefficientFunction {
    CoefficientFunction::constant(r)
}

fn two(i: usize, j: usize, c: Rational) -> DifferentialForm {
    DifferentialForm::monomial(DIM, &[i, j], k(c))
}

pub fn build_cmap_model(params: &CmapParams, cone: &Cone, connection: &SpecialConnection) -> Result<CmapModel> {
    let l = &params.lambda2;
    let li = l.recip().ok_or_else(|| Error::InvalidParams("lambda^2 = 0".into()))?;
    let chart = cotangent_chart(cone, connection)?;
    let rel = chart.relations();
    let one = Rational::one();
    let m1 = -one.clone();
    let diag = [li.clone(), li.clone(), m1.clone(), m1.clone(), l.clone(), l.clone(), m1.clone(), m1.clone()];
    let g = MetricTensor::diagonal(diag.iter().cloned().map(k).collect());
    let omega_i = two(0, 1, li.clone()).add(&two(2, 3, m1.clone())).add(&two(4, 5, -l.clone())).add(&two(6, 7, one.clone()));
    let mut omega_j = DifferentialForm::zero(DIM, 2);
    for i in 0..4 {
        omega_j = omega_j.add(&DifferentialForm::basis(DIM, 4 + i).wedge(&DifferentialForm::basis(DIM, i))?);
    }
    // K = IJ with A = -g^{-1} omega_A
    let ginv: Matrix<CoefficientFunction> = (0..DIM).map(|a| (0..DIM).map(|b| if a == b { k(diag[a].recip().unwrap()) } else { CoefficientFunction::zero() }).collect()).collect();
    let end = |w: &DifferentialForm| -> Result<EndomorphismField> { Ok(EndomorphismField::from_matrix(linalg::mat_neg(&mat_mul(&ginv, &w.to_matrix()?)))) };
    let kk = end(&omega_i)?.compose(&end(&omega_j)?);
    let omega_k = two_form_of(&g, &kk);
    let h = HyperKahlerStructure::from_kahler_forms(g, [omega_i, omega_j, omega_k], rel)?;

    let t = CoefficientFunction::generator(T);
    let mut x = vec![CoefficientFunction::zero(); DIM];
    x[2] = t.clone();
    let mu = t.mul(&t).scale(&Rational::new(-1, 2));
    let sd = derive_symmetry_data(&chart, &h, VectorField::new(x), mu)?;

    let f_ref = two(0, 1, -li.clone()).add(&two(2, 3, one.clone())).add(&two(4, 5, -l.clone())).add(&two(6, 7, one.clone()));
    let kf = match_factor(&f_ref, &sd.big_g, &chart)?;
    let td = canonical_twist_data(&sd, &kf, &params.c);

    let mut e = vec![CoefficientFunction::zero(); DIM];
    for i in 0..4 {
        e[4 + i] = CoefficientFunction::generator(p_index(i));
    }
    let fib = two(4, 5, -l.clone()).add(&two(6, 7, one));
    let beta = DifferentialForm::monomial(DIM, &[2], t.scale(&Rational::new(-1, 2)))
        .add(&fib.interior(&VectorField::new(e))?.scale_rational(&Rational::new(1, 2)))
        .scale_rational(&kf);
    Ok(CmapModel { params: params.clone(), chart, h, sd, td, f_ref, k: kf, beta })
}

/// The constant `k` with `f = k g`.
pub fn match_factor(f: &DifferentialForm, g: &DifferentialForm, chart: &Chart) -> Result<Rational> {
    let rel = chart.relations();
    let (mask, gv) = g.terms().iter().find(|(_, c)| !c.reduce(rel).is_zero()).ok_or_else(|| Error::InvalidTwist("G vanishes".into()))?;
    let fv = f.terms().get(mask).cloned().unwrap_or_else(CoefficientFunction::zero);
    let ratio = fv.div(gv).and_then(|r| r.constant_value(rel)).ok_or_else(|| Error::InvalidTwist("F / G is not constant".into()))?;
    let res = f.sub(&g.scale_rational(&ratio)).reduce(rel);
    if !res.is_zero() {
        return Err(Error::InvalidTwist(format!("F is not a multiple of G: {}", chart.format_form(&res))));
    }
    Ok(ratio)
}

/// Rotation of the fiber forms by the cone angle.
fn rotated(c: &CoefficientFunction, s: &CoefficientFunction, u: &DifferentialForm, v: &DifferentialForm) -> [DifferentialForm; 2] {
    [u.scale(c).add(&v.scale(s)), v.scale(c).sub(&u.scale(s))]
}

/// Everything derived on the principal bundle.
pub struct CmapTwist {
    pub ext: PrincipalExtension,
    pub coframe: Vec<DifferentialForm>,
    pub structure: Option<StructureFunctions>,
    /// `g^N` in the coframe.
    pub gn: Option<Matrix<CoefficientFunction>>,
}

impl CmapModel {
    pub fn lambda2(&self) -> &Rational {
        &self.params.lambda2
    }

    /// The constant `c` of the extension, `a - beta(X)`.
    pub fn extension_constant(&self) -> Result<Rational> {
        let rel = self.chart.relations();
        self.td.a.sub(&self.sd.x.pair(&self.beta)).constant_value(rel).ok_or_else(|| Error::InvalidTwist("a - beta(X) is not constant".into()))
    }

    pub fn extension(&self) -> Result<PrincipalExtension> {
        principal_extension(&self.chart, &self.td, &self.beta, &self.extension_constant()?)
    }

    /// `eta_i = (theta^i)_H / t` on the cone part and the rotated fiber forms over `t`.
    pub fn twisted_coframe(&self, ext: &PrincipalExtension, rotate: bool) -> Result<Vec<DifferentialForm>> {
        let n = ext.extended.dim();
        let rel = ext.extended.relations();
        let ti = CoefficientFunction::generator(T).recip().unwrap();
        let mut out = Vec::with_capacity(DIM);
        for i in 0..4 {
            out.push(ext.horizontal_lift(&DifferentialForm::basis(DIM, i))?.scale(&ti));
        }
        let dp = |i: usize| DifferentialForm::basis(n, 4 + i);
        if rotate {
            let (c, s) = (CoefficientFunction::generator(C), CoefficientFunction::generator(S));
            out.extend(rotated(&c, &s, &dp(0), &dp(1)));
            out.extend(rotated(&c, &s, &dp(2), &dp(3)));
            for f in &mut out[4..] {
                *f = f.scale(&ti);
            }
        } else {
            out.extend((0..4).map(|i| dp(i).scale(&ti)));
        }
        Ok(out.into_iter().map(|f| f.reduce(rel)).collect())
    }

    /// The horizontal lift of `g^N` in the coframe: `B^T g^N B` where
    /// `theta^a = B^a_k eta^k` on the kernel of `theta`.
    pub fn gn_in_coframe(&self, ext: &PrincipalExtension, coframe: &[DifferentialForm], gn: &MetricTensor) -> Result<Matrix<CoefficientFunction>> {
        let rel = ext.extended.relations();
        let m = DIM + 1;
        let mut a: Matrix<CoefficientFunction> = coframe.iter().map(|e| (0..m).map(|b| e.coefficient(&[b])).collect()).collect();
        a.push((0..m).map(|b| if b == DIM { CoefficientFunction::one() } else { CoefficientFunction::zero() }).collect());
        let ainv = linalg::inverse(&a, rel).ok_or_else(|| Error::NotACoframe("twisted coframe is degenerate".into()))?;
        let b: Matrix<CoefficientFunction> = ainv[..DIM].iter().map(|r| r[..DIM].to_vec()).collect();
        Ok(linalg::mat_reduce(&mat_mul(&mat_mul(&transpose(&b), gn.matrix()), &b), rel))
    }

    pub fn twist(&self) -> Result<CmapTwist> {
        let ext = self.extension()?;
        let coframe = self.twisted_coframe(&ext, true)?;
        let structure = structure_constants(&ext, &coframe).ok();
        let spec = canonical_deformation(&self.sd, &self.params.c, &self.chart)?;
        let corr = Correspondence { chart: &self.chart, h: &self.h, sd: &self.sd, td: &self.td, spec: &spec, c: self.params.c.clone(), k: self.k.clone() };
        let gn = self.gn_in_coframe(&ext, &coframe, &corr.g_n()).ok();
        Ok(CmapTwist { ext, coframe, structure, gn })
    }
}

/// `d eta^i = sum coefficient eta^j ^ eta^k`, `j < k`, as `(i, j, k, num, den)`.
type Table = &'static [(usize, usize, usize, i64, i64)];

const REFERENCE_4: Table = &[
    (1, 0, 1, -1, 1),
    (2, 2, 3, 2, 1),
    (2, 4, 5, -8, 1),
    (2, 6, 7, 2, 1),
    (4, 3, 4, -1, 1),
    (4, 1, 5, -1, 2),
    (4, 1, 6, 1, 4),
    (4, 0, 7, 1, 4),
    (5, 3, 5, -1, 1),
    (5, 1, 4, 1, 2),
    (5, 1, 7, 1, 4),
    (5, 0, 6, -1, 4),
    (6, 3, 6, -1, 1),
    (6, 1, 7, 1, 2),
    (6, 1, 4, 1, 1),
    (6, 0, 5, -1, 1),
    (7, 3, 7, -1, 1),
    (7, 1, 6, -1, 2),
    (7, 1, 5, 1, 1),
    (7, 0, 4, 1, 1),
];

const REFERENCE_4_3: Table = &[
    (1, 0, 1, -1, 1),
    (2, 2, 3, 2, 1),
    (2, 4, 5, -8, 3),
    (2, 6, 7, 2, 1),
    (4, 3, 4, -1, 1),
    (4, 1, 5, 3, 2),
    (4, 0, 4, -1, 1),
    (4, 1, 6, 3, 4),
    (4, 0, 7, 3, 4),
    (5, 3, 5, -1, 1),
    (5, 1, 4, 1, 2),
    (5, 0, 5, 1, 1),
    (5, 1, 7, 3, 4),
    (5, 0, 6, -3, 4),
    (6, 3, 6, -1, 1),
    (6, 1, 7, 3, 2),
    (6, 1, 4, 1, 1),
    (6, 0, 5, -1, 1),
    (7, 3, 7, -1, 1),
    (7, 1, 6, -3, 2),
    (7, 1, 5, 1, 1),
    (7, 0, 4, 1, 1),
];

/// Stored structure equations for `c = 0`, as `c^i_jk` with `j < k`.
pub fn reference(lambda2: &Rational) -> Option<Vec<Vec<Vec<Rational>>>> {
    let table = if *lambda2 == Rational::from_int(4) {
        REFERENCE_4
    } else if *lambda2 == Rational::new(4, 3) {
        REFERENCE_4_3
    } else {
        return None;
    };
    let mut c = vec![vec![vec![Rational::zero(); DIM]; DIM]; DIM];
    for &(i, j, kk, n, d) in table {
        let v = Rational::new(n, d);
        c[i][j][kk] = -v.clone();
        c[i][kk][j] = v;
    }
    Some(c)
}

fn entry(name: &str, ok: bool, residual: impl Into<String>) -> CheckEntry {
    CheckEntry::identity(name, "symbolic", ok, residual)
}

/// The c-map specific checks; every one is symbolic.
pub fn verify_cmap(m: &CmapModel) -> VerificationReport {
    let mut r = VerificationReport::new("rigid c-map");
    let cons = m.chart.consistency_check();
    let bad: Vec<String> = cons.failures().iter().map(|e| format!("{}: {}", e.name, e.residual)).collect();
    r.push(entry("cmap_fiber_consistency", bad.is_empty(), if bad.is_empty() { "0".into() } else { bad.join("; ") }));
    r.push(entry("cmap_twist_k", true, "0").with_detail(json!({ "k": m.k.to_string(), "F": m.chart.format_form(&m.f_ref) })));
    let expected = CoefficientFunction::generator(T).mul(&CoefficientFunction::generator(T)).scale(&Rational::new(-1, 2)).add(&k(m.params.c.clone())).scale(&m.k);
    let res = m.td.a.sub(&expected).reduce(m.chart.relations());
    r.push(entry("cmap_twist_function", res.is_zero(), res.format_with(&m.chart.scalars)));

    let tw = match m.twist() {
        Ok(tw) => tw,
        Err(e) => {
            r.push(entry("cmap_basic_coframe", false, format!("error: {e}")));
            return r;
        }
    };
    let basic: Vec<usize> = (0..DIM).filter(|&i| !basic_form_check(&tw.ext, &tw.coframe[i]).unwrap_or(false)).collect();
    r.push(entry("cmap_basic_coframe", basic.is_empty(), if basic.is_empty() { "0".into() } else { format!("not basic: {basic:?}") }));
    let unrotated = m.twisted_coframe(&tw.ext, false).map(|f| (4..DIM).filter(|&i| !basic_form_check(&tw.ext, &f[i]).unwrap_or(false)).collect::<Vec<_>>());
    match unrotated {
        Ok(nb) => r.push(CheckEntry::new(
            "cmap_unrotated_not_basic",
            "symbolic",
            if nb.is_empty() { Status::Fail } else { Status::Pass },
            nb.is_empty(),
            if nb.is_empty() { "all unrotated fiber forms are basic".to_string() } else { format!("not basic: {nb:?}") },
        )),
        Err(e) => r.push(entry("cmap_unrotated_not_basic", false, format!("error: {e}"))),
    }

    let rel = tw.ext.extended.relations();
    let names = &tw.ext.extended.scalars;
    match &tw.structure {
        None => r.push(entry("cmap_structure_constants", false, "coframe does not give structure functions")),
        Some(sf) => {
            let listing: Vec<String> = sf.nonzero().iter().map(|(i, j, kk, v)| format!("c^{i}_{j}{kk} = {}", v.format_with(names))).collect();
            r.push(entry("cmap_structure_constants", sf.constants.is_some(), if sf.constants.is_some() { "0" } else { "non-constant structure functions" }).with_detail(json!({ "nonzero": listing })));
            match &sf.constants {
                Some(c) => {
                    let jac = jacobi_residuals(c);
                    r.push(entry("cmap_jacobi", jac.is_empty(), if jac.is_empty() { "0".into() } else { format!("{} nonzero, first {:?}", jac.len(), jac[0]) }));
                    match reference(m.lambda2()).filter(|_| m.params.c.is_zero()) {
                        Some(refc) => {
                            let diff: Vec<String> = (0..DIM)
                                .flat_map(|i| (0..DIM).flat_map(move |j| (j + 1..DIM).map(move |kk| (i, j, kk))))
                                .filter(|&(i, j, kk)| c[i][j][kk] != refc[i][j][kk])
                                .map(|(i, j, kk)| format!("c^{i}_{j}{kk}: {} vs {}", c[i][j][kk], refc[i][j][kk]))
                                .collect();
                            r.push(entry("cmap_reference", diff.is_empty(), if diff.is_empty() { "0".into() } else { diff.join("; ") }));
                        }
                        None => r.push(CheckEntry::info("cmap_reference", "no stored reference for these parameters")),
                    }
                }
                None => r.push(entry("cmap_jacobi", false, "structure functions are not constant")),
            }
        }
    }
    match &tw.gn {
        None => r.push(entry("cmap_gN_constant", false, "g^N could not be expressed in the coframe")),
        Some(gn) => {
            let consts: Option<Matrix<Rational>> = gn.iter().map(|row| row.iter().map(|x| x.constant_value(rel)).collect()).collect();
            let text = crate::report::summarize_matrix(gn, names);
            r.push(entry("cmap_gN_constant", consts.is_some(), if consts.is_some() { "0".to_string() } else { text }));
            match consts {
                Some(cm) => {
                    let (p, q, z) = linalg::inertia(&cm);
                    let diag: Vec<String> = (0..DIM).map(|i| cm[i][i].to_string()).collect();
                    r.push(entry("cmap_gN_definite", q == 0 && z == 0, format!("inertia ({p},{q},{z})")).with_detail(json!({ "diagonal": diag })));
                }
                None => r.push(entry("cmap_gN_definite", false, "g^N is not constant")),
            }
        }
    }
    r
}

/// The dim 8 connection system of the canonical deformation at the sample points.
pub fn qk_connection_entry(m: &CmapModel, v: &Verifier) -> CheckEntry {
    match canonical_deformation(&m.sd, &m.params.c, &m.chart) {
        Ok(spec) => {
            let corr = Correspondence { chart: &m.chart, h: &m.h, sd: &m.sd, td: &m.td, spec: &spec, c: m.params.c.clone(), k: m.k.clone() };
            corr.connection_entry("cmap_qk_connection", v)
        }
        Err(e) => entry("cmap_qk_connection", false, format!("error: {e}")),
    }
}

/// `g(X, X)`, `a` and `mu - c` nonzero at a point.
pub fn admissible(m: &CmapModel, pt: &crate::forms::Point) -> bool {
    let nonzero = |f: &CoefficientFunction| f.eval(&pt.values).is_some_and(|v| !v.is_zero());
    nonzero(&m.sd.norm_x2) && nonzero(&m.td.a) && nonzero(&m.sd.mu.sub(&k(m.params.c.clone())))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::cone::verify_cone;
    use crate::verify::Mode;

    fn model(l2: Rational) -> CmapModel {
        let (_, cone, sc) = verify_cone(&l2).unwrap();
        build_cmap_model(&CmapParams { lambda2: l2, c: Rational::zero() }, &cone, &sc.unwrap()).unwrap()
    }

    #[test]
    fn cmap_checks_pass() {
        for l2 in [Rational::from_int(4), Rational::new(4, 3)] {
            let m = model(l2);
            assert_eq!(m.k, Rational::one());
            let r = verify_cmap(&m);
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn connection_solvable_at_samples() {
        let m = model(Rational::new(4, 3));
        let v = Verifier::new(Mode::Sampled, 5, 3, m.chart.scalars.clone(), m.chart.relations().clone(), |pt| admissible(&m, pt)).unwrap();
        let e = qk_connection_entry(&m, &v);
        assert_eq!(e.status, Status::Pass, "{e:?}");
    }
}
