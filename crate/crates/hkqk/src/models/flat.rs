//! Flat `H^{p,q}` with the rotating circle action of weights `lambda_i`.

use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::coeff::CoefficientFunction;
use crate::correspondence::canonical_twist_data;
use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, MetricTensor, VectorField};
use crate::hk::{derive_symmetry_data, HyperKahlerStructure, SymmetryData};
use crate::rational::Rational;
use crate::relations::Relations;
use crate::twist::TwistData;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatParams {
    pub p: usize,
    pub q: usize,
    pub lambdas: Vec<Rational>,
    #[serde(default)]
    pub c: Rational,
    #[serde(default = "one")]
    pub k: Rational,
}

fn one() -> Rational {
    Rational::one()
}

impl FlatParams {
    pub fn new(p: usize, q: usize, lambdas: &[Rational], c: Rational, k: Rational) -> Self {
        FlatParams { p, q, lambdas: lambdas.to_vec(), c, k }
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    pub fn eps(&self, i: usize) -> i64 {
        if i < self.p {
            1
        } else {
            -1
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlatModel {
    pub params: FlatParams,
    pub chart: Chart,
    pub h: HyperKahlerStructure,
    pub sd: SymmetryData,
    pub td: TwistData,
    /// `sum eps_i lambda_i (-y dx + x dy - v du + u dv)`, a primitive of `G`.
    pub beta: DifferentialForm,
    /// `2 sum eps_i lambda_i (dx ^ dy + du ^ dv)`.
    pub g_ref: DifferentialForm,
}

pub fn coordinate_names(n: usize) -> Vec<String> {
    (1..=n).flat_map(|i| ["x", "y", "u", "v"].map(|s| format!("{s}{i}"))).collect()
}

pub fn build_flat_model(params: &FlatParams) -> Result<FlatModel> {
    let n = params.n();
    if n < 2 {
        return Err(Error::InvalidParams(format!("p + q must be at least 2, got {n}")));
    }
    if params.lambdas.len() != n {
        return Err(Error::InvalidParams(format!("{} weights for {n} blocks", params.lambdas.len())));
    }
    if params.k.is_zero() {
        return Err(Error::InvalidParams("k must be nonzero".into()));
    }
    let null: Rational = (0..n).map(|i| &Rational::from_int(params.eps(i)) * &(&params.lambdas[i] * &params.lambdas[i])).fold(Rational::zero(), |a, b| &a + &b);
    // all weights zero is the pure circle rotation with G = 0, kept as the trivial twist
    if null.is_zero() && params.lambdas.iter().any(|l| !l.is_zero()) {
        return Err(Error::NullSymmetry("sum eps_i lambda_i^2 = 0".into()));
    }
    let dim = 4 * n;
    let names = coordinate_names(n);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let chart = Chart::coordinate(&refs);
    let k = |r: Rational| CoefficientFunction::constant(r);
    let var = |i: usize| CoefficientFunction::generator(i);
    let half = Rational::new(1, 2);

    let mut g = Vec::with_capacity(dim);
    let mut wi = Vec::new();
    let mut wj = Vec::new();
    let mut wk = Vec::new();
    let mut x = vec![CoefficientFunction::zero(); dim];
    let mut mu = CoefficientFunction::zero();
    let mut g_ref = Vec::new();
    let mut beta = Vec::new();
    for i in 0..n {
        let e = Rational::from_int(params.eps(i));
        let l = &params.lambdas[i];
        let (ix, iy, iu, iv) = (4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3);
        g.extend(std::iter::repeat(k(e.clone())).take(4));
        wi.push((vec![ix, iy], e.clone()));
        wi.push((vec![iu, iv], -e.clone()));
        wj.push((vec![ix, iu], -e.clone()));
        wj.push((vec![iy, iv], -e.clone()));
        wk.push((vec![iy, iu], -e.clone()));
        wk.push((vec![ix, iv], e.clone()));
        let a = &half - l;
        let b = &half + l;
        x[ix] = var(iy).scale(&a);
        x[iy] = var(ix).scale(&-a.clone());
        x[iu] = var(iv).scale(&-b.clone());
        x[iv] = var(iu).scale(&b);
        let r1 = var(ix).mul(&var(ix)).add(&var(iy).mul(&var(iy)));
        let r2 = var(iu).mul(&var(iu)).add(&var(iv).mul(&var(iv)));
        mu = mu.add(&r1.scale(&a).add(&r2.scale(&b)).scale(&(&half * &e)));
        let el = &e * l;
        g_ref.push((vec![ix, iy], &Rational::from_int(2) * &el));
        g_ref.push((vec![iu, iv], &Rational::from_int(2) * &el));
        beta.push((vec![ix], var(iy).scale(&-el.clone())));
        beta.push((vec![iy], var(ix).scale(&el)));
        beta.push((vec![iu], var(iv).scale(&-el.clone())));
        beta.push((vec![iv], var(iu).scale(&el)));
    }
    let form2 = |t: Vec<(Vec<usize>, Rational)>| DifferentialForm::from_components(dim, 2, t.into_iter().map(|(ix, c)| (ix, k(c))));
    let h = HyperKahlerStructure::from_kahler_forms(MetricTensor::diagonal(g), [form2(wi), form2(wj), form2(wk)], &Relations::none())?;
    let sd = derive_symmetry_data(&chart, &h, VectorField::new(x), mu)?;
    let td = canonical_twist_data(&sd, &params.k, &params.c);
    Ok(FlatModel {
        params: params.clone(),
        chart,
        h,
        sd,
        td,
        beta: DifferentialForm::from_components(dim, 1, beta),
        g_ref: form2(g_ref),
    })
}

impl FlatModel {
    /// `k beta`, a primitive of `F`.
    pub fn f_primitive(&self) -> DifferentialForm {
        self.beta.scale_rational(&self.params.k)
    }

    /// `beta(X) - (g(X,X) - mu)`.
    pub fn bridge_residual(&self) -> CoefficientFunction {
        self.sd.x.pair(&self.beta).sub(&self.sd.norm_x2.sub(&self.sd.mu))
    }

    /// Integer data for the smoothness predicate.
    pub fn weights(&self) -> &[Rational] {
        &self.params.lambdas
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_int(x)).collect()
    }

    #[test]
    fn null_and_invalid_parameters() {
        let p = FlatParams::new(1, 1, &ints(&[1, 1]), Rational::zero(), Rational::one());
        assert!(matches!(build_flat_model(&p), Err(Error::NullSymmetry(_))));
        let p = FlatParams::new(1, 0, &ints(&[1]), Rational::zero(), Rational::one());
        assert!(matches!(build_flat_model(&p), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn zero_weights_give_trivial_twist() {
        let p = FlatParams::new(2, 0, &ints(&[0, 0]), Rational::one(), Rational::one());
        let m = build_flat_model(&p).unwrap();
        assert!(m.sd.big_g.is_zero());
        assert!(m.td.f.is_zero());
        assert_eq!(m.td.a, CoefficientFunction::one());
    }

    #[test]
    fn bridge_identity_holds() {
        let p = FlatParams::new(1, 1, &ints(&[1, 2]), Rational::one(), Rational::one());
        let m = build_flat_model(&p).unwrap();
        assert!(m.bridge_residual().is_zero());
        assert_eq!(m.chart.d(&m.beta), m.sd.big_g);
        assert_eq!(m.g_ref, m.sd.big_g);
    }
}
