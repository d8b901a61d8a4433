//! Random forms on the cone chart for the property tests.

#![allow(dead_code)]

use hkqk::chart::Chart;
use hkqk::models::cone::build_cone;
use hkqk::{CoefficientFunction, DifferentialForm, Rational, VectorField};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub const DIM: usize = 4;
pub const CASES: u32 = 200;

pub fn chart() -> Chart {
    build_cone(&Rational::new(4, 3)).unwrap().chart
}

/// `(coefficient, exponents of t, c, s)` terms, optionally over `t`.
pub type RawCoefficient = (Vec<(i64, u32, u32, u32)>, bool);

pub fn raw_coefficient() -> impl Strategy<Value = RawCoefficient> {
    (prop::collection::vec((-3i64..=3, 0u32..3, 0u32..3, 0u32..3), 0..3), any::<bool>())
}

pub fn coefficient(raw: &RawCoefficient) -> CoefficientFunction {
    let g = CoefficientFunction::generator;
    let power = |v: usize, e: u32| (0..e).fold(CoefficientFunction::one(), |acc, _| acc.mul(&g(v)));
    let mut f = CoefficientFunction::zero();
    for &(k, a, b, c) in &raw.0 {
        f = f.add(&power(0, a).mul(&power(1, b)).mul(&power(2, c)).scale(&Rational::from_int(k)));
    }
    if raw.1 {
        f = f.div(&g(0)).unwrap();
    }
    f
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u64..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

pub fn raw_form(degree: usize) -> impl Strategy<Value = (usize, Vec<RawCoefficient>)> {
    let n = subsets(DIM, degree).len();
    prop::collection::vec(raw_coefficient(), n).prop_map(move |v| (degree, v))
}

pub fn form(raw: &(usize, Vec<RawCoefficient>)) -> DifferentialForm {
    let (degree, coeffs) = raw;
    let comps = subsets(DIM, *degree).into_iter().zip(coeffs.iter().map(coefficient));
    DifferentialForm::from_components(DIM, *degree, comps)
}

pub fn raw_form_any() -> impl Strategy<Value = (usize, Vec<RawCoefficient>)> {
    (0usize..=DIM).prop_flat_map(raw_form)
}

pub fn raw_vector() -> impl Strategy<Value = Vec<RawCoefficient>> {
    prop::collection::vec(raw_coefficient(), DIM)
}

pub fn vector(raw: &[RawCoefficient]) -> VectorField {
    VectorField::new(raw.iter().map(coefficient).collect())
}

fn zero(ch: &Chart, f: &DifferentialForm) -> bool {
    f.reduce(ch.relations()).is_zero()
}

pub fn d_squared(ch: &Chart, a: &DifferentialForm) -> bool {
    zero(ch, &ch.d(&ch.d(a)))
}

/// `L_X a = d(X -| a) + X -| da`.
pub fn cartan(ch: &Chart, x: &VectorField, a: &DifferentialForm) -> bool {
    let lhs = ch.lie(x, a).unwrap();
    let mut rhs = a.interior(x).map(|i| ch.d(&i)).unwrap_or_else(|_| DifferentialForm::zero(DIM, a.degree()));
    if a.degree() < DIM {
        rhs = rhs.add(&ch.d(a).interior(x).unwrap());
    }
    zero(ch, &lhs.sub(&rhs))
}

/// `d(a ^ b) = da ^ b + (-1)^p a ^ db`.
pub fn antiderivation(ch: &Chart, a: &DifferentialForm, b: &DifferentialForm) -> bool {
    let lhs = ch.d(&a.wedge(b).unwrap());
    let sign = if a.degree() % 2 == 0 { Rational::one() } else { -Rational::one() };
    let rhs = ch.d(a).wedge(b).unwrap().add(&a.wedge(&ch.d(b)).unwrap().scale_rational(&sign));
    zero(ch, &lhs.sub(&rhs))
}

/// `a ^ b = (-1)^{pq} b ^ a`.
pub fn graded_commutative(ch: &Chart, a: &DifferentialForm, b: &DifferentialForm) -> bool {
    let sign = if a.degree() * b.degree() % 2 == 0 { Rational::one() } else { -Rational::one() };
    zero(ch, &a.wedge(b).unwrap().sub(&b.wedge(a).unwrap().scale_rational(&sign)))
}

/// A runner with a fixed seed.
pub fn runner() -> TestRunner {
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[7; 32]))
}
