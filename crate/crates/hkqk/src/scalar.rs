//! Coefficient rings the exterior calculus is generic over.

use std::fmt::Debug;

use crate::coeff::CoefficientFunction;
use crate::jet::Jet;
use crate::rational::Rational;
use crate::relations::Relations;

/// Commutative coefficient ring with partial inverses and derivatives along
/// the scalar generators.
pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn recip(&self) -> Option<Self>;
    /// Partial derivative along generator `v`.
    fn partial(&self, v: usize) -> Self;
    /// Normal form modulo the relations.
    fn reduce(&self, _rel: &Relations) -> Self {
        self.clone()
    }
    /// Sum of many terms.
    fn sum_all(items: &[Self]) -> Self {
        items.iter().fold(Self::zero(), |acc, x| acc.plus(x))
    }
    /// Heuristic size used to choose pivots.
    fn complexity(&self) -> usize {
        0
    }
    fn scale(&self, r: &Rational) -> Self {
        self.times(&Self::from_rational(r))
    }
    /// Exact value if the element is a known constant.
    fn as_rational(&self) -> Option<Rational>;
    /// Whether the element is zero where it is evaluated: identically
    /// modulo the relations for functions, at the base point for jets.
    fn vanishes(&self, rel: &Relations) -> bool {
        self.reduce(rel).is_zero()
    }
    /// Human-readable rendering given the scalar generator names.
    fn describe(&self, names: &[String]) -> String;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn recip(&self) -> Option<Self> {
        Rational::recip(self)
    }
    fn partial(&self, _v: usize) -> Self {
        Rational::zero()
    }
    fn complexity(&self) -> usize {
        self.height().min(1 << 20) as usize
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn describe(&self, _names: &[String]) -> String {
        self.to_string()
    }
}

impl Scalar for CoefficientFunction {
    fn zero() -> Self {
        CoefficientFunction::zero()
    }
    fn one() -> Self {
        CoefficientFunction::one()
    }
    fn from_rational(r: &Rational) -> Self {
        CoefficientFunction::constant(r.clone())
    }
    fn is_zero(&self) -> bool {
        CoefficientFunction::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn recip(&self) -> Option<Self> {
        CoefficientFunction::recip(self)
    }
    fn partial(&self, v: usize) -> Self {
        CoefficientFunction::partial(self, v)
    }
    fn reduce(&self, rel: &Relations) -> Self {
        CoefficientFunction::reduce(self, rel)
    }
    fn sum_all(items: &[Self]) -> Self {
        CoefficientFunction::sum(items.iter())
    }
    fn complexity(&self) -> usize {
        self.size()
    }
    fn scale(&self, r: &Rational) -> Self {
        CoefficientFunction::scale(self, r)
    }
    fn as_rational(&self) -> Option<Rational> {
        self.as_constant()
    }
    fn describe(&self, names: &[String]) -> String {
        self.format_with(names)
    }
}

impl Scalar for Jet {
    fn zero() -> Self {
        Jet::zero()
    }
    fn one() -> Self {
        Jet::one()
    }
    fn from_rational(r: &Rational) -> Self {
        Jet::constant(r.clone())
    }
    fn is_zero(&self) -> bool {
        Jet::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn recip(&self) -> Option<Self> {
        Jet::recip(self)
    }
    fn partial(&self, v: usize) -> Self {
        Jet::partial(self, v)
    }
    fn scale(&self, r: &Rational) -> Self {
        Jet::scale(self, r)
    }
    fn complexity(&self) -> usize {
        self.polynomial().len()
    }
    fn as_rational(&self) -> Option<Rational> {
        if self.polynomial().is_constant() {
            Some(self.value())
        } else {
            None
        }
    }
    fn vanishes(&self, _rel: &Relations) -> bool {
        self.value().is_zero()
    }
    fn describe(&self, _names: &[String]) -> String {
        self.value().to_string()
    }
}
