//! Truncated Taylor jets at a rational point.
//!
//! A jet of order `k` stores the Taylor polynomial of a function in the
//! shifted variables `e_v = s_v - p_v`, discarding every term of degree above
//! `k`. Each partial derivative lowers the order by one, so an identity that
//! involves `r` derivatives is decided exactly at the point by lifting the
//! inputs to order `r` and reading off the constant term of the result.

use std::fmt;

use crate::coeff::CoefficientFunction;
use crate::poly::{Monomial, Polynomial};
use crate::rational::Rational;

/// Order used for constants, which are exact to all orders.
pub const EXACT: u32 = u32::MAX;

#[derive(Clone, PartialEq)]
pub struct Jet {
    poly: Polynomial,
    order: u32,
}

impl Jet {
    pub fn constant(c: Rational) -> Self {
        Jet { poly: Polynomial::constant(c), order: EXACT }
    }

    pub fn zero() -> Self {
        Jet { poly: Polynomial::zero(), order: EXACT }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn value(&self) -> Rational {
        self.poly.constant_term()
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn with_order(poly: Polynomial, order: u32) -> Self {
        let poly = if order == EXACT || poly.total_degree() <= order { poly } else { poly.truncate(order) };
        Jet { poly, order }
    }

    /// Taylor jet of `f` at `pt` truncated at `order`; `None` on a pole.
    pub fn lift(f: &CoefficientFunction, pt: &[Rational], order: u32) -> Option<Self> {
        let images: Vec<Polynomial> = pt
            .iter()
            .enumerate()
            .map(|(v, p)| Polynomial::var(v).add(&Polynomial::constant(p.clone())))
            .collect();
        let num = Jet::with_order(f.numerator().compose(&images, Some(order)), order);
        if f.is_polynomial() {
            return Some(num);
        }
        let mut acc = num;
        for (g, m) in f.denominator_factors() {
            let gj = Jet::with_order(g.compose(&images, Some(order)), order);
            let inv = gj.recip()?;
            for _ in 0..*m {
                acc = acc.mul(&inv);
            }
        }
        Some(acc)
    }

    pub fn add(&self, o: &Self) -> Self {
        Jet::with_order(self.poly.add(&o.poly), self.order.min(o.order))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Jet::with_order(self.poly.sub(&o.poly), self.order.min(o.order))
    }

    pub fn neg(&self) -> Self {
        Jet { poly: self.poly.neg(), order: self.order }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Jet { poly: self.poly.scale(c), order: self.order }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let poly = if order == EXACT { self.poly.mul(&o.poly) } else { self.poly.mul_truncated(&o.poly, order) };
        Jet { poly, order }
    }

    /// Series inverse; `None` when the value at the point is zero or when
    /// an exact non-constant jet would need an infinite series.
    pub fn recip(&self) -> Option<Self> {
        let c0 = self.value();
        let inv0 = c0.recip()?;
        let rest = self.poly.sub(&Polynomial::constant(c0));
        if rest.is_zero() {
            return Some(Jet { poly: Polynomial::constant(inv0), order: self.order });
        }
        if self.order == EXACT {
            return None;
        }
        // 1/(c0 + r) = sum_n (-r/c0)^n / c0
        let q = rest.scale(&(-&inv0));
        let mut term = Polynomial::constant(inv0.clone());
        let mut acc = term.clone();
        for _ in 0..self.order {
            term = term.mul_truncated(&q, self.order);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Some(Jet { poly: acc, order: self.order })
    }

    pub fn partial(&self, v: usize) -> Self {
        if self.order == EXACT {
            return Jet { poly: self.poly.partial(v), order: EXACT };
        }
        if self.order == 0 {
            // nothing is known about first derivatives of an order-0 jet
            panic!("differentiating an order-0 jet");
        }
        Jet { poly: self.poly.partial(v), order: self.order - 1 }
    }

    pub fn monomial_coefficient(&self, m: &Monomial) -> Rational {
        self.poly.terms().iter().find(|(k, _)| k == m).map(|(_, c)| c.clone()).unwrap_or_default()
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == EXACT {
            write!(f, "{:?}", self.poly)
        } else {
            write!(f, "{:?} + O({})", self.poly, self.order + 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jets_reproduce_value_and_gradient() {
        let x = CoefficientFunction::generator(0);
        let y = CoefficientFunction::generator(1);
        // f = x / (1 + y^2)
        let f = x.div(&CoefficientFunction::one().add(&y.mul(&y))).unwrap();
        let pt = [Rational::new(3, 2), Rational::new(-1, 2)];
        let j = Jet::lift(&f, &pt, 2).unwrap();
        assert_eq!(j.value(), f.eval(&pt).unwrap());
        for v in 0..2 {
            assert_eq!(j.partial(v).value(), f.partial(v).eval(&pt).unwrap());
            for w in 0..2 {
                assert_eq!(j.partial(v).partial(w).value(), f.partial(v).partial(w).eval(&pt).unwrap());
            }
        }
    }

    #[test]
    fn pole_is_rejected() {
        let x = CoefficientFunction::generator(0);
        let f = CoefficientFunction::one().div(&x).unwrap();
        assert!(Jet::lift(&f, &[Rational::zero()], 1).is_none());
    }
}
