//! Polynomial side relations among scalar generators.
//!
//! The only relation shape used by the models is the unit circle
//! `c^2 + s^2 - 1` for a pair of generators standing for the cosine and sine
//! of an angle. Several circles on disjoint generators have coprime leading
//! monomials, so plain division by each relation yields a normal form.

use serde::{Deserialize, Serialize};

use crate::poly::{Monomial, Polynomial};
use crate::rational::Rational;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relations {
    circles: Vec<(usize, usize)>,
}

impl Relations {
    pub fn none() -> Self {
        Relations::default()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    /// Adds `cos^2 + sin^2 = 1` for generators `cos` and `sin`.
    pub fn add_circle(&mut self, cos: usize, sin: usize) {
        assert!(cos != sin);
        self.circles.push((cos, sin));
    }

    pub fn circles(&self) -> &[(usize, usize)] {
        &self.circles
    }

    pub fn polynomial(&self, k: usize) -> Polynomial {
        let (c, s) = self.circles[k];
        Polynomial::from_terms([
            (Monomial::var_pow(c, 2), Rational::one()),
            (Monomial::var_pow(s, 2), Rational::one()),
            (Monomial::one(), -Rational::one()),
        ])
    }

    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        if self.circles.is_empty() {
            return p.clone();
        }
        let mut cur = p.clone();
        loop {
            let mut changed = false;
            for k in 0..self.circles.len() {
                let rel = self.polynomial(k);
                let lm = rel.leading().unwrap().0.clone();
                if cur.terms().iter().any(|(m, _)| lm.divides(m)) {
                    cur = cur.div_rem(&rel).1;
                    changed = true;
                }
            }
            if !changed {
                return cur;
            }
        }
    }

    /// Shifts generator indices by `offset` for generators at or above `from`.
    pub fn shifted(&self, from: usize, offset: usize) -> Relations {
        let f = |v: usize| if v >= from { v + offset } else { v };
        Relations { circles: self.circles.iter().map(|(c, s)| (f(*c), f(*s))).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_normal_form() {
        let mut r = Relations::none();
        r.add_circle(0, 1);
        let c = Polynomial::var(0);
        let s = Polynomial::var(1);
        let p = c.mul(&c).add(&s.mul(&s));
        assert_eq!(r.reduce(&p), Polynomial::one());
        let q = c.pow(4).sub(&s.pow(4));
        // c^4 - s^4 = (c^2 - s^2)(c^2 + s^2) = c^2 - s^2 = 1 - 2 s^2
        let expected = Polynomial::one().sub(&s.mul(&s).scale(&Rational::from_int(2)));
        assert_eq!(r.reduce(&q), expected);
    }
}
