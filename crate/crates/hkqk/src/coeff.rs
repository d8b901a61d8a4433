//! Exact rational functions of the chart's scalar generators.

use std::fmt;

use crate::poly::{Monomial, Polynomial};
use crate::rational::Rational;
use crate::relations::Relations;

/// A quotient `numerator / Π factor^mult`.
///
/// Denominator factors are monic (leading coefficient 1 in the monomial
/// order), non-constant, pairwise distinct and sorted. The numerator is never
/// divisible by any stored factor, so a function is zero exactly when its
/// numerator is. Factors are not factored further; two equal functions can
/// therefore carry different but equivalent factorizations, which is why
/// equality is decided by subtraction rather than by comparing fields.
#[derive(Clone)]
pub struct CoefficientFunction {
    num: Polynomial,
    den: Vec<(Polynomial, u32)>,
}

impl CoefficientFunction {
    pub fn zero() -> Self {
        CoefficientFunction { num: Polynomial::zero(), den: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        CoefficientFunction { num: Polynomial::constant(c), den: Vec::new() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Rational::from_int(n))
    }

    pub fn generator(v: usize) -> Self {
        Self::from_polynomial(Polynomial::var(v))
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        CoefficientFunction { num: p, den: Vec::new() }
    }

    /// `num / den`; `None` when `den` is the zero polynomial.
    pub fn ratio(num: Polynomial, den: &Polynomial) -> Option<Self> {
        let d = Self::from_polynomial(den.clone()).recip()?;
        Some(Self::from_polynomial(num).mul(&d))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Polynomial, u32)] {
        &self.den
    }

    /// The expanded denominator polynomial.
    pub fn denominator(&self) -> Polynomial {
        self.den.iter().fold(Polynomial::one(), |acc, (f, m)| acc.mul(&f.pow(*m)))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    /// Value if the function is a constant (without using relations).
    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Number of terms, a cheap complexity measure.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.iter().map(|(f, _)| f.len()).sum::<usize>()
    }

    fn cancel(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        for (f, m) in self.den.iter_mut() {
            while *m > 0 {
                match self.num.exact_div(f) {
                    Some(q) => {
                        self.num = q;
                        *m -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, m)| *m > 0);
        self
    }

    fn merge_den(a: &[(Polynomial, u32)], b: &[(Polynomial, u32)], combine: impl Fn(u32, u32) -> u32) -> Vec<(Polynomial, u32)> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push((a[i].0.clone(), combine(a[i].1, 0)));
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0.clone(), combine(0, b[j].1)));
                j += 1;
            } else {
                out.push((a[i].0.clone(), combine(a[i].1, b[j].1)));
                i += 1;
                j += 1;
            }
        }
        out.retain(|(_, m)| *m > 0);
        out
    }

    /// Multiplier turning denominator `d` into `target` (which must contain it).
    fn den_cofactor(d: &[(Polynomial, u32)], target: &[(Polynomial, u32)]) -> Polynomial {
        let mut p = Polynomial::one();
        for (f, m) in target {
            let have = d.iter().find(|(g, _)| g == f).map(|(_, k)| *k).unwrap_or(0);
            if *m > have {
                p = p.mul(&f.pow(*m - have));
            }
        }
        p
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let r = CoefficientFunction { num: self.num.add(&o.num), den: self.den.clone() };
            return if r.den.is_empty() { r } else { r.cancel() };
        }
        let lcm = Self::merge_den(&self.den, &o.den, u32::max);
        let a = self.num.mul(&Self::den_cofactor(&self.den, &lcm));
        let b = o.num.mul(&Self::den_cofactor(&o.den, &lcm));
        CoefficientFunction { num: a.add(&b), den: lcm }.cancel()
    }

    pub fn neg(&self) -> Self {
        CoefficientFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Sums many terms, grouping equal denominators first.
    pub fn sum<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self {
        let mut groups: Vec<(Vec<(Polynomial, u32)>, Polynomial)> = Vec::new();
        for it in items {
            if it.is_zero() {
                continue;
            }
            match groups.iter_mut().find(|(d, _)| *d == it.den) {
                Some((_, n)) => *n = n.add(&it.num),
                None => groups.push((it.den.clone(), it.num.clone())),
            }
        }
        groups.retain(|(_, n)| !n.is_zero());
        match groups.len() {
            0 => Self::zero(),
            1 => {
                let (den, num) = groups.pop().unwrap();
                CoefficientFunction { num, den }.cancel()
            }
            _ => {
                let lcm = groups.iter().fold(Vec::new(), |acc, (d, _)| Self::merge_den(&acc, d, u32::max));
                let mut num = Polynomial::zero();
                for (d, n) in &groups {
                    num = num.add(&n.mul(&Self::den_cofactor(d, &lcm)));
                }
                CoefficientFunction { num, den: lcm }.cancel()
            }
        }
    }

    fn divide_out(num: &mut Polynomial, den: &mut [(Polynomial, u32)]) {
        for (f, m) in den.iter_mut() {
            while *m > 0 {
                match num.exact_div(f) {
                    Some(q) => {
                        *num = q;
                        *m -= 1;
                    }
                    None => break,
                }
            }
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_empty() && o.den.is_empty() {
            return CoefficientFunction { num: self.num.mul(&o.num), den: Vec::new() };
        }
        if let Some(c) = self.num.as_constant() {
            if self.den.is_empty() {
                return CoefficientFunction { num: o.num.scale(&c), den: o.den.clone() };
            }
        }
        if let Some(c) = o.num.as_constant() {
            if o.den.is_empty() {
                return CoefficientFunction { num: self.num.scale(&c), den: self.den.clone() };
            }
        }
        let (mut n1, mut d2) = (self.num.clone(), o.den.clone());
        let (mut n2, mut d1) = (o.num.clone(), self.den.clone());
        Self::divide_out(&mut n1, &mut d2);
        Self::divide_out(&mut n2, &mut d1);
        let den = Self::merge_den(&d1, &d2, |a, b| a + b);
        CoefficientFunction { num: n1.mul(&n2), den }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        CoefficientFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Splits a nonzero polynomial into `(constant, monic factors)`.
    fn factor_basis(p: &Polynomial) -> (Rational, Vec<(Polynomial, u32)>) {
        let (lc, monic) = p.monic();
        let content = monic.monomial_content();
        let mut factors: Vec<(Polynomial, u32)> = content.factors().map(|(v, e)| (Polynomial::var(v), e)).collect();
        let rest = if content.is_one() {
            monic
        } else {
            monic.exact_div(&Polynomial::monomial(content, Rational::one())).expect("monomial content divides")
        };
        if !rest.is_constant() {
            factors.push((rest, 1));
        }
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Polynomial, u32)> = Vec::new();
        for (f, m) in factors {
            match merged.last_mut() {
                Some((g, k)) if *g == f => *k += m,
                _ => merged.push((f, m)),
            }
        }
        (lc, merged)
    }

    /// Multiplicative inverse, `None` for the zero function.
    pub fn recip(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        let (lc, factors) = Self::factor_basis(&self.num);
        let num = self.denominator().scale(&lc.recip().unwrap());
        Some(CoefficientFunction { num, den: factors })
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.recip()?))
    }

    pub fn pow(&self, e: i32) -> Option<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }

    /// Exact equality as functions (ignores relations).
    pub fn equals(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    pub fn partial(&self, v: usize) -> Self {
        let dn = self.num.partial(v);
        let moving: Vec<usize> = (0..self.den.len()).filter(|k| !self.den[*k].0.partial(v).is_zero()).collect();
        if moving.is_empty() {
            return CoefficientFunction { num: dn, den: self.den.clone() }.cancel();
        }
        let prod_all: Polynomial = moving.iter().fold(Polynomial::one(), |acc, k| acc.mul(&self.den[*k].0));
        let mut num = dn.mul(&prod_all);
        for &k in &moving {
            let (f, m) = &self.den[k];
            let others = moving.iter().filter(|l| **l != k).fold(Polynomial::one(), |acc, l| acc.mul(&self.den[*l].0));
            let term = self.num.mul(&f.partial(v)).mul(&others).scale(&Rational::from_int(*m as i64));
            num = num.sub(&term);
        }
        let mut den = self.den.clone();
        for &k in &moving {
            den[k].1 += 1;
        }
        CoefficientFunction { num, den }.cancel()
    }

    /// Exact value at a point; `None` when a denominator vanishes there.
    pub fn eval(&self, pt: &[Rational]) -> Option<Rational> {
        let mut d = Rational::one();
        for (f, m) in &self.den {
            let v = f.eval(pt);
            if v.is_zero() {
                return None;
            }
            d = &d * &v.pow(*m as i32);
        }
        Some(&self.num.eval(pt) / &d)
    }

    /// Reduces numerator and denominator factors modulo the relations.
    pub fn reduce(&self, rel: &Relations) -> Self {
        if rel.is_empty() {
            return self.clone();
        }
        let num = rel.reduce(&self.num);
        if num.is_zero() {
            return Self::zero();
        }
        let mut out = CoefficientFunction { num, den: Vec::new() };
        for (f, m) in &self.den {
            let rf = rel.reduce(f);
            if rf == *f {
                out = out.mul(&CoefficientFunction { num: Polynomial::one(), den: vec![(f.clone(), *m)] });
                continue;
            }
            // a factor that reduces to zero would make the function undefined on the variety;
            // keep it unreduced so evaluation reports the pole
            let g = if rf.is_zero() { f.clone() } else { rf };
            let inv = CoefficientFunction::from_polynomial(g).recip().expect("nonzero").pow(*m as i32).unwrap();
            out = out.mul(&inv);
        }
        out.cancel()
    }

    /// Constant value modulo the relations, if any.
    pub fn constant_value(&self, rel: &Relations) -> Option<Rational> {
        if let Some(c) = self.as_constant() {
            return Some(c);
        }
        let n = rel.reduce(&self.num);
        if n.is_zero() {
            return Some(Rational::zero());
        }
        let d = rel.reduce(&self.denominator());
        let (nm, nc) = n.leading()?.clone();
        let (dm, dc) = d.leading()?.clone();
        if nm != dm {
            return None;
        }
        let k = &nc / &dc;
        if n.sub(&d.scale(&k)).is_zero() {
            Some(k)
        } else {
            None
        }
    }

    /// Renames variables.
    pub fn map_vars(&self, f: impl Fn(usize) -> usize + Copy) -> Self {
        let num = self.num.map_vars(f);
        let den: Vec<_> = self.den.iter().map(|(p, m)| (p.map_vars(f), *m)).collect();
        let d = den.into_iter().fold(CoefficientFunction::one(), |acc, (p, m)| {
            acc.mul(&CoefficientFunction::from_polynomial(p).recip().unwrap().pow(m as i32).unwrap())
        });
        CoefficientFunction::from_polynomial(num).mul(&d)
    }

    /// Substitutes polynomials for variables in numerator and denominator.
    pub fn substitute(&self, images: &[Polynomial]) -> Option<Self> {
        let num = CoefficientFunction::from_polynomial(self.num.compose(images, None));
        let mut out = num;
        for (f, m) in &self.den {
            let g = f.compose(images, None);
            out = out.mul(&CoefficientFunction::from_polynomial(g).recip()?.pow(*m as i32)?);
        }
        Some(out)
    }

    pub fn format_with(&self, names: &[String]) -> String {
        let n = self.num.format_with(names);
        if self.den.is_empty() {
            return n;
        }
        let num = if self.num.len() > 1 { format!("({n})") } else { n };
        let parts: Vec<String> = self
            .den
            .iter()
            .map(|(f, m)| {
                let s = f.format_with(names);
                let s = if f.len() > 1 || (*m > 1 && !f.terms()[0].1.is_one()) { format!("({s})") } else { s };
                if *m > 1 {
                    format!("{s}^{m}")
                } else {
                    s
                }
            })
            .collect();
        if parts.len() == 1 {
            format!("{num}/{}", parts[0])
        } else {
            format!("{num}/({})", parts.join("*"))
        }
    }

    /// Leading monomial of the numerator, used for stable ordering in reports.
    pub fn leading_monomial(&self) -> Option<Monomial> {
        self.num.leading().map(|(m, _)| m.clone())
    }
}

impl PartialEq for CoefficientFunction {
    fn eq(&self, o: &Self) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        self.equals(o)
    }
}

impl fmt::Debug for CoefficientFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with(&[]))
    }
}

impl From<Rational> for CoefficientFunction {
    fn from(r: Rational) -> Self {
        Self::constant(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: usize) -> CoefficientFunction {
        CoefficientFunction::generator(v)
    }

    #[test]
    fn cancellation_and_zero() {
        let x = g(0);
        let y = g(1);
        let f = x.mul(&x).sub(&y.mul(&y)).div(&x.sub(&y)).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f, x.add(&y));
        assert!(f.sub(&x).sub(&y).is_zero());
    }

    #[test]
    fn sums_with_distinct_denominators() {
        let x = g(0);
        let one = CoefficientFunction::one();
        let a = one.div(&x).unwrap();
        let b = one.div(&x.add(&one)).unwrap();
        let s = a.sub(&b);
        let expected = one.div(&x.mul(&x.add(&one))).unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn partial_of_quotient() {
        let x = g(0);
        let one = CoefficientFunction::one();
        let f = one.div(&x.mul(&x).add(&one)).unwrap();
        let df = f.partial(0);
        let expected = x.scale(&Rational::from_int(-2)).mul(&f).mul(&f);
        assert_eq!(df, expected);
    }

    #[test]
    fn eval_detects_poles() {
        let x = g(0);
        let f = CoefficientFunction::one().div(&x.sub(&CoefficientFunction::from_int(2))).unwrap();
        assert!(f.eval(&[Rational::from_int(2)]).is_none());
        assert_eq!(f.eval(&[Rational::from_int(3)]), Some(Rational::one()));
    }
}
