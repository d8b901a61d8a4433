//! Sparse multivariate polynomials over `Rational`.
//!
//! Monomials are ordered degree-lexicographically with variable 0 the
//! largest, which is the order used for leading terms and division.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use smallvec::SmallVec;

use crate::rational::Rational;

/// Exponent vector stored sparsely as sorted `(variable, exponent)` pairs.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(u16, u16); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: usize) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: usize, e: u32) -> Self {
        if e == 0 {
            return Self::one();
        }
        let mut s = SmallVec::new();
        s.push((v as u16, e as u16));
        Monomial(s)
    }

    /// Builds a monomial from a dense exponent vector.
    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(
            exps.iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(v, e)| (v as u16, *e as u16))
                .collect(),
        )
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e as u32).sum()
    }

    pub fn exponent(&self, v: usize) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| *w as usize == v)
            .map(|(_, e)| *e as u32)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|(v, e)| (*v as usize, *e as u32))
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|(v, _)| *v as usize)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().all(|(v, e)| o.exponent(*v as usize) >= *e as u32)
    }

    /// `self / o`, assuming `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for (v, e) in self.0.iter() {
            let f = o.exponent(*v as usize) as u16;
            if *e > f {
                out.push((*v, *e - f));
            }
        }
        Monomial(out)
    }

    pub fn gcd(&self, o: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|(v, e)| {
                    let f = o.exponent(*v as usize) as u16;
                    let m = (*e).min(f);
                    (m > 0).then_some((*v, m))
                })
                .collect(),
        )
    }

    /// Drops variable `v`, returning its exponent and the remaining monomial.
    pub fn split_var(&self, v: usize) -> (u32, Monomial) {
        let e = self.exponent(v);
        (e, Monomial(self.0.iter().copied().filter(|(w, _)| *w as usize != v).collect()))
    }

    /// Splits into the part over `vars` and the rest.
    pub fn split(&self, vars: &[usize]) -> (Monomial, Monomial) {
        let (a, b): (SmallVec<[(u16, u16); 4]>, SmallVec<[(u16, u16); 4]>) =
            self.0.iter().copied().partition(|(v, _)| vars.contains(&(*v as usize)));
        (Monomial(a), Monomial(b))
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        match self.degree().cmp(&o.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (x, y) in self.0.iter().zip(o.0.iter()) {
            if x.0 != y.0 {
                // the monomial containing the smaller variable index is larger
                return if x.0 < y.0 { Ordering::Greater } else { Ordering::Less };
            }
            if x.1 != y.1 {
                return x.1.cmp(&y.1);
            }
        }
        self.0.len().cmp(&o.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { format!("s{v}") } else { format!("s{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Polynomial with terms sorted by decreasing monomial and no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: Vec<(Monomial, Rational)>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Polynomial { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn var(v: usize) -> Self {
        Polynomial { terms: vec![(Monomial::var(v), Rational::one())] }
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Polynomial { terms: vec![(m, c)] }
        }
    }

    /// Collects arbitrary terms, merging duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in it {
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(x) => *x = &*x + &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Self::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Polynomial { terms }
    }

    fn from_sorted(terms: Vec<(Monomial, Rational)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    /// Value of a constant polynomial.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            Some(Rational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Rational {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exponent(v)).max().unwrap_or(0)
    }

    /// Sorted list of variables that occur.
    pub fn variables(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self.terms.iter().flat_map(|(m, _)| m.factors().map(|(v, _)| v)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, a)| (m.mul(mono), a * c)).collect() }
    }

    fn merge(&self, o: &Polynomial, sign: bool) -> Polynomial {
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if sign { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if sign { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if sign { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        Polynomial::from_sorted(out)
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        self.merge(o, false)
    }

    pub fn sub(&self, o: &Polynomial) -> Polynomial {
        self.merge(o, true)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.terms.len() == 1 {
            return o.mul_monomial(&self.terms[0].0, &self.terms[0].1);
        }
        if o.terms.len() == 1 {
            return self.mul_monomial(&o.terms[0].0, &o.terms[0].1);
        }
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.len() * o.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.mul(m2);
                let c = c1 * c2;
                match acc.get_mut(&m) {
                    Some(x) => *x = &*x + &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Self::from_map(acc)
    }

    /// Product keeping only terms of degree at most `max_deg`.
    pub fn mul_truncated(&self, o: &Polynomial, max_deg: u32) -> Polynomial {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            if d1 > max_deg {
                continue;
            }
            for (m2, c2) in o.terms.iter().rev() {
                if d1 + m2.degree() > max_deg {
                    break;
                }
                let m = m1.mul(m2);
                let c = c1 * c2;
                match acc.get_mut(&m) {
                    Some(x) => *x = &*x + &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Self::from_map(acc)
    }

    pub fn truncate(&self, max_deg: u32) -> Polynomial {
        Polynomial { terms: self.terms.iter().filter(|(m, _)| m.degree() <= max_deg).cloned().collect() }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Division with remainder by a single divisor.
    pub fn div_rem(&self, g: &Polynomial) -> (Polynomial, Polynomial) {
        let (lm, lc) = g.leading().expect("division by zero polynomial").clone();
        let mut work: BTreeMap<Monomial, Rational> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        let mut rem = Vec::new();
        while let Some((m, c)) = work.pop_last() {
            if lm.divides(&m) {
                let qm = m.div(&lm);
                let qc = &c / &lc;
                for (gm, gc) in &g.terms[1..] {
                    let key = gm.mul(&qm);
                    let delta = &qc * gc;
                    let entry = work.entry(key);
                    match entry {
                        std::collections::btree_map::Entry::Occupied(mut o) => {
                            let v = o.get() - &delta;
                            if v.is_zero() {
                                o.remove();
                            } else {
                                *o.get_mut() = v;
                            }
                        }
                        std::collections::btree_map::Entry::Vacant(v) => {
                            v.insert(-delta);
                        }
                    }
                }
                quot.push((qm, qc));
            } else {
                rem.push((m, c));
            }
        }
        (Polynomial::from_sorted(quot), Polynomial::from_sorted(rem))
    }

    /// Exact quotient, or `None` when `g` does not divide `self`.
    pub fn exact_div(&self, g: &Polynomial) -> Option<Polynomial> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if g.terms.len() == 1 {
            let (gm, gc) = &g.terms[0];
            if !self.terms.iter().all(|(m, _)| gm.divides(m)) {
                return None;
            }
            let inv = gc.recip()?;
            return Some(Polynomial { terms: self.terms.iter().map(|(m, c)| (m.div(gm), c * &inv)).collect() });
        }
        let (lm, lc) = g.leading()?.clone();
        if self.total_degree() < g.total_degree() {
            return None;
        }
        let mut work: BTreeMap<Monomial, Rational> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((m, c)) = work.pop_last() {
            if !lm.divides(&m) {
                return None;
            }
            let qm = m.div(&lm);
            let qc = &c / &lc;
            for (gm, gc) in &g.terms[1..] {
                let key = gm.mul(&qm);
                let delta = &qc * gc;
                match work.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let v = o.get() - &delta;
                        if v.is_zero() {
                            o.remove();
                        } else {
                            *o.get_mut() = v;
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(-delta);
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(Polynomial::from_sorted(quot))
    }

    pub fn partial(&self, v: usize) -> Polynomial {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            if e == 0 {
                continue;
            }
            let nm = rest.mul(&Monomial::var_pow(v, e - 1));
            terms.push((nm, c * &Rational::from_int(e as i64)));
        }
        Polynomial::from_terms(terms)
    }

    /// Evaluates at a point given one value per variable.
    pub fn eval(&self, pt: &[Rational]) -> Rational {
        let mut cache: HashMap<(usize, u32), Rational> = HashMap::new();
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.factors() {
                let p = cache.entry((v, e)).or_insert_with(|| pt[v].pow(e as i32));
                t = &t * p;
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Substitutes `images[v]` for each variable `v < images.len()`,
    /// optionally truncating all intermediate products at `max_deg`.
    pub fn compose(&self, images: &[Polynomial], max_deg: Option<u32>) -> Polynomial {
        let mut cache: HashMap<(usize, u32), Polynomial> = HashMap::new();
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(c.clone());
            for (v, e) in m.factors() {
                let factor = if v < images.len() {
                    cache
                        .entry((v, e))
                        .or_insert_with(|| {
                            let mut p = Polynomial::one();
                            for _ in 0..e {
                                p = match max_deg {
                                    Some(k) => p.mul_truncated(&images[v], k),
                                    None => p.mul(&images[v]),
                                };
                            }
                            p
                        })
                        .clone()
                } else {
                    Polynomial::monomial(Monomial::var_pow(v, e), Rational::one())
                };
                t = match max_deg {
                    Some(k) => t.mul_truncated(&factor, k),
                    None => t.mul(&factor),
                };
                if t.is_zero() {
                    break;
                }
            }
            for (tm, tc) in t.terms {
                match acc.get_mut(&tm) {
                    Some(x) => *x = &*x + &tc,
                    None => {
                        acc.insert(tm, tc);
                    }
                }
            }
        }
        Self::from_map(acc)
    }

    /// Returns `(lc, self / lc)` where `lc` is the leading coefficient.
    pub fn monic(&self) -> (Rational, Polynomial) {
        match self.leading() {
            None => (Rational::one(), Self::zero()),
            Some((_, lc)) => {
                let lc = lc.clone();
                let inv = lc.recip().unwrap();
                (lc, self.scale(&inv))
            }
        }
    }

    /// Greatest common monomial divisor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else { return Monomial::one() };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Groups terms by their monomial in `vars`; each group is a polynomial in the other variables.
    pub fn coefficients_in(&self, vars: &[usize]) -> BTreeMap<Monomial, Polynomial> {
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (a, b) = m.split(vars);
            groups.entry(a).or_default().push((b, c.clone()));
        }
        groups.into_iter().map(|(k, v)| (k, Polynomial::from_terms(v))).collect()
    }

    /// Univariate coefficient list (index = exponent) if only `v` occurs.
    pub fn univariate_coeffs(&self, v: usize) -> Option<Vec<Rational>> {
        let mut out = vec![Rational::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            if !rest.is_one() {
                return None;
            }
            out[e as usize] = c.clone();
        }
        Some(out)
    }

    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| {
            let mono = m.factors().fold(Monomial::one(), |acc, (v, e)| acc.mul(&Monomial::var_pow(f(v), e)));
            (mono, c.clone())
        }))
    }

    /// Formats with the given variable names.
    pub fn format_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = m
                .factors()
                .map(|(v, e)| {
                    let name = names.get(v).cloned().unwrap_or_else(|| format!("s{v}"));
                    if e == 1 {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&mono.join("*"));
            } else {
                s.push_str(&format!("{}*{}", a, mono.join("*")));
            }
        }
        s
    }
}

impl Ord for Polynomial {
    fn cmp(&self, o: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(o.terms.iter()) {
            match a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.terms.len().cmp(&o.terms.len())
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with(&[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var(0)
    }
    fn y() -> Polynomial {
        Polynomial::var(1)
    }

    #[test]
    fn deglex_order() {
        let x2 = Monomial::var_pow(0, 2);
        let y2 = Monomial::var_pow(1, 2);
        let xy = Monomial::var(0).mul(&Monomial::var(1));
        assert!(x2 > xy && xy > y2);
        assert!(y2 > Monomial::var(0));
    }

    #[test]
    fn division_is_exact() {
        let f = x().add(&y());
        let g = x().sub(&y());
        let p = f.mul(&g);
        assert_eq!(p.exact_div(&f).unwrap(), g);
        assert!(p.add(&Polynomial::one()).exact_div(&f).is_none());
        let (q, r) = p.add(&Polynomial::one()).div_rem(&f);
        assert_eq!(q, g);
        assert_eq!(r, Polynomial::one());
    }

    #[test]
    fn compose_and_eval_agree() {
        let p = x().mul(&x()).add(&y().scale(&Rational::new(1, 2)));
        let shifted = p.compose(&[x().add(&Polynomial::one()), y()], None);
        let pt = [Rational::new(2, 3), Rational::from_int(5)];
        let moved = [&pt[0] + &Rational::one(), pt[1].clone()];
        assert_eq!(shifted.eval(&pt), p.eval(&moved));
    }

    #[test]
    fn partial_derivative() {
        let p = x().pow(3).mul(&y());
        assert_eq!(p.partial(0), x().pow(2).mul(&y()).scale(&Rational::from_int(3)));
        assert!(p.partial(2).is_zero());
    }
}
