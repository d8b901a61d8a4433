//! Differential forms and related tensors in a coframe.
//!
//! A strictly increasing multi-index `i1 < ... < ip` is stored as the bitmask
//! with bits `i1..ip` set, so dimensions up to 64 are supported. The sign of
//! a product of basis forms is the parity of the number of transpositions
//! needed to sort the concatenated indices.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::CoefficientFunction;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::relations::Relations;
use crate::scalar::Scalar;

pub const MAX_DIM: usize = 64;

/// Indices of the set bits in increasing order.
pub fn mask_indices(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out.push(i);
        m &= m - 1;
    }
    out
}

pub fn indices_mask(idx: &[usize]) -> u64 {
    idx.iter().fold(0u64, |m, i| m | (1u64 << i))
}

/// Sign of `theta^A ^ theta^B` relative to `theta^(A u B)`, or 0 if they overlap.
pub fn wedge_sign(a: u64, b: u64) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0u32;
    let mut m = b;
    while m != 0 {
        let j = m.trailing_zeros();
        m &= m - 1;
        inversions += if j >= 63 { 0 } else { (a >> (j + 1)).count_ones() };
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sorts an index list, returning its bitmask and permutation sign
/// (sign 0 when an index repeats).
pub fn sort_indices(idx: &[usize]) -> (u64, i32) {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len().saturating_sub(1 + i) {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return (0, 0);
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return (0, 0);
    }
    (indices_mask(&v), sign)
}

/// Collects per-mask contributions and sums them once.
pub(crate) struct Accumulator<C: Scalar> {
    parts: BTreeMap<u64, Vec<C>>,
}

impl<C: Scalar> Accumulator<C> {
    pub fn new() -> Self {
        Accumulator { parts: BTreeMap::new() }
    }

    pub fn push(&mut self, mask: u64, c: C) {
        if !c.is_zero() {
            self.parts.entry(mask).or_default().push(c);
        }
    }

    pub fn finish(self, dim: usize, degree: usize, rel: Option<&Relations>) -> DifferentialForm<C> {
        let mut terms = BTreeMap::new();
        for (m, v) in self.parts {
            let mut c = if v.len() == 1 { v.into_iter().next().unwrap() } else { C::sum_all(&v) };
            if let Some(r) = rel {
                c = c.reduce(r);
            }
            if !c.is_zero() {
                terms.insert(m, c);
            }
        }
        DifferentialForm { dim, degree, terms }
    }
}

#[derive(Clone, PartialEq)]
pub struct DifferentialForm<C = CoefficientFunction> {
    dim: usize,
    degree: usize,
    terms: BTreeMap<u64, C>,
}

impl<C: Scalar> DifferentialForm<C> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension above {MAX_DIM}");
        DifferentialForm { dim, degree, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, c: C) -> Self {
        let mut f = Self::zero(dim, 0);
        if !c.is_zero() {
            f.terms.insert(0, c);
        }
        f
    }

    /// The coframe element `theta^i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        Self::monomial(dim, &[i], C::one())
    }

    /// `c * theta^{idx[0]} ^ ... ^ theta^{idx[p-1]}` for indices in any order.
    pub fn monomial(dim: usize, idx: &[usize], c: C) -> Self {
        let mut f = Self::zero(dim, idx.len());
        assert!(idx.iter().all(|i| *i < dim), "index out of range");
        let (mask, sign) = sort_indices(idx);
        if sign != 0 && !c.is_zero() {
            let c = if sign < 0 { c.negate() } else { c };
            f.terms.insert(mask, c);
        }
        f
    }

    pub fn from_components<I: IntoIterator<Item = (Vec<usize>, C)>>(dim: usize, degree: usize, comps: I) -> Self {
        let mut acc = Accumulator::new();
        for (idx, c) in comps {
            assert_eq!(idx.len(), degree, "component of wrong degree");
            assert!(idx.iter().all(|i| *i < dim), "index out of range");
            let (mask, sign) = sort_indices(&idx);
            if sign == 0 {
                continue;
            }
            acc.push(mask, if sign < 0 { c.negate() } else { c });
        }
        acc.finish(dim, degree, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<u64, C> {
        &self.terms
    }

    /// Components as `(indices, coefficient)` in lexicographic index order.
    pub fn components(&self) -> Vec<(Vec<usize>, &C)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (mask_indices(*m), c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Coefficient of `theta^idx` for increasing `idx`.
    pub fn get(&self, idx: &[usize]) -> Option<&C> {
        self.terms.get(&indices_mask(idx))
    }

    pub fn coefficient(&self, idx: &[usize]) -> C {
        let (mask, sign) = sort_indices(idx);
        match (sign, self.terms.get(&mask)) {
            (0, _) | (_, None) => C::zero(),
            (1, Some(c)) => c.clone(),
            (_, Some(c)) => c.negate(),
        }
    }

    /// Value of a 0-form.
    pub fn as_scalar(&self) -> C {
        self.terms.get(&0).cloned().unwrap_or_else(C::zero)
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::ChartMismatch { left: self.dim, right: o.dim });
        }
        Ok(())
    }

    fn merged(&self, o: &Self, sub: bool) -> Self {
        assert_eq!(self.dim, o.dim, "forms on different charts");
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if sub { o.neg() } else { o.clone() };
        }
        assert_eq!(self.degree, o.degree, "adding forms of different degree");
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            match terms.remove(m) {
                Some(a) => {
                    let s = if sub { a.minus(c) } else { a.plus(c) };
                    if !s.is_zero() {
                        terms.insert(*m, s);
                    }
                }
                None => {
                    terms.insert(*m, if sub { c.negate() } else { c.clone() });
                }
            }
        }
        DifferentialForm { dim: self.dim, degree: self.degree, terms }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.merged(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.merged(o, true)
    }

    pub fn neg(&self) -> Self {
        DifferentialForm { dim: self.dim, degree: self.degree, terms: self.terms.iter().map(|(m, c)| (*m, c.negate())).collect() }
    }

    pub fn scale(&self, f: &C) -> Self {
        if f.is_zero() {
            return Self::zero(self.dim, self.degree);
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let v = c.times(f);
                (!v.is_zero()).then_some((*m, v))
            })
            .collect();
        DifferentialForm { dim: self.dim, degree: self.degree, terms }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.dim, self.degree);
        }
        DifferentialForm { dim: self.dim, degree: self.degree, terms: self.terms.iter().map(|(m, c)| (*m, c.scale(r))).collect() }
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let degree = self.degree + o.degree;
        if self.is_zero() || o.is_zero() || degree > self.dim {
            return Ok(Self::zero(self.dim, degree));
        }
        let mut acc = Accumulator::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let s = wedge_sign(*ma, *mb);
                if s == 0 {
                    continue;
                }
                let p = ca.times(cb);
                acc.push(ma | mb, if s < 0 { p.negate() } else { p });
            }
        }
        Ok(acc.finish(self.dim, degree, None))
    }

    /// Interior product with a vector field.
    pub fn interior(&self, x: &VectorField<C>) -> Result<Self> {
        if x.dim() != self.dim {
            return Err(Error::ChartMismatch { left: self.dim, right: x.dim() });
        }
        if self.degree == 0 {
            return Ok(Self::zero(self.dim, 0));
        }
        let mut acc = Accumulator::new();
        for (m, c) in &self.terms {
            for (pos, i) in mask_indices(*m).into_iter().enumerate() {
                let xi = &x.components()[i];
                if xi.is_zero() {
                    continue;
                }
                let v = c.times(xi);
                acc.push(m & !(1u64 << i), if pos % 2 == 1 { v.negate() } else { v });
            }
        }
        Ok(acc.finish(self.dim, self.degree - 1, None))
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> DifferentialForm<D> {
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let v = f(c);
                (!v.is_zero()).then_some((*m, v))
            })
            .collect();
        DifferentialForm { dim: self.dim, degree: self.degree, terms }
    }

    pub fn try_map<D: Scalar, E>(&self, f: impl Fn(&[usize], &C) -> std::result::Result<D, E>) -> std::result::Result<DifferentialForm<D>, E> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = f(&mask_indices(*m), c)?;
            if !v.is_zero() {
                terms.insert(*m, v);
            }
        }
        Ok(DifferentialForm { dim: self.dim, degree: self.degree, terms })
    }

    pub fn reduce(&self, rel: &Relations) -> Self {
        if rel.is_empty() {
            return self.clone();
        }
        self.map(|c| c.reduce(rel))
    }

    /// Antisymmetric matrix `F_ij = F(e_i, e_j)` of a 2-form.
    pub fn to_matrix(&self) -> Result<Vec<Vec<C>>> {
        if self.degree != 2 && !self.is_zero() {
            return Err(Error::DegreeMismatch { expected: 2, found: self.degree });
        }
        let n = self.dim;
        let mut m = vec![vec![C::zero(); n]; n];
        for (mask, c) in &self.terms {
            let idx = mask_indices(*mask);
            m[idx[0]][idx[1]] = c.clone();
            m[idx[1]][idx[0]] = c.negate();
        }
        Ok(m)
    }

    /// 2-form from the upper triangle of an antisymmetric matrix.
    pub fn from_matrix(m: &[Vec<C>]) -> Self {
        let n = m.len();
        let mut terms = BTreeMap::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if !m[i][j].is_zero() {
                    terms.insert((1u64 << i) | (1u64 << j), m[i][j].clone());
                }
            }
        }
        DifferentialForm { dim: n, degree: 2, terms }
    }

    /// Re-embeds into a chart of dimension `dim` whose first coframe elements agree.
    pub fn extend_dim(&self, dim: usize) -> Self {
        assert!(dim >= self.dim);
        DifferentialForm { dim, degree: self.degree, terms: self.terms.clone() }
    }
}

impl DifferentialForm<CoefficientFunction> {
    pub fn evaluate(&self, pt: &Point) -> Result<DifferentialForm<Rational>> {
        self.try_map(|idx, c| c.eval(&pt.values).ok_or_else(|| Error::DenominatorVanishes { component: format!("{idx:?}"), point: pt.to_string() }))
    }

    pub fn format_with(&self, coframe: &[String], scalars: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .components()
            .into_iter()
            .map(|(idx, c)| {
                let basis: Vec<&str> = idx.iter().map(|i| coframe.get(*i).map(|s| s.as_str()).unwrap_or("?")).collect();
                format!("({})*{}", c.format_with(scalars), if basis.is_empty() { "1".to_string() } else { basis.join("^") })
            })
            .collect();
        parts.join(" + ")
    }
}

impl<C: Scalar> fmt::Debug for DifferentialForm<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form(deg {}) {{", self.degree)?;
        for (idx, c) in self.components() {
            write!(f, " {idx:?}: {c:?};")?;
        }
        write!(f, " }}")
    }
}

/// Vector field given by components in the frame dual to the coframe.
#[derive(Clone, PartialEq)]
pub struct VectorField<C = CoefficientFunction> {
    comps: Vec<C>,
}

impl<C: Scalar> VectorField<C> {
    pub fn new(comps: Vec<C>) -> Self {
        VectorField { comps }
    }

    pub fn zero(dim: usize) -> Self {
        VectorField { comps: vec![C::zero(); dim] }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.comps[i] = C::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[C] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        VectorField { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.plus(b)).collect() }
    }

    pub fn scale(&self, f: &C) -> Self {
        VectorField { comps: self.comps.iter().map(|a| a.times(f)).collect() }
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> VectorField<D> {
        VectorField { comps: self.comps.iter().map(f).collect() }
    }

    /// Pairing with a 1-form.
    pub fn pair(&self, alpha: &DifferentialForm<C>) -> C {
        let parts: Vec<C> = alpha.terms().iter().map(|(m, c)| c.times(&self.comps[m.trailing_zeros() as usize])).collect();
        C::sum_all(&parts)
    }

    pub fn extend_dim(&self, dim: usize) -> Self {
        let mut comps = self.comps.clone();
        comps.resize(dim, C::zero());
        VectorField { comps }
    }
}

impl VectorField<CoefficientFunction> {
    pub fn evaluate(&self, pt: &Point) -> Result<VectorField<Rational>> {
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(i, c)| c.eval(&pt.values).ok_or_else(|| Error::DenominatorVanishes { component: format!("[{i}]"), point: pt.to_string() }))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField { comps })
    }
}

impl<C: Scalar> fmt::Debug for VectorField<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vector{:?}", self.comps)
    }
}

pub type Matrix<C> = Vec<Vec<C>>;

fn eval_matrix(m: &Matrix<CoefficientFunction>, pt: &Point) -> Result<Matrix<Rational>> {
    m.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, c)| c.eval(&pt.values).ok_or_else(|| Error::DenominatorVanishes { component: format!("[{i}][{j}]"), point: pt.to_string() }))
                .collect()
        })
        .collect()
}

/// Symmetric 2-tensor with components `g_ij = g(e_i, e_j)`.
#[derive(Clone, PartialEq)]
pub struct MetricTensor<C = CoefficientFunction> {
    m: Matrix<C>,
}

impl<C: Scalar> MetricTensor<C> {
    /// Takes the symmetric part of the given matrix's upper triangle.
    pub fn from_matrix(m: Matrix<C>) -> Self {
        let n = m.len();
        let mut s = m;
        for i in 0..n {
            for j in 0..i {
                s[i][j] = s[j][i].clone();
            }
        }
        MetricTensor { m: s }
    }

    pub fn diagonal(d: Vec<C>) -> Self {
        let n = d.len();
        let mut m = vec![vec![C::zero(); n]; n];
        for (i, c) in d.into_iter().enumerate() {
            m[i][i] = c;
        }
        MetricTensor { m }
    }

    pub fn zero(dim: usize) -> Self {
        MetricTensor { m: vec![vec![C::zero(); dim]; dim] }
    }

    /// The symmetric square `alpha (x) alpha` of a 1-form.
    pub fn square(alpha: &DifferentialForm<C>) -> Self {
        let n = alpha.dim();
        let mut v = vec![C::zero(); n];
        for (m, c) in alpha.terms() {
            v[m.trailing_zeros() as usize] = c.clone();
        }
        let m = (0..n).map(|i| (0..n).map(|j| v[i].times(&v[j])).collect()).collect();
        MetricTensor { m }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn matrix(&self) -> &Matrix<C> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.m[i][j]
    }

    pub fn add(&self, o: &Self) -> Self {
        MetricTensor { m: crate::linalg::mat_add(&self.m, &o.m) }
    }

    pub fn scale(&self, f: &C) -> Self {
        MetricTensor { m: crate::linalg::mat_scale(&self.m, f) }
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> MetricTensor<D> {
        MetricTensor { m: self.m.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    pub fn apply(&self, x: &VectorField<C>, y: &VectorField<C>) -> C {
        let n = self.dim();
        let mut parts = Vec::new();
        for i in 0..n {
            if x.components()[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if self.m[i][j].is_zero() || y.components()[j].is_zero() {
                    continue;
                }
                parts.push(x.components()[i].times(&self.m[i][j]).times(&y.components()[j]));
            }
        }
        C::sum_all(&parts)
    }

    /// `g(X, .)` as a 1-form.
    pub fn lower(&self, x: &VectorField<C>) -> Result<DifferentialForm<C>> {
        if x.dim() != self.dim() {
            return Err(Error::ChartMismatch { left: self.dim(), right: x.dim() });
        }
        let n = self.dim();
        let comps = (0..n).map(|j| {
            let parts: Vec<C> = (0..n)
                .filter(|i| !x.components()[*i].is_zero() && !self.m[*i][j].is_zero())
                .map(|i| self.m[i][j].times(&x.components()[i]))
                .collect();
            (vec![j], C::sum_all(&parts))
        });
        Ok(DifferentialForm::from_components(n, 1, comps))
    }

    pub fn reduce(&self, rel: &Relations) -> Self {
        self.map(|c| c.reduce(rel))
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|r| r.iter().all(|c| c.is_zero()))
    }
}

impl MetricTensor<CoefficientFunction> {
    pub fn evaluate(&self, pt: &Point) -> Result<MetricTensor<Rational>> {
        Ok(MetricTensor { m: eval_matrix(&self.m, pt)? })
    }
}

impl<C: Scalar> fmt::Debug for MetricTensor<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Metric{:?}", self.m)
    }
}

/// Endomorphism with `m[i][j]` the `i`-th component of the image of `e_j`.
#[derive(Clone, PartialEq)]
pub struct EndomorphismField<C = CoefficientFunction> {
    m: Matrix<C>,
}

impl<C: Scalar> EndomorphismField<C> {
    pub fn from_matrix(m: Matrix<C>) -> Self {
        EndomorphismField { m }
    }

    pub fn identity(dim: usize) -> Self {
        EndomorphismField { m: crate::linalg::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn matrix(&self) -> &Matrix<C> {
        &self.m
    }

    /// Composition `self o o`.
    pub fn compose(&self, o: &Self) -> Self {
        EndomorphismField { m: crate::linalg::mat_mul(&self.m, &o.m) }
    }

    pub fn neg(&self) -> Self {
        EndomorphismField { m: self.m.iter().map(|r| r.iter().map(|c| c.negate()).collect()).collect() }
    }

    pub fn apply(&self, x: &VectorField<C>) -> VectorField<C> {
        VectorField::new(crate::linalg::mat_vec(&self.m, x.components()))
    }

    /// The 1-form `alpha(A .)`.
    pub fn pullback(&self, alpha: &DifferentialForm<C>) -> DifferentialForm<C> {
        let n = self.dim();
        let comps = (0..n).map(|j| {
            let parts: Vec<C> = alpha
                .terms()
                .iter()
                .map(|(mask, c)| c.times(&self.m[mask.trailing_zeros() as usize][j]))
                .collect();
            (vec![j], C::sum_all(&parts))
        });
        DifferentialForm::from_components(n, 1, comps)
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> EndomorphismField<D> {
        EndomorphismField { m: self.m.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }
}

impl EndomorphismField<CoefficientFunction> {
    pub fn evaluate(&self, pt: &Point) -> Result<EndomorphismField<Rational>> {
        Ok(EndomorphismField { m: eval_matrix(&self.m, pt)? })
    }
}

impl<C: Scalar> fmt::Debug for EndomorphismField<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Endo{:?}", self.m)
    }
}

/// The 2-form `g(A ., .)`, i.e. the matrix `A^T g`.
pub fn two_form_of<C: Scalar>(g: &MetricTensor<C>, a: &EndomorphismField<C>) -> DifferentialForm<C> {
    let m = crate::linalg::mat_mul(&crate::linalg::transpose(a.matrix()), g.matrix());
    DifferentialForm::from_matrix(&m)
}

/// A point given by one rational value per scalar generator.
#[derive(Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub values: Vec<Rational>,
}

impl Point {
    pub fn new(values: Vec<Rational>) -> Self {
        Point { values }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.values.iter().map(|v| v.to_string()).collect()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = DifferentialForm<Rational>;

    #[test]
    fn signs_by_transpositions() {
        assert_eq!(wedge_sign(0b01, 0b10), 1);
        assert_eq!(wedge_sign(0b10, 0b01), -1);
        assert_eq!(wedge_sign(0b11, 0b10), 0);
        assert_eq!(sort_indices(&[2, 0, 1]), (0b111, 1));
        assert_eq!(sort_indices(&[1, 0, 2]), (0b111, -1));
    }

    #[test]
    fn wedge_of_disjoint_two_forms() {
        let a = F::monomial(4, &[0, 1], Rational::one());
        let b = F::monomial(4, &[2, 3], Rational::one());
        let w = a.wedge(&b).unwrap();
        assert_eq!(w.get(&[0, 1, 2, 3]), Some(&Rational::one()));
        let one_form = F::basis(4, 1).add(&F::basis(4, 2));
        assert!(one_form.wedge(&one_form).unwrap().is_zero());
    }

    #[test]
    fn interior_of_basis() {
        let f = F::monomial(2, &[0, 1], Rational::one());
        let dx = VectorField::basis(2, 0);
        assert_eq!(f.interior(&dx).unwrap(), F::basis(2, 1));
        let dy = VectorField::basis(2, 1);
        assert_eq!(f.interior(&dy).unwrap(), F::basis(2, 0).neg());
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let a = F::basis(2, 0);
        let b = F::basis(3, 0);
        assert!(matches!(a.wedge(&b), Err(Error::ChartMismatch { .. })));
    }

    #[test]
    fn lower_identity() {
        let g = MetricTensor::diagonal(vec![Rational::one(); 3]);
        let x = VectorField::basis(3, 0);
        assert_eq!(g.lower(&x).unwrap(), F::basis(3, 0));
        assert!(g.lower(&VectorField::zero(3)).unwrap().is_zero());
    }
}
