//! Seeded exact sample points and lifting of tensors to jets.
//!
//! Points are drawn with the ChaCha8 generator of `rand_chacha`, seeded by
//! `seed_from_u64`. Every coordinate is an index drawn with `gen_range` into
//! the sorted list of distinct rationals `p/q` with `1 <= q <= 4` and
//! `|p/q| <= 10` (121 values). A pair of generators bound by a circle
//! relation is set to `((1 - u^2)/(1 + u^2), 2u/(1 + u^2))` for one grid
//! draw `u`. Candidates failing the admissibility predicate are discarded,
//! so the point list depends only on the seed and the predicate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coeff::CoefficientFunction;
use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, EndomorphismField, MetricTensor, Point, VectorField};
use crate::jet::Jet;
use crate::rational::Rational;
use crate::relations::Relations;

pub const GRID_MAX_DENOMINATOR: i64 = 4;
pub const GRID_BOUND: i64 = 10;

/// Distinct grid rationals in increasing order.
pub fn grid() -> Vec<Rational> {
    let mut v: Vec<Rational> = Vec::new();
    for q in 1..=GRID_MAX_DENOMINATOR {
        for p in -GRID_BOUND * q..=GRID_BOUND * q {
            v.push(Rational::new(p, q));
        }
    }
    v.sort();
    v.dedup();
    v
}

pub struct Sampler {
    rng: ChaCha8Rng,
    grid: Vec<Rational>,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), grid: grid() }
    }

    pub fn value(&mut self) -> Rational {
        let i = self.rng.gen_range(0..self.grid.len());
        self.grid[i].clone()
    }

    /// A candidate point for `n` generators under the given relations.
    pub fn candidate(&mut self, n: usize, rel: &Relations) -> Point {
        let mut values: Vec<Option<Rational>> = vec![None; n];
        for k in 0..n {
            if values[k].is_some() {
                continue;
            }
            if let Some((c, s)) = rel.circles().iter().find(|(c, s)| *c == k || *s == k) {
                let u = self.value();
                let one = Rational::one();
                let den = &one + &(&u * &u);
                values[*c] = Some(&(&one - &(&u * &u)) / &den);
                values[*s] = Some(&(&Rational::from_int(2) * &u) / &den);
            } else {
                values[k] = Some(self.value());
            }
        }
        Point::new(values.into_iter().map(|v| v.unwrap()).collect())
    }
}

/// `count` admissible points, generated sequentially.
pub fn sample_points(n: usize, rel: &Relations, count: usize, seed: u64, admissible: impl Fn(&Point) -> bool) -> Result<Vec<Point>> {
    let mut s = Sampler::new(seed);
    let mut out = Vec::with_capacity(count);
    let budget = 1000 + 200 * count;
    for _ in 0..budget {
        if out.len() == count {
            break;
        }
        let p = s.candidate(n, rel);
        if admissible(&p) {
            out.push(p);
        }
    }
    if out.len() < count {
        return Err(Error::Sampling(format!("only {} of {count} admissible points after {budget} draws", out.len())));
    }
    Ok(out)
}

/// Evaluates `f` at every point in parallel and returns the first point, in
/// list order, where it reports something, together with that report.
pub fn first_hit<T: Send>(points: &[Point], f: impl Fn(&Point) -> Result<Option<T>> + Sync + Send) -> Result<Option<(usize, T)>> {
    let results: Vec<Result<Option<T>>> = points.par_iter().map(&f).collect();
    for (i, r) in results.into_iter().enumerate() {
        if let Some(v) = r? {
            return Ok(Some((i, v)));
        }
    }
    Ok(None)
}

/// Maps `f` over the points in parallel, keeping list order.
pub fn map_points<T: Send>(points: &[Point], f: impl Fn(&Point) -> T + Sync + Send) -> Vec<T> {
    points.par_iter().map(f).collect()
}

/// Tensors with rational-function entries that can be lifted to jets.
pub trait Lift {
    type Lifted;
    fn lift(&self, pt: &Point, order: u32) -> Result<Self::Lifted>;
}

fn pole(what: &str, pt: &Point) -> Error {
    Error::DenominatorVanishes { component: what.to_string(), point: pt.to_string() }
}

impl Lift for CoefficientFunction {
    type Lifted = Jet;
    fn lift(&self, pt: &Point, order: u32) -> Result<Jet> {
        Jet::lift(self, &pt.values, order).ok_or_else(|| pole("scalar", pt))
    }
}

impl Lift for DifferentialForm {
    type Lifted = DifferentialForm<Jet>;
    fn lift(&self, pt: &Point, order: u32) -> Result<DifferentialForm<Jet>> {
        self.try_map(|idx, c| Jet::lift(c, &pt.values, order).ok_or_else(|| pole(&format!("{idx:?}"), pt)))
    }
}

impl Lift for VectorField {
    type Lifted = VectorField<Jet>;
    fn lift(&self, pt: &Point, order: u32) -> Result<VectorField<Jet>> {
        Ok(VectorField::new(self.components().iter().map(|c| c.lift(pt, order)).collect::<Result<_>>()?))
    }
}

fn lift_matrix(m: &[Vec<CoefficientFunction>], pt: &Point, order: u32) -> Result<Vec<Vec<Jet>>> {
    m.iter().map(|r| r.iter().map(|c| c.lift(pt, order)).collect()).collect()
}

impl Lift for MetricTensor {
    type Lifted = MetricTensor<Jet>;
    fn lift(&self, pt: &Point, order: u32) -> Result<MetricTensor<Jet>> {
        Ok(MetricTensor::from_matrix(lift_matrix(self.matrix(), pt, order)?))
    }
}

impl Lift for EndomorphismField {
    type Lifted = EndomorphismField<Jet>;
    fn lift(&self, pt: &Point, order: u32) -> Result<EndomorphismField<Jet>> {
        Ok(EndomorphismField::from_matrix(lift_matrix(self.matrix(), pt, order)?))
    }
}

impl<T: Lift> Lift for Vec<T> {
    type Lifted = Vec<T::Lifted>;
    fn lift(&self, pt: &Point, order: u32) -> Result<Self::Lifted> {
        self.iter().map(|x| x.lift(pt, order)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_expected_size_and_bounds() {
        let g = grid();
        assert_eq!(g.len(), 121);
        assert_eq!(g[0], Rational::from_int(-10));
        assert_eq!(g[120], Rational::from_int(10));
    }

    #[test]
    fn seeded_points_are_reproducible() {
        let a = sample_points(3, &Relations::none(), 5, 7, |_| true).unwrap();
        let b = sample_points(3, &Relations::none(), 5, 7, |_| true).unwrap();
        assert_eq!(a, b);
        let c = sample_points(3, &Relations::none(), 5, 8, |_| true).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn circle_points_lie_on_the_circle() {
        let mut rel = Relations::none();
        rel.add_circle(1, 2);
        for p in sample_points(3, &rel, 10, 1, |_| true).unwrap() {
            let v = &p.values;
            assert!((&(&v[1] * &v[1]) + &(&v[2] * &v[2])).is_one());
        }
    }

    #[test]
    fn rejection_and_exhaustion() {
        let pts = sample_points(1, &Relations::none(), 4, 3, |p| p.values[0].is_negative()).unwrap();
        assert!(pts.iter().all(|p| p.values[0].is_negative()));
        assert!(sample_points(1, &Relations::none(), 1, 3, |_| false).is_err());
    }
}
