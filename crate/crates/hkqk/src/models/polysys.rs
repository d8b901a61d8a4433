//! Exact solver for the small polynomial systems of the special connection
//! problem: linear elimination, rational roots of univariate equations with
//! backtracking, and an optional one-time gauge fixing.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::linalg;
use crate::poly::Polynomial;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChoiceKind {
    /// A variable fixed to zero by the declared gauge freedom.
    Gauge,
    /// A rational root of a univariate equation.
    Root,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choice {
    pub kind: ChoiceKind,
    pub var: usize,
    pub value: Rational,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Solved {
        values: Vec<Rational>,
        /// Variables left unconstrained, set to zero.
        free: Vec<usize>,
        choices: Vec<Choice>,
    },
    Inconsistent {
        /// Why the last branch failed, e.g. a rank defect of the linear part.
        reason: String,
        /// Rank data when the failure was a linear inconsistency without any choice.
        rank_defect: Option<linalg::RankDefect>,
        branches: usize,
    },
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Variables among which the first still free one may be set to zero once.
    pub gauge: Vec<usize>,
}

#[derive(Clone)]
struct State {
    eqs: Vec<Polynomial>,
    /// Current value of each variable as a polynomial in the still free ones.
    values: Vec<Polynomial>,
    solved: Vec<bool>,
    gauge_used: bool,
    choices: Vec<Choice>,
}

pub fn solve(equations: &[Polynomial], nvars: usize, opts: &Options) -> Outcome {
    let st = State {
        eqs: equations.to_vec(),
        values: (0..nvars).map(Polynomial::var).collect(),
        solved: vec![false; nvars],
        gauge_used: false,
        choices: Vec::new(),
    };
    let mut branches = 0;
    match search(st, opts, &mut branches) {
        Ok(o) => o,
        Err((reason, rank_defect)) => Outcome::Inconsistent { reason, rank_defect, branches },
    }
}

type Failure = (String, Option<linalg::RankDefect>);

fn search(mut st: State, opts: &Options, branches: &mut usize) -> Result<Outcome, Failure> {
    *branches += 1;
    loop {
        normalize(&mut st.eqs);
        if let Some(c) = st.eqs.iter().find(|e| e.is_constant()) {
            return Err((format!("constant equation {} = 0", c.constant_term()), None));
        }
        if st.eqs.is_empty() {
            let free: Vec<usize> = (0..st.values.len()).filter(|&v| !st.solved[v]).collect();
            let zeros = vec![Rational::zero(); st.values.len()];
            let values = st.values.iter().map(|p| p.eval(&zeros)).collect();
            return Ok(Outcome::Solved { values, free, choices: st.choices });
        }
        let linear: Vec<&Polynomial> = st.eqs.iter().filter(|e| e.total_degree() <= 1).collect();
        if !linear.is_empty() {
            let subs = match linear_step(&linear) {
                Ok(s) => s,
                Err(defect) => {
                    let first = st.choices.is_empty();
                    return Err((format!("linear part inconsistent: {defect}"), first.then_some(defect)));
                }
            };
            apply(&mut st, &subs);
            continue;
        }
        if let Some((v, coeffs)) = st.eqs.iter().find_map(univariate) {
            let mut roots = rational_roots(&coeffs);
            roots.sort();
            roots.reverse();
            if roots.is_empty() {
                return Err((format!("no rational root in variable {v}"), None));
            }
            let mut last = (String::new(), None);
            for r in roots {
                let mut next = st.clone();
                next.choices.push(Choice { kind: ChoiceKind::Root, var: v, value: r.clone() });
                apply(&mut next, &[(v, Polynomial::constant(r))]);
                match search(next, opts, branches) {
                    Ok(o) => return Ok(o),
                    Err(f) => last = (f.0, None),
                }
            }
            return Err(last);
        }
        if !st.gauge_used {
            let present = variables(&st.eqs);
            if let Some(&g) = opts.gauge.iter().find(|g| present.contains(g)) {
                st.gauge_used = true;
                st.choices.push(Choice { kind: ChoiceKind::Gauge, var: g, value: Rational::zero() });
                apply(&mut st, &[(g, Polynomial::zero())]);
                continue;
            }
        }
        return Err((format!("{} nonlinear equations left without a univariate one", st.eqs.len()), None));
    }
}

fn normalize(eqs: &mut Vec<Polynomial>) {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in eqs.drain(..) {
        if e.is_zero() {
            continue;
        }
        let (_, m) = e.monic();
        let key = format!("{m:?}");
        if seen.insert(key) {
            out.push(m);
        }
    }
    *eqs = out;
}

fn variables(eqs: &[Polynomial]) -> BTreeSet<usize> {
    eqs.iter().flat_map(|e| e.variables()).collect()
}

/// Solves the linear equations for their pivot variables.
fn linear_step(linear: &[&Polynomial]) -> Result<Vec<(usize, Polynomial)>, linalg::RankDefect> {
    let vars: Vec<usize> = variables(&linear.iter().map(|p| (*p).clone()).collect::<Vec<_>>()).into_iter().collect();
    let col = |v: usize| vars.binary_search(&v).unwrap();
    let mut a = vec![vec![Rational::zero(); vars.len()]; linear.len()];
    let mut b = vec![Rational::zero(); linear.len()];
    for (r, e) in linear.iter().enumerate() {
        for (m, c) in e.terms() {
            match m.factors().next() {
                Some((v, _)) => a[r][col(v)] = c.clone(),
                None => b[r] = -c.clone(),
            }
        }
    }
    let sol = linalg::solve(&a, &b, &Default::default())?;
    let free: Vec<usize> = (0..vars.len()).filter(|j| !sol.pivots.contains(j)).collect();
    let mut subs = Vec::new();
    for &p in &sol.pivots {
        // x_p = particular_p + sum_f nullspace_f[p] x_f
        let mut expr = Polynomial::constant(sol.particular[p].clone());
        for (k, &f) in free.iter().enumerate() {
            let coef = &sol.nullspace[k][p];
            if !coef.is_zero() {
                expr = expr.add(&Polynomial::var(vars[f]).scale(coef));
            }
        }
        subs.push((vars[p], expr));
    }
    Ok(subs)
}

fn apply(st: &mut State, subs: &[(usize, Polynomial)]) {
    let n = st.values.len();
    let mut images: Vec<Polynomial> = (0..n).map(Polynomial::var).collect();
    for (v, e) in subs {
        images[*v] = e.clone();
        st.solved[*v] = true;
    }
    st.eqs = st.eqs.iter().map(|e| e.compose(&images, None)).collect();
    st.values = st.values.iter().map(|e| e.compose(&images, None)).collect();
}

fn univariate(e: &Polynomial) -> Option<(usize, Vec<Rational>)> {
    let vars = e.variables();
    if vars.len() != 1 {
        return None;
    }
    e.univariate_coeffs(vars[0]).map(|c| (vars[0], c))
}

/// Distinct rational roots of `sum c_i x^i`.
pub fn rational_roots(coeffs: &[Rational]) -> Vec<Rational> {
    let mut c: Vec<Rational> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    let mut roots = Vec::new();
    if c.len() <= 1 {
        return roots;
    }
    if c[0].is_zero() {
        roots.push(Rational::zero());
        while c.first().is_some_and(|x| x.is_zero()) {
            c.remove(0);
        }
    }
    let lcm = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(&x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let (a0, an) = (ints[0].abs(), ints[ints.len() - 1].abs());
    let (Some(p_div), Some(q_div)) = (divisors(&a0), divisors(&an)) else {
        return roots;
    };
    for p in &p_div {
        for q in &q_div {
            for sign in [1i64, -1] {
                let r = Rational::from_bigints(BigInt::from(sign) * p, q.clone());
                if !roots.contains(&r) && eval_int(&ints, &r).is_zero() {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

fn eval_int(c: &[BigInt], x: &Rational) -> Rational {
    c.iter().rev().fold(Rational::zero(), |acc, k| &(&acc * x) + &Rational::from_bigints(k.clone(), BigInt::one()))
}

/// Positive divisors by trial division; gives up on large inputs.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64()?;
    if n == 0 || n > 1 << 40 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: usize) -> Polynomial {
        Polynomial::var(v)
    }

    fn k(n: i64) -> Polynomial {
        Polynomial::constant(Rational::from_int(n))
    }

    #[test]
    fn roots_of_small_polynomials() {
        let r = rational_roots(&[Rational::zero(), Rational::from_int(-1), Rational::from_int(4)]);
        assert_eq!(r.len(), 2);
        assert!(r.contains(&Rational::new(1, 4)));
        assert!(rational_roots(&[Rational::from_int(-2), Rational::zero(), Rational::one()]).is_empty());
    }

    #[test]
    fn linear_then_quadratic() {
        // x0 - x1 = 0, x1^2 - 4 = 0 -> descending root 2 first
        let eqs = vec![x(0).sub(&x(1)), x(1).mul(&x(1)).sub(&k(4))];
        match solve(&eqs, 2, &Options::default()) {
            Outcome::Solved { values, choices, .. } => {
                assert_eq!(values, vec![Rational::from_int(2), Rational::from_int(2)]);
                assert_eq!(choices.len(), 1);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn backtracks_and_reports_inconsistency() {
        // x0^2 = x0 and x0 = 0 -> x1 = 1 forced only for x0 = 1 branch
        let eqs = vec![x(0).mul(&x(0)).sub(&x(0)), x(0).mul(&x(1)).sub(&k(1)), x(1).sub(&k(1))];
        match solve(&eqs, 2, &Options::default()) {
            Outcome::Solved { values, .. } => assert_eq!(values, vec![Rational::one(), Rational::one()]),
            o => panic!("{o:?}"),
        }
        let bad = vec![x(0).add(&x(1)).sub(&k(1)), x(0).add(&x(1)).sub(&k(2))];
        match solve(&bad, 2, &Options::default()) {
            Outcome::Inconsistent { rank_defect, .. } => assert!(rank_defect.is_some()),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn gauge_breaks_a_symmetric_system() {
        // x0^2 + x1^2 = 1 has a circle of solutions; fixing x1 = 0 gives x0 = 1
        let eqs = vec![x(0).mul(&x(0)).add(&x(1).mul(&x(1))).sub(&k(1))];
        match solve(&eqs, 2, &Options { gauge: vec![1] }) {
            Outcome::Solved { values, choices, .. } => {
                assert_eq!(values, vec![Rational::one(), Rational::zero()]);
                assert_eq!(choices[0].kind, ChoiceKind::Gauge);
            }
            o => panic!("{o:?}"),
        }
    }
}
