//! One test per acceptance criterion; each prints a single PASS/FAIL line.

mod common;

use std::time::{Duration, Instant};

use hkqk::correspondence::{canonical_deformation, classify_degeneracy, in_trichotomy, signature_at_point, Correspondence, DegeneracyLabel};
use hkqk::forms::Point;
use hkqk::hk::{verify_hyperkahler, verify_symmetry};
use hkqk::models::cone::verify_cone;
use hkqk::models::flat::{build_flat_model, FlatModel, FlatParams};
use hkqk::pipeline::{self, ModelConfig};
use hkqk::twist::{d_w, TwistData};
use hkqk::verify::{Mode, Verifier};
use hkqk::{Rational, Status, VerificationReport};

fn line(n: u32, ok: bool, text: &str) {
    println!("criterion {n:2}: {} - {text}", if ok { "PASS" } else { "FAIL" });
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_int(x)).collect()
}

fn flat(p: usize, q: usize, l: &[i64], c: i64, k: i64) -> FlatModel {
    build_flat_model(&FlatParams::new(p, q, &ints(l), Rational::from_int(c), Rational::from_int(k))).unwrap()
}

/// The flat models of criteria 1 and 2.
fn flat_models() -> Vec<((usize, usize), Vec<i64>)> {
    vec![((2, 0), vec![1, 2]), ((1, 1), vec![1, 2]), ((3, 0), vec![1, 2, 3])]
}

fn symbolic(m: &FlatModel) -> Verifier {
    Verifier::symbolic_only(m.chart.scalars.clone(), m.chart.relations().clone())
}

fn failing(r: &VerificationReport, names: &[&str]) -> Vec<String> {
    names.iter().filter(|n| r.entry(n).is_none_or(|e| e.status != Status::Pass)).map(|n| n.to_string()).collect()
}

#[test]
fn criterion_01_hyperkahler_axioms() {
    let mut ok = true;
    let mut notes = Vec::new();
    for ((p, q), l) in flat_models() {
        let t = Instant::now();
        let m = flat(p, q, &l, 1, 1);
        let r = verify_hyperkahler(&m.chart, &m.h, &symbolic(&m));
        let dt = t.elapsed();
        let good = r.passed() && r.entries.len() == 4 && r.entries.iter().all(|e| e.mode == "symbolic") && dt < Duration::from_secs(10);
        ok &= good;
        notes.push(format!("({p},{q}) {} in {:.2?}", if good { "zero" } else { "FAILED" }, dt));
    }
    line(1, ok, &notes.join(", "));
    assert!(ok);
}

#[test]
fn criterion_02_symmetry_identities() {
    let names = ["symmetry_d_alpha_I", "symmetry_d_alpha_J", "symmetry_d_alpha_K", "symmetry_d_alpha_0", "moment_map", "G_type_11"];
    let mut bad = Vec::new();
    for ((p, q), l) in flat_models() {
        let m = flat(p, q, &l, 1, 1);
        let r = verify_symmetry(&m.chart, &m.h, &m.sd, Some(&m.g_ref), &symbolic(&m));
        bad.extend(failing(&r, &names).into_iter().map(|n| format!("({p},{q}) {n}")));
    }
    line(2, bad.is_empty(), &if bad.is_empty() { "six identities symbolically zero on three models".into() } else { bad.join(", ") });
    assert!(bad.is_empty());
}

#[test]
fn criterion_03_canonical_twist_and_bridge() {
    let mut bad = Vec::new();
    for ((p, q), l) in flat_models() {
        for k in [1, 2] {
            for c in [0, 1] {
                let m = flat(p, q, &l, c, k);
                let expected = m.sd.norm_x2.sub(&m.sd.mu).add(&hkqk::CoefficientFunction::from_int(c)).scale(&Rational::from_int(k));
                let hamiltonian = m.chart.d_function(&m.td.a).add(&m.td.f.interior(&m.sd.x).unwrap()).reduce(m.chart.relations());
                let f_ok = m.td.f.sub(&m.sd.big_g.scale_rational(&Rational::from_int(k))).is_zero();
                if !(hamiltonian.is_zero() && m.td.a.sub(&expected).is_zero() && f_ok) {
                    bad.push(format!("({p},{q}) k={k} c={c}"));
                }
            }
        }
        if !bridge_holds(p, q, &l) {
            bad.push(format!("({p},{q}) bridge"));
        }
    }
    line(3, bad.is_empty(), &if bad.is_empty() { "Hamiltonian identity for k in {1,2}, c in {0,1}; bridge identity".into() } else { bad.join(", ") });
    assert!(bad.is_empty());
}

fn bridge_holds(p: usize, q: usize, l: &[i64]) -> bool {
    flat(p, q, l, 1, 1).bridge_residual().is_zero()
}

#[test]
fn criterion_04_closure_of_twisted_four_form() {
    let m = flat(2, 0, &[1, 2], 1, 1);
    let spec = canonical_deformation(&m.sd, &m.params.c, &m.chart).unwrap();
    let corr = Correspondence { chart: &m.chart, h: &m.h, sd: &m.sd, td: &m.td, spec: &spec, c: m.params.c.clone(), k: m.params.k.clone() };
    let sym = corr.symbolic_residuals().unwrap();
    let dim8 = sym.closure.reduce(m.chart.relations()).is_zero() && sym.invariance.reduce(m.chart.relations()).is_zero();

    let t = Instant::now();
    let mut cfg = ModelConfig::flat(3, 0, &[1, 2, 3], 1);
    cfg.seed = 7;
    let r = pipeline::run(&cfg).unwrap();
    let dt = t.elapsed();
    let closure = r.entry("thm_canonical_gN").unwrap();
    let cert = r.entry("qk_certificate").unwrap();
    let dim12 = closure.status == Status::Pass && closure.mode == "sampled(n=20, seed=7)" && cert.status == Status::Pass && cert.residual == "QK";
    let ok = dim8 && dim12 && dt < Duration::from_secs(120);
    line(4, ok, &format!("dim 8 symbolic {}, dim 12 at 20 points {} with certificate {} in {:.1?}", if dim8 { "zero" } else { "NONZERO" }, if dim12 { "zero" } else { "FAILED" }, cert.residual, dt));
    assert!(ok);
}

fn falsification_report() -> VerificationReport {
    let mut cfg = ModelConfig::flat(2, 0, &[1, 2], 1);
    cfg.seed = 7;
    cfg.falsification = true;
    pipeline::run(&cfg).unwrap()
}

#[test]
fn criterion_05_falsification() {
    let r = falsification_report();
    let mut notes = Vec::new();
    let mut ok = true;
    for name in ["falsify_f_only", "falsify_unit_f", "falsify_undeformed"] {
        let e = r.entry(name).unwrap();
        let good = e.status == Status::Pass && e.witness_point.is_some() && e.mode == "sampled(n=20, seed=7)";
        ok &= good;
        notes.push(format!("{name} {}", if good { "witness" } else { "NO WITNESS" }));
    }
    line(5, ok, &notes.join(", "));
    assert!(ok);
}

#[test]
fn criterion_06_dim8_connection() {
    let r = falsification_report();
    let canon = r.entry("qk_connection_dim8").unwrap();
    let points = canon.detail.as_ref().and_then(|d| d["points"].as_u64()).unwrap_or(0);
    let canonical = canon.status == Status::Pass && points == 20;
    let names = ["falsify_f_only[connection]", "falsify_unit_f[connection]", "falsify_undeformed[connection]"];
    let non = names.iter().all(|n| r.entry(n).is_some_and(|e| e.status == Status::Pass && e.witness_point.is_some()));
    let ok = canonical && non;
    line(6, ok, &format!("canonical solvable at {points}/20 points; non-canonical specs {}", if non { "unsolvable at a witness point" } else { "NOT REJECTED" }));
    assert!(ok);
}

fn signatures_ok(m: &FlatModel, seed: u64) -> (bool, Vec<[usize; 2]>) {
    let spec = canonical_deformation(&m.sd, &m.params.c, &m.chart).unwrap();
    let corr = Correspondence { chart: &m.chart, h: &m.h, sd: &m.sd, td: &m.td, spec: &spec, c: m.params.c.clone(), k: m.params.k.clone() };
    let gn = corr.g_n();
    let v = Verifier::new(Mode::Sampled, 50, seed, m.chart.scalars.clone(), m.chart.relations().clone(), |pt| pipeline::admissible(&m.sd, &m.td, &m.params.c, Some(&gn), pt)).unwrap();
    let mut seen = Vec::new();
    let mut ok = v.points.len() == 50;
    for pt in &v.points {
        let base = signature_at_point(&m.h.g, pt).unwrap();
        let sig = signature_at_point(&gn, pt).unwrap();
        ok &= sig.0 % 4 == 0 && sig.1 % 4 == 0 && in_trichotomy((base.0 / 4, base.1 / 4), (sig.0 / 4, sig.1 / 4));
        seen.push([sig.0 / 4, sig.1 / 4]);
    }
    seen.sort();
    seen.dedup();
    (ok, seen)
}

fn point(m: &FlatModel, values: &[(usize, i64)]) -> Point {
    let mut v = vec![Rational::zero(); m.chart.num_scalars()];
    for &(i, x) in values {
        v[i] = Rational::from_int(x);
    }
    Point::new(v)
}

#[test]
fn criterion_07_signature_trichotomy() {
    let (ok8, s8) = signatures_ok(&flat(2, 0, &[1, 2], 1, 1), 11);
    let (ok12, s12) = signatures_ok(&flat(3, 0, &[1, 2, 3], 1, 1), 11);

    // c = -1: origin is X-null, x1 = y1 = 1 has a = 0, x1 = 2 has mu = c
    let m = flat(2, 0, &[1, 2], -1, 1);
    let c = &m.params.c;
    let cases = [
        (point(&m, &[]), DegeneracyLabel::XNull),
        (point(&m, &[(0, 1), (1, 1)]), DegeneracyLabel::TwistFunctionZero),
        (point(&m, &[(0, 2)]), DegeneracyLabel::MomentPole),
        (point(&m, &[(0, 1), (2, 1)]), DegeneracyLabel::Regular),
    ];
    let labels_ok = cases.iter().all(|(pt, want)| classify_degeneracy(&m.sd, &m.td, c, pt).unwrap() == vec![*want]);
    let ok = ok8 && ok12 && labels_ok;
    line(7, ok, &format!("dim 8 quaternionic signatures {s8:?}, dim 12 {s12:?} at 50 points each; loci labels {}", if labels_ok { "exact" } else { "WRONG" }));
    assert!(ok);
}

#[test]
fn criterion_08_special_connection() {
    let t = Instant::now();
    let (r4, _, s4) = verify_cone(&Rational::from_int(4)).unwrap();
    let (r43, _, s43) = verify_cone(&Rational::new(4, 3)).unwrap();
    let (r1, _, s1) = verify_cone(&Rational::one()).unwrap();
    let dt = t.elapsed();
    let lc = |r: &VerificationReport| r.entry("special_connection_levi_civita").unwrap().residual.clone();
    let ok4 = r4.passed() && s4.is_some() && lc(&r4) == "equal to Levi-Civita";
    let ok43 = r43.passed() && s43.is_some() && lc(&r43) == "distinct from Levi-Civita";
    let e1 = r1.entry("special_connection").unwrap();
    let ok1 = s1.is_none() && e1.status == Status::Fail && e1.residual.contains("rank") && e1.residual.contains("augmented rank");
    let ok = ok4 && ok43 && ok1 && dt < Duration::from_secs(30);
    line(8, ok, &format!("lambda^2 = 4 {}; 4/3 {}; 1: {} ({:.2?})", lc(&r4), lc(&r43), e1.residual, dt));
    assert!(ok);
}

#[test]
fn criterion_09_cmap_pipeline() {
    let names = ["cmap_basic_coframe", "cmap_structure_constants", "cmap_jacobi", "cmap_gN_constant", "cmap_gN_definite", "cmap_qk_connection", "cmap_reference"];
    let mut bad = Vec::new();
    for l2 in [Rational::from_int(4), Rational::new(4, 3)] {
        let r = pipeline::run(&ModelConfig::cmap(l2.clone())).unwrap();
        bad.extend(failing(&r, &names).into_iter().map(|n| format!("{l2}: {n}")));
        if !r.passed() {
            bad.push(format!("{l2}: verdict {}", r.verdict));
        }
    }
    line(9, bad.is_empty(), &if bad.is_empty() { "lambda^2 in {4, 4/3}: basic coframe, constant structure, Jacobi 0, g^N constant positive definite, connection solvable, references match".into() } else { bad.join(", ") });
    assert!(bad.is_empty());
}

#[test]
fn criterion_10_trivial_twist_is_untwisted() {
    let m = flat(2, 0, &[0, 0], 1, 1);
    let trivial_data = m.td.f.is_zero() && m.td.a == hkqk::CoefficientFunction::one();
    let mut untwisted = m.clone();
    untwisted.td = TwistData::trivial(m.sd.x.clone());
    let mut cfg = ModelConfig::flat(2, 0, &[0, 0], 1);
    cfg.seed = 5;
    let a = pipeline::run_flat(&cfg, &m).unwrap().to_json();
    let b = pipeline::run_flat(&cfg, &untwisted).unwrap().to_json();
    let fr = &m.chart.frame;
    let forms = [m.h.omega_i.clone(), m.sd.alpha[0].clone(), m.h.four_form()];
    let dw_is_d = forms.iter().all(|f| d_w(fr, &m.td, f).unwrap() == fr.d(f));
    let ok = trivial_data && a == b && dw_is_d;
    line(10, ok, &format!("F = 0, a = 1; report bytes {}; d_W = d {}", if a == b { "identical" } else { "DIFFER" }, if dw_is_d { "bitwise" } else { "DIFFERS" }));
    assert!(ok);
}

#[test]
fn criterion_11_property_suite() {
    use proptest::prelude::*;
    let ch = common::chart();
    let mut results = Vec::new();
    let d2 = common::runner().run(&common::raw_form_any(), |a| {
        prop_assert!(common::d_squared(&ch, &common::form(&a)));
        Ok(())
    });
    results.push(("d^2 = 0", d2.is_ok()));
    let cartan = common::runner().run(&(common::raw_vector(), common::raw_form_any()), |(x, a)| {
        prop_assert!(common::cartan(&ch, &common::vector(&x), &common::form(&a)));
        Ok(())
    });
    results.push(("Cartan formula", cartan.is_ok()));
    let low = || (0usize..=2).prop_flat_map(common::raw_form);
    let anti = common::runner().run(&(low(), low()), |(a, b)| {
        prop_assert!(common::antiderivation(&ch, &common::form(&a), &common::form(&b)));
        Ok(())
    });
    results.push(("antiderivation", anti.is_ok()));
    let comm = common::runner().run(&(common::raw_form_any(), common::raw_form_any()), |(a, b)| {
        prop_assert!(common::graded_commutative(&ch, &common::form(&a), &common::form(&b)));
        Ok(())
    });
    results.push(("graded commutativity", comm.is_ok()));
    let ok = results.iter().all(|r| r.1);
    let text: Vec<String> = results.iter().map(|(n, r)| format!("{n} {}", if *r { "ok" } else { "FAILED" })).collect();
    line(11, ok, &format!("{} seeded cases each: {}", common::CASES, text.join(", ")));
    assert!(ok);
}
