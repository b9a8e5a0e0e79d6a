use std::sync::Arc;

use num_complex::Complex64;

use super::*;
use crate::factorize::{factorize, Schedule};
use crate::nilgroup::HorizontalCharacter;
use crate::scalar::{q, Q};

fn torus1() -> Arc<MalcevPresentation> {
    Arc::new(MalcevPresentation::torus(1))
}

fn heis() -> Arc<MalcevPresentation> {
    Arc::new(MalcevPresentation::heisenberg())
}

fn e1() -> TestFunction {
    TestFunction::character(HorizontalCharacter::new(vec![1]))
}

fn trivial_orbit() -> Nilsequence {
    Nilsequence::orbit(torus1(), GroupElement::new(vec![0.0]), GroupElement::new(vec![0.0])).unwrap()
}

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Trial-division Moebius function.
fn mu_naive(mut n: u64) -> i64 {
    let mut r = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if n > 1 {
        -r
    } else {
        r
    }
}

#[test]
fn single_step_counts_squarefree() {
    let n_len = 10_000u64;
    let w = Weight::mobius(n_len + 1).unwrap();
    let r = correlation(&w, &TestFunction::constant(1.0), &trivial_orbit(), 1, n_len).unwrap();
    let sqfree = (2..=n_len + 1).filter(|&m| (2..).take_while(|p| p * p <= m).all(|p| m % (p * p) != 0)).count();
    assert_eq!(r.value, sqfree as f64 / n_len as f64);
    assert!((r.value - 6.0 / std::f64::consts::PI.powi(2)).abs() < 0.01);
}

#[test]
fn zero_weight_and_zero_function() {
    let phi = golden();
    let g = Nilsequence::orbit(torus1(), GroupElement::new(vec![phi]), GroupElement::new(vec![0.0])).unwrap();
    let r = correlation(&Weight::zero(300), &e1(), &g, 50, 200).unwrap();
    assert_eq!(r.value, 0.0);
    let r = correlation(&Weight::mobius(300).unwrap(), &TestFunction::constant(0.0), &g, 50, 200).unwrap();
    assert_eq!(r.value, 0.0);
}

#[test]
fn mertens_difference_oracle() {
    let (h_len, n_len) = (50u64, 3000u64);
    let w = Weight::mobius(n_len + h_len).unwrap();
    let r = correlation(&w, &TestFunction::constant(1.0), &trivial_orbit(), h_len, n_len).unwrap();
    let mut m = vec![0i64; (n_len + h_len + 1) as usize];
    for t in 1..m.len() {
        m[t] = m[t - 1] + mu_naive(t as u64);
    }
    let expect: i64 = (1..=n_len as usize).map(|n| (m[n + h_len as usize] - m[n]).abs()).sum();
    assert_eq!(r.value, expect as f64 / (h_len * n_len) as f64);
}

fn brute(w: &Weight, f: &TestFunction, g: &PolySeq2<f64>, h_len: u64, n_len: u64) -> f64 {
    let p = g.presentation();
    let mut total = 0.0;
    for n in 1..=n_len {
        let mut s = Complex64::new(0.0, 0.0);
        for h in 1..=h_len {
            let x = p.reduce_mod_lattice(&g.eval2(n as i64, h as i64)).unwrap().0;
            s += f.eval(&x.coords) * w.get(n + h);
        }
        total += s.norm();
    }
    total / (h_len * n_len) as f64
}

fn heis_seq() -> PolySeq2<f64> {
    PolySeq2::from_coeffs(
        heis(),
        vec![
            ((1, 0), vec![golden(), 2f64.sqrt() - 1.0, 0.1]),
            ((0, 1), vec![0.3, 0.7, 0.0]),
            ((1, 1), vec![0.0, 0.0, 0.05]),
            ((0, 2), vec![0.0, 0.0, 0.0125]),
        ],
    )
    .unwrap()
}

#[test]
fn tableau_matches_direct_evaluation() {
    // H above the reseed interval so the refresh path runs
    let (h_len, n_len) = (300u64, 300u64);
    let g = heis_seq();
    let w = Weight::mobius(n_len + h_len).unwrap();
    let f = TestFunction::character(HorizontalCharacter::new(vec![1, 2, 0]));
    let r = correlation(&w, &f, &Nilsequence::Poly(g.clone()), h_len, n_len).unwrap();
    assert!((r.value - brute(&w, &f, &g, h_len, n_len)).abs() < 1e-9);
}

#[test]
fn orbit_matches_polynomial_form() {
    let g0 = GroupElement::new(vec![golden(), 2f64.sqrt() - 1.0, 0.2]);
    let x = GroupElement::new(vec![0.1, 0.4, 0.3]);
    let orbit = Nilsequence::orbit(heis(), g0.clone(), x.clone()).unwrap();
    let poly = Nilsequence::Poly(PolySeq2::from_orbit(heis(), &g0, &x).unwrap());
    let f = TestFunction::character(HorizontalCharacter::new(vec![1, -1, 0]));
    let w = Weight::liouville(700).unwrap();
    let a = correlation(&w, &f, &orbit, 100, 500).unwrap();
    let b = correlation(&w, &f, &poly, 100, 500).unwrap();
    assert!((a.value - b.value).abs() < 1e-9, "{} vs {}", a.value, b.value);
}

#[test]
fn value_bounded_by_sup_norms() {
    let g = Nilsequence::Poly(heis_seq());
    let w = Weight::from_values("custom", &(1..=400).map(|m| ((m % 7) as f64 - 3.0) / 3.0).collect::<Vec<_>>()).unwrap();
    let r = correlation(&w, &e1_heis(), &g, 30, 300).unwrap();
    assert!(r.value >= 0.0 && r.value <= w.max_abs());
}

fn e1_heis() -> TestFunction {
    TestFunction::character(HorizontalCharacter::new(vec![0, 1, 0]))
}

#[test]
fn coverage_and_size_errors() {
    let w = Weight::mobius(100).unwrap();
    let g = trivial_orbit();
    let f = TestFunction::constant(1.0);
    assert_eq!(correlation(&w, &f, &g, 10, 95).unwrap_err(), Error::TableCoverage { needed: 105, have: 100 });
    assert!(correlation(&w, &f, &g, 20, 10).is_err());
}

#[test]
fn random_signs_near_gaussian_baseline() {
    let h_len = 256u64;
    let n_len = 10_000u64;
    let w = Weight::random_signs(n_len + h_len, 7);
    let r = correlation(&w, &TestFunction::constant(1.0), &trivial_orbit(), h_len, n_len).unwrap();
    let base = (2.0 / (std::f64::consts::PI * h_len as f64)).sqrt();
    assert!(r.value > base / 3.0 && r.value < 3.0 * base, "{} vs {base}", r.value);
}

#[test]
fn thread_count_does_not_change_result() {
    let phi = golden();
    let g = Nilsequence::orbit(torus1(), GroupElement::new(vec![phi]), GroupElement::new(vec![0.0])).unwrap();
    let w = Weight::mobius(300_000).unwrap();
    let run = |k| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .unwrap()
            .install(|| correlation(&w, &e1(), &g, 1000, 200_000).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.block_sums, b.block_sums);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.block_sums.len(), 4);
}

#[test]
fn partition_examples() {
    let cells = partition(100, 2, 2, 0).unwrap();
    assert_eq!(cells.len(), 8);
    let c = cells.iter().find(|c| c.k == 1 && c.j == 1).unwrap();
    assert_eq!(c.cell, Progression::new(1, 2, 13));
    let cells = partition(100, 3, 1, 5).unwrap();
    assert_eq!(cells.len(), 9);
    assert_eq!(cells[0].cell, Progression::new(1, 1, 11));
    assert_eq!(cells[8].cell, Progression::new(89, 1, 12));
    assert!(matches!(partition(10, 4, 1, 0), Err(Error::Degenerate(_))));
    assert!(partition(100, 2, 3, 0).is_err());
}

#[test]
fn intersection_examples() {
    let odd = Progression::new(1, 2, 50);
    let fives = Progression::new(0, 5, 21);
    assert_eq!(progression_intersection(&odd, &fives).unwrap(), Progression::new(5, 10, 10));
    assert_eq!(progression_intersection(&odd, &odd).unwrap(), odd);
    let even = Progression::new(0, 2, 50);
    assert_eq!(progression_intersection(&odd, &even).unwrap().len, 0);
    assert_eq!(progression_intersection(&Progression::new(3, 4, 0), &odd).unwrap().len, 0);
}

fn near_half() -> PolySeq2<Q> {
    let a = q(500_001, 1_000_000);
    PolySeq2::from_coeffs(torus1(), vec![((1, 0), vec![a.clone()]), ((0, 1), vec![a])]).unwrap()
}

#[test]
fn trace_near_half_has_small_defect() {
    let g = near_half();
    let r = factorize(&g, 200, 64, &Schedule::doubling(4, 10.0, 100, 3)).unwrap();
    let w = Weight::mobius(400).unwrap();
    let t = bilinear_trace(&r, &g, &e1(), &w, 64, None, &[1, 50, 137]).unwrap();
    assert_eq!((t.w, t.q), (2, 2));
    assert_eq!(t.cells.len(), 3 * 8);
    for row in &t.rows {
        // eps drifts by at most 2 pi 10^-6 (n + h) within the sum
        assert!(row.defect < 64.0 * 2.0 * std::f64::consts::PI * 1e-6 * 300.0, "{row:?}");
        let split = row.major + row.minor;
        assert!((split - row.trace).norm() <= 1e-9 * (1.0 + row.trace.norm()));
    }
    // g' is trivial, so every fiber integral is a point value of modulus 1
    assert!(t.cells.iter().all(|c| c.subgroup_dim == 0 && (c.e.norm() - 1.0).abs() < 1e-12));
    assert!(t.flagged.is_empty());
}

#[test]
fn trace_golden_character_has_zero_major_part() {
    let phi = golden();
    let g = PolySeq2::from_coeffs(torus1(), vec![((1, 0), vec![phi]), ((0, 1), vec![phi])]).unwrap();
    let r = factorize(&g, 500, 100, &Schedule::doubling(3, 10.0, 100, 1)).unwrap();
    let w = Weight::mobius(700).unwrap();
    let t = bilinear_trace(&r, &g, &e1(), &w, 100, None, &[3, 400]).unwrap();
    assert!(t.cells.iter().all(|c| c.e.norm() < 1e-3), "max |E| = {}", t.cells.iter().fold(0.0f64, |a, c| a.max(c.e.norm())));
    for row in &t.rows {
        assert!(row.major.norm() < 1e-3 * 100.0);
        assert!(row.defect < 1e-9);
    }
}

/// Rational in `x`, irrational in `y`: one step with `q = 2`, leaving a
/// two-dimensional `G'`.
fn heis_mixed() -> PolySeq2<f64> {
    PolySeq2::from_coeffs(
        heis(),
        vec![((1, 0), vec![0.5, golden(), 0.0]), ((0, 1), vec![0.0, 2f64.sqrt() - 1.0, 0.0]), ((1, 1), vec![0.0, 0.0, 0.1])],
    )
    .unwrap()
}

#[test]
fn trace_constant_function_is_all_major() {
    let g = heis_mixed();
    let r = factorize(&g, 100, 36, &Schedule::doubling(4, 1.0, 100, 3)).unwrap();
    assert_eq!((r.q, r.subgroup().m()), (2, 2));
    let w = Weight::liouville(200).unwrap();
    let t = bilinear_trace(&r, &g, &TestFunction::constant(1.0), &w, 36, None, &[5, 60]).unwrap();
    for c in &t.cells {
        assert_eq!(c.e, Complex64::new(1.0, 0.0));
        assert_eq!(c.minor, Complex64::new(0.0, 0.0));
        assert_eq!(c.major.re, c.weight_sum);
    }
    for row in &t.rows {
        let plain: f64 = (1..=36).map(|h| w.get(row.n as u64 + h)).sum();
        assert_eq!(row.major.re, plain);
    }

    // e(y) integrates to zero over a fiber containing the y direction
    let f = TestFunction::character(HorizontalCharacter::new(vec![0, 1, 0]));
    let t = bilinear_trace(&r, &g, &f, &w, 36, None, &[5, 60]).unwrap();
    assert!(t.cells.iter().all(|c| c.e.norm() < 1e-3));
    // conjugating by x = 1/2 moves exp(Y) off the lattice in the z coordinate
    for c in &t.cells {
        assert_eq!(c.lattice_scale, if c.gamma[0] == 0.5 { 2 } else { 1 });
    }
    assert!(t.flagged.is_empty());
    for row in &t.rows {
        assert!((row.major + row.minor - row.trace).norm() <= 1e-9 * (1.0 + row.trace.norm()));
    }
}

#[test]
fn scan_rows_and_csv() {
    let phi = golden();
    let g = Nilsequence::orbit(torus1(), GroupElement::new(vec![phi]), GroupElement::new(vec![0.0])).unwrap();
    let w = Weight::mobius(5000).unwrap();
    let f = e1();
    let spec = |weight, function, h_list| ScanSpec {
        experiment_id: "t@000000000000".into(),
        seq: &g,
        function,
        h_list,
        n_len: 2000,
        eps: 1e-3,
        weight,
        restricted: true,
        sieve: None,
        r_override: None,
        trace: None,
    };
    let rows = decay_scan(&spec(&w, &f, &[16, 64])).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!((rows[1].restricted, rows[1].weight.as_str()), (true, "1_S*mobius"));
    assert!(rows.iter().all(|r| r.value <= 1.0 && r.p1 >= 2.0 && r.p1 <= r.q1));
    assert_eq!(csv_header().split(',').count(), rows[0].to_csv().split(',').count());

    let zero = Weight::zero(5000);
    assert!(decay_scan(&spec(&zero, &f, &[16, 64])).unwrap().iter().all(|r| r.value == 0.0));
    let none = TestFunction::constant(0.0);
    assert!(decay_scan(&spec(&w, &none, &[16, 64])).unwrap().iter().all(|r| r.value == 0.0));
    assert!(decay_scan(&spec(&w, &f, &[64, 16])).is_err());
}
