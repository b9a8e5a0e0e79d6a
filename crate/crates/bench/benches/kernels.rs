use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nilcorr::correlate::{correlation, Nilsequence, Weight};
use nilcorr::equidist::{obstruction_search, TestFunction};
use nilcorr::polyseq::PolySeq2;
use nilcorr::pretentious::{m_value, MultFn};
use nilcorr::scalar::q;
use nilcorr::sieve::{dense_set, mobius_segment};
use nilcorr::{GroupElement, HorizontalCharacter, MalcevPresentation};

fn group_law(c: &mut Criterion) {
    let h = MalcevPresentation::heisenberg();
    let mut g = c.benchmark_group("heisenberg");
    let a = GroupElement::new(vec![0.3, -1.7, 2.25]);
    let b = GroupElement::new(vec![1.1, 0.6, -0.4]);
    g.bench_function("multiply_f64", |bch| bch.iter(|| h.multiply(black_box(&a), black_box(&b)).unwrap()));
    g.bench_function("reduce_f64", |bch| bch.iter(|| h.reduce_mod_lattice(black_box(&a)).unwrap()));
    let ae = GroupElement::new(vec![q(7, 3), q(-5, 4), q(11, 6)]);
    let be = GroupElement::new(vec![q(1, 9), q(13, 2), q(-3, 5)]);
    g.bench_function("multiply_exact", |bch| bch.iter(|| h.multiply(black_box(&ae), black_box(&be)).unwrap()));
    g.finish();
}

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    g.sample_size(10);
    for hi in [100_000u64, 1_000_000] {
        g.bench_with_input(BenchmarkId::new("mobius", hi), &hi, |bch, &hi| bch.iter(|| mobius_segment(1, hi).unwrap()));
    }
    g.bench_function("segment_1e9", |bch| bch.iter(|| mobius_segment(1_000_000_000, 1_000_100_000).unwrap()));
    g.bench_function("dense_set_1e6", |bch| bch.iter(|| dense_set(100.0, 10_000.0, 1_000_000, Some(1)).unwrap()));
    g.finish();
}

fn correlations(c: &mut Criterion) {
    let mut g = c.benchmark_group("correlation");
    g.sample_size(10);
    let n_len = 100_000;
    let w = Weight::mobius(n_len + 2048).unwrap();
    let f = TestFunction::character(HorizontalCharacter::new(vec![1]));
    let torus = Arc::new(MalcevPresentation::torus(1));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let orbit = Nilsequence::orbit(torus, GroupElement::new(vec![phi]), GroupElement::new(vec![0.0])).unwrap();
    for h in [256u64, 2048] {
        g.bench_with_input(BenchmarkId::new("orbit_torus", h), &h, |bch, &h| {
            bch.iter(|| correlation(&w, &f, &orbit, h, n_len).unwrap())
        });
    }
    let heis = Arc::new(MalcevPresentation::heisenberg());
    let poly = PolySeq2::from_coeffs(
        heis.clone(),
        vec![((1, 0), vec![phi, 2f64.sqrt(), 0.0]), ((0, 1), vec![phi, 2f64.sqrt(), 0.0]), ((1, 1), vec![0.0, 0.0, 0.1])],
    )
    .unwrap();
    let fh = TestFunction::character(HorizontalCharacter::new(vec![1, 1, 0]));
    let poly = Nilsequence::Poly(poly);
    g.bench_function("poly_heisenberg_256", |bch| bch.iter(|| correlation(&w, &fh, &poly, 256, 10_000).unwrap()));
    g.finish();
}

fn searches(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    let torus = Arc::new(MalcevPresentation::torus(1));
    let seq = PolySeq2::from_coeffs(torus, vec![((1, 0), vec![2f64.sqrt()])]).unwrap().restrict_h0();
    g.bench_function("obstruction_sqrt2", |bch| bch.iter(|| obstruction_search(&seq, 10_000, 10).unwrap()));
    let mu = MultFn::mobius(100_000).unwrap();
    g.bench_function("m_value_1e5", |bch| bch.iter(|| m_value(&mu, 100_000, None).unwrap()));
    g.finish();
}

criterion_group!(benches, group_law, sieve, correlations, searches);
criterion_main!(benches);
