use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::sieve::{dense_set, primes_up_to};

#[test]
fn distance_examples() {
    let mu = MultFn::mobius(100).unwrap();
    let one = MultFn::one(100);
    let d2 = distance_sq_exact(&mu, &one, 10).unwrap().unwrap();
    assert_eq!(d2, BigRational::new(BigInt::from(494), BigInt::from(210)));
    assert!((distance_sq(&mu, &one, 10).unwrap() - 494.0 / 210.0).abs() < 1e-14);
    assert_eq!(distance(&mu, &mu, 100).unwrap(), 0.0);

    let mu = MultFn::mobius(100_000).unwrap();
    let one = MultFn::one(100_000);
    let oracle: f64 = primes_up_to(100_000).into_iter().map(|p| 2.0 / p as f64).sum();
    assert!((distance_sq(&mu, &one, 100_000).unwrap() - oracle).abs() < 1e-12);
    assert!(distance(&mu, &one, 1).is_err());
}

#[test]
fn prime_power_builder() {
    let mu = MultFn::from_prime_powers_int(200, |_, k| if k == 1 { -1 } else { 0 });
    assert_eq!(mu, MultFn::mobius(200).unwrap());
    let lambda = MultFn::from_prime_powers_int(200, |_, k| if k % 2 == 1 { -1 } else { 1 });
    assert_eq!(lambda, MultFn::liouville(200).unwrap());
    assert!(mu.check_multiplicative().is_ok());
    let mut bad: Vec<i64> = (1..=30).map(|n| mu.get_exact(n).unwrap()).collect();
    bad[5] = -1; // n = 6
    assert_eq!(MultFn::from_int_table(bad).check_multiplicative(), Err(Error::NotMultiplicative(6)));
}

#[test]
fn m_value_examples() {
    let x = 2000;
    let beta = MultFn::archimedean(x, 0.5);
    let m = m_value(&beta, x, None).unwrap();
    assert!(m.value < 1e-9, "{m:?}");
    assert!((m.t - 0.5).abs() < 1e-4, "{m:?}");

    let m = m_value(&MultFn::one(x), x, None).unwrap();
    assert_eq!(m.t, 0.0);
    assert!(m.value.abs() < 1e-12);
}

#[test]
fn m_value_refines_with_grid() {
    let x = 1000;
    let mu = MultFn::mobius(x).unwrap();
    let coarse = m_value(&mu, x, Some(0.5)).unwrap();
    let fine = m_value(&mu, x, Some(default_resolution(x))).unwrap();
    let finer = m_value(&mu, x, Some(default_resolution(x) / 4.0)).unwrap();
    assert!(fine.value <= coarse.value + 1e-12);
    assert!(finer.value <= fine.value + 1e-12);
    assert!((fine.value - finer.value).abs() < 1e-6);
}

#[test]
fn characters_small_moduli() {
    let c1 = characters_mod(1).unwrap();
    assert_eq!(c1.len(), 1);
    assert!(c1[0].is_principal());

    let c4 = characters_mod(4).unwrap();
    assert_eq!(c4.len(), 2);
    assert_eq!(c4[1].value(3), Complex64::new(-1.0, 0.0));
    assert_eq!(c4[1].conductor(), 4);

    let c9 = characters_mod(9).unwrap();
    assert_eq!(c9.len(), 6);
    for chi in &c9[1..] {
        let s: Complex64 = (0..9).map(|n| chi.value(n)).sum();
        assert!(s.norm() < 1e-12);
    }
    // mod 12 the character induced from mod 4 has conductor 4
    let c12 = characters_mod(12).unwrap();
    let conds: Vec<u64> = c12.iter().map(DirichletCharacter::conductor).collect();
    assert_eq!(conds.iter().filter(|&&c| c == 1).count(), 1);
    assert!(conds.contains(&3) && conds.contains(&4) && conds.contains(&12));
}

#[test]
fn character_orthogonality() {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    for q in 1..=50u64 {
        let chars = characters_mod(q).unwrap();
        let phi = (1..=q).filter(|&a| gcd(a, q) == 1).count();
        assert_eq!(chars.len(), phi, "q = {q}");
        for chi in &chars {
            for a in 1..=q {
                for b in 1..=q {
                    let d = chi.value(a * b) - chi.value(a) * chi.value(b);
                    assert!(d.norm() < 1e-12, "complete multiplicativity q = {q}");
                }
            }
        }
        for a in 0..q {
            for b in 0..q {
                let s: Complex64 = chars.iter().map(|c| c.value(a) * c.value(b).conj()).sum::<Complex64>() / phi as f64;
                let want = if a == b && gcd(a, q) == 1 { 1.0 } else { 0.0 };
                assert!((s - want).norm() < 1e-9, "q = {q}, a = {a}, b = {b}");
            }
        }
    }
}

#[test]
fn m2_examples() {
    let x = 3000;
    let res = Some(0.05);
    let chi0 = characters_mod(3).unwrap().remove(0);
    let beta = MultFn::character(&chi0, x);
    let r = m2_value(&beta, x, 3, res).unwrap();
    // beta conj(beta) vanishes at p = 3 only
    assert!((r.m.value - 1.0 / 3.0).abs() < 1e-12, "{r:?}");

    let mu = MultFn::mobius(x).unwrap();
    let a = m2_value(&mu, x, 1, res).unwrap();
    let b = m_value(&mu, x, res).unwrap();
    assert_eq!(a.m, b);
    let c = m2_value(&mu, x, 6, res).unwrap();
    assert!(c.m.value <= b.value);

    let t = m_tilde(&mu, 500, 2, 2000, res).unwrap();
    assert_eq!(t.ladder.iter().map(|l| l.0).collect::<Vec<_>>(), vec![500, 1000, 2000]);
    assert!(t.value <= t.ladder[0].1);
}

#[test]
fn inversion_examples() {
    let chi = characters_mod(5).unwrap().remove(1);
    let beta = MultFn::character(&chi, 500);
    let inv = dirichlet_inversion(&beta, 500).unwrap();
    assert_eq!(inv.eta.get(1), Complex64::new(1.0, 0.0));
    assert!((2..=500).all(|n| inv.eta.get(n).norm() < 1e-12));

    let mu = MultFn::mobius(100_000).unwrap();
    let inv = dirichlet_inversion(&mu, 100_000).unwrap();
    assert!(inv.max_abs_eta <= 2.0);
    // direct convolution oracle on n <= 100
    let m = |n: u64| mu.get_exact(n).unwrap();
    let hat = |n: u64| inv.beta_hat.get_exact(n).unwrap();
    for n in 1..=100u64 {
        let mut s = 0;
        for d in 1..=n {
            if n % d == 0 {
                let e = n / d;
                s += m(d) * m(e) * hat(e);
            }
        }
        assert_eq!(inv.eta.get_exact(n).unwrap(), s, "n = {n}");
    }
    assert_eq!(inv.eta.get_exact(4), Some(-1));
    assert_eq!(inv.eta.get_exact(2), Some(0));
    assert_eq!(inv.sums.len(), 2);
    assert!(inv.sums[0].1 > inv.sums[1].1);

    let mut bad: Vec<i64> = (1..=50).map(m).collect();
    bad[9] = -1; // n = 10
    assert_eq!(dirichlet_inversion(&MultFn::from_int_table(bad), 50).unwrap_err(), Error::NotMultiplicative(10));
}

fn naive_mrt(a: impl Fn(u64) -> i64, n_len: u64, h0: u64) -> i128 {
    (n_len + 1..=2 * n_len)
        .map(|n| {
            let w: i128 = (n + 1..=n + h0).map(|v| a(v) as i128).sum();
            w * w
        })
        .sum()
}

#[test]
fn mrt_examples() {
    let n = 300;
    let h0 = 17;
    let one = MultFn::one(2 * n + h0);
    let r = mrt_lhs(&one, None, n, h0, None).unwrap();
    assert_eq!(r.exact, Some((n * h0 * h0) as i128));
    assert_eq!(r.ratio, 1.0);

    let mu = MultFn::mobius(2 * n + 1).unwrap();
    let r = mrt_lhs(&mu, None, n, 1, None).unwrap();
    let sqfree = (n + 2..=2 * n + 1).filter(|&v| mu.get_exact(v).unwrap() != 0).count();
    assert_eq!(r.exact, Some(sqfree as i128));

    let mu = MultFn::mobius(3000).unwrap();
    let chi = characters_mod(7).unwrap().remove(3);
    for (n, h0) in [(1000, 50), (999, 1), (500, 37)] {
        let a = |v: u64| mu.get_exact(v).unwrap() * chi.value(v).re as i64;
        if chi.is_real() {
            assert_eq!(mrt_lhs(&mu, Some(&chi), n, h0, None).unwrap().exact, Some(naive_mrt(a, n, h0)));
        }
        assert_eq!(mrt_lhs(&mu, None, n, h0, None).unwrap().exact, Some(naive_mrt(|v| mu.get_exact(v).unwrap(), n, h0)));
    }

    // complex characters go through the float path
    let chi = characters_mod(7).unwrap().remove(1);
    assert!(!chi.is_real());
    let r = mrt_lhs(&mu, Some(&chi), 1000, 50, None).unwrap();
    let naive: f64 = (1001..=2000u64)
        .map(|n| (n + 1..=n + 50).map(|v| mu.get(v) * chi.value(v)).sum::<Complex64>().norm_sqr())
        .sum();
    assert!(r.exact.is_none());
    assert!((r.value - naive).abs() < 1e-8 * naive.max(1.0));

    let s = dense_set(4.0, 6.0, 3000, Some(1)).unwrap();
    let r = mrt_lhs(&mu, None, 1000, 20, Some(&s.members)).unwrap();
    let a = |v: u64| if v % 5 == 0 { mu.get_exact(v).unwrap() } else { 0 };
    assert_eq!(r.exact, Some(naive_mrt(a, 1000, 20)));
    assert!(mrt_lhs(&mu, None, 2000, 20, None).is_err());
}

#[test]
fn triangle_inequality_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = 2000;
    let random_fn = |rng: &mut ChaCha8Rng| {
        let vals: Vec<(f64, f64)> = (0..=x).map(|_| (rng.gen::<f64>().sqrt(), rng.gen::<f64>() * std::f64::consts::TAU)).collect();
        MultFn::from_prime_powers(x, move |p, k| {
            let (r, th) = vals[(p as usize + k as usize) % vals.len()];
            Complex64::from_polar(r, th)
        })
    };
    for _ in 0..20 {
        let (a, b, c) = (random_fn(&mut rng), random_fn(&mut rng), random_fn(&mut rng));
        assert!(a.is_bounded());
        let (ab, bc, ac) = (distance(&a, &b, x).unwrap(), distance(&b, &c, x).unwrap(), distance(&a, &c, x).unwrap());
        assert!(ac <= ab + bc + 1e-12);
    }
}
