use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

/// A Dirichlet character stored as a phase table: `chi(n) = e(phase[n mod q] / order)`,
/// `None` where `gcd(n, q) > 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    q: u64,
    order: u64,
    index: usize,
    phase: Vec<Option<u64>>,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Position in [`characters_mod`]'s output; 0 is principal.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Common denominator of the phases (the exponent of `(Z/q)^*`).
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn phase(&self, n: u64) -> Option<u64> {
        self.phase[(n % self.q) as usize]
    }

    pub fn value(&self, n: u64) -> Complex64 {
        match self.phase(n) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => root_of_unity(k, self.order),
        }
    }

    pub fn is_principal(&self) -> bool {
        self.phase.iter().all(|p| matches!(p, None | Some(0)))
    }

    pub fn is_real(&self) -> bool {
        self.phase.iter().all(|p| match p {
            None => true,
            Some(k) => (2 * k) % self.order == 0,
        })
    }

    /// Smallest `d | q` such that `chi(a) = 1` whenever `a = 1 mod d` and `gcd(a, q) = 1`.
    pub fn conductor(&self) -> u64 {
        let q = self.q;
        (1..=q)
            .filter(|d| q % d == 0)
            .find(|&d| (1..=q).step_by(d as usize).all(|a| matches!(self.phase(a), None | Some(0))))
            .unwrap_or(q)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.q
    }
}

fn root_of_unity(k: u64, order: u64) -> Complex64 {
    let k = k % order;
    // exact values at multiples of a quarter turn
    if k == 0 {
        Complex64::new(1.0, 0.0)
    } else if 2 * k == order {
        Complex64::new(-1.0, 0.0)
    } else if 4 * k == order {
        Complex64::new(0.0, 1.0)
    } else if 4 * k == 3 * order {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::from_polar(1.0, TAU * k as f64 / order as f64)
    }
}

fn factorize(mut q: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut e = 0;
            while q % p == 0 {
                q /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if q > 1 {
        out.push((q, 1));
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// A cyclic factor of `(Z/q)^*`: discrete logs of every residue mod `pe`.
struct Cyclic {
    pe: u64,
    order: u64,
    log: Vec<u64>,
}

fn components(p: u64, e: u32) -> Vec<Cyclic> {
    let pe = p.pow(e);
    if p == 2 {
        if e == 1 {
            return Vec::new();
        }
        // (Z/2^e)^* = <-1> x <5>
        let ord5 = if e == 2 { 1 } else { 1u64 << (e - 2) };
        let mut sign = vec![u64::MAX; pe as usize];
        let mut five = vec![u64::MAX; pe as usize];
        let mut x = 1u64;
        for b in 0..ord5 {
            sign[x as usize] = 0;
            five[x as usize] = b;
            let y = (pe - x) % pe;
            sign[y as usize] = 1;
            five[y as usize] = b;
            x = x * 5 % pe;
        }
        let mut out = vec![Cyclic { pe, order: 2, log: sign }];
        if ord5 > 1 {
            out.push(Cyclic { pe, order: ord5, log: five });
        }
        return out;
    }
    let phi = pe / p * (p - 1);
    let prime_divs: Vec<u64> = factorize(phi).into_iter().map(|(r, _)| r).collect();
    let g = (2..pe)
        .find(|&g| g % p != 0 && prime_divs.iter().all(|&r| pow_mod(g, phi / r, pe) != 1))
        .unwrap_or(1);
    let mut table = vec![u64::MAX; pe as usize];
    let mut x = 1u64;
    for k in 0..phi {
        table[x as usize] = k;
        x = x * g % pe;
    }
    vec![Cyclic { pe, order: phi, log: table }]
}

/// All `phi(q)` characters modulo `q`, principal first, then in
/// lexicographic order of their exponent vectors on the cyclic factors.
///
/// Cost is `O(q phi(q))` time and memory.
pub fn characters_mod(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q == 0 || q > 1_000_000 {
        return Err(Error::InvalidArgument(format!("modulus {q} outside 1..=10^6")));
    }
    let facs: Vec<Cyclic> = factorize(q).into_iter().flat_map(|(p, e)| components(p, e)).collect();
    let order = facs.iter().fold(1u64, |l, c| l.lcm(&c.order));
    // discrete-log vectors of every residue
    let logs: Vec<Option<Vec<u64>>> = (0..q)
        .map(|n| {
            if n.gcd(&q) != 1 {
                return None;
            }
            Some(facs.iter().map(|c| c.log[(n % c.pe) as usize]).collect())
        })
        .collect();
    let mut exps = vec![0u64; facs.len()];
    let mut out = Vec::new();
    loop {
        let phase = logs
            .iter()
            .map(|l| {
                l.as_ref().map(|v| {
                    v.iter()
                        .zip(&exps)
                        .zip(&facs)
                        .fold(0u64, |acc, ((&lg, &k), c)| (acc + (lg * k % c.order) * (order / c.order)) % order)
                })
            })
            .collect();
        out.push(DirichletCharacter { q, order, index: out.len(), phase });
        // odometer over exponent vectors, last factor fastest
        let mut i = facs.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < facs[i].order {
                break;
            }
            exps[i] = 0;
        }
    }
}
