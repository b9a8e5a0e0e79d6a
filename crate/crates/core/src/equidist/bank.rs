use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use super::obstruction::{character_candidates, DEFAULT_CANDIDATE_CAP};
use crate::error::{Error, Result};
use crate::nilgroup::{HorizontalCharacter, MalcevPresentation};
use crate::qmc;

/// Quadrature points for bump means (4 shifts of `2^14`).
pub const QMC_POINTS: u64 = 1 << 16;
pub const QMC_SEED: u64 = 0x5eed_0b4e;
const QMC_SHIFTS: usize = 4;
/// Half-width of the raised-cosine bumps.
pub const BUMP_WIDTH: f64 = 0.125;
const BUMP_CENTERS: [f64; 4] = [0.125, 0.375, 0.625, 0.875];

#[derive(Clone, Debug, PartialEq)]
pub enum TestKind {
    /// `x -> e(a . x)`.
    Character(HorizontalCharacter),
    /// `x -> (1 + cos(pi u / w)) / 2` for `u = ||x_coord - center||_{R/Z} < w`, else 0.
    Bump { coord: usize, center: f64, width: f64 },
    /// `x -> c`.
    Constant(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub kind: TestKind,
    /// `int F` over the fundamental domain.
    pub mean: f64,
    /// Quadrature error estimate for `mean`; zero when known exactly.
    pub mean_err: f64,
    /// Sup norm bound used to normalise deviations.
    pub norm: f64,
}

impl TestFunction {
    pub fn character(eta: HorizontalCharacter) -> Self {
        let mean = if eta.is_trivial() { 1.0 } else { 0.0 };
        TestFunction { kind: TestKind::Character(eta), mean, mean_err: 0.0, norm: 1.0 }
    }

    pub fn constant(c: f64) -> Self {
        TestFunction { kind: TestKind::Constant(c), mean: c, mean_err: 0.0, norm: c.abs().max(1.0) }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        match &self.kind {
            TestKind::Character(eta) => {
                let t: f64 = eta.a.iter().zip(x).map(|(&a, &v)| a as f64 * v).sum();
                Complex64::from_polar(1.0, TAU * (t - t.floor()))
            }
            TestKind::Bump { coord, center, width } => Complex64::new(bump(x[*coord], *center, *width), 0.0),
            TestKind::Constant(c) => Complex64::new(*c, 0.0),
        }
    }

    pub fn deviation(&self, mean: Complex64) -> f64 {
        (mean - self.mean).norm() / self.norm
    }

    pub fn label(&self) -> String {
        match &self.kind {
            TestKind::Character(eta) => format!("e{eta}"),
            TestKind::Bump { coord, center, width } => format!("bump(x{coord}; {center}, {width})"),
            TestKind::Constant(c) => format!("const({c})"),
        }
    }
}

fn bump(v: f64, center: f64, width: f64) -> f64 {
    let d = (v - center).rem_euclid(1.0);
    let u = d.min(1.0 - d);
    if u >= width {
        0.0
    } else {
        0.5 * (1.0 + (PI * u / width).cos())
    }
}

/// A list of test functions with known means.
#[derive(Clone, Debug)]
pub struct Bank {
    pres: Arc<MalcevPresentation>,
    functions: Vec<TestFunction>,
    /// Whether the character enumeration hit its cap.
    pub truncated: bool,
}

impl Bank {
    pub fn new(pres: Arc<MalcevPresentation>, functions: Vec<TestFunction>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::InvalidArgument("empty test-function bank".into()));
        }
        for f in &functions {
            match &f.kind {
                TestKind::Character(eta) => pres.check_character(eta)?,
                TestKind::Bump { coord, .. } if *coord >= pres.m() => {
                    return Err(Error::DimensionMismatch { expected: pres.m(), got: coord + 1 })
                }
                _ => {}
            }
        }
        Ok(Bank { pres, functions, truncated: false })
    }

    /// Characters `e(eta)` for nonzero `|eta| <= bound`, one per `+-eta` pair.
    pub fn characters(pres: Arc<MalcevPresentation>, bound: u64) -> Result<Self> {
        let (cands, truncated) = character_candidates(&pres, bound, DEFAULT_CANDIDATE_CAP);
        let functions: Vec<TestFunction> = cands.into_iter().map(TestFunction::character).collect();
        let mut b = Bank::new(pres, functions)?;
        b.truncated = truncated;
        Ok(b)
    }

    /// [`Bank::characters`] followed by raised-cosine bumps on each coordinate,
    /// whose means are computed by quasi-Monte Carlo.
    pub fn standard(pres: Arc<MalcevPresentation>, bound: u64) -> Result<Self> {
        let mut b = Bank::characters(pres.clone(), bound)?;
        let m = pres.m();
        for coord in 0..m {
            for &center in &BUMP_CENTERS {
                let est = qmc::integrate(
                    |x| bump(x[coord], center, BUMP_WIDTH),
                    m,
                    QMC_POINTS / QMC_SHIFTS as u64,
                    QMC_SHIFTS,
                    QMC_SEED,
                );
                b.functions.push(TestFunction {
                    kind: TestKind::Bump { coord, center, width: BUMP_WIDTH },
                    mean: est.mean,
                    mean_err: est.err,
                    norm: 1.0,
                });
            }
        }
        Ok(b)
    }

    pub fn presentation(&self) -> &Arc<MalcevPresentation> {
        &self.pres
    }

    pub fn functions(&self) -> &[TestFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn push(&mut self, f: TestFunction) -> Result<()> {
        if let TestKind::Character(eta) = &f.kind {
            self.pres.check_character(eta)?;
        }
        self.functions.push(f);
        Ok(())
    }
}
