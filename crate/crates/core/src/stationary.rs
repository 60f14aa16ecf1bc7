//! Exact time-independent solutions built from Jacobi elliptic functions.
//!
//! For `lambda < 0` the profile is `u = sqrt(2) k1 sn(k2 xi, k4)`, for
//! `lambda > 0` it is `u = sqrt(2) q1 cn(q2 xi + K(q4), q4)`. Dirichlet
//! conditions force `k2 = 2 n K(k4) / pi`, which together with the amplitude
//! relations leaves one transcendental equation for the modulus per branch `n`.

use crate::elliptic::EllipticModulus;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::spectral::{self, GridFunction, ModeCoefficients};

/// Distance kept from the ends of the modulus search interval.
const BRACKET_MARGIN: f64 = 1e-10;
/// Bracket width at which the modulus solve stops.
const ROOT_WIDTH: f64 = 1e-13;
/// Grid intervals used for projections and energy quadrature of a branch.
const BRANCH_QUADRATURE_INTERVALS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchKind {
    /// `sn` profile, `lambda < 0`.
    Sn,
    /// `cn` profile, `lambda > 0`.
    Cn,
}

impl BranchKind {
    pub fn for_lambda<T: Real>(lambda: T) -> Option<Self> {
        if lambda < T::zero() {
            Some(Self::Sn)
        } else if lambda > T::zero() {
            Some(Self::Cn)
        } else {
            None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sn => "sn",
            Self::Cn => "cn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchCount {
    Finite(usize),
    Unbounded,
}

/// One exact stationary solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryBranch<T> {
    pub lambda: T,
    /// The integer `n` of the matching condition; the profile has `n` lobes.
    pub branch_n: usize,
    pub kind: BranchKind,
    pub modulus: T,
    pub wavenumber: T,
    /// Signed so that the first nonzero Fourier coefficient is positive.
    pub amplitude: T,
    pub phase: T,
}

impl<T: Real> StationaryBranch<T> {
    fn elliptic(&self) -> EllipticModulus<T> {
        EllipticModulus::new(self.modulus).expect("branch modulus validated at construction")
    }

    /// Dimensionless field `u(xi) = sqrt(ell) f(x)`.
    pub fn evaluate(&self, xi: T) -> T {
        let (sn, cn, _) = self.elliptic().sn_cn_dn(self.wavenumber * xi + self.phase);
        let shape = match self.kind {
            BranchKind::Sn => sn,
            BranchKind::Cn => cn,
        };
        T::SQRT_2() * self.amplitude * shape
    }

    /// `du/dxi`.
    pub fn derivative(&self, xi: T) -> T {
        let (sn, cn, dn) = self.elliptic().sn_cn_dn(self.wavenumber * xi + self.phase);
        let shape = match self.kind {
            BranchKind::Sn => cn * dn,
            BranchKind::Cn => -sn * dn,
        };
        T::SQRT_2() * self.amplitude * self.wavenumber * shape
    }

    pub fn sample(&self, points: usize) -> Result<GridFunction<T>> {
        GridFunction::from_fn(points, |xi| self.evaluate(xi))
    }
}

/// Exact solution together with its projection and energy.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution<T> {
    /// One-based position in ascending `|energy|` order.
    pub label: usize,
    pub branch: StationaryBranch<T>,
    pub coefficients: ModeCoefficients<T>,
    pub energy: T,
}

/// Number of nontrivial solutions: `n` runs over integers with `n^2 < |lambda|`
/// for `lambda < 0`; unbounded for `lambda > 0`; none at `lambda = 0`.
pub fn count_branches<T: Real>(lambda: T) -> BranchCount {
    if lambda > T::zero() {
        return BranchCount::Unbounded;
    }
    let target = lambda.abs();
    let mut n = 0usize;
    while T::from_usize_lossy((n + 1) * (n + 1)) < target {
        n += 1;
    }
    BranchCount::Finite(n)
}

fn branch_exists<T: Real>(lambda: T, n: usize) -> bool {
    n >= 1
        && match count_branches(lambda) {
            BranchCount::Unbounded => true,
            BranchCount::Finite(c) => n <= c,
        }
}

/// Solve the matching condition for the elliptic modulus of branch `n`.
///
/// `lambda < 0`: `sqrt(|lambda| / (1 + k^2)) = 2 n K(k) / pi` on `(0, 1)`.
/// `lambda > 0`: `sqrt(lambda / (2 q^2 - 1)) = 2 n K(q) / pi` on `(1/sqrt 2, 1)`.
pub fn solve_modulus<T: Real>(lambda: T, branch_n: usize) -> Result<T> {
    let kind = BranchKind::for_lambda(lambda).ok_or_else(|| {
        Error::Domain("lambda = 0 admits only the trivial stationary solution".into())
    })?;
    if !branch_exists(lambda, branch_n) {
        return Err(Error::NoSuchBranch {
            lambda: lambda.to_f64().unwrap_or(f64::NAN),
            branch: branch_n,
        });
    }
    let margin = T::lit(BRACKET_MARGIN).max(T::lit(8.0) * T::epsilon());
    let width = T::lit(ROOT_WIDTH).max(T::lit(4.0) * T::epsilon());
    let abs_lambda = lambda.abs();
    let n = T::from_usize_lossy(branch_n);
    let two_n_over_pi = T::lit(2.0) * n / T::PI();

    match kind {
        BranchKind::Sn => {
            let g = |k: T| -> Result<T> {
                let kk = EllipticModulus::new(k)?.quarter_period();
                Ok((abs_lambda / (T::one() + k * k)).sqrt() - two_n_over_pi * kk)
            };
            bracketed_root(g, margin, T::one() - margin, width)
        }
        BranchKind::Cn => {
            let g = |q: T| -> Result<T> {
                let kk = EllipticModulus::new(q)?.quarter_period();
                Ok((abs_lambda / (T::lit(2.0) * q * q - T::one())).sqrt() - two_n_over_pi * kk)
            };
            bracketed_root(g, T::FRAC_1_SQRT_2() + margin, T::one() - margin, width)
        }
    }
}

/// Bisection interleaved with secant (regula falsi) steps. Returns the
/// bracket end with the smaller residual once the bracket is `width` wide.
fn bracketed_root<T: Real>(
    f: impl Fn(T) -> Result<T>,
    mut lo: T,
    mut hi: T,
    width: T,
) -> Result<T> {
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if (f_lo > T::zero()) == (f_hi > T::zero()) {
        return Err(Error::NoBracket {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    let two = T::lit(2.0);
    for _ in 0..400 {
        if hi - lo <= width {
            break;
        }
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let mid = (lo + hi) / two;
        let trial = if secant > lo && secant < hi {
            secant
        } else {
            mid
        };
        for x in [trial, mid] {
            if !(x > lo && x < hi) {
                continue;
            }
            let fx = f(x)?;
            if fx == T::zero() {
                return Ok(x);
            }
            if (fx > T::zero()) == (f_lo > T::zero()) {
                lo = x;
                f_lo = fx;
            } else {
                hi = x;
                f_hi = fx;
            }
        }
    }
    Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi })
}

/// Construct the exact stationary branch `n` for `lambda`.
pub fn build_branch<T: Real>(lambda: T, branch_n: usize) -> Result<StationaryBranch<T>> {
    let modulus = solve_modulus(lambda, branch_n)?;
    let m = EllipticModulus::new(modulus)?;
    let kk = m.quarter_period();
    let wavenumber = T::lit(2.0) * T::from_usize_lossy(branch_n) * kk / T::PI();
    let abs_lambda = lambda.abs();
    let branch = if lambda < T::zero() {
        StationaryBranch {
            lambda,
            branch_n,
            kind: BranchKind::Sn,
            modulus,
            wavenumber,
            amplitude: (abs_lambda * modulus * modulus / (T::one() + modulus * modulus)).sqrt(),
            phase: T::zero(),
        }
    } else {
        // cn(xi q2 + K) starts negative, so the amplitude sign is flipped to
        // make the leading Fourier coefficient positive
        StationaryBranch {
            lambda,
            branch_n,
            kind: BranchKind::Cn,
            modulus,
            wavenumber,
            amplitude: -wavenumber * modulus,
            phase: kk,
        }
    };
    Ok(branch)
}

/// Projection of the branch profile onto modes `1..=nmax`.
pub fn branch_coefficients<T: Real>(
    b: &StationaryBranch<T>,
    nmax: usize,
) -> Result<ModeCoefficients<T>> {
    let mut intervals = BRANCH_QUADRATURE_INTERVALS.max(spectral::POINTS_PER_MODE * nmax);
    intervals += intervals % 2;
    spectral::project(&b.sample(intervals + 1)?, nmax)
}

/// Dimensionless energy `ell^2 H / (pi^2 a^2)` of the static profile:
/// `(1/pi) int [u'^2/2 + lambda u^2/2 - sgn(lambda) u^4/4] dxi - sgn(lambda) lambda^2/4`.
pub fn branch_energy<T: Real>(b: &StationaryBranch<T>) -> T {
    let g = BRANCH_QUADRATURE_INTERVALS;
    let s = b.lambda.sign0();
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let density: Vec<T> = (0..=g)
        .map(|j| {
            let xi = spectral::grid_xi(j, g);
            let u = b.evaluate(xi);
            let du = b.derivative(xi);
            half * du * du + half * b.lambda * u * u - quarter * s * u * u * u * u
        })
        .collect();
    spectral::simpson_mean(&density) - quarter * s * b.lambda * b.lambda
}

/// Up to `max_count` nontrivial stationary solutions ordered by ascending
/// `|energy|` (ties by branch index), each projected onto `nmax` modes.
pub fn enumerate_solutions<T: Real>(
    lambda: T,
    max_count: usize,
    nmax: usize,
) -> Result<Vec<StationarySolution<T>>> {
    let candidates = match count_branches(lambda) {
        BranchCount::Finite(c) => c,
        // energies grow with the lobe count; a few spare candidates guard
        // against a low branch being outranked
        BranchCount::Unbounded => max_count + 3,
    };
    let mut found = Vec::with_capacity(candidates);
    for n in 1..=candidates {
        let branch = match build_branch(lambda, n) {
            Ok(b) => b,
            // very steep branches need k closer to 1 than the kernel accepts
            Err(Error::NoBracket { .. }) | Err(Error::Domain(_)) if n > 1 => break,
            Err(e) => return Err(e),
        };
        let energy = branch_energy(&branch);
        found.push((branch, energy));
    }
    found.sort_by(|(ba, ea), (bb, eb)| {
        ea.abs()
            .partial_cmp(&eb.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(ba.branch_n.cmp(&bb.branch_n))
    });
    found.truncate(max_count);
    found
        .into_iter()
        .enumerate()
        .map(|(i, (branch, energy))| {
            Ok(StationarySolution {
                label: i + 1,
                coefficients: branch_coefficients(&branch, nmax)?,
                branch,
                energy,
            })
        })
        .collect()
}
