//! Galerkin residual of a truncated state: how far `u^(N)` is from solving
//! the full field equation.
//!
//! The cube of an `N`-mode field lives in modes `1..=3N`. The truncated
//! equations keep modes `<= N`, so the residual is exactly the discarded tail
//!
//! `R(xi) = | sum_{q=N+1}^{3N} F_q sqrt(2) sin(q xi) |`,
//! `F_q = sum_{n,m,p <= N} D_qnmp A_n A_m A_p`.
//!
//! It does not depend on `lambda`.

use crate::error::{Error, Result};
use crate::num::Real;
use crate::spectral::{self, CouplingTable, GridFunction, POINTS_PER_MODE};

/// Default grid intervals per retained mode.
pub const DEFAULT_INTERVALS_PER_MODE: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T> {
    pub local: GridFunction<T>,
    pub total: T,
    pub tau: T,
    pub n_modes: usize,
}

/// Coefficients of the discarded cubic harmonics, indexed `q = N+1..=3N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualTail<T> {
    n_modes: usize,
    coeffs: Vec<T>,
}

impl<T: Real> ResidualTail<T> {
    pub fn new(positions: &[T]) -> Self {
        let n = positions.len();
        let table = CouplingTable::with_output(n, 3 * n);
        let full = table.cubic(positions);
        Self {
            n_modes: n,
            coeffs: full[n..].to_vec(),
        }
    }

    /// `(q, F_q)` pairs of the tail.
    pub fn modes(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.n_modes + 1 + i, c))
    }

    /// Signed tail at one point.
    pub fn evaluate(&self, xi: T) -> T {
        self.modes()
            .map(|(q, c)| c * T::SQRT_2() * (T::from_usize_lossy(q) * xi).sin())
            .sum()
    }

    /// Antiderivative of the signed tail.
    fn primitive(&self, xi: T) -> T {
        self.modes()
            .map(|(q, c)| {
                let qq = T::from_usize_lossy(q);
                -c * T::SQRT_2() * (qq * xi).cos() / qq
            })
            .sum()
    }

    fn sample(&self, intervals: usize) -> Result<GridFunction<T>> {
        let mut padded = vec![T::zero(); self.n_modes];
        padded.extend_from_slice(&self.coeffs);
        spectral::synthesize(&padded, intervals + 1)
    }

    /// `(1/pi) int_0^pi |tail| dxi`, integrating the tail exactly between its
    /// sign changes. Roots are bracketed on `samples` and refined by bisection.
    fn mean_abs(&self, samples: &GridFunction<T>) -> T {
        let v = samples.values();
        let mut cuts = vec![T::zero()];
        for j in 0..v.len() - 1 {
            let (a, b) = (v[j], v[j + 1]);
            if a == T::zero() {
                if j > 0 {
                    cuts.push(samples.xi(j));
                }
            } else if b != T::zero() && (a > T::zero()) != (b > T::zero()) {
                cuts.push(self.refine_root(samples.xi(j), samples.xi(j + 1), a));
            }
        }
        cuts.push(T::PI());
        let total = cuts
            .windows(2)
            .map(|w| (self.primitive(w[1]) - self.primitive(w[0])).abs())
            .sum::<T>();
        total / T::PI()
    }

    fn refine_root(&self, mut lo: T, mut hi: T, f_lo: T) -> T {
        let positive = f_lo > T::zero();
        for _ in 0..80 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.evaluate(mid) > T::zero()) == positive {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) / T::lit(2.0)
    }
}

fn check_resolution(n_modes: usize, intervals: usize) -> Result<()> {
    let required = POINTS_PER_MODE * 3 * n_modes;
    if intervals < required {
        return Err(Error::Resolution {
            intervals,
            required,
        });
    }
    Ok(())
}

/// Local residual `R^(N)` sampled on `intervals + 1` points.
pub fn local_residual<T: Real>(positions: &[T], intervals: usize) -> Result<GridFunction<T>> {
    check_resolution(positions.len(), intervals)?;
    let tail = ResidualTail::new(positions).sample(intervals)?;
    GridFunction::new(tail.into_values().into_iter().map(|x| x.abs()).collect())
}

/// Total residual `(1/pi) int_0^pi R^(N) dxi`.
pub fn total_residual<T: Real>(positions: &[T], intervals: usize) -> Result<T> {
    check_resolution(positions.len(), intervals)?;
    let tail = ResidualTail::new(positions);
    Ok(tail.mean_abs(&tail.sample(intervals)?))
}

/// Local and total residual of a state.
pub fn residual_report<T: Real>(
    state: &crate::dynamics::StateVector<T>,
    intervals: usize,
) -> Result<ResidualReport<T>> {
    let n = state.n_modes();
    check_resolution(n, intervals)?;
    let tail = ResidualTail::new(&state.positions);
    let signed = tail.sample(intervals)?;
    let total = tail.mean_abs(&signed);
    let local = GridFunction::new(signed.into_values().into_iter().map(|x| x.abs()).collect())?;
    Ok(ResidualReport {
        local,
        total,
        tau: state.tau,
        n_modes: n,
    })
}
