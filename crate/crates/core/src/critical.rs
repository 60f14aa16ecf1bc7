//! Critical points of the truncated potential `U^(N)`.
//!
//! Multistart Newton on `grad U = 0`, Hessian classification, ordering by
//! `|U|`, and the `(A_1, A_3)` landscape of the three-mode system.

use nalgebra::{DMatrix, DVector, RealField};
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::TruncatedSystem;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::stationary;

/// Eigenvalues within this distance of zero make a point degenerate.
pub const EIGEN_TOLERANCE: f64 = 1e-8;
/// Stationarity required of every reported point, `max |force|`
/// (raised to `1e3 eps` for scalars coarser than `f64`).
pub const FORCE_TOLERANCE: f64 = 1e-10;
/// Points closer than this after sign normalization are merged
/// (raised to `10 sqrt(eps)` for scalars coarser than `f64`).
pub const MERGE_DISTANCE: f64 = 1e-6;
/// Hessians with a larger condition number get a descent step instead of Newton.
pub const SINGULAR_CONDITION: f64 = 1e12;
pub const DEFAULT_SEED: u64 = 20_240_607;
pub const DEFAULT_DRAWS: usize = 200;
pub const DEFAULT_SPREAD: f64 = 3.0;

const MAX_ITERATIONS: usize = 200;
const ESCAPE_RADIUS: f64 = 1e3;
const ZERO_COORDINATE: f64 = 1e-9;

/// Second-order character of a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Min,
    Max,
    Saddle,
    Degenerate,
}

impl Classification {
    pub fn from_eigenvalues<T: Real>(eigenvalues: &[T], tol: T) -> Self {
        if eigenvalues.iter().any(|e| Float::abs(*e) <= tol) {
            Self::Degenerate
        } else if eigenvalues.iter().all(|&e| e > T::zero()) {
            Self::Min
        } else if eigenvalues.iter().all(|&e| e < T::zero()) {
            Self::Max
        } else {
            Self::Saddle
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Min => "MIN",
            Self::Max => "MAX",
            Self::Saddle => "SADDLE",
            Self::Degenerate => "DEGENERATE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint<T> {
    pub positions: Vec<T>,
    /// `U^(N)` including the constant `-sgn(lambda) lambda^2 / 4`.
    pub u_value: T,
    pub classification: Classification,
    /// Ascending.
    pub hessian_eigenvalues: Vec<T>,
    /// One-based rank in ascending `|U|`; zero for the trivial point.
    pub label: usize,
}

/// Outcome of a multistart search.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSet<T> {
    /// Nontrivial points, labelled and sorted by `|U|`.
    pub points: Vec<CriticalPoint<T>>,
    /// The origin (always critical), classified.
    pub trivial: Option<CriticalPoint<T>>,
    pub seed: u64,
    pub starts: usize,
}

/// Multistart configuration; [`Default`] gives the reproducible standard run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalSearch {
    pub seed: u64,
    pub draws: usize,
    pub spread: f64,
}

impl Default for CriticalSearch {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            draws: DEFAULT_DRAWS,
            spread: DEFAULT_SPREAD,
        }
    }
}

impl CriticalSearch {
    /// Deterministic start set: the origin, single-mode seeds, truncated
    /// exact branches, then `draws` uniform vectors in `[-spread, spread]^N`.
    pub fn starts<T: Real>(&self, n_modes: usize, lambda: T) -> Vec<Vec<T>> {
        let mut starts = vec![vec![T::zero(); n_modes]];
        for n in 1..=n_modes {
            let s = single_mode_seed(n_modes, n, lambda);
            if s.iter().any(|&x| x != T::zero()) {
                starts.push(s);
            }
        }
        for n in 1..=n_modes {
            let Ok(branch) = stationary::build_branch(lambda, n) else {
                break;
            };
            if let Ok(c) = stationary::branch_coefficients(&branch, n_modes) {
                starts.push(c.into_vec());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.draws {
            starts.push(
                (0..n_modes)
                    .map(|_| T::lit(rng.gen_range(-self.spread..=self.spread)))
                    .collect(),
            );
        }
        starts
    }

    pub fn run<T: Real + RealField>(
        &self,
        n_modes: usize,
        lambda: T,
        max_points: usize,
    ) -> Result<CriticalSet<T>> {
        if n_modes == 0 {
            return Err(Error::Domain("a truncation keeps at least one mode".into()));
        }
        if !Float::is_finite(lambda) {
            return Err(Error::Domain(format!(
                "lambda must be finite, got {lambda}"
            )));
        }
        let sys = TruncatedSystem::new(n_modes, lambda);
        let starts = self.starts(n_modes, lambda);
        let merge = Float::max(
            T::lit(MERGE_DISTANCE),
            T::lit(10.0) * Float::sqrt(T::epsilon()),
        );

        let mut found: Vec<Vec<T>> = Vec::new();
        for start in &starts {
            let Some(mut a) = newton(&sys, start.clone()) else {
                continue;
            };
            normalize_sign(&mut a);
            let duplicate = found.iter().any(|b| distance(b, &a) <= merge);
            if !duplicate {
                found.push(a);
            }
        }

        let tol = T::lit(EIGEN_TOLERANCE);
        let zero = T::lit(ZERO_COORDINATE);
        let mut trivial = None;
        let mut points = Vec::new();
        for a in found {
            let p = describe(&sys, a, tol);
            if p.positions.iter().all(|x| Float::abs(*x) <= zero) {
                trivial = Some(p);
            } else {
                points.push(p);
            }
        }
        points.sort_by(|p, q| {
            Float::abs(p.u_value)
                .partial_cmp(&Float::abs(q.u_value))
                .expect("finite potential")
                .then_with(|| {
                    p.positions
                        .iter()
                        .zip(&q.positions)
                        .map(|(x, y)| y.partial_cmp(x).expect("finite coordinate"))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
        });
        points.truncate(max_points);
        for (i, p) in points.iter_mut().enumerate() {
            p.label = i + 1;
        }
        Ok(CriticalSet {
            points,
            trivial,
            seed: self.seed,
            starts: starts.len(),
        })
    }
}

fn describe<T: Real + RealField>(
    sys: &TruncatedSystem<T>,
    positions: Vec<T>,
    tol: T,
) -> CriticalPoint<T> {
    let n = sys.n_modes();
    let h = DMatrix::from_row_slice(n, n, &sys.hessian(&positions));
    let mut eig: Vec<T> = h.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalue"));
    CriticalPoint {
        u_value: sys.potential(&positions),
        classification: Classification::from_eigenvalues(&eig, tol),
        hessian_eigenvalues: eig,
        positions,
        label: 0,
    }
}

fn force_tolerance<T: Real>() -> T {
    Float::max(T::lit(FORCE_TOLERANCE), T::lit(1e3) * T::epsilon())
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter()
        .fold(T::zero(), |m, x| Float::max(m, Float::abs(*x)))
}

fn norm_sq<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum()
}

fn distance<T: Real>(a: &[T], b: &[T]) -> T {
    Float::sqrt(a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>())
}

/// Damped Newton on `force(A) = 0` with backtracking on `|force|^2`.
/// Returns `None` when the iteration escapes, stalls or runs out of steps.
fn newton<T: Real + RealField>(sys: &TruncatedSystem<T>, mut a: Vec<T>) -> Option<Vec<T>> {
    let n = sys.n_modes();
    let target = force_tolerance::<T>();
    let escape = T::lit(ESCAPE_RADIUS);
    let max_condition = T::lit(SINGULAR_CONDITION);
    let half = T::lit(0.5);
    let armijo = T::lit(1e-4);
    let min_step = T::lit(1e-12);

    let mut f = sys.force(&a);
    for _ in 0..MAX_ITERATIONS {
        if max_abs(&f) <= target {
            return Some(a);
        }
        let h = DMatrix::from_row_slice(n, n, &sys.hessian(&a));
        let eig = h.clone().symmetric_eigen();
        let (lo, hi) =
            eig.eigenvalues
                .iter()
                .fold((<T as Float>::max_value(), T::zero()), |(lo, hi), e| {
                    let e = Float::abs(*e);
                    (Float::min(lo, e), Float::max(hi, e))
                });
        let fv = DVector::from_column_slice(&f);
        // grad U = -f, so the Newton step solves H d = f; the merit
        // 1/2 |f|^2 has gradient -H f
        let direction: DVector<T> = if lo > T::zero() && hi / lo <= max_condition {
            let vt_f = eig.eigenvectors.transpose() * &fv;
            let scaled = vt_f.zip_map(&eig.eigenvalues, |x, e| x / e);
            &eig.eigenvectors * scaled
        } else {
            &h * &fv
        };
        let slope = -fv.dot(&(&h * &direction));
        let merit = norm_sq(&f) * half;

        let mut t = T::one();
        let mut accepted = false;
        while t >= min_step {
            let trial: Vec<T> = a
                .iter()
                .zip(direction.iter())
                .map(|(&x, &d)| x + t * d)
                .collect();
            let ft = sys.force(&trial);
            let mt = norm_sq(&ft) * half;
            if Float::is_finite(mt) && mt <= merit + armijo * t * slope {
                a = trial;
                f = ft;
                accepted = true;
                break;
            }
            t *= half;
        }
        if !accepted || max_abs(&a) > escape {
            return None;
        }
    }
    (max_abs(&f) <= target).then_some(a)
}

/// Flip the overall sign so the first coordinate with `|A_n| > 1e-9` is positive.
pub fn normalize_sign<T: Real>(a: &mut [T]) {
    let zero = T::lit(ZERO_COORDINATE);
    if let Some(&first) = a.iter().find(|x| Float::abs(**x) > zero) {
        if first < T::zero() {
            a.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Row-major Hessian of `U^(N)` at `a`, `N = a.len()`.
pub fn hessian<T: Real>(a: &[T], lambda: T) -> Vec<T> {
    TruncatedSystem::new(a.len(), lambda).hessian(a)
}

/// The one-mode stationary point `A_n = sqrt((2/3)(n^2+lambda) sgn(lambda))`
/// embedded in `n_modes` coordinates; the zero vector when it is not real.
///
/// For `n_modes >= 3n` this is only a start: mode `n` then feeds mode `3n`.
pub fn single_mode_seed<T: Real>(n_modes: usize, n: usize, lambda: T) -> Vec<T> {
    assert!((1..=n_modes).contains(&n), "mode {n} outside 1..={n_modes}");
    let mut a = vec![T::zero(); n_modes];
    let sq = T::lit(2.0 / 3.0) * (T::from_usize_lossy(n * n) + lambda) * lambda.sign0();
    if sq > T::zero() {
        a[n - 1] = Float::sqrt(sq);
    }
    a
}

/// [`CriticalSearch::run`] with the default configuration, nontrivial points only.
pub fn find_critical_points<T: Real + RealField>(
    n_modes: usize,
    lambda: T,
    max_points: usize,
) -> Result<Vec<CriticalPoint<T>>> {
    Ok(CriticalSearch::default()
        .run(n_modes, lambda, max_points)?
        .points)
}

/// `U^(3)` on a `resolution x resolution` grid in `(A_1, A_3)` with `A_2 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape<T> {
    pub a1: Vec<T>,
    pub a3: Vec<T>,
    /// `values[i * a3.len() + j] = U(a1[i], 0, a3[j])`.
    pub values: Vec<T>,
}

impl<T: Real> Landscape<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.a3.len() + j]
    }

    /// Grid indices of the smallest sampled value.
    pub fn argmin(&self) -> (usize, usize) {
        let k = (0..self.values.len())
            .min_by(|&x, &y| self.values[x].partial_cmp(&self.values[y]).expect("finite"))
            .expect("nonempty grid");
        (k / self.a3.len(), k % self.a3.len())
    }
}

fn axis<T: Real>((lo, hi): (T, T), resolution: usize) -> Vec<T> {
    let step = (hi - lo) / T::from_usize_lossy(resolution - 1);
    (0..resolution)
        .map(|i| {
            if i == resolution - 1 {
                hi
            } else {
                lo + step * T::from_usize_lossy(i)
            }
        })
        .collect()
}

pub fn landscape_grid<T: Real>(
    lambda: T,
    a1_range: (T, T),
    a3_range: (T, T),
    resolution: usize,
) -> Result<Landscape<T>> {
    if resolution < 2 {
        return Err(Error::Domain(format!(
            "landscape resolution must be at least 2, got {resolution}"
        )));
    }
    let finite = [lambda, a1_range.0, a1_range.1, a3_range.0, a3_range.1];
    if finite.iter().any(|x| !Float::is_finite(*x)) {
        return Err(Error::Domain(
            "landscape bounds and lambda must be finite".into(),
        ));
    }
    let sys = TruncatedSystem::new(3, lambda);
    let a1 = axis(a1_range, resolution);
    let a3 = axis(a3_range, resolution);
    let values = a1
        .iter()
        .flat_map(|&x| a3.iter().map(move |&z| (x, z)))
        .map(|(x, z)| sys.potential(&[x, T::zero(), z]))
        .collect();
    Ok(Landscape { a1, a3, values })
}
