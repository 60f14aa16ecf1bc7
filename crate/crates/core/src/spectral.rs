//! Dirichlet sine basis on the dimensionless interval `xi in [0, pi]`.
//!
//! The stored field is `u = sqrt(ell) phi` and the modes are
//! `sqrt(2) sin(n xi)`, orthonormal under `(1/pi) int_0^pi dxi`.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::num::Real;

/// Minimum number of grid intervals per retained mode for projection.
pub const POINTS_PER_MODE: usize = 8;

/// One-based index of a Dirichlet mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex(usize);

impl ModeIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("mode indices start at 1".into()));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// Mode amplitudes `A_1..A_N`; amplitudes beyond `N` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients<T>(Vec<T>);

impl<T: Real> ModeCoefficients<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape("at least one mode is required".into()));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![T::zero(); n.max(1)])
    }

    pub fn n_modes(&self) -> usize {
        self.0.len()
    }

    /// Amplitude of mode `n` (one-based), zero past the truncation.
    pub fn mode(&self, n: usize) -> T {
        if n == 0 {
            return T::zero();
        }
        self.0.get(n - 1).copied().unwrap_or_else(T::zero)
    }

    /// Zero-pad or truncate to `n` modes.
    pub fn resized(&self, n: usize) -> Self {
        let mut v = self.0.clone();
        v.resize(n.max(1), T::zero());
        Self(v)
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    /// Field value `sum_n A_n sqrt(2) sin(n xi)` at one point.
    pub fn evaluate(&self, xi: T) -> T {
        let s2 = T::SQRT_2();
        self.0
            .iter()
            .enumerate()
            .map(|(i, &a)| a * s2 * (T::from_usize_lossy(i + 1) * xi).sin())
            .sum()
    }
}

impl<T> Deref for ModeCoefficients<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// Field samples on the uniform grid `xi_j = j pi / G`, `j = 0..=G`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Shape(format!(
                "a grid needs at least 2 points, got {}",
                values.len()
            )));
        }
        Ok(Self { values })
    }

    pub fn from_fn(points: usize, f: impl Fn(T) -> T) -> Result<Self> {
        if points < 2 {
            return Err(Error::Shape(format!(
                "a grid needs at least 2 points, got {points}"
            )));
        }
        let g = points - 1;
        Ok(Self {
            values: (0..points).map(|j| f(grid_xi(j, g))).collect(),
        })
    }

    pub fn points(&self) -> usize {
        self.values.len()
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn xi(&self, j: usize) -> T {
        grid_xi(j, self.intervals())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(j, &v)| (self.xi(j), v))
    }

    /// `(1/pi) int_0^pi u dxi` by composite Simpson.
    pub fn mean(&self) -> T {
        simpson_mean(&self.values)
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }
}

/// `xi_j = j pi / g`, with the right endpoint exactly `pi`.
pub fn grid_xi<T: Real>(j: usize, g: usize) -> T {
    if j == g {
        T::PI()
    } else {
        T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(g)
    }
}

/// Mean value over `[0, pi]` of uniformly spaced samples (endpoints
/// included). Composite Simpson; an odd interval count closes with the 3/8 rule.
pub fn simpson_mean<T: Real>(values: &[T]) -> T {
    let g = values.len().saturating_sub(1);
    if g == 0 {
        return values.first().copied().unwrap_or_else(T::zero);
    }
    let h = T::PI() / T::from_usize_lossy(g);
    let integral = match g {
        1 => h * (values[0] + values[1]) / T::lit(2.0),
        _ => {
            let simpson_end = if g.is_multiple_of(2) { g } else { g - 3 };
            let mut s = T::zero();
            let mut j = 0;
            while j + 2 <= simpson_end {
                s = s + values[j] + T::lit(4.0) * values[j + 1] + values[j + 2];
                j += 2;
            }
            let mut total = h * s / T::lit(3.0);
            if simpson_end < g {
                let v = &values[simpson_end..];
                total = total
                    + T::lit(3.0) * h / T::lit(8.0)
                        * (v[0] + T::lit(3.0) * v[1] + T::lit(3.0) * v[2] + v[3]);
            }
            total
        }
    };
    integral / T::PI()
}

/// Dimensionless mode `sqrt(ell) phi_n = sqrt(2) sin(n xi)`.
pub fn mode_value<T: Real>(n: ModeIndex, xi: T) -> Result<T> {
    if !(xi >= T::zero() && xi <= T::PI()) {
        return Err(Error::Domain(format!("xi = {xi} lies outside [0, pi]")));
    }
    Ok(T::SQRT_2() * (T::from_usize_lossy(n.get()) * xi).sin())
}

/// Twice the coupling `D_nmpq`, exact in integers.
fn coupling_twice(n: usize, m: usize, p: usize, q: usize) -> i32 {
    let delta = |a: usize, b: usize| i32::from(a == b);
    let diff = n.abs_diff(m);
    let sum = n + m;
    let pq_diff = p.abs_diff(q);
    let pq_sum = p + q;
    // weight 1 / (ell N_j^2) is 1 for j = 0 and 1/2 otherwise; stored doubled
    let w = |j: usize| if j == 0 { 2 } else { 1 };
    w(diff) * (delta(diff, pq_diff) - delta(diff, pq_sum))
        - w(sum) * (delta(sum, pq_diff) - delta(sum, pq_sum))
}

/// Quartic coupling `D_nmpq = ell int_0^ell phi_n phi_m phi_p phi_q dx`
/// (one-based indices).
pub fn coupling<T: Real>(n: usize, m: usize, p: usize, q: usize) -> T {
    assert!(
        n >= 1 && m >= 1 && p >= 1 && q >= 1,
        "mode indices start at 1"
    );
    T::lit(f64::from(coupling_twice(n, m, p, q)) / 2.0)
}

/// Every `q >= 1` for which `D_nmpq` can be nonzero given `n, m, p`.
fn coupled_partners(n: usize, m: usize, p: usize) -> impl Iterator<Item = usize> {
    let diff = n.abs_diff(m) as isize;
    let sum = (n + m) as isize;
    let p = p as isize;
    let mut cand = [p + diff, p - diff, diff - p, p + sum, p - sum, sum - p];
    cand.sort_unstable();
    let mut out = [0usize; 6];
    let mut len = 0;
    for c in cand {
        if c >= 1 && (len == 0 || out[len - 1] != c as usize) {
            out[len] = c as usize;
            len += 1;
        }
    }
    out.into_iter().take(len)
}

/// Sparse cache of the nonzero couplings `D_{q m p r}` for output modes
/// `q <= out_modes` and input modes `m, p, r <= in_modes`.
#[derive(Debug, Clone)]
pub struct CouplingTable<T> {
    in_modes: usize,
    rows: Vec<Vec<(u32, u32, u32, T)>>,
}

impl<T: Real> CouplingTable<T> {
    /// Square table for an `n_modes` truncation.
    pub fn new(n_modes: usize) -> Self {
        Self::with_output(n_modes, n_modes)
    }

    pub fn with_output(in_modes: usize, out_modes: usize) -> Self {
        let rows = (1..=out_modes)
            .map(|q| {
                let mut row = Vec::new();
                for m in 1..=in_modes {
                    for p in 1..=in_modes {
                        for r in coupled_partners(q, m, p).filter(|&r| r <= in_modes) {
                            let d = coupling_twice(q, m, p, r);
                            if d != 0 {
                                row.push((
                                    m as u32,
                                    p as u32,
                                    r as u32,
                                    T::lit(f64::from(d) / 2.0),
                                ));
                            }
                        }
                    }
                }
                row
            })
            .collect();
        Self { in_modes, rows }
    }

    pub fn in_modes(&self) -> usize {
        self.in_modes
    }

    pub fn out_modes(&self) -> usize {
        self.rows.len()
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `F_q = sum_{m,p,r} D_{q m p r} A_m A_p A_r` for every output mode.
    pub fn cubic(&self, a: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows.len()];
        self.cubic_into(a, &mut out);
        out
    }

    pub fn cubic_into(&self, a: &[T], out: &mut [T]) {
        debug_assert!(a.len() >= self.in_modes);
        for (row, slot) in self.rows.iter().zip(out.iter_mut()) {
            let mut acc = T::zero();
            for &(m, p, r, d) in row {
                acc = acc + d * a[m as usize - 1] * a[p as usize - 1] * a[r as usize - 1];
            }
            *slot = acc;
        }
    }

    /// `sum_{q,m,p,r} D_{q m p r} A_q A_m A_p A_r` (square tables only).
    pub fn quartic(&self, a: &[T]) -> T {
        self.cubic(a).iter().zip(a).map(|(&f, &aq)| f * aq).sum()
    }

    /// `J_{q m} = sum_{p,r} D_{q m p r} A_p A_r`, row-major `out_modes x in_modes`.
    pub fn quadratic_form(&self, a: &[T]) -> Vec<T> {
        let cols = self.in_modes;
        let mut out = vec![T::zero(); self.rows.len() * cols];
        for (qi, row) in self.rows.iter().enumerate() {
            for &(m, p, r, d) in row {
                let idx = qi * cols + m as usize - 1;
                out[idx] = out[idx] + d * a[p as usize - 1] * a[r as usize - 1];
            }
        }
        out
    }
}

/// `A_n = (1/pi) int_0^pi u sqrt(2) sin(n xi) dxi` for `n = 1..=n_modes`.
pub fn project<T: Real>(u: &GridFunction<T>, n_modes: usize) -> Result<ModeCoefficients<T>> {
    if n_modes == 0 {
        return Err(Error::Shape("at least one mode is required".into()));
    }
    let required = POINTS_PER_MODE * n_modes;
    if u.intervals() < required {
        return Err(Error::Resolution {
            intervals: u.intervals(),
            required,
        });
    }
    let s2 = T::SQRT_2();
    let mut scratch = vec![T::zero(); u.points()];
    let coeffs = (1..=n_modes)
        .map(|n| {
            let nn = T::from_usize_lossy(n);
            for (j, slot) in scratch.iter_mut().enumerate() {
                *slot = u.values[j] * s2 * (nn * u.xi(j)).sin();
            }
            simpson_mean(&scratch)
        })
        .collect();
    ModeCoefficients::new(coeffs)
}

/// Samples `sum_n A_n sqrt(2) sin(n xi)` on `points` uniform points of `[0, pi]`.
/// Both endpoint values are exactly zero.
pub fn synthesize<T: Real>(a: &[T], points: usize) -> Result<GridFunction<T>> {
    if points < 2 {
        return Err(Error::Shape(format!(
            "a grid needs at least 2 points, got {points}"
        )));
    }
    let g = points - 1;
    let s2 = T::SQRT_2();
    let values = (0..points)
        .map(|j| {
            if j == 0 || j == g {
                return T::zero();
            }
            let xi: T = grid_xi(j, g);
            a.iter()
                .enumerate()
                .map(|(i, &an)| an * s2 * (T::from_usize_lossy(i + 1) * xi).sin())
                .sum()
        })
        .collect();
    Ok(GridFunction { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::trapezoid_0_pi;
    use std::f64::consts::{PI, SQRT_2};

    fn d(n: usize, m: usize, p: usize, q: usize) -> f64 {
        coupling(n, m, p, q)
    }

    /// `ell int phi_n phi_m phi_p phi_q dx = (4/pi) int_0^pi prod sin dxi`.
    fn coupling_by_quadrature(n: usize, m: usize, p: usize, q: usize) -> f64 {
        let f = |x: f64| {
            (n as f64 * x).sin()
                * (m as f64 * x).sin()
                * (p as f64 * x).sin()
                * (q as f64 * x).sin()
        };
        4.0 / PI * trapezoid_0_pi(&f, 256)
    }

    #[test]
    fn mode_value_examples() {
        let one = ModeIndex::new(1).unwrap();
        assert!((mode_value(one, PI / 2.0).unwrap() - SQRT_2).abs() < 1e-15);
        assert_eq!(mode_value(ModeIndex::new(3).unwrap(), 0.0).unwrap(), 0.0);
        let v = mode_value(ModeIndex::new(2).unwrap(), PI / 4.0).unwrap();
        assert!((v - SQRT_2).abs() < 1e-15);
        assert!(mode_value(one, -0.1).is_err());
        assert!(mode_value(one, 3.2).is_err());
        assert!(ModeIndex::new(0).is_err());
    }

    #[test]
    fn modes_are_orthonormal() {
        for n in 1..=6 {
            for m in 1..=6 {
                let f = |x: f64| 2.0 * (n as f64 * x).sin() * (m as f64 * x).sin();
                let ip = trapezoid_0_pi(&f, 64) / PI;
                let expected = if n == m { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn coupling_examples() {
        assert_eq!(d(1, 1, 1, 1), 1.5);
        assert_eq!(d(3, 1, 1, 1), -0.5);
        assert_eq!(d(1, 2, 3, 4), 0.5);
        assert_eq!(d(1, 1, 3, 3), 1.0);
        assert!((coupling_by_quadrature(1, 2, 3, 4) - 0.5).abs() < 1e-12);
        assert!((coupling_by_quadrature(1, 1, 3, 3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coupling_is_totally_symmetric_and_half_integer() {
        for n in 1..=7 {
            for m in 1..=7 {
                for p in 1..=7 {
                    for q in 1..=7 {
                        let base = d(n, m, p, q);
                        assert_eq!((2.0 * base).fract(), 0.0);
                        let idx = [n, m, p, q];
                        for perm in permutations4() {
                            let v = d(idx[perm[0]], idx[perm[1]], idx[perm[2]], idx[perm[3]]);
                            assert_eq!(v, base);
                        }
                    }
                }
            }
        }
    }

    fn permutations4() -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for e in 0..4 {
                        let p = [a, b, c, e];
                        let mut seen = [false; 4];
                        p.iter().for_each(|&i| seen[i] = true);
                        if seen.iter().all(|&s| s) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        assert_eq!(out.len(), 24);
        out
    }

    #[test]
    fn selection_rule() {
        let signs = [-1i64, 1];
        for n in 1..=8usize {
            for m in 1..=8usize {
                for p in 1..=8usize {
                    for q in 1..=8usize {
                        let mut allowed = false;
                        for &a in &signs {
                            for &b in &signs {
                                for &c in &signs {
                                    let s = n as i64 + a * m as i64 + b * p as i64 + c * q as i64;
                                    allowed |= s == 0;
                                }
                            }
                        }
                        if !allowed {
                            assert_eq!(d(n, m, p, q), 0.0);
                            assert!(coupling_by_quadrature(n, m, p, q).abs() < 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn table_matches_dense_evaluation() {
        let n = 7;
        let table = CouplingTable::<f64>::new(n);
        let a: Vec<f64> = (0..n).map(|i| 0.3 * i as f64 - 0.7).collect();
        let f = table.cubic(&a);
        for q in 1..=n {
            let mut dense = 0.0;
            for m in 1..=n {
                for p in 1..=n {
                    for r in 1..=n {
                        dense += d(q, m, p, r) * a[m - 1] * a[p - 1] * a[r - 1];
                    }
                }
            }
            assert!((f[q - 1] - dense).abs() < 1e-12);
        }
        let j = table.quadratic_form(&a);
        for q in 1..=n {
            for m in 1..=n {
                let mut dense = 0.0;
                for p in 1..=n {
                    for r in 1..=n {
                        dense += d(q, m, p, r) * a[p - 1] * a[r - 1];
                    }
                }
                assert!((j[(q - 1) * n + m - 1] - dense).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rectangular_table_reaches_the_cubic_harmonics() {
        let table = CouplingTable::<f64>::with_output(2, 6);
        let f = table.cubic(&[1.0, 0.0]);
        assert_eq!(f, vec![1.5, 0.0, -0.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn synthesize_examples() {
        let g = synthesize(&[1.0], 5).unwrap();
        let expected = [0.0, 1.0, SQRT_2, 1.0, 0.0];
        for (v, e) in g.values().iter().zip(expected) {
            assert!((v - e).abs() < 1e-15);
        }
        let z = synthesize(&[0.0; 4], 9).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        assert!(synthesize(&[1.0], 1).is_err());
    }

    #[test]
    fn project_examples() {
        let u = GridFunction::from_fn(257, |x: f64| SQRT_2 * (2.0 * x).sin()).unwrap();
        let a = project(&u, 4).unwrap();
        for (i, &v) in a.iter().enumerate() {
            let e = if i == 1 { 1.0 } else { 0.0 };
            assert!((v - e).abs() < 1e-10);
        }
        let z = GridFunction::from_fn(65, |_| 0.0).unwrap();
        assert!(project(&z, 4).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn project_enforces_resolution() {
        let u = GridFunction::from_fn(32, |x: f64| x.sin()).unwrap();
        assert_eq!(
            project(&u, 4),
            Err(Error::Resolution {
                intervals: 31,
                required: 32
            })
        );
    }

    #[test]
    fn simpson_handles_odd_interval_counts() {
        for g in [1usize, 2, 3, 5, 7, 64, 99] {
            let v: Vec<f64> = (0..=g).map(|j| grid_xi::<f64>(j, g).powi(2)).collect();
            let exact = PI * PI / 3.0;
            let tol = if g == 1 { 10.0 } else { 1e-12 };
            assert!((simpson_mean(&v) - exact).abs() < tol, "g={g}");
        }
    }

    #[test]
    fn endpoints_vanish_exactly() {
        let a = [0.4, -1.3, 2.2, 0.01];
        for points in [2, 3, 17, 1000] {
            let g = synthesize(&a, points).unwrap();
            assert_eq!(g.values()[0], 0.0);
            assert_eq!(*g.values().last().unwrap(), 0.0);
        }
    }

    proptest::proptest! {
        #[test]
        fn project_inverts_synthesize(a in proptest::collection::vec(-3.0f64..3.0, 12)) {
            let g = synthesize(&a, 8 * 12 + 1).unwrap();
            let back = project(&g, 12).unwrap();
            for (x, y) in a.iter().zip(back.iter()) {
                proptest::prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
