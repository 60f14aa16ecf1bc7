//! Complete elliptic integral of the first kind and the Jacobi elliptic
//! functions `sn`, `cn`, `dn` for real argument and modulus `0 <= k < 1`.
//!
//! Both are computed from the arithmetic-geometric mean of `1` and
//! `k' = sqrt(1 - k^2)`; the Jacobi functions use the descending Landen
//! recursion on the amplitude.

use crate::error::{Error, Result};
use crate::num::Real;

/// Largest modulus accepted; `K(k)` diverges logarithmically at `k = 1`.
pub const MAX_MODULUS: f64 = 1.0 - 1e-12;

const MAX_AGM_STEPS: usize = 64;

/// Modulus `k` together with its complement `k' = sqrt(1 - k^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus<T> {
    k: T,
    k_prime: T,
}

impl<T: Real> EllipticModulus<T> {
    pub fn new(k: T) -> Result<Self> {
        if !(k >= T::zero() && k <= T::lit(MAX_MODULUS)) {
            return Err(Error::Domain(format!(
                "elliptic modulus must lie in [0, 1 - 1e-12], got {k}"
            )));
        }
        // (1-k)(1+k) keeps k' accurate near k = 1
        let k_prime = ((T::one() - k) * (T::one() + k)).sqrt();
        Ok(Self { k, k_prime })
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn k_prime(&self) -> T {
        self.k_prime
    }

    /// Quarter period `K(k)`.
    pub fn quarter_period(&self) -> T {
        let (a, _) = agm(T::one(), self.k_prime);
        T::FRAC_PI_2() / a
    }

    /// `(sn, cn, dn)` at real argument `u`.
    pub fn sn_cn_dn(&self, u: T) -> (T, T, T) {
        if self.k == T::zero() {
            return (u.sin(), u.cos(), T::one());
        }

        // descending AGM, keeping the a_i and c_i for the backward sweep
        let mut a = [T::zero(); MAX_AGM_STEPS + 1];
        let mut c = [T::zero(); MAX_AGM_STEPS + 1];
        a[0] = T::one();
        c[0] = self.k;
        let mut b = self.k_prime;
        let mut steps = 0;
        while steps < MAX_AGM_STEPS && c[steps].abs() > T::epsilon() * a[steps] {
            let (ai, bi) = (a[steps], b);
            steps += 1;
            a[steps] = (ai + bi) / T::lit(2.0);
            c[steps] = (ai - bi) / T::lit(2.0);
            b = (ai * bi).sqrt();
        }

        // reduce onto one full period [-2K, 2K] before amplifying by 2^n
        let quarter = T::FRAC_PI_2() / a[steps];
        let period = T::lit(4.0) * quarter;
        let u = u - period * (u / period).round();

        let mut phi = T::lit(2.0).powi(steps as i32) * a[steps] * u;
        for i in (1..=steps).rev() {
            phi = (phi + (c[i] / a[i] * phi.sin()).asin()) / T::lit(2.0);
        }
        let sn = phi.sin();
        let cn = phi.cos();
        // dn^2 = k'^2 + k^2 cn^2 has no cancellation, unlike the amplitude
        // ratio cos(phi_0)/cos(phi_1 - phi_0), which is 0/0 at u = K
        let dn = (self.k_prime * self.k_prime + self.k * self.k * cn * cn).sqrt();
        (sn, cn, dn)
    }
}

fn agm<T: Real>(mut a: T, mut b: T) -> (T, usize) {
    let mut steps = 0;
    while steps < MAX_AGM_STEPS && (a - b).abs() > T::epsilon() * a {
        let next = (a + b) / T::lit(2.0);
        b = (a * b).sqrt();
        a = next;
        steps += 1;
    }
    (a, steps)
}

/// Complete elliptic integral of the first kind, `K(k) = pi / (2 agm(1, k'))`.
pub fn complete_k<T: Real>(k: T) -> Result<T> {
    Ok(EllipticModulus::new(k)?.quarter_period())
}

pub fn jacobi_sn<T: Real>(u: T, k: T) -> Result<T> {
    Ok(EllipticModulus::new(k)?.sn_cn_dn(u).0)
}

pub fn jacobi_cn<T: Real>(u: T, k: T) -> Result<T> {
    Ok(EllipticModulus::new(k)?.sn_cn_dn(u).1)
}

pub fn jacobi_dn<T: Real>(u: T, k: T) -> Result<T> {
    Ok(EllipticModulus::new(k)?.sn_cn_dn(u).2)
}
