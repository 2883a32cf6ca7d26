//! Exact truncated power series for fixed-point statistics of the shuffle.
//!
//! Everything here works over `BigRational`, truncated at a `z`-order of at
//! most [`Z_MAX`].  A [`BivariateSeries`] stores, for each power of `z`, a
//! polynomial in the marker variable `u`; the structural invariant is that
//! the `u`-degree never exceeds the `z`-degree (every `u` is contributed by
//! at least one vertex).
//!
//! The species-level ingredients:
//!
//! * `tree_series` — `t(z) = Σ n^(n-1) z^n / n!`, the rooted labeled trees,
//!   which satisfies `t = z·exp(t)`;
//! * `z_over_tree` — `z/t = 1 - Σ (n-1)^(n-1) z^n / n!`;
//! * `word_series` — all shuffle words: `Σ n^n z^n / n!` (every entry free,
//!   which also equals `1/(1-t)`) or `1/(1-z)` (entries forming a
//!   permutation);
//! * `connected_series` — a kernel `T(z, u)` whose coefficients of `u^k` for
//!   `k >= 1` count connected words by fixed points of the induced
//!   permutation (its `u`-free part is immaterial: only differences in `u`
//!   enter the law below).
//!
//! The exact fixed-point law at degree `n` is
//! `q_n(u) = [z^n](W·exp(T(z,u) - T(z,1))) / [z^n]W` with `W` the word
//! series, computed by `fixed_point_poly`.  As `n` grows these laws converge
//! to the limit computed by `limit_distribution`, whose probability
//! generating function is `exp(a·u² + b·u + c)` with `a + b + c = 0`.

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::{Error, Mode, Result};

/// Exact scalar for series coefficients.
pub type Rat = num_rational::BigRational;

/// Largest supported `z`-order.
pub const Z_MAX: usize = 60;

fn rat_int(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n!` as an exact rational.
fn factorial(n: usize) -> Rat {
    Rat::from_integer((1..=n as u64).map(BigInt::from).product::<BigInt>())
}

/// `base^exp` as an exact rational, with `0^0 = 1`.
fn int_pow(base: usize, exp: usize) -> Rat {
    Rat::from_integer(Pow::pow(&BigInt::from(base as u64), exp as u32))
}

/// Converts an exact rational to the nearest `f64`, safe for values whose
/// magnitude fits in a double (numerator and denominator may be huge).
pub fn rat_to_f64(r: &Rat) -> f64 {
    let scaled = (r.numer() << 64u32) / r.denom();
    let approx = scaled.to_f64().unwrap_or(f64::INFINITY);
    approx / 18446744073709551616.0
}

/// Dense polynomial in the marker variable `u` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    coeffs: Vec<Rat>,
}

impl UPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    /// A constant polynomial.
    pub fn constant(c: Rat) -> Self {
        let mut p = UPoly { coeffs: vec![c] };
        p.trim();
        p
    }

    /// Builds from coefficients `coeffs[k] = [u^k]`.
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = UPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    /// True when all coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; zero for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient of `u^k`.
    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    /// Sum of two polynomials.
    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = vec![Rat::zero(); self.coeffs.len().max(other.coeffs.len())];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        UPoly::from_coeffs(coeffs)
    }

    /// Difference of two polynomials.
    pub fn sub(&self, other: &Self) -> Self {
        let mut coeffs = vec![Rat::zero(); self.coeffs.len().max(other.coeffs.len())];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] -= c;
        }
        UPoly::from_coeffs(coeffs)
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UPoly::from_coeffs(coeffs)
    }

    /// The polynomial scaled by a rational.
    pub fn scale(&self, c: &Rat) -> Self {
        UPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Evaluation at a rational point.
    pub fn eval(&self, u: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    /// All coefficients, lowest degree first.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }
}

/// Power series in `z` truncated at a fixed order, with `UPoly` coefficients
/// obeying `u`-degree ≤ `z`-degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariateSeries {
    order: usize,
    coeffs: Vec<UPoly>,
}

impl BivariateSeries {
    /// The zero series truncated at `order`.
    pub fn zeros(order: usize) -> Result<Self> {
        if order > Z_MAX {
            return Err(Error::CapExceeded {
                what: "series order",
                requested: order,
                cap: Z_MAX,
            });
        }
        Ok(BivariateSeries {
            order,
            coeffs: vec![UPoly::zero(); order + 1],
        })
    }

    /// A univariate series from `z`-coefficients (missing entries are zero).
    pub fn from_univariate(order: usize, coeffs: &[Rat]) -> Result<Self> {
        let mut s = BivariateSeries::zeros(order)?;
        for (i, c) in coeffs.iter().enumerate().take(order + 1) {
            s.coeffs[i] = UPoly::constant(c.clone());
        }
        Ok(s)
    }

    /// Truncation order (inclusive).
    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of `z^i`.
    pub fn coeff(&self, i: usize) -> &UPoly {
        &self.coeffs[i]
    }

    /// Adds `c · z^i u^j` in place.
    pub fn add_term(&mut self, zi: usize, uj: usize, c: Rat) {
        assert!(zi <= self.order, "term beyond truncation order");
        assert!(uj <= zi, "u-degree must not exceed z-degree");
        let mut coeffs = vec![Rat::zero(); uj + 1];
        coeffs[uj] = c;
        self.coeffs[zi] = self.coeffs[zi].add(&UPoly::from_coeffs(coeffs));
    }

    fn check_profile(&self) -> Result<()> {
        for (i, p) in self.coeffs.iter().enumerate() {
            if !p.is_zero() && p.degree() > i {
                return Err(Error::Truncation(format!(
                    "u-degree {} exceeds z-degree {i}",
                    p.degree()
                )));
            }
        }
        Ok(())
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::InvalidOperand(format!(
                "series orders differ: {} vs {}",
                self.order, other.order
            )));
        }
        Ok(())
    }

    /// Sum of two series of equal order.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(BivariateSeries {
            order: self.order,
            coeffs,
        })
    }

    /// Difference of two series of equal order.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect();
        Ok(BivariateSeries {
            order: self.order,
            coeffs,
        })
    }

    /// Product of two series of equal order, truncated at that order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let mut coeffs = vec![UPoly::zero(); self.order + 1];
        for i in 0..=self.order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(self.order - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
            }
        }
        let out = BivariateSeries {
            order: self.order,
            coeffs,
        };
        out.check_profile()?;
        Ok(out)
    }

    /// The series scaled by a rational.
    pub fn scale(&self, c: &Rat) -> Self {
        BivariateSeries {
            order: self.order,
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Multiplies every term by `u^k`; requires the `u`-degree headroom that
    /// the structural invariant demands.
    pub fn mul_u_power(&self, k: usize) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.order + 1);
        for p in &self.coeffs {
            if p.is_zero() {
                coeffs.push(UPoly::zero());
                continue;
            }
            let mut shifted = vec![Rat::zero(); k];
            shifted.extend(p.coeffs().iter().cloned());
            coeffs.push(UPoly::from_coeffs(shifted));
        }
        let out = BivariateSeries {
            order: self.order,
            coeffs,
        };
        out.check_profile()?;
        Ok(out)
    }

    /// Exponential of a series with zero constant term, via the derivative
    /// recurrence `k·g_k = Σ_j j·f_j·g_(k-j)`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidOperand(
                "series exponential requires a zero constant term".into(),
            ));
        }
        self.check_profile()?;
        let mut g: Vec<UPoly> = Vec::with_capacity(self.order + 1);
        g.push(UPoly::constant(Rat::one()));
        for k in 1..=self.order {
            let mut acc = UPoly::zero();
            for j in 1..=k {
                if self.coeffs[j].is_zero() || g[k - j].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[j].mul(&g[k - j]).scale(&rat_int(j as u64)));
            }
            g.push(acc.scale(&rat_int(k as u64).recip()));
        }
        let out = BivariateSeries {
            order: self.order,
            coeffs: g,
        };
        out.check_profile()?;
        Ok(out)
    }

    /// Substitutes a rational for `u`, returning the `z`-coefficients.
    pub fn eval_u(&self, u: &Rat) -> Vec<Rat> {
        self.coeffs.iter().map(|p| p.eval(u)).collect()
    }

    /// Substitutes a rational for `u`, returning a univariate series.
    pub fn eval_u_series(&self, u: &Rat) -> Self {
        BivariateSeries {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|p| UPoly::constant(p.eval(u)))
                .collect(),
        }
    }
}

/// EGF of rooted labeled trees: `Σ n^(n-1) z^n / n!`.
pub fn tree_series(order: usize) -> Result<BivariateSeries> {
    let coeffs: Vec<Rat> = (0..=order)
        .map(|n| {
            if n == 0 {
                Rat::zero()
            } else {
                int_pow(n, n - 1) / factorial(n)
            }
        })
        .collect();
    BivariateSeries::from_univariate(order, &coeffs)
}

/// The series `z / t(z) = 1 - Σ (n-1)^(n-1) z^n / n!`.
pub fn z_over_tree(order: usize) -> Result<BivariateSeries> {
    let coeffs: Vec<Rat> = (0..=order)
        .map(|n| {
            if n == 0 {
                Rat::one()
            } else {
                -(int_pow(n - 1, n - 1) / factorial(n))
            }
        })
        .collect();
    BivariateSeries::from_univariate(order, &coeffs)
}

/// The series `Σ z^n / n!`.
pub fn exp_z(order: usize) -> Result<BivariateSeries> {
    let coeffs: Vec<Rat> = (0..=order).map(|n| factorial(n).recip()).collect();
    BivariateSeries::from_univariate(order, &coeffs)
}

/// EGF of all shuffle words of the mode: `Σ n^n z^n / n!` when every entry
/// is free (which equals `1/(1 - t)`), or `1/(1 - z)` when the word must be
/// a permutation.
pub fn word_series(mode: Mode, order: usize) -> Result<BivariateSeries> {
    let coeffs: Vec<Rat> = match mode {
        Mode::Uniform => (0..=order).map(|n| int_pow(n, n) / factorial(n)).collect(),
        Mode::Permutation => (0..=order).map(|_| Rat::one()).collect(),
    };
    BivariateSeries::from_univariate(order, &coeffs)
}

/// The connected kernel `T(z, u)`: for `k >= 1` and `n >= 3`, the
/// coefficient `n! · [z^n u^k]` counts connected words of degree `n` whose
/// induced permutation has `k` fixed points.  Its `u`-free part is chosen
/// for a compact closed form; only `u`-differences of this kernel are used.
pub fn connected_series(mode: Mode, order: usize) -> Result<BivariateSeries> {
    let mut conn = BivariateSeries::zeros(order)?;
    if order >= 1 {
        conn.add_term(1, 1, Rat::one());
    }
    if order >= 2 {
        conn.add_term(2, 2, Rat::new(BigInt::from(1), BigInt::from(2)));
    }
    // The u^1-graded remainder: a univariate series with no constant or
    // linear headroom (its first two coefficients cancel exactly).
    let mut inner: Vec<Rat> = match mode {
        Mode::Uniform => {
            // 2 - 2·(z/t) - 2z - z²
            let zt = z_over_tree(order)?;
            let mut v: Vec<Rat> = (0..=order)
                .map(|n| -(zt.coeff(n).coeff(0) * rat_int(2)))
                .collect();
            v[0] += rat_int(2);
            if order >= 1 {
                v[1] -= rat_int(2);
            }
            if order >= 2 {
                v[2] -= Rat::one();
            }
            v
        }
        Mode::Permutation => {
            // 2·(e^z - 1 - z - z²/2)
            let ez = exp_z(order)?;
            let mut v: Vec<Rat> = (0..=order)
                .map(|n| ez.coeff(n).coeff(0) * rat_int(2))
                .collect();
            v[0] -= rat_int(2);
            if order >= 1 {
                v[1] -= rat_int(2);
            }
            if order >= 2 {
                v[2] -= Rat::one();
            }
            v
        }
    };
    for (n, c) in inner.iter().enumerate().take(3.min(order + 1)) {
        assert!(c.is_zero(), "connected kernel must vanish below z^3, got z^{n}");
    }
    inner.truncate(order + 1);
    let tail = BivariateSeries::from_univariate(order, &inner)?.mul_u_power(1)?;
    conn.add(&tail)
}

/// Exact fixed-point laws for every degree `0..=n_max` of the mode, from a
/// single series expansion. Entry `n` is the probability generating
/// polynomial of the number of fixed points at degree `n`.
pub fn fixed_point_table(mode: Mode, n_max: usize) -> Result<Vec<UPoly>> {
    let words = word_series(mode, n_max)?;
    let conn = connected_series(mode, n_max)?;
    let at_one = conn.eval_u_series(&Rat::one());
    let delta = conn.sub(&at_one)?;
    let expd = delta.exp()?;
    let prod = words.mul(&expd)?;
    let mut table = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let norm = words.coeff(n).coeff(0);
        debug_assert!(norm.is_positive());
        table.push(prod.coeff(n).scale(&norm.recip()));
    }
    Ok(table)
}

/// Exact probability generating polynomial of the number of fixed points of
/// the induced permutation at degree `n`.
pub fn fixed_point_poly(n: usize, mode: Mode) -> Result<UPoly> {
    let mut table = fixed_point_table(mode, n)?;
    Ok(table.pop().expect("table has entries 0..=n"))
}

/// The limiting fixed-point law: probabilities `p_k` for `k <= k_max`, with
/// probability generating function `exp(a u² + b u + c)`.
#[derive(Clone, Debug)]
pub struct LimitDistribution {
    /// Which word model the limit describes.
    pub mode: Mode,
    /// Quadratic exponent coefficients `(a, b, c)`; they sum to zero.
    pub quad: (f64, f64, f64),
    /// Probabilities `p_0 ..= p_k_max`.
    pub pk: Vec<f64>,
}

impl LimitDistribution {
    /// Mean number of fixed points, `2a + b`.
    pub fn mean(&self) -> f64 {
        2.0 * self.quad.0 + self.quad.1
    }

    /// Probability mass not covered by the tabulated `p_k`.
    pub fn tail_deficit(&self) -> f64 {
        1.0 - self.pk.iter().sum::<f64>()
    }
}

/// Computes the limiting fixed-point law of the mode.
pub fn limit_distribution(mode: Mode, k_max: usize) -> LimitDistribution {
    let e = std::f64::consts::E;
    let (a, b, c) = match mode {
        Mode::Uniform => {
            let a = 0.5 * (-2.0f64).exp();
            let b = 2.0 - 3.0 / e - (-2.0f64).exp();
            (a, b, -(a + b))
        }
        Mode::Permutation => {
            let a = 0.5;
            let b = 2.0 * e - 4.0;
            (a, b, -(a + b))
        }
    };
    let mut factorials: Vec<f64> = Vec::with_capacity(k_max + 1);
    let mut f = 1.0;
    for k in 0..=k_max {
        if k > 0 {
            f *= k as f64;
        }
        factorials.push(f);
    }
    let scale = c.exp();
    let mut pk = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut sum = 0.0;
        let mut i = 0;
        while 2 * i <= k {
            let j = k - 2 * i;
            sum += a.powi(i as i32) * b.powi(j as i32) / (factorials[i] * factorials[j]);
            i += 1;
        }
        pk.push(scale * sum);
    }
    LimitDistribution {
        mode,
        quad: (a, b, c),
        pk,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn tree_identities_hold() {
        let order = 20;
        let t = tree_series(order).unwrap();
        // t = z · exp(t)
        let z = BivariateSeries::from_univariate(order, &[Rat::zero(), Rat::one()]).unwrap();
        let lhs = z.mul(&t.exp().unwrap()).unwrap();
        assert_eq!(lhs, t);
        // t · (z/t) = z
        assert_eq!(t.mul(&z_over_tree(order).unwrap()).unwrap(), z);
        // (1/(1-t)) · (1-t) = 1
        let geo = word_series(Mode::Uniform, order).unwrap();
        let one = BivariateSeries::from_univariate(order, &[Rat::one()]).unwrap();
        let one_minus_t = one.sub(&t).unwrap();
        assert_eq!(geo.mul(&one_minus_t).unwrap(), one);
    }

    #[test]
    fn spot_coefficients() {
        let t = tree_series(6).unwrap();
        assert_eq!(t.coeff(3).coeff(0), rat(3, 2));
        let w = word_series(Mode::Uniform, 6).unwrap();
        assert_eq!(w.coeff(4).coeff(0), rat(32, 3));
        let wp = word_series(Mode::Permutation, 6).unwrap();
        assert_eq!(wp.coeff(4).coeff(0), Rat::one());
    }

    #[test]
    fn connected_kernel_linear_coefficients() {
        let order = 10;
        let t = connected_series(Mode::Uniform, order).unwrap();
        for n in 3..=order {
            let expected = int_pow(n - 1, n - 1) * rat(2, 1) / factorial(n);
            assert_eq!(t.coeff(n).coeff(1), expected, "uniform z^{n} u^1");
        }
        let tp = connected_series(Mode::Permutation, order).unwrap();
        for n in 3..=order {
            assert_eq!(tp.coeff(n).coeff(1), rat(2, 1) / factorial(n), "perm z^{n} u^1");
        }
        // Degree-2 terms carry the double fixed point of the 2-ring.
        assert_eq!(t.coeff(2).coeff(2), rat(1, 2));
        assert_eq!(tp.coeff(2).coeff(2), rat(1, 2));
    }

    #[test]
    fn fixed_point_polynomials_small_degrees() {
        // Degree 1: the single word has one fixed point.
        let q1 = fixed_point_poly(1, Mode::Uniform).unwrap();
        assert_eq!(q1.coeff(0), Rat::zero());
        assert_eq!(q1.coeff(1), Rat::one());
        // Degree 2, all words: half derangements, half identity.
        let q2 = fixed_point_poly(2, Mode::Uniform).unwrap();
        assert_eq!(q2.coeff(0), rat(1, 2));
        assert_eq!(q2.coeff(1), Rat::zero());
        assert_eq!(q2.coeff(2), rat(1, 2));
        // Degree 2, permutation words: only the identity arises.
        let q2p = fixed_point_poly(2, Mode::Permutation).unwrap();
        assert_eq!(q2p.coeff(0), Rat::zero());
        assert_eq!(q2p.coeff(2), Rat::one());
    }

    #[test]
    fn fixed_point_polynomials_are_distributions() {
        for mode in [Mode::Uniform, Mode::Permutation] {
            for n in 0..=8usize {
                let q = fixed_point_poly(n, mode).unwrap();
                let total: Rat = q.coeffs().iter().cloned().sum();
                assert_eq!(total, Rat::one(), "mass at degree {n} ({})", mode.as_str());
                assert!(
                    q.coeffs().iter().all(|c| !c.is_negative()),
                    "negative probability at degree {n}"
                );
                assert!(q.degree() <= n);
            }
        }
    }

    #[test]
    fn limit_distribution_values() {
        let lim = limit_distribution(Mode::Uniform, 60);
        let (a, b, c) = lim.quad;
        assert!((a + b + c).abs() < 1e-12);
        assert!((lim.pk[0] - 0.43662).abs() < 1e-4, "p0 = {}", lim.pk[0]);
        let mean_expected = 2.0 - 3.0 / std::f64::consts::E;
        assert!((lim.mean() - mean_expected).abs() < 1e-12);
        assert!(lim.tail_deficit().abs() < 1e-9);
        assert!(lim.pk.iter().all(|p| *p >= 0.0));

        let limp = limit_distribution(Mode::Permutation, 60);
        let (a, b, c) = limp.quad;
        assert!((a + b + c).abs() < 1e-12);
        assert!((limp.pk[0] - 0.14424).abs() < 1e-4, "p0 = {}", limp.pk[0]);
        assert!(limp.tail_deficit().abs() < 1e-9);
    }

    #[test]
    fn conversion_and_error_paths() {
        assert_eq!(rat_to_f64(&rat(1, 2)), 0.5);
        assert!((rat_to_f64(&rat(-7, 3)) + 7.0 / 3.0).abs() < 1e-15);
        let huge = Rat::new(
            Pow::pow(&BigInt::from(48u32), 48u32) + BigInt::from(1),
            Pow::pow(&BigInt::from(48u32), 48u32),
        );
        assert!((rat_to_f64(&huge) - 1.0).abs() < 1e-12);

        assert!(matches!(
            BivariateSeries::zeros(Z_MAX + 1),
            Err(Error::CapExceeded { .. })
        ));
        let one = BivariateSeries::from_univariate(4, &[Rat::one()]).unwrap();
        assert!(one.exp().is_err());
        assert!(one.mul_u_power(1).is_err());
        let z = BivariateSeries::from_univariate(3, &[Rat::zero(), Rat::one()]).unwrap();
        assert!(z.add(&one).is_err(), "mismatched orders must be rejected");
    }
}
