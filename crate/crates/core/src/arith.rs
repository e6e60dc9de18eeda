//! Sieved arithmetic functions, fractional-part helpers and continued fractions.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalar::{from_u64, lit, Real};

/// Largest sieve bound accepted by [`build_tables`].
pub const MAX_SIEVE_LIMIT: usize = 100_000_000;

/// Tables of mu, Lambda, phi and the smallest prime factor on `1..=limit`.
///
/// Index 0 is unused and holds zeros. Immutable once built.
#[derive(Clone, Debug)]
pub struct ArithTables<T> {
    limit: usize,
    mobius: Vec<i8>,
    lambda: Vec<T>,
    phi: Vec<u32>,
    spf: Vec<u32>,
}

impl<T: Real> ArithTables<T> {
    pub fn limit(&self) -> usize {
        self.limit
    }

    #[inline]
    pub fn mobius(&self, n: usize) -> i8 {
        self.mobius[n]
    }

    #[inline]
    pub fn lambda(&self, n: usize) -> T {
        self.lambda[n]
    }

    #[inline]
    pub fn phi(&self, n: usize) -> u32 {
        self.phi[n]
    }

    #[inline]
    pub fn spf(&self, n: usize) -> u32 {
        self.spf[n]
    }

    pub fn mobius_slice(&self) -> &[i8] {
        &self.mobius
    }

    pub fn lambda_slice(&self) -> &[T] {
        &self.lambda
    }

    /// Fails with a capacity error when `n` lies beyond the sieve.
    pub fn check_covers(&self, n: usize) -> Result<()> {
        if n > self.limit {
            Err(Error::Capacity(format!(
                "n = {n} exceeds sieve limit {}",
                self.limit
            )))
        } else {
            Ok(())
        }
    }

    /// Prime factorisation of `n <= limit` as (prime, exponent) pairs.
    pub fn factorize(&self, mut n: usize) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }
}

/// Builds the arithmetic tables with a linear sieve.
pub fn build_tables<T: Real>(limit: usize) -> Result<ArithTables<T>> {
    build_tables_capped(limit, MAX_SIEVE_LIMIT)
}

/// [`build_tables`] with an explicit upper bound on `limit`.
pub fn build_tables_capped<T: Real>(limit: usize, cap: usize) -> Result<ArithTables<T>> {
    if limit == 0 {
        return Err(Error::Capacity("sieve limit must be at least 1".into()));
    }
    if limit > cap || limit > u32::MAX as usize {
        return Err(Error::Capacity(format!(
            "sieve limit {limit} exceeds configured cap {cap}"
        )));
    }
    let len = limit + 1;
    let mut spf = vec![0u32; len];
    let mut mobius = vec![0i8; len];
    let mut phi = vec![0u32; len];
    let mut primes: Vec<u32> = Vec::new();
    mobius[1] = 1;
    phi[1] = 1;
    spf[1] = 1;
    for i in 2..len {
        if spf[i] == 0 {
            spf[i] = i as u32;
            mobius[i] = -1;
            phi[i] = i as u32 - 1;
            primes.push(i as u32);
        }
        for &p in &primes {
            let m = i * p as usize;
            if p > spf[i] || m >= len {
                break;
            }
            spf[m] = p;
            if i % p as usize == 0 {
                mobius[m] = 0;
                phi[m] = phi[i] * p;
            } else {
                mobius[m] = -mobius[i];
                phi[m] = phi[i] * (p - 1);
            }
        }
    }

    // Lambda(n) = log p iff n / p is 1 or again a power of p.
    let mut lambda = vec![T::zero(); len];
    let mut prime_power_base = vec![0u32; len];
    for n in 2..len {
        let p = spf[n];
        let m = n / p as usize;
        if m == 1 || prime_power_base[m] == p {
            prime_power_base[n] = p;
            lambda[n] = from_u64::<T>(p as u64).ln();
        }
    }

    Ok(ArithTables {
        limit,
        mobius,
        lambda,
        phi,
        spf,
    })
}

/// Euler's totient by trial division, for arguments beyond a sieve.
pub fn totient(mut n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Prime factorisation by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Moebius function by trial division.
pub fn mobius_of(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// A reduced fraction a/q with 0 <= a < q and gcd(a, q) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    a: u64,
    q: u64,
}

impl RationalPoint {
    /// Accepts any integer numerator coprime to `q`; the residue is taken mod `q`.
    pub fn new(a: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("denominator must be positive".into()));
        }
        let g = a.unsigned_abs().gcd(&q);
        if g != 1 {
            return Err(Error::NotReduced { a, q });
        }
        let a = a.rem_euclid(q as i64) as u64;
        Ok(Self { a, q })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn to_real<T: Real>(&self) -> T {
        from_u64::<T>(self.a) / from_u64::<T>(self.q)
    }
}

impl std::fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.a, self.q)
    }
}

fn check_finite<T: Real>(x: T) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite argument {x:?}")))
    }
}

/// Fractional part without the finiteness check.
#[inline]
pub(crate) fn frac_unchecked<T: Real>(x: T) -> T {
    let f = x - x.floor();
    if f >= T::one() {
        // x is a tiny negative number; x - floor(x) rounded up to 1.
        T::one() - T::epsilon() / lit(2.0)
    } else {
        f
    }
}

/// `{x} = x - floor(x)`, always in `[0, 1)`.
pub fn frac<T: Real>(x: T) -> Result<T> {
    check_finite(x)?;
    Ok(frac_unchecked(x))
}

#[inline]
pub(crate) fn sawtooth_unchecked<T: Real>(x: T) -> T {
    let f = frac_unchecked(x);
    if f == T::zero() {
        T::zero()
    } else {
        f - lit(0.5)
    }
}

/// Saw-tooth `psi(x) = {x} - 1/2`, with `psi = 0` exactly where `{x} == 0`.
pub fn sawtooth<T: Real>(x: T) -> Result<T> {
    check_finite(x)?;
    Ok(sawtooth_unchecked(x))
}

/// Truncated cosine series `(1/2 pi^2) sum_{m <= terms} cos(2 pi m t) / m^2`.
pub fn sawtooth2<T: Real>(t: T, terms: u64) -> Result<T> {
    check_finite(t)?;
    if terms == 0 {
        return Err(Error::Domain("sawtooth2 needs at least one term".into()));
    }
    let t = frac_unchecked(t);
    let two_pi = T::PI() + T::PI();
    let s = crate::scalar::compensated_sum((1..=terms).map(|m| {
        let m = from_u64::<T>(m);
        (two_pi * m * t).cos() / (m * m)
    }));
    Ok(s / (lit::<T>(2.0) * T::PI() * T::PI()))
}

/// `sin(2 pi r / q)` with exact zeros and unit values at quarter turns, odd in `r`.
pub fn sin_2pi_frac<T: Real>(r: u64, q: u64) -> T {
    let r = r % q;
    // Fold into (-q/2, q/2] so that r and q - r give exact negatives.
    let (neg, r) = if 2 * r > q { (true, q - r) } else { (false, r) };
    let v = if r == 0 || 2 * r == q {
        T::zero()
    } else if 4 * r == q {
        T::one()
    } else {
        (lit::<T>(2.0) * T::PI() * from_u64::<T>(r) / from_u64::<T>(q)).sin()
    };
    if neg {
        -v
    } else {
        v
    }
}

/// `cos(2 pi r / q)` with exact values at quarter turns.
pub fn cos_2pi_frac<T: Real>(r: u64, q: u64) -> T {
    let r = r % q;
    let r = if 2 * r > q { q - r } else { r };
    if r == 0 {
        T::one()
    } else if 2 * r == q {
        -T::one()
    } else if 4 * r == q {
        T::zero()
    } else {
        (lit::<T>(2.0) * T::PI() * from_u64::<T>(r) / from_u64::<T>(q)).cos()
    }
}

/// Continued-fraction convergents of a real number.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergentList<T> {
    pub alpha: T,
    /// Pairs (p_m, q_m) with strictly increasing q_m.
    pub entries: Vec<(i64, u64)>,
}

impl<T: Real> ConvergentList<T> {
    pub fn denominators(&self) -> Vec<u64> {
        self.entries.iter().map(|&(_, q)| q).collect()
    }

    /// `sum 1/phi(q_m)` over the listed convergents.
    pub fn reciprocal_totient_sum(&self) -> T {
        crate::scalar::compensated_sum(
            self.entries
                .iter()
                .map(|&(_, q)| T::one() / from_u64::<T>(totient(q))),
        )
    }
}

fn from_i64_ratio<T: Real>(p: i64, q: u64) -> T {
    T::from_i64(p).unwrap_or_else(T::nan) / from_u64::<T>(q)
}

/// Convergents `p_m/q_m` of `alpha` with `q_m <= max_q`.
///
/// The zeroth convergent `floor(alpha)/1` is listed only when the expansion
/// stops there, so denominators start at `a_1` and increase strictly.
pub fn convergents<T: Real>(alpha: T, max_q: u64) -> Result<ConvergentList<T>> {
    check_finite(alpha)?;
    if max_q == 0 {
        return Err(Error::Domain("max_q must be at least 1".into()));
    }
    // Never track denominators that overflow the recurrence.
    let max_q = max_q.min(1 << 40);
    let a0 = alpha.floor();
    let mut x = alpha - a0;
    let a0 = a0
        .to_i64()
        .ok_or_else(|| Error::Domain(format!("alpha {alpha:?} too large")))?;
    let (mut p_prev, mut q_prev): (i64, u64) = (1, 0);
    let (mut p, mut q): (i64, u64) = (a0, 1);
    let mut entries = Vec::new();
    if x == T::zero() {
        entries.push((p, q));
        return Ok(ConvergentList { alpha, entries });
    }
    loop {
        let y = x.recip();
        // Snap quotients that rounding pushed just below an integer.
        let nearest = y.round();
        let a = if (y - nearest).abs() <= y * T::epsilon() * lit(64.0) {
            nearest
        } else {
            y.floor()
        };
        let Some(a_int) = a.to_u64() else { break };
        if a_int == 0 {
            break;
        }
        let Some(q_next) = a_int.checked_mul(q).and_then(|v| v.checked_add(q_prev)) else {
            break;
        };
        if q_next > max_q {
            break;
        }
        let p_next = (a_int as i64)
            .checked_mul(p)
            .and_then(|v| v.checked_add(p_prev));
        let Some(p_next) = p_next else { break };
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        entries.push((p, q));
        x = y - a;
        if x <= T::zero() || from_i64_ratio::<T>(p, q) == alpha {
            break;
        }
    }
    Ok(ConvergentList { alpha, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_table_values() {
        let t = build_tables::<f64>(12).unwrap();
        assert_eq!(t.mobius(6), 1);
        assert_eq!(t.mobius(1), 1);
        assert_eq!(t.mobius(4), 0);
        assert_eq!(t.mobius(7), -1);
        assert!((t.lambda(8) - 2f64.ln()).abs() < 1e-15);
        assert!((t.lambda(8) - 0.693147).abs() < 1e-6);
        assert_eq!(t.lambda(6), 0.0);
        assert_eq!(t.lambda(1), 0.0);
        assert_eq!(t.phi(12), 4);
        assert_eq!(t.spf(12), 2);
        assert_eq!(t.spf(9), 3);
    }

    #[test]
    fn zero_limit_is_capacity_error() {
        assert!(matches!(build_tables::<f64>(0), Err(Error::Capacity(_))));
        assert!(matches!(
            build_tables_capped::<f64>(1000, 100),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn mobius_inversion_and_chebyshev_identity() {
        let n_max = 10_000;
        let t = build_tables::<f64>(n_max).unwrap();
        let mut mu_sum = vec![0i64; n_max + 1];
        let mut lambda_sum = vec![0f64; n_max + 1];
        for d in 1..=n_max {
            for m in (d..=n_max).step_by(d) {
                mu_sum[m] += t.mobius(d) as i64;
                lambda_sum[m] += t.lambda(d);
            }
        }
        for n in 1..=n_max {
            assert_eq!(mu_sum[n], (n == 1) as i64, "n = {n}");
            assert!((lambda_sum[n] - (n as f64).ln()).abs() <= 1e-12, "n = {n}");
            assert_eq!(t.phi(n) as u64, totient(n as u64));
            assert_eq!(t.mobius(n) as i32, mobius_of(n as u64));
        }
    }

    #[test]
    fn frac_examples() {
        assert!((frac(1.2f64).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(frac(-0.25f64).unwrap(), 0.75);
        assert_eq!(frac(3.0f64).unwrap(), 0.0);
        assert!(frac(f64::NAN).is_err());
        assert!(frac(f64::INFINITY).is_err());
        let tiny = frac(-1e-20f64).unwrap();
        assert!(tiny < 1.0 && tiny > 0.999);
    }

    #[test]
    fn sawtooth_examples() {
        assert_eq!(sawtooth(0.25f64).unwrap(), -0.25);
        assert_eq!(sawtooth(7.0f64).unwrap(), 0.0);
        assert_eq!(sawtooth(-0.25f64).unwrap(), 0.25);
        assert_eq!(sawtooth(0.25f32).unwrap(), -0.25);
        assert!(sawtooth(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn sawtooth2_values() {
        // Oracle: direct summation of 1/m^2 and (-1)^m/m^2 to 10^6 terms.
        let mut even = 0.0f64;
        let mut alt = 0.0f64;
        for m in (1..=1_000_000u64).rev() {
            let m2 = (m as f64) * (m as f64);
            even += 1.0 / m2;
            alt += if m % 2 == 0 { 1.0 } else { -1.0 } / m2;
        }
        let scale = 1.0 / (2.0 * std::f64::consts::PI.powi(2));
        let at0 = sawtooth2(0.0f64, 1_000_000).unwrap();
        let at_half = sawtooth2(0.5f64, 1_000_000).unwrap();
        assert!((at0 - scale * even).abs() < 1e-12);
        assert!((at_half - scale * alt).abs() < 1e-12);
        assert!((at0 - 1.0 / 12.0).abs() < 1e-6);
        assert!((at_half + 1.0 / 24.0).abs() < 1e-6);

        // Midpoint quadrature of psi on [0, 0.3].
        let steps = 100_000;
        let h = 0.3 / steps as f64;
        let quad: f64 = (0..steps)
            .map(|i| sawtooth((i as f64 + 0.5) * h).unwrap() * h)
            .sum();
        let diff = sawtooth2(0.3f64, 200_000).unwrap() - at0;
        assert!((quad + 0.105).abs() < 1e-9);
        assert!((diff - quad).abs() < 1e-5);
        assert!(sawtooth2(0.1f64, 0).is_err());
    }

    #[test]
    fn sawtooth2_truncation_bound() {
        let scale = 1.0 / (2.0 * std::f64::consts::PI.powi(2));
        for &terms in &[10u64, 100, 1000] {
            for &t in &[0.0, 0.13, 0.5, 0.77] {
                let exact = sawtooth2::<f64>(t, 2_000_000).unwrap();
                let approx = sawtooth2(t, terms).unwrap();
                assert!((exact - approx).abs() <= scale / terms as f64);
            }
        }
    }

    #[test]
    fn golden_ratio_convergents() {
        let golden = 0.618_033_988_749_894_8_f64;
        let c = convergents(golden, 20).unwrap();
        assert_eq!(c.denominators(), vec![1, 2, 3, 5, 8, 13]);
        let big = convergents(golden, 1_000_000).unwrap();
        let s: f64 = big.reciprocal_totient_sum();
        assert!(s.is_finite() && s < 4.0, "sum = {s}");
        let direct: f64 = big
            .denominators()
            .iter()
            .map(|&q| 1.0 / totient(q) as f64)
            .sum();
        assert!((s - direct).abs() < 1e-12);
        for w in big.entries.windows(2) {
            let (p, q) = w[0];
            let (_, q1) = w[1];
            assert!(q < q1);
            assert!((golden - p as f64 / q as f64).abs() < 1.0 / (q as f64 * q1 as f64));
        }
    }

    #[test]
    fn terminating_expansions() {
        assert_eq!(convergents(0.5f64, 100).unwrap().entries, vec![(1, 2)]);
        assert_eq!(convergents(3.0f64, 100).unwrap().entries, vec![(3, 1)]);
        assert_eq!(
            convergents(0.375f64, 100).unwrap().entries,
            vec![(1, 2), (1, 3), (3, 8)]
        );
        assert!(convergents(f64::NAN, 10).is_err());
    }

    #[test]
    fn rational_point_validation() {
        assert!(matches!(
            RationalPoint::new(2, 4),
            Err(Error::NotReduced { a: 2, q: 4 })
        ));
        let p = RationalPoint::new(-1, 4).unwrap();
        assert_eq!((p.a(), p.q()), (3, 4));
        let z = RationalPoint::new(0, 1).unwrap();
        assert_eq!((z.a(), z.q()), (0, 1));
        assert!(RationalPoint::new(0, 3).is_err());
        assert!(RationalPoint::new(1, 0).is_err());
    }

    #[test]
    fn exact_quarter_turns() {
        assert_eq!(sin_2pi_frac::<f64>(1, 2), 0.0);
        assert_eq!(sin_2pi_frac::<f64>(1, 4), 1.0);
        assert_eq!(sin_2pi_frac::<f64>(3, 4), -1.0);
        assert_eq!(sin_2pi_frac::<f64>(2, 7), -sin_2pi_frac::<f64>(5, 7));
        assert_eq!(cos_2pi_frac::<f64>(1, 4), 0.0);
        assert_eq!(cos_2pi_frac::<f64>(2, 4), -1.0);
    }

    #[test]
    fn divisor_listing() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
    }

    proptest! {
        #[test]
        fn sawtooth_is_odd(x in -1e6f64..1e6) {
            prop_assume!(x.fract() != 0.0);
            prop_assert_eq!(sawtooth(x).unwrap() + sawtooth(-x).unwrap(), 0.0);
        }

        #[test]
        fn sawtooth_is_periodic(x in -1e3f64..1e3) {
            prop_assume!((x - x.round()).abs() > 1e-9);
            let d = sawtooth(x + 1.0).unwrap() - sawtooth(x).unwrap();
            prop_assert!(d.abs() <= 1e-12);
        }

        #[test]
        fn frac_in_unit_interval(x in -1e6f64..1e6) {
            let f = frac(x).unwrap();
            prop_assert!((0.0..1.0).contains(&f));
            let g = frac(x + 1.0).unwrap();
            // Adjacent to an integer the two may land on opposite ends of [0, 1).
            let d = (f - g).abs();
            prop_assert!(d <= 1e-12 || (1.0 - d) <= 1e-12);
        }
    }
}
