//! Dirichlet characters as dense value tables.
//!
//! A character mod `q` is stored as a table of phases `k_b` with
//! `chi(b) = exp(2 pi i k_b / base)`, where `base` is the exponent of the unit
//! group. Phases are exact integers, so parity, principality and conductor are
//! decided without floating point comparisons. The complex values are cached
//! alongside.
//!
//! Groups are built from the CRT decomposition of `(Z/q)^*`: one cyclic
//! generator per odd prime power, `3` for `4`, and `-1, 5` for `2^k, k >= 3`.
//! Characters are enumerated lexicographically in their exponent tuples, so
//! the principal character comes first.

use num_complex::Complex;
use num_integer::Integer;

use crate::arith::{cos_2pi_frac, divisors, factorize, sin_2pi_frac, totient, RationalPoint};
use crate::error::{Error, Result};
use crate::scalar::{from_u64, Real};

/// Largest modulus accepted by [`character_group`].
pub const MAX_MODULUS: u64 = 1_000_000;

/// Largest number of stored values (`q * phi(q)`) for a whole group.
pub const MAX_GROUP_ENTRIES: u64 = 1 << 25;

const NOT_UNIT: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug)]
pub struct DirichletCharacter<T> {
    modulus: u64,
    base: u32,
    phases: Vec<u32>,
    values: Vec<Complex<T>>,
    parity: Parity,
    conductor: u64,
    is_principal: bool,
}

/// `exp(2 pi i k / n)` with exact values at quarter turns.
pub(crate) fn root_of_unity<T: Real>(k: u64, n: u64) -> Complex<T> {
    Complex::new(cos_2pi_frac(k, n), sin_2pi_frac(k, n))
}

impl<T: Real> DirichletCharacter<T> {
    /// Builds a character from its phase table; `NOT_UNIT` marks zeros.
    ///
    /// The table must describe a character; only the metadata is derived here.
    fn from_phases(modulus: u64, base: u32, phases: Vec<u32>) -> Self {
        let values = phases
            .iter()
            .map(|&k| {
                if k == NOT_UNIT {
                    Complex::new(T::zero(), T::zero())
                } else {
                    root_of_unity(k as u64, base as u64)
                }
            })
            .collect();
        let is_principal = phases.iter().all(|&k| k == 0 || k == NOT_UNIT);
        let minus_one = phases[(modulus - 1) as usize];
        let parity = if minus_one != NOT_UNIT && 2 * minus_one as u64 == base as u64 {
            Parity::Odd
        } else {
            Parity::Even
        };
        let conductor = divisors(modulus)
            .into_iter()
            .find(|&d| {
                (1..modulus)
                    .step_by(d as usize)
                    .all(|b| phases[b as usize] == NOT_UNIT || phases[b as usize] == 0)
            })
            .unwrap_or(modulus);
        Self {
            modulus,
            base,
            phases,
            values,
            parity,
            conductor,
            is_principal,
        }
    }

    /// The principal character mod `q`.
    pub fn principal(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        if q > MAX_MODULUS {
            return Err(Error::Capacity(format!("modulus {q} exceeds {MAX_MODULUS}")));
        }
        let phases = (0..q)
            .map(|b| if b.gcd(&q) == 1 { 0 } else { NOT_UNIT })
            .collect();
        Ok(Self::from_phases(q, 1, phases))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// `chi(n)` for any integer `n`.
    #[inline]
    pub fn value(&self, n: u64) -> Complex<T> {
        self.values[(n % self.modulus) as usize]
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_odd(&self) -> bool {
        self.parity == Parity::Odd
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.is_principal
    }

    /// True when every nonzero value is `+-1`.
    pub fn is_real(&self) -> bool {
        self.phases
            .iter()
            .all(|&k| k == NOT_UNIT || (2 * k as u64).is_multiple_of(self.base as u64))
    }

    /// Whether `chi(n)` is nonzero.
    pub fn is_unit(&self, n: u64) -> bool {
        self.phases[(n % self.modulus) as usize] != NOT_UNIT
    }

    /// The complex conjugate character.
    pub fn conj(&self) -> Self {
        let base = self.base;
        let phases = self
            .phases
            .iter()
            .map(|&k| {
                if k == NOT_UNIT {
                    NOT_UNIT
                } else {
                    (base - k) % base
                }
            })
            .collect();
        Self::from_phases(self.modulus, base, phases)
    }

    /// Gauss sum `tau(chi) = sum_b chi(b) e(b/q)`.
    pub fn gauss_sum(&self) -> Complex<T> {
        let q = self.modulus;
        let mut re = crate::scalar::CompensatedSum::new();
        let mut im = crate::scalar::CompensatedSum::new();
        for b in 0..q {
            if self.phases[b as usize] == NOT_UNIT {
                continue;
            }
            let z = self.values[b as usize] * root_of_unity::<T>(b, q);
            re.add(z.re);
            im.add(z.im);
        }
        Complex::new(re.value(), im.value())
    }

    /// The primitive character of modulus `conductor()` inducing this one.
    pub fn induced_primitive(&self) -> Self {
        let r = self.conductor;
        if r == self.modulus {
            return self.clone();
        }
        let q = self.modulus;
        let phases = (0..r)
            .map(|c| {
                if c.gcd(&r) != 1 {
                    return NOT_UNIT;
                }
                // Some lift c + j r is coprime to q.
                let mut b = c;
                while b.gcd(&q) != 1 {
                    b += r;
                }
                self.phases[b as usize]
            })
            .collect();
        Self::from_phases(r, self.base, phases)
    }
}

/// Gauss sum of `chi`.
pub fn gauss_sum<T: Real>(chi: &DirichletCharacter<T>) -> Complex<T> {
    chi.gauss_sum()
}

/// Primitive character inducing `chi`.
pub fn induced_primitive<T: Real>(chi: &DirichletCharacter<T>) -> DirichletCharacter<T> {
    chi.induced_primitive()
}

/// One cyclic factor of the unit group: generator lifted to mod q, and its order.
#[derive(Clone, Copy, Debug)]
struct Generator {
    element: u64,
    order: u64,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn primitive_root_prime_power(p: u64, k: u32) -> u64 {
    let phi_p = p - 1;
    let prime_factors: Vec<u64> = factorize(phi_p).into_iter().map(|(f, _)| f).collect();
    let g = (2..p)
        .find(|&g| prime_factors.iter().all(|&f| pow_mod(g, phi_p / f, p) != 1))
        .unwrap_or(1);
    if k == 1 || p == 2 {
        return g;
    }
    let p2 = p * p;
    if pow_mod(g, phi_p, p2) == 1 {
        g + p
    } else {
        g
    }
}

/// Solves x = r mod m, x = 1 mod (q / m) for coprime m and q/m.
fn crt_lift(r: u64, m: u64, q: u64) -> u64 {
    let rest = q / m;
    if rest == 1 {
        return r % q;
    }
    // x = 1 + rest * t with rest * t = r - 1 mod m.
    let inv = modinv(rest % m, m);
    let t = ((r % m + m - 1) % m) as u128 * inv as u128 % m as u128;
    ((1 + rest as u128 * t) % q as u128) as u64
}

fn modinv(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let e = i64::extended_gcd(&(a as i64), &(m as i64));
    e.x.rem_euclid(m as i64) as u64
}

fn generators(q: u64) -> Vec<Generator> {
    let mut gens = Vec::new();
    for (p, k) in factorize(q) {
        let pk = p.pow(k);
        if p == 2 {
            match k {
                1 => {}
                2 => gens.push(Generator {
                    element: crt_lift(3, 4, q),
                    order: 2,
                }),
                _ => {
                    gens.push(Generator {
                        element: crt_lift(pk - 1, pk, q),
                        order: 2,
                    });
                    gens.push(Generator {
                        element: crt_lift(5, pk, q),
                        order: pk / 4,
                    });
                }
            }
        } else {
            let g = primitive_root_prime_power(p, k);
            gens.push(Generator {
                element: crt_lift(g, pk, q),
                order: pk / p * (p - 1),
            });
        }
    }
    gens
}

/// The full group of characters mod `q`.
#[derive(Clone, Debug)]
pub struct CharacterGroup<T> {
    modulus: u64,
    characters: Vec<DirichletCharacter<T>>,
}

/// All `phi(q)` characters mod `q`, principal first.
pub fn character_group<T: Real>(q: u64) -> Result<CharacterGroup<T>> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    if q > MAX_MODULUS {
        return Err(Error::Capacity(format!("modulus {q} exceeds {MAX_MODULUS}")));
    }
    let phi = totient(q);
    if q.saturating_mul(phi) > MAX_GROUP_ENTRIES {
        return Err(Error::Capacity(format!(
            "character table for modulus {q} needs {} entries",
            q.saturating_mul(phi)
        )));
    }
    let gens = generators(q);
    let base = gens.iter().fold(1u64, |acc, g| acc.lcm(&g.order));
    let base_u32 = u32::try_from(base)
        .map_err(|_| Error::Capacity(format!("group exponent {base} too large")))?;

    // Discrete logs: exps[b * r + i] is the exponent of generator i in unit b.
    let r = gens.len();
    let mut exps = vec![0u32; (q as usize) * r];
    for idx in 0..phi {
        let mut rest = idx;
        let mut element = 1 % q;
        let mut tuple = vec![0u32; r];
        for i in (0..r).rev() {
            let e = rest % gens[i].order;
            rest /= gens[i].order;
            tuple[i] = e as u32;
            element = ((element as u128 * pow_mod(gens[i].element, e, q) as u128) % q as u128) as u64;
        }
        exps[element as usize * r..(element as usize + 1) * r].copy_from_slice(&tuple);
    }

    let mut characters = Vec::with_capacity(phi as usize);
    let mut c = vec![0u64; r];
    loop {
        let phases: Vec<u32> = (0..q)
            .map(|b| {
                if b.gcd(&q) != 1 {
                    return NOT_UNIT;
                }
                let k = (0..r).fold(0u64, |acc, i| {
                    let e = exps[b as usize * r + i] as u64;
                    (acc + c[i] * e % gens[i].order * (base / gens[i].order)) % base
                });
                k as u32
            })
            .collect();
        characters.push(DirichletCharacter::from_phases(q, base_u32, phases));
        let mut i = r;
        let mut done = true;
        while i > 0 {
            i -= 1;
            c[i] += 1;
            if c[i] < gens[i].order {
                done = false;
                break;
            }
            c[i] = 0;
        }
        if done {
            break;
        }
    }
    debug_assert_eq!(characters.len() as u64, phi);
    Ok(CharacterGroup {
        modulus: q,
        characters,
    })
}

impl<T: Real> CharacterGroup<T> {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn characters(&self) -> &[DirichletCharacter<T>] {
        &self.characters
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    pub fn odd(&self) -> impl Iterator<Item = &DirichletCharacter<T>> {
        self.characters.iter().filter(|c| c.is_odd())
    }

    /// `(1 / (i phi(q))) sum_{chi odd} chi(a) tau(conj chi)`.
    pub fn lemma2_sum(&self, a: u64) -> Complex<T> {
        let phi = from_u64::<T>(self.characters.len() as u64);
        let s = self
            .odd()
            .map(|chi| chi.value(a) * chi.conj().gauss_sum())
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
        // Division by i phi: (x + i y) / (i phi) = (y - i x) / phi.
        Complex::new(s.im / phi, -s.re / phi)
    }

    /// Largest deviation from both orthogonality relations.
    ///
    /// Checks `sum_chi chi(a) conj chi(b) = phi(q) [a = b]` over unit pairs and
    /// `sum_b chi(b) conj psi(b) = phi(q) [chi = psi]` over character pairs.
    pub fn orthogonality_residual(&self) -> T {
        let q = self.modulus;
        let phi = from_u64::<T>(self.characters.len() as u64);
        let units: Vec<u64> = (0..q).filter(|b| b.gcd(&q) == 1).collect();
        let mut worst = T::zero();
        for &a in &units {
            for &b in &units {
                let s = self
                    .characters
                    .iter()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, chi| {
                        acc + chi.value(a) * chi.value(b).conj()
                    });
                let expect = if a == b { phi } else { T::zero() };
                worst = worst.max((s - Complex::new(expect, T::zero())).norm());
            }
        }
        for (i, chi) in self.characters.iter().enumerate() {
            for (j, psi) in self.characters.iter().enumerate() {
                let s = units
                    .iter()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, &b| {
                        acc + chi.value(b) * psi.value(b).conj()
                    });
                let expect = if i == j { phi } else { T::zero() };
                worst = worst.max((s - Complex::new(expect, T::zero())).norm());
            }
        }
        worst
    }
}

/// Odd-character Gauss sum average at a reduced point; equals `sin(2 pi a / q)`.
pub fn lemma2_sum<T: Real>(point: RationalPoint) -> Result<Complex<T>> {
    Ok(character_group::<T>(point.q())?.lemma2_sum(point.a()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn trivial_modulus() {
        let g = character_group::<f64>(1).unwrap();
        assert_eq!(g.len(), 1);
        let chi = &g.characters()[0];
        assert!(chi.is_principal());
        assert_eq!(chi.parity(), Parity::Even);
        assert_eq!(chi.conductor(), 1);
        assert_eq!(chi.gauss_sum(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn modulus_four() {
        let g = character_group::<f64>(4).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.characters()[0].is_principal());
        let chi = &g.characters()[1];
        assert_eq!(chi.values()[1], Complex::new(1.0, 0.0));
        assert_eq!(chi.values()[3], Complex::new(-1.0, 0.0));
        assert_eq!(chi.values()[2], Complex::new(0.0, 0.0));
        assert_eq!(chi.parity(), Parity::Odd);
        assert_eq!(chi.conductor(), 4);
        assert!(close(chi.gauss_sum(), Complex::new(0.0, 2.0), 1e-15));
    }

    #[test]
    fn modulus_five_by_brute_force() {
        // 2 generates (Z/5)^*: 2^0..2^3 = 1, 2, 4, 3. A character is fixed by
        // chi(2) = i^c, and chi(2^e) = i^(c e).
        let g = character_group::<f64>(5).unwrap();
        assert_eq!(g.len(), 4);
        let dlog = [0u64, 0, 1, 3, 2];
        let mut principal = 0;
        let mut real = 0;
        let mut order_four = 0;
        for chi in g.characters() {
            let c = (0..4u64)
                .find(|&c| close(chi.value(2), root_of_unity(c, 4), 1e-14))
                .expect("chi(2) is a fourth root of unity");
            for b in 1..5u64 {
                let expect = root_of_unity::<f64>(c * dlog[b as usize] % 4, 4);
                assert!(close(chi.value(b), expect, 1e-14));
            }
            match c {
                0 => principal += 1,
                2 => {
                    real += 1;
                    assert!(!chi.is_odd());
                    assert!(chi.is_real());
                }
                _ => {
                    order_four += 1;
                    assert!(chi.is_odd());
                }
            }
        }
        assert_eq!((principal, real, order_four), (1, 1, 2));
    }

    #[test]
    fn group_sizes_and_single_principal() {
        for q in 1..=60u64 {
            let g = character_group::<f64>(q).unwrap();
            assert_eq!(g.len() as u64, totient(q), "q = {q}");
            assert_eq!(g.characters().iter().filter(|c| c.is_principal()).count(), 1);
            assert!(g.characters()[0].is_principal());
        }
    }

    #[test]
    fn complete_multiplicativity() {
        for q in [7u64, 8, 12, 15, 16, 24, 45] {
            let g = character_group::<f64>(q).unwrap();
            for chi in g.characters() {
                for b in 0..q {
                    assert_eq!(chi.values()[b as usize].norm() == 0.0, b.gcd(&q) != 1);
                    for c in 0..q {
                        let lhs = chi.value(b * c);
                        let rhs = chi.value(b) * chi.value(c);
                        assert!(close(lhs, rhs, 1e-12), "q = {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality_to_sixty() {
        for q in 1..=60u64 {
            let g = character_group::<f64>(q).unwrap();
            assert!(g.orthogonality_residual() <= 1e-10, "q = {q}");
        }
    }

    #[test]
    fn odd_gauss_average_examples() {
        let p = |a, q| RationalPoint::new(a, q).unwrap();
        assert!(close(lemma2_sum(p(1, 4)).unwrap(), Complex::new(1.0, 0.0), 1e-14));
        assert_eq!(lemma2_sum::<f64>(p(1, 2)).unwrap(), Complex::new(0.0, 0.0));
        let v = lemma2_sum::<f64>(p(2, 5)).unwrap();
        assert!((v.re - (4.0 * std::f64::consts::PI / 5.0).sin()).abs() < 1e-12);
        assert!((v.re - 0.587785).abs() < 1e-6);
    }

    #[test]
    fn odd_gauss_average_is_sine_to_sixty() {
        for q in 1..=60u64 {
            let g = character_group::<f64>(q).unwrap();
            for a in 0..q {
                if a.gcd(&q) != 1 {
                    continue;
                }
                let expect = (2.0 * std::f64::consts::PI * a as f64 / q as f64).sin();
                assert!(close(g.lemma2_sum(a), Complex::new(expect, 0.0), 1e-10));
            }
        }
    }

    #[test]
    fn primitive_gauss_sums_have_modulus_sqrt_q() {
        for q in 1..=60u64 {
            let g = character_group::<f64>(q).unwrap();
            for chi in g.characters().iter().filter(|c| c.is_primitive()) {
                let tau = chi.gauss_sum();
                assert!((tau.norm_sqr() - q as f64).abs() <= 1e-9, "q = {q}");
                if q <= 40 {
                    let prod = tau * chi.conj().gauss_sum();
                    let sign = if chi.is_odd() { -1.0 } else { 1.0 };
                    assert!(close(prod, Complex::new(sign * q as f64, 0.0), 1e-9));
                }
            }
        }
    }

    #[test]
    fn imprimitive_gauss_sum_reduction() {
        for q in 1..=60u64 {
            let g = character_group::<f64>(q).unwrap();
            for chi in g.characters() {
                let r = chi.conductor();
                let m = q / r;
                let chi1 = chi.induced_primitive();
                let tau = chi.gauss_sum();
                if r.gcd(&m) != 1 || crate::arith::mobius_of(m) == 0 {
                    assert!(tau.norm() <= 1e-9, "q = {q}, r = {r}");
                } else {
                    let mu = crate::arith::mobius_of(m) as f64;
                    let expect = chi1.value(m) * chi1.gauss_sum() * mu;
                    assert!(close(tau, expect, 1e-9), "q = {q}, r = {r}");
                }
            }
        }
    }

    #[test]
    fn induced_primitive_cases() {
        let p6 = character_group::<f64>(6).unwrap();
        let prim = p6.characters()[0].induced_primitive();
        assert_eq!(prim.modulus(), 1);
        assert!(prim.is_principal());

        let g4 = character_group::<f64>(4).unwrap();
        let odd4 = &g4.characters()[1];
        let same = odd4.induced_primitive();
        assert_eq!(same.values(), odd4.values());

        // The mod-8 character agreeing with the odd mod-4 character on odd residues.
        let g8 = character_group::<f64>(8).unwrap();
        let lifted = g8
            .characters()
            .iter()
            .find(|c| (1..8u64).step_by(2).all(|b| c.value(b) == odd4.value(b)))
            .expect("lift exists");
        assert_eq!(lifted.conductor(), 4);
        let back = lifted.induced_primitive();
        assert_eq!(back.modulus(), 4);
        assert_eq!(back.values(), odd4.values());
        assert!(back.is_odd());
    }

    #[test]
    fn conductor_divides_modulus() {
        for q in 1..=60u64 {
            for chi in character_group::<f64>(q).unwrap().characters() {
                assert_eq!(q % chi.conductor(), 0);
                let prim = chi.induced_primitive();
                assert!(prim.is_primitive());
                assert_eq!(prim.parity(), chi.parity());
            }
        }
    }

    #[test]
    fn capacity_and_domain_errors() {
        assert!(matches!(character_group::<f64>(0), Err(Error::Domain(_))));
        assert!(matches!(
            character_group::<f64>(2_000_000),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            character_group::<f64>(99_991),
            Err(Error::Capacity(_))
        ));
    }
}
