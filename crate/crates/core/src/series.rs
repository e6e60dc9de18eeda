//! Partial sums of the Moebius and von Mangoldt fractional-part series.
//!
//! Every sum here is driven by one sequential pass over `n` that can report
//! snapshots at a schedule of cut-offs, so a scan and a single partial-sum
//! call at the same `N` return identical numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{sin_2pi_frac, totient, ArithTables, RationalPoint};
use crate::error::{Error, Result};
use crate::scalar::{from_u64, lit, CompensatedSum, Real};
use crate::special::{prop2_target, prop3_target, prop4_target};

/// Evaluation point: an exact reduced fraction or a real number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Alpha<T> {
    Rational(RationalPoint),
    Real(T),
}

impl<T: Real> Alpha<T> {
    pub fn value(&self) -> T {
        match *self {
            Alpha::Rational(p) => p.to_real(),
            Alpha::Real(x) => x,
        }
    }

    fn reduced(&self) -> Reduced<T> {
        match *self {
            Alpha::Rational(p) => Reduced::Rational { a: p.a(), q: p.q() },
            Alpha::Real(x) => Reduced::Real(x - x.floor()),
        }
    }
}

impl<T> From<RationalPoint> for Alpha<T> {
    fn from(p: RationalPoint) -> Self {
        Alpha::Rational(p)
    }
}

impl<T: Real> std::fmt::Display for Alpha<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Alpha::Rational(p) => write!(f, "{p}"),
            Alpha::Real(x) => write!(f, "{x}"),
        }
    }
}

/// `alpha mod 1` in a form that yields `{n alpha}` and `sin(2 pi n alpha)` per term.
#[derive(Clone, Copy)]
enum Reduced<T> {
    Rational { a: u64, q: u64 },
    Real(T),
}

impl<T: Real> Reduced<T> {
    #[inline]
    fn residue(a: u64, q: u64, n: usize) -> u64 {
        ((n as u64 % q) as u128 * a as u128 % q as u128) as u64
    }

    #[inline]
    fn frac_at(&self, n: usize) -> T {
        match *self {
            Reduced::Rational { a, q } => {
                from_u64::<T>(Self::residue(a, q, n)) / from_u64::<T>(q)
            }
            Reduced::Real(x) => {
                let y = from_u64::<T>(n as u64) * x;
                y - y.floor()
            }
        }
    }

    #[inline]
    fn sin_at(&self, n: usize) -> T {
        match *self {
            Reduced::Rational { a, q } => sin_2pi_frac(Self::residue(a, q, n), q),
            Reduced::Real(_) => {
                let f = self.frac_at(n);
                (lit::<T>(2.0) * T::PI() * f).sin()
            }
        }
    }
}

/// `psi(x) = {x} - 1/2`, with `psi = 0` at integers.
#[inline]
fn psi_from_frac<T: Real>(f: T) -> T {
    if f == T::zero() {
        T::zero()
    } else {
        f - lit(0.5)
    }
}

/// Which partial sum to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    /// `sum mu(n) {n a} / n`
    U,
    /// `sum mu(n) {n a} log n / n`
    V,
    /// `sum mu(n) log n psi(n a) / n`
    Vstar,
    /// `sum mu(n) (log(N/n) / log N) {n a} / n`
    W,
    /// `sum Lambda(n) sin(2 pi n a) / n`
    Tsum,
    /// `sum Lambda(n) sin(2 pi n a)`
    S,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 6] = [
        SeriesKind::U,
        SeriesKind::V,
        SeriesKind::Vstar,
        SeriesKind::W,
        SeriesKind::Tsum,
        SeriesKind::S,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SeriesKind::U => "U",
            SeriesKind::V => "V",
            SeriesKind::Vstar => "Vstar",
            SeriesKind::W => "W",
            SeriesKind::Tsum => "Tsum",
            SeriesKind::S => "S",
        }
    }

    fn uses_mobius(&self) -> bool {
        matches!(
            self,
            SeriesKind::U | SeriesKind::V | SeriesKind::Vstar | SeriesKind::W
        )
    }
}

impl std::str::FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeriesKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown series kind {s:?}")))
    }
}

impl std::fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn validate_schedule(kind: SeriesKind, schedule: &[usize]) -> Result<usize> {
    let Some(&last) = schedule.last() else {
        return Err(Error::Domain("empty schedule".into()));
    };
    if schedule[0] == 0 {
        return Err(Error::Domain("cut-offs must be at least 1".into()));
    }
    if kind == SeriesKind::W && schedule[0] < 2 {
        return Err(Error::Domain("W needs N >= 2 so that log N > 0".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("schedule must be strictly increasing".into()));
    }
    Ok(last)
}

/// Running state of one pass; `secondary` carries V when evaluating W.
struct PassState<T: Real> {
    primary: CompensatedSum<T>,
    secondary: CompensatedSum<T>,
}

impl<T: Real> PassState<T> {
    fn new() -> Self {
        Self {
            primary: CompensatedSum::new(),
            secondary: CompensatedSum::new(),
        }
    }

    #[inline]
    fn step(&mut self, kind: SeriesKind, alpha: &Reduced<T>, n: usize, tables: &ArithTables<T>) {
        let nf = from_u64::<T>(n as u64);
        if kind.uses_mobius() {
            let m = tables.mobius(n);
            if m == 0 {
                return;
            }
            let sign = if m > 0 { T::one() } else { -T::one() };
            let f = alpha.frac_at(n);
            if f == T::zero() {
                return;
            }
            match kind {
                SeriesKind::U => self.primary.add(sign * f / nf),
                SeriesKind::V => self.primary.add(sign * f * nf.ln() / nf),
                SeriesKind::Vstar => self.primary.add(sign * nf.ln() * psi_from_frac(f) / nf),
                SeriesKind::W => {
                    self.primary.add(sign * f / nf);
                    self.secondary.add(sign * f * nf.ln() / nf);
                }
                _ => unreachable!(),
            }
        } else {
            let l = tables.lambda(n);
            if l == T::zero() {
                return;
            }
            let s = alpha.sin_at(n);
            match kind {
                SeriesKind::Tsum => self.primary.add(l * s / nf),
                SeriesKind::S => self.primary.add(l * s),
                _ => unreachable!(),
            }
        }
    }

    fn value(&self, kind: SeriesKind, n: usize) -> T {
        match kind {
            // W_N = U_N - V_N / log N
            SeriesKind::W => {
                self.primary.value() - self.secondary.value() / from_u64::<T>(n as u64).ln()
            }
            _ => self.primary.value(),
        }
    }
}

/// Partial sums of `kind` at every cut-off of `schedule`, in one pass.
pub fn partial_sums<T: Real>(
    kind: SeriesKind,
    alpha: Alpha<T>,
    schedule: &[usize],
    tables: &ArithTables<T>,
) -> Result<Vec<T>> {
    let n_max = validate_schedule(kind, schedule)?;
    tables.check_covers(n_max)?;
    let reduced = alpha.reduced();
    let mut state = PassState::new();
    let mut out = Vec::with_capacity(schedule.len());
    let mut next = 0;
    for n in 1..=n_max {
        state.step(kind, &reduced, n, tables);
        if schedule[next] == n {
            out.push(state.value(kind, n));
            next += 1;
        }
    }
    Ok(out)
}

fn single<T: Real>(
    kind: SeriesKind,
    alpha: Alpha<T>,
    n_max: usize,
    tables: &ArithTables<T>,
) -> Result<T> {
    Ok(partial_sums(kind, alpha, &[n_max], tables)?[0])
}

/// `U_N(alpha) = sum_{n <= N} mu(n) {n alpha} / n`.
pub fn u_partial<T: Real>(alpha: Alpha<T>, n_max: usize, tables: &ArithTables<T>) -> Result<T> {
    single(SeriesKind::U, alpha, n_max, tables)
}

/// `V_N(alpha) = sum_{n <= N} mu(n) {n alpha} log n / n`.
pub fn v_partial<T: Real>(alpha: Alpha<T>, n_max: usize, tables: &ArithTables<T>) -> Result<T> {
    single(SeriesKind::V, alpha, n_max, tables)
}

/// `V*_N(alpha) = sum_{n <= N} mu(n) log n psi(n alpha) / n`.
pub fn vstar_partial<T: Real>(
    alpha: Alpha<T>,
    n_max: usize,
    tables: &ArithTables<T>,
) -> Result<T> {
    single(SeriesKind::Vstar, alpha, n_max, tables)
}

/// `W_N(alpha) = sum_{n <= N} mu(n) (log(N/n) / log N) {n alpha} / n`, for `N >= 2`.
pub fn w_partial<T: Real>(alpha: Alpha<T>, n_max: usize, tables: &ArithTables<T>) -> Result<T> {
    single(SeriesKind::W, alpha, n_max, tables)
}

/// `sum_{n <= N} Lambda(n) sin(2 pi n alpha) / n`; `T(alpha)` is its limit over `pi`.
pub fn tsum_partial<T: Real>(
    alpha: Alpha<T>,
    n_max: usize,
    tables: &ArithTables<T>,
) -> Result<T> {
    single(SeriesKind::Tsum, alpha, n_max, tables)
}

/// `S_u(alpha) = sum_{n <= u} Lambda(n) sin(2 pi n alpha)`.
pub fn s_exponential<T: Real>(alpha: Alpha<T>, u: usize, tables: &ArithTables<T>) -> Result<T> {
    single(SeriesKind::S, alpha, u, tables)
}

/// `V_N - V*_N`: `(1/2) sum_{n <= N} mu(n) log n / n`, minus the same sum over
/// `n` with `n alpha` an integer (those terms have `{n alpha} = psi(n alpha) = 0`).
pub fn vstar_correction<T: Real>(
    alpha: Alpha<T>,
    n_max: usize,
    tables: &ArithTables<T>,
) -> Result<T> {
    tables.check_covers(n_max)?;
    let reduced = alpha.reduced();
    let mut acc = CompensatedSum::new();
    for n in 2..=n_max {
        let m = tables.mobius(n);
        if m == 0 || reduced.frac_at(n) == T::zero() {
            continue;
        }
        let nf = from_u64::<T>(n as u64);
        acc.add(T::from_i8(m).unwrap() * nf.ln() / nf);
    }
    Ok(acc.value() * lit(0.5))
}

/// Limit of the partial sums of `kind` at `alpha`, where one is known.
///
/// U and W tend to `-sin(2 pi alpha) / pi` for every real alpha. At rationals
/// `V*` tends to `T(a/q)`, `V` to `T(a/q) - 1/2 + mu(q) / (2 phi(q))`, and the
/// Lambda series to its closed form.
pub fn series_target<T: Real>(kind: SeriesKind, alpha: Alpha<T>) -> Result<Option<T>> {
    let heuristic = |x: T| -(lit::<T>(2.0) * T::PI() * (x - x.floor())).sin() / T::PI();
    Ok(match (kind, alpha) {
        (SeriesKind::U | SeriesKind::W, Alpha::Rational(p)) => Some(prop2_target(p)),
        (SeriesKind::U | SeriesKind::W, Alpha::Real(x)) => Some(heuristic(x)),
        (SeriesKind::Vstar, Alpha::Rational(p)) => Some(prop3_target(p)?),
        (SeriesKind::V, Alpha::Rational(p)) => Some(v_limit_rational(p)?),
        (SeriesKind::Tsum, Alpha::Rational(p)) => Some(prop4_target(p)?.value),
        _ => None,
    })
}

/// `lim V_N(a/q) = T(a/q) - 1/2 + mu(q) / (2 phi(q))`.
pub fn v_limit_rational<T: Real>(point: RationalPoint) -> Result<T> {
    let q = point.q();
    let mu = crate::arith::mobius_of(q);
    let jump = from_u64::<T>(mu.unsigned_abs() as u64) * lit(0.5) / from_u64::<T>(totient(q));
    let jump = if mu < 0 { -jump } else { jump };
    Ok(prop3_target::<T>(point)? - lit(0.5) + jump)
}

/// Snapshots of one series at increasing cut-offs, with errors against the known limit.
#[derive(Clone, Debug)]
pub struct SeriesScan<T> {
    pub kind: SeriesKind,
    pub alpha: Alpha<T>,
    pub schedule: Vec<usize>,
    pub values: Vec<T>,
    pub target: Option<T>,
    pub errors: Option<Vec<T>>,
}

pub fn convergence_scan<T: Real>(
    kind: SeriesKind,
    alpha: Alpha<T>,
    schedule: &[usize],
    tables: &ArithTables<T>,
) -> Result<SeriesScan<T>> {
    let values = partial_sums(kind, alpha, schedule, tables)?;
    let target = series_target(kind, alpha)?;
    let errors = target.map(|t| values.iter().map(|&v| v - t).collect());
    Ok(SeriesScan {
        kind,
        alpha,
        schedule: schedule.to_vec(),
        values,
        target,
        errors,
    })
}

/// `10^lo, 10^(lo+1), ..., 10^hi`.
pub fn decade_schedule(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 10usize.pow(e)).collect()
}

/// Estimates of `T` on both sides of a rational point at one offset.
#[derive(Clone, Copy, Debug)]
pub struct JumpRow<T> {
    pub eps: T,
    pub t_plus: T,
    pub t_minus: T,
    pub offset_plus: T,
    pub offset_minus: T,
    /// `|T(a/q) - (T(a/q + eps) + T(a/q - eps)) / 2|`
    pub average_residual: T,
}

#[derive(Clone, Debug)]
pub struct JumpReport<T> {
    pub point: RationalPoint,
    pub n_max: usize,
    /// Closed-form `T(a/q)`.
    pub t_center: T,
    /// Conjectured one-sided offset size `mu(q) / (2 phi(q))`.
    pub conjectured_offset: T,
    pub rows: Vec<JumpRow<T>>,
}

/// Probes `T` near `a/q` with the truncated Lambda series. Measurement only.
pub fn jump_probe<T: Real>(
    point: RationalPoint,
    eps_schedule: &[T],
    n_max: usize,
    tables: &ArithTables<T>,
) -> Result<JumpReport<T>> {
    if eps_schedule.is_empty() {
        return Err(Error::Domain("empty eps schedule".into()));
    }
    if eps_schedule.iter().any(|&e| !(e > T::zero()))
        || eps_schedule.windows(2).any(|w| w[0] <= w[1])
    {
        return Err(Error::Domain(
            "eps schedule must be positive and decreasing".into(),
        ));
    }
    tables.check_covers(n_max)?;
    let t_center = prop3_target::<T>(point)?;
    let mu = crate::arith::mobius_of(point.q());
    let conjectured_offset = T::from_i32(mu).unwrap() * lit(0.5) / from_u64::<T>(totient(point.q()));
    let center = point.to_real::<T>();
    let rows = eps_schedule
        .par_iter()
        .map(|&eps| -> Result<JumpRow<T>> {
            let t_plus = tsum_partial(Alpha::Real(center + eps), n_max, tables)? / T::PI();
            let t_minus = tsum_partial(Alpha::Real(center - eps), n_max, tables)? / T::PI();
            Ok(JumpRow {
                eps,
                t_plus,
                t_minus,
                offset_plus: t_plus - t_center,
                offset_minus: t_minus - t_center,
                average_residual: (t_center - (t_plus + t_minus) * lit(0.5)).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JumpReport {
        point,
        n_max,
        t_center,
        conjectured_offset,
        rows,
    })
}

/// Per-point record of a boundedness run.
#[derive(Clone, Copy, Debug)]
pub struct MonitorPoint<T> {
    pub alpha: Alpha<T>,
    /// `sup_{n <= N_max} |partial sum|`
    pub sup: T,
    pub argmax_n: usize,
}

#[derive(Clone, Debug)]
pub struct MonitorReport<T> {
    pub kind: SeriesKind,
    pub n_max: usize,
    pub sup: T,
    pub argmax_alpha: Alpha<T>,
    pub argmax_n: usize,
    pub points: Vec<MonitorPoint<T>>,
}

/// Supremum of `|partial sum|` over every cut-off `n <= max(n_grid)` and every
/// point of `alpha_grid`. For `Tsum` the monitored quantity is the partial sum
/// divided by `pi`, matching `T(alpha)`.
pub fn boundedness_monitor<T: Real>(
    kind: SeriesKind,
    alpha_grid: &[Alpha<T>],
    n_grid: &[usize],
    tables: &ArithTables<T>,
) -> Result<MonitorReport<T>> {
    if !matches!(kind, SeriesKind::Vstar | SeriesKind::Tsum | SeriesKind::V) {
        return Err(Error::Domain(format!("no boundedness monitor for {kind}")));
    }
    if alpha_grid.is_empty() {
        return Err(Error::Domain("empty alpha grid".into()));
    }
    let n_max = *n_grid
        .iter()
        .max()
        .ok_or_else(|| Error::Domain("empty n grid".into()))?;
    tables.check_covers(n_max)?;
    let scale = if kind == SeriesKind::Tsum {
        T::PI().recip()
    } else {
        T::one()
    };
    // Only n with a nonzero coefficient move the partial sum.
    let support: Vec<usize> = (1..=n_max)
        .filter(|&n| {
            if kind == SeriesKind::Tsum {
                tables.lambda(n) != T::zero()
            } else {
                tables.mobius(n) != 0
            }
        })
        .collect();
    let points: Vec<MonitorPoint<T>> = alpha_grid
        .par_iter()
        .map(|&alpha| {
            let reduced = alpha.reduced();
            let mut state = PassState::new();
            let mut sup = T::zero();
            let mut argmax_n = 0;
            for &n in &support {
                state.step(kind, &reduced, n, tables);
                let v = (state.value(kind, n) * scale).abs();
                if v > sup {
                    sup = v;
                    argmax_n = n;
                }
            }
            MonitorPoint {
                alpha,
                sup,
                argmax_n,
            }
        })
        .collect();
    let best = points
        .iter()
        .fold(None::<&MonitorPoint<T>>, |acc, p| match acc {
            Some(b) if b.sup >= p.sup => Some(b),
            _ => Some(p),
        })
        .expect("grid is nonempty");
    Ok(MonitorReport {
        kind,
        n_max,
        sup: best.sup,
        argmax_alpha: best.alpha,
        argmax_n: best.argmax_n,
        points,
    })
}

/// `count` reproducible uniform points in `[0, 1)`.
pub fn random_alpha_grid<T: Real>(count: usize, seed: u64) -> Vec<Alpha<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Alpha::Real(lit::<T>(rng.gen::<f64>())))
        .collect()
}

/// Every reduced `a/q` in `[0, 1)` with `q <= q_max`.
pub fn rational_grid<T>(q_max: u64) -> Vec<Alpha<T>> {
    let mut out = Vec::new();
    for q in 1..=q_max {
        for a in 0..q {
            if let Ok(p) = RationalPoint::new(a as i64, q) {
                out.push(Alpha::Rational(p));
            }
        }
    }
    out
}
