//! The distance integral `int_0^inf |sum b_n {nu}/n|^2 du/u^2` and its critical-line twin
//! `(1/2pi) int |zeta(1/2+it) M_N(1/2+it)|^2 / |1/2+it|^2 dt`.
//!
//! The fractional-part side is integrated exactly: between consecutive points
//! `m/n` every `{nu}` is affine in `u`, so each segment has a closed-form
//! antiderivative. The critical-line side uses adaptive Gauss-Kronrod
//! quadrature over an accelerated eta-series evaluation of zeta.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use num_complex::Complex;
use rayon::prelude::*;

use crate::arith::ArithTables;
use crate::error::{Error, Result};
use crate::scalar::{from_u64, lit, CompensatedSum, Real};

/// Default ceiling on the number of breakpoint events in one sweep.
pub const MAX_BREAKPOINTS: usize = 400_000_000;
/// Largest `|t|` accepted by [`zeta_critical`].
pub const ZETA_T_CAP: f64 = 500.0;
/// Largest mollifier length accepted by [`lhs_quadrature`].
pub const LHS_N_CAP: usize = 64;

/// Dirichlet polynomial coefficients `b_1..b_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MollifierCoeffs<T> {
    n_max: usize,
    // b[0] is unused
    b: Vec<T>,
}

impl<T: Real> MollifierCoeffs<T> {
    /// Arbitrary coefficients; `values[0]` is `b_1`.
    pub fn from_vec(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("need at least one coefficient".into()));
        }
        let n_max = values.len();
        let mut b = Vec::with_capacity(n_max + 1);
        b.push(T::zero());
        b.extend(values);
        Ok(Self { n_max, b })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `b_n` for `1 <= n <= N`, zero otherwise.
    pub fn b(&self, n: usize) -> T {
        if n == 0 || n > self.n_max {
            T::zero()
        } else {
            self.b[n]
        }
    }

    /// `[b_1, ..., b_N]`.
    pub fn as_slice(&self) -> &[T] {
        &self.b[1..]
    }

    /// Indices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.n_max).filter(|&n| self.b[n] != T::zero()).collect()
    }

    /// `sum b_n`.
    pub fn sum(&self) -> T {
        self.b[1..].iter().copied().collect::<CompensatedSum<T>>().value()
    }

    /// `M(1/2 + it) = sum b_n n^(-1/2) e^(-it log n)`.
    pub fn eval_critical(&self, t: T) -> Complex<T> {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for n in 1..=self.n_max {
            let b = self.b[n];
            if b == T::zero() {
                continue;
            }
            let nf = from_u64::<T>(n as u64);
            let w = b / nf.sqrt();
            let phase = t * nf.ln();
            re.add(w * phase.cos());
            im.add(-w * phase.sin());
        }
        Complex::new(re.value(), im.value())
    }
}

/// Levinson-weighted Moebius coefficients `b_n = mu(n) log(N/n) / log N`.
pub fn mollifier_coeffs<T: Real>(n_max: usize, tables: &ArithTables<T>) -> Result<MollifierCoeffs<T>> {
    if n_max < 2 {
        return Err(Error::Domain("mollifier length must be at least 2".into()));
    }
    tables.check_covers(n_max)?;
    let nf = from_u64::<T>(n_max as u64);
    let log_n = nf.ln();
    let values = (1..=n_max)
        .map(|n| match tables.mobius(n) {
            0 => T::zero(),
            _ if n == n_max => T::zero(),
            m => {
                let w = (nf / from_u64::<T>(n as u64)).ln() / log_n;
                if m > 0 {
                    w
                } else {
                    -w
                }
            }
        })
        .collect();
    MollifierCoeffs::from_vec(values)
}

/// `sum_{n <= N} mu(n) log(N/n) / log N`, the slope of the inner sum near `u = 0`.
pub fn weighted_mertens<T: Real>(n_max: usize, tables: &ArithTables<T>) -> Result<T> {
    Ok(mollifier_coeffs(n_max, tables)?.sum())
}

/// `g1(x) = x - 2 log(1+x) + x/(1+x)`, about `x^3/3` near zero.
fn g1<T: Real>(x: T) -> T {
    if x <= lit(0.5) {
        // sum_{k >= 3} (-1)^(k+1) (k-2)/k x^k
        let mut acc = CompensatedSum::new();
        let mut p = x * x * x;
        let mut k = 3u64;
        loop {
            let kf = from_u64::<T>(k);
            let term = p * (kf - lit(2.0)) / kf;
            acc.add(if k % 2 == 1 { term } else { -term });
            if term.abs() <= T::epsilon() * acc.value().abs() * lit(0.01) || k > 200 {
                break;
            }
            p = p * x;
            k += 1;
        }
        acc.value()
    } else {
        x - lit::<T>(2.0) * x.ln_1p() + x / (T::one() + x)
    }
}

/// `g2(x) = log(1+x) - x/(1+x)`, about `x^2/2` near zero.
fn g2<T: Real>(x: T) -> T {
    if x <= lit(0.5) {
        // sum_{k >= 2} (-1)^k (k-1)/k x^k
        let mut acc = CompensatedSum::new();
        let mut p = x * x;
        let mut k = 2u64;
        loop {
            let kf = from_u64::<T>(k);
            let term = p * (kf - T::one()) / kf;
            acc.add(if k.is_multiple_of(2) { term } else { -term });
            if term.abs() <= T::epsilon() * acc.value().abs() * lit(0.01) || k > 200 {
                break;
            }
            p = p * x;
            k += 1;
        }
        acc.value()
    } else {
        x.ln_1p() - x / (T::one() + x)
    }
}

/// `int_{u0}^{u1} f g / u^2 du` for `f = f0 + a1 (u - u0)`, `g = g0 + a2 (u - u0)`, `u0 > 0`.
pub fn affine_product_integral<T: Real>(u0: T, u1: T, f0: T, a1: T, g0: T, a2: T) -> T {
    let h = u1 - u0;
    let x = h / u0;
    f0 * g0 * x / u1 + (f0 * a2 + g0 * a1) * g2(x) + a1 * a2 * u0 * g1(x)
}

/// `int_{u0}^{u1} f g du` for the same affine pair.
fn affine_product_plain<T: Real>(u0: T, u1: T, f0: T, a1: T, g0: T, a2: T) -> T {
    let h = u1 - u0;
    f0 * g0 * h + (f0 * a2 + g0 * a1) * h * h / lit(2.0) + a1 * a2 * h * h * h / lit(3.0)
}

/// One arithmetic progression `m/n` of breakpoints with the jumps it causes
/// in the two factors: at each crossing `f` drops by `jump_f`, `g` by `jump_g`.
#[derive(Clone, Copy, Debug)]
struct Progression<T> {
    n: u64,
    jump_f: T,
    jump_g: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Event {
    m: u64,
    n: u64,
    idx: usize,
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.m as u128 * other.n as u128;
        let rhs = other.m as u128 * self.n as u128;
        lhs.cmp(&rhs).then(self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Event {
    fn same_point(&self, other: &Event) -> bool {
        self.m as u128 * other.n as u128 == other.m as u128 * self.n as u128
    }
}

/// Straight segment of the inner sum: `a * u - b` on `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<T> {
    pub start: T,
    pub end: T,
    pub a: T,
    pub b: T,
}

struct SweepOutput<T> {
    value: T,
    /// `int f g du` over the last decade `[u_max/10, u_max]`.
    last_decade: T,
    breakpoints: Vec<(u64, u64)>,
    segments: Vec<Segment<T>>,
    events: usize,
}

fn breakpoint_count<T: Real>(ns: impl Iterator<Item = u64>, u_max: T) -> usize {
    ns.map(|n| (from_u64::<T>(n) * u_max).floor().to_usize().unwrap_or(usize::MAX))
        .fold(0usize, |acc, c| acc.saturating_add(c))
}

/// Exact sweep of `int_0^{u_max} f g / u^2 du` where
/// `f = slope_f u - sum jump_f floor(n u)` and likewise for `g`.
fn sweep<T: Real>(
    slope_f: T,
    slope_g: T,
    progs: &[Progression<T>],
    u_max: T,
    cap: usize,
    keep: bool,
) -> Result<SweepOutput<T>> {
    let count = breakpoint_count(progs.iter().map(|p| p.n), u_max);
    if count > cap {
        return Err(Error::Capacity(format!(
            "{count} breakpoints exceed the cap of {cap}"
        )));
    }
    let threshold = u_max / lit(10.0);
    let mut heap = BinaryHeap::with_capacity(progs.len());
    for (idx, p) in progs.iter().enumerate() {
        if from_u64::<T>(1) / from_u64::<T>(p.n) <= u_max {
            heap.push(Reverse(Event { m: 1, n: p.n, idx }));
        }
    }
    let mut value = CompensatedSum::new();
    let mut last_decade = CompensatedSum::new();
    let mut bf = CompensatedSum::new();
    let mut bg = CompensatedSum::new();
    let mut breakpoints = Vec::new();
    let mut segments = Vec::new();
    let mut u_prev = T::zero();
    let mut events = 0usize;

    let integrate = |u0: T, u1: T, bf: T, bg: T, value: &mut CompensatedSum<T>, last: &mut CompensatedSum<T>| {
        if u1 <= u0 {
            return;
        }
        let mut pieces = [(u0, u1), (u1, u1)];
        if u0 < threshold && threshold < u1 {
            pieces = [(u0, threshold), (threshold, u1)];
        }
        for (a, b) in pieces {
            if b <= a {
                continue;
            }
            let f0 = slope_f * a - bf;
            let g0 = slope_g * a - bg;
            if a == T::zero() {
                value.add(slope_f * slope_g * b);
            } else {
                value.add(affine_product_integral(a, b, f0, slope_f, g0, slope_g));
            }
            if a >= threshold {
                last.add(affine_product_plain(a, b, f0, slope_f, g0, slope_g));
            }
        }
    };

    while let Some(Reverse(first)) = heap.pop() {
        let u = from_u64::<T>(first.m) / from_u64::<T>(first.n);
        integrate(u_prev, u, bf.value(), bg.value(), &mut value, &mut last_decade);
        if keep {
            segments.push(Segment {
                start: u_prev,
                end: u,
                a: slope_f,
                b: bf.value(),
            });
            let g = num_integer::gcd(first.m, first.n);
            breakpoints.push((first.m / g, first.n / g));
        }
        // Apply every progression that lands on this point at once.
        let mut hit = vec![first];
        while let Some(Reverse(next)) = heap.peek() {
            if next.same_point(&first) {
                hit.push(*next);
                heap.pop();
            } else {
                break;
            }
        }
        for ev in hit {
            let p = &progs[ev.idx];
            bf.add(p.jump_f);
            bg.add(p.jump_g);
            events += 1;
            let m = ev.m + 1;
            if from_u64::<T>(m) / from_u64::<T>(p.n) <= u_max {
                heap.push(Reverse(Event { m, ..ev }));
            }
        }
        u_prev = u;
    }
    integrate(u_prev, u_max, bf.value(), bg.value(), &mut value, &mut last_decade);
    if keep && u_max > u_prev {
        segments.push(Segment {
            start: u_prev,
            end: u_max,
            a: slope_f,
            b: bf.value(),
        });
    }
    Ok(SweepOutput {
        value: value.value(),
        last_decade: last_decade.value(),
        breakpoints,
        segments,
        events,
    })
}

/// Exact integral of the squared inner sum over `(0, u_max]` with a tail model for `(u_max, inf)`.
#[derive(Clone, Debug)]
pub struct PiecewiseIntegral<T> {
    pub u_max: T,
    /// Distinct breakpoints `m/n` in lowest terms, ascending (empty unless kept).
    pub breakpoints: Vec<(u64, u64)>,
    /// Inner sum `a u - b` per segment (empty unless kept).
    pub segments: Vec<Segment<T>>,
    /// `int_0^{u_max}`, exact up to round-off.
    pub value: T,
    /// `mean(S^2 over [u_max/10, u_max]) / u_max`.
    pub tail_estimate: T,
    /// Constant piece on `(0, 1/N]`: `(sum b_n)^2 / N`.
    pub initial_piece: T,
    pub event_count: usize,
}

impl<T: Real> PiecewiseIntegral<T> {
    pub fn total(&self) -> T {
        self.value + self.tail_estimate
    }

    pub fn uncertainty(&self) -> T {
        self.tail_estimate / lit(2.0)
    }
}

/// Options for [`rhs_piecewise_with`].
#[derive(Clone, Copy, Debug)]
pub struct PiecewiseOptions {
    pub breakpoint_cap: usize,
    /// Record breakpoints and segment data (memory grows with the event count).
    pub keep_segments: bool,
}

impl Default for PiecewiseOptions {
    fn default() -> Self {
        Self {
            breakpoint_cap: MAX_BREAKPOINTS,
            keep_segments: true,
        }
    }
}

fn tail_from_last_decade<T: Real>(last_decade: T, u_max: T) -> T {
    let mean = last_decade / (u_max * lit(0.9));
    mean / u_max
}

/// `int_0^inf (sum b_n {nu}/n)^2 du / u^2`, integrated exactly up to `u_max`.
pub fn rhs_piecewise<T: Real>(coeffs: &MollifierCoeffs<T>, u_max: T) -> Result<PiecewiseIntegral<T>> {
    rhs_piecewise_with(coeffs, u_max, PiecewiseOptions::default())
}

pub fn rhs_piecewise_with<T: Real>(
    coeffs: &MollifierCoeffs<T>,
    u_max: T,
    options: PiecewiseOptions,
) -> Result<PiecewiseIntegral<T>> {
    if !(u_max >= T::one()) || !u_max.is_finite() {
        return Err(Error::Domain("u_max must be at least 1".into()));
    }
    let progs: Vec<Progression<T>> = coeffs
        .support()
        .into_iter()
        .map(|n| {
            let w = coeffs.b(n) / from_u64::<T>(n as u64);
            Progression {
                n: n as u64,
                jump_f: w,
                jump_g: w,
            }
        })
        .collect();
    let a = coeffs.sum();
    let out = sweep(a, a, &progs, u_max, options.breakpoint_cap, options.keep_segments)?;
    Ok(PiecewiseIntegral {
        u_max,
        breakpoints: out.breakpoints,
        segments: out.segments,
        value: out.value,
        tail_estimate: tail_from_last_decade(out.last_decade, u_max),
        initial_piece: a * a / from_u64::<T>(coeffs.n_max() as u64),
        event_count: out.events,
    })
}

/// A kernel or sum with its tail model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailedValue<T> {
    /// Integral over `(0, u_max]`.
    pub value: T,
    pub tail_estimate: T,
}

impl<T: Real> TailedValue<T> {
    pub fn total(&self) -> T {
        self.value + self.tail_estimate
    }

    pub fn uncertainty(&self) -> T {
        self.tail_estimate / lit(2.0)
    }
}

/// `(1/h) int_0^inf {hu}{ku} du / u^2`, exact up to `u_max` plus a tail model.
pub fn pair_kernel<T: Real>(h: u64, k: u64, u_max: T) -> Result<TailedValue<T>> {
    pair_kernel_capped(h, k, u_max, MAX_BREAKPOINTS)
}

fn pair_kernel_capped<T: Real>(h: u64, k: u64, u_max: T, cap: usize) -> Result<TailedValue<T>> {
    if h == 0 || k == 0 {
        return Err(Error::Domain("pair kernel needs h, k >= 1".into()));
    }
    if !(u_max >= T::one()) || !u_max.is_finite() {
        return Err(Error::Domain("u_max must be at least 1".into()));
    }
    let progs = if h == k {
        vec![Progression {
            n: h,
            jump_f: T::one(),
            jump_g: T::one(),
        }]
    } else {
        vec![
            Progression {
                n: h,
                jump_f: T::one(),
                jump_g: T::zero(),
            },
            Progression {
                n: k,
                jump_f: T::zero(),
                jump_g: T::one(),
            },
        ]
    };
    let out = sweep(from_u64(h), from_u64(k), &progs, u_max, cap, false)?;
    let hf = from_u64::<T>(h);
    Ok(TailedValue {
        value: out.value / hf,
        tail_estimate: tail_from_last_decade(out.last_decade, u_max) / hf,
    })
}

/// `sum_{h,k} b_h b_k / k * pair_kernel(h, k)`, the same integral expanded over pairs.
pub fn rhs_via_pairs<T: Real>(coeffs: &MollifierCoeffs<T>, u_max: T) -> Result<TailedValue<T>> {
    let support = coeffs.support();
    let pairs: Vec<(usize, usize)> = support
        .iter()
        .flat_map(|&h| support.iter().map(move |&k| (h, k)))
        .collect();
    let terms = pairs
        .par_iter()
        .map(|&(h, k)| -> Result<(T, T)> {
            let kernel = pair_kernel::<T>(h as u64, k as u64, u_max)?;
            let w = coeffs.b(h) * coeffs.b(k) / from_u64::<T>(k as u64);
            Ok((w * kernel.value, w * kernel.tail_estimate))
        })
        .collect::<Result<Vec<_>>>()?;
    let value = terms.iter().map(|t| t.0).collect::<CompensatedSum<T>>().value();
    let tail = terms.iter().map(|t| t.1).collect::<CompensatedSum<T>>().value();
    Ok(TailedValue {
        value,
        tail_estimate: tail,
    })
}

/// Borwein weights `(d_n - d_k) / d_n` for `k < n`, built in log space.
fn borwein_weights<T: Real>(n: usize) -> Vec<T> {
    // c_i = (n+i-1)! 4^i / ((n-i)! (2i)!), d_k = n sum_{i<=k} c_i
    let nf = n as f64;
    let mut logs = Vec::with_capacity(n + 1);
    let mut lc = -nf.ln();
    logs.push(lc);
    for i in 1..=n {
        let fi = i as f64;
        lc += ((nf + fi - 1.0) * 4.0 * (nf - fi + 1.0) / ((2.0 * fi) * (2.0 * fi - 1.0))).ln();
        logs.push(lc);
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    // suffix sums: weight_k = sum_{i>k} c_i / sum_i c_i
    let mut suffix = vec![0.0f64; n + 2];
    let mut acc = CompensatedSum::<f64>::new();
    for i in (0..=n).rev() {
        acc.add(scaled[i]);
        suffix[i] = acc.value();
    }
    let total = suffix[0];
    (0..n).map(|k| lit::<T>(suffix[k + 1] / total)).collect()
}

/// Number of eta-series terms that bring the Borwein bound below `precision`.
fn borwein_terms(t: f64, precision: f64) -> usize {
    let s = Complex::new(0.5, t);
    let denom = (Complex::new(1.0, 0.0) - Complex::new(2.0f64, 0.0).powc(Complex::new(1.0, 0.0) - s)).norm();
    let log_bound = 3f64.ln() + (1.0 + 2.0 * t.abs()).ln() + std::f64::consts::PI * t.abs() / 2.0
        - denom.ln()
        - precision.ln();
    let rate = (3.0 + 8f64.sqrt()).ln();
    ((log_bound / rate).ceil().max(10.0)) as usize
}

/// `zeta(1/2 + it)` by Borwein's accelerated alternating series, `|t| <= 500`.
pub fn zeta_critical<T: Real>(t: T, precision_target: T) -> Result<Complex<T>> {
    let tf = t.to_f64().ok_or_else(|| Error::Domain("t not representable".into()))?;
    if !tf.is_finite() {
        return Err(Error::Domain("t must be finite".into()));
    }
    if tf.abs() > ZETA_T_CAP {
        return Err(Error::Capacity(format!(
            "|t| = {} exceeds the zeta cap {ZETA_T_CAP}",
            tf.abs()
        )));
    }
    let precision = precision_target
        .to_f64()
        .filter(|p| *p > 0.0)
        .ok_or_else(|| Error::Domain("precision target must be positive".into()))?;
    let n = borwein_terms(tf, precision);
    let weights = borwein_weights::<T>(n);
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (k, &w) in weights.iter().enumerate() {
        let kf = from_u64::<T>(k as u64 + 1);
        let mag = w / kf.sqrt();
        let phase = t * kf.ln();
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        re.add(sign * mag * phase.cos());
        im.add(-sign * mag * phase.sin());
    }
    let eta = Complex::new(re.value(), im.value());
    // 1 - 2^(1-s) with 1 - s = 1/2 - it
    let two_pow = Complex::from_polar(
        lit::<T>(2.0).sqrt(),
        -t * lit::<T>(2.0).ln(),
    );
    Ok(eta / (Complex::new(T::one(), T::zero()) - two_pow))
}

/// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_KRONROD: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GK_GAUSS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let c = (a + b) / lit(2.0);
    let h = (b - a) / lit(2.0);
    let mut kronrod = CompensatedSum::new();
    let mut gauss = CompensatedSum::new();
    for (i, &x) in GK_NODES.iter().enumerate() {
        let x = lit::<T>(x) * h;
        let fx = if i == 7 { f(c) } else { f(c - x) + f(c + x) };
        kronrod.add(lit::<T>(GK_KRONROD[i]) * fx);
        // Gauss nodes are the odd-indexed Kronrod nodes.
        if i % 2 == 1 {
            gauss.add(lit::<T>(GK_GAUSS[i / 2]) * fx);
        }
    }
    let k = kronrod.value() * h;
    let g = gauss.value() * h;
    (k, (k - g).abs())
}

/// Adaptive Gauss-Kronrod on `[a, b]`, pre-split into `pieces` panels. Returns `(value, error)`.
pub fn adaptive_quadrature<T: Real, F: Fn(T) -> T + Sync>(
    f: &F,
    a: T,
    b: T,
    pieces: usize,
    tolerance: T,
) -> (T, T) {
    let pieces = pieces.max(1);
    let width = (b - a) / from_u64::<T>(pieces as u64);
    let per_piece = tolerance / from_u64::<T>(pieces as u64);
    let results: Vec<(T, T)> = (0..pieces)
        .into_par_iter()
        .map(|i| {
            let lo = a + width * from_u64::<T>(i as u64);
            let hi = if i + 1 == pieces { b } else { lo + width };
            refine(f, lo, hi, per_piece, 0)
        })
        .collect();
    let value = results.iter().map(|r| r.0).collect::<CompensatedSum<T>>().value();
    let error = results.iter().map(|r| r.1).collect::<CompensatedSum<T>>().value();
    (value, error)
}

fn refine<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, tol: T, depth: u32) -> (T, T) {
    let (v, e) = gk15(f, a, b);
    if e <= tol || depth >= 30 {
        return (v, e);
    }
    let m = (a + b) / lit(2.0);
    let half = tol / lit(2.0);
    let (v1, e1) = refine(f, a, m, half, depth + 1);
    let (v2, e2) = refine(f, m, b, half, depth + 1);
    (v1 + v2, e1 + e2)
}

/// Critical-line integral with its error budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LhsValue<T> {
    /// `(1/2pi) int_{-t_max}^{t_max}` of the integrand.
    pub value: T,
    /// `(1/pi) * mean(|zeta M|^2 over [t_max/10, t_max]) / t_max`.
    pub tail_estimate: T,
    pub quadrature_error: T,
}

impl<T: Real> LhsValue<T> {
    pub fn total(&self) -> T {
        self.value + self.tail_estimate
    }

    pub fn uncertainty(&self) -> T {
        self.tail_estimate / lit(2.0) + self.quadrature_error
    }
}

/// `(1/2pi) |zeta(1/2+it) M(1/2+it)|^2 / (1/4 + t^2)`.
pub fn lhs_integrand<T: Real>(coeffs: &MollifierCoeffs<T>, t: T, precision: T) -> Result<T> {
    let z = zeta_critical(t, precision)? * coeffs.eval_critical(t);
    Ok(z.norm_sqr() / (lit::<T>(0.25) + t * t) / (lit::<T>(2.0) * T::PI()))
}

/// `(1/2pi) int |zeta M|^2 / |1/2+it|^2 dt` over the whole line, from `[0, t_max]` doubled plus a tail model.
pub fn lhs_quadrature<T: Real>(
    coeffs: &MollifierCoeffs<T>,
    t_max: T,
    precision_target: T,
) -> Result<LhsValue<T>> {
    if coeffs.n_max() > LHS_N_CAP {
        return Err(Error::Capacity(format!(
            "left side limited to N <= {LHS_N_CAP}"
        )));
    }
    if !(t_max > T::zero()) {
        return Err(Error::Domain("t_max must be positive".into()));
    }
    if t_max > lit(ZETA_T_CAP) {
        return Err(Error::Capacity(format!("t_max exceeds {ZETA_T_CAP}")));
    }
    if !(precision_target > T::zero()) {
        return Err(Error::Domain("precision target must be positive".into()));
    }
    let zeta_precision = (precision_target * lit(1e-3)).max(lit(1e-13));
    let integrand = |t: T| {
        lhs_integrand(coeffs, t, zeta_precision).unwrap_or_else(|_| T::nan())
    };
    let pieces = t_max.ceil().to_usize().unwrap_or(1).max(1);
    let (half, err) = adaptive_quadrature(&integrand, T::zero(), t_max, pieces, precision_target / lit(2.0));
    let squared = |t: T| {
        (zeta_critical(t, zeta_precision).unwrap_or(Complex::new(T::nan(), T::nan()))
            * coeffs.eval_critical(t))
        .norm_sqr()
    };
    let lo = t_max / lit(10.0);
    let decade_pieces = (pieces * 9 / 10).max(1);
    let (decade, _) = adaptive_quadrature(&squared, lo, t_max, decade_pieces, lit::<T>(1e-6) * t_max);
    let mean = decade / (t_max - lo);
    let value = half * lit(2.0);
    if !value.is_finite() || !mean.is_finite() {
        return Err(Error::Consistency("non-finite critical-line integrand".into()));
    }
    Ok(LhsValue {
        value,
        tail_estimate: mean / (T::PI() * t_max),
        quadrature_error: err * lit(2.0),
    })
}

/// Settings for [`criterion_report`].
#[derive(Clone, Copy, Debug)]
pub struct CriterionConfig<T> {
    pub u_max: T,
    /// Cross-check against [`rhs_via_pairs`] when `N` is at most this.
    pub pairs_check_max_n: usize,
    /// Evaluate the critical-line side (requires `N <= 64`).
    pub with_lhs: bool,
    pub t_max: T,
    pub lhs_precision: T,
    pub breakpoint_cap: usize,
}

impl<T: Real> Default for CriterionConfig<T> {
    fn default() -> Self {
        Self {
            u_max: lit(1000.0),
            pairs_check_max_n: 16,
            with_lhs: false,
            t_max: lit(200.0),
            lhs_precision: lit(1e-6),
            breakpoint_cap: MAX_BREAKPOINTS,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CriterionRow<T> {
    pub n: usize,
    pub rhs_value: T,
    pub rhs_uncertainty: T,
    pub gap_to_one: T,
    pub weighted_mertens: T,
    /// `|rhs_via_pairs - rhs_piecewise|` on `(0, u_max]`, when checked.
    pub pairs_residual: Option<T>,
    pub lhs: Option<LhsValue<T>>,
}

#[derive(Clone, Debug)]
pub struct CriterionReport<T> {
    pub config: CriterionConfig<T>,
    pub rows: Vec<CriterionRow<T>>,
}

/// Distance integral for each `N` of the schedule. Reporting only.
pub fn criterion_report<T: Real>(
    n_schedule: &[usize],
    tables: &ArithTables<T>,
    config: CriterionConfig<T>,
) -> Result<CriterionReport<T>> {
    if n_schedule.is_empty() {
        return Err(Error::Domain("empty N schedule".into()));
    }
    let rows = n_schedule
        .par_iter()
        .map(|&n| -> Result<CriterionRow<T>> {
            let coeffs = mollifier_coeffs(n, tables)?;
            let rhs = rhs_piecewise_with(
                &coeffs,
                config.u_max,
                PiecewiseOptions {
                    breakpoint_cap: config.breakpoint_cap,
                    keep_segments: false,
                },
            )?;
            let pairs_residual = if n <= config.pairs_check_max_n {
                let pairs = rhs_via_pairs(&coeffs, config.u_max)?;
                Some((pairs.value - rhs.value).abs())
            } else {
                None
            };
            let lhs = if config.with_lhs {
                Some(lhs_quadrature(&coeffs, config.t_max, config.lhs_precision)?)
            } else {
                None
            };
            Ok(CriterionRow {
                n,
                rhs_value: rhs.total(),
                rhs_uncertainty: rhs.uncertainty(),
                gap_to_one: (T::one() - rhs.total()).abs(),
                weighted_mertens: coeffs.sum(),
                pairs_residual,
                lhs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CriterionReport { config, rows })
}
