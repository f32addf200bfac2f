//! Precision contract, cached constants and deterministic summation.
//!
//! Every arbitrary-precision value in the crate is a [`rug::Float`] created
//! at the working precision of a [`PrecisionContext`]: the requested decimal
//! digits plus guard digits. Tolerances quoted by callers are `10^-digits`.

use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{domain, Error, Result};

/// Arbitrary-precision real scalar.
pub type Real = Float;

pub const MIN_DIGITS: u32 = 15;
pub const MIN_GUARD_DIGITS: u32 = 10;
pub const DEFAULT_GUARD_DIGITS: u32 = 10;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

#[derive(Debug)]
struct Constants {
    pi: Float,
    ln2: Float,
    zeta3: Float,
    catalan: Float,
}

/// Requested precision plus lazily computed constants shared by clones.
#[derive(Clone)]
pub struct PrecisionContext {
    digits: u32,
    guard_digits: u32,
    constants: Arc<OnceLock<Constants>>,
}

impl fmt::Debug for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrecisionContext")
            .field("digits", &self.digits)
            .field("guard_digits", &self.guard_digits)
            .finish()
    }
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, DEFAULT_GUARD_DIGITS)
    }

    pub fn with_guard(digits: u32, guard_digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Precondition(format!(
                "digits must be at least {MIN_DIGITS}, got {digits}"
            )));
        }
        if guard_digits < MIN_GUARD_DIGITS {
            return Err(Error::Precondition(format!(
                "guard_digits must be at least {MIN_GUARD_DIGITS}, got {guard_digits}"
            )));
        }
        Ok(PrecisionContext {
            digits,
            guard_digits,
            constants: Arc::new(OnceLock::new()),
        })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    pub fn working_digits(&self) -> u32 {
        self.digits + self.guard_digits
    }

    /// Working precision in bits.
    pub fn prec(&self) -> u32 {
        (f64::from(self.working_digits()) * BITS_PER_DIGIT).ceil() as u32 + 8
    }

    pub fn float<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.prec(), v)
    }

    /// `10^-digits`, the tolerance every public contract is stated against.
    pub fn tolerance(&self) -> Float {
        self.pow10(-(self.digits as i32))
    }

    /// `10^-(digits + guard_digits)`, the truncation target for series.
    pub fn working_eps(&self) -> Float {
        self.pow10(-(self.working_digits() as i32))
    }

    fn pow10(&self, e: i32) -> Float {
        Float::with_val(self.prec(), 10).pow(e)
    }

    fn constants(&self) -> &Constants {
        self.constants.get_or_init(|| {
            let prec = self.prec();
            Constants {
                pi: Float::with_val(prec, Constant::Pi),
                ln2: Float::with_val(prec, Constant::Log2),
                zeta3: zeta_euler_maclaurin(3, prec, self.working_digits()),
                catalan: beta_alternating(2, prec, self.working_digits()),
            }
        })
    }

    pub fn pi(&self) -> Float {
        self.constants().pi.clone()
    }

    pub fn ln2(&self) -> Float {
        self.constants().ln2.clone()
    }

    pub fn zeta3(&self) -> Float {
        self.constants().zeta3.clone()
    }

    /// Catalan's constant, β(2).
    pub fn catalan(&self) -> Float {
        self.constants().catalan.clone()
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn format(&self, x: &Float) -> String {
        format_sig(x, self.digits as usize)
    }
}

/// Scientific-notation rendering of `x` with `sig` significant digits.
pub fn format_sig(x: &Float, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(sig))
}

pub fn const_pi(ctx: &PrecisionContext) -> Real {
    ctx.pi()
}

/// Bernoulli numbers `B_0..=B_n` (with `B_1 = -1/2`), cached process-wide.
pub fn bernoulli_numbers(n: usize) -> Arc<Vec<Rational>> {
    static CACHE: OnceLock<Mutex<Arc<Vec<Rational>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Arc::new(vec![Rational::from(1)])));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    if guard.len() <= n {
        let mut table: Vec<Rational> = guard.as_ref().clone();
        for m in table.len()..=n {
            // B_m = -1/(m+1) * sum_{k<m} C(m+1, k) B_k
            if m > 1 && m % 2 == 1 {
                table.push(Rational::new());
                continue;
            }
            let mut acc = Rational::new();
            let mut binom = Integer::from(1);
            for (k, bk) in table.iter().enumerate().take(m) {
                if *bk != 0 {
                    acc += Rational::from(&binom * bk.numer()) / bk.denom();
                }
                binom *= (m + 1 - k) as u32;
                binom /= (k + 1) as u32;
            }
            table.push(-acc / Rational::from(m as u32 + 1));
        }
        *guard = Arc::new(table);
    }
    Arc::clone(&guard)
}

/// Hurwitz-type power sum `sum_{n>=0} (n+a)^-s` by Euler–Maclaurin with
/// `head` explicit terms and Bernoulli corrections until they drop below
/// `10^-working_digits`.
fn euler_maclaurin_power_sum(s: u32, a: &Float, prec: u32, working_digits: u32) -> Float {
    debug_assert!(s >= 2);
    let head = working_digits.max(20);
    let eps = Float::with_val(prec, 10).pow(-(working_digits as i32) - 2);
    let mut sum = Float::with_val(prec, 0);
    for n in 0..head {
        let base = Float::with_val(prec, a + n);
        sum += base.pow(-(s as i32));
    }
    let big_n = Float::with_val(prec, a + head);
    let inv_n = Float::with_val(prec, big_n.recip_ref());
    let n_pow = Float::with_val(prec, (&big_n).pow(1 - s as i32));
    // integral tail and the half end-point term
    sum += Float::with_val(prec, &n_pow / (s - 1));
    let mut term_pow = Float::with_val(prec, &n_pow * &inv_n); // N^-s
    sum += Float::with_val(prec, &term_pow / 2u32);

    let bern = bernoulli_numbers(4 * head as usize + 4);
    let inv_n2 = Float::with_val(prec, inv_n.square_ref());
    // rising factorial s(s+1)...(s+2k-2) / (2k)!
    let mut coeff = Float::with_val(prec, s);
    term_pow *= &inv_n; // N^{-s-1}
    let mut k = 1usize;
    while 2 * k < bern.len() {
        let b = Float::with_val(prec, &bern[2 * k]);
        let fact = Float::with_val(
            prec,
            &coeff / Integer::from(Integer::factorial(2 * k as u32)),
        );
        let term = b * fact * &term_pow;
        sum += &term;
        if term.abs() < eps {
            break;
        }
        let s_f = f64::from(s);
        coeff *= (s_f + 2.0 * k as f64 - 1.0) * (s_f + 2.0 * k as f64);
        term_pow *= &inv_n2;
        k += 1;
    }
    sum
}

fn zeta_euler_maclaurin(m: u32, prec: u32, working_digits: u32) -> Float {
    let one = Float::with_val(prec, 1);
    euler_maclaurin_power_sum(m, &one, prec, working_digits)
}

/// Riemann zeta at an integer `m >= 2`.
pub fn zeta_int(m: u32, ctx: &PrecisionContext) -> Result<Real> {
    if m < 2 {
        return Err(domain(format!("zeta_int needs m >= 2, got {m}")));
    }
    if m == 3 {
        return Ok(ctx.zeta3());
    }
    Ok(zeta_euler_maclaurin(m, ctx.prec(), ctx.working_digits()))
}

/// Cohen–Rodriguez Villegas–Zagier acceleration of
/// `sum_{k>=0} (-1)^k (2k+1)^-m`.
fn beta_alternating(m: u32, prec: u32, working_digits: u32) -> Float {
    let n = (1.31 * f64::from(working_digits)).ceil() as u32 + 2;
    let mut d = Float::with_val(prec, 8).sqrt() + 3u32;
    d = d.pow(n);
    d = (Float::with_val(prec, d.recip_ref()) + &d) / 2u32;
    let mut b = Float::with_val(prec, -1);
    let mut c = Float::with_val(prec, -&d);
    let mut s = Float::with_val(prec, 0);
    for k in 0..n {
        c = Float::with_val(prec, &b - &c);
        let a_k = Float::with_val(prec, 2 * k + 1).pow(-(m as i32));
        s += Float::with_val(prec, &c * &a_k);
        let kf = i64::from(k);
        let nf = i64::from(n);
        b *= (kf + nf) * (kf - nf);
        b /= Float::with_val(prec, (2 * kf + 1) * (kf + 1)) / 2u32;
    }
    s / d
}

/// Dirichlet beta `β(m) = sum_{k>=0} (-1)^k/(2k+1)^m`, i.e. `L(χ₋₄, m)`.
pub fn dirichlet_beta(m: u32, ctx: &PrecisionContext) -> Result<Real> {
    if m == 0 {
        return Err(domain("dirichlet_beta needs m >= 1"));
    }
    if m == 2 {
        return Ok(ctx.catalan());
    }
    Ok(beta_alternating(m, ctx.prec(), ctx.working_digits()))
}

/// `β(m)` through the Hurwitz split `4^-m (ζ(m,1/4) − ζ(m,3/4))`, an
/// evaluation route independent of the alternating series.
pub fn dirichlet_beta_hurwitz(m: u32, ctx: &PrecisionContext) -> Result<Real> {
    if m < 2 {
        return Err(domain("Hurwitz route needs m >= 2"));
    }
    let prec = ctx.prec();
    let wd = ctx.working_digits();
    let quarter = Float::with_val(prec, 0.25);
    let three_quarters = Float::with_val(prec, 0.75);
    let z1 = euler_maclaurin_power_sum(m, &quarter, prec, wd);
    let z3 = euler_maclaurin_power_sum(m, &three_quarters, prec, wd);
    let scale = Float::with_val(prec, 4).pow(-(m as i32));
    Ok((z1 - z3) * scale)
}

/// Neumaier-compensated `f64` accumulator. Merging two accumulators is
/// order-sensitive, so reductions that must be reproducible merge in a fixed
/// index order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// The unevaluated pair `(sum, compensation)`.
    pub fn parts(&self) -> (f64, f64) {
        (self.sum, self.comp)
    }
}

/// Compensated sum of an ordered `f64` sequence.
pub fn compensated_sum(terms: &[f64]) -> f64 {
    let mut acc = NeumaierSum::new();
    for &t in terms {
        acc.add(t);
    }
    acc.value()
}

/// Compensated sum of arbitrary-precision terms at `ctx` working precision.
pub fn compensated_sum_real(terms: &[Real], ctx: &PrecisionContext) -> Real {
    let prec = ctx.prec();
    let mut sum = Float::with_val(prec, 0);
    let mut comp = Float::with_val(prec, 0);
    for x in terms {
        let t = Float::with_val(prec, &sum + x);
        if sum.clone().abs() >= x.clone().abs() {
            comp += Float::with_val(prec, &sum - &t) + x;
        } else {
            comp += Float::with_val(prec, x - &t) + &sum;
        }
        sum = t;
    }
    sum + comp
}

pub const DEFAULT_BLOCK: usize = 1 << 16;

/// Deterministic parallel reduction of `term(0) + ... + term(len-1)`.
///
/// The index range is cut into contiguous blocks of `block` indices; each
/// block is compensated on its own and the block results are merged in index
/// order. The output depends only on `len`, `block` and `term`, never on the
/// thread count.
pub fn deterministic_sum<F>(len: usize, block: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let block = block.max(1);
    let nblocks = len.div_ceil(block);
    let partials: Vec<NeumaierSum> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = NeumaierSum::new();
            let end = ((b + 1) * block).min(len);
            for i in b * block..end {
                acc.add(term(i));
            }
            acc
        })
        .collect();
    let mut total = NeumaierSum::new();
    for p in &partials {
        total.merge(p);
    }
    total.value()
}
