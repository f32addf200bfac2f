//! The Hecke character `φ` of `ℚ(i)` with conductor `(4)`, the forms
//! `f = Σ φ(𝔞) q^{N𝔞}` (weight 2, level 64) and `g` (weight 3, level 16) with
//! `L(g,s) = L(φ²,s)`, and the L-values entering `L(Sym²E, s) = L(g,s) L(χ₋₄,s−1)`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{domain, Error, Result};
use crate::precision::{dirichlet_beta, PrecisionContext, Real};

/// The character `(−4/·)`.
pub fn chi4(n: i64) -> i8 {
    match n.rem_euclid(4) {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// Generator `m + ni` (m > 0 odd, n even) of an ideal of `ℤ[i]` prime to 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GaussianIdealRep {
    m: i64,
    n: i64,
}

impl GaussianIdealRep {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m <= 0 || m % 2 == 0 || n % 2 != 0 {
            return Err(Error::Precondition(format!(
                "ideal generator needs m > 0 odd and n even, got ({m}, {n})"
            )));
        }
        Ok(GaussianIdealRep { m, n })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn norm(&self) -> i64 {
        self.m * self.m + self.n * self.n
    }
}

/// `φ((m+ni)) = χ₋₄(m)(m + ni)` as a Gaussian integer `(re, im)`.
pub fn phi_value(rep: GaussianIdealRep) -> (i64, i64) {
    let c = i64::from(chi4(rep.m));
    (c * rep.m, c * rep.n)
}

/// Every ideal generator of norm at most `bound`.
pub fn ideals_up_to(bound: i64) -> impl Iterator<Item = GaussianIdealRep> {
    (1i64..)
        .step_by(2)
        .take_while(move |m| m * m <= bound)
        .flat_map(move |m| {
            let nmax = isqrt(bound - m * m);
            let nmax = nmax - nmax % 2;
            (-nmax..=nmax).step_by(2).map(move |n| GaussianIdealRep { m, n })
        })
}

pub(crate) fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Integer coefficients `a₁..a_N` of a modular form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    pub form: String,
    pub weight: u32,
    pub level: u32,
    coeffs: Vec<i64>,
}

impl QExpansion {
    pub fn new(form: &str, weight: u32, level: u32, coeffs: Vec<i64>) -> Self {
        QExpansion { form: form.to_string(), weight, level, coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `a_k` for `1 <= k <= N`.
    pub fn a(&self, k: usize) -> i64 {
        self.coeffs[k - 1]
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Text table: header `# form=<f> weight=<w> level=<l> N=<N>`, then `k a_k`.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "# form={} weight={} level={} N={}\n",
            self.form,
            self.weight,
            self.level,
            self.coeffs.len()
        );
        for (i, a) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{} {}", i + 1, a);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty table".into()))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("missing '#' header".into()))?;
        let (mut form, mut weight, mut level, mut count) = (None, None, None, None);
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field '{field}'")))?;
            let num = || v.parse::<u64>().map_err(|e| Error::Parse(format!("{k}: {e}")));
            match k {
                "form" => form = Some(v.to_string()),
                "weight" => weight = Some(num()? as u32),
                "level" => level = Some(num()? as u32),
                "N" => count = Some(num()? as usize),
                _ => return Err(Error::Parse(format!("unknown header key '{k}'"))),
            }
        }
        let missing = |what: &str| Error::Parse(format!("header lacks {what}"));
        let count = count.ok_or_else(|| missing("N"))?;
        let mut coeffs = Vec::with_capacity(count);
        for line in lines {
            let mut it = line.split_whitespace();
            let k: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad line '{line}'")))?;
            let a: i64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad line '{line}'")))?;
            if k != coeffs.len() + 1 {
                return Err(Error::Parse(format!("expected index {}, got {k}", coeffs.len() + 1)));
            }
            coeffs.push(a);
        }
        if coeffs.len() != count {
            return Err(Error::Parse(format!("header says N={count}, found {}", coeffs.len())));
        }
        Ok(QExpansion {
            form: form.ok_or_else(|| missing("form"))?,
            weight: weight.ok_or_else(|| missing("weight"))?,
            level: level.ok_or_else(|| missing("level"))?,
            coeffs,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        QExpansion::from_text(&fs::read_to_string(path)?)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    Ok(())
}

/// `f = Σ_{m>0, n∈ℤ} χ₋₄(m) m q^{m²+4n²}`.
pub fn f_qexp(n_max: usize) -> Result<QExpansion> {
    check_n(n_max)?;
    let bound = n_max as i64;
    let mut a = vec![0i64; n_max];
    let mut m = 1i64;
    while m * m <= bound {
        let c = i64::from(chi4(m)) * m;
        let nmax = isqrt((bound - m * m) / 4);
        for n in -nmax..=nmax {
            a[(m * m + 4 * n * n - 1) as usize] += c;
        }
        m += 2;
    }
    Ok(QExpansion::new("f", 2, 64, a))
}

/// `f` as `Σ_𝔞 φ(𝔞) q^{N𝔞}` over ideals prime to `(4)`.
pub fn f_qexp_ideal(n_max: usize) -> Result<QExpansion> {
    check_n(n_max)?;
    let mut re = vec![0i64; n_max];
    let mut im = vec![0i64; n_max];
    for rep in ideals_up_to(n_max as i64) {
        let (x, y) = phi_value(rep);
        re[(rep.norm() - 1) as usize] += x;
        im[(rep.norm() - 1) as usize] += y;
    }
    if im.iter().any(|&v| v != 0) {
        return Err(Error::Convergence("ideal sum for f is not real".into()));
    }
    Ok(QExpansion::new("f", 2, 64, re))
}

/// `a_k(g) = ½ Σ_{m²+4n²=k} (m² − 4n²)` over all `(m, n) ∈ ℤ²`.
pub fn g_qexp(n_max: usize) -> Result<QExpansion> {
    check_n(n_max)?;
    let bound = n_max as i64;
    let mut twice = vec![0i64; n_max];
    let mmax = isqrt(bound);
    for m in -mmax..=mmax {
        let nmax = isqrt((bound - m * m) / 4);
        for n in -nmax..=nmax {
            let k = m * m + 4 * n * n;
            if k > 0 {
                twice[(k - 1) as usize] += m * m - 4 * n * n;
            }
        }
    }
    let a = twice.into_iter().map(|t| t / 2).collect();
    Ok(QExpansion::new("g", 3, 16, a))
}

/// `Σ_{N𝔞 = k} φ²(𝔞)` over ideals prime to 2, with `φ²((α)) = α²` on the
/// generator `α ≡ 1 (mod 2)`.
pub fn g_qexp_ideal(n_max: usize) -> Result<QExpansion> {
    check_n(n_max)?;
    let mut re = vec![0i64; n_max];
    let mut im = vec![0i64; n_max];
    for rep in ideals_up_to(n_max as i64) {
        let (m, n) = (rep.m, rep.n);
        let k = (rep.norm() - 1) as usize;
        re[k] += m * m - n * n;
        im[k] += 2 * m * n;
    }
    if im.iter().any(|&v| v != 0) {
        return Err(Error::Convergence("ideal sum for g is not real".into()));
    }
    Ok(QExpansion::new("g", 3, 16, re))
}

/// `L(χ₋₄, t) = β(t)`.
pub fn l_chi4(t: u32, ctx: &PrecisionContext) -> Result<Real> {
    if t == 0 {
        return Err(domain("l_chi4 needs t >= 1"));
    }
    dirichlet_beta(t, ctx)
}

/// `Γ(s, x)` for integer `s >= 0` and `x > 0`: the finite sum for `s >= 1`
/// and the exponential integral `E₁(x)` for `s = 0`.
pub fn upper_gamma_int(s: u32, x: &Float, prec: u32) -> Float {
    if s == 0 {
        return exp_integral_e1(x, prec);
    }
    let mut term = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 1);
    for j in 1..s {
        term *= x;
        term /= j;
        sum += &term;
    }
    let fact = Integer::from(Integer::factorial(s - 1));
    let e = Float::with_val(prec, -x).exp();
    sum * e * fact
}

/// `E₁(x) = −γ − log x − Σ_{j>=1} (−x)^j/(j·j!)`, evaluated with enough extra
/// bits to absorb the cancellation (about `x log₂ e`).
pub fn exp_integral_e1(x: &Float, prec: u32) -> Float {
    let xf = x.to_f64();
    let extra = (xf * std::f64::consts::LOG2_E).max(0.0).ceil() as u32 + 16;
    let wp = prec + extra;
    let x = Float::with_val(wp, x);
    let eps = Float::with_val(wp, Float::with_val(wp, 2).pow(-(wp as i32)));
    let mut term = Float::with_val(wp, 1); // (−x)^j / j!
    let mut sum = Float::with_val(wp, 0);
    let mut j = 1u32;
    loop {
        term *= &x;
        term /= j;
        term = -term;
        let contrib = Float::with_val(wp, &term / j);
        sum += &contrib;
        if j as f64 > xf && contrib.clone().abs() < eps {
            break;
        }
        j += 1;
    }
    let gamma = Float::with_val(wp, Constant::Euler);
    let ln = Float::with_val(wp, x.ln_ref());
    Float::with_val(prec, -gamma - ln - sum)
}

/// The two split points of the sign protocol.
pub const SPLIT_POINTS: [f64; 2] = [1.0, 1.2];
pub const G_WEIGHT: u32 = 3;
pub const G_LEVEL: u32 = 16;

/// `Λ(s) = (√N/2π)^s Γ(s) L(g,s)` by the smoothed two-term sum split at `t0`,
/// assuming `Λ(s) = ε Λ(k − s)`.
fn completed_l_g(s: u32, eps: i32, t0: f64, coeffs: &QExpansion, ctx: &PrecisionContext) -> Real {
    let p = ctx.prec() + 16;
    let pi = Float::with_val(p, Constant::Pi);
    let sqrt_n = Float::with_val(p, G_LEVEL).sqrt();
    let step = Float::with_val(p, &pi * 2u32) / sqrt_n;
    let t0f = Float::with_val(p, t0);
    let mut acc = Float::with_val(p, 0);
    let dual = G_WEIGHT - s;
    for n in 1..=coeffs.len() {
        let a = coeffs.a(n);
        if a == 0 {
            continue;
        }
        let x = Float::with_val(p, &step * n as u32);
        let xt = Float::with_val(p, &x * &t0f);
        let xd = Float::with_val(p, &x / &t0f);
        let first = upper_gamma_int(s, &xt, p) / Float::with_val(p, (&x).pow(s));
        let second = upper_gamma_int(dual, &xd, p) / Float::with_val(p, (&x).pow(dual));
        acc += (first + second * eps) * a;
    }
    acc
}

/// Number of coefficients needed so that `e^{−x_n min(t0, 1/t0)}` drops below
/// the working epsilon.
fn terms_needed(ctx: &PrecisionContext) -> usize {
    let tmin = SPLIT_POINTS.iter().map(|t| t.min(1.0 / t)).fold(f64::INFINITY, f64::min);
    let target = (f64::from(ctx.working_digits()) + 8.0) * std::f64::consts::LN_10;
    let step = 2.0 * std::f64::consts::PI / f64::from(G_LEVEL).sqrt();
    ((target + 40.0) / (step * tmin)).ceil() as usize + 8
}

/// Outcome of the root-number protocol.
#[derive(Clone, Debug)]
pub struct LgValue {
    pub value: Real,
    /// Root number fixed by the protocol.
    pub epsilon: i32,
    /// `|Λ(t0=1) − Λ(t0=1.2)|` for the chosen sign, relative.
    pub split_discrepancy: f64,
    pub terms: usize,
}

/// `L(g, s)` for `s ∈ {1, 2, 3}` through the smoothed functional-equation sum.
///
/// The root number is never assumed: both signs are tried at two split
/// points, and exactly one must give split-independent values to
/// `10^(−digits/2)`.
pub fn l_g_detailed(s: u32, ctx: &PrecisionContext) -> Result<LgValue> {
    if !(1..=G_WEIGHT).contains(&s) {
        return Err(Error::Unsupported(format!("l_g supports s in 1..=3, got {s}")));
    }
    let p = ctx.prec();
    let terms = terms_needed(ctx);
    let coeffs = g_qexp(terms)?;
    let tol = 10f64.powi(-(ctx.digits() as i32) / 2);
    let mut consistent = Vec::new();
    for eps in [1, -1] {
        let a = completed_l_g(s, eps, SPLIT_POINTS[0], &coeffs, ctx);
        let b = completed_l_g(s, eps, SPLIT_POINTS[1], &coeffs, ctx);
        let scale = a.to_f64().abs().max(b.to_f64().abs()).max(1e-300);
        let rel = Float::with_val(p, &a - &b).abs().to_f64() / scale;
        if rel < tol {
            consistent.push((eps, a, rel));
        }
    }
    if consistent.len() != 1 {
        return Err(Error::Convergence(format!(
            "root number undetermined: {} of 2 signs are split-consistent",
            consistent.len()
        )));
    }
    let (eps, lambda, rel) = consistent.pop().unwrap();
    // L = Λ / ((√N/2π)^s Γ(s))
    let pi = ctx.pi();
    let base = Float::with_val(p, Float::with_val(p, G_LEVEL).sqrt() / Float::with_val(p, &pi * 2u32));
    let gamma_s = Float::with_val(p, Integer::from(Integer::factorial(s - 1)));
    let denom = base.pow(s) * gamma_s;
    Ok(LgValue {
        value: Float::with_val(p, lambda / denom),
        epsilon: eps,
        split_discrepancy: rel,
        terms,
    })
}

pub fn l_g(s: u32, ctx: &PrecisionContext) -> Result<Real> {
    Ok(l_g_detailed(s, ctx)?.value)
}

/// `L(Sym²E, 3) = L(g, 3) L(χ₋₄, 2)` for the congruent number curves.
pub fn l_sym2(s: u32, ctx: &PrecisionContext) -> Result<Real> {
    if s != 3 {
        return Err(Error::Unsupported("l_sym2 is implemented at s = 3".into()));
    }
    Ok(l_g(3, ctx)? * l_chi4(2, ctx)?)
}

/// `κ(C)·π⁴ = C^{3/2}/8` as an exact rational when `C` is a perfect square.
pub fn fe_conversion_pi4_coefficient(c: u64) -> Option<Rational> {
    let r = (c as f64).sqrt().round() as u64;
    if r * r != c {
        return None;
    }
    Some(Rational::from((Integer::from(c) * r, 8)))
}

/// `κ(C) = C^{3/2}/(8π⁴)`, the factor with `L''(Sym²E, 0) = κ(C) L(Sym²E, 3)`.
pub fn fe_conversion_factor(c: u64, ctx: &PrecisionContext) -> Result<Real> {
    if c == 0 {
        return Err(Error::Precondition("conductor must be positive".into()));
    }
    let p = ctx.prec();
    let cf = Float::with_val(p, c);
    let c32 = Float::with_val(p, cf.sqrt_ref()) * &cf;
    let pi4 = Float::with_val(p, ctx.pi().pow(4u32));
    Ok(c32 / (pi4 * 8u32))
}

/// Gamma factor of the completed symmetric-square L-function,
/// `C^{s/2} π^{−s/2} Γ(s/2) (2π)^{−s} Γ(s)`.
pub fn sym2_gamma_factor(c: u64, s: &Float) -> Float {
    let p = s.prec();
    let pi = Float::with_val(p, Constant::Pi);
    let half = Float::with_val(p, s / 2u32);
    let cpow = Float::with_val(p, c).pow(&half);
    let pipow = Float::with_val(p, (&pi).pow(&half)).recip();
    let g1 = Float::with_val(p, half.gamma_ref());
    let two_pi = Float::with_val(p, &pi * 2u32);
    let tp = Float::with_val(p, two_pi.pow(s)).recip();
    let g2 = Float::with_val(p, s.gamma_ref());
    cpow * pipow * g1 * tp * g2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_sum_engine::{evaluate, LatticeSumSpec, Mask, Weight};
    use proptest::prelude::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    fn primes_up_to(n: usize) -> Vec<i64> {
        let mut sieve = vec![true; n + 1];
        let mut out = Vec::new();
        for i in 2..=n {
            if sieve[i] {
                out.push(i as i64);
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
        }
        out
    }

    // coefficients from Hecke multiplicativity on prime powers: an oracle
    // independent of both enumerations
    fn hecke_route(n_max: usize, weight: u32) -> Vec<i64> {
        let mut a = vec![0i64; n_max + 1];
        a[1] = 1;
        let mut prime_power: Vec<Option<(i64, u32)>> = vec![None; n_max + 1];
        for p in primes_up_to(n_max) {
            let ap = if p == 2 || p % 4 == 3 {
                0
            } else {
                let m = (1..)
                    .step_by(2)
                    .find(|&m: &i64| {
                        let r = p - m * m;
                        r > 0 && r % 4 == 0 && isqrt(r) * isqrt(r) == r
                    })
                    .unwrap();
                let n = isqrt(p - m * m);
                match weight {
                    2 => 2 * i64::from(chi4(m)) * m,
                    _ => 2 * (m * m - n * n),
                }
            };
            let chi_pk = if p == 2 { 0 } else { i64::from(chi4(p)) };
            let pk = p.pow(weight - 1);
            // a_{p^{j+1}} = a_p a_{p^j} − χ(p)^{w-1} p^{w−1} a_{p^{j−1}}
            let twist = if weight == 2 { 1 } else { chi_pk };
            let twist = if p == 2 { 0 } else { twist };
            let mut prev = 1i64;
            let mut cur = ap;
            let mut q = p;
            let mut e = 1;
            while (q as usize) <= n_max {
                a[q as usize] = cur;
                prime_power[q as usize] = Some((p, e));
                let next = ap * cur - twist * pk * prev;
                prev = cur;
                cur = next;
                q = match q.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
                e += 1;
            }
        }
        for k in 2..=n_max {
            if prime_power[k].is_some() {
                continue;
            }
            // split off the smallest prime power
            let mut d = 2;
            while k % d != 0 {
                d += 1;
            }
            let mut pp = 1;
            while k % (pp * d) == 0 {
                pp *= d;
            }
            a[k] = a[pp] * a[k / pp];
        }
        a.remove(0);
        a
    }

    #[test]
    fn chi4_values() {
        assert_eq!(chi4(1), 1);
        assert_eq!(chi4(3), -1);
        assert_eq!(chi4(2), 0);
        assert_eq!(chi4(-1), -1);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_value(GaussianIdealRep::new(1, 0).unwrap()), (1, 0));
        assert_eq!(phi_value(GaussianIdealRep::new(3, 0).unwrap()), (-3, 0));
        assert_eq!(phi_value(GaussianIdealRep::new(1, 2).unwrap()), (1, 2));
        assert!(GaussianIdealRep::new(2, 0).is_err());
        assert!(GaussianIdealRep::new(1, 1).is_err());
        assert!(GaussianIdealRep::new(-1, 0).is_err());
    }

    #[test]
    fn f_leading_terms() {
        let f = f_qexp(30).unwrap();
        assert_eq!((f.a(1), f.a(5), f.a(9), f.a(13)), (1, 2, -3, -6));
        assert_eq!(f.a(25), -1);
        for k in 1..=30 {
            if k % 4 != 1 {
                assert_eq!(f.a(k), 0, "a_{k}");
            }
        }
    }

    #[test]
    fn f_routes_agree() {
        let n = 10_000;
        let a = f_qexp(n).unwrap();
        assert_eq!(a.coeffs(), f_qexp_ideal(n).unwrap().coeffs());
        assert_eq!(a.coeffs(), &hecke_route(n, 2)[..]);
    }

    #[test]
    fn g_leading_terms_and_routes() {
        let g = g_qexp(13).unwrap();
        assert_eq!(g.coeffs(), &[1, 0, 0, 0, -6, 0, 0, 0, 9, 0, 0, 0, 10]);
        let n = 10_000;
        let g = g_qexp(n).unwrap();
        assert_eq!(g.coeffs(), g_qexp_ideal(n).unwrap().coeffs());
        assert_eq!(g.coeffs(), &hecke_route(n, 3)[..]);
    }

    #[test]
    fn g_multiplicative_and_bounded() {
        let g = g_qexp(10_000).unwrap();
        for m in 1..=100usize {
            for n in 1..=100usize {
                if num_integer::gcd(m, n) == 1 && m * n <= 10_000 {
                    assert_eq!(g.a(m * n), g.a(m) * g.a(n), "a_{m}·a_{n}");
                }
            }
        }
        for k in 1..=10_000usize {
            let d = (1..=k).filter(|d| k % d == 0).count() as i64;
            assert!(g.a(k).abs() <= k as i64 * d);
        }
    }

    #[test]
    fn table_round_trip() {
        let g = g_qexp(50).unwrap();
        let text = g.to_text();
        assert!(text.starts_with("# form=g weight=3 level=16 N=50\n"));
        assert_eq!(QExpansion::from_text(&text).unwrap(), g);
        assert!(QExpansion::from_text("# form=g weight=3 level=16 N=2\n1 1\n").is_err());
        assert!(QExpansion::from_text("1 1\n").is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        g.save(&path).unwrap();
        assert_eq!(QExpansion::load(&path).unwrap(), g);
    }

    #[test]
    fn e1_matches_continued_fraction() {
        // E₁(x) = e^{-x} / (x + 1/(1 + 1/(x + 2/(1 + 2/(x + ...))))) for moderate x
        let p = 200;
        for xv in [0.5f64, 3.0, 25.0, 60.0] {
            let x = Float::with_val(p, xv);
            let series = exp_integral_e1(&x, p);
            let mut cf = Float::with_val(p, 0);
            for k in (1..4000u32).rev() {
                cf = Float::with_val(p, k) / (Float::with_val(p, 1) + Float::with_val(p, k) / (&x + cf));
            }
            let cf = Float::with_val(p, -&x).exp() / (&x + cf);
            let rel = (Float::with_val(p, &series - &cf) / &cf).abs().to_f64();
            let tol = if xv < 1.0 { 1e-12 } else { 1e-40 };
            assert!(rel < tol, "x={xv}: {rel}");
        }
    }

    #[test]
    fn l_chi4_values() {
        let c = ctx(30);
        assert_eq!(l_chi4(2, &c).unwrap(), c.catalan());
        let b1 = l_chi4(1, &c).unwrap() - c.pi() / 4u32;
        assert!(b1.abs() < c.tolerance());
        let b3 = l_chi4(3, &c).unwrap() - Float::with_val(c.prec(), c.pi().pow(3u32)) / 32u32;
        assert!(b3.abs() < c.tolerance());
    }

    #[test]
    fn l_g3_root_number_and_value() {
        let c = ctx(40);
        let v = l_g_detailed(3, &c).unwrap();
        assert_eq!(v.epsilon, 1);
        let expect = "9.641941525265328529451065823135964986007e-1";
        assert_eq!(crate::precision::format_sig(&v.value, 40), expect);
    }

    #[test]
    fn l_g3_against_lattice_sums() {
        let c = ctx(20);
        let lg = l_g(3, &c).unwrap();
        for spec in [
            LatticeSumSpec::new(Weight::M2MinusN2, Mask::NEven, 1, 3.0, 1000),
            LatticeSumSpec::new(Weight::M2MinusN2, Mask::MOddNEven, 1, 3.0, 1000),
            LatticeSumSpec::new(Weight::M2Minus4N2, Mask::All, 4, 3.0, 1000),
        ] {
            let s = evaluate(&spec, &c).unwrap();
            let half = s.value / 2u32;
            let err = Float::with_val(c.prec(), &half - &lg).abs();
            assert!(err <= s.tail_bound, "{spec:?}: {err}");
        }
    }

    #[test]
    fn l_g3_against_dirichlet_sum() {
        let c = ctx(20);
        let lg = l_g(3, &c).unwrap().to_f64();
        let n = 1_000_000;
        let g = g_qexp(n).unwrap();
        let terms: Vec<f64> = (1..=n).map(|k| g.a(k) as f64 / (k as f64).powi(3)).collect();
        let partial = crate::precision::compensated_sum(&terms);
        assert!((partial - lg).abs() < 1e-5, "{partial} vs {lg}");
    }

    #[test]
    fn l_g2_is_split_consistent() {
        let c = ctx(20);
        let v = l_g_detailed(2, &c).unwrap();
        assert_eq!(v.epsilon, 1);
        assert!(v.value > 0);
        assert!(l_g(4, &c).is_err());
    }

    #[test]
    fn l_sym2_factorization() {
        let c = ctx(20);
        let v = l_sym2(3, &c).unwrap();
        assert!(v > 0);
        let prod = l_g(3, &c).unwrap() * c.catalan();
        assert!(Float::with_val(c.prec(), &v - &prod).abs() < c.tolerance());
    }

    #[test]
    fn conversion_constant() {
        assert_eq!(fe_conversion_pi4_coefficient(64), Some(Rational::from(64)));
        assert_eq!(fe_conversion_pi4_coefficient(1), Some(Rational::from((1, 8))));
        assert_eq!(fe_conversion_pi4_coefficient(37), None);
        let c = ctx(25);
        let k64 = fe_conversion_factor(64, &c).unwrap();
        let k1 = fe_conversion_factor(1, &c).unwrap();
        let ratio = Float::with_val(c.prec(), &k64 / &k1) - 512u32;
        assert!(ratio.abs() < c.tolerance());
    }

    #[test]
    fn conversion_constant_by_limit() {
        // Λ(0) = lim_{s→0} G(s) L(s) with L(s) ~ L''(0) s²/2, and Λ(3) = G(3) L(3)
        let c = ctx(25);
        let p = c.prec();
        let s = Float::with_val(p, 1e-12);
        let near_zero = sym2_gamma_factor(64, &s) * Float::with_val(p, s.square_ref()) / 2u32;
        let at_three = sym2_gamma_factor(64, &Float::with_val(p, 3));
        let kappa = at_three / near_zero;
        let exact = fe_conversion_factor(64, &c).unwrap();
        let rel = (Float::with_val(p, &kappa - &exact) / &exact).abs().to_f64();
        assert!(rel < 1e-10, "{rel}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn coefficients_vanish_off_one_mod_four(k in 1usize..2000) {
            let g = g_qexp(2000).unwrap();
            let f = f_qexp(2000).unwrap();
            if k % 4 != 1 {
                prop_assert_eq!(g.a(k), 0);
                prop_assert_eq!(f.a(k), 0);
            }
        }
    }
}
