//! Elliptic polylogarithms on `E(ℂ) ≅ ℂ/(ℤ + ℤτ)`.
//!
//! A point is `u = ξτ + η` with `x = e^{2πiu}`. Every function has a
//! q-series route (used at high precision) and, for `ℒ_{3,1}` and `ℒ_{3,2}`,
//! an Eisenstein-series route over lattice shells (an independent
//! low-precision oracle).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer as _;
use num_rational::Rational64;
use rug::Float;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::lattice_sum_engine::shell_sum;
use crate::polylog::{bernoulli_b3, bloch_wigner, j3_weight, j_weight, sv_trilog};
use crate::precision::{PrecisionContext, Real};

/// Largest denominator accepted for an exact coordinate.
pub const MAX_DENOMINATOR: i64 = 1_000_000;

/// A coordinate in `ℝ/ℤ`, exact when rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Coord {
    Exact(Rational64),
    Approx(Real),
}

impl Coord {
    pub fn exact(num: i64, den: i64) -> Result<Coord> {
        if den == 0 {
            return Err(Error::Precondition("zero denominator".into()));
        }
        Coord::Exact(Rational64::new(num, den)).reduced()
    }

    fn reduced(self) -> Result<Coord> {
        match self {
            Coord::Exact(r) => {
                if *r.denom() > MAX_DENOMINATOR {
                    return Err(Error::Precondition(format!(
                        "denominator {} exceeds {MAX_DENOMINATOR}",
                        r.denom()
                    )));
                }
                Ok(Coord::Exact(r - r.floor()))
            }
            Coord::Approx(x) => {
                let fl = Float::with_val(x.prec(), x.floor_ref());
                Ok(Coord::Approx(x - fl))
            }
        }
    }

    pub fn neg(&self) -> Coord {
        match self {
            Coord::Exact(r) => Coord::Exact(-*r).reduced().expect("same denominator"),
            Coord::Approx(x) => Coord::Approx(-x.clone()).reduced().expect("approx"),
        }
    }

    pub fn to_float(&self, prec: u32) -> Real {
        match self {
            Coord::Exact(r) => Float::with_val(prec, *r.numer()) / *r.denom(),
            Coord::Approx(x) => Float::with_val(prec, x),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coord::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Coord::Approx(x) => x.to_f64(),
        }
    }

    pub fn as_exact(&self) -> Option<Rational64> {
        match self {
            Coord::Exact(r) => Some(*r),
            Coord::Approx(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coord::Exact(r) => *r.numer() == 0,
            Coord::Approx(x) => x.is_zero(),
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Exact(r) => write!(f, "{r}"),
            Coord::Approx(x) => write!(f, "{:.12}", x.to_f64()),
        }
    }
}

/// `u = ξτ + η` with `(ξ, η)` reduced to `[0,1)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionPoint {
    pub xi: Coord,
    pub eta: Coord,
}

impl TorsionPoint {
    pub fn new(xi: Coord, eta: Coord) -> Result<Self> {
        Ok(TorsionPoint {
            xi: xi.reduced()?,
            eta: eta.reduced()?,
        })
    }

    /// Exact point `(a/b, c/d)`.
    pub fn rational(xi: (i64, i64), eta: (i64, i64)) -> Result<Self> {
        TorsionPoint::new(Coord::exact(xi.0, xi.1)?, Coord::exact(eta.0, eta.1)?)
    }

    pub fn approx(xi: Real, eta: Real) -> Self {
        TorsionPoint::new(Coord::Approx(xi), Coord::Approx(eta)).expect("approx coordinates")
    }

    pub fn origin() -> Self {
        TorsionPoint::rational((0, 1), (0, 1)).unwrap()
    }

    pub fn neg(&self) -> Self {
        TorsionPoint {
            xi: self.xi.neg(),
            eta: self.eta.neg(),
        }
    }

    pub fn is_origin(&self) -> bool {
        self.xi.is_zero() && self.eta.is_zero()
    }

    fn sort_key(&self) -> (String, String) {
        (format!("{:?}", self.xi), format!("{:?}", self.eta))
    }
}

impl fmt::Display for TorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.xi, self.eta)
    }
}

/// The points used for the congruent number curves at `τ = i`.
pub mod points {
    use super::TorsionPoint;

    pub fn o() -> TorsionPoint {
        TorsionPoint::origin()
    }
    /// `P = [d, 0]`, `u = τ/2`.
    pub fn p() -> TorsionPoint {
        TorsionPoint::rational((1, 2), (0, 1)).unwrap()
    }
    /// `u = 1/4`.
    pub fn q() -> TorsionPoint {
        TorsionPoint::rational((0, 1), (1, 4)).unwrap()
    }
    pub fn p_plus_q() -> TorsionPoint {
        TorsionPoint::rational((1, 2), (1, 4)).unwrap()
    }
    pub fn two_q() -> TorsionPoint {
        TorsionPoint::rational((0, 1), (1, 2)).unwrap()
    }
    pub fn half_half() -> TorsionPoint {
        TorsionPoint::rational((1, 2), (1, 2)).unwrap()
    }

    /// The six sample points with their names.
    pub fn canonical() -> Vec<(&'static str, TorsionPoint)> {
        vec![
            ("O", o()),
            ("P", p()),
            ("Q", q()),
            ("P+Q", p_plus_q()),
            ("2Q", two_q()),
            ("(1/2,1/2)", half_half()),
        ]
    }
}

/// Formal integer combination of points.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Divisor {
    terms: Vec<(i64, TorsionPoint)>,
}

impl Divisor {
    pub fn new() -> Self {
        Divisor::default()
    }

    /// Build from `(multiplicity, point)` pairs, merging repeated points and
    /// dropping zero multiplicities.
    pub fn from_terms<I: IntoIterator<Item = (i64, TorsionPoint)>>(terms: I) -> Self {
        let mut merged: BTreeMap<(String, String), (i64, TorsionPoint)> = BTreeMap::new();
        for (k, pt) in terms {
            merged
                .entry(pt.sort_key())
                .and_modify(|e| e.0 += k)
                .or_insert((k, pt));
        }
        Divisor {
            terms: merged.into_values().filter(|(k, _)| *k != 0).collect(),
        }
    }

    pub fn point(pt: TorsionPoint) -> Self {
        Divisor::from_terms([(1, pt)])
    }

    pub fn terms(&self) -> &[(i64, TorsionPoint)] {
        &self.terms
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(k, _)| k).sum()
    }

    pub fn scaled(&self, k: i64) -> Self {
        Divisor::from_terms(self.terms.iter().map(|(m, p)| (m * k, p.clone())))
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1)
    }

    pub fn plus(&self, other: &Divisor) -> Self {
        Divisor::from_terms(self.terms.iter().chain(other.terms.iter()).cloned())
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, p)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{k:+}{p}")?;
        }
        Ok(())
    }
}

/// `ξ₁ = (Q) + (P+Q) − 2(O)`.
pub fn xi1() -> Divisor {
    Divisor::from_terms([(1, points::q()), (1, points::p_plus_q()), (-2, points::o())])
}

/// `ξ₂ = (2Q) − (P)`.
pub fn xi2() -> Divisor {
    Divisor::from_terms([(1, points::two_q()), (-1, points::p())])
}

/// The lattice `ℤ + ℤτ` with `q = e^{2πiτ}` at a fixed precision.
#[derive(Clone, Debug)]
pub struct CurveContext {
    tau: Complex,
    q: Complex,
    ctx: PrecisionContext,
}

/// `e^{2πiη}` with exact values at quarter turns.
fn unit_root(eta: &Coord, tau_re_zero: bool, angle: &Real) -> Option<Complex> {
    if !tau_re_zero {
        return None;
    }
    let r = eta.as_exact()?;
    let p = angle.prec();
    if 4 % *r.denom() != 0 {
        return None;
    }
    let k = (*r.numer() * (4 / *r.denom())).rem_euclid(4);
    Some(match k {
        0 => Complex::from_f64(p, 1.0, 0.0),
        1 => Complex::from_f64(p, 0.0, 1.0),
        2 => Complex::from_f64(p, -1.0, 0.0),
        _ => Complex::from_f64(p, 0.0, -1.0),
    })
}

impl CurveContext {
    pub fn new(tau: Complex, ctx: &PrecisionContext) -> Result<Self> {
        if tau.im <= 0 {
            return Err(Error::Domain("Im(τ) must be positive".into()));
        }
        let p = ctx.prec();
        let tau = Complex::new(Float::with_val(p, &tau.re), Float::with_val(p, &tau.im));
        let two_pi = Float::with_val(p, ctx.pi() * 2u32);
        let modulus = Float::with_val(p, -Float::with_val(p, &two_pi * &tau.im)).exp();
        let q = if tau.re.is_zero() {
            Complex::real(modulus)
        } else {
            Complex::cis(&Float::with_val(p, &two_pi * &tau.re)).scale(&modulus)
        };
        Ok(CurveContext {
            tau,
            q,
            ctx: ctx.clone(),
        })
    }

    /// `τ = i`, the lattice of every congruent number curve.
    pub fn square(ctx: &PrecisionContext) -> Self {
        CurveContext::new(Complex::i(ctx.prec()), ctx).expect("Im(i) > 0")
    }

    pub fn tau(&self) -> &Complex {
        &self.tau
    }

    pub fn q(&self) -> &Complex {
        &self.q
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    /// `log|q| = −2π Im τ`.
    pub fn log_abs_q(&self) -> Real {
        let p = self.ctx.prec();
        -Float::with_val(p, self.ctx.pi() * 2u32) * &self.tau.im
    }

    fn exp_2pi_i(&self, pt: &TorsionPoint, sign: i32) -> Complex {
        let p = self.ctx.prec();
        let xi = pt.xi.to_float(p);
        let eta = pt.eta.to_float(p);
        let two_pi = Float::with_val(p, self.ctx.pi() * 2u32);
        // |x| = e^{-2π ξ Im τ}, arg x = 2π(ξ Re τ + η)
        let mut log_mod = Float::with_val(p, &two_pi * &xi) * &self.tau.im;
        if sign > 0 {
            log_mod = -log_mod;
        }
        let modulus = log_mod.exp();
        let mut angle = Float::with_val(p, &xi * &self.tau.re) + &eta;
        angle *= &two_pi;
        if sign < 0 {
            angle = -angle;
        }
        let unit = match unit_root(
            &if sign > 0 {
                pt.eta.clone()
            } else {
                pt.eta.neg()
            },
            self.tau.re.is_zero(),
            &angle,
        ) {
            Some(u) => u,
            None => Complex::cis(&angle),
        };
        unit.scale(&modulus)
    }

    /// `x = e^{2πiu}`.
    pub fn x_of(&self, pt: &TorsionPoint) -> Complex {
        self.exp_2pi_i(pt, 1)
    }

    /// `x^{-1} = e^{-2πiu}`, computed directly.
    pub fn x_inv_of(&self, pt: &TorsionPoint) -> Complex {
        self.exp_2pi_i(pt, -1)
    }

    fn tau_f64(&self) -> Complex64 {
        self.tau.to_f64()
    }

    /// Smallest eigenvalue of the form `|mτ + n|²`, so that
    /// `|mτ+n|² >= λ max(|m|,|n|)²`.
    pub fn form_lambda(&self) -> f64 {
        let t = self.tau_f64();
        let a = t.norm_sqr();
        let b = t.re;
        let tr = a + 1.0;
        let det = a - b * b;
        (tr - (tr * tr - 4.0 * det).max(0.0).sqrt()) / 2.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Tri,
    J3,
    Bw,
    J,
}

/// Upper bound for `|f(z)|` at small `|z| = r`, `l = |log r|`.
fn term_bound(kind: Kind, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let l = -r.ln();
    let geo = r / (1.0 - r);
    match kind {
        Kind::Tri => r * (1.3 + 1.7 * l) + l * l / 3.0 * geo,
        Kind::J3 => l * l * geo,
        Kind::Bw => r * (1.7 + 2.0 * l),
        Kind::J => l * geo,
    }
}

fn eval_kind(kind: Kind, z: &Complex, ctx: &PrecisionContext) -> Result<Real> {
    match kind {
        Kind::Tri => sv_trilog(z, ctx),
        Kind::J3 => j3_weight(z, ctx),
        Kind::Bw => bloch_wigner(z, ctx),
        Kind::J => j_weight(z, ctx),
    }
}

impl CurveContext {
    /// `Σ_{n>=start} f(qⁿ z)` until the term bound drops below the working
    /// epsilon, with a margin for the geometric tail.
    fn one_sided(&self, kind: Kind, z: &Complex, start: u32) -> Result<Real> {
        let ctx = &self.ctx;
        let p = ctx.prec();
        let qabs = self.q.abs().to_f64();
        let eps = ctx.working_eps().to_f64() * (1.0 - qabs) * 1e-2;
        let mut acc = Float::with_val(p, 0);
        let mut w = z.clone();
        for _ in 0..start {
            w = &w * &self.q;
        }
        let mut n = start;
        loop {
            let r = w.abs().to_f64();
            if n > start && r < 0.5 && term_bound(kind, r) < eps {
                break;
            }
            acc += eval_kind(kind, &w, ctx)?;
            w = &w * &self.q;
            n += 1;
            if n > 100_000 {
                return Err(Error::Convergence("q-series did not settle".into()));
            }
        }
        Ok(acc)
    }

    fn log_abs_x(&self, pt: &TorsionPoint) -> Real {
        let p = self.ctx.prec();
        self.log_abs_q() * pt.xi.to_float(p)
    }
}

/// `ℒ^E_{3,1}(x) = Σ_{n∈ℤ} ℒ₃(qⁿx)`; the terms with `n < 0` are
/// `ℒ₃(q^{|n|}/x)` by the inversion symmetry of `ℒ₃`.
pub fn l31_qseries(cc: &CurveContext, pt: &TorsionPoint) -> Result<Real> {
    let x = cc.x_of(pt);
    let xinv = cc.x_inv_of(pt);
    Ok(cc.one_sided(Kind::Tri, &x, 0)? + cc.one_sided(Kind::Tri, &xinv, 1)?)
}

/// `ℒ^E_{3,2}(x) = Σ_{n>=0} J₃(qⁿx) + Σ_{n>=1} J₃(qⁿ/x)
///   + log²|x| log²|q/x| / (4 log|q|)`.
pub fn l32_qseries(cc: &CurveContext, pt: &TorsionPoint) -> Result<Real> {
    let p = cc.ctx.prec();
    let x = cc.x_of(pt);
    let xinv = cc.x_inv_of(pt);
    let sums = cc.one_sided(Kind::J3, &x, 0)? + cc.one_sided(Kind::J3, &xinv, 1)?;
    let lq = cc.log_abs_q();
    let lx = cc.log_abs_x(pt);
    let lqx = Float::with_val(p, &lq - &lx);
    let num = Float::with_val(p, lx.square_ref()) * Float::with_val(p, lqx.square_ref());
    Ok(sums + num / (lq * 4u32))
}

/// `D^E(x) = Σ_{n∈ℤ} ℒ₂(qⁿx) = Σ_{n>=0} ℒ₂(qⁿx) − Σ_{n>=1} ℒ₂(qⁿ/x)`.
pub fn d_e(cc: &CurveContext, pt: &TorsionPoint) -> Result<Real> {
    let x = cc.x_of(pt);
    let xinv = cc.x_inv_of(pt);
    Ok(cc.one_sided(Kind::Bw, &x, 0)? - cc.one_sided(Kind::Bw, &xinv, 1)?)
}

/// `J^E(x) = Σ_{n>=0} J(qⁿx) − Σ_{n>=1} J(qⁿ/x) + ⅓ log²|q| B₃(log|x|/log|q|)`.
pub fn j_e(cc: &CurveContext, pt: &TorsionPoint) -> Result<Real> {
    let p = cc.ctx.prec();
    let x = cc.x_of(pt);
    let xinv = cc.x_inv_of(pt);
    let sums = cc.one_sided(Kind::J, &x, 0)? - cc.one_sided(Kind::J, &xinv, 1)?;
    let lq = cc.log_abs_q();
    let b3 = bernoulli_b3(&pt.xi.to_float(p));
    Ok(sums + Float::with_val(p, lq.square_ref()) * b3 / 3u32)
}

/// `e^{2πi(nξ − mη)}` evaluated from a table of roots of unity when both
/// coordinates are rational.
#[derive(Clone, Debug)]
pub enum Phase {
    Table {
        a: i64,
        b: i64,
        d: i64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    Direct {
        xi: f64,
        eta: f64,
    },
}

impl Phase {
    pub fn new(pt: &TorsionPoint) -> Phase {
        match (pt.xi.as_exact(), pt.eta.as_exact()) {
            (Some(x), Some(e)) => {
                let d = x.denom().lcm(e.denom());
                let a = x.numer() * (d / x.denom());
                let b = e.numer() * (d / e.denom());
                let (cos, sin) = (0..d)
                    .map(|k| match (4 * k) % d == 0 {
                        // exact quarter turns
                        true => match (4 * k / d) % 4 {
                            0 => (1.0, 0.0),
                            1 => (0.0, 1.0),
                            2 => (-1.0, 0.0),
                            _ => (0.0, -1.0),
                        },
                        false => {
                            let t = 2.0 * std::f64::consts::PI * k as f64 / d as f64;
                            (t.cos(), t.sin())
                        }
                    })
                    .unzip();
                Phase::Table { a, b, d, cos, sin }
            }
            _ => Phase::Direct {
                xi: pt.xi.to_f64(),
                eta: pt.eta.to_f64(),
            },
        }
    }

    /// `(cos, sin)` of `2π(nξ − mη)`.
    #[inline]
    pub fn at(&self, m: i64, n: i64) -> (f64, f64) {
        match self {
            Phase::Table { a, b, d, cos, sin } => {
                let k = (n * a - m * b).rem_euclid(*d) as usize;
                (cos[k], sin[k])
            }
            Phase::Direct { xi, eta } => {
                let t = n as f64 * xi - m as f64 * eta;
                let t = (t - t.floor()) * 2.0 * std::f64::consts::PI;
                (t.cos(), t.sin())
            }
        }
    }
}

/// Value of a truncated lattice form together with a bound on the omitted tail.
#[derive(Clone, Debug)]
pub struct LatticeValue {
    pub value: Real,
    pub tail_bound: Real,
    pub radius: u64,
}

const MIN_LATTICE_RADIUS: u64 = 10;

fn check_radius(radius: u64) -> Result<()> {
    if radius < MIN_LATTICE_RADIUS {
        return Err(Error::Precondition(format!(
            "radius must be at least {MIN_LATTICE_RADIUS}"
        )));
    }
    Ok(())
}

/// `ℒ^E_{3,1} = (4 Im(τ)⁵/3π) Re Σ′ e^{2πi(nξ−mη)} m²/|mτ+n|⁶`.
pub fn l31_lattice(cc: &CurveContext, pt: &TorsionPoint, radius: u64) -> Result<LatticeValue> {
    check_radius(radius)?;
    let p = cc.ctx.prec();
    let t = cc.tau_f64();
    let phase = Phase::new(pt);
    let [s] = shell_sum(radius, p, |m, n| {
        let (c, _) = phase.at(m, n);
        let (mf, nf) = (m as f64, n as f64);
        let re = mf * t.re + nf;
        let im = mf * t.im;
        let a2 = re * re + im * im;
        [c * mf * mf / (a2 * a2 * a2)]
    });
    let pi = cc.ctx.pi();
    let im5 = Float::with_val(p, cc.tau.im.pow_ref_u(5));
    let pref = im5 * 4u32 / Float::with_val(p, &pi * 3u32);
    let lambda = cc.form_lambda();
    // m²/|ω|⁶ <= 1/(λ³ r⁴) on shell r; Σ_{r>R} 8r·r⁻⁴ <= 4/R²
    let bound = 4.0 / (lambda.powi(3) * (radius as f64).powi(2));
    let tail = Float::with_val(p, &pref * bound);
    Ok(LatticeValue {
        value: pref * s,
        tail_bound: tail,
        radius,
    })
}

/// `ℒ^E_{3,2} = (Im(τ)³/π)(Σ′ ph/|ω|⁴ + 2 Re Σ′ ph ω²/|ω|⁶) + log³|q|/120`
/// with `ω = mτ + n` and `ph = e^{2πi(nξ−mη)}`.
pub fn l32_lattice(cc: &CurveContext, pt: &TorsionPoint, radius: u64) -> Result<LatticeValue> {
    check_radius(radius)?;
    let p = cc.ctx.prec();
    let t = cc.tau_f64();
    let phase = Phase::new(pt);
    let [s1, s2] = shell_sum(radius, p, |m, n| {
        let (c, s) = phase.at(m, n);
        let (mf, nf) = (m as f64, n as f64);
        let re = mf * t.re + nf;
        let im = mf * t.im;
        let a2 = re * re + im * im;
        let w2re = re * re - im * im;
        let w2im = 2.0 * re * im;
        [c / (a2 * a2), (c * w2re - s * w2im) / (a2 * a2 * a2)]
    });
    let pi = cc.ctx.pi();
    let im3 = Float::with_val(p, cc.tau.im.pow_ref_u(3));
    let pref = Float::with_val(p, &im3 / &pi);
    let lq = cc.log_abs_q();
    let corr = Float::with_val(p, lq.pow_ref_u(3)) / 120u32;
    let lambda = cc.form_lambda();
    // (1 + 2)/|ω|⁴ <= 3/(λ² r⁴); Σ_{r>R} 8r·3 r⁻⁴ <= 12/R²
    let bound = 12.0 / (lambda.powi(2) * (radius as f64).powi(2));
    let tail = Float::with_val(p, &pref * bound);
    let value = pref * (s1 + s2 * 2u32) + corr;
    Ok(LatticeValue {
        value,
        tail_bound: tail,
        radius,
    })
}

trait PowU {
    fn pow_ref_u(&self, k: u32) -> Float;
}

impl PowU for Float {
    fn pow_ref_u(&self, k: u32) -> Float {
        let mut out = Float::with_val(self.prec(), 1);
        for _ in 0..k {
            out *= self;
        }
        out
    }
}

/// Which function to extend linearly to divisors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EllipticFn {
    L31,
    L32,
    De,
    Je,
}

impl EllipticFn {
    pub fn eval(self, cc: &CurveContext, pt: &TorsionPoint) -> Result<Real> {
        match self {
            EllipticFn::L31 => l31_qseries(cc, pt),
            EllipticFn::L32 => l32_qseries(cc, pt),
            EllipticFn::De => d_e(cc, pt),
            EllipticFn::Je => j_e(cc, pt),
        }
    }
}

/// `Σ n_P f(P)`.
pub fn eval_divisor(f: EllipticFn, cc: &CurveContext, div: &Divisor) -> Result<Real> {
    let p = cc.ctx.prec();
    let mut acc = Float::with_val(p, 0);
    for (k, pt) in div.terms() {
        acc += f.eval(cc, pt)? * *k;
    }
    Ok(acc)
}

/// `ℒ_{3,1}(d₁) ℒ_{3,2}(d₂) − ℒ_{3,1}(d₂) ℒ_{3,2}(d₁)`.
pub fn reg3_det(cc: &CurveContext, div1: &Divisor, div2: &Divisor) -> Result<Real> {
    let a = eval_divisor(EllipticFn::L31, cc, div1)?;
    let b = eval_divisor(EllipticFn::L32, cc, div1)?;
    let c = eval_divisor(EllipticFn::L31, cc, div2)?;
    let d = eval_divisor(EllipticFn::L32, cc, div2)?;
    Ok(a * d - b * c)
}

/// The 2×2 matrix entries `[[ℒ₃₁(d₁), ℒ₃₂(d₁)], [ℒ₃₁(d₂), ℒ₃₂(d₂)]]`.
pub fn reg3_matrix(cc: &CurveContext, div1: &Divisor, div2: &Divisor) -> Result<[[Real; 2]; 2]> {
    Ok([
        [
            eval_divisor(EllipticFn::L31, cc, div1)?,
            eval_divisor(EllipticFn::L32, cc, div1)?,
        ],
        [
            eval_divisor(EllipticFn::L31, cc, div2)?,
            eval_divisor(EllipticFn::L32, cc, div2)?,
        ],
    ])
}
