//! Argument parsing and single evaluations behind the `compute` command.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rug::Float;
use serde::Serialize;
use serde_json::{json, Value};

use crate::curve_analytics::{
    congruent_p, congruent_q, elliptic_log, period_lattice, sym2_l_value_direct, CurveModel,
    RationalPoint,
};
use crate::eisenstein_kronecker::{k_ab, EKSeriesSpec};
use crate::elliptic_polylog::{Coord, CurveContext, EllipticFn, TorsionPoint};
use crate::error::{Error, Result};
use crate::hecke_lseries::{f_qexp, g_qexp, l_chi4, l_g_detailed, l_sym2};
use crate::precision::{format_sig, PrecisionContext};
use crate::Complex;

/// `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Parse(format!("malformed rational '{s}', expected p/q"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok((num, den))
}

/// A torus coordinate: exact for `"p/q"`, otherwise a decimal.
pub fn parse_coord(s: &str, ctx: &PrecisionContext) -> Result<Coord> {
    match parse_rational(s) {
        Ok((n, d)) => Coord::exact(n, d),
        Err(e) => {
            if s.contains('/') {
                return Err(e);
            }
            let v = Float::parse(s.trim()).map_err(|_| e)?;
            Ok(Coord::Approx(Float::with_val(ctx.prec(), v)))
        }
    }
}

/// `"i"` or `"re,im"`.
pub fn parse_tau(s: &str, ctx: &PrecisionContext) -> Result<Complex> {
    let p = ctx.prec();
    let s = s.trim();
    if s == "i" {
        return Ok(Complex::i(p));
    }
    let bad = || Error::Parse(format!("malformed τ '{s}', expected 'i' or 're,im'"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re = Float::parse(re.trim()).map_err(|_| bad())?;
    let im = Float::parse(im.trim()).map_err(|_| bad())?;
    let tau = Complex::new(Float::with_val(p, re), Float::with_val(p, im));
    if tau.im <= 0 {
        return Err(Error::Domain("Im(τ) must be positive".into()));
    }
    Ok(tau)
}

/// `"37a"`, `"E<d>"` for `y² = x³ − d²x`, or `"a1,a2,a3,a4,a6"`.
pub fn parse_curve(s: &str) -> Result<CurveModel> {
    let s = s.trim();
    if s == "37a" || s == "37" {
        return Ok(CurveModel::conductor37());
    }
    if let Some(d) = s.strip_prefix('E') {
        let d: i64 = d.parse().map_err(|_| Error::Parse(format!("malformed curve '{s}'")))?;
        return CurveModel::congruent(d);
    }
    let parts: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("malformed curve '{s}'")))?;
    let a: [i64; 5] = parts
        .try_into()
        .map_err(|_| Error::Parse(format!("curve needs five coefficients, got '{s}'")))?;
    CurveModel::new(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    L31,
    L32,
    De,
    Je,
    Kab,
    Lg,
    Lchi4,
    Lsym2,
    Gcoeffs,
    Fcoeffs,
    Periods,
    Elllog,
}

impl Target {
    pub const ALL: [Target; 12] = [
        Target::L31,
        Target::L32,
        Target::De,
        Target::Je,
        Target::Kab,
        Target::Lg,
        Target::Lchi4,
        Target::Lsym2,
        Target::Gcoeffs,
        Target::Fcoeffs,
        Target::Periods,
        Target::Elllog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::L31 => "l31",
            Target::L32 => "l32",
            Target::De => "de",
            Target::Je => "je",
            Target::Kab => "kab",
            Target::Lg => "lg",
            Target::Lchi4 => "lchi4",
            Target::Lsym2 => "lsym2",
            Target::Gcoeffs => "gcoeffs",
            Target::Fcoeffs => "fcoeffs",
            Target::Periods => "periods",
            Target::Elllog => "elllog",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown target '{s}'")))
    }
}

/// Raw string arguments of `compute`; each target reads the ones it needs.
#[derive(Clone, Debug)]
pub struct ComputeArgs {
    pub digits: u32,
    pub radius: u64,
    pub prime_bound: u64,
    pub cache_dir: Option<PathBuf>,
    pub xi: Option<String>,
    pub eta: Option<String>,
    pub tau: String,
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub s: Option<u32>,
    pub t: Option<u32>,
    pub n: Option<usize>,
    pub curve: Option<String>,
    pub x: Option<String>,
    pub y: Option<String>,
    pub point: Option<String>,
}

impl Default for ComputeArgs {
    fn default() -> Self {
        ComputeArgs {
            digits: crate::suites::DEFAULT_DIGITS,
            radius: crate::suites::DEFAULT_RADIUS,
            prime_bound: crate::suites::DEFAULT_PRIME_BOUND,
            cache_dir: None,
            xi: None,
            eta: None,
            tau: "i".into(),
            a: None,
            b: None,
            s: None,
            t: None,
            n: None,
            curve: None,
            x: None,
            y: None,
            point: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComputeOutput {
    pub target: String,
    /// A decimal string, or an object for composite results.
    pub value: Value,
    pub error_bound: String,
    pub params: BTreeMap<String, Value>,
    pub runtime_ms: u64,
}

impl ComputeOutput {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("output serializes")
    }

    pub fn to_text(&self) -> String {
        let value = match &self.value {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        format!("{value}  (error bound {})", self.error_bound)
    }
}

fn need<T: Clone>(v: &Option<T>, flag: &str, target: Target) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::Parse(format!("target {target} needs --{flag}")))
}

fn complex_json(z: &Complex, sig: usize) -> Value {
    json!({"re": format_sig(&z.re, sig), "im": format_sig(&z.im, sig)})
}

fn torsion_point(args: &ComputeArgs, target: Target, ctx: &PrecisionContext) -> Result<TorsionPoint> {
    let xi = parse_coord(&need(&args.xi, "xi", target)?, ctx)?;
    let eta = parse_coord(&need(&args.eta, "eta", target)?, ctx)?;
    TorsionPoint::new(xi, eta)
}

fn curve_point(args: &ComputeArgs, curve: &CurveModel, ctx: &PrecisionContext) -> Result<RationalPoint> {
    if let Some(name) = &args.point {
        let d = match curve.coeffs() {
            [0, 0, 0, a4, 0] if a4 < 0 => (-a4 as f64).sqrt().round() as i64,
            _ => 0,
        };
        if d == 0 || d * d != -curve.coeffs()[3] {
            return Err(Error::Parse("--point P|Q needs a curve E<d>".into()));
        }
        return match name.as_str() {
            "P" => Ok(congruent_p(d)),
            "Q" => Ok(congruent_q(d, ctx)),
            "O" => Ok(RationalPoint::Infinity),
            other => Err(Error::Parse(format!("unknown point '{other}'"))),
        };
    }
    let x = parse_rational(&need(&args.x, "x", Target::Elllog)?)?;
    let y = parse_rational(&need(&args.y, "y", Target::Elllog)?)?;
    Ok(RationalPoint::affine(x, y))
}

fn coeff_line(coeffs: &[i64]) -> String {
    coeffs.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn compute(target: Target, args: &ComputeArgs) -> Result<ComputeOutput> {
    let started = std::time::Instant::now();
    let ctx = PrecisionContext::new(args.digits)?;
    let sig = ctx.digits() as usize;
    let mut params: BTreeMap<String, Value> = BTreeMap::new();
    params.insert("digits".into(), args.digits.into());
    let tol = format_sig(&ctx.tolerance(), 3);
    let (value, error_bound) = match target {
        Target::L31 | Target::L32 | Target::De | Target::Je => {
            let tau = parse_tau(&args.tau, &ctx)?;
            let cc = CurveContext::new(tau, &ctx)?;
            let pt = torsion_point(args, target, &ctx)?;
            let f = match target {
                Target::L31 => EllipticFn::L31,
                Target::L32 => EllipticFn::L32,
                Target::De => EllipticFn::De,
                _ => EllipticFn::Je,
            };
            params.insert("tau".into(), args.tau.clone().into());
            params.insert("point".into(), pt.to_string().into());
            (Value::String(format_sig(&f.eval(&cc, &pt)?, sig)), tol)
        }
        Target::Kab => {
            let tau = parse_tau(&args.tau, &ctx)?;
            let cc = CurveContext::new(tau, &ctx)?;
            let pt = torsion_point(args, target, &ctx)?;
            let a = need(&args.a, "a", target)?;
            let b = need(&args.b, "b", target)?;
            let k = k_ab(&cc, &EKSeriesSpec::new(a, b, pt.clone(), args.radius))?;
            params.insert("tau".into(), args.tau.clone().into());
            params.insert("point".into(), pt.to_string().into());
            params.insert("a".into(), a.into());
            params.insert("b".into(), b.into());
            params.insert("radius".into(), args.radius.into());
            (
                json!({"re": format!("{:.17e}", k.value.re), "im": format!("{:.17e}", k.value.im)}),
                format!("{:.3e}", k.tail_bound),
            )
        }
        Target::Lg => {
            let s = args.s.unwrap_or(3);
            let v = l_g_detailed(s, &ctx)?;
            params.insert("s".into(), s.into());
            params.insert("root_number".into(), v.epsilon.into());
            params.insert("terms".into(), v.terms.into());
            (Value::String(format_sig(&v.value, sig)), format!("{:.3e}", v.split_discrepancy.max(ctx.tolerance().to_f64())))
        }
        Target::Lchi4 => {
            let t = need(&args.t, "t", target)?;
            params.insert("t".into(), t.into());
            (Value::String(format_sig(&l_chi4(t, &ctx)?, sig)), tol)
        }
        Target::Lsym2 => match &args.curve {
            None => {
                params.insert("curve".into(), "E_d".into());
                (Value::String(format_sig(&l_sym2(3, &ctx)?, sig)), tol)
            }
            Some(c) => {
                let curve = parse_curve(c)?;
                let v = sym2_l_value_direct(&curve, 3, args.prime_bound, args.cache_dir.as_deref(), &ctx)?;
                params.insert("curve".into(), c.clone().into());
                params.insert("prime_bound".into(), args.prime_bound.into());
                (Value::String(format_sig(&v.value, sig)), format!("{:.3e}", v.drift))
            }
        },
        Target::Gcoeffs | Target::Fcoeffs => {
            let n = need(&args.n, "N", target)?;
            let q = if target == Target::Gcoeffs { g_qexp(n)? } else { f_qexp(n)? };
            params.insert("N".into(), n.into());
            (Value::String(coeff_line(q.coeffs())), "0".into())
        }
        Target::Periods => {
            let name = need(&args.curve, "curve", target)?;
            let curve = parse_curve(&name)?;
            let per = period_lattice(&curve, &ctx)?;
            params.insert("curve".into(), name.into());
            (
                json!({
                    "omega1": complex_json(&per.omega1, sig),
                    "omega2": complex_json(&per.omega2, sig),
                    "tau": complex_json(&per.tau, sig),
                    "real_period": format_sig(&per.real_period, sig),
                }),
                tol,
            )
        }
        Target::Elllog => {
            let name = need(&args.curve, "curve", target)?;
            let curve = parse_curve(&name)?;
            let per = period_lattice(&curve, &ctx)?;
            let pt = curve_point(args, &curve, &ctx)?;
            let log = elliptic_log(&curve, &pt, &per, &ctx)?;
            params.insert("curve".into(), name.into());
            (
                json!({
                    "u": complex_json(&log.u, sig),
                    "xi": format_sig(&log.xi, sig),
                    "eta": format_sig(&log.eta, sig),
                    "point": log.point.to_string(),
                }),
                tol,
            )
        }
    };
    Ok(ComputeOutput {
        target: target.name().into(),
        value,
        error_bound,
        params,
        runtime_ms: started.elapsed().as_millis() as u64,
    })
}
