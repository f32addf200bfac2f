//! Eisenstein–Kronecker series
//! `K_{a,b}(τ;u) = Σ′ e^{2πi(nξ−mη)} / ((mτ+n)^a (mτ̄+n)^b)`,
//! the regulator `R^E` built from `K_{1,2}` / `K_{2,1}`, and the determinant
//! relation between the `K`-matrix and the `ℒ₃`-matrix.

use std::time::Instant;

use num_complex::Complex64;
use rug::Float;

use crate::elliptic_polylog::{reg3_det, CurveContext, Divisor, Phase, TorsionPoint};
use crate::error::{Error, Result};
use crate::lattice_sum_engine::shell_sum;
use crate::report::VerificationReport;

#[derive(Clone, Debug)]
pub struct EKSeriesSpec {
    pub a: u32,
    pub b: u32,
    pub point: TorsionPoint,
    pub radius: u64,
}

impl EKSeriesSpec {
    pub fn new(a: u32, b: u32, point: TorsionPoint, radius: u64) -> Self {
        EKSeriesSpec {
            a,
            b,
            point,
            radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a == 0 || self.b == 0 || self.a + self.b < 3 {
            return Err(Error::Unsupported(format!(
                "K_{{{},{}}} needs a, b >= 1 and a + b >= 3",
                self.a, self.b
            )));
        }
        if self.radius == 0 {
            return Err(Error::Precondition("radius must be positive".into()));
        }
        Ok(())
    }

    /// Weight-3 sums have terms of size `|ω|^-3`; they still converge
    /// absolutely but the tail only decays like `1/R`.
    pub fn is_slow(&self) -> bool {
        self.a + self.b == 3
    }
}

/// A truncated `K_{a,b}` value.
#[derive(Clone, Copy, Debug)]
pub struct KValue {
    pub value: Complex64,
    /// Bound on `Σ_{max(|m|,|n|) > R} |term|`.
    pub tail_bound: f64,
    pub radius: u64,
}

#[inline]
fn cpow(z: Complex64, k: u32) -> Complex64 {
    let mut out = Complex64::new(1.0, 0.0);
    for _ in 0..k {
        out *= z;
    }
    out
}

/// `K_{a,b}(τ; u)` by expanding squares.
pub fn k_ab(cc: &CurveContext, spec: &EKSeriesSpec) -> Result<KValue> {
    spec.validate()?;
    let tau = cc.tau().to_f64();
    let phase = Phase::new(&spec.point);
    let (a, b) = (spec.a, spec.b);
    let [re, im] = shell_sum(spec.radius, 64, |m, n| {
        let (c, s) = phase.at(m, n);
        let w = Complex64::new(m as f64 * tau.re + n as f64, m as f64 * tau.im);
        let inv = w.inv();
        let t = Complex64::new(c, s) * cpow(inv, a) * cpow(inv.conj(), b);
        [t.re, t.im]
    });
    let k = f64::from(a + b);
    let lambda = cc.form_lambda();
    let r = spec.radius as f64;
    let tail = 8.0 * lambda.powf(-k / 2.0) * r.powf(2.0 - k) / (k - 2.0);
    Ok(KValue {
        value: Complex64::new(re.to_f64(), im.to_f64()),
        tail_bound: tail,
        radius: spec.radius,
    })
}

/// `Σ n_P K_{a,b}(τ; u_P)`, one pass per point.
pub fn k_divisor(cc: &CurveContext, a: u32, b: u32, div: &Divisor, radius: u64) -> Result<KValue> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    for (k, pt) in div.terms() {
        let v = k_ab(cc, &EKSeriesSpec::new(a, b, pt.clone(), radius))?;
        value += v.value * *k as f64;
        tail += v.tail_bound * (*k as f64).abs();
    }
    Ok(KValue {
        value,
        tail_bound: tail,
        radius,
    })
}

fn regulator_scale(cc: &CurveContext) -> f64 {
    let im = cc.tau().im.to_f64();
    im * im / std::f64::consts::PI
}

/// Bloch regulator with real part `D^E` and imaginary part `J^E`:
/// `R^E = Im(τ)²/π · K_{1,2}(τ;u)`.
///
/// With the phase `e^{2πi(nξ−mη)}`, the printed form `Im(τ)²/π · K_{2,1}`
/// equals `−conj` of this value; see [`r_e_printed`].
pub fn r_e(cc: &CurveContext, pt: &TorsionPoint, radius: u64) -> Result<KValue> {
    let k = k_ab(cc, &EKSeriesSpec::new(1, 2, pt.clone(), radius))?;
    let s = regulator_scale(cc);
    Ok(KValue {
        value: k.value * s,
        tail_bound: k.tail_bound * s,
        radius,
    })
}

/// `Im(τ)²/π · K_{2,1}(τ;u)` exactly as written; its real part is `−D^E`.
pub fn r_e_printed(cc: &CurveContext, pt: &TorsionPoint, radius: u64) -> Result<KValue> {
    let k = k_ab(cc, &EKSeriesSpec::new(2, 1, pt.clone(), radius))?;
    let s = regulator_scale(cc);
    Ok(KValue {
        value: k.value * s,
        tail_bound: k.tail_bound * s,
        radius,
    })
}

/// The two determinants of the degree-zero divisor pair:
/// `det[ℒ_{3,1}, ℒ_{3,2}]` and `−(2 Im(τ)⁶/π²) det[Re K_{1,3}, K_{2,2}]`.
pub struct KDetComparison {
    pub l_det: Float,
    pub k_det: f64,
    pub k_tail_bound: f64,
}

pub fn k_det_values(
    cc: &CurveContext,
    div1: &Divisor,
    div2: &Divisor,
    radius: u64,
) -> Result<KDetComparison> {
    for (name, d) in [("first", div1), ("second", div2)] {
        if d.degree() != 0 {
            return Err(Error::Precondition(format!(
                "{name} divisor has degree {}, expected 0",
                d.degree()
            )));
        }
    }
    let l_det = reg3_det(cc, div1, div2)?;
    let k13_1 = k_divisor(cc, 1, 3, div1, radius)?;
    let k22_1 = k_divisor(cc, 2, 2, div1, radius)?;
    let k13_2 = k_divisor(cc, 1, 3, div2, radius)?;
    let k22_2 = k_divisor(cc, 2, 2, div2, radius)?;
    let im = cc.tau().im.to_f64();
    let pref = -2.0 * im.powi(6) / (std::f64::consts::PI * std::f64::consts::PI);
    let det = k13_1.value.re * k22_2.value.re - k13_2.value.re * k22_1.value.re;
    // first-order propagation of the entry bounds
    let err = k13_1.tail_bound * k22_2.value.re.abs()
        + k13_1.value.re.abs() * k22_2.tail_bound
        + k13_2.tail_bound * k22_1.value.re.abs()
        + k13_2.value.re.abs() * k22_1.tail_bound;
    Ok(KDetComparison {
        l_det,
        k_det: pref * det,
        k_tail_bound: pref.abs() * err,
    })
}

/// Ratio test of the two determinants; passes when `|ratio − 1| <= rel_tol`.
pub fn k_det_relation_check(
    cc: &CurveContext,
    div1: &Divisor,
    div2: &Divisor,
    radius: u64,
    rel_tol: f64,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let ctx = cc.ctx();
    let p = ctx.prec();
    let v = k_det_values(cc, div1, div2, radius)?;
    let rhs = Float::with_val(p, v.k_det);
    let scale = Float::with_val(p, v.l_det.abs_ref()).max(&Float::with_val(p, f64::MIN_POSITIVE));
    let tol = Float::with_val(p, &scale * rel_tol);
    let ratio = if v.l_det.is_zero() {
        f64::NAN
    } else {
        v.k_det / v.l_det.to_f64()
    };
    Ok(
        VerificationReport::compare("kdet", &v.l_det, &rhs, &tol, ctx, started)
            .param("radius", radius)
            .param("ratio", format!("{ratio:.12}"))
            .param("k_tail_bound", format!("{:.3e}", v.k_tail_bound)),
    )
}
