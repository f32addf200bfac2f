//! Classical polylogarithms `Li_1..Li_3` on the closed unit disk and the
//! single-valued combinations built from them.

use rug::ops::Pow;
use rug::Float;

use crate::complex::Complex;
use crate::error::{domain, Error, Result};
use crate::precision::{bernoulli_numbers, zeta_int, PrecisionContext, Real};

/// Radius separating the direct power series from the expansion in `log z`.
pub const INTERIOR_RADIUS: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Special {
    One,
    MinusOne,
    I,
    MinusI,
}

fn special_point(z: &Complex) -> Option<Special> {
    let (re, im) = (&z.re, &z.im);
    if im.is_zero() {
        if *re == 1 {
            return Some(Special::One);
        }
        if *re == -1 {
            return Some(Special::MinusOne);
        }
    } else if re.is_zero() {
        if *im == 1 {
            return Some(Special::I);
        }
        if *im == -1 {
            return Some(Special::MinusI);
        }
    }
    None
}

fn check_disk(z: &Complex, ctx: &PrecisionContext) -> Result<()> {
    let limit = Float::with_val(ctx.prec(), 1) + ctx.tolerance();
    if z.abs() > limit {
        return Err(domain(
            "polylogarithm argument outside the closed unit disk",
        ));
    }
    Ok(())
}

/// `Li_m(z)` for `m ∈ {1,2,3}` and `|z| <= 1`.
///
/// The points `±1, ±i` use closed forms in `ζ`, `β`, `π` and `log 2`.
pub fn li(m: u32, z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    if !(1..=3).contains(&m) {
        return Err(Error::Unsupported(format!("Li_{m} is not implemented")));
    }
    check_disk(z, ctx)?;
    match special_point(z) {
        Some(pt) => li_closed_form(m, pt, ctx),
        None => li_series(m, z, ctx),
    }
}

fn li_closed_form(m: u32, pt: Special, ctx: &PrecisionContext) -> Result<Complex> {
    let p = ctx.prec();
    let pi = ctx.pi();
    let zero = || Float::with_val(p, 0);
    let value = match (m, pt) {
        (1, Special::One) => return Err(domain("Li_1 diverges at z = 1")),
        (1, Special::MinusOne) => Complex::new(-ctx.ln2(), zero()),
        // -log(1 ∓ i) = -(log 2)/2 ± iπ/4
        (1, Special::I) => Complex::new(-ctx.ln2() / 2u32, Float::with_val(p, &pi / 4u32)),
        (1, Special::MinusI) => Complex::new(-ctx.ln2() / 2u32, -Float::with_val(p, &pi / 4u32)),
        (2, Special::One) => Complex::new(Float::with_val(p, pi.square_ref()) / 6u32, zero()),
        (2, Special::MinusOne) => {
            Complex::new(-Float::with_val(p, pi.square_ref()) / 12u32, zero())
        }
        (2, Special::I) => {
            Complex::new(-Float::with_val(p, pi.square_ref()) / 48u32, ctx.catalan())
        }
        (2, Special::MinusI) => {
            Complex::new(-Float::with_val(p, pi.square_ref()) / 48u32, -ctx.catalan())
        }
        (3, Special::One) => Complex::new(ctx.zeta3(), zero()),
        (3, Special::MinusOne) => Complex::new(-ctx.zeta3() * 3u32 / 4u32, zero()),
        (3, Special::I) => Complex::new(
            -ctx.zeta3() * 3u32 / 32u32,
            Float::with_val(p, (&pi).pow(3u32)) / 32u32,
        ),
        (3, Special::MinusI) => Complex::new(
            -ctx.zeta3() * 3u32 / 32u32,
            -Float::with_val(p, (&pi).pow(3u32)) / 32u32,
        ),
        _ => unreachable!("m checked by caller"),
    };
    Ok(value)
}

/// `Li_m(z)` without the closed-form shortcuts: the power series inside
/// `|z| < 0.9`, the expansion in `w = log z` on the band `0.9 <= |z| <= 1`.
pub fn li_series(m: u32, z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    if !(1..=3).contains(&m) {
        return Err(Error::Unsupported(format!("Li_{m} is not implemented")));
    }
    let p = ctx.prec();
    if special_point(z) == Some(Special::One) {
        return match m {
            1 => Err(domain("Li_1 diverges at z = 1")),
            _ => Ok(Complex::real(zeta_int(m, ctx)?)),
        };
    }
    if m == 1 {
        let one = Complex::one(p);
        return Ok(-&(&one - z).ln());
    }
    let r = z.abs().to_f64();
    if r < INTERIOR_RADIUS {
        Ok(li_power_series(m, z, r, ctx))
    } else {
        li_log_series(m, z, ctx)
    }
}

fn li_power_series(m: u32, z: &Complex, r: f64, ctx: &PrecisionContext) -> Complex {
    let p = ctx.prec();
    let mut sum = Complex::zero(p);
    if r == 0.0 {
        return sum;
    }
    // stop once r^n/(1-r) is below the working epsilon
    let target = -(f64::from(ctx.working_digits()) + 2.0) * std::f64::consts::LN_10;
    let slack = (1.0 - r).ln();
    let mut power = z.clone();
    let mut n = 1u64;
    loop {
        let denom = Float::with_val(p, n).pow(m);
        sum = &sum
            + &Complex::new(
                Float::with_val(p, &power.re / &denom),
                Float::with_val(p, &power.im / &denom),
            );
        if (n as f64) * r.ln() - slack < target {
            break;
        }
        power = &power * z;
        n += 1;
    }
    sum
}

/// `Li_m(z) = Σ_{k≠m-1} ζ(m-k) w^k/k! + w^{m-1}/(m-1)! (H_{m-1} - log(-w))`,
/// valid for `|w| < 2π`.
fn li_log_series(m: u32, z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let p = ctx.prec();
    let w = z.ln();
    let wabs = w.abs().to_f64();
    if wabs >= 2.0 * std::f64::consts::PI * 0.95 {
        return Err(Error::Convergence(
            "log-series for Li_m needs |log z| well below 2π".into(),
        ));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let log_eps = -(f64::from(ctx.working_digits()) + 2.0) * std::f64::consts::LN_10;
    let bern = bernoulli_numbers(2 * ctx.prec() as usize + 16);

    let mut sum = Complex::zero(p);
    let mut w_pow = Complex::one(p); // w^k / k!
    let mut k: u32 = 0;
    loop {
        if k != m - 1 {
            let order = i64::from(m) - i64::from(k);
            let zeta = if order >= 2 {
                Some(zeta_int(order as u32, ctx)?)
            } else {
                // ζ(-j) = (-1)^j B_{j+1}/(j+1) for j >= 0
                let j = (-order) as usize;
                if j + 1 >= bern.len() {
                    return Err(Error::Convergence("Bernoulli table exhausted".into()));
                }
                let b = &bern[j + 1];
                if *b == 0 {
                    None
                } else {
                    let mut v = Float::with_val(p, b) / (j as u32 + 1);
                    if j % 2 == 1 {
                        v = -v;
                    }
                    Some(v)
                }
            };
            if let Some(zeta) = zeta {
                sum = &sum + &w_pow.scale(&zeta);
            }
        }
        // |ζ(m-k)| w^k/k! <~ 4 (2π)^{m} (|w|/2π)^k once k > m
        if k > m + 1 {
            let bound =
                (4.0f64).ln() + f64::from(m) * two_pi.ln() + f64::from(k) * (wabs / two_pi).ln();
            if bound < log_eps {
                break;
            }
        }
        k += 1;
        w_pow = &w_pow * &w;
        w_pow = w_pow.scale(&Float::with_val(p, Float::with_val(p, k).recip_ref()));
    }
    // singular term
    let harmonic: f64 = (1..m).map(|j| 1.0 / f64::from(j)).sum();
    let mut fact = 1u32;
    for j in 1..m {
        fact *= j;
    }
    let log_minus_w = (-&w).ln();
    let h = Complex::real(Float::with_val(p, harmonic));
    let bracket = &h - &log_minus_w;
    let w_m1 = w
        .powi(i64::from(m) - 1)
        .scale(&Float::with_val(p, Float::with_val(p, fact).recip_ref()));
    Ok(&sum + &(&w_m1 * &bracket))
}

fn log_abs(z: &Complex) -> Float {
    let p = z.prec();
    Float::with_val(p, z.abs().ln_ref())
}

/// Single-valued trilogarithm
/// `ℒ₃(z) = Re(Li₃(z) − log|z| Li₂(z) + ⅓ log²|z| Li₁(z))`.
///
/// Outside the unit disk the inversion `ℒ₃(z) = ℒ₃(1/z)` is used.
pub fn sv_trilog(z: &Complex, ctx: &PrecisionContext) -> Result<Real> {
    if z.is_zero() {
        return Err(domain("ℒ₃ is undefined at 0"));
    }
    let p = ctx.prec();
    let one = Float::with_val(p, 1);
    let z = if z.abs() > one { z.recip() } else { z.clone() };
    if special_point(&z) == Some(Special::One) {
        return Ok(ctx.zeta3());
    }
    let l = log_abs(&z);
    let li3 = li(3, &z, ctx)?;
    if l.is_zero() {
        return Ok(li3.re);
    }
    let li2 = li(2, &z, ctx)?;
    let li1 = li(1, &z, ctx)?;
    let l2 = Float::with_val(p, l.square_ref());
    let value =
        li3.re - Float::with_val(p, &l * &li2.re) + Float::with_val(p, &l2 * &li1.re) / 3u32;
    Ok(value)
}

/// Bloch–Wigner dilogarithm `ℒ₂(z) = Im Li₂(z) + arg(1−z) log|z|`, extended by
/// `ℒ₂(z) = −ℒ₂(1/z)`; zero at the removable points `0` and `1`.
pub fn bloch_wigner(z: &Complex, ctx: &PrecisionContext) -> Result<Real> {
    let p = ctx.prec();
    if z.is_zero() || special_point(z) == Some(Special::One) {
        return Ok(Float::with_val(p, 0));
    }
    if z.abs() > 1 {
        return Ok(-bloch_wigner(&z.recip(), ctx)?);
    }
    let li2 = li(2, z, ctx)?;
    let one_minus = &Complex::one(p) - z;
    let l = log_abs(z);
    Ok(li2.im + Float::with_val(p, &l * &one_minus.arg()))
}

/// `J(z) = log|z| log|1−z|`, defined as 0 wherever `log|z| = 0`.
pub fn j_weight(z: &Complex, ctx: &PrecisionContext) -> Result<Real> {
    let p = ctx.prec();
    if z.is_zero() {
        return Err(domain("J is undefined at 0"));
    }
    let l = log_abs(z);
    if l.is_zero() {
        return Ok(Float::with_val(p, 0));
    }
    let one_minus = &Complex::one(p) - z;
    if one_minus.is_zero() {
        return Err(domain("J is singular at 1"));
    }
    Ok(l * log_abs(&one_minus))
}

/// `J₃(z) = log²|z| log|1−z|`, defined as 0 wherever `log|z| = 0`.
pub fn j3_weight(z: &Complex, ctx: &PrecisionContext) -> Result<Real> {
    let p = ctx.prec();
    if z.is_zero() {
        return Err(domain("J₃ is undefined at 0"));
    }
    let l = log_abs(z);
    if l.is_zero() {
        return Ok(Float::with_val(p, 0));
    }
    let one_minus = &Complex::one(p) - z;
    if one_minus.is_zero() {
        return Err(domain("J₃ is singular at 1"));
    }
    Ok(Float::with_val(p, l.square_ref()) * log_abs(&one_minus))
}

/// `B₃(X) = X³ − 3X²/2 + X/2`.
pub fn bernoulli_b3(x: &Real) -> Real {
    let p = x.prec();
    let x2 = Float::with_val(p, x.square_ref());
    let x3 = Float::with_val(p, &x2 * x);
    x3 - x2 * 3u32 / 2u32 + Float::with_val(p, x / 2u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(25).unwrap()
    }

    fn cx(c: &PrecisionContext, re: f64, im: f64) -> Complex {
        Complex::from_f64(c.prec(), re, im)
    }

    fn assert_close(a: &Float, b: &Float, tol: &Float, what: &str) {
        let d = Float::with_val(a.prec(), a - b).abs();
        assert!(d < *tol, "{what}: {a} vs {b} (diff {d})");
    }

    #[test]
    fn closed_forms_at_one_and_minus_one() {
        let c = ctx();
        let z3 = c.zeta3();
        let li3_one = li(3, &cx(&c, 1.0, 0.0), &c).unwrap();
        assert_close(&li3_one.re, &z3, &c.tolerance(), "Li3(1)");
        let li3_m1 = li(3, &cx(&c, -1.0, 0.0), &c).unwrap();
        assert_close(&li3_m1.re, &(-z3 * 3u32 / 4u32), &c.tolerance(), "Li3(-1)");
        assert!(li(1, &cx(&c, 1.0, 0.0), &c).is_err());
        assert!(li(2, &cx(&c, 1.0, 0.5), &c).is_err());
    }

    #[test]
    fn li2_at_i_by_residue_split() {
        // Σ i^n/n²: real part −Σ_{k≥1} 1/(2k)² + Σ 1/(4k)² = −π²/48, imaginary part β(2)
        let c = ctx();
        let v = li(2, &cx(&c, 0.0, 1.0), &c).unwrap();
        let pi = c.pi();
        let expect_re = -Float::with_val(c.prec(), pi.square_ref()) / 48u32;
        assert_close(&v.re, &expect_re, &c.tolerance(), "Re Li2(i)");
        assert_close(&v.im, &c.catalan(), &c.tolerance(), "Im Li2(i)");
    }

    #[test]
    fn series_route_matches_closed_forms() {
        let c = ctx();
        for (re, im) in [(-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let z = cx(&c, re, im);
            for m in 1..=3 {
                let closed = li(m, &z, &c).unwrap();
                let series = li_series(m, &z, &c).unwrap();
                assert!(
                    (&closed - &series).abs() < c.tolerance(),
                    "Li{m}({re},{im})"
                );
            }
        }
    }

    #[test]
    fn band_and_interior_agree_across_the_split() {
        // evaluate just inside the split both ways: power series vs log-series
        let c = ctx();
        let z = cx(&c, 0.6, 0.65); // |z| ≈ 0.885
        let r = z.abs().to_f64();
        for m in 2..=3 {
            let a = li_power_series(m, &z, r, &c);
            let b = li_log_series(m, &z, &c).unwrap();
            assert!((&a - &b).abs() < c.tolerance(), "m={m}");
        }
    }

    #[test]
    fn sv_trilog_special_values() {
        let c = ctx();
        let one = sv_trilog(&cx(&c, 1.0, 0.0), &c).unwrap();
        assert_close(&one, &c.zeta3(), &c.tolerance(), "ℒ₃(1)");
        // Re Li3(i) = Σ cos(nπ/2)/n³ = −(3/4)ζ(3)/8
        let at_i = sv_trilog(&cx(&c, 0.0, 1.0), &c).unwrap();
        let expect = -c.zeta3() * 3u32 / 32u32;
        assert_close(&at_i, &expect, &c.tolerance(), "ℒ₃(i)");
        assert!(sv_trilog(&cx(&c, 0.0, 0.0), &c).is_err());
    }

    #[test]
    fn sv_trilog_inversion_by_independent_series() {
        // ℒ₃(1/z) computed through the log-band expansion of the inverted point
        // against the power series at z itself
        let c = ctx();
        let z = cx(&c, 0.3, 0.4);
        let direct = sv_trilog(&z, &c).unwrap();
        let inv = sv_trilog(&z.recip(), &c).unwrap();
        assert_close(&direct, &inv, &c.tolerance(), "inversion");
    }

    #[test]
    fn sv_trilog_boundary_continuity() {
        let c = ctx();
        let theta = c.float(0.7);
        let on = sv_trilog(&Complex::cis(&theta), &c).unwrap();
        let inside = Complex::cis(&theta).scale_f64(1.0 - 1e-14);
        let near = sv_trilog(&inside, &c).unwrap();
        let tol = c.float(1e-12);
        assert_close(&on, &near, &tol, "radial limit");
    }

    #[test]
    fn bloch_wigner_values() {
        let c = ctx();
        assert!(bloch_wigner(&cx(&c, 0.37, 0.0), &c).unwrap().abs() < c.tolerance());
        let at_i = bloch_wigner(&cx(&c, 0.0, 1.0), &c).unwrap();
        assert_close(&at_i, &c.catalan(), &c.tolerance(), "D(i)");
        assert!(bloch_wigner(&cx(&c, 1.0, 0.0), &c).unwrap().is_zero());
        assert!(bloch_wigner(&cx(&c, 0.0, 0.0), &c).unwrap().is_zero());
        // inversion antisymmetry
        let z = cx(&c, 1.4, -2.2);
        let a = bloch_wigner(&z, &c).unwrap();
        let b = bloch_wigner(&z.recip(), &c).unwrap();
        assert!(Float::with_val(c.prec(), &a + &b).abs() < c.tolerance());
    }

    #[test]
    fn weights() {
        let c = ctx();
        assert!(j3_weight(&cx(&c, 1.0, 0.0), &c).unwrap().is_zero());
        assert!(j3_weight(&cx(&c, -1.0, 0.0), &c).unwrap().is_zero());
        assert!(j_weight(&cx(&c, 1.0, 0.0), &c).unwrap().is_zero());
        let pi = c.pi();
        let x = Float::with_val(c.prec(), -&pi).exp();
        let j = j_weight(&Complex::real(x.clone()), &c).unwrap();
        let expect = Float::with_val(c.prec(), -&pi) * Float::with_val(c.prec(), 1 - x).ln();
        assert_close(&j, &expect, &c.tolerance(), "J(e^-π)");
        for v in [0.0, 1.0, 0.5] {
            assert!(bernoulli_b3(&c.float(v)).is_zero(), "B3({v})");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn conjugation_symmetries(re in -3.0f64..3.0, im in -3.0f64..3.0) {
            prop_assume!(re.hypot(im) > 1e-3 && (re - 1.0).hypot(im) > 1e-3);
            let c = PrecisionContext::new(20).unwrap();
            let z = cx(&c, re, im);
            let zb = z.conj();
            let l3 = sv_trilog(&z, &c).unwrap();
            let l3b = sv_trilog(&zb, &c).unwrap();
            prop_assert!(Float::with_val(c.prec(), &l3 - &l3b).abs() < c.tolerance());
            let d = bloch_wigner(&z, &c).unwrap();
            let db = bloch_wigner(&zb, &c).unwrap();
            prop_assert!(Float::with_val(c.prec(), &d + &db).abs() < c.tolerance());
        }
    }
}
