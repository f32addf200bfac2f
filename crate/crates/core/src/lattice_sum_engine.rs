//! Restricted Epstein-type sums `Σ′ w(m,n)·mask(m,n) / (m² + c n²)^s` over
//! expanding squares `max(|m|,|n|) <= R`.
//!
//! Shells are summed independently in machine precision with compensation and
//! merged in shell order into an arbitrary-precision accumulator, so results
//! do not depend on the thread count.

use std::time::Instant;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::error::{domain, Result};
use crate::precision::{dirichlet_beta, zeta_int, NeumaierSum, PrecisionContext, Real};
use crate::report::VerificationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    One,
    M2,
    N2,
    M2MinusN2,
    M2Minus4N2,
}

impl Weight {
    pub fn degree(self) -> u32 {
        match self {
            Weight::One => 0,
            _ => 2,
        }
    }

    #[inline]
    fn eval(self, m: f64, n: f64) -> f64 {
        match self {
            Weight::One => 1.0,
            Weight::M2 => m * m,
            Weight::N2 => n * n,
            Weight::M2MinusN2 => m * m - n * n,
            Weight::M2Minus4N2 => m * m - 4.0 * n * n,
        }
    }

    /// `sup |w(m,n)| / max(|m|,|n|)^deg`.
    fn sup_ratio(self) -> f64 {
        match self {
            Weight::M2Minus4N2 => 4.0,
            _ => 1.0,
        }
    }
}

/// Parity and sign restrictions on `(m, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mask {
    All,
    MEven,
    NEven,
    BothEven,
    MOdd,
    NOdd,
    MOddNEven,
    MEvenNOdd,
    /// `(-1)^m`
    SignM,
    /// `(-1)^n`
    SignN,
    /// `(-1)^m - (-1)^n`
    SignMMinusSignN,
}

impl Mask {
    #[inline]
    fn eval(self, m: i64, n: i64) -> f64 {
        let me = m & 1 == 0;
        let ne = n & 1 == 0;
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        let sign = |e: bool| if e { 1.0 } else { -1.0 };
        match self {
            Mask::All => 1.0,
            Mask::MEven => ind(me),
            Mask::NEven => ind(ne),
            Mask::BothEven => ind(me && ne),
            Mask::MOdd => ind(!me),
            Mask::NOdd => ind(!ne),
            Mask::MOddNEven => ind(!me && ne),
            Mask::MEvenNOdd => ind(me && !ne),
            Mask::SignM => sign(me),
            Mask::SignN => sign(ne),
            Mask::SignMMinusSignN => sign(me) - sign(ne),
        }
    }

    fn sup(self) -> f64 {
        match self {
            Mask::SignMMinusSignN => 2.0,
            _ => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSumSpec {
    pub weight: Weight,
    pub mask: Mask,
    /// `c` in the form `m² + c n²`; 1 or 4.
    pub form_c: u32,
    pub s: f64,
    pub radius: u64,
}

impl LatticeSumSpec {
    pub fn new(weight: Weight, mask: Mask, form_c: u32, s: f64, radius: u64) -> Self {
        LatticeSumSpec {
            weight,
            mask,
            form_c,
            s,
            radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s.is_finite() && 2.0 * self.s - f64::from(self.weight.degree()) > 2.0) {
            return Err(domain(format!(
                "lattice sum diverges: 2s - deg(weight) must exceed 2 (s = {}, deg = {})",
                self.s,
                self.weight.degree()
            )));
        }
        if self.form_c != 1 && self.form_c != 4 {
            return Err(domain(format!(
                "unsupported quadratic form m² + {}n²",
                self.form_c
            )));
        }
        if self.radius == 0 {
            return Err(domain("radius must be positive"));
        }
        Ok(())
    }

    #[inline]
    fn term(&self, m: i64, n: i64, int_s: Option<i32>) -> f64 {
        let mask = self.mask.eval(m, n);
        if mask == 0.0 {
            return 0.0;
        }
        let (mf, nf) = (m as f64, n as f64);
        let q = mf * mf + f64::from(self.form_c) * nf * nf;
        let denom = match int_s {
            Some(k) => q.powi(k),
            None => q.powf(self.s),
        };
        mask * self.weight.eval(mf, nf) / denom
    }

    /// Closed-form bound on `|Σ_{max(|m|,|n|) > R}|`.
    ///
    /// Shell `r` has `8r` points with `m² + c n² >= r²`, so the tail is at most
    /// `8 M W Σ_{r>R} r^{1+deg-2s} <= 8 M W R^{2+deg-2s} / (2s-deg-2)`.
    pub fn tail_bound(&self, ctx: &PrecisionContext) -> Real {
        let p = ctx.prec();
        let deg = f64::from(self.weight.degree());
        let expo = 2.0 * self.s - deg - 2.0;
        let c = 8.0 * self.mask.sup() * self.weight.sup_ratio() / expo;
        let r = Float::with_val(p, self.radius);
        Float::with_val(p, c) * r.pow(Float::with_val(p, -expo))
    }
}

#[derive(Clone, Debug)]
pub struct LatticeSum {
    pub value: Real,
    /// Closed-form tail bound plus `rounding_bound`.
    pub tail_bound: Real,
    /// `16 ε Σ|term|` for the f64 evaluation of the individual terms.
    pub rounding_bound: Real,
    pub radius: u64,
    pub terms: u64,
}

/// Visit the shell `max(|m|,|n|) = r` (r >= 1) pairing `(m,n)` with `(n,m)`:
/// the callback receives both points and their contributions are added
/// together, so weights antisymmetric under the swap cancel exactly.
#[inline]
pub fn visit_shell<F: FnMut(i64, i64, i64, i64)>(r: i64, mut f: F) {
    for &m in &[r, -r] {
        for n in -(r - 1)..=(r - 1) {
            f(m, n, n, m);
        }
    }
    f(r, r, -r, -r);
    f(r, -r, -r, r);
}

/// Compensated per-shell sums of `K` simultaneous series `term(m, n)` over
/// `1 <= max(|m|,|n|) <= radius`, merged in shell order at `prec` bits.
pub fn shell_sum<const K: usize, F>(radius: u64, prec: u32, term: F) -> [Real; K]
where
    F: Fn(i64, i64) -> [f64; K] + Sync,
{
    let shells: Vec<[NeumaierSum; K]> = (1..=radius as i64)
        .into_par_iter()
        .map(|r| {
            let mut acc = [NeumaierSum::new(); K];
            visit_shell(r, |m1, n1, m2, n2| {
                let a = term(m1, n1);
                let b = term(m2, n2);
                for k in 0..K {
                    acc[k].add(a[k] + b[k]);
                }
            });
            acc
        })
        .collect();
    let mut out: [Real; K] = std::array::from_fn(|_| Float::with_val(prec, 0));
    for shell in &shells {
        for k in 0..K {
            let (s, c) = shell[k].parts();
            out[k] += s;
            out[k] += c;
        }
    }
    out
}

/// Evaluate a restricted lattice sum with its tail bound.
pub fn evaluate(spec: &LatticeSumSpec, ctx: &PrecisionContext) -> Result<LatticeSum> {
    spec.validate()?;
    let int_s = (spec.s.fract() == 0.0 && spec.s < 64.0).then_some(spec.s as i32);
    let [value, abs] = shell_sum(spec.radius, ctx.prec(), |m, n| {
        let t = spec.term(m, n, int_s);
        [t, t.abs()]
    });
    let rounding_bound = abs * (16.0 * f64::EPSILON);
    Ok(LatticeSum {
        value,
        tail_bound: spec.tail_bound(ctx) + &rounding_bound,
        rounding_bound,
        radius: spec.radius,
        terms: 4 * spec.radius * (spec.radius + 1),
    })
}

/// Evaluate several specs sharing the same radius.
pub fn evaluate_many(specs: &[LatticeSumSpec], ctx: &PrecisionContext) -> Result<Vec<LatticeSum>> {
    specs.iter().map(|s| evaluate(s, ctx)).collect()
}

/// The two parity-split rearrangements used in the proof of the lemma on
/// `ℒ_{3,1}((Q)+(P+Q))`:
///
/// * E1: `Σ′_{m,n even} 1/|·|⁴ + Σ′_{m even} 1/|·|⁴ = Σ′ m²/|·|⁶`
/// * E2: `Σ′_{m,n even} 1/|·|⁴ + Σ′_{m even} n²/|·|⁶ = Σ′_{m odd} m²/|·|⁶`
pub fn verify_e1_e2(radius: u64, ctx: &PrecisionContext) -> Result<Vec<VerificationReport>> {
    let p = ctx.prec();
    let started = Instant::now();
    let both_even = evaluate(
        &LatticeSumSpec::new(Weight::One, Mask::BothEven, 1, 2.0, radius),
        ctx,
    )?;
    let m_even = evaluate(
        &LatticeSumSpec::new(Weight::One, Mask::MEven, 1, 2.0, radius),
        ctx,
    )?;
    let m2_all = evaluate(
        &LatticeSumSpec::new(Weight::M2, Mask::All, 1, 3.0, radius),
        ctx,
    )?;
    let n2_m_even = evaluate(
        &LatticeSumSpec::new(Weight::N2, Mask::MEven, 1, 3.0, radius),
        ctx,
    )?;
    let m2_m_odd = evaluate(
        &LatticeSumSpec::new(Weight::M2, Mask::MOdd, 1, 3.0, radius),
        ctx,
    )?;

    let e1_lhs = Float::with_val(p, &both_even.value + &m_even.value);
    let e1_tol =
        Float::with_val(p, &both_even.tail_bound + &m_even.tail_bound) + &m2_all.tail_bound;
    let e1 = VerificationReport::compare("E1", &e1_lhs, &m2_all.value, &e1_tol, ctx, started)
        .param("radius", radius);

    let started = Instant::now();
    let e2_lhs = Float::with_val(p, &both_even.value + &n2_m_even.value);
    let e2_tol =
        Float::with_val(p, &both_even.tail_bound + &n2_m_even.tail_bound) + &m2_m_odd.tail_bound;
    let e2 = VerificationReport::compare("E2", &e2_lhs, &m2_m_odd.value, &e2_tol, ctx, started)
        .param("radius", radius);
    Ok(vec![e1, e2])
}

/// Both lattice representations of `L(χ₋₄, t)` against `β(t)`:
/// `Σ′ 1/(m²+n²)^t / (4ζ(t))` and
/// `Σ′ 1/(m²+4n²)^t / (2(1 − 2^{-t} + 2^{1-2t})ζ(t))`.
pub fn prop32_check(
    t: u32,
    radius: u64,
    ctx: &PrecisionContext,
) -> Result<Vec<VerificationReport>> {
    if t < 2 {
        return Err(domain("prop32_check needs t >= 2"));
    }
    let p = ctx.prec();
    let beta = dirichlet_beta(t, ctx)?;
    let zeta = zeta_int(t, ctx)?;
    let mut out = Vec::new();

    let started = Instant::now();
    let sq = evaluate(
        &LatticeSumSpec::new(Weight::One, Mask::All, 1, f64::from(t), radius),
        ctx,
    )?;
    let scale = Float::with_val(p, &zeta * 4u32);
    let lhs = Float::with_val(p, &sq.value / &scale);
    let tol = Float::with_val(p, &sq.tail_bound / &scale);
    out.push(
        VerificationReport::compare(
            format!("prop32.chi4.c1.t{t}"),
            &lhs,
            &beta,
            &tol,
            ctx,
            started,
        )
        .param("radius", radius)
        .param("t", t),
    );

    let started = Instant::now();
    let sq4 = evaluate(
        &LatticeSumSpec::new(Weight::One, Mask::All, 4, f64::from(t), radius),
        ctx,
    )?;
    let two = Float::with_val(p, 2);
    let ti = t as i32;
    let factor = Float::with_val(p, 1) - Float::with_val(p, (&two).pow(-ti))
        + Float::with_val(p, (&two).pow(1 - 2 * ti));
    let scale = Float::with_val(p, &factor * &zeta) * 2u32;
    let lhs = Float::with_val(p, &sq4.value / &scale);
    let tol = Float::with_val(p, &sq4.tail_bound / &scale);
    out.push(
        VerificationReport::compare(
            format!("prop32.chi4.c4.t{t}"),
            &lhs,
            &beta,
            &tol,
            ctx,
            started,
        )
        .param("radius", radius)
        .param("t", t),
    );
    Ok(out)
}

/// Sums that vanish by the symmetry `m ↔ n`; the shell pairing makes every
/// partial sum exactly zero.
pub fn symmetry_vanishing_specs(radius: u64) -> [LatticeSumSpec; 2] {
    [
        LatticeSumSpec::new(Weight::M2MinusN2, Mask::All, 1, 3.0, radius),
        LatticeSumSpec::new(Weight::One, Mask::SignMMinusSignN, 1, 2.0, radius),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(20).unwrap()
    }

    // brute force over the full square, no pairing, no parallelism
    fn brute(spec: &LatticeSumSpec) -> f64 {
        let r = spec.radius as i64;
        let s = spec.s as i32;
        let mut acc = NeumaierSum::new();
        for m in -r..=r {
            for n in -r..=r {
                if m != 0 || n != 0 {
                    acc.add(spec.term(m, n, Some(s)));
                }
            }
        }
        acc.value()
    }

    #[test]
    fn shell_enumeration_covers_square_once() {
        for r in 1..6i64 {
            let mut seen = std::collections::HashSet::new();
            visit_shell(r, |a, b, c, d| {
                assert!(seen.insert((a, b)));
                assert!(seen.insert((c, d)));
            });
            assert_eq!(seen.len() as i64, 8 * r);
            assert!(seen.iter().all(|&(m, n)| m.abs().max(n.abs()) == r));
        }
    }

    #[test]
    fn engine_matches_brute_force() {
        let c = ctx();
        for (w, mask, form, s) in [
            (Weight::One, Mask::All, 1, 2.0),
            (Weight::M2, Mask::MOdd, 1, 3.0),
            (Weight::M2Minus4N2, Mask::All, 4, 3.0),
            (Weight::N2, Mask::MEvenNOdd, 1, 3.0),
        ] {
            let spec = LatticeSumSpec::new(w, mask, form, s, 40);
            let v = evaluate(&spec, &c).unwrap().value.to_f64();
            assert!((v - brute(&spec)).abs() < 1e-13, "{spec:?}");
        }
    }

    #[test]
    fn two_squares_oracle() {
        // Σ′ 1/(m²+n²)² = 4 ζ(2) β(2) = (2π²/3) β(2)
        let c = ctx();
        let spec = LatticeSumSpec::new(Weight::One, Mask::All, 1, 2.0, 2000);
        let res = evaluate(&spec, &c).unwrap();
        let z2 = zeta_int(2, &c).unwrap();
        let target = z2 * 4u32 * c.catalan();
        let err = Float::with_val(c.prec(), &res.value - &target).abs();
        assert!(err <= res.tail_bound, "err {err} bound {}", res.tail_bound);
        assert!(res.tail_bound < 1e-5);
    }

    #[test]
    fn symmetric_sums_vanish_exactly() {
        let c = ctx();
        for radius in [1u64, 2, 7, 50, 333] {
            for spec in symmetry_vanishing_specs(radius) {
                assert!(evaluate(&spec, &c).unwrap().value.is_zero(), "{spec:?}");
            }
        }
    }

    #[test]
    fn divergent_specs_rejected() {
        let c = ctx();
        assert!(evaluate(&LatticeSumSpec::new(Weight::One, Mask::All, 1, 1.0, 10), &c).is_err());
        assert!(evaluate(&LatticeSumSpec::new(Weight::M2, Mask::All, 1, 2.0, 10), &c).is_err());
        assert!(evaluate(&LatticeSumSpec::new(Weight::One, Mask::All, 2, 2.0, 10), &c).is_err());
    }

    #[test]
    fn seven_sixteenths() {
        let c = ctx();
        let all = evaluate(
            &LatticeSumSpec::new(Weight::One, Mask::All, 1, 2.0, 1000),
            &c,
        )
        .unwrap();
        let even = evaluate(
            &LatticeSumSpec::new(Weight::One, Mask::MEven, 1, 2.0, 1000),
            &c,
        )
        .unwrap();
        let d = (even.value.to_f64() - 7.0 / 16.0 * all.value.to_f64()).abs();
        let bound = even.tail_bound.to_f64() + 7.0 / 16.0 * all.tail_bound.to_f64();
        assert!(d <= bound, "{d} > {bound}");
    }

    #[test]
    fn e1_e2_and_doubling() {
        let c = ctx();
        let r1 = verify_e1_e2(500, &c).unwrap();
        let r2 = verify_e1_e2(1000, &c).unwrap();
        for (a, b) in r1.iter().zip(&r2) {
            assert!(a.passed() && b.passed(), "{a:?}");
            let ea: f64 = a.abs_err.parse().unwrap();
            let eb: f64 = b.abs_err.parse().unwrap();
            assert!(eb <= ea * 0.5 + 1e-25, "{} {ea} -> {eb}", a.check_id);
        }
    }

    #[test]
    fn prop32_representations() {
        let c = ctx();
        for t in [2, 3] {
            for r in prop32_check(t, 500, &c).unwrap() {
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let c = ctx();
        let spec = LatticeSumSpec::new(Weight::M2, Mask::SignM, 1, 3.0, 300);
        let a = evaluate(&spec, &c).unwrap().value;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let b = pool.install(|| evaluate(&spec, &c).unwrap().value);
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn tail_bound_dominates_increment(r1 in 5u64..60, extra in 1u64..80, pick in 0usize..4) {
            let c = ctx();
            let (w, mask, form, s) = [
                (Weight::One, Mask::All, 1, 2.0),
                (Weight::M2, Mask::All, 1, 3.0),
                (Weight::M2Minus4N2, Mask::NEven, 4, 3.0),
                (Weight::One, Mask::SignMMinusSignN, 1, 2.5),
            ][pick];
            let a = evaluate(&LatticeSumSpec::new(w, mask, form, s, r1), &c).unwrap();
            let b = evaluate(&LatticeSumSpec::new(w, mask, form, s, r1 + extra), &c).unwrap();
            let inc = Float::with_val(c.prec(), &b.value - &a.value).abs();
            prop_assert!(inc <= a.tail_bound);
        }
    }
}
