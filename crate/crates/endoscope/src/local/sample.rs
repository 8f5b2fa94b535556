//! Constructors for norm-one elements with prescribed valuation invariants.
//!
//! Norm-one elements are produced in Hilbert-90 form x / conj(x), which is
//! exactly norm-one at any working precision; the valuation targets are then
//! re-verified with `ord` before the element is returned.

use super::{ExtElement, ExtTag, LocalRingCtx, Val};
use crate::error::{Error, Result};

/// Norm-one eigenvalue pair for the split-centralizer case: t2, t3 in E¹ with
/// ord(1 - t2) = c, ord(1 - t3) = b and ord(t2 - t3) = a.
///
/// For x = 1 + cδ one has x/conj(x) - 1 = 2cδ/conj(x), so the three targets
/// reduce to valuations of the F-parameters; the triple must satisfy
/// a ≥ min(b, c), with equality forced when b ≠ c.
pub fn sample_norm_one_e3(
    ctx: &LocalRingCtx,
    b: Val,
    c: Val,
    a: Val,
) -> Result<(ExtElement, ExtElement)> {
    let (a, b, c) = (finite(a, "A")?, finite(b, "B")?, finite(c, "C")?);
    if b != c && a != b.min(c) {
        return Err(Error::Infeasible(format!(
            "B = {b} ≠ C = {c} forces A = min(B, C) = {}, got A = {a}",
            b.min(c)
        )));
    }
    if a < b.min(c) {
        return Err(Error::Infeasible(format!(
            "A = {a} < min(B, C) = {}",
            b.min(c)
        )));
    }
    if a.max(b).max(c) + 2 > ctx.precision() as i64 {
        return Err(Error::Infeasible(
            "valuation targets exceed the precision budget".into(),
        ));
    }

    // t2 carries ord(1 - t2) = C, t3 carries ord(1 - t3) = B, and
    // ord(t2 - t3) = ord(c2 - c3) for the F-parameters c2, c3.
    let p = ctx.p() as i64;
    let c2 = p.pow(c as u32);
    let c3 = if b != c {
        p.pow(b as u32)
    } else if a > b {
        // same leading term, difference pushed to level a
        p.pow(b as u32) + p.pow(a as u32)
    } else {
        // distinct unit multipliers keep the difference at level b
        2 * p.pow(b as u32)
    };

    let t2 = hilbert90(ctx, c2)?;
    let t3 = hilbert90(ctx, c3)?;

    let one = ctx.one(ExtTag::E);
    check_ord(ctx, &ctx.sub(&one, &t2)?, Val::int(c), "ord(1 - t2)")?;
    check_ord(ctx, &ctx.sub(&one, &t3)?, Val::int(b), "ord(1 - t3)")?;
    check_ord(ctx, &ctx.sub(&t2, &t3)?, Val::int(a), "ord(t2 - t3)")?;
    check_norm_one(ctx, &t2, ExtTag::F)?;
    check_norm_one(ctx, &t3, ExtTag::F)?;
    Ok((t2, t3))
}

/// Norm-one element t = t1 + t2 w of EL (for the involution fixing L) with
/// ord_E(t1 - 1) = a and ord_E(t2) = b.
///
/// Built as s / conj_L(s) for s = 1 + eδ + fδw; then t1 - 1 and t2 come out
/// proportional to e + (πf² - e²)δ and f, which pins the two valuations.
/// The norm equation forces a ≤ 2b + 1.
pub fn sample_norm_one_el(ctx: &LocalRingCtx, a: Val, b: Val) -> Result<ExtElement> {
    if !b.is_finite() {
        return Err(Error::Degenerate(
            "B = inf means t2 = 0, so t lies in E and is not regular".into(),
        ));
    }
    let (a, b) = (finite(a, "A")?, finite(b, "B")?);
    if a > 2 * b + 1 {
        return Err(Error::Infeasible(format!(
            "norm-one elements satisfy A ≤ 2B + 1; got A = {a}, B = {b}"
        )));
    }
    if (2 * b + 2).max(a + 2) > ctx.precision() as i64 {
        return Err(Error::Infeasible(
            "valuation targets exceed the precision budget".into(),
        ));
    }

    let p = ctx.p() as i64;
    let e = if a <= 2 * b { p.pow(a as u32) } else { 0 };
    let f = p.pow(b as u32);

    // s = (1 + eδ) + (fδ) w
    let s = ctx.element(ExtTag::El, &[1, e, 0, f])?;
    let sbar = ctx.conj(&s, ExtTag::L)?;
    let t = ctx.mul(&s, &ctx.inv(&sbar)?)?;

    let (t1, t2) = ctx.el_parts(&t)?;
    let one = ctx.ec_one();
    let d1 = ctx.ec_sub(t1, one);
    match ctx.ec_val(d1) {
        Some(v) if v as i64 == a => {}
        other => {
            return Err(Error::Infeasible(format!(
                "constructed element has ord(t1 - 1) = {other:?}, wanted {a}"
            )))
        }
    }
    match ctx.ec_val(t2) {
        Some(v) if v as i64 == b => {}
        other => {
            return Err(Error::Infeasible(format!(
                "constructed element has ord(t2) = {other:?}, wanted {b}"
            )))
        }
    }
    check_norm_one(ctx, &t, ExtTag::L)?;
    Ok(t)
}

fn finite(v: Val, name: &str) -> Result<i64> {
    match v.as_int() {
        Some(k) if k >= 0 => Ok(k),
        _ => Err(Error::Infeasible(format!(
            "{name} must be a finite nonnegative integer valuation, got {v}"
        ))),
    }
}

/// x / conj(x) for x = 1 + cδ; exactly norm-one, with ord(1 - t) = ord(c).
fn hilbert90(ctx: &LocalRingCtx, c: i64) -> Result<ExtElement> {
    let x = ctx.element(ExtTag::E, &[1, c])?;
    let xb = ctx.conj(&x, ExtTag::F)?;
    ctx.mul(&x, &ctx.inv(&xb)?)
}

fn check_ord(ctx: &LocalRingCtx, x: &ExtElement, want: Val, what: &str) -> Result<()> {
    let got = ctx.ord(x)?;
    if got != want {
        return Err(Error::Infeasible(format!(
            "{what} came out {got}, wanted {want}"
        )));
    }
    Ok(())
}

fn check_norm_one(ctx: &LocalRingCtx, x: &ExtElement, over: ExtTag) -> Result<()> {
    let n = ctx.norm(x, over)?;
    let one = ctx.one(n.tag);
    let diff = ctx.sub(&n, &one)?;
    if diff.coords().iter().any(|&c| c != 0) {
        return Err(Error::Infeasible("norm-one constraint violated".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::make_ctx;

    #[test]
    fn e3_generic_and_deep() {
        let ctx = make_ctx(3, 12).unwrap();
        sample_norm_one_e3(&ctx, Val::int(0), Val::int(0), Val::int(0)).unwrap();
        sample_norm_one_e3(&ctx, Val::int(1), Val::int(1), Val::int(1)).unwrap();
        sample_norm_one_e3(&ctx, Val::int(1), Val::int(1), Val::int(2)).unwrap();
        sample_norm_one_e3(&ctx, Val::int(0), Val::int(2), Val::int(0)).unwrap();
        for p in [5, 7] {
            let ctx = make_ctx(p, 12).unwrap();
            sample_norm_one_e3(&ctx, Val::int(2), Val::int(2), Val::int(2)).unwrap();
        }
    }

    #[test]
    fn e3_infeasible() {
        let ctx = make_ctx(3, 12).unwrap();
        // B ≠ C forces A = min(B, C) = 1
        let err = sample_norm_one_e3(&ctx, Val::int(2), Val::int(1), Val::int(2)).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        let err = sample_norm_one_e3(&ctx, Val::int(1), Val::int(1), Val::int(0)).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn el_cases() {
        let ctx = make_ctx(3, 16).unwrap();
        for (a, b) in [(0, 0), (1, 1), (2, 1), (3, 1), (0, 2), (1, 0)] {
            sample_norm_one_el(&ctx, Val::int(a), Val::int(b)).unwrap();
        }
        // A > 2B + 1 has no norm-one solutions
        let err = sample_norm_one_el(&ctx, Val::int(2), Val::int(0)).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        // B = inf is a degenerate (non-regular) request
        let err = sample_norm_one_el(&ctx, Val::int(1), Val::Infinite).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn el_norm_one_lands_in_l() {
        let ctx = make_ctx(5, 16).unwrap();
        let t = sample_norm_one_el(&ctx, Val::int(1), Val::int(1)).unwrap();
        let n = ctx.norm(&t, ExtTag::L).unwrap();
        assert_eq!(n, ctx.one(ExtTag::L));
    }
}
