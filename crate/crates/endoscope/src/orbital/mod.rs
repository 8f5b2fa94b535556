//! Stable-class representatives, transfer factors, closed-form orbital
//! integral evaluators, brute-force κ- and stable orbital integrals by
//! lattice counting, and the level-r transfer-identity verifier.
//!
//! Orbital integrals are normalized as bare lattice counts: the measure
//! gives mass 1 to a hyperspecial maximal compact, and the integral of the
//! characteristic function of K(π^r) against a class is the number of
//! self-dual γ-stable lattices with (γ-1)Λ ⊆ π^r Λ.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    class_space_from, enumerate, HermitianSpace, Lattice, MatE,
};
use crate::local::{make_ctx, sample_norm_one_e3, sample_norm_one_el, ExtTag, LocalRingCtx, Val};

/// Valuation invariants of a stable conjugacy class, by centralizer case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassCase {
    /// Split centralizer E³: eigenvalues 1, t2, t3 in E¹ with
    /// a = ord(t2 - t3), b = ord(1 - t3), c = ord(1 - t2).
    E3 { a: u32, b: u32, c: u32 },
    /// Centralizer E x EL: eigenvalue t = t1 + t2·w in EL¹ with
    /// a = ord(t1 - 1), b = ord(t2).
    Exel { a: u32, b: u32 },
}

impl ClassCase {
    pub fn max_invariant(&self) -> u32 {
        match *self {
            ClassCase::E3 { a, b, c } => a.max(b).max(c),
            ClassCase::Exel { a, b } => a.max(b),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassCase::E3 { .. } => "e3",
            ClassCase::Exel { .. } => "exel",
        }
    }
}

/// A stable conjugacy class over a fixed residue characteristic, with the
/// congruence level and the enumeration box baked in. The arithmetic
/// context is created on first use, since the closed-form evaluators do not
/// need one.
#[derive(Debug, Clone)]
pub struct StableClassParams {
    pub p: u64,
    pub case: ClassCase,
    pub r: u32,
    pub box_m: i32,
    ctx: std::cell::OnceCell<LocalRingCtx>,
}

/// Default box radius: wide enough that every glue exponent the invariants
/// allow fits with room to spare; the mandatory M+1 rerun then certifies
/// stabilization empirically.
pub fn default_box(case: &ClassCase, r: u32) -> i32 {
    match *case {
        ClassCase::E3 { a, b, c } => (a + b + c + r + 2) as i32,
        ClassCase::Exel { a, b } => (2 * a + 2 * b + r + 3) as i32,
    }
}

impl StableClassParams {
    pub fn new(p: u64, case: ClassCase, r: u32) -> Result<StableClassParams> {
        Self::with_box(p, case, r, default_box(&case, r))
    }

    pub fn with_box(p: u64, case: ClassCase, r: u32, box_m: i32) -> Result<StableClassParams> {
        match case {
            ClassCase::E3 { a, b, c } => {
                let m = b.min(c);
                if a < m || (b != c && a != m) {
                    return Err(Error::Infeasible(format!(
                        "(A, B, C) = ({a}, {b}, {c}) is not ultrametrically consistent"
                    )));
                }
            }
            ClassCase::Exel { a, b } => {
                if a > 2 * b + 1 {
                    return Err(Error::Infeasible(format!(
                        "(A, B) = ({a}, {b}) violates A ≤ 2B + 1"
                    )));
                }
            }
        }
        if box_m < default_box(&case, r) {
            return Err(Error::InvalidArgument(
                "box radius below the stabilization default".into(),
            ));
        }
        Ok(StableClassParams {
            p,
            case,
            r,
            box_m,
            ctx: std::cell::OnceCell::new(),
        })
    }

    /// Working context at the precision the box demands: the stabilization
    /// rerun at M+1 stores lattices at scale M+2 and chains up to three
    /// exact divisions, so give three digits per scale unit plus margin;
    /// fail loudly rather than saturate.
    pub fn ctx(&self) -> Result<&LocalRingCtx> {
        if self.ctx.get().is_none() {
            let n = 3 * (self.box_m as u32 + 2) + self.case.max_invariant() + self.r + 4;
            let built = make_ctx(self.p, n)?;
            let _ = self.ctx.set(built);
        }
        Ok(self.ctx.get().expect("context just initialized"))
    }

    pub fn q(&self) -> u64 {
        self.p
    }
}

/// One rational conjugacy class inside the stable class: γ in eigenbasis
/// normal form, the hermitian space it preserves, and its endoscopic sign.
#[derive(Debug, Clone)]
pub struct ClassRepresentative {
    pub gamma: MatE,
    pub space: HermitianSpace,
    pub kappa_sign: i8,
    pub label: String,
}

/// Exact orbital data: the (signed or plain) total and per-class counts.
#[derive(Debug, Clone)]
pub struct OrbitalResult {
    pub value: BigRational,
    pub per_class: Vec<(String, u64)>,
    pub states: u64,
}

fn check_unitary(ctx: &LocalRingCtx, rep: &ClassRepresentative) -> Result<()> {
    let rank = rep.gamma.rank;
    let g = rep.space.gram_ec(ctx)?;
    let m = rep.gamma.to_ec(ctx)?;
    for i in 0..rank {
        for j in 0..rank {
            // columns transform as X ↦ γX and h(x, y) = Xᵀ G conj(Y), so
            // unitarity reads γᵀ G conj(γ) = G
            let mut acc = ctx.ec_zero();
            for k in 0..rank {
                for l in 0..rank {
                    let t = ctx.ec_mul(ctx.ec_mul(m[k][i], g[k][l]), ctx.ec_conj(m[l][j]));
                    acc = ctx.ec_add(acc, t);
                }
            }
            if acc != g[i][j] {
                return Err(Error::Infeasible(format!(
                    "representative {} is not unitary for its space",
                    rep.label
                )));
            }
        }
    }
    Ok(())
}

/// The γ-side representatives: one per rational class inside the stable
/// class. The eigenvalue normalized to 1 sits in the U(1) slot; κ is the
/// sign class of that slot, normalized to +1 on the base pattern.
pub fn representatives(params: &StableClassParams) -> Result<Vec<ClassRepresentative>> {
    let ctx = params.ctx()?;
    let one = ctx.one(ExtTag::E);
    let mut reps = Vec::new();
    match params.case {
        ClassCase::E3 { a, b, c } => {
            let (t2, t3) =
                sample_norm_one_e3(ctx, Val::int(b as i64), Val::int(c as i64), Val::int(a as i64))?;
            for (pat, label) in [
                ([0u32, 0, 0], "+++"),
                ([0, 1, 1], "+--"),
                ([1, 0, 1], "-+-"),
                ([1, 1, 0], "--+"),
            ] {
                reps.push(ClassRepresentative {
                    gamma: MatE::diagonal(ctx, &[one, t2, t3])?,
                    space: HermitianSpace::diagonal(ctx, &pat)?,
                    kappa_sign: if pat[0] == 0 { 1 } else { -1 },
                    label: label.to_string(),
                });
            }
        }
        ClassCase::Exel { a, b } => {
            let t = sample_norm_one_el(ctx, Val::int(a as i64), Val::int(b as i64))?;
            let (t1, t2) = ctx.el_parts(&t)?;
            let t1e = ctx.ext_from_ec(t1);
            let t2e = ctx.ext_from_ec(t2);
            let pit2 = ctx.mul(&ctx.pi(ExtTag::E), &t2e)?;
            let zero = ctx.zero(ExtTag::E);
            let gamma = MatE::new(
                3,
                vec![one, zero, zero, zero, t1e, pit2, zero, t2e, t1e],
            )?;
            for (line_exp, rho_is_w, kappa, label) in
                [(0i64, true, 1i8, "+:w"), (1, false, -1, "-:1")]
            {
                let a1 = ctx.element(ExtTag::E, &[(params.p as i64).pow(line_exp as u32), 0])?;
                let gram = exel_gram(ctx, &a1, rho_is_w)?;
                let sign_w = if rho_is_w { 1 } else { -1 };
                let space = HermitianSpace::new(
                    ctx,
                    3,
                    gram,
                    vec![if line_exp == 0 { 1 } else { -1 }, sign_w],
                )?;
                reps.push(ClassRepresentative {
                    gamma: gamma.clone(),
                    space,
                    kappa_sign: kappa,
                    label: label.to_string(),
                });
            }
        }
    }
    for rep in &reps {
        check_unitary(ctx, rep)?;
    }
    debug_assert_eq!(reps[0].kappa_sign, 1);
    Ok(reps)
}

/// Gram matrix of the line ⊕ EL-plane model: the plane carries the form
/// tr_{EL/E}(ρ·x·ι(y)) in the basis (1, w), which is [[2ρ1, 2πρ2],
/// [2πρ2, 2πρ1]] for ρ = ρ1 + ρ2·w in L.
fn exel_gram(
    ctx: &LocalRingCtx,
    a1: &crate::local::ExtElement,
    rho_is_w: bool,
) -> Result<Vec<crate::local::ExtElement>> {
    let p = ctx.p() as i64;
    let zero = ctx.zero(ExtTag::E);
    let (g11, g12, g22) = if rho_is_w {
        // ρ = w: [[0, 2π], [2π, 0]]
        (
            zero,
            ctx.element(ExtTag::E, &[2 * p, 0])?,
            zero,
        )
    } else {
        // ρ = 1: [[2, 0], [0, 2π]]
        (
            ctx.element(ExtTag::E, &[2, 0])?,
            zero,
            ctx.element(ExtTag::E, &[2 * p, 0])?,
        )
    };
    Ok(vec![
        *a1, zero, zero, //
        zero, g11, g12, //
        zero, g12, g22,
    ])
}

/// H-side class models: the rank-2 space carrying the nontrivial
/// eigenvalues, with the U(1) factor pinned to 1 (it contributes a single
/// lattice at every level).
fn h_side_representatives(params: &StableClassParams) -> Result<Vec<ClassRepresentative>> {
    let ctx = params.ctx()?;
    let mut reps = Vec::new();
    match params.case {
        ClassCase::E3 { a, b, c } => {
            let (t2, t3) =
                sample_norm_one_e3(ctx, Val::int(b as i64), Val::int(c as i64), Val::int(a as i64))?;
            for (pat, label) in [([0u32, 0], "++"), ([1, 1], "--")] {
                reps.push(ClassRepresentative {
                    gamma: MatE::diagonal(ctx, &[t2, t3])?,
                    space: HermitianSpace::diagonal(ctx, &pat)?,
                    kappa_sign: 1,
                    label: label.to_string(),
                });
            }
        }
        ClassCase::Exel { a, b } => {
            let t = sample_norm_one_el(ctx, Val::int(a as i64), Val::int(b as i64))?;
            let (t1, t2) = ctx.el_parts(&t)?;
            let t1e = ctx.ext_from_ec(t1);
            let t2e = ctx.ext_from_ec(t2);
            let pit2 = ctx.mul(&ctx.pi(ExtTag::E), &t2e)?;
            let gamma = MatE::new(2, vec![t1e, pit2, t2e, t1e])?;
            // only the even-discriminant plane embeds in the quasi-split
            // U(2), so the stable class has a single rational class here
            let p = ctx.p() as i64;
            let zero = ctx.zero(ExtTag::E);
            let g12 = ctx.element(ExtTag::E, &[2 * p, 0])?;
            let space = HermitianSpace::new(ctx, 2, vec![zero, g12, g12, zero], vec![1])?;
            reps.push(ClassRepresentative {
                gamma,
                space,
                kappa_sign: 1,
                label: "w".to_string(),
            });
        }
    }
    for rep in &reps {
        check_unitary(ctx, rep)?;
    }
    Ok(reps)
}

fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// (-q)^e as an exact rational, for any integer e.
fn neg_q_pow(q: u64, e: i64) -> BigRational {
    let neg_q = rat_int(-(q as i64));
    if e >= 0 {
        neg_q.pow(e as i32)
    } else {
        neg_q.pow((-e) as i32).recip()
    }
}

/// q^e as an exact rational, for any integer e.
fn q_pow(q: u64, e: i64) -> BigRational {
    let q = rat_int(q as i64);
    if e >= 0 {
        q.pow(e as i32)
    } else {
        q.pow((-e) as i32).recip()
    }
}

/// Transfer factor Δ(γ) = (-q)^(-B-C) in the split case and (-q)^(-n) with
/// n = min(2A, 2B+1) in the E x EL case.
pub fn delta_factor(params: &StableClassParams) -> BigRational {
    let q = params.q();
    match params.case {
        ClassCase::E3 { b, c, .. } => neg_q_pow(q, -((b + c) as i64)),
        ClassCase::Exel { a, b } => {
            let n = (2 * a).min(2 * b + 1) as i64;
            neg_q_pow(q, -n)
        }
    }
}

/// Closed form of the κ-orbital integral at level r. Outside the support of
/// the congruence condition (a unit eigenvalue difference clashing with the
/// level) the lattice set is empty and the value is 0.
pub fn kappa_orbital_closed(params: &StableClassParams) -> BigRational {
    let q = params.q();
    let r = params.r as i64;
    match params.case {
        ClassCase::E3 { a, b, c } => {
            if (b.min(c) as i64) < r {
                return BigRational::zero();
            }
            let bracket = (q_pow(q, a as i64 - r) * rat_int(q as i64 + 1) - rat_int(2))
                / rat_int(q as i64 - 1);
            neg_q_pow(q, (b + c) as i64 - 2 * r) * bracket
        }
        ClassCase::Exel { a, b } => {
            if (a as i64) < r || (b as i64 + 1) < r {
                return BigRational::zero();
            }
            let n = (2 * a).min(2 * b + 1) as i64;
            let bracket =
                (q_pow(q, b as i64 + 1 - r) - BigRational::one()) / rat_int(q as i64 - 1);
            neg_q_pow(q, n - 2 * r) * bracket
        }
    }
}

/// Closed form of the stable orbital integral on the endoscopic side.
pub fn stable_orbital_closed(params: &StableClassParams) -> BigRational {
    let q = params.q();
    let r = params.r as i64;
    match params.case {
        ClassCase::E3 { a, b, c } => {
            if (b.min(c) as i64) < r {
                return BigRational::zero();
            }
            (q_pow(q, a as i64 - r) * rat_int(q as i64 + 1) - rat_int(2)) / rat_int(q as i64 - 1)
        }
        ClassCase::Exel { a, b } => {
            if (a as i64) < r || (b as i64 + 1) < r {
                return BigRational::zero();
            }
            (q_pow(q, b as i64 + 1 - r) - BigRational::one()) / rat_int(q as i64 - 1)
        }
    }
}

fn max_states_from_env() -> u64 {
    std::env::var("ENDOSCOPE_MAX_STATES")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(200_000_000)
}

/// Count lattices for one representative at the given box, with the
/// mandatory M+1 stabilization rerun.
fn count_stabilized(
    params: &StableClassParams,
    rep: &ClassRepresentative,
    budget: u64,
) -> Result<(u64, u64)> {
    let ctx = params.ctx()?;
    let cs = class_space_from(ctx, &rep.gamma, &rep.space, &rep.label)?;
    let first = enumerate(ctx, &cs, params.r, params.box_m, budget)?;
    let second = enumerate(ctx, &cs, params.r, params.box_m + 1, budget)?;
    if first.lattices.len() != second.lattices.len() {
        return Err(Error::BoxUnstable {
            box_m: params.box_m,
            count_m: first.lattices.len(),
            count_m1: second.lattices.len(),
        });
    }
    Ok((first.lattices.len() as u64, first.states + second.states))
}

/// Brute-force κ-orbital integral: the κ-signed sum of lattice counts over
/// the rational classes in the stable class.
pub fn kappa_orbital_bruteforce(params: &StableClassParams) -> Result<OrbitalResult> {
    let reps = representatives(params)?;
    let budget = max_states_from_env();
    let mut value = BigInt::zero();
    let mut per_class = Vec::new();
    let mut states = 0;
    for rep in &reps {
        let (count, st) = count_stabilized(params, rep, budget)?;
        states += st;
        value += BigInt::from(rep.kappa_sign) * BigInt::from(count);
        per_class.push((rep.label.clone(), count));
    }
    Ok(OrbitalResult {
        value: BigRational::from_integer(value),
        per_class,
        states,
    })
}

/// Brute-force stable orbital integral on the endoscopic side: the plain sum
/// of lattice counts over the H-side classes (times 1 for the U(1) factor).
pub fn stable_orbital_bruteforce_h(params: &StableClassParams) -> Result<OrbitalResult> {
    let reps = h_side_representatives(params)?;
    let budget = max_states_from_env();
    let mut value = BigInt::zero();
    let mut per_class = Vec::new();
    let mut states = 0;
    for rep in &reps {
        let (count, st) = count_stabilized(params, rep, budget)?;
        states += st;
        value += BigInt::from(count);
        per_class.push((rep.label.clone(), count));
    }
    Ok(OrbitalResult {
        value: BigRational::from_integer(value),
        per_class,
        states,
    })
}

/// Which side of the verification to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Closed,
    Oracle,
}

/// Full record of one transfer-identity check.
#[derive(Debug, Clone)]
pub struct TransferReport {
    pub case: ClassCase,
    pub q: u64,
    pub r: u32,
    pub delta: BigRational,
    pub kappa_closed: BigRational,
    pub stable_closed: BigRational,
    pub kappa_oracle: Option<OrbitalResult>,
    pub stable_oracle: Option<OrbitalResult>,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub pass: bool,
}

/// Check Δ(γ)·Φ^κ = q^(-2r)·Φ^st exactly. In closed mode the two sides come
/// from the evaluators; in oracle mode both orbital integrals are recomputed
/// by lattice enumeration and also compared against the closed forms.
pub fn verify_transfer(params: &StableClassParams, mode: VerifyMode) -> Result<TransferReport> {
    let delta = delta_factor(params);
    let kappa_closed = kappa_orbital_closed(params);
    let stable_closed = stable_orbital_closed(params);
    let scale = q_pow(params.q(), -2 * params.r as i64);
    let (kappa_oracle, stable_oracle) = match mode {
        VerifyMode::Closed => (None, None),
        VerifyMode::Oracle => (
            Some(kappa_orbital_bruteforce(params)?),
            Some(stable_orbital_bruteforce_h(params)?),
        ),
    };
    let kappa_val = kappa_oracle
        .as_ref()
        .map(|o| o.value.clone())
        .unwrap_or_else(|| kappa_closed.clone());
    let stable_val = stable_oracle
        .as_ref()
        .map(|o| o.value.clone())
        .unwrap_or_else(|| stable_closed.clone());
    let lhs = &delta * &kappa_val;
    let rhs = &scale * &stable_val;
    let mut pass = lhs == rhs;
    if let Some(o) = &kappa_oracle {
        pass &= o.value == kappa_closed;
    }
    if let Some(o) = &stable_oracle {
        pass &= o.value == stable_closed;
    }
    Ok(TransferReport {
        case: params.case,
        q: params.q(),
        r: params.r,
        delta,
        kappa_closed,
        stable_closed,
        kappa_oracle,
        stable_oracle,
        lhs,
        rhs,
        pass,
    })
}

/// Enumerate the acceptance grid for the split-centralizer case: all
/// ultrametrically consistent triples with entries ≤ max_inv and A ≥ r.
pub fn e3_grid(max_inv: u32, r: u32) -> Vec<(u32, u32, u32)> {
    let mut grid = Vec::new();
    for a in 0..=max_inv {
        for b in 0..=max_inv {
            for c in 0..=max_inv {
                let m = b.min(c);
                let consistent = a >= m && (b == c || a == m);
                if consistent && a >= r {
                    grid.push((a, b, c));
                }
            }
        }
    }
    grid
}

/// The E x EL grid: pairs with entries ≤ max_inv that are realized by a
/// norm-one element (A ≤ 2B + 1) and keep B + 1 - r ≥ 0.
pub fn exel_grid(max_inv: u32, r: u32) -> Vec<(u32, u32)> {
    let mut grid = Vec::new();
    for a in 0..=max_inv {
        for b in 0..=max_inv {
            if a <= 2 * b + 1 && b + 1 >= r {
                grid.push((a, b));
            }
        }
    }
    grid
}

/// Lattices fixed by one representative; exposed for inspection and the
/// examples.
pub fn class_lattices(
    params: &StableClassParams,
    rep: &ClassRepresentative,
) -> Result<Vec<Lattice>> {
    let ctx = params.ctx()?;
    let cs = class_space_from(ctx, &rep.gamma, &rep.space, &rep.label)?;
    let out = enumerate(ctx, &cs, params.r, params.box_m, max_states_from_env())?;
    let scale = (params.box_m + 1) as u32;
    Ok(out
        .lattices
        .into_iter()
        .map(|raw| Lattice::from_raw(raw, scale))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_e3(p: u64, a: u32, b: u32, c: u32, r: u32) -> StableClassParams {
        StableClassParams::new(p, ClassCase::E3 { a, b, c }, r).unwrap()
    }

    fn params_exel(p: u64, a: u32, b: u32, r: u32) -> StableClassParams {
        StableClassParams::new(p, ClassCase::Exel { a, b }, r).unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_factor(&params_e3(3, 0, 0, 0, 0)), rat_int(1));
        // E x EL with A = B = 1: n = min(2, 3) = 2, so Δ = 1/9 at q = 3
        let d = delta_factor(&params_exel(3, 1, 1, 0));
        assert_eq!(d, BigRational::new(BigInt::from(1), BigInt::from(9)));
        let d = delta_factor(&params_e3(3, 1, 1, 1, 0));
        assert_eq!(d, BigRational::new(BigInt::from(1), BigInt::from(9)));
    }

    #[test]
    fn closed_form_examples() {
        // E x EL, q = 3, A = 1, B = 1, r = 0: 9 · (9-1)/2 = 36
        assert_eq!(kappa_orbital_closed(&params_exel(3, 1, 1, 0)), rat_int(36));
        // E3, q = 3, A = B = C = 1, r = 0: 9 · (3·4-2)/2 = 45
        assert_eq!(kappa_orbital_closed(&params_e3(3, 1, 1, 1, 0)), rat_int(45));
        // E3, q = 3, A = B = C = 1, r = 1: (3^0·4-2)/2 = 1
        assert_eq!(kappa_orbital_closed(&params_e3(3, 1, 1, 1, 1)), rat_int(1));
        // E x EL, q = 3, B = 1, r = 1: (-3)^(n-2) · 1 with n = min(2A, 3)
        assert_eq!(kappa_orbital_closed(&params_exel(3, 1, 1, 1)), rat_int(1));
        assert_eq!(kappa_orbital_closed(&params_exel(3, 2, 1, 1)), rat_int(-3));
        // stable side
        assert_eq!(stable_orbital_closed(&params_exel(3, 1, 1, 0)), rat_int(4));
        assert_eq!(stable_orbital_closed(&params_e3(3, 1, 1, 1, 0)), rat_int(5));
        // numerator vanishes at B = r - 1
        assert_eq!(
            stable_orbital_closed(&params_exel(3, 1, 0, 1)),
            BigRational::zero()
        );
        // empty support when the level exceeds a unit-difference invariant
        assert_eq!(
            kappa_orbital_closed(&params_e3(3, 1, 0, 0, 1)),
            BigRational::zero()
        );
        assert_eq!(
            stable_orbital_closed(&params_e3(3, 1, 0, 0, 1)),
            BigRational::zero()
        );
    }

    #[test]
    fn representative_counts_and_base_sign() {
        let reps = representatives(&params_e3(3, 1, 1, 1, 0)).unwrap();
        assert_eq!(reps.len(), 4);
        assert_eq!(reps[0].kappa_sign, 1);
        assert_eq!(reps.iter().filter(|r| r.kappa_sign == 1).count(), 2);
        let reps = representatives(&params_exel(3, 1, 1, 0)).unwrap();
        assert_eq!(reps.len(), 2);
        assert_eq!(reps[0].kappa_sign, 1);
    }

    #[test]
    fn closed_transfer_identity_symbolic() {
        for q in [3u64, 5, 7] {
            for r in 0..3u32 {
                for (a, b, c) in e3_grid(3, 0) {
                    let p = params_e3(q, a, b, c, r);
                    let lhs = delta_factor(&p) * kappa_orbital_closed(&p);
                    let rhs = q_pow(q, -2 * r as i64) * stable_orbital_closed(&p);
                    assert_eq!(lhs, rhs, "e3 q={q} r={r} ({a},{b},{c})");
                }
                for (a, b) in exel_grid(3, 0) {
                    let p = params_exel(q, a, b, r);
                    let lhs = delta_factor(&p) * kappa_orbital_closed(&p);
                    let rhs = q_pow(q, -2 * r as i64) * stable_orbital_closed(&p);
                    assert_eq!(lhs, rhs, "exel q={q} r={r} ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn oracle_small_e3() {
        // hand-checkable point: (A, B, C) = (1, 0, 0) has per-class counts
        // (1, q+1, 0, 0), κ-sum q+2
        let p = params_e3(3, 1, 0, 0, 0);
        let kappa = kappa_orbital_bruteforce(&p).unwrap();
        assert_eq!(kappa.value, rat_int(5));
        assert_eq!(
            kappa.per_class,
            vec![
                ("+++".to_string(), 1),
                ("+--".to_string(), 4),
                ("-+-".to_string(), 0),
                ("--+".to_string(), 0)
            ]
        );
        let stable = stable_orbital_bruteforce_h(&p).unwrap();
        assert_eq!(stable.value, rat_int(5));
    }

    #[test]
    fn oracle_small_exel() {
        // hand-checkable point: (A, B) = (1, 0) has counts (1, q+1) with
        // κ-signs (+, -), κ-sum -q
        let p = params_exel(3, 1, 0, 0);
        let kappa = kappa_orbital_bruteforce(&p).unwrap();
        assert_eq!(kappa.value, rat_int(-3));
        assert_eq!(
            kappa.per_class,
            vec![("+:w".to_string(), 1), ("-:1".to_string(), 4)]
        );
        let stable = stable_orbital_bruteforce_h(&p).unwrap();
        assert_eq!(stable.value, rat_int(1));
    }

    #[test]
    fn oracle_matches_closed_forms_spot() {
        let p = params_e3(3, 1, 1, 1, 0);
        assert_eq!(
            kappa_orbital_bruteforce(&p).unwrap().value,
            kappa_orbital_closed(&p)
        );
        assert_eq!(
            stable_orbital_bruteforce_h(&p).unwrap().value,
            stable_orbital_closed(&p)
        );
        let p = params_e3(3, 1, 1, 1, 1);
        assert_eq!(kappa_orbital_bruteforce(&p).unwrap().value, rat_int(1));
        let p = params_exel(3, 1, 1, 0);
        assert_eq!(kappa_orbital_bruteforce(&p).unwrap().value, rat_int(36));
        assert_eq!(stable_orbital_bruteforce_h(&p).unwrap().value, rat_int(4));
    }

    #[test]
    fn verify_transfer_modes() {
        let p = params_e3(3, 1, 1, 1, 1);
        let rep = verify_transfer(&p, VerifyMode::Closed).unwrap();
        assert!(rep.pass);
        let rep = verify_transfer(&p, VerifyMode::Oracle).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.lhs, rep.rhs);
    }

    #[test]
    fn monotone_support_in_r() {
        // raising the level never increases a per-class count
        for r in [0u32, 1] {
            let p0 = params_e3(3, 1, 1, 1, r);
            let p1 = params_e3(3, 1, 1, 1, r + 1);
            let k0 = kappa_orbital_bruteforce(&p0).unwrap();
            let k1 = kappa_orbital_bruteforce(&p1).unwrap();
            for (a, b) in k0.per_class.iter().zip(k1.per_class.iter()) {
                assert!(b.1 <= a.1);
            }
        }
    }

    #[test]
    fn b_c_symmetry() {
        let p1 = params_e3(3, 0, 0, 2, 0);
        let p2 = params_e3(3, 0, 2, 0, 0);
        assert_eq!(kappa_orbital_closed(&p1), kappa_orbital_closed(&p2));
        assert_eq!(
            kappa_orbital_bruteforce(&p1).unwrap().value,
            kappa_orbital_bruteforce(&p2).unwrap().value
        );
        assert_eq!(
            stable_orbital_bruteforce_h(&p1).unwrap().value,
            stable_orbital_bruteforce_h(&p2).unwrap().value
        );
    }
}
