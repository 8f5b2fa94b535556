//! Exhaustive enumeration of γ-stable self-dual lattices with the level-r
//! congruence condition (γ - 1)Λ ⊆ π^r Λ.
//!
//! Candidates are walked in canonical HNF coordinates. Self-duality pins the
//! diagonal sum (Λ ⊆ Λ* together with equal determinants forces equality),
//! and every necessary linear congruence coming from γ-stability and pairing
//! integrality is solved rather than scanned, so the walk only touches
//! cosets that can still produce lattices. Surviving candidates get a full
//! independent verification before they are counted.

use crate::error::{Error, Result};
use crate::local::{Ec, LocalRingCtx};

use super::raw::RawLattice;

/// How γ acts in the chosen eigencoordinates.
#[derive(Debug, Clone)]
pub(crate) enum GammaKind {
    /// γ = diag(λ_1, .., λ_rank) with λ_i norm-one units of E.
    Diag { lam: [Ec; 3] },
    /// Multiplication by t = t1 + t2·w on the (1, w)-coordinates of EL,
    /// preceded by a fixed eigenvalue 1 on the first coordinate when
    /// rank = 3. The 2x2 block is [[t1, π t2], [t2, t1]].
    Block { t1: Ec, t2: Ec },
}

/// One conjugacy-class model: a hermitian gram matrix and a γ matrix in the
/// same coordinates, plus the spectral data the solver needs.
#[derive(Debug, Clone)]
pub(crate) struct ClassSpace {
    pub rank: usize,
    pub gram: [[Ec; 3]; 3],
    pub gamma: [[Ec; 3]; 3],
    pub kind: GammaKind,
    pub label: String,
}

pub(crate) struct EnumOutcome {
    pub lattices: Vec<RawLattice>,
    pub states: u64,
}

/// base + π^step · (O/π^(range-step)), as canonical residues mod π^range;
/// step == range means the single element {base}.
#[derive(Debug, Clone, Copy)]
struct Coset {
    base: Ec,
    step: u32,
    range: u32,
}

impl Coset {
    fn all(range: u32) -> Coset {
        Coset {
            base: [0, 0],
            step: 0,
            range,
        }
    }

    fn ord_at_least(lo: u32, range: u32) -> Coset {
        Coset {
            base: [0, 0],
            step: lo.min(range),
            range,
        }
    }
}

struct CosetIter {
    c: Coset,
    idx: u128,
    count: u128,
    per: u128,
}

impl CosetIter {
    fn new(ctx: &LocalRingCtx, c: Coset) -> CosetIter {
        let free = c.range - c.step;
        let per = ctx.pow_p(free);
        CosetIter {
            c,
            idx: 0,
            count: per * per,
            per,
        }
    }

    fn next(&mut self, ctx: &LocalRingCtx) -> Option<Ec> {
        if self.idx >= self.count {
            return None;
        }
        let t = [self.idx % self.per, self.idx / self.per];
        self.idx += 1;
        let x = ctx.ec_add(self.c.base, ctx.ec_shift_up(t, self.c.step));
        Some(ctx.ec_reduce(x, self.c.range))
    }
}

/// Solutions x (canonical mod π^range) of μ·x ≡ rhs (mod π^m).
fn solve_linear(ctx: &LocalRingCtx, mu: Ec, rhs: Ec, m: u32, range: u32) -> Option<Coset> {
    debug_assert!(m + 2 <= ctx.precision());
    let mu_m = ctx.ec_reduce(mu, m);
    let v = match ctx.ec_val(mu_m) {
        None => {
            // μ ≡ 0 mod π^m: the constraint degenerates to rhs ≡ 0.
            return if ctx.ec_is_zero_mod(rhs, m) {
                Some(Coset::all(range))
            } else {
                None
            };
        }
        Some(v) => v,
    };
    if !ctx.ec_is_zero_mod(rhs, v) {
        return None;
    }
    let unit = ctx.ec_shift_down(mu, v);
    let uinv = ctx.ec_inv(unit)?;
    let k = m - v;
    let x0 = ctx.ec_reduce(ctx.ec_mul(uinv, ctx.ec_shift_down(rhs, v)), k);
    if k >= range {
        // at most one candidate among the canonical residues mod π^range
        let pr = ctx.pow_p(range);
        if x0[0] >= pr || x0[1] >= pr {
            return None;
        }
        let lhs = ctx.ec_mul(mu, x0);
        if !ctx.ec_is_zero_mod(ctx.ec_sub(lhs, rhs), m) {
            return None;
        }
        Some(Coset {
            base: x0,
            step: range,
            range,
        })
    } else {
        Some(Coset {
            base: x0,
            step: k,
            range,
        })
    }
}

fn intersect(ctx: &LocalRingCtx, a: Coset, b: Coset) -> Option<Coset> {
    debug_assert_eq!(a.range, b.range);
    let (coarse, fine) = if a.step <= b.step { (a, b) } else { (b, a) };
    if !ctx.ec_is_zero_mod(ctx.ec_sub(fine.base, coarse.base), coarse.step) {
        return None;
    }
    Some(fine)
}

fn intersect_all(ctx: &LocalRingCtx, cosets: &[Option<Coset>]) -> Option<Coset> {
    let mut acc: Option<Coset> = None;
    for c in cosets {
        let c = (*c)?;
        acc = Some(match acc {
            None => c,
            Some(prev) => intersect(ctx, prev, c)?,
        });
    }
    acc
}

/// Minimal admissible ord(x) for g0·N(x) + fixed ≡ 0 mod π^m, where `fixed`
/// has valuation `fixed_ord` (None = the term vanishes). Returns None when no
/// valuation can work.
fn norm_term_floor(g0_ord: u32, fixed_ord: Option<u32>, m: u32) -> Option<u32> {
    match fixed_ord {
        None => Some(m.saturating_sub(g0_ord).div_ceil(2)),
        Some(f) if f >= m => Some(m.saturating_sub(g0_ord).div_ceil(2)),
        Some(f) => {
            // cancellation at exact level f is required
            if f < g0_ord || (f - g0_ord) % 2 != 0 {
                return None;
            }
            Some((f - g0_ord) / 2)
        }
    }
}

fn mat_apply(ctx: &LocalRingCtx, rank: usize, m: &[[Ec; 3]; 3], v: &[Ec; 3]) -> [Ec; 3] {
    let mut out = [[0u128; 2]; 3];
    for (r, slot) in out.iter_mut().enumerate().take(rank) {
        let mut acc = ctx.ec_zero();
        for k in 0..rank {
            acc = ctx.ec_add(acc, ctx.ec_mul(m[r][k], v[k]));
        }
        *slot = acc;
    }
    out
}

/// Full verification of one canonical candidate: pairing integrality for all
/// column pairs, γ-stability, and the level-r congruence.
pub(crate) fn verify_candidate(
    ctx: &LocalRingCtx,
    space: &ClassSpace,
    lat: &RawLattice,
    r: u32,
    scale: u32,
) -> bool {
    let rank = space.rank;
    let two_s = 2 * scale;
    for i in 0..rank {
        for j in i..rank {
            let h = ctx.h_pair(rank, &space.gram, &lat.cols[i], &lat.cols[j]);
            if !ctx.ec_is_zero_mod(h, two_s) {
                return false;
            }
        }
    }
    for j in 0..rank {
        let gc = mat_apply(ctx, rank, &space.gamma, &lat.cols[j]);
        if !ctx.raw_contains(lat, &gc, 0) {
            return false;
        }
        if r > 0 {
            let mut diff = gc;
            for row in 0..rank {
                diff[row] = ctx.ec_sub(diff[row], lat.cols[j][row]);
            }
            if !ctx.raw_contains(lat, &diff, r) {
                return false;
            }
        }
    }
    true
}

struct Budget {
    states: u64,
    max_states: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        self.states += 1;
        if self.states > self.max_states {
            return Err(Error::BudgetExceeded(self.states));
        }
        Ok(())
    }
}

/// Enumerate all γ-stable self-dual lattices satisfying the level-r
/// congruence, with HNF diagonal exponents in |d_i| ≤ box_m.
pub(crate) fn enumerate(
    ctx: &LocalRingCtx,
    space: &ClassSpace,
    r: u32,
    box_m: i32,
    max_states: u64,
) -> Result<EnumOutcome> {
    let rank = space.rank;
    if box_m < 0 {
        return Err(Error::InvalidArgument("box radius must be >= 0".into()));
    }
    let scale = (box_m + 1) as u32;
    let prec = ctx.precision();
    if 3 * scale + 4 > prec {
        return Err(Error::PrecisionExhausted(prec));
    }

    let det_g = ctx.det3(rank, &space.gram);
    let vg = ctx.ec_val(det_g).ok_or(Error::PrecisionExhausted(prec))? as i64;
    if vg % 2 != 0 {
        // odd discriminant valuation: no self-dual lattices at all
        return Ok(EnumOutcome {
            lattices: Vec::new(),
            states: 0,
        });
    }
    let sum_d: i64 = -vg / 2;

    let mut b = Budget {
        states: 0,
        max_states,
    };
    let mut out: Vec<RawLattice> = Vec::new();

    match (rank, &space.kind) {
        (2, _) => enumerate_rank2(ctx, space, r, box_m, scale, sum_d, &mut b, &mut out)?,
        (3, GammaKind::Diag { lam }) => {
            let lam = *lam;
            enumerate_rank3_diag(ctx, space, lam, r, box_m, scale, sum_d, &mut b, &mut out)?
        }
        (3, GammaKind::Block { t1, t2 }) => {
            let (t1, t2) = (*t1, *t2);
            enumerate_rank3_block(ctx, space, t1, t2, r, box_m, scale, sum_d, &mut b, &mut out)?
        }
        _ => return Err(Error::InvalidArgument("rank must be 2 or 3".into())),
    }

    out.sort();
    Ok(EnumOutcome {
        lattices: out,
        states: b.states,
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rank2(
    ctx: &LocalRingCtx,
    space: &ClassSpace,
    r: u32,
    box_m: i32,
    scale: u32,
    sum_d: i64,
    b: &mut Budget,
    out: &mut Vec<RawLattice>,
) -> Result<()> {
    let two_s = 2 * scale;
    let g = &space.gram;
    for d1 in -box_m..=box_m {
        let d2 = sum_d - d1 as i64;
        if d2 < -(box_m as i64) || d2 > box_m as i64 {
            continue;
        }
        b.tick()?;
        let dd1 = (d1 + scale as i32) as u32;
        let dd2 = (d2 + scale as i64) as u32;
        if let Some(v) = ctx.ec_val(g[0][0]) {
            if v + 2 * dd1 < two_s {
                continue;
            }
        }
        let cosets: Vec<Option<Coset>> = match &space.kind {
            GammaKind::Diag { lam } => vec![
                solve_linear(ctx, ctx.ec_sub(lam[0], lam[1]), [0, 0], dd1, dd1),
                solve_linear(
                    ctx,
                    ctx.ec_shift_up(ctx.ec_conj(g[0][0]), dd1),
                    [0, 0],
                    two_s,
                    dd1,
                ),
            ],
            GammaKind::Block { t1, t2 } => {
                let vt2 = ctx.ec_val(*t2).expect("t2 must be nonzero");
                // γ·col1 reduces through col2 only if t2·π^D1 ≡ 0 mod π^D2
                if vt2 + dd1 < dd2 {
                    continue;
                }
                // quadratic stability residual t2·(π^(2D2+1) - x²) ≡ 0
                // mod π^(D1+D2): impossible when the modulus passes the odd
                // level, an ord floor below it
                let k = (dd1 + dd2).saturating_sub(vt2);
                if k > 2 * dd2 + 1 {
                    continue;
                }
                let ord_floor = Coset::ord_at_least(k.div_ceil(2), dd1);
                vec![
                    Some(ord_floor),
                    solve_linear(
                        ctx,
                        ctx.ec_shift_up(*t2, dd1),
                        ctx.ec_shift_up(*t1, dd1 + dd2),
                        dd1 + dd2,
                        dd1,
                    ),
                    solve_linear(ctx, *t2, ctx.ec_neg(ctx.ec_shift_up(*t1, dd2)), dd2, dd1),
                    solve_linear(
                        ctx,
                        ctx.ec_shift_up(ctx.ec_conj(g[0][0]), dd1),
                        ctx.ec_neg(ctx.ec_shift_up(ctx.ec_conj(g[0][1]), dd1 + dd2)),
                        two_s,
                        dd1,
                    ),
                ]
            }
        };
        let Some(cs) = intersect_all(ctx, &cosets) else {
            continue;
        };
        let mut it = CosetIter::new(ctx, cs);
        while let Some(x12) = it.next(ctx) {
            b.tick()?;
            let mut lat = ctx.raw_diag(2, [dd1, dd2, 0]);
            lat.cols[1][0] = x12;
            let h22 = ctx.h_pair(2, g, &lat.cols[1], &lat.cols[1]);
            if !ctx.ec_is_zero_mod(h22, two_s) {
                continue;
            }
            if verify_candidate(ctx, space, &lat, r, scale) {
                out.push(lat);
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rank3_diag(
    ctx: &LocalRingCtx,
    space: &ClassSpace,
    lam: [Ec; 3],
    r: u32,
    box_m: i32,
    scale: u32,
    sum_d: i64,
    b: &mut Budget,
    out: &mut Vec<RawLattice>,
) -> Result<()> {
    let two_s = 2 * scale;
    let g = &space.gram;
    let dif12 = ctx.ec_sub(lam[0], lam[1]);
    let dif13 = ctx.ec_sub(lam[0], lam[2]);
    let dif23 = ctx.ec_sub(lam[1], lam[2]);
    let v00 = ctx.ec_val(g[0][0]).expect("diagonal gram entry");
    let v11 = ctx.ec_val(g[1][1]).expect("diagonal gram entry");

    for d1 in -box_m..=box_m {
        let dd1 = (d1 + scale as i32) as u32;
        if v00 + 2 * dd1 < two_s {
            continue;
        }
        let cs12 = intersect_all(
            ctx,
            &[
                solve_linear(ctx, dif12, [0, 0], dd1, dd1),
                solve_linear(
                    ctx,
                    ctx.ec_shift_up(ctx.ec_conj(g[0][0]), dd1),
                    [0, 0],
                    two_s,
                    dd1,
                ),
            ],
        );
        let Some(cs12) = cs12 else { continue };
        let cs13_h = solve_linear(
            ctx,
            ctx.ec_shift_up(ctx.ec_conj(g[0][0]), dd1),
            [0, 0],
            two_s,
            dd1,
        );

        for d2 in -box_m..=box_m {
            let d3 = sum_d - d1 as i64 - d2 as i64;
            if d3 < -(box_m as i64) || d3 > box_m as i64 {
                continue;
            }
            b.tick()?;
            let dd2 = (d2 + scale as i32) as u32;
            let dd3 = (d3 + scale as i64) as u32;

            // h(c2,c2) = g00·N(x12) + g11·π^(2 D2): admissible ord(x12)?
            let fixed22 = Some(v11 + 2 * dd2).filter(|&f| f < ctx.precision());
            let Some(floor12) = norm_term_floor(v00, fixed22, two_s) else {
                continue;
            };
            let Some(cs12d) = intersect(ctx, cs12, Coset::ord_at_least(floor12, dd1)) else {
                continue;
            };
            // survivors of the exact h(c2,c2) check, hoisted out of the x23 loop
            let mut survivors12: Vec<Ec> = Vec::new();
            let mut it12 = CosetIter::new(ctx, cs12d);
            while let Some(x12) = it12.next(ctx) {
                b.tick()?;
                let h22 = ctx.ec_add(
                    ctx.ec_mul(ctx.ec_mul(g[0][0], x12), ctx.ec_conj(x12)),
                    ctx.ec_shift_up(g[1][1], 2 * dd2),
                );
                if ctx.ec_is_zero_mod(h22, two_s) {
                    survivors12.push(x12);
                }
            }
            if survivors12.is_empty() {
                continue;
            }

            let Some(cs23) = solve_linear(ctx, dif23, [0, 0], dd2, dd2) else {
                continue;
            };
            let mut it23 = CosetIter::new(ctx, cs23);
            while let Some(x23) = it23.next(ctx) {
                b.tick()?;
                // exact by the x23 constraint
                let coeff23 = ctx.ec_shift_down(ctx.ec_mul(dif23, x23), dd2);
                let c_h23_rhs =
                    ctx.ec_neg(ctx.ec_shift_up(ctx.ec_mul(ctx.ec_conj(g[1][1]), x23), dd2));
                for &x12 in &survivors12 {
                    b.tick()?;
                    let c_stab = solve_linear(ctx, dif13, ctx.ec_mul(coeff23, x12), dd1, dd1);
                    let c_h23 = solve_linear(
                        ctx,
                        ctx.ec_mul(ctx.ec_conj(g[0][0]), ctx.ec_conj(x12)),
                        c_h23_rhs,
                        two_s,
                        dd1,
                    );
                    let Some(cs13) = intersect_all(ctx, &[c_stab, cs13_h, c_h23]) else {
                        continue;
                    };
                    let mut it13 = CosetIter::new(ctx, cs13);
                    while let Some(x13) = it13.next(ctx) {
                        b.tick()?;
                        let mut lat = ctx.raw_diag(3, [dd1, dd2, dd3]);
                        lat.cols[1][0] = x12;
                        lat.cols[2][0] = x13;
                        lat.cols[2][1] = x23;
                        let h33 = ctx.h_pair(3, g, &lat.cols[2], &lat.cols[2]);
                        if !ctx.ec_is_zero_mod(h33, two_s) {
                            continue;
                        }
                        if verify_candidate(ctx, space, &lat, r, scale) {
                            out.push(lat);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rank3_block(
    ctx: &LocalRingCtx,
    space: &ClassSpace,
    t1: Ec,
    t2: Ec,
    r: u32,
    box_m: i32,
    scale: u32,
    sum_d: i64,
    b: &mut Budget,
    out: &mut Vec<RawLattice>,
) -> Result<()> {
    let two_s = 2 * scale;
    let g = &space.gram;
    let one = ctx.ec_one();
    let vt2 = ctx.ec_val(t2).expect("t2 must be nonzero");
    let v00 = ctx.ec_val(g[0][0]).expect("line gram entry");
    let v11 = ctx.ec_val(g[1][1]);
    // (1-t)(1-σt) = (1-t1)² - π t2²: multiplies the first coordinate of the
    // γ-span of any column, bounding the glue with the line
    let omt = ctx.ec_sub(one, t1);
    let res = ctx.ec_sub(ctx.ec_mul(omt, omt), ctx.ec_shift_up(ctx.ec_mul(t2, t2), 1));

    for d1 in -box_m..=box_m {
        let dd1 = (d1 + scale as i32) as u32;
        if v00 + 2 * dd1 < two_s {
            continue;
        }
        let cs12_base = intersect_all(
            ctx,
            &[
                solve_linear(ctx, res, [0, 0], dd1, dd1),
                solve_linear(
                    ctx,
                    ctx.ec_shift_up(ctx.ec_conj(g[0][0]), dd1),
                    [0, 0],
                    two_s,
                    dd1,
                ),
            ],
        );
        let Some(cs12_base) = cs12_base else { continue };
        let cs13_h = solve_linear(
            ctx,
            ctx.ec_shift_up(ctx.ec_conj(g[0][0]), dd1),
            [0, 0],
            two_s,
            dd1,
        );

        for d2 in -box_m..=box_m {
            let d3 = sum_d - d1 as i64 - d2 as i64;
            if d3 < -(box_m as i64) || d3 > box_m as i64 {
                continue;
            }
            b.tick()?;
            let dd2 = (d2 + scale as i32) as u32;
            let dd3 = (d3 + scale as i64) as u32;

            // γ·col2 must reduce through col3: t2·π^D2 ≡ 0 mod π^D3
            if vt2 + dd2 < dd3 {
                continue;
            }
            let c_low = ctx.ec_shift_down(ctx.ec_shift_up(t2, dd2), dd3);

            // quadratic stability residual for col3: t2·(π^(2D3+1) - x23²)
            // ≡ 0 mod π^(D2+D3)
            let k23 = (dd2 + dd3).saturating_sub(vt2);
            if k23 > 2 * dd3 + 1 {
                continue;
            }

            // h(c2,c2) = g00·N(x12) + g11·π^(2 D2)
            let fixed22 = v11
                .map(|v| v + 2 * dd2)
                .filter(|&f| f < ctx.precision());
            let Some(floor12) = norm_term_floor(v00, fixed22, two_s) else {
                continue;
            };
            let Some(cs12d) = intersect(ctx, cs12_base, Coset::ord_at_least(floor12, dd1))
            else {
                continue;
            };
            let mut survivors12: Vec<Ec> = Vec::new();
            let mut it12 = CosetIter::new(ctx, cs12d);
            while let Some(x12) = it12.next(ctx) {
                b.tick()?;
                let mut col2 = [[0u128; 2]; 3];
                col2[0] = x12;
                col2[1] = [ctx.pow_p(dd2), 0];
                let h22 = ctx.h_pair(3, g, &col2, &col2);
                if ctx.ec_is_zero_mod(h22, two_s) {
                    survivors12.push(x12);
                }
            }
            if survivors12.is_empty() {
                continue;
            }

            let cs23 = intersect_all(
                ctx,
                &[
                    Some(Coset::ord_at_least(k23.div_ceil(2), dd2)),
                    solve_linear(
                        ctx,
                        ctx.ec_shift_up(t2, dd2),
                        ctx.ec_shift_up(t1, dd2 + dd3),
                        dd2 + dd3,
                        dd2,
                    ),
                    solve_linear(ctx, t2, ctx.ec_neg(ctx.ec_shift_up(t1, dd3)), dd3, dd2),
                ],
            );
            let Some(cs23) = cs23 else { continue };
            let mut it23 = CosetIter::new(ctx, cs23);
            while let Some(x23) = it23.next(ctx) {
                b.tick()?;
                // γ·col3 row 3 coefficient and row 2 residual (quadratic in x23)
                let low3 = ctx.ec_add(ctx.ec_mul(t2, x23), ctx.ec_shift_up(t1, dd3));
                if !ctx.ec_is_zero_mod(low3, dd3) {
                    continue;
                }
                let c3p = ctx.ec_shift_down(low3, dd3);
                let resid2 = ctx.ec_sub(
                    ctx.ec_add(ctx.ec_mul(t1, x23), ctx.ec_shift_up(t2, dd3 + 1)),
                    ctx.ec_mul(c3p, x23),
                );
                if !ctx.ec_is_zero_mod(resid2, dd2) {
                    continue;
                }
                let c2p = ctx.ec_shift_down(resid2, dd2);
                // γ·col2 row 2 coefficient
                let top2 = ctx.ec_sub(ctx.ec_shift_up(t1, dd2), ctx.ec_mul(c_low, x23));
                if !ctx.ec_is_zero_mod(top2, dd2) {
                    continue;
                }
                let c2 = ctx.ec_shift_down(top2, dd2);
                // the (x13-free) part of h(c2,c3)
                let h23_rhs = ctx.ec_neg(ctx.ec_add(
                    ctx.ec_shift_up(
                        ctx.ec_mul(ctx.ec_conj(g[1][1]), x23),
                        dd2,
                    ),
                    ctx.ec_shift_up(ctx.ec_conj(g[1][2]), dd2 + dd3),
                ));

                for &x12 in &survivors12 {
                    b.tick()?;
                    let c_a = solve_linear(
                        ctx,
                        c_low,
                        ctx.ec_mul(ctx.ec_sub(one, c2), x12),
                        dd1,
                        dd1,
                    );
                    let c_b = solve_linear(
                        ctx,
                        ctx.ec_sub(one, c3p),
                        ctx.ec_mul(c2p, x12),
                        dd1,
                        dd1,
                    );
                    let c_h23 = solve_linear(
                        ctx,
                        ctx.ec_mul(ctx.ec_conj(g[0][0]), ctx.ec_conj(x12)),
                        h23_rhs,
                        two_s,
                        dd1,
                    );
                    let Some(cs13) = intersect_all(ctx, &[c_a, c_b, cs13_h, c_h23]) else {
                        continue;
                    };
                    let mut it13 = CosetIter::new(ctx, cs13);
                    while let Some(x13) = it13.next(ctx) {
                        b.tick()?;
                        let mut lat = ctx.raw_diag(3, [dd1, dd2, dd3]);
                        lat.cols[1][0] = x12;
                        lat.cols[2][0] = x13;
                        lat.cols[2][1] = x23;
                        let h33 = ctx.h_pair(3, g, &lat.cols[2], &lat.cols[2]);
                        if !ctx.ec_is_zero_mod(h33, two_s) {
                            continue;
                        }
                        if verify_candidate(ctx, space, &lat, r, scale) {
                            out.push(lat);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}
