//! Exact arithmetic in O/π^N for a local field F with odd residue
//! characteristic p, its unramified quadratic extension E = F[δ] (δ² = u,
//! u a nonresidue), the ramified quadratic extension L = F[w] (w² = π),
//! and the compositum EL with basis {1, δ, w, δw}.
//!
//! Valuations are normalized so ord(π) = 1; on L and EL they are
//! half-integers, stored doubled so all comparisons stay in integers.

mod sample;

pub use sample::{sample_norm_one_e3, sample_norm_one_el};

use crate::error::{Error, Result};

/// Which extension an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtTag {
    F,
    E,
    L,
    El,
}

impl ExtTag {
    pub fn coord_count(self) -> usize {
        match self {
            ExtTag::F => 1,
            ExtTag::E | ExtTag::L => 2,
            ExtTag::El => 4,
        }
    }
}

/// A π-adic valuation, stored doubled so that ord(w) = 1/2 is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Val {
    Finite(i64),
    Infinite,
}

impl Val {
    pub fn int(k: i64) -> Val {
        Val::Finite(2 * k)
    }

    pub fn half_odd(k: i64) -> Val {
        Val::Finite(2 * k + 1)
    }

    /// Doubled value; panics on the infinite valuation.
    pub fn doubled(self) -> i64 {
        match self {
            Val::Finite(d) => d,
            Val::Infinite => panic!("infinite valuation has no finite double"),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Val::Finite(_))
    }

    /// The valuation as an integer, when it is one.
    pub fn as_int(self) -> Option<i64> {
        match self {
            Val::Finite(d) if d % 2 == 0 => Some(d / 2),
            _ => None,
        }
    }
}

impl std::fmt::Display for Val {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Val::Infinite => write!(f, "inf"),
            Val::Finite(d) if d % 2 == 0 => write!(f, "{}", d / 2),
            Val::Finite(d) => write!(f, "{}/2", d),
        }
    }
}

/// An element of O_F, O_E, O_L or O_EL at working precision.
///
/// Coordinate layout: F = [a]; E = [a, b] for a + bδ; L = [a, b] for
/// a + bw; EL = [a, b, c, d] for (a + bδ) + (c + dδ)w. Unused slots are 0.
/// `exact_zero` distinguishes the true zero from a value that merely
/// vanishes at this precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtElement {
    pub tag: ExtTag,
    pub(crate) coords: [u128; 4],
    pub(crate) exact_zero: bool,
}

impl ExtElement {
    pub fn coords(&self) -> &[u128] {
        &self.coords[..self.tag.coord_count()]
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }
}

/// E-element in compact form for the lattice kernels: [a, b] = a + bδ.
pub(crate) type Ec = [u128; 2];

/// A truncated local-arithmetic universe: fixes p, the precision N, the
/// nonresidue u for E, and the uniformizer π = p shared by F and E.
#[derive(Debug, Clone)]
pub struct LocalRingCtx {
    p: u64,
    prec: u32,
    u: u64,
    modulus: u128,
    pow_p: Vec<u128>,
    /// limb width for the wide multiplication path (127 - bits of modulus)
    limb_bits: u32,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Build a context for the odd prime p at precision N ≥ 1. The nonresidue
/// u is the least one mod p, so the construction is deterministic.
pub fn make_ctx(p: u64, n: u32) -> Result<LocalRingCtx> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidPrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidPrecision);
    }
    // p^N must leave headroom in u128 for split multiplication.
    let bits = (n as f64 + 1.0) * (p as f64).log2();
    if bits > 118.0 {
        return Err(Error::InvalidArgument(format!(
            "p^N too large for the coordinate representation: p = {p}, N = {n}"
        )));
    }
    let mut u = 0;
    for cand in 2..p {
        // Euler's criterion: cand is a nonresidue iff cand^((p-1)/2) = -1.
        if pow_mod_u64(cand, (p - 1) / 2, p) == p - 1 {
            u = cand;
            break;
        }
    }
    debug_assert!(u != 0, "every odd prime has a nonresidue below p");
    let mut pow_p = Vec::with_capacity(n as usize + 1);
    let mut acc: u128 = 1;
    for _ in 0..=n {
        pow_p.push(acc);
        acc = acc.checked_mul(p as u128).ok_or(Error::InvalidArgument(
            "p^N overflows the coordinate representation".into(),
        ))?;
    }
    let modulus = pow_p[n as usize];
    let mod_bits = 128 - modulus.leading_zeros();
    Ok(LocalRingCtx {
        p,
        prec: n,
        u,
        modulus,
        pow_p,
        limb_bits: 127 - mod_bits,
    })
}

// ---------------------------------------------------------------------------
// residue arithmetic mod p^N
// ---------------------------------------------------------------------------

impl LocalRingCtx {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn nonresidue(&self) -> u64 {
        self.u
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    #[inline]
    pub(crate) fn pow_p(&self, k: u32) -> u128 {
        self.pow_p[k as usize]
    }

    #[inline]
    pub(crate) fn radd(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn rsub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub(crate) fn rneg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub(crate) fn rmul(&self, a: u128, b: u128) -> u128 {
        if self.modulus <= u64::MAX as u128 {
            (a * b) % self.modulus
        } else {
            // Horner over limbs of `a` small enough that every intermediate
            // stays inside u128.
            let k = self.limb_bits;
            let mask = (1u128 << k) - 1;
            let mut acc = 0u128;
            let bits = 128 - a.leading_zeros();
            let mut shift = bits.div_ceil(k) * k;
            while shift > 0 {
                shift -= k;
                acc = (acc << k) % self.modulus;
                acc = (acc + ((a >> shift) & mask) * b) % self.modulus;
            }
            acc
        }
    }

    /// π-adic valuation of a residue; None when it is 0 mod p^N.
    pub(crate) fn rval(&self, a: u128) -> Option<u32> {
        if a == 0 {
            return None;
        }
        // Binary search for the largest k with p^k | a.
        let (mut lo, mut hi) = (0u32, self.prec);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if a % self.pow_p(mid) == 0 {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Some(lo)
    }

    /// Inverse of a unit residue via Hensel lifting from mod p.
    pub(crate) fn rinv(&self, a: u128) -> Option<u128> {
        if a % self.p as u128 == 0 {
            return None;
        }
        let a0 = (a % self.p as u128) as u64;
        // Fermat inverse mod p, then Newton steps to full precision.
        let mut x: u128 = pow_mod_u64(a0, self.p - 2, self.p) as u128;
        let mut k = 1u32;
        while k < self.prec {
            k = (2 * k).min(self.prec);
            // x <- x (2 - a x) mod p^k, evaluated at full precision.
            let ax = self.rmul(a, x);
            let two_minus = self.rsub(2 % self.modulus, ax);
            x = self.rmul(x, two_minus);
        }
        Some(x)
    }

    pub(crate) fn rfrom_i64(&self, v: i64) -> u128 {
        if v >= 0 {
            (v as u128) % self.modulus
        } else {
            let m = ((-(v as i128)) as u128) % self.modulus;
            self.rneg(m)
        }
    }
}

// ---------------------------------------------------------------------------
// compact E arithmetic (hot path for the lattice kernels)
// ---------------------------------------------------------------------------

impl LocalRingCtx {
    #[inline]
    pub(crate) fn ec_zero(&self) -> Ec {
        [0, 0]
    }

    #[inline]
    pub(crate) fn ec_one(&self) -> Ec {
        [1, 0]
    }

    #[inline]
    pub(crate) fn ec_add(&self, a: Ec, b: Ec) -> Ec {
        [self.radd(a[0], b[0]), self.radd(a[1], b[1])]
    }

    #[inline]
    pub(crate) fn ec_sub(&self, a: Ec, b: Ec) -> Ec {
        [self.rsub(a[0], b[0]), self.rsub(a[1], b[1])]
    }

    #[inline]
    pub(crate) fn ec_neg(&self, a: Ec) -> Ec {
        [self.rneg(a[0]), self.rneg(a[1])]
    }

    #[inline]
    pub(crate) fn ec_mul(&self, a: Ec, b: Ec) -> Ec {
        let u = self.u as u128;
        let x = self.radd(self.rmul(a[0], b[0]), self.rmul(u, self.rmul(a[1], b[1])));
        let y = self.radd(self.rmul(a[0], b[1]), self.rmul(a[1], b[0]));
        [x, y]
    }

    #[inline]
    pub(crate) fn ec_conj(&self, a: Ec) -> Ec {
        [a[0], self.rneg(a[1])]
    }

    #[inline]
    pub(crate) fn ec_scal(&self, s: u128, a: Ec) -> Ec {
        [self.rmul(s, a[0]), self.rmul(s, a[1])]
    }

    /// Integer π-adic valuation on E (unramified, so π stays prime).
    #[inline]
    pub(crate) fn ec_val(&self, a: Ec) -> Option<u32> {
        match (self.rval(a[0]), self.rval(a[1])) {
            (None, None) => None,
            (Some(v), None) | (None, Some(v)) => Some(v),
            (Some(v), Some(w)) => Some(v.min(w)),
        }
    }

    #[inline]
    pub(crate) fn ec_is_zero_mod(&self, a: Ec, k: u32) -> bool {
        debug_assert!(k <= self.prec);
        let m = self.pow_p(k.min(self.prec));
        a[0] % m == 0 && a[1] % m == 0
    }

    /// Exact division by π^k; the caller guarantees divisibility. The result
    /// is only meaningful modulo p^(N-k).
    #[inline]
    pub(crate) fn ec_shift_down(&self, a: Ec, k: u32) -> Ec {
        let m = self.pow_p(k);
        debug_assert!(a[0] % m == 0 && a[1] % m == 0);
        [a[0] / m, a[1] / m]
    }

    #[inline]
    pub(crate) fn ec_shift_up(&self, a: Ec, k: u32) -> Ec {
        let m = self.pow_p(k);
        [self.rmul(a[0], m), self.rmul(a[1], m)]
    }

    /// Canonical representative mod π^k (both coordinates reduced).
    #[inline]
    pub(crate) fn ec_reduce(&self, a: Ec, k: u32) -> Ec {
        let m = self.pow_p(k.min(self.prec));
        [a[0] % m, a[1] % m]
    }

    /// Norm to F: a² - u b².
    #[inline]
    pub(crate) fn ec_norm(&self, a: Ec) -> u128 {
        let u = self.u as u128;
        self.rsub(self.rmul(a[0], a[0]), self.rmul(u, self.rmul(a[1], a[1])))
    }

    pub(crate) fn ec_inv(&self, a: Ec) -> Option<Ec> {
        let n = self.ec_norm(a);
        let ninv = self.rinv(n)?;
        Some(self.ec_scal(ninv, self.ec_conj(a)))
    }
}

// ---------------------------------------------------------------------------
// public element API
// ---------------------------------------------------------------------------

impl LocalRingCtx {
    pub fn zero(&self, tag: ExtTag) -> ExtElement {
        ExtElement {
            tag,
            coords: [0; 4],
            exact_zero: true,
        }
    }

    pub fn one(&self, tag: ExtTag) -> ExtElement {
        self.from_int(tag, 1)
    }

    /// Embed an integer literal; 0 is marked as the exact zero.
    pub fn from_int(&self, tag: ExtTag, v: i64) -> ExtElement {
        let mut coords = [0u128; 4];
        coords[0] = self.rfrom_i64(v);
        ExtElement {
            tag,
            coords,
            exact_zero: v == 0,
        }
    }

    /// General constructor from integer coordinates in the layout of `tag`.
    pub fn element(&self, tag: ExtTag, coords: &[i64]) -> Result<ExtElement> {
        if coords.len() != tag.coord_count() {
            return Err(Error::InvalidArgument(format!(
                "{tag:?} needs {} coordinates, got {}",
                tag.coord_count(),
                coords.len()
            )));
        }
        let mut c = [0u128; 4];
        for (i, v) in coords.iter().enumerate() {
            c[i] = self.rfrom_i64(*v);
        }
        Ok(ExtElement {
            tag,
            coords: c,
            exact_zero: coords.iter().all(|&v| v == 0),
        })
    }

    pub fn pi(&self, tag: ExtTag) -> ExtElement {
        self.from_int(tag, self.p as i64)
    }

    pub fn delta(&self, tag: ExtTag) -> Result<ExtElement> {
        match tag {
            ExtTag::E => self.element(tag, &[0, 1]),
            ExtTag::El => self.element(tag, &[0, 1, 0, 0]),
            _ => Err(Error::InvalidArgument(format!("no δ in {tag:?}"))),
        }
    }

    pub fn w(&self, tag: ExtTag) -> Result<ExtElement> {
        match tag {
            ExtTag::L => self.element(tag, &[0, 1]),
            ExtTag::El => self.element(tag, &[0, 0, 1, 0]),
            _ => Err(Error::InvalidArgument(format!("no w in {tag:?}"))),
        }
    }

    fn check_tags(&self, x: &ExtElement, y: &ExtElement) -> Result<()> {
        if x.tag != y.tag {
            return Err(Error::TagMismatch(x.tag, y.tag));
        }
        Ok(())
    }

    pub fn add(&self, x: &ExtElement, y: &ExtElement) -> Result<ExtElement> {
        self.check_tags(x, y)?;
        let mut coords = [0u128; 4];
        for i in 0..4 {
            coords[i] = self.radd(x.coords[i], y.coords[i]);
        }
        Ok(ExtElement {
            tag: x.tag,
            coords,
            exact_zero: x.exact_zero && y.exact_zero,
        })
    }

    pub fn sub(&self, x: &ExtElement, y: &ExtElement) -> Result<ExtElement> {
        self.add(x, &self.neg(y))
    }

    pub fn neg(&self, x: &ExtElement) -> ExtElement {
        let mut coords = [0u128; 4];
        for i in 0..4 {
            coords[i] = self.rneg(x.coords[i]);
        }
        ExtElement {
            tag: x.tag,
            coords,
            exact_zero: x.exact_zero,
        }
    }

    pub fn mul(&self, x: &ExtElement, y: &ExtElement) -> Result<ExtElement> {
        self.check_tags(x, y)?;
        let ez = x.exact_zero || y.exact_zero;
        let coords = match x.tag {
            ExtTag::F => {
                let mut c = [0u128; 4];
                c[0] = self.rmul(x.coords[0], y.coords[0]);
                c
            }
            ExtTag::E => {
                let r = self.ec_mul([x.coords[0], x.coords[1]], [y.coords[0], y.coords[1]]);
                [r[0], r[1], 0, 0]
            }
            ExtTag::L => {
                // (a + bw)(c + dw) = ac + π bd + (ad + bc) w
                let p = self.p as u128;
                let a = self.radd(
                    self.rmul(x.coords[0], y.coords[0]),
                    self.rmul(p, self.rmul(x.coords[1], y.coords[1])),
                );
                let b = self.radd(
                    self.rmul(x.coords[0], y.coords[1]),
                    self.rmul(x.coords[1], y.coords[0]),
                );
                [a, b, 0, 0]
            }
            ExtTag::El => {
                // (x1 + x2 w)(y1 + y2 w) = x1 y1 + π x2 y2 + (x1 y2 + x2 y1) w
                let x1 = [x.coords[0], x.coords[1]];
                let x2 = [x.coords[2], x.coords[3]];
                let y1 = [y.coords[0], y.coords[1]];
                let y2 = [y.coords[2], y.coords[3]];
                let p = self.p as u128;
                let a = self.ec_add(self.ec_mul(x1, y1), self.ec_scal(p, self.ec_mul(x2, y2)));
                let b = self.ec_add(self.ec_mul(x1, y2), self.ec_mul(x2, y1));
                [a[0], a[1], b[0], b[1]]
            }
        };
        Ok(ExtElement {
            tag: x.tag,
            coords,
            exact_zero: ez,
        })
    }

    /// π-adic valuation, as a (doubled) half-integer on L and EL.
    pub fn ord(&self, x: &ExtElement) -> Result<Val> {
        let v = match x.tag {
            ExtTag::F => self.rval(x.coords[0]).map(|v| 2 * v as i64),
            ExtTag::E => self
                .ec_val([x.coords[0], x.coords[1]])
                .map(|v| 2 * v as i64),
            ExtTag::L => {
                let va = self.rval(x.coords[0]).map(|v| 2 * v as i64);
                let vb = self.rval(x.coords[1]).map(|v| 2 * v as i64 + 1);
                match (va, vb) {
                    (None, None) => None,
                    (Some(a), None) | (None, Some(a)) => Some(a),
                    (Some(a), Some(b)) => Some(a.min(b)),
                }
            }
            ExtTag::El => {
                let v1 = self
                    .ec_val([x.coords[0], x.coords[1]])
                    .map(|v| 2 * v as i64);
                let v2 = self
                    .ec_val([x.coords[2], x.coords[3]])
                    .map(|v| 2 * v as i64 + 1);
                match (v1, v2) {
                    (None, None) => None,
                    (Some(a), None) | (None, Some(a)) => Some(a),
                    (Some(a), Some(b)) => Some(a.min(b)),
                }
            }
        };
        match v {
            Some(d) => Ok(Val::Finite(d)),
            None if x.exact_zero => Ok(Val::Infinite),
            None => Err(Error::PrecisionExhausted(self.prec)),
        }
    }

    /// The conjugation of `x` over the subextension `over`: negates δ for
    /// E/F and EL/L, negates w for L/F and EL/E.
    pub fn conj(&self, x: &ExtElement, over: ExtTag) -> Result<ExtElement> {
        let coords = match (x.tag, over) {
            (ExtTag::E, ExtTag::F) => [x.coords[0], self.rneg(x.coords[1]), 0, 0],
            (ExtTag::L, ExtTag::F) => [x.coords[0], self.rneg(x.coords[1]), 0, 0],
            (ExtTag::El, ExtTag::E) => [
                x.coords[0],
                x.coords[1],
                self.rneg(x.coords[2]),
                self.rneg(x.coords[3]),
            ],
            (ExtTag::El, ExtTag::L) => [
                x.coords[0],
                self.rneg(x.coords[1]),
                x.coords[2],
                self.rneg(x.coords[3]),
            ],
            (t, o) => return Err(Error::InvalidSubextension(t, o)),
        };
        Ok(ExtElement {
            tag: x.tag,
            coords,
            exact_zero: x.exact_zero,
        })
    }

    /// norm(x) = x · conj(x), retagged into the fixed subring.
    pub fn norm(&self, x: &ExtElement, over: ExtTag) -> Result<ExtElement> {
        let c = self.conj(x, over)?;
        let prod = self.mul(x, &c)?;
        self.retag(&prod, over)
    }

    /// trace(x) = x + conj(x), retagged into the fixed subring.
    pub fn trace(&self, x: &ExtElement, over: ExtTag) -> Result<ExtElement> {
        let c = self.conj(x, over)?;
        let sum = self.add(x, &c)?;
        self.retag(&sum, over)
    }

    /// Reinterpret an element that lies in a subextension. The moved-away
    /// coordinates must vanish identically.
    fn retag(&self, x: &ExtElement, target: ExtTag) -> Result<ExtElement> {
        let coords = match (x.tag, target) {
            (ExtTag::E, ExtTag::F) | (ExtTag::L, ExtTag::F) => {
                debug_assert_eq!(x.coords[1], 0);
                [x.coords[0], 0, 0, 0]
            }
            (ExtTag::El, ExtTag::E) => {
                debug_assert!(x.coords[2] == 0 && x.coords[3] == 0);
                [x.coords[0], x.coords[1], 0, 0]
            }
            (ExtTag::El, ExtTag::L) => {
                debug_assert!(x.coords[1] == 0 && x.coords[3] == 0);
                [x.coords[0], x.coords[2], 0, 0]
            }
            (a, b) => return Err(Error::InvalidSubextension(a, b)),
        };
        Ok(ExtElement {
            tag: target,
            coords,
            exact_zero: x.exact_zero,
        })
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self, x: &ExtElement) -> Result<ExtElement> {
        match x.tag {
            ExtTag::F => {
                let v = self.rinv(x.coords[0]).ok_or(Error::NonUnit)?;
                self.element(ExtTag::F, &[0]).map(|mut e| {
                    e.coords[0] = v;
                    e.exact_zero = false;
                    e
                })
            }
            ExtTag::E => {
                let r = self
                    .ec_inv([x.coords[0], x.coords[1]])
                    .ok_or(Error::NonUnit)?;
                Ok(ExtElement {
                    tag: ExtTag::E,
                    coords: [r[0], r[1], 0, 0],
                    exact_zero: false,
                })
            }
            ExtTag::L => {
                // x^{-1} = conj(x) / N_{L/F}(x)
                let n = self.norm(x, ExtTag::F)?;
                let ninv = self.rinv(n.coords[0]).ok_or(Error::NonUnit)?;
                let c = self.conj(x, ExtTag::F)?;
                Ok(ExtElement {
                    tag: ExtTag::L,
                    coords: [
                        self.rmul(ninv, c.coords[0]),
                        self.rmul(ninv, c.coords[1]),
                        0,
                        0,
                    ],
                    exact_zero: false,
                })
            }
            ExtTag::El => {
                // x^{-1} = conj_{EL/L}(x) / N_{EL/L}(x), inverting the norm in L.
                let n = self.norm(x, ExtTag::L)?;
                let n_inv = self.embed_l_into_el(&self.inv(&n)?);
                let c = self.conj(x, ExtTag::L)?;
                self.mul(&c, &n_inv)
            }
        }
    }

    fn embed_l_into_el(&self, x: &ExtElement) -> ExtElement {
        debug_assert_eq!(x.tag, ExtTag::L);
        ExtElement {
            tag: ExtTag::El,
            coords: [x.coords[0], 0, x.coords[1], 0],
            exact_zero: x.exact_zero,
        }
    }

    /// Embed an F-element into a larger extension.
    pub fn embed(&self, x: &ExtElement, target: ExtTag) -> Result<ExtElement> {
        match (x.tag, target) {
            (a, b) if a == b => Ok(*x),
            (ExtTag::F, _) => Ok(ExtElement {
                tag: target,
                coords: [x.coords[0], 0, 0, 0],
                exact_zero: x.exact_zero,
            }),
            (ExtTag::E, ExtTag::El) => Ok(ExtElement {
                tag: ExtTag::El,
                coords: [x.coords[0], x.coords[1], 0, 0],
                exact_zero: x.exact_zero,
            }),
            (ExtTag::L, ExtTag::El) => Ok(ExtElement {
                tag: ExtTag::El,
                coords: [x.coords[0], 0, x.coords[1], 0],
                exact_zero: x.exact_zero,
            }),
            (a, b) => Err(Error::InvalidSubextension(a, b)),
        }
    }

    pub(crate) fn ec_from_ext(&self, x: &ExtElement) -> Result<Ec> {
        if x.tag != ExtTag::E {
            return Err(Error::TagMismatch(x.tag, ExtTag::E));
        }
        Ok([x.coords[0], x.coords[1]])
    }

    pub(crate) fn ext_from_ec(&self, a: Ec) -> ExtElement {
        ExtElement {
            tag: ExtTag::E,
            coords: [a[0], a[1], 0, 0],
            exact_zero: false,
        }
    }

    /// EL-element split into its two E-coordinates (x = x1 + x2 w).
    pub(crate) fn el_parts(&self, x: &ExtElement) -> Result<(Ec, Ec)> {
        if x.tag != ExtTag::El {
            return Err(Error::TagMismatch(x.tag, ExtTag::El));
        }
        Ok(([x.coords[0], x.coords[1]], [x.coords[2], x.coords[3]]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ctx_construction() {
        let ctx = make_ctx(3, 10).unwrap();
        assert_eq!(ctx.nonresidue(), 2);
        let ctx = make_ctx(5, 8).unwrap();
        assert_eq!(ctx.nonresidue(), 2);
        let ctx = make_ctx(7, 6).unwrap();
        assert_eq!(ctx.nonresidue(), 3);
        assert_eq!(make_ctx(2, 4).unwrap_err(), Error::InvalidPrime(2));
        assert_eq!(make_ctx(9, 4).unwrap_err(), Error::InvalidPrime(9));
        assert_eq!(make_ctx(3, 0).unwrap_err(), Error::InvalidPrecision);
    }

    #[test]
    fn ord_examples() {
        let ctx = make_ctx(3, 10).unwrap();
        let pi = ctx.pi(ExtTag::F);
        assert_eq!(ctx.ord(&pi).unwrap(), Val::int(1));
        let w = ctx.w(ExtTag::L).unwrap();
        assert_eq!(ctx.ord(&w).unwrap(), Val::half_odd(0));
        assert_eq!(format!("{}", ctx.ord(&w).unwrap()), "1/2");
        // 1 + δ is a unit in E for p = 3, u = 2: its norm is 1 - 2 = -1.
        let x = ctx.element(ExtTag::E, &[1, 1]).unwrap();
        assert_eq!(ctx.ord(&x).unwrap(), Val::int(0));
        // exact zero vs zero at precision
        assert_eq!(ctx.ord(&ctx.zero(ExtTag::E)).unwrap(), Val::Infinite);
        let tiny = ctx.element(ExtTag::F, &[3i64.pow(10)]).unwrap();
        assert!(!tiny.is_exact_zero());
        assert_eq!(
            ctx.ord(&tiny).unwrap_err(),
            Error::PrecisionExhausted(10)
        );
    }

    #[test]
    fn conj_norm_trace() {
        let ctx = make_ctx(3, 8).unwrap();
        let x = ctx.element(ExtTag::E, &[1, 1]).unwrap();
        let n = ctx.norm(&x, ExtTag::F).unwrap();
        // norm(1 + δ) = 1 - u = -1
        assert_eq!(n.coords()[0], ctx.rfrom_i64(-1));
        let w = ctx.w(ExtTag::L).unwrap();
        let t = ctx.trace(&w, ExtTag::F).unwrap();
        assert!(t.coords().iter().all(|&c| c == 0));
        // the cancellation is not tracked as an exact zero, so ord must
        // report exhaustion instead of guessing
        assert_eq!(ctx.ord(&t).unwrap_err(), Error::PrecisionExhausted(8));
        // conj is an involution on EL over both E and L
        let z = ctx.element(ExtTag::El, &[1, 2, 3, 4]).unwrap();
        for over in [ExtTag::E, ExtTag::L] {
            let zz = ctx.conj(&ctx.conj(&z, over).unwrap(), over).unwrap();
            assert_eq!(zz, z);
        }
        assert_eq!(
            ctx.conj(&z, ExtTag::F).unwrap_err(),
            Error::InvalidSubextension(ExtTag::El, ExtTag::F)
        );
    }

    #[test]
    fn norm_lands_in_subring() {
        let ctx = make_ctx(5, 8).unwrap();
        let z = ctx.element(ExtTag::El, &[1, 2, 3, 4]).unwrap();
        let n_l = ctx.norm(&z, ExtTag::L).unwrap();
        assert_eq!(n_l.tag, ExtTag::L);
        let n_e = ctx.norm(&z, ExtTag::E).unwrap();
        assert_eq!(n_e.tag, ExtTag::E);
        let tr = ctx.trace(&z, ExtTag::E).unwrap();
        assert_eq!(tr.tag, ExtTag::E);
    }

    #[test]
    fn inverses() {
        let ctx = make_ctx(3, 12).unwrap();
        for coords in [[1i64, 1, 0, 2], [2, 0, 1, 0], [1, 2, 2, 1]] {
            let x = ctx.element(ExtTag::El, &coords).unwrap();
            let xi = ctx.inv(&x).unwrap();
            let prod = ctx.mul(&x, &xi).unwrap();
            assert_eq!(prod.coords()[0], 1);
            assert!(prod.coords()[1..].iter().all(|&c| c == 0));
        }
        let pi = ctx.pi(ExtTag::F);
        assert_eq!(ctx.inv(&pi).unwrap_err(), Error::NonUnit);
    }

    #[test]
    fn ord_is_additive() {
        let ctx = make_ctx(3, 14).unwrap();
        let cases = [
            ([1i64, 1, 0, 0], [0i64, 3, 0, 0]),
            ([0, 0, 1, 0], [0, 0, 0, 1]),
            ([3, 0, 1, 0], [1, 1, 1, 1]),
        ];
        for (a, b) in cases {
            let x = ctx.element(ExtTag::El, &a).unwrap();
            let y = ctx.element(ExtTag::El, &b).unwrap();
            let ox = ctx.ord(&x).unwrap().doubled();
            let oy = ctx.ord(&y).unwrap().doubled();
            let oxy = ctx.ord(&ctx.mul(&x, &y).unwrap()).unwrap().doubled();
            assert_eq!(oxy, ox + oy);
        }
    }

    #[test]
    fn defining_relations() {
        let ctx = make_ctx(5, 8).unwrap();
        let d = ctx.delta(ExtTag::El).unwrap();
        let w = ctx.w(ExtTag::El).unwrap();
        let d2 = ctx.mul(&d, &d).unwrap();
        assert_eq!(d2.coords()[0], ctx.nonresidue() as u128);
        let w2 = ctx.mul(&w, &w).unwrap();
        assert_eq!(w2.coords()[0], ctx.p() as u128);
        let dw = ctx.mul(&d, &w).unwrap();
        let wd = ctx.mul(&w, &d).unwrap();
        assert_eq!(dw, wd);
    }
}
