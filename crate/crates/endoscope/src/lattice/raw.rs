//! Low-level lattice kernel: canonical column HNF over O_E at working
//! precision, membership tests, duals and pairing checks.
//!
//! Lattices are stored at a fixed global scale: the stored basis is the true
//! basis multiplied by π^scale, so every entry is integral and two equal
//! lattices have bit-identical canonical forms. Hermitian pairings of stored
//! columns are therefore tested against π^(2·scale).

use crate::error::{Error, Result};
use crate::local::{Ec, LocalRingCtx};

/// Canonical integral HNF basis. Column j has diagonal entry π^dd[j] in row
/// j, zeros below, and entries above reduced mod π^dd[row].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct RawLattice {
    pub rank: usize,
    pub dd: [u32; 3],
    /// cols[j][r] is the row-r entry of column j.
    pub cols: [[Ec; 3]; 3],
}

impl RawLattice {
    pub(crate) fn ord_det(&self) -> i64 {
        self.dd[..self.rank].iter().map(|&d| d as i64).sum()
    }
}

impl LocalRingCtx {
    pub(crate) fn raw_diag(&self, rank: usize, dd: [u32; 3]) -> RawLattice {
        let mut cols = [[[0u128; 2]; 3]; 3];
        for (j, c) in cols.iter_mut().enumerate().take(rank) {
            c[j] = [self.pow_p(dd[j]), 0];
        }
        RawLattice { rank, dd, cols }
    }

    /// Canonical column HNF of a spanning set. Fails with RankDeficient when
    /// the columns do not span at working precision, and with
    /// PrecisionExhausted when a pivot sits too close to the truncation
    /// level to be trusted.
    pub(crate) fn hnf(&self, rank: usize, columns: &[[Ec; 3]]) -> Result<RawLattice> {
        let n = columns.len();
        if n < rank {
            return Err(Error::RankDeficient);
        }
        let mut work: Vec<[Ec; 3]> = columns.to_vec();
        let mut dd = [0u32; 3];
        // Pivot rows from the bottom up; after step `row`, columns to the
        // right of the pivot position are supported strictly above `row`.
        let mut pivots: Vec<usize> = Vec::with_capacity(rank);
        let mut avail: Vec<usize> = (0..n).collect();
        for row in (0..rank).rev() {
            let mut best: Option<(u32, usize)> = None;
            for &j in &avail {
                if let Some(v) = self.ec_val(work[j][row]) {
                    if best.map_or(true, |(bv, _)| v < bv) {
                        best = Some((v, j));
                    }
                }
            }
            let (v, jpiv) = best.ok_or(Error::RankDeficient)?;
            if v + 2 > self.precision() {
                return Err(Error::PrecisionExhausted(self.precision()));
            }
            // Normalize the pivot column so the pivot entry is exactly π^v.
            let unit = self.ec_shift_down(work[jpiv][row], v);
            let uinv = self.ec_inv(unit).ok_or(Error::PrecisionExhausted(self.precision()))?;
            for r in 0..rank {
                work[jpiv][r] = self.ec_mul(work[jpiv][r], uinv);
            }
            work[jpiv][row] = [self.pow_p(v), 0];
            // Clear this row in every other available column.
            for &j in &avail {
                if j == jpiv {
                    continue;
                }
                let e = work[j][row];
                if self.ec_is_zero_mod(e, self.precision()) {
                    work[j][row] = [0, 0];
                    continue;
                }
                let q = self.ec_shift_down_lenient(e, v).ok_or(Error::RankDeficient)?;
                for r in 0..rank {
                    let t = self.ec_mul(q, work[jpiv][r]);
                    work[j][r] = self.ec_sub(work[j][r], t);
                }
                work[j][row] = [0, 0];
            }
            dd[row] = v;
            avail.retain(|&j| j != jpiv);
            pivots.push(jpiv);
        }
        pivots.reverse();
        let mut cols = [[[0u128; 2]; 3]; 3];
        for (slot, &j) in pivots.iter().enumerate() {
            for r in 0..rank {
                cols[slot][r] = work[j][r];
            }
        }
        let mut lat = RawLattice { rank, dd, cols };
        self.hnf_reduce_above(&mut lat);
        Ok(lat)
    }

    /// Exact division by π^v that reports failure instead of asserting.
    fn ec_shift_down_lenient(&self, a: Ec, v: u32) -> Option<Ec> {
        let m = self.pow_p(v);
        if a[0] % m != 0 || a[1] % m != 0 {
            return None;
        }
        Some([a[0] / m, a[1] / m])
    }

    /// Reduce above-diagonal entries to canonical representatives.
    fn hnf_reduce_above(&self, lat: &mut RawLattice) {
        let rank = lat.rank;
        for j in 1..rank {
            for i in (0..j).rev() {
                let e = lat.cols[j][i];
                let rem = self.ec_reduce(e, lat.dd[i]);
                let q = self.ec_shift_down(self.ec_sub(e, rem), lat.dd[i]);
                for r in 0..=i {
                    let t = self.ec_mul(q, lat.cols[i][r]);
                    lat.cols[j][r] = self.ec_sub(lat.cols[j][r], t);
                }
                lat.cols[j][i] = rem;
            }
            // Rounding above the diagonal must not disturb rows >= j.
            debug_assert_eq!(lat.cols[j][j], [self.pow_p(lat.dd[j]), 0]);
        }
        for j in 0..rank {
            for i in 0..j {
                lat.cols[j][i] = self.ec_reduce(lat.cols[j][i], lat.dd[i]);
            }
        }
    }

    /// Does `y` lie in the stored lattice, after dividing by π^shift?
    /// (shift = r tests membership in π^r · Λ.)
    pub(crate) fn raw_contains(&self, lat: &RawLattice, y: &[Ec; 3], shift: u32) -> bool {
        let mut v = *y;
        if shift > 0 {
            for r in 0..lat.rank {
                if !self.ec_is_zero_mod(v[r], shift) {
                    return false;
                }
                v[r] = self.ec_shift_down(v[r], shift);
            }
        }
        for row in (0..lat.rank).rev() {
            let e = v[row];
            if !self.ec_is_zero_mod(e, lat.dd[row]) {
                return false;
            }
            let q = self.ec_shift_down(e, lat.dd[row]);
            for r in 0..=row {
                let t = self.ec_mul(q, lat.cols[row][r]);
                v[r] = self.ec_sub(v[r], t);
            }
        }
        true
    }

    /// Hermitian pairing of two coordinate vectors: Σ G[i][k] x_i conj(y_k).
    pub(crate) fn h_pair(
        &self,
        rank: usize,
        gram: &[[Ec; 3]; 3],
        x: &[Ec; 3],
        y: &[Ec; 3],
    ) -> Ec {
        let mut acc = self.ec_zero();
        for i in 0..rank {
            if self.ec_is_zero_mod(x[i], self.precision()) {
                continue;
            }
            for k in 0..rank {
                let g = gram[i][k];
                if g == [0, 0] {
                    continue;
                }
                let t = self.ec_mul(self.ec_mul(g, x[i]), self.ec_conj(y[k]));
                acc = self.ec_add(acc, t);
            }
        }
        acc
    }

    /// 2x2 or 3x3 determinant over E.
    pub(crate) fn det3(&self, rank: usize, m: &[[Ec; 3]; 3]) -> Ec {
        match rank {
            1 => m[0][0],
            2 => self.ec_sub(
                self.ec_mul(m[0][0], m[1][1]),
                self.ec_mul(m[0][1], m[1][0]),
            ),
            3 => {
                let mut acc = self.ec_zero();
                // cofactor expansion along the first row
                for (k, sign) in [(0usize, false), (1, true), (2, false)] {
                    let (c0, c1) = match k {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    let minor = self.ec_sub(
                        self.ec_mul(m[1][c0], m[2][c1]),
                        self.ec_mul(m[1][c1], m[2][c0]),
                    );
                    let term = self.ec_mul(m[0][k], minor);
                    acc = if sign {
                        self.ec_sub(acc, term)
                    } else {
                        self.ec_add(acc, term)
                    };
                }
                acc
            }
            _ => unreachable!("rank must be 1..=3"),
        }
    }

    /// Adjugate satisfying adj(M) · M = det(M) · I.
    pub(crate) fn adjugate(&self, rank: usize, m: &[[Ec; 3]; 3]) -> [[Ec; 3]; 3] {
        let mut a = [[[0u128; 2]; 3]; 3];
        match rank {
            1 => a[0][0] = self.ec_one(),
            2 => {
                a[0][0] = m[1][1];
                a[0][1] = self.ec_neg(m[0][1]);
                a[1][0] = self.ec_neg(m[1][0]);
                a[1][1] = m[0][0];
            }
            3 => {
                for i in 0..3 {
                    for j in 0..3 {
                        let (r0, r1) = match j {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let (c0, c1) = match i {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let minor = self.ec_sub(
                            self.ec_mul(m[r0][c0], m[r1][c1]),
                            self.ec_mul(m[r0][c1], m[r1][c0]),
                        );
                        // a[i][j] = (-1)^{i+j} · minor(j, i)
                        a[i][j] = if (i + j) % 2 == 0 {
                            minor
                        } else {
                            self.ec_neg(minor)
                        };
                    }
                }
            }
            _ => unreachable!(),
        }
        a
    }

    /// Dual of a stored lattice with respect to `gram`, at the same scale.
    ///
    /// The dual is the kernel lattice {y : h(y, col_j) ≡ 0 mod π^(2·scale)},
    /// computed through the adjugate of (G · conj(C))ᵀ.
    pub(crate) fn raw_dual(
        &self,
        lat: &RawLattice,
        gram: &[[Ec; 3]; 3],
        scale: u32,
    ) -> Result<RawLattice> {
        self.raw_dual_opt(lat, gram, scale)?
            .ok_or(Error::PrecisionExhausted(self.precision()))
    }

    /// Like `raw_dual`, but Ok(None) when the dual exists and simply does
    /// not fit the scale window (so it cannot equal any stored lattice).
    pub(crate) fn raw_dual_opt(
        &self,
        lat: &RawLattice,
        gram: &[[Ec; 3]; 3],
        scale: u32,
    ) -> Result<Option<RawLattice>> {
        let rank = lat.rank;
        // M[j][i] = Σ_k G[i][k] conj(cols[j][k]);  y ∈ dual  ⟺  M y ≡ 0
        // mod π^(2·scale), and the kernel is spanned by π^(2·scale)·M^{-1}.
        let mut m = [[[0u128; 2]; 3]; 3];
        for j in 0..rank {
            for i in 0..rank {
                let mut acc = self.ec_zero();
                for k in 0..rank {
                    let t = self.ec_mul(gram[i][k], self.ec_conj(lat.cols[j][k]));
                    acc = self.ec_add(acc, t);
                }
                m[j][i] = acc;
            }
        }
        let det = self.det3(rank, &m);
        let v = self
            .ec_val(det)
            .ok_or(Error::PrecisionExhausted(self.precision()))?;

        // The adjugate spans π^(v - 2·scale)·dual and carries determinant
        // valuation (rank-1)·v, which the HNF must be able to resolve.
        if 2 * v + 4 > self.precision() {
            return Err(Error::PrecisionExhausted(self.precision()));
        }
        let unit = self.ec_shift_down(det, v);
        let uinv = self
            .ec_inv(unit)
            .ok_or(Error::PrecisionExhausted(self.precision()))?;
        let adj = self.adjugate(rank, &m);
        let mut cols: Vec<[Ec; 3]> = Vec::with_capacity(rank);
        for j in 0..rank {
            let mut col = [[0u128; 2]; 3];
            for (r, slot) in col.iter_mut().enumerate().take(rank) {
                *slot = self.ec_mul(uinv, adj[r][j]);
            }
            cols.push(col);
        }
        let h = self.hnf(rank, &cols)?;
        // Shift the canonical form by π^(2·scale - v) to land on the dual.
        let up = 2 * scale as i64 - v as i64;
        let mut dd = [0u32; 3];
        let mut out_cols = [[[0u128; 2]; 3]; 3];
        for j in 0..rank {
            let nd = h.dd[j] as i64 + up;
            if nd < 0 {
                return Ok(None);
            }
            dd[j] = nd as u32;
        }
        for j in 0..rank {
            for r in 0..rank {
                out_cols[j][r] = if up >= 0 {
                    self.ec_shift_up(h.cols[j][r], up as u32)
                } else {
                    let k = (-up) as u32;
                    if !self.ec_is_zero_mod(h.cols[j][r], k) {
                        return Ok(None);
                    }
                    self.ec_shift_down(h.cols[j][r], k)
                };
            }
        }
        Ok(Some(RawLattice {
            rank,
            dd,
            cols: out_cols,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::make_ctx;

    fn gram_diag(ctx: &LocalRingCtx, rank: usize, ords: &[u32]) -> [[Ec; 3]; 3] {
        let mut g = [[[0u128; 2]; 3]; 3];
        for i in 0..rank {
            g[i][i] = [ctx.pow_p(ords[i]), 0];
        }
        g
    }

    #[test]
    fn hnf_identity_and_scaled() {
        let ctx = make_ctx(3, 12).unwrap();
        let one = ctx.ec_one();
        let cols = vec![
            [one, [0, 0], [0, 0]],
            [[0, 0], one, [0, 0]],
            [[0, 0], [0, 0], one],
        ];
        let h = ctx.hnf(3, &cols).unwrap();
        assert_eq!(h.dd, [0, 0, 0]);
        let p = ctx.p() as u128;
        let cols = vec![
            [[p, 0], [0, 0], [0, 0]],
            [[0, 0], [p, 0], [0, 0]],
            [[0, 0], [0, 0], [p, 0]],
        ];
        let h = ctx.hnf(3, &cols).unwrap();
        assert_eq!(h.dd, [1, 1, 1]);
    }

    #[test]
    fn hnf_rank_deficient() {
        let ctx = make_ctx(3, 12).unwrap();
        let one = ctx.ec_one();
        let cols = vec![
            [one, one, [0, 0]],
            [one, one, [0, 0]],
            [[0, 0], [0, 0], [0, 0]],
        ];
        assert_eq!(ctx.hnf(3, &cols).unwrap_err(), Error::RankDeficient);
    }

    #[test]
    fn hnf_idempotent_and_mix_invariant() {
        let ctx = make_ctx(3, 14).unwrap();
        let a = [[1, 1], [0, 2], [3, 0]];
        let b = [[0, 0], [9, 1], [1, 1]];
        let c = [[0, 0], [0, 0], [27, 5]];
        let h1 = ctx.hnf(3, &[a, b, c]).unwrap();
        // permuted and column-mixed spanning set of the same lattice
        let ab = [0, 1, 2].map(|i| ctx.ec_add(a[i], b[i]));
        let bc3 = [0, 1, 2].map(|i| ctx.ec_add(b[i], ctx.ec_scal(3, c[i])));
        let h2 = ctx.hnf(3, &[c, ab, bc3, b]).unwrap();
        assert_eq!(h1, h2);
        let again = ctx
            .hnf(3, &[h1.cols[0], h1.cols[1], h1.cols[2]])
            .unwrap();
        assert_eq!(h1, again);
    }

    #[test]
    fn membership() {
        let ctx = make_ctx(3, 12).unwrap();
        let lat = ctx.raw_diag(3, [1, 0, 2]);
        let y = [[3, 0], [5, 2], [9, 9]];
        assert!(ctx.raw_contains(&lat, &y, 0));
        let y_bad = [[1, 0], [0, 0], [0, 0]];
        assert!(!ctx.raw_contains(&lat, &y_bad, 0));
    }

    #[test]
    fn dual_of_unimodular_is_self() {
        let ctx = make_ctx(3, 26).unwrap();
        let g = gram_diag(&ctx, 3, &[0, 0, 0]);
        let scale = 2u32;
        let lat = ctx.raw_diag(3, [scale, scale, scale]);
        let d = ctx.raw_dual(&lat, &g, scale).unwrap();
        assert_eq!(d, lat);
        // scaling is antitone: dual(πΛ) = π^{-1}Λ
        let lat_pi = ctx.raw_diag(3, [scale + 1, scale + 1, scale + 1]);
        let d = ctx.raw_dual(&lat_pi, &g, scale).unwrap();
        assert_eq!(d, ctx.raw_diag(3, [scale - 1, scale - 1, scale - 1]));
    }

    #[test]
    fn dual_is_involutive() {
        let ctx = make_ctx(3, 44).unwrap();
        let g = gram_diag(&ctx, 3, &[0, 1, 1]);
        let scale = 4u32;
        // a non-diagonal lattice with moderate glue, stored at scale 4
        let cols = vec![
            [[81, 0], [0, 0], [0, 0]],
            [[27, 27], [27, 0], [0, 0]],
            [[9, 0], [9, 9], [81, 0]],
        ];
        let lat = ctx.hnf(3, &cols).unwrap();
        let d = ctx.raw_dual(&lat, &g, scale).unwrap();
        let dd = ctx.raw_dual(&d, &g, scale).unwrap();
        assert_eq!(dd, lat);
    }
}
