//! Naive dense reference implementations used as cross-checks.
//!
//! Everything here is deliberately slow and literal: polynomial arithmetic
//! without tables, dense matrices, and direct transcriptions of the update
//! rules with no shared code or shortcuts from the production decoder. Tests
//! compare the optimized paths against these bit for bit on small instances.

use alloc::vec;
use alloc::vec::Vec;

use crate::gf::Gf;

/// Carry-less polynomial product reduced by `poly`, no tables.
pub fn mul_naive(r: u32, poly: u32, a: Gf, b: Gf) -> Gf {
    let mut acc: u32 = 0;
    let av = a.0 as u32;
    let bv = b.0 as u32;
    for t in 0..r {
        if (bv >> t) & 1 == 1 {
            acc ^= av << t;
        }
    }
    // reduce degree 2r-2 .. r terms
    for deg in (r..2 * r).rev() {
        if (acc >> deg) & 1 == 1 {
            acc ^= poly << (deg - r);
        }
    }
    Gf(acc as u16)
}

/// Dense parity-check matrix for reference computations; 0 entries are absent.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    pub r: u32,
    pub poly: u32,
    /// rows[i][j] = h_{i,j} as a raw value
    pub rows: Vec<Vec<u16>>,
}

impl DenseMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    fn mul(&self, a: Gf, b: Gf) -> Gf {
        mul_naive(self.r, self.poly, a, b)
    }

    fn inv(&self, a: Gf) -> Gf {
        let q = 1u16 << self.r;
        for b in 1..q {
            if self.mul(a, Gf(b)) == Gf::ONE {
                return Gf(b);
            }
        }
        panic!("no inverse for {} (zero or bad field)", a.0);
    }

    /// s = H z^T by the definition.
    pub fn syndrome(&self, z: &[Gf]) -> Vec<Gf> {
        self.rows
            .iter()
            .map(|row| {
                let mut s = Gf::ZERO;
                for (j, &h) in row.iter().enumerate() {
                    if h != 0 {
                        s += self.mul(Gf(h), z[j]);
                    }
                }
                s
            })
            .collect()
    }

    /// Literal extrinsic check sum: h_{i,j}^{-1} * sum_{t in N(i)\{j}} h_{i,t} z_t.
    pub fn extrinsic_sigma_direct(&self, z: &[Gf], i: usize, j: usize) -> Gf {
        let h_ij = self.rows[i][j];
        assert!(h_ij != 0, "({i},{j}) is not an edge");
        let mut sum = Gf::ZERO;
        for (t, &h) in self.rows[i].iter().enumerate() {
            if t != j && h != 0 {
                sum += self.mul(Gf(h), z[t]);
            }
        }
        self.mul(self.inv(Gf(h_ij)), sum)
    }
}

/// Per-bit channel correlations: phi[j][l] = sum_t (1 - 2 a_{l,t}) q_{j,t}.
pub fn channel_correlations(r: u32, q: &[i32]) -> Vec<Vec<i64>> {
    let r = r as usize;
    assert_eq!(q.len() % r, 0);
    let n = q.len() / r;
    let order = 1usize << r;
    let mut phi = vec![vec![0i64; order]; n];
    for j in 0..n {
        for l in 0..order {
            let mut sum = 0i64;
            for t in 0..r {
                let sign = 1 - 2 * ((l >> t) & 1) as i64;
                sum += sign * q[j * r + t] as i64;
            }
            phi[j][l] = sum;
        }
    }
    phi
}

/// Hard decisions from quantized bits: bit t of z_j set iff q_{j,t} < 0.
pub fn hard_decisions(r: u32, q: &[i32]) -> Vec<Gf> {
    let r = r as usize;
    let n = q.len() / r;
    (0..n)
        .map(|j| {
            let mut v = 0u16;
            for t in 0..r {
                if q[j * r + t] < 0 {
                    v |= 1 << t;
                }
            }
            Gf(v)
        })
        .collect()
}

/// Extrinsic weights by the literal double loop:
/// w[i][j] = min over t in N(i)\{j} of max_l phi[t][l].
pub fn extrinsic_weights(h: &DenseMatrix, phi: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let m = h.n_rows();
    let n = h.n_cols();
    let mut w = vec![vec![0i64; n]; m];
    for i in 0..m {
        for j in 0..n {
            if h.rows[i][j] == 0 {
                continue;
            }
            let mut best = i64::MAX;
            for t in 0..n {
                if t == j || h.rows[i][t] == 0 {
                    continue;
                }
                let row_max = *phi[t].iter().max().unwrap();
                best = best.min(row_max);
            }
            w[i][j] = best;
        }
    }
    w
}

/// Which reliability update a soft reference iteration applies.
#[derive(Debug, Clone, Copy)]
pub enum SoftUpdate {
    /// R <- R + psi, with R0 = lambda * phi.
    Accumulate { lambda: i64 },
    /// R <- xi1 * phi + psi, with the extrinsic weights scaled by xi2.
    Fresh { xi1: i64, xi2: i64 },
}

/// Full state after one literal soft iteration, or None when the syndrome of
/// the initial hard decisions is already zero.
pub struct SoftIterationRef {
    pub reliabilities: Vec<Vec<i64>>,
    pub hard: Vec<Gf>,
}

/// One literal iteration of the soft reliability update, straight transcription:
/// initialization, syndrome, per-edge sigma by the direct sum (no syndrome
/// shortcut), psi accumulation, reliability update, full-scan argmax with the
/// smallest-index tie rule.
pub fn soft_one_iteration(h: &DenseMatrix, q: &[i32], update: SoftUpdate) -> Option<SoftIterationRef> {
    let n = h.n_cols();
    let order = 1usize << h.r;
    let phi = channel_correlations(h.r, q);
    let z0 = hard_decisions(h.r, q);

    let (base, weights): (Vec<Vec<i64>>, Vec<Vec<i64>>) = match update {
        SoftUpdate::Accumulate { lambda } => {
            let base = phi.iter().map(|row| row.iter().map(|&v| lambda * v).collect()).collect();
            (base, extrinsic_weights(h, &phi))
        }
        SoftUpdate::Fresh { xi1, xi2 } => {
            let base = phi.iter().map(|row| row.iter().map(|&v| xi1 * v).collect()).collect();
            let w = extrinsic_weights(h, &phi)
                .into_iter()
                .map(|row| row.into_iter().map(|v| xi2 * v).collect())
                .collect();
            (base, w)
        }
    };

    let s = h.syndrome(&z0);
    if s.iter().all(|v| v.is_zero()) {
        return None;
    }

    let mut psi = vec![vec![0i64; order]; n];
    for j in 0..n {
        for i in 0..h.n_rows() {
            if h.rows[i][j] == 0 {
                continue;
            }
            let sigma = h.extrinsic_sigma_direct(&z0, i, j);
            psi[j][sigma.index()] += weights[i][j];
        }
    }

    let mut reliab = vec![vec![0i64; order]; n];
    let mut hard = vec![Gf::ZERO; n];
    for j in 0..n {
        for l in 0..order {
            // both rules read "initial term + psi"; they differ only in what
            // the initial term and weights already contain
            reliab[j][l] = base[j][l] + psi[j][l];
        }
        let mut best = 0usize;
        for l in 1..order {
            if reliab[j][l] > reliab[j][best] {
                best = l;
            }
        }
        hard[j] = Gf(best as u16);
    }
    Some(SoftIterationRef { reliabilities: reliab, hard })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_mul_basics() {
        // GF(8), x * x^2 = x + 1
        assert_eq!(mul_naive(3, 0b1011, Gf(2), Gf(4)), Gf(3));
        assert_eq!(mul_naive(3, 0b1011, Gf(5), Gf(0)), Gf(0));
        assert_eq!(mul_naive(3, 0b1011, Gf(5), Gf(1)), Gf(5));
    }

    #[test]
    fn dense_syndrome_zero_word() {
        let h = DenseMatrix {
            r: 2,
            poly: 0b111,
            rows: vec![vec![1, 2, 0, 3], vec![0, 1, 1, 2]],
        };
        let z = vec![Gf::ZERO; 4];
        assert!(h.syndrome(&z).iter().all(|v| v.is_zero()));
    }
}
