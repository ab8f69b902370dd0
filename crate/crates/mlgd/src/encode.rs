//! Systematic encoding by Gauss-Jordan elimination of H over GF(2^r).
//!
//! The encoder reduces a dense copy of H to reduced row-echelon form once and
//! then maps messages (placed on the non-pivot columns) to codewords by
//! solving each pivot column. Rank-deficient matrices are not an error: the
//! encoder reports the actual rank and uses rank-many checks, which widens the
//! message space accordingly.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::gf::{Field, Gf};
use crate::matrix::ParityCheckMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncodeError {
    /// Message length must equal n_cols - rank.
    MessageLength { expected: usize, got: usize },
    /// Message symbol outside the field.
    BadSymbol { index: usize, value: u32 },
}

impl fmt::Display for EncodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodeError::MessageLength { expected, got } => {
                write!(f, "message length {got}, expected {expected}")
            }
            EncodeError::BadSymbol { index, value } => {
                write!(f, "message symbol {value} at {index} outside field")
            }
        }
    }
}

impl core::error::Error for EncodeError {}

/// Precomputed systematic form of a parity-check matrix.
#[derive(Debug, Clone)]
pub struct SystematicEncoder {
    field: Field,
    n: usize,
    rank: usize,
    pivot_cols: Vec<usize>,
    free_cols: Vec<usize>,
    /// For pivot p: coefficients on the free columns, so that
    /// x[pivot_cols[p]] = sum_k coeff * x[free_cols[k]] (characteristic 2).
    pivot_coeffs: Vec<Vec<(u32, Gf)>>,
}

impl SystematicEncoder {
    pub fn new(h: &ParityCheckMatrix) -> SystematicEncoder {
        let field = h.field().clone();
        let m = h.n_rows();
        let n = h.n_cols();
        let mut rows: Vec<Vec<Gf>> = vec![vec![Gf::ZERO; n]; m];
        for (i, j, v) in h.entries() {
            rows[i][j] = v;
        }

        let mut pivot_cols = Vec::new();
        let mut pivot_row_of_col: Vec<usize> = Vec::new();
        let mut next_row = 0usize;
        for col in 0..n {
            if next_row == m {
                break;
            }
            let Some(pivot) = (next_row..m).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(next_row, pivot);
            let inv = field.inv(rows[next_row][col]).expect("nonzero pivot");
            for v in rows[next_row].iter_mut() {
                *v = field.mul(*v, inv);
            }
            for i in 0..m {
                if i != next_row && !rows[i][col].is_zero() {
                    let factor = rows[i][col];
                    for j in 0..n {
                        let sub = field.mul(factor, rows[next_row][j]);
                        rows[i][j] += sub;
                    }
                }
            }
            pivot_cols.push(col);
            pivot_row_of_col.push(next_row);
            next_row += 1;
        }

        let rank = pivot_cols.len();
        let mut is_pivot = vec![false; n];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        let free_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let free_slot: Vec<usize> = {
            let mut slot = vec![usize::MAX; n];
            for (k, &c) in free_cols.iter().enumerate() {
                slot[c] = k;
            }
            slot
        };

        let pivot_coeffs = pivot_cols
            .iter()
            .zip(&pivot_row_of_col)
            .map(|(_, &row)| {
                rows[row]
                    .iter()
                    .enumerate()
                    .filter(|&(j, v)| !v.is_zero() && !is_pivot[j])
                    .map(|(j, &v)| (free_slot[j] as u32, v))
                    .collect()
            })
            .collect();

        SystematicEncoder { field, n, rank, pivot_cols, free_cols, pivot_coeffs }
    }

    /// Row rank of H; the usable number of checks.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Message symbols per codeword, n - rank.
    pub fn message_len(&self) -> usize {
        self.n - self.rank
    }

    pub fn codeword_len(&self) -> usize {
        self.n
    }

    /// Maps message symbols onto the free columns and solves the pivots,
    /// producing x with H x^T = 0.
    pub fn encode(&self, message: &[Gf]) -> Result<Vec<Gf>, EncodeError> {
        if message.len() != self.message_len() {
            return Err(EncodeError::MessageLength {
                expected: self.message_len(),
                got: message.len(),
            });
        }
        let order = self.field.order() as u32;
        for (k, &sym) in message.iter().enumerate() {
            if sym.0 as u32 >= order {
                return Err(EncodeError::BadSymbol { index: k, value: sym.0 as u32 });
            }
        }
        let mut x = vec![Gf::ZERO; self.n];
        for (k, &c) in self.free_cols.iter().enumerate() {
            x[c] = message[k];
        }
        for (p, &c) in self.pivot_cols.iter().enumerate() {
            let mut acc = Gf::ZERO;
            for &(slot, coeff) in &self.pivot_coeffs[p] {
                acc += self.field.mul(coeff, message[slot as usize]);
            }
            x[c] = acc;
        }
        Ok(x)
    }
}

/// One-shot convenience over [`SystematicEncoder`].
pub fn systematic_encode(h: &ParityCheckMatrix, message: &[Gf]) -> Result<Vec<Gf>, EncodeError> {
    SystematicEncoder::new(h).encode(message)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::generate_regular;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_message_is_zero_codeword() {
        let f = Field::new(2).unwrap();
        let h = generate_regular(f, 8, 2, 4, 9).unwrap();
        let enc = SystematicEncoder::new(&h);
        let x = enc.encode(&vec![Gf::ZERO; enc.message_len()]).unwrap();
        assert!(x.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn outputs_are_codewords() {
        let f = Field::new(3).unwrap();
        let h = generate_regular(f, 12, 3, 6, 21).unwrap();
        let enc = SystematicEncoder::new(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let msg: Vec<Gf> = (0..enc.message_len())
                .map(|_| Gf(rng.random_range(0..8u32) as u16))
                .collect();
            let x = enc.encode(&msg).unwrap();
            assert!(h.is_codeword(&x));
        }
    }

    #[test]
    fn exhaustive_small_gf4_messages_distinct_and_null() {
        let f = Field::new(2).unwrap();
        let h = generate_regular(f, 6, 2, 4, 5).unwrap(); // m = 3
        let enc = SystematicEncoder::new(&h);
        let k = enc.message_len();
        assert!(k <= 4, "test expects a small message space, got k={k}");
        let mut seen = alloc::collections::BTreeSet::new();
        for idx in 0..4usize.pow(k as u32) {
            let mut msg = Vec::with_capacity(k);
            let mut rest = idx;
            for _ in 0..k {
                msg.push(Gf((rest % 4) as u16));
                rest /= 4;
            }
            let x = enc.encode(&msg).unwrap();
            assert!(h.is_codeword(&x));
            assert!(seen.insert(x), "duplicate codeword for message {idx}");
        }
    }

    #[test]
    fn rank_deficient_matrix_still_encodes() {
        let f = Field::new(2).unwrap();
        // second row is the first row scaled by 2: rank 1
        let h = ParityCheckMatrix::from_entries(
            f,
            2,
            4,
            &[
                (0, 0, Gf(1)),
                (0, 1, Gf(3)),
                (1, 0, Gf(2)),
                (1, 1, Gf(1)), // 2*3 = x*(x+1) = x^2+x = x+1+x = 1
            ],
        )
        .unwrap();
        let enc = SystematicEncoder::new(&h);
        assert_eq!(enc.rank(), 1);
        assert_eq!(enc.message_len(), 3);
        let x = enc.encode(&[Gf(2), Gf(1), Gf(3)]).unwrap();
        assert!(h.is_codeword(&x));
    }

    #[test]
    fn message_length_checked() {
        let f = Field::new(2).unwrap();
        let h = generate_regular(f, 8, 2, 4, 9).unwrap();
        let enc = SystematicEncoder::new(&h);
        assert!(matches!(
            enc.encode(&[Gf(1)]),
            Err(EncodeError::MessageLength { .. })
        ));
    }
}
