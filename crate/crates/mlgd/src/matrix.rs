//! Sparse parity-check matrices over GF(2^r) with row and column adjacency.
//!
//! The decoder walks rows for syndromes and columns for variable updates, so
//! entries are stored twice: a row-major CSR and a column-major view that also
//! caches each entry's inverse.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gf::{Field, Gf};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    /// Entry value is zero or outside the field.
    BadValue { row: usize, col: usize, value: u32 },
    /// Entry position outside the declared dimensions.
    PositionOutOfRange { row: usize, col: usize },
    /// Two entries at the same position.
    DuplicatePosition { row: usize, col: usize },
    /// Vector length does not match the matrix dimension.
    LengthMismatch { expected: usize, got: usize },
    /// N*gamma must be divisible by rho and the dimensions positive.
    InfeasibleRegular { n: usize, gamma: usize, rho: usize },
    /// Regular construction did not find a collision-free edge assignment.
    GenerationFailed,
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::BadValue { row, col, value } => {
                write!(f, "entry ({row},{col}) has invalid value {value}")
            }
            MatrixError::PositionOutOfRange { row, col } => {
                write!(f, "entry position ({row},{col}) out of range")
            }
            MatrixError::DuplicatePosition { row, col } => {
                write!(f, "duplicate entry at ({row},{col})")
            }
            MatrixError::LengthMismatch { expected, got } => {
                write!(f, "vector length {got}, expected {expected}")
            }
            MatrixError::InfeasibleRegular { n, gamma, rho } => {
                write!(f, "no ({gamma},{rho})-regular matrix with n={n}: n*gamma must divide by rho")
            }
            MatrixError::GenerationFailed => {
                write!(f, "regular construction failed after bounded retries")
            }
        }
    }
}

impl core::error::Error for MatrixError {}

/// Sparse M x N parity-check matrix; immutable after construction.
#[derive(Debug, Clone)]
pub struct ParityCheckMatrix {
    field: Field,
    n_rows: usize,
    n_cols: usize,
    // row-major CSR
    row_ptr: Vec<usize>,
    row_cols: Vec<u32>,
    row_vals: Vec<Gf>,
    // column-major view
    col_ptr: Vec<usize>,
    col_rows: Vec<u32>,
    col_vals: Vec<Gf>,
    /// cached h_{i,j}^{-1}, column-edge order
    col_inv_vals: Vec<Gf>,
    /// column-edge id for each row-edge id (same (i,j), other ordering)
    row_edge_to_col_edge: Vec<u32>,
    regular: Option<(usize, usize)>,
}

impl ParityCheckMatrix {
    /// Builds the matrix from (row, col, value) entries. Values must be
    /// nonzero field elements and positions unique.
    pub fn from_entries(
        field: Field,
        n_rows: usize,
        n_cols: usize,
        entries: &[(usize, usize, Gf)],
    ) -> Result<ParityCheckMatrix, MatrixError> {
        let order = field.order() as u32;
        let mut sorted: Vec<(usize, usize, Gf)> = Vec::with_capacity(entries.len());
        for &(i, j, v) in entries {
            if i >= n_rows || j >= n_cols {
                return Err(MatrixError::PositionOutOfRange { row: i, col: j });
            }
            if v.is_zero() || v.0 as u32 >= order {
                return Err(MatrixError::BadValue { row: i, col: j, value: v.0 as u32 });
            }
            sorted.push((i, j, v));
        }
        sorted.sort_unstable_by_key(|&(i, j, _)| (i, j));
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(MatrixError::DuplicatePosition { row: w[0].0, col: w[0].1 });
            }
        }

        let e = sorted.len();
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut row_cols = Vec::with_capacity(e);
        let mut row_vals = Vec::with_capacity(e);
        for &(i, j, v) in &sorted {
            row_ptr[i + 1] += 1;
            row_cols.push(j as u32);
            row_vals.push(v);
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }

        let mut col_weight = vec![0usize; n_cols];
        for &(_, j, _) in &sorted {
            col_weight[j] += 1;
        }
        let mut col_ptr = vec![0usize; n_cols + 1];
        for j in 0..n_cols {
            col_ptr[j + 1] = col_ptr[j] + col_weight[j];
        }
        let mut cursor = col_ptr.clone();
        let mut col_rows = vec![0u32; e];
        let mut col_vals = vec![Gf::ZERO; e];
        let mut col_inv_vals = vec![Gf::ZERO; e];
        let mut row_edge_to_col_edge = vec![0u32; e];
        for (row_edge, &(i, j, v)) in sorted.iter().enumerate() {
            let ce = cursor[j];
            cursor[j] += 1;
            col_rows[ce] = i as u32;
            col_vals[ce] = v;
            // entries are nonzero, so the inverse exists
            col_inv_vals[ce] = field.inv(v).expect("nonzero entry");
            row_edge_to_col_edge[row_edge] = ce as u32;
        }

        let regular = if n_rows > 0 && n_cols > 0 {
            let gamma = col_weight[0];
            let rho = row_ptr[1] - row_ptr[0];
            let cols_ok = col_weight.iter().all(|&w| w == gamma);
            let rows_ok = (0..n_rows).all(|i| row_ptr[i + 1] - row_ptr[i] == rho);
            if cols_ok && rows_ok && gamma > 0 {
                Some((gamma, rho))
            } else {
                None
            }
        } else {
            None
        };

        Ok(ParityCheckMatrix {
            field,
            n_rows,
            n_cols,
            row_ptr,
            row_cols,
            row_vals,
            col_ptr,
            col_rows,
            col_vals,
            col_inv_vals,
            row_edge_to_col_edge,
            regular,
        })
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.row_vals.len()
    }

    /// (gamma, rho) when every column/row weight is uniform.
    #[inline]
    pub fn regularity(&self) -> Option<(usize, usize)> {
        self.regular
    }

    /// Columns and values of row i.
    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[Gf]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.row_cols[range.clone()], &self.row_vals[range])
    }

    /// Rows, values, and cached inverses of column j.
    #[inline]
    pub fn col(&self, j: usize) -> (&[u32], &[Gf], &[Gf]) {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        (
            &self.col_rows[range.clone()],
            &self.col_vals[range.clone()],
            &self.col_inv_vals[range],
        )
    }

    /// Global column-edge ids of column j (stable handles into edge storage).
    #[inline]
    pub fn col_edge_range(&self, j: usize) -> core::ops::Range<usize> {
        self.col_ptr[j]..self.col_ptr[j + 1]
    }

    /// Column-edge id carrying the same (i,j) entry as row-edge `row_edge`.
    #[inline]
    pub fn col_edge_of_row_edge(&self, row_edge: usize) -> usize {
        self.row_edge_to_col_edge[row_edge] as usize
    }

    #[inline]
    pub fn inv_of_col_edge(&self, col_edge: usize) -> Gf {
        self.col_inv_vals[col_edge]
    }

    #[inline]
    pub fn val_of_col_edge(&self, col_edge: usize) -> Gf {
        self.col_vals[col_edge]
    }

    #[inline]
    pub fn row_of_col_edge(&self, col_edge: usize) -> usize {
        self.col_rows[col_edge] as usize
    }

    #[inline]
    pub fn row_edge_range(&self, i: usize) -> core::ops::Range<usize> {
        self.row_ptr[i]..self.row_ptr[i + 1]
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn col_weight(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    /// h_{i,j}, or None when (i,j) is not an edge.
    pub fn entry(&self, i: usize, j: usize) -> Option<Gf> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&(j as u32)).ok().map(|k| vals[k])
    }

    /// s_i = sum_{j in N(i)} h_{i,j} z_j for every row.
    pub fn syndrome(&self, z: &[Gf]) -> Result<Vec<Gf>, MatrixError> {
        if z.len() != self.n_cols {
            return Err(MatrixError::LengthMismatch { expected: self.n_cols, got: z.len() });
        }
        let mut s = vec![Gf::ZERO; self.n_rows];
        self.syndrome_into(z, &mut s);
        Ok(s)
    }

    /// Syndrome into a caller buffer; panics on length mismatch.
    pub fn syndrome_into(&self, z: &[Gf], out: &mut [Gf]) {
        assert_eq!(z.len(), self.n_cols);
        assert_eq!(out.len(), self.n_rows);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            let mut s = Gf::ZERO;
            for (&j, &h) in cols.iter().zip(vals) {
                s += self.field.mul(h, z[j as usize]);
            }
            out[i] = s;
        }
    }

    pub fn is_codeword(&self, z: &[Gf]) -> bool {
        z.len() == self.n_cols
            && (0..self.n_rows).all(|i| {
                let (cols, vals) = self.row(i);
                let mut s = Gf::ZERO;
                for (&j, &h) in cols.iter().zip(vals) {
                    s += self.field.mul(h, z[j as usize]);
                }
                s.is_zero()
            })
    }

    /// All entries as (row, col, value), row-major.
    pub fn entries(&self) -> Vec<(usize, usize, Gf)> {
        let mut out = Vec::with_capacity(self.n_edges());
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out.push((i, j as usize, v));
            }
        }
        out
    }
}

/// Number of rows sharing >= 2 columns counts 4-cycles; used by the generator
/// to decide whether an edge swap helped.
fn count_four_cycles(h: &[(usize, usize)], n_rows: usize, n_cols: usize) -> usize {
    let _ = n_cols;
    let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); n_rows];
    for &(i, j) in h {
        row_cols[i].push(j);
    }
    for cols in &mut row_cols {
        cols.sort_unstable();
    }
    let mut cycles = 0;
    for a in 0..n_rows {
        for b in (a + 1)..n_rows {
            let mut shared = 0;
            let (mut x, mut y) = (0, 0);
            while x < row_cols[a].len() && y < row_cols[b].len() {
                match row_cols[a][x].cmp(&row_cols[b][y]) {
                    core::cmp::Ordering::Less => x += 1,
                    core::cmp::Ordering::Greater => y += 1,
                    core::cmp::Ordering::Equal => {
                        shared += 1;
                        x += 1;
                        y += 1;
                    }
                }
            }
            if shared >= 2 {
                cycles += shared * (shared - 1) / 2;
            }
        }
    }
    cycles
}

/// (gamma, rho)-regular matrix with M = N*gamma/rho rows, uniformly random
/// nonzero values, deterministic in `seed`.
///
/// Construction is a permuted socket matching with rejection of duplicate
/// positions, followed by a bounded best-effort pass of random edge swaps that
/// keeps only swaps reducing the 4-cycle count.
pub fn generate_regular(
    field: Field,
    n: usize,
    gamma: usize,
    rho: usize,
    seed: u64,
) -> Result<ParityCheckMatrix, MatrixError> {
    if n == 0 || gamma == 0 || rho == 0 || (n * gamma) % rho != 0 {
        return Err(MatrixError::InfeasibleRegular { n, gamma, rho });
    }
    let m = n * gamma / rho;
    if gamma > m || rho > n {
        return Err(MatrixError::InfeasibleRegular { n, gamma, rho });
    }
    let n_edges = n * gamma;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // socket matching: variable socket e belongs to column e/gamma, check
    // socket p to row p/rho. Duplicate positions are repaired by swapping the
    // offending check socket with a random not-yet-consumed one; a full
    // reshuffle happens only when repair stalls.
    let mut positions: Vec<(usize, usize)> = Vec::new();
    let mut ok = false;
    'attempt: for _ in 0..50 {
        let mut check_sockets: Vec<usize> = (0..n_edges).collect();
        fisher_yates(&mut check_sockets, &mut rng);
        positions.clear();
        let mut seen = vec![false; m * n];
        for var_socket in 0..n_edges {
            let j = var_socket / gamma;
            let mut tries = 0;
            loop {
                let i = check_sockets[var_socket] / rho;
                if !seen[i * n + j] {
                    seen[i * n + j] = true;
                    positions.push((i, j));
                    break;
                }
                if var_socket + 1 >= n_edges || tries >= 100 {
                    continue 'attempt;
                }
                let swap_with = rng.random_range(var_socket + 1..n_edges);
                check_sockets.swap(var_socket, swap_with);
                tries += 1;
            }
        }
        ok = true;
        break;
    }
    if !ok {
        return Err(MatrixError::GenerationFailed);
    }

    // bounded 4-cycle reduction: random pair swaps of the column assignment,
    // accepted when they keep weights, keep positions unique, and reduce cycles
    let mut cycles = count_four_cycles(&positions, m, n);
    if cycles > 0 && n_edges >= 2 {
        let mut occupied: Vec<bool> = vec![false; m * n];
        for &(i, j) in &positions {
            occupied[i * n + j] = true;
        }
        for _ in 0..4 * n_edges {
            if cycles == 0 {
                break;
            }
            let a = rng.random_range(0..n_edges);
            let b = rng.random_range(0..n_edges);
            let (ia, ja) = positions[a];
            let (ib, jb) = positions[b];
            if ia == ib || ja == jb {
                continue;
            }
            if occupied[ia * n + jb] || occupied[ib * n + ja] {
                continue;
            }
            positions[a] = (ia, jb);
            positions[b] = (ib, ja);
            let new_cycles = count_four_cycles(&positions, m, n);
            if new_cycles < cycles {
                occupied[ia * n + ja] = false;
                occupied[ib * n + jb] = false;
                occupied[ia * n + jb] = true;
                occupied[ib * n + ja] = true;
                cycles = new_cycles;
            } else {
                positions[a] = (ia, ja);
                positions[b] = (ib, jb);
            }
        }
    }

    let nonzero = field.order() as u32 - 1;
    let entries: Vec<(usize, usize, Gf)> = positions
        .into_iter()
        .map(|(i, j)| {
            let v = 1 + rng.random_range(0..nonzero);
            (i, j, Gf(v as u16))
        })
        .collect();
    ParityCheckMatrix::from_entries(field, m, n, &entries)
}

fn fisher_yates<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for k in (1..items.len()).rev() {
        let swap_with = rng.random_range(0..=k);
        items.swap(k, swap_with);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::DenseMatrix;

    fn small_matrix() -> ParityCheckMatrix {
        let f = Field::new(2).unwrap();
        ParityCheckMatrix::from_entries(
            f,
            2,
            4,
            &[
                (0, 0, Gf(1)),
                (0, 1, Gf(2)),
                (0, 3, Gf(3)),
                (1, 1, Gf(1)),
                (1, 2, Gf(1)),
                (1, 3, Gf(2)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_zero_and_out_of_range_values() {
        let f = Field::new(2).unwrap();
        let err = ParityCheckMatrix::from_entries(f.clone(), 2, 2, &[(0, 0, Gf(0))]);
        assert!(matches!(err, Err(MatrixError::BadValue { .. })));
        let err = ParityCheckMatrix::from_entries(f.clone(), 2, 2, &[(0, 0, Gf(4))]);
        assert!(matches!(err, Err(MatrixError::BadValue { .. })));
        let err = ParityCheckMatrix::from_entries(f.clone(), 2, 2, &[(0, 5, Gf(1))]);
        assert!(matches!(err, Err(MatrixError::PositionOutOfRange { .. })));
        let err =
            ParityCheckMatrix::from_entries(f, 2, 2, &[(0, 0, Gf(1)), (0, 0, Gf(2))]);
        assert!(matches!(err, Err(MatrixError::DuplicatePosition { .. })));
    }

    #[test]
    fn syndrome_of_zero_is_zero() {
        let h = small_matrix();
        let s = h.syndrome(&vec![Gf::ZERO; 4]).unwrap();
        assert!(s.iter().all(|v| v.is_zero()));
        assert!(matches!(
            h.syndrome(&vec![Gf::ZERO; 3]),
            Err(MatrixError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn syndrome_matches_dense_oracle() {
        let f = Field::new(2).unwrap();
        let h = generate_regular(f.clone(), 8, 2, 4, 11).unwrap();
        let mut dense_rows = vec![vec![0u16; 8]; 4];
        for (i, j, v) in h.entries() {
            dense_rows[i][j] = v.0;
        }
        let dense = DenseMatrix { r: 2, poly: f.poly(), rows: dense_rows };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let z: Vec<Gf> = (0..8).map(|_| Gf(rng.random_range(0..4u32) as u16)).collect();
            assert_eq!(h.syndrome(&z).unwrap(), dense.syndrome(&z));
        }
    }

    #[test]
    fn syndrome_is_linear() {
        let h = small_matrix();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let z1: Vec<Gf> = (0..4).map(|_| Gf(rng.random_range(0..4u32) as u16)).collect();
            let z2: Vec<Gf> = (0..4).map(|_| Gf(rng.random_range(0..4u32) as u16)).collect();
            let zsum: Vec<Gf> = z1.iter().zip(&z2).map(|(&a, &b)| a + b).collect();
            let s1 = h.syndrome(&z1).unwrap();
            let s2 = h.syndrome(&z2).unwrap();
            let ssum = h.syndrome(&zsum).unwrap();
            for i in 0..2 {
                assert_eq!(ssum[i], s1[i] + s2[i]);
            }
        }
    }

    #[test]
    fn regular_generation_contract() {
        let f = Field::new(2).unwrap();
        let h = generate_regular(f.clone(), 8, 2, 4, 1).unwrap();
        assert_eq!(h.n_rows(), 4);
        assert_eq!(h.n_cols(), 8);
        assert_eq!(h.regularity(), Some((2, 4)));
        for j in 0..8 {
            assert_eq!(h.col_weight(j), 2);
        }
        for (_, _, v) in h.entries() {
            assert!(!v.is_zero());
        }

        let again = generate_regular(f.clone(), 8, 2, 4, 1).unwrap();
        assert_eq!(h.entries(), again.entries());

        let other = generate_regular(f.clone(), 8, 2, 4, 2).unwrap();
        assert_ne!(h.entries(), other.entries());

        assert!(matches!(
            generate_regular(f, 9, 2, 4, 1),
            Err(MatrixError::InfeasibleRegular { .. })
        ));
    }

    #[test]
    fn entry_lookup() {
        let h = small_matrix();
        assert_eq!(h.entry(0, 1), Some(Gf(2)));
        assert_eq!(h.entry(0, 2), None);
        assert_eq!(h.entry(1, 3), Some(Gf(2)));
    }
}
