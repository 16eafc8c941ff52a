//! Dense bit-packed rows over GF(2).

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut row = Self::zeros(len);
        for i in ones {
            row.set(i, true);
        }
        row
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

/// Reduced row echelon form of a GF(2) matrix.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<BitRow>,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gauss-Jordan elimination. Columns are scanned from last to first, so the
/// pivots (parity positions) gather towards the end of the word.
pub fn reduce(mut rows: Vec<BitRow>, ncols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in (0..ncols).rev() {
        if rank == rows.len() {
            break;
        }
        let Some(found) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, found);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    Echelon { rows, pivots }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_ops() {
        let mut r = BitRow::zeros(130);
        r.set(0, true);
        r.set(129, true);
        assert!(r.get(129) && r.get(0) && !r.get(64));
        assert_eq!(r.count_ones(), 2);
        let other = BitRow::from_indices(130, [0, 64]);
        r.xor_assign(&other);
        assert_eq!(r.to_bits().iter().filter(|&&b| b == 1).count(), 2);
        assert!(r.get(64) && !r.get(0));
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![
            BitRow::from_indices(4, [0, 1]),
            BitRow::from_indices(4, [1, 2]),
            BitRow::from_indices(4, [0, 2]),
        ];
        assert_eq!(reduce(rows, 4).rank(), 2);
        let id: Vec<_> = (0..5).map(|i| BitRow::from_indices(5, [i])).collect();
        assert_eq!(reduce(id, 5).rank(), 5);
    }
}
