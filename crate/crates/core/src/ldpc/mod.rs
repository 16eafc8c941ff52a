//! Regular LDPC codes: construction, systematic encoding and BP decoding.

mod alist;
mod bp;
mod construct;
pub mod gf2;

pub use alist::{parse_alist, read_alist_file, to_alist, write_alist_file};
pub use bp::{decode_bp, Decoded};
pub use construct::{build_regular_code, ConstructionReport, RETRY_BUDGET};

use gf2::BitRow;

use crate::{Error, Result};

/// Variable-node degree of the codes built here.
pub const VAR_DEGREE: usize = 3;
/// Check-node degree of the codes built here.
pub const CHECK_DEGREE: usize = 6;

/// Parity-check matrix (sparse, both orientations), derived generator and
/// the positions carrying message bits.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    n: usize,
    k: usize,
    dv: usize,
    dc: usize,
    /// Column indices of each check (row of H), ascending.
    checks: Vec<Vec<usize>>,
    /// Row indices of each variable (column of H), ascending.
    vars: Vec<Vec<usize>>,
    generator: Vec<BitRow>,
    info_positions: Vec<usize>,
    report: ConstructionReport,
}

impl LdpcCode {
    /// Wraps a parity-check matrix given as per-row column lists. H must be
    /// regular and of full row rank; `k = n - rank`.
    pub fn from_checks(n: usize, mut checks: Vec<Vec<usize>>) -> Result<Self> {
        let m = checks.len();
        if n == 0 || m == 0 || m >= n {
            return Err(Error::Construction(format!(
                "parity-check matrix must have 0 < rows < cols, got {m}x{n}"
            )));
        }
        let mut vars = vec![Vec::new(); n];
        for (r, row) in checks.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Construction(format!("row {r} repeats a column")));
            }
            for &c in row.iter() {
                if c >= n {
                    return Err(Error::Construction(format!("row {r} references column {c} >= {n}")));
                }
                vars[c].push(r);
            }
        }
        let dv = vars[0].len();
        let dc = checks[0].len();
        if let Some(c) = vars.iter().position(|v| v.len() != dv) {
            return Err(Error::Construction(format!(
                "irregular column weights: column 0 has {dv}, column {c} has {}",
                vars[c].len()
            )));
        }
        if let Some(r) = checks.iter().position(|row| row.len() != dc) {
            return Err(Error::Construction(format!(
                "irregular row weights: row 0 has {dc}, row {r} has {}",
                checks[r].len()
            )));
        }

        let dense: Vec<BitRow> = checks
            .iter()
            .map(|row| BitRow::from_indices(n, row.iter().copied()))
            .collect();
        let ech = gf2::reduce(dense, n);
        if ech.rank() < m {
            return Err(Error::Construction(format!(
                "parity-check matrix is rank deficient ({} < {m})",
                ech.rank()
            )));
        }
        let mut is_pivot = vec![false; n];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let info_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let generator = info_positions
            .iter()
            .map(|&col| {
                let mut g = BitRow::zeros(n);
                g.set(col, true);
                for (row, &pivot) in ech.rows.iter().zip(&ech.pivots) {
                    if row.get(col) {
                        g.set(pivot, true);
                    }
                }
                g
            })
            .collect();

        let report = ConstructionReport {
            attempts: 1,
            four_cycles: count_four_cycles(&vars, m),
        };
        Ok(Self {
            n,
            k: n - m,
            dv,
            dc,
            checks,
            vars,
            generator,
            info_positions,
            report,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn var_degree(&self) -> usize {
        self.dv
    }

    pub fn check_degree(&self) -> usize {
        self.dc
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }

    pub fn vars(&self) -> &[Vec<usize>] {
        &self.vars
    }

    /// Codeword positions holding the message bits, in message order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn report(&self) -> &ConstructionReport {
        &self.report
    }

    /// Dense generator matrix, `k x n`.
    pub fn generator(&self) -> Vec<Vec<u8>> {
        self.generator.iter().map(BitRow::to_bits).collect()
    }

    /// Dense parity-check matrix, `(n - k) x n`.
    pub fn parity_check(&self) -> Vec<Vec<u8>> {
        self.checks
            .iter()
            .map(|row| BitRow::from_indices(self.n, row.iter().copied()).to_bits())
            .collect()
    }

    /// `c = u G` over GF(2).
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        Error::check_len("message", self.k, message.len())?;
        let mut word = BitRow::zeros(self.n);
        for (bit, row) in message.iter().zip(&self.generator) {
            if *bit & 1 == 1 {
                word.xor_assign(row);
            }
        }
        Ok(word.to_bits())
    }

    /// `H w^T` over GF(2).
    pub fn syndrome(&self, word: &[u8]) -> Result<Vec<u8>> {
        Error::check_len("word", self.n, word.len())?;
        Ok(self.syndrome_unchecked(word))
    }

    pub(crate) fn syndrome_unchecked(&self, word: &[u8]) -> Vec<u8> {
        self.checks
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &c| acc ^ (word[c] & 1)))
            .collect()
    }

    pub(crate) fn is_codeword(&self, word: &[u8]) -> bool {
        self.checks
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &c| acc ^ (word[c] & 1)) == 0)
    }

    /// Message bits read back from a codeword.
    pub fn extract_message(&self, word: &[u8]) -> Result<Vec<u8>> {
        Error::check_len("word", self.n, word.len())?;
        Ok(self.info_positions.iter().map(|&p| word[p]).collect())
    }
}

/// Number of 4-cycles in the Tanner graph: for each column pair sharing
/// `s` rows there are `s choose 2` of them.
pub(crate) fn count_four_cycles(vars: &[Vec<usize>], m: usize) -> usize {
    let mut rows_of = vec![Vec::new(); m];
    for (c, rows) in vars.iter().enumerate() {
        for &r in rows {
            rows_of[r].push(c);
        }
    }
    let mut total = 0;
    let mut shared = vec![0usize; vars.len()];
    for (c, rows) in vars.iter().enumerate() {
        shared.iter_mut().for_each(|s| *s = 0);
        for &r in rows {
            for &other in &rows_of[r] {
                if other > c {
                    shared[other] += 1;
                }
            }
        }
        total += shared.iter().map(|&s| s * s.saturating_sub(1) / 2).sum::<usize>();
    }
    total
}
