//! Random (3,6)-regular parity-check construction.
//!
//! Columns are filled one at a time: each picks `dv` rows among those with
//! spare capacity, favouring the emptiest rows so the degree profile always
//! completes, and skipping rows that would close a 4-cycle. A construction
//! that gets stuck or is rank deficient is discarded and redrawn.

use rand::seq::SliceRandom;
use serde::Serialize;

use super::{LdpcCode, CHECK_DEGREE, VAR_DEGREE};
use crate::{seed, Error, Result};

/// Attempts made for a 4-cycle-free matrix before 4-cycles are tolerated,
/// and again for the tolerant pass.
pub const RETRY_BUDGET: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionReport {
    /// Attempts consumed, including the successful one.
    pub attempts: usize,
    /// 4-cycles left in the Tanner graph (0 means girth >= 6).
    pub four_cycles: usize,
}

/// Builds a rate-1/2 (3,6)-regular code with `n = 2k`, deterministic in `seed`.
pub fn build_regular_code(n: usize, k: usize, seed: u64) -> Result<LdpcCode> {
    if n != 2 * k {
        return Err(Error::invalid("n", format!("(3,6)-regular codes need n = 2k, got n={n}, k={k}")));
    }
    if n < CHECK_DEGREE || k < VAR_DEGREE {
        return Err(Error::invalid(
            "n",
            format!("need n >= {CHECK_DEGREE} and n - k >= {VAR_DEGREE}, got n={n}, k={k}"),
        ));
    }
    let m = n - k;
    let mut last_failure = String::from("no attempt made");
    let mut attempts = 0;
    for avoid_four_cycles in [true, false] {
        for attempt in 0..RETRY_BUDGET {
            attempts += 1;
            let mut rng = seed::rng(seed::derive(seed, &[avoid_four_cycles as u64, attempt as u64]));
            let Some(columns) = fill_columns(n, m, avoid_four_cycles, &mut rng) else {
                last_failure = "column filling got stuck on the 4-cycle constraint".into();
                continue;
            };
            let mut checks = vec![Vec::with_capacity(CHECK_DEGREE); m];
            for (c, rows) in columns.iter().enumerate() {
                for &r in rows {
                    checks[r].push(c);
                }
            }
            match LdpcCode::from_checks(n, checks) {
                Ok(mut code) => {
                    code.report.attempts = attempts;
                    return Ok(code);
                }
                Err(e) => last_failure = e.to_string(),
            }
        }
    }
    Err(Error::Construction(format!(
        "no valid ({VAR_DEGREE},{CHECK_DEGREE})-regular {m}x{n} matrix after {attempts} attempts; last failure: {last_failure}"
    )))
}

fn fill_columns(
    n: usize,
    m: usize,
    avoid_four_cycles: bool,
    rng: &mut impl rand::Rng,
) -> Option<Vec<Vec<usize>>> {
    let mut capacity = vec![CHECK_DEGREE; m];
    let mut paired = vec![false; m * m];
    let mut columns = Vec::with_capacity(n);
    let mut order: Vec<usize> = (0..m).collect();
    for _ in 0..n {
        order.shuffle(rng);
        // stable: ties stay in shuffled order
        order.sort_by_key(|&r| std::cmp::Reverse(capacity[r]));
        let mut chosen: Vec<usize> = Vec::with_capacity(VAR_DEGREE);
        for &r in &order {
            if capacity[r] == 0 {
                break;
            }
            if avoid_four_cycles && chosen.iter().any(|&c| paired[r * m + c]) {
                continue;
            }
            chosen.push(r);
            if chosen.len() == VAR_DEGREE {
                break;
            }
        }
        if chosen.len() < VAR_DEGREE {
            return None;
        }
        for &a in &chosen {
            capacity[a] -= 1;
            for &b in &chosen {
                if a != b {
                    paired[a * m + b] = true;
                }
            }
        }
        chosen.sort_unstable();
        columns.push(chosen);
    }
    Some(columns)
}
