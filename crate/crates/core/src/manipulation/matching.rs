//! Turning per-candidate score multisets into manipulator ballots.
//!
//! Rivals and score values form a bipartite multigraph in which every rival
//! has degree `k` and every value appears `k` times. A `k`-regular bipartite
//! multigraph splits into `k` perfect matchings (Hall's condition holds at
//! every step), and each matching is one ballot.

use crate::election::LinearOrder;
use crate::error::{Error, Result};

/// Builds `k` ballots from score multisets.
///
/// `multisets[i]` lists the Borda scores (each in `0..=m-2`) candidate `i`
/// must receive across the `k` ballots. The preferred candidate is placed
/// first on every ballot; its entry must be empty or `k` copies of `m-1`.
pub fn scores_to_ballots(
    multisets: &[Vec<usize>],
    k: usize,
    preferred: usize,
) -> Result<Vec<LinearOrder>> {
    let m = multisets.len();
    if preferred >= m {
        return Err(Error::Construction(format!(
            "preferred candidate {preferred} out of range"
        )));
    }
    let own = &multisets[preferred];
    if !own.is_empty() && (own.len() != k || own.iter().any(|&v| v + 1 != m)) {
        return Err(Error::Construction(
            "preferred candidate must take the top score on every ballot".into(),
        ));
    }
    if m == 1 {
        return Ok(vec![LinearOrder::identity(1); k]);
    }
    let rivals: Vec<usize> = (0..m).filter(|&i| i != preferred).collect();
    let values = m - 1;
    // count[r][v]: how many times rival r still needs score value v.
    let mut count = vec![vec![0usize; values]; rivals.len()];
    let mut per_value = vec![0usize; values];
    for (r, &cand) in rivals.iter().enumerate() {
        let set = &multisets[cand];
        if set.len() != k {
            return Err(Error::Construction(format!(
                "candidate {cand} has {} scores, expected {k}",
                set.len()
            )));
        }
        for &v in set {
            if v >= values {
                return Err(Error::Construction(format!("score {v} out of range")));
            }
            count[r][v] += 1;
            per_value[v] += 1;
        }
    }
    if let Some(v) = per_value.iter().position(|&n| n != k) {
        return Err(Error::Construction(format!(
            "score value {v} used {} times, expected {k}",
            per_value[v]
        )));
    }

    let mut ballots = Vec::with_capacity(k);
    for _ in 0..k {
        let matching = perfect_matching(&count).ok_or_else(|| {
            Error::Construction("score multisets admit no perfect matching".into())
        })?;
        let mut ranking = vec![usize::MAX; m];
        ranking[0] = preferred;
        for (r, &v) in matching.iter().enumerate() {
            count[r][v] -= 1;
            // Value v sits at rank m-1-v.
            ranking[m - 1 - v] = rivals[r];
        }
        ballots.push(LinearOrder::new(ranking).map_err(|e| Error::Construction(e.to_string()))?);
    }
    Ok(ballots)
}

/// Perfect matching rows -> columns on the support of `count`, by augmenting
/// paths. Returns the column of each row.
fn perfect_matching(count: &[Vec<usize>]) -> Option<Vec<usize>> {
    let rows = count.len();
    let cols = count.first().map_or(0, Vec::len);
    let mut col_owner = vec![usize::MAX; cols];
    for r in 0..rows {
        let mut seen = vec![false; cols];
        if !augment(r, count, &mut col_owner, &mut seen) {
            return None;
        }
    }
    let mut row_col = vec![usize::MAX; rows];
    for (c, &r) in col_owner.iter().enumerate() {
        if r != usize::MAX {
            row_col[r] = c;
        }
    }
    Some(row_col)
}

fn augment(r: usize, count: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
    // Larger values first keeps the construction deterministic and biased
    // toward filling top slots early.
    for c in (0..owner.len()).rev() {
        if count[r][c] == 0 || seen[c] {
            continue;
        }
        seen[c] = true;
        if owner[c] == usize::MAX || augment(owner[c], count, owner, seen) {
            owner[c] = r;
            return true;
        }
    }
    false
}
