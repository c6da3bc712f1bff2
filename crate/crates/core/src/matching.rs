//! Perfect matchings in dense bipartite graphs.

/// Perfect matching of rows to columns using only the allowed edges.
///
/// Returns `assignment[row] = col`, or `None` when no perfect matching exists.
pub fn perfect_matching(allowed: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = allowed.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];
    for row in 0..n {
        let mut seen = vec![false; n];
        if !augment(row, allowed, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut assignment = vec![0; n];
    for (col, owner) in col_owner.iter().enumerate() {
        assignment[owner.expect("every column matched")] = col;
    }
    Some(assignment)
}

fn augment(
    row: usize,
    allowed: &[Vec<bool>],
    seen: &mut [bool],
    col_owner: &mut [Option<usize>],
) -> bool {
    for col in 0..allowed.len() {
        if !allowed[row][col] || seen[col] {
            continue;
        }
        seen[col] = true;
        let free = match col_owner[col] {
            None => true,
            Some(other) => augment(other, allowed, seen, col_owner),
        };
        if free {
            col_owner[col] = Some(row);
            return true;
        }
    }
    false
}

/// Perfect matching maximising the smallest matched weight, restricted to
/// weights strictly above `floor`.
pub fn max_min_matching(weights: &[Vec<f64>], floor: f64) -> Option<Vec<usize>> {
    let mut levels: Vec<f64> = weights
        .iter()
        .flatten()
        .cloned()
        .filter(|&w| w > floor)
        .collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let feasible = |threshold: f64| {
        let allowed: Vec<Vec<bool>> = weights
            .iter()
            .map(|row| row.iter().map(|&w| w >= threshold).collect())
            .collect();
        perfect_matching(&allowed)
    };
    let mut best = feasible(*levels.first()?)?;
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        match feasible(levels[mid]) {
            Some(m) => {
                best = m;
                lo = mid;
            }
            None => hi = mid - 1,
        }
    }
    Some(best)
}

/// Perfect matching minimising the largest matched cost (bottleneck
/// assignment). Returns the assignment and its bottleneck value.
pub fn bottleneck_matching(costs: &[Vec<f64>]) -> Option<(Vec<usize>, f64)> {
    if costs.is_empty() {
        return Some((Vec::new(), 0.0));
    }
    let mut levels: Vec<f64> = costs.iter().flatten().cloned().collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let feasible = |threshold: f64| {
        let allowed: Vec<Vec<bool>> = costs
            .iter()
            .map(|row| row.iter().map(|&w| w <= threshold).collect())
            .collect();
        perfect_matching(&allowed)
    };
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(levels[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    feasible(levels[lo]).map(|m| (m, levels[lo]))
}
