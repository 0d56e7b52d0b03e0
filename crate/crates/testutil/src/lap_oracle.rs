//! Exhaustive assignment oracle: maximum cardinality first, then minimum
//! total cost, over entries at or below the gate.

/// Returns `(cardinality, total cost)` of the optimum found by enumerating
/// every admissible partial matching. Rows and columns up to ~7 each.
pub fn optimal_assignment(cost: &[Vec<f64>], gate: f64) -> (usize, f64) {
    fn recurse(
        cost: &[Vec<f64>],
        gate: f64,
        row: usize,
        used: &mut Vec<bool>,
        card: usize,
        sum: f64,
        best: &mut (usize, f64),
    ) {
        if row == cost.len() {
            if card > best.0 || (card == best.0 && sum < best.1) {
                *best = (card, sum);
            }
            return;
        }
        recurse(cost, gate, row + 1, used, card, sum, best);
        for c in 0..used.len() {
            if used[c] {
                continue;
            }
            let v = cost[row][c];
            if v.is_finite() && v <= gate {
                used[c] = true;
                recurse(cost, gate, row + 1, used, card + 1, sum + v, best);
                used[c] = false;
            }
        }
    }

    let cols = cost.first().map_or(0, |r| r.len());
    let mut best = (0usize, 0.0f64);
    let mut used = vec![false; cols];
    recurse(cost, gate, 0, &mut used, 0, 0.0, &mut best);
    best
}
