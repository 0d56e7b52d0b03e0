//! Gated optimal one-to-one assignment.
//!
//! [`solve_lap`] returns a maximum-cardinality matching of minimum total
//! cost over the entries at or below the gate. Cardinality comes first:
//! among all matchings that use only admissible entries, the solver picks
//! one with the most pairs, and among those one with the smallest cost sum.
//! Entries above the gate (or infinite) are never matched.
//!
//! Internally the rectangular problem is padded to a square matrix where
//! inadmissible entries carry a cost large enough that using one can never
//! beat dropping a pair, and dummy rows/columns absorb the unmatched side.
//! The square problem is solved with the O(n^3) potential-based Hungarian
//! method; ties between equal-cost optima are broken by the deterministic
//! row-major scan order, so identical inputs always give identical outputs.

use ndarray::Array2;

use crate::scalar::Real;

/// Outcome of [`solve_lap`]: matched `(row, column)` pairs plus the rows and
/// columns left unmatched. The three parts partition all rows and columns;
/// every index appears exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AssignmentResult {
    pub matches: Vec<(usize, usize)>,
    pub unmatched_rows: Vec<usize>,
    pub unmatched_columns: Vec<usize>,
}

impl AssignmentResult {
    fn from_matches(matches: Vec<(usize, usize)>, rows: usize, cols: usize) -> Self {
        let mut row_used = vec![false; rows];
        let mut col_used = vec![false; cols];
        for &(r, c) in &matches {
            row_used[r] = true;
            col_used[c] = true;
        }
        Self {
            matches,
            unmatched_rows: (0..rows).filter(|&r| !row_used[r]).collect(),
            unmatched_columns: (0..cols).filter(|&c| !col_used[c]).collect(),
        }
    }

    fn all_unmatched(rows: usize, cols: usize) -> Self {
        Self {
            matches: Vec::new(),
            unmatched_rows: (0..rows).collect(),
            unmatched_columns: (0..cols).collect(),
        }
    }
}

/// Solves the gated rectangular assignment problem.
///
/// `cost` entries may be any finite value or `+inf`; `gate` must be finite.
/// An empty matrix yields an all-unmatched result.
pub fn solve_lap<T: Real>(cost: &Array2<T>, gate: T) -> AssignmentResult {
    let (rows, cols) = cost.dim();
    if rows == 0 || cols == 0 {
        return AssignmentResult::all_unmatched(rows, cols);
    }

    let admissible = |v: T| v.is_finite() && v <= gate;

    // Range of admissible costs, for sizing the barrier value.
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for &v in cost.iter() {
        if admissible(v) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if lo > hi {
        return AssignmentResult::all_unmatched(rows, cols);
    }

    let dim = rows.max(cols);
    // One barrier entry must always cost more than any achievable saving
    // among admissible entries, so the solver drops pairs before gating in.
    let span = hi - lo;
    let barrier = hi + span * T::from_usize(dim + 1).expect("small integer") + T::one();

    let mut padded = Array2::from_elem((dim, dim), T::zero());
    for r in 0..dim {
        for c in 0..dim {
            if r < rows && c < cols {
                let v = cost[(r, c)];
                padded[(r, c)] = if admissible(v) { v } else { barrier };
            }
            // Dummy cells keep cost zero: matching into the padding is how a
            // row or column stays unmatched.
        }
    }

    let assignment = hungarian_square(&padded);

    let mut matches: Vec<(usize, usize)> = assignment
        .into_iter()
        .enumerate()
        .filter(|&(r, c)| r < rows && c < cols && admissible(cost[(r, c)]))
        .collect();
    matches.sort_unstable();
    AssignmentResult::from_matches(matches, rows, cols)
}

/// Minimum-cost perfect matching on a square matrix via the potential-based
/// Hungarian method. Returns, for each row, its assigned column.
fn hungarian_square<T: Real>(a: &Array2<T>) -> Vec<usize> {
    let n = a.nrows();
    // 1-based arrays with a virtual column 0, per the classical formulation.
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut matched_row = vec![0usize; n + 1]; // matched_row[col] = row
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![T::infinity(); n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = T::infinity();
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = a[(i0 - 1, j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[matched_row[j] - 1] = j - 1;
    }
    row_to_col
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[f64]]) -> Array2<f64> {
        let r = rows.len();
        let c = rows[0].len();
        Array2::from_shape_fn((r, c), |(i, j)| rows[i][j])
    }

    fn total_cost(cost: &Array2<f64>, result: &AssignmentResult) -> f64 {
        result.matches.iter().map(|&(r, c)| cost[(r, c)]).sum()
    }

    #[test]
    fn two_by_two_diagonal() {
        let cost = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let res = solve_lap(&cost, 0.5);
        assert_eq!(res.matches, vec![(0, 0), (1, 1)]);
        assert!(res.unmatched_rows.is_empty());
        assert!(res.unmatched_columns.is_empty());
    }

    #[test]
    fn all_infinite_matches_nothing() {
        let cost = Array2::from_elem((3, 2), f64::INFINITY);
        let res = solve_lap(&cost, 100.0);
        assert!(res.matches.is_empty());
        assert_eq!(res.unmatched_rows, vec![0, 1, 2]);
        assert_eq!(res.unmatched_columns, vec![0, 1]);
    }

    #[test]
    fn empty_matrix_matches_nothing() {
        let cost = Array2::<f64>::zeros((0, 4));
        let res = solve_lap(&cost, 1.0);
        assert!(res.matches.is_empty());
        assert_eq!(res.unmatched_columns, vec![0, 1, 2, 3]);
    }

    #[test]
    fn gate_excludes_expensive_pairs() {
        // Both rows prefer column 0; the gate forbids row 1 entirely.
        let cost = mat(&[&[0.1, 0.2], &[0.9, 0.8]]);
        let res = solve_lap(&cost, 0.5);
        assert_eq!(res.matches, vec![(0, 0)]);
        assert_eq!(res.unmatched_rows, vec![1]);
        assert_eq!(res.unmatched_columns, vec![1]);
    }

    #[test]
    fn prefers_cardinality_over_cost() {
        // Cheapest single pair is (0,0)=0.0, but two pairs are possible only
        // as (0,1),(1,0); maximum cardinality must win.
        let cost = mat(&[&[0.0, 4.0], &[3.0, f64::INFINITY]]);
        let res = solve_lap(&cost, 10.0);
        assert_eq!(res.matches, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn rectangular_more_rows_than_columns() {
        let cost = mat(&[&[0.9], &[0.8], &[0.7]]);
        let res = solve_lap(&cost, 1.0);
        assert_eq!(res.matches, vec![(2, 0)]);
        assert_eq!(res.unmatched_rows, vec![0, 1]);
    }

    #[test]
    fn works_for_f32_scalars() {
        let cost = Array2::<f32>::from_shape_fn((2, 2), |(r, c)| if r == c { 0.1 } else { 0.9 });
        let res = solve_lap(&cost, 0.5f32);
        assert_eq!(res.matches, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn negative_costs_supported() {
        let cost = mat(&[&[-5.0, -1.0], &[-2.0, -4.0]]);
        let res = solve_lap(&cost, 0.0);
        assert_eq!(res.matches, vec![(0, 0), (1, 1)]);
        assert_eq!(total_cost(&cost, &res), -9.0);
    }

    /// Independent oracle: enumerate every partial matching over admissible
    /// pairs, maximizing cardinality first and then minimizing cost.
    fn brute_force(cost: &Array2<f64>, gate: f64) -> (usize, f64) {
        fn recurse(
            cost: &Array2<f64>,
            gate: f64,
            row: usize,
            used: &mut Vec<bool>,
            card: usize,
            sum: f64,
            best: &mut (usize, f64),
        ) {
            if row == cost.nrows() {
                if card > best.0 || (card == best.0 && sum < best.1) {
                    *best = (card, sum);
                }
                return;
            }
            recurse(cost, gate, row + 1, used, card, sum, best);
            for c in 0..cost.ncols() {
                let v = cost[(row, c)];
                if !used[c] && v.is_finite() && v <= gate {
                    used[c] = true;
                    recurse(cost, gate, row + 1, used, card + 1, sum + v, best);
                    used[c] = false;
                }
            }
        }
        let mut best = (0usize, 0.0f64);
        let mut used = vec![false; cost.ncols()];
        recurse(cost, gate, 0, &mut used, 0, 0.0, &mut best);
        best
    }

    #[test]
    fn matches_brute_force_on_random_5x5() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let cost = Array2::from_shape_fn((5, 5), |_| {
                if rng.random::<f64>() < 0.15 {
                    f64::INFINITY
                } else {
                    // Grid-valued costs keep every sum exactly representable.
                    (rng.random_range(-40..=40i32) as f64) * 0.25
                }
            });
            let gate = (rng.random_range(0..=40i32) as f64) * 0.25;
            let res = solve_lap(&cost, gate);
            let (card, best_cost) = brute_force(&cost, gate);
            assert_eq!(res.matches.len(), card);
            assert_eq!(total_cost(&cost, &res), best_cost);
        }
    }

    fn arb_cost() -> impl Strategy<Value = (Array2<f64>, f64)> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            (
                proptest::collection::vec(-10.0..10.0f64, r * c),
                Just(r),
                Just(c),
                0.0..12.0f64,
            )
                .prop_map(|(vals, r, c, gate)| {
                    (Array2::from_shape_vec((r, c), vals).unwrap(), gate)
                })
        })
    }

    proptest! {
        #[test]
        fn gate_respected_and_partition_exact((cost, gate) in arb_cost()) {
            let res = solve_lap(&cost, gate);
            for &(r, c) in &res.matches {
                prop_assert!(cost[(r, c)] <= gate);
            }
            let mut rows: Vec<usize> = res.matches.iter().map(|m| m.0).chain(res.unmatched_rows.iter().copied()).collect();
            rows.sort_unstable();
            prop_assert_eq!(rows, (0..cost.nrows()).collect::<Vec<_>>());
            let mut cols: Vec<usize> = res.matches.iter().map(|m| m.1).chain(res.unmatched_columns.iter().copied()).collect();
            cols.sort_unstable();
            prop_assert_eq!(cols, (0..cost.ncols()).collect::<Vec<_>>());
        }

        #[test]
        fn permuting_rows_permutes_result((cost, gate) in arb_cost(), seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            // Continuous random costs: ties between distinct matchings have
            // probability zero, so the optimum is unique and must commute
            // with row permutation.
            let mut perm: Vec<usize> = (0..cost.nrows()).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let permuted = Array2::from_shape_fn(cost.dim(), |(r, c)| cost[(perm[r], c)]);
            let base = solve_lap(&cost, gate);
            let shuffled = solve_lap(&permuted, gate);
            let mut expected: Vec<(usize, usize)> = shuffled.matches.iter().map(|&(r, c)| (perm[r], c)).collect();
            expected.sort_unstable();
            prop_assert_eq!(expected, base.matches);
        }

        #[test]
        fn constant_shift_keeps_matching((cost, gate) in arb_cost(), shift in -5.0..5.0f64) {
            let shifted = cost.mapv(|v| v + shift);
            let base = solve_lap(&cost, gate);
            let moved = solve_lap(&shifted, gate + shift);
            prop_assert_eq!(base.matches, moved.matches);
        }
    }
}
