//! Grid states, their Maslov/Alexander gradings, and connecting rectangles.
//!
//! A grid state places one point on every vertical and horizontal circle of
//! the torus grid, i.e. it is a permutation σ with a point at (c, σ(c)).
//! Gradings are computed on the stored planar realization by counting
//! strictly-southwest pairs, with markings offset to square centres so no
//! comparison ever ties; the rectangle relations tie the counts to the
//! differential and are enforced by the property tests.

use num_rational::Ratio;

use crate::grid::GridDiagram;
use crate::poly::RationalT;
use crate::{Error, EvalOptions, Result};

/// A grid state: σ[c] is the row of the state's point on vertical circle c.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridState {
    sigma: Vec<u8>,
}

impl GridState {
    pub fn new(sigma: Vec<u8>) -> Result<Self> {
        let n = sigma.len();
        let mut seen = vec![false; n];
        for &r in &sigma {
            if (r as usize) >= n || seen[r as usize] {
                return Err(Error::NotPermutation("sigma"));
            }
            seen[r as usize] = true;
        }
        Ok(GridState { sigma })
    }

    pub fn identity(n: usize) -> Self {
        GridState {
            sigma: (0..n as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn row(&self, c: usize) -> usize {
        self.sigma[c] as usize
    }

    pub fn sigma(&self) -> &[u8] {
        &self.sigma
    }

    /// The state obtained by swapping the rows of columns a and b.
    pub fn transposed(&self, a: usize, b: usize) -> GridState {
        let mut sigma = self.sigma.clone();
        sigma.swap(a, b);
        GridState { sigma }
    }

    /// Lexicographic rank among all permutations of the same length.
    pub fn lex_rank(&self) -> u64 {
        let n = self.sigma.len();
        let mut fact = vec![1u64; n + 1];
        for k in 1..=n {
            fact[k] = fact[k - 1] * k as u64;
        }
        let mut rank = 0u64;
        for c in 0..n {
            let smaller_later = self.sigma[c + 1..]
                .iter()
                .filter(|&&v| v < self.sigma[c])
                .count() as u64;
            rank += smaller_later * fact[n - 1 - c];
        }
        rank
    }
}

/// Advances `sigma` to the next permutation in lexicographic order.
/// Returns false (leaving `sigma` sorted ascending) after the last one.
fn next_permutation(sigma: &mut [u8]) -> bool {
    let n = sigma.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && sigma[i - 1] >= sigma[i] {
        i -= 1;
    }
    if i == 0 {
        sigma.sort_unstable();
        return false;
    }
    let mut j = n - 1;
    while sigma[j] <= sigma[i - 1] {
        j -= 1;
    }
    sigma.swap(i - 1, j);
    sigma[i..].reverse();
    true
}

/// Iterator over all grid states in lexicographic order of σ.
pub struct StateIter {
    next: Option<Vec<u8>>,
}

impl Iterator for StateIter {
    type Item = GridState;

    fn next(&mut self) -> Option<GridState> {
        let current = self.next.take()?;
        let mut upcoming = current.clone();
        if next_permutation(&mut upcoming) {
            self.next = Some(upcoming);
        }
        Some(GridState { sigma: current })
    }
}

/// Streams every grid state of `d` exactly once, lexicographically,
/// after checking the state-count guard.
pub fn enumerate_states(d: &GridDiagram, opts: &EvalOptions) -> Result<StateIter> {
    opts.check_guard(d.n())?;
    Ok(all_states(d.n()))
}

pub(crate) fn all_states(n: usize) -> StateIter {
    StateIter {
        next: Some((0..n as u8).collect()),
    }
}

/// The Maslov gradings and the Alexander grading of one grid state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateGradings {
    pub maslov_o: i64,
    pub maslov_x: i64,
    /// Integer for knots, half-integer in general.
    pub alexander: Ratio<i64>,
}

impl StateGradings {
    /// The scaled t-grading q·M_O − p·A at t = p/q; `None` when A is not an
    /// integer (multi-component diagrams).
    pub fn gr_scaled(&self, t: RationalT) -> Option<i64> {
        if !self.alexander.is_integer() {
            return None;
        }
        Some(t.denom() as i64 * self.maslov_o - t.numer() as i64 * self.alexander.to_integer())
    }
}

/// Σ over ordered pairs of I(p, q) + I(q, p), where I counts strict
/// southwest position; equals twice the symmetrized count J.
fn two_j(p: &[(i64, i64)], q: &[(i64, i64)]) -> i64 {
    let mut total = 0;
    for a in p {
        for b in q {
            if a.0 < b.0 && a.1 < b.1 {
                total += 1;
            }
            if b.0 < a.0 && b.1 < a.1 {
                total += 1;
            }
        }
    }
    total
}

/// Computes both Maslov gradings and the Alexander grading of `s` on the
/// stored planar realization of `d`.
///
/// M_O(s) = J(s,s) − 2J(s,O) + J(O,O) + 1 with markings at square centres;
/// M_X is the same count against the X-markings, and
/// A = (M_O − M_X − (n−1)) / 2.
pub fn gradings(d: &GridDiagram, s: &GridState) -> StateGradings {
    let n = d.n();
    debug_assert_eq!(s.len(), n);
    // doubled coordinates: state points on the lattice, markings at centres
    let pts: Vec<(i64, i64)> = (0..n).map(|c| (2 * c as i64, 2 * s.row(c) as i64)).collect();
    let os: Vec<(i64, i64)> = (0..n)
        .map(|c| (2 * c as i64 + 1, 2 * d.o_row(c) as i64 + 1))
        .collect();
    let xs: Vec<(i64, i64)> = (0..n)
        .map(|c| (2 * c as i64 + 1, 2 * d.x_row(c) as i64 + 1))
        .collect();
    let m_of = |marks: &[(i64, i64)]| -> i64 {
        let num = two_j(&pts, &pts) - 2 * two_j(&pts, marks) + two_j(marks, marks);
        debug_assert_eq!(num % 2, 0);
        num / 2 + 1
    };
    let maslov_o = m_of(&os);
    let maslov_x = m_of(&xs);
    StateGradings {
        maslov_o,
        maslov_x,
        alexander: Ratio::new(maslov_o - maslov_x - (n as i64 - 1), 2),
    }
}

/// An embedded rectangle on the torus: columns walk eastward from c1 to c2
/// and rows northward from r1 to r2, wrapping as needed. The southwest and
/// northeast corners belong to the source state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rectangle {
    pub c1: usize,
    pub c2: usize,
    pub r1: usize,
    pub r2: usize,
}

/// v ∈ [start, end) walking cyclically upward mod n; start ≠ end.
fn cyclic_in(v: usize, start: usize, end: usize) -> bool {
    if start < end {
        start <= v && v < end
    } else {
        v >= start || v < end
    }
}

impl Rectangle {
    /// The columns of squares covered by the rectangle: [c1, c2) mod n.
    pub fn covers_col(&self, c: usize) -> bool {
        cyclic_in(c, self.c1, self.c2)
    }

    pub fn covers_row(&self, r: usize) -> bool {
        cyclic_in(r, self.r1, self.r2)
    }

    /// Whether lattice point (c, r) lies strictly inside.
    pub fn interior_contains(&self, n: usize, c: usize, r: usize) -> bool {
        let cs = (self.c1 + 1) % n;
        let rs = (self.r1 + 1) % n;
        if cs == self.c2 || rs == self.r2 {
            return false;
        }
        cyclic_in(c, cs, self.c2) && cyclic_in(r, rs, self.r2)
    }
}

/// The rectangles going from `x` to `y`: empty unless the states differ in
/// exactly two columns, in which case there are exactly two toroidal
/// completions with the source state at their SW/NE corners.
pub fn connecting_rectangles(x: &GridState, y: &GridState) -> Vec<Rectangle> {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    let mut diffs = [0usize; 2];
    let mut count = 0;
    for c in 0..n {
        if x.row(c) != y.row(c) {
            if count == 2 {
                return Vec::new();
            }
            diffs[count] = c;
            count += 1;
        }
    }
    if count != 2 {
        return Vec::new();
    }
    let (a, b) = (diffs[0], diffs[1]);
    if x.row(a) != y.row(b) || x.row(b) != y.row(a) {
        return Vec::new();
    }
    vec![
        Rectangle { c1: a, c2: b, r1: x.row(a), r2: x.row(b) },
        Rectangle { c1: b, c2: a, r1: x.row(b), r2: x.row(a) },
    ]
}

/// Marking and interior-point counts of a rectangle taken from state `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RectangleData {
    pub x_count: usize,
    pub o_count: usize,
    pub interior_points: usize,
}

/// Counts the X-markings, O-markings and source-state points strictly inside
/// `r` (toroidal membership; markings sit at square centres, so a marking is
/// inside exactly when its square is covered).
pub fn rectangle_data(d: &GridDiagram, x: &GridState, r: &Rectangle) -> RectangleData {
    let n = d.n();
    let mut data = RectangleData { x_count: 0, o_count: 0, interior_points: 0 };
    for c in 0..n {
        if r.covers_col(c) {
            if r.covers_row(d.x_row(c)) {
                data.x_count += 1;
            }
            if r.covers_row(d.o_row(c)) {
                data.o_count += 1;
            }
        }
        if r.interior_contains(n, c, x.row(c)) {
            data.interior_points += 1;
        }
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{preset_unknot, Axis};
    use proptest::prelude::*;

    fn st(sigma: &[u8]) -> GridState {
        GridState::new(sigma.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let opts = EvalOptions::default();
        let states: Vec<GridState> =
            enumerate_states(&preset_unknot(3).unwrap(), &opts).unwrap().collect();
        assert_eq!(states.len(), 6);
        assert_eq!(states[0], st(&[0, 1, 2]));
        assert_eq!(states[5], st(&[2, 1, 0]));
        for w in states.windows(2) {
            assert!(w[0] < w[1]);
        }
        let five: Vec<_> = all_states(5).collect();
        assert_eq!(five.len(), 120);
        assert_eq!(all_states(2).count(), 2);
    }

    #[test]
    fn enumeration_respects_guard() {
        let opts = EvalOptions { state_guard: 120, ..Default::default() };
        assert!(enumerate_states(&preset_unknot(5).unwrap(), &opts).is_ok());
        assert!(enumerate_states(&preset_unknot(6).unwrap(), &opts).is_err());
    }

    #[test]
    fn lex_rank_matches_enumeration_order() {
        for (i, s) in all_states(4).enumerate() {
            assert_eq!(s.lex_rank(), i as u64);
        }
    }

    #[test]
    fn unknot2_gradings() {
        let d = preset_unknot(2).unwrap();
        let diag = gradings(&d, &st(&[0, 1]));
        assert_eq!(diag.maslov_o, 0);
        assert_eq!(diag.alexander, Ratio::from_integer(0));
        let anti = gradings(&d, &st(&[1, 0]));
        assert_eq!(anti.maslov_o, -1);
        assert_eq!(anti.alexander, Ratio::from_integer(-1));
    }

    #[test]
    fn unknot3_diagonal_maslov() {
        let d = preset_unknot(3).unwrap();
        let g = gradings(&d, &st(&[0, 1, 2]));
        assert_eq!(g.maslov_o, 0);
    }

    #[test]
    fn gr_scaled_recovers_t_grading() {
        let d = preset_unknot(2).unwrap();
        let t = RationalT::new(1, 2).unwrap();
        assert_eq!(gradings(&d, &st(&[0, 1])).gr_scaled(t), Some(0));
        assert_eq!(gradings(&d, &st(&[1, 0])).gr_scaled(t), Some(-1));
    }

    #[test]
    fn rectangles_between_n2_states() {
        let x = st(&[0, 1]);
        let y = st(&[1, 0]);
        let rects = connecting_rectangles(&x, &y);
        assert_eq!(rects.len(), 2);
        assert_eq!(rects[0], Rectangle { c1: 0, c2: 1, r1: 0, r2: 1 });
        assert_eq!(rects[1], Rectangle { c1: 1, c2: 0, r1: 1, r2: 0 });
        assert!(connecting_rectangles(&x, &x).is_empty());
        let a = st(&[0, 1, 2, 3]);
        let b = st(&[1, 2, 0, 3]);
        assert!(connecting_rectangles(&a, &b).is_empty());
    }

    #[test]
    fn rectangle_counts_on_unknot2() {
        let d = preset_unknot(2).unwrap();
        let unit00 = Rectangle { c1: 0, c2: 1, r1: 0, r2: 1 };
        let data = rectangle_data(&d, &st(&[0, 1]), &unit00);
        assert_eq!(data, RectangleData { x_count: 1, o_count: 0, interior_points: 0 });
        let unit01 = Rectangle { c1: 0, c2: 1, r1: 1, r2: 0 };
        let data = rectangle_data(&d, &st(&[1, 0]), &unit01);
        assert_eq!(data, RectangleData { x_count: 0, o_count: 1, interior_points: 0 });
    }

    #[test]
    fn rectangle_pairs_partition_the_four_completions() {
        // Rect(x,y) and Rect(y,x) are disjoint and jointly the 4 toroidal
        // rectangles on the symmetric difference
        for x in all_states(4) {
            let y = x.transposed(1, 3);
            let fwd = connecting_rectangles(&x, &y);
            let bwd = connecting_rectangles(&y, &x);
            assert_eq!(fwd.len(), 2);
            assert_eq!(bwd.len(), 2);
            for r in &fwd {
                assert!(!bwd.contains(r));
            }
        }
    }

    /// Independent check of the two rectangle grading relations on every
    /// connecting rectangle of every state pair.
    fn check_grading_relations(d: &GridDiagram) {
        let n = d.n();
        let states: Vec<GridState> = all_states(n).collect();
        let grads: Vec<StateGradings> = states.iter().map(|s| gradings(d, s)).collect();
        for (ix, x) in states.iter().enumerate() {
            let gx = &grads[ix];
            for a in 0..n {
                for b in a + 1..n {
                    let y = x.transposed(a, b);
                    let gy = &grads[y.lex_rank() as usize];
                    for r in connecting_rectangles(x, &y) {
                        let data = rectangle_data(d, x, &r);
                        assert_eq!(
                            gx.maslov_o - gy.maslov_o,
                            1 - 2 * data.o_count as i64 + 2 * data.interior_points as i64,
                            "Maslov relation fails on {x:?} -> {y:?} via {r:?}"
                        );
                        assert_eq!(
                            gx.alexander - gy.alexander,
                            Ratio::from_integer(data.x_count as i64 - data.o_count as i64),
                            "Alexander relation fails on {x:?} -> {y:?} via {r:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn grading_relations_hold_exhaustively() {
        for n in 2..=5 {
            check_grading_relations(&preset_unknot(n).unwrap());
        }
        check_grading_relations(&crate::grid::preset_torus(2, 3).unwrap());
    }

    #[test]
    fn alexander_is_integral_for_knots() {
        for d in [
            preset_unknot(4).unwrap(),
            preset_unknot(5).unwrap(),
            crate::grid::preset_torus(2, 3).unwrap(),
        ] {
            assert_eq!(d.component_count(), 1);
            for s in all_states(d.n()) {
                assert!(gradings(&d, &s).alexander.is_integer());
            }
        }
    }

    proptest! {
        #[test]
        fn grading_multiset_invariant_under_cyclic_permutation(
            k in 0usize..4,
            rows in proptest::bool::ANY,
        ) {
            let d = preset_unknot(4).unwrap();
            let axis = if rows { Axis::Rows } else { Axis::Cols };
            let moved = d.cyclic_permute(axis, k);
            let mut before: Vec<(i64, Ratio<i64>)> = all_states(4)
                .map(|s| {
                    let g = gradings(&d, &s);
                    (g.maslov_o, g.alexander)
                })
                .collect();
            let mut after: Vec<(i64, Ratio<i64>)> = all_states(4)
                .map(|s| {
                    let g = gradings(&moved, &s);
                    (g.maslov_o, g.alexander)
                })
                .collect();
            before.sort();
            after.sort();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn grading_relations_on_random_move_descendants(seed in 0u64..40) {
            let d = crate::grid::random_moves(&preset_unknot(2).unwrap(), seed, 5, 4)
                .pop()
                .unwrap()
                .1;
            check_grading_relations(&d);
        }
    }
}
