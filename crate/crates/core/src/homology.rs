//! Graded reduction of t-modified complexes over the u-completed coefficient
//! ring, which is a discrete valuation ring: units are exactly the
//! polynomials with constant term 1.
//!
//! The engine repeatedly picks a nonzero off-diagonal entry of minimal
//! u-valuation, clears its row and column by homogeneous base changes, and
//! splits off the two generators: a pivot of valuation a contributes a
//! torsion tower of length a (nothing when a = 0). Generators that survive
//! with no incident entries are the free towers. Degree-homogeneity keeps
//! every entry a single monomial, so the whole loop is exact; the truncation
//! depth only matters for adversarial inputs and is certified anyway by
//! recomputing at twice the depth until two consecutive results agree.
//!
//! Two independent cross-checks live here as well: a truncated brute-force
//! oracle that expands u-multiples into plain F₂ generators and reads
//! dimensions off Gaussian elimination, and the bigraded dimensions of the
//! fully blocked complex.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_rational::Ratio;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{check_degree_homogeneity, BlockedComplex, Generator, TComplex};
use crate::par;
use crate::poly::{Poly, RationalT};
use crate::{Error, EvalOptions, Result};

/// Homology of a t-modified complex split into u-power towers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerDecomposition {
    pub t: RationalT,
    /// Scaled gradings of the infinite towers, descending.
    pub free_towers: Vec<i64>,
    /// (scaled grading of the top class, length in u-units), each summand
    /// annihilated by u^length.
    pub torsion_towers: Vec<(i64, u32)>,
    pub truncation_used: u32,
}

#[derive(Serialize)]
pub struct DecompositionReport {
    t: String,
    rank: usize,
    free: Vec<i64>,
    torsion: Vec<(i64, u32)>,
    truncation: u32,
}

impl TowerDecomposition {
    pub fn rank(&self) -> usize {
        self.free_towers.len()
    }

    pub fn max_free_grading(&self) -> Option<i64> {
        self.free_towers.first().copied()
    }

    pub fn max_torsion_length(&self) -> u32 {
        self.torsion_towers.iter().map(|&(_, l)| l).max().unwrap_or(0)
    }

    /// The F₂-dimension this decomposition predicts at one scaled grading.
    pub fn implied_dim(&self, grading: i64) -> usize {
        let free = self.free_towers.iter().filter(|&&b| b >= grading).count();
        let torsion = self
            .torsion_towers
            .iter()
            .filter(|&&(b, l)| grading <= b && grading > b - l as i64)
            .count();
        free + torsion
    }

    pub fn report(&self) -> DecompositionReport {
        DecompositionReport {
            t: self.t.to_string(),
            rank: self.rank(),
            free: self.free_towers.clone(),
            torsion: self.torsion_towers.clone(),
            truncation: self.truncation_used,
        }
    }

    pub fn report_json(&self) -> String {
        serde_json::to_string(&self.report()).expect("report serialization cannot fail")
    }
}

/// Sparse mutable copy of a complex, indexed by positions in a fixed order.
struct Reducer {
    depth: u32,
    grading: Vec<i64>,
    /// cols[x][y] = coefficient of y in ∂x
    cols: Vec<BTreeMap<u32, Poly>>,
    /// rows[y] = sources x with a nonzero entry (y, x)
    rows: Vec<BTreeSet<u32>>,
    alive: Vec<bool>,
    torsion: Vec<(i64, u32)>,
}

impl Reducer {
    /// Builds the working matrix with generators permuted into `order`.
    fn new(c: &TComplex, order: &[u32], depth: u32) -> Self {
        let count = c.generator_count();
        let mut pos = vec![0u32; count];
        for (position, &orig) in order.iter().enumerate() {
            pos[orig as usize] = position as u32;
        }
        let mut cols: Vec<BTreeMap<u32, Poly>> = vec![BTreeMap::new(); count];
        let mut rows: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); count];
        for (x, col) in c.columns.iter().enumerate() {
            let px = pos[x];
            for (&y, poly) in col {
                let mut poly = poly.clone();
                poly.truncate(depth);
                if poly.is_zero() {
                    continue;
                }
                let py = pos[y as usize];
                rows[py as usize].insert(px);
                cols[px as usize].insert(py, poly);
            }
        }
        Reducer {
            depth,
            grading: order.iter().map(|&i| c.grading(i)).collect(),
            cols,
            rows,
            alive: vec![true; count],
            torsion: Vec::new(),
        }
    }

    fn add_to_entry(&mut self, y: u32, x: u32, add: &Poly, units: &mut VecDeque<(u32, u32)>) {
        let col = &mut self.cols[x as usize];
        let slot = col.entry(y).or_default();
        slot.add_assign(add);
        slot.truncate(self.depth);
        if slot.is_zero() {
            col.remove(&y);
            self.rows[y as usize].remove(&x);
        } else {
            if slot.is_unit() && y != x {
                units.push_back((y, x));
            }
            self.rows[y as usize].insert(x);
        }
    }

    /// Splits off the pair (x0, y0) pivoting on entry (y0, x0); its valuation
    /// becomes a torsion length when positive.
    ///
    /// Row y0 and column x0 are cleared by base changes whose only other
    /// effect lands in row x0 and column y0; since the boundary squares to
    /// zero, those are forced to vanish on surviving generators, so the four
    /// lines through x0 and y0 are dropped wholesale.
    fn cancel(&mut self, y0: u32, x0: u32, units: &mut VecDeque<(u32, u32)>) {
        debug_assert_ne!(y0, x0);
        let pivot = self.cols[x0 as usize][&y0].clone();
        let a = pivot.valuation().expect("pivot must be nonzero");
        let row_sources: Vec<u32> = self.rows[y0 as usize]
            .iter()
            .copied()
            .filter(|&x| x != x0 && x != y0)
            .collect();
        let col_targets: Vec<(u32, Poly)> = self.cols[x0 as usize]
            .iter()
            .filter(|&(&y, _)| y != y0 && y != x0)
            .map(|(&y, p)| (y, p.clone()))
            .collect();
        for &x in &row_sources {
            let lambda = self.cols[x as usize][&y0].div_truncated(&pivot, self.depth);
            for (y, py) in &col_targets {
                let mut add = lambda.mul(py);
                add.truncate(self.depth);
                if !add.is_zero() {
                    self.add_to_entry(*y, x, &add, units);
                }
            }
        }
        for dead in [x0, y0] {
            for y in std::mem::take(&mut self.cols[dead as usize]).into_keys() {
                self.rows[y as usize].remove(&dead);
            }
            for x in std::mem::take(&mut self.rows[dead as usize]) {
                self.cols[x as usize].remove(&dead);
            }
            self.alive[dead as usize] = false;
        }
        if a > 0 {
            self.torsion.push((self.grading[y0 as usize], a));
        }
    }

    /// Cancels unit pivots until none remain, queue-driven.
    fn unit_wave(&mut self) {
        let mut units: VecDeque<(u32, u32)> = VecDeque::new();
        for (x, col) in self.cols.iter().enumerate() {
            for (&y, poly) in col {
                if poly.is_unit() && y != x as u32 {
                    units.push_back((y, x as u32));
                }
            }
        }
        while let Some((y, x)) = units.pop_front() {
            if !self.alive[y as usize] || !self.alive[x as usize] || y == x {
                continue;
            }
            match self.cols[x as usize].get(&y) {
                Some(p) if p.is_unit() => {}
                _ => continue,
            }
            self.cancel(y, x, &mut units);
        }
    }

    /// Smallest-valuation off-diagonal entry, first in (x, y) scan order.
    fn min_valuation_pivot(&self) -> Option<(u32, u32)> {
        let mut best: Option<(u32, u32, u32)> = None;
        for (x, col) in self.cols.iter().enumerate() {
            for (&y, poly) in col {
                if y == x as u32 {
                    continue;
                }
                let v = poly.valuation().expect("stored entries are nonzero");
                if best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, y, x as u32));
                }
            }
        }
        best.map(|(_, y, x)| (y, x))
    }

    fn valuation_phase(&mut self) {
        let mut scratch = VecDeque::new();
        while let Some((y, x)) = self.min_valuation_pivot() {
            self.cancel(y, x, &mut scratch);
            scratch.clear();
        }
        // A diagonal-only leftover cannot occur in an exact complex (its
        // square would not vanish); under truncation it is possible in
        // principle and is left to the doubling certification.
    }

    fn survivor_gradings(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self
            .alive
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a)
            .map(|(i, _)| self.grading[i])
            .collect();
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    fn sorted_torsion(&self) -> Vec<(i64, u32)> {
        let mut t = self.torsion.clone();
        t.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        t
    }
}

/// Canonical processing order: by scaled grading, then by state, then by
/// input index, making the decomposition independent of generator order.
fn canonical_order(c: &TComplex) -> Vec<u32> {
    let mut order: Vec<u32> = (0..c.generator_count() as u32).collect();
    order.sort_by(|&a, &b| {
        let ga = &c.generators[a as usize];
        let gb = &c.generators[b as usize];
        ga.grading
            .cmp(&gb.grading)
            .then_with(|| ga.state.sigma().cmp(gb.state.sigma()))
            .then(a.cmp(&b))
    });
    order
}

fn reduce_at_depth(c: &TComplex, depth: u32) -> (Vec<i64>, Vec<(i64, u32)>) {
    let order = canonical_order(c);
    let mut red = Reducer::new(c, &order, depth);
    red.unit_wave();
    red.valuation_phase();
    (red.survivor_gradings(), red.sorted_torsion())
}

/// Automatic starting depth: 8·q·n.
fn auto_depth(c: &TComplex) -> u32 {
    8 * c.t.denom() * c.grid_n.max(2) as u32
}

/// Depth past which reduction of a single-monomial complex is exact, or
/// `None` when some entry has several terms.
fn exactness_threshold(c: &TComplex) -> Option<u32> {
    if c.columns.iter().any(|col| col.values().any(|p| p.exponents().len() != 1)) {
        return None;
    }
    let gradings = c.generators.iter().map(|g| g.grading);
    let span = match (gradings.clone().max(), gradings.min()) {
        (Some(hi), Some(lo)) => (hi - lo) as u32,
        _ => 0,
    };
    Some(span + c.t.denom() + 1)
}

/// Decomposes the homology of a homogeneous complex into towers.
///
/// With `opts.truncation` unset, the depth starts at 8·q·n and doubles until
/// two consecutive runs agree (the decomposition is exact for monomial
/// complexes, so the first pair normally agrees); an explicit truncation is
/// taken as a caller override and run once.
pub fn decompose_with(c: &TComplex, opts: &EvalOptions) -> Result<TowerDecomposition> {
    if !check_degree_homogeneity(c) {
        return Err(Error::NotHomogeneous);
    }
    let make = |free, torsion, depth| TowerDecomposition {
        t: c.t,
        free_towers: free,
        torsion_towers: torsion,
        truncation_used: depth,
    };
    match opts.truncation {
        Some(0) => Err(Error::BadTruncation),
        Some(depth) => {
            let (free, torsion) = reduce_at_depth(c, depth);
            Ok(make(free, torsion, depth))
        }
        None => {
            let mut depth = auto_depth(c);
            // When every entry is a single monomial, homogeneity pins each
            // exponent to g̃(y) − g̃(x) + q throughout the elimination, so no
            // exponent can ever reach span + q + 1: past that depth the run
            // is exact and certifies itself without a doubling pass.
            if let Some(exact) = exactness_threshold(c) {
                if depth >= exact {
                    let (free, torsion) = reduce_at_depth(c, depth);
                    return Ok(make(free, torsion, depth));
                }
            }
            let mut prev = reduce_at_depth(c, depth);
            for _ in 0..opts.doubling_budget {
                let next = reduce_at_depth(c, depth * 2);
                if prev == next {
                    return Ok(make(prev.0, prev.1, depth));
                }
                prev = next;
                depth *= 2;
            }
            Err(Error::TruncationUnstable {
                doublings: opts.doubling_budget,
                truncation: depth,
            })
        }
    }
}

pub fn decompose(c: &TComplex) -> Result<TowerDecomposition> {
    decompose_with(c, &EvalOptions::default())
}

/// Cancels every unit entry of a homogeneous complex, returning the smaller
/// complex (no truncation is involved: homogeneous unit entries are exactly
/// 1). Deterministic given the stored generator order.
pub fn cancel_unit_pairs(c: &TComplex) -> Result<TComplex> {
    if !check_degree_homogeneity(c) {
        return Err(Error::NotHomogeneous);
    }
    let order: Vec<u32> = (0..c.generator_count() as u32).collect();
    let mut red = Reducer::new(c, &order, u32::MAX);
    red.unit_wave();
    let survivors: Vec<u32> = (0..c.generator_count() as u32)
        .filter(|&i| red.alive[i as usize])
        .collect();
    let remap: HashMap<u32, u32> = survivors
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new as u32))
        .collect();
    let generators: Vec<Generator> = survivors
        .iter()
        .map(|&i| c.generators[i as usize].clone())
        .collect();
    let columns: Vec<BTreeMap<u32, Poly>> = survivors
        .iter()
        .map(|&i| {
            red.cols[i as usize]
                .iter()
                .map(|(&y, p)| (remap[&y], p.clone()))
                .collect()
        })
        .collect();
    TComplex::from_parts(c.t, c.grid_n, generators, columns)
}

/// Expands each generator into `depth` u-multiples and reads per-grading
/// homology dimensions off plain mod-2 Gaussian elimination. Trustworthy
/// above the truncation horizon (top grading − depth + max torsion length).
pub fn truncated_dims_oracle(c: &TComplex, depth: u32) -> Result<BTreeMap<i64, usize>> {
    if depth == 0 {
        return Err(Error::BadTruncation);
    }
    let q = c.t.denom() as i64;
    // basis elements u^k·x grouped by scaled grading, in (generator, k) order
    let mut basis: BTreeMap<i64, Vec<(u32, u32)>> = BTreeMap::new();
    for (i, gen) in c.generators.iter().enumerate() {
        for k in 0..depth {
            basis
                .entry(gen.grading - k as i64)
                .or_default()
                .push((i as u32, k));
        }
    }
    let positions: HashMap<(u32, u32), usize> = basis
        .values()
        .flat_map(|line| line.iter().enumerate().map(|(j, &el)| (el, j)))
        .collect();
    let gradings: Vec<i64> = basis.keys().copied().collect();
    // rank of the boundary map out of each grading line
    let rank_out = |g: &i64| -> (i64, usize) {
        let g = *g;
        let Some(line) = basis.get(&g) else { return (g, 0) };
        let target_dim = basis.get(&(g - q)).map_or(0, |l| l.len());
        if target_dim == 0 {
            return (g, 0);
        }
        let words = target_dim.div_ceil(64);
        let mut vectors: Vec<Vec<u64>> = Vec::with_capacity(line.len());
        for &(i, k) in line {
            let mut v = vec![0u64; words];
            for (&y, poly) in &c.columns[i as usize] {
                for &e in poly.exponents() {
                    let kk = k + e;
                    if kk >= depth {
                        continue;
                    }
                    // only terms landing in grading g − q belong to this block
                    if c.grading(y) - (kk as i64) != g - q {
                        continue;
                    }
                    if let Some(&j) = positions.get(&(y, kk)) {
                        v[j / 64] ^= 1 << (j % 64);
                    }
                }
            }
            vectors.push(v);
        }
        (g, rank_gf2(vectors))
    };
    let ranks: HashMap<i64, usize> = par::map_indexed(gradings.len(), |i| rank_out(&gradings[i]))
        .into_iter()
        .collect();
    let mut dims = BTreeMap::new();
    for (&g, line) in &basis {
        let out = ranks.get(&g).copied().unwrap_or(0);
        let into = ranks.get(&(g + q)).copied().unwrap_or(0);
        dims.insert(g, line.len() - out - into);
    }
    Ok(dims)
}

/// GF(2) rank by forward elimination on bit-packed vectors.
fn rank_gf2(mut vectors: Vec<Vec<u64>>) -> usize {
    let mut basis: Vec<(usize, usize, usize)> = Vec::new(); // (word, bit, index into kept)
    let mut kept: Vec<Vec<u64>> = Vec::new();
    for mut v in vectors.drain(..) {
        loop {
            let lead = v.iter().enumerate().rev().find_map(|(w, &word)| {
                (word != 0).then(|| (w, 63 - word.leading_zeros() as usize))
            });
            let Some((w, b)) = lead else { break };
            if let Some(&(_, _, idx)) = basis.iter().find(|&&(bw, bb, _)| bw == w && bb == b) {
                let other = kept[idx].clone();
                for (slot, word) in v.iter_mut().zip(other) {
                    *slot ^= word;
                }
            } else {
                basis.push((w, b, kept.len()));
                kept.push(v);
                break;
            }
        }
    }
    kept.len()
}

/// Bigraded mod-2 homology dimensions of the fully blocked complex,
/// keyed by (Maslov, Alexander).
pub fn fully_blocked_dims(b: &BlockedComplex) -> BTreeMap<(i64, Ratio<i64>), usize> {
    let mut lines: BTreeMap<(i64, Ratio<i64>), Vec<u32>> = BTreeMap::new();
    for (i, gen) in b.generators.iter().enumerate() {
        lines
            .entry((gen.maslov, gen.alexander))
            .or_default()
            .push(i as u32);
    }
    let positions: HashMap<u32, usize> = lines
        .values()
        .flat_map(|line| line.iter().enumerate().map(|(j, &i)| (i, j)))
        .collect();
    let keys: Vec<(i64, Ratio<i64>)> = lines.keys().copied().collect();
    let rank_out = |key: &(i64, Ratio<i64>)| -> ((i64, Ratio<i64>), usize) {
        let (m, a) = *key;
        let line = &lines[key];
        let target_dim = lines.get(&(m - 1, a)).map_or(0, |l| l.len());
        if target_dim == 0 {
            return (*key, 0);
        }
        let words = target_dim.div_ceil(64);
        let mut vectors = Vec::with_capacity(line.len());
        for &i in line {
            let mut v = vec![0u64; words];
            for &y in &b.columns[i as usize] {
                let gy = &b.generators[y as usize];
                if gy.maslov == m - 1 && gy.alexander == a {
                    let j = positions[&y];
                    v[j / 64] ^= 1 << (j % 64);
                }
            }
            vectors.push(v);
        }
        (*key, rank_gf2(vectors))
    };
    let ranks: HashMap<(i64, Ratio<i64>), usize> =
        par::map_indexed(keys.len(), |i| rank_out(&keys[i]))
            .into_iter()
            .collect();
    let mut dims = BTreeMap::new();
    for (key, line) in &lines {
        let out = ranks.get(key).copied().unwrap_or(0);
        let into = ranks.get(&(key.0 + 1, key.1)).copied().unwrap_or(0);
        dims.insert(*key, line.len() - out - into);
    }
    dims
}

/// A randomly mixed complex with a known planted decomposition: a direct sum
/// of free generators and torsion pairs, scrambled by homogeneous
/// transvections and a relabeling, so the expected towers are exact ground
/// truth for the engine.
#[derive(Debug, Clone)]
pub struct PlantedComplex {
    pub complex: TComplex,
    pub free: Vec<i64>,
    pub torsion: Vec<(i64, u32)>,
}

pub fn synthetic_complex(seed: u64) -> PlantedComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = rng.gen_range(1..=4u32);
    let p = loop {
        let p = rng.gen_range(1..2 * q);
        if num_integer::gcd(p, q) == 1 {
            break p;
        }
    };
    let t = RationalT::new(p, q).unwrap();
    let n_free = rng.gen_range(1..=3usize);
    let n_tors = rng.gen_range(0..=4usize);

    let mut grading = Vec::new();
    let mut cols: Vec<BTreeMap<u32, Poly>> = Vec::new();
    let mut free = Vec::new();
    let mut torsion = Vec::new();
    for _ in 0..n_free {
        let g = rng.gen_range(-8..=8i64);
        grading.push(g);
        cols.push(BTreeMap::new());
        free.push(g);
    }
    for _ in 0..n_tors {
        let gy = rng.gen_range(-8..=8i64);
        let len = rng.gen_range(1..=6u32);
        let gx = gy + q as i64 - len as i64;
        let y = grading.len() as u32;
        grading.push(gy);
        cols.push(BTreeMap::new());
        grading.push(gx);
        let mut col = BTreeMap::new();
        col.insert(y, Poly::monomial(len));
        cols.push(col);
        torsion.push((gy, len));
    }
    let count = grading.len();

    // homogeneous transvections x_i ← x_i + u^e·x_j with e = g̃(j) − g̃(i)
    for _ in 0..40 {
        let i = rng.gen_range(0..count);
        let j = rng.gen_range(0..count);
        if i == j {
            continue;
        }
        let e = grading[j] - grading[i];
        if !(0..=32).contains(&e) {
            continue;
        }
        let e = e as u32;
        // col_i += u^e · col_j
        let shifted: Vec<(u32, Poly)> = cols[j]
            .iter()
            .map(|(&y, p)| (y, p.shifted(e)))
            .collect();
        for (y, add) in shifted {
            let slot = cols[i].entry(y).or_default();
            slot.add_assign(&add);
            if slot.is_zero() {
                cols[i].remove(&y);
            }
        }
        // re-express every column in the new basis: row_j += u^e · row_i
        for col in cols.iter_mut() {
            if let Some(ci) = col.get(&(i as u32)).cloned() {
                let add = ci.shifted(e);
                let slot = col.entry(j as u32).or_default();
                slot.add_assign(&add);
                if slot.is_zero() {
                    col.remove(&(j as u32));
                }
            }
        }
    }

    // relabel the generators with a random permutation
    let mut perm: Vec<u32> = (0..count as u32).collect();
    perm.shuffle(&mut rng);
    let mut new_cols: Vec<BTreeMap<u32, Poly>> = vec![BTreeMap::new(); count];
    let mut new_grading = vec![0i64; count];
    for old in 0..count {
        let new = perm[old] as usize;
        new_grading[new] = grading[old];
        new_cols[new] = cols[old]
            .iter()
            .map(|(&y, p)| (perm[y as usize], p.clone()))
            .collect();
    }

    let generators = new_grading
        .into_iter()
        .map(|grading| Generator {
            state: crate::state::GridState::new(Vec::new()).unwrap(),
            grading,
        })
        .collect();
    let complex = TComplex::from_parts(t, 3, generators, new_cols).unwrap();

    free.sort_unstable_by(|a, b| b.cmp(a));
    torsion.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    PlantedComplex { complex, free, torsion }
}
