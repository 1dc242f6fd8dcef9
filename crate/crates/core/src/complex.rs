//! The t-modified grid complex and the fully blocked complex.
//!
//! Generators are grid states. For t = p/q the differential of a state x is
//! the mod-2 sum, over empty rectangles r from x to y, of
//! u^(p·|X∩r| + (2q−p)·|O∩r|) · y, where u = U^(1/q). Gradings are stored
//! scaled by q (g̃ = q·M_O − p·A), so the differential drops the scaled
//! grading by exactly q and every coefficient exponent is pinned by the
//! gradings of its endpoints.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::grid::GridDiagram;
use crate::par;
use crate::poly::{Poly, RationalT};
use crate::state::{all_states, connecting_rectangles, gradings, rectangle_data, GridState};
use crate::{Error, EvalOptions, Result};

/// One generator of a t-modified complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub state: GridState,
    /// Scaled t-grading g̃ = q·M_O − p·A.
    pub grading: i64,
}

/// A free graded complex over the scaled coefficient ring.
///
/// `columns[x]` maps a target generator y to the coefficient of y in ∂x;
/// storage is column-major because the reduction engine pivots on columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TComplex {
    pub t: RationalT,
    /// Grid number of the source diagram (nominal for synthetic complexes);
    /// seeds the automatic truncation depth.
    pub grid_n: usize,
    pub generators: Vec<Generator>,
    pub columns: Vec<BTreeMap<u32, Poly>>,
}

impl TComplex {
    pub fn from_parts(
        t: RationalT,
        grid_n: usize,
        generators: Vec<Generator>,
        columns: Vec<BTreeMap<u32, Poly>>,
    ) -> Result<Self> {
        if columns.len() != generators.len() {
            return Err(Error::LengthMismatch {
                n: generators.len(),
                got: columns.len(),
            });
        }
        let count = generators.len() as u32;
        for col in &columns {
            if col.keys().any(|&y| y >= count) {
                return Err(Error::MalformedGrid("differential targets unknown generator".into()));
            }
        }
        Ok(TComplex { t, grid_n, generators, columns })
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn grading(&self, i: u32) -> i64 {
        self.generators[i as usize].grading
    }

    pub fn entry(&self, y: u32, x: u32) -> Option<&Poly> {
        self.columns[x as usize].get(&y)
    }

    /// Number of nonzero differential entries.
    pub fn entry_count(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    /// Debug dump: generators as (state, grading) and entries as
    /// (from, to, exponents), in generator-index order.
    pub fn debug_dump_json(&self) -> String {
        #[derive(Serialize)]
        struct GenDump<'a> {
            state: &'a [u8],
            grading: i64,
        }
        #[derive(Serialize)]
        struct EntryDump<'a> {
            from: u32,
            to: u32,
            exponents: &'a [u32],
        }
        #[derive(Serialize)]
        struct Dump<'a> {
            t: String,
            generators: Vec<GenDump<'a>>,
            entries: Vec<EntryDump<'a>>,
        }
        let generators = self
            .generators
            .iter()
            .map(|g| GenDump { state: g.state.sigma(), grading: g.grading })
            .collect();
        let mut entries = Vec::with_capacity(self.entry_count());
        for (x, col) in self.columns.iter().enumerate() {
            for (&y, poly) in col {
                entries.push(EntryDump { from: x as u32, to: y, exponents: poly.exponents() });
            }
        }
        serde_json::to_string(&Dump { t: self.t.to_string(), generators, entries })
            .expect("dump serialization cannot fail")
    }
}

fn scaled_gradings(d: &GridDiagram, states: &[GridState], t: RationalT, parallel: bool) -> Vec<i64> {
    let f = |i: usize| {
        gradings(d, &states[i])
            .gr_scaled(t)
            .expect("Alexander grading is integral for knots")
    };
    if parallel {
        par::map_indexed(states.len(), f)
    } else {
        par::map_indexed_seq(states.len(), f)
    }
}

fn t_column(
    d: &GridDiagram,
    states: &[GridState],
    t: RationalT,
    ix: usize,
) -> BTreeMap<u32, Poly> {
    let n = d.n();
    let (p, q) = (t.numer(), t.denom());
    let x = &states[ix];
    let mut col: BTreeMap<u32, Poly> = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            let y = x.transposed(a, b);
            let iy = y.lex_rank() as u32;
            for r in connecting_rectangles(x, &y) {
                let data = rectangle_data(d, x, &r);
                if data.interior_points != 0 {
                    continue;
                }
                let e = p * data.x_count as u32 + (2 * q - p) * data.o_count as u32;
                let poly = col.entry(iy).or_default();
                poly.toggle(e);
                if poly.is_zero() {
                    col.remove(&iy);
                }
            }
        }
    }
    col
}

fn build_t_complex_inner(
    d: &GridDiagram,
    t: RationalT,
    opts: &EvalOptions,
    parallel: bool,
) -> Result<TComplex> {
    let components = d.component_count();
    if components != 1 {
        return Err(Error::NotAKnot(components));
    }
    if t.is_degenerate() {
        return Err(Error::DegenerateT(t.to_string()));
    }
    opts.check_guard(d.n())?;
    let states: Vec<GridState> = all_states(d.n()).collect();
    let grading = scaled_gradings(d, &states, t, parallel);
    let column = |ix: usize| t_column(d, &states, t, ix);
    let columns = if parallel {
        par::map_indexed(states.len(), column)
    } else {
        par::map_indexed_seq(states.len(), column)
    };
    let generators = states
        .into_iter()
        .zip(grading)
        .map(|(state, grading)| Generator { state, grading })
        .collect();
    Ok(TComplex { t, grid_n: d.n(), generators, columns })
}

/// Builds the t-modified complex of a knot diagram at non-degenerate t = p/q.
pub fn build_t_complex(d: &GridDiagram, t: RationalT, opts: &EvalOptions) -> Result<TComplex> {
    build_t_complex_inner(d, t, opts, true)
}

/// Sequential twin of [`build_t_complex`], kept for benchmarking.
pub fn build_t_complex_seq(d: &GridDiagram, t: RationalT, opts: &EvalOptions) -> Result<TComplex> {
    build_t_complex_inner(d, t, opts, false)
}

/// True iff the sparse square of the differential is identically zero.
pub fn check_boundary_squared(c: &TComplex) -> bool {
    let zero = |ix: usize| {
        let mut acc: BTreeMap<u32, Poly> = BTreeMap::new();
        for (&y, pxy) in &c.columns[ix] {
            for (&z, pzy) in &c.columns[y as usize] {
                let prod = pzy.mul(pxy);
                let slot = acc.entry(z).or_default();
                slot.add_assign(&prod);
                if slot.is_zero() {
                    acc.remove(&z);
                }
            }
        }
        acc.is_empty()
    };
    par::map_indexed(c.generator_count(), zero).into_iter().all(|ok| ok)
}

/// True iff every coefficient exponent obeys the scaled grading drop:
/// for u^e·y a term of ∂x, g̃(y) − e = g̃(x) − q.
pub fn check_degree_homogeneity(c: &TComplex) -> bool {
    let q = c.t.denom() as i64;
    c.columns.iter().enumerate().all(|(x, col)| {
        col.iter().all(|(&y, poly)| {
            poly.exponents().iter().all(|&e| {
                c.grading(y) - e as i64 == c.grading(x as u32) - q
            })
        })
    })
}

/// One generator of the fully blocked complex, with its bigrading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockedGenerator {
    pub state: GridState,
    pub maslov: i64,
    pub alexander: Ratio<i64>,
}

/// The fully blocked complex over F₂: the differential counts only empty
/// rectangles containing no markings at all. It drops the Maslov grading by
/// one and preserves the Alexander grading.
#[derive(Debug, Clone)]
pub struct BlockedComplex {
    pub grid_n: usize,
    pub generators: Vec<BlockedGenerator>,
    /// columns[x] = set of targets hit an odd number of times.
    pub columns: Vec<Vec<u32>>,
}

fn blocked_column(d: &GridDiagram, states: &[GridState], ix: usize) -> Vec<u32> {
    let n = d.n();
    let x = &states[ix];
    let mut col: BTreeMap<u32, bool> = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            let y = x.transposed(a, b);
            let iy = y.lex_rank() as u32;
            for r in connecting_rectangles(x, &y) {
                let data = rectangle_data(d, x, &r);
                if data.interior_points == 0 && data.x_count == 0 && data.o_count == 0 {
                    let slot = col.entry(iy).or_insert(false);
                    *slot = !*slot;
                }
            }
        }
    }
    col.into_iter().filter(|&(_, odd)| odd).map(|(y, _)| y).collect()
}

/// Builds the fully blocked complex of any valid diagram.
pub fn build_fully_blocked(d: &GridDiagram, opts: &EvalOptions) -> Result<BlockedComplex> {
    opts.check_guard(d.n())?;
    let states: Vec<GridState> = all_states(d.n()).collect();
    let generators = par::map_indexed(states.len(), |i| {
        let g = gradings(d, &states[i]);
        BlockedGenerator {
            state: states[i].clone(),
            maslov: g.maslov_o,
            alexander: g.alexander,
        }
    });
    let columns = par::map_indexed(states.len(), |i| blocked_column(d, &states, i));
    Ok(BlockedComplex { grid_n: d.n(), generators, columns })
}

impl BlockedComplex {
    /// Parity composition: true iff the mod-2 square is zero.
    pub fn check_boundary_squared(&self) -> bool {
        let zero = |ix: usize| {
            let mut acc: BTreeMap<u32, bool> = BTreeMap::new();
            for &y in &self.columns[ix] {
                for &z in &self.columns[y as usize] {
                    let slot = acc.entry(z).or_insert(false);
                    *slot = !*slot;
                }
            }
            acc.values().all(|&odd| !odd)
        };
        par::map_indexed(self.generators.len(), zero).into_iter().all(|ok| ok)
    }
}
