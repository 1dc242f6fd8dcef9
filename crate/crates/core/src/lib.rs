//! Combinatorial computation of the knot concordance invariant Υ (Upsilon)
//! from grid diagrams.
//!
//! The pipeline: a knot is presented as an n×n toroidal [`grid::GridDiagram`];
//! its grid states ([`state`]) generate a chain complex over a mod-2 monomial
//! ring ([`poly`], [`complex`]) whose differential counts empty rectangles
//! weighted by the markings they cover; a graded reduction engine
//! ([`homology`]) splits the homology into free and torsion towers; and
//! [`upsilon`] reads Υ(t) off as the maximal grading of a free tower,
//! together with derived quantities (τ, unknotting bounds, move-invariance
//! audits).
//!
//! All arithmetic is exact: gradings are scaled integers, coefficients are
//! finite sets of monomial exponents over the two-element field, and Υ values
//! are exact rationals.

pub mod complex;
pub mod error;
pub mod grid;
pub mod homology;
mod par;
pub mod poly;
pub mod state;
pub mod upsilon;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Default cap on the number of grid states a computation may enumerate (10!).
pub const DEFAULT_STATE_GUARD: u64 = 3_628_800;

/// Default number of truncation doublings attempted before a decomposition is
/// reported as unstable.
pub const DEFAULT_DOUBLING_BUDGET: u32 = 6;

/// Tunables shared by every computation that enumerates grid states or
/// reduces a complex.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Refuse any computation whose diagram has more than this many grid
    /// states (n!), before allocating anything.
    pub state_guard: u64,
    /// Explicit truncation depth for the reduction engine; `None` selects the
    /// automatic depth with stability-by-doubling certification.
    pub truncation: Option<u32>,
    /// How many times the automatic truncation may double before giving up.
    pub doubling_budget: u32,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            state_guard: DEFAULT_STATE_GUARD,
            truncation: None,
            doubling_budget: DEFAULT_DOUBLING_BUDGET,
        }
    }
}

impl EvalOptions {
    /// Errors out if a diagram of grid number `n` has more states than the guard allows.
    /// Generator ids are 32-bit, so the guard is clamped to u32::MAX regardless.
    pub fn check_guard(&self, n: usize) -> Result<()> {
        let cap = self.state_guard.min(u32::MAX as u64);
        let mut states: u64 = 1;
        for k in 2..=n as u64 {
            states = match states.checked_mul(k) {
                Some(s) if s <= cap => s,
                _ => {
                    return Err(Error::GuardExceeded {
                        n,
                        guard: self.state_guard,
                    })
                }
            };
        }
        Ok(())
    }
}
