use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// Variants are grouped roughly by pipeline stage; the CLI maps them onto
/// exit codes (domain errors, I/O errors, guard refusals).
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid text is malformed: {0}")]
    MalformedGrid(String),

    #[error("grid number must be at least 2, got {0}")]
    GridTooSmall(usize),

    #[error("{0} not a permutation")]
    NotPermutation(&'static str),

    #[error("X and O share square in column {0}")]
    SharedSquare(usize),

    #[error("marking list has length {got}, expected n = {n}")]
    LengthMismatch { n: usize, got: usize },

    #[error("index {index} out of range for grid number {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("interchange of {axis} pair {index} is a {actual}, not a {requested}")]
    WrongInterchange {
        axis: &'static str,
        index: usize,
        actual: &'static str,
        requested: &'static str,
    },

    #[error("no destabilization block of the requested pattern at column {col}, row {row}")]
    StaleSite { col: usize, row: usize },

    #[error("destabilization would shrink the grid below 2")]
    CannotDestabilize,

    #[error("invalid preset: {0}")]
    BadPreset(String),

    #[error("not a rational in [0,2]: {0}")]
    BadRational(String),

    #[error("t = {0} is an endpoint; the complex is degenerate there (upsilon is 0 by definition)")]
    DegenerateT(String),

    #[error("diagram has {0} link components; a knot (single component) is required")]
    NotAKnot(usize),

    #[error("grid number {n} has more states than the guard {guard} allows; raise GRIDUPS_GUARD or pick a smaller diagram")]
    GuardExceeded { n: usize, guard: u64 },

    #[error("complex is not degree-homogeneous")]
    NotHomogeneous,

    #[error("truncation depth must be positive")]
    BadTruncation,

    #[error("decomposition did not stabilize after {doublings} doublings (last depth {truncation})")]
    TruncationUnstable { doublings: u32, truncation: u32 },

    #[error("stabilization self-test failed: {0}")]
    SelfTest(String),

    #[error("profile invariant violated: {0}")]
    ProfileInvariant(String),

    #[error("tau ladder did not stabilize for N in {{4, 8, 16}}")]
    TauUnstable,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
