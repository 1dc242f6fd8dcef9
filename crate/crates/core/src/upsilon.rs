//! The Υ invariant and its derived quantities.
//!
//! Υ(t) is the maximal scaled grading of a free tower of the reduced
//! homology, divided by the denominator of t. The computation runs directly
//! on one half of [0, 2] — the half on which that maximum is invariant under
//! stabilization — and uses the symmetry Υ(t) = Υ(2−t) for the other half.
//! Which half is invariant depends on a grading-shift sign convention, so it
//! is not hard-coded: a cached self-test compares the tower multisets of the
//! 2×2 unknot against its four stabilizations and selects the half on which
//! the maximum does not move (expected: [0, 1], with the extra tensor factor
//! sitting at relative grading t − 1).

use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::Signed;
use serde::Serialize;

use crate::complex::build_t_complex;
use crate::grid::{preset_unknot, random_moves, GridDiagram, MoveRecord, StabVariant};
use crate::homology::{decompose_with, TowerDecomposition};
use crate::par;
use crate::poly::RationalT;
use crate::{Error, EvalOptions, Result};

/// Which half of [0, 2] the engine evaluates directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfInterval {
    /// [0, 1]: upsilon_at reflects t > 1 to 2 − t.
    Lower,
    /// [1, 2]: upsilon_at reflects t < 1 to 2 − t.
    Upper,
}

/// Evidence from comparing the unknot's towers with its stabilizations.
#[derive(Debug, Clone)]
pub struct StabilizationProbe {
    pub t: RationalT,
    pub base: TowerDecomposition,
    pub stabilized: Vec<(StabVariant, TowerDecomposition)>,
    /// Scaled relative grading of the second generator of the extra tensor
    /// factor (p − q means gr_t = t − 1).
    pub shift: i64,
    pub half_interval: HalfInterval,
}

fn doubled_multiset(base: &[i64], shift: i64) -> Vec<i64> {
    let mut out: Vec<i64> = base.iter().flat_map(|&g| [g, g + shift]).collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

fn doubled_torsion(base: &[(i64, u32)], shift: i64) -> Vec<(i64, u32)> {
    let mut out: Vec<(i64, u32)> = base
        .iter()
        .flat_map(|&(g, l)| [(g, l), (g + shift, l)])
        .collect();
    out.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    out
}

/// Decomposes the complex of `d` at the given non-degenerate t, with no
/// symmetric reflection applied.
pub fn decomposition_at(
    d: &GridDiagram,
    t: RationalT,
    opts: &EvalOptions,
) -> Result<TowerDecomposition> {
    let c = build_t_complex(d, t, opts)?;
    decompose_with(&c, opts)
}

/// Compares the 2×2 unknot with its four stabilizations at `t` and reads off
/// the stabilization grading shift and the invariant half-interval.
pub fn stabilization_probe(t: RationalT) -> Result<StabilizationProbe> {
    let opts = EvalOptions::default();
    let u2 = preset_unknot(2)?;
    let base = decomposition_at(&u2, t, &opts)?;
    let mut stabilized = Vec::new();
    for variant in StabVariant::ALL {
        let s = u2.stabilize(0, variant)?;
        stabilized.push((variant, decomposition_at(&s, t, &opts)?));
    }
    let p = t.numer() as i64;
    let q = t.denom() as i64;
    let matches = |shift: i64| {
        stabilized.iter().all(|(_, dec)| {
            dec.free_towers == doubled_multiset(&base.free_towers, shift)
                && dec.torsion_towers == doubled_torsion(&base.torsion_towers, shift)
        })
    };
    let shift = if matches(p - q) {
        p - q
    } else if matches(q - p) {
        q - p
    } else {
        return Err(Error::SelfTest(format!(
            "stabilized tower multisets are not a shifted double of the base at t = {t}"
        )));
    };
    let half_interval = if shift <= 0 {
        HalfInterval::Lower
    } else {
        HalfInterval::Upper
    };
    Ok(StabilizationProbe { t, base, stabilized, shift, half_interval })
}

static HALF_INTERVAL: OnceLock<HalfInterval> = OnceLock::new();

/// The half-interval on which the maximal free grading is
/// stabilization-invariant, decided once by [`stabilization_probe`] at
/// t = 1/2 and cached.
pub fn invariant_half_interval() -> Result<HalfInterval> {
    if let Some(&h) = HALF_INTERVAL.get() {
        return Ok(h);
    }
    let probe = stabilization_probe(RationalT::new(1, 2)?)?;
    Ok(*HALF_INTERVAL.get_or_init(|| probe.half_interval))
}

/// The scaled grading shift W contributes at `t` under the selected
/// convention.
fn shift_for(t: RationalT, half: HalfInterval) -> i64 {
    let (p, q) = (t.numer() as i64, t.denom() as i64);
    match half {
        HalfInterval::Lower => p - q,
        HalfInterval::Upper => q - p,
    }
}

fn effective_t(t: RationalT, half: HalfInterval) -> RationalT {
    match half {
        HalfInterval::Lower if !t.in_lower_half() => t.reflected(),
        HalfInterval::Upper if t.in_lower_half() => t.reflected(),
        _ => t,
    }
}

fn upsilon_and_decomposition(
    d: &GridDiagram,
    t: RationalT,
    opts: &EvalOptions,
) -> Result<(Ratio<i64>, Option<(RationalT, TowerDecomposition)>)> {
    let components = d.component_count();
    if components != 1 {
        return Err(Error::NotAKnot(components));
    }
    if t.is_degenerate() {
        return Ok((Ratio::from_integer(0), None));
    }
    let half = invariant_half_interval()?;
    let t_eff = effective_t(t, half);
    let dec = decomposition_at(d, t_eff, opts)?;
    let top = dec
        .max_free_grading()
        .ok_or_else(|| Error::ProfileInvariant("homology has no free tower".into()))?;
    Ok((Ratio::new(top, t_eff.denom() as i64), Some((t_eff, dec))))
}

/// Υ of the knot presented by `d` at rational t ∈ [0, 2], as an exact rational.
pub fn upsilon_at_with(d: &GridDiagram, t: RationalT, opts: &EvalOptions) -> Result<Ratio<i64>> {
    upsilon_and_decomposition(d, t, opts).map(|(v, _)| v)
}

pub fn upsilon_at(d: &GridDiagram, t: RationalT) -> Result<Ratio<i64>> {
    upsilon_at_with(d, t, &EvalOptions::default())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileSample {
    pub t: RationalT,
    pub value: Ratio<i64>,
}

/// Validation outcomes recorded with a profile; construction fails unless
/// every flag is true, so these are all true on any returned profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileFlags {
    pub endpoints_zero: bool,
    pub denominators_divide: bool,
    pub integer_slopes: bool,
    pub symmetric: bool,
}

/// Υ sampled at every k/N for k = 0..2N, with reconstructed integer slopes.
#[derive(Debug, Clone)]
pub struct UpsilonProfile {
    pub denominator: u32,
    pub samples: Vec<ProfileSample>,
    /// slope of Υ on [k/N, (k+1)/N], an integer for every segment.
    pub segments: Vec<i64>,
    pub flags: ProfileFlags,
}

impl UpsilonProfile {
    pub fn value_at_index(&self, k: usize) -> Ratio<i64> {
        self.samples[k].value
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,upsilon\n");
        for s in &self.samples {
            out.push_str(&format!("{},{}\n", s.t, s.value));
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct SampleJson {
            t: String,
            upsilon: String,
        }
        #[derive(Serialize)]
        struct ProfileJson<'a> {
            denominator: u32,
            samples: Vec<SampleJson>,
            segments: &'a [i64],
            flags: &'a ProfileFlags,
        }
        serde_json::to_string(&ProfileJson {
            denominator: self.denominator,
            samples: self
                .samples
                .iter()
                .map(|s| SampleJson { t: s.t.to_string(), upsilon: s.value.to_string() })
                .collect(),
            segments: &self.segments,
            flags: &self.flags,
        })
        .expect("profile serialization cannot fail")
    }
}

/// Samples Υ at k/N for k = 0..2N and validates every profile invariant:
/// zero endpoints, denominators dividing N, integer slopes, and the
/// symmetry Υ(t) = Υ(2 − t). Violations are engine defects, not user errors.
pub fn upsilon_profile_with(
    d: &GridDiagram,
    denominator: u32,
    opts: &EvalOptions,
) -> Result<UpsilonProfile> {
    if denominator == 0 {
        return Err(Error::BadRational("profile denominator 0".into()));
    }
    let count = 2 * denominator as usize + 1;
    let ts: Vec<RationalT> = (0..count)
        .map(|k| RationalT::new(k as u32, denominator))
        .collect::<Result<_>>()?;
    let values: Vec<Result<Ratio<i64>>> =
        par::map_indexed(count, |k| upsilon_at_with(d, ts[k], opts));
    let mut samples = Vec::with_capacity(count);
    for (t, v) in ts.into_iter().zip(values) {
        samples.push(ProfileSample { t, value: v? });
    }
    let n = Ratio::from_integer(denominator as i64);
    let zero = Ratio::from_integer(0);
    let flags = ProfileFlags {
        endpoints_zero: samples[0].value == zero && samples[count - 1].value == zero,
        denominators_divide: samples.iter().all(|s| (s.value * n).is_integer()),
        integer_slopes: samples
            .windows(2)
            .all(|w| ((w[1].value - w[0].value) * n).is_integer()),
        symmetric: (0..count).all(|k| samples[k].value == samples[count - 1 - k].value),
    };
    if !flags.endpoints_zero {
        return Err(Error::ProfileInvariant("profile endpoints are not zero".into()));
    }
    if !flags.denominators_divide {
        return Err(Error::ProfileInvariant(format!(
            "a sample denominator does not divide {denominator}"
        )));
    }
    if !flags.integer_slopes {
        return Err(Error::ProfileInvariant("a segment slope is not an integer".into()));
    }
    if !flags.symmetric {
        return Err(Error::ProfileInvariant("profile is not symmetric about t = 1".into()));
    }
    let segments = samples
        .windows(2)
        .map(|w| ((w[1].value - w[0].value) * n).to_integer())
        .collect();
    Ok(UpsilonProfile { denominator, samples, segments, flags })
}

pub fn upsilon_profile(d: &GridDiagram, denominator: u32) -> Result<UpsilonProfile> {
    upsilon_profile_with(d, denominator, &EvalOptions::default())
}

/// τ of the knot: minus the slope of Υ at 0, read off the ladder
/// N ∈ {4, 8, 16} at the first N where the slope is already linear on
/// [0, 2/N].
pub fn tau_of_with(d: &GridDiagram, opts: &EvalOptions) -> Result<i64> {
    for n in [4u32, 8, 16] {
        let at_1 = upsilon_at_with(d, RationalT::new(1, n)?, opts)?;
        let at_2 = upsilon_at_with(d, RationalT::new(2, n)?, opts)?;
        let tau_fine = -at_1 * Ratio::from_integer(n as i64);
        let tau_coarse = -at_2 * Ratio::from_integer(n as i64 / 2);
        if tau_fine == tau_coarse {
            if !tau_fine.is_integer() {
                return Err(Error::ProfileInvariant(format!(
                    "tau candidate {tau_fine} is not an integer"
                )));
            }
            return Ok(tau_fine.to_integer());
        }
    }
    Err(Error::TauUnstable)
}

pub fn tau_of(d: &GridDiagram) -> Result<i64> {
    tau_of_with(d, &EvalOptions::default())
}

/// The unknotting bound extracted from a profile: max over 0 < t ≤ 1 of
/// |Υ(t)|/t, and its ceiling, a lower bound for the unknotting number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknottingBound {
    pub max_ratio: Ratio<i64>,
    pub integer_bound: i64,
}

pub fn unknotting_lower_bound(profile: &UpsilonProfile) -> UnknottingBound {
    let n = profile.denominator as i64;
    let mut max_ratio = Ratio::from_integer(0);
    for k in 1..=profile.denominator as usize {
        let t = Ratio::new(k as i64, n);
        let ratio = profile.samples[k].value.abs() / t;
        if ratio > max_ratio {
            max_ratio = ratio;
        }
    }
    UnknottingBound { max_ratio, integer_bound: max_ratio.ceil().to_integer() }
}

/// Outcome of testing the crossing-change double inequality
/// Υ(K₊) ≤ Υ(K₋) ≤ Υ(K₊) + t at one t ∈ [0, 1], in both role assignments.
#[derive(Debug, Clone)]
pub struct CrossingPairReport {
    pub t: RationalT,
    pub upsilon_plus: Ratio<i64>,
    pub upsilon_minus: Ratio<i64>,
    pub holds_as_given: bool,
    pub holds_swapped: bool,
}

impl CrossingPairReport {
    pub fn holds(&self) -> bool {
        self.holds_as_given || self.holds_swapped
    }
}

pub fn crossing_pair_check(
    d_plus: &GridDiagram,
    d_minus: &GridDiagram,
    t: RationalT,
    opts: &EvalOptions,
) -> Result<CrossingPairReport> {
    let up = upsilon_at_with(d_plus, t, opts)?;
    let um = upsilon_at_with(d_minus, t, opts)?;
    let tr = t.as_ratio();
    Ok(CrossingPairReport {
        t,
        upsilon_plus: up,
        upsilon_minus: um,
        holds_as_given: up <= um && um <= up + tr,
        holds_swapped: um <= up && up <= um + tr,
    })
}

/// Parameters of a move-invariance audit.
#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub seed: u64,
    pub moves: usize,
    pub max_n: usize,
    pub t_values: Vec<RationalT>,
    /// Also compare full tower multisets across steps after tensoring up to
    /// a common grid number (a stronger diagnostic than Υ alone).
    pub compare_towers: bool,
}

#[derive(Debug, Clone)]
pub struct AuditStep {
    pub index: usize,
    /// None for the initial diagram.
    pub record: Option<MoveRecord>,
    pub n: usize,
    /// Υ at each configured t, aligned with `AuditReport::t_values`.
    pub values: Vec<Ratio<i64>>,
    /// Free-tower multisets per t when tower comparison is enabled.
    pub free_towers: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub seed: u64,
    pub requested_moves: usize,
    pub max_n: usize,
    pub t_values: Vec<RationalT>,
    pub steps: Vec<AuditStep>,
    /// True iff Υ is exactly equal along the whole sequence at every t.
    pub pass: bool,
    /// True when the guard cut the sequence short.
    pub truncated: bool,
    /// When tower comparison is enabled: whether the W-normalized tower
    /// multisets agree along the sequence at every t.
    pub towers_equal: Option<bool>,
}

impl AuditReport {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct StepJson<'a> {
            index: usize,
            n: usize,
            #[serde(rename = "move")]
            record: &'a Option<MoveRecord>,
            upsilon: Vec<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            free_towers: &'a Option<Vec<Vec<i64>>>,
        }
        #[derive(Serialize)]
        struct ReportJson<'a> {
            seed: u64,
            moves: usize,
            max_n: usize,
            t: Vec<String>,
            pass: bool,
            truncated: bool,
            #[serde(skip_serializing_if = "Option::is_none")]
            towers_equal: Option<bool>,
            steps: Vec<StepJson<'a>>,
        }
        serde_json::to_string(&ReportJson {
            seed: self.seed,
            moves: self.requested_moves,
            max_n: self.max_n,
            t: self.t_values.iter().map(|t| t.to_string()).collect(),
            pass: self.pass,
            truncated: self.truncated,
            towers_equal: self.towers_equal,
            steps: self
                .steps
                .iter()
                .map(|s| StepJson {
                    index: s.index,
                    n: s.n,
                    record: &s.record,
                    upsilon: s.values.iter().map(|v| v.to_string()).collect(),
                    free_towers: &s.free_towers,
                })
                .collect(),
        })
        .expect("report serialization cannot fail")
    }
}

/// Runs a seeded knot-preserving move sequence and checks that Υ is exactly
/// constant along it at every configured t. A guard refusal mid-sequence
/// truncates the audit and is reported rather than erased.
pub fn invariance_audit(
    d: &GridDiagram,
    cfg: &AuditConfig,
    opts: &EvalOptions,
) -> Result<AuditReport> {
    let half = invariant_half_interval()?;
    let seq = random_moves(d, cfg.seed, cfg.moves, cfg.max_n);
    let mut diagrams: Vec<(Option<MoveRecord>, GridDiagram)> = vec![(None, d.clone())];
    diagrams.extend(seq.into_iter().map(|(r, g)| (Some(r), g)));
    let max_grid = diagrams.iter().map(|(_, g)| g.n()).max().unwrap();

    let mut steps: Vec<AuditStep> = Vec::with_capacity(diagrams.len());
    let mut truncated = false;
    'outer: for (index, (record, diagram)) in diagrams.into_iter().enumerate() {
        let evals: Vec<Result<(Ratio<i64>, Option<(RationalT, TowerDecomposition)>)>> =
            par::map_indexed(cfg.t_values.len(), |i| {
                upsilon_and_decomposition(&diagram, cfg.t_values[i], opts)
            });
        let mut values = Vec::with_capacity(evals.len());
        let mut towers = cfg.compare_towers.then(Vec::new);
        for eval in evals {
            match eval {
                Ok((v, dec)) => {
                    values.push(v);
                    if let Some(tw) = towers.as_mut() {
                        let normalized = match dec {
                            Some((t_eff, dec)) => {
                                let mut free = dec.free_towers;
                                for _ in diagram.n()..max_grid {
                                    free = doubled_multiset(&free, shift_for(t_eff, half));
                                }
                                free
                            }
                            // degenerate t carries no complex
                            None => Vec::new(),
                        };
                        tw.push(normalized);
                    }
                }
                Err(Error::GuardExceeded { .. }) => {
                    truncated = true;
                    break 'outer;
                }
                Err(e) => return Err(e),
            }
        }
        steps.push(AuditStep { index, record, n: diagram.n(), values, free_towers: towers });
    }

    let pass = !steps.is_empty()
        && (0..cfg.t_values.len())
            .all(|i| steps.iter().all(|s| s.values[i] == steps[0].values[i]));
    let towers_equal = cfg.compare_towers.then(|| {
        (0..cfg.t_values.len()).all(|i| {
            steps
                .iter()
                .all(|s| s.free_towers.as_ref().unwrap()[i] == steps[0].free_towers.as_ref().unwrap()[i])
        })
    });
    Ok(AuditReport {
        seed: cfg.seed,
        requested_moves: cfg.moves,
        max_n: cfg.max_n,
        t_values: cfg.t_values.clone(),
        steps,
        pass,
        truncated,
        towers_equal,
    })
}
