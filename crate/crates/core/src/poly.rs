//! Coefficient arithmetic for the t-modified complex.
//!
//! With t = p/q, every coefficient lives in the subring of F₂[[U]] generated
//! by U^t and U^(2−t). Substituting u = U^(1/q) turns both generators into
//! honest monomials (u^p and u^(2q−p)), so a coefficient is a finite set of
//! non-negative integer exponents of u with mod-2 addition. `Poly` stores
//! exactly that set; `RationalT` carries the scaling.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use smallvec::SmallVec;

use crate::{Error, Result};

/// A rational parameter t = p/q in [0, 2], kept in lowest terms.
///
/// The endpoints t = 0 and t = 2 are representable but degenerate: the
/// t-modified differential acquires unit coefficients there and Υ is 0 by
/// definition, so complex construction refuses them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalT {
    p: u32,
    q: u32,
}

impl RationalT {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::BadRational(format!("{p}/{q}")));
        }
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        if p > 2 * q {
            return Err(Error::BadRational(format!("{p}/{q} exceeds 2")));
        }
        Ok(RationalT { p, q })
    }

    pub fn numer(&self) -> u32 {
        self.p
    }

    pub fn denom(&self) -> u32 {
        self.q
    }

    /// True at the endpoints t = 0 and t = 2.
    pub fn is_degenerate(&self) -> bool {
        self.p == 0 || self.p == 2 * self.q
    }

    /// True on the closed lower half-interval [0, 1].
    pub fn in_lower_half(&self) -> bool {
        self.p <= self.q
    }

    /// The symmetric partner 2 − t; the denominator is unchanged.
    pub fn reflected(&self) -> RationalT {
        RationalT {
            p: 2 * self.q - self.p,
            q: self.q,
        }
    }

    pub fn as_ratio(&self) -> Ratio<i64> {
        Ratio::new(self.p as i64, self.q as i64)
    }

    /// Parses `"p/q"` or a bare integer.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::BadRational(text.to_string());
        let (p, q) = match text.split_once('/') {
            Some((a, b)) => (
                a.trim().parse::<u32>().map_err(|_| bad())?,
                b.trim().parse::<u32>().map_err(|_| bad())?,
            ),
            None => (text.trim().parse::<u32>().map_err(|_| bad())?, 1),
        };
        RationalT::new(p, q)
    }
}

impl fmt::Display for RationalT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

/// A mod-2 polynomial in u, stored as its set of exponents.
///
/// Addition is symmetric difference, multiplication is the Cauchy product
/// with coefficients reduced mod 2. The zero polynomial is the empty set; a
/// unit is any polynomial containing exponent 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    // strictly increasing exponents
    exps: SmallVec<[u32; 2]>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::monomial(0)
    }

    pub fn monomial(e: u32) -> Self {
        let mut exps = SmallVec::new();
        exps.push(e);
        Poly { exps }
    }

    pub fn from_exponents(mut exps: Vec<u32>) -> Self {
        exps.sort_unstable();
        let mut out = Poly::zero();
        for e in exps {
            out.toggle(e);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.exps.is_empty()
    }

    /// A unit of the u-completed coefficient ring: constant term 1.
    pub fn is_unit(&self) -> bool {
        self.exps.first() == Some(&0)
    }

    /// The u-valuation, i.e. the smallest exponent; `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        self.exps.first().copied()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    /// Flips the coefficient of u^e (mod-2 addition of a monomial).
    pub fn toggle(&mut self, e: u32) {
        match self.exps.binary_search(&e) {
            Ok(i) => {
                self.exps.remove(i);
            }
            Err(i) => self.exps.insert(i, e),
        }
    }

    /// Adds `other`, i.e. takes the symmetric difference of exponent sets.
    pub fn add_assign(&mut self, other: &Poly) {
        if other.is_zero() {
            return;
        }
        let mut merged: SmallVec<[u32; 2]> = SmallVec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            match self.exps[i].cmp(&other.exps[j]) {
                std::cmp::Ordering::Less => {
                    merged.push(self.exps[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(other.exps[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&self.exps[i..]);
        merged.extend_from_slice(&other.exps[j..]);
        self.exps = merged;
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for &a in &self.exps {
            for &b in &other.exps {
                out.toggle(a + b);
            }
        }
        out
    }

    /// Multiplies by u^e.
    pub fn shifted(&self, e: u32) -> Poly {
        Poly {
            exps: self.exps.iter().map(|&x| x + e).collect(),
        }
    }

    /// Drops every exponent >= depth (reduction mod u^depth).
    pub fn truncate(&mut self, depth: u32) {
        while let Some(&last) = self.exps.last() {
            if last >= depth {
                self.exps.pop();
            } else {
                break;
            }
        }
    }

    /// Long division by `pivot` in the u-completion, truncated at `depth`.
    ///
    /// Requires val(self) >= val(pivot); the quotient satisfies
    /// self ≡ quotient · pivot (mod u^depth).
    pub fn div_truncated(&self, pivot: &Poly, depth: u32) -> Poly {
        let a = pivot.valuation().expect("division by zero polynomial");
        debug_assert!(self.is_zero() || self.valuation().unwrap() >= a);
        // divide out u^a from both sides
        let unit: SmallVec<[u32; 2]> = pivot.exps.iter().map(|&e| e - a).collect();
        let mut rem = Poly {
            exps: self.exps.iter().filter(|&&e| e >= a).map(|&e| e - a).collect(),
        };
        let mut quot = Poly::zero();
        while let Some(v) = rem.valuation() {
            if v >= depth {
                break;
            }
            quot.toggle(v);
            // rem += u^v * unit; the leading terms cancel, raising val(rem).
            // Terms at or beyond the truncation depth cannot influence the
            // quotient mod u^depth, so they are dropped outright.
            for &e in &unit {
                let s = e + v;
                if s < depth {
                    rem.toggle(s);
                }
            }
        }
        quot
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .exps
            .iter()
            .map(|&e| match e {
                0 => "1".to_string(),
                1 => "u".to_string(),
                _ => format!("u^{e}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}
