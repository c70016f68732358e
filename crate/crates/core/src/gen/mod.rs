//! Cover corpora: exhaustive enumeration at small parameters, seeded random
//! sampling, and the corpus-wide verification driver.

mod enumerate;
mod random;
mod verify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{BranchedCover, CoverError};

pub use enumerate::{canonical_form, enumerate_covers, CoverStream};
pub use random::{feasibility_diagnosis, random_cover, RandomCovers, REJECTION_BUDGET};
pub use verify::{verify_corpus, verify_covers, CheckCount, CorpusViolation, VerificationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("empty range for {0}")]
    EmptyRange(&'static str),
    #[error("enumeration cap exceeded: degree {degree} at base genus {genus} (max {max})")]
    CapExceeded { degree: usize, genus: usize, max: usize },
    #[error("random mode needs a seed")]
    MissingSeed,
    #[error("parameters infeasible: {0}")]
    Infeasible(String),
    #[error("bad range {0:?}: expected N or N-M")]
    BadRange(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// Closed integer interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn new(lo: usize, hi: usize) -> Self {
        Span { lo, hi }
    }

    pub fn single(v: usize) -> Self {
        Span { lo: v, hi: v }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}-{}", self.lo, self.hi)
        }
    }
}

impl FromStr for Span {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        let bad = || GenError::BadRange(s.to_string());
        let s = s.trim();
        let (lo, hi) = match s.split_once("..=").or_else(|| s.split_once('-')) {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, s),
        };
        let lo = lo.parse().map_err(|_| bad())?;
        let hi = hi.parse().map_err(|_| bad())?;
        Ok(Span { lo, hi })
    }
}

/// Which covers a corpus contains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub degree: Span,
    pub base_genus: Span,
    pub branch_points: Span,
    /// Only covers whose branch cycles are all transpositions.
    pub morse_only: bool,
    /// Random mode when set: this many samples.
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Keep one cover per simultaneous-conjugation class (enumeration only).
    pub dedup: bool,
}

impl CorpusSpec {
    pub fn exhaustive(degree: Span, base_genus: Span, branch_points: Span) -> Self {
        CorpusSpec {
            degree,
            base_genus,
            branch_points,
            morse_only: false,
            samples: None,
            seed: None,
            dedup: false,
        }
    }

    pub fn random(degree: Span, base_genus: Span, branch_points: Span, samples: usize, seed: u64) -> Self {
        CorpusSpec {
            samples: Some(samples),
            seed: Some(seed),
            ..CorpusSpec::exhaustive(degree, base_genus, branch_points)
        }
    }

    pub fn morse(mut self, on: bool) -> Self {
        self.morse_only = on;
        self
    }

    pub fn deduplicated(mut self, on: bool) -> Self {
        self.dedup = on;
        self
    }

    pub fn is_random(&self) -> bool {
        self.samples.is_some()
    }

    pub fn check(&self) -> Result<(), GenError> {
        if self.degree.is_empty() {
            return Err(GenError::EmptyRange("degree"));
        }
        if self.base_genus.is_empty() {
            return Err(GenError::EmptyRange("base genus"));
        }
        if self.branch_points.is_empty() {
            return Err(GenError::EmptyRange("branch points"));
        }
        if self.degree.lo == 0 {
            return Err(GenError::EmptyRange("degree (must be positive)"));
        }
        if self.is_random() && self.seed.is_none() {
            return Err(GenError::MissingSeed);
        }
        Ok(())
    }

    /// The covers of this corpus, in a deterministic order.
    pub fn covers(&self) -> Result<Box<dyn Iterator<Item = Result<BranchedCover, GenError>> + Send>, GenError> {
        self.check()?;
        if self.is_random() {
            Ok(Box::new(RandomCovers::new(self)?))
        } else {
            Ok(Box::new(enumerate_covers(self)?.map(Ok)))
        }
    }
}

/// Largest degree enumerated at a given base genus.
pub fn enumeration_cap(genus: usize) -> usize {
    match genus {
        0 => 5,
        1 => 3,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_parsing() {
        assert_eq!("3".parse::<Span>().unwrap(), Span::single(3));
        assert_eq!("2-4".parse::<Span>().unwrap(), Span::new(2, 4));
        assert_eq!("2..=4".parse::<Span>().unwrap(), Span::new(2, 4));
        assert!("x".parse::<Span>().is_err());
        assert_eq!(Span::new(2, 4).to_string(), "2-4");
    }

    #[test]
    fn spec_checks() {
        let mut s = CorpusSpec::exhaustive(Span::new(3, 2), Span::single(0), Span::single(2));
        assert_eq!(s.check(), Err(GenError::EmptyRange("degree")));
        s.degree = Span::single(2);
        s.samples = Some(3);
        assert_eq!(s.check(), Err(GenError::MissingSeed));
    }
}
