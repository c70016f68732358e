//! Permutations of `{1..d}` and the groups they generate.
//!
//! Points are 0-based inside the crate and 1-based in cycle notation; the
//! parser and printer are the only places that translate between the two.
//!
//! Composition follows one fixed convention everywhere: `a.compose(&b)` is
//! the map `i -> a(b(i))`, so the right factor acts first.

mod group;

pub use group::{GeneratedGroup, Transitivity};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("images do not form a bijection of 1..{0}")]
    NotBijection(usize),
    #[error("repeated point {0} in cycle notation")]
    RepeatedPoint(usize),
    #[error("point {point} out of range 1..{degree}")]
    OutOfRange { point: usize, degree: usize },
    #[error("malformed cycle notation at byte {pos}: {msg}")]
    Malformed { pos: usize, msg: &'static str },
    #[error("element {0} does not lie in the ambient group")]
    NotInGroup(String),
}

/// A bijection of `{0..d}` stored by its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &im in &images {
            let im = im as usize;
            if im >= d || seen[im] {
                return Err(PermError::NotBijection(d));
            }
            seen[im] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 1-based images, as written in one-line notation.
    pub fn from_one_based(images: &[usize]) -> Result<Self, PermError> {
        let v = images
            .iter()
            .map(|&i| {
                if i == 0 {
                    Err(PermError::NotBijection(images.len()))
                } else {
                    Ok((i - 1) as u32)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_images(v)
    }

    /// Builds a permutation from 0-based cycles. Panics on invalid input; use
    /// [`parse_cycles`] for untrusted text.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Self {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cyc in cycles {
            for k in 0..cyc.len() {
                images[cyc[k]] = cyc[(k + 1) % cyc.len()] as u32;
            }
        }
        Self::from_images(images).expect("cycles must be disjoint and in range")
    }

    /// The transposition swapping 0-based points `a` and `b`.
    pub fn transposition(degree: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        images.swap(a, b);
        Permutation { images }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| i == im as usize)
    }

    /// `i -> self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.compose_unchecked(other))
    }

    /// Composition for callers that have already fixed the degree.
    pub fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&i| self.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &im) in self.images.iter().enumerate() {
            inv[im as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, exp: usize) -> Permutation {
        let mut acc = Permutation::identity(self.degree());
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose_unchecked(&base);
            }
            base = base.compose_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// `self ∘ g ∘ self⁻¹`.
    pub fn conjugate(&self, g: &Permutation) -> Permutation {
        self.compose_unchecked(g).compose_unchecked(&self.inverse())
    }

    /// `[a, b] = a ∘ b ∘ a⁻¹ ∘ b⁻¹`.
    pub fn commutator(a: &Permutation, b: &Permutation) -> Permutation {
        a.compose_unchecked(b)
            .compose_unchecked(&a.inverse())
            .compose_unchecked(&b.inverse())
    }

    /// Disjoint cycles including fixed points, each starting at its least
    /// element, sorted by that element.
    pub fn cycles_with_fixed(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut p = self.apply(start);
            while p != start {
                seen[p] = true;
                cyc.push(p);
                p = self.apply(p);
            }
            out.push(cyc);
        }
        out
    }

    /// Nontrivial cycles only.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.cycles_with_fixed()
            .into_iter()
            .filter(|c| c.len() > 1)
            .collect()
    }

    /// Cycle lengths including fixed points, in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles_with_fixed().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    pub fn is_transposition(&self) -> bool {
        let moved = self
            .images
            .iter()
            .enumerate()
            .filter(|&(i, &im)| i != im as usize)
            .count();
        moved == 2
    }

    /// Sum over cycles of `(length - 1)`; the ramification contribution of a branch cycle.
    pub fn index(&self) -> usize {
        self.degree() - self.cycles_with_fixed().len()
    }

    pub fn is_even(&self) -> bool {
        self.index() % 2 == 0
    }

    /// Order of the element: lcm of its cycle lengths.
    pub fn order(&self) -> usize {
        self.cycles_with_fixed()
            .iter()
            .fold(1usize, |acc, c| num_integer::lcm(acc, c.len()))
    }

    /// Restriction to the points `keep` (in that order), relabeled `0..keep.len()`.
    /// The caller guarantees `keep` is invariant.
    pub fn restrict(&self, keep: &[usize]) -> Permutation {
        let mut index = vec![u32::MAX; self.degree()];
        for (k, &p) in keep.iter().enumerate() {
            index[p] = k as u32;
        }
        let images = keep
            .iter()
            .map(|&p| {
                let im = index[self.apply(p)];
                assert!(im != u32::MAX, "restriction to a non-invariant set");
                im
            })
            .collect();
        Permutation { images }
    }
}

impl fmt::Display for Permutation {
    /// Canonical cycle notation, 1-based, fixed points omitted; `id` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("id");
        }
        for c in cycles {
            f.write_str("(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[d={}]", self, self.degree())
    }
}

/// Parses `id` or a sequence of parenthesized cycles over `1..degree`.
///
/// Cycles may share no points with each other; whitespace is allowed
/// between tokens.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation, PermError> {
    let trimmed = text.trim();
    if trimmed == "id" {
        return Ok(Permutation::identity(degree));
    }
    let bytes = text.as_bytes();
    let mut images: Vec<u32> = (0..degree as u32).collect();
    let mut used = vec![false; degree];
    let mut pos = 0;
    let mut saw_cycle = false;

    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };

    loop {
        skip_ws(&mut pos);
        if pos >= bytes.len() {
            break;
        }
        if bytes[pos] != b'(' {
            return Err(PermError::Malformed {
                pos,
                msg: "expected '('",
            });
        }
        pos += 1;
        let mut cycle: Vec<usize> = Vec::new();
        loop {
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                return Err(PermError::Malformed {
                    pos,
                    msg: "unclosed '('",
                });
            }
            match bytes[pos] {
                b')' => {
                    pos += 1;
                    break;
                }
                b'0'..=b'9' => {
                    let start = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let n: usize = text[start..pos].parse().map_err(|_| PermError::Malformed {
                        pos: start,
                        msg: "integer too large",
                    })?;
                    if n == 0 || n > degree {
                        return Err(PermError::OutOfRange { point: n, degree });
                    }
                    if used[n - 1] {
                        return Err(PermError::RepeatedPoint(n));
                    }
                    used[n - 1] = true;
                    cycle.push(n - 1);
                }
                _ => {
                    return Err(PermError::Malformed {
                        pos,
                        msg: "expected integer or ')'",
                    })
                }
            }
        }
        if cycle.is_empty() {
            return Err(PermError::Malformed {
                pos: pos - 1,
                msg: "empty cycle",
            });
        }
        for k in 0..cycle.len() {
            images[cycle[k]] = cycle[(k + 1) % cycle.len()] as u32;
        }
        saw_cycle = true;
    }
    if !saw_cycle {
        return Err(PermError::Malformed {
            pos: 0,
            msg: "expected 'id' or a cycle",
        });
    }
    Ok(Permutation { images })
}

/// Parses a degree-tagged permutation; degree is inferred from the largest point.
impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let max = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(1);
        parse_cycles(s, max.max(1))
    }
}

/// All permutations of `{0..degree}` in lexicographic order of image lists.
pub fn all_permutations(degree: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut current: Vec<u32> = (0..degree as u32).collect();
    loop {
        out.push(Permutation {
            images: current.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (1..current.len()).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..current.len())
            .rev()
            .find(|&j| current[j] > current[i - 1])
            .unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// `n!` as `u128`; panics past 34!.
pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, d: usize) -> Permutation {
        parse_cycles(s, d).unwrap()
    }

    #[test]
    fn compose_involution_and_identity() {
        let t = p("(1 2)", 4);
        assert!(t.compose(&t).unwrap().is_identity());
        let a = p("(1 2 3 4)", 4);
        assert_eq!(a.compose(&Permutation::identity(4)).unwrap(), a);
    }

    #[test]
    fn compose_right_factor_first() {
        // i -> a(b(i)) evaluated by hand: 1->3->4, 2->2->3, 3->1->2, 4->4->1
        let a = p("(1 2 3 4)", 4);
        let b = p("(1 3)", 4);
        let c = a.compose(&b).unwrap();
        assert_eq!(c.to_string(), "(1 4)(2 3)");
    }

    #[test]
    fn compose_degree_mismatch() {
        let e = Permutation::identity(3).compose(&Permutation::identity(4));
        assert_eq!(e, Err(PermError::DegreeMismatch(3, 4)));
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("(1 2)(3 4)", 4).images(), &[1, 0, 3, 2]);
        assert!(p("id", 3).is_identity());
        assert_eq!(p("id", 3).degree(), 3);
        assert_eq!(parse_cycles("(1 2 2)", 3), Err(PermError::RepeatedPoint(2)));
        assert_eq!(
            parse_cycles("(1 5)", 4),
            Err(PermError::OutOfRange { point: 5, degree: 4 })
        );
        assert!(matches!(
            parse_cycles("(1 2", 4),
            Err(PermError::Malformed { .. })
        ));
        assert!(matches!(
            parse_cycles("1 2)", 4),
            Err(PermError::Malformed { .. })
        ));
        assert!(matches!(parse_cycles("()", 4), Err(PermError::Malformed { .. })));
        assert!(matches!(parse_cycles("", 4), Err(PermError::Malformed { .. })));
        assert!(matches!(parse_cycles("(1 -2)", 4), Err(PermError::Malformed { .. })));
        assert_eq!(
            parse_cycles("(1 2)(2 3)", 4),
            Err(PermError::RepeatedPoint(2))
        );
    }

    #[test]
    fn printer_is_canonical() {
        assert_eq!(p("(3 1 2)", 3).to_string(), "(1 2 3)");
        assert_eq!(p("(4 3)(2 1)", 4).to_string(), "(1 2)(3 4)");
        assert_eq!(p("(1)(2)", 4).to_string(), "id");
    }

    #[test]
    fn cycle_data() {
        let g = p("(1 2 3)(4 5)", 6);
        assert_eq!(g.cycle_type(), vec![3, 2, 1]);
        assert_eq!(g.index(), 3);
        assert_eq!(g.order(), 6);
        assert!(!g.is_even());
        assert!(p("(2 5)", 6).is_transposition());
        assert!(!g.is_transposition());
        assert_eq!(g.pow(6), Permutation::identity(6));
        assert_eq!(g.pow(5), g.inverse());
    }

    #[test]
    fn all_permutations_counts() {
        assert_eq!(all_permutations(0).len(), 1);
        assert_eq!(all_permutations(4).len(), 24);
        let v = all_permutations(3);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn restrict_relabels() {
        let g = p("(2 3)", 3);
        let r = g.restrict(&[1, 2]);
        assert_eq!(r.to_string(), "(1 2)");
    }
}
