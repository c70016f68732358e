//! The permutation model of a finite cover `f : Y -> X` of curves.
//!
//! A cover of degree `d` over a base of genus `g` is given by handle pairs
//! `(α_i, β_i)` and branch cycles `c_1..c_r` in `S_d` satisfying
//! `[α_1,β_1]⋯[α_g,β_g]·c_1⋯c_r = id` and generating a transitive group.
//! Cycle lengths of `c_j` are the ramification indices over the `j`-th
//! branch point (tame model).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{parse_cycles, GeneratedGroup, PermError, Permutation};

/// One failed admission check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ZeroDegree,
    DegreeMismatch { element: String, degree: usize },
    HandleCount { base_genus: usize, handles: usize },
    LabelCount { labels: usize, branch_points: usize },
    IdentityBranchCycle { index: usize },
    RelationFails { product: String },
    Intransitive { orbits: usize },
    InconsistentGenus { euler_sum: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDegree => write!(f, "degree must be positive"),
            Violation::DegreeMismatch { element, degree } => {
                write!(f, "{element} does not have degree {degree}")
            }
            Violation::HandleCount {
                base_genus,
                handles,
            } => write!(f, "base genus {base_genus} needs {base_genus} handle pairs, got {handles}"),
            Violation::LabelCount {
                labels,
                branch_points,
            } => write!(f, "{labels} labels for {branch_points} branch points"),
            Violation::IdentityBranchCycle { index } => {
                write!(f, "branch cycle {} is the identity", index + 1)
            }
            Violation::RelationFails { product } => {
                write!(f, "surface relation fails: product is {product}")
            }
            Violation::Intransitive { orbits } => {
                write!(f, "monodromy group is intransitive ({orbits} orbits)")
            }
            Violation::InconsistentGenus { euler_sum } => {
                write!(f, "Riemann-Hurwitz gives 2g-2 = {euler_sum}, not a valid genus")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("invalid cover: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("cover file: {0}")]
    Format(String),
}

/// Combinatorial data of a branched cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchedCover {
    degree: usize,
    base_genus: usize,
    handles: Vec<(Permutation, Permutation)>,
    branch_cycles: Vec<Permutation>,
    labels: Option<Vec<String>>,
}

/// Summary of a validated cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub valid: bool,
    pub degree: usize,
    pub base_genus: usize,
    pub branch_points: usize,
    pub total_space_genus: u64,
    pub monodromy_order: u128,
    pub is_morse: bool,
    pub is_galois: bool,
    pub is_connected: bool,
}

impl BranchedCover {
    /// Stores the data as given; call [`BranchedCover::validate`] to check it.
    pub fn new(
        degree: usize,
        base_genus: usize,
        handles: Vec<(Permutation, Permutation)>,
        branch_cycles: Vec<Permutation>,
    ) -> Self {
        BranchedCover {
            degree,
            base_genus,
            handles,
            branch_cycles,
            labels: None,
        }
    }

    /// Genus-0 cover from cycle strings; panics on malformed text.
    pub fn genus_zero(degree: usize, cycles: &[&str]) -> Self {
        let cycles = cycles
            .iter()
            .map(|s| parse_cycles(s, degree).expect("valid cycle notation"))
            .collect();
        Self::new(degree, 0, Vec::new(), cycles)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base_genus(&self) -> usize {
        self.base_genus
    }

    pub fn handles(&self) -> &[(Permutation, Permutation)] {
        &self.handles
    }

    pub fn branch_cycles(&self) -> &[Permutation] {
        &self.branch_cycles
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    fn all_elements(&self) -> impl Iterator<Item = &Permutation> {
        self.handles
            .iter()
            .flat_map(|(a, b)| [a, b])
            .chain(self.branch_cycles.iter())
    }

    /// `[α_1,β_1]⋯[α_g,β_g]·c_1⋯c_r`.
    pub fn relation_product(&self) -> Permutation {
        let mut acc = Permutation::identity(self.degree);
        for (a, b) in &self.handles {
            acc = acc.compose_unchecked(&Permutation::commutator(a, b));
        }
        for c in &self.branch_cycles {
            acc = acc.compose_unchecked(c);
        }
        acc
    }

    /// Every violated invariant, in a fixed order.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.degree == 0 {
            out.push(Violation::ZeroDegree);
            return out;
        }
        let mut degrees_ok = true;
        for g in self.all_elements() {
            if g.degree() != self.degree {
                degrees_ok = false;
                out.push(Violation::DegreeMismatch {
                    element: g.to_string(),
                    degree: self.degree,
                });
            }
        }
        if self.handles.len() != self.base_genus {
            out.push(Violation::HandleCount {
                base_genus: self.base_genus,
                handles: self.handles.len(),
            });
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.branch_cycles.len() {
                out.push(Violation::LabelCount {
                    labels: labels.len(),
                    branch_points: self.branch_cycles.len(),
                });
            }
        }
        for (index, c) in self.branch_cycles.iter().enumerate() {
            if c.is_identity() {
                out.push(Violation::IdentityBranchCycle { index });
            }
        }
        if !degrees_ok {
            return out;
        }
        let product = self.relation_product();
        if !product.is_identity() {
            out.push(Violation::RelationFails {
                product: product.to_string(),
            });
        }
        let group = self.group_unchecked();
        if !group.is_transitive() {
            out.push(Violation::Intransitive {
                orbits: group.orbits().len(),
            });
        }
        let euler = self.euler_sum();
        if euler < -2 || euler % 2 != 0 {
            out.push(Violation::InconsistentGenus { euler_sum: euler });
        }
        out
    }

    pub fn validate(&self) -> Result<CoverReport, CoverError> {
        let v = self.violations();
        if !v.is_empty() {
            return Err(CoverError::Invalid(v));
        }
        let group = self.group_unchecked();
        let order = group.order();
        Ok(CoverReport {
            valid: true,
            degree: self.degree,
            base_genus: self.base_genus,
            branch_points: self.branch_cycles.len(),
            total_space_genus: ((self.euler_sum() + 2) / 2) as u64,
            monodromy_order: order,
            is_morse: self.is_morse(),
            is_galois: order == self.degree as u128,
            is_connected: group.is_transitive(),
        })
    }

    fn group_unchecked(&self) -> GeneratedGroup {
        let gens = self.all_elements().filter(|g| !g.is_identity()).cloned().collect();
        GeneratedGroup::new(self.degree, gens).expect("degrees checked")
    }

    /// The group generated by all handles and branch cycles.
    pub fn monodromy_group(&self) -> Result<GeneratedGroup, CoverError> {
        let v = self.violations();
        if !v.is_empty() {
            return Err(CoverError::Invalid(v));
        }
        Ok(self.group_unchecked())
    }

    /// `2g_Y - 2 = d(2g - 2) + Σ_j index(c_j)`.
    pub fn euler_sum(&self) -> i64 {
        let d = self.degree as i64;
        let ramification: i64 = self.branch_cycles.iter().map(|c| c.index() as i64).sum();
        d * (2 * self.base_genus as i64 - 2) + ramification
    }

    /// Genus of the total space by Riemann–Hurwitz; fails loudly when the
    /// data cannot come from a cover.
    pub fn total_space_genus(&self) -> Result<u64, CoverError> {
        let e = self.euler_sum();
        if e < -2 || e % 2 != 0 {
            return Err(CoverError::Invalid(vec![Violation::InconsistentGenus { euler_sum: e }]));
        }
        Ok(((e + 2) / 2) as u64)
    }

    /// Every branch cycle is a single transposition.
    pub fn is_morse(&self) -> bool {
        self.branch_cycles.iter().all(Permutation::is_transposition)
    }

    pub fn is_galois(&self) -> Result<bool, CoverError> {
        Ok(self.monodromy_group()?.order() == self.degree as u128)
    }

    /// Relabels the fiber: every element `x` becomes `σ ∘ x ∘ σ⁻¹`.
    pub fn conjugated_by(&self, sigma: &Permutation) -> BranchedCover {
        BranchedCover {
            degree: self.degree,
            base_genus: self.base_genus,
            handles: self
                .handles
                .iter()
                .map(|(a, b)| (sigma.conjugate(a), sigma.conjugate(b)))
                .collect(),
            branch_cycles: self.branch_cycles.iter().map(|c| sigma.conjugate(c)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Flat image sequence of all elements, handles first.
    pub fn image_sequence(&self) -> Vec<u32> {
        self.all_elements()
            .flat_map(|g| g.images().iter().copied())
            .collect()
    }

    pub fn to_file(&self) -> CoverFile {
        CoverFile {
            degree: self.degree,
            base_genus: self.base_genus,
            handles: self
                .handles
                .iter()
                .map(|(a, b)| [a.to_string(), b.to_string()])
                .collect(),
            branch_cycles: self.branch_cycles.iter().map(|c| c.to_string()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("cover file serializes")
    }

    pub fn from_json(text: &str) -> Result<BranchedCover, CoverError> {
        let file: CoverFile =
            serde_json::from_str(text).map_err(|e| CoverError::Format(e.to_string()))?;
        file.into_cover()
    }
}

/// On-disk form of a cover. Unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverFile {
    pub degree: usize,
    pub base_genus: usize,
    pub handles: Vec<[String; 2]>,
    pub branch_cycles: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl CoverFile {
    pub fn into_cover(self) -> Result<BranchedCover, CoverError> {
        if self.degree == 0 {
            return Err(CoverError::Invalid(vec![Violation::ZeroDegree]));
        }
        let d = self.degree;
        let handles = self
            .handles
            .iter()
            .map(|[a, b]| Ok((parse_cycles(a, d)?, parse_cycles(b, d)?)))
            .collect::<Result<Vec<_>, PermError>>()?;
        let branch_cycles = self
            .branch_cycles
            .iter()
            .map(|c| parse_cycles(c, d))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BranchedCover {
            degree: d,
            base_genus: self.base_genus,
            handles,
            branch_cycles,
            labels: self.labels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d4() -> BranchedCover {
        BranchedCover::genus_zero(4, &["(1 2 3 4)", "(1 3)", "(1 4)(2 3)"])
    }

    fn trefoil() -> BranchedCover {
        BranchedCover::genus_zero(3, &["(1 2)", "(2 3)", "(1 3 2)"])
    }

    #[test]
    fn validate_examples() {
        assert!(BranchedCover::genus_zero(2, &["(1 2)", "(1 2)"]).validate().is_ok());
        let bad = BranchedCover::genus_zero(3, &["(1 2)", "(2 3)"]).validate();
        assert!(matches!(bad, Err(CoverError::Invalid(v)) if v.iter().any(|x| matches!(x, Violation::RelationFails { .. }))));
        let r = d4().validate().unwrap();
        assert_eq!(r.monodromy_order, 8);
        assert!(!r.is_galois);
    }

    #[test]
    fn reports_every_violation() {
        // identity branch cycle, relation failure and intransitivity together
        let c = BranchedCover::genus_zero(4, &["(1 2)", "id", "(3 4)"]);
        let v = c.violations();
        assert!(v.contains(&Violation::IdentityBranchCycle { index: 1 }));
        assert!(v.iter().any(|x| matches!(x, Violation::RelationFails { .. })));
        assert!(v.contains(&Violation::Intransitive { orbits: 2 }));

        let wrong = BranchedCover::new(
            3,
            1,
            vec![],
            vec![parse_cycles("(1 2)", 2).unwrap(), parse_cycles("(1 2)", 3).unwrap()],
        );
        let v = wrong.violations();
        assert!(v.iter().any(|x| matches!(x, Violation::DegreeMismatch { .. })));
        assert!(v.contains(&Violation::HandleCount {
            base_genus: 1,
            handles: 0
        }));
    }

    #[test]
    fn monodromy_groups() {
        let hyper = BranchedCover::genus_zero(2, &["(1 2)"; 6]);
        assert_eq!(hyper.monodromy_group().unwrap().order(), 2);
        assert_eq!(trefoil().monodromy_group().unwrap().order(), 6);
        assert_eq!(d4().monodromy_group().unwrap().order(), 8);
    }

    #[test]
    fn genus_examples() {
        assert_eq!(
            BranchedCover::genus_zero(2, &["(1 2)"; 6]).total_space_genus().unwrap(),
            2
        );
        assert_eq!(trefoil().total_space_genus().unwrap(), 0);
        let a = parse_cycles("(1 2)", 2).unwrap();
        let etale = BranchedCover::new(2, 1, vec![(a, Permutation::identity(2))], vec![]);
        assert!(etale.validate().is_ok());
        assert_eq!(etale.total_space_genus().unwrap(), 1);
        let trivial = BranchedCover::new(1, 3, vec![(Permutation::identity(1), Permutation::identity(1)); 3], vec![]);
        assert_eq!(trivial.total_space_genus().unwrap(), 3);
    }

    #[test]
    fn genus_rejects_inconsistent_data() {
        let c = BranchedCover::genus_zero(3, &["(1 2)"]);
        assert!(matches!(
            c.total_space_genus(),
            Err(CoverError::Invalid(v)) if v == vec![Violation::InconsistentGenus { euler_sum: -5 }]
        ));
    }

    #[test]
    fn predicates() {
        assert!(trefoil().branch_cycles()[..2].iter().all(Permutation::is_transposition));
        assert!(!trefoil().is_morse());
        assert!(BranchedCover::genus_zero(3, &["(1 2)", "(1 2)", "(2 3)", "(2 3)"]).is_morse());
        assert!(!BranchedCover::genus_zero(4, &["(1 2)(3 4)"]).is_morse());
        assert!(BranchedCover::genus_zero(2, &["(1 2)", "(1 2)"]).is_galois().unwrap());
        assert!(!d4().is_galois().unwrap());
        assert!(BranchedCover::genus_zero(3, &["(1 2 3)", "(1 3 2)"]).is_galois().unwrap());
    }

    #[test]
    fn file_round_trip_and_strictness() {
        let c = d4().with_labels(vec!["a".into(), "b".into(), "c".into()]);
        let back = BranchedCover::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let extra = r#"{"degree":2,"base_genus":0,"handles":[],"branch_cycles":["(1 2)","(1 2)"],"colour":1}"#;
        assert!(matches!(BranchedCover::from_json(extra), Err(CoverError::Format(_))));
        let bad_cycle = r#"{"degree":2,"base_genus":0,"handles":[],"branch_cycles":["(1 3)"]}"#;
        assert!(matches!(BranchedCover::from_json(bad_cycle), Err(CoverError::Perm(_))));
        let g1 = r#"{"degree":2,"base_genus":1,"handles":[["(1 2)","id"]],"branch_cycles":[]}"#;
        assert!(BranchedCover::from_json(g1).unwrap().validate().is_ok());
    }
}
