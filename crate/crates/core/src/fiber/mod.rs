//! The fiber product `Y ×_X Y` of a cover with itself, read off the
//! permutation model.
//!
//! Irreducible components are the orbitals of the monodromy group `G`
//! (its orbits on ordered pairs of fiber points); the diagonal orbital is
//! `Δ ≅ Y`. Over a branch point with branch cycle `c`, each pair of cycles
//! `(κ, κ')` of `c` is one point of the fiber product, and the `⟨c⟩`-orbits
//! on `κ × κ'` are its local branches: `gcd(e, e')` of them, each of size
//! `lcm(e, e')`. Two components meet exactly when some point carries
//! branches of both.

mod derived;
mod oracle;

pub use derived::{DerivedCover, LocalInertia};
pub use oracle::{OracleReport, DEFAULT_ORDER_CAP};

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::cover::{BranchedCover, CoverError};
use crate::graphs::{Connectivity, Graph};
use crate::perm::{factorial, GeneratedGroup, Permutation, Transitivity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiberError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error("unknown orbital {0}")]
    UnknownOrbital(usize),
    #[error("operation needs degree at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("monodromy group of order {order} exceeds the oracle cap {cap}")]
    OrderCapExceeded { order: u128, cap: u128 },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

/// An irreducible component of `Y ×_X Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbital {
    pub id: usize,
    /// Least pair in the orbital, 1-based.
    pub representative: [usize; 2],
    pub size: usize,
    pub is_diagonal: bool,
}

/// One ⟨c⟩-orbit on `κ × κ'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalBranch {
    pub orbital: usize,
    pub size: usize,
}

/// A point of `Y ×_X Y` over a branch point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemePoint {
    /// 1-based branch point index.
    pub branch_point: usize,
    /// The two cycles of the branch cycle, 1-based points.
    pub cycles: [Vec<usize>; 2],
    pub branches: Vec<LocalBranch>,
}

/// Verdict of the `HN = G` test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenuineRamification {
    pub genuinely_ramified: bool,
    /// `[G : HN]`, the degree of the maximal étale subcover.
    pub etale_subcover_degree: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SdCertificate {
    pub degree: usize,
    pub orbital_count: usize,
    pub offdiag_closure_connected: bool,
    pub transposition: String,
    pub group_order: u128,
    pub steps: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum SdRefusal {
    DegreeBelowTwo,
    NotMorse { branch_point: usize, cycle: String },
    NotGenuinelyRamified { etale_subcover_degree: u128 },
}

impl std::fmt::Display for SdRefusal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SdRefusal::DegreeBelowTwo => write!(f, "degree below 2"),
            SdRefusal::NotMorse {
                branch_point,
                cycle,
            } => write!(f, "not Morse: branch cycle {branch_point} is {cycle}"),
            SdRefusal::NotGenuinelyRamified {
                etale_subcover_degree,
            } => write!(
                f,
                "not genuinely ramified: étale subcover of degree {etale_subcover_degree}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SdOutcome {
    Certified(SdCertificate),
    Refused(SdRefusal),
}

/// Everything the fiber analysis knows about one cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub degree: usize,
    pub orbitals: Vec<Orbital>,
    pub scheme_points: Vec<SchemePoint>,
    pub dual_graph_vertices: Vec<String>,
    pub dual_graph_edges: Vec<[usize; 2]>,
    pub fiber_connected: Connectivity,
    pub offdiag_closure_connected: Connectivity,
    pub offdiag_irreducible: bool,
    pub transitivity: Transitivity,
    pub genuinely_ramified: bool,
    pub etale_subcover_degree: u128,
    pub galois_closure_order: u128,
    pub sd_certificate: SdOutcome,
}

/// A validated cover together with its monodromy group and orbitals.
#[derive(Debug, Clone)]
pub struct FiberAnalysis<'a> {
    cover: &'a BranchedCover,
    group: GeneratedGroup,
    orbitals: Vec<Orbital>,
    /// orbital id of pair `i * d + j`
    pair_orbital: Vec<usize>,
    orbital_members: Vec<Vec<usize>>,
}

impl<'a> FiberAnalysis<'a> {
    pub fn new(cover: &'a BranchedCover) -> Result<Self, FiberError> {
        let group = cover.monodromy_group()?;
        let d = cover.degree();
        let members = group.orbits_on_pairs();
        let mut pair_orbital = vec![0; d * d];
        let orbitals = members
            .iter()
            .enumerate()
            .map(|(id, m)| {
                for &x in m {
                    pair_orbital[x] = id;
                }
                Orbital {
                    id,
                    representative: [m[0] / d + 1, m[0] % d + 1],
                    size: m.len(),
                    is_diagonal: m[0] == 0,
                }
            })
            .collect();
        Ok(FiberAnalysis {
            cover,
            group,
            orbitals,
            pair_orbital,
            orbital_members: members,
        })
    }

    pub fn cover(&self) -> &BranchedCover {
        self.cover
    }

    pub fn group(&self) -> &GeneratedGroup {
        &self.group
    }

    pub fn orbitals(&self) -> &[Orbital] {
        &self.orbitals
    }

    /// Orbital containing the 0-based pair `(i, j)`.
    pub fn orbital_of(&self, i: usize, j: usize) -> usize {
        self.pair_orbital[i * self.cover.degree() + j]
    }

    /// Points over every branch point, in branch order then cycle order.
    pub fn scheme_points(&self) -> Vec<SchemePoint> {
        let mut out = Vec::new();
        for (j, c) in self.cover.branch_cycles().iter().enumerate() {
            let cycles = c.cycles_with_fixed();
            for k1 in &cycles {
                for k2 in &cycles {
                    out.push(SchemePoint {
                        branch_point: j + 1,
                        cycles: [one_based(k1), one_based(k2)],
                        branches: self.local_branches(c, k1, k2),
                    });
                }
            }
        }
        out
    }

    fn local_branches(&self, c: &Permutation, k1: &[usize], k2: &[usize]) -> Vec<LocalBranch> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for &a in k1 {
            for &b in k2 {
                if seen.contains(&(a, b)) {
                    continue;
                }
                let (mut x, mut y) = (a, b);
                let mut size = 0;
                loop {
                    seen.insert((x, y));
                    size += 1;
                    x = c.apply(x);
                    y = c.apply(y);
                    if (x, y) == (a, b) {
                        break;
                    }
                }
                out.push(LocalBranch {
                    orbital: self.orbital_of(a, b),
                    size,
                });
            }
        }
        debug_assert_eq!(out.len(), k1.len().gcd(&k2.len()));
        out
    }

    /// The dual graph on orbitals. Vertex `k` is orbital `k`.
    pub fn dual_graph(&self) -> Graph {
        let mut g = Graph::new(self.orbitals.iter().map(orbital_label).collect())
            .expect("orbital labels are unique");
        for p in self.scheme_points() {
            for (i, a) in p.branches.iter().enumerate() {
                for b in &p.branches[i + 1..] {
                    g.add_edge(a.orbital, b.orbital).unwrap();
                }
            }
        }
        g
    }

    /// `HN = G` with `H` the stabilizer of the first point and `N` the
    /// normal closure of the branch cycles.
    pub fn genuinely_ramified(&self) -> GenuineRamification {
        let h = self.group.point_stabilizer(0);
        let n = self
            .group
            .normal_closure(self.cover.branch_cycles())
            .expect("branch cycles lie in the monodromy group");
        let hn = h.join(&n).expect("same degree");
        let index = self.group.order() / hn.order();
        GenuineRamification {
            genuinely_ramified: index == 1,
            etale_subcover_degree: index,
        }
    }

    /// Connectivity of the dual graph with the diagonal vertex removed.
    /// With `d = 1` there is nothing off the diagonal and the answer is
    /// reported as [`Connectivity::Vacuous`].
    pub fn offdiag_closure_connected(&self) -> Connectivity {
        self.dual_graph()
            .delete_vertex(0)
            .expect("diagonal orbital is vertex 0")
            .is_connected()
    }

    pub fn galois_closure_order(&self) -> u128 {
        self.group.order()
    }

    /// Certifies that a genuinely ramified Morse cover has monodromy `S_d`,
    /// checking each intermediate step. A failed step is an invariant
    /// violation, not a refusal.
    pub fn certify_sd(&self) -> Result<SdOutcome, FiberError> {
        let d = self.cover.degree();
        if d < 2 {
            return Ok(SdOutcome::Refused(SdRefusal::DegreeBelowTwo));
        }
        if let Some((j, c)) = self
            .cover
            .branch_cycles()
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_transposition())
        {
            return Ok(SdOutcome::Refused(SdRefusal::NotMorse {
                branch_point: j + 1,
                cycle: c.to_string(),
            }));
        }
        let gr = self.genuinely_ramified();
        if !gr.genuinely_ramified {
            return Ok(SdOutcome::Refused(SdRefusal::NotGenuinelyRamified {
                etale_subcover_degree: gr.etale_subcover_degree,
            }));
        }
        let mut steps = vec![
            "every branch cycle is a transposition (Morse)".to_string(),
            "HN = G (genuinely ramified)".to_string(),
        ];

        let offdiag = self.offdiag_closure_connected();
        if !offdiag.holds() {
            return Err(self.violation("off-diagonal closure is disconnected"));
        }
        steps.push("off-diagonal closure of the fiber product is connected".into());

        let orbital_count = self.orbitals.len();
        if orbital_count != 2 {
            return Err(self.violation(&format!(
                "Morse and connected off-diagonal part but {orbital_count} orbitals"
            )));
        }
        if self.group.transitivity() != Transitivity::TwoTransitive {
            return Err(self.violation("two orbitals but group not two-transitive"));
        }
        steps.push("off-diagonal part is irreducible: G is two-transitive".into());

        let transposition = self
            .cover
            .branch_cycles()
            .iter()
            .find(|c| c.is_transposition())
            .ok_or_else(|| self.violation("no transposition among branch cycles"))?
            .to_string();
        steps.push(format!("G contains the transposition {transposition}"));

        let order = self.group.order();
        if order != factorial(d) {
            return Err(self.violation(&format!("group order {order} is not {d}!")));
        }
        steps.push(format!("|G| = {order} = {d}!"));

        Ok(SdOutcome::Certified(SdCertificate {
            degree: d,
            orbital_count,
            offdiag_closure_connected: offdiag.holds(),
            transposition,
            group_order: order,
            steps,
        }))
    }

    fn violation(&self, what: &str) -> FiberError {
        FiberError::InvariantViolation(format!("{what}; cover: {}", self.cover.to_file_compact()))
    }

    /// The component of `Y ×_X Y` given by orbital `id`, as a cover of `X`
    /// of degree `|orbital|`. Pairs are relabeled `1..` in increasing order.
    pub fn component_cover(&self, id: usize) -> Result<BranchedCover, FiberError> {
        let members = self
            .orbital_members
            .get(id)
            .ok_or(FiberError::UnknownOrbital(id))?;
        let d = self.cover.degree();
        let mut index = vec![usize::MAX; d * d];
        for (k, &x) in members.iter().enumerate() {
            index[x] = k;
        }
        let induce = |g: &Permutation| {
            let images = members
                .iter()
                .map(|&x| {
                    let y = g.apply(x / d) * d + g.apply(x % d);
                    index[y] as u32
                })
                .collect();
            Permutation::from_images(images).expect("orbital is invariant")
        };
        let handles = self
            .cover
            .handles()
            .iter()
            .map(|(a, b)| (induce(a), induce(b)))
            .collect();
        let cycles = self.cover.branch_cycles().iter().map(induce).collect();
        let mut comp = BranchedCover::new(members.len(), self.cover.base_genus(), handles, cycles);
        if let Some(l) = self.cover.labels() {
            comp = comp.with_labels(l.to_vec());
        }
        comp.validate()?;
        Ok(comp)
    }

    /// Genus of `Y'` computed over `X`, when `Y'` is a single orbital.
    pub fn offdiag_genus_over_base(&self) -> Result<Option<u64>, FiberError> {
        if self.orbitals.len() != 2 {
            return Ok(None);
        }
        Ok(Some(self.component_cover(1)?.total_space_genus()?))
    }

    pub fn derived_cover(&self) -> Result<DerivedCover, FiberError> {
        DerivedCover::build(self)
    }

    pub fn cayley_quotient_oracle(&self, order_cap: u128) -> Result<OracleReport, FiberError> {
        oracle::run(self, order_cap)
    }

    pub fn report(&self) -> Result<FiberReport, FiberError> {
        let graph = self.dual_graph();
        let gr = self.genuinely_ramified();
        let d = self.cover.degree();
        Ok(FiberReport {
            degree: d,
            orbitals: self.orbitals.clone(),
            scheme_points: self.scheme_points(),
            dual_graph_vertices: graph.labels().to_vec(),
            dual_graph_edges: graph.edges().map(|(a, b)| [a, b]).collect(),
            fiber_connected: graph.is_connected(),
            offdiag_closure_connected: self.offdiag_closure_connected(),
            offdiag_irreducible: d >= 2 && self.orbitals.len() == 2,
            transitivity: self.group.transitivity(),
            genuinely_ramified: gr.genuinely_ramified,
            etale_subcover_degree: gr.etale_subcover_degree,
            galois_closure_order: self.galois_closure_order(),
            sd_certificate: self.certify_sd()?,
        })
    }
}

fn one_based(c: &[usize]) -> Vec<usize> {
    c.iter().map(|p| p + 1).collect()
}

fn orbital_label(o: &Orbital) -> String {
    if o.is_diagonal {
        format!("O{}:diag", o.id)
    } else {
        format!("O{}:({},{})", o.id, o.representative[0], o.representative[1])
    }
}

impl BranchedCover {
    /// Single-line JSON, used to attach offending covers to error messages.
    pub fn to_file_compact(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("cover file serializes")
    }
}

/// Convenience wrappers for one-off queries.
pub fn orbitals(cover: &BranchedCover) -> Result<Vec<Orbital>, FiberError> {
    Ok(FiberAnalysis::new(cover)?.orbitals().to_vec())
}

pub fn dual_graph(cover: &BranchedCover) -> Result<Graph, FiberError> {
    Ok(FiberAnalysis::new(cover)?.dual_graph())
}

pub fn genuinely_ramified(cover: &BranchedCover) -> Result<GenuineRamification, FiberError> {
    Ok(FiberAnalysis::new(cover)?.genuinely_ramified())
}

pub fn certify_sd(cover: &BranchedCover) -> Result<SdOutcome, FiberError> {
    FiberAnalysis::new(cover)?.certify_sd()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_cycles;

    fn d4() -> BranchedCover {
        BranchedCover::genus_zero(4, &["(1 2 3 4)", "(1 3)", "(1 4)(2 3)"])
    }

    fn trefoil() -> BranchedCover {
        BranchedCover::genus_zero(3, &["(1 2)", "(2 3)", "(1 3 2)"])
    }

    fn morse_s3() -> BranchedCover {
        BranchedCover::genus_zero(3, &["(1 2)", "(1 2)", "(2 3)", "(2 3)"])
    }

    fn etale_double() -> BranchedCover {
        let a = parse_cycles("(1 2)", 2).unwrap();
        BranchedCover::new(2, 1, vec![(a, Permutation::identity(2))], vec![])
    }

    #[test]
    fn orbital_examples() {
        let c = trefoil();
        let f = FiberAnalysis::new(&c).unwrap();
        assert_eq!(f.orbitals().len(), 2);
        let c = d4();
        let f = FiberAnalysis::new(&c).unwrap();
        let sizes: Vec<usize> = f.orbitals().iter().map(|o| o.size).collect();
        assert_eq!(sizes, vec![4, 8, 4]);
        assert!(f.orbitals()[0].is_diagonal);
        assert_eq!(f.orbitals()[2].representative, [1, 3]);
        let one = BranchedCover::new(1, 0, vec![], vec![]);
        assert_eq!(orbitals(&one).unwrap().len(), 1);
    }

    #[test]
    fn scheme_points_transposition() {
        let c = BranchedCover::genus_zero(3, &["(1 2)", "(1 2)"].map(|s| s));
        // intransitive, so build a transitive one containing (1 2)
        assert!(c.validate().is_err());
        let c = morse_s3();
        let f = FiberAnalysis::new(&c).unwrap();
        let pts = f.scheme_points();
        // over branch point 1: cycles (1 2) and (3): 4 points
        let over1: Vec<_> = pts.iter().filter(|p| p.branch_point == 1).collect();
        assert_eq!(over1.len(), 4);
        let mixed = over1
            .iter()
            .find(|p| p.cycles == [vec![1, 2], vec![3]])
            .unwrap();
        assert_eq!(mixed.branches, vec![LocalBranch { orbital: 1, size: 2 }]);
        let double = over1
            .iter()
            .find(|p| p.cycles == [vec![1, 2], vec![1, 2]])
            .unwrap();
        assert_eq!(
            double.branches,
            vec![
                LocalBranch { orbital: 0, size: 2 },
                LocalBranch { orbital: 1, size: 2 }
            ]
        );
    }

    #[test]
    fn scheme_points_four_cycle() {
        let c = d4();
        let f = FiberAnalysis::new(&c).unwrap();
        let p = f
            .scheme_points()
            .into_iter()
            .find(|p| p.branch_point == 1)
            .unwrap();
        assert_eq!(p.branches.len(), 4);
        assert!(p.branches.iter().all(|b| b.size == 4));
        let mut orbs: Vec<usize> = p.branches.iter().map(|b| b.orbital).collect();
        orbs.sort();
        assert_eq!(orbs, vec![0, 1, 1, 2]);
    }

    #[test]
    fn dual_graph_examples() {
        let h = BranchedCover::genus_zero(2, &["(1 2)", "(1 2)"]);
        let g = dual_graph(&h).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let g = dual_graph(&d4()).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        let g = dual_graph(&etale_double()).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn genuine_ramification_examples() {
        for c in [trefoil(), d4(), morse_s3()] {
            assert!(genuinely_ramified(&c).unwrap().genuinely_ramified);
        }
        let e = genuinely_ramified(&etale_double()).unwrap();
        assert!(!e.genuinely_ramified);
        assert_eq!(e.etale_subcover_degree, 2);
        let t = parse_cycles("(1 2)", 2).unwrap();
        let id = Permutation::identity(2);
        let c = BranchedCover::new(2, 1, vec![(id.clone(), id)], vec![t.clone(), t]);
        assert!(genuinely_ramified(&c).unwrap().genuinely_ramified);
    }

    #[test]
    fn offdiag_examples() {
        let c = trefoil();
        assert_eq!(
            FiberAnalysis::new(&c).unwrap().offdiag_closure_connected(),
            Connectivity::Connected
        );
        let c = d4();
        assert_eq!(
            FiberAnalysis::new(&c).unwrap().offdiag_closure_connected(),
            Connectivity::Connected
        );
        let c = etale_double();
        assert_eq!(
            FiberAnalysis::new(&c).unwrap().offdiag_closure_connected(),
            Connectivity::Connected,
            "single off-diagonal vertex"
        );
        let c = BranchedCover::new(1, 0, vec![], vec![]);
        assert_eq!(
            FiberAnalysis::new(&c).unwrap().offdiag_closure_connected(),
            Connectivity::Vacuous
        );
    }

    #[test]
    fn etale_degree_three_offdiag_disconnected() {
        // cyclic étale triple cover of an elliptic curve: orbitals {Δ, O1, O2}, no edges
        let a = parse_cycles("(1 2 3)", 3).unwrap();
        let c = BranchedCover::new(3, 1, vec![(a, Permutation::identity(3))], vec![]);
        let f = FiberAnalysis::new(&c).unwrap();
        assert_eq!(f.offdiag_closure_connected(), Connectivity::Disconnected);
        assert!(!f.genuinely_ramified().genuinely_ramified);
    }

    #[test]
    fn certify_examples() {
        match certify_sd(&morse_s3()).unwrap() {
            SdOutcome::Certified(cert) => assert_eq!(cert.group_order, 6),
            other => panic!("expected certificate, got {other:?}"),
        }
        assert!(matches!(
            certify_sd(&d4()).unwrap(),
            SdOutcome::Refused(SdRefusal::NotMorse { branch_point: 1, .. })
        ));
        assert!(matches!(
            certify_sd(&etale_double()).unwrap(),
            SdOutcome::Refused(SdRefusal::NotGenuinelyRamified { .. })
        ));
        assert_eq!(
            certify_sd(&BranchedCover::new(1, 0, vec![], vec![])).unwrap(),
            SdOutcome::Refused(SdRefusal::DegreeBelowTwo)
        );
    }

    #[test]
    fn closure_orders() {
        let c = d4();
        assert_eq!(FiberAnalysis::new(&c).unwrap().galois_closure_order(), 8);
        let c = BranchedCover::genus_zero(3, &["(1 2 3)", "(1 3 2)"]);
        assert_eq!(FiberAnalysis::new(&c).unwrap().galois_closure_order(), 3);
    }

    #[test]
    fn component_covers() {
        let c = trefoil();
        let f = FiberAnalysis::new(&c).unwrap();
        let diag = f.component_cover(0).unwrap();
        assert_eq!(diag.total_space_genus().unwrap(), c.total_space_genus().unwrap());
        let off = f.component_cover(1).unwrap();
        assert_eq!(off.degree(), 6);
        // 6·(-2) + 3 + 3 + 4 = -2
        assert_eq!(off.euler_sum(), -2);
        assert_eq!(off.total_space_genus().unwrap(), 0);

        let c = d4();
        let f = FiberAnalysis::new(&c).unwrap();
        let opp = f.component_cover(2).unwrap();
        assert_eq!(opp.degree(), 4);
        assert!(opp.validate().is_ok());
        assert_eq!(f.component_cover(7), Err(FiberError::UnknownOrbital(7)));
    }

    #[test]
    fn report_is_consistent() {
        let c = d4();
        let r = FiberAnalysis::new(&c).unwrap().report().unwrap();
        assert_eq!(r.orbitals.len(), 3);
        assert!(!r.offdiag_irreducible);
        assert_eq!(r.transitivity, Transitivity::Transitive);
        assert_eq!(r.dual_graph_edges.len(), 3);
        assert!(r.genuinely_ramified);
    }
}
