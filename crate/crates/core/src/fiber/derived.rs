//! The cover `q'_1 : Y' -> Y` obtained by restricting the first projection
//! of `Y ×_X Y` to the off-diagonal part.
//!
//! Its monodromy is the stabilizer `H` of fiber point 1 acting on the other
//! `d - 1` points. A point of `Y` over branch point `j` is a cycle `κ` of
//! `c_j`; if `κ` has length `e` and `u ∈ G` sends a point of `κ` to 1, the
//! local monodromy of `q'_1` around it is `u ∘ c_j^e ∘ u⁻¹ ∈ H`.

use serde::Serialize;

use super::{FiberAnalysis, FiberError};
use crate::cover::CoverError;
use crate::perm::{GeneratedGroup, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalInertia {
    /// 1-based branch point of the original cover.
    pub branch_point: usize,
    /// The cycle of `c_j` naming the point of `Y`, 1-based.
    pub cycle: Vec<usize>,
    /// Acting on the `d - 1` remaining fiber points, relabeled `1..d-1`.
    #[serde(serialize_with = "serialize_display")]
    pub element: Permutation,
}

fn serialize_display<S: serde::Serializer>(p: &Permutation, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivedCover {
    pub base_degree: usize,
    pub base_genus_of_y: u64,
    pub degree: usize,
    #[serde(skip)]
    pub group: GeneratedGroup,
    pub group_order: u128,
    pub local_inertia: Vec<LocalInertia>,
    /// `H` transitive on the remaining points, i.e. `Y'` irreducible.
    pub connected: bool,
    pub morse: bool,
    pub genuinely_ramified: bool,
    pub etale_subcover_degree: u128,
}

impl DerivedCover {
    pub(super) fn build(analysis: &FiberAnalysis<'_>) -> Result<Self, FiberError> {
        let cover = analysis.cover();
        let d = cover.degree();
        if d < 2 {
            return Err(FiberError::DegreeTooSmall(d));
        }
        let g = analysis.group();
        let rest: Vec<usize> = (1..d).collect();
        let stabilizer = g.point_stabilizer(0);
        let group = stabilizer.restrict(&rest);

        // transversal[i] sends point 1 to i, so its inverse sends i to 1
        let transversal = g.orbit_transversal(0);
        let mut local_inertia = Vec::new();
        for (j, c) in cover.branch_cycles().iter().enumerate() {
            for kappa in c.cycles_with_fixed() {
                let i = kappa[0];
                let u = transversal[i]
                    .as_ref()
                    .expect("monodromy group is transitive")
                    .inverse();
                let element = u.conjugate(&c.pow(kappa.len()));
                debug_assert_eq!(element.apply(0), 0);
                local_inertia.push(LocalInertia {
                    branch_point: j + 1,
                    cycle: kappa.iter().map(|p| p + 1).collect(),
                    element: element.restrict(&rest),
                });
            }
        }

        let nontrivial: Vec<Permutation> = local_inertia
            .iter()
            .map(|l| l.element.clone())
            .filter(|e| !e.is_identity())
            .collect();
        let morse = nontrivial.iter().all(Permutation::is_transposition);
        let connected = group.is_transitive();
        let (genuinely_ramified, etale_subcover_degree) = if d == 2 {
            (true, 1)
        } else {
            let h = group.point_stabilizer(0);
            let n = group
                .normal_closure(&nontrivial)
                .expect("local inertia lies in the stabilizer");
            let hn = h.join(&n).expect("same degree");
            let index = group.order() / hn.order();
            (index == 1, index)
        };

        Ok(DerivedCover {
            base_degree: d,
            base_genus_of_y: cover.total_space_genus()?,
            degree: d - 1,
            group_order: group.order(),
            group,
            local_inertia,
            connected,
            morse,
            genuinely_ramified,
            etale_subcover_degree,
        })
    }

    /// Genus of `Y'` by Riemann–Hurwitz over `Y`.
    pub fn genus_over_y(&self) -> Result<u64, CoverError> {
        let n = self.degree as i64;
        let ram: i64 = self.local_inertia.iter().map(|l| l.element.index() as i64).sum();
        let e = n * (2 * self.base_genus_of_y as i64 - 2) + ram;
        if e < -2 || e % 2 != 0 {
            return Err(CoverError::Invalid(vec![
                crate::cover::Violation::InconsistentGenus { euler_sum: e },
            ]));
        }
        Ok(((e + 2) / 2) as u64)
    }

    /// Points of `Y` over which `q'_1` branches.
    pub fn branch_point_count(&self) -> usize {
        self.local_inertia
            .iter()
            .filter(|l| !l.element.is_identity())
            .count()
    }
}
