use std::collections::VecDeque;

use serde::Serialize;

use super::{PermError, Permutation};

/// Stabilizer chain over the full ascending base `0, 1, .., d-1`.
///
/// Level `k` holds strong generators of the pointwise stabilizer of
/// `0..k` and a transversal table: `transversal[j]` maps `k` to `j`.
/// Built incrementally with Knuth's formulation of Schreier–Sims.
#[derive(Clone, Debug)]
struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

#[derive(Clone, Debug)]
struct Level {
    generators: Vec<Permutation>,
    transversal: Vec<Option<Permutation>>,
}

impl StabChain {
    fn new(degree: usize) -> Self {
        let levels = (0..degree)
            .map(|k| {
                let mut transversal = vec![None; degree];
                transversal[k] = Some(Permutation::identity(degree));
                Level {
                    generators: Vec::new(),
                    transversal,
                }
            })
            .collect();
        StabChain { degree, levels }
    }

    /// Strips `g` through levels `from..`; returns the level where it fell
    /// out, or `None` when `g` is a member.
    fn sift(&self, from: usize, g: &Permutation) -> Option<usize> {
        let mut h = g.clone();
        for k in from..self.degree {
            let j = h.apply(k);
            match &self.levels[k].transversal[j] {
                None => return Some(k),
                Some(t) => {
                    if j != k {
                        h = t.inverse().compose_unchecked(&h);
                    }
                }
            }
        }
        debug_assert!(h.is_identity());
        None
    }

    fn contains(&self, g: &Permutation) -> bool {
        self.sift(0, g).is_none()
    }

    /// Inserts `g` (fixing `0..k`) at level `k`. Returns whether the group grew.
    fn extend(&mut self, k: usize, g: Permutation) -> bool {
        if k >= self.degree || self.sift(k, &g).is_none() {
            return false;
        }
        self.levels[k].generators.push(g.clone());
        let reps: Vec<Permutation> = self.levels[k].transversal.iter().flatten().cloned().collect();
        for s in reps {
            self.close(k, g.compose_unchecked(&s));
        }
        true
    }

    fn close(&mut self, k: usize, tau: Permutation) {
        let j = tau.apply(k);
        match &self.levels[k].transversal[j] {
            None => {
                self.levels[k].transversal[j] = Some(tau.clone());
                let gens = self.levels[k].generators.clone();
                for s in gens {
                    self.close(k, s.compose_unchecked(&tau));
                }
            }
            Some(t) => {
                let residue = t.inverse().compose_unchecked(&tau);
                self.extend(k + 1, residue);
            }
        }
    }

    fn order(&self) -> u128 {
        self.levels
            .iter()
            .map(|l| l.transversal.iter().filter(|t| t.is_some()).count() as u128)
            .product()
    }

    fn elements(&self) -> Vec<Permutation> {
        let mut acc = vec![Permutation::identity(self.degree)];
        // g = t_0 ∘ t_1 ∘ ... ∘ t_{d-1} enumerates every element exactly once
        for level in self.levels.iter().rev() {
            let reps: Vec<&Permutation> = level.transversal.iter().flatten().collect();
            if reps.len() == 1 {
                continue;
            }
            let mut next = Vec::with_capacity(acc.len() * reps.len());
            for r in &reps {
                for a in &acc {
                    next.push(r.compose_unchecked(a));
                }
            }
            acc = next;
        }
        acc.sort();
        acc
    }
}

/// Degree of transitivity of a permutation group on its points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Transitivity {
    Intransitive,
    Transitive,
    TwoTransitive,
}

/// A finitely generated subgroup of `S_d` with its stabilizer chain and
/// point orbits computed at construction.
#[derive(Clone, Debug)]
pub struct GeneratedGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: StabChain,
    orbits: Vec<Vec<usize>>,
}

impl GeneratedGroup {
    /// An empty generator list yields the trivial group.
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self, PermError> {
        let mut chain = StabChain::new(degree);
        for g in &generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch(degree, g.degree()));
            }
            chain.extend(0, g.clone());
        }
        let generators = if generators.is_empty() {
            vec![Permutation::identity(degree)]
        } else {
            generators
        };
        let orbits = point_orbits(degree, &generators);
        Ok(GeneratedGroup {
            degree,
            generators,
            chain,
            orbits,
        })
    }

    pub fn trivial(degree: usize) -> Self {
        Self::new(degree, Vec::new()).expect("identity generators are consistent")
    }

    pub fn symmetric(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Permutation::transposition(degree, 0, 1));
            let cycle: Vec<usize> = (0..degree).collect();
            gens.push(Permutation::from_cycles(degree, &[&cycle]));
        }
        Self::new(degree, gens).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn order(&self) -> u128 {
        self.chain.order()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.chain.contains(g)
    }

    /// Orbits on points, each sorted, ordered by least element.
    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits.len() == 1
    }

    /// Orbits on ordered pairs under the diagonal action. Pairs are encoded
    /// as `i * d + j`; each orbit is sorted and orbits are ordered by least
    /// element, so the orbit of `(0, 0)` comes first.
    pub fn orbits_on_pairs(&self) -> Vec<Vec<usize>> {
        let d = self.degree;
        let n = d * d;
        let mut label = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            label[start] = id;
            let mut orbit = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                let (i, j) = (x / d, x % d);
                for g in &self.generators {
                    let y = g.apply(i) * d + g.apply(j);
                    if label[y] == usize::MAX {
                        label[y] = id;
                        orbit.push(y);
                        queue.push_back(y);
                    }
                }
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    pub fn transitivity(&self) -> Transitivity {
        if !self.is_transitive() {
            return Transitivity::Intransitive;
        }
        if self.degree < 2 {
            return Transitivity::Transitive;
        }
        // the stabilizer of 0 is transitive on the remaining points
        let stab = self.point_stabilizer(0);
        if stab.orbits().iter().any(|o| o.len() == self.degree - 1 && !o.contains(&0)) {
            Transitivity::TwoTransitive
        } else {
            Transitivity::Transitive
        }
    }

    /// Breadth-first transversal of the orbit of `p`: entry `q` maps `p` to
    /// `q`, built from generators in order.
    pub fn orbit_transversal(&self, p: usize) -> Vec<Option<Permutation>> {
        let mut trans: Vec<Option<Permutation>> = vec![None; self.degree];
        trans[p] = Some(Permutation::identity(self.degree));
        let mut queue = VecDeque::from([p]);
        while let Some(q) = queue.pop_front() {
            let tq = trans[q].clone().unwrap();
            for g in &self.generators {
                let r = g.apply(q);
                if trans[r].is_none() {
                    trans[r] = Some(g.compose_unchecked(&tq));
                    queue.push_back(r);
                }
            }
        }
        trans
    }

    /// Stabilizer of `p`, generated by Schreier generators.
    pub fn point_stabilizer(&self, p: usize) -> GeneratedGroup {
        let trans = self.orbit_transversal(p);
        let mut gens: Vec<Permutation> = Vec::new();
        for tq in trans.iter().flatten() {
            let q = tq.apply(p);
            debug_assert!(trans[q].is_some());
            for s in &self.generators {
                let r = s.apply(q);
                let tr = trans[r].as_ref().unwrap();
                let schreier = tr.inverse().compose_unchecked(s).compose_unchecked(tq);
                if !schreier.is_identity() {
                    gens.push(schreier);
                }
            }
        }
        gens.sort();
        gens.dedup();
        // keep only generators that enlarge the group, in sorted order
        let mut chain = StabChain::new(self.degree);
        gens.retain(|g| chain.extend(0, g.clone()));
        GeneratedGroup::new(self.degree, gens).unwrap()
    }

    /// Smallest normal subgroup of `self` containing `sub`.
    pub fn normal_closure(&self, sub: &[Permutation]) -> Result<GeneratedGroup, PermError> {
        let mut chain = StabChain::new(self.degree);
        let mut gens = Vec::new();
        let mut queue = VecDeque::new();
        for x in sub {
            if !self.contains(x) {
                return Err(PermError::NotInGroup(x.to_string()));
            }
            if chain.extend(0, x.clone()) {
                gens.push(x.clone());
                queue.push_back(x.clone());
            }
        }
        while let Some(n) = queue.pop_front() {
            for s in &self.generators {
                let c = s.conjugate(&n);
                if chain.extend(0, c.clone()) {
                    gens.push(c.clone());
                    queue.push_back(c);
                }
            }
        }
        GeneratedGroup::new(self.degree, gens)
    }

    /// The subgroup generated by both groups' generators.
    pub fn join(&self, other: &GeneratedGroup) -> Result<GeneratedGroup, PermError> {
        let gens = self
            .generators
            .iter()
            .chain(other.generators.iter())
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();
        GeneratedGroup::new(self.degree, gens)
    }

    /// Every element, sorted. Intended for small groups.
    pub fn elements(&self) -> Vec<Permutation> {
        self.chain.elements()
    }

    /// The same group acting on an invariant subset, relabeled in the order given.
    pub fn restrict(&self, keep: &[usize]) -> GeneratedGroup {
        let gens = self.generators.iter().map(|g| g.restrict(keep)).collect();
        GeneratedGroup::new(keep.len(), gens).unwrap()
    }
}

fn point_orbits(degree: usize, generators: &[Permutation]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for start in 0..degree {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(q) = queue.pop_front() {
            for g in generators {
                let r = g.apply(q);
                if !seen[r] {
                    seen[r] = true;
                    orbit.push(r);
                    queue.push_back(r);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_cycles;
    use std::collections::BTreeSet;

    fn group(d: usize, gens: &[&str]) -> GeneratedGroup {
        GeneratedGroup::new(d, gens.iter().map(|s| parse_cycles(s, d).unwrap()).collect()).unwrap()
    }

    fn naive_closure(g: &GeneratedGroup) -> BTreeSet<Permutation> {
        let mut set = BTreeSet::from([Permutation::identity(g.degree())]);
        let mut frontier = vec![Permutation::identity(g.degree())];
        while let Some(x) = frontier.pop() {
            for s in g.generators() {
                let y = s.compose_unchecked(&x);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    #[test]
    fn orders() {
        assert_eq!(group(3, &["(1 2)", "(1 2 3)"]).order(), 6);
        assert_eq!(group(4, &["(1 2 3 4)", "(1 3)"]).order(), 8);
        assert_eq!(group(5, &["(1 2 3 4 5)", "(1 2)"]).order(), 120);
        assert_eq!(GeneratedGroup::symmetric(7).order(), 5040);
        assert_eq!(GeneratedGroup::trivial(4).order(), 1);
        assert_eq!(group(6, &["(1 2 3)(4 5 6)", "(1 4)(2 5)(3 6)"]).order(), 6);
    }

    #[test]
    fn pair_orbits_of_d4() {
        let d4 = group(4, &["(1 2 3 4)", "(1 3)"]);
        let sizes: Vec<usize> = d4.orbits_on_pairs().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![4, 8, 4]);
        assert_eq!(d4.orbits_on_pairs()[0], vec![0, 5, 10, 15]);
    }

    #[test]
    fn point_orbits() {
        let c2 = group(3, &["(1 2)"]);
        assert_eq!(c2.orbits(), &[vec![0, 1], vec![2]]);
        assert_eq!(group(3, &["(1 2)", "(1 2 3)"]).orbits_on_pairs().len(), 2);
    }

    #[test]
    fn stabilizers() {
        let s3 = group(3, &["(1 2)", "(1 2 3)"]);
        assert_eq!(s3.point_stabilizer(0).order(), 2);
        let d4 = group(4, &["(1 2 3 4)", "(1 3)"]);
        let st = d4.point_stabilizer(0);
        assert_eq!(st.order(), 2);
        assert!(st.contains(&parse_cycles("(2 4)", 4).unwrap()));
        assert_eq!(group(4, &["(1 2 3 4)"]).point_stabilizer(0).order(), 1);
    }

    #[test]
    fn normal_closures() {
        let s3 = group(3, &["(1 2)", "(1 2 3)"]);
        let n = s3.normal_closure(&[parse_cycles("(1 2)", 3).unwrap()]).unwrap();
        assert_eq!(n.order(), 6);
        assert_eq!(s3.normal_closure(&[Permutation::identity(3)]).unwrap().order(), 1);

        let d4 = group(4, &["(1 2 3 4)", "(1 3)"]);
        let x = parse_cycles("(1 2)(3 4)", 4).unwrap();
        let n = d4.normal_closure(&[x.clone()]).unwrap();
        // naive oracle: close {x} under conjugation by every element, then under products
        let all = naive_closure(&d4);
        let mut gens: BTreeSet<Permutation> = all.iter().map(|g| g.conjugate(&x)).collect();
        gens.remove(&Permutation::identity(4));
        let naive = naive_closure(&GeneratedGroup::new(4, gens.into_iter().collect()).unwrap());
        assert_eq!(n.order() as usize, naive.len());
        assert_eq!(n.order(), 4);

        let c3 = group(3, &["(1 2 3)"]);
        assert!(matches!(
            c3.normal_closure(&[parse_cycles("(1 2)", 3).unwrap()]),
            Err(PermError::NotInGroup(_))
        ));
    }

    #[test]
    fn transitivity_levels() {
        assert_eq!(
            group(3, &["(1 2)", "(1 2 3)"]).transitivity(),
            Transitivity::TwoTransitive
        );
        assert_eq!(group(4, &["(1 2 3 4)"]).transitivity(), Transitivity::Transitive);
        assert_eq!(group(3, &["(1 2)"]).transitivity(), Transitivity::Intransitive);
        assert_eq!(GeneratedGroup::trivial(1).transitivity(), Transitivity::Transitive);
    }

    #[test]
    fn elements_match_naive_closure() {
        for g in [
            group(4, &["(1 2 3 4)", "(1 3)"]),
            group(5, &["(1 2 3 4 5)", "(2 5)(3 4)"]),
            group(6, &["(1 2)(3 4)", "(2 3)(5 6)", "(1 5 3)"]),
            GeneratedGroup::symmetric(5),
        ] {
            let naive: Vec<Permutation> = naive_closure(&g).into_iter().collect();
            assert_eq!(g.elements(), naive);
        }
    }

    #[test]
    fn transversal_maps_point() {
        let d4 = group(4, &["(1 2 3 4)", "(1 3)"]);
        let t = d4.orbit_transversal(0);
        for (q, tq) in t.iter().enumerate() {
            assert_eq!(tq.as_ref().unwrap().apply(0), q);
        }
    }
}
