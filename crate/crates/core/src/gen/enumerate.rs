use std::collections::HashSet;

use super::{enumeration_cap, CorpusSpec, GenError};
use crate::cover::BranchedCover;
use crate::perm::{all_permutations, Permutation};

/// Least image sequence over all simultaneous relabelings.
pub fn canonical_form(cover: &BranchedCover) -> Vec<u32> {
    all_permutations(cover.degree())
        .iter()
        .map(|s| cover.conjugated_by(s).image_sequence())
        .min()
        .unwrap_or_default()
}

struct Block {
    genus: usize,
    degree: usize,
    branch_points: usize,
    group: Vec<Permutation>,
    pool: Vec<Permutation>,
    /// Next odometer state; `None` once exhausted.
    indices: Option<Vec<usize>>,
}

impl Block {
    fn new(genus: usize, degree: usize, branch_points: usize, morse: bool) -> Block {
        let group = all_permutations(degree);
        let pool: Vec<Permutation> = group
            .iter()
            .filter(|p| if morse { p.is_transposition() } else { !p.is_identity() })
            .cloned()
            .collect();
        let slots = 2 * genus + branch_points.saturating_sub(1);
        let empty_pool = branch_points > 1 && pool.is_empty();
        Block {
            genus,
            degree,
            branch_points,
            group,
            pool,
            indices: if empty_pool { None } else { Some(vec![0; slots]) },
        }
    }

    fn radix(&self, slot: usize) -> usize {
        if slot < 2 * self.genus {
            self.group.len()
        } else {
            self.pool.len()
        }
    }

    fn element(&self, slot: usize, index: usize) -> &Permutation {
        if slot < 2 * self.genus {
            &self.group[index]
        } else {
            &self.pool[index]
        }
    }

    fn advance(&mut self) {
        let Some(mut idx) = self.indices.take() else {
            return;
        };
        for slot in (0..idx.len()).rev() {
            idx[slot] += 1;
            if idx[slot] < self.radix(slot) {
                self.indices = Some(idx);
                return;
            }
            idx[slot] = 0;
        }
    }

    fn assemble(&self, idx: &[usize]) -> BranchedCover {
        let g = self.genus;
        let handles: Vec<(Permutation, Permutation)> = (0..g)
            .map(|k| {
                (
                    self.element(2 * k, idx[2 * k]).clone(),
                    self.element(2 * k + 1, idx[2 * k + 1]).clone(),
                )
            })
            .collect();
        let mut cycles: Vec<Permutation> = (2 * g..idx.len())
            .map(|slot| self.element(slot, idx[slot]).clone())
            .collect();
        if self.branch_points > 0 {
            let partial = BranchedCover::new(self.degree, g, handles.clone(), cycles.clone());
            cycles.push(partial.relation_product().inverse());
        }
        BranchedCover::new(self.degree, g, handles, cycles)
    }
}

/// Deterministic stream of valid covers: all tuples with the last branch
/// cycle forced by the relation, filtered to valid (and, if requested,
/// Morse) covers. Order is genus, degree, branch count, then lexicographic
/// in the free generators.
pub struct CoverStream {
    blocks: Vec<(usize, usize, usize)>,
    next_block: usize,
    current: Option<Block>,
    morse: bool,
    seen: Option<HashSet<Vec<u32>>>,
}

pub fn enumerate_covers(spec: &CorpusSpec) -> Result<CoverStream, GenError> {
    spec.check()?;
    let mut blocks = Vec::new();
    for g in spec.base_genus.iter() {
        let max = enumeration_cap(g);
        if spec.degree.hi > max {
            return Err(GenError::CapExceeded {
                degree: spec.degree.hi,
                genus: g,
                max,
            });
        }
        for d in spec.degree.iter() {
            for r in spec.branch_points.iter() {
                blocks.push((g, d, r));
            }
        }
    }
    Ok(CoverStream {
        blocks,
        next_block: 0,
        current: None,
        morse: spec.morse_only,
        seen: spec.dedup.then(HashSet::new),
    })
}

impl Iterator for CoverStream {
    type Item = BranchedCover;

    fn next(&mut self) -> Option<BranchedCover> {
        loop {
            if self.current.as_ref().is_none_or(|b| b.indices.is_none()) {
                let &(g, d, r) = self.blocks.get(self.next_block)?;
                self.next_block += 1;
                self.current = Some(Block::new(g, d, r, self.morse));
                continue;
            }
            let block = self.current.as_mut().unwrap();
            let idx = block.indices.clone().unwrap();
            let cover = block.assemble(&idx);
            block.advance();
            if !cover.violations().is_empty() || (self.morse && !cover.is_morse()) {
                continue;
            }
            if let Some(seen) = self.seen.as_mut() {
                if !seen.insert(canonical_form(&cover)) {
                    continue;
                }
            }
            return Some(cover);
        }
    }
}
