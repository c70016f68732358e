use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CorpusSpec, GenError};
use crate::cover::BranchedCover;
use crate::perm::Permutation;

/// Draws allowed per cover before the parameters are declared infeasible.
pub const REJECTION_BUDGET: usize = 100_000;

fn uniform_element<R: Rng>(degree: usize, rng: &mut R) -> Permutation {
    let mut images: Vec<u32> = (0..degree as u32).collect();
    images.shuffle(rng);
    Permutation::from_images(images).expect("shuffle is a bijection")
}

fn uniform_nontrivial<R: Rng>(degree: usize, rng: &mut R) -> Permutation {
    loop {
        let p = uniform_element(degree, rng);
        if !p.is_identity() {
            return p;
        }
    }
}

fn uniform_transposition<R: Rng>(degree: usize, rng: &mut R) -> Permutation {
    let a = rng.gen_range(0..degree);
    let mut b = rng.gen_range(0..degree - 1);
    if b >= a {
        b += 1;
    }
    Permutation::transposition(degree, a, b)
}

/// Structural reasons no valid cover exists, if any are known.
pub fn feasibility_diagnosis(degree: usize, genus: usize, branch_points: usize, morse: bool) -> Option<String> {
    if degree == 1 && branch_points > 0 {
        return Some("degree 1 has no nontrivial branch cycles".into());
    }
    if morse && branch_points % 2 == 1 {
        return Some(format!(
            "parity: a product of {branch_points} transpositions is odd, while the product of \
             commutators is even, so the relation can never close; Morse covers need an even \
             number of branch points"
        ));
    }
    if genus == 0 && degree >= 2 {
        if branch_points == 0 {
            return Some("no branch points over a genus-0 base: the group is trivial and intransitive".into());
        }
        if branch_points == 1 {
            return Some("a single branch cycle over a genus-0 base is forced to be the identity".into());
        }
        if morse && branch_points < 2 * degree - 2 {
            return Some(format!(
                "{branch_points} transpositions over a genus-0 base give negative total genus for \
                 a connected degree-{degree} cover; at least {} are needed",
                2 * degree - 2
            ));
        }
    }
    None
}

/// One cover with uniform handles, uniform free branch cycles (nontrivial,
/// or transpositions in Morse mode) and the last cycle forced, resampled
/// until valid.
pub fn random_cover<R: Rng>(
    degree: usize,
    genus: usize,
    branch_points: usize,
    morse: bool,
    rng: &mut R,
) -> Result<BranchedCover, GenError> {
    let draw_cycle = |rng: &mut R| {
        if morse {
            uniform_transposition(degree, rng)
        } else {
            uniform_nontrivial(degree, rng)
        }
    };
    let pool_empty = degree < 2 && (branch_points > 1 || (morse && branch_points > 0));
    if !pool_empty {
        for _ in 0..REJECTION_BUDGET {
            let handles: Vec<(Permutation, Permutation)> = (0..genus)
                .map(|_| (uniform_element(degree, rng), uniform_element(degree, rng)))
                .collect();
            let mut cycles: Vec<Permutation> =
                (1..branch_points).map(|_| draw_cycle(rng)).collect();
            if branch_points > 0 {
                let partial = BranchedCover::new(degree, genus, handles.clone(), cycles.clone());
                cycles.push(partial.relation_product().inverse());
            }
            let cover = BranchedCover::new(degree, genus, handles, cycles);
            if cover.violations().is_empty() && (!morse || cover.is_morse()) {
                return Ok(cover);
            }
        }
    }
    let why = feasibility_diagnosis(degree, genus, branch_points, morse)
        .unwrap_or_else(|| "no structural obstruction found; acceptance rate too low".into());
    Err(GenError::Infeasible(format!(
        "no valid cover (d={degree}, g={genus}, r={branch_points}{}) in {REJECTION_BUDGET} draws: {why}",
        if morse { ", Morse" } else { "" }
    )))
}

/// Seeded sample stream for a random-mode corpus. For each sample,
/// `(d, g, r)` is drawn uniformly from the combinations in the spec's ranges
/// that have no structural obstruction; the stream stops after the first
/// error.
pub struct RandomCovers {
    rng: ChaCha8Rng,
    combos: Vec<(usize, usize, usize)>,
    morse: bool,
    remaining: usize,
}

impl RandomCovers {
    pub fn new(spec: &CorpusSpec) -> Result<Self, GenError> {
        spec.check()?;
        let seed = spec.seed.ok_or(GenError::MissingSeed)?;
        let mut combos = Vec::new();
        let mut first_reason = None;
        for d in spec.degree.iter() {
            for g in spec.base_genus.iter() {
                for r in spec.branch_points.iter() {
                    match feasibility_diagnosis(d, g, r, spec.morse_only) {
                        None => combos.push((d, g, r)),
                        Some(why) => {
                            first_reason.get_or_insert(format!("d={d}, g={g}, r={r}: {why}"));
                        }
                    }
                }
            }
        }
        if combos.is_empty() {
            return Err(GenError::Infeasible(first_reason.unwrap_or_default()));
        }
        Ok(RandomCovers {
            rng: ChaCha8Rng::seed_from_u64(seed),
            combos,
            morse: spec.morse_only,
            remaining: spec.samples.unwrap_or(0),
        })
    }
}

impl Iterator for RandomCovers {
    type Item = Result<BranchedCover, GenError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let (d, g, r) = self.combos[self.rng.gen_range(0..self.combos.len())];
        let out = random_cover(d, g, r, self.morse, &mut self.rng);
        if out.is_err() {
            self.remaining = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::Span;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn morse_sample_is_valid() {
        let c = random_cover(4, 0, 6, true, &mut rng(7)).unwrap();
        assert!(c.violations().is_empty());
        assert!(c.is_morse());
        assert_eq!(c.branch_cycles().len(), 6);
    }

    #[test]
    fn odd_morse_is_infeasible() {
        let e = random_cover(4, 0, 5, true, &mut rng(1)).unwrap_err();
        let GenError::Infeasible(msg) = e else { panic!() };
        assert!(msg.contains("parity"), "{msg}");
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = CorpusSpec::random(Span::new(3, 5), Span::new(0, 1), Span::new(2, 4), 20, 99);
        let a: Vec<_> = RandomCovers::new(&spec).unwrap().map(|c| c.unwrap().to_json()).collect();
        let b: Vec<_> = RandomCovers::new(&spec).unwrap().map(|c| c.unwrap().to_json()).collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
    }

    #[test]
    fn stream_skips_obstructed_parameters() {
        let spec = CorpusSpec::random(Span::new(3, 4), Span::single(0), Span::new(5, 6), 30, 4).morse(true);
        for c in RandomCovers::new(&spec).unwrap() {
            assert_eq!(c.unwrap().branch_cycles().len(), 6);
        }
        let spec = CorpusSpec::random(Span::single(4), Span::single(0), Span::single(5), 3, 4).morse(true);
        assert!(matches!(RandomCovers::new(&spec), Err(GenError::Infeasible(_))));
    }

    #[test]
    fn general_samples_validate() {
        let mut r = rng(3);
        for _ in 0..50 {
            let c = random_cover(5, 1, 3, false, &mut r).unwrap();
            assert!(c.violations().is_empty());
        }
    }
}
