//! Brute-force tuple counts against the forced-last-cycle enumerator.

use ramify::gen::enumerate_covers;
use ramify::{CorpusSpec, Span};

type Perm = Vec<usize>;

fn perms(d: usize) -> Vec<Perm> {
    fn go(prefix: &mut Perm, used: &mut [bool], out: &mut Vec<Perm>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

/// `a ∘ b`
fn mul(a: &Perm, b: &Perm) -> Perm {
    b.iter().map(|&i| a[i]).collect()
}

fn inv(a: &Perm) -> Perm {
    let mut r = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        r[j] = i;
    }
    r
}

fn is_id(a: &Perm) -> bool {
    a.iter().enumerate().all(|(i, &j)| i == j)
}

fn transitive(d: usize, gens: &[&Perm]) -> bool {
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for g in gens {
        for (i, &j) in g.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    let root = find(&mut parent, 0);
    (0..d).all(|i| find(&mut parent, i) == root)
}

/// All `(α_1, β_1, …, c_1, …, c_r)` in the full product space with the
/// relation, nontrivial branch cycles and transitivity.
fn brute_count(d: usize, g: usize, r: usize) -> usize {
    let all = perms(d);
    let slots = 2 * g + r;
    let mut count = 0;
    let mut idx = vec![0usize; slots];
    loop {
        let elems: Vec<&Perm> = idx.iter().map(|&k| &all[k]).collect();
        let mut prod: Perm = (0..d).collect();
        for h in 0..g {
            let (a, b) = (elems[2 * h], elems[2 * h + 1]);
            let comm = mul(&mul(a, b), &mul(&inv(a), &inv(b)));
            prod = mul(&prod, &comm);
        }
        for c in &elems[2 * g..] {
            prod = mul(&prod, c);
        }
        if is_id(&prod) && elems[2 * g..].iter().all(|c| !is_id(c)) && transitive(d, &elems) {
            count += 1;
        }
        let mut k = slots;
        loop {
            if k == 0 {
                return count;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < all.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn enumerated(d: usize, g: usize, r: usize) -> usize {
    let spec = CorpusSpec::exhaustive(Span::single(d), Span::single(g), Span::single(r));
    enumerate_covers(&spec).unwrap().count()
}

#[test]
fn genus_zero_counts_match() {
    for d in 2..=3 {
        for r in 0..=4 {
            assert_eq!(enumerated(d, 0, r), brute_count(d, 0, r), "d={d} r={r}");
        }
    }
    // hand counts: two 3-cycles inverse to each other; transposition pairs equal
    assert_eq!(brute_count(3, 0, 2), 2);
    assert_eq!(brute_count(2, 0, 2), 1);
}

#[test]
fn genus_one_counts_match() {
    for (d, r) in [(2, 0), (2, 1), (2, 2), (3, 0), (3, 1)] {
        assert_eq!(enumerated(d, 1, r), brute_count(d, 1, r), "d={d} r={r}");
    }
    assert_eq!(brute_count(2, 1, 0), 3);
}
