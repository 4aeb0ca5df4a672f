//! Seeded graph corpora and a naive exhaustive oracle shared by the
//! integration tests.

#![allow(dead_code)]

use groupmagic::abelian::{AbelianGroup, GroupElement};
use groupmagic::graphs::{circulant, complete, cycle, Graph};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 20_240_917;

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    rng.set_stream(stream);
    rng
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n)
        .tuple_combinations()
        .filter(|_| rng.gen_bool(p))
        .collect();
    Graph::new(n, edges).unwrap()
}

/// Vertex-disjoint union.
pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let shift = a.order();
    let edges = a
        .edges()
        .iter()
        .copied()
        .chain(b.edges().iter().map(|&(u, v)| (u + shift, v + shift)));
    Graph::new(a.order() + b.order(), edges).unwrap()
}

/// `count` random graphs with `1..=max_n` vertices. Every fourth graph is a
/// disjoint union of two random pieces, so the corpus always contains
/// disconnected and non-regular members.
pub fn random_corpus(stream: u64, count: usize, max_n: usize) -> Vec<Graph> {
    let mut rng = rng(stream);
    (0..count)
        .map(|k| {
            let n = rng.gen_range(1..=max_n);
            let p = rng.gen_range(0.15..0.85);
            if k % 4 == 3 && n >= 2 {
                let split = rng.gen_range(1..n);
                let a = random_graph(&mut rng, split, p);
                let b = random_graph(&mut rng, n - split, p);
                disjoint_union(&a, &b)
            } else {
                random_graph(&mut rng, n, p)
            }
        })
        .collect()
}

/// Graphs on at most 16 vertices with some structure in their degrees:
/// cycles, complete graphs, circulants, unions of those, and random graphs.
pub fn structured_corpus() -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 3..=16 {
        out.push(cycle(n).unwrap());
    }
    for n in 1..=8 {
        out.push(complete(n).unwrap());
    }
    for n in 5..=16 {
        for jumps in [vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3]] {
            if let Ok(g) = circulant(n, &jumps) {
                out.push(g);
            }
        }
    }
    // non-regular graphs with all degrees in one class mod 4
    out.push(disjoint_union(&complete(5).unwrap(), &Graph::empty(1)));
    out.push(disjoint_union(&complete(5).unwrap(), &Graph::empty(3)));
    out.push(disjoint_union(&cycle(4).unwrap(), &complete(7).unwrap()));
    out.push(disjoint_union(&cycle(6).unwrap(), &complete(3).unwrap()));
    out.push(Graph::empty(8));
    out.extend(random_corpus(7, 60, 16));
    out
}

/// Every graph on `n` vertices, one per edge subset.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    (0..1u32 << pairs.len())
        .map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e);
            Graph::new(n, edges).unwrap()
        })
        .collect()
}

/// Tries every bijection from vertices to group elements, without pruning.
/// Returns the first magic one in lexicographic order, with its constant.
pub fn naive_group_dm(g: &Graph, group: &AbelianGroup) -> Option<(Vec<usize>, GroupElement)> {
    let n = g.order();
    assert_eq!(group.order() as usize, n);
    let elems: Vec<GroupElement> = group.elements().collect();
    let table: Vec<Vec<usize>> = elems
        .iter()
        .map(|x| {
            elems
                .iter()
                .map(|y| group.index_of(&group.add(x, y).unwrap()) as usize)
                .collect()
        })
        .collect();
    let weight = |perm: &[usize], v: usize| {
        g.neighbors(v)
            .iter()
            .fold(0usize, |acc, &u| table[acc][perm[u]])
    };
    (0..n).permutations(n).find_map(|perm| {
        let mu = weight(&perm, 0);
        (1..n)
            .all(|v| weight(&perm, v) == mu)
            .then(|| (perm, elems[mu].clone()))
    })
}

/// Tries every bijection onto `1..=n`; returns the magic constant of the
/// first magic one.
pub fn naive_classic_dm(g: &Graph) -> Option<u64> {
    let n = g.order();
    (1..=n as u64).permutations(n).find_map(|perm| {
        let weight = |v: usize| g.neighbors(v).iter().map(|&u| perm[u]).sum::<u64>();
        let k = weight(0);
        (1..n).all(|v| weight(v) == k).then_some(k)
    })
}
