//! Backtracking search for distance magic labelings of small graphs.
//!
//! Vertices are labeled in index order with values tried in ascending
//! order. Partial neighborhood sums are maintained incrementally; once the
//! last neighbor of some vertex is labeled its weight is final. The first
//! final weight fixes the magic constant and every later one must match it.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::{Budget, LocalCounter, Meter, SearchOutcome, SearchReport};
use crate::abelian::{AbelianGroup, GroupElement};
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::labelings::{verify_classic, verify_group, ClassicLabeling, GroupLabeling, Verdict};

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    pub budget: Budget,
    /// Split the search over the label of vertex 0 across rayon workers.
    pub parallel: bool,
    /// With `parallel`, still return the lexicographically least solution.
    pub deterministic: bool,
}

impl SearchOptions {
    pub fn with_budget(budget: Budget) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }
}

/// Value arithmetic for one kind of labeling. Labels are value indices
/// `0..n`; `Acc` is a partial neighborhood sum.
trait LabelArith: Sync {
    type Acc: Copy + Eq + Send + Sync + std::fmt::Debug;
    fn zero(&self) -> Self::Acc;
    fn add(&self, acc: Self::Acc, value: usize) -> Self::Acc;
    fn sub(&self, acc: Self::Acc, value: usize) -> Self::Acc;
    /// True when a partial sum can no longer reach `mu`.
    fn overshoots(&self, _partial: Self::Acc, _mu: Self::Acc) -> bool {
        false
    }
}

struct GroupArith {
    n: usize,
    add: Vec<u32>,
    neg: Vec<u32>,
}

impl GroupArith {
    fn new(group: &AbelianGroup) -> Self {
        let n = group.order() as usize;
        let elems: Vec<GroupElement> = group.elements().collect();
        let mut add = vec![0u32; n * n];
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                add[i * n + j] = group.index_of(&group.add_unchecked(x, y)) as u32;
            }
        }
        let neg = elems
            .iter()
            .map(|x| group.index_of(&group.neg(x)) as u32)
            .collect();
        Self { n, add, neg }
    }
}

impl LabelArith for GroupArith {
    type Acc = u32;
    fn zero(&self) -> u32 {
        0
    }
    fn add(&self, acc: u32, value: usize) -> u32 {
        self.add[acc as usize * self.n + value]
    }
    fn sub(&self, acc: u32, value: usize) -> u32 {
        self.add[acc as usize * self.n + self.neg[value] as usize]
    }
}

/// Labels `1..=n`, value index `i` meaning label `i + 1`.
struct ClassicArith;

impl LabelArith for ClassicArith {
    type Acc = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn add(&self, acc: u64, value: usize) -> u64 {
        acc + value as u64 + 1
    }
    fn sub(&self, acc: u64, value: usize) -> u64 {
        acc - value as u64 - 1
    }
    fn overshoots(&self, partial: u64, mu: u64) -> bool {
        partial > mu
    }
}

/// Static search context.
struct Problem<'g, A: LabelArith> {
    graph: &'g Graph,
    arith: A,
    /// `completes[k]`: vertices whose last-labeled neighbor is `k`.
    completes: Vec<Vec<usize>>,
    /// Magic constant known before the search starts, if any.
    preset_mu: Option<A::Acc>,
    /// `balances[k]`: pairs `(N(u) \ N(v), N(v) \ N(u))` whose label sums
    /// must agree, listed at the last vertex of their union. Only pairs that
    /// settle before both weights are final are kept.
    balances: Vec<Vec<(Vec<usize>, Vec<usize>)>>,
}

enum Dfs {
    Found(Vec<usize>),
    Exhausted,
    Stopped,
}

struct State<A: LabelArith> {
    labels: Vec<usize>,
    used: Vec<bool>,
    partial: Vec<A::Acc>,
    mu: Option<A::Acc>,
    /// Vertex whose labeling fixed `mu`, so it can be released on backtrack.
    mu_fixed_at: Option<usize>,
}

impl<'g, A: LabelArith> Problem<'g, A> {
    fn new(graph: &'g Graph, arith: A, preset_mu: Option<A::Acc>) -> Self {
        let mut completes = vec![Vec::new(); graph.order()];
        let mut preset_mu = preset_mu;
        for v in 0..graph.order() {
            match graph.neighbors(v).iter().max() {
                Some(&last) => completes[last].push(v),
                // isolated vertices have weight zero from the start
                None => preset_mu = Some(arith.zero()),
            }
        }
        let last = |v: usize| graph.neighbors(v).last().copied();
        let mut balances = vec![Vec::new(); graph.order()];
        for u in 0..graph.order() {
            for v in u + 1..graph.order() {
                let (nu, nv) = (graph.neighbors(u), graph.neighbors(v));
                let only_u: Vec<usize> = nu
                    .iter()
                    .copied()
                    .filter(|x| nv.binary_search(x).is_err())
                    .collect();
                let only_v: Vec<usize> = nv
                    .iter()
                    .copied()
                    .filter(|x| nu.binary_search(x).is_err())
                    .collect();
                let settled = only_u.iter().chain(&only_v).copied().max();
                if let (Some(k), Some(lu), Some(lv)) = (settled, last(u), last(v)) {
                    if k < lu.max(lv) {
                        balances[k].push((only_u, only_v));
                    }
                }
            }
        }
        Self {
            graph,
            arith,
            completes,
            preset_mu,
            balances,
        }
    }

    fn label_sum(&self, st: &State<A>, vertices: &[usize]) -> A::Acc {
        vertices.iter().fold(self.arith.zero(), |acc, &x| {
            self.arith.add(acc, st.labels[x])
        })
    }

    fn fresh_state(&self) -> State<A> {
        let n = self.graph.order();
        State {
            labels: vec![usize::MAX; n],
            used: vec![false; n],
            partial: vec![self.arith.zero(); n],
            mu: self.preset_mu,
            mu_fixed_at: None,
        }
    }

    /// Assigns `value` to vertex `k`; returns false if a weight check fails.
    /// The caller must always call `unassign` afterwards.
    fn assign(&self, st: &mut State<A>, k: usize, value: usize) -> bool {
        st.labels[k] = value;
        st.used[value] = true;
        for &u in self.graph.neighbors(k) {
            st.partial[u] = self.arith.add(st.partial[u], value);
        }
        if let Some(mu) = st.mu {
            if self
                .graph
                .neighbors(k)
                .iter()
                .any(|&u| self.arith.overshoots(st.partial[u], mu))
            {
                return false;
            }
        }
        for &u in &self.completes[k] {
            match st.mu {
                None => {
                    st.mu = Some(st.partial[u]);
                    st.mu_fixed_at = Some(k);
                }
                Some(mu) if mu != st.partial[u] => return false,
                Some(_) => {}
            }
        }
        self.balances[k]
            .iter()
            .all(|(a, b)| self.label_sum(st, a) == self.label_sum(st, b))
    }

    fn unassign(&self, st: &mut State<A>, k: usize) {
        let value = st.labels[k];
        for &u in self.graph.neighbors(k) {
            st.partial[u] = self.arith.sub(st.partial[u], value);
        }
        st.used[value] = false;
        st.labels[k] = usize::MAX;
        if st.mu_fixed_at == Some(k) {
            st.mu = None;
            st.mu_fixed_at = None;
        }
    }

    fn dfs(
        &self,
        st: &mut State<A>,
        k: usize,
        counter: &mut LocalCounter<'_>,
        cancel: &dyn Fn() -> bool,
    ) -> Dfs {
        let n = self.graph.order();
        if k == n {
            return Dfs::Found(st.labels.clone());
        }
        for value in 0..n {
            if st.used[value] {
                continue;
            }
            if !counter.tick() || cancel() {
                return Dfs::Stopped;
            }
            let ok = self.assign(st, k, value);
            let result = if ok {
                self.dfs(st, k + 1, counter, cancel)
            } else {
                Dfs::Exhausted
            };
            self.unassign(st, k);
            match result {
                Dfs::Exhausted => {}
                other => return other,
            }
        }
        Dfs::Exhausted
    }

    /// Explores the subtree where vertex 0 has label `first`.
    fn branch(&self, first: usize, meter: &Meter, cancel: &dyn Fn() -> bool) -> Dfs {
        let mut st = self.fresh_state();
        let mut counter = LocalCounter::new(meter);
        let result = if !counter.tick() {
            Dfs::Stopped
        } else if self.assign(&mut st, 0, first) {
            self.dfs(&mut st, 1, &mut counter, cancel)
        } else {
            Dfs::Exhausted
        };
        counter.finish();
        result
    }

    /// Runs the search. Returns `(solution, stopped, deterministic)`: the
    /// label-index vector of a solution if one was found, whether the budget
    /// cut the search short, and whether a solution is the least one.
    fn run(&self, options: &SearchOptions, meter: &Meter) -> (Option<Vec<usize>>, bool, bool) {
        let n = self.graph.order();
        if n == 0 {
            return (None, false, true);
        }
        if !options.parallel {
            let mut st = self.fresh_state();
            let mut counter = LocalCounter::new(meter);
            let result = self.dfs(&mut st, 0, &mut counter, &|| false);
            counter.finish();
            return match result {
                Dfs::Found(labels) => (Some(labels), false, true),
                Dfs::Exhausted => (None, false, true),
                Dfs::Stopped => (None, true, true),
            };
        }
        // Best (smallest) branch index that has found a solution so far.
        let best = AtomicUsize::new(usize::MAX);
        let deterministic = options.deterministic;
        let results: Vec<Dfs> = (0..n)
            .into_par_iter()
            .map(|first| {
                let cancel = || {
                    let b = best.load(Ordering::Relaxed);
                    meter.is_exceeded()
                        || if deterministic {
                            b < first
                        } else {
                            b != usize::MAX
                        }
                };
                if cancel() {
                    return Dfs::Stopped;
                }
                let r = self.branch(first, meter, &cancel);
                if matches!(r, Dfs::Found(_)) {
                    best.fetch_min(first, Ordering::Relaxed);
                }
                r
            })
            .collect();
        if deterministic {
            for r in results {
                match r {
                    Dfs::Found(labels) => return (Some(labels), false, true),
                    Dfs::Exhausted => {}
                    // An earlier branch did not finish, so a later solution
                    // might not be the least one.
                    Dfs::Stopped => return (None, true, true),
                }
            }
            (None, false, true)
        } else {
            let mut stopped = false;
            for r in results {
                match r {
                    Dfs::Found(labels) => return (Some(labels), false, false),
                    Dfs::Exhausted => {}
                    Dfs::Stopped => stopped = true,
                }
            }
            (None, stopped, true)
        }
    }
}

/// Decides whether `g` has a group distance magic labeling over `group`
/// by exhaustive backtracking. Intended for graphs of at most a dozen
/// vertices.
///
/// `ExhaustedNone` is a proof of nonexistence for this group. A `Found`
/// labeling has been accepted by [`verify_group`].
pub fn search_group_dm(
    g: &Graph,
    group: &AbelianGroup,
    options: SearchOptions,
) -> Result<SearchReport<GroupLabeling, GroupElement>> {
    if group.order() != g.order() as u64 {
        return Err(Error::Structural(format!(
            "group {group} has order {} but graph has {} vertices",
            group.order(),
            g.order()
        )));
    }
    let problem = Problem::new(g, GroupArith::new(group), None);
    let meter = Meter::new(options.budget);
    let (labels, stopped, deterministic) = problem.run(&options, &meter);
    let outcome = match labels {
        Some(labels) => {
            let values = labels.iter().map(|&i| group.element_at(i as u64)).collect();
            let labeling = GroupLabeling::new(group.clone(), values)?;
            match verify_group(g, &labeling)? {
                Verdict::Magic { mu } => SearchOutcome::Found { labeling, mu },
                other => {
                    return Err(Error::Internal(format!(
                        "search produced a labeling the verifier rejects: {other}"
                    )))
                }
            }
        }
        None if stopped => SearchOutcome::BudgetExceeded,
        None => SearchOutcome::ExhaustedNone,
    };
    Ok(SearchReport {
        outcome,
        nodes_explored: meter.nodes(),
        elapsed: meter.elapsed(),
        deterministic,
        detail: None,
    })
}

/// Decides whether `g` has a classic distance magic labeling (a bijection
/// onto `1..=n` with constant neighborhood sums).
///
/// On an `r`-regular graph the magic constant must be `r(n+1)/2`: odd `r`
/// is refused without searching, and even `r` fixes the constant up front
/// so partial sums above it are pruned.
pub fn search_classic_dm(
    g: &Graph,
    options: SearchOptions,
) -> Result<SearchReport<ClassicLabeling, u64>> {
    let meter = Meter::new(options.budget);
    let n = g.order() as u64;
    let mut preset = None;
    if let Some(r) = g.regular_degree() {
        if r % 2 == 1 {
            return Ok(SearchReport {
                outcome: SearchOutcome::ExhaustedNone,
                nodes_explored: 0,
                elapsed: meter.elapsed(),
                deterministic: true,
                detail: Some(format!(
                    "{r}-regular with r odd admits no distance magic labeling"
                )),
            });
        }
        preset = Some(r as u64 * (n + 1) / 2);
    }
    let problem = Problem::new(g, ClassicArith, preset);
    let (labels, stopped, deterministic) = problem.run(&options, &meter);
    let outcome = match labels {
        Some(labels) => {
            let labeling = ClassicLabeling::new(labels.iter().map(|&i| i as u64 + 1).collect());
            match verify_classic(g, &labeling)? {
                Verdict::Magic { mu } => SearchOutcome::Found { labeling, mu },
                other => {
                    return Err(Error::Internal(format!(
                        "search produced a labeling the verifier rejects: {other}"
                    )))
                }
            }
        }
        None if stopped => SearchOutcome::BudgetExceeded,
        None => SearchOutcome::ExhaustedNone,
    };
    Ok(SearchReport {
        outcome,
        nodes_explored: meter.nodes(),
        elapsed: meter.elapsed(),
        deterministic,
        detail: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{complete, complete_bipartite, cycle};

    fn grp(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn group_search_examples() {
        let r = search_group_dm(&cycle(4).unwrap(), &grp("Z4"), SearchOptions::default()).unwrap();
        // The least solution is (0,1,3,2) with mu = 3; (1,2,0,3) with mu = 1
        // is another one, found once vertex 0 is pinned to 1.
        let labels: Vec<u64> = r
            .labeling()
            .unwrap()
            .values()
            .iter()
            .map(|v| v.residues()[0])
            .collect();
        assert_eq!(labels, vec![0, 1, 3, 2]);
        assert_eq!(r.mu(), Some(&GroupElement::new(vec![3])));
        let r = search_group_dm(
            &complete_bipartite(3, 3).unwrap(),
            &grp("Z6"),
            SearchOptions::default(),
        )
        .unwrap();
        assert!(r.is_none());
        let r = search_group_dm(&cycle(3).unwrap(), &grp("Z3"), SearchOptions::default()).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn group_search_order_mismatch() {
        assert!(matches!(
            search_group_dm(&cycle(4).unwrap(), &grp("Z5"), SearchOptions::default()),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn classic_search_examples() {
        let r = search_classic_dm(&cycle(4).unwrap(), SearchOptions::default()).unwrap();
        assert_eq!(r.mu(), Some(&5));
        assert!(
            search_classic_dm(&cycle(6).unwrap(), SearchOptions::default())
                .unwrap()
                .is_none()
        );
        let r = search_classic_dm(&complete(4).unwrap(), SearchOptions::default()).unwrap();
        assert!(r.is_none());
        assert_eq!(r.nodes_explored, 0);
    }

    #[test]
    fn budget_is_reported_not_swallowed() {
        let g = cycle(10).unwrap();
        let r = search_group_dm(
            &g,
            &grp("Z10"),
            SearchOptions::with_budget(Budget::nodes(10)),
        )
        .unwrap();
        assert!(matches!(r.outcome, SearchOutcome::BudgetExceeded));
    }

    #[test]
    fn parallel_deterministic_matches_sequential() {
        for spec in ["Z8", "Z4xZ2", "Z2xZ2xZ2"] {
            let g = crate::graphs::lexicographic_product(
                &complete_bipartite(1, 1).unwrap(),
                &cycle(4).unwrap(),
            );
            let seq = search_group_dm(&g, &grp(spec), SearchOptions::default()).unwrap();
            let par = search_group_dm(
                &g,
                &grp(spec),
                SearchOptions {
                    parallel: true,
                    deterministic: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(seq.outcome, par.outcome, "{spec}");
            assert!(par.deterministic);
        }
    }

    #[test]
    fn isolated_vertices_force_zero_weight() {
        let g = Graph::empty(3);
        let r = search_group_dm(&g, &grp("Z3"), SearchOptions::default()).unwrap();
        assert!(r.mu().unwrap().is_identity());
        // one edge plus an isolated vertex: weights 0 vs nonzero labels
        let g = Graph::new(3, [(0, 1)]).unwrap();
        assert!(search_classic_dm(&g, SearchOptions::default())
            .unwrap()
            .is_none());
    }
}
