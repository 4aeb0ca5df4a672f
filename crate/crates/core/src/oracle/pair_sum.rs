//! Classic distance magic labelings of `X[C4]` via pair sums.
//!
//! In `X[C4]` the vertices `v0, v2` of a copy have the same neighbors
//! outside the copy, and inside it both see `{v1, v3}`; likewise `v1, v3`
//! see `{v0, v2}`. Equal weights therefore force
//! `l(v0) + l(v2) = l(v1) + l(v3) = s_i` for copy `i`, each copy carries total
//! label `2 s_i`, and every vertex of copy `i` has weight
//! `s_i + 2 * sum_{k ~ i} s_k`. Conversely any positive integer solution
//! `(s, k)` of
//!
//! ```text
//! k = s_i + 2 * sum_{k ~ i} s_k     for every vertex i of X
//! ```
//!
//! together with a partition of `1..=4|X|` into pairs, two of sum `s_i` for
//! every copy `i`, is a distance magic labeling. So the problem splits into
//! a linear system and a pairing problem.
//!
//! The system matrix `I + 2A` is never singular: `-1/2` cannot be an
//! eigenvalue of an integer matrix. So `s = k * (I + 2A)^{-1} 1` and the
//! total label mass `sum_i 2 s_i = 4N(4N+1)/2` fixes `k`. The solve runs on
//! the quotient by twin classes, where `s` is constant because swapping two
//! twins is an automorphism and the solution is unique.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{Budget, LocalCounter, Meter, SearchOutcome, SearchReport};
use crate::error::{Error, Result};
use crate::graphs::{complete_bipartite, cycle, lexicographic_product, Graph};
use crate::labelings::{verify_classic, ClassicLabeling, Verdict};

/// One weight equation `k = sum_j coeff_j * s_j` of the reduced system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightEquation {
    /// Copy (vertex of `X`) whose weight this is.
    pub copy: usize,
    /// `(copy index, coefficient)`, sorted by copy index.
    pub terms: Vec<(usize, i64)>,
}

/// The pair-sum system of `X[C4]`.
#[derive(Clone, Debug)]
pub struct PairSumSystem {
    base: Graph,
    equations: Vec<WeightEquation>,
}

/// Builds the pair-sum system for `X[C4]`.
pub fn reduce_c4_product(x: &Graph) -> PairSumSystem {
    let equations = (0..x.order())
        .map(|i| {
            let mut terms: Vec<(usize, i64)> = x.neighbors(i).iter().map(|&k| (k, 2)).collect();
            terms.push((i, 1));
            terms.sort_unstable();
            WeightEquation { copy: i, terms }
        })
        .collect();
    PairSumSystem {
        base: x.clone(),
        equations,
    }
}

impl PairSumSystem {
    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn copies(&self) -> usize {
        self.base.order()
    }

    /// Labels to place: `1..=4N`.
    pub fn label_count(&self) -> u64 {
        4 * self.base.order() as u64
    }

    /// Required `sum_i s_i`, half the total label mass.
    pub fn total_pair_sum(&self) -> u64 {
        let l = self.label_count();
        l * (l + 1) / 4
    }

    pub fn equations(&self) -> &[WeightEquation] {
        &self.equations
    }

    /// Weight of copy `i` under pair sums `s`.
    pub fn weight(&self, copy: usize, sums: &[i64]) -> i64 {
        self.equations[copy]
            .terms
            .iter()
            .map(|&(j, c)| c * sums[j])
            .sum()
    }

    /// Whether `(s, k)` satisfies every weight equation and the mass
    /// constraint. Pairing realizability is not checked.
    pub fn satisfied_by(&self, sums: &[i64], k: i64) -> bool {
        sums.len() == self.copies()
            && (0..self.copies()).all(|i| self.weight(i, sums) == k)
            && sums.iter().sum::<i64>() == self.total_pair_sum() as i64
    }

    /// Unique rational solution `(s, k)` of the weight equations together
    /// with the mass constraint, or `None` if they are inconsistent.
    pub fn rational_solution(&self) -> Result<Option<(Vec<BigRational>, BigRational)>> {
        let n = self.copies();
        if n == 0 {
            return Ok(None);
        }
        let classes = twin_classes(&self.base);
        let class_count = classes.iter().max().map_or(0, |&c| c + 1);
        let mut reps = vec![usize::MAX; class_count];
        let mut sizes = vec![0i64; class_count];
        for (v, &c) in classes.iter().enumerate() {
            if reps[c] == usize::MAX {
                reps[c] = v;
            }
            sizes[c] += 1;
        }
        // Reduced matrix R y = 1 where s = k * y.
        let mut matrix = vec![vec![BigRational::zero(); class_count + 1]; class_count];
        for (c, &rep) in reps.iter().enumerate() {
            for &(j, coeff) in &self.equations[rep].terms {
                matrix[c][classes[j]] += BigRational::from_integer(BigInt::from(coeff));
            }
            matrix[c][class_count] = BigRational::one();
        }
        let y = solve_square(matrix)
            .ok_or_else(|| Error::Internal("pair-sum system matrix I + 2A is singular".into()))?;
        let denom: BigRational = y
            .iter()
            .zip(&sizes)
            .map(|(yc, &size)| yc * BigRational::from_integer(BigInt::from(size)))
            .sum();
        if denom.is_zero() {
            return Ok(None);
        }
        let k = BigRational::from_integer(BigInt::from(self.total_pair_sum())) / denom;
        let sums = classes.iter().map(|&c| &y[c] * &k).collect();
        Ok(Some((sums, k)))
    }
}

/// Groups vertices with equal open neighborhoods or equal closed
/// neighborhoods. Returns a class index per vertex, numbered by first
/// appearance.
fn twin_classes(g: &Graph) -> Vec<usize> {
    let n = g.order();
    let mut class = vec![usize::MAX; n];
    let mut by_open: BTreeMap<&[usize], usize> = BTreeMap::new();
    let mut by_closed: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut next = 0;
    for (v, slot) in class.iter_mut().enumerate() {
        let mut closed = g.neighbors(v).to_vec();
        let pos = closed.binary_search(&v).unwrap_err();
        closed.insert(pos, v);
        let found = by_open
            .get(g.neighbors(v))
            .copied()
            .or_else(|| by_closed.get(&closed).copied());
        let c = found.unwrap_or_else(|| {
            next += 1;
            next - 1
        });
        *slot = c;
        by_open.entry(g.neighbors(v)).or_insert(c);
        by_closed.entry(closed).or_insert(c);
    }
    class
}

/// Gauss-Jordan elimination on an augmented `m x (m+1)` rational matrix.
fn solve_square(mut a: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
    }
    Some(a.into_iter().map(|row| row[m].clone()).collect())
}

/// Result of [`solve_pair_sum`]: the search report plus the pair sums when
/// the linear stage produced admissible ones.
#[derive(Clone, Debug)]
pub struct PairSumReport {
    pub report: SearchReport<ClassicLabeling, u64>,
    pub copy_sums: Option<Vec<u64>>,
}

/// Decides whether `X[C4]` is distance magic.
///
/// Solves the linear stage exactly; if the pair sums are positive integers
/// in the admissible range, searches for a pairing of `1..=4N` by always
/// pairing the largest unpaired label, whose partner is forced once the
/// target sum is chosen. A found pairing is turned into a labeling of
/// `X[C4]` and checked with [`verify_classic`].
pub fn solve_pair_sum(system: &PairSumSystem, budget: Budget) -> Result<PairSumReport> {
    let meter = Meter::new(budget);
    let none = |detail: String, copy_sums: Option<Vec<u64>>| PairSumReport {
        report: SearchReport {
            outcome: SearchOutcome::ExhaustedNone,
            nodes_explored: meter.nodes(),
            elapsed: meter.elapsed(),
            deterministic: true,
            detail: Some(detail),
        },
        copy_sums,
    };
    let Some((sums, k)) = system.rational_solution()? else {
        return Ok(none(
            "weight equations are inconsistent with the label mass".into(),
            None,
        ));
    };
    if !k.is_integer() || sums.iter().any(|s| !s.is_integer()) {
        return Ok(none("pair sums are not integers".into(), None));
    }
    if sums.iter().any(|s| !s.is_positive()) {
        return Ok(none("pair sums are not all positive".into(), None));
    }
    let labels = system.label_count();
    // Two disjoint pairs with sum s inside 1..=L need 5 <= s <= 2L - 3.
    let (lo, hi) = (5, 2 * labels as i64 - 3);
    let sums: Vec<u64> = sums
        .iter()
        .map(|s| s.to_integer().to_u64().unwrap_or(u64::MAX))
        .collect();
    if sums.iter().any(|&s| (s as i64) < lo || (s as i64) > hi) {
        return Ok(none(
            format!("pair sums fall outside {lo}..={hi}"),
            Some(sums),
        ));
    }
    let k = k.to_integer().to_u64().expect("positive integer weight");

    let mut demand: BTreeMap<u64, usize> = BTreeMap::new();
    for &s in &sums {
        *demand.entry(s).or_default() += 2;
    }
    let targets: Vec<u64> = demand.keys().copied().collect();
    let mut remaining: Vec<usize> = demand.values().copied().collect();
    let mut paired = vec![false; labels as usize + 1];
    let mut pairs: Vec<(u64, u64)> = Vec::with_capacity(labels as usize / 2);
    let mut counter = LocalCounter::new(&meter);
    let result = pair_up(
        labels,
        &targets,
        &mut remaining,
        &mut paired,
        &mut pairs,
        &mut counter,
    );
    counter.finish();

    let outcome = match result {
        PairResult::Found => {
            let labeling = labeling_from_pairs(&sums, &pairs);
            let product = lexicographic_product(system.base(), &cycle(4)?);
            match verify_classic(&product, &labeling)? {
                Verdict::Magic { mu } if mu == k => SearchOutcome::Found { labeling, mu },
                other => {
                    return Err(Error::Internal(format!(
                        "pair-sum labeling rejected by verifier (expected k={k}): {other}"
                    )))
                }
            }
        }
        PairResult::Exhausted => SearchOutcome::ExhaustedNone,
        PairResult::Stopped => SearchOutcome::BudgetExceeded,
    };
    Ok(PairSumReport {
        report: SearchReport {
            outcome,
            nodes_explored: meter.nodes(),
            elapsed: meter.elapsed(),
            deterministic: true,
            detail: None,
        },
        copy_sums: Some(sums),
    })
}

enum PairResult {
    Found,
    Exhausted,
    Stopped,
}

fn pair_up(
    labels: u64,
    targets: &[u64],
    remaining: &mut [usize],
    paired: &mut [bool],
    pairs: &mut Vec<(u64, u64)>,
    counter: &mut LocalCounter<'_>,
) -> PairResult {
    let Some(largest) = (1..=labels).rev().find(|&v| !paired[v as usize]) else {
        return PairResult::Found;
    };
    paired[largest as usize] = true;
    for (t, &target) in targets.iter().enumerate() {
        if remaining[t] == 0 || target <= largest {
            continue;
        }
        let partner = target - largest;
        if partner >= largest || paired[partner as usize] {
            continue;
        }
        if !counter.tick() {
            paired[largest as usize] = false;
            return PairResult::Stopped;
        }
        paired[partner as usize] = true;
        remaining[t] -= 1;
        pairs.push((largest, partner));
        match pair_up(labels, targets, remaining, paired, pairs, counter) {
            PairResult::Exhausted => {}
            done => return done,
        }
        pairs.pop();
        remaining[t] += 1;
        paired[partner as usize] = false;
    }
    paired[largest as usize] = false;
    PairResult::Exhausted
}

/// Hands out pairs to copies: copy `i` takes two pairs of sum `s_i`, the
/// first on `v0, v2` and the second on `v1, v3`.
fn labeling_from_pairs(sums: &[u64], pairs: &[(u64, u64)]) -> ClassicLabeling {
    let mut by_sum: BTreeMap<u64, Vec<(u64, u64)>> = BTreeMap::new();
    for &(a, b) in pairs {
        by_sum.entry(a + b).or_default().push((a, b));
    }
    for list in by_sum.values_mut() {
        list.sort_unstable();
        list.reverse();
    }
    let mut values = vec![0; 4 * sums.len()];
    for (i, s) in sums.iter().enumerate() {
        let list = by_sum
            .get_mut(s)
            .expect("pairing covers every demanded sum");
        let (a, b) = list.pop().expect("two pairs per copy");
        let (c, d) = list.pop().expect("two pairs per copy");
        values[4 * i] = a;
        values[4 * i + 2] = b;
        values[4 * i + 1] = c;
        values[4 * i + 3] = d;
    }
    ClassicLabeling::new(values)
}

/// Largest `n` accepted by [`scan_kmn_c4`].
pub const SCAN_MAX_N: usize = 64;

/// One line of a `K_{m,n}[C4]` scan.
#[derive(Clone, Debug)]
pub struct ScanEntry {
    pub m: usize,
    pub n: usize,
    pub report: PairSumReport,
}

impl ScanEntry {
    /// `m n FOUND|NONE|BUDGET-EXCEEDED`.
    pub fn line(&self) -> String {
        format!("{} {} {}", self.m, self.n, self.report.report.status())
    }
}

/// Decides distance magic of `K_{m,n}[C4]` for every `1 <= m < n <= max_n`.
/// Entries are listed by `m`, then `n`.
pub fn scan_kmn_c4(max_n: usize, budget: Budget) -> Result<Vec<ScanEntry>> {
    if max_n > SCAN_MAX_N {
        return Err(Error::Argument(format!(
            "scan bound {max_n} exceeds the supported maximum {SCAN_MAX_N}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (1..=max_n)
        .flat_map(|m| (m + 1..=max_n).map(move |n| (m, n)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(m, n)| {
            let system = reduce_c4_product(&complete_bipartite(m, n)?);
            Ok(ScanEntry {
                m,
                n,
                report: solve_pair_sum(&system, budget)?,
            })
        })
        .collect()
}
