//! Explicit group distance magic labelings of `G[C4]` and `G[H]`.
//!
//! In every `G[C4]` construction, vertex `j` of the 4-cycle replacing outer
//! vertex `i` has index `4i + j`, and the 4-cycle is `v0 v1 v2 v3 v0`. The
//! constructions share one idea: make both antipodal pairs `{v0, v2}` and
//! `{v1, v3}` of every copy sum to the same element, and make every copy's
//! total independent of the copy. Each vertex then sees one antipodal pair
//! plus `deg(i)` copy totals.
//!
//! Every outcome is run through [`verify_group`] before it is returned, and
//! a mismatch with the predicted magic constant is an [`Error::Internal`].

use std::fmt;

use rayon::prelude::*;

use crate::abelian::{enumerate_groups, is_prime, AbelianGroup, GroupElement, SylowSplit};
use crate::error::{Error, Result};
use crate::graphs::{complete_bipartite, cycle, lexicographic_product, two_adic_valuation, Graph};
use crate::labelings::{verify_group, GroupLabeling, Verdict};

/// Which construction produced an outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// `Z_{2^p} x A` with degrees constant modulo `2^(p-1)`; `mu = (-2c-1, 0)`.
    CyclicTwoPart,
    /// `Z2 x Z2 x A` for arbitrary `G`; `mu = (1, 1, 0)`.
    Klein,
    /// `K_{p,q}[C4]` over `Z4 x A`, `p` even and `q` odd; `mu = (3, 0)`.
    BipartiteZ4,
    /// `G[H]` over `Gamma x Z_p^alpha` from a magic labeling of `H`.
    Composition,
}

impl Theorem {
    pub fn tag(self) -> &'static str {
        match self {
            Theorem::CyclicTwoPart => "cyclic",
            Theorem::Klein => "klein",
            Theorem::BipartiteZ4 => "kpq",
            Theorem::Composition => "compose",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A verified labeling of a product graph.
#[derive(Clone, Debug)]
pub struct ConstructionOutcome {
    pub graph: Graph,
    pub labeling: GroupLabeling,
    pub predicted_mu: GroupElement,
    pub theorem: Theorem,
}

/// How [`label_c4_any_group`] picks a construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    /// Cyclic construction when the largest cyclic 2-factor has order at
    /// least 4, Klein construction otherwise.
    #[default]
    Auto,
    Klein,
    Cyclic,
}

fn finish(
    graph: Graph,
    labeling: GroupLabeling,
    predicted_mu: GroupElement,
    theorem: Theorem,
) -> Result<ConstructionOutcome> {
    match verify_group(&graph, &labeling)? {
        Verdict::Magic { mu } if mu == predicted_mu => Ok(ConstructionOutcome {
            graph,
            labeling,
            predicted_mu,
            theorem,
        }),
        Verdict::Magic { mu } => Err(Error::Internal(format!(
            "{theorem} construction verified magic with mu={mu}, predicted {predicted_mu}"
        ))),
        other => Err(Error::Internal(format!(
            "{theorem} construction rejected by verifier: {other}"
        ))),
    }
}

fn c4_product(g: &Graph) -> Graph {
    lexicographic_product(g, &cycle(4).expect("C4 is valid"))
}

fn single(r: u64) -> GroupElement {
    GroupElement::new(vec![r])
}

/// Labels `G[C4]` over `Z_{2^p} x A`.
///
/// Copy `i` uses the element `a_b` of `A` with `b = floor(i / 2^(p-2))` in
/// [`AbelianGroup::elements`] order, and
///
/// * `f(v_j) = ((2i + j) mod 2^(p-1), a_b)` for `j = 0, 1`,
/// * `f(v_j) = (2^p - 1, 0) - f(v_{j-2})` for `j = 2, 3`.
///
/// Requires `2^(p-2) | n`, `|A| = n / 2^(p-2)`, and all degrees congruent to
/// some `c` modulo `2^(p-1)`; then `mu = (-2c - 1, 0)`.
pub fn label_c4_cyclic_two_part(
    g: &Graph,
    p: u32,
    a: &AbelianGroup,
) -> Result<ConstructionOutcome> {
    if !(2..=62).contains(&p) {
        return Err(Error::Precondition(format!(
            "cyclic 2-part exponent must be in 2..=62, got {p}"
        )));
    }
    let n = g.order() as u64;
    let block = 1u64 << (p - 2);
    if n == 0 || !n.is_multiple_of(block) {
        return Err(Error::Precondition(format!(
            "graph order {n} must be a positive multiple of 2^(p-2) = {block}"
        )));
    }
    if a.order() != n / block {
        return Err(Error::Precondition(format!(
            "complement group {a} has order {}, need n / 2^(p-2) = {}",
            a.order(),
            n / block
        )));
    }
    let half = 1usize << (p - 1);
    let Some(c) = g.degree_class(half) else {
        return Err(Error::Precondition(format!(
            "degrees are not all congruent modulo 2^(p-1) = {half}"
        )));
    };
    let modulus = 1u64 << p;
    let group = AbelianGroup::cyclic(modulus)?.product(a);
    let mut values = Vec::with_capacity(4 * g.order());
    for i in 0..n {
        let a_i = a.element_at(i / block);
        let neg_a = a.neg(&a_i);
        let low: [u64; 2] = [(2 * i) % half as u64, (2 * i + 1) % half as u64];
        values.push(single(low[0]).concat(&a_i));
        values.push(single(low[1]).concat(&a_i));
        values.push(single(modulus - 1 - low[0]).concat(&neg_a));
        values.push(single(modulus - 1 - low[1]).concat(&neg_a));
    }
    let mu_first = (modulus as i128 - 2 * c as i128 - 1).rem_euclid(modulus as i128) as u64;
    let predicted = single(mu_first).concat(&a.identity());
    let labeling = GroupLabeling::new(group, values)?;
    finish(c4_product(g), labeling, predicted, Theorem::CyclicTwoPart)
}

/// Labels `G[C4]` over `Z2 x Z2 x A` for any graph with `|A| = |V(G)|`:
/// copy `i` gets `(0,0,a_i), (1,0,a_i), (1,1,-a_i), (0,1,-a_i)`, so
/// `mu = (1, 1, 0)`.
pub fn label_c4_klein(g: &Graph, a: &AbelianGroup) -> Result<ConstructionOutcome> {
    let n = g.order() as u64;
    if a.order() != n {
        return Err(Error::Precondition(format!(
            "complement group {a} has order {}, need |V(G)| = {n}",
            a.order()
        )));
    }
    let klein = AbelianGroup::new(vec![2, 2])?;
    let group = klein.product(a);
    let pair = |x, y| GroupElement::new(vec![x, y]);
    let mut values = Vec::with_capacity(4 * g.order());
    for (i, a_i) in a.elements().enumerate() {
        debug_assert_eq!(i as u64, a.index_of(&a_i));
        let neg_a = a.neg(&a_i);
        values.push(pair(0, 0).concat(&a_i));
        values.push(pair(1, 0).concat(&a_i));
        values.push(pair(1, 1).concat(&neg_a));
        values.push(pair(0, 1).concat(&neg_a));
    }
    let predicted = pair(1, 1).concat(&a.identity());
    let labeling = GroupLabeling::new(group, values)?;
    finish(c4_product(g), labeling, predicted, Theorem::Klein)
}

/// How an internal construction group maps onto the caller's group.
struct SplitLayout<'s> {
    split: &'s SylowSplit,
    /// Number of leading internal coordinates that belong to the 2-part.
    two_coords: usize,
    /// Permutation: internal 2-coordinate `k` lands in 2-part slot
    /// `perm[k]`.
    perm: Vec<usize>,
}

impl SplitLayout<'_> {
    fn to_caller(&self, internal: &GroupElement) -> GroupElement {
        let r = internal.residues();
        let mut two = vec![0; self.two_coords];
        for (k, &slot) in self.perm.iter().enumerate() {
            two[slot] = r[k];
        }
        self.split.combine(
            &GroupElement::new(two),
            &GroupElement::new(r[self.two_coords..].to_vec()),
        )
    }

    fn relabel(
        &self,
        group: &AbelianGroup,
        outcome: ConstructionOutcome,
    ) -> Result<ConstructionOutcome> {
        let values = outcome
            .labeling
            .values()
            .iter()
            .map(|v| self.to_caller(v))
            .collect();
        let labeling = GroupLabeling::new(group.clone(), values)?;
        let predicted = self.to_caller(&outcome.predicted_mu);
        finish(outcome.graph, labeling, predicted, outcome.theorem)
    }
}

/// Runs the Klein construction inside `group`, whose 2-part must contain at
/// least two `Z2` factors.
fn klein_in(g: &Graph, group: &AbelianGroup, split: &SylowSplit) -> Result<ConstructionOutcome> {
    let two = split.p_part().factors();
    let k = two.len();
    if k < 2 || two[k - 1] != 2 || two[k - 2] != 2 {
        return Err(Error::Precondition(format!(
            "{group} is not of the form Z2 x Z2 x A (2-part {})",
            split.p_part()
        )));
    }
    // Internal layout: (j1, j2, larger 2-factors..., odd part...).
    let a = AbelianGroup::new(two[..k - 2].to_vec())?.product(split.rest());
    let mut perm = vec![k - 2, k - 1];
    perm.extend(0..k - 2);
    let outcome = label_c4_klein(g, &a)?;
    SplitLayout {
        split,
        two_coords: k,
        perm,
    }
    .relabel(group, outcome)
}

/// Runs the cyclic construction inside `group` using its largest cyclic
/// 2-factor `Z_{2^b}`, `b >= 2`.
fn cyclic_in(g: &Graph, group: &AbelianGroup, split: &SylowSplit) -> Result<ConstructionOutcome> {
    let two = split.p_part().factors();
    let Some(&largest) = two.first().filter(|&&m| m >= 4) else {
        return Err(Error::Precondition(format!(
            "{group} has no cyclic 2-factor of order at least 4 (2-part {})",
            split.p_part()
        )));
    };
    let exponent = largest.trailing_zeros();
    let a = AbelianGroup::new(two[1..].to_vec())?.product(split.rest());
    let outcome = label_c4_cyclic_two_part(g, exponent, &a).map_err(|e| match e {
        Error::Precondition(msg) => Error::Precondition(format!(
            "cyclic construction over {group} (2-factor Z{largest}): {msg}"
        )),
        other => other,
    })?;
    SplitLayout {
        split,
        two_coords: two.len(),
        perm: (0..two.len()).collect(),
    }
    .relabel(group, outcome)
}

/// Labels `G[C4]` over an arbitrary abelian group of order `4|V(G)|`,
/// expressing every label in the caller's own factor coordinates.
///
/// With [`Method::Auto`], let `Z_{2^b}` be the largest cyclic 2-factor of
/// `group`. If `b = 1` the group is `Z2 x Z2 x A` and the Klein construction
/// applies. Otherwise the cyclic construction runs with `p = b`, which needs
/// degrees constant modulo `2^(b-1)`; when that fails and the 2-part still
/// has two `Z2` factors, the Klein construction is used instead.
pub fn label_c4_any_group(
    g: &Graph,
    group: &AbelianGroup,
    method: Method,
) -> Result<ConstructionOutcome> {
    let n = g.order() as u64;
    if group.order() != 4 * n || n == 0 {
        return Err(Error::Precondition(format!(
            "group {group} has order {}, need 4|V(G)| = {}",
            group.order(),
            4 * n
        )));
    }
    let split = group.sylow_split(2)?;
    match method {
        Method::Klein => klein_in(g, group, &split),
        Method::Cyclic => cyclic_in(g, group, &split),
        Method::Auto => {
            if split.p_part().factors()[0] == 2 {
                klein_in(g, group, &split)
            } else {
                match cyclic_in(g, group, &split) {
                    Err(Error::Precondition(msg)) => {
                        klein_in(g, group, &split).map_err(|_| Error::Precondition(msg))
                    }
                    result => result,
                }
            }
        }
    }
}

/// The blanket hypothesis on `G` for labeling `G[C4]` over every group of
/// order `4n`: writing `n = 2^p (2k+1)`, all degrees agree modulo `2^(p+1)`.
/// Returns `(p, c)` when it holds.
pub fn all_groups_hypothesis(g: &Graph) -> Option<(u32, usize)> {
    if g.order() == 0 {
        return None;
    }
    let (p, _) = two_adic_valuation(g.order() as u64);
    g.degree_class(1usize << (p + 1)).map(|c| (p, c))
}

/// Labels `G[C4]` for every abelian group of order `4|V(G)|`, for `G` of
/// odd order with all degrees even. Output order follows
/// [`enumerate_groups`].
pub fn eulerian_odd_all_groups(g: &Graph) -> Result<Vec<ConstructionOutcome>> {
    if g.order().is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "graph order {} must be odd",
            g.order()
        )));
    }
    if !g.is_eulerian() {
        return Err(Error::Precondition(
            "graph has a vertex of odd degree".into(),
        ));
    }
    enumerate_groups(4 * g.order() as u64)?
        .par_iter()
        .map(|group| label_c4_any_group(g, group, Method::Auto))
        .collect()
}

/// Labels `K_{p,q}[C4]` over `group` of order `4(p+q)`, `p` even and `q`
/// odd.
///
/// The 2-part of such a group is `Z2 x Z2` or `Z4`. The first case is the
/// Klein construction. In the second, part-A copies `i < p` and part-B
/// copies use `f(v_j) = (2j, a_i)` for `j = 0, 1` and
/// `f(v_j) = (off, 0) - f(v_{j-2})` for `j = 2, 3`, with `off = 1` on part A
/// and `off = 3` on part B, giving `mu = (3, 0)`.
pub fn label_kpq_c4(p: usize, q: usize, group: &AbelianGroup) -> Result<ConstructionOutcome> {
    if p < 2 || !p.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "p must be even and at least 2, got {p}"
        )));
    }
    if q % 2 != 1 {
        return Err(Error::Precondition(format!("q must be odd, got {q}")));
    }
    let n = (p + q) as u64;
    if group.order() != 4 * n {
        return Err(Error::Precondition(format!(
            "group {group} has order {}, need 4(p+q) = {}",
            group.order(),
            4 * n
        )));
    }
    let g = complete_bipartite(p, q)?;
    let split = group.sylow_split(2)?;
    if split.p_part().factors() == [2, 2] {
        return klein_in(&g, group, &split);
    }
    debug_assert_eq!(split.p_part().factors(), &[4]);
    let a = split.rest();
    let z4 = AbelianGroup::cyclic(4)?;
    let internal = z4.product(a);
    let mut values = Vec::with_capacity(4 * (p + q));
    for (i, a_i) in a.elements().enumerate() {
        let neg_a = a.neg(&a_i);
        let offset = if i < p { 1 } else { 3 };
        values.push(single(0).concat(&a_i));
        values.push(single(2).concat(&a_i));
        values.push(single(offset).concat(&neg_a));
        values.push(single((offset + 2) % 4).concat(&neg_a));
    }
    let predicted = single(3).concat(&a.identity());
    let outcome = finish(
        c4_product(&g),
        GroupLabeling::new(internal, values)?,
        predicted,
        Theorem::BipartiteZ4,
    )?;
    SplitLayout {
        split: &split,
        two_coords: 1,
        perm: vec![0],
    }
    .relabel(group, outcome)
}

/// Labels `G[H]` over `Gamma x Z_p^alpha` from a `Gamma`-magic labeling of
/// `H`, where `|V(G)| = p^alpha`.
///
/// Copy `i` of `H` reuses the base labels paired with the `i`-th element of
/// `Z_p^alpha`. Requires all degrees of `G` to share one parity `b` and be
/// divisible by `p`, all degrees of `H` divisible by `p`, and `p | |V(H)|`;
/// then `mu = (b * sum(Gamma) + mu', 0)`.
pub fn label_composition(
    g: &Graph,
    h: &Graph,
    base: &GroupLabeling,
    p: u64,
) -> Result<ConstructionOutcome> {
    let base_mu = match verify_group(h, base) {
        Ok(Verdict::Magic { mu }) => mu,
        Ok(other) => {
            return Err(Error::Precondition(format!(
                "base labeling is not distance magic on H: {other}"
            )))
        }
        Err(e) => {
            return Err(Error::Precondition(format!(
                "base labeling is invalid: {e}"
            )))
        }
    };
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let alpha = prime_power_exponent(g.order() as u64, p).ok_or_else(|| {
        Error::Precondition(format!(
            "|V(G)| = {} is not a positive power of {p}",
            g.order()
        ))
    })?;
    let Some(b) = g.degree_class(2) else {
        return Err(Error::Precondition(
            "degrees of G do not share one parity".into(),
        ));
    };
    let p_us = p as usize;
    if g.degree_class(p_us) != Some(0) {
        return Err(Error::Precondition(format!(
            "some degree of G is not divisible by {p}"
        )));
    }
    if h.degree_class(p_us) != Some(0) {
        return Err(Error::Precondition(format!(
            "some degree of H is not divisible by {p}"
        )));
    }
    if !h.order().is_multiple_of(p_us) {
        return Err(Error::Precondition(format!(
            "|V(H)| = {} is not divisible by {p}",
            h.order()
        )));
    }
    let (labeling, predicted) = compose_labels(g, base, &base_mu, p, alpha, b as u64)?;
    finish(
        lexicographic_product(g, h),
        labeling,
        predicted,
        Theorem::Composition,
    )
}

/// The composition labeling and its predicted constant, without checking
/// any hypothesis.
fn compose_labels(
    g: &Graph,
    base: &GroupLabeling,
    base_mu: &GroupElement,
    p: u64,
    alpha: u32,
    parity: u64,
) -> Result<(GroupLabeling, GroupElement)> {
    let elementary = AbelianGroup::new(vec![p; alpha as usize])?;
    let gamma = base.group();
    let group = gamma.product(&elementary);
    let mut values = Vec::with_capacity(g.order() * base.len());
    for (_, a_i) in (0..g.order()).zip(elementary.elements()) {
        values.extend(base.values().iter().map(|f| f.concat(&a_i)));
    }
    let first = gamma.add(&gamma.scalar_mul(parity, &gamma.sum_all()), base_mu)?;
    let predicted = first.concat(&elementary.identity());
    Ok((GroupLabeling::new(group, values)?, predicted))
}

fn prime_power_exponent(mut n: u64, p: u64) -> Option<u32> {
    if n < p {
        return None;
    }
    let mut alpha = 0;
    while n.is_multiple_of(p) {
        n /= p;
        alpha += 1;
    }
    (n == 1).then_some(alpha)
}

/// Sufficient condition for `G` to admit no group distance magic labeling
/// over any abelian group of order `|V(G)|`: `G` is `r`-regular with `r` odd
/// and `|V(G)| = 2 mod 4`. `false` means unknown.
pub fn no_group_exists(g: &Graph) -> bool {
    matches!(g.regular_degree(), Some(r) if r % 2 == 1) && g.order() % 4 == 2
}
