//! Finite abelian groups given as direct products of cyclic groups.
//!
//! A group is stored structurally as its list of cyclic factor orders
//! `Z_{m_1} x ... x Z_{m_r}`; elements are residue vectors added
//! componentwise. The empty factor list is the trivial group.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite abelian group `Z_{m_1} x ... x Z_{m_r}` with every `m_i >= 2`.
///
/// Equality and hashing go through the primary decomposition, so `Z6` and
/// `Z2xZ3` compare equal even though their factor lists differ.
#[derive(Clone, Debug)]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

/// One element of an [`AbelianGroup`]: a residue per cyclic factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    residues: Vec<u64>,
}

impl GroupElement {
    pub fn new(residues: Vec<u64>) -> Self {
        Self { residues }
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn into_residues(self) -> Vec<u64> {
        self.residues
    }

    pub fn is_identity(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }

    /// Concatenates the coordinates of two elements, giving an element of
    /// the direct product of their groups.
    pub fn concat(&self, other: &GroupElement) -> GroupElement {
        let mut residues = self.residues.clone();
        residues.extend_from_slice(&other.residues);
        GroupElement { residues }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl AbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if let Some(&bad) = factors.iter().find(|&&m| m < 2) {
            return Err(Error::Argument(format!(
                "cyclic factor order must be at least 2, got {bad}"
            )));
        }
        Ok(Self { factors })
    }

    pub fn trivial() -> Self {
        Self {
            factors: Vec::new(),
        }
    }

    pub fn cyclic(m: u64) -> Result<Self> {
        if m == 1 {
            return Ok(Self::trivial());
        }
        Self::new(vec![m])
    }

    /// Direct product `self x other`, factors concatenated in order.
    pub fn product(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        AbelianGroup { factors }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.factors.len()],
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.residues.len() == self.factors.len()
            && g.residues.iter().zip(&self.factors).all(|(r, m)| r < m)
    }

    /// Builds an element from raw residues, reducing each modulo its factor.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        if residues.len() != self.factors.len() {
            return Err(Error::Structural(format!(
                "element has {} coordinates but {} has {} factors",
                residues.len(),
                self,
                self.factors.len()
            )));
        }
        Ok(GroupElement {
            residues: residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &m)| r.rem_euclid(m as i64) as u64)
                .collect(),
        })
    }

    /// Checks that `g` is a valid element of this group.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if g.residues.len() != self.factors.len() {
            return Err(Error::Structural(format!(
                "element {g} has {} coordinates, group {self} has {} factors",
                g.residues.len(),
                self.factors.len()
            )));
        }
        if let Some((r, m)) = g.residues.iter().zip(&self.factors).find(|(r, m)| r >= m) {
            return Err(Error::Structural(format!(
                "residue {r} out of range for factor Z{m} in {g}"
            )));
        }
        Ok(())
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        if g.residues.len() != self.factors.len() || h.residues.len() != self.factors.len() {
            return Err(Error::Structural(format!(
                "cannot add {g} and {h} in {self}: residue length mismatch"
            )));
        }
        Ok(self.add_unchecked(g, h))
    }

    /// Adds two elements already known to belong to this group.
    pub(crate) fn add_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        GroupElement {
            residues: g
                .residues
                .iter()
                .zip(&h.residues)
                .zip(&self.factors)
                .map(|((a, b), m)| (a + b) % m)
                .collect(),
        }
    }

    pub(crate) fn add_assign(&self, acc: &mut GroupElement, g: &GroupElement) {
        for ((a, b), m) in acc.residues.iter_mut().zip(&g.residues).zip(&self.factors) {
            *a = (*a + b) % m;
        }
    }

    pub fn neg(&self, g: &GroupElement) -> GroupElement {
        GroupElement {
            residues: g
                .residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &m)| (m - r % m) % m)
                .collect(),
        }
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.add(g, &self.neg(h))
    }

    /// `k`-fold sum `g + g + ... + g`.
    pub fn scalar_mul(&self, k: u64, g: &GroupElement) -> GroupElement {
        GroupElement {
            residues: g
                .residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &m)| ((k as u128 * r as u128) % m as u128) as u64)
                .collect(),
        }
    }

    /// Signed multiple; negative `k` multiplies the inverse.
    pub fn scalar_mul_signed(&self, k: i64, g: &GroupElement) -> GroupElement {
        let h = self.scalar_mul(k.unsigned_abs(), g);
        if k < 0 {
            self.neg(&h)
        } else {
            h
        }
    }

    /// Sum of every element of the group.
    ///
    /// Per coordinate, each residue of `Z_m` appears `order / m` times, so the
    /// sum is `(order / m) * m(m-1)/2 mod m`.
    pub fn sum_all(&self) -> GroupElement {
        let order = self.order() as u128;
        GroupElement {
            residues: self
                .factors
                .iter()
                .map(|&m| {
                    let m = m as u128;
                    let per_cycle = (m * (m - 1) / 2) % m;
                    ((order / m) % m * per_cycle % m) as u64
                })
                .collect(),
        }
    }

    /// Element with mixed-radix index `idx` (last factor varies fastest).
    pub fn element_at(&self, mut idx: u64) -> GroupElement {
        let mut residues = vec![0; self.factors.len()];
        for (slot, &m) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = idx % m;
            idx /= m;
        }
        GroupElement { residues }
    }

    /// Inverse of [`element_at`](Self::element_at).
    pub fn index_of(&self, g: &GroupElement) -> u64 {
        g.residues
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&r, &m)| acc * m + r)
    }

    /// All elements in mixed-radix lexicographic order, identity first.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    /// Primary decomposition as sorted `(prime, exponent)` pairs.
    pub fn primary_decomposition(&self) -> Vec<(u64, u32)> {
        let mut parts: Vec<(u64, u32)> = self.factors.iter().flat_map(|&m| factorize(m)).collect();
        parts.sort_unstable();
        parts
    }

    /// The isomorphic group written with prime-power factors, ordered by
    /// ascending prime and descending exponent (`Z4xZ2xZ3`).
    pub fn primary_form(&self) -> AbelianGroup {
        let mut parts = self.primary_decomposition();
        parts.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        AbelianGroup {
            factors: parts.into_iter().map(|(p, e)| p.pow(e)).collect(),
        }
    }

    /// Splits every factor `Z_m` into `Z_{p^e} x Z_{m/p^e}` by the Chinese
    /// remainder theorem and gathers the `p`-power pieces.
    pub fn sylow_split(&self, p: u64) -> Result<SylowSplit> {
        if !is_prime(p) {
            return Err(Error::Argument(format!("{p} is not prime")));
        }
        let mut pieces = Vec::with_capacity(self.factors.len());
        let mut p_factors: Vec<(usize, u64)> = Vec::new();
        let mut rest_factors = Vec::new();
        for (i, &m) in self.factors.iter().enumerate() {
            let mut q = 1;
            let mut r = m;
            while r % p == 0 {
                r /= p;
                q *= p;
            }
            if q > 1 {
                p_factors.push((i, q));
            }
            let rest_slot = (r > 1).then(|| {
                rest_factors.push(r);
                rest_factors.len() - 1
            });
            pieces.push(CrtPiece {
                p_power: q,
                p_slot: None,
                rest: r,
                rest_slot,
            });
        }
        // Largest p-power first; ties keep the original factor order.
        p_factors.sort_by_key(|&(_, q)| std::cmp::Reverse(q));
        for (slot, &(i, _)) in p_factors.iter().enumerate() {
            pieces[i].p_slot = Some(slot);
        }
        Ok(SylowSplit {
            prime: p,
            p_part: AbelianGroup {
                factors: p_factors.iter().map(|&(_, q)| q).collect(),
            },
            rest: AbelianGroup {
                factors: rest_factors,
            },
            pieces,
        })
    }
}

impl PartialEq for AbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.primary_decomposition() == other.primary_decomposition()
    }
}

impl Eq for AbelianGroup {}

impl Hash for AbelianGroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.primary_decomposition().hash(state);
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, m) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "Z{m}")?;
        }
        Ok(())
    }
}

/// Parses `Z4xZ2xZ5` (case-insensitive). `1` and `trivial` denote the
/// trivial group.
impl FromStr for AbelianGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        if lower == "1" || lower == "trivial" {
            return Ok(Self::trivial());
        }
        let factors = lower
            .split('x')
            .map(|part| {
                let digits = part.strip_prefix('z').ok_or_else(|| {
                    Error::Parse(format!("bad factor {part:?} in group spec {s:?}"))
                })?;
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(Error::Parse(format!(
                        "bad factor {part:?} in group spec {s:?}"
                    )));
                }
                digits
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("bad factor {part:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Serialize for AbelianGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AbelianGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug)]
struct CrtPiece {
    p_power: u64,
    p_slot: Option<usize>,
    rest: u64,
    rest_slot: Option<usize>,
}

/// Result of [`AbelianGroup::sylow_split`]: `G ~ p_part x rest`, together
/// with the coordinate maps between the split form and `G` itself.
#[derive(Clone, Debug)]
pub struct SylowSplit {
    prime: u64,
    p_part: AbelianGroup,
    rest: AbelianGroup,
    pieces: Vec<CrtPiece>,
}

impl SylowSplit {
    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// The `p`-primary component, factors sorted by descending order.
    pub fn p_part(&self) -> &AbelianGroup {
        &self.p_part
    }

    /// The complement: each original factor with its `p`-power removed.
    pub fn rest(&self) -> &AbelianGroup {
        &self.rest
    }

    /// Maps a pair `(x, y)` of `p_part x rest` to the element of the original
    /// group with the same CRT components.
    pub fn combine(&self, p_elem: &GroupElement, rest_elem: &GroupElement) -> GroupElement {
        GroupElement {
            residues: self
                .pieces
                .iter()
                .map(|piece| {
                    let a = piece.p_slot.map_or(0, |s| p_elem.residues[s]);
                    let b = piece.rest_slot.map_or(0, |s| rest_elem.residues[s]);
                    crt(a, piece.p_power, b, piece.rest)
                })
                .collect(),
        }
    }

    /// Inverse of [`combine`](Self::combine).
    pub fn split(&self, g: &GroupElement) -> (GroupElement, GroupElement) {
        let mut p_elem = self.p_part.identity();
        let mut rest_elem = self.rest.identity();
        for (piece, &r) in self.pieces.iter().zip(&g.residues) {
            if let Some(s) = piece.p_slot {
                p_elem.residues[s] = r % piece.p_power;
            }
            if let Some(s) = piece.rest_slot {
                rest_elem.residues[s] = r % piece.rest;
            }
        }
        (p_elem, rest_elem)
    }
}

/// Unique `x mod q*r` with `x = a mod q`, `x = b mod r`, for coprime `q`, `r`.
fn crt(a: u64, q: u64, b: u64, r: u64) -> u64 {
    if r == 1 {
        return a;
    }
    if q == 1 {
        return b;
    }
    let (q, r, a, b) = (q as i128, r as i128, a as i128, b as i128);
    let inv = i128::extended_gcd(&q, &r).x.rem_euclid(r);
    let t = ((b - a).rem_euclid(r) * inv).rem_euclid(r);
    (a + q * t) as u64
}

pub fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Partitions of `n` into parts in non-increasing order, listed in reverse
/// lexicographic order: `[3], [2,1], [1,1,1]`.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// One representative per isomorphism class of abelian groups of the given
/// order, in primary form.
///
/// Classes are the product over primes `p^e || order` of the partitions of
/// `e`; the first prime varies slowest and, within a prime, partitions are
/// listed from the cyclic group down to the elementary abelian one.
pub fn enumerate_groups(order: u64) -> Result<Vec<AbelianGroup>> {
    if order == 0 {
        return Err(Error::Argument("group order must be at least 1".into()));
    }
    let mut groups = vec![Vec::<u64>::new()];
    for (p, e) in factorize(order) {
        let shapes: Vec<Vec<u64>> = partitions(e)
            .into_iter()
            .map(|parts| parts.into_iter().map(|k| p.pow(k)).collect())
            .collect();
        groups = groups
            .into_iter()
            .flat_map(|prefix| {
                shapes.iter().map(move |shape| {
                    let mut g = prefix.clone();
                    g.extend_from_slice(shape);
                    g
                })
            })
            .collect();
    }
    Ok(groups
        .into_iter()
        .map(|factors| AbelianGroup { factors })
        .collect())
}

/// Number of abelian groups of the given order up to isomorphism.
pub fn count_groups(order: u64) -> usize {
    factorize(order)
        .into_iter()
        .map(|(_, e)| partitions(e).len())
        .product()
}

/// Multiset of cyclic factor orders keyed by prime, used by tests and the
/// construction dispatch to inspect 2-parts.
pub fn exponents_by_prime(group: &AbelianGroup) -> BTreeMap<u64, Vec<u32>> {
    let mut map: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for (p, e) in group.primary_decomposition() {
        map.entry(p).or_default().push(e);
    }
    for exps in map.values_mut() {
        exps.sort_unstable_by(|a, b| b.cmp(a));
    }
    map
}
