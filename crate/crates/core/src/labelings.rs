//! Vertex labelings, neighborhood weights, and the distance magic verifiers.
//!
//! The weight of a vertex is the sum of the labels on its open
//! neighborhood. A labeling is magic when it is injective and every vertex
//! has the same weight, the magic constant.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::abelian::{AbelianGroup, GroupElement};
use crate::error::{Error, Result};
use crate::graphs::Graph;

/// An assignment of group elements to vertices, indexed by vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupLabeling {
    group: AbelianGroup,
    values: Vec<GroupElement>,
}

impl GroupLabeling {
    /// Checks that every value belongs to `group`.
    pub fn new(group: AbelianGroup, values: Vec<GroupElement>) -> Result<Self> {
        for v in &values {
            group.check(v)?;
        }
        Ok(Self { group, values })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_file(&self) -> LabelingFile {
        LabelingFile::Group {
            group_spec: self.group.to_string(),
            values: self.values.iter().map(|v| v.residues().to_vec()).collect(),
        }
    }
}

/// An assignment of integers `1..=n` to vertices, indexed by vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicLabeling {
    values: Vec<u64>,
}

impl ClassicLabeling {
    pub fn new(values: Vec<u64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Reads each label modulo `n` (so `n` becomes 0) as an element of `Z_n`.
    pub fn to_cyclic(&self) -> Result<GroupLabeling> {
        let n = self.values.len() as u64;
        let group = AbelianGroup::cyclic(n)?;
        let values = self
            .values
            .iter()
            .map(|&v| {
                if group.factors().is_empty() {
                    GroupElement::new(vec![])
                } else {
                    GroupElement::new(vec![v % n])
                }
            })
            .collect();
        GroupLabeling::new(group, values)
    }

    pub fn to_file(&self) -> LabelingFile {
        LabelingFile::Classic {
            values: self.values.clone(),
        }
    }
}

/// On-disk labeling record. Group labelings carry the group spec and one
/// residue array per vertex; classic labelings carry one integer per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelingFile {
    Group {
        #[serde(rename = "groupSpec")]
        group_spec: String,
        values: Vec<Vec<u64>>,
    },
    Classic {
        values: Vec<u64>,
    },
}

/// A labeling decoded from a [`LabelingFile`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Labeling {
    Group(GroupLabeling),
    Classic(ClassicLabeling),
}

impl LabelingFile {
    /// JSON with one vertex label per line.
    pub fn to_json(&self) -> String {
        fn rows<T: Serialize>(values: &[T]) -> String {
            let rows: Vec<String> = values
                .iter()
                .map(|v| {
                    format!(
                        "    {}",
                        serde_json::to_string(v).expect("labels serialize")
                    )
                })
                .collect();
            if rows.is_empty() {
                "[]".into()
            } else {
                format!("[\n{}\n  ]", rows.join(",\n"))
            }
        }
        match self {
            LabelingFile::Group { group_spec, values } => format!(
                "{{\n  \"groupSpec\": {},\n  \"values\": {}\n}}",
                serde_json::Value::from(group_spec.as_str()),
                rows(values)
            ),
            LabelingFile::Classic { values } => {
                format!("{{\n  \"values\": {}\n}}", rows(values))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn decode(self) -> Result<Labeling> {
        match self {
            LabelingFile::Group { group_spec, values } => {
                let group: AbelianGroup = group_spec.parse()?;
                let values = values.into_iter().map(GroupElement::new).collect();
                Ok(Labeling::Group(GroupLabeling::new(group, values)?))
            }
            LabelingFile::Classic { values } => Ok(Labeling::Classic(ClassicLabeling::new(values))),
        }
    }
}

/// Outcome of a verifier run.
///
/// `Magic` carries the magic constant; the failure variants carry the first
/// violation found scanning vertices in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W> {
    Magic {
        mu: W,
    },
    /// Vertices `first < second` received the same label.
    NotInjective {
        first: usize,
        second: usize,
    },
    /// `vertex` has a weight different from the weight of vertex 0.
    NonConstantWeight {
        vertex: usize,
        weight: W,
        expected: W,
    },
}

impl<W> Verdict<W> {
    pub fn is_magic(&self) -> bool {
        matches!(self, Verdict::Magic { .. })
    }

    pub fn magic_constant(&self) -> Option<&W> {
        match self {
            Verdict::Magic { mu } => Some(mu),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Magic { .. } => "magic",
            Verdict::NotInjective { .. } => "not-injective",
            Verdict::NonConstantWeight { .. } => "non-constant-weight",
        }
    }

    /// The offending vertices, absent for a magic verdict.
    pub fn witness(&self) -> Option<Vec<usize>> {
        match self {
            Verdict::Magic { .. } => None,
            Verdict::NotInjective { first, second } => Some(vec![*first, *second]),
            Verdict::NonConstantWeight { vertex, .. } => Some(vec![0, *vertex]),
        }
    }
}

impl<W: fmt::Display> fmt::Display for Verdict<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Magic { mu } => write!(f, "MAGIC mu={mu}"),
            Verdict::NotInjective { first, second } => {
                write!(f, "NOT-INJECTIVE witness=({first},{second})")
            }
            Verdict::NonConstantWeight {
                vertex,
                weight,
                expected,
            } => write!(
                f,
                "NON-CONSTANT-WEIGHT witness=({vertex}) weight={weight} expected={expected}"
            ),
        }
    }
}

fn check_vertex(g: &Graph, v: usize) -> Result<()> {
    if v >= g.order() {
        return Err(Error::Argument(format!(
            "vertex {v} out of range for graph with {} vertices",
            g.order()
        )));
    }
    Ok(())
}

fn check_length(g: &Graph, len: usize) -> Result<()> {
    if len != g.order() {
        return Err(Error::Structural(format!(
            "labeling has {len} values but graph has {} vertices",
            g.order()
        )));
    }
    Ok(())
}

/// Group weight `w(v)`: sum of labels over the open neighborhood of `v`.
pub fn group_weight(g: &Graph, labeling: &GroupLabeling, v: usize) -> Result<GroupElement> {
    check_length(g, labeling.len())?;
    check_vertex(g, v)?;
    Ok(group_weight_unchecked(g, labeling, v))
}

fn group_weight_unchecked(g: &Graph, labeling: &GroupLabeling, v: usize) -> GroupElement {
    let group = labeling.group();
    let mut acc = group.identity();
    for &u in g.neighbors(v) {
        group.add_assign(&mut acc, &labeling.values[u]);
    }
    acc
}

/// Integer weight `w(v)` under a classic labeling.
pub fn classic_weight(g: &Graph, labeling: &ClassicLabeling, v: usize) -> Result<u64> {
    check_length(g, labeling.values.len())?;
    check_vertex(g, v)?;
    Ok(g.neighbors(v).iter().map(|&u| labeling.values[u]).sum())
}

/// Verifies a group distance magic labeling: the labeling must cover the
/// vertex set, have exactly `|G|` vertices, be injective, and give every
/// vertex the same weight.
pub fn verify_group(g: &Graph, labeling: &GroupLabeling) -> Result<Verdict<GroupElement>> {
    check_length(g, labeling.len())?;
    let order = labeling.group().order();
    if order != g.order() as u64 {
        return Err(Error::Structural(format!(
            "group {} has order {order} but graph has {} vertices",
            labeling.group(),
            g.order()
        )));
    }
    let mut seen: HashMap<&GroupElement, usize> = HashMap::with_capacity(labeling.len());
    for (v, value) in labeling.values.iter().enumerate() {
        if let Some(&first) = seen.get(value) {
            return Ok(Verdict::NotInjective { first, second: v });
        }
        seen.insert(value, v);
    }
    constant_weight(g.order(), |v| group_weight_unchecked(g, labeling, v))
}

/// Verifies a classic distance magic labeling.
///
/// Values must be a bijection onto `1..=n`; anything else is a structural
/// error rather than a verdict. For an `r`-regular graph a magic verdict is
/// cross-checked against the closed form `k = r(n+1)/2`.
pub fn verify_classic(g: &Graph, labeling: &ClassicLabeling) -> Result<Verdict<u64>> {
    check_length(g, labeling.values.len())?;
    let n = g.order() as u64;
    let mut seen = vec![false; g.order() + 1];
    for (v, &value) in labeling.values.iter().enumerate() {
        if value < 1 || value > n {
            return Err(Error::Structural(format!(
                "vertex {v} has label {value} outside 1..={n}"
            )));
        }
        if std::mem::replace(&mut seen[value as usize], true) {
            return Err(Error::Structural(format!(
                "label {value} used more than once (again at vertex {v})"
            )));
        }
    }
    let verdict = constant_weight(g.order(), |v| {
        g.neighbors(v)
            .iter()
            .map(|&u| labeling.values[u])
            .sum::<u64>()
    })?;
    if let (Verdict::Magic { mu }, Some(r)) = (&verdict, g.regular_degree()) {
        let predicted = r as u64 * (n + 1);
        if !predicted.is_multiple_of(2) || *mu != predicted / 2 {
            return Err(Error::Internal(format!(
                "{r}-regular graph on {n} vertices verified magic with k={mu}, expected r(n+1)/2"
            )));
        }
    }
    Ok(verdict)
}

fn constant_weight<W: PartialEq>(n: usize, weight: impl Fn(usize) -> W) -> Result<Verdict<W>> {
    if n == 0 {
        return Err(Error::Structural(
            "cannot verify a labeling of the empty graph".into(),
        ));
    }
    let expected = weight(0);
    for v in 1..n {
        let w = weight(v);
        if w != expected {
            return Ok(Verdict::NonConstantWeight {
                vertex: v,
                weight: w,
                expected,
            });
        }
    }
    Ok(Verdict::Magic { mu: expected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{cycle, Graph};

    fn z(n: u64, vals: &[u64]) -> GroupLabeling {
        let group = AbelianGroup::cyclic(n).unwrap();
        GroupLabeling::new(
            group,
            vals.iter().map(|&v| GroupElement::new(vec![v])).collect(),
        )
        .unwrap()
    }

    #[test]
    fn weight_examples() {
        let c4 = cycle(4).unwrap();
        assert_eq!(
            classic_weight(&c4, &ClassicLabeling::new(vec![1, 2, 4, 3]), 0).unwrap(),
            5
        );
        assert_eq!(
            group_weight(&c4, &z(4, &[1, 2, 0, 3]), 1).unwrap(),
            GroupElement::new(vec![1])
        );
        let isolated = Graph::empty(4);
        assert!(group_weight(&isolated, &z(4, &[0, 1, 2, 3]), 2)
            .unwrap()
            .is_identity());
        assert_eq!(
            classic_weight(&isolated, &ClassicLabeling::new(vec![1, 2, 3, 4]), 3).unwrap(),
            0
        );
        assert!(matches!(
            group_weight(&c4, &z(4, &[1, 2, 0, 3]), 4),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn verify_group_examples() {
        let c4 = cycle(4).unwrap();
        assert_eq!(
            verify_group(&c4, &z(4, &[1, 2, 0, 3])).unwrap(),
            Verdict::Magic {
                mu: GroupElement::new(vec![1])
            }
        );
        assert_eq!(
            verify_group(&c4, &z(4, &[0, 1, 2, 2])).unwrap(),
            Verdict::NotInjective {
                first: 2,
                second: 3
            }
        );
        let c3 = cycle(3).unwrap();
        let verdict = verify_group(&c3, &z(3, &[0, 1, 2])).unwrap();
        assert_eq!(verdict.status(), "non-constant-weight");
        assert_eq!(verdict.witness(), Some(vec![0, 1]));
    }

    #[test]
    fn verify_group_size_mismatch() {
        let c4 = cycle(4).unwrap();
        assert!(matches!(
            verify_group(&c4, &z(5, &[0, 1, 2, 3])),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            verify_group(&c4, &z(4, &[0, 1, 2])),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn verify_classic_examples() {
        let c4 = cycle(4).unwrap();
        assert_eq!(
            verify_classic(&c4, &ClassicLabeling::new(vec![1, 2, 4, 3])).unwrap(),
            Verdict::Magic { mu: 5 }
        );
        assert_eq!(
            verify_classic(&c4, &ClassicLabeling::new(vec![1, 2, 3, 4])).unwrap(),
            Verdict::NonConstantWeight {
                vertex: 1,
                weight: 4,
                expected: 6
            }
        );
        assert!(matches!(
            verify_classic(&c4, &ClassicLabeling::new(vec![1, 2, 2, 4])),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            verify_classic(&c4, &ClassicLabeling::new(vec![0, 1, 2, 3])),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn classic_magic_is_cyclic_magic() {
        let c4 = cycle(4).unwrap();
        let classic = ClassicLabeling::new(vec![1, 2, 4, 3]);
        let as_group = classic.to_cyclic().unwrap();
        assert_eq!(
            verify_group(&c4, &as_group).unwrap(),
            Verdict::Magic {
                mu: GroupElement::new(vec![1])
            }
        );
    }

    #[test]
    fn labeling_file_round_trip() {
        let labeling = z(4, &[1, 2, 0, 3]);
        let text = labeling.to_file().to_json();
        assert!(text.contains("\"groupSpec\": \"Z4\""));
        let back = LabelingFile::from_json(&text).unwrap().decode().unwrap();
        assert_eq!(back, Labeling::Group(labeling));
        let classic = ClassicLabeling::new(vec![1, 2, 4, 3]);
        let back = LabelingFile::from_json(&classic.to_file().to_json())
            .unwrap()
            .decode()
            .unwrap();
        assert_eq!(back, Labeling::Classic(classic));
        let bad = r#"{"groupSpec": "Z4", "values": [[4]]}"#;
        assert!(LabelingFile::from_json(bad).unwrap().decode().is_err());
    }
}
