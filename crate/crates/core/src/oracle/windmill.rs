//! Infeasibility certificate for classic distance magic labelings of
//! `D_4^t[C4]`.
//!
//! Writing `a_c, a_y^i, a_x^i, a_z^i` for the pair sums of the copies that
//! replace the windmill vertices `c, y^i, x^i, z^i` (see
//! [`dutch_windmill`](crate::graphs::dutch_windmill) for the numbering), the
//! weight equations of the pair-sum system are combined into
//!
//! 1. `a_y^i = a_z^i`,
//! 2. `a_x^i = -2 a_c + 3 a^i` with `a^i = a_y^i`,
//! 3. `k = -2 a_c + 7 a^i`, hence all `a^i` equal a common `a`,
//! 4. `3 a_c = (7 - 4t) a`,
//!
//! and the last equation has no solution with `a_c, a > 0` once `t >= 2`.
//! Every step records the integer combination of earlier steps it came from,
//! and [`Certificate::check`] replays them against a freshly built system.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::pair_sum::{reduce_c4_product, PairSumSystem};
use crate::error::{Error, Result};
use crate::graphs::dutch_windmill;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Var {
    /// Pair sum of the copy replacing windmill vertex `v`.
    Sum(usize),
    /// The magic constant `k`.
    Magic,
}

/// Linear form `sum coeff * var`, read as the equation `form = 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct LinForm(BTreeMap<Var, i64>);

impl LinForm {
    fn add_scaled(&mut self, other: &LinForm, factor: i64) {
        for (&v, &c) in &other.0 {
            let entry = self.0.entry(v).or_insert(0);
            *entry += factor * c;
            if *entry == 0 {
                self.0.remove(&v);
            }
        }
    }

    fn coeff(&self, v: Var) -> i64 {
        self.0.get(&v).copied().unwrap_or(0)
    }

    /// Divides by `d`; `None` if some coefficient is not a multiple.
    fn divide(&self, d: i64) -> Option<LinForm> {
        self.0
            .iter()
            .map(|(&v, &c)| (c % d == 0).then_some((v, c / d)))
            .collect::<Option<BTreeMap<_, _>>>()
            .map(LinForm)
    }
}

/// How a step was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Derivation {
    /// The weight equation of the copy replacing windmill vertex `vertex`.
    Weight { vertex: usize },
    /// `divisor * this = sum coeff * step[index]` over earlier steps.
    Combination {
        terms: Vec<(usize, i64)>,
        divisor: i64,
    },
    /// The referenced step has only pair-sum variables, all with positive
    /// coefficients, so it fails for positive pair sums.
    Positivity { step: usize },
}

/// One named equation of a certificate.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateStep {
    pub name: String,
    pub equation: String,
    pub derivation: Derivation,
    #[serde(skip)]
    form: LinForm,
}

/// Machine-checkable proof that `D_4^t[C4]` has no distance magic labeling.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub t: usize,
    pub steps: Vec<CertificateStep>,
}

struct Names {
    t: usize,
}

impl Names {
    fn c(&self) -> Var {
        Var::Sum(0)
    }
    fn y(&self, i: usize) -> Var {
        Var::Sum(3 * i + 1)
    }
    fn x(&self, i: usize) -> Var {
        Var::Sum(3 * i + 2)
    }
    fn z(&self, i: usize) -> Var {
        Var::Sum(3 * i + 3)
    }

    fn name(&self, v: Var) -> String {
        match v {
            Var::Magic => "k".into(),
            Var::Sum(0) => "a_c".into(),
            Var::Sum(s) => {
                let i = (s - 1) / 3;
                debug_assert!(i < self.t);
                match (s - 1) % 3 {
                    0 => format!("a_y^{i}"),
                    1 => format!("a_x^{i}"),
                    _ => format!("a_z^{i}"),
                }
            }
        }
    }

    /// `lhs = rhs` with `lhs` listing `vars` moved to the left and every
    /// other term on the right.
    fn render(&self, form: &LinForm, left: &[Var], alias: &dyn Fn(Var) -> String) -> String {
        let side = |terms: Vec<(Var, i64)>| -> String {
            if terms.is_empty() {
                return "0".into();
            }
            terms
                .iter()
                .enumerate()
                .map(|(n, &(v, c))| {
                    let name = alias(v);
                    let body = if c.abs() == 1 {
                        name
                    } else {
                        format!("{}*{name}", c.abs())
                    };
                    match (n, c < 0) {
                        (0, true) => format!("-{body}"),
                        (0, false) => body,
                        (_, true) => format!(" - {body}"),
                        (_, false) => format!(" + {body}"),
                    }
                })
                .collect()
        };
        // keep the left side positive
        let sign = if left
            .iter()
            .map(|&v| form.coeff(v))
            .find(|&c| c != 0)
            .unwrap_or(1)
            < 0
        {
            -1
        } else {
            1
        };
        let lhs: Vec<(Var, i64)> = left
            .iter()
            .map(|&v| (v, sign * form.coeff(v)))
            .filter(|&(_, c)| c != 0)
            .collect();
        let rhs: Vec<(Var, i64)> = form
            .0
            .iter()
            .filter(|(v, _)| !left.contains(v))
            .map(|(&v, &c)| (v, -sign * c))
            .collect();
        format!("{} = {}", side(lhs), side(rhs))
    }
}

fn axioms(system: &PairSumSystem) -> Vec<LinForm> {
    system
        .equations()
        .iter()
        .map(|eq| {
            let mut form = LinForm::default();
            for &(j, c) in &eq.terms {
                form.0.insert(Var::Sum(j), c);
            }
            form.0.insert(Var::Magic, -1);
            form
        })
        .collect()
}

struct Builder {
    steps: Vec<CertificateStep>,
}

impl Builder {
    fn push(
        &mut self,
        name: String,
        form: LinForm,
        equation: String,
        derivation: Derivation,
    ) -> usize {
        self.steps.push(CertificateStep {
            name,
            equation,
            derivation,
            form,
        });
        self.steps.len() - 1
    }

    fn combine(&self, terms: &[(usize, i64)], divisor: i64) -> LinForm {
        let mut form = LinForm::default();
        for &(idx, c) in terms {
            form.add_scaled(&self.steps[idx].form, c);
        }
        form.divide(divisor)
            .expect("certificate combination divides exactly")
    }
}

/// Builds the infeasibility certificate for `D_4^t[C4]`, `t >= 2`.
pub fn windmill_certificate(t: usize) -> Result<Certificate> {
    if t < 2 {
        return Err(Error::Argument(format!(
            "windmill needs at least 2 copies, got t = {t}"
        )));
    }
    let system = reduce_c4_product(&dutch_windmill(4, t)?);
    let names = Names { t };
    let plain = |v: Var| names.name(v);
    let mut b = Builder { steps: Vec::new() };

    let mut weight = BTreeMap::new();
    for (vertex, form) in axioms(&system).into_iter().enumerate() {
        let eq = names.render(&form, &[Var::Magic], &plain);
        let idx = b.push(
            format!("w({})", &names.name(Var::Sum(vertex))[2..]),
            form,
            eq,
            Derivation::Weight { vertex },
        );
        weight.insert(vertex, idx);
    }
    let w = |v: Var| match v {
        Var::Sum(s) => weight[&s],
        Var::Magic => unreachable!(),
    };

    let mut yz = Vec::with_capacity(t);
    let mut x_sub = Vec::with_capacity(t);
    let mut k_of = Vec::with_capacity(t);
    for i in 0..t {
        let (x, y, z) = (names.x(i), names.y(i), names.z(i));
        let terms = vec![(w(y), 1), (w(z), -1)];
        let form = b.combine(&terms, 1);
        let eq = names.render(&form, &[y], &plain);
        let s1 = b.push(
            format!("equal y/z pair sums {i}"),
            form,
            eq,
            Derivation::Combination { terms, divisor: 1 },
        );
        yz.push(s1);

        let terms = vec![(w(x), -1), (w(y), 1), (s1, -2)];
        let form = b.combine(&terms, 1);
        let eq = names.render(&form, &[x], &|v| {
            if v == y {
                format!("a^{i}")
            } else {
                names.name(v)
            }
        });
        let s2 = b.push(
            format!("x pair sum {i}"),
            form,
            eq,
            Derivation::Combination { terms, divisor: 1 },
        );
        x_sub.push(s2);

        let terms = vec![(w(y), 1), (s2, -2)];
        let form = b.combine(&terms, 1);
        let eq = names.render(&form, &[Var::Magic], &|v| {
            if v == y {
                format!("a^{i}")
            } else {
                names.name(v)
            }
        });
        let s3 = b.push(
            format!("weight via a^{i}"),
            form,
            eq,
            Derivation::Combination { terms, divisor: 1 },
        );
        k_of.push(s3);
    }

    let mut equal_a = Vec::with_capacity(t);
    for i in 1..t {
        let terms = vec![(k_of[i], 1), (k_of[0], -1)];
        let form = b.combine(&terms, 7);
        let eq = names.render(&form, &[names.y(i)], &|v| match v {
            Var::Sum(s) if s == names.y(i).sum_index() => format!("a^{i}"),
            _ => "a".into(),
        });
        equal_a.push(b.push(
            format!("equal a^{i}"),
            form,
            eq,
            Derivation::Combination { terms, divisor: 7 },
        ));
    }

    let mut terms = vec![(w(names.c()), 1), (k_of[0], -1)];
    terms.extend(yz.iter().map(|&s| (s, 2)));
    terms.extend(equal_a.iter().map(|&s| (s, -4)));
    let form = b.combine(&terms, 1);
    let (c, a) = (names.c(), names.y(0));
    debug_assert_eq!(form.coeff(c), 3);
    debug_assert_eq!(form.coeff(a), 4 * t as i64 - 7);
    let eq = format!("3*a_c = {}*a", 7 - 4 * t as i64);
    let last = b.push(
        "center".into(),
        form,
        eq.clone(),
        Derivation::Combination { terms, divisor: 1 },
    );

    let form = b.steps[last].form.clone();
    b.push(
        "contradiction".into(),
        form,
        format!("{eq} : infeasible (positivity)"),
        Derivation::Positivity { step: last },
    );

    let cert = Certificate { t, steps: b.steps };
    cert.check()?;
    Ok(cert)
}

impl Var {
    fn sum_index(self) -> usize {
        match self {
            Var::Sum(s) => s,
            Var::Magic => usize::MAX,
        }
    }
}

impl Certificate {
    /// Replays every step against the pair-sum system of `D_4^t[C4]` built
    /// from scratch. Errors name the first step that does not follow.
    pub fn check(&self) -> Result<()> {
        let system = reduce_c4_product(&dutch_windmill(4, self.t)?);
        let axioms = axioms(&system);
        let fail = |i: usize, why: &str| {
            Err(Error::Internal(format!(
                "certificate step {i} ({}) does not follow: {why}",
                self.steps[i].name
            )))
        };
        let mut concluded = false;
        for (i, step) in self.steps.iter().enumerate() {
            match &step.derivation {
                Derivation::Weight { vertex } => {
                    if axioms.get(*vertex) != Some(&step.form) {
                        return fail(i, "not the weight equation it names");
                    }
                }
                Derivation::Combination { terms, divisor } => {
                    if *divisor == 0 || terms.iter().any(|&(j, _)| j >= i) {
                        return fail(i, "refers to a later step or divides by zero");
                    }
                    let mut acc = LinForm::default();
                    for &(j, c) in terms {
                        acc.add_scaled(&self.steps[j].form, c);
                    }
                    let mut scaled = LinForm::default();
                    scaled.add_scaled(&step.form, *divisor);
                    if acc != scaled {
                        return fail(i, "combination does not produce the stated equation");
                    }
                }
                Derivation::Positivity { step: j } => {
                    if *j >= i || self.steps[*j].form != step.form {
                        return fail(i, "must restate an earlier step");
                    }
                    let form = &step.form;
                    let all_positive = !form.0.is_empty()
                        && form.coeff(Var::Magic) == 0
                        && form.0.values().all(|&c| c > 0);
                    if !all_positive {
                        return fail(i, "coefficients are not all positive");
                    }
                    concluded = true;
                }
            }
        }
        if !concluded {
            return Err(Error::Internal(
                "certificate has no contradiction step".into(),
            ));
        }
        Ok(())
    }

    /// The final equation, e.g. `3*a_c = -1*a : infeasible (positivity)`.
    pub fn conclusion(&self) -> &str {
        &self
            .steps
            .last()
            .expect("certificates are nonempty")
            .equation
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates always serialize")
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            writeln!(f, "{}: {}", step.name, step.equation)?;
        }
        Ok(())
    }
}
