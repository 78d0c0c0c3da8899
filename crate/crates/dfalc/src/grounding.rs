//! Fuzzy interpretations over a finite individual domain.
//!
//! A grounding assigns every concept a membership vector and every role a
//! membership matrix, all degrees in [0, 1]. Concepts are evaluated under
//! Gödel semantics: negation is `1 - x`, conjunction is `min`, disjunction
//! is `max`, and the quantifiers take `sup`/`inf` over the finite domain,
//! which here are plain `max`/`min` over the individuals.
//!
//! The module also provides the crisp side: thresholding a grounding into
//! a three-valued interpretation, strong-Kleene evaluation of axioms over
//! it, the success-rate metric, and exhaustive enumeration of classical
//! models for small ontologies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{AssertionKind, ConceptExpr, Ontology, Signature, TBoxAxiom};

#[derive(Debug, Error, PartialEq)]
pub enum GroundingError {
    #[error("name `{0}` is not covered by the grounding")]
    UnknownName(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("entry for `{name}` is {value}, outside [0, 1]")]
    ValueOutOfRange { name: String, value: f64 },
    #[error("the TBox is empty")]
    EmptyTBox,
    #[error("interpretation space of {bits} bits exceeds the 2^20 enumeration budget")]
    TooLarge { bits: usize },
    #[error("crisp threshold {0} is outside [0.5, 1]")]
    BadAlpha(f64),
    #[error("grounding file: {0}")]
    BadFile(String),
}

/// Membership tables over a fixed, ordered individual domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grounding {
    individuals: Vec<String>,
    concepts: BTreeMap<String, Vec<f64>>,
    roles: BTreeMap<String, Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
struct RawGrounding {
    individuals: Vec<String>,
    concepts: BTreeMap<String, Vec<f64>>,
    roles: BTreeMap<String, Vec<Vec<f64>>>,
}

impl Grounding {
    pub fn new(individuals: Vec<String>) -> Self {
        Self {
            individuals,
            concepts: BTreeMap::new(),
            roles: BTreeMap::new(),
        }
    }

    pub fn individuals(&self) -> &[String] {
        &self.individuals
    }

    pub fn domain_size(&self) -> usize {
        self.individuals.len()
    }

    pub fn concept(&self, name: &str) -> Option<&Vec<f64>> {
        self.concepts.get(name)
    }

    pub fn role(&self, name: &str) -> Option<&Vec<Vec<f64>>> {
        self.roles.get(name)
    }

    pub fn concept_names(&self) -> impl Iterator<Item = &String> {
        self.concepts.keys()
    }

    pub fn role_names(&self) -> impl Iterator<Item = &String> {
        self.roles.keys()
    }

    pub fn insert_concept(&mut self, name: String, values: Vec<f64>) {
        assert_eq!(
            values.len(),
            self.individuals.len(),
            "concept vector length must match the domain"
        );
        self.concepts.insert(name, values);
    }

    pub fn insert_role(&mut self, name: String, matrix: Vec<Vec<f64>>) {
        let n = self.individuals.len();
        assert!(
            matrix.len() == n && matrix.iter().all(|row| row.len() == n),
            "role matrix must be |domain| x |domain|"
        );
        self.roles.insert(name, matrix);
    }

    /// Signature view of the tables; the individual order is the
    /// grounding's own, concepts and roles are in table (sorted) order.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for c in self.concepts.keys() {
            sig.ensure(c, crate::ontology::NameSort::Concept)
                .expect("grounding tables are sort-disjoint");
        }
        for r in self.roles.keys() {
            sig.ensure(r, crate::ontology::NameSort::Role)
                .expect("grounding tables are sort-disjoint");
        }
        for i in &self.individuals {
            sig.ensure(i, crate::ontology::NameSort::Individual)
                .expect("grounding tables are sort-disjoint");
        }
        sig
    }

    /// Total number of scalar entries (concept entries plus role entries).
    pub fn total_entries(&self) -> usize {
        let n = self.individuals.len();
        self.concepts.len() * n + self.roles.len() * n * n
    }

    /// Visits every entry in a fixed order: concept tables in sorted name
    /// order (individual-major), then role tables row-major.
    pub fn for_each_entry_mut(&mut self, mut f: impl FnMut(usize, &mut f64)) {
        let mut idx = 0;
        for values in self.concepts.values_mut() {
            for v in values {
                f(idx, v);
                idx += 1;
            }
        }
        for matrix in self.roles.values_mut() {
            for row in matrix {
                for v in row {
                    f(idx, v);
                    idx += 1;
                }
            }
        }
    }

    pub(crate) fn concepts_mut(&mut self) -> &mut BTreeMap<String, Vec<f64>> {
        &mut self.concepts
    }

    pub(crate) fn roles_mut(&mut self) -> &mut BTreeMap<String, Vec<Vec<f64>>> {
        &mut self.roles
    }

    /// Serializes to the grounding JSON schema.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grounding serializes")
    }

    /// Parses and validates a grounding JSON document: shapes must match
    /// the individual count and every entry must lie in [0, 1].
    pub fn from_json(text: &str) -> Result<Self, GroundingError> {
        let raw: RawGrounding =
            serde_json::from_str(text).map_err(|e| GroundingError::BadFile(e.to_string()))?;
        let n = raw.individuals.len();
        for (name, values) in &raw.concepts {
            if values.len() != n {
                return Err(GroundingError::ShapeMismatch(format!(
                    "concept `{name}` has {} entries for {n} individuals",
                    values.len()
                )));
            }
            for &v in values {
                if !(0.0..=1.0).contains(&v) {
                    return Err(GroundingError::ValueOutOfRange {
                        name: name.clone(),
                        value: v,
                    });
                }
            }
        }
        for (name, matrix) in &raw.roles {
            if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
                return Err(GroundingError::ShapeMismatch(format!(
                    "role `{name}` is not a {n}x{n} matrix"
                )));
            }
            for row in matrix {
                for &v in row {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(GroundingError::ValueOutOfRange {
                            name: name.clone(),
                            value: v,
                        });
                    }
                }
            }
        }
        Ok(Self {
            individuals: raw.individuals,
            concepts: raw.concepts,
            roles: raw.roles,
        })
    }

    /// Checks that every concept and role of `sig` has a table here.
    pub fn covers(&self, sig: &Signature) -> Result<(), GroundingError> {
        for c in sig.concepts() {
            if !self.concepts.contains_key(c) {
                return Err(GroundingError::UnknownName(c.clone()));
            }
        }
        for r in sig.roles() {
            if !self.roles.contains_key(r) {
                return Err(GroundingError::UnknownName(r.clone()));
            }
        }
        Ok(())
    }
}

/// Gödel evaluation of a concept: one degree per individual.
pub fn eval_concept(g: &Grounding, c: &ConceptExpr) -> Result<Vec<f64>, GroundingError> {
    let n = g.domain_size();
    match c {
        ConceptExpr::Top => Ok(vec![1.0; n]),
        ConceptExpr::Bottom => Ok(vec![0.0; n]),
        ConceptExpr::Name(name) => g
            .concept(name)
            .cloned()
            .ok_or_else(|| GroundingError::UnknownName(name.clone())),
        ConceptExpr::Not(inner) => {
            let v = eval_concept(g, inner)?;
            Ok(v.into_iter().map(|x| 1.0 - x).collect())
        }
        ConceptExpr::And(a, b) => {
            let (va, vb) = (eval_concept(g, a)?, eval_concept(g, b)?);
            Ok(va.into_iter().zip(vb).map(|(x, y)| x.min(y)).collect())
        }
        ConceptExpr::Or(a, b) => {
            let (va, vb) = (eval_concept(g, a)?, eval_concept(g, b)?);
            Ok(va.into_iter().zip(vb).map(|(x, y)| x.max(y)).collect())
        }
        ConceptExpr::Exists(role, filler) => {
            let m = g
                .role(role)
                .ok_or_else(|| GroundingError::UnknownName(role.clone()))?;
            let fv = eval_concept(g, filler)?;
            Ok((0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| m[a][b].min(fv[b]))
                        .fold(0.0_f64, f64::max)
                })
                .collect())
        }
        ConceptExpr::Forall(role, filler) => {
            let m = g
                .role(role)
                .ok_or_else(|| GroundingError::UnknownName(role.clone()))?;
            let fv = eval_concept(g, filler)?;
            Ok((0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| (1.0 - m[a][b]).max(fv[b]))
                        .fold(1.0_f64, f64::min)
                })
                .collect())
        }
    }
}

/// Fuzzy satisfaction of `left ⊑ right`: satisfied when the left degree is
/// at most the right degree at every individual. The violation vector is
/// the elementwise positive part of the difference.
pub fn fuzzy_inclusion_check(
    g: &Grounding,
    left: &ConceptExpr,
    right: &ConceptExpr,
) -> Result<(bool, Vec<f64>), GroundingError> {
    let lv = eval_concept(g, left)?;
    let rv = eval_concept(g, right)?;
    let violation: Vec<f64> = lv
        .iter()
        .zip(&rv)
        .map(|(l, r)| (l - r).max(0.0))
        .collect();
    let satisfied = lv.iter().zip(&rv).all(|(l, r)| l <= r);
    Ok((satisfied, violation))
}

/// Fuzzy satisfaction of a TBox axiom (equivalences check both directions).
pub fn fuzzy_axiom_satisfied(g: &Grounding, ax: &TBoxAxiom) -> Result<bool, GroundingError> {
    match ax {
        TBoxAxiom::Inclusion(l, r) => Ok(fuzzy_inclusion_check(g, l, r)?.0),
        TBoxAxiom::Equivalence(l, r) => {
            Ok(fuzzy_inclusion_check(g, l, r)?.0 && fuzzy_inclusion_check(g, r, l)?.0)
        }
    }
}

/// Threshold for the crisp transformation; degrees above `alpha` map to
/// true, below `1 - alpha` to false, and the closed band between them to
/// unknown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrispConfig {
    pub alpha: f64,
}

impl CrispConfig {
    pub fn new(alpha: f64) -> Result<Self, GroundingError> {
        if !(0.5..=1.0).contains(&alpha) {
            return Err(GroundingError::BadAlpha(alpha));
        }
        Ok(Self { alpha })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThreeValued {
    True,
    False,
    Unknown,
}

impl ThreeValued {
    fn rank(self) -> u8 {
        match self {
            ThreeValued::False => 0,
            ThreeValued::Unknown => 1,
            ThreeValued::True => 2,
        }
    }

    pub fn not(self) -> Self {
        match self {
            ThreeValued::True => ThreeValued::False,
            ThreeValued::False => ThreeValued::True,
            ThreeValued::Unknown => ThreeValued::Unknown,
        }
    }

    /// Strong-Kleene conjunction: the weaker operand wins.
    pub fn and(self, other: Self) -> Self {
        if self.rank() <= other.rank() {
            self
        } else {
            other
        }
    }

    /// Strong-Kleene disjunction: the stronger operand wins.
    pub fn or(self, other: Self) -> Self {
        if self.rank() >= other.rank() {
            self
        } else {
            other
        }
    }

    pub fn implies(self, other: Self) -> Self {
        self.not().or(other)
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            ThreeValued::True
        } else {
            ThreeValued::False
        }
    }
}

/// A grounding thresholded into three-valued membership tables.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispInterpretation {
    pub individuals: Vec<String>,
    pub concepts: BTreeMap<String, Vec<ThreeValued>>,
    pub roles: BTreeMap<String, Vec<Vec<ThreeValued>>>,
}

fn crisp_value(v: f64, alpha: f64) -> ThreeValued {
    if v > alpha {
        ThreeValued::True
    } else if v < 1.0 - alpha {
        ThreeValued::False
    } else {
        ThreeValued::Unknown
    }
}

/// Applies the crisp transformation entrywise.
pub fn crispify(g: &Grounding, cfg: CrispConfig) -> CrispInterpretation {
    CrispInterpretation {
        individuals: g.individuals.clone(),
        concepts: g
            .concepts
            .iter()
            .map(|(name, values)| {
                (
                    name.clone(),
                    values.iter().map(|&v| crisp_value(v, cfg.alpha)).collect(),
                )
            })
            .collect(),
        roles: g
            .roles
            .iter()
            .map(|(name, matrix)| {
                (
                    name.clone(),
                    matrix
                        .iter()
                        .map(|row| row.iter().map(|&v| crisp_value(v, cfg.alpha)).collect())
                        .collect(),
                )
            })
            .collect(),
    }
}

/// Strong-Kleene evaluation of a concept on a three-valued interpretation.
pub fn crisp_eval_concept(
    ci: &CrispInterpretation,
    c: &ConceptExpr,
) -> Result<Vec<ThreeValued>, GroundingError> {
    let n = ci.individuals.len();
    match c {
        ConceptExpr::Top => Ok(vec![ThreeValued::True; n]),
        ConceptExpr::Bottom => Ok(vec![ThreeValued::False; n]),
        ConceptExpr::Name(name) => ci
            .concepts
            .get(name)
            .cloned()
            .ok_or_else(|| GroundingError::UnknownName(name.clone())),
        ConceptExpr::Not(inner) => Ok(crisp_eval_concept(ci, inner)?
            .into_iter()
            .map(ThreeValued::not)
            .collect()),
        ConceptExpr::And(a, b) => {
            let (va, vb) = (crisp_eval_concept(ci, a)?, crisp_eval_concept(ci, b)?);
            Ok(va.into_iter().zip(vb).map(|(x, y)| x.and(y)).collect())
        }
        ConceptExpr::Or(a, b) => {
            let (va, vb) = (crisp_eval_concept(ci, a)?, crisp_eval_concept(ci, b)?);
            Ok(va.into_iter().zip(vb).map(|(x, y)| x.or(y)).collect())
        }
        ConceptExpr::Exists(role, filler) => {
            let m = ci
                .roles
                .get(role)
                .ok_or_else(|| GroundingError::UnknownName(role.clone()))?;
            let fv = crisp_eval_concept(ci, filler)?;
            Ok((0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| m[a][b].and(fv[b]))
                        .fold(ThreeValued::False, ThreeValued::or)
                })
                .collect())
        }
        ConceptExpr::Forall(role, filler) => {
            let m = ci
                .roles
                .get(role)
                .ok_or_else(|| GroundingError::UnknownName(role.clone()))?;
            let fv = crisp_eval_concept(ci, filler)?;
            Ok((0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| m[a][b].implies(fv[b]))
                        .fold(ThreeValued::True, ThreeValued::and)
                })
                .collect())
        }
    }
}

/// Three-valued truth of a TBox axiom: false as soon as some individual
/// definitely violates it, true when every individual definitely
/// satisfies it, unknown otherwise.
pub fn crisp_eval_axiom(
    ci: &CrispInterpretation,
    ax: &TBoxAxiom,
) -> Result<ThreeValued, GroundingError> {
    let eval_inclusion = |l: &ConceptExpr, r: &ConceptExpr| -> Result<ThreeValued, GroundingError> {
        let lv = crisp_eval_concept(ci, l)?;
        let rv = crisp_eval_concept(ci, r)?;
        Ok(lv
            .into_iter()
            .zip(rv)
            .map(|(x, y)| x.implies(y))
            .fold(ThreeValued::True, ThreeValued::and))
    };
    match ax {
        TBoxAxiom::Inclusion(l, r) => eval_inclusion(l, r),
        TBoxAxiom::Equivalence(l, r) => Ok(eval_inclusion(l, r)?.and(eval_inclusion(r, l)?)),
    }
}

/// How unknown axiom values count towards the success rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnknownPolicy {
    /// An axiom fails only on a definite counterexample (default).
    UnknownSatisfies,
    /// Only definitely true axioms count as satisfied.
    UnknownFails,
}

/// Percentage of TBox axioms satisfied by the three-valued interpretation.
pub fn success_rate(
    ci: &CrispInterpretation,
    tbox: &[TBoxAxiom],
    policy: UnknownPolicy,
) -> Result<f64, GroundingError> {
    if tbox.is_empty() {
        return Err(GroundingError::EmptyTBox);
    }
    let mut satisfied = 0usize;
    for ax in tbox {
        let v = crisp_eval_axiom(ci, ax)?;
        let ok = match policy {
            UnknownPolicy::UnknownSatisfies => v != ThreeValued::False,
            UnknownPolicy::UnknownFails => v == ThreeValued::True,
        };
        if ok {
            satisfied += 1;
        }
    }
    Ok(100.0 * satisfied as f64 / tbox.len() as f64)
}

/// Percentage of TBox axioms fuzzy-satisfied by a grounding (the strict
/// variant of the success rate).
pub fn fuzzy_success_rate(g: &Grounding, tbox: &[TBoxAxiom]) -> Result<f64, GroundingError> {
    if tbox.is_empty() {
        return Err(GroundingError::EmptyTBox);
    }
    let mut satisfied = 0usize;
    for ax in tbox {
        if fuzzy_axiom_satisfied(g, ax)? {
            satisfied += 1;
        }
    }
    Ok(100.0 * satisfied as f64 / tbox.len() as f64)
}

/// A classical (two-valued) interpretation over the ontology's domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrispAssignment {
    pub concepts: BTreeMap<String, Vec<bool>>,
    pub roles: BTreeMap<String, Vec<Vec<bool>>>,
}

impl CrispAssignment {
    /// Drops tables for names outside the given signature slices.
    pub fn restrict(&self, concepts: &[String], roles: &[String]) -> CrispAssignment {
        CrispAssignment {
            concepts: self
                .concepts
                .iter()
                .filter(|(k, _)| concepts.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            roles: self
                .roles
                .iter()
                .filter(|(k, _)| roles.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Lifts the classical assignment to a {0,1}-valued grounding.
    pub fn to_grounding(&self, individuals: &[String]) -> Grounding {
        let mut g = Grounding::new(individuals.to_vec());
        for (name, values) in &self.concepts {
            g.insert_concept(
                name.clone(),
                values.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
            );
        }
        for (name, matrix) in &self.roles {
            g.insert_role(
                name.clone(),
                matrix
                    .iter()
                    .map(|row| row.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
                    .collect(),
            );
        }
        g
    }
}

/// Classical set-semantics evaluation of a concept.
pub fn classical_eval(
    asg: &CrispAssignment,
    n: usize,
    c: &ConceptExpr,
) -> Result<Vec<bool>, GroundingError> {
    match c {
        ConceptExpr::Top => Ok(vec![true; n]),
        ConceptExpr::Bottom => Ok(vec![false; n]),
        ConceptExpr::Name(name) => asg
            .concepts
            .get(name)
            .cloned()
            .ok_or_else(|| GroundingError::UnknownName(name.clone())),
        ConceptExpr::Not(inner) => Ok(classical_eval(asg, n, inner)?
            .into_iter()
            .map(|b| !b)
            .collect()),
        ConceptExpr::And(a, b) => {
            let (va, vb) = (classical_eval(asg, n, a)?, classical_eval(asg, n, b)?);
            Ok(va.into_iter().zip(vb).map(|(x, y)| x && y).collect())
        }
        ConceptExpr::Or(a, b) => {
            let (va, vb) = (classical_eval(asg, n, a)?, classical_eval(asg, n, b)?);
            Ok(va.into_iter().zip(vb).map(|(x, y)| x || y).collect())
        }
        ConceptExpr::Exists(role, filler) => {
            let m = asg
                .roles
                .get(role)
                .ok_or_else(|| GroundingError::UnknownName(role.clone()))?;
            let fv = classical_eval(asg, n, filler)?;
            Ok((0..n).map(|a| (0..n).any(|b| m[a][b] && fv[b])).collect())
        }
        ConceptExpr::Forall(role, filler) => {
            let m = asg
                .roles
                .get(role)
                .ok_or_else(|| GroundingError::UnknownName(role.clone()))?;
            let fv = classical_eval(asg, n, filler)?;
            Ok((0..n).map(|a| (0..n).all(|b| !m[a][b] || fv[b])).collect())
        }
    }
}

/// Classical truth of an axiom under an assignment.
pub fn classical_axiom_true(
    asg: &CrispAssignment,
    n: usize,
    ax: &TBoxAxiom,
) -> Result<bool, GroundingError> {
    let inclusion = |l: &ConceptExpr, r: &ConceptExpr| -> Result<bool, GroundingError> {
        let lv = classical_eval(asg, n, l)?;
        let rv = classical_eval(asg, n, r)?;
        Ok(lv.iter().zip(&rv).all(|(x, y)| !x | y))
    };
    match ax {
        TBoxAxiom::Inclusion(l, r) => inclusion(l, r),
        TBoxAxiom::Equivalence(l, r) => Ok(inclusion(l, r)? && inclusion(r, l)?),
    }
}

/// Enumerates every classical interpretation over the ontology's declared
/// individuals and keeps those satisfying all axioms and assertions. An
/// assertion `phi = d` is satisfied when the classical truth value equals
/// `d`, so fractional degrees admit no classical model.
pub fn brute_force_models(o: &Ontology) -> Result<Vec<CrispAssignment>, GroundingError> {
    let sig = o.signature();
    let n = sig.individuals().len();
    let concept_bits = sig.concepts().len() * n;
    let role_bits = sig.roles().len() * n * n;
    let bits = concept_bits + role_bits;
    if bits > 20 {
        return Err(GroundingError::TooLarge { bits });
    }
    let ind_index: BTreeMap<&str, usize> = sig
        .individuals()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();

    let mut models = Vec::new();
    for code in 0u64..(1u64 << bits) {
        let mut bit = 0;
        let mut take = || {
            let b = (code >> bit) & 1 == 1;
            bit += 1;
            b
        };
        let mut asg = CrispAssignment {
            concepts: BTreeMap::new(),
            roles: BTreeMap::new(),
        };
        for cname in sig.concepts() {
            asg.concepts
                .insert(cname.clone(), (0..n).map(|_| take()).collect());
        }
        for rname in sig.roles() {
            asg.roles.insert(
                rname.clone(),
                (0..n).map(|_| (0..n).map(|_| take()).collect()).collect(),
            );
        }

        let mut ok = true;
        for ax in &o.tbox {
            if !classical_axiom_true(&asg, n, ax)? {
                ok = false;
                break;
            }
        }
        if ok {
            for a in &o.abox {
                let holds = match &a.kind {
                    AssertionKind::Concept {
                        individual,
                        concept,
                    } => {
                        let i = *ind_index
                            .get(individual.as_str())
                            .ok_or_else(|| GroundingError::UnknownName(individual.clone()))?;
                        classical_eval(&asg, n, concept)?[i]
                    }
                    AssertionKind::Role {
                        subject,
                        object,
                        role,
                    } => {
                        let i = *ind_index
                            .get(subject.as_str())
                            .ok_or_else(|| GroundingError::UnknownName(subject.clone()))?;
                        let j = *ind_index
                            .get(object.as_str())
                            .ok_or_else(|| GroundingError::UnknownName(object.clone()))?;
                        asg.roles
                            .get(role)
                            .ok_or_else(|| GroundingError::UnknownName(role.clone()))?[i][j]
                    }
                };
                let value = if holds { 1.0 } else { 0.0 };
                if value != a.degree {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            models.push(asg);
        }
    }
    Ok(models)
}
