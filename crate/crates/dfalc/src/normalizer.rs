//! TBox normalization: negation normal form followed by rewriting into
//! the seven normal forms over literals, introducing fresh concept names
//! where compounds must be extracted.
//!
//! Fresh names are memoized by the structural identity of the compound
//! they replace, so repeated compounds (and the two directions of an
//! equivalence) share one name. Seeding extends a grounding to the fresh
//! names by evaluating their defining expressions.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::grounding::{eval_concept, Grounding, GroundingError};
use crate::ontology::{ConceptExpr, NameSort, Ontology, Signature, TBoxAxiom};

#[derive(Debug, Error, PartialEq)]
pub enum SeedError {
    #[error("fresh concept `{0}` has no resolvable definition")]
    UndefinedFreshName(String),
    #[error(transparent)]
    Eval(#[from] GroundingError),
}

/// A concept name, `Thing`, or `Nothing`, optionally negated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub base: LiteralBase,
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LiteralBase {
    Top,
    Bottom,
    Name(String),
}

impl Literal {
    pub fn name(n: impl Into<String>) -> Self {
        Literal {
            base: LiteralBase::Name(n.into()),
            negated: false,
        }
    }

    pub fn negated_name(n: impl Into<String>) -> Self {
        Literal {
            base: LiteralBase::Name(n.into()),
            negated: true,
        }
    }

    pub fn from_expr(e: &ConceptExpr) -> Option<Self> {
        match e {
            ConceptExpr::Top => Some(Literal {
                base: LiteralBase::Top,
                negated: false,
            }),
            ConceptExpr::Bottom => Some(Literal {
                base: LiteralBase::Bottom,
                negated: false,
            }),
            ConceptExpr::Name(n) => Some(Literal::name(n.clone())),
            ConceptExpr::Not(inner) => match &**inner {
                ConceptExpr::Top => Some(Literal {
                    base: LiteralBase::Top,
                    negated: true,
                }),
                ConceptExpr::Bottom => Some(Literal {
                    base: LiteralBase::Bottom,
                    negated: true,
                }),
                ConceptExpr::Name(n) => Some(Literal::negated_name(n.clone())),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn to_expr(&self) -> ConceptExpr {
        let base = match &self.base {
            LiteralBase::Top => ConceptExpr::Top,
            LiteralBase::Bottom => ConceptExpr::Bottom,
            LiteralBase::Name(n) => ConceptExpr::name(n.clone()),
        };
        if self.negated {
            ConceptExpr::not(base)
        } else {
            base
        }
    }

    pub fn concept_name(&self) -> Option<&str> {
        match &self.base {
            LiteralBase::Name(n) => Some(n),
            _ => None,
        }
    }
}

/// The seven normal forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormTag {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
}

impl fmt::Display for FormTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            FormTag::F1 => 1,
            FormTag::F2 => 2,
            FormTag::F3 => 3,
            FormTag::F4 => 4,
            FormTag::F5 => 5,
            FormTag::F6 => 6,
            FormTag::F7 => 7,
        };
        write!(f, "form {n}")
    }
}

impl serde::Serialize for FormTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An inclusion axiom in one of the seven normal forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NormalAxiom {
    /// Form 1: `C ⊑ B`.
    Sub { left: Literal, right: Literal },
    /// Form 2: `C1 ⊓ C2 ⊑ B`.
    ConjSub {
        left1: Literal,
        left2: Literal,
        right: Literal,
    },
    /// Form 3: `B ⊑ C1 ⊔ C2`.
    SubDisj {
        left: Literal,
        right1: Literal,
        right2: Literal,
    },
    /// Form 4: `C ⊑ ∃r.B`.
    SubExists {
        left: Literal,
        role: String,
        filler: Literal,
    },
    /// Form 5: `C ⊑ ∀r.B`.
    SubForall {
        left: Literal,
        role: String,
        filler: Literal,
    },
    /// Form 6: `∃r.B ⊑ C`.
    ExistsSub {
        role: String,
        filler: Literal,
        right: Literal,
    },
    /// Form 7: `∀r.B ⊑ C`.
    ForallSub {
        role: String,
        filler: Literal,
        right: Literal,
    },
}

impl NormalAxiom {
    pub fn form(&self) -> FormTag {
        match self {
            NormalAxiom::Sub { .. } => FormTag::F1,
            NormalAxiom::ConjSub { .. } => FormTag::F2,
            NormalAxiom::SubDisj { .. } => FormTag::F3,
            NormalAxiom::SubExists { .. } => FormTag::F4,
            NormalAxiom::SubForall { .. } => FormTag::F5,
            NormalAxiom::ExistsSub { .. } => FormTag::F6,
            NormalAxiom::ForallSub { .. } => FormTag::F7,
        }
    }

    /// The axiom as a pair of concept expressions `left ⊑ right`.
    pub fn to_inclusion(&self) -> (ConceptExpr, ConceptExpr) {
        match self {
            NormalAxiom::Sub { left, right } => (left.to_expr(), right.to_expr()),
            NormalAxiom::ConjSub {
                left1,
                left2,
                right,
            } => (
                ConceptExpr::and(left1.to_expr(), left2.to_expr()),
                right.to_expr(),
            ),
            NormalAxiom::SubDisj {
                left,
                right1,
                right2,
            } => (
                left.to_expr(),
                ConceptExpr::or(right1.to_expr(), right2.to_expr()),
            ),
            NormalAxiom::SubExists { left, role, filler } => (
                left.to_expr(),
                ConceptExpr::exists(role.clone(), filler.to_expr()),
            ),
            NormalAxiom::SubForall { left, role, filler } => (
                left.to_expr(),
                ConceptExpr::forall(role.clone(), filler.to_expr()),
            ),
            NormalAxiom::ExistsSub {
                role,
                filler,
                right,
            } => (
                ConceptExpr::exists(role.clone(), filler.to_expr()),
                right.to_expr(),
            ),
            NormalAxiom::ForallSub {
                role,
                filler,
                right,
            } => (
                ConceptExpr::forall(role.clone(), filler.to_expr()),
                right.to_expr(),
            ),
        }
    }
}

/// Classifies an inclusion over literals into its normal form, or `None`
/// when the axiom is not normal.
pub fn classify_form(left: &ConceptExpr, right: &ConceptExpr) -> Option<FormTag> {
    normal_axiom_of(left, right).map(|a| a.form())
}

fn normal_axiom_of(left: &ConceptExpr, right: &ConceptExpr) -> Option<NormalAxiom> {
    if let (Some(l), Some(r)) = (Literal::from_expr(left), Literal::from_expr(right)) {
        return Some(NormalAxiom::Sub { left: l, right: r });
    }
    match (left, right) {
        (ConceptExpr::And(a, b), _) => {
            let (left1, left2, right) = (
                Literal::from_expr(a)?,
                Literal::from_expr(b)?,
                Literal::from_expr(right)?,
            );
            Some(NormalAxiom::ConjSub {
                left1,
                left2,
                right,
            })
        }
        (_, ConceptExpr::Or(a, b)) => {
            let (l, right1, right2) = (
                Literal::from_expr(left)?,
                Literal::from_expr(a)?,
                Literal::from_expr(b)?,
            );
            Some(NormalAxiom::SubDisj {
                left: l,
                right1,
                right2,
            })
        }
        (_, ConceptExpr::Exists(role, filler)) => Some(NormalAxiom::SubExists {
            left: Literal::from_expr(left)?,
            role: role.clone(),
            filler: Literal::from_expr(filler)?,
        }),
        (_, ConceptExpr::Forall(role, filler)) => Some(NormalAxiom::SubForall {
            left: Literal::from_expr(left)?,
            role: role.clone(),
            filler: Literal::from_expr(filler)?,
        }),
        (ConceptExpr::Exists(role, filler), _) => Some(NormalAxiom::ExistsSub {
            role: role.clone(),
            filler: Literal::from_expr(filler)?,
            right: Literal::from_expr(right)?,
        }),
        (ConceptExpr::Forall(role, filler), _) => Some(NormalAxiom::ForallSub {
            role: role.clone(),
            filler: Literal::from_expr(filler)?,
            right: Literal::from_expr(right)?,
        }),
        _ => None,
    }
}

/// Result of normalization: axioms in Forms 1-7, the definitions of the
/// introduced names, and the signature extended with them.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTBox {
    pub axioms: Vec<NormalAxiom>,
    pub fresh_defs: BTreeMap<String, ConceptExpr>,
    pub extended_signature: Signature,
}

impl NormalizedTBox {
    /// Introduced names in creation order.
    pub fn fresh_names(&self) -> impl Iterator<Item = &str> {
        self.extended_signature
            .concepts()
            .iter()
            .filter(|c| self.fresh_defs.contains_key(*c))
            .map(|c| c.as_str())
    }
}

/// Pushes negation down to concept names, `Thing`, and `Nothing` using
/// double-negation elimination, De Morgan's laws, and quantifier duals.
pub fn to_nnf(c: &ConceptExpr) -> ConceptExpr {
    match c {
        ConceptExpr::Top | ConceptExpr::Bottom | ConceptExpr::Name(_) => c.clone(),
        ConceptExpr::Not(inner) => nnf_negate(inner),
        ConceptExpr::And(a, b) => ConceptExpr::and(to_nnf(a), to_nnf(b)),
        ConceptExpr::Or(a, b) => ConceptExpr::or(to_nnf(a), to_nnf(b)),
        ConceptExpr::Exists(r, f) => ConceptExpr::exists(r.clone(), to_nnf(f)),
        ConceptExpr::Forall(r, f) => ConceptExpr::forall(r.clone(), to_nnf(f)),
    }
}

fn nnf_negate(c: &ConceptExpr) -> ConceptExpr {
    match c {
        ConceptExpr::Top | ConceptExpr::Bottom | ConceptExpr::Name(_) => {
            ConceptExpr::not(c.clone())
        }
        ConceptExpr::Not(inner) => to_nnf(inner),
        ConceptExpr::And(a, b) => ConceptExpr::or(nnf_negate(a), nnf_negate(b)),
        ConceptExpr::Or(a, b) => ConceptExpr::and(nnf_negate(a), nnf_negate(b)),
        ConceptExpr::Exists(r, f) => ConceptExpr::forall(r.clone(), nnf_negate(f)),
        ConceptExpr::Forall(r, f) => ConceptExpr::exists(r.clone(), nnf_negate(f)),
    }
}

struct Normalizer {
    memo: HashMap<ConceptExpr, String>,
    fresh_defs: BTreeMap<String, ConceptExpr>,
    extended_signature: Signature,
    counter: usize,
    axioms: Vec<NormalAxiom>,
    seen: HashSet<NormalAxiom>,
    queue: VecDeque<(ConceptExpr, ConceptExpr)>,
}

impl Normalizer {
    fn fresh_name_for(&mut self, compound: &ConceptExpr) -> String {
        if let Some(name) = self.memo.get(compound) {
            return name.clone();
        }
        let name = loop {
            self.counter += 1;
            let candidate = format!("__N{}", self.counter);
            if !self.extended_signature.contains(&candidate) {
                break candidate;
            }
        };
        self.memo.insert(compound.clone(), name.clone());
        self.fresh_defs.insert(name.clone(), compound.clone());
        self.extended_signature
            .ensure(&name, NameSort::Concept)
            .expect("fresh names are checked against the signature");
        name
    }

    fn emit(&mut self, axiom: NormalAxiom) {
        if self.seen.insert(axiom.clone()) {
            self.axioms.push(axiom);
        }
    }

    fn step(&mut self, left: ConceptExpr, right: ConceptExpr) {
        if let Some(normal) = normal_axiom_of(&left, &right) {
            self.emit(normal);
            return;
        }
        if !left.is_literal() && !right.is_literal() {
            // NF 1: bridge two compounds through a fresh name.
            let a = ConceptExpr::name(self.fresh_name_for(&left));
            self.queue.push_back((left, a.clone()));
            self.queue.push_back((a, right));
            return;
        }
        if !left.is_literal() {
            match left {
                // NF 3: a disjunction on the left splits.
                ConceptExpr::Or(a, b) => {
                    self.queue.push_back((*a, right.clone()));
                    self.queue.push_back((*b, right));
                }
                // NF 2: extract the leftmost compound conjunct.
                ConceptExpr::And(a, b) => {
                    let (compound, keep, compound_left) = if !a.is_literal() {
                        (*a, *b, true)
                    } else {
                        (*b, *a, false)
                    };
                    let fresh = ConceptExpr::name(self.fresh_name_for(&compound));
                    self.queue.push_back((compound, fresh.clone()));
                    let rebuilt = if compound_left {
                        ConceptExpr::and(fresh, keep)
                    } else {
                        ConceptExpr::and(keep, fresh)
                    };
                    self.queue.push_back((rebuilt, right));
                }
                // NF 4 / NF 5: extract a compound filler on the left.
                ConceptExpr::Exists(role, filler) => {
                    let fresh = ConceptExpr::name(self.fresh_name_for(&filler));
                    self.queue.push_back(((*filler).clone(), fresh.clone()));
                    self.queue
                        .push_back((ConceptExpr::Exists(role, Box::new(fresh)), right));
                }
                ConceptExpr::Forall(role, filler) => {
                    let fresh = ConceptExpr::name(self.fresh_name_for(&filler));
                    self.queue.push_back(((*filler).clone(), fresh.clone()));
                    self.queue
                        .push_back((ConceptExpr::Forall(role, Box::new(fresh)), right));
                }
                other => unreachable!("non-NNF left side: {other:?}"),
            }
            return;
        }
        match right {
            // NF 6: a conjunction on the right splits.
            ConceptExpr::And(a, b) => {
                self.queue.push_back((left.clone(), *a));
                self.queue.push_back((left, *b));
            }
            // NF 7: extract the leftmost compound disjunct.
            ConceptExpr::Or(a, b) => {
                let (compound, keep, compound_left) = if !a.is_literal() {
                    (*a, *b, true)
                } else {
                    (*b, *a, false)
                };
                let fresh = ConceptExpr::name(self.fresh_name_for(&compound));
                self.queue.push_back((fresh.clone(), compound));
                let rebuilt = if compound_left {
                    ConceptExpr::or(fresh, keep)
                } else {
                    ConceptExpr::or(keep, fresh)
                };
                self.queue.push_back((left, rebuilt));
            }
            // NF 8 / NF 9: extract a compound filler on the right.
            ConceptExpr::Exists(role, filler) => {
                let fresh = ConceptExpr::name(self.fresh_name_for(&filler));
                self.queue.push_back((fresh.clone(), (*filler).clone()));
                self.queue
                    .push_back((left, ConceptExpr::Exists(role, Box::new(fresh))));
            }
            ConceptExpr::Forall(role, filler) => {
                let fresh = ConceptExpr::name(self.fresh_name_for(&filler));
                self.queue.push_back((fresh.clone(), (*filler).clone()));
                self.queue
                    .push_back((left, ConceptExpr::Forall(role, Box::new(fresh))));
            }
            other => unreachable!("non-NNF right side: {other:?}"),
        }
    }
}

/// Rewrites the TBox into Forms 1-7. Equivalences expand into two
/// inclusions that share the introduced names; identical compounds are
/// extracted once.
pub fn normalize(o: &Ontology) -> NormalizedTBox {
    let mut n = Normalizer {
        memo: HashMap::new(),
        fresh_defs: BTreeMap::new(),
        extended_signature: o.signature().clone(),
        counter: 0,
        axioms: Vec::new(),
        seen: HashSet::new(),
        queue: VecDeque::new(),
    };
    for ax in &o.tbox {
        match ax {
            TBoxAxiom::Inclusion(l, r) => n.queue.push_back((to_nnf(l), to_nnf(r))),
            TBoxAxiom::Equivalence(l, r) => {
                let (l, r) = (to_nnf(l), to_nnf(r));
                n.queue.push_back((l.clone(), r.clone()));
                n.queue.push_back((r, l));
            }
        }
    }
    while let Some((l, r)) = n.queue.pop_front() {
        n.step(l, r);
    }
    NormalizedTBox {
        axioms: n.axioms,
        fresh_defs: n.fresh_defs,
        extended_signature: n.extended_signature,
    }
}

/// Extends `g` with membership vectors for the introduced names, each the
/// fuzzy evaluation of its defining expression. Definitions may reference
/// other fresh names; they resolve in dependency order. Original entries
/// are unchanged.
pub fn seed_fresh_assertions(nt: &NormalizedTBox, g: &Grounding) -> Result<Grounding, SeedError> {
    let mut out = g.clone();
    let mut pending: Vec<&str> = Vec::new();
    for name in nt.extended_signature.concepts() {
        if out.concept(name).is_none() {
            if !nt.fresh_defs.contains_key(name) {
                return Err(SeedError::UndefinedFreshName(name.clone()));
            }
            pending.push(name);
        }
    }
    while !pending.is_empty() {
        let mut progressed = false;
        let mut still_pending = Vec::new();
        for name in pending {
            let def = &nt.fresh_defs[name];
            if def_ready(def, &out) {
                let values = eval_concept(&out, def)?;
                out.insert_concept(name.to_string(), values);
                progressed = true;
            } else {
                still_pending.push(name);
            }
        }
        if !progressed {
            return Err(SeedError::UndefinedFreshName(
                still_pending
                    .first()
                    .map(|s| s.to_string())
                    .unwrap_or_default(),
            ));
        }
        pending = still_pending;
    }
    Ok(out)
}

/// Prints a normalized ontology in the text format: declarations for the
/// extended signature, the normal-form axioms, the original assertions,
/// and one trailing `# define` comment per introduced name.
pub fn render_normalized(nt: &NormalizedTBox, original: &Ontology) -> String {
    use crate::ontology::render_concept;
    let mut out = String::new();
    let sig = &nt.extended_signature;
    for c in sig.concepts() {
        out.push_str(&format!("concept {c}\n"));
    }
    for r in sig.roles() {
        out.push_str(&format!("role {r}\n"));
    }
    for i in sig.individuals() {
        out.push_str(&format!("individual {i}\n"));
    }
    for ax in &nt.axioms {
        let (l, r) = ax.to_inclusion();
        out.push_str(&format!(
            "axiom {} SubClassOf {}\n",
            render_concept(&l),
            render_concept(&r)
        ));
    }
    for a in &original.abox {
        match &a.kind {
            crate::ontology::AssertionKind::Concept {
                individual,
                concept,
            } => {
                let head = match concept {
                    ConceptExpr::Name(n) => n.clone(),
                    other => render_concept(other),
                };
                out.push_str(&format!("assert {head}({individual}) = {}\n", a.degree));
            }
            crate::ontology::AssertionKind::Role {
                subject,
                object,
                role,
            } => {
                out.push_str(&format!(
                    "assert {role}({subject}, {object}) = {}\n",
                    a.degree
                ));
            }
        }
    }
    for name in nt.fresh_names() {
        out.push_str(&format!(
            "# define {name} := {}\n",
            render_concept(&nt.fresh_defs[name])
        ));
    }
    out
}

fn def_ready(def: &ConceptExpr, g: &Grounding) -> bool {
    match def {
        ConceptExpr::Top | ConceptExpr::Bottom => true,
        ConceptExpr::Name(n) => g.concept(n).is_some(),
        ConceptExpr::Not(c) => def_ready(c, g),
        ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => def_ready(a, g) && def_ready(b, g),
        ConceptExpr::Exists(_, c) | ConceptExpr::Forall(_, c) => def_ready(c, g),
    }
}
