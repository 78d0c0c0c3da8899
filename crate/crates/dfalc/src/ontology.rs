//! Core ALC ontology representation: concept expressions, TBox axioms,
//! fuzzy ABox assertions, and the signature that fixes indexing.
//!
//! All types are immutable after construction and safe to share across
//! threads. The signature keeps concept, role, and individual names in
//! stable first-occurrence order; the individual order defines the
//! row/column indexing used by groundings.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Errors raised while constructing or parsing ontologies.
#[derive(Debug, Error, PartialEq)]
pub enum OntologyError {
    #[error("syntax error at line {line}, column {col}: expected {expected}")]
    SyntaxError {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("assertion degree {degree} is outside [0, 1]")]
    DegreeOutOfRange { degree: f64 },
    #[error("name `{name}` is used both as {first} and as {second}")]
    DuplicateDeclarationKind {
        name: String,
        first: NameSort,
        second: NameSort,
    },
}

/// The three disjoint name sorts of a signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameSort {
    Concept,
    Role,
    Individual,
}

impl fmt::Display for NameSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NameSort::Concept => write!(f, "a concept"),
            NameSort::Role => write!(f, "a role"),
            NameSort::Individual => write!(f, "an individual"),
        }
    }
}

/// A (possibly compound) ALC concept.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConceptExpr {
    Top,
    Bottom,
    Name(String),
    Not(Box<ConceptExpr>),
    And(Box<ConceptExpr>, Box<ConceptExpr>),
    Or(Box<ConceptExpr>, Box<ConceptExpr>),
    /// Existential restriction `some r . C`.
    Exists(String, Box<ConceptExpr>),
    /// Universal restriction `only r . C`.
    Forall(String, Box<ConceptExpr>),
}

impl ConceptExpr {
    pub fn name(n: impl Into<String>) -> Self {
        ConceptExpr::Name(n.into())
    }

    pub fn not(c: ConceptExpr) -> Self {
        ConceptExpr::Not(Box::new(c))
    }

    pub fn and(a: ConceptExpr, b: ConceptExpr) -> Self {
        ConceptExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ConceptExpr, b: ConceptExpr) -> Self {
        ConceptExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(role: impl Into<String>, filler: ConceptExpr) -> Self {
        ConceptExpr::Exists(role.into(), Box::new(filler))
    }

    pub fn forall(role: impl Into<String>, filler: ConceptExpr) -> Self {
        ConceptExpr::Forall(role.into(), Box::new(filler))
    }

    /// Number of nodes in the expression tree.
    pub fn node_count(&self) -> usize {
        match self {
            ConceptExpr::Top | ConceptExpr::Bottom | ConceptExpr::Name(_) => 1,
            ConceptExpr::Not(c) => 1 + c.node_count(),
            ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => 1 + a.node_count() + b.node_count(),
            ConceptExpr::Exists(_, c) | ConceptExpr::Forall(_, c) => 1 + c.node_count(),
        }
    }

    /// True for `Thing`, `Nothing`, concept names, and their negations.
    pub fn is_literal(&self) -> bool {
        match self {
            ConceptExpr::Top | ConceptExpr::Bottom | ConceptExpr::Name(_) => true,
            ConceptExpr::Not(inner) => matches!(
                **inner,
                ConceptExpr::Top | ConceptExpr::Bottom | ConceptExpr::Name(_)
            ),
            _ => false,
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(
            self,
            ConceptExpr::Top | ConceptExpr::Bottom | ConceptExpr::Name(_)
        )
    }

    fn visit_names<E>(
        &self,
        on_name: &mut impl FnMut(&str, NameSort) -> Result<(), E>,
    ) -> Result<(), E> {
        match self {
            ConceptExpr::Top | ConceptExpr::Bottom => Ok(()),
            ConceptExpr::Name(n) => on_name(n, NameSort::Concept),
            ConceptExpr::Not(c) => c.visit_names(on_name),
            ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => {
                a.visit_names(on_name)?;
                b.visit_names(on_name)
            }
            ConceptExpr::Exists(r, c) | ConceptExpr::Forall(r, c) => {
                on_name(r, NameSort::Role)?;
                c.visit_names(on_name)
            }
        }
    }
}

/// A TBox axiom. Equivalences are kept as written; expansion into two
/// inclusions happens only in the normalizer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TBoxAxiom {
    Inclusion(ConceptExpr, ConceptExpr),
    Equivalence(ConceptExpr, ConceptExpr),
}

impl TBoxAxiom {
    pub fn sides(&self) -> (&ConceptExpr, &ConceptExpr) {
        match self {
            TBoxAxiom::Inclusion(l, r) | TBoxAxiom::Equivalence(l, r) => (l, r),
        }
    }

    pub fn node_count(&self) -> usize {
        let (l, r) = self.sides();
        l.node_count() + r.node_count()
    }
}

/// What a fuzzy assertion talks about.
#[derive(Debug, Clone, PartialEq)]
pub enum AssertionKind {
    Concept {
        individual: String,
        concept: ConceptExpr,
    },
    Role {
        subject: String,
        object: String,
        role: String,
    },
}

/// A fuzzy ABox assertion `phi = degree`. Crisp input assertions default
/// to degree 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ABoxAssertion {
    pub kind: AssertionKind,
    pub degree: f64,
}

impl ABoxAssertion {
    pub fn new(kind: AssertionKind, degree: f64) -> Result<Self, OntologyError> {
        if !(0.0..=1.0).contains(&degree) || !degree.is_finite() {
            return Err(OntologyError::DegreeOutOfRange { degree });
        }
        Ok(Self { kind, degree })
    }

    pub fn concept(
        individual: impl Into<String>,
        concept: ConceptExpr,
        degree: f64,
    ) -> Result<Self, OntologyError> {
        Self::new(
            AssertionKind::Concept {
                individual: individual.into(),
                concept,
            },
            degree,
        )
    }

    pub fn role(
        subject: impl Into<String>,
        object: impl Into<String>,
        role: impl Into<String>,
        degree: f64,
    ) -> Result<Self, OntologyError> {
        Self::new(
            AssertionKind::Role {
                subject: subject.into(),
                object: object.into(),
                role: role.into(),
            },
            degree,
        )
    }
}

/// Ordered, pairwise-disjoint sets of concept, role, and individual names.
///
/// Orders are stable: they record first occurrence and never change, so
/// individual `i` always maps to row/column `i` of a role matrix.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Signature {
    concepts: Vec<String>,
    roles: Vec<String>,
    individuals: Vec<String>,
    sorts: HashMap<String, NameSort>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn roles(&self) -> &[String] {
        &self.roles
    }

    pub fn individuals(&self) -> &[String] {
        &self.individuals
    }

    pub fn sort_of(&self, name: &str) -> Option<NameSort> {
        self.sorts.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.sorts.contains_key(name)
    }

    pub fn is_empty(&self) -> bool {
        self.sorts.is_empty()
    }

    /// Registers `name` under `sort`; already-registered names of the same
    /// sort are ignored, cross-sort reuse is an error.
    pub fn ensure(&mut self, name: &str, sort: NameSort) -> Result<(), OntologyError> {
        match self.sorts.get(name) {
            Some(existing) if *existing == sort => Ok(()),
            Some(existing) => Err(OntologyError::DuplicateDeclarationKind {
                name: name.to_string(),
                first: *existing,
                second: sort,
            }),
            None => {
                self.sorts.insert(name.to_string(), sort);
                match sort {
                    NameSort::Concept => self.concepts.push(name.to_string()),
                    NameSort::Role => self.roles.push(name.to_string()),
                    NameSort::Individual => self.individuals.push(name.to_string()),
                }
                Ok(())
            }
        }
    }
}

/// An ALC ontology: TBox, fuzzy ABox, and the collected signature.
#[derive(Debug, Clone, PartialEq)]
pub struct Ontology {
    pub tbox: Vec<TBoxAxiom>,
    pub abox: Vec<ABoxAssertion>,
    signature: Signature,
}

impl Ontology {
    /// Builds an ontology, auto-registering every name referenced in the
    /// TBox or ABox by its first-use sort on top of the given declarations.
    pub fn new(
        declared: Signature,
        tbox: Vec<TBoxAxiom>,
        abox: Vec<ABoxAssertion>,
    ) -> Result<Self, OntologyError> {
        let mut sig = declared;
        collect_names(&mut sig, &tbox, &abox)?;
        Ok(Self {
            tbox,
            abox,
            signature: sig,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }
}

/// Stable-ordered signature of an ontology; individual `i` corresponds to
/// row/column `i` in groundings.
pub fn signature_of(o: &Ontology) -> &Signature {
    o.signature()
}

fn collect_names(
    sig: &mut Signature,
    tbox: &[TBoxAxiom],
    abox: &[ABoxAssertion],
) -> Result<(), OntologyError> {
    for ax in tbox {
        let (l, r) = ax.sides();
        l.visit_names(&mut |name, sort| sig.ensure(name, sort))?;
        r.visit_names(&mut |name, sort| sig.ensure(name, sort))?;
    }
    for a in abox {
        match &a.kind {
            AssertionKind::Concept {
                individual,
                concept,
            } => {
                concept.visit_names(&mut |name, sort| sig.ensure(name, sort))?;
                sig.ensure(individual, NameSort::Individual)?;
            }
            AssertionKind::Role {
                subject,
                object,
                role,
            } => {
                sig.ensure(role, NameSort::Role)?;
                sig.ensure(subject, NameSort::Individual)?;
                sig.ensure(object, NameSort::Individual)?;
            }
        }
    }
    Ok(())
}

/// Renders a concept for use inside a larger expression: non-atomic
/// subexpressions get parentheses so the output re-parses unambiguously.
pub fn render_concept(e: &ConceptExpr) -> String {
    if e.is_atomic() {
        render_bare(e)
    } else {
        format!("({})", render_bare(e))
    }
}

fn render_bare(e: &ConceptExpr) -> String {
    match e {
        ConceptExpr::Top => "Thing".to_string(),
        ConceptExpr::Bottom => "Nothing".to_string(),
        ConceptExpr::Name(n) => n.clone(),
        ConceptExpr::Not(c) => format!("not {}", render_concept(c)),
        ConceptExpr::And(a, b) => format!("{} and {}", render_concept(a), render_concept(b)),
        ConceptExpr::Or(a, b) => format!("{} or {}", render_concept(a), render_concept(b)),
        ConceptExpr::Exists(r, c) => format!("some {} . {}", r, render_concept(c)),
        ConceptExpr::Forall(r, c) => format!("only {} . {}", r, render_concept(c)),
    }
}

/// Prints an ontology in the line-oriented text format. The output parses
/// back to a structurally equal ontology.
pub fn render_ontology(o: &Ontology) -> String {
    let mut out = String::new();
    let sig = o.signature();
    for c in sig.concepts() {
        out.push_str(&format!("concept {c}\n"));
    }
    for r in sig.roles() {
        out.push_str(&format!("role {r}\n"));
    }
    for i in sig.individuals() {
        out.push_str(&format!("individual {i}\n"));
    }
    for ax in &o.tbox {
        let (op, l, r) = match ax {
            TBoxAxiom::Inclusion(l, r) => ("SubClassOf", l, r),
            TBoxAxiom::Equivalence(l, r) => ("EquivalentTo", l, r),
        };
        out.push_str(&format!(
            "axiom {} {} {}\n",
            render_concept(l),
            op,
            render_concept(r)
        ));
    }
    for a in &o.abox {
        match &a.kind {
            AssertionKind::Concept {
                individual,
                concept,
            } => {
                let head = match concept {
                    ConceptExpr::Name(n) => n.clone(),
                    other => render_concept(other),
                };
                out.push_str(&format!("assert {head}({individual}) = {}\n", a.degree));
            }
            AssertionKind::Role {
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
    out
}
