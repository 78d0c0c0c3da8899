//! Grounding revision for ALC ontologies under differentiable Gödel
//! fuzzy semantics.
//!
//! The pipeline: parse an ontology from the line-oriented text format,
//! normalize its TBox into seven literal-only axiom forms, represent a
//! fuzzy interpretation as membership vectors and matrices over the
//! individual domain, and revise a noisy grounding by projected Adam
//! descent on the hierarchical or rule-based loss until the crispified
//! result satisfies the ontology.

pub mod grounding;
pub mod harness;
pub mod learner;
pub mod normalizer;
pub mod ontology;
pub mod parser;

pub use grounding::{
    crispify, eval_concept, fuzzy_inclusion_check, success_rate, CrispConfig, Grounding,
    ThreeValued, UnknownPolicy,
};
pub use learner::{hierarchical_loss, rule_loss, train, LossKind, TNorm, TrainConfig};
pub use normalizer::{classify_form, normalize, seed_fresh_assertions, to_nnf, NormalizedTBox};
pub use ontology::{ConceptExpr, Ontology, Signature, TBoxAxiom};
pub use parser::parse_ontology;
