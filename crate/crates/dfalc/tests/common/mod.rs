//! Shared helpers for the integration suites: seeded random ontologies
//! and groundings small enough for exhaustive model enumeration.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use dfalc::grounding::Grounding;
use dfalc::normalizer::{normalize, NormalizedTBox};
use dfalc::ontology::{ConceptExpr, NameSort, Ontology, Signature, TBoxAxiom};

pub fn random_expr(
    rng: &mut ChaCha12Rng,
    concepts: &[String],
    roles: &[String],
    depth: usize,
) -> ConceptExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        let name = ConceptExpr::name(concepts[rng.gen_range(0..concepts.len())].clone());
        return if rng.gen_bool(0.3) {
            ConceptExpr::not(name)
        } else {
            name
        };
    }
    let variants = if roles.is_empty() { 3 } else { 5 };
    match rng.gen_range(0..variants) {
        0 => ConceptExpr::and(
            random_expr(rng, concepts, roles, depth - 1),
            random_expr(rng, concepts, roles, depth - 1),
        ),
        1 => ConceptExpr::or(
            random_expr(rng, concepts, roles, depth - 1),
            random_expr(rng, concepts, roles, depth - 1),
        ),
        2 => ConceptExpr::not(random_expr(rng, concepts, roles, depth - 1)),
        3 => ConceptExpr::exists(
            roles[rng.gen_range(0..roles.len())].clone(),
            random_expr(rng, concepts, roles, depth - 1),
        ),
        _ => ConceptExpr::forall(
            roles[rng.gen_range(0..roles.len())].clone(),
            random_expr(rng, concepts, roles, depth - 1),
        ),
    }
}

/// A random TBox-only ontology whose normalized interpretation space
/// stays below `max_bits`, so both the original and the normalized
/// ontology can be model-enumerated exhaustively.
pub fn random_enumerable_ontology(
    rng: &mut ChaCha12Rng,
    max_bits: usize,
) -> (Ontology, NormalizedTBox) {
    loop {
        let d = *[1, 2, 2, 3].choose(rng).unwrap();
        let c = rng.gen_range(1..=3usize);
        let r = rng.gen_range(0..=2usize);
        if c * d + r * d * d > max_bits.saturating_sub(2) {
            continue;
        }
        let concepts: Vec<String> = (1..=c).map(|i| format!("P{i}")).collect();
        let roles: Vec<String> = (1..=r).map(|i| format!("t{i}")).collect();
        let n_axioms = rng.gen_range(1..=3usize);
        let tbox: Vec<TBoxAxiom> = (0..n_axioms)
            .map(|_| {
                let left = random_expr(rng, &concepts, &roles, 3);
                let right = random_expr(rng, &concepts, &roles, 3);
                if rng.gen_bool(0.2) {
                    TBoxAxiom::Equivalence(left, right)
                } else {
                    TBoxAxiom::Inclusion(left, right)
                }
            })
            .collect();
        let mut sig = Signature::new();
        for name in &concepts {
            sig.ensure(name, NameSort::Concept).unwrap();
        }
        for name in &roles {
            sig.ensure(name, NameSort::Role).unwrap();
        }
        for i in 1..=d {
            sig.ensure(&format!("u{i}"), NameSort::Individual).unwrap();
        }
        let o = Ontology::new(sig, tbox, vec![]).unwrap();
        let nt = normalize(&o);
        let total_concepts = nt.extended_signature.concepts().len();
        let bits = total_concepts * d + r * d * d;
        if bits <= max_bits {
            return (o, nt);
        }
    }
}

/// A grounding with uniform random entries for the given tables.
pub fn random_grounding(
    rng: &mut ChaCha12Rng,
    individuals: usize,
    concepts: &[&str],
    roles: &[&str],
) -> Grounding {
    let names: Vec<String> = (1..=individuals).map(|i| format!("e{i}")).collect();
    let mut g = Grounding::new(names);
    for c in concepts {
        g.insert_concept(
            c.to_string(),
            (0..individuals).map(|_| rng.gen_range(0.0..=1.0)).collect(),
        );
    }
    for r in roles {
        g.insert_role(
            r.to_string(),
            (0..individuals)
                .map(|_| (0..individuals).map(|_| rng.gen_range(0.0..=1.0)).collect())
                .collect(),
        );
    }
    g
}
