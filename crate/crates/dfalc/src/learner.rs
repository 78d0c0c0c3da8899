//! Loss functions over normalized TBoxes and projected Adam training.
//!
//! Both losses are piecewise linear in the grounding entries, so the
//! gradients here are hand-derived subgradients. Ties route to the first
//! operand (role entry before filler, left literal before right), and the
//! quantifier terms route to the first attaining individual; the hinge
//! contributes slope zero at its kink.
//!
//! The rule-based loss multiplies each differentiable factor by detached
//! hinge masks: the masks gate which entries move but contribute no
//! gradient themselves.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::grounding::{Grounding, GroundingError};
use crate::normalizer::{Literal, LiteralBase, NormalAxiom, NormalizedTBox};

#[derive(Debug, Error, PartialEq)]
pub enum LearnerError {
    #[error(transparent)]
    Grounding(#[from] GroundingError),
    #[error("non-finite gradient for `{0}`")]
    NonFiniteGradient(String),
    #[error("invalid training configuration: {0}")]
    BadConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LossKind {
    Hierarchical,
    Rule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TNorm {
    Product,
    Godel,
}

impl TNorm {
    fn apply(self, x: f64, y: f64) -> f64 {
        match self {
            TNorm::Product => x * y,
            TNorm::Godel => x.min(y),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainConfig {
    pub loss_kind: LossKind,
    pub learning_rate: f64,
    pub patience: usize,
    pub max_epochs: usize,
    pub alpha_prime: f64,
    pub tnorm: TNorm,
    pub seed: u64,
    /// Clamp the evidence aggregates to [0, 1] before thresholding.
    pub clamp_evidence: bool,
    /// Loss at or below this value counts as converged.
    pub tolerance: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            loss_kind: LossKind::Hierarchical,
            learning_rate: 2e-4,
            patience: 10,
            max_epochs: 20_000,
            alpha_prime: 0.8,
            tnorm: TNorm::Product,
            seed: 0,
            clamp_evidence: true,
            tolerance: 1e-9,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), LearnerError> {
        if !(self.learning_rate > 0.0) {
            return Err(LearnerError::BadConfig(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if !(0.5..=1.0).contains(&self.alpha_prime) {
            return Err(LearnerError::BadConfig(format!(
                "alpha' {} must lie in [0.5, 1]",
                self.alpha_prime
            )));
        }
        Ok(())
    }
}

/// Per-entry gradients with the same shape as a grounding.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub concepts: BTreeMap<String, Vec<f64>>,
    pub roles: BTreeMap<String, Vec<Vec<f64>>>,
}

impl GradientSet {
    pub fn zeros_like(g: &Grounding) -> Self {
        let n = g.domain_size();
        Self {
            concepts: g
                .concept_names()
                .map(|name| (name.clone(), vec![0.0; n]))
                .collect(),
            roles: g
                .role_names()
                .map(|name| (name.clone(), vec![vec![0.0; n]; n]))
                .collect(),
        }
    }

    fn add_concept(&mut self, name: &str, a: usize, delta: f64) {
        if let Some(v) = self.concepts.get_mut(name) {
            v[a] += delta;
        }
    }

    fn add_role(&mut self, name: &str, a: usize, b: usize, delta: f64) {
        if let Some(m) = self.roles.get_mut(name) {
            m[a][b] += delta;
        }
    }

    fn first_non_finite(&self) -> Option<String> {
        for (name, v) in &self.concepts {
            if v.iter().any(|x| !x.is_finite()) {
                return Some(name.clone());
            }
        }
        for (name, m) in &self.roles {
            if m.iter().flatten().any(|x| !x.is_finite()) {
                return Some(name.clone());
            }
        }
        None
    }
}

/// `ReLU(v - w)`, treated as a constant during differentiation: both
/// partials are zero, so a factor `c * detached_hinge(v, w)` backpropagates
/// only through `c`.
pub fn detached_hinge(v: f64, w: f64) -> f64 {
    (v - w).max(0.0)
}

fn lit_value(g: &Grounding, lit: &Literal, a: usize) -> Result<f64, GroundingError> {
    let base = match &lit.base {
        LiteralBase::Top => 1.0,
        LiteralBase::Bottom => 0.0,
        LiteralBase::Name(n) => g
            .concept(n)
            .ok_or_else(|| GroundingError::UnknownName(n.clone()))?[a],
    };
    Ok(if lit.negated { 1.0 - base } else { base })
}

fn lit_backprop(grads: &mut GradientSet, lit: &Literal, a: usize, delta: f64) {
    if let LiteralBase::Name(n) = &lit.base {
        let signed = if lit.negated { -delta } else { delta };
        grads.add_concept(n, a, signed);
    }
}

/// One side of a normal axiom, shallow by construction.
enum Side<'x> {
    Lit(&'x Literal),
    Conj(&'x Literal, &'x Literal),
    Disj(&'x Literal, &'x Literal),
    Exists(&'x str, &'x Literal),
    Forall(&'x str, &'x Literal),
}

fn sides(ax: &NormalAxiom) -> (Side<'_>, Side<'_>) {
    match ax {
        NormalAxiom::Sub { left, right } => (Side::Lit(left), Side::Lit(right)),
        NormalAxiom::ConjSub {
            left1,
            left2,
            right,
        } => (Side::Conj(left1, left2), Side::Lit(right)),
        NormalAxiom::SubDisj {
            left,
            right1,
            right2,
        } => (Side::Lit(left), Side::Disj(right1, right2)),
        NormalAxiom::SubExists { left, role, filler } => {
            (Side::Lit(left), Side::Exists(role, filler))
        }
        NormalAxiom::SubForall { left, role, filler } => {
            (Side::Lit(left), Side::Forall(role, filler))
        }
        NormalAxiom::ExistsSub {
            role,
            filler,
            right,
        } => (Side::Exists(role, filler), Side::Lit(right)),
        NormalAxiom::ForallSub {
            role,
            filler,
            right,
        } => (Side::Forall(role, filler), Side::Lit(right)),
    }
}

fn side_value(g: &Grounding, side: &Side<'_>, a: usize) -> Result<f64, GroundingError> {
    match side {
        Side::Lit(l) => lit_value(g, l, a),
        Side::Conj(l1, l2) => Ok(lit_value(g, l1, a)?.min(lit_value(g, l2, a)?)),
        Side::Disj(l1, l2) => Ok(lit_value(g, l1, a)?.max(lit_value(g, l2, a)?)),
        Side::Exists(role, filler) => {
            let m = role_matrix(g, role)?;
            let mut best = 0.0_f64;
            for b in 0..g.domain_size() {
                best = best.max(m[a][b].min(lit_value(g, filler, b)?));
            }
            Ok(best)
        }
        Side::Forall(role, filler) => {
            let m = role_matrix(g, role)?;
            let mut best = 1.0_f64;
            for b in 0..g.domain_size() {
                best = best.min((1.0 - m[a][b]).max(lit_value(g, filler, b)?));
            }
            Ok(best)
        }
    }
}

fn role_matrix<'g>(g: &'g Grounding, role: &str) -> Result<&'g Vec<Vec<f64>>, GroundingError> {
    g.role(role)
        .ok_or_else(|| GroundingError::UnknownName(role.to_string()))
}

/// Routes `delta` through the subexpression that attains the side's value.
fn side_backprop(
    g: &Grounding,
    grads: &mut GradientSet,
    side: &Side<'_>,
    a: usize,
    delta: f64,
) -> Result<(), GroundingError> {
    match side {
        Side::Lit(l) => lit_backprop(grads, l, a, delta),
        Side::Conj(l1, l2) => {
            if lit_value(g, l1, a)? <= lit_value(g, l2, a)? {
                lit_backprop(grads, l1, a, delta);
            } else {
                lit_backprop(grads, l2, a, delta);
            }
        }
        Side::Disj(l1, l2) => {
            if lit_value(g, l1, a)? >= lit_value(g, l2, a)? {
                lit_backprop(grads, l1, a, delta);
            } else {
                lit_backprop(grads, l2, a, delta);
            }
        }
        Side::Exists(role, filler) => {
            let n = g.domain_size();
            if n == 0 {
                return Ok(());
            }
            let m = role_matrix(g, role)?;
            let mut best_b = 0;
            let mut best = f64::NEG_INFINITY;
            for b in 0..n {
                let v = m[a][b].min(lit_value(g, filler, b)?);
                if v > best {
                    best = v;
                    best_b = b;
                }
            }
            if m[a][best_b] <= lit_value(g, filler, best_b)? {
                grads.add_role(role, a, best_b, delta);
            } else {
                lit_backprop(grads, filler, best_b, delta);
            }
        }
        Side::Forall(role, filler) => {
            let n = g.domain_size();
            if n == 0 {
                return Ok(());
            }
            let m = role_matrix(g, role)?;
            let mut best_b = 0;
            let mut best = f64::INFINITY;
            for b in 0..n {
                let v = (1.0 - m[a][b]).max(lit_value(g, filler, b)?);
                if v < best {
                    best = v;
                    best_b = b;
                }
            }
            if (1.0 - m[a][best_b]) >= lit_value(g, filler, best_b)? {
                grads.add_role(role, a, best_b, -delta);
            } else {
                lit_backprop(grads, filler, best_b, delta);
            }
        }
    }
    Ok(())
}

/// Mean over axioms of the summed elementwise hinge
/// `max(0, left(a) - right(a))`, with subgradients.
///
/// The loss is zero exactly when every normalized axiom is fuzzy
/// satisfied.
pub fn hierarchical_loss(
    g: &Grounding,
    nt: &NormalizedTBox,
) -> Result<(f64, GradientSet), LearnerError> {
    let mut grads = GradientSet::zeros_like(g);
    let t = nt.axioms.len();
    if t == 0 {
        return Ok((0.0, grads));
    }
    let w = 1.0 / t as f64;
    let mut loss = 0.0;
    for ax in &nt.axioms {
        let (left, right) = sides(ax);
        for a in 0..g.domain_size() {
            let lv = side_value(g, &left, a)?;
            let rv = side_value(g, &right, a)?;
            if lv > rv {
                loss += w * (lv - rv);
                side_backprop(g, &mut grads, &left, a, w)?;
                side_backprop(g, &mut grads, &right, a, -w)?;
            }
        }
    }
    Ok((loss, grads))
}

/// The detached coefficients of the rule-based loss, frozen at the
/// grounding where they were computed.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleMasks {
    per_axiom: Vec<AxiomMasks>,
}

#[derive(Debug, Clone, PartialEq)]
enum AxiomMasks {
    /// Forms 1-3: `G(left(s), right(s))` per individual.
    Hinge(Vec<f64>),
    /// Form 4: a filler-raising mask per individual and a link-raising
    /// mask per ordered pair.
    ExistsRight {
        raise_filler: Vec<f64>,
        raise_link: Vec<Vec<f64>>,
    },
    /// Form 5: filler-raising mask only.
    ForallRight { raise_filler: Vec<f64> },
    /// Form 6: right-side-raising mask.
    ExistsLeft { raise_right: Vec<f64> },
    /// Form 7: both symmetric raising masks.
    ForallLeft {
        raise_right: Vec<f64>,
        raise_filler: Vec<f64>,
    },
}

fn clamp_evidence(cfg: &TrainConfig, ev: f64) -> f64 {
    if cfg.clamp_evidence {
        ev.min(1.0)
    } else {
        ev
    }
}

/// Evidence that individual `s` receives an incoming `role` edge from a
/// `source`-member: `sum_a source(a) ⊗ role(a, s)`.
fn incoming_evidence(
    g: &Grounding,
    cfg: &TrainConfig,
    source: &Literal,
    role: &str,
    s: usize,
) -> Result<f64, GroundingError> {
    let m = role_matrix(g, role)?;
    let mut ev = 0.0;
    for a in 0..g.domain_size() {
        ev += cfg.tnorm.apply(lit_value(g, source, a)?, m[a][s]);
    }
    Ok(clamp_evidence(cfg, ev))
}

/// Evidence that individual `s` has an outgoing `role` edge into a
/// `target`-member: `sum_a target(a) ⊗ role(s, a)`.
fn outgoing_evidence(
    g: &Grounding,
    cfg: &TrainConfig,
    target: &Literal,
    role: &str,
    s: usize,
) -> Result<f64, GroundingError> {
    let m = role_matrix(g, role)?;
    let mut ev = 0.0;
    for a in 0..g.domain_size() {
        ev += cfg.tnorm.apply(lit_value(g, target, a)?, m[s][a]);
    }
    Ok(clamp_evidence(cfg, ev))
}

/// Computes every detached coefficient of the rule loss at `g`.
pub fn rule_masks(
    g: &Grounding,
    nt: &NormalizedTBox,
    cfg: &TrainConfig,
) -> Result<RuleMasks, LearnerError> {
    cfg.validate()?;
    let n = g.domain_size();
    let ap = cfg.alpha_prime;
    let mut per_axiom = Vec::with_capacity(nt.axioms.len());
    for ax in &nt.axioms {
        let masks = match ax {
            NormalAxiom::Sub { .. } | NormalAxiom::ConjSub { .. } | NormalAxiom::SubDisj { .. } => {
                let (left, right) = sides(ax);
                let mut m = Vec::with_capacity(n);
                for s in 0..n {
                    m.push(detached_hinge(
                        side_value(g, &left, s)?,
                        side_value(g, &right, s)?,
                    ));
                }
                AxiomMasks::Hinge(m)
            }
            NormalAxiom::SubExists { left, role, filler } => {
                let matrix = role_matrix(g, role)?;
                let mut raise_filler = Vec::with_capacity(n);
                let mut raise_link = vec![vec![0.0; n]; n];
                for s in 0..n {
                    let ev = incoming_evidence(g, cfg, left, role, s)?;
                    raise_filler.push(
                        detached_hinge(ap, lit_value(g, filler, s)?) * detached_hinge(ev, ap),
                    );
                    for a in 0..n {
                        raise_link[s][a] = detached_hinge(
                            cfg.tnorm
                                .apply(lit_value(g, left, s)?, lit_value(g, filler, a)?),
                            matrix[s][a],
                        );
                    }
                }
                AxiomMasks::ExistsRight {
                    raise_filler,
                    raise_link,
                }
            }
            NormalAxiom::SubForall { left, role, filler } => {
                let mut raise_filler = Vec::with_capacity(n);
                for s in 0..n {
                    let ev = incoming_evidence(g, cfg, left, role, s)?;
                    raise_filler.push(
                        detached_hinge(ap, lit_value(g, filler, s)?) * detached_hinge(ev, ap),
                    );
                }
                AxiomMasks::ForallRight { raise_filler }
            }
            NormalAxiom::ExistsSub {
                role,
                filler,
                right,
            } => {
                let mut raise_right = Vec::with_capacity(n);
                for s in 0..n {
                    let ev = outgoing_evidence(g, cfg, filler, role, s)?;
                    raise_right.push(
                        detached_hinge(ap, lit_value(g, right, s)?) * detached_hinge(ev, ap),
                    );
                }
                AxiomMasks::ExistsLeft { raise_right }
            }
            NormalAxiom::ForallSub {
                role,
                filler,
                right,
            } => {
                let mut raise_right = Vec::with_capacity(n);
                let mut raise_filler = Vec::with_capacity(n);
                for s in 0..n {
                    let out_ev = outgoing_evidence(g, cfg, filler, role, s)?;
                    raise_right.push(
                        detached_hinge(ap, lit_value(g, right, s)?) * detached_hinge(out_ev, ap),
                    );
                    let in_ev = incoming_evidence(g, cfg, right, role, s)?;
                    raise_filler.push(
                        detached_hinge(ap, lit_value(g, filler, s)?) * detached_hinge(in_ev, ap),
                    );
                }
                AxiomMasks::ForallLeft {
                    raise_right,
                    raise_filler,
                }
            }
        };
        per_axiom.push(masks);
    }
    Ok(RuleMasks { per_axiom })
}

/// Rule-loss value with the detached coefficients held fixed at `masks`.
pub fn rule_loss_frozen(
    g: &Grounding,
    nt: &NormalizedTBox,
    masks: &RuleMasks,
) -> Result<f64, LearnerError> {
    rule_loss_inner(g, nt, masks, None)
}

/// Rule-based loss: per-form revision terms with detached masks. Gradient
/// flows only through the `(1 - value)` factors, so each term raises the
/// entry its mask selected.
pub fn rule_loss(
    g: &Grounding,
    nt: &NormalizedTBox,
    cfg: &TrainConfig,
) -> Result<(f64, GradientSet), LearnerError> {
    let masks = rule_masks(g, nt, cfg)?;
    let mut grads = GradientSet::zeros_like(g);
    let loss = rule_loss_inner(g, nt, &masks, Some(&mut grads))?;
    Ok((loss, grads))
}

fn rule_loss_inner(
    g: &Grounding,
    nt: &NormalizedTBox,
    masks: &RuleMasks,
    mut grads: Option<&mut GradientSet>,
) -> Result<f64, LearnerError> {
    if masks.per_axiom.len() != nt.axioms.len() {
        return Err(LearnerError::Grounding(GroundingError::ShapeMismatch(
            "mask set does not match the axiom list".into(),
        )));
    }
    let n = g.domain_size();
    let mut loss = 0.0;
    for (ax, mask) in nt.axioms.iter().zip(&masks.per_axiom) {
        match (ax, mask) {
            (
                NormalAxiom::Sub { .. } | NormalAxiom::ConjSub { .. } | NormalAxiom::SubDisj { .. },
                AxiomMasks::Hinge(m),
            ) => {
                let (_, right) = sides(ax);
                for s in 0..n {
                    if m[s] == 0.0 {
                        continue;
                    }
                    loss += (1.0 - side_value(g, &right, s)?) * m[s];
                    if let Some(grads) = grads.as_deref_mut() {
                        side_backprop(g, grads, &right, s, -m[s])?;
                    }
                }
            }
            (
                NormalAxiom::SubExists { role, filler, .. },
                AxiomMasks::ExistsRight {
                    raise_filler,
                    raise_link,
                },
            ) => {
                let matrix = role_matrix(g, role)?;
                for s in 0..n {
                    if raise_filler[s] != 0.0 {
                        loss += (1.0 - lit_value(g, filler, s)?) * raise_filler[s];
                        if let Some(grads) = grads.as_deref_mut() {
                            lit_backprop(grads, filler, s, -raise_filler[s]);
                        }
                    }
                    for a in 0..n {
                        if raise_link[s][a] != 0.0 {
                            loss += (1.0 - matrix[s][a]) * raise_link[s][a];
                            if let Some(grads) = grads.as_deref_mut() {
                                grads.add_role(role, s, a, -raise_link[s][a]);
                            }
                        }
                    }
                }
            }
            (NormalAxiom::SubForall { filler, .. }, AxiomMasks::ForallRight { raise_filler }) => {
                for s in 0..n {
                    if raise_filler[s] != 0.0 {
                        loss += (1.0 - lit_value(g, filler, s)?) * raise_filler[s];
                        if let Some(grads) = grads.as_deref_mut() {
                            lit_backprop(grads, filler, s, -raise_filler[s]);
                        }
                    }
                }
            }
            (NormalAxiom::ExistsSub { right, .. }, AxiomMasks::ExistsLeft { raise_right }) => {
                for s in 0..n {
                    if raise_right[s] != 0.0 {
                        loss += (1.0 - lit_value(g, right, s)?) * raise_right[s];
                        if let Some(grads) = grads.as_deref_mut() {
                            lit_backprop(grads, right, s, -raise_right[s]);
                        }
                    }
                }
            }
            (
                NormalAxiom::ForallSub { filler, right, .. },
                AxiomMasks::ForallLeft {
                    raise_right,
                    raise_filler,
                },
            ) => {
                for s in 0..n {
                    if raise_right[s] != 0.0 {
                        loss += (1.0 - lit_value(g, right, s)?) * raise_right[s];
                        if let Some(grads) = grads.as_deref_mut() {
                            lit_backprop(grads, right, s, -raise_right[s]);
                        }
                    }
                    if raise_filler[s] != 0.0 {
                        loss += (1.0 - lit_value(g, filler, s)?) * raise_filler[s];
                        if let Some(grads) = grads.as_deref_mut() {
                            lit_backprop(grads, filler, s, -raise_filler[s]);
                        }
                    }
                }
            }
            _ => {
                return Err(LearnerError::Grounding(GroundingError::ShapeMismatch(
                    "mask kind does not match the axiom form".into(),
                )))
            }
        }
    }
    Ok(loss)
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

/// First and second moment estimates, shaped like the grounding.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: GradientSet,
    v: GradientSet,
    t: u64,
}

impl AdamState {
    pub fn new(g: &Grounding) -> Self {
        Self {
            m: GradientSet::zeros_like(g),
            v: GradientSet::zeros_like(g),
            t: 0,
        }
    }
}

/// One Adam update followed by elementwise projection onto [0, 1].
pub fn adam_step(
    g: &mut Grounding,
    grads: &GradientSet,
    state: &mut AdamState,
    cfg: &TrainConfig,
) -> Result<(), LearnerError> {
    if let Some(name) = grads.first_non_finite() {
        return Err(LearnerError::NonFiniteGradient(name));
    }
    state.t += 1;
    let bc1 = 1.0 - BETA1.powi(state.t as i32);
    let bc2 = 1.0 - BETA2.powi(state.t as i32);
    let lr = cfg.learning_rate;

    let update = |x: &mut f64, grad: f64, m: &mut f64, v: &mut f64| {
        *m = BETA1 * *m + (1.0 - BETA1) * grad;
        *v = BETA2 * *v + (1.0 - BETA2) * grad * grad;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *x -= lr * m_hat / (v_hat.sqrt() + EPS);
        *x = x.clamp(0.0, 1.0);
    };

    let missing = |name: &str| {
        LearnerError::Grounding(GroundingError::ShapeMismatch(format!(
            "gradient tables do not cover `{name}`"
        )))
    };

    let concept_names: Vec<String> = g.concept_names().cloned().collect();
    for name in &concept_names {
        let gv = grads.concepts.get(name).ok_or_else(|| missing(name))?;
        let mv = state.m.concepts.get_mut(name).ok_or_else(|| missing(name))?;
        let vv = state.v.concepts.get_mut(name).ok_or_else(|| missing(name))?;
        let xs = g.concepts_mut().get_mut(name).expect("name listed above");
        if gv.len() != xs.len() {
            return Err(missing(name));
        }
        for i in 0..xs.len() {
            update(&mut xs[i], gv[i], &mut mv[i], &mut vv[i]);
        }
    }
    let role_names: Vec<String> = g.role_names().cloned().collect();
    for name in &role_names {
        let gm = grads.roles.get(name).ok_or_else(|| missing(name))?;
        let mm = state.m.roles.get_mut(name).ok_or_else(|| missing(name))?;
        let vm = state.v.roles.get_mut(name).ok_or_else(|| missing(name))?;
        let xs = g.roles_mut().get_mut(name).expect("name listed above");
        if gm.len() != xs.len() {
            return Err(missing(name));
        }
        for i in 0..xs.len() {
            for j in 0..xs[i].len() {
                update(&mut xs[i][j], gm[i][j], &mut mm[i][j], &mut vm[i][j]);
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub grounding: Grounding,
    pub history: Vec<f64>,
}

/// Full-batch descent with early stopping. Stops when the loss reaches
/// the tolerance, when the best loss has not improved for `patience`
/// epochs, or at `max_epochs`; returns the grounding of the best epoch.
pub fn train(
    init: Grounding,
    nt: &NormalizedTBox,
    cfg: &TrainConfig,
) -> Result<TrainResult, LearnerError> {
    cfg.validate()?;
    init.covers(&nt.extended_signature)?;
    let mut g = init;
    let mut state = AdamState::new(&g);
    let mut history = Vec::new();
    let mut best_loss = f64::INFINITY;
    let mut best_g = g.clone();
    let mut stalled = 0usize;

    while history.len() < cfg.max_epochs {
        let (loss, grads) = match cfg.loss_kind {
            LossKind::Hierarchical => hierarchical_loss(&g, nt)?,
            LossKind::Rule => rule_loss(&g, nt, cfg)?,
        };
        history.push(loss);
        if loss < best_loss {
            best_loss = loss;
            best_g = g.clone();
            stalled = 0;
        } else {
            stalled += 1;
        }
        if loss <= cfg.tolerance || stalled >= cfg.patience || history.len() == cfg.max_epochs {
            break;
        }
        adam_step(&mut g, &grads, &mut state, cfg)?;
    }
    Ok(TrainResult {
        grounding: best_g,
        history,
    })
}

/// Per-epoch training log as `epoch,loss,best_loss,stalled_epochs` CSV.
pub fn history_csv(history: &[f64]) -> String {
    let mut out = String::from("epoch,loss,best_loss,stalled_epochs\n");
    let mut best = f64::INFINITY;
    let mut stalled = 0usize;
    for (epoch, &loss) in history.iter().enumerate() {
        if loss < best {
            best = loss;
            stalled = 0;
        } else {
            stalled += 1;
        }
        out.push_str(&format!("{epoch},{loss},{best},{stalled}\n"));
    }
    out
}
