//! Seeded random model generators.
//!
//! Test suites and the `gen` subcommand need streams of models drawn from
//! each class. Strong recursive models are built directly by sampling a
//! vertex order and wiring every variable to earlier ones; recursive
//! models sample one such order per context; unique-response models with
//! arbitrary (possibly cyclic) wiring are found by rejection sampling.
//! Generation is fully determined by the seed.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::language::{Signature, VarId, VarSet};
use crate::scm::{valuations, CausalModel, Rule, RuleTable, ScmError};

/// Attempt budget for rejection sampling before giving up.
const UNIQ_ATTEMPTS: usize = 500;

/// Which model class to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Arbitrary wiring, kept only when every context solves uniquely.
    Uniq,
    /// One shared vertex order; the union wiring is a DAG.
    StrongRecursive,
    /// A separate vertex order per context; the union may be cyclic.
    Recursive,
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<ModelKind, String> {
        match s {
            "uniq" => Ok(ModelKind::Uniq),
            "srec" => Ok(ModelKind::StrongRecursive),
            "rec" => Ok(ModelKind::Recursive),
            other => Err(format!("unknown model kind `{other}` (expected uniq, srec or rec)")),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Uniq => write!(f, "uniq"),
            ModelKind::StrongRecursive => write!(f, "srec"),
            ModelKind::Recursive => write!(f, "rec"),
        }
    }
}

/// Shape of the models to generate.
#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub kind: ModelKind,
    /// Number of variables (named X1..Xn).
    pub n: usize,
    /// Values per variable (rendered "0".."d-1").
    pub domain: usize,
    /// Number of contexts (named u1..um).
    pub contexts: usize,
    /// Cap on how many other variables one equation may read.
    pub max_parents: usize,
}

impl GenParams {
    pub fn new(kind: ModelKind) -> GenParams {
        GenParams { kind, n: 3, domain: 2, contexts: 1, max_parents: 2 }
    }
}

/// Errors from model generation.
#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
    #[error("no unique-response model found in {0} attempts")]
    Exhausted(usize),
    #[error(transparent)]
    Scm(#[from] ScmError),
}

/// Draws one model of the requested kind, fully determined by `seed`.
pub fn generate_model(params: &GenParams, seed: u64) -> Result<CausalModel, GenError> {
    if params.domain < 2 || params.domain > 16 {
        return Err(GenError::BadParams("domain size must be between 2 and 16".into()));
    }
    if params.contexts < 1 || params.contexts > 16 {
        return Err(GenError::BadParams("context count must be between 1 and 16".into()));
    }
    let sig = make_signature(params)?;
    let max_parents = params.max_parents.min(params.n.saturating_sub(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let contexts: Vec<String> = (1..=params.contexts).map(|i| format!("u{i}")).collect();
    match params.kind {
        ModelKind::Uniq => {
            for _ in 0..UNIQ_ATTEMPTS {
                let parents = free_parent_sets(&mut rng, params.n, max_parents);
                let shared: Vec<Vec<VarSet>> =
                    parents.iter().map(|&p| vec![p; params.contexts]).collect();
                let model = build_model(&mut rng, &sig, &contexts, &shared, params.domain)?;
                if model.check_uniq() {
                    return Ok(model);
                }
            }
            Err(GenError::Exhausted(UNIQ_ATTEMPTS))
        }
        ModelKind::StrongRecursive => {
            let order = random_order(&mut rng, params.n);
            let parents = dag_parent_sets(&mut rng, &order, max_parents);
            let shared: Vec<Vec<VarSet>> =
                parents.iter().map(|&p| vec![p; params.contexts]).collect();
            Ok(build_model(&mut rng, &sig, &contexts, &shared, params.domain)?)
        }
        ModelKind::Recursive => {
            let mut per_var: Vec<Vec<VarSet>> = vec![Vec::new(); params.n];
            for _ in 0..params.contexts {
                let order = random_order(&mut rng, params.n);
                let parents = dag_parent_sets(&mut rng, &order, max_parents);
                for (v, &p) in parents.iter().enumerate() {
                    per_var[v].push(p);
                }
            }
            Ok(build_model(&mut rng, &sig, &contexts, &per_var, params.domain)?)
        }
    }
}

fn make_signature(params: &GenParams) -> Result<Signature, GenError> {
    let values: Vec<String> = (0..params.domain).map(|v| v.to_string()).collect();
    let refs: Vec<&str> = values.iter().map(String::as_str).collect();
    Signature::uniform(params.n, &refs).map_err(|e| GenError::BadParams(e.to_string()))
}

fn random_order(rng: &mut ChaCha8Rng, n: usize) -> Vec<VarId> {
    let mut order: Vec<VarId> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Parents drawn from the whole vertex set minus the variable itself.
fn free_parent_sets(rng: &mut ChaCha8Rng, n: usize, max_parents: usize) -> Vec<VarSet> {
    (0..n)
        .map(|v| {
            let others: Vec<VarId> = (0..n).filter(|&o| o != v).collect();
            let k = rng.gen_range(0..=max_parents.min(others.len()));
            VarSet::from_iter(others.choose_multiple(rng, k).copied())
        })
        .collect()
}

/// Parents of each vertex drawn from its predecessors in `order`.
fn dag_parent_sets(rng: &mut ChaCha8Rng, order: &[VarId], max_parents: usize) -> Vec<VarSet> {
    let n = order.len();
    let mut parents = vec![VarSet::EMPTY; n];
    for (pos, &v) in order.iter().enumerate() {
        let earlier = &order[..pos];
        let k = rng.gen_range(0..=max_parents.min(earlier.len()));
        parents[v] = VarSet::from_iter(earlier.choose_multiple(rng, k).copied());
    }
    parents
}

/// One rule per parent valuation per context, so the table is a total
/// random function of the parents; the default only backstops.
fn build_model(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    contexts: &[String],
    parents: &[Vec<VarSet>],
    domain: usize,
) -> Result<CausalModel, ScmError> {
    let tables: Vec<RuleTable> = parents
        .iter()
        .map(|per_ctx| {
            let mut rules = Vec::new();
            for (ctx, &ps) in per_ctx.iter().enumerate() {
                let tag = if contexts.len() == 1 { None } else { Some(ctx as u16) };
                for vals in valuations(sig, ps) {
                    rules.push(Rule {
                        ctx: tag,
                        conds: vals.iter().collect(),
                        then: rng.gen_range(0..domain) as u8,
                    });
                }
            }
            RuleTable { rules, default: rng.gen_range(0..domain) as u8 }
        })
        .collect();
    CausalModel::new(sig.clone(), contexts.to_vec(), tables)
}
