//! Satisfaction of relevance formulas by a causal model.
//!
//! An atom `irr(x; y; z)` holds when no intervention on `x` can change the
//! joint potential response of `y`, once `z` is pinned to any fixed values,
//! under any side intervention on outside variables and at any context.
//! The check sweeps every outside subset `W` (including the empty one),
//! every valuation of `z` and `W`, every pair of `x` valuations, and every
//! context, comparing the solved values of `y`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::language::{Atom, AtomId, AtomSpace, Formula, Literal, Signature};
use crate::scm::{valuations, Assignment, CausalModel, ScmError, Solutions};

/// Cached solver wrapper for repeated potential-response queries against
/// one model. Distinct atoms share many interventions, so the cache earns
/// its keep across a theory sweep.
pub struct Evaluator<'m> {
    model: &'m CausalModel,
    cache: HashMap<(Assignment, u16), Option<Assignment>>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m CausalModel) -> Evaluator<'m> {
        Evaluator { model, cache: HashMap::new() }
    }

    pub fn model(&self) -> &'m CausalModel {
        self.model
    }

    /// The unique solution under the given intervention, or a `NotUnique`
    /// error when the equation system has zero or several solutions there.
    pub fn response(&mut self, intervention: &Assignment, ctx: u16) -> Result<Assignment, ScmError> {
        let key = (*intervention, ctx);
        let entry = self.cache.entry(key).or_insert_with(|| {
            match self.model.solve_at(intervention, ctx) {
                Solutions::Unique(a) => Some(a),
                _ => None,
            }
        });
        entry.ok_or_else(|| ScmError::NotUnique {
            intervention: intervention.render(self.model.sig()),
            context: self.model.contexts()[ctx as usize].clone(),
        })
    }

    /// Does the model satisfy the atom?
    pub fn satisfies_atom(&mut self, atom: &Atom) -> Result<bool, ScmError> {
        let model: &'m CausalModel = self.model;
        let sig: &'m Signature = model.sig();
        let n_ctx = model.contexts().len() as u16;
        let outside = sig.full_set().minus(atom.support());
        for w in outside.subsets() {
            let pinned = atom.z().union(w);
            for zw in valuations(sig, pinned) {
                for ctx in 0..n_ctx {
                    let mut baseline: Option<Assignment> = None;
                    for xv in valuations(sig, atom.x()) {
                        let resp = self.response(&xv.union(&zw), ctx)?.restrict(atom.y());
                        match &baseline {
                            None => baseline = Some(resp),
                            Some(b) if *b != resp => return Ok(false),
                            Some(_) => {}
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Recursive satisfaction; `=>` is material implication. Both sides of
    /// a connective are evaluated, so error reporting does not depend on
    /// short-circuit order.
    pub fn satisfies(&mut self, f: &Formula) -> Result<bool, ScmError> {
        Ok(match f {
            Formula::Atom(a) => self.satisfies_atom(a)?,
            Formula::Not(g) => !self.satisfies(g)?,
            Formula::And(a, b) => {
                let (va, vb) = (self.satisfies(a)?, self.satisfies(b)?);
                va && vb
            }
            Formula::Or(a, b) => {
                let (va, vb) = (self.satisfies(a)?, self.satisfies(b)?);
                va || vb
            }
            Formula::Implies(a, b) => {
                let (va, vb) = (self.satisfies(a)?, self.satisfies(b)?);
                !va || vb
            }
        })
    }
}

/// The model's verdict on every atom of its signature's atom space.
#[derive(Debug, Clone)]
pub struct LiteralTheory {
    space: AtomSpace,
    verdicts: Vec<bool>,
}

impl LiteralTheory {
    pub fn space(&self) -> &AtomSpace {
        &self.space
    }

    pub fn verdict(&self, id: AtomId) -> bool {
        self.verdicts[id.idx()]
    }

    pub fn verdicts(&self) -> &[bool] {
        &self.verdicts
    }

    /// Literals in atom-space order.
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.space
            .atoms()
            .iter()
            .zip(&self.verdicts)
            .map(|(a, &positive)| Literal { atom: *a, positive })
    }
}

/// Evaluates every atom of the signature against the model. Atoms are
/// checked in parallel; the result (including which error surfaces, if
/// any) is deterministic because verdicts are collected in atom order.
pub fn theory_literals(model: &CausalModel) -> Result<LiteralTheory, ScmError> {
    let space = AtomSpace::new(model.sig().clone());
    let results: Vec<Result<bool, ScmError>> = space
        .atoms()
        .par_iter()
        .map_init(|| Evaluator::new(model), |ev, atom| ev.satisfies_atom(atom))
        .collect();
    let mut verdicts = Vec::with_capacity(results.len());
    for r in results {
        verdicts.push(r?);
    }
    Ok(LiteralTheory { space, verdicts })
}
