//! The deductive calculus: ground axiom clauses over an atom space,
//! extension enumeration under three axiom systems, consistency and
//! derivability queries, and the graph notions attached to extensions
//! (parent sets, the syntactic graph, path witnesses).
//!
//! The three systems share the axiom clauses and differ in a structural
//! side condition on extensions: none for the plain system, an acyclic
//! syntactic graph for the strong-recursive one, and per-pair fragment
//! witnesses for the recursive one. Derivability is decided semantically:
//! a formula follows from a set iff it holds in every extension, which a
//! refutation query (no extension satisfies the negation) decides.

mod axioms;
mod solver;

pub use axioms::{instantiate_axioms, AxiomId, AxiomInstance};
pub use solver::ExtensionIter;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::language::{Atom, AtomId, AtomSpace, Formula, Literal, Signature, VarId, VarSet};
use crate::scm::Digraph;

use solver::Clause;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalcError {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("invalid extension: {0}")]
    InvalidExtension(String),
}

/// Which structural side condition extensions must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomSystem {
    /// Axiom clauses only.
    Uniq,
    /// Axiom clauses and an acyclic syntactic graph.
    Srec,
    /// Axiom clauses and fragment witnesses for every falsified pair.
    Rec,
}

impl std::str::FromStr for AxiomSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<AxiomSystem, String> {
        match s {
            "uniq" => Ok(AxiomSystem::Uniq),
            "srec" => Ok(AxiomSystem::Srec),
            "rec" => Ok(AxiomSystem::Rec),
            other => Err(format!("unknown axiom system `{other}` (expected uniq, srec or rec)")),
        }
    }
}

impl std::fmt::Display for AxiomSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AxiomSystem::Uniq => "uniq",
            AxiomSystem::Srec => "srec",
            AxiomSystem::Rec => "rec",
        })
    }
}

/// A total truth assignment over the atom space that satisfies every axiom
/// clause (and the structural condition of the system it was enumerated
/// under). Produced by [`Calculus::extensions`] and
/// [`Calculus::consistent`].
#[derive(Debug, Clone)]
pub struct Extension {
    space: Arc<AtomSpace>,
    values: Vec<bool>,
}

impl PartialEq for Extension {
    fn eq(&self, other: &Extension) -> bool {
        self.space.sig().same_as(other.space.sig()) && self.values == other.values
    }
}

impl Eq for Extension {}

impl Extension {
    pub(crate) fn from_values(space: Arc<AtomSpace>, values: Vec<bool>) -> Extension {
        assert_eq!(space.len(), values.len());
        Extension { space, values }
    }

    /// Wraps an externally computed verdict vector (for example a model's
    /// literal theory) as an extension candidate. The values are not
    /// checked against the axiom clauses here.
    pub fn from_verdicts(space: &AtomSpace, values: Vec<bool>) -> Extension {
        Extension::from_values(Arc::new(space.clone()), values)
    }

    pub fn space(&self) -> &AtomSpace {
        &self.space
    }

    pub fn value(&self, id: AtomId) -> bool {
        self.values[id.idx()]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// Truth of an atom; errors when the atom is not over this signature.
    pub fn truth(&self, atom: &Atom) -> Result<bool, CalcError> {
        match self.space.try_id(*atom) {
            Some(id) => Ok(self.values[id.idx()]),
            None => Err(CalcError::SignatureMismatch(
                "atom is not over this extension's signature".into(),
            )),
        }
    }

    pub fn satisfies(&self, f: &Formula) -> Result<bool, CalcError> {
        validate_formula(&self.space, f)?;
        Ok(f.eval(|a| self.values[self.space.id(a).idx()]))
    }

    /// Literals in atom-space order.
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.space
            .atoms()
            .iter()
            .zip(&self.values)
            .map(|(a, &positive)| Literal { atom: *a, positive })
    }

    /// The unique smallest set `P` such that everything outside `P` and `y`
    /// is irrelevant to `y` given `P`; the full complement of `y` when no
    /// set separates. Searched in size order, then mask order.
    pub fn parent_set(&self, y: VarId) -> VarSet {
        let sig = self.space.sig();
        let rest = sig.full_set().minus(VarSet::singleton(y));
        let mut candidates: Vec<VarSet> = rest.subsets().collect();
        candidates.sort_by_key(|s| (s.len(), s.0));
        for p in candidates {
            if p == rest {
                // the x side would be empty; this fallback is the answer
                continue;
            }
            let atom = Atom::new(rest.minus(p), VarSet::singleton(y), p)
                .expect("complement split is a valid atom");
            if self.value(self.space.id(atom)) {
                return p;
            }
        }
        rest
    }

    /// The graph with an edge `x -> y` exactly when the atom pinning all
    /// other variables, `irr(x; y; rest)`, is false. For clause-satisfying
    /// assignments this matches membership of `x` in `parent_set(y)`.
    pub fn syntactic_graph(&self) -> Digraph {
        let sig = self.space.sig();
        let n = sig.len();
        let mut g = Digraph::new(n);
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                if !self.value(self.space.id(edge_atom(sig, x, y))) {
                    g.add_edge(x, y);
                }
            }
        }
        g
    }

    /// A directed path `x .. y` in the syntactic graph with no interior
    /// vertex in `z`, which must exist whenever `irr(x; y; z)` is false in
    /// a valid extension. First path in lexicographic vertex order.
    pub fn path_witness(&self, x: VarId, y: VarId, z: VarSet) -> Result<Vec<VarId>, CalcError> {
        let atom = Atom::new(VarSet::singleton(x), VarSet::singleton(y), z)
            .map_err(|e| CalcError::InvalidExtension(e.to_string()))?;
        if self.truth(&atom)? {
            return Err(CalcError::InvalidExtension(
                "path witness requested for an atom the extension satisfies".into(),
            ));
        }
        let g = self.syntactic_graph();
        g.simple_paths(x, y)
            .into_iter()
            .find(|p| p[1..p.len() - 1].iter().all(|v| !z.contains(*v)))
            .ok_or_else(|| {
                CalcError::InvalidExtension(
                    "no unblocked path for a falsified atom; the assignment is not a valid extension"
                        .into(),
                )
            })
    }
}

/// The widest-condition atom of an ordered pair: `irr(x; y; (xy)^c)`.
fn edge_atom(sig: &Signature, x: VarId, y: VarId) -> Atom {
    let xs = VarSet::singleton(x);
    let ys = VarSet::singleton(y);
    Atom::new(xs, ys, sig.full_set().minus(xs).minus(ys)).expect("pair atom is valid")
}

/// Ground clause database and query engine for one signature. Building it
/// instantiates every axiom once; queries then share the clause set.
pub struct Calculus {
    space: Arc<AtomSpace>,
    instances: Vec<AxiomInstance>,
    clauses: Vec<Clause>,
    occ: Vec<Vec<u32>>,
    edge_atoms: Vec<Option<AtomId>>,
    pair_atoms: Vec<Vec<(VarSet, AtomId)>>,
}

impl Calculus {
    pub fn new(sig: Signature) -> Calculus {
        let space = Arc::new(AtomSpace::new(sig));
        let instances = instantiate_axioms(space.sig());

        let mut clauses = Vec::new();
        let mut seen = HashMap::new();
        for inst in &instances {
            let ants: Vec<AtomId> = inst.antecedents.iter().map(|a| space.id(*a)).collect();
            let cons = space.id(inst.consequent);
            // instances from different schemas can ground to one clause
            if seen.insert((ants.clone(), cons), ()).is_none() {
                clauses.push(Clause { ants: ants.into_boxed_slice(), cons });
            }
        }

        let mut occ = vec![Vec::new(); space.len()];
        for (ci, clause) in clauses.iter().enumerate() {
            for &a in clause.ants.iter() {
                occ[a.idx()].push(ci as u32);
            }
            occ[clause.cons.idx()].push(ci as u32);
        }

        let n = space.sig().len();
        let mut edge_atoms = vec![None; n * n];
        let mut pair_atoms = vec![Vec::new(); n * n];
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                edge_atoms[x * n + y] = Some(space.id(edge_atom(space.sig(), x, y)));
                let xs = VarSet::singleton(x);
                let ys = VarSet::singleton(y);
                let mut zs: Vec<(VarSet, AtomId)> = space
                    .sig()
                    .full_set()
                    .minus(xs)
                    .minus(ys)
                    .subsets()
                    .map(|z| (z, space.id(Atom::new(xs, ys, z).unwrap())))
                    .collect();
                zs.sort_by_key(|&(z, _)| z.0);
                pair_atoms[x * n + y] = zs;
            }
        }

        Calculus { space, instances, clauses, occ, edge_atoms, pair_atoms }
    }

    pub fn space(&self) -> &AtomSpace {
        &self.space
    }

    pub(crate) fn space_arc(&self) -> Arc<AtomSpace> {
        self.space.clone()
    }

    pub fn instances(&self) -> &[AxiomInstance] {
        &self.instances
    }

    pub(crate) fn clause(&self, ci: usize) -> &Clause {
        &self.clauses[ci]
    }

    pub(crate) fn occurrences(&self, atom: AtomId) -> &[u32] {
        &self.occ[atom.idx()]
    }

    pub(crate) fn edge_atom(&self, x: VarId, y: VarId) -> Option<AtomId> {
        self.edge_atoms[x * self.space.sig().len() + y]
    }

    /// All `irr(x; y; Z)` atom ids of an ordered pair, ascending by `Z`.
    pub(crate) fn pair_atoms(&self, x: VarId, y: VarId) -> &[(VarSet, AtomId)] {
        &self.pair_atoms[x * self.space.sig().len() + y]
    }

    /// Streams every extension of the constraint set under the system, in
    /// canonical order. An empty stream means the set is inconsistent.
    pub fn extensions(
        &self,
        gamma: &[Formula],
        sys: AxiomSystem,
    ) -> Result<ExtensionIter<'_>, CalcError> {
        let mut pins = Vec::new();
        let mut rest = Vec::new();
        for f in gamma {
            validate_formula(&self.space, f)?;
            flatten_conjuncts(f, &mut pins, &mut rest);
        }
        let pins = pins
            .into_iter()
            .map(|l| (self.space.id(l.atom), l.positive))
            .collect();
        Ok(ExtensionIter::new(self, sys, pins, rest))
    }

    /// First extension if one exists (the consistency witness), else None.
    pub fn consistent(
        &self,
        gamma: &[Formula],
        sys: AxiomSystem,
    ) -> Result<Option<Extension>, CalcError> {
        Ok(self.extensions(gamma, sys)?.next())
    }

    /// Semantic derivability: `phi` follows from `gamma` iff no extension
    /// satisfies `gamma` plus the negation of `phi`. Everything follows
    /// from an inconsistent set.
    pub fn derives(
        &self,
        gamma: &[Formula],
        phi: &Formula,
        sys: AxiomSystem,
    ) -> Result<bool, CalcError> {
        validate_formula(&self.space, phi)?;
        let mut query: Vec<Formula> = gamma.to_vec();
        query.push(Formula::not(phi.clone()));
        Ok(self.extensions(&query, sys)?.next().is_none())
    }

    /// The counterexample extension behind a failed derivation: an
    /// extension satisfying `gamma` but falsifying `phi`, if any.
    pub fn counterexample(
        &self,
        gamma: &[Formula],
        phi: &Formula,
        sys: AxiomSystem,
    ) -> Result<Option<Extension>, CalcError> {
        validate_formula(&self.space, phi)?;
        let mut query: Vec<Formula> = gamma.to_vec();
        query.push(Formula::not(phi.clone()));
        self.consistent(&query, sys)
    }
}

fn validate_formula(space: &AtomSpace, f: &Formula) -> Result<(), CalcError> {
    match f {
        Formula::Atom(a) => {
            // the atom may mention variables past this signature, so the
            // message must not render it against sig
            if space.try_id(*a).is_none() {
                return Err(CalcError::SignatureMismatch(format!(
                    "formula atom over variable indices {:?} is not in the calculus language",
                    a.x().union(a.y()).union(a.z()).iter().collect::<Vec<_>>()
                )));
            }
            Ok(())
        }
        Formula::Not(g) => validate_formula(space, g),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            validate_formula(space, a)?;
            validate_formula(space, b)
        }
    }
}

/// Splits a formula into pinned literals (its top-level conjuncts that are
/// literals) and residual formulas for three-valued tracking.
fn flatten_conjuncts(f: &Formula, pins: &mut Vec<Literal>, rest: &mut Vec<Formula>) {
    if let Formula::And(a, b) = f {
        flatten_conjuncts(a, pins, rest);
        flatten_conjuncts(b, pins, rest);
        return;
    }
    match f.as_literal() {
        Some(l) => pins.push(l),
        None => rest.push(f.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{parse_formula_set_with_sig, Signature};

    fn sig(n: usize) -> Signature {
        Signature::uniform(n, &["0", "1"]).unwrap()
    }

    fn parse(calc: &Calculus, text: &str) -> Vec<Formula> {
        parse_formula_set_with_sig(text, calc.space().sig()).unwrap()
    }

    #[test]
    fn empty_set_is_consistent_with_all_true_first_witness() {
        for n in [2, 3] {
            let calc = Calculus::new(sig(n));
            for sys in [AxiomSystem::Uniq, AxiomSystem::Srec, AxiomSystem::Rec] {
                let w = calc.consistent(&[], sys).unwrap().expect("empty set is consistent");
                assert!(w.values().iter().all(|&v| v), "{sys}");
                assert_eq!(w.syntactic_graph().edge_count(), 0);
            }
        }
    }

    #[test]
    fn contradictory_pins_are_inconsistent() {
        let calc = Calculus::new(sig(2));
        let gamma = parse(&calc, "irr(X1; X2; )\n!irr(X1; X2; )");
        for sys in [AxiomSystem::Uniq, AxiomSystem::Srec, AxiomSystem::Rec] {
            assert!(calc.consistent(&gamma, sys).unwrap().is_none());
        }
    }

    #[test]
    fn two_variable_srec_stream_is_the_single_dag_extension() {
        let calc = Calculus::new(sig(2));
        let gamma = parse(&calc, "!irr(X1; X2; )");
        let exts: Vec<Extension> =
            calc.extensions(&gamma, AxiomSystem::Srec).unwrap().collect();
        assert_eq!(exts.len(), 1);
        let e = &exts[0];
        assert!(!e.value(AtomId(0)) && e.value(AtomId(1)));
        let g = e.syntactic_graph();
        assert_eq!(g.edges(), vec![(0, 1)]);
    }

    #[test]
    fn system_streams_are_nested() {
        // same pinned negative: uniq admits both assignments of the other
        // atom, rec keeps both (a two-cycle still has one-edge fragments),
        // srec drops the cyclic one
        let calc = Calculus::new(sig(2));
        let gamma = parse(&calc, "!irr(X1; X2; )");
        let count = |sys| calc.extensions(&gamma, sys).unwrap().count();
        assert_eq!(count(AxiomSystem::Uniq), 2);
        assert_eq!(count(AxiomSystem::Rec), 2);
        assert_eq!(count(AxiomSystem::Srec), 1);

        let collect = |sys| -> Vec<Vec<bool>> {
            calc.extensions(&gamma, sys)
                .unwrap()
                .map(|e| e.values().to_vec())
                .collect()
        };
        let uniq = collect(AxiomSystem::Uniq);
        for e in collect(AxiomSystem::Rec) {
            assert!(uniq.contains(&e));
        }
        for e in collect(AxiomSystem::Srec) {
            assert!(collect(AxiomSystem::Rec).contains(&e));
        }
    }

    #[test]
    fn strong_union_propagates_upward() {
        let calc = Calculus::new(sig(3));
        let gamma = parse(&calc, "irr(X1; X2; )");
        let phi = &parse(&calc, "irr(X1; X2; X3)")[0];
        assert!(calc.derives(&gamma, phi, AxiomSystem::Uniq).unwrap());
        // and falsity propagates downward by contraposition
        let gamma2 = parse(&calc, "!irr(X1; X2; X3)");
        let phi2 = &parse(&calc, "!irr(X1; X2; )")[0];
        assert!(calc.derives(&gamma2, phi2, AxiomSystem::Uniq).unwrap());
    }

    #[test]
    fn reversal_is_srec_only() {
        let calc = Calculus::new(sig(2));
        let gamma = parse(&calc, "!irr(X1; X2; )");
        let phi = &parse(&calc, "irr(X2; X1; )")[0];
        assert!(calc.derives(&gamma, phi, AxiomSystem::Srec).unwrap());
        assert!(!calc.derives(&gamma, phi, AxiomSystem::Uniq).unwrap());
        assert!(!calc.derives(&gamma, phi, AxiomSystem::Rec).unwrap());
    }

    #[test]
    fn inconsistent_sets_derive_everything() {
        let calc = Calculus::new(sig(2));
        let gamma = parse(&calc, "irr(X1; X2; )\n!irr(X1; X2; )");
        let phi = &parse(&calc, "irr(X2; X1; )")[0];
        let neg = Formula::not(phi.clone());
        for sys in [AxiomSystem::Uniq, AxiomSystem::Srec, AxiomSystem::Rec] {
            assert!(calc.derives(&gamma, phi, sys).unwrap());
            assert!(calc.derives(&gamma, &neg, sys).unwrap());
        }
    }

    #[test]
    fn member_formulas_are_derivable() {
        let calc = Calculus::new(sig(3));
        let gamma = parse(&calc, "irr(X1; X2; X3)\n!irr(X2; X3; )");
        for phi in &gamma {
            for sys in [AxiomSystem::Uniq, AxiomSystem::Srec, AxiomSystem::Rec] {
                assert!(calc.derives(&gamma, phi, sys).unwrap());
            }
        }
    }

    #[test]
    fn extended_left_intersection_is_derivable() {
        // irr(X3,X1; X2; X4) & irr(X3,X4; X2; X1) => irr(X3,X1,X4; X2; )
        // with singleton roles; follows from the intersection schema plus
        // decomposition and union steps
        let calc = Calculus::new(sig(4));
        let gamma = parse(&calc, "irr(X3,X1; X2; X4)\nirr(X3,X4; X2; X1)");
        let phi = &parse(&calc, "irr(X3,X1,X4; X2; )")[0];
        assert!(calc.derives(&gamma, phi, AxiomSystem::Uniq).unwrap());
    }

    #[test]
    fn non_literal_constraints_restrict_the_stream() {
        let calc = Calculus::new(sig(2));
        let gamma = parse(&calc, "irr(X1; X2; ) | irr(X2; X1; )");
        let uniq: Vec<_> = calc.extensions(&gamma, AxiomSystem::Uniq).unwrap().collect();
        // of the four assignments, only the all-false one is excluded
        assert_eq!(uniq.len(), 3);
        for e in &uniq {
            assert!(e.satisfies(&gamma[0]).unwrap());
        }
    }

    #[test]
    fn foreign_atoms_are_rejected() {
        let calc = Calculus::new(sig(2));
        let other = Signature::uniform(3, &["0", "1"]).unwrap();
        let foreign = parse_formula_set_with_sig("irr(X1; X3; )", &other).unwrap();
        assert!(matches!(
            calc.consistent(&foreign, AxiomSystem::Uniq),
            Err(CalcError::SignatureMismatch(_))
        ));
    }

    #[test]
    fn parent_sets_and_graph_agree() {
        let calc = Calculus::new(sig(3));
        let gamma = parse(&calc, "!irr(X1; X2; X3)\nirr(X3; X2; X1)\nirr(X3; X1; X2)\nirr(X2; X1; X3)");
        for e in calc.extensions(&gamma, AxiomSystem::Uniq).unwrap().take(50) {
            let g = e.syntactic_graph();
            let sig = e.space().sig().clone();
            for y in sig.vars() {
                let pa = e.parent_set(y);
                for x in sig.vars() {
                    if x == y {
                        continue;
                    }
                    assert_eq!(g.has_edge(x, y), pa.contains(x), "pair ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn path_witness_finds_an_unblocked_route() {
        let calc = Calculus::new(sig(2));
        let gamma = parse(&calc, "!irr(X1; X2; )");
        let e = calc.consistent(&gamma, AxiomSystem::Srec).unwrap().unwrap();
        assert_eq!(e.path_witness(0, 1, VarSet::EMPTY).unwrap(), vec![0, 1]);
        assert!(matches!(
            e.path_witness(1, 0, VarSet::EMPTY),
            Err(CalcError::InvalidExtension(_))
        ));
    }
}
