//! Schema instantiation: turning the eight relevance axiom schemas into
//! ground implications over a concrete signature.
//!
//! Each schema is written over role letters (X, Y, Z, W, ...) standing for
//! pairwise disjoint sets of variables. Instantiation assigns every
//! signature variable to one role or to none, keeps the assignments where
//! all roles marked required are non-empty (required means the schema is
//! vacuous or malformed without it), builds the antecedent and consequent
//! atoms, and deduplicates the resulting clauses.
//!
//! A few roles are pinned to single variables rather than sets: the roles
//! that a schema moves between the target side and the condition side. An
//! atom over a set only speaks about responses with the whole set free or
//! the whole set held, so a conclusion whose condition set drops such a
//! role must survive holding the role partially fixed, and with two or
//! more variables in the role that fails on real models (see the
//! regression test at the bottom). Single-variable roles close the gap:
//! a partial hold is then empty or the whole role.

use std::collections::HashSet;

use crate::language::{Atom, Signature, VarSet};

/// The eight ground schemas. Propositional reasoning itself plays the role
/// of the tautology axiom and modus ponens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomId {
    /// (X,Y|Z) => (X,Y|ZW): irrelevance survives enlarging the pinned set.
    StrongUnion,
    /// (XW,Y|Z) => (X,Y|Z): irrelevance of a union covers each part.
    LeftDecomposition,
    /// (X,Yw|Z) & (X,Y|Zw) => (X,Y|Z), for a single variable w.
    WeakRightDecomposition,
    /// (X,YW|Z) & (W,Y|ZX) => (X,Y|ZW).
    WeakTransitivity,
    /// (X,Y|ZW) & (W,Y|ZX) => (XW,Y|Z).
    LeftIntersection,
    /// (X,Y|ZW) & (X,W|ZY) => (X,YW|Z).
    RightIntersection,
    /// (X,Y|Zv) & (X,Y|Zu) & (u,v|ZXW) & (v,u|ZXW) => (X,Y|ZW), for
    /// single variables u, v.
    Linearity,
    /// (X,Yw|Z) & (X,V|ZYw) & (w,Y|ZX) => (X,YV|Z), for a single
    /// variable w.
    ContextSubstitution,
}

impl AxiomId {
    pub const ALL: [AxiomId; 8] = [
        AxiomId::StrongUnion,
        AxiomId::LeftDecomposition,
        AxiomId::WeakRightDecomposition,
        AxiomId::WeakTransitivity,
        AxiomId::LeftIntersection,
        AxiomId::RightIntersection,
        AxiomId::Linearity,
        AxiomId::ContextSubstitution,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            AxiomId::StrongUnion => "strong-union",
            AxiomId::LeftDecomposition => "left-decomposition",
            AxiomId::WeakRightDecomposition => "weak-right-decomposition",
            AxiomId::WeakTransitivity => "weak-transitivity",
            AxiomId::LeftIntersection => "left-intersection",
            AxiomId::RightIntersection => "right-intersection",
            AxiomId::Linearity => "linearity",
            AxiomId::ContextSubstitution => "context-substitution",
        }
    }
}

/// One ground implication `ant_1 & ... & ant_k => cons`, equivalently the
/// clause `!ant_1 | ... | !ant_k | cons`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AxiomInstance {
    pub axiom: AxiomId,
    pub antecedents: Vec<Atom>,
    pub consequent: Atom,
}

/// Role indices within a template. Every template names a subset of these.
/// X, Y, Z are roles 0..3 in every schema; the rest vary.
type RoleAtom = (&'static [usize], &'static [usize], &'static [usize]);

struct Template {
    id: AxiomId,
    /// number of roles (variables may also stay unassigned)
    roles: usize,
    /// roles that must receive at least one variable
    required: &'static [usize],
    /// roles that must receive exactly one variable (see module docs)
    singleton: &'static [usize],
    antecedents: &'static [RoleAtom],
    consequent: RoleAtom,
}

// Role numbering: X=0, Y=1, Z=2, W=3, then U=4, V=5 (Linearity) or
// V=4 (ContextSubstitution).
const TEMPLATES: &[Template] = &[
    Template {
        id: AxiomId::StrongUnion,
        roles: 4,
        required: &[0, 1, 3],
        singleton: &[],
        antecedents: &[(&[0], &[1], &[2])],
        consequent: (&[0], &[1], &[2, 3]),
    },
    Template {
        id: AxiomId::LeftDecomposition,
        roles: 4,
        required: &[0, 1, 3],
        singleton: &[],
        antecedents: &[(&[0, 3], &[1], &[2])],
        consequent: (&[0], &[1], &[2]),
    },
    Template {
        // W moves from the target side to nowhere: the conclusion must
        // survive partial holds of W, so W stays a single variable.
        id: AxiomId::WeakRightDecomposition,
        roles: 4,
        required: &[0, 1, 3],
        singleton: &[3],
        antecedents: &[(&[0], &[1, 3], &[2]), (&[0], &[1], &[2, 3])],
        consequent: (&[0], &[1], &[2]),
    },
    Template {
        id: AxiomId::WeakTransitivity,
        roles: 4,
        required: &[0, 1, 3],
        singleton: &[],
        antecedents: &[(&[0], &[1, 3], &[2]), (&[3], &[1], &[2, 0])],
        consequent: (&[0], &[1], &[2, 3]),
    },
    Template {
        id: AxiomId::LeftIntersection,
        roles: 4,
        required: &[0, 1, 3],
        singleton: &[],
        antecedents: &[(&[0], &[1], &[2, 3]), (&[3], &[1], &[2, 0])],
        consequent: (&[0, 3], &[1], &[2]),
    },
    Template {
        id: AxiomId::RightIntersection,
        roles: 4,
        required: &[0, 1, 3],
        singleton: &[],
        antecedents: &[(&[0], &[1], &[2, 3]), (&[0], &[3], &[2, 1])],
        consequent: (&[0], &[1, 3], &[2]),
    },
    Template {
        // U and V drop out of the conclusion's condition side entirely,
        // so both stay single variables.
        id: AxiomId::Linearity,
        roles: 6,
        // W may stay empty: the implication is non-trivial without it and
        // every embedded atom stays well formed
        required: &[0, 1, 4, 5],
        singleton: &[4, 5],
        antecedents: &[
            (&[0], &[1], &[2, 5]),
            (&[0], &[1], &[2, 4]),
            (&[4], &[5], &[2, 0, 3]),
            (&[5], &[4], &[2, 0, 3]),
        ],
        consequent: (&[0], &[1], &[2, 3]),
    },
    Template {
        // W is conditioned in one antecedent but absent from the
        // conclusion's condition side: single variable.
        id: AxiomId::ContextSubstitution,
        roles: 5,
        required: &[0, 1, 3, 4],
        singleton: &[3],
        antecedents: &[
            (&[0], &[1, 3], &[2]),
            (&[0], &[4], &[2, 1, 3]),
            (&[3], &[1], &[2, 0]),
        ],
        consequent: (&[0], &[1, 4], &[2]),
    },
];

fn role_union(sets: &[VarSet], roles: &[usize]) -> VarSet {
    roles.iter().fold(VarSet::EMPTY, |acc, &r| acc.union(sets[r]))
}

fn build_atom(sets: &[VarSet], spec: RoleAtom) -> Atom {
    // roles are disjoint and every x/y side contains a required role, so
    // the atom is always well formed
    Atom::new(role_union(sets, spec.0), role_union(sets, spec.1), role_union(sets, spec.2))
        .expect("template atoms are well formed by construction")
}

/// Every ground instance of every schema over the signature, deduplicated
/// (antecedent order is irrelevant) and sorted canonically: by axiom, then
/// consequent, then antecedent list.
pub fn instantiate_axioms(sig: &Signature) -> Vec<AxiomInstance> {
    let n = sig.len();
    let mut out = Vec::new();
    let mut seen: HashSet<(AxiomId, Vec<Atom>, Atom)> = HashSet::new();

    for t in TEMPLATES {
        // assign each variable a role in 0..t.roles, or t.roles for none
        let mut sets = vec![VarSet::EMPTY; t.roles];
        enumerate_assignments(n, t.roles, 0, &mut sets, &mut |sets| {
            if t.required.iter().any(|&r| sets[r].is_empty()) {
                return;
            }
            if t.singleton.iter().any(|&r| sets[r].len() != 1) {
                return;
            }
            let mut ants: Vec<Atom> =
                t.antecedents.iter().map(|&a| build_atom(sets, a)).collect();
            ants.sort_unstable();
            ants.dedup();
            let cons = build_atom(sets, t.consequent);
            if seen.insert((t.id, ants.clone(), cons)) {
                out.push(AxiomInstance { axiom: t.id, antecedents: ants, consequent: cons });
            }
        });
    }

    out.sort_unstable_by(|a, b| {
        (a.axiom, a.consequent, &a.antecedents).cmp(&(b.axiom, b.consequent, &b.antecedents))
    });
    out
}

fn enumerate_assignments(
    n: usize,
    roles: usize,
    var: usize,
    sets: &mut Vec<VarSet>,
    f: &mut impl FnMut(&[VarSet]),
) {
    if var == n {
        f(sets);
        return;
    }
    for role in 0..=roles {
        if role < roles {
            sets[role].insert(var);
        }
        enumerate_assignments(n, roles, var + 1, sets, f);
        if role < roles {
            sets[role] = sets[role].minus(VarSet::singleton(var));
        }
    }
}
