//! The relevance language: signatures, atoms `irr(xs; ys; zs)`, and boolean
//! formulas over them.
//!
//! Everything downstream (models, axiom instantiation, solvers) works with
//! the dense atom index assigned by [`AtomSpace`], so the enumeration order
//! of [`enumerate_atoms`] is part of the crate's observable behavior and is
//! kept stable: ascending `x` mask, then ascending `y` mask, then ascending
//! `z` mask.

mod parser;

pub use parser::{parse_formula, parse_formula_set, parse_formula_set_with_sig, ParsedFormulaSet};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Hard limit imposed by the `u32` bitmask representation of [`VarSet`].
pub const MAX_VARS_HARD: usize = 16;

/// Default soft cap on signature size; the atom space and the axiom
/// instance lists grow roughly like `4^n`, so larger signatures must be
/// requested explicitly via [`Signature::with_max_vars`].
pub const MAX_VARS_DEFAULT: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LanguageError {
    #[error("syntax error at byte {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("malformed atom: {0}")]
    MalformedAtom(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
}

/// Index of a variable within its [`Signature`].
pub type VarId = usize;

/// A set of signature variables, represented as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VarSet(pub u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn singleton(v: VarId) -> VarSet {
        VarSet(1 << v)
    }

    pub fn from_iter<I: IntoIterator<Item = VarId>>(iter: I) -> VarSet {
        let mut s = VarSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }

    pub fn contains(self, v: VarId) -> bool {
        self.0 & (1 << v) != 0
    }

    pub fn insert(&mut self, v: VarId) {
        self.0 |= 1 << v;
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn inter(self, other: VarSet) -> VarSet {
        VarSet(self.0 & other.0)
    }

    pub fn minus(self, other: VarSet) -> VarSet {
        VarSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: VarSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in ascending (signature) order.
    pub fn iter(self) -> impl Iterator<Item = VarId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as VarId;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    /// All subsets of `self`, ascending by mask value; starts with the empty
    /// set and ends with `self`.
    pub fn subsets(self) -> impl Iterator<Item = VarSet> {
        let mask = self.0;
        let mut next: Option<u32> = Some(0);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask { None } else { Some((cur.wrapping_sub(mask)) & mask) };
            Some(VarSet(cur))
        })
    }
}

/// A finite ordered list of named variables, each with a finite non-empty
/// domain of value strings. Variable order is the order of declaration and
/// determines bitmask positions, printing order, and atom enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    names: Vec<String>,
    domains: Vec<Vec<String>>,
    index: HashMap<String, VarId>,
}

impl Signature {
    /// Builds a signature under the default size cap of [`MAX_VARS_DEFAULT`].
    pub fn new(vars: Vec<(String, Vec<String>)>) -> Result<Signature, LanguageError> {
        Signature::with_max_vars(vars, MAX_VARS_DEFAULT)
    }

    /// Builds a signature with an explicit size cap (at most
    /// [`MAX_VARS_HARD`]).
    pub fn with_max_vars(
        vars: Vec<(String, Vec<String>)>,
        max_vars: usize,
    ) -> Result<Signature, LanguageError> {
        let cap = max_vars.min(MAX_VARS_HARD);
        if vars.len() > cap {
            return Err(LanguageError::InvalidSignature(format!(
                "{} variables exceeds the cap of {}",
                vars.len(),
                cap
            )));
        }
        let mut names = Vec::with_capacity(vars.len());
        let mut domains = Vec::with_capacity(vars.len());
        let mut index = HashMap::new();
        for (name, domain) in vars {
            if name.is_empty() {
                return Err(LanguageError::InvalidSignature("empty variable name".into()));
            }
            if domain.is_empty() {
                return Err(LanguageError::InvalidSignature(format!(
                    "variable `{name}` has an empty domain"
                )));
            }
            let mut seen = domain.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != domain.len() {
                return Err(LanguageError::InvalidSignature(format!(
                    "variable `{name}` has duplicate domain values"
                )));
            }
            if domain.len() > u8::MAX as usize {
                return Err(LanguageError::InvalidSignature(format!(
                    "variable `{name}` has more than {} domain values",
                    u8::MAX
                )));
            }
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(LanguageError::InvalidSignature(format!(
                    "duplicate variable name `{name}`"
                )));
            }
            names.push(name);
            domains.push(domain);
        }
        Ok(Signature { names, domains, index })
    }

    /// Convenience constructor: variables named `X1..Xn`, all sharing the
    /// given domain.
    pub fn uniform(n: usize, domain: &[&str]) -> Result<Signature, LanguageError> {
        Signature::new(
            (1..=n)
                .map(|i| (format!("X{i}"), domain.iter().map(|s| s.to_string()).collect()))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v]
    }

    pub fn domain(&self, v: VarId) -> &[String] {
        &self.domains[v]
    }

    pub fn domain_value(&self, v: VarId, idx: u8) -> &str {
        &self.domains[v][idx as usize]
    }

    pub fn value_index(&self, v: VarId, value: &str) -> Option<u8> {
        self.domains[v].iter().position(|s| s == value).map(|i| i as u8)
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        0..self.names.len()
    }

    pub fn full_set(&self) -> VarSet {
        if self.names.is_empty() {
            VarSet::EMPTY
        } else {
            VarSet((1u32 << self.names.len()) - 1)
        }
    }

    /// Renders a variable set in canonical form: members in signature
    /// order, comma-separated, no spaces.
    pub fn render_set(&self, s: VarSet) -> String {
        s.iter().map(|v| self.name(v)).collect::<Vec<_>>().join(",")
    }

    /// True when the two signatures declare the same variables with the
    /// same domains (contexts are a model property, not a signature one).
    pub fn same_as(&self, other: &Signature) -> bool {
        self.names == other.names && self.domains == other.domains
    }
}

/// An irrelevance atom `(x  ̸⇝ y | z)`: the claim that intervening on `x`
/// cannot affect the joint response of `y` once `z` is held fixed, under
/// any context-setting side intervention.
///
/// Invariants: `x`, `y`, `z` pairwise disjoint; `x` and `y` non-empty.
/// Construction through [`Atom::new`] enforces them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    x: VarSet,
    y: VarSet,
    z: VarSet,
}

impl Atom {
    pub fn new(x: VarSet, y: VarSet, z: VarSet) -> Result<Atom, LanguageError> {
        if x.is_empty() || y.is_empty() {
            return Err(LanguageError::MalformedAtom(
                "the first two components must be non-empty".into(),
            ));
        }
        if !x.is_disjoint(y) || !x.is_disjoint(z) || !y.is_disjoint(z) {
            return Err(LanguageError::MalformedAtom(
                "the three components must be pairwise disjoint".into(),
            ));
        }
        Ok(Atom { x, y, z })
    }

    pub fn x(&self) -> VarSet {
        self.x
    }

    pub fn y(&self) -> VarSet {
        self.y
    }

    pub fn z(&self) -> VarSet {
        self.z
    }

    /// Variables mentioned by the atom.
    pub fn support(&self) -> VarSet {
        self.x.union(self.y).union(self.z)
    }

    pub fn render(&self, sig: &Signature) -> String {
        format!(
            "irr({}; {}; {})",
            sig.render_set(self.x),
            sig.render_set(self.y),
            sig.render_set(self.z)
        )
    }
}

/// A signed atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn negated(self) -> Literal {
        Literal { atom: self.atom, positive: !self.positive }
    }

    pub fn to_formula(self) -> Formula {
        let f = Formula::Atom(self.atom);
        if self.positive {
            f
        } else {
            Formula::Not(Box::new(f))
        }
    }

    pub fn render(&self, sig: &Signature) -> String {
        if self.positive {
            self.atom.render(sig)
        } else {
            format!("!{}", self.atom.render(sig))
        }
    }
}

/// A boolean formula over atoms. `=>` is material implication.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// The literal this formula is, if it is one (an atom or a negated atom).
    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            Formula::Atom(a) => Some(Literal { atom: *a, positive: true }),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => Some(Literal { atom: *a, positive: false }),
                _ => None,
            },
            _ => None,
        }
    }

    /// Union of the variable supports of all atoms in the formula.
    pub fn support(&self) -> VarSet {
        match self {
            Formula::Atom(a) => a.support(),
            Formula::Not(f) => f.support(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.support().union(b.support())
            }
        }
    }

    /// Evaluates under a total truth assignment of atoms.
    pub fn eval(&self, mut truth: impl FnMut(Atom) -> bool) -> bool {
        fn go(f: &Formula, truth: &mut dyn FnMut(Atom) -> bool) -> bool {
            match f {
                Formula::Atom(a) => truth(*a),
                Formula::Not(g) => !go(g, truth),
                Formula::And(a, b) => go(a, truth) && go(b, truth),
                Formula::Or(a, b) => go(a, truth) || go(b, truth),
                Formula::Implies(a, b) => !go(a, truth) || go(b, truth),
            }
        }
        go(self, &mut truth)
    }
}

/// Canonical printer. Atoms render as `irr(xs; ys; zs)` with each set in
/// signature order; binary connectives are fully parenthesized, so
/// `parse_formula(render_formula(f)) == f` regardless of precedence.
pub fn render_formula(f: &Formula, sig: &Signature) -> String {
    match f {
        Formula::Atom(a) => a.render(sig),
        Formula::Not(g) => format!("!{}", render_formula(g, sig)),
        Formula::And(a, b) => {
            format!("({} & {})", render_formula(a, sig), render_formula(b, sig))
        }
        Formula::Or(a, b) => {
            format!("({} | {})", render_formula(a, sig), render_formula(b, sig))
        }
        Formula::Implies(a, b) => {
            format!("({} => {})", render_formula(a, sig), render_formula(b, sig))
        }
    }
}

/// Enumerates every valid atom over the signature in the canonical order:
/// ascending `x` mask, then ascending `y` mask over the complement, then
/// ascending `z` mask over what remains.
///
/// The count is `4^n - 2*3^n + 2^n`: each variable picks one of the four
/// roles x/y/z/none, minus the maps with empty x or empty y.
pub fn enumerate_atoms(sig: &Signature) -> Vec<Atom> {
    let full = sig.full_set();
    let mut out = Vec::new();
    for x in full.subsets() {
        if x.is_empty() {
            continue;
        }
        for y in full.minus(x).subsets() {
            if y.is_empty() {
                continue;
            }
            for z in full.minus(x).minus(y).subsets() {
                out.push(Atom { x, y, z });
            }
        }
    }
    out
}

/// Dense index of an atom within an [`AtomSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// The full atom space of a signature, with a dense id per atom.
#[derive(Debug, Clone)]
pub struct AtomSpace {
    sig: Signature,
    atoms: Vec<Atom>,
    index: HashMap<Atom, AtomId>,
}

impl AtomSpace {
    pub fn new(sig: Signature) -> AtomSpace {
        let atoms = enumerate_atoms(&sig);
        let index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (*a, AtomId(i as u32)))
            .collect();
        AtomSpace { sig, atoms, index }
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, id: AtomId) -> Atom {
        self.atoms[id.idx()]
    }

    /// Id of an atom; all valid atoms over the signature are present.
    pub fn id(&self, a: Atom) -> AtomId {
        self.index[&a]
    }

    pub fn try_id(&self, a: Atom) -> Option<AtomId> {
        self.index.get(&a).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = AtomId> {
        (0..self.atoms.len() as u32).map(AtomId)
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}
