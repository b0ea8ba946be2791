//! Deductive engine for a calculus of causal relevance over functional
//! causal models.
//!
//! The crate is organized around three layers:
//!
//! * [`language`] defines the object language: finite variable signatures,
//!   irrelevance atoms `(X  ̸⇝ Y | Z)` written `irr(xs; ys; zs)`, and boolean
//!   formulas over them, with a parser and canonical printer.
//! * [`scm`] and [`semantics`] give the model side: functional causal models
//!   with explicit contexts, interventions, potential responses, and the
//!   brute-force satisfaction sweep that decides an atom against a model.
//! * [`calculus`], [`fragments`], and [`identify`] give the proof side:
//!   axiom-schema instantiation over a finite signature, extension
//!   enumeration for the three axiom systems (plain, strong-recursive,
//!   recursive), witness-model construction, and graph identification from
//!   partial relevance knowledge.
//!
//! [`generate`] holds the seeded random-model generators used by the CLI
//! and the test suite.

pub mod calculus;
pub mod fragments;
pub mod generate;
pub mod identify;
pub mod language;
pub mod scm;
pub mod semantics;

pub use calculus::{AxiomSystem, Calculus, Extension};
pub use language::{Atom, Formula, Signature, VarId, VarSet};
pub use scm::{CausalModel, Digraph, ModelClass};
