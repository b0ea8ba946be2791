//! Graph identification from irrelevance data.
//!
//! Whatever model produced a constraint set, every edge shared by the
//! graphs of all its extensions must be an edge of that model's own graph.
//! [`identified_graph`] computes this intersection by streaming the
//! extension iterator, so partial knowledge yields a sound edge subgraph.
//! On top of it, [`rank_options`] prices candidate experiments by cost per
//! newly identified edge, [`recursiveness_test`] runs the necessary (not
//! sufficient) consistency check for recursiveness, and
//! [`path_obligations`] exports the route constraints negative literals
//! impose on any compatible structure.

use num::rational::Ratio;
use thiserror::Error;

use crate::calculus::{AxiomSystem, CalcError, Calculus};
use crate::language::{render_formula, Formula, VarSet};
use crate::scm::Digraph;

/// Cap on streamed extensions used when the caller does not pick one.
pub const DEFAULT_MAX_EXTENSIONS: usize = 20_000;

/// Errors from identification and ranking.
#[derive(Debug, Error)]
pub enum IdentifyError {
    /// The base constraint set admits no extension under the system.
    #[error("the constraint set is inconsistent under {0}")]
    Inconsistent(AxiomSystem),
    /// An option's constraint set admits no extension under the system.
    #[error("option {index} is inconsistent under {sys}")]
    OptionInconsistent { index: usize, sys: AxiomSystem },
    /// An option does not contain the base constraint set.
    #[error("option {index} does not contain the base constraint `{missing}`")]
    NotSuperset { index: usize, missing: String },
    /// Enumeration hit the extension budget before finishing. The result
    /// would be unsound if truncated, so the operation aborts instead.
    #[error("extension budget of {budget} exceeded; raise --max-extensions to proceed")]
    BudgetExceeded { budget: usize },
    #[error(transparent)]
    Calc(#[from] CalcError),
}

/// Intersects the syntactic graphs of every extension of `gamma`.
///
/// The result is an edge subgraph of the graph of any model in the class
/// that satisfies `gamma`: an edge survives only when every extension
/// agrees on it. Enumeration stops early once the intersection is empty
/// (it can only shrink), and aborts with
/// [`IdentifyError::BudgetExceeded`] rather than returning a partial
/// intersection when more than `max_extensions` extensions exist.
pub fn identified_graph(
    calc: &Calculus,
    gamma: &[Formula],
    sys: AxiomSystem,
    max_extensions: usize,
) -> Result<Digraph, IdentifyError> {
    let mut stream = calc.extensions(gamma, sys)?;
    let Some(first) = stream.next() else {
        return Err(IdentifyError::Inconsistent(sys));
    };
    let mut acc = first.syntactic_graph();
    let mut seen = 1usize;
    for e in stream {
        if acc.edge_count() == 0 {
            break;
        }
        seen += 1;
        if seen > max_extensions {
            return Err(IdentifyError::BudgetExceeded { budget: max_extensions });
        }
        acc = acc.intersect(&e.syntactic_graph());
    }
    Ok(acc)
}

/// An information option: a purchasable constraint set extending the base
/// one, with its price.
#[derive(Debug, Clone)]
pub struct InfoOption {
    /// The full constraint set the option would establish; must contain
    /// every base formula.
    pub formulas: Vec<Formula>,
    /// Non-negative price of acquiring the option.
    pub cost: Ratio<i64>,
}

/// Price per newly identified edge; infinite when nothing new is learned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PonderedCost {
    Finite(Ratio<i64>),
    Infinite,
}

impl std::fmt::Display for PonderedCost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PonderedCost::Finite(r) => write!(f, "{r}"),
            PonderedCost::Infinite => write!(f, "inf"),
        }
    }
}

/// Ranks information options by cost per newly identified edge.
///
/// For each option the pondered cost is its price divided by the number
/// of edges its identified graph adds over the base one; an option that
/// adds nothing costs infinity. Returns `(option index, pondered cost)`
/// sorted ascending, ties kept in input order.
pub fn rank_options(
    calc: &Calculus,
    gamma: &[Formula],
    opts: &[InfoOption],
    sys: AxiomSystem,
    max_extensions: usize,
) -> Result<Vec<(usize, PonderedCost)>, IdentifyError> {
    let sig = calc.space().sig();
    let base = identified_graph(calc, gamma, sys, max_extensions)?;
    let mut ranked: Vec<(usize, PonderedCost)> = Vec::with_capacity(opts.len());
    for (index, opt) in opts.iter().enumerate() {
        let have: Vec<String> =
            opt.formulas.iter().map(|f| render_formula(f, sig)).collect();
        if let Some(missing) =
            gamma.iter().map(|f| render_formula(f, sig)).find(|s| !have.contains(s))
        {
            return Err(IdentifyError::NotSuperset { index, missing });
        }
        let gi = identified_graph(calc, &opt.formulas, sys, max_extensions).map_err(|e| {
            match e {
                IdentifyError::Inconsistent(sys) => {
                    IdentifyError::OptionInconsistent { index, sys }
                }
                other => other,
            }
        })?;
        let new_edges =
            gi.edges().iter().filter(|&&(a, b)| !base.has_edge(a, b)).count();
        let cost = if new_edges == 0 {
            PonderedCost::Infinite
        } else {
            PonderedCost::Finite(opt.cost / Ratio::from_integer(new_edges as i64))
        };
        ranked.push((index, cost));
    }
    ranked.sort_by_key(|&(_, c)| c);
    Ok(ranked)
}

/// Verdict of the necessary recursiveness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecVerdict {
    /// Consistent with the general recursive system; recursiveness is not
    /// ruled out (the test is necessary, not sufficient).
    PossiblyRecursive,
    /// Inconsistent, so no recursive model satisfies the set.
    NonRecursive,
}

impl std::fmt::Display for RecVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RecVerdict::PossiblyRecursive => write!(f, "possibly-recursive"),
            RecVerdict::NonRecursive => write!(f, "non-recursive"),
        }
    }
}

/// Necessary test for recursiveness: a set no recursive model can satisfy
/// is exactly one that is inconsistent under the general recursive system.
pub fn recursiveness_test(calc: &Calculus, gamma: &[Formula]) -> Result<RecVerdict, CalcError> {
    Ok(if calc.consistent(gamma, AxiomSystem::Rec)?.is_some() {
        RecVerdict::PossiblyRecursive
    } else {
        RecVerdict::NonRecursive
    })
}

/// A route constraint extracted from one negative literal: any compatible
/// structure needs a directed path from some source to some target that
/// dodges every vertex of `avoid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathObligation {
    pub sources: VarSet,
    pub targets: VarSet,
    pub avoid: VarSet,
}

/// Extracts the route obligations of `gamma`'s negative literal members,
/// in input order. Useful for pruning an external structure search.
pub fn path_obligations(gamma: &[Formula]) -> Vec<PathObligation> {
    gamma
        .iter()
        .filter_map(Formula::as_literal)
        .filter(|l| !l.positive)
        .map(|l| PathObligation {
            sources: l.atom.x(),
            targets: l.atom.y(),
            avoid: l.atom.z(),
        })
        .collect()
}
