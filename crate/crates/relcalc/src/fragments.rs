//! Graph certificates for irrelevance extensions.
//!
//! An extension fixes a verdict for every atom; this module builds the
//! structures that realize those verdicts inside actual models. A
//! [`Fragment`] is a small single-connected DAG certifying one false atom
//! `irr(x; y; zs)`: it wires a directed route from `x` to `y` clear of `zs`
//! while keeping every true verdict of the extension separated. Each
//! fragment compiles to a max-propagation model ([`fragment_model`]), and
//! [`extension_witness`] direct-sums one summand per negative verdict,
//! each checked against the extension's own verdicts and widened to a
//! denser subgraph of the extension's graph when no single-connected
//! shape fits.
//!
//! Not every extension is the theory of a model: the deductive clauses are
//! necessary conditions, not sufficient ones. [`witness_model`] therefore
//! walks the extension stream of its constraint set, builds a candidate for
//! each, and keeps the first whose computed theory satisfies the
//! constraints. For the general recursive system, where the extension's
//! own graph can be cyclic, each negative literal is first re-embedded in
//! an acyclic-graph maximal set (a [`Foliation`]) and the sum ranges over
//! witnesses of those instead.

use thiserror::Error;

use crate::calculus::{AxiomSystem, CalcError, Calculus, Extension};
use crate::language::{parse_formula, Atom, AtomId, Formula, Literal, Signature, VarId, VarSet};
use crate::scm::{direct_sum, CausalModel, Digraph, Rule, RuleTable, ScmError};
use crate::semantics::{theory_literals, LiteralTheory};

/// Errors from fragment search and witness construction.
#[derive(Debug, Error)]
pub enum FragmentError {
    /// The constraint set admits no extension under the requested system.
    #[error("the constraint set is inconsistent under {0}")]
    Inconsistent(AxiomSystem),
    /// The designated literal of a foliation is unusable.
    #[error("bad designated literal: {0}")]
    BadLiteral(String),
    /// Witness construction is only defined for the two recursive systems.
    #[error("witness construction needs the srec or rec system, not {0}")]
    UnsupportedSystem(AxiomSystem),
    /// No graph certifies the given anchor within its extension.
    #[error("no fragment certifies {0}")]
    NoFragment(String),
    /// Every extension of the constraint set resisted construction.
    #[error("no extension of the constraint set could be realized as a model")]
    Unrealizable,
    /// A fragment file could not be parsed.
    #[error("malformed fragment text: {0}")]
    Parse(String),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Scm(#[from] ScmError),
}

/// A single-connected DAG certifying one atom of an extension.
///
/// The anchor `irr(x; y; zs)` names the atom being certified. For a false
/// anchor the graph carries a directed route from `x` to `y` that dodges
/// `zs`, stored in `path`; for a true anchor the empty graph is the
/// certificate and `path` is empty.
#[derive(Debug, Clone)]
pub struct Fragment {
    sig: Signature,
    graph: Digraph,
    x: VarId,
    y: VarId,
    z: VarSet,
    path: Vec<VarId>,
}

impl Fragment {
    /// Wraps a graph as a certificate candidate for `irr(x; y; z)`.
    ///
    /// The stored path is the lexicographically first directed path from
    /// `x` to `y`, empty when the graph has none. No conditions are checked
    /// here; see [`is_fragment`].
    pub fn new(sig: Signature, graph: Digraph, x: VarId, y: VarId, z: VarSet) -> Fragment {
        assert_eq!(graph.n(), sig.len(), "graph and signature sizes differ");
        let path = graph.simple_paths(x, y).into_iter().next().unwrap_or_default();
        Fragment { sig, graph, x, y, z, path }
    }

    /// The empty fragment: certificate for a true anchor.
    pub fn empty(sig: Signature, x: VarId, y: VarId, z: VarSet) -> Fragment {
        let n = sig.len();
        Fragment { sig, graph: Digraph::new(n), x, y, z, path: Vec::new() }
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    /// Anchor triple `(x, y, zs)`.
    pub fn anchor(&self) -> (VarId, VarId, VarSet) {
        (self.x, self.y, self.z)
    }

    /// The anchor written as an atom.
    pub fn anchor_atom(&self) -> Atom {
        Atom::new(VarSet::singleton(self.x), VarSet::singleton(self.y), self.z)
            .expect("anchor fields form a valid atom")
    }

    /// Certifying route from `x` to `y`; empty for the empty fragment.
    pub fn path(&self) -> &[VarId] {
        &self.path
    }

    /// Renders as an `anchor:` line followed by sorted `A -> B` edge lines.
    pub fn render(&self) -> String {
        let mut out = format!("anchor: {}", self.anchor_atom().render(&self.sig));
        let edges = self.graph.render_edges(&self.sig);
        if !edges.is_empty() {
            out.push('\n');
            out.push_str(&edges);
        }
        out.push('\n');
        out
    }

    /// Parses the [`Fragment::render`] format: one `anchor: irr(x; y; zs)`
    /// line plus zero or more `A -> B` edge lines; `#` starts a comment.
    pub fn parse(text: &str, sig: &Signature) -> Result<Fragment, FragmentError> {
        let mut anchor: Option<Atom> = None;
        let mut graph = Digraph::new(sig.len());
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("anchor:") {
                if anchor.is_some() {
                    return Err(FragmentError::Parse("more than one anchor line".into()));
                }
                let f = parse_formula(rest, sig)
                    .map_err(|e| FragmentError::Parse(e.to_string()))?;
                match f.as_literal() {
                    Some(l) if l.positive && l.atom.x().len() == 1 && l.atom.y().len() == 1 => {
                        anchor = Some(l.atom);
                    }
                    _ => {
                        return Err(FragmentError::Parse(
                            "anchor must be a plain atom with one source and one target".into(),
                        ))
                    }
                }
            } else if let Some((from, to)) = line.split_once("->") {
                let from = lookup_var(sig, from)?;
                let to = lookup_var(sig, to)?;
                if from == to {
                    return Err(FragmentError::Parse(format!(
                        "self loop on {}",
                        sig.name(from)
                    )));
                }
                graph.add_edge(from, to);
            } else {
                return Err(FragmentError::Parse(format!("unrecognized line `{line}`")));
            }
        }
        let a = anchor.ok_or_else(|| FragmentError::Parse("missing anchor line".into()))?;
        let x = a.x().iter().next().expect("anchor source is non-empty");
        let y = a.y().iter().next().expect("anchor target is non-empty");
        Ok(Fragment::new(sig.clone(), graph, x, y, a.z()))
    }
}

fn lookup_var(sig: &Signature, name: &str) -> Result<VarId, FragmentError> {
    let name = name.trim();
    sig.var_id(name)
        .ok_or_else(|| FragmentError::Parse(format!("unknown variable `{name}`")))
}

/// Extension-derived verdict tables shared by every candidate check.
struct Tables {
    n: usize,
    /// Per ordered pair `(u, v)`: condition sets `T` with `irr(u; v; T)` true.
    pos: Vec<Vec<VarSet>>,
    /// Per ordered pair `(u, v)`: `(T, minimal paddings)` where each minimal
    /// padding `S` has `irr(u; {v} + S; T)` true and no smaller padding does.
    padded: Vec<Vec<(VarSet, Vec<VarSet>)>>,
}

impl Tables {
    fn build(e: &Extension) -> Tables {
        let space = e.space();
        let sig = space.sig();
        let n = sig.len();
        let full = sig.full_set();
        let mut pos = vec![Vec::new(); n * n];
        let mut padded = vec![Vec::new(); n * n];
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let su = VarSet::singleton(u);
                let sv = VarSet::singleton(v);
                let rest = full.minus(su).minus(sv);
                for t in rest.subsets() {
                    let base = Atom::new(su, sv, t).expect("disjoint by construction");
                    if e.value(space.id(base)) {
                        pos[u * n + v].push(t);
                    }
                    let mut hits: Vec<VarSet> = Vec::new();
                    for s in rest.minus(t).subsets() {
                        let a = Atom::new(su, sv.union(s), t).expect("disjoint by construction");
                        if e.value(space.id(a)) {
                            hits.push(s);
                        }
                    }
                    let mins: Vec<VarSet> = hits
                        .iter()
                        .copied()
                        .filter(|s| !hits.iter().any(|o| *o != *s && o.is_subset(*s)))
                        .collect();
                    if !mins.is_empty() {
                        padded[u * n + v].push((t, mins));
                    }
                }
            }
        }
        Tables { n, pos, padded }
    }

    fn pos(&self, u: VarId, v: VarId) -> &[VarSet] {
        &self.pos[u * self.n + v]
    }

    fn padded(&self, u: VarId, v: VarId) -> &[(VarSet, Vec<VarSet>)] {
        &self.padded[u * self.n + v]
    }
}

/// The definition check behind [`is_fragment`], with the verdict tables
/// precomputed so a search can reuse them across candidates.
fn fragment_ok(g: &Digraph, e: &Extension, tables: &Tables, x: VarId, y: VarId, z: VarSet) -> bool {
    if !g.is_dag() || !g.undirected_is_forest() {
        return false;
    }
    let n = g.n();
    // In a single-connected graph each ordered pair has at most one
    // directed route; record its vertex set.
    let mut route = vec![None; n * n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                route[u * n + v] =
                    g.simple_paths(u, v).into_iter().next().map(VarSet::from_iter);
            }
        }
    }
    let anchor_route = route[x * n + y];
    // A false anchor needs a connecting route that dodges the condition set.
    let space = e.space();
    let anchor =
        Atom::new(VarSet::singleton(x), VarSet::singleton(y), z).expect("anchor must be valid");
    if !e.value(space.id(anchor)) {
        match anchor_route {
            Some(p) if p.inter(z).is_empty() => {}
            _ => return false,
        }
    }
    // Every wired vertex lies on the anchor route or is a root.
    let on_route = anchor_route.unwrap_or(VarSet::EMPTY);
    for v in g.non_isolated().iter() {
        if !on_route.contains(v) && !g.sources(v).is_empty() {
            return false;
        }
    }
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let Some(p) = route[u * n + v] else { continue };
            // A true verdict must intercept every route it conditions away.
            for &t in tables.pos(u, v) {
                if t.inter(p).is_empty() {
                    return false;
                }
            }
            // A minimally padded true verdict that fails to intercept must
            // owe its truth to the padding: some padding member has to be
            // an ancestor of the target from off the route.
            let anc = g.ancestors(v);
            for (t, mins) in tables.padded(u, v) {
                if !t.inter(p).is_empty() {
                    continue;
                }
                for s in mins {
                    if !s.iter().any(|w| anc.contains(w) && !p.contains(w)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Tests whether `g` certifies the anchor `irr(x; y; z)` within `e`.
///
/// This is the literal definition: `g` must be acyclic both directed and
/// undirected; a false anchor needs a route from `x` to `y` avoiding `z`;
/// wired vertices sit on that route or are roots; every true verdict of
/// `e` either intercepts the route it conditions or, when minimally padded,
/// explains itself through an off-route ancestor of the target.
pub fn is_fragment(g: &Digraph, e: &Extension, x: VarId, y: VarId, z: VarSet) -> bool {
    assert_eq!(g.n(), e.space().sig().len(), "graph and extension sizes differ");
    let tables = Tables::build(e);
    fragment_ok(g, e, &tables, x, y, z)
}

/// Searches for a fragment certifying `irr(x; y; z)` within `e`.
///
/// A true anchor is certified by the empty graph. For a false anchor the
/// search walks the directed routes of `e`'s graph from `x` to `y` in
/// lexicographic order; for each route, every off-route vertex either stays
/// isolated or contributes one of its edges into the route, targets scanned
/// from the `y` end backwards. The first candidate passing [`is_fragment`]
/// wins, so the result is deterministic.
pub fn find_fragment(e: &Extension, x: VarId, y: VarId, z: VarSet) -> Option<Fragment> {
    search_fragment(e, x, y, z, VarSet::EMPTY)
}

/// Like [`find_fragment`], but keeps every vertex of `avoid` isolated so
/// that none of them ends up an ancestor of `y`. Used when certifying a
/// false set verdict through one of its members: the members moved into
/// the condition set must not feed the chosen target. `avoid` must be a
/// subset of `z`.
pub fn find_fragment_avoiding(
    e: &Extension,
    x: VarId,
    y: VarId,
    z: VarSet,
    avoid: VarSet,
) -> Option<Fragment> {
    assert!(avoid.is_subset(z), "avoid set must sit inside the condition set");
    search_fragment(e, x, y, z, avoid)
}

fn search_fragment(
    e: &Extension,
    x: VarId,
    y: VarId,
    z: VarSet,
    avoid: VarSet,
) -> Option<Fragment> {
    let space = e.space();
    let sig = space.sig().clone();
    let anchor =
        Atom::new(VarSet::singleton(x), VarSet::singleton(y), z).expect("anchor must be valid");
    if e.value(space.id(anchor)) {
        return Some(Fragment::empty(sig, x, y, z));
    }
    let g = e.syntactic_graph();
    let tables = Tables::build(e);
    let n = sig.len();
    for path in g.simple_paths(x, y) {
        let pset = VarSet::from_iter(path.iter().copied());
        if !pset.inter(z).is_empty() {
            continue;
        }
        let off: Vec<VarId> = (0..n).filter(|&v| !pset.contains(v)).collect();
        let choices: Vec<Vec<Option<VarId>>> = off
            .iter()
            .map(|&w| {
                let mut c = vec![None];
                if !avoid.contains(w) {
                    // Later attachment points leave less of the route's
                    // ancestry resting on the newcomer; prefer them.
                    for &p in path.iter().rev() {
                        if g.has_edge(w, p) {
                            c.push(Some(p));
                        }
                    }
                }
                c
            })
            .collect();
        let mut pick = vec![0usize; off.len()];
        'candidates: loop {
            let mut cand = Digraph::new(n);
            for win in path.windows(2) {
                cand.add_edge(win[0], win[1]);
            }
            for (k, &w) in off.iter().enumerate() {
                if let Some(p) = choices[k][pick[k]] {
                    cand.add_edge(w, p);
                }
            }
            if fragment_ok(&cand, e, &tables, x, y, z) {
                return Some(Fragment { sig, graph: cand, x, y, z, path });
            }
            // Odometer over attachment choices, last vertex fastest.
            let mut k = off.len();
            loop {
                if k == 0 {
                    break 'candidates;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < choices[k].len() {
                    break;
                }
                pick[k] = 0;
            }
        }
    }
    None
}

/// Compiles a graph over `sig`'s variables into a max-propagation model:
/// numeric domains `0..=n`, roots pinned to 0, and every wired vertex
/// collapsing to 0 when any parent is 0 and to the maximum parent value
/// otherwise. Single context `u`.
fn graph_model(sig: &Signature, g: &Digraph) -> CausalModel {
    let n = sig.len();
    let values: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    let vars: Vec<(String, Vec<String>)> =
        (0..n).map(|v| (sig.name(v).to_string(), values.clone())).collect();
    let msig = Signature::new(vars).expect("numeric domains are valid");
    let mut tables = Vec::with_capacity(n);
    for v in 0..n {
        let parents: Vec<VarId> = g.sources(v).iter().collect();
        if parents.is_empty() {
            tables.push(RuleTable::constant(0));
            continue;
        }
        let mut rules = Vec::new();
        for &p in &parents {
            rules.push(Rule { ctx: None, conds: vec![(p, 0)], then: 0 });
        }
        for val in (1..=n as u8).rev() {
            for &p in &parents {
                rules.push(Rule { ctx: None, conds: vec![(p, val)], then: val });
            }
        }
        tables.push(RuleTable { rules, default: 0 });
    }
    CausalModel::new(msig, vec!["u".into()], tables).expect("graph model is well formed")
}

/// Compiles a fragment into its certifying model.
///
/// Domains are `0..=n` over the fragment's variable names; roots are
/// constant 0 and wired vertices copy a zero parent or else the maximum
/// parent. Intervening along the route with the off-route roots forced
/// high makes `y` track `x`, while everything the fragment separates
/// stays flat, so the model satisfies the anchor's falsity and all of
/// the extension's true verdicts.
pub fn fragment_model(f: &Fragment) -> CausalModel {
    graph_model(&f.sig, &f.graph)
}

fn constant_model(sig: &Signature) -> CausalModel {
    graph_model(sig, &Digraph::new(sig.len()))
}

/// A maximal literal set with an acyclic graph, grown around one
/// designated negative literal of a cyclic-graph extension.
#[derive(Debug, Clone)]
pub struct Foliation {
    designated: Literal,
    extension: Extension,
}

impl Foliation {
    /// The negative literal this foliation was grown to protect.
    pub fn designated(&self) -> Literal {
        self.designated
    }

    /// The maximal set reached by the greedy walk.
    pub fn extension(&self) -> &Extension {
        &self.extension
    }
}

/// Grows a maximal acyclic-graph literal set around `phi`.
///
/// `phi` must be a negative literal member of `gamma`. The walk seeds with
/// `phi` plus every positive literal member of `gamma`, then visits the
/// atoms in index order, keeping each positive when that stays consistent
/// under the acyclic system and flipping it negative otherwise. Because
/// all of `gamma`'s positives are pinned from the start, a flip can only
/// land on an atom `gamma`'s own extensions already reject.
pub fn foliation(
    calc: &Calculus,
    gamma: &[Formula],
    phi: Literal,
) -> Result<Foliation, FragmentError> {
    if phi.positive {
        return Err(FragmentError::BadLiteral("designated literal must be negative".into()));
    }
    if !gamma.iter().any(|f| f.as_literal() == Some(phi)) {
        return Err(FragmentError::BadLiteral(
            "designated literal must appear in the constraint set".into(),
        ));
    }
    let mut cur: Vec<Formula> = vec![phi.to_formula()];
    cur.extend(
        gamma.iter().filter(|f| matches!(f.as_literal(), Some(l) if l.positive)).cloned(),
    );
    if calc.consistent(&cur, AxiomSystem::Srec)?.is_none() {
        return Err(FragmentError::Inconsistent(AxiomSystem::Srec));
    }
    let space = calc.space();
    let mut values = Vec::with_capacity(space.len());
    for id in space.ids() {
        let lit = Literal { atom: space.atom(id), positive: true };
        let mut with = cur.clone();
        with.push(lit.to_formula());
        if calc.consistent(&with, AxiomSystem::Srec)?.is_some() {
            cur = with;
            values.push(true);
        } else {
            cur.push(lit.negated().to_formula());
            values.push(false);
        }
    }
    Ok(Foliation { designated: phi, extension: Extension::from_verdicts(space, values) })
}

/// A summand fits when its computed theory falsifies its anchor and keeps
/// every verdict the extension holds true. An atom holds in a direct sum
/// exactly when it holds in every summand, so a sum of fitting parts, one
/// per anchored false verdict, preserves all of `e`'s positives while each
/// anchor falls to its own part.
fn summand_fits(th: &LiteralTheory, e: &Extension, anchor: AtomId) -> bool {
    !th.verdict(anchor)
        && e.values().iter().zip(th.verdicts()).all(|(&ev, &tv)| !ev || tv)
}

/// Primary summand search for one anchor: a single-connected fragment
/// routing `x` to `y` past `z`, compiled and accepted only if its computed
/// theory fits. The structural conditions approximate the fit but can
/// misjudge a guard, so the theory itself has the last word.
fn fragment_summand(
    e: &Extension,
    anchor: AtomId,
    x: VarId,
    y: VarId,
    z: VarSet,
    avoid: VarSet,
) -> Result<Option<(CausalModel, Vec<bool>)>, ScmError> {
    let space = e.space();
    let pair =
        Atom::new(VarSet::singleton(x), VarSet::singleton(y), z).expect("disjoint by construction");
    // Only a false pair verdict leaves room for a connecting route.
    if e.value(space.id(pair)) {
        return Ok(None);
    }
    let Some(f) = search_fragment(e, x, y, z, avoid) else { return Ok(None) };
    let m = fragment_model(&f);
    let th = theory_literals(&m)?;
    Ok(if summand_fits(&th, e, anchor) { Some((m, th.verdicts().to_vec())) } else { None })
}

/// Visits the size-`k` index subsets of `0..len` in lexicographic order,
/// advancing `idx` in place; returns false once exhausted.
fn next_combination(idx: &mut [usize], len: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < len - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Fallback summand search over denser subgraphs of the extension's own
/// graph. Some realizable verdict patterns need one vertex guarding
/// several others at once, which no single-connected graph expresses.
/// Every candidate keeps a route from `x` to `y` past `z` and adds some
/// subset of the remaining extension-graph edges, sparsest first; the
/// first whose computed theory fits wins. This family is complete for
/// max-propagation summands: a wired edge forces its widest-condition
/// verdict false, so a fitting candidate cannot use edges outside the
/// extension's graph.
fn subgraph_summand(
    e: &Extension,
    anchor: AtomId,
    x: VarId,
    y: VarId,
    z: VarSet,
) -> Result<Option<(CausalModel, Vec<bool>)>, ScmError> {
    let sig = e.space().sig();
    let g = e.syntactic_graph();
    for path in g.simple_paths(x, y) {
        let pset = VarSet::from_iter(path.iter().copied());
        if !pset.inter(z).is_empty() {
            continue;
        }
        let mut route = Digraph::new(sig.len());
        for win in path.windows(2) {
            route.add_edge(win[0], win[1]);
        }
        let extra: Vec<(VarId, VarId)> =
            g.edges().into_iter().filter(|&(a, b)| !route.has_edge(a, b)).collect();
        for k in 0..=extra.len() {
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                let mut cand = route.clone();
                for &i in &idx {
                    cand.add_edge(extra[i].0, extra[i].1);
                }
                let m = graph_model(sig, &cand);
                let th = theory_literals(&m)?;
                if summand_fits(&th, e, anchor) {
                    return Ok(Some((m, th.verdicts().to_vec())));
                }
                if !next_combination(&mut idx, extra.len()) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

/// Builds a model for `e` together with its exact theory, assuming `e`'s
/// graph is acyclic. One summand per negative verdict: false pair atoms
/// are anchored at their maximal condition sets (smaller ones follow by
/// downward closure), false set verdicts through one of their members
/// with the remaining members moved to the condition side. Each summand
/// is verified against `e` before joining the sum, falling back from the
/// fragment search to denser subgraphs when needed, so the returned
/// verdict vector is the sum's theory by the conjunction law. With no
/// negatives at all the result is a constant model. Fails with
/// [`FragmentError::NoFragment`] if some anchor admits no fitting summand.
fn extension_witness_verified(
    calc: &Calculus,
    e: &Extension,
) -> Result<(CausalModel, Vec<bool>), FragmentError> {
    let space = calc.space();
    let sig = space.sig();
    let n = sig.len();
    let mut parts: Vec<CausalModel> = Vec::new();
    let mut predicted = vec![true; space.len()];
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let falses: Vec<VarSet> = calc
                .pair_atoms(x, y)
                .iter()
                .filter(|&&(_, id)| !e.value(id))
                .map(|&(zs, _)| zs)
                .collect();
            for &zs in &falses {
                if falses.iter().any(|&o| o != zs && zs.is_subset(o)) {
                    continue;
                }
                let anchor = Atom::new(VarSet::singleton(x), VarSet::singleton(y), zs)
                    .expect("valid anchor");
                let id = space.id(anchor);
                let found = match fragment_summand(e, id, x, y, zs, VarSet::EMPTY)? {
                    some @ Some(_) => some,
                    None => subgraph_summand(e, id, x, y, zs)?,
                };
                let Some((part, th)) = found else {
                    return Err(FragmentError::NoFragment(anchor.render(sig)));
                };
                for (p, t) in predicted.iter_mut().zip(th) {
                    *p &= t;
                }
                parts.push(part);
            }
        }
    }
    for id in space.ids() {
        if e.value(id) {
            continue;
        }
        let atom = space.atom(id);
        if atom.x().len() != 1 || atom.y().len() < 2 {
            continue;
        }
        let x = atom.x().iter().next().expect("source is non-empty");
        // A false set verdict decomposes through some member once the rest
        // of the set joins the condition side; members certify
        // independently, so any one with a fitting summand will do. All
        // fragment attempts come before any fallback enumeration.
        let mut found = None;
        for v in atom.y().iter() {
            let rest = atom.y().minus(VarSet::singleton(v));
            found = fragment_summand(e, id, x, v, atom.z().union(rest), rest)?;
            if found.is_some() {
                break;
            }
        }
        if found.is_none() {
            for v in atom.y().iter() {
                let rest = atom.y().minus(VarSet::singleton(v));
                found = subgraph_summand(e, id, x, v, atom.z().union(rest))?;
                if found.is_some() {
                    break;
                }
            }
        }
        let Some((part, th)) = found else {
            return Err(FragmentError::NoFragment(atom.render(sig)));
        };
        for (p, t) in predicted.iter_mut().zip(th) {
            *p &= t;
        }
        parts.push(part);
    }
    if parts.is_empty() {
        return Ok((constant_model(sig), predicted));
    }
    Ok((direct_sum(&parts)?, predicted))
}

/// Builds a candidate model for `e`, assuming `e`'s graph is acyclic:
/// a direct sum of one verified summand per negative verdict. See
/// [`witness_model`] for the search that drives this against a whole
/// constraint set.
pub fn extension_witness(calc: &Calculus, e: &Extension) -> Result<CausalModel, FragmentError> {
    Ok(extension_witness_verified(calc, e)?.0)
}

/// Walks the acyclic-graph extensions of `gamma` in canonical order,
/// builds the verified candidate for each, and returns the first whose
/// theory satisfies every formula, along with that theory's verdicts.
/// Extensions without a fitting summand for some anchor or failing the
/// formula check are skipped; an empty stream means the set is
/// inconsistent, an exhausted one that no extension is realizable this
/// way.
fn acyclic_witness_search(
    calc: &Calculus,
    gamma: &[Formula],
) -> Result<(CausalModel, Vec<bool>), FragmentError> {
    let space = calc.space();
    let mut saw_extension = false;
    for e in calc.extensions(gamma, AxiomSystem::Srec)? {
        saw_extension = true;
        let (m, th) = match extension_witness_verified(calc, &e) {
            Ok(found) => found,
            Err(FragmentError::NoFragment(_)) => continue,
            Err(err) => return Err(err),
        };
        // The witness shares the signature's variables, so its atom space
        // lines up with the calculus space index by index.
        if gamma.iter().all(|f| f.eval(|a| th[space.id(a).idx()])) {
            return Ok((m, th));
        }
    }
    Err(if saw_extension {
        FragmentError::Unrealizable
    } else {
        FragmentError::Inconsistent(AxiomSystem::Srec)
    })
}

/// Builds a model whose irrelevance theory realizes `gamma`.
///
/// Under [`AxiomSystem::Srec`] the extensions of `gamma` are tried in
/// canonical order, each compiled to a direct sum of verified summands,
/// and the first sum whose theory satisfies `gamma` is kept, so the
/// result is deterministic. Under [`AxiomSystem::Rec`] the extension's
/// graph can be cyclic and no single sum will do; instead every negative
/// literal is re-embedded among all the positives in an acyclic-graph
/// maximal set (the search-order analogue of a [`foliation`]) and the sum
/// takes one acyclic witness per negative not already falsified by an
/// earlier summand. [`AxiomSystem::Uniq`] has no such construction and is
/// rejected.
pub fn witness_model(
    calc: &Calculus,
    gamma: &[Formula],
    sys: AxiomSystem,
) -> Result<CausalModel, FragmentError> {
    match sys {
        AxiomSystem::Uniq => Err(FragmentError::UnsupportedSystem(sys)),
        AxiomSystem::Srec => Ok(acyclic_witness_search(calc, gamma)?.0),
        AxiomSystem::Rec => {
            let space = calc.space();
            let mut saw_extension = false;
            'outer: for e in calc.extensions(gamma, sys)? {
                saw_extension = true;
                let positives: Vec<Formula> =
                    e.literals().filter(|l| l.positive).map(|l| l.to_formula()).collect();
                // Atom verdicts of the sum built so far: true until some
                // summand falsifies the atom, per the direct-sum law.
                let mut summed = vec![true; space.len()];
                let mut parts: Vec<CausalModel> = Vec::new();
                for lit in e.literals().filter(|l| !l.positive) {
                    let id = space.id(lit.atom);
                    if !summed[id.idx()] {
                        continue;
                    }
                    let mut cur = positives.clone();
                    cur.push(lit.to_formula());
                    let (part, theory) = match acyclic_witness_search(calc, &cur) {
                        Ok(found) => found,
                        Err(FragmentError::Inconsistent(_) | FragmentError::Unrealizable) => {
                            continue 'outer;
                        }
                        Err(err) => return Err(err),
                    };
                    for (s, v) in summed.iter_mut().zip(theory) {
                        *s &= v;
                    }
                    parts.push(part);
                }
                if gamma.iter().all(|f| f.eval(|a| summed[space.id(a).idx()])) {
                    return Ok(if parts.is_empty() {
                        constant_model(space.sig())
                    } else {
                        direct_sum(&parts)?
                    });
                }
            }
            Err(if saw_extension {
                FragmentError::Unrealizable
            } else {
                FragmentError::Inconsistent(sys)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::parse_formula_set_with_sig;
    use crate::scm::{model_from_json, ModelClass};
    use crate::semantics::theory_literals;

    const EX1: &str = include_str!("../tests/fixtures/ex1.txt");

    fn calc4() -> Calculus {
        Calculus::new(Signature::uniform(4, &["lo", "hi"]).unwrap())
    }

    fn ex1_extension(calc: &Calculus) -> Extension {
        let gamma = parse_formula_set_with_sig(EX1, calc.space().sig()).unwrap();
        calc.consistent(&gamma, AxiomSystem::Srec).unwrap().unwrap()
    }

    #[test]
    fn worked_fragment_is_accepted() {
        let calc = calc4();
        let e = ex1_extension(&calc);
        let g = Digraph::from_edges(4, &[(0, 2), (1, 2), (2, 3)]);
        assert!(is_fragment(&g, &e, 0, 3, VarSet::EMPTY));
    }

    #[test]
    fn unintercepted_direct_edge_is_rejected() {
        let calc = calc4();
        let e = ex1_extension(&calc);
        // irr(X1; X4; X3) holds in the extension but X3 cannot intercept
        // the one-edge route, so the candidate fails.
        let g = Digraph::from_edges(4, &[(0, 3)]);
        assert!(!is_fragment(&g, &e, 0, 3, VarSet::EMPTY));
    }

    #[test]
    fn true_anchor_gets_the_empty_fragment() {
        let calc = calc4();
        let e = ex1_extension(&calc);
        let f = find_fragment(&e, 0, 3, VarSet::singleton(2)).unwrap();
        assert_eq!(f.graph().edge_count(), 0);
        assert!(f.path().is_empty());
    }

    #[test]
    fn search_recovers_the_worked_fragment() {
        let calc = calc4();
        let e = ex1_extension(&calc);
        let f = find_fragment(&e, 0, 3, VarSet::EMPTY).unwrap();
        assert_eq!(f.graph().edges(), vec![(0, 2), (1, 2), (2, 3)]);
        assert_eq!(f.path(), &[0, 2, 3]);
        assert_eq!(f.anchor(), (0, 3, VarSet::EMPTY));
    }

    #[test]
    fn avoided_vertices_stay_isolated() {
        let calc = calc4();
        let e = ex1_extension(&calc);
        // Certify irr(X1; X3,X4; ) through the member X3: X4 joins the
        // condition set and must not become an ancestor of X3.
        let avoid = VarSet::singleton(3);
        let f = find_fragment_avoiding(&e, 0, 2, VarSet::singleton(3), avoid).unwrap();
        assert!(f.graph().ancestors(2).inter(avoid).is_empty());
        assert!(f.graph().sources(3).is_empty());
        assert!(f.graph().targets(3).is_empty());
    }

    #[test]
    fn cyclic_extension_anchor_has_no_fragment() {
        let model = model_from_json(include_str!("../tests/fixtures/thm11.json")).unwrap();
        let th = theory_literals(&model).unwrap();
        let e = Extension::from_verdicts(th.space(), th.verdicts().to_vec());
        let anchor = Atom::new(
            VarSet::singleton(0),
            VarSet::singleton(3),
            VarSet::EMPTY,
        )
        .unwrap();
        assert!(!e.value(th.space().id(anchor)));
        assert!(find_fragment(&e, 0, 3, VarSet::EMPTY).is_none());
    }

    #[test]
    fn fragment_model_matches_the_worked_model() {
        let sig = Signature::uniform(4, &["lo", "hi"]).unwrap();
        let g = Digraph::from_edges(4, &[(0, 2), (1, 2), (2, 3)]);
        let f = Fragment::new(sig, g, 0, 3, VarSet::EMPTY);
        let built = fragment_model(&f);
        let fixture = model_from_json(include_str!("../tests/fixtures/ex3.json")).unwrap();
        assert_eq!(
            theory_literals(&built).unwrap().verdicts(),
            theory_literals(&fixture).unwrap().verdicts()
        );
    }

    #[test]
    fn fragment_model_propagates_along_the_route() {
        let sig = Signature::uniform(4, &["lo", "hi"]).unwrap();
        let g = Digraph::from_edges(4, &[(0, 2), (1, 2), (2, 3)]);
        let f = Fragment::new(sig, g, 0, 3, VarSet::EMPTY);
        let m = fragment_model(&f);
        let mut ev = crate::semantics::Evaluator::new(&m);
        // With the side root held high, the sink tracks the route's source.
        let low = ev.response(&crate::scm::Assignment::new([(0, 0), (1, 1)]), 0).unwrap();
        let high = ev.response(&crate::scm::Assignment::new([(0, 1), (1, 1)]), 0).unwrap();
        assert_eq!(low.get(3), Some(0));
        assert_eq!(high.get(3), Some(1));
        // With the side root at zero the collapse rule wins everywhere.
        let cut = ev.response(&crate::scm::Assignment::new([(0, 1), (1, 0)]), 0).unwrap();
        assert_eq!(cut.get(3), Some(0));
    }

    #[test]
    fn fragment_text_round_trips() {
        let calc = calc4();
        let e = ex1_extension(&calc);
        let f = find_fragment(&e, 0, 3, VarSet::EMPTY).unwrap();
        let text = f.render();
        let back = Fragment::parse(&text, calc.space().sig()).unwrap();
        assert_eq!(back.graph().edges(), f.graph().edges());
        assert_eq!(back.anchor(), f.anchor());
        assert_eq!(back.path(), f.path());
    }

    #[test]
    fn fragment_parse_rejects_bad_lines() {
        let sig = Signature::uniform(2, &["f", "t"]).unwrap();
        assert!(matches!(
            Fragment::parse("X1 -> X2\n", &sig),
            Err(FragmentError::Parse(_))
        ));
        assert!(matches!(
            Fragment::parse("anchor: !irr(X1; X2; )\n", &sig),
            Err(FragmentError::Parse(_))
        ));
        assert!(matches!(
            Fragment::parse("anchor: irr(X1; X2; )\nX1 => X2\n", &sig),
            Err(FragmentError::Parse(_))
        ));
    }

    #[test]
    fn foliations_split_the_two_cycle() {
        let calc = Calculus::new(Signature::uniform(2, &["f", "t"]).unwrap());
        let space = calc.space();
        let gamma =
            parse_formula_set_with_sig("!irr(X1; X2; )\n!irr(X2; X1; )", space.sig()).unwrap();
        let phi0 = Literal { atom: space.atom(crate::language::AtomId(0)), positive: false };
        let phi1 = Literal { atom: space.atom(crate::language::AtomId(1)), positive: false };
        let f0 = foliation(&calc, &gamma, phi0).unwrap();
        let f1 = foliation(&calc, &gamma, phi1).unwrap();
        assert_eq!(f0.extension().values(), &[false, true]);
        assert_eq!(f1.extension().values(), &[true, false]);
        assert_eq!(f0.designated(), phi0);
    }

    #[test]
    fn foliation_rejects_bad_designations() {
        let calc = Calculus::new(Signature::uniform(2, &["f", "t"]).unwrap());
        let space = calc.space();
        let gamma = parse_formula_set_with_sig("!irr(X1; X2; )", space.sig()).unwrap();
        let positive = Literal { atom: space.atom(crate::language::AtomId(0)), positive: true };
        assert!(matches!(
            foliation(&calc, &gamma, positive),
            Err(FragmentError::BadLiteral(_))
        ));
        let stranger = Literal { atom: space.atom(crate::language::AtomId(1)), positive: false };
        assert!(matches!(
            foliation(&calc, &gamma, stranger),
            Err(FragmentError::BadLiteral(_))
        ));
    }

    #[test]
    fn acyclic_witness_satisfies_its_constraints() {
        let calc = calc4();
        let gamma = parse_formula_set_with_sig(EX1, calc.space().sig()).unwrap();
        let m = witness_model(&calc, &gamma, AxiomSystem::Srec).unwrap();
        let mut ev = crate::semantics::Evaluator::new(&m);
        for f in &gamma {
            assert!(ev.satisfies(f).unwrap(), "witness violates a constraint");
        }
        // Fragment graphs live inside the extension's own acyclic graph, so
        // their union remains acyclic and the sum keeps one global order.
        assert_eq!(m.classify().unwrap(), ModelClass::StrongRecursive);
    }

    #[test]
    fn witness_search_reaches_guarded_patterns() {
        // A diamond with one root guarding two layers at once: X3 feeds
        // both X1 and X2, X4 feeds X1, X1 feeds X2. No single-connected
        // graph expresses a vertex guarding two others simultaneously, so
        // realizing this theory needs the denser fallback candidates.
        let sig = Signature::uniform(4, &["lo", "hi"]).unwrap();
        let g = Digraph::from_edges(4, &[(0, 1), (2, 0), (2, 1), (3, 0)]);
        let gate = fragment_model(&Fragment::new(sig.clone(), g, 3, 1, VarSet::EMPTY));
        let th = theory_literals(&gate).unwrap();
        let calc = Calculus::new(sig);
        let gamma: Vec<Formula> = th.literals().map(|l| l.to_formula()).collect();
        let m = witness_model(&calc, &gamma, AxiomSystem::Srec).unwrap();
        assert_eq!(theory_literals(&m).unwrap().verdicts(), th.verdicts());
    }

    #[test]
    fn cyclic_witness_reproduces_the_two_cycle() {
        let calc = Calculus::new(Signature::uniform(2, &["f", "t"]).unwrap());
        let gamma = parse_formula_set_with_sig(
            "!irr(X1; X2; )\n!irr(X2; X1; )",
            calc.space().sig(),
        )
        .unwrap();
        let m = witness_model(&calc, &gamma, AxiomSystem::Rec).unwrap();
        let th = theory_literals(&m).unwrap();
        assert_eq!(th.verdicts(), &[false, false]);
        assert_eq!(m.classify().unwrap(), ModelClass::Recursive);
    }

    #[test]
    fn empty_constraints_get_a_constant_witness() {
        let calc = Calculus::new(Signature::uniform(2, &["f", "t"]).unwrap());
        let m = witness_model(&calc, &[], AxiomSystem::Srec).unwrap();
        let th = theory_literals(&m).unwrap();
        assert!(th.verdicts().iter().all(|&v| v));
        assert_eq!(m.classify().unwrap(), ModelClass::StrongRecursive);
    }

    #[test]
    fn witness_model_guards_its_inputs() {
        let calc = Calculus::new(Signature::uniform(2, &["f", "t"]).unwrap());
        let space = calc.space();
        let a = Formula::Atom(space.atom(crate::language::AtomId(0)));
        assert!(matches!(
            witness_model(&calc, &[a.clone(), Formula::not(a)], AxiomSystem::Srec),
            Err(FragmentError::Inconsistent(AxiomSystem::Srec))
        ));
        assert!(matches!(
            witness_model(&calc, &[], AxiomSystem::Uniq),
            Err(FragmentError::UnsupportedSystem(AxiomSystem::Uniq))
        ));
    }
}
