//! Functional causal models with explicit contexts.
//!
//! A model fixes a signature, a finite non-empty list of context ids, and
//! one total equation per variable, represented as an ordered first-match
//! rule table with a mandatory default. Interventions replace equations
//! with constants; solving enumerates simultaneous solutions of the
//! equation system at a context.

mod io;

pub use io::{
    doc_to_model, model_from_json, model_to_doc, model_to_json, EquationDoc, ModelDoc, RuleDoc,
    VariableDoc,
};

use std::collections::HashMap;

use thiserror::Error;

use crate::language::{Signature, VarId, VarSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScmError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("value `{value}` is not in the domain of `{variable}`")]
    Domain { variable: String, value: String },
    #[error("equation for `{0}` conditions on `{0}` itself")]
    SelfReference(String),
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("equations have no unique simultaneous solution under [{intervention}] at context `{context}`")]
    NotUnique { intervention: String, context: String },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// A partial valuation of signature variables, by domain-value index.
/// Slots outside `set` are normalized to zero, so derived equality is
/// equality of the represented partial function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    set: VarSet,
    vals: [u8; 16],
}

impl Assignment {
    pub const EMPTY: Assignment = Assignment { set: VarSet::EMPTY, vals: [0; 16] };

    pub fn new<I: IntoIterator<Item = (VarId, u8)>>(pairs: I) -> Assignment {
        let mut a = Assignment::EMPTY;
        for (v, val) in pairs {
            a.insert(v, val);
        }
        a
    }

    pub fn set(&self) -> VarSet {
        self.set
    }

    pub fn insert(&mut self, v: VarId, val: u8) {
        self.set.insert(v);
        self.vals[v] = val;
    }

    pub fn get(&self, v: VarId) -> Option<u8> {
        if self.set.contains(v) {
            Some(self.vals[v])
        } else {
            None
        }
    }

    /// Raw value slots; only entries under `set()` are meaningful.
    pub fn raw_vals(&self) -> &[u8; 16] {
        &self.vals
    }

    pub fn restrict(&self, to: VarSet) -> Assignment {
        let mut out = Assignment::EMPTY;
        for v in self.set.inter(to).iter() {
            out.insert(v, self.vals[v]);
        }
        out
    }

    pub fn union(&self, other: &Assignment) -> Assignment {
        let mut out = *self;
        for v in other.set.iter() {
            out.insert(v, other.vals[v]);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, u8)> + '_ {
        self.set.iter().map(move |v| (v, self.vals[v]))
    }

    /// Renders as `X1=0,X4=1` using domain value strings, in signature order.
    pub fn render(&self, sig: &Signature) -> String {
        self.iter()
            .map(|(v, val)| format!("{}={}", sig.name(v), sig.domain_value(v, val)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Outcome of solving the equation system at one context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solutions {
    Unique(Assignment),
    None,
    Multiple(usize),
}

/// One first-match rule: fires when every listed variable has the listed
/// value and, if `ctx` is set, the context matches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub ctx: Option<u16>,
    pub conds: Vec<(VarId, u8)>,
    pub then: u8,
}

/// An ordered rule table with a mandatory default; the first matching rule
/// wins, so the table is a total function of the other variables and the
/// context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTable {
    pub rules: Vec<Rule>,
    pub default: u8,
}

impl RuleTable {
    pub fn constant(v: u8) -> RuleTable {
        RuleTable { rules: Vec::new(), default: v }
    }

    fn eval(&self, vals: &[u8; 16], ctx: u16) -> u8 {
        for rule in &self.rules {
            if let Some(c) = rule.ctx {
                if c != ctx {
                    continue;
                }
            }
            if rule.conds.iter().all(|&(v, val)| vals[v] == val) {
                return rule.then;
            }
        }
        self.default
    }

}

/// A functional causal model.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalModel {
    sig: Signature,
    contexts: Vec<String>,
    ctx_index: HashMap<String, u16>,
    tables: Vec<RuleTable>,
}

impl CausalModel {
    pub fn new(
        sig: Signature,
        contexts: Vec<String>,
        tables: Vec<RuleTable>,
    ) -> Result<CausalModel, ScmError> {
        if contexts.is_empty() {
            return Err(ScmError::Schema("a model needs at least one context".into()));
        }
        let mut ctx_index = HashMap::new();
        for (i, c) in contexts.iter().enumerate() {
            if c.is_empty() {
                return Err(ScmError::Schema("empty context id".into()));
            }
            if ctx_index.insert(c.clone(), i as u16).is_some() {
                return Err(ScmError::Schema(format!("duplicate context id `{c}`")));
            }
        }
        if tables.len() != sig.len() {
            return Err(ScmError::Schema(format!(
                "{} equations for {} variables",
                tables.len(),
                sig.len()
            )));
        }
        for (y, table) in tables.iter().enumerate() {
            let dy = sig.domain(y).len() as u8;
            if table.default >= dy {
                return Err(ScmError::Schema(format!(
                    "default value index out of range for `{}`",
                    sig.name(y)
                )));
            }
            for rule in &table.rules {
                if rule.then >= dy {
                    return Err(ScmError::Schema(format!(
                        "rule output out of range for `{}`",
                        sig.name(y)
                    )));
                }
                if let Some(c) = rule.ctx {
                    if c as usize >= contexts.len() {
                        return Err(ScmError::Schema("rule context index out of range".into()));
                    }
                }
                for &(v, val) in &rule.conds {
                    if v >= sig.len() {
                        return Err(ScmError::Schema("rule condition variable out of range".into()));
                    }
                    if v == y {
                        return Err(ScmError::SelfReference(sig.name(y).to_string()));
                    }
                    if val >= sig.domain(v).len() as u8 {
                        return Err(ScmError::Schema(format!(
                            "rule condition value out of range for `{}`",
                            sig.name(v)
                        )));
                    }
                }
            }
        }
        Ok(CausalModel { ctx_index, sig, contexts, tables })
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn contexts(&self) -> &[String] {
        &self.contexts
    }

    pub fn context_id(&self, name: &str) -> Result<u16, ScmError> {
        self.ctx_index
            .get(name)
            .copied()
            .ok_or_else(|| ScmError::UnknownContext(name.to_string()))
    }

    pub fn table(&self, v: VarId) -> &RuleTable {
        &self.tables[v]
    }

    /// The model with the equations of `x`'s variables replaced by the
    /// constants `x` assigns.
    pub fn intervene(&self, x: &Assignment) -> CausalModel {
        let mut m = self.clone();
        for (v, val) in x.iter() {
            m.tables[v] = RuleTable::constant(val);
        }
        m
    }

    /// Evaluates `y`'s equation on the given total value vector. Rule
    /// conditions never mention `y` itself, so `vals[y]` is ignored.
    pub fn eval_equation(&self, y: VarId, vals: &[u8; 16], ctx: u16) -> u8 {
        self.tables[y].eval(vals, ctx)
    }

    /// Simultaneous solutions of the equation system at a context.
    pub fn solve(&self, ctx: &str) -> Result<Solutions, ScmError> {
        Ok(self.solve_at(&Assignment::EMPTY, self.context_id(ctx)?))
    }

    /// Solve with `overrides` treated as intervened constants (equivalent to
    /// `self.intervene(overrides).solve(..)`, without cloning the model).
    pub fn solve_at(&self, overrides: &Assignment, ctx: u16) -> Solutions {
        if let Some(order) = self.mention_order(overrides.set(), ctx) {
            // The applicable rule conditions form a DAG over the free
            // variables, so the system has exactly one solution, found by
            // evaluating in dependency order.
            let mut vals = *overrides.raw_vals();
            for &y in &order {
                vals[y] = self.tables[y].eval(&vals, ctx);
            }
            let mut a = *overrides;
            for v in self.sig.vars() {
                a.insert(v, vals[v]);
            }
            return Solutions::Unique(a);
        }
        self.solve_brute(overrides, ctx)
    }

    fn solve_brute(&self, overrides: &Assignment, ctx: u16) -> Solutions {
        let free: Vec<VarId> = self.sig.full_set().minus(overrides.set()).iter().collect();
        let mut vals = *overrides.raw_vals();
        for &v in &free {
            vals[v] = 0;
        }
        let mut count = 0usize;
        let mut first: Option<Assignment> = None;
        loop {
            let fixed_point = self
                .sig
                .vars()
                .filter(|v| !overrides.set().contains(*v))
                .all(|y| self.tables[y].eval(&vals, ctx) == vals[y]);
            if fixed_point {
                count += 1;
                if first.is_none() {
                    let mut a = *overrides;
                    for v in self.sig.vars() {
                        a.insert(v, vals[v]);
                    }
                    first = Some(a);
                }
            }
            // mixed-radix increment over the free variables
            let mut i = 0;
            loop {
                if i == free.len() {
                    return match count {
                        0 => Solutions::None,
                        1 => Solutions::Unique(first.unwrap()),
                        k => Solutions::Multiple(k),
                    };
                }
                let v = free[i];
                if (vals[v] as usize) + 1 < self.sig.domain(v).len() {
                    vals[v] += 1;
                    break;
                }
                vals[v] = 0;
                i += 1;
            }
        }
    }

    /// Topological order of the free variables by syntactic rule mentions at
    /// `ctx`, if that mention relation is acyclic. Mentions over-approximate
    /// true dependencies, so a returned order certifies a unique solution.
    fn mention_order(&self, overridden: VarSet, ctx: u16) -> Option<Vec<VarId>> {
        let n = self.sig.len();
        let mut deps: Vec<VarSet> = vec![VarSet::EMPTY; n];
        for y in self.sig.vars() {
            if overridden.contains(y) {
                continue;
            }
            let mut m = VarSet::EMPTY;
            for rule in &self.tables[y].rules {
                if let Some(c) = rule.ctx {
                    if c != ctx {
                        continue;
                    }
                }
                for &(v, _) in &rule.conds {
                    m.insert(v);
                }
            }
            deps[y] = m.minus(overridden);
        }
        let mut placed = overridden;
        let mut order = Vec::new();
        loop {
            let mut progress = false;
            for y in self.sig.vars() {
                if placed.contains(y) || !deps[y].is_subset(placed) {
                    continue;
                }
                placed.insert(y);
                order.push(y);
                progress = true;
            }
            if placed == self.sig.full_set() {
                return Some(order);
            }
            if !progress {
                return None;
            }
        }
    }

    /// Potential response: the unique solved values of `targets` after
    /// intervening `x`, at context `ctx`.
    pub fn potential_response(
        &self,
        x: &Assignment,
        targets: VarSet,
        ctx: &str,
    ) -> Result<Assignment, ScmError> {
        if !targets.is_disjoint(x.set()) {
            return Err(ScmError::Invalid(
                "response targets overlap the intervened variables".into(),
            ));
        }
        if targets.is_empty() {
            return Err(ScmError::Invalid("empty response target set".into()));
        }
        let c = self.context_id(ctx)?;
        match self.solve_at(x, c) {
            Solutions::Unique(a) => Ok(a.restrict(targets)),
            _ => Err(ScmError::NotUnique {
                intervention: x.render(&self.sig),
                context: ctx.to_string(),
            }),
        }
    }

    /// True when every intervention (every subset of variables, every value
    /// vector for it, including the empty intervention) solves uniquely at
    /// every context.
    pub fn check_uniq(&self) -> bool {
        self.sig.full_set().subsets().all(|set| {
            valuations(&self.sig, set).all(|a| {
                (0..self.contexts.len() as u16)
                    .all(|ctx| matches!(self.solve_at(&a, ctx), Solutions::Unique(_)))
            })
        })
    }

    /// The semantic graph at one context (or the union over all contexts):
    /// an edge `x -> y` iff two inputs differing only at `x` give `y`'s
    /// equation different outputs.
    pub fn semantic_graph(&self, ctx: Option<&str>) -> Result<Digraph, ScmError> {
        let ctxs: Vec<u16> = match ctx {
            Some(name) => vec![self.context_id(name)?],
            None => (0..self.contexts.len() as u16).collect(),
        };
        let n = self.sig.len();
        let mut g = Digraph::new(n);
        for y in self.sig.vars() {
            for x in self.sig.vars() {
                if x == y {
                    continue;
                }
                if ctxs.iter().any(|&c| self.depends_on(y, x, c)) {
                    g.add_edge(x, y);
                }
            }
        }
        Ok(g)
    }

    fn depends_on(&self, y: VarId, x: VarId, ctx: u16) -> bool {
        // sweep all valuations of the variables other than x and y
        let others: Vec<VarId> =
            self.sig.full_set().minus(VarSet::singleton(x)).minus(VarSet::singleton(y)).iter().collect();
        let mut vals = [0u8; 16];
        loop {
            let base = {
                vals[x] = 0;
                self.tables[y].eval(&vals, ctx)
            };
            for xv in 1..self.sig.domain(x).len() as u8 {
                vals[x] = xv;
                if self.tables[y].eval(&vals, ctx) != base {
                    return true;
                }
            }
            let mut i = 0;
            loop {
                if i == others.len() {
                    return false;
                }
                let v = others[i];
                if (vals[v] as usize) + 1 < self.sig.domain(v).len() {
                    vals[v] += 1;
                    break;
                }
                vals[v] = 0;
                i += 1;
            }
        }
    }

    /// Model classification by solvability and graph shape.
    pub fn classify(&self) -> Result<ModelClass, ScmError> {
        if !self.check_uniq() {
            return Ok(ModelClass::NotUniq);
        }
        if self.semantic_graph(None)?.is_dag() {
            return Ok(ModelClass::StrongRecursive);
        }
        let per_ctx_dags = self
            .contexts
            .iter()
            .map(|c| self.semantic_graph(Some(c)).map(|g| g.is_dag()))
            .collect::<Result<Vec<_>, _>>()?;
        if per_ctx_dags.into_iter().all(|b| b) {
            Ok(ModelClass::Recursive)
        } else {
            Ok(ModelClass::UniqOnly)
        }
    }
}

/// All valuations of the variables in `over`, as a mixed-radix sweep in
/// signature order with the lowest variable cycling fastest. Yields exactly
/// one (empty) assignment when `over` is empty.
pub fn valuations(sig: &Signature, over: VarSet) -> impl Iterator<Item = Assignment> + '_ {
    let vars: Vec<VarId> = over.iter().collect();
    let mut cur = Some(Assignment::new(vars.iter().map(|&v| (v, 0))));
    std::iter::from_fn(move || {
        let out = cur?;
        let mut next = out;
        let mut i = 0;
        cur = loop {
            if i == vars.len() {
                break None;
            }
            let v = vars[i];
            let val = next.get(v).unwrap();
            if (val as usize) + 1 < sig.domain(v).len() {
                next.insert(v, val + 1);
                break Some(next);
            }
            next.insert(v, 0);
            i += 1;
        };
        Some(out)
    })
}

/// Tagged disjoint union of models over one signature: the sum's context
/// set is the disjoint union of the summands' contexts (tagged `i:ctx` with
/// `i` the 1-based summand index), and at a tagged context every equation
/// behaves exactly as in that summand.
pub fn direct_sum(models: &[CausalModel]) -> Result<CausalModel, ScmError> {
    let first = models
        .first()
        .ok_or_else(|| ScmError::Invalid("direct sum of zero models".into()))?;
    for m in models {
        if !m.sig.same_as(&first.sig) {
            return Err(ScmError::SignatureMismatch(
                "direct sum requires identical signatures".into(),
            ));
        }
    }
    let mut contexts = Vec::new();
    let mut base: Vec<u16> = Vec::new();
    for (i, m) in models.iter().enumerate() {
        base.push(contexts.len() as u16);
        for c in &m.contexts {
            contexts.push(format!("{}:{}", i + 1, c));
        }
    }
    let mut tables = Vec::with_capacity(first.sig.len());
    for y in first.sig.vars() {
        let mut rules = Vec::new();
        for (i, m) in models.iter().enumerate() {
            for rule in &m.tables[y].rules {
                match rule.ctx {
                    Some(c) => rules.push(Rule { ctx: Some(base[i] + c), ..rule.clone() }),
                    // a context-free rule applies at each of this summand's
                    // contexts; expanding in context order preserves the
                    // first-match order within each context
                    None => {
                        for c in 0..m.contexts.len() as u16 {
                            rules.push(Rule { ctx: Some(base[i] + c), ..rule.clone() });
                        }
                    }
                }
            }
        }
        for (i, m) in models.iter().enumerate() {
            for c in 0..m.contexts.len() as u16 {
                rules.push(Rule { ctx: Some(base[i] + c), conds: Vec::new(), then: m.tables[y].default });
            }
        }
        tables.push(RuleTable { rules, default: first.tables[y].default });
    }
    CausalModel::new(first.sig.clone(), contexts, tables)
}

/// Model classes ordered by strength: every strong-recursive model is
/// recursive, every recursive model solves uniquely.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelClass {
    NotUniq,
    UniqOnly,
    Recursive,
    StrongRecursive,
}

impl std::fmt::Display for ModelClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelClass::NotUniq => "NotUniq",
            ModelClass::UniqOnly => "UniqOnly",
            ModelClass::Recursive => "Recursive",
            ModelClass::StrongRecursive => "StrongRecursive",
        };
        f.write_str(s)
    }
}

/// A directed graph over the signature's variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    rows: Vec<u32>,
}

impl Digraph {
    pub fn new(n: usize) -> Digraph {
        Digraph { n, rows: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(VarId, VarId)]) -> Digraph {
        let mut g = Digraph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, from: VarId, to: VarId) {
        debug_assert!(from != to, "no self loops");
        self.rows[from] |= 1 << to;
    }

    pub fn has_edge(&self, from: VarId, to: VarId) -> bool {
        self.rows[from] & (1 << to) != 0
    }

    pub fn targets(&self, from: VarId) -> VarSet {
        VarSet(self.rows[from])
    }

    pub fn sources(&self, to: VarId) -> VarSet {
        VarSet::from_iter((0..self.n).filter(|&v| self.has_edge(v, to)))
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Edges sorted by source, then target.
    pub fn edges(&self) -> Vec<(VarId, VarId)> {
        let mut out = Vec::new();
        for v in 0..self.n {
            for t in VarSet(self.rows[v]).iter() {
                out.push((v, t));
            }
        }
        out
    }

    pub fn union(&self, other: &Digraph) -> Digraph {
        debug_assert_eq!(self.n, other.n);
        Digraph {
            n: self.n,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersect(&self, other: &Digraph) -> Digraph {
        debug_assert_eq!(self.n, other.n);
        Digraph {
            n: self.n,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn is_edge_subgraph_of(&self, other: &Digraph) -> bool {
        self.n == other.n && self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    pub fn is_dag(&self) -> bool {
        let mut placed = VarSet::EMPTY;
        let full = VarSet::from_iter(0..self.n);
        loop {
            let mut progress = false;
            for v in 0..self.n {
                if placed.contains(v) {
                    continue;
                }
                // v can be placed once all its sources are placed
                if self.sources(v).is_subset(placed) {
                    placed.insert(v);
                    progress = true;
                }
            }
            if placed == full {
                return true;
            }
            if !progress {
                return false;
            }
        }
    }

    /// Proper ancestors of `v` (excluding `v`).
    pub fn ancestors(&self, v: VarId) -> VarSet {
        let mut anc = VarSet::EMPTY;
        let mut frontier = self.sources(v);
        while !frontier.is_empty() {
            anc = anc.union(frontier);
            let mut next = VarSet::EMPTY;
            for w in frontier.iter() {
                next = next.union(self.sources(w));
            }
            frontier = next.minus(anc);
        }
        anc
    }

    /// All simple directed paths from `x` to `y`, in lexicographic order of
    /// their vertex sequences.
    pub fn simple_paths(&self, x: VarId, y: VarId) -> Vec<Vec<VarId>> {
        let mut out = Vec::new();
        let mut stack = vec![x];
        let mut visited = VarSet::singleton(x);
        fn dfs(
            g: &Digraph,
            y: VarId,
            stack: &mut Vec<VarId>,
            visited: &mut VarSet,
            out: &mut Vec<Vec<VarId>>,
        ) {
            let cur = *stack.last().unwrap();
            if cur == y {
                out.push(stack.clone());
                return;
            }
            for t in g.targets(cur).iter() {
                if visited.contains(t) {
                    continue;
                }
                visited.insert(t);
                stack.push(t);
                dfs(g, y, stack, visited, out);
                stack.pop();
                *visited = visited.minus(VarSet::singleton(t));
            }
        }
        dfs(self, y, &mut stack, &mut visited, &mut out);
        out
    }

    /// True when the underlying undirected simple graph is acyclic.
    pub fn undirected_is_forest(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        let mut seen = std::collections::HashSet::new();
        for (a, b) in self.edges() {
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                continue;
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }

    /// Vertices with at least one incident edge.
    pub fn non_isolated(&self) -> VarSet {
        let mut s = VarSet::EMPTY;
        for (a, b) in self.edges() {
            s.insert(a);
            s.insert(b);
        }
        s
    }

    /// Renders as sorted `A -> B` lines.
    pub fn render_edges(&self, sig: &Signature) -> String {
        self.edges()
            .iter()
            .map(|&(a, b)| format!("{} -> {}", sig.name(a), sig.name(b)))
            .collect::<Vec<_>>()
            .join("\n")
    }
}
