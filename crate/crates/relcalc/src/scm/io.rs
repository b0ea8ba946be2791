//! JSON serialization of causal models.
//!
//! A model file is a single JSON document:
//!
//! ```json
//! {
//!   "variables": [{"name": "X1", "domain": ["0", "1"]}],
//!   "contexts": ["u"],
//!   "equations": {
//!     "X1": {"rules": [{"when": {"_ctx": "u"}, "then": "1"}], "default": "0"}
//!   }
//! }
//! ```
//!
//! Rules fire first-match; `when` maps variable names to required values,
//! with the reserved key `_ctx` matching the context id, and omitted keys
//! acting as wildcards. Every equation needs a `default`. Unknown fields
//! are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::language::Signature;
use crate::scm::{CausalModel, Rule, RuleTable, ScmError};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub variables: Vec<VariableDoc>,
    pub contexts: Vec<String>,
    pub equations: BTreeMap<String, EquationDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDoc {
    pub name: String,
    pub domain: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationDoc {
    pub rules: Vec<RuleDoc>,
    pub default: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub when: BTreeMap<String, String>,
    pub then: String,
}

const CTX_KEY: &str = "_ctx";

pub fn model_from_json(text: &str) -> Result<CausalModel, ScmError> {
    let doc: ModelDoc =
        serde_json::from_str(text).map_err(|e| ScmError::Schema(e.to_string()))?;
    doc_to_model(&doc)
}

pub fn doc_to_model(doc: &ModelDoc) -> Result<CausalModel, ScmError> {
    let sig = Signature::new(
        doc.variables.iter().map(|v| (v.name.clone(), v.domain.clone())).collect(),
    )
    .map_err(|e| ScmError::Schema(e.to_string()))?;

    let mut ctx_of = BTreeMap::new();
    for (i, c) in doc.contexts.iter().enumerate() {
        ctx_of.insert(c.as_str(), i as u16);
    }

    let value_of = |var: &str, value: &str| -> Result<(usize, u8), ScmError> {
        let v = sig
            .var_id(var)
            .ok_or_else(|| ScmError::Schema(format!("unknown variable `{var}` in equations")))?;
        let idx = sig.value_index(v, value).ok_or_else(|| ScmError::Domain {
            variable: var.to_string(),
            value: value.to_string(),
        })?;
        Ok((v, idx))
    };

    let mut tables = Vec::with_capacity(sig.len());
    for y in sig.vars() {
        let name = sig.name(y);
        let eq = doc
            .equations
            .get(name)
            .ok_or_else(|| ScmError::Schema(format!("missing equation for `{name}`")))?;
        let (_, default) = value_of(name, &eq.default)?;
        let mut rules = Vec::with_capacity(eq.rules.len());
        for rd in &eq.rules {
            let mut ctx = None;
            let mut conds = Vec::new();
            for (k, val) in &rd.when {
                if k == CTX_KEY {
                    let c = ctx_of
                        .get(val.as_str())
                        .ok_or_else(|| ScmError::UnknownContext(val.clone()))?;
                    ctx = Some(*c);
                } else {
                    let (v, idx) = value_of(k, val)?;
                    if v == y {
                        return Err(ScmError::SelfReference(name.to_string()));
                    }
                    conds.push((v, idx));
                }
            }
            conds.sort_unstable();
            let (_, then) = value_of(name, &rd.then)?;
            rules.push(Rule { ctx, conds, then });
        }
        tables.push(RuleTable { rules, default });
    }

    for name in doc.equations.keys() {
        if sig.var_id(name).is_none() {
            return Err(ScmError::Schema(format!("equation for unknown variable `{name}`")));
        }
    }

    CausalModel::new(sig, doc.contexts.clone(), tables)
}

pub fn model_to_doc(m: &CausalModel) -> ModelDoc {
    let sig = m.sig();
    let variables = sig
        .vars()
        .map(|v| VariableDoc { name: sig.name(v).to_string(), domain: sig.domain(v).to_vec() })
        .collect();
    let mut equations = BTreeMap::new();
    for y in sig.vars() {
        let table = m.table(y);
        let rules = table
            .rules
            .iter()
            .map(|r| {
                let mut when = BTreeMap::new();
                if let Some(c) = r.ctx {
                    when.insert(CTX_KEY.to_string(), m.contexts()[c as usize].clone());
                }
                for &(v, idx) in &r.conds {
                    when.insert(sig.name(v).to_string(), sig.domain_value(v, idx).to_string());
                }
                RuleDoc { when, then: sig.domain_value(y, r.then).to_string() }
            })
            .collect();
        equations.insert(
            sig.name(y).to_string(),
            EquationDoc { rules, default: sig.domain_value(y, table.default).to_string() },
        );
    }
    ModelDoc { variables, contexts: m.contexts().to_vec(), equations }
}

pub fn model_to_json(m: &CausalModel) -> String {
    // the document is built from validated model state, so it serializes
    serde_json::to_string_pretty(&model_to_doc(m)).unwrap()
}
