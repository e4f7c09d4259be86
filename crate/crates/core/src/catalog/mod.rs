//! The catalog of behavior-preserving operations.
//!
//! Each rule has an expression or statement schema (`lhs` to `rhs`) and
//! static guards. Expression schemas are matched by the schema engine in
//! [`pattern`]; rules whose shape spans statements, scopes or names are
//! hand-written matchers that implement the schema they document.

pub mod analysis;
mod engine;
mod expr_rules;
mod name_rules;
pub mod pattern;
mod stmt_rules;

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{check_method, print_method, MethodAst, NodePath};
use engine::{apply_change, with_kept_parens, Ctx, Raw};
pub use pattern::{parse_pattern, Pattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    /// Refactorings a method-level differencing detector reports.
    Detector,
    /// The wider catalog of micro-operations.
    Extended,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Detector => "detector",
            Tier::Extended => "extended",
        })
    }
}

/// Kinds of static precondition a rule checks before it fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Guard {
    /// Operand or variable types restrict where the rule is valid.
    Typing,
    /// Moved, duplicated or reordered expressions must be pure.
    Purity,
    /// Rewritten literal arithmetic must stay in range.
    NonOverflow,
    /// The expression's value must be discarded.
    ValueUnused,
    /// Names must be fresh, unused, or not reassigned.
    Binding,
    /// Control flow must not change (returns, breaks, disjoint arms).
    ControlFlow,
}

/// One behavior-preserving operation.
pub struct RewriteRule {
    pub id: &'static str,
    pub name: &'static str,
    pub tier: Tier,
    pub lhs: &'static str,
    pub rhs: &'static str,
    pub guards: &'static [Guard],
    /// Id of the reverse rule, when the catalog has one. Self-inverse rules
    /// name themselves.
    pub inverse: Option<&'static str>,
    imp: Imp,
}

impl fmt::Debug for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RewriteRule")
            .field("id", &self.id)
            .field("tier", &self.tier)
            .finish_non_exhaustive()
    }
}

pub(crate) type Matcher = fn(&Ctx) -> Vec<Raw>;

enum Imp {
    Schema(Vec<expr_rules::SchemaCase>),
    Native(Matcher),
}

impl RewriteRule {
    pub fn invertible(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn inverse_rule(&self) -> Option<&'static RewriteRule> {
        self.inverse.and_then(rule)
    }

    fn raw(&self, ctx: &Ctx) -> Vec<Raw> {
        let raws = match &self.imp {
            Imp::Schema(cases) => expr_rules::schema_matches(ctx, cases),
            Imp::Native(f) => f(ctx),
        };
        with_kept_parens(ctx, raws)
    }
}

/// One concrete instantiation of a rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchSite {
    pub rule_id: String,
    pub path: NodePath,
    /// Placeholder bindings, rendered as source text.
    pub bindings: BTreeMap<String, String>,
    #[serde(skip)]
    source: Option<u64>,
    #[serde(skip)]
    result: Option<Arc<MethodAst>>,
}

impl PartialEq for MatchSite {
    fn eq(&self, other: &Self) -> bool {
        self.rule_id == other.rule_id && self.path == other.path && self.bindings == other.bindings
    }
}

impl Eq for MatchSite {}

impl MatchSite {
    /// The rewritten method, when this site came from matching in this
    /// process.
    pub fn preview(&self) -> Option<&MethodAst> {
        self.result.as_deref()
    }
}

impl fmt::Display for MatchSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.rule_id, self.path)?;
        for (k, v) in &self.bindings {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown rule '{0}'")]
    UnknownRule(String),
    #[error("site {path} for {rule_id} does not match the method")]
    StaleSite { rule_id: String, path: NodePath },
    #[error("guard of {rule_id} fails at {path}")]
    GuardViolation { rule_id: String, path: NodePath },
    #[error("method does not type-check: {0}")]
    IllTyped(String),
}

fn fingerprint(m: &MethodAst) -> u64 {
    let mut h = DefaultHasher::new();
    m.hash(&mut h);
    h.finish()
}

/// All rules, ordered by id.
pub fn list_rules() -> &'static [RewriteRule] {
    static RULES: OnceLock<Vec<RewriteRule>> = OnceLock::new();
    RULES.get_or_init(|| {
        let mut rules = Vec::new();
        rules.extend(name_rules::rules());
        rules.extend(expr_rules::rules());
        rules.extend(stmt_rules::rules());
        rules.sort_by_key(|r| r.id);
        rules
    })
}

pub fn rule(id: &str) -> Option<&'static RewriteRule> {
    let rules = list_rules();
    rules
        .binary_search_by_key(&id, |r| r.id)
        .ok()
        .map(|i| &rules[i])
}

/// Rules of the given tiers, ordered by id.
pub fn rules_in(tiers: &[Tier]) -> Vec<&'static RewriteRule> {
    list_rules().iter().filter(|r| tiers.contains(&r.tier)).collect()
}

/// Matching state for one method and an optional target, reusable across
/// rules.
pub struct MatchContext<'a> {
    ctx: Option<Ctx<'a>>,
    source: u64,
    printed: String,
}

impl<'a> MatchContext<'a> {
    /// A method that does not type-check has no candidates.
    pub fn new(ast: &'a MethodAst, target: Option<&'a MethodAst>) -> MatchContext<'a> {
        MatchContext {
            ctx: Ctx::new(ast, target),
            source: fingerprint(ast),
            printed: print_method(ast),
        }
    }

    /// Sites of `rule` whose rewrite type-checks and changes the method,
    /// each paired with the rewritten method, in document order.
    pub fn candidates(&self, rule: &RewriteRule) -> Vec<(MatchSite, MethodAst)> {
        let Some(ctx) = &self.ctx else {
            return Vec::new();
        };
        let mut out: Vec<(MatchSite, MethodAst)> = Vec::new();
        let mut results = std::collections::HashSet::new();
        for raw in rule.raw(ctx) {
            if !raw.guard_ok {
                continue;
            }
            let Some(result) = apply_change(ctx.ast, &raw.path, &raw.change) else {
                continue;
            };
            let printed = print_method(&result);
            if printed == self.printed || results.contains(&printed) || check_method(&result).is_err() {
                continue;
            }
            let site = MatchSite {
                rule_id: rule.id.to_string(),
                path: raw.path,
                bindings: raw.bindings,
                source: Some(self.source),
                result: None,
            };
            if out.iter().any(|(s, _)| *s == site) {
                continue;
            }
            results.insert(printed);
            out.push((site, result));
        }
        out.sort_by(|a, b| a.0.path.cmp(&b.0.path));
        for (site, result) in &mut out {
            site.result = Some(Arc::new(result.clone()));
        }
        out
    }
}

/// Sites where `rule` applies to `ast`. With a target, fresh names and
/// fragments are drawn from it.
pub fn find_matches(rule: &RewriteRule, ast: &MethodAst, target: Option<&MethodAst>) -> Vec<MatchSite> {
    MatchContext::new(ast, target)
        .candidates(rule)
        .into_iter()
        .map(|(s, _)| s)
        .collect()
}

/// Applies a site produced by [`find_matches`] on `ast`.
pub fn apply_match(ast: &MethodAst, site: &MatchSite) -> Result<MethodAst, CatalogError> {
    let r = rule(&site.rule_id).ok_or_else(|| CatalogError::UnknownRule(site.rule_id.clone()))?;
    let stale = || CatalogError::StaleSite {
        rule_id: site.rule_id.clone(),
        path: site.path.clone(),
    };
    let violation = || CatalogError::GuardViolation {
        rule_id: site.rule_id.clone(),
        path: site.path.clone(),
    };
    if site.source.is_some_and(|s| s != fingerprint(ast)) {
        return Err(stale());
    }
    check_method(ast).map_err(|e| CatalogError::IllTyped(e.to_string()))?;
    // Re-derive the site. Matching against the expected result as target
    // recovers any fresh names or fragments the original match drew.
    let hint = site.result.as_deref();
    let ctx = Ctx::new(ast, hint).ok_or_else(stale)?;
    let mut seen = false;
    for raw in r.raw(&ctx) {
        if raw.path != site.path || raw.bindings != site.bindings {
            continue;
        }
        seen = true;
        if !raw.guard_ok {
            return Err(violation());
        }
        let Some(out) = apply_change(ast, &raw.path, &raw.change) else {
            continue;
        };
        if hint.is_some_and(|h| *h != out) {
            continue;
        }
        check_method(&out).map_err(|e| CatalogError::IllTyped(e.to_string()))?;
        if print_method(&out) == print_method(ast) {
            return Err(violation());
        }
        return Ok(out);
    }
    Err(if seen { violation() } else { stale() })
}

#[cfg(test)]
mod tests;
