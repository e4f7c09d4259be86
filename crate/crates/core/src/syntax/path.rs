//! Addressing nodes of a method body by child-index paths.
//!
//! Child order per node:
//! - body root, blocks and `case` arms: their statements
//! - declaration: the initializers that are present
//! - `if`: condition, then-branch, else-branch (if any)
//! - `switch`: scrutinee, then one node per case arm
//! - `for`: init statements, condition (if any), updates, body
//! - `for-each`: iterable, body
//! - `while`: condition, body
//! - expression and `return` statements: their expression
//! - expressions: operands left to right

use serde::{Deserialize, Serialize};
use std::fmt;

use super::ast::*;
use super::SyntaxError;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        NodePath(v)
    }

    pub fn parent(&self) -> Option<(NodePath, usize)> {
        let (last, rest) = self.0.split_last()?;
        Some((NodePath(rest.to_vec()), *last))
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("/")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Read-only view of one addressable node.
#[derive(Debug, Clone, Copy)]
pub enum Node<'a> {
    Body(&'a [Stmt]),
    Stmt(&'a Stmt),
    Expr(&'a Expr),
    Case(&'a SwitchCase),
}

/// Mutable view of one addressable node.
#[derive(Debug)]
pub enum NodeMut<'a> {
    Body(&'a mut Vec<Stmt>),
    Stmt(&'a mut Stmt),
    Expr(&'a mut Expr),
    Case(&'a mut SwitchCase),
}

impl<'a> Node<'a> {
    pub fn children(self) -> Vec<Node<'a>> {
        match self {
            Node::Body(stmts) => stmts.iter().map(Node::Stmt).collect(),
            Node::Case(c) => c.body.iter().map(Node::Stmt).collect(),
            Node::Expr(e) => e.children().into_iter().map(Node::Expr).collect(),
            Node::Stmt(s) => match s {
                Stmt::Decl(d) => d
                    .declarators
                    .iter()
                    .filter_map(|d| d.init.as_ref().map(Node::Expr))
                    .collect(),
                Stmt::Expr(e) | Stmt::Return(e) => vec![Node::Expr(e)],
                Stmt::If(c, t, e) => {
                    let mut v = vec![Node::Expr(c), Node::Stmt(t)];
                    if let Some(e) = e {
                        v.push(Node::Stmt(e));
                    }
                    v
                }
                Stmt::Switch(scrutinee, cases) => std::iter::once(Node::Expr(scrutinee))
                    .chain(cases.iter().map(Node::Case))
                    .collect(),
                Stmt::For {
                    init,
                    cond,
                    update,
                    body,
                } => init
                    .iter()
                    .map(Node::Stmt)
                    .chain(cond.iter().map(Node::Expr))
                    .chain(update.iter().map(Node::Expr))
                    .chain(std::iter::once(Node::Stmt(body)))
                    .collect(),
                Stmt::Foreach { iterable, body, .. } => {
                    vec![Node::Expr(iterable), Node::Stmt(body)]
                }
                Stmt::While(c, body) => vec![Node::Expr(c), Node::Stmt(body)],
                Stmt::Break => vec![],
                Stmt::Block(stmts) => stmts.iter().map(Node::Stmt).collect(),
            },
        }
    }

    pub fn as_expr(self) -> Option<&'a Expr> {
        match self {
            Node::Expr(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_stmt(self) -> Option<&'a Stmt> {
        match self {
            Node::Stmt(s) => Some(s),
            _ => None,
        }
    }

    /// The statement list held by this node, if it holds one.
    pub fn stmt_list(self) -> Option<&'a [Stmt]> {
        match self {
            Node::Body(stmts) => Some(stmts),
            Node::Case(c) => Some(&c.body),
            Node::Stmt(Stmt::Block(stmts)) => Some(stmts),
            _ => None,
        }
    }
}

impl<'a> NodeMut<'a> {
    fn into_child(self, i: usize) -> Option<NodeMut<'a>> {
        match self {
            NodeMut::Body(stmts) => stmts.get_mut(i).map(NodeMut::Stmt),
            NodeMut::Case(c) => c.body.get_mut(i).map(NodeMut::Stmt),
            NodeMut::Expr(e) => e.children_mut().into_iter().nth(i).map(NodeMut::Expr),
            NodeMut::Stmt(s) => {
                let children: Vec<NodeMut<'a>> = match s {
                    Stmt::Decl(d) => d
                        .declarators
                        .iter_mut()
                        .filter_map(|d| d.init.as_mut().map(NodeMut::Expr))
                        .collect(),
                    Stmt::Expr(e) | Stmt::Return(e) => vec![NodeMut::Expr(e)],
                    Stmt::If(c, t, e) => {
                        let mut v = vec![NodeMut::Expr(c), NodeMut::Stmt(&mut **t)];
                        if let Some(e) = e {
                            v.push(NodeMut::Stmt(&mut **e));
                        }
                        v
                    }
                    Stmt::Switch(scrutinee, cases) => std::iter::once(NodeMut::Expr(scrutinee))
                        .chain(cases.iter_mut().map(NodeMut::Case))
                        .collect(),
                    Stmt::For {
                        init,
                        cond,
                        update,
                        body,
                    } => init
                        .iter_mut()
                        .map(NodeMut::Stmt)
                        .chain(cond.iter_mut().map(NodeMut::Expr))
                        .chain(update.iter_mut().map(NodeMut::Expr))
                        .chain(std::iter::once(NodeMut::Stmt(&mut **body)))
                        .collect(),
                    Stmt::Foreach { iterable, body, .. } => {
                        vec![NodeMut::Expr(iterable), NodeMut::Stmt(&mut **body)]
                    }
                    Stmt::While(c, body) => vec![NodeMut::Expr(c), NodeMut::Stmt(&mut **body)],
                    Stmt::Break => vec![],
                    Stmt::Block(stmts) => stmts.iter_mut().map(NodeMut::Stmt).collect(),
                };
                children.into_iter().nth(i)
            }
        }
    }

    pub fn stmt_list(self) -> Option<&'a mut Vec<Stmt>> {
        match self {
            NodeMut::Body(stmts) => Some(stmts),
            NodeMut::Case(c) => Some(&mut c.body),
            NodeMut::Stmt(Stmt::Block(stmts)) => Some(stmts),
            _ => None,
        }
    }
}

fn invalid(path: &NodePath) -> SyntaxError {
    SyntaxError::InvalidPath {
        path: path.to_string(),
    }
}

/// Resolves `path` against the method body.
pub fn resolve_path<'a>(ast: &'a MethodAst, path: &NodePath) -> Result<Node<'a>, SyntaxError> {
    let mut node = Node::Body(&ast.body);
    for &i in &path.0 {
        node = node
            .children()
            .into_iter()
            .nth(i)
            .ok_or_else(|| invalid(path))?;
    }
    Ok(node)
}

pub fn resolve_path_mut<'a>(
    ast: &'a mut MethodAst,
    path: &NodePath,
) -> Result<NodeMut<'a>, SyntaxError> {
    let mut node = NodeMut::Body(&mut ast.body);
    for &i in &path.0 {
        node = node.into_child(i).ok_or_else(|| invalid(path))?;
    }
    Ok(node)
}

pub fn expr_at<'a>(ast: &'a MethodAst, path: &NodePath) -> Option<&'a Expr> {
    resolve_path(ast, path).ok()?.as_expr()
}

pub fn expr_at_mut<'a>(ast: &'a mut MethodAst, path: &NodePath) -> Option<&'a mut Expr> {
    match resolve_path_mut(ast, path).ok()? {
        NodeMut::Expr(e) => Some(e),
        _ => None,
    }
}

pub fn stmt_at<'a>(ast: &'a MethodAst, path: &NodePath) -> Option<&'a Stmt> {
    resolve_path(ast, path).ok()?.as_stmt()
}

pub fn stmt_at_mut<'a>(ast: &'a mut MethodAst, path: &NodePath) -> Option<&'a mut Stmt> {
    match resolve_path_mut(ast, path).ok()? {
        NodeMut::Stmt(s) => Some(s),
        _ => None,
    }
}

/// The statement list addressed by `path` (body root, block, or case arm).
pub fn list_at_mut<'a>(ast: &'a mut MethodAst, path: &NodePath) -> Option<&'a mut Vec<Stmt>> {
    resolve_path_mut(ast, path).ok()?.stmt_list()
}

pub fn list_at<'a>(ast: &'a MethodAst, path: &NodePath) -> Option<&'a [Stmt]> {
    resolve_path(ast, path).ok()?.stmt_list()
}

/// Context of an expression position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExprCtx {
    /// Minimum precedence an unparenthesized expression needs here.
    pub req: u8,
    /// Whether the position must hold an assignable location.
    pub lvalue: bool,
    /// Whether the expression is the top of an expression statement or a
    /// for-update, so its value is discarded.
    pub value_unused: bool,
}

impl ExprCtx {
    pub const TOP: ExprCtx = ExprCtx {
        req: 0,
        lvalue: false,
        value_unused: false,
    };
}

/// Requirements a parent expression imposes on its `i`-th operand.
pub fn operand_ctx(parent: &Expr, i: usize) -> ExprCtx {
    let mut ctx = ExprCtx::TOP;
    ctx.req = match parent {
        Expr::Paren(_) => 0,
        Expr::Unary(..) | Expr::Cast(..) => prec::UNARY,
        Expr::IncDec(..) => {
            ctx.lvalue = true;
            prec::POSTFIX
        }
        Expr::Binary(op, ..) => {
            if i == 0 {
                op.precedence()
            } else {
                op.precedence() + 1
            }
        }
        Expr::Ternary(..) => match i {
            0 => prec::OR,
            1 => 0,
            _ => prec::TERNARY,
        },
        Expr::Assign(..) => {
            if i == 0 {
                ctx.lvalue = true;
                prec::POSTFIX
            } else {
                prec::ASSIGN
            }
        }
        Expr::NewArray(..) | Expr::ArrayInit(..) => prec::ASSIGN,
        Expr::Index(..) => {
            if i == 0 {
                prec::POSTFIX
            } else {
                0
            }
        }
        Expr::Length(_) => prec::POSTFIX,
        Expr::Lit(_) | Expr::Var(_) => 0,
    };
    ctx
}

/// Whether `e` may appear unparenthesized where `ctx` applies.
pub fn fits(e: &Expr, ctx: ExprCtx) -> bool {
    if ctx.lvalue {
        return matches!(e, Expr::Var(_) | Expr::Index(..));
    }
    e.precedence() >= ctx.req
}

/// Wraps `e` in parentheses when its context requires them.
pub fn place(e: Expr, ctx: ExprCtx) -> Expr {
    if fits(&e, ctx) {
        e
    } else {
        Expr::paren(e)
    }
}

/// Strips a parenthesis that the context makes necessary, yielding the
/// expression it protects.
pub fn strip_required(e: &Expr, ctx: ExprCtx) -> &Expr {
    match e {
        Expr::Paren(inner) if !ctx.lvalue && !fits(inner, ctx) => inner,
        e => e,
    }
}

/// Preorder traversal of every node, reporting paths and, for expressions,
/// their context.
pub fn walk<'a>(ast: &'a MethodAst, f: &mut impl FnMut(&NodePath, Node<'a>, ExprCtx)) {
    let mut path = NodePath::root();
    walk_node(Node::Body(&ast.body), &mut path, ExprCtx::TOP, f);
}

fn walk_node<'a>(
    node: Node<'a>,
    path: &mut NodePath,
    ctx: ExprCtx,
    f: &mut impl FnMut(&NodePath, Node<'a>, ExprCtx),
) {
    f(path, node, ctx);
    let children = node.children();
    for (i, child) in children.into_iter().enumerate() {
        let child_ctx = match (node, child) {
            (Node::Expr(parent), Node::Expr(_)) => operand_ctx(parent, i),
            (Node::Stmt(Stmt::Expr(_)), Node::Expr(_)) => ExprCtx {
                value_unused: true,
                ..ExprCtx::TOP
            },
            (Node::Stmt(Stmt::For { init, cond, .. }), Node::Expr(_)) => {
                let cond_at = init.len();
                let is_update = if cond.is_some() { i > cond_at } else { i >= cond_at };
                ExprCtx {
                    value_unused: is_update,
                    ..ExprCtx::TOP
                }
            }
            _ => ExprCtx::TOP,
        };
        path.0.push(i);
        walk_node(child, path, child_ctx, f);
        path.0.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_method;

    #[test]
    fn empty_path_is_body_root() {
        let m = parse_method("int f(int x){return x;}").unwrap();
        assert!(matches!(resolve_path(&m, &NodePath::root()), Ok(Node::Body(b)) if b.len() == 1));
    }

    #[test]
    fn single_statement_child() {
        let m = parse_method("int f(int x){return x;}").unwrap();
        let n = resolve_path(&m, &NodePath(vec![0])).unwrap();
        assert!(matches!(n, Node::Stmt(Stmt::Return(_))));
    }

    #[test]
    fn out_of_range_is_invalid_path() {
        let m = parse_method("int f(int x){return x;}").unwrap();
        assert!(matches!(
            resolve_path(&m, &NodePath(vec![5])),
            Err(SyntaxError::InvalidPath { .. })
        ));
    }

    #[test]
    fn walk_reports_update_context() {
        let m = parse_method("int f(int n){int s = 0; for(int i=0;i<n;i++){s+=i;} return s;}")
            .unwrap();
        let mut unused = Vec::new();
        walk(&m, &mut |p, node, ctx| {
            if let Node::Expr(Expr::IncDec(..)) = node {
                unused.push((p.clone(), ctx.value_unused));
            }
        });
        assert_eq!(unused, vec![(NodePath(vec![1, 2]), true)]);
    }

    #[test]
    fn mutable_and_shared_resolution_agree() {
        let mut m =
            parse_method("int f(int x){if(x>0){x=x+1;}else{x=2;} return x;}").unwrap();
        let p = NodePath(vec![0, 1, 0, 0, 1]);
        let before = expr_at(&m, &p).cloned().unwrap();
        assert_eq!(before, crate::syntax::parse_expr("x + 1").unwrap());
        *expr_at_mut(&mut m, &p).unwrap() = Expr::var("x");
        assert_eq!(expr_at(&m, &p), Some(&Expr::var("x")));
    }
}
