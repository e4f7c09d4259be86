//! Random generator of well-typed, terminating MiniJ methods.
//!
//! Methods are emitted as source text and then parsed, so every result has
//! passed the type checker. Loops are bounded by a constant or an array
//! length and never write their counters, so every method terminates.
//! The shapes drawn here are the ones the catalog rewrites: guard clauses,
//! equality chains, switches, index loops, ternaries, compound
//! assignments, casts, multi-declarator declarations and so on.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{parse_method, MethodAst};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// Bounds on the number of top-level statements, return included.
    pub min_stmts: usize,
    pub max_stmts: usize,
    /// Maximum statement nesting.
    pub max_depth: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            min_stmts: 3,
            max_stmts: 12,
            max_depth: 2,
        }
    }
}

/// A random method for `seed` under the default configuration.
pub fn random_method(seed: u64) -> MethodAst {
    random_method_with(&mut ChaCha8Rng::seed_from_u64(seed), &SynthConfig::default())
}

pub fn random_method_with<R: Rng>(rng: &mut R, cfg: &SynthConfig) -> MethodAst {
    loop {
        let src = Gen::new(rng, cfg).method();
        match parse_method(&src) {
            Ok(m) => return m,
            Err(e) => log::debug!("discarding generated method ({e}):\n{src}"),
        }
    }
}

/// Source text of a random method; may occasionally fail to type-check.
pub fn random_source<R: Rng>(rng: &mut R, cfg: &SynthConfig) -> String {
    Gen::new(rng, cfg).method()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Long,
    Double,
    Bool,
    Str,
    IntArr,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Int => "int",
            Ty::Long => "long",
            Ty::Double => "double",
            Ty::Bool => "boolean",
            Ty::Str => "String",
            Ty::IntArr => "int[]",
        }
    }
}

const NAMES: &[&str] = &[
    "a", "b", "c", "n", "m", "x", "y", "z", "sum", "acc", "count", "total", "p", "q", "r", "s",
    "u", "lo", "hi", "step", "flag", "ok", "best", "cur", "prod", "diff", "len", "mid", "base",
    "bound", "lim", "off", "num", "den", "cnt", "hit", "seen", "left", "right", "top",
];

// Binary precedences, mirroring the printer's table.
const P_TERNARY: u8 = 2;
const P_OR: u8 = 3;
const P_EQ: u8 = 5;
const P_REL: u8 = 6;
const P_ADD: u8 = 7;
const P_MUL: u8 = 8;
const P_UNARY: u8 = 9;
const P_ATOM: u8 = 11;

type Frag = (String, u8);

struct Var {
    name: String,
    ty: Ty,
    frozen: bool,
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    cfg: &'a SynthConfig,
    scopes: Vec<Vec<Var>>,
    used: HashSet<String>,
    fresh: usize,
    ret: Ty,
}

impl<'a, R: Rng> Gen<'a, R> {
    fn new(rng: &'a mut R, cfg: &'a SynthConfig) -> Self {
        Gen {
            rng,
            cfg,
            scopes: vec![Vec::new()],
            used: HashSet::new(),
            fresh: 0,
            ret: Ty::Int,
        }
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn name(&mut self) -> String {
        let free: Vec<&str> = NAMES.iter().copied().filter(|n| !self.used.contains(*n)).collect();
        let n = match free.choose(self.rng) {
            Some(n) => n.to_string(),
            None => {
                self.fresh += 1;
                format!("v{}", self.fresh)
            }
        };
        self.used.insert(n.clone());
        n
    }

    fn declare(&mut self, name: &str, ty: Ty, frozen: bool) {
        self.scopes.last_mut().unwrap().push(Var {
            name: name.to_string(),
            ty,
            frozen,
        });
    }

    fn vars(&self, ty: Ty, writable: bool) -> Vec<String> {
        self.scopes
            .iter()
            .flatten()
            .filter(|v| v.ty == ty && (!writable || !v.frozen))
            .map(|v| v.name.clone())
            .collect()
    }

    fn pick(&mut self, ty: Ty, writable: bool) -> Option<String> {
        self.vars(ty, writable).choose(self.rng).cloned()
    }

    fn method(mut self) -> String {
        let mname = ["f", "compute", "calc", "eval", "score", "apply", "check", "run", "pick"]
            .choose(self.rng)
            .unwrap()
            .to_string();
        self.ret = *[Ty::Int, Ty::Int, Ty::Int, Ty::Int, Ty::Long, Ty::Bool, Ty::Double, Ty::Str]
            .choose(self.rng)
            .unwrap();
        let nparams = self.rng.gen_range(1..=3);
        let mut params = Vec::new();
        for i in 0..nparams {
            let ty = if i == 0 {
                Ty::Int
            } else {
                *[Ty::Int, Ty::Int, Ty::IntArr, Ty::IntArr, Ty::Bool, Ty::Long, Ty::Double, Ty::Str]
                    .choose(self.rng)
                    .unwrap()
            };
            let name = self.name();
            let fin = self.chance(0.1);
            self.declare(&name, ty, fin);
            let pre = if fin { "final " } else { "" };
            params.push(if ty == Ty::IntArr && self.chance(0.3) {
                format!("{pre}int {name}[]")
            } else {
                format!("{pre}{} {name}", ty.name())
            });
        }
        let target = self.rng.gen_range(self.cfg.min_stmts..=self.cfg.max_stmts).max(1);
        let mut body = Vec::new();
        while body.len() + 1 < target {
            body.extend(self.stmt(0));
        }
        body.extend(self.tail());
        format!(
            "{} {mname}({}) {{\n{}\n}}\n",
            self.ret.name(),
            params.join(", "),
            body.join("\n")
        )
    }

    // ---- statements -------------------------------------------------------

    fn stmt(&mut self, depth: usize) -> Vec<String> {
        let nested = depth < self.cfg.max_depth;
        loop {
            let k = self.rng.gen_range(0..100);
            let out = match k {
                0..=21 => Some(self.decl()),
                22..=37 => self.assign(),
                38..=47 if nested => self.if_else(depth),
                48..=53 if nested => self.cond_assign(),
                54..=58 if nested => self.chain(depth),
                59..=62 if nested => self.switch(depth),
                63..=68 if nested => self.index_loop(depth),
                69..=72 if nested => self.foreach(depth),
                73..=75 if nested => self.while_loop(depth),
                76..=80 => self.pre_assign(),
                81..=84 => self.chained_assign(),
                85..=88 => self.incdec(),
                89..=91 if nested => self.block(depth),
                92..=95 if nested => self.split_cond(depth),
                96..=97 if nested => self.same_arms(),
                98..=99 if nested => self.dead(depth),
                _ => self.assign(),
            };
            if let Some(s) = out {
                return s;
            }
        }
    }

    fn body(&mut self, depth: usize, max: usize) -> Vec<String> {
        self.scopes.push(Vec::new());
        let n = self.rng.gen_range(1..=max);
        let mut out = Vec::new();
        for _ in 0..n {
            out.extend(self.stmt(depth + 1));
        }
        self.scopes.pop();
        out
    }

    fn braced(&mut self, stmts: Vec<String>) -> String {
        let simple = |s: &str| !s.contains('\n') && !s.starts_with("if") && s.ends_with(';');
        if stmts.len() == 1 && simple(&stmts[0]) && !is_decl(&stmts[0]) && self.chance(0.4) {
            return stmts[0].clone();
        }
        format!("{{\n{}\n}}", stmts.join("\n"))
    }

    fn decl(&mut self) -> Vec<String> {
        let ty = *[Ty::Int, Ty::Int, Ty::Int, Ty::Int, Ty::Long, Ty::Bool, Ty::Double, Ty::Str, Ty::IntArr]
            .choose(self.rng)
            .unwrap();
        let name = self.name();
        let fin = self.chance(0.12);
        let pre = if fin { "final " } else { "" };
        if ty == Ty::IntArr {
            let init = if self.chance(0.6) {
                let n = self.rng.gen_range(0..=4);
                let elems: Vec<String> = (0..n).map(|_| self.int_lit()).collect();
                format!("new int[]{{{}}}", elems.join(", "))
            } else {
                format!("new int[{}]", self.rng.gen_range(0..=5))
            };
            self.declare(&name, ty, fin);
            return vec![if self.chance(0.3) {
                format!("{pre}int {name}[] = {init};")
            } else {
                format!("{pre}int[] {name} = {init};")
            }];
        }
        let init = self.expr(ty, 2).0;
        if !fin && self.chance(0.2) {
            // Declaration and initialization split.
            self.declare(&name, ty, false);
            return vec![format!("{} {name};", ty.name()), format!("{name} = {init};")];
        }
        if ty == Ty::Int && self.chance(0.25) {
            let other = self.name();
            let init2 = self.expr(ty, 1).0;
            self.declare(&name, ty, fin);
            self.declare(&other, ty, fin);
            let second = if !fin && self.chance(0.3) {
                other
            } else {
                format!("{other} = {init2}")
            };
            return vec![format!("{pre}int {name} = {init}, {second};")];
        }
        self.declare(&name, ty, fin);
        vec![format!("{pre}{} {name} = {init};", ty.name())]
    }

    fn assign(&mut self) -> Option<Vec<String>> {
        let ty = *[Ty::Int, Ty::Int, Ty::Int, Ty::Long, Ty::Bool, Ty::Double, Ty::Str]
            .choose(self.rng)
            .unwrap();
        let v = self.pick(ty, true)?;
        let s = match ty {
            Ty::Int | Ty::Long => {
                let op = *["+", "+", "-", "*", "/", "%"].choose(self.rng).unwrap();
                let op = if matches!(op, "/" | "%") && self.chance(0.6) { "+" } else { op };
                let e = self.operand(Ty::Int, 1, P_MUL + 1);
                match self.rng.gen_range(0..4) {
                    0 => format!("{v} {op}= {e};"),
                    1 => format!("{v} = {v} {op} {e};"),
                    _ => format!("{v} = {};", self.expr(ty, 2).0),
                }
            }
            Ty::Str if self.chance(0.5) => format!("{v} += {};", self.expr(Ty::Int, 1).0),
            _ => format!("{v} = {};", self.expr(ty, 2).0),
        };
        Some(vec![s])
    }

    fn incdec(&mut self) -> Option<Vec<String>> {
        let v = self.pick(Ty::Int, true)?;
        Some(vec![match self.rng.gen_range(0..4) {
            0 => format!("{v}++;"),
            1 => format!("++{v};"),
            2 => format!("{v}--;"),
            _ => format!("--{v};"),
        }])
    }

    fn chained_assign(&mut self) -> Option<Vec<String>> {
        let vs = self.vars(Ty::Int, true);
        if vs.len() < 2 {
            return None;
        }
        let mut two: Vec<String> = vs.choose_multiple(self.rng, 2).cloned().collect();
        let b = two.pop().unwrap();
        let a = two.pop().unwrap();
        let e = self.expr(Ty::Int, 1).0;
        Some(vec![format!("{a} = {b} = {e};")])
    }

    fn pre_assign(&mut self) -> Option<Vec<String>> {
        let ty = *[Ty::Int, Ty::Int, Ty::Long, Ty::Bool].choose(self.rng).unwrap();
        let x = self.pick(ty, true)?;
        let c = self.cond(1);
        let d = self.expr(ty, 1).0;
        let v = self.expr(ty, 1).0;
        Some(if self.chance(0.5) {
            vec![format!("{x} = {d};"), format!("if ({c}) {x} = {v};")]
        } else {
            vec![format!("if ({c}) {{\n{x} = {v};\n}} else {{\n{x} = {d};\n}}")]
        })
    }

    fn cond_assign(&mut self) -> Option<Vec<String>> {
        let ty = *[Ty::Int, Ty::Int, Ty::Long, Ty::Str].choose(self.rng).unwrap();
        let x = self.pick(ty, true)?;
        let c = self.cond(1);
        let a = self.expr(ty, 1).0;
        let b = self.expr(ty, 1).0;
        Some(vec![match self.rng.gen_range(0..3) {
            0 => format!("{x} = {c} ? {a} : {b};"),
            1 => format!("if ({c}) {x} = {a}; else {x} = {b};"),
            _ => format!("if ({c}) {{\n{x} = {a};\n}} else {{\n{x} = {b};\n}}"),
        }])
    }

    fn if_else(&mut self, depth: usize) -> Option<Vec<String>> {
        let c = self.cond(2);
        let then = self.body(depth, 2);
        let then = self.braced(then);
        if self.chance(0.4) {
            return Some(vec![format!("if ({c}) {then}")]);
        }
        let els = self.body(depth, 2);
        let els = self.braced(els);
        Some(vec![format!("if ({c}) {then} else {els}")])
    }

    fn split_cond(&mut self, depth: usize) -> Option<Vec<String>> {
        let a = self.cond(1);
        let b = self.cond(1);
        let op = if self.chance(0.5) { "||" } else { "&&" };
        let then = self.body(depth, 2);
        Some(vec![format!("if ({}) {{\n{}\n}}", bin(&a, op, &b), then.join("\n"))])
    }

    fn same_arms(&mut self) -> Option<Vec<String>> {
        let a = self.cond(1);
        let b = self.cond(1);
        // Arms share their text, so they must not declare anything.
        let n = self.rng.gen_range(1..=2);
        let mut then = Vec::new();
        for _ in 0..20 {
            if then.len() >= n {
                break;
            }
            let s = if self.chance(0.7) { self.assign() } else { self.incdec() };
            then.extend(s.into_iter().flatten());
        }
        if then.is_empty() {
            return None;
        }
        let then = self.braced(then);
        Some(vec![format!("if ({a}) {then} else if ({b}) {then}")])
    }

    fn dead(&mut self, depth: usize) -> Option<Vec<String>> {
        let b = self.body(depth, 2);
        Some(vec![format!("if (false) {{\n{}\n}}", b.join("\n"))])
    }

    fn block(&mut self, depth: usize) -> Option<Vec<String>> {
        let b = self.body(depth, 2);
        Some(vec![format!("{{\n{}\n}}", b.join("\n"))])
    }

    fn chain(&mut self, depth: usize) -> Option<Vec<String>> {
        let k = self.pick(Ty::Int, false)?;
        let arms = self.rng.gen_range(2..=4);
        let mut lits: Vec<i32> = (0..arms).map(|i| i as i32 + self.rng.gen_range(-1..=2)).collect();
        lits.sort();
        lits.dedup();
        lits.shuffle(self.rng);
        let mut s = String::new();
        for (i, l) in lits.iter().enumerate() {
            let b = self.body(depth, 2);
            if i > 0 {
                s.push_str(" else ");
            }
            let test = if self.chance(0.85) {
                format!("{k} == {l}")
            } else {
                format!("{l} == {k}")
            };
            s.push_str(&format!("if ({test}) {{\n{}\n}}", b.join("\n")));
        }
        if self.chance(0.7) {
            let b = self.body(depth, 2);
            s.push_str(&format!(" else {{\n{}\n}}", b.join("\n")));
        }
        Some(vec![s])
    }

    fn switch(&mut self, depth: usize) -> Option<Vec<String>> {
        let k = self.pick(Ty::Int, false)?;
        let arms = self.rng.gen_range(1..=3);
        let mut lits: Vec<i32> = (0..arms).map(|i| i as i32 * 2 + self.rng.gen_range(0..=1)).collect();
        lits.dedup();
        let mut s = format!("switch ({k}) {{\n");
        for l in &lits {
            let b = self.body(depth, 2);
            s.push_str(&format!("case {l}:\n{}\nbreak;\n", b.join("\n")));
        }
        if self.chance(0.6) {
            let b = self.body(depth, 2);
            s.push_str(&format!("default:\n{}\n", b.join("\n")));
        }
        s.push('}');
        Some(vec![s])
    }

    fn index_loop(&mut self, depth: usize) -> Option<Vec<String>> {
        let arr = self.pick(Ty::IntArr, false);
        let acc = self.pick(Ty::Int, true)?;
        let i = self.name();
        self.scopes.push(Vec::new());
        self.declare(&i, Ty::Int, true);
        let out = match arr {
            Some(arr) if self.chance(0.75) => {
                let op = *["+=", "-=", "="].choose(self.rng).unwrap();
                let extra = if self.chance(0.4) {
                    let e = self.body(depth, 1);
                    format!("\n{}", e.join("\n"))
                } else {
                    String::new()
                };
                let inc = if self.chance(0.8) { format!("{i}++") } else { format!("++{i}") };
                format!("for (int {i} = 0; {i} < {arr}.length; {inc}) {{\n{acc} {op} {arr}[{i}];{extra}\n}}")
            }
            _ => {
                let n = self.rng.gen_range(1..=6);
                let b = self.body(depth, 2);
                format!("for (int {i} = 0; {i} < {n}; {i}++) {{\n{}\n}}", b.join("\n"))
            }
        };
        self.scopes.pop();
        Some(vec![out])
    }

    fn foreach(&mut self, depth: usize) -> Option<Vec<String>> {
        let arr = self.pick(Ty::IntArr, false)?;
        let acc = self.pick(Ty::Int, true)?;
        let e = self.name();
        self.scopes.push(Vec::new());
        self.declare(&e, Ty::Int, true);
        let fin = if self.chance(0.2) { "final " } else { "" };
        let extra = if self.chance(0.3) {
            format!("\n{}", self.body(depth, 1).join("\n"))
        } else {
            String::new()
        };
        let op = *["+=", "-=", "*="].choose(self.rng).unwrap();
        self.scopes.pop();
        Some(vec![format!("for ({fin}int {e} : {arr}) {{\n{acc} {op} {e};{extra}\n}}")])
    }

    fn while_loop(&mut self, depth: usize) -> Option<Vec<String>> {
        let k = self.name();
        let n = self.rng.gen_range(1..=5);
        self.declare(&k, Ty::Int, false);
        // The counter is frozen inside the body.
        self.scopes.push(Vec::new());
        for v in self.scopes.iter_mut().flatten() {
            if v.name == k {
                v.frozen = true;
            }
        }
        let b = self.body(depth, 2);
        self.scopes.pop();
        for v in self.scopes.iter_mut().flatten() {
            if v.name == k {
                v.frozen = false;
            }
        }
        Some(vec![
            format!("int {k} = 0;"),
            format!("while ({k} < {n}) {{\n{}\n{k}++;\n}}", b.join("\n")),
        ])
    }

    fn tail(&mut self) -> Vec<String> {
        let ret = self.ret;
        match self.rng.gen_range(0..10) {
            0..=2 => {
                let c = self.cond(2);
                let a = self.expr(ret, 2).0;
                let b = self.expr(ret, 2).0;
                vec![format!("if ({c}) {{\nreturn {a};\n}}"), format!("return {b};")]
            }
            3..=4 => {
                let c = self.cond(2);
                let a = self.expr(ret, 2).0;
                self.scopes.push(Vec::new());
                let mut els = Vec::new();
                if self.chance(0.6) {
                    els.extend(self.stmt(self.cfg.max_depth));
                }
                els.push(format!("return {};", self.expr(ret, 2).0));
                self.scopes.pop();
                vec![format!("if ({c}) {{\nreturn {a};\n}} else {{\n{}\n}}", els.join("\n"))]
            }
            5..=6 => {
                let r = self.name();
                let e = self.expr(ret, 2).0;
                vec![format!("{} {r} = {e};", ret.name()), format!("return {r};")]
            }
            _ => vec![format!("return {};", self.expr(ret, 3).0)],
        }
    }

    // ---- expressions ------------------------------------------------------

    fn int_lit(&mut self) -> String {
        match self.rng.gen_range(0..20) {
            0 => format!("0x{:X}", self.rng.gen_range(1..300)),
            1 => "1_000".to_string(),
            2 => format!("{}", self.rng.gen_range(100..5000)),
            _ => format!("{}", self.rng.gen_range(0..10)),
        }
    }

    /// An expression of `ty` wrapped in parentheses when its precedence is
    /// below `min`, and now and then when it is not.
    fn operand(&mut self, ty: Ty, depth: usize, min: u8) -> String {
        let (s, p) = self.expr(ty, depth);
        if p < min || (p < P_ATOM && self.chance(0.08)) {
            format!("({s})")
        } else {
            s
        }
    }

    fn expr(&mut self, ty: Ty, depth: usize) -> Frag {
        match ty {
            Ty::Int => self.int_expr(depth),
            Ty::Long => self.long_expr(depth),
            Ty::Double => self.double_expr(depth),
            Ty::Bool => (self.cond(depth), P_OR),
            Ty::Str => self.str_expr(depth),
            Ty::IntArr => (self.pick(Ty::IntArr, false).unwrap_or_else(|| "new int[2]".into()), P_ATOM),
        }
    }

    fn int_atom(&mut self) -> Frag {
        let k = self.rng.gen_range(0..10);
        if k < 5 {
            if let Some(v) = self.pick(Ty::Int, false) {
                return (v, P_ATOM);
            }
        }
        if k == 5 {
            if let Some(a) = self.pick(Ty::IntArr, false) {
                return (format!("{a}.length"), P_ATOM);
            }
        }
        if k == 6 {
            if let Some(l) = self.pick(Ty::Long, false) {
                return (format!("(int) {l}"), P_UNARY);
            }
        }
        (self.int_lit(), P_ATOM)
    }

    fn int_expr(&mut self, depth: usize) -> Frag {
        if depth == 0 || self.chance(0.35) {
            return self.int_atom();
        }
        match self.rng.gen_range(0..20) {
            0..=11 => {
                let op = *["+", "+", "+", "-", "-", "*", "*", "/", "%"].choose(self.rng).unwrap();
                let p = if matches!(op, "+" | "-") { P_ADD } else { P_MUL };
                let l = self.operand(Ty::Int, depth - 1, p);
                let r = self.operand(Ty::Int, depth - 1, p + 1);
                (format!("{l} {op} {r}"), p)
            }
            12..=13 => {
                // Shared coefficient.
                let c = self.int_lit();
                let a = self.operand(Ty::Int, depth - 1, P_MUL + 1);
                let b = self.operand(Ty::Int, depth - 1, P_MUL + 1);
                (format!("{c} * {a} + {c} * {b}"), P_ADD)
            }
            14 => {
                let e = self.operand(Ty::Int, depth - 1, P_UNARY);
                let e = if e.starts_with('-') { format!("({e})") } else { e };
                (format!("-{e}"), P_UNARY)
            }
            15 => {
                let e = self.operand(Ty::Int, depth - 1, P_UNARY);
                (format!("(int) {e}"), P_UNARY)
            }
            16..=17 => {
                let c = self.cond(depth - 1);
                let c = if c.contains("||") || c.contains("&&") || c.contains('?') { format!("({c})") } else { c };
                let a = self.operand(Ty::Int, depth - 1, P_OR);
                let b = self.operand(Ty::Int, depth - 1, P_TERNARY);
                (format!("{c} ? {a} : {b}"), P_TERNARY)
            }
            18 => match self.pick(Ty::IntArr, false) {
                Some(a) => {
                    let i = self.operand(Ty::Int, 0, 0);
                    (format!("{a}[{i}]"), P_ATOM)
                }
                None => self.int_atom(),
            },
            _ => {
                let a = self.int_lit();
                let b = self.int_lit();
                (format!("{a} + {b}"), P_ADD)
            }
        }
    }

    fn long_expr(&mut self, depth: usize) -> Frag {
        if depth == 0 || self.chance(0.4) {
            return match self.rng.gen_range(0..3) {
                0 => match self.pick(Ty::Long, false) {
                    Some(v) => (v, P_ATOM),
                    None => self.int_atom(),
                },
                1 => (format!("{}L", self.rng.gen_range(0..100)), P_ATOM),
                _ => self.int_atom(),
            };
        }
        let op = *["+", "-", "*"].choose(self.rng).unwrap();
        let p = if op == "*" { P_MUL } else { P_ADD };
        let l = self.operand(Ty::Long, depth - 1, p);
        let r = self.operand(Ty::Long, depth - 1, p + 1);
        (format!("{l} {op} {r}"), p)
    }

    fn double_expr(&mut self, depth: usize) -> Frag {
        if depth == 0 || self.chance(0.4) {
            return match self.rng.gen_range(0..3) {
                0 => match self.pick(Ty::Double, false) {
                    Some(v) => (v, P_ATOM),
                    None => ("0.5".into(), P_ATOM),
                },
                1 => (format!("{}.{}", self.rng.gen_range(0..10), self.rng.gen_range(0..10)), P_ATOM),
                _ => self.int_atom(),
            };
        }
        let op = *["+", "-", "*", "/"].choose(self.rng).unwrap();
        let p = if matches!(op, "+" | "-") { P_ADD } else { P_MUL };
        let l = self.operand(Ty::Double, depth - 1, p);
        let r = self.operand(Ty::Double, depth - 1, p + 1);
        (format!("{l} {op} {r}"), p)
    }

    fn str_expr(&mut self, depth: usize) -> Frag {
        let base = match self.pick(Ty::Str, false) {
            Some(v) if self.chance(0.6) => v,
            _ => format!("\"{}\"", ["", "a", "ab", "x="].choose(self.rng).unwrap()),
        };
        if depth == 0 || self.chance(0.4) {
            return (base, P_ATOM);
        }
        let r = self.operand(Ty::Int, depth - 1, P_MUL);
        (format!("{base} + {r}"), P_ADD)
    }

    fn comparison(&mut self, depth: usize) -> String {
        let op = *["<", "<=", ">", ">=", "==", "!="].choose(self.rng).unwrap();
        let p = if matches!(op, "==" | "!=") { P_EQ } else { P_REL };
        let ty = if self.chance(0.15) { Ty::Long } else { Ty::Int };
        let l = self.operand(ty, depth.saturating_sub(1), p + 1);
        let r = if self.chance(0.5) {
            self.int_lit()
        } else {
            self.operand(ty, depth.saturating_sub(1), p + 1)
        };
        format!("{l} {op} {r}")
    }

    /// A boolean expression; the result never needs parentheses as an
    /// `if` condition.
    fn cond(&mut self, depth: usize) -> String {
        if depth == 0 || self.chance(0.3) {
            return match self.rng.gen_range(0..10) {
                0..=1 => match self.pick(Ty::Bool, false) {
                    Some(v) => v,
                    None => self.comparison(0),
                },
                2 => ["true", "false"].choose(self.rng).unwrap().to_string(),
                _ => self.comparison(depth),
            };
        }
        match self.rng.gen_range(0..12) {
            0..=2 => {
                let a = self.cond(depth - 1);
                let b = self.cond(depth - 1);
                bin(&a, "&&", &b)
            }
            3..=5 => {
                let a = self.cond(depth - 1);
                let b = self.cond(depth - 1);
                bin(&a, "||", &b)
            }
            6 => {
                let a = self.cond(depth - 1);
                let b = self.cond(depth - 1);
                let op = *["&&", "||"].choose(self.rng).unwrap();
                format!("!({})", bin(&a, op, &b))
            }
            7 => format!("!({})", self.comparison(depth - 1)),
            8 => {
                let a = self.cond(depth - 1);
                format!("!{}", paren_unless_atom(&a))
            }
            9 => {
                let a = self.cond(depth - 1);
                format!("!!{}", paren_unless_atom(&a))
            }
            10 => {
                let a = self.cond(depth - 1);
                let b = self.cond(depth - 1);
                format!("!{} || !{}", paren_unless_atom(&a), paren_unless_atom(&b))
            }
            _ => self.comparison(depth),
        }
    }
}

fn is_decl(s: &str) -> bool {
    ["int ", "int[]", "long ", "double ", "boolean ", "String ", "final "]
        .iter()
        .any(|p| s.starts_with(p))
}

fn is_atom(s: &str) -> bool {
    s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn paren_unless_atom(s: &str) -> String {
    if is_atom(s) {
        s.to_string()
    } else {
        format!("({s})")
    }
}

/// `a op b` for boolean operands, parenthesizing operands that contain
/// lower-precedence operators.
fn bin(a: &str, op: &str, b: &str) -> String {
    let wrap = |s: &str, right: bool| {
        let low = s.contains("||") || s.contains('?') || (op == "&&" && s.contains("&&") && right);
        let or_in_and = op == "&&" && s.contains("||");
        if (low && (op == "&&" || right)) || or_in_and {
            format!("({s})")
        } else {
            s.to_string()
        }
    };
    format!("{} {op} {}", wrap(a, false), wrap(b, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{evaluate, sample_inputs, Outcome, DEFAULT_STEP_BUDGET};

    #[test]
    fn generated_methods_type_check_and_mostly_parse_first_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = SynthConfig::default();
        let mut ok = 0;
        for _ in 0..300 {
            if parse_method(&random_source(&mut rng, &cfg)).is_ok() {
                ok += 1;
            }
        }
        assert!(ok >= 270, "only {ok}/300 generated sources type-check");
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_method(42), random_method(42));
        assert_ne!(random_method(42), random_method(43));
    }

    #[test]
    fn generated_methods_terminate() {
        for seed in 0..200 {
            let m = random_method(seed);
            for input in sample_inputs(&m.signature(), 20, seed).unwrap() {
                let out = evaluate(&m, &input, DEFAULT_STEP_BUDGET);
                assert!(!matches!(out, Outcome::BudgetExhausted), "seed {seed} loops");
            }
        }
    }
}
