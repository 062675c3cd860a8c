//! Deterministic source rendering for [`SyntaxTree`]s.
//!
//! Output uses four-space indentation, no blank lines and the minimal
//! parentheses needed to reparse to the same tree. Tuples and generator
//! expressions are always parenthesized.

use super::literal::escape_str_body;
use super::{NodeId, NodeValue, SyntaxNode, SyntaxTree, HOLE_KIND};

/// Marker emitted for every hole before numbering. Private-use characters are
/// always escaped in rendered string literals, so the marker cannot collide
/// with program text.
pub const HOLE_PLACEHOLDER: &str = "\u{e000}HOLE\u{e000}";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("no rendering rule for node kind `{kind}`")]
pub struct UnparseError {
    pub kind: String,
}

/// Renders a tree; holes appear as `<HOLE>`.
pub fn unparse(tree: &SyntaxTree) -> Result<String, UnparseError> {
    unparse_with_holes(tree, |_| "<HOLE>".to_string())
}

/// Renders a tree, replacing the k-th hole in text order with `fill(k)`.
pub fn unparse_with_holes(tree: &SyntaxTree, mut fill: impl FnMut(usize) -> String) -> Result<String, UnparseError> {
    let raw = render_root(tree)?;
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw.as_str();
    let mut k = 0;
    while let Some(pos) = rest.find(HOLE_PLACEHOLDER) {
        out.push_str(&rest[..pos]);
        out.push_str(&fill(k));
        k += 1;
        rest = &rest[pos + HOLE_PLACEHOLDER.len()..];
    }
    out.push_str(rest);
    Ok(out)
}

fn render_root(tree: &SyntaxTree) -> Result<String, UnparseError> {
    let r = Renderer { tree };
    let root = tree.root();
    let node = tree.node(root);
    let mut out = String::new();
    match node.kind.as_str() {
        "Module" => r.block(root, "body", 0, &mut out, false)?,
        "Group" => r.block(root, "stmts", 0, &mut out, false)?,
        k if super::is_statement_kind(k) || k == HOLE_KIND => r.stmt(root, 0, &mut out)?,
        _ => out = r.expr(root, TEST)?,
    }
    Ok(out)
}

// Binding strength, weakest first.
const YIELD: u8 = 2;
const TEST: u8 = 3;
const OR: u8 = 4;
const AND: u8 = 5;
const NOT: u8 = 6;
const CMP: u8 = 7;
const BOR: u8 = 8;
const BXOR: u8 = 9;
const BAND: u8 = 10;
const SHIFT: u8 = 11;
const ARITH: u8 = 12;
const TERM: u8 = 13;
const FACTOR: u8 = 14;
const POWER: u8 = 15;
const AWAIT: u8 = 16;
const ATOM: u8 = 17;

fn binop_precedence(kind: &str) -> u8 {
    match kind {
        "BitOr" => BOR,
        "BitXor" => BXOR,
        "BitAnd" => BAND,
        "LShift" | "RShift" => SHIFT,
        "Add" | "Sub" => ARITH,
        "Mult" | "MatMult" | "Div" | "Mod" | "FloorDiv" => TERM,
        "Pow" => POWER,
        _ => BOR,
    }
}

struct Renderer<'a> {
    tree: &'a SyntaxTree,
}

fn no_rule(node: &SyntaxNode) -> UnparseError {
    UnparseError { kind: node.kind.clone() }
}

impl<'a> Renderer<'a> {
    fn node(&self, id: NodeId) -> &'a SyntaxNode {
        self.tree.node(id)
    }

    fn value(&self, id: NodeId) -> String {
        match &self.node(id).value {
            NodeValue::Text(s) => s.clone(),
            NodeValue::Hole => HOLE_PLACEHOLDER.to_string(),
            NodeValue::None => String::new(),
        }
    }

    fn req(&self, id: NodeId, relation: &str) -> Result<NodeId, UnparseError> {
        self.node(id).child(relation).ok_or_else(|| no_rule(self.node(id)))
    }

    fn opt(&self, id: NodeId, relation: &str) -> Option<NodeId> {
        self.node(id).child(relation)
    }

    fn list(&self, id: NodeId, relation: &str, min: u8) -> Result<Vec<String>, UnparseError> {
        self.node(id).children_in(relation).map(|c| self.expr(c, min)).collect()
    }

    fn op_symbol(&self, id: NodeId) -> String {
        let node = self.node(id);
        if node.kind == HOLE_KIND {
            return HOLE_PLACEHOLDER.to_string();
        }
        self.value(id)
    }

    fn block(&self, id: NodeId, relation: &str, indent: usize, out: &mut String, pass_if_empty: bool) -> Result<(), UnparseError> {
        let mut any = false;
        for c in self.node(id).children_in(relation) {
            self.stmt(c, indent, out)?;
            any = true;
        }
        if !any && pass_if_empty {
            line(out, indent, "pass");
        }
        Ok(())
    }

    fn stmt(&self, id: NodeId, indent: usize, out: &mut String) -> Result<(), UnparseError> {
        let node = self.node(id);
        match node.kind.as_str() {
            HOLE_KIND => line(out, indent, HOLE_PLACEHOLDER),
            "Group" => self.block(id, "stmts", indent, out, false)?,
            "FunctionDef" | "AsyncFunctionDef" => {
                for d in node.children_in("decorator_list") {
                    line(out, indent, &format!("@{}", self.expr(d, TEST)?));
                }
                let prefix = if node.kind == "AsyncFunctionDef" { "async def" } else { "def" };
                let args = match self.opt(id, "args") {
                    Some(a) => self.arguments(a, true)?,
                    None => String::new(),
                };
                let returns = match self.opt(id, "returns") {
                    Some(r) => format!(" -> {}", self.expr(r, TEST)?),
                    None => String::new(),
                };
                line(out, indent, &format!("{prefix} {}({args}){returns}:", self.value(id)));
                self.block(id, "body", indent + 1, out, true)?;
            }
            "ClassDef" => {
                for d in node.children_in("decorator_list") {
                    line(out, indent, &format!("@{}", self.expr(d, TEST)?));
                }
                let mut parts = self.list(id, "bases", TEST)?;
                for k in node.children_in("keywords") {
                    parts.push(self.keyword(k)?);
                }
                let head = if parts.is_empty() {
                    format!("class {}:", self.value(id))
                } else {
                    format!("class {}({}):", self.value(id), parts.join(", "))
                };
                line(out, indent, &head);
                self.block(id, "body", indent + 1, out, true)?;
            }
            "Return" => match self.opt(id, "value") {
                Some(v) => line(out, indent, &format!("return {}", self.expr(v, TEST)?)),
                None => line(out, indent, "return"),
            },
            "Delete" => line(out, indent, &format!("del {}", self.list(id, "targets", TEST)?.join(", "))),
            "Assign" => {
                let mut parts = self.list(id, "targets", TEST)?;
                parts.push(self.expr(self.req(id, "value")?, YIELD)?);
                line(out, indent, &parts.join(" = "));
            }
            "AugAssign" => {
                let target = self.expr(self.req(id, "target")?, TEST)?;
                let op = self.op_symbol(self.req(id, "op")?);
                let value = self.expr(self.req(id, "value")?, YIELD)?;
                line(out, indent, &format!("{target} {op}= {value}"));
            }
            "AnnAssign" => {
                let target = self.expr(self.req(id, "target")?, TEST)?;
                let ann = self.expr(self.req(id, "annotation")?, TEST)?;
                match self.opt(id, "value") {
                    Some(v) => line(out, indent, &format!("{target}: {ann} = {}", self.expr(v, YIELD)?)),
                    None => line(out, indent, &format!("{target}: {ann}")),
                }
            }
            "For" | "AsyncFor" => {
                let prefix = if node.kind == "AsyncFor" { "async for" } else { "for" };
                let target = self.expr(self.req(id, "target")?, TEST)?;
                let iter = self.expr(self.req(id, "iter")?, TEST)?;
                line(out, indent, &format!("{prefix} {target} in {iter}:"));
                self.block(id, "body", indent + 1, out, true)?;
                self.orelse(id, indent, out)?;
            }
            "While" => {
                line(out, indent, &format!("while {}:", self.expr(self.req(id, "test")?, TEST)?));
                self.block(id, "body", indent + 1, out, true)?;
                self.orelse(id, indent, out)?;
            }
            "If" => {
                line(out, indent, &format!("if {}:", self.expr(self.req(id, "test")?, TEST)?));
                self.block(id, "body", indent + 1, out, true)?;
                let mut cur = id;
                loop {
                    let orelse: Vec<NodeId> = self.node(cur).children_in("orelse").collect();
                    if orelse.len() == 1 && self.node(orelse[0]).kind == "If" {
                        let next = orelse[0];
                        line(out, indent, &format!("elif {}:", self.expr(self.req(next, "test")?, TEST)?));
                        self.block(next, "body", indent + 1, out, true)?;
                        cur = next;
                    } else {
                        self.orelse(cur, indent, out)?;
                        break;
                    }
                }
            }
            "With" | "AsyncWith" => {
                let prefix = if node.kind == "AsyncWith" { "async with" } else { "with" };
                let mut items = Vec::new();
                for item in node.children_in("items") {
                    if self.node(item).kind == HOLE_KIND {
                        items.push(HOLE_PLACEHOLDER.to_string());
                        continue;
                    }
                    let ctx = self.expr(self.req(item, "context_expr")?, TEST)?;
                    match self.opt(item, "optional_vars") {
                        Some(v) => items.push(format!("{ctx} as {}", self.expr(v, TEST)?)),
                        None => items.push(ctx),
                    }
                }
                line(out, indent, &format!("{prefix} {}:", items.join(", ")));
                self.block(id, "body", indent + 1, out, true)?;
            }
            "Raise" => {
                let mut text = "raise".to_string();
                if let Some(e) = self.opt(id, "exc") {
                    text.push(' ');
                    text.push_str(&self.expr(e, TEST)?);
                }
                if let Some(c) = self.opt(id, "cause") {
                    text.push_str(" from ");
                    text.push_str(&self.expr(c, TEST)?);
                }
                line(out, indent, &text);
            }
            "Try" => {
                line(out, indent, "try:");
                self.block(id, "body", indent + 1, out, true)?;
                for h in node.children_in("handlers") {
                    self.handler(h, indent, out)?;
                }
                if node.child("orelse").is_some() {
                    line(out, indent, "else:");
                    self.block(id, "orelse", indent + 1, out, true)?;
                }
                if node.child("finalbody").is_some() {
                    line(out, indent, "finally:");
                    self.block(id, "finalbody", indent + 1, out, true)?;
                }
                if node.child("handlers").is_none() && node.child("finalbody").is_none() {
                    line(out, indent, "finally:");
                    line(out, indent + 1, "pass");
                }
            }
            "ExceptHandler" => self.handler(id, indent, out)?,
            "Assert" => {
                let test = self.expr(self.req(id, "test")?, TEST)?;
                match self.opt(id, "msg") {
                    Some(m) => line(out, indent, &format!("assert {test}, {}", self.expr(m, TEST)?)),
                    None => line(out, indent, &format!("assert {test}")),
                }
            }
            "Import" => line(out, indent, &format!("import {}", self.aliases(id).join(", "))),
            "ImportFrom" => {
                let module = self.value(id);
                line(out, indent, &format!("from {module} import {}", self.aliases(id).join(", ")));
            }
            "Global" => line(out, indent, &format!("global {}", self.value(id))),
            "Nonlocal" => line(out, indent, &format!("nonlocal {}", self.value(id))),
            "Expr" => line(out, indent, &self.expr(self.req(id, "value")?, YIELD)?),
            "Pass" => line(out, indent, "pass"),
            "Break" => line(out, indent, "break"),
            "Continue" => line(out, indent, "continue"),
            _ => return Err(no_rule(node)),
        }
        Ok(())
    }

    fn orelse(&self, id: NodeId, indent: usize, out: &mut String) -> Result<(), UnparseError> {
        if self.node(id).child("orelse").is_some() {
            line(out, indent, "else:");
            self.block(id, "orelse", indent + 1, out, true)?;
        }
        Ok(())
    }

    fn handler(&self, id: NodeId, indent: usize, out: &mut String) -> Result<(), UnparseError> {
        if self.node(id).kind == HOLE_KIND {
            line(out, indent, HOLE_PLACEHOLDER);
            return Ok(());
        }
        let mut head = "except".to_string();
        if let Some(t) = self.opt(id, "type") {
            head.push(' ');
            head.push_str(&self.expr(t, TEST)?);
            if self.node(id).value != NodeValue::None {
                head.push_str(" as ");
                head.push_str(&self.value(id));
            }
        }
        head.push(':');
        line(out, indent, &head);
        self.block(id, "body", indent + 1, out, true)
    }

    fn aliases(&self, id: NodeId) -> Vec<String> {
        self.node(id).children_in("names").map(|a| self.value_or_hole(a)).collect()
    }

    fn value_or_hole(&self, id: NodeId) -> String {
        if self.node(id).kind == HOLE_KIND {
            HOLE_PLACEHOLDER.to_string()
        } else {
            self.value(id)
        }
    }

    fn keyword(&self, id: NodeId) -> Result<String, UnparseError> {
        if self.node(id).kind == HOLE_KIND {
            return Ok(HOLE_PLACEHOLDER.to_string());
        }
        let value = self.req(id, "value")?;
        Ok(match &self.node(id).value {
            NodeValue::None => format!("**{}", self.expr(value, BOR)?),
            _ => format!("{}={}", self.value(id), self.expr(value, TEST)?),
        })
    }

    fn arguments(&self, id: NodeId, annotations: bool) -> Result<String, UnparseError> {
        let node = self.node(id);
        if node.kind == HOLE_KIND {
            return Ok(HOLE_PLACEHOLDER.to_string());
        }
        let mut parts = Vec::new();
        let posonly: Vec<NodeId> = node.children_in("posonlyargs").collect();
        for &a in &posonly {
            parts.push(self.arg(a, annotations)?);
        }
        if !posonly.is_empty() {
            parts.push("/".to_string());
        }
        for a in node.children_in("args") {
            parts.push(self.arg(a, annotations)?);
        }
        match node.child("vararg") {
            Some(v) => parts.push(format!("*{}", self.arg(v, annotations)?)),
            None if node.child("kwonlyargs").is_some() => parts.push("*".to_string()),
            None => {}
        }
        for a in node.children_in("kwonlyargs") {
            parts.push(self.arg(a, annotations)?);
        }
        if let Some(k) = node.child("kwarg") {
            parts.push(format!("**{}", self.arg(k, annotations)?));
        }
        Ok(parts.join(", "))
    }

    fn arg(&self, id: NodeId, annotations: bool) -> Result<String, UnparseError> {
        if self.node(id).kind == HOLE_KIND {
            return Ok(HOLE_PLACEHOLDER.to_string());
        }
        let mut text = self.value(id);
        let annotation = self.opt(id, "annotation").filter(|_| annotations);
        if let Some(a) = annotation {
            text.push_str(": ");
            text.push_str(&self.expr(a, TEST)?);
        }
        if let Some(d) = self.opt(id, "default") {
            text.push_str(if annotation.is_some() { " = " } else { "=" });
            text.push_str(&self.expr(d, TEST)?);
        }
        Ok(text)
    }

    fn expr(&self, id: NodeId, min: u8) -> Result<String, UnparseError> {
        let (text, prec) = self.expr_prec(id)?;
        Ok(if prec < min { format!("({text})") } else { text })
    }

    fn expr_prec(&self, id: NodeId) -> Result<(String, u8), UnparseError> {
        let node = self.node(id);
        let kind = node.kind.as_str();
        Ok(match kind {
            HOLE_KIND => (HOLE_PLACEHOLDER.to_string(), ATOM),
            "Name" | "Constant" => (self.value(id), ATOM),
            "Attribute" => {
                let value_id = self.req(id, "value")?;
                let mut value = self.expr(value_id, ATOM)?;
                let v = self.node(value_id);
                if v.kind == "Constant" && value.starts_with(|c: char| c.is_ascii_digit()) {
                    value = format!("({value})");
                }
                (format!("{value}.{}", self.value(id)), ATOM)
            }
            "Subscript" => {
                let value = self.expr(self.req(id, "value")?, ATOM)?;
                let slice = self.slice(self.req(id, "slice")?)?;
                (format!("{value}[{slice}]"), ATOM)
            }
            "Slice" => (self.slice(id)?, ATOM),
            "Call" => {
                let func = self.expr(self.req(id, "func")?, ATOM)?;
                let mut parts = self.list(id, "args", TEST)?;
                for k in node.children_in("keywords") {
                    parts.push(self.keyword(k)?);
                }
                (format!("{func}({})", parts.join(", ")), ATOM)
            }
            "Starred" => (format!("*{}", self.expr(self.req(id, "value")?, BOR)?), ATOM),
            "List" => (format!("[{}]", self.list(id, "elts", TEST)?.join(", ")), ATOM),
            "Tuple" => {
                let elts = self.list(id, "elts", TEST)?;
                if elts.len() == 1 {
                    (format!("({},)", elts[0]), ATOM)
                } else {
                    (format!("({})", elts.join(", ")), ATOM)
                }
            }
            "Set" => {
                let elts = self.list(id, "elts", TEST)?;
                if elts.is_empty() {
                    ("{*()}".to_string(), ATOM)
                } else {
                    (format!("{{{}}}", elts.join(", ")), ATOM)
                }
            }
            "Dict" => {
                let mut parts = Vec::new();
                let mut pending_key: Option<String> = None;
                for c in &node.children {
                    match c.relation.as_str() {
                        "keys" => pending_key = Some(self.expr(c.id, TEST)?),
                        _ => match pending_key.take() {
                            Some(k) => parts.push(format!("{k}: {}", self.expr(c.id, TEST)?)),
                            None => parts.push(format!("**{}", self.expr(c.id, BOR)?)),
                        },
                    }
                }
                (format!("{{{}}}", parts.join(", ")), ATOM)
            }
            "ListComp" | "SetComp" | "GeneratorExp" => {
                let elt = self.expr(self.req(id, "elt")?, TEST)?;
                let gens = self.generators(id)?;
                let (open, close) = match kind {
                    "ListComp" => ('[', ']'),
                    "SetComp" => ('{', '}'),
                    _ => ('(', ')'),
                };
                (format!("{open}{elt}{gens}{close}"), ATOM)
            }
            "DictComp" => {
                let key = self.expr(self.req(id, "key")?, TEST)?;
                let value = self.expr(self.req(id, "value")?, TEST)?;
                (format!("{{{key}: {value}{}}}", self.generators(id)?), ATOM)
            }
            "NamedExpr" => {
                let target = self.expr(self.req(id, "target")?, ATOM)?;
                let value = self.expr(self.req(id, "value")?, TEST)?;
                (format!("({target} := {value})"), ATOM)
            }
            "Await" => (format!("await {}", self.expr(self.req(id, "value")?, ATOM)?), AWAIT),
            "Yield" => match self.opt(id, "value") {
                Some(v) => (format!("yield {}", self.expr(v, TEST)?), YIELD),
                None => ("yield".to_string(), YIELD),
            },
            "YieldFrom" => (format!("yield from {}", self.expr(self.req(id, "value")?, TEST)?), YIELD),
            "Compare" => {
                let mut text = String::new();
                for c in &node.children {
                    match c.relation.as_str() {
                        "ops" => {
                            text.push(' ');
                            text.push_str(&self.op_symbol(c.id));
                            text.push(' ');
                        }
                        _ => text.push_str(&self.expr(c.id, CMP + 1)?),
                    }
                }
                (text, CMP)
            }
            "BoolOp" => {
                let op_id = self.req(id, "op")?;
                let prec = match self.node(op_id).kind.as_str() {
                    "And" => AND,
                    _ => OR,
                };
                let sep = format!(" {} ", self.op_symbol(op_id));
                (self.list(id, "values", prec + 1)?.join(&sep), prec)
            }
            "BinOp" => {
                let op_id = self.req(id, "op")?;
                let op_kind = self.node(op_id).kind.as_str();
                let prec = binop_precedence(op_kind);
                let (lmin, rmin) = if op_kind == "Pow" { (prec + 1, prec) } else { (prec, prec + 1) };
                let left = self.expr(self.req(id, "left")?, lmin)?;
                let right = self.expr(self.req(id, "right")?, rmin)?;
                (format!("{left} {} {right}", self.op_symbol(op_id)), prec)
            }
            "UnaryOp" => {
                let op_id = self.req(id, "op")?;
                let operand_id = self.req(id, "operand")?;
                match self.node(op_id).kind.as_str() {
                    "Not" => (format!("not {}", self.expr(operand_id, NOT)?), NOT),
                    HOLE_KIND => (format!("{HOLE_PLACEHOLDER} {}", self.expr(operand_id, FACTOR)?), FACTOR),
                    _ => (format!("{}{}", self.op_symbol(op_id), self.expr(operand_id, FACTOR)?), FACTOR),
                }
            }
            "Lambda" => {
                let args = match self.opt(id, "args") {
                    Some(a) => self.arguments(a, false)?,
                    None => String::new(),
                };
                let body = self.expr(self.req(id, "body")?, TEST)?;
                if args.is_empty() {
                    (format!("lambda: {body}"), TEST)
                } else {
                    (format!("lambda {args}: {body}"), TEST)
                }
            }
            "IfExp" => {
                let body = self.expr(self.req(id, "body")?, TEST + 1)?;
                let test = self.expr(self.req(id, "test")?, TEST + 1)?;
                let orelse = self.expr(self.req(id, "orelse")?, TEST)?;
                (format!("{body} if {test} else {orelse}"), TEST)
            }
            "JoinedStr" => (self.fstring(id)?, ATOM),
            "FormattedValue" => {
                let mut exprs = Vec::new();
                let part = self.formatted_value(id, &mut exprs)?;
                (wrap_fstring(&part, &exprs), ATOM)
            }
            _ => return Err(no_rule(node)),
        })
    }

    fn slice(&self, id: NodeId) -> Result<String, UnparseError> {
        let node = self.node(id);
        match node.kind.as_str() {
            "Slice" => {
                let part = |rel: &str| -> Result<String, UnparseError> {
                    match self.opt(id, rel) {
                        Some(c) => self.expr(c, TEST),
                        None => Ok(String::new()),
                    }
                };
                let mut text = format!("{}:{}", part("lower")?, part("upper")?);
                if self.opt(id, "step").is_some() {
                    text.push(':');
                    text.push_str(&part("step")?);
                }
                Ok(text)
            }
            "Tuple" if node.child("elts").is_some() => {
                let elts: Vec<String> = node.children_in("elts").map(|c| self.slice(c)).collect::<Result<_, _>>()?;
                if elts.len() == 1 {
                    Ok(format!("{},", elts[0]))
                } else {
                    Ok(elts.join(", "))
                }
            }
            _ => self.expr(id, TEST),
        }
    }

    fn generators(&self, id: NodeId) -> Result<String, UnparseError> {
        let mut text = String::new();
        for g in self.node(id).children_in("generators") {
            if self.node(g).kind == HOLE_KIND {
                text.push(' ');
                text.push_str(HOLE_PLACEHOLDER);
                continue;
            }
            match &self.node(g).value {
                NodeValue::Text(_) => text.push_str(" async for "),
                NodeValue::Hole => {
                    text.push(' ');
                    text.push_str(HOLE_PLACEHOLDER);
                    text.push_str(" for ");
                }
                NodeValue::None => text.push_str(" for "),
            }
            text.push_str(&self.expr(self.req(g, "target")?, TEST)?);
            text.push_str(" in ");
            text.push_str(&self.expr(self.req(g, "iter")?, OR)?);
            for cond in self.node(g).children_in("ifs") {
                text.push_str(" if ");
                text.push_str(&self.expr(cond, OR)?);
            }
        }
        Ok(text)
    }

    fn fstring(&self, id: NodeId) -> Result<String, UnparseError> {
        let mut exprs = Vec::new();
        let body = self.fstring_body(id, &mut exprs)?;
        Ok(wrap_fstring(&body, &exprs))
    }

    /// Renders the inside of an f-string with literal parts left as decoded
    /// text marked by `\u{e001}` delimiters; quoting is decided afterwards.
    fn fstring_body(&self, id: NodeId, exprs: &mut Vec<String>) -> Result<String, UnparseError> {
        let mut body = String::new();
        for c in self.node(id).children_in("values") {
            let child = self.node(c);
            match child.kind.as_str() {
                "Constant" => {
                    let raw = child.value.text().and_then(decode_str_literal);
                    match raw {
                        Some(s) => {
                            body.push(LIT_OPEN);
                            body.push_str(&s);
                            body.push(LIT_CLOSE);
                        }
                        None => body.push_str(HOLE_PLACEHOLDER),
                    }
                }
                "FormattedValue" => body.push_str(&self.formatted_value(c, exprs)?),
                HOLE_KIND => body.push_str(HOLE_PLACEHOLDER),
                _ => return Err(no_rule(child)),
            }
        }
        Ok(body)
    }

    fn formatted_value(&self, id: NodeId, exprs: &mut Vec<String>) -> Result<String, UnparseError> {
        let mut inner = self.expr(self.req(id, "value")?, TEST + 1)?;
        if inner.starts_with('{') {
            inner.insert(0, ' ');
        }
        exprs.push(inner.clone());
        let mut text = format!("{{{inner}");
        match &self.node(id).value {
            NodeValue::Text(conv) => {
                text.push('!');
                text.push_str(conv);
            }
            NodeValue::Hole => {
                text.push('!');
                text.push_str(HOLE_PLACEHOLDER);
            }
            NodeValue::None => {}
        }
        if let Some(spec) = self.opt(id, "format_spec") {
            text.push(':');
            if self.node(spec).kind == "JoinedStr" {
                text.push_str(&self.fstring_body(spec, exprs)?);
            } else {
                text.push_str(&self.expr(spec, ATOM)?);
            }
        }
        text.push('}');
        Ok(text)
    }
}

const LIT_OPEN: char = '\u{e001}';
const LIT_CLOSE: char = '\u{e002}';

fn wrap_fstring(body: &str, exprs: &[String]) -> String {
    let quote = ["'", "\"", "'''", "\"\"\""]
        .into_iter()
        .find(|q| !exprs.iter().any(|e| e.contains(q)))
        .unwrap_or("'");
    let quote_char = quote.chars().next().unwrap();
    let mut out = String::with_capacity(body.len() + 4);
    out.push('f');
    out.push_str(quote);
    let mut rest = body;
    while let Some(start) = rest.find(LIT_OPEN) {
        out.push_str(&rest[..start]);
        let after = &rest[start + LIT_OPEN.len_utf8()..];
        let end = after.find(LIT_CLOSE).unwrap_or(after.len());
        let mut escaped = String::new();
        escape_str_body(&after[..end], quote_char, &mut escaped);
        out.push_str(&escaped.replace('{', "{{").replace('}', "}}"));
        rest = after.get(end + LIT_CLOSE.len_utf8()..).unwrap_or("");
    }
    out.push_str(rest);
    out.push_str(quote);
    out
}

/// Decodes string literal text produced by `python_str_repr`.
pub(crate) fn decode_str_literal(text: &str) -> Option<String> {
    let quote = text.chars().next()?;
    if (quote != '\'' && quote != '"') || !text.ends_with(quote) || text.len() < 2 {
        return None;
    }
    let inner = &text[1..text.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            't' => out.push('\t'),
            'x' => out.push(hex_char(&mut chars, 2)?),
            'u' => out.push(hex_char(&mut chars, 4)?),
            'U' => out.push(hex_char(&mut chars, 8)?),
            other => out.push(other),
        }
    }
    Some(out)
}

fn hex_char(chars: &mut std::str::Chars<'_>, n: usize) -> Option<char> {
    let digits: String = chars.take(n).collect();
    char::from_u32(u32::from_str_radix(&digits, 16).ok()?)
}

fn line(out: &mut String, indent: usize, text: &str) {
    for _ in 0..indent {
        out.push_str("    ");
    }
    out.push_str(text);
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::super::parse_source;
    use super::*;

    fn roundtrip(src: &str) -> String {
        let tree = parse_source(src).unwrap();
        let text = unparse(&tree).unwrap();
        let again = parse_source(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert!(tree.structurally_eq(&again), "round trip changed the tree:\n{src}\n---\n{text}");
        assert_eq!(unparse(&again).unwrap(), text, "unparse is not a fixed point");
        text
    }

    #[test]
    fn precedence() {
        assert_eq!(roundtrip("x = (a + b) * c"), "x = (a + b) * c\n");
        assert_eq!(roundtrip("x = a + b * c"), "x = a + b * c\n");
        assert_eq!(roundtrip("x = a - (b - c)"), "x = a - (b - c)\n");
        assert_eq!(roundtrip("x = (a ** b) ** c"), "x = (a ** b) ** c\n");
        assert_eq!(roundtrip("x = -a ** 2"), "x = -a ** 2\n");
        assert_eq!(roundtrip("x = not (a and b)"), "x = not (a and b)\n");
        assert_eq!(roundtrip("x = (a or b) and c"), "x = (a or b) and c\n");
        assert_eq!(roundtrip("x = '%s:%s' % (u, p)"), "x = '%s:%s' % (u, p)\n");
    }

    #[test]
    fn statements() {
        let src = "\
@decorator(1)
async def f(a, /, b: int = 2, *args, c, d=4, **kw) -> None:
    '''doc'''
    global g
    for i, j in pairs:
        if i:
            continue
        elif j:
            break
        else:
            pass
    else:
        yield i
    while True:
        x = yield
    try:
        import os.path as p
        from . import q
    except (ValueError, TypeError) as e:
        raise RuntimeError('x') from e
    except Exception:
        raise
    else:
        del a[0], b.c
    finally:
        assert a, 'msg'
    async with open(f) as h, g:
        await h.read()
    x: List[int] = []
    x += 1
    return lambda y, *z: y if z else None
class C(Base, metaclass=Meta):
    pass
";
        roundtrip(src);
    }

    #[test]
    fn expressions() {
        let src = "\
x = [i for i in range(10) if i % 2 if i > 3]
y = {k: v for k, v in d.items()}
z = {a, *b}
w = {**a, 'k': 1}
s = a[1:2, ::3]
t = a[()]
u = (1,)
v = f(*args, key=1, **kw)
q = sum((i for i in x))
r = (n := 10)
p = f'{x!r:>{width}} and {{braces}} {y}'
o = 1 .real
n = a if b else (c if d else e)
m = a < b <= c is not d not in e
l = ~a + +b - -c
k = b'\\x00bytes'
j = 1e100 + 2.5 + 3j
i = ...
h = x[a:b]
g = (yield)
";
        roundtrip(src);
    }

    #[test]
    fn holes_in_text_order() {
        let tree = parse_source("x = f(a)\n").unwrap();
        let call = tree.nodes().find(|(_, n)| n.kind == "Call").unwrap().0;
        let func = tree.node(call).child("func").unwrap();
        let arg = tree.node(call).child("args").unwrap();
        let edited = tree.splice(&[
            super::super::Splice {
                parent: call,
                relation: "func".into(),
                start: 0,
                end: 1,
                replacement: vec![super::super::Fragment::new("Name", NodeValue::Hole)],
            },
            super::super::Splice {
                parent: call,
                relation: "args".into(),
                start: 0,
                end: 1,
                replacement: vec![super::super::Fragment::hole()],
            },
        ]);
        let _ = (func, arg);
        let text = unparse_with_holes(&edited, |k| format!("<extra_id_{k}>")).unwrap();
        assert_eq!(text, "x = <extra_id_0>(<extra_id_1>)\n");
    }

    #[test]
    fn decode_literal() {
        assert_eq!(decode_str_literal("'a\\nb\\''").unwrap(), "a\nb'");
        assert_eq!(decode_str_literal("\"x\\x00\"").unwrap(), "x\0");
    }
}
