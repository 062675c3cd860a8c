use std::collections::BTreeSet;

use rustpython_parser::ast::{self, Ranged};
use rustpython_parser::Parse;
use rustpython_parser::text_size::TextRange;

use super::literal::{python_bytes_repr, python_float_repr, python_str_repr};
use super::{Child, NodeId, NodeValue, Span, SyntaxNode, SyntaxTree};

/// Grammar accepted by [`parse_source`]: the Python 3.9 statement and
/// expression set. Later additions (`match`, `except*`, `type` aliases,
/// type parameter lists) are rejected.
pub const GRAMMAR_VERSION: &str = "3.9";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

/// Parses a Python module into a [`SyntaxTree`] rooted at a `Module` node.
pub fn parse_source(source: &str) -> Result<SyntaxTree, SyntaxError> {
    let index = LineIndex::new(source);
    let suite = ast::Suite::parse(source, "<input>").map_err(|e| {
        let (line, column) = index.position(u32::from(e.offset) as usize);
        SyntaxError { line, column, message: e.error.to_string() }
    })?;
    let mut builder = Builder { nodes: Vec::new(), own: Vec::new(), index: &index };
    let module = builder.push("Module", NodeValue::None, None, None);
    for stmt in &suite {
        builder.stmt(stmt, module, "body")?;
    }
    let nodes = builder.finish();
    let blank_lines = blank_lines(source);
    Ok(SyntaxTree::from_parts(nodes, blank_lines, index.line_count()))
}

fn blank_lines(source: &str) -> BTreeSet<u32> {
    source
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            t.is_empty() || t.starts_with('#')
        })
        .map(|(i, _)| i as u32 + 1)
        .collect()
}

struct LineIndex {
    starts: Vec<usize>,
    source_len: usize,
    text: Vec<u8>,
}

impl LineIndex {
    fn new(source: &str) -> Self {
        let mut starts = vec![0];
        for (i, b) in source.bytes().enumerate() {
            if b == b'\n' {
                starts.push(i + 1);
            }
        }
        LineIndex { starts, source_len: source.len(), text: source.as_bytes().to_vec() }
    }

    fn line_count(&self) -> u32 {
        let mut n = self.starts.len();
        if n > 1 && *self.starts.last().unwrap() == self.source_len {
            n -= 1;
        }
        n as u32
    }

    /// 1-based line and 1-based character column of a byte offset.
    fn position(&self, offset: usize) -> (u32, u32) {
        let offset = offset.min(self.source_len);
        let line = match self.starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.starts[line];
        let col = String::from_utf8_lossy(&self.text[start..offset]).chars().count();
        (line as u32 + 1, col as u32 + 1)
    }

    fn span(&self, range: TextRange) -> Span {
        let (start_line, start_col) = self.position(u32::from(range.start()) as usize);
        let (mut end_line, mut end_col) = self.position(u32::from(range.end()) as usize);
        // A range ending right after a newline belongs to the previous line.
        if end_col == 1 && end_line > start_line {
            end_line -= 1;
            let start = self.starts[end_line as usize - 1];
            let stop = self.starts[end_line as usize].saturating_sub(1);
            end_col = String::from_utf8_lossy(&self.text[start..stop]).chars().count() as u32 + 1;
        }
        Span { start_line, start_col, end_line, end_col }
    }
}

struct Builder<'a> {
    nodes: Vec<SyntaxNode>,
    own: Vec<Option<Span>>,
    index: &'a LineIndex,
}

fn unsupported(index: &LineIndex, range: TextRange, what: &str) -> SyntaxError {
    let (line, column) = index.position(u32::from(range.start()) as usize);
    SyntaxError {
        line,
        column,
        message: format!("{what} is not supported by the Python {GRAMMAR_VERSION} grammar"),
    }
}

fn text(s: impl Into<String>) -> NodeValue {
    NodeValue::Text(s.into())
}

pub(crate) fn operator_info(op: ast::Operator) -> (&'static str, &'static str) {
    use ast::Operator::*;
    match op {
        Add => ("Add", "+"),
        Sub => ("Sub", "-"),
        Mult => ("Mult", "*"),
        MatMult => ("MatMult", "@"),
        Div => ("Div", "/"),
        Mod => ("Mod", "%"),
        Pow => ("Pow", "**"),
        LShift => ("LShift", "<<"),
        RShift => ("RShift", ">>"),
        BitOr => ("BitOr", "|"),
        BitXor => ("BitXor", "^"),
        BitAnd => ("BitAnd", "&"),
        FloorDiv => ("FloorDiv", "//"),
    }
}

fn unary_info(op: ast::UnaryOp) -> (&'static str, &'static str) {
    match op {
        ast::UnaryOp::Invert => ("Invert", "~"),
        ast::UnaryOp::Not => ("Not", "not"),
        ast::UnaryOp::UAdd => ("UAdd", "+"),
        ast::UnaryOp::USub => ("USub", "-"),
    }
}

fn cmp_info(op: ast::CmpOp) -> (&'static str, &'static str) {
    use ast::CmpOp::*;
    match op {
        Eq => ("Eq", "=="),
        NotEq => ("NotEq", "!="),
        Lt => ("Lt", "<"),
        LtE => ("LtE", "<="),
        Gt => ("Gt", ">"),
        GtE => ("GtE", ">="),
        Is => ("Is", "is"),
        IsNot => ("IsNot", "is not"),
        In => ("In", "in"),
        NotIn => ("NotIn", "not in"),
    }
}

pub(crate) fn constant_text(c: &ast::Constant) -> String {
    match c {
        ast::Constant::None => "None".into(),
        ast::Constant::Bool(true) => "True".into(),
        ast::Constant::Bool(false) => "False".into(),
        ast::Constant::Str(s) => python_str_repr(s),
        ast::Constant::Bytes(b) => python_bytes_repr(b),
        ast::Constant::Int(i) => i.to_string(),
        ast::Constant::Float(f) => python_float_repr(*f),
        ast::Constant::Complex { real, imag } => {
            if *real == 0.0 {
                format!("{}j", trim_float(*imag))
            } else {
                format!("({} + {}j)", python_float_repr(*real), trim_float(*imag))
            }
        }
        ast::Constant::Ellipsis => "...".into(),
        ast::Constant::Tuple(items) => {
            let parts: Vec<String> = items.iter().map(constant_text).collect();
            if parts.len() == 1 {
                format!("({},)", parts[0])
            } else {
                format!("({})", parts.join(", "))
            }
        }
    }
}

fn trim_float(f: f64) -> String {
    if f.is_finite() && f.fract() == 0.0 && f.abs() < 1e16 {
        format!("{}", f as i64)
    } else {
        python_float_repr(f)
    }
}

impl<'a> Builder<'a> {
    fn push(&mut self, kind: &str, value: NodeValue, range: Option<TextRange>, parent: Option<(NodeId, &str)>) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(SyntaxNode {
            kind: kind.to_string(),
            value,
            children: Vec::new(),
            parent: parent.map(|(p, _)| p),
            span: Span::default(),
        });
        self.own.push(range.map(|r| self.index.span(r)));
        if let Some((p, relation)) = parent {
            self.nodes[p].children.push(Child { relation: relation.to_string(), id });
        }
        id
    }

    fn leaf(&mut self, kind: &str, value: &str, parent: NodeId, relation: &str) -> NodeId {
        self.push(kind, text(value), None, Some((parent, relation)))
    }

    fn finish(mut self) -> Vec<SyntaxNode> {
        // Bottom-up hull so every span contains its children, then fill
        // rangeless leaves with their parent's span.
        let mut spans: Vec<Option<Span>> = self.own.clone();
        for id in (0..self.nodes.len()).rev() {
            let mut span = spans[id];
            for c in &self.nodes[id].children {
                if let Some(cs) = spans[c.id] {
                    span = Some(span.map_or(cs, |s| s.hull(cs)));
                }
            }
            spans[id] = span;
        }
        for id in 0..self.nodes.len() {
            let span = match spans[id] {
                Some(s) => s,
                None => self.nodes[id].parent.map(|p| self.nodes[p].span).unwrap_or(Span {
                    start_line: 1,
                    start_col: 1,
                    end_line: 1,
                    end_col: 1,
                }),
            };
            self.nodes[id].span = span;
        }
        self.nodes
    }

    fn stmts(&mut self, body: &[ast::Stmt], parent: NodeId, relation: &str) -> Result<(), SyntaxError> {
        for s in body {
            self.stmt(s, parent, relation)?;
        }
        Ok(())
    }

    fn opt_expr(&mut self, e: &Option<Box<ast::Expr>>, parent: NodeId, relation: &str) -> Result<(), SyntaxError> {
        if let Some(e) = e {
            self.expr(e, parent, relation)?;
        }
        Ok(())
    }

    fn exprs(&mut self, es: &[ast::Expr], parent: NodeId, relation: &str) -> Result<(), SyntaxError> {
        for e in es {
            self.expr(e, parent, relation)?;
        }
        Ok(())
    }

    fn stmt(&mut self, stmt: &ast::Stmt, parent: NodeId, relation: &str) -> Result<NodeId, SyntaxError> {
        use ast::Stmt as S;
        let range = stmt.range();
        let p = Some((parent, relation));
        let id = match stmt {
            S::FunctionDef(f) => {
                if !f.type_params.is_empty() {
                    return Err(unsupported(self.index, range, "a type parameter list"));
                }
                let id = self.push("FunctionDef", text(f.name.as_str()), Some(range), p);
                self.exprs(&f.decorator_list, id, "decorator_list")?;
                self.arguments(&f.args, id)?;
                self.opt_expr(&f.returns, id, "returns")?;
                self.stmts(&f.body, id, "body")?;
                id
            }
            S::AsyncFunctionDef(f) => {
                if !f.type_params.is_empty() {
                    return Err(unsupported(self.index, range, "a type parameter list"));
                }
                let id = self.push("AsyncFunctionDef", text(f.name.as_str()), Some(range), p);
                self.exprs(&f.decorator_list, id, "decorator_list")?;
                self.arguments(&f.args, id)?;
                self.opt_expr(&f.returns, id, "returns")?;
                self.stmts(&f.body, id, "body")?;
                id
            }
            S::ClassDef(c) => {
                if !c.type_params.is_empty() {
                    return Err(unsupported(self.index, range, "a type parameter list"));
                }
                let id = self.push("ClassDef", text(c.name.as_str()), Some(range), p);
                self.exprs(&c.decorator_list, id, "decorator_list")?;
                self.exprs(&c.bases, id, "bases")?;
                for k in &c.keywords {
                    self.keyword(k, id)?;
                }
                self.stmts(&c.body, id, "body")?;
                id
            }
            S::Return(r) => {
                let id = self.push("Return", NodeValue::None, Some(range), p);
                self.opt_expr(&r.value, id, "value")?;
                id
            }
            S::Delete(d) => {
                let id = self.push("Delete", NodeValue::None, Some(range), p);
                self.exprs(&d.targets, id, "targets")?;
                id
            }
            S::Assign(a) => {
                let id = self.push("Assign", NodeValue::None, Some(range), p);
                self.exprs(&a.targets, id, "targets")?;
                self.expr(&a.value, id, "value")?;
                id
            }
            S::TypeAlias(_) => return Err(unsupported(self.index, range, "a type alias statement")),
            S::AugAssign(a) => {
                let id = self.push("AugAssign", NodeValue::None, Some(range), p);
                self.expr(&a.target, id, "target")?;
                let (k, v) = operator_info(a.op);
                self.leaf(k, v, id, "op");
                self.expr(&a.value, id, "value")?;
                id
            }
            S::AnnAssign(a) => {
                let id = self.push("AnnAssign", NodeValue::None, Some(range), p);
                self.expr(&a.target, id, "target")?;
                self.expr(&a.annotation, id, "annotation")?;
                self.opt_expr(&a.value, id, "value")?;
                id
            }
            S::For(f) => {
                let id = self.push("For", NodeValue::None, Some(range), p);
                self.expr(&f.target, id, "target")?;
                self.expr(&f.iter, id, "iter")?;
                self.stmts(&f.body, id, "body")?;
                self.stmts(&f.orelse, id, "orelse")?;
                id
            }
            S::AsyncFor(f) => {
                let id = self.push("AsyncFor", NodeValue::None, Some(range), p);
                self.expr(&f.target, id, "target")?;
                self.expr(&f.iter, id, "iter")?;
                self.stmts(&f.body, id, "body")?;
                self.stmts(&f.orelse, id, "orelse")?;
                id
            }
            S::While(w) => {
                let id = self.push("While", NodeValue::None, Some(range), p);
                self.expr(&w.test, id, "test")?;
                self.stmts(&w.body, id, "body")?;
                self.stmts(&w.orelse, id, "orelse")?;
                id
            }
            S::If(i) => {
                let id = self.push("If", NodeValue::None, Some(range), p);
                self.expr(&i.test, id, "test")?;
                self.stmts(&i.body, id, "body")?;
                self.stmts(&i.orelse, id, "orelse")?;
                id
            }
            S::With(w) => {
                let id = self.push("With", NodeValue::None, Some(range), p);
                self.with_items(&w.items, id)?;
                self.stmts(&w.body, id, "body")?;
                id
            }
            S::AsyncWith(w) => {
                let id = self.push("AsyncWith", NodeValue::None, Some(range), p);
                self.with_items(&w.items, id)?;
                self.stmts(&w.body, id, "body")?;
                id
            }
            S::Match(_) => return Err(unsupported(self.index, range, "a match statement")),
            S::Raise(r) => {
                let id = self.push("Raise", NodeValue::None, Some(range), p);
                self.opt_expr(&r.exc, id, "exc")?;
                self.opt_expr(&r.cause, id, "cause")?;
                id
            }
            S::Try(t) => {
                let id = self.push("Try", NodeValue::None, Some(range), p);
                self.stmts(&t.body, id, "body")?;
                for h in &t.handlers {
                    let ast::ExceptHandler::ExceptHandler(h) = h;
                    let value = h.name.as_ref().map_or(NodeValue::None, |n| text(n.as_str()));
                    let hid = self.push("ExceptHandler", value, Some(h.range), Some((id, "handlers")));
                    self.opt_expr(&h.type_, hid, "type")?;
                    self.stmts(&h.body, hid, "body")?;
                }
                self.stmts(&t.orelse, id, "orelse")?;
                self.stmts(&t.finalbody, id, "finalbody")?;
                id
            }
            S::TryStar(_) => return Err(unsupported(self.index, range, "an except* clause")),
            S::Assert(a) => {
                let id = self.push("Assert", NodeValue::None, Some(range), p);
                self.expr(&a.test, id, "test")?;
                self.opt_expr(&a.msg, id, "msg")?;
                id
            }
            S::Import(i) => {
                let id = self.push("Import", NodeValue::None, Some(range), p);
                self.aliases(&i.names, id);
                id
            }
            S::ImportFrom(i) => {
                let level = i.level.as_ref().map_or(0, |l| l.to_usize());
                let module = i.module.as_ref().map_or("", |m| m.as_str());
                let value = format!("{}{}", ".".repeat(level), module);
                let id = self.push("ImportFrom", text(value), Some(range), p);
                self.aliases(&i.names, id);
                id
            }
            S::Global(g) => {
                let names: Vec<&str> = g.names.iter().map(|n| n.as_str()).collect();
                self.push("Global", text(names.join(", ")), Some(range), p)
            }
            S::Nonlocal(g) => {
                let names: Vec<&str> = g.names.iter().map(|n| n.as_str()).collect();
                self.push("Nonlocal", text(names.join(", ")), Some(range), p)
            }
            S::Expr(e) => {
                let id = self.push("Expr", NodeValue::None, Some(range), p);
                self.expr(&e.value, id, "value")?;
                id
            }
            S::Pass(_) => self.push("Pass", NodeValue::None, Some(range), p),
            S::Break(_) => self.push("Break", NodeValue::None, Some(range), p),
            S::Continue(_) => self.push("Continue", NodeValue::None, Some(range), p),
        };
        Ok(id)
    }

    fn aliases(&mut self, names: &[ast::Alias], parent: NodeId) {
        for a in names {
            let value = match &a.asname {
                Some(asname) => format!("{} as {}", a.name.as_str(), asname.as_str()),
                None => a.name.to_string(),
            };
            self.push("alias", text(value), Some(a.range), Some((parent, "names")));
        }
    }

    fn with_items(&mut self, items: &[ast::WithItem], parent: NodeId) -> Result<(), SyntaxError> {
        for item in items {
            let id = self.push("withitem", NodeValue::None, None, Some((parent, "items")));
            self.expr(&item.context_expr, id, "context_expr")?;
            self.opt_expr(&item.optional_vars, id, "optional_vars")?;
        }
        Ok(())
    }

    fn keyword(&mut self, k: &ast::Keyword, parent: NodeId) -> Result<(), SyntaxError> {
        let value = k.arg.as_ref().map_or(NodeValue::None, |a| text(a.as_str()));
        let id = self.push("keyword", value, Some(k.range), Some((parent, "keywords")));
        self.expr(&k.value, id, "value")?;
        Ok(())
    }

    fn arguments(&mut self, args: &ast::Arguments, parent: NodeId) -> Result<(), SyntaxError> {
        let id = self.push("arguments", NodeValue::None, None, Some((parent, "args")));
        for a in &args.posonlyargs {
            self.arg_with_default(a, id, "posonlyargs")?;
        }
        for a in &args.args {
            self.arg_with_default(a, id, "args")?;
        }
        if let Some(v) = &args.vararg {
            self.arg(v, None, id, "vararg")?;
        }
        for a in &args.kwonlyargs {
            self.arg_with_default(a, id, "kwonlyargs")?;
        }
        if let Some(k) = &args.kwarg {
            self.arg(k, None, id, "kwarg")?;
        }
        Ok(())
    }

    fn arg_with_default(&mut self, a: &ast::ArgWithDefault, parent: NodeId, relation: &str) -> Result<(), SyntaxError> {
        self.arg(&a.def, a.default.as_deref(), parent, relation)
    }

    fn arg(&mut self, a: &ast::Arg, default: Option<&ast::Expr>, parent: NodeId, relation: &str) -> Result<(), SyntaxError> {
        let id = self.push("arg", text(a.arg.as_str()), Some(a.range), Some((parent, relation)));
        self.opt_expr(&a.annotation, id, "annotation")?;
        if let Some(d) = default {
            self.expr(d, id, "default")?;
        }
        Ok(())
    }

    fn comprehensions(&mut self, gens: &[ast::Comprehension], parent: NodeId) -> Result<(), SyntaxError> {
        for g in gens {
            let value = if g.is_async { text("async") } else { NodeValue::None };
            let id = self.push("comprehension", value, None, Some((parent, "generators")));
            self.expr(&g.target, id, "target")?;
            self.expr(&g.iter, id, "iter")?;
            self.exprs(&g.ifs, id, "ifs")?;
        }
        Ok(())
    }

    fn expr(&mut self, expr: &ast::Expr, parent: NodeId, relation: &str) -> Result<NodeId, SyntaxError> {
        use ast::Expr as E;
        let range = Some(expr.range());
        let p = Some((parent, relation));
        let id = match expr {
            E::BoolOp(b) => {
                let id = self.push("BoolOp", NodeValue::None, range, p);
                let (k, v) = match b.op {
                    ast::BoolOp::And => ("And", "and"),
                    ast::BoolOp::Or => ("Or", "or"),
                };
                self.leaf(k, v, id, "op");
                self.exprs(&b.values, id, "values")?;
                id
            }
            E::NamedExpr(n) => {
                let id = self.push("NamedExpr", NodeValue::None, range, p);
                self.expr(&n.target, id, "target")?;
                self.expr(&n.value, id, "value")?;
                id
            }
            E::BinOp(b) => {
                let id = self.push("BinOp", NodeValue::None, range, p);
                self.expr(&b.left, id, "left")?;
                let (k, v) = operator_info(b.op);
                self.leaf(k, v, id, "op");
                self.expr(&b.right, id, "right")?;
                id
            }
            E::UnaryOp(u) => {
                let id = self.push("UnaryOp", NodeValue::None, range, p);
                let (k, v) = unary_info(u.op);
                self.leaf(k, v, id, "op");
                self.expr(&u.operand, id, "operand")?;
                id
            }
            E::Lambda(l) => {
                let id = self.push("Lambda", NodeValue::None, range, p);
                self.arguments(&l.args, id)?;
                self.expr(&l.body, id, "body")?;
                id
            }
            E::IfExp(i) => {
                let id = self.push("IfExp", NodeValue::None, range, p);
                self.expr(&i.test, id, "test")?;
                self.expr(&i.body, id, "body")?;
                self.expr(&i.orelse, id, "orelse")?;
                id
            }
            E::Dict(d) => {
                let id = self.push("Dict", NodeValue::None, range, p);
                for (k, v) in d.keys.iter().zip(&d.values) {
                    if let Some(k) = k {
                        self.expr(k, id, "keys")?;
                    }
                    self.expr(v, id, "values")?;
                }
                id
            }
            E::Set(s) => {
                let id = self.push("Set", NodeValue::None, range, p);
                self.exprs(&s.elts, id, "elts")?;
                id
            }
            E::ListComp(c) => {
                let id = self.push("ListComp", NodeValue::None, range, p);
                self.expr(&c.elt, id, "elt")?;
                self.comprehensions(&c.generators, id)?;
                id
            }
            E::SetComp(c) => {
                let id = self.push("SetComp", NodeValue::None, range, p);
                self.expr(&c.elt, id, "elt")?;
                self.comprehensions(&c.generators, id)?;
                id
            }
            E::DictComp(c) => {
                let id = self.push("DictComp", NodeValue::None, range, p);
                self.expr(&c.key, id, "key")?;
                self.expr(&c.value, id, "value")?;
                self.comprehensions(&c.generators, id)?;
                id
            }
            E::GeneratorExp(c) => {
                let id = self.push("GeneratorExp", NodeValue::None, range, p);
                self.expr(&c.elt, id, "elt")?;
                self.comprehensions(&c.generators, id)?;
                id
            }
            E::Await(a) => {
                let id = self.push("Await", NodeValue::None, range, p);
                self.expr(&a.value, id, "value")?;
                id
            }
            E::Yield(y) => {
                let id = self.push("Yield", NodeValue::None, range, p);
                self.opt_expr(&y.value, id, "value")?;
                id
            }
            E::YieldFrom(y) => {
                let id = self.push("YieldFrom", NodeValue::None, range, p);
                self.expr(&y.value, id, "value")?;
                id
            }
            E::Compare(c) => {
                let id = self.push("Compare", NodeValue::None, range, p);
                self.expr(&c.left, id, "left")?;
                for (op, comp) in c.ops.iter().zip(&c.comparators) {
                    let (k, v) = cmp_info(*op);
                    self.leaf(k, v, id, "ops");
                    self.expr(comp, id, "comparators")?;
                }
                id
            }
            E::Call(c) => {
                let id = self.push("Call", NodeValue::None, range, p);
                self.expr(&c.func, id, "func")?;
                self.exprs(&c.args, id, "args")?;
                for k in &c.keywords {
                    self.keyword(k, id)?;
                }
                id
            }
            E::FormattedValue(f) => {
                let value = match f.conversion {
                    ast::ConversionFlag::Str => text("s"),
                    ast::ConversionFlag::Repr => text("r"),
                    ast::ConversionFlag::Ascii => text("a"),
                    ast::ConversionFlag::None => NodeValue::None,
                };
                let id = self.push("FormattedValue", value, range, p);
                self.expr(&f.value, id, "value")?;
                self.opt_expr(&f.format_spec, id, "format_spec")?;
                id
            }
            E::JoinedStr(j) => {
                let id = self.push("JoinedStr", NodeValue::None, range, p);
                self.exprs(&j.values, id, "values")?;
                id
            }
            E::Constant(c) => self.push("Constant", text(constant_text(&c.value)), range, p),
            E::Attribute(a) => {
                let id = self.push("Attribute", text(a.attr.as_str()), range, p);
                self.expr(&a.value, id, "value")?;
                id
            }
            E::Subscript(s) => {
                let id = self.push("Subscript", NodeValue::None, range, p);
                self.expr(&s.value, id, "value")?;
                self.expr(&s.slice, id, "slice")?;
                id
            }
            E::Starred(s) => {
                let id = self.push("Starred", NodeValue::None, range, p);
                self.expr(&s.value, id, "value")?;
                id
            }
            E::Name(n) => self.push("Name", text(n.id.as_str()), range, p),
            E::List(l) => {
                let id = self.push("List", NodeValue::None, range, p);
                self.exprs(&l.elts, id, "elts")?;
                id
            }
            E::Tuple(t) => {
                let id = self.push("Tuple", NodeValue::None, range, p);
                self.exprs(&t.elts, id, "elts")?;
                id
            }
            E::Slice(s) => {
                let id = self.push("Slice", NodeValue::None, range, p);
                self.opt_expr(&s.lower, id, "lower")?;
                self.opt_expr(&s.upper, id, "upper")?;
                self.opt_expr(&s.step, id, "step")?;
                id
            }
        };
        Ok(id)
    }
}
