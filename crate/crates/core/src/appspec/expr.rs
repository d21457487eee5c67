//! Integer/boolean expression language used by guards, visibility
//! conditions and assignments.
//!
//! Expressions are written as prefix s-expressions: `(< x 5)`,
//! `(&& (== x 0) (! (< y 0)))`, `(- x)`. Integer literals may carry a
//! leading minus sign (`-3`).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    /// Arithmetic negation, written `-`.
    Neg,
    /// Logical not, written `!`.
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub const ARITHMETIC: [BinaryOp; 5] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Rem,
    ];
    pub const RELATIONAL: [BinaryOp; 6] = [
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::Eq,
        BinaryOp::Ne,
    ];
    pub const LOGICAL: [BinaryOp; 2] = [BinaryOp::And, BinaryOp::Or];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    fn from_symbol(s: &str) -> Option<BinaryOp> {
        let all = Self::ARITHMETIC
            .iter()
            .chain(Self::RELATIONAL.iter())
            .chain(Self::LOGICAL.iter());
        all.copied().find(|op| op.symbol() == s)
    }

    pub fn is_arithmetic(self) -> bool {
        Self::ARITHMETIC.contains(&self)
    }

    pub fn is_relational(self) -> bool {
        Self::RELATIONAL.contains(&self)
    }

    pub fn is_logical(self) -> bool {
        Self::LOGICAL.contains(&self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    Var(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Type {
    Int,
    Bool,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn as_int(self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(v),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expression syntax error at column {column}: {message}")]
pub struct ExprSyntaxError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("operator `{op}` expects {expected} operands, found {found}")]
    Mismatch {
        op: &'static str,
        expected: Type,
        found: Type,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("remainder by zero")]
    RemainderByZero,
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("ill-typed operand for `{0}`")]
    IllTyped(&'static str),
}

/// Variable bindings used during evaluation.
pub type Env = BTreeMap<String, i64>;

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Expr {
        Expr::Unary(op, Box::new(operand))
    }

    pub fn parse(text: &str) -> Result<Expr, ExprSyntaxError> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.expr()?;
        if let Some(tok) = parser.tokens.get(parser.pos) {
            return Err(ExprSyntaxError {
                column: tok.column,
                message: "trailing input after expression".into(),
            });
        }
        Ok(expr)
    }

    /// Infers the expression type. `lookup` reports whether a variable is
    /// declared; all declared variables are integers.
    pub fn type_check(&self, lookup: &dyn Fn(&str) -> bool) -> Result<Type, TypeError> {
        match self {
            Expr::Const(_) => Ok(Type::Int),
            Expr::Var(name) => {
                if lookup(name) {
                    Ok(Type::Int)
                } else {
                    Err(TypeError::UnknownVariable(name.clone()))
                }
            }
            Expr::Unary(op, inner) => {
                let t = inner.type_check(lookup)?;
                let (want, sym) = match op {
                    UnaryOp::Neg => (Type::Int, "-"),
                    UnaryOp::Not => (Type::Bool, "!"),
                };
                expect(sym, want, t)?;
                Ok(want)
            }
            Expr::Binary(op, lhs, rhs) => {
                let lt = lhs.type_check(lookup)?;
                let rt = rhs.type_check(lookup)?;
                let operand = if op.is_logical() { Type::Bool } else { Type::Int };
                expect(op.symbol(), operand, lt)?;
                expect(op.symbol(), operand, rt)?;
                Ok(if op.is_arithmetic() { Type::Int } else { Type::Bool })
            }
        }
    }

    /// Evaluates with truncating integer division. Arithmetic wraps on
    /// overflow.
    pub fn eval(&self, env: &Env) -> Result<Value, EvalError> {
        match self {
            Expr::Const(c) => Ok(Value::Int(*c)),
            Expr::Var(name) => env
                .get(name)
                .copied()
                .map(Value::Int)
                .ok_or_else(|| EvalError::Unbound(name.clone())),
            Expr::Unary(UnaryOp::Neg, inner) => {
                let v = inner.eval(env)?.as_int().ok_or(EvalError::IllTyped("-"))?;
                Ok(Value::Int(v.wrapping_neg()))
            }
            Expr::Unary(UnaryOp::Not, inner) => {
                let v = inner.eval(env)?.as_bool().ok_or(EvalError::IllTyped("!"))?;
                Ok(Value::Bool(!v))
            }
            Expr::Binary(op, lhs, rhs) if op.is_logical() => {
                let sym = op.symbol();
                let l = lhs.eval(env)?.as_bool().ok_or(EvalError::IllTyped(sym))?;
                // Both sides are always evaluated so a faulting right operand
                // is observable regardless of short-circuiting.
                let r = rhs.eval(env)?.as_bool().ok_or(EvalError::IllTyped(sym))?;
                Ok(Value::Bool(match op {
                    BinaryOp::And => l && r,
                    _ => l || r,
                }))
            }
            Expr::Binary(op, lhs, rhs) => {
                let sym = op.symbol();
                let l = lhs.eval(env)?.as_int().ok_or(EvalError::IllTyped(sym))?;
                let r = rhs.eval(env)?.as_int().ok_or(EvalError::IllTyped(sym))?;
                let v = match op {
                    BinaryOp::Add => Value::Int(l.wrapping_add(r)),
                    BinaryOp::Sub => Value::Int(l.wrapping_sub(r)),
                    BinaryOp::Mul => Value::Int(l.wrapping_mul(r)),
                    BinaryOp::Div => {
                        if r == 0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        Value::Int(l.wrapping_div(r))
                    }
                    BinaryOp::Rem => {
                        if r == 0 {
                            return Err(EvalError::RemainderByZero);
                        }
                        Value::Int(l.wrapping_rem(r))
                    }
                    BinaryOp::Lt => Value::Bool(l < r),
                    BinaryOp::Le => Value::Bool(l <= r),
                    BinaryOp::Gt => Value::Bool(l > r),
                    BinaryOp::Ge => Value::Bool(l >= r),
                    BinaryOp::Eq => Value::Bool(l == r),
                    BinaryOp::Ne => Value::Bool(l != r),
                    BinaryOp::And | BinaryOp::Or => unreachable!("handled above"),
                };
                Ok(v)
            }
        }
    }

    /// Variables referenced anywhere in the tree, in pre-order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Var(name) = e {
                out.push(name.as_str());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Unary(_, inner) => inner.walk(f),
            Expr::Binary(_, lhs, rhs) => {
                lhs.walk(f);
                rhs.walk(f);
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// The node at pre-order index `index`.
    pub fn node(&self, index: usize) -> Option<&Expr> {
        let mut found = None;
        let mut i = 0;
        self.walk(&mut |e| {
            if i == index {
                found = Some(e);
            }
            i += 1;
        });
        found
    }

    /// Returns a copy with the node at pre-order `index` replaced.
    pub fn replace_node(&self, index: usize, replacement: Expr) -> Expr {
        let mut counter = 0;
        let mut replacement = Some(replacement);
        self.rebuild(index, &mut counter, &mut replacement)
    }

    fn rebuild(&self, target: usize, counter: &mut usize, repl: &mut Option<Expr>) -> Expr {
        let here = *counter;
        *counter += 1;
        if here == target {
            // Skip the subtree's remaining indices so later siblings keep
            // their original numbering.
            *counter += self.size() - 1;
            return repl.take().expect("replacement used once");
        }
        match self {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Unary(op, inner) => Expr::Unary(*op, Box::new(inner.rebuild(target, counter, repl))),
            Expr::Binary(op, lhs, rhs) => {
                let l = lhs.rebuild(target, counter, repl);
                let r = rhs.rebuild(target, counter, repl);
                Expr::Binary(*op, Box::new(l), Box::new(r))
            }
        }
    }
}

fn expect(op: &'static str, expected: Type, found: Type) -> Result<(), TypeError> {
    if expected == found {
        Ok(())
    } else {
        Err(TypeError::Mismatch {
            op,
            expected,
            found,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(name) => f.write_str(name),
            Expr::Unary(UnaryOp::Neg, inner) => write!(f, "(- {inner})"),
            Expr::Unary(UnaryOp::Not, inner) => write!(f, "(! {inner})"),
            Expr::Binary(op, lhs, rhs) => write!(f, "({} {lhs} {rhs})", op.symbol()),
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Expr::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ExprSyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push(Token { tok: Tok::Open, column });
                i += 1;
            }
            ')' => {
                out.push(Token { tok: Tok::Close, column });
                i += 1;
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '(' && chars[i] != ')' {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Atom(chars[start..i].iter().collect()),
                    column,
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn end_column(&self) -> usize {
        self.tokens.last().map(|t| t.column + 1).unwrap_or(1)
    }

    fn next(&mut self) -> Result<Token, ExprSyntaxError> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| ExprSyntaxError {
            column: self.end_column(),
            message: "unexpected end of expression".into(),
        })?;
        self.pos += 1;
        Ok(tok)
    }

    fn expr(&mut self) -> Result<Expr, ExprSyntaxError> {
        let tok = self.next()?;
        match tok.tok {
            Tok::Close => Err(ExprSyntaxError {
                column: tok.column,
                message: "unexpected `)`".into(),
            }),
            Tok::Atom(atom) => atom_expr(&atom, tok.column),
            Tok::Open => {
                let head = self.next()?;
                let op = match head.tok {
                    Tok::Atom(op) => op,
                    _ => {
                        return Err(ExprSyntaxError {
                            column: head.column,
                            message: "expected operator after `(`".into(),
                        })
                    }
                };
                let mut args = Vec::new();
                loop {
                    match self.tokens.get(self.pos) {
                        Some(Token { tok: Tok::Close, .. }) => {
                            self.pos += 1;
                            break;
                        }
                        Some(_) => args.push(self.expr()?),
                        None => {
                            return Err(ExprSyntaxError {
                                column: self.end_column(),
                                message: "missing `)`".into(),
                            })
                        }
                    }
                }
                build_application(&op, head.column, args)
            }
        }
    }
}

fn atom_expr(atom: &str, column: usize) -> Result<Expr, ExprSyntaxError> {
    if let Ok(v) = atom.parse::<i64>() {
        return Ok(Expr::Const(v));
    }
    if is_identifier(atom) {
        return Ok(Expr::Var(atom.to_string()));
    }
    Err(ExprSyntaxError {
        column,
        message: format!("invalid atom `{atom}`"),
    })
}

fn build_application(op: &str, column: usize, mut args: Vec<Expr>) -> Result<Expr, ExprSyntaxError> {
    let arity_err = |want: &str| ExprSyntaxError {
        column,
        message: format!("operator `{op}` expects {want} operand(s), found {}", args.len()),
    };
    match (op, args.len()) {
        ("-", 1) => Ok(Expr::unary(UnaryOp::Neg, args.remove(0))),
        ("!", 1) => Ok(Expr::unary(UnaryOp::Not, args.remove(0))),
        ("!", _) => Err(arity_err("1")),
        (_, 2) => match BinaryOp::from_symbol(op) {
            Some(bin) => {
                let rhs = args.pop().unwrap();
                let lhs = args.pop().unwrap();
                Ok(Expr::binary(bin, lhs, rhs))
            }
            None => Err(ExprSyntaxError {
                column,
                message: format!("unknown operator `{op}`"),
            }),
        },
        _ if BinaryOp::from_symbol(op).is_some() => Err(arity_err("2")),
        _ => Err(ExprSyntaxError {
            column,
            message: format!("unknown operator `{op}`"),
        }),
    }
}

/// `[A-Za-z_][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
