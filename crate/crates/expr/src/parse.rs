//! Textual formats for expressions.
//!
//! The primary form is a parenthesized prefix notation:
//!
//! ```text
//! (const 3.5)            (var 0)
//! (relu e)  (abs e)  (softsign e)  (logistic e)  (tanh e)  (softplus e)
//! (mish e)  (elu e)  (gelu e)  (arctan e)  (exp e)  (log e)  (erf e)
//! (sqrt e)  (square e)  (sin e)
//! (swish <beta> e)       (huber <beta> e)
//! (max2 e e)  (min2 e e)  (hinge e e)  (prod e e)
//! (sum e ...)            (scale <c> e)
//! (affine (<w> ...) <b> e ...)
//! (poly ((<coef> <pow> ...) ...) e ...)
//! (compose f g ...)
//! ```
//!
//! A JSON object form with the same shapes is also accepted; see
//! [`expr_from_json`].

use crate::error::ParseError;
use crate::expr::{Expr, ExprKind, PolyTerm};
use crate::primitive::Primitive;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open(usize),
    Close(usize),
    Atom(usize, String),
}

impl Token {
    fn position(&self) -> usize {
        match self {
            Token::Open(p) | Token::Close(p) => *p,
            Token::Atom(p, _) => *p,
        }
    }

    fn text(&self) -> String {
        match self {
            Token::Open(_) => "(".into(),
            Token::Close(_) => ")".into(),
            Token::Atom(_, s) => s.clone(),
        }
    }
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            tokens.push(Token::Open(i));
            i += 1;
        } else if c == ')' {
            tokens.push(Token::Close(i));
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() {
                let c = bytes[i] as char;
                if c.is_whitespace() || c == '(' || c == ')' {
                    break;
                }
                i += 1;
            }
            tokens.push(Token::Atom(start, text[start..i].to_string()));
        }
    }
    tokens
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn err(&self, message: impl Into<String>) -> ParseError {
        let (position, token) = match self.tokens.get(self.pos) {
            Some(t) => (t.position(), t.text()),
            None => (self.len, "<end of input>".to_string()),
        };
        ParseError {
            position,
            token,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_open(&mut self) -> Result<(), ParseError> {
        match self.next()? {
            Token::Open(_) => Ok(()),
            _ => {
                self.pos -= 1;
                Err(self.err("expected '('"))
            }
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.next()? {
            Token::Close(_) => Ok(()),
            _ => {
                self.pos -= 1;
                Err(self.err("expected ')'"))
            }
        }
    }

    fn at_close(&self) -> bool {
        matches!(self.tokens.get(self.pos), Some(Token::Close(_)))
    }

    fn atom(&mut self) -> Result<String, ParseError> {
        match self.next()? {
            Token::Atom(_, s) => Ok(s),
            _ => {
                self.pos -= 1;
                Err(self.err("expected an atom"))
            }
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let s = self.atom()?;
        s.parse::<f64>().map_err(|_| {
            self.pos -= 1;
            self.err(format!("expected a number, got {s:?}"))
        })
    }

    fn index(&mut self) -> Result<usize, ParseError> {
        let s = self.atom()?;
        s.parse::<usize>().map_err(|_| {
            self.pos -= 1;
            self.err(format!("expected a variable index, got {s:?}"))
        })
    }

    fn number_list(&mut self) -> Result<Vec<f64>, ParseError> {
        self.expect_open()?;
        let mut out = Vec::new();
        while !self.at_close() {
            out.push(self.number()?);
        }
        self.expect_close()?;
        Ok(out)
    }

    fn expr_list_until_close(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut out = Vec::new();
        while !self.at_close() {
            out.push(self.expr()?);
        }
        self.expect_close()?;
        Ok(out)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.expect_open()?;
        let head_pos = self.pos;
        let head = self.atom()?;
        let dim_err = |e| ParseError {
            position: 0,
            token: head.clone(),
            message: format!("{e}"),
        };
        let built = match head.as_str() {
            "const" => {
                let c = self.number()?;
                self.expect_close()?;
                Expr::constant(c)
            }
            "var" => {
                let i = self.index()?;
                self.expect_close()?;
                Expr::var(i)
            }
            "sum" => Expr::sum(self.expr_list_until_close()?),
            "prod" => {
                let a = self.expr()?;
                let b = self.expr()?;
                self.expect_close()?;
                Expr::prod(a, b)
            }
            "scale" => {
                let c = self.number()?;
                let e = self.expr()?;
                self.expect_close()?;
                Expr::scale(c, e)
            }
            "affine" => {
                let weights = self.number_list()?;
                let bias = self.number()?;
                let args = self.expr_list_until_close()?;
                Expr::affine(weights, bias, args).map_err(dim_err)?
            }
            "poly" => {
                self.expect_open()?;
                let mut terms = Vec::new();
                while !self.at_close() {
                    let nums = self.number_list()?;
                    if nums.is_empty() {
                        return Err(self.err("polynomial term needs a coefficient"));
                    }
                    terms.push(PolyTerm {
                        coef: nums[0],
                        powers: nums[1..].iter().map(|p| *p as u32).collect(),
                    });
                }
                self.expect_close()?;
                let args = self.expr_list_until_close()?;
                Expr::polynomial(terms, args).map_err(dim_err)?
            }
            "compose" => {
                let f = self.expr()?;
                let args = self.expr_list_until_close()?;
                Expr::compose(f, args).map_err(dim_err)?
            }
            "swish" | "huber" => {
                let beta = self.number()?;
                let e = self.expr()?;
                self.expect_close()?;
                let prim = if head == "swish" {
                    Primitive::Swish(beta)
                } else {
                    Primitive::Huber(beta)
                };
                Expr::prim(prim, vec![e]).map_err(dim_err)?
            }
            name => {
                let prim = match name {
                    "relu" => Primitive::Relu,
                    "abs" => Primitive::Abs,
                    "max2" => Primitive::Max2,
                    "min2" => Primitive::Min2,
                    "softsign" => Primitive::Softsign,
                    "logistic" => Primitive::Logistic,
                    "tanh" => Primitive::Tanh,
                    "softplus" => Primitive::Softplus,
                    "mish" => Primitive::Mish,
                    "elu" => Primitive::Elu,
                    "gelu" => Primitive::Gelu,
                    "arctan" => Primitive::Arctan,
                    "exp" => Primitive::Exp,
                    "log" => Primitive::Log,
                    "erf" => Primitive::Erf,
                    "sqrt" => Primitive::Sqrt,
                    "hinge" => Primitive::Hinge,
                    "square" => Primitive::Square,
                    "sin" => Primitive::Sin,
                    other => {
                        self.pos = head_pos;
                        return Err(self.err(format!("unknown operator {other:?}")));
                    }
                };
                let mut args = Vec::new();
                for _ in 0..prim.arg_count() {
                    args.push(self.expr()?);
                }
                self.expect_close()?;
                Expr::prim(prim, args).map_err(dim_err)?
            }
        };
        Ok(built)
    }
}

/// Parse the prefix textual form.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| ParseError {
            position: 0,
            token: "<json>".into(),
            message: e.to_string(),
        })?;
        return expr_from_json(&v);
    }
    let mut p = Parser {
        tokens: tokenize(text),
        pos: 0,
        len: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.err("trailing input after expression"));
    }
    Ok(e)
}

/// Serialize to the canonical prefix form. Shared subexpressions are
/// expanded; the text form is a tree.
pub fn serialize_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(expr, &mut out);
    out
}

fn write_expr(expr: &Expr, out: &mut String) {
    use std::fmt::Write;
    match expr.kind() {
        ExprKind::Const(c) => {
            write!(out, "(const {c})").unwrap();
        }
        ExprKind::Var(i) => {
            write!(out, "(var {i})").unwrap();
        }
        ExprKind::Affine { weights, bias, args } => {
            out.push_str("(affine (");
            for (k, w) in weights.iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                write!(out, "{w}").unwrap();
            }
            write!(out, ") {bias}").unwrap();
            for a in args {
                out.push(' ');
                write_expr(a, out);
            }
            out.push(')');
        }
        ExprKind::Poly { terms, args } => {
            out.push_str("(poly (");
            for (k, t) in terms.iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                write!(out, "({}", t.coef).unwrap();
                for p in &t.powers {
                    write!(out, " {p}").unwrap();
                }
                out.push(')');
            }
            out.push(')');
            for a in args {
                out.push(' ');
                write_expr(a, out);
            }
            out.push(')');
        }
        ExprKind::Prim { prim, args } => {
            write!(out, "({}", prim.name()).unwrap();
            match prim {
                Primitive::Swish(beta) | Primitive::Huber(beta) => {
                    write!(out, " {beta}").unwrap();
                }
                _ => {}
            }
            for a in args {
                out.push(' ');
                write_expr(a, out);
            }
            out.push(')');
        }
        ExprKind::Sum(args) => {
            out.push_str("(sum");
            for a in args {
                out.push(' ');
                write_expr(a, out);
            }
            out.push(')');
        }
        ExprKind::Prod(a, b) => {
            out.push_str("(prod ");
            write_expr(a, out);
            out.push(' ');
            write_expr(b, out);
            out.push(')');
        }
        ExprKind::Scale(c, e) => {
            write!(out, "(scale {c} ").unwrap();
            write_expr(e, out);
            out.push(')');
        }
        ExprKind::Compose { f, args } => {
            out.push_str("(compose ");
            write_expr(f, out);
            for a in args {
                out.push(' ');
                write_expr(a, out);
            }
            out.push(')');
        }
    }
}

/// Structured-object (JSON) form. Shapes mirror the textual operators:
/// `{"op":"const","value":1.5}`, `{"op":"var","index":0}`,
/// `{"op":"relu","args":[...]}`, `{"op":"swish","beta":1.5,"args":[...]}`,
/// `{"op":"affine","weights":[...],"bias":0.0,"args":[...]}`,
/// `{"op":"poly","terms":[{"coef":1.0,"powers":[2]}],"args":[...]}`,
/// `{"op":"compose","f":{...},"args":[...]}`.
pub fn expr_from_json(v: &serde_json::Value) -> Result<Expr, ParseError> {
    let jerr = |message: String| ParseError {
        position: 0,
        token: "<json>".into(),
        message,
    };
    let obj = v.as_object().ok_or_else(|| jerr("expected an object".into()))?;
    let op = obj
        .get("op")
        .and_then(|o| o.as_str())
        .ok_or_else(|| jerr("missing \"op\" field".into()))?;
    let num = |key: &str| -> Result<f64, ParseError> {
        obj.get(key)
            .and_then(serde_json::Value::as_f64)
            .ok_or_else(|| jerr(format!("missing numeric field {key:?} for {op}")))
    };
    let args = |key: &str| -> Result<Vec<Expr>, ParseError> {
        match obj.get(key) {
            Some(serde_json::Value::Array(items)) => {
                items.iter().map(expr_from_json).collect()
            }
            _ => Err(jerr(format!("missing array field {key:?} for {op}"))),
        }
    };
    let dim_err = |e| jerr(format!("{e}"));
    match op {
        "const" => Ok(Expr::constant(num("value")?)),
        "var" => {
            let i = obj
                .get("index")
                .and_then(serde_json::Value::as_u64)
                .ok_or_else(|| jerr("missing \"index\" for var".into()))?;
            Ok(Expr::var(i as usize))
        }
        "sum" => Ok(Expr::sum(args("args")?)),
        "prod" => {
            let a = args("args")?;
            if a.len() != 2 {
                return Err(jerr("prod takes exactly two args".into()));
            }
            let mut it = a.into_iter();
            Ok(Expr::prod(it.next().unwrap(), it.next().unwrap()))
        }
        "scale" => {
            let c = num("value")?;
            let a = args("args")?;
            if a.len() != 1 {
                return Err(jerr("scale takes exactly one arg".into()));
            }
            Ok(Expr::scale(c, a.into_iter().next().unwrap()))
        }
        "affine" => {
            let weights: Vec<f64> = obj
                .get("weights")
                .and_then(|w| serde_json::from_value(w.clone()).ok())
                .ok_or_else(|| jerr("missing \"weights\" for affine".into()))?;
            Expr::affine(weights, num("bias")?, args("args")?).map_err(dim_err)
        }
        "poly" => {
            #[derive(serde::Deserialize)]
            struct JTerm {
                coef: f64,
                powers: Vec<u32>,
            }
            let terms: Vec<JTerm> = obj
                .get("terms")
                .and_then(|t| serde_json::from_value(t.clone()).ok())
                .ok_or_else(|| jerr("missing \"terms\" for poly".into()))?;
            Expr::polynomial(
                terms
                    .into_iter()
                    .map(|t| PolyTerm {
                        coef: t.coef,
                        powers: t.powers,
                    })
                    .collect(),
                args("args")?,
            )
            .map_err(dim_err)
        }
        "compose" => {
            let f = obj
                .get("f")
                .ok_or_else(|| jerr("missing \"f\" for compose".into()))?;
            Expr::compose(expr_from_json(f)?, args("args")?).map_err(dim_err)
        }
        "swish" => {
            let a = args("args")?;
            Expr::prim(Primitive::Swish(num("beta")?), a).map_err(dim_err)
        }
        "huber" => {
            let a = args("args")?;
            Expr::prim(Primitive::Huber(num("beta")?), a).map_err(dim_err)
        }
        name => {
            let prim = match name {
                "relu" => Primitive::Relu,
                "abs" => Primitive::Abs,
                "max2" => Primitive::Max2,
                "min2" => Primitive::Min2,
                "softsign" => Primitive::Softsign,
                "logistic" => Primitive::Logistic,
                "tanh" => Primitive::Tanh,
                "softplus" => Primitive::Softplus,
                "mish" => Primitive::Mish,
                "elu" => Primitive::Elu,
                "gelu" => Primitive::Gelu,
                "arctan" => Primitive::Arctan,
                "exp" => Primitive::Exp,
                "log" => Primitive::Log,
                "erf" => Primitive::Erf,
                "sqrt" => Primitive::Sqrt,
                "hinge" => Primitive::Hinge,
                "square" => Primitive::Square,
                "sin" => Primitive::Sin,
                other => return Err(jerr(format!("unknown op {other:?}"))),
            };
            Expr::prim(prim, args("args")?).map_err(dim_err)
        }
    }
}

/// Emit the JSON structured form.
pub fn expr_to_json(expr: &Expr) -> serde_json::Value {
    use serde_json::json;
    match expr.kind() {
        ExprKind::Const(c) => json!({"op": "const", "value": c}),
        ExprKind::Var(i) => json!({"op": "var", "index": i}),
        ExprKind::Affine { weights, bias, args } => json!({
            "op": "affine",
            "weights": weights,
            "bias": bias,
            "args": args.iter().map(expr_to_json).collect::<Vec<_>>(),
        }),
        ExprKind::Poly { terms, args } => json!({
            "op": "poly",
            "terms": terms
                .iter()
                .map(|t| json!({"coef": t.coef, "powers": t.powers}))
                .collect::<Vec<_>>(),
            "args": args.iter().map(expr_to_json).collect::<Vec<_>>(),
        }),
        ExprKind::Prim { prim, args } => {
            let mut obj = serde_json::Map::new();
            obj.insert("op".into(), prim.name().into());
            match prim {
                Primitive::Swish(b) | Primitive::Huber(b) => {
                    obj.insert("beta".into(), json!(b));
                }
                _ => {}
            }
            obj.insert(
                "args".into(),
                json!(args.iter().map(expr_to_json).collect::<Vec<_>>()),
            );
            serde_json::Value::Object(obj)
        }
        ExprKind::Sum(args) => json!({
            "op": "sum",
            "args": args.iter().map(expr_to_json).collect::<Vec<_>>(),
        }),
        ExprKind::Prod(a, b) => json!({
            "op": "prod",
            "args": [expr_to_json(a), expr_to_json(b)],
        }),
        ExprKind::Scale(c, e) => json!({
            "op": "scale",
            "value": c,
            "args": [expr_to_json(e)],
        }),
        ExprKind::Compose { f, args } => json!({
            "op": "compose",
            "f": expr_to_json(f),
            "args": args.iter().map(expr_to_json).collect::<Vec<_>>(),
        }),
    }
}
