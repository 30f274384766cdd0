use std::cell::RefCell;
use std::rc::Rc;

use crate::syntax::ast::FunctionDecl;

use super::env::Env;

#[derive(Debug)]
pub struct Closure<'a> {
    pub decl: &'a FunctionDecl,
    pub env: Env<'a>,
}

#[derive(Debug, Clone)]
pub enum Value<'a> {
    Undefined,
    Bool(bool),
    Number(f64),
    Str(Rc<str>),
    Array(Rc<RefCell<Vec<Value<'a>>>>),
    Function(Rc<Closure<'a>>),
    /// The `console.log` builtin.
    Log,
}

impl<'a> Value<'a> {
    pub fn string(s: impl Into<Rc<str>>) -> Self {
        Value::Str(s.into())
    }

    pub fn array(items: Vec<Value<'a>>) -> Self {
        Value::Array(Rc::new(RefCell::new(items)))
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Undefined => "undefined",
            Value::Bool(_) => "boolean",
            Value::Number(_) => "number",
            Value::Str(_) => "string",
            Value::Array(_) => "object",
            Value::Function(_) | Value::Log => "function",
        }
    }

    pub fn truthy(&self) -> bool {
        match self {
            Value::Undefined => false,
            Value::Bool(b) => *b,
            Value::Number(n) => *n != 0.0 && !n.is_nan(),
            Value::Str(s) => !s.is_empty(),
            Value::Array(_) | Value::Function(_) | Value::Log => true,
        }
    }

    /// ECMAScript ToString.
    pub fn to_js_string(&self) -> String {
        match self {
            Value::Undefined => "undefined".into(),
            Value::Bool(b) => b.to_string(),
            Value::Number(n) => format_number(*n),
            Value::Str(s) => s.to_string(),
            Value::Array(items) => items
                .borrow()
                .iter()
                .map(|v| match v {
                    Value::Undefined => String::new(),
                    other => other.to_js_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
            Value::Function(c) => format!("function {}() {{ [code] }}", c.decl.name),
            Value::Log => "function log() { [native code] }".into(),
        }
    }

    /// ECMAScript ToNumber.
    pub fn to_number(&self) -> f64 {
        match self {
            Value::Undefined => f64::NAN,
            Value::Bool(b) => f64::from(u8::from(*b)),
            Value::Number(n) => *n,
            Value::Str(s) => string_to_number(s),
            Value::Array(_) => string_to_number(&self.to_js_string()),
            Value::Function(_) | Value::Log => f64::NAN,
        }
    }

    pub fn strict_equals(&self, other: &Value<'a>) -> bool {
        match (self, other) {
            (Value::Undefined, Value::Undefined) => true,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Number(a), Value::Number(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Array(a), Value::Array(b)) => Rc::ptr_eq(a, b),
            (Value::Function(a), Value::Function(b)) => Rc::ptr_eq(a, b),
            (Value::Log, Value::Log) => true,
            _ => false,
        }
    }

    /// Abstract equality restricted to the value kinds of the subset.
    pub fn loose_equals(&self, other: &Value<'a>) -> bool {
        use Value::*;
        match (self, other) {
            _ if std::mem::discriminant(self) == std::mem::discriminant(other) => {
                self.strict_equals(other)
            }
            (Undefined, _) | (_, Undefined) => false,
            (Bool(_), _) => Number(self.to_number()).loose_equals(other),
            (_, Bool(_)) => self.loose_equals(&Number(other.to_number())),
            (Number(a), Str(_)) => *a == other.to_number(),
            (Str(_), Number(b)) => self.to_number() == *b,
            (Array(_), Number(_) | Str(_)) => {
                Value::string(self.to_js_string()).loose_equals(other)
            }
            (Number(_) | Str(_), Array(_)) => {
                self.loose_equals(&Value::string(other.to_js_string()))
            }
            _ => false,
        }
    }
}

fn string_to_number(s: &str) -> f64 {
    let t = s.trim();
    if t.is_empty() {
        return 0.0;
    }
    match t {
        "Infinity" | "+Infinity" => return f64::INFINITY,
        "-Infinity" => return f64::NEG_INFINITY,
        _ => {}
    }
    let valid = t
        .trim_start_matches(['+', '-'])
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
    if !valid {
        return f64::NAN;
    }
    t.parse().unwrap_or(f64::NAN)
}

/// ECMAScript Number::toString for radix 10.
pub fn format_number(n: f64) -> String {
    if n.is_nan() {
        return "NaN".into();
    }
    if n == 0.0 {
        return "0".into();
    }
    if n.is_infinite() {
        return if n > 0.0 { "Infinity" } else { "-Infinity" }.into();
    }
    let sign = if n < 0.0 { "-" } else { "" };
    // Rust's `{:e}` yields the shortest round-tripping digit string.
    let sci = format!("{:e}", n.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let k = digits.len() as i32;
    let n_exp = exp.parse::<i32>().expect("exponent") + 1;

    let body = if k <= n_exp && n_exp <= 21 {
        format!("{digits}{}", "0".repeat((n_exp - k) as usize))
    } else if 0 < n_exp && n_exp <= 21 {
        let (int, frac) = digits.split_at(n_exp as usize);
        format!("{int}.{frac}")
    } else if -6 < n_exp && n_exp <= 0 {
        format!("0.{}{digits}", "0".repeat((-n_exp) as usize))
    } else {
        let e = n_exp - 1;
        let e_sign = if e < 0 { '-' } else { '+' };
        let (first, rest) = digits.split_at(1);
        if rest.is_empty() {
            format!("{first}e{e_sign}{}", e.abs())
        } else {
            format!("{first}.{rest}e{e_sign}{}", e.abs())
        }
    };
    format!("{sign}{body}")
}

/// Formatting of `console.log` arguments, following Node's inspect output
/// for the values this subset can produce. Arrays longer than six elements
/// are printed on one line, unlike Node's grouped layout.
pub fn inspect(v: &Value<'_>, top_level: bool) -> String {
    match v {
        Value::Str(s) if top_level => s.to_string(),
        Value::Str(s) => {
            if s.contains('\'') && !s.contains('"') {
                format!("\"{s}\"")
            } else {
                format!("'{}'", s.replace('\'', "\\'"))
            }
        }
        Value::Number(n) if *n == 0.0 && n.is_sign_negative() => "-0".into(),
        Value::Array(items) => {
            let items = items.borrow();
            if items.is_empty() {
                "[]".into()
            } else {
                let parts: Vec<String> = items.iter().map(|i| inspect(i, false)).collect();
                format!("[ {} ]", parts.join(", "))
            }
        }
        Value::Function(c) => format!("[Function: {}]", c.decl.name),
        Value::Log => "[Function: log]".into(),
        other => other.to_js_string(),
    }
}
