//! Sandboxed tree-walking interpreter.
//!
//! Execution is a pure function of the program and [`ExecConfig`]: no
//! clocks, no I/O, no host randomness. Every statement and expression
//! evaluation costs one step, and the first runtime error halts the run.

mod env;
pub mod value;

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::diagnostic::Diagnostic;
use crate::syntax::ast::*;
use crate::syntax::Span;
use env::{AssignError, Env};
use value::{format_number, inspect, Closure, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_steps: u64,
    pub max_output_lines: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_steps: 1_000_000,
            max_output_lines: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecConfig {
    pub limits: Limits,
    /// Out-of-range array reads raise instead of yielding `undefined`.
    pub strict_indexing: bool,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            limits: Limits::default(),
            strict_indexing: true,
        }
    }
}

/// Nested user-function calls allowed before a stack overflow error.
pub const MAX_CALL_DEPTH: usize = 150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Halt {
    Normal,
    Error,
    Limit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionResult {
    pub console_lines: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
    pub halted: Halt,
}

enum Abort {
    Error(Diagnostic),
    Limit(Diagnostic),
}

type Eval<T> = Result<T, Abort>;

enum Flow<'a> {
    Normal,
    Return(Value<'a>),
}

fn error_at(span: Span, message: impl Into<String>) -> Abort {
    Abort::Error(Diagnostic::runtime(message, span.start.line, span.start.col))
}

pub fn execute(program: &Program, config: &ExecConfig) -> ExecutionResult {
    let mut machine = Machine {
        config,
        steps: 0,
        depth: 0,
        console: Vec::new(),
    };
    let root = Env::root();
    let outcome = machine.run_body(&program.body, &root);
    root.clear();
    let (halted, diagnostics) = match outcome {
        Ok(_) => (Halt::Normal, Vec::new()),
        Err(Abort::Error(d)) => (Halt::Error, vec![d]),
        Err(Abort::Limit(d)) => (Halt::Limit, vec![d]),
    };
    ExecutionResult {
        console_lines: machine.console,
        diagnostics,
        halted,
    }
}

struct Machine<'c> {
    config: &'c ExecConfig,
    steps: u64,
    depth: usize,
    console: Vec<String>,
}

impl<'c> Machine<'c> {
    fn tick(&mut self, span: Span) -> Eval<()> {
        self.steps += 1;
        if self.steps > self.config.limits.max_steps {
            return Err(Abort::Limit(Diagnostic::runtime(
                "execution limit exceeded",
                span.start.line,
                span.start.col,
            )));
        }
        Ok(())
    }

    /// Hoists function declarations, then runs statements in order.
    fn run_body<'a>(&mut self, body: &'a [Stmt], env: &Env<'a>) -> Eval<Flow<'a>> {
        for stmt in body {
            if let StmtKind::Function(decl) = &stmt.kind {
                let closure = Closure {
                    decl,
                    env: env.clone(),
                };
                if !env.declare(&decl.name, Value::Function(Rc::new(closure)), true) {
                    return Err(error_at(
                        decl.name_span,
                        format!("Identifier '{}' has already been declared", decl.name),
                    ));
                }
            }
        }
        for stmt in body {
            if let Flow::Return(v) = self.exec(stmt, env)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn exec<'a>(&mut self, stmt: &'a Stmt, env: &Env<'a>) -> Eval<Flow<'a>> {
        self.tick(stmt.span)?;
        match &stmt.kind {
            StmtKind::Function(_) | StmtKind::Empty => Ok(Flow::Normal),
            StmtKind::Block(block) => self.run_body(&block.body, &env.child(false)),
            StmtKind::VarDecl {
                kind,
                name,
                name_span,
                init,
            } => {
                let value = match init {
                    Some(e) => self.eval(e, env)?,
                    None => Value::Undefined,
                };
                let ok = match kind {
                    DeclKind::Var => env.declare_var(name, value),
                    DeclKind::Let => env.declare(name, value, true),
                    DeclKind::Const => env.declare(name, value, false),
                };
                if !ok {
                    return Err(error_at(
                        *name_span,
                        format!("Identifier '{name}' has already been declared"),
                    ));
                }
                Ok(Flow::Normal)
            }
            StmtKind::If {
                cond,
                then,
                otherwise,
            } => {
                if self.eval(cond, env)?.truthy() {
                    self.exec(then, env)
                } else if let Some(other) = otherwise {
                    self.exec(other, env)
                } else {
                    Ok(Flow::Normal)
                }
            }
            StmtKind::For {
                init,
                test,
                update,
                body,
            } => {
                let scope = env.child(false);
                if let Some(init) = init {
                    self.exec(init, &scope)?;
                }
                loop {
                    if let Some(test) = test {
                        if !self.eval(test, &scope)?.truthy() {
                            break;
                        }
                    }
                    if let Flow::Return(v) = self.exec(body, &scope)? {
                        return Ok(Flow::Return(v));
                    }
                    if let Some(update) = update {
                        self.eval(update, &scope)?;
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::While { cond, body } => {
                while self.eval(cond, env)?.truthy() {
                    if let Flow::Return(v) = self.exec(body, env)? {
                        return Ok(Flow::Return(v));
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::Return(value) => {
                let v = match value {
                    Some(e) => self.eval(e, env)?,
                    None => Value::Undefined,
                };
                Ok(Flow::Return(v))
            }
            StmtKind::Expr(e) => {
                self.eval(e, env)?;
                Ok(Flow::Normal)
            }
        }
    }

    fn lookup<'a>(&self, name: &str, span: Span, env: &Env<'a>) -> Eval<Value<'a>> {
        env.get(name)
            .ok_or_else(|| error_at(span, format!("{name} is not defined")))
    }

    fn eval<'a>(&mut self, expr: &'a Expr, env: &Env<'a>) -> Eval<Value<'a>> {
        self.tick(expr.span)?;
        match &expr.kind {
            ExprKind::Identifier(name) => {
                if name == "undefined" {
                    return Ok(Value::Undefined);
                }
                self.lookup(name, expr.span, env)
            }
            ExprKind::Literal(lit) => Ok(match lit {
                Literal::Number(n) => Value::Number(*n),
                Literal::String(s) => Value::string(s.as_str()),
                Literal::Bool(b) => Value::Bool(*b),
            }),
            ExprKind::Array(items) => {
                let values = items
                    .iter()
                    .map(|e| self.eval(e, env))
                    .collect::<Eval<Vec<_>>>()?;
                Ok(Value::array(values))
            }
            ExprKind::Index { object, index } => {
                let target = self.eval(object, env)?;
                let key = self.eval(index, env)?;
                self.read_index(expr, object, &target, &key)
            }
            ExprKind::Member { object, property } => {
                if property == "log" {
                    if let ExprKind::Identifier(name) = &object.kind {
                        if name == "console" && env.get("console").is_none() {
                            return Ok(Value::Log);
                        }
                    }
                }
                let target = self.eval(object, env)?;
                match (&target, property.as_str()) {
                    (Value::Array(items), "length") => Ok(Value::Number(items.borrow().len() as f64)),
                    (Value::Str(s), "length") => {
                        Ok(Value::Number(s.encode_utf16().count() as f64))
                    }
                    (Value::Undefined, _) => Err(error_at(
                        object.span,
                        format!("Cannot read properties of undefined (reading '{property}')"),
                    )),
                    _ => Ok(Value::Undefined),
                }
            }
            ExprKind::Call { callee, args } => {
                let function = self.eval(callee, env)?;
                let values = args
                    .iter()
                    .map(|e| self.eval(e, env))
                    .collect::<Eval<Vec<_>>>()?;
                self.call(expr, callee, function, values)
            }
            ExprKind::Binary { op, left, right } => {
                let l = self.eval(left, env)?;
                match op {
                    BinaryOp::And if !l.truthy() => return Ok(l),
                    BinaryOp::Or if l.truthy() => return Ok(l),
                    BinaryOp::And | BinaryOp::Or => return self.eval(right, env),
                    _ => {}
                }
                let r = self.eval(right, env)?;
                Ok(binary(*op, &l, &r))
            }
            ExprKind::Unary { op, operand } => {
                let v = self.eval(operand, env)?;
                Ok(match op {
                    UnaryOp::Not => Value::Bool(!v.truthy()),
                    UnaryOp::Neg => Value::Number(-v.to_number()),
                })
            }
            ExprKind::Update { op, prefix, target } => {
                let old = self.eval(target, env)?.to_number();
                let new = match op {
                    UpdateOp::Increment => old + 1.0,
                    UpdateOp::Decrement => old - 1.0,
                };
                self.store(target, Value::Number(new), env)?;
                Ok(Value::Number(if *prefix { new } else { old }))
            }
            ExprKind::Assign { op, target, value } => {
                let v = match op {
                    None => self.eval(value, env)?,
                    Some(op) => {
                        let current = self.eval(target, env)?;
                        let rhs = self.eval(value, env)?;
                        binary(*op, &current, &rhs)
                    }
                };
                self.store(target, v.clone(), env)?;
                Ok(v)
            }
        }
    }

    fn read_index<'a>(
        &self,
        expr: &Expr,
        object: &Expr,
        target: &Value<'a>,
        key: &Value<'a>,
    ) -> Eval<Value<'a>> {
        let out_of_bounds = || {
            let name = match &object.kind {
                ExprKind::Identifier(n) => n.as_str(),
                _ => "array",
            };
            error_at(
                expr.span,
                format!(
                    "index out of bounds: {name}[{}]",
                    inspect(key, false)
                ),
            )
        };
        let slot = index_slot(key);
        match target {
            Value::Array(items) => {
                let items = items.borrow();
                match slot.and_then(|i| items.get(i)) {
                    Some(v) => Ok(v.clone()),
                    None if self.config.strict_indexing => Err(out_of_bounds()),
                    None => Ok(Value::Undefined),
                }
            }
            Value::Str(s) => {
                let units: Vec<u16> = s.encode_utf16().collect();
                match slot.and_then(|i| units.get(i)) {
                    Some(u) => Ok(Value::string(String::from_utf16_lossy(&[*u]))),
                    None if self.config.strict_indexing => Err(out_of_bounds()),
                    None => Ok(Value::Undefined),
                }
            }
            Value::Undefined => Err(error_at(
                expr.span,
                format!(
                    "Cannot read properties of undefined (reading '{}')",
                    key.to_js_string()
                ),
            )),
            _ => Ok(Value::Undefined),
        }
    }

    fn store<'a>(&mut self, target: &'a Expr, value: Value<'a>, env: &Env<'a>) -> Eval<()> {
        match &target.kind {
            ExprKind::Identifier(name) => env.assign(name, value).map_err(|e| match e {
                AssignError::Undeclared => error_at(target.span, format!("{name} is not defined")),
                AssignError::Constant => error_at(target.span, "Assignment to constant variable."),
            }),
            ExprKind::Index { object, index } => {
                let container = self.eval(object, env)?;
                let key = self.eval(index, env)?;
                match container {
                    Value::Array(items) => {
                        let mut items = items.borrow_mut();
                        match index_slot(&key) {
                            Some(i) if i < items.len() => items[i] = value,
                            Some(i) if i == items.len() || !self.config.strict_indexing => {
                                items.resize(i, Value::Undefined);
                                items.push(value);
                            }
                            _ if self.config.strict_indexing => {
                                return Err(error_at(
                                    target.span,
                                    format!("index out of bounds: {}", key.to_js_string()),
                                ))
                            }
                            _ => {}
                        }
                        Ok(())
                    }
                    Value::Undefined => Err(error_at(
                        target.span,
                        format!(
                            "Cannot set properties of undefined (setting '{}')",
                            key.to_js_string()
                        ),
                    )),
                    _ => Ok(()),
                }
            }
            _ => Err(error_at(target.span, "Invalid assignment target")),
        }
    }

    fn call<'a>(
        &mut self,
        expr: &'a Expr,
        callee: &'a Expr,
        function: Value<'a>,
        args: Vec<Value<'a>>,
    ) -> Eval<Value<'a>> {
        match function {
            Value::Log => {
                if self.console.len() >= self.config.limits.max_output_lines {
                    return Err(Abort::Limit(Diagnostic::runtime(
                        "execution limit exceeded",
                        expr.span.start.line,
                        expr.span.start.col,
                    )));
                }
                let line = args
                    .iter()
                    .map(|v| inspect(v, true))
                    .collect::<Vec<_>>()
                    .join(" ");
                self.console.push(line);
                Ok(Value::Undefined)
            }
            Value::Function(closure) => {
                if self.depth >= MAX_CALL_DEPTH {
                    return Err(error_at(expr.span, "Maximum call stack size exceeded"));
                }
                let scope = closure.env.child(true);
                let decl = closure.decl;
                let mut args = args.into_iter();
                for param in &decl.params {
                    scope.declare(param, args.next().unwrap_or(Value::Undefined), true);
                }
                self.depth += 1;
                let flow = self.run_body(&decl.body.body, &scope);
                self.depth -= 1;
                Ok(match flow? {
                    Flow::Return(v) => v,
                    Flow::Normal => Value::Undefined,
                })
            }
            _ => {
                let name = describe(callee);
                Err(error_at(callee.span, format!("{name} is not a function")))
            }
        }
    }
}

fn describe(expr: &Expr) -> String {
    match &expr.kind {
        ExprKind::Identifier(n) => n.clone(),
        ExprKind::Member { object, property } => format!("{}.{property}", describe(object)),
        ExprKind::Index { object, .. } => format!("{}[...]", describe(object)),
        _ => "expression".into(),
    }
}

/// Array slot for an index value: a non-negative integer below 2^32.
fn index_slot(key: &Value<'_>) -> Option<usize> {
    let n = match key {
        Value::Number(n) => *n,
        Value::Str(s) => {
            let n = s.parse::<f64>().ok()?;
            if format_number(n) != **s {
                return None;
            }
            n
        }
        _ => return None,
    };
    (n >= 0.0 && n.fract() == 0.0 && n < 4_294_967_295.0).then_some(n as usize)
}

fn binary<'a>(op: BinaryOp, l: &Value<'a>, r: &Value<'a>) -> Value<'a> {
    use BinaryOp::*;
    let num = |f: fn(f64, f64) -> f64| Value::Number(f(l.to_number(), r.to_number()));
    match op {
        Add => {
            let stringy = |v: &Value<'_>| matches!(v, Value::Str(_) | Value::Array(_) | Value::Function(_) | Value::Log);
            if stringy(l) || stringy(r) {
                Value::string(format!("{}{}", l.to_js_string(), r.to_js_string()))
            } else {
                num(|a, b| a + b)
            }
        }
        Sub => num(|a, b| a - b),
        Mul => num(|a, b| a * b),
        Div => num(|a, b| a / b),
        Rem => num(|a, b| a % b),
        Lt | Gt | Le | Ge => Value::Bool(compare(op, l, r)),
        StrictEq => Value::Bool(l.strict_equals(r)),
        StrictNe => Value::Bool(!l.strict_equals(r)),
        LooseEq => Value::Bool(l.loose_equals(r)),
        LooseNe => Value::Bool(!l.loose_equals(r)),
        And | Or => unreachable!("short-circuit operators are evaluated lazily"),
    }
}

fn compare(op: BinaryOp, l: &Value<'_>, r: &Value<'_>) -> bool {
    use std::cmp::Ordering;
    let as_string = |v: &Value<'_>| match v {
        Value::Str(s) => Some(s.to_string()),
        Value::Array(_) => Some(v.to_js_string()),
        _ => None,
    };
    let ord = match (as_string(l), as_string(r)) {
        (Some(a), Some(b)) => Some(a.encode_utf16().cmp(b.encode_utf16())),
        _ => l.to_number().partial_cmp(&r.to_number()),
    };
    match (op, ord) {
        (_, None) => false,
        (BinaryOp::Lt, Some(o)) => o == Ordering::Less,
        (BinaryOp::Gt, Some(o)) => o == Ordering::Greater,
        (BinaryOp::Le, Some(o)) => o != Ordering::Greater,
        (BinaryOp::Ge, Some(o)) => o != Ordering::Less,
        _ => false,
    }
}

/// Parses and runs source text; syntax errors come back as a single
/// diagnostic with `halted == Error`.
pub fn run_source(source: &str, config: &ExecConfig) -> ExecutionResult {
    let parsed = crate::syntax::tokenize(source).and_then(|t| crate::syntax::parse(&t));
    match parsed {
        Ok(program) => execute(&program, config),
        Err(diag) => ExecutionResult {
            console_lines: Vec::new(),
            diagnostics: vec![diag],
            halted: Halt::Error,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DiagnosticKind;

    fn run(src: &str) -> ExecutionResult {
        run_source(src, &ExecConfig::default())
    }

    #[test]
    fn arithmetic_and_logging() {
        let r = run("let a = 7; let b = 2;\nconsole.log(a / b, a % b, -a, \"n=\" + a);");
        assert_eq!(r.console_lines, ["3.5 1 -7 n=7"]);
        assert_eq!(r.halted, Halt::Normal);
    }

    #[test]
    fn undeclared_identifier() {
        let r = run("let x = 1;\nconsole.log(x);\nconsole.log(y);");
        assert_eq!(r.console_lines, ["1"]);
        assert_eq!(r.halted, Halt::Error);
        let d = &r.diagnostics[0];
        assert_eq!(d.kind, DiagnosticKind::Runtime);
        assert_eq!(d.message, "y is not defined");
        assert_eq!((d.line, d.col), (3, 12));
    }

    #[test]
    fn strict_and_permissive_indexing() {
        let src = "const e = [1, 2];\nconsole.log(e[2]);";
        let r = run(src);
        assert_eq!(r.diagnostics[0].message, "index out of bounds: e[2]");
        let r = run_source(
            src,
            &ExecConfig {
                strict_indexing: false,
                ..ExecConfig::default()
            },
        );
        assert_eq!(r.console_lines, ["undefined"]);
        assert_eq!(r.halted, Halt::Normal);
    }

    #[test]
    fn step_limit_halts_infinite_loop() {
        let r = run_source(
            "while (true) { }",
            &ExecConfig {
                limits: Limits {
                    max_steps: 1000,
                    max_output_lines: 10,
                },
                strict_indexing: true,
            },
        );
        assert_eq!(r.halted, Halt::Limit);
        assert_eq!(r.diagnostics[0].message, "execution limit exceeded");
    }

    #[test]
    fn output_limit() {
        let r = run_source(
            "for (let i = 0; i < 5; i++) { console.log(i); }",
            &ExecConfig {
                limits: Limits {
                    max_steps: 1000,
                    max_output_lines: 3,
                },
                strict_indexing: true,
            },
        );
        assert_eq!(r.console_lines, ["0", "1", "2"]);
        assert_eq!(r.halted, Halt::Limit);
    }

    #[test]
    fn recursion_and_closures() {
        let r = run(
            "function fact(n) { if (n <= 1) { return 1; } return n * fact(n - 1); }\n\
             function counter() { let c = 0; function inc() { c++; return c; } inc(); return inc(); }\n\
             console.log(fact(10), counter());",
        );
        assert_eq!(r.console_lines, ["3628800 2"]);
    }

    #[test]
    fn runaway_recursion_is_an_error() {
        let r = run("function f(n) { return f(n + 1); }\nf(0);");
        assert_eq!(r.halted, Halt::Error);
        assert_eq!(r.diagnostics[0].message, "Maximum call stack size exceeded");
    }

    #[test]
    fn const_assignment_and_non_function_call() {
        let r = run("const c = 1;\nc = 2;");
        assert_eq!(r.diagnostics[0].message, "Assignment to constant variable.");
        let r = run("let n = 3;\nn();");
        assert_eq!(r.diagnostics[0].message, "n is not a function");
    }

    #[test]
    fn syntax_errors_surface_from_run_source() {
        let r = run("let = 3;");
        assert_eq!(r.diagnostics[0].kind, DiagnosticKind::Syntax);
        assert!(r.console_lines.is_empty());
    }

    #[test]
    fn strings_arrays_and_equality() {
        let r = run(
            "let s = \"abc\";\nlet a = [1, [2, 3], \"x\"];\n\
             console.log(s.length, s[1], a.length, a[1][0]);\n\
             console.log(a);\nconsole.log(1 == \"1\", 1 === \"1\", \"b\" > \"a\", 2 < \"10\");\n\
             a[3] = 4;\nconsole.log(a.length, a + \"\");",
        );
        assert_eq!(
            r.console_lines,
            [
                "3 b 3 2",
                "[ 1, [ 2, 3 ], 'x' ]",
                "true false true true",
                "4 1,2,3,x,4"
            ]
        );
    }

    #[test]
    fn var_is_function_scoped() {
        let r = run("function f() { if (true) { var v = 5; } return v; }\nconsole.log(f());");
        assert_eq!(r.console_lines, ["5"]);
    }

    #[test]
    fn deterministic() {
        let src = "let t = 0; for (let i = 0; i < 100; i++) { t += i * 0.1; } console.log(t);";
        assert_eq!(run(src), run(src));
    }
}
