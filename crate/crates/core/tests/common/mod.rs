//! Random program and document generators shared by the integration and
//! acceptance tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub const CORPUS_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/corpus");
pub const ORACLE_FIXTURE: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/tests/fixtures/oracle/programs.json"
);
pub const ORACLE_SEED: u64 = 0x4ac1_0001;
pub const ORACLE_PROGRAMS: usize = 50;

pub fn corpus(name: &str) -> String {
    std::fs::read_to_string(format!("{CORPUS_DIR}/{name}")).unwrap()
}

// ---------------------------------------------------------------------------
// Programs for interpreter differential testing
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Ty {
    Num,
    Str,
    Bool,
    Arr,
}

#[derive(Clone, Debug)]
struct Var {
    name: String,
    ty: Ty,
    mutable: bool,
    /// Array length, fixed at declaration.
    len: usize,
}

struct NumFn {
    name: String,
    arity: usize,
}

const WORDS: &[&str] = &["alpha", "beta", "x", "Hello", "done", "a b", "", "42", "-"];

/// Emits well-defined, terminating programs that never index out of range,
/// so output is the same with or without strict indexing.
pub struct ProgramGen<'r> {
    rng: &'r mut TestRng,
    scopes: Vec<Vec<Var>>,
    fns: Vec<NumFn>,
    out: String,
    indent: usize,
    next_id: usize,
    logs: usize,
}

impl<'r> ProgramGen<'r> {
    pub fn new(rng: &'r mut TestRng) -> Self {
        ProgramGen {
            rng,
            scopes: vec![Vec::new()],
            fns: Vec::new(),
            out: String::new(),
            indent: 0,
            next_id: 0,
            logs: 0,
        }
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.next_id += 1;
        format!("{prefix}{}", self.next_id)
    }

    fn line(&mut self, text: &str) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn vars(&self, ty: Ty, need_mut: bool) -> Vec<Var> {
        self.scopes
            .iter()
            .flatten()
            .filter(|v| v.ty == ty && (!need_mut || v.mutable))
            .cloned()
            .collect()
    }

    fn num_lit(&mut self) -> String {
        match self.rng.gen_range(0..10) {
            0 => format!("{}.{}", self.rng.gen_range(0..10), self.rng.gen_range(1..100)),
            1 => "0.1".to_string(),
            _ => self.rng.gen_range(0..20).to_string(),
        }
    }

    fn num_expr(&mut self, depth: u32) -> String {
        let choice = if depth == 0 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..10) };
        match choice {
            0 | 1 => {
                let vars = self.vars(Ty::Num, false);
                match vars.choose(self.rng) {
                    Some(v) => v.name.clone(),
                    None => self.num_lit(),
                }
            }
            2 => self.num_lit(),
            3..=5 => {
                let op = ["+", "-", "*", "/", "%"].choose(self.rng).unwrap();
                let a = self.num_expr(depth - 1);
                let b = self.num_expr(depth - 1);
                format!("({a} {op} {b})")
            }
            // parenthesized so a nested minus never lexes as `--`
            6 => format!("-({})", self.num_expr(depth - 1)),
            7 => {
                let arrs = self.vars(Ty::Arr, false);
                match arrs.choose(self.rng) {
                    Some(a) if self.rng.gen_bool(0.5) => format!("{}.length", a.name),
                    Some(a) => format!("{}[{}]", a.name, self.rng.gen_range(0..a.len)),
                    None => self.num_lit(),
                }
            }
            8 => {
                if self.fns.is_empty() {
                    return self.num_lit();
                }
                let i = self.rng.gen_range(0..self.fns.len());
                let (name, arity) = (self.fns[i].name.clone(), self.fns[i].arity);
                if name == "fact" {
                    // keeps recursion shallow and away from NaN
                    return format!("fact({})", self.rng.gen_range(0..9));
                }
                let args: Vec<String> = (0..arity).map(|_| self.num_expr(depth - 1)).collect();
                format!("{name}({})", args.join(", "))
            }
            _ => {
                let s = self.str_expr(depth - 1);
                format!("{s}.length")
            }
        }
    }

    fn str_lit(&mut self) -> String {
        format!("\"{}\"", WORDS.choose(self.rng).unwrap())
    }

    fn str_expr(&mut self, depth: u32) -> String {
        let choice = if depth == 0 { self.rng.gen_range(0..2) } else { self.rng.gen_range(0..5) };
        match choice {
            0 => {
                let vars = self.vars(Ty::Str, false);
                match vars.choose(self.rng) {
                    Some(v) => v.name.clone(),
                    None => self.str_lit(),
                }
            }
            1 => self.str_lit(),
            2 => format!("({} + {})", self.str_expr(depth - 1), self.str_expr(depth - 1)),
            3 => format!("({} + {})", self.str_expr(depth - 1), self.num_expr(depth - 1)),
            _ => format!("({} + {})", self.bool_expr(depth - 1), self.str_expr(depth - 1)),
        }
    }

    fn bool_expr(&mut self, depth: u32) -> String {
        let choice = if depth == 0 { self.rng.gen_range(0..2) } else { self.rng.gen_range(0..6) };
        match choice {
            0 => {
                let vars = self.vars(Ty::Bool, false);
                match vars.choose(self.rng) {
                    Some(v) => v.name.clone(),
                    None => if self.rng.gen() { "true" } else { "false" }.to_string(),
                }
            }
            1 => if self.rng.gen() { "true" } else { "false" }.to_string(),
            2 | 3 => {
                let op = ["<", ">", "<=", ">=", "==", "===", "!=", "!=="].choose(self.rng).unwrap();
                format!("({} {op} {})", self.num_expr(depth - 1), self.num_expr(depth - 1))
            }
            4 => {
                let op = ["&&", "||"].choose(self.rng).unwrap();
                format!("({} {op} {})", self.bool_expr(depth - 1), self.bool_expr(depth - 1))
            }
            _ => format!("!{}", self.bool_expr(depth - 1)),
        }
    }

    fn any_expr(&mut self, depth: u32) -> String {
        match self.rng.gen_range(0..5) {
            0 | 1 => self.num_expr(depth),
            2 => self.str_expr(depth),
            3 => self.bool_expr(depth),
            _ => {
                let arrs = self.vars(Ty::Arr, false);
                match arrs.choose(self.rng) {
                    Some(a) => a.name.clone(),
                    None => self.num_expr(depth),
                }
            }
        }
    }

    fn declare(&mut self, ty: Ty) {
        let mutable = self.rng.gen_bool(0.8);
        let kw = if mutable { "let" } else { "const" };
        let name = self.fresh(match ty {
            Ty::Num => "n",
            Ty::Str => "s",
            Ty::Bool => "b",
            Ty::Arr => "arr",
        });
        let (init, len) = match ty {
            Ty::Num => (self.num_expr(2), 0),
            Ty::Str => (self.str_expr(2), 0),
            Ty::Bool => (self.bool_expr(2), 0),
            Ty::Arr => {
                let len = self.rng.gen_range(1..6);
                let items: Vec<String> = (0..len).map(|_| self.rng.gen_range(-5..30).to_string()).collect();
                (format!("[{}]", items.join(", ")), len)
            }
        };
        self.line(&format!("{kw} {name} = {init};"));
        self.scopes.last_mut().unwrap().push(Var {
            name,
            ty,
            mutable,
            len,
        });
    }

    fn log(&mut self) {
        self.logs += 1;
        let first = self.any_expr(2);
        if self.rng.gen_bool(0.2) {
            let second = self.any_expr(1);
            self.line(&format!("console.log({first}, {second});"));
        } else {
            self.line(&format!("console.log({first});"));
        }
    }

    fn block(&mut self, head: &str, depth: u32, loop_var: Option<Var>) {
        self.line(&format!("{head} {{"));
        self.indent += 1;
        self.scopes.push(loop_var.into_iter().collect());
        let n = self.rng.gen_range(1..4);
        for _ in 0..n {
            self.stmt(depth - 1);
        }
        self.scopes.pop();
        self.indent -= 1;
    }

    fn stmt(&mut self, depth: u32) {
        let choice = if depth == 0 { self.rng.gen_range(0..5) } else { self.rng.gen_range(0..9) };
        match choice {
            0 => {
                let ty = *[Ty::Num, Ty::Num, Ty::Str, Ty::Bool, Ty::Arr].choose(self.rng).unwrap();
                self.declare(ty);
            }
            1 | 2 => self.log(),
            3 => {
                let nums = self.vars(Ty::Num, true);
                let strs = self.vars(Ty::Str, true);
                let arrs = self.vars(Ty::Arr, false);
                match self.rng.gen_range(0..4) {
                    0 if !nums.is_empty() => {
                        let v = nums.choose(self.rng).unwrap().name.clone();
                        let op = ["=", "+=", "-=", "*="].choose(self.rng).unwrap();
                        let e = self.num_expr(2);
                        self.line(&format!("{v} {op} {e};"));
                    }
                    1 if !strs.is_empty() => {
                        let v = strs.choose(self.rng).unwrap().name.clone();
                        let e = self.str_expr(1);
                        self.line(&format!("{v} += {e};"));
                    }
                    2 if !arrs.is_empty() => {
                        let a = arrs.choose(self.rng).unwrap().clone();
                        let i = self.rng.gen_range(0..a.len);
                        let e = self.num_expr(1);
                        self.line(&format!("{}[{i}] = {e};", a.name));
                    }
                    _ if !nums.is_empty() => {
                        let v = nums.choose(self.rng).unwrap().name.clone();
                        let op = ["++", "--"].choose(self.rng).unwrap();
                        if self.rng.gen() {
                            self.line(&format!("{v}{op};"));
                        } else {
                            self.line(&format!("{op}{v};"));
                        }
                    }
                    _ => self.log(),
                }
            }
            4 => self.log(),
            5 | 6 => {
                let cond = self.bool_expr(2);
                self.block(&format!("if ({cond})"), depth, None);
                match self.rng.gen_range(0..3) {
                    0 => {
                        let cond = self.bool_expr(1);
                        self.block(&format!("}} else if ({cond})"), depth, None);
                        self.block("} else", depth, None);
                    }
                    1 => self.block("} else", depth, None),
                    _ => {}
                }
                self.line("}");
            }
            7 => {
                let i = self.fresh("i");
                let bound = self.rng.gen_range(0..5);
                let var = Var {
                    name: i.clone(),
                    ty: Ty::Num,
                    mutable: false,
                    len: 0,
                };
                self.block(&format!("for (let {i} = 0; {i} < {bound}; {i}++)"), depth, Some(var));
                self.line("}");
            }
            _ => {
                let k = self.fresh("k");
                let bound = self.rng.gen_range(0..4);
                self.line(&format!("let {k} = 0;"));
                let var = Var {
                    name: k.clone(),
                    ty: Ty::Num,
                    mutable: false,
                    len: 0,
                };
                self.block(&format!("while ({k} < {bound})"), depth, Some(var));
                self.indent += 1;
                self.line(&format!("{k}++;"));
                self.indent -= 1;
                self.line("}");
            }
        }
    }

    fn function(&mut self) {
        let name = self.fresh("f");
        let arity = self.rng.gen_range(0..3);
        let params: Vec<String> = (0..arity).map(|p| format!("p{p}")).collect();
        self.line(&format!("function {name}({}) {{", params.join(", ")));
        self.indent += 1;
        let saved = std::mem::replace(
            &mut self.scopes,
            vec![params
                .iter()
                .map(|p| Var {
                    name: p.clone(),
                    ty: Ty::Num,
                    mutable: true,
                    len: 0,
                })
                .collect()],
        );
        for _ in 0..self.rng.gen_range(0..3) {
            self.declare(Ty::Num);
        }
        if self.rng.gen_bool(0.4) {
            let cond = self.bool_expr(1);
            let e = self.num_expr(2);
            self.line(&format!("if ({cond}) {{"));
            self.indent += 1;
            self.line(&format!("return {e};"));
            self.indent -= 1;
            self.line("}");
        }
        let e = self.num_expr(2);
        self.line(&format!("return {e};"));
        self.scopes = saved;
        self.indent -= 1;
        self.line("}");
        self.fns.push(NumFn { name, arity });
    }

    pub fn program(mut self) -> String {
        if self.rng.gen_bool(0.3) {
            self.line("function fact(n) {");
            self.line("    if (n <= 1) {");
            self.line("        return 1;");
            self.line("    }");
            self.line("    return n * fact(n - 1);");
            self.line("}");
            self.fns.push(NumFn {
                name: "fact".into(),
                arity: 1,
            });
        }
        for _ in 0..self.rng.gen_range(0..3) {
            self.function();
        }
        for _ in 0..self.rng.gen_range(4..10) {
            self.stmt(2);
        }
        if self.logs == 0 {
            self.log();
        }
        self.out
    }
}

pub fn gen_program(rng: &mut TestRng) -> String {
    ProgramGen::new(rng).program()
}

// ---------------------------------------------------------------------------
// Documents with known control-structure lines
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ctl {
    If,
    Loop,
}

/// Where the generator placed control structures. Independent of the parser.
#[derive(Debug, Clone, Default)]
pub struct LineTruth {
    pub opens: Vec<Ctl>,
    pub closes: Vec<Ctl>,
}

pub struct StructuredDoc {
    pub text: String,
    /// Index 0 is line 1.
    pub truth: Vec<LineTruth>,
}

struct DocGen<'r> {
    rng: &'r mut TestRng,
    lines: Vec<String>,
    truth: Vec<LineTruth>,
    unit: &'static str,
}

impl DocGen<'_> {
    fn push(&mut self, depth: usize, text: &str) -> usize {
        self.lines.push(format!("{}{}", self.unit.repeat(depth), text));
        self.truth.push(LineTruth::default());
        self.lines.len() - 1
    }

    fn simple(&mut self, depth: usize) {
        let s = *[
            "x = x + 1;",
            "console.log(x);",
            "let y = [1, 2];",
            "// note",
            "total += y[0];",
            "f(x, 2);",
        ]
        .choose(self.rng)
        .unwrap();
        self.push(depth, s);
        if self.rng.gen_bool(0.15) {
            self.push(0, "");
        }
    }

    fn body(&mut self, depth: usize, budget: u32) {
        for _ in 0..self.rng.gen_range(1..4) {
            self.stmt(depth, budget);
        }
    }

    fn stmt(&mut self, depth: usize, budget: u32) {
        if budget == 0 {
            return self.simple(depth);
        }
        match self.rng.gen_range(0..7) {
            0..=2 => self.simple(depth),
            3 => {
                // if / else-if / else chain, one open and one close
                let start = self.push(depth, "if (x > 1) {");
                self.truth[start].opens.push(Ctl::If);
                self.body(depth + 1, budget - 1);
                for _ in 0..self.rng.gen_range(0..3) {
                    let head = if self.rng.gen() { "} else if (x < 0) {" } else { "} else {" };
                    self.push(depth, head);
                    self.body(depth + 1, budget - 1);
                    if head == "} else {" {
                        break;
                    }
                }
                let end = self.push(depth, "}");
                self.truth[end].closes.push(Ctl::If);
            }
            4 => {
                let head = if self.rng.gen() {
                    "for (let i = 0; i < 3; i++) {"
                } else {
                    "while (x < 10) {"
                };
                let start = self.push(depth, head);
                self.truth[start].opens.push(Ctl::Loop);
                self.body(depth + 1, budget - 1);
                let end = self.push(depth, "}");
                self.truth[end].closes.push(Ctl::Loop);
            }
            5 => {
                // single-line forms open and close on the same line
                let (text, kind) = if self.rng.gen() {
                    ("if (x) x = 0;", Ctl::If)
                } else {
                    ("while (x > 5) x--;", Ctl::Loop)
                };
                let at = self.push(depth, text);
                self.truth[at].opens.push(kind);
                self.truth[at].closes.push(kind);
            }
            _ => {
                self.push(depth, "function g(a) {");
                self.body(depth + 1, budget - 1);
                self.push(depth, "}");
            }
        }
    }
}

pub fn gen_structured_doc(rng: &mut TestRng) -> StructuredDoc {
    let unit = *["    ", "  ", "\t"].choose(rng).unwrap();
    let mut g = DocGen {
        rng,
        lines: Vec::new(),
        truth: Vec::new(),
        unit,
    };
    g.push(0, "let x = 0;");
    g.push(0, "let total = 0;");
    let n = g.rng.gen_range(2..7);
    for _ in 0..n {
        g.stmt(0, 3);
    }
    StructuredDoc {
        text: g.lines.join("\n"),
        truth: g.truth,
    }
}

/// Leading whitespace width in columns, a tab counting four. Straight scan,
/// no shared code with the library.
pub fn brute_indent(line: &str) -> usize {
    let mut cols = 0;
    for c in line.chars() {
        match c {
            ' ' => cols += 1,
            '\t' => cols += 4,
            _ => break,
        }
    }
    cols
}

// ---------------------------------------------------------------------------
// Session scripting
// ---------------------------------------------------------------------------

use haci_core::cues::{CueConfig, Feedback};
use haci_core::dispatch::{Editor, Keymap};
use haci_core::interp::ExecConfig;
use haci_core::session::{Clock, Session, SessionUpdate};
use haci_core::DocumentBuffer;

pub fn new_session(text: &str) -> Session {
    let editor = Editor::new(
        DocumentBuffer::from_text(text),
        ExecConfig::default(),
        CueConfig::default(),
    );
    Session::new(editor, Keymap::macos(), Clock::virtual_clock())
}

/// Drives a session with protocol lines and keeps every line sent.
pub struct Script {
    pub session: Session,
    pub sent: Vec<String>,
    seq: u64,
    t_ms: u64,
}

impl Script {
    pub fn new(session: Session) -> Self {
        Script {
            session,
            sent: Vec::new(),
            seq: 0,
            t_ms: 0,
        }
    }

    /// Sends `{"seq":..,"t_ms":..,<body>}` and advances the clock by `dt`.
    pub fn send(&mut self, dt: u64, body: &str) -> Vec<SessionUpdate> {
        self.seq += 1;
        self.t_ms += dt;
        let line = format!(r#"{{"seq":{},"t_ms":{},{body}}}"#, self.seq, self.t_ms);
        self.sent.push(line.clone());
        self.session.handle_line(&line)
    }

    pub fn chord(&mut self, chord: &str) -> Vec<SessionUpdate> {
        let (mods, key) = match chord.rsplit_once('+') {
            Some((m, k)) if !k.is_empty() => (m, k),
            _ => ("", chord),
        };
        let mods: Vec<String> = mods
            .split('+')
            .filter(|m| !m.is_empty())
            .map(|m| format!("\"{m}\""))
            .collect();
        let key = serde_json::to_string(key).unwrap();
        self.send(
            40,
            &format!(r#""type":"key_chord","modifiers":[{}],"key":{key}"#, mods.join(",")),
        )
    }

    pub fn goto(&mut self, line: usize, col: usize) -> Vec<SessionUpdate> {
        self.send(
            40,
            &format!(r#""type":"cursor_move","to":{{"line":{line},"col":{col}}}"#),
        )
    }

    pub fn motion(&mut self, motion: &str) -> Vec<SessionUpdate> {
        self.send(40, &format!(r#""type":"cursor_move","motion":"{motion}""#))
    }
}

pub fn feedback_of(updates: &[SessionUpdate]) -> Vec<Feedback> {
    updates
        .iter()
        .filter_map(|u| match u {
            SessionUpdate::Feedback { event } => Some(event.payload.clone()),
            _ => None,
        })
        .collect()
}

pub fn speech_of(updates: &[SessionUpdate]) -> Vec<String> {
    feedback_of(updates)
        .into_iter()
        .filter_map(|f| match f {
            Feedback::Speech { text } => Some(text),
            _ => None,
        })
        .collect()
}

pub fn panel_of(updates: &[SessionUpdate], panel: haci_core::PanelId) -> Option<Vec<String>> {
    updates.iter().find_map(|u| match u {
        SessionUpdate::Panel(p) if p.panel == panel => Some(p.lines.clone()),
        _ => None,
    })
}
