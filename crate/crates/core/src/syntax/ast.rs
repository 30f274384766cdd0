use serde::Serialize;

use super::lexer::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NodeKind {
    Program,
    FunctionDecl,
    Block,
    If,
    For,
    While,
    Return,
    VarDecl,
    ExprStmt,
    Empty,
    Call,
    Index,
    Member,
    Binary,
    Unary,
    Update,
    Assign,
    Identifier,
    Literal,
    ArrayLiteral,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Program {
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionDecl {
    pub name: String,
    pub name_span: Span,
    pub params: Vec<String>,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeclKind {
    Let,
    Const,
    Var,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StmtKind {
    Function(FunctionDecl),
    Block(Block),
    VarDecl {
        kind: DeclKind,
        name: String,
        name_span: Span,
        init: Option<Expr>,
    },
    If {
        cond: Expr,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
    },
    For {
        init: Option<Box<Stmt>>,
        test: Option<Expr>,
        update: Option<Expr>,
        body: Box<Stmt>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    Return(Option<Expr>),
    Expr(Expr),
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Gt,
    Le,
    Ge,
    LooseEq,
    StrictEq,
    LooseNe,
    StrictNe,
    And,
    Or,
}

impl BinaryOp {
    pub fn from_symbol(s: &str) -> Option<Self> {
        use BinaryOp::*;
        Some(match s {
            "+" => Add,
            "-" => Sub,
            "*" => Mul,
            "/" => Div,
            "%" => Rem,
            "<" => Lt,
            ">" => Gt,
            "<=" => Le,
            ">=" => Ge,
            "==" => LooseEq,
            "===" => StrictEq,
            "!=" => LooseNe,
            "!==" => StrictNe,
            "&&" => And,
            "||" => Or,
            _ => return None,
        })
    }

    pub fn symbol(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Rem => "%",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            LooseEq => "==",
            StrictEq => "===",
            LooseNe => "!=",
            StrictNe => "!==",
            And => "&&",
            Or => "||",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UpdateOp {
    Increment,
    Decrement,
}

/// `=` is `None`; compound forms carry their arithmetic operator.
pub type AssignOp = Option<BinaryOp>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Literal {
    Number(f64),
    String(String),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExprKind {
    Identifier(String),
    Literal(Literal),
    Array(Vec<Expr>),
    Index {
        object: Box<Expr>,
        index: Box<Expr>,
    },
    /// Only `.length`, or `.log` on `console`.
    Member {
        object: Box<Expr>,
        property: String,
    },
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
    },
    Binary {
        op: BinaryOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Update {
        op: UpdateOp,
        prefix: bool,
        target: Box<Expr>,
    },
    Assign {
        op: AssignOp,
        target: Box<Expr>,
        value: Box<Expr>,
    },
}

/// Borrowed view over any AST node, used for generic traversals.
#[derive(Debug, Clone, Copy)]
pub enum Node<'a> {
    Program(&'a Program),
    Function(&'a FunctionDecl),
    Block(&'a Block),
    Stmt(&'a Stmt),
    Expr(&'a Expr),
}

impl<'a> Node<'a> {
    pub fn span(&self) -> Span {
        match self {
            Node::Program(p) => p.span,
            Node::Function(f) => f.span,
            Node::Block(b) => b.span,
            Node::Stmt(s) => s.span,
            Node::Expr(e) => e.span,
        }
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            Node::Program(_) => NodeKind::Program,
            Node::Function(_) => NodeKind::FunctionDecl,
            Node::Block(_) => NodeKind::Block,
            Node::Stmt(s) => match &s.kind {
                StmtKind::Function(_) => NodeKind::FunctionDecl,
                StmtKind::Block(_) => NodeKind::Block,
                StmtKind::VarDecl { .. } => NodeKind::VarDecl,
                StmtKind::If { .. } => NodeKind::If,
                StmtKind::For { .. } => NodeKind::For,
                StmtKind::While { .. } => NodeKind::While,
                StmtKind::Return(_) => NodeKind::Return,
                StmtKind::Expr(_) => NodeKind::ExprStmt,
                StmtKind::Empty => NodeKind::Empty,
            },
            Node::Expr(e) => match &e.kind {
                ExprKind::Identifier(_) => NodeKind::Identifier,
                ExprKind::Literal(_) => NodeKind::Literal,
                ExprKind::Array(_) => NodeKind::ArrayLiteral,
                ExprKind::Index { .. } => NodeKind::Index,
                ExprKind::Member { .. } => NodeKind::Member,
                ExprKind::Call { .. } => NodeKind::Call,
                ExprKind::Binary { .. } => NodeKind::Binary,
                ExprKind::Unary { .. } => NodeKind::Unary,
                ExprKind::Update { .. } => NodeKind::Update,
                ExprKind::Assign { .. } => NodeKind::Assign,
            },
        }
    }

    pub fn children(&self) -> Vec<Node<'a>> {
        let mut out = Vec::new();
        match *self {
            Node::Program(p) => out.extend(p.body.iter().map(Node::Stmt)),
            Node::Function(f) => out.push(Node::Block(&f.body)),
            Node::Block(b) => out.extend(b.body.iter().map(Node::Stmt)),
            Node::Stmt(s) => match &s.kind {
                StmtKind::Function(f) => out.push(Node::Function(f)),
                StmtKind::Block(b) => out.push(Node::Block(b)),
                StmtKind::VarDecl { init, .. } => out.extend(init.iter().map(Node::Expr)),
                StmtKind::If {
                    cond,
                    then,
                    otherwise,
                } => {
                    out.push(Node::Expr(cond));
                    out.push(Node::Stmt(then));
                    out.extend(otherwise.iter().map(|s| Node::Stmt(s)));
                }
                StmtKind::For {
                    init,
                    test,
                    update,
                    body,
                } => {
                    out.extend(init.iter().map(|s| Node::Stmt(s)));
                    out.extend(test.iter().map(Node::Expr));
                    out.extend(update.iter().map(Node::Expr));
                    out.push(Node::Stmt(body));
                }
                StmtKind::While { cond, body } => {
                    out.push(Node::Expr(cond));
                    out.push(Node::Stmt(body));
                }
                StmtKind::Return(value) => out.extend(value.iter().map(Node::Expr)),
                StmtKind::Expr(e) => out.push(Node::Expr(e)),
                StmtKind::Empty => {}
            },
            Node::Expr(e) => match &e.kind {
                ExprKind::Identifier(_) | ExprKind::Literal(_) => {}
                ExprKind::Array(items) => out.extend(items.iter().map(Node::Expr)),
                ExprKind::Index { object, index } => {
                    out.push(Node::Expr(object));
                    out.push(Node::Expr(index));
                }
                ExprKind::Member { object, .. } => out.push(Node::Expr(object)),
                ExprKind::Call { callee, args } => {
                    out.push(Node::Expr(callee));
                    out.extend(args.iter().map(Node::Expr));
                }
                ExprKind::Binary { left, right, .. } => {
                    out.push(Node::Expr(left));
                    out.push(Node::Expr(right));
                }
                ExprKind::Unary { operand, .. } => out.push(Node::Expr(operand)),
                ExprKind::Update { target, .. } => out.push(Node::Expr(target)),
                ExprKind::Assign { target, value, .. } => {
                    out.push(Node::Expr(target));
                    out.push(Node::Expr(value));
                }
            },
        }
        out
    }

    /// Pre-order walk.
    pub fn walk(&self, f: &mut impl FnMut(Node<'a>)) {
        f(*self);
        for child in self.children() {
            child.walk(f);
        }
    }
}
