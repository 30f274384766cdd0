//! Recursive-descent parser for the supported JavaScript subset.
//!
//! Parsing stops at the first syntax error.

use super::ast::*;
use super::lexer::{Span, Token, TokenKind};
use crate::diagnostic::Diagnostic;

type PResult<T> = Result<T, Diagnostic>;

struct Parser<'t> {
    tokens: Vec<&'t Token>,
    pos: usize,
    function_depth: usize,
    eof: Span,
}

pub fn parse(tokens: &[Token]) -> Result<Program, Diagnostic> {
    let eof_pos = tokens
        .last()
        .map_or(crate::Position::new(1, 0), |t| t.span.end);
    let mut p = Parser {
        tokens: tokens
            .iter()
            .filter(|t| t.kind != TokenKind::Comment)
            .collect(),
        pos: 0,
        function_depth: 0,
        eof: Span::new(eof_pos, eof_pos),
    };
    let mut body = Vec::new();
    while !p.at_end() {
        body.push(p.statement()?);
    }
    let span = match (body.first(), body.last()) {
        (Some(first), Some(last)) => first.span.to(last.span),
        _ => p.eof,
    };
    Ok(Program {
        body,
        span: Span::new(crate::Position::new(1, 0), span.end.max(p.eof.end)),
    })
}

fn is_assign_op(t: &Token) -> Option<AssignOp> {
    if t.kind != TokenKind::Symbol {
        return None;
    }
    Some(match t.text.as_str() {
        "=" => None,
        "+=" => Some(BinaryOp::Add),
        "-=" => Some(BinaryOp::Sub),
        "*=" => Some(BinaryOp::Mul),
        "/=" => Some(BinaryOp::Div),
        "%=" => Some(BinaryOp::Rem),
        _ => return None,
    })
}

impl<'t> Parser<'t> {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos).copied()
    }

    fn prev_span(&self) -> Span {
        self.pos
            .checked_sub(1)
            .and_then(|i| self.tokens.get(i))
            .map_or(self.eof, |t| t.span)
    }

    fn advance(&mut self) -> Option<&'t Token> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self) -> PResult<T> {
        Err(match self.peek() {
            Some(t) => Diagnostic::syntax(
                format!("Unexpected token '{}'", t.text),
                t.span.start.line,
                t.span.start.col,
            ),
            None => Diagnostic::syntax("Unexpected end of input", self.eof.end.line, self.eof.end.col),
        })
    }

    fn error_at<T>(&self, span: Span, msg: impl Into<String>) -> PResult<T> {
        Err(Diagnostic::syntax(msg, span.start.line, span.start.col))
    }

    fn check_symbol(&self, s: &str) -> bool {
        self.peek().is_some_and(|t| t.is_symbol(s))
    }

    fn check_keyword(&self, s: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(s))
    }

    fn eat_symbol(&mut self, s: &str) -> bool {
        if self.check_symbol(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_symbol(&mut self, s: &str) -> PResult<Span> {
        if self.check_symbol(s) {
            Ok(self.advance().map(|t| t.span).unwrap_or(self.eof))
        } else {
            self.unexpected()
        }
    }

    fn expect_identifier(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                self.pos += 1;
                Ok((t.text.clone(), t.span))
            }
            _ => self.unexpected(),
        }
    }

    /// Statement terminator: an explicit `;`, or (automatic insertion) a
    /// following `}`, end of input, or a line break.
    fn terminate(&mut self) -> PResult<Span> {
        if self.check_symbol(";") {
            return Ok(self.advance().map(|t| t.span).unwrap_or(self.eof));
        }
        let prev = self.prev_span();
        match self.peek() {
            None => Ok(prev),
            Some(t) if t.is_symbol("}") || t.span.start.line > prev.end.line => Ok(prev),
            Some(_) => self.unexpected(),
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let Some(tok) = self.peek() else {
            return self.unexpected();
        };
        let start = tok.span;
        match (tok.kind, tok.text.as_str()) {
            (TokenKind::Keyword, "function") => {
                let f = self.function()?;
                Ok(Stmt {
                    span: f.span,
                    kind: StmtKind::Function(f),
                })
            }
            (TokenKind::Keyword, "let" | "const" | "var") => {
                let (kind, span) = self.var_decl()?;
                let end = self.terminate()?;
                Ok(Stmt {
                    kind,
                    span: span.to(end),
                })
            }
            (TokenKind::Keyword, "if") => self.if_statement(),
            (TokenKind::Keyword, "for") => self.for_statement(),
            (TokenKind::Keyword, "while") => {
                self.advance();
                self.expect_symbol("(")?;
                let cond = self.expression()?;
                self.expect_symbol(")")?;
                let body = self.statement()?;
                Ok(Stmt {
                    span: start.to(body.span),
                    kind: StmtKind::While {
                        cond,
                        body: Box::new(body),
                    },
                })
            }
            (TokenKind::Keyword, "return") => {
                if self.function_depth == 0 {
                    return self.error_at(start, "Illegal return statement");
                }
                self.advance();
                let value = match self.peek() {
                    Some(t)
                        if !t.is_symbol(";")
                            && !t.is_symbol("}")
                            && t.span.start.line == start.end.line =>
                    {
                        Some(self.expression()?)
                    }
                    _ => None,
                };
                let end = self.terminate()?;
                Ok(Stmt {
                    kind: StmtKind::Return(value),
                    span: start.to(end),
                })
            }
            (TokenKind::Keyword, "else") => self.unexpected(),
            (TokenKind::Symbol, "{") => {
                let block = self.block()?;
                Ok(Stmt {
                    span: block.span,
                    kind: StmtKind::Block(block),
                })
            }
            (TokenKind::Symbol, ";") => {
                self.advance();
                Ok(Stmt {
                    kind: StmtKind::Empty,
                    span: start,
                })
            }
            _ => {
                let expr = self.expression()?;
                let end = self.terminate()?;
                Ok(Stmt {
                    span: expr.span.to(end),
                    kind: StmtKind::Expr(expr),
                })
            }
        }
    }

    fn function(&mut self) -> PResult<FunctionDecl> {
        let start = self.advance().map(|t| t.span).unwrap_or(self.eof);
        let (name, name_span) = self.expect_identifier()?;
        self.expect_symbol("(")?;
        let mut params = Vec::new();
        if !self.eat_symbol(")") {
            loop {
                let (param, span) = self.expect_identifier()?;
                if params.contains(&param) {
                    return self.error_at(span, "Duplicate parameter name not allowed in this context");
                }
                params.push(param);
                if self.eat_symbol(")") {
                    break;
                }
                self.expect_symbol(",")?;
            }
        }
        self.function_depth += 1;
        let body = self.block();
        self.function_depth -= 1;
        let body = body?;
        Ok(FunctionDecl {
            name,
            name_span,
            params,
            span: start.to(body.span),
            body,
        })
    }

    fn block(&mut self) -> PResult<Block> {
        let start = self.expect_symbol("{")?;
        let mut body = Vec::new();
        loop {
            if self.check_symbol("}") {
                let end = self.expect_symbol("}")?;
                return Ok(Block {
                    body,
                    span: start.to(end),
                });
            }
            if self.at_end() {
                return self.unexpected();
            }
            body.push(self.statement()?);
        }
    }

    fn var_decl(&mut self) -> PResult<(StmtKind, Span)> {
        let kw = self.advance().map(|t| (t.text.as_str(), t.span));
        let (kind, start) = match kw {
            Some(("let", s)) => (DeclKind::Let, s),
            Some(("const", s)) => (DeclKind::Const, s),
            Some((_, s)) => (DeclKind::Var, s),
            None => return self.unexpected(),
        };
        let (name, name_span) = self.expect_identifier()?;
        let init = if self.eat_symbol("=") {
            Some(self.assignment()?)
        } else {
            None
        };
        if kind == DeclKind::Const && init.is_none() {
            return self.error_at(name_span, "Missing initializer in const declaration");
        }
        let end = init.as_ref().map_or(name_span, |e| e.span);
        Ok((
            StmtKind::VarDecl {
                kind,
                name,
                name_span,
                init,
            },
            start.to(end),
        ))
    }

    fn if_statement(&mut self) -> PResult<Stmt> {
        let start = self.advance().map(|t| t.span).unwrap_or(self.eof);
        self.expect_symbol("(")?;
        let cond = self.expression()?;
        self.expect_symbol(")")?;
        let then = self.statement()?;
        let mut span = start.to(then.span);
        let otherwise = if self.check_keyword("else") {
            self.advance();
            let stmt = self.statement()?;
            span = start.to(stmt.span);
            Some(Box::new(stmt))
        } else {
            None
        };
        Ok(Stmt {
            kind: StmtKind::If {
                cond,
                then: Box::new(then),
                otherwise,
            },
            span,
        })
    }

    fn for_statement(&mut self) -> PResult<Stmt> {
        let start = self.advance().map(|t| t.span).unwrap_or(self.eof);
        self.expect_symbol("(")?;
        let init = if self.check_symbol(";") {
            None
        } else if self.peek().is_some_and(|t| {
            t.is_keyword("let") || t.is_keyword("const") || t.is_keyword("var")
        }) {
            let (kind, span) = self.var_decl()?;
            Some(Box::new(Stmt { kind, span }))
        } else {
            let e = self.expression()?;
            Some(Box::new(Stmt {
                span: e.span,
                kind: StmtKind::Expr(e),
            }))
        };
        self.expect_symbol(";")?;
        let test = if self.check_symbol(";") {
            None
        } else {
            Some(self.expression()?)
        };
        self.expect_symbol(";")?;
        let update = if self.check_symbol(")") {
            None
        } else {
            Some(self.expression()?)
        };
        self.expect_symbol(")")?;
        let body = self.statement()?;
        Ok(Stmt {
            span: start.to(body.span),
            kind: StmtKind::For {
                init,
                test,
                update,
                body: Box::new(body),
            },
        })
    }

    fn expression(&mut self) -> PResult<Expr> {
        self.assignment()
    }

    fn assignment(&mut self) -> PResult<Expr> {
        let target = self.binary(0)?;
        let Some(op) = self.peek().and_then(is_assign_op) else {
            return Ok(target);
        };
        if !matches!(
            target.kind,
            ExprKind::Identifier(_) | ExprKind::Index { .. }
        ) {
            return self.error_at(target.span, "Invalid left-hand side in assignment");
        }
        self.advance();
        let value = self.assignment()?;
        Ok(Expr {
            span: target.span.to(value.span),
            kind: ExprKind::Assign {
                op,
                target: Box::new(target),
                value: Box::new(value),
            },
        })
    }

    /// Precedence climbing over the binary operator table.
    fn binary(&mut self, min_level: usize) -> PResult<Expr> {
        const LEVELS: &[&[&str]] = &[
            &["||"],
            &["&&"],
            &["==", "!=", "===", "!=="],
            &["<", ">", "<=", ">="],
            &["+", "-"],
            &["*", "/", "%"],
        ];
        if min_level == LEVELS.len() {
            return self.unary();
        }
        let mut left = self.binary(min_level + 1)?;
        while let Some(t) = self.peek() {
            if t.kind != TokenKind::Symbol || !LEVELS[min_level].contains(&t.text.as_str()) {
                break;
            }
            let op = BinaryOp::from_symbol(&t.text).expect("operator table entry");
            self.advance();
            let right = self.binary(min_level + 1)?;
            left = Expr {
                span: left.span.to(right.span),
                kind: ExprKind::Binary {
                    op,
                    left: Box::new(left),
                    right: Box::new(right),
                },
            };
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let Some(t) = self.peek() else {
            return self.unexpected();
        };
        if t.kind == TokenKind::Symbol {
            let op = match t.text.as_str() {
                "!" => Some(UnaryOp::Not),
                "-" => Some(UnaryOp::Neg),
                _ => None,
            };
            if let Some(op) = op {
                self.advance();
                let operand = self.unary()?;
                return Ok(Expr {
                    span: t.span.to(operand.span),
                    kind: ExprKind::Unary {
                        op,
                        operand: Box::new(operand),
                    },
                });
            }
            let update = match t.text.as_str() {
                "++" => Some(UpdateOp::Increment),
                "--" => Some(UpdateOp::Decrement),
                _ => None,
            };
            if let Some(op) = update {
                self.advance();
                let target = self.unary()?;
                self.check_update_target(&target)?;
                return Ok(Expr {
                    span: t.span.to(target.span),
                    kind: ExprKind::Update {
                        op,
                        prefix: true,
                        target: Box::new(target),
                    },
                });
            }
        }
        self.postfix()
    }

    fn check_update_target(&self, target: &Expr) -> PResult<()> {
        match target.kind {
            ExprKind::Identifier(_) | ExprKind::Index { .. } => Ok(()),
            _ => self.error_at(
                target.span,
                "Invalid left-hand side expression in postfix operation",
            ),
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.primary()?;
        loop {
            if self.eat_symbol("(") {
                let mut args = Vec::new();
                if !self.check_symbol(")") {
                    loop {
                        args.push(self.assignment()?);
                        if !self.eat_symbol(",") {
                            break;
                        }
                    }
                }
                let end = self.expect_symbol(")")?;
                expr = Expr {
                    span: expr.span.to(end),
                    kind: ExprKind::Call {
                        callee: Box::new(expr),
                        args,
                    },
                };
            } else if self.eat_symbol("[") {
                let index = self.expression()?;
                let end = self.expect_symbol("]")?;
                expr = Expr {
                    span: expr.span.to(end),
                    kind: ExprKind::Index {
                        object: Box::new(expr),
                        index: Box::new(index),
                    },
                };
            } else if self.eat_symbol(".") {
                let Some(t) = self.peek() else {
                    return self.unexpected();
                };
                if !matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword) {
                    return self.unexpected();
                }
                let allowed = t.text == "length"
                    || (t.text == "log"
                        && matches!(&expr.kind, ExprKind::Identifier(n) if n == "console"));
                if !allowed {
                    return self.error_at(
                        t.span,
                        format!("Unsupported member access '.{}'", t.text),
                    );
                }
                self.advance();
                expr = Expr {
                    span: expr.span.to(t.span),
                    kind: ExprKind::Member {
                        object: Box::new(expr),
                        property: t.text.clone(),
                    },
                };
            } else if let Some(t) = self
                .peek()
                .filter(|t| t.is_symbol("++") || t.is_symbol("--"))
                .filter(|t| t.span.start.line == expr.span.end.line)
            {
                self.check_update_target(&expr)?;
                self.advance();
                let op = if t.text == "++" {
                    UpdateOp::Increment
                } else {
                    UpdateOp::Decrement
                };
                expr = Expr {
                    span: expr.span.to(t.span),
                    kind: ExprKind::Update {
                        op,
                        prefix: false,
                        target: Box::new(expr),
                    },
                };
            } else {
                return Ok(expr);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(t) = self.peek() else {
            return self.unexpected();
        };
        let kind = match t.kind {
            TokenKind::Identifier => ExprKind::Identifier(t.text.clone()),
            TokenKind::Number => match t.text.parse::<f64>() {
                Ok(n) => ExprKind::Literal(Literal::Number(n)),
                Err(_) => return self.unexpected(),
            },
            TokenKind::String => ExprKind::Literal(Literal::String(unescape(&t.text))),
            TokenKind::Keyword if t.text == "true" => ExprKind::Literal(Literal::Bool(true)),
            TokenKind::Keyword if t.text == "false" => ExprKind::Literal(Literal::Bool(false)),
            TokenKind::Symbol if t.text == "(" => {
                self.advance();
                let inner = self.expression()?;
                let end = self.expect_symbol(")")?;
                return Ok(Expr {
                    span: t.span.to(end),
                    kind: inner.kind,
                });
            }
            TokenKind::Symbol if t.text == "[" => {
                self.advance();
                let mut items = Vec::new();
                while !self.check_symbol("]") {
                    items.push(self.assignment()?);
                    if !self.eat_symbol(",") {
                        break;
                    }
                }
                let end = self.expect_symbol("]")?;
                return Ok(Expr {
                    span: t.span.to(end),
                    kind: ExprKind::Array(items),
                });
            }
            _ => return self.unexpected(),
        };
        self.advance();
        Ok(Expr { kind, span: t.span })
    }
}

/// Decodes a quoted string literal token, quotes included.
fn unescape(quoted: &str) -> String {
    let inner = &quoted[1..quoted.len().saturating_sub(1).max(1)];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('r') => out.push('\r'),
            Some('0') => out.push('\0'),
            Some(other) => out.push(other),
            None => {}
        }
    }
    out
}
