//! Recursive-descent parser for the function grammar:
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := ("-" factor) | power
//! power  := atom ("^" factor)?
//! atom   := NUMBER | "x" | "e" | "pi" | FUNC "(" expr ")" | "(" expr ")"
//! FUNC   := "exp" | "ln" | "sqrt"
//! ```

use thiserror::Error;

use super::{BinaryOp, FunctionExpr, Node, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Returns the next token and the byte offset where it starts.
    fn next(&mut self) -> Result<(Token, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Token::End, start));
        };
        let single = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            return Ok((tok, start));
        }
        if c.is_ascii_digit() || c == '.' {
            let len = number_len(rest.as_bytes());
            let text = &rest[..len];
            let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            self.pos += len;
            return Ok((Token::Number(value), start));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                .count();
            self.pos += len;
            return Ok((Token::Ident(rest[..len].to_string()), start));
        }
        Err(ParseError::Syntax { offset: start, message: format!("unexpected character `{c}`") })
    }
}

/// Length of the decimal literal at the start of `s`: digits, an optional
/// fraction and an optional exponent. An exponent marker not followed by
/// digits is left for the caller to reject as a stray identifier.
fn number_len(s: &[u8]) -> usize {
    let mut i = 0;
    while i < s.len() && s[i].is_ascii_digit() {
        i += 1;
    }
    if i < s.len() && s[i] == b'.' {
        i += 1;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
        let mut j = i + 1;
        if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
            j += 1;
        }
        let digits = s[j..].iter().take_while(|b| b.is_ascii_digit()).count();
        if digits > 0 {
            i = j + digits;
        }
    }
    i
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Token,
    offset: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok, offset) = lexer.next()?;
        Ok(Parser { lexer, tok, offset })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, offset) = self.lexer.next()?;
        self.tok = tok;
        self.offset = offset;
        Ok(())
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { offset: self.offset, message: message.into() })
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        if self.tok == want {
            self.bump()
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Token::Plus => BinaryOp::Add,
                Token::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.tok {
                Token::Star => BinaryOp::Mul,
                Token::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if self.tok == Token::Minus {
            self.bump()?;
            let inner = self.factor()?;
            return Ok(Node::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.tok == Token::Caret {
            self.bump()?;
            let exponent = self.factor()?;
            return Ok(Node::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.tok.clone() {
            Token::Number(v) => {
                self.bump()?;
                Ok(Node::Const(v))
            }
            Token::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => {
                let offset = self.offset;
                let func = match name.as_str() {
                    "x" => {
                        self.bump()?;
                        return Ok(Node::Var);
                    }
                    "e" => {
                        self.bump()?;
                        return Ok(Node::Const(std::f64::consts::E));
                    }
                    "pi" => {
                        self.bump()?;
                        return Ok(Node::Const(std::f64::consts::PI));
                    }
                    "exp" => UnaryOp::Exp,
                    "ln" => UnaryOp::Ln,
                    "sqrt" => UnaryOp::Sqrt,
                    _ => return Err(ParseError::UnknownIdentifier { offset, name }),
                };
                self.bump()?;
                self.expect(Token::LParen, "`(` after function name")?;
                let arg = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(Node::Unary(func, Box::new(arg)))
            }
            Token::End => self.error("unexpected end of input"),
            other => self.error(format!("unexpected token {other:?}")),
        }
    }
}

/// Parses `text` into a [`FunctionExpr`].
pub fn parse(text: &str) -> Result<FunctionExpr, ParseError> {
    let mut parser = Parser::new(text)?;
    if parser.tok == Token::End {
        return parser.error("empty expression");
    }
    let root = parser.expr()?;
    if parser.tok != Token::End {
        return parser.error("trailing input");
    }
    Ok(FunctionExpr::new(root))
}
