//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! iff     := implies ( "<->" implies )*
//! implies := or ( "->" implies )?
//! or      := and ( "||" and )*
//! and     := until ( "&&" until )*
//! until   := unary ( "U" interval unary )*
//! unary   := "!" unary | "G" interval unary | "F" interval unary | primary
//! primary := "TRUE" | "x" cmp int | "(" iff ")"
//! interval:= "[" int "," ( int | "inf" ) ")"
//! ```

use super::{Cmp, Formula, Interval, IntervalError, Upper};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("bad interval at offset {pos}: {source}")]
    Interval {
        pos: usize,
        #[source]
        source: IntervalError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    True,
    Var,
    Ge,
    Gt,
    Le,
    Lt,
    Int(i64),
    Inf,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Until,
    Always,
    Eventually,
    LParen,
    RParen,
    LBracket,
    Comma,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    let err = |pos: usize, msg: &str| ParseError::Syntax {
        pos,
        msg: msg.to_string(),
    };
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let rest = &text[pos..];
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else if rest.starts_with(">=") {
            (Tok::Ge, 2)
        } else if rest.starts_with("<=") {
            (Tok::Le, 2)
        } else if rest.starts_with("&&") {
            (Tok::And, 2)
        } else if rest.starts_with("||") {
            (Tok::Or, 2)
        } else if c == b'>' {
            (Tok::Gt, 1)
        } else if c == b'<' {
            (Tok::Lt, 1)
        } else if c == b'!' {
            (Tok::Not, 1)
        } else if c == b'(' {
            (Tok::LParen, 1)
        } else if c == b')' {
            (Tok::RParen, 1)
        } else if c == b'[' {
            (Tok::LBracket, 1)
        } else if c == b',' {
            (Tok::Comma, 1)
        } else if c == b'-' || c.is_ascii_digit() {
            let mut end = pos + 1;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            let lit = &text[pos..end];
            let v = lit
                .parse::<i64>()
                .map_err(|_| err(pos, &format!("invalid integer `{lit}`")))?;
            (Tok::Int(v), end - pos)
        } else if c.is_ascii_alphabetic() {
            let mut end = pos + 1;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            let tok = match &text[pos..end] {
                "TRUE" => Tok::True,
                "x" => Tok::Var,
                "inf" => Tok::Inf,
                "U" => Tok::Until,
                "G" => Tok::Always,
                "F" => Tok::Eventually,
                word => return Err(err(pos, &format!("unknown word `{word}`"))),
            };
            (tok, end - pos)
        } else {
            return Err(err(pos, &format!("unexpected character `{}`", c as char)));
        };
        out.push((tok, start));
        pos += len;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            msg: msg.to_string(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.fail(&format!("expected {what}"))
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            lhs = lhs.iff(self.implies()?);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            return Ok(lhs.implies(self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = lhs.and(self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Until {
            self.bump();
            let interval = self.interval()?;
            lhs = lhs.until(interval, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::Always => {
                self.bump();
                let i = self.interval()?;
                Ok(Formula::always(i, self.unary()?))
            }
            Tok::Eventually => {
                self.bump();
                let i = self.interval()?;
                Ok(Formula::eventually(i, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Var => {
                self.bump();
                let cmp = match self.bump() {
                    Tok::Ge | Tok::Gt => Cmp::Ge,
                    Tok::Le | Tok::Lt => Cmp::Le,
                    _ => {
                        self.at -= 1;
                        return self.fail("expected comparison operator");
                    }
                };
                let threshold = self.int()?;
                Ok(Formula::Atom { cmp, threshold })
            }
            _ => self.fail("expected formula"),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        match *self.peek() {
            Tok::Int(v) => {
                self.bump();
                Ok(v)
            }
            _ => self.fail("expected integer"),
        }
    }

    fn interval(&mut self) -> Result<Interval, ParseError> {
        let pos = self.pos();
        self.expect(Tok::LBracket, "`[`")?;
        let lower = self.int()?;
        self.expect(Tok::Comma, "`,`")?;
        let upper = if *self.peek() == Tok::Inf {
            self.bump();
            Upper::Infinite
        } else {
            Upper::Finite(self.int()?)
        };
        self.expect(Tok::RParen, "`)` (intervals are half-open)")?;
        Interval::new(lower, upper).map_err(|source| ParseError::Interval { pos, source })
    }
}

/// Parse a formula in the ASCII grammar.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let f = p.iff()?;
    if *p.peek() != Tok::End {
        return p.fail("trailing input");
    }
    Ok(f)
}
