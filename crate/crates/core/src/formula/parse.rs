use crate::error::{Error, Result};

use super::{Bound, Formula};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Nat(u64),
    Bang,
    LParen,
    RParen,
    And,
    Or,
    Next,
    Eventually,
    Always,
    Until,
    Release,
    /// `F[<=` or `G[<=`; the flag is true for `F`.
    BoundOpen(bool),
    RBracket,
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

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            let rest = &self.src[start..];
            let Some(c) = rest.chars().next() else {
                return Ok(out);
            };
            let tok = match c {
                '!' => Tok::Bang,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '&' => Tok::And,
                '|' => Tok::Or,
                ']' => Tok::RBracket,
                'X' => Tok::Next,
                'U' => Tok::Until,
                'R' => Tok::Release,
                'F' | 'G' => {
                    let after = rest[1..].trim_start();
                    if let Some(b) = after.strip_prefix('[') {
                        let b = b.trim_start();
                        if !b.starts_with("<=") {
                            return Err(Error::parse(
                                start,
                                "only upper bounds `[<= ...]` are supported",
                            ));
                        }
                        let consumed = rest.len() - b.len() + 2;
                        self.pos = start + consumed;
                        out.push((start, Tok::BoundOpen(c == 'F')));
                        continue;
                    }
                    if c == 'F' {
                        Tok::Eventually
                    } else {
                        Tok::Always
                    }
                }
                '0'..='9' => {
                    let len = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
                    let digits = &rest[..len];
                    let n: u64 = digits
                        .parse()
                        .map_err(|_| Error::parse(start, format!("constant {digits} overflows")))?;
                    self.pos = start + len;
                    out.push((start, Tok::Nat(n)));
                    continue;
                }
                '-' => return Err(Error::parse(start, "negative constants are not allowed")),
                'a'..='z' => {
                    let len = rest
                        .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                        .unwrap_or(rest.len());
                    self.pos = start + len;
                    out.push((start, Tok::Ident(rest[..len].to_string())));
                    continue;
                }
                other => return Err(Error::parse(start, format!("unknown operator `{other}`"))),
            };
            self.pos = start + c.len_utf8();
            out.push((start, tok));
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::parse(pos, format!("expected {what}"))),
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Until) => {
                self.bump();
                Ok(Formula::Until(Box::new(lhs), Box::new(self.until()?)))
            }
            Some(Tok::Release) => {
                self.bump();
                Ok(Formula::Release(Box::new(lhs), Box::new(self.until()?)))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Some(Tok::Next) => {
                self.bump();
                Ok(Formula::Next(Box::new(self.unary()?)))
            }
            Some(Tok::Eventually) => {
                self.bump();
                Ok(Formula::Eventually(Box::new(self.unary()?)))
            }
            Some(Tok::Always) => {
                self.bump();
                Ok(Formula::Always(Box::new(self.unary()?)))
            }
            Some(Tok::BoundOpen(is_f)) => {
                let is_f = *is_f;
                self.bump();
                let bpos = self.pos();
                let bound = match self.bump() {
                    Some(Tok::Nat(n)) => Bound::Const(n),
                    Some(Tok::Ident(x)) if is_f => Bound::Var(x),
                    Some(Tok::Ident(_)) => {
                        return Err(Error::parse(
                            bpos,
                            "parametric bounds are only allowed on F",
                        ))
                    }
                    _ => return Err(Error::parse(bpos, "expected bound")),
                };
                self.expect(Tok::RBracket, "`]`")?;
                let body = Box::new(self.unary()?);
                Ok(match (is_f, bound) {
                    (true, b) => Formula::BoundedEventually(b, body),
                    (false, Bound::Const(c)) => Formula::BoundedAlways(c, body),
                    (false, Bound::Var(_)) => unreachable!(),
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Ident(x)) => Ok(match x.as_str() {
                "true" => Formula::True,
                "false" => Formula::False,
                _ => Formula::Atom(x),
            }),
            Some(Tok::LParen) => {
                let f = self.or()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(t) => Err(Error::parse(pos, format!("unexpected token {t:?}"))),
            None => Err(Error::parse(pos, "unexpected end of input")),
        }
    }
}

/// Parses the ASCII formula syntax.
///
/// Precedence from tightest: unary operators, `U`/`R` (right associative),
/// `&`, `|`. `true` and `false` are reserved.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = Lexer { src: text, pos: 0 }.tokens()?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
    };
    let f = p.or()?;
    if p.idx < p.toks.len() {
        return Err(Error::parse(p.pos(), "trailing input"));
    }
    Ok(f)
}
