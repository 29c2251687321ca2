use std::collections::HashMap;
use std::fmt;

use super::{Formula, Sentence, Signature, Term, VarId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    Neq,
    Eq,
    And,
    Or,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Not => f.write_str("`!`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn err(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&ch) = chars.peek() {
        let pos = Pos { line, column };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        };
        if ch.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut name = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    name.push(c);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(name), pos));
            continue;
        }
        bump(&mut chars);
        let tok = match ch {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '&' => Tok::And,
            '|' => Tok::Or,
            '=' => Tok::Eq,
            '!' if chars.peek() == Some(&'=') => {
                bump(&mut chars);
                Tok::Neq
            }
            '!' => Tok::Not,
            '-' if chars.peek() == Some(&'>') => {
                bump(&mut chars);
                Tok::Arrow
            }
            other => return Err(err(pos, format!("unexpected character `{other}`"))),
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

const RESERVED: [&str; 6] = ["forall", "exists", "e", "f", "T", "I"];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    open: Vec<Pos>,
    vars: Vec<String>,
    scope: HashMap<String, Vec<VarId>>,
    uses_e: Option<Pos>,
    uses_i: Option<Pos>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        if *self.peek() == Tok::Eof {
            if let Some(&p) = self.open.last() {
                return err(p, "unclosed parenthesis");
            }
        }
        err(self.pos(), format!("expected {wanted}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn open_paren(&mut self) -> Result<(), ParseError> {
        let p = self.pos();
        self.expect(Tok::LParen)?;
        self.open.push(p);
        Ok(())
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        self.expect(Tok::RParen)?;
        self.open.pop();
        Ok(())
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.advance();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.advance();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.advance();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(q) if q == "forall" || q == "exists" => {
                self.advance();
                self.quantified(q == "forall")
            }
            Tok::LParen => {
                self.open_paren()?;
                let f = self.formula()?;
                self.close_paren()?;
                Ok(f)
            }
            _ => self.atomic(),
        }
    }

    fn quantified(&mut self, universal: bool) -> Result<Formula, ParseError> {
        let mut names = Vec::new();
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Ident(name) if !RESERVED.contains(&name.as_str()) => {
                    self.advance();
                    names.push(name);
                }
                Tok::Ident(name) => return Err(err(pos, format!("`{name}` is reserved"))),
                Tok::Dot if !names.is_empty() => break,
                _ => return Err(self.unexpected("a variable name")),
            }
            if *self.peek() == Tok::Comma {
                self.advance();
            }
        }
        self.expect(Tok::Dot)?;
        let ids: Vec<VarId> = names
            .iter()
            .map(|n| {
                self.vars.push(n.clone());
                let id = self.vars.len() - 1;
                self.scope.entry(n.clone()).or_default().push(id);
                id
            })
            .collect();
        let body = self.formula();
        for n in &names {
            self.scope.get_mut(n).unwrap().pop();
        }
        let body = body?;
        Ok(if universal {
            Formula::forall(ids, body)
        } else {
            Formula::exists(ids, body)
        })
    }

    fn atomic(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(k) if k == "T" => {
                self.advance();
                self.open_paren()?;
                let a = self.term()?;
                self.expect(Tok::Comma)?;
                let b = self.term()?;
                self.expect(Tok::Comma)?;
                let c = self.term()?;
                self.close_paren()?;
                Ok(Formula::Rel(a, b, c))
            }
            Tok::Ident(k) if k == "I" => {
                self.advance();
                self.uses_i.get_or_insert(pos);
                self.open_paren()?;
                let t = self.term()?;
                self.close_paren()?;
                Ok(Formula::Ident(t))
            }
            Tok::Ident(_) => {
                let lhs = self.term()?;
                let negated = match self.peek() {
                    Tok::Eq => false,
                    Tok::Neq => true,
                    _ => return Err(self.unexpected("`=` or `!=`")),
                };
                self.advance();
                let eq = Formula::Eq(lhs, self.term()?);
                Ok(if negated { Formula::not(eq) } else { eq })
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(k) if k == "e" => {
                self.advance();
                self.uses_e.get_or_insert(pos);
                Ok(Term::E)
            }
            Tok::Ident(k) if k == "f" => {
                self.advance();
                self.open_paren()?;
                let t = self.term()?;
                self.close_paren()?;
                Ok(Term::F(Box::new(t)))
            }
            Tok::Ident(k) if RESERVED.contains(&k.as_str()) => Err(err(pos, format!("`{k}` is not a term"))),
            Tok::Ident(name) => {
                self.advance();
                match self.scope.get(&name).and_then(|s| s.last()) {
                    Some(&id) => Ok(Term::Var(id)),
                    None => Err(err(pos, format!("unbound variable `{name}`"))),
                }
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

fn run(text: &str, signature: Option<Signature>) -> Result<Sentence, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        open: Vec::new(),
        vars: Vec::new(),
        scope: HashMap::new(),
        uses_e: None,
        uses_i: None,
    };
    let root = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(err(p.pos(), format!("unexpected {}", p.peek())));
    }
    let inferred = match (p.uses_e, p.uses_i) {
        (Some(_), Some(ipos)) => {
            return Err(err(ipos, "signature mismatch: `I` and `e` in one sentence"));
        }
        (Some(_), None) => Some(Signature::EForm),
        (None, Some(_)) => Some(Signature::IForm),
        (None, None) => None,
    };
    match (signature, p.uses_e, p.uses_i) {
        (Some(Signature::EForm), _, Some(ipos)) => {
            return Err(err(ipos, "signature mismatch: `I` is not available in the {f, e, T} signature"));
        }
        (Some(Signature::IForm), Some(epos), _) => {
            return Err(err(epos, "signature mismatch: `e` is not available in the {f, T, I} signature"));
        }
        _ => {}
    }
    Ok(Sentence {
        vars: p.vars,
        root,
        signature: signature.or(inferred),
    })
}

/// Parses a closed sentence, inferring the signature from its use of `e`
/// or `I`.
pub fn parse(text: &str) -> Result<Sentence, ParseError> {
    run(text, None)
}

/// Parses a closed sentence over a fixed signature.
pub fn parse_in(text: &str, signature: Signature) -> Result<Sentence, ParseError> {
    run(text, Some(signature))
}

/// One sentence per non-blank line; `#` starts a comment. Errors carry the
/// file line number.
pub fn parse_sentence_file(text: &str) -> Result<Vec<Sentence>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse(line).map_err(|mut e| {
            e.line = i + 1;
            e
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_quantifier() {
        let s = parse("exists x. (!(x = e) & T(x,x,x))").unwrap();
        assert_eq!(s.quantifier_count(), 1);
        assert_eq!(s.signature, Some(Signature::EForm));
    }

    #[test]
    fn unclosed_paren_column() {
        let e = parse("forall x. T(x,x").unwrap_err();
        assert_eq!((e.line, e.column), (1, 12));
        assert!(e.message.contains("unclosed"));
    }

    #[test]
    fn signature_mismatch() {
        let e = parse_in("exists y. I(y) & y = e", Signature::EForm).unwrap_err();
        assert!(e.message.contains("signature mismatch"), "{e}");
        assert_eq!(e.column, 11);
        assert!(parse_in("forall x. T(x,e,x)", Signature::IForm).is_err());
    }

    #[test]
    fn unbound_variable() {
        let e = parse("forall x. T(x,y,x)").unwrap_err();
        assert!(e.message.contains("unbound variable `y`"));
        assert_eq!(e.column, 15);
    }

    #[test]
    fn precedence_and_associativity() {
        let s = parse("forall a b c. T(a,b,c) | T(c,b,a) & T(a,a,a) -> T(b,b,b) -> T(c,c,c)").unwrap();
        let Formula::Forall(vs, body) = &s.root else { panic!() };
        assert_eq!(vs.len(), 3);
        let Formula::Implies(lhs, rhs) = body.as_ref() else { panic!() };
        assert!(matches!(lhs.as_ref(), Formula::Or(_, r) if matches!(r.as_ref(), Formula::And(..))));
        assert!(matches!(rhs.as_ref(), Formula::Implies(..)));
    }

    #[test]
    fn neq_is_negated_equality() {
        let a = parse("exists x. x != e").unwrap();
        let b = parse("exists x. !(x = e)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shadowing_gets_fresh_ids() {
        let s = parse("forall x. exists x. T(x,x,x)").unwrap();
        assert_eq!(s.vars, vec!["x", "x"]);
        let Formula::Forall(_, body) = &s.root else { panic!() };
        let Formula::Exists(_, inner) = body.as_ref() else { panic!() };
        assert_eq!(inner.as_ref(), &Formula::Rel(Term::Var(1), Term::Var(1), Term::Var(1)));
    }

    #[test]
    fn positions_on_later_lines() {
        let e = parse("forall x.\n  T(x, x, $)").unwrap_err();
        assert_eq!((e.line, e.column), (2, 11));
    }

    #[test]
    fn sentence_files() {
        let text = "# header\nforall x. x = x\n\n exists y. T(y,y,y) # trailing\n";
        assert_eq!(parse_sentence_file(text).unwrap().len(), 2);
        let e = parse_sentence_file("forall x. x = x\nforall x. (").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn reserved_words() {
        assert!(parse("forall e. e = e").is_err());
        assert!(parse("forall T. T = T").is_err());
    }
}
