//! Recursive-descent parser for the ASCII formula language.
//!
//! Precedence, tightest first: postfix `'`, `&`, `|`; both binary
//! connectives associate to the left. Quantifier bodies extend as far right
//! as possible. A sequent may start with a typed context terminated by `;`.

use super::syntax::{Formula, QuantKind, Sequent, Sort, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    And,
    Or,
    Prime,
    Eq,
    LParen,
    RParen,
    Comma,
    Colon,
    Dot,
    Semi,
    Lt,
    Gt,
    Star,
    Turnstile,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::And => "'&'".into(),
            Tok::Or => "'|'".into(),
            Tok::Prime => "'''".into(),
            Tok::Eq => "'='".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Colon => "':'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Semi => "';'".into(),
            Tok::Lt => "'<'".into(),
            Tok::Gt => "'>'".into(),
            Tok::Star => "'*'".into(),
            Tok::Turnstile => "'|-'".into(),
        }
    }
}

/// A token and the 1-based column just past it.
#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    end: usize,
}

const KEYWORDS: [&str; 6] = ["forall", "exists", "top", "bot", "fst", "snd"];

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            out.push(Spanned { tok: Tok::Ident(word), end: i + 1 });
            continue;
        }
        let (tok, width) = match c {
            '|' if chars.get(i + 1) == Some(&'-') => (Tok::Turnstile, 2),
            '|' => (Tok::Or, 1),
            '&' => (Tok::And, 1),
            '\'' => (Tok::Prime, 1),
            '=' => (Tok::Eq, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            ':' => (Tok::Colon, 1),
            '.' => (Tok::Dot, 1),
            ';' => (Tok::Semi, 1),
            '<' => (Tok::Lt, 1),
            '>' => (Tok::Gt, 1),
            '*' => (Tok::Star, 1),
            other => {
                return Err(Error::Syntax { column: col, message: format!("unexpected character '{other}'") });
            }
        };
        out.push(Spanned { tok, end: col + width });
        i += width;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    /// Column just past the last consumed token.
    fn column(&self) -> usize {
        if self.pos == 0 {
            1
        } else {
            self.toks[self.pos - 1].end
        }
    }

    fn error<T>(&self, expected: &str) -> Result<T> {
        let found = self.peek().map_or("end of input".to_string(), Tok::describe);
        Err(Error::Syntax { column: self.column(), message: format!("expected {expected}, found {found}") })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.error(&t.describe())
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error(what),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            self.error("end of input")
        } else {
            Ok(())
        }
    }

    fn sort(&mut self) -> Result<Sort> {
        let head = if self.eat(&Tok::LParen) {
            let s = self.sort()?;
            self.expect(Tok::RParen)?;
            s
        } else {
            Sort::Named(self.ident("a sort")?)
        };
        if self.eat(&Tok::Star) {
            Ok(Sort::prod(head, self.sort()?))
        } else {
            Ok(head)
        }
    }

    fn binding(&mut self) -> Result<(String, Sort)> {
        let x = self.ident("a variable")?;
        self.expect(Tok::Colon)?;
        Ok((x, self.sort()?))
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        let q = if self.keyword("forall") {
            Some(QuantKind::Forall)
        } else if self.keyword("exists") {
            Some(QuantKind::Exists)
        } else {
            None
        };
        if let Some(q) = q {
            self.pos += 1;
            let (x, s) = self.binding()?;
            self.expect(Tok::Dot)?;
            let body = self.formula()?;
            return Ok(Formula::Quant(q, x, s, Box::new(body)));
        }
        let mut f = self.atom()?;
        while self.eat(&Tok::Prime) {
            f = Formula::not(f);
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Formula> {
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        if self.keyword("top") {
            self.pos += 1;
            return Ok(Formula::Top);
        }
        if self.keyword("bot") {
            self.pos += 1;
            return Ok(Formula::Bot);
        }
        let starts_term = matches!(self.peek(), Some(Tok::Lt)) || self.keyword("fst") || self.keyword("snd");
        if starts_term {
            let lhs = self.term()?;
            return self.equation(lhs);
        }
        let name = self.ident("a formula")?;
        let args = if self.peek() == Some(&Tok::LParen) { Some(self.arguments()?) } else { None };
        if self.peek() == Some(&Tok::Eq) {
            let lhs = match args {
                Some(a) => Term::App(name, a),
                None => Term::Var(name),
            };
            return self.equation(lhs);
        }
        Ok(Formula::Pred(name, args.unwrap_or_default()))
    }

    fn equation(&mut self, lhs: Term) -> Result<Formula> {
        self.expect(Tok::Eq)?;
        Ok(Formula::Eq(lhs, self.term()?))
    }

    fn arguments(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.eat(&Tok::RParen) {
                return Ok(args);
            }
            if !self.eat(&Tok::Comma) {
                return self.error("',' or ')'");
            }
        }
    }

    fn term(&mut self) -> Result<Term> {
        if self.eat(&Tok::Lt) {
            let a = self.term()?;
            self.expect(Tok::Comma)?;
            let b = self.term()?;
            self.expect(Tok::Gt)?;
            return Ok(Term::Pair(Box::new(a), Box::new(b)));
        }
        for (kw, fst) in [("fst", true), ("snd", false)] {
            if self.keyword(kw) {
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let t = Box::new(self.term()?);
                self.expect(Tok::RParen)?;
                return Ok(if fst { Term::Fst(t) } else { Term::Snd(t) });
            }
        }
        let name = self.ident("a term")?;
        if self.peek() == Some(&Tok::LParen) {
            Ok(Term::App(name, self.arguments()?))
        } else {
            Ok(Term::Var(name))
        }
    }

    fn has_context(&self) -> bool {
        self.toks.iter().any(|t| t.tok == Tok::Semi)
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_sort(text: &str) -> Result<Sort> {
    let mut p = Parser::new(text)?;
    let s = p.sort()?;
    p.finish()?;
    Ok(s)
}

pub fn parse_sequent(text: &str) -> Result<Sequent> {
    let mut p = Parser::new(text)?;
    let context = if p.has_context() {
        let mut ctx = Vec::new();
        if !p.eat(&Tok::Semi) {
            loop {
                ctx.push(p.binding()?);
                if p.eat(&Tok::Semi) {
                    break;
                }
                if !p.eat(&Tok::Comma) {
                    return p.error("',' or ';'");
                }
            }
        }
        Some(ctx)
    } else {
        None
    };
    let lhs = p.formula()?;
    p.expect(Tok::Turnstile)?;
    let rhs = p.formula()?;
    p.finish()?;
    Ok(Sequent { context, lhs, rhs })
}

/// A formula or a sequent, whichever the text is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Formula(Formula),
    Sequent(Sequent),
}

pub fn parse(text: &str) -> Result<Parsed> {
    let is_sequent = lex(text)?.iter().any(|t| t.tok == Tok::Turnstile || t.tok == Tok::Semi);
    if is_sequent {
        parse_sequent(text).map(Parsed::Sequent)
    } else {
        parse_formula(text).map(Parsed::Formula)
    }
}
