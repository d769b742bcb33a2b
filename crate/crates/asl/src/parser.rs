//! Lexer and recursive-descent parser for `.asl` modules, plus the module
//! renderer.
//!
//! ```text
//! module  := ["module" IDENT "where"] decl*
//! decl    := ("axiom" | "lemma" | "auto") horn
//! horn    := ["(" atom ("," atom)* ")" "=>" | atom "=>"] atom
//! atom    := UPPER aterm*
//! aterm   := UPPER | LOWER | "(" term ")" | "(" term "," term ")"
//! term    := aterm+
//! ```

use std::fmt::Write as _;

use asl_core::syntax::{name, Name};
use asl_core::{Atom, Evidence, HornFormula, Term};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: scope error: variable(s) {} in the context do not occur in the head", .vars.join(", "))]
    Scope { line: usize, col: usize, vars: Vec<String> },
    #[error("{line}:{col}: predicate `{pred}` used with {found} arguments, earlier with {expected}")]
    Arity { line: usize, col: usize, pred: String, expected: usize, found: usize },
}

impl ParseError {
    fn syntax(at: Span, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: at.line, col: at.col, message: message.into() }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DeclKind {
    Axiom,
    Lemma,
    Auto,
}

impl DeclKind {
    pub fn keyword(self) -> &'static str {
        match self {
            DeclKind::Axiom => "axiom",
            DeclKind::Lemma => "lemma",
            DeclKind::Auto => "auto",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Decl {
    pub kind: DeclKind,
    pub formula: HornFormula,
    pub span: Span,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SourceModule {
    pub name: Option<String>,
    pub decls: Vec<Decl>,
}

impl SourceModule {
    /// `Ax0, Ax1, ...` for the axioms, in declaration order.
    pub fn axioms(&self) -> impl Iterator<Item = (Name, &Decl)> {
        self.decls.iter().filter(|d| d.kind == DeclKind::Axiom).enumerate().map(|(i, d)| (name(&format!("Ax{i}")), d))
    }

    /// Axioms with the same formula up to renaming as an earlier one.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let axioms: Vec<(Name, &Decl)> = self.axioms().collect();
        for (i, (n, d)) in axioms.iter().enumerate() {
            if let Some((m, _)) = axioms[..i].iter().find(|(_, e)| e.formula.is_variant_of(&d.formula)) {
                out.push(format!("{}:{}: axiom {n} duplicates {m}: {}", d.span.line, d.span.col, d.formula));
            }
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Upper(String),
    Lower(String),
    LParen,
    RParen,
    Comma,
    Arrow,
    Backslash,
    Dot,
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Upper(s) | Tok::Lower(s) => format!("`{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Arrow => "`=>`".into(),
        Tok::Backslash => "`\\`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let at = Span { line: ln + 1, col: i + 1 };
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '-' && chars.get(i + 1) == Some(&'-') {
                break;
            }
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '\\' | 'λ' => Tok::Backslash,
                '.' => Tok::Dot,
                '=' if chars.get(i + 1) == Some(&'>') => {
                    i += 1;
                    Tok::Arrow
                }
                '⇒' => Tok::Arrow,
                c if c.is_alphabetic() || c == '_' => {
                    let start = i;
                    while i + 1 < chars.len() && is_ident(chars[i + 1]) {
                        i += 1;
                    }
                    let word: String = chars[start..=i].iter().collect();
                    if c.is_uppercase() {
                        Tok::Upper(word)
                    } else {
                        Tok::Lower(word)
                    }
                }
                other => return Err(ParseError::syntax(at, format!("unexpected character `{other}`"))),
            };
            out.push((tok, at));
            i += 1;
        }
    }
    let end = Span { line: src.lines().count().max(1), col: src.lines().last().map_or(1, |l| l.chars().count() + 1) };
    out.push((Tok::Eof, end));
    Ok(out)
}

const KEYWORDS: [&str; 6] = ["module", "where", "axiom", "lemma", "auto", "mu"];

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&describe(&want)))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::syntax(self.span(), format!("expected {wanted}, found {}", describe(self.peek())))
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Lower(s) if s == kw)
    }

    fn at_decl_start(&self) -> bool {
        ["axiom", "lemma", "auto"].iter().any(|k| self.at_keyword(k))
    }

    fn starts_aterm(&self) -> bool {
        match self.peek() {
            Tok::Upper(_) | Tok::LParen => true,
            Tok::Lower(s) => !KEYWORDS.contains(&s.as_str()),
            _ => false,
        }
    }

    fn module(&mut self) -> Result<SourceModule, ParseError> {
        let mut module_name = None;
        if self.at_keyword("module") {
            self.bump();
            module_name = match self.bump() {
                Tok::Upper(s) | Tok::Lower(s) => Some(s),
                _ => return Err(ParseError::syntax(self.toks[self.pos - 1].1, "expected a module name")),
            };
            if !self.at_keyword("where") {
                return Err(self.unexpected("`where`"));
            }
            self.bump();
        }
        let mut decls = Vec::new();
        while *self.peek() != Tok::Eof {
            let span = self.span();
            let kind = match self.peek() {
                Tok::Lower(s) if s == "axiom" => DeclKind::Axiom,
                Tok::Lower(s) if s == "lemma" => DeclKind::Lemma,
                Tok::Lower(s) if s == "auto" => DeclKind::Auto,
                _ => return Err(self.unexpected("`axiom`, `lemma` or `auto`")),
            };
            self.bump();
            let formula = self.horn()?;
            scope_check(&formula, span)?;
            decls.push(Decl { kind, formula, span });
        }
        Ok(SourceModule { name: module_name, decls })
    }

    fn horn(&mut self) -> Result<HornFormula, ParseError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let mut body = vec![self.atom()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                body.push(self.atom()?);
            }
            self.expect(Tok::RParen)?;
            self.expect(Tok::Arrow)?;
            return Ok(HornFormula::new(body, self.atom()?));
        }
        let first = self.atom()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            return Ok(HornFormula::new(vec![first], self.atom()?));
        }
        Ok(HornFormula::fact(first))
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let pred = match self.peek() {
            Tok::Upper(s) => s.clone(),
            _ => return Err(self.unexpected("a predicate")),
        };
        self.bump();
        let mut args = Vec::new();
        // A new declaration may start on the next line without a separator.
        while self.starts_aterm() && !self.at_decl_start() {
            args.push(self.aterm()?);
        }
        Ok(Atom { pred: name(&pred), args })
    }

    fn aterm(&mut self) -> Result<Term, ParseError> {
        match self.bump() {
            Tok::Upper(s) => Ok(Term::cons(&s)),
            Tok::Lower(s) => Ok(Term::var(&s)),
            Tok::LParen => {
                let t = self.term()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    let u = self.term()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Term::pair(t, u));
                }
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("a term"))
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if !self.starts_aterm() {
            return Err(self.unexpected("a term"));
        }
        let mut t = self.aterm()?;
        while self.starts_aterm() {
            t = Term::app(t, self.aterm()?);
        }
        Ok(t)
    }

    fn evidence(&mut self, bound: &mut Vec<String>) -> Result<Evidence, ParseError> {
        if *self.peek() == Tok::Backslash {
            self.bump();
            let mut xs = Vec::new();
            while let Tok::Lower(s) | Tok::Upper(s) = self.peek() {
                xs.push(s.clone());
                self.bump();
            }
            if xs.is_empty() {
                return Err(self.unexpected("a binder"));
            }
            self.expect(Tok::Dot)?;
            let n = bound.len();
            bound.extend(xs.iter().cloned());
            let body = self.evidence(bound)?;
            bound.truncate(n);
            return Ok(xs.iter().rev().fold(body, |b, x| Evidence::lam(x, b)));
        }
        if self.at_keyword("mu") && matches!(self.peek2(), Tok::Lower(_) | Tok::Upper(_)) {
            self.bump();
            let x = match self.bump() {
                Tok::Lower(s) | Tok::Upper(s) => s,
                _ => unreachable!("checked by peek2"),
            };
            self.expect(Tok::Dot)?;
            bound.push(x.clone());
            let body = self.evidence(bound)?;
            bound.pop();
            return Ok(Evidence::mu(&x, body));
        }
        let mut e = self.evidence_atom(bound)?;
        while matches!(self.peek(), Tok::Lower(_) | Tok::Upper(_) | Tok::LParen | Tok::Backslash) {
            let arg = if *self.peek() == Tok::Backslash { self.evidence(bound)? } else { self.evidence_atom(bound)? };
            e = Evidence::app(e, arg);
        }
        Ok(e)
    }

    fn evidence_atom(&mut self, bound: &mut Vec<String>) -> Result<Evidence, ParseError> {
        match self.bump() {
            Tok::Lower(s) | Tok::Upper(s) => {
                Ok(if bound.contains(&s) { Evidence::var(&s) } else { Evidence::axiom(&s) })
            }
            Tok::LParen => {
                let e = self.evidence(bound)?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("evidence"))
            }
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected("end of input")),
        }
    }
}

fn scope_check(f: &HornFormula, at: Span) -> Result<(), ParseError> {
    let ex = f.existential_vars();
    if ex.is_empty() {
        Ok(())
    } else {
        Err(ParseError::Scope { line: at.line, col: at.col, vars: ex.iter().map(|v| v.to_string()).collect() })
    }
}

/// Predicates must keep one arity across the whole module.
fn arity_check(m: &SourceModule) -> Result<(), ParseError> {
    let mut seen: Vec<(Name, usize)> = Vec::new();
    for d in &m.decls {
        for a in d.formula.body.iter().chain([&d.formula.head]) {
            match seen.iter().find(|(p, _)| *p == a.pred) {
                Some((_, n)) if *n != a.args.len() => {
                    return Err(ParseError::Arity {
                        line: d.span.line,
                        col: d.span.col,
                        pred: a.pred.to_string(),
                        expected: *n,
                        found: a.args.len(),
                    })
                }
                Some(_) => {}
                None => seen.push((a.pred.clone(), a.args.len())),
            }
        }
    }
    Ok(())
}

pub fn parse_module(src: &str) -> Result<SourceModule, ParseError> {
    let mut p = Parser::new(src)?;
    let m = p.module()?;
    arity_check(&m)?;
    Ok(m)
}

pub fn parse_atom(src: &str) -> Result<Atom, ParseError> {
    let mut p = Parser::new(src)?;
    let a = p.atom()?;
    p.finish()?;
    Ok(a)
}

/// A Horn formula; body variables must occur in the head.
pub fn parse_horn(src: &str) -> Result<HornFormula, ParseError> {
    let mut p = Parser::new(src)?;
    let at = p.span();
    let f = p.horn()?;
    p.finish()?;
    scope_check(&f, at)?;
    Ok(f)
}

/// Evidence in the rendered syntax: `\ x y . e`, `mu a . e`, application by
/// juxtaposition. Identifiers bound by `\` or `mu` are variables; all
/// others are constants.
pub fn parse_evidence(src: &str) -> Result<Evidence, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.evidence(&mut Vec::new())?;
    p.finish()?;
    Ok(e)
}

/// Source text that parses back to `m`.
pub fn render_module(m: &SourceModule) -> String {
    let mut out = String::new();
    if let Some(n) = &m.name {
        let _ = writeln!(out, "module {n} where");
    }
    for d in &m.decls {
        let _ = writeln!(out, "{} {}", d.kind.keyword(), d.formula);
    }
    out
}
