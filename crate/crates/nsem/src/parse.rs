//! Text syntax for causal and probabilistic causal formulas.
//!
//! Grammar sketch (binding from loosest to tightest: `->`, `|`, `&`, `!`):
//!
//! ```text
//! formula  := term
//! term     := or ('->' term)?
//! or       := and ('|' and)*
//! and      := unary ('&' unary)*
//! unary    := '!' unary | group | modal | atom | 'true' | 'false'
//! group    := '(' term ')' ('=' rational)?
//! modal    := ('[' ivs ']' | '<' ivs '>') basic_unary ('=' rational)?
//! atom     := IDENT ('=' | '!=') value ('=' rational)?
//! ivs      := (IDENT '<-' (value | '{' value (',' value)* '}')) % ','
//! value    := INT | STRING | IDENT
//! rational := NUMBER ('/' NUMBER)?
//! ```
//!
//! A modal's body is one basic unary term; parenthesize larger bodies, as in
//! `[Y<-1] (X=1 & Z=0)`. A trailing `= p` turns the term it follows into a
//! probability assertion; assertions and plain causal formulas cannot be mixed
//! inside one Boolean combination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::formula::{
    BasicFormula, CausalFormula, DisjunctiveIntervention, Intervention, ProbCausalFormula,
    ProbTarget,
};
use crate::signature::{Signature, Value, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Result of [`parse`]: either a plain causal formula or a probabilistic one.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Causal(CausalFormula),
    Prob(ProbCausalFormula),
}

pub fn parse(text: &str, sig: &Signature) -> Result<Parsed, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let node = p.term()?;
    p.expect_eof()?;
    Ok(match node {
        Node::Causal(f) => Parsed::Causal(f),
        Node::Prob(f) => Parsed::Prob(f),
    })
}

/// Parses a plain causal formula; probability assertions are rejected.
pub fn parse_causal(text: &str, sig: &Signature) -> Result<CausalFormula, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let node = p.term()?;
    p.expect_eof()?;
    match node {
        Node::Causal(f) => Ok(f),
        Node::Prob(_) => Err(p.err_at(0, "expected a causal formula, found a probability assertion")),
    }
}

/// Parses a probabilistic causal formula.
pub fn parse_prob(text: &str, sig: &Signature) -> Result<ProbCausalFormula, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let node = p.term()?;
    p.expect_eof()?;
    match node {
        Node::Prob(f) => Ok(f),
        Node::Causal(_) => {
            Err(p.err_at(0, "expected a probability assertion such as `... = 1`"))
        }
    }
}

/// Parses a basic (state-only) formula; modalities are rejected.
pub fn parse_basic(text: &str, sig: &Signature) -> Result<BasicFormula, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let f = p.basic_term()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses `a/b`, an integer, or a decimal (optionally with an exponent) into
/// an exact rational.
pub fn parse_rational_literal(text: &str) -> Option<BigRational> {
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let text = text.trim();
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if frac_part.contains(['+', '-']) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return None;
    }
    let n: BigInt = digits.parse().ok()?;
    let scale = frac_part.len() as i32 - exp;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::new(n, ten.pow(scale as u32))
    } else {
        BigRational::from(n * ten.pow((-scale) as u32))
    })
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LBracket,
    RBracket,
    Lt,
    Gt,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Eq,
    NotEq,
    Bang,
    Amp,
    Pipe,
    Slash,
    RArrow,
    LArrow,
    True,
    False,
    Ident(String),
    Number(String),
    Str(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Eof => "end of input".to_string(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::NotEq => "`!=`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Slash => "`/`".into(),
            Tok::RArrow => "`->`".into(),
            Tok::LArrow => "`<-`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Lexer<'a> {
        Lexer { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }

    fn tokens(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut lx = Lexer::new(text);
        let mut out = Vec::new();
        loop {
            while lx.chars.peek().is_some_and(|c| c.is_whitespace()) {
                lx.bump();
            }
            let (line, col) = (lx.line, lx.col);
            let Some(c) = lx.bump() else {
                out.push((Tok::Eof, line, col));
                return Ok(out);
            };
            let tok = match c {
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                '=' => Tok::Eq,
                '&' => Tok::Amp,
                '|' => Tok::Pipe,
                '/' => Tok::Slash,
                '>' => Tok::Gt,
                '<' => {
                    if lx.chars.peek() == Some(&'-') {
                        lx.bump();
                        Tok::LArrow
                    } else {
                        Tok::Lt
                    }
                }
                '!' => {
                    if lx.chars.peek() == Some(&'=') {
                        lx.bump();
                        Tok::NotEq
                    } else {
                        Tok::Bang
                    }
                }
                '-' => {
                    if lx.chars.peek() == Some(&'>') {
                        lx.bump();
                        Tok::RArrow
                    } else if lx.chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        lx.number('-')
                    } else {
                        return Err(lx.error("stray `-`; expected `->` or a number"));
                    }
                }
                '"' => {
                    let mut s = String::new();
                    loop {
                        match lx.bump() {
                            Some('"') => break,
                            Some(c) => s.push(c),
                            None => return Err(lx.error("unterminated string literal")),
                        }
                    }
                    Tok::Str(s)
                }
                c if c.is_ascii_digit() => lx.number(c),
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    s.push(c);
                    while lx
                        .chars
                        .peek()
                        .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
                    {
                        s.push(lx.bump().unwrap());
                    }
                    match s.as_str() {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Ident(s),
                    }
                }
                other => return Err(lx.error(format!("unexpected character `{other}`"))),
            };
            out.push((tok, line, col));
        }
    }

    fn number(&mut self, first: char) -> Tok {
        let mut s = String::new();
        s.push(first);
        while self.chars.peek().is_some_and(|c| c.is_ascii_digit()) {
            s.push(self.bump().unwrap());
        }
        if self.chars.peek() == Some(&'.') {
            s.push(self.bump().unwrap());
            while self.chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                s.push(self.bump().unwrap());
            }
        }
        Tok::Number(s)
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

/// Either kind of formula while the Boolean structure is being assembled.
enum Node {
    Causal(CausalFormula),
    Prob(ProbCausalFormula),
}

struct Parser<'s> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    sig: &'s Signature,
}

impl<'s> Parser<'s> {
    fn new(text: &str, sig: &'s Signature) -> Result<Parser<'s>, ParseError> {
        Ok(Parser { toks: Lexer::tokens(text)?, pos: 0, sig })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        self.err_at(self.pos, message)
    }

    fn err_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let (_, line, col) = self.toks[pos.min(self.toks.len() - 1)];
        ParseError { line, col, message: message.into() }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err_here(format!("expected {}, found {}", tok.describe(), self.peek().describe())))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.err_here(format!("unexpected {}", self.peek().describe())))
        }
    }

    // --- unified causal/probabilistic chain ---

    fn term(&mut self) -> Result<Node, ParseError> {
        let lhs = self.or_chain()?;
        if *self.peek() == Tok::RArrow {
            self.bump();
            let rhs = self.term()?;
            return self.combine(lhs, rhs, CausalFormula::implies, BasicFormula::implies, |a, b| {
                ProbCausalFormula::Implies(Box::new(a), Box::new(b))
            });
        }
        Ok(lhs)
    }

    fn or_chain(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.and_chain()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.and_chain()?;
            lhs = self.combine(lhs, rhs, CausalFormula::or, BasicFormula::or, |a, b| {
                ProbCausalFormula::Or(Box::new(a), Box::new(b))
            })?;
        }
        Ok(lhs)
    }

    fn and_chain(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = self.combine(lhs, rhs, CausalFormula::and, BasicFormula::and, |a, b| {
                ProbCausalFormula::And(Box::new(a), Box::new(b))
            })?;
        }
        Ok(lhs)
    }

    /// Combines two operands of a Boolean connective. A combination of two
    /// purely basic operands stays one basic formula (a bare `phi` reads as
    /// `[] phi`, so grouping decides where the solution quantifier sits at
    /// partial settings).
    fn combine(
        &self,
        a: Node,
        b: Node,
        causal: impl FnOnce(CausalFormula, CausalFormula) -> CausalFormula,
        basic: impl FnOnce(BasicFormula, BasicFormula) -> BasicFormula,
        prob: impl FnOnce(ProbCausalFormula, ProbCausalFormula) -> ProbCausalFormula,
    ) -> Result<Node, ParseError> {
        match (a, b) {
            (Node::Causal(CausalFormula::Basic(a)), Node::Causal(CausalFormula::Basic(b))) => {
                Ok(Node::Causal(CausalFormula::Basic(basic(a, b))))
            }
            (Node::Causal(a), Node::Causal(b)) => Ok(Node::Causal(causal(a, b))),
            (Node::Prob(a), Node::Prob(b)) => Ok(Node::Prob(prob(a, b))),
            _ => Err(self.err_here(
                "cannot mix probability assertions and plain causal formulas in one connective",
            )),
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                match self.unary()? {
                    Node::Causal(CausalFormula::Basic(b)) => {
                        Ok(Node::Causal(CausalFormula::Basic(BasicFormula::not(b))))
                    }
                    Node::Causal(f) => Ok(Node::Causal(CausalFormula::not(f))),
                    Node::Prob(f) => Ok(Node::Prob(ProbCausalFormula::Not(Box::new(f)))),
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.term()?;
                self.expect(Tok::RParen)?;
                match inner {
                    Node::Causal(f) => self.maybe_prob_suffix(f),
                    prob => Ok(prob),
                }
            }
            Tok::LBracket | Tok::Lt => {
                let f = self.modal()?;
                self.maybe_prob_suffix(f)
            }
            Tok::Ident(_) | Tok::True | Tok::False => {
                let f = CausalFormula::Basic(self.basic_leaf()?);
                self.maybe_prob_suffix(f)
            }
            other => Err(self.err_here(format!("unexpected {}", other.describe()))),
        }
    }

    /// A trailing `= p` turns the causal formula just parsed into a
    /// probability assertion.
    fn maybe_prob_suffix(&mut self, f: CausalFormula) -> Result<Node, ParseError> {
        if *self.peek() != Tok::Eq {
            return Ok(Node::Causal(f));
        }
        let at = self.pos;
        self.bump();
        let p = self.rational()?;
        let target = match f.desugar_disjunctive() {
            CausalFormula::Box(iv, body) => ProbTarget::Box(iv, body),
            other => match as_basic(&other) {
                Some(b) => ProbTarget::Basic(b),
                None => {
                    return Err(self.err_at(
                        at,
                        "probability assertions apply to basic formulas or a single [..] modality",
                    ))
                }
            },
        };
        Ok(Node::Prob(ProbCausalFormula::Assert(target, p)))
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let at = self.pos;
        let Tok::Number(first) = self.bump() else {
            return Err(self.err_at(at, "expected a probability literal"));
        };
        let text = if *self.peek() == Tok::Slash {
            self.bump();
            let at2 = self.pos;
            let Tok::Number(second) = self.bump() else {
                return Err(self.err_at(at2, "expected a denominator after `/`"));
            };
            format!("{first}/{second}")
        } else {
            first
        };
        let p = parse_rational_literal(&text)
            .ok_or_else(|| self.err_at(at, format!("cannot parse `{text}` as a rational")))?;
        if p.is_negative() || p > BigRational::one() {
            return Err(self.err_at(at, format!("probability {p} is outside [0, 1]")));
        }
        Ok(p)
    }

    // --- modalities ---

    fn modal(&mut self) -> Result<CausalFormula, ParseError> {
        let diamond = match self.bump() {
            Tok::LBracket => false,
            Tok::Lt => true,
            _ => unreachable!("modal called on `[` or `<` only"),
        };
        let close = if diamond { Tok::Gt } else { Tok::RBracket };
        let mut entries: Vec<(VarId, Vec<u32>, usize)> = Vec::new();
        if *self.peek() != close {
            loop {
                entries.push(self.intervention_entry()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(close)?;
        let body = self.basic_unary()?;

        let any_set = entries.iter().any(|(_, vals, _)| vals.len() > 1);
        let first_pos = entries.first().map(|&(_, _, p)| p).unwrap_or(self.pos);
        if any_set {
            let pairs = entries.into_iter().map(|(v, vals, _)| (v, vals)).collect();
            let div = DisjunctiveIntervention::new(self.sig, pairs)
                .map_err(|e| self.err_at(first_pos, e.to_string()))?;
            Ok(if diamond {
                CausalFormula::DiamondSet(div, body)
            } else {
                CausalFormula::BoxSet(div, body)
            })
        } else {
            let pairs = entries.into_iter().map(|(v, vals, _)| (v, vals[0])).collect();
            let iv = Intervention::new(self.sig, pairs)
                .map_err(|e| self.err_at(first_pos, e.to_string()))?;
            Ok(if diamond {
                CausalFormula::Diamond(iv, body)
            } else {
                CausalFormula::Box(iv, body)
            })
        }
    }

    fn intervention_entry(&mut self) -> Result<(VarId, Vec<u32>, usize), ParseError> {
        let at = self.pos;
        let Tok::Ident(name) = self.bump() else {
            return Err(self.err_at(at, "expected a variable name in intervention"));
        };
        let var = self
            .sig
            .lookup(&name)
            .ok_or_else(|| self.err_at(at, format!("unknown variable `{name}`")))?;
        self.expect(Tok::LArrow)?;
        let mut vals = Vec::new();
        if *self.peek() == Tok::LBrace {
            self.bump();
            loop {
                vals.push(self.value_ix(var)?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RBrace)?;
            vals.dedup();
        } else {
            vals.push(self.value_ix(var)?);
        }
        Ok((var, vals, at))
    }

    fn value_ix(&mut self, var: VarId) -> Result<u32, ParseError> {
        let at = self.pos;
        let value = match self.bump() {
            Tok::Number(text) => {
                let n: i64 = text.parse().map_err(|_| {
                    self.err_at(at, format!("`{text}` is not an integer value"))
                })?;
                Value::Int(n)
            }
            Tok::Str(s) => Value::Str(s),
            Tok::Ident(s) => Value::Str(s),
            other => {
                return Err(self.err_at(at, format!("expected a value, found {}", other.describe())))
            }
        };
        self.sig.value_index(var, &value).ok_or_else(|| {
            self.err_at(
                at,
                format!("value {} out of range for `{}`", value, self.sig.name(var)),
            )
        })
    }

    // --- basic-formula chain (modal bodies, `parse_basic`) ---

    fn basic_term(&mut self) -> Result<BasicFormula, ParseError> {
        let lhs = self.basic_or()?;
        if *self.peek() == Tok::RArrow {
            self.bump();
            let rhs = self.basic_term()?;
            return Ok(BasicFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn basic_or(&mut self) -> Result<BasicFormula, ParseError> {
        let mut lhs = self.basic_and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = BasicFormula::or(lhs, self.basic_and()?);
        }
        Ok(lhs)
    }

    fn basic_and(&mut self) -> Result<BasicFormula, ParseError> {
        let mut lhs = self.basic_unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = BasicFormula::and(lhs, self.basic_unary()?);
        }
        Ok(lhs)
    }

    fn basic_unary(&mut self) -> Result<BasicFormula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(BasicFormula::not(self.basic_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.basic_term()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(_) | Tok::True | Tok::False => self.basic_leaf(),
            other => Err(self.err_here(format!(
                "expected a basic formula, found {}",
                other.describe()
            ))),
        }
    }

    fn basic_leaf(&mut self) -> Result<BasicFormula, ParseError> {
        let at = self.pos;
        match self.bump() {
            Tok::True => Ok(BasicFormula::True),
            Tok::False => Ok(BasicFormula::False),
            Tok::Ident(name) => {
                let var = self
                    .sig
                    .lookup(&name)
                    .ok_or_else(|| self.err_at(at, format!("unknown variable `{name}`")))?;
                if self.sig.kind(var) != crate::signature::VarKind::Endogenous {
                    return Err(self.err_at(
                        at,
                        format!("`{name}` is exogenous; atoms range over endogenous variables"),
                    ));
                }
                let negated = match self.bump() {
                    Tok::Eq => false,
                    Tok::NotEq => true,
                    other => {
                        return Err(self.err_at(
                            self.pos - 1,
                            format!("expected `=` or `!=` after `{name}`, found {}", other.describe()),
                        ))
                    }
                };
                let ix = self.value_ix(var)?;
                let atom = BasicFormula::Atom(var, ix);
                Ok(if negated { BasicFormula::not(atom) } else { atom })
            }
            other => Err(self.err_at(at, format!("unexpected {}", other.describe()))),
        }
    }
}

/// Reconstructs a basic formula from a causal formula whose leaves are all
/// bare basic formulas.
fn as_basic(f: &CausalFormula) -> Option<BasicFormula> {
    match f {
        CausalFormula::Basic(b) => Some(b.clone()),
        CausalFormula::Not(g) => Some(BasicFormula::not(as_basic(g)?)),
        CausalFormula::And(a, b) => Some(BasicFormula::and(as_basic(a)?, as_basic(b)?)),
        CausalFormula::Or(a, b) => Some(BasicFormula::or(as_basic(a)?, as_basic(b)?)),
        CausalFormula::Implies(a, b) => Some(BasicFormula::implies(as_basic(a)?, as_basic(b)?)),
        _ => None,
    }
}
