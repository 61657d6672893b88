//! Line-oriented scenario files: parsing, canonical serialization and instantiation.
//!
//! A file is a sequence of sections. Headers start in column one; body lines are
//! indented. `#` starts a comment. Cells are whitespace separated and each cell is a
//! space-free arithmetic expression over integers and parameters, so `1/3`,
//! `-x*v+c` and `(1-x)*v` are all single cells.
//!
//! ```text
//! SCENARIO name
//! SPACE
//!   <subspace>: <label> <label> ...
//! MARGINALS
//!   <subspace>: <expr> <expr> ...
//! PARAMS
//!   <param> = <expr>
//! ACTS
//!   <act>: <expr> x N            (row-major, first subspace slowest)
//! EVENTS
//!   <event>: <event expr>
//! BELIEFS
//!   <belief>: <expr> x N
//! PRIOR full | independent | vertices | product
//!   <vertex>: <expr> x N         (vertices)
//!   {1,2}: full | independent | <expr> x |Ω_I|   (product, one line per block)
//! UTILITY identity | crra rho=<expr> scale=<expr> base=<expr>
//! SWEEP <param> <lo> <hi> <step>
//! ```
//!
//! Event expressions combine tuples `[Hcs,*]` (one label or `*` per subspace), names of
//! earlier events, `all` and `none` with `!` (complement), `&` (intersection) and `|` (union).

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::independence::product_of_components;
use crate::polytope::CorrelationSet;
use crate::preferences::{PriorSet, RiskUtility};
use crate::rational::{format_rational, to_f64, Rational};
use crate::space::{
    independent_product, Act, Collection, Event, IndexSet, JointDistribution, Marginal,
    ProductSpace,
};

// ---------------------------------------------------------------------------
// arithmetic expressions

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn rational(r: &Rational) -> Expr {
        let mut num = Expr::Int(r.numer().abs());
        if r.is_negative() {
            num = Expr::Neg(Box::new(num));
        }
        if r.is_integer() {
            num
        } else {
            Expr::Div(Box::new(num), Box::new(Expr::Int(r.denom().clone())))
        }
    }

    /// Parses a single cell; the error carries a 0-based character offset.
    pub fn parse(text: &str) -> std::result::Result<Expr, (usize, String)> {
        let mut p = ExprParser {
            chars: text.chars().collect(),
            pos: 0,
        };
        let e = p.sum()?;
        if p.pos != p.chars.len() {
            return Err((p.pos, format!("unexpected `{}`", p.chars[p.pos])));
        }
        Ok(e)
    }

    pub fn eval(&self, env: &HashMap<String, Rational>) -> Result<Rational> {
        Ok(match self {
            Expr::Int(i) => Rational::from_integer(i.clone()),
            Expr::Var(v) => env
                .get(v)
                .cloned()
                .ok_or_else(|| Error::Scenario(format!("unbound parameter `{v}`")))?,
            Expr::Neg(a) => -a.eval(env)?,
            Expr::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Expr::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Expr::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Expr::Div(a, b) => {
                let d = b.eval(env)?;
                if d.is_zero() {
                    return Err(Error::Scenario(format!("division by zero in `{self}`")));
                }
                a.eval(env)? / d
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Int(_) | Expr::Var(_) => 4,
        }
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        match self {
            Expr::Int(i) => write!(f, "{i}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, a.precedence() < 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => "+",
                    Expr::Sub(..) => "-",
                    Expr::Mul(..) => "*",
                    _ => "/",
                };
                wrap(f, a, a.precedence() < prec)?;
                f.write_str(op)?;
                wrap(f, b, b.precedence() <= prec)
            }
        }
    }
}

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
}

type PResult<T> = std::result::Result<T, (usize, String)>;

impl ExprParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> PResult<Expr> {
        let mut left = self.product()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let right = self.product()?;
            left = if c == '+' {
                Expr::Add(Box::new(left), Box::new(right))
            } else {
                Expr::Sub(Box::new(left), Box::new(right))
            };
        }
        Ok(left)
    }

    fn product(&mut self) -> PResult<Expr> {
        let mut left = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let right = self.unary()?;
            left = if c == '*' {
                Expr::Mul(Box::new(left), Box::new(right))
            } else {
                Expr::Div(Box::new(left), Box::new(right))
            };
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(')') {
                    return Err((self.pos, "expected `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                if self.peek().is_some_and(|c| c == '.' || c == 'e' || c == 'E') {
                    return Err((self.pos, "floating-point literals are not accepted; write num/den".into()));
                }
                let digits: String = self.chars[start..self.pos].iter().collect();
                Ok(Expr::Int(digits.parse().expect("ascii digits")))
            }
            Some(c) if is_ident_start(c) => {
                while self.peek().is_some_and(is_ident_char) {
                    self.pos += 1;
                }
                Ok(Expr::Var(self.chars[start..self.pos].iter().collect()))
            }
            Some(c) => Err((self.pos, format!("unexpected `{c}`"))),
            None => Err((self.pos, "unexpected end of expression".into())),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char)
}

// ---------------------------------------------------------------------------
// event expressions

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventExpr {
    All,
    Empty,
    /// One label per subspace; `None` is the wildcard `*`.
    Tuple(Vec<Option<String>>),
    Named(String),
    Not(Box<EventExpr>),
    And(Box<EventExpr>, Box<EventExpr>),
    Or(Box<EventExpr>, Box<EventExpr>),
}

impl EventExpr {
    pub fn parse(text: &str) -> std::result::Result<EventExpr, (usize, String)> {
        let mut p = EventParser {
            chars: text.chars().collect(),
            pos: 0,
        };
        let e = p.union()?;
        if p.pos != p.chars.len() {
            return Err((p.pos, format!("unexpected `{}`", p.chars[p.pos])));
        }
        Ok(e)
    }

    pub fn eval(&self, space: &ProductSpace, named: &HashMap<String, Event>) -> Result<Event> {
        Ok(match self {
            EventExpr::All => Event::full(space.clone()),
            EventExpr::Empty => Event::empty(space.clone()),
            EventExpr::Tuple(parts) => {
                if parts.len() != space.arity() {
                    return Err(Error::Scenario(format!(
                        "tuple has {} entries but the space has {} subspaces",
                        parts.len(),
                        space.arity()
                    )));
                }
                let mut fixed = Vec::new();
                for (i, part) in parts.iter().enumerate() {
                    if let Some(label) = part {
                        let c = space.label_position(i, label).ok_or_else(|| {
                            Error::Scenario(format!("unknown label `{label}` for subspace {}", i + 1))
                        })?;
                        fixed.push((i, c));
                    }
                }
                let members = (0..space.total_size())
                    .filter(|&k| fixed.iter().all(|&(i, c)| space.coordinate(k, i) == c));
                Event::from_flat(space.clone(), members)?
            }
            EventExpr::Named(n) => named
                .get(n)
                .cloned()
                .ok_or_else(|| Error::Scenario(format!("unknown event `{n}`")))?,
            EventExpr::Not(a) => a.eval(space, named)?.complement(),
            EventExpr::And(a, b) => a.eval(space, named)?.intersection(&b.eval(space, named)?),
            EventExpr::Or(a, b) => a.eval(space, named)?.union(&b.eval(space, named)?),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            EventExpr::Or(..) => 1,
            EventExpr::And(..) => 2,
            EventExpr::Not(..) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for EventExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paren = |f: &mut fmt::Formatter<'_>, e: &EventExpr, p: bool| {
            if p {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            EventExpr::All => f.write_str("all"),
            EventExpr::Empty => f.write_str("none"),
            EventExpr::Tuple(parts) => {
                let cells: Vec<&str> = parts.iter().map(|p| p.as_deref().unwrap_or("*")).collect();
                write!(f, "[{}]", cells.join(","))
            }
            EventExpr::Named(n) => f.write_str(n),
            EventExpr::Not(a) => {
                f.write_str("!")?;
                paren(f, a, a.precedence() < 3)
            }
            EventExpr::And(a, b) | EventExpr::Or(a, b) => {
                let prec = self.precedence();
                paren(f, a, a.precedence() < prec)?;
                f.write_str(if prec == 2 { "&" } else { "|" })?;
                paren(f, b, b.precedence() <= prec)
            }
        }
    }
}

struct EventParser {
    chars: Vec<char>,
    pos: usize,
}

impl EventParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn union(&mut self) -> PResult<EventExpr> {
        let mut left = self.intersection()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            left = EventExpr::Or(Box::new(left), Box::new(self.intersection()?));
        }
        Ok(left)
    }

    fn intersection(&mut self) -> PResult<EventExpr> {
        let mut left = self.complement()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            left = EventExpr::And(Box::new(left), Box::new(self.complement()?));
        }
        Ok(left)
    }

    fn complement(&mut self) -> PResult<EventExpr> {
        if self.peek() == Some('!') {
            self.pos += 1;
            return Ok(EventExpr::Not(Box::new(self.complement()?)));
        }
        self.atom()
    }

    fn ident(&mut self) -> PResult<String> {
        let start = self.pos;
        // labels may start with a digit (unlabelled subspaces use 1, 2, ...)
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err((self.pos, "expected a name".into()));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> PResult<EventExpr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.union()?;
                if self.peek() != Some(')') {
                    return Err((self.pos, "expected `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some('[') => {
                self.pos += 1;
                let mut parts = Vec::new();
                loop {
                    if self.peek() == Some('*') {
                        self.pos += 1;
                        parts.push(None);
                    } else {
                        parts.push(Some(self.ident()?));
                    }
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(']') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err((self.pos, "expected `,` or `]`".into())),
                    }
                }
                Ok(EventExpr::Tuple(parts))
            }
            Some(c) if is_ident_start(c) => {
                let name = self.ident()?;
                Ok(match name.as_str() {
                    "all" => EventExpr::All,
                    "none" => EventExpr::Empty,
                    _ => EventExpr::Named(name),
                })
            }
            Some(c) => Err((self.pos, format!("unexpected `{c}`"))),
            None => Err((self.pos, "unexpected end of event expression".into())),
        }
    }
}

// ---------------------------------------------------------------------------
// documents

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockSpec {
    /// Every vertex of the block's own correlation set.
    Full,
    /// The block's independent product.
    Independent,
    Weights(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PriorSpec {
    Full,
    Independent,
    Vertices(Vec<(String, Vec<Expr>)>),
    Product(Vec<(IndexSet, BlockSpec)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UtilitySpec {
    Identity,
    Crra { rho: Expr, scale: Expr, base: Expr },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepSpec {
    pub param: String,
    pub lo: Expr,
    pub hi: Expr,
    pub step: Expr,
}

/// A parsed, not yet evaluated scenario file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub name: String,
    pub space: Vec<(String, Vec<String>)>,
    pub marginals: Vec<(String, Vec<Expr>)>,
    pub params: Vec<(String, Expr)>,
    pub acts: Vec<(String, Vec<Expr>)>,
    pub events: Vec<(String, EventExpr)>,
    pub beliefs: Vec<(String, Vec<Expr>)>,
    pub prior: PriorSpec,
    pub utility: UtilitySpec,
    pub sweep: Option<SweepSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Space,
    Marginals,
    Params,
    Acts,
    Events,
    Beliefs,
    Prior,
    None,
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(text: &str, base: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((base + text[..s].chars().count(), &text[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((base + text[..s].chars().count(), &text[s..]));
    }
    out
}

fn parse_cells(line: usize, cells: &[(usize, &str)]) -> Result<Vec<Expr>> {
    cells
        .iter()
        .map(|&(col, t)| Expr::parse(t).map_err(|(off, m)| perr(line, col + off, m)))
        .collect()
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let mut name = None;
        let mut doc = Document {
            name: String::new(),
            space: Vec::new(),
            marginals: Vec::new(),
            params: Vec::new(),
            acts: Vec::new(),
            events: Vec::new(),
            beliefs: Vec::new(),
            prior: PriorSpec::Full,
            utility: UtilitySpec::Identity,
            sweep: None,
        };
        let mut section = Section::None;
        let mut seen: HashSet<String> = HashSet::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let indent = line.len() - line.trim_start().len();
            if indent == 0 {
                let toks = tokens(line, 1);
                let (col, keyword) = toks[0];
                if !seen.insert(keyword.to_string()) {
                    return Err(perr(line_no, col, format!("duplicate section {keyword}")));
                }
                let args = &toks[1..];
                let no_args = |section: Section| -> Result<Section> {
                    match args.first() {
                        Some(&(c, t)) => Err(perr(line_no, c, format!("unexpected `{t}` after {keyword}"))),
                        None => Ok(section),
                    }
                };
                section = match keyword {
                    "SCENARIO" => {
                        match args {
                            [(c, n)] if is_ident(n) => {
                                let _ = c;
                                name = Some(n.to_string());
                            }
                            [(c, _)] | [(c, _), ..] => return Err(perr(line_no, *c, "expected one scenario name")),
                            [] => return Err(perr(line_no, col, "missing scenario name")),
                        }
                        Section::None
                    }
                    "SPACE" => no_args(Section::Space)?,
                    "MARGINALS" => no_args(Section::Marginals)?,
                    "PARAMS" => no_args(Section::Params)?,
                    "ACTS" => no_args(Section::Acts)?,
                    "EVENTS" => no_args(Section::Events)?,
                    "BELIEFS" => no_args(Section::Beliefs)?,
                    "PRIOR" => {
                        let kind = match args {
                            [(_, k)] => *k,
                            [] => return Err(perr(line_no, col, "missing prior kind")),
                            [_, (c, t), ..] => return Err(perr(line_no, *c, format!("unexpected `{t}`"))),
                        };
                        doc.prior = match kind {
                            "full" => PriorSpec::Full,
                            "independent" => PriorSpec::Independent,
                            "vertices" => PriorSpec::Vertices(Vec::new()),
                            "product" => PriorSpec::Product(Vec::new()),
                            other => {
                                return Err(perr(line_no, args[0].0, format!("unknown prior spec `{other}`")))
                            }
                        };
                        Section::Prior
                    }
                    "UTILITY" => {
                        doc.utility = parse_utility(line_no, args, col)?;
                        Section::None
                    }
                    "SWEEP" => {
                        match args {
                            [(pc, p), lo, hi, step] => {
                                if !is_ident(p) {
                                    return Err(perr(line_no, *pc, "expected a parameter name"));
                                }
                                let cells = parse_cells(line_no, &[*lo, *hi, *step])?;
                                let mut it = cells.into_iter();
                                doc.sweep = Some(SweepSpec {
                                    param: p.to_string(),
                                    lo: it.next().unwrap(),
                                    hi: it.next().unwrap(),
                                    step: it.next().unwrap(),
                                });
                            }
                            _ => return Err(perr(line_no, col, "SWEEP expects <param> <lo> <hi> <step>")),
                        }
                        Section::None
                    }
                    other => return Err(perr(line_no, col, format!("unknown section `{other}`"))),
                };
                continue;
            }

            let body = line.trim_start();
            let base = indent + 1;
            match section {
                Section::None => return Err(perr(line_no, base, "indented line outside a section")),
                Section::Params => {
                    let (lhs, rhs) = body
                        .split_once('=')
                        .ok_or_else(|| perr(line_no, base, "expected `name = value`"))?;
                    let pname = lhs.trim();
                    if !is_ident(pname) {
                        return Err(perr(line_no, base, format!("invalid parameter name `{pname}`")));
                    }
                    let rhs_col = base + lhs.chars().count() + 1;
                    let cells = tokens(rhs, rhs_col);
                    if cells.len() != 1 {
                        return Err(perr(line_no, rhs_col, "expected a single value"));
                    }
                    let e = parse_cells(line_no, &cells)?.remove(0);
                    doc.params.push((pname.to_string(), e));
                }
                _ => {
                    let (key, rest) = body
                        .split_once(':')
                        .ok_or_else(|| perr(line_no, base, "expected `name: ...`"))?;
                    let key = key.trim();
                    let rest_col = base + key.chars().count() + 1;
                    let cells = tokens(rest, rest_col);
                    match section {
                        Section::Space => {
                            check_name(line_no, base, key)?;
                            if cells.is_empty() {
                                return Err(perr(line_no, rest_col, "a subspace needs at least one state"));
                            }
                            let labels = cells
                                .iter()
                                .map(|&(c, t)| {
                                    if t.chars().all(is_ident_char) {
                                        Ok(t.to_string())
                                    } else {
                                        Err(perr(line_no, c, format!("invalid state label `{t}`")))
                                    }
                                })
                                .collect::<Result<_>>()?;
                            doc.space.push((key.to_string(), labels));
                        }
                        Section::Marginals => {
                            check_name(line_no, base, key)?;
                            doc.marginals.push((key.to_string(), parse_cells(line_no, &cells)?));
                        }
                        Section::Acts => {
                            check_name(line_no, base, key)?;
                            doc.acts.push((key.to_string(), parse_cells(line_no, &cells)?));
                        }
                        Section::Beliefs => {
                            check_name(line_no, base, key)?;
                            doc.beliefs.push((key.to_string(), parse_cells(line_no, &cells)?));
                        }
                        Section::Events => {
                            check_name(line_no, base, key)?;
                            let (c, t) = match cells.as_slice() {
                                [one] => *one,
                                _ => return Err(perr(line_no, rest_col, "expected one event expression")),
                            };
                            let e = EventExpr::parse(t).map_err(|(off, m)| perr(line_no, c + off, m))?;
                            doc.events.push((key.to_string(), e));
                        }
                        Section::Prior => match &mut doc.prior {
                            PriorSpec::Vertices(list) => {
                                check_name(line_no, base, key)?;
                                list.push((key.to_string(), parse_cells(line_no, &cells)?));
                            }
                            PriorSpec::Product(blocks) => {
                                let set = parse_block(key).map_err(|m| perr(line_no, base, m))?;
                                let spec = match cells.as_slice() {
                                    [(_, "full")] => BlockSpec::Full,
                                    [(_, "independent")] => BlockSpec::Independent,
                                    _ => BlockSpec::Weights(parse_cells(line_no, &cells)?),
                                };
                                blocks.push((set, spec));
                            }
                            _ => return Err(perr(line_no, base, "this prior kind takes no body lines")),
                        },
                        Section::Params | Section::None => unreachable!(),
                    }
                }
            }
        }
        doc.name = name.ok_or_else(|| perr(1, 1, "missing SCENARIO header"))?;
        if doc.space.is_empty() {
            return Err(perr(1, 1, "missing SPACE section"));
        }
        Ok(doc)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Document> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Document::parse(&text)
    }

    /// Canonical text; parsing it again yields an equal document.
    pub fn serialize(&self) -> String {
        let mut sections: Vec<String> = Vec::new();
        let keyed = |header: &str, rows: &[(String, Vec<Expr>)]| {
            let mut s = format!("{header}\n");
            for (k, cells) in rows {
                let _ = writeln!(s, "  {k}: {}", join_exprs(cells));
            }
            s
        };
        sections.push(format!("SCENARIO {}\n", self.name));
        let mut space = String::from("SPACE\n");
        for (k, labels) in &self.space {
            let _ = writeln!(space, "  {k}: {}", labels.join(" "));
        }
        sections.push(space);
        if !self.marginals.is_empty() {
            sections.push(keyed("MARGINALS", &self.marginals));
        }
        if !self.params.is_empty() {
            let mut s = String::from("PARAMS\n");
            for (k, e) in &self.params {
                let _ = writeln!(s, "  {k} = {e}");
            }
            sections.push(s);
        }
        if !self.acts.is_empty() {
            sections.push(keyed("ACTS", &self.acts));
        }
        if !self.events.is_empty() {
            let mut s = String::from("EVENTS\n");
            for (k, e) in &self.events {
                let _ = writeln!(s, "  {k}: {e}");
            }
            sections.push(s);
        }
        if !self.beliefs.is_empty() {
            sections.push(keyed("BELIEFS", &self.beliefs));
        }
        sections.push(match &self.prior {
            PriorSpec::Full => "PRIOR full\n".to_string(),
            PriorSpec::Independent => "PRIOR independent\n".to_string(),
            PriorSpec::Vertices(list) => keyed("PRIOR vertices", list),
            PriorSpec::Product(blocks) => {
                let mut s = String::from("PRIOR product\n");
                for (set, spec) in blocks {
                    let body = match spec {
                        BlockSpec::Full => "full".to_string(),
                        BlockSpec::Independent => "independent".to_string(),
                        BlockSpec::Weights(w) => join_exprs(w),
                    };
                    let _ = writeln!(s, "  {set}: {body}");
                }
                s
            }
        });
        sections.push(match &self.utility {
            UtilitySpec::Identity => "UTILITY identity\n".to_string(),
            UtilitySpec::Crra { rho, scale, base } => {
                format!("UTILITY crra rho={rho} scale={scale} base={base}\n")
            }
        });
        if let Some(sw) = &self.sweep {
            sections.push(format!("SWEEP {} {} {} {}\n", sw.param, sw.lo, sw.hi, sw.step));
        }
        sections.join("\n")
    }

    /// Evaluates the document with its own parameter values.
    pub fn instantiate(&self) -> Result<Scenario> {
        self.instantiate_with(&[])
    }

    /// Evaluates the document after replacing the listed parameter values.
    pub fn instantiate_with(&self, overrides: &[(String, Rational)]) -> Result<Scenario> {
        Scenario::build(self, overrides)
    }
}

fn join_exprs(cells: &[Expr]) -> String {
    cells.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

fn check_name(line: usize, col: usize, name: &str) -> Result<()> {
    if is_ident(name) {
        Ok(())
    } else {
        Err(perr(line, col, format!("invalid name `{name}`")))
    }
}

fn parse_block(key: &str) -> std::result::Result<IndexSet, String> {
    let inner = key
        .strip_prefix('{')
        .and_then(|k| k.strip_suffix('}'))
        .ok_or_else(|| format!("expected a block like {{1,2}}, got `{key}`"))?;
    let mut set = Vec::new();
    for t in inner.split(',') {
        let k: usize = t.trim().parse().map_err(|_| format!("bad subspace number `{t}`"))?;
        if k == 0 {
            return Err("subspace numbers are 1-based".into());
        }
        set.push(k - 1);
    }
    Ok(IndexSet::new(set))
}

fn parse_utility(line: usize, args: &[(usize, &str)], col: usize) -> Result<UtilitySpec> {
    match args {
        [(_, "identity")] => Ok(UtilitySpec::Identity),
        [(_, "crra"), rest @ ..] => {
            let mut values: HashMap<&str, Expr> = HashMap::new();
            for &(c, t) in rest {
                let (k, v) = t
                    .split_once('=')
                    .ok_or_else(|| perr(line, c, "expected key=value"))?;
                if !matches!(k, "rho" | "scale" | "base") {
                    return Err(perr(line, c, format!("unknown CRRA setting `{k}`")));
                }
                let off = k.len() + 1;
                let e = Expr::parse(v).map_err(|(o, m)| perr(line, c + off + o, m))?;
                values.insert(k, e);
            }
            let rho = values
                .remove("rho")
                .ok_or_else(|| perr(line, col, "CRRA utility needs rho"))?;
            Ok(UtilitySpec::Crra {
                rho,
                scale: values.remove("scale").unwrap_or(Expr::Int(1.into())),
                base: values.remove("base").unwrap_or(Expr::Int(0.into())),
            })
        }
        [(c, t), ..] => Err(perr(line, *c, format!("unknown utility `{t}`"))),
        [] => Err(perr(line, col, "missing utility kind")),
    }
}

// ---------------------------------------------------------------------------
// instantiated scenarios

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sweep {
    pub param: String,
    pub lo: Rational,
    pub hi: Rational,
    pub step: Rational,
}

impl Sweep {
    /// `lo, lo + step, …` up to and including `hi`; empty when `lo > hi`.
    pub fn grid(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut v = self.lo.clone();
        while v <= self.hi {
            out.push(v.clone());
            v += &self.step;
        }
        out
    }
}

/// A fully evaluated and validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub space: ProductSpace,
    pub marginals: Vec<Marginal>,
    pub params: Vec<(String, Rational)>,
    pub acts: Vec<(String, Act)>,
    pub events: Vec<(String, Event)>,
    pub beliefs: Vec<(String, JointDistribution)>,
    pub prior: PriorSet,
    /// One name per prior vertex.
    pub vertex_names: Vec<String>,
    pub utility: RiskUtility,
    pub sweep: Option<Sweep>,
    correlation_set: CorrelationSet,
}

fn unique_names<'a>(what: &str, names: impl Iterator<Item = &'a String>) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::Scenario(format!("duplicate {what} name `{n}`")));
        }
    }
    Ok(())
}

fn eval_all(cells: &[Expr], env: &HashMap<String, Rational>) -> Result<Vec<Rational>> {
    cells.iter().map(|e| e.eval(env)).collect()
}

impl Scenario {
    fn build(doc: &Document, overrides: &[(String, Rational)]) -> Result<Scenario> {
        unique_names("subspace", doc.space.iter().map(|(n, _)| n))?;
        unique_names("parameter", doc.params.iter().map(|(n, _)| n))?;
        unique_names("act", doc.acts.iter().map(|(n, _)| n))?;
        unique_names("event", doc.events.iter().map(|(n, _)| n))?;
        unique_names("belief", doc.beliefs.iter().map(|(n, _)| n))?;

        let space = ProductSpace::with_labels(doc.space.iter().map(|(_, l)| l.clone()).collect())?;
        let n = space.total_size();

        let mut env: HashMap<String, Rational> = HashMap::new();
        let mut params = Vec::new();
        for (name, e) in &doc.params {
            let v = match overrides.iter().find(|(k, _)| k == name) {
                Some((_, v)) => v.clone(),
                None => e.eval(&env)?,
            };
            env.insert(name.clone(), v.clone());
            params.push((name.clone(), v));
        }
        if let Some((k, _)) = overrides.iter().find(|(k, _)| !env.contains_key(k)) {
            return Err(Error::Scenario(format!("unbound parameter `{k}`")));
        }

        let index_of = |name: &str| doc.space.iter().position(|(n, _)| n == name);
        let mut marginals = Vec::new();
        for (name, cells) in &doc.marginals {
            let i = index_of(name).ok_or_else(|| Error::Scenario(format!("unknown subspace `{name}`")))?;
            if cells.len() != space.sizes()[i] {
                return Err(Error::Scenario(format!(
                    "marginal `{name}` has {} weights but the subspace has {} states",
                    cells.len(),
                    space.sizes()[i]
                )));
            }
            marginals.push(Marginal::new(i, eval_all(cells, &env)?)?);
        }
        let correlation_set = CorrelationSet::new(&space, &marginals)?;
        let marginals = correlation_set.marginals().to_vec();

        let sized = |what: &str, name: &str, cells: &[Expr]| -> Result<Vec<Rational>> {
            if cells.len() != n {
                return Err(Error::Scenario(format!(
                    "{what} `{name}` has {} values but the space has {n} states",
                    cells.len()
                )));
            }
            eval_all(cells, &env)
        };

        let mut acts = Vec::new();
        for (name, cells) in &doc.acts {
            acts.push((name.clone(), Act::new(space.clone(), sized("act", name, cells)?)?));
        }

        let mut named: HashMap<String, Event> = HashMap::new();
        let mut events = Vec::new();
        for (name, e) in &doc.events {
            let ev = e.eval(&space, &named)?;
            named.insert(name.clone(), ev.clone());
            events.push((name.clone(), ev));
        }

        let mut beliefs = Vec::new();
        for (name, cells) in &doc.beliefs {
            let w = sized("belief", name, cells)?;
            let p = JointDistribution::new(space.clone(), w)
                .map_err(|e| Error::Scenario(format!("belief `{name}`: {e}")))?;
            beliefs.push((name.clone(), p));
        }

        let (vertices, vertex_names) = match &doc.prior {
            PriorSpec::Full => {
                let v = correlation_set.vertices()?.to_vec();
                let names = (1..=v.len()).map(|k| format!("v{k}")).collect();
                (v, names)
            }
            PriorSpec::Independent => (vec![correlation_set.independent_product().clone()], vec!["ind".to_string()]),
            PriorSpec::Vertices(list) => {
                unique_names("prior vertex", list.iter().map(|(n, _)| n))?;
                let mut v = Vec::new();
                for (name, cells) in list {
                    let w = sized("prior vertex", name, cells)?;
                    v.push(
                        JointDistribution::new(space.clone(), w)
                            .map_err(|e| Error::Scenario(format!("prior vertex `{name}`: {e}")))?,
                    );
                }
                (v, list.iter().map(|(n, _)| n.clone()).collect())
            }
            PriorSpec::Product(blocks) => product_prior(&correlation_set, blocks, &env)?,
        };
        if vertices.is_empty() {
            return Err(Error::Scenario("prior set is empty".into()));
        }
        for (name, p) in vertex_names.iter().zip(&vertices) {
            if !correlation_set.contains(p) {
                return Err(Error::Scenario(format!(
                    "prior vertex `{name}` does not have the scenario's marginals"
                )));
            }
        }
        // keep names aligned with deduplicated vertices
        let mut kept: Vec<(String, JointDistribution)> = Vec::new();
        for (name, p) in vertex_names.into_iter().zip(vertices) {
            if !kept.iter().any(|(_, q)| *q == p) {
                kept.push((name, p));
            }
        }
        let (vertex_names, vertices): (Vec<String>, Vec<JointDistribution>) = kept.into_iter().unzip();
        let prior = PriorSet::new(&space, vertices)?;

        let utility = match &doc.utility {
            UtilitySpec::Identity => RiskUtility::Identity,
            UtilitySpec::Crra { rho, scale, base } => RiskUtility::Crra {
                rho: to_f64(&rho.eval(&env)?),
                scale: to_f64(&scale.eval(&env)?),
                base: to_f64(&base.eval(&env)?),
            },
        };

        let sweep = match &doc.sweep {
            None => None,
            Some(s) => {
                if !env.contains_key(&s.param) {
                    return Err(Error::Scenario(format!("unbound parameter `{}`", s.param)));
                }
                let step = s.step.eval(&env)?;
                if !step.is_positive() {
                    return Err(Error::Scenario("sweep step must be positive".into()));
                }
                Some(Sweep {
                    param: s.param.clone(),
                    lo: s.lo.eval(&env)?,
                    hi: s.hi.eval(&env)?,
                    step,
                })
            }
        };

        Ok(Scenario {
            name: doc.name.clone(),
            space,
            marginals,
            params,
            acts,
            events,
            beliefs,
            prior,
            vertex_names,
            utility,
            sweep,
            correlation_set,
        })
    }

    pub fn correlation_set(&self) -> &CorrelationSet {
        &self.correlation_set
    }

    pub fn param(&self, name: &str) -> Result<&Rational> {
        self.params
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Scenario(format!("unbound parameter `{name}`")))
    }

    pub fn act(&self, name: &str) -> Result<&Act> {
        self.acts
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Scenario(format!("unknown act `{name}`")))
    }

    pub fn event(&self, name: &str) -> Result<&Event> {
        self.events
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Scenario(format!("unknown event `{name}`")))
    }

    pub fn belief(&self, name: &str) -> Result<&JointDistribution> {
        self.beliefs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Scenario(format!("unknown belief `{name}`")))
    }

    /// Evaluates an event expression against the scenario's labels and named events.
    pub fn parse_event(&self, text: &str) -> Result<Event> {
        let e = EventExpr::parse(text).map_err(|(off, m)| perr(1, off + 1, m))?;
        let named: HashMap<String, Event> = self.events.iter().cloned().collect();
        e.eval(&self.space, &named)
    }
}

fn product_prior(
    cs: &CorrelationSet,
    blocks: &[(IndexSet, BlockSpec)],
    env: &HashMap<String, Rational>,
) -> Result<(Vec<JointDistribution>, Vec<String>)> {
    let space = cs.space();
    let partition = Collection::new(blocks.iter().map(|(s, _)| s.clone()).collect())
        .map_err(|e| Error::Scenario(format!("product prior: {e}")))?;
    partition.check_within(space.arity())?;
    if !partition.is_partition_of(space.arity()) {
        return Err(Error::Scenario(format!("product prior blocks {partition} do not cover every subspace")));
    }
    let mut choices: Vec<Vec<JointDistribution>> = Vec::new();
    for (set, spec) in blocks {
        let sub = space.subspace(set)?;
        let local: Vec<Marginal> = set
            .iter()
            .enumerate()
            .map(|(j, i)| Marginal::new(j, cs.marginals()[i].weights().to_vec()))
            .collect::<Result<_>>()?;
        choices.push(match spec {
            BlockSpec::Full => CorrelationSet::new(&sub, &local)?.vertices()?.to_vec(),
            BlockSpec::Independent => vec![independent_product(&sub, &local)?],
            BlockSpec::Weights(cells) => {
                if cells.len() != sub.total_size() {
                    return Err(Error::Scenario(format!(
                        "block {set} has {} weights but needs {}",
                        cells.len(),
                        sub.total_size()
                    )));
                }
                let w = eval_all(cells, env)?;
                vec![JointDistribution::new(sub, w).map_err(|e| Error::Scenario(format!("block {set}: {e}")))?]
            }
        });
    }
    let mut out = Vec::new();
    let mut names = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    loop {
        let parts: Vec<JointDistribution> = idx.iter().zip(&choices).map(|(&k, c)| c[k].clone()).collect();
        out.push(product_of_components(space, &partition, &parts)?);
        names.push(format!("v{}", out.len()));
        let mut j = choices.len();
        loop {
            if j == 0 {
                return Ok((out, names));
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < choices[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Loads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    Document::read(path)?.instantiate()
}

/// `PRIOR vertices` block listing the given distributions.
pub fn prior_block(names: &[String], vertices: &[JointDistribution]) -> String {
    let mut s = String::from("PRIOR vertices\n");
    for (name, v) in names.iter().zip(vertices) {
        let cells: Vec<String> = v.weights().iter().map(format_rational).collect();
        let _ = writeln!(s, "  {name}: {}", cells.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    const SMALL: &str = "\
SCENARIO small
SPACE
  a: x y
  b: u v
MARGINALS
  a: 1/2 1/2
  b: q 1-q
PARAMS
  q = 1/3
ACTS
  f: 4 -k*2 3 (1-q)*3
PARAMS_PLACEHOLDER
";

    fn small() -> String {
        SMALL.replace("PARAMS_PLACEHOLDER\n", "EVENTS\n  e: [x,*]\n  g: !e|[*,u]&e\nPRIOR full\nUTILITY identity\n")
            .replace("-k*2", "-q*2")
    }

    #[test]
    fn expressions_round_trip() {
        for text in ["1/3", "-x*v+c", "(1-x)*v", "-(1-x)*v-c", "a-(b-c)", "a/(b*c)", "--3", "2*-x", "1/6+a"] {
            let e = Expr::parse(text).unwrap();
            assert_eq!(e.to_string(), text);
        }
        assert_eq!(Expr::parse("(a*b)+c").unwrap().to_string(), "a*b+c");
        assert!(Expr::parse("0.5").is_err());
        assert!(Expr::parse("1/").is_err());
        let env = HashMap::from([("a".to_string(), ratio(1, 4))]);
        assert_eq!(Expr::parse("1/6+a").unwrap().eval(&env).unwrap(), ratio(5, 12));
        assert!(Expr::parse("1/(a-a)").unwrap().eval(&env).is_err());
        assert_eq!(Expr::rational(&ratio(-2, 3)).to_string(), "-2/3");
    }

    #[test]
    fn event_expressions() {
        for text in ["[Hcs,*]", "!a|b&c", "!(a|b)", "a&(b|c)", "all", "none", "[1,*]"] {
            assert_eq!(EventExpr::parse(text).unwrap().to_string(), text);
        }
        assert!(EventExpr::parse("[a,").is_err());
    }

    #[test]
    fn parses_and_instantiates() {
        let doc = Document::parse(&small()).unwrap();
        let s = doc.instantiate().unwrap();
        assert_eq!(s.space.sizes(), &[2, 2]);
        assert_eq!(s.act("f").unwrap().values(), &[int(4), ratio(-2, 3), int(3), int(2)]);
        assert_eq!(s.event("e").unwrap().members().iter().copied().collect::<Vec<_>>(), vec![0, 1]);
        // !e | ([*,u] & e) = {2,3} ∪ {0}
        assert_eq!(s.event("g").unwrap().members().iter().copied().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(s.prior.len(), 2);
        let again = Document::parse(&doc.serialize()).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let bad = small().replace("1/2 1/2", "1/2 0.5");
        match Document::parse(&bad) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 6);
                assert_eq!(column, 11);
            }
            other => panic!("unexpected {other:?}"),
        }
        let wrong_len = small().replace("f: 4 -q*2 3 (1-q)*3", "f: 4 1");
        assert!(matches!(Document::parse(&wrong_len).unwrap().instantiate(), Err(Error::Scenario(_))));
        let unknown = small().replace("PRIOR full", "PRIOR fancy");
        assert!(matches!(Document::parse(&unknown), Err(Error::Parse { .. })));
    }

    #[test]
    fn empty_acts_and_overrides() {
        let text = "SCENARIO bare\nSPACE\n  a: x y\nMARGINALS\n  a: p 1-p\nPARAMS\n  p = 1/2\n";
        let doc = Document::parse(text).unwrap();
        let s = doc.instantiate_with(&[("p".into(), ratio(1, 4))]).unwrap();
        assert!(s.acts.is_empty());
        assert_eq!(s.marginals[0].weights(), &[ratio(1, 4), ratio(3, 4)]);
        assert!(doc.instantiate_with(&[("zz".into(), int(1))]).is_err());
    }

    #[test]
    fn sweep_grid() {
        let s = Sweep {
            param: "a".into(),
            lo: int(0),
            hi: ratio(1, 3),
            step: ratio(1, 12),
        };
        assert_eq!(s.grid().len(), 5);
        let empty = Sweep { lo: int(1), hi: int(0), ..s };
        assert!(empty.grid().is_empty());
    }
}
