//! Configuration templates: families of integer polynomial forms.
//!
//! A template source is line oriented:
//!
//! ```text
//! # the configuration {x, y, xy, x+ny}
//! template xny
//! vars x y
//! params n
//! forms x; y; x*y; x+n*y
//! distinct none
//! min 1
//! ```
//!
//! A `/` outside a comment acts as a line break, so the same template can be
//! written on one line as `vars x y / params n / forms x; y; x*y; x+n*y`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

/// Which coincidences are excluded from an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Distinctness {
    /// Any assignment is allowed; forms may collapse onto each other.
    None,
    /// The variables must take pairwise distinct values.
    Variables,
    /// Every form must take a different value.
    Values,
}

impl Distinctness {
    pub fn keyword(self) -> &'static str {
        match self {
            Distinctness::None => "none",
            Distinctness::Variables => "vars",
            Distinctness::Values => "values",
        }
    }
}

impl fmt::Display for Distinctness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// One monomial of a form: `coeff * prod(params^e) * prod(vars^e)`.
///
/// Exponent lists are sorted by index and never contain a zero exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: BigUint,
    pub params: Vec<(usize, u32)>,
    pub vars: Vec<(usize, u32)>,
}

/// A polynomial in the template's variables whose coefficients may involve
/// parameters. All coefficients are positive, so a form is positive and
/// non-decreasing in every variable on positive inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Form {
    terms: Vec<Term>,
}

impl Form {
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Variables referenced with a positive exponent.
    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().flat_map(|t| t.vars.iter().map(|&(v, _)| v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("form is identically zero and can never be positive")]
    ZeroForm,
    #[error("variable `{0}` does not occur in any form")]
    UnusedVariable(String),
    #[error("missing `{0}` declaration")]
    Missing(&'static str),
}

/// A validated configuration template with symbolic parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    name: String,
    variables: Vec<String>,
    parameters: Vec<String>,
    forms: Vec<Form>,
    sources: Vec<String>,
    distinctness: Distinctness,
    min_value: u64,
}

impl Template {
    pub fn parse(text: &str) -> Result<Template, ParseError> {
        parse_template(text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    /// The forms as written in the source, one string per form.
    pub fn form_sources(&self) -> &[String] {
        &self.sources
    }

    pub fn distinctness(&self) -> Distinctness {
        self.distinctness
    }

    pub fn min_value(&self) -> u64 {
        self.min_value
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Template {
        self.name = name.into();
        self
    }

    pub fn with_distinctness(mut self, distinctness: Distinctness) -> Template {
        self.distinctness = distinctness;
        self
    }

    /// Canonical source text; parsing it yields an equal template.
    pub fn to_source(&self) -> String {
        let mut out = format!("template {}\nvars {}\n", self.name, self.variables.join(" "));
        if !self.parameters.is_empty() {
            out.push_str(&format!("params {}\n", self.parameters.join(" ")));
        }
        out.push_str(&format!("forms {}\n", self.sources.join("; ")));
        out.push_str(&format!("distinct {}\nmin {}\n", self.distinctness, self.min_value));
        out
    }
}

/// Parse a template source. See the module documentation for the grammar.
pub fn parse_template(text: &str) -> Result<Template, ParseError> {
    let mut name: Option<String> = None;
    let mut variables: Vec<String> = Vec::new();
    let mut vars_seen = false;
    let mut parameters: Vec<String> = Vec::new();
    let mut form_chunks: Vec<(usize, usize, String)> = Vec::new();
    let mut distinctness = Distinctness::None;
    let mut min_value = 1u64;
    let mut first_line = None;

    let mut line_no = 0usize;
    for raw_line in text.lines() {
        let content = raw_line.split('#').next().unwrap_or("");
        let mut offset = 0usize;
        for segment in content.split('/') {
            line_no += if offset == 0 { 1 } else { 0 };
            let seg_offset = offset;
            offset += segment.len() + 1;
            let trimmed = segment.trim_start();
            let lead = segment.len() - trimmed.len();
            let trimmed = trimmed.trim_end();
            if trimmed.is_empty() {
                continue;
            }
            let col = seg_offset + lead + 1;
            first_line.get_or_insert((line_no, col));
            let (keyword, rest) = match trimmed.find(char::is_whitespace) {
                Some(i) => (&trimmed[..i], trimmed[i..].trim_start()),
                None => (trimmed, ""),
            };
            let rest_col = col + (trimmed.len() - rest.len());
            let err = |column: usize, kind: ParseErrorKind| ParseError { line: line_no, column, kind };
            match keyword {
                "template" => {
                    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                        return Err(err(rest_col, ParseErrorKind::Syntax("expected a template name".into())));
                    }
                    name = Some(rest.to_string());
                }
                "vars" | "params" => {
                    let target = if keyword == "vars" { &mut variables } else { &mut parameters };
                    if keyword == "vars" {
                        vars_seen = true;
                    }
                    for word in rest.split_whitespace() {
                        let wcol = rest_col + (word.as_ptr() as usize - rest.as_ptr() as usize);
                        if !is_identifier(word) {
                            return Err(err(wcol, ParseErrorKind::Syntax(format!("`{word}` is not an identifier"))));
                        }
                        target.push(word.to_string());
                    }
                }
                "forms" => form_chunks.push((line_no, rest_col, rest.to_string())),
                "distinct" => {
                    distinctness = match rest {
                        "none" => Distinctness::None,
                        "vars" => Distinctness::Variables,
                        "values" => Distinctness::Values,
                        _ => {
                            return Err(err(rest_col, ParseErrorKind::Syntax("expected `none`, `vars` or `values`".into())))
                        }
                    }
                }
                "min" => {
                    min_value = match rest.parse::<u64>() {
                        Ok(v) if v >= 1 => v,
                        _ => return Err(err(rest_col, ParseErrorKind::Syntax("min expects a positive integer".into()))),
                    }
                }
                other => {
                    return Err(err(col, ParseErrorKind::Syntax(format!("unknown directive `{other}`"))));
                }
            }
        }
    }

    let (first_line, first_col) = first_line.unwrap_or((1, 1));
    if !vars_seen || variables.is_empty() {
        return Err(ParseError { line: first_line, column: first_col, kind: ParseErrorKind::Missing("vars") });
    }
    if form_chunks.is_empty() {
        return Err(ParseError { line: first_line, column: first_col, kind: ParseErrorKind::Missing("forms") });
    }

    let mut symbols: BTreeMap<String, Symbol> = BTreeMap::new();
    for (i, v) in variables.iter().enumerate() {
        if symbols.insert(v.clone(), Symbol::Var(i)).is_some() {
            return Err(ParseError { line: first_line, column: first_col, kind: ParseErrorKind::Duplicate(v.clone()) });
        }
    }
    for (i, p) in parameters.iter().enumerate() {
        if symbols.insert(p.clone(), Symbol::Param(i)).is_some() {
            return Err(ParseError { line: first_line, column: first_col, kind: ParseErrorKind::Duplicate(p.clone()) });
        }
    }

    let arity = variables.len() + parameters.len();
    let mut forms = Vec::new();
    let mut sources = Vec::new();
    for (line, col, chunk) in &form_chunks {
        let mut start = 0usize;
        for piece in chunk.split(';') {
            let piece_col = col + start;
            start += piece.len() + 1;
            if piece.trim().is_empty() {
                continue;
            }
            let mut parser = ExprParser { src: piece.as_bytes(), pos: 0, line: *line, col: piece_col, symbols: &symbols, nvars: variables.len(), arity };
            let poly = parser.parse_form()?;
            let lead = piece.len() - piece.trim_start().len();
            if poly.is_empty() {
                return Err(ParseError { line: *line, column: piece_col + lead, kind: ParseErrorKind::ZeroForm });
            }
            forms.push(poly_to_form(poly, variables.len()));
            sources.push(piece.split_whitespace().collect::<Vec<_>>().join(""));
        }
    }
    if forms.is_empty() {
        return Err(ParseError { line: first_line, column: first_col, kind: ParseErrorKind::Missing("forms") });
    }

    let mut used = vec![false; variables.len()];
    for f in &forms {
        for v in f.variables() {
            used[v] = true;
        }
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(ParseError { line: first_line, column: first_col, kind: ParseErrorKind::UnusedVariable(variables[i].clone()) });
    }

    Ok(Template {
        name: name.unwrap_or_else(|| "unnamed".to_string()),
        variables,
        parameters,
        forms,
        sources,
        distinctness,
        min_value,
    })
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, Copy)]
enum Symbol {
    Var(usize),
    Param(usize),
}

/// Sparse polynomial over variables followed by parameters.
type Poly = BTreeMap<Vec<u32>, BigUint>;

fn poly_add(mut a: Poly, b: Poly) -> Poly {
    for (m, c) in b {
        *a.entry(m).or_insert_with(BigUint::zero) += c;
    }
    a.retain(|_, c| !c.is_zero());
    a
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            *out.entry(m).or_insert_with(BigUint::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_to_form(poly: Poly, nvars: usize) -> Form {
    let mut terms: Vec<Term> = poly
        .into_iter()
        .map(|(m, coeff)| Term {
            coeff,
            vars: m[..nvars].iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect(),
            params: m[nvars..].iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect(),
        })
        .collect();
    terms.sort_by(|a, b| (&a.vars, &a.params).cmp(&(&b.vars, &b.params)));
    Form { terms }
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    symbols: &'a BTreeMap<String, Symbol>,
    nvars: usize,
    arity: usize,
}

const MAX_EXPONENT: u32 = 64;

impl ExprParser<'_> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: self.col + self.pos, kind }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_form(&mut self) -> Result<Poly, ParseError> {
        let poly = self.parse_sum()?;
        match self.peek() {
            None => Ok(poly),
            Some(c) => Err(self.error(ParseErrorKind::Syntax(format!("unexpected `{}`", c as char)))),
        }
    }

    fn parse_sum(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.parse_product()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let rhs = self.parse_product()?;
            acc = poly_add(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_product(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.parse_power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.parse_power()?;
            acc = poly_mul(&acc, &rhs);
        }
        Ok(acc)
    }

    fn parse_power(&mut self) -> Result<Poly, ParseError> {
        let base = self.parse_atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let exp: u32 = match digits.parse() {
            Ok(e) if e <= MAX_EXPONENT => e,
            Ok(_) => return Err(self.error(ParseErrorKind::Syntax(format!("exponent above {MAX_EXPONENT}")))),
            Err(_) => return Err(self.error(ParseErrorKind::Syntax("expected an exponent".into()))),
        };
        let mut out = Poly::new();
        out.insert(vec![0; self.arity], BigUint::one());
        for _ in 0..exp {
            out = poly_mul(&out, &base);
        }
        Ok(out)
    }

    fn parse_atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.error(ParseErrorKind::Syntax("expected `)`".into())));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let value = BigUint::parse_bytes(&self.src[start..self.pos], 10).expect("digits");
                let mut out = Poly::new();
                if !value.is_zero() {
                    out.insert(vec![0; self.arity], value);
                }
                Ok(out)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let index = match self.symbols.get(ident) {
                    Some(Symbol::Var(i)) => *i,
                    Some(Symbol::Param(i)) => self.nvars + i,
                    None => {
                        self.pos = start;
                        return Err(self.error(ParseErrorKind::Undeclared(ident.to_string())));
                    }
                };
                let mut m = vec![0u32; self.arity];
                m[index] = 1;
                let mut out = Poly::new();
                out.insert(m, BigUint::one());
                Ok(out)
            }
            Some(c) => Err(self.error(ParseErrorKind::Syntax(format!("unexpected `{}`", c as char)))),
            None => Err(self.error(ParseErrorKind::Syntax("unexpected end of expression".into()))),
        }
    }
}
