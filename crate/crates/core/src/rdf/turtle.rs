//! Parser for the Turtle subset used by policy documents.
//!
//! Supported: `@prefix`/`@base` (and the SPARQL-style `PREFIX`/`BASE`), IRIs,
//! prefixed names, `a`, predicate lists (`;`), object lists (`,`), labelled
//! and anonymous blank nodes, collections, string literals (short and long
//! forms), `^^` datatypes, numeric and boolean literals, comments.
//! Language tags are rejected.

use std::collections::HashMap;

use super::graph::Graph;
use super::ns;
use super::term::{Iri, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct TurtleError {
    pub line: usize,
    pub column: usize,
    pub kind: TurtleErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TurtleErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undefined prefix `{0}:`")]
    UndefinedPrefix(String),
    #[error("relative IRI <{0}> with no base")]
    RelativeIri(String),
    #[error("unsupported construct: {0}")]
    Unsupported(String),
}

/// Configurable Turtle parser. The defaults pre-declare `rdf:`, `rdfs:`, `xsd:`
/// and the empty prefix bound to the policy vocabulary.
#[derive(Debug, Clone)]
pub struct TurtleParser {
    base: Option<String>,
    prefixes: HashMap<String, String>,
}

impl Default for TurtleParser {
    fn default() -> Self {
        let mut prefixes = HashMap::new();
        prefixes.insert("rdf".to_owned(), ns::RDF.to_owned());
        prefixes.insert("rdfs".to_owned(), ns::RDFS.to_owned());
        prefixes.insert("xsd".to_owned(), ns::XSD.to_owned());
        prefixes.insert(String::new(), crate::vocab::DEFAULT_NAMESPACE.to_owned());
        TurtleParser { base: None, prefixes }
    }
}

impl TurtleParser {
    pub fn new() -> Self {
        Self::default()
    }

    /// A parser with no pre-declared prefixes at all.
    pub fn bare() -> Self {
        TurtleParser { base: None, prefixes: HashMap::new() }
    }

    pub fn with_base(mut self, base: impl Into<String>) -> Self {
        self.base = Some(base.into());
        self
    }

    pub fn with_prefix(mut self, prefix: impl Into<String>, namespace: impl Into<String>) -> Self {
        self.prefixes.insert(prefix.into(), namespace.into());
        self
    }

    pub fn parse(&self, text: &str) -> Result<Graph, TurtleError> {
        let mut state = State {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            base: self.base.clone(),
            prefixes: self.prefixes.clone(),
            labels: HashMap::new(),
            graph: Graph::new(),
        };
        state.document()?;
        Ok(state.graph)
    }
}

/// Parses `text` with the default prefixes and an optional base IRI.
pub fn parse_turtle(text: &str, base: Option<&str>) -> Result<Graph, TurtleError> {
    let mut parser = TurtleParser::new();
    if let Some(b) = base {
        parser = parser.with_base(b);
    }
    parser.parse(text)
}

struct State {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    base: Option<String>,
    prefixes: HashMap<String, String>,
    labels: HashMap<String, Term>,
    graph: Graph,
}

type PResult<T> = Result<T, TurtleError>;

impl State {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err<T>(&self, kind: TurtleErrorKind) -> PResult<T> {
        Err(TurtleError { line: self.line, column: self.column, kind })
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> PResult<T> {
        self.err(TurtleErrorKind::Syntax(msg.into()))
    }

    fn describe_next(&self) -> String {
        match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_owned(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected `{c}`, found {}", self.describe_next()))
        }
    }

    fn starts_with_keyword(&self, kw: &str) -> bool {
        let n = kw.chars().count();
        let matches = kw
            .chars()
            .enumerate()
            .all(|(i, k)| self.peek_at(i).is_some_and(|c| c.eq_ignore_ascii_case(&k)));
        matches && self.peek_at(n).is_some_and(char::is_whitespace)
    }

    fn document(&mut self) -> PResult<()> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            self.statement()?;
        }
    }

    fn statement(&mut self) -> PResult<()> {
        if self.peek() == Some('@') {
            self.bump();
            if self.starts_with_keyword("prefix") {
                self.pos_advance(6);
                self.prefix_decl()?;
            } else if self.starts_with_keyword("base") {
                self.pos_advance(4);
                self.base_decl()?;
            } else {
                return self.syntax("unknown directive");
            }
            return self.expect('.');
        }
        if self.starts_with_keyword("prefix") {
            self.pos_advance(6);
            return self.prefix_decl();
        }
        if self.starts_with_keyword("base") {
            self.pos_advance(4);
            return self.base_decl();
        }
        self.triples()?;
        self.expect('.')
    }

    fn pos_advance(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn prefix_decl(&mut self) -> PResult<()> {
        self.skip_ws();
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if !(is_pn_chars(c) || c == '.') {
                return self.syntax(format!("invalid prefix character `{c}`"));
            }
            prefix.push(c);
            self.bump();
        }
        if self.peek() != Some(':') {
            return self.syntax("expected `:` in prefix declaration");
        }
        self.bump();
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.prefixes.insert(prefix, iri.as_str().to_owned());
        Ok(())
    }

    fn base_decl(&mut self) -> PResult<()> {
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.base = Some(iri.as_str().to_owned());
        Ok(())
    }

    fn triples(&mut self) -> PResult<()> {
        self.skip_ws();
        if self.peek() == Some('[') {
            let subject = self.blank_property_list()?;
            self.skip_ws();
            if self.peek() != Some('.') {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject = match self.peek() {
            Some('(') => self.collection()?,
            _ => {
                let t = self.resource_or_blank()?;
                if t.is_literal() {
                    return self.syntax("literal in subject position");
                }
                t
            }
        };
        self.predicate_object_list(&subject)
    }

    fn predicate_object_list(&mut self, subject: &Term) -> PResult<()> {
        loop {
            self.skip_ws();
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            if matches!(self.peek(), Some('.') | Some(']') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> PResult<Iri> {
        if self.peek() == Some('a')
            && self.peek_at(1).is_none_or(|c| c.is_whitespace() || matches!(c, '<' | '[' | '"' | '(' | '_'))
        {
            self.bump();
            return Ok(Iri::new(ns::RDF_TYPE));
        }
        match self.peek() {
            Some('<') => self.iri_ref(),
            Some(c) if is_pn_chars_base(c) || c == ':' => self.prefixed_name(),
            _ => self.syntax(format!("expected predicate, found {}", self.describe_next())),
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Iri) -> PResult<()> {
        loop {
            self.skip_ws();
            let object = self.object()?;
            self.graph.insert(Triple { subject: subject.clone(), predicate: predicate.clone(), object });
            self.skip_ws();
            if self.peek() == Some(',') {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> PResult<Term> {
        match self.peek() {
            Some('[') => self.blank_property_list(),
            Some('(') => self.collection(),
            _ => self.resource_or_blank(),
        }
    }

    /// IRI, prefixed name, labelled blank node or literal.
    fn resource_or_blank(&mut self) -> PResult<Term> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.blank_label(),
            Some('"') | Some('\'') => self.string_literal(),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-') => self.numeric_literal(),
            Some('.') if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => self.numeric_literal(),
            Some(_) if self.boolean_ahead("true") => {
                self.pos_advance(4);
                Ok(Term::Literal(Literal::typed("true", Iri::new(ns::XSD_BOOLEAN))))
            }
            Some(_) if self.boolean_ahead("false") => {
                self.pos_advance(5);
                Ok(Term::Literal(Literal::typed("false", Iri::new(ns::XSD_BOOLEAN))))
            }
            Some(c) if is_pn_chars_base(c) || c == ':' => Ok(Term::Iri(self.prefixed_name()?)),
            _ => self.syntax(format!("expected term, found {}", self.describe_next())),
        }
    }

    fn boolean_ahead(&self, word: &str) -> bool {
        let n = word.len();
        word.chars().enumerate().all(|(i, w)| self.peek_at(i) == Some(w))
            && self.peek_at(n).is_none_or(|c| !(is_pn_chars(c) || c == ':'))
    }

    fn blank_property_list(&mut self) -> PResult<Term> {
        self.expect('[')?;
        let node = self.graph.fresh_blank();
        self.skip_ws();
        if self.peek() == Some(']') {
            self.bump();
            return Ok(node);
        }
        self.predicate_object_list(&node)?;
        self.expect(']')?;
        Ok(node)
    }

    fn collection(&mut self) -> PResult<Term> {
        self.expect('(')?;
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(')') => {
                    self.bump();
                    break;
                }
                None => return self.syntax("unterminated collection"),
                _ => items.push(self.object()?),
            }
        }
        Ok(self.graph.insert_collection(&items))
    }

    fn blank_label(&mut self) -> PResult<Term> {
        self.bump();
        self.bump();
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if is_pn_chars(c) || (c == '.' && self.peek_at(1).is_some_and(is_pn_chars)) {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if label.is_empty() {
            return self.syntax("empty blank node label");
        }
        if let Some(t) = self.labels.get(&label) {
            return Ok(t.clone());
        }
        let node = self.graph.fresh_blank();
        self.labels.insert(label, node.clone());
        Ok(node)
    }

    fn iri_ref(&mut self) -> PResult<Iri> {
        if self.peek() != Some('<') {
            return self.syntax(format!("expected IRI, found {}", self.describe_next()));
        }
        let (line, column) = (self.line, self.column);
        self.bump();
        let mut raw = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => raw.push(self.unicode_escape()?),
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return self.syntax(format!("invalid character `{c}` in IRI"));
                }
                Some(c) => raw.push(c),
                None => return self.syntax("unterminated IRI"),
            }
        }
        self.resolve(&raw).map_err(|kind| TurtleError { line, column, kind })
    }

    fn resolve(&self, raw: &str) -> Result<Iri, TurtleErrorKind> {
        if Iri::is_absolute(raw) {
            return Ok(Iri::new(raw));
        }
        let Some(base) = &self.base else {
            return Err(TurtleErrorKind::RelativeIri(raw.to_owned()));
        };
        let base = url::Url::parse(base).map_err(|_| TurtleErrorKind::RelativeIri(raw.to_owned()))?;
        let joined = base.join(raw).map_err(|_| TurtleErrorKind::RelativeIri(raw.to_owned()))?;
        Ok(Iri::new(joined.as_str()))
    }

    fn unicode_escape(&mut self) -> PResult<char> {
        let digits = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return self.syntax("invalid escape in IRI"),
        };
        self.hex_char(digits)
    }

    fn hex_char(&mut self, digits: usize) -> PResult<char> {
        let mut code = 0u32;
        for _ in 0..digits {
            let Some(d) = self.bump().and_then(|c| c.to_digit(16)) else {
                return self.syntax("invalid hex escape");
            };
            code = code * 16 + d;
        }
        match char::from_u32(code) {
            Some(c) => Ok(c),
            None => self.syntax("escape is not a valid code point"),
        }
    }

    fn prefixed_name(&mut self) -> PResult<Iri> {
        let (line, column) = (self.line, self.column);
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if is_pn_chars(c) || (c == '.' && self.peek_at(1).is_some_and(|n| is_pn_chars(n) || n == ':')) {
                prefix.push(c);
                self.bump();
            } else {
                return self.syntax(format!("expected `:` in prefixed name `{prefix}`, found {}", self.describe_next()));
            }
        }
        if self.peek() != Some(':') {
            return self.syntax("unexpected end of input in prefixed name");
        }
        self.bump();
        let mut local = String::new();
        loop {
            match self.peek() {
                Some('\\') => {
                    self.bump();
                    match self.bump() {
                        Some(c) if "_~.-!$&'()*+,;=/?#@%".contains(c) => local.push(c),
                        _ => return self.syntax("invalid local name escape"),
                    }
                }
                Some('%') => {
                    local.push('%');
                    self.bump();
                    for _ in 0..2 {
                        match self.bump() {
                            Some(h) if h.is_ascii_hexdigit() => local.push(h),
                            _ => return self.syntax("invalid percent escape"),
                        }
                    }
                }
                Some('.') if self.peek_at(1).is_some_and(|n| is_pn_chars(n) || n == ':' || n == '%') => {
                    local.push('.');
                    self.bump();
                }
                Some(c) if is_pn_chars(c) || c == ':' => {
                    local.push(c);
                    self.bump();
                }
                _ => break,
            }
        }
        match self.prefixes.get(&prefix) {
            Some(ns) => Ok(Iri::new(format!("{ns}{local}"))),
            None => Err(TurtleError { line, column, kind: TurtleErrorKind::UndefinedPrefix(prefix) }),
        }
    }

    fn string_literal(&mut self) -> PResult<Term> {
        let quote = self.bump().expect("caller checked quote");
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.bump();
            self.bump();
        }
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return self.syntax("unterminated string literal"),
                Some(c) if c == quote => {
                    if !long {
                        break;
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                        self.bump();
                        self.bump();
                        // up to two extra quotes may precede the closing delimiter
                        while self.peek() == Some(quote) {
                            value.push(quote);
                            self.bump();
                        }
                        break;
                    }
                    value.push(c);
                }
                Some('\\') => value.push(self.string_escape()?),
                Some('\n') | Some('\r') if !long => return self.syntax("newline in short string literal"),
                Some(c) => value.push(c),
            }
        }
        match self.peek() {
            Some('@') => self.err(TurtleErrorKind::Unsupported("language-tagged literal".to_owned())),
            Some('^') if self.peek_at(1) == Some('^') => {
                self.bump();
                self.bump();
                let dt = match self.peek() {
                    Some('<') => self.iri_ref()?,
                    _ => self.prefixed_name()?,
                };
                Ok(Term::Literal(Literal::typed(value, dt)))
            }
            _ => Ok(Term::Literal(Literal::string(value))),
        }
    }

    fn string_escape(&mut self) -> PResult<char> {
        match self.bump() {
            Some('t') => Ok('\t'),
            Some('b') => Ok('\u{8}'),
            Some('n') => Ok('\n'),
            Some('r') => Ok('\r'),
            Some('f') => Ok('\u{c}'),
            Some('"') => Ok('"'),
            Some('\'') => Ok('\''),
            Some('\\') => Ok('\\'),
            Some('u') => self.hex_char(4),
            Some('U') => self.hex_char(8),
            _ => self.syntax("invalid string escape"),
        }
    }

    fn numeric_literal(&mut self) -> PResult<Term> {
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            text.push(c);
            self.bump();
        }
        let mut int_digits = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            text.push(c);
            self.bump();
            int_digits += 1;
        }
        let mut datatype = ns::XSD_INTEGER;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                text.push(c);
                self.bump();
            }
            datatype = ns::XSD_DECIMAL;
        } else if int_digits == 0 {
            return self.syntax("malformed number");
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            text.push(e);
            self.bump();
            if let Some(c @ ('+' | '-')) = self.peek() {
                text.push(c);
                self.bump();
            }
            let mut exp_digits = 0;
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                text.push(c);
                self.bump();
                exp_digits += 1;
            }
            if exp_digits == 0 {
                return self.syntax("malformed exponent");
            }
            datatype = ns::XSD_DOUBLE;
        }
        Ok(Term::Literal(Literal::typed(text, Iri::new(datatype))))
    }
}

fn is_pn_chars_base(c: char) -> bool {
    c.is_alphabetic()
}

fn is_pn_chars(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{b7}'
}
