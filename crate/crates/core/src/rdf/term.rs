use std::cmp::Ordering;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::ns;

/// An absolute IRI.
///
/// The text lives behind a shared pointer; a hash of it is kept inline so
/// that most unequal comparisons never touch the heap.
#[derive(Clone)]
pub struct Iri {
    hash: u64,
    text: Arc<str>,
}

impl Iri {
    pub fn new(iri: impl AsRef<str>) -> Self {
        let text: Arc<str> = Arc::from(iri.as_ref());
        let mut h = DefaultHasher::new();
        text.hash(&mut h);
        Iri { hash: h.finish(), text }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Whether the string starts with a URI scheme (`scheme ":"`).
    pub fn is_absolute(iri: &str) -> bool {
        let mut chars = iri.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return false,
        }
        for c in chars {
            if c == ':' {
                return true;
            }
            if !(c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
                return false;
            }
        }
        false
    }
}

impl PartialEq for Iri {
    fn eq(&self, other: &Self) -> bool {
        self.hash == other.hash && (Arc::ptr_eq(&self.text, &other.text) || self.text == other.text)
    }
}

impl Eq for Iri {}

impl Hash for Iri {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

/// Lexicographic by text.
impl Ord for Iri {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            Ordering::Equal
        } else {
            self.text.cmp(&other.text)
        }
    }
}

impl PartialOrd for Iri {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.text)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Iri {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.text)
    }
}

impl From<&str> for Iri {
    fn from(s: &str) -> Self {
        Iri::new(s)
    }
}

/// A literal: lexical form plus optional datatype. Language tags are not supported.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: Arc<str>,
    datatype: Option<Iri>,
}

impl Literal {
    pub fn string(lexical: impl AsRef<str>) -> Self {
        Literal { lexical: Arc::from(lexical.as_ref()), datatype: None }
    }

    pub fn typed(lexical: impl AsRef<str>, datatype: Iri) -> Self {
        // xsd:string is the same value as a plain literal
        if datatype.as_str() == ns::XSD_STRING {
            return Literal::string(lexical);
        }
        Literal { lexical: Arc::from(lexical.as_ref()), datatype: Some(datatype) }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&Iri> {
        self.datatype.as_ref()
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.lexical)?;
        if let Some(dt) = &self.datatype {
            write!(f, "^^{dt:?}")?;
        }
        Ok(())
    }
}

/// A document-scoped blank node label (without the `_:` prefix).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankId(Arc<str>);

impl BlankId {
    pub fn new(label: impl AsRef<str>) -> Self {
        BlankId(Arc::from(label.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for BlankId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

/// An RDF term.
///
/// Collections are not a separate variant: they live in the graph as their
/// `rdf:first`/`rdf:rest` encoding and are read back with
/// [`Graph::collection`](super::Graph::collection).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Blank(BlankId),
    Literal(Literal),
}

impl Term {
    pub fn iri(iri: impl AsRef<str>) -> Self {
        Term::Iri(Iri::new(iri))
    }

    pub fn blank(label: impl AsRef<str>) -> Self {
        Term::Blank(BlankId::new(label))
    }

    pub fn literal(lexical: impl AsRef<str>) -> Self {
        Term::Literal(Literal::string(lexical))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => i.fmt(f),
            Term::Blank(b) => b.fmt(f),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

/// Human-oriented rendering: IRIs as absolute strings, literals by lexical form.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => f.write_str(i.as_str()),
            Term::Blank(b) => write!(f, "_:{}", b.as_str()),
            Term::Literal(l) => f.write_str(l.lexical()),
        }
    }
}

/// A subject–predicate–object statement. The predicate is always an IRI.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Term>, predicate: impl Into<Iri>, object: impl Into<Term>) -> Self {
        Triple { subject: subject.into(), predicate: predicate.into(), object: object.into() }
    }
}

impl From<&Iri> for Iri {
    fn from(iri: &Iri) -> Self {
        iri.clone()
    }
}

impl From<&Term> for Term {
    fn from(t: &Term) -> Self {
        t.clone()
    }
}
