//! RDF data model, N-Triples ingestion and the dictionary-encoded graph.

mod datatype;
mod graph;
mod ntriples;

pub use datatype::{classify_datatype, DatatypeClass};
pub use graph::{build_graph, Assertion, Dictionary, KnowledgeGraph};
pub use ntriples::{parse_ntriples, write_term, ParseMode, ParsedTriples, RawTriple};

use std::fmt;

pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

/// Dense integer handle for an encoded resource.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResourceId(pub u32);

impl ResourceId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub lexical: String,
    /// Always set: plain literals get `xsd:string`, tagged ones `rdf:langString`.
    pub datatype: String,
    pub language: Option<String>,
}

impl Literal {
    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: datatype.into(),
            language: None,
        }
    }

    pub fn plain(lexical: impl Into<String>) -> Self {
        Self::typed(lexical, XSD_STRING)
    }

    pub fn tagged(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: RDF_LANG_STRING.to_owned(),
            language: Some(language.into()),
        }
    }

    pub fn class(&self) -> DatatypeClass {
        classify_datatype(&self.datatype)
    }
}

/// An RDF term. IRIs and blank nodes are entities; literals are attribute values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resource {
    Iri(String),
    Blank(String),
    Literal(Literal),
}

impl Resource {
    pub fn iri(s: impl Into<String>) -> Self {
        Resource::Iri(s.into())
    }

    pub fn is_entity(&self) -> bool {
        !matches!(self, Resource::Literal(_))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Resource::Iri(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Resource::Literal(l) => Some(l),
            _ => None,
        }
    }

    /// The lexical form: IRI text, blank node label, or literal value.
    pub fn lexical(&self) -> &str {
        match self {
            Resource::Iri(s) | Resource::Blank(s) => s,
            Resource::Literal(l) => &l.lexical,
        }
    }
}

impl fmt::Display for Resource {
    /// N-Triples term syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self);
        f.write_str(&s)
    }
}
