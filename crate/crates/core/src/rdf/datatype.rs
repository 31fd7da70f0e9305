use super::{RDF_LANG_STRING, XSD};

/// Coarse value class of a literal datatype, deciding which range learner applies.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DatatypeClass {
    Numeric,
    Temporal,
    Textual,
    Other,
}

const NUMERIC: &[&str] = &[
    "integer",
    "decimal",
    "float",
    "double",
    "long",
    "int",
    "short",
    "byte",
    "nonNegativeInteger",
    "nonPositiveInteger",
    "negativeInteger",
    "positiveInteger",
    "unsignedLong",
    "unsignedInt",
    "unsignedShort",
    "unsignedByte",
];

const TEMPORAL: &[&str] = &[
    "date",
    "dateTime",
    "dateTimeStamp",
    "gYear",
    "gYearMonth",
    "gMonthDay",
    "gMonth",
    "gDay",
    "time",
    "duration",
    "dayTimeDuration",
    "yearMonthDuration",
];

pub fn classify_datatype(datatype: &str) -> DatatypeClass {
    if datatype == RDF_LANG_STRING {
        return DatatypeClass::Textual;
    }
    let Some(local) = datatype.strip_prefix(XSD) else {
        return DatatypeClass::Other;
    };
    if NUMERIC.contains(&local) {
        DatatypeClass::Numeric
    } else if TEMPORAL.contains(&local) {
        DatatypeClass::Temporal
    } else if local == "string" || local == "normalizedString" || local == "token" {
        DatatypeClass::Textual
    } else {
        DatatypeClass::Other
    }
}
