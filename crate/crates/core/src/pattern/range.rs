use serde::{Deserialize, Serialize};

use crate::ranges::temporal::{self, TemporalKind};
use crate::ranges::StructuredRegex;
use crate::rdf::{DatatypeClass, Literal, Resource, RDF_LANG_STRING, XSD, XSD_STRING};

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

impl Component {
    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// What the numbers of a Gaussian range measure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValueKind {
    Numeric,
    /// Unix seconds of literals with exactly this datatype.
    Temporal { kind: TemporalKind, datatype: String },
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub shift: f64,
    pub scale: f64,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization {
            shift: 0.0,
            scale: 1.0,
        }
    }
}

/// Learned distribution behind a value-range variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RangeModel {
    Gaussian {
        components: Vec<Component>,
        normalization: Normalization,
        kind: ValueKind,
    },
    Regex(StructuredRegex),
}

/// Inclusive interval of one mixture component, as compared and as printed.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
    pub lo_lexical: String,
    pub hi_lexical: String,
    pub datatype: String,
}

impl RangeModel {
    pub fn numeric(mean: f64, variance: f64) -> Self {
        RangeModel::Gaussian {
            components: vec![Component {
                weight: 1.0,
                mean,
                variance,
            }],
            normalization: Normalization::default(),
            kind: ValueKind::Numeric,
        }
    }

    /// Stable text identifying the model; part of canonical pattern strings.
    pub fn key(&self) -> String {
        match self {
            RangeModel::Gaussian { components, kind, .. } => {
                let tag = match kind {
                    ValueKind::Numeric => "num".to_string(),
                    ValueKind::Temporal { datatype, .. } => {
                        datatype.strip_prefix(XSD).unwrap_or(datatype).to_string()
                    }
                };
                let comps: Vec<String> = components
                    .iter()
                    .map(|c| format!("{};{};{}", c.weight, c.mean, c.variance))
                    .collect();
                format!("N<{tag}>({})", comps.join("|"))
            }
            RangeModel::Regex(r) => format!("R/{}/", r.pattern()),
        }
    }

    /// Per-component inclusive bounds, mean minus and plus one standard
    /// deviation. Numbers and continuous times are rounded to two decimals;
    /// calendar types snap inward to whole calendar values. Empty for regexes.
    pub fn bounds(&self) -> Vec<Bounds> {
        let RangeModel::Gaussian { components, kind, .. } = self else {
            return Vec::new();
        };
        components
            .iter()
            .map(|c| {
                let (lo, hi) = (c.mean - c.sigma(), c.mean + c.sigma());
                match kind {
                    ValueKind::Numeric => {
                        let lo_lexical = format!("{lo:.2}");
                        let hi_lexical = format!("{hi:.2}");
                        Bounds {
                            lo: lo_lexical.parse().unwrap(),
                            hi: hi_lexical.parse().unwrap(),
                            lo_lexical,
                            hi_lexical,
                            datatype: format!("{XSD}decimal"),
                        }
                    }
                    ValueKind::Temporal { kind, datatype } => {
                        let l = temporal::lower_bound(*kind, lo);
                        let h = temporal::upper_bound(*kind, hi);
                        let datatype = if datatype.ends_with("#yearMonthDuration") {
                            format!("{XSD}duration")
                        } else {
                            datatype.clone()
                        };
                        Bounds {
                            lo: l.seconds,
                            hi: h.seconds,
                            lo_lexical: l.lexical,
                            hi_lexical: h.lexical,
                            datatype,
                        }
                    }
                }
            })
            .collect()
    }

    /// Whether the literal falls in the range; `None` when its lexical form
    /// cannot be read as a value of the expected kind.
    pub fn accepts(&self, literal: &Literal) -> Option<bool> {
        match self {
            RangeModel::Regex(r) => Some(
                (literal.datatype == XSD_STRING || literal.datatype == RDF_LANG_STRING)
                    && r.is_match(&literal.lexical),
            ),
            RangeModel::Gaussian { kind, .. } => {
                let value = match kind {
                    ValueKind::Numeric => {
                        if literal.class() != DatatypeClass::Numeric {
                            return Some(false);
                        }
                        literal.lexical.trim().parse::<f64>().ok()?
                    }
                    ValueKind::Temporal { kind, datatype } => {
                        if &literal.datatype != datatype {
                            return Some(false);
                        }
                        temporal::parse_seconds(*kind, literal.lexical.trim())?
                    }
                };
                Some(self.bounds().iter().any(|b| b.lo <= value && value <= b.hi))
            }
        }
    }
}

/// Membership of a resource in a range; entities and unreadable literals never match.
pub fn membership(range: &RangeModel, resource: &Resource) -> bool {
    resource
        .as_literal()
        .and_then(|l| range.accepts(l))
        .unwrap_or(false)
}
