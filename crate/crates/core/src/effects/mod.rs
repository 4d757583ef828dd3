//! ALAAM configurations.
//!
//! Every effect `I` has a statistic `z_I(y)` and a change statistic
//! `delta_I(i) = z_I(y with y_i = 1) - z_I(y with y_i = 0)`. Kernels always
//! evaluate the change with `y_i` taken as 0, so the 1 -> 0 flip is `-delta`.
//!
//! Definitions of the goodness-of-fit configurations (alter two-stars,
//! cyclic triangles, the D1/U1 transitive triangles, mixed two-star) are
//! implementation-defined; see the docs on each [`EffectSpec`] variant.

mod bound;
mod change;
mod statistic;

pub use bound::BoundModel;
pub use change::change_stat;
pub use statistic::{statistic, statistic_vector};

use std::fmt;
use std::str::FromStr;

use crate::covariates::{ColumnKind, CovariateTable};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default geometric decay, `ln 2`.
pub const DEFAULT_ALPHA: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Directionality {
    Any,
    Undirected,
    Directed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EffectSpec {
    /// Number of nodes with the attribute.
    Density,
    /// Sum of degrees of attribute nodes (undirected).
    Activity,
    /// Ties (arcs, when directed) with the attribute at both ends.
    Contagion,
    /// Sum of a continuous covariate over attribute nodes.
    Covariate(String),
    /// `sum_{i: y_i = 1} exp(-alpha d(i))` (undirected).
    GwActivity(f64),
    Sender,
    Receiver,
    /// `sum_{i: y_i = 1} exp(-alpha d_out(i))`.
    GwSender(f64),
    /// `sum_{i: y_i = 1} exp(-alpha d_in(i))`.
    GwReceiver(f64),
    /// Sum of mutual degrees of attribute nodes.
    Reciprocity,
    /// Mutual dyads with the attribute at both ends, each counted once.
    ContagionReciprocity,
    EgoInTwoStar,
    EgoOutTwoStar,
    EgoInThreeStar,
    EgoOutThreeStar,
    /// Two-paths `j -> i -> k` with `j != k` through an attribute node.
    MixedTwoStar,
    /// Two-paths `i -> v -> k`, `k != i`, starting at an attribute node.
    MixedTwoStarSource,
    /// Two-paths `k -> v -> i`, `k != i`, ending at an attribute node.
    MixedTwoStarSink,
    /// Transitive triads `j -> i -> k`, `j -> k` with the attribute node as broker.
    TransitiveTriangleT1,
    /// Transitive triads with the attribute on all three nodes.
    TransitiveTriangleT3,
    /// Transitive triads `i -> j`, `i -> k`, `j -> k` with the attribute node as source.
    TransitiveTriangleD1,
    /// Transitive triads `j -> i`, `k -> i`, `j -> k` with the attribute node as sink.
    TransitiveTriangleU1,
    /// Cyclic triads `i -> j -> k -> i` through an attribute node.
    CyclicTriangleC1,
    /// Cyclic triads with the attribute on all three nodes, each cycle once.
    CyclicTriangleC3,
    /// In-two-stars `j -> v <- k` whose two alters both have the attribute.
    AlterInTwoStar2,
    /// Out-two-stars `j <- v -> k` whose two alters both have the attribute.
    AlterOutTwoStar2,
    SenderMatch(String),
    ReceiverMatch(String),
    ReciprocityMatch(String),
}

const PLAIN: &[(&str, EffectSpec)] = &[
    ("Density", EffectSpec::Density),
    ("Activity", EffectSpec::Activity),
    ("Contagion", EffectSpec::Contagion),
    ("Sender", EffectSpec::Sender),
    ("Receiver", EffectSpec::Receiver),
    ("Reciprocity", EffectSpec::Reciprocity),
    ("ContagionReciprocity", EffectSpec::ContagionReciprocity),
    ("EgoInTwoStar", EffectSpec::EgoInTwoStar),
    ("EgoOutTwoStar", EffectSpec::EgoOutTwoStar),
    ("EgoInThreeStar", EffectSpec::EgoInThreeStar),
    ("EgoOutThreeStar", EffectSpec::EgoOutThreeStar),
    ("MixedTwoStar", EffectSpec::MixedTwoStar),
    ("MixedTwoStarSource", EffectSpec::MixedTwoStarSource),
    ("MixedTwoStarSink", EffectSpec::MixedTwoStarSink),
    ("TransitiveTriangleT1", EffectSpec::TransitiveTriangleT1),
    ("TransitiveTriangleT3", EffectSpec::TransitiveTriangleT3),
    ("TransitiveTriangleD1", EffectSpec::TransitiveTriangleD1),
    ("TransitiveTriangleU1", EffectSpec::TransitiveTriangleU1),
    ("CyclicTriangleC1", EffectSpec::CyclicTriangleC1),
    ("CyclicTriangleC3", EffectSpec::CyclicTriangleC3),
    ("AlterInTwoStar2", EffectSpec::AlterInTwoStar2),
    ("AlterOutTwoStar2", EffectSpec::AlterOutTwoStar2),
];

const GEOMETRIC: &[&str] = &["GWActivity", "GWSender", "GWReceiver"];
const MATCHING: &[&str] = &["SenderMatch", "ReceiverMatch", "ReciprocityMatch"];

impl EffectSpec {
    /// Every accepted effect name, for error messages and help text.
    pub fn catalogue() -> String {
        let mut names: Vec<String> = PLAIN.iter().map(|(n, _)| (*n).to_owned()).collect();
        names.extend(GEOMETRIC.iter().map(|n| format!("{n}[(alpha)]")));
        names.extend(MATCHING.iter().map(|n| format!("{n}:<column>")));
        names.push("oOc:<column>".to_owned());
        names.join(", ")
    }

    /// Parses an effect name. A bare name that matches no configuration is
    /// accepted as a continuous covariate when `table` has such a column.
    pub fn parse(s: &str, table: Option<&CovariateTable>) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::UnknownEffect {
            name: s.to_owned(),
            valid: EffectSpec::catalogue(),
        };
        if let Some((_, e)) = PLAIN.iter().find(|(n, _)| *n == s) {
            return Ok(e.clone());
        }
        for &base in GEOMETRIC {
            let Some(rest) = s.strip_prefix(base) else { continue };
            let alpha = if rest.is_empty() {
                DEFAULT_ALPHA
            } else {
                let inner = rest
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(unknown)?;
                inner.trim().parse::<f64>().map_err(|_| unknown())?
            };
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidModel(format!("{base}: decay must be positive, got {alpha}")));
            }
            return Ok(match base {
                "GWActivity" => EffectSpec::GwActivity(alpha),
                "GWSender" => EffectSpec::GwSender(alpha),
                _ => EffectSpec::GwReceiver(alpha),
            });
        }
        if let Some((base, col)) = s.split_once(':') {
            let col = col.trim().to_owned();
            if col.is_empty() {
                return Err(unknown());
            }
            return match base.trim() {
                "SenderMatch" => Ok(EffectSpec::SenderMatch(col)),
                "ReceiverMatch" => Ok(EffectSpec::ReceiverMatch(col)),
                "ReciprocityMatch" => Ok(EffectSpec::ReciprocityMatch(col)),
                "oOc" => Ok(EffectSpec::Covariate(col)),
                _ => Err(unknown()),
            };
        }
        if let Some(col) = s.strip_suffix("_oOc") {
            return Ok(EffectSpec::Covariate(col.to_owned()));
        }
        if let Some(col) = table.and_then(|t| t.column(s)) {
            if col.data.kind() == ColumnKind::Continuous {
                return Ok(EffectSpec::Covariate(s.to_owned()));
            }
        }
        Err(unknown())
    }

    pub fn directionality(&self) -> Directionality {
        use EffectSpec::*;
        match self {
            Density | Contagion | Covariate(_) => Directionality::Any,
            Activity | GwActivity(_) => Directionality::Undirected,
            _ => Directionality::Directed,
        }
    }

    /// Covariate column referenced by the effect, with the kind it must have.
    pub fn column(&self) -> Option<(&str, ColumnKind)> {
        match self {
            EffectSpec::Covariate(c) => Some((c, ColumnKind::Continuous)),
            EffectSpec::SenderMatch(c) | EffectSpec::ReceiverMatch(c) | EffectSpec::ReciprocityMatch(c) => {
                Some((c, ColumnKind::Categorical))
            }
            _ => None,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            EffectSpec::GwActivity(a) | EffectSpec::GwSender(a) | EffectSpec::GwReceiver(a) => Some(a),
            _ => None,
        }
    }

    /// Checks directionality and covariate references against a graph and
    /// covariate table.
    pub fn validate(&self, g: &Graph, w: &CovariateTable) -> Result<()> {
        match (self.directionality(), g.is_directed()) {
            (Directionality::Undirected, true) => {
                return Err(Error::Directionality {
                    effect: self.to_string(),
                    graph: "directed",
                })
            }
            (Directionality::Directed, false) => {
                return Err(Error::Directionality {
                    effect: self.to_string(),
                    graph: "undirected",
                })
            }
            _ => {}
        }
        if let Some(a) = self.alpha() {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidModel(format!("{self}: decay must be positive")));
            }
        }
        match self.column() {
            Some((name, ColumnKind::Continuous)) => {
                w.continuous(name)?;
            }
            Some((name, _)) => {
                w.categories(name)?;
            }
            None => {}
        }
        Ok(())
    }
}

impl fmt::Display for EffectSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use EffectSpec::*;
        let geometric = |f: &mut fmt::Formatter<'_>, base: &str, a: f64| {
            if (a - DEFAULT_ALPHA).abs() < 1e-12 {
                write!(f, "{base}")
            } else {
                write!(f, "{base}({a})")
            }
        };
        match self {
            GwActivity(a) => geometric(f, "GWActivity", *a),
            GwSender(a) => geometric(f, "GWSender", *a),
            GwReceiver(a) => geometric(f, "GWReceiver", *a),
            Covariate(c) => write!(f, "oOc:{c}"),
            SenderMatch(c) => write!(f, "SenderMatch:{c}"),
            ReceiverMatch(c) => write!(f, "ReceiverMatch:{c}"),
            ReciprocityMatch(c) => write!(f, "ReciprocityMatch:{c}"),
            plain => {
                let name = PLAIN.iter().find(|(_, e)| e == plain).map(|(n, _)| *n).unwrap_or("?");
                write!(f, "{name}")
            }
        }
    }
}

impl FromStr for EffectSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EffectSpec::parse(s, None)
    }
}

/// The goodness-of-fit suite used when none is given: every configuration
/// applicable to the graph's directionality (covariate effects excluded).
pub fn default_gof_suite(directed: bool) -> Vec<EffectSpec> {
    use EffectSpec::*;
    if directed {
        vec![
            AlterInTwoStar2,
            AlterOutTwoStar2,
            Contagion,
            ContagionReciprocity,
            CyclicTriangleC1,
            CyclicTriangleC3,
            Density,
            EgoInThreeStar,
            EgoInTwoStar,
            EgoOutThreeStar,
            EgoOutTwoStar,
            GwReceiver(DEFAULT_ALPHA),
            GwSender(DEFAULT_ALPHA),
            MixedTwoStar,
            MixedTwoStarSink,
            MixedTwoStarSource,
            Receiver,
            Reciprocity,
            Sender,
            TransitiveTriangleD1,
            TransitiveTriangleT1,
            TransitiveTriangleT3,
            TransitiveTriangleU1,
        ]
    } else {
        vec![Density, Activity, GwActivity(DEFAULT_ALPHA), Contagion]
    }
}

/// Ordered effects with their parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    effects: Vec<EffectSpec>,
    theta: Vec<f64>,
}

impl Model {
    pub fn new(effects: Vec<EffectSpec>, theta: Vec<f64>) -> Result<Self> {
        if effects.len() != theta.len() {
            return Err(Error::InvalidModel(format!(
                "{} effects but {} parameter values",
                effects.len(),
                theta.len()
            )));
        }
        if effects.is_empty() {
            return Err(Error::InvalidModel("model has no effects".into()));
        }
        for (k, e) in effects.iter().enumerate() {
            if effects[..k].contains(e) {
                return Err(Error::InvalidModel(format!("duplicate effect {e}")));
            }
        }
        if let Some(t) = theta.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidModel(format!("non-finite parameter value {t}")));
        }
        Ok(Model { effects, theta })
    }

    /// Model with every parameter zero.
    pub fn zeros(effects: Vec<EffectSpec>) -> Result<Self> {
        let p = effects.len();
        Model::new(effects, vec![0.0; p])
    }

    pub fn effects(&self) -> &[EffectSpec] {
        &self.effects
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        Model::new(self.effects.clone(), theta)
    }

    pub fn index_of(&self, e: &EffectSpec) -> Option<usize> {
        self.effects.iter().position(|x| x == e)
    }

    pub fn names(&self) -> Vec<String> {
        self.effects.iter().map(ToString::to_string).collect()
    }

    pub fn validate(&self, g: &Graph, w: &CovariateTable) -> Result<()> {
        self.effects.iter().try_for_each(|e| e.validate(g, w))
    }
}
