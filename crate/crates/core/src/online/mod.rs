//! Online strategies.
//!
//! A strategy sees only what the model discloses: the line, the predicted
//! locations when the model has them, and each request once it arrives. The
//! simulator drives it forward in time through [`Strategy::advance`].

mod greedy;
mod roundtrip;
mod schedule;
mod select;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::instance::{LineSegment, Model};
use crate::scalar::{QuadraticScalar, Scalar};
use crate::trajectory::Waypoint;

pub use greedy::GreedyReplan;
pub use roundtrip::{padded_tour, shrink_toward_origin, ArcRoundTrips, HalfLineRoundTrips, PerfectPrediction, RobustPrediction};
pub use schedule::{certified_ratio, default_alpha, RoundTripSchedule};
pub use select::{fallback_threshold, select_algorithm, Selection, SelectiveRobust};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("the {0} strategy needs a half-line")]
    NotHalfLine(&'static str),
    #[error("the {0} strategy needs predicted locations")]
    NeedsPredictions(&'static str),
    #[error("no predicted locations")]
    NoPredictions,
    #[error("prediction error {delta} must be smaller than the line length {length}")]
    DeltaTooLarge { delta: Scalar, length: Scalar },
    #[error("{0}")]
    BadParameter(String),
    #[error("unknown strategy `{0}` (expected halfline, perfect, robust or greedy)")]
    Unknown(String),
}

/// What the model discloses at time 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibleInfo {
    pub line: LineSegment,
    pub model: Model,
    /// Predicted locations by request id; `None` in the original model.
    pub predictions: Option<Vec<Scalar>>,
}

/// A request as revealed at its arrival time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrival {
    pub id: usize,
    pub location: Scalar,
    pub time: Scalar,
}

/// A deterministic server controller.
pub trait Strategy {
    fn name(&self) -> &'static str;

    fn init(&mut self, info: &VisibleInfo) -> Result<(), StrategyError>;

    /// Called at `arrival.time`, after the path has been advanced to it.
    fn on_arrival(&mut self, _arrival: &Arrival) {}

    /// Breakpoints of the path on `(from, until]`, the last one exactly at
    /// `until`. Successive calls continue from the previous `until`.
    fn advance(&mut self, from: &QuadraticScalar, until: &QuadraticScalar) -> Vec<Waypoint>;

    /// The closed interval the path eventually sweeps, when it is known to
    /// be bounded.
    fn coverage(&self) -> Option<(QuadraticScalar, QuadraticScalar)> {
        None
    }
}

/// Strategy names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    HalfLine,
    Perfect,
    Robust,
    Greedy,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [StrategyKind::HalfLine, StrategyKind::Perfect, StrategyKind::Robust, StrategyKind::Greedy];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::HalfLine => "halfline",
            StrategyKind::Perfect => "perfect",
            StrategyKind::Robust => "robust",
            StrategyKind::Greedy => "greedy",
        }
    }

    /// Builds a fresh strategy. `delta` is the error bound handed to the
    /// robust strategy; the others ignore it. The robust strategy is wrapped
    /// in the threshold selector.
    pub fn build(self, alpha: &QuadraticScalar, delta: &Scalar) -> Result<Box<dyn Strategy + Send>, StrategyError> {
        Ok(match self {
            StrategyKind::HalfLine => Box::new(HalfLineRoundTrips::new(alpha.clone())?),
            StrategyKind::Perfect => Box::new(PerfectPrediction::new(alpha.clone())?),
            StrategyKind::Robust => Box::new(SelectiveRobust::new(alpha.clone(), delta.clone())?),
            StrategyKind::Greedy => Box::new(GreedyReplan::new()),
        })
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| StrategyError::Unknown(s.to_string()))
    }
}

impl<S: Strategy + ?Sized> Strategy for Box<S> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn init(&mut self, info: &VisibleInfo) -> Result<(), StrategyError> {
        (**self).init(info)
    }

    fn on_arrival(&mut self, arrival: &Arrival) {
        (**self).on_arrival(arrival)
    }

    fn advance(&mut self, from: &QuadraticScalar, until: &QuadraticScalar) -> Vec<Waypoint> {
        (**self).advance(from, until)
    }

    fn coverage(&self) -> Option<(QuadraticScalar, QuadraticScalar)> {
        (**self).coverage()
    }
}
