//! The line, requests and problem instances.

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::scalar::{QuadraticScalar, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line endpoints must satisfy a <= 0 <= b with b - a > 0 (got a={a}, b={b})")]
    BadLine { a: Scalar, b: Scalar },
    #[error("request {id}: {what} {value} lies outside the segment [{a}, {b}]")]
    OutsideSegment { id: usize, what: &'static str, value: Scalar, a: Scalar, b: Scalar },
    #[error("request {id}: negative arrival time {time}")]
    NegativeTime { id: usize, time: Scalar },
    #[error("an instance needs at least one request")]
    Empty,
}

/// Side of the origin, also used as a travel direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// `-1` for left, `+1` for right.
    pub fn sign(self) -> i64 {
        match self {
            Side::Left => -1,
            Side::Right => 1,
        }
    }

    /// Side of a nonzero position; `None` at the origin.
    pub fn of(position: &Scalar) -> Option<Side> {
        if position.is_negative() {
            Some(Side::Left)
        } else if position.is_positive() {
            Some(Side::Right)
        } else {
            None
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// The segment `[a, b]` with the origin at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LineSegment {
    left: Scalar,
    right: Scalar,
}

impl LineSegment {
    pub fn new(left: Scalar, right: Scalar) -> Result<Self, InstanceError> {
        if left.is_positive() || right.is_negative() || right <= left {
            return Err(InstanceError::BadLine { a: left, b: right });
        }
        Ok(Self { left, right })
    }

    /// `a`, the left end (`≤ 0`).
    pub fn left(&self) -> &Scalar {
        &self.left
    }

    /// `b`, the right end (`≥ 0`).
    pub fn right(&self) -> &Scalar {
        &self.right
    }

    pub fn length(&self) -> Scalar {
        &self.right - &self.left
    }

    /// Distance from the origin to the end on `side`.
    pub fn extent(&self, side: Side) -> Scalar {
        match side {
            Side::Left => -&self.left,
            Side::Right => self.right.clone(),
        }
    }

    /// A half-line has the origin at one of its ends.
    pub fn is_half_line(&self) -> bool {
        self.left.is_zero() || self.right.is_zero()
    }

    /// For a half-line, the side the whole segment lies on.
    pub fn half_line_side(&self) -> Option<Side> {
        if self.left.is_zero() {
            Some(Side::Right)
        } else if self.right.is_zero() {
            Some(Side::Left)
        } else {
            None
        }
    }

    pub fn contains(&self, position: &Scalar) -> bool {
        &self.left <= position && position <= &self.right
    }

    pub fn contains_exact(&self, position: &QuadraticScalar) -> bool {
        QuadraticScalar::from(&self.left) <= *position && *position <= QuadraticScalar::from(&self.right)
    }

    pub fn clamp(&self, position: Scalar) -> Scalar {
        position.clamp(self.left.clone(), self.right.clone())
    }
}

/// Which information a strategy may see before requests arrive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Nothing is known before a request arrives.
    Original,
    /// Every predicted location is known at time 0.
    Prediction,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Original => "original",
            Model::Prediction => "prediction",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Request {
    pub id: usize,
    pub predicted: Scalar,
    pub actual: Scalar,
    pub arrival: Scalar,
}

impl Request {
    pub fn new(id: usize, predicted: Scalar, actual: Scalar, arrival: Scalar) -> Self {
        Self { id, predicted, actual, arrival }
    }

    /// Perfectly predicted request.
    pub fn exact(id: usize, location: Scalar, arrival: Scalar) -> Self {
        Self::new(id, location.clone(), location, arrival)
    }

    /// `|actual − predicted|`.
    pub fn error(&self) -> Scalar {
        (&self.actual - &self.predicted).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    line: LineSegment,
    requests: Vec<Request>,
    model: Model,
}

impl Instance {
    /// Validates request positions and times. Request ids are reassigned to
    /// their index in `requests`.
    pub fn new(line: LineSegment, requests: Vec<Request>, model: Model) -> Result<Self, InstanceError> {
        if requests.is_empty() {
            return Err(InstanceError::Empty);
        }
        let mut requests = requests;
        for (id, request) in requests.iter_mut().enumerate() {
            request.id = id;
            check_request(&line, request)?;
        }
        Ok(Self { line, requests, model })
    }

    pub fn line(&self) -> &LineSegment {
        &self.line
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// Maximum prediction error Δ.
    pub fn max_error(&self) -> Scalar {
        self.requests.iter().map(Request::error).max().unwrap_or_else(Scalar::zero)
    }

    /// δ = Δ / |L|.
    pub fn relative_error(&self) -> Scalar {
        self.max_error() / self.line.length()
    }

    pub fn predicted_locations(&self) -> Vec<Scalar> {
        self.requests.iter().map(|r| r.predicted.clone()).collect()
    }

    pub fn actual_locations(&self) -> Vec<Scalar> {
        self.requests.iter().map(|r| r.actual.clone()).collect()
    }

    pub fn latest_arrival(&self) -> Scalar {
        self.requests.iter().map(|r| r.arrival.clone()).max().unwrap_or_else(Scalar::zero)
    }
}

pub(crate) fn check_request(line: &LineSegment, request: &Request) -> Result<(), InstanceError> {
    for (what, value) in [("predicted location", &request.predicted), ("actual location", &request.actual)] {
        if !line.contains(value) {
            return Err(InstanceError::OutsideSegment {
                id: request.id,
                what,
                value: value.clone(),
                a: line.left().clone(),
                b: line.right().clone(),
            });
        }
    }
    if request.arrival.is_negative() {
        return Err(InstanceError::NegativeTime { id: request.id, time: request.arrival.clone() });
    }
    Ok(())
}
