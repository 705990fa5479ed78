use std::fmt;

use trp::online::{certified_ratio, select_algorithm, Selection, StrategyKind};
use trp::simulator::ServiceReport;
use trp::scalar::int;
use trp::{LineSegment, QuadraticScalar, Scalar};

/// Which per-request lower bound a certified ratio is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `max{|x|, t}`.
    Request,
    /// `max{arc on the optimal tour, t}`.
    Tour,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Request => "request",
            Basis::Tour => "tour",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub bound: QuadraticScalar,
    pub basis: Basis,
}

impl Certificate {
    pub fn measured<'a>(&self, report: &'a ServiceReport) -> &'a QuadraticScalar {
        match self.basis {
            Basis::Request => &report.max_request_ratio,
            Basis::Tour => &report.max_tour_ratio,
        }
    }

    pub fn holds(&self, report: &ServiceReport) -> bool {
        *self.measured(report) <= self.bound
    }
}

/// The proven ratio for `kind` on an instance, if there is one.
///
/// `delta` is the error bound handed to the strategy and `max_error` the
/// error the instance actually has.
pub fn certified_bound(kind: StrategyKind, line: &LineSegment, delta: &Scalar, max_error: &Scalar) -> Option<Certificate> {
    match kind {
        StrategyKind::HalfLine if line.is_half_line() => {
            Some(Certificate { bound: certified_ratio(), basis: Basis::Request })
        }
        StrategyKind::Perfect if *max_error == int(0) => {
            Some(Certificate { bound: certified_ratio(), basis: Basis::Tour })
        }
        StrategyKind::Robust if max_error <= delta && select_algorithm(delta, line) == Selection::Robust => {
            let slack = QuadraticScalar::from(&(delta * int(4) / line.length()));
            let basis = if *max_error == int(0) { Basis::Tour } else { Basis::Request };
            Some(Certificate { bound: &certified_ratio() + &slack, basis })
        }
        _ => None,
    }
}
