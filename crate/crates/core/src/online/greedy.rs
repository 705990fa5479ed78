use crate::offline::optimal_latency_tour;
use crate::scalar::{QuadraticScalar, Scalar};
use crate::trajectory::{PathBuilder, Trajectory, Waypoint};

use super::{Arrival, Strategy, StrategyError, VisibleInfo};

/// Replans a latency-optimal tour over all outstanding requests at every
/// arrival, starting from wherever the server is. Ignores predictions.
#[derive(Debug, Clone)]
pub struct GreedyReplan {
    plan: Trajectory,
    outstanding: Vec<(Scalar, Scalar)>,
}

impl Default for GreedyReplan {
    fn default() -> Self {
        Self::new()
    }
}

impl GreedyReplan {
    pub fn new() -> Self {
        Self { plan: Trajectory::at_origin(), outstanding: Vec::new() }
    }

    fn replan(&mut self, now: &QuadraticScalar) {
        self.plan = self.plan.truncated(now);
        let past = &self.plan;
        self.outstanding.retain(|(loc, arrival)| past.first_visit_within(&loc.into(), &arrival.into()).is_none());
        if self.outstanding.is_empty() {
            return;
        }
        let here = self.plan.last().clone();
        let origin = here.position.to_rational().expect("greedy positions stay rational");
        let relative: Vec<Scalar> = self.outstanding.iter().map(|(loc, _)| loc - &origin).collect();
        let (tour, _) = optimal_latency_tour(&relative).expect("outstanding requests exist");
        let mut path = PathBuilder::new(here);
        for point in tour.turning_points() {
            path.move_to(QuadraticScalar::from(point + &origin));
        }
        for point in path.into_points().into_iter().skip(1) {
            self.plan.push(point).expect("unit-speed moves");
        }
    }
}

impl Strategy for GreedyReplan {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn init(&mut self, _info: &VisibleInfo) -> Result<(), StrategyError> {
        *self = Self::new();
        Ok(())
    }

    fn on_arrival(&mut self, arrival: &Arrival) {
        self.outstanding.push((arrival.location.clone(), arrival.time.clone()));
        self.replan(&QuadraticScalar::from(&arrival.time));
    }

    fn advance(&mut self, from: &QuadraticScalar, until: &QuadraticScalar) -> Vec<Waypoint> {
        self.plan.slice(from, until)
    }
}
