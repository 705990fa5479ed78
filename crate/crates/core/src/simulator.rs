//! Drives a strategy through an instance and scores the result.

use std::cmp::Ordering;

use num_traits::Zero;
use thiserror::Error;

use crate::instance::{Instance, Model};
use crate::offline::{metric_free_lower_bound, opt_request_lower_bound, opt_sum_lower_bound, optimal_latency_tour};
use crate::online::{Arrival, Strategy, StrategyError, VisibleInfo};
use crate::scalar::{QuadraticScalar, Scalar};
use crate::trajectory::{Trajectory, TrajectoryError, Waypoint};

/// Doublings of the horizon before giving up on an unserved request.
const MAX_DOUBLINGS: usize = 48;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("request {id} at {location} lies outside the strategy's reach [{lo}, {hi}]")]
    Uncovered { id: usize, location: Scalar, lo: QuadraticScalar, hi: QuadraticScalar },
    #[error("request {id} at {location} was never served")]
    NeverServed { id: usize, location: Scalar },
    #[error("strategy produced an invalid path: {0}")]
    BadPath(#[from] TrajectoryError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestOutcome {
    pub id: usize,
    pub completion: QuadraticScalar,
    /// `max{|actual|, t}`.
    pub opt_lower_bound: Scalar,
    pub ratio: QuadraticScalar,
    /// `max{arc length to actual on the optimal tour over all actuals, t}`.
    pub tour_bound: Scalar,
    pub tour_ratio: QuadraticScalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceReport {
    pub outcomes: Vec<RequestOutcome>,
    pub on_sum: QuadraticScalar,
    pub opt_sum_lower_bound: Scalar,
    pub max_request_ratio: QuadraticScalar,
    pub max_tour_ratio: QuadraticScalar,
    pub sum_ratio: QuadraticScalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Arrival,
    Service,
    Turnaround,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub time: QuadraticScalar,
    pub kind: EventKind,
    pub request: Option<usize>,
    pub position: QuadraticScalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub report: ServiceReport,
    /// The server path, cut at the last completion.
    pub trajectory: Trajectory,
    pub events: Vec<Event>,
}

/// `numer / denom` with `0/0 = 1`.
pub fn ratio_of(numer: &QuadraticScalar, denom: &Scalar) -> QuadraticScalar {
    if denom.is_zero() {
        return QuadraticScalar::one();
    }
    numer.div_scalar(denom).expect("nonzero denominator")
}

/// What the model lets a strategy see at time 0.
pub fn visible_info(instance: &Instance) -> VisibleInfo {
    VisibleInfo {
        line: instance.line().clone(),
        model: instance.model(),
        predictions: match instance.model() {
            Model::Prediction => Some(instance.predicted_locations()),
            Model::Original => None,
        },
    }
}

/// First service time of every request, or `None` for any request the path
/// has not reached yet.
pub fn completion_times(trajectory: &Trajectory, instance: &Instance) -> Vec<Option<QuadraticScalar>> {
    instance
        .requests()
        .iter()
        .map(|r| trajectory.first_visit_within(&(&r.actual).into(), &(&r.arrival).into()))
        .collect()
}

fn extend(path: &mut Trajectory, points: Vec<Waypoint>) -> Result<(), SimError> {
    for point in points {
        path.push(point)?;
    }
    Ok(())
}

/// The initial horizon `4(|L| + max t)`.
pub fn initial_horizon(instance: &Instance) -> QuadraticScalar {
    let base = (instance.line().length() + instance.latest_arrival()) * Scalar::from_integer(4.into());
    QuadraticScalar::from(base)
}

/// Runs `strategy` on `instance`.
///
/// Requests are revealed to the strategy at their arrival times only, and
/// predictions only in the prediction model. The path is extended by
/// doubling horizons until every request has been served.
pub fn run<S: Strategy + ?Sized>(instance: &Instance, strategy: &mut S) -> Result<RunResult, SimError> {
    strategy.init(&visible_info(instance))?;
    if let Some((lo, hi)) = strategy.coverage() {
        for r in instance.requests() {
            let at = QuadraticScalar::from(&r.actual);
            if at < lo || at > hi {
                return Err(SimError::Uncovered { id: r.id, location: r.actual.clone(), lo, hi });
            }
        }
    }

    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by(|&i, &j| instance.requests()[i].arrival.cmp(&instance.requests()[j].arrival).then(i.cmp(&j)));

    let mut path = Trajectory::at_origin();
    let mut now = QuadraticScalar::zero();
    for &i in &order {
        let request = &instance.requests()[i];
        let at = QuadraticScalar::from(&request.arrival);
        if at > now {
            extend(&mut path, strategy.advance(&now, &at))?;
            now = at;
        }
        strategy.on_arrival(&Arrival { id: request.id, location: request.actual.clone(), time: request.arrival.clone() });
    }

    let mut horizon = initial_horizon(instance);
    let two = QuadraticScalar::from_int(2);
    let mut completions = Vec::new();
    for _ in 0..MAX_DOUBLINGS {
        if horizon > now {
            extend(&mut path, strategy.advance(&now, &horizon))?;
            now = horizon.clone();
        }
        completions = completion_times(&path, instance);
        if completions.iter().all(Option::is_some) {
            break;
        }
        horizon = &horizon * &two;
    }
    if let Some(id) = completions.iter().position(Option::is_none) {
        return Err(SimError::NeverServed { id, location: instance.requests()[id].actual.clone() });
    }
    let completions: Vec<QuadraticScalar> = completions.into_iter().map(Option::unwrap).collect();
    let last = completions.iter().max().cloned().unwrap_or_else(QuadraticScalar::zero);
    let trajectory = if last.is_zero() { Trajectory::at_origin() } else { path.truncated(&last) };
    let report = score(instance, &completions);
    let events = event_log(instance, &trajectory, &completions);
    Ok(RunResult { report, trajectory, events })
}

/// Scores a complete path against `instance`.
pub fn evaluate(trajectory: &Trajectory, instance: &Instance) -> Result<ServiceReport, SimError> {
    let completions = completion_times(trajectory, instance)
        .into_iter()
        .enumerate()
        .map(|(id, c)| c.ok_or_else(|| SimError::NeverServed { id, location: instance.requests()[id].actual.clone() }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(score(instance, &completions))
}

fn score(instance: &Instance, completions: &[QuadraticScalar]) -> ServiceReport {
    let (tour, _) = optimal_latency_tour(&instance.actual_locations()).expect("instances are nonempty");
    let bounds = opt_request_lower_bound(instance, &tour).expect("the tour covers every actual location");
    let mut outcomes = Vec::with_capacity(instance.len());
    for ((request, completion), (tour_bound, _)) in instance.requests().iter().zip(completions).zip(bounds) {
        let opt_lower_bound = metric_free_lower_bound(request);
        outcomes.push(RequestOutcome {
            id: request.id,
            completion: completion.clone(),
            ratio: ratio_of(completion, &opt_lower_bound),
            opt_lower_bound,
            tour_ratio: ratio_of(completion, &tour_bound),
            tour_bound,
        });
    }
    let on_sum = completions.iter().fold(QuadraticScalar::zero(), |acc, c| &acc + c);
    let opt_sum = opt_sum_lower_bound(instance);
    let max_of = |f: fn(&RequestOutcome) -> &QuadraticScalar| outcomes.iter().map(f).max().cloned().unwrap_or_else(QuadraticScalar::one);
    ServiceReport {
        max_request_ratio: max_of(|o| &o.ratio),
        max_tour_ratio: max_of(|o| &o.tour_ratio),
        sum_ratio: ratio_of(&on_sum, &opt_sum),
        on_sum,
        opt_sum_lower_bound: opt_sum,
        outcomes,
    }
}

fn event_log(instance: &Instance, trajectory: &Trajectory, completions: &[QuadraticScalar]) -> Vec<Event> {
    let mut events = Vec::new();
    for (request, completion) in instance.requests().iter().zip(completions) {
        let arrival = QuadraticScalar::from(&request.arrival);
        events.push(Event {
            position: trajectory.position_at(&arrival),
            time: arrival,
            kind: EventKind::Arrival,
            request: Some(request.id),
        });
        events.push(Event {
            time: completion.clone(),
            kind: EventKind::Service,
            request: Some(request.id),
            position: QuadraticScalar::from(&request.actual),
        });
    }
    for turn in trajectory.turnarounds() {
        events.push(Event { time: turn.time, kind: EventKind::Turnaround, request: None, position: turn.position });
    }
    events.sort_by(|a, b| match a.time.cmp(&b.time) {
        Ordering::Equal => (a.kind, a.request).cmp(&(b.kind, b.request)),
        other => other,
    });
    events
}
