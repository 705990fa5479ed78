use num_traits::{Signed, Zero};

use crate::instance::{LineSegment, Side};
use crate::offline::{optimal_latency_tour, ArcIndex, Tour};
use crate::scalar::{QuadraticScalar, Scalar};
use crate::trajectory::{PathBuilder, Trajectory, Waypoint};

use super::{RoundTripSchedule, Strategy, StrategyError, VisibleInfo};

/// Round trips measured in arc length along a tour.
///
/// Trip `j` follows the tour out to arc length `s_j` and retraces it back to
/// the origin. Once a trip would pass the end of the tour, the server runs
/// the whole tour and then shuttles between the tour's extreme points.
#[derive(Debug, Clone)]
pub struct ArcRoundTrips {
    index: ArcIndex,
    schedule: RoundTripSchedule,
    lo: QuadraticScalar,
    hi: QuadraticScalar,
    path: PathBuilder,
    next_trip: usize,
    shuttling: bool,
}

impl ArcRoundTrips {
    pub fn new(tour: &Tour, schedule: RoundTripSchedule) -> Self {
        let (lo, hi) = tour.extent();
        Self {
            index: tour.arc_index(),
            schedule,
            lo: lo.into(),
            hi: hi.into(),
            path: PathBuilder::from_origin(),
            next_trip: 1,
            shuttling: false,
        }
    }

    pub fn schedule(&self) -> &RoundTripSchedule {
        &self.schedule
    }

    pub fn extremes(&self) -> (QuadraticScalar, QuadraticScalar) {
        (self.lo.clone(), self.hi.clone())
    }

    /// Number of the trip that is generated next.
    pub fn next_trip(&self) -> usize {
        self.next_trip
    }

    /// Appends one trip (or one shuttle leg). Returns `false` once the path
    /// can no longer move.
    fn extend(&mut self) -> bool {
        if self.shuttling {
            if self.lo == self.hi {
                return false;
            }
            let target = if self.path.current().position == self.hi { self.lo.clone() } else { self.hi.clone() };
            self.path.move_to(target);
            return true;
        }
        let reach = self.schedule.reach(self.next_trip);
        self.next_trip += 1;
        let corners = self.index.corners();
        if reach >= QuadraticScalar::from(self.index.total()) {
            for corner in &corners[1..] {
                self.path.move_to(corner.into());
            }
            self.shuttling = true;
            return self.lo != self.hi;
        }
        let m = self.index.corner_at_or_after(&reach);
        for corner in &corners[1..m] {
            self.path.move_to(corner.into());
        }
        self.path.move_to(self.index.position_at_arc(&reach));
        for corner in corners[..m].iter().rev() {
            self.path.move_to(corner.into());
        }
        true
    }

    fn ensure(&mut self, until: &QuadraticScalar) {
        while self.path.end_time() < until {
            if !self.extend() {
                break;
            }
        }
    }

    pub fn slice(&mut self, from: &QuadraticScalar, until: &QuadraticScalar) -> Vec<Waypoint> {
        self.ensure(until);
        self.path.slice(from, until)
    }

    /// The path up to `horizon`.
    pub fn trajectory(&mut self, horizon: &QuadraticScalar) -> Trajectory {
        self.ensure(horizon);
        self.path.clone().build().truncated(horizon)
    }
}

fn far_end(line: &LineSegment) -> Option<Scalar> {
    line.half_line_side().map(|side| match side {
        Side::Left => line.left().clone(),
        Side::Right => line.right().clone(),
    })
}

/// Round trips on a half-line with geometrically growing reach.
#[derive(Debug, Clone)]
pub struct HalfLineRoundTrips {
    schedule: RoundTripSchedule,
    plan: Option<ArcRoundTrips>,
}

impl HalfLineRoundTrips {
    pub fn new(alpha: QuadraticScalar) -> Result<Self, StrategyError> {
        Ok(Self { schedule: RoundTripSchedule::with_alpha(alpha)?, plan: None })
    }

    /// The full path on `line` up to `horizon`.
    pub fn trajectory(line: &LineSegment, alpha: QuadraticScalar, horizon: &QuadraticScalar) -> Result<Trajectory, StrategyError> {
        let far = far_end(line).ok_or(StrategyError::NotHalfLine("halfline"))?;
        let tour = Tour::from_turning_points(vec![far]);
        Ok(ArcRoundTrips::new(&tour, RoundTripSchedule::with_alpha(alpha)?).trajectory(horizon))
    }
}

impl Strategy for HalfLineRoundTrips {
    fn name(&self) -> &'static str {
        "halfline"
    }

    fn init(&mut self, info: &VisibleInfo) -> Result<(), StrategyError> {
        let far = far_end(&info.line).ok_or(StrategyError::NotHalfLine("halfline"))?;
        self.plan = Some(ArcRoundTrips::new(&Tour::from_turning_points(vec![far]), self.schedule.clone()));
        Ok(())
    }

    fn advance(&mut self, from: &QuadraticScalar, until: &QuadraticScalar) -> Vec<Waypoint> {
        self.plan.as_mut().expect("init runs first").slice(from, until)
    }

    fn coverage(&self) -> Option<(QuadraticScalar, QuadraticScalar)> {
        self.plan.as_ref().map(ArcRoundTrips::extremes)
    }
}

/// Round trips along the optimal tour over the predicted locations.
#[derive(Debug, Clone)]
pub struct PerfectPrediction {
    schedule: RoundTripSchedule,
    tour: Option<Tour>,
    plan: Option<ArcRoundTrips>,
}

impl PerfectPrediction {
    pub fn new(alpha: QuadraticScalar) -> Result<Self, StrategyError> {
        Ok(Self { schedule: RoundTripSchedule::with_alpha(alpha)?, tour: None, plan: None })
    }

    pub fn tour(&self) -> Option<&Tour> {
        self.tour.as_ref()
    }

    /// The full path for `predictions` up to `horizon`.
    pub fn trajectory(predictions: &[Scalar], alpha: QuadraticScalar, horizon: &QuadraticScalar) -> Result<Trajectory, StrategyError> {
        let (tour, _) = optimal_latency_tour(predictions).map_err(|_| StrategyError::NoPredictions)?;
        Ok(ArcRoundTrips::new(&tour, RoundTripSchedule::with_alpha(alpha)?).trajectory(horizon))
    }
}

impl Strategy for PerfectPrediction {
    fn name(&self) -> &'static str {
        "perfect"
    }

    fn init(&mut self, info: &VisibleInfo) -> Result<(), StrategyError> {
        let predictions = info.predictions.as_ref().ok_or(StrategyError::NeedsPredictions("perfect"))?;
        let (tour, _) = optimal_latency_tour(predictions).map_err(|_| StrategyError::NoPredictions)?;
        self.plan = Some(ArcRoundTrips::new(&tour, self.schedule.clone()));
        self.tour = Some(tour);
        Ok(())
    }

    fn advance(&mut self, from: &QuadraticScalar, until: &QuadraticScalar) -> Vec<Waypoint> {
        self.plan.as_mut().expect("init runs first").slice(from, until)
    }

    fn coverage(&self) -> Option<(QuadraticScalar, QuadraticScalar)> {
        self.plan.as_ref().map(ArcRoundTrips::extremes)
    }
}

/// Moves every location `delta` toward the origin, stopping at the origin.
pub fn shrink_toward_origin(locations: &[Scalar], delta: &Scalar) -> Vec<Scalar> {
    locations
        .iter()
        .map(|p| {
            let magnitude = (p.abs() - delta).max(Scalar::zero());
            if p.is_negative() { -magnitude } else { magnitude }
        })
        .collect()
}

/// Pushes every turning point `2Δ` further from the origin inside `line`,
/// drops legs that clamping made redundant, and adds a `2Δ` excursion to any
/// side the tour never visits although a prediction's error interval reaches
/// into it.
pub fn padded_tour(tour: &Tour, delta: &Scalar, line: &LineSegment, predictions: &[Scalar]) -> Tour {
    let pad = delta * Scalar::from_integer(2.into());
    let mut points: Vec<Scalar> = tour
        .turning_points()
        .iter()
        .map(|p| line.clamp(if p.is_negative() { p - &pad } else { p + &pad }))
        .collect();
    let mut k = 0;
    while k + 2 < points.len() {
        if points[k + 2].abs() <= points[k].abs() {
            if k + 3 < points.len() {
                points.drain(k + 1..k + 3);
            } else {
                points.truncate(k + 2);
            }
            k = k.saturating_sub(1);
        } else {
            k += 1;
        }
    }
    for side in [Side::Left, Side::Right] {
        let visited = points.iter().any(|p| Side::of(p) == Some(side));
        let needed = predictions.iter().any(|p| match side {
            Side::Left => p < delta,
            Side::Right => -p < *delta,
        });
        let room = line.extent(side).min(pad.clone());
        if needed && !visited && room.is_positive() {
            points.push(if side == Side::Left { -room } else { room });
        }
    }
    Tour::from_turning_points(points)
}

/// Round trips along a padded tour that tolerates location errors up to
/// `Δ`.
#[derive(Debug, Clone)]
pub struct RobustPrediction {
    alpha: QuadraticScalar,
    delta: Scalar,
    shifted: Option<Tour>,
    padded: Option<Tour>,
    plan: Option<ArcRoundTrips>,
}

impl RobustPrediction {
    pub fn new(alpha: QuadraticScalar, delta: Scalar) -> Result<Self, StrategyError> {
        if delta.is_negative() {
            return Err(StrategyError::BadParameter(format!("delta must be nonnegative, got {delta}")));
        }
        RoundTripSchedule::with_alpha(alpha.clone())?;
        Ok(Self { alpha, delta, shifted: None, padded: None, plan: None })
    }

    pub fn delta(&self) -> &Scalar {
        &self.delta
    }

    /// Optimal tour over the shrunken predictions.
    pub fn shifted_tour(&self) -> Option<&Tour> {
        self.shifted.as_ref()
    }

    /// The tour actually traversed.
    pub fn padded_tour(&self) -> Option<&Tour> {
        self.padded.as_ref()
    }

    /// The full path up to `horizon`.
    pub fn trajectory(&mut self, info: &VisibleInfo, horizon: &QuadraticScalar) -> Result<Trajectory, StrategyError> {
        self.init(info)?;
        Ok(self.plan.as_mut().unwrap().trajectory(horizon))
    }
}

impl Strategy for RobustPrediction {
    fn name(&self) -> &'static str {
        "robust"
    }

    fn init(&mut self, info: &VisibleInfo) -> Result<(), StrategyError> {
        let predictions = info.predictions.as_ref().ok_or(StrategyError::NeedsPredictions("robust"))?;
        if self.delta >= info.line.length() {
            return Err(StrategyError::DeltaTooLarge { delta: self.delta.clone(), length: info.line.length() });
        }
        let shrunk = shrink_toward_origin(predictions, &self.delta);
        let (shifted, _) = optimal_latency_tour(&shrunk).map_err(|_| StrategyError::NoPredictions)?;
        let padded = padded_tour(&shifted, &self.delta, &info.line, predictions);
        let pad = &self.delta * Scalar::from_integer(4.into());
        let schedule = RoundTripSchedule::new(self.alpha.clone(), pad)?;
        self.plan = Some(ArcRoundTrips::new(&padded, schedule));
        self.shifted = Some(shifted);
        self.padded = Some(padded);
        Ok(())
    }

    fn advance(&mut self, from: &QuadraticScalar, until: &QuadraticScalar) -> Vec<Waypoint> {
        self.plan.as_mut().expect("init runs first").slice(from, until)
    }

    fn coverage(&self) -> Option<(QuadraticScalar, QuadraticScalar)> {
        self.plan.as_ref().map(ArcRoundTrips::extremes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Model;
    use crate::online::default_alpha;
    use crate::scalar::{int, ratio};
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};
    use proptest::strategy::Strategy as _;

    fn q(s: &str) -> QuadraticScalar {
        s.parse().unwrap()
    }

    fn prediction_info(line: LineSegment, predictions: Vec<Scalar>) -> VisibleInfo {
        VisibleInfo { line, model: Model::Prediction, predictions: Some(predictions) }
    }

    #[test]
    fn half_line_first_trip() {
        let line = LineSegment::new(int(0), int(100)).unwrap();
        let path = HalfLineRoundTrips::trajectory(&line, default_alpha(), &QuadraticScalar::from_int(30)).unwrap();
        let pts = path.points();
        assert_eq!(pts[1], Waypoint::new(q("1+1/2*sqrt3"), q("1+1/2*sqrt3")));
        assert_eq!(pts[2], Waypoint::new(q("2+sqrt3"), QuadraticScalar::zero()));
        assert_eq!(path.first_service_time(&QuadraticScalar::one(), &QuadraticScalar::zero()), Some(QuadraticScalar::one()));
        let l = &q("1+1/2*sqrt3") + &QuadraticScalar::from(ratio(1, 100));
        let served = path.first_service_time(&l, &QuadraticScalar::zero()).unwrap();
        assert_eq!(served, &q("2+sqrt3") + &l);
        let r = &served / &l;
        assert!(r < QuadraticScalar::from_int(3));
        assert!(r > q("2.9"));
    }

    #[test]
    fn half_line_returns_on_schedule() {
        let line = LineSegment::new(int(-1000), int(0)).unwrap();
        let path = HalfLineRoundTrips::trajectory(&line, default_alpha(), &QuadraticScalar::from_int(500)).unwrap();
        let schedule = RoundTripSchedule::with_alpha(default_alpha()).unwrap();
        let returns = path.origin_returns();
        for (j, t) in returns.iter().enumerate() {
            assert_eq!(*t, schedule.return_time(j + 1));
        }
        assert!(returns.len() >= 4);
        for point in path.points() {
            assert!(!point.position.is_positive());
        }
        path.validate().unwrap();
    }

    #[test]
    fn half_line_clamps_then_shuttles() {
        let line = LineSegment::new(int(0), int(3)).unwrap();
        let path = HalfLineRoundTrips::trajectory(&line, default_alpha(), &QuadraticScalar::from_int(40)).unwrap();
        path.check_within(&line).unwrap();
        let turns = path.turnarounds();
        // trip 1 turns at (2+√3)/2, trip 2 would pass 3 and is clamped
        assert_eq!(turns[0].position, q("1+1/2*sqrt3"));
        assert_eq!(turns[1].position, QuadraticScalar::zero());
        for t in &turns[2..] {
            assert!(t.position == QuadraticScalar::from_int(3) || t.position.is_zero());
        }
        assert!(HalfLineRoundTrips::trajectory(&LineSegment::new(int(-1), int(1)).unwrap(), default_alpha(), &QuadraticScalar::one()).is_err());
    }

    #[test]
    fn perfect_traces_tour_in_arc_length() {
        let path = PerfectPrediction::trajectory(&[int(-1), int(2)], default_alpha(), &QuadraticScalar::from_int(12)).unwrap();
        let pts = path.points();
        // out to arc (2+√3)/2 along o→−1→2, then back along the same path
        assert_eq!(pts[1], Waypoint::new(QuadraticScalar::one(), QuadraticScalar::from_int(-1)));
        assert_eq!(pts[2], Waypoint::new(q("1+1/2*sqrt3"), q("-1+1/2*sqrt3")));
        assert_eq!(pts[3], Waypoint::new(q("1+sqrt3"), QuadraticScalar::from_int(-1)));
        assert_eq!(pts[4], Waypoint::new(q("2+sqrt3"), QuadraticScalar::zero()));
        // sampled positions agree with the arc map
        let index = Tour::from_turning_points(vec![int(-1), int(2)]).arc_index();
        for k in 0..=18 {
            let t = QuadraticScalar::from(ratio(k, 10));
            assert_eq!(path.position_at(&t), index.position_at_arc(&t));
        }
    }

    #[test]
    fn single_prediction_at_far_end_matches_half_line() {
        let line = LineSegment::new(int(0), int(10)).unwrap();
        let horizon = QuadraticScalar::from_int(60);
        let a = HalfLineRoundTrips::trajectory(&line, default_alpha(), &horizon).unwrap();
        let b = PerfectPrediction::trajectory(&[int(10)], default_alpha(), &horizon).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn robust_with_zero_delta_is_perfect() {
        let line = LineSegment::new(int(-6), int(9)).unwrap();
        let preds = vec![int(-2), int(3), ratio(7, 2), int(0), int(-5)];
        let horizon = QuadraticScalar::from_int(80);
        let mut robust = RobustPrediction::new(default_alpha(), int(0)).unwrap();
        let r = robust.trajectory(&prediction_info(line, preds.clone()), &horizon).unwrap();
        let p = PerfectPrediction::trajectory(&preds, default_alpha(), &horizon).unwrap();
        assert_eq!(r, p);
    }

    #[test]
    fn robust_single_prediction() {
        let line = LineSegment::new(int(0), int(10)).unwrap();
        let mut robust = RobustPrediction::new(default_alpha(), int(1)).unwrap();
        let info = prediction_info(line.clone(), vec![int(5)]);
        let path = robust.trajectory(&info, &QuadraticScalar::from_int(40)).unwrap();
        assert_eq!(robust.shifted_tour().unwrap().turning_points(), &[int(4)][..]);
        assert_eq!(robust.padded_tour().unwrap().turning_points(), &[int(6)][..]);
        assert_eq!(robust.plan.as_ref().unwrap().schedule().trip_length(1), q("6+sqrt3"));
        // first trip reaches (6+√3)/2 > 3 and turns there
        assert_eq!(path.turnarounds()[0].position, q("3+1/2*sqrt3"));
        let mut too_big = RobustPrediction::new(default_alpha(), int(10)).unwrap();
        assert!(matches!(too_big.init(&info), Err(StrategyError::DeltaTooLarge { .. })));
    }

    #[test]
    fn padding_merges_collapsed_turns() {
        let line = LineSegment::new(int(-3), int(20)).unwrap();
        let tour = Tour::from_turning_points(vec![int(-1), int(2), int(-2), int(9)]);
        let padded = padded_tour(&tour, &int(1), &line, &[]);
        // −1 and −2 both clamp to −3: the detour through 4 is dropped
        assert_eq!(padded.turning_points(), &[int(-3), int(11)][..]);
        let tail = Tour::from_turning_points(vec![int(-1), int(2), int(-2)]);
        assert_eq!(padded_tour(&tail, &int(1), &line, &[]).turning_points(), &[int(-3), int(4)][..]);
    }

    #[test]
    fn padding_reaches_unvisited_side() {
        let line = LineSegment::new(int(-10), int(10)).unwrap();
        let tour = Tour::from_turning_points(vec![int(5)]);
        let padded = padded_tour(&tour, &int(1), &line, &[ratio(1, 2), int(6)]);
        assert_eq!(padded.turning_points(), &[int(7), int(-2)][..]);
        let empty = padded_tour(&Tour::trivial(), &int(1), &line, &[int(0)]);
        assert_eq!(empty.turning_points(), &[int(-2), int(2)][..]);
        let half = LineSegment::new(int(0), int(10)).unwrap();
        assert_eq!(padded_tour(&Tour::trivial(), &int(1), &half, &[int(0)]).turning_points(), &[int(2)][..]);
    }

    fn arb_perturbed() -> impl proptest::strategy::Strategy<Value = (LineSegment, Scalar, Vec<(Scalar, Scalar)>)> {
        (0i64..=40, 1i64..=40, 0i64..=6, proptest::collection::vec((0i64..=1000, -1000i64..=1000), 1..10)).prop_map(
            |(left, right, delta4, raw)| {
                let line = LineSegment::new(int(-left), int(right)).unwrap();
                let delta = ratio(delta4, 4);
                let pairs = raw
                    .into_iter()
                    .map(|(u, e)| {
                        let p = line.left() + line.length() * ratio(u, 1000);
                        let a = line.clamp(&p + &delta * ratio(e, 1000));
                        (p, a)
                    })
                    .collect();
                (line, delta, pairs)
            },
        )
    }

    proptest! {
        #[test]
        fn padded_tour_contains_actual_locations((line, delta, pairs) in arb_perturbed()) {
            let preds: Vec<Scalar> = pairs.iter().map(|(p, _)| p.clone()).collect();
            let (shifted, _) = optimal_latency_tour(&shrink_toward_origin(&preds, &delta)).unwrap();
            let padded = padded_tour(&shifted, &delta, &line, &preds);
            prop_assert!(padded.check_structure(&[]).is_ok());
            for (_, actual) in &pairs {
                prop_assert!(padded.covers(actual), "{} not in {}", actual, padded);
            }
            let path = ArcRoundTrips::new(&padded, RoundTripSchedule::new(default_alpha(), &delta * int(4)).unwrap())
                .trajectory(&QuadraticScalar::from(line.length() * int(8) + int(8)));
            prop_assert!(path.validate().is_ok());
            prop_assert!(path.check_within(&line).is_ok());
        }

        #[test]
        fn round_trips_are_deterministic(preds in proptest::collection::vec(-20i64..=20, 1..8), h in 1i64..200) {
            let preds: Vec<Scalar> = preds.into_iter().map(int).collect();
            let horizon = QuadraticScalar::from_int(h);
            let a = PerfectPrediction::trajectory(&preds, default_alpha(), &horizon).unwrap();
            let b = PerfectPrediction::trajectory(&preds, default_alpha(), &horizon).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert!(a.validate().is_ok());
        }
    }
}
