//! Offline latency-optimal tours on the line.
//!
//! All points are present at time 0 and the server starts at the origin. An
//! optimal route is a zigzag whose turning points alternate sides with
//! growing magnitude; [`optimal_latency_tour`] finds it by interval dynamic
//! programming over the sorted distinct points.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::instance::{Instance, Request, Side};
use crate::scalar::{QuadraticScalar, Scalar};
use crate::trajectory::{PathBuilder, Trajectory};

/// Default cap for [`brute_force_latency`].
pub const BRUTE_FORCE_MAX: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OfflineError {
    #[error("the point list is empty")]
    Empty,
    #[error("{n} points exceed the brute-force cap of {max}")]
    TooManyPoints { n: usize, max: usize },
    #[error("position {position} is not covered by the tour")]
    Uncovered { position: Scalar },
    #[error("brute force needs coordinates that fit in 128-bit integers")]
    Overflow,
}

/// A zigzag route from the origin.
///
/// `turning_points` lists every reversal followed by the final position; the
/// origin itself is omitted. An empty list is the trivial tour that never
/// leaves the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tour {
    first_direction: Side,
    turning_points: Vec<Scalar>,
    total_arclength: Scalar,
}

impl Tour {
    /// Builds a tour from its turning points, checking that they alternate
    /// sides.
    pub fn new(turning_points: Vec<Scalar>) -> Result<Self, TourError> {
        let tour = Self::from_turning_points(turning_points);
        tour.check_alternation()?;
        Ok(tour)
    }

    pub(crate) fn from_turning_points(turning_points: Vec<Scalar>) -> Self {
        let first_direction = turning_points.first().and_then(Side::of).unwrap_or(Side::Left);
        let mut total = Scalar::zero();
        let mut here = Scalar::zero();
        for point in &turning_points {
            total += (point - &here).abs();
            here = point.clone();
        }
        Self { first_direction, turning_points, total_arclength: total }
    }

    pub fn trivial() -> Self {
        Self::from_turning_points(Vec::new())
    }

    pub fn first_direction(&self) -> Side {
        self.first_direction
    }

    pub fn turning_points(&self) -> &[Scalar] {
        &self.turning_points
    }

    pub fn total_arclength(&self) -> &Scalar {
        &self.total_arclength
    }

    pub fn is_trivial(&self) -> bool {
        self.turning_points.is_empty()
    }

    /// Leftmost and rightmost positions reached (the origin included).
    pub fn extent(&self) -> (Scalar, Scalar) {
        let mut lo = Scalar::zero();
        let mut hi = Scalar::zero();
        for point in &self.turning_points {
            if *point < lo {
                lo = point.clone();
            }
            if *point > hi {
                hi = point.clone();
            }
        }
        (lo, hi)
    }

    pub fn covers(&self, position: &Scalar) -> bool {
        let (lo, hi) = self.extent();
        lo <= *position && *position <= hi
    }

    pub fn arc_index(&self) -> ArcIndex {
        ArcIndex::new(self)
    }

    /// The tour driven at unit speed from time 0.
    pub fn to_trajectory(&self) -> Trajectory {
        let mut path = PathBuilder::from_origin();
        for point in &self.turning_points {
            path.move_to(point.into());
        }
        path.build()
    }

    fn check_alternation(&self) -> Result<(), TourError> {
        for (index, point) in self.turning_points.iter().enumerate() {
            if point.is_zero() {
                return Err(TourError::AtOrigin { index });
            }
            if index > 0 && Side::of(point) == Side::of(&self.turning_points[index - 1]) {
                return Err(TourError::SameSide { index });
            }
        }
        Ok(())
    }

    /// Checks the zigzag shape: alternating sides, magnitudes growing
    /// strictly within each side, every segment nesting the previous one and
    /// containing the origin, and the last two turning points spanning all of
    /// `points`.
    pub fn check_structure(&self, points: &[Scalar]) -> Result<(), TourError> {
        self.check_alternation()?;
        let tp = &self.turning_points;
        for index in 2..tp.len() {
            if tp[index].abs() <= tp[index - 2].abs() {
                return Err(TourError::NotGrowing { index });
            }
        }
        let segment = |k: usize| {
            let (u, v) = (&tp[k], &tp[k + 1]);
            if u <= v { (u.clone(), v.clone()) } else { (v.clone(), u.clone()) }
        };
        for k in 0..tp.len().saturating_sub(1) {
            let (lo, hi) = segment(k);
            if lo.is_positive() || hi.is_negative() {
                return Err(TourError::MissesOrigin { index: k });
            }
            if k > 0 {
                let (plo, phi) = segment(k - 1);
                if lo > plo || hi < phi {
                    return Err(TourError::NotNested { index: k });
                }
            }
        }
        let tail = &tp[tp.len().saturating_sub(2)..];
        let lo = tail.iter().filter(|p| p.is_negative()).min().cloned().unwrap_or_else(Scalar::zero);
        let hi = tail.iter().filter(|p| p.is_positive()).max().cloned().unwrap_or_else(Scalar::zero);
        if let Some(point) = points.iter().find(|p| **p < lo || **p > hi) {
            return Err(TourError::MissesPoint { position: point.clone() });
        }
        Ok(())
    }
}

impl std::fmt::Display for Tour {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("o")?;
        for point in &self.turning_points {
            write!(f, "->{point}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TourError {
    #[error("turning point {index} sits at the origin")]
    AtOrigin { index: usize },
    #[error("turning points {index} and its predecessor lie on the same side")]
    SameSide { index: usize },
    #[error("turning point {index} does not grow past the previous one on its side")]
    NotGrowing { index: usize },
    #[error("segment {index} does not contain the origin")]
    MissesOrigin { index: usize },
    #[error("segment {index} does not contain its predecessor")]
    NotNested { index: usize },
    #[error("point {position} lies outside the final sweep")]
    MissesPoint { position: Scalar },
}

/// Arc length along a tour, in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcIndex {
    corners: Vec<Scalar>,
    arcs: Vec<Scalar>,
}

impl ArcIndex {
    pub fn new(tour: &Tour) -> Self {
        let mut corners = vec![Scalar::zero()];
        let mut arcs = vec![Scalar::zero()];
        for point in tour.turning_points() {
            let step = (point - corners.last().unwrap()).abs();
            arcs.push(arcs.last().unwrap() + step);
            corners.push(point.clone());
        }
        Self { corners, arcs }
    }

    pub fn total(&self) -> &Scalar {
        self.arcs.last().unwrap()
    }

    /// Corner positions starting with the origin.
    pub fn corners(&self) -> &[Scalar] {
        &self.corners
    }

    /// Cumulative arc length at each corner.
    pub fn corner_arcs(&self) -> &[Scalar] {
        &self.arcs
    }

    /// Arc length from the origin to the first visit of `position`.
    pub fn arc_to(&self, position: &Scalar) -> Result<Scalar, OfflineError> {
        if position.is_zero() {
            return Ok(Scalar::zero());
        }
        for k in 1..self.corners.len() {
            let (from, to) = (&self.corners[k - 1], &self.corners[k]);
            if between(from, to, position) {
                return Ok(&self.arcs[k - 1] + (position - from).abs());
            }
        }
        Err(OfflineError::Uncovered { position: position.clone() })
    }

    /// [`arc_to`](Self::arc_to) over ℚ(√3).
    pub fn arc_to_exact(&self, position: &QuadraticScalar) -> Option<QuadraticScalar> {
        if position.is_zero() {
            return Some(QuadraticScalar::zero());
        }
        for k in 1..self.corners.len() {
            let from = QuadraticScalar::from(&self.corners[k - 1]);
            let to = QuadraticScalar::from(&self.corners[k]);
            let inside = if from <= to {
                from <= *position && *position <= to
            } else {
                to <= *position && *position <= from
            };
            if inside {
                return Some(&QuadraticScalar::from(&self.arcs[k - 1]) + &(position - &from).abs());
            }
        }
        None
    }

    /// Position reached after travelling `arc` along the tour, clamped to
    /// `[0, total]`.
    pub fn position_at_arc(&self, arc: &QuadraticScalar) -> QuadraticScalar {
        if !arc.is_positive() {
            return QuadraticScalar::zero();
        }
        let k = self.arcs.partition_point(|a| QuadraticScalar::from(a) <= *arc);
        if k >= self.arcs.len() {
            return QuadraticScalar::from(self.corners.last().unwrap());
        }
        let from = &self.corners[k - 1];
        let offset = arc - &QuadraticScalar::from(&self.arcs[k - 1]);
        if self.corners[k] > *from {
            &QuadraticScalar::from(from) + &offset
        } else {
            &QuadraticScalar::from(from) - &offset
        }
    }

    /// Index of the first corner whose arc is at least `arc`.
    pub fn corner_at_or_after(&self, arc: &QuadraticScalar) -> usize {
        self.arcs.partition_point(|a| QuadraticScalar::from(a) < *arc)
    }
}

fn between(a: &Scalar, b: &Scalar, x: &Scalar) -> bool {
    if a <= b {
        a <= x && x <= b
    } else {
        b <= x && x <= a
    }
}

#[derive(Debug, Clone)]
struct Weighted {
    magnitude: Scalar,
    weight: u64,
}

/// Distinct nonzero magnitudes on one side, ascending, with multiplicities.
fn side_points(points: &[Scalar], side: Side) -> Vec<Weighted> {
    let mut mags: Vec<Scalar> = points
        .iter()
        .filter(|p| Side::of(p) == Some(side))
        .map(|p| p.abs())
        .collect();
    mags.sort();
    let mut out: Vec<Weighted> = Vec::new();
    for m in mags {
        match out.last_mut() {
            Some(last) if last.magnitude == m => last.weight += 1,
            _ => out.push(Weighted { magnitude: m, weight: 1 }),
        }
    }
    out
}

#[derive(Debug, Clone)]
struct Cell {
    cost: Scalar,
    turns: usize,
    go_left: bool,
}

/// Latency-optimal tour over `points` and its latency sum.
///
/// Ties go to the tour that heads left first, then to fewer turning points,
/// then to the lexicographically smallest turning magnitudes. Points at the
/// origin are served at time 0 and do not shape the tour.
pub fn optimal_latency_tour(points: &[Scalar]) -> Result<(Tour, Scalar), OfflineError> {
    if points.is_empty() {
        return Err(OfflineError::Empty);
    }
    let left = side_points(points, Side::Left);
    let right = side_points(points, Side::Right);
    let (nl, nr) = (left.len(), right.len());
    if nl + nr == 0 {
        return Ok((Tour::trivial(), Scalar::zero()));
    }
    let prefix = |side: &[Weighted]| {
        let mut acc = vec![0u64];
        for w in side {
            acc.push(acc.last().unwrap() + w.weight);
        }
        acc
    };
    let (lp, rp) = (prefix(&left), prefix(&right));
    let total = lp[nl] + rp[nr];
    let position = |i: usize, j: usize, at_left: bool| -> Scalar {
        if at_left {
            -&left[i - 1].magnitude
        } else if j == 0 {
            Scalar::zero()
        } else {
            right[j - 1].magnitude.clone()
        }
    };

    // table[e][i][j]: best completion from having covered i left and j right
    // points while standing at the left (e = 0) or right (e = 1) frontier.
    let mut table: [Vec<Vec<Option<Cell>>>; 2] = [vec![vec![None; nr + 1]; nl + 1], vec![vec![None; nr + 1]; nl + 1]];
    for sum in (1..=nl + nr).rev() {
        for i in sum.saturating_sub(nr)..=sum.min(nl) {
            let j = sum - i;
            for (e, at_left) in [(0usize, true), (1usize, false)] {
                if (at_left && i == 0) || (!at_left && j == 0) {
                    continue;
                }
                if i == nl && j == nr {
                    table[e][i][j] = Some(Cell { cost: Scalar::zero(), turns: 0, go_left: at_left });
                    continue;
                }
                let here = position(i, j, at_left);
                let remaining = Scalar::from_integer(BigInt::from(total - lp[i] - rp[j]));
                let mut options: Vec<Cell> = Vec::with_capacity(2);
                if i < nl {
                    let next = table[0][i + 1][j].as_ref().unwrap();
                    let step = (&here + &left[i].magnitude).abs();
                    options.push(Cell {
                        cost: &step * &remaining + &next.cost,
                        turns: next.turns + usize::from(!at_left),
                        go_left: true,
                    });
                }
                if j < nr {
                    let next = table[1][i][j + 1].as_ref().unwrap();
                    let step = (&right[j].magnitude - &here).abs();
                    options.push(Cell {
                        cost: &step * &remaining + &next.cost,
                        turns: next.turns + usize::from(at_left),
                        go_left: false,
                    });
                }
                let best = options
                    .into_iter()
                    .min_by(|a, b| {
                        // turning now gives a smaller next magnitude
                        let switches = |c: &Cell| c.go_left != at_left;
                        (&a.cost, a.turns, !switches(a)).cmp(&(&b.cost, b.turns, !switches(b)))
                    })
                    .unwrap();
                table[e][i][j] = Some(best);
            }
        }
    }

    let w = Scalar::from_integer(BigInt::from(total));
    let start_left = (nl > 0).then(|| {
        let next = table[0][1][0].as_ref().unwrap();
        (&left[0].magnitude * &w + &next.cost, next.turns)
    });
    let start_right = (nr > 0).then(|| {
        let next = table[1][0][1].as_ref().unwrap();
        (&right[0].magnitude * &w + &next.cost, next.turns)
    });
    let go_left = match (&start_left, &start_right) {
        (Some(l), Some(r)) => l.0 <= r.0,
        (Some(_), None) => true,
        _ => false,
    };
    let opt_sum = if go_left { start_left.unwrap().0 } else { start_right.unwrap().0 };

    let (mut i, mut j, mut at_left) = if go_left { (1, 0, true) } else { (0, 1, false) };
    let mut turning = Vec::new();
    loop {
        let cell = table[usize::from(!at_left)][i][j].as_ref().unwrap();
        if i == nl && j == nr {
            turning.push(position(i, j, at_left));
            break;
        }
        if cell.go_left != at_left {
            turning.push(position(i, j, at_left));
        }
        at_left = cell.go_left;
        if at_left {
            i += 1;
        } else {
            j += 1;
        }
    }
    Ok((Tour::from_turning_points(turning), opt_sum))
}

/// Exhaustive minimum latency over all visiting orders.
///
/// Each order is driven point to point from the origin at unit speed; the
/// cost of an order is the sum of the times its slots are reached. Returns the
/// minimum and an order (indices into `points`) attaining it.
pub fn brute_force_latency(points: &[Scalar], max_n: usize) -> Result<(Scalar, Vec<usize>), OfflineError> {
    let n = points.len();
    if n > max_n {
        return Err(OfflineError::TooManyPoints { n, max: max_n });
    }
    if n == 0 {
        return Err(OfflineError::Empty);
    }
    let denom = points.iter().fold(BigInt::from(1), |acc, p| acc.lcm(p.denom()));
    let scaled: Vec<i128> = points
        .iter()
        .map(|p| (p.numer() * (&denom / p.denom())).to_i128().ok_or(OfflineError::Overflow))
        .collect::<Result<_, _>>()?;
    let mut search = Search { coords: &scaled, used: vec![false; n], order: Vec::with_capacity(n), best: i128::MAX, best_order: Vec::new() };
    search.descend(0, 0, 0);
    let opt = Scalar::new(BigInt::from(search.best), denom);
    Ok((opt, search.best_order))
}

struct Search<'a> {
    coords: &'a [i128],
    used: Vec<bool>,
    order: Vec<usize>,
    best: i128,
    best_order: Vec<usize>,
}

impl Search<'_> {
    fn descend(&mut self, here: i128, clock: i128, cost: i128) {
        let n = self.coords.len();
        if self.order.len() == n {
            if cost < self.best {
                self.best = cost;
                self.best_order = self.order.clone();
            }
            return;
        }
        let remaining = (n - self.order.len()) as i128;
        for k in 0..n {
            if self.used[k] {
                continue;
            }
            let arrive = clock + (self.coords[k] - here).abs();
            let next_cost = cost + arrive;
            // every later slot finishes no earlier than this one
            if cost + remaining * arrive >= self.best {
                continue;
            }
            self.used[k] = true;
            self.order.push(k);
            self.descend(self.coords[k], arrive, next_cost);
            self.order.pop();
            self.used[k] = false;
        }
    }
}

/// `max{|actual|, t}`: a lower bound on any schedule's completion time.
pub fn metric_free_lower_bound(request: &Request) -> Scalar {
    request.actual.abs().max(request.arrival.clone())
}

/// Per-request `max{arc(tour, actual), t}` together with the metric-free
/// bound `max{|actual|, t}`.
pub fn opt_request_lower_bound(instance: &Instance, tour: &Tour) -> Result<Vec<(Scalar, Scalar)>, OfflineError> {
    let index = tour.arc_index();
    instance
        .requests()
        .iter()
        .map(|r| {
            let arc = index.arc_to(&r.actual)?;
            Ok((arc.max(r.arrival.clone()), metric_free_lower_bound(r)))
        })
        .collect()
}

/// `max{optimal latency over actual locations, Σ t}`.
pub fn opt_sum_lower_bound(instance: &Instance) -> Scalar {
    let (_, latency) = optimal_latency_tour(&instance.actual_locations()).expect("instances are nonempty");
    let arrivals = instance.requests().iter().fold(Scalar::zero(), |acc, r| acc + &r.arrival);
    latency.max(arrivals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{LineSegment, Model};
    use crate::scalar::{int, ratio};
    use proptest::prelude::*;

    fn ints(values: &[i64]) -> Vec<Scalar> {
        values.iter().map(|&v| int(v)).collect()
    }

    #[test]
    fn single_point() {
        let (tour, opt) = optimal_latency_tour(&ints(&[3])).unwrap();
        assert_eq!(tour.turning_points(), &ints(&[3])[..]);
        assert_eq!(opt, int(3));
        assert_eq!(brute_force_latency(&ints(&[3]), 9).unwrap().0, int(3));
    }

    #[test]
    fn two_sided_pair_goes_left_first() {
        let (tour, opt) = optimal_latency_tour(&ints(&[-1, 2])).unwrap();
        assert_eq!(tour.first_direction(), Side::Left);
        assert_eq!(tour.turning_points(), &ints(&[-1, 2])[..]);
        assert_eq!(opt, int(5));
        assert_eq!(tour.total_arclength(), &int(4));
        assert_eq!(tour.to_string(), "o->-1->2");
        let (brute, order) = brute_force_latency(&ints(&[-1, 2]), 9).unwrap();
        assert_eq!(brute, int(5));
        assert_eq!(order, vec![0, 1]);
    }

    #[test]
    fn three_points() {
        let points = ints(&[-1, -2, 1]);
        let (tour, opt) = optimal_latency_tour(&points).unwrap();
        assert_eq!(opt, int(8));
        assert_eq!(brute_force_latency(&points, 9).unwrap().0, int(8));
        tour.check_structure(&points).unwrap();
    }

    #[test]
    fn lower_bound_base_set() {
        let points = ints(&[1, 4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(optimal_latency_tour(&points).unwrap().1, int(50));
        assert_eq!(brute_force_latency(&points, 9).unwrap().0, int(50));
    }

    #[test]
    fn symmetric_tie_prefers_left() {
        let (tour, opt) = optimal_latency_tour(&ints(&[-1, 1])).unwrap();
        assert_eq!(tour.turning_points(), &ints(&[-1, 1])[..]);
        assert_eq!(opt, int(4));
    }

    #[test]
    fn origin_points_cost_nothing() {
        let (tour, opt) = optimal_latency_tour(&ints(&[0, 0])).unwrap();
        assert!(tour.is_trivial());
        assert_eq!(opt, int(0));
        let (_, opt) = optimal_latency_tour(&ints(&[0, 2, 2])).unwrap();
        assert_eq!(opt, int(4));
        assert_eq!(brute_force_latency(&ints(&[0, 2, 2]), 9).unwrap().0, int(4));
        assert_eq!(optimal_latency_tour(&[]), Err(OfflineError::Empty));
    }

    #[test]
    fn brute_force_cap() {
        let many = ints(&[1; 10]);
        assert_eq!(brute_force_latency(&many, 9), Err(OfflineError::TooManyPoints { n: 10, max: 9 }));
    }

    #[test]
    fn arc_index_examples() {
        let straight = Tour::new(ints(&[3])).unwrap().arc_index();
        assert_eq!(straight.arc_to(&int(2)).unwrap(), int(2));
        let zig = Tour::new(ints(&[-1, 2])).unwrap().arc_index();
        assert_eq!(zig.arc_to(&int(2)).unwrap(), int(4));
        assert_eq!(zig.arc_to(&ratio(-1, 2)).unwrap(), ratio(1, 2));
        assert_eq!(zig.arc_to(&int(3)), Err(OfflineError::Uncovered { position: int(3) }));
        assert_eq!(zig.position_at_arc(&QuadraticScalar::from(ratio(5, 2))), QuadraticScalar::from(ratio(1, 2)));
        assert_eq!(zig.position_at_arc(&QuadraticScalar::from_int(9)), QuadraticScalar::from_int(2));
        let s1 = "1+1/2*sqrt3".parse::<QuadraticScalar>().unwrap();
        assert_eq!(zig.position_at_arc(&s1), "-1+1/2*sqrt3".parse().unwrap());
    }

    #[test]
    fn request_bounds() {
        let line = LineSegment::new(int(-5), int(10)).unwrap();
        let instance = Instance::new(
            line,
            vec![Request::exact(0, int(4), int(0)), Request::exact(1, int(2), int(7)), Request::exact(2, int(-1), int(0))],
            Model::Prediction,
        )
        .unwrap();
        let (tour, _) = optimal_latency_tour(&instance.actual_locations()).unwrap();
        let bounds = opt_request_lower_bound(&instance, &tour).unwrap();
        assert_eq!(bounds[1].0, int(7));
        assert_eq!(bounds[0].1, int(4));
        let zig = Tour::new(ints(&[-1, 2])).unwrap();
        let line = LineSegment::new(int(-5), int(5)).unwrap();
        let pair = Instance::new(line, vec![Request::exact(0, int(2), int(0))], Model::Prediction).unwrap();
        assert_eq!(opt_request_lower_bound(&pair, &zig).unwrap()[0].0, int(4));
    }

    #[test]
    fn sum_lower_bound() {
        let line = LineSegment::new(int(-5), int(5)).unwrap();
        let pair = Instance::new(
            line.clone(),
            vec![Request::exact(0, int(-1), int(0)), Request::exact(1, int(2), int(0))],
            Model::Prediction,
        )
        .unwrap();
        assert_eq!(opt_sum_lower_bound(&pair), int(5));
        let late = Instance::new(line, vec![Request::exact(0, int(0), int(100))], Model::Prediction).unwrap();
        assert_eq!(opt_sum_lower_bound(&late), int(100));
    }

    fn arb_points(max_n: usize) -> impl Strategy<Value = Vec<Scalar>> {
        proptest::collection::vec((-40i64..=40).prop_map(|v| ratio(v, 4)), 1..=max_n)
    }

    proptest! {
        #[test]
        fn dp_matches_brute_force(points in arb_points(7)) {
            let (tour, opt) = optimal_latency_tour(&points).unwrap();
            prop_assert_eq!(&opt, &brute_force_latency(&points, 9).unwrap().0);
            prop_assert!(tour.check_structure(&points).is_ok());
        }

        #[test]
        fn tour_trajectory_reproduces_latency(points in arb_points(10)) {
            let (tour, opt) = optimal_latency_tour(&points).unwrap();
            let path = tour.to_trajectory();
            let index = tour.arc_index();
            let zero = QuadraticScalar::zero();
            let mut sum = QuadraticScalar::zero();
            for p in &points {
                let visit = path.first_service_time(&p.into(), &zero).unwrap();
                prop_assert_eq!(&visit, &QuadraticScalar::from(index.arc_to(p).unwrap()));
                sum += &visit;
            }
            prop_assert_eq!(sum, QuadraticScalar::from(opt));
        }
    }
}
