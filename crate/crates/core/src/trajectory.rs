//! Piecewise-linear server paths over exact time.

use std::cmp::Ordering;

use thiserror::Error;

use crate::instance::LineSegment;
use crate::scalar::QuadraticScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrajectoryError {
    #[error("a trajectory must start at the origin at time 0")]
    BadStart,
    #[error("breakpoint {index}: time {time} does not increase")]
    NonIncreasingTime { index: usize, time: QuadraticScalar },
    #[error("breakpoint {index}: speed exceeds 1 (moved {distance} in {duration})")]
    TooFast { index: usize, distance: QuadraticScalar, duration: QuadraticScalar },
    #[error("breakpoint {index}: position {position} leaves the line")]
    OffLine { index: usize, position: QuadraticScalar },
}

/// A breakpoint `(time, position)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Waypoint {
    pub time: QuadraticScalar,
    pub position: QuadraticScalar,
}

impl Waypoint {
    pub fn new(time: QuadraticScalar, position: QuadraticScalar) -> Self {
        Self { time, position }
    }

    pub fn origin() -> Self {
        Self::new(QuadraticScalar::zero(), QuadraticScalar::zero())
    }
}

/// Server position over time: linear between breakpoints, constant after the
/// last one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trajectory {
    points: Vec<Waypoint>,
}

impl Default for Trajectory {
    fn default() -> Self {
        Self::at_origin()
    }
}

impl Trajectory {
    /// Validated constructor: starts at `(0, 0)`, strictly increasing times,
    /// speed at most 1.
    pub fn new(points: Vec<Waypoint>) -> Result<Self, TrajectoryError> {
        let trajectory = Self { points };
        trajectory.validate()?;
        Ok(trajectory)
    }

    pub fn at_origin() -> Self {
        Self { points: vec![Waypoint::origin()] }
    }

    /// Builds from `(time, position)` pairs.
    pub fn from_pairs<I, T, P>(pairs: I) -> Result<Self, TrajectoryError>
    where
        I: IntoIterator<Item = (T, P)>,
        T: Into<QuadraticScalar>,
        P: Into<QuadraticScalar>,
    {
        Self::new(pairs.into_iter().map(|(t, p)| Waypoint::new(t.into(), p.into())).collect())
    }

    pub(crate) fn from_points_unchecked(points: Vec<Waypoint>) -> Self {
        debug_assert!(!points.is_empty());
        Self { points }
    }

    pub fn validate(&self) -> Result<(), TrajectoryError> {
        match self.points.first() {
            Some(first) if first.time.is_zero() && first.position.is_zero() => {}
            _ => return Err(TrajectoryError::BadStart),
        }
        for (index, pair) in self.points.windows(2).enumerate() {
            check_step(index + 1, &pair[0], &pair[1])?;
        }
        Ok(())
    }

    pub fn check_within(&self, line: &LineSegment) -> Result<(), TrajectoryError> {
        for (index, point) in self.points.iter().enumerate() {
            if !line.contains_exact(&point.position) {
                return Err(TrajectoryError::OffLine { index, position: point.position.clone() });
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[Waypoint] {
        &self.points
    }

    pub fn last(&self) -> &Waypoint {
        self.points.last().expect("trajectory is never empty")
    }

    pub fn end_time(&self) -> &QuadraticScalar {
        &self.last().time
    }

    /// Appends a breakpoint after validating time order and speed.
    pub fn push(&mut self, point: Waypoint) -> Result<(), TrajectoryError> {
        check_step(self.points.len(), self.last(), &point)?;
        self.points.push(point);
        Ok(())
    }

    /// Index of the last breakpoint with `time ≤ t` (0 for `t < 0`).
    fn segment_index(&self, t: &QuadraticScalar) -> usize {
        self.points.partition_point(|p| p.time <= *t).saturating_sub(1)
    }

    pub fn position_at(&self, t: &QuadraticScalar) -> QuadraticScalar {
        position_in(&self.points, t)
    }

    /// Earliest `t ≥ not_before` with `position_at(t) == location`, treating
    /// the path as parked at its last position forever.
    pub fn first_service_time(
        &self,
        location: &QuadraticScalar,
        not_before: &QuadraticScalar,
    ) -> Option<QuadraticScalar> {
        if let Some(t) = self.first_visit_within(location, not_before) {
            return Some(t);
        }
        let last = self.last();
        (last.position == *location).then(|| not_before.clone().max(last.time.clone()))
    }

    /// Like [`first_service_time`](Self::first_service_time) but only over the
    /// recorded span `[0, end_time]`.
    pub fn first_visit_within(
        &self,
        location: &QuadraticScalar,
        not_before: &QuadraticScalar,
    ) -> Option<QuadraticScalar> {
        if *not_before > *self.end_time() {
            return None;
        }
        let start = self.segment_index(not_before);
        if self.points.len() == 1 {
            return (self.points[0].position == *location).then(|| not_before.clone());
        }
        for k in start..self.points.len() - 1 {
            let (from, to) = (&self.points[k], &self.points[k + 1]);
            let (begin_time, begin_pos) = if k == start && *not_before > from.time {
                (not_before.clone(), interpolate(from, to, not_before))
            } else {
                (from.time.clone(), from.position.clone())
            };
            if begin_pos == *location {
                return Some(begin_time);
            }
            let (lo, hi) = if begin_pos <= to.position {
                (&begin_pos, &to.position)
            } else {
                (&to.position, &begin_pos)
            };
            if lo <= location && location <= hi {
                let travelled = (location - &begin_pos).abs();
                let distance = (&to.position - &begin_pos).abs();
                let duration = &to.time - &begin_time;
                let elapsed = if distance == duration { travelled } else { &(&travelled * &duration) / &distance };
                return Some(&begin_time + &elapsed);
            }
        }
        None
    }

    /// Breakpoints strictly after `from` up to `to`, ending with the exact
    /// point at `to`. Times past the last breakpoint are parked.
    pub fn slice(&self, from: &QuadraticScalar, to: &QuadraticScalar) -> Vec<Waypoint> {
        slice_points(&self.points, from, to)
    }

    /// Copy cut at time `t` (extended by parking if `t` is past the end).
    pub fn truncated(&self, t: &QuadraticScalar) -> Trajectory {
        let mut points: Vec<Waypoint> = self.points.iter().take_while(|p| p.time < *t).cloned().collect();
        if points.is_empty() {
            return Trajectory::at_origin();
        }
        points.push(Waypoint::new(t.clone(), self.position_at(t)));
        Trajectory { points }
    }

    /// Breakpoints where the direction of motion reverses.
    pub fn turnarounds(&self) -> Vec<Waypoint> {
        let mut out = Vec::new();
        let mut heading = Ordering::Equal;
        for pair in self.points.windows(2) {
            let dir = (&pair[1].position - &pair[0].position).signum();
            if dir == Ordering::Equal {
                continue;
            }
            if heading != Ordering::Equal && dir != heading {
                out.push(pair[0].clone());
            }
            heading = dir;
        }
        out
    }

    /// Times at which the path is at the origin after having left it.
    pub fn origin_returns(&self) -> Vec<QuadraticScalar> {
        let mut out = Vec::new();
        let mut away = false;
        for point in &self.points {
            if point.position.is_zero() {
                if away {
                    out.push(point.time.clone());
                }
                away = false;
            } else {
                away = true;
            }
        }
        out
    }
}

fn position_in(points: &[Waypoint], t: &QuadraticScalar) -> QuadraticScalar {
    let i = points.partition_point(|p| p.time <= *t).saturating_sub(1);
    if i + 1 >= points.len() || *t <= points[i].time {
        return points[i].position.clone();
    }
    interpolate(&points[i], &points[i + 1], t)
}

fn slice_points(points: &[Waypoint], from: &QuadraticScalar, to: &QuadraticScalar) -> Vec<Waypoint> {
    if to <= from {
        return Vec::new();
    }
    let start = points.partition_point(|p| p.time <= *from);
    let end = points.partition_point(|p| p.time < *to);
    let mut out: Vec<Waypoint> = points[start..end.max(start)].to_vec();
    out.push(Waypoint::new(to.clone(), position_in(points, to)));
    out
}

fn check_step(index: usize, prev: &Waypoint, next: &Waypoint) -> Result<(), TrajectoryError> {
    if next.time <= prev.time {
        return Err(TrajectoryError::NonIncreasingTime { index, time: next.time.clone() });
    }
    let distance = (&next.position - &prev.position).abs();
    let duration = &next.time - &prev.time;
    if distance > duration {
        return Err(TrajectoryError::TooFast { index, distance, duration });
    }
    Ok(())
}

fn interpolate(from: &Waypoint, to: &Waypoint, t: &QuadraticScalar) -> QuadraticScalar {
    let elapsed = t - &from.time;
    let shift = &to.position - &from.position;
    let duration = &to.time - &from.time;
    if shift.is_zero() {
        return from.position.clone();
    }
    if shift == duration {
        return &from.position + &elapsed;
    }
    if -&shift == duration {
        return &from.position - &elapsed;
    }
    &from.position + &(&(&shift * &elapsed) / &duration)
}

/// Builds unit-speed paths move by move.
#[derive(Debug, Clone)]
pub struct PathBuilder {
    points: Vec<Waypoint>,
}

impl PathBuilder {
    pub fn new(start: Waypoint) -> Self {
        Self { points: vec![start] }
    }

    pub fn from_origin() -> Self {
        Self::new(Waypoint::origin())
    }

    pub fn current(&self) -> &Waypoint {
        self.points.last().expect("builder is never empty")
    }

    /// Moves at unit speed to `position`; no-op if already there.
    pub fn move_to(&mut self, position: QuadraticScalar) -> &mut Self {
        let here = self.current();
        let distance = (&position - &here.position).abs();
        if !distance.is_zero() {
            let time = &here.time + &distance;
            self.points.push(Waypoint::new(time, position));
        }
        self
    }

    /// Waits in place until `time`; no-op if `time` is not in the future.
    pub fn wait_until(&mut self, time: QuadraticScalar) -> &mut Self {
        let here = self.current();
        if time > here.time {
            let position = here.position.clone();
            self.points.push(Waypoint::new(time, position));
        }
        self
    }

    pub fn points(&self) -> &[Waypoint] {
        &self.points
    }

    pub fn end_time(&self) -> &QuadraticScalar {
        &self.current().time
    }

    /// Same as [`Trajectory::slice`] over the path built so far.
    pub fn slice(&self, from: &QuadraticScalar, to: &QuadraticScalar) -> Vec<Waypoint> {
        slice_points(&self.points, from, to)
    }

    pub fn into_points(self) -> Vec<Waypoint> {
        self.points
    }

    /// Finishes a path that starts at the origin at time 0.
    pub fn build(self) -> Trajectory {
        Trajectory::from_points_unchecked(self.points)
    }
}
