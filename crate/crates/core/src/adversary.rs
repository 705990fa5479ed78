//! The adaptive lower-bound game on the half-line `[0, 10]`.
//!
//! Eight requests at `1, 4, 5, …, 10` arrive at time 0, and every location
//! (including a few tiny `ε` positions) is predicted perfectly. The adversary
//! watches the server at integer steps and releases `ε`-requests:
//!
//! * **R1** releases `ε₁` at the first step by which `r₁` has been served.
//! * **R2** withholds further releases until the server has left the last
//!   served `ε` location.
//! * **R3** releases the next `ε` at the first step where the server is at
//!   position `≥ 1` and moving outward, after the previous `ε` was served.
//! * **R4** declares a witness as soon as a released request is still
//!   unserved at three times its lower bound `max{l, t}`.
//!
//! A deterministic server always ends up with some request whose ratio
//! exceeds 3; the game reports it.

use std::fmt::Write as _;

use num_traits::Zero;
use thiserror::Error;

use crate::instance::{LineSegment, Model};
use crate::online::{Arrival, Strategy, StrategyError, VisibleInfo};
use crate::scalar::{int, ratio, QuadraticScalar, Scalar};
use crate::trajectory::{Trajectory, TrajectoryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("strategy produced an invalid path: {0}")]
    BadPath(#[from] TrajectoryError),
    #[error("strategy left the half-line [0, 10] at step {step}")]
    OffLine { step: u64 },
    #[error("two plays against the same strategy diverged at step {step}")]
    Nondeterministic { step: u64 },
    #[error("the transcript has no witness")]
    NoWitness,
    #[error("witness request {id}: recorded completion {recorded:?} but the path gives {recomputed:?}")]
    Mismatch { id: usize, recorded: Option<QuadraticScalar>, recomputed: Option<QuadraticScalar> },
    #[error("witness request {id} has ratio {ratio}, which does not exceed 3")]
    NotAWitness { id: usize, ratio: QuadraticScalar },
    #[error("epsilon values must be distinct and lie in (0, 1)")]
    BadEpsilon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameConfig {
    pub base_locations: Vec<Scalar>,
    pub epsilons: Vec<Scalar>,
    /// Steps to keep playing after a witness appears, waiting for its
    /// completion, and the overall step limit.
    pub step_cap: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self::with_epsilon_count(3)
    }
}

impl GameConfig {
    /// Base set `{1, 4, …, 10}` and `ε_k = k/1000` for `k = 1..=count`.
    pub fn with_epsilon_count(count: usize) -> Self {
        let mut base_locations = vec![int(1)];
        base_locations.extend((4..=10).map(int));
        let epsilons = (1..=count as i64).map(|k| ratio(k, 1000)).collect();
        Self { base_locations, epsilons, step_cap: 400 }
    }

    pub fn line() -> LineSegment {
        LineSegment::new(int(0), int(10)).expect("valid line")
    }

    /// Ratio-3 deadlines of the base requests.
    pub fn deadlines(&self) -> Vec<Scalar> {
        self.base_locations.iter().map(|l| l * int(3)).collect()
    }

    fn validate(&self) -> Result<(), GameError> {
        let ok = self.epsilons.iter().enumerate().all(|(i, e)| {
            *e > Scalar::zero() && *e < int(1) && !self.epsilons[..i].contains(e)
        });
        if ok { Ok(()) } else { Err(GameError::BadEpsilon) }
    }
}

/// Which trigger produced a release.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trigger {
    /// At time 0.
    Start,
    R1,
    R3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameRequest {
    pub id: usize,
    pub location: Scalar,
    pub release: Scalar,
    pub trigger: Trigger,
    /// Index into the configured `ε` list for released `ε`-requests.
    pub epsilon: Option<usize>,
    pub completion: Option<QuadraticScalar>,
}

impl GameRequest {
    /// `max{l, t}`.
    pub fn lower_bound(&self) -> Scalar {
        self.location.clone().max(self.release.clone())
    }

    pub fn deadline(&self) -> Scalar {
        self.lower_bound() * int(3)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub step: u64,
    pub position: QuadraticScalar,
    pub action: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub request: usize,
    /// Step at which the witness was declared.
    pub step: u64,
    /// Whether it was declared by R4 rather than by the final recount.
    pub missed_deadline: bool,
    pub completion: Option<QuadraticScalar>,
    /// Exact ratio when the completion is known.
    pub ratio: Option<QuadraticScalar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameTranscript {
    pub strategy: String,
    pub requests: Vec<GameRequest>,
    pub observations: Vec<Observation>,
    pub trajectory: Trajectory,
    pub witness: Option<Witness>,
    /// Largest exact ratio among served requests.
    pub max_ratio: QuadraticScalar,
    /// The strategy kept every ratio at or below 3.
    pub escaped: bool,
}

impl GameTranscript {
    /// Human-readable log, one line per step plus a verdict.
    pub fn log(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "strategy {}", self.strategy);
        for r in &self.requests {
            let name = match r.epsilon {
                Some(k) => format!("eps{}", k + 1),
                None => format!("r{}", r.location),
            };
            let done = r.completion.as_ref().map_or("unserved".to_string(), |c| format!("served {c} (~{:.6})", c.to_f64()));
            let _ = writeln!(out, "request {} {name} at {} released {} [{:?}] {done}", r.id, r.location, r.release, r.trigger);
        }
        for o in &self.observations {
            let _ = writeln!(out, "step {} position {:.6} {}", o.step, o.position.to_f64(), o.action);
        }
        match &self.witness {
            Some(w) => {
                let r = &self.requests[w.request];
                let ratio = w.ratio.as_ref().map_or("unknown".to_string(), |q| format!("{q} (~{:.6})", q.to_f64()));
                let _ = writeln!(out, "witness request {} at {} released {}: ratio {ratio}", r.id, r.location, r.release);
            }
            None => {
                let _ = writeln!(out, "escaped: max ratio {} (~{:.6})", self.max_ratio, self.max_ratio.to_f64());
            }
        }
        out
    }
}

struct Game<'a, S: ?Sized> {
    strategy: &'a mut S,
    config: &'a GameConfig,
    path: Trajectory,
    requests: Vec<GameRequest>,
    observations: Vec<Observation>,
}

impl<S: Strategy + ?Sized> Game<'_, S> {
    fn advance_to(&mut self, step: u64) -> Result<(), GameError> {
        let from = QuadraticScalar::from_int(step as i64 - 1);
        let until = QuadraticScalar::from_int(step as i64);
        for point in self.strategy.advance(&from, &until) {
            if point.position.is_negative() || point.position > QuadraticScalar::from_int(10) {
                return Err(GameError::OffLine { step });
            }
            self.path.push(point)?;
        }
        for r in &mut self.requests {
            if r.completion.is_none() {
                r.completion = self.path.first_visit_within(&(&r.location).into(), &(&r.release).into());
            }
        }
        Ok(())
    }

    fn release(&mut self, k: usize, step: u64, trigger: Trigger) {
        let id = self.requests.len();
        let location = self.config.epsilons[k].clone();
        let release = int(step as i64);
        let request = GameRequest {
            id,
            location: location.clone(),
            release: release.clone(),
            trigger,
            epsilon: Some(k),
            completion: (self.path.position_at(&QuadraticScalar::from(&release)) == QuadraticScalar::from(&location))
                .then(|| QuadraticScalar::from(&release)),
        };
        self.requests.push(request);
        self.strategy.on_arrival(&Arrival { id, location, time: release });
    }

    fn moving_outward(&self, step: u64) -> bool {
        let t = QuadraticScalar::from_int(step as i64);
        let points = self.path.points();
        let i = points.partition_point(|p| p.time < t);
        i > 0 && i < points.len() && points[i].time == t && points[i].position > points[i - 1].position
    }

    /// The released request with the earliest missed deadline at `step`.
    fn missed_deadline(&self, step: u64) -> Option<usize> {
        let now = int(step as i64);
        self.requests
            .iter()
            .filter(|r| {
                let deadline = r.deadline();
                deadline <= now
                    && r.completion.as_ref().is_none_or(|c| *c > QuadraticScalar::from(&deadline))
            })
            .min_by(|a, b| a.deadline().cmp(&b.deadline()).then(a.id.cmp(&b.id)))
            .map(|r| r.id)
    }
}

/// Plays the game once against `strategy`.
pub fn play_once<S: Strategy + ?Sized>(strategy: &mut S, config: &GameConfig) -> Result<GameTranscript, GameError> {
    config.validate()?;
    let mut predictions = config.base_locations.clone();
    predictions.extend(config.epsilons.iter().cloned());
    strategy.init(&VisibleInfo { line: GameConfig::line(), model: Model::Prediction, predictions: Some(predictions) })?;

    let mut game = Game { strategy, config, path: Trajectory::at_origin(), requests: Vec::new(), observations: Vec::new() };
    for (id, location) in config.base_locations.iter().enumerate() {
        game.requests.push(GameRequest {
            id,
            location: location.clone(),
            release: Scalar::zero(),
            trigger: Trigger::Start,
            epsilon: None,
            completion: None,
        });
        game.strategy.on_arrival(&Arrival { id, location: location.clone(), time: Scalar::zero() });
    }

    let mut next_epsilon = 0;
    let mut witness: Option<Witness> = None;
    let mut step = 0u64;
    while step < config.step_cap {
        step += 1;
        game.advance_to(step)?;
        let position = game.path.position_at(&QuadraticScalar::from_int(step as i64));
        let mut action = String::new();

        if let Some(w) = &mut witness {
            let r = &game.requests[w.request];
            game.observations.push(Observation { step, position, action });
            if let Some(c) = &r.completion {
                w.completion = Some(c.clone());
                w.ratio = Some(c.div_scalar(&r.lower_bound()).expect("positive bound"));
                break;
            }
            continue;
        }

        if let Some(id) = game.missed_deadline(step) {
            let r = &game.requests[id];
            let _ = write!(action, "witness request {id} missed deadline {}", r.deadline());
            let completion = r.completion.clone();
            let ratio = completion.as_ref().map(|c| c.div_scalar(&r.lower_bound()).expect("positive bound"));
            let done = completion.is_some();
            witness = Some(Witness { request: id, step, missed_deadline: true, completion, ratio });
            game.observations.push(Observation { step, position, action });
            if done {
                break;
            }
            continue;
        }

        let now = QuadraticScalar::from_int(step as i64);
        if next_epsilon < config.epsilons.len() {
            let fire = if next_epsilon == 0 {
                game.requests[0].completion.as_ref().is_some_and(|c| *c <= now).then_some(Trigger::R1)
            } else {
                let previous = game.requests.last().expect("an epsilon was released");
                let served = previous.completion.as_ref().is_some_and(|c| *c < now);
                (served && position >= QuadraticScalar::one() && game.moving_outward(step)).then_some(Trigger::R3)
            };
            if let Some(trigger) = fire {
                game.release(next_epsilon, step, trigger);
                let _ = write!(action, "release eps{} at {} ({trigger:?})", next_epsilon + 1, config.epsilons[next_epsilon]);
                next_epsilon += 1;
            }
        }
        game.observations.push(Observation { step, position, action });

        let all_served = game.requests.iter().all(|r| r.completion.is_some());
        if next_epsilon == config.epsilons.len() && all_served {
            break;
        }
    }

    let max = game
        .requests
        .iter()
        .filter_map(|r| r.completion.as_ref().map(|c| (c.div_scalar(&r.lower_bound()).expect("positive bound"), r.id)))
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    let max_ratio = max.as_ref().map_or_else(QuadraticScalar::one, |m| m.0.clone());
    let three = QuadraticScalar::from_int(3);
    if witness.is_none() {
        if let Some((ratio, id)) = max.filter(|m| m.0 > three) {
            witness = Some(Witness {
                request: id,
                step,
                missed_deadline: false,
                completion: game.requests[id].completion.clone(),
                ratio: Some(ratio),
            });
        }
    }
    Ok(GameTranscript {
        strategy: game.strategy.name().to_string(),
        escaped: witness.is_none(),
        requests: game.requests,
        observations: game.observations,
        trajectory: game.path,
        witness,
        max_ratio,
    })
}

/// Plays the game twice on fresh strategies from `factory` and checks that
/// both plays agree.
pub fn play_lowerbound_game<F, S>(mut factory: F, config: &GameConfig) -> Result<GameTranscript, GameError>
where
    F: FnMut() -> S,
    S: Strategy,
{
    let first = play_once(&mut factory(), config)?;
    let second = play_once(&mut factory(), config)?;
    if first != second {
        let step = first
            .observations
            .iter()
            .zip(&second.observations)
            .find(|(a, b)| a != b)
            .map_or_else(|| first.observations.len().min(second.observations.len()) as u64, |(a, _)| a.step);
        return Err(GameError::Nondeterministic { step });
    }
    Ok(first)
}

/// Recomputes the witness's completion from the recorded path and returns
/// its exact ratio, which must exceed 3.
pub fn verify_witness(transcript: &GameTranscript) -> Result<QuadraticScalar, GameError> {
    let witness = transcript.witness.as_ref().ok_or(GameError::NoWitness)?;
    let request = &transcript.requests[witness.request];
    let recomputed = transcript.trajectory.first_visit_within(&(&request.location).into(), &(&request.release).into());
    if recomputed != witness.completion {
        return Err(GameError::Mismatch { id: request.id, recorded: witness.completion.clone(), recomputed });
    }
    let bound = request.location.clone().max(request.release.clone());
    let three = QuadraticScalar::from_int(3);
    let ratio = match &recomputed {
        Some(c) => c.div_scalar(&bound).expect("positive bound"),
        None => {
            // never served on the recorded span: it has run past the deadline
            let end = transcript.trajectory.end_time().clone();
            let ratio = end.div_scalar(&bound).expect("positive bound");
            if ratio <= three {
                return Err(GameError::NotAWitness { id: request.id, ratio });
            }
            return Ok(ratio);
        }
    };
    if ratio <= three {
        return Err(GameError::NotAWitness { id: request.id, ratio });
    }
    Ok(ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::{default_alpha, GreedyReplan, HalfLineRoundTrips};
    use crate::trajectory::{PathBuilder, Waypoint};


    /// Follows a fixed list of `(time, position)` breakpoints.
    struct Scripted {
        path: Trajectory,
    }

    impl Scripted {
        fn new(breakpoints: &[(i64, i64)]) -> Self {
            Self { path: Trajectory::from_pairs(breakpoints.iter().map(|&(t, p)| (int(t), int(p)))).unwrap() }
        }
    }

    impl Strategy for Scripted {
        fn name(&self) -> &'static str {
            "scripted"
        }
        fn init(&mut self, _: &VisibleInfo) -> Result<(), StrategyError> {
            Ok(())
        }
        fn advance(&mut self, from: &QuadraticScalar, until: &QuadraticScalar) -> Vec<Waypoint> {
            self.path.slice(from, until)
        }
    }

    #[test]
    fn waiting_three_steps_loses_r1() {
        let config = GameConfig::default();
        let t = play_lowerbound_game(|| Scripted::new(&[(0, 0), (3, 0), (4, 1), (13, 10)]), &config).unwrap();
        let w = t.witness.as_ref().unwrap();
        assert_eq!(t.requests[w.request].location, int(1));
        assert_eq!(w.completion, Some(QuadraticScalar::from_int(4)));
        assert_eq!(verify_witness(&t).unwrap(), QuadraticScalar::from_int(4));
    }

    #[test]
    fn camping_at_epsilon_loses_r4() {
        // serve r1 at 1, ε1 ≈ 0 at 2, camp there until 10, then head out
        let config = GameConfig::default();
        let eps = "1/1000".parse::<QuadraticScalar>().unwrap();
        let mut b = PathBuilder::from_origin();
        b.move_to(QuadraticScalar::one());
        b.move_to(eps.clone());
        b.wait_until(QuadraticScalar::from_int(10));
        b.move_to(QuadraticScalar::from_int(10));
        let script = b.build();
        let t = play_lowerbound_game(|| Scripted { path: script.clone() }, &config).unwrap();
        let w = t.witness.as_ref().unwrap();
        assert_eq!(t.requests[w.request].location, int(4));
        assert!(w.missed_deadline);
        assert_eq!(w.step, 12);
        let ratio = verify_witness(&t).unwrap();
        assert_eq!(ratio, (&QuadraticScalar::from_int(14) - &eps).div_scalar(&int(4)).unwrap());
        assert_eq!(t.requests[8].trigger, Trigger::R1);
        assert_eq!(t.requests[8].release, int(1));
    }

    #[test]
    fn half_line_round_trips_lose_epsilon_one() {
        let config = GameConfig::default();
        let t = play_lowerbound_game(|| HalfLineRoundTrips::new(default_alpha()).unwrap(), &config).unwrap();
        let ratio = verify_witness(&t).unwrap();
        let w = t.witness.as_ref().unwrap();
        assert_eq!(t.requests[w.request].epsilon, Some(0));
        assert_eq!(ratio, "1999/1000+sqrt3".parse::<QuadraticScalar>().unwrap());
        assert!(ratio <= "2+sqrt3".parse().unwrap());
    }

    #[test]
    fn more_epsilons_catch_greedy() {
        let t = play_lowerbound_game(GreedyReplan::new, &GameConfig::with_epsilon_count(5)).unwrap();
        assert!(!t.escaped, "{}", t.log());
        assert!(verify_witness(&t).unwrap() > QuadraticScalar::from_int(3));
    }

    #[test]
    fn rejects_bad_epsilons() {
        let config = GameConfig { epsilons: vec![int(1)], ..GameConfig::default() };
        assert_eq!(play_once(&mut GreedyReplan::new(), &config).unwrap_err(), GameError::BadEpsilon);
    }

    #[test]
    fn witness_verification_catches_tampering() {
        let config = GameConfig::default();
        let mut t = play_lowerbound_game(|| HalfLineRoundTrips::new(default_alpha()).unwrap(), &config).unwrap();
        t.witness.as_mut().unwrap().completion = Some(QuadraticScalar::from_int(2));
        assert!(matches!(verify_witness(&t), Err(GameError::Mismatch { .. })));
    }
}
