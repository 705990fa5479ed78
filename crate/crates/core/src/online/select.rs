use crate::instance::LineSegment;
use crate::scalar::{QuadraticScalar, Scalar};
use crate::trajectory::Waypoint;

use super::{Arrival, GreedyReplan, RobustPrediction, Strategy, StrategyError, VisibleInfo};

/// Which algorithm to run for a given error bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selection {
    Robust,
    Fallback,
}

/// `τ = (2−√3)/4 ≈ 0.066987`, where `2+√3+4τ = 4`. Often quoted rounded as
/// 0.067.
pub fn fallback_threshold() -> QuadraticScalar {
    let two = QuadraticScalar::from_int(2);
    (&two - &QuadraticScalar::sqrt3()).mul_scalar(&Scalar::new(1.into(), 4.into()))
}

/// Fallback iff `Δ ≥ τ·|L|`.
pub fn select_algorithm(delta: &Scalar, line: &LineSegment) -> Selection {
    if QuadraticScalar::from(delta) >= fallback_threshold().mul_scalar(&line.length()) {
        Selection::Fallback
    } else {
        Selection::Robust
    }
}

/// Runs the robust strategy below the threshold and the fallback above it.
#[derive(Debug, Clone)]
pub struct SelectiveRobust {
    robust: RobustPrediction,
    fallback: GreedyReplan,
    selection: Option<Selection>,
}

impl SelectiveRobust {
    pub fn new(alpha: QuadraticScalar, delta: Scalar) -> Result<Self, StrategyError> {
        Ok(Self { robust: RobustPrediction::new(alpha, delta)?, fallback: GreedyReplan::new(), selection: None })
    }

    pub fn selection(&self) -> Option<Selection> {
        self.selection
    }

    fn active(&mut self) -> &mut dyn Strategy {
        match self.selection.expect("init runs first") {
            Selection::Robust => &mut self.robust,
            Selection::Fallback => &mut self.fallback,
        }
    }
}

impl Strategy for SelectiveRobust {
    fn name(&self) -> &'static str {
        "robust"
    }

    fn init(&mut self, info: &VisibleInfo) -> Result<(), StrategyError> {
        let selection = select_algorithm(self.robust.delta(), &info.line);
        self.selection = Some(selection);
        self.active().init(info)
    }

    fn on_arrival(&mut self, arrival: &Arrival) {
        self.active().on_arrival(arrival)
    }

    fn advance(&mut self, from: &QuadraticScalar, until: &QuadraticScalar) -> Vec<Waypoint> {
        self.active().advance(from, until)
    }

    fn coverage(&self) -> Option<(QuadraticScalar, QuadraticScalar)> {
        match self.selection? {
            Selection::Robust => self.robust.coverage(),
            Selection::Fallback => self.fallback.coverage(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Model;
    use crate::scalar::{int, ratio};

    #[test]
    fn threshold_value() {
        let tau = fallback_threshold();
        assert!((tau.to_f64() - 0.066_987).abs() < 1e-6);
        assert!(tau < QuadraticScalar::from(ratio(67, 1000)));
        let four = QuadraticScalar::from_int(4);
        let bound = &(&QuadraticScalar::from_int(2) + &QuadraticScalar::sqrt3()) + &(&four * &tau);
        assert_eq!(bound, four);
    }

    #[test]
    fn selection_examples() {
        let line = LineSegment::new(int(-3), int(7)).unwrap();
        assert_eq!(select_algorithm(&int(0), &line), Selection::Robust);
        assert_eq!(select_algorithm(&int(1), &line), Selection::Fallback);
        // 0.0669·10 sits just below τ·10 ≈ 0.66987, 0.067·10 just above
        assert_eq!(select_algorithm(&ratio(669, 1000), &line), Selection::Robust);
        assert_eq!(select_algorithm(&ratio(67, 100), &line), Selection::Fallback);
    }

    #[test]
    fn fallback_runs_greedy() {
        let line = LineSegment::new(int(0), int(10)).unwrap();
        let info = VisibleInfo { line, model: Model::Prediction, predictions: Some(vec![int(5)]) };
        let mut s = SelectiveRobust::new(crate::online::default_alpha(), int(1)).unwrap();
        s.init(&info).unwrap();
        assert_eq!(s.selection(), Some(Selection::Fallback));
        let mut s = SelectiveRobust::new(crate::online::default_alpha(), ratio(1, 2)).unwrap();
        s.init(&info).unwrap();
        assert_eq!(s.selection(), Some(Selection::Robust));
    }
}
