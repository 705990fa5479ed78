//! Seeded instance generators.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{Instance, InstanceError, LineSegment, Model, Request};
use crate::scalar::{int, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("at least one request is required")]
    NoRequests,
    #[error("grid must be positive")]
    BadGrid,
    #[error("delta must satisfy 0 <= delta < |L| (got {0})")]
    BadDelta(Scalar),
    #[error("coordinates too large for the generator")]
    Overflow,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// The stream every generator draws from.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random instance: positions on the lattice `(1/grid)ℤ ∩ [a, b]`
/// and integer arrival times in `[0, max_arrival]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub line: LineSegment,
    pub n: usize,
    pub max_arrival: u64,
    pub grid: u64,
    pub model: Model,
}

impl GeneratorSpec {
    pub fn new(line: LineSegment, n: usize, max_arrival: u64) -> Self {
        Self { line, n, max_arrival, grid: 100, model: Model::Prediction }
    }

    fn validate(&self) -> Result<(), GenerateError> {
        if self.n == 0 {
            return Err(GenerateError::NoRequests);
        }
        if self.grid == 0 {
            return Err(GenerateError::BadGrid);
        }
        Ok(())
    }

    fn lattice_bounds(&self) -> Result<(i64, i64), GenerateError> {
        let g = Scalar::from_integer(BigInt::from(self.grid));
        let lo = (self.line.left() * &g).ceil().to_integer().to_i64().ok_or(GenerateError::Overflow)?;
        let hi = (self.line.right() * &g).floor().to_integer().to_i64().ok_or(GenerateError::Overflow)?;
        Ok((lo, hi))
    }

    fn position<R: Rng>(&self, rng: &mut R, bounds: (i64, i64)) -> Scalar {
        Scalar::new(rng.gen_range(bounds.0..=bounds.1).into(), BigInt::from(self.grid))
    }

    fn arrival<R: Rng>(&self, rng: &mut R) -> Scalar {
        int(rng.gen_range(0..=self.max_arrival) as i64)
    }
}

/// Perfectly predicted requests.
pub fn random_instance<R: Rng>(spec: &GeneratorSpec, rng: &mut R) -> Result<Instance, GenerateError> {
    spec.validate()?;
    let bounds = spec.lattice_bounds()?;
    let requests = (0..spec.n)
        .map(|id| {
            let location = spec.position(rng, bounds);
            Request::exact(id, location, spec.arrival(rng))
        })
        .collect();
    Ok(Instance::new(spec.line.clone(), requests, spec.model)?)
}

/// Actual locations are the predictions shifted by a uniform offset in
/// `[−Δ, Δ]` (in steps of `Δ/1000`), clamped to the line.
pub fn perturbed_instance<R: Rng>(spec: &GeneratorSpec, delta: &Scalar, rng: &mut R) -> Result<Instance, GenerateError> {
    spec.validate()?;
    if delta.is_negative() || *delta >= spec.line.length() {
        return Err(GenerateError::BadDelta(delta.clone()));
    }
    let bounds = spec.lattice_bounds()?;
    let requests = (0..spec.n)
        .map(|id| {
            let predicted = spec.position(rng, bounds);
            let offset = delta * Scalar::new(rng.gen_range(-1000i64..=1000).into(), 1000.into());
            let actual = spec.line.clamp(&predicted + offset);
            Request::new(id, predicted, actual, spec.arrival(rng))
        })
        .collect();
    Ok(Instance::new(spec.line.clone(), requests, spec.model)?)
}

/// Eight requests at `1, 4, 5, …, 10` on `[0, 10]`, all at time 0.
pub fn lowerbound_instance() -> Instance {
    let line = LineSegment::new(int(0), int(10)).expect("valid line");
    let locations = std::iter::once(1).chain(4..=10);
    let requests = locations.enumerate().map(|(id, l)| Request::exact(id, int(l), int(0))).collect();
    Instance::new(line, requests, Model::Prediction).expect("valid instance")
}
