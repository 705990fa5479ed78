use std::fmt;
use std::str::FromStr;

use trp::format::serialize_instance;
use trp::generate::{lowerbound_instance, perturbed_instance, random_instance, seeded_rng, GeneratorSpec};
use trp::scalar::int;
use trp::{Instance, LineSegment, Model, Scalar};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Random,
    Perturbed,
    Lowerbound,
}

impl FromStr for GeneratorKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(GeneratorKind::Random),
            "perturbed" => Ok(GeneratorKind::Perturbed),
            "lowerbound" => Ok(GeneratorKind::Lowerbound),
            other => Err(CliError::Usage(format!("unknown generator `{other}` (expected random, perturbed or lowerbound)"))),
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Random => "random",
            GeneratorKind::Perturbed => "perturbed",
            GeneratorKind::Lowerbound => "lowerbound",
        })
    }
}

#[derive(Debug, Clone)]
pub struct GenerateArgs {
    pub kind: GeneratorKind,
    pub seed: u64,
    pub line: LineSegment,
    pub n: usize,
    pub max_arrival: u64,
    pub grid: u64,
    /// Absolute perturbation bound for `perturbed`.
    pub delta: Scalar,
    pub model: Model,
}

impl GenerateArgs {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            line: LineSegment::new(int(-10), int(10)).expect("valid line"),
            n: 10,
            max_arrival: 20,
            grid: 100,
            delta: int(0),
            model: Model::Prediction,
        }
    }
}

pub fn generate_instance(args: &GenerateArgs) -> Result<Instance, CliError> {
    let spec = GeneratorSpec { line: args.line.clone(), n: args.n, max_arrival: args.max_arrival, grid: args.grid, model: args.model };
    let mut rng = seeded_rng(args.seed);
    Ok(match args.kind {
        GeneratorKind::Random => random_instance(&spec, &mut rng)?,
        GeneratorKind::Perturbed => perturbed_instance(&spec, &args.delta, &mut rng)?,
        GeneratorKind::Lowerbound => lowerbound_instance().with_model(args.model),
    })
}

/// The generated instance in file form.
pub fn generate(args: &GenerateArgs) -> Result<String, CliError> {
    let instance = generate_instance(args)?;
    let mut text = format!("# generated: {} seed {}\n", args.kind, args.seed);
    text.push_str(&serialize_instance(&instance));
    Ok(text)
}
