use trp::adversary::{play_lowerbound_game, verify_witness, GameConfig, GameTranscript};
use trp::online::{default_alpha, StrategyKind};
use trp::scalar::int;
use trp::{QuadraticScalar, Scalar};

use crate::{approx, csv_to_string, CliError};

#[derive(Debug, Clone)]
pub struct AdversaryArgs {
    pub strategy: StrategyKind,
    pub alpha: QuadraticScalar,
    pub delta: Scalar,
    pub epsilons: usize,
}

impl AdversaryArgs {
    pub fn new(strategy: StrategyKind) -> Self {
        Self { strategy, alpha: default_alpha(), delta: int(0), epsilons: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct AdversaryOutput {
    pub transcript: GameTranscript,
    pub log: String,
    /// `step,position,position_approx,action`.
    pub csv: String,
    /// Exact ratio of the verified witness.
    pub witness_ratio: Option<QuadraticScalar>,
}

/// Plays the lower-bound game twice and verifies the witness.
///
/// An escape is returned as output, not as an error; the caller decides
/// whether it is a failure.
pub fn adversary(args: &AdversaryArgs) -> Result<AdversaryOutput, CliError> {
    let config = GameConfig::with_epsilon_count(args.epsilons);
    args.strategy.build(&args.alpha, &args.delta)?;
    let transcript = play_lowerbound_game(
        || args.strategy.build(&args.alpha, &args.delta).expect("parameters were checked"),
        &config,
    )?;
    let witness_ratio = match transcript.witness {
        Some(_) => Some(verify_witness(&transcript)?),
        None => None,
    };
    let csv = csv_to_string(|w| {
        w.write_record(["step", "position", "position_approx", "action"])?;
        for o in &transcript.observations {
            w.write_record([o.step.to_string(), o.position.to_string(), approx(&o.position), o.action.clone()])?;
        }
        Ok(())
    })?;
    Ok(AdversaryOutput { log: transcript.log(), transcript, csv, witness_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfline_is_caught() {
        let out = adversary(&AdversaryArgs::new(StrategyKind::HalfLine)).unwrap();
        assert!(out.witness_ratio.unwrap() > QuadraticScalar::from_int(3));
        assert!(out.csv.starts_with("step,position,position_approx,action\n"));
        assert!(out.log.contains("witness request"));
    }
}
