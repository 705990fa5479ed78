use std::fmt::Write as _;

use trp::online::{default_alpha, StrategyKind};
use trp::simulator::run;
use trp::{Instance, QuadraticScalar, Scalar};

use crate::certify::{certified_bound, Certificate};
use crate::{approx, csv_to_string, CliError};

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub strategy: StrategyKind,
    pub alpha: QuadraticScalar,
    /// Error bound for the robust strategy; defaults to the instance's
    /// largest prediction error.
    pub delta: Option<Scalar>,
    pub certify: bool,
}

impl SimulateArgs {
    pub fn new(strategy: StrategyKind) -> Self {
        Self { strategy, alpha: default_alpha(), delta: None, certify: false }
    }
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    /// One row per request.
    pub csv: String,
    pub summary: String,
    pub certificate: Option<Certificate>,
    /// `Some(false)` when `certify` was asked for and the bound fails.
    pub certified: Option<bool>,
}

pub fn simulate(instance: &Instance, args: &SimulateArgs) -> Result<SimulateOutput, CliError> {
    let delta = args.delta.clone().unwrap_or_else(|| instance.max_error());
    let mut strategy = args.strategy.build(&args.alpha, &delta)?;
    let result = run(instance, &mut strategy)?;
    let report = &result.report;

    let csv = csv_to_string(|w| {
        w.write_record([
            "id",
            "predicted",
            "actual",
            "t",
            "completion",
            "completion_approx",
            "opt_lb",
            "ratio",
            "ratio_approx",
            "tour_lb",
            "tour_ratio",
            "tour_ratio_approx",
        ])?;
        for (request, outcome) in instance.requests().iter().zip(&report.outcomes) {
            w.write_record([
                request.id.to_string(),
                request.predicted.to_string(),
                request.actual.to_string(),
                request.arrival.to_string(),
                outcome.completion.to_string(),
                approx(&outcome.completion),
                outcome.opt_lower_bound.to_string(),
                outcome.ratio.to_string(),
                approx(&outcome.ratio),
                outcome.tour_bound.to_string(),
                outcome.tour_ratio.to_string(),
                approx(&outcome.tour_ratio),
            ])?;
        }
        Ok(())
    })?;

    let certificate = certified_bound(args.strategy, instance.line(), &delta, &instance.max_error());
    let mut summary = String::new();
    let _ = writeln!(summary, "strategy {} delta {delta}", args.strategy);
    let _ = writeln!(summary, "on_sum {} ({})", report.on_sum, approx(&report.on_sum));
    let _ = writeln!(summary, "opt_sum_lb {}", report.opt_sum_lower_bound);
    let _ = writeln!(summary, "sum_ratio {} ({})", report.sum_ratio, approx(&report.sum_ratio));
    let _ = writeln!(summary, "max_request_ratio {} ({})", report.max_request_ratio, approx(&report.max_request_ratio));
    let _ = writeln!(summary, "max_tour_ratio {} ({})", report.max_tour_ratio, approx(&report.max_tour_ratio));
    let certified = match &certificate {
        Some(c) => {
            let holds = c.holds(report);
            let verdict = if holds { "holds" } else { "VIOLATED" };
            let _ = writeln!(summary, "bound {} ({}) on {} basis: {verdict}", c.bound, approx(&c.bound), c.basis);
            args.certify.then_some(holds)
        }
        None => {
            let _ = writeln!(summary, "bound none");
            None
        }
    };
    Ok(SimulateOutput { csv, summary, certificate, certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use trp::format::parse_instance;

    #[test]
    fn perfect_two_point_rows() {
        let inst = parse_instance("LINE -5 5\nREQ -1 -1 0\nREQ 2 2 0\n").unwrap();
        let mut args = SimulateArgs::new(StrategyKind::Perfect);
        args.certify = true;
        let out = simulate(&inst, &args).unwrap();
        let mut lines = out.csv.lines();
        assert!(lines.next().unwrap().starts_with("id,predicted,actual,t,completion"));
        assert!(lines.next().unwrap().starts_with("0,-1,-1,0,1,1.000000,1,1,"));
        assert!(lines.next().unwrap().starts_with("1,2,2,0,6+1*sqrt3,7.732051,2,"));
        assert_eq!(out.certified, Some(true));
    }

    #[test]
    fn incompatible_strategy_is_an_error() {
        let inst = parse_instance("LINE -5 5\nREQ -1 -1 0\n").unwrap();
        assert!(simulate(&inst, &SimulateArgs::new(StrategyKind::HalfLine)).is_err());
        let original = parse_instance("LINE -5 5\nMODEL original\nREQ -1 -1 0\n").unwrap();
        assert!(simulate(&original, &SimulateArgs::new(StrategyKind::Perfect)).is_err());
    }
}
