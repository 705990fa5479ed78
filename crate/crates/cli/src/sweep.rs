use rand::Rng;
use rayon::prelude::*;

use trp::generate::{perturbed_instance, seeded_rng, GeneratorSpec};
use trp::online::{default_alpha, select_algorithm, Selection, StrategyKind};
use trp::simulator::{run, ServiceReport};
use trp::{LineSegment, QuadraticScalar, Scalar};

use crate::certify::{certified_bound, Basis, Certificate};
use crate::{approx, csv_to_string, CliError};

/// A grid of seeded trials.
///
/// Trial `i` draws from stream `i` of the seeded generator: first its size,
/// then one perturbed instance per relative error `δ`, with `Δ = δ·|L|`.
/// Every strategy runs on the same instances.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub trials: usize,
    pub n_min: usize,
    pub n_max: usize,
    /// Relative errors `δ`.
    pub deltas: Vec<Scalar>,
    pub seed: u64,
    pub strategies: Vec<StrategyKind>,
    pub line: LineSegment,
    pub max_arrival: u64,
    pub grid: u64,
    pub alpha: QuadraticScalar,
}

impl SweepSpec {
    pub fn new(line: LineSegment, strategies: Vec<StrategyKind>, deltas: Vec<Scalar>) -> Self {
        Self {
            trials: 100,
            n_min: 1,
            n_max: 10,
            deltas,
            seed: 0,
            strategies,
            line,
            max_arrival: 20,
            grid: 100,
            alpha: default_alpha(),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(CliError::Usage(format!("bad request-count range {}..={}", self.n_min, self.n_max)));
        }
        if self.deltas.is_empty() || self.strategies.is_empty() {
            return Err(CliError::Usage("need at least one delta and one strategy".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub trial: usize,
    pub strategy: StrategyKind,
    pub delta: Scalar,
    pub n: usize,
    pub selection: Selection,
    /// `ok`, or why the run could not complete.
    pub status: String,
    pub report: Option<ServiceReport>,
    pub certificate: Option<Certificate>,
}

impl SweepRow {
    fn basis(&self) -> Basis {
        self.certificate.as_ref().map_or(Basis::Request, |c| c.basis)
    }

    /// The ratio the row is judged by.
    pub fn measured(&self) -> Option<&QuadraticScalar> {
        let report = self.report.as_ref()?;
        Some(match self.basis() {
            Basis::Request => &report.max_request_ratio,
            Basis::Tour => &report.max_tour_ratio,
        })
    }

    pub fn pass(&self) -> Option<bool> {
        Some(self.certificate.as_ref()?.holds(self.report.as_ref()?))
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// Per strategy, the row with the largest measured ratio and whether
    /// every certified row held.
    pub worst: Vec<(SweepRow, Option<bool>)>,
}

impl SweepOutcome {
    pub fn all_certified(&self) -> bool {
        self.rows.iter().all(|r| r.pass() != Some(false))
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        csv_to_string(|w| {
            w.write_record([
                "trial",
                "strategy",
                "delta",
                "n",
                "selection",
                "status",
                "max_request_ratio",
                "max_request_ratio_approx",
                "max_tour_ratio",
                "max_tour_ratio_approx",
                "sum_ratio_approx",
                "bound",
                "bound_approx",
                "basis",
                "pass",
            ])?;
            let rows = self.rows.iter().map(|r| (r.trial.to_string(), r, r.pass()));
            let worst = self.worst.iter().map(|(r, pass)| ("worst".to_string(), r, *pass));
            for (trial, row, pass) in rows.chain(worst) {
                let exact = |f: fn(&ServiceReport) -> &QuadraticScalar| row.report.as_ref().map(f);
                let show = |q: Option<&QuadraticScalar>| q.map_or(String::new(), ToString::to_string);
                let show_approx = |q: Option<&QuadraticScalar>| q.map_or(String::new(), approx);
                let bound = row.certificate.as_ref().map(|c| &c.bound);
                w.write_record([
                    trial,
                    row.strategy.to_string(),
                    row.delta.to_string(),
                    row.n.to_string(),
                    format!("{:?}", row.selection),
                    row.status.clone(),
                    show(exact(|r| &r.max_request_ratio)),
                    show_approx(exact(|r| &r.max_request_ratio)),
                    show(exact(|r| &r.max_tour_ratio)),
                    show_approx(exact(|r| &r.max_tour_ratio)),
                    show_approx(exact(|r| &r.sum_ratio)),
                    show(bound),
                    show_approx(bound),
                    row.basis().to_string(),
                    pass.map_or("-".to_string(), |p| p.to_string()),
                ])?;
            }
            Ok(())
        })
    }
}

fn run_trial(spec: &SweepSpec, trial: usize) -> Result<Vec<SweepRow>, CliError> {
    let mut rng = seeded_rng(spec.seed);
    rng.set_stream(trial as u64);
    let n = rng.gen_range(spec.n_min..=spec.n_max);
    let generator = GeneratorSpec { n, max_arrival: spec.max_arrival, grid: spec.grid, ..GeneratorSpec::new(spec.line.clone(), n, 0) };
    let length = spec.line.length();
    let mut rows = Vec::new();
    for relative in &spec.deltas {
        let delta = relative * &length;
        let instance = perturbed_instance(&generator, &delta, &mut rng)?;
        let selection = select_algorithm(&delta, &spec.line);
        for &strategy in &spec.strategies {
            let outcome = strategy.build(&spec.alpha, &delta).map_err(CliError::from).and_then(|mut s| Ok(run(&instance, &mut s)?));
            let (status, report) = match outcome {
                Ok(result) => ("ok".to_string(), Some(result.report)),
                Err(e) => (e.to_string(), None),
            };
            rows.push(SweepRow {
                trial,
                strategy,
                delta: relative.clone(),
                n,
                selection,
                status,
                report,
                certificate: certified_bound(strategy, &spec.line, &delta, &instance.max_error()),
            });
        }
    }
    Ok(rows)
}

/// Runs every trial in parallel; rows come back in trial order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome, CliError> {
    spec.validate()?;
    let per_trial: Vec<Vec<SweepRow>> = (0..spec.trials).into_par_iter().map(|t| run_trial(spec, t)).collect::<Result<_, _>>()?;
    let rows: Vec<SweepRow> = per_trial.into_iter().flatten().collect();
    let worst = spec
        .strategies
        .iter()
        .filter_map(|&strategy| {
            let mine = rows.iter().filter(|r| r.strategy == strategy);
            let worst = mine.clone().filter(|r| r.measured().is_some()).max_by(|a, b| a.measured().cmp(&b.measured()).then(b.trial.cmp(&a.trial)))?;
            let certified: Vec<bool> = mine.filter_map(SweepRow::pass).collect();
            let all = (!certified.is_empty()).then(|| certified.iter().all(|&p| p));
            Some((worst.clone(), all))
        })
        .collect();
    Ok(SweepOutcome { rows, worst })
}
