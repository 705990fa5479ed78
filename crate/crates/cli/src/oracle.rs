use std::fmt::Write as _;

use trp::offline::{brute_force_latency, optimal_latency_tour, BRUTE_FORCE_MAX};
use trp::Instance;

use crate::CliError;

/// Optimal latency tour over the actual locations, all released at time 0.
///
/// With `brute`, the interval DP is checked against exhaustive search and a
/// disagreement is reported as [`CliError::Mismatch`].
pub fn oracle(instance: &Instance, brute: bool) -> Result<String, CliError> {
    let points = instance.actual_locations();
    let (tour, cost) = optimal_latency_tour(&points)?;
    tour.check_structure(&points).map_err(|e| CliError::Mismatch(e.to_string()))?;
    let arcs = tour.arc_index();

    let mut out = String::new();
    let _ = writeln!(out, "tour {tour}");
    let _ = writeln!(out, "arclength {}", tour.total_arclength());
    let _ = writeln!(out, "latency {cost}");
    for (request, point) in instance.requests().iter().zip(&points) {
        let _ = writeln!(out, "request {} at {point} reached at {}", request.id, arcs.arc_to(point)?);
    }
    if brute {
        if points.len() > BRUTE_FORCE_MAX {
            return Err(CliError::Usage(format!(
                "--brute handles at most {BRUTE_FORCE_MAX} requests, got {}",
                points.len()
            )));
        }
        let (exhaustive, order) = brute_force_latency(&points, BRUTE_FORCE_MAX)?;
        let order: Vec<String> = order.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "brute force {exhaustive} order {}", order.join(","));
        if exhaustive != cost {
            return Err(CliError::Mismatch(format!("dynamic program gives {cost}, exhaustive search gives {exhaustive}")));
        }
        let _ = writeln!(out, "agree");
    }
    Ok(out)
}
