use serde::Serialize;

use crate::args::{Suite, VerifyArgs};
use crate::checks::{self, Check, EV_TAUS};
use crate::error::{CliError, CliResult};
use crate::output;

#[derive(Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

pub fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::Bessel => "bessel",
        Suite::Circle => "circle",
        Suite::Line => "line",
        Suite::Symmetry => "symmetry",
        Suite::Asymptotics => "asymptotics",
        Suite::All => "all",
    }
}

pub fn suite_checks(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Bessel => {
            let mut v = vec![checks::wronskian(60, 200, 1e-12)];
            v.extend(checks::reference_agreement(10_000, 60, 1, 1e-12));
            v
        }
        Suite::Circle => {
            let mut v = Vec::new();
            for tau in EV_TAUS {
                v.extend(checks::oracle_agreement(tau, 20, 1e-8, 1e-11));
                v.extend(checks::exclusions(tau, 50, 1e-4));
                v.extend(checks::eigenfunction_integrity(tau, 30, 1e-10, 1e-8, 1e-6));
            }
            v.extend(checks::concentration());
            v
        }
        Suite::Line => {
            let mut v = vec![checks::transfer_square(100, 2, 1e-14)];
            v.extend(checks::transmission(1e-8));
            v.push(checks::norm_identity(10, 3, 1e-6));
            v.push(checks::closed_forms(1e-5));
            v.push(checks::tail_rate(0.02));
            v
        }
        Suite::Symmetry => vec![
            checks::mirror_symmetry(1.0, 30, 1e-10),
            checks::mirror_symmetry(-1.0, 30, 1e-10),
        ],
        Suite::Asymptotics => {
            let mut v = vec![checks::remainder_order(2.0)];
            v.extend(checks::radius_independence(1e-6, 1e-4));
            for tau in EV_TAUS {
                v.extend(checks::spin_and_velocity(tau, 0.2, 1e-10));
            }
            v
        }
        Suite::All => [
            Suite::Bessel,
            Suite::Circle,
            Suite::Line,
            Suite::Symmetry,
            Suite::Asymptotics,
        ]
        .into_iter()
        .flat_map(suite_checks)
        .collect(),
    }
}

pub fn run(args: &VerifyArgs) -> CliResult<()> {
    let report = Report {
        suite: suite_name(args.suite).into(),
        checks: suite_checks(args.suite),
    };
    let mut bytes = serde_json::to_vec_pretty(&report)?;
    bytes.push(b'\n');
    output::emit(&bytes, args.out.as_deref())?;
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(CliError::Verify {
            failed,
            total: report.checks.len(),
        });
    }
    Ok(())
}
